//! Single-particle spectra that turn time evolution into spatial reflection.
//!
//! A mirror-symmetric chain reflects every one-particle state at time `tau`
//! exactly when `eps_nu * tau = (2 n(nu) + nu) * pi + phi0` for some integers
//! `n(nu)`, i.e. when every consecutive gap times `tau / pi` is an odd
//! integer. This module certifies that condition and generates spectra
//! satisfying it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default absolute tolerance on the odd-integer residual.
pub const DEFAULT_CERT_TOL: f64 = 1e-9;

/// Positive half of the 31-level integer spectrum with `tau = pi`
/// (the full list is these values, their negatives, and zero).
pub const MIRROR31_POSITIVE_LEVELS: [i64; 15] = [
    21, 40, 61, 80, 97, 116, 131, 146, 161, 172, 183, 192, 199, 204, 207,
];

/// Ordered one-particle energies with mirror time and phase bookkeeping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SpectrumSpec<T> {
    pub energies: Vec<T>,
    pub tau: T,
    pub phi0: T,
    pub n_assign: Vec<i64>,
}

impl<T: Real> SpectrumSpec<T> {
    pub fn n_levels(&self) -> usize {
        self.energies.len()
    }

    /// Re-derives the certificate from `energies` and `tau` alone.
    pub fn certify(&self, tol: T) -> Result<MirrorCertificate<T>> {
        certify_spectrum(&self.energies, self.tau, tol)
    }

    /// Checks that the stored `phi0` and `n_assign` reproduce every level.
    pub fn bookkeeping_residual(&self) -> T {
        let pi = T::PI();
        self.energies
            .iter()
            .zip(&self.n_assign)
            .enumerate()
            .map(|(nu, (&e, &n))| {
                let rhs = T::lit((2 * n + nu as i64) as f64) * pi + self.phi0;
                (e * self.tau - rhs).abs() / pi
            })
            .fold(T::zero(), T::max)
    }

    /// Energies times `c`, mirror time divided by `c`; phase data unchanged.
    pub fn scaled(&self, c: T) -> Self {
        Self {
            energies: self.energies.iter().map(|&e| e * c).collect(),
            tau: self.tau / c,
            phi0: self.phi0,
            n_assign: self.n_assign.clone(),
        }
    }

    /// True when `eps_nu = -eps_{N-nu}` within `tol` (relative to the spread).
    pub fn is_antisymmetric(&self, tol: T) -> bool {
        let n = self.energies.len();
        let spread = self.energies[n - 1] - self.energies[0];
        (0..n).all(|nu| (self.energies[nu] + self.energies[n - 1 - nu]).abs() <= tol * spread)
    }

    /// Builds a certified spec from raw energies, failing if the mirror
    /// condition does not hold at `tol`.
    pub fn from_energies(energies: Vec<T>, tau: T, tol: T) -> Result<Self> {
        let cert = certify_spectrum(&energies, tau, tol)?;
        if !cert.valid {
            return Err(Error::InvalidParameter(format!(
                "spectrum is not mirror-valid at tau = {tau} (worst residual {:e})",
                cert.worst_residual
            )));
        }
        Ok(Self {
            energies,
            tau,
            phi0: cert.phi0,
            n_assign: cert.n_assign,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(s)?;
        check_ascending(&spec.energies)?;
        if spec.n_assign.len() != spec.energies.len() {
            return Err(Error::LengthMismatch {
                what: "n_assign",
                expected: spec.energies.len(),
                found: spec.n_assign.len(),
            });
        }
        Ok(spec)
    }
}

/// Verdict of [`certify_spectrum`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct MirrorCertificate<T> {
    pub valid: bool,
    pub tau: T,
    /// `eps_0 * tau` reduced to `(-pi, pi]`.
    pub phi0: T,
    /// Distance of `(eps_nu tau - phi0)/pi - nu` from the nearest even integer.
    pub residuals: Vec<T>,
    pub worst_residual: T,
    pub n_assign: Vec<i64>,
}

fn check_ascending<T: Real>(energies: &[T]) -> Result<()> {
    if energies.len() < 2 {
        return Err(Error::TooFewSites(energies.len()));
    }
    if energies.iter().any(|e| !e.is_finite()) {
        return Err(Error::NonFinite("energies"));
    }
    match energies.windows(2).position(|w| w[1] <= w[0]) {
        Some(i) => Err(Error::NotAscending { index: i + 1 }),
        None => Ok(()),
    }
}

/// Reduces an angle to `(-pi, pi]`.
fn reduce_phase<T: Real>(x: T) -> T {
    let two_pi = T::TAU();
    let mut r = x - two_pi * (x / two_pi).round();
    if r <= -T::PI() {
        r += two_pi;
    } else if r > T::PI() {
        r -= two_pi;
    }
    r
}

/// Tests the perfect-mirror condition for `energies` at time `tau`.
pub fn certify_spectrum<T: Real>(energies: &[T], tau: T, tol: T) -> Result<MirrorCertificate<T>> {
    check_ascending(energies)?;
    if !(tau > T::zero() && tau.is_finite()) {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
    }
    let pi = T::PI();
    let two = T::lit(2.0);
    let phi0 = reduce_phase(energies[0] * tau);
    let mut residuals = Vec::with_capacity(energies.len());
    let mut n_assign = Vec::with_capacity(energies.len());
    for (nu, &e) in energies.iter().enumerate() {
        let x = (e * tau - phi0) / pi - T::from_usize_lossy(nu);
        let n = (x / two).round();
        residuals.push((x - two * n).abs());
        n_assign.push(n.to_i64().unwrap_or(i64::MAX));
    }
    let worst_residual = residuals.iter().copied().fold(T::zero(), T::max);
    Ok(MirrorCertificate {
        valid: worst_residual < tol,
        tau,
        phi0,
        residuals,
        worst_residual,
        n_assign,
    })
}

/// Distance of every `(eps_{nu+1} - eps_nu) tau / pi` from the nearest odd
/// integer. The spectrum is mirror-valid iff all are below tolerance.
pub fn gap_residuals<T: Real>(energies: &[T], tau: T) -> Vec<T> {
    let two = T::lit(2.0);
    energies
        .windows(2)
        .map(|w| {
            let g = (w[1] - w[0]) * tau / T::PI();
            let odd = two * ((g - T::one()) / two).round() + T::one();
            (g - odd).abs()
        })
        .collect()
}

/// Self-check tolerance for generated spectra: [`DEFAULT_CERT_TOL`], or a
/// few ulps of the largest phase for low-precision scalars.
fn generation_tol<T: Real>(spec: &SpectrumSpec<T>) -> T {
    let largest = spec.energies.iter().fold(T::zero(), |m, &e| m.max((e * spec.tau / T::PI()).abs()));
    T::lit(DEFAULT_CERT_TOL).max(T::lit(16.0) * T::epsilon() * (T::one() + largest))
}

fn certified<T: Real>(spec: SpectrumSpec<T>) -> Result<SpectrumSpec<T>> {
    let tol = generation_tol(&spec);
    let cert = spec.certify(tol)?;
    if !cert.valid || spec.bookkeeping_residual() > tol {
        return Err(Error::Internal(format!(
            "generated spectrum failed certification (residual {:e})",
            cert.worst_residual
        )));
    }
    Ok(spec)
}

fn check_levels(n_levels: usize) -> Result<()> {
    if n_levels < 2 {
        return Err(Error::TooFewSites(n_levels));
    }
    Ok(())
}

fn check_positive<T: Real>(name: &str, x: T) -> Result<()> {
    if !(x > T::zero() && x.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name} must be positive, got {x}")));
    }
    Ok(())
}

/// `eps_nu = omega0 + nu * omega`, mirrored at `tau = pi / omega` with
/// `phi0 = pi * omega0 / omega` and `n(nu) = 0`.
pub fn linear_spectrum<T: Real>(n_levels: usize, omega0: T, omega: T) -> Result<SpectrumSpec<T>> {
    check_levels(n_levels)?;
    check_positive("omega", omega)?;
    let energies = (0..n_levels)
        .map(|nu| omega0 + T::from_usize_lossy(nu) * omega)
        .collect();
    certified(SpectrumSpec {
        energies,
        tau: T::PI() / omega,
        phi0: T::PI() * omega0 / omega,
        n_assign: vec![0; n_levels],
    })
}

/// `eps_nu = omega0 + nu (nu + 1 + (2p+1)/q) omega`, mirrored at
/// `tau = q pi / omega` with `phi0 = q pi omega0 / omega` and
/// `n(nu) = q nu (nu+1) / 2 + p nu`.
pub fn quadratic_spectrum<T: Real>(
    n_levels: usize,
    omega0: T,
    omega: T,
    p: u32,
    q: u32,
) -> Result<SpectrumSpec<T>> {
    check_levels(n_levels)?;
    check_positive("omega", omega)?;
    if p == 0 || q == 0 {
        return Err(Error::InvalidParameter(format!(
            "p and q must be positive integers, got p = {p}, q = {q}"
        )));
    }
    let shift = T::lit(f64::from(2 * p + 1) / f64::from(q));
    let qt = T::lit(f64::from(q));
    let energies = (0..n_levels)
        .map(|nu| {
            let v = T::from_usize_lossy(nu);
            omega0 + v * (v + T::one() + shift) * omega
        })
        .collect();
    let n_assign = (0..n_levels as i64)
        .map(|nu| i64::from(q) * nu * (nu + 1) / 2 + i64::from(p) * nu)
        .collect();
    certified(SpectrumSpec {
        energies,
        tau: qt * T::PI() / omega,
        phi0: qt * T::PI() * omega0 / omega,
        n_assign,
    })
}

/// Amplitude for which the low-lying cosine levels sit at `(nu+1)^2` above
/// the band bottom, so their gaps 3, 5, 7, ... are already odd.
pub fn natural_amplitude(n_levels: usize) -> f64 {
    let w = (n_levels + 1) as f64;
    2.0 * w * w / (std::f64::consts::PI * std::f64::consts::PI)
}

/// `A = N^2 * a0` for a chain of `N + 1` sites.
pub fn amplitude_from_scale(n_levels: usize, a0: f64) -> f64 {
    let n = n_levels.saturating_sub(1) as f64;
    n * n * a0
}

/// Rounds `raw` to the nearest member of `offset + 2Z`, ties toward the
/// larger magnitude.
fn round_to_class(raw: f64, offset: f64) -> f64 {
    let k = ((raw - offset) / 2.0).floor();
    let lo = offset + 2.0 * k;
    let hi = lo + 2.0;
    let (dl, dh) = (raw - lo, hi - raw);
    if (dl - dh).abs() <= 1e-12 * raw.abs().max(1.0) {
        if hi.abs() >= lo.abs() {
            hi
        } else {
            lo
        }
    } else if dl < dh {
        lo
    } else {
        hi
    }
}

/// Cosine band `-A cos(pi (nu+1)/(N+2))` snapped onto a mirror-valid grid
/// with `tau = pi` and zero mean.
///
/// Level `nu` is placed on `nu - N/2 + 2Z` (integers for an odd number of
/// levels, half-integers for an even number), which makes every gap odd
/// and the spectrum antisymmetric. Colliding levels are pushed outward in
/// steps of 2; the amplitude is rejected when a level needs more than one
/// step or the push reaches the band edge.
pub fn cosine_distorted_spectrum(n_levels: usize, amplitude: f64) -> Result<SpectrumSpec<f64>> {
    check_levels(n_levels)?;
    check_positive("amplitude", amplitude)?;
    let big_n = n_levels - 1;
    let half_n = big_n as f64 / 2.0;
    let first_upper = n_levels / 2;
    let mut upper = Vec::with_capacity(n_levels - first_upper);
    let mut prev = 0.0;
    for nu in first_upper..n_levels {
        let raw = -amplitude
            * (std::f64::consts::PI * (nu + 1) as f64 / (big_n + 2) as f64).cos();
        let offset = (nu as f64 - half_n).rem_euclid(2.0);
        let rounded = if big_n % 2 == 0 && nu == big_n / 2 {
            0.0
        } else {
            round_to_class(raw, offset)
        };
        let mut level = rounded;
        if big_n % 2 == 1 || nu != big_n / 2 {
            while level <= prev {
                level += 2.0;
            }
        }
        if level - rounded > 2.0 || (nu == big_n && level != rounded) {
            return Err(Error::MonotonicityUnrecoverable { amplitude });
        }
        upper.push(level);
        prev = level;
    }
    let mut energies: Vec<f64> = upper
        .iter()
        .rev()
        .filter(|&&e| e != 0.0)
        .map(|&e| -e)
        .collect();
    energies.extend_from_slice(&upper);
    debug_assert_eq!(energies.len(), n_levels);
    SpectrumSpec::from_energies(energies, std::f64::consts::PI, DEFAULT_CERT_TOL)
}

/// The 31-level integer spectrum listed in [`MIRROR31_POSITIVE_LEVELS`].
pub fn mirror31_spectrum() -> SpectrumSpec<f64> {
    let mut energies: Vec<f64> = MIRROR31_POSITIVE_LEVELS
        .iter()
        .rev()
        .map(|&e| -(e as f64))
        .collect();
    energies.push(0.0);
    energies.extend(MIRROR31_POSITIVE_LEVELS.iter().map(|&e| e as f64));
    SpectrumSpec::from_energies(energies, std::f64::consts::PI, DEFAULT_CERT_TOL)
        .expect("tabulated spectrum is mirror-valid")
}
