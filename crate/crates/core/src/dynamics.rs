//! Exact free-fermion time evolution of an XX chain.
//!
//! All quantities follow from the one-particle eigensystem: the propagator
//! `U(t) = V e^{-i eps t} V^T`, the Fermi factors of a grand-canonical
//! thermal state at zero chemical potential, and Wick's theorem for
//! quadratic observables.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi::EigenSystem;
use crate::scalar::{max_abs, Real};
pub use crate::series::{periodicity_check, CorrelationSeries};

/// Energies with `|eps| <= 1e-12 * max|eps|` count as zero modes at `T = 0`.
const ZERO_MODE_TOL: f64 = 1e-12;

/// Equilibrium temperature (`k_B = 1`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Temperature {
    Zero,
    Finite(f64),
    Infinite,
}

impl Temperature {
    /// `0` maps to [`Temperature::Zero`], `+inf` to [`Temperature::Infinite`].
    pub fn new(t: f64) -> Result<Self> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::InvalidParameter(format!("temperature must be >= 0, got {t}")));
        }
        Ok(if t == 0.0 {
            Self::Zero
        } else if t.is_infinite() {
            Self::Infinite
        } else {
            Self::Finite(t)
        })
    }

    /// `1 / T`, or `None` at `T = 0`.
    pub fn beta(self) -> Option<f64> {
        match self {
            Self::Zero => None,
            Self::Finite(t) => Some(1.0 / t),
            Self::Infinite => Some(0.0),
        }
    }
}

impl fmt::Display for Temperature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "0"),
            Self::Finite(t) => write!(f, "{t}"),
            Self::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Temperature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s.to_ascii_lowercase().as_str(), "inf" | "infinity" | "infinite") {
            return Ok(Self::Infinite);
        }
        let t: f64 = s
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("cannot parse temperature {s:?}")))?;
        Self::new(t)
    }
}

/// Fermi occupations `f(eps_nu) = 1 / (1 + e^{beta eps_nu})` of every mode.
///
/// At `T = 0` zero modes are half filled, the `beta -> inf` limit of the
/// Fermi function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ThermalState<T> {
    pub temperature: Temperature,
    pub occupation: Vec<T>,
}

impl<T: Real> ThermalState<T> {
    pub fn new(eig: &EigenSystem<T>, temperature: Temperature) -> Self {
        let eps = eig.eigenvalues();
        let half = T::lit(0.5);
        let occupation = match temperature.beta() {
            None => {
                let tol = T::lit(ZERO_MODE_TOL) * max_abs(eps);
                eps.iter()
                    .map(|&e| {
                        if e.abs() <= tol {
                            half
                        } else if e < T::zero() {
                            T::one()
                        } else {
                            T::zero()
                        }
                    })
                    .collect()
            }
            Some(beta) => {
                let beta = T::lit(beta);
                eps.iter()
                    .map(|&e| {
                        let x = beta * e;
                        if x > T::zero() {
                            let w = (-x).exp();
                            w / (T::one() + w)
                        } else {
                            T::one() / (T::one() + x.exp())
                        }
                    })
                    .collect()
            }
        };
        Self {
            temperature,
            occupation,
        }
    }

    /// `<n_site> = sum_nu |<site|nu>|^2 f_nu`.
    pub fn density(&self, eig: &EigenSystem<T>, site: usize) -> T {
        (0..eig.dim())
            .map(|nu| {
                let x = eig.component(site, nu);
                x * x * self.occupation[nu]
            })
            .sum()
    }
}

/// `U(t)_{ij} = sum_nu e^{-i eps_nu t} <i|nu><nu|j>`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Propagator<T> {
    pub time: T,
    n: usize,
    matrix: Vec<Complex<T>>,
}

impl<T: Real> Propagator<T> {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.matrix[i * self.n + j]
    }

    /// `max |(U U^dagger - 1)_{ij}|`.
    pub fn unitarity_defect(&self) -> T {
        let n = self.n;
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let s: Complex<T> = (0..n).map(|k| self.get(i, k) * self.get(j, k).conj()).sum();
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((s - Complex::new(target, T::zero())).norm());
            }
        }
        worst
    }

    /// `max |U_{ij} - c R_{ij}|` with `R` the site reversal.
    pub fn distance_to_scaled_reversal(&self, c: Complex<T>) -> T {
        let n = self.n;
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let r = if i + j == n - 1 { c } else { Complex::new(T::zero(), T::zero()) };
                worst = worst.max((self.get(i, j) - r).norm());
            }
        }
        worst
    }

    /// `max |U_{ij} - c delta_{ij}|`.
    pub fn distance_to_scaled_identity(&self, c: Complex<T>) -> T {
        let n = self.n;
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let r = if i == j { c } else { Complex::new(T::zero(), T::zero()) };
                worst = worst.max((self.get(i, j) - r).norm());
            }
        }
        worst
    }
}

fn phases<T: Real>(eig: &EigenSystem<T>, t: T) -> Vec<Complex<T>> {
    eig.eigenvalues()
        .iter()
        .map(|&e| Complex::from_polar(T::one(), -e * t))
        .collect()
}

pub fn propagator<T: Real>(eig: &EigenSystem<T>, t: T) -> Propagator<T> {
    let n = eig.dim();
    let ph = phases(eig, t);
    let mut matrix = vec![Complex::new(T::zero(), T::zero()); n * n];
    for (nu, &p) in ph.iter().enumerate() {
        let v = eig.vector(nu);
        for i in 0..n {
            let pi = p * v[i];
            for j in 0..n {
                matrix[i * n + j] += pi * v[j];
            }
        }
    }
    Propagator { time: t, n, matrix }
}

/// `<N| e^{-iHt} |0>` with its phase.
pub fn transfer_amplitude<T: Real>(eig: &EigenSystem<T>, t: T) -> Complex<T> {
    let n = eig.dim();
    phases(eig, t)
        .iter()
        .enumerate()
        .map(|(nu, &p)| p * (eig.component(n - 1, nu) * eig.component(0, nu)))
        .sum()
}

/// End-to-end transfer probability `|U(t)_{N,0}|^2`.
pub fn transfer_fidelity<T: Real>(eig: &EigenSystem<T>, t: T) -> T {
    transfer_amplitude(eig, t).norm_sqr()
}

/// Hole and particle propagators between two sites.
///
/// `particle = <c_i^dag(t) c_j> = sum_nu x_i x_j f_nu e^{+i eps t}` and
/// `hole = <c_i(t) c_j^dag> = sum_nu x_i x_j (1 - f_nu) e^{-i eps t}`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PairFunctions<T> {
    pub particle: Complex<T>,
    pub hole: Complex<T>,
}

pub(crate) fn pair_functions<T: Real>(
    eig: &EigenSystem<T>,
    occ: &[T],
    i: usize,
    j: usize,
    t: T,
) -> PairFunctions<T> {
    let mut particle = Complex::new(T::zero(), T::zero());
    let mut hole = particle;
    for (nu, &e) in eig.eigenvalues().iter().enumerate() {
        let w = eig.component(i, nu) * eig.component(j, nu);
        let ph = Complex::from_polar(T::one(), e * t);
        particle += ph * (w * occ[nu]);
        hole += ph.conj() * (w * (T::one() - occ[nu]));
    }
    PairFunctions { particle, hole }
}

pub(crate) fn check_site(site: usize, n_sites: usize) -> Result<()> {
    if site >= n_sites {
        return Err(Error::SiteOutOfRange { site, n_sites });
    }
    Ok(())
}

/// `<S_j^z(t) S_k^z(0)>` on the given time grid.
pub fn zz_correlation<T: Real>(
    eig: &EigenSystem<T>,
    state: &ThermalState<T>,
    j: usize,
    k: usize,
    times: &[T],
) -> Result<CorrelationSeries<T>> {
    check_site(j, eig.dim())?;
    check_site(k, eig.dim())?;
    let nj = state.density(eig, j);
    let nk = state.density(eig, k);
    let half = T::lit(0.5);
    let offset = nj * nk - half * nj - half * nk + T::lit(0.25);
    let values = times
        .iter()
        .map(|&t| {
            let g = pair_functions(eig, &state.occupation, j, k, t);
            g.particle * g.hole + offset
        })
        .collect();
    CorrelationSeries::new("zz", vec![j, k], state.temperature, times.to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::SymmetricChain;
    use std::f64::consts::PI;

    fn eig(j: &[f64], h: &[f64]) -> EigenSystem<f64> {
        EigenSystem::of_chain(&SymmetricChain::new(j.to_vec(), h.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn identity_at_zero() {
        let e = eig(&[1.0, 2.0, 1.0], &[0.1, 0.0, 0.0, 0.1]);
        let u = propagator(&e, 0.0);
        assert!(u.distance_to_scaled_identity(Complex::new(1.0, 0.0)) < 1e-14);
        assert!(transfer_fidelity(&e, 0.0) < 1e-28);
    }

    #[test]
    fn two_site_full_transfer() {
        // e^{-i sigma_x t} at t = pi/2 is -i sigma_x.
        let e = eig(&[1.0], &[0.0, 0.0]);
        let u = propagator(&e, PI / 2.0);
        assert!((u.get(1, 0).norm() - 1.0).abs() < 1e-14);
        assert!((u.get(1, 0) - Complex::new(0.0, -1.0)).norm() < 1e-14);
        assert!(u.unitarity_defect() < 1e-14);
        assert!((transfer_fidelity(&e, PI / 2.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn occupations() {
        let e = eig(&[1.0, 1.0], &[0.0; 3]);
        let s = ThermalState::new(&e, Temperature::Zero);
        assert_eq!(s.occupation, vec![1.0, 0.5, 0.0]);
        let s = ThermalState::new(&e, Temperature::Infinite);
        assert_eq!(s.occupation, vec![0.5; 3]);
        let s = ThermalState::new(&e, Temperature::Finite(1.0));
        assert!(s.occupation.windows(2).all(|w| w[0] >= w[1]));
        let f0 = 1.0 / (1.0 + (-(2f64.sqrt())).exp());
        assert!((s.occupation[0] - f0).abs() < 1e-15);
        let cold = ThermalState::new(&e, Temperature::Finite(1e-6));
        assert!(cold.occupation.iter().all(|f| (0.0..=1.0).contains(f)));
    }

    #[test]
    fn temperature_parsing() {
        assert_eq!("0".parse::<Temperature>().unwrap(), Temperature::Zero);
        assert_eq!("inf".parse::<Temperature>().unwrap(), Temperature::Infinite);
        assert_eq!("1000".parse::<Temperature>().unwrap(), Temperature::Finite(1000.0));
        assert!("-1".parse::<Temperature>().is_err());
        assert_eq!(Temperature::Finite(2.0).beta(), Some(0.5));
        assert_eq!(Temperature::Infinite.beta(), Some(0.0));
    }

    #[test]
    fn zz_same_site_equal_time_is_quarter() {
        let e = eig(&[0.8], &[0.3, 0.3]);
        for temp in [Temperature::Zero, Temperature::Finite(0.7), Temperature::Infinite] {
            let s = ThermalState::new(&e, temp);
            for site in 0..2 {
                let c = zz_correlation(&e, &s, site, site, &[0.0]).unwrap();
                assert!((c.values[0] - Complex::new(0.25, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn site_out_of_range() {
        let e = eig(&[1.0], &[0.0, 0.0]);
        let s = ThermalState::new(&e, Temperature::Zero);
        assert!(matches!(
            zz_correlation(&e, &s, 0, 2, &[0.0]),
            Err(Error::SiteOutOfRange { site: 2, n_sites: 2 })
        ));
    }
}
