//! Single-particle description of the open XX chain.
//!
//! After the Jordan-Wigner mapping the chain is a hopping problem whose
//! one-particle Hamiltonian is a Jacobi matrix: fields `h_0..h_N` on the
//! diagonal, couplings `J_1..J_N` on the off-diagonals. Everything else in
//! the crate works from the [`EigenSystem`] of that matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{max_abs, Real};

/// Relative tolerance for the mirror-symmetry validator.
const MIRROR_TOL: f64 = 1e-12;
/// Couplings below this fraction of the largest one trigger a warning.
const WEAK_COUPLING_WARN: f64 = 1e-8;
/// QL sweeps allowed per eigenvalue.
const MAX_QL_ITERATIONS: usize = 60;
/// Components below this fraction of the column maximum count as zero.
const NODE_ZERO_TOL: f64 = 1e-12;

/// Mirror-symmetric chain of `n_sites = N + 1` spins.
///
/// Invariants enforced on construction: `N` strictly positive couplings,
/// `N + 1` fields, `h_i = h_{N-i}` and `J_i = J_{N+1-i}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "ChainRecord<T>",
    into = "ChainRecord<T>",
    bound = "T: Real"
)]
pub struct SymmetricChain<T> {
    couplings: Vec<T>,
    fields: Vec<T>,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
struct ChainRecord<T> {
    n_sites: usize,
    couplings: Vec<T>,
    fields: Vec<T>,
}

impl<T: Real> TryFrom<ChainRecord<T>> for SymmetricChain<T> {
    type Error = Error;

    fn try_from(rec: ChainRecord<T>) -> Result<Self> {
        if rec.fields.len() != rec.n_sites {
            return Err(Error::LengthMismatch {
                what: "fields",
                expected: rec.n_sites,
                found: rec.fields.len(),
            });
        }
        SymmetricChain::new(rec.couplings, rec.fields)
    }
}

impl<T: Real> From<SymmetricChain<T>> for ChainRecord<T> {
    fn from(chain: SymmetricChain<T>) -> Self {
        ChainRecord {
            n_sites: chain.n_sites(),
            couplings: chain.couplings,
            fields: chain.fields,
        }
    }
}

impl<T: Real> SymmetricChain<T> {
    /// Validates and wraps couplings `J_1..J_N` and fields `h_0..h_N`.
    pub fn new(couplings: Vec<T>, fields: Vec<T>) -> Result<Self> {
        let n_sites = fields.len();
        if n_sites < 2 {
            return Err(Error::TooFewSites(n_sites));
        }
        if couplings.len() != n_sites - 1 {
            return Err(Error::LengthMismatch {
                what: "couplings",
                expected: n_sites - 1,
                found: couplings.len(),
            });
        }
        if couplings.iter().chain(&fields).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("chain parameters"));
        }
        check_positive(&couplings)?;

        let scale = max_abs(&couplings).max(max_abs(&fields));
        let tol = T::lit(MIRROR_TOL) * scale;
        for (what, xs) in [("coupling", &couplings), ("field", &fields)] {
            let n = xs.len();
            for i in 0..n / 2 {
                let dev = (xs[i] - xs[n - 1 - i]).abs();
                if dev > tol {
                    return Err(Error::NotMirrorSymmetric {
                        what,
                        index: i,
                        deviation: dev.to_f64_lossy(),
                    });
                }
            }
        }
        Ok(Self { couplings, fields })
    }

    /// Builds a chain from its left half; the right half is the mirror image.
    ///
    /// `half_couplings` holds `J_1..J_{ceil(N/2)}`, `half_fields` holds
    /// `h_0..h_{ceil((N+1)/2)-1}`.
    pub fn from_half(n_sites: usize, half_couplings: &[T], half_fields: &[T]) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::TooFewSites(n_sites));
        }
        let nc = n_sites - 1;
        for (what, have, need) in [
            ("half couplings", half_couplings.len(), nc.div_ceil(2)),
            ("half fields", half_fields.len(), n_sites.div_ceil(2)),
        ] {
            if have != need {
                return Err(Error::LengthMismatch {
                    what,
                    expected: need,
                    found: have,
                });
            }
        }
        let couplings = (0..nc)
            .map(|i| half_couplings[i.min(nc - 1 - i)])
            .collect();
        let fields = (0..n_sites)
            .map(|i| half_fields[i.min(n_sites - 1 - i)])
            .collect();
        Self::new(couplings, fields)
    }

    /// Uniform chain `J_i = coupling`, `h_i = 0`.
    pub fn homogeneous(n_sites: usize, coupling: T) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::TooFewSites(n_sites));
        }
        Self::new(vec![coupling; n_sites - 1], vec![T::zero(); n_sites])
    }

    pub fn n_sites(&self) -> usize {
        self.fields.len()
    }

    /// `J_1..J_N`; `couplings()[i]` links sites `i` and `i + 1`.
    pub fn couplings(&self) -> &[T] {
        &self.couplings
    }

    /// `h_0..h_N`.
    pub fn fields(&self) -> &[T] {
        &self.fields
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn check_positive<T: Real>(couplings: &[T]) -> Result<()> {
    if let Some((i, &j)) = couplings.iter().enumerate().find(|(_, &j)| j <= T::zero()) {
        return Err(Error::NonPositiveCoupling {
            index: i + 1,
            value: j.to_f64_lossy(),
        });
    }
    let jmax = max_abs(couplings);
    if let Some((i, _)) = couplings
        .iter()
        .enumerate()
        .find(|(_, &j)| j < T::lit(WEAK_COUPLING_WARN) * jmax)
    {
        log::warn!("coupling J_{} is below 1e-8 of the largest coupling", i + 1);
    }
    Ok(())
}

/// Real symmetric tridiagonal matrix with strictly positive off-diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalMatrix<T> {
    diagonal: Vec<T>,
    off_diagonal: Vec<T>,
}

impl<T: Real> TridiagonalMatrix<T> {
    pub fn new(diagonal: Vec<T>, off_diagonal: Vec<T>) -> Result<Self> {
        if diagonal.is_empty() {
            return Err(Error::TooFewSites(0));
        }
        if off_diagonal.len() + 1 != diagonal.len() {
            return Err(Error::LengthMismatch {
                what: "off-diagonal",
                expected: diagonal.len() - 1,
                found: off_diagonal.len(),
            });
        }
        if diagonal.iter().chain(&off_diagonal).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        check_positive(&off_diagonal)?;
        Ok(Self {
            diagonal,
            off_diagonal,
        })
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[T] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> &[T] {
        &self.off_diagonal
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        match i.abs_diff(j) {
            0 => self.diagonal[i],
            1 => self.off_diagonal[i.min(j)],
            _ => T::zero(),
        }
    }

    pub fn max_abs(&self) -> T {
        max_abs(&self.diagonal).max(max_abs(&self.off_diagonal))
    }

    /// `y = H x`.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut y = self.diagonal[i] * x[i];
                if i > 0 {
                    y += self.off_diagonal[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off_diagonal[i] * x[i + 1];
                }
                y
            })
            .collect()
    }
}

/// Diagonal `h`, off-diagonals `J`.
pub fn build_single_particle_matrix<T: Real>(chain: &SymmetricChain<T>) -> TridiagonalMatrix<T> {
    TridiagonalMatrix {
        diagonal: chain.fields.clone(),
        off_diagonal: chain.couplings.clone(),
    }
}

/// Ascending eigenvalues and orthonormal eigenvectors of the one-particle
/// matrix. Vectors are stored column-major so each eigenvector is a
/// contiguous slice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct EigenSystem<T> {
    eigenvalues: Vec<T>,
    vectors: Vec<T>,
}

impl<T: Real> EigenSystem<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// Eigenvector `nu` (site amplitudes `<i|nu>`).
    pub fn vector(&self, nu: usize) -> &[T] {
        let n = self.dim();
        &self.vectors[nu * n..(nu + 1) * n]
    }

    /// `<site|nu>`.
    pub fn component(&self, site: usize, nu: usize) -> T {
        self.vectors[nu * self.dim() + site]
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> T {
        let n = self.dim();
        let mut worst = T::zero();
        for a in 0..n {
            for b in a..n {
                let dot: T = self
                    .vector(a)
                    .iter()
                    .zip(self.vector(b))
                    .map(|(&x, &y)| x * y)
                    .sum();
                let target = if a == b { T::one() } else { T::zero() };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Diagonalizes the single-particle matrix of `chain` sector by sector
    /// (see [`parity_sectors`]), so every eigenvector has exact mirror parity
    /// even when even and odd levels are nearly degenerate.
    pub fn of_chain(chain: &SymmetricChain<T>) -> Result<Self> {
        let n = chain.n_sites();
        let (even, odd) = parity_sectors(chain)?;
        let inv_sqrt2 = T::one() / T::lit(2.0).sqrt();
        let mut pairs: Vec<(T, Vec<T>)> = Vec::with_capacity(n);
        for (sector, sign) in [(even, T::one()), (odd, -T::one())] {
            let eig = diagonalize(&sector)?;
            for k in 0..eig.dim() {
                let v = eig.vector(k);
                let mut x = vec![T::zero(); n];
                for (i, &vi) in v.iter().enumerate() {
                    if 2 * i + 1 == n {
                        x[i] = vi;
                    } else {
                        x[i] = vi * inv_sqrt2;
                        x[n - 1 - i] = sign * vi * inv_sqrt2;
                    }
                }
                pairs.push((eig.eigenvalues()[k], x));
            }
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite eigenvalues"));
        Ok(Self {
            eigenvalues: pairs.iter().map(|p| p.0).collect(),
            vectors: pairs.into_iter().flat_map(|p| p.1).collect(),
        })
    }
}

/// Even and odd blocks of a mirror-symmetric chain's matrix in the basis
/// `(|i> +- |N-i>) / sqrt(2)` (plus the centre site, which is even).
pub fn parity_sectors<T: Real>(chain: &SymmetricChain<T>) -> Result<(TridiagonalMatrix<T>, TridiagonalMatrix<T>)> {
    let n = chain.n_sites();
    let m = n / 2;
    let (j, h) = (chain.couplings(), chain.fields());
    let mut diag = h[..m].to_vec();
    let off = j[..m.saturating_sub(1)].to_vec();
    if n % 2 == 0 {
        let mut even_diag = diag.clone();
        even_diag[m - 1] += j[m - 1];
        diag[m - 1] -= j[m - 1];
        Ok((TridiagonalMatrix::new(even_diag, off.clone())?, TridiagonalMatrix::new(diag, off)?))
    } else {
        let odd = TridiagonalMatrix::new(diag.clone(), off.clone())?;
        let mut even_off = off;
        even_off.push(j[m - 1] * T::lit(2.0).sqrt());
        diag.push(h[m]);
        Ok((TridiagonalMatrix::new(diag, even_off)?, odd))
    }
}

/// Full eigendecomposition by implicit-shift QL on the tridiagonal form.
///
/// Eigenvalues come out ascending. Each eigenvector's first component
/// above `1e-12 * max|x|` is made positive.
pub fn diagonalize<T: Real>(matrix: &TridiagonalMatrix<T>) -> Result<EigenSystem<T>> {
    let n = matrix.dim();
    let mut d = matrix.diagonal.clone();
    let mut e = matrix.off_diagonal.clone();
    e.push(T::zero());
    let mut z = vec![T::zero(); n * n];
    for i in 0..n {
        z[i * n + i] = T::one();
    }
    tql(&mut d, &mut e, Some(&mut z))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("finite eigenvalues"));
    let eigenvalues = order.iter().map(|&k| d[k]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &k in &order {
        let col = &z[k * n..(k + 1) * n];
        let thresh = T::lit(NODE_ZERO_TOL) * max_abs(col);
        let lead = col.iter().find(|x| x.abs() > thresh).copied();
        let flip = lead.is_some_and(|x| x < T::zero());
        vectors.extend(col.iter().map(|&x| if flip { -x } else { x }));
    }
    Ok(EigenSystem {
        eigenvalues,
        vectors,
    })
}

/// Eigenvalues only, ascending. Same QL iteration without vector updates.
pub fn eigenvalues<T: Real>(matrix: &TridiagonalMatrix<T>) -> Result<Vec<T>> {
    let mut d = matrix.diagonal.clone();
    let mut e = matrix.off_diagonal.clone();
    e.push(T::zero());
    tql(&mut d, &mut e, None)?;
    d.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(d)
}

/// Implicit QL with Wilkinson-type shifts. `e[i]` couples `i` and `i + 1`
/// and `e[n-1]` is scratch. `z` (column-major) accumulates rotations.
fn tql<T: Real>(d: &mut [T], e: &mut [T], mut z: Option<&mut [T]>) -> Result<()> {
    let n = d.len();
    let two = T::lit(2.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(Error::NoConvergence {
                    index: l,
                    iterations: iter - 1,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    let (left, right) = z.split_at_mut((i + 1) * n);
                    let col_i = &mut left[i * n..];
                    let col_next = &mut right[..n];
                    for (zi, zn) in col_i.iter_mut().zip(col_next.iter_mut()) {
                        let f = *zn;
                        *zn = s * *zi + c * f;
                        *zi = c * *zi - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

/// Outcome of counting nodes of every eigenvector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignChangeReport {
    /// Sign changes of eigenvector `nu`.
    pub counts: Vec<usize>,
    /// `(nu, site)` pairs treated as zero and bridged over.
    pub skipped: Vec<(usize, usize)>,
}

impl SignChangeReport {
    /// Node theorem for positive couplings: counted in descending order
    /// of energy, the `j`th eigenvector has exactly `j` sign changes, so the
    /// ascending eigenvector `nu` must show `N - nu`.
    pub fn passes(&self) -> bool {
        let n = self.counts.len();
        self.counts
            .iter()
            .enumerate()
            .all(|(nu, &c)| c == n - 1 - nu)
    }

    /// Counts re-indexed by descending energy: entry `j` should equal `j`.
    pub fn descending_counts(&self) -> Vec<usize> {
        self.counts.iter().rev().copied().collect()
    }
}

/// Counts sign changes along each eigenvector (ascending energy order),
/// bridging over components with `|x_i| < 1e-12 * max|x|`.
pub fn check_sign_changes<T: Real>(eig: &EigenSystem<T>) -> SignChangeReport {
    let mut counts = Vec::with_capacity(eig.dim());
    let mut skipped = Vec::new();
    for nu in 0..eig.dim() {
        let col = eig.vector(nu);
        let thresh = T::lit(NODE_ZERO_TOL) * max_abs(col);
        let mut last_positive: Option<bool> = None;
        let mut count = 0;
        for (site, &x) in col.iter().enumerate() {
            if x.abs() < thresh {
                skipped.push((nu, site));
                continue;
            }
            let positive = x > T::zero();
            if last_positive.is_some_and(|p| p != positive) {
                count += 1;
            }
            last_positive = Some(positive);
        }
        counts.push(count);
    }
    SignChangeReport { counts, skipped }
}

/// Parity of ascending eigenvector `nu` of a mirror-symmetric chain:
/// `+1` (even) when `N - nu` is even, `-1` (odd) otherwise. The top state
/// is nodeless and therefore even.
pub fn parity_sign(n_sites: usize, nu: usize) -> i32 {
    if (n_sites - 1 - nu) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `max_{nu,i} |x_i - p_nu x_{N-i}|` with `p_nu` from [`parity_sign`].
pub fn check_parity<T: Real>(eig: &EigenSystem<T>) -> T {
    let n = eig.dim();
    let mut worst = T::zero();
    for nu in 0..n {
        let col = eig.vector(nu);
        let even = parity_sign(n, nu) > 0;
        for i in 0..n {
            let mirrored = col[n - 1 - i];
            let expected = if even { mirrored } else { -mirrored };
            worst = worst.max((col[i] - expected).abs());
        }
    }
    worst
}
