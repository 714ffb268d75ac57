//! `x`-`x` spin correlations through Pfaffians of Majorana contractions.
//!
//! With `A_l = c_l^dag + c_l` and `B_l = c_l^dag - c_l` one has
//! `A_l B_l = 1 - 2 n_l`, so the Jordan-Wigner string turns
//! `S_k^x` into `(1/2) A_0 B_0 ... A_{k-1} B_{k-1} A_k`. A product of such
//! strings in a Gaussian state is the Pfaffian of the matrix of pairwise
//! contractions (Wick's theorem).

use num_complex::Complex;

use crate::dynamics::{check_site, pair_functions, CorrelationSeries, ThermalState};
use crate::error::{Error, Result};
use crate::jacobi::EigenSystem;
use crate::scalar::Real;

/// Relative antisymmetry tolerance accepted by [`pfaffian`].
const ANTISYM_TOL: f64 = 1e-12;
/// Relative tolerance of the `Pf^2 = det` self-check.
const PF_DET_TOL: f64 = 1e-8;

type C<T> = Complex<T>;

fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

/// Row-major antisymmetric matrix of `dim x dim` complex entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrix<T> {
    dim: usize,
    data: Vec<C<T>>,
}

impl<T: Real> SkewMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![czero(); dim * dim],
        }
    }

    /// Wraps row-major data; antisymmetry is checked by [`pfaffian`].
    pub fn from_row_major(dim: usize, data: Vec<C<T>>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::LengthMismatch {
                what: "matrix data",
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.data[i * self.dim + j]
    }

    /// Sets `(i, j)` to `v` and `(j, i)` to `-v`.
    pub fn set_pair(&mut self, i: usize, j: usize, v: C<T>) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = -v;
    }

    /// Same matrix with rows/columns `a` and `b` exchanged.
    pub fn swapped(&self, a: usize, b: usize) -> Self {
        let mut out = self.clone();
        swap_rows_cols(&mut out.data, self.dim, a, b);
        out
    }

    fn max_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    fn antisymmetry_defect(&self) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) + self.get(j, i)).norm());
            }
        }
        worst
    }
}

fn swap_rows_cols<T: Real>(a: &mut [C<T>], n: usize, p: usize, q: usize) {
    if p == q {
        return;
    }
    for k in 0..n {
        a.swap(p * n + k, q * n + k);
    }
    for k in 0..n {
        a.swap(k * n + p, k * n + q);
    }
}

/// Pfaffian by skew-symmetric Parlett-Reid elimination with partial
/// pivoting. No self-check.
pub fn pfaffian_unchecked<T: Real>(m: &SkewMatrix<T>) -> Result<C<T>> {
    let n = m.dim;
    if n % 2 == 1 {
        return Err(Error::OddDimension(n));
    }
    let mut a = m.data.clone();
    let mut pf = Complex::new(T::one(), T::zero());
    let mut k = 0;
    while k + 1 < n {
        let (kp, _) = (k + 1..n)
            .map(|i| (i, a[i * n + k].norm()))
            .fold((k + 1, T::neg_infinity()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if kp != k + 1 {
            swap_rows_cols(&mut a, n, k + 1, kp);
            pf = -pf;
        }
        let pivot = a[k * n + k + 1];
        if pivot == czero() {
            return Ok(czero());
        }
        pf *= pivot;
        if k + 2 < n {
            let tau: Vec<C<T>> = (k + 2..n).map(|j| a[k * n + j] / pivot).collect();
            let col: Vec<C<T>> = (k + 2..n).map(|i| a[i * n + k + 1]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    a[i * n + j] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
        k += 2;
    }
    Ok(pf)
}

/// Determinant by LU with partial pivoting. Used as the independent check
/// on Pfaffians.
pub fn determinant<T: Real>(dim: usize, data: &[C<T>]) -> C<T> {
    let n = dim;
    let mut a = data.to_vec();
    let mut det = Complex::new(T::one(), T::zero());
    for k in 0..n {
        let (p, _) = (k..n)
            .map(|i| (i, a[i * n + k].norm()))
            .fold((k, T::neg_infinity()), |best, cur| if cur.1 > best.1 { cur } else { best });
        let pivot = a[p * n + k];
        if pivot == czero() {
            return czero();
        }
        if p != k {
            for j in 0..n {
                a.swap(p * n + j, k * n + j);
            }
            det = -det;
        }
        det *= pivot;
        for i in k + 1..n {
            let f = a[i * n + k] / pivot;
            if f == czero() {
                continue;
            }
            for j in k + 1..n {
                let akj = a[k * n + j];
                a[i * n + j] -= f * akj;
            }
        }
    }
    det
}

/// Pfaffian with input validation and the `Pf^2 = det` self-check.
///
/// The check tolerance is relative to `max(|det|, eps * prod_i ||row_i||)`,
/// the second term being the roundoff floor of the determinant itself.
pub fn pfaffian<T: Real>(m: &SkewMatrix<T>) -> Result<C<T>> {
    if m.dim % 2 == 1 {
        return Err(Error::OddDimension(m.dim));
    }
    let scale = m.max_norm().max(T::min_positive_value());
    let defect = m.antisymmetry_defect();
    if defect > T::lit(ANTISYM_TOL) * scale {
        return Err(Error::NotAntisymmetric {
            deviation: defect.to_f64_lossy(),
        });
    }
    let pf = pfaffian_unchecked(m)?;
    let det = determinant(m.dim, &m.data);
    let hadamard = (0..m.dim)
        .map(|i| {
            (0..m.dim)
                .map(|j| m.get(i, j).norm_sqr())
                .sum::<T>()
                .sqrt()
        })
        .fold(T::one(), |p, r| p * r);
    let floor = T::epsilon() * T::from_usize_lossy(m.dim) * hadamard;
    let mismatch = (pf * pf - det).norm();
    if mismatch > T::lit(PF_DET_TOL) * det.norm().max(floor) {
        return Err(Error::PfaffianCheck {
            mismatch: mismatch.to_f64_lossy(),
            det: det.norm().to_f64_lossy(),
        });
    }
    Ok(pf)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Majorana {
    /// `c^dag + c`
    A,
    /// `c^dag - c`
    B,
}

/// Majorana operator at a site, evaluated at one of the time slots.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MajoranaOp<T> {
    pub kind: Majorana,
    pub site: usize,
    pub time: T,
}

/// `A_0 B_0 ... A_{k-1} B_{k-1} A_k` at time `t`: the fermionic form of
/// `2 S_k^x(t)`.
pub fn string_operators<T: Real>(site: usize, time: T) -> Vec<MajoranaOp<T>> {
    let mut ops = Vec::with_capacity(2 * site + 1);
    for l in 0..site {
        ops.push(MajoranaOp { kind: Majorana::A, site: l, time });
        ops.push(MajoranaOp { kind: Majorana::B, site: l, time });
    }
    ops.push(MajoranaOp { kind: Majorana::A, site, time });
    ops
}

/// `<O_a O_b>` in the thermal state.
fn contraction<T: Real>(
    eig: &EigenSystem<T>,
    occ: &[T],
    a: &MajoranaOp<T>,
    b: &MajoranaOp<T>,
) -> C<T> {
    let g = pair_functions(eig, occ, a.site, b.site, a.time - b.time);
    match (a.kind, b.kind) {
        (Majorana::A, Majorana::A) => g.particle + g.hole,
        (Majorana::A, Majorana::B) => g.hole - g.particle,
        (Majorana::B, Majorana::A) => g.particle - g.hole,
        (Majorana::B, Majorana::B) => -(g.particle + g.hole),
    }
}

/// Antisymmetric matrix `M_ab = <O_a O_b>` (`a < b`) of an ordered
/// Majorana product; its Pfaffian is `<O_1 ... O_2M>`.
#[derive(Clone, Debug, PartialEq)]
pub struct MajoranaContraction<T> {
    pub antisym: SkewMatrix<T>,
}

impl<T: Real> MajoranaContraction<T> {
    pub fn build(eig: &EigenSystem<T>, state: &ThermalState<T>, ops: &[MajoranaOp<T>]) -> Result<Self> {
        for op in ops {
            check_site(op.site, eig.dim())?;
        }
        let n = ops.len();
        let mut antisym = SkewMatrix::zeros(n);
        for a in 0..n {
            for b in a + 1..n {
                antisym.set_pair(a, b, contraction(eig, &state.occupation, &ops[a], &ops[b]));
            }
        }
        Ok(Self { antisym })
    }

    /// `<O_1 ... O_2M>`.
    pub fn expectation(&self) -> Result<C<T>> {
        pfaffian(&self.antisym)
    }
}

/// `<S_j^x(t) S_k^x(0)>` on the given time grid.
///
/// The equal-time blocks do not depend on `t` and are built once; only the
/// cross block is refreshed per time point.
pub fn xx_cross_correlation<T: Real>(
    eig: &EigenSystem<T>,
    state: &ThermalState<T>,
    j: usize,
    k: usize,
    times: &[T],
) -> Result<CorrelationSeries<T>> {
    check_site(j, eig.dim())?;
    check_site(k, eig.dim())?;
    let left = string_operators(j, T::zero());
    let right = string_operators(k, T::zero());
    let nl = left.len();
    let dim = nl + right.len();
    let occ = &state.occupation;

    let mut base = SkewMatrix::zeros(dim);
    for (block, offset) in [(&left, 0), (&right, nl)] {
        for a in 0..block.len() {
            for b in a + 1..block.len() {
                base.set_pair(offset + a, offset + b, contraction(eig, occ, &block[a], &block[b]));
            }
        }
    }

    let quarter = T::lit(0.25);
    let mut values = Vec::with_capacity(times.len());
    for &t in times {
        let mut m = base.clone();
        for (a, op_a) in left.iter().enumerate() {
            let op_t = MajoranaOp { time: t, ..*op_a };
            for (b, op_b) in right.iter().enumerate() {
                m.set_pair(a, nl + b, contraction(eig, occ, &op_t, op_b));
            }
        }
        values.push(pfaffian(&m)? * quarter);
    }
    CorrelationSeries::new("xx", vec![j, k], state.temperature, times.to_vec(), values)
}

/// `<S_k^x(t) S_k^x(0)>`.
pub fn xx_correlation<T: Real>(
    eig: &EigenSystem<T>,
    state: &ThermalState<T>,
    site: usize,
    times: &[T],
) -> Result<CorrelationSeries<T>> {
    xx_cross_correlation(eig, state, site, site, times)
}
