//! Chain reconstruction from a prescribed one-particle spectrum.
//!
//! A nondegenerate spectrum determines exactly one mirror-symmetric Jacobi
//! matrix with positive couplings. For such a matrix the squared first
//! eigenvector components are fixed by the eigenvalues alone,
//! `q_nu^2 ∝ 1 / prod_{mu != nu} |eps_nu - eps_mu|`, so the direct route
//! runs Lanczos on `diag(eps)` from that start vector. [`annealing`]
//! provides an independent stochastic route.

mod annealing;

pub use annealing::{reconstruct_annealing, AnnealSchedule};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi::{eigenvalues, SymmetricChain, TridiagonalMatrix};
use crate::mirror_design::SpectrumSpec;
use crate::scalar::{max_abs, Real};

/// Minimum relative gap between target levels.
const DEGENERACY_TOL: f64 = 1e-10;
/// Largest relative asymmetry tolerated before averaging mirror pairs.
const ASYMMETRY_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Annealing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ReconstructionReport<T> {
    pub chain: SymmetricChain<T>,
    /// `max_nu |eps_target - eps_achieved|`.
    pub spectral_residual: T,
    pub method: Method,
    pub iterations: usize,
    pub converged: bool,
}

/// Extremes of the couplings and `(max - min) / (max + min)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CouplingVariation<T> {
    pub min: T,
    pub max: T,
    pub relative: T,
}

pub fn coupling_variation<T: Real>(chain: &SymmetricChain<T>) -> CouplingVariation<T> {
    let j = chain.couplings();
    let min = j.iter().copied().fold(T::infinity(), T::min);
    let max = j.iter().copied().fold(T::neg_infinity(), T::max);
    CouplingVariation {
        min,
        max,
        relative: (max - min) / (max + min),
    }
}

fn check_targets<T: Real>(energies: &[T]) -> Result<()> {
    let n = energies.len();
    if n < 2 {
        return Err(Error::TooFewSites(n));
    }
    if energies.iter().any(|e| !e.is_finite()) {
        return Err(Error::NonFinite("energies"));
    }
    if let Some(i) = energies.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::NotAscending { index: i + 1 });
    }
    let spread = energies[n - 1] - energies[0];
    for (i, w) in energies.windows(2).enumerate() {
        let gap = w[1] - w[0];
        if gap < T::lit(DEGENERACY_TOL) * spread {
            return Err(Error::NearDegenerate {
                index: i,
                gap: gap.to_f64_lossy(),
            });
        }
    }
    Ok(())
}

/// Normalized squared first components of the eigenvectors of the
/// mirror-symmetric Jacobi matrix with spectrum `energies`.
pub fn spectral_weights<T: Real>(energies: &[T]) -> Result<Vec<T>> {
    check_targets(energies)?;
    let logs: Vec<T> = energies
        .iter()
        .enumerate()
        .map(|(nu, &e)| {
            -energies
                .iter()
                .enumerate()
                .filter(|&(mu, _)| mu != nu)
                .map(|(_, &f)| (e - f).abs().ln())
                .sum::<T>()
        })
        .collect();
    let top = logs.iter().copied().fold(T::neg_infinity(), T::max);
    let raw: Vec<T> = logs.iter().map(|&l| (l - top).exp()).collect();
    let total: T = raw.iter().copied().sum();
    Ok(raw.into_iter().map(|w| w / total).collect())
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Lanczos on `diag(energies)` from `sqrt(weights)` with full
/// reorthogonalization (two Gram-Schmidt passes per step).
/// Returns `(diagonal, off_diagonal)`.
fn lanczos_tridiagonal<T: Real>(energies: &[T], weights: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    let n = energies.len();
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(n);
    basis.push(weights.iter().map(|w| w.sqrt()).collect());
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n - 1);
    for k in 0..n {
        let v = &basis[k];
        let mut z: Vec<T> = energies.iter().zip(v).map(|(&e, &x)| e * x).collect();
        let a = dot(v, &z);
        alpha.push(a);
        if k + 1 == n {
            break;
        }
        for _ in 0..2 {
            for u in &basis {
                let c = dot(u, &z);
                z.iter_mut().zip(u).for_each(|(zi, &ui)| *zi -= c * ui);
            }
        }
        let b = dot(&z, &z).sqrt();
        if !(b > T::zero()) {
            return Err(Error::Internal(format!(
                "Lanczos breakdown at step {k} (non-positive coupling {b})"
            )));
        }
        beta.push(b);
        basis.push(z.into_iter().map(|x| x / b).collect());
    }
    Ok((alpha, beta))
}

fn symmetrize<T: Real>(xs: &mut [T], scale: T) -> T {
    let n = xs.len();
    let mut worst = T::zero();
    for i in 0..n / 2 {
        let (a, b) = (xs[i], xs[n - 1 - i]);
        worst = worst.max((a - b).abs() / scale);
        let m = (a + b) / T::lit(2.0);
        xs[i] = m;
        xs[n - 1 - i] = m;
    }
    worst
}

fn spectral_residual<T: Real>(chain: &SymmetricChain<T>, target: &[T]) -> Result<T> {
    let matrix = TridiagonalMatrix::new(chain.fields().to_vec(), chain.couplings().to_vec())?;
    let achieved = eigenvalues(&matrix)?;
    Ok(achieved
        .iter()
        .zip(target)
        .map(|(&a, &b)| (a - b).abs())
        .fold(T::zero(), T::max))
}

/// Unique mirror-symmetric chain with spectrum `energies`, via spectral
/// weights and Lanczos.
pub fn reconstruct_from_energies<T: Real>(energies: &[T]) -> Result<ReconstructionReport<T>> {
    let weights = spectral_weights(energies)?;
    let (mut fields, mut couplings) = lanczos_tridiagonal(energies, &weights)?;
    let scale = max_abs(&couplings).max(max_abs(&fields));
    let asym = symmetrize(&mut couplings, scale).max(symmetrize(&mut fields, scale));
    if asym > T::lit(ASYMMETRY_TOL) {
        return Err(Error::AsymmetricReconstruction {
            asymmetry: asym.to_f64_lossy(),
        });
    }
    let chain = SymmetricChain::new(couplings, fields)?;
    let spectral_residual = spectral_residual(&chain, energies)?;
    Ok(ReconstructionReport {
        chain,
        spectral_residual,
        method: Method::Direct,
        iterations: energies.len(),
        converged: true,
    })
}

pub fn reconstruct_direct<T: Real>(spectrum: &SpectrumSpec<T>) -> Result<ReconstructionReport<T>> {
    reconstruct_from_energies(&spectrum.energies)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::EigenSystem;
    use crate::mirror_design::mirror31_spectrum;

    #[test]
    fn two_level() {
        let rep = reconstruct_from_energies::<f64>(&[-1.0, 1.0]).unwrap();
        assert!((rep.chain.couplings()[0] - 1.0).abs() < 1e-15);
        assert!(rep.chain.fields().iter().all(|h| h.abs() < 1e-15));
        assert_eq!(rep.method, Method::Direct);
    }

    #[test]
    fn three_level() {
        let s = 2f64.sqrt();
        let rep = reconstruct_from_energies::<f64>(&[-s, 0.0, s]).unwrap();
        for j in rep.chain.couplings() {
            assert!((j - 1.0).abs() < 1e-14);
        }
        for h in rep.chain.fields() {
            assert!(h.abs() < 1e-14);
        }
        assert!(rep.spectral_residual < 1e-14);
    }

    #[test]
    fn weights_match_forward_first_components() {
        let chain = SymmetricChain::<f64>::new(
            vec![0.7, 1.3, 0.9, 1.3, 0.7],
            vec![0.2, -0.4, 0.1, 0.1, -0.4, 0.2],
        )
        .unwrap();
        let eig = EigenSystem::of_chain(&chain).unwrap();
        let w = spectral_weights(eig.eigenvalues()).unwrap();
        for nu in 0..6 {
            let x0 = eig.component(0, nu);
            assert!((x0 * x0 - w[nu]).abs() < 1e-12);
        }
    }

    #[test]
    fn mirror31_couplings_range() {
        let rep = reconstruct_direct(&mirror31_spectrum()).unwrap();
        let v = coupling_variation(&rep.chain);
        assert!(v.min > 101.4 && v.min < 101.5, "{v:?}");
        assert!(v.max > 108.4 && v.max < 108.6, "{v:?}");
        assert!((v.relative - 0.033).abs() < 0.001);
        assert!(rep.chain.fields().iter().all(|h| h.abs() < 1e-8 * v.max));
        assert!(rep.spectral_residual < 1e-9);
    }

    #[test]
    fn degenerate_targets_rejected() {
        assert!(matches!(
            reconstruct_from_energies::<f64>(&[0.0, 1e-13, 1.0]),
            Err(Error::NearDegenerate { index: 0, .. })
        ));
        assert!(matches!(
            reconstruct_from_energies::<f64>(&[0.0, 1.0, 0.5]),
            Err(Error::NotAscending { .. })
        ));
    }

    #[test]
    fn variation_of_uniform_chain_is_zero() {
        let c = SymmetricChain::homogeneous(7, 2.5).unwrap();
        let v = coupling_variation(&c);
        assert_eq!(v.relative, 0.0);
        assert_eq!((v.min, v.max), (2.5, 2.5));
    }
}
