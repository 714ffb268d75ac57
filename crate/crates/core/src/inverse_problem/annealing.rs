use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{check_targets, Method, ReconstructionReport};
use crate::error::{Error, Result};
use crate::jacobi::{eigenvalues, EigenSystem, SymmetricChain, TridiagonalMatrix};
use crate::mirror_design::SpectrumSpec;
use crate::scalar::Real;

/// Proposal width in units of `sqrt(temperature)`.
const STEP_PER_SQRT_T: f64 = 0.1;
/// Iteration cap for the final least-squares refinement.
const POLISH_ITERATIONS: usize = 200;

/// Geometric cooling schedule. `t0` is in units of energy squared, like the
/// cost it is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub t0: f64,
    pub cooling: f64,
    pub sweeps: usize,
    pub seed: u64,
}

impl AnnealSchedule {
    /// `t0 = spread^2`, cooling `0.995` per sweep, 5000 sweeps.
    pub fn for_energies<T: Real>(energies: &[T], seed: u64) -> Self {
        let spread = match (energies.first(), energies.last()) {
            (Some(&a), Some(&b)) => (b - a).to_f64_lossy(),
            _ => 1.0,
        };
        Self {
            t0: spread * spread,
            cooling: 0.995,
            sweeps: 5000,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.t0 > 0.0 && self.t0.is_finite()) {
            return Err(Error::InvalidParameter(format!("t0 must be positive, got {}", self.t0)));
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "cooling factor must lie in (0, 1), got {}",
                self.cooling
            )));
        }
        if self.sweeps == 0 {
            return Err(Error::InvalidParameter("sweeps must be positive".into()));
        }
        Ok(())
    }
}

/// Half-chain parameterization: `ceil(N/2)` couplings then `ceil((N+1)/2)` fields.
struct Params {
    n_sites: usize,
    n_couplings: usize,
    values: Vec<f64>,
}

impl Params {
    fn chain(&self) -> Result<SymmetricChain<f64>> {
        let (j, h) = self.values.split_at(self.n_couplings);
        SymmetricChain::from_half(self.n_sites, j, h)
    }

    fn spectrum(&self) -> Option<Vec<f64>> {
        let chain = self.chain().ok()?;
        let m = TridiagonalMatrix::new(chain.fields().to_vec(), chain.couplings().to_vec()).ok()?;
        eigenvalues(&m).ok()
    }
}

fn cost(spectrum: &[f64], target: &[f64]) -> f64 {
    spectrum.iter().zip(target).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// `d eps_nu / d p_k` for the half-chain parameters, from first-order
/// perturbation theory on the eigenvectors.
fn jacobian(params: &Params, eig: &EigenSystem<f64>) -> DMatrix<f64> {
    let n = params.n_sites;
    let n_params = params.values.len();
    DMatrix::from_fn(n, n_params, |nu, k| {
        let x = eig.vector(nu);
        if k < params.n_couplings {
            let bond = |b: usize| 2.0 * x[b] * x[b + 1];
            let mirror = n - 2 - k;
            if mirror == k { bond(k) } else { bond(k) + bond(mirror) }
        } else {
            let i = k - params.n_couplings;
            let mirror = n - 1 - i;
            if mirror == i { x[i] * x[i] } else { x[i] * x[i] + x[mirror] * x[mirror] }
        }
    })
}

/// Levenberg-Marquardt on the squared spectral error, started from the
/// annealed state. Returns the refined cost.
fn polish(params: &mut Params, target: &[f64], mut current_cost: f64) -> f64 {
    let mut lambda = 1e-3;
    for _ in 0..POLISH_ITERATIONS {
        let Ok(chain) = params.chain() else { break };
        let Ok(eig) = EigenSystem::of_chain(&chain) else { break };
        let jac = jacobian(params, &eig);
        let r = DVector::from_iterator(
            target.len(),
            target.iter().zip(eig.eigenvalues()).map(|(t, e)| t - e),
        );
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * r;
        let mut improved = false;
        while lambda < 1e12 {
            let mut m = jtj.clone();
            for d in 0..m.nrows() {
                m[(d, d)] += lambda * jtj[(d, d)].max(1e-300);
            }
            let Some(step) = m.lu().solve(&g) else {
                lambda *= 10.0;
                continue;
            };
            let old = params.values.clone();
            params.values.iter_mut().zip(step.iter()).for_each(|(p, s)| *p += s);
            let trial = params.values[..params.n_couplings].iter().all(|&j| j > 0.0);
            match params.spectrum().filter(|_| trial).map(|s| cost(&s, target)) {
                Some(c) if c < current_cost => {
                    let gain = current_cost - c;
                    current_cost = c;
                    lambda = (lambda * 0.3).max(1e-12);
                    improved = gain > 1e-30;
                    break;
                }
                _ => {
                    params.values = old;
                    lambda *= 10.0;
                }
            }
        }
        if !improved {
            break;
        }
    }
    current_cost
}

/// Fits a mirror-symmetric chain to `spectrum` by simulated annealing on
/// the squared spectral error, then refines the best state seen with
/// Levenberg-Marquardt. Deterministic for a given schedule seed.
///
/// `converged` is set when the final spectral residual is below `tol`.
pub fn reconstruct_annealing<T: Real>(
    spectrum: &SpectrumSpec<T>,
    schedule: &AnnealSchedule,
    tol: T,
) -> Result<ReconstructionReport<T>> {
    check_targets(&spectrum.energies)?;
    schedule.validate()?;
    let target: Vec<f64> = spectrum.energies.iter().map(|e| e.to_f64_lossy()).collect();
    let n_sites = target.len();
    let n_couplings = (n_sites - 1).div_ceil(2);
    let n_fields = n_sites.div_ceil(2);
    let spread = target[n_sites - 1] - target[0];
    let mean = target.iter().sum::<f64>() / n_sites as f64;
    let j0 = spread / (4.0 * (std::f64::consts::PI / (n_sites + 1) as f64).cos());

    let mut values = vec![j0; n_couplings];
    values.extend(std::iter::repeat_n(mean, n_fields));
    let mut current = Params {
        n_sites,
        n_couplings,
        values,
    };
    let mut current_cost = cost(&current.spectrum().expect("homogeneous start"), &target);
    let mut best = current.values.clone();
    let mut best_cost = current_cost;

    let mut rng = ChaCha8Rng::seed_from_u64(schedule.seed);
    let n_params = current.values.len();
    let mut temperature = schedule.t0;
    for _ in 0..schedule.sweeps {
        let width = STEP_PER_SQRT_T * temperature.sqrt();
        for _ in 0..n_params {
            let k = rng.random_range(0..n_params);
            let z: f64 = StandardNormal.sample(&mut rng);
            let old = current.values[k];
            let proposed = old + width * z;
            if k < n_couplings && proposed <= 0.0 {
                continue;
            }
            current.values[k] = proposed;
            let Some(spec) = current.spectrum() else {
                current.values[k] = old;
                continue;
            };
            let new_cost = cost(&spec, &target);
            let delta = new_cost - current_cost;
            let u: f64 = rng.random();
            if delta <= 0.0 || u < (-delta / temperature).exp() {
                current_cost = new_cost;
                if new_cost < best_cost {
                    best_cost = new_cost;
                    best.clone_from(&current.values);
                }
            } else {
                current.values[k] = old;
            }
        }
        temperature *= schedule.cooling;
    }

    let mut best = Params {
        n_sites,
        n_couplings,
        values: best,
    };
    let polished = polish(&mut best, &target, best_cost);
    log::debug!("annealing cost {best_cost:e}, after refinement {polished:e}");
    let achieved = best.spectrum().expect("accepted states are valid");
    let residual = achieved
        .iter()
        .zip(&target)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let chain64 = best.chain()?;
    let chain = SymmetricChain::new(
        chain64.couplings().iter().map(|&x| T::lit(x)).collect(),
        chain64.fields().iter().map(|&x| T::lit(x)).collect(),
    )?;
    let spectral_residual = T::lit(residual);
    Ok(ReconstructionReport {
        chain,
        spectral_residual,
        method: Method::Annealing,
        iterations: schedule.sweeps,
        converged: spectral_residual < tol,
    })
}
