//! Brute-force exact diagonalization in the full `2^(N+1)` spin space.
//!
//! Nothing here uses the fermion mapping: the XX Hamiltonian is assembled
//! in the `S^z` product basis and diagonalized densely, and correlation
//! functions are evaluated from the Lehmann sum
//! `<A(t) B> = Z^-1 sum_{n,m} e^{-beta E_n} e^{i (E_n - E_m) t} A_nm B_mn`.
//! Basis convention: bit `i` of the state index is site `i`, set = spin up.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;

use crate::dynamics::{CorrelationSeries, Temperature};
use crate::error::{Error, Result};
use crate::jacobi::SymmetricChain;

/// Largest chain accepted (`2^12 = 4096` states).
pub const MAX_ED_SITES: usize = 12;

/// Relative tolerance defining the ground manifold at `T = 0`.
const GROUND_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinOp {
    X(usize),
    Z(usize),
}

impl SpinOp {
    fn site(self) -> usize {
        match self {
            Self::X(s) | Self::Z(s) => s,
        }
    }

    fn label(self) -> char {
        match self {
            Self::X(_) => 'x',
            Self::Z(_) => 'z',
        }
    }
}

/// Dense spin-space Hamiltonian of a chain.
#[derive(Clone, Debug)]
pub struct DenseSpinModel {
    n_sites: usize,
    hamiltonian: DMatrix<f64>,
}

/// `2 sum_i J_i (S^x_i S^x_{i-1} + S^y_i S^y_{i-1}) + sum_i h_i (S^z_i + 1/2)`.
pub fn build_spin_hamiltonian(chain: &SymmetricChain<f64>) -> Result<DenseSpinModel> {
    let n_sites = chain.n_sites();
    if n_sites > MAX_ED_SITES {
        return Err(Error::TooLarge {
            n_sites,
            max: MAX_ED_SITES,
        });
    }
    let dim = 1usize << n_sites;
    let mut h = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        let diag: f64 = chain
            .fields()
            .iter()
            .enumerate()
            .filter(|&(i, _)| s >> i & 1 == 1)
            .map(|(_, &hi)| hi)
            .sum();
        h[(s, s)] = diag;
        for (b, &j) in chain.couplings().iter().enumerate() {
            // bond between sites b and b + 1; S^+S^- + S^-S^+ swaps antiparallel pairs
            if (s >> b & 1) != (s >> (b + 1) & 1) {
                let t = s ^ (0b11 << b);
                h[(t, s)] += j;
            }
        }
    }
    Ok(DenseSpinModel {
        n_sites,
        hamiltonian: h,
    })
}

impl DenseSpinModel {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn hamiltonian(&self) -> &DMatrix<f64> {
        &self.hamiltonian
    }

    /// Dense matrix of a spin operator in the product basis.
    pub fn operator(&self, op: SpinOp) -> Result<DMatrix<f64>> {
        let site = op.site();
        if site >= self.n_sites {
            return Err(Error::SiteOutOfRange {
                site,
                n_sites: self.n_sites,
            });
        }
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for s in 0..dim {
            match op {
                SpinOp::X(i) => m[(s ^ (1 << i), s)] = 0.5,
                SpinOp::Z(i) => m[(s, s)] = if s >> i & 1 == 1 { 0.5 } else { -0.5 },
            }
        }
        Ok(m)
    }

    /// Total magnetization `sum_i S^z_i` of a basis state.
    pub fn magnetization(&self, state: usize) -> f64 {
        state.count_ones() as f64 - self.n_sites as f64 / 2.0
    }

    pub fn solve(&self) -> SpinSpectrum {
        let eig = SymmetricEigen::new(self.hamiltonian.clone());
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let energies = DVector::from_iterator(self.dim(), order.iter().map(|&k| eig.eigenvalues[k]));
        let vectors = eig.eigenvectors.select_columns(&order);
        SpinSpectrum {
            model: self.clone(),
            energies,
            vectors,
        }
    }
}

/// Eigen-decomposition of a [`DenseSpinModel`], energies ascending.
#[derive(Clone, Debug)]
pub struct SpinSpectrum {
    model: DenseSpinModel,
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl SpinSpectrum {
    pub fn energies(&self) -> &[f64] {
        self.energies.as_slice()
    }

    fn weights(&self, temperature: Temperature) -> Vec<f64> {
        let e0 = self.energies[0];
        let scale = self.energies.iter().fold(1.0f64, |m, e| m.max(e.abs()));
        let raw: Vec<f64> = match temperature.beta() {
            None => self
                .energies
                .iter()
                .map(|&e| if e - e0 <= GROUND_TOL * scale { 1.0 } else { 0.0 })
                .collect(),
            Some(beta) => self.energies.iter().map(|&e| (-beta * (e - e0)).exp()).collect(),
        };
        let z: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / z).collect()
    }

    /// Matrix elements `<n|op|m>` in the energy eigenbasis.
    fn in_eigenbasis(&self, op: SpinOp) -> Result<DMatrix<f64>> {
        let m = self.model.operator(op)?;
        Ok(self.vectors.transpose() * (m * &self.vectors))
    }

    /// `<A(t) B>` with `A(t) = e^{iHt} A e^{-iHt}`.
    pub fn correlation(
        &self,
        op_a: SpinOp,
        op_b: SpinOp,
        temperature: Temperature,
        times: &[f64],
    ) -> Result<CorrelationSeries<f64>> {
        let a = self.in_eigenbasis(op_a)?;
        let b = if op_a == op_b { a.clone() } else { self.in_eigenbasis(op_b)? };
        let w = self.weights(temperature);
        let dim = w.len();
        let occupied: Vec<usize> = (0..dim).filter(|&n| w[n] > 0.0).collect();
        let values = times
            .iter()
            .map(|&t| {
                let mut acc = Complex::new(0.0, 0.0);
                for &n in &occupied {
                    let en = self.energies[n];
                    let mut row = Complex::new(0.0, 0.0);
                    for m in 0..dim {
                        let amp = a[(n, m)] * b[(m, n)];
                        if amp != 0.0 {
                            row += Complex::from_polar(amp, (en - self.energies[m]) * t);
                        }
                    }
                    acc += row * w[n];
                }
                acc
            })
            .collect();
        let label = format!("{}{}", op_a.label(), op_b.label());
        CorrelationSeries::new(&label, vec![op_a.site(), op_b.site()], temperature, times.to_vec(), values)
    }
}

/// `<A(t) B>` for a freshly diagonalized model.
pub fn ed_correlation(
    model: &DenseSpinModel,
    op_a: SpinOp,
    op_b: SpinOp,
    temperature: Temperature,
    times: &[f64],
) -> Result<CorrelationSeries<f64>> {
    model.solve().correlation(op_a, op_b, temperature, times)
}

/// All `2^n` sums over subsets of `levels`, ascending.
pub fn subset_sums(levels: &[f64]) -> Vec<f64> {
    let mut sums = vec![0.0];
    for &e in levels {
        let extra: Vec<f64> = sums.iter().map(|s| s + e).collect();
        sums.extend(extra);
    }
    sums.sort_by(f64::total_cmp);
    sums
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::EigenSystem;

    #[test]
    fn two_site_matrix() {
        let chain = SymmetricChain::new(vec![1.0], vec![0.0, 0.0]).unwrap();
        let m = build_spin_hamiltonian(&chain).unwrap();
        let h = m.hamiltonian();
        // |01> (site 0 up) <-> |10> (site 1 up)
        assert_eq!(h[(1, 2)], 1.0);
        assert_eq!(h[(2, 1)], 1.0);
        let nonzero = h.iter().filter(|&&x| x != 0.0).count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn fields_enter_as_occupation() {
        let chain = SymmetricChain::new(vec![1.0], vec![0.7, 0.7]).unwrap();
        let h = build_spin_hamiltonian(&chain).unwrap().hamiltonian().clone();
        assert_eq!(h[(0, 0)], 0.0);
        assert_eq!(h[(3, 3)], 1.4);
        assert_eq!(h[(1, 1)], 0.7);
    }

    #[test]
    fn spectrum_is_subset_sums() {
        let chain = SymmetricChain::new(vec![0.6, 1.4, 0.6], vec![0.3, -0.5, -0.5, 0.3]).unwrap();
        let eps = EigenSystem::of_chain(&chain).unwrap();
        let want = subset_sums(eps.eigenvalues());
        let got = build_spin_hamiltonian(&chain).unwrap().solve();
        for (a, b) in got.energies().iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn conserves_magnetization() {
        let chain = SymmetricChain::new(vec![0.6, 1.4, 0.6], vec![0.3, -0.5, -0.5, 0.3]).unwrap();
        let m = build_spin_hamiltonian(&chain).unwrap();
        let h = m.hamiltonian();
        for r in 0..m.dim() {
            for c in 0..m.dim() {
                if h[(r, c)] != 0.0 {
                    assert_eq!(m.magnetization(r), m.magnetization(c));
                }
            }
        }
    }

    #[test]
    fn single_flip_sector_matches_one_particle_energies() {
        let chain = SymmetricChain::new(vec![0.8, 1.2, 1.2, 0.8], vec![0.1, 0.4, -0.3, 0.4, 0.1]).unwrap();
        let m = build_spin_hamiltonian(&chain).unwrap();
        let sector: Vec<usize> = (0..m.dim()).filter(|s| s.count_ones() == 1).collect();
        let block = DMatrix::from_fn(sector.len(), sector.len(), |r, c| m.hamiltonian()[(sector[r], sector[c])]);
        let mut vals: Vec<f64> = SymmetricEigen::new(block).eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        let eps = EigenSystem::of_chain(&chain).unwrap();
        for (a, b) in vals.iter().zip(eps.eigenvalues()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_time_sz_squared() {
        let chain = SymmetricChain::new(vec![1.0, 0.5, 1.0], vec![0.2, 0.0, 0.0, 0.2]).unwrap();
        let spec = build_spin_hamiltonian(&chain).unwrap().solve();
        for temp in [Temperature::Zero, Temperature::Finite(1.0), Temperature::Infinite] {
            let c = spec.correlation(SpinOp::Z(0), SpinOp::Z(0), temp, &[0.0]).unwrap();
            assert!((c.values[0].re - 0.25).abs() < 1e-12);
            assert!(c.values[0].im.abs() < 1e-12);
        }
    }

    #[test]
    fn size_guard() {
        let chain = SymmetricChain::homogeneous(13, 1.0).unwrap();
        assert!(matches!(
            build_spin_hamiltonian(&chain),
            Err(Error::TooLarge { n_sites: 13, .. })
        ));
    }

    #[test]
    fn subset_sums_small() {
        assert_eq!(subset_sums(&[1.0, 2.0]), vec![0.0, 1.0, 2.0, 3.0]);
    }
}
