use mirrorchain::dynamics::{zz_correlation, Temperature, ThermalState};
use mirrorchain::ed_oracle::{build_spin_hamiltonian, subset_sums, SpinOp};
use mirrorchain::string_correlators::xx_cross_correlation;
use mirrorchain::Eigen;

mod common;

const TIMES: [f64; 5] = [0.0, 0.35, 1.0, 2.2, 5.0];

#[test]
fn free_fermions_match_spin_space() {
    let mut rng = common::rng(2024);
    for n in [2, 3, 4, 5, 7] {
        let chain = common::random_chain(&mut rng, n);
        let eig = Eigen::of_chain(&chain).unwrap();
        let ed = build_spin_hamiltonian(&chain).unwrap().solve();
        for temp in [Temperature::Zero, Temperature::Finite(1.0), Temperature::Infinite] {
            let state = ThermalState::new(&eig, temp);
            for (j, k) in [(0, 0), (0, n - 1), (n - 1, n / 2)] {
                let f = zz_correlation(&eig, &state, j, k, &TIMES).unwrap();
                let s = ed.correlation(SpinOp::Z(j), SpinOp::Z(k), temp, &TIMES).unwrap();
                for (a, b) in f.values.iter().zip(&s.values) {
                    assert!((a - b).norm() < 1e-10, "zz n={n} {temp:?} ({j},{k}): {a} vs {b}");
                }
                let f = xx_cross_correlation(&eig, &state, j, k, &TIMES).unwrap();
                let s = ed.correlation(SpinOp::X(j), SpinOp::X(k), temp, &TIMES).unwrap();
                for (a, b) in f.values.iter().zip(&s.values) {
                    assert!((a - b).norm() < 1e-10, "xx n={n} {temp:?} ({j},{k}): {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn zero_mode_ground_manifold() {
    // odd chain without fields: one exact zero mode, twofold ground state
    let chain = mirrorchain::Chain::new(vec![1.0, 0.6, 0.6, 1.0], vec![0.0; 5]).unwrap();
    let eig = Eigen::of_chain(&chain).unwrap();
    let ed = build_spin_hamiltonian(&chain).unwrap().solve();
    let state = ThermalState::new(&eig, Temperature::Zero);
    for (j, k) in [(0, 4), (2, 2), (1, 3)] {
        let f = xx_cross_correlation(&eig, &state, j, k, &TIMES).unwrap();
        let s = ed.correlation(SpinOp::X(j), SpinOp::X(k), Temperature::Zero, &TIMES).unwrap();
        for (a, b) in f.values.iter().zip(&s.values) {
            assert!((a - b).norm() < 1e-10, "({j},{k}): {a} vs {b}");
        }
    }
}

#[test]
fn many_body_levels_are_subset_sums() {
    let mut rng = common::rng(5);
    for n in 2..=8 {
        let chain = common::random_chain(&mut rng, n);
        let eps = Eigen::of_chain(&chain).unwrap();
        let want = subset_sums(eps.eigenvalues());
        let got = build_spin_hamiltonian(&chain).unwrap().solve();
        for (a, b) in got.energies().iter().zip(&want) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
