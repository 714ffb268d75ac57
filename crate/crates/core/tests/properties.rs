use mirrorchain::inverse_problem::{reconstruct_from_energies, spectral_weights};
use mirrorchain::jacobi::{build_single_particle_matrix, check_parity, check_sign_changes, EigenSystem};
use mirrorchain::mirror_design::{certify_spectrum, gap_residuals, SpectrumSpec};
use mirrorchain::Chain;
use proptest::prelude::*;

mod common;

// Stronger disorder binds states at both ends whose mirror pairs split below
// machine precision; eigenvectors are then not numerically defined.
fn mirror_chain(max_sites: usize) -> impl Strategy<Value = Chain> {
    (2..=max_sites).prop_flat_map(|n| {
        (
            prop::collection::vec(0.85f64..1.15, (n - 1).div_ceil(2)),
            prop::collection::vec(-0.25f64..0.25, n.div_ceil(2)),
        )
            .prop_map(move |(j, h)| Chain::from_half(n, &j, &h).unwrap())
    })
}

fn zero_field_chain(max_sites: usize) -> impl Strategy<Value = Chain> {
    (2..=max_sites).prop_flat_map(|n| {
        prop::collection::vec(0.85f64..1.15, (n - 1).div_ceil(2))
            .prop_map(move |j| Chain::from_half(n, &j, &vec![0.0; n.div_ceil(2)]).unwrap())
    })
}

/// Integer level offsets with odd gaps, starting at `e0`.
fn odd_gap_spectrum() -> impl Strategy<Value = (f64, Vec<i64>)> {
    (-3.0f64..3.0, prop::collection::vec(0i64..4, 1..20)).prop_map(|(e0, steps)| {
        let mut levels = vec![0i64];
        for s in steps {
            let last = *levels.last().unwrap();
            levels.push(last + 2 * s + 1);
        }
        (e0, levels)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigensystem_is_consistent(chain in mirror_chain(64)) {
        let eig = EigenSystem::of_chain(&chain).unwrap();
        let n = eig.dim();
        prop_assert!(eig.eigenvalues().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(eig.orthonormality_defect() < 1e-10);

        let m = build_single_particle_matrix(&chain);
        let norm = m.max_abs();
        for i in 0..n {
            for j in 0..n {
                let v: f64 = (0..n)
                    .map(|nu| eig.component(i, nu) * eig.eigenvalues()[nu] * eig.component(j, nu))
                    .sum();
                prop_assert!((v - m.get(i, j)).abs() < 1e-10 * norm * n as f64);
            }
        }
    }

    #[test]
    fn node_counts_and_parity(chain in mirror_chain(64)) {
        let eig = EigenSystem::of_chain(&chain).unwrap();
        let report = check_sign_changes(&eig);
        prop_assert!(report.passes(), "{:?}", report);
        prop_assert!(check_parity(&eig) < 1e-8);
    }

    #[test]
    fn zero_fields_give_symmetric_spectrum(chain in zero_field_chain(48)) {
        let eps = EigenSystem::of_chain(&chain).unwrap().eigenvalues().to_vec();
        let n = eps.len();
        let scale = eps[n - 1];
        for nu in 0..n {
            prop_assert!((eps[nu] + eps[n - 1 - nu]).abs() < 1e-11 * scale);
        }
    }

    #[test]
    fn round_trip(chain in mirror_chain(40)) {
        let eig = EigenSystem::of_chain(&chain).unwrap();
        let rep = reconstruct_from_energies(eig.eigenvalues()).unwrap();
        prop_assert!(common::parameter_error(&chain, &rep.chain) < 1e-8);
    }

    #[test]
    fn weights_are_first_components(chain in mirror_chain(32)) {
        let eig = EigenSystem::of_chain(&chain).unwrap();
        let w = spectral_weights(eig.eigenvalues()).unwrap();
        for nu in 0..eig.dim() {
            let x0 = eig.component(0, nu);
            prop_assert!((x0 * x0 - w[nu]).abs() < 1e-9);
        }
    }

    #[test]
    fn antisymmetric_spectrum_gives_zero_fields(levels in prop::collection::vec(0.1f64..3.0, 1..12), middle in any::<bool>()) {
        let mut positive = Vec::new();
        let mut acc = 0.0;
        for g in levels {
            acc += g;
            positive.push(acc);
        }
        let mut eps: Vec<f64> = positive.iter().rev().map(|e| -e).collect();
        if middle {
            eps.push(0.0);
        }
        eps.extend(&positive);
        let rep = reconstruct_from_energies(&eps).unwrap();
        let jmax = rep.chain.couplings().iter().fold(0.0f64, |m, x| m.max(*x));
        prop_assert!(rep.chain.fields().iter().all(|h| h.abs() < 1e-9 * jmax));
    }

    #[test]
    fn gap_criterion_matches_certificate((e0, levels) in odd_gap_spectrum(), bump in 0usize..20, tau in 0.2f64..3.0) {
        let unit = std::f64::consts::PI / tau;
        let mut eps: Vec<f64> = levels.iter().map(|&l| (e0 + l as f64) * unit).collect();
        let cert = certify_spectrum(&eps, tau, 1e-9).unwrap();
        prop_assert!(cert.valid);
        prop_assert!(gap_residuals(&eps, tau).iter().all(|&r| r < 1e-9));

        // shifting the upper part by half a unit breaks exactly one gap
        let k = 1 + bump % (eps.len() - 1);
        for e in &mut eps[k..] {
            *e += 0.5 * unit;
        }
        let cert = certify_spectrum(&eps, tau, 1e-9).unwrap();
        prop_assert!(!cert.valid);
        let bad = gap_residuals(&eps, tau).iter().filter(|&&r| r > 1e-9).count();
        prop_assert_eq!(bad, 1);
    }

    #[test]
    fn certificate_is_scale_covariant((e0, levels) in odd_gap_spectrum(), c in 0.1f64..10.0) {
        let eps: Vec<f64> = levels.iter().map(|&l| e0 + l as f64).collect();
        let spec = SpectrumSpec::from_energies(eps, std::f64::consts::PI, 1e-9).unwrap();
        let scaled = spec.scaled(c);
        let cert = scaled.certify(1e-8).unwrap();
        prop_assert!(cert.valid);
        prop_assert!((cert.phi0 - spec.phi0).abs() < 1e-9);
        prop_assert!(scaled.bookkeeping_residual() < 1e-8);
    }
}
