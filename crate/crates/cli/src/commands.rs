use std::fmt::Write as _;
use std::path::Path;

use log::Level;
use mirrorchain::dynamics::{transfer_amplitude, zz_correlation, ThermalState};
use mirrorchain::ed_oracle::{build_spin_hamiltonian, subset_sums, SpinOp};
use mirrorchain::inverse_problem::{
    coupling_variation, reconstruct_annealing, reconstruct_from_energies, AnnealSchedule,
};
use mirrorchain::mirror_design::{
    amplitude_from_scale, certify_spectrum, cosine_distorted_spectrum, linear_spectrum, mirror31_spectrum,
    natural_amplitude, quadratic_spectrum, DEFAULT_CERT_TOL,
};
use mirrorchain::series::{chain_hash, format_number};
use mirrorchain::string_correlators::xx_cross_correlation;
use mirrorchain::{Chain, Eigen, Error, Result, Spectrum};
use serde_json::json;

use crate::config::{
    CertifyArgs, Command, CorrelateArgs, DesignArgs, Family, FidelityArgs, Format, MethodArg, Observable,
    OracleArgs, ReconstructArgs, RunConfig, SpectrumSource,
};
use crate::diag::emit;
use crate::grid::describe_time;

/// Default spectral-residual threshold for annealing, relative to the
/// largest |energy|.
const ANNEAL_TOL: f64 = 1e-9;
const ORACLE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Invalid,
    NotConverged,
}

/// Result of a command: the bytes to write, a one-line summary, and
/// whether the result passed its own checks.
pub struct Outcome {
    pub body: String,
    pub summary: String,
    pub status: Status,
}

pub fn run(cfg: &RunConfig, command: &Command) -> Result<Outcome> {
    match command {
        Command::Design(args) => design(cfg, args),
        Command::Reconstruct(args) => reconstruct(cfg, args),
        Command::Certify(args) => certify(cfg, args),
        Command::Correlate(args) => correlate(cfg, args),
        Command::Fidelity(args) => fidelity(cfg, args),
        Command::OracleCheck(args) => oracle_check(cfg, args),
    }
}

fn json_only(cfg: &RunConfig, what: &str) -> Result<()> {
    if cfg.format == Some(Format::Csv) {
        return Err(Error::InvalidParameter(format!("{what} output is JSON only")));
    }
    Ok(())
}

fn pretty<S: serde::Serialize>(value: &S) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn read_chain(path: &Path) -> Result<Chain> {
    Chain::from_json(&std::fs::read_to_string(path)?)
}

fn load_spectrum(source: &SpectrumSource, tau: Option<f64>) -> Result<Spectrum> {
    match (&source.spectrum, &source.energies) {
        (Some(path), _) => {
            let mut spec = Spectrum::from_json(&std::fs::read_to_string(path)?)?;
            if let Some(tau) = tau {
                spec.tau = tau;
            }
            Ok(spec)
        }
        (None, Some(energies)) => Ok(Spectrum {
            n_assign: vec![0; energies.len()],
            energies: energies.clone(),
            tau: tau.unwrap_or(std::f64::consts::PI),
            phi0: 0.0,
        }),
        (None, None) => Err(Error::InvalidParameter("give a spectrum file or --energies".into())),
    }
}

fn design(cfg: &RunConfig, args: &DesignArgs) -> Result<Outcome> {
    let levels = || {
        args.levels
            .ok_or_else(|| Error::InvalidParameter("--levels is required for this family".into()))
    };
    let spec = match args.family {
        Family::Linear => linear_spectrum(levels()?, args.omega0, args.omega)?,
        Family::Quadratic => quadratic_spectrum(levels()?, args.omega0, args.omega, args.p, args.q)?,
        Family::Cosine => {
            let n = levels()?;
            let amplitude = match (args.amplitude, args.a0) {
                (Some(a), _) => a,
                (None, Some(a0)) => amplitude_from_scale(n, a0),
                (None, None) => natural_amplitude(n),
            };
            emit(Level::Info, "amplitude", json!({ "levels": n, "amplitude": amplitude }));
            cosine_distorted_spectrum(n, amplitude)?
        }
        Family::Mirror31 => {
            if args.levels.is_some_and(|n| n != 31) {
                return Err(Error::InvalidParameter("mirror31 has exactly 31 levels".into()));
            }
            mirror31_spectrum()
        }
    };
    let cert = spec.certify(cfg.tolerance.unwrap_or(DEFAULT_CERT_TOL))?;
    let body = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => pretty(&spec)?,
        Format::Csv => {
            let mut s = String::from("nu,energy,n\n");
            for (nu, (e, n)) in spec.energies.iter().zip(&spec.n_assign).enumerate() {
                writeln!(s, "{nu},{},{n}", format_number(*e)).expect("writing to a string");
            }
            s
        }
    };
    Ok(Outcome {
        body,
        summary: certificate_line(cert.valid, spec.tau),
        status: if cert.valid { Status::Ok } else { Status::Invalid },
    })
}

fn certificate_line(valid: bool, tau: f64) -> String {
    format!(
        "certificate: {}, tau={}",
        if valid { "valid" } else { "invalid" },
        describe_time(tau)
    )
}

fn reconstruct(cfg: &RunConfig, args: &ReconstructArgs) -> Result<Outcome> {
    json_only(cfg, "reconstruct")?;
    let spec = load_spectrum(&args.source, None)?;
    let report = match args.method {
        MethodArg::Direct => reconstruct_from_energies(&spec.energies)?,
        MethodArg::Annealing => {
            let mut schedule = AnnealSchedule::for_energies(&spec.energies, cfg.seed);
            if let Some(sweeps) = args.sweeps {
                schedule.sweeps = sweeps;
            }
            if let Some(cooling) = args.cooling {
                schedule.cooling = cooling;
            }
            emit(Level::Info, "schedule", json!({ "schedule": schedule }));
            let scale = spec.energies.iter().fold(1.0f64, |m, e| m.max(e.abs()));
            reconstruct_annealing(&spec, &schedule, cfg.tolerance.unwrap_or(ANNEAL_TOL) * scale)?
        }
    };
    let v = coupling_variation(&report.chain);
    emit(
        Level::Info,
        "reconstruction",
        json!({
            "method": report.method,
            "spectral_residual": report.spectral_residual,
            "iterations": report.iterations,
            "converged": report.converged,
            "variation": v,
        }),
    );
    let mut summary = format!(
        "J in [{:.4}, {:.4}], variation {:.2}%, spectral residual {:.1e}",
        v.min,
        v.max,
        100.0 * v.relative,
        report.spectral_residual
    );
    if !report.converged {
        summary.push_str(" (not converged)");
    }
    Ok(Outcome {
        body: report.chain.to_json()? + "\n",
        summary,
        status: if report.converged { Status::Ok } else { Status::NotConverged },
    })
}

fn certify(cfg: &RunConfig, args: &CertifyArgs) -> Result<Outcome> {
    json_only(cfg, "certify")?;
    let spec = load_spectrum(&args.source, args.tau)?;
    let cert = certify_spectrum(&spec.energies, spec.tau, cfg.tolerance.unwrap_or(DEFAULT_CERT_TOL))?;
    let mut summary = certificate_line(cert.valid, cert.tau);
    if !cert.valid {
        write!(summary, " (worst residual {:.3e})", cert.worst_residual).expect("writing to a string");
    }
    Ok(Outcome {
        body: pretty(&cert)?,
        summary,
        status: if cert.valid { Status::Ok } else { Status::Invalid },
    })
}

fn correlate(cfg: &RunConfig, args: &CorrelateArgs) -> Result<Outcome> {
    let chain = read_chain(&args.chain)?;
    let eig = Eigen::of_chain(&chain)?;
    let state = ThermalState::new(&eig, args.temperature);
    let (j, k) = match args.sites.as_slice() {
        [j] => (*j, *j),
        [j, k] => (*j, *k),
        _ => return Err(Error::InvalidParameter("--sites takes one or two sites".into())),
    };
    let times = args.grid.times();
    let series = match args.observable {
        Observable::Zz => zz_correlation(&eig, &state, j, k, &times)?,
        Observable::Xx => xx_cross_correlation(&eig, &state, j, k, &times)?,
    }
    .with_chain_hash(&chain);
    let body = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => series.to_csv_string(),
        Format::Json => pretty(&series)?,
    };
    let peak = series
        .times
        .iter()
        .zip(&series.values)
        .max_by(|a, b| a.1.re.total_cmp(&b.1.re));
    let mut summary = format!(
        "{} sites {j},{k} at T={}: {} points",
        series.observable,
        args.temperature,
        series.len()
    );
    if let Some((t, v)) = peak {
        write!(summary, ", max Re {:.6} at t={}", v.re, describe_time(*t)).expect("writing to a string");
    }
    Ok(Outcome {
        body,
        summary,
        status: Status::Ok,
    })
}

fn fidelity(cfg: &RunConfig, args: &FidelityArgs) -> Result<Outcome> {
    let chain = read_chain(&args.chain)?;
    let eig = Eigen::of_chain(&chain)?;
    let times = args.grid.times();
    let amps: Vec<_> = times.iter().map(|&t| transfer_amplitude(&eig, t)).collect();
    let hash = chain_hash(&chain);
    let last = chain.n_sites() - 1;
    let body = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let header = json!({ "observable": "fidelity", "sites": [0, last], "chain_hash": hash });
            let mut s = format!("{header}\nt,fidelity,re,im\n");
            for (t, a) in times.iter().zip(&amps) {
                let cols = [*t, a.norm_sqr(), a.re, a.im].map(format_number);
                writeln!(s, "{}", cols.join(",")).expect("writing to a string");
            }
            s
        }
        Format::Json => pretty(&json!({
            "observable": "fidelity",
            "sites": [0, last],
            "chain_hash": hash,
            "times": times,
            "fidelity": amps.iter().map(|a| a.norm_sqr()).collect::<Vec<_>>(),
            "amplitude": amps,
        }))?,
    };
    let best = times
        .iter()
        .zip(&amps)
        .map(|(&t, a)| (t, a.norm_sqr()))
        .max_by(|a, b| a.1.total_cmp(&b.1));
    let summary = match best {
        Some((t, f)) => format!("max fidelity {f:.12} at t={}", describe_time(t)),
        None => "empty grid".to_string(),
    };
    Ok(Outcome {
        body,
        summary,
        status: Status::Ok,
    })
}

fn oracle_check(cfg: &RunConfig, args: &OracleArgs) -> Result<Outcome> {
    json_only(cfg, "oracle-check")?;
    let tol = cfg.tolerance.unwrap_or(ORACLE_TOL);
    let chain = read_chain(&args.chain)?;
    let n = chain.n_sites();
    let eig = Eigen::of_chain(&chain)?;
    let ed = build_spin_hamiltonian(&chain)?.solve();
    let times = args.grid.times();

    let levels = subset_sums(eig.eigenvalues());
    let level_dev = ed
        .energies()
        .iter()
        .zip(&levels)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let c = n / 2;
    let mut pairs = vec![(0, 0), (0, n - 1), (c, c), (c, n - 1 - c)];
    pairs.dedup();
    let (mut zz_dev, mut xx_dev) = (0.0f64, 0.0f64);
    for &temp in &args.temperatures {
        let state = ThermalState::new(&eig, temp);
        for &(j, k) in &pairs {
            let f = zz_correlation(&eig, &state, j, k, &times)?;
            let s = ed.correlation(SpinOp::Z(j), SpinOp::Z(k), temp, &times)?;
            zz_dev = f.values.iter().zip(&s.values).fold(zz_dev, |m, (a, b)| m.max((a - b).norm()));
            let f = xx_cross_correlation(&eig, &state, j, k, &times)?;
            let s = ed.correlation(SpinOp::X(j), SpinOp::X(k), temp, &times)?;
            xx_dev = f.values.iter().zip(&s.values).fold(xx_dev, |m, (a, b)| m.max((a - b).norm()));
        }
    }
    let worst = zz_dev.max(xx_dev).max(level_dev);
    let passed = worst <= tol;
    let report = json!({
        "n_sites": n,
        "temperatures": args.temperatures,
        "pairs": pairs,
        "times": times.len(),
        "max_level_deviation": level_dev,
        "max_zz_deviation": zz_dev,
        "max_xx_deviation": xx_dev,
        "tolerance": tol,
        "passed": passed,
    });
    Ok(Outcome {
        body: pretty(&report)?,
        summary: format!(
            "oracle {}: max deviation {worst:.2e} (tolerance {tol:.0e})",
            if passed { "agrees" } else { "DISAGREES" }
        ),
        status: if passed { Status::Ok } else { Status::Invalid },
    })
}
