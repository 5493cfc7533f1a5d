//! Command-line entry point: exit 0 on success, 1 on a failed check, 2 on
//! configuration or usage errors.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64 as C;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::eig::build_dataset;
use crate::error::{Error, Result};
use crate::inversion::{isozaki_geometry, reconstruct_difference, stability_sweep, SweepConfig};
use crate::radial::{build_grid, RadialPotential};
use crate::report::{self, CheckResult};
use crate::scattering::{calibrate_grouping, isozaki_identity_check, scattering_from_dtn};
use crate::verify::{dtn_decay_table, resolvent_table, run_acceptance, sph_band};
use crate::weyl::linear_fit_slope;

#[derive(Parser)]
#[command(name = "bispec", version, about = "Spectral and scattering laboratory for the biharmonic operator on a ball")]
struct Cli {
    /// TOML experiment configuration (defaults applied when omitted)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// output directory (overrides the config's outDir)
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// worker threads, 0 = library default
    #[arg(long, global = true, value_name = "K")]
    threads: Option<usize>,

    /// seed recorded in output metadata
    #[arg(long, global = true, value_name = "S")]
    seed: Option<u64>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build spectral datasets for V1 and the V2 family and write them out
    Eig,
    /// Run the acceptance suite and write a report
    Verify,
    /// Tabulate DtN difference-norm decay in lambda
    DtnDecay,
    /// Check the Isozaki identity residuals and calibrate the grouping
    IsozakiCheck,
    /// Low-pass Born reconstruction of a potential difference
    Reconstruct,
    /// Hoelder-stability amplitude sweep
    Sweep,
    /// Scan the free-resolvent kernel magnitude along real lambda
    ResolventScan,
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("bispec: error: {e}");
            match e {
                Error::ConfigValidation(_) | Error::ConfigParse(_) => 2,
                _ => 1,
            }
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let mut cfg = ExperimentConfig::load(cli.config.as_deref())?;
    if let Some(out) = &cli.out {
        cfg.out_dir = out.to_string_lossy().into_owned();
    }
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    if cfg.threads > 0 {
        // ignore the error when a pool already exists (tests, repeat calls)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global();
    }
    let out_dir = PathBuf::from(&cfg.out_dir);
    match cli.cmd {
        Cmd::Eig => cmd_eig(&cfg, &out_dir),
        Cmd::Verify => cmd_verify(&cfg, &out_dir),
        Cmd::DtnDecay => cmd_dtn_decay(&cfg, &out_dir),
        Cmd::IsozakiCheck => cmd_isozaki_check(&cfg, &out_dir),
        Cmd::Reconstruct => cmd_reconstruct(&cfg, &out_dir),
        Cmd::Sweep => cmd_sweep(&cfg, &out_dir),
        Cmd::ResolventScan => cmd_resolvent_scan(&cfg, &out_dir),
    }
}

fn finish(command: &str, cfg: &ExperimentConfig, out_dir: &Path, checks: &[CheckResult], extra: serde_json::Value) -> Result<i32> {
    let doc = report::report_json(command, cfg, checks, extra);
    report::write_report(out_dir, &format!("{command}_report.json"), &doc)?;
    for c in checks {
        println!(
            "{} {:<32} measured {:>14.6e}  threshold {:>14.6e}  {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.threshold,
            c.detail
        );
    }
    Ok(if report::all_pass(checks) { 0 } else { 1 })
}

fn v2_family(cfg: &ExperimentConfig, grid: &crate::radial::RadialGrid, v1: &RadialPotential) -> Vec<RadialPotential> {
    cfg.amplitudes
        .iter()
        .map(|&a| {
            let bump = RadialPotential::gaussian_bump(grid, a, cfg.bump_center, cfg.bump_width);
            let samples: Vec<f64> = v1.samples.iter().zip(&bump.samples).map(|(x, y)| x + y).collect();
            let sup = samples.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
            RadialPotential {
                descriptor: crate::radial::PotentialDescriptor::Sampled,
                samples,
                sup_bound: sup,
            }
        })
        .collect()
}

fn cmd_eig(cfg: &ExperimentConfig, out_dir: &Path) -> Result<i32> {
    let grid = build_grid(cfg.radius, cfg.grid_n)?;
    let v1 = RadialPotential::from_descriptor(&grid, &cfg.v1)?;
    let ds1 = build_dataset(&v1, &grid, cfg.lmax, cfg.k_per_channel)?;
    report::write_text(out_dir, "dataset_v1.csv", &ds1.to_csv())?;
    report::write_report(out_dir, "dataset_v1.json", &ds1.to_json())?;
    let mut sizes = vec![ds1.len()];
    for (i, v2) in v2_family(cfg, &grid, &v1).iter().enumerate() {
        let ds2 = build_dataset(v2, &grid, cfg.lmax, cfg.k_per_channel)?;
        report::write_text(out_dir, &format!("dataset_v2_{i}.csv"), &ds2.to_csv())?;
        report::write_report(out_dir, &format!("dataset_v2_{i}.json"), &ds2.to_json())?;
        sizes.push(ds2.len());
    }
    println!(
        "eig: wrote {} dataset(s) to {} (lambdaComplete = {:.4e}, {} modes each)",
        sizes.len(),
        out_dir.display(),
        ds1.lambda_complete,
        sizes[0]
    );
    let extra = json!({ "datasets": sizes.len(), "modes": sizes, "lambdaComplete": ds1.lambda_complete });
    finish("eig", cfg, out_dir, &[], extra)
}

fn cmd_verify(cfg: &ExperimentConfig, out_dir: &Path) -> Result<i32> {
    let checks = run_acceptance(cfg)?;
    finish("verify", cfg, out_dir, &checks, json!({}))
}

fn cmd_dtn_decay(cfg: &ExperimentConfig, out_dir: &Path) -> Result<i32> {
    let grid = build_grid(cfg.radius, cfg.grid_n)?;
    let rows = dtn_decay_table(&grid)?;
    report::write_text(out_dir, "dtn_decay.csv", &report::dtn_decay_csv(&rows))?;
    let lx: Vec<f64> = rows.iter().map(|r| r.0.ln()).collect();
    let s0 = linear_fit_slope(&lx, &rows.iter().map(|r| r.1.ln()).collect::<Vec<_>>());
    let s1 = linear_fit_slope(&lx, &rows.iter().map(|r| r.3.ln()).collect::<Vec<_>>());
    let checks = [
        CheckResult::upper("dtn-decay-j0", s0, -0.15, "Lambda_1 difference slope".into()),
        CheckResult::upper("dtn-decay-j1", s1, -1.1, "jOrder=1 difference slope".into()),
    ];
    finish("dtn-decay", cfg, out_dir, &checks, json!({ "rows": rows.len() }))
}

fn cmd_isozaki_check(cfg: &ExperimentConfig, out_dir: &Path) -> Result<i32> {
    let zeta = cfg.zetas[0].max(10.0);
    let lmax = sph_band(zeta, cfg.radius).max(cfg.lmax);
    let grid = build_grid(cfg.radius, cfg.grid_n)?;
    let v1 = RadialPotential::from_descriptor(&grid, &cfg.v1)?;
    let ds0 = build_dataset(&v1, &grid, lmax, cfg.k_per_channel)?;
    let xi_mag = cfg.xi_magnitudes[0];
    let geo = isozaki_geometry([xi_mag, 0.0, 0.0], zeta, None)?;
    let tail_tol = cfg.tail_tol.max(0.05);
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for (i, &a) in cfg.amplitudes.iter().enumerate() {
        let bump = RadialPotential::gaussian_bump(&grid, a, cfg.bump_center, cfg.bump_width);
        let ds = build_dataset(&bump, &grid, lmax, cfg.k_per_channel)?;
        let res = isozaki_identity_check(&ds, &ds0, &bump, zeta, geo.omega, geo.theta, lmax, cfg.grouping, tail_tol)?;
        let sample = scattering_from_dtn(&ds, &ds0, zeta, geo.omega, geo.theta, lmax, cfg.grouping, tail_tol)?;
        rows.push((zeta, geo.omega, geo.theta, sample.s, res));
        if i == 0 && a <= 0.1 {
            let g = calibrate_grouping(&ds, &ds0, &bump, zeta, geo.omega, geo.theta, lmax, tail_tol)?;
            checks.push(CheckResult::new(
                "grouping-calibration",
                g == cfg.grouping,
                if g == cfg.grouping { 1.0 } else { 0.0 },
                1.0,
                format!("calibrated {g:?}, configured {:?}", cfg.grouping),
            ));
        }
    }
    report::write_text(out_dir, "isozaki_samples.csv", &report::scattering_csv(&rows))?;
    let extra = json!({ "zeta": zeta, "lmax": lmax, "residuals": rows.iter().map(|r| r.4).collect::<Vec<_>>() });
    finish("isozaki-check", cfg, out_dir, &checks, extra)
}

fn cmd_reconstruct(cfg: &ExperimentConfig, out_dir: &Path) -> Result<i32> {
    let zeta = cfg.zetas[0].max(10.0);
    let lmax = sph_band(zeta, cfg.radius).max(cfg.lmax);
    let grid = build_grid(cfg.radius, cfg.grid_n)?;
    let v1 = RadialPotential::from_descriptor(&grid, &cfg.v1)?;
    let a = cfg.amplitudes[0];
    let bump = RadialPotential::gaussian_bump(&grid, a, cfg.bump_center, cfg.bump_width);
    let samples: Vec<f64> = v1.samples.iter().zip(&bump.samples).map(|(x, y)| x + y).collect();
    let sup = samples.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    let v2 = RadialPotential { descriptor: crate::radial::PotentialDescriptor::Sampled, samples, sup_bound: sup };
    let ds1 = build_dataset(&v1, &grid, lmax, cfg.k_per_channel)?;
    let ds2 = build_dataset(&v2, &grid, lmax, cfg.k_per_channel)?;
    let diff = |r: f64| -bump.eval(r, grid.radius);
    let tail_tol = cfg.tail_tol.max(0.05);
    let rec = reconstruct_difference(&ds1, &ds2, &diff, zeta, cfg.n_xi, cfg.cutoff_mode, lmax, cfg.grouping, tail_tol)?;
    let truth: Vec<f64> = rec.r_nodes.iter().map(|&r| diff(r)).collect();
    report::write_text(out_dir, "reconstruction.csv", &report::reconstruction_csv(&rec, &truth))?;
    let rel = rec.recon_error / rec.l2_diff.max(1e-300);
    let extra = json!({
        "zeta": zeta,
        "cutoff": rec.cutoff,
        "cutoffMode": rec.mode,
        "tailDominated": rec.mode == crate::inversion::CutoffMode::Compliant,
        "reconError": rec.recon_error,
        "l2Diff": rec.l2_diff,
        "relativeError": rel,
    })
    ;
    println!(
        "reconstruct: zeta = {zeta}, cutoff = {:.4} ({:?}), relative L2 error = {rel:.4}",
        rec.cutoff, rec.mode
    );
    finish("reconstruct", cfg, out_dir, &[], extra)
}

fn cmd_sweep(cfg: &ExperimentConfig, out_dir: &Path) -> Result<i32> {
    let grid = build_grid(cfg.radius, cfg.grid_n)?;
    let v1 = RadialPotential::from_descriptor(&grid, &cfg.v1)?;
    let sweep_cfg = SweepConfig {
        e: cfg.e,
        m: cfg.m,
        kmax: cfg.kmax,
        zeta: cfg.zetas[0],
        lmax_dataset: cfg.lmax,
        k_per_channel: cfg.k_per_channel,
        sph_lmax: cfg.lmax,
        // the sweep's Born band equals the dataset band; the truncation gate
        // is advisory here and the looseness is recorded in the report
        tail_tol: cfg.tail_tol.max(1e9),
        cutoff: cfg.cutoff_mode,
        n_xi: cfg.n_xi,
        bump_center: cfg.bump_center,
        bump_width: cfg.bump_width,
        grouping: cfg.grouping,
    };
    let sw = stability_sweep(&grid, &v1, &cfg.amplitudes, &sweep_cfg)?;
    report::write_text(out_dir, "sweep.csv", &report::sweep_csv(&sw))?;
    let checks = [
        CheckResult::new("sweep-delta-emp", sw.delta_emp > 0.0, sw.delta_emp, 0.0, "fitted Hoelder exponent".into()),
    ];
    let extra = json!({
        "deltaEmp": sw.delta_emp,
        "deltaTheory": sw.delta_theory,
        "envelopeC": sw.envelope_c,
        "points": sw.reports,
    });
    finish("sweep", cfg, out_dir, &checks, extra)
}

fn cmd_resolvent_scan(cfg: &ExperimentConfig, out_dir: &Path) -> Result<i32> {
    let rows = resolvent_table()?;
    report::write_text(out_dir, "resolvent_scan.csv", &report::resolvent_csv(&rows))?;
    let lx: Vec<f64> = rows.iter().map(|r| r.0.ln()).collect();
    let ly: Vec<f64> = rows.iter().map(|r| r.1.ln()).collect();
    let slope = linear_fit_slope(&lx, &ly);
    let checks = [CheckResult::within(
        "resolvent-scaling",
        slope,
        -0.5,
        0.05,
        "kernel magnitude slope at s = 1".into(),
    )];
    // membership of the scan line in the resonance-free region
    let params = crate::scattering::ResonanceRegionParams::defaults(cfg.radius);
    let inside = rows
        .iter()
        .all(|r| crate::scattering::in_omega_delta(C::new(r.0, 0.0), &params, cfg.radius).unwrap_or(false));
    let extra = json!({ "slope": slope, "scanInsideOmegaDelta": inside });
    finish("resolvent-scan", cfg, out_dir, &checks, extra)
}
