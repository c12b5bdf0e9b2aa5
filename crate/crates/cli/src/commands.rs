//! Subcommand bodies. Each returns the process exit code and writes human
//! output to `out`.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gmre_core::bounds::{
    combine_renyi_values, ghz_fidelity, ghz_fidelity_lower_bound, one_shot_bound,
    DEFAULT_ALPHA_GRID,
};
use gmre_core::solver::{alt_rains, gmre, log_gmn, renyi_rains, SolveConfig, SolveReport};
use gmre_core::tfim::{sweep_row, Boundary, ChainConfig, Measures, SweepSpec};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::checks::{run_suite, SUITES};
use crate::exit;
use crate::format::{
    parse_grid, parse_list, significant, status_exit_code, sweep_csv, sweep_json,
};
use crate::manifest::{sidecar_path, RunManifest};
use crate::state_file::read_state;

#[derive(Debug, Parser)]
#[command(name = "gmre", version, about = "Genuine multipartite Rains entanglement")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rains quantity of a state (or its Rényi or alternate variant).
    Gmre {
        state: PathBuf,
        #[command(flatten)]
        solve: SolveFlags,
        /// Sandwiched Rényi order in (1, 2] instead of the relative entropy.
        #[arg(long, conflicts_with = "alt")]
        alpha: Option<f64>,
        /// Minimise over the per-cut ball set instead.
        #[arg(long)]
        alt: bool,
    },
    /// Genuine multipartite log-negativity of a state.
    Gmn {
        state: PathBuf,
        #[command(flatten)]
        solve: SolveFlags,
    },
    /// One-shot distillation bounds and the GHZ fidelity bound.
    Bounds {
        state: PathBuf,
        #[command(flatten)]
        solve: SolveFlags,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        /// Comma-separated Rényi orders.
        #[arg(long)]
        alpha_grid: Option<String>,
    },
    /// Entanglement of three adjacent spins along a transverse-field sweep.
    Tfim {
        #[arg(long, default_value_t = 12)]
        n: usize,
        /// start:stop:step
        #[arg(long, default_value = "0.2:2.0:0.1")]
        h_grid: String,
        /// Comma-separated subset of gmre,log_gmn.
        #[arg(long, default_value = "gmre,log_gmn")]
        measures: String,
        #[arg(long, value_enum, default_value_t = BoundaryArg::Periodic)]
        boundary: BoundaryArg,
        #[command(flatten)]
        solve: SolveFlags,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Seeded property suites; exit 3 if any check fails.
    Check {
        /// One of monotonicity, entropy, feasible, all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
}

#[derive(Debug, Args)]
pub struct SolveFlags {
    /// Absolute value tolerance in bits.
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long, default_value_t = 2000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report path; defaults to a file next to the input.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl SolveFlags {
    fn config(&self) -> SolveConfig {
        SolveConfig {
            value_tol: self.tol,
            max_iter: self.max_iter,
            seed: self.seed,
            ..SolveConfig::default()
        }
    }

    fn record(&self, m: &mut RunManifest) {
        m.flag("tol", self.tol).flag("max-iter", self.max_iter);
        if let Some(o) = &self.output {
            m.flag("output", o.display());
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BoundaryArg {
    Periodic,
    Open,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Runs a parsed command.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Gmre {
            state,
            solve,
            alpha,
            alt,
        } => cmd_gmre(&state, &solve, alpha, alt, out),
        Command::Gmn { state, solve } => cmd_gmn(&state, &solve, out),
        Command::Bounds {
            state,
            solve,
            epsilon,
            alpha_grid,
        } => cmd_bounds(&state, &solve, epsilon, alpha_grid.as_deref(), out),
        Command::Tfim {
            n,
            h_grid,
            measures,
            boundary,
            solve,
            format,
        } => cmd_tfim(n, &h_grid, &measures, boundary, &solve, format, out),
        Command::Check {
            suite,
            seed,
            trials,
        } => cmd_check(&suite, seed, trials, out),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            exit::INPUT_ERROR
        }
    }
}

type CmdResult = Result<i32, String>;

fn default_output(state: &Path, suffix: &str) -> PathBuf {
    let mut name = state
        .file_stem()
        .map(|s| s.to_owned())
        .unwrap_or_else(|| "state".into());
    name.push(suffix);
    state.with_file_name(name)
}

fn report_json(report: &SolveReport) -> Value {
    json!({
        "value": report.value,
        "iterations": report.iterations,
        "final_feasibility": report.final_feasibility,
        "grad_norm": report.grad_norm,
        "floored": report.floored,
        "status": report.status.as_str(),
    })
}

fn write_json(path: &Path, value: &Value) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    std::fs::write(path, text + "\n").map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn io(e: std::io::Error) -> String {
    e.to_string()
}

fn load(state: &Path, manifest: &mut RunManifest) -> Result<gmre_core::DensityMatrix, String> {
    let rho = read_state(state).map_err(|e| format!("{}: {e}", state.display()))?;
    manifest.input(state).map_err(io)?;
    Ok(rho)
}

pub fn cmd_gmre(
    state: &Path,
    solve: &SolveFlags,
    alpha: Option<f64>,
    alt: bool,
    out: &mut dyn Write,
) -> CmdResult {
    let start = Instant::now();
    let mut manifest = RunManifest::new("gmre", solve.seed);
    solve.record(&mut manifest);
    let rho = load(state, &mut manifest)?;
    let cfg = solve.config();
    let (label, report) = match (alpha, alt) {
        (Some(a), _) => {
            manifest.flag("alpha", a);
            (format!("Renyi-Rains (alpha = {a})"), renyi_rains(&rho, a, &cfg))
        }
        (None, true) => {
            manifest.flag("alt", true);
            ("alternate Rains".to_owned(), alt_rains(&rho, &cfg))
        }
        (None, false) => ("GMRE".to_owned(), gmre(&rho, &cfg)),
    };
    let report = report.map_err(|e| e.to_string())?;
    writeln!(
        out,
        "{label} = {:.4} bits ({}, {} iterations)",
        report.value, report.status, report.iterations
    )
    .map_err(io)?;
    manifest.wall_time_seconds = start.elapsed().as_secs_f64();
    let path = solve
        .output
        .clone()
        .unwrap_or_else(|| default_output(state, ".gmre.json"));
    let mut body = report_json(&report);
    body["measure"] = json!(label);
    body["manifest"] = serde_json::to_value(&manifest).expect("manifest serializes");
    write_json(&path, &body)?;
    Ok(status_exit_code(report.status))
}

pub fn cmd_gmn(state: &Path, solve: &SolveFlags, out: &mut dyn Write) -> CmdResult {
    let start = Instant::now();
    let mut manifest = RunManifest::new("gmn", solve.seed);
    solve.record(&mut manifest);
    let rho = load(state, &mut manifest)?;
    let report = log_gmn(&rho, &solve.config()).map_err(|e| e.to_string())?;
    let n = gmre_core::solver::gmn_from_log(report.value).map_err(|e| e.to_string())?;
    writeln!(
        out,
        "log-GMN = {:.4} bits, GMN = {:.4} ({})",
        report.value, n, report.status
    )
    .map_err(io)?;
    manifest.wall_time_seconds = start.elapsed().as_secs_f64();
    let path = solve
        .output
        .clone()
        .unwrap_or_else(|| default_output(state, ".gmn.json"));
    let mut body = report_json(&report);
    body["negativity"] = json!(n);
    body["manifest"] = serde_json::to_value(&manifest).expect("manifest serializes");
    write_json(&path, &body)?;
    Ok(status_exit_code(report.status))
}

pub fn cmd_bounds(
    state: &Path,
    solve: &SolveFlags,
    epsilon: f64,
    alpha_grid: Option<&str>,
    out: &mut dyn Write,
) -> CmdResult {
    let start = Instant::now();
    let mut manifest = RunManifest::new("bounds", solve.seed);
    solve.record(&mut manifest);
    manifest.flag("epsilon", epsilon);
    let grid = match alpha_grid {
        Some(g) => {
            manifest.flag("alpha-grid", g);
            parse_list(g)?
        }
        None => DEFAULT_ALPHA_GRID.to_vec(),
    };
    let rho = load(state, &mut manifest)?;
    let cfg = solve.config();

    let base = gmre(&rho, &cfg).map_err(|e| e.to_string())?;
    let one_shot = one_shot_bound(base.value, epsilon).map_err(|e| e.to_string())?;
    let renyi: Vec<(f64, gmre_core::Result<f64>)> = grid
        .par_iter()
        .map(|&a| (a, renyi_rains(&rho, a, &cfg).map(|r| r.value)))
        .collect();
    let renyi = combine_renyi_values(renyi, epsilon).map_err(|e| e.to_string())?;

    writeln!(out, "GMRE              {:.5} ({})", base.value, base.status).map_err(io)?;
    writeln!(out, "one-shot bound    {:.5}", one_shot).map_err(io)?;
    writeln!(
        out,
        "Renyi bound       {:.5} (alpha = {})",
        renyi.value, renyi.alpha
    )
    .map_err(io)?;
    for p in &renyi.points {
        match (&p.renyi, p.candidate) {
            (Ok(v), Some(c)) => writeln!(out, "  alpha {:<6} R = {v:.5}  candidate {c:.5}", p.alpha),
            (Err(e), _) => writeln!(out, "  alpha {:<6} failed: {e}", p.alpha),
            _ => Ok(()),
        }
        .map_err(io)?;
    }

    let fidelity_bound = match (rho.shape().uniform_dim(), ghz_fidelity(&rho)) {
        (Some(d), Ok(f)) => {
            let bound = ghz_fidelity_lower_bound(f.min(1.0), d).ok();
            if let Some(b) = bound {
                writeln!(
                    out,
                    "GHZ fidelity      {f:.5}: lower bound {:.5} (relaxed {:.5})",
                    b.exact, b.relaxed
                )
                .map_err(io)?;
            } else {
                writeln!(out, "GHZ fidelity      {f:.5}: below 1/{d}, no lower bound").map_err(io)?;
            }
            json!({
                "fidelity": f,
                "exact": bound.map(|b| b.exact),
                "relaxed": bound.map(|b| b.relaxed),
            })
        }
        _ => Value::Null,
    };

    manifest.wall_time_seconds = start.elapsed().as_secs_f64();
    let path = solve
        .output
        .clone()
        .unwrap_or_else(|| default_output(state, ".bounds.json"));
    let body = json!({
        "gmre": report_json(&base),
        "epsilon": epsilon,
        "one_shot_bound": one_shot,
        "renyi_bound": {
            "value": renyi.value,
            "alpha": renyi.alpha,
            "points": renyi.points.iter().map(|p| json!({
                "alpha": p.alpha,
                "renyi": p.renyi.as_ref().ok(),
                "candidate": p.candidate,
            })).collect::<Vec<_>>(),
        },
        "fidelity_bound": fidelity_bound,
        "manifest": manifest,
    });
    write_json(&path, &body)?;
    Ok(status_exit_code(base.status))
}

fn parse_measures(spec: &str) -> Result<Measures, String> {
    let mut m = Measures {
        gmre: false,
        log_gmn: false,
    };
    for name in spec.split(',').map(str::trim) {
        match name {
            "gmre" => m.gmre = true,
            "log_gmn" | "gmn" => m.log_gmn = true,
            other => return Err(format!("unknown measure `{other}`")),
        }
    }
    Ok(m)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_tfim(
    n: usize,
    h_grid: &str,
    measures: &str,
    boundary: BoundaryArg,
    solve: &SolveFlags,
    format: Format,
    out: &mut dyn Write,
) -> CmdResult {
    let start = Instant::now();
    let mut manifest = RunManifest::new("tfim", solve.seed);
    solve.record(&mut manifest);
    manifest
        .flag("n", n)
        .flag("h-grid", h_grid)
        .flag("measures", measures)
        .flag("boundary", format!("{boundary:?}").to_lowercase())
        .flag("format", format!("{format:?}").to_lowercase());
    let boundary = match boundary {
        BoundaryArg::Periodic => Boundary::Periodic,
        BoundaryArg::Open => Boundary::Open,
    };
    let spec = SweepSpec {
        h_values: parse_grid(h_grid)?,
        sites: None,
        measures: parse_measures(measures)?,
    };
    spec.validate().map_err(|e| e.to_string())?;
    let template = ChainConfig::new(n, spec.h_values[0], boundary).map_err(|e| e.to_string())?;
    let cfg = solve.config();
    let rows: Vec<_> = spec
        .h_values
        .par_iter()
        .map(|&h| sweep_row(h, &template, &spec, &cfg))
        .collect();

    let text = match format {
        Format::Csv => sweep_csv(&rows),
        Format::Json => serde_json::to_string_pretty(&sweep_json(&rows)).expect("rows serialize") + "\n",
    };
    manifest.wall_time_seconds = start.elapsed().as_secs_f64();
    match &solve.output {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            let sidecar = sidecar_path(path);
            write_json(&sidecar, &serde_json::to_value(&manifest).expect("manifest serializes"))?;
            writeln!(out, "wrote {} rows to {}", rows.len(), path.display()).map_err(io)?;
        }
        None => out.write_all(text.as_bytes()).map_err(io)?,
    }
    let failed = rows.iter().any(|r| {
        [&r.gmre, &r.log_gmn].iter().any(|m| match m {
            Some(Ok(v)) => status_exit_code(v.status) != exit::OK,
            Some(Err(_)) => true,
            None => false,
        })
    });
    Ok(if failed { exit::NOT_CONVERGED } else { exit::OK })
}

pub fn cmd_check(suite: &str, seed: u64, trials: usize, out: &mut dyn Write) -> CmdResult {
    let names: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&suite) {
        vec![suite]
    } else {
        return Err(format!(
            "unknown suite `{suite}`; expected one of {} or all",
            SUITES.join(", ")
        ));
    };
    let mut all_passed = true;
    for name in names {
        let report = run_suite(name, seed, trials).expect("suite names are checked above");
        writeln!(out, "{}", report.summary()).map_err(io)?;
        for f in &report.failures {
            writeln!(out, "  {f}").map_err(io)?;
        }
        all_passed &= report.passed();
    }
    Ok(if all_passed {
        exit::OK
    } else {
        exit::PROPERTY_FAILURE
    })
}

/// Formats a float the way sweep tables do.
pub fn table_number(x: f64) -> String {
    significant(x, 6)
}
