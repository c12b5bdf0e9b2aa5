//! Number formatting, grid flags, and the sweep table.

use gmre_core::solver::SolveStatus;
use gmre_core::tfim::{MeasureValue, SweepRow};
use serde_json::{json, Value};

/// `x` rounded to `digits` significant digits, in fixed notation when that
/// stays short and scientific notation otherwise.
pub fn significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-5..=6).contains(&exponent) {
        let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // Rounding can carry into a new leading digit (9.9999995 → 10.000000).
        let rounded: f64 = s.parse().expect("formatted float parses");
        let carried = rounded.abs().log10().floor() as i32;
        if carried != exponent && rounded != 0.0 {
            let decimals = (digits as i32 - 1 - carried).max(0) as usize;
            return format!("{x:.decimals$}");
        }
        s
    } else {
        format!("{x:.prec$e}", prec = digits - 1)
    }
}

/// Parses `start:stop:step`. Values are `start + i·step` for every `i` with
/// the value below `stop + step/2`, rounded to 12 decimals.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid `{spec}` is not start:stop:step"));
    }
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{s}` in grid `{spec}` is not a number"))
    };
    let (start, stop, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
    if step.is_nan() || step <= 0.0 || !start.is_finite() || !stop.is_finite() {
        return Err(format!("grid `{spec}` needs finite bounds and a positive step"));
    }
    if stop < start {
        return Err(format!("grid `{spec}` stops before it starts"));
    }
    let mut out = Vec::new();
    let mut i = 0u32;
    loop {
        let v = start + f64::from(i) * step;
        if v >= stop + step / 2.0 {
            break;
        }
        out.push((v * 1e12).round() / 1e12);
        i += 1;
        if out.len() > 100_000 {
            return Err(format!("grid `{spec}` has too many points"));
        }
    }
    Ok(out)
}

/// Parses a comma-separated list of numbers.
pub fn parse_list(spec: &str) -> Result<Vec<f64>, String> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{s}` is not a number"))
        })
        .collect()
}

pub const SWEEP_HEADER: &str = "h,gmre,log_gmn,gmre_status,gmn_status";

fn cell(m: &Option<gmre_core::Result<MeasureValue>>) -> (String, String) {
    match m {
        None => (String::new(), "skipped".to_owned()),
        Some(Ok(v)) => (significant(v.value, 6), v.status.as_str().to_owned()),
        Some(Err(_)) => (String::new(), "error".to_owned()),
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        let (g, gs) = cell(&row.gmre);
        let (l, ls) = cell(&row.log_gmn);
        out.push_str(&format!("{},{g},{l},{gs},{ls}\n", significant(row.h, 6)));
    }
    out
}

fn measure_json(m: &Option<gmre_core::Result<MeasureValue>>) -> Value {
    match m {
        None => Value::Null,
        Some(Ok(v)) => json!({
            "value": v.value,
            "status": v.status.as_str(),
            "iterations": v.iterations,
        }),
        Some(Err(e)) => json!({ "error": e.to_string() }),
    }
}

pub fn sweep_json(rows: &[SweepRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                json!({
                    "h": r.h,
                    "energy": r.energy.as_ref().ok(),
                    "gmre": measure_json(&r.gmre),
                    "log_gmn": measure_json(&r.log_gmn),
                })
            })
            .collect(),
    )
}

pub fn status_exit_code(status: SolveStatus) -> i32 {
    match status {
        SolveStatus::Converged => 0,
        SolveStatus::IterLimit | SolveStatus::InfeasibleDetect => 2,
    }
}
