use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;
use vaisman_core::flow::HISTORY_HEADER;

use crate::error::{CliError, CliResult};
use crate::EXIT_OK;

#[derive(Clone, Copy, Debug, Deserialize)]
pub struct Row {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub ricci_sup: f64,
    pub dphidt_sup: f64,
    pub min_eig: f64,
    pub max_eig: f64,
    pub leafwise_defect: f64,
}

pub fn read_history(path: &Path) -> CliResult<Vec<Row>> {
    let bad = |e: &dyn std::fmt::Display| CliError::Input(format!("{}: {e}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(|e| bad(&e))?;
    let header = reader
        .headers()
        .map_err(|e| bad(&e))?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != HISTORY_HEADER {
        return Err(bad(&format!("unexpected header '{header}'")));
    }
    let rows = reader
        .deserialize()
        .collect::<Result<Vec<Row>, _>>()
        .map_err(|e| bad(&e))?;
    if rows.is_empty() {
        return Err(bad(&"no data rows"));
    }
    Ok(rows)
}

/// Whether `ricci_sup` never increases over the last `fraction` of the steps.
pub fn tail_non_increasing(rows: &[Row], fraction: f64) -> bool {
    let start = ((1.0 - fraction) * rows.len() as f64).floor() as usize;
    rows[start.min(rows.len() - 1)..]
        .windows(2)
        .all(|w| w[1].ricci_sup <= w[0].ricci_sup)
}

fn range(rows: &[Row], f: impl Fn(&Row) -> f64) -> (f64, f64) {
    rows.iter()
        .map(f)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
}

pub fn summarize(rows: &[Row]) -> String {
    let (first, last) = (rows[0], rows[rows.len() - 1]);
    let stepped = if rows.len() > 1 { &rows[1..] } else { rows };
    let (dt_lo, dt_hi) = range(stepped, |r| r.dt);
    let (ric_lo, _) = range(rows, |r| r.ricci_sup);
    let (min_lo, min_hi) = range(rows, |r| r.min_eig);
    let (max_lo, max_hi) = range(rows, |r| r.max_eig);
    let (_, leaf_hi) = range(rows, |r| r.leafwise_defect);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "rows             {} (steps {}..{})",
        rows.len(),
        first.step,
        last.step
    );
    let _ = writeln!(s, "t                {} -> {}", first.t, last.t);
    let _ = writeln!(s, "dt               [{dt_lo:e}, {dt_hi:e}]");
    let _ = writeln!(
        s,
        "ricci_sup        {:e} -> {:e} (min {ric_lo:e})",
        first.ricci_sup, last.ricci_sup
    );
    let _ = writeln!(
        s,
        "  non-increasing over final 80%: {}",
        if tail_non_increasing(rows, 0.8) {
            "yes"
        } else {
            "no"
        }
    );
    let _ = writeln!(
        s,
        "dphidt_sup       {:e} -> {:e}",
        first.dphidt_sup, last.dphidt_sup
    );
    let _ = writeln!(s, "min_eig          [{min_lo}, {min_hi}]");
    let _ = writeln!(s, "max_eig          [{max_lo}, {max_hi}]");
    let _ = writeln!(s, "leafwise_defect  max {leaf_hi:e}");
    s
}

pub fn report(path: &Path) -> CliResult<i32> {
    print!("{}", summarize(&read_history(path)?));
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(ricci: &[f64]) -> Vec<Row> {
        ricci
            .iter()
            .enumerate()
            .map(|(i, &r)| Row {
                step: i,
                t: i as f64,
                dt: 1.0,
                ricci_sup: r,
                dphidt_sup: 0.0,
                min_eig: 1.0,
                max_eig: 1.0,
                leafwise_defect: 0.0,
            })
            .collect()
    }

    #[test]
    fn monotone_tail() {
        // An early bump is outside the final 80%.
        assert!(tail_non_increasing(
            &rows(&[1.0, 2.0, 0.9, 0.8, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3]),
            0.8
        ));
        assert!(!tail_non_increasing(
            &rows(&[1.0, 0.9, 0.8, 0.85, 0.7]),
            0.8
        ));
        assert!(tail_non_increasing(&rows(&[1.0]), 0.8));
        assert!(summarize(&rows(&[1.0, 0.5])).contains("rows             2 (steps 0..1)"));
    }
}
