use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use vaisman_core::einstein::{assemble_full_ricci, fit_report, p0k_check, FitReport, P0kCheck};
use vaisman_core::transverse::{metric_from_potential, ricci};
use vaisman_core::{HermitianField, Snapshot};

use crate::config::ExperimentConfig;
use crate::error::{io_at, CliError, CliResult};
use crate::presets;
use crate::EXIT_OK;

#[derive(Debug, Serialize)]
pub struct FitOutput {
    pub n: usize,
    #[serde(flatten)]
    pub fit: FitReport,
    /// Against `‖θ‖ = 1`, the chart normalization.
    pub p0k: P0kCheck,
}

fn snapshot(value: &Value, what: &str) -> CliResult<HermitianField> {
    let snap: Snapshot = serde_json::from_value(value.clone())
        .map_err(|e| CliError::Input(format!("{what}: {e}")))?;
    snap.to_hermitian()
        .map_err(|e| CliError::Input(format!("{what}: {e}")))
}

/// Metric and, when supplied, transverse Ricci form from a JSON document:
/// a metric snapshot, or `{"metric": snapshot, "ricci": snapshot}`.
fn from_json(text: &str) -> CliResult<(HermitianField, Option<HermitianField>)> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed JSON: {e}")))?;
    match value.get("metric") {
        Some(m) => {
            let g = snapshot(m, "metric")?;
            let ric = value
                .get("ricci")
                .map(|r| snapshot(r, "ricci"))
                .transpose()?;
            Ok((g, ric))
        }
        None => Ok((snapshot(&value, "snapshot")?, None)),
    }
}

pub fn analyze(g: &HermitianField, ricci_t: Option<HermitianField>) -> CliResult<FitOutput> {
    let n = g.n();
    let ricci_t = match ricci_t {
        Some(r) => r,
        None => ricci(g)?,
    };
    let ric = assemble_full_ricci(&ricci_t, g, n)?;
    Ok(FitOutput {
        n,
        fit: fit_report(&ric, g, n)?,
        p0k: p0k_check(&ric, g, n, 1.0)?,
    })
}

/// Fit report of a snapshot, a `{metric, ricci}` pair, or the reference
/// metric of a config's preset. Written to `out`, or standard output.
pub fn fit_einstein(path: &Path, out: Option<&Path>) -> CliResult<i32> {
    let text = fs::read_to_string(path).map_err(io_at(path))?;
    let (g, ricci_t) = if text.trim_start().starts_with('{') {
        from_json(&text)?
    } else {
        let config = ExperimentConfig::load(path)?;
        let spec = std::sync::Arc::new(config.grid_spec(None)?);
        let h = presets::potential(&spec, config.chart.preset, config.chart.amplitude);
        (
            metric_from_potential(&h, &HermitianField::identity(&spec))?,
            None,
        )
    };
    let output = analyze(&g, ricci_t)?;
    let text = serde_json::to_string_pretty(&output).map_err(|e| CliError::Input(e.to_string()))?;
    log::info!(
        "lambda = {:.9}, alpha = {:.9}, beta = {:.9}, residual = {:e}",
        output.fit.lambda,
        output.fit.alpha,
        output.fit.beta,
        output.fit.residual
    );
    match out {
        Some(p) => fs::write(p, text + "\n").map_err(io_at(p))?,
        None => println!("{text}"),
    }
    Ok(EXIT_OK)
}
