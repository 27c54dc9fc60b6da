use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use serde::Serialize;
use vaisman_core::grid::fitted_order;
use vaisman_core::vaisman::{
    verify_vaisman, ChartFn, CoefficientForm, InvariantReport, VaismanChart,
};
use vaisman_core::{Error, RealField};

use crate::config::ExperimentConfig;
use crate::error::{io_at, CliError, CliResult};
use crate::presets;
use crate::{EXIT_IDENTITY, EXIT_OK};

/// Refinement order below which a nonzero residual counts as inconsistent.
pub const MIN_ORDER: f64 = 3.5;
/// Residuals below this are exact up to round-off; no order is fitted.
const ROUND_OFF: f64 = 1e-12;
const LEAF_DEFAULT: usize = 8;
const DEFORMATION_AMPLITUDE: f64 = -0.2;
const DEFECT_AMPLITUDE: f64 = 0.01;

#[derive(Debug, Serialize)]
struct Level {
    resolution: usize,
    r1: f64,
    r2: f64,
    j_square: f64,
    lee: f64,
    compatibility: f64,
    symmetry: f64,
    basic: bool,
}

impl Level {
    fn new(
        resolution: usize,
        chart: &VaismanChart,
        inv: &InvariantReport,
        vaisman: bool,
    ) -> CliResult<Self> {
        let (r1, r2) = if vaisman {
            let r = chart.residuals()?;
            (r.r1, r.r2)
        } else {
            (f64::NAN, f64::NAN)
        };
        Ok(Level {
            resolution,
            r1,
            r2,
            j_square: inv.j_square,
            lee: inv.lee,
            compatibility: inv.compatibility,
            symmetry: inv.symmetry,
            basic: inv.basic,
        })
    }
}

#[derive(Debug, Serialize)]
struct Failure {
    identity: String,
    residual: f64,
}

#[derive(Debug, Serialize)]
struct StructureReport {
    levels: Vec<Level>,
    /// `None` when the residuals are at round-off level.
    order: Option<f64>,
    deformation_j_square: Option<f64>,
    injected_defect_r1: Option<f64>,
    failures: Vec<Failure>,
    passed: bool,
}

/// The chart of the preset, or the identity it violates.
fn build(
    config: &ExperimentConfig,
    res: usize,
    leaf: usize,
    failures: &mut Vec<Failure>,
) -> CliResult<Option<VaismanChart>> {
    match presets::chart(config, res, leaf) {
        Ok(c) => Ok(Some(c)),
        Err(Error::IdentityViolation { identity, residual }) => {
            failures.push(Failure {
                identity: format!("{identity} (N = {res})"),
                residual,
            });
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn check_invariants(inv: &InvariantReport, label: &str, failures: &mut Vec<Failure>) {
    if let Some((identity, residual)) = inv.failure() {
        failures.push(Failure {
            identity: format!("{identity} ({label})"),
            residual,
        });
    }
}

/// Invariant suite at `N` and `2N`, the deformation by `−0.2 cos(kx¹)` and
/// an optional injected `dω − θ∧ω` defect; writes `structure.json`.
pub fn check_structure(config_path: &Path) -> CliResult<i32> {
    let config = ExperimentConfig::load(config_path)?;
    let checks = &config.checks;
    let leaf = config.chart.leaf_resolution.unwrap_or(LEAF_DEFAULT);
    let resolutions = [config.chart.resolution, 2 * config.chart.resolution];
    let mut failures = Vec::new();
    let mut levels = Vec::new();
    let mut fine = None;
    for res in resolutions {
        let Some(chart) = build(&config, res, leaf, &mut failures)? else {
            continue;
        };
        let inv = chart.invariants()?;
        check_invariants(&inv, &format!("N = {res}"), &mut failures);
        let level = Level::new(res, &chart, &inv, checks.vaisman)?;
        log::info!(
            "N = {res}: r1 = {:e}, r2 = {:e}, J² defect = {:e}",
            level.r1,
            level.r2,
            level.j_square
        );
        levels.push(level);
        fine = Some(chart);
    }

    let mut order = None;
    if checks.vaisman && levels.len() == 2 {
        let r1: Vec<f64> = levels.iter().map(|l| l.r1).collect();
        if r1[1] > checks.tolerance {
            failures.push(Failure {
                identity: "d omega = theta ^ omega".into(),
                residual: r1[1],
            });
        }
        if r1[0] > ROUND_OFF {
            let spacings: Vec<f64> = resolutions
                .iter()
                .map(|&r| config.chart.period / r as f64)
                .collect();
            let p = fitted_order(&spacings, &r1);
            log::info!("fitted order {p:.3}");
            if !(p >= MIN_ORDER) {
                failures.push(Failure {
                    identity: "d omega = theta ^ omega (refinement order)".into(),
                    residual: p,
                });
            }
            order = Some(p);
        }
    }

    let mut deformation_j_square = None;
    let mut injected_defect_r1 = None;
    if let Some(chart) = &fine {
        let spec = chart.spec().clone();
        if checks.deformation {
            let k = 2.0 * PI / spec.period(0);
            let phi = RealField::from_fn(&spec, true, |x| DEFORMATION_AMPLITUDE * (k * x[0]).cos());
            match chart.deform(&phi) {
                Ok(deformed) => {
                    let inv = deformed.invariants()?;
                    check_invariants(&inv, "after deformation", &mut failures);
                    log::info!("deformed: J² defect = {:e}", inv.j_square);
                    deformation_j_square = Some(inv.j_square);
                }
                Err(e) => failures.push(Failure {
                    identity: format!("deformation: {e}"),
                    residual: f64::INFINITY,
                }),
            }
        }
        if checks.inject_defect {
            let kl = 2.0 * PI / spec.period(spec.leaf_x_axis());
            let leaf_x = spec.leaf_x_axis();
            let bump =
                RealField::from_fn(&spec, false, |x| DEFECT_AMPLITUDE * (kl * x[leaf_x]).sin());
            let mut defect = CoefficientForm::zero(&spec, 2);
            defect.accumulate(&[0, 1], ChartFn::periodic(bump))?;
            let r1 = verify_vaisman(&chart.omega().add(&defect)?, chart.theta())?.r1;
            log::info!("injected defect: r1 = {r1:e}");
            if r1 > checks.tolerance {
                failures.push(Failure {
                    identity: "d omega = theta ^ omega (injected defect)".into(),
                    residual: r1,
                });
            }
            injected_defect_r1 = Some(r1);
        }
    }

    let passed = failures.is_empty();
    let report = StructureReport {
        levels,
        order,
        deformation_j_square,
        injected_defect_r1,
        failures,
        passed,
    };
    let dir = &config.output.directory;
    fs::create_dir_all(dir).map_err(io_at(dir))?;
    let out = dir.join("structure.json");
    let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Input(e.to_string()))?;
    fs::write(&out, text).map_err(io_at(&out))?;
    for f in &report.failures {
        eprintln!(
            "identity violated: {} (residual {:e})",
            f.identity, f.residual
        );
    }
    Ok(if passed { EXIT_OK } else { EXIT_IDENTITY })
}
