use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use vaisman_core::flow::{self, FlowOutcome};
use vaisman_core::Snapshot;

use crate::config::ExperimentConfig;
use crate::error::{io_at, CliResult};
use crate::presets;
use crate::{EXIT_NOT_CONVERGED, EXIT_OK, EXIT_UNSTABLE};

/// Runs the configured flow and writes `history.csv`, `report.json`,
/// `final_phi.json`, `final_metric.json` and optional checkpoints.
pub fn flow(config_path: &Path) -> CliResult<i32> {
    let config = ExperimentConfig::load(config_path)?;
    let initial = presets::initial_state(&config)?;
    let dir = &config.output.directory;
    fs::create_dir_all(dir).map_err(io_at(dir))?;
    let every = config.output.checkpoint_every;
    let checkpoints = dir.join("checkpoints");
    if every > 0 {
        fs::create_dir_all(&checkpoints).map_err(io_at(&checkpoints))?;
    }

    log::info!(
        "flow on {} points",
        initial.phi.spec().len(!config.flow.extended)
    );
    let report = flow::run_with(&initial, &config.flow, |k, state| {
        if every > 0 && k % every == 0 {
            log::debug!(
                "step {k}: t = {:.6}, ricci_sup = {:e}",
                state.t,
                state.diagnostics.ricci_sup
            );
            Snapshot::from_real(&state.phi).save(&checkpoints.join(format!("phi_{k:06}.json")))?;
        }
        Ok(())
    })?;

    let history = dir.join("history.csv");
    flow::write_history(
        &report.history,
        BufWriter::new(File::create(&history).map_err(io_at(&history))?),
    )?;
    let summary = dir.join("report.json");
    fs::write(&summary, report.summary_json()?).map_err(io_at(&summary))?;
    let state = &report.final_state;
    Snapshot::from_real(&state.phi).save(&dir.join("final_phi.json"))?;
    Snapshot::from_hermitian(&state.metric(&config.flow)?).save(&dir.join("final_metric.json"))?;

    let d = &state.diagnostics;
    log::info!(
        "{:?} after {} steps: t = {:.6}, ricci_sup = {:e}, eigenvalues in [{:.6}, {:.6}]",
        report.outcome,
        report.steps,
        report.final_t,
        d.ricci_sup,
        d.min_eig,
        d.max_eig
    );
    Ok(match report.outcome {
        FlowOutcome::Converged => EXIT_OK,
        FlowOutcome::NotConverged => EXIT_NOT_CONVERGED,
        FlowOutcome::PositivityLost { .. }
        | FlowOutcome::StepFloor { .. }
        | FlowOutcome::Diverged { .. } => EXIT_UNSTABLE,
    })
}
