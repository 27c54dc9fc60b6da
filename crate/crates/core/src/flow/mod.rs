//! Transverse Kähler–Ricci flow as a parabolic complex Monge–Ampère equation
//! for a potential `φ`, with `ω(t) = ω̂(t) + i∂∂̄φ(t)`.
//!
//! Unrescaled flow (`∂ω/∂t = −Ric ω`): `ω̂(t) = ω̂₀ + tχ` and
//! `∂φ/∂t = log det(ω̂(t) + φ_{jk̄}) − log ρ`, where `ρ` is the density of the
//! volume form with `i∂∂̄ log ρ = χ`. Rescaled flow (`∂ω/∂t = −Ric ω − ω`):
//! `ω̂(t) = e^{−t}ω̂₀ + (1 − e^{−t})χ` and the right-hand side gains `−φ`.

mod config;
mod volume;

use std::io::Write;

use serde::Serialize;

pub use config::FlowConfig;
pub use volume::{build_volume_form, VolumeForm};

use crate::error::{Error, Result};
use crate::grid::{fd_d1d1, fd_derivative, RealField};
use crate::transverse::{ddbar, ricci, HermitianField};

const DT_FLOOR: f64 = 1e-12;
const DIVERGENCE_FACTOR: f64 = 1e6;
/// Leaf step bound as a fraction of `h_leaf²` (RK4 stability for `½Δ_leaf`).
const LEAF_DT_FRACTION: f64 = 0.25;

pub const HISTORY_HEADER: &str = "step,t,dt,ricci_sup,dphidt_sup,min_eig,max_eig,leafwise_defect";

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub ricci_sup: f64,
    pub dphidt_sup: f64,
    pub min_eig: f64,
    pub max_eig: f64,
    pub leafwise_defect: f64,
}

#[derive(Clone, Debug)]
struct Evaluation {
    rhs: RealField,
    /// Left out by the scalar fast path; rebuilt on demand for diagnostics.
    metric: Option<HermitianField>,
    /// The `1×1` metric of the scalar path.
    scalar_metric: Option<RealField>,
    min_eig: f64,
    max_eig: f64,
}

#[derive(Clone, Debug)]
pub struct FlowState {
    pub t: f64,
    pub phi: RealField,
    pub omega_hat_0: HermitianField,
    pub chi: HermitianField,
    pub volume: VolumeForm,
    pub diagnostics: Diagnostics,
}

impl FlowState {
    /// Initial state at `t = 0` with `φ₀ = 0`.
    pub fn new(omega_hat_0: HermitianField, chi: HermitianField) -> Result<Self> {
        let phi = RealField::zeros(omega_hat_0.spec(), true);
        Self::with_phi(omega_hat_0, chi, phi)
    }

    pub fn with_phi(
        omega_hat_0: HermitianField,
        chi: HermitianField,
        phi: RealField,
    ) -> Result<Self> {
        if **phi.spec() != **omega_hat_0.spec() {
            return Err(Error::SpecMismatch(
                "φ and ω̂₀ live on different grids".into(),
            ));
        }
        let volume = build_volume_form(&omega_hat_0, &chi)?;
        Ok(FlowState {
            t: 0.0,
            phi,
            omega_hat_0,
            chi,
            volume,
            diagnostics: Diagnostics::default(),
        })
    }

    /// The evolving transverse metric `ω̂(t) + i∂∂̄φ`.
    pub fn metric(&self, config: &FlowConfig) -> Result<HermitianField> {
        reference(self, self.t, config.rescaled)?.add(&ddbar(&self.phi)?)
    }
}

/// `ω̂(t) = ω̂₀ + tχ`.
pub fn reference_form(state: &FlowState, t: f64) -> Result<HermitianField> {
    state.omega_hat_0.combine(1.0, &state.chi, t)
}

/// `e^{−t}ω̂₀ + (1 − e^{−t})χ`, the reference form of the rescaled flow.
pub fn rescaled_reference_form(state: &FlowState, t: f64) -> Result<HermitianField> {
    let e = (-t).exp();
    state.omega_hat_0.combine(e, &state.chi, 1.0 - e)
}

fn reference(state: &FlowState, t: f64, rescaled: bool) -> Result<HermitianField> {
    if rescaled {
        rescaled_reference_form(state, t)
    } else {
        reference_form(state, t)
    }
}

fn leaf_laplacian(phi: &RealField) -> Result<RealField> {
    let spec = phi.spec();
    fd_derivative(phi, spec.leaf_x_axis(), 2)?.add(&fd_derivative(phi, spec.leaf_y_axis(), 2)?)
}

fn evaluate(state: &FlowState, t: f64, phi: &RealField, config: &FlowConfig) -> Result<Evaluation> {
    evaluate_terms(state, t, phi, config, config.extended, config.rescaled)
}

fn evaluate_terms(
    state: &FlowState,
    t: f64,
    phi: &RealField,
    config: &FlowConfig,
    leaf_term: bool,
    damping_term: bool,
) -> Result<Evaluation> {
    if leaf_term && !phi.spec().is_full() {
        return Err(Error::InvalidConfig(
            "extended: the grid has no leaf axes".into(),
        ));
    }
    let reference = reference(state, t, config.rescaled)?;
    let log_density = &state.volume.log_density;
    let broadcast_only = !phi.is_basic() || (reference.is_basic() && log_density.is_basic());
    if phi.spec().n == 1 && broadcast_only {
        scalar_terms(
            &reference,
            log_density,
            phi,
            config,
            leaf_term,
            damping_term,
        )
    } else {
        matrix_terms(
            &reference,
            log_density,
            phi,
            config,
            leaf_term,
            damping_term,
        )
    }
}

fn matrix_terms(
    reference: &HermitianField,
    log_density: &RealField,
    phi: &RealField,
    config: &FlowConfig,
    leaf_term: bool,
    damping_term: bool,
) -> Result<Evaluation> {
    let metric = reference.add(&ddbar(phi)?)?;
    let (min_eig, max_eig, point) = metric.eigen_range();
    if !(min_eig > config.positivity_floor) {
        return Err(Error::PositivityLost { point, min_eig });
    }
    let mut rhs = metric.log_det()?.sub(log_density)?;
    if leaf_term {
        rhs = rhs.zip_with(&leaf_laplacian(phi)?, |r, l| r + 0.5 * l)?;
    }
    if damping_term {
        rhs = rhs.sub(phi)?;
    }
    Ok(Evaluation {
        rhs,
        metric: Some(metric),
        scalar_metric: None,
        min_eig,
        max_eig,
    })
}

/// `n = 1` in a single pass over the grid, without forming the metric field.
/// Performs the same floating-point operations as [`matrix_terms`].
fn scalar_terms(
    reference: &HermitianField,
    log_density: &RealField,
    phi: &RealField,
    config: &FlowConfig,
    leaf_term: bool,
    damping_term: bool,
) -> Result<Evaluation> {
    let (dxx, dyy) = (fd_d1d1(phi, 0, 0)?, fd_d1d1(phi, 1, 1)?);
    let lap = if leaf_term {
        Some(leaf_laplacian(phi)?)
    } else {
        None
    };
    let spec = phi.spec();
    let ll = if phi.is_basic() { 1 } else { spec.leaf_len() };
    let (r_step, d_step) = (
        usize::from(!reference.is_basic()),
        usize::from(!log_density.is_basic()),
    );
    let (refd, lrho, f) = (reference.data(), log_density.values(), phi.values());
    let (a, b) = (dxx.values(), dyy.values());
    let mut rhs = Vec::with_capacity(f.len());
    let mut metric = Vec::with_capacity(f.len());
    let (mut lo, mut hi, mut point) = (f64::INFINITY, f64::NEG_INFINITY, 0);
    for p in 0..f.len() {
        let q = p / ll;
        let g = refd[q + r_step * (p - q)].re + 0.25 * (a[p] + b[p]);
        if g < lo {
            (lo, point) = (g, p);
        }
        hi = hi.max(g);
        let mut r = g.ln() - lrho[q + d_step * (p - q)];
        if let Some(lap) = &lap {
            r += 0.5 * lap.values()[p];
        }
        if damping_term {
            r -= f[p];
        }
        rhs.push(r);
        metric.push(g);
    }
    if !(lo > config.positivity_floor) {
        return Err(Error::PositivityLost { point, min_eig: lo });
    }
    Ok(Evaluation {
        rhs: phi.with_values(rhs),
        metric: None,
        scalar_metric: Some(phi.with_values(metric)),
        min_eig: lo,
        max_eig: hi,
    })
}

/// `log det(ω̂(t) + φ_{jk̄}) − log ρ` at the state's time.
///
/// The reference form follows `config.rescaled`; the leaf term and the `−φ`
/// term of the rescaled flow are not included.
pub fn ma_rhs(state: &FlowState, config: &FlowConfig) -> Result<RealField> {
    Ok(evaluate_terms(state, state.t, &state.phi, config, false, false)?.rhs)
}

/// [`ma_rhs`] plus the leafwise Laplacian `½(∂²φ/∂x² + ∂²φ/∂y²)`.
///
/// For non-basic `φ` the transverse Hessian is taken at fixed leaf coordinates.
pub fn ma_rhs_extended(state: &FlowState, config: &FlowConfig) -> Result<RealField> {
    Ok(evaluate_terms(state, state.t, &state.phi, config, true, false)?.rhs)
}

/// Full right-hand side `∂φ/∂t` for the configured equation.
pub fn flow_rhs(state: &FlowState, config: &FlowConfig) -> Result<RealField> {
    Ok(evaluate(state, state.t, &state.phi, config)?.rhs)
}

/// `sup|∂φ/∂x| + sup|∂φ/∂y|` along the leaves.
pub fn leafwise_defect(state: &FlowState) -> Result<f64> {
    let phi = &state.phi;
    let spec = phi.spec();
    if !spec.is_full() {
        return Err(Error::InvalidConfig(
            "leafwise defect needs leaf axes".into(),
        ));
    }
    if phi.is_basic() {
        return Ok(0.0);
    }
    Ok(fd_derivative(phi, spec.leaf_x_axis(), 1)?.sup_norm()
        + fd_derivative(phi, spec.leaf_y_axis(), 1)?.sup_norm())
}

/// One classical RK4 step for `y' = f(t, y)`. `k1` may be supplied when already known.
pub fn rk4_step(
    y: &RealField,
    t: f64,
    dt: f64,
    k1: Option<RealField>,
    mut f: impl FnMut(f64, &RealField) -> Result<RealField>,
) -> Result<RealField> {
    let axpy = |a: f64, k: &RealField| y.zip_with(k, |u, v| u + a * v);
    let k1 = match k1 {
        Some(k) => k,
        None => f(t, y)?,
    };
    let k2 = f(t + 0.5 * dt, &axpy(0.5 * dt, &k1)?)?;
    let k3 = f(t + 0.5 * dt, &axpy(0.5 * dt, &k2)?)?;
    let k4 = f(t + dt, &axpy(dt, &k3)?)?;
    let incr = k1
        .zip_with(&k2, |a, b| a + 2.0 * b)?
        .zip_with(&k3, |a, c| a + 2.0 * c)?
        .zip_with(&k4, |a, d| a + d)?;
    let s = dt / 6.0;
    y.zip_with(&incr, |u, v| u + s * v)
}

/// Step size from the diffusive stability bound of the current metric.
pub fn stable_dt(state: &FlowState, config: &FlowConfig, min_eig: f64, max_eig: f64) -> f64 {
    let spec = state.phi.spec();
    let h = spec.min_transverse_spacing();
    let mut bound = h * h * min_eig * min_eig / max_eig;
    if config.extended {
        if let Some(hl) = spec.min_leaf_spacing() {
            bound = bound.min(LEAF_DT_FRACTION * hl * hl);
        }
    }
    config.dt_initial.min(config.dt_safety * bound)
}

fn diagnostics_of(
    state: &FlowState,
    eval: &Evaluation,
    config: &FlowConfig,
) -> Result<Diagnostics> {
    let k = f64::from(config.class_k);
    let ricci_sup = match (&eval.scalar_metric, &eval.metric) {
        (Some(g), _) => scalar_ricci_residual(g, k)?,
        (None, Some(m)) => ricci(m)?.combine(1.0, m, -k)?.sup_norm(),
        (None, None) => {
            let m = state.metric(config)?;
            ricci(&m)?.combine(1.0, &m, -k)?.sup_norm()
        }
    };
    let leafwise_defect = if state.phi.spec().is_full() {
        leafwise_defect(state)?
    } else {
        0.0
    };
    Ok(Diagnostics {
        ricci_sup,
        dphidt_sup: eval.rhs.sup_norm(),
        min_eig: eval.min_eig,
        max_eig: eval.max_eig,
        leafwise_defect,
    })
}

/// `sup|Ric − kg|` for a positive `1×1` metric, `Ric = −¼(∂²ₓ + ∂²ᵧ) log g`.
fn scalar_ricci_residual(g: &RealField, k: f64) -> Result<f64> {
    let log_g = g.map(f64::ln);
    let (a, b) = (fd_d1d1(&log_g, 0, 0)?, fd_d1d1(&log_g, 1, 1)?);
    let mut sup = 0.0f64;
    for ((&a, &b), &g) in a.values().iter().zip(b.values()).zip(g.values()) {
        sup = sup.max((-(0.25 * (a + b)) - g * k).abs());
    }
    Ok(sup)
}

fn prepare(state: &FlowState, config: &FlowConfig) -> Result<(FlowState, Evaluation)> {
    config.validate()?;
    let mut state = state.clone();
    if config.extended && state.phi.is_basic() {
        if !state.phi.spec().is_full() {
            return Err(Error::InvalidConfig(
                "extended: the grid has no leaf axes".into(),
            ));
        }
        state.phi = state.phi.to_full();
    }
    let eval = evaluate(&state, state.t, &state.phi, config)?;
    state.diagnostics = diagnostics_of(&state, &eval, config)?;
    Ok((state, eval))
}

/// Fills in the diagnostics of a state that has not been stepped yet.
///
/// For the extended flow a basic `φ` is also broadcast onto the leaf axes.
pub fn initialize(state: &mut FlowState, config: &FlowConfig) -> Result<()> {
    *state = prepare(state, config)?.0;
    Ok(())
}

/// Advances by one adaptive RK4 step. Returns the new state and the step used.
pub fn step(state: &FlowState, config: &FlowConfig) -> Result<(FlowState, f64)> {
    step_with_limit(state, config, f64::INFINITY)
}

/// As [`step`], with `dt` additionally capped by `dt_max` (for landing on sample times).
pub fn step_with_limit(
    state: &FlowState,
    config: &FlowConfig,
    dt_max: f64,
) -> Result<(FlowState, f64)> {
    let (current, first) = prepare(state, config)?;
    let (next, dt, _) = step_from(&current, first, config, dt_max)?;
    Ok((next, dt))
}

fn step_from(
    current: &FlowState,
    first: Evaluation,
    config: &FlowConfig,
    dt_max: f64,
) -> Result<(FlowState, f64, Evaluation)> {
    let mut dt = stable_dt(current, config, first.min_eig, first.max_eig).min(dt_max);
    loop {
        if dt < DT_FLOOR {
            return Err(Error::StepFloor { dt });
        }
        let attempt = rk4_step(
            &current.phi,
            current.t,
            dt,
            Some(first.rhs.clone()),
            |t, phi| Ok(evaluate(current, t, phi, config)?.rhs),
        )
        .and_then(|phi| {
            let phi = phi.shift(-phi.mean());
            let eval = evaluate(current, current.t + dt, &phi, config)?;
            Ok((phi, eval))
        });
        match attempt {
            Ok((phi, eval)) => {
                let mut next = FlowState {
                    t: current.t + dt,
                    phi,
                    ..current.clone()
                };
                next.diagnostics = diagnostics_of(&next, &eval, config)?;
                return Ok((next, dt, eval));
            }
            Err(Error::PositivityLost { point, min_eig }) => {
                log::debug!(
                    "positivity lost at point {point} (λ = {min_eig:e}); halving dt = {dt:e}"
                );
                dt *= 0.5;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Steps until `t_target` is reached exactly.
pub fn advance_to(state: &FlowState, config: &FlowConfig, t_target: f64) -> Result<FlowState> {
    let (mut s, mut eval) = prepare(state, config)?;
    while t_target - s.t > 1e-14 * t_target.abs().max(1.0) {
        let (next, _, e) = step_from(&s, eval, config, t_target - s.t)?;
        s = next;
        eval = e;
    }
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HistoryRow {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub ricci_sup: f64,
    pub dphidt_sup: f64,
    pub min_eig: f64,
    pub max_eig: f64,
    pub leafwise_defect: f64,
}

impl HistoryRow {
    fn new(step: usize, t: f64, dt: f64, d: &Diagnostics) -> Self {
        HistoryRow {
            step,
            t,
            dt,
            ricci_sup: d.ricci_sup,
            dphidt_sup: d.dphidt_sup,
            min_eig: d.min_eig,
            max_eig: d.max_eig,
            leafwise_defect: d.leafwise_defect,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FlowOutcome {
    Converged,
    NotConverged,
    PositivityLost { point: usize, min_eig: f64 },
    StepFloor { dt: f64 },
    Diverged { max_eig: f64 },
}

#[derive(Clone, Debug)]
pub struct FlowReport {
    pub outcome: FlowOutcome,
    pub converged: bool,
    pub final_t: f64,
    pub steps: usize,
    pub history: Vec<HistoryRow>,
    pub final_state: FlowState,
}

#[derive(Serialize)]
struct ReportSummary<'a> {
    outcome: &'a FlowOutcome,
    converged: bool,
    final_t: f64,
    steps: usize,
    final_diagnostics: &'a Diagnostics,
}

impl FlowReport {
    pub fn summary_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ReportSummary {
            outcome: &self.outcome,
            converged: self.converged,
            final_t: self.final_t,
            steps: self.steps,
            final_diagnostics: &self.final_state.diagnostics,
        })?)
    }
}

/// Writes history rows as CSV with [`HISTORY_HEADER`].
pub fn write_history<W: Write>(rows: &[HistoryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs until the Ricci residual `sup|Ric ω − kω|` drops below tolerance,
/// the metric degenerates or blows up, or `max_steps` is exhausted.
///
/// `on_step` sees every accepted state (for checkpoints).
pub fn run_with(
    initial: &FlowState,
    config: &FlowConfig,
    mut on_step: impl FnMut(usize, &FlowState) -> Result<()>,
) -> Result<FlowReport> {
    let (mut state, mut eval) = prepare(initial, config)?;
    let initial_max = state.diagnostics.max_eig;
    let mut history = vec![HistoryRow::new(0, state.t, 0.0, &state.diagnostics)];
    let finish = |outcome: FlowOutcome, state: FlowState, history: Vec<HistoryRow>| {
        let converged = outcome == FlowOutcome::Converged;
        FlowReport {
            outcome,
            converged,
            final_t: state.t,
            steps: history.len() - 1,
            history,
            final_state: state,
        }
    };
    if state.diagnostics.ricci_sup < config.ricci_tolerance {
        return Ok(finish(FlowOutcome::Converged, state, history));
    }
    for k in 1..=config.max_steps {
        let (next, dt, e) = match step_from(&state, eval, config, f64::INFINITY) {
            Ok(r) => r,
            Err(Error::PositivityLost { point, min_eig }) => {
                return Ok(finish(
                    FlowOutcome::PositivityLost { point, min_eig },
                    state,
                    history,
                ))
            }
            Err(Error::StepFloor { dt }) => {
                return Ok(finish(FlowOutcome::StepFloor { dt }, state, history))
            }
            Err(e) => return Err(e),
        };
        state = next;
        eval = e;
        history.push(HistoryRow::new(k, state.t, dt, &state.diagnostics));
        on_step(k, &state)?;
        if state.diagnostics.ricci_sup < config.ricci_tolerance {
            return Ok(finish(FlowOutcome::Converged, state, history));
        }
        if state.diagnostics.max_eig > DIVERGENCE_FACTOR * initial_max {
            let max_eig = state.diagnostics.max_eig;
            return Ok(finish(FlowOutcome::Diverged { max_eig }, state, history));
        }
    }
    Ok(finish(FlowOutcome::NotConverged, state, history))
}

pub fn run(initial: &FlowState, config: &FlowConfig) -> Result<FlowReport> {
    run_with(initial, config, |_, _| Ok(()))
}
