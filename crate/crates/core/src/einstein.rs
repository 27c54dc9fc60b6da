//! Ricci tensor of a Vaisman metric assembled from its transverse Ricci form,
//! and the quasi-Einstein, Einstein–Weyl and P₀K identities built on it.
//!
//! Components are taken in the frame `{X_j, X̄_j, U, V}` with `g(U,U) = g(V,V) = 1`
//! and `θ(U) = θᶜ(V) = 1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::RealField;
use crate::transverse::{ricci, HermitianField};
use crate::vaisman::VaismanChart;

/// Tolerance for the post-fit constraints `λ + α = n/2`, `β = −λ`.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-8;

/// `Ric` in block form: the `Q` block plus the `U`/`V` diagonal; the mixed
/// blocks vanish because `U` is parallel.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockRicci {
    pub q_block: HermitianField,
    /// `Ric(V, V)`
    pub vv_value: f64,
    /// `Ric(U, U)`
    pub uu_value: f64,
    pub cross_blocks_zero: bool,
}

/// `Ric|_Q = Ric^T − ½g^T`, `Ric(V,V) = n/2`, `Ric(U,·) = 0`.
pub fn assemble_full_ricci(
    ricci_t: &HermitianField,
    g_t: &HermitianField,
    n: usize,
) -> Result<BlockRicci> {
    if ricci_t.n() != n || g_t.n() != n {
        return Err(Error::SpecMismatch(format!(
            "expected {n}×{n} transverse blocks"
        )));
    }
    Ok(BlockRicci {
        q_block: ricci_t.combine(1.0, g_t, -0.5)?,
        vv_value: n as f64 / 2.0,
        uu_value: 0.0,
        cross_blocks_zero: true,
    })
}

/// Coefficients of `Ric ≈ λg + αθᶜ⊗θᶜ + βθ⊗θ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EinsteinFit {
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Sup over frame components of `|Ric − λg − αθᶜ⊗θᶜ − βθ⊗θ|`.
    pub residual: f64,
}

impl EinsteinFit {
    pub fn constraints_ok(&self, n: usize) -> bool {
        let half = n as f64 / 2.0;
        (self.lambda + self.alpha - half).abs() <= CONSTRAINT_TOLERANCE
            && (self.beta + self.lambda).abs() <= CONSTRAINT_TOLERANCE
    }
}

/// `sup |q − c·g|` over points and entries.
fn block_deviation(q: &HermitianField, g: &HermitianField, c: f64) -> Result<f64> {
    q.combine(1.0, g, -c).map(|d| d.sup_norm())
}

/// Ordinary least squares over all frame components with equal weights.
///
/// `α` and `β` enter only the `V` and `U` diagonal entries, so the fit solves
/// those exactly and `λ` is the `Q`-block projection `⟨g, q⟩ / ⟨g, g⟩`. The
/// constraints are checked afterwards, never imposed.
pub fn quasi_einstein_fit(
    ric: &BlockRicci,
    g_t: &HermitianField,
    _n: usize,
) -> Result<EinsteinFit> {
    let q = &ric.q_block;
    if q.points() != g_t.points() {
        return Err(Error::SpecMismatch(
            "Ricci block and metric live on different grids".into(),
        ));
    }
    let (mut gq, mut gg) = (0.0, 0.0);
    for (a, b) in g_t.data().iter().zip(q.data()) {
        gq += (a.conj() * b).re;
        gg += a.norm_sqr();
    }
    if !(gg > 0.0) {
        return Err(Error::SingularMatrix { point: 0 });
    }
    let lambda = gq / gg;
    let alpha = ric.vv_value - lambda;
    let beta = ric.uu_value - lambda;
    let residual = block_deviation(q, g_t, lambda)?;
    Ok(EinsteinFit {
        lambda,
        alpha,
        beta,
        residual,
    })
}

/// Sup-norm of `Ric^D = Ric + (n/2)θ⊗θ − (n/2)g` over frame components.
pub fn weyl_ricci_residual(ric: &BlockRicci, g_t: &HermitianField, n: usize) -> Result<f64> {
    let half = n as f64 / 2.0;
    let q = block_deviation(&ric.q_block, g_t, half)?;
    Ok(q.max((ric.vv_value - half).abs()).max(ric.uu_value.abs()))
}

/// Einstein constant whose `Q`-homothety has `Ric|_Q = (n/2)g̃|_Q`:
/// `a = (2λ + 1)/(n + 1)`.
pub fn ke_homothety(lambda: f64, n: usize) -> Result<f64> {
    if !(lambda > -0.5) {
        return Err(Error::DegenerateScale { lambda });
    }
    Ok((2.0 * lambda + 1.0) / (n as f64 + 1.0))
}

/// `Ric|_Q` factor against `g̃` after a homothety by `a` of a quasi-Einstein
/// metric with constant `λ`.
pub fn homothety_factor(lambda: f64, a: f64) -> f64 {
    (2.0 * lambda + 1.0 - a) / (2.0 * a)
}

/// Block Ricci of `g̃ = ag + (a² − a)(θᶜ⊗θᶜ + θ⊗θ)` together with `g̃^T = ag^T`.
///
/// `Ric^T` is unchanged by the homothety, so `Ric_{g̃}|_Q = Ric^T − ½g̃^T`.
pub fn homothety_blocks(
    ricci_t: &HermitianField,
    g_t: &HermitianField,
    a: f64,
    n: usize,
) -> Result<(BlockRicci, HermitianField)> {
    if !(a > 0.0) {
        return Err(Error::NonPositiveScale(a));
    }
    let g_tilde = g_t.scale(a);
    Ok((assemble_full_ricci(ricci_t, &g_tilde, n)?, g_tilde))
}

/// [`homothety_blocks`] on a chart: `g̃^T` is read off the deformed metric
/// tensor in the adapted frame and `Ric^T` from the chart's transverse metric.
pub fn apply_homothety(chart: &VaismanChart, a: f64) -> Result<(BlockRicci, HermitianField)> {
    let n = chart.spec().n;
    let g_tilde = chart.q_homothety(a)?.transverse_block(&chart.frame()?)?;
    let ricci_t = ricci(&chart.transverse_metric()?)?;
    Ok((assemble_full_ricci(&ricci_t, &g_tilde, n)?, g_tilde))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct P0kCheck {
    pub holds: bool,
    pub residual: f64,
}

/// Residual of `Ric = (n‖θ‖²/2)g − (n/2)θ⊗θ`.
pub fn p0k_check(
    ric: &BlockRicci,
    g_t: &HermitianField,
    n: usize,
    lee_norm: f64,
) -> Result<P0kCheck> {
    if !(lee_norm > 0.0) {
        return Err(Error::NonPositiveScale(lee_norm));
    }
    let half = n as f64 / 2.0;
    let c = half * lee_norm * lee_norm;
    // θ(U) = ‖θ‖ for unit U, θ(V) = 0.
    let uu = c - half * lee_norm * lee_norm;
    let q = block_deviation(&ric.q_block, g_t, c)?;
    let residual = q
        .max((ric.vv_value - c).abs())
        .max((ric.uu_value - uu).abs());
    Ok(P0kCheck {
        holds: residual < CONSTRAINT_TOLERANCE,
        residual,
    })
}

/// `s = 2nλ + n/2`.
pub fn scalar_curvature_relation(lambda: f64, n: usize) -> f64 {
    let n = n as f64;
    2.0 * n * lambda + n / 2.0
}

/// Pointwise frame trace `2·tr(g⁻¹q) + Ric(V,V) + Ric(U,U)`.
pub fn frame_trace(ric: &BlockRicci, g_t: &HermitianField) -> Result<RealField> {
    Ok(g_t
        .trace_against(&ric.q_block)?
        .scale(2.0)
        .shift(ric.vv_value + ric.uu_value))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitReport {
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
    pub residual: f64,
    pub constraints_ok: bool,
    pub weyl_residual: f64,
    /// `None` when `λ ≤ −½`.
    pub homothety_a: Option<f64>,
}

pub fn fit_report(ric: &BlockRicci, g_t: &HermitianField, n: usize) -> Result<FitReport> {
    let fit = quasi_einstein_fit(ric, g_t, n)?;
    Ok(FitReport {
        lambda: fit.lambda,
        alpha: fit.alpha,
        beta: fit.beta,
        residual: fit.residual,
        constraints_ok: fit.constraints_ok(n),
        weyl_residual: weyl_ricci_residual(ric, g_t, n)?,
        homothety_a: ke_homothety(fit.lambda, n).ok(),
    })
}

/// Fit report of the Vaisman metric with transverse part `g_t`.
pub fn analyze_transverse_metric(g_t: &HermitianField) -> Result<FitReport> {
    let n = g_t.n();
    let ric = assemble_full_ricci(&ricci(g_t)?, g_t, n)?;
    fit_report(&ric, g_t, n)
}
