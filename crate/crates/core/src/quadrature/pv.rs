//! Principal values on the half-line by symmetric pairing.
//!
//! For an integrand `g` with a non-integrable point `x0 > 0`,
//!
//! ```text
//! PV ∫_0^∞ g = ∫_0^{x0} [g(x0 + t) + g(x0 - t)] dt + ∫_{2 x0}^∞ g(y) dy .
//! ```
//!
//! The paired integrand is integrable whenever the odd part of the
//! singularity cancels, which is exactly what symmetric excision
//! `|y - x0| > ε` assumes. No `ε` appears anywhere.

use super::{power_tail_bound, refine, tail_cut, Abscissa, Accum, Engine, GaussLegendre, Grading};
use super::{EnergyReport, QuadConfig};
use crate::error::{Error, Result};

/// Where to stop the remainder integral and what that truncation costs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailCut {
    pub at: f64,
    /// Bound on the neglected tail, added to the error estimate.
    pub bound: f64,
}

impl TailCut {
    /// Cut for an integrand bounded by `coefficient * y^(-decay_exponent)`
    /// beyond the core, chosen so the neglected part is at most `tol`.
    pub fn for_power_decay(decay_exponent: f64, coefficient: f64, tol: f64) -> Result<Self> {
        let at = tail_cut(decay_exponent, coefficient, tol)?;
        Ok(TailCut {
            at,
            bound: power_tail_bound(decay_exponent, coefficient, at),
        })
    }

    /// An explicit cut with a caller-supplied bound.
    pub fn at(at: f64, bound: f64) -> Self {
        TailCut { at, bound }
    }
}

/// Local behaviour of the integrand near the excised point and the origin.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PvShape {
    /// `g(x0 + t) + g(x0 - t) ~ t^pair_exponent` as `t -> 0`.
    pub pair_exponent: f64,
    /// `g(y) ~ y^origin_exponent` as `y -> 0`.
    pub origin_exponent: f64,
}

/// `lim_{ε→0} ∫_{(0,∞), |y - x0| > ε} g(y) dy`.
///
/// The integrand receives `(y, y - x0)` with the offset computed exactly, so
/// that cancellations near `x0` can be done in closed form by the caller.
pub fn principal_value_halfline<G: Fn(f64, f64) -> f64>(
    g: G,
    x0: f64,
    tail: TailCut,
    shape: PvShape,
    cfg: &QuadConfig,
) -> Result<EnergyReport> {
    cfg.validate()?;
    check_shape(x0, &shape)?;
    let gl = GaussLegendre::new(cfg.panel_order);
    let core_left = Grading::singular(shape.pair_exponent, f64::INFINITY);
    let core_right = Grading::singular(shape.origin_exponent, f64::INFINITY);
    let report = refine(cfg, |levels| {
        let engine = Engine::new(&gl, cfg, levels);
        let mut paired = |p: Abscissa| {
            let t = p.from_left;
            g(x0 + t, t) + g(p.from_right, -t)
        };
        let mut acc = engine.interval(0.0, x0, core_left, core_right, &mut paired);
        acc.merge(remainder(&engine, &g, x0, tail.at));
        Ok(acc)
    })?;
    Ok(EnergyReport {
        error_estimate: report.error_estimate + tail.bound,
        ..report
    })
}

/// The unpaired excised integral `∫_{(0,∞), |y - x0| > eps} g(y) dy`.
///
/// Only useful as a cross-check of [`principal_value_halfline`]: as `eps`
/// shrinks the two one-sided pieces grow without bound and cancel.
pub fn principal_value_excised<G: Fn(f64, f64) -> f64>(
    g: G,
    x0: f64,
    eps: f64,
    tail: TailCut,
    shape: PvShape,
    cfg: &QuadConfig,
) -> Result<EnergyReport> {
    cfg.validate()?;
    check_shape(x0, &shape)?;
    if !(eps > 0.0 && eps < x0) {
        return Err(Error::invalid(format!("excision radius must lie in (0, x0), got {eps}")));
    }
    let gl = GaussLegendre::new(cfg.panel_order);
    let origin = Grading::singular(shape.origin_exponent, f64::INFINITY);
    let edge = Grading::Near { offset: eps };
    let report = refine(cfg, |levels| {
        let engine = Engine::new(&gl, cfg, levels);
        let mut below = |p: Abscissa| g(p.x, -(eps + p.from_right));
        let mut acc = engine.interval(0.0, x0 - eps, origin, edge, &mut below);
        let mut above = |p: Abscissa| g(p.x, eps + p.from_left);
        acc.merge(engine.interval(x0 + eps, 2.0 * x0, edge, Grading::None, &mut above));
        acc.merge(remainder(&engine, &g, x0, tail.at));
        Ok(acc)
    })?;
    Ok(EnergyReport {
        error_estimate: report.error_estimate + tail.bound,
        ..report
    })
}

fn check_shape(x0: f64, shape: &PvShape) -> Result<()> {
    if !(x0 > 0.0) || !x0.is_finite() {
        return Err(Error::invalid(format!("principal value point must be > 0, got {x0}")));
    }
    for e in [shape.pair_exponent, shape.origin_exponent] {
        if !(e > -1.0) {
            return Err(Error::NonIntegrable(e));
        }
    }
    Ok(())
}

/// `∫_{2 x0}^{cut} g` on panels that double in length.
fn remainder<G: Fn(f64, f64) -> f64>(engine: &Engine<'_>, g: &G, x0: f64, cut: f64) -> Accum {
    let mut acc = Accum::default();
    let mut lo = 2.0 * x0;
    while lo < cut {
        let hi = (2.0 * lo).min(cut);
        let mut h = |p: Abscissa| g(p.x, x0 + (lo - 2.0 * x0) + p.from_left);
        acc.merge(engine.interval(lo, hi, Grading::None, Grading::None, &mut h));
        lo = hi;
    }
    acc
}
