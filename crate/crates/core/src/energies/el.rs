//! The Euler–Lagrange identity of the ground state `ω(x) = x^(-α)`:
//!
//! ```text
//! 2 PV ∫_0^∞ φ(ω(x) - ω(y)) |x - y|^(-1-ps) dy = D_{1,p,s} x^(-ps) ω(x)^(p-1),
//! φ(t) = t |t|^(p-2)
//! ```
//!
//! For `p < 2`, `φ(t)` is read as `sign(t) |t|^(p-1)`, which is bounded.

use serde::Serialize;

use crate::constants::hardy_constant;
use crate::error::{Error, Result};
use crate::params::HardyParams;
use crate::quadrature::{principal_value_halfline, EnergyReport, PvShape, QuadConfig, TailCut};

/// Both sides of the identity at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElReport {
    pub x: f64,
    /// The principal value, doubled.
    pub lhs: EnergyReport,
    /// `D_{1,p,s} x^(-ps) ω(x)^(p-1)`.
    pub rhs: f64,
    /// Error estimate of `rhs`, inherited from the constant.
    pub rhs_error: f64,
    /// `|lhs / rhs - 1|`.
    pub relative_error: f64,
}

/// Evaluates both sides of the identity at `x` and their relative mismatch.
pub fn el_identity_check(x: f64, params: &HardyParams, cfg: &QuadConfig) -> Result<ElReport> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::invalid(format!("the point x must be > 0, got {x}")));
    }
    let (p, ps, alpha) = (params.p(), params.ps(), params.alpha());
    let constant = hardy_constant(&params.with_dim(1)?, cfg)?;
    let omega_x = x.powf(-alpha);
    let rhs = constant.value * x.powf(-ps) * omega_x.powf(p - 1.0);

    let phi = |t: f64| {
        if t == 0.0 {
            0.0
        } else if p == 2.0 {
            t
        } else {
            t.signum() * t.abs().powf(p - 1.0)
        }
    };
    let g = |y: f64, dy: f64| {
        // ln(y / x) from whichever form is exact
        let ln_ratio = if dy.abs() < 0.5 * x { (dy / x).ln_1p() } else { (y / x).ln() };
        let diff = -omega_x * (-alpha * ln_ratio).exp_m1();
        phi(diff) * dy.abs().powf(-1.0 - ps)
    };
    let shape = PvShape {
        pair_exponent: p - 1.0 - ps,
        origin_exponent: if alpha > 0.0 { -alpha * (p - 1.0) } else { 0.0 },
    };
    // beyond 2x, |x - y| >= y/2; |ω(x) - ω(y)| <= ω(x) if ω decays, <= y^|α| if it grows
    let kernel_bound = 2f64.powf(1.0 + ps);
    let (decay, coefficient) = if alpha > 0.0 {
        (1.0 + ps, omega_x.powf(p - 1.0) * kernel_bound)
    } else {
        (1.0 + ps + alpha * (p - 1.0), kernel_bound)
    };
    let tol = (0.1 * cfg.rel_tol * rhs.abs()).max(cfg.abs_tol);
    let tail = TailCut::for_power_decay(decay, coefficient, tol)?;
    let pv = principal_value_halfline(g, x, tail, shape, cfg)?;
    let lhs = pv.scale(2.0);
    Ok(ElReport {
        x,
        lhs,
        rhs,
        rhs_error: constant.error_estimate * x.powf(-ps) * omega_x.powf(p - 1.0),
        relative_error: (lhs.value / rhs - 1.0).abs(),
    })
}
