//! Numerical integration for the singular integrals of the Hardy functional.
//!
//! Everything here is built from one primitive: a composite Gauss-Legendre
//! rule on a mesh that is graded geometrically toward the endpoints where the
//! integrand is not analytic. When an endpoint carries a declared algebraic
//! singularity `d^e` with `e < 0`, the innermost panel is integrated after the
//! substitution `d = δ w^(1/(1+e))`, which turns the leading power into a
//! bounded function. Convergence is checked by raising the number of grading
//! levels until two successive estimates agree; their difference is reported
//! as the error estimate.
//!
//! Half-lines `[y0, ∞)` are mapped onto `(0, 1/y0]` with `y = 1/z`; a power
//! decay `y^(-γ)` becomes the endpoint singularity `z^(γ-2)`, which the same
//! graded rule handles.

mod gauss;
mod monte_carlo;
mod plane;
mod pv;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use gauss::GaussLegendre;
pub use monte_carlo::{monte_carlo_integral, BoxDomain};
pub use plane::integrate_2d_offdiagonal;
pub use pv::{principal_value_excised, principal_value_halfline, PvShape, TailCut};

/// Tolerances and mesh parameters shared by every quadrature routine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Number of times the grading depth may be raised before giving up.
    pub max_refinements: usize,
    /// Ratio between consecutive panel sizes toward a graded endpoint.
    pub grading_ratio: f64,
    /// Gauss-Legendre nodes per panel.
    pub panel_order: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self::one_d()
    }
}

impl QuadConfig {
    /// Defaults for one-dimensional integrals.
    pub const fn one_d() -> Self {
        QuadConfig {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_refinements: 30,
            grading_ratio: 0.5,
            panel_order: 16,
        }
    }

    /// Defaults for the nested double integrals.
    pub const fn two_d() -> Self {
        QuadConfig {
            rel_tol: 1e-4,
            ..Self::one_d()
        }
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::invalid("tolerances must be strictly positive"));
        }
        if !(self.grading_ratio > 0.0 && self.grading_ratio < 1.0) {
            return Err(Error::invalid("grading_ratio must lie in (0, 1)"));
        }
        if self.panel_order == 0 || self.max_refinements < 2 {
            return Err(Error::invalid(
                "panel_order must be positive and max_refinements at least 2",
            ));
        }
        Ok(())
    }
}

/// A computed integral with its a-posteriori error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyReport {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: u64,
}

impl EnergyReport {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn exact(value: f64) -> Self {
        EnergyReport {
            value,
            error_estimate: 0.0,
            evaluations: 0,
        }
    }

    pub fn scale(self, factor: f64) -> Self {
        EnergyReport {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.abs(),
            evaluations: self.evaluations,
        }
    }
}

impl std::ops::Add for EnergyReport {
    type Output = EnergyReport;

    fn add(self, rhs: EnergyReport) -> EnergyReport {
        EnergyReport {
            value: self.value + rhs.value,
            error_estimate: self.error_estimate + rhs.error_estimate,
            evaluations: self.evaluations + rhs.evaluations,
        }
    }
}

/// Which end of an interval a singularity sits at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    Left,
    Right,
}

/// The integrand behaves like `distance^exponent` at `location`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularityDescriptor {
    pub location: Endpoint,
    pub exponent: f64,
}

impl SingularityDescriptor {
    pub fn new(location: Endpoint, exponent: f64) -> Result<Self> {
        if !(exponent > -1.0) {
            return Err(Error::NonIntegrable(exponent));
        }
        Ok(SingularityDescriptor { location, exponent })
    }

    pub fn left(exponent: f64) -> Result<Self> {
        Self::new(Endpoint::Left, exponent)
    }

    pub fn right(exponent: f64) -> Result<Self> {
        Self::new(Endpoint::Right, exponent)
    }
}

/// A quadrature node together with its exact distances to both interval ends.
///
/// Integrands that are singular at an endpoint should use the distances
/// instead of recomputing `x - a`, which loses all digits close to the end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abscissa {
    pub x: f64,
    pub from_left: f64,
    pub from_right: f64,
}

/// Integrates `f` over `(a, b)` with geometric grading toward the declared
/// singular endpoints.
pub fn integrate_graded<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    singularities: &[SingularityDescriptor],
    cfg: &QuadConfig,
) -> Result<EnergyReport> {
    integrate_graded_with(|p: Abscissa| f(p.x), a, b, singularities, cfg)
}

/// As [`integrate_graded`], but the integrand receives the node's distances
/// to both ends.
pub fn integrate_graded_with<F: Fn(Abscissa) -> f64>(
    f: F,
    a: f64,
    b: f64,
    singularities: &[SingularityDescriptor],
    cfg: &QuadConfig,
) -> Result<EnergyReport> {
    cfg.validate()?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::invalid(format!("need a < b, got ({a}, {b})")));
    }
    let (left, right) = end_gradings(singularities)?;
    let gl = GaussLegendre::new(cfg.panel_order);
    refine(cfg, |levels| {
        let engine = Engine::new(&gl, cfg, levels);
        let mut f = |p: Abscissa| f(p);
        Ok(engine.interval(a, b, left, right, &mut f))
    })
}

/// `∫_{y0}^∞ f(y) dy` for an integrand decaying like `y^(-decay_exponent)`.
///
/// `start` describes the integrand at `y0` (a singularity there, or exactly
/// analytic). The integrand receives `(y, y - y0)`.
pub fn integrate_half_line<F: Fn(f64, f64) -> f64>(
    f: F,
    y0: f64,
    decay_exponent: f64,
    start: Option<SingularityDescriptor>,
    cfg: &QuadConfig,
) -> Result<EnergyReport> {
    cfg.validate()?;
    if !(y0 > 0.0) || !y0.is_finite() {
        return Err(Error::invalid(format!("half-line start must be > 0, got {y0}")));
    }
    if !(decay_exponent > 1.0) {
        return Err(Error::invalid(format!(
            "decay exponent {decay_exponent} is not integrable at infinity"
        )));
    }
    let start = match start {
        Some(sd) if sd.exponent <= -1.0 => return Err(Error::NonIntegrable(sd.exponent)),
        Some(sd) => Grading::Singular {
            exponent: sd.exponent,
            scale: f64::INFINITY,
        },
        None => Grading::None,
    };
    let gl = GaussLegendre::new(cfg.panel_order);
    refine(cfg, |levels| {
        let engine = Engine::new(&gl, cfg, levels);
        let mut g = |y: f64, dy: f64| f(y, dy);
        Ok(engine.half_line(y0, decay_exponent, start, &mut g))
    })
}

fn end_gradings(singularities: &[SingularityDescriptor]) -> Result<(Grading, Grading)> {
    let mut left = Grading::None;
    let mut right = Grading::None;
    for sd in singularities {
        if !(sd.exponent > -1.0) {
            return Err(Error::NonIntegrable(sd.exponent));
        }
        let g = Grading::Singular {
            exponent: sd.exponent,
            scale: f64::INFINITY,
        };
        match sd.location {
            Endpoint::Left => left = left.strongest(g),
            Endpoint::Right => right = right.strongest(g),
        }
    }
    Ok((left, right))
}

/// Grading depth used at refinement step `k`.
pub(crate) fn levels_at(k: usize) -> u32 {
    8 + 4 * k as u32
}

/// Raises the grading depth until two successive estimates agree.
pub(crate) fn refine<F>(cfg: &QuadConfig, mut eval: F) -> Result<EnergyReport>
where
    F: FnMut(u32) -> Result<Accum>,
{
    let mut total_evals = 0u64;
    let mut prev: Option<f64> = None;
    let mut best = EnergyReport::zero();
    for k in 0..cfg.max_refinements {
        let acc = eval(levels_at(k))?;
        total_evals += acc.evals;
        if !acc.sum.is_finite() {
            return Err(Error::NonConvergence {
                best: EnergyReport {
                    value: acc.sum,
                    error_estimate: f64::INFINITY,
                    evaluations: total_evals,
                },
            });
        }
        let floor = acc.roundoff();
        if let Some(p) = prev {
            let diff = (acc.sum - p).abs();
            best = EnergyReport {
                value: acc.sum,
                error_estimate: diff.max(floor),
                evaluations: total_evals,
            };
            if diff <= (cfg.rel_tol * acc.sum.abs()).max(cfg.abs_tol) || diff <= floor {
                return Ok(best);
            }
        }
        prev = Some(acc.sum);
    }
    Err(Error::NonConvergence { best })
}

/// How the integrand behaves at one end of a sub-interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Grading {
    /// Analytic up to and slightly beyond the end: one panel.
    None,
    /// Non-analytic at the end, leading behaviour `d^exponent`. `scale` is the
    /// distance to the nearest other feature of the integrand; the mesh is
    /// first graded down to that scale and then `levels` further.
    Singular { exponent: f64, scale: f64 },
    /// Singular at distance `offset` beyond the end.
    Near { offset: f64 },
}

impl Grading {
    pub(crate) fn kink() -> Self {
        Grading::Singular {
            exponent: 0.0,
            scale: f64::INFINITY,
        }
    }

    pub(crate) fn singular(exponent: f64, scale: f64) -> Self {
        Grading::Singular { exponent, scale }
    }

    fn strongest(self, other: Grading) -> Grading {
        match (self, other) {
            (Grading::None, g) | (g, Grading::None) => g,
            (
                Grading::Singular { exponent: a, scale: sa },
                Grading::Singular { exponent: b, scale: sb },
            ) => Grading::Singular {
                exponent: a.min(b),
                scale: sa.min(sb),
            },
            (g @ Grading::Singular { .. }, _) | (_, g @ Grading::Singular { .. }) => g,
            (Grading::Near { offset: a }, Grading::Near { offset: b }) => {
                Grading::Near { offset: a.min(b) }
            }
        }
    }
}

/// Running sums of one quadrature evaluation.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Accum {
    pub sum: f64,
    /// Sum of `|w f|`, for the roundoff floor.
    pub abs: f64,
    pub evals: u64,
}

impl Accum {
    #[inline]
    pub(crate) fn push(&mut self, wf: f64) {
        self.sum += wf;
        self.abs += wf.abs();
        self.evals += 1;
    }

    pub(crate) fn merge(&mut self, other: Accum) {
        self.sum += other.sum;
        self.abs += other.abs;
        self.evals += other.evals;
    }

    pub(crate) fn roundoff(&self) -> f64 {
        64.0 * f64::EPSILON * self.abs
    }
}

const MAX_EXTRA_LEVELS: u32 = 200;

/// A graded composite rule at a fixed depth.
pub(crate) struct Engine<'a> {
    gl: &'a GaussLegendre,
    ratio: f64,
    levels: u32,
}

impl<'a> Engine<'a> {
    pub(crate) fn new(gl: &'a GaussLegendre, cfg: &QuadConfig, levels: u32) -> Self {
        Engine {
            gl,
            ratio: cfg.grading_ratio,
            levels,
        }
    }

    /// Panels used on an ungraded stretch: one at the first step, one more
    /// at each refinement.
    fn uniform_panels(&self) -> u32 {
        1 + self.levels.saturating_sub(levels_at(0)) / 4
    }

    fn levels_to_reach(&self, h: f64, scale: f64) -> u32 {
        if !(scale < h) {
            return 0;
        }
        if !(scale > 0.0) {
            return MAX_EXTRA_LEVELS;
        }
        let n = ((h / scale).ln() / (1.0 / self.ratio).ln()).ceil();
        (n as u32).min(MAX_EXTRA_LEVELS)
    }

    /// Depth and substitution exponent for a half of length `h`.
    fn depth(&self, g: Grading, h: f64) -> (u32, f64) {
        match g {
            Grading::None => (0, 0.0),
            Grading::Singular { exponent, scale } => {
                // the innermost panel of size r^L h contributes ~ (r^L h)^(1+e),
                // so milder singularities need proportionally fewer levels
                let own = (self.levels as f64 / (1.0 + exponent.max(0.0))).ceil() as u32;
                (own + self.levels_to_reach(h, scale), exponent.min(0.0))
            }
            Grading::Near { offset } => {
                let base = self.levels_to_reach(h, offset);
                if base == 0 {
                    (0, 0.0)
                } else {
                    (base + self.levels / 4, 0.0)
                }
            }
        }
    }

    /// Integrates over `[a, b]`.
    pub(crate) fn interval<F: FnMut(Abscissa) -> f64>(
        &self,
        a: f64,
        b: f64,
        left: Grading,
        right: Grading,
        f: &mut F,
    ) -> Accum {
        let mut acc = Accum::default();
        let len = b - a;
        if !(len > 0.0) {
            return acc;
        }
        match (left, right) {
            (Grading::None, Grading::None) => {
                self.half(a, b, len, len, true, Grading::None, f, &mut acc);
            }
            (g, Grading::None) => self.half(a, b, len, len, true, g, f, &mut acc),
            (Grading::None, g) => self.half(a, b, len, len, false, g, f, &mut acc),
            (gl, gr) => {
                let h = 0.5 * len;
                self.half(a, b, len, h, true, gl, f, &mut acc);
                self.half(a, b, len, len - h, false, gr, f, &mut acc);
            }
        }
        acc
    }

    /// The part of `[a, b]` within distance `h` of one end, graded toward it.
    #[allow(clippy::too_many_arguments)]
    fn half<F: FnMut(Abscissa) -> f64>(
        &self,
        a: f64,
        b: f64,
        len: f64,
        h: f64,
        toward_left: bool,
        g: Grading,
        f: &mut F,
        acc: &mut Accum,
    ) {
        let (depth, exponent) = self.depth(g, h);
        let mut node = |d: f64, w: f64, acc: &mut Accum| {
            let p = if toward_left {
                Abscissa {
                    x: a + d,
                    from_left: d,
                    from_right: len - d,
                }
            } else {
                Abscissa {
                    x: b - d,
                    from_left: len - d,
                    from_right: d,
                }
            };
            acc.push(w * f(p));
        };
        let mut outer = h;
        for level in 0..depth {
            let inner = outer * self.ratio;
            // When this half is the whole interval, the outermost panel touches
            // the other, ungraded end. Refine it too, so that an undeclared
            // singularity there shows up as non-convergence, not a stale panel.
            let pieces = if level == 0 && h == len { self.uniform_panels() } else { 1 };
            let width = (outer - inner) / pieces as f64;
            for j in 0..pieces {
                let lo = inner + j as f64 * width;
                for (u, w) in self.gl.iter() {
                    node(lo + width * u, width * w, acc);
                }
            }
            outer = inner;
        }
        // innermost part [0, outer]
        if depth == 0 {
            // ungraded: refine uniformly so that successive steps differ
            let panels = self.uniform_panels();
            let width = outer / panels as f64;
            for j in 0..panels {
                let lo = j as f64 * width;
                for (u, w) in self.gl.iter() {
                    node(lo + width * u, width * w, acc);
                }
            }
        } else if exponent < 0.0 {
            let m = 1.0 / (1.0 + exponent);
            for (u, w) in self.gl.iter() {
                let um = u.powf(m);
                node(outer * um, outer * m * (um / u) * w, acc);
            }
        } else {
            for (u, w) in self.gl.iter() {
                node(outer * u, outer * w, acc);
            }
        }
    }

    /// `∫_{y0}^∞ f(y, y - y0) dy` through `y = 1/z`.
    pub(crate) fn half_line<F: FnMut(f64, f64) -> f64>(
        &self,
        y0: f64,
        decay_exponent: f64,
        start: Grading,
        f: &mut F,
    ) -> Accum {
        let z0 = 1.0 / y0;
        let at_zero = Grading::Singular {
            exponent: decay_exponent - 2.0,
            scale: f64::INFINITY,
        };
        let at_start = match start {
            Grading::None => Grading::None,
            Grading::Singular { exponent, scale } => Grading::Singular {
                exponent,
                scale: scale * z0 * z0,
            },
            Grading::Near { offset } => {
                if offset < y0 {
                    Grading::Near {
                        offset: offset / (y0 * (y0 - offset)),
                    }
                } else {
                    Grading::None
                }
            }
        };
        let mut g = |p: Abscissa| {
            let z = p.x;
            let y = 1.0 / z;
            let dy = p.from_right / (z * z0);
            f(y, dy) / (z * z)
        };
        self.interval(0.0, z0, at_zero, at_start, &mut g)
    }
}

/// `∫_T^∞ C y^(-γ) dy`.
pub fn power_tail_bound(decay_exponent: f64, coefficient: f64, cut: f64) -> f64 {
    coefficient.abs() * cut.powf(1.0 - decay_exponent) / (decay_exponent - 1.0)
}

/// The smallest `T` with `∫_T^∞ C y^(-γ) dy <= tol`.
pub fn tail_cut(decay_exponent: f64, coefficient: f64, tol: f64) -> Result<f64> {
    if !(decay_exponent > 1.0) {
        return Err(Error::invalid(format!(
            "decay exponent {decay_exponent} is not integrable at infinity"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tail tolerance must be positive"));
    }
    let c = coefficient.abs().max(f64::MIN_POSITIVE);
    Ok((c / ((decay_exponent - 1.0) * tol)).powf(1.0 / (decay_exponent - 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn left(e: f64) -> SingularityDescriptor {
        SingularityDescriptor::left(e).unwrap()
    }

    fn right(e: f64) -> SingularityDescriptor {
        SingularityDescriptor::right(e).unwrap()
    }

    #[test]
    fn power_rule_examples() {
        let cfg = QuadConfig::one_d();
        let r = integrate_graded(|x| x.powf(-0.5), 0.0, 1.0, &[left(-0.5)], &cfg).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-10);
        assert!(r.error_estimate < 1e-8 * 2.0);

        let r = integrate_graded_with(
            |p| p.from_right.powf(-0.25),
            0.0,
            1.0,
            &[right(-0.25)],
            &cfg,
        )
        .unwrap();
        assert_relative_eq!(r.value, 4.0 / 3.0, max_relative = 1e-10);
    }

    #[test]
    fn strong_singularity_converges() {
        let cfg = QuadConfig::one_d();
        let r = integrate_graded_with(|p| p.from_left.powf(-0.95), 0.0, 1.0, &[left(-0.95)], &cfg)
            .unwrap();
        assert_relative_eq!(r.value, 20.0, max_relative = 1e-9);
    }

    #[test]
    fn undeclared_mixed_powers_still_converge() {
        // sqrt(x) + x^-0.3 with only the stronger power declared
        let cfg = QuadConfig::one_d();
        let r = integrate_graded(
            |x| x.sqrt() + x.powf(-0.3),
            0.0,
            2.0,
            &[left(-0.3)],
            &cfg,
        )
        .unwrap();
        let want = 2f64.powf(1.5) / 1.5 + 2f64.powf(0.7) / 0.7;
        assert_relative_eq!(r.value, want, max_relative = 1e-9);
    }

    #[test]
    fn rejects_bad_exponent_and_interval() {
        assert_eq!(
            SingularityDescriptor::left(-1.0),
            Err(Error::NonIntegrable(-1.0))
        );
        let bad = SingularityDescriptor {
            location: Endpoint::Left,
            exponent: -1.5,
        };
        let cfg = QuadConfig::one_d();
        assert_eq!(
            integrate_graded(|x| x, 0.0, 1.0, &[bad], &cfg),
            Err(Error::NonIntegrable(-1.5))
        );
        assert!(integrate_graded(|x| x, 1.0, 1.0, &[], &cfg).is_err());
    }

    #[test]
    fn reports_nonconvergence_with_best_estimate() {
        // an undeclared 1/x-like spike cannot meet a tiny tolerance in 3 steps
        let cfg = QuadConfig {
            rel_tol: 1e-15,
            abs_tol: 1e-300,
            max_refinements: 3,
            ..QuadConfig::one_d()
        };
        let err = integrate_graded(|x| (x + 1e-12).powf(-0.999), 0.0, 1.0, &[], &cfg).unwrap_err();
        match err {
            Error::NonConvergence { best } => assert!(best.value > 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    // ∫_0^1 |1 - r^(-1/8)|² (1-r)^(-3/2) dr from 40-digit tanh-sinh quadrature
    // (mpmath), split at 0.5, 0.9, 0.999.
    const GOLDEN_SINGULAR: f64 = 0.060_936_773_554_041_364_03;

    #[test]
    fn golden_endpoint_singular_integral() {
        let cfg = QuadConfig {
            rel_tol: 1e-12,
            panel_order: 32,
            max_refinements: 60,
            ..QuadConfig::one_d()
        };
        let r = integrate_graded_with(
            |q: Abscissa| {
                let ln_r = if q.from_left < 0.5 { q.from_left.ln() } else { (-q.from_right).ln_1p() };
                (-ln_r / 8.0).exp_m1().powi(2) * q.from_right.powf(-1.5)
            },
            0.0,
            1.0,
            &[left(-0.25), right(0.5)],
            &cfg,
        )
        .unwrap();
        assert!((r.value / GOLDEN_SINGULAR - 1.0).abs() <= 1e-12, "{}", r.value);
    }

    #[test]
    fn polynomial_exactness_on_smooth_panel() {
        let cfg = QuadConfig::one_d();
        let deg = 2 * cfg.panel_order as i32 - 1;
        let r = integrate_graded(|x| x.powi(deg), 0.0, 1.0, &[], &cfg).unwrap();
        assert_relative_eq!(r.value, 1.0 / (deg as f64 + 1.0), max_relative = 1e-13);
    }

    #[test]
    fn half_line_power_decay() {
        let cfg = QuadConfig::one_d();
        // ∫_1^∞ y^-1.25 = 4
        let r = integrate_half_line(|y, _| y.powf(-1.25), 1.0, 1.25, None, &cfg).unwrap();
        assert_relative_eq!(r.value, 4.0, max_relative = 1e-9);
        // ∫_2^∞ (y-1)^-1.5 dy = 2, with the stable offset
        let r = integrate_half_line(|_, dy| (1.0 + dy).powf(-1.5), 2.0, 1.5, None, &cfg).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn half_line_with_singular_start() {
        let cfg = QuadConfig::one_d().with_rel_tol(1e-11);
        // ∫_1^∞ (y-1)^-0.5 y^-2 dy = B(1/2, 3/2) = π/2
        let r = integrate_half_line(
            |y, dy| dy.powf(-0.5) * y.powi(-2),
            1.0,
            2.5,
            Some(left(-0.5)),
            &cfg,
        )
        .unwrap();
        assert_relative_eq!(r.value, std::f64::consts::FRAC_PI_2, max_relative = 1e-10);
        assert!((r.value - std::f64::consts::FRAC_PI_2).abs() <= r.error_estimate.max(1e-15));
    }

    #[test]
    fn tail_cut_arithmetic() {
        let t = tail_cut(2.0, 3.0, 1e-6).unwrap();
        assert_relative_eq!(power_tail_bound(2.0, 3.0, t), 1e-6, max_relative = 1e-12);
        assert!(tail_cut(1.0, 1.0, 1e-6).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(QuadConfig::one_d().validate().is_ok());
        let bad = QuadConfig {
            grading_ratio: 1.0,
            ..QuadConfig::one_d()
        };
        assert!(bad.validate().is_err());
        let bad = QuadConfig {
            rel_tol: 0.0,
            ..QuadConfig::one_d()
        };
        assert!(bad.validate().is_err());
    }
}
