//! Symmetric double integrals over `(0, L)^2` with a diagonal singularity.

use std::cell::Cell;

use super::{refine, Abscissa, Accum, Engine, EnergyReport, GaussLegendre, Grading, QuadConfig};
use crate::error::{Error, Result};

/// `∬_{(0,L)^2} F(x, y) dx dy` for symmetric `F`, computed as
/// `2 ∫_0^L dx ∫_0^{L-x} F(x, x + t) dt`.
///
/// `|F(x, x+t)| ≲ t^diag_exponent` near the diagonal; the `t`-mesh is graded
/// toward `t = 0` accordingly. `breakpoints` are interior points where `F`
/// fails to be smooth along the lines `x = b` or `y = b`; both variables are
/// split there.
pub fn integrate_2d_offdiagonal<F: Fn(f64, f64) -> f64>(
    f: F,
    diag_exponent: f64,
    length: f64,
    breakpoints: &[f64],
    cfg: &QuadConfig,
) -> Result<EnergyReport> {
    cfg.validate()?;
    if !(diag_exponent > -1.0) {
        return Err(Error::NonIntegrable(diag_exponent));
    }
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::invalid(format!("side length must be > 0, got {length}")));
    }
    let mut knots: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|b| *b > 0.0 && *b < length)
        .collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let mut edges = Vec::with_capacity(knots.len() + 2);
    edges.push(0.0);
    edges.extend_from_slice(&knots);
    edges.push(length);

    let gl = GaussLegendre::new(cfg.panel_order);
    let report = refine(cfg, |levels| {
        let engine = Engine::new(&gl, cfg, levels);
        let mut acc = Accum::default();
        for cell in edges.windows(2) {
            let (lo, hi) = (cell[0], cell[1]);
            let inner_evals = Cell::new(0u64);
            let mut outer = |p: Abscissa| {
                let inner = inner_sum(&engine, &f, p.x, hi - p.x, &edges, diag_exponent);
                inner_evals.set(inner_evals.get() + inner.evals);
                inner.sum
            };
            let part = engine.interval(lo, hi, Grading::kink(), Grading::kink(), &mut outer);
            acc.merge(part);
            acc.evals += inner_evals.get();
        }
        Ok(acc)
    })?;
    Ok(report.scale(2.0))
}

/// `∫_0^{L-x} F(x, x+t) dt`, split where `x + t` crosses a knot.
fn inner_sum<F: Fn(f64, f64) -> f64>(
    engine: &Engine<'_>,
    f: &F,
    x: f64,
    to_cell_end: f64,
    edges: &[f64],
    diag_exponent: f64,
) -> Accum {
    let mut acc = Accum::default();
    // first segment stays in x's own cell
    let mut g = |p: Abscissa| f(x, x + p.x);
    let scale = x.max(f64::MIN_POSITIVE);
    acc.merge(engine.interval(
        0.0,
        to_cell_end,
        Grading::singular(diag_exponent, scale),
        Grading::None,
        &mut g,
    ));
    let cell_end = x + to_cell_end;
    let mut start = cell_end;
    for &b in edges.iter().filter(|&&b| b > cell_end) {
        let offset = start - x;
        let mut g = |p: Abscissa| f(x, x + offset + p.from_left);
        acc.merge(engine.interval(
            offset,
            b - x,
            Grading::Near { offset },
            Grading::None,
            &mut g,
        ));
        start = b;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn hat(x: f64) -> f64 {
        if x <= 0.0 || x >= 2.0 {
            0.0
        } else if x <= 1.0 {
            x
        } else {
            2.0 - x
        }
    }

    #[test]
    fn zero_integrand() {
        let r = integrate_2d_offdiagonal(|_, _| 0.0, 0.0, 1.0, &[], &QuadConfig::two_d()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn smooth_symmetric_polynomial() {
        // ∬_{(0,1)^2} (x + y)^2 = 7/6
        let r = integrate_2d_offdiagonal(
            |x, y| (x + y) * (x + y),
            0.0,
            1.0,
            &[],
            &QuadConfig::one_d(),
        )
        .unwrap();
        assert_relative_eq!(r.value, 7.0 / 6.0, max_relative = 1e-12);
    }

    // Box part of the p = 2, s = 1/4 hat energy. Reference from 20-digit
    // nested tanh-sinh quadrature (mpmath), split at the kink and the diagonal.
    const HAT_BOX_P2_S025: f64 = 1.464_088_535_499_177_833_8;

    fn hat_kernel(x: f64, y: f64) -> f64 {
        let d = hat(x) - hat(y);
        d * d * (y - x).abs().powf(-1.5)
    }

    #[test]
    fn hat_energy_against_reference() {
        let cfg = QuadConfig::one_d();
        let r = integrate_2d_offdiagonal(hat_kernel, 0.5, 2.0, &[1.0], &cfg).unwrap();
        assert_relative_eq!(r.value, HAT_BOX_P2_S025, max_relative = 1e-8);
        assert!((r.value - HAT_BOX_P2_S025).abs() <= 10.0 * r.error_estimate.max(1e-14));
    }

    #[test]
    fn hat_energy_against_monte_carlo() {
        // plain uniform sampling of the bounded integrand is an independent oracle
        let mc = crate::quadrature::monte_carlo_integral(
            |v: &[f64]| hat_kernel(v[0], v[1]),
            &crate::quadrature::BoxDomain::new(vec![(0.0, 2.0), (0.0, 2.0)]).unwrap(),
            2_000_000,
            7,
        )
        .unwrap();
        let r = integrate_2d_offdiagonal(hat_kernel, 0.5, 2.0, &[1.0], &QuadConfig::two_d())
            .unwrap();
        assert!((mc.value - r.value).abs() <= 3.0 * mc.error_estimate + r.error_estimate);
    }

    #[test]
    fn scaling_law() {
        // energy of u(2 x) on (0, 1) is 2^(ps - 1) times the energy of u on (0, 2)
        let cfg = QuadConfig::one_d();
        let base = integrate_2d_offdiagonal(hat_kernel, 0.5, 2.0, &[1.0], &cfg).unwrap();
        let squeezed = integrate_2d_offdiagonal(
            |x, y| {
                let d = hat(2.0 * x) - hat(2.0 * y);
                d * d * (y - x).abs().powf(-1.5)
            },
            0.5,
            1.0,
            &[0.5],
            &cfg,
        )
        .unwrap();
        assert_relative_eq!(squeezed.value, 2f64.powf(-0.5) * base.value, max_relative = 1e-9);
    }

    #[test]
    fn rejects_nonintegrable_diagonal() {
        assert!(integrate_2d_offdiagonal(|_, _| 1.0, -1.0, 1.0, &[], &QuadConfig::two_d()).is_err());
    }
}
