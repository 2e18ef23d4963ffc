//! The constants of the inequality: the sharp constant `D_{N,p,s}`, the
//! remainder constant `c_p`, and the tangential reduction factor `A`.
//!
//! ```text
//! D_{N,p,s} = 2 π^((N-1)/2) Γ((1+ps)/2) / Γ((N+ps)/2) · ∫_0^1 |1 - r^((ps-1)/p)|^p (1-r)^(-1-ps) dr
//! c_p       = min_{0<τ<1/2} (1-τ)^p - τ^p + p τ^(p-1)
//! A         = D_{N,p,s} / D_{1,p,s}
//! ```

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::{ln_gamma_positive, sphere_area};
use crate::params::HardyParams;
use crate::quadrature::{
    integrate_graded, integrate_graded_with, integrate_half_line, Abscissa, EnergyReport,
    QuadConfig, SingularityDescriptor,
};

/// `D_{N,p,s}` split into its closed-form and quadrature factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SharpConstant {
    /// `prefactor * one_d_integral`.
    pub value: f64,
    /// `∫_0^1 |1 - r^((ps-1)/p)|^p (1-r)^(-1-ps) dr`.
    pub one_d_integral: f64,
    /// `2 π^((N-1)/2) Γ((1+ps)/2) / Γ((N+ps)/2)`; exactly 2 when `N = 1`.
    pub prefactor: f64,
    /// Error estimate of `value`, inherited from the quadrature.
    pub error_estimate: f64,
    pub params: HardyParams,
}

/// Endpoint exponents of the one-dimensional integrand: `p - 1 - ps` at
/// `r = 1` and `min(0, ps - 1)` at `r = 0`.
pub fn one_d_exponents(params: &HardyParams) -> (f64, f64) {
    let ps = params.ps();
    (params.p() - 1.0 - ps, (ps - 1.0).min(0.0))
}

/// The sharp constant `D_{N,p,s}`.
pub fn hardy_constant(params: &HardyParams, cfg: &QuadConfig) -> Result<SharpConstant> {
    let (p, ps, alpha) = (params.p(), params.ps(), params.alpha());
    let (at_one, at_zero) = one_d_exponents(params);
    // s < 1 and p >= 1 make both exponents integrable; refuse to integrate if not
    for e in [at_one, at_zero] {
        if !(e > -1.0) {
            return Err(Error::NonIntegrable(e));
        }
    }
    let integrand = |q: Abscissa| {
        // ln r from whichever distance is exact
        let ln_r = if q.from_left < 0.5 {
            q.from_left.ln()
        } else {
            (-q.from_right).ln_1p()
        };
        (-alpha * ln_r).exp_m1().abs().powf(p) * q.from_right.powf(-1.0 - ps)
    };
    let singular = [
        SingularityDescriptor::left(at_zero)?,
        SingularityDescriptor::right(at_one)?,
    ];
    let integral = integrate_graded_with(integrand, 0.0, 1.0, &singular, cfg)?;
    let prefactor = hardy_prefactor(params);
    Ok(SharpConstant {
        value: prefactor * integral.value,
        one_d_integral: integral.value,
        prefactor,
        error_estimate: prefactor * integral.error_estimate,
        params: *params,
    })
}

fn hardy_prefactor(params: &HardyParams) -> f64 {
    if params.dim() == 1 {
        return 2.0;
    }
    let (n, ps) = (params.dim() as f64, params.ps());
    let ln = 0.5 * (n - 1.0) * PI.ln() + ln_gamma_positive(0.5 * (1.0 + ps))
        - ln_gamma_positive(0.5 * (n + ps));
    2.0 * ln.exp()
}

/// `c_p` with the point where the minimum is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GsrConstant {
    pub value: f64,
    pub minimizer_tau: f64,
}

/// The objective `(1-τ)^p - τ^p + p τ^(p-1)` whose minimum is `c_p`.
pub fn gsr_objective(p: f64, tau: f64) -> f64 {
    (1.0 - tau).powf(p) - tau.powf(p) + p * tau.powf(p - 1.0)
}

const GSR_GRID: usize = 10_000;
const GSR_TAU_TOL: f64 = 1e-12;

/// `c_p` for `p >= 2`, by a grid scan over `(0, 1/2)` followed by
/// golden-section refinement of the best bracket.
///
/// For `p = 2` the objective is identically 1; the minimizer is reported
/// as `1/4` by convention.
pub fn gsr_constant(p: f64) -> Result<GsrConstant> {
    if !(p >= 2.0) || !p.is_finite() {
        return Err(Error::invalid(format!("c_p needs 2 <= p < ∞, got {p}")));
    }
    if p == 2.0 {
        return Ok(GsrConstant {
            value: 1.0,
            minimizer_tau: 0.25,
        });
    }
    let f = |t: f64| gsr_objective(p, t);
    let h = 0.5 / GSR_GRID as f64;
    let best = (1..GSR_GRID)
        .map(|i| (i, f(i as f64 * h)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .unwrap_or(1);
    let (tau, value) = golden_section(f, (best - 1) as f64 * h, (best + 1) as f64 * h, GSR_TAU_TOL);
    Ok(GsrConstant {
        value,
        minimizer_tau: tau,
    })
}

/// Minimizes a unimodal `f` on `[a, b]` until the bracket is shorter than `tol`.
fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let tau = 0.5 * (a + b);
    (tau, f(tau))
}

/// `A = ½ |S^(N-2)| Γ((N-1)/2) Γ((1+ps)/2) / Γ((N+ps)/2)`, and 1 for `N = 1`.
pub fn reduction_factor(params: &HardyParams) -> f64 {
    let n = params.dim();
    if n == 1 {
        return 1.0;
    }
    let (nf, ps) = (n as f64, params.ps());
    let ln = ln_gamma_positive(0.5 * (nf - 1.0)) + ln_gamma_positive(0.5 * (1.0 + ps))
        - ln_gamma_positive(0.5 * (nf + ps));
    0.5 * sphere_area(n - 2) * ln.exp()
}

/// The tangential kernel integral, by quadrature and in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelReduction {
    /// `|S^(N-2)| ∫_0^∞ r^(N-2) (r² + m²)^(-(N+ps)/2) dr` by quadrature.
    pub quadrature: EnergyReport,
    /// `½ |S^(N-2)| m^(-1-ps) Γ((N-1)/2) Γ((1+ps)/2) / Γ((N+ps)/2)`.
    pub closed_form: f64,
}

impl KernelReduction {
    pub fn relative_error(&self) -> f64 {
        (self.quadrature.value / self.closed_form - 1.0).abs()
    }
}

/// `∫_{R^(N-1)} (|y'|² + m²)^(-(N+ps)/2) dy'` by radial quadrature, next to
/// its closed form `A m^(-1-ps)`.
pub fn kernel_reduction_integral(
    params: &HardyParams,
    m: f64,
    cfg: &QuadConfig,
) -> Result<KernelReduction> {
    let n = params.dim();
    if n < 2 {
        return Err(Error::InvalidDimension(n as i64));
    }
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::invalid(format!("kernel offset m must be > 0, got {m}")));
    }
    let (nf, ps) = (n as f64, params.ps());
    let radial = |r: f64| r.powi(n as i32 - 2) * (r * r + m * m).powf(-0.5 * (nf + ps));
    // analytic on [0, m]; beyond, y = 1/z maps the r^(-2-ps) decay to z^ps
    let near = integrate_graded(radial, 0.0, m, &[], cfg)?;
    let far = integrate_half_line(|r, _| radial(r), m, 2.0 + ps, None, cfg)?;
    let area = sphere_area(n - 2);
    Ok(KernelReduction {
        quadrature: (near + far).scale(area),
        closed_form: reduction_factor(params) * m.powf(-1.0 - ps),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(n: i64, p: f64, s: f64) -> HardyParams {
        HardyParams::new(n, p, s).unwrap()
    }

    // ∫_0^1 |1 - r^((ps-1)/p)|^p (1-r)^(-1-ps) dr from 40-digit tanh-sinh
    // quadrature (mpmath), split at 1e-3, 0.1, 0.5, 0.9, 0.999.
    const J_2_025: f64 = 0.396_280_469_471_184_414_9;
    const J_2_075: f64 = 0.207_352_518_097_373_270_2;
    const J_3_025: f64 = 0.006_783_371_956_821_330_793;
    const J_3_075: f64 = 0.202_162_196_685_466_678_1;
    const J_15_075: f64 = 0.095_076_299_847_554_792_11;

    #[test]
    fn one_dimensional_prefactor_is_two() {
        for (p, s) in [(2.0, 0.25), (1.0, 0.5), (3.0, 0.75)] {
            let d = hardy_constant(&params(1, p, s), &QuadConfig::one_d()).unwrap();
            assert_eq!(d.prefactor, 2.0);
            assert_eq!(d.value, 2.0 * d.one_d_integral);
        }
    }

    #[test]
    fn integral_against_reference() {
        let cfg = QuadConfig::one_d().with_rel_tol(1e-12);
        for (p, s, want) in [
            (2.0, 0.25, J_2_025),
            (2.0, 0.75, J_2_075),
            (3.0, 0.25, J_3_025),
            (3.0, 0.75, J_3_075),
            (1.5, 0.75, J_15_075),
        ] {
            let d = hardy_constant(&params(1, p, s), &cfg).unwrap();
            assert_relative_eq!(d.one_d_integral, want, max_relative = 1e-11);
        }
    }

    #[test]
    fn p_equal_one_is_two_over_s() {
        // |1 - r^(s-1)| (1-r)^(-1-s) has the antiderivative (1-r)^(-s) r^s / s
        for s in [0.25, 0.5, 0.75] {
            let cfg = QuadConfig::one_d().with_rel_tol(1e-12);
            let d = hardy_constant(&params(1, 1.0, s), &cfg).unwrap();
            assert_relative_eq!(d.value, 2.0 / s, max_relative = 1e-11);
        }
    }

    #[test]
    fn ratio_is_the_gamma_quotient() {
        let cfg = QuadConfig::one_d();
        for n in [2, 3, 5] {
            for (p, s) in [(2.0, 0.25), (1.0, 0.75), (3.0, 0.75)] {
                let d1 = hardy_constant(&params(1, p, s), &cfg).unwrap();
                let dn = hardy_constant(&params(n, p, s), &cfg).unwrap();
                let ps = p * s;
                let nf = n as f64;
                let want = PI.powf(0.5 * (nf - 1.0)) * crate::gamma::log_gamma(0.5 * (1.0 + ps))
                    .map(|a| (a - ln_gamma_positive(0.5 * (nf + ps))).exp())
                    .unwrap();
                assert_relative_eq!(dn.value / d1.value, want, max_relative = 1e-12);
                assert_relative_eq!(
                    reduction_factor(&params(n, p, s)),
                    dn.value / d1.value,
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn reduction_factor_special_values() {
        assert_eq!(reduction_factor(&params(1, 2.0, 0.25)), 1.0);
        let ps: f64 = 0.5;
        let want = PI.sqrt()
            * (ln_gamma_positive(0.5 * (1.0 + ps)) - ln_gamma_positive(0.5 * (2.0 + ps))).exp();
        assert_relative_eq!(reduction_factor(&params(2, 2.0, 0.25)), want, max_relative = 1e-14);
    }

    #[test]
    fn c2_is_one() {
        let c = gsr_constant(2.0).unwrap();
        assert_eq!(c.value, 1.0);
        assert_eq!(c.minimizer_tau, 0.25);
        for i in 1..1000 {
            let tau = 0.5 * i as f64 / 1000.0;
            assert!((gsr_objective(2.0, tau) - 1.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn c3_matches_stationary_point() {
        // f'(τ) = -3(1-τ)² - 3τ² + 6τ = 0  ⇔  2τ² - 4τ + 1 = 0
        let c = gsr_constant(3.0).unwrap();
        assert_relative_eq!(c.value, 2.0 - 2f64.sqrt(), max_relative = 1e-12);
        assert!((c.minimizer_tau - (1.0 - 0.5f64.sqrt())).abs() <= 1e-8);
        assert_relative_eq!(c.value, gsr_objective(3.0, c.minimizer_tau), max_relative = 0.0);
    }

    #[test]
    fn c4_against_fine_grid() {
        let c = gsr_constant(4.0).unwrap();
        let grid = (1..1_000_000)
            .map(|i| gsr_objective(4.0, 0.5 * i as f64 / 1e6))
            .fold(f64::INFINITY, f64::min);
        assert!((c.value - grid).abs() <= 1e-10);
        assert!(c.value > 0.0 && c.value <= 1.0);
    }

    #[test]
    fn cp_in_unit_interval() {
        for i in 0..=32 {
            let p = 2.0 + 0.25 * i as f64;
            let c = gsr_constant(p).unwrap();
            assert!(c.value > 0.0 && c.value <= 1.0, "p = {p}: {}", c.value);
            assert!((0.0..=0.5).contains(&c.minimizer_tau));
        }
        assert!(gsr_constant(1.5).is_err());
    }

    #[test]
    fn kernel_reduction_matches_closed_form() {
        let cfg = QuadConfig::one_d().with_rel_tol(1e-12);
        for (n, p, s) in [(2, 2.0, 0.25), (3, 2.0, 0.75), (2, 2.0, 0.75), (3, 2.0, 0.25), (5, 3.0, 0.75)] {
            for m in [1.0, 2.0] {
                let k = kernel_reduction_integral(&params(n, p, s), m, &cfg).unwrap();
                assert!(k.relative_error() <= 1e-10, "{n} {p} {s} {m}: {}", k.relative_error());
            }
        }
    }

    #[test]
    fn kernel_reduction_scales_in_m() {
        let cfg = QuadConfig::one_d().with_rel_tol(1e-12);
        let pr = params(3, 2.0, 0.25);
        let one = kernel_reduction_integral(&pr, 1.0, &cfg).unwrap().quadrature.value;
        let two = kernel_reduction_integral(&pr, 2.0, &cfg).unwrap().quadrature.value;
        assert_relative_eq!(two, 2f64.powf(-1.5) * one, max_relative = 1e-10);
        assert!(kernel_reduction_integral(&params(1, 2.0, 0.25), 1.0, &cfg).is_err());
    }
}
