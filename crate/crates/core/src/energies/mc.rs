//! Monte Carlo energies of the product functions `u_n = χ_n(|x'|) φ(x_N)` in
//! dimension `N >= 2`.
//!
//! With `S` a box containing the support of `u_n`,
//!
//! ```text
//! E[u_n] = ∫_S dx ∫_{R^N_+} |u_n(x) - u_n(y)|^p |x - y|^(-N-ps) (1 + 1{y ∉ S}) dy ,
//! ```
//!
//! since pairs with both points outside `S` contribute nothing and pairs with
//! exactly one point inside are met once instead of twice. The point `x` is
//! uniform on `S`; the offset `t = y - x` has a uniform direction and a radius
//! with density `∝ r^(p-1-ps)` below `r0` and `∝ r^(-1-ps)` above it. The first
//! branch absorbs `|u(x) - u(y)|^p ~ r^p` near the diagonal, the second the
//! kernel's far-field decay, so every sample's weight stays bounded for
//! Lipschitz profiles.

use std::f64::consts::PI;

use crate::energies::hardy_term_1d;
use crate::error::{Error, Result};
use crate::functions::{cutoff_chi, ProductFunction, Support};
use crate::gamma::sphere_area;
use crate::params::HardyParams;
use crate::quadrature::{monte_carlo_integral, BoxDomain, EnergyReport, QuadConfig};

use super::pair::Power;

/// Importance-sampled estimate of `∬ |u_n(x) - u_n(y)|^p |x - y|^(-N-ps) dx dy`.
///
/// `box_half_width` bounds the tangential coordinates of the sampling box
/// `[-w, w]^(N-1) × supp φ`; it must be at least the support radius `n + 1`.
pub fn monte_carlo_energy(
    f: &ProductFunction,
    params: &HardyParams,
    samples: u64,
    seed: u64,
    box_half_width: f64,
) -> Result<EnergyReport> {
    let dim = f.dim as usize;
    if f.dim < 2 {
        return Err(Error::InvalidDimension(f.dim as i64));
    }
    if params.dim() != f.dim {
        return Err(Error::invalid(format!(
            "product function lives in dimension {} but the parameters are for N = {}",
            f.dim,
            params.dim()
        )));
    }
    if f.profile.is_zero() {
        return Ok(EnergyReport::zero());
    }
    let (lo, hi) = match f.profile.support() {
        Support::Bounded { lo, hi } => (lo, hi),
        Support::UnboundedWithDecay => {
            return Err(Error::invalid(
                "Monte Carlo energies need a profile of bounded support",
            ))
        }
    };
    let w = box_half_width;
    if !(w >= f.tangential_radius()) || !w.is_finite() {
        return Err(Error::invalid(format!(
            "box half-width {w} does not contain the tangential support radius {}",
            f.tangential_radius()
        )));
    }
    let (p, ps) = (params.p(), params.ps());
    let pow = Power::new(p);
    let shape = f.profile.shape();
    let n = f.cutoff_n;

    // radial proposal, continuous at r0
    let r0 = 0.5 * (hi - lo);
    let near_mass = 1.0 / (p - ps);
    let far_mass = 1.0 / ps;
    let p_near = near_mass / (near_mass + far_mass);
    let norm = r0 * (near_mass + far_mass);
    let sphere = sphere_area(f.dim - 1);

    let normals = dim.div_ceil(2) * 2;
    let mut sides = vec![(-w, w); dim - 1];
    sides.push((lo, hi));
    sides.extend(std::iter::repeat_n((0.0, 1.0), 2 + normals));
    let domain = BoxDomain::new(sides)?;

    let value = |x_t: &[f64], x_n: f64| {
        let r = x_t.iter().map(|v| v * v).sum::<f64>().sqrt();
        cutoff_chi(n, r) * shape.value(x_n)
    };
    let inside = |y_t: &[f64], y_n: f64| y_n >= lo && y_n <= hi && y_t.iter().all(|v| v.abs() <= w);

    let integrand = |v: &[f64]| {
        let (x, rest) = v.split_at(dim);
        let (u_branch, u_r) = (rest[0], 1.0 - rest[1]);
        let r = if u_branch < p_near {
            r0 * u_r.powf(1.0 / (p - ps))
        } else {
            r0 * u_r.powf(-1.0 / ps)
        };
        let density = if r < r0 {
            (r / r0).powf(p - 1.0 - ps) / norm
        } else {
            (r / r0).powf(-1.0 - ps) / norm
        };
        // uniform direction from Box-Muller normals
        let mut dir = [0.0f64; 16];
        let mut len2 = 0.0;
        for k in 0..dim {
            let pair = &rest[2 + 2 * (k / 2)..];
            let radius = (-2.0 * (1.0 - pair[0]).ln()).sqrt();
            let angle = 2.0 * PI * pair[1];
            let g = radius * if k % 2 == 0 { angle.cos() } else { angle.sin() };
            dir[k] = g;
            len2 += g * g;
        }
        if !(len2 > 0.0) {
            return 0.0;
        }
        let scale = r / len2.sqrt();
        let y_n = x[dim - 1] + scale * dir[dim - 1];
        if y_n <= 0.0 {
            return 0.0;
        }
        let mut y_t = [0.0f64; 16];
        for k in 0..dim - 1 {
            y_t[k] = x[k] + scale * dir[k];
        }
        let y_t = &y_t[..dim - 1];
        let diff = value(&x[..dim - 1], x[dim - 1]) - value(y_t, y_n);
        if diff == 0.0 {
            return 0.0;
        }
        let weight = if inside(y_t, y_n) { 1.0 } else { 2.0 };
        weight * pow.of(diff) * sphere * r.powf(-1.0 - ps) / density
    };
    if dim > 16 {
        return Err(Error::invalid("Monte Carlo energies support N <= 16"));
    }
    monte_carlo_integral(integrand, &domain, samples, seed)
}

/// `∫_{R^(N-1)} χ_n(|x'|)^p dx'`, exactly:
/// `|S^(N-2)| [n^(N-1)/(N-1) + Σ_k C(N-2, k) (n+1)^(N-2-k) (-1)^k / (p+k+1)]`.
pub fn cutoff_power_volume(n: u32, dim: u32, p: f64) -> Result<f64> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim as i64));
    }
    let m = dim - 2;
    let nf = n as f64;
    let mut shell = 0.0;
    let mut binom = 1.0;
    for k in 0..=m {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        shell += binom * (nf + 1.0).powi((m - k) as i32) * sign / (p + k as f64 + 1.0);
        binom = binom * (m - k) as f64 / (k + 1) as f64;
    }
    Ok(sphere_area(m) * (nf.powi(m as i32 + 1) / (m as f64 + 1.0) + shell))
}

/// `∫_{R^N_+} |u_n|^p x_N^(-ps) dx`: the exact tangential volume times the
/// one-dimensional Hardy term of the profile.
pub fn product_hardy_term(f: &ProductFunction, params: &HardyParams, cfg: &QuadConfig) -> Result<EnergyReport> {
    let volume = cutoff_power_volume(f.cutoff_n, f.dim, params.p())?;
    Ok(hardy_term_1d(&f.profile, params, cfg)?.scale(volume))
}
