//! Gamma-function utilities for the closed-form prefactors.
//!
//! `ln Γ` is evaluated with the Taylor series of `ln Γ(1 + z)` around `z = 0`
//! on `[0.5, 2.5]` (shifting by one where needed), upward recurrence on
//! `(2.5, 12)`, and the Stirling series beyond. The series keeps full relative
//! accuracy near the zeros of `ln Γ` at 1 and 2, where a Lanczos sum would
//! lose it.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const SERIES_TERMS: usize = 60;
const STIRLING_START: f64 = 12.0;

/// `ζ(k)` for `k = 0..=SERIES_TERMS` (entries 0 and 1 unused).
fn zeta_table() -> &'static [f64; SERIES_TERMS + 1] {
    static TABLE: OnceLock<[f64; SERIES_TERMS + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        // Euler-Maclaurin with cut M = 20 and Bernoulli terms through B_14.
        const M: f64 = 20.0;
        const BERNOULLI: [f64; 7] = [
            1.0 / 6.0,
            -1.0 / 30.0,
            1.0 / 42.0,
            -1.0 / 30.0,
            5.0 / 66.0,
            -691.0 / 2730.0,
            7.0 / 6.0,
        ];
        let mut out = [0.0; SERIES_TERMS + 1];
        for (k, slot) in out.iter_mut().enumerate().skip(2) {
            let kf = k as f64;
            let mut head = 0.0;
            for n in (1..20).rev() {
                head += (n as f64).powf(-kf);
            }
            let mut tail = M.powf(1.0 - kf) / (kf - 1.0) + 0.5 * M.powf(-kf);
            // rising factorial k (k+1) ... (k+2j-2) / (2j)!
            let mut coeff = kf / 2.0;
            let mut power = M.powf(-kf - 1.0);
            for (j, b) in BERNOULLI.iter().enumerate() {
                if j > 0 {
                    let j2 = 2.0 * j as f64;
                    coeff *= (kf + j2 - 1.0) * (kf + j2) / ((j2 + 1.0) * (j2 + 2.0));
                    power /= M * M;
                }
                tail += b * coeff * power;
            }
            *slot = head + tail;
        }
        out
    })
}

/// `ln Γ(1 + z)` for `|z| <= 0.5`.
fn ln_gamma_1p(z: f64) -> f64 {
    let zeta = zeta_table();
    let mut acc = 0.0;
    // Horner from the highest term: sum_{k>=2} (-z)^k zeta(k)/k
    for k in (2..=SERIES_TERMS).rev() {
        acc = acc * (-z) + zeta[k] / k as f64;
    }
    -EULER_GAMMA * z + acc * z * z
}

fn stirling(x: f64) -> f64 {
    const C: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    for c in C.iter().rev() {
        series = series * inv2 + c;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + series * inv
}

pub(crate) fn ln_gamma_positive(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        ln_gamma_1p(x) - x.ln()
    } else if x <= 1.5 {
        ln_gamma_1p(x - 1.0)
    } else if x <= 2.5 {
        (x - 2.0).ln_1p() + ln_gamma_1p(x - 2.0)
    } else if x < STIRLING_START {
        // Γ(x) = (x-1)(x-2)...(x-k) Γ(x-k): a sum of positive logs, no cancellation
        let mut shifted = x;
        let mut product = 1.0;
        while shifted > 2.5 {
            shifted -= 1.0;
            product *= shifted;
        }
        ln_gamma_positive(shifted) + product.ln()
    } else {
        stirling(x)
    }
}

/// Natural logarithm of `Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::invalid(format!("log_gamma needs x > 0, got {x}")));
    }
    Ok(ln_gamma_positive(x))
}

/// `ln |S^d|`, the log surface measure of the unit `d`-sphere in `R^(d+1)`.
pub fn ln_sphere_area(d: u32) -> f64 {
    let h = 0.5 * (d as f64 + 1.0);
    std::f64::consts::LN_2 + h * PI.ln() - ln_gamma_positive(h)
}

/// Surface measure of the unit `d`-sphere, `2 π^((d+1)/2) / Γ((d+1)/2)`.
pub fn sphere_area(d: u32) -> f64 {
    match d {
        0 => 2.0,
        1 => 2.0 * PI,
        2 => 4.0 * PI,
        _ => ln_sphere_area(d).exp(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_points() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert_eq!(log_gamma(2.0).unwrap(), 0.0);
        assert_relative_eq!(log_gamma(4.0).unwrap(), 6f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(
            log_gamma(0.5).unwrap(),
            0.5 * PI.ln(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn zeta_values() {
        let z = zeta_table();
        assert_relative_eq!(z[2], PI * PI / 6.0, max_relative = 1e-15);
        assert_relative_eq!(z[4], PI.powi(4) / 90.0, max_relative = 1e-15);
        assert_relative_eq!(z[3], 1.202_056_903_159_594_3, max_relative = 1e-15);
    }

    // reference values from 30-digit arithmetic (mpmath.loggamma)
    #[test]
    fn reference_values() {
        let cases = [
            (1e-3, 6.907_178_885_383_853_661_7),
            (0.1, 2.252_712_651_734_205_902),
            (1.5, -0.120_782_237_635_245_222_35),
            (2.5, 0.284_682_870_472_919_159_63),
            (7.3, 7.147_892_523_022_248_692_1),
            (33.0, 81.557_959_456_115_037_179),
            (1000.0, 5_905.220_423_209_181_211_8),
        ];
        for (x, want) in cases {
            assert_relative_eq!(log_gamma(x).unwrap(), want, max_relative = 1e-13);
        }
    }

    #[test]
    fn near_zeros_keep_relative_accuracy() {
        // ln Γ(1+z) ≈ -γ z for tiny z
        let z = 1e-9;
        assert_relative_eq!(
            log_gamma(1.0 + z).unwrap(),
            -EULER_GAMMA * z,
            max_relative = 1e-8
        );
        // ln Γ(2+z) ≈ (1-γ) z
        assert_relative_eq!(
            log_gamma(2.0 + z).unwrap(),
            (1.0 - EULER_GAMMA) * z,
            max_relative = 1e-8
        );
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn recurrence_on_log_grid() {
        for i in 0..=400 {
            let x = 10f64.powf(-2.0 + 4.0 * i as f64 / 400.0);
            let lhs = log_gamma(x + 1.0).unwrap().exp();
            let rhs = x * log_gamma(x).unwrap().exp();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        }
    }

    #[test]
    fn sphere_areas() {
        assert_eq!(sphere_area(0), 2.0);
        assert_relative_eq!(sphere_area(1), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(2), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(ln_sphere_area(2).exp(), 4.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(ln_sphere_area(1).exp(), 2.0 * PI, max_relative = 1e-14);
        for d in 2..40u32 {
            let rec = 2.0 * PI * sphere_area(d - 2) / (d as f64 - 1.0);
            assert_relative_eq!(sphere_area(d), rec, max_relative = 1e-12);
        }
    }
}
