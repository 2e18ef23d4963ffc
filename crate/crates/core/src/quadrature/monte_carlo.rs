//! Seeded, reproducible Monte Carlo integration over boxes.
//!
//! Sample `i` belongs to chunk `i / CHUNK`. Chunk `c` draws from ChaCha8
//! (`rand_chacha::ChaCha8Rng`) seeded with `seed` and switched to stream `c`;
//! each sample consumes one `f64` per coordinate (`Rng::gen::<f64>()`, 53
//! random bits) in coordinate order. Chunk statistics are merged in chunk
//! order, so the result depends only on `(f, box, samples, seed)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::EnergyReport;
use crate::error::{Error, Result};

const CHUNK: u64 = 1 << 14;

/// A non-degenerate axis-aligned box.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    sides: Vec<(f64, f64)>,
}

impl BoxDomain {
    pub fn new(sides: Vec<(f64, f64)>) -> Result<Self> {
        if sides.is_empty() {
            return Err(Error::invalid("Monte Carlo box needs at least one side"));
        }
        if let Some((lo, hi)) = sides.iter().find(|(lo, hi)| !(lo < hi) || !(hi - lo).is_finite()) {
            return Err(Error::invalid(format!("empty box side ({lo}, {hi})")));
        }
        Ok(BoxDomain { sides })
    }

    /// The unit cube `[0, 1]^dim`.
    pub fn unit(dim: usize) -> Result<Self> {
        Self::new(vec![(0.0, 1.0); dim])
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn volume(&self) -> f64 {
        self.sides.iter().map(|(lo, hi)| hi - lo).product()
    }
}

/// Streaming mean/variance (Welford, with Chan's merge).
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, o: Moments) {
        if o.n == 0 {
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n as f64 / n as f64;
        self.m2 += o.m2 + d * d * (self.n as f64) * (o.n as f64) / n as f64;
        self.n = n;
    }
}

/// Sample-mean estimate of `∫_box f`, with the sample standard error as the
/// error estimate.
pub fn monte_carlo_integral<F: Fn(&[f64]) -> f64>(
    f: F,
    domain: &BoxDomain,
    samples: u64,
    seed: u64,
) -> Result<EnergyReport> {
    if samples == 0 {
        return Err(Error::invalid("Monte Carlo needs at least one sample"));
    }
    let dim = domain.dim();
    let mut point = vec![0.0; dim];
    let mut total = Moments::default();
    let chunks = samples.div_ceil(CHUNK);
    for c in 0..chunks {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c);
        let count = CHUNK.min(samples - c * CHUNK);
        let mut local = Moments::default();
        for _ in 0..count {
            for (slot, (lo, hi)) in point.iter_mut().zip(&domain.sides) {
                *slot = lo + (hi - lo) * rng.gen::<f64>();
            }
            local.push(f(&point));
        }
        total.merge(local);
    }
    let volume = domain.volume();
    let stderr = if total.n > 1 {
        (total.m2 / (total.n - 1) as f64 / total.n as f64).sqrt()
    } else {
        0.0
    };
    Ok(EnergyReport {
        value: volume * total.mean,
        error_estimate: volume * stderr,
        evaluations: total.n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_graded, QuadConfig};

    #[test]
    fn constant_and_zero() {
        let b = BoxDomain::unit(2).unwrap();
        let r = monte_carlo_integral(|_| 1.0, &b, 1000, 1).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.error_estimate, 0.0);
        let r = monte_carlo_integral(|_| 0.0, &b, 1000, 1).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(BoxDomain::new(vec![]).is_err());
        assert!(BoxDomain::new(vec![(0.0, 0.0)]).is_err());
        assert!(BoxDomain::new(vec![(1.0, 0.0)]).is_err());
        let b = BoxDomain::unit(1).unwrap();
        assert!(monte_carlo_integral(|_| 1.0, &b, 0, 1).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let b = BoxDomain::new(vec![(0.0, 2.0), (-1.0, 1.0)]).unwrap();
        let f = |v: &[f64]| (v[0] * v[1]).sin().exp();
        let a = monte_carlo_integral(f, &b, 100_000, 42).unwrap();
        let c = monte_carlo_integral(f, &b, 100_000, 42).unwrap();
        assert_eq!(a, c);
        let d = monte_carlo_integral(f, &b, 100_000, 43).unwrap();
        assert_ne!(a.value, d.value);
    }

    #[test]
    fn smooth_3d_against_nested_quadrature() {
        let f = |x: f64, y: f64, z: f64| (x + 2.0 * y).cos() * (1.0 + z * z * x);
        let b = BoxDomain::unit(3).unwrap();
        let mc = monte_carlo_integral(|v: &[f64]| f(v[0], v[1], v[2]), &b, 400_000, 9).unwrap();
        let cfg = QuadConfig::one_d();
        let nested = integrate_graded(
            |x| {
                integrate_graded(
                    |y| integrate_graded(|z| f(x, y, z), 0.0, 1.0, &[], &cfg).unwrap().value,
                    0.0,
                    1.0,
                    &[],
                    &cfg,
                )
                .unwrap()
                .value
            },
            0.0,
            1.0,
            &[],
            &cfg,
        )
        .unwrap();
        assert!((mc.value - nested.value).abs() <= 3.0 * mc.error_estimate);
    }
}
