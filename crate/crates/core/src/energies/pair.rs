//! The one-dimensional double integral
//!
//! ```text
//! E_κ[f] = ∬_{(0,∞)²} |f(x) - f(y)|^p |x - y|^(-1-ps) (x y)^(-κ) dx dy
//! ```
//!
//! for a [`Shape`]: `κ = 0` is the Gagliardo energy, `κ = (1-ps)/2` the
//! weighted energy of the ground-state representation.
//!
//! By symmetry `E = 2 ∫_0^∞ dx ∫_x^∞ dy`. For `x` on a piece `P` of `[0, B]`
//! the inner integral runs over the rest of `P` (graded toward the diagonal),
//! over each later piece (graded toward the near end), and over the power tail
//! `[B, ∞)` (mapped to a finite interval). Where `p` is not an even integer
//! the integrand `|f(x) - f(y)|^p` is only finitely smooth at the crossing
//! `f(y) = f(x)`; each piece is split there. The outer integral is split at
//! the piece ends and at the points where such a crossing passes a piece end.
//! The region `x, y > B` is done in closed form up to a single
//! one-dimensional integral.

use std::cell::Cell;

use crate::error::{Error, Result};
use crate::functions::{Piece, PieceKind, Shape};
use crate::quadrature::{
    integrate_graded, integrate_half_line, refine, Abscissa, Accum, Engine, EnergyReport,
    GaussLegendre, Grading, QuadConfig, SingularityDescriptor,
};

/// `|z|^p` with the common integer cases done exactly.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Power {
    p: f64,
    /// `|z|^p` is a polynomial in `z`: no splitting at crossings needed.
    pub even: bool,
}

impl Power {
    pub(crate) fn new(p: f64) -> Self {
        Power {
            p,
            even: p.fract() == 0.0 && p % 2.0 == 0.0,
        }
    }

    #[inline]
    pub(crate) fn of(&self, z: f64) -> f64 {
        if self.p == 2.0 {
            z * z
        } else if self.p == 1.0 {
            z.abs()
        } else {
            z.abs().powf(self.p)
        }
    }
}

/// `b` with `f(x) - f(0) ~ x^b` on a piece starting at 0.
fn increment_exponent(piece: &Piece) -> f64 {
    match piece.kind {
        PieceKind::PowLin { a, c0, c1 } => {
            if a == 0.0 {
                if c1 != 0.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            } else if c0 != 0.0 {
                a
            } else if c1 != 0.0 {
                a + 1.0
            } else {
                f64::INFINITY
            }
        }
        PieceKind::Bump { .. } => f64::INFINITY,
    }
}

/// Relative distance below which a split point is merged into a piece end.
const END_SLACK: f64 = 1e-9;

struct PairIntegrand<'a> {
    shape: &'a Shape,
    pow: Power,
    ps: f64,
    kappa: f64,
}

impl PairIntegrand<'_> {
    #[inline]
    fn weight(&self, y: f64) -> f64 {
        if self.kappa == 0.0 {
            1.0
        } else {
            y.powf(-self.kappa)
        }
    }

    #[inline]
    fn kernel(&self, t: f64) -> f64 {
        t.powf(-1.0 - self.ps)
    }

    /// `∫_x^∞ |f(x) - f(y)|^p |x - y|^(-1-ps) y^(-κ) dy` for `x` on piece `i`.
    fn inner(&self, engine: &Engine<'_>, i: usize, x: f64) -> Accum {
        let pieces = &self.shape.pieces;
        let tail = &self.shape.tail;
        let own = &pieces[i];
        let p = self.pow;
        let mut acc = Accum::default();
        let fx = own.value(x);
        let to_end = own.hi - x;
        // f(P.hi) - f(x), without cancellation
        let rise = own.increment(x, to_end);

        if !own.is_zero() && to_end > 0.0 {
            let mut g = |q: Abscissa| {
                let t = q.from_left;
                p.of(own.increment(x, t)) * self.kernel(t) * self.weight(x + t)
            };
            let diag = Grading::singular(p.p - 1.0 - self.ps, x);
            acc.merge(engine.interval(0.0, to_end, diag, Grading::None, &mut g));
        }

        for q in &pieces[i + 1..] {
            if q.is_zero() && fx == 0.0 {
                continue;
            }
            // f(Q.lo) - f(x)
            let base = rise + (q.at_lo - own.at_hi);
            let gap = q.lo - x;
            let segment = |from: f64, to: f64, left: Grading, right: Grading, acc: &mut Accum| {
                let mut g = |a: Abscissa| {
                    let u = from + a.from_left;
                    let diff = base + q.increment(q.lo, u);
                    p.of(diff) * self.kernel(gap + u) * self.weight(q.lo + u)
                };
                acc.merge(engine.interval(from, to, left, right, &mut g));
            };
            let near = Grading::Near { offset: gap };
            let len = q.hi - q.lo;
            let slack = END_SLACK * (q.hi - q.lo);
            let interior = |y: &f64| *y > q.lo + slack && *y < q.hi - slack;
            match q.crossing(fx).filter(|_| !p.even).filter(interior) {
                Some(ystar) => {
                    let kink = Grading::singular(p.p, f64::INFINITY);
                    let c = ystar - q.lo;
                    segment(0.0, c, near, kink, &mut acc);
                    segment(c, len, kink, Grading::None, &mut acc);
                }
                None => segment(0.0, len, near, Grading::None, &mut acc),
            }
        }

        let b = tail.start;
        let gap = b - x;
        // f(B) - f(x), anchored at the last piece's cached end value
        let last = pieces.last().expect("a shape has at least one piece");
        let to_tail = rise + (last.at_hi - own.at_hi);
        if tail.c == 0.0 {
            // the tail is 0 = f(B), so f(x) = -(f(B) - f(x))
            let fx = -to_tail;
            if fx != 0.0 {
                let fxp = p.of(fx);
                if self.kappa == 0.0 {
                    acc.push(fxp * gap.powf(-self.ps) / self.ps);
                } else {
                    let mut g = |y: f64, _dy: f64| fxp * self.kernel(y - x) * self.weight(y);
                    let start = Grading::Near { offset: gap };
                    acc.merge(engine.half_line(b, 1.0 + self.ps + self.kappa, start, &mut g));
                }
            }
        } else {
            // f(y) - f(B) = c B^d expm1(d ln(1 + (y-B)/B))
            let cb = tail.value(b);
            let diff = |dy: f64| to_tail + cb * (tail.d * (dy / b).ln_1p()).exp_m1();
            let decay = 1.0 + self.ps + self.kappa - p.p * tail.d.max(0.0);
            let near = Grading::Near { offset: gap };
            match tail.crossing(fx).filter(|_| !p.even) {
                Some(ystar) => {
                    let kink = Grading::singular(p.p, f64::INFINITY);
                    let mut g = |a: Abscissa| {
                        let y = b + a.from_left;
                        p.of(diff(a.from_left)) * self.kernel(y - x) * self.weight(y)
                    };
                    acc.merge(engine.interval(b, ystar, near, kink, &mut g));
                    let mut h = |y: f64, dy: f64| {
                        p.of(diff(ystar - b + dy)) * self.kernel(y - x) * self.weight(y)
                    };
                    acc.merge(engine.half_line(ystar, decay, kink, &mut h));
                }
                None => {
                    let mut h = |y: f64, dy: f64| p.of(diff(dy)) * self.kernel(y - x) * self.weight(y);
                    acc.merge(engine.half_line(b, decay, near, &mut h));
                }
            }
        }
        acc
    }

    /// Values `f(b)` at every piece end at or beyond `from`, plus the limit
    /// of the tail at infinity; an outer node where `f(x)` equals one of them
    /// moves a crossing across a non-smooth point.
    fn crossing_values(&self, from: usize) -> Vec<f64> {
        let mut out: Vec<f64> = self.shape.pieces[from..]
            .iter()
            .flat_map(|q| [q.at_lo, q.at_hi])
            .collect();
        out.push(self.shape.tail.value(self.shape.tail.start));
        if self.shape.tail.c != 0.0 && self.shape.tail.d < 0.0 {
            out.push(0.0);
        }
        out
    }

    /// Outer segments of piece `i`, with their end gradings.
    fn outer_segments(&self, i: usize) -> Vec<(f64, f64, Grading, Grading)> {
        let piece = &self.shape.pieces[i];
        let end = Grading::singular(self.pow.p - self.ps, f64::INFINITY);
        let start = if piece.lo == 0.0 {
            let b = increment_exponent(piece);
            let e = if b.is_finite() {
                (-self.kappa).min(b * self.pow.p - self.ps - 2.0 * self.kappa)
            } else {
                -self.kappa
            };
            Grading::singular(e, f64::INFINITY)
        } else {
            end
        };
        let mut cuts: Vec<f64> = Vec::new();
        if !self.pow.even {
            // a crossing within roundoff of an end is that end
            let slack = END_SLACK * (piece.hi - piece.lo);
            for v in self.crossing_values(i + 1) {
                if let Some(c) = piece.crossing(v) {
                    if c > piece.lo + slack && c < piece.hi - slack {
                        cuts.push(c);
                    }
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let kink = Grading::singular(self.pow.p, f64::INFINITY);
        let mut out = Vec::with_capacity(cuts.len() + 1);
        let mut lo = (piece.lo, start);
        for c in cuts {
            out.push((lo.0, c, lo.1, kink));
            lo = (c, kink);
        }
        out.push((lo.0, piece.hi, lo.1, end));
        out
    }
}

/// `E_κ[f]` for a shape whose pieces are monotone.
pub(crate) fn pair_energy(
    shape: &Shape,
    p: f64,
    ps: f64,
    kappa: f64,
    cfg: &QuadConfig,
) -> Result<EnergyReport> {
    cfg.validate()?;
    if shape.is_zero() {
        return Ok(EnergyReport::zero());
    }
    let integrand = PairIntegrand {
        shape,
        pow: Power::new(p),
        ps,
        kappa,
    };
    let tail_tail = tail_tail(shape, p, ps, kappa, cfg)?;
    let segments: Vec<_> = (0..shape.pieces.len())
        .map(|i| (i, integrand.outer_segments(i)))
        .collect();
    let gl = GaussLegendre::new(cfg.panel_order);
    let near = refine(cfg, |levels| {
        let engine = Engine::new(&gl, cfg, levels);
        let mut acc = Accum::default();
        for (i, segs) in &segments {
            for &(a, b, left, right) in segs {
                let inner_evals = Cell::new(0u64);
                let mut outer = |q: Abscissa| {
                    let inner = integrand.inner(&engine, *i, q.x);
                    inner_evals.set(inner_evals.get() + inner.evals);
                    integrand.weight(q.x) * inner.sum
                };
                let part = engine.interval(a, b, left, right, &mut outer);
                acc.merge(part);
                acc.evals += inner_evals.get();
            }
        }
        Ok(acc)
    })?;
    Ok(near.scale(2.0) + tail_tail)
}

/// Both points on the power tail `c y^d`, `y >= B`:
///
/// ```text
/// 2 |c|^p B^(e+1) / (-e-1) · ∫_0^∞ |1 - (1+τ)^d|^p τ^(-1-ps) (1+τ)^(-κ) dτ,
/// e = d p - ps - 2κ.
/// ```
fn tail_tail(shape: &Shape, p: f64, ps: f64, kappa: f64, cfg: &QuadConfig) -> Result<EnergyReport> {
    let tail = shape.tail;
    if tail.c == 0.0 || tail.d == 0.0 {
        return Ok(EnergyReport::zero());
    }
    let e = tail.d * p - ps - 2.0 * kappa;
    if !(e < -1.0) {
        return Err(Error::InadmissibleFunction(format!(
            "tail exponent {} makes the energy diverge at infinity",
            tail.d
        )));
    }
    let pow = Power::new(p);
    let d = tail.d;
    let g = |tau: f64| pow.of((d * tau.ln_1p()).exp_m1()) * tau.powf(-1.0 - ps) * (1.0 + tau).powf(-kappa);
    let near = integrate_graded(g, 0.0, 1.0, &[SingularityDescriptor::left(p - 1.0 - ps)?], cfg)?;
    let decay = 1.0 + ps + kappa - p * d.max(0.0);
    let far = integrate_half_line(|tau, _| g(tau), 1.0, decay, None, cfg)?;
    let b = tail.start;
    let factor = 2.0 * pow.of(tail.c) * b.powf(e + 1.0) / (-e - 1.0);
    Ok((near + far).scale(factor))
}

/// `∫_0^∞ |f|^p x^(-ps) dx` for a shape.
pub(crate) fn power_moment(shape: &Shape, p: f64, ps: f64, cfg: &QuadConfig) -> Result<EnergyReport> {
    cfg.validate()?;
    if shape.is_zero() {
        return Ok(EnergyReport::zero());
    }
    let pow = Power::new(p);
    let kink = Grading::singular(p, f64::INFINITY);
    let mut segments = Vec::new();
    for piece in shape.pieces.iter().filter(|q| !q.is_zero()) {
        let start = if piece.lo == 0.0 {
            let b = piece_boundary_exponent(piece);
            if b.is_finite() {
                let e = p * b - ps;
                if !(e > -1.0) {
                    return Err(Error::InadmissibleFunction(format!(
                        "boundary exponent {b} makes the Hardy term diverge at 0"
                    )));
                }
                Grading::singular(e, f64::INFINITY)
            } else {
                Grading::None
            }
        } else {
            Grading::None
        };
        let slack = END_SLACK * (piece.hi - piece.lo);
        match piece.crossing(0.0).filter(|_| !pow.even) {
            Some(z) if z > piece.lo + slack && z < piece.hi - slack => {
                segments.push((*piece, piece.lo, z, start, kink));
                segments.push((*piece, z, piece.hi, kink, Grading::None));
            }
            _ => segments.push((*piece, piece.lo, piece.hi, start, Grading::None)),
        }
    }
    let gl = GaussLegendre::new(cfg.panel_order);
    let body = refine(cfg, |levels| {
        let engine = Engine::new(&gl, cfg, levels);
        let mut acc = Accum::default();
        for (piece, a, b, left, right) in &segments {
            let mut g = |q: Abscissa| pow.of(piece.value(q.x)) * q.x.powf(-ps);
            acc.merge(engine.interval(*a, *b, *left, *right, &mut g));
        }
        Ok(acc)
    })?;
    let tail = shape.tail;
    if tail.c == 0.0 {
        return Ok(body);
    }
    let e = tail.d * p - ps;
    if !(e < -1.0) {
        return Err(Error::InadmissibleFunction(format!(
            "tail exponent {} makes the Hardy term diverge at infinity",
            tail.d
        )));
    }
    Ok(body + EnergyReport::exact(pow.of(tail.c) * tail.start.powf(e + 1.0) / (-e - 1.0)))
}

fn piece_boundary_exponent(piece: &Piece) -> f64 {
    match piece.kind {
        PieceKind::PowLin { a, c0, c1 } => {
            if c0 != 0.0 {
                a
            } else if c1 != 0.0 {
                a + 1.0
            } else {
                f64::INFINITY
            }
        }
        PieceKind::Bump { .. } => f64::INFINITY,
    }
}

