//! Closed-form test functions on the half-line and their products with the
//! tangential cutoff `χ_n` in higher dimensions.
//!
//! Every profile carries the metadata the quadrature needs: the power of its
//! behaviour at the boundary, the power of its decay at infinity, and a
//! Lipschitz bound. Internally a profile is lowered to a [`Shape`]: a list of
//! monotone pieces covering `[0, B]` and a power tail `c x^d` on `[B, ∞)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::HardyParams;

/// The closed forms in the catalog.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileKind {
    /// Identically zero.
    Zero,
    /// Piecewise linear: 0 at `left`, `height` at `peak`, 0 at `right`.
    /// `left == peak == 0` gives a profile that touches the boundary.
    Hat {
        left: f64,
        peak: f64,
        right: f64,
        height: f64,
    },
    /// `height * exp(1 - 1/(1 - z²))` with `z = (x - center)/radius`, `|z| < 1`.
    SmoothBump { center: f64, radius: f64, height: f64 },
    /// 0 at `rise_start`, `height` on `[plateau_start, plateau_end]`, 0 at
    /// `fall_end`; `rise_start == plateau_start == 0` touches the boundary.
    Trapezoid {
        rise_start: f64,
        plateau_start: f64,
        plateau_end: f64,
        fall_end: f64,
        height: f64,
    },
    /// `x^(-alpha) min(x^eps, x^(-eps))`.
    GroundStateFamily { eps: f64, alpha: f64 },
    /// Linear interpolation of `values` at `breaks` (`breaks[0] == 0`, last
    /// value 0). With `boundary_power = b` the first piece is
    /// `values[1] (x / breaks[1])^b` instead.
    CustomPiecewise {
        breaks: Vec<f64>,
        values: Vec<f64>,
        #[serde(default)]
        boundary_power: Option<f64>,
    },
}

/// A validated one-dimensional test function `x ↦ shape(dilation * x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile")]
pub struct Profile1D {
    #[serde(flatten)]
    kind: ProfileKind,
    dilation: f64,
}

#[derive(Deserialize)]
struct RawProfile {
    #[serde(flatten)]
    kind: ProfileKind,
    #[serde(default = "one")]
    dilation: f64,
}

fn one() -> f64 {
    1.0
}

impl TryFrom<RawProfile> for Profile1D {
    type Error = Error;

    fn try_from(raw: RawProfile) -> Result<Self> {
        Profile1D::new(raw.kind)?.dilated(raw.dilation)
    }
}

/// Where a profile lives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    Bounded { lo: f64, hi: f64 },
    UnboundedWithDecay,
}

/// A global Lipschitz constant, or only local Lipschitz continuity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lipschitz {
    Bounded(f64),
    Local,
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(msg()))
    }
}

fn finite(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite())
}

impl Profile1D {
    /// Validates the parameters of `kind`.
    pub fn new(kind: ProfileKind) -> Result<Self> {
        match &kind {
            ProfileKind::Zero => {}
            &ProfileKind::Hat {
                left,
                peak,
                right,
                height,
            } => {
                ensure(finite(&[left, peak, right, height]), || "hat parameters must be finite".into())?;
                ensure(left >= 0.0 && left <= peak && peak <= right && left < right, || {
                    format!("hat needs 0 <= left <= peak <= right, left < right; got {left}, {peak}, {right}")
                })?;
                ensure(left == 0.0 || left < peak, || {
                    "a hat may only jump at the boundary (left == peak needs left == 0)".into()
                })?;
                ensure(peak < right, || "hat needs peak < right (no jump at the right end)".into())?;
            }
            &ProfileKind::SmoothBump {
                center,
                radius,
                height,
            } => {
                ensure(finite(&[center, radius, height]), || "bump parameters must be finite".into())?;
                ensure(radius > 0.0 && center - radius >= 0.0, || {
                    format!("bump support [{}, {}] must lie in [0, ∞)", center - radius, center + radius)
                })?;
            }
            &ProfileKind::Trapezoid {
                rise_start,
                plateau_start,
                plateau_end,
                fall_end,
                height,
            } => {
                let pts = [rise_start, plateau_start, plateau_end, fall_end];
                ensure(finite(&[rise_start, plateau_start, plateau_end, fall_end, height]), || {
                    "trapezoid parameters must be finite".into()
                })?;
                ensure(rise_start >= 0.0 && pts.windows(2).all(|w| w[0] <= w[1]), || {
                    format!("trapezoid corners must be ordered in [0, ∞), got {pts:?}")
                })?;
                ensure(rise_start == 0.0 || rise_start < plateau_start, || {
                    "a trapezoid may only jump at the boundary".into()
                })?;
                ensure(plateau_end < fall_end, || "trapezoid needs plateau_end < fall_end".into())?;
            }
            &ProfileKind::GroundStateFamily { eps, alpha } => {
                ensure(eps > 0.0 && eps.is_finite(), || format!("eps must be > 0, got {eps}"))?;
                ensure(alpha.is_finite() && alpha != 0.0, || format!("alpha must be finite and nonzero, got {alpha}"))?;
            }
            ProfileKind::CustomPiecewise {
                breaks,
                values,
                boundary_power,
            } => {
                ensure(breaks.len() >= 2 && breaks.len() == values.len(), || {
                    "piecewise profile needs matching breaks/values with at least two points".into()
                })?;
                ensure(finite(breaks) && finite(values), || "piecewise data must be finite".into())?;
                ensure(breaks[0] == 0.0 && breaks.windows(2).all(|w| w[0] < w[1]), || {
                    "breaks must start at 0 and increase strictly".into()
                })?;
                ensure(*values.last().unwrap() == 0.0, || "piecewise profile must end at value 0".into())?;
                if let Some(b) = boundary_power {
                    ensure(b.is_finite() && *b > 0.0, || format!("boundary power must be > 0, got {b}"))?;
                    ensure(values[0] == 0.0, || "a boundary power needs values[0] == 0".into())?;
                }
            }
        }
        Ok(Profile1D {
            kind,
            dilation: 1.0,
        })
    }

    pub fn zero() -> Self {
        Profile1D {
            kind: ProfileKind::Zero,
            dilation: 1.0,
        }
    }

    pub fn hat(left: f64, peak: f64, right: f64, height: f64) -> Result<Self> {
        Self::new(ProfileKind::Hat {
            left,
            peak,
            right,
            height,
        })
    }

    /// The standard hat on `[0, 2]` with peak 1 at `x = 1`.
    pub fn standard_hat() -> Self {
        Self::hat(0.0, 1.0, 2.0, 1.0).expect("valid hat")
    }

    pub fn smooth_bump(center: f64, radius: f64, height: f64) -> Result<Self> {
        Self::new(ProfileKind::SmoothBump {
            center,
            radius,
            height,
        })
    }

    pub fn trapezoid(
        rise_start: f64,
        plateau_start: f64,
        plateau_end: f64,
        fall_end: f64,
        height: f64,
    ) -> Result<Self> {
        Self::new(ProfileKind::Trapezoid {
            rise_start,
            plateau_start,
            plateau_end,
            fall_end,
            height,
        })
    }

    pub fn custom_piecewise(breaks: Vec<f64>, values: Vec<f64>, boundary_power: Option<f64>) -> Result<Self> {
        Self::new(ProfileKind::CustomPiecewise {
            breaks,
            values,
            boundary_power,
        })
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn dilation(&self) -> f64 {
        self.dilation
    }

    /// The profile `x ↦ u(lambda * x)`.
    pub fn dilated(&self, lambda: f64) -> Result<Self> {
        ensure(lambda > 0.0 && lambda.is_finite(), || format!("dilation must be > 0, got {lambda}"))?;
        Ok(Profile1D {
            kind: self.kind.clone(),
            dilation: self.dilation * lambda,
        })
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            ProfileKind::Zero => true,
            ProfileKind::Hat { height, .. }
            | ProfileKind::SmoothBump { height, .. }
            | ProfileKind::Trapezoid { height, .. } => *height == 0.0,
            ProfileKind::GroundStateFamily { .. } => false,
            ProfileKind::CustomPiecewise { values, .. } => values.iter().all(|v| *v == 0.0),
        }
    }

    /// `u(x)` for `x >= 0` (the limit at 0 when it exists).
    pub fn evaluate(&self, x: f64) -> f64 {
        self.shape().value(x)
    }

    pub fn support(&self) -> Support {
        let l = self.dilation;
        match &self.kind {
            ProfileKind::Zero => Support::Bounded { lo: 0.0, hi: 0.0 },
            &ProfileKind::Hat { left, right, .. } => Support::Bounded {
                lo: left / l,
                hi: right / l,
            },
            &ProfileKind::SmoothBump { center, radius, .. } => Support::Bounded {
                lo: (center - radius) / l,
                hi: (center + radius) / l,
            },
            &ProfileKind::Trapezoid {
                rise_start,
                fall_end,
                ..
            } => Support::Bounded {
                lo: rise_start / l,
                hi: fall_end / l,
            },
            ProfileKind::GroundStateFamily { .. } => Support::UnboundedWithDecay,
            ProfileKind::CustomPiecewise { breaks, values, .. } => {
                let first = values.iter().position(|v| *v != 0.0).unwrap_or(0);
                let last = values.iter().rposition(|v| *v != 0.0).map_or(0, |i| i + 1);
                let lo = if first == 0 { 0.0 } else { breaks[first - 1] };
                Support::Bounded {
                    lo: lo / l,
                    hi: breaks[last.min(breaks.len() - 1)] / l,
                }
            }
        }
    }

    /// `b` with `u(x) ~ x^b` as `x → 0+`; `+∞` when `u` vanishes near 0.
    pub fn boundary_exponent(&self) -> f64 {
        self.shape().boundary_exponent()
    }

    /// `d` with `u(x) ~ x^d` as `x → ∞`, for profiles of unbounded support.
    pub fn decay_exponent(&self) -> Option<f64> {
        match self.kind {
            ProfileKind::GroundStateFamily { eps, alpha } => Some(-alpha - eps),
            _ => None,
        }
    }

    pub fn lipschitz(&self) -> Lipschitz {
        let l = self.dilation;
        match &self.kind {
            ProfileKind::Zero => Lipschitz::Bounded(0.0),
            &ProfileKind::Hat {
                left,
                peak,
                right,
                height,
            } => {
                let up = if peak > left { height.abs() / (peak - left) } else { 0.0 };
                Lipschitz::Bounded(l * up.max(height.abs() / (right - peak)))
            }
            &ProfileKind::SmoothBump { radius, height, .. } => {
                // max |d/dz exp(1 - 1/(1-z²))| over |z| < 1
                let slope = (0..2000)
                    .map(|i| {
                        let z = -1.0 + (i as f64 + 0.5) / 1000.0;
                        let q = 1.0 - z * z;
                        (1.0 - 1.0 / q).exp() * 2.0 * z.abs() / (q * q)
                    })
                    .fold(0.0, f64::max);
                Lipschitz::Bounded(l * height.abs() * slope / radius)
            }
            &ProfileKind::Trapezoid {
                rise_start,
                plateau_start,
                plateau_end,
                fall_end,
                height,
            } => {
                let up = if plateau_start > rise_start {
                    height.abs() / (plateau_start - rise_start)
                } else {
                    0.0
                };
                Lipschitz::Bounded(l * up.max(height.abs() / (fall_end - plateau_end)))
            }
            ProfileKind::GroundStateFamily { .. } => Lipschitz::Local,
            ProfileKind::CustomPiecewise {
                breaks,
                values,
                boundary_power,
            } => {
                if boundary_power.is_some_and(|b| b < 1.0) {
                    return Lipschitz::Local;
                }
                let start = usize::from(boundary_power.is_some());
                let mut slope = breaks
                    .windows(2)
                    .zip(values.windows(2))
                    .skip(start)
                    .map(|(b, v)| ((v[1] - v[0]) / (b[1] - b[0])).abs())
                    .fold(0.0, f64::max);
                if let Some(b) = boundary_power {
                    slope = slope.max(b * values[1].abs() / breaks[1]);
                }
                Lipschitz::Bounded(l * slope)
            }
        }
    }

    /// Lowers the profile to monotone pieces plus a power tail.
    pub(crate) fn shape(&self) -> Shape {
        self.base_shape().dilate(self.dilation).sealed()
    }

    fn base_shape(&self) -> Shape {
        let lin = |lo: f64, hi: f64, v0: f64, v1: f64| Piece::linear(lo, hi, v0, v1);
        let zero_tail = |start: f64| Tail {
            start,
            c: 0.0,
            d: 0.0,
        };
        let mut pieces = Vec::new();
        let tail = match &self.kind {
            ProfileKind::Zero => zero_tail(1.0),
            &ProfileKind::Hat {
                left,
                peak,
                right,
                height,
            } => {
                if left > 0.0 {
                    pieces.push(lin(0.0, left, 0.0, 0.0));
                }
                if peak > left {
                    pieces.push(lin(left, peak, 0.0, height));
                }
                pieces.push(lin(peak, right, height, 0.0));
                zero_tail(right)
            }
            &ProfileKind::SmoothBump {
                center,
                radius,
                height,
            } => {
                let lo = center - radius;
                if lo > 0.0 {
                    pieces.push(lin(0.0, lo, 0.0, 0.0));
                }
                let bump = PieceKind::Bump {
                    a: 0.0,
                    center,
                    radius,
                    height,
                };
                pieces.push(Piece::new(lo, center, bump));
                pieces.push(Piece::new(center, center + radius, bump));
                zero_tail(center + radius)
            }
            &ProfileKind::Trapezoid {
                rise_start,
                plateau_start,
                plateau_end,
                fall_end,
                height,
            } => {
                if rise_start > 0.0 {
                    pieces.push(lin(0.0, rise_start, 0.0, 0.0));
                }
                if plateau_start > rise_start {
                    pieces.push(lin(rise_start, plateau_start, 0.0, height));
                }
                if plateau_end > plateau_start {
                    pieces.push(lin(plateau_start, plateau_end, height, height));
                }
                pieces.push(lin(plateau_end, fall_end, height, 0.0));
                zero_tail(fall_end)
            }
            &ProfileKind::GroundStateFamily { eps, alpha } => {
                pieces.push(Piece::new(
                    0.0,
                    1.0,
                    PieceKind::PowLin {
                        a: eps - alpha,
                        c0: 1.0,
                        c1: 0.0,
                    },
                ));
                Tail {
                    start: 1.0,
                    c: 1.0,
                    d: -alpha - eps,
                }
            }
            ProfileKind::CustomPiecewise {
                breaks,
                values,
                boundary_power,
            } => {
                for (i, (b, v)) in breaks.windows(2).zip(values.windows(2)).enumerate() {
                    match boundary_power {
                        Some(pw) if i == 0 => pieces.push(Piece::new(
                            0.0,
                            b[1],
                            PieceKind::PowLin {
                                a: *pw,
                                c0: v[1] * b[1].powf(-pw),
                                c1: 0.0,
                            },
                        )),
                        _ => pieces.push(lin(b[0], b[1], v[0], v[1])),
                    }
                }
                zero_tail(*breaks.last().unwrap())
            }
        };
        if pieces.is_empty() {
            pieces.push(lin(0.0, tail.start, 0.0, 0.0));
        }
        Shape { pieces, tail }
    }
}

/// `χ_n(r)`: 1 for `r <= n`, `n + 1 - r` on the shell, 0 beyond `n + 1`.
pub fn cutoff_chi(n: u32, r: f64) -> f64 {
    let n = n as f64;
    if r <= n {
        1.0
    } else if r < n + 1.0 {
        n + 1.0 - r
    } else {
        0.0
    }
}

/// `evaluate(f, x)` as a free function.
pub fn evaluate(f: &Profile1D, x: f64) -> f64 {
    f.evaluate(x)
}

/// `u_ε(x) = x^(-α) min(x^ε, x^(-ε))`, an admissible approximation of the
/// ground state `x^(-α)`.
pub fn ground_state_family(eps: f64, params: &HardyParams) -> Result<Profile1D> {
    let alpha = params.alpha();
    if !(eps > 0.0 && eps < alpha.abs() + 1.0) {
        return Err(Error::invalid(format!(
            "eps must lie in (0, |alpha| + 1) = (0, {}), got {eps}",
            alpha.abs() + 1.0
        )));
    }
    Profile1D::new(ProfileKind::GroundStateFamily { eps, alpha })
}

/// `u_n(x', x_N) = χ_n(|x'|) φ(x_N)` on the half-space of dimension `dim`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductFunction {
    pub cutoff_n: u32,
    pub profile: Profile1D,
    pub dim: u32,
}

impl ProductFunction {
    /// `u_n` at `(x', x_N)`, with `x'` of length `dim - 1`.
    pub fn evaluate(&self, tangential: &[f64], normal: f64) -> f64 {
        let r = tangential.iter().map(|v| v * v).sum::<f64>().sqrt();
        cutoff_chi(self.cutoff_n, r) * self.profile.evaluate(normal)
    }

    /// Radius of the ball containing the tangential support, `n + 1`.
    pub fn tangential_radius(&self) -> f64 {
        self.cutoff_n as f64 + 1.0
    }
}

/// The trial functions `χ_n ⊗ φ`.
pub fn sharpness_sequence(n: u32, profile: &Profile1D, dim: u32) -> Result<ProductFunction> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim as i64));
    }
    if n < 1 {
        return Err(Error::invalid("cutoff scale n must be at least 1"));
    }
    Ok(ProductFunction {
        cutoff_n: n,
        profile: profile.clone(),
        dim,
    })
}

/// Outcome of [`admissibility_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    /// The violated condition, or a summary of the satisfied ones.
    pub diagnostic: String,
}

/// Whether both sides of the inequality are finite for `f`, decided from the
/// declared exponents alone.
pub fn admissibility_check(f: &Profile1D, params: &HardyParams) -> Admissibility {
    let (p, ps) = (params.p(), params.ps());
    let b = f.boundary_exponent();
    let fail = |diagnostic: String| Admissibility {
        admissible: false,
        diagnostic,
    };
    if b.is_finite() && !(p * b - ps > -1.0) {
        return fail(format!(
            "boundary: p*b - ps = {} is not > -1 (b = {b}); the Hardy term diverges at 0",
            p * b - ps
        ));
    }
    if let Some(d) = f.decay_exponent() {
        if !(p * d - ps < -1.0) {
            return fail(format!(
                "decay: p*d - ps = {} is not < -1 (d = {d}); the Hardy term diverges at infinity",
                p * d - ps
            ));
        }
    }
    // all catalogued profiles are locally Lipschitz on (0, ∞), i.e. of local
    // regularity 1 > s; interior jumps are rejected at construction
    Admissibility {
        admissible: true,
        diagnostic: format!(
            "boundary exponent {b}, decay exponent {:?}, locally Lipschitz",
            f.decay_exponent()
        ),
    }
}

/// Breakpoint grid of the random profiles: multiples of 1/4 up to 4.
const RANDOM_GRID: f64 = 0.25;

/// A random admissible piecewise-linear profile, reproducible from
/// `(seed, index)`. Profiles touch the boundary only when `ps < 1`; in the
/// supercritical regime they vanish at 0, linearly or with a power.
pub fn random_admissible_profile(params: &HardyParams, seed: u64, index: u64) -> Profile1D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let (p, ps) = (params.p(), params.ps());
    let pieces = rng.gen_range(2..=6usize);
    let mut cells: Vec<u32> = (1..=16).collect();
    // choose `pieces` distinct grid points for the breaks after 0
    for i in 0..pieces {
        let j = rng.gen_range(i..cells.len());
        cells.swap(i, j);
    }
    let mut chosen: Vec<u32> = cells[..pieces].to_vec();
    chosen.sort_unstable();
    let mut breaks = vec![0.0];
    breaks.extend(chosen.iter().map(|&c| c as f64 * RANDOM_GRID));
    let mut values: Vec<f64> = (0..=pieces)
        .map(|_| (rng.gen_range(-8..=8) as f64) / 8.0)
        .collect();
    values[pieces] = 0.0;
    if values[1..pieces].iter().all(|v| *v == 0.0) {
        values[1] = 1.0;
    }
    let subcritical = ps < 1.0;
    let boundary_power = if subcritical && rng.gen_bool(0.5) {
        None
    } else {
        values[0] = 0.0;
        // smallest admissible power is above (ps - 1)/p; keep a margin
        let candidates: Vec<f64> = [0.5, 1.0, 1.5, 2.0]
            .into_iter()
            .filter(|b| p * b - ps > -0.5)
            .collect();
        let b = candidates[rng.gen_range(0..candidates.len())];
        if values[1] == 0.0 {
            values[1] = 0.5;
        }
        if b == 1.0 {
            None
        } else {
            Some(b)
        }
    };
    Profile1D::custom_piecewise(breaks, values, boundary_power).expect("random profile is valid")
}

// ---------------------------------------------------------------------------
// Internal representation used by the energy quadrature.

/// The closed forms a monotone piece can take.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum PieceKind {
    /// `x^a (c0 + c1 x)`.
    PowLin { a: f64, c0: f64, c1: f64 },
    /// `x^a * height * exp(1 - 1/(1 - z²))`, `z = (x - center)/radius`.
    Bump {
        a: f64,
        center: f64,
        radius: f64,
        height: f64,
    },
}

/// A closed form restricted to `[lo, hi]`, where it is monotone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub kind: PieceKind,
    /// Values at the ends, cached.
    pub at_lo: f64,
    pub at_hi: f64,
}

impl Piece {
    pub(crate) fn new(lo: f64, hi: f64, kind: PieceKind) -> Self {
        let mut p = Piece {
            lo,
            hi,
            kind,
            at_lo: 0.0,
            at_hi: 0.0,
        };
        p.at_lo = p.value(lo);
        p.at_hi = p.value(hi);
        p
    }

    fn linear(lo: f64, hi: f64, v0: f64, v1: f64) -> Self {
        let c1 = (v1 - v0) / (hi - lo);
        let mut p = Piece::new(
            lo,
            hi,
            PieceKind::PowLin {
                a: 0.0,
                c0: v0 - c1 * lo,
                c1,
            },
        );
        // exact end values
        p.at_lo = v0;
        p.at_hi = v1;
        p
    }

    pub(crate) fn value(&self, x: f64) -> f64 {
        match self.kind {
            PieceKind::PowLin { a, c0, c1 } => {
                let lin = c0 + c1 * x;
                if a == 0.0 {
                    lin
                } else if lin == 0.0 {
                    0.0
                } else {
                    x.powf(a) * lin
                }
            }
            PieceKind::Bump {
                a,
                center,
                radius,
                height,
            } => {
                let z = (x - center) / radius;
                let q = 1.0 - z * z;
                if q <= 0.0 {
                    return 0.0;
                }
                let b = height * (1.0 - 1.0 / q).exp();
                if a == 0.0 {
                    b
                } else {
                    x.powf(a) * b
                }
            }
        }
    }

    /// `value(x + t) - value(x)` without cancellation for small `t`.
    pub(crate) fn increment(&self, x: f64, t: f64) -> f64 {
        let y = x + t;
        match self.kind {
            PieceKind::PowLin { a, c0, c1 } => {
                if a == 0.0 {
                    c1 * t
                } else {
                    // x^a [(1+t/x)^a - 1](c0 + c1 x) + y^a c1 t
                    let g = (a * (t / x).ln_1p()).exp_m1();
                    x.powf(a) * g * (c0 + c1 * x) + y.powf(a) * c1 * t
                }
            }
            PieceKind::Bump {
                a,
                center,
                radius,
                height,
            } => {
                let z = (x - center) / radius;
                let w = (y - center) / radius;
                let (qz, qw) = (1.0 - z * z, 1.0 - w * w);
                if qz <= 0.0 || qw <= 0.0 {
                    return self.value(y) - self.value(x);
                }
                let bx = height * (1.0 - 1.0 / qz).exp();
                // B(y) - B(x) = B(x) expm1(1/qz - 1/qw), 1/qz - 1/qw = -(w-z)(w+z)/(qz qw)
                let db = bx * (-(t / radius) * (w + z) / (qz * qw)).exp_m1();
                if a == 0.0 {
                    db
                } else {
                    let g = (a * (t / x).ln_1p()).exp_m1();
                    x.powf(a) * (g * (bx + db) + db)
                }
            }
        }
    }

    fn is_monotone_on(&self, lo: f64, hi: f64) -> bool {
        // sample the derivative sign; used only to validate splits
        let n = 64;
        let mut sign = 0.0;
        for i in 0..n {
            let x0 = lo + (hi - lo) * i as f64 / n as f64;
            let x1 = lo + (hi - lo) * (i + 1) as f64 / n as f64;
            let d = self.value(x1) - self.value(x0);
            if d != 0.0 {
                if sign != 0.0 && d.signum() != sign {
                    return false;
                }
                sign = d.signum();
            }
        }
        true
    }

    /// Interior points where the piece changes monotonicity.
    fn turning_points(&self) -> Vec<f64> {
        match self.kind {
            PieceKind::PowLin { a, c0, c1 } => {
                if a == 0.0 || c1 == 0.0 || c0 == 0.0 {
                    return vec![];
                }
                // d/dx x^a (c0 + c1 x) = x^(a-1) (a c0 + (a+1) c1 x)
                let x = -a * c0 / ((a + 1.0) * c1);
                if x > self.lo && x < self.hi {
                    vec![x]
                } else {
                    vec![]
                }
            }
            PieceKind::Bump {
                a,
                center,
                radius,
                ..
            } => {
                if a == 0.0 {
                    return vec![];
                }
                // log-derivative a/x - 2z / (r (1-z²)²) changes sign
                let dlog = |x: f64| {
                    let z = (x - center) / radius;
                    let q = 1.0 - z * z;
                    a / x - 2.0 * z / (radius * q * q)
                };
                let n = 256;
                let mut out = Vec::new();
                let h = (self.hi - self.lo) / n as f64;
                for i in 0..n {
                    let (mut l, mut r) = (self.lo + i as f64 * h, self.lo + (i + 1) as f64 * h);
                    let (fl, fr) = (dlog(l.max(self.lo + 1e-300)), dlog(r.min(self.hi * (1.0 - 1e-16))));
                    if fl.is_finite() && fr.is_finite() && fl * fr < 0.0 {
                        for _ in 0..200 {
                            let m = 0.5 * (l + r);
                            if m <= l || m >= r {
                                break;
                            }
                            if dlog(m) * fl > 0.0 {
                                l = m;
                            } else {
                                r = m;
                            }
                        }
                        out.push(0.5 * (l + r));
                    }
                }
                out
            }
        }
    }

    /// The `y` in `[lo, hi]` with `value(y) == v`, if `v` lies strictly
    /// between the end values.
    pub(crate) fn crossing(&self, v: f64) -> Option<f64> {
        let (a, b) = (self.at_lo, self.at_hi);
        if !((v > a.min(b)) && (v < a.max(b))) {
            return None;
        }
        if let PieceKind::PowLin { a: 0.0, c0, c1 } = self.kind {
            let y = (v - c0) / c1;
            return Some(y.clamp(self.lo, self.hi));
        }
        if let PieceKind::PowLin { a, c0, c1: 0.0 } = self.kind {
            let y = (v / c0).powf(1.0 / a);
            return Some(y.clamp(self.lo, self.hi));
        }
        let increasing = b > a;
        let (mut l, mut r) = (self.lo, self.hi);
        for _ in 0..200 {
            let m = 0.5 * (l + r);
            if m <= l || m >= r {
                break;
            }
            if (self.value(m) < v) == increasing {
                l = m;
            } else {
                r = m;
            }
        }
        Some(0.5 * (l + r))
    }

    /// `b` with `value(x) ~ x^b` as `x → lo = 0`.
    fn boundary_exponent(&self) -> f64 {
        match self.kind {
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

    pub(crate) fn is_zero(&self) -> bool {
        match self.kind {
            PieceKind::PowLin { c0, c1, .. } => c0 == 0.0 && c1 == 0.0,
            PieceKind::Bump { height, .. } => height == 0.0,
        }
    }

    fn times_power(&self, alpha: f64) -> Piece {
        let kind = match self.kind {
            PieceKind::PowLin { a, c0, c1 } => PieceKind::PowLin { a: a + alpha, c0, c1 },
            PieceKind::Bump {
                a,
                center,
                radius,
                height,
            } => PieceKind::Bump {
                a: a + alpha,
                center,
                radius,
                height,
            },
        };
        Piece::new(self.lo, self.hi, kind)
    }

    fn dilate(&self, l: f64) -> Piece {
        // value(l x) expressed on the new variable
        let kind = match self.kind {
            PieceKind::PowLin { a, c0, c1 } => PieceKind::PowLin {
                a,
                c0: c0 * l.powf(a),
                c1: c1 * l.powf(a + 1.0),
            },
            PieceKind::Bump {
                a,
                center,
                radius,
                height,
            } => PieceKind::Bump {
                a,
                center: center / l,
                radius: radius / l,
                height: height * l.powf(a),
            },
        };
        let mut p = Piece::new(self.lo / l, self.hi / l, kind);
        if let PieceKind::PowLin { a: 0.0, .. } = kind {
            p.at_lo = self.at_lo;
            p.at_hi = self.at_hi;
        }
        p
    }
}

/// `c x^d` on `[start, ∞)`; `c = 0` for compactly supported profiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Tail {
    pub start: f64,
    pub c: f64,
    pub d: f64,
}

impl Tail {
    pub(crate) fn value(&self, y: f64) -> f64 {
        if self.c == 0.0 {
            0.0
        } else {
            self.c * y.powf(self.d)
        }
    }

    /// `y >= start` with `value(y) == v`, if any.
    pub(crate) fn crossing(&self, v: f64) -> Option<f64> {
        if self.c == 0.0 || self.d == 0.0 {
            return None;
        }
        let ratio = v / self.c;
        if !(ratio > 0.0) {
            return None;
        }
        let y = ratio.powf(1.0 / self.d);
        (y > self.start && y.is_finite()).then_some(y)
    }
}

/// Monotone pieces on `[0, tail.start]` followed by a power tail.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Shape {
    pub pieces: Vec<Piece>,
    pub tail: Tail,
}

impl Shape {
    pub(crate) fn value(&self, x: f64) -> f64 {
        if x >= self.tail.start {
            return self.tail.value(x);
        }
        let i = self.pieces.partition_point(|p| p.hi <= x).min(self.pieces.len() - 1);
        self.pieces[i].value(x)
    }

    pub(crate) fn boundary_exponent(&self) -> f64 {
        self.pieces
            .iter()
            .find(|p| !p.is_zero())
            .map_or(f64::INFINITY, |p| if p.lo == 0.0 { p.boundary_exponent() } else { f64::INFINITY })
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.tail.c == 0.0 && self.pieces.iter().all(Piece::is_zero)
    }

    /// The shape of `x^alpha * self`, re-split into monotone pieces.
    pub(crate) fn times_power(&self, alpha: f64) -> Shape {
        let mut pieces = Vec::with_capacity(self.pieces.len() + 2);
        for piece in &self.pieces {
            let q = piece.times_power(alpha);
            let mut lo = q.lo;
            for t in q.turning_points() {
                pieces.push(Piece::new(lo, t, q.kind));
                lo = t;
            }
            pieces.push(Piece::new(lo, q.hi, q.kind));
        }
        debug_assert!(pieces.iter().all(|p| p.is_monotone_on(p.lo, p.hi)));
        Shape {
            pieces,
            tail: Tail {
                d: self.tail.d + alpha,
                ..self.tail
            },
        }
        .sealed()
    }

    /// Makes the cached end values agree exactly at every junction.
    ///
    /// Profiles are continuous, but evaluating two closed forms at their
    /// common end can differ in the last bit. The energies only ever use
    /// differences anchored at these cached values, so a one-ulp mismatch
    /// would act as a jump, whose energy diverges for `ps >= 1`.
    fn sealed(mut self) -> Shape {
        for k in 1..self.pieces.len() {
            self.pieces[k].at_lo = self.pieces[k - 1].at_hi;
        }
        self
    }

    fn dilate(&self, l: f64) -> Shape {
        if l == 1.0 {
            return self.clone();
        }
        Shape {
            pieces: self.pieces.iter().map(|p| p.dilate(l)).collect(),
            tail: Tail {
                start: self.tail.start / l,
                c: self.tail.c * l.powf(self.tail.d),
                d: self.tail.d,
            },
        }
    }
}
