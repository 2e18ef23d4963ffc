//! The parameter triple `(N, p, s)` of the half-space Hardy inequality.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default half-width of the rejected band around the critical line `p*s = 1`.
pub const CRITICAL_GUARD: f64 = 1e-9;

/// Which side of the critical line `p*s = 1` a parameter triple lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `p*s < 1`: test functions may touch the boundary.
    Subcritical,
    /// `p*s > 1`: test functions must vanish at the boundary.
    Supercritical,
}

/// A validated parameter triple.
///
/// Construct through [`HardyParams::new`] (or [`make_params`]); the fields are
/// private so the derived quantities can never disagree with the triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardyParams {
    dim: u32,
    p: f64,
    s: f64,
    alpha: f64,
    regime: Regime,
}

impl HardyParams {
    pub fn new(dim: i64, p: f64, s: f64) -> Result<Self> {
        Self::with_guard(dim, p, s, CRITICAL_GUARD)
    }

    /// Like [`HardyParams::new`] with a caller-chosen critical band.
    pub fn with_guard(dim: i64, p: f64, s: f64, guard: f64) -> Result<Self> {
        if dim < 1 || dim > u32::MAX as i64 {
            return Err(Error::InvalidDimension(dim));
        }
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidExponent(p));
        }
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::InvalidSmoothness(s));
        }
        let gap = (p * s - 1.0).abs();
        if gap < guard {
            return Err(Error::CriticalCase { gap, guard });
        }
        let alpha = (1.0 - p * s) / p;
        let regime = if p * s < 1.0 {
            Regime::Subcritical
        } else {
            Regime::Supercritical
        };
        Ok(HardyParams {
            dim: dim as u32,
            p,
            s,
            alpha,
            regime,
        })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// `p * s`, the order of the kernel singularity beyond the dimension.
    pub fn ps(&self) -> f64 {
        self.p * self.s
    }

    /// `(1 - p s) / p`; the ground state is `t^(-alpha)`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// The same `(p, s)` in a different dimension.
    pub fn with_dim(&self, dim: u32) -> Result<Self> {
        Self::new(dim as i64, self.p, self.s)
    }
}

impl<'de> Deserialize<'de> for HardyParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            dim: i64,
            p: f64,
            s: f64,
        }
        let raw = Raw::deserialize(d)?;
        HardyParams::new(raw.dim, raw.p, raw.s).map_err(serde::de::Error::custom)
    }
}

/// Validates `(N, p, s)` and populates `alpha` and the regime.
pub fn make_params(dim: i64, p: f64, s: f64) -> Result<HardyParams> {
    HardyParams::new(dim, p, s)
}

/// The exponent `alpha = (1 - ps)/p` of the ground state `omega(t) = t^(-alpha)`.
pub fn ground_state_exponent(params: &HardyParams) -> f64 {
    params.alpha()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let a = make_params(1, 2.0, 0.25).unwrap();
        assert_eq!(a.alpha(), 0.25);
        assert_eq!(a.regime(), Regime::Subcritical);

        let b = make_params(3, 2.0, 0.75).unwrap();
        assert_eq!(b.alpha(), -0.25);
        assert_eq!(b.regime(), Regime::Supercritical);

        assert!(matches!(
            make_params(2, 2.0, 0.5),
            Err(Error::CriticalCase { .. })
        ));
    }

    #[test]
    fn ground_state_exponents() {
        assert_eq!(ground_state_exponent(&make_params(1, 1.0, 0.5).unwrap()), 0.5);
        assert_eq!(ground_state_exponent(&make_params(1, 2.0, 0.75).unwrap()), -0.25);
        assert!(matches!(
            make_params(5, 3.0, 1.0 / 3.0),
            Err(Error::CriticalCase { .. })
        ));
    }

    #[test]
    fn distinct_rejections() {
        assert_eq!(make_params(0, 2.0, 0.25), Err(Error::InvalidDimension(0)));
        assert_eq!(make_params(1, 0.5, 0.25), Err(Error::InvalidExponent(0.5)));
        assert_eq!(make_params(1, 2.0, 1.0), Err(Error::InvalidSmoothness(1.0)));
        assert_eq!(make_params(1, 2.0, 0.0), Err(Error::InvalidSmoothness(0.0)));
        assert!(make_params(1, f64::NAN, 0.5).is_err());
        // inside the band but not exactly on the line
        assert!(matches!(
            make_params(1, 2.0, 0.5 + 1e-11),
            Err(Error::CriticalCase { .. })
        ));
        assert!(HardyParams::with_guard(1, 2.0, 0.5 + 1e-11, 1e-12).is_ok());
    }

    #[test]
    fn deserialize_validates() {
        let ok: HardyParams = serde_json::from_str(r#"{"dim":2,"p":2.0,"s":0.25}"#).unwrap();
        assert_eq!(ok.dim(), 2);
        assert!(serde_json::from_str::<HardyParams>(r#"{"dim":2,"p":2.0,"s":0.5}"#).is_err());
    }

    proptest! {
        #[test]
        fn alpha_sign_matches_regime(dim in 1i64..8, p in 1.0f64..6.0, s in 0.001f64..0.999) {
            prop_assume!((p * s - 1.0).abs() > 1e-6);
            let h = make_params(dim, p, s).unwrap();
            prop_assert_eq!(h.alpha() > 0.0, h.regime() == Regime::Subcritical);
            prop_assert_eq!(h.alpha() < 0.0, h.regime() == Regime::Supercritical);
            prop_assert_eq!(make_params(dim, p, s).unwrap(), h);
        }
    }
}
