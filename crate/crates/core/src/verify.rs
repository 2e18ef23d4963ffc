//! Verification campaigns: sweeps of the inequality, the identities and the
//! sharpness trends over a parameter grid, collected into one reproducible
//! report.
//!
//! A [`CampaignSpec`] is plain data (it round-trips through JSON); every
//! threshold a check applies lives in its [`Thresholds`], so tolerances are
//! configuration. [`run_campaign`] is deterministic in the spec: records are
//! produced in grid order, and all randomness derives from the spec's seed.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::constants::{hardy_constant, kernel_reduction_integral, reduction_factor};
use crate::energies::{
    el_identity_check, gsr_residual, monte_carlo_energy, product_hardy_term, rayleigh_quotient,
    SAFETY_FACTOR,
};
use crate::error::{Error, Result};
use crate::functions::{
    admissibility_check, ground_state_family, random_admissible_profile, sharpness_sequence,
    Profile1D,
};
use crate::params::HardyParams;
use crate::quadrature::{EnergyReport, QuadConfig};

/// The checks a campaign can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Check {
    /// `E[u] / H[u] >= D_{1,p,s} (1 - inequality_rel)` for every profile.
    Inequality,
    /// `E - D H = c_p E_ω` within budget (`p = 2`), `>=` up to budget (`p > 2`).
    Gsr,
    /// The Euler–Lagrange identity at `el_points`.
    El,
    /// Margins of the ground-state family shrink along `eps_grid`.
    #[serde(rename = "SHARPNESS_1D")]
    Sharpness1d,
    /// Monte Carlo quotients of `χ_n ⊗ φ` approach `A` times the 1D quotient.
    #[serde(rename = "SHARPNESS_ND")]
    SharpnessNd,
    /// The tangential kernel integral against its closed form.
    Reduction,
}

/// Cartesian grid of parameter triples. One-dimensional checks run at the
/// points with `N = 1`, the others at `N >= 2`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Grid {
    #[serde(rename = "N")]
    pub dims: Vec<i64>,
    pub p: Vec<f64>,
    pub s: Vec<f64>,
}

/// A catalog name or an explicit profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileEntry {
    /// `hat`, `trapezoid`, `smooth_bump` or `ground_state_family` (`ε = 0.2`).
    Named(String),
    Explicit(Profile1D),
}

impl ProfileEntry {
    fn label(&self, index: usize) -> String {
        match self {
            ProfileEntry::Named(name) => name.clone(),
            ProfileEntry::Explicit(_) => format!("custom#{index}"),
        }
    }

    fn resolve(&self, params: &HardyParams) -> Result<Profile1D> {
        match self {
            ProfileEntry::Explicit(p) => Ok(p.clone()),
            ProfileEntry::Named(name) => catalog_profile(name, params),
        }
    }
}

/// The named profiles accepted in campaign specs and on the command line.
pub const CATALOG: [&str; 4] = ["hat", "trapezoid", "smooth_bump", "ground_state_family"];

/// Resolves a catalog name; the ground-state family uses `ε = 0.2`.
pub fn catalog_profile(name: &str, params: &HardyParams) -> Result<Profile1D> {
    match name {
        "hat" => Ok(Profile1D::standard_hat()),
        "trapezoid" => Profile1D::trapezoid(0.0, 0.0, 1.0, 2.0, 1.0),
        "smooth_bump" => Profile1D::smooth_bump(1.0, 0.75, 1.0),
        "ground_state_family" => ground_state_family(0.2, params),
        other => Err(Error::invalid(format!(
            "unknown profile {other:?}; expected one of {CATALOG:?}"
        ))),
    }
}

/// Catalog profiles plus a number of random admissible piecewise profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProfileSet {
    pub catalog: Vec<ProfileEntry>,
    pub random_count: u64,
}

impl Default for ProfileSet {
    fn default() -> Self {
        ProfileSet {
            catalog: vec![ProfileEntry::Named("hat".into())],
            random_count: 0,
        }
    }
}

/// Pass/fail thresholds; the defaults are the contracts of the energies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    /// Relative slack allowed below `D` in the inequality.
    pub inequality_rel: f64,
    /// Multiplier on summed error estimates for identities.
    pub safety_factor: f64,
    /// `|E - D H - E_ω| <= gsr_rel · max(E, 1)` at `p = 2`.
    pub gsr_rel: f64,
    pub el_rel: f64,
    pub reduction_rel: f64,
    pub reduction_scaling_rel: f64,
    /// Required `margin(last ε) <= sharpness_contraction · margin(first ε)`.
    pub sharpness_contraction: f64,
    /// Standard errors allowed in Monte Carlo comparisons.
    pub mc_sigmas: f64,
    /// Relative distance of the last Monte Carlo quotient to its target.
    pub nd_target_rel: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            inequality_rel: 1e-3,
            safety_factor: SAFETY_FACTOR,
            gsr_rel: 1e-3,
            el_rel: 1e-5,
            reduction_rel: 1e-8,
            reduction_scaling_rel: 1e-10,
            sharpness_contraction: 0.25,
            mc_sigmas: 3.0,
            nd_target_rel: 0.1,
        }
    }
}

/// Everything a campaign does, as data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CampaignSpec {
    pub grid: Grid,
    pub profiles: ProfileSet,
    pub checks: Vec<Check>,
    /// Configuration of the double integrals (energies).
    pub quad: QuadConfig,
    /// Configuration of the single integrals (constants, EL, reduction).
    pub line_quad: QuadConfig,
    pub seed: u64,
    pub thresholds: Thresholds,
    pub el_points: Vec<f64>,
    pub reduction_offsets: Vec<f64>,
    pub eps_grid: Vec<f64>,
    pub n_grid: Vec<u32>,
    pub mc_samples: u64,
}

impl Default for CampaignSpec {
    fn default() -> Self {
        CampaignSpec {
            grid: Grid::default(),
            profiles: ProfileSet::default(),
            checks: Vec::new(),
            quad: QuadConfig::two_d().with_rel_tol(1e-6),
            line_quad: QuadConfig::one_d().with_rel_tol(1e-10),
            seed: 0,
            thresholds: Thresholds::default(),
            el_points: vec![0.5, 1.0, 2.0],
            reduction_offsets: vec![1.0, 2.0],
            eps_grid: vec![0.4, 0.2, 0.1, 0.05],
            n_grid: vec![2, 4, 8],
            mc_samples: 1_000_000,
        }
    }
}

/// Outcome of one record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The check does not apply (e.g. an inadmissible profile for these
    /// parameters, or GSR at `p < 2`).
    Skipped,
    /// A computation failed; the message is in `error`.
    Error,
}

/// One checked statement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub check: Check,
    #[serde(rename = "N")]
    pub dim: u32,
    pub p: f64,
    pub s: f64,
    pub subject: String,
    /// Computed values by name.
    pub values: BTreeMap<String, f64>,
    /// How far inside the acceptance region the result lies (positive = inside).
    pub margin: Option<f64>,
    /// The tolerance the margin was measured against.
    pub budget: Option<f64>,
    pub status: Status,
    /// For failures: the violated statement with both sides.
    pub violation: Option<String>,
    pub error: Option<String>,
}

/// Record counts by status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub errors: usize,
}

/// What is needed to rerun the campaign bit-for-bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reproducibility {
    pub seed: u64,
    pub quad: QuadConfig,
    pub line_quad: QuadConfig,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub records: Vec<Record>,
    pub summary: Summary,
    /// Grid points that were filtered, and why.
    pub notices: Vec<String>,
    pub reproducibility: Reproducibility,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0 && self.summary.errors == 0
    }
}

impl CampaignSpec {
    /// Rejects specs that cannot be run at all.
    pub fn validate(&self) -> Result<()> {
        self.quad.validate()?;
        self.line_quad.validate()?;
        if self.checks.contains(&Check::Sharpness1d) {
            check_eps_grid(&self.eps_grid)?;
        }
        if self.checks.contains(&Check::SharpnessNd) {
            check_n_grid(&self.n_grid)?;
            if self.mc_samples == 0 {
                return Err(Error::invalid("mc_samples must be positive"));
            }
        }
        if self.el_points.iter().any(|x| !(*x > 0.0)) {
            return Err(Error::invalid("el_points must be positive"));
        }
        if self.reduction_offsets.iter().any(|m| !(*m > 0.0)) {
            return Err(Error::invalid("reduction_offsets must be positive"));
        }
        for entry in &self.profiles.catalog {
            if let ProfileEntry::Named(name) = entry {
                if !CATALOG.contains(&name.as_str()) {
                    return Err(Error::invalid(format!(
                        "unknown profile {name:?}; expected one of {CATALOG:?}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn check_eps_grid(eps: &[f64]) -> Result<()> {
    if eps.is_empty() || eps.iter().any(|e| !(*e > 0.0)) || eps.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::invalid("eps_grid must be positive and strictly decreasing"));
    }
    Ok(())
}

fn check_n_grid(n: &[u32]) -> Result<()> {
    if n.is_empty() || n[0] == 0 || n.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("n_grid must be positive and strictly increasing"));
    }
    Ok(())
}

/// Runs every requested check at every grid point.
///
/// Grid points on the critical line `ps = 1` are filtered with a notice;
/// other invalid points reject the spec. Failures of individual computations
/// are captured in their records.
pub fn run_campaign(spec: &CampaignSpec) -> Result<VerificationReport> {
    spec.validate()?;
    let mut notices = Vec::new();
    let mut points = Vec::new();
    for &n in &spec.grid.dims {
        for &p in &spec.grid.p {
            for &s in &spec.grid.s {
                match HardyParams::new(n, p, s) {
                    Ok(params) => points.push(params),
                    Err(Error::CriticalCase { gap, .. }) => notices.push(format!(
                        "filtered (N={n}, p={p}, s={s}): critical case ps = 1 (|ps - 1| = {gap:e})"
                    )),
                    Err(e) => return Err(e),
                }
            }
        }
    }
    let mut records = Vec::new();
    for params in &points {
        for check in &spec.checks {
            let one_d = params.dim() == 1;
            match (check, one_d) {
                (Check::Inequality, true) => inequality_records(spec, params, &mut records),
                (Check::Gsr, true) => gsr_records(spec, params, &mut records),
                (Check::El, true) => el_records(spec, params, &mut records),
                (Check::Sharpness1d, true) => records.push(sharpness_1d_record(spec, params)),
                (Check::SharpnessNd, false) => records.push(sharpness_nd_record(spec, params)),
                (Check::Reduction, false) => records.push(reduction_record(spec, params)),
                _ => {}
            }
        }
    }
    let mut summary = Summary {
        total: records.len(),
        ..Summary::default()
    };
    for r in &records {
        match r.status {
            Status::Pass => summary.passed += 1,
            Status::Fail => summary.failed += 1,
            Status::Skipped => summary.skipped += 1,
            Status::Error => summary.errors += 1,
        }
    }
    Ok(VerificationReport {
        records,
        summary,
        notices,
        reproducibility: Reproducibility {
            seed: spec.seed,
            quad: spec.quad,
            line_quad: spec.line_quad,
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
    })
}

fn record(check: Check, params: &HardyParams, subject: impl Into<String>) -> Record {
    Record {
        check,
        dim: params.dim(),
        p: params.p(),
        s: params.s(),
        subject: subject.into(),
        values: BTreeMap::new(),
        margin: None,
        budget: None,
        status: Status::Skipped,
        violation: None,
        error: None,
    }
}

impl Record {
    fn value(&mut self, name: &str, v: f64) -> &mut Self {
        self.values.insert(name.to_string(), v);
        self
    }

    fn report(&mut self, name: &str, r: &EnergyReport) -> &mut Self {
        self.value(name, r.value);
        self.value(&format!("{name}_error"), r.error_estimate)
    }

    /// Pass iff `margin >= 0`, where the margin is measured against `budget`.
    fn judge(&mut self, margin: f64, budget: f64, violation: impl FnOnce() -> String) {
        self.margin = Some(margin);
        self.budget = Some(budget);
        if margin >= 0.0 {
            self.status = Status::Pass;
        } else {
            self.status = Status::Fail;
            self.violation = Some(violation());
        }
    }

    fn failed_with(mut self, e: &Error) -> Record {
        self.status = Status::Error;
        self.error = Some(e.to_string());
        self
    }
}

fn profiles_for(spec: &CampaignSpec, params: &HardyParams) -> Vec<(String, Result<Profile1D>)> {
    let mut out: Vec<_> = spec
        .profiles
        .catalog
        .iter()
        .enumerate()
        .map(|(i, e)| (e.label(i), e.resolve(params)))
        .collect();
    for i in 0..spec.profiles.random_count {
        out.push((
            format!("random#{i}"),
            Ok(random_admissible_profile(params, spec.seed, i)),
        ));
    }
    out
}

/// Resolves a profile and checks admissibility; `None` means the record is
/// already final.
fn admissible(rec: &mut Record, profile: &Result<Profile1D>, params: &HardyParams) -> Option<Profile1D> {
    match profile {
        Err(e) => {
            rec.status = Status::Error;
            rec.error = Some(e.to_string());
            None
        }
        Ok(u) => {
            let a = admissibility_check(u, params);
            if a.admissible {
                Some(u.clone())
            } else {
                rec.status = Status::Skipped;
                rec.error = Some(a.diagnostic);
                None
            }
        }
    }
}

fn inequality_records(spec: &CampaignSpec, params: &HardyParams, out: &mut Vec<Record>) {
    for (label, profile) in profiles_for(spec, params) {
        let mut rec = record(Check::Inequality, params, label);
        let Some(u) = admissible(&mut rec, &profile, params) else {
            out.push(rec);
            continue;
        };
        match rayleigh_quotient(&u, params, &spec.quad) {
            Ok(q) => {
                let floor = q.sharp_constant * (1.0 - spec.thresholds.inequality_rel);
                rec.report("energy", &q.energy)
                    .report("hardy_term", &q.hardy_term)
                    .value("quotient", q.quotient)
                    .value("sharp_constant", q.sharp_constant)
                    .value("margin", q.margin);
                rec.judge(q.quotient - floor, q.sharp_constant * spec.thresholds.inequality_rel, || {
                    format!(
                        "E/H >= D (1 - {}): {} < {}",
                        spec.thresholds.inequality_rel, q.quotient, floor
                    )
                });
                out.push(rec);
            }
            Err(e) => out.push(rec.failed_with(&e)),
        }
    }
}

fn gsr_records(spec: &CampaignSpec, params: &HardyParams, out: &mut Vec<Record>) {
    for (label, profile) in profiles_for(spec, params) {
        let mut rec = record(Check::Gsr, params, label);
        if params.p() < 2.0 {
            rec.error = Some("the remainder form needs p >= 2".into());
            out.push(rec);
            continue;
        }
        let Some(u) = admissible(&mut rec, &profile, params) else {
            out.push(rec);
            continue;
        };
        match gsr_residual(&u, params, &spec.quad) {
            Ok(g) => {
                let t = spec.thresholds;
                rec.report("energy", &g.energy)
                    .report("hardy_term", &g.hardy_term)
                    .report("weighted_energy", &g.weighted_energy)
                    .value("lhs_gap", g.lhs_gap)
                    .value("c_p", g.c_p)
                    .value("slack", g.slack)
                    .value("error_sum", g.error_sum);
                let budget = t.safety_factor * g.error_sum;
                if params.p() == 2.0 {
                    let cap = t.gsr_rel * g.energy.value.max(1.0);
                    let bound = budget.min(cap);
                    rec.judge(bound - g.slack.abs(), bound, || {
                        format!(
                            "E - D H = E_ω: {} vs {} (|slack| {} > {})",
                            g.lhs_gap,
                            g.weighted_energy.value,
                            g.slack.abs(),
                            bound
                        )
                    });
                } else {
                    rec.judge(g.slack + budget, budget, || {
                        format!(
                            "E - D H >= c_p E_ω: {} < {}",
                            g.lhs_gap,
                            g.c_p * g.weighted_energy.value
                        )
                    });
                }
                out.push(rec);
            }
            Err(e) => out.push(rec.failed_with(&e)),
        }
    }
}

fn el_records(spec: &CampaignSpec, params: &HardyParams, out: &mut Vec<Record>) {
    for &x in &spec.el_points {
        let rec = record(Check::El, params, format!("x={x}"));
        match el_identity_check(x, params, &spec.line_quad) {
            Ok(r) => {
                let mut rec = rec;
                rec.value("x", x)
                    .report("lhs", &r.lhs)
                    .value("rhs", r.rhs)
                    .value("relative_error", r.relative_error);
                let tol = spec.thresholds.el_rel;
                rec.judge(tol - r.relative_error, tol, || {
                    format!("EL identity at x={x}: lhs {} vs rhs {}", r.lhs.value, r.rhs)
                });
                out.push(rec);
            }
            Err(e) => out.push(rec.failed_with(&e)),
        }
    }
}

/// One point of the one-dimensional sharpness curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpnessPoint1d {
    pub eps: f64,
    pub quotient: f64,
    pub margin: f64,
    pub energy: EnergyReport,
    pub hardy_term: EnergyReport,
}

/// Rayleigh quotients of the ground-state family along a decreasing `ε` grid.
pub fn sharpness_curve_1d(
    params: &HardyParams,
    eps_grid: &[f64],
    cfg: &QuadConfig,
) -> Result<Vec<SharpnessPoint1d>> {
    check_eps_grid(eps_grid)?;
    let params = params.with_dim(1)?;
    eps_grid
        .iter()
        .map(|&eps| {
            let u = ground_state_family(eps, &params)?;
            let q = rayleigh_quotient(&u, &params, cfg)?;
            Ok(SharpnessPoint1d {
                eps,
                quotient: q.quotient,
                margin: q.margin,
                energy: q.energy,
                hardy_term: q.hardy_term,
            })
        })
        .collect()
}

fn sharpness_1d_record(spec: &CampaignSpec, params: &HardyParams) -> Record {
    let mut rec = record(Check::Sharpness1d, params, "ground_state_family");
    let curve = match sharpness_curve_1d(params, &spec.eps_grid, &spec.quad) {
        Ok(c) => c,
        Err(e) => return rec.failed_with(&e),
    };
    for pt in &curve {
        rec.value(&format!("margin@{}", pt.eps), pt.margin);
    }
    let first = curve[0].margin;
    let last = curve[curve.len() - 1].margin;
    let positive = curve.iter().all(|c| c.margin > 0.0);
    let decreasing = curve.windows(2).all(|w| w[1].margin < w[0].margin);
    let bound = spec.thresholds.sharpness_contraction * first;
    if positive && decreasing {
        rec.judge(bound - last, bound, || {
            format!("margin(last eps) <= {} margin(first eps): {last} > {bound}", spec.thresholds.sharpness_contraction)
        });
    } else {
        rec.margin = Some(bound - last);
        rec.budget = Some(bound);
        rec.status = Status::Fail;
        let margins: Vec<f64> = curve.iter().map(|c| c.margin).collect();
        rec.violation = Some(format!(
            "margins must be positive and strictly decreasing, got {margins:?}"
        ));
    }
    rec
}

/// One point of the `N`-dimensional sharpness curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpnessPointNd {
    pub n: u32,
    pub quotient: f64,
    pub stderr: f64,
    /// `A` times the one-dimensional quotient of the profile.
    pub target: f64,
    pub energy: EnergyReport,
    pub hardy_term: EnergyReport,
}

/// Monte Carlo quotients of `χ_n ⊗ φ` against `A · E[φ]/H[φ]`.
///
/// Every `n` uses the same seed, so the estimates are positively correlated
/// and their differences are less noisy than their standard errors suggest.
pub fn sharpness_curve_nd(
    params: &HardyParams,
    n_grid: &[u32],
    profile: &Profile1D,
    samples: u64,
    seed: u64,
) -> Result<Vec<SharpnessPointNd>> {
    if params.dim() < 2 {
        return Err(Error::InvalidDimension(params.dim() as i64));
    }
    check_n_grid(n_grid)?;
    let cfg = QuadConfig::two_d().with_rel_tol(1e-8);
    let one_d = params.with_dim(1)?;
    let target = reduction_factor(params) * rayleigh_quotient(profile, &one_d, &cfg)?.quotient;
    n_grid
        .iter()
        .map(|&n| {
            let u = sharpness_sequence(n, profile, params.dim())?;
            let energy = monte_carlo_energy(&u, params, samples, seed, u.tangential_radius())?;
            let hardy_term = product_hardy_term(&u, params, &cfg)?;
            Ok(SharpnessPointNd {
                n,
                quotient: energy.value / hardy_term.value,
                stderr: energy.error_estimate / hardy_term.value,
                target,
                energy,
                hardy_term,
            })
        })
        .collect()
}

/// Judges an `N`-dimensional sharpness curve: quotients non-increasing
/// within `sigmas` combined standard errors, never below `D_N - sigmas·σ`,
/// and the last within `target_rel` of the target. Returns the failures.
pub fn judge_sharpness_nd(curve: &[SharpnessPointNd], d_n: f64, sigmas: f64, target_rel: f64) -> Vec<String> {
    let mut failures = Vec::new();
    for w in curve.windows(2) {
        let sigma = (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
        if w[1].quotient > w[0].quotient + sigmas * sigma {
            failures.push(format!(
                "quotient increases from n={} to n={}: {} -> {} (σ = {sigma})",
                w[0].n, w[1].n, w[0].quotient, w[1].quotient
            ));
        }
    }
    for c in curve {
        if c.quotient < d_n - sigmas * c.stderr {
            failures.push(format!("n={}: quotient {} < D_N - {sigmas}σ = {}", c.n, c.quotient, d_n - sigmas * c.stderr));
        }
    }
    if let Some(last) = curve.last() {
        let rel = (last.quotient / last.target - 1.0).abs();
        if rel > target_rel {
            failures.push(format!(
                "n={}: quotient {} is {rel:.3} away from the target {} (allowed {target_rel})",
                last.n, last.quotient, last.target
            ));
        }
    }
    failures
}

fn sharpness_nd_record(spec: &CampaignSpec, params: &HardyParams) -> Record {
    let entry = spec
        .profiles
        .catalog
        .first()
        .cloned()
        .unwrap_or(ProfileEntry::Named("hat".into()));
    let mut rec = record(Check::SharpnessNd, params, entry.label(0));
    let profile = entry.resolve(params);
    let Some(u) = admissible(&mut rec, &profile, params) else {
        return rec;
    };
    let t = spec.thresholds;
    let result = hardy_constant(params, &spec.line_quad).and_then(|d| {
        sharpness_curve_nd(params, &spec.n_grid, &u, spec.mc_samples, spec.seed).map(|c| (d, c))
    });
    match result {
        Ok((d, curve)) => {
            rec.value("sharp_constant", d.value);
            for c in &curve {
                rec.value(&format!("quotient@{}", c.n), c.quotient);
                rec.value(&format!("stderr@{}", c.n), c.stderr);
            }
            let last = curve[curve.len() - 1];
            rec.value("target", last.target);
            let rel = (last.quotient / last.target - 1.0).abs();
            let failures = judge_sharpness_nd(&curve, d.value, t.mc_sigmas, t.nd_target_rel);
            rec.margin = Some(t.nd_target_rel - rel);
            rec.budget = Some(t.nd_target_rel);
            if failures.is_empty() {
                rec.status = Status::Pass;
            } else {
                rec.status = Status::Fail;
                rec.violation = Some(failures.join("; "));
            }
            rec
        }
        Err(e) => rec.failed_with(&e),
    }
}

fn reduction_record(spec: &CampaignSpec, params: &HardyParams) -> Record {
    let mut rec = record(Check::Reduction, params, "kernel");
    let t = spec.thresholds;
    let mut worst = 0.0f64;
    let mut unit: Option<f64> = None;
    let mut scaling_worst = 0.0f64;
    for &m in &spec.reduction_offsets {
        match kernel_reduction_integral(params, m, &spec.line_quad) {
            Ok(k) => {
                rec.value(&format!("quadrature@{m}"), k.quadrature.value)
                    .value(&format!("closed_form@{m}"), k.closed_form);
                worst = worst.max(k.relative_error());
                // m-scaling: I(m) m^(1+ps) is constant
                let scaled = k.quadrature.value * m.powf(1.0 + params.ps());
                match unit {
                    None => unit = Some(scaled),
                    Some(u0) => scaling_worst = scaling_worst.max((scaled / u0 - 1.0).abs()),
                }
            }
            Err(e) => return rec.failed_with(&e),
        }
    }
    rec.value("relative_error", worst).value("scaling_error", scaling_worst);
    let margin = (t.reduction_rel - worst).min(t.reduction_scaling_rel - scaling_worst);
    rec.judge(margin, t.reduction_rel, || {
        format!(
            "kernel reduction: relative error {worst:e} (allowed {:e}), scaling error {scaling_worst:e} (allowed {:e})",
            t.reduction_rel, t.reduction_scaling_rel
        )
    });
    rec
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(dims: Vec<i64>, p: Vec<f64>, s: Vec<f64>, checks: Vec<Check>) -> CampaignSpec {
        CampaignSpec {
            grid: Grid { dims, p, s },
            checks,
            ..CampaignSpec::default()
        }
    }

    #[test]
    fn empty_grid_gives_empty_report() {
        let r = run_campaign(&CampaignSpec::default()).unwrap();
        assert!(r.records.is_empty());
        assert_eq!(r.summary, Summary::default());
    }

    #[test]
    fn gsr_record_at_p_two() {
        let r = run_campaign(&spec(vec![1], vec![2.0], vec![0.25], vec![Check::Gsr])).unwrap();
        assert_eq!(r.records.len(), 1);
        let rec = &r.records[0];
        assert_eq!(rec.status, Status::Pass, "{rec:?}");
        assert!(rec.values["slack"].abs() <= rec.budget.unwrap());
    }

    #[test]
    fn critical_points_are_filtered_with_a_notice() {
        let r = run_campaign(&spec(vec![1], vec![2.0], vec![0.5, 0.25], vec![Check::El])).unwrap();
        assert_eq!(r.notices.len(), 1);
        assert!(r.notices[0].contains("critical"));
        assert_eq!(r.records.len(), 3);
        assert!(r.all_passed());
    }

    #[test]
    fn invalid_points_reject_the_spec() {
        assert!(run_campaign(&spec(vec![1], vec![0.5], vec![0.25], vec![Check::El])).is_err());
        let mut bad = spec(vec![1], vec![2.0], vec![0.25], vec![Check::Sharpness1d]);
        bad.eps_grid = vec![0.1, 0.2];
        assert!(run_campaign(&bad).is_err());
    }

    #[test]
    fn inadmissible_catalog_profiles_are_skipped() {
        let mut s = spec(vec![1], vec![2.0], vec![0.75], vec![Check::Inequality]);
        s.profiles.catalog = vec![ProfileEntry::Named("trapezoid".into()), ProfileEntry::Named("hat".into())];
        let r = run_campaign(&s).unwrap();
        assert_eq!(r.records[0].status, Status::Skipped);
        assert_eq!(r.records[1].status, Status::Pass);
    }

    #[test]
    fn reports_are_reproducible_and_serializable() {
        let mut s = spec(vec![1, 2], vec![2.0], vec![0.25], vec![Check::Inequality, Check::Reduction]);
        s.profiles.random_count = 2;
        s.seed = 11;
        let a = run_campaign(&s).unwrap();
        let b = run_campaign(&s).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let back: CampaignSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(a.all_passed(), "{a:#?}");
    }

    #[test]
    fn spec_parses_from_minimal_json() {
        let s: CampaignSpec = serde_json::from_str(
            r#"{"grid": {"N": [1], "p": [2], "s": [0.25]}, "checks": ["GSR", "SHARPNESS_1D"],
                "profiles": {"catalog": ["hat", {"kind": "hat", "left": 0, "peak": 0.5, "right": 1, "height": 2}]}}"#,
        )
        .unwrap();
        assert_eq!(s.checks, vec![Check::Gsr, Check::Sharpness1d]);
        assert_eq!(s.profiles.catalog.len(), 2);
        assert_eq!(s.thresholds, Thresholds::default());
    }

    #[test]
    fn sharpness_curve_validates_grid() {
        let p = HardyParams::new(1, 2.0, 0.25).unwrap();
        assert!(sharpness_curve_1d(&p, &[0.2, 0.4], &QuadConfig::two_d()).is_err());
        assert!(sharpness_curve_nd(&p, &[2, 4], &Profile1D::standard_hat(), 10, 0).is_err());
    }
}
