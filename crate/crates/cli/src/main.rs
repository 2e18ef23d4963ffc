//! `hardy`: command-line front end of the verification lab.
//!
//! Each subcommand is a thin, validated pass-through to one library
//! operation and prints machine-readable records (see [`output`]). Exit
//! codes are part of the contract:
//!
//! | code | meaning                                             |
//! |------|-----------------------------------------------------|
//! | 0    | the computation finished (checks may still `fail`)  |
//! | 2    | a parameter or flag was rejected                    |
//! | 3    | a quadrature did not converge                       |
//! | 4    | the campaign configuration could not be read        |

mod output;

use std::io;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use hardy_core::energies::SAFETY_FACTOR;
use hardy_core::functions::ground_state_family;
use hardy_core::verify::{self, catalog_profile, CampaignSpec, Record, VerificationReport};
use hardy_core::{
    el_identity_check, gsr_constant, gsr_residual, hardy_constant, kernel_reduction_integral, make_params,
    rayleigh_quotient, reduction_factor, Error, HardyParams, Profile1D, QuadConfig,
};
use serde_json::Map;

use output::{emit, Fields, Format, OutputRecord, Status, Timing};

#[derive(Debug, Parser)]
#[command(
    name = "hardy",
    version,
    about = "Verification lab for the sharp fractional Hardy inequality on half-spaces",
    long_about = "Verification lab for the sharp fractional Hardy inequality on half-spaces:\n\n    \
        ∬ |u(x) - u(y)|^p |x - y|^(-N-ps) dx dy  >=  D_{N,p,s} ∫ |u(x)|^p x_N^(-ps) dx\n\n\
        Records are printed as JSON lines (default) or CSV. Exit codes: 0 ok, 2 parameter \
        rejection, 3 non-convergence, 4 configuration error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output encoding.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// The sharp constant D_{N,p,s} of the inequality (optimality of the constant).
    #[command(long_about = "The sharp constant of the fractional Hardy inequality on the half-space,\n\n    \
        D_{N,p,s} = 2 π^((N-1)/2) Γ((1+ps)/2) / Γ((N+ps)/2) ∫_0^1 |1 - r^((ps-1)/p)|^p (1-r)^(-1-ps) dr,\n\n\
        which cannot be improved. Prints the value, the closed-form prefactor \
        (exactly 2 for N = 1), the one-dimensional integral, its error estimate, and the \
        cross-check D_{N,p,s} = A · D_{1,p,s} with the dimensional reduction factor A.")]
    Constant {
        #[command(flatten)]
        point: Point,
        /// Relative tolerance of the radial integral.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// The remainder constant c_p of the ground-state representation (p >= 2).
    #[command(long_about = "The remainder constant of the ground-state representation,\n\n    \
        c_p = min over 0 < τ < 1/2 of (1-τ)^p - τ^p + p τ^(p-1),\n\n\
        defined for 2 <= p < ∞, with c_2 = 1 (the representation is then an identity).")]
    Cp {
        #[arg(long)]
        p: f64,
    },
    /// The Rayleigh quotient `E[u]/H[u]` of a profile against `D_{1,p,s}` (the one-dimensional inequality).
    #[command(long_about = "The Rayleigh quotient E[u] / H[u] of a half-line profile, compared with the \
        sharp constant D_{1,p,s} of the fractional Hardy inequality: the inequality states \
        quotient >= D, with equality at p = 1 exactly for non-increasing profiles.")]
    Quotient {
        #[command(flatten)]
        rate: Rate,
        #[command(flatten)]
        profile: ProfileArg,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// The ground-state representation `E[u] - D H[u] >= c_p E_ω[x^α u]` (p >= 2).
    #[command(long_about = "The ground-state representation of the half-line energy: for p >= 2,\n\n    \
        E[u] - D_{1,p,s} H[u] >= c_p E_ω[v],   v = x^α u,  α = (1-ps)/p,\n\n\
        with equality when p = 2. The status is pass when the slack is at least minus ten \
        times the summed error estimates.")]
    Gsr {
        #[command(flatten)]
        rate: Rate,
        #[command(flatten)]
        profile: ProfileArg,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// The Euler–Lagrange identity of the ground state ω(x) = x^(-(1-ps)/p).
    #[command(long_about = "The Euler–Lagrange identity satisfied by the ground state ω(x) = x^(-(1-ps)/p):\n\n    \
        2 PV ∫_0^∞ φ(ω(x) - ω(y)) |x - y|^(-1-ps) dy = D_{1,p,s} x^(-ps) ω(x)^(p-1),\n\n\
        φ(t) = |t|^(p-2) t. Prints both sides and their relative error.")]
    El {
        #[arg(long)]
        x: f64,
        #[command(flatten)]
        rate: Rate,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Optimality of the constant: quotients along the minimizing sequences.
    #[command(long_about = "Optimality of the constant D_{N,p,s}. For N = 1 the quotients of the \
        ground-state family x^(-α) min(x^ε, x^(-ε)) along a decreasing ε grid; their margins \
        above D must shrink to 0. For N >= 2 the Monte Carlo quotients of the product \
        functions χ_n(|x'|) φ(x_N), which approach A · E[φ]/H[φ] as n grows. One record per \
        grid point.")]
    Sharpness {
        #[command(flatten)]
        point: Point1,
        /// ε grid (N = 1), strictly decreasing.
        #[arg(long, value_delimiter = ',', default_values_t = [0.4, 0.2, 0.1, 0.05])]
        eps: Vec<f64>,
        /// Cutoff radii (N >= 2), strictly increasing.
        #[arg(long, value_delimiter = ',', default_values_t = [2, 4, 8])]
        n: Vec<u32>,
        /// Normal profile φ (N >= 2).
        #[arg(long, default_value = "hat")]
        profile: String,
        /// Monte Carlo samples per radius (N >= 2).
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        /// Monte Carlo seed (N >= 2).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative tolerance of the one-dimensional energies (N = 1).
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// The tangential kernel reduction ∫ (|y'|² + m²)^(-(N+ps)/2) dy' = A m^(-1-ps).
    #[command(long_about = "The tangential kernel reduction behind the dimension reduction of the constant:\n\n    \
        ∫_{R^(N-1)} (|y'|² + m²)^(-(N+ps)/2) dy' = A m^(-1-ps),\n    \
        A = π^((N-1)/2) Γ((1+ps)/2) / Γ((N+ps)/2),\n\n\
        by radial quadrature next to the closed form.")]
    Reduce {
        #[command(flatten)]
        point: Point,
        #[arg(long)]
        m: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Runs a verification campaign described by a JSON configuration file.
    #[command(long_about = "Runs every check of a campaign configuration (a JSON CampaignSpec) over \
        its parameter grid: the inequality itself, the ground-state representation, the \
        Euler–Lagrange identity, the kernel reduction and the sharpness of the constant. \
        Prints one record per check, then a summary record.")]
    Campaign {
        #[arg(long)]
        config: PathBuf,
    },
}

/// `(N, p, s)`.
#[derive(Debug, Args)]
struct Point {
    /// Dimension N >= 1.
    #[arg(long = "N")]
    dim: i64,
    #[command(flatten)]
    rate: Rate,
}

/// `(N, p, s)` with `N = 1` by default.
#[derive(Debug, Args)]
struct Point1 {
    /// Dimension N >= 1.
    #[arg(long = "N", default_value_t = 1)]
    dim: i64,
    #[command(flatten)]
    rate: Rate,
}

/// `(p, s)`.
#[derive(Debug, Args)]
struct Rate {
    /// Integrability exponent p >= 1.
    #[arg(long)]
    p: f64,
    /// Smoothness 0 < s < 1, with ps != 1.
    #[arg(long)]
    s: f64,
}

#[derive(Debug, Args)]
struct ProfileArg {
    /// A catalog name (hat, trapezoid, smooth_bump, ground_state_family) or an
    /// inline JSON profile such as {"kind":"hat","left":0,"peak":1,"right":2,"height":1}.
    #[arg(long)]
    profile: String,
    /// ε of the ground-state family profile.
    #[arg(long)]
    eps: Option<f64>,
}

/// Why a command stopped.
enum Failure {
    Core(Error),
    Config(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::NonConvergence { .. }) => 3,
            Failure::Core(_) => 2,
            Failure::Config(_) => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Config(m) => m.clone(),
        }
    }
}

/// What a command computed, before the envelope is added.
struct Row {
    inputs: Fields,
    results: Fields,
    status: Status,
}

impl Row {
    fn ok(inputs: Fields, results: Fields) -> Self {
        Row {
            inputs,
            results,
            status: Status::Ok,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let name = command_name(&cli.command);
    let start = Instant::now();
    let outcome = run(&cli.command);
    let timing = Timing::from(start.elapsed());
    let envelope = |row: Row| OutputRecord {
        command: name.to_string(),
        argv: argv.clone(),
        inputs: row.inputs.into_map(),
        results: row.results.into_map(),
        status: row.status,
        error: None,
        timing,
    };
    let (records, code) = match outcome {
        Ok(rows) => (rows.into_iter().map(envelope).collect::<Vec<_>>(), 0),
        Err(failure) => {
            let message = failure.message();
            eprintln!("error: {message}");
            let record = OutputRecord {
                command: name.to_string(),
                argv: argv.clone(),
                inputs: Map::new(),
                results: Map::new(),
                status: Status::Error,
                error: Some(message),
                timing,
            };
            (vec![record], failure.exit_code())
        }
    };
    if let Err(e) = emit(&records, cli.format, &mut io::stdout().lock()) {
        // a closed pipe is not worth a panic
        if e.kind() != io::ErrorKind::BrokenPipe {
            eprintln!("error: cannot write output: {e}");
            return ExitCode::FAILURE;
        }
    }
    ExitCode::from(code)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Constant { .. } => "constant",
        Command::Cp { .. } => "cp",
        Command::Quotient { .. } => "quotient",
        Command::Gsr { .. } => "gsr",
        Command::El { .. } => "el",
        Command::Sharpness { .. } => "sharpness",
        Command::Reduce { .. } => "reduce",
        Command::Campaign { .. } => "campaign",
    }
}

fn run(c: &Command) -> Result<Vec<Row>, Failure> {
    match c {
        Command::Constant { point, tol } => cmd_constant(point, *tol).map(|r| vec![r]),
        Command::Cp { p } => cmd_cp(*p).map(|r| vec![r]),
        Command::Quotient { rate, profile, tol } => cmd_quotient(rate, profile, *tol).map(|r| vec![r]),
        Command::Gsr { rate, profile, tol } => cmd_gsr(rate, profile, *tol).map(|r| vec![r]),
        Command::El { x, rate, tol } => cmd_el(*x, rate, *tol).map(|r| vec![r]),
        Command::Sharpness {
            point,
            eps,
            n,
            profile,
            samples,
            seed,
            tol,
        } => {
            let params = make_params(point.dim, point.rate.p, point.rate.s)?;
            if params.dim() == 1 {
                cmd_sharpness_1d(&params, eps, *tol)
            } else {
                cmd_sharpness_nd(&params, n, profile, *samples, *seed)
            }
        }
        Command::Reduce { point, m, tol } => cmd_reduce(point, *m, *tol).map(|r| vec![r]),
        Command::Campaign { config } => cmd_campaign(config),
    }
}

fn tolerance(tol: f64, base: QuadConfig) -> Result<QuadConfig, Failure> {
    let cfg = base.with_rel_tol(tol);
    cfg.validate()?;
    Ok(cfg)
}

fn point_inputs(params: &HardyParams) -> Fields {
    Fields::new()
        .put("N", params.dim())
        .put("p", params.p())
        .put("s", params.s())
}

fn cmd_constant(point: &Point, tol: f64) -> Result<Row, Failure> {
    let params = make_params(point.dim, point.rate.p, point.rate.s)?;
    let cfg = tolerance(tol, QuadConfig::one_d())?;
    let d = hardy_constant(&params, &cfg)?;
    let d1 = hardy_constant(&params.with_dim(1)?, &cfg)?;
    let a = reduction_factor(&params);
    let results = Fields::new()
        .estimate("value", d.value, d.error_estimate)
        .put("prefactor", d.prefactor)
        .put("one_d_integral", d.one_d_integral)
        .put("alpha", params.alpha())
        .put("one_d_value", d1.value)
        .put("reduction_factor", a)
        .put("reduction_times_one_d", a * d1.value);
    Ok(Row::ok(point_inputs(&params).put("tol", tol), results))
}

fn cmd_cp(p: f64) -> Result<Row, Failure> {
    let c = gsr_constant(p)?;
    let results = Fields::new().put("value", c.value).put("minimizer_tau", c.minimizer_tau);
    Ok(Row::ok(Fields::new().put("p", p), results))
}

/// A catalog name, or a JSON profile when the argument starts with `{`.
fn resolve_profile(arg: &ProfileArg, params: &HardyParams) -> Result<Profile1D, Failure> {
    let text = arg.profile.trim();
    if text.starts_with('{') {
        return serde_json::from_str(text)
            .map_err(|e| Failure::Core(Error::InvalidArgument(format!("cannot parse profile: {e}"))));
    }
    match (text, arg.eps) {
        ("ground_state_family", Some(eps)) => Ok(ground_state_family(eps, params)?),
        (_, Some(_)) => Err(Error::InvalidArgument("--eps only applies to ground_state_family".into()).into()),
        (name, None) => Ok(catalog_profile(name, params)?),
    }
}

fn profile_inputs(params: &HardyParams, arg: &ProfileArg, tol: f64) -> Fields {
    let mut f = point_inputs(params).put("profile", &arg.profile).put("tol", tol);
    if let Some(eps) = arg.eps {
        f.set("eps", eps);
    }
    f
}

fn cmd_quotient(rate: &Rate, arg: &ProfileArg, tol: f64) -> Result<Row, Failure> {
    let params = make_params(1, rate.p, rate.s)?;
    let u = resolve_profile(arg, &params)?;
    let cfg = tolerance(tol, QuadConfig::two_d())?;
    let q = rayleigh_quotient(&u, &params, &cfg)?;
    let constant = hardy_constant(&params, &QuadConfig::one_d().with_rel_tol(1e-12))?;
    let results = Fields::new()
        .estimate("energy", q.energy.value, q.energy.error_estimate)
        .estimate("hardy_term", q.hardy_term.value, q.hardy_term.error_estimate)
        .estimate("quotient", q.quotient, q.error_budget(0.0))
        .put("sharp_constant", q.sharp_constant)
        .estimate("margin", q.margin, q.error_budget(constant.error_estimate));
    Ok(Row::ok(profile_inputs(&params, arg, tol), results))
}

fn cmd_gsr(rate: &Rate, arg: &ProfileArg, tol: f64) -> Result<Row, Failure> {
    let params = make_params(1, rate.p, rate.s)?;
    let u = resolve_profile(arg, &params)?;
    let cfg = tolerance(tol, QuadConfig::two_d())?;
    let g = gsr_residual(&u, &params, &cfg)?;
    let results = Fields::new()
        .estimate("energy", g.energy.value, g.energy.error_estimate)
        .estimate("hardy_term", g.hardy_term.value, g.hardy_term.error_estimate)
        .put("sharp_constant", g.sharp_constant)
        .put("lhs_gap", g.lhs_gap)
        .put("c_p", g.c_p)
        .estimate("weighted_energy", g.weighted_energy.value, g.weighted_energy.error_estimate)
        .estimate("slack", g.slack, g.error_sum)
        .put("budget", g.budget())
        .put("safety_factor", SAFETY_FACTOR);
    let status = if g.slack >= -g.budget() { Status::Pass } else { Status::Fail };
    Ok(Row {
        inputs: profile_inputs(&params, arg, tol),
        results,
        status,
    })
}

fn cmd_el(x: f64, rate: &Rate, tol: f64) -> Result<Row, Failure> {
    let params = make_params(1, rate.p, rate.s)?;
    let cfg = tolerance(tol, QuadConfig::one_d())?;
    let r = el_identity_check(x, &params, &cfg)?;
    let results = Fields::new()
        .estimate("lhs", r.lhs.value, r.lhs.error_estimate)
        .estimate("rhs", r.rhs, r.rhs_error)
        .put("relative_error", r.relative_error)
        .put("alpha", params.alpha());
    Ok(Row::ok(point_inputs(&params).put("x", x).put("tol", tol), results))
}

fn cmd_sharpness_1d(params: &HardyParams, eps: &[f64], tol: f64) -> Result<Vec<Row>, Failure> {
    let cfg = tolerance(tol, QuadConfig::two_d())?;
    let curve = verify::sharpness_curve_1d(params, eps, &cfg)?;
    let d = hardy_constant(params, &QuadConfig::one_d().with_rel_tol(1e-12))?;
    Ok(curve
        .iter()
        .map(|pt| {
            let inputs = point_inputs(params)
                .put("profile", "ground_state_family")
                .put("eps", pt.eps)
                .put("tol", tol);
            let results = Fields::new()
                .estimate("energy", pt.energy.value, pt.energy.error_estimate)
                .estimate("hardy_term", pt.hardy_term.value, pt.hardy_term.error_estimate)
                .put("quotient", pt.quotient)
                .put("sharp_constant", d.value)
                .put("margin", pt.margin);
            Row::ok(inputs, results)
        })
        .collect())
}

fn cmd_sharpness_nd(
    params: &HardyParams,
    n_grid: &[u32],
    profile: &str,
    samples: u64,
    seed: u64,
) -> Result<Vec<Row>, Failure> {
    let one_d = params.with_dim(1)?;
    let phi = catalog_profile(profile, &one_d)?;
    let curve = verify::sharpness_curve_nd(params, n_grid, &phi, samples, seed)?;
    let d = hardy_constant(params, &QuadConfig::one_d().with_rel_tol(1e-12))?;
    Ok(curve
        .iter()
        .map(|pt| {
            let inputs = point_inputs(params)
                .put("profile", profile)
                .put("n", pt.n)
                .put("samples", samples)
                .put("seed", seed);
            let results = Fields::new()
                .estimate("energy", pt.energy.value, pt.energy.error_estimate)
                .estimate("hardy_term", pt.hardy_term.value, pt.hardy_term.error_estimate)
                .estimate("quotient", pt.quotient, pt.stderr)
                .put("target", pt.target)
                .put("sharp_constant", d.value);
            Row::ok(inputs, results)
        })
        .collect())
}

fn cmd_reduce(point: &Point, m: f64, tol: f64) -> Result<Row, Failure> {
    let params = make_params(point.dim, point.rate.p, point.rate.s)?;
    let cfg = tolerance(tol, QuadConfig::one_d())?;
    let k = kernel_reduction_integral(&params, m, &cfg)?;
    let results = Fields::new()
        .estimate("quadrature", k.quadrature.value, k.quadrature.error_estimate)
        .put("closed_form", k.closed_form)
        .put("relative_error", k.relative_error())
        .put("reduction_factor", reduction_factor(&params));
    Ok(Row::ok(point_inputs(&params).put("m", m).put("tol", tol), results))
}

fn cmd_campaign(path: &PathBuf) -> Result<Vec<Row>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let spec: CampaignSpec = serde_json::from_str(&text)
        .map_err(|e| Failure::Config(format!("cannot parse {}: {e}", path.display())))?;
    spec.validate()
        .map_err(|e| Failure::Config(format!("invalid campaign {}: {e}", path.display())))?;
    let report = verify::run_campaign(&spec)?;
    let mut rows: Vec<Row> = report.records.iter().map(record_row).collect();
    rows.push(summary_row(&report));
    Ok(rows)
}

fn record_row(r: &Record) -> Row {
    let inputs = Fields::new()
        .put("check", r.check)
        .put("N", r.dim)
        .put("p", r.p)
        .put("s", r.s)
        .put("subject", &r.subject);
    let mut results = Fields::new()
        .put("values", &r.values)
        .put("margin", r.margin)
        .put("budget", r.budget);
    if let Some(v) = &r.violation {
        results.set("violation", v);
    }
    if let Some(e) = &r.error {
        results.set("error", e);
    }
    let status = match r.status {
        verify::Status::Pass => Status::Pass,
        verify::Status::Fail => Status::Fail,
        verify::Status::Skipped => Status::Skipped,
        verify::Status::Error => Status::Error,
    };
    Row {
        inputs,
        results,
        status,
    }
}

fn summary_row(report: &VerificationReport) -> Row {
    let s = report.summary;
    let results = Fields::new()
        .put("total", s.total)
        .put("passed", s.passed)
        .put("failed", s.failed)
        .put("skipped", s.skipped)
        .put("errors", s.errors)
        .put("notices", &report.notices)
        .put("reproducibility", &report.reproducibility);
    let status = if report.all_passed() { Status::Pass } else { Status::Fail };
    Row {
        inputs: Fields::new().put("check", "SUMMARY"),
        results,
        status,
    }
}
