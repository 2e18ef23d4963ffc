//! Acceptance suite: one PASS/FAIL line per criterion, each measured at its
//! stated tolerance and within its runtime budget. Exits non-zero if any
//! criterion fails.
//!
//! Checks are phrased `!(err <= tol)` so that a NaN counts as a failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use hardy_core::constants::{gsr_constant, gsr_objective, hardy_constant, kernel_reduction_integral, reduction_factor};
use hardy_core::energies::{el_identity_check, gsr_residual, monte_carlo_energy, rayleigh_quotient};
use hardy_core::functions::{ground_state_family, sharpness_sequence, Profile1D};
use hardy_core::verify::{
    judge_sharpness_nd, run_campaign, sharpness_curve_1d, sharpness_curve_nd, CampaignSpec, Check, Grid,
    ProfileSet,
};
use hardy_core::{HardyParams, QuadConfig};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn params(n: i64, p: f64, s: f64) -> HardyParams {
    HardyParams::new(n, p, s).expect("valid parameters")
}

fn energy_cfg() -> QuadConfig {
    QuadConfig::two_d().with_rel_tol(1e-7)
}

fn line_cfg() -> QuadConfig {
    QuadConfig::one_d().with_rel_tol(1e-10)
}

fn fail_if(failures: Vec<String>, ok: String) -> Outcome {
    if failures.is_empty() {
        Ok(ok)
    } else {
        Err(failures.join("; "))
    }
}

fn gsr_identity() -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for s in [0.25, 0.75] {
        let pr = params(1, 2.0, s);
        let profiles = [
            ("hat", Profile1D::standard_hat()),
            ("gsf(0.2)", ground_state_family(0.2, &pr).map_err(|e| e.to_string())?),
        ];
        for (name, u) in profiles {
            let g = gsr_residual(&u, &pr, &energy_cfg()).map_err(|e| e.to_string())?;
            let cap = 1e-3 * g.energy.value.max(1.0);
            worst = worst.max(g.slack.abs() / cap);
            if g.slack.abs() > g.budget() || g.slack.abs() > cap {
                failures.push(format!(
                    "{name} s={s}: E - D H = {} vs E_ω = {} (slack {:e}, 10×errors {:e}, cap {:e})",
                    g.lhs_gap, g.weighted_energy.value, g.slack, g.budget(), cap
                ));
            }
        }
    }
    fail_if(failures, format!("4 cases, worst |slack| / 1e-3·max(E,1) = {worst:.2e}"))
}

fn p_one_equality() -> Outcome {
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    let trapezoid = Profile1D::trapezoid(0.0, 0.0, 1.0, 2.0, 1.0).map_err(|e| e.to_string())?;
    let increasing = Profile1D::standard_hat();
    for s in [0.25, 0.75] {
        let pr = params(1, 1.0, s);
        let q = rayleigh_quotient(&trapezoid, &pr, &energy_cfg()).map_err(|e| e.to_string())?;
        let rel = (q.quotient - q.sharp_constant).abs() / q.sharp_constant;
        notes.push(format!("s={s}: |Q-D|/D = {rel:.1e}"));
        if rel > 1e-3 {
            failures.push(format!("trapezoid s={s}: Q = {} vs D = {}", q.quotient, q.sharp_constant));
        }
        let d_err = hardy_constant(&pr, &QuadConfig::one_d()).map_err(|e| e.to_string())?.error_estimate;
        let h = rayleigh_quotient(&increasing, &pr, &energy_cfg()).map_err(|e| e.to_string())?;
        let budget = 10.0 * h.error_budget(d_err);
        notes.push(format!("hat Q-D = {:.3} > {budget:.1e}", h.margin));
        if !(h.margin > budget) {
            failures.push(format!("hat s={s}: Q - D = {} not > 10×budget {budget}", h.margin));
        }
    }
    fail_if(failures, notes.join(", "))
}

fn inequality_sweep() -> Outcome {
    let spec = CampaignSpec {
        grid: Grid {
            dims: vec![1],
            p: vec![1.0, 1.5, 2.0, 3.0],
            s: vec![0.25, 0.75],
        },
        profiles: ProfileSet {
            catalog: vec![],
            random_count: 50,
        },
        checks: vec![Check::Inequality],
        quad: QuadConfig::two_d().with_rel_tol(1e-6),
        seed: 2024,
        ..CampaignSpec::default()
    };
    let report = run_campaign(&spec).map_err(|e| e.to_string())?;
    let min_rel_margin = report
        .records
        .iter()
        .filter_map(|r| Some(r.values.get("margin")? / r.values.get("sharp_constant")?))
        .fold(f64::INFINITY, f64::min);
    let failures: Vec<String> = report
        .records
        .iter()
        .filter(|r| r.status != hardy_core::verify::Status::Pass)
        .map(|r| {
            format!(
                "p={} s={} {}: {:?} {}",
                r.p,
                r.s,
                r.subject,
                r.status,
                r.violation.clone().or(r.error.clone()).unwrap_or_default()
            )
        })
        .collect();
    if report.records.len() != 400 {
        return Err(format!("expected 400 records, got {}", report.records.len()));
    }
    fail_if(
        failures,
        format!("{} records, smallest (Q - D)/D = {min_rel_margin:.3e}", report.records.len()),
    )
}

fn euler_lagrange() -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for (p, s) in [(1.0, 0.5), (2.0, 0.25), (2.0, 0.75), (3.0, 0.25)] {
        for x in [0.5, 1.0, 2.0] {
            let r = el_identity_check(x, &params(1, p, s), &line_cfg()).map_err(|e| e.to_string())?;
            worst = worst.max(r.relative_error);
            if !(r.relative_error <= 1e-5) {
                failures.push(format!("p={p} s={s} x={x}: lhs {} rhs {}", r.lhs.value, r.rhs));
            }
        }
    }
    fail_if(failures, format!("12 points, worst relative error {worst:.2e}"))
}

fn kernel_reduction() -> Outcome {
    let mut failures = Vec::new();
    let (mut worst, mut worst_scaling) = (0.0f64, 0.0f64);
    for n in [2, 3] {
        for (p, s) in [(2.0, 0.25), (2.0, 0.75)] {
            let pr = params(n, p, s);
            let k1 = kernel_reduction_integral(&pr, 1.0, &line_cfg()).map_err(|e| e.to_string())?;
            let k2 = kernel_reduction_integral(&pr, 2.0, &line_cfg()).map_err(|e| e.to_string())?;
            for k in [&k1, &k2] {
                worst = worst.max(k.relative_error());
                if !(k.relative_error() <= 1e-8) {
                    failures.push(format!("N={n} p={p} s={s}: {} vs {}", k.quadrature.value, k.closed_form));
                }
            }
            let scaling = (k2.quadrature.value / k1.quadrature.value * 2f64.powf(1.0 + pr.ps()) - 1.0).abs();
            worst_scaling = worst_scaling.max(scaling);
            if !(scaling <= 1e-10) {
                failures.push(format!("N={n} p={p} s={s}: m-scaling error {scaling:e}"));
            }
        }
    }
    fail_if(failures, format!("worst relative error {worst:.1e}, worst m-scaling error {worst_scaling:.1e}"))
}

fn constants() -> Outcome {
    let mut failures = Vec::new();
    let c2_dev = (1..1000)
        .map(|i| (gsr_objective(2.0, 0.5 * i as f64 / 1000.0) - 1.0).abs())
        .fold(0.0f64, f64::max)
        .max((gsr_constant(2.0).map_err(|e| e.to_string())?.value - 1.0).abs());
    if !(c2_dev <= 1e-14) {
        failures.push(format!("c_2 deviates from 1 by {c2_dev:e}"));
    }
    let c3 = gsr_constant(3.0).map_err(|e| e.to_string())?;
    let c3_err = (c3.value - (2.0 - 2f64.sqrt())).abs();
    if !(c3_err <= 1e-8) {
        failures.push(format!("c_3 = {} vs 2 - √2", c3.value));
    }
    let mut ratio_err = 0.0f64;
    for (p, s) in [(2.0, 0.25), (2.0, 0.75), (1.5, 0.25), (3.0, 0.25)] {
        let d1 = hardy_constant(&params(1, p, s), &line_cfg()).map_err(|e| e.to_string())?.value;
        for n in [1, 2, 3, 5] {
            let pr = params(n, p, s);
            let dn = hardy_constant(&pr, &line_cfg()).map_err(|e| e.to_string())?.value;
            let err = (dn / d1 / reduction_factor(&pr) - 1.0).abs();
            ratio_err = ratio_err.max(err);
            if !(err <= 1e-10) {
                failures.push(format!("N={n} p={p} s={s}: D_N/D_1 = {} vs A = {}", dn / d1, reduction_factor(&pr)));
            }
        }
    }
    fail_if(
        failures,
        format!("|c_2 - 1| = {c2_dev:.0e}, |c_3 - (2-√2)| = {c3_err:.0e}, D ratio error {ratio_err:.0e}"),
    )
}

fn sharpness_1d() -> Outcome {
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for s in [0.25, 0.75] {
        let curve = sharpness_curve_1d(&params(1, 2.0, s), &[0.4, 0.2, 0.1, 0.05], &energy_cfg())
            .map_err(|e| e.to_string())?;
        let margins: Vec<f64> = curve.iter().map(|c| c.margin).collect();
        let positive = margins.iter().all(|m| *m > 0.0);
        let decreasing = margins.windows(2).all(|w| w[1] < w[0]);
        let ratio = margins[3] / margins[0];
        notes.push(format!("s={s}: last/first = {ratio:.3}"));
        if !(positive && decreasing && ratio <= 0.25) {
            failures.push(format!("s={s}: margins {margins:?}"));
        }
    }
    fail_if(failures, notes.join(", "))
}

fn sharpness_nd() -> Outcome {
    let pr = params(2, 2.0, 0.25);
    let curve = sharpness_curve_nd(&pr, &[2, 4, 8], &Profile1D::standard_hat(), 10_000_000, 7)
        .map_err(|e| e.to_string())?;
    let d = hardy_constant(&pr, &line_cfg()).map_err(|e| e.to_string())?.value;
    let summary: Vec<String> = curve
        .iter()
        .map(|c| format!("n={}: {:.4}±{:.4}", c.n, c.quotient, c.stderr))
        .collect();
    let failures = judge_sharpness_nd(&curve, d, 3.0, 0.1);
    fail_if(
        failures,
        format!("{}, target {:.4}, D_2 = {d:.4}", summary.join(", "), curve[0].target),
    )
}

/// The CLI binary next to this test executable, if the workspace built it.
fn cli_binary() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let dir = exe.parent()?.parent()?;
    let bin = dir.join(format!("hardy{}", std::env::consts::EXE_SUFFIX));
    bin.is_file().then_some(bin)
}

fn strip_timing(out: &str) -> String {
    out.lines()
        .map(|line| match serde_json::from_str::<serde_json::Value>(line) {
            Ok(mut v) => {
                if let Some(o) = v.as_object_mut() {
                    o.remove("timing");
                }
                v.to_string()
            }
            Err(_) => line.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn determinism() -> Outcome {
    let spec = CampaignSpec {
        grid: Grid {
            dims: vec![1, 2],
            p: vec![2.0, 3.0],
            s: vec![0.25],
        },
        profiles: ProfileSet {
            catalog: vec![hardy_core::verify::ProfileEntry::Named("hat".into())],
            random_count: 3,
        },
        checks: vec![Check::Inequality, Check::Gsr, Check::El, Check::Reduction, Check::SharpnessNd],
        mc_samples: 20_000,
        seed: 99,
        ..CampaignSpec::default()
    };
    let a = serde_json::to_string(&run_campaign(&spec).map_err(|e| e.to_string())?).unwrap();
    let b = serde_json::to_string(&run_campaign(&spec).map_err(|e| e.to_string())?).unwrap();
    if a != b {
        return Err("campaign reports differ between identical runs".into());
    }
    let pr = params(2, 2.0, 0.25);
    let u = sharpness_sequence(2, &Profile1D::standard_hat(), 2).map_err(|e| e.to_string())?;
    let m1 = monte_carlo_energy(&u, &pr, 50_000, 5, 3.0).map_err(|e| e.to_string())?;
    let m2 = monte_carlo_energy(&u, &pr, 50_000, 5, 3.0).map_err(|e| e.to_string())?;
    if m1 != m2 {
        return Err("Monte Carlo energies differ between identical runs".into());
    }
    let Some(bin) = cli_binary() else {
        return Ok("library level: campaign and Monte Carlo identical (CLI binary not built)".into());
    };
    let dir = std::env::temp_dir().join(format!("hardy-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let config = dir.join("campaign.json");
    std::fs::write(&config, serde_json::to_string(&spec).unwrap()).map_err(|e| e.to_string())?;
    let config = config.to_string_lossy().to_string();
    let commands: Vec<Vec<&str>> = vec![
        vec!["constant", "--N", "3", "--p", "2", "--s", "0.25"],
        vec!["cp", "--p", "3"],
        vec!["quotient", "--p", "2", "--s", "0.25", "--profile", "hat"],
        vec!["gsr", "--p", "2", "--s", "0.25", "--profile", "hat"],
        vec!["el", "--x", "1", "--p", "2", "--s", "0.25"],
        vec!["sharpness", "--p", "2", "--s", "0.25", "--format", "csv"],
        vec!["sharpness", "--N", "2", "--p", "2", "--s", "0.25", "--samples", "20000", "--seed", "3"],
        vec!["reduce", "--N", "2", "--p", "2", "--s", "0.25", "--m", "1"],
        vec!["campaign", "--config", &config],
        vec!["campaign", "--config", &config, "--format", "csv"],
    ];
    for args in &commands {
        let run = || -> Result<String, String> {
            let out = Command::new(&bin).args(args).output().map_err(|e| e.to_string())?;
            if !out.status.success() {
                return Err(format!("`hardy {}` exited with {}", args.join(" "), out.status));
            }
            Ok(strip_timing(&String::from_utf8_lossy(&out.stdout)))
        };
        if run()? != run()? {
            return Err(format!("`hardy {}` output differs between runs", args.join(" ")));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("campaign, Monte Carlo and {} CLI invocations byte-identical", commands.len()))
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "ground-state representation at p=2", budget: Duration::from_secs(4 * 60), run: gsr_identity },
        Criterion { id: 2, name: "p=1 equality for non-increasing profiles", budget: Duration::from_secs(60), run: p_one_equality },
        Criterion { id: 3, name: "inequality sweep over random profiles", budget: Duration::from_secs(15 * 60), run: inequality_sweep },
        Criterion { id: 4, name: "Euler-Lagrange identity", budget: Duration::from_secs(60), run: euler_lagrange },
        Criterion { id: 5, name: "tangential kernel reduction", budget: Duration::from_secs(10), run: kernel_reduction },
        Criterion { id: 6, name: "constants c_p and D_N/D_1", budget: Duration::from_secs(10), run: constants },
        Criterion { id: 7, name: "1D sharpness of the ground-state family", budget: Duration::from_secs(5 * 60), run: sharpness_1d },
        Criterion { id: 8, name: "N=2 sharpness trend (Monte Carlo)", budget: Duration::from_secs(10 * 60), run: sharpness_nd },
        Criterion { id: 9, name: "determinism", budget: Duration::from_secs(5 * 60), run: determinism },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if elapsed <= c.budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; runtime {elapsed:.1?} exceeds {:?}", c.budget)),
            Err(d) => ("FAIL", d),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} [{}] {} ({elapsed:.1?}): {detail}", c.id, c.name);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
