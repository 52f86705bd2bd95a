//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Run with `cargo test --test acceptance`.

mod common;

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use rotbandit::adversary::{audit, AdversaryKind, AdversarySpec, CapSchedule};
use rotbandit::common::{make_stream, POLICY_STREAM};
use rotbandit::env::Env;
use rotbandit::harness::{simulate, ExperimentConfig};
use rotbandit::policies::{
    ceil_sqrt, exp3_alpha, run_to_horizon, Alg2, PolicySpec, Threshold,
};
use rotbandit::windowstats::{candidate_starts, RunStats, CONFIDENCE};
use rotbandit::{ArmId, HorizonConfig, SeedSpec};

const MARGIN: f64 = 0.05;
const RATE_TOL: f64 = 0.15;
const FRESH_TOL: f64 = 0.01;
const ORACLE_TOL: f64 = 1e-9;
const RUNTIME_BUDGET_SECS: f64 = 300.0;

struct Line {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn shipped(name: &str) -> ExperimentConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name);
    ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn criterion_1() -> Line {
    let cfg = shipped("harmonic_desk.toml");
    let start = Instant::now();
    let report = simulate(&cfg, None).expect("experiment runs");
    let secs = start.elapsed().as_secs_f64();
    let t = cfg.horizons[0];
    let mean = |p: &str| report.group(p, t).map_or(f64::NAN, |g| g.final_mean());
    let (a1, a2, tp, ss, fresh) = (mean("alg1"), mean("alg2"), mean("ucb_tp"), mean("ssucb"), mean("fresh_arm"));
    let first = a1 <= (1.0 - MARGIN) * a2;
    let second = a2 <= (1.0 - MARGIN) * tp.min(ss);
    let n_ok = report.groups.iter().all(|g| g.n_seeds == cfg.n_seeds as usize) && report.groups.len() == 5;
    let fast = secs <= RUNTIME_BUDGET_SECS;
    Line {
        id: "1 desk-scale harmonic-rotting ordering alg1 < alg2 < min(ucb_tp, ssucb), 5% margins",
        pass: first && second && n_ok && fast && report.audits_pass(),
        detail: format!(
            "T={t} seeds={}: alg1={a1:.0} alg2={a2:.0} ucb_tp={tp:.0} ssucb={ss:.0} fresh_arm={fresh:.0}; \
             alg1<alg2: {first}, alg2<min: {second}; audits {}; {secs:.1}s",
            cfg.n_seeds,
            if report.audits_pass() { "clean" } else { "FAILED" }
        ),
    }
}

fn slope_line(id: &'static str, configs: &[(&str, f64)]) -> Line {
    let mut pass = true;
    let mut parts = Vec::new();
    for &(name, target) in configs {
        let cfg = shipped(name);
        let report = simulate(&cfg, None).expect("experiment runs");
        let slope = report.exponent("alg1").map_or(f64::NAN, |f| f.slope);
        let ok = (slope - target).abs() <= RATE_TOL && report.audits_pass();
        pass &= ok;
        parts.push(format!(
            "beta={} slope={slope:.3} target={target:.3}±{RATE_TOL} {}",
            cfg.beta,
            if ok { "ok" } else { "out" }
        ));
    }
    Line {
        id,
        pass,
        detail: parts.join("; "),
    }
}

fn criterion_4() -> Line {
    let horizon = 100_000;
    let mut pass = true;
    let mut parts = Vec::new();
    for beta in [0.5, 1.0, 2.0] {
        let seed = SeedSpec::new(1, 0);
        let mut env = Env::new(HorizonConfig::new(horizon, beta, horizon).unwrap(), seed, AdversarySpec::none(), true).unwrap();
        let mut p = PolicySpec::FreshArm.build(horizon, make_stream(seed, POLICY_STREAM)).unwrap();
        run_to_horizon(p.as_mut(), &mut env).unwrap();
        let per_step = env.cumulative_regret() / horizon as f64;
        let target = beta / (beta + 1.0);
        let ok = (per_step - target).abs() <= FRESH_TOL;
        pass &= ok;
        parts.push(format!("beta={beta}: {per_step:.4} vs {target:.4}"));
    }
    Line {
        id: "4 fresh-arm per-step regret = beta/(beta+1) ± 0.01",
        pass,
        detail: parts.join("; "),
    }
}

fn naive_min_wucb(rewards: &[f64], log_arg: f64) -> f64 {
    let n = rewards.len();
    let mut best = f64::INFINITY;
    let mut len = 1;
    while len <= n {
        let mean = rewards[n - len..].iter().sum::<f64>() / len as f64;
        best = best.min(mean + (CONFIDENCE * log_arg.ln() / len as f64).sqrt());
        len *= 2;
    }
    best
}

fn oracle_windowstats() -> (bool, String) {
    let mut rng = make_stream(SeedSpec::new(5, 0), "oracle");
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = 1 + (rng.next_u64() % 700) as usize;
        let run_start = 1 + rng.next_u64() % 50_000;
        let log_arg = 2.0 + rng.uniform() * 1e6;
        let rewards: Vec<f64> = (0..n).map(|_| rng.uniform() + rng.standard_gaussian()).collect();
        let mut stats = RunStats::new(run_start);
        rewards.iter().for_each(|&r| stats.record(r));
        let fast = stats.min_wucb(run_start + n as u64, log_arg);
        worst = worst.max((fast - naive_min_wucb(&rewards, log_arg)).abs());
    }
    (worst <= ORACLE_TOL, format!("(a) 1000 traces max dev {worst:.1e}"))
}

fn oracle_candidates() -> (bool, String) {
    let mut bad = 0;
    for t in 2..=4096u64 {
        let expected: Vec<u64> = (1..=13u32)
            .map(|i| 1u64 << (i - 1))
            .filter(|&len| len < t)
            .map(|len| t - len)
            .collect();
        if candidate_starts(t, 1) != expected {
            bad += 1;
        }
    }
    (bad == 0, format!("(b) candidate sets t<=4096 mismatches {bad}"))
}

fn random_adversary(rng: &mut rotbandit::Stream, horizon: u64) -> AdversarySpec {
    let u = rng.uniform();
    let v = rng.uniform() * (horizon - 1) as f64;
    let s = 1 + rng.next_u64() % horizon;
    match rng.next_u64() % 6 {
        0 => AdversarySpec::none(),
        1 => AdversarySpec::slow_constant(v),
        2 => AdversarySpec::slow_harmonic(horizon),
        3 => AdversarySpec {
            kind: AdversaryKind::PerArmExponential { decay: u },
            v_budget: Some(v),
            s_budget: None,
        },
        4 => AdversarySpec::abrupt_drop(0.01 + 0.98 * u, s),
        _ => AdversarySpec {
            kind: AdversaryKind::ConstrainedAdaptive {
                caps: CapSchedule::Steps((0..40).map(|_| rng.uniform()).collect()),
            },
            v_budget: Some(v),
            s_budget: Some(s),
        },
    }
}

fn oracle_adversaries() -> (bool, String) {
    let mut rng = make_stream(SeedSpec::new(6, 0), "oracle");
    let mut failed = 0;
    for i in 0..200u64 {
        let horizon = 2 + rng.next_u64() % 3000;
        let spec = random_adversary(&mut rng, horizon);
        let policies = common::all_policies(horizon, &spec);
        let policy = &policies[(i % 5) as usize];
        let env = common::simulate(policy, horizon, 1.0, SeedSpec::new(i, 0), spec.clone(), true);
        if !audit(env.adversary().events(), &spec, horizon, policy.block_len(horizon)).pass() {
            failed += 1;
        }
    }
    (failed == 0, format!("(c) 200 random adversaries, {failed} audit failures"))
}

fn oracle_ledger() -> (bool, String) {
    let horizon = 20_000;
    let mut worst: f64 = 0.0;
    for adversary in [
        AdversarySpec::none(),
        AdversarySpec::slow_constant(50.0),
        AdversarySpec::slow_harmonic(horizon),
        AdversarySpec::abrupt_drop(0.3, 100),
    ] {
        for spec in common::all_policies(horizon, &adversary) {
            let seed = SeedSpec::new(9, 1);
            let env = common::simulate(&spec, horizon, 1.0, seed, adversary.clone(), true);
            let ledger = env.ledger();
            worst = worst.max(ledger.max_deviation(&env.into_trace(seed, spec.name())));
        }
    }
    (worst <= ORACLE_TOL, format!("(d) ledger replay max dev {worst:.1e}"))
}

fn oracle_noise_off() -> (bool, String) {
    let horizon = 50_000u64;
    let delta = 0.2;
    let spec = PolicySpec::Alg1 {
        threshold: Threshold::Fixed(delta),
    };
    let (mut kept, mut eliminated, mut violations) = (0, 0, 0);
    for seed in 0..5 {
        let env = common::simulate(&spec, horizon, 1.0, SeedSpec::new(seed, 0), AdversarySpec::none(), false);
        for i in 0..env.arms_sampled() {
            let arm = env.truth(ArmId(i)).unwrap();
            if arm.mu_initial >= 1.0 - delta {
                kept += 1;
                violations += arm.discarded as usize;
            }
            if arm.discarded {
                eliminated += 1;
                let gap = 1.0 - delta - arm.mu_initial;
                let n_star = CONFIDENCE * (horizon as f64).ln() / (gap * gap);
                if arm.pulls != (n_star.floor() as u64 + 1).next_power_of_two() {
                    violations += 1;
                }
            }
        }
    }
    (
        violations == 0,
        format!("(e) noise-off: {kept} good arms kept, {eliminated} eliminations at the exact step, {violations} violations"),
    )
}

fn criterion_5() -> Line {
    let parts = [
        oracle_windowstats(),
        oracle_candidates(),
        oracle_adversaries(),
        oracle_ledger(),
        oracle_noise_off(),
    ];
    Line {
        id: "5 oracle suites (a)-(e)",
        pass: parts.iter().all(|p| p.0),
        detail: parts.iter().map(|p| p.1.clone()).collect::<Vec<_>>().join("; "),
    }
}

fn criterion_6() -> Line {
    let frozen = (exp3_alpha(4, 100) - 0.179_64).abs() < 1e-5;
    let mut pass = frozen;
    let mut blocks = 0usize;
    let mut clamps = 0usize;
    let mut worst_sum: f64 = 0.0;
    let mut floor_ok = true;
    let mut alpha_ok = true;
    let horizon = 200_000u64;
    for (ai, adversary) in [
        AdversarySpec::slow_harmonic(horizon),
        AdversarySpec::slow_constant(1000.0),
        AdversarySpec::abrupt_drop(0.5, 200),
        AdversarySpec::none(),
    ]
    .into_iter()
    .enumerate()
    {
        for i in 0..3 {
            let seed = SeedSpec::new(1, 10 * ai as u64 + i);
            let h = ceil_sqrt(horizon);
            let mut env = Env::new(HorizonConfig::new(horizon, 1.0, 1000).unwrap(), seed, adversary.clone(), true).unwrap();
            let mut p = Alg2::new(horizon, h, 0.5, 10.0, make_stream(seed, POLICY_STREAM)).unwrap();
            run_to_horizon(&mut p, &mut env).unwrap();
            let b = p.exp3().candidates().len() as f64;
            let n_blocks = horizon.div_ceil(h) as f64;
            let expected_alpha = (b * b.ln() / ((std::f64::consts::E - 1.0) * n_blocks)).sqrt().min(1.0);
            alpha_ok &= (p.exp3().alpha() - expected_alpha).abs() < 1e-15;
            let floor = p.exp3().alpha() / b;
            for rec in p.history() {
                worst_sum = worst_sum.max((rec.probs.iter().sum::<f64>() - 1.0).abs());
                floor_ok &= rec.probs.iter().all(|&q| q >= floor);
            }
            blocks += p.history().len();
            clamps += p.clamp_events();
        }
    }
    pass &= alpha_ok && floor_ok && worst_sum <= 1e-12 && clamps == 0;
    Line {
        id: "6 EXP3 structure: sums, floor, alpha formula, no clamps",
        pass,
        detail: format!(
            "{blocks} blocks; max |sum-1| {worst_sum:.1e}; floor held {floor_ok}; alpha formula {alpha_ok}, \
             alpha(4,100)=0.17964 {frozen}; clamp events {clamps}"
        ),
    }
}

fn main() -> ExitCode {
    let lines = [
        criterion_1(),
        slope_line(
            "2 stationary alg1 exponent within ±0.15 of max{beta/(beta+1), 1/2}",
            &[
                ("stationary_beta0.5.toml", 0.5),
                ("stationary_beta1.toml", 0.5),
                ("stationary_beta2.toml", 2.0 / 3.0),
            ],
        ),
        slope_line(
            "3 slow-constant V=10 alg1 exponent within ±0.15 of 2/3",
            &[("slow_constant.toml", 2.0 / 3.0)],
        ),
        criterion_4(),
        criterion_5(),
        criterion_6(),
    ];
    let mut failed = 0;
    for l in &lines {
        println!("{} criterion {}: {}", if l.pass { "PASS" } else { "FAIL" }, l.id, l.detail);
        failed += (!l.pass) as usize;
    }
    println!("acceptance: {} passed, {failed} failed", lines.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
