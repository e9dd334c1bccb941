//! Acceptance suite. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line per criterion and exits nonzero if any fails.

use std::process::{Command as Process, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crn_cli::{run_share_sweep, Command, RunManifest, ScenarioConfig};
use crn_core::channel::{sample_channel, NoiseModel};
use crn_core::relay::{equivalent_af_snr, select_best_relay, RelaySelectionConfig};
use crn_core::sharing::{brute_force_optimum, link_capacity, InstanceGenerator};
use crn_core::sim::{run, Policy, SimConfig};
use crn_core::swarm::{optimize, update_position, update_velocity, PsoConfig};

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn af_bottleneck_bound() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xAF);
    let mut violations = 0;
    for _ in 0..100_000 {
        // 1 - [0, 1) lies in (0, 1].
        let a = 100.0 * (1.0 - rng.random::<f64>());
        let b = 100.0 * (1.0 - rng.random::<f64>());
        let eq = equivalent_af_snr(a, b);
        if !(eq > 0.0 && eq < a.min(b)) {
            violations += 1;
        }
    }
    let t = start.elapsed();
    check(
        violations == 0 && within(t, 1.0),
        format!(
            "100000 pairs, {violations} violations, {:.3} s (limit 1 s)",
            t.as_secs_f64()
        ),
    )
}

/// Straight-line relay choice from raw gains.
fn relay_oracle(
    sr: &[f64],
    rd: &[f64],
    power: f64,
    noise: f64,
    threshold: f64,
) -> (Option<usize>, bool) {
    let snr_sr: Vec<f64> = sr.iter().map(|g| power * g / noise).collect();
    let snr_rd: Vec<f64> = rd.iter().map(|g| power * g / noise).collect();
    let max_rd = snr_rd.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for i in 0..sr.len() {
        if snr_sr[i] >= threshold && snr_rd[i] == max_rd {
            return (Some(i + 1), false);
        }
    }
    let mut pick: Option<usize> = None;
    for i in 0..sr.len() {
        if snr_sr[i] >= threshold && pick.is_none_or(|p| snr_rd[i] > snr_rd[p]) {
            pick = Some(i);
        }
    }
    (pick.map(|p| p + 1), pick.is_some())
}

fn relay_selection_oracle() -> Outcome {
    let start = Instant::now();
    let (power, noise, threshold) = (10.0, 1.0, 10f64.powf(0.6));
    let cfg = RelaySelectionConfig::new(power, threshold, NoiseModel::new(noise).unwrap()).unwrap();
    let (mut mismatches, mut fallbacks, mut empty) = (0, 0, 0);
    for seed in 0..10_000u64 {
        let ch = sample_channel::<f64>(10, seed);
        let d = select_best_relay(&ch, &cfg);
        let (best, fallback) = relay_oracle(
            ch.source_relay_gains(),
            ch.relay_dest_gains(),
            power,
            noise,
            threshold,
        );
        if d.best.map(|r| r.0) != best || d.fallback != fallback {
            mismatches += 1;
        }
        fallbacks += fallback as u32;
        empty += best.is_none() as u32;
    }
    let t = start.elapsed();
    check(
        mismatches == 0 && within(t, 5.0),
        format!(
            "10000 realizations, {mismatches} mismatches ({fallbacks} fallback, {empty} no relay), {:.2} s (limit 5 s)",
            t.as_secs_f64()
        ),
    )
}

fn swarm_vs_exhaustive() -> Outcome {
    let start = Instant::now();
    let (mut close, mut exceeded, mut infeasible) = (0, 0, 0);
    for seed in 0..100u64 {
        let m = 1 + (seed % 12) as usize;
        let n = 1 + (seed % 4) as usize;
        let inst = InstanceGenerator::default()
            .with_counts(n, m)
            .generate::<f64>(seed);
        let exact = brute_force_optimum(&inst).unwrap();
        let pso = optimize(&inst, &PsoConfig::default().with_seed(seed)).unwrap();
        if !pso.feasible {
            infeasible += 1;
            continue;
        }
        if pso.objective > exact.objective * (1.0 + 1e-12) {
            exceeded += 1;
        }
        if pso.objective >= 0.99 * exact.objective {
            close += 1;
        }
    }
    let t = start.elapsed();
    check(
        close >= 95 && exceeded == 0 && within(t, 60.0),
        format!(
            "{close}/100 within 1% (need 95), {exceeded} above optimum, {infeasible} infeasible, {:.2} s (limit 60 s)",
            t.as_secs_f64()
        ),
    )
}

fn swarm_hand_step() -> Outcome {
    let cfg = PsoConfig::<f64>::default();
    let v = update_velocity(&[0.5], &[2.0], &[3.0], &[5.0], &cfg, &[0.3], &[0.6]);
    let y = update_position(&[2.0], &v);
    let (dv, dy) = ((v[0] - 3.5).abs(), (y[0] - 5.5).abs());
    check(
        dv <= 1e-12 && dy <= 1e-12,
        format!(
            "v' = {:?}, y' = {:?} (expected 3.5, 5.5 to 1e-12)",
            v[0], y[0]
        ),
    )
}

fn sweep_trend() -> Outcome {
    let cfg = ScenarioConfig::default();
    let mut broken = Vec::new();
    let batches = 4;
    for b in 0..batches {
        let seeds: Vec<u64> = (b * 50..(b + 1) * 50).collect();
        let mut m = RunManifest::new(Command::Sweep, seeds).unwrap();
        m.links = Some(vec![2, 4, 6, 8, 10]);
        m.gamma_db = Some(vec![6.0, 8.0, 10.0, 12.0, 14.0]);
        let table = run_share_sweep(&m, &cfg).unwrap();
        for g in ["6", "8", "10", "12", "14"] {
            let col = table.column(&format!("gamma_db_{g}")).unwrap();
            let values: Vec<f64> = table
                .rows
                .iter()
                .map(|r| r[col].as_f64().unwrap())
                .collect();
            if values.windows(2).any(|w| w[1] < w[0]) {
                broken.push(format!("batch {b} gamma {g} dB"));
            }
        }
    }
    check(
        broken.is_empty(),
        format!(
            "{batches} batches of 50 seeds, 5x5 grid, {} decreasing columns {:?}",
            broken.len(),
            broken
        ),
    )
}

fn simulate_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_crn");
    let dir = tempfile::tempdir().unwrap();
    let mut diffs = 0;
    let mut failures = 0;
    for seed in 0..20u64 {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("seed{seed}_run{run}.csv"));
            let status = Process::new(bin)
                .args(["simulate", "--seed-list", &seed.to_string(), "--out"])
                .arg(&out)
                .status()
                .unwrap();
            if !status.success() {
                failures += 1;
            }
            outputs.push(std::fs::read(&out).unwrap_or_default());
        }
        if outputs[0] != outputs[1] || outputs[0].is_empty() {
            diffs += 1;
        }
    }
    check(
        diffs == 0 && failures == 0,
        format!("20 seeds x 2 runs of `crn simulate`, {diffs} differing outputs, {failures} failed runs"),
    )
}

fn conservation_and_energy() -> Outcome {
    let (mut runs, mut broken, mut energy_off, mut worst) = (0, 0, 0, 0.0f64);
    for seed in 0..20u64 {
        for policy in [Policy::Clsss, Policy::StaticRandom] {
            let cfg = SimConfig::default().with_seed(seed).with_policy(policy);
            let out = run(&cfg).unwrap();
            let a = &out.audit;
            runs += 1;
            if a.conservation_failures > 0 || a.conservation_checks == 0 {
                broken += 1;
            }
            let expected = 0.660 * a.total_tx_time_s + 0.395 * a.total_rx_time_s;
            let rel = if expected == 0.0 {
                a.total_energy_debited_j.abs()
            } else {
                (a.total_energy_debited_j - expected).abs() / expected
            };
            worst = worst.max(rel);
            if rel > 1e-9 {
                energy_off += 1;
            }
        }
    }
    check(
        broken == 0 && energy_off == 0,
        format!(
            "{runs} runs, {broken} with conservation failures, {energy_off} energy mismatches (worst rel {worst:.2e})"
        ),
    )
}

fn policy_direction() -> Outcome {
    let start = Instant::now();
    let mut wins = 0;
    for seed in 0..20u64 {
        let base = SimConfig::default().with_seed(seed);
        let a = run(&base.clone().with_policy(Policy::Clsss))
            .unwrap()
            .metrics;
        let b = run(&base.with_policy(Policy::StaticRandom))
            .unwrap()
            .metrics;
        if a.mean_delay_ms < b.mean_delay_ms && a.throughput_kbps > b.throughput_kbps {
            wins += 1;
        }
    }
    let t = start.elapsed();
    check(
        wins >= 16 && within(t, 300.0),
        format!(
            "adaptive relay policy better on delay and throughput in {wins}/20 paired seeds (need 16), {:.2} s (limit 300 s)",
            t.as_secs_f64()
        ),
    )
}

fn capacity_units() -> Outcome {
    let a = link_capacity(1.0f64, 1.0);
    let b = link_capacity(1e6f64, 3.0);
    let ok = (a - 1.0).abs() <= 1e-12 && (b - 2e6).abs() <= 2e6 * 1e-12;
    check(ok, format!("C(1, 1) = {a:?}, C(1e6, 3) = {b:?}"))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("af bottleneck bound", af_bottleneck_bound),
        ("relay selection oracle", relay_selection_oracle),
        ("swarm vs exhaustive", swarm_vs_exhaustive),
        ("swarm hand step", swarm_hand_step),
        ("sweep trend in link count", sweep_trend),
        ("simulate determinism", simulate_determinism),
        ("conservation and energy", conservation_and_energy),
        ("policy direction", policy_direction),
        ("capacity units", capacity_units),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} {}/9 {name}: {}", i + 1, o.detail);
        failed += !o.pass as u32;
    }
    println!("acceptance: {}/9 passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
