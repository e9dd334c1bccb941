//! One function per subcommand. Seeds and sweep cells run in parallel; rows
//! are emitted in a fixed order (cell, then seed) whatever the completion order.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crn_core::channel::{db_to_linear, sample_channel};
use crn_core::relay::select_best_relay;
use crn_core::sharing::{brute_force_optimum, SharingInstance, SharingSolution};
use crn_core::sim::{run_with, Policy, RunOptions, SimConfig, SimOutcome, TraceRecord};
use crn_core::swarm::optimize;

use crate::config::{ScenarioConfig, Solver};
use crate::error::{CliError, Result};
use crate::manifest::{Command, Format, RunManifest};
use crate::table::{Cell, Provenance, ResultTable};

pub const DEFAULT_LINKS: [usize; 5] = [2, 4, 6, 8, 10];
pub const DEFAULT_GAMMA_DB: [f64; 5] = [6.0, 8.0, 10.0, 12.0, 14.0];

fn provenance(m: &RunManifest, cfg: &ScenarioConfig) -> Provenance {
    Provenance {
        command: m.command.name().to_string(),
        config_hash: cfg.hash(),
        config_path: m.config_path.as_ref().map(|p| p.display().to_string()),
        seeds: m.seeds.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

fn names(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}

fn solve(
    inst: &SharingInstance<f64>,
    cfg: &ScenarioConfig,
    seed: u64,
) -> Result<SharingSolution<f64>> {
    Ok(match cfg.sharing.solver {
        Solver::BruteForce => brute_force_optimum(inst)?,
        Solver::Pso => optimize(inst, &cfg.pso.clone().with_seed(seed))?,
    })
}

fn policies(m: &RunManifest, default: Policy) -> Vec<Policy> {
    m.policies.clone().unwrap_or_else(|| vec![default])
}

/// Per seed: threshold set, optimal set, chosen relay and every SNR.
pub fn run_select_relay(m: &RunManifest, cfg: &ScenarioConfig) -> Result<ResultTable> {
    let sel = cfg.relay.selection()?;
    let count = cfg.relay.relay_count;
    let mut cols = names(&[
        "config_hash",
        "seed",
        "best",
        "fallback",
        "candidate_set",
        "optimal_set",
    ]);
    for prefix in ["snr_sr", "snr_rd", "snr_eq"] {
        cols.extend((1..=count).map(|i| format!("{prefix}_{i}")));
    }
    let mut table = ResultTable::new(cols, provenance(m, cfg));
    let hash = table.provenance.config_hash.clone();
    for &seed in &m.seeds {
        let d = select_best_relay(&sample_channel::<f64>(count, seed), &sel);
        let mut row = vec![
            Cell::Text(hash.clone()),
            seed.into(),
            d.best.map(|r| r.0).into(),
            d.fallback.into(),
            Cell::list(&d.candidate_set),
            Cell::list(&d.optimal_set),
        ];
        row.extend(
            d.all_candidates
                .iter()
                .map(|c| Cell::Float(c.snr_source_relay)),
        );
        row.extend(
            d.all_candidates
                .iter()
                .map(|c| Cell::Float(c.snr_relay_dest)),
        );
        row.extend(
            d.all_candidates
                .iter()
                .map(|c| Cell::Float(c.snr_equivalent)),
        );
        table.push(row);
    }
    Ok(table)
}

/// Per seed: solver result on the configured or generated instance.
pub fn run_share(m: &RunManifest, cfg: &ScenarioConfig) -> Result<ResultTable> {
    let cols = names(&[
        "config_hash",
        "seed",
        "solver",
        "objective_bps",
        "feasible",
        "violations",
        "active_links",
        "activation",
    ]);
    let mut table = ResultTable::new(cols, provenance(m, cfg));
    let hash = table.provenance.config_hash.clone();
    let solutions: Vec<SharingSolution<f64>> = m
        .seeds
        .par_iter()
        .map(|&seed| solve(&cfg.sharing.instance(seed)?, cfg, seed))
        .collect::<Result<_>>()?;
    for (&seed, s) in m.seeds.iter().zip(solutions) {
        table.push(vec![
            Cell::Text(hash.clone()),
            seed.into(),
            cfg.sharing.solver.name().into(),
            s.objective.into(),
            s.feasible.into(),
            s.violations.into(),
            s.activation.count_active().into(),
            Cell::list(s.activation.iter().map(u8::from)),
        ]);
    }
    Ok(table)
}

#[derive(Serialize)]
struct SeededTrace<'a> {
    policy: &'static str,
    seed: u64,
    #[serde(flatten)]
    record: &'a TraceRecord,
}

fn write_trace(path: &std::path::Path, runs: &[(Policy, u64, SimOutcome)]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| CliError::io(path.display(), e))?;
    let mut w = std::io::BufWriter::new(file);
    for (policy, seed, out) in runs {
        for record in out.trace.iter().flatten() {
            let line = SeededTrace {
                policy: policy.name(),
                seed: *seed,
                record,
            };
            serde_json::to_writer(&mut w, &line).map_err(|e| CliError::Table(e.to_string()))?;
            w.write_all(b"\n")
                .map_err(|e| CliError::io(path.display(), e))?;
        }
    }
    w.flush().map_err(|e| CliError::io(path.display(), e))
}

/// Per policy and seed: the full metric vector and packet counters.
pub fn run_simulate(m: &RunManifest, cfg: &ScenarioConfig) -> Result<ResultTable> {
    let cols = names(&[
        "config_hash",
        "seed",
        "policy",
        "mean_delay_ms",
        "mean_queueing_delay_ms",
        "mean_delivered_delay_ms",
        "throughput_kbps",
        "pdr",
        "overhead",
        "energy_consumed_j",
        "generated",
        "delivered",
        "dropped",
        "shifts",
        "control_messages",
    ]);
    let mut table = ResultTable::new(cols, provenance(m, cfg));
    let hash = table.provenance.config_hash.clone();
    let opts = RunOptions {
        trace: m.trace_path.is_some(),
        log_decisions: false,
    };
    let tasks: Vec<(Policy, u64)> = policies(m, cfg.sim.policy)
        .into_iter()
        .flat_map(|p| m.seeds.iter().map(move |&s| (p, s)))
        .collect();
    let runs: Vec<(Policy, u64, SimOutcome)> = tasks
        .par_iter()
        .map(|&(p, s)| {
            Ok((
                p,
                s,
                run_with(&cfg.sim.clone().with_policy(p).with_seed(s), opts)?,
            ))
        })
        .collect::<Result<_>>()?;
    if let Some(path) = &m.trace_path {
        write_trace(path, &runs)?;
    }
    for (policy, seed, out) in &runs {
        let (x, c) = (out.metrics, out.counts);
        table.push(vec![
            Cell::Text(hash.clone()),
            (*seed).into(),
            policy.name().into(),
            x.mean_delay_ms.into(),
            x.mean_queueing_delay_ms.into(),
            x.mean_delivered_delay_ms.into(),
            x.throughput_kbps.into(),
            x.pdr.into(),
            x.overhead.into(),
            x.energy_consumed_j.into(),
            c.generated.into(),
            c.delivered.into(),
            c.dropped.into(),
            c.shifts.into(),
            c.control_messages.into(),
        ]);
    }
    Ok(table)
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Rows are link counts, columns SINR floors; each cell is the mean solver
/// objective over the seeds. Instances for fewer links are prefixes of the
/// instance for the most links, drawn once per seed.
pub fn run_share_sweep(m: &RunManifest, cfg: &ScenarioConfig) -> Result<ResultTable> {
    let links = m.links.clone().unwrap_or_else(|| DEFAULT_LINKS.to_vec());
    let gammas = m
        .gamma_db
        .clone()
        .unwrap_or_else(|| DEFAULT_GAMMA_DB.to_vec());
    if links.is_empty() {
        return Err(CliError::Usage("--links must not be empty".into()));
    }
    if gammas.is_empty() {
        return Err(CliError::Usage("--gamma-db must not be empty".into()));
    }
    if let Some(g) = gammas.iter().find(|g| !g.is_finite()) {
        return Err(CliError::Usage(format!(
            "--gamma-db value {g} is not finite"
        )));
    }
    let most = *links.iter().max().expect("non-empty");
    let base = |seed: u64| -> Result<SharingInstance<f64>> {
        match &cfg.sharing.instance {
            Some(file) => {
                let inst: SharingInstance<f64> = file.to_instance()?;
                if inst.secondary_count() < most {
                    return Err(CliError::Usage(format!(
                        "--links asks for {most} links but the instance has {}",
                        inst.secondary_count()
                    )));
                }
                Ok(inst)
            }
            None => {
                let g = cfg.sharing.generator.clone().unwrap_or_default();
                let primary = g.primary_count;
                Ok(g.with_counts(primary, most).generate(seed))
            }
        }
    };
    let bases: Vec<SharingInstance<f64>> =
        m.seeds.iter().map(|&s| base(s)).collect::<Result<_>>()?;

    let mut tasks = Vec::new();
    for (li, &l) in links.iter().enumerate() {
        for (gi, &g) in gammas.iter().enumerate() {
            for (si, &seed) in m.seeds.iter().enumerate() {
                tasks.push((li, gi, si, l, g, seed));
            }
        }
    }
    let objectives: Vec<f64> = tasks
        .par_iter()
        .map(|&(_, _, si, l, g, seed)| {
            let inst = bases[si]
                .with_secondary_prefix(l)
                .with_sinr_floor(db_to_linear(g));
            Ok(solve(&inst, cfg, seed)?.objective)
        })
        .collect::<Result<_>>()?;

    let mut cols = names(&["config_hash", "seeds", "solver", "links"]);
    cols.extend(gammas.iter().map(|g| format!("gamma_db_{g}")));
    let mut table = ResultTable::new(cols, provenance(m, cfg));
    let hash = table.provenance.config_hash.clone();
    let per_cell = m.seeds.len();
    for (li, &l) in links.iter().enumerate() {
        let mut row = vec![
            Cell::Text(hash.clone()),
            Cell::list(&m.seeds),
            cfg.sharing.solver.name().into(),
            l.into(),
        ];
        for gi in 0..gammas.len() {
            let start = (li * gammas.len() + gi) * per_cell;
            row.push(mean(objectives[start..start + per_cell].iter().copied()).into());
        }
        table.push(row);
    }
    Ok(table)
}

/// Paired-seed comparison: every policy sees the same seeds at every node
/// count. One row per policy and node count with metrics averaged over seeds.
pub fn run_compare(m: &RunManifest, cfg: &ScenarioConfig) -> Result<ResultTable> {
    let pols = m
        .policies
        .clone()
        .unwrap_or_else(|| vec![Policy::Clsss, Policy::StaticRandom]);
    if pols.len() < 2 {
        return Err(CliError::Usage(
            "compare needs at least two policies".into(),
        ));
    }
    let levels = &cfg.compare.node_counts;
    let mut tasks = Vec::new();
    for &p in &pols {
        for &n in levels {
            let sim = SimConfig {
                node_count: n,
                ..cfg.sim.clone()
            };
            sim.validate()?;
            for &s in &m.seeds {
                tasks.push(sim.clone().with_policy(p).with_seed(s));
            }
        }
    }
    let outs: Vec<SimOutcome> = tasks
        .par_iter()
        .map(|c| run_with(c, RunOptions::default()))
        .collect::<crn_core::Result<_>>()?;

    let cols = names(&[
        "config_hash",
        "seeds",
        "policy",
        "node_count",
        "runs",
        "mean_delay_ms",
        "throughput_kbps",
        "pdr",
        "overhead",
        "energy_consumed_j",
    ]);
    let mut table = ResultTable::new(cols, provenance(m, cfg));
    let hash = table.provenance.config_hash.clone();
    for (chunk, (p, n)) in outs.chunks(m.seeds.len()).zip(
        pols.iter()
            .flat_map(|&p| levels.iter().map(move |&n| (p, n))),
    ) {
        let avg = |f: fn(&SimOutcome) -> f64| mean(chunk.iter().map(f));
        table.push(vec![
            Cell::Text(hash.clone()),
            Cell::list(&m.seeds),
            p.name().into(),
            n.into(),
            chunk.len().into(),
            avg(|o| o.metrics.mean_delay_ms).into(),
            avg(|o| o.metrics.throughput_kbps).into(),
            avg(|o| o.metrics.pdr).into(),
            avg(|o| o.metrics.overhead).into(),
            avg(|o| o.metrics.energy_consumed_j).into(),
        ]);
    }
    Ok(table)
}

/// Loads the scenario and dispatches on the command.
pub fn execute(m: &RunManifest) -> Result<ResultTable> {
    let cfg = m.load_config()?;
    match m.command {
        Command::SelectRelay => run_select_relay(m, &cfg),
        Command::Share => run_share(m, &cfg),
        Command::Simulate => run_simulate(m, &cfg),
        Command::Sweep => run_share_sweep(m, &cfg),
        Command::Compare => run_compare(m, &cfg),
    }
}

pub fn render(table: &ResultTable, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    }
}

/// Writes the table to `--out` or, without one, to stdout.
pub fn write_output(table: &ResultTable, m: &RunManifest) -> Result<()> {
    let text = render(table, m.format);
    match &m.output_path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p.display(), e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}
