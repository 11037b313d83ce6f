//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (no libtest harness) so the report is always shown.
//! Set `ACCEPTANCE_ONLY=1,5` to run a subset.

use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use vivipar::cdcl::{AddOutcome, Learned, ReplacementKind, RestartPolicy, SearchHooks};
use vivipar::exchange::{ExchangePort, ExportFilter, LinkCell, SharedPool};
use vivipar::harness::{brute_force, gen_random_3sat, implied, run_cli, verify_model};
use vivipar::strategy::{check_ecm_trace, Strategy, TraceEvent};
use vivipar::{run, Engine, EngineConfig, Formula, LcmMode, Lit, PortfolioConfig, SolveStatus, Stats};

// Pinned thresholds.
const ORACLE_INSTANCES: u64 = 1000;
const ORACLE_MIN_VARS: u32 = 10;
const ORACLE_MAX_VARS: u32 = 25;
const RATIO: f64 = 4.26;
const ORACLE_AGREEMENT: f64 = 1.0;
const LINK_STRESS_MIN_OPS: u64 = 100_000;
const LINK_READERS: usize = 8;
const MEDIUM_INSTANCES: u64 = 50;
const MEDIUM_VARS: u32 = 250;
const MEDIUM_CLAUSES: usize = 1065;
const MEDIUM_CONFLICTS_PER_WORKER: u64 = 5000;
const SMOKE_INSTANCES: u64 = 500;
const SMOKE_VARS: u32 = 100;
const SMOKE_CLAUSES: usize = 430;
const SMOKE_LIMIT: Duration = Duration::from_secs(60);
const WORKER_COUNTS: [usize; 2] = [1, 4];

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, id: &str, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failed += 1;
        }
        println!("[{}] {id} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn modes() -> [LcmMode; 5] {
    LcmMode::evaluated_modes()
}

fn oracle_corpus() -> Vec<(Formula, bool)> {
    let span = (ORACLE_MAX_VARS - ORACLE_MIN_VARS + 1) as u64;
    (0..ORACLE_INSTANCES)
        .map(|i| {
            let n = ORACLE_MIN_VARS + (i % span) as u32;
            let m = (n as f64 * RATIO).round() as usize;
            let f = gen_random_3sat(n, m, 0xA11CE + i);
            let sat = matches!(brute_force(&f).unwrap(), SolveStatus::Sat(_));
            (f, sat)
        })
        .collect()
}

/// Small reduction interval and short restarts, so vivification, reductions
/// and ECM flushes happen even on tiny instances. Workers take turns every
/// few conflicts so that linked improvements reach importers before the
/// instance is solved.
fn stress_config() -> PortfolioConfig {
    PortfolioConfig {
        deterministic: true,
        quantum: 4,
        base: EngineConfig {
            restart: RestartPolicy::Dynamic { window: 8, k: 0.8 },
            reduce_first: 6,
            reduce_increment: 3,
            record_replacements: true,
            ..EngineConfig::default()
        },
        luby_unit: 8,
        trace: true,
        ..PortfolioConfig::default()
    }
}

fn default_config() -> PortfolioConfig {
    PortfolioConfig {
        base: EngineConfig {
            record_replacements: true,
            ..EngineConfig::default()
        },
        trace: true,
        ..PortfolioConfig::default()
    }
}

#[derive(Default)]
struct CorpusTally {
    runs: u64,
    agree: u64,
    mismatches: Vec<String>,
    sat_answers: u64,
    models_ok: u64,
    replacements: u64,
    replacements_ok: u64,
    adopted: u64,
    adopted_ok: u64,
    ecm_runs: u64,
    ecm_withheld: u64,
    ecm_reductions_while_withheld: u64,
    ecm_violations: Vec<String>,
    seconds: f64,
}

fn with_clause(f: &Formula, extra: &[Lit]) -> Formula {
    Formula::new(
        f.num_vars(),
        f.clauses()
            .iter()
            .map(|c| c.lits().to_vec())
            .chain(std::iter::once(extra.to_vec())),
    )
}

fn run_corpus(corpus: &[(Formula, bool)], base: &PortfolioConfig, tally: &mut CorpusTally) {
    let start = Instant::now();
    for (index, (f, expected_sat)) in corpus.iter().enumerate() {
        let mut checked: HashSet<(Vec<Lit>, Vec<Lit>)> = HashSet::new();
        for mode in modes() {
            for workers in WORKER_COUNTS {
                let config = PortfolioConfig {
                    num_workers: workers,
                    lcm_mode: mode,
                    seed: index as u64,
                    deterministic: base.deterministic || workers == 1,
                    ..base.clone()
                };
                let r = run(f, &config).expect("portfolio run");
                tally.runs += 1;
                let got_sat = match &r.status {
                    SolveStatus::Sat(model) => {
                        tally.sat_answers += 1;
                        tally.models_ok += verify_model(f, model) as u64;
                        Some(true)
                    }
                    SolveStatus::Unsat => Some(false),
                    SolveStatus::Unknown => None,
                };
                if got_sat == Some(*expected_sat) {
                    tally.agree += 1;
                } else if tally.mismatches.len() < 5 {
                    tally
                        .mismatches
                        .push(format!("instance {index} {mode} x{workers}: {}", r.status.label()));
                }
                for w in &r.workers {
                    for rep in &w.replacements {
                        if !checked.insert((rep.original.clone(), rep.replaced.clone())) {
                            continue;
                        }
                        match rep.kind {
                            ReplacementKind::Shortened | ReplacementKind::ConflictReplaced => {
                                tally.replacements += 1;
                                let fc = with_clause(f, &rep.original);
                                tally.replacements_ok += implied(&fc, &rep.replaced).unwrap() as u64;
                            }
                            ReplacementKind::Adopted => {
                                tally.adopted += 1;
                                tally.adopted_ok += implied(f, &rep.replaced).unwrap() as u64;
                            }
                        }
                    }
                    if let LcmMode::Ecm { max_lbd } = mode {
                        tally.ecm_runs += 1;
                        for e in &w.trace {
                            match e {
                                TraceEvent::Withhold { .. } => tally.ecm_withheld += 1,
                                TraceEvent::Reduce { withheld, .. } if *withheld > 0 => {
                                    tally.ecm_reductions_while_withheld += 1
                                }
                                _ => {}
                            }
                        }
                        for v in check_ecm_trace(&w.trace, max_lbd) {
                            if tally.ecm_violations.len() < 5 {
                                tally.ecm_violations.push(format!("instance {index} {mode}: {v}"));
                            }
                        }
                    }
                }
            }
        }
    }
    tally.seconds += start.elapsed().as_secs_f64();
}

fn criteria_1_to_4(report: &mut Report) {
    let corpus = oracle_corpus();
    let sat = corpus.iter().filter(|(_, s)| *s).count();
    let mut tally = CorpusTally::default();
    run_corpus(&corpus, &default_config(), &mut tally);
    run_corpus(&corpus, &stress_config(), &mut tally);

    let agreement = tally.agree as f64 / tally.runs as f64;
    report.line(
        "C1",
        "oracle equivalence",
        agreement >= ORACLE_AGREEMENT && tally.runs > 0,
        format!(
            "{}/{} runs match brute force ({} instances, {} SAT / {} UNSAT, 5 modes x {{1,4}} workers x 2 configs, {:.1}s) {:?}",
            tally.agree,
            tally.runs,
            corpus.len(),
            sat,
            corpus.len() - sat,
            tally.seconds,
            tally.mismatches
        ),
    );
    report.line(
        "C2",
        "vivification soundness",
        tally.replacements > 0 && tally.adopted > 0 && tally.replacements_ok == tally.replacements && tally.adopted_ok == tally.adopted,
        format!(
            "{}/{} rewritten clauses implied by F and the original; {}/{} adopted improvements implied by F",
            tally.replacements_ok, tally.replacements, tally.adopted_ok, tally.adopted
        ),
    );
    report.line(
        "C3",
        "model soundness",
        tally.sat_answers > 0 && tally.models_ok == tally.sat_answers,
        format!("{}/{} SAT answers verified", tally.models_ok, tally.sat_answers),
    );
    report.line(
        "C4",
        "ECM protocol",
        tally.ecm_violations.is_empty() && tally.ecm_withheld > 0 && tally.ecm_reductions_while_withheld > 0,
        format!(
            "0 violations required, found {:?}; {} worker traces, {} clauses withheld, {} reductions with withheld clauses",
            tally.ecm_violations, tally.ecm_runs, tally.ecm_withheld, tally.ecm_reductions_while_withheld
        ),
    );
}

/// Worker A learns (b ∨ c ∨ a) and exports it; B imports it; A vivifies it to
/// (b ∨ c) using (¬a ∨ b); B reduces and must then hold (b ∨ c).
fn lpcm_directed() -> Result<String, String> {
    let (a, b, c) = (Lit::from_dimacs(1), Lit::from_dimacs(2), Lit::from_dimacs(3));
    let f = Formula::from_dimacs_clauses(4, &[&[-1, 2], &[3, 4, -2]]);
    let pool = Arc::new(SharedPool::new(2, 64));
    let mut engine_a = Engine::new(&f, EngineConfig::default());
    let mut engine_b = Engine::new(&f, EngineConfig::default());
    let mut strat_a = Strategy::new(LcmMode::Lpcm, Some(ExchangePort::new(pool.clone(), 0, ExportFilter::default())));
    let mut strat_b = Strategy::new(LcmMode::Lpcm, Some(ExchangePort::new(pool.clone(), 1, ExportFilter::default())));

    let AddOutcome::Added(learned) = engine_a.add_learned(&[b, c, a], 3) else {
        return Err("A could not store the clause".into());
    };
    strat_a.on_learn(&mut engine_a, Learned::Clause(learned));
    if engine_a.db().meta(learned).link.is_none() {
        return Err("exported clause carries no link".into());
    }
    strat_b.at_decision(&mut engine_b);
    let imported: Vec<_> = engine_b.db().learned().collect();
    if imported.len() != 1 || engine_b.db().meta(imported[0]).link.is_none() {
        return Err(format!("B imported {} clauses", imported.len()));
    }
    let before: Vec<Lit> = engine_b.db().lits(imported[0]).to_vec();

    strat_a.before_reduce(&mut engine_a);
    if engine_a.stats().improvements_published != 1 {
        return Err("A did not publish".into());
    }
    strat_b.before_reduce(&mut engine_b);
    let mut held: Vec<Vec<Lit>> = engine_b
        .db()
        .learned()
        .map(|cref| {
            let mut l = engine_b.db().lits(cref).to_vec();
            l.sort();
            l
        })
        .collect();
    held.sort();
    let mut want = vec![b, c];
    want.sort();
    if held != vec![want] || engine_b.stats().improvements_adopted != 1 {
        return Err(format!("B holds {held:?}"));
    }
    Ok(format!("B replaced {before:?} by {:?} after its reduction", held[0]))
}

/// One writer publishes into a run of cells while eight readers poll them.
/// Every observed value must be complete and match what the writer stored.
fn link_stress() -> (u64, u64, u64) {
    const CELLS: usize = 20_000;
    let cells: Vec<_> = (0..CELLS).map(|_| LinkCell::new(0)).collect();
    let expected = |i: usize| -> Vec<Lit> {
        let len = 1 + i % 29;
        (0..len).map(|k| Lit::from_dimacs(((i * 31 + k * 7) % 5000 + 1) as i32)).collect()
    };
    let ops = AtomicU64::new(0);
    let torn = AtomicU64::new(0);
    let done = AtomicBool::new(false);
    let published_reads = AtomicU64::new(0);
    std::thread::scope(|s| {
        for r in 0..LINK_READERS {
            let (cells, ops, torn, done, published_reads) = (&cells, &ops, &torn, &done, &published_reads);
            s.spawn(move || {
                let mut seen = vec![false; CELLS];
                let mut remaining = CELLS;
                let mut i = r;
                while remaining > 0 {
                    i = (i + 1) % CELLS;
                    ops.fetch_add(1, Ordering::Relaxed);
                    if let Some(lits) = cells[i].poll() {
                        published_reads.fetch_add(1, Ordering::Relaxed);
                        if lits != expected(i).as_slice() {
                            torn.fetch_add(1, Ordering::Relaxed);
                        }
                        if !seen[i] {
                            seen[i] = true;
                            remaining -= 1;
                        }
                    } else if done.load(Ordering::Acquire) && cells[i].poll().is_none() {
                        torn.fetch_add(1, Ordering::Relaxed);
                    }
                }
            });
        }
        for (i, cell) in cells.iter().enumerate() {
            cell.publish(0, &expected(i)).unwrap();
            ops.fetch_add(1, Ordering::Relaxed);
        }
        done.store(true, Ordering::Release);
    });
    let wrong_writer = cells[0].publish(3, &[]).is_err() as u64;
    (ops.into_inner(), torn.into_inner(), published_reads.into_inner() + wrong_writer)
}

fn criterion_5(report: &mut Report) {
    let directed = lpcm_directed();
    let (ops, torn, reads) = link_stress();
    report.line(
        "C5",
        "LPCM protocol",
        directed.is_ok() && torn == 0 && ops >= LINK_STRESS_MIN_OPS,
        format!(
            "directed: {}; stress: 1 writer / {LINK_READERS} readers, {ops} ops, {reads} published reads, {torn} torn",
            directed.unwrap_or_else(|e| format!("FAILED ({e})"))
        ),
    );
}

fn criterion_6(report: &mut Report) {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("det.cnf");
    std::fs::write(&cnf, gen_random_3sat(150, 639, 0xDE7).to_dimacs_string()).unwrap();
    let mut identical = 0;
    let mut diffs = Vec::new();
    let mut codes = Vec::new();
    for mode in ["none", "pcm", "lpcm", "ecm3", "ecm4"] {
        let (lcm, extra) = match mode.strip_prefix("ecm") {
            Some(n) => ("ecm", vec![format!("--ecm-max-lbd={n}")]),
            None => (mode, vec![]),
        };
        let mut outputs = Vec::new();
        for run_no in 0..2 {
            let csv = dir.path().join(format!("{mode}-{run_no}.csv"));
            let mut argv = vec![
                "vivipar".to_string(),
                cnf.display().to_string(),
                format!("--lcm={lcm}"),
                "--threads=4".into(),
                "--seed=17".into(),
                "--deterministic".into(),
                "--time-limit=0".into(),
                format!("--stats-csv={}", csv.display()),
            ];
            argv.extend(extra.iter().cloned());
            let (mut out, mut err) = (Vec::new(), Vec::new());
            codes.push(run_cli(&argv, &mut out, &mut err));
            outputs.push((std::fs::read(&csv).unwrap_or_default(), out));
        }
        if outputs[0] == outputs[1] && !outputs[0].0.is_empty() {
            identical += 1;
        } else {
            diffs.push(mode);
        }
    }
    report.line(
        "C6",
        "determinism",
        identical == 5 && codes.iter().all(|&c| c == 10 || c == 20),
        format!("{identical}/5 modes produced byte-identical stats CSV and stdout; differing: {diffs:?}"),
    );
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn criteria_7_and_8(report: &mut Report) {
    let start = Instant::now();
    let measured = [LcmMode::ECM3, LcmMode::ECM4, LcmMode::Pcm, LcmMode::Lpcm];
    let mut per_mode: Vec<Vec<Stats>> = vec![Vec::new(); measured.len()];
    for i in 0..MEDIUM_INSTANCES {
        let f = gen_random_3sat(MEDIUM_VARS, MEDIUM_CLAUSES, 0x250 + i);
        for (k, &mode) in measured.iter().enumerate() {
            let config = PortfolioConfig {
                num_workers: 4,
                lcm_mode: mode,
                seed: i,
                deterministic: true,
                max_conflicts: Some(MEDIUM_CONFLICTS_PER_WORKER),
                ..PortfolioConfig::default()
            };
            per_mode[k].push(run(&f, &config).unwrap().total_stats());
        }
    }
    let pct: Vec<f64> = per_mode.iter().map(|v| mean(&v.iter().map(Stats::vivify_prop_pct).collect::<Vec<_>>())).collect();
    let succ: Vec<f64> = per_mode.iter().map(|v| mean(&v.iter().map(Stats::success_rate).collect::<Vec<_>>())).collect();
    let elapsed = start.elapsed().as_secs_f64();
    report.line(
        "C7",
        "overhead and success ordering ecm3 vs ecm4",
        pct[0] < pct[1] && succ[1] > succ[0],
        format!(
            "{MEDIUM_INSTANCES} instances n={MEDIUM_VARS} m={MEDIUM_CLAUSES}, 4 workers, {MEDIUM_CONFLICTS_PER_WORKER} conflicts/worker: \
             mean vivify_prop_pct ecm3 {:.2} < ecm4 {:.2}; mean success_rate ecm4 {:.2} > ecm3 {:.2} ({elapsed:.1}s)",
            pct[0], pct[1], succ[1], succ[0]
        ),
    );
    // instances that reached at least one reduction, and of those the ones
    // with positive overhead and success
    let reduced = |k: usize| per_mode[k].iter().filter(|s| s.reductions > 0).count();
    let positive = |k: usize| {
        per_mode[k]
            .iter()
            .filter(|s| s.reductions > 0 && s.vivify_prop_pct() > 0.0 && s.success_rate() > 0.0)
            .count()
    };
    let beats_ecm3 = |k: usize| {
        per_mode[k]
            .iter()
            .zip(&per_mode[0])
            .filter(|(s, e)| s.success_rate() > e.success_rate())
            .count()
    };
    let n = MEDIUM_INSTANCES as usize;
    let pass = pct[2] > 0.0
        && pct[3] > 0.0
        && succ[2] > succ[0]
        && succ[3] > succ[0]
        && positive(2) == reduced(2)
        && positive(3) == reduced(3);
    report.line(
        "C8",
        "PCM/LPCM overhead",
        pass,
        format!(
            "mean vivify_prop_pct pcm {:.2} lpcm {:.2}; mean success_rate pcm {:.2} lpcm {:.2} vs ecm3 {:.2}; \
             positive on {}/{} (pcm) and {}/{} (lpcm) instances that reached a reduction ({n} total); \
             success above ecm3 on {}/{n} and {}/{n} instances",
            pct[2],
            pct[3],
            succ[2],
            succ[3],
            succ[0],
            positive(2),
            reduced(2),
            positive(3),
            reduced(3),
            beats_ecm3(2),
            beats_ecm3(3)
        ),
    );
}

fn criterion_9(report: &mut Report) {
    let start = Instant::now();
    let (mut sat, mut unsat, mut unsolved, mut disagree) = (0, 0, 0, 0);
    let mut slowest = Duration::ZERO;
    for i in 0..SMOKE_INSTANCES {
        let f = gen_random_3sat(SMOKE_VARS, SMOKE_CLAUSES, 0x100 + i);
        let mut labels = HashSet::new();
        for mode in modes() {
            let config = PortfolioConfig {
                num_workers: 4,
                lcm_mode: mode,
                seed: i,
                time_limit: Some(SMOKE_LIMIT),
                ..PortfolioConfig::default()
            };
            let r = run(&f, &config).unwrap();
            slowest = slowest.max(r.wall_time);
            if r.status == SolveStatus::Unknown {
                unsolved += 1;
            }
            labels.insert(r.status.label());
        }
        match (labels.len(), labels.contains("SAT")) {
            (1, true) => sat += 1,
            (1, false) => unsat += 1,
            _ => disagree += 1,
        }
    }
    report.line(
        "C9",
        "smoke benchmark (uf100/uuf100 substitute)",
        unsolved == 0 && disagree == 0 && slowest < SMOKE_LIMIT,
        format!(
            "{SMOKE_INSTANCES} random 3-SAT n={SMOKE_VARS} m={SMOKE_CLAUSES} ({sat} SAT, {unsat} UNSAT), 5 modes, 4 workers: \
             {unsolved} unsolved, {disagree} disagreements, slowest {:.3}s (limit 60s), total {:.1}s",
            slowest.as_secs_f64(),
            start.elapsed().as_secs_f64()
        ),
    );
    println!(
        "[NOTE] C9 solved-instance counts and aggregate runtime deltas at competition scale (34 cores, \
         15,000 s limits) are not reproducible here; the smoke benchmark and the property suites stand in for them"
    );
}

fn main() {
    let only: Option<HashSet<u32>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let wanted = |c: u32| only.as_ref().is_none_or(|o| o.contains(&c));
    let mut report = Report { failed: 0 };
    if (1..=4).any(wanted) {
        criteria_1_to_4(&mut report);
    }
    if wanted(5) {
        criterion_5(&mut report);
    }
    if wanted(6) {
        criterion_6(&mut report);
    }
    if wanted(7) || wanted(8) {
        criteria_7_and_8(&mut report);
    }
    if wanted(9) {
        criterion_9(&mut report);
    }
    println!("acceptance: {} failed", report.failed);
    if report.failed > 0 {
        std::process::exit(1);
    }
}
