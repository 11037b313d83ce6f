//! Parallel portfolio of diversified engines sharing one clause exchange.
//!
//! Diversification table (a pure function of worker index and seed):
//!
//! | worker | restarts                      | initial phase | VSIDS decay              |
//! |--------|-------------------------------|---------------|--------------------------|
//! | 0      | base configuration            | base          | base                     |
//! | odd    | Luby, configured unit         | inverted      | uniform in [0.85, 0.99]  |
//! | even   | dynamic (base parameters)     | base          | uniform in [0.85, 0.99]  |
//!
//! The LCM mode is the same for every worker.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cdcl::{Budget, Engine, EngineConfig, Replacement, RestartPolicy, SolveStatus};
use crate::exchange::{ExchangePort, ExportFilter, SharedPool, DEFAULT_BUFFER_CAPACITY};
use crate::formula::Formula;
use crate::harness::verify_model;
use crate::stats::Stats;
use crate::strategy::{LcmMode, Strategy, TraceEvent};

/// Default conflicts per worker turn in deterministic mode.
pub const DETERMINISTIC_QUANTUM: u64 = 512;

/// Upper bound on the default worker count.
pub const MAX_DEFAULT_WORKERS: usize = 34;

pub const DEFAULT_LUBY_UNIT: u64 = 100;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PortfolioError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("worker {worker} reported a model that violates the formula")]
    InvalidModel { worker: usize },
}

#[derive(Clone, Debug)]
pub struct PortfolioConfig {
    pub num_workers: usize,
    /// Root seed; per-worker seeds are derived from it.
    pub seed: u64,
    pub lcm_mode: LcmMode,
    pub export_filter: ExportFilter,
    pub time_limit: Option<Duration>,
    /// Conflict limit per worker.
    pub max_conflicts: Option<u64>,
    pub deterministic: bool,
    /// Conflicts per worker turn in deterministic mode.
    pub quantum: u64,
    /// Configuration of worker 0; the others are derived by [`diversify`].
    pub base: EngineConfig,
    /// Restart unit of the workers using Luby restarts.
    pub luby_unit: u64,
    pub buffer_capacity: usize,
    /// Record strategy trace events for each worker.
    pub trace: bool,
}

impl Default for PortfolioConfig {
    fn default() -> Self {
        PortfolioConfig {
            num_workers: default_workers(),
            seed: 0,
            lcm_mode: LcmMode::None,
            export_filter: ExportFilter::default(),
            time_limit: None,
            max_conflicts: None,
            deterministic: false,
            quantum: DETERMINISTIC_QUANTUM,
            base: EngineConfig::default(),
            luby_unit: DEFAULT_LUBY_UNIT,
            buffer_capacity: DEFAULT_BUFFER_CAPACITY,
            trace: false,
        }
    }
}

impl PortfolioConfig {
    pub fn with_workers(num_workers: usize) -> PortfolioConfig {
        PortfolioConfig {
            num_workers,
            ..PortfolioConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), PortfolioError> {
        if self.num_workers == 0 {
            return Err(PortfolioError::Config("at least one worker is required".into()));
        }
        if let LcmMode::Ecm { max_lbd: 0 } = self.lcm_mode {
            return Err(PortfolioError::Config("ECM needs an LBD bound of at least 1".into()));
        }
        if self.quantum == 0 {
            return Err(PortfolioError::Config("deterministic quantum must be positive".into()));
        }
        if self.luby_unit == 0 {
            return Err(PortfolioError::Config("Luby unit must be positive".into()));
        }
        if self.buffer_capacity == 0 {
            return Err(PortfolioError::Config("exchange buffer capacity must be positive".into()));
        }
        if self.export_filter.max_len == 0 && self.num_workers > 1 {
            return Err(PortfolioError::Config("export length bound must be positive".into()));
        }
        Ok(())
    }
}

/// Machine core count, capped at [`MAX_DEFAULT_WORKERS`].
pub fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(MAX_DEFAULT_WORKERS)
}

/// Seed of worker `worker_index` under root seed `seed`.
pub fn worker_seed(seed: u64, worker_index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(worker_index as u64);
    rng.random()
}

/// Engine configuration of worker `worker_index`.
pub fn diversify(worker_index: usize, config: &PortfolioConfig) -> EngineConfig {
    let base = &config.base;
    let mut cfg = base.clone();
    if worker_index == 0 {
        return cfg;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(worker_seed(config.seed, worker_index));
    cfg.var_decay = rng.random_range(0.85..=0.99);
    if worker_index % 2 == 1 {
        cfg.restart = RestartPolicy::Luby {
            unit: config.luby_unit,
        };
        cfg.initial_phase = !base.initial_phase;
    }
    cfg
}

#[derive(Clone, Debug)]
pub struct WorkerReport {
    pub worker: usize,
    pub lcm_mode: LcmMode,
    pub config: EngineConfig,
    pub stats: Stats,
    pub trace: Vec<TraceEvent>,
    pub replacements: Vec<Replacement>,
}

#[derive(Clone, Debug)]
pub struct PortfolioResult {
    pub status: SolveStatus,
    pub winner: Option<usize>,
    pub wall_time: Duration,
    pub workers: Vec<WorkerReport>,
}

impl PortfolioResult {
    /// Sum of all worker statistics.
    pub fn total_stats(&self) -> Stats {
        Stats::sum(self.workers.iter().map(|w| &w.stats))
    }
}

struct Worker {
    index: usize,
    engine: Engine,
    strategy: Strategy,
}

impl Worker {
    fn new(formula: &Formula, config: &PortfolioConfig, pool: &Arc<SharedPool>, index: usize) -> Worker {
        let engine_cfg = diversify(index, config);
        let engine = Engine::new(formula, engine_cfg);
        let port = (config.num_workers > 1)
            .then(|| ExchangePort::new(Arc::clone(pool), index, config.export_filter));
        let mut strategy = Strategy::new(config.lcm_mode, port);
        if config.trace {
            strategy = strategy.with_trace();
        }
        Worker {
            index,
            engine,
            strategy,
        }
    }

    fn report(mut self, pool: &SharedPool, multi: bool) -> WorkerReport {
        let mut stats = self.engine.stats().clone();
        if multi {
            stats.buffer_overflows = pool.overflows(self.index);
        }
        WorkerReport {
            worker: self.index,
            lcm_mode: self.strategy.mode(),
            config: self.engine.config().clone(),
            stats,
            trace: self.strategy.take_trace(),
            replacements: self.engine.take_replacements(),
        }
    }
}

/// Solves `formula` with a portfolio of workers. The first definitive answer
/// wins and the remaining workers are stopped.
pub fn run(formula: &Formula, config: &PortfolioConfig) -> Result<PortfolioResult, PortfolioError> {
    config.validate()?;
    let start = Instant::now();
    let deadline = config.time_limit.map(|t| start + t);
    let pool = Arc::new(SharedPool::new(config.num_workers, config.buffer_capacity));
    let multi = config.num_workers > 1;

    let (status, winner, workers) = if config.deterministic {
        run_deterministic(formula, config, &pool, deadline)
    } else {
        run_parallel(formula, config, &pool, deadline)
    };

    if let (SolveStatus::Sat(model), Some(w)) = (&status, winner) {
        if !verify_model(formula, model) {
            return Err(PortfolioError::InvalidModel { worker: w });
        }
    }
    let workers = workers.into_iter().map(|w| w.report(&pool, multi)).collect();
    Ok(PortfolioResult {
        status,
        winner,
        wall_time: start.elapsed(),
        workers,
    })
}

fn run_deterministic(
    formula: &Formula,
    config: &PortfolioConfig,
    pool: &Arc<SharedPool>,
    deadline: Option<Instant>,
) -> (SolveStatus, Option<usize>, Vec<Worker>) {
    let mut workers: Vec<Worker> = (0..config.num_workers)
        .map(|i| Worker::new(formula, config, pool, i))
        .collect();
    let mut exhausted = vec![false; workers.len()];
    loop {
        for w in workers.iter_mut() {
            if exhausted[w.index] {
                continue;
            }
            let done = w.engine.stats().conflicts;
            let mut quantum_end = done + config.quantum;
            if let Some(m) = config.max_conflicts {
                quantum_end = quantum_end.min(m);
            }
            let budget = Budget {
                max_conflicts: Some(quantum_end),
                deadline,
                stop: None,
            };
            let status = w.engine.search(&mut w.strategy, &budget);
            if status != SolveStatus::Unknown {
                let index = w.index;
                return (status, Some(index), workers);
            }
            let out_of_conflicts = config.max_conflicts.is_some_and(|m| w.engine.stats().conflicts >= m);
            let out_of_time = deadline.is_some_and(|d| Instant::now() >= d);
            if out_of_conflicts || out_of_time {
                exhausted[w.index] = true;
            }
        }
        if exhausted.iter().all(|&e| e) {
            return (SolveStatus::Unknown, None, workers);
        }
    }
}

fn run_parallel(
    formula: &Formula,
    config: &PortfolioConfig,
    pool: &Arc<SharedPool>,
    deadline: Option<Instant>,
) -> (SolveStatus, Option<usize>, Vec<Worker>) {
    let stop = Arc::new(AtomicBool::new(false));
    let result: Mutex<Option<(SolveStatus, usize)>> = Mutex::new(None);
    let budget = Budget {
        max_conflicts: config.max_conflicts,
        deadline,
        stop: Some(Arc::clone(&stop)),
    };

    let mut workers: Vec<Worker> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..config.num_workers)
            .map(|i| {
                let (budget, stop, result) = (&budget, &stop, &result);
                scope.spawn(move || {
                    let mut w = Worker::new(formula, config, pool, i);
                    let status = w.engine.search(&mut w.strategy, budget);
                    if status != SolveStatus::Unknown {
                        let mut slot = result.lock().unwrap();
                        if slot.is_none() {
                            *slot = Some((status, i));
                            stop.store(true, Ordering::Relaxed);
                        }
                    }
                    w
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    workers.sort_by_key(|w| w.index);
    match result.into_inner().unwrap() {
        Some((status, winner)) => (status, Some(winner), workers),
        None => (SolveStatus::Unknown, None, workers),
    }
}
