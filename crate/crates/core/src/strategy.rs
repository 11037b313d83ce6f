//! When vivification runs and how its results reach other workers.
//!
//! * `None`: plain search, learned clauses exported as they are.
//! * `Pcm`: before each reduction (deferred to level 0) the better half of the
//!   worker's own learned clauses is vivified. Improvements stay local.
//! * `Lpcm`: as `Pcm`, but exported clauses carry a link cell through which the
//!   learner publishes the vivified form; importers adopt it when they reduce.
//! * `Ecm`: clauses with a small LBD are withheld from export and protected
//!   until the next restart, where they are vivified and then exported.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::cdcl::{AddOutcome, ClauseRef, Engine, Learned, SearchHooks};
use crate::exchange::{ExchangePort, Exported, SharedClause};
use crate::formula::Lit;
use crate::vivify::{select_candidates, Applied, CandidatePolicy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum LcmMode {
    #[default]
    None,
    Pcm,
    Lpcm,
    /// Export of clauses with `lbd <= max_lbd` is delayed until vivified.
    Ecm { max_lbd: u32 },
}

impl LcmMode {
    pub const ECM3: LcmMode = LcmMode::Ecm { max_lbd: 3 };
    pub const ECM4: LcmMode = LcmMode::Ecm { max_lbd: 4 };

    pub fn evaluated_modes() -> [LcmMode; 5] {
        [LcmMode::None, LcmMode::Pcm, LcmMode::Lpcm, LcmMode::ECM3, LcmMode::ECM4]
    }

    /// Builds a mode from a CLI name and the ECM LBD bound.
    pub fn from_name(name: &str, ecm_max_lbd: u32) -> Result<LcmMode, String> {
        match name.to_ascii_lowercase().as_str() {
            "none" => Ok(LcmMode::None),
            "pcm" => Ok(LcmMode::Pcm),
            "lpcm" => Ok(LcmMode::Lpcm),
            "ecm" if ecm_max_lbd >= 1 => Ok(LcmMode::Ecm { max_lbd: ecm_max_lbd }),
            "ecm" => Err("ECM needs an LBD bound of at least 1".into()),
            other => other.parse(),
        }
    }

    pub fn uses_reduce_pass(self) -> bool {
        matches!(self, LcmMode::Pcm | LcmMode::Lpcm)
    }
}

impl fmt::Display for LcmMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LcmMode::None => f.write_str("none"),
            LcmMode::Pcm => f.write_str("pcm"),
            LcmMode::Lpcm => f.write_str("lpcm"),
            LcmMode::Ecm { max_lbd } => write!(f, "ecm{max_lbd}"),
        }
    }
}

impl FromStr for LcmMode {
    type Err = String;

    fn from_str(s: &str) -> Result<LcmMode, String> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "none" => Ok(LcmMode::None),
            "pcm" => Ok(LcmMode::Pcm),
            "lpcm" => Ok(LcmMode::Lpcm),
            _ => match lower.strip_prefix("ecm").map(str::parse::<u32>) {
                Some(Ok(n)) if n >= 1 => Ok(LcmMode::Ecm { max_lbd: n }),
                _ => Err(format!("unknown clause minimization mode {s:?}")),
            },
        }
    }
}

/// Protocol events, recorded when tracing is enabled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    Learn { seq: u64, lbd: u32 },
    Withhold { seq: u64 },
    /// A withheld clause went through vivification (or was a unit) and may now be exported.
    Flush { seq: u64, vivified: bool },
    Export { seq: u64, learn_lbd: u32, lits: Vec<Lit> },
    Publish { lits: Vec<Lit> },
    /// `withheld` counts clauses awaiting export when the reduction ran.
    Reduce { removed: usize, withheld: usize, withheld_lost: usize },
}

/// Violations of the ECM protocol found in a trace.
pub fn check_ecm_trace(trace: &[TraceEvent], max_lbd: u32) -> Vec<String> {
    use std::collections::{HashMap, HashSet};
    let mut learn_lbd = HashMap::new();
    let mut withheld = HashSet::new();
    let mut flushed = HashSet::new();
    let mut violations = Vec::new();
    for event in trace {
        match *event {
            TraceEvent::Learn { seq, lbd } => {
                learn_lbd.insert(seq, lbd);
            }
            TraceEvent::Withhold { seq } => {
                withheld.insert(seq);
            }
            TraceEvent::Flush { seq, .. } => {
                withheld.remove(&seq);
                flushed.insert(seq);
            }
            TraceEvent::Export { seq, learn_lbd: lbd, .. } => {
                if learn_lbd.get(&seq) != Some(&lbd) {
                    violations.push(format!("export of {seq} with unknown learn LBD"));
                }
                if lbd <= max_lbd && !flushed.contains(&seq) {
                    violations.push(format!("clause {seq} (lbd {lbd}) exported before vivification"));
                }
            }
            TraceEvent::Reduce { withheld_lost, .. } if withheld_lost > 0 => {
                violations.push(format!("reduction deleted {withheld_lost} withheld clauses"));
            }
            _ => {}
        }
    }
    violations
}

#[derive(Clone, Copy, Debug)]
enum Withheld {
    Clause { cref: ClauseRef, id: u64, seq: u64, lbd: u32 },
    Unit { lit: Lit, seq: u64 },
}

/// Worker-private strategy bookkeeping.
#[derive(Clone, Debug, Default)]
pub struct StrategyState {
    ecm_withheld: VecDeque<Withheld>,
    pub reduce_pending: bool,
    learn_seq: u64,
}

impl StrategyState {
    pub fn withheld_len(&self) -> usize {
        self.ecm_withheld.len()
    }
}

/// The hook set driving one worker's engine.
pub struct Strategy {
    mode: LcmMode,
    policy: CandidatePolicy,
    port: Option<ExchangePort>,
    state: StrategyState,
    trace: Option<Vec<TraceEvent>>,
}

impl Strategy {
    pub fn new(mode: LcmMode, port: Option<ExchangePort>) -> Strategy {
        Strategy {
            mode,
            policy: CandidatePolicy::default(),
            port,
            state: StrategyState::default(),
            trace: None,
        }
    }

    pub fn with_trace(mut self) -> Strategy {
        self.trace = Some(Vec::new());
        self
    }

    pub fn with_policy(mut self, policy: CandidatePolicy) -> Strategy {
        self.policy = policy;
        self
    }

    pub fn mode(&self) -> LcmMode {
        self.mode
    }

    pub fn state(&self) -> &StrategyState {
        &self.state
    }

    pub fn trace(&self) -> &[TraceEvent] {
        self.trace.as_deref().unwrap_or(&[])
    }

    pub fn take_trace(&mut self) -> Vec<TraceEvent> {
        self.trace.as_mut().map(std::mem::take).unwrap_or_default()
    }

    fn worker(&self) -> usize {
        self.port.as_ref().map_or(0, |p| p.worker())
    }

    fn record(&mut self, event: impl FnOnce() -> TraceEvent) {
        if let Some(t) = self.trace.as_mut() {
            t.push(event());
        }
    }

    fn export(&mut self, engine: &mut Engine, seq: u64, learn_lbd: u32, lits: &[Lit], cref: Option<ClauseRef>) {
        let Some(port) = self.port.as_ref() else {
            return;
        };
        let (lbd, vivified) = match cref {
            Some(c) => (engine.db().meta(c).lbd, engine.db().meta(c).vivify_attempted),
            None => (1, true),
        };
        let exported = port.export(lits, lbd, self.mode, vivified);
        if let Exported::Yes { link } = exported {
            engine.stats_mut().clauses_exported += 1;
            if let (Some(c), Some(link)) = (cref, link) {
                engine.db_meta_mut(c).link = Some(link);
            }
            self.record(|| TraceEvent::Export {
                seq,
                learn_lbd,
                lits: lits.to_vec(),
            });
        }
    }

    /// Vivifies the withheld clauses and exports their final form.
    fn flush_withheld(&mut self, engine: &mut Engine) {
        while let Some(entry) = self.state.ecm_withheld.pop_front() {
            if !engine.is_ok() {
                self.state.ecm_withheld.clear();
                return;
            }
            match entry {
                Withheld::Unit { lit, seq } => {
                    self.record(|| TraceEvent::Flush { seq, vivified: false });
                    self.export(engine, seq, 1, &[lit], None);
                }
                Withheld::Clause { cref, id, seq, lbd } => {
                    if !engine.db().is_same(cref, id) {
                        continue;
                    }
                    let outcome = engine.vivify_clause(cref);
                    self.record(|| TraceEvent::Flush { seq, vivified: true });
                    match engine.apply_outcome(cref, &outcome) {
                        Applied::Kept(c) | Applied::Replaced { result: AddOutcome::Added(c), .. } => {
                            engine.db_meta_mut(c).protected = false;
                            let lits = engine.db().lits(c).to_vec();
                            self.export(engine, seq, lbd, &lits, Some(c));
                        }
                        Applied::Replaced { result: AddOutcome::Unit(l), .. } => {
                            self.export(engine, seq, lbd, &[l], None);
                        }
                        Applied::Removed | Applied::Replaced { .. } => {}
                    }
                }
            }
        }
    }

    /// The before-reduce vivification pass followed by the reduction itself.
    fn vivify_and_reduce(&mut self, engine: &mut Engine) {
        debug_assert_eq!(engine.decision_level(), 0);
        self.state.reduce_pending = false;
        let worker = self.worker();
        let candidates: Vec<(ClauseRef, u64)> = select_candidates(engine, &self.policy)
            .into_iter()
            .map(|c| (c, engine.db().id(c)))
            .collect();
        for (cref, id) in candidates {
            if !engine.is_ok() {
                return;
            }
            if !engine.db().is_same(cref, id) {
                continue;
            }
            let outcome = engine.vivify_clause(cref);
            let applied = engine.apply_outcome(cref, &outcome);
            if self.mode != LcmMode::Lpcm {
                continue;
            }
            if let Applied::Replaced { result, lits, link: Some(link) } = applied {
                match link.publish(worker, &lits) {
                    Ok(()) => {
                        engine.stats_mut().improvements_published += 1;
                        self.record(|| TraceEvent::Publish { lits: lits.clone() });
                    }
                    Err(e) => log::error!("worker {worker}: {e}"),
                }
                if let AddOutcome::Added(c) = result {
                    engine.db_meta_mut(c).link = None;
                }
            }
        }
        if !engine.is_ok() {
            return;
        }
        if self.mode == LcmMode::Lpcm {
            engine.adopt_improvements();
            if !engine.is_ok() {
                return;
            }
        }
        self.reduce(engine);
    }

    fn reduce(&mut self, engine: &mut Engine) {
        let removed = engine.reduce_db();
        if self.trace.is_some() {
            let clauses = self.state.ecm_withheld.iter().filter_map(|w| match *w {
                Withheld::Clause { cref, id, .. } => Some((cref, id)),
                Withheld::Unit { .. } => None,
            });
            let (mut withheld, mut lost) = (0, 0);
            for (cref, id) in clauses {
                withheld += 1;
                lost += !engine.db().is_same(cref, id) as usize;
            }
            self.record(|| TraceEvent::Reduce {
                removed,
                withheld,
                withheld_lost: lost,
            });
        }
    }

    fn import(&mut self, engine: &mut Engine) {
        let Some(port) = self.port.as_ref() else {
            return;
        };
        for mut record in port.import_pending() {
            if !engine.is_ok() {
                return;
            }
            // an improvement published before the import is taken directly
            if let Some(improved) = record.link.as_ref().and_then(|l| l.poll()) {
                record = SharedClause {
                    lits: improved.into(),
                    lbd: record.lbd.min(improved.len() as u32),
                    origin: record.origin,
                    link: None,
                };
            }
            if self.mode != LcmMode::Lpcm {
                record.link = None;
            }
            engine.import_clause(&record);
        }
    }
}

impl SearchHooks for Strategy {
    fn on_learn(&mut self, engine: &mut Engine, learned: Learned) {
        let seq = self.state.learn_seq;
        self.state.learn_seq += 1;
        let lbd = match learned {
            Learned::Unit(_) => 1,
            Learned::Clause(c) => engine.db().meta(c).lbd,
        };
        self.record(|| TraceEvent::Learn { seq, lbd });
        match (self.mode, learned) {
            (LcmMode::Ecm { max_lbd }, _) if lbd <= max_lbd => {
                let entry = match learned {
                    Learned::Unit(lit) => Withheld::Unit { lit, seq },
                    Learned::Clause(cref) => {
                        engine.db_meta_mut(cref).protected = true;
                        Withheld::Clause {
                            cref,
                            id: engine.db().id(cref),
                            seq,
                            lbd,
                        }
                    }
                };
                self.state.ecm_withheld.push_back(entry);
                self.record(|| TraceEvent::Withhold { seq });
            }
            (_, Learned::Unit(lit)) => self.export(engine, seq, lbd, &[lit], None),
            (_, Learned::Clause(cref)) => {
                let lits = engine.db().lits(cref).to_vec();
                self.export(engine, seq, lbd, &lits, Some(cref));
            }
        }
    }

    fn on_restart(&mut self, engine: &mut Engine) {
        match self.mode {
            LcmMode::Ecm { .. } => self.flush_withheld(engine),
            LcmMode::Pcm | LcmMode::Lpcm if self.state.reduce_pending => self.vivify_and_reduce(engine),
            _ => {}
        }
    }

    fn before_reduce(&mut self, engine: &mut Engine) {
        if !self.mode.uses_reduce_pass() {
            self.reduce(engine);
        } else if engine.decision_level() == 0 {
            self.vivify_and_reduce(engine);
        } else {
            self.state.reduce_pending = true;
        }
    }

    fn at_decision(&mut self, engine: &mut Engine) {
        if self.state.reduce_pending && engine.decision_level() == 0 {
            self.vivify_and_reduce(engine);
            if !engine.is_ok() || engine.has_pending_propagation() {
                return;
            }
        }
        self.import(engine);
    }
}
