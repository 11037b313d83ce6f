//! Sequential CDCL engine.
//!
//! One [`Engine`] runs inside each portfolio worker. It implements two-watched
//! literal propagation, first-UIP learning with recursive minimization, VSIDS
//! with phase saving, dynamic or Luby restarts and Glucose-style reduction.
//! Strategy code plugs in through [`SearchHooks`].

mod analyze;
mod db;
mod restart;
mod vsids;

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

pub use analyze::compute_lbd;
pub use db::{ClauseDb, ClauseRef};
pub use restart::{dynamic_restart_due, luby, RestartPolicy, RestartState};
pub use vsids::Vsids;

use crate::exchange::SharedClause;
use crate::formula::{ClauseMeta, Formula, Lit, Var};
use crate::stats::Stats;

const TRUE: i8 = 1;
const FALSE: i8 = -1;
const UNDEF: i8 = 0;

#[derive(Clone, Debug, PartialEq)]
pub struct EngineConfig {
    pub restart: RestartPolicy,
    pub var_decay: f64,
    pub clause_decay: f64,
    /// Polarity used for a variable that has never been assigned.
    pub initial_phase: bool,
    /// Conflicts before the first reduction.
    pub reduce_first: u64,
    /// Growth of the reduction interval after every reduction.
    pub reduce_increment: u64,
    /// Propagations after which a single vivification is abandoned.
    pub vivify_prop_budget: u64,
    /// Imports with an LBD below this are watched by two literals, the rest by one.
    pub two_watch_import_lbd: u32,
    /// Keep a log of every clause replacement for offline checking.
    pub record_replacements: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            restart: RestartPolicy::default(),
            var_decay: 0.95,
            clause_decay: 0.999,
            initial_phase: false,
            reduce_first: 2000,
            reduce_increment: 300,
            vivify_prop_budget: 1_000_000,
            two_watch_import_lbd: 4,
            record_replacements: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    /// One value per variable, indexed by `Var::index`.
    Sat(Vec<bool>),
    Unsat,
    Unknown,
}

impl SolveStatus {
    pub fn label(&self) -> &'static str {
        match self {
            SolveStatus::Sat(_) => "SAT",
            SolveStatus::Unsat => "UNSAT",
            SolveStatus::Unknown => "UNKNOWN",
        }
    }
}

/// Limits checked at every decision.
#[derive(Clone, Debug, Default)]
pub struct Budget {
    /// Stop once the engine's total conflict count reaches this value.
    pub max_conflicts: Option<u64>,
    pub deadline: Option<Instant>,
    pub stop: Option<Arc<AtomicBool>>,
}

impl Budget {
    pub fn unlimited() -> Budget {
        Budget::default()
    }

    pub fn conflicts(max: u64) -> Budget {
        Budget {
            max_conflicts: Some(max),
            ..Budget::default()
        }
    }
}

/// A freshly learned clause handed to [`SearchHooks::on_learn`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Learned {
    /// Learned units are asserted at level 0 and not stored.
    Unit(Lit),
    Clause(ClauseRef),
}

/// Extension points of the search loop. The defaults give the plain engine.
pub trait SearchHooks {
    fn on_learn(&mut self, _engine: &mut Engine, _learned: Learned) {}

    /// Called right after backtracking to level 0 for a restart.
    fn on_restart(&mut self, _engine: &mut Engine) {}

    /// Called when the reduction schedule fires.
    fn before_reduce(&mut self, engine: &mut Engine) {
        engine.reduce_db();
    }

    /// Called at every decision point, with propagation at fixpoint.
    fn at_decision(&mut self, _engine: &mut Engine) {}
}

/// The engine without any strategy layer.
pub struct NoHooks;

impl SearchHooks for NoHooks {}

#[derive(Clone, Copy, Debug)]
struct Watcher {
    cref: ClauseRef,
    blocker: Lit,
}

/// A clause rewrite, logged when `record_replacements` is on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Replacement {
    pub kind: ReplacementKind,
    pub original: Vec<Lit>,
    pub replaced: Vec<Lit>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReplacementKind {
    Shortened,
    ConflictReplaced,
    /// An imported copy swapped for the improvement published by its learner.
    Adopted,
}

/// Result of adding a clause while search is under way.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AddOutcome {
    Added(ClauseRef),
    /// Reduced to a unit and asserted at level 0.
    Unit(Lit),
    /// Satisfied at level 0; nothing stored.
    Satisfied,
    /// Falsified at level 0; the engine is now unsatisfiable.
    Conflict,
}

pub struct Engine {
    cfg: EngineConfig,
    num_vars: usize,
    ok: bool,
    values: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<Option<ClauseRef>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    pub(crate) db: ClauseDb,
    watches: Vec<Vec<Watcher>>,
    standby: Vec<Vec<ClauseRef>>,
    vsids: Vsids,
    phase: Vec<bool>,
    restart: RestartState,
    next_reduce: u64,
    reduce_interval: u64,
    clause_inc: f64,
    in_vivify: bool,
    pub(crate) stats: Stats,
    replacements: Option<Vec<Replacement>>,
    // analysis scratch
    seen: Vec<u8>,
    analyze_stack: Vec<Lit>,
    analyze_clear: Vec<Lit>,
    level_stamp: Vec<u64>,
    stamp: u64,
}

impl Engine {
    pub fn new(formula: &Formula, cfg: EngineConfig) -> Engine {
        let n = formula.num_vars() as usize;
        let mut engine = Engine {
            num_vars: n,
            ok: !formula.has_empty_clause(),
            values: vec![UNDEF; 2 * n],
            level: vec![0; n],
            reason: vec![None; n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            db: ClauseDb::default(),
            watches: vec![Vec::new(); 2 * n],
            standby: vec![Vec::new(); 2 * n],
            vsids: Vsids::new(n, cfg.var_decay),
            phase: vec![cfg.initial_phase; n],
            restart: RestartState::new(cfg.restart),
            next_reduce: cfg.reduce_first,
            reduce_interval: cfg.reduce_first,
            clause_inc: 1.0,
            in_vivify: false,
            stats: Stats::default(),
            replacements: cfg.record_replacements.then(Vec::new),
            seen: vec![0; n],
            analyze_stack: Vec::new(),
            analyze_clear: Vec::new(),
            level_stamp: vec![0; n + 1],
            stamp: 0,
            cfg,
        };
        for clause in formula.clauses() {
            let lits = clause.lits();
            if lits.len() == 1 {
                match engine.lit_value(lits[0]) {
                    UNDEF => engine.enqueue(lits[0], None),
                    FALSE => engine.ok = false,
                    _ => {}
                }
                continue;
            }
            let cref = engine.db.alloc(lits.to_vec(), ClauseMeta::original(lits.len()));
            engine.attach(cref);
        }
        engine
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn stats_mut(&mut self) -> &mut Stats {
        &mut self.stats
    }

    pub fn db(&self) -> &ClauseDb {
        &self.db
    }

    pub fn db_meta_mut(&mut self, cref: ClauseRef) -> &mut ClauseMeta {
        self.db.meta_mut(cref)
    }

    pub fn vsids(&self) -> &Vsids {
        &self.vsids
    }

    /// False once unsatisfiability has been established.
    pub fn is_ok(&self) -> bool {
        self.ok
    }

    pub fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    pub fn trail(&self) -> &[Lit] {
        &self.trail
    }

    pub fn has_pending_propagation(&self) -> bool {
        self.qhead < self.trail.len()
    }

    pub fn take_replacements(&mut self) -> Vec<Replacement> {
        self.replacements.as_mut().map(std::mem::take).unwrap_or_default()
    }

    pub(crate) fn log_replacement(&mut self, kind: ReplacementKind, original: &[Lit], replaced: &[Lit]) {
        if let Some(log) = self.replacements.as_mut() {
            log.push(Replacement {
                kind,
                original: original.to_vec(),
                replaced: replaced.to_vec(),
            });
        }
    }

    /// Current value of `lit`: `Some(true)`, `Some(false)` or `None` if unassigned.
    pub fn value(&self, lit: Lit) -> Option<bool> {
        match self.values[lit.code()] {
            TRUE => Some(true),
            FALSE => Some(false),
            _ => None,
        }
    }

    #[inline]
    pub(crate) fn lit_value(&self, lit: Lit) -> i8 {
        self.values[lit.code()]
    }

    #[inline]
    pub(crate) fn is_true(&self, lit: Lit) -> bool {
        self.values[lit.code()] == TRUE
    }

    #[inline]
    pub(crate) fn is_false(&self, lit: Lit) -> bool {
        self.values[lit.code()] == FALSE
    }

    pub fn var_level(&self, var: Var) -> u32 {
        self.level[var.index()]
    }

    pub fn reason(&self, var: Var) -> Option<ClauseRef> {
        self.reason[var.index()]
    }

    pub(crate) fn set_vivify_context(&mut self, on: bool) {
        self.in_vivify = on;
    }

    #[inline]
    pub(crate) fn enqueue(&mut self, lit: Lit, reason: Option<ClauseRef>) {
        debug_assert_eq!(self.lit_value(lit), UNDEF);
        let v = lit.var().index();
        self.values[lit.code()] = TRUE;
        self.values[(!lit).code()] = FALSE;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(lit);
    }

    pub(crate) fn new_decision_level(&mut self) {
        self.trail_lim.push(self.trail.len());
    }

    /// Undoes all assignments above `level`.
    pub fn backtrack(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for i in (lim..self.trail.len()).rev() {
            let lit = self.trail[i];
            let v = lit.var();
            self.values[lit.code()] = UNDEF;
            self.values[(!lit).code()] = UNDEF;
            self.reason[v.index()] = None;
            if !self.in_vivify {
                self.phase[v.index()] = lit.is_positive();
            }
            self.vsids.insert(v);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = self.qhead.min(lim);
    }

    pub(crate) fn attach(&mut self, cref: ClauseRef) {
        let slot = &mut self.db.slots[cref.index()];
        debug_assert!(slot.lits.len() >= 2 && !slot.attached);
        let (a, b) = (slot.lits[0], slot.lits[1]);
        slot.attached = true;
        slot.standby = false;
        self.watches[(!a).code()].push(Watcher { cref, blocker: b });
        self.watches[(!b).code()].push(Watcher { cref, blocker: a });
    }

    fn attach_standby(&mut self, cref: ClauseRef) {
        let slot = &mut self.db.slots[cref.index()];
        debug_assert!(!slot.attached);
        slot.attached = true;
        slot.standby = true;
        let w = slot.lits[0];
        self.standby[(!w).code()].push(cref);
    }

    pub(crate) fn detach(&mut self, cref: ClauseRef) {
        let slot = &mut self.db.slots[cref.index()];
        if !slot.attached {
            return;
        }
        slot.attached = false;
        if slot.standby {
            slot.standby = false;
            let w = slot.lits[0];
            let list = &mut self.standby[(!w).code()];
            let pos = list.iter().position(|&c| c == cref).expect("standby watcher");
            list.swap_remove(pos);
        } else {
            for w in [slot.lits[0], slot.lits[1]] {
                let list = &mut self.watches[(!w).code()];
                let pos = list.iter().position(|x| x.cref == cref).expect("watcher");
                list.remove(pos);
            }
        }
    }

    /// True if the clause is the reason of its first literal.
    pub(crate) fn is_locked(&self, cref: ClauseRef) -> bool {
        let first = self.db.lits(cref)[0];
        self.is_true(first) && self.reason[first.var().index()] == Some(cref)
    }

    /// Detaches and frees a clause.
    pub(crate) fn remove_clause(&mut self, cref: ClauseRef) {
        if self.is_locked(cref) {
            let v = self.db.lits(cref)[0].var();
            debug_assert_eq!(self.level[v.index()], 0, "removing a reason above level 0");
            self.reason[v.index()] = None;
        }
        self.detach(cref);
        self.db.release(cref);
    }

    /// Unit propagation to fixpoint. Returns the conflicting clause, if any.
    pub fn propagate(&mut self) -> Option<ClauseRef> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations_total += 1;
            if self.in_vivify {
                self.stats.propagations_vivify += 1;
            }
            if let Some(conflict) = self.propagate_watches(p) {
                return Some(conflict);
            }
            if !self.standby[p.code()].is_empty() {
                if let Some(conflict) = self.propagate_standby(p) {
                    return Some(conflict);
                }
            }
        }
        None
    }

    fn propagate_watches(&mut self, p: Lit) -> Option<ClauseRef> {
        let false_lit = !p;
        let mut ws = std::mem::take(&mut self.watches[p.code()]);
        let mut conflict = None;
        let (mut i, mut j) = (0, 0);
        'next: while i < ws.len() {
            let w = ws[i];
            i += 1;
            if self.is_true(w.blocker) {
                ws[j] = w;
                j += 1;
                continue;
            }
            let lits = &mut self.db.slots[w.cref.index()].lits;
            if lits[0] == false_lit {
                lits.swap(0, 1);
            }
            debug_assert_eq!(lits[1], false_lit);
            let first = lits[0];
            if first != w.blocker && self.values[first.code()] == TRUE {
                ws[j] = Watcher {
                    cref: w.cref,
                    blocker: first,
                };
                j += 1;
                continue;
            }
            for k in 2..lits.len() {
                if self.values[lits[k].code()] != FALSE {
                    lits.swap(1, k);
                    let new_watch = lits[1];
                    self.watches[(!new_watch).code()].push(Watcher {
                        cref: w.cref,
                        blocker: first,
                    });
                    continue 'next;
                }
            }
            ws[j] = Watcher {
                cref: w.cref,
                blocker: first,
            };
            j += 1;
            if self.lit_value(first) == FALSE {
                conflict = Some(w.cref);
                self.qhead = self.trail.len();
                while i < ws.len() {
                    ws[j] = ws[i];
                    i += 1;
                    j += 1;
                }
            } else {
                self.enqueue(first, Some(w.cref));
            }
        }
        ws.truncate(j);
        debug_assert!(self.watches[p.code()].is_empty());
        self.watches[p.code()] = ws;
        conflict
    }

    /// One-watched clauses only detect conflicts. A conflicting clause is
    /// promoted to two watches on its two highest-level literals.
    fn propagate_standby(&mut self, p: Lit) -> Option<ClauseRef> {
        let false_lit = !p;
        let mut list = std::mem::take(&mut self.standby[p.code()]);
        let mut conflict = None;
        while let Some(cref) = list.pop() {
            let lits = &mut self.db.slots[cref.index()].lits;
            debug_assert_eq!(lits[0], false_lit);
            match (1..lits.len()).find(|&k| self.values[lits[k].code()] != FALSE) {
                Some(k) => {
                    lits.swap(0, k);
                    let w = lits[0];
                    self.standby[(!w).code()].push(cref);
                }
                None => {
                    let best = (1..lits.len())
                        .max_by_key(|&k| (self.level[lits[k].var().index()], std::cmp::Reverse(k)))
                        .unwrap();
                    lits.swap(1, best);
                    let slot = &mut self.db.slots[cref.index()];
                    slot.attached = false;
                    self.attach(cref);
                    self.qhead = self.trail.len();
                    conflict = Some(cref);
                    break;
                }
            }
        }
        let rest = std::mem::take(&mut self.standby[p.code()]);
        list.extend(rest);
        self.standby[p.code()] = list;
        conflict
    }

    /// Picks the unassigned variable of highest activity with its saved phase.
    pub fn decide(&mut self) -> Option<Lit> {
        while let Some(v) = self.vsids.peek() {
            if self.lit_value(v.lit(true)) == UNDEF {
                return Some(v.lit(self.phase[v.index()]));
            }
            self.vsids.pop();
        }
        None
    }

    /// Makes `lit` a decision on a new level.
    pub fn assume(&mut self, lit: Lit) {
        self.new_decision_level();
        self.enqueue(lit, None);
    }

    pub fn set_phase(&mut self, var: Var, positive: bool) {
        self.phase[var.index()] = positive;
    }

    pub fn set_activity(&mut self, var: Var, value: f64) {
        self.vsids.set_activity(var, value);
    }

    pub(crate) fn bump_clause(&mut self, cref: ClauseRef) {
        let meta = self.db.meta_mut(cref);
        meta.activity += self.clause_inc;
        if meta.activity > 1e20 {
            for slot in self.db.slots.iter_mut().filter(|s| s.live && s.meta.learned) {
                slot.meta.activity *= 1e-20;
            }
            self.clause_inc *= 1e-20;
        }
    }

    fn model(&self) -> Vec<bool> {
        (0..self.num_vars)
            .map(|v| self.is_true(Var(v as u32).lit(true)))
            .collect()
    }

    /// Adds a learned clause produced by conflict analysis and asserts its first literal.
    fn learn(&mut self, lits: Vec<Lit>, lbd: u32) -> Learned {
        self.stats.clauses_learned += 1;
        if lits.len() == 1 {
            self.enqueue(lits[0], None);
            return Learned::Unit(lits[0]);
        }
        let first = lits[0];
        let cref = self.db.alloc(lits, ClauseMeta::learned(lbd));
        self.attach(cref);
        self.bump_clause(cref);
        self.enqueue(first, Some(cref));
        Learned::Clause(cref)
    }

    /// Runs CDCL search until a result is found or `budget` is exhausted.
    ///
    /// Search state persists between calls, so a run can be sliced into quanta.
    pub fn search(&mut self, hooks: &mut dyn SearchHooks, budget: &Budget) -> SolveStatus {
        let mut ticks = 0u32;
        loop {
            if !self.ok {
                return SolveStatus::Unsat;
            }
            if let Some(conflict) = self.propagate() {
                self.stats.conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return SolveStatus::Unsat;
                }
                let (learned, backtrack_level, lbd) = self.analyze(conflict);
                self.backtrack(backtrack_level);
                self.restart.on_conflict(lbd);
                let learned = self.learn(learned, lbd);
                self.vsids.decay();
                self.clause_inc /= self.cfg.clause_decay;
                hooks.on_learn(self, learned);
                if budget.max_conflicts.is_some_and(|m| self.stats.conflicts >= m) {
                    return SolveStatus::Unknown;
                }
                continue;
            }

            if budget.stop.as_ref().is_some_and(|s| s.load(Ordering::Relaxed))
                || budget.max_conflicts.is_some_and(|m| self.stats.conflicts >= m)
            {
                return SolveStatus::Unknown;
            }
            ticks = ticks.wrapping_add(1);
            if ticks.is_multiple_of(64) && budget.deadline.is_some_and(|d| Instant::now() >= d) {
                return SolveStatus::Unknown;
            }

            if self.restart.should_restart() {
                self.backtrack(0);
                self.restart.on_restart();
                self.stats.restarts += 1;
                hooks.on_restart(self);
                continue;
            }

            if self.stats.conflicts >= self.next_reduce {
                self.reduce_interval += self.cfg.reduce_increment;
                self.next_reduce = self.stats.conflicts + self.reduce_interval;
                hooks.before_reduce(self);
                if !self.ok || self.has_pending_propagation() {
                    continue;
                }
            }

            hooks.at_decision(self);
            if !self.ok || self.has_pending_propagation() {
                continue;
            }

            match self.decide() {
                None => return SolveStatus::Sat(self.model()),
                Some(lit) => {
                    self.stats.decisions += 1;
                    self.assume(lit);
                }
            }
        }
    }

    /// Runs search to completion with no strategy layer.
    pub fn solve(&mut self) -> SolveStatus {
        self.search(&mut NoHooks, &Budget::unlimited())
    }

    /// Glucose-style reduction: the worse half of the removable learned clauses
    /// (by LBD, then activity) is deleted. Protected clauses, binaries and reasons
    /// are never removable. Returns the number of clauses removed.
    pub fn reduce_db(&mut self) -> usize {
        let mut candidates: Vec<ClauseRef> = self
            .db
            .learned()
            .filter(|&c| {
                let meta = self.db.meta(c);
                !meta.protected && self.db.lits(c).len() > 2 && !self.is_locked(c)
            })
            .collect();
        candidates.sort_by(|&a, &b| {
            let (ma, mb) = (self.db.meta(a), self.db.meta(b));
            mb.lbd
                .cmp(&ma.lbd)
                .then(ma.activity.total_cmp(&mb.activity))
                .then(self.db.id(a).cmp(&self.db.id(b)))
        });
        let remove = candidates.len() / 2;
        for &cref in &candidates[..remove] {
            let slot = &mut self.db.slots[cref.index()];
            slot.attached = false;
            slot.standby = false;
            self.db.release(cref);
        }
        if remove > 0 {
            self.purge_watchers();
        }
        self.stats.reductions += 1;
        remove
    }

    fn purge_watchers(&mut self) {
        let db = &self.db;
        for list in self.watches.iter_mut() {
            list.retain(|w| db.slots[w.cref.index()].attached);
        }
        for list in self.standby.iter_mut() {
            list.retain(|&c| db.slots[c.index()].attached);
        }
    }

    /// Adds a clause at the current decision level so that the watch invariant
    /// holds afterwards. Literals false at level 0 are dropped; the engine may
    /// backtrack to make the clause propagate at the right level.
    fn add_clause_live(&mut self, lits: &[Lit], meta: ClauseMeta, one_watch: bool) -> AddOutcome {
        let mut kept = Vec::with_capacity(lits.len());
        for &l in lits {
            if self.lit_value(l) != UNDEF && self.level[l.var().index()] == 0 {
                if self.is_true(l) {
                    return AddOutcome::Satisfied;
                }
                continue;
            }
            kept.push(l);
        }
        match kept.len() {
            0 => {
                self.ok = false;
                return AddOutcome::Conflict;
            }
            1 => {
                self.backtrack(0);
                self.enqueue(kept[0], None);
                return AddOutcome::Unit(kept[0]);
            }
            _ => {}
        }
        // non-false literals first, then false literals by decreasing level
        kept.sort_by_key(|&l| {
            
            if self.is_false(l) {
                u32::MAX - self.level[l.var().index()]
            } else {
                0
            }
        });
        let mut meta = meta;
        meta.lbd = meta.lbd.clamp(1, kept.len() as u32);
        let (a, b) = (kept[0], kept[1]);
        let cref = self.db.alloc(kept, meta);

        if one_watch && !self.is_false(a) {
            self.attach_standby(cref);
            return AddOutcome::Added(cref);
        }
        let level_of = |e: &Engine, l: Lit| e.level[l.var().index()];
        if !self.is_false(b) {
            self.attach(cref);
        } else if !self.is_false(a) {
            let lb = level_of(self, b);
            if self.is_true(a) && level_of(self, a) <= lb {
                self.attach(cref);
            } else {
                self.backtrack(lb);
                self.attach(cref);
                self.enqueue(a, Some(cref));
            }
        } else {
            let (la, lb) = (level_of(self, a), level_of(self, b));
            if la > lb {
                self.backtrack(lb);
                self.attach(cref);
                self.enqueue(a, Some(cref));
            } else {
                self.backtrack(lb - 1);
                self.attach(cref);
            }
        }
        AddOutcome::Added(cref)
    }

    /// Adds a learned clause from outside conflict analysis (for example a
    /// clause derived by the caller). Behaves like an import that is not
    /// marked as imported.
    pub fn add_learned(&mut self, lits: &[Lit], lbd: u32) -> AddOutcome {
        let outcome = self.add_clause_live(lits, ClauseMeta::learned(lbd), false);
        if matches!(outcome, AddOutcome::Added(_) | AddOutcome::Unit(_)) {
            self.stats.clauses_learned += 1;
        }
        outcome
    }

    /// Adds a clause received from another worker.
    ///
    /// Clauses with LBD below `two_watch_import_lbd` are watched normally; the
    /// rest wait on a single watch until they take part in a conflict.
    pub fn import_clause(&mut self, record: &SharedClause) -> AddOutcome {
        let mut meta = ClauseMeta::learned(record.lbd);
        meta.imported = true;
        meta.link = record.link.clone();
        let one_watch = record.lbd >= self.cfg.two_watch_import_lbd;
        let outcome = self.add_clause_live(&record.lits, meta, one_watch);
        if matches!(outcome, AddOutcome::Added(_) | AddOutcome::Unit(_)) {
            self.stats.clauses_imported += 1;
        }
        outcome
    }

    /// Replaces the literals of `cref` while at level 0, keeping its metadata.
    /// The LBD is capped at the old value. Returns what happened to the clause.
    pub(crate) fn replace_at_level0(&mut self, cref: ClauseRef, new_lits: &[Lit]) -> AddOutcome {
        assert_eq!(self.decision_level(), 0);
        let mut meta = self.db.meta(cref).clone();
        meta.lbd = meta.lbd.min(new_lits.len().max(1) as u32);
        self.remove_clause(cref);
        let outcome = self.add_clause_live(new_lits, meta, false);
        if let AddOutcome::Unit(_) = outcome {
            if self.propagate().is_some() {
                self.ok = false;
                return AddOutcome::Conflict;
            }
        }
        outcome
    }

    /// Polls the links of imported clauses and swaps in published improvements.
    /// Must run at level 0. Returns the number of adopted improvements.
    pub fn adopt_improvements(&mut self) -> usize {
        assert_eq!(self.decision_level(), 0);
        let linked: Vec<ClauseRef> = self
            .db
            .learned()
            .filter(|&c| {
                let m = self.db.meta(c);
                m.imported && m.link.as_ref().is_some_and(|l| l.is_published())
            })
            .collect();
        let mut adopted = 0;
        for cref in linked {
            if !self.ok {
                break;
            }
            let link = self.db.meta_mut(cref).link.take().unwrap();
            let improved = link.poll().unwrap().to_vec();
            let original = self.db.lits(cref).to_vec();
            self.log_replacement(ReplacementKind::Adopted, &original, &improved);
            self.replace_at_level0(cref, &improved);
            adopted += 1;
        }
        self.stats.improvements_adopted += adopted as u64;
        adopted
    }

    /// Checks the structural watch invariant: every attached clause has exactly
    /// its watched literals registered, and at a conflict-free fixpoint a clause
    /// with a false watched literal is satisfied.
    pub fn check_watches(&self) -> Result<(), String> {
        let mut count = vec![0usize; self.db.slots.len()];
        for (code, list) in self.watches.iter().enumerate() {
            let watched = !Lit::from_code(code);
            for w in list {
                let slot = &self.db.slots[w.cref.index()];
                if !slot.live || !slot.attached || slot.standby {
                    return Err(format!("stale watcher for {:?}", w.cref));
                }
                if slot.lits[0] != watched && slot.lits[1] != watched {
                    return Err(format!("{:?} watched by non-watch literal {watched}", slot.lits));
                }
                count[w.cref.index()] += 1;
            }
        }
        for (code, list) in self.standby.iter().enumerate() {
            let watched = !Lit::from_code(code);
            for &c in list {
                let slot = &self.db.slots[c.index()];
                if !slot.live || !slot.standby || slot.lits[0] != watched {
                    return Err(format!("bad standby watcher for {c:?}"));
                }
                count[c.index()] += 2;
            }
        }
        let fixpoint = !self.has_pending_propagation();
        for cref in self.db.iter() {
            let slot = &self.db.slots[cref.index()];
            if slot.attached && count[cref.index()] != 2 {
                return Err(format!("{:?} has {} watchers", slot.lits, count[cref.index()]));
            }
            if !slot.meta.is_consistent(slot.lits.len()) {
                return Err(format!("inconsistent meta {:?}", slot.meta));
            }
            if fixpoint && slot.attached && !slot.standby {
                let (a, b) = (slot.lits[0], slot.lits[1]);
                let satisfied = slot.lits.iter().any(|&l| self.is_true(l));
                if (self.is_false(a) || self.is_false(b)) && !satisfied {
                    return Err(format!("watch invariant broken on {:?}", slot.lits));
                }
            }
        }
        Ok(())
    }
}
