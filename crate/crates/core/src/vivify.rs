//! Learned clause vivification at decision level 0.
//!
//! The negation of each clause literal is assumed in turn and propagated.
//! A conflict replaces the clause by the assumptions that caused it, a literal
//! propagated to true ends the clause there, and literals propagated to false
//! are dropped.

use crate::cdcl::{AddOutcome, ClauseRef, Engine, ReplacementKind};
use crate::exchange::LinkHandle;
use crate::formula::Lit;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VivifyKind {
    Unchanged,
    /// No conflict; some literals were dropped.
    Shortened(Vec<Lit>),
    /// Propagation conflicted; the clause is replaced by the involved assumptions.
    ConflictReplaced(Vec<Lit>),
    /// A literal is true at level 0.
    Satisfied,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VivifyOutcome {
    pub kind: VivifyKind,
    pub propagations_used: u64,
}

impl VivifyOutcome {
    pub fn is_success(&self) -> bool {
        matches!(
            self.kind,
            VivifyKind::Shortened(_) | VivifyKind::ConflictReplaced(_)
        )
    }

    pub fn new_lits(&self) -> Option<&[Lit]> {
        match &self.kind {
            VivifyKind::Shortened(l) | VivifyKind::ConflictReplaced(l) => Some(l),
            _ => None,
        }
    }
}

/// Which learned clauses are vivified before a reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CandidatePolicy {
    pub max_lbd: u32,
    pub require_not_attempted: bool,
    pub exclude_imported: bool,
}

impl Default for CandidatePolicy {
    fn default() -> Self {
        CandidatePolicy {
            max_lbd: 5,
            require_not_attempted: true,
            exclude_imported: true,
        }
    }
}

/// Learned clauses sorted by LBD (ascending) then activity (descending); the
/// better half is kept and then filtered by `policy`.
pub fn select_candidates(engine: &Engine, policy: &CandidatePolicy) -> Vec<ClauseRef> {
    let db = engine.db();
    let mut all: Vec<ClauseRef> = db.learned().collect();
    all.sort_by(|&a, &b| {
        let (ma, mb) = (db.meta(a), db.meta(b));
        ma.lbd
            .cmp(&mb.lbd)
            .then(mb.activity.total_cmp(&ma.activity))
            .then(db.id(a).cmp(&db.id(b)))
    });
    all.truncate(all.len().div_ceil(2));
    all.retain(|&c| {
        let m = db.meta(c);
        m.lbd <= policy.max_lbd
            && !(policy.require_not_attempted && m.vivify_attempted)
            && !(policy.exclude_imported && m.imported)
    });
    all
}

/// What [`Engine::apply_outcome`] did to the clause.
#[derive(Clone, Debug)]
pub enum Applied {
    Kept(ClauseRef),
    Removed,
    Replaced {
        result: AddOutcome,
        lits: Vec<Lit>,
        link: Option<LinkHandle>,
    },
}

impl Engine {
    /// Vivifies one clause. Must be called at level 0 with propagation at fixpoint.
    /// All assumptions are undone before returning and the clause itself is left
    /// untouched; see [`Engine::apply_outcome`].
    pub fn vivify_clause(&mut self, cref: ClauseRef) -> VivifyOutcome {
        assert_eq!(self.decision_level(), 0, "vivification runs at level 0 only");
        assert!(!self.has_pending_propagation());
        assert!(self.db.is_live(cref));

        self.db.meta_mut(cref).vivify_attempted = true;
        self.stats.vivify_attempts += 1;
        let lits = self.db.lits(cref).to_vec();
        if lits.iter().any(|&l| self.is_true(l)) {
            return VivifyOutcome {
                kind: VivifyKind::Satisfied,
                propagations_used: 0,
            };
        }

        self.detach(cref);
        self.set_vivify_context(true);
        let start = self.stats.propagations_vivify;
        let budget = self.cfg_vivify_budget();
        let mut kept = Vec::with_capacity(lits.len());
        let mut replaced = None;
        let mut aborted = false;

        for &l in &lits {
            if self.is_true(l) {
                kept.push(l);
                break;
            }
            if self.is_false(l) {
                continue;
            }
            kept.push(l);
            self.assume(!l);
            if let Some(conflict) = self.propagate() {
                replaced = Some(self.assumption_clause(conflict, &lits));
                break;
            }
            if self.stats.propagations_vivify - start > budget {
                aborted = true;
                break;
            }
        }

        self.backtrack(0);
        self.set_vivify_context(false);
        self.attach(cref);
        let used = self.stats.propagations_vivify - start;

        let kind = if aborted {
            VivifyKind::Unchanged
        } else if let Some(new) = replaced.filter(|n| n.len() < lits.len()) {
            VivifyKind::ConflictReplaced(new)
        } else if kept.len() < lits.len() {
            VivifyKind::Shortened(kept)
        } else {
            VivifyKind::Unchanged
        };
        VivifyOutcome {
            kind,
            propagations_used: used,
        }
    }

    fn cfg_vivify_budget(&self) -> u64 {
        self.config().vivify_prop_budget
    }

    /// Literals of `original` whose negated assumption contributed to `conflict`.
    fn assumption_clause(&mut self, conflict: ClauseRef, original: &[Lit]) -> Vec<Lit> {
        let mut marked = vec![false; self.num_vars()];
        for &q in self.db.lits(conflict) {
            if self.var_level(q.var()) > 0 {
                marked[q.var().index()] = true;
            }
        }
        let mut involved = Vec::new();
        for i in (0..self.trail().len()).rev() {
            let x = self.trail()[i];
            if self.var_level(x.var()) == 0 {
                break;
            }
            if !std::mem::take(&mut marked[x.var().index()]) {
                continue;
            }
            match self.reason(x.var()) {
                None => involved.push(!x),
                Some(r) => {
                    for &q in self.db.lits(r) {
                        if q.var() != x.var() && self.var_level(q.var()) > 0 {
                            marked[q.var().index()] = true;
                        }
                    }
                }
            }
        }
        original
            .iter()
            .copied()
            .filter(|l| involved.contains(l))
            .collect()
    }

    /// Applies a vivification result to the database.
    pub fn apply_outcome(&mut self, cref: ClauseRef, outcome: &VivifyOutcome) -> Applied {
        match &outcome.kind {
            VivifyKind::Unchanged => Applied::Kept(cref),
            VivifyKind::Satisfied => {
                self.remove_clause(cref);
                Applied::Removed
            }
            VivifyKind::Shortened(new) | VivifyKind::ConflictReplaced(new) => {
                let kind = if matches!(outcome.kind, VivifyKind::Shortened(_)) {
                    ReplacementKind::Shortened
                } else {
                    ReplacementKind::ConflictReplaced
                };
                let original = self.db.lits(cref).to_vec();
                debug_assert!(new.len() < original.len());
                self.stats.vivify_successes += 1;
                self.stats.literals_removed += (original.len() - new.len()) as u64;
                self.log_replacement(kind, &original, new);
                let link = self.db.meta(cref).link.clone();
                let result = self.replace_at_level0(cref, new);
                Applied::Replaced {
                    result,
                    lits: new.clone(),
                    link,
                }
            }
        }
    }
}
