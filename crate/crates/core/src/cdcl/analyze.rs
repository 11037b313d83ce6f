//! Conflict analysis, learned clause minimization and LBD.

use std::collections::HashSet;

use super::{ClauseRef, Engine};
use crate::formula::Lit;

/// Number of distinct decision levels in `levels`, at least 1.
pub fn compute_lbd(levels: impl IntoIterator<Item = u32>) -> u32 {
    let distinct: HashSet<u32> = levels.into_iter().collect();
    distinct.len().max(1) as u32
}

const SEEN: u8 = 1;
const REDUNDANT: u8 = 2;
const FAILED: u8 = 3;

impl Engine {
    /// LBD of `lits` under the current assignment.
    pub fn clause_lbd(&mut self, lits: &[Lit]) -> u32 {
        self.stamp += 1;
        let mut count = 0;
        for &l in lits {
            let lvl = self.level[l.var().index()] as usize;
            if self.level_stamp[lvl] != self.stamp {
                self.level_stamp[lvl] = self.stamp;
                count += 1;
            }
        }
        count.max(1)
    }

    /// First-UIP conflict analysis followed by recursive minimization.
    ///
    /// Returns the learned clause with the asserting literal first and the
    /// literal of the backtrack level second, the backtrack level, and the LBD.
    pub fn analyze(&mut self, conflict: ClauseRef) -> (Vec<Lit>, u32, u32) {
        let current = self.decision_level();
        debug_assert!(current > 0);
        let mut learned = vec![Lit::from_code(0)];
        let mut pending = 0usize;
        let mut index = self.trail.len();
        let mut clause = conflict;
        let mut resolved: Option<Lit> = None;

        loop {
            if self.db.meta(clause).learned {
                self.bump_clause(clause);
                let lbd = self.db.meta(clause).lbd;
                if lbd > 2 {
                    let lits = std::mem::take(&mut self.db.slots[clause.index()].lits);
                    let fresh = self.clause_lbd(&lits);
                    self.db.slots[clause.index()].lits = lits;
                    if fresh < lbd {
                        self.db.meta_mut(clause).lbd = fresh;
                    }
                }
            }
            let skip = resolved.map(|l| l.var());
            for k in 0..self.db.lits(clause).len() {
                let q = self.db.lits(clause)[k];
                let v = q.var();
                if Some(v) == skip || self.seen[v.index()] != 0 {
                    continue;
                }
                let lvl = self.level[v.index()];
                if lvl == 0 {
                    continue;
                }
                self.vsids.bump(v);
                self.seen[v.index()] = SEEN;
                if lvl >= current {
                    pending += 1;
                } else {
                    learned.push(q);
                }
            }
            // next literal on the trail to resolve on
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().index()] != 0 {
                    break;
                }
            }
            let p = self.trail[index];
            self.seen[p.var().index()] = 0;
            pending -= 1;
            if pending == 0 {
                learned[0] = !p;
                break;
            }
            clause = self.reason[p.var().index()].expect("implied literal without reason");
            resolved = Some(p);
        }

        self.minimize(&mut learned);

        let backtrack_level = if learned.len() == 1 {
            0
        } else {
            let (best, _) = learned
                .iter()
                .enumerate()
                .skip(1)
                .max_by_key(|(i, l)| (self.level[l.var().index()], std::cmp::Reverse(*i)))
                .unwrap();
            learned.swap(1, best);
            self.level[learned[1].var().index()]
        };
        let lbd = self.clause_lbd(&learned);
        (learned, backtrack_level, lbd)
    }

    /// Removes literals implied by the rest of the clause through the
    /// implication graph. `learned[0]` is kept. Clears all `seen` marks.
    pub(crate) fn minimize(&mut self, learned: &mut Vec<Lit>) {
        let mut abstract_levels = 0u64;
        for &l in &learned[1..] {
            abstract_levels |= self.abstract_level(l);
        }
        self.analyze_clear.clear();
        self.analyze_clear.extend_from_slice(learned);
        let mut kept = 1;
        for i in 1..learned.len() {
            let l = learned[i];
            let keep = self.reason[l.var().index()].is_none() || !self.lit_redundant(l, abstract_levels);
            if keep {
                learned[kept] = l;
                kept += 1;
            }
        }
        learned.truncate(kept);
        for i in 0..self.analyze_clear.len() {
            let v = self.analyze_clear[i].var().index();
            self.seen[v] = 0;
        }
        self.analyze_clear.clear();
    }

    fn abstract_level(&self, l: Lit) -> u64 {
        1u64 << (self.level[l.var().index()] & 63)
    }

    /// True if `lit` (false under the trail) is implied by other clause literals.
    fn lit_redundant(&mut self, lit: Lit, abstract_levels: u64) -> bool {
        self.analyze_stack.clear();
        self.analyze_stack.push(lit);
        let top = self.analyze_clear.len();
        while let Some(p) = self.analyze_stack.pop() {
            let reason = self.reason[p.var().index()].expect("redundancy check on a decision");
            for k in 0..self.db.lits(reason).len() {
                let q = self.db.lits(reason)[k];
                let v = q.var();
                if v == p.var() {
                    continue;
                }
                let vi = v.index();
                if self.level[vi] == 0 {
                    continue;
                }
                match self.seen[vi] {
                    SEEN | REDUNDANT => continue,
                    FAILED => {
                        self.fail_redundancy(top);
                        return false;
                    }
                    _ => {}
                }
                if self.reason[vi].is_some() && self.abstract_level(q) & abstract_levels != 0 {
                    self.seen[vi] = REDUNDANT;
                    self.analyze_stack.push(q);
                    self.analyze_clear.push(q);
                } else {
                    self.fail_redundancy(top);
                    return false;
                }
            }
        }
        true
    }

    fn fail_redundancy(&mut self, top: usize) {
        for i in top..self.analyze_clear.len() {
            let v = self.analyze_clear[i].var().index();
            if self.seen[v] == REDUNDANT {
                self.seen[v] = 0;
            }
        }
        self.analyze_clear.truncate(top);
    }
}
