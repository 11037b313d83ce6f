//! Clause storage.

use crate::formula::{ClauseMeta, Lit};

/// Handle to a stored clause. Handles are recycled after deletion; pair them
/// with [`ClauseDb::id`] when they must stay valid across reductions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClauseRef(pub(crate) u32);

impl ClauseRef {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Slot {
    pub lits: Vec<Lit>,
    pub meta: ClauseMeta,
    pub id: u64,
    pub live: bool,
    pub attached: bool,
    /// Watched by one literal only (lazily imported).
    pub standby: bool,
}

#[derive(Clone, Debug, Default)]
pub struct ClauseDb {
    pub(crate) slots: Vec<Slot>,
    free: Vec<u32>,
    next_id: u64,
    live: usize,
}

impl ClauseDb {
    pub(crate) fn alloc(&mut self, lits: Vec<Lit>, meta: ClauseMeta) -> ClauseRef {
        debug_assert!(meta.is_consistent(lits.len()), "{meta:?} for {lits:?}");
        let slot = Slot {
            lits,
            meta,
            id: self.next_id,
            live: true,
            attached: false,
            standby: false,
        };
        self.next_id += 1;
        self.live += 1;
        if let Some(i) = self.free.pop() {
            self.slots[i as usize] = slot;
            ClauseRef(i)
        } else {
            self.slots.push(slot);
            ClauseRef(self.slots.len() as u32 - 1)
        }
    }

    /// Marks a slot dead. The caller must have detached it already.
    pub(crate) fn release(&mut self, cref: ClauseRef) {
        let slot = &mut self.slots[cref.index()];
        debug_assert!(slot.live && !slot.attached);
        slot.live = false;
        slot.lits = Vec::new();
        slot.meta.link = None;
        self.live -= 1;
        self.free.push(cref.0);
    }

    #[inline]
    pub fn lits(&self, cref: ClauseRef) -> &[Lit] {
        &self.slots[cref.index()].lits
    }

    #[inline]
    pub fn meta(&self, cref: ClauseRef) -> &ClauseMeta {
        &self.slots[cref.index()].meta
    }

    #[inline]
    pub(crate) fn meta_mut(&mut self, cref: ClauseRef) -> &mut ClauseMeta {
        &mut self.slots[cref.index()].meta
    }

    /// Unique, never reused identifier of the clause currently in `cref`.
    pub fn id(&self, cref: ClauseRef) -> u64 {
        self.slots[cref.index()].id
    }

    pub fn is_live(&self, cref: ClauseRef) -> bool {
        self.slots.get(cref.index()).is_some_and(|s| s.live)
    }

    /// True if `cref` still holds the clause with identifier `id`.
    pub fn is_same(&self, cref: ClauseRef, id: u64) -> bool {
        self.slots.get(cref.index()).is_some_and(|s| s.live && s.id == id)
    }

    pub fn is_standby(&self, cref: ClauseRef) -> bool {
        self.slots[cref.index()].standby
    }

    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = ClauseRef> + '_ {
        self.slots
            .iter()
            .enumerate()
            .filter(|(_, s)| s.live)
            .map(|(i, _)| ClauseRef(i as u32))
    }

    pub fn learned(&self) -> impl Iterator<Item = ClauseRef> + '_ {
        self.iter().filter(|&c| self.meta(c).learned)
    }
}
