//! Cross-worker clause sharing.
//!
//! Every worker owns one bounded inbound buffer in the [`SharedPool`]. Exporting a
//! clause copies one [`SharedClause`] record into every other worker's buffer.
//! Under the linked mode each record may carry a [`LinkCell`], through which
//! the learning worker later publishes a strengthened version of the clause.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use crossbeam_queue::ArrayQueue;
use thiserror::Error;

use crate::formula::Lit;
use crate::strategy::LcmMode;

/// Default capacity of each inbound buffer.
pub const DEFAULT_BUFFER_CAPACITY: usize = 1 << 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExchangeError {
    #[error("link already published")]
    DoublePublish,
    #[error("worker {caller} is not the designated writer (worker {writer}) of this link")]
    NotWriter { caller: usize, writer: usize },
}

/// Write-once cell carrying the improved form of a shared clause.
///
/// Only the designated writer may publish, and only once. Readers never block
/// and observe either nothing or the complete literal sequence.
#[derive(Debug)]
pub struct LinkCell {
    writer: usize,
    improved: OnceLock<Box<[Lit]>>,
}

/// Reference-counted handle to a [`LinkCell`]; the owner's clause and every
/// shared copy hold one.
pub type LinkHandle = Arc<LinkCell>;

impl LinkCell {
    pub fn new(writer: usize) -> LinkHandle {
        Arc::new(LinkCell {
            writer,
            improved: OnceLock::new(),
        })
    }

    pub fn writer(&self) -> usize {
        self.writer
    }

    pub fn publish(&self, caller: usize, lits: &[Lit]) -> Result<(), ExchangeError> {
        if caller != self.writer {
            return Err(ExchangeError::NotWriter {
                caller,
                writer: self.writer,
            });
        }
        self.improved
            .set(lits.into())
            .map_err(|_| ExchangeError::DoublePublish)
    }

    pub fn poll(&self) -> Option<&[Lit]> {
        self.improved.get().map(|b| &b[..])
    }

    pub fn is_published(&self) -> bool {
        self.improved.get().is_some()
    }
}

/// Publishes `lits` on `link` on behalf of `caller`.
pub fn publish_improvement(link: &LinkCell, caller: usize, lits: &[Lit]) -> Result<(), ExchangeError> {
    link.publish(caller, lits)
}

/// Non-blocking read of a link.
pub fn poll_improvement(link: &LinkCell) -> Option<&[Lit]> {
    link.poll()
}

/// One exported clause as seen by an importer.
#[derive(Clone, Debug)]
pub struct SharedClause {
    pub lits: Arc<[Lit]>,
    pub lbd: u32,
    pub origin: usize,
    pub link: Option<LinkHandle>,
}

/// Which learned clauses are worth sending to other workers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExportFilter {
    pub max_lbd: u32,
    pub max_len: usize,
}

impl Default for ExportFilter {
    fn default() -> Self {
        ExportFilter {
            max_lbd: 4,
            max_len: 30,
        }
    }
}

impl ExportFilter {
    pub fn accepts(&self, lbd: u32, len: usize) -> bool {
        lbd <= self.max_lbd && len <= self.max_len
    }
}

/// Inbound buffers for all workers of one portfolio run.
pub struct SharedPool {
    inbound: Vec<ArrayQueue<SharedClause>>,
    overflows: Vec<AtomicU64>,
}

impl SharedPool {
    pub fn new(workers: usize, capacity: usize) -> SharedPool {
        SharedPool {
            inbound: (0..workers).map(|_| ArrayQueue::new(capacity.max(1))).collect(),
            overflows: (0..workers).map(|_| AtomicU64::new(0)).collect(),
        }
    }

    pub fn workers(&self) -> usize {
        self.inbound.len()
    }

    /// Appends `record` to every inbound buffer except the origin's, dropping
    /// the oldest entry of a full buffer. Returns the number of recipients.
    pub fn broadcast(&self, record: &SharedClause) -> usize {
        let mut sent = 0;
        for (worker, queue) in self.inbound.iter().enumerate() {
            if worker == record.origin {
                continue;
            }
            if queue.force_push(record.clone()).is_some() {
                self.overflows[worker].fetch_add(1, Ordering::Relaxed);
            }
            sent += 1;
        }
        sent
    }

    /// Drains `worker`'s inbound buffer in arrival order.
    pub fn drain(&self, worker: usize) -> Vec<SharedClause> {
        let queue = &self.inbound[worker];
        let mut out = Vec::with_capacity(queue.len());
        while let Some(record) = queue.pop() {
            out.push(record);
        }
        out
    }

    pub fn pending(&self, worker: usize) -> usize {
        self.inbound[worker].len()
    }

    /// Records dropped from `worker`'s buffer because it was full.
    pub fn overflows(&self, worker: usize) -> u64 {
        self.overflows[worker].load(Ordering::Relaxed)
    }
}

/// Outcome of [`ExchangePort::export`].
#[derive(Clone, Debug)]
pub enum Exported {
    No,
    Yes { link: Option<LinkHandle> },
}

impl Exported {
    pub fn is_exported(&self) -> bool {
        matches!(self, Exported::Yes { .. })
    }
}

/// A worker's connection to the pool.
#[derive(Clone)]
pub struct ExchangePort {
    pool: Arc<SharedPool>,
    worker: usize,
    filter: ExportFilter,
}

impl ExchangePort {
    pub fn new(pool: Arc<SharedPool>, worker: usize, filter: ExportFilter) -> ExchangePort {
        assert!(worker < pool.workers());
        ExchangePort {
            pool,
            worker,
            filter,
        }
    }

    pub fn worker(&self) -> usize {
        self.worker
    }

    pub fn filter(&self) -> ExportFilter {
        self.filter
    }

    pub fn pool(&self) -> &Arc<SharedPool> {
        &self.pool
    }

    /// Sends a clause to every other worker if the filter accepts it.
    ///
    /// In linked mode a fresh [`LinkCell`] is attached unless the clause has
    /// already been through vivification, in which case there is nothing left to
    /// publish later.
    pub fn export(&self, lits: &[Lit], lbd: u32, mode: LcmMode, vivified: bool) -> Exported {
        if !self.filter.accepts(lbd, lits.len()) {
            return Exported::No;
        }
        let link = (mode == LcmMode::Lpcm && !vivified).then(|| LinkCell::new(self.worker));
        let record = SharedClause {
            lits: lits.into(),
            lbd,
            origin: self.worker,
            link: link.clone(),
        };
        self.pool.broadcast(&record);
        Exported::Yes { link }
    }

    pub fn import_pending(&self) -> Vec<SharedClause> {
        self.pool.drain(self.worker)
    }

    pub fn overflows(&self) -> u64 {
        self.pool.overflows(self.worker)
    }
}
