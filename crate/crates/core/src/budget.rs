//! Node and wall-clock budgets for the exponential searches.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Maximum number of search nodes; deterministic across runs.
    pub max_nodes: Option<u64>,
    /// Wall-clock limit; useful interactively, not reproducible.
    pub max_time: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn nodes(max_nodes: u64) -> Self {
        Self { max_nodes: Some(max_nodes), max_time: None }
    }

    pub fn time(max_time: Duration) -> Self {
        Self { max_nodes: None, max_time: Some(max_time) }
    }

    pub fn is_unlimited(&self) -> bool {
        self.max_nodes.is_none() && self.max_time.is_none()
    }
}

/// Shared node counter, safe to tick from several workers.
#[derive(Debug)]
pub(crate) struct Meter {
    budget: Budget,
    start: Instant,
    nodes: AtomicU64,
    exhausted: AtomicBool,
}

impl Meter {
    pub fn new(budget: Budget) -> Self {
        Self { budget, start: Instant::now(), nodes: AtomicU64::new(0), exhausted: AtomicBool::new(false) }
    }

    pub fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }

    pub fn is_exhausted(&self) -> bool {
        self.exhausted.load(Ordering::Relaxed)
    }

    /// Adds `n` nodes; returns false once the budget is spent.
    pub fn add(&self, n: u64) -> bool {
        let total = self.nodes.fetch_add(n, Ordering::Relaxed) + n;
        if self.exhausted.load(Ordering::Relaxed) {
            return false;
        }
        let over_nodes = self.budget.max_nodes.is_some_and(|m| total > m);
        let over_time = self.budget.max_time.is_some_and(|t| self.start.elapsed() > t);
        if over_nodes || over_time {
            self.exhausted.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }
}

/// Per-worker batching front end for a [`Meter`].
pub(crate) struct Ticker<'a> {
    meter: &'a Meter,
    local: u64,
    batch: u64,
}

impl<'a> Ticker<'a> {
    pub fn new(meter: &'a Meter) -> Self {
        // With a node cap, flush on every node so the cap is exact in sequential runs.
        let batch = if meter.budget.max_nodes.is_some() { 1 } else { 1024 };
        Self { meter, local: 0, batch }
    }

    #[inline]
    pub fn tick(&mut self) -> bool {
        self.local += 1;
        if self.local >= self.batch {
            let n = std::mem::take(&mut self.local);
            return self.meter.add(n);
        }
        !self.meter.is_exhausted() || self.meter.budget.is_unlimited()
    }
}

impl Drop for Ticker<'_> {
    fn drop(&mut self) {
        if self.local > 0 {
            self.meter.nodes.fetch_add(self.local, Ordering::Relaxed);
        }
    }
}
