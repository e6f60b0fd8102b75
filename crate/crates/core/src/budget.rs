//! Node and wall-clock limits shared by the exhaustive searches.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_nodes: u64,
    pub max_time: Option<Duration>,
}

impl Budget {
    pub const DEFAULT_MAX_NODES: u64 = 2_000_000_000;

    pub fn nodes(max_nodes: u64) -> Self {
        Self {
            max_nodes,
            max_time: None,
        }
    }

    pub fn unlimited() -> Self {
        Self::nodes(u64::MAX)
    }

    pub fn with_time(mut self, limit: Duration) -> Self {
        self.max_time = Some(limit);
        self
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self::nodes(Self::DEFAULT_MAX_NODES)
    }
}

/// Shared counter for one search run. Safe to tick from many threads.
#[derive(Debug)]
pub struct Meter {
    budget: Budget,
    start: Instant,
    nodes: AtomicU64,
    exceeded: AtomicBool,
}

impl Meter {
    pub fn new(budget: Budget) -> Self {
        Self {
            budget,
            start: Instant::now(),
            nodes: AtomicU64::new(0),
            exceeded: AtomicBool::new(false),
        }
    }

    /// Count one node; fails once either limit is hit.
    #[inline]
    pub fn tick(&self) -> Result<()> {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if self.exceeded.load(Ordering::Relaxed) {
            return Err(Error::BudgetExceeded { nodes: n });
        }
        let over_nodes = n > self.budget.max_nodes;
        let over_time =
            n.is_multiple_of(4096) && self.budget.max_time.is_some_and(|limit| self.start.elapsed() > limit);
        if over_nodes || over_time {
            self.exceeded.store(true, Ordering::Relaxed);
            return Err(Error::BudgetExceeded { nodes: n });
        }
        Ok(())
    }

    pub fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }

    pub fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }

    pub fn exceeded(&self) -> bool {
        self.exceeded.load(Ordering::Relaxed)
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_limit() {
        let m = Meter::new(Budget::nodes(3));
        assert!(m.tick().is_ok());
        assert!(m.tick().is_ok());
        assert!(m.tick().is_ok());
        assert_eq!(m.tick(), Err(Error::BudgetExceeded { nodes: 4 }));
        assert!(m.exceeded());
        assert!(m.tick().is_err());
    }

    #[test]
    fn time_limit() {
        let m = Meter::new(Budget::unlimited().with_time(Duration::ZERO));
        std::thread::sleep(Duration::from_millis(2));
        let failed = (0..10_000).any(|_| m.tick().is_err());
        assert!(failed);
    }
}
