use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

/// Resource limits for one proof attempt.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Wall-clock limit in milliseconds.
    pub timeout_ms: u64,
    /// Rounds of modal saturation and nesting depth for inner modal proofs.
    pub depth: u32,
    /// Optional cap on the number of clauses the first-order search may keep.
    pub max_clauses: Option<usize>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { timeout_ms: 30_000, depth: 3, max_clauses: None }
    }
}

impl Budget {
    pub fn with_timeout(timeout_ms: u64) -> Self {
        Budget { timeout_ms, ..Self::default() }
    }

    pub fn depth(mut self, depth: u32) -> Self {
        self.depth = depth;
        self
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Deadline {
    end: Instant,
}

impl Deadline {
    pub fn after(ms: u64) -> Self {
        Deadline { end: Instant::now() + Duration::from_millis(ms) }
    }

    pub fn expired(&self) -> bool {
        Instant::now() >= self.end
    }

    pub fn remaining(&self) -> Duration {
        self.end.saturating_duration_since(Instant::now())
    }

    pub fn remaining_ms(&self) -> u64 {
        self.remaining().as_millis() as u64
    }

    /// A deadline at `fraction` of the time left, never later than `self`.
    pub fn share(&self, fraction: f64) -> Deadline {
        let d = self.remaining().mul_f64(fraction.clamp(0.0, 1.0));
        Deadline { end: (Instant::now() + d).min(self.end) }
    }
}
