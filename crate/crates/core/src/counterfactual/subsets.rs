use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Largest premise set the subset search accepts.
pub const MAX_ASSUMPTIONS: usize = 30;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubsetOrder {
    SmallFirst,
    #[default]
    LargeFirst,
}

impl fmt::Display for SubsetOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubsetOrder::SmallFirst => "small-first",
            SubsetOrder::LargeFirst => "large-first",
        })
    }
}

impl FromStr for SubsetOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "small-first" => Ok(SubsetOrder::SmallFirst),
            "large-first" => Ok(SubsetOrder::LargeFirst),
            _ => Err(format!("unknown subset order `{s}` (expected small-first or large-first)")),
        }
    }
}

/// Subsets of `0..n` as bitmasks, grouped by cardinality, lexicographic within a level.
#[derive(Clone, Debug)]
pub struct Subsets {
    n: usize,
    order: SubsetOrder,
    size: usize,
    current: Option<Vec<usize>>,
    done: bool,
}

impl Subsets {
    pub fn new(n: usize, order: SubsetOrder) -> Self {
        assert!(n <= MAX_ASSUMPTIONS, "at most {MAX_ASSUMPTIONS} assumptions");
        let size = match order {
            SubsetOrder::SmallFirst => 0,
            SubsetOrder::LargeFirst => n,
        };
        Subsets { n, order, size, current: Some((0..size).collect()), done: false }
    }

    /// Total number of subsets, `2^n`.
    pub fn count(&self) -> u64 {
        1u64 << self.n
    }

    fn next_level(&mut self) -> bool {
        match self.order {
            SubsetOrder::SmallFirst if self.size < self.n => self.size += 1,
            SubsetOrder::LargeFirst if self.size > 0 => self.size -= 1,
            _ => return false,
        }
        self.current = Some((0..self.size).collect());
        true
    }

    /// Advance a combination to its lexicographic successor.
    fn advance(c: &mut [usize], n: usize) -> bool {
        let k = c.len();
        for i in (0..k).rev() {
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for Subsets {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.done {
            return None;
        }
        let cur = self.current.clone()?;
        let mask = cur.iter().fold(0u32, |m, &i| m | (1 << i));
        let mut nxt = cur;
        if Subsets::advance(&mut nxt, self.n) {
            self.current = Some(nxt);
        } else if !self.next_level() {
            self.done = true;
        }
        Some(mask)
    }
}

pub fn mask_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// Stream the subsets of `gamma` as index lists in the requested order.
pub fn enumerate_subsets<T>(gamma: &[T], order: SubsetOrder) -> Result<impl Iterator<Item = Vec<usize>>, usize> {
    if gamma.len() > MAX_ASSUMPTIONS {
        return Err(gamma.len());
    }
    Ok(Subsets::new(gamma.len(), order).map(mask_indices))
}
