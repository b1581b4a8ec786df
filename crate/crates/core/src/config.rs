use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable overriding [`Gate::max_order`].
pub const GATE_ENV: &str = "PGCL_GATE";

/// Limits on extensional (element-by-element) computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    /// Largest group or subgroup order that may be enumerated element by element.
    pub max_order: u128,
    /// Largest number of central coset pairs enumerated when computing K(G).
    pub max_pairs: u128,
}

impl Default for Gate {
    fn default() -> Self {
        Gate {
            max_order: 5u128.pow(6),
            max_pairs: 5u128.pow(10),
        }
    }
}

impl Gate {
    /// Default gate with `max_order` taken from `PGCL_GATE` when set.
    pub fn from_env() -> Self {
        let mut gate = Gate::default();
        if let Some(v) = std::env::var(GATE_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
        {
            gate.max_order = v;
        }
        gate
    }

    pub fn with_max_order(mut self, max_order: u128) -> Self {
        self.max_order = max_order;
        self
    }

    /// `p^log` if it fits in a `u128`.
    pub fn size(p: u32, log: usize) -> Option<u128> {
        (p as u128).checked_pow(log as u32)
    }

    pub fn order_ok(&self, p: u32, log: usize) -> bool {
        Self::size(p, log).is_some_and(|s| s <= self.max_order)
    }

    pub fn require_order(&self, what: &str, p: u32, log: usize) -> Result<()> {
        if self.order_ok(p, log) {
            Ok(())
        } else {
            Err(Error::Infeasible {
                what: what.to_string(),
                size: format!("{p}^{log}"),
                gate: self.max_order,
            })
        }
    }

    pub fn require_pairs(&self, what: &str, p: u32, log: usize) -> Result<()> {
        match Self::size(p, 2 * log) {
            Some(s) if s <= self.max_pairs => Ok(()),
            _ => Err(Error::Infeasible {
                what: what.to_string(),
                size: format!("{p}^{}", 2 * log),
                gate: self.max_pairs,
            }),
        }
    }
}
