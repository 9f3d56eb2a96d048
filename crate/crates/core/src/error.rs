use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EpError {
    /// The search hit its configured node cap before reaching a verdict.
    #[error("undecided: search budget of {limit} steps exhausted")]
    BudgetExceeded { limit: u64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A construction ran below its guaranteed size and could not conclude.
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl EpError {
    pub fn is_undecided(&self) -> bool {
        matches!(
            self,
            EpError::BudgetExceeded { .. } | EpError::Inconclusive(_)
        )
    }
}

pub type Result<T, E = EpError> = std::result::Result<T, E>;

pub(crate) fn precondition(msg: impl Into<String>) -> EpError {
    EpError::Precondition(msg.into())
}

/// Step counter shared by the exhaustive searches.
#[derive(Debug, Clone)]
pub struct Budget {
    limit: u64,
    used: u64,
}

pub const DEFAULT_BUDGET: u64 = 10_000_000;

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn unlimited() -> Self {
        Budget::new(u64::MAX)
    }

    #[inline]
    pub fn tick(&mut self, n: u64) -> Result<()> {
        self.used = self.used.saturating_add(n);
        if self.used > self.limit {
            Err(EpError::BudgetExceeded { limit: self.limit })
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_BUDGET)
    }
}
