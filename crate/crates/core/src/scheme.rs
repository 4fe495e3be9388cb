//! Redundancy schemes compared by the simulator and the reliability model.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::SrcParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scheme {
    Replication { copies: usize },
    ReedSolomon { n: usize, k: usize },
    Src { n: usize, k: usize, f: usize },
}

impl Scheme {
    pub fn replication3() -> Self {
        Scheme::Replication { copies: 3 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Scheme::Replication { copies } if copies == 0 => Err(Error::params("replication needs at least one copy")),
            Scheme::Replication { .. } => Ok(()),
            Scheme::ReedSolomon { n, k } => {
                if k == 0 || k >= n {
                    Err(Error::params(format!("RS needs 1 <= k < n, got ({n},{k})")))
                } else {
                    Ok(())
                }
            }
            Scheme::Src { n, k, f } => SrcParams::new(n, k, f, 1).map(|_| ()),
        }
    }

    /// Machines spanned by one redundancy set.
    pub fn width(&self) -> usize {
        match *self {
            Scheme::Replication { copies } => copies,
            Scheme::ReedSolomon { n, .. } | Scheme::Src { n, .. } => n,
        }
    }

    /// Members that can be lost without losing data.
    pub fn tolerance(&self) -> usize {
        match *self {
            Scheme::Replication { copies } => copies - 1,
            Scheme::ReedSolomon { n, k } | Scheme::Src { n, k, .. } => n - k,
        }
    }

    /// Members needed to recover the data, i.e. the chain's `k`.
    pub fn threshold(&self) -> usize {
        self.width() - self.tolerance()
    }

    /// Chunks each member machine stores for one set.
    pub fn chunks_per_member(&self) -> usize {
        match *self {
            Scheme::Src { f, .. } => f + 1,
            _ => 1,
        }
    }

    /// Chunks of user data protected by one set.
    pub fn data_chunks_per_set(&self) -> usize {
        match *self {
            Scheme::Replication { .. } => 1,
            Scheme::ReedSolomon { k, .. } => k,
            Scheme::Src { k, f, .. } => f * k,
        }
    }

    /// Helper chunks read to rebuild one lost chunk.
    pub fn helpers_per_chunk(&self) -> usize {
        match *self {
            Scheme::Replication { .. } => 1,
            Scheme::ReedSolomon { k, .. } => k,
            Scheme::Src { f, .. } => f,
        }
    }

    /// Stored bytes per user byte.
    pub fn overhead(&self) -> f64 {
        (self.width() * self.chunks_per_member()) as f64 / self.data_chunks_per_set() as f64
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Scheme::Replication { copies } => write!(f, "{copies}-way replication"),
            Scheme::ReedSolomon { n, k } => write!(f, "RS({n},{k})"),
            Scheme::Src { n, k, f: deg } => write!(f, "SRC({n},{k},{deg})"),
        }
    }
}

/// Parses `rep3`, `rs:10,6` or `src:10,6,2`.
impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::params(format!("cannot parse scheme {s:?}; expected rep<N>, rs:<n>,<k> or src:<n>,<k>,<f>"));
        let nums = |rest: &str| -> Result<Vec<usize>> {
            rest.split(',').map(|x| x.trim().parse::<usize>().map_err(|_| bad())).collect()
        };
        let scheme = if let Some(rest) = s.strip_prefix("rep") {
            Scheme::Replication {
                copies: rest.parse().map_err(|_| bad())?,
            }
        } else if let Some(rest) = s.strip_prefix("rs:") {
            match nums(rest)?.as_slice() {
                &[n, k] => Scheme::ReedSolomon { n, k },
                _ => return Err(bad()),
            }
        } else if let Some(rest) = s.strip_prefix("src:") {
            match nums(rest)?.as_slice() {
                &[n, k, f] => Scheme::Src { n, k, f },
                _ => return Err(bad()),
            }
        } else {
            return Err(bad());
        };
        scheme.validate()?;
        Ok(scheme)
    }
}
