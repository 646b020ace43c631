//! Three-valued verdicts and search budgets shared by every checker.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "HOLDS")]
    Holds,
    #[serde(rename = "FAILS")]
    Fails,
    #[serde(rename = "UNKNOWN-AT-BOUND")]
    Unknown,
}

impl Status {
    pub fn from_bool(b: bool) -> Status {
        if b {
            Status::Holds
        } else {
            Status::Fails
        }
    }

    /// Conjunction: any FAILS wins, then any UNKNOWN.
    pub fn and(self, other: Status) -> Status {
        match (self, other) {
            (Status::Fails, _) | (_, Status::Fails) => Status::Fails,
            (Status::Unknown, _) | (_, Status::Unknown) => Status::Unknown,
            _ => Status::Holds,
        }
    }

    pub fn all(it: impl IntoIterator<Item = Status>) -> Status {
        it.into_iter().fold(Status::Holds, Status::and)
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Holds => 0,
            Status::Fails => 1,
            Status::Unknown => 2,
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Holds => "HOLDS",
            Status::Fails => "FAILS",
            Status::Unknown => "UNKNOWN-AT-BOUND",
        })
    }
}

/// Node and wall-clock limits. Exceeding either yields UNKNOWN-AT-BOUND,
/// never a wrong verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_secs: Option<u64>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_nodes: Some(50_000_000), max_secs: None }
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget { max_nodes: None, max_secs: None }
    }

    pub fn nodes(n: u64) -> Self {
        Budget { max_nodes: Some(n), max_secs: None }
    }

    pub fn meter(&self) -> Meter {
        Meter {
            nodes: 0,
            max_nodes: self.max_nodes,
            deadline: self.max_secs.map(|s| Instant::now() + Duration::from_secs(s)),
            exhausted: false,
        }
    }
}

/// Running counter against a [`Budget`].
#[derive(Debug)]
pub struct Meter {
    pub nodes: u64,
    max_nodes: Option<u64>,
    deadline: Option<Instant>,
    exhausted: bool,
}

impl Meter {
    /// Counts one unit of work; returns false once the budget is exhausted.
    pub fn tick(&mut self) -> bool {
        if self.exhausted {
            return false;
        }
        self.nodes += 1;
        let over_nodes = self.max_nodes.is_some_and(|m| self.nodes > m);
        let over_time = self.nodes.is_multiple_of(4096) && self.deadline.is_some_and(|d| Instant::now() >= d);
        if over_nodes || over_time {
            self.exhausted = true;
        }
        !self.exhausted
    }

    pub fn exhausted(&self) -> bool {
        self.exhausted
    }
}
