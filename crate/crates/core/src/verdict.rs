use std::fmt;

use serde::{Deserialize, Serialize};

/// Fixed verdict vocabulary used by every diagnostic and report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Strict,
    NonStrict,
    Inconclusive,
    Tainted,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Strict => "strict",
            Verdict::NonStrict => "non-strict",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Tainted => "tainted",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
