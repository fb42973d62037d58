//! The public-channel log of a session.
//!
//! Grammar, one announcement per line:
//!
//! ```text
//! transcript   := "fbb84-transcript/1" "\n" (announcement "\n")*
//! announcement := "step" " " STEP " " TAG [" " PAYLOAD]
//! STEP         := decimal step number, 1..=10
//! TAG          := [a-z0-9-]+
//! PAYLOAD      := any characters except "\n"
//! ```
//!
//! Payloads used by the simulator are space-separated `key=value` fields whose
//! values are decimal numbers, `a/b` fractions, bit strings, or
//! comma-separated lists of those (`-` for an empty list).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TRANSCRIPT_HEADER: &str = "fbb84-transcript/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Announcement {
    pub step: u8,
    pub tag: String,
    pub payload: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub announcements: Vec<Announcement>,
}

impl Transcript {
    pub fn push(&mut self, step: u8, tag: &str, payload: impl Into<String>) {
        let payload = payload.into();
        debug_assert!(!payload.contains('\n') && valid_tag(tag));
        self.announcements.push(Announcement {
            step,
            tag: tag.into(),
            payload,
        });
    }

    pub fn len(&self) -> usize {
        self.announcements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.announcements.is_empty()
    }

    /// Announcements of one step, in order.
    pub fn step(&self, step: u8) -> impl Iterator<Item = &Announcement> {
        self.announcements.iter().filter(move |a| a.step == step)
    }
}

fn valid_tag(tag: &str) -> bool {
    !tag.is_empty() && tag.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-')
}

/// `-` for an empty list.
pub(crate) fn join_list<T: fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    let s = items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    if s.is_empty() {
        "-".into()
    } else {
        s
    }
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{TRANSCRIPT_HEADER}")?;
        for a in &self.announcements {
            write!(f, "step {} {}", a.step, a.tag)?;
            if !a.payload.is_empty() {
                write!(f, " {}", a.payload)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for Transcript {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().enumerate();
        match lines.next() {
            Some((_, TRANSCRIPT_HEADER)) => {}
            _ => return Err(Error::Parse(format!("line 1: expected header {TRANSCRIPT_HEADER:?}"))),
        }
        let mut out = Transcript::default();
        for (i, line) in lines {
            let at = |what: &str| Error::Parse(format!("line {}: {what}", i + 1));
            let rest = line.strip_prefix("step ").ok_or_else(|| at("expected `step`"))?;
            let (step, rest) = rest.split_once(' ').ok_or_else(|| at("missing tag"))?;
            let step: u8 = step.parse().map_err(|_| at("step is not a number"))?;
            if !(1..=10).contains(&step) {
                return Err(at("step outside 1..=10"));
            }
            let (tag, payload) = rest.split_once(' ').unwrap_or((rest, ""));
            if !valid_tag(tag) {
                return Err(at("malformed tag"));
            }
            out.announcements.push(Announcement {
                step,
                tag: tag.into(),
                payload: payload.into(),
            });
        }
        Ok(out)
    }
}
