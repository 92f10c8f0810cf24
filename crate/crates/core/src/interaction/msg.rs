use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::tape::canonical;

/// Content of the communication cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Msg {
    Blank,
    /// A tape symbol (head readings, ruler symbols `z`/`#`).
    Sym(char),
    StartRound,
    RoundOver,
    Next,
    Ack,
    Query,
    StillComputing,
    Yes,
    No,
    StartProof,
}

impl Msg {
    pub fn claim(self) -> Option<bool> {
        match self {
            Msg::Yes => Some(true),
            Msg::No => Some(false),
            _ => None,
        }
    }
    pub fn from_claim(b: bool) -> Msg {
        if b {
            Msg::Yes
        } else {
            Msg::No
        }
    }
}

impl fmt::Display for Msg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Msg::Blank => "blank",
            Msg::Sym(c) => return write!(f, "{c}"),
            Msg::StartRound => "start-round",
            Msg::RoundOver => "round-over",
            Msg::Next => "next",
            Msg::Ack => "ack",
            Msg::Query => "query",
            Msg::StillComputing => "still-computing",
            Msg::Yes => "yes",
            Msg::No => "no",
            Msg::StartProof => "start-proof",
        };
        f.write_str(s)
    }
}

impl FromStr for Msg {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s {
            "blank" => Msg::Blank,
            "start-round" => Msg::StartRound,
            "round-over" => Msg::RoundOver,
            "next" => Msg::Next,
            "ack" => Msg::Ack,
            "query" => Msg::Query,
            "still-computing" => Msg::StillComputing,
            "yes" => Msg::Yes,
            "no" => Msg::No,
            "start-proof" => Msg::StartProof,
            _ => {
                let mut it = s.chars();
                match (it.next(), it.next()) {
                    (Some(c), None) => Msg::Sym(canonical(c)),
                    _ => return Err(Error::Parse(format!("unknown message {s:?}"))),
                }
            }
        })
    }
}

impl Serialize for Msg {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Msg {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
