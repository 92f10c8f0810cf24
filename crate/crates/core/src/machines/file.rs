//! Text form of machine descriptions.
//!
//! ```json
//! {"model": "ptm", "states": ["s", "acc", "rej"], "sigma": ["a"], "kappa": ["_"],
//!  "transitions": [{"from": "s", "read": "▷", "prob": "1/2", "to": "acc", "di": 0}],
//!  "start": "s", "accept": "acc", "reject": "rej"}
//! ```
//!
//! For `"2dfa2"` machines `read` holds the two scanned symbols and `di`/`dw`
//! are the moves of the first and second head.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Branch, PtmSpec, TwoHeadDfaSpec};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::tape::{canonical, Move, BLANK};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionEntry {
    pub from: String,
    pub read: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub work: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub write: Option<String>,
    pub prob: Rational,
    pub to: String,
    pub di: Move,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dw: Option<Move>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineFile {
    pub model: String,
    pub states: Vec<String>,
    pub sigma: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kappa: Vec<String>,
    pub transitions: Vec<TransitionEntry>,
    pub start: String,
    pub accept: String,
    pub reject: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub supersafe_head: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub companion: Option<Box<MachineFile>>,
}

pub(crate) fn one_symbol(s: &str) -> Result<char> {
    let mut it = s.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(canonical(c)),
        _ => Err(Error::Parse(format!("expected a single symbol, got {s:?}"))),
    }
}

pub(crate) fn index_of(states: &[String], name: &str) -> Result<usize> {
    states
        .iter()
        .position(|s| s == name)
        .ok_or_else(|| Error::MalformedMachine(format!("unknown state {name:?}")))
}

impl MachineFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_ptm(&self) -> Result<PtmSpec> {
        if self.model != "ptm" {
            return Err(Error::MalformedMachine(format!("model {:?} is not \"ptm\"", self.model)));
        }
        let sigma = self.sigma.iter().map(|s| one_symbol(s)).collect::<Result<Vec<_>>>()?;
        let mut kappa = vec![BLANK];
        for k in &self.kappa {
            let c = one_symbol(k)?;
            if c != BLANK {
                kappa.push(c);
            }
        }
        let mut rules: BTreeMap<(usize, char, char), Vec<Branch>> = BTreeMap::new();
        for t in &self.transitions {
            let from = index_of(&self.states, &t.from)?;
            let read = one_symbol(&t.read)?;
            let work = t.work.as_deref().map(one_symbol).transpose()?.unwrap_or(BLANK);
            let write = t.write.as_deref().map(one_symbol).transpose()?.unwrap_or(work);
            rules.entry((from, read, work)).or_default().push(Branch {
                prob: t.prob.clone(),
                to: index_of(&self.states, &t.to)?,
                write,
                di: t.di,
                dw: t.dw.unwrap_or(Move::Stay),
            });
        }
        PtmSpec::from_parts(
            self.states.clone(),
            sigma,
            kappa,
            index_of(&self.states, &self.start)?,
            index_of(&self.states, &self.accept)?,
            index_of(&self.states, &self.reject)?,
            rules,
        )
    }

    pub fn from_ptm(spec: &PtmSpec) -> MachineFile {
        let name = |i: usize| spec.states()[i].clone();
        let transitions = spec
            .rules()
            .iter()
            .flat_map(|(&(s, read, work), branches)| {
                branches.iter().map(move |b| TransitionEntry {
                    from: name(s),
                    read: read.to_string(),
                    work: (work != BLANK).then(|| work.to_string()),
                    write: (b.write != work).then(|| b.write.to_string()),
                    prob: b.prob.clone(),
                    to: name(b.to),
                    di: b.di,
                    dw: (b.dw != Move::Stay).then_some(b.dw),
                })
            })
            .collect();
        MachineFile {
            model: "ptm".into(),
            states: spec.states().to_vec(),
            sigma: spec.sigma().iter().map(|c| c.to_string()).collect(),
            kappa: spec.kappa().iter().map(|c| c.to_string()).collect(),
            transitions,
            start: name(spec.start()),
            accept: name(spec.accept()),
            reject: name(spec.reject()),
            supersafe_head: None,
            companion: None,
        }
    }

    pub fn to_twohead(&self) -> Result<TwoHeadDfaSpec> {
        if self.model != "2dfa2" {
            return Err(Error::MalformedMachine(format!("model {:?} is not \"2dfa2\"", self.model)));
        }
        let sigma = self.sigma.iter().map(|s| one_symbol(s)).collect::<Result<Vec<_>>>()?;
        let mut rules = BTreeMap::new();
        for t in &self.transitions {
            let pair: Vec<char> = t.read.chars().map(canonical).collect();
            if pair.len() != 2 {
                return Err(Error::Parse(format!("2dfa2 read must be two symbols, got {:?}", t.read)));
            }
            if !t.prob.is_one() {
                return Err(Error::MalformedMachine("2dfa2 transitions are deterministic".into()));
            }
            let key = (index_of(&self.states, &t.from)?, pair[0], pair[1]);
            let val = (index_of(&self.states, &t.to)?, t.di, t.dw.unwrap_or(Move::Stay));
            if rules.insert(key, val).is_some() {
                return Err(Error::MalformedMachine(format!("duplicate transition for {:?}", t.read)));
            }
        }
        let companion = self.companion.as_ref().map(|c| c.to_ptm()).transpose()?;
        TwoHeadDfaSpec::from_parts(
            self.states.clone(),
            sigma,
            index_of(&self.states, &self.start)?,
            index_of(&self.states, &self.accept)?,
            index_of(&self.states, &self.reject)?,
            rules,
            self.supersafe_head,
            companion,
        )
    }

    pub fn from_twohead(spec: &TwoHeadDfaSpec) -> MachineFile {
        let name = |i: usize| spec.states()[i].clone();
        let transitions = spec
            .rules()
            .iter()
            .map(|(&(s, a, b), &(to, d1, d2))| TransitionEntry {
                from: name(s),
                read: format!("{a}{b}"),
                work: None,
                write: None,
                prob: Rational::one(),
                to: name(to),
                di: d1,
                dw: Some(d2),
            })
            .collect();
        MachineFile {
            model: "2dfa2".into(),
            states: spec.states().to_vec(),
            sigma: spec.sigma().iter().map(|c| c.to_string()).collect(),
            kappa: Vec::new(),
            transitions,
            start: name(spec.start()),
            accept: name(spec.accept()),
            reject: name(spec.reject()),
            supersafe_head: spec.supersafe_head(),
            companion: spec.companion().map(|c| Box::new(MachineFile::from_ptm(c))),
        }
    }
}
