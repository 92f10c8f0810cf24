//! Text form of 2QCFA descriptions. Complex entries are `["re", "im"]`
//! pairs; each part is a rational `n/d` optionally times `sqrt(n/d)`.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::qcfa::QcfaSpec;
use super::register::{Action, CMatrix};
use crate::error::{Error, Result};
use crate::machines::file::{index_of, one_symbol};
use crate::rational::Rational;
use crate::tape::Move;

pub type EntryText = [String; 2];
pub type MatrixText = Vec<Vec<EntryText>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionEntry {
    pub state: String,
    pub read: String,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixText>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projectors: Option<Vec<MatrixText>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QcfaTransition {
    pub from: String,
    pub read: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<usize>,
    pub to: String,
    pub di: Move,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QcfaFile {
    pub model: String,
    pub basis: Vec<String>,
    pub q0: String,
    pub states: Vec<String>,
    pub sigma: Vec<String>,
    pub start: String,
    pub accept: String,
    pub reject: String,
    #[serde(default)]
    pub actions: Vec<ActionEntry>,
    pub transitions: Vec<QcfaTransition>,
}

/// Parses `r` or `r*sqrt(s)` with rationals `r`, `s`.
pub fn parse_amplitude(text: &str) -> Result<f64> {
    let t = text.trim();
    let err = || Error::Parse(format!("bad amplitude {text:?}"));
    match t.split_once('*') {
        None => Ok(Rational::from_str(t).map_err(|_| err())?.to_f64()),
        Some((r, rest)) => {
            let inner = rest.trim().strip_prefix("sqrt(").and_then(|x| x.strip_suffix(')')).ok_or_else(err)?;
            let r = Rational::from_str(r.trim()).map_err(|_| err())?;
            let s = Rational::from_str(inner.trim()).map_err(|_| err())?;
            if s.is_negative() {
                return Err(err());
            }
            Ok(r.to_f64() * s.to_f64().sqrt())
        }
    }
}

fn matrix(rows: &MatrixText, dim: usize) -> Result<CMatrix> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::MalformedMachine(format!("matrix must be {dim}x{dim}")));
    }
    let mut data = Vec::with_capacity(dim * dim);
    for row in rows {
        for [re, im] in row {
            data.push(Complex64::new(parse_amplitude(re)?, parse_amplitude(im)?));
        }
    }
    CMatrix::new(dim, data)
}

impl QcfaFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_spec(&self) -> Result<QcfaSpec> {
        if self.model != "2qcfa" {
            return Err(Error::MalformedMachine(format!("model {:?} is not \"2qcfa\"", self.model)));
        }
        let dim = self.basis.len();
        let sigma = self.sigma.iter().map(|s| one_symbol(s)).collect::<Result<Vec<_>>>()?;
        let mut actions = BTreeMap::new();
        for a in &self.actions {
            let key = (index_of(&self.states, &a.state)?, one_symbol(&a.read)?);
            let action = match a.kind.as_str() {
                "unitary" => {
                    let m = a.matrix.as_ref().ok_or_else(|| Error::MalformedMachine("unitary without matrix".into()))?;
                    Action::Unitary(matrix(m, dim)?)
                }
                "measure" => {
                    let ps = a
                        .projectors
                        .as_ref()
                        .ok_or_else(|| Error::MalformedMachine("measurement without projectors".into()))?;
                    Action::Measure(ps.iter().map(|p| matrix(p, dim)).collect::<Result<_>>()?)
                }
                "identity" => Action::Identity,
                k => return Err(Error::MalformedMachine(format!("unknown action kind {k:?}"))),
            };
            if actions.insert(key, action).is_some() {
                return Err(Error::MalformedMachine(format!("duplicate action for ({}, {})", a.state, a.read)));
            }
        }
        let mut classical = BTreeMap::new();
        for t in &self.transitions {
            let key = (index_of(&self.states, &t.from)?, one_symbol(&t.read)?, t.outcome);
            if classical.insert(key, (index_of(&self.states, &t.to)?, t.di)).is_some() {
                return Err(Error::MalformedMachine(format!("duplicate transition from ({}, {})", t.from, t.read)));
            }
        }
        QcfaSpec::from_parts(
            self.basis.clone(),
            index_of(&self.basis, &self.q0)?,
            self.states.clone(),
            sigma,
            index_of(&self.states, &self.start)?,
            index_of(&self.states, &self.accept)?,
            index_of(&self.states, &self.reject)?,
            actions,
            classical,
        )
    }
}
