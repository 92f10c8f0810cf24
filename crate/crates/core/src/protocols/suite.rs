//! Named protocols and prover choices, as used by the CLI and the harness.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::padded::{PaddedProver, PaddedVerifier};
use super::params::ProtocolParams;
use super::square::{RulerPolicy, SquareProver, SquareVerifier};
use super::stages::ClaimPolicy;
use super::supersafe::{FabricationPolicy, RoundPolicy, SupersafeProver, SupersafeVerifier};
use crate::error::{Error, Result};
use crate::interaction::{MuteProver, ProverProgram, VerifierProgram};
use crate::languages::{check_promise, membership, LanguageId};
use crate::machines::shipped::eq_machine;
use crate::rational::Rational;
use crate::tape::STAR;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProtocolId {
    SupersafeEq,
    PaddedPal,
    PaddedTwin,
    Square,
}

impl ProtocolId {
    pub const ALL: [ProtocolId; 4] = [ProtocolId::SupersafeEq, ProtocolId::PaddedPal, ProtocolId::PaddedTwin, ProtocolId::Square];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolId::SupersafeEq => "supersafe-eq",
            ProtocolId::PaddedPal => "padded-pal",
            ProtocolId::PaddedTwin => "padded-twin",
            ProtocolId::Square => "square",
        }
    }

    pub fn language(self) -> LanguageId {
        match self {
            ProtocolId::SupersafeEq => LanguageId::Eq,
            ProtocolId::PaddedPal => LanguageId::Pal,
            ProtocolId::PaddedTwin => LanguageId::Twin,
            ProtocolId::Square => LanguageId::Square,
        }
    }

    pub fn is_padded(self) -> bool {
        self != ProtocolId::SupersafeEq
    }

    /// The string the verifier decides about: the core for padded inputs.
    pub fn instance(self, input: &str) -> String {
        if self.is_padded() {
            check_promise(input, STAR).core
        } else {
            input.to_string()
        }
    }

    /// Whether `input` meets the protocol's promise.
    pub fn promise_holds(self, input: &str) -> bool {
        !self.is_padded() || check_promise(input, STAR).satisfied
    }

    /// Membership of the instance in the protocol's language.
    pub fn truth(self, input: &str) -> Result<bool> {
        membership(self.language(), &self.instance(input))
    }

    pub fn verifier(self, params: &ProtocolParams) -> Result<Box<dyn VerifierProgram>> {
        params.validate()?;
        Ok(match self {
            ProtocolId::SupersafeEq => Box::new(SupersafeVerifier::new(eq_machine(), params.p.clone(), params.m)?),
            ProtocolId::PaddedPal | ProtocolId::PaddedTwin => Box::new(PaddedVerifier::new(self.language(), params)?),
            ProtocolId::Square => Box::new(SquareVerifier::new(params)?),
        })
    }

    pub fn prover(self, choice: &ProverChoice, params: &ProtocolParams) -> Result<Box<dyn ProverProgram>> {
        use AdversaryStrategy as A;
        let unsupported = || Err(Error::Configuration(format!("prover {choice} does not apply to {}", self.name())));
        if let ProverChoice::Adversary(A::PerRoundMix(t)) = choice {
            if t.len() != params.m {
                return Err(Error::Configuration(format!("mix needs {} probabilities, got {}", params.m, t.len())));
            }
        }
        let lang = self.language();
        Ok(match self {
            ProtocolId::SupersafeEq => {
                let (policy, fab) = match choice {
                    ProverChoice::Honest | ProverChoice::Adversary(A::AlwaysTruthful | A::RandomAnswer) => {
                        (RoundPolicy::Truthful, FabricationPolicy::DriveToAccept)
                    }
                    ProverChoice::Adversary(A::AlwaysLying) => (RoundPolicy::Fabricate, FabricationPolicy::DriveToAccept),
                    ProverChoice::Adversary(A::PerRoundMix(t)) => (RoundPolicy::Mix(t.clone()), FabricationPolicy::Loop),
                    ProverChoice::Adversary(A::NoAnswer) => return Ok(Box::new(MuteProver { sigma: vec!['a', 'b'] })),
                    _ => return unsupported(),
                };
                Box::new(SupersafeProver::new(eq_machine(), policy, fab)?)
            }
            ProtocolId::PaddedPal | ProtocolId::PaddedTwin => {
                let (claim, rounds, fab) = match choice {
                    ProverChoice::Honest => return Ok(Box::new(PaddedProver::quantum(lang, params)?)),
                    ProverChoice::Adversary(A::AlwaysTruthful | A::RandomAnswer) => {
                        (ClaimPolicy::Random, RoundPolicy::Truthful, FabricationPolicy::DriveToAccept)
                    }
                    ProverChoice::Adversary(A::AlwaysLying) => {
                        (ClaimPolicy::Wrong, RoundPolicy::Fabricate, FabricationPolicy::DriveToAccept)
                    }
                    ProverChoice::Adversary(A::PerRoundMix(t)) => {
                        (ClaimPolicy::Random, RoundPolicy::Mix(t.clone()), FabricationPolicy::Loop)
                    }
                    ProverChoice::Adversary(A::NoAnswer) => {
                        (ClaimPolicy::Never, RoundPolicy::Truthful, FabricationPolicy::DriveToAccept)
                    }
                    _ => return unsupported(),
                };
                Box::new(PaddedProver::new(lang, params, claim, rounds, fab)?)
            }
            ProtocolId::Square => {
                let (claim, ruler) = match choice {
                    ProverChoice::Honest => return Ok(Box::new(SquareProver::quantum(params)?)),
                    ProverChoice::Adversary(A::AlwaysTruthful | A::RandomAnswer) => (ClaimPolicy::Random, RulerPolicy::Honest),
                    ProverChoice::Adversary(A::AlwaysLying) => {
                        (ClaimPolicy::Wrong, RulerPolicy::Strategy2 { lie_after: Some(0) })
                    }
                    ProverChoice::Adversary(A::NoAnswer) => (ClaimPolicy::Never, RulerPolicy::Honest),
                    ProverChoice::Adversary(A::Strategy1 { defect_position, claim }) => {
                        (*claim, RulerPolicy::Strategy1 { defect: *defect_position })
                    }
                    ProverChoice::Adversary(A::Strategy2 { lie_after, claim }) => {
                        (*claim, RulerPolicy::Strategy2 { lie_after: *lie_after })
                    }
                    _ => return unsupported(),
                };
                Box::new(SquareProver::new(params, claim, ruler)?)
            }
        })
    }
}

impl fmt::Display for ProtocolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ProtocolId::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown protocol {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AdversaryStrategy {
    AlwaysTruthful,
    AlwaysLying,
    /// Truthful in round i with probability t_i.
    PerRoundMix(Vec<Rational>),
    NoAnswer,
    RandomAnswer,
    Strategy1 { defect_position: u64, claim: ClaimPolicy },
    Strategy2 { lie_after: Option<u64>, claim: ClaimPolicy },
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProverChoice {
    /// Streaming transcript for the supersafe protocol, the modeled quantum
    /// prover for the padded and SQUARE protocols.
    Honest,
    Adversary(AdversaryStrategy),
}

fn claim_name(c: ClaimPolicy) -> &'static str {
    match c {
        ClaimPolicy::Solver => "solver",
        ClaimPolicy::Random => "random",
        ClaimPolicy::Wrong => "wrong",
        ClaimPolicy::Right => "right",
        ClaimPolicy::Yes => "yes",
        ClaimPolicy::No => "no",
        ClaimPolicy::Never => "never",
    }
}

fn parse_claim(s: &str) -> Result<ClaimPolicy> {
    Ok(match s {
        "solver" => ClaimPolicy::Solver,
        "random" => ClaimPolicy::Random,
        "wrong" => ClaimPolicy::Wrong,
        "right" => ClaimPolicy::Right,
        "yes" => ClaimPolicy::Yes,
        "no" => ClaimPolicy::No,
        "never" => ClaimPolicy::Never,
        _ => return Err(Error::Parse(format!("unknown claim policy {s:?}"))),
    })
}

impl fmt::Display for ProverChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use AdversaryStrategy as A;
        match self {
            ProverChoice::Honest => f.write_str("honest"),
            ProverChoice::Adversary(a) => match a {
                A::AlwaysTruthful => f.write_str("always-truthful"),
                A::AlwaysLying => f.write_str("always-lying"),
                A::PerRoundMix(t) => {
                    let parts: Vec<String> = t
                        .iter()
                        .map(|x| if x.0.is_integer() { x.0.numer().to_string() } else { x.to_string() })
                        .collect();
                    write!(f, "mix:{}", parts.join(","))
                }
                A::NoAnswer => f.write_str("no-answer"),
                A::RandomAnswer => f.write_str("random-answer"),
                A::Strategy1 { defect_position, claim } => {
                    write!(f, "strategy1:{defect_position}")?;
                    if *claim != ClaimPolicy::Random {
                        write!(f, ":{}", claim_name(*claim))?;
                    }
                    Ok(())
                }
                A::Strategy2 { lie_after, claim } => {
                    match lie_after {
                        Some(l) => write!(f, "strategy2:{l}")?,
                        None => f.write_str("strategy2:auto")?,
                    }
                    if *claim != ClaimPolicy::Random {
                        write!(f, ":{}", claim_name(*claim))?;
                    }
                    Ok(())
                }
            },
        }
    }
}

impl FromStr for ProverChoice {
    type Err = Error;

    /// `honest|quantum|always-truthful|always-lying|mix:<t1,..,tm>|no-answer|
    /// random-answer|strategy1:<pos>[:claim]|strategy2:<pos|auto>[:claim]`.
    fn from_str(s: &str) -> Result<Self> {
        use AdversaryStrategy as A;
        let bad = || Error::Parse(format!("unknown prover {s:?}"));
        let adv = |a| Ok(ProverChoice::Adversary(a));
        let mut parts = s.split(':');
        let head = parts.next().unwrap_or_default();
        let arg = parts.next();
        let claim = parts.next().map(parse_claim).transpose()?.unwrap_or(ClaimPolicy::Random);
        if parts.next().is_some() {
            return Err(bad());
        }
        match (head, arg) {
            ("honest" | "quantum", None) => Ok(ProverChoice::Honest),
            ("always-truthful", None) => adv(A::AlwaysTruthful),
            ("always-lying", None) => adv(A::AlwaysLying),
            ("no-answer", None) => adv(A::NoAnswer),
            ("random-answer", None) => adv(A::RandomAnswer),
            ("mix", Some(list)) => {
                let t = list.split(',').map(Rational::from_str).collect::<Result<Vec<_>>>()?;
                if t.is_empty() || t.iter().any(|x| !x.in_unit_interval()) {
                    return Err(Error::Parse(format!("mix probabilities must lie in [0,1]: {list}")));
                }
                adv(A::PerRoundMix(t))
            }
            ("strategy1", arg) => {
                let defect_position = arg.map(|a| a.parse().map_err(|_| bad())).transpose()?.unwrap_or(0);
                adv(A::Strategy1 { defect_position, claim })
            }
            ("strategy2", arg) => {
                let lie_after = match arg {
                    None | Some("auto") => None,
                    Some(a) => Some(a.parse().map_err(|_| bad())?),
                };
                adv(A::Strategy2 { lie_after, claim })
            }
            _ => Err(bad()),
        }
    }
}

impl Serialize for ProverChoice {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ProverChoice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl Serialize for ProtocolId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for ProtocolId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}
