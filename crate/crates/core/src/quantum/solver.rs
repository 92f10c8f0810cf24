use rand::RngCore;
use rand_distr::{Distribution, Geometric, LogNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::languages::{membership, LanguageId};
use crate::rational::{bernoulli, Rational};

/// Step-count law for a core of length m, with mean parameter μ = 2^{k·m}.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum RuntimeLaw {
    /// Always ⌈μ⌉ steps.
    #[default]
    Deterministic,
    /// Geometric on {1, 2, ...} with mean μ.
    Geometric,
    /// Lognormal with median μ·e^{-σ²/2}, resampled above `cap_factor`·μ.
    TruncatedLognormal { sigma: f64, cap_factor: f64 },
}

/// Black-box stand-in for a bounded-error quantum recognizer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeledSolverSpec {
    pub target: LanguageId,
    pub eps_q: Rational,
    pub k: u32,
    #[serde(default)]
    pub law: RuntimeLaw,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverDraw {
    pub answer: bool,
    pub steps: u64,
}

impl ModeledSolverSpec {
    pub fn new(target: LanguageId, eps_q: Rational, k: u32, law: RuntimeLaw) -> Result<Self> {
        let s = ModeledSolverSpec { target, eps_q, k, law };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.eps_q.is_negative() || self.eps_q >= Rational::new(1, 2) {
            return Err(Error::Configuration(format!("eps_Q = {} is outside [0, 1/2)", self.eps_q)));
        }
        if self.k == 0 {
            return Err(Error::Configuration("runtime exponent k must be positive".into()));
        }
        if let RuntimeLaw::TruncatedLognormal { sigma, cap_factor } = self.law {
            if !(sigma > 0.0 && cap_factor >= 1.0) {
                return Err(Error::Configuration("lognormal law needs sigma > 0 and cap_factor >= 1".into()));
            }
        }
        Ok(())
    }

    /// μ = 2^{k·m}, saturating.
    pub fn mean_steps(&self, m: usize) -> u64 {
        let e = self.k as u64 * m as u64;
        if e >= 63 {
            u64::MAX
        } else {
            1u64 << e
        }
    }

    pub fn draw_steps(&self, m: usize, rng: &mut (impl RngCore + ?Sized)) -> u64 {
        let mu = self.mean_steps(m);
        match self.law {
            RuntimeLaw::Deterministic => mu,
            RuntimeLaw::Geometric => {
                if mu <= 1 {
                    return 1;
                }
                let g = Geometric::new(1.0 / mu as f64).expect("probability in (0, 1]");
                g.sample(rng).saturating_add(1)
            }
            RuntimeLaw::TruncatedLognormal { sigma, cap_factor } => {
                let mu_f = mu as f64;
                let d = LogNormal::new(mu_f.ln() - sigma * sigma / 2.0, sigma).expect("sigma > 0");
                let cap = cap_factor * mu_f;
                loop {
                    let x: f64 = d.sample(rng);
                    if x <= cap {
                        return (x.floor() as u64).max(1);
                    }
                }
            }
        }
    }
}

/// One run of the modeled solver on `core`: the correct answer flipped with
/// probability ε_Q, and a runtime draw.
pub fn modeled_solve(spec: &ModeledSolverSpec, core: &str, rng: &mut (impl RngCore + ?Sized)) -> Result<SolverDraw> {
    let truth = membership(spec.target, core)?;
    let wrong = bernoulli(spec.eps_q.threshold64(), rng);
    let steps = spec.draw_steps(core.chars().count(), rng);
    Ok(SolverDraw { answer: truth ^ wrong, steps })
}
