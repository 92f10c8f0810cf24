use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::machines::DEFAULT_STEP_CAP;
use crate::quantum::RuntimeLaw;
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClockMode {
    /// The calibrated random-walk 2PFA.
    #[default]
    Walk,
    /// Halts after exactly ⌈c·n^t⌉ + Geometric(mean n^{t+1}) steps.
    Idealized,
}

/// All protocol tunables. Rationals are written as `"n/d"` in files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    /// Probability of the SIM-M (resp. CHECK-RULER) branch.
    pub p: Rational,
    /// Rounds of the supersafe verifier.
    pub m: usize,
    pub eps_premature: Rational,
    pub c1: u64,
    /// Clock exponent and modeled-solver runtime exponent.
    pub k: u32,
    pub eps_q: Rational,
    pub eps_v: Rational,
    pub c_f: u32,
    pub d_f: u32,
    pub h_v: u32,
    #[serde(rename = "K")]
    pub big_k: u64,
    pub k_f: u32,
    pub step_cap: u64,
    #[serde(default)]
    pub runtime_law: RuntimeLaw,
    #[serde(default)]
    pub clock_mode: ClockMode,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        ProtocolParams::padded()
    }
}

impl ProtocolParams {
    /// Supersafe-verifier setting for error target ε_V: p = ε_V, m = 2⌈1/p²⌉+1.
    pub fn padded() -> Self {
        let eps_v = Rational::new(1, 5);
        ProtocolParams {
            p: eps_v.clone(),
            m: observation_m(&eps_v),
            eps_premature: Rational::new(1, 50),
            c1: 20,
            k: 1,
            eps_q: Rational::new(1, 50),
            eps_v,
            c_f: 6,
            d_f: 5,
            h_v: 4,
            big_k: 10,
            k_f: 2,
            step_cap: DEFAULT_STEP_CAP,
            runtime_law: RuntimeLaw::Deterministic,
            clock_mode: ClockMode::Walk,
        }
    }

    pub fn square() -> Self {
        ProtocolParams { p: Rational::new(1, 3), c1: 50, ..ProtocolParams::padded() }
    }

    pub fn supersafe(p: Rational, m: usize) -> Self {
        ProtocolParams { p, m, ..ProtocolParams::padded() }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let p: ProtocolParams = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let half = Rational::new(1, 2);
        let zero = Rational::zero();
        let bad = |m: String| Err(Error::Configuration(m));
        if !(self.p > zero && self.p < half) {
            return bad(format!("p = {} is outside (0, 1/2)", self.p));
        }
        if self.m == 0 {
            return bad("m must be at least 1".into());
        }
        for (name, v) in [("eps_premature", &self.eps_premature), ("eps_v", &self.eps_v)] {
            if !(*v > zero && *v < half) {
                return bad(format!("{name} = {v} is outside (0, 1/2)"));
            }
        }
        if self.eps_q.is_negative() || self.eps_q >= half {
            return bad(format!("eps_q = {} is outside [0, 1/2)", self.eps_q));
        }
        if self.c_f < 2 || self.d_f < 1 || self.h_v < 1 || self.big_k < 2 || self.c1 < 1 || self.k < 1 {
            return bad("need c_F >= 2, d_F >= 1, h_V >= 1, K > 1, c1 >= 1, k >= 1".into());
        }
        if self.step_cap == 0 {
            return bad("step_cap must be positive".into());
        }
        Ok(())
    }

    /// Default Strategy 2 honesty horizon i·K·2^{k_F·i}.
    pub fn ruler_horizon(&self, i: usize) -> u64 {
        let e = (self.k_f as u64).saturating_mul(i as u64).min(62);
        (i as u64).saturating_mul(self.big_k).saturating_mul(1u64 << e)
    }
}

/// m = 2⌈1/p²⌉ + 1.
pub fn observation_m(p: &Rational) -> usize {
    let inv_sq = p.recip().pow(2);
    2 * inv_sq.ceil_u64() as usize + 1
}
