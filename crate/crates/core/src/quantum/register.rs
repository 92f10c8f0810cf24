use num_complex::Complex64;
use rand::{Rng, RngCore};

use crate::error::{Error, Result};

/// Tolerance for operator checks (unitarity, projector algebra).
pub const OP_TOL: f64 = 1e-12;
/// Tolerance for the squared norm of a register.
pub const NORM_TOL: f64 = 1e-9;

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim || dim == 0 {
            return Err(Error::MalformedMachine(format!("matrix needs {} entries, got {}", dim * dim, data.len())));
        }
        Ok(CMatrix { dim, data })
    }
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        CMatrix { dim, data }
    }
    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        CMatrix::new(2, [h, h, h, -h].iter().map(|&x| Complex64::new(x, 0.0)).collect()).expect("2x2")
    }
    /// Projector onto basis vector `k`.
    pub fn basis_projector(dim: usize, k: usize) -> Self {
        let mut m = CMatrix { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] };
        m.data[k * dim + k] = Complex64::new(1.0, 0.0);
        m
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for c in 0..n {
                data[c * n + r] = self.get(r, c).conj();
            }
        }
        CMatrix { dim: n, data }
    }
    pub fn mul(&self, o: &CMatrix) -> Self {
        let n = self.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    data[r * n + c] += a * o.get(k, c);
                }
            }
        }
        CMatrix { dim: n, data }
    }
    pub fn add(&self, o: &CMatrix) -> Self {
        CMatrix { dim: self.dim, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }
    /// Largest entrywise modulus of `self − o`.
    pub fn max_diff(&self, o: &CMatrix) -> f64 {
        self.data.iter().zip(&o.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim;
        (0..n).map(|r| (0..n).map(|c| self.get(r, c) * v[c]).sum()).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Action {
    Identity,
    Unitary(CMatrix),
    Measure(Vec<CMatrix>),
}

impl Action {
    /// Checks unitarity or the projector algebra against dimension `dim`.
    pub fn validate(&self, dim: usize) -> Result<()> {
        let bad = |m: String| Err(Error::MalformedMachine(m));
        let id = CMatrix::identity(dim);
        match self {
            Action::Identity => Ok(()),
            Action::Unitary(u) => {
                if u.dim() != dim {
                    return bad("unitary has the wrong dimension".into());
                }
                let d = u.adjoint().mul(u).max_diff(&id);
                if d > OP_TOL {
                    return bad(format!("matrix is not unitary (|U*U - I|max = {d:e})"));
                }
                Ok(())
            }
            Action::Measure(ps) => {
                if ps.is_empty() {
                    return bad("measurement without projectors".into());
                }
                let mut sum = CMatrix::new(dim, vec![Complex64::new(0.0, 0.0); dim * dim])?;
                let zero = sum.clone();
                for (i, p) in ps.iter().enumerate() {
                    if p.dim() != dim {
                        return bad("projector has the wrong dimension".into());
                    }
                    if p.mul(p).max_diff(p) > OP_TOL || p.adjoint().max_diff(p) > OP_TOL {
                        return bad(format!("operator {i} is not an orthogonal projector"));
                    }
                    for (j, q) in ps.iter().enumerate().skip(i + 1) {
                        if p.mul(q).max_diff(&zero) > OP_TOL {
                            return bad(format!("projectors {i} and {j} are not orthogonal"));
                        }
                    }
                    sum = sum.add(p);
                }
                if sum.max_diff(&id) > OP_TOL {
                    return bad("projectors do not sum to the identity".into());
                }
                Ok(())
            }
        }
    }

    pub fn outcomes(&self) -> usize {
        match self {
            Action::Measure(ps) => ps.len(),
            _ => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumRegister {
    pub amplitudes: Vec<Complex64>,
}

impl QuantumRegister {
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        QuantumRegister { amplitudes }
    }
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
    /// Uniformly random unit vector (normalized complex Gaussian).
    pub fn random(dim: usize, rng: &mut (impl RngCore + ?Sized)) -> Self {
        use rand_distr::{Distribution, StandardNormal};
        let mut amplitudes: Vec<Complex64> = (0..dim)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re, im)
            })
            .collect();
        let n = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amplitudes {
            *a /= n;
        }
        QuantumRegister { amplitudes }
    }
    /// Outcome probabilities of a measurement without collapsing.
    pub fn outcome_probabilities(&self, projectors: &[CMatrix]) -> Vec<f64> {
        projectors
            .iter()
            .map(|p| p.apply(&self.amplitudes).iter().map(|a| a.norm_sqr()).sum())
            .collect()
    }
}

pub fn apply_action(
    reg: &QuantumRegister,
    action: &Action,
    rng: &mut (impl RngCore + ?Sized),
) -> Result<(QuantumRegister, Option<usize>)> {
    match action {
        Action::Identity => Ok((reg.clone(), None)),
        Action::Unitary(u) => Ok((QuantumRegister { amplitudes: u.apply(&reg.amplitudes) }, None)),
        Action::Measure(ps) => {
            let probs = reg.outcome_probabilities(ps);
            if probs.iter().all(|&p| p < OP_TOL) {
                return Err(Error::DegenerateMeasurement);
            }
            let total: f64 = probs.iter().sum();
            let u: f64 = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut tau = probs.len() - 1;
            for (i, &p) in probs.iter().enumerate() {
                acc += p;
                if u < acc && p > 0.0 {
                    tau = i;
                    break;
                }
            }
            while probs[tau] <= 0.0 {
                tau -= 1;
            }
            let v = ps[tau].apply(&reg.amplitudes);
            let n = probs[tau].sqrt();
            Ok((QuantumRegister { amplitudes: v.into_iter().map(|a| a / n).collect() }, Some(tau)))
        }
    }
}
