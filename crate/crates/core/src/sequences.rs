//! Coefficient sequences `α_k` of the kernel families, kept in log-domain.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use rug::Float;

use crate::error::{Error, Result};
use crate::precision::Precision;

/// Kernel family together with its scale parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `α_k = ε^{-2k} k!`
    Gaussian { epsilon: f64 },
    /// `α_k = ε^{-k} k!`
    Exponential { epsilon: f64 },
    /// `α_k = (τε)^{-2k} k!`
    Hermite { epsilon: f64, tau: f64 },
    /// `α_k = ε^{-k} k!²`
    Bessel { epsilon: f64 },
    /// `α_k = k!^β`
    Power { beta: f64 },
}

impl Family {
    /// Builds a family from its command-line name.
    pub fn from_name(name: &str, epsilon: f64, tau: f64, beta: f64) -> Result<Self> {
        let fam = match name {
            "gaussian" => Family::Gaussian { epsilon },
            "exponential" => Family::Exponential { epsilon },
            "hermite" => Family::Hermite { epsilon, tau },
            "bessel" => Family::Bessel { epsilon },
            "power" => Family::Power { beta },
            other => return Err(Error::Config(format!("unknown kernel family `{other}`"))),
        };
        fam.validate()?;
        Ok(fam)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Gaussian { .. } => "gaussian",
            Family::Exponential { .. } => "exponential",
            Family::Hermite { .. } => "hermite",
            Family::Bessel { .. } => "bessel",
            Family::Power { .. } => "power",
        }
    }

    pub fn epsilon(&self) -> Option<f64> {
        match *self {
            Family::Gaussian { epsilon }
            | Family::Exponential { epsilon }
            | Family::Hermite { epsilon, .. }
            | Family::Bessel { epsilon } => Some(epsilon),
            Family::Power { .. } => None,
        }
    }

    pub fn tau(&self) -> Option<f64> {
        match *self {
            Family::Hermite { tau, .. } => Some(tau),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match *self {
            Family::Gaussian { epsilon } | Family::Exponential { epsilon } | Family::Bessel { epsilon } => {
                check("epsilon", epsilon)
            }
            Family::Hermite { epsilon, tau } => {
                check("epsilon", epsilon)?;
                check("tau", tau)
            }
            Family::Power { beta } => check("beta", beta),
        }
    }

    /// The `λ` certifying the factorial-growth assumption, in working precision.
    pub fn lambda(&self, prec: Precision) -> Option<Float> {
        let f = |v: f64| prec.float(v);
        match *self {
            Family::Gaussian { epsilon } => Some(f(epsilon).square()),
            Family::Exponential { epsilon } | Family::Bessel { epsilon } => Some(f(epsilon)),
            Family::Hermite { epsilon, tau } => Some((f(tau) * f(epsilon)).square()),
            Family::Power { beta } => (beta >= 1.0).then(|| prec.one()),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::Hermite { epsilon, tau } => write!(f, "hermite(eps={epsilon}, tau={tau})"),
            Family::Power { beta } => write!(f, "power(beta={beta})"),
            other => write!(f, "{}(eps={})", other.name(), other.epsilon().unwrap_or(f64::NAN)),
        }
    }
}

/// Memoised `ln α_k` per mantissa width.
#[derive(Default)]
struct Memo {
    by_bits: HashMap<u32, Vec<Float>>,
}

/// The sequence `α_k` of a family, with an optional `λ` override.
pub struct AlphaSequence {
    family: Family,
    lambda_override: Option<f64>,
    memo: Mutex<Memo>,
}

impl fmt::Debug for AlphaSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlphaSequence")
            .field("family", &self.family)
            .field("lambda_override", &self.lambda_override)
            .finish()
    }
}

impl Clone for AlphaSequence {
    fn clone(&self) -> Self {
        Self {
            family: self.family,
            lambda_override: self.lambda_override,
            memo: Mutex::default(),
        }
    }
}

impl PartialEq for AlphaSequence {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family && self.lambda_override == other.lambda_override
    }
}

impl AlphaSequence {
    pub fn new(family: Family) -> Result<Self> {
        family.validate()?;
        let seq = Self {
            family,
            lambda_override: None,
            memo: Mutex::default(),
        };
        seq.check_summable()?;
        Ok(seq)
    }

    /// Replaces the family's `λ` by a caller-supplied value.
    pub fn with_lambda(mut self, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::Config(format!("lambda must be positive, got {lambda}")));
        }
        self.lambda_override = Some(lambda);
        Ok(self)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// `λ`, or `None` when the family has no certificate (power with `β < 1`).
    pub fn lambda(&self, prec: Precision) -> Option<Float> {
        match self.lambda_override {
            Some(l) => Some(prec.float(l)),
            None => self.family.lambda(prec),
        }
    }

    pub fn lambda_f64(&self) -> Option<f64> {
        self.lambda(Precision::new(20)).map(|l| l.to_f64())
    }

    /// `ln α_k` from the family formula.
    pub fn log_alpha(&self, k: usize, prec: Precision) -> Float {
        let bits = prec.bits();
        {
            let memo = self.memo.lock().expect("alpha memo poisoned");
            if let Some(v) = memo.by_bits.get(&bits).and_then(|t| t.get(k)) {
                return v.clone();
            }
        }
        if k > 4096 {
            return self.log_alpha_direct(k, prec);
        }
        let mut memo = self.memo.lock().expect("alpha memo poisoned");
        let table = memo.by_bits.entry(bits).or_default();
        while table.len() <= k {
            let next = self.log_alpha_direct(table.len(), prec);
            table.push(next);
        }
        table[k].clone()
    }

    /// `ln α_k` for `k = 0..len`.
    pub fn log_alphas(&self, len: usize, prec: Precision) -> Vec<Float> {
        if len == 0 {
            return Vec::new();
        }
        if len > 4097 {
            return (0..len).map(|k| self.log_alpha(k, prec)).collect();
        }
        self.log_alpha(len - 1, prec);
        let memo = self.memo.lock().expect("alpha memo poisoned");
        memo.by_bits[&prec.bits()][..len].to_vec()
    }

    /// `α_k^{-1}` for `k = 0..len` (linear domain; these are small).
    pub fn inv_alphas(&self, len: usize, prec: Precision) -> Vec<Float> {
        self.log_alphas(len, prec).into_iter().map(|l| (-l).exp()).collect()
    }

    fn log_alpha_direct(&self, k: usize, prec: Precision) -> Float {
        let kf = prec.float(k as u64);
        let lnfact = prec.ln_factorial(k as u64);
        let ln = |v: f64| prec.float(v).ln();
        match self.family {
            Family::Gaussian { epsilon } => lnfact - kf * 2u32 * ln(epsilon),
            Family::Exponential { epsilon } => lnfact - kf * ln(epsilon),
            Family::Hermite { epsilon, tau } => lnfact - kf * 2u32 * (ln(tau) + ln(epsilon)),
            Family::Bessel { epsilon } => lnfact * 2u32 - kf * ln(epsilon),
            Family::Power { beta } => lnfact * prec.float(beta),
        }
    }

    /// Ratio test on the first 200 terms of `Σ α_k^{-1}`.
    fn check_summable(&self) -> Result<()> {
        let p = Precision::new(20);
        let logs = self.log_alphas(201, p);
        let mut prev = f64::INFINITY;
        for k in 100..200 {
            let q = (logs[k].to_f64() - logs[k + 1].to_f64()).exp();
            if q >= 1.0 || q > prev * (1.0 + 1e-12) {
                return Err(Error::Config(format!(
                    "{}: 1/alpha_k is not summable by the ratio test (ratio {q} at k={k})",
                    self.family
                )));
            }
            prev = q;
        }
        Ok(())
    }

    /// Checks the factorial-growth assumption with this sequence's own `λ`.
    pub fn verify_assumption(&self, n_max: usize, prec: Precision) -> Result<AlphaReport> {
        let lambda = self
            .lambda(prec)
            .ok_or_else(|| Error::NotApplicable(format!("{} has no lambda certificate", self.family)))?;
        Ok(verify_alpha_assumption(self, &lambda, n_max, prec))
    }
}

/// Outcome of [`verify_alpha_assumption`].
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaReport {
    pub holds: bool,
    pub first_violation: Option<(usize, usize)>,
}

/// Exhaustive check of `α_k/α_n ≤ λ^{n-k} k!/n!` for `0 ≤ k ≤ n ≤ n_max`.
pub fn verify_alpha_assumption(seq: &AlphaSequence, lambda: &Float, n_max: usize, prec: Precision) -> AlphaReport {
    let logs = seq.log_alphas(n_max + 1, prec);
    let facts: Vec<Float> = (0..=n_max).map(|k| prec.ln_factorial(k as u64)).collect();
    let ln_lambda = Float::with_val(prec.bits(), lambda.ln_ref());
    let tol = prec.tolerance();
    for n in 1..=n_max {
        for k in 0..n {
            let lhs = Float::with_val(prec.bits(), &logs[k] - &logs[n]);
            let mut rhs = Float::with_val(prec.bits(), &ln_lambda * (n - k) as u64);
            rhs += &facts[k];
            rhs -= &facts[n];
            let excess = Float::with_val(prec.bits(), &lhs - &rhs);
            let scale = 1.0 + lhs.to_f64().abs().max(rhs.to_f64().abs());
            if excess.to_f64() > tol * scale {
                return AlphaReport {
                    holds: false,
                    first_violation: Some((k, n)),
                };
            }
        }
    }
    AlphaReport {
        holds: true,
        first_violation: None,
    }
}

/// Smallest `λ` for which the assumption holds on `0 ≤ k < n ≤ n_max`.
pub fn minimal_lambda(seq: &AlphaSequence, n_max: usize, prec: Precision) -> Float {
    let logs = seq.log_alphas(n_max + 1, prec);
    let mut best = prec.neg_infinity();
    for n in 1..=n_max {
        for k in 0..n {
            let mut v = Float::with_val(prec.bits(), &logs[k] - &logs[n]);
            v += prec.ln_factorial(n as u64);
            v -= prec.ln_factorial(k as u64);
            v /= (n - k) as u64;
            if v > best {
                best = v;
            }
        }
    }
    best.exp()
}

/// `ln n!`.
pub fn log_factorial(n: u64, prec: Precision) -> Float {
    prec.ln_factorial(n)
}
