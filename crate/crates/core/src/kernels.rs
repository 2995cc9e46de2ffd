//! Weighted power series kernels `K(x,y) = φ(x)φ(y) Σ α_k^{-1} x^k y^k`.

use std::sync::Arc;

use rug::Float;

use crate::bounds::{c_l, m_l};
use crate::error::{Error, Result};
use crate::precision::Precision;
use crate::sequences::{AlphaSequence, Family};

/// Upper limit on series terms before giving up on a tail certificate.
pub const MAX_SERIES_TERMS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightKind {
    Unit,
    /// `φ(x) = e^{-ε²x²/2}`
    Gaussian { epsilon: f64 },
}

/// The weight `φ` together with its bounds on [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightFunction {
    kind: WeightKind,
}

impl WeightFunction {
    pub fn unit() -> Self {
        Self { kind: WeightKind::Unit }
    }

    pub fn gaussian(epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::Config(format!("weight epsilon must be positive, got {epsilon}")));
        }
        Ok(Self {
            kind: WeightKind::Gaussian { epsilon },
        })
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn is_unit(&self) -> bool {
        self.kind == WeightKind::Unit
    }

    pub fn eval(&self, x: &Float, prec: Precision) -> Float {
        match self.kind {
            WeightKind::Unit => prec.one(),
            WeightKind::Gaussian { epsilon } => {
                let e = prec.float(epsilon);
                let mut t = Float::with_val(prec.bits(), x * &e).square();
                t /= -2i32;
                t.exp()
            }
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        match self.kind {
            WeightKind::Unit => 1.0,
            WeightKind::Gaussian { epsilon } => (-(epsilon * x).powi(2) / 2.0).exp(),
        }
    }

    /// `inf_{[-1,1]} |φ|`.
    pub fn phi_min(&self, prec: Precision) -> Float {
        self.eval(&prec.one(), prec)
    }

    /// `sup_{[-1,1]} |φ|`.
    pub fn phi_max(&self, prec: Precision) -> Float {
        self.eval(&prec.zero(), prec)
    }

    /// Checks `φ_min ≤ |φ| ≤ φ_max` on a uniform grid.
    pub fn verify_bounds(&self, points: usize) -> Result<()> {
        let p = Precision::new(20);
        let (lo, hi) = (self.phi_min(p).to_f64(), self.phi_max(p).to_f64());
        if lo <= 0.0 {
            return Err(Error::Domain("weight vanishes on [-1, 1]".into()));
        }
        let m = points.max(2) - 1;
        for i in 0..=m {
            let x = -1.0 + 2.0 * i as f64 / m as f64;
            let v = self.eval_f64(x).abs();
            if v < lo * (1.0 - 1e-14) || v > hi * (1.0 + 1e-14) {
                return Err(Error::Domain(format!("weight bound violated at x={x}: {v}")));
            }
        }
        Ok(())
    }
}

/// How [`Kernel::eval`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvalMode {
    ClosedForm,
    /// Truncated series with absolute tail bound below `tol`.
    Series { tol: f64 },
}

/// A weighted power series kernel.
#[derive(Debug, Clone)]
pub struct Kernel {
    alpha: Arc<AlphaSequence>,
    weight: WeightFunction,
}

impl PartialEq for Kernel {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.alpha, &other.alpha) || *self.alpha == *other.alpha) && self.weight == other.weight
    }
}

impl Kernel {
    pub fn new(alpha: AlphaSequence, weight: WeightFunction) -> Self {
        Self {
            alpha: Arc::new(alpha),
            weight,
        }
    }

    /// The kernel the family names, with its natural weight.
    pub fn from_family(family: Family) -> Result<Self> {
        let weight = match family {
            Family::Gaussian { epsilon } | Family::Hermite { epsilon, .. } => WeightFunction::gaussian(epsilon)?,
            _ => WeightFunction::unit(),
        };
        Ok(Self::new(AlphaSequence::new(family)?, weight))
    }

    pub fn gaussian(epsilon: f64) -> Result<Self> {
        Self::from_family(Family::Gaussian { epsilon })
    }

    pub fn exponential(epsilon: f64) -> Result<Self> {
        Self::from_family(Family::Exponential { epsilon })
    }

    pub fn hermite(epsilon: f64, tau: f64) -> Result<Self> {
        Self::from_family(Family::Hermite { epsilon, tau })
    }

    pub fn bessel(epsilon: f64) -> Result<Self> {
        Self::from_family(Family::Bessel { epsilon })
    }

    pub fn power(beta: f64) -> Result<Self> {
        Self::from_family(Family::Power { beta })
    }

    /// The unweighted companion `R(x,y) = Σ α_k^{-1} x^k y^k`.
    pub fn unweighted(&self) -> Self {
        Self {
            alpha: self.alpha.clone(),
            weight: WeightFunction::unit(),
        }
    }

    pub fn alpha(&self) -> &AlphaSequence {
        &self.alpha
    }

    pub fn weight(&self) -> &WeightFunction {
        &self.weight
    }

    pub fn family(&self) -> Family {
        self.alpha.family()
    }

    /// Whether the kernel is one of the named families in its natural form.
    pub fn has_closed_form(&self) -> bool {
        match self.family() {
            Family::Power { .. } => false,
            fam => {
                let natural = match fam {
                    Family::Gaussian { epsilon } | Family::Hermite { epsilon, .. } => {
                        WeightFunction::gaussian(epsilon).ok()
                    }
                    _ => Some(WeightFunction::unit()),
                };
                natural == Some(self.weight)
            }
        }
    }

    pub fn eval(&self, x: &Float, y: &Float, mode: EvalMode, prec: Precision) -> Result<Float> {
        for v in [x, y] {
            if *v < -1 || *v > 1 {
                return Err(Error::Domain(format!("kernel argument {} outside [-1, 1]", v.to_f64())));
            }
        }
        match mode {
            EvalMode::ClosedForm => self.eval_closed(x, y, prec),
            EvalMode::Series { tol } => {
                let z = Float::with_val(prec.bits(), x * y);
                let s = series_sum(&self.alpha, &z, tol, prec)?;
                Ok(s * self.weight.eval(x, prec) * self.weight.eval(y, prec))
            }
        }
    }

    /// Closed form where available, otherwise the series at roundoff-level tolerance.
    pub fn eval_best(&self, x: &Float, y: &Float, prec: Precision) -> Result<Float> {
        if self.has_closed_form() {
            self.eval(x, y, EvalMode::ClosedForm, prec)
        } else {
            let tol = 10f64.powi(-(prec.digits() as i32 + 5));
            self.eval(x, y, EvalMode::Series { tol }, prec)
        }
    }

    fn eval_closed(&self, x: &Float, y: &Float, prec: Precision) -> Result<Float> {
        if !self.has_closed_form() {
            return Err(Error::NotApplicable(format!("{} has no closed form", self.family())));
        }
        let bits = prec.bits();
        let xy = Float::with_val(bits, x * y);
        Ok(match self.family() {
            Family::Gaussian { epsilon } => {
                let e2 = prec.float(epsilon).square();
                let mut t = Float::with_val(bits, x - y).square();
                t *= &e2;
                t /= -2i32;
                t.exp()
            }
            Family::Exponential { epsilon } => (xy * prec.float(epsilon)).exp(),
            Family::Hermite { epsilon, tau } => {
                let e2 = prec.float(epsilon).square();
                let t2 = prec.float(tau).square();
                let mut s = Float::with_val(bits, x.square_ref());
                s += Float::with_val(bits, y.square_ref());
                s *= &e2;
                s /= -2i32;
                s += xy * t2 * e2;
                s.exp()
            }
            Family::Bessel { epsilon } => {
                // I_0(2√(εxy)) = Σ (εxy)^k / k!², summed directly
                let z = xy * prec.float(epsilon);
                let mut term = prec.one();
                let mut sum = prec.one();
                let tiny = Float::with_val(bits, Float::i_exp(1, -(bits as i32) - 8));
                for k in 1..MAX_SERIES_TERMS {
                    term *= &z;
                    term /= (k * k) as u64;
                    sum += &term;
                    if Float::with_val(bits, term.abs_ref()) < tiny {
                        break;
                    }
                }
                sum
            }
            Family::Power { .. } => unreachable!("checked by has_closed_form"),
        })
    }
}

/// `Σ_k α_k^{-1} z^k`, stopping once the geometric majorant of the tail is below `tol`.
pub(crate) fn series_sum(alpha: &AlphaSequence, z: &Float, tol: f64, prec: Precision) -> Result<Float> {
    let bits = prec.bits();
    let mut sum = prec.zero();
    let mut zk = prec.one();
    let za = z.to_f64().abs();
    if z.is_zero() {
        return Ok((-alpha.log_alpha(0, prec)).exp());
    }
    let mut tail = f64::INFINITY;
    for k in 0..MAX_SERIES_TERMS {
        let la = alpha.log_alpha(k, prec);
        let la_next = alpha.log_alpha(k + 1, prec);
        let term = Float::with_val(bits, (-la.clone()).exp() * &zk);
        sum += &term;
        let q = (la.to_f64() - la_next.to_f64()).exp() * za;
        let next_abs = term.to_f64().abs() * q;
        if q < 0.5 {
            tail = 2.0 * next_abs;
            if tail < tol {
                return Ok(sum);
            }
        }
        zk *= z;
    }
    Err(Error::Truncation {
        terms: MAX_SERIES_TERMS,
        tail,
    })
}

/// `ln C_R^{2n} = ln Σ_{k≥n} α_k^{-1} (k!/(k-n)!)²`, tail certified below `tol · value`.
pub fn cr2n_exact(alpha: &AlphaSequence, n: usize, tol: f64, prec: Precision) -> Result<Float> {
    let bits = prec.bits();
    let ln_term = |k: usize| -> Float {
        let mut v = -alpha.log_alpha(k, prec);
        v += prec.ln_factorial(k as u64) * 2u32;
        v -= prec.ln_factorial((k - n) as u64) * 2u32;
        v
    };
    // Work relative to the first term to keep magnitudes tame.
    let ln0 = ln_term(n);
    let mut sum = prec.zero();
    let mut last_q = f64::INFINITY;
    for k in n..n + MAX_SERIES_TERMS {
        let lt = ln_term(k);
        let rel = Float::with_val(bits, &lt - &ln0).exp();
        sum += &rel;
        let lq = (ln_term(k + 1) - &lt).to_f64();
        let q = lq.exp();
        if q < 0.5 && q <= last_q {
            let next = Float::with_val(bits, &rel * q);
            let tail = next * 2u32;
            if tail <= Float::with_val(bits, &sum * tol) {
                return Ok(sum.ln() + ln0);
            }
        }
        last_q = q;
    }
    if last_q >= 1.0 {
        return Err(Error::Domain(format!("C_R^(2n) series diverges for {} at n={n}", alpha.family())));
    }
    Err(Error::Truncation {
        terms: MAX_SERIES_TERMS,
        tail: f64::NAN,
    })
}

/// `ln(c_L(λ) n^{-1/4} e^{2√(λn)} α_n^{-1} n!²)`, valid for `n ≥ m_L(λ)`.
pub fn cr2n_bound(alpha: &AlphaSequence, n: usize, prec: Precision) -> Result<Float> {
    let lambda = alpha
        .lambda(prec)
        .ok_or_else(|| Error::NotApplicable(format!("{} has no lambda certificate", alpha.family())))?;
    let nf = prec.float(n as u64);
    if n == 0 || nf < m_l(&lambda, prec) {
        return Err(Error::NotApplicable(format!(
            "n={n} below m_L({}) = {}",
            lambda.to_f64(),
            m_l(&lambda, prec).to_f64()
        )));
    }
    let bits = prec.bits();
    let mut v = c_l(&lambda, prec).ln();
    v -= Float::with_val(bits, nf.ln_ref()) / 4u32;
    v += Float::with_val(bits, &lambda * &nf).sqrt() * 2u32;
    v -= alpha.log_alpha(n, prec);
    v += prec.ln_factorial(n as u64) * 2u32;
    Ok(v)
}

/// `ln(ε^{2n} (2n)! / (2^n n!))`.
pub fn ck2n_gaussian(epsilon: f64, n: usize, prec: Precision) -> Float {
    let bits = prec.bits();
    let mut v = prec.float(epsilon).ln() * (2 * n) as u64;
    v += prec.ln_factorial(2 * n as u64);
    v -= Float::with_val(bits, 2u32).ln() * n as u64;
    v -= prec.ln_factorial(n as u64);
    v
}
