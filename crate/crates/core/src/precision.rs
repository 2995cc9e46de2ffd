//! Working precision and a few log-domain helpers on [`rug::Float`].

use rug::float::{Constant, Special};
use rug::Float;

/// Default number of significant decimal digits.
pub const DEFAULT_DIGITS: u32 = 60;

/// Smallest precision accepted by user-facing configurations.
pub const MIN_DIGITS: u32 = 30;

const GUARD_BITS: u32 = 16;

/// Working precision expressed in decimal digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Precision {
    digits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Self::new(DEFAULT_DIGITS)
    }
}

impl Precision {
    pub fn new(digits: u32) -> Self {
        Self {
            digits: digits.max(1),
        }
    }

    pub fn digits(self) -> u32 {
        self.digits
    }

    /// Mantissa bits, including a few guard bits.
    pub fn bits(self) -> u32 {
        (f64::from(self.digits) * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS
    }

    /// `10^-(digits - 10)`: the agreement expected from quantities that
    /// should coincide up to accumulated roundoff.
    pub fn tolerance(self) -> f64 {
        10f64.powi(-(self.digits.saturating_sub(10) as i32))
    }

    pub fn zero(self) -> Float {
        Float::new(self.bits())
    }

    pub fn one(self) -> Float {
        Float::with_val(self.bits(), 1)
    }

    pub fn float<T>(self, v: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        let mut f = Float::new(self.bits());
        rug::Assign::assign(&mut f, v);
        f
    }

    pub fn pi(self) -> Float {
        Float::with_val(self.bits(), Constant::Pi)
    }

    pub fn neg_infinity(self) -> Float {
        Float::with_val(self.bits(), Special::NegInfinity)
    }

    /// `ln Γ(n + 1) = ln n!`.
    pub fn ln_factorial(self, n: u64) -> Float {
        if n < 2 {
            return self.zero();
        }
        let mut x = Float::with_val(self.bits(), n);
        x += 1u32;
        x.ln_gamma()
    }
}

/// `ln Σ exp(t_i)` for log-domain terms; `-inf` entries are ignored.
pub fn ln_sum_exp<'a, I>(terms: I, prec: Precision) -> Float
where
    I: IntoIterator<Item = &'a Float>,
{
    let terms: Vec<&Float> = terms.into_iter().filter(|t| !t.is_infinite() || t.is_sign_positive()).collect();
    let Some(max) = terms.iter().copied().max_by(|a, b| a.partial_cmp(b).expect("NaN in ln_sum_exp")) else {
        return prec.neg_infinity();
    };
    if max.is_infinite() {
        return max.clone();
    }
    let max = max.clone();
    let mut acc = prec.zero();
    for t in terms {
        let d = Float::with_val(prec.bits(), t - &max);
        acc += d.exp();
    }
    acc.ln() + max
}

/// Natural-log value converted to `log10` as `f64`.
pub fn ln_to_log10(ln: &Float) -> f64 {
    if ln.is_infinite() {
        return if ln.is_sign_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
    }
    ln.to_f64() / std::f64::consts::LN_10
}

/// Total order on finite floats for sorting.
pub(crate) fn cmp_float(a: &Float, b: &Float) -> std::cmp::Ordering {
    a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bits_cover_digits() {
        let p = Precision::new(60);
        assert!(p.bits() >= 200);
        assert_eq!(p.tolerance(), 1e-50);
    }

    #[test]
    fn ln_sum_exp_matches_direct_sum() {
        let p = Precision::default();
        let terms: Vec<Float> = [1.0f64, 2.0, 3.0].iter().map(|v| p.float(*v).ln()).collect();
        let s = ln_sum_exp(&terms, p).exp();
        assert!((s - 6.0f64).abs() < 1e-50);
    }

    #[test]
    fn ln_sum_exp_of_nothing_is_neg_infinity() {
        let p = Precision::default();
        let terms = vec![p.neg_infinity()];
        assert!(ln_sum_exp(&terms, p).is_infinite());
        assert!(ln_sum_exp(std::iter::empty(), p).is_infinite());
    }

    #[test]
    fn factorial_logs() {
        let p = Precision::default();
        assert_eq!(p.ln_factorial(0), 0);
        assert!((p.ln_factorial(5).exp() - 120u32).abs() < 1e-50);
    }
}
