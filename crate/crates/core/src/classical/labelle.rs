use rug::Float;

use super::{poly_l2_norm, Polynomial};
use crate::error::{Error, Result};
use crate::precision::Precision;

/// `ln l_{n,k}` with `l_{n,k} = (2k-1)!!/k! · √(k+1/2) · binom(m+k+1/2, m)`, `m = ⌊(n-k)/2⌋`.
fn ln_labelle(n: usize, k: usize, prec: Precision) -> Float {
    let bits = prec.bits();
    let m = (n - k) / 2;
    // (2k-1)!! = (2k)! / (2^k k!), with (-1)!! = 1
    let mut ln = prec.ln_factorial(2 * k as u64);
    ln -= Float::with_val(bits, 2u32).ln() * k as u64;
    ln -= prec.ln_factorial(k as u64) * 2u32;
    let mut kh = prec.float(k as u64);
    kh += 0.5f64;
    ln += kh.ln() / 2u32;
    // binom(m+k+1/2, m) = Γ(m+k+3/2) / (m! Γ(k+3/2))
    let mut a = prec.float((m + k) as u64);
    a += 1.5f64;
    let mut b = prec.float(k as u64);
    b += 1.5f64;
    ln += a.ln_gamma();
    ln -= b.ln_gamma();
    ln -= prec.ln_factorial(m as u64);
    ln
}

/// Labelle constant `l_{n,k}`.
pub fn labelle_constant(n: usize, k: usize, prec: Precision) -> Result<Float> {
    if k > n {
        return Err(Error::Domain(format!("labelle constant needs k <= n, got k={k}, n={n}")));
    }
    Ok(ln_labelle(n, k, prec).exp())
}

/// `l_{n,0}, …, l_{n,n}`.
pub fn labelle_constants(n: usize, prec: Precision) -> Vec<Float> {
    (0..=n).map(|k| ln_labelle(n, k, prec).exp()).collect()
}

/// Outcome of [`labelle_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct LabelleReport {
    pub holds: bool,
    pub worst_k: usize,
    /// Largest `|a_k| / (l_{n,k} ‖P‖_2)`.
    pub worst_ratio: f64,
}

/// Checks `|a_k| ≤ l_{n,k} ‖P‖_2` for every `k`.
pub fn labelle_check(p: &Polynomial, prec: Precision) -> Result<LabelleReport> {
    if p.is_zero() {
        return Err(Error::Domain("labelle check needs a nonzero polynomial".into()));
    }
    labelle_check_with(p, &labelle_constants(p.degree(), prec), prec)
}

/// [`labelle_check`] with the constants of `p`'s degree precomputed.
pub fn labelle_check_with(p: &Polynomial, constants: &[Float], prec: Precision) -> Result<LabelleReport> {
    if p.is_zero() {
        return Err(Error::Domain("labelle check needs a nonzero polynomial".into()));
    }
    if constants.len() != p.degree() + 1 {
        return Err(Error::Domain(format!(
            "{} labelle constants for a degree {} polynomial",
            constants.len(),
            p.degree()
        )));
    }
    let norm = poly_l2_norm(p, prec);
    let mut worst_k = 0;
    let mut worst_ratio = 0.0f64;
    for (k, (a, l)) in p.coeffs().iter().zip(constants).enumerate() {
        let bound = Float::with_val(prec.bits(), l * &norm);
        let ratio = (Float::with_val(prec.bits(), a.abs_ref()) / bound).to_f64();
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst_k = k;
        }
    }
    Ok(LabelleReport {
        holds: worst_ratio <= 1.0 + prec.tolerance(),
        worst_k,
        worst_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::default()
    }

    #[test]
    fn small_constants() {
        let l00 = labelle_constant(0, 0, p()).unwrap();
        assert!((l00 - 0.5f64.sqrt()).abs() < 1e-15);
        let l11 = labelle_constant(1, 1, p()).unwrap();
        assert!((l11 - 1.5f64.sqrt()).abs() < 1e-15);
        let l20 = labelle_constant(2, 0, p()).unwrap();
        assert!((l20 - 1.5 * 0.5f64.sqrt()).abs() < 1e-15);
        assert!(labelle_constant(1, 2, p()).is_err());
    }

    #[test]
    fn equality_cases() {
        let x = Polynomial::monomial(1, p());
        let r = labelle_check(&x, p()).unwrap();
        assert!(r.holds);
        assert!((r.worst_ratio - 1.0).abs() < 1e-14);
        let c = Polynomial::from_f64(&[-2.5], p());
        let r = labelle_check(&c, p()).unwrap();
        assert!(r.holds && (r.worst_ratio - 1.0).abs() < 1e-14);
        assert!(labelle_check(&Polynomial::zero(), p()).is_err());
    }
}
