//! Inequality suites over parameter ranges, each reduced to a margin summary.
//!
//! Margins are `ln(rhs) − ln(lhs)` reported in log10 units; a case is a
//! violation when its margin is below `−tolerance` of the working precision.

use std::fmt;
use std::ops::RangeInclusive;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Float;

use crate::bounds::{
    chebyshev_domination_ratio, chebyshev_norm_sum, ell1, ell2, first_applicable_n, labelle_domination_ratio,
    labelle_norm_sum, tau1, tau2,
};
use crate::classical::{
    chebyshev, labelle_check, labelle_check_with, labelle_constant, labelle_constants, laguerre, laguerre_bound, laguerre_m_tilde, markov_envelope_check,
    poly_l2_norm, poly_sup_norm, random_admissible_polynomial, random_polynomial,
};
use crate::error::{Error, Result};
use crate::kernels::{cr2n_bound, cr2n_exact, Kernel, WeightFunction};
use crate::precision::{ln_to_log10, Precision};
use crate::rkhs::SeriesFunction;
use crate::sequences::{AlphaSequence, Family};

/// Result of one inequality family.
#[derive(Debug, Clone)]
pub struct CheckSummary {
    pub name: String,
    pub checked: usize,
    pub violations: usize,
    /// Smallest margin seen, log10 units.
    pub min_margin: f64,
    /// Parameters of the case with the smallest margin.
    pub worst_case: String,
    /// Negative control: the suite passes when violations are found.
    pub expected_failure: bool,
}

impl CheckSummary {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            checked: 0,
            violations: 0,
            min_margin: f64::INFINITY,
            worst_case: String::new(),
            expected_failure: false,
        }
    }

    fn expecting_failure(mut self) -> Self {
        self.expected_failure = true;
        self
    }

    /// Records `ln_margin = ln rhs − ln lhs`.
    pub fn record(&mut self, ln_margin: &Float, label: impl FnOnce() -> String, prec: Precision) {
        self.checked += 1;
        let m = ln_to_log10(ln_margin);
        if ln_margin.to_f64() < -prec.tolerance() {
            self.violations += 1;
        }
        if m < self.min_margin || self.worst_case.is_empty() {
            self.min_margin = m;
            self.worst_case = label();
        }
    }

    pub fn passed(&self) -> bool {
        if self.expected_failure {
            self.violations > 0
        } else {
            self.violations == 0 && self.checked > 0
        }
    }
}

impl fmt::Display for CheckSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match (self.passed(), self.expected_failure) {
            (true, false) => "ok",
            (true, true) => "expected-failure",
            (false, true) => "UNEXPECTED-PASS",
            (false, false) => "VIOLATED",
        };
        write!(
            f,
            "{:<40} {:>17} cases={:<6} violations={:<5} min_margin_log10={:+.6e} worst=[{}]",
            self.name, verdict, self.checked, self.violations, self.min_margin, self.worst_case
        )
    }
}

fn ln_of(v: f64, prec: Precision) -> Float {
    prec.float(v).ln()
}

/// Sequences sharing the certificate `λ`: gaussian, exponential, hermite (τ = 2), bessel.
pub fn sequences_for_lambda(lambda: f64) -> Result<Vec<AlphaSequence>> {
    let r = lambda.sqrt();
    [
        Family::Gaussian { epsilon: r },
        Family::Exponential { epsilon: lambda },
        Family::Hermite { epsilon: r / 2.0, tau: 2.0 },
        Family::Bessel { epsilon: lambda },
    ]
    .into_iter()
    .map(AlphaSequence::new)
    .collect()
}

fn lambda_of(seq: &AlphaSequence, prec: Precision) -> Result<Float> {
    seq.lambda(prec)
        .ok_or_else(|| Error::NotApplicable(format!("{} has no lambda certificate", seq.family())))
}

/// The factorial-growth assumption up to `n_max`.
pub fn alpha_assumption(seqs: &[AlphaSequence], n_max: usize, prec: Precision) -> Result<CheckSummary> {
    let mut s = CheckSummary::new("alpha assumption");
    for seq in seqs {
        let rep = seq.verify_assumption(n_max, prec)?;
        s.checked += 1;
        if !rep.holds {
            s.violations += 1;
            s.min_margin = f64::NEG_INFINITY;
            s.worst_case = format!("{} first violation {:?}", seq.family(), rep.first_violation);
        } else if s.worst_case.is_empty() {
            s.min_margin = 0.0;
            s.worst_case = format!("{} n<={n_max}", seq.family());
        }
    }
    Ok(s)
}

/// `L_n(−x) ≤ c̃_L(x) n^{−1/4} e^{2√(xn)}` for `n ≥ m̃_L(x)`.
pub fn laguerre_inequality(xs: &[f64], n_max: usize, prec: Precision) -> CheckSummary {
    let mut s = CheckSummary::new("effective Laguerre bound");
    for &x in xs {
        let xf = prec.float(x);
        let start = laguerre_m_tilde(&xf, prec).ceil().to_f64() as usize;
        for n in start.max(1)..=n_max {
            let b = laguerre_bound(n, &xf, prec);
            let m = b.bound.ln() - laguerre(n, &xf, prec).ln();
            s.record(&m, || format!("x={x} n={n}"), prec);
        }
    }
    s
}

/// `C_R^{2n}` against its closed-form bound, `n` from `m_L(λ)` to `n_max`.
pub fn cr2n_inequality(seqs: &[AlphaSequence], ns: RangeInclusive<usize>, prec: Precision) -> Result<CheckSummary> {
    let mut s = CheckSummary::new("derivative sum bound");
    let tol = prec.tolerance();
    for seq in seqs {
        let lambda = lambda_of(seq, prec)?;
        for n in first_applicable_n(&lambda, prec).max(*ns.start())..=*ns.end() {
            let m = cr2n_bound(seq, n, prec)? - cr2n_exact(seq, n, tol, prec)?;
            s.record(&m, || format!("{} n={n}", seq.family()), prec);
        }
    }
    Ok(s)
}

/// `τ₁ 4ⁿ α_n ≤ Σ α_{n−2k} t²_{n,n−2k} ≤ τ₂ 4ⁿ α_n`.
pub fn chebyshev_sum_sandwich(seqs: &[AlphaSequence], ns: RangeInclusive<usize>, prec: Precision) -> Result<CheckSummary> {
    let mut s = CheckSummary::new("Chebyshev coefficient sum sandwich");
    for seq in seqs {
        let lambda = lambda_of(seq, prec)?;
        for n in ns.clone() {
            let mid = chebyshev_norm_sum(seq, n, prec);
            sandwich(&mut s, seq, n, &mid, &tau1(prec).ln(), &tau2(&lambda, prec).ln(), prec);
        }
    }
    Ok(s)
}

/// `τ₁ 4ⁿ α_n ≤ ‖φ T_n‖²_K ≤ τ₂ 4ⁿ α_n`, norm taken from the series coefficients.
pub fn chebyshev_norm_sandwich(seqs: &[AlphaSequence], ns: RangeInclusive<usize>, prec: Precision) -> Result<CheckSummary> {
    let mut s = CheckSummary::new("weighted Chebyshev norm sandwich");
    for seq in seqs {
        let lambda = lambda_of(seq, prec)?;
        let kernel = Kernel::new(seq.clone(), WeightFunction::unit());
        for n in ns.clone() {
            let f = SeriesFunction::embed(&chebyshev(n, prec).polynomial(), &kernel);
            let mid = f.norm_ln(prec) * 2u32;
            sandwich(&mut s, seq, n, &mid, &tau1(prec).ln(), &tau2(&lambda, prec).ln(), prec);
        }
    }
    Ok(s)
}

/// `ℓ₁ 4ⁿ α_n ≤ Σ α_k l²_{n,k} ≤ ℓ₂ 4ⁿ α_n`.
pub fn labelle_sum_sandwich(seqs: &[AlphaSequence], ns: RangeInclusive<usize>, prec: Precision) -> Result<CheckSummary> {
    let mut s = CheckSummary::new("Labelle coefficient sum sandwich");
    for seq in seqs {
        let lambda = lambda_of(seq, prec)?;
        for n in ns.clone() {
            let mid = labelle_norm_sum(seq, n, prec)?;
            sandwich(&mut s, seq, n, &mid, &ell1(prec).ln(), &ell2(&lambda, prec).ln(), prec);
        }
    }
    Ok(s)
}

/// Records both sides of `c_lo 4ⁿ α_n ≤ exp(mid) ≤ c_hi 4ⁿ α_n`.
fn sandwich(s: &mut CheckSummary, seq: &AlphaSequence, n: usize, mid: &Float, ln_lo: &Float, ln_hi: &Float, prec: Precision) {
    let scale = ln_of(4.0, prec) * n as u64 + seq.log_alpha(n, prec);
    let lower = Float::with_val(prec.bits(), ln_lo + &scale);
    let upper = Float::with_val(prec.bits(), ln_hi + &scale);
    s.record(&Float::with_val(prec.bits(), mid - &lower), || format!("{} n={n} lower", seq.family()), prec);
    s.record(&(upper - mid), || format!("{} n={n} upper", seq.family()), prec);
}

/// Weighted norms of random polynomials against their sup and L2 norms:
/// `‖φP‖²_K ≤ (1+λ) τ₂ 4ⁿ α_n ‖P‖²_∞` and `‖φP‖²_K ≤ ℓ₂ 4ⁿ α_n ‖P‖²_2`.
/// Half the samples have coefficients uniform in [-1, 1], half are bounded at the Chebyshev extrema.
pub fn random_norm_bounds(
    seqs: &[AlphaSequence],
    degree_max: usize,
    count: usize,
    seed: u64,
    prec: Precision,
) -> Result<(CheckSummary, CheckSummary)> {
    let mut sup = CheckSummary::new("weighted norm vs sup norm");
    let mut l2 = CheckSummary::new("weighted norm vs L2 norm");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let consts = seqs
        .iter()
        .map(|seq| {
            let lambda = lambda_of(seq, prec)?;
            let c_sup = Float::with_val(prec.bits(), &lambda + 1u32).ln() + tau2(&lambda, prec).ln();
            Ok((c_sup, ell2(&lambda, prec).ln()))
        })
        .collect::<Result<Vec<_>>>()?;
    for n in 1..=degree_max {
        for i in 0..count {
            let p = if i % 2 == 0 {
                random_polynomial(n, &mut rng, prec)
            } else {
                random_admissible_polynomial(n, &mut rng, prec)
            };
            if p.degree() != n {
                continue;
            }
            let ln_sup = poly_sup_norm(&p, prec).ln() * 2u32;
            let ln_l2 = poly_l2_norm(&p, prec).ln() * 2u32;
            for (seq, (c_sup, c_l2)) in seqs.iter().zip(&consts) {
                let kernel = Kernel::new(seq.clone(), WeightFunction::unit());
                let lhs = SeriesFunction::embed(&p, &kernel).norm_ln(prec) * 2u32;
                let scale = ln_of(4.0, prec) * n as u64 + seq.log_alpha(n, prec);
                let rhs_sup = Float::with_val(prec.bits(), c_sup + &scale) + &ln_sup;
                let rhs_l2 = Float::with_val(prec.bits(), c_l2 + &scale) + &ln_l2;
                sup.record(&(rhs_sup - &lhs), || format!("{} n={n} sample={i}", seq.family()), prec);
                l2.record(&(rhs_l2 - &lhs), || format!("{} n={n} sample={i}", seq.family()), prec);
            }
        }
    }
    Ok((sup, l2))
}

/// Markov coefficient envelope on random polynomials bounded at the Chebyshev extrema.
pub fn markov_inequality(degree_max: usize, count: usize, seed: u64, prec: Precision) -> CheckSummary {
    let mut s = CheckSummary::new("Markov coefficient inequality");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 1..=degree_max {
        for i in 0..count {
            let p = random_admissible_polynomial(n, &mut rng, prec);
            let rep = markov_envelope_check(&p, prec);
            if !rep.applicable {
                continue;
            }
            let m = prec.float(rep.worst_ratio).ln();
            s.record(&(-m), || format!("n={n} sample={i} pair={}", rep.worst_pair), prec);
        }
    }
    s
}

/// `|a_k| ≤ l_{n,k} ‖P‖_2` on random polynomials.
pub fn labelle_inequality(degree_max: usize, count: usize, seed: u64, prec: Precision) -> Result<CheckSummary> {
    let mut s = CheckSummary::new("Labelle coefficient inequality");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 1..=degree_max {
        let consts = labelle_constants(n, prec);
        for i in 0..count {
            let p = random_admissible_polynomial(n, &mut rng, prec);
            if p.is_zero() {
                continue;
            }
            let rep = if p.degree() == n {
                labelle_check_with(&p, &consts, prec)?
            } else {
                labelle_check(&p, prec)?
            };
            let m = prec.float(rep.worst_ratio).ln();
            s.record(&(-m), || format!("n={n} sample={i} k={}", rep.worst_k), prec);
        }
    }
    Ok(s)
}

/// `|l_{1,1} √(2/3) − 1|`: the equality case `P(x) = x`.
pub fn labelle_equality_gap(prec: Precision) -> Result<f64> {
    let l = labelle_constant(1, 1, prec)?;
    let v = l * (prec.float(2) / 3u32).sqrt() - 1u32;
    Ok(v.abs().to_f64())
}

/// `‖f^{(n)}‖_∞ ≤ ‖f‖_K (C_R^{2n})^{1/2}` for random unit-weight series of degree 10.
pub fn derivative_inequality(seqs: &[AlphaSequence], n_max: usize, count: usize, seed: u64, prec: Precision) -> Result<CheckSummary> {
    let mut s = CheckSummary::new("derivative sup-norm bound");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = prec.tolerance();
    for seq in seqs {
        let kernel = Kernel::new(seq.clone(), WeightFunction::unit());
        for n in 1..=n_max {
            let c = cr2n_exact(seq, n, tol, prec)? / 2u32;
            for i in 0..count {
                let f = SeriesFunction::embed(&random_polynomial(10, &mut rng, prec), &kernel);
                let lhs = f.derivative_sup_norm(n, prec)?;
                if lhs.is_zero() {
                    continue;
                }
                let m = f.norm_ln(prec) + &c - lhs.ln();
                s.record(&m, || format!("{} n={n} sample={i}", seq.family()), prec);
            }
        }
    }
    Ok(s)
}

/// Growth of the two leading terms' ratio; reports the first `n` where it exceeds `threshold`.
#[derive(Debug, Clone)]
pub struct DominationReport {
    pub max_ratio: f64,
    pub argmax: usize,
    pub first_exceeding: Option<usize>,
}

pub fn domination_growth(seq: &AlphaSequence, n_max: usize, threshold: f64, labelle: bool, prec: Precision) -> Result<DominationReport> {
    let mut rep = DominationReport {
        max_ratio: 0.0,
        argmax: 2,
        first_exceeding: None,
    };
    for n in 2..=n_max {
        let r = if labelle {
            labelle_domination_ratio(seq, n, prec)?
        } else {
            chebyshev_domination_ratio(seq, n, prec)?
        }
        .to_f64();
        if r > rep.max_ratio {
            rep.max_ratio = r;
            rep.argmax = n;
        }
        if r > threshold && rep.first_exceeding.is_none() {
            rep.first_exceeding = Some(n);
        }
    }
    Ok(rep)
}

/// Negative control: for sequences violating the assumption the ratio should pass `threshold`.
pub fn domination_control(seq: &AlphaSequence, n_max: usize, threshold: f64, prec: Precision) -> Result<CheckSummary> {
    let mut s = CheckSummary::new(format!("domination ratio > {threshold:e}, {}", seq.family())).expecting_failure();
    for labelle in [false, true] {
        let rep = domination_growth(seq, n_max, threshold, labelle, prec)?;
        let kind = if labelle { "Labelle" } else { "Chebyshev" };
        s.record(
            &(prec.float(threshold).ln() - prec.float(rep.max_ratio).ln()),
            || format!("{kind} max ratio {:.4} at n={}", rep.max_ratio, rep.argmax),
            prec,
        );
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::default()
    }

    #[test]
    fn coefficient_sandwiches_small() {
        let seqs = sequences_for_lambda(1.0).unwrap();
        assert!(chebyshev_sum_sandwich(&seqs, 1..=12, p()).unwrap().passed());
        assert!(chebyshev_norm_sandwich(&seqs, 1..=12, p()).unwrap().passed());
        assert!(labelle_sum_sandwich(&seqs, 1..=12, p()).unwrap().passed());
    }

    #[test]
    fn lower_sandwich_is_tight_at_one() {
        let seqs = sequences_for_lambda(1.0).unwrap();
        let s = chebyshev_sum_sandwich(&seqs[..1], 1..=1, p()).unwrap();
        assert!(s.passed());
        assert!(s.min_margin.abs() < 1e-40, "{}", s.min_margin);
    }

    #[test]
    fn laguerre_small_range() {
        assert!(laguerre_inequality(&[1.0], 40, p()).passed());
    }

    #[test]
    fn power_half_control() {
        let seq = AlphaSequence::new(Family::Power { beta: 0.5 }).unwrap();
        let s = domination_control(&seq, 200, 10.0, p()).unwrap();
        assert!(s.passed() && s.expected_failure);
        let one = AlphaSequence::new(Family::Power { beta: 1.0 }).unwrap();
        let r = domination_growth(&one, 200, 10.0, false, p()).unwrap();
        assert!(r.max_ratio <= 0.25);
    }

    #[test]
    fn labelle_equality() {
        assert!(labelle_equality_gap(p()).unwrap() < 1e-25);
    }
}
