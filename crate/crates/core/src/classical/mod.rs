//! Classical polynomial tools: monomial-basis polynomials, Chebyshev data,
//! Markov and Labelle coefficient inequalities, Laguerre polynomials.

mod chebyshev;
mod labelle;
mod laguerre;

pub use chebyshev::{
    chebyshev, chebyshev_by_recurrence, chebyshev_coefficient, chebyshev_extrema, chebyshev_nodes,
    markov_envelope_check, ChebyshevData, MarkovReport,
};
pub use labelle::{labelle_check, labelle_check_with, labelle_constant, labelle_constants, LabelleReport};
pub use laguerre::{laguerre, laguerre_bound, laguerre_c_tilde, laguerre_m_tilde, LaguerreBound};

use rand::Rng;
use rug::Float;

use crate::error::{Error, Result};
use crate::precision::{cmp_float, Precision};
use crate::search::{chebyshev_grid, refine_sup};

/// Real polynomial in the monomial basis, `a_0 + a_1 x + ... + a_n x^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Float>,
}

impl Polynomial {
    /// Trailing zero coefficients are dropped.
    pub fn new(mut coeffs: Vec<Float>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_f64(coeffs: &[f64], prec: Precision) -> Self {
        Self::new(coeffs.iter().map(|&c| prec.float(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn monomial(k: usize, prec: Precision) -> Self {
        let mut c = vec![prec.zero(); k + 1];
        c[k] = prec.one();
        Self { coeffs: c }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Float] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Float> {
        self.coeffs
    }

    fn bits(&self) -> u32 {
        self.coeffs.iter().map(|c| c.prec()).max().unwrap_or(Precision::default().bits())
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &Float) -> Float {
        let bits = self.bits().max(x.prec());
        let mut acc = Float::new(bits);
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| Float::with_val(c.prec(), c * k as u64))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let bits = self.bits().max(other.bits());
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..n)
                .map(|k| {
                    let mut v = Float::new(bits);
                    if let Some(a) = self.coeffs.get(k) {
                        v += a;
                    }
                    if let Some(b) = other.coeffs.get(k) {
                        v += b;
                    }
                    v
                })
                .collect(),
        )
    }

    pub fn scale(&self, s: &Float) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .map(|c| Float::with_val(c.prec().max(s.prec()), c * s))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let bits = self.bits().max(other.bits());
        let mut out = vec![Float::new(bits); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += Float::with_val(bits, a * b);
            }
        }
        Self::new(out)
    }

    /// Coefficients in the Chebyshev basis `Σ c_j T_j`.
    pub fn to_chebyshev(&self) -> Vec<Float> {
        let Some(lead) = self.coeffs.last() else {
            return Vec::new();
        };
        let bits = self.bits();
        let n = self.degree();
        let mut c = vec![lead.clone()];
        for k in (0..n).rev() {
            let mut next = vec![Float::new(bits); c.len() + 1];
            for (m, cm) in c.iter().enumerate() {
                if m == 0 {
                    next[1] += cm;
                } else {
                    let half = Float::with_val(bits, cm / 2u32);
                    next[m + 1] += &half;
                    next[m - 1] += &half;
                }
            }
            next[0] += &self.coeffs[k];
            c = next;
        }
        c
    }

    /// Inverse of [`Polynomial::to_chebyshev`].
    pub fn from_chebyshev(c: &[Float], prec: Precision) -> Self {
        let bits = prec.bits();
        let n = c.len();
        let mut out = vec![Float::new(bits); n];
        let mut t_prev: Vec<Float> = vec![prec.one()];
        let mut t_cur: Vec<Float> = vec![prec.zero(), prec.one()];
        for (j, cj) in c.iter().enumerate() {
            let tj: &Vec<Float> = match j {
                0 => &t_prev,
                _ => &t_cur,
            };
            for (i, t) in tj.iter().enumerate() {
                out[i] += Float::with_val(bits, cj * t);
            }
            if j >= 1 {
                // T_{j+1} = 2x T_j - T_{j-1}
                let mut next = vec![Float::new(bits); t_cur.len() + 1];
                for (i, t) in t_cur.iter().enumerate() {
                    next[i + 1] += Float::with_val(bits, t * 2u32);
                }
                for (i, t) in t_prev.iter().enumerate() {
                    next[i] -= t;
                }
                t_prev = std::mem::replace(&mut t_cur, next);
            }
        }
        Self::new(out)
    }
}

/// Clenshaw evaluation of a Chebyshev series in `f64`.
pub(crate) fn clenshaw(c: &[f64], x: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c.first().copied().unwrap_or(0.0) + x * b1 - b2
}

/// Monic polynomial with the given roots.
pub fn node_polynomial(nodes: &[Float], prec: Precision) -> Result<Polynomial> {
    check_nodes(nodes)?;
    let bits = prec.bits();
    let mut c = vec![prec.one()];
    for x in nodes {
        let mut next = vec![Float::new(bits); c.len() + 1];
        for (k, ck) in c.iter().enumerate() {
            next[k + 1] += ck;
            next[k] -= Float::with_val(bits, ck * x);
        }
        c = next;
    }
    Ok(Polynomial::new(c))
}

/// Nodes must lie in [-1, 1] and be pairwise distinct.
pub(crate) fn check_nodes(nodes: &[Float]) -> Result<()> {
    for x in nodes {
        if !x.is_finite() || *x < -1 || *x > 1 {
            return Err(Error::Domain(format!("node {} outside [-1, 1]", x.to_f64())));
        }
    }
    let mut sorted: Vec<&Float> = nodes.iter().collect();
    sorted.sort_by(|a, b| cmp_float(a, b));
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Domain(format!("duplicate node {}", w[0].to_f64())));
    }
    Ok(())
}

/// `sup_{[-1,1]} |P|`, relative accuracy about `1e-12`.
pub fn poly_sup_norm(p: &Polynomial, prec: Precision) -> Float {
    if p.is_zero() {
        return prec.zero();
    }
    if p.degree() == 0 {
        return Float::with_val(prec.bits(), p.coeffs[0].abs_ref());
    }
    let cheb: Vec<f64> = p.to_chebyshev().iter().map(Float::to_f64).collect();
    let grid = chebyshev_grid(4096.max(64 * p.degree()));
    let coarse: Vec<f64> = grid.iter().map(|&x| clenshaw(&cheb, x).abs()).collect();
    let fine = |x: f64| Ok(p.eval(&prec.float(x)).abs());
    refine_sup(&grid, &coarse, fine, 4, 1, 8, 1e-13)
        .map(|r| r.value)
        .unwrap_or_else(|_| prec.zero())
}

/// `(∫_{-1}^{1} P²)^{1/2}` from exact monomial cross-integrals.
pub fn poly_l2_norm(p: &Polynomial, prec: Precision) -> Float {
    let bits = prec.bits();
    let c = p.coeffs();
    let mut acc = Float::new(bits);
    for (i, a) in c.iter().enumerate() {
        for (j, b) in c.iter().enumerate() {
            if (i + j) % 2 == 0 {
                let mut t = Float::with_val(bits, a * b);
                t *= 2u32;
                t /= (i + j + 1) as u32;
                acc += t;
            }
        }
    }
    acc.max(&Float::new(bits)).sqrt()
}

/// Degree-`n` polynomial with values drawn uniformly from [-1, 1] at the
/// extrema of `T_n` (so it satisfies the two-sided Markov hypothesis).
pub fn random_admissible_polynomial<R: Rng + ?Sized>(n: usize, rng: &mut R, prec: Precision) -> Polynomial {
    let bits = prec.bits();
    if n == 0 {
        return Polynomial::new(vec![prec.float(rng.random_range(-1.0..=1.0))]);
    }
    let values: Vec<Float> = (0..=n).map(|_| prec.float(rng.random_range(-1.0..=1.0))).collect();
    // Discrete cosine transform on the extrema grid; cos(π m/n) depends on m mod 2n.
    let pi = prec.pi();
    let cos: Vec<Float> = (0..2 * n)
        .map(|m| (Float::with_val(bits, &pi * m as u64) / n as u64).cos())
        .collect();
    let mut c = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let mut s = Float::new(bits);
        for (k, v) in values.iter().enumerate() {
            let mut t = Float::with_val(bits, v * &cos[(j * k) % (2 * n)]);
            if k == 0 || k == n {
                t /= 2u32;
            }
            s += t;
        }
        s *= 2u32;
        s /= n as u64;
        if j == 0 || j == n {
            s /= 2u32;
        }
        c.push(s);
    }
    Polynomial::from_chebyshev(&c, prec)
}

/// Degree-`n` polynomial with independent uniform coefficients in [-1, 1].
pub fn random_polynomial<R: Rng + ?Sized>(n: usize, rng: &mut R, prec: Precision) -> Polynomial {
    let mut c: Vec<Float> = (0..=n).map(|_| prec.float(rng.random_range(-1.0..=1.0))).collect();
    if c[n].is_zero() {
        c[n] = prec.one();
    }
    Polynomial::new(c)
}
