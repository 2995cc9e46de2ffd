use rug::Float;

use super::Polynomial;
use crate::precision::Precision;

/// Chebyshev polynomial `T_n` with its roots and extrema.
#[derive(Debug, Clone)]
pub struct ChebyshevData {
    pub n: usize,
    /// Non-zero coefficients `(power, t_{n,power})`, highest power first.
    pub coefficients: Vec<(usize, Float)>,
    /// Roots `cos(π(k - 1/2)/n)`, strictly decreasing.
    pub nodes: Vec<Float>,
    /// Extrema `cos(πk/n)`, `k = 0..=n`, strictly decreasing.
    pub extrema: Vec<Float>,
}

impl ChebyshevData {
    /// `T_n` in the dense monomial basis.
    pub fn polynomial(&self) -> Polynomial {
        let bits = self.coefficients[0].1.prec();
        let mut c = vec![Float::new(bits); self.n + 1];
        for (pw, v) in &self.coefficients {
            c[*pw] = v.clone();
        }
        Polynomial::new(c)
    }

    /// `t_{n,power}`; zero for powers of the wrong parity.
    pub fn coefficient(&self, power: usize) -> Float {
        let bits = self.coefficients[0].1.prec();
        self.coefficients
            .iter()
            .find(|(p, _)| *p == power)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| Float::new(bits))
    }
}

/// `t_{n,n-2k} = (-1)^k 2^{n-2k-1} n (n-k-1)! / (k! (n-2k)!)`, via log-magnitudes.
pub fn chebyshev_coefficient(n: usize, k: usize, prec: Precision) -> Float {
    assert!(2 * k <= n, "index k={k} out of range for n={n}");
    if n == 0 {
        return prec.one();
    }
    let bits = prec.bits();
    let e = n - 2 * k;
    let mut ln = Float::with_val(bits, 2u32).ln() * (e as i64 - 1);
    ln += Float::with_val(bits, n as u64).ln();
    ln += prec.ln_factorial((n - k - 1) as u64);
    ln -= prec.ln_factorial(k as u64);
    ln -= prec.ln_factorial(e as u64);
    let mag = ln.exp();
    if k % 2 == 1 {
        -mag
    } else {
        mag
    }
}

pub fn chebyshev(n: usize, prec: Precision) -> ChebyshevData {
    let coefficients = (0..=n / 2).map(|k| (n - 2 * k, chebyshev_coefficient(n, k, prec))).collect();
    ChebyshevData {
        n,
        coefficients,
        nodes: chebyshev_nodes(n, prec),
        extrema: chebyshev_extrema(n, prec),
    }
}

/// `cos(π(k - 1/2)/n)` for `k = 1..=n`.
pub fn chebyshev_nodes(n: usize, prec: Precision) -> Vec<Float> {
    let bits = prec.bits();
    let pi = prec.pi();
    (1..=n)
        .map(|k| {
            let mut a = Float::with_val(bits, &pi * (2 * k - 1) as u64);
            a /= (2 * n) as u64;
            a.cos()
        })
        .collect()
}

/// `cos(πk/n)` for `k = 0..=n` (just `[1]` when `n = 0`).
pub fn chebyshev_extrema(n: usize, prec: Precision) -> Vec<Float> {
    if n == 0 {
        return vec![prec.one()];
    }
    let bits = prec.bits();
    let pi = prec.pi();
    (0..=n)
        .map(|k| {
            if 2 * k == n {
                return prec.zero();
            }
            let mut a = Float::with_val(bits, &pi * k as u64);
            a /= n as u64;
            a.cos()
        })
        .collect()
}

/// `T_n` from `T_{n+1} = 2x T_n - T_{n-1}`.
pub fn chebyshev_by_recurrence(n: usize, prec: Precision) -> Polynomial {
    let bits = prec.bits();
    let mut prev = vec![prec.one()];
    if n == 0 {
        return Polynomial::new(prev);
    }
    let mut cur = vec![prec.zero(), prec.one()];
    for _ in 1..n {
        let mut next = vec![Float::new(bits); cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += Float::with_val(bits, c * 2u32);
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= c;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    Polynomial::new(cur)
}

/// Outcome of [`markov_envelope_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovReport {
    /// False when `|P| ≤ 1` fails at some extremum of `T_n`.
    pub applicable: bool,
    pub holds: bool,
    /// Pair index `k` with the largest ratio `(|a_{n-2k}| + |a_{n-2k-1}|)/|t_{n,n-2k}|`.
    pub worst_pair: usize,
    pub worst_ratio: f64,
}

/// Checks `|a_{n-2k}| + |a_{n-2k-1}| ≤ |t_{n,n-2k}|` and, for even `n`, `|a_0| ≤ 1`.
pub fn markov_envelope_check(p: &Polynomial, prec: Precision) -> MarkovReport {
    let n = p.degree();
    let bits = prec.bits();
    let tol = prec.tolerance();
    let admissible = chebyshev_extrema(n, prec)
        .iter()
        .all(|x| p.eval(x).abs().to_f64() <= 1.0 + tol);
    if !admissible {
        return MarkovReport {
            applicable: false,
            holds: false,
            worst_pair: 0,
            worst_ratio: f64::NAN,
        };
    }
    let a = |i: usize| -> Float {
        p.coeffs()
            .get(i)
            .map(|c| Float::with_val(bits, c.abs_ref()))
            .unwrap_or_else(|| Float::new(bits))
    };
    let mut worst_pair = 0;
    let mut worst_ratio = 0.0f64;
    if n >= 1 {
        for k in 0..=(n - 1) / 2 {
            let lhs = a(n - 2 * k) + a(n - 2 * k - 1);
            let t = chebyshev_coefficient(n, k, prec).abs();
            let ratio = (lhs / t).to_f64();
            if ratio > worst_ratio {
                worst_ratio = ratio;
                worst_pair = k;
            }
        }
    }
    if n % 2 == 0 {
        let r = a(0).to_f64();
        if r > worst_ratio {
            worst_ratio = r;
            worst_pair = n / 2;
        }
    }
    MarkovReport {
        applicable: true,
        holds: worst_ratio <= 1.0 + tol,
        worst_pair,
        worst_ratio,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::default()
    }

    #[test]
    fn small_degrees() {
        assert_eq!(chebyshev(0, p()).polynomial(), Polynomial::from_f64(&[1.0], p()));
        let t3 = chebyshev(3, p()).polynomial();
        let expect = Polynomial::from_f64(&[0.0, -3.0, 0.0, 4.0], p());
        for (a, b) in t3.coeffs().iter().zip(expect.coeffs()) {
            assert!(Float::with_val(200, a - b).abs() < 1e-50);
        }
        assert!((chebyshev(5, p()).coefficient(5) - 16u32).abs() < 1e-50);
    }

    #[test]
    fn closed_form_matches_recurrence() {
        for n in 0..=64 {
            let a = chebyshev(n, p()).polynomial();
            let b = chebyshev_by_recurrence(n, p());
            assert_eq!(a.degree(), b.degree());
            for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
                let d = Float::with_val(p().bits(), x - y).abs();
                assert!(d <= Float::with_val(p().bits(), y.abs_ref()) * 1e-30, "n={n}");
            }
        }
    }

    #[test]
    fn roots_and_extrema() {
        for n in 1..=64 {
            let d = chebyshev(n, p());
            let t = d.polynomial();
            assert!(d.nodes.windows(2).all(|w| w[0] > w[1]));
            assert!(d.nodes.iter().all(|x| *x < 1 && *x > -1));
            for x in &d.nodes {
                assert!(t.eval(x).abs() < 1e-30, "n={n}");
            }
            for x in &d.extrema {
                assert!((t.eval(x).abs() - 1u32).abs() < 1e-30, "n={n}");
            }
            assert_eq!(d.extrema[0], 1);
            assert_eq!(d.extrema[n], -1);
        }
    }

    #[test]
    fn markov_examples() {
        let t3 = chebyshev(3, p()).polynomial();
        let r = markov_envelope_check(&t3, p());
        assert!(r.applicable && r.holds);
        assert!((r.worst_ratio - 1.0).abs() < 1e-12);

        let one = Polynomial::from_f64(&[1.0], p());
        assert!(markov_envelope_check(&one, p()).holds);

        let half = p().float(0.5);
        let mix = chebyshev(4, p()).polynomial().scale(&half).add(&chebyshev(2, p()).polynomial().scale(&half));
        let r = markov_envelope_check(&mix, p());
        assert!(r.applicable && r.holds);

        let big = Polynomial::from_f64(&[0.0, 0.0, 3.0], p());
        assert!(!markov_envelope_check(&big, p()).applicable);
    }
}
