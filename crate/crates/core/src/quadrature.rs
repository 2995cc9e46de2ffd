//! Gauss-Legendre rules on [-1, 1] in working precision, cached per (order, bits).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::Float;

use crate::error::{Error, Result};
use crate::precision::Precision;

/// Nodes and weights of an `m`-point rule, nodes ascending.
#[derive(Debug)]
pub struct GaussRule {
    pub nodes: Vec<Float>,
    pub weights: Vec<Float>,
}

type Cache = Mutex<HashMap<(usize, u32), Arc<GaussRule>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// `P_m(x)` and `P_m'(x)` via the three-term recurrence.
fn legendre_with_derivative(m: usize, x: &Float, bits: u32) -> (Float, Float) {
    let mut p0 = Float::with_val(bits, 1);
    let mut p1 = x.clone();
    for k in 2..=m {
        // k P_k = (2k-1) x P_{k-1} - (k-1) P_{k-2}
        let mut p2 = Float::with_val(bits, x * &p1);
        p2 *= (2 * k - 1) as u32;
        p2 -= Float::with_val(bits, &p0 * (k - 1) as u32);
        p2 /= k as u32;
        p0 = p1;
        p1 = p2;
    }
    // P_m' = m (x P_m - P_{m-1}) / (x^2 - 1)
    let mut num = Float::with_val(bits, x * &p1);
    num -= &p0;
    num *= m as u32;
    let mut den = Float::with_val(bits, x.square_ref());
    den -= 1u32;
    (p1, num / den)
}

/// The `m`-point Gauss-Legendre rule.
pub fn gauss_legendre(m: usize, prec: Precision) -> Result<Arc<GaussRule>> {
    if m == 0 {
        return Err(Error::Domain("quadrature order must be positive".into()));
    }
    let bits = prec.bits();
    if let Some(r) = cache().lock().expect("quadrature cache poisoned").get(&(m, bits)) {
        return Ok(r.clone());
    }
    let eps = Float::with_val(bits, Float::i_exp(1, -(bits as i32) + 8));
    let half = m.div_ceil(2);
    let mut pos_nodes = Vec::with_capacity(half);
    let mut pos_weights = Vec::with_capacity(half);
    for i in 1..=half {
        let guess = (std::f64::consts::PI * (i as f64 - 0.25) / (m as f64 + 0.5)).cos();
        let mut x = Float::with_val(bits, guess);
        let mut converged = false;
        let mut dp = Float::new(bits);
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, &x, bits);
            let step = Float::with_val(bits, &p / &d);
            x -= &step;
            dp = d;
            if step.abs() <= eps {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numerical(format!(
                "Gauss-Legendre Newton iteration did not converge (m={m}, node {i})"
            )));
        }
        let (_, d) = legendre_with_derivative(m, &x, bits);
        dp = if d.is_finite() { d } else { dp };
        // w = 2 / ((1 - x^2) P_m'(x)^2)
        let mut w = Float::with_val(bits, 1);
        w -= Float::with_val(bits, x.square_ref());
        w *= Float::with_val(bits, dp.square_ref());
        let w = Float::with_val(bits, 2) / w;
        pos_nodes.push(x);
        pos_weights.push(w);
    }
    // pos_nodes are descending positive (or zero for the middle node of odd m).
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for (x, w) in pos_nodes.iter().zip(&pos_weights) {
        nodes.push(Float::with_val(bits, -x));
        weights.push(w.clone());
    }
    let mirror = if m % 2 == 1 { half - 1 } else { half };
    for i in (0..mirror).rev() {
        nodes.push(pos_nodes[i].clone());
        weights.push(pos_weights[i].clone());
    }
    if m % 2 == 1 {
        nodes[half - 1] = Float::new(bits);
    }
    let rule = Arc::new(GaussRule { nodes, weights });
    cache()
        .lock()
        .expect("quadrature cache poisoned")
        .insert((m, bits), rule.clone());
    Ok(rule)
}

/// `∫_{-1}^{1} f` with order doubling until two successive values agree to `rel_tol`.
pub fn integrate_adaptive<F>(f: F, start: usize, max_order: usize, rel_tol: f64, prec: Precision) -> Result<Float>
where
    F: Fn(&Float) -> Result<Float>,
{
    let mut m = start.max(2);
    let mut prev: Option<Float> = None;
    while m <= max_order {
        let rule = gauss_legendre(m, prec)?;
        let mut acc = prec.zero();
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            acc += f(x)? * w;
        }
        if let Some(p) = prev {
            let diff = Float::with_val(prec.bits(), &acc - &p).abs();
            let scale = Float::with_val(prec.bits(), acc.abs_ref());
            if diff <= scale * rel_tol || diff.is_zero() {
                return Ok(acc);
            }
        }
        prev = Some(acc);
        m *= 2;
    }
    Err(Error::Numerical(format!(
        "quadrature did not converge to relative {rel_tol:e} up to order {max_order}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let p = Precision::default();
        let rule = gauss_legendre(7, p).unwrap();
        // ∫ x^12 = 2/13, exact for 2m-1 = 13
        let mut acc = p.zero();
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            acc += Float::with_val(p.bits(), rug::ops::Pow::pow(x, 12u32)) * w;
        }
        let exact = Float::with_val(p.bits(), 2) / 13u32;
        assert!((acc - exact).abs() < 1e-55);
        assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(rule.nodes[3].is_zero());
    }

    #[test]
    fn adaptive_gaussian() {
        let p = Precision::default();
        let v = integrate_adaptive(|x| Ok((-Float::with_val(p.bits(), x.square_ref())).exp()), 8, 512, 1e-40, p).unwrap();
        // ∫_{-1}^{1} e^{-x²} = √π erf(1)
        let exact = p.pi().sqrt() * p.one().erf();
        assert!((v - exact).abs() < 1e-40);
    }
}
