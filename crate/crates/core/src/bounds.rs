//! Explicit constants and worst-case error bounds, all in natural-log domain.

use rug::Float;

use crate::classical::{chebyshev_coefficient, labelle_constant, laguerre_c_tilde, laguerre_m_tilde};
use crate::error::{Error, Result};
use crate::kernels::{ck2n_gaussian, cr2n_exact, WeightFunction};
use crate::precision::{ln_sum_exp, ln_to_log10, Precision};
use crate::quadrature::gauss_legendre;
use crate::search::{chebyshev_grid, refine_sup};
use crate::sequences::{AlphaSequence, Family};
use crate::Norm;

/// `c_L(λ) = e^{-3λ/2 + 2√λ} / (2√π λ^{1/4}) · (3 + √(π/e) + 2/(√π λ^{1/4}) + 7/(16√λ) + √λ(2+λ))`.
pub fn c_l(lambda: &Float, prec: Precision) -> Float {
    let shift = Float::with_val(prec.bits(), -lambda).exp();
    laguerre_c_tilde(lambda, prec) * shift
}

/// `m_L(λ) = max{5λ, λ(1+λ/2)², 9/λ}`.
pub fn m_l(lambda: &Float, prec: Precision) -> Float {
    laguerre_m_tilde(lambda, prec)
}

/// Smallest integer `n ≥ m_L(λ)`.
pub fn first_applicable_n(lambda: &Float, prec: Precision) -> usize {
    let m = m_l(lambda, prec);
    m.ceil().to_f64().max(1.0) as usize
}

pub fn tau1(prec: Precision) -> Float {
    prec.float(0.25)
}

/// `τ₂ = e^{λ²/16} / 2`.
pub fn tau2(lambda: &Float, prec: Precision) -> Float {
    let e = Float::with_val(prec.bits(), lambda.square_ref()) / 16u32;
    e.exp() / 2u32
}

/// `ℓ₁ = 1/(2πe²)`.
pub fn ell1(prec: Precision) -> Float {
    let e2 = prec.float(2).exp();
    prec.one() / (prec.pi() * 2u32 * e2)
}

/// `ℓ₂ = 9e⁶/(2π) (1 + λ/4) e^{λ²/16}`.
pub fn ell2(lambda: &Float, prec: Precision) -> Float {
    let bits = prec.bits();
    let mut v = prec.float(6).exp() * 9u32;
    v /= prec.pi() * 2u32;
    v *= Float::with_val(bits, lambda / 4u32) + 1u32;
    v * (Float::with_val(bits, lambda.square_ref()) / 16u32).exp()
}

/// The constants `c₁`, `c₂` of the minimal-error theorems.
#[derive(Debug, Clone)]
pub struct TheoremConstants {
    pub c1: Float,
    pub c2: Float,
}

pub fn theorem_constants(lambda: &Float, phi_min: &Float, phi_max: &Float, norm: Norm, prec: Precision) -> TheoremConstants {
    let bits = prec.bits();
    let damp = (-Float::with_val(bits, lambda.square_ref()) / 32u32).exp();
    let cl = c_l(lambda, prec);
    match norm {
        Norm::Sup => {
            let lead = (prec.float(2) / (Float::with_val(bits, lambda + 1u32))).sqrt();
            TheoremConstants {
                c1: lead * damp * phi_min,
                c2: cl.sqrt() * 2u32 * phi_max,
            }
        }
        Norm::L2 => {
            let mut lead = (prec.pi() * 2u32).sqrt() * 2u32;
            lead /= prec.float(3).exp() * 3u32 * Float::with_val(bits, lambda + 4u32).sqrt();
            TheoremConstants {
                c1: lead * damp * phi_min,
                c2: (cl * 2u32).sqrt() * 2u32 * phi_max,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    MinUniform,
    AnyUniform,
    TaylorUniform,
    MinL2,
    AnyL2,
    CorollaryGaussian,
    CorollaryExponential,
    CorollaryHermite,
    CorollaryBessel,
}

/// Lower and upper bound for one `n`, natural logs.
#[derive(Debug, Clone)]
pub struct TheoremBounds {
    pub theorem: Theorem,
    pub n: usize,
    pub ln_lower: Float,
    pub ln_upper: Float,
    /// `n ≥ m_L(λ)`.
    pub applicable: bool,
}

impl TheoremBounds {
    pub fn log10_lower(&self) -> f64 {
        ln_to_log10(&self.ln_lower)
    }

    pub fn log10_upper(&self) -> f64 {
        ln_to_log10(&self.ln_upper)
    }
}

fn lambda_of(seq: &AlphaSequence, prec: Precision) -> Result<Float> {
    seq.lambda(prec)
        .ok_or_else(|| Error::NotApplicable(format!("{} has no lambda certificate", seq.family())))
}

fn require_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Domain("bounds need n >= 1".into()))
    } else {
        Ok(())
    }
}

fn applicable(n: usize, lambda: &Float, prec: Precision) -> bool {
    prec.float(n as u64) >= m_l(lambda, prec)
}

/// `ln(n^{-1/8} e^{√(λn)})`.
fn growth(lambda: &Float, n: usize, prec: Precision) -> Float {
    let bits = prec.bits();
    let nf = prec.float(n as u64);
    let mut v = Float::with_val(bits, lambda * &nf).sqrt();
    v -= nf.ln() / 8u32;
    v
}

fn ln2(prec: Precision) -> Float {
    prec.float(2).ln()
}

/// Bounds on the `n`th minimal error in the chosen norm.
pub fn min_error_bounds(seq: &AlphaSequence, phi: &WeightFunction, norm: Norm, n: usize, prec: Precision) -> Result<TheoremBounds> {
    require_n(n)?;
    let lambda = lambda_of(seq, prec)?;
    let c = theorem_constants(&lambda, &phi.phi_min(prec), &phi.phi_max(prec), norm, prec);
    let mut base = -(ln2(prec) * n as u64);
    base -= seq.log_alpha(n, prec) / 2u32;
    let ln_lower = c.c1.ln() + &base;
    let ln_upper = c.c2.ln() + growth(&lambda, n, prec) + &base;
    Ok(TheoremBounds {
        theorem: match norm {
            Norm::Sup => Theorem::MinUniform,
            Norm::L2 => Theorem::MinL2,
        },
        n,
        ln_lower,
        ln_upper,
        applicable: applicable(n, &lambda, prec),
    })
}

/// `ln((c₂/2) n^{-1/8 - [1/2 for L²]} e^{√(λn)} 2^n α_n^{-1/2})`.
pub fn fixed_nodes_upper(seq: &AlphaSequence, phi: &WeightFunction, norm: Norm, n: usize, prec: Precision) -> Result<Float> {
    require_n(n)?;
    let lambda = lambda_of(seq, prec)?;
    let c = theorem_constants(&lambda, &phi.phi_min(prec), &phi.phi_max(prec), norm, prec);
    let mut v = (c.c2 / 2u32).ln();
    v += growth(&lambda, n, prec);
    if norm == Norm::L2 {
        v -= prec.float(n as u64).ln() / 2u32;
    }
    v += ln2(prec) * n as u64;
    v -= seq.log_alpha(n, prec) / 2u32;
    Ok(v)
}

/// Lower bound of the minimal error with the arbitrary-node upper bound.
pub fn fixed_nodes_bounds(seq: &AlphaSequence, phi: &WeightFunction, norm: Norm, n: usize, prec: Precision) -> Result<TheoremBounds> {
    let min = min_error_bounds(seq, phi, norm, n, prec)?;
    Ok(TheoremBounds {
        theorem: match norm {
            Norm::Sup => Theorem::AnyUniform,
            Norm::L2 => Theorem::AnyL2,
        },
        ln_upper: fixed_nodes_upper(seq, phi, norm, n, prec)?,
        ..min
    })
}

/// Bounds for the weighted Taylor approximation of order `n` at `a`.
pub fn taylor_bounds(seq: &AlphaSequence, phi: &WeightFunction, a: f64, n: usize, prec: Precision) -> Result<TheoremBounds> {
    if !(a.abs() < 1.0) {
        return Err(Error::Domain(format!("Taylor point must satisfy |a| < 1, got {a}")));
    }
    require_n(n)?;
    let bits = prec.bits();
    let lambda = lambda_of(seq, prec)?;
    let aa = prec.float(a.abs());
    let ln1a = Float::with_val(bits, &aa + 1u32).ln();
    let half_alpha = seq.log_alpha(n, prec) / 2u32;

    let mut den = Float::with_val(bits, aa.square_ref()) * &lambda;
    den += 1u32;
    let mut ln_lower = phi.phi_min(prec).ln();
    ln_lower += Float::with_val(bits, &ln1a - den.ln() / 2u32) * n as u64;
    ln_lower -= &half_alpha;

    let mut ln_upper = phi.phi_max(prec).ln();
    ln_upper += c_l(&lambda, prec).ln() / 2u32;
    ln_upper += growth(&lambda, n, prec);
    ln_upper += ln1a * n as u64;
    ln_upper -= &half_alpha;

    Ok(TheoremBounds {
        theorem: Theorem::TaylorUniform,
        n,
        ln_lower,
        ln_upper,
        applicable: applicable(n, &lambda, prec),
    })
}

/// Family-specific closed forms: `(λ, ln c₁, ln rate, ln fixed-node rate)`.
struct CorollaryParts {
    theorem: Theorem,
    lambda: Float,
    ln_c1: Float,
    ln_c2: Float,
    /// `√(λn)` written in the family's own parameters.
    root: Float,
    ln_rate: Float,
    ln_fixed_rate: Float,
}

fn corollary_parts(family: Family, norm: Norm, n: usize, prec: Precision) -> Result<CorollaryParts> {
    let bits = prec.bits();
    let f = |v: f64| prec.float(v);
    let nf = f(n as f64);
    let sqrt_n = Float::with_val(bits, nf.sqrt_ref());
    let lnfact = prec.ln_factorial(n as u64);
    let ln2 = ln2(prec);
    // (theorem, λ, rate base b in b^n, c1 exponent for the non-λ part, factorial power)
    let (theorem, lambda, base, root, extra_damp, fact_pow) = match family {
        Family::Gaussian { epsilon } => {
            let e = f(epsilon);
            let lam = Float::with_val(bits, e.square_ref());
            let damp = Float::with_val(bits, &lam / 2u32);
            (Theorem::CorollaryGaussian, lam, e.clone(), e * &sqrt_n, damp, 1u32)
        }
        Family::Exponential { epsilon } => {
            let e = f(epsilon);
            let se = Float::with_val(bits, e.sqrt_ref());
            (Theorem::CorollaryExponential, e, se.clone(), se * &sqrt_n, prec.zero(), 1)
        }
        Family::Hermite { epsilon, tau } => {
            let te = f(tau) * f(epsilon);
            let lam = Float::with_val(bits, te.square_ref());
            let damp = f(epsilon).square() / 2u32;
            (Theorem::CorollaryHermite, lam, te.clone(), te * &sqrt_n, damp, 1)
        }
        Family::Bessel { epsilon } => {
            let e = f(epsilon);
            let se = Float::with_val(bits, e.sqrt_ref());
            (Theorem::CorollaryBessel, e, se.clone(), se * &sqrt_n, prec.zero(), 2)
        }
        Family::Power { .. } => {
            return Err(Error::NotApplicable("no corollary for the power family".into()));
        }
    };
    let lam2 = Float::with_val(bits, lambda.square_ref()) / 32u32;
    let ln_c1 = match norm {
        Norm::Sup => {
            let mut v = (f(2.0) / Float::with_val(bits, &lambda + 1u32)).ln() / 2u32;
            v -= &lam2;
            v -= &extra_damp;
            v
        }
        Norm::L2 => {
            let mut v = (prec.pi() * 2u32).sqrt().ln() + &ln2;
            v -= f(3.0).ln() + 3u32;
            v -= Float::with_val(bits, &lambda + 4u32).ln() / 2u32;
            v -= &lam2;
            v -= &extra_damp;
            v
        }
    };
    let cl = c_l(&lambda, prec);
    let ln_c2 = match norm {
        Norm::Sup => cl.ln() / 2u32 + &ln2,
        Norm::L2 => (cl * 2u32).ln() / 2u32 + &ln2,
    };
    let ln_base = base.ln();
    let fact_term = Float::with_val(bits, &lnfact * fact_pow) / 2u32;
    let ln_rate = Float::with_val(bits, &ln_base - &ln2) * n as u64 - &fact_term;
    let ln_fixed_rate = Float::with_val(bits, &ln_base + &ln2) * n as u64 - &fact_term;
    Ok(CorollaryParts {
        theorem,
        lambda,
        ln_c1,
        ln_c2,
        root,
        ln_rate,
        ln_fixed_rate,
    })
}

/// Minimal-error bounds from the per-family closed forms.
pub fn corollary_bounds(family: Family, norm: Norm, n: usize, prec: Precision) -> Result<TheoremBounds> {
    require_n(n)?;
    let parts = corollary_parts(family, norm, n, prec)?;
    let ln_n8 = prec.float(n as u64).ln() / 8u32;
    let ln_lower = parts.ln_c1 + &parts.ln_rate;
    let ln_upper = parts.ln_c2 - ln_n8 + parts.root + parts.ln_rate;
    Ok(TheoremBounds {
        theorem: parts.theorem,
        n,
        ln_lower,
        ln_upper,
        applicable: applicable(n, &parts.lambda, prec),
    })
}

/// Arbitrary-node upper bound from the per-family closed forms.
pub fn corollary_fixed_nodes_upper(family: Family, norm: Norm, n: usize, prec: Precision) -> Result<Float> {
    require_n(n)?;
    let parts = corollary_parts(family, norm, n, prec)?;
    let nf = prec.float(n as u64).ln();
    let mut v = parts.ln_c2 - ln2(prec);
    v -= Float::with_val(prec.bits(), &nf / 8u32);
    if norm == Norm::L2 {
        v -= nf / 2u32;
    }
    Ok(v + parts.root + parts.ln_fixed_rate)
}

/// `ln Σ_k α_{n-2k} t²_{n,n-2k}` (the squared norm of `φ T_n`).
pub fn chebyshev_norm_sum(seq: &AlphaSequence, n: usize, prec: Precision) -> Float {
    let terms: Vec<Float> = (0..=n / 2)
        .map(|k| {
            let t = chebyshev_coefficient(n, k, prec).abs().ln();
            seq.log_alpha(n - 2 * k, prec) + t * 2u32
        })
        .collect();
    ln_sum_exp(&terms, prec)
}

/// `ln Σ_k α_k l²_{n,k}`.
pub fn labelle_norm_sum(seq: &AlphaSequence, n: usize, prec: Precision) -> Result<Float> {
    let terms = (0..=n)
        .map(|k| Ok(seq.log_alpha(k, prec) + labelle_constant(n, k, prec)?.ln() * 2u32))
        .collect::<Result<Vec<Float>>>()?;
    Ok(ln_sum_exp(&terms, prec))
}

/// `α_{n-2} t²_{n,n-2} / (α_n t²_{n,n})`: bounded iff the sequence grows at least factorially.
pub fn chebyshev_domination_ratio(seq: &AlphaSequence, n: usize, prec: Precision) -> Result<Float> {
    if n < 2 {
        return Err(Error::Domain("domination ratio needs n >= 2".into()));
    }
    let t0 = chebyshev_coefficient(n, 0, prec).abs().ln();
    let t1 = chebyshev_coefficient(n, 1, prec).abs().ln();
    let ln = seq.log_alpha(n - 2, prec) - seq.log_alpha(n, prec) + (t1 - t0) * 2u32;
    Ok(ln.exp())
}

/// `α_{n-2} l²_{n,n-2} / (α_n l²_{n,n})`.
pub fn labelle_domination_ratio(seq: &AlphaSequence, n: usize, prec: Precision) -> Result<Float> {
    if n < 2 {
        return Err(Error::Domain("domination ratio needs n >= 2".into()));
    }
    let l0 = labelle_constant(n, n, prec)?.ln();
    let l1 = labelle_constant(n, n - 2, prec)?.ln();
    let ln = seq.log_alpha(n - 2, prec) - seq.log_alpha(n, prec) + (l1 - l0) * 2u32;
    Ok(ln.exp())
}

/// Error-estimate constants for polynomial versus weighted polynomial
/// interpolation of the Gaussian kernel (the common node-polynomial factor
/// omitted): `(ln √C_K^{2n}/n!, ln φ_max √C_R^{2n}/n!)`.
pub fn interpolation_estimates(epsilon: f64, n: usize, prec: Precision) -> Result<(Float, Float)> {
    let seq = AlphaSequence::new(Family::Gaussian { epsilon })?;
    let lnfact = prec.ln_factorial(n as u64);
    let unweighted = ck2n_gaussian(epsilon, n, prec) / 2u32 - &lnfact;
    let tol = 10f64.powi(-(prec.digits() as i32 - 10));
    let weighted = cr2n_exact(&seq, n, tol, prec)? / 2u32 - lnfact;
    Ok((unweighted, weighted))
}

/// Least-squares slope of `ys` against `xs`; `None` with fewer than two points.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `‖f‖_p / ‖f‖_{K₂}` for `f(x,y) = φ(x)φ(y)(x²+y²-1)` and the tensor
/// Gaussian kernel on [-1,1]². `f` vanishes at every one of the `n` points
/// placed on the unit circle, so the ratio bounds `e_p` from below for any
/// algorithm using them.
pub fn multivariate_witness(epsilon: f64, n: usize, norm: Norm, prec: Precision) -> Result<Float> {
    if n == 0 {
        return Err(Error::Domain("multivariate witness needs n >= 1".into()));
    }
    let seq = AlphaSequence::new(Family::Gaussian { epsilon })?;
    let phi = WeightFunction::gaussian(epsilon)?;
    let bits = prec.bits();
    let p = |x: &Float, y: &Float| -> Float {
        let mut s = Float::with_val(bits, x.square_ref());
        s += Float::with_val(bits, y.square_ref());
        s -= 1u32;
        s * phi.eval(x, prec) * phi.eval(y, prec)
    };
    // The witness vanishes on the circle, independent of where the n points sit.
    let two_pi = prec.pi() * 2u32;
    for j in 0..n {
        let t = Float::with_val(bits, &two_pi * j as u64) / n as u64;
        let (s, c) = t.sin_cos(Float::new(bits));
        let v = p(&c, &s).abs().to_f64();
        if v > prec.tolerance() {
            return Err(Error::Numerical(format!("witness does not vanish on the circle ({v:e})")));
        }
    }
    // Tensor coefficients (2,0):1, (0,2):1, (0,0):-1.
    let a2 = seq.log_alpha(2, prec).exp();
    let a0 = seq.log_alpha(0, prec).exp();
    let knorm = (Float::with_val(bits, &a2 * &a0) * 2u32 + Float::with_val(bits, a0.square_ref())).sqrt();

    let pnorm = match norm {
        Norm::Sup => {
            let grid = chebyshev_grid(257);
            let fine_xy = |x: f64, y: f64| p(&prec.float(x), &prec.float(y)).abs();
            let mut best = (0usize, 0usize, 0.0f64);
            for (i, &x) in grid.iter().enumerate() {
                for (j, &y) in grid.iter().enumerate() {
                    let v = fine_xy(x, y).to_f64();
                    if v > best.2 {
                        best = (i, j, v);
                    }
                }
            }
            let (mut x, mut y) = (grid[best.0], grid[best.1]);
            let mut val = fine_xy(x, y);
            // Alternate one-dimensional refinements along each axis.
            for _ in 0..3 {
                let coarse: Vec<f64> = grid.iter().map(|&t| fine_xy(t, y).to_f64()).collect();
                let r = refine_sup(&grid, &coarse, |t| Ok(fine_xy(t, y)), 2, 3, 6, 1e-14)?;
                if r.value > val {
                    x = r.x;
                    val = r.value;
                }
                let coarse: Vec<f64> = grid.iter().map(|&t| fine_xy(x, t).to_f64()).collect();
                let r = refine_sup(&grid, &coarse, |t| Ok(fine_xy(x, t)), 2, 3, 6, 1e-14)?;
                if r.value > val {
                    y = r.x;
                    val = r.value;
                }
            }
            val
        }
        Norm::L2 => {
            let mut prev: Option<Float> = None;
            let mut result = None;
            let mut m = 16;
            while m <= 256 {
                let rule = gauss_legendre(m, prec)?;
                let mut acc = prec.zero();
                for (x, wx) in rule.nodes.iter().zip(&rule.weights) {
                    for (y, wy) in rule.nodes.iter().zip(&rule.weights) {
                        acc += p(x, y).square() * wx * wy;
                    }
                }
                if let Some(pv) = &prev {
                    let d = Float::with_val(bits, &acc - pv).abs();
                    if d <= Float::with_val(bits, &acc * 1e-12) {
                        result = Some(acc.sqrt());
                        break;
                    }
                }
                prev = Some(acc);
                m *= 2;
            }
            result.ok_or_else(|| Error::Numerical("2-D quadrature did not converge".into()))?
        }
    };
    Ok(pnorm / knorm)
}
