//! Worst-case errors `e_∞(A)`, `e_2(A)` over the unit ball, via the orthonormal
//! basis `e_k = α_k^{-1/2} φ t^k` and the residuals of `A` on it.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use rug::Float;

use crate::approximators::{LinearApproximation, Residuals};
use crate::classical::node_polynomial;
use crate::error::{Error, Result};
use crate::kernels::{Kernel, MAX_SERIES_TERMS};
use crate::precision::{cmp_float, Precision, MIN_DIGITS};
use crate::quadrature::{gauss_legendre, integrate_adaptive};
use crate::rkhs::SeriesFunction;
use crate::search::{chebyshev_grid, refine_sup};
use crate::Norm;

/// Accepted results carry a certified relative error below this.
pub const ACCEPTED_REL_ERROR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorstCaseConfig {
    pub norm: Norm,
    pub truncation_tol: f64,
    pub grid_size: usize,
    pub precision: Precision,
}

impl Default for WorstCaseConfig {
    fn default() -> Self {
        Self {
            norm: Norm::Sup,
            truncation_tol: 1e-30,
            grid_size: 4096,
            precision: Precision::default(),
        }
    }
}

impl WorstCaseConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.truncation_tol > 0.0 && self.truncation_tol < 1.0) {
            return Err(Error::Config(format!("truncation tolerance must lie in (0, 1), got {}", self.truncation_tol)));
        }
        if self.precision.digits() < MIN_DIGITS {
            return Err(Error::Config(format!(
                "precision must be at least {MIN_DIGITS} digits, got {}",
                self.precision.digits()
            )));
        }
        if self.grid_size < 16 {
            return Err(Error::Config(format!("grid size must be at least 16, got {}", self.grid_size)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMethod {
    OnbResidual,
    GramFormula,
    Witness,
}

#[derive(Debug, Clone)]
pub struct ErrorEstimate {
    pub log10_value: f64,
    pub value: Float,
    pub certified_rel_error: f64,
    pub method: EstimateMethod,
}

impl ErrorEstimate {
    fn new(value: Float, certified_rel_error: f64, method: EstimateMethod) -> Self {
        let log10_value = if value.is_zero() {
            f64::NEG_INFINITY
        } else {
            Float::with_val(value.prec(), value.log10_ref()).to_f64()
        };
        Self {
            log10_value,
            value,
            certified_rel_error,
            method,
        }
    }

    pub fn accepted(&self) -> bool {
        self.certified_rel_error < ACCEPTED_REL_ERROR
    }
}

/// `α_k^{-1/2}` and `ln α_k` for the first terms, extended on demand.
struct Coefficients<'a> {
    kernel: &'a Kernel,
    inv_sqrt: Vec<Float>,
    ln_alpha: Vec<f64>,
    prec: Precision,
}

impl<'a> Coefficients<'a> {
    fn new(kernel: &'a Kernel, len: usize, prec: Precision) -> Self {
        let logs = kernel.alpha().log_alphas(len, prec);
        Self {
            kernel,
            ln_alpha: logs.iter().map(Float::to_f64).collect(),
            inv_sqrt: logs.into_iter().map(|l| (-l / 2u32).exp()).collect(),
            prec,
        }
    }

    fn inv_sqrt(&self, k: usize) -> Float {
        match self.inv_sqrt.get(k) {
            Some(v) => v.clone(),
            None => (-self.kernel.alpha().log_alpha(k, self.prec) / 2u32).exp(),
        }
    }

    fn ln_alpha(&self, k: usize) -> f64 {
        match self.ln_alpha.get(k) {
            Some(v) => *v,
            None => self.kernel.alpha().log_alpha(k, self.prec).to_f64(),
        }
    }
}

/// `e_k`-residuals `r_k(x) α_k^{-1/2}` up to a certified truncation point (at least `min_len` terms).
fn scaled_residuals(
    res: &mut Residuals,
    coefs: &Coefficients,
    tol: f64,
    min_len: usize,
    prec: Precision,
) -> Result<(Vec<Float>, Float)> {
    let (b, rho) = res.envelope();
    let ln_b = b.ln();
    let ln_rho = rho.ln();
    let ln_floor = 2.0 * ln_b - 2.0 * prec.digits() as f64 * std::f64::consts::LN_10;
    let mut out = Vec::new();
    let mut sum = prec.zero();
    for k in 0..MAX_SERIES_TERMS {
        let r = res.next_residual() * coefs.inv_sqrt(k);
        sum += Float::with_val(prec.bits(), r.square_ref());
        out.push(r);
        if out.len() < min_len {
            continue;
        }
        // Terms beyond k are bounded by B² ρ^{2j} / α_j, with ratios below 1/2 from here on.
        let (la1, la2) = (coefs.ln_alpha(k + 1), coefs.ln_alpha(k + 2));
        let q = (2.0 * ln_rho + la1 - la2).exp();
        if q < 0.5 || rho == 0.0 {
            let ln_tail = std::f64::consts::LN_2 + 2.0 * ln_b + 2.0 * (k + 1) as f64 * ln_rho - la1;
            let ln_sum = if sum.is_zero() { f64::NEG_INFINITY } else { Float::with_val(53, sum.ln_ref()).to_f64() };
            if ln_tail <= tol.ln() + ln_sum.max(ln_floor) {
                return Ok((out, sum));
            }
        }
    }
    Err(Error::Truncation {
        terms: MAX_SERIES_TERMS,
        tail: f64::NAN,
    })
}

/// `sup_{‖f‖_K ≤ 1} |f(x) − (Af)(x)| = (Σ_k α_k^{-1} r_k(x)²)^{1/2}`.
pub fn pointwise_worst_case(a: &LinearApproximation, kernel: &Kernel, x: &Float, cfg: &WorstCaseConfig) -> Result<Float> {
    cfg.validate()?;
    check_point(x)?;
    let coefs = Coefficients::new(kernel, 256, cfg.precision);
    pointwise_with(a, kernel, x, cfg, &coefs)
}

fn pointwise_with(
    a: &LinearApproximation,
    kernel: &Kernel,
    x: &Float,
    cfg: &WorstCaseConfig,
    coefs: &Coefficients,
) -> Result<Float> {
    let mut res = a.residuals(kernel, x)?;
    let (_, sum) = scaled_residuals(&mut res, coefs, cfg.truncation_tol, 1, cfg.precision)?;
    Ok(sum.sqrt())
}

fn check_point(x: &Float) -> Result<()> {
    if !x.is_finite() || *x < -1 || *x > 1 {
        return Err(Error::Domain(format!("evaluation point {} outside [-1, 1]", x.to_f64())));
    }
    Ok(())
}

pub use crate::approximators::power_function_gram;

/// `e_∞(A)`: dense Chebyshev grid of `max(grid_size, 64n)` points plus three parabolic steps.
pub fn sup_worst_case(a: &LinearApproximation, kernel: &Kernel, cfg: &WorstCaseConfig) -> Result<ErrorEstimate> {
    cfg.validate()?;
    let prec = cfg.precision;
    let coefs = Coefficients::new(kernel, 256, prec);
    let grid = chebyshev_grid(cfg.grid_size.max(64 * a.order()));
    let coarse = grid
        .par_iter()
        .map(|&x| pointwise_with(a, kernel, &prec.float(x), cfg, &coefs).map(|v| v.to_f64()))
        .collect::<Result<Vec<f64>>>()?;
    let fine = |x: f64| pointwise_with(a, kernel, &prec.float(x), cfg, &coefs);
    let r = refine_sup(&grid, &coarse, fine, 64, 3, 3, 1e-12)?;
    Ok(ErrorEstimate::new(r.value, r.rel_error, EstimateMethod::OnbResidual))
}

/// `e_2(A)`: largest singular value of the residual operator, by quadrature in
/// `x` and a symmetric eigen-solve in coefficient space.
pub fn l2_worst_case(a: &LinearApproximation, kernel: &Kernel, cfg: &WorstCaseConfig) -> Result<ErrorEstimate> {
    cfg.validate()?;
    let prec = cfg.precision;
    let coefs = Coefficients::new(kernel, 256, prec);
    let mut prev: Option<Float> = None;
    let mut m = 32usize.max(a.order().next_power_of_two());
    while m <= 2048 {
        let (value, eig_err) = l2_at_order(a, kernel, cfg, &coefs, m)?;
        if let Some(p) = prev {
            let diff = Float::with_val(prec.bits(), &value - &p).abs();
            let rel = if value.is_zero() {
                if diff.is_zero() {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                (diff / &value).to_f64()
            };
            if rel <= 1e-12 {
                return Ok(ErrorEstimate::new(value, rel.max(eig_err), EstimateMethod::OnbResidual));
            }
        }
        prev = Some(value);
        m *= 2;
    }
    Err(Error::Numerical("L2 worst case: quadrature did not settle by order 2048".into()))
}

fn l2_at_order(
    a: &LinearApproximation,
    kernel: &Kernel,
    cfg: &WorstCaseConfig,
    coefs: &Coefficients,
    m: usize,
) -> Result<(Float, f64)> {
    let prec = cfg.precision;
    let rule = gauss_legendre(m, prec)?;
    let first = rule
        .nodes
        .par_iter()
        .map(|x| {
            let mut res = a.residuals(kernel, x)?;
            scaled_residuals(&mut res, coefs, cfg.truncation_tol, 1, prec).map(|(v, _)| v)
        })
        .collect::<Result<Vec<_>>>()?;
    let len = first.iter().map(Vec::len).max().unwrap_or(1);
    let rows = first
        .into_par_iter()
        .zip(rule.nodes.par_iter())
        .map(|(mut row, x)| {
            if row.len() < len {
                let mut res = a.residuals(kernel, x)?;
                row = scaled_residuals(&mut res, coefs, cfg.truncation_tol, len, prec)?.0;
            }
            row.truncate(len);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    // R_{ik} = √w_i e_k-residual(x_i), then λ_max(RᵀR) in scaled double precision.
    let mut scale = prec.zero();
    let weighted: Vec<Vec<Float>> = rows
        .into_iter()
        .zip(&rule.weights)
        .map(|(row, w)| {
            let sw = Float::with_val(prec.bits(), w.sqrt_ref());
            row.into_iter()
                .map(|r| {
                    let v = r * &sw;
                    let av = Float::with_val(prec.bits(), v.abs_ref());
                    if cmp_float(&av, &scale).is_gt() {
                        scale = av;
                    }
                    v
                })
                .collect()
        })
        .collect();
    if scale.is_zero() {
        return Ok((prec.zero(), 0.0));
    }
    let r = DMatrix::from_fn(m, len, |i, k| Float::with_val(prec.bits(), &weighted[i][k] / &scale).to_f64());
    let gram = r.transpose() * &r;
    let (lambda, rel) = largest_eigenvalue(gram)?;
    let value = Float::with_val(prec.bits(), lambda.sqrt()) * scale;
    Ok((value, rel))
}

/// Largest eigenvalue of a symmetric positive semidefinite matrix, with a residual check at `1e-8`.
fn largest_eigenvalue(mat: DMatrix<f64>) -> Result<(f64, f64)> {
    let eig = SymmetricEigen::try_new(mat.clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::Numerical("symmetric eigen-solve did not converge".into()))?;
    let (i, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Numerical("empty residual operator".into()))?;
    if lambda <= 0.0 {
        return Ok((0.0, 0.0));
    }
    let v = eig.eigenvectors.column(i);
    let resid = (&mat * v - v * lambda).norm() / (lambda * v.norm());
    if !(resid <= 1e-8) {
        return Err(Error::Numerical(format!("eigen residual {resid:e} above 1e-8")));
    }
    Ok((lambda, resid))
}

/// `e_p(A)` for the configured norm.
pub fn worst_case(a: &LinearApproximation, kernel: &Kernel, cfg: &WorstCaseConfig) -> Result<ErrorEstimate> {
    match cfg.norm {
        Norm::Sup => sup_worst_case(a, kernel, cfg),
        Norm::L2 => l2_worst_case(a, kernel, cfg),
    }
}

/// `(∫ P(x)²)^{1/2}`, an upper bound for `e_2(A)`.
pub fn integrated_pointwise(a: &LinearApproximation, kernel: &Kernel, cfg: &WorstCaseConfig) -> Result<Float> {
    cfg.validate()?;
    let coefs = Coefficients::new(kernel, 256, cfg.precision);
    let start = 32usize.max(a.order().next_power_of_two());
    let v = integrate_adaptive(
        |x| pointwise_with(a, kernel, x, cfg, &coefs).map(Float::square),
        start,
        2048,
        1e-14,
        cfg.precision,
    )?;
    Ok(v.sqrt())
}

/// `‖f_n‖_p / ‖f_n‖_K` for `f_n = φ·Π(x − x_j)`: a lower bound on `e_p(A)` for every `A` using these nodes.
pub fn lower_bound_witness(kernel: &Kernel, nodes: &[Float], norm: Norm, prec: Precision) -> Result<Float> {
    let omega = node_polynomial(nodes, prec)?;
    let f = SeriesFunction::embed(&omega, kernel);
    let num = f.lp_norm(norm, prec)?;
    Ok(num / f.norm(prec))
}

pub fn lower_bound_witness_estimate(kernel: &Kernel, nodes: &[Float], norm: Norm, prec: Precision) -> Result<ErrorEstimate> {
    let v = lower_bound_witness(kernel, nodes, norm, prec)?;
    Ok(ErrorEstimate::new(v, 1e-12, EstimateMethod::Witness))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approximators::{chebyshev_node_set, GramSystem};

    fn cfg() -> WorstCaseConfig {
        WorstCaseConfig::default()
    }

    fn p() -> Precision {
        Precision::default()
    }

    #[test]
    fn zero_operator_sup_is_one() {
        let g = Kernel::gaussian(1.0).unwrap();
        let a = LinearApproximation::polynomial(Vec::new(), p()).unwrap();
        let e = sup_worst_case(&a, &g, &cfg()).unwrap();
        assert!((e.value.to_f64() - 1.0).abs() < 1e-12, "{}", e.value);
        assert!(e.accepted());
    }

    #[test]
    fn zero_operator_l2_series() {
        let k = Kernel::exponential(1.0).unwrap();
        let a = LinearApproximation::polynomial(Vec::new(), p()).unwrap();
        let e = l2_worst_case(&a, &k, &WorstCaseConfig { norm: Norm::L2, ..cfg() }).unwrap();
        // The operator has rank one direction dominating: compare with the trace bound and a direct eigen-solve.
        let direct: f64 = (0..60).map(|k| 2.0 / ((2 * k + 1) as f64 * (1..=k).map(|i| i as f64).product::<f64>())).sum();
        assert!(e.value.to_f64().powi(2) <= direct * (1.0 + 1e-12));
        let mut mat = DMatrix::zeros(40, 40);
        for i in 0..40 {
            for j in 0..40 {
                let fi: f64 = (1..=i).map(|t| t as f64).product();
                let fj: f64 = (1..=j).map(|t| t as f64).product();
                let integral = if (i + j) % 2 == 0 { 2.0 / (i + j + 1) as f64 } else { 0.0 };
                mat[(i, j)] = integral / (fi * fj).sqrt();
            }
        }
        let (lmax, _) = largest_eigenvalue(mat).unwrap();
        assert!((e.value.to_f64().powi(2) / lmax - 1.0).abs() < 1e-10);
    }

    #[test]
    fn vanishes_at_nodes() {
        let g = Kernel::gaussian(1.0).unwrap();
        let nodes = chebyshev_node_set(6, p());
        let a = LinearApproximation::weighted_polynomial(&g, nodes.clone(), p()).unwrap();
        for x in &nodes {
            assert!(pointwise_worst_case(&a, &g, x, &cfg()).unwrap() < 1e-50);
        }
    }

    #[test]
    fn residual_and_gram_agree() {
        let g = Kernel::gaussian(1.0).unwrap();
        let nodes = chebyshev_node_set(5, p());
        let a = LinearApproximation::kernel_interpolant(&g, nodes.clone(), p()).unwrap();
        let x = p().float(0.3);
        let r = pointwise_worst_case(&a, &g, &x, &cfg()).unwrap();
        let q = power_function_gram(&g, nodes, &x, p()).unwrap();
        assert!((Float::with_val(200, &r - &q) / &q).abs() < 1e-15);
    }

    #[test]
    fn single_node_power_function() {
        let g = Kernel::gaussian(1.0).unwrap();
        let gs = GramSystem::new(&g, vec![p().zero()], p()).unwrap();
        assert_eq!(gs.power_function(&p().zero()).unwrap(), 0);
        let x = p().float(0.7);
        let k = g.eval_best(&x, &p().zero(), p()).unwrap();
        let expect = (p().one() - k.square()).sqrt();
        assert!(Float::with_val(200, gs.power_function(&x).unwrap() - expect).abs() < 1e-45);
    }

    #[test]
    fn witness_single_node() {
        let g = Kernel::gaussian(1.0).unwrap();
        let w = lower_bound_witness(&g, &[p().zero()], Norm::Sup, p()).unwrap();
        assert!((w.to_f64() - (-0.5f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn chain_at_small_n() {
        let g = Kernel::gaussian(1.0).unwrap();
        let nodes = chebyshev_node_set(8, p());
        let s = LinearApproximation::weighted_polynomial(&g, nodes.clone(), p()).unwrap();
        let e_inf = sup_worst_case(&s, &g, &cfg()).unwrap();
        let e_2 = l2_worst_case(&s, &g, &WorstCaseConfig { norm: Norm::L2, ..cfg() }).unwrap();
        let w_inf = lower_bound_witness(&g, &nodes, Norm::Sup, p()).unwrap();
        let w_2 = lower_bound_witness(&g, &nodes, Norm::L2, p()).unwrap();
        assert!(w_inf <= e_inf.value);
        assert!(w_2 <= e_2.value);
        assert!(e_2.value.to_f64() <= e_inf.value.to_f64() * 2f64.sqrt());
        let maj = integrated_pointwise(&s, &g, &cfg()).unwrap();
        assert!(e_2.value <= maj);
        assert!(e_inf.accepted() && e_2.accepted());
    }

    #[test]
    fn bad_config() {
        assert!(WorstCaseConfig { truncation_tol: 0.0, ..cfg() }.validate().is_err());
        assert!(WorstCaseConfig { precision: Precision::new(20), ..cfg() }.validate().is_err());
    }
}
