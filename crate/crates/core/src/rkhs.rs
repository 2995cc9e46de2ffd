//! Elements `f(x) = φ(x) Σ c_k x^k` of the kernel's Hilbert space.

use rug::Float;

use crate::classical::{clenshaw, poly_sup_norm, Polynomial};
use crate::error::{Error, Result};
use crate::kernels::{Kernel, MAX_SERIES_TERMS};
use crate::precision::{ln_sum_exp, Precision};
use crate::quadrature::integrate_adaptive;
use crate::search::{chebyshev_grid, refine_sup};
use crate::Norm;

/// Finite weighted power series attached to a kernel.
#[derive(Debug, Clone)]
pub struct SeriesFunction {
    kernel: Kernel,
    poly: Polynomial,
}

impl SeriesFunction {
    pub fn new(kernel: Kernel, coeffs: Vec<Float>) -> Self {
        Self {
            kernel,
            poly: Polynomial::new(coeffs),
        }
    }

    /// `f = φ·P`; the norm depends only on `P` and `α`.
    pub fn embed(poly: &Polynomial, kernel: &Kernel) -> Self {
        Self {
            kernel: kernel.clone(),
            poly: poly.clone(),
        }
    }

    /// `K(y, ·)` truncated once the coefficient tail `Σ α_k^{-1}|y|^k φ(y)` is below `tol`.
    pub fn kernel_section(kernel: &Kernel, y: &Float, tol: f64, prec: Precision) -> Result<Self> {
        let bits = prec.bits();
        let phi_y = kernel.weight().eval(y, prec);
        let ya = y.to_f64().abs();
        let mut coeffs = Vec::new();
        let mut yk = prec.one();
        for k in 0..MAX_SERIES_TERMS {
            let la = kernel.alpha().log_alpha(k, prec);
            let c = Float::with_val(bits, (-la.clone()).exp() * &yk) * &phi_y;
            let q = (la.to_f64() - kernel.alpha().log_alpha(k + 1, prec).to_f64()).exp() * ya;
            let next = c.to_f64().abs() * q;
            coeffs.push(c);
            if ya == 0.0 || (q < 0.5 && 2.0 * next < tol) {
                return Ok(Self::new(kernel.clone(), coeffs));
            }
            yk *= y;
        }
        Err(Error::Truncation {
            terms: MAX_SERIES_TERMS,
            tail: f64::NAN,
        })
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn coeffs(&self) -> &[Float] {
        self.poly.coeffs()
    }

    /// The polynomial part `P = f/φ`.
    pub fn polynomial(&self) -> &Polynomial {
        &self.poly
    }

    pub fn eval(&self, x: &Float, prec: Precision) -> Float {
        self.poly.eval(x) * self.kernel.weight().eval(x, prec)
    }

    /// `ln ‖f‖_K`, `-inf` for the zero function.
    pub fn norm_ln(&self, prec: Precision) -> Float {
        let terms: Vec<Float> = self
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let lc = Float::with_val(prec.bits(), c.abs_ref()).ln() * 2u32;
                lc + self.kernel.alpha().log_alpha(k, prec)
            })
            .collect();
        ln_sum_exp(&terms, prec) / 2u32
    }

    pub fn norm(&self, prec: Precision) -> Float {
        self.norm_ln(prec).exp()
    }

    /// `⟨f, g⟩_K = Σ α_k c_k c'_k`.
    pub fn inner(&self, other: &Self, prec: Precision) -> Result<Float> {
        if self.kernel != other.kernel {
            return Err(Error::Domain("inner product of functions from different kernels".into()));
        }
        let bits = prec.bits();
        let mut acc = prec.zero();
        for (k, (a, b)) in self.coeffs().iter().zip(other.coeffs()).enumerate() {
            let mut t = Float::with_val(bits, a * b);
            t *= self.kernel.alpha().log_alpha(k, prec).exp();
            acc += t;
        }
        Ok(acc)
    }

    /// `‖f‖_∞` or `‖f‖_2` on [-1, 1].
    pub fn lp_norm(&self, norm: Norm, prec: Precision) -> Result<Float> {
        if self.poly.is_zero() {
            return Ok(prec.zero());
        }
        match norm {
            Norm::Sup => {
                let cheb: Vec<f64> = self.poly.to_chebyshev().iter().map(Float::to_f64).collect();
                let grid = chebyshev_grid(4096.max(64 * self.poly.degree()));
                let w = self.kernel.weight();
                let coarse: Vec<f64> = grid.iter().map(|&x| (w.eval_f64(x) * clenshaw(&cheb, x)).abs()).collect();
                let r = refine_sup(&grid, &coarse, |x| Ok(self.eval(&prec.float(x), prec).abs()), 64, 3, 8, 1e-14)?;
                Ok(r.value)
            }
            Norm::L2 => {
                let start = 16.max(self.poly.degree() + 2).next_power_of_two();
                let sq = integrate_adaptive(|x| Ok(self.eval(x, prec).square()), start, 2048, 1e-20, prec)?;
                Ok(sq.sqrt())
            }
        }
    }

    /// `sup |f^{(n)}|` for unit-weight functions.
    pub fn derivative_sup_norm(&self, n: usize, prec: Precision) -> Result<Float> {
        if !self.kernel.weight().is_unit() {
            return Err(Error::NotApplicable("derivative norms need a unit weight".into()));
        }
        let mut d = self.poly.clone();
        for _ in 0..n {
            d = d.derivative();
        }
        Ok(poly_sup_norm(&d, prec))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::chebyshev;

    fn p() -> Precision {
        Precision::default()
    }

    fn poly(c: &[f64]) -> Polynomial {
        Polynomial::from_f64(c, p())
    }

    #[test]
    fn norms() {
        let g = Kernel::gaussian(1.0).unwrap();
        let f = SeriesFunction::embed(&poly(&[0.0, 1.0]), &g);
        assert!((f.norm(p()) - 1u32).abs() < 1e-50);
        let f = SeriesFunction::embed(&poly(&[1.0, 1.0]), &g);
        assert!((f.norm(p()) - 2f64.sqrt()).abs() < 1e-15);
        let z = SeriesFunction::embed(&Polynomial::zero(), &g);
        assert!(z.norm_ln(p()).is_infinite());
        assert_eq!(z.norm(p()), 0);
        assert_eq!(z.lp_norm(Norm::Sup, p()).unwrap(), 0);
        assert_eq!(z.lp_norm(Norm::L2, p()).unwrap(), 0);
    }

    #[test]
    fn chebyshev_norm_matches_lemma_sum() {
        let g = Kernel::gaussian(1.0).unwrap();
        let t6 = chebyshev(6, p());
        let f = SeriesFunction::embed(&t6.polynomial(), &g);
        let sum = crate::bounds::chebyshev_norm_sum(g.alpha(), 6, p());
        assert!(Float::with_val(200, f.norm_ln(p()) * 2u32 - sum).abs() < 1e-45);
        let unit = Kernel::new(g.alpha().clone(), crate::kernels::WeightFunction::unit());
        let fu = SeriesFunction::embed(&t6.polynomial(), &unit);
        assert_eq!(fu.norm_ln(p()), f.norm_ln(p()));
    }

    #[test]
    fn inner_and_reproduction() {
        let g = Kernel::gaussian(1.0).unwrap();
        let f = SeriesFunction::embed(&poly(&[0.0, 1.0]), &g);
        let h = SeriesFunction::embed(&poly(&[0.0, 0.0, 1.0]), &g);
        assert_eq!(f.inner(&h, p()).unwrap(), 0);
        let r = SeriesFunction::embed(&poly(&[0.3, -1.2, 0.5, 2.0]), &g);
        let nn = r.inner(&r, p()).unwrap();
        assert!(Float::with_val(200, &nn - r.norm(p()).square()).abs() < 1e-45);
        let y = p().float(0.5);
        let sec = SeriesFunction::kernel_section(&g, &y, 1e-30, p()).unwrap();
        let v = r.inner(&sec, p()).unwrap();
        assert!(Float::with_val(200, v - r.eval(&y, p())).abs() < 1e-30);
        let other = SeriesFunction::embed(&poly(&[1.0]), &Kernel::exponential(1.0).unwrap());
        assert!(r.inner(&other, p()).is_err());
    }

    #[test]
    fn lp_norms() {
        let g = Kernel::gaussian(1.0).unwrap();
        let f = SeriesFunction::embed(&poly(&[0.0, 1.0]), &g);
        let s = f.lp_norm(Norm::Sup, p()).unwrap();
        assert!((s - (-0.5f64).exp()).abs() < 1e-14);
        let u = Kernel::exponential(1.0).unwrap();
        let f = SeriesFunction::embed(&poly(&[0.0, 1.0]), &u);
        assert!((f.lp_norm(Norm::L2, p()).unwrap() - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn derivative_norms() {
        let u = Kernel::exponential(1.0).unwrap();
        let f = SeriesFunction::embed(&poly(&[0.0, 0.0, 0.0, 1.0]), &u);
        assert!((f.derivative_sup_norm(3, p()).unwrap() - 6u32).abs() < 1e-40);
        let t5 = SeriesFunction::embed(&chebyshev(5, p()).polynomial(), &u);
        assert!((t5.derivative_sup_norm(1, p()).unwrap() - 25u32).abs() < 1e-10);
        let g = SeriesFunction::embed(&poly(&[1.0]), &Kernel::gaussian(1.0).unwrap());
        assert!(g.derivative_sup_norm(1, p()).is_err());
    }
}
