use rug::Float;

use crate::precision::Precision;

/// `L_n(-x) = Σ_k C(n,k) x^k / k!` (all terms positive for `x > 0`).
pub fn laguerre(n: usize, x: &Float, prec: Precision) -> Float {
    let bits = prec.bits();
    let mut term = prec.one();
    let mut sum = prec.one();
    for k in 0..n {
        // term_{k+1} = term_k · (n-k) x / (k+1)²
        term *= x;
        term *= (n - k) as u64;
        term /= ((k + 1) * (k + 1)) as u64;
        sum += &term;
    }
    Float::with_val(bits, sum)
}

/// `c̃_L(x)` of the effective Laguerre asymptotics.
pub fn laguerre_c_tilde(x: &Float, prec: Precision) -> Float {
    let bits = prec.bits();
    let pi = prec.pi();
    let sqrt_pi = Float::with_val(bits, pi.sqrt_ref());
    let sx = Float::with_val(bits, x.sqrt_ref());
    let qx = Float::with_val(bits, sx.sqrt_ref());
    let e = prec.one().exp();

    let mut bracket = prec.float(3);
    bracket += Float::with_val(bits, &pi / &e).sqrt();
    bracket += Float::with_val(bits, 2u32) / Float::with_val(bits, &sqrt_pi * &qx);
    bracket += Float::with_val(bits, 7u32) / Float::with_val(bits, &sx * 16u32);
    bracket += Float::with_val(bits, x + 2u32) * &sx;

    let mut expo = Float::with_val(bits, x / -2i32);
    expo += Float::with_val(bits, &sx * 2u32);
    let mut pre = expo.exp();
    pre /= Float::with_val(bits, &sqrt_pi * 2u32) * &qx;
    pre * bracket
}

/// `m̃_L(x) = max{5x, x(1+x/2)², 9/x}`.
pub fn laguerre_m_tilde(x: &Float, prec: Precision) -> Float {
    let bits = prec.bits();
    let a = Float::with_val(bits, x * 5u32);
    let mut b = Float::with_val(bits, x / 2u32);
    b += 1u32;
    let b = b.square() * x;
    let c = Float::with_val(bits, 9u32) / x;
    a.max(&b).max(&c)
}

/// Right-hand side of the effective Laguerre bound, and whether `n` is large enough.
#[derive(Debug, Clone)]
pub struct LaguerreBound {
    pub applicable: bool,
    pub bound: Float,
}

/// `c̃_L(x) n^{-1/4} e^{2√(xn)}`, applicable for `n ≥ m̃_L(x)`.
pub fn laguerre_bound(n: usize, x: &Float, prec: Precision) -> LaguerreBound {
    let bits = prec.bits();
    let nf = prec.float(n as u64);
    let applicable = n > 0 && nf >= laguerre_m_tilde(x, prec);
    let mut expo = Float::with_val(bits, x * &nf).sqrt();
    expo *= 2u32;
    let mut bound = laguerre_c_tilde(x, prec) * expo.exp();
    if n > 0 {
        bound /= nf.sqrt().sqrt();
    }
    LaguerreBound { applicable, bound }
}
