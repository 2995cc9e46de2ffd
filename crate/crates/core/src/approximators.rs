//! Linear approximations `A_n f = Σ_j f(x_j) ψ_j` and the weighted Taylor map.

use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use rug::Float;

use crate::classical::{check_nodes, chebyshev_nodes, Polynomial};
use crate::error::{Error, Result};
use crate::kernels::{Kernel, WeightFunction};
use crate::precision::{Precision, MIN_DIGITS};
use crate::rkhs::SeriesFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ApproximationKind {
    /// Plain Lagrange interpolation `S_n`.
    Polynomial,
    /// `S_n^φ f = φ · S_n(f/φ)`.
    WeightedPolynomial,
    /// Minimum-norm interpolant in the kernel's space.
    KernelInterpolant,
    /// `φ · T_n(f/φ)` with Taylor expansion at `a`.
    WeightedTaylor { a: f64 },
}

impl ApproximationKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Polynomial => "polynomial",
            Self::WeightedPolynomial => "weighted-polynomial",
            Self::KernelInterpolant => "kernel-interpolant",
            Self::WeightedTaylor { .. } => "weighted-taylor",
        }
    }
}

/// An approximation rule, immutable after construction.
#[derive(Debug, Clone)]
pub struct LinearApproximation {
    kind: ApproximationKind,
    order: usize,
    nodes: Vec<Float>,
    bary: Vec<Float>,
    /// Weight used in `S_n^φ`; unit for the other kinds.
    weight: WeightFunction,
    /// `φ(x_j)`.
    node_weights: Vec<Float>,
    gram: Option<Arc<GramSystem>>,
    prec: Precision,
}

impl LinearApproximation {
    pub fn polynomial(nodes: Vec<Float>, prec: Precision) -> Result<Self> {
        Self::lagrange(ApproximationKind::Polynomial, WeightFunction::unit(), nodes, prec)
    }

    /// `S_n^φ` with the kernel's weight.
    pub fn weighted_polynomial(kernel: &Kernel, nodes: Vec<Float>, prec: Precision) -> Result<Self> {
        Self::lagrange(ApproximationKind::WeightedPolynomial, *kernel.weight(), nodes, prec)
    }

    fn lagrange(kind: ApproximationKind, weight: WeightFunction, nodes: Vec<Float>, prec: Precision) -> Result<Self> {
        check_nodes(&nodes)?;
        let nodes: Vec<Float> = nodes.into_iter().map(|x| Float::with_val(prec.bits(), x)).collect();
        let bary = barycentric_weights(&nodes, prec);
        let node_weights = nodes.iter().map(|x| weight.eval(x, prec)).collect();
        Ok(Self {
            kind,
            order: nodes.len(),
            nodes,
            bary,
            weight,
            node_weights,
            gram: None,
            prec,
        })
    }

    pub fn kernel_interpolant(kernel: &Kernel, nodes: Vec<Float>, prec: Precision) -> Result<Self> {
        if prec.digits() < MIN_DIGITS {
            return Err(Error::Config(format!(
                "kernel interpolation needs at least {MIN_DIGITS} digits, got {}",
                prec.digits()
            )));
        }
        check_nodes(&nodes)?;
        let nodes: Vec<Float> = nodes.into_iter().map(|x| Float::with_val(prec.bits(), x)).collect();
        let gram = GramSystem::new(kernel, nodes.clone(), prec)?;
        gram.check_cardinality()?;
        Ok(Self {
            kind: ApproximationKind::KernelInterpolant,
            order: nodes.len(),
            node_weights: vec![prec.one(); nodes.len()],
            nodes,
            bary: Vec::new(),
            weight: WeightFunction::unit(),
            gram: Some(Arc::new(gram)),
            prec,
        })
    }

    /// Weighted Taylor approximation of order `n` at `a ∈ (-1, 1)`.
    pub fn weighted_taylor(kernel: &Kernel, a: f64, n: usize, prec: Precision) -> Result<Self> {
        check_center(a)?;
        Ok(Self {
            kind: ApproximationKind::WeightedTaylor { a },
            order: n,
            nodes: Vec::new(),
            bary: Vec::new(),
            weight: *kernel.weight(),
            node_weights: Vec::new(),
            gram: None,
            prec,
        })
    }

    pub fn kind(&self) -> ApproximationKind {
        self.kind
    }

    /// Number of nodes, or the Taylor order.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[Float] {
        &self.nodes
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn gram(&self) -> Option<&GramSystem> {
        self.gram.as_deref()
    }

    /// The functions `ψ_j(x)`; not defined for Taylor approximations.
    pub fn psi(&self, x: &Float) -> Result<Vec<Float>> {
        match self.kind {
            ApproximationKind::Polynomial => Ok(self.lagrange_basis(x)),
            ApproximationKind::WeightedPolynomial => {
                let phi = self.weight.eval(x, self.prec);
                let mut l = self.lagrange_basis(x);
                for (lj, wj) in l.iter_mut().zip(&self.node_weights) {
                    *lj *= &phi;
                    *lj /= wj;
                }
                Ok(l)
            }
            ApproximationKind::KernelInterpolant => self.gram.as_ref().expect("gram present").weights(x),
            ApproximationKind::WeightedTaylor { .. } => Err(Error::NotApplicable(
                "Taylor approximations use derivative information, not point values".into(),
            )),
        }
    }

    fn lagrange_basis(&self, x: &Float) -> Vec<Float> {
        barycentric_basis(&self.nodes, &self.bary, x, self.prec)
    }

    /// `(A f)(x)`.
    pub fn apply(&self, f: &SeriesFunction, x: &Float) -> Result<Float> {
        if let ApproximationKind::WeightedTaylor { a } = self.kind {
            return Ok(weighted_taylor(f, a, self.order, self.prec)?.eval(x, self.prec));
        }
        let psi = self.psi(x)?;
        let mut acc = self.prec.zero();
        for (p, xj) in psi.iter().zip(&self.nodes) {
            acc += f.eval(xj, self.prec) * p;
        }
        Ok(acc)
    }

    /// Residuals `r_k(x) = φ(x)x^k − A(φ t^k)(x)` for the kernel's basis, in order `k = 0, 1, ...`.
    pub(crate) fn residuals(&self, kernel: &Kernel, x: &Float) -> Result<Residuals> {
        let prec = self.prec;
        let bits = prec.bits();
        let phi_x = kernel.weight().eval(x, prec);
        let xa = x.to_f64().abs();
        let mode = match self.kind {
            ApproximationKind::WeightedTaylor { a } => {
                let af = prec.float(a);
                let d = Float::with_val(bits, x - &af);
                let rho = a.abs() + d.to_f64().abs();
                ResidualMode::Taylor {
                    n: self.order,
                    row: vec![prec.one()],
                    a_pow: vec![prec.one()],
                    d_pow: vec![prec.one()],
                    a: af,
                    d,
                    rho,
                }
            }
            _ => {
                let psi = self.psi(x)?;
                let mut v = Vec::with_capacity(psi.len());
                let mut rho = xa;
                for (p, xj) in psi.into_iter().zip(&self.nodes) {
                    let w = kernel.weight().eval(xj, prec);
                    v.push(p * w);
                    rho = rho.max(xj.to_f64().abs());
                }
                ResidualMode::Standard {
                    xs: self.nodes.clone(),
                    pw: v,
                    rho,
                }
            }
        };
        let envelope = match &mode {
            ResidualMode::Taylor { rho, .. } => (phi_x.to_f64(), *rho),
            ResidualMode::Standard { pw, rho, .. } => {
                let s: f64 = pw.iter().map(|v| v.to_f64().abs()).sum();
                (phi_x.to_f64() + s * (1.0 + 1e-12), *rho)
            }
        };
        Ok(Residuals {
            k: 0,
            xk: prec.one(),
            x: x.clone(),
            phi_x,
            mode,
            envelope,
            prec,
        })
    }
}

fn check_center(a: f64) -> Result<()> {
    if !(a.is_finite() && a.abs() < 1.0) {
        return Err(Error::Domain(format!("Taylor center must lie in (-1, 1), got {a}")));
    }
    Ok(())
}

/// Generator of the residuals `r_k(x)` with an envelope `|r_k(x)| ≤ B ρ^k`.
pub(crate) struct Residuals {
    k: usize,
    xk: Float,
    x: Float,
    phi_x: Float,
    mode: ResidualMode,
    envelope: (f64, f64),
    prec: Precision,
}

enum ResidualMode {
    /// `pw_j = ψ_j(x) φ(x_j) x_j^k`.
    Standard { xs: Vec<Float>, pw: Vec<Float>, rho: f64 },
    /// `row = C(k, ·)`, residual `φ(x) Σ_{i≥n} C(k,i) a^{k-i} d^i` with `d = x − a`.
    Taylor {
        n: usize,
        row: Vec<Float>,
        a_pow: Vec<Float>,
        d_pow: Vec<Float>,
        a: Float,
        d: Float,
        rho: f64,
    },
}

impl Residuals {
    /// `(B, ρ)` with `|r_k| ≤ B ρ^k` for all `k`.
    pub(crate) fn envelope(&self) -> (f64, f64) {
        self.envelope
    }

    pub(crate) fn next_residual(&mut self) -> Float {
        let bits = self.prec.bits();
        let k = self.k;
        let r = match &mut self.mode {
            ResidualMode::Standard { xs, pw, .. } => {
                let mut r = Float::with_val(bits, &self.phi_x * &self.xk);
                for (p, xj) in pw.iter_mut().zip(xs.iter()) {
                    r -= &*p;
                    *p *= xj;
                }
                r
            }
            ResidualMode::Taylor {
                n,
                row,
                a_pow,
                d_pow,
                a,
                d,
                ..
            } => {
                if k > 0 {
                    // Pascal row update to C(k, ·).
                    row.push(self.prec.one());
                    for i in (1..k).rev() {
                        let prev = row[i - 1].clone();
                        row[i] += prev;
                    }
                    let na = Float::with_val(bits, &a_pow[k - 1] * &*a);
                    a_pow.push(na);
                    let nd = Float::with_val(bits, &d_pow[k - 1] * &*d);
                    d_pow.push(nd);
                }
                let mut s = self.prec.zero();
                for i in *n..=k {
                    let mut t = Float::with_val(bits, &row[i] * &a_pow[k - i]);
                    t *= &d_pow[i];
                    s += t;
                }
                s * &self.phi_x
            }
        };
        self.xk *= &self.x;
        self.k += 1;
        r
    }
}

/// `w_j = 1 / Π_{i≠j} (x_j − x_i)`.
pub fn barycentric_weights(nodes: &[Float], prec: Precision) -> Vec<Float> {
    let bits = prec.bits();
    (0..nodes.len())
        .map(|j| {
            let mut p = prec.one();
            for (i, xi) in nodes.iter().enumerate() {
                if i != j {
                    p *= Float::with_val(bits, &nodes[j] - xi);
                }
            }
            p.recip()
        })
        .collect()
}

/// Lagrange basis at `x` by the second barycentric form.
pub fn barycentric_basis(nodes: &[Float], weights: &[Float], x: &Float, prec: Precision) -> Vec<Float> {
    let bits = prec.bits();
    if let Some(j) = nodes.iter().position(|xj| xj == x) {
        let mut e = vec![prec.zero(); nodes.len()];
        e[j] = prec.one();
        return e;
    }
    let mut t: Vec<Float> = nodes
        .iter()
        .zip(weights)
        .map(|(xj, wj)| Float::with_val(bits, wj / Float::with_val(bits, x - xj)))
        .collect();
    let mut s = prec.zero();
    for v in &t {
        s += v;
    }
    for v in &mut t {
        *v /= &s;
    }
    t
}

/// Lagrange basis by direct products; reference implementation.
pub fn lagrange_basis_direct(nodes: &[Float], x: &Float, prec: Precision) -> Vec<Float> {
    let bits = prec.bits();
    (0..nodes.len())
        .map(|j| {
            let mut p = prec.one();
            for (i, xi) in nodes.iter().enumerate() {
                if i != j {
                    p *= Float::with_val(bits, x - xi);
                    p /= Float::with_val(bits, &nodes[j] - xi);
                }
            }
            p
        })
        .collect()
}

/// `φ · T_n(f/φ)` at `a`, re-expanded in monomials.
pub fn weighted_taylor(f: &SeriesFunction, a: f64, n: usize, prec: Precision) -> Result<SeriesFunction> {
    check_center(a)?;
    let bits = prec.bits();
    let c = f.coeffs();
    let af = prec.float(a);
    // b_i = Σ_{k≥i} C(k,i) a^{k-i} c_k, i < n
    let b: Vec<Float> = (0..n.min(c.len()))
        .map(|i| {
            let mut s = prec.zero();
            let mut binom = prec.one();
            let mut apow = prec.one();
            for (k, ck) in c.iter().enumerate().skip(i) {
                if k > i {
                    binom *= k as u64;
                    binom /= (k - i) as u64;
                    apow *= &af;
                }
                s += Float::with_val(bits, &binom * &apow) * ck;
            }
            s
        })
        .collect();
    // Σ_i b_i (x − a)^i
    let shift = Polynomial::new(vec![Float::with_val(bits, -&af), prec.one()]);
    let mut out = Polynomial::zero();
    let mut pw = Polynomial::new(vec![prec.one()]);
    for bi in &b {
        out = out.add(&pw.scale(bi));
        pw = pw.mul(&shift);
    }
    Ok(SeriesFunction::embed(&out, f.kernel()))
}

/// Gram matrix of a kernel at nodes, factored once.
#[derive(Debug)]
pub struct GramSystem {
    kernel: Kernel,
    nodes: Vec<Float>,
    gram: Vec<Vec<Float>>,
    chol: Vec<Vec<Float>>,
    log10_condition: f64,
    prec: Precision,
}

impl GramSystem {
    pub fn new(kernel: &Kernel, nodes: Vec<Float>, prec: Precision) -> Result<Self> {
        check_nodes(&nodes)?;
        let n = nodes.len();
        let bits = prec.bits();
        let mut gram = vec![vec![prec.zero(); n]; n];
        for i in 0..n {
            for j in 0..=i {
                let v = kernel.eval_best(&nodes[i], &nodes[j], prec)?;
                gram[j][i] = v.clone();
                gram[i][j] = v;
            }
        }
        let floor = 10f64.powi(-(prec.digits() as i32 - 5));
        let mut chol = vec![vec![prec.zero(); n]; n];
        let (mut dmax, mut dmin) = (0f64, f64::INFINITY);
        for j in 0..n {
            let mut d = gram[j][j].clone();
            for k in 0..j {
                d -= Float::with_val(bits, chol[j][k].square_ref());
            }
            let dv = d.to_f64();
            if !(dv > gram[j][j].to_f64() * floor) {
                let est = if dv > 0.0 { (dmax / dv).log10() } else { f64::INFINITY };
                return Err(Error::PrecisionInsufficient {
                    digits: prec.digits(),
                    log10_condition: est.max(prec.digits() as f64 - 5.0),
                });
            }
            dmax = dmax.max(dv);
            dmin = dmin.min(dv);
            let l = d.sqrt();
            for i in j + 1..n {
                let mut s = gram[i][j].clone();
                for k in 0..j {
                    s -= Float::with_val(bits, &chol[i][k] * &chol[j][k]);
                }
                chol[i][j] = s / &l;
            }
            chol[j][j] = l;
        }
        let log10_condition = if n == 0 { 0.0 } else { (dmax / dmin).log10() };
        Ok(Self {
            kernel: kernel.clone(),
            nodes,
            gram,
            chol,
            log10_condition,
            prec,
        })
    }

    pub fn nodes(&self) -> &[Float] {
        &self.nodes
    }

    /// Ratio of extreme Cholesky pivots, a lower estimate of `log10 cond(G)`.
    pub fn log10_condition(&self) -> f64 {
        self.log10_condition
    }

    /// `k(x)_j = K(x, x_j)`.
    pub fn kvec(&self, x: &Float) -> Result<Vec<Float>> {
        self.nodes.iter().map(|xj| self.kernel.eval_best(x, xj, self.prec)).collect()
    }

    fn solve_plain(&self, b: &[Float]) -> Vec<Float> {
        let n = b.len();
        let bits = self.prec.bits();
        let mut y: Vec<Float> = Vec::with_capacity(n);
        for i in 0..n {
            let mut s = b[i].clone();
            for (k, yk) in y.iter().enumerate() {
                s -= Float::with_val(bits, &self.chol[i][k] * yk);
            }
            y.push(s / &self.chol[i][i]);
        }
        for i in (0..n).rev() {
            let mut s = y[i].clone();
            for k in i + 1..n {
                s -= Float::with_val(bits, &self.chol[k][i] * &y[k]);
            }
            y[i] = s / &self.chol[i][i];
        }
        y
    }

    /// `G^{-1} b` with two steps of refinement, residuals in doubled precision.
    pub fn solve(&self, b: &[Float]) -> Vec<Float> {
        let bits = self.prec.bits();
        let mut u = self.solve_plain(b);
        for _ in 0..2 {
            let r: Vec<Float> = (0..b.len())
                .map(|i| {
                    let mut s = Float::with_val(2 * bits, &b[i]);
                    for (g, uj) in self.gram[i].iter().zip(&u) {
                        s -= Float::with_val(2 * bits, g * uj);
                    }
                    Float::with_val(bits, s)
                })
                .collect();
            for (ui, di) in u.iter_mut().zip(self.solve_plain(&r)) {
                *ui += di;
            }
        }
        u
    }

    /// `u(x) = G^{-1} k(x)`, the kernel interpolant's `ψ_j(x)`.
    pub fn weights(&self, x: &Float) -> Result<Vec<Float>> {
        Ok(self.solve(&self.kvec(x)?))
    }

    /// `√(K(x,x) − k(x)ᵀ G^{-1} k(x))`, clamped at zero.
    pub fn power_function(&self, x: &Float) -> Result<Float> {
        let k = self.kvec(x)?;
        let u = self.solve(&k);
        let mut s = self.kernel.eval_best(x, x, self.prec)?;
        for (a, b) in k.iter().zip(&u) {
            s -= Float::with_val(self.prec.bits(), a * b);
        }
        if s.is_sign_negative() {
            let scale = Float::with_val(self.prec.bits(), self.kernel.eval_best(x, x, self.prec)?);
            if Float::with_val(self.prec.bits(), s.abs_ref()) > scale * self.prec.tolerance() {
                return Err(Error::Numerical(format!(
                    "negative squared power function {:e} beyond roundoff",
                    s.to_f64()
                )));
            }
            return Ok(self.prec.zero());
        }
        Ok(s.sqrt())
    }

    fn check_cardinality(&self) -> Result<()> {
        let tol = self.prec.tolerance();
        for (j, xj) in self.nodes.iter().enumerate() {
            let u = self.weights(xj)?;
            for (i, ui) in u.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                let err = Float::with_val(self.prec.bits(), ui - target).abs().to_f64();
                if !(err <= tol) {
                    return Err(Error::PrecisionInsufficient {
                        digits: self.prec.digits(),
                        log10_condition: self.log10_condition.max(err.log10() + self.prec.digits() as f64),
                    });
                }
            }
        }
        Ok(())
    }
}

/// `P_n(x)` by the Gram formula.
pub fn power_function_gram(kernel: &Kernel, nodes: Vec<Float>, x: &Float, prec: Precision) -> Result<Float> {
    GramSystem::new(kernel, nodes, prec)?.power_function(x)
}

/// Node placements on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub enum NodeScheme {
    Chebyshev,
    Equispaced,
    Random { seed: u64 },
    File(std::path::PathBuf),
}

/// Roots of `T_n` (descending).
pub fn chebyshev_node_set(n: usize, prec: Precision) -> Vec<Float> {
    chebyshev_nodes(n, prec)
}

/// `-1 + 2j/(n-1)`; the single node is 0.
pub fn equispaced_nodes(n: usize, prec: Precision) -> Vec<Float> {
    if n == 1 {
        return vec![prec.zero()];
    }
    (0..n)
        .map(|j| {
            let mut v = prec.float(2 * j as u64);
            v /= (n - 1) as u64;
            v - 1u32
        })
        .collect()
}

/// `n` sorted uniform nodes, redrawn until pairwise distinct.
pub fn random_nodes<R: Rng + ?Sized>(n: usize, rng: &mut R, prec: Precision) -> Vec<Float> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        v.sort_by(f64::total_cmp);
        if v.windows(2).all(|w| w[0] < w[1]) {
            return v.into_iter().map(|x| prec.float(x)).collect();
        }
    }
}

/// One decimal per line; blank lines and `#` comments are skipped.
pub fn nodes_from_file(path: &Path, prec: Precision) -> Result<Vec<Float>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed = Float::parse(line)
            .map_err(|e| Error::Config(format!("{}:{}: {e}", path.display(), i + 1)))?;
        let v = Float::with_val(prec.bits(), parsed);
        if !v.is_finite() || v.clone().abs() > 1u32 {
            return Err(Error::Domain(format!("{}:{}: node {line} outside [-1, 1]", path.display(), i + 1)));
        }
        out.push(v);
    }
    check_nodes(&out)?;
    Ok(out)
}

/// The `n`-node set for a scheme. File schemes ignore `n` if it matches the file length.
pub fn node_set(scheme: &NodeScheme, n: usize, prec: Precision) -> Result<Vec<Float>> {
    use rand::SeedableRng;
    match scheme {
        NodeScheme::Chebyshev => Ok(chebyshev_node_set(n, prec)),
        NodeScheme::Equispaced => Ok(equispaced_nodes(n, prec)),
        NodeScheme::Random { seed } => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed.wrapping_add(n as u64));
            Ok(random_nodes(n, &mut rng, prec))
        }
        NodeScheme::File(path) => {
            let v = nodes_from_file(path, prec)?;
            if v.len() != n {
                return Err(Error::Config(format!(
                    "node file {} has {} nodes, {} requested",
                    path.display(),
                    v.len(),
                    n
                )));
            }
            Ok(v)
        }
    }
}
