//! Experiment drivers behind the `wpsk` command line.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use rug::Float;

use crate::approximators::{node_set, LinearApproximation, NodeScheme};
use crate::bounds::{
    c_l, ell1, ell2, first_applicable_n, fit_slope, fixed_nodes_upper, interpolation_estimates, m_l,
    min_error_bounds, multivariate_witness, tau1, tau2, theorem_constants,
};
use crate::certify::{self, CheckSummary};
use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::precision::{ln_to_log10, Precision, MIN_DIGITS};
use crate::sequences::{verify_alpha_assumption, AlphaSequence, Family};
use crate::worstcase::{lower_bound_witness, worst_case, WorstCaseConfig};
use crate::Norm;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

/// Exit code for an error escaping a subcommand.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Domain(_) | Error::NotApplicable(_) | Error::Io(_) => EXIT_USAGE,
        Error::Truncation { .. } | Error::PrecisionInsufficient { .. } | Error::Numerical(_) => EXIT_NUMERICAL,
    }
}

pub const CSV_HEADER: &str =
    "family,epsilon,tau,norm,nodes,n,log10_lower,log10_witness,log10_empirical,log10_upper,precision_digits,status";

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub family: Family,
    pub norm: Norm,
    pub nodes: NodeScheme,
    pub n_min: usize,
    pub n_max: usize,
    pub precision: Precision,
    pub truncation_tol: f64,
    pub grid_size: usize,
    pub allow_inapplicable: bool,
}

impl ExperimentConfig {
    pub fn new(family: Family) -> Self {
        Self {
            family,
            norm: Norm::Sup,
            nodes: NodeScheme::Chebyshev,
            n_min: 1,
            n_max: 30,
            precision: Precision::default(),
            truncation_tol: 1e-30,
            grid_size: 4096,
            allow_inapplicable: false,
        }
    }

    pub fn worst_case_config(&self) -> WorstCaseConfig {
        WorstCaseConfig {
            norm: self.norm,
            truncation_tol: self.truncation_tol,
            grid_size: self.grid_size,
            precision: self.precision,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        if self.n_min == 0 || self.n_min > self.n_max {
            return Err(Error::Config(format!("empty n range {}..={}", self.n_min, self.n_max)));
        }
        if self.precision.digits() < MIN_DIGITS {
            return Err(Error::Config(format!("precision must be at least {MIN_DIGITS} digits")));
        }
        self.worst_case_config().validate()
    }

    /// `n` values of the sweep; a node file fixes `n` to its length.
    pub fn ns(&self) -> Result<Vec<usize>> {
        if let NodeScheme::File(path) = &self.nodes {
            let n = crate::approximators::nodes_from_file(path, self.precision)?.len();
            return Ok(vec![n]);
        }
        Ok((self.n_min..=self.n_max).collect())
    }

    /// Refuses ranges below `m_L(λ)` unless inapplicable rows were asked for.
    fn check_applicability(&self, ns: &[usize]) -> Result<()> {
        if self.allow_inapplicable {
            return Ok(());
        }
        let seq = AlphaSequence::new(self.family)?;
        match seq.lambda(self.precision) {
            None => Err(Error::Config(format!(
                "{} has no lambda certificate; use --allow-inapplicable",
                self.family
            ))),
            Some(lambda) => {
                let first = first_applicable_n(&lambda, self.precision);
                match ns.iter().find(|&&n| n < first) {
                    Some(n) => Err(Error::Config(format!(
                        "n={n} is below m_L = {:.4} (first applicable n is {first}); use --allow-inapplicable",
                        m_l(&lambda, self.precision).to_f64()
                    ))),
                    None => Ok(()),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    Violation,
    NotApplicable,
}

impl RowStatus {
    pub fn name(self) -> &'static str {
        match self {
            Self::Ok => "ok",
            Self::Violation => "violation",
            Self::NotApplicable => "not-applicable",
        }
    }
}

/// One `n` of a convergence sweep, magnitudes in log10.
#[derive(Debug, Clone)]
pub struct Row {
    pub n: usize,
    pub log10_lower: Option<f64>,
    pub log10_witness: f64,
    pub log10_empirical: f64,
    pub log10_upper: Option<f64>,
    pub certified_rel_error: f64,
    pub applicable: bool,
    pub status: RowStatus,
}

impl Row {
    /// Signed gaps of the chain `lower ≤ witness ≤ empirical ≤ upper` (log10).
    pub fn margins(&self) -> [Option<f64>; 3] {
        [
            self.log10_lower.map(|l| self.log10_witness - l),
            Some(self.log10_empirical - self.log10_witness),
            self.log10_upper.map(|u| u - self.log10_empirical),
        ]
    }

    /// Whether every available link of the chain holds, allowing for the empirical error estimate.
    pub fn chain_holds(&self) -> bool {
        let slack = self.certified_rel_error / std::f64::consts::LN_10 + 1e-12;
        self.margins().iter().flatten().all(|m| *m >= -slack)
    }
}

fn node_label(s: &NodeScheme) -> &'static str {
    match s {
        NodeScheme::Chebyshev => "chebyshev",
        NodeScheme::Equispaced => "equispaced",
        NodeScheme::Random { .. } => "random",
        NodeScheme::File(_) => "file",
    }
}

/// Weighted interpolation at the configured nodes against the theorem bounds.
/// Chebyshev rows use the minimal-error upper bound, other node sets the fixed-nodes bound.
pub fn convergence_row(cfg: &ExperimentConfig, n: usize) -> Result<Row> {
    let prec = cfg.precision;
    let kernel = Kernel::from_family(cfg.family)?;
    let nodes = node_set(&cfg.nodes, n, prec)?;
    let approx = LinearApproximation::weighted_polynomial(&kernel, nodes.clone(), prec)?;
    let emp = worst_case(&approx, &kernel, &cfg.worst_case_config())?;
    if !emp.accepted() {
        return Err(Error::Numerical(format!(
            "n={n}: worst-case estimate only certified to relative {:e}",
            emp.certified_rel_error
        )));
    }
    let witness = lower_bound_witness(&kernel, &nodes, cfg.norm, prec)?;
    let (lower, upper, applicable) = if kernel.alpha().lambda(prec).is_some() {
        let b = min_error_bounds(kernel.alpha(), kernel.weight(), cfg.norm, n, prec)?;
        let upper = if cfg.nodes == NodeScheme::Chebyshev {
            b.log10_upper()
        } else {
            ln_to_log10(&fixed_nodes_upper(kernel.alpha(), kernel.weight(), cfg.norm, n, prec)?)
        };
        (Some(b.log10_lower()), Some(upper), b.applicable)
    } else {
        (None, None, false)
    };
    let mut row = Row {
        n,
        log10_lower: lower,
        log10_witness: ln_to_log10(&witness.ln()),
        log10_empirical: emp.log10_value,
        log10_upper: upper,
        certified_rel_error: emp.certified_rel_error,
        applicable,
        status: RowStatus::Ok,
    };
    row.status = if !row.chain_holds() {
        RowStatus::Violation
    } else if !applicable {
        RowStatus::NotApplicable
    } else {
        RowStatus::Ok
    };
    Ok(row)
}

/// All rows, computed in parallel and returned in increasing `n`.
pub fn convergence(cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    cfg.validate()?;
    let ns = cfg.ns()?;
    cfg.check_applicability(&ns)?;
    ns.into_par_iter().map(|n| convergence_row(cfg, n)).collect()
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.6}"),
        Some(x) if x < 0.0 => "-inf".into(),
        _ => "nan".into(),
    }
}

fn fmt_param(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// CSV rows (header first, `# seed=N` before it for random nodes).
pub fn write_csv<W: Write>(out: &mut W, cfg: &ExperimentConfig, rows: &[Row]) -> std::io::Result<()> {
    if let NodeScheme::Random { seed } = cfg.nodes {
        writeln!(out, "# seed={seed}")?;
    }
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            cfg.family.name(),
            fmt_param(cfg.family.epsilon()),
            fmt_param(cfg.family.tau()),
            cfg.norm.name(),
            node_label(&cfg.nodes),
            r.n,
            fmt_opt(r.log10_lower),
            fmt_opt(Some(r.log10_witness)),
            fmt_opt(Some(r.log10_empirical)),
            fmt_opt(r.log10_upper),
            cfg.precision.digits(),
            r.status.name()
        )?;
    }
    Ok(())
}

/// Aligned text version of the rows, with chain margins.
pub fn format_table(rows: &[Row]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>4} {:>12} {:>12} {:>12} {:>12} {:>10} {:>10} {:>10}  status",
        "n", "lower", "witness", "empirical", "upper", "m(lo,wit)", "m(wit,emp)", "m(emp,up)"
    );
    for r in rows {
        let m = r.margins();
        let _ = writeln!(
            s,
            "{:>4} {:>12} {:>12} {:>12} {:>12} {:>10} {:>10} {:>10}  {}",
            r.n,
            fmt_opt(r.log10_lower),
            fmt_opt(Some(r.log10_witness)),
            fmt_opt(Some(r.log10_empirical)),
            fmt_opt(r.log10_upper),
            m[0].map(|v| format!("{v:.4}")).unwrap_or_else(|| "nan".into()),
            m[1].map(|v| format!("{v:.4}")).unwrap_or_else(|| "nan".into()),
            m[2].map(|v| format!("{v:.4}")).unwrap_or_else(|| "nan".into()),
            r.status.name()
        );
    }
    s
}

/// Unweighted against weighted interpolation error estimates for the Gaussian kernel.
#[derive(Debug, Clone)]
pub struct CompareReport {
    /// `(n, log10 unweighted, log10 weighted, ln(unweighted/weighted))`.
    pub rows: Vec<(usize, f64, f64, f64)>,
    /// Least-squares slope of the log-ratio per unit `n`; `None` for a single `n`.
    pub slope: Option<f64>,
}

/// Slope expected from the `2^{-n/2}` improvement.
pub fn compare_target_slope() -> f64 {
    std::f64::consts::LN_2 / 2.0
}

pub fn compare_weighted(epsilon: f64, n_min: usize, n_max: usize, prec: Precision) -> Result<CompareReport> {
    if n_min == 0 || n_min > n_max {
        return Err(Error::Config(format!("empty n range {n_min}..={n_max}")));
    }
    let rows = (n_min..=n_max)
        .into_par_iter()
        .map(|n| {
            let (u, w) = interpolation_estimates(epsilon, n, prec)?;
            let ratio = Float::with_val(prec.bits(), &u - &w).to_f64();
            Ok((n, ln_to_log10(&u), ln_to_log10(&w), ratio))
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.0 as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.3).collect();
    Ok(CompareReport {
        slope: fit_slope(&xs, &ys),
        rows,
    })
}

pub fn write_compare_csv<W: Write>(out: &mut W, epsilon: f64, rep: &CompareReport) -> std::io::Result<()> {
    writeln!(out, "family,epsilon,n,log10_unweighted,log10_weighted,ln_ratio")?;
    for (n, u, w, r) in &rep.rows {
        writeln!(out, "gaussian,{epsilon},{n},{u:.6},{w:.6},{r:.6}")?;
    }
    match rep.slope {
        Some(s) => writeln!(out, "# slope={s:.6} target={:.6}", compare_target_slope()),
        None => writeln!(out, "# slope=n/a target={:.6}", compare_target_slope()),
    }
}

/// Sizes of the verification suites.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub family: Family,
    /// Range for the coefficient-sum lemmas and the derivative-sum bound.
    pub n_min: usize,
    pub n_max: usize,
    pub cr2n_n_max: usize,
    pub laguerre_points: Vec<f64>,
    pub laguerre_n_max: usize,
    pub random_degree_max: usize,
    pub random_count: usize,
    pub markov_degree_max: usize,
    pub markov_count: usize,
    pub seed: u64,
    pub precision: Precision,
}

impl VerifyConfig {
    pub fn new(family: Family) -> Self {
        Self {
            family,
            n_min: 1,
            n_max: 40,
            cr2n_n_max: 100,
            laguerre_points: vec![0.25, 0.5, 1.0, 2.0, 4.0],
            laguerre_n_max: 500,
            random_degree_max: 25,
            random_count: 40,
            markov_degree_max: 30,
            markov_count: 100,
            seed: 1,
            precision: Precision::default(),
        }
    }
}

/// Divergence threshold for the negative control in `verify`: the factorial case stays below 1/8.
pub const VERIFY_DOMINATION_THRESHOLD: f64 = 10.0;

/// Runs every inequality suite that applies to the family.
pub fn verify(cfg: &VerifyConfig) -> Result<Vec<CheckSummary>> {
    cfg.family.validate()?;
    if cfg.n_min == 0 || cfg.n_min > cfg.n_max {
        return Err(Error::Config(format!("empty n range {}..={}", cfg.n_min, cfg.n_max)));
    }
    let prec = cfg.precision;
    let seq = AlphaSequence::new(cfg.family)?;
    let seqs = std::slice::from_ref(&seq);
    let ns = cfg.n_min..=cfg.n_max;
    let mut out = Vec::new();
    if seq.lambda(prec).is_some() {
        out.push(certify::alpha_assumption(seqs, cfg.cr2n_n_max, prec)?);
        out.push(certify::cr2n_inequality(seqs, cfg.n_min..=cfg.cr2n_n_max.max(cfg.n_max), prec)?);
        out.push(certify::chebyshev_sum_sandwich(seqs, ns.clone(), prec)?);
        out.push(certify::chebyshev_norm_sandwich(seqs, ns.clone(), prec)?);
        out.push(certify::labelle_sum_sandwich(seqs, ns, prec)?);
        let (sup, l2) = certify::random_norm_bounds(seqs, cfg.random_degree_max, cfg.random_count, cfg.seed, prec)?;
        out.push(sup);
        out.push(l2);
        out.push(certify::derivative_inequality(seqs, 5, 20, cfg.seed, prec)?);
    } else {
        let mut s = CheckSummary::new(format!("alpha assumption with lambda=10, {}", cfg.family));
        s.expected_failure = true;
        let rep = verify_alpha_assumption(&seq, &prec.float(10), 200, prec);
        s.checked = 1;
        s.violations = usize::from(!rep.holds);
        s.min_margin = if rep.holds { 0.0 } else { f64::NEG_INFINITY };
        s.worst_case = format!("first violation (k, n) = {:?}", rep.first_violation);
        out.push(s);
        out.push(certify::domination_control(&seq, 200, VERIFY_DOMINATION_THRESHOLD, prec)?);
    }
    out.push(certify::laguerre_inequality(&cfg.laguerre_points, cfg.laguerre_n_max, prec));
    out.push(certify::markov_inequality(cfg.markov_degree_max, cfg.markov_count, cfg.seed, prec));
    out.push(certify::labelle_inequality(cfg.markov_degree_max, cfg.markov_count, cfg.seed, prec)?);
    let gap = certify::labelle_equality_gap(prec)?;
    let mut eq = CheckSummary::new("Labelle equality at P(x)=x");
    eq.checked = 1;
    eq.violations = usize::from(gap >= 1e-25);
    eq.min_margin = -gap;
    eq.worst_case = format!("|l11*sqrt(2/3) - 1| = {gap:e}");
    out.push(eq);
    Ok(out)
}

/// Constants of the bounds for a family, as aligned text.
pub fn constants_table(family: Family, prec: Precision) -> Result<String> {
    let seq = AlphaSequence::new(family)?;
    let kernel = Kernel::from_family(family)?;
    let lambda = seq
        .lambda(prec)
        .ok_or_else(|| Error::NotApplicable(format!("{family} has no lambda certificate")))?;
    let (pmin, pmax) = (kernel.weight().phi_min(prec), kernel.weight().phi_max(prec));
    let sup = theorem_constants(&lambda, &pmin, &pmax, Norm::Sup, prec);
    let l2 = theorem_constants(&lambda, &pmin, &pmax, Norm::L2, prec);
    let entries: Vec<(&str, Float)> = vec![
        ("lambda", lambda.clone()),
        ("m_L", m_l(&lambda, prec)),
        ("c_L", c_l(&lambda, prec)),
        ("phi_min", pmin),
        ("phi_max", pmax),
        ("tau1", tau1(prec)),
        ("tau2", tau2(&lambda, prec)),
        ("ell1", ell1(prec)),
        ("ell2", ell2(&lambda, prec)),
        ("c1_inf", sup.c1),
        ("c2_inf", sup.c2),
        ("c1_l2", l2.c1),
        ("c2_l2", l2.c2),
    ];
    let mut s = format!("{family}\n");
    for (name, v) in entries {
        let _ = writeln!(s, "  {name:<8} {}", v.to_string_radix(10, Some(20)));
    }
    let _ = writeln!(s, "  {:<8} {}", "first_n", first_applicable_n(&lambda, prec));
    Ok(s)
}

/// Two-dimensional witness for several node counts.
pub fn multivariate_rows(epsilon: f64, norm: Norm, ns: &[usize], prec: Precision) -> Result<Vec<(usize, Float)>> {
    ns.par_iter()
        .map(|&n| Ok((n, multivariate_witness(epsilon, n, norm, prec)?)))
        .collect()
}
