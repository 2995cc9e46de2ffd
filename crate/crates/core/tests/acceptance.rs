//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

use wpsk::approximators::{chebyshev_node_set, LinearApproximation};
use wpsk::bounds::{
    corollary_bounds, corollary_fixed_nodes_upper, first_applicable_n, fixed_nodes_upper, min_error_bounds,
    multivariate_witness,
};
use wpsk::certify::{self, CheckSummary};
use wpsk::harness::{self, ExperimentConfig, Row};
use wpsk::kernels::Kernel;
use wpsk::sequences::{AlphaSequence, Family};
use wpsk::worstcase::{pointwise_worst_case, WorstCaseConfig};
use wpsk::{Norm, Precision, Result};

const SEED: u64 = 20240601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn p() -> Precision {
    Precision::default()
}

fn summaries(list: &[CheckSummary]) -> Outcome {
    let pass = list.iter().all(CheckSummary::passed);
    let detail = list
        .iter()
        .map(|s| {
            format!(
                "{}: {}/{} violations, min margin {:+.3e} at [{}]",
                s.name, s.violations, s.checked, s.min_margin, s.worst_case
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    Outcome { pass, detail }
}

fn sweep(epsilon: f64, norm: Norm, ns: &[usize], allow: bool) -> Result<Vec<Row>> {
    let mut cfg = ExperimentConfig::new(Family::Gaussian { epsilon });
    cfg.norm = norm;
    cfg.allow_inapplicable = allow;
    ns.iter().map(|&n| harness::convergence_row(&cfg, n)).collect()
}

fn min_margin(rows: &[Row]) -> f64 {
    rows.iter()
        .flat_map(|r| r.margins())
        .flatten()
        .fold(f64::INFINITY, f64::min)
}

/// Chain `lower ≤ witness ≤ empirical ≤ upper` for Gaussian ε ∈ {0.5, 1, 2}
/// from the first applicable `n` to 30, plus out-of-range diagnostics for empty ranges.
fn chain(norm: Norm) -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for eps in [0.5, 1.0, 2.0] {
        let lambda = p().float(eps * eps);
        let first = first_applicable_n(&lambda, p());
        if first > 30 {
            let diag: Vec<usize> = (1..=6).map(|i| 5 * i).collect();
            let rows = sweep(eps, norm, &diag, true)?;
            let holds = rows.iter().all(Row::chain_holds);
            parts.push(format!(
                "eps={eps}: vacuous (first applicable n={first} > 30); outside range n=5..30 step 5 chain {} (min margin {:+.3})",
                if holds { "holds" } else { "broken" },
                min_margin(&rows)
            ));
            continue;
        }
        let ns: Vec<usize> = (first..=30).collect();
        let rows = sweep(eps, norm, &ns, false)?;
        let bad: Vec<usize> = rows.iter().filter(|r| !r.chain_holds()).map(|r| r.n).collect();
        let worst_err = rows.iter().map(|r| r.certified_rel_error).fold(0.0, f64::max);
        pass &= bad.is_empty();
        parts.push(format!(
            "eps={eps}: n={first}..30, {} violations {:?}, min margin {:+.4} log10, max estimate rel error {worst_err:.1e}",
            bad.len(),
            bad,
            min_margin(&rows)
        ));
    }
    outcome(pass, parts.join("; "))
}

fn rel_diff(a: &Float, b: &Float) -> f64 {
    let d = Float::with_val(a.prec(), a - b).abs();
    (d / Float::with_val(b.prec(), b.abs_ref())).to_f64()
}

fn corollaries() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    let mut count = 0;
    for fam in 0..4 {
        for _ in 0..20 {
            let eps = rng.random_range(0.2..3.0);
            let tau = rng.random_range(0.5..2.0);
            let n = rng.random_range(1..=80usize);
            let family = match fam {
                0 => Family::Gaussian { epsilon: eps },
                1 => Family::Exponential { epsilon: eps },
                2 => Family::Hermite { epsilon: eps, tau },
                _ => Family::Bessel { epsilon: eps },
            };
            let k = Kernel::from_family(family)?;
            for norm in [Norm::Sup, Norm::L2] {
                let c = corollary_bounds(family, norm, n, p())?;
                let t = min_error_bounds(k.alpha(), k.weight(), norm, n, p())?;
                let cf = corollary_fixed_nodes_upper(family, norm, n, p())?;
                let tf = fixed_nodes_upper(k.alpha(), k.weight(), norm, n, p())?;
                for (a, b) in [(&c.ln_lower, &t.ln_lower), (&c.ln_upper, &t.ln_upper), (&cf, &tf)] {
                    worst = worst.max(rel_diff(&a.clone().exp(), &b.clone().exp()));
                    count += 1;
                }
            }
        }
    }
    outcome(worst <= 1e-20, format!("{count} comparisons, max relative difference {worst:.2e}"))
}

fn cr2n() -> Result<Outcome> {
    let mut out = Vec::new();
    for lambda in [0.25, 1.0, 4.0] {
        let mut s = certify::cr2n_inequality(&certify::sequences_for_lambda(lambda)?, 1..=100, p())?;
        s.name = format!("lambda={lambda}");
        out.push(s);
    }
    Ok(summaries(&out))
}

fn laguerre() -> Result<Outcome> {
    Ok(summaries(&[certify::laguerre_inequality(&[0.25, 0.5, 1.0, 2.0, 4.0], 500, p())]))
}

fn norm_lemmas() -> Result<Outcome> {
    let mut seqs = Vec::new();
    for lambda in [0.25, 1.0, 4.0] {
        seqs.extend(certify::sequences_for_lambda(lambda)?);
    }
    let (sup, l2) = certify::random_norm_bounds(&seqs, 25, 200, SEED, p())?;
    Ok(summaries(&[
        certify::chebyshev_sum_sandwich(&seqs, 1..=40, p())?,
        certify::chebyshev_norm_sandwich(&seqs, 1..=40, p())?,
        certify::labelle_sum_sandwich(&seqs, 1..=40, p())?,
        sup,
        l2,
    ]))
}

fn coefficient_inequalities() -> Result<Outcome> {
    let mut o = summaries(&[
        certify::markov_inequality(30, 1000, SEED, p()),
        certify::labelle_inequality(30, 1000, SEED, p())?,
    ]);
    let gap = certify::labelle_equality_gap(p())?;
    o.pass &= gap <= 1e-25;
    o.detail.push_str(&format!("; |l11 sqrt(2/3) - 1| = {gap:.1e}"));
    Ok(o)
}

fn oracle_equivalence() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let cfg = WorstCaseConfig::default();
    let mut worst = 0.0f64;
    let mut count = 0;
    for family in [
        Family::Gaussian { epsilon: 1.0 },
        Family::Exponential { epsilon: 1.0 },
        Family::Hermite { epsilon: 1.0, tau: 1.0 },
        Family::Bessel { epsilon: 1.0 },
    ] {
        let k = Kernel::from_family(family)?;
        for n in 1..=12 {
            let a = LinearApproximation::kernel_interpolant(&k, chebyshev_node_set(n, p()), p())?;
            let gram = a.gram().expect("kernel interpolant has a Gram system");
            for _ in 0..50 {
                let x = p().float(rng.random_range(-1.0..=1.0));
                let onb = pointwise_worst_case(&a, &k, &x, &cfg)?;
                let g = gram.power_function(&x)?;
                worst = worst.max(rel_diff(&onb, &g));
                count += 1;
            }
        }
    }
    outcome(worst <= 1e-12, format!("{count} points, max relative difference {worst:.2e}"))
}

fn weighted_comparison() -> Result<Outcome> {
    let target = harness::compare_target_slope();
    let mut pass = true;
    let mut parts = Vec::new();
    for eps in [0.5, 1.0] {
        let rep = harness::compare_weighted(eps, 10, 25, p())?;
        let slope = rep.slope.unwrap_or(f64::NAN);
        let ok = (slope - target).abs() <= 0.1 * target;
        pass &= ok;
        parts.push(format!("eps={eps}: slope {slope:.4} vs {target:.4} (ratio {:.3})", slope / target));
    }
    outcome(pass, parts.join("; "))
}

fn negative_control() -> Result<Outcome> {
    let seq = AlphaSequence::new(Family::Power { beta: 0.5 })?;
    let cheb = certify::domination_growth(&seq, 200, 1e3, false, p())?;
    let lab = certify::domination_growth(&seq, 200, 1e3, true, p())?;
    let found = |r: &certify::DominationReport| r.first_exceeding.map_or("never".to_string(), |n| format!("n={n}"));
    outcome(
        cheb.first_exceeding.is_some() && lab.first_exceeding.is_some(),
        format!(
            "Chebyshev ratio max {:.4} at n={} (exceeds 1e3: {}); Labelle ratio max {:.4} at n={} (exceeds 1e3: {})",
            cheb.max_ratio,
            cheb.argmax,
            found(&cheb),
            lab.max_ratio,
            lab.argmax,
            found(&lab)
        ),
    )
}

fn multivariate() -> Result<Outcome> {
    let target = 5f64.sqrt().recip();
    let ws = [1, 10, 100]
        .iter()
        .map(|&n| multivariate_witness(1.0, n, Norm::Sup, p()))
        .collect::<Result<Vec<_>>>()?;
    let err = (ws[0].to_f64() - target).abs();
    let identical = ws.iter().all(|w| w == &ws[0]);
    outcome(
        err <= 1e-6 && identical,
        format!("witness {:.15} vs 1/sqrt(5), |diff| {err:.1e}, identical across n: {identical}", ws[0].to_f64()),
    )
}

fn scale_ordering() -> Result<Outcome> {
    let bounds = |eps: f64| {
        let k = Kernel::gaussian(eps)?;
        min_error_bounds(k.alpha(), k.weight(), Norm::Sup, 60, p())
    };
    let up = bounds(0.5)?.log10_upper();
    let lo = bounds(1.0)?.log10_lower();
    outcome(up < lo, format!("n=60: upper(eps=0.5) = {up:.4}, lower(eps=1) = {lo:.4} (log10)"))
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("sup-norm sandwich chain, Gaussian, Chebyshev nodes", || chain(Norm::Sup)),
        ("L2 sandwich chain, Gaussian, Chebyshev nodes", || chain(Norm::L2)),
        ("per-family closed forms match general bounds", corollaries),
        ("C_R^{2n} exact below its bound", cr2n),
        ("effective Laguerre bound", laguerre),
        ("Chebyshev/Labelle norm sandwiches and random norm bounds", norm_lemmas),
        ("Markov and Labelle coefficient inequalities", coefficient_inequalities),
        ("ONB residual vs Gram power function", oracle_equivalence),
        ("weighted vs unweighted interpolation slope", weighted_comparison),
        ("domination ratio divergence for k!^0.5", negative_control),
        ("two-dimensional witness", multivariate),
        ("scale-parameter ordering at n=60", scale_ordering),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run().unwrap_or_else(|e| Outcome {
            pass: false,
            detail: format!("error: {e}"),
        });
        failed += usize::from(!o.pass);
        println!(
            "{} [{:>2}] {name} ({:.1}s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            t.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
