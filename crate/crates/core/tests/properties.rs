use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Float;

use wpsk::approximators::{
    barycentric_basis, barycentric_weights, chebyshev_node_set, lagrange_basis_direct, power_function_gram, random_nodes,
    LinearApproximation,
};
use wpsk::bounds::fixed_nodes_upper;
use wpsk::classical::{chebyshev, labelle_check, markov_envelope_check, node_polynomial, random_polynomial};
use wpsk::kernels::{cr2n_exact, EvalMode, Kernel};
use wpsk::precision::ln_to_log10;
use wpsk::rkhs::SeriesFunction;
use wpsk::sequences::{AlphaSequence, Family};
use wpsk::worstcase::{lower_bound_witness, pointwise_worst_case, worst_case, WorstCaseConfig};
use wpsk::{Norm, Precision};

fn p() -> Precision {
    Precision::default()
}

fn rel(a: &Float, b: &Float) -> f64 {
    let d = Float::with_val(a.prec(), a - b).abs().to_f64();
    d / b.to_f64().abs().max(f64::MIN_POSITIVE)
}

fn family(idx: usize, eps: f64, tau: f64) -> Family {
    match idx % 4 {
        0 => Family::Gaussian { epsilon: eps },
        1 => Family::Exponential { epsilon: eps },
        2 => Family::Hermite { epsilon: eps, tau },
        _ => Family::Bessel { epsilon: eps },
    }
}

fn cfg(norm: Norm) -> WorstCaseConfig {
    WorstCaseConfig {
        norm,
        ..WorstCaseConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_form_matches_series(idx in 0usize..4, eps in 0.3f64..2.5, tau in 0.3f64..1.5, x in -1f64..1.0, y in -1f64..1.0) {
        let k = Kernel::from_family(family(idx, eps, tau)).unwrap();
        let (x, y) = (p().float(x), p().float(y));
        let c = k.eval(&x, &y, EvalMode::ClosedForm, p()).unwrap();
        let s = k.eval(&x, &y, EvalMode::Series { tol: 1e-40 }, p()).unwrap();
        prop_assert!(rel(&s, &c) < 1e-25, "{} vs {}", s, c);
    }

    #[test]
    fn log_alpha_increments_increase(idx in 0usize..4, eps in 0.1f64..4.0, tau in 0.2f64..2.0, k in 1usize..150) {
        let seq = AlphaSequence::new(family(idx, eps, tau)).unwrap();
        let d0 = Float::with_val(200, seq.log_alpha(k, p()) - seq.log_alpha(k - 1, p()));
        let d1 = Float::with_val(200, seq.log_alpha(k + 1, p()) - seq.log_alpha(k, p()));
        prop_assert!(d1 > d0);
    }

    #[test]
    fn declared_lambda_certifies_assumption(idx in 0usize..4, eps in 0.1f64..4.0, tau in 0.2f64..2.0) {
        let seq = AlphaSequence::new(family(idx, eps, tau)).unwrap();
        prop_assert!(seq.verify_assumption(100, p()).unwrap().holds);
    }

    #[test]
    fn markov_holds_on_chebyshev_blends(m in 0usize..20, gap in 1usize..12, a in 0f64..1.0) {
        let n = m + gap;
        let tn = chebyshev(n, p()).polynomial().scale(&p().float(a));
        let tm = chebyshev(m, p()).polynomial().scale(&p().float(1.0 - a));
        let rep = markov_envelope_check(&tn.add(&tm), p());
        prop_assert!(!rep.applicable || rep.holds, "ratio {}", rep.worst_ratio);
    }

    #[test]
    fn labelle_holds_on_random_polynomials(n in 1usize..30, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let poly = random_polynomial(n, &mut rng, p());
        prop_assume!(!poly.is_zero());
        prop_assert!(labelle_check(&poly, p()).unwrap().holds);
    }

    #[test]
    fn barycentric_matches_direct(n in 1usize..30, x in -1f64..1.0) {
        let nodes = chebyshev_node_set(n, p());
        let w = barycentric_weights(&nodes, p());
        let x = p().float(x);
        let a = barycentric_basis(&nodes, &w, &x, p());
        let b = lagrange_basis_direct(&nodes, &x, p());
        for (u, v) in a.iter().zip(&b) {
            prop_assert!(Float::with_val(200, u - v).abs() < 1e-20 * v.to_f64().abs().max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn weighted_interpolation_error_estimate(idx in 0usize..4, eps in 0.5f64..2.0, n in 5usize..20, deg in 0usize..40, seed in any::<u64>(), x in -1f64..1.0) {
        let k = Kernel::from_family(family(idx, eps, 1.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = SeriesFunction::embed(&random_polynomial(deg, &mut rng, p()), &k);
        prop_assume!(!f.polynomial().is_zero());
        let nodes = chebyshev_node_set(n, p());
        let a = LinearApproximation::weighted_polynomial(&k, nodes.clone(), p()).unwrap();
        let x = p().float(x);
        let err = Float::with_val(p().bits(), f.eval(&x, p()) - a.apply(&f, &x).unwrap()).abs();
        let omega = node_polynomial(&nodes, p()).unwrap().eval(&x).abs();
        let ln_c = cr2n_exact(k.alpha(), n, 1e-30, p()).unwrap() / 2u32;
        let ln_fact = wpsk::sequences::log_factorial(n as u64, p());
        let bound = k.weight().phi_max(p()) * f.norm(p()) * (ln_c - ln_fact).exp() * omega;
        let slack = Float::with_val(p().bits(), &bound * 1e-40) + 1e-45;
        prop_assert!(err <= Float::with_val(p().bits(), &bound + &slack), "{} > {}", err, bound);
    }

    #[test]
    fn weighted_interpolation_reproduces_low_monomials(idx in 0usize..4, n in 1usize..16, seed in any::<u64>(), x in -1f64..1.0) {
        let k = Kernel::from_family(family(idx, 1.0, 1.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = LinearApproximation::weighted_polynomial(&k, random_nodes(n, &mut rng, p()), p()).unwrap();
        let x = p().float(x);
        for deg in 0..n {
            let f = SeriesFunction::embed(&wpsk::classical::Polynomial::monomial(deg, p()), &k);
            let r = Float::with_val(p().bits(), f.eval(&x, p()) - a.apply(&f, &x).unwrap()).abs();
            prop_assert!(r < p().tolerance(), "k={} residual {}", deg, r);
        }
    }

    #[test]
    fn kernel_interpolant_is_pointwise_optimal(idx in 0usize..4, eps in 0.5f64..2.0, n in 1usize..12, seed in any::<u64>(), x in -1f64..1.0) {
        let k = Kernel::from_family(family(idx, eps, 1.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nodes = random_nodes(n, &mut rng, p());
        let ki = LinearApproximation::kernel_interpolant(&k, nodes.clone(), p()).unwrap();
        let wp = LinearApproximation::weighted_polynomial(&k, nodes.clone(), p()).unwrap();
        let x = p().float(x);
        let c = cfg(Norm::Sup);
        let a = pointwise_worst_case(&ki, &k, &x, &c).unwrap();
        let b = pointwise_worst_case(&wp, &k, &x, &c).unwrap();
        prop_assert!(a <= Float::with_val(p().bits(), &b * (1.0 + 1e-12)) + 1e-40);
        let g = power_function_gram(&k, nodes, &x, p()).unwrap();
        prop_assert!(Float::with_val(p().bits(), &a - &g).abs() <= Float::with_val(p().bits(), &g * 1e-12) + 1e-40);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn witness_below_every_worst_case(idx in 0usize..4, n in 1usize..10, seed in any::<u64>(), l2 in any::<bool>()) {
        let norm = if l2 { Norm::L2 } else { Norm::Sup };
        let k = Kernel::from_family(family(idx, 1.0, 1.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nodes = random_nodes(n, &mut rng, p());
        let w = lower_bound_witness(&k, &nodes, norm, p()).unwrap();
        let approxes = [
            LinearApproximation::polynomial(nodes.clone(), p()).unwrap(),
            LinearApproximation::weighted_polynomial(&k, nodes.clone(), p()).unwrap(),
            LinearApproximation::kernel_interpolant(&k, nodes, p()).unwrap(),
        ];
        for a in &approxes {
            let e = worst_case(a, &k, &cfg(norm)).unwrap();
            prop_assert!(e.accepted());
            prop_assert!(ln_to_log10(&w.clone().ln()) <= e.log10_value + 1e-9, "{:?}", a.kind());
        }
    }

    #[test]
    fn l2_error_below_sup_error(idx in 0usize..4, n in 1usize..12, seed in any::<u64>()) {
        let k = Kernel::from_family(family(idx, 1.0, 1.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = LinearApproximation::weighted_polynomial(&k, random_nodes(n, &mut rng, p()), p()).unwrap();
        let e2 = worst_case(&a, &k, &cfg(Norm::L2)).unwrap();
        let ei = worst_case(&a, &k, &cfg(Norm::Sup)).unwrap();
        prop_assert!(e2.log10_value <= ei.log10_value + 0.5 * 2f64.log10() + 1e-9);
    }

    #[test]
    fn random_nodes_below_fixed_nodes_bound(n in 9usize..16, seed in any::<u64>(), l2 in any::<bool>()) {
        let norm = if l2 { Norm::L2 } else { Norm::Sup };
        let k = Kernel::gaussian(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = LinearApproximation::weighted_polynomial(&k, random_nodes(n, &mut rng, p()), p()).unwrap();
        let e = worst_case(&a, &k, &cfg(norm)).unwrap();
        let up = ln_to_log10(&fixed_nodes_upper(k.alpha(), k.weight(), norm, n, p()).unwrap());
        prop_assert!(e.log10_value <= up, "{} > {}", e.log10_value, up);
    }
}
