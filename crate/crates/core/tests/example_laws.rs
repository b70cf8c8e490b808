use std::cmp::Ordering;

use nacap_core::capacity::{
    capacity_sequence, classify_generic, classify_spherical, compare_within_precision, dirichlet_sequence, Certificate,
    VerdictKind, DEFAULT_VALUATION_THRESHOLD,
};
use nacap_core::field::{parse_lc, LcElement, One, OrderedField, Rational, Zero};
use nacap_core::graph::{SphericalProfile, WeightRule, WeightedGraph};
use nacap_core::potential::construct_superharmonic;
use nacap_core::transition::{
    contraction_certificate, neumann_partial, pn_element, pn_restricted, DecayCertificate, TransitionContext,
};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn path(rule: WeightRule) -> WeightedGraph<LcElement> {
    WeightedGraph::path(rule).unwrap()
}

fn lc(s: &str) -> LcElement {
    parse_lc(s).unwrap()
}

#[test]
fn null_certificate_at_several_roots() {
    let g = path(WeightRule::eps_pow_k());
    for root in [0, 1, 3] {
        let v = classify_generic(&g, root, 12, &q(DEFAULT_VALUATION_THRESHOLD, 1)).unwrap();
        assert!(v.is_null(), "root {root}");
        assert!(matches!(v.certificate, Certificate::NashWilliams(_)));
        assert!(v.recheck(&g, root).unwrap());
    }
}

#[test]
fn spherical_limit_matches_the_sequence() {
    let verdict = classify_spherical::<LcElement>(&SphericalProfile::path(WeightRule::eps_pow_neg_k()), 10).unwrap();
    let seq = capacity_sequence(&path(WeightRule::eps_pow_neg_k()), 0, 40).unwrap();
    assert!(seq.cap(40).approx_eq(verdict.limit().unwrap()));
    assert!(seq.cap(40).approx_eq(&lc("1 - 1*e^(1)")));
}

#[test]
fn solutions_tend_to_one_only_on_the_null_example() {
    let (_, null) = dirichlet_sequence(&path(WeightRule::eps_pow_k()), 0, 12).unwrap();
    let gaps: Vec<Rational> =
        null[1..].iter().map(|s| (LcElement::one() - s.value(1)).valuation().unwrap().clone()).collect();
    assert!(gaps.windows(2).all(|w| w[0] < w[1]), "{gaps:?}");

    let (_, pos) = dirichlet_sequence(&path(WeightRule::eps_pow_neg_k()), 0, 12).unwrap();
    let steps: Vec<Rational> =
        pos[1..].windows(2).map(|w| (w[1].value(1) - w[0].value(1)).valuation().unwrap().clone()).collect();
    assert!(steps.windows(2).all(|w| w[0] < w[1]), "{steps:?}");
    let last = pos.last().unwrap().value(1);
    assert_eq!(last.try_cmp(&LcElement::one()).unwrap(), Ordering::Less);
    assert!((last - lc("1*e^(1)")).valuation().unwrap() >= &q(12, 1));
}

#[test]
fn series_law_on_an_irregular_path() {
    let values = ["1", "2*e^(1)", "3*e^(-1)", "1/2 + 1*e^(1)", "5*e^(2)", "1*e^(-3)"];
    let g = path(WeightRule::List { values: values.iter().map(|s| s.to_string()).collect(), tail: None });
    let seq = capacity_sequence(&g, 0, 6).unwrap();
    let mut resistance = LcElement::zero();
    for (n, w) in values.iter().enumerate() {
        resistance = resistance + lc(w).try_inv().unwrap();
        assert!(seq.cap(n + 1).approx_eq(&resistance.try_inv().unwrap()), "n = {}", n + 1);
    }
}

#[test]
fn restriction_is_monotone_and_eventually_exact() {
    let ctx = TransitionContext::new(&path(WeightRule::EpsPowHalfPowK));
    let n = 6;
    let full = pn_element(&ctx, 0, 0, n).unwrap();
    let restricted: Vec<LcElement> =
        (0..6).map(|j| pn_restricted(&ctx, &(0..=j).collect::<Vec<_>>(), 0, 0, n).unwrap()).collect();
    for pair in restricted.windows(2) {
        assert_ne!(compare_within_precision(&pair[0], &pair[1]).unwrap(), Ordering::Greater);
    }
    for r in &restricted[3..] {
        assert!(r.approx_eq(&full));
    }
    assert_eq!(compare_within_precision(&restricted[0], &full).unwrap(), Ordering::Less);
}

#[test]
fn decay_certificate_does_not_depend_on_the_pair() {
    let ctx = TransitionContext::new(&path(WeightRule::eps_pow_neg_k()));
    for (x, y) in [(0, 0), (1, 0), (0, 1), (2, 3)] {
        let partial = neumann_partial(&ctx, None, x, y, 16).unwrap();
        assert!(matches!(partial.decay, Some(DecayCertificate::RecognizedProfile { .. })), "({x}, {y})");
    }
    let unit = TransitionContext::new(&path(WeightRule::constant("1")));
    for (x, y) in [(0, 0), (1, 0), (2, 3)] {
        assert!(neumann_partial(&unit, None, x, y, 12).unwrap().decay.is_none());
    }
}

#[test]
fn decay_agrees_with_capacity() {
    let pos = classify_spherical::<LcElement>(&SphericalProfile::path(WeightRule::eps_pow_neg_k()), 10).unwrap();
    assert!(matches!(pos.kind, VerdictKind::Positive { .. }));

    let profile = SphericalProfile::path(WeightRule::EpsPowHalfPowK);
    let verdict = classify_spherical::<LcElement>(&profile, 10).unwrap();
    let ctx = TransitionContext::new(&path(WeightRule::EpsPowHalfPowK));
    for j in 1..=5 {
        let set: Vec<_> = (0..=j).collect();
        assert!(contraction_certificate(&ctx, &set, 12).unwrap().is_some(), "L = 0..={j}");
    }
    assert!(!verdict.is_null());
}

#[test]
fn superharmonic_constructions_match_verdicts() {
    for rule in [WeightRule::constant("1"), WeightRule::eps_pow_neg_k()] {
        let g = path(rule.clone());
        let u = construct_superharmonic(&g, 0, &LcElement::one(), &LcElement::eps_int(1), 8).unwrap();
        assert!(u.check.holds);
        assert!(!u.check.laplacians.iter().all(|(_, d)| d.is_zero()));
        let verdict = classify_spherical::<LcElement>(&SphericalProfile::path(rule), 10).unwrap();
        assert!(!verdict.is_null());
    }
    let null = path(WeightRule::eps_pow_k());
    assert!(construct_superharmonic(&null, 0, &LcElement::one(), &LcElement::eps_int(1), 8).is_err());
}

#[test]
fn eps_is_below_unit_fractions() {
    for n in [1i64, 10, 1_000_000] {
        let frac = LcElement::from_rational(&q(1, n));
        assert_eq!(LcElement::eps_int(1).try_cmp(&frac).unwrap(), Ordering::Less);
        assert_eq!(LcElement::eps_int(1).try_cmp(&LcElement::zero()).unwrap(), Ordering::Greater);
    }
}
