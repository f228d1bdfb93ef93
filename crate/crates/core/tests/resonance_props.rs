use ilw_core::resonance::{
    jacobian_mu, jacobian_mu_fd, kdv_resonance_gap, kdv_resonance_gap_bound, xi_bo,
    xi_bo_factored, xi_kdv, xi_kdv_factored, xi_tilde, xi_tilde_direct, xi_tilde_series,
    FrequencyTriple, CANCELLATION_WARNING,
};
use ilw_core::DepthParameter;
use proptest::prelude::*;

fn entry() -> impl Strategy<Value = f64> {
    (any::<bool>(), -6.0f64..6.0).prop_map(|(neg, e)| if neg { -(10f64.powf(e)) } else { 10f64.powf(e) })
}

fn depth() -> impl Strategy<Value = DepthParameter> {
    (-4.0f64..1.0).prop_map(|e| DepthParameter::new(10f64.powf(e)).unwrap())
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn factorisations(a in entry(), b in entry()) {
        let t = FrequencyTriple::new(a, b);
        prop_assert!(rel(xi_kdv(&t), xi_kdv_factored(&t)) < 1e-12);
        prop_assert!(rel(xi_bo(&t), xi_bo_factored(&t)) < 1e-12);
        let [max, med, _] = t.ordered_magnitudes();
        prop_assert!(max <= 2.0 * med);
    }

    #[test]
    fn swap_and_sign_symmetry(d in depth(), a in entry(), b in entry()) {
        let t = FrequencyTriple::new(a, b);
        let v = xi_tilde(d, &t);
        prop_assert!(rel(v, xi_tilde(d, &t.swapped())) < 1e-12);
        prop_assert!(rel(-v, xi_tilde(d, &t.negated())) < 1e-12);
        prop_assert!(rel(xi_kdv(&t), xi_kdv(&t.swapped())) < 1e-12);
        prop_assert!(rel(-xi_bo(&t), xi_bo(&t.negated())) < 1e-12);
    }

    #[test]
    fn series_matches_direct_when_quiet(d in depth(), a in entry(), b in entry()) {
        let t = FrequencyTriple::new(a, b);
        let direct = xi_tilde_direct(d, &t);
        prop_assume!(direct.condition < CANCELLATION_WARNING);
        prop_assume!(d.value() * t.ordered_magnitudes()[0] <= 40.0);
        let s = xi_tilde_series(d, &t, 1e-16).unwrap().value;
        prop_assert!(rel(s, direct.value) < 1e-8);
    }

    #[test]
    fn sign_of_resonance(d in depth(), a in entry(), b in entry()) {
        let t = FrequencyTriple::new(a, b);
        let v = xi_tilde(d, &t);
        prop_assert_eq!(v.signum(), (t.xi() * a * b).signum());
    }

    #[test]
    fn gap_bound(d in depth(), a in entry(), b in entry()) {
        let t = FrequencyTriple::new(a, b);
        prop_assert!(kdv_resonance_gap(d, &t) <= kdv_resonance_gap_bound(d, &t) * (1.0 + 1e-12));
    }

    #[test]
    fn jacobian_matches_difference_quotient(d in depth(), u in 0.05f64..0.95, xi in 1.0f64..50.0) {
        let xi = xi.min(d.cutoff());
        let xi1 = u * xi;
        prop_assume!((xi - 2.0 * xi1).abs() >= 0.5 * xi);
        let mu = jacobian_mu(d, xi, xi1);
        let fd = jacobian_mu_fd(d, xi, xi1, 1e-3 * xi);
        prop_assert!(rel(mu, fd) < 1e-5);
        prop_assert_eq!(mu.signum(), (xi * (xi - 2.0 * xi1)).signum());
    }
}

#[test]
fn kdv_depth_reduces_to_cubic_resonance() {
    let t = FrequencyTriple::new(1.5, -0.25);
    assert_eq!(xi_tilde(DepthParameter::KDV, &t), xi_kdv(&t));
    assert_eq!(kdv_resonance_gap(DepthParameter::KDV, &t), 0.0);
}
