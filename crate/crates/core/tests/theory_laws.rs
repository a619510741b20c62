use cmlab::theory::{
    auto_trunc_k, complement_pmf, expected_complement, lambda_cycle, lambda_line,
    log_count_connected_simple, log_count_simple, p_connected, p_connected_given_simple,
    SERIES_TOL,
};
use cmlab::{DegreeSequence, LimitParams};
use proptest::prelude::*;

fn lp(rho1: f64, p2: f64, d: f64, nu: f64) -> LimitParams {
    LimitParams::new(rho1, p2, d, nu).unwrap()
}

fn grid() -> Vec<LimitParams> {
    let mut out = Vec::new();
    for rho1 in [0.0, 0.5, 1.0, 1.5, 2.5] {
        for p2 in [0.0, 0.1, 0.3, 0.6, 0.9] {
            for d in [2.0, 2.7, 3.5, 6.0] {
                out.push(lp(rho1, p2, d, 1.5));
            }
        }
    }
    out
}

fn lambda_total(p: &LimitParams) -> f64 {
    let mut total = 0.0;
    for k in 1..100_000 {
        let term = lambda_cycle(k, p).unwrap() + lambda_line(k, p).unwrap();
        total += term;
        if k > 2 && term < 1e-18 {
            break;
        }
    }
    total
}

#[test]
fn connectivity_is_poisson_void_probability() {
    let grid = grid();
    assert_eq!(grid.len(), 100);
    for p in &grid {
        let direct = p_connected(p).unwrap();
        assert!((direct - (-lambda_total(p)).exp()).abs() < 1e-9, "{p:?}");
        let pmf = complement_pmf(p, 50, auto_trunc_k(p).unwrap()).unwrap();
        assert!((pmf[0] - direct).abs() < 1e-9, "{p:?}");
    }
}

#[test]
fn complement_pmf_mass_and_mean() {
    let p = lp(1.0, 0.3, 2.7, 16.0 / 9.0);
    let pmf = complement_pmf(&p, 50, auto_trunc_k(&p).unwrap()).unwrap();
    let mass: f64 = pmf.iter().sum();
    assert!(mass >= 1.0 - 1e-6);
    let mean: f64 = pmf.iter().enumerate().map(|(x, q)| x as f64 * q).sum();
    let series = expected_complement(&p, SERIES_TOL).unwrap().value;
    assert!((mean - series).abs() <= 1e-6 + (1.0 - mass) * 50.0);
}

proptest! {
    #[test]
    fn connectivity_decreases_in_rho1(
        a in 0.0f64..3.0, gap in 1e-3f64..1.0, p2 in 0.0f64..0.9, d in 2.0f64..6.0,
    ) {
        let lo = p_connected(&lp(a, p2, d, 1.0)).unwrap();
        let hi = p_connected(&lp(a + gap, p2, d, 1.0)).unwrap();
        prop_assert!(hi < lo);
    }

    #[test]
    fn connectivity_decreases_in_p2(
        rho1 in 0.0f64..3.0, a in 0.0f64..0.8, gap in 1e-3f64..0.15, d in 2.0f64..6.0,
    ) {
        let lo = p_connected(&lp(rho1, a, d, 1.0)).unwrap();
        let hi = p_connected(&lp(rho1, a + gap, d, 1.0)).unwrap();
        prop_assert!(hi < lo);
    }

    #[test]
    fn conditioning_on_simple_helps(
        rho1 in 0.0f64..3.0, p2 in 0.0f64..0.9, d in 2.0f64..6.0, nu in 0.0f64..5.0,
    ) {
        let p = lp(rho1, p2, d, nu);
        let (plain, cond) = (p_connected(&p).unwrap(), p_connected_given_simple(&p).unwrap());
        if p2 == 0.0 {
            prop_assert_eq!(plain, cond);
        } else {
            prop_assert!(cond > plain);
        }
        let at_zero = lp(rho1, 0.0, d, nu);
        prop_assert_eq!(p_connected(&at_zero).unwrap(), p_connected_given_simple(&at_zero).unwrap());
    }

    #[test]
    fn connected_count_below_simple_count(
        n1 in 0u64..40, n2 in 0u64..200, n3 in 1u64..200, n4 in 0u64..50,
    ) {
        let n3 = n3 + (n1 + n3) % 2;
        let s = DegreeSequence::from_counts(&[(1, n1), (2, n2), (3, n3), (4, n4)]).unwrap();
        let p = s.window_params().to_limit_params();
        prop_assume!(p.in_window());
        prop_assert!(log_count_connected_simple(&s, &p).unwrap() <= log_count_simple(&s, &p).unwrap());
    }
}
