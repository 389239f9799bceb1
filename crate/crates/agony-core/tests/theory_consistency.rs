//! The closed-form hierarchy curves must agree with the general-d
//! expected-agony sums on a large random grid of integer class counts.

use agony_core::theory::{
    expected_agony_direct, expected_agony_inverted, expected_m, hbar_direct_d1, hbar_direct_d2,
    hbar_inverted_d1, hbar_inverted_d2, hbar_planted, optimal_summary_d0, thresholds_d2,
    TheoryError, TheoryInputs,
};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn rel_close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0)
}

#[test]
fn closed_forms_match_general_sums_on_a_random_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_613);
    let mut checked = 0u32;
    while checked < 1000 {
        let a = 2 + rng.next_u32() % 6; // 2..=7
        let r = 1u32 << a;
        let rt = 1 + rng.next_u32() % r; // integer merged class count
        let b = f64::from(a) - f64::from(rt).log2();
        let p = 0.05 + 0.95 * unit(&mut rng);
        let q = p * unit(&mut rng);
        let s = 0.8 * p * unit(&mut rng);
        let n = f64::from(1 + rng.next_u32() % 200);
        let em = expected_m(p, q, s, a, n);
        if em <= 0.0 {
            continue;
        }
        let inputs = TheoryInputs::new(p, q, s, a, b, n).unwrap();
        type Curve = fn(f64, f64, f64, f64, u32) -> Result<f64, TheoryError>;
        let cases: [(f64, Curve, Curve); 2] =
            [(1.0, hbar_direct_d1, hbar_inverted_d1), (2.0, hbar_direct_d2, hbar_inverted_d2)];
        for (d, direct, inverted) in cases {
            let from_sum = 1.0 - expected_agony_direct(d, &inputs).unwrap() / em;
            let closed = direct(b, p, q, s, a).unwrap();
            assert!(
                rel_close(from_sum, closed, 1e-10),
                "direct d={d} a={a} rt={rt} p={p} q={q} s={s}: {from_sum} vs {closed}"
            );
            let from_sum_inv = 1.0 - expected_agony_inverted(d, &inputs).unwrap() / em;
            let closed_inv = inverted(b, p, q, s, a).unwrap();
            assert!(
                rel_close(from_sum_inv, closed_inv, 1e-10),
                "inverted d={d} a={a} rt={rt} p={p} q={q} s={s}: {from_sum_inv} vs {closed_inv}"
            );
        }
        // b = 0 reproduces the planted estimate.
        let planted_inputs = TheoryInputs::new(p, q, s, a, 0.0, n).unwrap();
        let planted_sum = 1.0 - expected_agony_direct(1.0, &planted_inputs).unwrap() / em;
        assert!(rel_close(planted_sum, hbar_planted(1.0, p, q, s, r).unwrap(), 1e-10));
        checked += 1;
    }
}

#[test]
fn singleton_split_closed_form_matches_the_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let a = 2 + rng.next_u32() % 4; // 2..=5
        let n_exp = 1 + rng.next_u32() % 5; // class size 2..=32, power of two
        let n = f64::from(1u32 << n_exp);
        let p = 0.1 + 0.9 * unit(&mut rng);
        let q = p * unit(&mut rng);
        let s = 0.5 * p * unit(&mut rng);
        let n_total = (n as u64) << a;
        let closed = optimal_summary_d0(p, q, s, a, n_total).unwrap();
        let inputs = TheoryInputs::new(p, q, s, a, -n.log2(), n).unwrap();
        let via_sum =
            1.0 - expected_agony_direct(0.0, &inputs).unwrap() / expected_m(p, q, s, a, n);
        assert!(
            rel_close(closed.hbar_star, via_sum, 1e-10),
            "a={a} n={n} p={p} q={q} s={s}: {} vs {via_sum}",
            closed.hbar_star
        );
        assert_eq!(closed.r_star, n_total);
    }
}

#[test]
fn planted_estimate_decreases_in_s_and_increases_in_p() {
    let mut prev = f64::INFINITY;
    for i in 0..20 {
        let s = 0.001 + 0.02 * f64::from(i);
        let h = hbar_planted(1.0, 0.5, 0.3, s, 16).unwrap();
        assert!(h < prev);
        prev = h;
    }
    let mut prev = f64::NEG_INFINITY;
    for i in 1..=10 {
        let p = 0.05 * f64::from(i);
        let h = hbar_planted(1.0, p, 0.04, 0.01, 16).unwrap();
        assert!(h > prev);
        prev = h;
    }
}

#[test]
fn d2_military_threshold_ordering_holds_for_many_a() {
    for a in 2..=12u32 {
        for p in [0.2, 0.5, 0.9] {
            let th = thresholds_d2(p, 0.0, None, a).unwrap();
            assert!(th.s_21_0 < th.s_22_i, "a={a} p={p}");
            assert!((th.s_23_i - 3.0 * th.s_22_i).abs() < 1e-15);
        }
    }
}
