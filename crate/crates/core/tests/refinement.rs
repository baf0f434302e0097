use credal_core::refinement::{
    alpha_from_preference, minimizer_in_face, mix_threshold, separating_probe, shrink_threshold,
    sufficiently_good_threshold,
};
use credal_core::sampling::{random_act, random_credal, random_event, rng, SeededRng};
use credal_core::{conditional_ce, splice_const, update, Act, CredalSet, Event, UpdateRule};
use proptest::prelude::*;
use rand::Rng;

fn instance(r: &mut SeededRng) -> (CredalSet, Event) {
    loop {
        let n = r.gen_range(3..=5);
        let c = random_credal(r, n, 6, 0.02);
        if c.len() >= 2 {
            return (c, random_event(r, n, 1, n - 1));
        }
    }
}

fn in_face_on(c: &CredalSet, e: &Event, on_event: &Act, off: f64) -> bool {
    minimizer_in_face(c, e, &splice_const(on_event, e, off), 1e-12)
}

#[test]
fn threshold_is_tight() {
    let mut r = rng(21);
    let mut checked = 0;
    for _ in 0..200 {
        let (c, e) = instance(&mut r);
        let f = random_act(&mut r, c.n_states(), 0.0, 10.0);
        let t = sufficiently_good_threshold(&c, &e, &f).unwrap().value;
        assert!(in_face_on(&c, &e, &f, t + 1e-6));
        let ml = conditional_ce(&c, &e, &UpdateRule::MaxLikelihood, &f).unwrap();
        if t > ml + 1e-4 {
            assert!(!in_face_on(&c, &e, &f, t - 1e-6), "still in face below {t}");
            checked += 1;
        }
    }
    assert!(checked > 20);
}

#[test]
fn shrink_factor_matches_grid_scan() {
    let mut r = rng(22);
    let u_max = 10.0;
    let step = 1e-3;
    let mut checked = 0;
    while checked < 30 {
        let (c, e) = instance(&mut r);
        let f = random_act(&mut r, c.n_states(), 0.0, u_max);
        let k = shrink_threshold(&c, &e, &f, u_max).unwrap();
        if k > 20.0 {
            continue;
        }
        let scanned =
            (0..).map(|i| 1.0 + i as f64 * step).find(|&kk| in_face_on(&c, &e, &f.scale(1.0 / kk), u_max)).unwrap();
        assert!(scanned >= k - 1e-9 && scanned - k <= step + 1e-9, "grid {scanned} vs {k}");
        checked += 1;
    }
}

#[test]
fn mix_weight_matches_grid_scan() {
    let mut r = rng(23);
    let (u_min, u_max) = (0.0, 10.0);
    let step = 1e-4;
    for _ in 0..30 {
        let (c, e) = instance(&mut r);
        let f = random_act(&mut r, c.n_states(), u_min, u_max);
        let lambda = mix_threshold(&c, &e, &f, u_min, u_max).unwrap();
        let scanned = (0..=10_000)
            .map(|i| 1.0 - i as f64 * step)
            .find(|&l| in_face_on(&c, &e, &f.mix_const(u_min, l), u_max))
            .unwrap();
        assert!(scanned <= lambda + 1e-9 && lambda - scanned <= step + 1e-9, "grid {scanned} vs {lambda}");
    }
}

#[test]
fn probe_exists_exactly_when_rules_disagree() {
    let mut r = rng(24);
    for _ in 0..100 {
        let (c, e) = instance(&mut r);
        let fb = update(&c, &e, &UpdateRule::FullBayes).unwrap();
        let ml = update(&c, &e, &UpdateRule::MaxLikelihood).unwrap();
        match separating_probe(&c, &e).unwrap() {
            Some(p) => {
                let a = conditional_ce(&c, &e, &UpdateRule::FullBayes, &p).unwrap();
                let b = conditional_ce(&c, &e, &UpdateRule::MaxLikelihood, &p).unwrap();
                assert!(b - a > 1e-9);
            }
            None => assert!(fb.same_set(&ml)),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn alpha_roundtrip(seed in any::<u64>(), alpha in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let (c, e) = instance(&mut r);
        if let Some(probe) = separating_probe(&c, &e).unwrap() {
            let x = conditional_ce(&c, &e, &UpdateRule::Rml(alpha), &probe).unwrap();
            let est = alpha_from_preference(&c, &e, &probe, x).unwrap();
            prop_assert!(est.unique);
            prop_assert!((est.alpha - alpha).abs() <= 1e-6);
        }
    }
}
