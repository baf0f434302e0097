use credal_core::persuasion::{
    bayesian_optimum, bll_device, device_prior_set, is_uniform_likelihood, receiver_response, sender_value, sweep,
    AmbiguousDevice, PersuasionGame,
};
use credal_core::UpdateRule;

/// Best split of the prior into two posteriors on a grid, valued by the
/// sender's payoff at the receiver's best response.
fn split_oracle(g: &PersuasionGame, steps: usize) -> f64 {
    let payoff = |q: f64| {
        let belief = [1.0 - q, q];
        let dot = |row: &[f64]| row[0] * belief[0] + row[1] * belief[1];
        let best = g.receiver_payoff.iter().map(|r| dot(r)).fold(f64::NEG_INFINITY, f64::max);
        (0..g.actions.len())
            .filter(|&a| dot(&g.receiver_payoff[a]) >= best - 1e-12)
            .map(|a| dot(&g.sender_payoff[a]))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let q0 = g.prior.probs()[1];
    let mut best = payoff(q0);
    for i in 0..=steps {
        let lo = q0 * i as f64 / steps as f64;
        for j in 0..=steps {
            let hi = q0 + (1.0 - q0) * j as f64 / steps as f64;
            if hi > lo {
                let w = (hi - q0) / (hi - lo);
                best = best.max(w * payoff(lo) + (1.0 - w) * payoff(hi));
            }
        }
    }
    best
}

#[test]
fn concavification_matches_split_search() {
    let g = PersuasionGame::example();
    let oracle = split_oracle(&g, 400);
    assert!((bayesian_optimum(&g, 10_000).unwrap() - oracle).abs() <= 1e-3);
}

#[test]
fn only_three_fifths_gives_uniform_likelihoods() {
    let g = PersuasionGame::example();
    for k in 0..=20 {
        let l = k as f64 / 20.0;
        let d = bll_device(l).unwrap();
        assert_eq!(is_uniform_likelihood(&d, &g), (l - 0.6).abs() < 1e-12, "lambda {l}");
    }
}

#[test]
fn joint_priors_are_kernel_products() {
    let g = PersuasionGame::example();
    let d = bll_device(0.4).unwrap();
    let c = device_prior_set(&g, &d).unwrap();
    assert_eq!(c.len(), 2);
    for v in c.vertices() {
        assert!((v.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // each state keeps its prior mass across messages
        for w in 0..2 {
            let mass: f64 = (0..3).map(|m| v.probs()[m * 2 + w]).sum();
            assert!((mass - 0.5).abs() < 1e-12);
        }
    }
}

#[test]
fn sweep_rows_are_lambda_major() {
    let g = PersuasionGame::example();
    let rows = sweep(&g, &[0.6, 0.9], &[0.0, 0.5, 1.0]).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows[..3].iter().all(|r| r.lambda == 0.6 && r.uniform_likelihood));
    assert!(rows[3..].iter().all(|r| r.lambda == 0.9 && !r.uniform_likelihood));
    assert!(rows[..3].iter().all(|r| (r.sender_value - 0.6).abs() < 1e-9));
}

#[test]
fn sender_value_never_exceeds_the_best_kernel_payoff() {
    let g = PersuasionGame::example();
    for k in 0..=10 {
        let l = k as f64 / 10.0;
        let d = bll_device(l).unwrap();
        for rule in [UpdateRule::FullBayes, UpdateRule::MaxLikelihood, UpdateRule::Rml(0.3)] {
            let v = sender_value(&g, &d, &rule).unwrap();
            assert!((-1.0..=1.0).contains(&v));
            let acts = receiver_response(&g, &d, &rule).unwrap();
            assert_eq!(acts.len(), 3);
        }
    }
}

#[test]
fn single_kernel_device_is_bayesian() {
    let g = PersuasionGame::example();
    // reveal wh with probability one, wl with probability one half
    let d = AmbiguousDevice::new(vec!["lo".into(), "hi".into()], vec![vec![vec![0.5, 0.0], vec![0.5, 1.0]]]).unwrap();
    let acts = receiver_response(&g, &d, &UpdateRule::FullBayes).unwrap();
    assert_eq!(acts, vec![Some(0), Some(1)]);
    let v = sender_value(&g, &d, &UpdateRule::FullBayes).unwrap();
    assert!((v - (-0.25)).abs() < 1e-12);
    assert!(v <= bayesian_optimum(&g, 1000).unwrap() + 1e-9);
}
