//! Randomized invariant checks across policies, graphs, and environments.

use proptest::prelude::*;

use gfb_core::env::{AdversarialEnv, RewardLaw, StochasticEnv};
use gfb_core::graph::{greedy_dominating_set, make_graph, DominatingSet, GraphFamily};
use gfb_core::policy::bobw::{BobwParams, BobwPolicy};
use gfb_core::policy::{Policy, RoundObservation};
use gfb_core::rng::StreamRng;

fn observable_graph_strategy() -> impl Strategy<Value = (usize, f64, u64)> {
    (2usize..9, 0.1f64..0.9, 0u64..10_000)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Every distribution the elimination policy emits stays on the simplex
    /// and the active sets only shrink, whatever the graph, rewards, or
    /// exploration schedule. 64 cases x ~160 rounds ~ 10^4 states.
    #[test]
    fn bobw_distributions_stay_on_the_simplex(
        (k, edge_prob, graph_seed) in observable_graph_strategy(),
        run_seed in 0u64..1_000_000,
        gamma_const in prop::option::of(0.3f64..4.0),
        best_mean in 0.55f64..0.95,
    ) {
        let graph = make_graph(GraphFamily::RandomObservable, k, Some(edge_prob), Some(graph_seed)).unwrap();
        let dom = greedy_dominating_set(&graph).unwrap();
        let mut params = BobwParams::new(graph.clone(), dom, 0.05).unwrap();
        if let Some(c) = gamma_const {
            params = params.with_gamma_const(c);
        }
        let mut policy: BobwPolicy<f64> = BobwPolicy::new(params, 200).unwrap();
        let mut policy_rng = StreamRng::new(run_seed, "policy", 0);
        let mut reward_rng = StreamRng::new(run_seed, "rewards", 0);
        let mut means = vec![0.25; k];
        means[0] = best_mean;
        let env = StochasticEnv::new(means, RewardLaw::Bernoulli).unwrap();

        let mut prev_active = policy.active_arms().len();
        let mut prev_dom = policy.active_dom_arms().len();
        for _ in 0..160 {
            let dist = policy.distribution().unwrap();
            prop_assert!(dist.check_simplex(1e-12).is_ok());
            prop_assert!(dist.probs.iter().all(|&p| p >= 0.0));
            let chosen = dist.sample(&mut policy_rng);
            let rewards = env.reward_vector(&mut reward_rng);
            let obs = RoundObservation::from_rewards(&graph, chosen, &rewards).unwrap();
            policy.update(&obs, &dist).unwrap();

            let active = policy.active_arms().len();
            let dom_active = policy.active_dom_arms().len();
            prop_assert!(active >= 1 && active <= prev_active);
            prop_assert!(dom_active <= prev_dom);
            prev_active = active;
            prev_dom = dom_active;
        }
    }

    /// Stochastic environments only emit rewards in [0, 1], and identical
    /// seeds reproduce identical streams.
    #[test]
    fn stochastic_rewards_stay_in_range(
        means in prop::collection::vec(0.0f64..=1.0, 2..8),
        width in 0.0f64..0.5,
        seed in 0u64..10_000,
        bernoulli in any::<bool>(),
    ) {
        let mut means = means;
        // Force a unique maximum.
        means[0] = 1.0;
        for m in means.iter_mut().skip(1) {
            *m = m.min(0.99);
        }
        let law = if bernoulli { RewardLaw::Bernoulli } else { RewardLaw::UniformPm { width } };
        let env = StochasticEnv::new(means, law).unwrap();
        let mut a = StreamRng::new(seed, "rewards", 0);
        let mut b = StreamRng::new(seed, "rewards", 0);
        for _ in 0..50 {
            let r1 = env.reward_vector(&mut a);
            let r2 = env.reward_vector(&mut b);
            prop_assert_eq!(&r1, &r2);
            prop_assert!(r1.iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
    }

    /// Adversarial generators are pure in (round, seed): any access order
    /// reproduces the same matrix, and all values stay in [0, 1].
    #[test]
    fn adversarial_emission_is_pure(
        k in 2usize..6,
        period in 1u64..40,
        seed in 0u64..10_000,
    ) {
        let base: Vec<f64> = (0..k).map(|i| (i as f64 + 0.5) / k as f64).collect();
        let env = AdversarialEnv::mean_switch(base, period, seed).unwrap();
        let forward: Vec<Vec<f64>> = (1..=120).map(|t| env.reward_vector(t).unwrap()).collect();
        for t in (1..=120u64).rev() {
            let row = env.reward_vector(t).unwrap();
            prop_assert_eq!(&row, &forward[(t - 1) as usize]);
            prop_assert!(row.iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
    }

    /// The greedy cover is always a valid dominating set and is stable under
    /// recomputation.
    #[test]
    fn greedy_cover_is_valid_and_deterministic(
        (k, edge_prob, graph_seed) in observable_graph_strategy(),
    ) {
        let graph = make_graph(GraphFamily::RandomObservable, k, Some(edge_prob), Some(graph_seed)).unwrap();
        let d1 = greedy_dominating_set(&graph).unwrap();
        let d2 = greedy_dominating_set(&graph).unwrap();
        prop_assert_eq!(d1.members(), d2.members());
        prop_assert!(DominatingSet::new(&graph, d1.members().to_vec()).is_ok());
    }
}
