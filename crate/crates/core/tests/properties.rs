use proptest::collection::vec;
use proptest::prelude::*;
use rand::SeedableRng;

use bss_core::envgen::{draw_rewards, min_gap, EnvConfig, GapMode};
use bss_core::experts::{ExpertState, LearningRate};
use bss_core::game::{saddle_point, solve_cost_to_go, CostTriple};
use bss_core::meta::cover::greedy_cover;
use bss_core::meta::schedule::{clamp_probability, ebass_schedule, gamma_anytime, GAMMA_MIN};
use bss_core::reward::f_max;
use bss_core::rng::{derive_seed, SimRng};
use bss_core::{RewardVector, Subset};

fn subset(k: usize) -> impl Strategy<Value = Subset> {
    vec(0..k, 1..=k).prop_map(Subset::from_arms)
}

proptest! {
    #[test]
    fn set_algebra(a in subset(12), b in subset(12)) {
        let u = a.union(&b);
        prop_assert!(a.is_subset_of(&u) && b.is_subset_of(&u));
        let i = a.intersection(&b);
        prop_assert!(i.is_subset_of(&a) && i.is_subset_of(&b));
        prop_assert_eq!(a.intersects(&b), !i.is_empty());
        let d = a.difference(&b);
        prop_assert!(!d.intersects(&b));
        prop_assert_eq!(d.len() + i.len(), a.len());
        prop_assert!(a.arms().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn f_max_is_monotone(r in vec(0.0..=1.0f64, 1..10), picks in vec(any::<prop::sample::Index>(), 1..6)) {
        let k = r.len();
        let rv = RewardVector::new(r).unwrap();
        let mut s = Subset::empty();
        let mut last = f64::NEG_INFINITY;
        for p in picks {
            s.insert(p.index(k)).unwrap();
            let v = f_max(&rv, &s).unwrap();
            prop_assert!(v >= last);
            last = v;
        }
        prop_assert!(last <= rv.max());
    }

    #[test]
    fn greedy_cover_hits_everything(sets in vec(subset(10), 0..12)) {
        let cover = greedy_cover(&sets).unwrap();
        prop_assert!(sets.iter().all(|s| s.intersects(&cover)));
        // never larger than one arm per set
        prop_assert!(cover.len() <= sets.len());
    }

    #[test]
    fn dp_value_and_saddle_invariants(
        n in 1usize..80,
        m in 1usize..8,
        miss in 1.0..500.0f64,
        info_frac in 0.01..0.99f64,
        hit_frac in 0.0..0.99f64,
    ) {
        let info = miss * info_frac;
        let hit = info * hit_frac;
        let t = solve_cost_to_go(n, m, CostTriple::constant(info, hit, miss)).unwrap();
        for row in 0..n {
            for s in 0..m {
                prop_assert!(t.value(row, s) >= t.value(row, s + 1) - 1e-9 * t.value(row, s));
                let (p, q) = saddle_point(&t, row, s).unwrap();
                prop_assert!(p > 0.0 && p <= 1.0 && q > 0.0 && q <= 1.0, "p={} q={}", p, q);
            }
            prop_assert_eq!(saddle_point(&t, row, m).unwrap(), (0.0, 0.0));
        }
    }

    #[test]
    fn expert_probabilities_form_a_distribution(
        k in 1usize..12,
        rounds in vec(vec(0.0..=1.0f64, 12), 0..40),
        eta in 0.0..5.0f64,
    ) {
        let mut e = ExpertState::new(k, LearningRate::Fixed(eta)).unwrap();
        for x in rounds {
            e.update(&x[..k]).unwrap();
            let p = e.probabilities();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(p.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }

    #[test]
    fn schedules_stay_in_range(m_tilde in 1usize..100, k in 1usize..50, n in 1usize..100_000, tau in 1usize..10_000) {
        for g in [gamma_anytime(m_tilde, k, n), ebass_schedule(tau, k, n), clamp_probability(f64::NAN)] {
            prop_assert!((GAMMA_MIN..=1.0).contains(&g));
        }
        prop_assert!(gamma_anytime(m_tilde, k, n + 1) <= gamma_anytime(m_tilde, k, n));
        prop_assert!(ebass_schedule(tau, k, n + 1) <= ebass_schedule(tau, k, n));
    }

    #[test]
    fn generated_rewards_respect_gap_mode(seed in any::<u64>(), k in 2usize..20, tau in 100usize..5000, no_gap in any::<bool>()) {
        let mut cfg = EnvConfig::new(k, 1, 100, tau);
        cfg.gap = if no_gap { GapMode::NoGap } else { GapMode::MinGap };
        let gap = min_gap(&cfg);
        let mut rng = SimRng::seed_from_u64(seed);
        let best = (seed % k as u64) as usize;
        let r = draw_rewards(&cfg, best, &mut rng).unwrap();
        prop_assert_eq!(r.optimal_set(), Subset::singleton(best));
        let second = (0..k).filter(|&a| a != best).map(|a| r.get(a)).fold(0.0, f64::max);
        if no_gap {
            prop_assert!(r.get(best) - second < gap);
        } else {
            prop_assert!(r.get(best) - second >= gap);
        }
    }

    #[test]
    fn seed_derivation_is_a_function(master in any::<u64>(), keys in vec(any::<u64>(), 0..4)) {
        prop_assert_eq!(derive_seed(master, &keys), derive_seed(master, &keys));
        let mut more = keys.clone();
        more.push(1);
        prop_assert_ne!(derive_seed(master, &keys), derive_seed(master, &more));
    }
}
