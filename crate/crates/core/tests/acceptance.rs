//! One test per acceptance criterion. Oracles (brute force, closed forms,
//! exact expectations) are computed here, independently of the library code
//! under test.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bss_core::base::phased_elimination_tuned;
use bss_core::envgen::{draw_rewards, min_gap, EnvConfig, GapMode};
use bss_core::experts::{ExpertState, LearningRate};
use bss_core::game::{check_g_bound, saddle_point, solve_cost_to_go, CostTriple, ValueTable};
use bss_core::harness::{output, run_experiment, AlgorithmSpec, BogScheduleKind, RunConfig};
use bss_core::meta::cover::greedy_cover;
use bss_core::meta::og::{ogo_round, ExpertStack};
use bss_core::reward::check_submodular_monotone;
use bss_core::{NoiseModel, RewardVector, Subset, Task};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn within(start: Instant, limit: Duration, what: &str) {
    let took = start.elapsed();
    assert!(took < limit, "{what} took {took:?}, limit {limit:?}");
}

#[test]
fn submodularity_oracle_on_random_vectors() {
    let start = Instant::now();
    let mut rng = rng(11);
    for i in 0..1000 {
        let k = rng.gen_range(2..=8);
        let r = RewardVector::new((0..k).map(|_| rng.gen::<f64>()).collect()).unwrap();
        assert!(check_submodular_monotone(&r).unwrap(), "vector {i}: {:?}", r.values());
    }
    within(start, Duration::from_secs(10), "submodularity");
}

fn brute_force_hitting_set(sets: &[Vec<usize>], k: usize) -> usize {
    let mut best = k;
    for mask in 0u32..(1 << k) {
        if sets.iter().all(|s| s.iter().any(|&a| mask & (1 << a) != 0)) {
            best = best.min(mask.count_ones() as usize);
        }
    }
    best
}

#[test]
fn greedy_cover_within_log_factor_of_brute_force() {
    let start = Instant::now();
    let mut rng = rng(12);
    for i in 0..500 {
        let k = rng.gen_range(1..=10);
        let n_sets = rng.gen_range(1..=8);
        let raw: Vec<Vec<usize>> = (0..n_sets)
            .map(|_| {
                let mut s: Vec<usize> = (0..k).filter(|_| rng.gen_bool(0.3)).collect();
                if s.is_empty() {
                    s.push(rng.gen_range(0..k));
                }
                s
            })
            .collect();
        let sets: Vec<Subset> = raw.iter().map(|s| Subset::from_arms(s.iter().copied())).collect();
        let cover = greedy_cover(&sets).unwrap();
        for s in &raw {
            assert!(s.iter().any(|&a| cover.contains(a)), "instance {i}: {s:?} not hit");
        }
        let opt = brute_force_hitting_set(&raw, k) as f64;
        let bound = (1.0 + (n_sets as f64).ln()) * opt;
        assert!(cover.len() as f64 <= bound + 1e-12, "instance {i}: {} > {bound}", cover.len());
    }
    within(start, Duration::from_secs(10), "greedy cover");
}

/// Constant costs with `C_hit < C_info < C_miss`.
#[derive(Debug, Clone, Copy)]
struct Costs {
    info: f64,
    hit: f64,
    miss: f64,
}

impl Costs {
    fn triple(self) -> CostTriple {
        CostTriple::constant(self.info, self.hit, self.miss)
    }
}

/// 100 random cost configurations with `N ≤ 500`, `M ≤ 20`.
fn cost_suite() -> Vec<(usize, usize, Costs)> {
    let mut rng = rng(13);
    (0..100)
        .map(|_| {
            let c_miss = rng.gen_range(1.0..2000.0);
            let c_info = c_miss * rng.gen_range(0.01..0.99);
            let c_hit = c_info * rng.gen_range(0.0..0.99);
            (
                rng.gen_range(1..=500),
                rng.gen_range(1..=20),
                Costs {
                    info: c_info,
                    hit: c_hit,
                    miss: c_miss,
                },
            )
        })
        .collect()
}

/// `L(q, p)` written out from the game definition.
fn objective(t: &ValueTable, c: Costs, n: usize, s: usize, p: f64, q: f64) -> f64 {
    let next = t.value(n + 1, s);
    let g = next - t.value(n + 1, s + 1);
    c.hit + p * (c.info - c.hit) + next + q * (1.0 - p) * (c.miss - c.hit) - p * q * g
}

#[test]
fn dp_bound_suite() {
    let start = Instant::now();
    let mut rng = rng(14);
    for (i, (n, m, c)) in cost_suite().into_iter().enumerate() {
        let t = solve_cost_to_go(n, m, c.triple()).unwrap();
        let ctx = format!("config {i}: N={n} M={m} {c:?}");
        check_g_bound(&t).unwrap_or_else(|e| panic!("{ctx}: {e}"));

        let ab = (c.info - c.hit) * (c.miss - c.hit);
        for row in 0..=n {
            let bound = (2.0 * ab * (n - row) as f64).sqrt();
            for s in 0..m {
                let g = t.value(row, s) - t.value(row, s + 1);
                assert!(g <= bound * (1.0 + 1e-9) + 1e-9, "{ctx}: G[{row}][{s}]={g} > {bound}");
                // gap ordering: V_n(s) − V_n(s') grows with s'
                assert!(g >= -1e-9 * t.value(row, s).abs().max(1.0), "{ctx}: G[{row}][{s}]={g} < 0");
            }
        }

        let sum: f64 = (0..m).map(|s| t.value(0, s) - t.value(0, s + 1)).sum();
        let total = t.value(0, 0) - t.value(0, m);
        assert!((sum - total).abs() <= 1e-9 * total.abs().max(1e-300), "{ctx}: telescoping");
        assert!(total <= m as f64 * (2.0 * ab * n as f64).sqrt() * (1.0 + 1e-9), "{ctx}: total gap");

        let grid: Vec<f64> = (0..=100).map(|j| j as f64 / 100.0).collect();
        for _ in 0..3 {
            let (row, s) = (rng.gen_range(0..n), rng.gen_range(0..m));
            let (p, q) = saddle_point(&t, row, s).unwrap();
            let max_q = grid.iter().map(|&x| objective(&t, c, row, s, p, x)).fold(f64::MIN, f64::max);
            let min_p = grid.iter().map(|&x| objective(&t, c, row, s, x, q)).fold(f64::MAX, f64::min);
            assert!(max_q - min_p <= 1e-9 * c.miss, "{ctx}: saddle gap {} at ({row},{s})", max_q - min_p);
        }
    }
    within(start, Duration::from_secs(30), "DP suite");
}

#[test]
fn one_step_value_equals_c_info() {
    for (n, m, c) in cost_suite() {
        let t = solve_cost_to_go(n, m, c.triple()).unwrap();
        for s in 0..m {
            let v = t.value(n - 1, s);
            assert!((v - c.info).abs() <= 1e-12 * c.info, "N={n} s={s}: {v} vs {}", c.info);
        }
    }
}

#[test]
fn expert_regret_contract() {
    let start = Instant::now();
    let (k, v) = (10usize, 10_000usize);
    let bound = 2.0 * (v as f64 * (k as f64).ln()).sqrt() + (v as f64).sqrt();
    let mut ok = 0;
    for seed in 0..100 {
        let mut rng = rng(1000 + seed);
        let mut e = ExpertState::tuned(k, v).unwrap();
        let mut totals = vec![0.0; k];
        let mut got = 0.0;
        // adaptive stream: the currently weakest action pays 1, the rest noise
        for _ in 0..v {
            let a = e.advise(&mut rng);
            let weakest = (0..k).min_by(|&x, &y| totals[x].partial_cmp(&totals[y]).unwrap()).unwrap();
            let x: Vec<f64> = (0..k)
                .map(|b| if b == weakest { 1.0 } else { 0.5 * rng.gen::<f64>() })
                .collect();
            got += x[a];
            for (t, xi) in totals.iter_mut().zip(&x) {
                *t += xi;
            }
            e.update(&x).unwrap();
        }
        let regret = totals.iter().cloned().fold(f64::MIN, f64::max) - got;
        if regret <= bound {
            ok += 1;
        }
    }
    assert!(ok >= 95, "{ok}/100 seeds within {bound}");
    within(start, Duration::from_secs(20), "expert regret");
}

#[test]
fn ogo_importance_weighting_is_unbiased() {
    let (m_tilde, k, gamma, rounds) = (3usize, 4usize, 0.3, 100_000usize);
    let r = [0.1, 0.8, 0.4, 0.6];
    let g = |s: &[usize]| s.iter().map(|&a| r[a]).fold(0.0, f64::max);
    // zero learning rate: experts stay uniform, so the prefix law is known
    let mut stack = ExpertStack::new(m_tilde, k, LearningRate::Fixed(0.0)).unwrap();
    let mut sum = vec![vec![0.0; k]; m_tilde];
    let mut sq = vec![vec![0.0; k]; m_tilde];
    let mut rng = rng(15);
    for _ in 0..rounds {
        if let Some((i, a, x)) = ogo_round(&mut stack, gamma, g, &mut rng).unwrap().feedback {
            sum[i][a] += x;
            sq[i][a] += x * x;
        }
    }
    for i in 0..m_tilde {
        // E over uniform prefixes of length i of g(prefix ∪ {a})
        let prefixes = k.pow(i as u32);
        for a in 0..k {
            let mut mean_g = 0.0;
            for code in 0..prefixes {
                let mut c = code;
                let mut set = vec![a];
                for _ in 0..i {
                    set.push(c % k);
                    c /= k;
                }
                mean_g += g(&set);
            }
            let expect = gamma / (m_tilde * k) as f64 * mean_g / prefixes as f64;
            let n = rounds as f64;
            let mean = sum[i][a] / n;
            let se = ((sq[i][a] / n - mean * mean) / n).sqrt();
            assert!(
                (mean - expect).abs() <= 3.0 * se,
                "expert {i} arm {a}: {mean} vs {expect} (se {se})"
            );
        }
    }
}

#[test]
fn phased_elimination_identifies_under_min_gap() {
    let start = Instant::now();
    let mut env = EnvConfig::new(15, 5, 500, 4500);
    env.delta = Some(0.05);
    let gap = min_gap(&env);
    let mut exact = 0;
    for seed in 0..200 {
        let mut rng = rng(2000 + seed);
        let best = rng.gen_range(0..15);
        let r = draw_rewards(&env, best, &mut rng).unwrap();
        let argmax = (0..15).max_by(|&a, &b| r.get(a).partial_cmp(&r.get(b)).unwrap()).unwrap();
        let task = Task::new(r, env.tau).unwrap();
        let out = phased_elimination_tuned(&task, env.tau, 0.05 / env.n as f64, Some(gap), NoiseModel::Uniform, &mut rng)
            .unwrap();
        if out.surviving.arms() == [argmax] {
            exact += 1;
        }
    }
    assert!(exact >= 190, "{exact}/200 exact");
    within(start, Duration::from_secs(60), "phased elimination");
}

fn finals(cfg: &RunConfig) -> BTreeMap<String, Vec<f64>> {
    let mut out: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for rec in run_experiment(cfg).unwrap().records {
        out.entry(rec.trace.algorithm_id.clone()).or_default().push(rec.trace.final_regret());
    }
    out
}

fn wins(a: &[f64], b: &[f64], strict: bool) -> usize {
    a.iter().zip(b).filter(|(x, y)| if strict { x < y } else { x <= y }).count()
}

fn bog(schedule: BogScheduleKind) -> AlgorithmSpec {
    AlgorithmSpec::Bog {
        label: None,
        schedule,
        tau_prime: None,
        base: Default::default(),
    }
}

#[test]
fn scaled_orderings_min_gap_and_no_gap() {
    let start = Instant::now();
    let min_gap_cfg = RunConfig::new(
        EnvConfig::new(15, 5, 200, 1000),
        vec![
            AlgorithmSpec::OptMoss { label: None },
            AlgorithmSpec::Gbass {
                label: None,
                schedule: Default::default(),
                c_b: 1.0,
                base: Default::default(),
            },
            AlgorithmSpec::Moss { label: None },
        ],
    );
    let f = finals(&min_gap_cfg);
    let oracle_le = wins(&f["Opt-MOSS"], &f["G-BASS"], false);
    let gbass_lt = wins(&f["G-BASS"], &f["MOSS"], true);

    let mut env = EnvConfig::new(15, 5, 200, 200);
    env.gap = GapMode::NoGap;
    let no_gap_cfg = RunConfig::new(
        env,
        vec![
            bog(BogScheduleKind::Anytime),
            AlgorithmSpec::Ogo {
                label: None,
                gamma: None,
                base: Default::default(),
            },
            AlgorithmSpec::Moss { label: None },
        ],
    );
    let g = finals(&no_gap_cfg);
    let bog_ogo = wins(&g["BOG"], &g["OGo"], true);
    let bog_moss = wins(&g["BOG"], &g["MOSS"], true);
    within(start, Duration::from_secs(600), "ordering runs");

    let summary = format!(
        "Opt-MOSS<=G-BASS {oracle_le}/5, G-BASS<MOSS {gbass_lt}/5, BOG<OGo {bog_ogo}/5, BOG<MOSS {bog_moss}/5\n\
         min-gap finals {f:?}\nno-gap finals {g:?}"
    );
    assert!(oracle_le >= 4 && gbass_lt >= 4 && bog_ogo >= 4 && bog_moss >= 4, "{summary}");
}

#[test]
fn ebass_beats_moss_scaled() {
    let start = Instant::now();
    let cfg = RunConfig::new(
        EnvConfig::new(11, 2, 200, 1000),
        vec![
            AlgorithmSpec::Ebass {
                label: None,
                p: None,
                base: Default::default(),
            },
            AlgorithmSpec::Moss { label: None },
        ],
    );
    let f = finals(&cfg);
    within(start, Duration::from_secs(300), "E-BASS runs");
    let n = wins(&f["E-BASS"], &f["MOSS"], true);
    assert!(n >= 4, "E-BASS<MOSS {n}/5: {f:?}");
}

#[test]
fn csv_output_is_deterministic_across_thread_counts() {
    let mut env = EnvConfig::new(8, 3, 40, 300);
    env.master_seed = 99;
    let mut cfg = RunConfig::new(
        env,
        vec![
            bog(BogScheduleKind::Anytime),
            AlgorithmSpec::Ogo {
                label: None,
                gamma: None,
                base: Default::default(),
            },
            AlgorithmSpec::Gbass {
                label: None,
                schedule: Default::default(),
                c_b: 1.0,
                base: Default::default(),
            },
            AlgorithmSpec::Ebass {
                label: None,
                p: None,
                base: Default::default(),
            },
            AlgorithmSpec::Ewapm {
                label: None,
                mode: Default::default(),
                c_b: 1.0,
                base: Default::default(),
            },
            AlgorithmSpec::Moss { label: None },
            AlgorithmSpec::OptMoss { label: None },
        ],
    );
    cfg.checkpoint_every = 7;
    let mut files = Vec::new();
    for threads in [1, 4, 1, 4] {
        cfg.threads = Some(threads);
        let dir = tempfile::tempdir().unwrap();
        output::write_experiment(dir.path(), &run_experiment(&cfg).unwrap()).unwrap();
        let csv = std::fs::read(dir.path().join("traces.csv")).unwrap();
        let json = std::fs::read(dir.path().join("traces.json")).unwrap();
        files.push((csv, json));
    }
    let rows = String::from_utf8(files[0].0.clone()).unwrap().lines().count() - 1;
    // 7 algorithms x 5 seeds x ceil(40/7) checkpoints
    assert_eq!(rows, 7 * 5 * 6);
    for f in &files[1..] {
        assert_eq!(f, &files[0]);
    }
}
