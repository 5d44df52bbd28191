//! Property and oracle checks behind `bss verify`.
//!
//! Each check draws its own random instances from a fixed seed and compares
//! the library against a brute-force or closed-form oracle. `Level::Quick`
//! shrinks sample sizes and skips the Monte Carlo orderings.

use rand::Rng;
use rand::SeedableRng;

use crate::base::phased_elimination_tuned;
use crate::envgen::{draw_rewards, min_gap, EnvConfig, GapMode};
use crate::experts::{expert_regret, ExpertState, LearningRate};
use crate::game::{check_g_bound, check_table, solve_cost_to_go, verify_saddle_on_grid, CostTriple};
use crate::harness::{output, run_experiment, AlgorithmSpec, BogScheduleKind, RunConfig};
use crate::meta::cover::greedy_cover;
use crate::meta::og::{max_reward_oracle, ogo_round, ExpertStack};
use crate::reward::{check_submodular_monotone, NoiseModel, RewardVector};
use crate::rng::SimRng;
use crate::subset::Subset;
use crate::task::Task;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }

    fn error(e: crate::Error) -> Self {
        Self::new(false, format!("error: {e}"))
    }
}

pub struct Check {
    pub name: &'static str,
    /// Skipped under `Level::Quick`.
    pub full_only: bool,
    pub run: fn(Level) -> Outcome,
}

impl Check {
    pub fn runs_at(&self, level: Level) -> bool {
        level == Level::Full || !self.full_only
    }
}

pub static CHECKS: &[Check] = &[
    Check {
        name: "submodularity",
        full_only: false,
        run: submodularity,
    },
    Check {
        name: "greedy-cover",
        full_only: false,
        run: greedy_cover_quality,
    },
    Check {
        name: "dp-bounds",
        full_only: false,
        run: dp_bounds,
    },
    Check {
        name: "expert-regret",
        full_only: false,
        run: expert_regret_contract,
    },
    Check {
        name: "ogo-importance-weights",
        full_only: false,
        run: ogo_importance,
    },
    Check {
        name: "phased-elimination",
        full_only: false,
        run: pe_identification,
    },
    Check {
        name: "determinism",
        full_only: false,
        run: determinism,
    },
    Check {
        name: "ordering-min-gap",
        full_only: true,
        run: ordering_min_gap,
    },
    Check {
        name: "ordering-no-gap",
        full_only: true,
        run: ordering_no_gap,
    },
    Check {
        name: "ordering-ebass",
        full_only: true,
        run: ordering_ebass,
    },
];

fn rng(tag: u64) -> SimRng {
    SimRng::seed_from_u64(0x5eed_0000 + tag)
}

fn pick(level: Level, quick: usize, full: usize) -> usize {
    match level {
        Level::Quick => quick,
        Level::Full => full,
    }
}

fn submodularity(level: Level) -> Outcome {
    let mut rng = rng(1);
    let count = pick(level, 100, 1000);
    for i in 0..count {
        let k = rng.gen_range(2..=8);
        let r = RewardVector::new((0..k).map(|_| rng.gen()).collect()).expect("values in [0,1)");
        match check_submodular_monotone(&r) {
            Ok(true) => {}
            Ok(false) => return Outcome::new(false, format!("vector {i} ({:?}) not submodular", r.values())),
            Err(e) => return Outcome::error(e),
        }
    }
    Outcome::new(true, format!("{count} vectors"))
}

/// Smallest hitting set size by enumeration over arm bitmasks.
fn min_hitting_set(sets: &[Subset], k: usize) -> usize {
    let masks: Vec<u32> = sets
        .iter()
        .map(|s| s.arms().iter().fold(0, |m, &a| m | (1 << a)))
        .collect();
    (0u32..1 << k)
        .filter(|c| masks.iter().all(|m| m & c != 0))
        .map(u32::count_ones)
        .min()
        .unwrap_or(0) as usize
}

fn greedy_cover_quality(level: Level) -> Outcome {
    let mut rng = rng(2);
    let count = pick(level, 50, 500);
    let mut worst: f64 = 0.0;
    for i in 0..count {
        let k = rng.gen_range(1..=10);
        let n_sets = rng.gen_range(1..=8);
        let sets: Vec<Subset> = (0..n_sets)
            .map(|_| {
                let size = rng.gen_range(1..=k);
                Subset::from_arms(rand::seq::index::sample(&mut rng, k, size))
            })
            .collect();
        let cover = match greedy_cover(&sets) {
            Ok(c) => c,
            Err(e) => return Outcome::error(e),
        };
        if !sets.iter().all(|s| s.intersects(&cover)) {
            return Outcome::new(false, format!("instance {i}: cover misses a set"));
        }
        let opt = min_hitting_set(&sets, k);
        let bound = (1.0 + (n_sets as f64).ln()) * opt as f64;
        if cover.len() as f64 > bound + 1e-12 {
            return Outcome::new(false, format!("instance {i}: |cover|={} > {bound:.3}", cover.len()));
        }
        worst = worst.max(cover.len() as f64 / opt as f64);
    }
    Outcome::new(true, format!("{count} instances, worst ratio {worst:.3}"))
}

fn random_costs(rng: &mut SimRng) -> CostTriple {
    let c_miss = rng.gen_range(10.0..1000.0);
    let c_info = rng.gen_range(0.05..0.95) * c_miss;
    let c_hit = rng.gen_range(0.0..0.95) * c_info;
    CostTriple::constant(c_info, c_hit, c_miss)
}

fn dp_bounds(level: Level) -> Outcome {
    let mut rng = rng(3);
    let count = pick(level, 10, 100);
    let mut worst_dual: f64 = 0.0;
    for i in 0..count {
        let n = rng.gen_range(1..=500);
        let m = rng.gen_range(1..=20);
        let costs = random_costs(&mut rng);
        let fail = |what: String| Outcome::new(false, format!("config {i} (N={n}, M={m}, {costs:?}): {what}"));
        let table = match solve_cost_to_go(n, m, costs.clone()) {
            Ok(t) => t,
            Err(e) => return Outcome::error(e),
        };
        if let Err(e) = check_g_bound(&table) {
            return fail(e.to_string());
        }
        let checks = check_table(&table);
        if !checks.gap_ordering || !checks.boundary || !checks.per_round_floor {
            return fail(format!("{checks:?}"));
        }
        if checks.telescoping_rel_err > 1e-9 {
            return fail(format!("telescoping error {}", checks.telescoping_rel_err));
        }
        for s in 0..m {
            let v = table.value(n - 1, s);
            if (v - costs.c_info).abs() > 1e-12 * costs.c_info {
                return fail(format!("V[N-1][{s}]={v} != C_info"));
            }
        }
        for _ in 0..3 {
            let (row, s) = (rng.gen_range(0..n), rng.gen_range(0..m));
            match verify_saddle_on_grid(&table, row, s, 101) {
                Ok(c) if c.duality_gap <= 1e-9 * costs.c_miss => worst_dual = worst_dual.max(c.duality_gap),
                Ok(c) => return fail(format!("duality gap {} at ({row},{s})", c.duality_gap)),
                Err(e) => return Outcome::error(e),
            }
        }
    }
    Outcome::new(true, format!("{count} configs, worst grid duality gap {worst_dual:.2e}"))
}

/// Payoffs that reward whichever action currently trails, so the leader keeps
/// changing.
fn trailing_stream(k: usize, v: usize, rng: &mut SimRng) -> Vec<Vec<f64>> {
    let mut totals = vec![0.0; k];
    let mut out = Vec::with_capacity(v);
    for _ in 0..v {
        let low = (0..k)
            .min_by(|&a, &b| totals[a].partial_cmp(&totals[b]).unwrap())
            .unwrap_or(0);
        let x: Vec<f64> = (0..k)
            .map(|a| if a == low { 1.0 } else { rng.gen::<f64>() * 0.5 })
            .collect();
        for (t, xi) in totals.iter_mut().zip(&x) {
            *t += xi;
        }
        out.push(x);
    }
    out
}

fn expert_regret_contract(level: Level) -> Outcome {
    let (k, v) = (10, 10_000);
    let seeds = pick(level, 10, 100);
    let bound = 2.0 * (v as f64 * (k as f64).ln()).sqrt() + (v as f64).sqrt();
    let mut within = 0;
    for seed in 0..seeds {
        let mut rng = rng(400 + seed as u64);
        let payoffs = trailing_stream(k, v, &mut rng);
        let mut e = ExpertState::tuned(k, v).expect("k >= 1");
        let mut actions = Vec::with_capacity(v);
        for x in &payoffs {
            actions.push(e.advise(&mut rng));
            e.update(x).expect("payoffs in [0,1]");
        }
        if expert_regret(&payoffs, &actions).expect("aligned histories") <= bound {
            within += 1;
        }
    }
    let need = (0.95 * seeds as f64).ceil() as usize;
    Outcome::new(within >= need, format!("{within}/{seeds} seeds within {bound:.1}"))
}

fn ogo_importance(level: Level) -> Outcome {
    let (m_tilde, k, gamma) = (2, 3, 0.4);
    let rounds = pick(level, 20_000, 100_000);
    let r = RewardVector::new(vec![0.2, 0.7, 0.5]).expect("valid");
    let g = max_reward_oracle(&r);
    // a zero learning rate keeps every expert uniform
    let mut stack = ExpertStack::new(m_tilde, k, LearningRate::Fixed(0.0)).expect("valid stack");
    let mut sum = vec![vec![0.0; k]; m_tilde];
    let mut sq = vec![vec![0.0; k]; m_tilde];
    let mut rng = rng(5);
    for _ in 0..rounds {
        match ogo_round(&mut stack, gamma, &g, &mut rng) {
            Ok(step) => {
                if let Some((i, a, x)) = step.feedback {
                    sum[i][a] += x;
                    sq[i][a] += x * x;
                }
            }
            Err(e) => return Outcome::error(e),
        }
    }
    let scale = gamma / (m_tilde * k) as f64;
    let n = rounds as f64;
    let mut worst: f64 = 0.0;
    for i in 0..m_tilde {
        for a in 0..k {
            // expert 0 plays {a}; expert 1 plays {a_0, a} with a_0 uniform
            let expect = if i == 0 {
                r.get(a)
            } else {
                (0..k).map(|a0| r.get(a0).max(r.get(a))).sum::<f64>() / k as f64
            } * scale;
            let mean = sum[i][a] / n;
            let se = ((sq[i][a] / n - mean * mean).max(0.0) / n).sqrt();
            let z = (mean - expect).abs() / se.max(1e-300);
            worst = worst.max(z);
        }
    }
    Outcome::new(worst <= 3.0, format!("{rounds} rounds, worst |z| = {worst:.2}"))
}

fn pe_identification(level: Level) -> Outcome {
    let seeds = pick(level, 40, 200);
    let mut cfg = EnvConfig::new(15, 5, 500, 4500);
    cfg.delta = Some(0.05);
    let gap = min_gap(&cfg);
    let mut exact = 0;
    for seed in 0..seeds {
        let mut rng = rng(600 + seed as u64);
        let best = rng.gen_range(0..cfg.k);
        let task = draw_rewards(&cfg, best, &mut rng).and_then(|r| Task::new(r, cfg.tau));
        let out = task.and_then(|t| {
            phased_elimination_tuned(&t, t.len, cfg.delta_task(), Some(gap), NoiseModel::Uniform, &mut rng)
        });
        match out {
            Ok(o) if o.surviving == Subset::singleton(best) => exact += 1,
            Ok(_) => {}
            Err(e) => return Outcome::error(e),
        }
    }
    let need = (0.95 * seeds as f64).ceil() as usize;
    Outcome::new(exact >= need, format!("{exact}/{seeds} exact (gap {gap:.3})"))
}

fn determinism(level: Level) -> Outcome {
    let mut cfg = RunConfig::new(
        EnvConfig::new(6, 2, pick(level, 20, 60), 200),
        vec![
            AlgorithmSpec::Bog {
                label: None,
                schedule: BogScheduleKind::Anytime,
                tau_prime: None,
                base: Default::default(),
            },
            AlgorithmSpec::Gbass {
                label: None,
                schedule: Default::default(),
                c_b: 1.0,
                base: Default::default(),
            },
            AlgorithmSpec::Moss { label: None },
        ],
    );
    cfg.seeds = vec![0, 1, 2];
    let run = |threads| -> crate::Result<String> {
        let mut c = cfg.clone();
        c.threads = Some(threads);
        Ok(output::traces_csv(&run_experiment(&c)?.traces()))
    };
    match (run(1), run(4)) {
        (Ok(a), Ok(b)) => Outcome::new(a == b, format!("{} rows", a.lines().count() - 1)),
        (Err(e), _) | (_, Err(e)) => Outcome::error(e),
    }
}

/// Final regret per seed for each label, in seed order.
fn finals(cfg: &RunConfig) -> crate::Result<std::collections::BTreeMap<String, Vec<f64>>> {
    let exp = run_experiment(cfg)?;
    let mut out = std::collections::BTreeMap::<String, Vec<f64>>::new();
    for r in &exp.records {
        out.entry(r.trace.algorithm_id.clone())
            .or_default()
            .push(r.trace.final_regret());
    }
    Ok(out)
}

fn count_wins(a: &[f64], b: &[f64], strict: bool) -> usize {
    a.iter()
        .zip(b)
        .filter(|(x, y)| if strict { x < y } else { x <= y })
        .count()
}

/// Scaled stochastic min-gap setting with oracle, G-BASS and MOSS.
pub fn min_gap_config() -> RunConfig {
    RunConfig::new(
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
    )
}

/// Scaled stochastic no-gap setting with BOG, OGo and MOSS.
pub fn no_gap_config() -> RunConfig {
    let mut env = EnvConfig::new(15, 5, 200, 200);
    env.gap = GapMode::NoGap;
    RunConfig::new(
        env,
        vec![
            AlgorithmSpec::Bog {
                label: None,
                schedule: BogScheduleKind::Anytime,
                tau_prime: None,
                base: Default::default(),
            },
            AlgorithmSpec::Ogo {
                label: None,
                gamma: None,
                base: Default::default(),
            },
            AlgorithmSpec::Moss { label: None },
        ],
    )
}

/// Small-K setting where E-BASS can enumerate its hypothesis class.
pub fn ebass_config() -> RunConfig {
    RunConfig::new(
        EnvConfig::new(11, 2, 200, 1000),
        vec![
            AlgorithmSpec::Ebass {
                label: None,
                p: None,
                base: Default::default(),
            },
            AlgorithmSpec::Moss { label: None },
        ],
    )
}

fn ordering_min_gap(_: Level) -> Outcome {
    match finals(&min_gap_config()) {
        Ok(f) => {
            let a = count_wins(&f["Opt-MOSS"], &f["G-BASS"], false);
            let b = count_wins(&f["G-BASS"], &f["MOSS"], true);
            Outcome::new(a >= 4 && b >= 4, format!("Opt-MOSS<=G-BASS {a}/5, G-BASS<MOSS {b}/5"))
        }
        Err(e) => Outcome::error(e),
    }
}

fn ordering_no_gap(_: Level) -> Outcome {
    match finals(&no_gap_config()) {
        Ok(f) => {
            let a = count_wins(&f["BOG"], &f["OGo"], true);
            let b = count_wins(&f["BOG"], &f["MOSS"], true);
            Outcome::new(a >= 4 && b >= 4, format!("BOG<OGo {a}/5, BOG<MOSS {b}/5"))
        }
        Err(e) => Outcome::error(e),
    }
}

fn ordering_ebass(_: Level) -> Outcome {
    match finals(&ebass_config()) {
        Ok(f) => {
            let a = count_wins(&f["E-BASS"], &f["MOSS"], true);
            Outcome::new(a >= 4, format!("E-BASS<MOSS {a}/5"))
        }
        Err(e) => Outcome::error(e),
    }
}
