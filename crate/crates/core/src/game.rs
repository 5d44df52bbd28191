//! Minimax cost-to-go of the explore/exploit game between a meta-learner and
//! an adversary revealing optimal arms.
//!
//! With `s` optimal arms discovered at round `n`, the learner explores with
//! probability `p` (paying `C_info` and learning any newly revealed arm) and
//! otherwise exploits, paying `C_hit(s)` or, if the adversary revealed a new
//! arm (probability `q`), `C_miss`. Backward induction gives
//!
//! ```text
//! V_N(s) = 0
//! V_n(M) = V_{n+1}(M) + C_hit(M)
//! V_n(s) = V_{n+1}(s) + C_hit + (C_info − C_hit)(C_miss − C_hit) / (C_miss − C_hit + G_{n+1}(s))
//! G_n(s) = V_n(s) − V_n(s+1)
//! ```
//!
//! and the saddle point `p = (C_miss − C_hit)/(C_miss − C_hit + G_{n+1}(s))`,
//! `q = (C_info − C_hit)/(C_miss − C_hit + G_{n+1}(s))`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// The three costs of the meta-game. `C_hit` may depend on the state `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostTriple {
    pub c_info: f64,
    /// `C_hit(s)` for `s = 0..=M`. A single entry means a constant.
    pub c_hit: Vec<f64>,
    pub c_miss: f64,
}

impl CostTriple {
    pub fn constant(c_info: f64, c_hit: f64, c_miss: f64) -> Self {
        Self {
            c_info,
            c_hit: vec![c_hit],
            c_miss,
        }
    }

    pub fn hit(&self, s: usize) -> f64 {
        match self.c_hit.len() {
            1 => self.c_hit[0],
            _ => self.c_hit[s.min(self.c_hit.len() - 1)],
        }
    }

    /// Checks `C_hit(s) ≤ C_info ≤ C_miss` and `C_hit(s) < C_miss` for `s ≤ m`.
    pub fn validate(&self, m: usize) -> Result<()> {
        let finite = self.c_info.is_finite()
            && self.c_miss.is_finite()
            && self.c_hit.iter().all(|c| c.is_finite());
        if !finite || self.c_hit.is_empty() {
            return Err(invalid("costs must be finite and C_hit nonempty"));
        }
        if self.c_hit.len() != 1 && self.c_hit.len() != m + 1 {
            return Err(invalid(format!(
                "C_hit has {} entries, expected 1 or M+1={}",
                self.c_hit.len(),
                m + 1
            )));
        }
        if self.c_info > self.c_miss {
            return Err(Error::CostOrder(format!(
                "C_info={} > C_miss={}",
                self.c_info, self.c_miss
            )));
        }
        for s in 0..=m {
            let h = self.hit(s);
            if h > self.c_info {
                return Err(Error::CostOrder(format!(
                    "C_hit({s})={h} > C_info={}",
                    self.c_info
                )));
            }
            if h >= self.c_miss {
                return Err(Error::CostOrder(format!(
                    "C_hit({s})={h} >= C_miss={}",
                    self.c_miss
                )));
            }
        }
        Ok(())
    }
}

/// Solved cost-to-go table, indexed `[n][s]` for `n = 0..=N`, `s = 0..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    n: usize,
    m: usize,
    costs: CostTriple,
    v: Vec<Vec<f64>>,
}

pub fn solve_cost_to_go(n: usize, m: usize, costs: CostTriple) -> Result<ValueTable> {
    costs.validate(m)?;
    let mut v = vec![vec![0.0; m + 1]; n + 1];
    for row in (0..n).rev() {
        let (head, tail) = v.split_at_mut(row + 1);
        let next = &tail[0];
        let cur = &mut head[row];
        cur[m] = next[m] + costs.hit(m);
        for s in 0..m {
            let h = costs.hit(s);
            let g = next[s] - next[s + 1];
            let a = costs.c_info - h;
            let b = costs.c_miss - h;
            cur[s] = next[s] + h + a * b / (b + g);
        }
    }
    Ok(ValueTable { n, m, costs, v })
}

impl ValueTable {
    pub fn horizon(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn costs(&self) -> &CostTriple {
        &self.costs
    }

    pub fn value(&self, n: usize, s: usize) -> f64 {
        self.v[n][s]
    }

    /// `G_n(s) = V_n(s) − V_n(s+1)`; zero at `s = M`.
    pub fn gap(&self, n: usize, s: usize) -> f64 {
        if s >= self.m {
            0.0
        } else {
            self.v[n][s] - self.v[n][s + 1]
        }
    }

    /// Telescoped `V_0(0) − V_0(M)`.
    pub fn total_gap(&self) -> f64 {
        self.v[0][0] - self.v[0][self.m]
    }
}

/// Saddle point `(p_n, q_n)` at round `n < N` with `s` discovered arms.
/// Returns `(0, 0)` once every optimal arm is known.
pub fn saddle_point(table: &ValueTable, n: usize, s: usize) -> Result<(f64, f64)> {
    if n >= table.n {
        return Err(invalid(format!("round {n} outside 0..{}", table.n)));
    }
    if s >= table.m {
        return Ok((0.0, 0.0));
    }
    let h = table.costs.hit(s);
    let g = table.gap(n + 1, s);
    let denom = table.costs.c_miss - h + g;
    Ok(((table.costs.c_miss - h) / denom, (table.costs.c_info - h) / denom))
}

/// `L(q, p)` for the single-new-arm adversary at round `n`, state `s < M`.
pub fn game_objective(p: f64, q: f64, table: &ValueTable, n: usize, s: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
        return Err(invalid("p and q must lie in [0,1]"));
    }
    if n >= table.n || s >= table.m {
        return Err(invalid(format!("(n={n}, s={s}) outside the open game region")));
    }
    let c = &table.costs;
    let h = c.hit(s);
    Ok(h + p * (c.c_info - h) + table.v[n + 1][s] + q * (1.0 - p) * (c.c_miss - h)
        - p * q * table.gap(n + 1, s))
}

/// Objective when the adversary may reveal one arm (prob `q1`) or two arms at
/// once (prob `q2`). Used to confirm multi-arm reveals never help it.
pub fn game_objective_two_reveal(
    p: f64,
    q1: f64,
    q2: f64,
    table: &ValueTable,
    n: usize,
    s: usize,
) -> Result<f64> {
    if s + 2 > table.m {
        return Err(invalid("two-arm reveal needs s + 2 <= M"));
    }
    let c = &table.costs;
    let h = c.hit(s);
    let next = &table.v[n + 1];
    Ok(h + p * (c.c_info - h) + next[s] + (q1 + q2) * (1.0 - p) * (c.c_miss - h)
        - p * (q1 * (next[s] - next[s + 1]) + q2 * (next[s] - next[s + 2])))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GBoundReport {
    /// Largest `G_n(s) / bound_n` over `n < N` (0 when every bound is 0).
    pub max_slack_ratio: f64,
    pub checked: usize,
}

/// Checks `G_n(s) ≤ √(2 (C_info − C_hit)(C_miss − C_hit)(N − n))` everywhere.
///
/// With a state-dependent `C_hit` the product is taken at its largest value
/// over `s`, which gives the loosest (most conservative) bound.
pub fn check_g_bound(table: &ValueTable) -> Result<GBoundReport> {
    let c = &table.costs;
    let ab = (0..=table.m)
        .map(|s| (c.c_info - c.hit(s)) * (c.c_miss - c.hit(s)))
        .fold(0.0f64, f64::max);
    let mut max_ratio = 0.0f64;
    let mut checked = 0;
    for n in 0..=table.n {
        let bound = (2.0 * ab * (table.n - n) as f64).sqrt();
        for s in 0..table.m {
            let g = table.gap(n, s);
            checked += 1;
            let tol = 1e-9 * bound.max(1.0);
            if g > bound + tol {
                return Err(Error::BoundViolation { n, s, g, bound });
            }
            if bound > 0.0 {
                max_ratio = max_ratio.max(g / bound);
            }
        }
    }
    Ok(GBoundReport {
        max_slack_ratio: max_ratio,
        checked,
    })
}

/// Outcome of the structural checks run on every solved table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableChecks {
    /// `V_n(s) ≥ V_n(s+1)` everywhere (equivalently, revealing more arms at
    /// once is worth more to the learner).
    pub gap_ordering: bool,
    /// `V_n(s) − V_{n+1}(s) ≥ C_hit(s)`.
    pub per_round_floor: bool,
    /// `V_N = 0` and `V_n(M) = (N − n) C_hit(M)`.
    pub boundary: bool,
    /// Relative error of `Σ_s G_0(s) = V_0(0) − V_0(M)`.
    pub telescoping_rel_err: f64,
}

pub fn check_table(table: &ValueTable) -> TableChecks {
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
    let tol = 1e-9;
    let mut gap_ordering = true;
    let mut per_round_floor = true;
    let mut boundary = table.v[table.n].iter().all(|&x| x == 0.0);
    for n in 0..=table.n {
        let expect_m = (table.n - n) as f64 * table.costs.hit(table.m);
        if rel(table.v[n][table.m], expect_m) > tol && expect_m != 0.0 {
            boundary = false;
        }
        for s in 0..table.m {
            if table.v[n][s] < table.v[n][s + 1] * (1.0 - tol) - tol {
                gap_ordering = false;
            }
        }
        if n < table.n {
            for s in 0..=table.m {
                let step = table.v[n][s] - table.v[n + 1][s];
                let h = table.costs.hit(s);
                if step < h - tol * h.abs().max(1.0) {
                    per_round_floor = false;
                }
            }
        }
    }
    let sum: f64 = (0..table.m).map(|s| table.gap(0, s)).sum();
    TableChecks {
        gap_ordering,
        per_round_floor,
        boundary,
        telescoping_rel_err: if table.m == 0 {
            0.0
        } else {
            rel(sum, table.total_gap())
        },
    }
}

/// Result of checking the saddle property on a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleCheck {
    /// `max_q L(p*, q) − min_p L(p, q*)`.
    pub duality_gap: f64,
    /// `max_{q1,q2} L(p*, q1, q2) − L(p*, q*)` when two-arm reveals exist.
    pub two_reveal_gain: Option<f64>,
}

pub fn verify_saddle_on_grid(table: &ValueTable, n: usize, s: usize, points: usize) -> Result<SaddleCheck> {
    let (p, q) = saddle_point(table, n, s)?;
    let grid: Vec<f64> = (0..points).map(|i| i as f64 / (points - 1) as f64).collect();
    let mut max_q = f64::NEG_INFINITY;
    let mut min_p = f64::INFINITY;
    for &x in &grid {
        max_q = max_q.max(game_objective(p, x, table, n, s)?);
        min_p = min_p.min(game_objective(x, q, table, n, s)?);
    }
    let two_reveal_gain = if s + 2 <= table.m {
        let base = game_objective(p, q, table, n, s)?;
        let mut best = f64::NEG_INFINITY;
        for &q1 in &grid {
            for &q2 in &grid {
                if q1 + q2 <= 1.0 + 1e-12 {
                    best = best.max(game_objective_two_reveal(p, q1, q2.min(1.0 - q1), table, n, s)?);
                }
            }
        }
        Some(best - base)
    } else {
        None
    };
    Ok(SaddleCheck {
        duality_gap: max_q - min_p,
        two_reveal_gain,
    })
}
