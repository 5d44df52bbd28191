//! Exploration schedules and parameter choices of the meta-algorithms.

use serde::{Deserialize, Serialize};

use crate::base::regret_bound;

/// Floor applied to every exploration probability.
pub const GAMMA_MIN: f64 = 1e-6;

pub fn clamp_probability(p: f64) -> f64 {
    if p.is_nan() {
        return GAMMA_MIN;
    }
    p.clamp(GAMMA_MIN, 1.0)
}

/// Number of experts `⌈M ln N'⌉`, at least 1.
pub fn m_tilde(m: usize, n_prime: usize) -> usize {
    let x = (m as f64 * (n_prime.max(1) as f64).ln()).ceil();
    (x as usize).max(1)
}

/// `((M̃ K ln K) / N')^{1/3}` clamped to `[GAMMA_MIN, 1]`.
pub fn gamma_known(m_tilde: usize, k: usize, n_prime: usize) -> f64 {
    let k_f = k as f64;
    clamp_probability((m_tilde as f64 * k_f * k_f.ln() / n_prime.max(1) as f64).cbrt())
}

/// Anytime version with the current segment index `n ≥ 1` in place of `N'`.
pub fn gamma_anytime(m_tilde: usize, k: usize, n: usize) -> f64 {
    gamma_known(m_tilde, k, n)
}

/// `√(|S_n| K τ / (N B_{τ,K}))`, clamped.
pub fn gbass_general(cover_size: usize, k: usize, tau: usize, n_tasks: usize, c_b: f64) -> f64 {
    let b = regret_bound(tau, k, c_b);
    clamp_probability((cover_size as f64 * k as f64 * tau as f64 / (n_tasks.max(1) as f64 * b)).sqrt())
}

/// `(τ/K)^{1/4} √(ln K / N)`, clamped.
pub fn ebass_schedule(tau: usize, k: usize, n_tasks: usize) -> f64 {
    let k_f = k as f64;
    clamp_probability((tau as f64 / k_f).powf(0.25) * (k_f.ln() / n_tasks.max(1) as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PmMode {
    Agnostic,
    #[default]
    Realizable,
}

/// Exploration probability and learning rate of the partial-monitoring
/// forecaster over `z` meta-actions and `n_tasks` rounds.
pub fn ewa_pm_tuning(mode: PmMode, c_info: f64, c_miss: f64, n_tasks: usize, z: f64) -> (f64, f64) {
    let ln_z = z.max(1.0).ln();
    let n = n_tasks.max(1) as f64;
    match mode {
        PmMode::Agnostic => {
            let p = (c_miss * c_miss * ln_z / (c_info * c_info * n)).cbrt();
            let eta = (ln_z * ln_z / (c_info * c_miss * c_miss * n * n)).cbrt();
            (clamp_probability(p), eta)
        }
        PmMode::Realizable => {
            let p = (c_miss * ln_z / (c_info * n)).sqrt();
            (clamp_probability(p), 1.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_tilde_examples() {
        // 10 ln 500 = 62.146, 2 ln 1000 = 13.816
        assert_eq!(m_tilde(10, 500), 63);
        assert_eq!(m_tilde(2, 1000), 14);
        assert_eq!(m_tilde(3, 1), 1);
    }

    #[test]
    fn gamma_examples() {
        // (14 · 10 · ln 10 / 1000)^{1/3} = (0.32236)^{1/3}
        let g = gamma_known(14, 10, 1000);
        assert!((g - 0.6857).abs() < 5e-4, "{g}");
        assert_eq!(gamma_known(14, 1, 1000), GAMMA_MIN);
        assert_eq!(gamma_known(14, 10, 5), 1.0);
        assert_eq!(gamma_anytime(14, 10, 1), 1.0);
        assert_eq!(gamma_anytime(14, 10, 1000), g);
        let mut prev = 1.0;
        for n in 1..5000 {
            let g = gamma_anytime(14, 10, n);
            assert!(g <= prev && g > 0.0);
            prev = g;
        }
    }

    #[test]
    fn gbass_general_examples() {
        // √(1 · 10 · 100 / (100 · √1000))
        let p = gbass_general(1, 10, 100, 100, 1.0);
        assert!((p - 0.5623).abs() < 5e-4, "{p}");
        for s in 1..10 {
            assert!(gbass_general(s, 10, 100, 100, 1.0) <= gbass_general(s + 1, 10, 100, 100, 1.0));
        }
    }

    #[test]
    fn ebass_examples() {
        // (2000/11)^{1/4} = 3.672, √(ln 11 / 400) = 0.0774
        let p = ebass_schedule(2000, 11, 400);
        assert!((p - 0.2843).abs() < 5e-4, "{p}");
        assert_eq!(ebass_schedule(2000, 1, 400), GAMMA_MIN);
        assert_eq!(ebass_schedule(100_000_000, 11, 4), 1.0);
        let mut prev = 1.0;
        for n in 1..2000 {
            let p = ebass_schedule(2000, 11, n);
            assert!(p <= prev);
            prev = p;
        }
    }

    #[test]
    fn pm_tuning_examples() {
        let e = std::f64::consts::E;
        let (p, eta) = ewa_pm_tuning(PmMode::Realizable, 5.0, 5.0, 1, e);
        assert!((p - 1.0).abs() < 1e-15);
        assert_eq!(eta, 1.0);
        let (p, _) = ewa_pm_tuning(PmMode::Realizable, 5.0, 5.0, 1, 3.0);
        assert_eq!(p, 1.0);

        let (p, eta) = ewa_pm_tuning(PmMode::Agnostic, 31.62, 100.0, 400, 55.0);
        assert!((p - 0.4646).abs() < 5e-4, "{p}");
        let expect_eta = (55f64.ln().powi(2) / (31.62 * 1e4 * 400.0 * 400.0)).cbrt();
        assert!((eta - expect_eta).abs() < 1e-15);

        let (p, eta) = ewa_pm_tuning(PmMode::Realizable, 31.62, 100.0, 400, 55.0);
        assert!((p - 0.178).abs() < 5e-4, "{p}");
        assert_eq!(eta, 1.0);
    }
}
