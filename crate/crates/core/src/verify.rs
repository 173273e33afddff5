//! Seeded comparison of the closed forms against the density-matrix oracle.

use std::f64::consts::FRAC_PI_4;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distill_mixed::{distill_map, post_state_unnormalized, ParityWeights};
use crate::distill_pure::{pure_filter_fidelity, pure_post_state_unnormalized};
use crate::error::{Error, Result};
use crate::noise::purified_coeffs_gate_noisy_list;
use crate::oracle::{
    direct_mixed_full_register, direct_pure_full_register, fidelity_and_yield, oracle_distill_mixed,
    oracle_effective_povm, oracle_effective_povm_schrodinger, oracle_mixed_post_state,
    oracle_pure_post_state, MAX_DIRECT_QUBITS,
};

pub const VERIFY_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    /// Largest gadget size drawn for `n` and `m`.
    pub max_n: usize,
    pub seed: u64,
    /// Random draws per value of epsilon.
    pub draws: usize,
    pub epsilons: Vec<f64>,
    /// Also run the unreduced full-register simulations.
    pub full: bool,
    /// Added to every closed-form fidelity before comparison.
    pub analytic_offset: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            max_n: 3,
            seed: 2024,
            draws: 20,
            epsilons: vec![0.0, 0.05, 0.1],
            full: false,
            analytic_offset: 0.0,
        }
    }
}

/// Parameters of one compared case.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseParams {
    pub kind: &'static str,
    pub epsilon: f64,
    pub f: Option<f64>,
    pub theta: Option<f64>,
    pub p_a: Vec<f64>,
    pub p_b: Vec<f64>,
}

impl fmt::Display for CaseParams {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{} epsilon={}", self.kind, self.epsilon)?;
        if let Some(f) = self.f {
            write!(out, " F={f}")?;
        }
        if let Some(theta) = self.theta {
            write!(out, " theta={theta}")?;
        }
        write!(out, " pA={:?}", self.p_a)?;
        if !self.p_b.is_empty() {
            write!(out, " pB={:?}", self.p_b)?;
        }
        Ok(())
    }
}

/// Largest deviation seen for one compared quantity.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantityReport {
    pub name: &'static str,
    pub max_deviation: f64,
    pub cases: usize,
    pub worst: Option<CaseParams>,
}

impl QuantityReport {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            max_deviation: 0.0,
            cases: 0,
            worst: None,
        }
    }

    fn record(&mut self, deviation: f64, params: &CaseParams) {
        self.cases += 1;
        if deviation > self.max_deviation || deviation.is_nan() {
            self.max_deviation = deviation;
            self.worst = Some(params.clone());
        }
    }

    pub fn passed(&self) -> bool {
        self.max_deviation < VERIFY_TOLERANCE
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub quantities: Vec<QuantityReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.quantities.iter().all(QuantityReport::passed)
    }

    pub fn max_deviation(&self) -> f64 {
        self.quantities.iter().map(|q| q.max_deviation).fold(0.0, f64::max)
    }

    pub fn get(&self, name: &str) -> Option<&QuantityReport> {
        self.quantities.iter().find(|q| q.name == name)
    }
}

struct Tally {
    reports: Vec<QuantityReport>,
}

impl Tally {
    fn record(&mut self, name: &'static str, deviation: f64, params: &CaseParams) {
        let idx = match self.reports.iter().position(|r| r.name == name) {
            Some(i) => i,
            None => {
                self.reports.push(QuantityReport::new(name));
                self.reports.len() - 1
            }
        };
        self.reports[idx].record(deviation, params);
    }
}

fn draw_list(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(0.0..0.3)).collect()
}

fn check_mixed(tally: &mut Tally, cfg: &VerifyConfig, f: f64, p_a: &[f64], p_b: &[f64], eps: f64) -> Result<()> {
    let params = CaseParams {
        kind: "mixed",
        epsilon: eps,
        f: Some(f),
        theta: None,
        p_a: p_a.to_vec(),
        p_b: p_b.to_vec(),
    };
    let ca = purified_coeffs_gate_noisy_list(p_a, eps)?;
    let cb = purified_coeffs_gate_noisy_list(p_b, eps)?;
    let w = ParityWeights::from_coeffs(&ca, &cb);
    let analytic = distill_map(f, &w)?;
    let oracle = oracle_distill_mixed(f, p_a, p_b, eps)?;
    tally.record(
        "mixed_fidelity",
        (analytic.fidelity_out + cfg.analytic_offset - oracle.fidelity_out).abs(),
        &params,
    );
    tally.record("mixed_p_succ", (analytic.p_succ - oracle.p_succ).abs(), &params);

    let post = oracle_mixed_post_state(f, p_a, p_b, eps)?;
    tally.record(
        "mixed_post_state",
        post.max_abs_diff(&post_state_unnormalized(f, &w)?),
        &params,
    );

    for (list, coeffs) in [(p_a, &ca), (p_b, &cb)] {
        let h = oracle_effective_povm(list, eps, list.len())?;
        let s = oracle_effective_povm_schrodinger(list, eps, list.len())?;
        tally.record("povm_off_diagonal", h.max_off_diagonal(), &params);
        tally.record("povm_heisenberg_vs_schrodinger", h.max_abs_diff(&s), &params);
        let dev = (h.yield_prob_basis.0 - coeffs.r0)
            .abs()
            .max((h.yield_prob_basis.1 - coeffs.r1).abs());
        tally.record("povm_coefficients", dev, &params);
    }

    if cfg.full && p_a.len() + p_b.len() + 2 <= MAX_DIRECT_QUBITS {
        let direct = direct_mixed_full_register(f, p_a, p_b, eps)?;
        tally.record("direct_mixed_register", direct.max_abs_diff(&post), &params);
    }
    Ok(())
}

fn check_pure(tally: &mut Tally, cfg: &VerifyConfig, theta: f64, p_list: &[f64], eps: f64) -> Result<()> {
    let params = CaseParams {
        kind: "pure",
        epsilon: eps,
        f: None,
        theta: Some(theta),
        p_a: p_list.to_vec(),
        p_b: Vec::new(),
    };
    let coeffs = purified_coeffs_gate_noisy_list(p_list, eps)?;
    let analytic = pure_filter_fidelity(theta, &coeffs)?;
    let post = oracle_pure_post_state(theta, p_list, eps)?;
    let (fidelity, p_succ) = fidelity_and_yield(&post)?;
    tally.record(
        "pure_fidelity",
        (analytic.fidelity_out + cfg.analytic_offset - fidelity).abs(),
        &params,
    );
    tally.record("pure_p_succ", (analytic.p_succ - p_succ).abs(), &params);
    tally.record(
        "pure_post_state",
        post.max_abs_diff(&pure_post_state_unnormalized(theta, &coeffs)?),
        &params,
    );
    if cfg.full && p_list.len() + 2 <= MAX_DIRECT_QUBITS {
        let direct = direct_pure_full_register(theta, p_list, eps)?;
        tally.record("direct_pure_register", direct.max_abs_diff(&post), &params);
    }
    Ok(())
}

/// Draws `F`, `theta`, gadget sizes and noise lists from a seeded stream and
/// compares every closed form against the oracle.
pub fn run_verification(cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.max_n == 0 || cfg.max_n > 4 {
        return Err(Error::OutOfRange {
            name: "max_n",
            value: cfg.max_n as f64,
            domain: "1..=4",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tally = Tally { reports: Vec::new() };
    for &eps in &cfg.epsilons {
        for _ in 0..cfg.draws {
            let f = rng.gen_range(0.25..1.0);
            let theta = rng.gen_range(0.02..FRAC_PI_4);
            let n = rng.gen_range(1..=cfg.max_n);
            let m = rng.gen_range(1..=cfg.max_n);
            let p_a = draw_list(&mut rng, n);
            let p_b = draw_list(&mut rng, m);
            check_mixed(&mut tally, cfg, f, &p_a, &p_b, eps)?;
            check_pure(&mut tally, cfg, theta, &p_a, eps)?;
        }
    }
    if cfg.full {
        // Fixed cases that always exercise the largest registers.
        for eps in [0.0, 0.1] {
            for len in [2, 3] {
                check_mixed(&mut tally, cfg, 0.7, &vec![0.1; len], &vec![0.15; len], eps)?;
            }
        }
    }
    Ok(VerifyReport {
        quantities: tally.reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_passes() {
        let report = run_verification(&VerifyConfig::default()).unwrap();
        assert!(report.passed(), "{report:#?}");
        assert_eq!(report.get("mixed_fidelity").unwrap().cases, 60);
        assert!(report.get("povm_off_diagonal").unwrap().max_deviation < 1e-12);
    }

    #[test]
    fn offset_hook_fails_the_report() {
        let cfg = VerifyConfig {
            analytic_offset: 1e-6,
            draws: 2,
            ..VerifyConfig::default()
        };
        let report = run_verification(&cfg).unwrap();
        assert!(!report.passed());
        let worst = report.get("mixed_fidelity").unwrap();
        assert!(worst.worst.is_some());
    }

    #[test]
    fn same_seed_same_report() {
        let cfg = VerifyConfig {
            draws: 3,
            ..VerifyConfig::default()
        };
        assert_eq!(run_verification(&cfg).unwrap(), run_verification(&cfg).unwrap());
    }

    #[test]
    fn max_n_guard() {
        let cfg = VerifyConfig {
            max_n: 5,
            ..VerifyConfig::default()
        };
        assert!(run_verification(&cfg).is_err());
    }
}
