//! Acceptance suite. Each test prints one `AC<k> PASS|FAIL` line and then
//! asserts the same verdict.

use std::f64::consts::{FRAC_PI_4, PI};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use noisy_distill::distill_mixed::{
    distill_map, lower_bound, lower_bound_limit, parity_weights, parity_weights_gate_noisy,
};
use noisy_distill::distill_pure::{filter_ops, pure_filter_fidelity, pure_filter_fidelity_limit};
use noisy_distill::noise::{
    noisy_povm_element, purified_coeffs, purified_coeffs_gate_noisy, purified_coeffs_gate_noisy_list,
};
use noisy_distill::oracle::{direct_mixed_full_register, oracle_mixed_post_state, oracle_pure_post_state};
use noisy_distill::qmat::{ComplexMatrix, DensityMatrix};
use noisy_distill::states::{pure_theta, twirl};
use noisy_distill::verify::{run_verification, VerifyConfig};
use noisy_distill::Complex64;

const TABLE_TOL: f64 = 5e-4;

/// Collects failures for one criterion and prints its verdict line.
struct Criterion {
    id: &'static str,
    failures: Vec<String>,
}

impl Criterion {
    fn new(id: &'static str) -> Self {
        Self {
            id,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn near(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        self.check((got - want).abs() <= tol, || {
            format!("{label}: got {got:.9}, expected {want} +- {tol:e} (off by {:.3e})", (got - want).abs())
        });
    }

    fn within(&mut self, label: &str, elapsed: Duration, limit: Duration) {
        self.check(elapsed < limit, || format!("{label}: took {elapsed:?}, limit {limit:?}"));
    }

    fn finish(self) {
        if self.failures.is_empty() {
            println!("{} PASS", self.id);
        } else {
            println!("{} FAIL ({} issue(s))", self.id, self.failures.len());
            for f in &self.failures {
                println!("    {f}");
            }
        }
        assert!(self.failures.is_empty(), "{} failed: {:#?}", self.id, self.failures);
    }
}

fn noiseless_table(p: f64, rows: &[[f64; 4]]) -> Criterion {
    let mut c = Criterion::new("");
    for (mi, row) in rows.iter().enumerate() {
        for (ni, &want) in row.iter().enumerate() {
            let (n, m) = (ni + 1, mi + 1);
            let w = parity_weights(&vec![p; n], &vec![p; m]).unwrap();
            c.near(&format!("L^({n},{m}) p={p}"), lower_bound(&w).unwrap(), want, TABLE_TOL);
        }
    }
    c
}

#[test]
fn ac1_lower_bound_table_p02() {
    let start = Instant::now();
    let rows = [
        [0.781, 0.640, 0.627, 0.625],
        [0.640, 0.525, 0.514, 0.513],
        [0.627, 0.514, 0.503, 0.502],
    ];
    let mut c = noiseless_table(0.2, &rows);
    c.id = "AC1";
    c.within("runtime", start.elapsed(), Duration::from_secs(1));
    c.finish();
}

#[test]
fn ac2_lower_bound_table_p01() {
    let rows = [[0.617, 0.559, 0.556, 0.556], [0.559, 0.505, 0.500, 0.500]];
    let mut c = noiseless_table(0.1, &rows);
    c.id = "AC2";
    c.finish();
}

#[test]
fn ac3_gate_noisy_bounds() {
    let mut c = Criterion::new("AC3");
    let (p, eps) = (0.1, 0.1);
    for (n, want) in (1..=4).zip([0.617, 0.570, 0.566, 0.566]) {
        let w = parity_weights_gate_noisy(p, eps, n, n).unwrap();
        c.near(&format!("L_eps^({n},{n})"), lower_bound(&w).unwrap(), want, TABLE_TOL);
    }
    let limit = lower_bound_limit(p, eps).unwrap();
    let l12 = lower_bound(&parity_weights_gate_noisy(p, eps, 12, 12).unwrap()).unwrap();
    c.near("limit vs n=12", limit, l12, 1e-6);
    c.finish();
}

#[test]
fn ac4_pure_state_tables() {
    let mut c = Criterion::new("AC4");
    let theta = PI / 16.0;
    for (n, want) in (1..=4).zip([0.805, 0.984, 0.999, 1.000]) {
        let r = pure_filter_fidelity(theta, &purified_coeffs(&vec![0.1; n], n).unwrap()).unwrap();
        c.near(&format!("F_{n} eps=0"), r.fidelity_out, want, TABLE_TOL);
    }
    for (n, want) in (1..=4).zip([0.805, 0.914, 0.924, 0.924]) {
        let r = pure_filter_fidelity(theta, &purified_coeffs_gate_noisy(0.1, 0.05, n).unwrap()).unwrap();
        c.near(&format!("F_{n} eps=0.05"), r.fidelity_out, want, TABLE_TOL);
    }
    let limit = pure_filter_fidelity_limit(theta, 0.1, 0.05).unwrap();
    c.near("limit eps=0.05", limit, 0.924, TABLE_TOL);
    c.finish();
}

#[test]
fn ac5_oracle_equivalence() {
    let start = Instant::now();
    let mut c = Criterion::new("AC5");
    let report = run_verification(&VerifyConfig::default()).unwrap();
    for q in &report.quantities {
        c.check(q.max_deviation < 1e-10, || {
            format!(
                "{}: max deviation {:.3e} at {}",
                q.name,
                q.max_deviation,
                q.worst.as_ref().map(|w| w.to_string()).unwrap_or_default()
            )
        });
    }
    c.check(report.get("mixed_fidelity").map(|q| q.cases) == Some(60), || {
        "grid did not cover 3 epsilons x 20 draws".into()
    });

    // Unreduced register: A1 B1 A2 B2 plus every ancilla.
    for (len, eps) in [(2usize, 0.0), (2, 0.1), (3, 0.05)] {
        let p_a: Vec<f64> = (0..len).map(|i| 0.05 + 0.04 * i as f64).collect();
        let p_b: Vec<f64> = (0..len).map(|i| 0.2 - 0.03 * i as f64).collect();
        let direct = direct_mixed_full_register(0.72, &p_a, &p_b, eps).unwrap();
        let reduced = oracle_mixed_post_state(0.72, &p_a, &p_b, eps).unwrap();
        let dev = direct.max_abs_diff(&reduced);
        c.check(dev < 1e-10, || format!("direct register n=m={len} eps={eps}: deviation {dev:.3e}"));
    }
    c.within("runtime", start.elapsed(), Duration::from_secs(60));
    c.finish();
}

fn random_density(rng: &mut ChaCha8Rng) -> DensityMatrix {
    let amps: Vec<Complex64> = (0..4)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let amps: Vec<Complex64> = amps.iter().map(|z| z / norm).collect();
    let mix = rng.gen_range(0.0..1.0);
    let mat = &ComplexMatrix::outer(&amps).scale(1.0 - mix) + &ComplexMatrix::identity(4).scale(mix / 4.0);
    DensityMatrix::new(mat, vec![2, 2]).unwrap()
}

#[test]
fn ac6_property_suites() {
    let mut c = Criterion::new("AC6");
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let id2 = ComplexMatrix::identity(2);

    // POVM completeness, exact.
    for k in 0..100 {
        let p = k as f64 / 100.0;
        let sum = &noisy_povm_element(0, p).unwrap() + &noisy_povm_element(1, p).unwrap();
        c.check(sum == id2, || format!("POVM completeness at p={p}"));
    }

    // Kraus completeness.
    for k in 1..=200 {
        let theta = FRAC_PI_4 * k as f64 / 200.0;
        let ops = filter_ops(theta).unwrap();
        let sum = &(&ops.k0.adjoint() * &ops.k0) + &(&ops.k1.adjoint() * &ops.k1);
        let dev = sum.max_abs_diff(&id2);
        c.check(dev < 1e-10, || format!("Kraus completeness at theta={theta}: {dev:.3e}"));
    }

    // Noisy single-shot filter decomposition.
    for _ in 0..50 {
        let theta = rng.gen_range(0.01..FRAC_PI_4);
        let p = rng.gen_range(0.0..1.0);
        let post = oracle_pure_post_state(theta, &[p], 0.0).unwrap();
        let ops = filter_ops(theta).unwrap();
        let psi = pure_theta(theta).unwrap().density().into_matrix();
        let k0 = id2.tensor(&ops.k0);
        let k1 = id2.tensor(&ops.k1);
        let expected = &(&(&k0 * &psi) * &k0.adjoint()).scale(1.0 - p / 2.0)
            + &(&(&k1 * &psi) * &k1.adjoint()).scale(p / 2.0);
        let dev = post.max_abs_diff(&expected);
        c.check(dev < 1e-10, || format!("filter decomposition theta={theta} p={p}: {dev:.3e}"));
    }

    // Purified fidelity increases with n and tends to 1 without gate noise.
    for p in [0.01, 0.1, 0.3, 0.6, 0.9] {
        let mut last = 0.0;
        for n in 1..=20 {
            let fid = purified_coeffs(&vec![p; n], n).unwrap().fidelity();
            c.check(fid > last || fid == 1.0, || format!("purified fidelity not increasing p={p} n={n}"));
            last = fid;
        }
        let far = purified_coeffs(&vec![p; 300], 300).unwrap().fidelity();
        c.check(1.0 - far < 1e-9, || format!("purified fidelity at n=300, p={p}: {far}"));
    }

    // Twirl idempotence and singlet-fraction preservation.
    for _ in 0..100 {
        let rho = random_density(&mut rng);
        let once = twirl(&rho).unwrap();
        let twice = twirl(&once).unwrap();
        let idem = twice.matrix().max_abs_diff(once.matrix());
        let df = (once.singlet_fraction().unwrap() - rho.singlet_fraction().unwrap()).abs();
        c.check(idem < 1e-12 && df < 1e-12, || format!("twirl: idempotence {idem:.3e}, fraction {df:.3e}"));
    }

    // Sign and root structure of F' - F on a dense grid.
    for (n, m, p) in [(1, 1, 0.0), (1, 2, 0.2), (2, 2, 0.1), (3, 2, 0.2), (4, 3, 0.05)] {
        let w = parity_weights(&vec![p; n], &vec![p; m]).unwrap();
        let l = lower_bound(&w).unwrap();
        for r in [0.25, l, 1.0] {
            let gain = distill_map(r, &w).unwrap().fidelity_out - r;
            c.check(gain.abs() < 1e-12, || format!("gain at root {r} for ({n},{m}) p={p}: {gain:.3e}"));
        }
        for k in 1..2000 {
            let f = 0.25 + 0.75 * k as f64 / 2000.0;
            if (f - l).abs() < 1e-9 {
                continue;
            }
            let gain = distill_map(f, &w).unwrap().fidelity_out - f;
            let expected_positive = f > l;
            c.check((gain > 0.0) == expected_positive, || {
                format!("gain sign at F={f} for ({n},{m}) p={p}: {gain:.3e}, L={l}")
            });
        }
    }

    // Heterogeneous rates collapse to the homogeneous formulas.
    for p in [0.0, 0.07, 0.2, 0.45] {
        for eps in [0.0, 0.05, 0.2] {
            for n in 1..=8 {
                let het = purified_coeffs_gate_noisy_list(&vec![p; n], eps).unwrap();
                let hom = purified_coeffs_gate_noisy(p, eps, n).unwrap();
                let dev = (het.r0 - hom.r0).abs().max((het.r1 - hom.r1).abs());
                c.check(dev < 1e-12, || format!("reduction p={p} eps={eps} n={n}: {dev:.3e}"));
            }
        }
        for n in 1..=8 {
            let product = purified_coeffs(&vec![p; n], n).unwrap();
            let recurrence = purified_coeffs_gate_noisy(p, 0.0, n).unwrap();
            let dev = (product.r0 - recurrence.r0).abs().max((product.r1 - recurrence.r1).abs());
            c.check(dev < 1e-12, || format!("product vs recurrence p={p} n={n}: {dev:.3e}"));
        }
    }

    // Swapping the parties leaves the parity weights unchanged.
    for _ in 0..100 {
        let n = rng.gen_range(1..=5);
        let m = rng.gen_range(1..=5);
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let b: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..1.0)).collect();
        let ab = parity_weights(&a, &b).unwrap();
        let ba = parity_weights(&b, &a).unwrap();
        c.check(ab.r_even == ba.r_even && ab.r_odd == ba.r_odd, || {
            format!("swap symmetry failed for {a:?} / {b:?}")
        });
    }
    c.finish();
}

#[test]
fn ac7_distillable_window() {
    let mut c = Criterion::new("AC7");
    let w = parity_weights(&[0.1, 0.1], &[0.1, 0.1]).unwrap();
    let steps = 1000;
    for k in 0..=steps {
        let f = 0.506 + (0.999 - 0.506) * k as f64 / steps as f64;
        let out = distill_map(f, &w).unwrap().fidelity_out;
        c.check(out > f, || format!("F'={out} <= F={f} inside the distillable window"));
    }
    for k in 1..steps {
        let f = 0.25 + (0.504 - 0.25) * k as f64 / steps as f64;
        let out = distill_map(f, &w).unwrap().fidelity_out;
        c.check(out <= f, || format!("F'={out} > F={f} below the threshold"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for draw in 0..100 {
        let p_a: Vec<f64> = (0..2).map(|_| rng.gen_range(0.025..0.175)).collect();
        let p_b: Vec<f64> = (0..2).map(|_| rng.gen_range(0.025..0.175)).collect();
        let w = parity_weights(&p_a, &p_b).unwrap();
        let out = distill_map(0.7, &w).unwrap().fidelity_out;
        c.check(out > 0.7, || format!("draw {draw}: F'={out} at F=0.7 for {p_a:?} / {p_b:?}"));
    }
    c.finish();
}
