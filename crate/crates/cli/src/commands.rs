use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use noisy_distill::distill_mixed::{
    distill_map, iterate_distill_map, lower_bound, lower_bound_limit, ParityWeights,
};
use noisy_distill::distill_pure::{pure_filter_fidelity, pure_filter_fidelity_limit};
use noisy_distill::noise::{purified_coeffs_gate_noisy_list, PurifiedCoeffs};
use noisy_distill::verify::{run_verification, VerifyConfig, VerifyReport};

use crate::error::CliError;
use crate::format::{emit, reformat_json, Format, Record, Table};
use crate::grid::{parse_int_axis, parse_list, parse_real_axis};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Quantity {
    PovmFidelity,
    MixedFidelityMap,
    LowerBound,
    LowerBoundLimit,
    PureFidelity,
    PureFidelityLimit,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::PovmFidelity => "povm_fidelity",
            Quantity::MixedFidelityMap => "mixed_fidelity_map",
            Quantity::LowerBound => "lower_bound",
            Quantity::LowerBoundLimit => "lower_bound_limit",
            Quantity::PureFidelity => "pure_fidelity",
            Quantity::PureFidelityLimit => "pure_fidelity_limit",
        }
    }

    fn uses_n(self) -> bool {
        !matches!(self, Quantity::LowerBoundLimit | Quantity::PureFidelityLimit)
    }

    fn uses_m(self) -> bool {
        matches!(self, Quantity::MixedFidelityMap | Quantity::LowerBound)
    }

    fn uses_f(self) -> bool {
        self == Quantity::MixedFidelityMap
    }

    fn uses_theta(self) -> bool {
        matches!(self, Quantity::PureFidelity | Quantity::PureFidelityLimit)
    }

    fn has_p_succ(self) -> bool {
        matches!(
            self,
            Quantity::PovmFidelity | Quantity::MixedFidelityMap | Quantity::PureFidelity
        )
    }
}

pub fn resolve_theta(theta: Option<f64>, frac_pi: Option<f64>) -> Result<f64, CliError> {
    match (theta, frac_pi) {
        (Some(t), None) => Ok(t),
        (None, Some(x)) => Ok(PI * x),
        (None, None) => Err(CliError::usage("one of --theta or --theta-frac-pi is required")),
        (Some(_), Some(_)) => Err(CliError::usage("--theta and --theta-frac-pi are exclusive")),
    }
}

fn coeffs(p_list: &[f64], epsilon: f64) -> Result<PurifiedCoeffs, CliError> {
    Ok(purified_coeffs_gate_noisy_list(p_list, epsilon)?)
}

fn three_decimals(x: f64) -> String {
    format!("{x:.3}")
}

// ---------------------------------------------------------------- tables

/// The five reference tables, in output order.
pub fn reference_tables() -> Result<Vec<(&'static str, Table)>, CliError> {
    let mut tables = Vec::new();
    for (name, p, m_max) in [("lower_bound_p0.2", 0.2, 3), ("lower_bound_p0.1", 0.1, 2)] {
        let mut rows = Vec::new();
        for n in 1..=4 {
            for m in 1..=m_max {
                let w = ParityWeights::from_coeffs(&coeffs(&vec![p; n], 0.0)?, &coeffs(&vec![p; m], 0.0)?);
                let l = lower_bound(&w)?;
                rows.push(lower_bound_row(p, 0.0, n, m, l));
            }
        }
        tables.push((name, Table::new(format!("tables/{name}"), rows)));
    }

    let mut rows = Vec::new();
    for n in 1..=4 {
        let c = coeffs(&vec![0.1; n], 0.1)?;
        let l = lower_bound(&ParityWeights::from_coeffs(&c, &c))?;
        rows.push(lower_bound_row(0.1, 0.1, n, n, l));
    }
    tables.push(("lower_bound_gate_noisy", Table::new("tables/lower_bound_gate_noisy", rows)));

    let theta = PI / 16.0;
    for (name, eps) in [("pure_fidelity_eps0", 0.0), ("pure_fidelity_eps0.05", 0.05)] {
        let mut rows = Vec::new();
        for n in 1..=4 {
            let r = pure_filter_fidelity(theta, &coeffs(&vec![0.1; n], eps)?)?;
            rows.push(
                Record::new()
                    .with("p", 0.1)
                    .with("epsilon", eps)
                    .with("n", n)
                    .with("theta", theta)
                    .with("value", r.fidelity_out)
                    .with("p_succ", r.p_succ)
                    .with("value_3dp", three_decimals(r.fidelity_out)),
            );
        }
        tables.push((name, Table::new(format!("tables/{name}"), rows)));
    }
    Ok(tables)
}

fn lower_bound_row(p: f64, eps: f64, n: usize, m: usize, l: f64) -> Record {
    Record::new()
        .with("p", p)
        .with("epsilon", eps)
        .with("n", n)
        .with("m", m)
        .with("value", l)
        .with("value_3dp", three_decimals(l))
}

/// With a directory, writes one file per table; otherwise prints them all.
pub fn cmd_tables(format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let tables = reference_tables()?;
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.display().to_string(), e))?;
            for (name, table) in &tables {
                let path = dir.join(format!("{name}.{}", format.extension()));
                emit(&table.render(format)?, Some(&path))?;
            }
            Ok(())
        }
        None => {
            let text = match format {
                Format::Csv => {
                    let mut text = String::new();
                    for (i, (name, table)) in tables.iter().enumerate() {
                        if i > 0 {
                            text.push('\n');
                        }
                        text.push_str(&format!("# {name}\n"));
                        text.push_str(&table.to_csv()?);
                    }
                    text
                }
                Format::Json => {
                    let mut all = Map::new();
                    for (name, table) in &tables {
                        all.insert((*name).into(), table.to_json_value());
                    }
                    reformat_json(&json!({
                        "schema_version": crate::format::SCHEMA_VERSION,
                        "command": "tables",
                        "tables": Value::Object(all),
                    }))
                }
            };
            emit(&text, None)
        }
    }
}

// ---------------------------------------------------------------- sweep

#[derive(Clone, Debug, Default)]
pub struct SweepSpec {
    pub quantity: Option<Quantity>,
    pub p: Option<String>,
    pub epsilon: Option<String>,
    pub n: Option<String>,
    pub m: Option<String>,
    pub f: Option<String>,
    pub theta: Option<String>,
    pub theta_frac_pi: Option<String>,
    pub m_equals_n: bool,
    pub band: Option<String>,
    pub draws: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
struct Point {
    p: Option<f64>,
    draw: Option<usize>,
    p_a: Vec<f64>,
    p_b: Vec<f64>,
    epsilon: f64,
    n: Option<usize>,
    m: Option<usize>,
    f: Option<f64>,
    theta: Option<f64>,
}

fn reject_unused(flag: &str, given: bool, quantity: Quantity) -> Result<(), CliError> {
    if given {
        Err(CliError::usage(format!("--{flag} does not apply to {}", quantity.name())))
    } else {
        Ok(())
    }
}

fn optional_axis(values: Option<Vec<f64>>) -> Vec<Option<f64>> {
    values.map_or(vec![None], |v| v.into_iter().map(Some).collect())
}

fn optional_int_axis(values: Option<Vec<usize>>) -> Vec<Option<usize>> {
    values.map_or(vec![None], |v| v.into_iter().map(Some).collect())
}

fn parse_band(text: &str) -> Result<(f64, f64), CliError> {
    let v = parse_list("band", text)?;
    match v.as_slice() {
        [lo, hi] if lo < hi && *lo >= 0.0 && *hi <= 1.0 => Ok((*lo, *hi)),
        _ => Err(CliError::usage(format!(
            "--band expects lo,hi with 0 <= lo < hi <= 1, got {text:?}"
        ))),
    }
}

/// Expands the spec into grid points, in lexicographic order over
/// `(p, epsilon, n, m, F, theta)` with draws innermost.
fn expand(spec: &SweepSpec) -> Result<(Quantity, Vec<Point>), CliError> {
    let q = spec
        .quantity
        .ok_or_else(|| CliError::usage("a quantity is required"))?;

    if !q.uses_n() {
        reject_unused("n", spec.n.is_some(), q)?;
    }
    if !q.uses_m() {
        reject_unused("m", spec.m.is_some(), q)?;
        reject_unused("m-equals-n", spec.m_equals_n, q)?;
    }
    if !q.uses_f() {
        reject_unused("F", spec.f.is_some(), q)?;
    }
    if !q.uses_theta() {
        reject_unused("theta", spec.theta.is_some() || spec.theta_frac_pi.is_some(), q)?;
    }
    if spec.m_equals_n && spec.m.is_some() {
        return Err(CliError::usage("--m and --m-equals-n are exclusive"));
    }

    let band = spec.band.as_deref().map(parse_band).transpose()?;
    let ps: Vec<Option<f64>> = match (&spec.p, band) {
        (Some(_), Some(_)) => return Err(CliError::usage("--p and --band are exclusive")),
        (Some(text), None) => parse_real_axis("p", text)?.into_iter().map(Some).collect(),
        (None, Some(_)) => {
            if !q.uses_n() {
                return Err(CliError::usage(format!("--band does not apply to {}", q.name())));
            }
            vec![None]
        }
        (None, None) => return Err(CliError::usage("--p (or --band) is required")),
    };
    if band.is_none() && spec.draws != 1 {
        return Err(CliError::usage("--draws only applies with --band"));
    }
    if spec.draws == 0 {
        return Err(CliError::usage("--draws must be at least 1"));
    }

    let epsilons = match &spec.epsilon {
        Some(text) => parse_real_axis("epsilon", text)?,
        None => vec![0.0],
    };
    let ns = if q.uses_n() {
        match &spec.n {
            Some(text) => parse_int_axis("n", text)?,
            None => vec![1],
        }
    } else {
        Vec::new()
    };
    let ms: Option<Vec<usize>> = if q.uses_m() && !spec.m_equals_n {
        Some(match &spec.m {
            Some(text) => parse_int_axis("m", text)?,
            None => vec![1],
        })
    } else {
        None
    };
    let fs = if q.uses_f() {
        let text = spec
            .f
            .as_ref()
            .ok_or_else(|| CliError::usage("--F is required for mixed_fidelity_map"))?;
        Some(parse_real_axis("F", text)?)
    } else {
        None
    };
    let thetas = if q.uses_theta() {
        Some(match (&spec.theta, &spec.theta_frac_pi) {
            (Some(t), None) => parse_real_axis("theta", t)?,
            (None, Some(x)) => parse_real_axis("theta-frac-pi", x)?
                .into_iter()
                .map(|x| PI * x)
                .collect(),
            (None, None) => return Err(CliError::usage("--theta or --theta-frac-pi is required")),
            (Some(_), Some(_)) => return Err(CliError::usage("--theta and --theta-frac-pi are exclusive")),
        })
    } else {
        None
    };

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut points = Vec::new();
    let n_axis = optional_int_axis(if q.uses_n() { Some(ns) } else { None });
    for &p in &ps {
        for &epsilon in &epsilons {
            for &n in &n_axis {
                let m_axis: Vec<Option<usize>> = match (&ms, spec.m_equals_n) {
                    (Some(ms), _) => ms.iter().copied().map(Some).collect(),
                    (None, true) => vec![n],
                    (None, false) => vec![None],
                };
                for &m in &m_axis {
                    for &f in &optional_axis(fs.clone()) {
                        for &theta in &optional_axis(thetas.clone()) {
                            let draws = if band.is_some() { spec.draws } else { 1 };
                            for draw in 0..draws {
                                let (p_a, p_b) = match (band, p) {
                                    (Some((lo, hi)), _) => {
                                        let a = (0..n.unwrap_or(1)).map(|_| rng.gen_range(lo..hi)).collect();
                                        let b = (0..m.unwrap_or(0)).map(|_| rng.gen_range(lo..hi)).collect();
                                        (a, b)
                                    }
                                    (None, Some(p)) => (vec![p; n.unwrap_or(0)], vec![p; m.unwrap_or(0)]),
                                    (None, None) => unreachable!("p axis or band is present"),
                                };
                                points.push(Point {
                                    p,
                                    draw: band.map(|_| draw),
                                    p_a,
                                    p_b,
                                    epsilon,
                                    n,
                                    m,
                                    f,
                                    theta,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok((q, points))
}

fn evaluate(q: Quantity, pt: &Point) -> Result<(f64, Option<f64>), CliError> {
    let weights = || -> Result<ParityWeights, CliError> {
        Ok(ParityWeights::from_coeffs(&coeffs(&pt.p_a, pt.epsilon)?, &coeffs(&pt.p_b, pt.epsilon)?))
    };
    Ok(match q {
        Quantity::PovmFidelity => {
            let c = coeffs(&pt.p_a, pt.epsilon)?;
            (c.fidelity(), Some(c.acceptance()))
        }
        Quantity::MixedFidelityMap => {
            let r = distill_map(pt.f.expect("F axis"), &weights()?)?;
            (r.fidelity_out, Some(r.p_succ))
        }
        Quantity::LowerBound => (lower_bound(&weights()?)?, None),
        Quantity::LowerBoundLimit => (lower_bound_limit(pt.p.expect("p axis"), pt.epsilon)?, None),
        Quantity::PureFidelity => {
            let r = pure_filter_fidelity(pt.theta.expect("theta axis"), &coeffs(&pt.p_a, pt.epsilon)?)?;
            (r.fidelity_out, Some(r.p_succ))
        }
        Quantity::PureFidelityLimit => (
            pure_filter_fidelity_limit(pt.theta.expect("theta axis"), pt.p.expect("p axis"), pt.epsilon)?,
            None,
        ),
    })
}

fn sweep_record(q: Quantity, pt: &Point, value: f64, p_succ: Option<f64>) -> Record {
    let mut r = Record::new().with("quantity", q.name());
    match pt.p {
        Some(p) => r.push("p", p),
        None => {
            r.push("draw", pt.draw.unwrap_or(0));
            r.push("p_a", pt.p_a.clone());
            if q.uses_m() {
                r.push("p_b", pt.p_b.clone());
            }
        }
    }
    r.push("epsilon", pt.epsilon);
    if let Some(n) = pt.n {
        r.push("n", n);
    }
    if let Some(m) = pt.m {
        r.push("m", m);
    }
    if let Some(f) = pt.f {
        r.push("F", f);
    }
    if let Some(theta) = pt.theta {
        r.push("theta", theta);
    }
    r.push("value", value);
    if q.has_p_succ() {
        r.push("p_succ", p_succ.unwrap_or(f64::NAN));
    }
    r
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Table, CliError> {
    let (q, points) = expand(spec)?;
    let results: Vec<(f64, Option<f64>)> = points.par_iter().map(|pt| evaluate(q, pt)).collect::<Result<_, _>>()?;
    let records = points
        .iter()
        .zip(results)
        .map(|(pt, (v, ps))| sweep_record(q, pt, v, ps))
        .collect();
    Ok(Table::new("sweep", records))
}

// ---------------------------------------------------------------- verify

pub fn verify_table(report: &VerifyReport) -> Table {
    let records = report
        .quantities
        .iter()
        .map(|q| {
            Record::new()
                .with("quantity", q.name)
                .with("cases", q.cases)
                .with("max_deviation", q.max_deviation)
                .with("passed", q.passed())
                .with("worst", q.worst.as_ref().map(|w| w.to_string()).unwrap_or_default())
        })
        .collect();
    Table::new("verify", records)
}

pub fn cmd_verify(cfg: &VerifyConfig, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    if cfg.max_n == 0 || cfg.max_n > 4 {
        return Err(CliError::usage("--max-n must lie in 1..=4"));
    }
    let report = run_verification(cfg)?;
    emit(&verify_table(&report).render(format)?, out)?;
    if report.passed() {
        Ok(())
    } else {
        let offending: Vec<String> = report
            .quantities
            .iter()
            .filter(|q| !q.passed())
            .map(|q| {
                format!(
                    "{} deviates by {:e} at {}",
                    q.name,
                    q.max_deviation,
                    q.worst.as_ref().map(|w| w.to_string()).unwrap_or_default()
                )
            })
            .collect();
        Err(CliError::Verification(offending.join("; ")))
    }
}

// ---------------------------------------------------------------- single points

pub struct MixedArgs {
    pub f: f64,
    pub p: Option<f64>,
    pub p_a: Option<String>,
    pub p_b: Option<String>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub epsilon: f64,
    pub rounds: usize,
}

fn party_list(
    party: &str,
    list: Option<&str>,
    p: Option<f64>,
    size: Option<usize>,
    size_flag: &str,
) -> Result<Vec<f64>, CliError> {
    match (list, p) {
        (Some(text), _) => {
            let v = parse_list(party, text)?;
            if let Some(k) = size {
                if k != v.len() {
                    return Err(CliError::usage(format!(
                        "--{size_flag} {k} disagrees with --{party} of length {}",
                        v.len()
                    )));
                }
            }
            Ok(v)
        }
        (None, Some(p)) => {
            let k = size.unwrap_or(1);
            if k == 0 {
                return Err(CliError::usage(format!("--{size_flag} must be at least 1")));
            }
            Ok(vec![p; k])
        }
        (None, None) => Err(CliError::usage(format!("either --p or --{party} is required"))),
    }
}

pub fn run_distill_mixed(args: &MixedArgs) -> Result<Table, CliError> {
    if args.rounds == 0 {
        return Err(CliError::usage("--rounds must be at least 1"));
    }
    let p_a = party_list("pA", args.p_a.as_deref(), args.p, args.n, "n")?;
    let p_b = party_list("pB", args.p_b.as_deref(), args.p, args.m, "m")?;
    let w = ParityWeights::from_coeffs(&coeffs(&p_a, args.epsilon)?, &coeffs(&p_b, args.epsilon)?);
    let rounds = iterate_distill_map(args.f, &w, args.rounds)?;
    let records = rounds
        .iter()
        .enumerate()
        .map(|(i, r)| {
            Record::new()
                .with("round", i + 1)
                .with("p_a", p_a.clone())
                .with("p_b", p_b.clone())
                .with("epsilon", args.epsilon)
                .with("n", p_a.len())
                .with("m", p_b.len())
                .with("F", r.fidelity_in)
                .with("value", r.fidelity_out)
                .with("p_succ", r.p_succ)
        })
        .collect();
    Ok(Table::new("distill-mixed", records))
}

pub fn run_distill_pure(theta: f64, p: f64, epsilon: f64, n: usize) -> Result<Table, CliError> {
    if n == 0 {
        return Err(CliError::usage("--n must be at least 1"));
    }
    let r = pure_filter_fidelity(theta, &coeffs(&vec![p; n], epsilon)?)?;
    let rec = Record::new()
        .with("p", p)
        .with("epsilon", epsilon)
        .with("n", n)
        .with("theta", theta)
        .with("F", r.fidelity_in)
        .with("value", r.fidelity_out)
        .with("p_succ", r.p_succ);
    Ok(Table::new("distill-pure", vec![rec]))
}

pub fn run_povm_purify(p: Option<f64>, p_list: Option<&str>, epsilon: f64, n: Option<usize>) -> Result<Table, CliError> {
    let list = party_list("p-list", p_list, p, n, "n")?;
    let c = coeffs(&list, epsilon)?;
    let mut rec = Record::new();
    match (p, p_list) {
        (Some(p), None) => rec.push("p", p),
        _ => rec.push("p_list", list.clone()),
    }
    rec.push("epsilon", epsilon);
    rec.push("n", list.len());
    rec.push("r0", c.r0);
    rec.push("r1", c.r1);
    rec.push("value", c.fidelity());
    rec.push("p_succ", c.acceptance());
    Ok(Table::new("povm-purify", vec![rec]))
}
