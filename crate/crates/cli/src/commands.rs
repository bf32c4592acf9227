use std::fmt;
use std::fs;
use std::io::Read;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, Context};
use nhyp_core::generate::{generate, Generator};
use nhyp_core::hyperbolicity::{gromov_witness, min_delta, DeltaOptions, Engine, FamilyMode, MinDelta};
use nhyp_core::io::{parse_raw, space_to_csv, space_to_json, ParseOptions, RawSpace};
use nhyp_core::tightspan::{enumerate_cells, TightSpanError};
use nhyp_core::witness::best_scale;
use nhyp_core::{linf_product, validate_metric, FiniteMetricSpace, MetricError, Scalar};
use serde_json::{json, Value};

use crate::report::{sha256_hex, RunReport};
use crate::{Cli, Command, EngineArg, GenKind, Global, ModeArg, SpaceArg};

#[derive(Debug)]
pub enum Failure {
    Input(anyhow::Error),
    Violations { report: String, count: usize },
    Guard(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Violations { .. } => 2,
            Failure::Guard(_) => 3,
        }
    }

    pub fn stdout(&self) -> Option<&str> {
        match self {
            Failure::Violations { report, .. } => Some(report),
            _ => None,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(e) => write!(f, "{e:#}"),
            Failure::Violations { count, .. } => write!(f, "input violates {count} metric axiom instance(s)"),
            Failure::Guard(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

type Outcome = Result<String, Failure>;

struct Loaded {
    space: FiniteMetricSpace,
    input: Value,
}

fn read_input(path: &Path) -> anyhow::Result<Vec<u8>> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf).context("reading stdin")?;
        return Ok(buf);
    }
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn parse_options(g: &Global) -> ParseOptions {
    ParseOptions { rationalize: g.rationalize, denominator_bound: g.denominator_bound }
}

fn read_raw(path: &Path, g: &Global) -> Result<(RawSpace, Value), Failure> {
    let bytes = read_input(path)?;
    let text = std::str::from_utf8(&bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let raw = parse_raw(text, &parse_options(g)).with_context(|| format!("parsing {}", path.display()))?;
    let input = json!({ "path": path.display().to_string(), "sha256": sha256_hex(&bytes) });
    Ok((raw, input))
}

fn violation_report(command: &'static str, raw: &RawSpace, input: Value, errors: &[nhyp_core::Violation], g: &Global) -> String {
    let violations: Vec<Value> = errors
        .iter()
        .map(|v| {
            let mut j = serde_json::to_value(v).expect("plain data");
            j["description"] = Value::String(v.describe(&raw.points, &raw.matrix));
            j
        })
        .collect();
    RunReport {
        command,
        input,
        parameters: json!({}),
        results: json!({ "valid": false, "points": raw.points.len(), "violations": violations }),
        elapsed: Default::default(),
        engines: json!({}),
    }
    .render(g.format)
}

fn load(command: &'static str, path: &Path, g: &Global) -> Result<Loaded, Failure> {
    let (raw, mut input) = read_raw(path, g)?;
    let space = match validate_metric(raw.points.clone(), raw.matrix.clone()) {
        Ok(s) => s,
        Err(MetricError::Violations(v)) => {
            return Err(Failure::Violations {
                report: violation_report(command, &raw, input, &v, g),
                count: v.len(),
            })
        }
        Err(e) => return Err(Failure::Input(anyhow!(e).context(format!("in {}", path.display())))),
    };
    if space.len() > g.guards.max_points {
        return Err(Failure::Guard(format!(
            "{} points exceed --max-points {} (env NHYP_MAX_POINTS)",
            space.len(),
            g.guards.max_points
        )));
    }
    input["points"] = json!(space.len());
    Ok(Loaded { space, input })
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn double_factorial_odd(n: u128) -> u128 {
    (1..=n).step_by(2).fold(1u128, |a, b| a.saturating_mul(b))
}

/// Paired subsets of distinct points.
fn paired_subset_count(points: usize, n: usize) -> u128 {
    binomial(points as u128, 2 * (n as u128 + 1)).saturating_mul(double_factorial_odd(2 * n as u128 + 1))
}

fn family_count(points: usize, n: usize, mode: FamilyMode) -> u128 {
    match mode {
        FamilyMode::Full => {
            let pairs = (points * (points + 1) / 2) as u128;
            binomial(pairs + n as u128, n as u128 + 1)
        }
        FamilyMode::Distinct => paired_subset_count(points, n),
    }
}

fn guard_n(n: usize, g: &Global) -> Result<(), Failure> {
    if n > g.guards.max_n {
        return Err(Failure::Guard(format!("n = {n} exceeds --max-n {} (env NHYP_MAX_N)", g.guards.max_n)));
    }
    Ok(())
}

fn guard_families(count: u128, g: &Global) -> Result<(), Failure> {
    if count > g.guards.max_families {
        return Err(Failure::Guard(format!(
            "{count} families exceed --max-families {} (env NHYP_MAX_FAMILIES)",
            g.guards.max_families
        )));
    }
    Ok(())
}

fn pairs_json(x: &FiniteMetricSpace, pairs: &[(usize, usize)]) -> Value {
    json!(pairs.iter().map(|&(a, b)| [x.label(a), x.label(b)]).collect::<Vec<_>>())
}

fn delta_results(x: &FiniteMetricSpace, md: &MinDelta) -> Value {
    let w = &md.witness;
    json!({
        "n": md.n,
        "delta": md.delta.to_string(),
        "family": pairs_json(x, &w.family.pairs()),
        "alpha": w.best_alpha,
        "paired_sum": w.lhs.to_string(),
        "best_score": w.best_score.to_string(),
        "families_checked": md.families_checked,
    })
}

pub fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    let start = Instant::now();
    match &cli.command {
        Command::Validate { file } => validate(file, g, start),
        Command::Delta { file, n, mode, engine } => delta(file, *n, *mode, *engine, g, start),
        Command::Gromov { file } => {
            let l = load("gromov", file, g)?;
            let (d, q) = gromov_witness(&l.space);
            Ok(RunReport {
                command: "gromov",
                input: l.input,
                parameters: json!({}),
                results: json!({
                    "delta": d.to_string(),
                    "quadruple": q.iter().map(|&p| l.space.label(p)).collect::<Vec<_>>(),
                }),
                elapsed: start.elapsed(),
                engines: json!({ "four_point": "exhaustive" }),
            }
            .render(g.format))
        }
        Command::Tightspan { file, cells, export, dot } => {
            tightspan(file, *cells, export.as_deref(), dot.as_deref(), g, start)
        }
        Command::Orthoplex { file, n } => orthoplex(file, *n, g, start),
        Command::Gen { kind, output } => gen(kind, output.as_deref(), g, start),
        Command::Product { a, b, output } => {
            let la = load("product", a, g)?;
            let lb = load("product", b, g)?;
            let size = la.space.len() * lb.space.len();
            if size > g.guards.max_points {
                return Err(Failure::Guard(format!(
                    "product has {size} points, above --max-points {}",
                    g.guards.max_points
                )));
            }
            let p = linf_product(&la.space, &lb.space);
            emit_space("product", &p, output.as_deref(), json!([la.input, lb.input]), json!({}), g, start)
        }
    }
}

fn validate(file: &Path, g: &Global, start: Instant) -> Outcome {
    let l = load("validate", file, g)?;
    Ok(RunReport {
        command: "validate",
        input: l.input,
        parameters: json!({ "rationalize": g.rationalize }),
        results: json!({ "valid": true, "points": l.space.len(), "violations": [] }),
        elapsed: start.elapsed(),
        engines: json!({}),
    }
    .render(g.format))
}

fn delta(file: &Path, n: usize, mode: ModeArg, engine: EngineArg, g: &Global, start: Instant) -> Outcome {
    let l = load("delta", file, g)?;
    guard_n(n, g)?;
    let mode = match mode {
        ModeArg::Full => FamilyMode::Full,
        ModeArg::Distinct => FamilyMode::Distinct,
    };
    let count = family_count(l.space.len(), n, mode);
    guard_families(count, g)?;
    let run = |e: Engine| min_delta(&l.space, n, DeltaOptions { engine: e, mode });
    let (md, agree) = match engine {
        EngineArg::Brute => (run(Engine::Brute), None),
        EngineArg::Assignment => (run(Engine::Assignment), None),
        EngineArg::Both => {
            let a = run(Engine::Assignment);
            let b = run(Engine::Brute);
            let agree = a.delta == b.delta && a.witness.family == b.witness.family;
            (b, Some(agree))
        }
    };
    let mut results = delta_results(&l.space, &md);
    if let Some(agree) = agree {
        results["engines_agree"] = json!(agree);
        if !agree {
            return Err(Failure::Input(anyhow!("engines disagree on this input")));
        }
    }
    let engine_name = match engine {
        EngineArg::Brute => "brute",
        EngineArg::Assignment => "assignment",
        EngineArg::Both => "assignment+brute",
    };
    Ok(RunReport {
        command: "delta",
        input: l.input,
        parameters: json!({
            "n": n,
            "mode": format!("{mode:?}").to_lowercase(),
            "engine": engine_name,
        }),
        results,
        elapsed: start.elapsed(),
        engines: json!({ "max_score": engine_name }),
    }
    .render(g.format))
}

fn tightspan(
    file: &Path,
    with_cells: bool,
    export: Option<&Path>,
    dot: Option<&Path>,
    g: &Global,
    start: Instant,
) -> Outcome {
    let l = load("tightspan", file, g)?;
    let bound = g.guards.max_tightspan_points;
    let complex = enumerate_cells(&l.space, bound).map_err(|e| match e {
        TightSpanError::TooLarge { size, bound } => Failure::Guard(format!(
            "{size} points exceed the tight span bound {bound} (--max-tightspan-points, env NHYP_MAX_TIGHTSPAN_POINTS; hard limit 10)"
        )),
        other => Failure::Input(anyhow!(other)),
    })?;
    let full = complex.to_json();
    if let Some(p) = export {
        let mut s = serde_json::to_string_pretty(&full).expect("plain JSON");
        s.push('\n');
        fs::write(p, s).with_context(|| format!("writing {}", p.display()))?;
    }
    if let Some(p) = dot {
        fs::write(p, complex.to_dot()).with_context(|| format!("writing {}", p.display()))?;
    }
    let mut results = json!({
        "points": l.space.len(),
        "vertex_count": complex.vertices.len(),
        "f_vector": complex.f_vector,
        "dimension": complex.dimension(),
        "vertices": full["vertices"],
    });
    if with_cells {
        results["cells"] = full["cells"].clone();
    }
    Ok(RunReport {
        command: "tightspan",
        input: l.input,
        parameters: json!({
            "cells": with_cells,
            "export": export.map(|p| p.display().to_string()),
            "dot": dot.map(|p| p.display().to_string()),
        }),
        results,
        elapsed: start.elapsed(),
        engines: json!({ "vertices": "pair-subsystems", "cells": "exact-simplex" }),
    }
    .render(g.format))
}

fn orthoplex(file: &Path, n: usize, g: &Global, start: Instant) -> Outcome {
    let l = load("orthoplex", file, g)?;
    if n == 0 {
        return Err(Failure::Input(anyhow!("orthoplex witnesses need --n >= 1")));
    }
    guard_n(n, g)?;
    guard_families(paired_subset_count(l.space.len(), n), g)?;
    let b = best_scale(&l.space, n).map_err(|e| Failure::Input(anyhow!(e)))?;
    let mut results = json!({
        "n": n,
        "s_hat": b.s_hat.as_ref().map(Scalar::to_string),
        "families_checked": b.families_checked,
        "witness": Value::Null,
    });
    match &b.s_hat {
        None => {
            results["note"] = json!(format!(
                "fewer than {} points: the scale is undefined and the space is ({n},0)-hyperbolic",
                2 * (n + 1)
            ));
        }
        Some(s) if !s.is_positive() => {
            results["delta_bounds"] = json!({ "lower": "0", "upper": "0" });
        }
        Some(s) => {
            let upper = Scalar::from_integer(n as i64) * s;
            results["delta_bounds"] = json!({ "lower": s.to_string(), "upper": upper.to_string() });
        }
    }
    if let Some(w) = &b.witness {
        let mut wj = w.to_json();
        wj["embedding"] = json!("orthoplex in E(Z), Z ⊆ X");
        results["witness"] = wj;
    }
    Ok(RunReport {
        command: "orthoplex",
        input: l.input,
        parameters: json!({ "n": n }),
        results,
        elapsed: start.elapsed(),
        engines: json!({ "fiber": "exact-simplex" }),
    }
    .render(g.format))
}

fn generator(kind: &GenKind) -> anyhow::Result<(Generator, u64)> {
    Ok(match kind {
        GenKind::Cycle { m } => (Generator::Cycle { m: *m }, 0),
        GenKind::Tree { leaves, seed } => (Generator::RandomTree { leaves: *leaves }, *seed),
        GenKind::Graph { points, edge_probability, max_weight, seed } => (
            Generator::RandomGraph {
                points: *points,
                edge_probability: *edge_probability,
                max_weight: *max_weight,
            },
            *seed,
        ),
        GenKind::Grid { space, dim, side, scale } => {
            let scale: Scalar = scale.parse().with_context(|| format!("--scale {scale}"))?;
            let g = match space {
                SpaceArg::Linf => Generator::linf_grid(*dim, *side, scale),
                SpaceArg::L2 => Generator::l2_grid(*dim, *side, scale),
            };
            (g, 0)
        }
    })
}

fn gen(kind: &GenKind, output: Option<&Path>, g: &Global, start: Instant) -> Outcome {
    let (gen, seed) = generator(kind)?;
    let space = generate(&gen, seed).map_err(|e| Failure::Input(anyhow!(e)))?;
    let mut params = serde_json::to_value(&gen).expect("plain data");
    params["seed"] = json!(seed);
    emit_space("gen", &space, output, Value::Null, params, g, start)
}

fn emit_space(
    command: &'static str,
    space: &FiniteMetricSpace,
    output: Option<&Path>,
    input: Value,
    parameters: Value,
    g: &Global,
    start: Instant,
) -> Outcome {
    let csv = output.is_some_and(|p| p.extension().is_some_and(|e| e == "csv"));
    let text = if csv { space_to_csv(space) } else { space_to_json(space) };
    let Some(path) = output else {
        return Ok(text);
    };
    fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    Ok(RunReport {
        command,
        input,
        parameters,
        results: json!({
            "output": path.display().to_string(),
            "points": space.len(),
            "sha256": sha256_hex(text.as_bytes()),
        }),
        elapsed: start.elapsed(),
        engines: json!({ "rng": "chacha8" }),
    }
    .render(g.format))
}
