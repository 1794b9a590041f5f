//! Built-in deterministic invariant suite.

use std::sync::Arc;
use std::time::Instant;

use oa_core::lattice::{freudenthal_approx, CellGrid, ComponentSelector, IntervalFunction, StepElement};
use oa_core::sampling;
use rand::Rng;

use crate::run::{run_experiment, Outcome, Row};
use crate::spec::ExperimentSpec;

const BUNDLED: &str = include_str!("../specs/norm-functional-narrow.json");
const CONVERGENCE: &str = include_str!("../specs/urysohn-convergence.json");

const INLINE: &[&str] = &[
    r#"{"name": "oa-urysohn", "pipelines": ["oa-check"], "trials": 200,
        "operator": {"kind": "urysohn", "kernel": {"family": "sine", "c": 2.5}, "output_cells": 3,
                     "range": {"norm": "l2"}},
        "element": {"constant": 1.0}, "refinements": [8, 16], "epsilons": [0.1]}"#,
    r#"{"name": "oa-nemytskii", "pipelines": ["oa-check"], "trials": 200,
        "operator": {"kind": "nemytskii",
                     "function": {"family": "odd_power", "p": 1.5, "g": {"poly": [1.0, -1.0]}},
                     "range": {"norm": "sup"}},
        "element": {"constant": 1.0}, "refinements": [8, 16], "epsilons": [0.1]}"#,
    r#"{"name": "oa-norm", "pipelines": ["oa-check", "c-compact"], "trials": 200,
        "operator": {"kind": "norm_functional", "range": {"norm": "sup"}},
        "element": {"constant": 1.0}, "refinements": [8], "epsilons": [0.1, 0.3]}"#,
    r#"{"name": "oa-band", "pipelines": ["oa-check"], "trials": 200,
        "operator": {"kind": "band_multiplication", "weight": {"poly": [0.5, -2.0]},
                     "range": {"norm": "l1"}},
        "element": {"constant": 1.0}, "refinements": [8, 16], "epsilons": [0.1]}"#,
    r#"{"name": "rk-nemytskii-band", "pipelines": ["rk-oracle"], "trials": 40,
        "operator": {"kind": "nemytskii", "function": {"family": "even_power", "p": 2.0, "g": {"poly": [1.0]}},
                     "range": {"norm": "sup"}},
        "companion": {"kind": "band_multiplication", "weight": {"poly": [-1.0, 2.0]},
                      "range": {"norm": "sup"}},
        "element": {"constant": 1.0}, "refinements": [6, 10], "epsilons": [0.1]}"#,
    r#"{"name": "rounding-urysohn", "pipelines": ["rounding-bench"], "trials": 40,
        "operator": {"kind": "urysohn", "kernel": {"family": "quadratic", "weight": [[1.0, 1, 0]]},
                     "output_cells": 3, "range": {"norm": "l2"}},
        "element": {"constant": 1.0}, "refinements": [8, 16], "epsilons": [0.1]}"#,
];

pub struct SelftestResult {
    pub outcome: Outcome,
    pub lines: Vec<String>,
}

pub fn specs() -> Vec<ExperimentSpec> {
    let mut texts = vec![BUNDLED, CONVERGENCE];
    texts.extend_from_slice(INLINE);
    texts
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            ExperimentSpec::from_str_named(t, &format!("builtin-{i}"))
                .unwrap_or_else(|e| panic!("builtin spec {i} is malformed: {e}"))
        })
        .collect()
}

pub fn run(seed: u64) -> oa_core::Result<SelftestResult> {
    let mut outcome = Outcome::default();
    let mut lines = Vec::new();
    for mut spec in specs() {
        spec.seed = seed;
        let o = run_experiment(&spec)?;
        let ok = o.failures.is_empty() && o.coarse.is_empty();
        lines.push(format!(
            "[{}] {} ({} rows)",
            if ok { "ok" } else { "FAIL" },
            spec.name,
            o.rows.len()
        ));
        outcome.rows.extend(o.rows);
        outcome.nets.extend(o.nets);
        outcome.failures.extend(o.failures);
        outcome.coarse.extend(o.coarse);
    }
    let lattice = lattice_checks(seed)?;
    let bad: f64 = lattice.iter().map(|r| r.value).sum();
    lines.push(format!(
        "[{}] lattice ({} rows)",
        if bad == 0.0 { "ok" } else { "FAIL" },
        lattice.len()
    ));
    if bad != 0.0 {
        outcome.failures.push(format!("lattice checks: {bad} violations"));
    }
    outcome.rows.extend(lattice);
    Ok(SelftestResult { outcome, lines })
}

fn lattice_checks(seed: u64) -> oa_core::Result<Vec<Row>> {
    let started = Instant::now();
    let mut rng = sampling::substream(seed, 11);
    let mut freudenthal_bad = 0usize;
    for _ in 0..20 {
        let cells = rng.gen_range(1..=6);
        let g = Arc::new(CellGrid::unit(cells));
        let vv: Vec<f64> = (0..cells).map(|_| rng.gen_range(0.1..3.0)).collect();
        let uu: Vec<f64> = vv.iter().map(|v| v * rng.gen_range(-2.0..2.0)).collect();
        let v = StepElement::new(g.clone(), vv)?;
        let u = StepElement::new(g, uu)?;
        let mut prev: Option<StepElement> = None;
        for n in 1..=16u32 {
            let s = freudenthal_approx(&v, &u, n)?.s;
            let gap = u.sub(&s)?;
            for j in 0..cells {
                if !(gap.value(j) >= 0.0 && gap.value(j) <= v.value(j) / n as f64 + 1e-12) {
                    freudenthal_bad += 1;
                }
            }
            if let Some(p) = &prev {
                if !p.le(&s)? {
                    freudenthal_bad += 1;
                }
            }
            prev = Some(s);
        }
    }
    let f = IntervalFunction::new(
        vec![0.0, 0.2, 0.4, 0.5, 0.6, 0.8, 1.0],
        vec![0.0, 1.0, 0.0, 0.0, 2.0, 0.5, 0.0],
    )?;
    let all = f.all_fragments()?;
    let mut interval_bad = 0usize;
    for (i, g) in all.iter().enumerate() {
        if f.selector_of(g)? != ComponentSelector::from_index(f.n_components(), i as u64) {
            interval_bad += 1;
        }
    }
    let sup = f.family_sup(&all)?;
    let inf = f.family_inf(&all)?;
    if sup.values() != f.values() || !inf.is_zero() {
        interval_bad += 1;
    }
    let row = |metric: &str, value: usize| Row {
        experiment: "selftest-lattice".into(),
        n_cells: 0,
        epsilon: None,
        metric: metric.into(),
        value: value as f64,
        seed,
        runtime_ms: started.elapsed().as_millis() as u64,
    };
    Ok(vec![
        row("freudenthal_violations", freudenthal_bad),
        row("interval_model_violations", interval_bad),
    ])
}
