//! Executes the pipelines of an experiment across its sweep.

use std::time::Instant;

use oa_core::calculus::{operator_abs_bound_check, rk_oracle, rk_partition, RkMode};
use oa_core::compact::{c_compact_net, NetMode, NetRecord};
use oa_core::lattice::{CellMask, StepElement};
use oa_core::narrow::{narrow_split, round_weights, RoundingProblem, RoundingStrategy, SplitOptions};
use oa_core::operators::{check_orthogonal_additivity, OaMap, OaOperator, RangeVector, ZeroMap};
use oa_core::{sampling, Error};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::spec::{ExperimentSpec, Pipeline};

/// One CSV record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub experiment: String,
    pub n_cells: usize,
    pub epsilon: Option<f64>,
    pub metric: String,
    pub value: f64,
    pub seed: u64,
    pub runtime_ms: u64,
}

#[derive(Debug, Default, Clone)]
pub struct Outcome {
    pub rows: Vec<Row>,
    pub nets: Vec<NetRecord>,
    /// Scientific assertion failures.
    pub failures: Vec<String>,
    /// Resolution failures: the grid is too coarse for the requested ε.
    pub coarse: Vec<String>,
}

impl Outcome {
    fn merge(&mut self, other: Outcome) {
        self.rows.extend(other.rows);
        self.nets.extend(other.nets);
        self.failures.extend(other.failures);
        self.coarse.extend(other.coarse);
    }

    pub fn exit_code(&self) -> i32 {
        if !self.failures.is_empty() {
            2
        } else if !self.coarse.is_empty() {
            3
        } else {
            0
        }
    }
}

const RK_TOL: f64 = 1e-9;
const EXHAUSTIVE_NET_CAP: usize = 16;

struct Ctx<'a> {
    spec: &'a ExperimentSpec,
    n: usize,
    op: OaOperator,
    companion: Box<dyn OaMap>,
    x: StepElement,
    out: Outcome,
}

impl Ctx<'_> {
    fn row(&mut self, epsilon: Option<f64>, metric: &str, value: f64, started: Instant) {
        self.out.rows.push(Row {
            experiment: self.spec.name.clone(),
            n_cells: self.n,
            epsilon,
            metric: metric.to_string(),
            value,
            seed: self.spec.seed,
            runtime_ms: started.elapsed().as_millis() as u64,
        });
    }

    fn fail(&mut self, what: String) {
        self.out
            .failures
            .push(format!("{} n={}: {what}", self.spec.name, self.n));
    }
}

/// Runs every pipeline for every refinement (in parallel) and epsilon,
/// collecting rows in sweep order.
pub fn run_experiment(spec: &ExperimentSpec) -> oa_core::Result<Outcome> {
    let parts: Vec<oa_core::Result<Outcome>> = spec
        .refinements
        .par_iter()
        .map(|&n| run_level(spec, n))
        .collect();
    let mut all = Outcome::default();
    for p in parts {
        all.merge(p?);
    }
    Ok(all)
}

fn run_level(spec: &ExperimentSpec, n: usize) -> oa_core::Result<Outcome> {
    let (grid, x) = spec.build(n)?;
    let op = spec.operator.instantiate(grid.clone())?;
    let companion: Box<dyn OaMap> = match &spec.companion {
        Some(c) => Box::new(c.instantiate(grid)?),
        None => Box::new(ZeroMap::like(&op)),
    };
    let mut ctx = Ctx {
        spec,
        n: x.n_cells(),
        op,
        companion,
        x,
        out: Outcome::default(),
    };
    for &p in &spec.pipelines {
        match p {
            Pipeline::OaCheck => oa_check(&mut ctx)?,
            Pipeline::RkOracle => rk_check(&mut ctx)?,
            Pipeline::CCompact => {
                for &eps in &spec.epsilons {
                    c_compact(&mut ctx, eps)?;
                }
            }
            Pipeline::Narrow => {
                for &eps in &spec.epsilons {
                    narrow(&mut ctx, eps)?;
                }
            }
            Pipeline::RoundingBench => rounding_bench(&mut ctx)?,
        }
    }
    Ok(ctx.out)
}

fn level_seed(ctx: &Ctx<'_>) -> u64 {
    ctx.spec.seed ^ (ctx.n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn oa_check(ctx: &mut Ctx<'_>) -> oa_core::Result<()> {
    let started = Instant::now();
    let r = check_orthogonal_additivity(&ctx.op, ctx.spec.trials, level_seed(ctx))?;
    ctx.row(None, "oa_max_violation", r.max_violation, started);
    if !r.passed {
        ctx.fail(format!("orthogonal additivity violated by {:e}", r.max_violation));
    }
    Ok(())
}

fn rk_check(ctx: &mut Ctx<'_>) -> oa_core::Result<()> {
    let started = Instant::now();
    let grid = ctx.op.input_grid().clone();
    let mut rng = sampling::substream(level_seed(ctx), 1);
    let samples: Vec<StepElement> = (0..ctx.spec.trials)
        .map(|_| {
            let y = sampling::random_element(&grid, &mut rng, 2.0, 0.25);
            let keep = CellMask::from_cells(grid.n_cells(), y.support_cells().into_iter().take(8));
            y.restrict(&keep)
        })
        .collect();
    for mode in RkMode::all() {
        let mut gap = 0.0f64;
        for y in &samples {
            let a = rk_partition(&ctx.op, ctx.companion.as_ref(), y, mode)?;
            let b = rk_oracle(&ctx.op, ctx.companion.as_ref(), y, mode)?;
            gap = gap.max(a.max_abs_diff(&b));
        }
        ctx.row(None, &format!("rk_gap_{}", mode.as_str()), gap, started);
        if gap > RK_TOL {
            ctx.fail(format!("{} mode: finest partition differs from oracle by {gap:e}", mode.as_str()));
        }
    }
    let bound = operator_abs_bound_check(&ctx.op, &samples)?;
    ctx.row(None, "abs_bound_violations", bound.violations as f64, started);
    if !bound.passed() {
        ctx.fail(format!("|Tx| <= |T|(x) violated on {} samples", bound.violations));
    }
    Ok(())
}

fn c_compact(ctx: &mut Ctx<'_>, eps: f64) -> oa_core::Result<()> {
    let started = Instant::now();
    let exhaustive = ctx.x.support().count() <= EXHAUSTIVE_NET_CAP;
    let mode = if exhaustive {
        NetMode::Exhaustive
    } else {
        NetMode::Sampled {
            k: ctx.spec.trials.max(256),
            seed: level_seed(ctx),
        }
    };
    let net = c_compact_net(&ctx.op, &ctx.x, eps, mode)?;
    ctx.row(Some(eps), "net_size", net.size() as f64, started);
    ctx.row(Some(eps), "covered_fraction", net.covered_fraction, started);
    ctx.out
        .nets
        .push(net.record(format!("{}/n={}", ctx.spec.name, ctx.n)));
    if exhaustive && net.covered_fraction < 1.0 {
        ctx.fail(format!("exhaustive net at eps {eps} misses fragment images"));
    }
    Ok(())
}

fn narrow(ctx: &mut Ctx<'_>, eps: f64) -> oa_core::Result<()> {
    let started = Instant::now();
    let opts = SplitOptions {
        strategy: ctx.spec.strategy,
        seed: ctx.spec.seed,
    };
    match narrow_split(&ctx.op, &ctx.x, eps, opts) {
        Ok(s) => {
            let total = ctx.op.norm_of(&ctx.x)?;
            ctx.row(Some(eps), "defect", s.defect, started);
            ctx.row(
                Some(eps),
                "relative_defect",
                if total > 0.0 { s.defect / total } else { 0.0 },
                started,
            );
            ctx.row(Some(eps), "parts", s.parts as f64, started);
            Ok(())
        }
        Err(e @ Error::GridTooCoarse { .. }) => {
            ctx.row(Some(eps), "grid_too_coarse", 1.0, started);
            let msg = format!("{} n={} eps={eps}: {e}", ctx.spec.name, ctx.n);
            ctx.out.coarse.push(msg);
            Ok(())
        }
        Err(e) => Err(e),
    }
}

fn rounding_bench(ctx: &mut Ctx<'_>) -> oa_core::Result<()> {
    let started = Instant::now();
    let count = ctx.n.min(20);
    let dim = ctx.op.range().dim.min(5);
    let norm = ctx.op.range().norm;
    let mut rng = sampling::substream(level_seed(ctx), 3);
    let mut brute_ratio = 0.0f64;
    let mut greedy_ratio = 0.0f64;
    let mut min_gap = f64::INFINITY;
    for k in 0..ctx.spec.trials {
        let vectors = (0..count)
            .map(|_| RangeVector((0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()))
            .collect();
        let weights = (0..count).map(|_| rng.gen::<f64>()).collect();
        let p = RoundingProblem::new(vectors, weights, norm)?;
        let bound = p.bound();
        let b = round_weights(&p, RoundingStrategy::Brute, 0);
        let g = round_weights(&p, RoundingStrategy::GreedyNullspace, ctx.spec.seed.wrapping_add(k as u64));
        match (b, g) {
            (Ok(b), Ok(g)) => {
                if bound > 0.0 {
                    brute_ratio = brute_ratio.max(b.residual / bound);
                    greedy_ratio = greedy_ratio.max(g.residual / bound);
                }
                min_gap = min_gap.min(g.residual - b.residual);
            }
            (Err(e @ Error::BoundViolated { .. }), _) | (_, Err(e @ Error::BoundViolated { .. })) => {
                ctx.fail(format!("rounding problem {k}: {e}"));
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    ctx.row(None, "brute_residual_over_bound", brute_ratio, started);
    ctx.row(None, "greedy_residual_over_bound", greedy_ratio, started);
    ctx.row(None, "greedy_minus_brute_min", min_gap, started);
    if min_gap < -1e-12 {
        ctx.fail(format!("greedy beat the exhaustive minimum by {:e}", -min_gap));
    }
    Ok(())
}
