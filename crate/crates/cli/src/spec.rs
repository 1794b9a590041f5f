//! Experiment specification files.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use oa_core::lattice::{CellGrid, ElementLiteral, StepElement};
use oa_core::narrow::RoundingStrategy;
use oa_core::operators::{OperatorSpec, Poly1};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    OaCheck,
    RkOracle,
    CCompact,
    Narrow,
    RoundingBench,
}

impl Pipeline {
    pub fn as_str(self) -> &'static str {
        match self {
            Pipeline::OaCheck => "oa-check",
            Pipeline::RkOracle => "rk-oracle",
            Pipeline::CCompact => "c-compact",
            Pipeline::Narrow => "narrow",
            Pipeline::RoundingBench => "rounding-bench",
        }
    }
}

/// How the input element is produced on each grid of the sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ElementSpec {
    Constant(f64),
    /// Polynomial in the cell center, coefficients ascending.
    Poly(Poly1),
    /// One value per cell of the coarsest grid, repeated on refinement.
    Values(Vec<f64>),
    /// A fixed element with its own grid; the sweep must match it.
    Literal(ElementLiteral),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub pipelines: Vec<Pipeline>,
    pub operator: OperatorSpec,
    /// Second operator for the two-operator formulas; zero when absent.
    #[serde(default)]
    pub companion: Option<OperatorSpec>,
    pub element: ElementSpec,
    #[serde(default = "unit_interval")]
    pub interval: (f64, f64),
    pub refinements: Vec<usize>,
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub strategy: Option<RoundingStrategy>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Output file stem; defaults to `name`.
    #[serde(default)]
    pub output: Option<String>,
}

fn unit_interval() -> (f64, f64) {
    (0.0, 1.0)
}

fn default_trials() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecError {
    pub location: String,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for SpecError {}

impl ExperimentSpec {
    pub fn from_str_named(text: &str, source: &str) -> Result<Self, SpecError> {
        let spec: Self = serde_json::from_str(text).map_err(|e| SpecError {
            location: format!("{source}:{}:{}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        spec.validate().map_err(|(field, message)| SpecError {
            location: format!("{source}: field `{field}`"),
            message,
        })?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, SpecError> {
        let text = std::fs::read_to_string(path).map_err(|e| SpecError {
            location: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_str_named(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        if self.name.trim().is_empty() {
            return Err(("name", "must be nonempty".into()));
        }
        if self.pipelines.is_empty() {
            return Err(("pipelines", "must list at least one pipeline".into()));
        }
        if self.refinements.is_empty() {
            return Err(("refinements", "sweep list is empty".into()));
        }
        if self.refinements.contains(&0) {
            return Err(("refinements", "cell counts must be positive".into()));
        }
        if self.refinements.windows(2).any(|w| w[1] <= w[0]) {
            return Err(("refinements", "must be strictly ascending".into()));
        }
        if self.epsilons.is_empty() {
            return Err(("epsilons", "sweep list is empty".into()));
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return Err(("epsilons", format!("{e} is not a positive number")));
        }
        if self.trials == 0 {
            return Err(("trials", "must be at least 1".into()));
        }
        if !(self.interval.0 < self.interval.1) {
            return Err(("interval", "needs a < b".into()));
        }
        match &self.element {
            ElementSpec::Values(v) => {
                if v.is_empty() {
                    return Err(("element", "values are empty".into()));
                }
                if let Some(n) = self.refinements.iter().find(|&&n| n % v.len() != 0) {
                    return Err((
                        "element",
                        format!("{n} cells is not a multiple of the {} given values", v.len()),
                    ));
                }
            }
            ElementSpec::Literal(lit) => {
                if self.refinements != [lit.weights.len()] {
                    return Err((
                        "refinements",
                        "a literal element fixes the grid; list exactly its cell count".into(),
                    ));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn build(&self, n_cells: usize) -> oa_core::Result<(Arc<CellGrid>, StepElement)> {
        let (a, b) = self.interval;
        if let ElementSpec::Literal(lit) = &self.element {
            let x = StepElement::from_literal(lit)?;
            return Ok((x.grid().clone(), x));
        }
        let grid = Arc::new(CellGrid::uniform(n_cells, a, b)?);
        let x = match &self.element {
            ElementSpec::Constant(c) => StepElement::constant(grid.clone(), *c)?,
            ElementSpec::Poly(p) => StepElement::from_fn(grid.clone(), |t| p.eval(t))?,
            ElementSpec::Values(v) => {
                let rep = n_cells / v.len();
                let vals = v.iter().flat_map(|&x| std::iter::repeat(x).take(rep)).collect();
                StepElement::new(grid.clone(), vals)?
            }
            ElementSpec::Literal(_) => unreachable!(),
        };
        Ok((grid, x))
    }

    pub fn output_stem(&self) -> &str {
        self.output.as_deref().unwrap_or(&self.name)
    }
}
