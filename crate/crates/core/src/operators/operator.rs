use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::kernel::{NemytskiiFunction, Profile, UrysohnKernel};
use super::range::{NormKind, RangeSpace, RangeVector};
use crate::error::{Error, Result};
use crate::lattice::{same_grid, CellGrid, CellMask, StepElement};

/// An evaluatable orthogonally additive map from step elements on one grid
/// into a finite-dimensional range.
pub trait OaMap: Send + Sync {
    fn range(&self) -> &RangeSpace;

    fn input_grid(&self) -> &Arc<CellGrid>;

    fn evaluate(&self, x: &StepElement) -> Result<RangeVector>;

    fn check_input(&self, x: &StepElement) -> Result<()> {
        if same_grid(self.input_grid(), x.grid()) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    fn norm_of(&self, x: &StepElement) -> Result<f64> {
        Ok(self.range().norm(&self.evaluate(x)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorKind {
    /// `(Tf)(s) = ∫ K(s, t, f(t)) dν(t)`, sampled at `output_cells` uniform
    /// midpoints of the input's base interval. `restrict` keeps only the
    /// input cells whose center lies in `[lo, hi)`.
    Urysohn {
        kernel: UrysohnKernel,
        #[serde(default = "one")]
        output_cells: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        restrict: Option<(f64, f64)>,
    },
    /// `T_N(g)(t) = N(t, g(t))`
    Nemytskii { function: NemytskiiFunction },
    /// `𝒩(f) = Σ |f_t| μ_t`
    NormFunctional,
    /// `Tf = f · S(f)` with `S` the diagonal multiplier `w`.
    BandMultiplication { weight: Profile },
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub norm: NormKind,
}

/// Grid-independent description of an operator; the JSON interface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    #[serde(flatten)]
    pub kind: OperatorKind,
    pub range: RangeSpec,
}

impl OperatorSpec {
    pub fn new(kind: OperatorKind, norm: NormKind) -> Self {
        Self {
            kind,
            range: RangeSpec { dim: None, norm },
        }
    }

    pub fn urysohn(kernel: UrysohnKernel, output_cells: usize, norm: NormKind) -> Self {
        Self::new(
            OperatorKind::Urysohn {
                kernel,
                output_cells,
                restrict: None,
            },
            norm,
        )
    }

    pub fn nemytskii(function: NemytskiiFunction, norm: NormKind) -> Self {
        Self::new(OperatorKind::Nemytskii { function }, norm)
    }

    pub fn norm_functional() -> Self {
        Self::new(OperatorKind::NormFunctional, NormKind::Sup)
    }

    pub fn band_multiplication(weight: Profile, norm: NormKind) -> Self {
        Self::new(OperatorKind::BandMultiplication { weight }, norm)
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            OperatorKind::Urysohn { .. } => "urysohn",
            OperatorKind::Nemytskii { .. } => "nemytskii",
            OperatorKind::NormFunctional => "norm_functional",
            OperatorKind::BandMultiplication { .. } => "band_multiplication",
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("operator specs always serialize")
    }

    pub fn instantiate(&self, grid: Arc<CellGrid>) -> Result<OaOperator> {
        OaOperator::new(self.clone(), grid)
    }
}

#[derive(Debug, Clone)]
enum Prepared {
    Urysohn {
        s_centers: Vec<f64>,
        active: CellMask,
    },
    Nemytskii {
        g: Vec<f64>,
    },
    NormFunctional,
    Band {
        w: Vec<f64>,
    },
}

/// An [`OperatorSpec`] bound to an input grid.
#[derive(Debug, Clone)]
pub struct OaOperator {
    spec: OperatorSpec,
    grid: Arc<CellGrid>,
    range: RangeSpace,
    prepared: Prepared,
}

impl OaOperator {
    pub fn new(spec: OperatorSpec, grid: Arc<CellGrid>) -> Result<Self> {
        let n = grid.n_cells();
        let (dim, prepared) = match &spec.kind {
            OperatorKind::Urysohn {
                output_cells,
                restrict,
                ..
            } => {
                if *output_cells == 0 {
                    return Err(Error::Contract("urysohn needs at least one output cell".into()));
                }
                let (a, b) = grid.base_interval();
                let h = (b - a) / *output_cells as f64;
                let s_centers = (0..*output_cells)
                    .map(|i| a + (i as f64 + 0.5) * h)
                    .collect();
                let active = match restrict {
                    None => CellMask::full(n),
                    Some((lo, hi)) => CellMask::from_cells(
                        n,
                        (0..n).filter(|&j| {
                            let t = grid.center(j);
                            *lo <= t && t < *hi
                        }),
                    ),
                };
                (*output_cells, Prepared::Urysohn { s_centers, active })
            }
            OperatorKind::Nemytskii { function } => {
                function.validate()?;
                let g = function.profile().sample(grid.centers())?;
                (n, Prepared::Nemytskii { g })
            }
            OperatorKind::NormFunctional => (1, Prepared::NormFunctional),
            OperatorKind::BandMultiplication { weight } => {
                let w = weight.sample(grid.centers())?;
                (n, Prepared::Band { w })
            }
        };
        if let Some(d) = spec.range.dim {
            if d != dim {
                return Err(Error::Contract(format!(
                    "range declares dim {d} but the operator produces dim {dim}"
                )));
            }
        }
        let range = RangeSpace::new(dim, spec.range.norm)?;
        Ok(Self {
            spec,
            grid,
            range,
            prepared,
        })
    }

    pub fn spec(&self) -> &OperatorSpec {
        &self.spec
    }

    /// Same spec on a different grid.
    pub fn rebind(&self, grid: Arc<CellGrid>) -> Result<Self> {
        Self::new(self.spec.clone(), grid)
    }

    /// A copy whose kernel or function is replaced, keeping grid and range.
    pub(crate) fn with_kind(&self, kind: OperatorKind) -> Result<Self> {
        Self::new(
            OperatorSpec {
                kind,
                range: self.spec.range.clone(),
            },
            self.grid.clone(),
        )
    }
}

impl OaMap for OaOperator {
    fn range(&self) -> &RangeSpace {
        &self.range
    }

    fn input_grid(&self) -> &Arc<CellGrid> {
        &self.grid
    }

    fn evaluate(&self, x: &StepElement) -> Result<RangeVector> {
        self.check_input(x)?;
        let out = match (&self.spec.kind, &self.prepared) {
            (OperatorKind::Urysohn { kernel, .. }, Prepared::Urysohn { s_centers, active }) => {
                let mut out = vec![0.0; s_centers.len()];
                for (j, &r) in x.values().iter().enumerate() {
                    // K(s, t, 0) = 0 for every family, so zero cells add nothing.
                    if r == 0.0 || !active.contains(j) {
                        continue;
                    }
                    let t = self.grid.center(j);
                    let mu = self.grid.weight(j);
                    for (o, &s) in out.iter_mut().zip(s_centers) {
                        *o += kernel.eval(s, t, r) * mu;
                    }
                }
                out
            }
            (OperatorKind::Nemytskii { function }, Prepared::Nemytskii { g }) => x
                .values()
                .iter()
                .zip(g)
                .map(|(&r, &gj)| function.eval_with(gj, r))
                .collect(),
            (OperatorKind::NormFunctional, Prepared::NormFunctional) => {
                vec![x
                    .values()
                    .iter()
                    .zip(self.grid.weights())
                    .map(|(v, mu)| v.abs() * mu)
                    .sum()]
            }
            (OperatorKind::BandMultiplication { .. }, Prepared::Band { w }) => x
                .values()
                .iter()
                .zip(w)
                .map(|(&r, &wj)| r * (wj * r))
                .collect(),
            _ => unreachable!("prepared data always matches the operator kind"),
        };
        let out = RangeVector(out);
        if !out.is_finite() {
            return Err(Error::Numeric(format!("{} evaluation", self.spec.kind_name())));
        }
        Ok(out)
    }
}

/// The zero operator.
#[derive(Debug, Clone)]
pub struct ZeroMap {
    grid: Arc<CellGrid>,
    range: RangeSpace,
}

impl ZeroMap {
    pub fn new(grid: Arc<CellGrid>, range: RangeSpace) -> Self {
        Self { grid, range }
    }

    pub fn like(op: &dyn OaMap) -> Self {
        Self::new(op.input_grid().clone(), *op.range())
    }
}

impl OaMap for ZeroMap {
    fn range(&self) -> &RangeSpace {
        &self.range
    }
    fn input_grid(&self) -> &Arc<CellGrid> {
        &self.grid
    }
    fn evaluate(&self, x: &StepElement) -> Result<RangeVector> {
        self.check_input(x)?;
        Ok(self.range.zero())
    }
}

/// `c · T`
pub struct Scaled<'a> {
    pub op: &'a dyn OaMap,
    pub factor: f64,
}

impl OaMap for Scaled<'_> {
    fn range(&self) -> &RangeSpace {
        self.op.range()
    }
    fn input_grid(&self) -> &Arc<CellGrid> {
        self.op.input_grid()
    }
    fn evaluate(&self, x: &StepElement) -> Result<RangeVector> {
        Ok(self.op.evaluate(x)?.scale(self.factor))
    }
}

/// `T − S`
pub struct Difference<'a> {
    pub lhs: &'a dyn OaMap,
    pub rhs: &'a dyn OaMap,
}

impl<'a> Difference<'a> {
    pub fn new(lhs: &'a dyn OaMap, rhs: &'a dyn OaMap) -> Result<Self> {
        check_signature(lhs, rhs)?;
        Ok(Self { lhs, rhs })
    }
}

impl OaMap for Difference<'_> {
    fn range(&self) -> &RangeSpace {
        self.lhs.range()
    }
    fn input_grid(&self) -> &Arc<CellGrid> {
        self.lhs.input_grid()
    }
    fn evaluate(&self, x: &StepElement) -> Result<RangeVector> {
        Ok(&self.lhs.evaluate(x)? - &self.rhs.evaluate(x)?)
    }
}

/// `T + S`
pub struct Sum<'a> {
    pub lhs: &'a dyn OaMap,
    pub rhs: &'a dyn OaMap,
}

impl<'a> Sum<'a> {
    pub fn new(lhs: &'a dyn OaMap, rhs: &'a dyn OaMap) -> Result<Self> {
        check_signature(lhs, rhs)?;
        Ok(Self { lhs, rhs })
    }
}

impl OaMap for Sum<'_> {
    fn range(&self) -> &RangeSpace {
        self.lhs.range()
    }
    fn input_grid(&self) -> &Arc<CellGrid> {
        self.lhs.input_grid()
    }
    fn evaluate(&self, x: &StepElement) -> Result<RangeVector> {
        Ok(&self.lhs.evaluate(x)? + &self.rhs.evaluate(x)?)
    }
}

pub fn check_signature(a: &dyn OaMap, b: &dyn OaMap) -> Result<()> {
    if !same_grid(a.input_grid(), b.input_grid()) {
        return Err(Error::GridMismatch);
    }
    if a.range().dim != b.range().dim {
        return Err(Error::Contract(format!(
            "range dimensions differ: {} vs {}",
            a.range().dim,
            b.range().dim
        )));
    }
    Ok(())
}
