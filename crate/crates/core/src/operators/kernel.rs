//! Closed symbolic kernel families. Every family vanishes at `r = 0` and is
//! continuous in `r` (apart from the negative-exponent Nemytskii powers,
//! which are only `0` at the origin by convention).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `Σ c · s^i · t^j`, serialized as `[[c, i, j], ...]`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly2(pub Vec<(f64, u32, u32)>);

impl Poly2 {
    pub fn constant(c: f64) -> Self {
        Self(vec![(c, 0, 0)])
    }

    /// `1 + s·t`
    pub fn one_plus_st() -> Self {
        Self(vec![(1.0, 0, 0), (1.0, 1, 1)])
    }

    pub fn eval(&self, s: f64, t: f64) -> f64 {
        self.0
            .iter()
            .map(|&(c, i, j)| c * s.powi(i as i32) * t.powi(j as i32))
            .sum()
    }
}

/// `Σ c_k t^k`, coefficients in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly1(pub Vec<f64>);

impl Poly1 {
    pub fn constant(c: f64) -> Self {
        Self(vec![c])
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }
}

/// A function of the input variable: a polynomial in `t`, or one explicit
/// value per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Poly(Poly1),
    Values(Vec<f64>),
}

impl Profile {
    pub fn constant(c: f64) -> Self {
        Profile::Poly(Poly1::constant(c))
    }

    pub fn sample(&self, centers: &[f64]) -> Result<Vec<f64>> {
        match self {
            Profile::Poly(p) => Ok(centers.iter().map(|&t| p.eval(t)).collect()),
            Profile::Values(v) if v.len() == centers.len() => Ok(v.clone()),
            Profile::Values(v) => Err(Error::Contract(format!(
                "profile has {} values for a grid of {} cells",
                v.len(),
                centers.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    #[inline]
    fn part(self, v: f64) -> f64 {
        match self {
            Sign::Positive => v.max(0.0),
            Sign::Negative => (-v).max(0.0),
        }
    }
}

/// Kernels `K(s, t, r)` of Urysohn integral operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum UrysohnKernel {
    /// `Σ_{k≥1} c_k(s, t) r^k`; `coeffs[0]` multiplies `r`.
    Polynomial { coeffs: Vec<Poly2> },
    /// `r · sin(c · s · t · r)`
    Sine { c: f64 },
    /// `r² · w(s, t)`
    Quadratic { weight: Poly2 },
    /// Pointwise positive or negative part in `r`.
    Part { sign: Sign, inner: Box<UrysohnKernel> },
}

impl UrysohnKernel {
    /// `r · w(s, t)`
    pub fn linear(weight: Poly2) -> Self {
        UrysohnKernel::Polynomial {
            coeffs: vec![weight],
        }
    }

    /// `r²`
    pub fn square() -> Self {
        UrysohnKernel::Polynomial {
            coeffs: vec![Poly2::default(), Poly2::constant(1.0)],
        }
    }

    pub fn eval(&self, s: f64, t: f64, r: f64) -> f64 {
        match self {
            UrysohnKernel::Polynomial { coeffs } => {
                let mut acc = 0.0;
                let mut rk = r;
                for c in coeffs {
                    acc += c.eval(s, t) * rk;
                    rk *= r;
                }
                acc
            }
            UrysohnKernel::Sine { c } => r * (c * s * t * r).sin(),
            UrysohnKernel::Quadratic { weight } => r * r * weight.eval(s, t),
            UrysohnKernel::Part { sign, inner } => sign.part(inner.eval(s, t, r)),
        }
    }

    pub fn positive_part(&self) -> Self {
        UrysohnKernel::Part {
            sign: Sign::Positive,
            inner: Box::new(self.clone()),
        }
    }

    pub fn negative_part(&self) -> Self {
        UrysohnKernel::Part {
            sign: Sign::Negative,
            inner: Box::new(self.clone()),
        }
    }

    /// Checks `K(s, t, 0) = 0` exactly on an `n × n` grid of `(s, t)`.
    pub fn vanishes_at_zero(&self, n: usize) -> bool {
        (0..n).all(|i| {
            (0..n).all(|j| {
                let s = (i as f64 + 0.5) / n as f64;
                let t = (j as f64 + 0.5) / n as f64;
                self.eval(s, t, 0.0) == 0.0
            })
        })
    }
}

/// Functions `N(t, r)` of Nemytskii superposition operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum NemytskiiFunction {
    /// `r · g(t)`
    Linear { g: Profile },
    /// `|r|^p · sign(r) · g(t)`
    OddPower { p: f64, g: Profile },
    /// `|r|^p · g(t)`; `N(t, 0) = 0` even when `p ≤ 0`.
    EvenPower { p: f64, g: Profile },
    /// `clamp(inner, lo, hi)` with `lo ≤ 0 ≤ hi`.
    Clipped {
        lo: f64,
        hi: f64,
        inner: Box<NemytskiiFunction>,
    },
    Part {
        sign: Sign,
        inner: Box<NemytskiiFunction>,
    },
}

impl NemytskiiFunction {
    pub fn identity() -> Self {
        NemytskiiFunction::Linear {
            g: Profile::constant(1.0),
        }
    }

    pub fn negation() -> Self {
        NemytskiiFunction::Linear {
            g: Profile::constant(-1.0),
        }
    }

    pub fn square() -> Self {
        NemytskiiFunction::EvenPower {
            p: 2.0,
            g: Profile::constant(1.0),
        }
    }

    /// `1/r²` away from the origin.
    pub fn inverse_square() -> Self {
        NemytskiiFunction::EvenPower {
            p: -2.0,
            g: Profile::constant(1.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            NemytskiiFunction::Clipped { lo, hi, inner } => {
                if !(*lo <= 0.0 && 0.0 <= *hi) {
                    return Err(Error::Contract(format!(
                        "clip bounds [{lo}, {hi}] must contain 0"
                    )));
                }
                inner.validate()
            }
            NemytskiiFunction::Part { inner, .. } => inner.validate(),
            _ => Ok(()),
        }
    }

    /// The single profile `g` underneath any wrappers.
    pub fn profile(&self) -> &Profile {
        match self {
            NemytskiiFunction::Linear { g }
            | NemytskiiFunction::OddPower { g, .. }
            | NemytskiiFunction::EvenPower { g, .. } => g,
            NemytskiiFunction::Clipped { inner, .. } | NemytskiiFunction::Part { inner, .. } => {
                inner.profile()
            }
        }
    }

    /// `N(t_j, r)` given its profile value `g(t_j)`.
    pub(crate) fn eval_with(&self, g: f64, r: f64) -> f64 {
        match self {
            NemytskiiFunction::Linear { .. } => r * g,
            NemytskiiFunction::OddPower { p, .. } => {
                if r == 0.0 {
                    0.0
                } else {
                    r.abs().powf(*p) * r.signum() * g
                }
            }
            NemytskiiFunction::EvenPower { p, .. } => {
                if r == 0.0 {
                    0.0
                } else {
                    r.abs().powf(*p) * g
                }
            }
            NemytskiiFunction::Clipped { lo, hi, inner } => inner.eval_with(g, r).clamp(*lo, *hi),
            NemytskiiFunction::Part { sign, inner } => sign.part(inner.eval_with(g, r)),
        }
    }

    /// `N(t_j, r)` on a grid with the given cell centers.
    pub fn eval(&self, centers: &[f64], j: usize, r: f64) -> Result<f64> {
        let g = self.profile().sample(centers)?;
        Ok(self.eval_with(g[j], r))
    }

    pub fn positive_part(&self) -> Self {
        NemytskiiFunction::Part {
            sign: Sign::Positive,
            inner: Box::new(self.clone()),
        }
    }

    pub fn negative_part(&self) -> Self {
        NemytskiiFunction::Part {
            sign: Sign::Negative,
            inner: Box::new(self.clone()),
        }
    }
}
