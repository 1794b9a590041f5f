//! Nonnegative piecewise-linear functions on `[0, 1]` and their fragments.
//!
//! A fragment of such an `f` must agree with `f` or vanish on each maximal
//! open interval where `f > 0` (a connected component of the support), so
//! fragments are in bijection with 0-1 selectors over those components.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IntervalRepr", into = "IntervalRepr")]
pub struct IntervalFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    components: Vec<SupportComponent>,
    /// Component index for each breakpoint with a positive value.
    owner: Vec<Option<usize>>,
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<IntervalRepr> for IntervalFunction {
    type Error = Error;
    fn try_from(r: IntervalRepr) -> Result<Self> {
        Self::new(r.breakpoints, r.values)
    }
}

impl From<IntervalFunction> for IntervalRepr {
    fn from(f: IntervalFunction) -> Self {
        IntervalRepr {
            breakpoints: f.breakpoints,
            values: f.values,
        }
    }
}

/// A maximal open interval `(a, b)` on which `f > 0`, spanning segments
/// `first_segment..=last_segment`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportComponent {
    pub a: f64,
    pub b: f64,
    pub first_segment: usize,
    pub last_segment: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComponentSelector {
    pub bits: Vec<bool>,
}

impl ComponentSelector {
    pub fn from_bit_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '1' => Ok(true),
                '0' => Ok(false),
                other => Err(Error::Malformed(format!("bad bit {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(|bits| Self { bits })
    }

    pub fn from_index(len: usize, index: u64) -> Self {
        Self {
            bits: (0..len).map(|i| index >> i & 1 == 1).collect(),
        }
    }
}

impl IntervalFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 || breakpoints.len() != values.len() {
            return Err(Error::InvalidElement(
                "need at least two breakpoints and one value per breakpoint".into(),
            ));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(Error::InvalidElement(
                "breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidElement(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidElement(
                "values must be finite and nonnegative".into(),
            ));
        }
        let mut f = Self {
            breakpoints,
            values,
            components: Vec::new(),
            owner: Vec::new(),
        };
        f.index_components();
        Ok(f)
    }

    fn index_components(&mut self) {
        let n_seg = self.breakpoints.len() - 1;
        let positive_seg = |k: usize| self.values[k] > 0.0 || self.values[k + 1] > 0.0;
        let mut comps = Vec::new();
        let mut k = 0;
        while k < n_seg {
            if !positive_seg(k) {
                k += 1;
                continue;
            }
            let first = k;
            // Neighbouring positive segments merge through a positive breakpoint.
            while k + 1 < n_seg && self.values[k + 1] > 0.0 && positive_seg(k + 1) {
                k += 1;
            }
            comps.push(SupportComponent {
                a: self.breakpoints[first],
                b: self.breakpoints[k + 1],
                first_segment: first,
                last_segment: k,
            });
            k += 1;
        }
        let mut owner = vec![None; self.breakpoints.len()];
        for (c, comp) in comps.iter().enumerate() {
            for p in comp.first_segment..=comp.last_segment + 1 {
                if self.values[p] > 0.0 {
                    owner[p] = Some(c);
                }
            }
        }
        self.components = comps;
        self.owner = owner;
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn components(&self) -> &[SupportComponent] {
        &self.components
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let bp = &self.breakpoints;
        let k = match bp.partition_point(|&b| b <= t) {
            0 => return self.values[0],
            p if p >= bp.len() => return *self.values.last().unwrap(),
            p => p - 1,
        };
        let w = (t - bp[k]) / (bp[k + 1] - bp[k]);
        self.values[k] + w * (self.values[k + 1] - self.values[k])
    }

    /// The fragment equal to `f` on the selected components and zero elsewhere.
    pub fn select(&self, sel: &ComponentSelector) -> Result<Self> {
        if sel.bits.len() != self.n_components() {
            return Err(Error::SelectorLength {
                got: sel.bits.len(),
                expected: self.n_components(),
            });
        }
        let values = self
            .values
            .iter()
            .zip(&self.owner)
            .map(|(&v, own)| match own {
                Some(c) if sel.bits[*c] => v,
                _ => 0.0,
            })
            .collect();
        Self::new(self.breakpoints.clone(), values)
    }

    /// Reads back the selector of a fragment `g` of `f`.
    pub fn selector_of(&self, g: &Self) -> Result<ComponentSelector> {
        if g.breakpoints != self.breakpoints {
            return Err(Error::Contract(
                "fragment must share the breakpoints of its base".into(),
            ));
        }
        let mut bits = Vec::with_capacity(self.n_components());
        for comp in &self.components {
            let mut agrees = true;
            let mut vanishes = true;
            for k in comp.first_segment..=comp.last_segment {
                for (fv, gv) in self.probe(k).into_iter().zip(g.probe(k)) {
                    agrees &= gv == fv;
                    vanishes &= gv == 0.0;
                }
            }
            match (agrees, vanishes) {
                (true, _) => bits.push(true),
                (false, true) => bits.push(false),
                (false, false) => {
                    return Err(Error::Contract(format!(
                        "g is not a fragment of f on component ({}, {})",
                        comp.a, comp.b
                    )))
                }
            }
        }
        // Outside the support g has to vanish as well.
        for k in 0..self.breakpoints.len() - 1 {
            if self.probe(k).iter().all(|&v| v == 0.0) && g.probe(k).iter().any(|&v| v != 0.0) {
                return Err(Error::Contract("g is nonzero outside the support of f".into()));
            }
        }
        Ok(ComponentSelector { bits })
    }

    /// Endpoint and midpoint values on segment `k`. Two linear functions
    /// whose product vanishes at three points of a segment have a vanishing
    /// product on the whole segment.
    fn probe(&self, k: usize) -> [f64; 3] {
        let (a, b) = (self.values[k], self.values[k + 1]);
        [a, 0.5 * (a + b), b]
    }

    /// `g ⊑ h`, i.e. `g · (h − g) = 0` everywhere, for functions sharing
    /// their breakpoints.
    pub fn is_fragment_of(g: &Self, h: &Self) -> Result<bool> {
        if g.breakpoints != h.breakpoints {
            return Err(Error::Contract(
                "fragment comparison needs shared breakpoints".into(),
            ));
        }
        Ok((0..g.breakpoints.len() - 1).all(|k| {
            g.probe(k)
                .iter()
                .zip(h.probe(k))
                .all(|(&gv, hv)| gv * (hv - gv) == 0.0)
        }))
    }

    /// Lateral supremum of a family of fragments: component `i` is kept iff
    /// some member keeps it.
    pub fn family_sup(&self, family: &[Self]) -> Result<Self> {
        let mut bits = vec![false; self.n_components()];
        for g in family {
            let sel = self.selector_of(g)?;
            for (b, s) in bits.iter_mut().zip(sel.bits) {
                *b |= s;
            }
        }
        self.select(&ComponentSelector { bits })
    }

    /// Lateral infimum: component `i` is kept iff every member keeps it. The
    /// empty family has infimum `f`.
    pub fn family_inf(&self, family: &[Self]) -> Result<Self> {
        let mut bits = vec![true; self.n_components()];
        for g in family {
            let sel = self.selector_of(g)?;
            for (b, s) in bits.iter_mut().zip(sel.bits) {
                *b &= s;
            }
        }
        self.select(&ComponentSelector { bits })
    }

    /// All `2^components` fragments, in ascending selector order.
    pub fn all_fragments(&self) -> Result<Vec<Self>> {
        let m = self.n_components();
        if m > 20 {
            return Err(Error::SupportTooLarge { support: m, cap: 20 });
        }
        (0..1u64 << m)
            .map(|i| self.select(&ComponentSelector::from_index(m, i)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two humps: (0, 0.4) and (0.6, 1).
    pub(crate) fn two_humps() -> IntervalFunction {
        IntervalFunction::new(
            vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0],
            vec![0.0, 1.0, 0.0, 0.0, 2.0, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn finds_components() {
        let f = two_humps();
        assert_eq!(f.n_components(), 2);
        assert_eq!((f.components()[0].a, f.components()[0].b), (0.0, 0.4));
        assert_eq!((f.components()[1].a, f.components()[1].b), (0.6, 1.0));
    }

    #[test]
    fn touching_zero_splits_components() {
        // A "W" shape: positive on (0, 0.5) and (0.5, 1).
        let f = IntervalFunction::new(vec![0.0, 0.5, 1.0], vec![1.0, 0.0, 1.0]).unwrap();
        assert_eq!(f.n_components(), 2);
        let g = f.select(&ComponentSelector::from_bit_str("10").unwrap()).unwrap();
        assert_eq!(g.values(), &[1.0, 0.0, 0.0]);
        assert_eq!(g.eval(0.25), 0.5);
        assert_eq!(g.eval(0.75), 0.0);
    }

    #[test]
    fn family_sup_inf_of_two_singletons() {
        let f = two_humps();
        let d = vec![
            f.select(&ComponentSelector::from_bit_str("10").unwrap()).unwrap(),
            f.select(&ComponentSelector::from_bit_str("01").unwrap()).unwrap(),
        ];
        assert_eq!(f.family_sup(&d).unwrap(), f);
        assert!(f.family_inf(&d).unwrap().is_zero());
    }

    #[test]
    fn singleton_family() {
        let f = two_humps();
        let d = vec![f.select(&ComponentSelector::from_bit_str("11").unwrap()).unwrap()];
        assert_eq!(f.family_sup(&d).unwrap(), f);
        assert_eq!(f.family_inf(&d).unwrap(), f);
    }

    #[test]
    fn three_components_all_selectors() {
        let f = IntervalFunction::new(
            vec![0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0],
            vec![0.5, 1.0, 0.0, 3.0, 0.0, 1.0, 1.0],
        )
        .unwrap();
        assert_eq!(f.n_components(), 3);
        let all = f.all_fragments().unwrap();
        assert_eq!(all.len(), 8);
        assert_eq!(f.family_sup(&all).unwrap(), f);
        assert!(f.family_inf(&all).unwrap().is_zero());
    }

    #[test]
    fn selector_length_is_checked() {
        let f = two_humps();
        assert!(matches!(
            f.select(&ComponentSelector::from_bit_str("1").unwrap()),
            Err(Error::SelectorLength { got: 1, expected: 2 })
        ));
    }

    #[test]
    fn half_a_component_is_not_a_fragment() {
        let f = IntervalFunction::new(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        let g = IntervalFunction::new(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 1.0]).unwrap();
        assert!(f.selector_of(&g).is_err());
        assert!(!IntervalFunction::is_fragment_of(&g, &f).unwrap());
    }

    #[test]
    fn rejects_bad_functions() {
        assert!(IntervalFunction::new(vec![0.0, 1.0], vec![0.0, -1.0]).is_err());
        assert!(IntervalFunction::new(vec![0.0, 0.5], vec![0.0, 1.0]).is_err());
        assert!(IntervalFunction::new(vec![0.0, 0.5, 0.5, 1.0], vec![0.0; 4]).is_err());
    }
}
