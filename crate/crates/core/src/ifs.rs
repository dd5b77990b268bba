//! Iterated function systems of affine contractions on `[0,1]` with interval
//! weights, their invariant measures and the envelopes of closed events over
//! the admissible weight polytope.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interval::{format_rational, ProbInterval, Rational};
use crate::polytope::{is_admissible, simplex_box_vertices};
use crate::space::{ClosedSet, SpaceDescriptor};

/// `x ↦ a·x + b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    a: Rational,
    b: Rational,
}

impl AffineMap {
    /// A strict contraction sending `[0,1]` into itself.
    pub fn new(a: Rational, b: Rational) -> Result<Self> {
        if a.abs() >= Rational::one() {
            return Err(Error::InvalidArgument(format!("scale {} is not a contraction", format_rational(&a))));
        }
        let m = AffineMap { a, b };
        let (lo, hi) = m.image();
        if lo < Rational::zero() || hi > Rational::one() {
            return Err(Error::InvalidArgument(format!("map {m:?} leaves [0,1]")));
        }
        Ok(m)
    }

    pub fn scale(&self) -> &Rational {
        &self.a
    }

    pub fn offset(&self) -> &Rational {
        &self.b
    }

    /// `f([0,1])`.
    pub fn image(&self) -> (Rational, Rational) {
        let end = &self.a + &self.b;
        if self.a.is_negative() {
            (end, self.b.clone())
        } else {
            (self.b.clone(), end)
        }
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &AffineMap) -> AffineMap {
        AffineMap { a: &self.a * &g.a, b: &self.a * &g.b + &self.b }
    }

    /// The unique fixed point `b / (1 − a)`.
    pub fn fixed_point(&self) -> Rational {
        &self.b / (Rational::one() - &self.a)
    }

    fn identity() -> AffineMap {
        AffineMap { a: Rational::one(), b: Rational::zero() }
    }
}

/// Affine maps with a box of admissible weight vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct IFSSystem {
    maps: Vec<AffineMap>,
    weights: Vec<(Rational, Rational)>,
}

impl IFSSystem {
    pub fn new(maps: Vec<AffineMap>, weights: Vec<(Rational, Rational)>) -> Result<Self> {
        if maps.len() < 2 {
            return Err(Error::InvalidArgument("an IFS needs at least two maps".into()));
        }
        if weights.len() != maps.len() {
            return Err(Error::InvalidArgument(format!(
                "{} maps but {} weight intervals",
                maps.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|(l, h)| l < &Rational::zero() || h > &Rational::one() || l > h) {
            return Err(Error::InvalidArgument("weight bounds must be ordered within [0,1]".into()));
        }
        if !is_admissible(&weights) {
            return Err(Error::EmptyAdmissibleSet("Σ lower > 1 or Σ upper < 1".into()));
        }
        Ok(IFSSystem { maps, weights })
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    pub fn weight_box(&self) -> &[(Rational, Rational)] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }
}

/// Vertices of the simplex cut by the weight box.
pub fn admissible_vertices(weight_box: &[(Rational, Rational)]) -> Result<Vec<Vec<Rational>>> {
    let v = simplex_box_vertices(weight_box);
    if v.is_empty() {
        return Err(Error::EmptyAdmissibleSet(format!("no weight vector in a box of {} intervals", weight_box.len())));
    }
    Ok(v)
}

/// One depth-`k` cylinder: the word `i1…ik`, the image of `[0,1]` under
/// `f_{i1} ∘ … ∘ f_{ik}`, and its mass `p_{i1}⋯p_{ik}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cylinder {
    pub word: Vec<usize>,
    pub lo: Rational,
    pub hi: Rational,
    pub mass: Rational,
}

/// Depth-`k` approximation of an invariant measure. Words of zero mass are
/// dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderMeasure {
    pub depth: u32,
    pub cylinders: Vec<Cylinder>,
}

impl CylinderMeasure {
    pub fn total_mass(&self) -> Rational {
        self.cylinders.iter().map(|c| &c.mass).sum()
    }
}

fn expand(s: &IFSSystem, p: Option<&[Rational]>, depth: u32) -> Vec<(Vec<usize>, AffineMap, Rational)> {
    let mut level = vec![(Vec::new(), AffineMap::identity(), Rational::one())];
    for _ in 0..depth {
        level = level
            .into_iter()
            .flat_map(|(word, map, mass)| {
                s.maps.iter().enumerate().filter_map(move |(i, f)| {
                    let m = p.map_or_else(Rational::one, |p| &mass * &p[i]);
                    if m.is_zero() {
                        return None;
                    }
                    let mut w = word.clone();
                    w.push(i);
                    Some((w, map.compose(f), m))
                })
            })
            .collect();
    }
    level
}

/// Cylinder masses of the invariant measure for weights `p` at the given depth.
pub fn invariant_measure_approx(s: &IFSSystem, p: &[Rational], depth: u32) -> Result<CylinderMeasure> {
    if p.len() != s.len() {
        return Err(Error::InvalidArgument(format!("{} weights for {} maps", p.len(), s.len())));
    }
    if p.iter().any(|x| x.is_negative()) || p.iter().sum::<Rational>() != Rational::one() {
        return Err(Error::InvalidArgument("weights must lie in the simplex".into()));
    }
    let cylinders = expand(s, Some(p), depth)
        .into_iter()
        .map(|(word, map, mass)| {
            let (lo, hi) = map.image();
            Cylinder { word, lo, hi, mass }
        })
        .collect();
    Ok(CylinderMeasure { depth, cylinders })
}

fn unit_components(c: &ClosedSet) -> Result<Vec<(Rational, Rational)>> {
    c.components_1d()
        .ok_or_else(|| Error::SpaceMismatch(format!("closed set on {} is not in [0,1]", c.space())))
}

/// `[mass of cylinders inside c, mass of cylinders meeting c]`, an enclosure
/// of `ν(c)`.
pub fn eval_closed(m: &CylinderMeasure, c: &ClosedSet) -> Result<ProbInterval> {
    let parts = unit_components(c)?;
    let mut inside = Rational::zero();
    let mut meeting = Rational::zero();
    for cyl in &m.cylinders {
        if parts.iter().any(|(a, b)| a <= &cyl.lo && &cyl.hi <= b) {
            inside += &cyl.mass;
        }
        if parts.iter().any(|(a, b)| a <= &cyl.hi && &cyl.lo <= b) {
            meeting += &cyl.mass;
        }
    }
    ProbInterval::exact(inside, meeting)
}

/// Enclosures of `ν(C1)` and `ν(C2)` for one vertex of the weight polytope.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexEnclosure {
    pub weights: Vec<Rational>,
    pub c1: ProbInterval,
    pub c2: ProbInterval,
    /// The vertex puts all weight on one map, so its measure is the Dirac
    /// mass at that map's fixed point and both values are exact.
    pub dirac: bool,
}

/// Envelope `[1 − max ν(C1), max ν(C2)]` over the vertices of the admissible
/// set, as an outer enclosure, with the per-vertex table it was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedEnvelope {
    pub envelope: ProbInterval,
    pub vertices: Vec<VertexEnclosure>,
}

impl ClosedEnvelope {
    /// Upper enclosure of `max ν(C2)` over a subset of the vertex table.
    pub fn max_upper_c2(&self, subset: &[usize]) -> Rational {
        subset
            .iter()
            .map(|&i| self.vertices[i].c2.hi().as_exact().cloned().unwrap_or_else(Rational::one))
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

fn dirac_value(point: &Rational, c: &[(Rational, Rational)]) -> ProbInterval {
    let hit = c.iter().any(|(a, b)| a <= point && point <= b);
    let v = if hit { Rational::one() } else { Rational::zero() };
    ProbInterval::exact(v.clone(), v).expect("0 or 1")
}

/// Per-vertex enclosures of the closed pair `(c1, c2)` and their envelope.
pub fn credal_envelope_closed(s: &IFSSystem, c1: &ClosedSet, c2: &ClosedSet, depth: u32) -> Result<ClosedEnvelope> {
    let unit = SpaceDescriptor::unit_interval();
    if *c1.space() != unit || *c2.space() != unit {
        return Err(Error::SpaceMismatch("IFS events live in [0,1]".into()));
    }
    if !c1.covers_space(c2)? {
        return Err(Error::CoveringViolation);
    }
    let (p1, p2) = (unit_components(c1)?, unit_components(c2)?);
    let vertices = admissible_vertices(s.weight_box())?;
    let rows: Vec<VertexEnclosure> = vertices
        .into_par_iter()
        .map(|w| {
            let unit_weight = w.iter().position(|x| x.is_one());
            if let Some(i) = unit_weight {
                let x = s.maps[i].fixed_point();
                return Ok(VertexEnclosure { c1: dirac_value(&x, &p1), c2: dirac_value(&x, &p2), weights: w, dirac: true });
            }
            let m = invariant_measure_approx(s, &w, depth)?;
            Ok(VertexEnclosure { c1: eval_closed(&m, c1)?, c2: eval_closed(&m, c2)?, weights: w, dirac: false })
        })
        .collect::<Result<_>>()?;
    let upper = |f: fn(&VertexEnclosure) -> &ProbInterval| {
        rows.iter()
            .map(|r| f(r).hi().as_exact().cloned().unwrap_or_else(Rational::one))
            .max()
            .unwrap_or_else(Rational::zero)
    };
    let lo = Rational::one() - upper(|r| &r.c1);
    let hi = upper(|r| &r.c2);
    Ok(ClosedEnvelope { envelope: ProbInterval::exact(lo, hi)?, vertices: rows })
}

/// Union of all depth-`k` cylinder images of `[0,1]`.
pub fn attractor_approx(s: &IFSSystem, depth: u32) -> Result<ClosedSet> {
    let parts: Vec<(Rational, Rational)> = expand(s, None, depth).into_iter().map(|(_, map, _)| map.image()).collect();
    ClosedSet::intervals(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::rat;

    pub(crate) fn cantor(weights: Vec<(Rational, Rational)>) -> IFSSystem {
        let maps = vec![AffineMap::new(rat(1, 3), rat(0, 1)).unwrap(), AffineMap::new(rat(1, 3), rat(2, 3)).unwrap()];
        IFSSystem::new(maps, weights).unwrap()
    }

    fn half() -> Vec<Rational> {
        vec![rat(1, 2), rat(1, 2)]
    }

    #[test]
    fn maps_are_validated() {
        assert!(AffineMap::new(rat(1, 1), rat(0, 1)).is_err());
        assert!(AffineMap::new(rat(1, 2), rat(3, 4)).is_err());
        assert_eq!(AffineMap::new(rat(-1, 2), rat(1, 2)).unwrap().image(), (rat(0, 1), rat(1, 2)));
        let maps = vec![AffineMap::new(rat(1, 3), rat(0, 1)).unwrap(); 2];
        let e = IFSSystem::new(maps, vec![(rat(0, 1), rat(1, 4)), (rat(0, 1), rat(1, 4))]);
        assert!(matches!(e, Err(Error::EmptyAdmissibleSet(_))));
    }

    #[test]
    fn uniform_cantor_measure() {
        let s = cantor(vec![(rat(0, 1), rat(1, 2)), (rat(1, 2), rat(1, 1))]);
        let m = invariant_measure_approx(&s, &half(), 3).unwrap();
        assert_eq!(m.cylinders.len(), 8);
        assert!(m.cylinders.iter().all(|c| c.mass == rat(1, 8)));
        let top = ClosedSet::point(rat(1, 1)).unwrap();
        assert_eq!(eval_closed(&m, &top).unwrap(), ProbInterval::exact(rat(0, 1), rat(1, 8)).unwrap());
        assert_eq!(eval_closed(&m, &ClosedSet::interval(rat(0, 1), rat(1, 1)).unwrap()).unwrap(), ProbInterval::exact(rat(1, 1), rat(1, 1)).unwrap());
    }

    #[test]
    fn dirac_vertex() {
        let s = cantor(vec![(rat(0, 1), rat(1, 2)), (rat(1, 2), rat(1, 1))]);
        let m = invariant_measure_approx(&s, &[rat(0, 1), rat(1, 1)], 5).unwrap();
        assert_eq!(m.cylinders.len(), 1);
        assert_eq!((m.cylinders[0].lo.clone(), m.cylinders[0].hi.clone()), (rat(242, 243), rat(1, 1)));
        let top = ClosedSet::point(rat(1, 1)).unwrap();
        // the atom sits on the cylinder's boundary: the enclosure stays [0, 1]
        assert_eq!(eval_closed(&m, &top).unwrap(), ProbInterval::exact(rat(0, 1), rat(1, 1)).unwrap());
        let full = ClosedSet::interval(rat(0, 1), rat(1, 1)).unwrap();
        let env = credal_envelope_closed(&s, &full, &top, 8).unwrap();
        let mut values: Vec<_> = env.vertices.iter().map(|v| (v.dirac, v.c2.clone())).collect();
        values.sort_by_key(|(d, _)| *d);
        assert_eq!(values[0].1, ProbInterval::exact(rat(0, 1), rat(1, 256)).unwrap());
        assert_eq!(values[1].1, ProbInterval::exact(rat(1, 1), rat(1, 1)).unwrap());
    }

    #[test]
    fn attractor_levels() {
        let s = cantor(vec![(rat(0, 1), rat(1, 2)), (rat(1, 2), rat(1, 1))]);
        let a1 = attractor_approx(&s, 1).unwrap();
        assert_eq!(a1, ClosedSet::intervals(vec![(rat(0, 1), rat(1, 3)), (rat(2, 3), rat(1, 1))]).unwrap());
        let a4 = attractor_approx(&s, 4).unwrap();
        assert!(a4.is_subset(&a1).unwrap());
        let length: Rational = a4.components_1d().unwrap().iter().map(|(a, b)| b - a).sum();
        assert_eq!(length, rat(16, 81));
    }

    #[test]
    fn covering_is_required() {
        let s = cantor(vec![(rat(0, 1), rat(1, 2)), (rat(1, 2), rat(1, 1))]);
        let c = ClosedSet::interval(rat(0, 1), rat(1, 2)).unwrap();
        assert!(matches!(credal_envelope_closed(&s, &c, &c, 3), Err(Error::CoveringViolation)));
    }
}
