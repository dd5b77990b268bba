//! Base spaces `[0,1]^d` and finite discrete spaces, with an exact algebra of
//! open and closed sets.
//!
//! A subset of the cube is stored on a rectilinear grid. Along each axis the
//! interior breakpoints `0 < b_1 < ... < b_k < 1` split `[0,1]` into `2k + 3`
//! pieces: `{0}, (0,b_1), {b_1}, ..., (b_k,1), {1}`. Even piece indices are
//! points, odd ones are open intervals. A set is the union of the selected
//! product cells. Removing every breakpoint whose neighbourhood is uniform
//! yields a canonical form, so structural equality is set equality.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::interval::{format_rational, rational_to_f64, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SpaceDescriptor {
    /// `[0,1]^dim`.
    Cube { dim: usize },
    /// A finite grid of points, the product of factors of the given sizes.
    /// Points are numbered row-major.
    Discrete { shape: Vec<usize> },
}

impl SpaceDescriptor {
    pub fn cube(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("cube dimension must be at least 1".into()));
        }
        Ok(SpaceDescriptor::Cube { dim })
    }

    pub fn discrete(n: usize) -> Result<Self> {
        Self::discrete_shape(vec![n])
    }

    pub fn discrete_shape(shape: Vec<usize>) -> Result<Self> {
        if shape.is_empty() || shape.contains(&0) {
            return Err(Error::InvalidArgument("discrete factor sizes must be at least 1".into()));
        }
        Ok(SpaceDescriptor::Discrete { shape })
    }

    pub fn unit_interval() -> Self {
        SpaceDescriptor::Cube { dim: 1 }
    }

    /// Number of product axes.
    pub fn axes(&self) -> usize {
        match self {
            SpaceDescriptor::Cube { dim } => *dim,
            SpaceDescriptor::Discrete { shape } => shape.len(),
        }
    }

    /// Number of points of a discrete space.
    pub fn size(&self) -> Option<usize> {
        match self {
            SpaceDescriptor::Cube { .. } => None,
            SpaceDescriptor::Discrete { shape } => Some(shape.iter().product()),
        }
    }

    pub fn product(&self, other: &SpaceDescriptor) -> Result<SpaceDescriptor> {
        match (self, other) {
            (SpaceDescriptor::Cube { dim: a }, SpaceDescriptor::Cube { dim: b }) => {
                Ok(SpaceDescriptor::Cube { dim: a + b })
            }
            (SpaceDescriptor::Discrete { shape: a }, SpaceDescriptor::Discrete { shape: b }) => {
                Ok(SpaceDescriptor::Discrete {
                    shape: a.iter().chain(b).copied().collect(),
                })
            }
            _ => Err(Error::SpaceMismatch(format!(
                "cannot form the product of {self} and {other}"
            ))),
        }
    }

    pub(crate) fn ensure_same(&self, other: &SpaceDescriptor) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpaceMismatch(format!("{self} vs {other}")))
        }
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceDescriptor::Cube { dim } => write!(f, "[0,1]^{dim}"),
            SpaceDescriptor::Discrete { shape } => {
                let parts: Vec<String> = shape.iter().map(|n| n.to_string()).collect();
                write!(f, "discrete({})", parts.join("x"))
            }
        }
    }
}

/// An axis-aligned box given by one `(lo, hi)` pair per axis.
pub type RatBox = Vec<(Rational, Rational)>;

#[derive(Clone, Debug, PartialEq, Eq)]
struct PieceSet {
    breaks: Vec<Vec<Rational>>,
    bits: Vec<bool>,
}

fn pieces(k: usize) -> usize {
    2 * k + 3
}

fn for_each_in_box(dims: &[usize], ranges: &[(usize, usize)], mut f: impl FnMut(usize) -> bool) -> bool {
    let d = dims.len();
    let mut idx: Vec<usize> = ranges.iter().map(|r| r.0).collect();
    loop {
        let mut flat = 0;
        for a in 0..d {
            flat = flat * dims[a] + idx[a];
        }
        if !f(flat) {
            return false;
        }
        let mut a = d;
        loop {
            if a == 0 {
                return true;
            }
            a -= 1;
            if idx[a] < ranges[a].1 {
                idx[a] += 1;
                break;
            }
            idx[a] = ranges[a].0;
        }
    }
}

fn unflatten(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; dims.len()];
    for a in (0..dims.len()).rev() {
        idx[a] = flat % dims[a];
        flat /= dims[a];
    }
    idx
}

/// Position of `v` in the full breakpoint list `0, breaks..., 1` as a piece
/// index.
fn piece_of(full: &[Rational], v: &Rational) -> usize {
    match full.binary_search(v) {
        Ok(j) => 2 * j,
        Err(j) => 2 * j - 1,
    }
}

fn piece_of_f64(full: &[Rational], v: f64) -> Option<usize> {
    if !(0.0..=1.0).contains(&v) {
        return None;
    }
    let fv: Vec<f64> = full.iter().map(rational_to_f64).collect();
    Some(match fv.binary_search_by(|x| x.partial_cmp(&v).unwrap()) {
        Ok(j) => 2 * j,
        Err(j) => 2 * j - 1,
    })
}

impl PieceSet {
    fn empty(dim: usize) -> Self {
        PieceSet {
            breaks: vec![Vec::new(); dim],
            bits: vec![false; 3usize.pow(dim as u32)],
        }
    }

    fn dims(&self) -> Vec<usize> {
        self.breaks.iter().map(|b| pieces(b.len())).collect()
    }

    fn full_breaks(&self, axis: usize) -> Vec<Rational> {
        let mut v = Vec::with_capacity(self.breaks[axis].len() + 2);
        v.push(Rational::zero());
        v.extend(self.breaks[axis].iter().cloned());
        v.push(Rational::one());
        v
    }

    fn from_boxes(dim: usize, boxes: &[RatBox], closed: bool) -> Self {
        let mut breaks: Vec<BTreeSet<Rational>> = vec![BTreeSet::new(); dim];
        for b in boxes {
            for (a, (lo, hi)) in b.iter().enumerate() {
                for v in [lo, hi] {
                    if !v.is_zero() && !v.is_one() {
                        breaks[a].insert(v.clone());
                    }
                }
            }
        }
        let breaks: Vec<Vec<Rational>> = breaks.into_iter().map(|s| s.into_iter().collect()).collect();
        let dims: Vec<usize> = breaks.iter().map(|b| pieces(b.len())).collect();
        let fulls: Vec<Vec<Rational>> = (0..dim)
            .map(|a| {
                let mut v = vec![Rational::zero()];
                v.extend(breaks[a].iter().cloned());
                v.push(Rational::one());
                v
            })
            .collect();
        let mut bits = vec![false; dims.iter().product()];
        for b in boxes {
            let ranges: Vec<(usize, usize)> = b
                .iter()
                .enumerate()
                .map(|(a, (lo, hi))| {
                    let l = piece_of(&fulls[a], lo);
                    let h = piece_of(&fulls[a], hi);
                    if closed {
                        (l, h)
                    } else {
                        (l + 1, h - 1)
                    }
                })
                .collect();
            for_each_in_box(&dims, &ranges, |i| {
                bits[i] = true;
                true
            });
        }
        let mut s = PieceSet { breaks, bits };
        s.canonicalize();
        s
    }

    /// Re-expresses the set on a grid with the given per-axis maps from new
    /// pieces to old pieces.
    fn resample(&self, breaks: Vec<Vec<Rational>>, maps: &[Vec<usize>]) -> PieceSet {
        let old_dims = self.dims();
        let new_dims: Vec<usize> = breaks.iter().map(|b| pieces(b.len())).collect();
        let total: usize = new_dims.iter().product();
        let mut bits = Vec::with_capacity(total);
        for i in 0..total {
            let idx = unflatten(i, &new_dims);
            let mut flat = 0;
            for a in 0..idx.len() {
                flat = flat * old_dims[a] + maps[a][idx[a]];
            }
            bits.push(self.bits[flat]);
        }
        PieceSet { breaks, bits }
    }

    fn refine(&self, breaks: &[Vec<Rational>]) -> PieceSet {
        let maps: Vec<Vec<usize>> = (0..breaks.len())
            .map(|a| {
                let old = self.full_breaks(a);
                let mut new = vec![Rational::zero()];
                new.extend(breaks[a].iter().cloned());
                new.push(Rational::one());
                (0..pieces(breaks[a].len()))
                    .map(|i| {
                        if i % 2 == 0 {
                            piece_of(&old, &new[i / 2])
                        } else {
                            let left = &new[(i - 1) / 2];
                            match old.binary_search(left) {
                                Ok(j) => 2 * j + 1,
                                Err(j) => 2 * j - 1,
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        self.resample(breaks.to_vec(), &maps)
    }

    fn canonicalize(&mut self) {
        loop {
            let mut changed = false;
            for axis in 0..self.breaks.len() {
                let dims = self.dims();
                let k = self.breaks[axis].len();
                let stride: usize = dims[axis + 1..].iter().product();
                let outer: usize = dims[..axis].iter().product();
                let redundant: Vec<bool> = (1..=k)
                    .map(|j| {
                        let p = 2 * j;
                        (0..outer).all(|o| {
                            (0..stride).all(|s| {
                                let at = |piece: usize| self.bits[(o * dims[axis] + piece) * stride + s];
                                at(p - 1) == at(p) && at(p) == at(p + 1)
                            })
                        })
                    })
                    .collect();
                if !redundant.iter().any(|&r| r) {
                    continue;
                }
                changed = true;
                let mut keep = Vec::new();
                let mut map = vec![0usize];
                for j in 1..=k {
                    if redundant[j - 1] {
                        continue;
                    }
                    keep.push(self.breaks[axis][j - 1].clone());
                    // the open piece to the left of b_j, then the point b_j
                    map.push(2 * j - 1);
                    map.push(2 * j);
                }
                map.push(2 * k + 1);
                map.push(2 * k + 2);
                let mut breaks = self.breaks.clone();
                breaks[axis] = keep;
                let maps: Vec<Vec<usize>> = (0..breaks.len())
                    .map(|a| {
                        if a == axis {
                            map.clone()
                        } else {
                            (0..dims[a]).collect()
                        }
                    })
                    .collect();
                *self = self.resample(breaks, &maps);
            }
            if !changed {
                break;
            }
        }
    }

    fn merged_breaks(&self, other: &PieceSet) -> Vec<Vec<Rational>> {
        self.breaks
            .iter()
            .zip(&other.breaks)
            .map(|(a, b)| {
                let s: BTreeSet<Rational> = a.iter().chain(b).cloned().collect();
                s.into_iter().collect()
            })
            .collect()
    }

    fn combine(&self, other: &PieceSet, op: impl Fn(bool, bool) -> bool) -> PieceSet {
        let breaks = self.merged_breaks(other);
        let a = self.refine(&breaks);
        let b = other.refine(&breaks);
        let bits = a.bits.iter().zip(&b.bits).map(|(&x, &y)| op(x, y)).collect();
        let mut s = PieceSet { breaks, bits };
        s.canonicalize();
        s
    }

    fn product(&self, other: &PieceSet) -> PieceSet {
        let mut breaks = self.breaks.clone();
        breaks.extend(other.breaks.iter().cloned());
        let mut bits = Vec::with_capacity(self.bits.len() * other.bits.len());
        for &x in &self.bits {
            for &y in &other.bits {
                bits.push(x && y);
            }
        }
        let mut s = PieceSet { breaks, bits };
        s.canonicalize();
        s
    }

    fn map_bits(&self, f: impl Fn(bool) -> bool) -> PieceSet {
        let mut s = PieceSet {
            breaks: self.breaks.clone(),
            bits: self.bits.iter().map(|&b| f(b)).collect(),
        };
        s.canonicalize();
        s
    }

    fn neighbourhood(dims: &[usize], idx: &[usize]) -> Vec<(usize, usize)> {
        idx.iter()
            .zip(dims)
            .map(|(&i, &n)| {
                if i % 2 == 0 {
                    (i.saturating_sub(1), (i + 1).min(n - 1))
                } else {
                    (i, i)
                }
            })
            .collect()
    }

    fn is_boundary(dims: &[usize], idx: &[usize]) -> bool {
        idx.iter().zip(dims).any(|(&i, &n)| i == 0 || i == n - 1)
    }

    /// Interior relative to the open cube `(0,1)^d`.
    fn interior(&self) -> PieceSet {
        let dims = self.dims();
        let bits = (0..self.bits.len())
            .map(|i| {
                let idx = unflatten(i, &dims);
                !Self::is_boundary(&dims, &idx)
                    && for_each_in_box(&dims, &Self::neighbourhood(&dims, &idx), |j| self.bits[j])
            })
            .collect();
        let mut s = PieceSet {
            breaks: self.breaks.clone(),
            bits,
        };
        s.canonicalize();
        s
    }

    fn closure(&self) -> PieceSet {
        let dims = self.dims();
        let bits = (0..self.bits.len())
            .map(|i| {
                let idx = unflatten(i, &dims);
                !for_each_in_box(&dims, &Self::neighbourhood(&dims, &idx), |j| !self.bits[j])
            })
            .collect();
        let mut s = PieceSet {
            breaks: self.breaks.clone(),
            bits,
        };
        s.canonicalize();
        s
    }

    /// Covers the set by maximal boxes. Open boxes span odd-to-odd piece
    /// ranges, closed boxes even-to-even. Every cell of the set lies in some
    /// returned box; boxes may overlap when `d >= 2`.
    fn box_cover(&self, closed: bool) -> Vec<Vec<(usize, usize)>> {
        let dims = self.dims();
        let mut covered = vec![false; self.bits.len()];
        let mut order: Vec<usize> = (0..self.bits.len()).filter(|&i| self.bits[i]).collect();
        // seed from full-dimensional cells first so that boxes come out large
        order.sort_by_key(|&i| unflatten(i, &dims).iter().filter(|&&p| p % 2 == 0).count());
        let mut out = Vec::new();
        for seed in order {
            if covered[seed] {
                continue;
            }
            let idx = unflatten(seed, &dims);
            let mut ranges: Vec<(usize, usize)> = if closed {
                idx.iter()
                    .map(|&i| if i % 2 == 0 { (i, i) } else { (i - 1, i + 1) })
                    .collect()
            } else {
                Self::neighbourhood(&dims, &idx)
            };
            for a in 0..dims.len() {
                loop {
                    if ranges[a].1 + 2 >= dims[a] {
                        break;
                    }
                    let mut slab = ranges.clone();
                    slab[a] = (ranges[a].1 + 1, ranges[a].1 + 2);
                    if !for_each_in_box(&dims, &slab, |j| self.bits[j]) {
                        break;
                    }
                    ranges[a].1 += 2;
                }
                loop {
                    if ranges[a].0 < 2 {
                        break;
                    }
                    let mut slab = ranges.clone();
                    slab[a] = (ranges[a].0 - 2, ranges[a].0 - 1);
                    if !for_each_in_box(&dims, &slab, |j| self.bits[j]) {
                        break;
                    }
                    ranges[a].0 -= 2;
                }
            }
            for_each_in_box(&dims, &ranges, |j| {
                covered[j] = true;
                true
            });
            out.push(ranges);
        }
        out
    }

    fn range_to_box(&self, ranges: &[(usize, usize)]) -> RatBox {
        ranges
            .iter()
            .enumerate()
            .map(|(a, &(lo, hi))| {
                let full = self.full_breaks(a);
                let l = if lo % 2 == 0 { lo / 2 } else { (lo - 1) / 2 };
                let h = hi.div_ceil(2);
                (full[l].clone(), full[h].clone())
            })
            .collect()
    }

    fn locate(&self, point: &[Rational]) -> Option<usize> {
        let dims = self.dims();
        let mut flat = 0;
        for (a, v) in point.iter().enumerate() {
            if *v < Rational::zero() || *v > Rational::one() {
                return None;
            }
            flat = flat * dims[a] + piece_of(&self.full_breaks(a), v);
        }
        Some(flat)
    }

    fn locate_f64(&self, point: &[f64]) -> Option<usize> {
        let dims = self.dims();
        let mut flat = 0;
        for (a, &v) in point.iter().enumerate() {
            flat = flat * dims[a] + piece_of_f64(&self.full_breaks(a), v)?;
        }
        Some(flat)
    }

    fn open_cells(&self) -> Vec<RatBox> {
        let dims = self.dims();
        let fulls: Vec<Vec<Rational>> = (0..dims.len()).map(|a| self.full_breaks(a)).collect();
        (0..self.bits.len())
            .filter(|&i| self.bits[i])
            .filter_map(|i| {
                let idx = unflatten(i, &dims);
                idx.iter()
                    .enumerate()
                    .map(|(a, &p)| {
                        (p % 2 == 1).then(|| (fulls[a][(p - 1) / 2].clone(), fulls[a][p.div_ceil(2)].clone()))
                    })
                    .collect()
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    Cube(PieceSet),
    Discrete(BTreeSet<usize>),
}

/// A finite union of open rational boxes in `[0,1]^d` (never containing
/// points of the boundary of the cube), or a subset of a finite space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenSet {
    space: SpaceDescriptor,
    repr: Repr,
}

/// A closed subset of `[0,1]^d` built from closed rational boxes, or a subset
/// of a finite space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedSet {
    space: SpaceDescriptor,
    repr: Repr,
}

fn check_box(dim: usize, b: &RatBox) -> Result<()> {
    if b.len() != dim {
        return Err(Error::SpaceMismatch(format!(
            "box has {} axes, space has {dim}",
            b.len()
        )));
    }
    for (lo, hi) in b {
        if *lo < Rational::zero() || *hi > Rational::one() {
            return Err(Error::RangeViolation(format!(
                "box side ({}, {}) leaves [0,1]",
                format_rational(lo),
                format_rational(hi)
            )));
        }
        if lo > hi {
            return Err(Error::OrderViolation {
                lo: format_rational(lo),
                hi: format_rational(hi),
            });
        }
    }
    Ok(())
}

fn check_points(space: &SpaceDescriptor, points: &BTreeSet<usize>) -> Result<()> {
    let n = space.size().unwrap_or(0);
    match points.iter().next_back() {
        Some(&p) if p >= n => Err(Error::RangeViolation(format!("point {p} outside a space of {n} points"))),
        _ => Ok(()),
    }
}

fn discrete_product(a: &BTreeSet<usize>, b: &BTreeSet<usize>, nb: usize) -> BTreeSet<usize> {
    a.iter().flat_map(|&i| b.iter().map(move |&j| i * nb + j)).collect()
}

macro_rules! shared_set_api {
    ($ty:ident) => {
        impl $ty {
            pub fn space(&self) -> &SpaceDescriptor {
                &self.space
            }

            pub fn is_discrete(&self) -> bool {
                matches!(self.repr, Repr::Discrete(_))
            }

            /// The selected points of a discrete set.
            pub fn points(&self) -> Option<&BTreeSet<usize>> {
                match &self.repr {
                    Repr::Discrete(p) => Some(p),
                    Repr::Cube(_) => None,
                }
            }

            pub fn is_empty(&self) -> bool {
                match &self.repr {
                    Repr::Cube(p) => !p.bits.iter().any(|&b| b),
                    Repr::Discrete(p) => p.is_empty(),
                }
            }

            pub fn contains_point(&self, point: &[Rational]) -> bool {
                match &self.repr {
                    Repr::Cube(p) => {
                        point.len() == p.breaks.len() && p.locate(point).is_some_and(|i| p.bits[i])
                    }
                    Repr::Discrete(_) => false,
                }
            }

            pub fn contains_f64(&self, point: &[f64]) -> bool {
                match &self.repr {
                    Repr::Cube(p) => {
                        point.len() == p.breaks.len() && p.locate_f64(point).is_some_and(|i| p.bits[i])
                    }
                    Repr::Discrete(_) => false,
                }
            }

            pub fn contains_index(&self, i: usize) -> bool {
                matches!(&self.repr, Repr::Discrete(p) if p.contains(&i))
            }

            fn binary(&self, other: &$ty, op: impl Fn(bool, bool) -> bool) -> Result<$ty> {
                self.space.ensure_same(&other.space)?;
                let repr = match (&self.repr, &other.repr) {
                    (Repr::Cube(a), Repr::Cube(b)) => Repr::Cube(a.combine(b, op)),
                    (Repr::Discrete(a), Repr::Discrete(b)) => {
                        let n = self.space.size().unwrap_or(0);
                        Repr::Discrete(
                            (0..n).filter(|i| op(a.contains(i), b.contains(i))).collect(),
                        )
                    }
                    _ => unreachable!("space descriptors agree"),
                };
                Ok($ty {
                    space: self.space.clone(),
                    repr,
                })
            }

            pub fn union(&self, other: &$ty) -> Result<$ty> {
                self.binary(other, |a, b| a || b)
            }

            pub fn intersect(&self, other: &$ty) -> Result<$ty> {
                self.binary(other, |a, b| a && b)
            }

            pub fn is_subset(&self, other: &$ty) -> Result<bool> {
                Ok(self.binary(other, |a, b| a && !b)?.is_empty())
            }

            pub fn is_disjoint(&self, other: &$ty) -> Result<bool> {
                Ok(self.intersect(other)?.is_empty())
            }

            /// Cartesian product; the result lives in the product space.
            pub fn product(&self, other: &$ty) -> Result<$ty> {
                let space = self.space.product(&other.space)?;
                let repr = match (&self.repr, &other.repr) {
                    (Repr::Cube(a), Repr::Cube(b)) => Repr::Cube(a.product(b)),
                    (Repr::Discrete(a), Repr::Discrete(b)) => {
                        Repr::Discrete(discrete_product(a, b, other.space.size().unwrap_or(0)))
                    }
                    _ => unreachable!("product space was validated"),
                };
                Ok($ty { space, repr })
            }

            /// Interior breakpoints along each axis of the canonical grid.
            pub fn breakpoints(&self) -> Option<&[Vec<Rational>]> {
                match &self.repr {
                    Repr::Cube(p) => Some(&p.breaks),
                    Repr::Discrete(_) => None,
                }
            }
        }
    };
}

shared_set_api!(OpenSet);
shared_set_api!(ClosedSet);

impl OpenSet {
    pub fn empty(space: &SpaceDescriptor) -> Self {
        let repr = match space {
            SpaceDescriptor::Cube { dim } => Repr::Cube(PieceSet::empty(*dim)),
            SpaceDescriptor::Discrete { .. } => Repr::Discrete(BTreeSet::new()),
        };
        OpenSet {
            space: space.clone(),
            repr,
        }
    }

    /// The whole space as an open set; for the cube this is `(0,1)^d`,
    /// which differs from `[0,1]^d` only on a null boundary.
    pub fn full(space: &SpaceDescriptor) -> Self {
        match space {
            SpaceDescriptor::Cube { dim } => {
                let b = vec![(Rational::zero(), Rational::one()); *dim];
                Self::from_boxes(space, vec![b]).expect("unit box is valid")
            }
            SpaceDescriptor::Discrete { .. } => OpenSet {
                space: space.clone(),
                repr: Repr::Discrete((0..space.size().unwrap_or(0)).collect()),
            },
        }
    }

    /// Union of the open boxes `∏ (lo_a, hi_a)`. Boxes with an empty side are
    /// dropped.
    pub fn from_boxes(space: &SpaceDescriptor, boxes: Vec<RatBox>) -> Result<Self> {
        let SpaceDescriptor::Cube { dim } = space else {
            return Err(Error::SpaceMismatch(format!("boxes given for {space}")));
        };
        for b in &boxes {
            check_box(*dim, b)?;
        }
        let boxes: Vec<RatBox> = boxes
            .into_iter()
            .filter(|b| b.iter().all(|(lo, hi)| lo < hi))
            .collect();
        Ok(OpenSet {
            space: space.clone(),
            repr: Repr::Cube(PieceSet::from_boxes(*dim, &boxes, false)),
        })
    }

    /// The open interval `(a, b)` in `[0,1]`.
    pub fn interval(a: Rational, b: Rational) -> Result<Self> {
        Self::from_boxes(&SpaceDescriptor::unit_interval(), vec![vec![(a, b)]])
    }

    /// Union of open intervals in `[0,1]`.
    pub fn intervals(parts: Vec<(Rational, Rational)>) -> Result<Self> {
        Self::from_boxes(
            &SpaceDescriptor::unit_interval(),
            parts.into_iter().map(|p| vec![p]).collect(),
        )
    }

    pub fn discrete(space: &SpaceDescriptor, points: impl IntoIterator<Item = usize>) -> Result<Self> {
        if !matches!(space, SpaceDescriptor::Discrete { .. }) {
            return Err(Error::SpaceMismatch(format!("points given for {space}")));
        }
        let points: BTreeSet<usize> = points.into_iter().collect();
        check_points(space, &points)?;
        Ok(OpenSet {
            space: space.clone(),
            repr: Repr::Discrete(points),
        })
    }

    /// A cover of the set by maximal open boxes, deterministic for a given
    /// set. In one dimension these are exactly the connected components.
    pub fn boxes(&self) -> Vec<RatBox> {
        match &self.repr {
            Repr::Cube(p) => p.box_cover(false).iter().map(|r| p.range_to_box(r)).collect(),
            Repr::Discrete(_) => Vec::new(),
        }
    }

    /// The full-dimensional cells of the canonical grid lying in the set.
    /// They are pairwise disjoint and cover the set up to a null set.
    pub fn cells(&self) -> Vec<RatBox> {
        match &self.repr {
            Repr::Cube(p) => p.open_cells(),
            Repr::Discrete(_) => Vec::new(),
        }
    }

    pub fn closure(&self) -> ClosedSet {
        let repr = match &self.repr {
            Repr::Cube(p) => Repr::Cube(p.closure()),
            Repr::Discrete(s) => Repr::Discrete(s.clone()),
        };
        ClosedSet {
            space: self.space.clone(),
            repr,
        }
    }

    /// `[0,1]^d \ self`.
    pub fn closed_complement(&self) -> ClosedSet {
        let repr = match &self.repr {
            Repr::Cube(p) => Repr::Cube(p.map_bits(|b| !b)),
            Repr::Discrete(s) => {
                let n = self.space.size().unwrap_or(0);
                Repr::Discrete((0..n).filter(|i| !s.contains(i)).collect())
            }
        };
        ClosedSet {
            space: self.space.clone(),
            repr,
        }
    }

    /// Whether the closure of `self` lies inside `other`. In the compact
    /// cube this decides `self ≪ other`; in a finite space it is inclusion.
    pub fn way_below(&self, other: &OpenSet) -> Result<bool> {
        self.space.ensure_same(&other.space)?;
        match (&self.repr, &other.repr) {
            (Repr::Cube(_), Repr::Cube(_)) => {
                let c = self.closure();
                let o = ClosedSet {
                    space: other.space.clone(),
                    repr: other.repr.clone(),
                };
                c.is_subset(&o)
            }
            _ => self.is_subset(other),
        }
    }

    /// Shrinks every cover box by `eps` on each side. The result is way
    /// below `self` and increases to `self` as `eps` decreases to 0.
    pub fn shrink(&self, eps: &Rational) -> OpenSet {
        match &self.repr {
            Repr::Cube(_) => {
                let boxes = self
                    .boxes()
                    .into_iter()
                    .map(|b| {
                        b.into_iter()
                            .map(|(lo, hi)| {
                                let l = &lo + eps;
                                let h = &hi - eps;
                                if l < h {
                                    (l, h)
                                } else {
                                    (lo.clone(), lo)
                                }
                            })
                            .collect()
                    })
                    .collect();
                OpenSet::from_boxes(&self.space, boxes).expect("shrunk boxes stay in the cube")
            }
            Repr::Discrete(_) => self.clone(),
        }
    }

    /// An open set `c` with `self ≪ c ≪ other`, found by enlarging the
    /// closure of `self` by successively smaller dyadic margins.
    pub fn interpolate(&self, other: &OpenSet, max_depth: u32) -> Result<Option<OpenSet>> {
        if !self.way_below(other)? {
            return Ok(None);
        }
        if self.is_discrete() {
            return Ok(Some(self.clone()));
        }
        let cl = self.closure();
        for k in 1..=max_depth {
            let eps = Rational::new(1.into(), num_bigint::BigInt::from(2u32).pow(k));
            let c = cl.enlarge(&eps);
            if self.way_below(&c)? && c.way_below(other)? {
                return Ok(Some(c));
            }
        }
        Ok(None)
    }

    /// Embeds a set on one factor of a product into the product, filling the
    /// other factors with the whole space: `D_1 × ... × self × ... × D_n`.
    pub fn cylinder(&self, factors: &[SpaceDescriptor], position: usize) -> Result<OpenSet> {
        let Some(own) = factors.get(position) else {
            return Err(Error::InvalidArgument(format!("no factor at position {position}")));
        };
        own.ensure_same(&self.space)?;
        let mut acc: Option<OpenSet> = None;
        for (i, f) in factors.iter().enumerate() {
            let part = if i == position { self.clone() } else { OpenSet::full(f) };
            acc = Some(match acc {
                None => part,
                Some(a) => a.product(&part)?,
            });
        }
        Ok(acc.expect("at least one factor"))
    }
}

impl ClosedSet {
    pub fn empty(space: &SpaceDescriptor) -> Self {
        let o = OpenSet::empty(space);
        ClosedSet {
            space: o.space,
            repr: o.repr,
        }
    }

    /// `[0,1]^d`, or every point of a finite space.
    pub fn full(space: &SpaceDescriptor) -> Self {
        OpenSet::empty(space).closed_complement()
    }

    /// Union of the closed boxes `∏ [lo_a, hi_a]`; degenerate sides are allowed.
    pub fn from_boxes(space: &SpaceDescriptor, boxes: Vec<RatBox>) -> Result<Self> {
        let SpaceDescriptor::Cube { dim } = space else {
            return Err(Error::SpaceMismatch(format!("boxes given for {space}")));
        };
        for b in &boxes {
            check_box(*dim, b)?;
        }
        Ok(ClosedSet {
            space: space.clone(),
            repr: Repr::Cube(PieceSet::from_boxes(*dim, &boxes, true)),
        })
    }

    pub fn interval(a: Rational, b: Rational) -> Result<Self> {
        Self::from_boxes(&SpaceDescriptor::unit_interval(), vec![vec![(a, b)]])
    }

    pub fn intervals(parts: Vec<(Rational, Rational)>) -> Result<Self> {
        Self::from_boxes(
            &SpaceDescriptor::unit_interval(),
            parts.into_iter().map(|p| vec![p]).collect(),
        )
    }

    pub fn point(x: Rational) -> Result<Self> {
        Self::interval(x.clone(), x)
    }

    pub fn discrete(space: &SpaceDescriptor, points: impl IntoIterator<Item = usize>) -> Result<Self> {
        let o = OpenSet::discrete(space, points)?;
        Ok(ClosedSet {
            space: o.space,
            repr: o.repr,
        })
    }

    /// A cover by maximal closed boxes; in one dimension, the components.
    pub fn boxes(&self) -> Vec<RatBox> {
        match &self.repr {
            Repr::Cube(p) => p.box_cover(true).iter().map(|r| p.range_to_box(r)).collect(),
            Repr::Discrete(_) => Vec::new(),
        }
    }

    /// Sorted, pairwise disjoint components `[a, b]` of a closed subset of
    /// `[0,1]`.
    pub fn components_1d(&self) -> Option<Vec<(Rational, Rational)>> {
        if self.space != SpaceDescriptor::unit_interval() {
            return None;
        }
        let mut parts: Vec<(Rational, Rational)> =
            self.boxes().into_iter().map(|mut b| b.remove(0)).collect();
        parts.sort();
        Some(parts)
    }

    /// The interior of the complement, `int([0,1]^d \ self)`, as an open set.
    pub fn open_interior_of_complement(&self) -> OpenSet {
        let repr = match &self.repr {
            Repr::Cube(p) => Repr::Cube(p.map_bits(|b| !b).interior()),
            Repr::Discrete(s) => {
                let n = self.space.size().unwrap_or(0);
                Repr::Discrete((0..n).filter(|i| !s.contains(i)).collect())
            }
        };
        OpenSet {
            space: self.space.clone(),
            repr,
        }
    }

    /// The union of open boxes `eps` wider than the cover boxes of `self`.
    pub fn enlarge(&self, eps: &Rational) -> OpenSet {
        match &self.repr {
            Repr::Cube(_) => {
                let zero = Rational::zero();
                let one = Rational::one();
                let boxes = self
                    .boxes()
                    .into_iter()
                    .map(|b| {
                        b.into_iter()
                            .map(|(lo, hi)| {
                                let l = &lo - eps;
                                let h = &hi + eps;
                                (if l < zero { zero.clone() } else { l }, if h > one { one.clone() } else { h })
                            })
                            .collect()
                    })
                    .collect();
                OpenSet::from_boxes(&self.space, boxes).expect("enlarged boxes are clipped to the cube")
            }
            Repr::Discrete(s) => OpenSet {
                space: self.space.clone(),
                repr: Repr::Discrete(s.clone()),
            },
        }
    }

    pub fn covers_space(&self, other: &ClosedSet) -> Result<bool> {
        Ok(self.union(other)? == ClosedSet::full(&self.space))
    }
}

fn fmt_boxes(f: &mut fmt::Formatter<'_>, boxes: &[RatBox], open: bool) -> fmt::Result {
    if boxes.is_empty() {
        return write!(f, "∅");
    }
    let (l, r) = if open { ("(", ")") } else { ("[", "]") };
    let parts: Vec<String> = boxes
        .iter()
        .map(|b| {
            b.iter()
                .map(|(lo, hi)| format!("{l}{}, {}{r}", format_rational(lo), format_rational(hi)))
                .collect::<Vec<_>>()
                .join("×")
        })
        .collect();
    write!(f, "{}", parts.join(" ∪ "))
}

impl fmt::Display for OpenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Cube(_) => fmt_boxes(f, &self.boxes(), true),
            Repr::Discrete(s) => write!(f, "{s:?}"),
        }
    }
}

impl fmt::Display for ClosedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Cube(_) => fmt_boxes(f, &self.boxes(), false),
            Repr::Discrete(s) => write!(f, "{s:?}"),
        }
    }
}

pub fn os_union(a: &OpenSet, b: &OpenSet) -> Result<OpenSet> {
    a.union(b)
}

pub fn os_intersect(a: &OpenSet, b: &OpenSet) -> Result<OpenSet> {
    a.intersect(b)
}

/// Product of two open sets. Cube-by-cube and finite-by-finite products are
/// supported; mixing the two kinds is a [`Error::SpaceMismatch`].
pub fn os_product(a: &OpenSet, b: &OpenSet) -> Result<OpenSet> {
    a.product(b)
}

pub fn closed_complement(o: &OpenSet) -> ClosedSet {
    o.closed_complement()
}

pub fn open_interior_of_complement(c: &ClosedSet) -> OpenSet {
    c.open_interior_of_complement()
}

pub fn os_way_below(a: &OpenSet, b: &OpenSet) -> Result<bool> {
    a.way_below(b)
}
