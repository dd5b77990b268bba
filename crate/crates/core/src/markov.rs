//! Finite Markov chains whose transition probabilities are only known up to
//! intervals: vertices of the admissible set, exact stationary distributions
//! and inner bounds on the stationary range.

use std::collections::VecDeque;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interval::{format_rational, ProbInterval, Rational};
use crate::polytope::simplex_box_vertices;

/// Largest number of vertex matrices enumerated exhaustively.
pub const MAX_VERTEX_PRODUCT: usize = 1 << 20;

/// An `n × n` matrix of transition intervals `[p_ki, q_ki]`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalTransitionMatrix {
    rows: Vec<Vec<(Rational, Rational)>>,
}

impl IntervalTransitionMatrix {
    /// Checks squareness, bounds within `[0,1]` and row admissibility.
    pub fn new(rows: Vec<Vec<(Rational, Rational)>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidArgument("a chain needs at least one state".into()));
        }
        for (k, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidArgument(format!("row {k} has {} entries, expected {n}", row.len())));
            }
            if row.iter().any(|(l, h)| l < &Rational::zero() || h > &Rational::one() || l > h) {
                return Err(Error::InvalidArgument(format!("row {k} has bounds outside [0,1] or out of order")));
            }
            if simplex_box_vertices(row).is_empty() {
                return Err(Error::EmptyRow(k));
            }
        }
        Ok(IntervalTransitionMatrix { rows })
    }

    /// The degenerate interval matrix of an exact stochastic matrix.
    pub fn point(t: &[Vec<Rational>]) -> Result<Self> {
        Self::new(t.iter().map(|r| r.iter().map(|x| (x.clone(), x.clone())).collect()).collect())
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<(Rational, Rational)>] {
        &self.rows
    }

    /// Vertices of row `k`'s admissible polytope.
    pub fn row_vertices(&self, k: usize) -> Result<Vec<Vec<Rational>>> {
        let v = simplex_box_vertices(&self.rows[k]);
        if v.is_empty() {
            return Err(Error::EmptyRow(k));
        }
        Ok(v)
    }

    fn all_row_vertices(&self) -> Result<Vec<Vec<Vec<Rational>>>> {
        (0..self.n()).map(|k| self.row_vertices(k)).collect()
    }
}

/// Vertices of `{x : Σ x = 1, lo ≤ x ≤ hi}` for a single row.
pub fn row_vertices(bounds: &[(Rational, Rational)]) -> Result<Vec<Vec<Rational>>> {
    let v = simplex_box_vertices(bounds);
    if v.is_empty() {
        return Err(Error::EmptyRow(0));
    }
    Ok(v)
}

/// How a set of stationary bounds was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// The exact stationary range.
    Exact,
    /// Minimum and maximum over all vertex matrices: an inner approximation.
    VertexInner,
    /// Local search over vertex matrices: an inner approximation.
    Refined,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Exact => "exact",
            Provenance::VertexInner => "vertex-inner",
            Provenance::Refined => "refined",
        })
    }
}

/// Per-state intervals `[m_k, M_k]` for the stationary distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct StationaryBounds {
    pub bounds: Vec<ProbInterval>,
    pub provenance: Provenance,
    /// Vertex matrices evaluated.
    pub evaluated: usize,
    /// Vertex choices (one row-vertex index per row) skipped as reducible or
    /// periodic, with the reason.
    pub skipped: Vec<(Vec<usize>, String)>,
}

impl StationaryBounds {
    fn from_extremes(lo: Vec<Rational>, hi: Vec<Rational>, provenance: Provenance) -> Result<Self> {
        let bounds = lo.into_iter().zip(hi).map(|(l, h)| ProbInterval::exact(l, h)).collect::<Result<_>>()?;
        Ok(StationaryBounds { bounds, provenance, evaluated: 0, skipped: Vec::new() })
    }

    /// `[m_k, M_k]` as exact rationals.
    pub fn state(&self, k: usize) -> (Rational, Rational) {
        let b = &self.bounds[k];
        let get = |u: &crate::interval::UnitValue| u.as_exact().cloned().expect("stationary bounds are exact");
        (get(b.lo()), get(b.hi()))
    }
}

fn check_stochastic(t: &[Vec<Rational>]) -> Result<()> {
    let n = t.len();
    for (k, row) in t.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidArgument(format!("row {k} has {} entries, expected {n}", row.len())));
        }
        if row.iter().any(|x| x.is_negative()) || row.iter().sum::<Rational>() != Rational::one() {
            return Err(Error::InvalidArgument(format!("row {k} is not a probability vector")));
        }
    }
    Ok(())
}

fn reachable(n: usize, edge: impl Fn(usize, usize) -> bool) -> Vec<Option<u64>> {
    let mut level = vec![None; n];
    level[0] = Some(0);
    let mut queue = VecDeque::from([0]);
    while let Some(u) = queue.pop_front() {
        for v in 0..n {
            if level[v].is_none() && edge(u, v) {
                level[v] = Some(level[u].unwrap() + 1);
                queue.push_back(v);
            }
        }
    }
    level
}

/// Irreducibility and aperiodicity of the digraph of positive entries.
pub fn check_ergodic(t: &[Vec<Rational>]) -> Result<()> {
    let n = t.len();
    let pos = |u: usize, v: usize| t[u][v].is_positive();
    let forward = reachable(n, pos);
    let backward = reachable(n, |u, v| pos(v, u));
    if forward.iter().chain(&backward).any(Option::is_none) {
        return Err(Error::Reducible);
    }
    // the period is the gcd of level[u] + 1 − level[v] over all edges u → v
    let level: Vec<i64> = forward.into_iter().map(|l| l.unwrap() as i64).collect();
    let mut period = 0i64;
    for u in 0..n {
        for v in 0..n {
            if pos(u, v) {
                period = period.gcd(&(level[u] + 1 - level[v]));
            }
        }
    }
    if period > 1 {
        return Err(Error::Periodic(period as u64));
    }
    Ok(())
}

/// Solves `a x = b` exactly; `None` when `a` is singular.
fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = Rational::one() / &a[col][col];
        let pivot_row = a[col].clone();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] * &inv;
            for (x, p) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= &factor * p;
            }
            let delta = &factor * &b[col];
            b[r] -= delta;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// The unique `π` with `πT = π` and `Σπ = 1`, for an irreducible aperiodic
/// stochastic matrix.
pub fn stationary(t: &[Vec<Rational>]) -> Result<Vec<Rational>> {
    check_stochastic(t)?;
    check_ergodic(t)?;
    let n = t.len();
    // rows of (T − I)ᵀ, the last replaced by the normalisation
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { &t[j][i] - Rational::one() } else { t[j][i].clone() })
                .collect()
        })
        .collect();
    a[n - 1] = vec![Rational::one(); n];
    let mut b = vec![Rational::zero(); n];
    b[n - 1] = Rational::one();
    solve(a, b).ok_or(Error::Reducible)
}

struct VertexTable {
    rows: Vec<Vec<Vec<Rational>>>,
}

impl VertexTable {
    fn size(&self) -> Option<usize> {
        self.rows.iter().try_fold(1usize, |acc, r| acc.checked_mul(r.len()))
    }

    /// Mixed-radix decoding of a vertex-product index.
    fn choice(&self, mut index: usize) -> Vec<usize> {
        self.rows
            .iter()
            .map(|r| {
                let c = index % r.len();
                index /= r.len();
                c
            })
            .collect()
    }

    fn matrix(&self, choice: &[usize]) -> Vec<Vec<Rational>> {
        choice.iter().zip(&self.rows).map(|(&c, r)| r[c].clone()).collect()
    }

    fn stationary(&self, choice: &[usize]) -> Result<Vec<Rational>> {
        stationary(&self.matrix(choice))
    }
}

#[derive(Default)]
struct Extremes {
    lo: Vec<Rational>,
    hi: Vec<Rational>,
    evaluated: usize,
    skipped: Vec<(Vec<usize>, String)>,
}

impl Extremes {
    fn record(&mut self, pi: &[Rational]) {
        if self.lo.is_empty() {
            self.lo = pi.to_vec();
            self.hi = pi.to_vec();
        } else {
            for (k, x) in pi.iter().enumerate() {
                if x < &self.lo[k] {
                    self.lo[k] = x.clone();
                }
                if x > &self.hi[k] {
                    self.hi[k] = x.clone();
                }
            }
        }
        self.evaluated += 1;
    }

    fn merge(&mut self, other: Extremes) {
        if !other.lo.is_empty() {
            // per-state extremes combine coordinate-wise
            let before = self.evaluated;
            self.record(&other.lo);
            self.record(&other.hi);
            self.evaluated = before + other.evaluated;
        }
        for s in other.skipped {
            if !self.skipped.contains(&s) {
                self.skipped.push(s);
            }
        }
    }

    fn visit(&mut self, choice: Vec<usize>, result: Result<Vec<Rational>>) -> Result<Option<Vec<Rational>>> {
        match result {
            Ok(pi) => {
                self.record(&pi);
                Ok(Some(pi))
            }
            Err(e @ (Error::Reducible | Error::Periodic(_))) => {
                self.skipped.push((choice, e.to_string()));
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }

    fn finish(self, provenance: Provenance) -> Result<StationaryBounds> {
        if self.evaluated == 0 {
            return Err(Error::AllVerticesDegenerate);
        }
        let mut b = StationaryBounds::from_extremes(self.lo, self.hi, provenance)?;
        b.evaluated = self.evaluated;
        b.skipped = self.skipped;
        Ok(b)
    }
}

/// Per-state min and max of the stationary distribution over every vertex
/// matrix (one row vertex per row). Reducible or periodic vertices are
/// skipped and listed.
pub fn stationary_bounds_vertices(itm: &IntervalTransitionMatrix) -> Result<StationaryBounds> {
    let table = VertexTable { rows: itm.all_row_vertices()? };
    let size = table.size().filter(|&s| s <= MAX_VERTEX_PRODUCT).ok_or_else(|| {
        Error::InvalidArgument(format!("more than {MAX_VERTEX_PRODUCT} vertex matrices; use local refinement"))
    })?;
    let results: Vec<(Vec<usize>, Result<Vec<Rational>>)> = (0..size)
        .into_par_iter()
        .map(|i| {
            let c = table.choice(i);
            let r = table.stationary(&c);
            (c, r)
        })
        .collect();
    let mut ext = Extremes::default();
    for (c, r) in results {
        ext.visit(c, r)?;
    }
    ext.finish(Provenance::VertexInner)
}

/// Effective range of `t_11` and `t_21` after intersecting with the
/// complement constraints of each row.
fn effective(row: &[(Rational, Rational)], i: usize) -> (Rational, Rational) {
    let other = &row[1 - i];
    let one = Rational::one();
    let lo = row[i].0.clone().max(&one - &other.1);
    let hi = row[i].1.clone().min(one - &other.0);
    (lo, hi)
}

/// Exact stationary range for a two-state chain, from the closed form
/// `π_1 = t21 / (1 − t11 + t21)`, which increases in both entries.
pub fn two_state_exact(itm: &IntervalTransitionMatrix) -> Result<StationaryBounds> {
    if itm.n() != 2 {
        return Err(Error::InvalidArgument(format!("two-state formula applied to {} states", itm.n())));
    }
    let (lo11, hi11) = effective(&itm.rows[0], 0);
    let (lo21, hi21) = effective(&itm.rows[1], 0);
    let one = Rational::one();
    if hi11 == one && lo21.is_zero() {
        return Err(Error::DegenerateChain("the identity matrix is admissible (reducible)".into()));
    }
    if lo11.is_zero() && hi21 == one {
        return Err(Error::DegenerateChain("the swap matrix is admissible (periodic)".into()));
    }
    let pi1 = |t11: &Rational, t21: &Rational| t21 / (&one - t11 + t21);
    let m = pi1(&lo11, &lo21);
    let big_m = pi1(&hi11, &hi21);
    StationaryBounds::from_extremes(vec![m.clone(), &one - &big_m], vec![big_m.clone(), &one - m], Provenance::Exact)
        .map(|mut b| {
            b.evaluated = 2;
            b
        })
}

/// Hill-climbing over vertex matrices from the vertex with product index
/// `start`: for each state and direction, swap one row's vertex per step
/// while that improves `π_k`. Returns the extremes seen, which can only be
/// inner bounds; `steps = 0` gives the starting vertex alone.
pub fn refine_bounds_local(itm: &IntervalTransitionMatrix, start: usize, steps: usize) -> Result<StationaryBounds> {
    let table = VertexTable { rows: itm.all_row_vertices()? };
    let size = table.size().unwrap_or(usize::MAX);
    let seed = table.choice(start % size);
    let n = itm.n();
    let climbs: Vec<Extremes> = (0..2 * n)
        .into_par_iter()
        .map(|task| climb(&table, seed.clone(), task / 2, task % 2 == 1, steps))
        .collect::<Result<_>>()?;
    let mut ext = Extremes::default();
    for c in climbs {
        ext.merge(c);
    }
    ext.finish(Provenance::Refined)
}

fn climb(table: &VertexTable, mut current: Vec<usize>, state: usize, maximise: bool, steps: usize) -> Result<Extremes> {
    let mut ext = Extremes::default();
    let Some(mut value) = ext.visit(current.clone(), table.stationary(&current))? else {
        return Ok(ext);
    };
    let better = |a: &Rational, b: &Rational| if maximise { a > b } else { a < b };
    for _ in 0..steps {
        let mut moved = false;
        'search: for row in 0..current.len() {
            for alt in 0..table.rows[row].len() {
                if alt == current[row] {
                    continue;
                }
                let mut next = current.clone();
                next[row] = alt;
                if let Some(pi) = ext.visit(next.clone(), table.stationary(&next))? {
                    if better(&pi[state], &value[state]) {
                        current = next;
                        value = pi;
                        moved = true;
                        break 'search;
                    }
                }
            }
        }
        if !moved {
            break;
        }
    }
    Ok(ext)
}

/// Renders the bounds as `state: [m, M]` lines.
pub fn format_bounds(b: &StationaryBounds) -> String {
    (0..b.bounds.len())
        .map(|k| {
            let (lo, hi) = b.state(k);
            format!("{}: [{}, {}]", k + 1, format_rational(&lo), format_rational(&hi))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::rat;

    fn two_state() -> IntervalTransitionMatrix {
        IntervalTransitionMatrix::new(vec![
            vec![(rat(1, 5), rat(2, 5)), (rat(3, 5), rat(4, 5))],
            vec![(rat(3, 10), rat(1, 2)), (rat(1, 2), rat(7, 10))],
        ])
        .unwrap()
    }

    #[test]
    fn exact_stationary() {
        let t = vec![vec![rat(7, 10), rat(3, 10)], vec![rat(2, 5), rat(3, 5)]];
        assert_eq!(stationary(&t).unwrap(), vec![rat(4, 7), rat(3, 7)]);
        let half = vec![vec![rat(1, 2), rat(1, 2)]; 2];
        assert_eq!(stationary(&half).unwrap(), vec![rat(1, 2), rat(1, 2)]);
        let id = vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]];
        assert!(matches!(stationary(&id), Err(Error::Reducible)));
        let swap = vec![vec![rat(0, 1), rat(1, 1)], vec![rat(1, 1), rat(0, 1)]];
        assert!(matches!(stationary(&swap), Err(Error::Periodic(2))));
    }

    #[test]
    fn two_state_bounds() {
        let itm = two_state();
        let exact = two_state_exact(&itm).unwrap();
        assert_eq!(exact.state(0), (rat(3, 11), rat(5, 11)));
        assert_eq!(exact.state(1), (rat(6, 11), rat(8, 11)));
        let vertex = stationary_bounds_vertices(&itm).unwrap();
        assert_eq!(vertex.bounds, exact.bounds);
        assert_eq!(vertex.evaluated, 4);
        assert_eq!(refine_bounds_local(&itm, 0, 5).unwrap().bounds, exact.bounds);
    }

    #[test]
    fn zero_steps_keeps_the_seed() {
        let itm = two_state();
        let b = refine_bounds_local(&itm, 0, 0).unwrap();
        let pi = stationary(&[vec![rat(1, 5), rat(4, 5)], vec![rat(3, 10), rat(7, 10)]]).unwrap();
        assert_eq!(b.state(0), (pi[0].clone(), pi[0].clone()));
    }

    #[test]
    fn degenerate_cases() {
        let itm = IntervalTransitionMatrix::new(vec![
            vec![(rat(1, 2), rat(1, 1)), (rat(0, 1), rat(1, 2))],
            vec![(rat(0, 1), rat(1, 2)), (rat(1, 2), rat(1, 1))],
        ])
        .unwrap();
        assert!(matches!(two_state_exact(&itm), Err(Error::DegenerateChain(_))));
        let v = stationary_bounds_vertices(&itm).unwrap();
        // the identity and the two matrices with an absorbing state
        assert_eq!(v.skipped.len(), 3);
        assert_eq!(v.state(0), (rat(1, 2), rat(1, 2)));
        assert!(matches!(
            IntervalTransitionMatrix::new(vec![vec![(rat(0, 1), rat(1, 4)), (rat(0, 1), rat(1, 4))]; 2]),
            Err(Error::EmptyRow(0))
        ));
        let id = IntervalTransitionMatrix::point(&[vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]]).unwrap();
        assert!(matches!(stationary_bounds_vertices(&id), Err(Error::AllVerticesDegenerate)));
    }
}
