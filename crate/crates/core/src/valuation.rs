//! Probability valuations evaluated on open sets.
//!
//! Every law on the cube is atomless, so the mass of an open set is the sum of
//! the box masses of the full-dimensional cells of its canonical grid.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::beta::{beta_interval_mass, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::interval::{format_rational, rat, rat_int, rational_to_f64, Comparison, Rational, Real, UnitValue};
use crate::space::{OpenSet, SpaceDescriptor};

#[derive(Clone, Debug, PartialEq)]
pub enum Law {
    /// Volume on `[0,1]^d`.
    Lebesgue,
    /// Piecewise-constant density on `[0,1]`: segment `[breaks[i], breaks[i+1]]`
    /// carries mass `weights[i]` spread uniformly.
    Piecewise {
        breaks: Vec<Rational>,
        weights: Vec<Rational>,
    },
    /// Beta(α, β) on `[0,1]`; masses carry an absolute error of `tol` per CDF
    /// evaluation.
    Beta { alpha: f64, beta: f64, tol: f64 },
    /// The fat Cantor construction with removal scale `r` and `depth` rounds.
    /// Its open sets receive their exact Lebesgue length, so evaluation is
    /// exact at every depth.
    FatCantor { r: Rational, depth: u32 },
    /// Point masses on a finite space, row-major.
    Discrete { p: Vec<Rational> },
    /// A finite convex combination of valuations on one space.
    Mixture { parts: Vec<(Rational, Valuation)> },
    /// The independent product of valuations, axes concatenated in order.
    Product { factors: Vec<Valuation> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Valuation {
    space: SpaceDescriptor,
    law: Law,
}

fn check_weights(weights: &[Rational], what: &str) -> Result<()> {
    if weights.iter().any(|w| w.is_negative()) {
        return Err(Error::InvalidArgument(format!("{what}: negative weight")));
    }
    let total: Rational = weights.iter().sum();
    if !total.is_one() {
        return Err(Error::InvalidArgument(format!(
            "{what}: weights sum to {}, not 1",
            format_rational(&total)
        )));
    }
    Ok(())
}

impl Valuation {
    pub fn lebesgue(dim: usize) -> Result<Self> {
        Ok(Valuation {
            space: SpaceDescriptor::cube(dim)?,
            law: Law::Lebesgue,
        })
    }

    pub fn piecewise(breaks: Vec<Rational>, weights: Vec<Rational>) -> Result<Self> {
        if breaks.len() < 2 || !breaks[0].is_zero() || !breaks[breaks.len() - 1].is_one() {
            return Err(Error::InvalidArgument("piecewise breaks must run from 0 to 1".into()));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("piecewise breaks must increase strictly".into()));
        }
        if weights.len() + 1 != breaks.len() {
            return Err(Error::InvalidArgument(format!(
                "{} breaks need {} weights, got {}",
                breaks.len(),
                breaks.len() - 1,
                weights.len()
            )));
        }
        check_weights(&weights, "piecewise")?;
        Ok(Valuation {
            space: SpaceDescriptor::unit_interval(),
            law: Law::Piecewise { breaks, weights },
        })
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        Self::beta_with_tolerance(alpha, beta, DEFAULT_TOLERANCE)
    }

    pub fn beta_with_tolerance(alpha: f64, beta: f64, tol: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "Beta parameters must be positive, got ({alpha}, {beta})"
            )));
        }
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::InvalidArgument(format!("tolerance {tol} outside (0,1)")));
        }
        Ok(Valuation {
            space: SpaceDescriptor::unit_interval(),
            law: Law::Beta { alpha, beta, tol },
        })
    }

    pub fn fat_cantor(r: Rational, depth: u32) -> Result<Self> {
        if !r.is_positive() || r >= Rational::one() {
            return Err(Error::InvalidArgument(format!(
                "fat Cantor scale {} outside (0,1)",
                format_rational(&r)
            )));
        }
        Ok(Valuation {
            space: SpaceDescriptor::unit_interval(),
            law: Law::FatCantor { r, depth },
        })
    }

    pub fn discrete(p: Vec<Rational>) -> Result<Self> {
        let shape = vec![p.len()];
        Self::discrete_shaped(shape, p)
    }

    pub fn discrete_shaped(shape: Vec<usize>, p: Vec<Rational>) -> Result<Self> {
        let space = SpaceDescriptor::discrete_shape(shape)?;
        if space.size() != Some(p.len()) {
            return Err(Error::InvalidArgument(format!(
                "{space} needs {} probabilities, got {}",
                space.size().unwrap_or(0),
                p.len()
            )));
        }
        check_weights(&p, "discrete")?;
        Ok(Valuation {
            space,
            law: Law::Discrete { p },
        })
    }

    pub fn uniform_discrete(n: usize) -> Result<Self> {
        Self::discrete(vec![rat(1, n as i64); n])
    }

    pub fn mixture(parts: Vec<(Rational, Valuation)>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(Error::InvalidArgument("mixture needs at least one part".into()));
        };
        let space = first.1.space.clone();
        for (_, v) in &parts {
            space.ensure_same(&v.space)?;
        }
        let w: Vec<Rational> = parts.iter().map(|(w, _)| w.clone()).collect();
        check_weights(&w, "mixture")?;
        Ok(Valuation {
            space,
            law: Law::Mixture { parts },
        })
    }

    /// Equal-weight mixture.
    pub fn average(parts: Vec<Valuation>) -> Result<Self> {
        let n = parts.len() as i64;
        Self::mixture(parts.into_iter().map(|v| (rat(1, n.max(1)), v)).collect())
    }

    pub fn product(factors: Vec<Valuation>) -> Result<Self> {
        let mut it = factors.iter();
        let Some(first) = it.next() else {
            return Err(Error::InvalidArgument("product needs at least one factor".into()));
        };
        let mut space = first.space.clone();
        for f in it {
            space = space.product(&f.space)?;
        }
        Ok(Valuation {
            space,
            law: Law::Product { factors },
        })
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn law(&self) -> &Law {
        &self.law
    }

    /// True when every evaluation is an exact rational.
    pub fn is_exact(&self) -> bool {
        match &self.law {
            Law::Beta { .. } => false,
            Law::Mixture { parts } => parts.iter().all(|(_, v)| v.is_exact()),
            Law::Product { factors } => factors.iter().all(Valuation::is_exact),
            _ => true,
        }
    }

    /// Mass of the open box `∏ (lo_a, hi_a)` of a cube valuation.
    pub fn box_mass(&self, b: &[(Rational, Rational)]) -> Result<Real> {
        match &self.law {
            Law::Lebesgue | Law::FatCantor { .. } => {
                Ok(Real::Exact(b.iter().map(|(lo, hi)| hi - lo).product()))
            }
            Law::Piecewise { breaks, weights } => {
                let (lo, hi) = &b[0];
                let mut total = Rational::zero();
                for (i, w) in weights.iter().enumerate() {
                    let (s, e) = (&breaks[i], &breaks[i + 1]);
                    let l = if lo > s { lo } else { s };
                    let h = if hi < e { hi } else { e };
                    if l < h {
                        total += w * (h - l) / (e - s);
                    }
                }
                Ok(Real::Exact(total))
            }
            Law::Beta { alpha, beta, tol } => {
                let (lo, hi) = &b[0];
                beta_interval_mass(*alpha, *beta, rational_to_f64(lo), rational_to_f64(hi), *tol)
            }
            Law::Discrete { .. } => Err(Error::SpaceMismatch("box mass of a discrete law".into())),
            Law::Mixture { parts } => {
                let mut total = Real::zero();
                for (w, v) in parts {
                    total = total + Real::Exact(w.clone()) * v.box_mass(b)?;
                }
                Ok(total)
            }
            Law::Product { factors } => {
                let mut total = Real::one();
                let mut at = 0;
                for f in factors {
                    let k = f.space.axes();
                    total = total * f.box_mass(&b[at..at + k])?;
                    at += k;
                }
                Ok(total)
            }
        }
    }

    /// Mass of a single point of a discrete valuation (row-major index).
    pub fn point_mass(&self, i: usize) -> Result<Rational> {
        match &self.law {
            Law::Discrete { p } => p
                .get(i)
                .cloned()
                .ok_or_else(|| Error::RangeViolation(format!("point {i}"))),
            Law::Mixture { parts } => {
                let mut total = Rational::zero();
                for (w, v) in parts {
                    total += w * v.point_mass(i)?;
                }
                Ok(total)
            }
            Law::Product { factors } => {
                let sizes: Vec<usize> = factors.iter().map(|f| f.space.size().unwrap_or(1)).collect();
                let mut rest = i;
                let mut idx = vec![0; sizes.len()];
                for k in (0..sizes.len()).rev() {
                    idx[k] = rest % sizes[k];
                    rest /= sizes[k];
                }
                let mut total = Rational::one();
                for (f, j) in factors.iter().zip(idx) {
                    total *= f.point_mass(j)?;
                }
                Ok(total)
            }
            _ => Err(Error::SpaceMismatch("point mass of a cube law".into())),
        }
    }

    /// `σ(o)`.
    pub fn eval(&self, o: &OpenSet) -> Result<UnitValue> {
        self.space.ensure_same(o.space())?;
        let total = if let Some(points) = o.points() {
            let mut t = Rational::zero();
            for &i in points {
                t += self.point_mass(i)?;
            }
            Real::Exact(t)
        } else {
            let mut t = Real::zero();
            for cell in o.cells() {
                t = t + self.box_mass(&cell)?;
            }
            t
        };
        UnitValue::new(total)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.law {
            Law::Lebesgue => write!(f, "Lebesgue on {}", self.space),
            Law::Piecewise { .. } => write!(f, "piecewise density"),
            Law::Beta { alpha, beta, .. } => write!(f, "Beta({alpha}, {beta})"),
            Law::FatCantor { r, depth } => write!(f, "fat Cantor(r = {}, depth {depth})", format_rational(r)),
            Law::Discrete { .. } => write!(f, "discrete on {}", self.space),
            Law::Mixture { parts } => write!(f, "mixture of {}", parts.len()),
            Law::Product { factors } => {
                let parts: Vec<String> = factors.iter().map(|v| v.to_string()).collect();
                write!(f, "{}", parts.join(" × "))
            }
        }
    }
}

/// `σ(o)` with the error bound of the law attached.
pub fn eval_open(sigma: &Valuation, o: &OpenSet) -> Result<UnitValue> {
    sigma.eval(o)
}

/// The intervals remaining after `n` rounds of the fat Cantor construction:
/// round `i` removes the open middle interval of length `r / 3^(i+1)` from
/// each of the `2^i` current intervals.
pub fn fat_cantor_intervals(r: &Rational, n: u32) -> Vec<(Rational, Rational)> {
    let mut current = vec![(Rational::zero(), Rational::one())];
    let mut scale = rat_int(3);
    for _ in 0..n {
        let gap = r / &scale;
        let half = &gap / rat_int(2);
        current = current
            .into_iter()
            .flat_map(|(a, b)| {
                let mid = (&a + &b) / rat_int(2);
                [(a, &mid - &half), (&mid + &half, b)]
            })
            .collect();
        scale *= rat_int(3);
    }
    current
}

/// `O_n`: the union of the interiors of the intervals remaining after `n`
/// rounds.
pub fn fat_cantor_layer(r: &Rational, n: u32) -> Result<OpenSet> {
    OpenSet::intervals(fat_cantor_intervals(r, n))
}

/// The union of the open intervals removed during the first `n` rounds.
pub fn fat_cantor_removed(r: &Rational, n: u32) -> Result<OpenSet> {
    let kept = fat_cantor_intervals(r, n);
    let gaps = kept.windows(2).map(|w| (w[0].1.clone(), w[1].0.clone())).collect();
    OpenSet::intervals(gaps)
}

/// `s(O_n) = 1 - r + r (2/3)^n`.
pub fn fat_cantor_open_layer(r: &Rational, n: u32) -> Result<UnitValue> {
    if !r.is_positive() || *r >= Rational::one() {
        return Err(Error::InvalidArgument(format!(
            "fat Cantor scale {} outside (0,1)",
            format_rational(r)
        )));
    }
    let decay = num_traits::pow(rat(2, 3), n as usize);
    UnitValue::exact(Rational::one() - r + r * decay)
}

/// Whether `σ(u) + σ(v) = σ(u ∪ v) + σ(u ∩ v)` within the combined error bound.
pub fn check_modularity(sigma: &Valuation, u: &OpenSet, v: &OpenSet) -> Result<bool> {
    let lhs = sigma.eval(u)?.into_real() + sigma.eval(v)?.into_real();
    let rhs = sigma.eval(&u.union(v)?)?.into_real() + sigma.eval(&u.intersect(v)?)?.into_real();
    Ok(matches!(lhs.compare(&rhs), Comparison::Equal | Comparison::Indeterminate))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomViolation {
    /// Axiom number, 1 to 6.
    pub axiom: u8,
    pub detail: String,
}

/// Outcome of checking the axioms of `G_σ = {(v, p) : p < σ(v)}` on a sample.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AxiomReport {
    /// Number of instances examined per axiom.
    pub checked: [usize; 6],
    /// Threshold comparisons that fell inside an error band.
    pub indeterminate: usize,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Thresholds `p` with `p < σ(v)` form a prefix of a sorted grid. `sure` is the
/// length of the prefix where this holds beyond the error bound, `possible`
/// the length where it is not definitely false.
#[derive(Clone, Copy, Debug)]
struct Cut {
    sure: usize,
    possible: usize,
}

fn cut(value: &UnitValue, grid: &[Rational]) -> Cut {
    let mut sure = 0;
    let mut possible = 0;
    for g in grid {
        match Real::Exact(g.clone()).compare(value.real()) {
            Comparison::Less => {
                sure += 1;
                possible += 1;
            }
            Comparison::Indeterminate => possible += 1,
            _ => {}
        }
    }
    Cut { sure, possible }
}

/// Whether some `p + q` with `p, q` from the premise prefixes equals some
/// `p' + q'` with `p', q'` from the conclusion-false suffixes.
fn sums_meet(grid: &[Rational], premise: (usize, usize), refuted: (usize, usize)) -> bool {
    let (a, b) = premise;
    let (c, d) = refuted;
    if a == 0 || b == 0 || c >= grid.len() || d >= grid.len() {
        return false;
    }
    if grid[a - 1].clone() + &grid[b - 1] < grid[c].clone() + &grid[d] {
        return false;
    }
    let left: BTreeSet<Rational> = grid[..a]
        .iter()
        .flat_map(|p| grid[..b].iter().map(move |q| p + q))
        .collect();
    grid[c..].iter().any(|p| grid[d..].iter().any(|q| left.contains(&(p + q))))
}

/// Checks axioms 1 to 6 of the relation `G_σ` on the given opens and sorted
/// thresholds in `(0,1)`. Axiom 4 is checked with the interpolants
/// `shrink(v, 2^-m)`, which are way below `v`.
pub fn check_g_axioms(sigma: &Valuation, basis_sample: &[OpenSet], threshold_grid: &[Rational]) -> Result<AxiomReport> {
    let mut grid: Vec<Rational> = threshold_grid.to_vec();
    grid.sort();
    grid.dedup();
    if grid.iter().any(|g| !g.is_positive() || *g >= Rational::one()) {
        return Err(Error::InvalidArgument("thresholds must lie in (0,1)".into()));
    }
    let mut report = AxiomReport::default();
    let n = grid.len();
    let full = OpenSet::full(sigma.space());
    let empty = OpenSet::empty(sigma.space());

    let c_full = cut(&sigma.eval(&full)?, &grid);
    report.checked[0] += n;
    report.indeterminate += c_full.possible - c_full.sure;
    if c_full.possible < n {
        report.violations.push(AxiomViolation {
            axiom: 1,
            detail: format!("G(D; {}) fails", format_rational(&grid[c_full.possible])),
        });
    }
    let c_empty = cut(&sigma.eval(&empty)?, &grid);
    report.checked[1] += n;
    if c_empty.sure > 0 {
        report.violations.push(AxiomViolation {
            axiom: 2,
            detail: format!("G(∅; {}) holds", format_rational(&grid[0])),
        });
    }

    let cuts: Vec<Cut> = basis_sample
        .iter()
        .map(|v| sigma.eval(v).map(|x| cut(&x, &grid)))
        .collect::<Result<_>>()?;
    for c in &cuts {
        report.indeterminate += c.possible - c.sure;
    }

    for (i, v) in basis_sample.iter().enumerate() {
        for (j, w) in basis_sample.iter().enumerate() {
            if i == j || !v.is_subset(w)? {
                continue;
            }
            report.checked[2] += 1;
            // a threshold p with σ(w) ≤ p < σ(v) breaks monotonicity
            if cuts[j].possible < cuts[i].sure {
                report.violations.push(AxiomViolation {
                    axiom: 3,
                    detail: format!("{v} ⊆ {w} but σ({w}) < σ({v})"),
                });
            }
        }
    }

    for (i, v) in basis_sample.iter().enumerate() {
        if cuts[i].sure == 0 {
            continue;
        }
        report.checked[3] += 1;
        let p = &grid[cuts[i].sure - 1];
        let mut found = false;
        for m in 1..=48u32 {
            let eps = Rational::new(1.into(), num_bigint::BigInt::from(2u32).pow(m));
            let inner = v.shrink(&eps);
            if !inner.way_below(v)? {
                continue;
            }
            if Real::Exact(p.clone()).compare(sigma.eval(&inner)?.real()) == Comparison::Less {
                found = true;
                break;
            }
        }
        if !found {
            report.violations.push(AxiomViolation {
                axiom: 4,
                detail: format!("no open way below {v} keeps mass above {}", format_rational(p)),
            });
        }
    }

    for (i, u) in basis_sample.iter().enumerate() {
        for (j, v) in basis_sample.iter().enumerate().skip(i) {
            let cu = cut(&sigma.eval(&u.union(v)?)?, &grid);
            let ci = cut(&sigma.eval(&u.intersect(v)?)?, &grid);
            report.indeterminate += (cu.possible - cu.sure) + (ci.possible - ci.sure);
            report.checked[4] += 1;
            if sums_meet(&grid, (cuts[i].sure, cuts[j].sure), (cu.possible, ci.possible)) {
                report.violations.push(AxiomViolation {
                    axiom: 5,
                    detail: format!("sub-modularity fails for {u} and {v}"),
                });
            }
            report.checked[5] += 1;
            if sums_meet(&grid, (cu.sure, ci.sure), (cuts[i].possible, cuts[j].possible)) {
                report.violations.push(AxiomViolation {
                    axiom: 6,
                    detail: format!("super-modularity fails for {u} and {v}"),
                });
            }
        }
    }
    Ok(report)
}

/// The grid `{k / 2^depth : 0 < k < 2^depth}`.
pub fn dyadic_grid(depth: u32) -> Vec<Rational> {
    let n = 1i64 << depth;
    (1..n).map(|k| rat(k, n)).collect()
}
