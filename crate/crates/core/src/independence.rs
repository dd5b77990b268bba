//! Conditional independence of events under a joint valuation on a product
//! of factor spaces, the Fréchet and strong interval combinators, and
//! semantic validation of the graphoid rules.
//!
//! An event on some of the factors is stored as its cylinder in the joint
//! space. The tensor `U ⊗ V = (U1 × V1, (U2 × D) ∪ (D × V2))` of events on
//! disjoint factors is then the event intersection of their cylinders.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::event::EventPair;
use crate::inference::{ce_check, cond_prob, pos_check};
use crate::interval::{ProbInterval, Real, UnitValue};
use crate::space::SpaceDescriptor;
use crate::valuation::Valuation;

/// Slack for factorization equalities when a valuation is not exact.
pub const APPROX_CI_TOLERANCE: f64 = 1e-6;

/// A product `D_1 × ... × D_n` with its factors kept apart.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorSpace {
    factors: Vec<SpaceDescriptor>,
    joint: SpaceDescriptor,
}

impl FactorSpace {
    pub fn new(factors: Vec<SpaceDescriptor>) -> Result<Self> {
        let mut it = factors.iter();
        let Some(first) = it.next() else {
            return Err(Error::InvalidArgument("a product needs at least one factor".into()));
        };
        let joint = it.try_fold(first.clone(), |acc, f| acc.product(f))?;
        Ok(FactorSpace { factors, joint })
    }

    /// `n` copies of the same factor.
    pub fn power(factor: &SpaceDescriptor, n: usize) -> Result<Self> {
        Self::new(vec![factor.clone(); n])
    }

    pub fn factors(&self) -> &[SpaceDescriptor] {
        &self.factors
    }

    pub fn joint(&self) -> &SpaceDescriptor {
        &self.joint
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

/// An event living on a set of factors, embedded in the joint space.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorEvent {
    scope: BTreeSet<usize>,
    cylinder: EventPair,
}

impl FactorEvent {
    /// The cylinder over an event on a single factor.
    pub fn on(space: &FactorSpace, factor: usize, e: &EventPair) -> Result<Self> {
        Ok(FactorEvent {
            scope: BTreeSet::from([factor]),
            cylinder: e.cylinder(space.factors(), factor)?,
        })
    }

    /// An event given directly by its scope and its cylinder in the joint space.
    pub fn from_cylinder(space: &FactorSpace, scope: BTreeSet<usize>, cylinder: EventPair) -> Result<Self> {
        space.joint().ensure_same(cylinder.space())?;
        if let Some(&f) = scope.iter().find(|&&f| f >= space.len()) {
            return Err(Error::InvalidArgument(format!("factor {f} out of range for {} factors", space.len())));
        }
        Ok(FactorEvent { scope, cylinder })
    }

    pub fn scope(&self) -> &BTreeSet<usize> {
        &self.scope
    }

    pub fn cylinder(&self) -> &EventPair {
        &self.cylinder
    }

    /// `self ⊗ other`; the scopes must not overlap.
    pub fn tensor(&self, other: &FactorEvent) -> Result<FactorEvent> {
        if !self.scope.is_disjoint(&other.scope) {
            return Err(Error::InvalidArgument(format!(
                "tensor of events sharing factors {:?}",
                self.scope.intersection(&other.scope).collect::<Vec<_>>()
            )));
        }
        Ok(FactorEvent {
            scope: self.scope.union(&other.scope).copied().collect(),
            cylinder: self.cylinder.intersect(&other.cylinder)?,
        })
    }
}

impl fmt::Display for FactorEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}:{}", self.scope, self.cylinder)
    }
}

pub fn tensor(a: &FactorEvent, b: &FactorEvent) -> Result<FactorEvent> {
    a.tensor(b)
}

/// `U ⫫ V | W` under `joint`, with the three events on disjoint factors.
#[derive(Clone, Debug)]
pub struct CIQuery {
    pub joint: Valuation,
    pub u: FactorEvent,
    pub v: FactorEvent,
    pub w: FactorEvent,
}

impl CIQuery {
    pub fn new(joint: Valuation, u: FactorEvent, v: FactorEvent, w: FactorEvent) -> Result<Self> {
        for e in [&u, &v, &w] {
            joint.space().ensure_same(e.cylinder.space())?;
        }
        if !(u.scope.is_disjoint(&v.scope) && u.scope.is_disjoint(&w.scope) && v.scope.is_disjoint(&w.scope)) {
            return Err(Error::InvalidArgument("CI events must live on disjoint factors".into()));
        }
        Ok(CIQuery { joint, u, v, w })
    }

    /// The same query with `u` and `v` exchanged.
    pub fn swapped(&self) -> CIQuery {
        CIQuery {
            joint: self.joint.clone(),
            u: self.v.clone(),
            v: self.u.clone(),
            w: self.w.clone(),
        }
    }
}

/// Checks `Pos(W)` and `CE(W)` and returns `σ(W1)`.
pub fn conditioning_mass(joint: &Valuation, w: &EventPair) -> Result<Real> {
    if !ce_check(joint, w)? {
        return Err(Error::CeViolation(format!("σ(W1) + σ(W2) ≠ 1 for W = {w}")));
    }
    if !pos_check(joint, w)? {
        return Err(Error::PositivityViolation(format!("σ(W1) = 0 for W = {w}")));
    }
    Ok(joint.eval(w.inner())?.into_real())
}

/// The conditional masses entering both factorization conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalMasses {
    /// `σ(U1 | W1)`, `σ(V1 | W1)` and `σ(U1 × V1 | W1)`.
    pub inner: [Real; 3],
    /// `σ(U2 | W1)`, `σ(V2 | W1)` and `σ(U2 × V2 | W1)`.
    pub outer: [Real; 3],
}

impl ConditionalMasses {
    pub fn compute(q: &CIQuery) -> Result<Self> {
        let w1 = q.w.cylinder.inner();
        let mw = conditioning_mass(&q.joint, &q.w.cylinder)?;
        let given = |set: &crate::space::OpenSet| -> Result<Real> {
            let m = q.joint.eval(&set.intersect(w1)?)?.into_real();
            m.checked_div(&mw)
                .ok_or_else(|| Error::PositivityViolation("σ(W1) is not certainly positive".into()))
        };
        let (u, v) = (&q.u.cylinder, &q.v.cylinder);
        Ok(ConditionalMasses {
            inner: [
                given(u.inner())?,
                given(v.inner())?,
                given(&u.inner().intersect(v.inner())?)?,
            ],
            outer: [
                given(u.outer())?,
                given(v.outer())?,
                given(&u.outer().intersect(v.outer())?)?,
            ],
        })
    }
}

fn factorizes(parts: &[Real; 3], tol: f64) -> bool {
    let product = &parts[0] * &parts[1];
    match (product.as_exact(), parts[2].as_exact()) {
        (Some(a), Some(b)) => a == b,
        _ => (product.to_f64() - parts[2].to_f64()).abs() <= product.err() + parts[2].err() + tol,
    }
}

fn tolerance(joint: &Valuation) -> f64 {
    if joint.is_exact() {
        0.0
    } else {
        APPROX_CI_TOLERANCE
    }
}

/// `σ(U1 × V1 | W1) = σ(U1 | W1) σ(V1 | W1)`.
pub fn check_ci(q: &CIQuery) -> Result<bool> {
    let m = ConditionalMasses::compute(q)?;
    Ok(factorizes(&m.inner, tolerance(&q.joint)))
}

/// Both the inner-open and the outer-open factorization hold.
pub fn check_strong_ci(q: &CIQuery) -> Result<bool> {
    let m = ConditionalMasses::compute(q)?;
    let tol = tolerance(&q.joint);
    Ok(factorizes(&m.inner, tol) && factorizes(&m.outer, tol))
}

/// The conditional interval `C(σ, U ⊗ V, W)` of the product event.
pub fn conditional_product_interval(q: &CIQuery) -> Result<ProbInterval> {
    conditioning_mass(&q.joint, &q.w.cylinder)?;
    cond_prob(&q.joint, &q.u.tensor(&q.v)?.cylinder, &q.w.cylinder)
}

/// `C(σ, U, W)` for a factor event.
pub fn conditional_interval(joint: &Valuation, u: &FactorEvent, w: &FactorEvent) -> Result<ProbInterval> {
    conditioning_mass(joint, &w.cylinder)?;
    cond_prob(joint, &u.cylinder, &w.cylinder)
}

/// `[a⁻ b⁻, min(a⁺, b⁺)]`.
pub fn combine_ci_frechet(cu: &ProbInterval, cv: &ProbInterval) -> ProbInterval {
    let lo = UnitValue::new(cu.lo().real() * cv.lo().real()).expect("product of unit values");
    let hi = UnitValue::new(cu.hi().real().min(cv.hi().real())).expect("min of unit values");
    interval_or_widen(lo, hi)
}

/// `[a⁻ b⁻, a⁺ b⁺]`.
pub fn combine_ci_strong(cu: &ProbInterval, cv: &ProbInterval) -> ProbInterval {
    let lo = UnitValue::new(cu.lo().real() * cv.lo().real()).expect("product of unit values");
    let hi = UnitValue::new(cu.hi().real() * cv.hi().real()).expect("product of unit values");
    interval_or_widen(lo, hi)
}

fn interval_or_widen(lo: UnitValue, hi: UnitValue) -> ProbInterval {
    ProbInterval::new(lo.clone(), hi).unwrap_or_else(|_| ProbInterval::point(lo))
}

/// The graphoid rules for events.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GraphoidRule {
    /// Symmetry: `CE(W) ∧ I(U⫫V|W) ⇒ I(V⫫U|W)`.
    CI1,
    /// Weak union: `CE(Z) ∧ CE(W) ∧ I(U⫫V⊗W|Z) ⇒ I(U⫫V|W⊗Z)`.
    CI2,
    /// Contraction: `CE(V) ∧ CE(Z) ∧ I(U⫫V|Z) ∧ I(U⫫W|V⊗Z) ⇒ I(U⫫V⊗W|Z)`.
    CI3,
    /// Intersection: `Pos(U1×V1×W1×Z1) ∧ CE(V,W,Z) ∧ I(U⫫V|W⊗Z) ∧ I(U⫫W|V⊗Z) ⇒ I(U⫫V⊗W|Z)`.
    CI4,
}

impl GraphoidRule {
    pub const ALL: [GraphoidRule; 4] = [GraphoidRule::CI1, GraphoidRule::CI2, GraphoidRule::CI3, GraphoidRule::CI4];

    pub fn name(self) -> &'static str {
        match self {
            GraphoidRule::CI1 => "CI1",
            GraphoidRule::CI2 => "CI2",
            GraphoidRule::CI3 => "CI3",
            GraphoidRule::CI4 => "CI4",
        }
    }
}

impl std::str::FromStr for GraphoidRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GraphoidRule::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown graphoid rule {s}")))
    }
}

/// Four events on distinct factors of the joint space.
#[derive(Clone, Debug)]
pub struct GraphoidEvents {
    pub u: FactorEvent,
    pub v: FactorEvent,
    pub w: FactorEvent,
    pub z: FactorEvent,
}

/// What a single rule instance evaluated to.
#[derive(Clone, Debug, PartialEq)]
pub enum GraphoidOutcome {
    /// Some premise is false.
    Vacuous,
    /// Premises and conclusion hold.
    Holds,
    /// Premises hold and the conclusion fails.
    Counterexample,
    /// A CE or positivity condition named by the rule failed.
    Precondition(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphoidReport {
    pub rule: GraphoidRule,
    pub outcome: GraphoidOutcome,
    /// CE is evaluated on the marginal of each event's own factors.
    pub note: &'static str,
}

const CE_NOTE: &str = "CE of each conditioning event is evaluated on the marginal of its own factors";

fn require_ce(joint: &Valuation, named: &[(&str, &FactorEvent)]) -> Result<Option<String>> {
    for (label, e) in named {
        if !ce_check(joint, &e.cylinder)? {
            return Ok(Some(format!("CE({label}) fails")));
        }
    }
    Ok(None)
}

/// Evaluates one rule on `joint` semantically, through [`check_ci`].
pub fn validate_graphoid(rule: GraphoidRule, joint: &Valuation, ev: &GraphoidEvents) -> Result<GraphoidReport> {
    let report = |outcome| GraphoidReport { rule, outcome, note: CE_NOTE };
    let ci = |u: &FactorEvent, v: &FactorEvent, w: &FactorEvent| -> Result<bool> {
        check_ci(&CIQuery::new(joint.clone(), u.clone(), v.clone(), w.clone())?)
    };
    let GraphoidEvents { u, v, w, z } = ev;
    let precondition = match rule {
        GraphoidRule::CI1 => require_ce(joint, &[("W", w)])?,
        GraphoidRule::CI2 => require_ce(joint, &[("Z", z), ("W", w)])?,
        GraphoidRule::CI3 => require_ce(joint, &[("V", v), ("Z", z)])?,
        GraphoidRule::CI4 => {
            let all = u.tensor(v)?.tensor(w)?.tensor(z)?;
            if !pos_check(joint, &all.cylinder)? {
                Some("Pos(U1×V1×W1×Z1) fails".to_string())
            } else {
                require_ce(joint, &[("V", v), ("W", w), ("Z", z)])?
            }
        }
    };
    if let Some(msg) = precondition {
        return Ok(report(GraphoidOutcome::Precondition(msg)));
    }
    let evaluated = (|| -> Result<(bool, bool)> {
        match rule {
            GraphoidRule::CI1 => {
                let premise = ci(u, v, w)?;
                Ok((premise, premise && ci(v, u, w)?))
            }
            GraphoidRule::CI2 => {
                let premise = ci(u, &v.tensor(w)?, z)?;
                Ok((premise, premise && ci(u, v, &w.tensor(z)?)?))
            }
            GraphoidRule::CI3 => {
                let premise = ci(u, v, z)? && ci(u, w, &v.tensor(z)?)?;
                Ok((premise, premise && ci(u, &v.tensor(w)?, z)?))
            }
            GraphoidRule::CI4 => {
                let premise = ci(u, v, &w.tensor(z)?)? && ci(u, w, &v.tensor(z)?)?;
                Ok((premise, premise && ci(u, &v.tensor(w)?, z)?))
            }
        }
    })();
    let outcome = match evaluated {
        Ok((false, _)) => GraphoidOutcome::Vacuous,
        Ok((true, true)) => GraphoidOutcome::Holds,
        Ok((true, false)) => GraphoidOutcome::Counterexample,
        Err(e @ (Error::CeViolation(_) | Error::PositivityViolation(_) | Error::Indeterminate(_))) => {
            GraphoidOutcome::Precondition(e.to_string())
        }
        Err(e) => return Err(e),
    };
    Ok(report(outcome))
}

/// Tallies of [`validate_graphoid`] over many event tuples.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GraphoidSweep {
    pub vacuous: usize,
    pub holds: usize,
    pub preconditions: usize,
    /// Indices of tuples where the premises held and the conclusion failed.
    pub counterexamples: Vec<usize>,
}

impl GraphoidSweep {
    pub fn total(&self) -> usize {
        self.vacuous + self.holds + self.preconditions + self.counterexamples.len()
    }
}

pub fn graphoid_sweep(rule: GraphoidRule, joint: &Valuation, tuples: &[GraphoidEvents]) -> Result<GraphoidSweep> {
    use rayon::prelude::*;
    let outcomes: Vec<GraphoidOutcome> = tuples
        .par_iter()
        .map(|t| validate_graphoid(rule, joint, t).map(|r| r.outcome))
        .collect::<Result<_>>()?;
    let mut sweep = GraphoidSweep::default();
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            GraphoidOutcome::Vacuous => sweep.vacuous += 1,
            GraphoidOutcome::Holds => sweep.holds += 1,
            GraphoidOutcome::Precondition(_) => sweep.preconditions += 1,
            GraphoidOutcome::Counterexample => sweep.counterexamples.push(i),
        }
    }
    Ok(sweep)
}
