//! Judgments about a valuation (`G`, `C±`, `B±`, `Pos`, `CE`, `I`, `I_s`),
//! the inference rules relating them, and harnesses that check soundness by
//! random sweeps and completeness by dyadic threshold search.
//!
//! Every threshold judgment is strict: `C⁻(V, O; p)` means `p` lies strictly
//! below the lower conditional endpoint, so a judgment at the endpoint itself
//! is false.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::event::EventPair;
use crate::independence::{check_ci, check_strong_ci, conditional_interval, CIQuery, FactorEvent, FactorSpace};
use crate::inference::{bayes_from_assessment, ce_check, cond_prob, pos_check, BayesAssessment};
use crate::interval::{format_rational, rat, rational_from_f64, Comparison, ProbInterval, Rational, Real, UnitValue};
use crate::space::{OpenSet, SpaceDescriptor};
use crate::valuation::Valuation;

/// A statement whose truth is decided by a [`Model`].
#[derive(Clone, Debug, PartialEq)]
pub enum Judgment {
    /// `p < σ(set)`.
    G { set: OpenSet, p: Rational },
    /// `p` is below the lower endpoint of `C(σ, V, O)`.
    Cminus { v: EventPair, o: EventPair, p: Rational },
    /// `q` is above the upper endpoint of `C(σ, V, O)`.
    Cplus { v: EventPair, o: EventPair, q: Rational },
    /// `min(a⁺, b⁺) < q` for the upper endpoints of `C(σ, U, W)` and
    /// `C(σ, V, W)`: the Fréchet reading of the product upper endpoint.
    CplusFrechet { u: FactorEvent, v: FactorEvent, w: FactorEvent, q: Rational },
    /// `p` is below the lower endpoint of the interval posterior of `H` given `E`.
    Bminus { h: EventPair, e: EventPair, p: Rational },
    /// `q` is above the upper endpoint of the interval posterior.
    Bplus { h: EventPair, e: EventPair, q: Rational },
    Pos(EventPair),
    CE(EventPair),
    /// `U ⫫ V | W` on the inner opens.
    I { u: FactorEvent, v: FactorEvent, w: FactorEvent },
    /// Strong conditional independence.
    Istrong { u: FactorEvent, v: FactorEvent, w: FactorEvent },
    /// Disjunction; empty means false.
    Any(Vec<Judgment>),
}

impl Judgment {
    pub fn threshold(&self) -> Option<&Rational> {
        match self {
            Judgment::G { p, .. } | Judgment::Cminus { p, .. } | Judgment::Bminus { p, .. } => Some(p),
            Judgment::Cplus { q, .. } | Judgment::CplusFrechet { q, .. } | Judgment::Bplus { q, .. } => Some(q),
            _ => None,
        }
    }

    /// The same judgment with its threshold replaced.
    pub fn with_threshold(&self, t: Rational) -> Judgment {
        let mut j = self.clone();
        match &mut j {
            Judgment::G { p, .. } | Judgment::Cminus { p, .. } | Judgment::Bminus { p, .. } => *p = t,
            Judgment::Cplus { q, .. } | Judgment::CplusFrechet { q, .. } | Judgment::Bplus { q, .. } => *q = t,
            _ => {}
        }
        j
    }

    /// Side conditions: `Pos`, `CE`, `I` and `I_s`.
    pub fn is_side_condition(&self) -> bool {
        matches!(self, Judgment::Pos(_) | Judgment::CE(_) | Judgment::I { .. } | Judgment::Istrong { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Judgment::G { .. } => "G",
            Judgment::Cminus { .. } => "C-",
            Judgment::Cplus { .. } => "C+",
            Judgment::CplusFrechet { .. } => "C+frechet",
            Judgment::Bminus { .. } => "B-",
            Judgment::Bplus { .. } => "B+",
            Judgment::Pos(_) => "Pos",
            Judgment::CE(_) => "CE",
            Judgment::I { .. } => "I",
            Judgment::Istrong { .. } => "Istrong",
            Judgment::Any(_) => "any",
        }
    }
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = format_rational;
        match self {
            Judgment::G { set, p } => write!(f, "G({set}; {})", r(p)),
            Judgment::Cminus { v, o, p } => write!(f, "C-({v}, {o}; {})", r(p)),
            Judgment::Cplus { v, o, q } => write!(f, "C+({v}, {o}; {})", r(q)),
            Judgment::CplusFrechet { u, v, w, q } => write!(f, "C+frechet({u} ⊗ {v}, {w}; {})", r(q)),
            Judgment::Bminus { h, e, p } => write!(f, "B-({h}, {e}; {})", r(p)),
            Judgment::Bplus { h, e, q } => write!(f, "B+({h}, {e}; {})", r(q)),
            Judgment::Pos(o) => write!(f, "Pos({o})"),
            Judgment::CE(o) => write!(f, "CE({o})"),
            Judgment::I { u, v, w } => write!(f, "I({u} ⫫ {v} | {w})"),
            Judgment::Istrong { u, v, w } => write!(f, "Is({u} ⫫ {v} | {w})"),
            Judgment::Any(js) if js.is_empty() => write!(f, "False"),
            Judgment::Any(js) => {
                let parts: Vec<String> = js.iter().map(|j| j.to_string()).collect();
                write!(f, "{}", parts.join(" ∨ "))
            }
        }
    }
}

/// What judgments are evaluated against.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum Model {
    Valuation(Valuation),
    /// Interval assessments for a named hypothesis `h` and evidence `e`.
    /// Decides `C±(H, (D,∅))`, `C±(E, H)`, `C±(E, ¬H)` and `B±(H, E)` from
    /// the stored intervals.
    Assessment { h: EventPair, e: EventPair, assessment: BayesAssessment },
}

impl Model {
    pub fn valuation(&self) -> Result<&Valuation> {
        match self {
            Model::Valuation(s) => Ok(s),
            Model::Assessment { .. } => Err(Error::InvalidArgument(
                "an assessment model only decides C± and B± judgments about its own events".into(),
            )),
        }
    }

    /// `C(σ, V, O)`, or the matching stored interval.
    pub fn conditional(&self, v: &EventPair, o: &EventPair) -> Result<ProbInterval> {
        match self {
            Model::Valuation(s) => cond_prob(s, v, o),
            Model::Assessment { h, e, assessment } => {
                if v == h && *o == EventPair::certain(h.space()) {
                    Ok(assessment.prior.clone())
                } else if v == e && o == h {
                    Ok(assessment.likelihood.clone())
                } else if v == e && *o == h.negate() {
                    Ok(assessment.alt_likelihood.clone())
                } else {
                    Err(Error::InvalidArgument(format!("the assessment does not assign C({v}, {o})")))
                }
            }
        }
    }

    /// The three intervals feeding interval Bayes for `h` and `e`.
    pub fn assessment(&self, h: &EventPair, e: &EventPair) -> Result<BayesAssessment> {
        match self {
            Model::Valuation(s) => BayesAssessment::from_events(s, h, e),
            Model::Assessment { h: mh, e: me, assessment } => {
                if h == mh && e == me {
                    Ok(assessment.clone())
                } else {
                    Err(Error::InvalidArgument("B± judgment about events outside the assessment".into()))
                }
            }
        }
    }

    pub fn posterior(&self, h: &EventPair, e: &EventPair) -> Result<ProbInterval> {
        bayes_from_assessment(&self.assessment(h, e)?)
    }
}

/// `a < b`, failing with `Indeterminate` inside the error band.
fn strictly_below(a: &Real, b: &Real) -> Result<bool> {
    match a.compare(b) {
        Comparison::Less => Ok(true),
        Comparison::Indeterminate => Err(Error::Indeterminate(format!("{a} against {b}"))),
        _ => Ok(false),
    }
}

fn exact(r: &Rational) -> Real {
    Real::Exact(r.clone())
}

fn query(joint: &Valuation, u: &FactorEvent, v: &FactorEvent, w: &FactorEvent) -> Result<CIQuery> {
    CIQuery::new(joint.clone(), u.clone(), v.clone(), w.clone())
}

/// Semantic truth of `j` under `model`.
pub fn holds(model: &Model, j: &Judgment) -> Result<bool> {
    match j {
        Judgment::G { set, p } => strictly_below(&exact(p), model.valuation()?.eval(set)?.real()),
        Judgment::Cminus { v, o, p } => strictly_below(&exact(p), model.conditional(v, o)?.lo().real()),
        Judgment::Cplus { v, o, q } => strictly_below(model.conditional(v, o)?.hi().real(), &exact(q)),
        Judgment::CplusFrechet { u, v, w, q } => {
            let s = model.valuation()?;
            let a = conditional_interval(s, u, w)?;
            let b = conditional_interval(s, v, w)?;
            strictly_below(&a.hi().real().min(b.hi().real()), &exact(q))
        }
        Judgment::Bminus { h, e, p } => strictly_below(&exact(p), model.posterior(h, e)?.lo().real()),
        Judgment::Bplus { h, e, q } => strictly_below(model.posterior(h, e)?.hi().real(), &exact(q)),
        Judgment::Pos(o) => pos_check(model.valuation()?, o),
        Judgment::CE(o) => ce_check(model.valuation()?, o),
        Judgment::I { u, v, w } => check_ci(&query(model.valuation()?, u, v, w)?),
        Judgment::Istrong { u, v, w } => check_strong_ci(&query(model.valuation()?, u, v, w)?),
        Judgment::Any(js) => {
            for j in js {
                if holds(model, j)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

/// Identifiers of the inference rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    L1,
    L2,
    U1,
    U2,
    B1,
    B2,
    B3,
    B4,
    CI5,
    CI6,
    CI7,
    CI8,
    SI9,
    SI10,
    AX1,
    AX2,
    AX3,
    AX4,
    AX5,
    AX6,
}

impl RuleId {
    pub const ALL: [RuleId; 20] = [
        RuleId::L1,
        RuleId::L2,
        RuleId::U1,
        RuleId::U2,
        RuleId::B1,
        RuleId::B2,
        RuleId::B3,
        RuleId::B4,
        RuleId::CI5,
        RuleId::CI6,
        RuleId::CI7,
        RuleId::CI8,
        RuleId::SI9,
        RuleId::SI10,
        RuleId::AX1,
        RuleId::AX2,
        RuleId::AX3,
        RuleId::AX4,
        RuleId::AX5,
        RuleId::AX6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::L1 => "L1",
            RuleId::L2 => "L2",
            RuleId::U1 => "U1",
            RuleId::U2 => "U2",
            RuleId::B1 => "B1",
            RuleId::B2 => "B2",
            RuleId::B3 => "B3",
            RuleId::B4 => "B4",
            RuleId::CI5 => "CI5",
            RuleId::CI6 => "CI6",
            RuleId::CI7 => "CI7",
            RuleId::CI8 => "CI8",
            RuleId::SI9 => "SI9",
            RuleId::SI10 => "SI10",
            RuleId::AX1 => "AX1",
            RuleId::AX2 => "AX2",
            RuleId::AX3 => "AX3",
            RuleId::AX4 => "AX4",
            RuleId::AX5 => "AX5",
            RuleId::AX6 => "AX6",
        }
    }

    /// Rules whose conclusion is an existential obligation.
    pub fn is_backward(self) -> bool {
        matches!(
            self,
            RuleId::L2 | RuleId::U2 | RuleId::B2 | RuleId::B4 | RuleId::CI6 | RuleId::CI8 | RuleId::SI10 | RuleId::AX4
        )
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RuleId::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown rule {s}")))
    }
}

/// A rule with concrete premises. For rules whose conclusion is not computed
/// from the premises alone (`L1`, `U1` need the events `V`, `O`; the axioms
/// need their targets), `conclusion` carries the template.
#[derive(Clone, Debug, PartialEq)]
pub struct RuleInstance {
    pub rule: RuleId,
    pub premises: Vec<Judgment>,
    pub conclusion: Option<Judgment>,
}

impl RuleInstance {
    pub fn new(rule: RuleId, premises: Vec<Judgment>, conclusion: Option<Judgment>) -> Self {
        RuleInstance { rule, premises, conclusion }
    }

    /// `Pos(O) ∧ G(V1∩O1; p1) ∧ G(O2; p2)` with conclusion template `C⁻(V, O)`.
    pub fn l1(v: &EventPair, o: &EventPair, p1: Rational, p2: Rational) -> Result<Self> {
        Ok(RuleInstance::new(
            RuleId::L1,
            vec![
                Judgment::Pos(o.clone()),
                Judgment::G { set: v.inner().intersect(o.inner())?, p: p1 },
                Judgment::G { set: o.outer().clone(), p: p2 },
            ],
            Some(Judgment::Cminus { v: v.clone(), o: o.clone(), p: Rational::zero() }),
        ))
    }

    /// `Pos(O) ∧ G(V2∩O1; p1) ∧ G(O2; p2)` with conclusion template `C⁺(V, O)`.
    pub fn u1(v: &EventPair, o: &EventPair, p1: Rational, p2: Rational) -> Result<Self> {
        Ok(RuleInstance::new(
            RuleId::U1,
            vec![
                Judgment::Pos(o.clone()),
                Judgment::G { set: v.outer().intersect(o.inner())?, p: p1 },
                Judgment::G { set: o.outer().clone(), p: p2 },
            ],
            Some(Judgment::Cplus { v: v.clone(), o: o.clone(), q: Rational::zero() }),
        ))
    }

    /// `C⁻(H,(D,∅); p1) ∧ C⁻(E,H; p2) ∧ C⁺(E,¬H; q3)`.
    pub fn b1(h: &EventPair, e: &EventPair, p1: Rational, p2: Rational, q3: Rational) -> Self {
        RuleInstance::new(
            RuleId::B1,
            vec![
                Judgment::Cminus { v: h.clone(), o: EventPair::certain(h.space()), p: p1 },
                Judgment::Cminus { v: e.clone(), o: h.clone(), p: p2 },
                Judgment::Cplus { v: e.clone(), o: h.negate(), q: q3 },
            ],
            None,
        )
    }

    /// `C⁺(H,(D,∅); q1) ∧ C⁺(E,H; q2) ∧ C⁻(E,¬H; p3)`.
    pub fn b3(h: &EventPair, e: &EventPair, q1: Rational, q2: Rational, p3: Rational) -> Self {
        RuleInstance::new(
            RuleId::B3,
            vec![
                Judgment::Cplus { v: h.clone(), o: EventPair::certain(h.space()), q: q1 },
                Judgment::Cplus { v: e.clone(), o: h.clone(), q: q2 },
                Judgment::Cminus { v: e.clone(), o: h.negate(), p: p3 },
            ],
            None,
        )
    }

    /// `Pos(W) ∧ CE(W) ∧ I ∧ X(U,W; t_u) ∧ X(V,W; t_v)` for `X` one of `C⁻`, `C⁺`.
    pub fn independence(
        rule: RuleId,
        u: &FactorEvent,
        v: &FactorEvent,
        w: &FactorEvent,
        tu: Rational,
        tv: Rational,
    ) -> Self {
        let side = independence_sides(rule, u, v, w);
        let (cu, cv) = match rule {
            RuleId::CI5 => (
                Judgment::Cminus { v: u.cylinder().clone(), o: w.cylinder().clone(), p: tu },
                Judgment::Cminus { v: v.cylinder().clone(), o: w.cylinder().clone(), p: tv },
            ),
            _ => (
                Judgment::Cplus { v: u.cylinder().clone(), o: w.cylinder().clone(), q: tu },
                Judgment::Cplus { v: v.cylinder().clone(), o: w.cylinder().clone(), q: tv },
            ),
        };
        RuleInstance::new(rule, side.into_iter().chain([cu, cv]).collect(), None)
    }

    /// Thresholds of the non-side premises, in order.
    pub fn thresholds(&self) -> Vec<Rational> {
        core(&self.premises).iter().filter_map(|j| j.threshold().cloned()).collect()
    }
}

fn independence_sides(rule: RuleId, u: &FactorEvent, v: &FactorEvent, w: &FactorEvent) -> Vec<Judgment> {
    let (u, v, w) = (u.clone(), v.clone(), w.clone());
    let relation = if matches!(rule, RuleId::SI9 | RuleId::SI10) {
        Judgment::Istrong { u, v, w: w.clone() }
    } else {
        Judgment::I { u, v, w: w.clone() }
    };
    vec![Judgment::Pos(w.cylinder().clone()), Judgment::CE(w.cylinder().clone()), relation]
}

fn core(premises: &[Judgment]) -> Vec<&Judgment> {
    premises.iter().filter(|j| !j.is_side_condition()).collect()
}

fn schema(rule: RuleId, msg: &str) -> Error {
    Error::SchemaMismatch(format!("{rule}: {msg}"))
}

fn expect_same<T: PartialEq>(rule: RuleId, a: &T, b: &T, what: &str) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(schema(rule, what))
    }
}

/// `(U, V, W)` from the `I` or `I_s` side condition, checking that `Pos(W)`
/// and `CE(W)` are present too.
fn independence_context(rule: RuleId, premises: &[Judgment]) -> Result<(FactorEvent, FactorEvent, FactorEvent)> {
    let strong = matches!(rule, RuleId::SI9 | RuleId::SI10);
    let (u, v, w) = premises
        .iter()
        .find_map(|j| match (j, strong) {
            (Judgment::I { u, v, w }, false) | (Judgment::Istrong { u, v, w }, true) => {
                Some((u.clone(), v.clone(), w.clone()))
            }
            _ => None,
        })
        .ok_or_else(|| schema(rule, if strong { "missing I_s premise" } else { "missing I premise" }))?;
    let wc = w.cylinder();
    if !premises.iter().any(|j| matches!(j, Judgment::Pos(o) if o == wc)) {
        return Err(schema(rule, "missing Pos(W) premise"));
    }
    if !premises.iter().any(|j| matches!(j, Judgment::CE(o) if o == wc)) {
        return Err(schema(rule, "missing CE(W) premise"));
    }
    Ok((u, v, w))
}

fn bayes_threshold(rule: RuleId, x: &Rational, y: &Rational, z: &Rational) -> Result<Rational> {
    let num = x * y;
    let den = &num + z * (Rational::one() - x);
    if den.is_zero() {
        return Err(Error::DegenerateDenominator(format!(" in {rule}")));
    }
    Ok(num / den)
}

fn pair<'a>(rule: RuleId, c: &[&'a Judgment]) -> Result<(&'a Judgment, &'a Judgment)> {
    match c {
        [a, b] => Ok((a, b)),
        _ => Err(schema(rule, "expected two threshold premises")),
    }
}

/// Computes the conclusion of a forward rule from its premises.
pub fn apply_forward(inst: &RuleInstance) -> Result<Judgment> {
    let rule = inst.rule;
    if rule.is_backward() {
        return Err(schema(rule, "existential rule; use check_backward"));
    }
    let c = core(&inst.premises);
    let template = || inst.conclusion.clone().ok_or_else(|| schema(rule, "missing conclusion template"));
    match rule {
        RuleId::L1 | RuleId::U1 => {
            let (Judgment::G { set: s1, p: p1 }, Judgment::G { set: s2, p: p2 }) = pair(rule, &c)? else {
                return Err(schema(rule, "premises must be two G judgments"));
            };
            let one = Rational::one();
            if p2 >= &one {
                return Err(Error::DegenerateDenominator(format!(" in {rule}: 1 - p2 = 0")));
            }
            let ratio = p1 / (&one - p2);
            match (template()?, rule) {
                (Judgment::Cminus { v, o, .. }, RuleId::L1) => {
                    expect_same(rule, s1, &v.inner().intersect(o.inner())?, "first premise must be about V1∩O1")?;
                    expect_same(rule, s2, o.outer(), "second premise must be about O2")?;
                    Ok(Judgment::Cminus { v, o, p: ratio })
                }
                (Judgment::Cplus { v, o, .. }, RuleId::U1) => {
                    expect_same(rule, s1, &v.outer().intersect(o.inner())?, "first premise must be about V2∩O1")?;
                    expect_same(rule, s2, o.outer(), "second premise must be about O2")?;
                    Ok(Judgment::Cplus { v, o, q: one - ratio })
                }
                _ => Err(schema(rule, "conclusion template has the wrong kind")),
            }
        }
        RuleId::B1 | RuleId::B3 => {
            let [a, b, d] = c.as_slice() else {
                return Err(schema(rule, "expected three premises"));
            };
            let lower = rule == RuleId::B1;
            let (h, o1, t1) = match (a, lower) {
                (Judgment::Cminus { v, o, p }, true) | (Judgment::Cplus { v, o, q: p }, false) => (v, o, p),
                _ => return Err(schema(rule, "first premise has the wrong kind")),
            };
            let (e, o2, t2) = match (b, lower) {
                (Judgment::Cminus { v, o, p }, true) | (Judgment::Cplus { v, o, q: p }, false) => (v, o, p),
                _ => return Err(schema(rule, "second premise has the wrong kind")),
            };
            let (e3, o3, t3) = match (d, lower) {
                (Judgment::Cplus { v, o, q }, true) | (Judgment::Cminus { v, o, p: q }, false) => (v, o, q),
                _ => return Err(schema(rule, "third premise has the wrong kind")),
            };
            expect_same(rule, o1, &EventPair::certain(h.space()), "first premise must condition on (D, ∅)")?;
            expect_same(rule, o2, h, "second premise must condition on H")?;
            expect_same(rule, e3, e, "third premise must be about E")?;
            expect_same(rule, o3, &h.negate(), "third premise must condition on ¬H")?;
            let t = bayes_threshold(rule, t1, t2, t3)?;
            let (h, e) = (h.clone(), e.clone());
            Ok(if lower { Judgment::Bminus { h, e, p: t } } else { Judgment::Bplus { h, e, q: t } })
        }
        RuleId::CI5 | RuleId::CI7 | RuleId::SI9 => {
            let (u, v, w) = independence_context(rule, &inst.premises)?;
            let (a, b) = pair(rule, &c)?;
            let wc = w.cylinder();
            let (ta, tb) = match (rule, a, b) {
                (RuleId::CI5, Judgment::Cminus { v: x, o: ox, p: pa }, Judgment::Cminus { v: y, o: oy, p: pb })
                | (_, Judgment::Cplus { v: x, o: ox, q: pa }, Judgment::Cplus { v: y, o: oy, q: pb })
                    if rule != RuleId::CI5 || matches!(a, Judgment::Cminus { .. }) =>
                {
                    expect_same(rule, x, u.cylinder(), "first premise must be about U")?;
                    expect_same(rule, y, v.cylinder(), "second premise must be about V")?;
                    expect_same(rule, ox, wc, "premises must condition on W")?;
                    expect_same(rule, oy, wc, "premises must condition on W")?;
                    (pa, pb)
                }
                _ => return Err(schema(rule, "premises have the wrong kind")),
            };
            let product = u.tensor(&v)?.cylinder().clone();
            Ok(match rule {
                RuleId::CI5 => Judgment::Cminus { v: product, o: wc.clone(), p: ta * tb },
                RuleId::CI7 => Judgment::CplusFrechet { u, v, w, q: ta.min(tb).clone() },
                _ => Judgment::Cplus { v: product, o: wc.clone(), q: ta * tb },
            })
        }
        RuleId::AX1 => {
            let t = template()?;
            match &t {
                Judgment::G { set, .. } if *set == OpenSet::full(set.space()) => Ok(t),
                _ => Err(schema(rule, "conclusion must be G(D; p)")),
            }
        }
        RuleId::AX2 => match c.as_slice() {
            [Judgment::G { set, .. }] if set.is_empty() => Ok(Judgment::Any(vec![])),
            _ => Err(schema(rule, "premise must be G(∅; p)")),
        },
        RuleId::AX3 => {
            let ([Judgment::G { set: v, p }], Judgment::G { set: v2, p: p2 }) = (c.as_slice(), template()?) else {
                return Err(schema(rule, "premise and conclusion must be G judgments"));
            };
            if !v.is_subset(&v2)? || p2 > *p {
                return Err(schema(rule, "requires v ⊆ v' and p' ≤ p"));
            }
            Ok(Judgment::G { set: v2, p: p2 })
        }
        RuleId::AX5 | RuleId::AX6 => {
            let (Judgment::G { set: s1, p }, Judgment::G { set: s2, p: q }) = pair(rule, &c)? else {
                return Err(schema(rule, "premises must be two G judgments"));
            };
            let t = template()?;
            let Judgment::Any(parts) = &t else {
                return Err(schema(rule, "conclusion must be a disjunction"));
            };
            let [Judgment::G { set: t1, p: p2 }, Judgment::G { set: t2, p: q2 }] = parts.as_slice() else {
                return Err(schema(rule, "conclusion must be a disjunction of two G judgments"));
            };
            if rule == RuleId::AX5 {
                expect_same(rule, t1, &s1.union(s2)?, "first disjunct must be about u ∪ v")?;
                expect_same(rule, t2, &s1.intersect(s2)?, "second disjunct must be about u ∩ v")?;
            } else {
                expect_same(rule, s1, &t1.union(t2)?, "first premise must be about u ∪ v")?;
                expect_same(rule, s2, &t1.intersect(t2)?, "second premise must be about u ∩ v")?;
            }
            if p + q != p2 + q2 {
                return Err(schema(rule, "requires p + q = p' + q'"));
            }
            Ok(t)
        }
        _ => unreachable!("backward rules handled above"),
    }
}

/// Result of an existential-rule check.
#[derive(Clone, Debug, PartialEq)]
pub enum BackwardOutcome {
    /// Witnesses were found (for `L2`/`U2`: the disjunction held at every grid point).
    Witnessed,
    /// No witness at this resolution; not a refutation.
    Inconclusive,
    /// The premise does not hold under the model.
    PremiseFalse,
    /// A grid point where a universally read conclusion fails.
    Violated(String),
    /// The instance is malformed or could not be evaluated.
    Rejected(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BackwardReport {
    pub rule: RuleId,
    pub outcome: BackwardOutcome,
    /// Witness tuples, in the order of the rule's existential variables.
    pub witnesses: Vec<Vec<Rational>>,
    /// Grid points examined.
    pub examined: usize,
}

fn denominator(depth: u32) -> i64 {
    1i64 << depth.min(62)
}

/// Largest `k / 2^depth` in `(0,1)` certainly below `x`.
pub fn dyadic_below(x: &Real, depth: u32) -> Option<Rational> {
    let n = denominator(depth);
    let k: i64 = match x {
        Real::Exact(r) => ((r * Rational::from_integer(n.into())).ceil().to_integer() - 1u8).to_i64().unwrap_or(0),
        Real::Approx { value, err } => ((value - err) * n as f64).ceil() as i64 - 1,
    }
    .min(n - 1);
    (k >= 1).then(|| rat(k, n))
}

/// Smallest `k / 2^depth` in `(0,1)` certainly above `x`.
pub fn dyadic_above(x: &Real, depth: u32) -> Option<Rational> {
    let n = denominator(depth);
    let k: i64 = match x {
        Real::Exact(r) => ((r * Rational::from_integer(n.into())).floor().to_integer() + 1u8).to_i64().unwrap_or(n),
        Real::Approx { value, err } => ((value + err) * n as f64).floor() as i64 + 1,
    }
    .max(1);
    (k < n).then(|| rat(k, n))
}

fn report(rule: RuleId, outcome: BackwardOutcome, witnesses: Vec<Vec<Rational>>, examined: usize) -> BackwardReport {
    BackwardReport { rule, outcome, witnesses, examined }
}

/// Searches dyadic witnesses at resolution `2^-grid_depth` for the
/// existential conclusion of a backward rule. `L2` and `U2` carry a free
/// threshold `p`; it is read universally over the grid.
pub fn check_backward(inst: &RuleInstance, model: &Model, grid_depth: u32) -> BackwardReport {
    let rule = inst.rule;
    match backward(inst, model, grid_depth) {
        Ok(r) => r,
        Err(e) => report(rule, BackwardOutcome::Rejected(e.to_string()), vec![], 0),
    }
}

fn backward(inst: &RuleInstance, model: &Model, depth: u32) -> Result<BackwardReport> {
    let rule = inst.rule;
    if !rule.is_backward() {
        return Err(schema(rule, "not an existential rule"));
    }
    let c = core(&inst.premises);
    let [premise] = c.as_slice() else {
        return Err(schema(rule, "expected a single threshold premise"));
    };
    for side in inst.premises.iter().filter(|j| j.is_side_condition()) {
        if !holds(model, side)? {
            return Ok(report(rule, BackwardOutcome::PremiseFalse, vec![], 0));
        }
    }
    if !holds(model, premise)? {
        return Ok(report(rule, BackwardOutcome::PremiseFalse, vec![], 0));
    }
    let found = |w: Vec<Rational>| Ok(report(rule, BackwardOutcome::Witnessed, vec![w], 1));
    let none = || Ok(report(rule, BackwardOutcome::Inconclusive, vec![], 1));
    match (rule, *premise) {
        (RuleId::L2, Judgment::Cminus { v, o, p }) | (RuleId::U2, Judgment::Cplus { v, o, q: p }) => {
            let s = model.valuation()?;
            let out = s.eval(o.outer())?;
            let target = if rule == RuleId::L2 { v.inner() } else { v.outer() };
            let inside = s.eval(&target.intersect(o.inner())?)?;
            let n = denominator(depth);
            let mut witnesses = Vec::new();
            let mut unsure = false;
            for k in 1..n {
                let p2 = rat(k, n);
                let scaled = if rule == RuleId::L2 {
                    p * (Rational::one() - &p2)
                } else {
                    (Rational::one() - p) * (Rational::one() - &p2)
                };
                let first = strictly_below(&exact(&p2), out.real());
                let second = strictly_below(&exact(&scaled), inside.real());
                match (first, second) {
                    (Ok(true), _) | (_, Ok(true)) => {
                        if witnesses.len() < 8 {
                            witnesses.push(vec![p2, scaled]);
                        }
                    }
                    (Ok(false), Ok(false)) => {
                        return Ok(report(
                            rule,
                            BackwardOutcome::Violated(format!("disjunction fails at p = {}", format_rational(&p2))),
                            witnesses,
                            k as usize,
                        ))
                    }
                    _ => unsure = true,
                }
            }
            let outcome = if unsure { BackwardOutcome::Inconclusive } else { BackwardOutcome::Witnessed };
            Ok(report(rule, outcome, witnesses, (n - 1) as usize))
        }
        (RuleId::B2, Judgment::Bminus { h, e, p }) | (RuleId::B4, Judgment::Bplus { h, e, q: p }) => {
            let a = model.assessment(h, e)?;
            let lower = rule == RuleId::B2;
            let picks = if lower {
                (
                    dyadic_below(a.prior.lo().real(), depth),
                    dyadic_below(a.likelihood.lo().real(), depth),
                    dyadic_above(a.alt_likelihood.hi().real(), depth),
                )
            } else {
                (
                    dyadic_above(a.prior.hi().real(), depth),
                    dyadic_above(a.likelihood.hi().real(), depth),
                    dyadic_below(a.alt_likelihood.lo().real(), depth),
                )
            };
            let (Some(x), Some(y), Some(z)) = picks else {
                return none();
            };
            let t = bayes_threshold(rule, &x, &y, &z)?;
            let inst = if lower {
                RuleInstance::b1(h, e, x.clone(), y.clone(), z.clone())
            } else {
                RuleInstance::b3(h, e, x.clone(), y.clone(), z.clone())
            };
            let good = if lower { p < &t } else { &t < p };
            if good && all_hold(model, &inst.premises)? {
                found(vec![x, y, z])
            } else {
                none()
            }
        }
        (RuleId::CI6, Judgment::Cminus { v: prod, o, p })
        | (RuleId::SI10, Judgment::Cplus { v: prod, o, q: p }) => {
            let (u, v, w) = independence_context(rule, &inst.premises)?;
            expect_same(rule, prod, u.tensor(&v)?.cylinder(), "premise must be about U ⊗ V")?;
            expect_same(rule, o, w.cylinder(), "premise must condition on W")?;
            let s = model.valuation()?;
            let (a, b) = (conditional_interval(s, &u, &w)?, conditional_interval(s, &v, &w)?);
            let lower = rule == RuleId::CI6;
            let picks = if lower {
                (dyadic_below(a.lo().real(), depth), dyadic_below(b.lo().real(), depth))
            } else {
                (dyadic_above(a.hi().real(), depth), dyadic_above(b.hi().real(), depth))
            };
            let (Some(x), Some(y)) = picks else {
                return none();
            };
            let good = if lower { p < &(&x * &y) } else { &(&x * &y) < p };
            if good {
                found(vec![x, y])
            } else {
                none()
            }
        }
        (RuleId::CI8, Judgment::CplusFrechet { u, v, w, q }) => {
            let s = model.valuation()?;
            let (a, b) = (conditional_interval(s, u, w)?, conditional_interval(s, v, w)?);
            let (Some(x), Some(y)) = (dyadic_above(a.hi().real(), depth), dyadic_above(b.hi().real(), depth)) else {
                return none();
            };
            if x.clone().min(y.clone()) < *q {
                found(vec![x, y])
            } else {
                none()
            }
        }
        (RuleId::AX4, Judgment::G { set, p }) => {
            let s = model.valuation()?;
            let Some(p2) = dyadic_above(&exact(p), depth) else {
                return none();
            };
            for m in 1..=depth {
                let eps = rat(1, denominator(m));
                let inner = set.shrink(&eps);
                if inner.way_below(set)? && strictly_below(&exact(&p2), s.eval(&inner)?.real()).unwrap_or(false) {
                    return Ok(report(rule, BackwardOutcome::Witnessed, vec![vec![eps, p2]], m as usize));
                }
            }
            Ok(report(rule, BackwardOutcome::Inconclusive, vec![], depth as usize))
        }
        _ => Err(schema(rule, "premise has the wrong kind")),
    }
}

fn all_hold(model: &Model, js: &[Judgment]) -> Result<bool> {
    for j in js {
        if !holds(model, j)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A deliberately altered conclusion threshold for one forward rule, used to
/// check that the sweep detects unsound rules.
#[derive(Clone, Copy, Debug)]
pub struct Corruption {
    pub rule: RuleId,
    /// Conclusion threshold from the premise thresholds.
    pub threshold: fn(&[Rational]) -> Rational,
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub instances: usize,
    pub seed: u64,
    /// Resolution of backward-rule witness searches.
    pub grid_depth: u32,
    pub corruption: Option<Corruption>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { instances: 200, seed: 7, grid_depth: 8, corruption: None }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RuleSweep {
    pub rule: Option<RuleId>,
    pub instances: usize,
    /// Instances whose premises held and whose conclusion was checked.
    pub checked: usize,
    /// Instances whose premises failed.
    pub vacuous: usize,
    /// Comparisons inside an error band, skipped.
    pub indeterminate: usize,
    /// Witness searches that ran out of grid.
    pub inconclusive: usize,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepReport {
    pub rules: Vec<RuleSweep>,
}

impl SweepReport {
    pub fn violations(&self) -> usize {
        self.rules.iter().map(|r| r.violations.len()).sum()
    }
}

enum Verdict {
    Checked,
    Vacuous,
    Indeterminate,
    Inconclusive,
    Violation(String),
}

/// Random premise instantiations of each rule under `model`, keeping those
/// whose premises hold and checking the conclusion (forward rules) or the
/// witness search (backward rules).
///
/// Random events are drawn on one-dimensional cube or discrete spaces; the
/// independence rules use the three-fold product of the model's valuation.
pub fn soundness_sweep(model: &Model, rules: &[RuleId], config: &SweepConfig) -> Result<SweepReport> {
    let mut out = SweepReport::default();
    for &rule in rules {
        let verdicts: Vec<Verdict> = (0..config.instances)
            .into_par_iter()
            .map(|i| {
                let mut rng = StdRng::seed_from_u64(config.seed.wrapping_mul(0x9e37_79b9).wrapping_add(i as u64 * 1013 + rule as u64));
                run_instance(model, rule, config, &mut rng)
            })
            .collect::<Result<_>>()?;
        let mut r = RuleSweep { rule: Some(rule), instances: config.instances, ..Default::default() };
        for v in verdicts {
            match v {
                Verdict::Checked => r.checked += 1,
                Verdict::Vacuous => r.vacuous += 1,
                Verdict::Indeterminate => r.indeterminate += 1,
                Verdict::Inconclusive => r.inconclusive += 1,
                Verdict::Violation(msg) => {
                    r.checked += 1;
                    r.violations.push(msg);
                }
            }
        }
        out.rules.push(r);
    }
    Ok(out)
}

/// Maps evaluation failures that make an instance unusable to verdicts.
fn settle(r: Result<Verdict>) -> Result<Verdict> {
    match r {
        Err(Error::Indeterminate(_)) => Ok(Verdict::Indeterminate),
        Err(Error::PositivityViolation(_) | Error::CeViolation(_) | Error::DegenerateDenominator(_)) => {
            Ok(Verdict::Vacuous)
        }
        other => other,
    }
}

fn run_instance(model: &Model, rule: RuleId, config: &SweepConfig, rng: &mut StdRng) -> Result<Verdict> {
    settle((|| {
        let Some((inst, joint_model)) = generate(model, rule, rng)? else {
            return Ok(Verdict::Vacuous);
        };
        let m = joint_model.as_ref().unwrap_or(model);
        if rule.is_backward() {
            let r = check_backward(&inst, m, config.grid_depth);
            return Ok(match r.outcome {
                BackwardOutcome::Witnessed => Verdict::Checked,
                BackwardOutcome::Inconclusive => Verdict::Inconclusive,
                BackwardOutcome::PremiseFalse => Verdict::Vacuous,
                BackwardOutcome::Violated(msg) => Verdict::Violation(format!("{rule}: {msg}")),
                BackwardOutcome::Rejected(msg) if msg.contains("indeterminate") => Verdict::Indeterminate,
                BackwardOutcome::Rejected(msg) => return Err(Error::InvalidArgument(msg)),
            });
        }
        if !all_hold(m, &inst.premises)? {
            return Ok(Verdict::Vacuous);
        }
        let mut conclusion = apply_forward(&inst)?;
        if let Some(c) = config.corruption.filter(|c| c.rule == rule) {
            conclusion = conclusion.with_threshold((c.threshold)(&inst.thresholds()));
        }
        Ok(if holds(m, &conclusion)? {
            Verdict::Checked
        } else {
            Verdict::Violation(format!("{rule}: premises hold but {conclusion} fails"))
        })
    })())
}

/// A rational in `(0, x)`, or `None` when `x` is not certainly positive.
fn below(rng: &mut StdRng, x: &Real) -> Option<Rational> {
    let u = rat(rng.gen_range(1..64), 64);
    let r = match x {
        Real::Exact(r) => r * u,
        Real::Approx { value, .. } => rational_from_f64(value * rational_to_f64(&u))?,
    };
    (r > Rational::zero() && x.compare(&Real::Exact(r.clone())) == Comparison::Greater).then_some(r)
}

/// A rational in `(x, 1)`, or `None` when `x` is not certainly below 1.
fn above(rng: &mut StdRng, x: &Real) -> Option<Rational> {
    let u = rat(rng.gen_range(1..64), 64);
    let gap = &Real::one() - x;
    let r = match &gap {
        Real::Exact(g) => Rational::one() - g * u,
        Real::Approx { value, .. } => Rational::one() - rational_from_f64(value * rational_to_f64(&u))?,
    };
    (r < Rational::one() && x.compare(&Real::Exact(r.clone())) == Comparison::Less).then_some(r)
}

fn rational_to_f64(r: &Rational) -> f64 {
    crate::interval::rational_to_f64(r)
}

/// A random open set on a one-dimensional cube or discrete space.
pub fn random_open(rng: &mut StdRng, space: &SpaceDescriptor) -> Result<OpenSet> {
    match space {
        SpaceDescriptor::Cube { dim: 1 } => {
            let pieces = rng.gen_range(1..=2);
            let mut parts = Vec::new();
            for _ in 0..pieces {
                let a = rng.gen_range(0..20);
                let b = rng.gen_range(a + 1..=20);
                parts.push((rat(a, 20), rat(b, 20)));
            }
            OpenSet::intervals(parts)
        }
        SpaceDescriptor::Discrete { .. } => {
            let n = space.size().unwrap_or(0);
            let points: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
            OpenSet::discrete(space, points)
        }
        _ => Err(Error::InvalidArgument(format!("random events are drawn on one-dimensional spaces, not {space}"))),
    }
}

/// A random event pair.
pub fn random_event(rng: &mut StdRng, space: &SpaceDescriptor) -> Result<EventPair> {
    let o1 = random_open(rng, space)?;
    let room = o1.closure().open_interior_of_complement();
    let o2 = random_open(rng, space)?.intersect(&room)?;
    EventPair::new(o1, o2)
}

/// A random event whose two opens exhaust the space up to the boundary of the first.
pub fn random_classical_event(rng: &mut StdRng, space: &SpaceDescriptor) -> Result<EventPair> {
    let o1 = random_open(rng, space)?;
    let o2 = o1.closure().open_interior_of_complement();
    EventPair::new(o1, o2)
}

type Generated = Option<(RuleInstance, Option<Model>)>;

fn generate(model: &Model, rule: RuleId, rng: &mut StdRng) -> Result<Generated> {
    macro_rules! some {
        ($e:expr) => {
            match $e {
                Some(x) => x,
                None => return Ok(None),
            }
        };
    }
    let plain = |inst: RuleInstance| Ok(Some((inst, None)));
    match rule {
        RuleId::L1 | RuleId::L2 | RuleId::U1 | RuleId::U2 => {
            let s = model.valuation()?;
            let (v, o) = (random_event(rng, s.space())?, random_event(rng, s.space())?);
            match rule {
                RuleId::L1 | RuleId::U1 => {
                    let target = if rule == RuleId::L1 { v.inner() } else { v.outer() };
                    let p1 = some!(below(rng, s.eval(&target.intersect(o.inner())?)?.real()));
                    let p2 = some!(below(rng, s.eval(o.outer())?.real()));
                    if rule == RuleId::L1 {
                        plain(RuleInstance::l1(&v, &o, p1, p2)?)
                    } else {
                        plain(RuleInstance::u1(&v, &o, p1, p2)?)
                    }
                }
                _ => {
                    let c = model.conditional(&v, &o)?;
                    let j = if rule == RuleId::L2 {
                        Judgment::Cminus { p: some!(below(rng, c.lo().real())), v, o }
                    } else {
                        Judgment::Cplus { q: some!(above(rng, c.hi().real())), v, o }
                    };
                    plain(RuleInstance::new(rule, vec![j], None))
                }
            }
        }
        RuleId::B1 | RuleId::B2 | RuleId::B3 | RuleId::B4 => {
            let (h, e) = match model {
                Model::Assessment { h, e, .. } => (h.clone(), e.clone()),
                Model::Valuation(s) => (random_event(rng, s.space())?, random_event(rng, s.space())?),
            };
            let a = model.assessment(&h, &e)?;
            let inst = match rule {
                RuleId::B1 => RuleInstance::b1(
                    &h,
                    &e,
                    some!(below(rng, a.prior.lo().real())),
                    some!(below(rng, a.likelihood.lo().real())),
                    some!(above(rng, a.alt_likelihood.hi().real())),
                ),
                RuleId::B3 => RuleInstance::b3(
                    &h,
                    &e,
                    some!(above(rng, a.prior.hi().real())),
                    some!(above(rng, a.likelihood.hi().real())),
                    some!(below(rng, a.alt_likelihood.lo().real())),
                ),
                RuleId::B2 => {
                    let post = bayes_from_assessment(&a)?;
                    let p = some!(below(rng, post.lo().real()));
                    RuleInstance::new(rule, vec![Judgment::Bminus { h, e, p }], None)
                }
                _ => {
                    let post = bayes_from_assessment(&a)?;
                    let q = some!(above(rng, post.hi().real()));
                    RuleInstance::new(rule, vec![Judgment::Bplus { h, e, q }], None)
                }
            };
            plain(inst)
        }
        RuleId::CI5 | RuleId::CI6 | RuleId::CI7 | RuleId::CI8 | RuleId::SI9 | RuleId::SI10 => {
            let s = model.valuation()?;
            let fs = FactorSpace::power(s.space(), 3)?;
            let joint = Valuation::product(vec![s.clone(), s.clone(), s.clone()])?;
            let u = FactorEvent::on(&fs, 0, &random_event(rng, s.space())?)?;
            let v = FactorEvent::on(&fs, 1, &random_event(rng, s.space())?)?;
            let w = FactorEvent::on(&fs, 2, &random_classical_event(rng, s.space())?)?;
            let a = conditional_interval(&joint, &u, &w)?;
            let b = conditional_interval(&joint, &v, &w)?;
            let sides = independence_sides(rule, &u, &v, &w);
            let inst = match rule {
                RuleId::CI5 => RuleInstance::independence(
                    rule,
                    &u,
                    &v,
                    &w,
                    some!(below(rng, a.lo().real())),
                    some!(below(rng, b.lo().real())),
                ),
                RuleId::CI7 | RuleId::SI9 => RuleInstance::independence(
                    rule,
                    &u,
                    &v,
                    &w,
                    some!(above(rng, a.hi().real())),
                    some!(above(rng, b.hi().real())),
                ),
                RuleId::CI6 | RuleId::SI10 => {
                    let q = CIQuery::new(joint.clone(), u.clone(), v.clone(), w.clone())?;
                    let c = crate::independence::conditional_product_interval(&q)?;
                    let prod = u.tensor(&v)?.cylinder().clone();
                    let j = if rule == RuleId::CI6 {
                        Judgment::Cminus { v: prod, o: w.cylinder().clone(), p: some!(below(rng, c.lo().real())) }
                    } else {
                        Judgment::Cplus { v: prod, o: w.cylinder().clone(), q: some!(above(rng, c.hi().real())) }
                    };
                    RuleInstance::new(rule, sides.into_iter().chain([j]).collect(), None)
                }
                _ => {
                    let m = a.hi().real().min(b.hi().real());
                    let q = some!(above(rng, &m));
                    let j = Judgment::CplusFrechet { u: u.clone(), v: v.clone(), w: w.clone(), q };
                    RuleInstance::new(rule, sides.into_iter().chain([j]).collect(), None)
                }
            };
            Ok(Some((inst, Some(Model::Valuation(joint)))))
        }
        RuleId::AX1 | RuleId::AX2 => {
            let s = model.valuation()?;
            let p = rat(rng.gen_range(1..64), 64);
            if rule == RuleId::AX1 {
                let conclusion = Judgment::G { set: OpenSet::full(s.space()), p };
                plain(RuleInstance::new(rule, vec![], Some(conclusion)))
            } else {
                plain(RuleInstance::new(rule, vec![Judgment::G { set: OpenSet::empty(s.space()), p }], None))
            }
        }
        RuleId::AX3 | RuleId::AX4 => {
            let s = model.valuation()?;
            let v = random_open(rng, s.space())?;
            let p = some!(below(rng, s.eval(&v)?.real()));
            let premise = Judgment::G { set: v.clone(), p: p.clone() };
            if rule == RuleId::AX4 {
                return plain(RuleInstance::new(rule, vec![premise], None));
            }
            let bigger = v.union(&random_open(rng, s.space())?)?;
            let p2 = p * rat(rng.gen_range(1..=64), 64);
            plain(RuleInstance::new(rule, vec![premise], Some(Judgment::G { set: bigger, p: p2 })))
        }
        RuleId::AX5 | RuleId::AX6 => {
            let s = model.valuation()?;
            let (u, v) = (random_open(rng, s.space())?, random_open(rng, s.space())?);
            let (join, meet) = (u.union(&v)?, u.intersect(&v)?);
            let (first, second, targets) = if rule == RuleId::AX5 {
                (u.clone(), v.clone(), (join, meet))
            } else {
                (join, meet, (u, v))
            };
            let p = some!(below(rng, s.eval(&first)?.real()));
            let q = some!(below(rng, s.eval(&second)?.real()));
            let t = rat(rng.gen_range(1..64), 64);
            let total = &p + &q;
            let p2 = &total * &t;
            let q2 = total - &p2;
            let conclusion = Judgment::Any(vec![
                Judgment::G { set: targets.0, p: p2 },
                Judgment::G { set: targets.1, p: q2 },
            ]);
            plain(RuleInstance::new(
                rule,
                vec![Judgment::G { set: first, p }, Judgment::G { set: second, p: q }],
                Some(conclusion),
            ))
        }
    }
}

/// Largest grid point where `accept` holds, assuming it holds on a prefix.
fn last_accepted(n: i64, accept: impl Fn(&Rational) -> Result<bool>) -> Result<Option<i64>> {
    let (mut lo, mut hi) = (0i64, n);
    // invariant: accept(k/n) for k ≤ lo (vacuously at 0), rejects at hi
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if accept(&rat(mid, n))? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo > 0).then_some(lo))
}

/// First grid point where `accept` holds, assuming it holds on a suffix.
fn first_accepted(n: i64, accept: impl Fn(&Rational) -> Result<bool>) -> Result<Option<i64>> {
    let (mut lo, mut hi) = (0i64, n);
    // invariant: rejects at lo, accepts for k ≥ hi (vacuously at n)
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if accept(&rat(mid, n))? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((hi < n).then_some(hi))
}

/// `(sup{p : C⁻(V,O;p)}, inf{q : C⁺(V,O;q)})` over the dyadic grid of the
/// given depth. Both lie within `2^-grid_depth` of the endpoints of
/// `C(σ, V, O)`.
pub fn completeness_approx(
    model: &Model,
    v: &EventPair,
    o: &EventPair,
    grid_depth: u32,
) -> Result<(Rational, Rational)> {
    model.conditional(v, o)?;
    let n = denominator(grid_depth);
    let sup = last_accepted(n, |p| holds(model, &Judgment::Cminus { v: v.clone(), o: o.clone(), p: p.clone() }))?;
    let inf = first_accepted(n, |q| holds(model, &Judgment::Cplus { v: v.clone(), o: o.clone(), q: q.clone() }))?;
    Ok((sup.map_or_else(Rational::zero, |k| rat(k, n)), inf.map_or_else(Rational::one, |k| rat(k, n))))
}

/// The same approximation for the interval posterior through `B⁻` and `B⁺`.
pub fn completeness_approx_bayes(
    model: &Model,
    h: &EventPair,
    e: &EventPair,
    grid_depth: u32,
) -> Result<(Rational, Rational)> {
    model.posterior(h, e)?;
    let n = denominator(grid_depth);
    let sup = last_accepted(n, |p| holds(model, &Judgment::Bminus { h: h.clone(), e: e.clone(), p: p.clone() }))?;
    let inf = first_accepted(n, |q| holds(model, &Judgment::Bplus { h: h.clone(), e: e.clone(), q: q.clone() }))?;
    Ok((sup.map_or_else(Rational::zero, |k| rat(k, n)), inf.map_or_else(Rational::one, |k| rat(k, n))))
}

/// The point itself as a degenerate interval, for reporting.
pub fn point(r: &Rational) -> ProbInterval {
    ProbInterval::point(UnitValue::exact(r.clone()).expect("grid point in [0,1]"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::ProbInterval;

    fn iv(a: (i64, i64), b: (i64, i64)) -> OpenSet {
        OpenSet::interval(rat(a.0, a.1), rat(b.0, b.1)).unwrap()
    }

    type Ratio = (i64, i64);

    fn ivs(parts: &[(Ratio, Ratio)]) -> OpenSet {
        OpenSet::intervals(parts.iter().map(|(a, b)| (rat(a.0, a.1), rat(b.0, b.1))).collect()).unwrap()
    }

    fn lebesgue() -> Model {
        Model::Valuation(Valuation::lebesgue(1).unwrap())
    }

    /// `H` and `E` of the worked conditioning example.
    fn example() -> (EventPair, EventPair) {
        let h = EventPair::new(iv((8, 10), (85, 100)), ivs(&[((0, 1), (7, 10)), ((95, 100), (1, 1))])).unwrap();
        let e = EventPair::new(iv((6, 10), (1, 1)), iv((1, 10), (6, 10))).unwrap();
        (h, e)
    }

    pub(crate) fn medical() -> Model {
        let s = SpaceDescriptor::discrete(2).unwrap();
        let h = EventPair::new(OpenSet::discrete(&s, [1]).unwrap(), OpenSet::discrete(&s, [0]).unwrap()).unwrap();
        let e = EventPair::new(OpenSet::discrete(&s, [1]).unwrap(), OpenSet::empty(&s)).unwrap();
        let pi = |a: (i64, i64), b: (i64, i64)| ProbInterval::exact(rat(a.0, a.1), rat(b.0, b.1)).unwrap();
        Model::Assessment {
            h,
            e,
            assessment: BayesAssessment::new(pi((1, 100), (5, 100)), pi((85, 100), (95, 100)), pi((1, 100), (10, 100))),
        }
    }

    fn roles(m: &Model) -> (EventPair, EventPair) {
        match m {
            Model::Assessment { h, e, .. } => (h.clone(), e.clone()),
            _ => unreachable!(),
        }
    }

    #[test]
    fn judgments_are_strict() {
        let m = lebesgue();
        assert!(holds(&m, &Judgment::G { set: iv((0, 1), (1, 2)), p: rat(4, 10) }).unwrap());
        assert!(!holds(&m, &Judgment::G { set: iv((0, 1), (1, 2)), p: rat(1, 2) }).unwrap());
        let (h, e) = example();
        assert!(holds(&m, &Judgment::Cminus { v: h.clone(), o: e.clone(), p: rat(9, 100) }).unwrap());
        assert!(!holds(&m, &Judgment::Cminus { v: h, o: e, p: rat(1, 10) }).unwrap());
        let med = medical();
        let (h, e) = roles(&med);
        assert!(holds(&med, &Judgment::Bminus { h: h.clone(), e: e.clone(), p: rat(79, 1000) }).unwrap());
        assert!(!holds(&med, &Judgment::Bminus { h, e, p: rat(80, 1000) }).unwrap());
    }

    #[test]
    fn forward_rules_compute_thresholds() {
        let (h, e) = example();
        let l1 = RuleInstance::l1(&h, &e, rat(9, 100), rat(1, 2)).unwrap();
        assert_eq!(apply_forward(&l1).unwrap().threshold(), Some(&rat(18, 100)));
        let (h, e) = roles(&medical());
        let b1 = RuleInstance::b1(&h, &e, rat(1, 100), rat(85, 100), rat(10, 100));
        let c = apply_forward(&b1).unwrap();
        assert_eq!(c.kind(), "B-");
        assert_eq!(c.threshold(), Some(&rat(17, 215)));
        assert!(matches!(check_backward(&b1, &medical(), 4).outcome, BackwardOutcome::Rejected(_)));
    }

    #[test]
    fn frechet_rule_takes_the_minimum() {
        let fs = FactorSpace::power(&SpaceDescriptor::unit_interval(), 3).unwrap();
        let half = EventPair::new(iv((0, 1), (1, 2)), iv((1, 2), (1, 1))).unwrap();
        let u = FactorEvent::on(&fs, 0, &half).unwrap();
        let v = FactorEvent::on(&fs, 1, &half).unwrap();
        let w = FactorEvent::on(&fs, 2, &EventPair::certain(&SpaceDescriptor::unit_interval())).unwrap();
        let inst = RuleInstance::independence(RuleId::CI7, &u, &v, &w, rat(8, 10), rat(9, 10));
        assert_eq!(apply_forward(&inst).unwrap().threshold(), Some(&rat(8, 10)));
        let strong = RuleInstance::independence(RuleId::SI9, &u, &v, &w, rat(8, 10), rat(9, 10));
        assert_eq!(apply_forward(&strong).unwrap().threshold(), Some(&rat(72, 100)));
        let broken = RuleInstance::new(RuleId::CI7, inst.premises[2..].to_vec(), None);
        assert!(matches!(apply_forward(&broken), Err(Error::SchemaMismatch(_))));
    }

    #[test]
    fn witness_searches() {
        let m = lebesgue();
        let (h, e) = example();
        let l2 = RuleInstance::new(RuleId::L2, vec![Judgment::Cminus { v: h.clone(), o: e.clone(), p: rat(5, 100) }], None);
        assert_eq!(check_backward(&l2, &m, 8).outcome, BackwardOutcome::Witnessed);
        let at_endpoint = RuleInstance::new(RuleId::L2, vec![Judgment::Cminus { v: h, o: e, p: rat(1, 10) }], None);
        assert_eq!(check_backward(&at_endpoint, &m, 8).outcome, BackwardOutcome::PremiseFalse);
        let med = medical();
        let (h, e) = roles(&med);
        let b2 = RuleInstance::new(RuleId::B2, vec![Judgment::Bminus { h, e, p: rat(5, 100) }], None);
        let r = check_backward(&b2, &med, 8);
        assert_eq!(r.outcome, BackwardOutcome::Witnessed);
        assert_eq!(r.witnesses.len(), 1);
    }

    #[test]
    fn completeness_brackets_the_endpoints() {
        let m = lebesgue();
        let (h, e) = example();
        for depth in [6, 8, 10] {
            let (sup, inf) = completeness_approx(&m, &h, &e, depth).unwrap();
            let gap = rat(1, 1 << depth);
            assert!(sup < rat(1, 10) && rat(1, 10) - &sup <= gap);
            assert!(inf > rat(7, 10) && &inf - rat(7, 10) <= gap);
        }
        let med = medical();
        let (h, e) = roles(&med);
        let (sup, inf) = completeness_approx_bayes(&med, &h, &e, 12).unwrap();
        assert!(rat(17, 215) - &sup <= rat(1, 4096));
        assert!(&inf - rat(95, 114) <= rat(1, 4096));
    }

    #[test]
    fn sweeps_are_clean_and_catch_corruption() {
        let m = lebesgue();
        let config = SweepConfig { instances: 60, ..Default::default() };
        let r = soundness_sweep(&m, &RuleId::ALL, &config).unwrap();
        assert_eq!(r.violations(), 0, "{:?}", r.rules.iter().flat_map(|r| r.violations.clone()).collect::<Vec<_>>());
        // G(∅; p) never holds, so the second axiom is always vacuous
        assert!(r.rules.iter().filter(|s| s.rule != Some(RuleId::AX2)).all(|s| s.checked > 0));
        let bad = SweepConfig {
            corruption: Some(Corruption { rule: RuleId::L1, threshold: |t| &t[0] / &t[1] }),
            ..config
        };
        assert!(soundness_sweep(&m, &[RuleId::L1], &bad).unwrap().violations() > 0);
    }
}
