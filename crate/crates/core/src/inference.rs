//! Interval conditional probability and interval Bayesian updating for a
//! single valuation.

use crate::error::{Error, Result};
use crate::event::{event_probability, EventPair};
use crate::interval::{bayes_kernel_interval, Comparison, ProbInterval, Real, UnitValue};
use crate::space::{OpenSet, SpaceDescriptor};
use crate::valuation::Valuation;

/// Prior `[p_h, q_h]`, likelihood `[p_{e|h}, q_{e|h}]` and alternative
/// likelihood `[p_{e|¬h}, q_{e|¬h}]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BayesAssessment {
    pub prior: ProbInterval,
    pub likelihood: ProbInterval,
    pub alt_likelihood: ProbInterval,
}

impl BayesAssessment {
    pub fn new(prior: ProbInterval, likelihood: ProbInterval, alt_likelihood: ProbInterval) -> Self {
        BayesAssessment {
            prior,
            likelihood,
            alt_likelihood,
        }
    }

    /// Derives the three intervals from a valuation: `σ(H)`, `C(σ, E, H)` and
    /// `C(σ, E, ¬H)`.
    pub fn from_events(sigma: &Valuation, h: &EventPair, e: &EventPair) -> Result<Self> {
        let prior = event_probability(sigma, h)?;
        let likelihood = cond_prob(sigma, e, h).map_err(|err| name_condition(err, "H"))?;
        let alt_likelihood = cond_prob(sigma, e, &h.negate()).map_err(|err| name_condition(err, "¬H"))?;
        Ok(BayesAssessment::new(prior, likelihood, alt_likelihood))
    }
}

fn name_condition(err: Error, which: &str) -> Error {
    match err {
        Error::PositivityViolation(msg) => Error::PositivityViolation(format!("conditioning on {which}: {msg}")),
        other => other,
    }
}

/// `Pos(O)`: `σ(O1) > 0` beyond the error bound.
pub fn pos_check(sigma: &Valuation, o: &EventPair) -> Result<bool> {
    let m = sigma.eval(o.inner())?;
    match m.real().compare(&Real::zero()) {
        Comparison::Greater => Ok(true),
        Comparison::Indeterminate => Err(Error::Indeterminate(format!("σ(O1) = {m} against 0"))),
        _ => Ok(false),
    }
}

/// `CE(O)`: `σ(O1) + σ(O2) = 1` within the combined error bound.
pub fn ce_check(sigma: &Valuation, o: &EventPair) -> Result<bool> {
    let total = sigma.eval(o.inner())?.into_real() + sigma.eval(o.outer())?.into_real();
    Ok(matches!(
        total.compare(&Real::one()),
        Comparison::Equal | Comparison::Indeterminate
    ))
}

fn ratio(num: Real, den: &Real) -> Result<UnitValue> {
    let q = num
        .checked_div(den)
        .ok_or_else(|| Error::PositivityViolation("conditioning mass vanishes".into()))?;
    UnitValue::new(q)
}

/// `C(σ, V, O) = [σ(V1∩O1) / (1 − σ(O2)), 1 − σ(V2∩O1) / (1 − σ(O2))]`.
pub fn cond_prob(sigma: &Valuation, v: &EventPair, o: &EventPair) -> Result<ProbInterval> {
    sigma.space().ensure_same(v.space())?;
    if !pos_check(sigma, o)? {
        return Err(Error::PositivityViolation(format!("σ({}) = 0", o.inner())));
    }
    let den = sigma.eval(o.outer())?.complement().into_real();
    let inside = sigma.eval(&v.inner().intersect(o.inner())?)?.into_real();
    let outside = sigma.eval(&v.outer().intersect(o.inner())?)?.into_real();
    let lo = ratio(inside, &den)?;
    let hi = ratio(outside, &den)?.complement();
    ProbInterval::new(lo.clone(), hi.clone()).or_else(|err| {
        if sigma.is_exact() {
            Err(err)
        } else {
            ProbInterval::new(lo.clone(), UnitValue::new(lo.real().max(hi.real()))?)
        }
    })
}

/// Whether the open set `a` is a selection of the event: `V1 ⊆ a` and `a`
/// misses `V2`.
pub fn is_selection(v: &EventPair, a: &OpenSet) -> Result<bool> {
    Ok(v.inner().is_subset(a)? && a.is_disjoint(v.outer())?)
}

/// The point conditional `σ(A ∩ B) / σ(B)` for sets chosen as selections.
pub fn classical_conditional(sigma: &Valuation, a: &OpenSet, b: &OpenSet) -> Result<UnitValue> {
    let den = sigma.eval(b)?.into_real();
    if den.is_zero() {
        return Err(Error::PositivityViolation(format!("σ({b}) = 0")));
    }
    ratio(sigma.eval(&a.intersect(b)?)?.into_real(), &den)
}

/// Conditional probability of an event `u` on the first factor given an
/// event `v` on the second, under a joint valuation on the product:
/// `[σ(U1×V1) / (1 − σ(D1×V2)), 1 − σ(U2×V1) / (1 − σ(D1×V2))]`.
pub fn cond_prob_joint(sigma_joint: &Valuation, u: &EventPair, v: &EventPair) -> Result<ProbInterval> {
    let factors: Vec<SpaceDescriptor> = vec![u.space().clone(), v.space().clone()];
    factors[0].product(&factors[1])?.ensure_same(sigma_joint.space())?;
    cond_prob(sigma_joint, &u.cylinder(&factors, 0)?, &v.cylinder(&factors, 1)?)
}

/// Interval posterior `[f_b(p_h, p_{e|h}, q_{e|¬h}), f_b(q_h, q_{e|h}, p_{e|¬h})]`.
pub fn bayes_from_assessment(a: &BayesAssessment) -> Result<ProbInterval> {
    bayes_kernel_interval(&a.prior, &a.likelihood, &a.alt_likelihood)
}

/// Interval Bayes for hypothesis `h` and evidence `e` under `σ`, through the
/// assessment derived by [`BayesAssessment::from_events`].
pub fn bayes_update(sigma: &Valuation, h: &EventPair, e: &EventPair) -> Result<ProbInterval> {
    bayes_from_assessment(&BayesAssessment::from_events(sigma, h, e)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::{bayes_kernel, rat, Rational};

    fn iv(a: (i64, i64), b: (i64, i64)) -> OpenSet {
        OpenSet::interval(rat(a.0, a.1), rat(b.0, b.1)).unwrap()
    }

    type Ratio = (i64, i64);

    fn ivs(parts: &[(Ratio, Ratio)]) -> OpenSet {
        OpenSet::intervals(parts.iter().map(|(a, b)| (rat(a.0, a.1), rat(b.0, b.1))).collect()).unwrap()
    }

    fn exact(i: &ProbInterval) -> (Rational, Rational) {
        (i.lo().as_exact().unwrap().clone(), i.hi().as_exact().unwrap().clone())
    }

    fn pi(a: (i64, i64), b: (i64, i64)) -> ProbInterval {
        ProbInterval::exact(rat(a.0, a.1), rat(b.0, b.1)).unwrap()
    }

    fn example_h_e() -> (EventPair, EventPair) {
        let h = EventPair::new(iv((8, 10), (85, 100)), ivs(&[((0, 1), (7, 10)), ((95, 100), (1, 1))])).unwrap();
        let e = EventPair::new(iv((6, 10), (1, 1)), iv((1, 10), (6, 10))).unwrap();
        (h, e)
    }

    #[test]
    fn positivity() {
        let l = Valuation::lebesgue(1).unwrap();
        let (_, e) = example_h_e();
        assert!(pos_check(&l, &e).unwrap());
        assert!(!pos_check(&l, &EventPair::bottom(l.space())).unwrap());
        let b = Valuation::beta(2.0, 5.0).unwrap();
        let thin = EventPair::new(iv((999, 1000), (1, 1)), OpenSet::empty(b.space())).unwrap();
        assert!(pos_check(&b, &thin).unwrap());
    }

    #[test]
    fn classical_selection_lies_inside() {
        let l = Valuation::lebesgue(1).unwrap();
        let (h, e) = example_h_e();
        let a = iv((7, 10), (9, 10));
        let b = ivs(&[((0, 1), (1, 10)), ((6, 10), (1, 1))]);
        assert!(is_selection(&h, &a).unwrap() && is_selection(&e, &b).unwrap());
        let p = classical_conditional(&l, &a, &b).unwrap();
        assert_eq!(p.as_exact(), Some(&rat(2, 5)));
        assert_eq!(cond_prob(&l, &h, &e).unwrap().contains(p.real()), Some(true));
        assert!(!is_selection(&h, &iv((0, 1), (1, 1))).unwrap());
    }

    #[test]
    fn classical_events() {
        let l = Valuation::lebesgue(1).unwrap();
        let half = EventPair::new(iv((0, 1), (1, 2)), iv((1, 2), (1, 1))).unwrap();
        assert!(ce_check(&l, &half).unwrap());
        let gap = EventPair::new(iv((0, 1), (4, 10)), iv((6, 10), (1, 1))).unwrap();
        assert!(!ce_check(&l, &gap).unwrap());
    }

    #[test]
    fn conditional_of_the_worked_example() {
        let l = Valuation::lebesgue(1).unwrap();
        let (h, e) = example_h_e();
        let c = cond_prob(&l, &h, &e).unwrap();
        assert_eq!(exact(&c), (rat(1, 10), rat(7, 10)));
        // a classical selection between the inner opens and the outer complements
        let a = EventPair::new(iv((7, 10), (9, 10)), ivs(&[((0, 1), (7, 10)), ((9, 10), (1, 1))])).unwrap();
        let b = EventPair::new(ivs(&[((0, 1), (1, 10)), ((6, 10), (1, 1))]), iv((1, 10), (6, 10))).unwrap();
        let classical = cond_prob(&l, &a, &b).unwrap();
        assert_eq!(exact(&classical), (rat(2, 5), rat(2, 5)));
        assert_eq!(c.contains(classical.lo().real()), Some(true));
    }

    #[test]
    fn classical_conditioning_is_a_point() {
        let l = Valuation::lebesgue(1).unwrap();
        let v = EventPair::new(iv((0, 1), (1, 2)), iv((1, 2), (1, 1))).unwrap();
        let c = cond_prob(&l, &v, &EventPair::certain(l.space())).unwrap();
        assert_eq!(exact(&c), (rat(1, 2), rat(1, 2)));
        assert!(matches!(
            cond_prob(&l, &v, &EventPair::bottom(l.space())),
            Err(Error::PositivityViolation(_))
        ));
    }

    #[test]
    fn joint_conditioning() {
        let l2 = Valuation::lebesgue(2).unwrap();
        let s = SpaceDescriptor::unit_interval();
        let u = EventPair::new(iv((0, 1), (1, 2)), OpenSet::empty(&s)).unwrap();
        let v = EventPair::new(iv((0, 1), (1, 1)), OpenSet::empty(&s)).unwrap();
        assert_eq!(exact(&cond_prob_joint(&l2, &u, &v).unwrap()), (rat(1, 2), rat(1, 1)));
        let v0 = EventPair::bottom(&s);
        assert!(matches!(cond_prob_joint(&l2, &u, &v0), Err(Error::PositivityViolation(_))));
    }

    #[test]
    fn medical_assessment() {
        let a = BayesAssessment::new(pi((1, 100), (5, 100)), pi((85, 100), (95, 100)), pi((1, 100), (10, 100)));
        let r = bayes_from_assessment(&a).unwrap();
        assert_eq!(exact(&r), (rat(17, 215), rat(95, 114)));
        let point = BayesAssessment::new(pi((3, 100), (3, 100)), pi((9, 10), (9, 10)), pi((55, 1000), (55, 1000)));
        let r = bayes_from_assessment(&point).unwrap();
        let f = bayes_kernel(point.prior.lo(), point.likelihood.lo(), point.alt_likelihood.lo()).unwrap();
        assert_eq!(r, ProbInterval::point(f));
    }

    #[test]
    fn model_level_update_collapses_for_classical_events() {
        let l = Valuation::lebesgue(1).unwrap();
        let h = EventPair::new(iv((0, 1), (3, 10)), iv((3, 10), (1, 1))).unwrap();
        let e = EventPair::new(iv((2, 10), (1, 2)), ivs(&[((0, 1), (2, 10)), ((1, 2), (1, 1))])).unwrap();
        let r = bayes_update(&l, &h, &e).unwrap();
        // σ(H1 ∩ E1) / σ(E1) = 0.1 / 0.3
        assert_eq!(exact(&r), (rat(1, 3), rat(1, 3)));
    }

    #[test]
    fn update_names_the_failing_condition() {
        let l = Valuation::lebesgue(1).unwrap();
        let h = EventPair::certain(l.space());
        let e = EventPair::new(iv((0, 1), (1, 2)), OpenSet::empty(l.space())).unwrap();
        match bayes_update(&l, &h, &e) {
            Err(Error::PositivityViolation(msg)) => assert!(msg.contains("¬H")),
            other => panic!("{other:?}"),
        }
    }
}
