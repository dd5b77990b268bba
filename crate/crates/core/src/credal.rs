//! Credal sets given by finitely many vertex valuations, with lower and upper
//! envelopes of event probability, conditioning and Bayesian updating.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::event::EventPair;
use crate::inference::{cond_prob, BayesAssessment};
use crate::interval::{bayes_kernel, ProbInterval, Real, UnitValue};
use crate::space::SpaceDescriptor;
use crate::valuation::Valuation;

/// The convex hull of a nonempty list of valuations on one space.
#[derive(Clone, Debug, PartialEq)]
pub struct CredalSet {
    vertices: Vec<Valuation>,
}

impl CredalSet {
    pub fn new(vertices: Vec<Valuation>) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(Error::InvalidArgument("a credal set needs at least one vertex".into()));
        };
        for v in &vertices[1..] {
            first.space().ensure_same(v.space())?;
        }
        Ok(CredalSet { vertices })
    }

    pub fn singleton(sigma: Valuation) -> Self {
        CredalSet { vertices: vec![sigma] }
    }

    pub fn vertices(&self) -> &[Valuation] {
        &self.vertices
    }

    pub fn space(&self) -> &SpaceDescriptor {
        self.vertices[0].space()
    }
}

fn min_real(values: impl IntoIterator<Item = Real>) -> Real {
    values.into_iter().reduce(|a, b| a.min(&b)).expect("nonempty")
}

fn max_real(values: impl IntoIterator<Item = Real>) -> Real {
    values.into_iter().reduce(|a, b| a.max(&b)).expect("nonempty")
}

/// `[min_i σ_i(O1), 1 − min_i σ_i(O2)]`.
pub fn credal_event_probability(k: &CredalSet, e: &EventPair) -> Result<ProbInterval> {
    k.space().ensure_same(e.space())?;
    let masses: Vec<(Real, Real)> = k
        .vertices
        .par_iter()
        .map(|s| Ok((s.eval(e.inner())?.into_real(), s.eval(e.outer())?.into_real())))
        .collect::<Result<_>>()?;
    let lo = min_real(masses.iter().map(|m| m.0.clone()));
    let out = min_real(masses.iter().map(|m| m.1.clone()));
    ProbInterval::from_reals(lo, &Real::one() - &out)
}

/// Per-vertex conditional intervals `C(σ_i, V, O)`, in vertex order.
pub fn credal_conditional_table(k: &CredalSet, v: &EventPair, o: &EventPair) -> Result<Vec<ProbInterval>> {
    k.vertices
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            cond_prob(s, v, o).map_err(|err| match err {
                Error::PositivityViolation(msg) => Error::PositivityViolation(format!("vertex {i}: {msg}")),
                other => other,
            })
        })
        .collect()
}

/// `[min_i σ_i(V1∩O1)/(1−σ_i(O2)), 1 − min_i σ_i(V2∩O1)/(1−σ_i(O2))]`.
pub fn credal_conditional(k: &CredalSet, v: &EventPair, o: &EventPair) -> Result<ProbInterval> {
    let table = credal_conditional_table(k, v, o)?;
    envelope(&table)
}

/// `[min lo, max hi]` over a nonempty list of intervals.
pub fn envelope(intervals: &[ProbInterval]) -> Result<ProbInterval> {
    if intervals.is_empty() {
        return Err(Error::InvalidArgument("envelope of no intervals".into()));
    }
    let lo = min_real(intervals.iter().map(|i| i.lo().real().clone()));
    let hi = max_real(intervals.iter().map(|i| i.hi().real().clone()));
    ProbInterval::from_reals(lo, hi)
}

/// Credal Bayes over per-vertex assessments:
/// `[min_i f_b(p_h, p_{e|h}, q_{e|¬h}), max_i f_b(q_h, q_{e|h}, p_{e|¬h})]`.
pub fn credal_bayes_assessments(assessments: &[BayesAssessment]) -> Result<ProbInterval> {
    if assessments.is_empty() {
        return Err(Error::InvalidArgument("credal Bayes needs at least one vertex".into()));
    }
    let corners: Vec<(UnitValue, UnitValue)> = assessments
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            let tag = |err: Error| match err {
                Error::DegenerateDenominator(msg) => Error::DegenerateDenominator(format!("{msg} (vertex {i})")),
                other => other,
            };
            let lo = bayes_kernel(a.prior.lo(), a.likelihood.lo(), a.alt_likelihood.hi()).map_err(tag)?;
            let hi = bayes_kernel(a.prior.hi(), a.likelihood.hi(), a.alt_likelihood.lo()).map_err(tag)?;
            Ok((lo, hi))
        })
        .collect::<Result<_>>()?;
    let lo = min_real(corners.iter().map(|c| c.0.real().clone()));
    let hi = max_real(corners.iter().map(|c| c.1.real().clone()));
    ProbInterval::from_reals(lo, hi)
}

/// Credal Bayes with priors `σ_i(H)` taken from the vertices and the
/// conditional intervals supplied per vertex.
pub fn credal_bayes(
    k: &CredalSet,
    h: &EventPair,
    e_given_h: &[ProbInterval],
    e_given_not_h: &[ProbInterval],
) -> Result<ProbInterval> {
    let n = k.vertices.len();
    if e_given_h.len() != n || e_given_not_h.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{n} vertices need {n} likelihood intervals of each kind"
        )));
    }
    let assessments: Vec<BayesAssessment> = k
        .vertices
        .iter()
        .zip(e_given_h.iter().zip(e_given_not_h))
        .map(|(s, (l, a))| Ok(BayesAssessment::new(crate::event::event_probability(s, h)?, l.clone(), a.clone())))
        .collect::<Result<_>>()?;
    credal_bayes_assessments(&assessments)
}

/// Credal Bayes where every vertex derives its own assessment from `h` and `e`.
pub fn credal_bayes_events(k: &CredalSet, h: &EventPair, e: &EventPair) -> Result<ProbInterval> {
    let assessments: Vec<BayesAssessment> = k
        .vertices
        .par_iter()
        .map(|s| BayesAssessment::from_events(s, h, e))
        .collect::<Result<_>>()?;
    credal_bayes_assessments(&assessments)
}
