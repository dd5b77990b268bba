//! The event domain: disjoint pairs `(O1, O2)` of open sets, read as
//! "certainly inside" and "certainly outside", and its dual of covering pairs
//! of closed sets.

use std::fmt;

use crate::error::{Error, Result};
use crate::interval::{ProbInterval, UnitValue};
use crate::space::{ClosedSet, OpenSet, SpaceDescriptor};
use crate::valuation::Valuation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventPair {
    o1: OpenSet,
    o2: OpenSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedEventPair {
    c1: ClosedSet,
    c2: ClosedSet,
}

impl EventPair {
    pub fn new(o1: OpenSet, o2: OpenSet) -> Result<Self> {
        o1.space().ensure_same(o2.space())?;
        if !o1.is_disjoint(&o2)? {
            return Err(Error::NotDisjoint);
        }
        Ok(EventPair { o1, o2 })
    }

    /// `(∅, ∅)`, the event about which nothing is known.
    pub fn bottom(space: &SpaceDescriptor) -> Self {
        EventPair {
            o1: OpenSet::empty(space),
            o2: OpenSet::empty(space),
        }
    }

    /// `(D, ∅)`, the certain event.
    pub fn certain(space: &SpaceDescriptor) -> Self {
        EventPair {
            o1: OpenSet::full(space),
            o2: OpenSet::empty(space),
        }
    }

    /// `(∅, D)`, the impossible event.
    pub fn impossible(space: &SpaceDescriptor) -> Self {
        Self::certain(space).negate()
    }

    pub fn inner(&self) -> &OpenSet {
        &self.o1
    }

    pub fn outer(&self) -> &OpenSet {
        &self.o2
    }

    pub fn space(&self) -> &SpaceDescriptor {
        self.o1.space()
    }

    /// `(O1 ∩ O1', O2 ∪ O2')`.
    pub fn intersect(&self, other: &EventPair) -> Result<EventPair> {
        Ok(EventPair {
            o1: self.o1.intersect(&other.o1)?,
            o2: self.o2.union(&other.o2)?,
        })
    }

    /// `(O1 ∪ O1', O2 ∩ O2')`.
    pub fn union(&self, other: &EventPair) -> Result<EventPair> {
        Ok(EventPair {
            o1: self.o1.union(&other.o1)?,
            o2: self.o2.intersect(&other.o2)?,
        })
    }

    /// Component-wise inclusion: `self` carries less information than `other`.
    pub fn leq(&self, other: &EventPair) -> Result<bool> {
        Ok(self.o1.is_subset(&other.o1)? && self.o2.is_subset(&other.o2)?)
    }

    /// `¬(O1, O2) = (O2, O1)`.
    pub fn negate(&self) -> EventPair {
        EventPair {
            o1: self.o2.clone(),
            o2: self.o1.clone(),
        }
    }

    /// Least upper bound in the information order; exists iff the joined
    /// components stay disjoint.
    pub fn join(&self, other: &EventPair) -> Result<EventPair> {
        let o1 = self.o1.union(&other.o1)?;
        let o2 = self.o2.union(&other.o2)?;
        if !o1.is_disjoint(&o2)? {
            return Err(Error::NoUpperBound);
        }
        Ok(EventPair { o1, o2 })
    }

    /// `(O2^c, O1^c)`; covers the space because `O1` and `O2` are disjoint.
    pub fn to_dual(&self) -> ClosedEventPair {
        ClosedEventPair {
            c1: self.o2.closed_complement(),
            c2: self.o1.closed_complement(),
        }
    }

    /// Embeds an event on factor `position` of a product into the product.
    pub fn cylinder(&self, factors: &[SpaceDescriptor], position: usize) -> Result<EventPair> {
        Ok(EventPair {
            o1: self.o1.cylinder(factors, position)?,
            o2: self.o2.cylinder(factors, position)?,
        })
    }
}

impl ClosedEventPair {
    pub fn new(c1: ClosedSet, c2: ClosedSet) -> Result<Self> {
        c1.space().ensure_same(c2.space())?;
        if !c1.covers_space(&c2)? {
            return Err(Error::CoveringViolation);
        }
        Ok(ClosedEventPair { c1, c2 })
    }

    pub fn first(&self) -> &ClosedSet {
        &self.c1
    }

    pub fn second(&self) -> &ClosedSet {
        &self.c2
    }

    /// Inverse of [`EventPair::to_dual`]: `(int C2^c, int C1^c)`.
    pub fn to_event(&self) -> EventPair {
        EventPair {
            o1: self.c2.open_interior_of_complement(),
            o2: self.c1.open_interior_of_complement(),
        }
    }
}

impl fmt::Display for EventPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{} | {}⟩", self.o1, self.o2)
    }
}

impl fmt::Display for ClosedEventPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{} | {}⟩", self.c1, self.c2)
    }
}

pub fn event_intersect(a: &EventPair, b: &EventPair) -> Result<EventPair> {
    a.intersect(b)
}

pub fn event_union(a: &EventPair, b: &EventPair) -> Result<EventPair> {
    a.union(b)
}

pub fn event_leq(a: &EventPair, b: &EventPair) -> Result<bool> {
    a.leq(b)
}

pub fn event_negate(h: &EventPair) -> EventPair {
    h.negate()
}

pub fn event_join(a: &EventPair, b: &EventPair) -> Result<EventPair> {
    a.join(b)
}

pub fn event_to_dual(e: &EventPair) -> ClosedEventPair {
    e.to_dual()
}

/// `(∏ U^i_1, ⋃_i U^i_2 × ∏_{j≠i} D_j)` over the product of the factor
/// spaces.
pub fn event_product(events: &[EventPair]) -> Result<EventPair> {
    if events.is_empty() {
        return Err(Error::InvalidArgument("product of no events".into()));
    }
    let factors: Vec<SpaceDescriptor> = events.iter().map(|e| e.space().clone()).collect();
    let mut inner = events[0].o1.clone();
    for e in &events[1..] {
        inner = inner.product(&e.o1)?;
    }
    let mut outer: Option<OpenSet> = None;
    for (i, e) in events.iter().enumerate() {
        let c = e.o2.cylinder(&factors, i)?;
        outer = Some(match outer {
            None => c,
            Some(o) => o.union(&c)?,
        });
    }
    Ok(EventPair {
        o1: inner,
        o2: outer.expect("at least one event"),
    })
}

/// `[σ(O1), 1 − σ(O2)]`.
pub fn event_probability(sigma: &Valuation, e: &EventPair) -> Result<ProbInterval> {
    sigma.space().ensure_same(e.space())?;
    let lo = sigma.eval(&e.o1)?;
    let out = sigma.eval(&e.o2)?;
    let hi = out.complement();
    ProbInterval::new(lo.clone(), hi).or_else(|err| match err {
        // σ(O1) + σ(O2) may exceed 1 only inside the error band
        Error::OrderViolation { .. } if !sigma.is_exact() => {
            ProbInterval::new(lo.clone(), UnitValue::new(lo.real().max(out.complement().real()))?)
        }
        e => Err(e),
    })
}
