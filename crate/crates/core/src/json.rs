//! JSON forms of models and results. Rationals travel as `"num/den"`
//! strings; plain JSON numbers are read as exact decimals. Parse failures
//! carry the JSON-pointer path of the offending value.

use std::collections::BTreeSet;

use serde_json::{json, Map, Value};

use crate::credal::CredalSet;
use crate::error::{Error, Result};
use crate::event::EventPair;
use crate::ifs::{AffineMap, ClosedEnvelope, Cylinder, CylinderMeasure, IFSSystem, VertexEnclosure};
use crate::independence::{FactorEvent, FactorSpace, GraphoidReport, GraphoidSweep};
use crate::inference::BayesAssessment;
use crate::interval::{format_rational, parse_rational, ProbInterval, Rational, Real, UnitValue};
use crate::logic::{BackwardOutcome, BackwardReport, Judgment, Model, RuleId, RuleInstance, SweepReport};
use crate::markov::{IntervalTransitionMatrix, Provenance, StationaryBounds};
use crate::space::{ClosedSet, OpenSet, SpaceDescriptor};
use crate::valuation::{Law, Valuation};

/// Version tag of the document envelope.
pub const SCHEMA: &str = "credal-kernel/v1";

/// A value inside a document together with its JSON-pointer path.
#[derive(Clone, Debug)]
pub struct Node<'a> {
    value: &'a Value,
    path: String,
}

impl<'a> Node<'a> {
    pub fn root(value: &'a Value) -> Self {
        Node { value, path: String::new() }
    }

    pub fn value(&self) -> &'a Value {
        self.value
    }

    pub fn path(&self) -> &str {
        if self.path.is_empty() {
            "/"
        } else {
            &self.path
        }
    }

    pub fn error(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.path(), msg)
    }

    fn child(&self, key: &str, value: &'a Value) -> Node<'a> {
        let key = key.replace('~', "~0").replace('/', "~1");
        Node { value, path: format!("{}/{key}", self.path) }
    }

    pub fn opt(&self, key: &str) -> Option<Node<'a>> {
        self.value.as_object()?.get(key).map(|v| self.child(key, v))
    }

    pub fn get(&self, key: &str) -> Result<Node<'a>> {
        if !self.value.is_object() {
            return Err(self.error("expected an object"));
        }
        self.opt(key).ok_or_else(|| self.error(format!("missing field \"{key}\"")))
    }

    pub fn has(&self, key: &str) -> bool {
        self.opt(key).is_some()
    }

    pub fn items(&self) -> Result<Vec<Node<'a>>> {
        let arr = self.value.as_array().ok_or_else(|| self.error("expected an array"))?;
        Ok(arr.iter().enumerate().map(|(i, v)| self.child(&i.to_string(), v)).collect())
    }

    pub fn str(&self) -> Result<&'a str> {
        self.value.as_str().ok_or_else(|| self.error("expected a string"))
    }

    pub fn bool(&self) -> Result<bool> {
        self.value.as_bool().ok_or_else(|| self.error("expected a boolean"))
    }

    pub fn usize(&self) -> Result<usize> {
        self.value
            .as_u64()
            .map(|x| x as usize)
            .ok_or_else(|| self.error("expected a non-negative integer"))
    }

    pub fn f64(&self) -> Result<f64> {
        match self.value {
            Value::Number(n) => n.as_f64().ok_or_else(|| self.error("number out of range")),
            Value::String(s) => s.trim().parse().map_err(|_| self.error(format!("\"{s}\" is not a number"))),
            _ => Err(self.error("expected a number")),
        }
    }

    pub fn rational(&self) -> Result<Rational> {
        let text = match self.value {
            Value::Number(n) => n.to_string(),
            Value::String(s) => s.clone(),
            _ => return Err(self.error("expected a rational (\"num/den\" or a number)")),
        };
        parse_rational(&text).ok_or_else(|| self.error(format!("\"{text}\" is not a rational")))
    }

    fn pair(&self) -> Result<(Rational, Rational)> {
        match self.items()?.as_slice() {
            [a, b] => Ok((a.rational()?, b.rational()?)),
            _ => Err(self.error("expected a pair [lo, hi]")),
        }
    }

    fn rationals(&self) -> Result<Vec<Rational>> {
        self.items()?.iter().map(Node::rational).collect()
    }
}

/// Parses text and checks the optional `"schema"` tag.
pub fn parse_document(text: &str) -> Result<Value> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::parse("/", e.to_string()))?;
    if let Some(s) = v.get("schema") {
        if s.as_str() != Some(SCHEMA) {
            return Err(Error::parse("/schema", format!("unsupported schema {s}, expected \"{SCHEMA}\"")));
        }
    }
    Ok(v)
}

/// `body` with the schema tag and a `kind` field added.
pub fn envelope(kind: &str, body: Value) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("kind".into(), json!(kind));
    match body {
        Value::Object(o) => m.extend(o),
        other => {
            m.insert("result".into(), other);
        }
    }
    Value::Object(m)
}

pub trait ToJson {
    fn to_json(&self) -> Value;
}

pub trait FromJson: Sized {
    fn from_json(node: &Node) -> Result<Self>;

    fn from_value(v: &Value) -> Result<Self> {
        Self::from_json(&Node::root(v))
    }
}

impl<T: ToJson> ToJson for [T] {
    fn to_json(&self) -> Value {
        Value::Array(self.iter().map(ToJson::to_json).collect())
    }
}

impl<T: ToJson> ToJson for Vec<T> {
    fn to_json(&self) -> Value {
        self.as_slice().to_json()
    }
}

impl<T: FromJson> FromJson for Vec<T> {
    fn from_json(node: &Node) -> Result<Self> {
        node.items()?.iter().map(T::from_json).collect()
    }
}

impl ToJson for Rational {
    fn to_json(&self) -> Value {
        json!(format_rational(self))
    }
}

impl FromJson for Rational {
    fn from_json(node: &Node) -> Result<Self> {
        node.rational()
    }
}

impl ToJson for Real {
    fn to_json(&self) -> Value {
        match self {
            Real::Exact(r) => r.to_json(),
            Real::Approx { value, err } => json!({ "value": value, "err": err }),
        }
    }
}

impl FromJson for Real {
    fn from_json(node: &Node) -> Result<Self> {
        if node.value().is_object() {
            return Ok(Real::approx(node.get("value")?.f64()?, node.get("err")?.f64()?));
        }
        Ok(Real::Exact(node.rational()?))
    }
}

impl ToJson for UnitValue {
    fn to_json(&self) -> Value {
        self.real().to_json()
    }
}

impl FromJson for UnitValue {
    fn from_json(node: &Node) -> Result<Self> {
        UnitValue::new(Real::from_json(node)?).map_err(|e| node.error(e.to_string()))
    }
}

impl ToJson for ProbInterval {
    fn to_json(&self) -> Value {
        json!({ "lo": self.lo().to_json(), "hi": self.hi().to_json() })
    }
}

impl FromJson for ProbInterval {
    fn from_json(node: &Node) -> Result<Self> {
        if node.value().is_array() {
            let (lo, hi) = node.pair()?;
            return ProbInterval::exact(lo, hi);
        }
        ProbInterval::from_reals(Real::from_json(&node.get("lo")?)?, Real::from_json(&node.get("hi")?)?)
    }
}

impl ToJson for SpaceDescriptor {
    fn to_json(&self) -> Value {
        match self {
            SpaceDescriptor::Cube { dim } => json!({ "cube": dim }),
            SpaceDescriptor::Discrete { shape } if shape.len() == 1 => json!({ "discrete": shape[0] }),
            SpaceDescriptor::Discrete { shape } => json!({ "discrete": shape }),
        }
    }
}

impl FromJson for SpaceDescriptor {
    fn from_json(node: &Node) -> Result<Self> {
        if let Some(d) = node.opt("cube") {
            return SpaceDescriptor::cube(d.usize()?);
        }
        if let Some(d) = node.opt("discrete") {
            return if d.value().is_array() {
                SpaceDescriptor::discrete_shape(d.items()?.iter().map(Node::usize).collect::<Result<_>>()?)
            } else {
                SpaceDescriptor::discrete(d.usize()?)
            };
        }
        Err(node.error("expected {\"cube\": d} or {\"discrete\": n}"))
    }
}

fn boxes_json(boxes: Vec<Vec<(Rational, Rational)>>) -> Value {
    Value::Array(
        boxes
            .iter()
            .map(|b| Value::Array(b.iter().map(|(lo, hi)| json!([lo.to_json(), hi.to_json()])).collect()))
            .collect(),
    )
}

fn parse_boxes(node: &Node) -> Result<Vec<Vec<(Rational, Rational)>>> {
    node.items()?.iter().map(|b| b.items()?.iter().map(Node::pair).collect()).collect()
}

fn set_json(space: &SpaceDescriptor, points: Option<&BTreeSet<usize>>, boxes: impl FnOnce() -> Vec<Vec<(Rational, Rational)>>) -> Value {
    match points {
        Some(p) => json!({ "space": space.to_json(), "points": p.iter().collect::<Vec<_>>() }),
        None => json!({ "space": space.to_json(), "boxes": boxes_json(boxes()) }),
    }
}

fn space_or_unit(node: &Node) -> Result<SpaceDescriptor> {
    node.opt("space").map_or(Ok(SpaceDescriptor::unit_interval()), |s| SpaceDescriptor::from_json(&s))
}

fn points(node: &Node) -> Result<Vec<usize>> {
    node.items()?.iter().map(Node::usize).collect()
}

impl ToJson for OpenSet {
    fn to_json(&self) -> Value {
        set_json(self.space(), self.points(), || self.boxes())
    }
}

impl FromJson for OpenSet {
    fn from_json(node: &Node) -> Result<Self> {
        let space = space_or_unit(node)?;
        let built = if let Some(p) = node.opt("points") {
            OpenSet::discrete(&space, points(&p)?)
        } else if let Some(parts) = node.opt("intervals") {
            OpenSet::intervals(parse_pairs(&parts)?)
        } else {
            OpenSet::from_boxes(&space, parse_boxes(&node.get("boxes")?)?)
        };
        built.map_err(|e| node.error(e.to_string()))
    }
}

impl ToJson for ClosedSet {
    fn to_json(&self) -> Value {
        set_json(self.space(), self.points(), || self.boxes())
    }
}

impl FromJson for ClosedSet {
    fn from_json(node: &Node) -> Result<Self> {
        let space = space_or_unit(node)?;
        let built = if let Some(p) = node.opt("points") {
            ClosedSet::discrete(&space, points(&p)?)
        } else if let Some(parts) = node.opt("intervals") {
            ClosedSet::intervals(parse_pairs(&parts)?)
        } else {
            ClosedSet::from_boxes(&space, parse_boxes(&node.get("boxes")?)?)
        };
        built.map_err(|e| node.error(e.to_string()))
    }
}

impl ToJson for EventPair {
    fn to_json(&self) -> Value {
        json!({ "in": self.inner().to_json(), "out": self.outer().to_json() })
    }
}

impl FromJson for EventPair {
    fn from_json(node: &Node) -> Result<Self> {
        let o1 = OpenSet::from_json(&node.get("in")?)?;
        let o2 = OpenSet::from_json(&node.get("out")?)?;
        EventPair::new(o1, o2).map_err(|e| node.error(e.to_string()))
    }
}

impl ToJson for Valuation {
    fn to_json(&self) -> Value {
        match self.law() {
            Law::Lebesgue => json!({ "law": "lebesgue", "dim": self.space().axes() }),
            Law::Piecewise { breaks, weights } => {
                json!({ "law": "piecewise", "breaks": breaks.to_json(), "weights": weights.to_json() })
            }
            Law::Beta { alpha, beta, tol } => json!({ "law": "beta", "alpha": alpha, "beta": beta, "tol": tol }),
            Law::FatCantor { r, depth } => json!({ "law": "fatcantor", "r": r.to_json(), "depth": depth }),
            Law::Discrete { p } => match self.space() {
                SpaceDescriptor::Discrete { shape } if shape.len() > 1 => {
                    json!({ "law": "discrete", "shape": shape, "p": p.to_json() })
                }
                _ => json!({ "law": "discrete", "p": p.to_json() }),
            },
            Law::Mixture { parts } => json!({
                "law": "mixture",
                "parts": parts.iter().map(|(w, v)| json!([w.to_json(), v.to_json()])).collect::<Vec<_>>(),
            }),
            Law::Product { factors } => json!({ "law": "product", "factors": factors.to_json() }),
        }
    }
}

impl FromJson for Valuation {
    fn from_json(node: &Node) -> Result<Self> {
        let law = node.get("law")?;
        let built = match law.str()? {
            "lebesgue" => Valuation::lebesgue(node.opt("dim").map_or(Ok(1), |d| d.usize())?),
            "piecewise" => Valuation::piecewise(node.get("breaks")?.rationals()?, node.get("weights")?.rationals()?),
            "beta" => {
                let (a, b) = (node.get("alpha")?.f64()?, node.get("beta")?.f64()?);
                match node.opt("tol") {
                    Some(t) => Valuation::beta_with_tolerance(a, b, t.f64()?),
                    None => Valuation::beta(a, b),
                }
            }
            "fatcantor" => {
                let depth = node.get("depth")?.usize()?;
                Valuation::fat_cantor(node.get("r")?.rational()?, depth as u32)
            }
            "discrete" => {
                let p = node.get("p")?.rationals()?;
                match node.opt("shape") {
                    Some(s) => Valuation::discrete_shaped(points(&s)?, p),
                    None => Valuation::discrete(p),
                }
            }
            "mixture" => {
                let parts = node
                    .get("parts")?
                    .items()?
                    .iter()
                    .map(|part| match part.items()?.as_slice() {
                        [w, v] => Ok((w.rational()?, Valuation::from_json(v)?)),
                        _ => Err(part.error("expected [weight, valuation]")),
                    })
                    .collect::<Result<_>>()?;
                Valuation::mixture(parts)
            }
            "product" => Valuation::product(Vec::from_json(&node.get("factors")?)?),
            other => return Err(law.error(format!("unknown law \"{other}\""))),
        };
        built.map_err(|e| match e {
            Error::Parse { .. } => e,
            Error::InvalidArgument(msg) => node.error(msg),
            other => other,
        })
    }
}

impl ToJson for CredalSet {
    fn to_json(&self) -> Value {
        json!({ "vertices": self.vertices().to_json() })
    }
}

impl FromJson for CredalSet {
    fn from_json(node: &Node) -> Result<Self> {
        CredalSet::new(Vec::from_json(&node.get("vertices")?)?)
    }
}

impl ToJson for BayesAssessment {
    fn to_json(&self) -> Value {
        json!({
            "prior": self.prior.to_json(),
            "likelihood": self.likelihood.to_json(),
            "alt_likelihood": self.alt_likelihood.to_json(),
        })
    }
}

impl FromJson for BayesAssessment {
    fn from_json(node: &Node) -> Result<Self> {
        Ok(BayesAssessment::new(
            ProbInterval::from_json(&node.get("prior")?)?,
            ProbInterval::from_json(&node.get("likelihood")?)?,
            ProbInterval::from_json(&node.get("alt_likelihood")?)?,
        ))
    }
}

impl ToJson for FactorEvent {
    fn to_json(&self) -> Value {
        json!({ "scope": self.scope().iter().collect::<Vec<_>>(), "event": self.cylinder().to_json() })
    }
}

/// A factor event in one of three forms: `{"factor": i, "event": e}` with
/// `e` on factor `i`; `{"scope": [...], "event": e}` with `e` a cylinder in
/// the joint space; `{"tensor": [a, b, ...]}`.
pub fn parse_factor_event(node: &Node, space: &FactorSpace) -> Result<FactorEvent> {
    if let Some(parts) = node.opt("tensor") {
        let mut it = parts.items()?.into_iter();
        let first = it.next().ok_or_else(|| parts.error("empty tensor"))?;
        return it.try_fold(parse_factor_event(&first, space)?, |acc, n| {
            acc.tensor(&parse_factor_event(&n, space)?).map_err(|e| n.error(e.to_string()))
        });
    }
    let event = EventPair::from_json(&node.get("event")?)?;
    let built = if let Some(f) = node.opt("factor") {
        let i = f.usize()?;
        if i >= space.len() {
            return Err(f.error(format!("factor {i} out of range for {} factors", space.len())));
        }
        FactorEvent::on(space, i, &event)
    } else {
        let scope = points(&node.get("scope")?)?.into_iter().collect();
        FactorEvent::from_cylinder(space, scope, event)
    };
    built.map_err(|e| node.error(e.to_string()))
}

/// The factor spaces listed under `"factors"`.
pub fn parse_factor_space(node: &Node) -> Result<FactorSpace> {
    FactorSpace::new(Vec::from_json(node)?)
}

fn need_factors<'b>(node: &Node, fs: Option<&'b FactorSpace>) -> Result<&'b FactorSpace> {
    fs.ok_or_else(|| node.error("independence judgments need a \"factors\" list in the model"))
}

impl ToJson for Judgment {
    fn to_json(&self) -> Value {
        let kind = self.kind();
        match self {
            Judgment::G { set, p } => json!({ "kind": kind, "set": set.to_json(), "p": p.to_json() }),
            Judgment::Cminus { v, o, p } => json!({ "kind": kind, "v": v.to_json(), "o": o.to_json(), "p": p.to_json() }),
            Judgment::Cplus { v, o, q } => json!({ "kind": kind, "v": v.to_json(), "o": o.to_json(), "q": q.to_json() }),
            Judgment::CplusFrechet { u, v, w, q } => json!({
                "kind": kind, "u": u.to_json(), "v": v.to_json(), "w": w.to_json(), "q": q.to_json()
            }),
            Judgment::Bminus { h, e, p } => json!({ "kind": kind, "h": h.to_json(), "e": e.to_json(), "p": p.to_json() }),
            Judgment::Bplus { h, e, q } => json!({ "kind": kind, "h": h.to_json(), "e": e.to_json(), "q": q.to_json() }),
            Judgment::Pos(o) | Judgment::CE(o) => json!({ "kind": kind, "o": o.to_json() }),
            Judgment::I { u, v, w } | Judgment::Istrong { u, v, w } => {
                json!({ "kind": kind, "u": u.to_json(), "v": v.to_json(), "w": w.to_json() })
            }
            Judgment::Any(js) => json!({ "kind": kind, "of": js.to_json() }),
        }
    }
}

/// Parses a judgment; `fs` supplies the factor spaces of independence judgments.
pub fn parse_judgment(node: &Node, fs: Option<&FactorSpace>) -> Result<Judgment> {
    let ep = |k: &str| EventPair::from_json(&node.get(k)?);
    let r = |k: &str| node.get(k)?.rational();
    let fe = |k: &str| parse_factor_event(&node.get(k)?, need_factors(node, fs)?);
    let kind = node.get("kind")?;
    Ok(match kind.str()? {
        "G" => Judgment::G { set: OpenSet::from_json(&node.get("set")?)?, p: r("p")? },
        "C-" => Judgment::Cminus { v: ep("v")?, o: ep("o")?, p: r("p")? },
        "C+" => Judgment::Cplus { v: ep("v")?, o: ep("o")?, q: r("q")? },
        "C+frechet" => Judgment::CplusFrechet { u: fe("u")?, v: fe("v")?, w: fe("w")?, q: r("q")? },
        "B-" => Judgment::Bminus { h: ep("h")?, e: ep("e")?, p: r("p")? },
        "B+" => Judgment::Bplus { h: ep("h")?, e: ep("e")?, q: r("q")? },
        "Pos" => Judgment::Pos(ep("o")?),
        "CE" => Judgment::CE(ep("o")?),
        "I" => Judgment::I { u: fe("u")?, v: fe("v")?, w: fe("w")? },
        "Istrong" => Judgment::Istrong { u: fe("u")?, v: fe("v")?, w: fe("w")? },
        "any" => Judgment::Any(
            node.get("of")?.items()?.iter().map(|j| parse_judgment(j, fs)).collect::<Result<_>>()?,
        ),
        other => return Err(kind.error(format!("unknown judgment kind \"{other}\""))),
    })
}

impl ToJson for RuleId {
    fn to_json(&self) -> Value {
        json!(self.name())
    }
}

impl FromJson for RuleId {
    fn from_json(node: &Node) -> Result<Self> {
        node.str()?.parse().map_err(|e: Error| node.error(e.to_string()))
    }
}

impl ToJson for RuleInstance {
    fn to_json(&self) -> Value {
        let mut v = json!({ "rule": self.rule.to_json(), "premises": self.premises.to_json() });
        if let Some(c) = &self.conclusion {
            v["conclusion"] = c.to_json();
        }
        v
    }
}

pub fn parse_rule_instance(node: &Node, fs: Option<&FactorSpace>) -> Result<RuleInstance> {
    let premises = node.get("premises")?.items()?.iter().map(|j| parse_judgment(j, fs)).collect::<Result<_>>()?;
    let conclusion = node.opt("conclusion").map(|c| parse_judgment(&c, fs)).transpose()?;
    Ok(RuleInstance::new(RuleId::from_json(&node.get("rule")?)?, premises, conclusion))
}

impl ToJson for Model {
    fn to_json(&self) -> Value {
        match self {
            Model::Valuation(s) => json!({ "valuation": s.to_json() }),
            Model::Assessment { h, e, assessment } => {
                let mut a = assessment.to_json();
                a["h"] = h.to_json();
                a["e"] = e.to_json();
                json!({ "assessment": a })
            }
        }
    }
}

impl FromJson for Model {
    fn from_json(node: &Node) -> Result<Self> {
        if let Some(v) = node.opt("valuation") {
            return Ok(Model::Valuation(Valuation::from_json(&v)?));
        }
        let a = node.get("assessment")?;
        Ok(Model::Assessment {
            h: EventPair::from_json(&a.get("h")?)?,
            e: EventPair::from_json(&a.get("e")?)?,
            assessment: BayesAssessment::from_json(&a)?,
        })
    }
}

impl ToJson for BackwardReport {
    fn to_json(&self) -> Value {
        let (outcome, detail) = match &self.outcome {
            BackwardOutcome::Witnessed => ("witnessed", None),
            BackwardOutcome::Inconclusive => ("inconclusive", None),
            BackwardOutcome::PremiseFalse => ("premise-false", None),
            BackwardOutcome::Violated(d) => ("violated", Some(d.clone())),
            BackwardOutcome::Rejected(d) => ("rejected", Some(d.clone())),
        };
        json!({
            "rule": self.rule.to_json(),
            "outcome": outcome,
            "detail": detail,
            "witnesses": self.witnesses.iter().map(|w| w.to_json()).collect::<Vec<_>>(),
            "examined": self.examined,
        })
    }
}

impl ToJson for SweepReport {
    fn to_json(&self) -> Value {
        json!({
            "violations": self.violations(),
            "rules": self.rules.iter().map(|r| json!({
                "rule": r.rule.map(|x| x.name()),
                "instances": r.instances,
                "checked": r.checked,
                "vacuous": r.vacuous,
                "indeterminate": r.indeterminate,
                "inconclusive": r.inconclusive,
                "violations": r.violations,
            })).collect::<Vec<_>>(),
        })
    }
}

impl ToJson for GraphoidReport {
    fn to_json(&self) -> Value {
        let outcome = match &self.outcome {
            crate::independence::GraphoidOutcome::Vacuous => json!("vacuous"),
            crate::independence::GraphoidOutcome::Holds => json!("holds"),
            crate::independence::GraphoidOutcome::Counterexample => json!("counterexample"),
            crate::independence::GraphoidOutcome::Precondition(m) => json!({ "precondition": m }),
        };
        json!({ "rule": self.rule.name(), "outcome": outcome, "note": self.note })
    }
}

impl ToJson for GraphoidSweep {
    fn to_json(&self) -> Value {
        json!({
            "vacuous": self.vacuous,
            "holds": self.holds,
            "preconditions": self.preconditions,
            "counterexamples": self.counterexamples,
        })
    }
}

impl ToJson for AffineMap {
    fn to_json(&self) -> Value {
        json!({ "a": self.scale().to_json(), "b": self.offset().to_json() })
    }
}

impl FromJson for AffineMap {
    fn from_json(node: &Node) -> Result<Self> {
        AffineMap::new(node.get("a")?.rational()?, node.get("b")?.rational()?).map_err(|e| node.error(e.to_string()))
    }
}

fn pairs_json(p: &[(Rational, Rational)]) -> Value {
    Value::Array(p.iter().map(|(a, b)| json!([a.to_json(), b.to_json()])).collect())
}

fn parse_pairs(node: &Node) -> Result<Vec<(Rational, Rational)>> {
    node.items()?.iter().map(Node::pair).collect()
}

impl ToJson for IFSSystem {
    fn to_json(&self) -> Value {
        json!({ "maps": self.maps().to_json(), "weights": pairs_json(self.weight_box()) })
    }
}

impl FromJson for IFSSystem {
    fn from_json(node: &Node) -> Result<Self> {
        IFSSystem::new(Vec::from_json(&node.get("maps")?)?, parse_pairs(&node.get("weights")?)?)
    }
}

impl ToJson for Cylinder {
    fn to_json(&self) -> Value {
        json!({ "word": self.word, "lo": self.lo.to_json(), "hi": self.hi.to_json(), "mass": self.mass.to_json() })
    }
}

impl FromJson for Cylinder {
    fn from_json(node: &Node) -> Result<Self> {
        Ok(Cylinder {
            word: points(&node.get("word")?)?,
            lo: node.get("lo")?.rational()?,
            hi: node.get("hi")?.rational()?,
            mass: node.get("mass")?.rational()?,
        })
    }
}

impl ToJson for CylinderMeasure {
    fn to_json(&self) -> Value {
        json!({ "depth": self.depth, "cylinders": self.cylinders.to_json() })
    }
}

impl FromJson for CylinderMeasure {
    fn from_json(node: &Node) -> Result<Self> {
        Ok(CylinderMeasure { depth: node.get("depth")?.usize()? as u32, cylinders: Vec::from_json(&node.get("cylinders")?)? })
    }
}

impl ToJson for VertexEnclosure {
    fn to_json(&self) -> Value {
        json!({ "weights": self.weights.to_json(), "c1": self.c1.to_json(), "c2": self.c2.to_json(), "dirac": self.dirac })
    }
}

impl FromJson for VertexEnclosure {
    fn from_json(node: &Node) -> Result<Self> {
        Ok(VertexEnclosure {
            weights: node.get("weights")?.rationals()?,
            c1: ProbInterval::from_json(&node.get("c1")?)?,
            c2: ProbInterval::from_json(&node.get("c2")?)?,
            dirac: node.get("dirac")?.bool()?,
        })
    }
}

impl ToJson for ClosedEnvelope {
    fn to_json(&self) -> Value {
        json!({ "envelope": self.envelope.to_json(), "vertices": self.vertices.to_json() })
    }
}

impl FromJson for ClosedEnvelope {
    fn from_json(node: &Node) -> Result<Self> {
        Ok(ClosedEnvelope {
            envelope: ProbInterval::from_json(&node.get("envelope")?)?,
            vertices: Vec::from_json(&node.get("vertices")?)?,
        })
    }
}

impl ToJson for IntervalTransitionMatrix {
    fn to_json(&self) -> Value {
        json!({ "n": self.n(), "rows": self.rows().iter().map(|r| pairs_json(r)).collect::<Vec<_>>() })
    }
}

impl FromJson for IntervalTransitionMatrix {
    fn from_json(node: &Node) -> Result<Self> {
        let rows_node = node.get("rows")?;
        let rows: Vec<_> = rows_node.items()?.iter().map(parse_pairs).collect::<Result<_>>()?;
        if let Some(n) = node.opt("n") {
            if n.usize()? != rows.len() {
                return Err(n.error(format!("n = {} but {} rows given", n.usize()?, rows.len())));
            }
        }
        IntervalTransitionMatrix::new(rows).map_err(|e| match e {
            Error::InvalidArgument(msg) => rows_node.error(msg),
            other => other,
        })
    }
}

impl ToJson for Provenance {
    fn to_json(&self) -> Value {
        json!(self.to_string())
    }
}

impl FromJson for Provenance {
    fn from_json(node: &Node) -> Result<Self> {
        match node.str()? {
            "exact" => Ok(Provenance::Exact),
            "vertex-inner" => Ok(Provenance::VertexInner),
            "refined" => Ok(Provenance::Refined),
            other => Err(node.error(format!("unknown provenance \"{other}\""))),
        }
    }
}

impl ToJson for StationaryBounds {
    fn to_json(&self) -> Value {
        json!({
            "bounds": self.bounds.to_json(),
            "provenance": self.provenance.to_json(),
            "evaluated": self.evaluated,
            "skipped": self.skipped.iter().map(|(c, why)| json!({ "choice": c, "reason": why })).collect::<Vec<_>>(),
        })
    }
}

impl FromJson for StationaryBounds {
    fn from_json(node: &Node) -> Result<Self> {
        let skipped = node
            .get("skipped")?
            .items()?
            .iter()
            .map(|s| Ok((points(&s.get("choice")?)?, s.get("reason")?.str()?.to_string())))
            .collect::<Result<_>>()?;
        Ok(StationaryBounds {
            bounds: Vec::from_json(&node.get("bounds")?)?,
            provenance: Provenance::from_json(&node.get("provenance")?)?,
            evaluated: node.get("evaluated")?.usize()?,
            skipped,
        })
    }
}
