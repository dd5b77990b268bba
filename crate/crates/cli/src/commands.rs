//! One function per subcommand: JSON document in, [`Report`] out.

use credal_kernel::credal::{credal_bayes_assessments, credal_conditional, credal_conditional_table, CredalSet};
use credal_kernel::event::{event_probability, EventPair};
use credal_kernel::ifs::{admissible_vertices, credal_envelope_closed, eval_closed, invariant_measure_approx, IFSSystem};
use credal_kernel::independence::{
    check_ci, check_strong_ci, combine_ci_frechet, combine_ci_strong, conditional_interval, conditional_product_interval,
    graphoid_sweep, CIQuery, GraphoidEvents, GraphoidRule,
};
use credal_kernel::inference::{bayes_from_assessment, classical_conditional, cond_prob, is_selection, BayesAssessment};
use credal_kernel::interval::{bayes_kernel, format_rational, rat, ProbInterval, Rational, Real, UnitValue};
use credal_kernel::json::{parse_factor_event, parse_factor_space, parse_rule_instance, FromJson, Node, ToJson};
use credal_kernel::logic::{
    apply_forward, check_backward, completeness_approx, completeness_approx_bayes, holds, soundness_sweep, Model, RuleId,
    SweepConfig,
};
use credal_kernel::markov::{refine_bounds_local, stationary_bounds_vertices, two_state_exact, IntervalTransitionMatrix};
use credal_kernel::space::{ClosedSet, OpenSet};
use credal_kernel::valuation::{eval_open, Valuation};
use credal_kernel::Error;
use serde_json::{json, Value};

use crate::table::{self, emit_comparison_table, Table};
use crate::{CiMode, Failure, LogicMode, MarkovMode, Options, Report};

type Outcome = Result<Report, Failure>;

fn contained(i: &ProbInterval, x: &Real) -> Value {
    json!(i.contains(x))
}

/// One node or each element of a list.
fn one_or_many<'a>(n: &Node<'a>) -> Result<Vec<Node<'a>>, Error> {
    if n.value().is_array() {
        n.items()
    } else {
        Ok(vec![n.clone()])
    }
}

fn event(n: &Node, key: &str) -> Result<EventPair, Error> {
    EventPair::from_json(&n.get(key)?)
}

fn valuation(n: &Node) -> Result<Valuation, Error> {
    Valuation::from_json(&n.get("valuation")?)
}

pub fn eval(doc: &Value, o: &Options) -> Outcome {
    let n = Node::root(doc);
    let sigma = valuation(&n)?;
    let mut t = Table::new(["quantity", "set", "value"]);
    let mut opens = Vec::new();
    for key in ["open", "opens"] {
        if let Some(sets) = n.opt(key) {
            for s in one_or_many(&sets)? {
                let set = OpenSet::from_json(&s)?;
                let value = eval_open(&sigma, &set)?;
                t.row(["σ(O)".to_string(), set.to_string(), table::unit(&value, o.precision)]);
                opens.push(json!({ "open": set.to_json(), "value": value.to_json() }));
            }
        }
    }
    let mut body = json!({ "valuation": sigma.to_json(), "opens": opens });
    if let Some(e) = n.opt("event") {
        let e = EventPair::from_json(&e)?;
        let p = event_probability(&sigma, &e)?;
        t.row(["σ(E)".to_string(), e.to_string(), table::interval(&p, o.precision)]);
        body["event"] = json!({ "event": e.to_json(), "probability": p.to_json() });
    } else if opens.is_empty() {
        return Err(n.error("expected \"open\", \"opens\" or \"event\"").into());
    }
    Ok(Report { kind: "eval", body, table: t.render() })
}

pub fn cond(doc: &Value, o: &Options) -> Outcome {
    let n = Node::root(doc);
    let sigma = valuation(&n)?;
    let (v, c) = (event(&n, "v")?, event(&n, "o")?);
    let interval = cond_prob(&sigma, &v, &c)?;
    let mut body = json!({ "interval": interval.to_json(), "width": interval.width().to_json() });
    let mut rows = vec![("Interval".to_string(), interval.clone())];
    let mut classical = None;
    if let Some(cl) = n.opt("classical") {
        let (a, b) = (OpenSet::from_json(&cl.get("a")?)?, OpenSet::from_json(&cl.get("b")?)?);
        if !is_selection(&v, &a)? {
            return Err(cl.get("a")?.error("not a classical selection of v").into());
        }
        if !is_selection(&c, &b)? {
            return Err(cl.get("b")?.error("not a classical selection of o").into());
        }
        let p = classical_conditional(&sigma, &a, &b)?;
        body["classical"] = json!({ "value": p.to_json(), "contained": contained(&interval, p.real()) });
        rows.push(("Classical".to_string(), ProbInterval::point(p.clone())));
        classical = Some(p.into_real());
    }
    let table = emit_comparison_table(&rows, classical.as_ref(), o.precision);
    Ok(Report { kind: "cond", body, table })
}

fn midpoint(i: &ProbInterval) -> Result<UnitValue, Error> {
    UnitValue::new((i.lo().real() + i.hi().real()) * Real::Exact(rat(1, 2)))
}

fn assessment_of(n: &Node) -> Result<BayesAssessment, Error> {
    match n.opt("assessment") {
        Some(a) => BayesAssessment::from_json(&a),
        None => BayesAssessment::from_events(&valuation(n)?, &event(n, "h")?, &event(n, "e")?),
    }
}

pub fn bayes(doc: &Value, o: &Options) -> Outcome {
    let n = Node::root(doc);
    let a = assessment_of(&n)?;
    let post = bayes_from_assessment(&a)?;
    let (x, y, z, from) = match n.opt("classical") {
        Some(c) => {
            let u = |k: &str| -> Result<UnitValue, Error> {
                let node = c.get(k)?;
                UnitValue::exact(node.rational()?).map_err(|e| node.error(e.to_string()))
            };
            (u("prior")?, u("likelihood")?, u("alt_likelihood")?, "input")
        }
        None => (midpoint(&a.prior)?, midpoint(&a.likelihood)?, midpoint(&a.alt_likelihood)?, "midpoints"),
    };
    let classical = bayes_kernel(&x, &y, &z)?;
    let body = json!({
        "assessment": a.to_json(),
        "posterior": post.to_json(),
        "width": post.width().to_json(),
        "classical": {
            "value": classical.to_json(),
            "from": from,
            "point": [x.to_json(), y.to_json(), z.to_json()],
            "contained": contained(&post, classical.real()),
        },
    });
    let rows = [("Interval Bayes".to_string(), post), ("Classical Bayes".to_string(), ProbInterval::point(classical.clone()))];
    let table = emit_comparison_table(&rows, Some(classical.real()), o.precision);
    Ok(Report { kind: "bayes", body, table })
}

pub fn credal(doc: &Value, o: &Options) -> Outcome {
    let n = Node::root(doc);
    let (labels, per_vertex, envelope) = if let Some(list) = n.opt("assessments") {
        let assessments = Vec::<BayesAssessment>::from_json(&list)?;
        let per: Vec<ProbInterval> = assessments.iter().map(bayes_from_assessment).collect::<Result<_, _>>()?;
        let labels = (1..=per.len()).map(|i| format!("assessment {i}")).collect();
        (labels, per, credal_bayes_assessments(&assessments)?)
    } else {
        let k = CredalSet::from_json(&n.get("credal")?)?;
        let labels: Vec<String> = k.vertices().iter().map(|v| v.to_string()).collect();
        if n.has("h") {
            let (h, e) = (event(&n, "h")?, event(&n, "e")?);
            let assessments: Vec<BayesAssessment> =
                k.vertices().iter().map(|s| BayesAssessment::from_events(s, &h, &e)).collect::<Result<_, _>>()?;
            let per = assessments.iter().map(bayes_from_assessment).collect::<Result<_, _>>()?;
            (labels, per, credal_bayes_assessments(&assessments)?)
        } else {
            let (v, c) = (event(&n, "v")?, event(&n, "o")?);
            (labels, credal_conditional_table(&k, &v, &c)?, credal_conditional(&k, &v, &c)?)
        }
    };
    let classical = n.opt("classical").map(|c| c.rational()).transpose()?.map(Real::Exact);
    let mut body = json!({
        "vertices": labels.iter().zip(&per_vertex).map(|(l, i)| json!({ "vertex": l, "interval": i.to_json() })).collect::<Vec<_>>(),
        "envelope": envelope.to_json(),
        "width": envelope.width().to_json(),
    });
    if let Some(c) = &classical {
        body["classical"] = json!({ "value": c.to_json(), "contained": contained(&envelope, c) });
    }
    let mut t = Table::new(["vertex", "interval"]);
    for (l, i) in labels.iter().zip(&per_vertex) {
        t.row([l.clone(), table::interval(i, o.precision)]);
    }
    let table = t.render() + "\n" + &emit_comparison_table(&[("Credal envelope".into(), envelope)], classical.as_ref(), o.precision);
    Ok(Report { kind: "credal", body, table })
}

fn ci_context(n: &Node) -> Result<(credal_kernel::independence::FactorSpace, Valuation), Error> {
    let fs = parse_factor_space(&n.get("factors")?)?;
    let joint = Valuation::from_json(&n.get("joint")?)?;
    Ok((fs, joint))
}

pub fn ci(doc: &Value, mode: CiMode, o: &Options) -> Outcome {
    let n = Node::root(doc);
    match mode {
        CiMode::Compare | CiMode::CombineFrechet | CiMode::CombineStrong => {
            let cu = ProbInterval::from_json(&n.get("cu")?)?;
            let cv = ProbInterval::from_json(&n.get("cv")?)?;
            let mut rows = Vec::new();
            let mut body = json!({ "cu": cu.to_json(), "cv": cv.to_json() });
            let mut classical = None;
            if let Some(c) = n.opt("classical") {
                let pts = Vec::<Rational>::from_json(&c)?;
                let [x, y] = pts.as_slice() else {
                    return Err(c.error("expected two point values").into());
                };
                let p = UnitValue::exact(x * y).map_err(|e| c.error(e.to_string()))?;
                body["classical"] = p.to_json();
                rows.push(("Classical".to_string(), ProbInterval::point(p.clone())));
                classical = Some(p.into_real());
            }
            if mode != CiMode::CombineStrong {
                let f = combine_ci_frechet(&cu, &cv);
                body["frechet"] = f.to_json();
                rows.push(("Fréchet".to_string(), f));
            }
            if mode != CiMode::CombineFrechet {
                let s = combine_ci_strong(&cu, &cv);
                body["strong"] = s.to_json();
                rows.push(("Strong".to_string(), s));
            }
            let table = emit_comparison_table(&rows, classical.as_ref(), o.precision);
            Ok(Report { kind: "ci", body, table })
        }
        CiMode::Check => {
            let (fs, joint) = ci_context(&n)?;
            let fe = |k: &str| parse_factor_event(&n.get(k)?, &fs);
            let (u, v, w) = (fe("u")?, fe("v")?, fe("w")?);
            let q = CIQuery::new(joint.clone(), u.clone(), v.clone(), w.clone())?;
            let (weak, strong) = (check_ci(&q)?, check_strong_ci(&q)?);
            let cu = conditional_interval(&joint, &u, &w)?;
            let cv = conditional_interval(&joint, &v, &w)?;
            let joint_c = conditional_product_interval(&q)?;
            let (fr, st) = (combine_ci_frechet(&cu, &cv), combine_ci_strong(&cu, &cv));
            let body = json!({
                "independent": weak,
                "strongly_independent": strong,
                "cu": cu.to_json(),
                "cv": cv.to_json(),
                "joint": joint_c.to_json(),
                "frechet": fr.to_json(),
                "strong": st.to_json(),
            });
            let rows = [("C(U⊗V|W)".to_string(), joint_c), ("Fréchet".to_string(), fr), ("Strong".to_string(), st)];
            let table = format!(
                "I(U⫫V|W): {weak}\nstrong I(U⫫V|W): {strong}\nC(U|W) = {}\nC(V|W) = {}\n\n{}",
                table::interval(&cu, o.precision),
                table::interval(&cv, o.precision),
                emit_comparison_table(&rows, None, o.precision)
            );
            Ok(Report { kind: "ci", body, table })
        }
        CiMode::Graphoid => {
            let (fs, joint) = ci_context(&n)?;
            let rules: Vec<GraphoidRule> = match n.opt("rules") {
                Some(r) => r.items()?.iter().map(|x| x.str()?.parse().map_err(|e: Error| x.error(e.to_string()))).collect::<Result<_, _>>()?,
                None => GraphoidRule::ALL.to_vec(),
            };
            let tuples: Vec<GraphoidEvents> = n
                .get("tuples")?
                .items()?
                .iter()
                .map(|t| {
                    let fe = |k: &str| parse_factor_event(&t.get(k)?, &fs);
                    Ok(GraphoidEvents { u: fe("u")?, v: fe("v")?, w: fe("w")?, z: fe("z")? })
                })
                .collect::<Result<_, Error>>()?;
            let mut t = Table::new(["rule", "holds", "vacuous", "preconditions", "counterexamples"]);
            let mut sweeps = Vec::new();
            for rule in rules {
                let s = graphoid_sweep(rule, &joint, &tuples)?;
                t.row([
                    rule.name().to_string(),
                    s.holds.to_string(),
                    s.vacuous.to_string(),
                    s.preconditions.to_string(),
                    s.counterexamples.len().to_string(),
                ]);
                let mut j = s.to_json();
                j["rule"] = json!(rule.name());
                sweeps.push(j);
            }
            Ok(Report { kind: "graphoid", body: json!({ "sweeps": sweeps }), table: t.render() })
        }
    }
}

pub fn logic(doc: &Value, mode: LogicMode, o: &Options) -> Outcome {
    let n = Node::root(doc);
    let fs = n.opt("factors").map(|f| parse_factor_space(&f)).transpose()?;
    let model = Model::from_json(&n.get("model")?)?;
    match mode {
        LogicMode::Apply => {
            let inst = parse_rule_instance(&n.get("instance")?, fs.as_ref())?;
            let conclusion = apply_forward(&inst)?;
            let mut t = Table::new(["", "judgment", "holds"]);
            let mut premises = Vec::new();
            for p in &inst.premises {
                let h = holds(&model, p)?;
                t.row(["premise".to_string(), p.to_string(), h.to_string()]);
                premises.push(json!({ "judgment": p.to_json(), "holds": h }));
            }
            let ch = holds(&model, &conclusion)?;
            t.row(["conclusion".to_string(), conclusion.to_string(), ch.to_string()]);
            let body = json!({
                "rule": inst.rule.to_json(),
                "premises": premises,
                "conclusion": conclusion.to_json(),
                "conclusion_holds": ch,
            });
            Ok(Report { kind: "logic-apply", body, table: t.render() })
        }
        LogicMode::Backward => {
            let inst = parse_rule_instance(&n.get("instance")?, fs.as_ref())?;
            let r = check_backward(&inst, &model, o.grid_depth);
            let body = r.to_json();
            let table = format!(
                "rule {}: {} after {} grid points\nwitnesses: {}\n",
                r.rule,
                body["outcome"].as_str().unwrap_or_default(),
                r.examined,
                r.witnesses
                    .iter()
                    .map(|w| format!("({})", w.iter().map(format_rational).collect::<Vec<_>>().join(", ")))
                    .collect::<Vec<_>>()
                    .join(" ")
            );
            Ok(Report { kind: "logic-backward", body, table })
        }
        LogicMode::Sweep => {
            let rules: Vec<RuleId> = match n.opt("rules") {
                Some(r) => Vec::from_json(&r)?,
                None => RuleId::ALL.to_vec(),
            };
            let defaults = SweepConfig::default();
            let config = SweepConfig {
                instances: n.opt("instances").map(|x| x.usize()).transpose()?.unwrap_or(defaults.instances),
                seed: n.opt("seed").map(|x| x.usize()).transpose()?.map_or(defaults.seed, |s| s as u64),
                grid_depth: o.grid_depth,
                corruption: None,
            };
            let r = soundness_sweep(&model, &rules, &config)?;
            let mut t = Table::new(["rule", "instances", "checked", "vacuous", "indeterminate", "inconclusive", "violations"]);
            for s in &r.rules {
                t.row([
                    s.rule.map_or("-", |x| x.name()).to_string(),
                    s.instances.to_string(),
                    s.checked.to_string(),
                    s.vacuous.to_string(),
                    s.indeterminate.to_string(),
                    s.inconclusive.to_string(),
                    s.violations.len().to_string(),
                ]);
            }
            Ok(Report { kind: "logic-sweep", body: r.to_json(), table: t.render() })
        }
        LogicMode::Complete => {
            let (approx, exact) = if n.has("h") {
                let (h, e) = (event(&n, "h")?, event(&n, "e")?);
                (completeness_approx_bayes(&model, &h, &e, o.grid_depth)?, model.posterior(&h, &e)?)
            } else {
                let (v, c) = (event(&n, "v")?, event(&n, "o")?);
                (completeness_approx(&model, &v, &c, o.grid_depth)?, model.conditional(&v, &c)?)
            };
            let approx_i = ProbInterval::exact(approx.0.clone(), approx.1.clone())?;
            let body = json!({
                "grid_depth": o.grid_depth,
                "sup_lower": approx.0.to_json(),
                "inf_upper": approx.1.to_json(),
                "interval": exact.to_json(),
            });
            let rows = [("Grid approximation".to_string(), approx_i), ("Interval".to_string(), exact)];
            Ok(Report { kind: "logic-complete", body, table: emit_comparison_table(&rows, None, o.precision) })
        }
    }
}

pub fn ifs(doc: &Value, o: &Options) -> Outcome {
    let n = Node::root(doc);
    let s = IFSSystem::from_json(&n.get("ifs")?)?;
    let verts = admissible_vertices(s.weight_box())?;
    let weights = |w: &[Rational]| format!("({})", w.iter().map(format_rational).collect::<Vec<_>>().join(", "));
    if n.has("c1") {
        let c1 = ClosedSet::from_json(&n.get("c1")?)?;
        let c2 = ClosedSet::from_json(&n.get("c2")?)?;
        let env = credal_envelope_closed(&s, &c1, &c2, o.ifs_depth)?;
        let mut t = Table::new(["vertex", "ν(C1)", "ν(C2)", "dirac"]);
        for v in &env.vertices {
            t.row([
                weights(&v.weights),
                table::interval(&v.c1, o.precision),
                table::interval(&v.c2, o.precision),
                if v.dirac { "yes" } else { "no" }.to_string(),
            ]);
        }
        let table = format!("{}\nenvelope: {}\n", t.render(), table::interval(&env.envelope, o.precision));
        let mut body = env.to_json();
        body["depth"] = json!(o.ifs_depth);
        return Ok(Report { kind: "ifs-envelope", body, table });
    }
    let p = Vec::<Rational>::from_json(&n.get("weights")?)?;
    let m = invariant_measure_approx(&s, &p, o.ifs_depth)?;
    let mut t = Table::new(["closed set", "enclosure"]);
    let mut enclosures = Vec::new();
    for c in one_or_many(&n.get("closed")?)? {
        let set = ClosedSet::from_json(&c)?;
        let e = eval_closed(&m, &set)?;
        t.row([set.to_string(), table::interval(&e, o.precision)]);
        enclosures.push(json!({ "closed": set.to_json(), "enclosure": e.to_json() }));
    }
    let body = json!({
        "depth": o.ifs_depth,
        "cylinders": m.cylinders.len(),
        "admissible_vertices": verts.iter().map(|v| v.to_json()).collect::<Vec<_>>(),
        "enclosures": enclosures,
    });
    Ok(Report { kind: "ifs-measure", body, table: t.render() })
}

pub fn markov(doc: &Value, mode: MarkovMode, o: &Options) -> Outcome {
    let (state, steps) = (o.state, o.steps);
    let n = Node::root(doc);
    let itm = IntervalTransitionMatrix::from_json(&n.opt("matrix").unwrap_or_else(|| n.clone()))?;
    if let Some(k) = state {
        if k == 0 || k > itm.n() {
            return Err(Failure::input(format!("--state {k} is out of range 1..={}", itm.n())));
        }
    }
    let b = match mode {
        MarkovMode::Exact => two_state_exact(&itm)?,
        MarkovMode::Vertices => stationary_bounds_vertices(&itm)?,
        MarkovMode::Refine => {
            let start = n.opt("start").map(|s| s.usize()).transpose()?.unwrap_or(0);
            refine_bounds_local(&itm, start, steps)?
        }
    };
    let states: Vec<usize> = match state {
        Some(k) => vec![k - 1],
        None => (0..itm.n()).collect(),
    };
    let mut t = Table::new(["state", "lower", "upper", "exact"]);
    for &k in &states {
        let (lo, hi) = b.state(k);
        let i = &b.bounds[k];
        t.row([
            (k + 1).to_string(),
            table::unit(i.lo(), o.precision),
            table::unit(i.hi(), o.precision),
            format!("[{}, {}]", format_rational(&lo), format_rational(&hi)),
        ]);
    }
    let mut table = t.render() + &format!("provenance: {}\n", b.provenance);
    if !b.skipped.is_empty() {
        table += &format!("skipped {} reducible or periodic vertex matrices\n", b.skipped.len());
    }
    let mut body = b.to_json();
    if let Some(k) = state {
        body["state"] = json!(k);
        body["bounds"] = json!([b.bounds[k - 1].to_json()]);
    }
    Ok(Report { kind: "markov", body, table })
}
