//! Generators and property checks shared by the property tests and the
//! acceptance runner.

#![allow(dead_code)]

use credal_kernel::event::{event_probability, EventPair};
use credal_kernel::ifs::{eval_closed, invariant_measure_approx, AffineMap, IFSSystem};
use credal_kernel::independence::{graphoid_sweep, FactorEvent, FactorSpace, GraphoidEvents, GraphoidRule};
use credal_kernel::inference::cond_prob;
use credal_kernel::interval::{bayes_kernel_interval, interval_refines, rat, ProbInterval, Rational, UnitValue};
use credal_kernel::json::{FromJson, ToJson};
use credal_kernel::markov::{stationary, stationary_bounds_vertices, IntervalTransitionMatrix};
use credal_kernel::space::{ClosedSet, OpenSet, SpaceDescriptor};
use credal_kernel::valuation::{check_g_axioms, check_modularity, Valuation};
use credal_kernel::Error;
use num_traits::One;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub type Check = std::result::Result<(), TestCaseError>;

fn ok<T>(r: Result<T, Error>) -> std::result::Result<T, TestCaseError> {
    r.map_err(|e| TestCaseError::fail(e.to_string()))
}

/// Union of intervals on the twentieths grid, each given by start and length.
pub fn open_from(parts: &[(u32, u32)]) -> OpenSet {
    let parts = parts
        .iter()
        .map(|&(a, len)| (rat(a as i64, 20), rat((a + len).min(20) as i64, 20)))
        .collect();
    OpenSet::intervals(parts).expect("grid intervals are valid")
}

pub fn opens() -> impl Strategy<Value = OpenSet> {
    prop::collection::vec((0u32..20, 1u32..8), 0..4).prop_map(|p| open_from(&p))
}

/// `(O1, O2 \ cl O1)`, always disjoint.
pub fn event_from(o1: OpenSet, o2: OpenSet) -> EventPair {
    let outside = o1.closure().open_interior_of_complement();
    let o2 = o2.intersect(&outside).expect("same space");
    EventPair::new(o1, o2).expect("disjoint by construction")
}

pub fn events() -> impl Strategy<Value = EventPair> {
    (opens(), opens()).prop_map(|(a, b)| event_from(a, b))
}

/// `(coarse, fine)` with `coarse ≤ fine` in the information order.
pub fn refinements() -> impl Strategy<Value = (EventPair, EventPair)> {
    (events(), opens(), opens()).prop_map(|(fine, r1, r2)| {
        let o1 = fine.inner().intersect(&r1).unwrap();
        let o2 = fine.outer().intersect(&r2).unwrap();
        (EventPair::new(o1, o2).unwrap(), fine)
    })
}

fn piecewise(masses: Vec<u32>) -> Valuation {
    let n = masses.len() as i64;
    let total: u32 = masses.iter().sum();
    let breaks = (0..=n).map(|i| rat(i, n)).collect();
    let weights = masses.iter().map(|&m| rat(m as i64, total as i64)).collect();
    Valuation::piecewise(breaks, weights).unwrap()
}

/// Lebesgue, a rational step density, Beta(2,5) or a fat Cantor measure.
pub fn valuations() -> impl Strategy<Value = Valuation> {
    prop_oneof![
        Just(Valuation::lebesgue(1).unwrap()),
        prop::collection::vec(1u32..10, 1..6).prop_map(piecewise),
        Just(Valuation::beta(2.0, 5.0).unwrap()),
        (1i64..4).prop_map(|k| Valuation::fat_cantor(rat(k, 4), 6).unwrap()),
    ]
}

/// Rational valuations only, for checks that need exact arithmetic.
pub fn exact_valuations() -> impl Strategy<Value = Valuation> {
    prop_oneof![Just(Valuation::lebesgue(1).unwrap()), prop::collection::vec(1u32..10, 1..6).prop_map(piecewise)]
}

pub fn modularity(sigma: &Valuation, u: &OpenSet, v: &OpenSet) -> Check {
    prop_assert!(ok(check_modularity(sigma, u, v))?, "σ(u)+σ(v) ≠ σ(u∪v)+σ(u∩v) for {u}, {v}");
    Ok(())
}

pub fn g_axioms(sigma: &Valuation, sample: &[OpenSet]) -> Check {
    let grid: Vec<Rational> = (1..16).map(|k| rat(k, 16)).collect();
    let report = ok(check_g_axioms(sigma, sample, &grid))?;
    prop_assert!(report.is_clean(), "{:?}", report.violations);
    Ok(())
}

pub fn lattice_laws(a: &EventPair, b: &EventPair, c: &EventPair) -> Check {
    let s = a.space().clone();
    let and = |x: &EventPair, y: &EventPair| x.intersect(y).unwrap();
    let or = |x: &EventPair, y: &EventPair| x.union(y).unwrap();
    prop_assert_eq!(and(a, b), and(b, a));
    prop_assert_eq!(or(a, b), or(b, a));
    prop_assert_eq!(and(&and(a, b), c), and(a, &and(b, c)));
    prop_assert_eq!(or(&or(a, b), c), or(a, &or(b, c)));
    prop_assert_eq!(or(a, &and(a, b)), a.clone());
    prop_assert_eq!(and(a, &or(a, b)), a.clone());
    prop_assert_eq!(and(a, &or(b, c)), or(&and(a, b), &and(a, c)));
    prop_assert_eq!(a.negate().negate(), a.clone());
    prop_assert_eq!(and(a, b).negate(), or(&a.negate(), &b.negate()));
    prop_assert_eq!(and(a, &EventPair::certain(&s)), a.clone());
    prop_assert_eq!(or(a, &EventPair::impossible(&s)), a.clone());
    Ok(())
}

/// More information never widens the event probability or the conditional.
pub fn antitone(sigma: &Valuation, coarse: &EventPair, fine: &EventPair, given: &EventPair) -> Check {
    prop_assert!(ok(coarse.leq(fine))?);
    let pc = ok(event_probability(sigma, coarse))?;
    let pf = ok(event_probability(sigma, fine))?;
    prop_assert!(interval_refines(&pc, &pf), "{pf} not inside {pc}");
    match (cond_prob(sigma, coarse, given), cond_prob(sigma, fine, given)) {
        (Ok(c), Ok(f)) => prop_assert!(interval_refines(&c, &f), "{f} not inside {c}"),
        (Err(Error::PositivityViolation(_) | Error::Indeterminate(_)), _) => {}
        (Err(e), _) | (_, Err(e)) => return Err(TestCaseError::fail(e.to_string())),
    }
    Ok(())
}

fn discrete_point_event(points: &[bool]) -> EventPair {
    let s = SpaceDescriptor::discrete(points.len()).unwrap();
    let inside = points.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i);
    let outside = points.iter().enumerate().filter(|(_, &b)| !b).map(|(i, _)| i);
    EventPair::new(OpenSet::discrete(&s, inside).unwrap(), OpenSet::discrete(&s, outside).unwrap()).unwrap()
}

/// Four independent discrete factors of size 3 with random laws, and one
/// classical event per factor.
pub fn product_models() -> impl Strategy<Value = (Valuation, GraphoidEvents)> {
    let factor = prop::collection::vec(1i64..6, 3);
    let event = prop::collection::vec(any::<bool>(), 3);
    (prop::collection::vec(factor, 4), prop::collection::vec(event, 4)).prop_map(|(laws, evs)| {
        let factors = laws
            .into_iter()
            .map(|w| {
                let t: i64 = w.iter().sum();
                Valuation::discrete(w.iter().map(|&x| rat(x, t)).collect()).unwrap()
            })
            .collect();
        let joint = Valuation::product(factors).unwrap();
        let fs = FactorSpace::power(&SpaceDescriptor::discrete(3).unwrap(), 4).unwrap();
        let e: Vec<FactorEvent> =
            evs.iter().enumerate().map(|(i, p)| FactorEvent::on(&fs, i, &discrete_point_event(p)).unwrap()).collect();
        let ev = GraphoidEvents { u: e[0].clone(), v: e[1].clone(), w: e[2].clone(), z: e[3].clone() };
        (joint, ev)
    })
}

pub fn graphoid(joint: &Valuation, ev: &GraphoidEvents) -> Check {
    for rule in GraphoidRule::ALL {
        let s = ok(graphoid_sweep(rule, joint, std::slice::from_ref(ev)))?;
        prop_assert!(s.counterexamples.is_empty(), "{} fails on an independent product", rule.name());
    }
    Ok(())
}

/// A `k/100` box and a point inside it, as numerators.
pub fn kernel_boxes() -> impl Strategy<Value = ([(i64, i64); 3], [i64; 3])> {
    let side = |lo: i64| (lo..100).prop_flat_map(|a| (Just(a), a..=100));
    (side(1), side(1), side(1)).prop_flat_map(|(x, y, z)| {
        let pts = (x.0..=x.1, y.0..=y.1, z.0..=z.1).prop_map(|(a, b, c)| [a, b, c]);
        (Just([x, y, z]), pts)
    })
}

pub fn kernel_sharp(sides: &[(i64, i64); 3], pt: &[i64; 3]) -> Check {
    let iv = |(a, b): (i64, i64)| ProbInterval::exact(rat(a, 100), rat(b, 100)).unwrap();
    let out = ok(bayes_kernel_interval(&iv(sides[0]), &iv(sides[1]), &iv(sides[2])))?;
    let f = |x: Rational, y: Rational, z: Rational| &x * &y / (&x * &y + z * (Rational::one() - &x));
    let c = |n: i64| rat(n, 100);
    let lo = f(c(sides[0].0), c(sides[1].0), c(sides[2].1));
    let hi = f(c(sides[0].1), c(sides[1].1), c(sides[2].0));
    prop_assert_eq!(out.lo().as_exact(), Some(&lo));
    prop_assert_eq!(out.hi().as_exact(), Some(&hi));
    let v = f(c(pt[0]), c(pt[1]), c(pt[2]));
    prop_assert!(lo <= v && v <= hi);
    Ok(())
}

/// Row bounds `[lo, lo + width]` in twentieths with strictly positive lower
/// bounds, so every admissible matrix is irreducible and aperiodic.
pub fn markov_rows(n: usize) -> impl Strategy<Value = Vec<Vec<(Rational, Rational)>>> {
    let row = prop::collection::vec((1i64..=5, 0i64..=6), n).prop_filter_map("row not admissible", |r| {
        let lo: i64 = r.iter().map(|x| x.0).sum();
        let hi: i64 = r.iter().map(|x| (x.0 + x.1).min(20)).sum();
        (lo <= 20 && hi >= 20).then(|| r.iter().map(|&(a, w)| (rat(a, 20), rat((a + w).min(20), 20))).collect())
    });
    prop::collection::vec(row, n)
}

/// A random admissible matrix: per row, a convex combination of the row's
/// vertices with weights from `seeds`.
pub fn admissible_sample(itm: &IntervalTransitionMatrix, seeds: &[u32]) -> Vec<Vec<Rational>> {
    let mut it = seeds.iter().cycle();
    (0..itm.n())
        .map(|k| {
            let verts = itm.row_vertices(k).unwrap();
            let w: Vec<Rational> = verts.iter().map(|_| Rational::from_integer((*it.next().unwrap() % 16 + 1).into())).collect();
            let total: Rational = w.iter().sum();
            (0..itm.n()).map(|j| verts.iter().zip(&w).map(|(v, w)| &v[j] * w).sum::<Rational>() / &total).collect()
        })
        .collect()
}

pub fn markov_inner(rows: Vec<Vec<(Rational, Rational)>>, seeds: &[u32]) -> Check {
    let itm = ok(IntervalTransitionMatrix::new(rows))?;
    let b = ok(stationary_bounds_vertices(&itm))?;
    let pi = ok(stationary(&admissible_sample(&itm, seeds)))?;
    prop_assert_eq!(pi.iter().sum::<Rational>(), Rational::one());
    for (k, p) in pi.iter().enumerate() {
        let (lo, hi) = b.state(k);
        prop_assert!(&lo <= p && p <= &hi, "state {k}: {p} outside [{lo}, {hi}]");
    }
    Ok(())
}

/// Two or three maps with scale `±1/k` and weight boxes around a uniform law.
pub fn ifs_systems() -> impl Strategy<Value = (IFSSystem, Vec<Rational>)> {
    (2usize..=3)
        .prop_flat_map(|n| (prop::collection::vec((2i64..5, any::<bool>(), 0i64..=8), n), Just(n)))
        .prop_map(|(specs, n)| {
            let maps = specs
                .iter()
                .map(|&(k, neg, off)| {
                    let a = if neg { rat(-1, k) } else { rat(1, k) };
                    let room = Rational::one() - rat(1, k);
                    let shift = room * rat(off, 8);
                    let b = if neg { shift + rat(1, k) } else { shift };
                    AffineMap::new(a, b).unwrap()
                })
                .collect();
            let p = vec![rat(1, n as i64); n];
            let weights = p.iter().map(|w| (w / rat(2, 1), (w * rat(3, 2)).min(Rational::one()))).collect();
            (IFSSystem::new(maps, weights).unwrap(), p)
        })
}

/// Deeper cylinder approximations give nested enclosures of total mass one.
pub fn ifs_nesting(s: &IFSSystem, p: &[Rational], c: &ClosedSet, depth: u32) -> Check {
    let coarse = ok(invariant_measure_approx(s, p, depth))?;
    let fine = ok(invariant_measure_approx(s, p, depth + 1))?;
    prop_assert_eq!(coarse.total_mass(), Rational::one());
    prop_assert_eq!(fine.total_mass(), Rational::one());
    let a = ok(eval_closed(&coarse, c))?;
    let b = ok(eval_closed(&fine, c))?;
    prop_assert!(interval_refines(&a, &b), "depth {} gives {b}, outside {a}", depth + 1);
    Ok(())
}

pub fn closed_intervals() -> impl Strategy<Value = ClosedSet> {
    (0i64..=20, 0i64..=20).prop_map(|(a, b)| ClosedSet::interval(rat(a.min(b), 20), rat(a.max(b), 20)).unwrap())
}

pub fn json_round_trip<T: ToJson + FromJson>(x: &T) -> Check {
    let v = x.to_json();
    let text = serde_json::to_string(&v).unwrap();
    let back = ok(T::from_value(&serde_json::from_str(&text).unwrap()))?;
    prop_assert_eq!(back.to_json(), v);
    Ok(())
}

pub fn unit_values() -> impl Strategy<Value = UnitValue> {
    (0i64..1000, 1i64..1000).prop_map(|(a, b)| UnitValue::exact(rat(a.min(b), b)).unwrap())
}

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Check) -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

/// The named property suites, each run for `cases` random cases.
pub fn suite(name: &str, cases: u32) -> Result<(), String> {
    match name {
        "modularity" => run(cases, (valuations(), opens(), opens()), |(s, u, v)| modularity(&s, &u, &v)),
        "g-axioms" => run(cases / 8 + 1, (exact_valuations(), prop::collection::vec(opens(), 1..6)), |(s, b)| g_axioms(&s, &b)),
        "lattice" => run(cases, (events(), events(), events()), |(a, b, c)| lattice_laws(&a, &b, &c)),
        "antitone" => run(cases, (valuations(), refinements(), events()), |(s, (c, f), g)| antitone(&s, &c, &f, &g)),
        "graphoid" => run(cases, product_models(), |(j, ev)| graphoid(&j, &ev)),
        "kernel" => run(cases, kernel_boxes(), |(b, p)| kernel_sharp(&b, &p)),
        "markov" => run(cases / 4 + 1, (markov_rows(3), prop::collection::vec(any::<u32>(), 12)), |(r, s)| markov_inner(r, &s)),
        "ifs" => run(cases / 4 + 1, (ifs_systems(), closed_intervals(), 1u32..5), |((s, p), c, d)| ifs_nesting(&s, &p, &c, d)),
        "json" => {
            run(cases, (valuations(), events(), unit_values()), |(s, e, u)| {
                json_round_trip(&s)?;
                json_round_trip(&e)?;
                json_round_trip(&u)?;
                json_round_trip(&ProbInterval::point(u))
            })?;
            run(cases / 4 + 1, markov_rows(3), |r| json_round_trip(&IntervalTransitionMatrix::new(r).unwrap()))
        }
        other => Err(format!("unknown suite {other}")),
    }
}

pub const SUITES: [&str; 9] = ["modularity", "g-axioms", "lattice", "antitone", "graphoid", "kernel", "markov", "ifs", "json"];

