//! Acceptance criteria AC1 to AC13. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use credal_kernel::credal::credal_bayes_assessments;
use credal_kernel::event::EventPair;
use credal_kernel::ifs::{admissible_vertices, credal_envelope_closed, eval_closed, invariant_measure_approx, AffineMap, IFSSystem};
use credal_kernel::independence::{combine_ci_frechet, combine_ci_strong};
use credal_kernel::inference::{bayes_from_assessment, classical_conditional, cond_prob, is_selection, BayesAssessment};
use credal_kernel::interval::{
    bayes_kernel, bayes_kernel_interval, format_decimal, rat, rational_to_f64, ProbInterval, Rational, Real, UnitValue,
};
use credal_kernel::logic::{completeness_approx, completeness_approx_bayes, soundness_sweep, Corruption, Model, RuleId, SweepConfig};
use credal_kernel::markov::{stationary, stationary_bounds_vertices, two_state_exact, IntervalTransitionMatrix};
use credal_kernel::space::{ClosedSet, OpenSet, SpaceDescriptor};
use credal_kernel::valuation::{fat_cantor_layer, Valuation};
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn iv(a: (i64, i64), b: (i64, i64)) -> OpenSet {
    OpenSet::interval(rat(a.0, a.1), rat(b.0, b.1)).unwrap()
}

type Ratio = (i64, i64);

fn ivs(parts: &[(Ratio, Ratio)]) -> OpenSet {
    OpenSet::intervals(parts.iter().map(|(a, b)| (rat(a.0, a.1), rat(b.0, b.1))).collect()).unwrap()
}

fn pi(a: (i64, i64), b: (i64, i64)) -> ProbInterval {
    ProbInterval::exact(rat(a.0, a.1), rat(b.0, b.1)).unwrap()
}

fn ends(i: &ProbInterval) -> (Rational, Rational) {
    (i.lo().as_exact().cloned().expect("exact lo"), i.hi().as_exact().cloned().expect("exact hi"))
}

/// The hypothesis and evidence events of the worked Lebesgue example.
fn worked_example() -> (EventPair, EventPair) {
    let h = EventPair::new(iv((8, 10), (85, 100)), ivs(&[((0, 1), (7, 10)), ((95, 100), (1, 1))])).unwrap();
    let e = EventPair::new(iv((6, 10), (1, 1)), iv((1, 10), (6, 10))).unwrap();
    (h, e)
}

fn medical() -> (Model, EventPair, EventPair) {
    let s = SpaceDescriptor::discrete(2).unwrap();
    let h = EventPair::new(OpenSet::discrete(&s, [1]).unwrap(), OpenSet::discrete(&s, [0]).unwrap()).unwrap();
    let e = EventPair::new(OpenSet::discrete(&s, [1]).unwrap(), OpenSet::empty(&s)).unwrap();
    let assessment = BayesAssessment::new(pi((1, 100), (5, 100)), pi((85, 100), (95, 100)), pi((1, 100), (10, 100)));
    (Model::Assessment { h: h.clone(), e: e.clone(), assessment }, h, e)
}

fn ac1() -> Outcome {
    let l = e(Valuation::lebesgue(1))?;
    let (h, ev) = worked_example();
    let c = e(cond_prob(&l, &h, &ev))?;
    ensure(ends(&c) == (rat(1, 10), rat(7, 10)), || format!("got {c}"))?;
    let a = iv((7, 10), (9, 10));
    let b = ivs(&[((0, 1), (1, 10)), ((6, 10), (1, 1))]);
    ensure(e(is_selection(&h, &a))? && e(is_selection(&ev, &b))?, || "selection rejected".into())?;
    let p = e(classical_conditional(&l, &a, &b))?;
    ensure(p.as_exact() == Some(&rat(2, 5)), || format!("classical {p}"))?;
    ensure(c.contains(p.real()) == Some(true), || "classical value outside".into())?;
    Ok(format!("C = {c}, classical = {p} inside"))
}

fn ac2() -> Outcome {
    let (Model::Assessment { assessment, .. }, _, _) = medical() else { unreachable!() };
    let r = e(bayes_from_assessment(&assessment))?;
    let (lo, hi) = ends(&r);
    ensure((lo.clone(), hi.clone()) == (rat(17, 215), rat(95, 114)), || format!("got {r}"))?;
    let (dl, dh) = (format_decimal(&lo, 4), format_decimal(&hi, 4));
    ensure(dl == "0.0791" && dh == "0.8333", || format!("rounded {dl}, {dh}"))?;
    Ok(format!("[17/215, 95/114] = [{dl}, {dh}]"))
}

/// Independent floating-point kernel for the grid oracle.
fn fb(x: f64, y: f64, z: f64) -> f64 {
    x * y / (x * y + z * (1.0 - x))
}

fn ac3() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let mut worst = 0f64;
    for i in 0..1000 {
        let mut side = |lo: i64| {
            let a = rng.gen_range(lo..100);
            let b = rng.gen_range(a..=100);
            (a, b)
        };
        let (x, y, z) = (side(1), side(1), side(1));
        let box_ = [x, y, z].map(|(a, b)| pi((a, 100), (b, 100)));
        let out = e(bayes_kernel_interval(&box_[0], &box_[1], &box_[2]))?;
        let (lo, hi) = ends(&out);
        let corner = |x: i64, y: i64, z: i64| {
            let (x, y, z) = (rat(x, 100), rat(y, 100), rat(z, 100));
            &x * &y / (&x * &y + z * (Rational::one() - &x))
        };
        ensure(lo == corner(x.0, y.0, z.1) && hi == corner(x.1, y.1, z.0), || format!("box {i}: corners differ"))?;
        let axis = |(a, b): (i64, i64)| (0..=20).map(move |k| (a as f64 + (b - a) as f64 * k as f64 / 20.0) / 100.0);
        let (mut gmin, mut gmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for xv in axis(x) {
            for yv in axis(y) {
                for zv in axis(z) {
                    let f = fb(xv, yv, zv);
                    gmin = gmin.min(f);
                    gmax = gmax.max(f);
                }
            }
        }
        let d = (gmin - rational_to_f64(&lo)).abs().max((gmax - rational_to_f64(&hi)).abs());
        worst = worst.max(d);
        ensure(d <= 1e-12, || format!("box {i}: grid extremes differ by {d:e}"))?;
    }
    Ok(format!("1000 boxes, max |grid − interval| = {worst:.1e}"))
}

fn ac4() -> Outcome {
    let family = |a: Rational, b: Rational| {
        let c = |x: i64, y: i64| rat(x, y);
        let p = |lo: Rational, hi: Rational| ProbInterval::exact(lo, hi).unwrap();
        BayesAssessment::new(
            p(c(1, 10) + c(2, 10) * &a, c(3, 10) + c(2, 10) * &a),
            p(c(7, 10) + c(2, 10) * &b, c(9, 10) + c(1, 10) * &b),
            p(c(5, 100) + c(1, 10) * &b, c(15, 100) + c(1, 10) * &b),
        )
    };
    let corners: Vec<_> = [(0, 0), (0, 1), (1, 0), (1, 1)].iter().map(|&(a, b)| family(rat(a, 1), rat(b, 1))).collect();
    let r = e(credal_bayes_assessments(&corners))?;
    let (lo, hi) = ends(&r);
    ensure(lo == rat(2, 7) && hi == rat(18, 19), || format!("got {r}"))?;
    let (lf, hf) = (rational_to_f64(&lo), rational_to_f64(&hi));
    ensure((lf - 0.2857).abs() < 1e-4 && (hf - 0.9474).abs() < 1e-4, || "rounded values".into())?;
    let mid = family(rat(1, 2), rat(1, 2));
    let m = |i: &ProbInterval| {
        let (a, b) = ends(i);
        UnitValue::exact((a + b) / rat(2, 1)).unwrap()
    };
    let point = e(bayes_kernel(&m(&mid.prior), &m(&mid.likelihood), &m(&mid.alt_likelihood)))?;
    ensure((point.to_f64() - 0.7143).abs() < 1e-4, || format!("midpoint {point}"))?;
    ensure(r.contains(point.real()) == Some(true), || "midpoint outside".into())?;
    Ok(format!("[{}, {}], midpoint {} inside", format_decimal(&lo, 4), format_decimal(&hi, 4), point))
}

fn ac5() -> Outcome {
    let (cu, cv) = (pi((6, 10), (8, 10)), pi((7, 10), (9, 10)));
    let fr = combine_ci_frechet(&cu, &cv);
    let st = combine_ci_strong(&cu, &cv);
    let cl = combine_ci_strong(&pi((7, 10), (7, 10)), &pi((8, 10), (8, 10)));
    ensure(ends(&fr) == (rat(42, 100), rat(80, 100)), || format!("Fréchet {fr}"))?;
    ensure(ends(&st) == (rat(42, 100), rat(72, 100)), || format!("strong {st}"))?;
    ensure(ends(&cl) == (rat(56, 100), rat(56, 100)), || format!("classical {cl}"))?;
    let widths: Vec<Real> = [&fr, &st, &cl].iter().map(|i| i.width()).collect();
    let expect = [rat(38, 100), rat(30, 100), rat(0, 1)];
    ensure(widths.iter().zip(&expect).all(|(w, x)| w.as_exact() == Some(x)), || format!("widths {widths:?}"))?;
    Ok("[0.42, 0.80] / [0.42, 0.72] / [0.56, 0.56], widths 0.38 / 0.30 / 0.00".into())
}

fn ac6() -> Outcome {
    let m = Model::Valuation(e(Valuation::lebesgue(1))?);
    let (h, ev) = worked_example();
    let (mh, mhe, me) = medical();
    let mut notes = Vec::new();
    for depth in [6u32, 8, 10] {
        let gap = rat(1, 1 << depth);
        let (sup, inf) = e(completeness_approx(&m, &h, &ev, depth))?;
        let err = (rat(1, 10) - &sup).max(&inf - rat(7, 10));
        ensure(err <= gap, || format!("depth {depth}: C error {err}"))?;
        let (bs, bi) = e(completeness_approx_bayes(&mh, &mhe, &me, depth))?;
        let berr = (rat(17, 215) - &bs).max(&bi - rat(95, 114));
        ensure(berr <= gap && berr >= Rational::zero(), || format!("depth {depth}: B error {berr}"))?;
        notes.push(format!("d={depth}: {:.1e}/{:.1e}", rational_to_f64(&err), rational_to_f64(&berr)));
    }
    Ok(notes.join(", "))
}

fn ac7() -> Outcome {
    use RuleId::*;
    let rules = [L1, L2, U1, U2, B1, B2, B3, B4, CI5, CI6, CI7, CI8, SI9, SI10];
    let piecewise = e(Valuation::piecewise(
        vec![rat(0, 1), rat(1, 4), rat(1, 2), rat(3, 4), rat(1, 1)],
        vec![rat(1, 10), rat(2, 5), rat(3, 10), rat(1, 5)],
    ))?;
    let config = SweepConfig { instances: 500, ..Default::default() };
    let mut checked = 0;
    for model in [Model::Valuation(e(Valuation::lebesgue(1))?), Model::Valuation(piecewise)] {
        let r = e(soundness_sweep(&model, &rules, &config))?;
        if r.violations() > 0 {
            let first: Vec<_> = r.rules.iter().flat_map(|s| s.violations.iter().take(1)).take(3).collect();
            return Err(format!("{} violations, e.g. {first:?}", r.violations()));
        }
        checked += r.rules.iter().map(|s| s.checked).sum::<usize>();
    }
    let bad = SweepConfig { corruption: Some(Corruption { rule: L1, threshold: |t| &t[0] / &t[1] }), ..config };
    let caught = e(soundness_sweep(&Model::Valuation(e(Valuation::lebesgue(1))?), &[L1], &bad))?.violations();
    ensure(caught > 0, || "corrupted L1 not detected".into())?;
    Ok(format!("{checked} non-vacuous instances, 0 violations; corrupted L1: {caught} violations"))
}

/// `I_x(a, b)` for integer parameters as a binomial tail.
fn incbeta_binomial(a: u32, b: u32, x: f64) -> f64 {
    let n = a + b - 1;
    let mut choose = 1f64;
    let mut sum = 0f64;
    for j in 0..=n {
        if j > 0 {
            choose = choose * (n - j + 1) as f64 / j as f64;
        }
        if j >= a {
            sum += choose * x.powi(j as i32) * (1.0 - x).powi((n - j) as i32);
        }
    }
    sum
}

/// Arcsine law, the `Beta(1/2, 1/2)` distribution function.
fn arcsine_cdf(x: f64) -> f64 {
    2.0 / std::f64::consts::PI * x.sqrt().asin()
}

fn ac8() -> Outcome {
    let o2 = ivs(&[((0, 1), (1, 10)), ((9, 10), (1, 1))]);
    let v1o1 = iv((4, 10), (6, 10));
    let mass = |cdf: &dyn Fn(f64) -> f64, parts: &[(f64, f64)]| parts.iter().map(|&(a, b)| cdf(b) - cdf(a)).sum::<f64>();
    let tails = [(0.0, 0.1), (0.9, 1.0)];
    let mid = [(0.4, 0.6)];
    struct Row {
        name: &'static str,
        alpha: f64,
        beta: f64,
        oracle: Box<dyn Fn(f64) -> f64>,
        paper: [f64; 3],
    }
    let rows = [
        Row { name: "Beta(2,5)", alpha: 2.0, beta: 5.0, oracle: Box::new(|x| incbeta_binomial(2, 5, x)), paper: [0.085, 0.525, 0.574] },
        Row { name: "Beta(5,2)", alpha: 5.0, beta: 2.0, oracle: Box::new(|x| incbeta_binomial(5, 2, x)), paper: [0.410, 0.498, 0.844] },
        Row { name: "Beta(3,3)", alpha: 3.0, beta: 3.0, oracle: Box::new(|x| incbeta_binomial(3, 3, x)), paper: [0.01712, 0.365, 0.371] },
        Row { name: "Beta(0.5,0.5)", alpha: 0.5, beta: 0.5, oracle: Box::new(arcsine_cdf), paper: [0.4096, 0.239, 0.405] },
    ];
    let mut report = Vec::new();
    let mut failures = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let sigma = e(Valuation::beta(r.alpha, r.beta))?;
        let s_o2 = e(sigma.eval(&o2))?.to_f64();
        let s_v = e(sigma.eval(&v1o1))?.to_f64();
        let ratio = s_v / (1.0 - s_o2);
        let (oo2, ov) = (mass(&*r.oracle, &tails), mass(&*r.oracle, &mid));
        let computed = [s_o2, s_v, ratio];
        let oracle = [oo2, ov, ov / (1.0 - oo2)];
        for (k, label) in ["σ(O2)", "σ(V1∩O1)", "ratio"].iter().enumerate() {
            if (computed[k] - oracle[k]).abs() > 1e-9 {
                failures.push(format!("{} {label}: eval {:.6} vs oracle {:.6}", r.name, computed[k], oracle[k]));
            }
            let dev = computed[k] - r.paper[k];
            let validated = (i == 2 && (k == 0 || k == 2)) || (i == 3 && k == 0);
            if validated && dev.abs() > 5e-4 {
                failures.push(format!("{} {label}: {:.5} vs table {}", r.name, computed[k], r.paper[k]));
            }
            if !validated && dev.abs() > 5e-4 {
                report.push(format!("{} {label} {:.4} (table {}, Δ {:+.4})", r.name, computed[k], r.paper[k], dev));
            }
        }
    }
    println!("      recomputed table entries that deviate from the published values:");
    for line in &report {
        println!("        {line}");
    }
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok(format!("σ3(O2), σ4(O2) and σ3 ratio within 5e-4; {} unvalidated entries deviate", report.len()))
}

fn ac9() -> Outcome {
    for r in [rat(1, 3), rat(1, 2), rat(2, 3)] {
        let s = e(Valuation::fat_cantor(r.clone(), 12))?;
        for n in 0..=12 {
            let v = e(s.eval(&e(fat_cantor_layer(&r, n))?))?;
            let expect = Rational::one() - &r + &r * num_traits::pow(rat(2, 3), n as usize);
            ensure(v.as_exact() == Some(&expect), || format!("r={r}, n={n}: {v} vs {expect}"))?;
        }
    }
    Ok("39 layer values exact".into())
}

fn ac10() -> Outcome {
    let box_ = vec![(rat(0, 1), rat(1, 2)), (rat(1, 2), rat(1, 1))];
    let verts = e(admissible_vertices(&box_))?;
    ensure(verts == vec![vec![rat(0, 1), rat(1, 1)], vec![rat(1, 2), rat(1, 2)]], || format!("vertices {verts:?}"))?;
    let maps = vec![e(AffineMap::new(rat(1, 3), rat(0, 1)))?, e(AffineMap::new(rat(1, 3), rat(2, 3)))?];
    let s = e(IFSSystem::new(maps, box_))?;
    let one = e(ClosedSet::point(rat(1, 1)))?;
    let m = e(invariant_measure_approx(&s, &[rat(1, 2), rat(1, 2)], 16))?;
    let enc = e(eval_closed(&m, &one))?;
    ensure(ends(&enc) == (rat(0, 1), rat(1, 1 << 16)), || format!("uniform vertex {enc}"))?;
    let full = e(ClosedSet::interval(rat(0, 1), rat(1, 1)))?;
    let env = e(credal_envelope_closed(&s, &full, &one, 16))?;
    let dirac = env.vertices.iter().find(|v| v.dirac).ok_or("no Dirac vertex")?;
    ensure(dirac.weights == vec![rat(0, 1), rat(1, 1)], || "Dirac vertex weights".into())?;
    ensure(ends(&dirac.c2) == (rat(1, 1), rat(1, 1)), || format!("Dirac value {}", dirac.c2))?;
    Ok(format!("ν_(1/2,1/2)({{1}}) ∈ {enc}, ν_(0,1)({{1}}) = 1"))
}

fn ac11() -> Outcome {
    let itm = e(IntervalTransitionMatrix::new(vec![
        vec![(rat(1, 5), rat(2, 5)), (rat(3, 5), rat(4, 5))],
        vec![(rat(3, 10), rat(1, 2)), (rat(1, 2), rat(7, 10))],
    ]))?;
    let b = e(two_state_exact(&itm))?;
    let (lo, hi) = b.state(0);
    ensure((lo.clone(), hi.clone()) == (rat(3, 11), rat(5, 11)), || format!("got [{lo}, {hi}]"))?;
    let (lf, hf) = (rational_to_f64(&lo), rational_to_f64(&hi));
    let (mut gmin, mut gmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..200 {
        for j in 0..200 {
            let t11 = 0.2 + 0.2 * i as f64 / 199.0;
            let t21 = 0.3 + 0.2 * j as f64 / 199.0;
            let x = t21 / (1.0 - t11 + t21);
            ensure(x >= lf - 1e-12 && x <= hf + 1e-12, || format!("grid value {x} outside"))?;
            gmin = gmin.min(x);
            gmax = gmax.max(x);
        }
    }
    ensure((gmin - lf).abs() < 1e-9 && (gmax - hf).abs() < 1e-9, || format!("grid range [{gmin}, {gmax}]"))?;
    Ok("[3/11, 5/11], attained at the grid corners".into())
}

fn ac12() -> Outcome {
    let mut rng = StdRng::seed_from_u64(12);
    let (mut chains, mut samples, mut outward) = (0, 0, 0usize);
    while chains < 20 {
        let rows: Vec<Vec<(Rational, Rational)>> = (0..3)
            .map(|_| {
                (0..3)
                    .map(|_| {
                        let a = rng.gen_range(1..=5);
                        let w = rng.gen_range(0..=6);
                        (rat(a, 20), rat((a + w).min(20), 20))
                    })
                    .collect()
            })
            .collect();
        let Ok(itm) = IntervalTransitionMatrix::new(rows) else { continue };
        chains += 1;
        let full = e(stationary_bounds_vertices(&itm))?;
        let verts: Vec<Vec<Vec<Rational>>> = (0..3).map(|k| itm.row_vertices(k).unwrap()).collect();
        // a random subset of vertex matrices
        let mut sub_lo = vec![Rational::one(); 3];
        let mut sub_hi = vec![Rational::zero(); 3];
        for _ in 0..5 {
            let t: Vec<Vec<Rational>> = verts.iter().map(|v| v[rng.gen_range(0..v.len())].clone()).collect();
            for (k, p) in e(stationary(&t))?.into_iter().enumerate() {
                sub_lo[k] = sub_lo[k].clone().min(p.clone());
                sub_hi[k] = sub_hi[k].clone().max(p);
            }
        }
        for k in 0..3 {
            let (lo, hi) = full.state(k);
            ensure(lo <= sub_lo[k] && sub_hi[k] <= hi, || format!("chain {chains}: subset bounds exceed full bounds"))?;
        }
        for _ in 0..500 {
            let seeds: Vec<u32> = (0..12).map(|_| rng.gen()).collect();
            let pi = e(stationary(&common::admissible_sample(&itm, &seeds)))?;
            samples += 1;
            for (k, p) in pi.iter().enumerate() {
                let (lo, hi) = full.state(k);
                if p < &lo || p > &hi {
                    outward += 1;
                    println!("      chain {chains}, state {k}: sample {} outside [{}, {}]", rational_to_f64(p), lo, hi);
                }
            }
        }
    }
    Ok(format!("{chains} chains, {samples} samples, {outward} outward excursions recorded"))
}

fn ac13() -> Outcome {
    let mut lines = Vec::new();
    for name in common::SUITES {
        common::suite(name, 256).map_err(|err| format!("{name}: {err}"))?;
        lines.push(name);
    }
    Ok(format!("{} suites clean: {}", lines.len(), lines.join(", ")))
}

type Criterion = (&'static str, &'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 13] = [
        ("AC1", "worked conditional example", ac1, Duration::from_secs(1)),
        ("AC2", "medical Bayes", ac2, Duration::from_secs(1)),
        ("AC3", "Bayes kernel sharpness", ac3, Duration::from_secs(30)),
        ("AC4", "credal Bayes parametric family", ac4, Duration::from_secs(1)),
        ("AC5", "CI combination table", ac5, Duration::from_secs(1)),
        ("AC6", "completeness convergence", ac6, Duration::from_secs(10)),
        ("AC7", "soundness sweeps", ac7, Duration::from_secs(60)),
        ("AC8", "Beta table", ac8, Duration::from_secs(5)),
        ("AC9", "fat Cantor layers", ac9, Duration::from_secs(2)),
        ("AC10", "IFS Cantor envelope", ac10, Duration::from_secs(5)),
        ("AC11", "two-state Markov exactness", ac11, Duration::from_secs(10)),
        ("AC12", "Markov inner approximation", ac12, Duration::from_secs(60)),
        ("AC13", "property suites", ac13, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (id, title, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if took <= budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d} (over the {budget:?} budget)")),
            Err(d) => ("FAIL", d),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} {id:<4} {title}: {detail} [{:.2}s]", took.as_secs_f64());
    }
    println!("{} of 13 criteria passed", 13 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
