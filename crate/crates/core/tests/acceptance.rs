//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

mod common;

use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use shg::amenability::{self, Condition3Options};
use shg::lp::{self, LpStatus};
use shg::measure::{self, SignedMeasure};
use shg::rational::{int, ratio, Rational};
use shg::{builders, format, sampling, FiniteSemihypergroup, PointSet};

use common::OracleOutcome;

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn right_zero_amenability() -> Check {
    let start = Instant::now();
    for n in 1..=6 {
        let k = builders::right_zero(n).unwrap();
        let cert = amenability::find_tlim(&k).map_err(|e| e.to_string())?.ok_or(format!("no TLIM for right_zero({n})"))?;
        for x in 0..n {
            let moved = measure::convolve(&k, &SignedMeasure::point_mass(n, x), &cert.mean).unwrap();
            ensure(&moved == cert.mean.as_signed(), || format!("p{x}*m != m for right_zero({n})"))?;
        }
        ensure(cert.residuals.iter().all(|r| r.norm.is_zero()), || format!("nonzero residual for n = {n}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("n = 1..6 in {elapsed:.2?}"))
}

fn commutative_amenability() -> Check {
    for theta in [int(1), ratio(1, 2), ratio(1, 3), ratio(2, 5)] {
        let k = builders::two_point(&theta).unwrap();
        let cert = amenability::find_tlim(&k).unwrap().ok_or(format!("no TLIM for θ = {theta}"))?;
        let denom = Rational::one() + &theta;
        let expected = vec![&theta / &denom, Rational::one() / &denom];
        ensure(cert.mean.coefficients() == expected.as_slice(), || {
            format!("θ = {theta}: got {}, expected ({}, {})", cert.mean, expected[0], expected[1])
        })?;
    }
    let s3c = builders::s3_classes().unwrap();
    let cert = amenability::find_tlim(&s3c).unwrap().ok_or("no TLIM for S3 classes")?;
    let expected = [ratio(1, 6), ratio(1, 2), ratio(1, 3)];
    ensure(cert.mean.coefficients() == expected, || format!("S3 classes: got {}", cert.mean))?;
    Ok("two-point θ ∈ {1, 1/2, 1/3, 2/5} and S3 classes".into())
}

fn left_zero_negative() -> Check {
    for n in 2..=4 {
        let k = builders::left_zero(n).unwrap();
        ensure(amenability::find_tlim(&k).unwrap().is_none(), || format!("left_zero({n}) has a TLIM"))?;
        let c3 = amenability::check_condition3(&k, None, Condition3Options::default()).unwrap();
        let witness = c3.refuting_witness().ok_or(format!("no gap witness for left_zero({n})"))?;
        ensure(witness.gap >= int(1), || format!("left_zero({n}) witness gap {}", witness.gap))?;
        ensure(amenability::find_stationary(&k).unwrap().is_none(), || format!("left_zero({n}) stationary"))?;
    }
    let defect = amenability::minimize_defect(&builders::left_zero(2).unwrap()).unwrap();
    ensure(defect.minimal_defect == int(1), || format!("δ* = {}", defect.minimal_defect))?;
    Ok("left_zero(2..4): no TLIM, gap witness, no stationary; δ* = 1 for n = 2".into())
}

fn four_way_equivalence(corpus: &[(String, FiniteSemihypergroup)]) -> Check {
    let start = Instant::now();
    let mut amenable = 0;
    for (name, k) in corpus {
        let report = amenability::verify_amenability_equivalence(k, Condition3Options::default()).map_err(|e| format!("{name}: {e}"))?;
        let outcomes = report.outcomes();
        ensure(outcomes.iter().all(|&b| b == outcomes[0]), || format!("{name}: outcomes {outcomes:?}"))?;
        if outcomes[0] {
            amenable += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    ensure(amenable > 0 && amenable < corpus.len(), || "corpus lacks one of the two outcomes".into())?;
    Ok(format!("{} structures ({amenable} amenable) in {elapsed:.2?}", corpus.len()))
}

/// `‖(μ*ν)_H − μ_H *_H ν_H‖` straight from the tensor entries.
fn gap_oracle(k: &FiniteSemihypergroup, h: &PointSet, mu: &SignedMeasure, nu: &SignedMeasure) -> Rational {
    let n = k.points();
    let mut diff = vec![Rational::zero(); n];
    for x in 0..n {
        for y in 0..n {
            let w = mu.coefficient(x) * nu.coefficient(y);
            if w.is_zero() {
                continue;
            }
            let both_in = h.contains(x) && h.contains(y);
            for z in h.iter() {
                let term = &w * k.entry(x, y, z);
                diff[z] += &term;
                if both_in {
                    diff[z] -= term;
                }
            }
        }
    }
    diff.iter().map(|v| v.abs()).sum()
}

const GAP_SAMPLES: u64 = 50;

fn gap_bounds(corpus: &[(String, FiniteSemihypergroup)]) -> Check {
    let mut checked = 0usize;
    for (ci, (name, k)) in corpus.iter().enumerate() {
        let hypergroup = k.hypergroup_structure();
        for sub in k.enumerate_sub_semihypergroups(None).unwrap() {
            let h = &sub.set;
            for i in 0..GAP_SAMPLES {
                let (mu, nu) = sampling::gap_sample(k.points(), h, ci as u64, i);
                let r = amenability::restriction_gap(k, h, &mu, &nu, hypergroup.as_ref()).unwrap();
                let at = || format!("{name}, H = {h}, sample {i}");
                ensure(r.gap == gap_oracle(k, h, &mu, &nu), || format!("{}: gap disagrees with oracle", at()))?;
                ensure(r.gap <= r.bound_general, || format!("{}: gap {} > bound {}", at(), r.gap, r.bound_general))?;
                let mu_in = mu.support().is_subset(h);
                if mu_in {
                    let b2 = r.bound_supported.clone().ok_or_else(|| format!("{}: missing supported bound", at()))?;
                    ensure(r.gap <= b2, || format!("{}: gap {} > supported bound {b2}", at(), r.gap))?;
                    if nu.support().is_subset(h) {
                        ensure(r.gap.is_zero(), || format!("{}: both supported but gap {}", at(), r.gap))?;
                    }
                    if hypergroup.as_ref().is_some_and(|hg| hg.is_sub_hypergroup(h)) {
                        ensure(r.gap.is_zero(), || format!("{}: sub-hypergroup case gap {}", at(), r.gap))?;
                    }
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (structure, H, sample) triples"))
}

fn sub_equivalence(corpus: &[(String, FiniteSemihypergroup)]) -> Check {
    let mut pairs = 0;
    let mut type_l = 0;
    for (name, k) in corpus {
        for sub in k.enumerate_sub_semihypergroups(None).unwrap() {
            let report = amenability::verify_sub_equivalence(k, &sub.set).map_err(|e| format!("{name}: {e}"))?;
            let (a, b, c) = report.outcomes();
            ensure(a == b, || format!("{name}, H = {}: standalone {a} vs full mass {b}", sub.set))?;
            if report.type_l {
                type_l += 1;
                ensure(a == c, || format!("{name}, H = {}: standalone {a} vs positive mass {c}", sub.set))?;
            }
            pairs += 1;
        }
    }
    ensure(type_l < pairs, || "every H is of Type L; the corpus misses the other case".into())?;
    Ok(format!("{pairs} (structure, H) pairs, {type_l} of Type L"))
}

fn mean_formulations() -> Check {
    let mut rng = sampling::rng(7, 0);
    for i in 0..100 {
        let n = 1 + i % 6;
        let m = sampling::random_probability(&mut rng, n);
        let f = measure::mean_formulations(m.coefficients());
        ensure(f.all(), || format!("probability vector {m}: {f:?}"))?;
    }
    for i in 0..100 {
        let n = 1 + i % 6;
        let v = sampling::random_non_mean(&mut rng, n);
        let f = measure::mean_formulations(&v);
        ensure(!f.all(), || format!("non-mean {v:?} passes every formulation"))?;
    }
    Ok("100 means, 100 non-means".into())
}

fn lp_oracle_agreement() -> Check {
    let mut rng = sampling::rng(11, 0);
    let mut tally = [0usize; 3];
    for i in 0..200 {
        let problem = common::random_lp(&mut rng);
        let solution = lp::solve_lp(&problem).map_err(|e| format!("problem {i}: {e}"))?;
        match common::lp_oracle(&problem) {
            OracleOutcome::Infeasible => {
                ensure(solution.status == LpStatus::Infeasible, || format!("problem {i}: {:?} vs infeasible", solution.status))?;
                let cert = solution.farkas.as_ref().ok_or(format!("problem {i}: no certificate"))?;
                ensure(cert.verify(&problem), || format!("problem {i}: certificate fails"))?;
                tally[0] += 1;
            }
            OracleOutcome::Unbounded => {
                ensure(solution.status == LpStatus::Unbounded, || format!("problem {i}: {:?} vs unbounded", solution.status))?;
                tally[1] += 1;
            }
            OracleOutcome::Optimal { value, optimal_vertices } => {
                ensure(solution.status == LpStatus::Optimal, || format!("problem {i}: {:?} vs optimal", solution.status))?;
                ensure(solution.objective_value.as_ref() == Some(&value), || format!("problem {i}: value mismatch"))?;
                let point = solution.point.as_ref().ok_or(format!("problem {i}: no point"))?;
                ensure(optimal_vertices.contains(point), || format!("problem {i}: {point:?} is not an optimal vertex"))?;
                tally[2] += 1;
            }
        }
    }
    Ok(format!("{} infeasible, {} unbounded, {} optimal", tally[0], tally[1], tally[2]))
}

fn fixed_point_identity(corpus: &[(String, FiniteSemihypergroup)]) -> Check {
    let mut certificates = 0;
    for (ci, (name, k)) in corpus.iter().enumerate() {
        let Some(cert) = amenability::find_tlim(k).unwrap() else { continue };
        certificates += 1;
        for mu in sampling::sample_measures(k.points(), 100, ci as u64, sampling::MeasureConstraint::Signed) {
            let lhs = measure::convolve(k, &mu, &cert.mean).unwrap();
            let rhs = cert.mean.as_signed().scaled(&mu.mass());
            ensure(lhs == rhs, || format!("{name}: μ*m != μ(K)m for μ = {mu}"))?;
        }
    }
    Ok(format!("{certificates} certificates × 100 measures"))
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = shg::cli::run(std::iter::once("shg").chain(args.iter().copied()), &mut out, &mut err);
    (code, out)
}

fn round_trip_and_determinism(corpus: &[(String, FiniteSemihypergroup)]) -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = Vec::new();
    for (i, (name, k)) in corpus.iter().enumerate() {
        let text = format::emit_structure(k);
        let parsed = format::parse_structure(&text).map_err(|e| format!("{name}: {e}"))?;
        ensure(&parsed == k, || format!("{name}: parse(emit(k)) != k"))?;
        ensure(format::emit_structure(&parsed) == text, || format!("{name}: emit not stable"))?;
        let path = dir.path().join(format!("corpus_{i}.shg"));
        std::fs::write(&path, &text).unwrap();
        files.push(path);
    }
    let data = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    for entry in std::fs::read_dir(&data).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let k = format::parse_structure(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let canonical = format::emit_structure(&k);
        ensure(format::emit_structure(&format::parse_structure(&canonical).unwrap()) == canonical, || {
            format!("{}: canonical form not a fixed point", path.display())
        })?;
        files.push(path);
    }
    for path in &files {
        let p = path.to_str().unwrap();
        let k = format::parse_structure(&std::fs::read_to_string(path).unwrap()).unwrap();
        let mut runs = vec![vec!["amen", p, "--seed", "5", "--format", "json"]];
        if k.is_closed(&PointSet::singleton(k.points(), 0)) {
            runs.push(vec!["gap", p, "--sub", "0", "--seed", "9", "--format", "json"]);
        }
        for args in runs {
            let first = run_cli(&args);
            let second = run_cli(&args);
            ensure(first == second, || format!("{args:?}: reports differ between runs"))?;
        }
    }
    Ok(format!("{} files round-trip; reports byte-identical on rerun", files.len()))
}

fn main() {
    let corpus = common::corpus();
    let criteria: Vec<Criterion> = vec![
        ("right-zero amenability", Box::new(right_zero_amenability)),
        ("commutative amenability", Box::new(commutative_amenability)),
        ("left-zero negative instance", Box::new(left_zero_negative)),
        ("four-way amenability equivalence", Box::new(|| four_way_equivalence(&corpus))),
        ("restriction gap bounds", Box::new(|| gap_bounds(&corpus))),
        ("sub-semihypergroup mean equivalence", Box::new(|| sub_equivalence(&corpus))),
        ("mean formulations", Box::new(mean_formulations)),
        ("LP oracle agreement", Box::new(lp_oracle_agreement)),
        ("fixed-point identity", Box::new(|| fixed_point_identity(&corpus))),
        ("round trip and determinism", Box::new(|| round_trip_and_determinism(&corpus))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
