//! Shared fixtures for the integration tests: the instance corpus and an
//! independent brute-force LP oracle.
#![allow(dead_code)]

use num_traits::{One, Signed, Zero};
use rand::Rng;
use shg::builders;
use shg::lp::{LpProblem, LpStatus};
use shg::rational::{int, ratio, Rational};
use shg::sampling;
use shg::FiniteSemihypergroup;

pub const RANDOM_CORPUS_SIZE: usize = 25;
pub const RANDOM_CORPUS_SEED: u64 = 20_240_601;

pub fn builder_corpus() -> Vec<(String, FiniteSemihypergroup)> {
    let mut out = Vec::new();
    for n in 1..=6 {
        out.push((format!("right_zero({n})"), builders::right_zero(n).unwrap()));
    }
    for n in 2..=4 {
        out.push((format!("left_zero({n})"), builders::left_zero(n).unwrap()));
    }
    for theta in [int(1), ratio(1, 2), ratio(1, 3), ratio(2, 5)] {
        out.push((format!("two_point({theta})"), builders::two_point(&theta).unwrap()));
    }
    out.push(("s3_classes".into(), builders::s3_classes().unwrap()));
    out.push(("cyclic(4)".into(), builders::group(&builders::cyclic_group_table(4)).unwrap()));
    out.push(("symmetric(3)".into(), builders::group(&builders::symmetric_group_table(3)).unwrap()));
    out.push((
        "classes(dihedral(4))".into(),
        builders::conjugacy_class(&builders::dihedral_group_table(4)).unwrap(),
    ));
    // p_0*p_2 splits its mass between {0} and {1}, so {0} is not of Type L.
    let split = vec![
        vec![int(1), int(0), int(0)],
        vec![int(0), int(1), int(0)],
        vec![ratio(1, 2), ratio(1, 2), int(0)],
    ];
    out.push(("right_kernel(split)".into(), builders::right_kernel(&split).unwrap()));
    out
}

pub fn corpus() -> Vec<(String, FiniteSemihypergroup)> {
    let mut out = builder_corpus();
    for (i, k) in sampling::random_corpus(RANDOM_CORPUS_SIZE, RANDOM_CORPUS_SEED).into_iter().enumerate() {
        out.push((format!("random[{i}]"), k));
    }
    out
}

/// Solves a square system exactly; `None` if singular.
pub fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = &a[r][col] / &a[col][col];
                let pivot_row = a[col].clone();
                for (target, source) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                    *target -= &factor * source;
                }
                let delta = &factor * &b[col];
                b[r] -= delta;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

fn subsets(m: usize, size: usize) -> Vec<Vec<usize>> {
    (0u32..1 << m)
        .filter(|mask| mask.count_ones() as usize == size)
        .map(|mask| (0..m).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

/// Vertices of `{x : E x = e, A x ≤ b}`: feasible solutions of every
/// nonsingular choice of `v` rows taken as equations.
pub fn vertices(eq: &[(Vec<Rational>, Rational)], le: &[(Vec<Rational>, Rational)], v: usize) -> Vec<Vec<Rational>> {
    let mut found: Vec<Vec<Rational>> = Vec::new();
    let rows: Vec<&(Vec<Rational>, Rational)> = eq.iter().chain(le).collect();
    for choice in subsets(rows.len(), v) {
        let a = choice.iter().map(|&i| rows[i].0.clone()).collect();
        let b = choice.iter().map(|&i| rows[i].1.clone()).collect();
        let Some(x) = solve_square(a, b) else { continue };
        let feasible = eq.iter().all(|(r, e)| &dot(r, &x) == e) && le.iter().all(|(r, c)| &dot(r, &x) <= c);
        if feasible && !found.contains(&x) {
            found.push(x);
        }
    }
    found
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleOutcome {
    Infeasible,
    Unbounded,
    Optimal { value: Rational, optimal_vertices: Vec<Vec<Rational>> },
}

/// Brute-force answer for a problem whose variables are all nonnegative.
pub fn lp_oracle(problem: &LpProblem) -> OracleOutcome {
    let v = problem.num_vars();
    let eq: Vec<_> = problem.equalities().iter().map(|c| (c.row.clone(), c.rhs.clone())).collect();
    let mut le: Vec<_> = problem.inequalities().iter().map(|c| (c.row.clone(), c.rhs.clone())).collect();
    for i in 0..v {
        let mut row = vec![Rational::zero(); v];
        row[i] = -Rational::one();
        le.push((row, Rational::zero()));
    }
    let points = vertices(&eq, &le, v);
    if points.is_empty() {
        return OracleOutcome::Infeasible;
    }
    let c = problem.objective().expect("oracle needs an objective").to_vec();

    // Recession cone, normalised by Σd = 1, has a vertex with c·d < 0 iff unbounded.
    let mut cone_eq: Vec<_> = eq.iter().map(|(r, _)| (r.clone(), Rational::zero())).collect();
    cone_eq.push((vec![Rational::one(); v], Rational::one()));
    let cone_le: Vec<_> = le.iter().map(|(r, _)| (r.clone(), Rational::zero())).collect();
    if vertices(&cone_eq, &cone_le, v).iter().any(|d| dot(&c, d).is_negative()) {
        return OracleOutcome::Unbounded;
    }
    let value = points.iter().map(|x| dot(&c, x)).min().unwrap();
    let optimal_vertices = points.into_iter().filter(|x| dot(&c, x) == value).collect();
    OracleOutcome::Optimal { value, optimal_vertices }
}

/// Random LP with at most four variables and six constraints.
pub fn random_lp(rng: &mut impl Rng) -> LpProblem {
    let v = rng.gen_range(1..=4);
    let m = rng.gen_range(1..=6);
    let mut problem = LpProblem::new(v);
    let coefficient = |rng: &mut dyn rand::RngCore| ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3));
    for _ in 0..m {
        let row: Vec<Rational> = (0..v).map(|_| coefficient(rng)).collect();
        let rhs = ratio(rng.gen_range(-3..=6), rng.gen_range(1..=2));
        match rng.gen_range(0..4) {
            0 => problem.add_equality(row, rhs),
            1 => problem.add_ge(row, rhs),
            _ => problem.add_le(row, rhs),
        };
    }
    let objective = (0..v).map(|_| coefficient(rng)).collect();
    problem.minimize(objective);
    problem
}

pub fn status_name(status: LpStatus) -> &'static str {
    match status {
        LpStatus::Feasible => "feasible",
        LpStatus::Infeasible => "infeasible",
        LpStatus::Optimal => "optimal",
        LpStatus::Unbounded => "unbounded",
    }
}
