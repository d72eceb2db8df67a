//! Seeded random measures and structures. Every generator takes an explicit
//! seed and uses ChaCha8, so runs are reproducible across platforms.

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::builders;
use crate::measure::{ProbabilityMeasure, SignedMeasure};
use crate::pointset::PointSet;
use crate::rational::{self, Rational};
use crate::structure::FiniteSemihypergroup;

/// Largest denominator used for sampled coefficients.
pub const MAX_DENOMINATOR: i64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureConstraint {
    /// Nonnegative, total mass one.
    Probability,
    /// Total mass zero and norm at most 2.
    MassZero,
    /// Arbitrary coefficients in `[-1, 1]`.
    Signed,
}

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn scatter(rng: &mut impl Rng, units: i64, slots: &[usize], into: &mut [i64], sign: i64) {
    for _ in 0..units {
        into[*slots.choose(rng).expect("nonempty support")] += sign;
    }
}

fn over(counts: Vec<i64>, q: i64) -> Vec<Rational> {
    counts.into_iter().map(|c| rational::ratio(c, q)).collect()
}

fn all_points(n: usize) -> Vec<usize> {
    (0..n).collect()
}

pub fn random_probability(rng: &mut impl Rng, n: usize) -> ProbabilityMeasure {
    random_probability_on(rng, n, &all_points(n))
}

/// Probability vector supported inside `support` (which must be nonempty).
pub fn random_probability_on(rng: &mut impl Rng, n: usize, support: &[usize]) -> ProbabilityMeasure {
    let q = rng.gen_range(1..=MAX_DENOMINATOR);
    let mut counts = vec![0; n];
    scatter(rng, q, support, &mut counts, 1);
    ProbabilityMeasure::new(over(counts, q)).expect("counts sum to q")
}

pub fn random_mass_zero(rng: &mut impl Rng, n: usize) -> SignedMeasure {
    let q = rng.gen_range(1..=MAX_DENOMINATOR);
    let units = rng.gen_range(0..=q);
    let mut counts = vec![0; n];
    let points = all_points(n);
    scatter(rng, units, &points, &mut counts, 1);
    scatter(rng, units, &points, &mut counts, -1);
    SignedMeasure::new(over(counts, q))
}

/// Coefficients `k/q` with `|k| ≤ q`, zero outside `support`.
pub fn random_signed_on(rng: &mut impl Rng, n: usize, support: &[usize]) -> SignedMeasure {
    let q = rng.gen_range(1..=MAX_DENOMINATOR);
    let mut counts = vec![0; n];
    for &z in support {
        counts[z] = rng.gen_range(-q..=q);
    }
    SignedMeasure::new(over(counts, q))
}

pub fn sample_measures(n: usize, count: usize, seed: u64, constraint: MeasureConstraint) -> Vec<SignedMeasure> {
    let mut rng = rng(seed, 0);
    let points = all_points(n);
    (0..count)
        .map(|_| match constraint {
            MeasureConstraint::Probability => random_probability(&mut rng, n).into_signed(),
            MeasureConstraint::MassZero => random_mass_zero(&mut rng, n),
            MeasureConstraint::Signed => random_signed_on(&mut rng, n, &points),
        })
        .collect()
}

/// The `index`-th `(μ, ν)` pair for restriction-gap sampling relative to `h`.
/// Pairs cycle through four shapes: both supported in `h`, only `μ`,
/// neither, only `ν`.
pub fn gap_sample(n: usize, h: &PointSet, seed: u64, index: u64) -> (SignedMeasure, SignedMeasure) {
    let mut rng = rng(seed, index);
    let inside = h.to_vec();
    let everywhere = all_points(n);
    let (mu_in, nu_in) = match index % 4 {
        0 => (true, true),
        1 => (true, false),
        2 => (false, false),
        _ => (false, true),
    };
    let mu = random_signed_on(&mut rng, n, if mu_in { &inside } else { &everywhere });
    let nu = random_signed_on(&mut rng, n, if nu_in { &inside } else { &everywhere });
    (mu, nu)
}

/// A vector that is not a mean: negative somewhere or of the wrong mass.
pub fn random_non_mean(rng: &mut impl Rng, n: usize) -> Vec<Rational> {
    loop {
        let candidate = random_signed_on(rng, n, &all_points(n)).coefficients().to_vec();
        let nonneg = candidate.iter().all(|c| !c.is_negative());
        if !(nonneg && rational::sum(&candidate).is_one()) {
            return candidate;
        }
    }
}

/// Idempotent stochastic matrix `AB`: `B` holds distributions on disjoint
/// blocks, `A` maps each block point to its own block and every other point
/// to an arbitrary mixture of blocks.
fn random_idempotent(rng: &mut impl Rng, n: usize) -> Vec<Vec<Rational>> {
    let mut points = all_points(n);
    points.shuffle(rng);
    let blocks = rng.gen_range(1..=n.min(3));
    let mut supports: Vec<Vec<usize>> = vec![Vec::new(); blocks];
    let mut cursor = 0;
    for (j, support) in supports.iter_mut().enumerate() {
        let remaining_blocks = blocks - j - 1;
        let max_take = n - cursor - remaining_blocks;
        let take = if remaining_blocks == 0 { rng.gen_range(1..=max_take) } else { rng.gen_range(1..=max_take.min(2)) };
        support.extend_from_slice(&points[cursor..cursor + take]);
        cursor += take;
    }
    let pis: Vec<ProbabilityMeasure> = supports.iter().map(|s| random_probability_on(rng, n, s)).collect();
    let mut block_of = vec![None; n];
    for (j, s) in supports.iter().enumerate() {
        for &x in s {
            block_of[x] = Some(j);
        }
    }
    (0..n)
        .map(|x| {
            let weights: Vec<Rational> = match block_of[x] {
                Some(j) => (0..blocks).map(|i| if i == j { Rational::one() } else { Rational::zero() }).collect(),
                None => random_probability(rng, blocks).coefficients().to_vec(),
            };
            (0..n)
                .map(|z| {
                    weights
                        .iter()
                        .zip(&pis)
                        .fold(Rational::zero(), |acc, (w, pi)| acc + w * &pi.coefficients()[z])
                })
                .collect()
        })
        .collect()
}

fn small_block(rng: &mut impl Rng) -> FiniteSemihypergroup {
    let theta = rational::ratio(rng.gen_range(1..=6), 6);
    match rng.gen_range(0..6) {
        0 => builders::right_zero(rng.gen_range(1..=2)),
        1 => builders::left_zero(2),
        2 => builders::two_point(&theta),
        3 => builders::group(&builders::cyclic_group_table(rng.gen_range(2..=3))),
        4 => builders::constant(random_probability(rng, 2).coefficients()),
        _ => builders::left_kernel(&random_idempotent(rng, 2)),
    }
    .expect("small blocks are valid")
}

fn base_structure(rng: &mut impl Rng) -> FiniteSemihypergroup {
    let n = rng.gen_range(1..=5);
    let built = match rng.gen_range(0..8) {
        0 => builders::constant(random_probability(rng, n).coefficients()),
        1 => builders::left_kernel(&random_idempotent(rng, n)),
        2 => builders::right_kernel(&random_idempotent(rng, n)),
        3 => {
            let a = small_block(rng);
            let b = small_block(rng);
            if a.points() * b.points() <= 6 {
                builders::product(&a, &b)
            } else {
                Ok(a)
            }
        }
        4 => builders::adjoin_identity(&small_block(rng)),
        5 => builders::adjoin_zero(&small_block(rng)),
        6 => builders::two_point(&rational::ratio(rng.gen_range(1..=9), rng.gen_range(9..=12))),
        _ => builders::conjugacy_class(&builders::dihedral_group_table(rng.gen_range(3..=5))),
    };
    built.expect("corpus combinators produce valid structures")
}

/// Replaces one random row by a random distribution, keeping the change only
/// if the axioms still hold.
fn perturb(rng: &mut impl Rng, k: FiniteSemihypergroup) -> FiniteSemihypergroup {
    let n = k.points();
    let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
    let mut tensor = k.tensor().clone();
    let row = random_probability(rng, n).coefficients().to_vec();
    if tensor.set_row(x, y, row).is_err() {
        return k;
    }
    FiniteSemihypergroup::new(tensor, None).unwrap_or(k)
}

/// Deterministic random structure with at most six points.
pub fn random_structure(seed: u64) -> FiniteSemihypergroup {
    let mut rng = rng(seed, u64::MAX);
    let mut k = base_structure(&mut rng);
    if rng.gen_bool(0.5) {
        k = perturb(&mut rng, k);
    }
    let mut perm = all_points(k.points());
    perm.shuffle(&mut rng);
    builders::relabel(&k, &perm).expect("permutation of the points")
}

pub fn random_corpus(count: usize, seed: u64) -> Vec<FiniteSemihypergroup> {
    (0..count as u64).map(|i| random_structure(seed.wrapping_add(i))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_constrained() {
        let a = sample_measures(4, 20, 7, MeasureConstraint::MassZero);
        assert_eq!(a, sample_measures(4, 20, 7, MeasureConstraint::MassZero));
        for mu in &a {
            assert!(mu.mass().is_zero());
            assert!(mu.tv_norm() <= rational::int(2));
        }
        for mu in sample_measures(3, 20, 1, MeasureConstraint::Probability) {
            assert!(ProbabilityMeasure::try_from_signed(mu).is_ok());
        }
        for mu in sample_measures(3, 20, 1, MeasureConstraint::Signed) {
            assert!(mu.coefficients().iter().all(|c| c.denom() <= &num_bigint::BigInt::from(MAX_DENOMINATOR)));
        }
    }

    #[test]
    fn gap_samples_respect_shape() {
        let h = PointSet::from_indices(5, [1, 3]);
        for i in 0..8 {
            let (mu, nu) = gap_sample(5, &h, 3, i);
            if i % 4 <= 1 {
                assert!(mu.support().is_subset(&h));
            }
            if i % 4 == 0 || i % 4 == 3 {
                assert!(nu.support().is_subset(&h));
            }
        }
    }

    #[test]
    fn random_structures_are_valid() {
        for seed in 0..40 {
            let k = random_structure(seed);
            assert!(k.points() <= 6);
            assert!(k.tensor().verify_axioms().is_empty());
            assert_eq!(k.tensor(), random_structure(seed).tensor());
        }
    }

    #[test]
    fn idempotent_matrices() {
        let mut r = rng(5, 0);
        for n in 1..=6 {
            for _ in 0..10 {
                let p = random_idempotent(&mut r, n);
                assert!(builders::right_kernel(&p).is_ok());
                assert!(builders::left_kernel(&p).is_ok());
            }
        }
    }

    #[test]
    fn non_means() {
        let mut r = rng(2, 0);
        for _ in 0..20 {
            let v = random_non_mean(&mut r, 3);
            assert!(!crate::measure::mean_formulations(&v).any());
        }
    }
}
