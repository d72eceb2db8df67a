//! Topological left invariant means and the conditions equivalent to their
//! existence, decided exactly with linear programming.
//!
//! On a finite structure invariance under every `ν ∈ P(K)` reduces to
//! invariance under the point masses: if `p_x*m = m` for all `x` then
//! `ν*m = Σ_x ν({x}) p_x*m = m`. Nets over the compact simplex `P(K)` collapse
//! to exact fixed points, so each condition becomes one finite LP.

use std::collections::HashSet;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::lp::{self, LpError, LpProblem, LpStatus};
use crate::measure::{self, MeasureError, ProbabilityMeasure, SignedMeasure};
use crate::pointset::PointSet;
use crate::rational::{self, Rational};
use crate::report::{ser_opt_rational, ser_rational};
use crate::sampling::{self, MeasureConstraint};
use crate::structure::{FiniteSemihypergroup, HypergroupStructure, InverseMode, Side, StructureError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AmenabilityError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("certificate check failed: {0}")]
    Certificate(String),
}

type Result<T> = std::result::Result<T, AmenabilityError>;

/// Reading of the operator-algebraic condition, which is never computed on
/// its own: left amenability of the measure algebra as an F-algebra is
/// equivalent to TLIM existence through Lau's criterion.
pub const F_ALGEBRA_NOTE: &str = "F-algebra left amenability: equal to TLIM existence by Lau's criterion (not computed independently)";

/// Reading of LIM versus TLIM on a finite structure.
pub const LIM_NOTE: &str =
    "LIM and TLIM coincide on finite structures; the general converse question cannot be probed here";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeanScope {
    WholeK,
    HInvariant { h: PointSet },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Residual {
    pub point: usize,
    #[serde(serialize_with = "ser_rational")]
    pub norm: Rational,
}

/// A probability measure `m` with `p_x*m = m` for every translating point
/// `x`, with the exact residuals `‖p_x*m − m‖` that prove it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeanCertificate {
    pub mean: ProbabilityMeasure,
    pub scope: MeanScope,
    pub residuals: Vec<Residual>,
    #[serde(serialize_with = "ser_opt_rational")]
    pub mass_on_h: Option<Rational>,
}

impl MeanCertificate {
    fn build(k: &FiniteSemihypergroup, mean: ProbabilityMeasure, scope: MeanScope) -> Result<Self> {
        let (translators, mass_on_h) = match &scope {
            MeanScope::WholeK => (k.universe(), None),
            MeanScope::HInvariant { h } => (h.clone(), Some(mean.mass_on(h))),
        };
        let residuals = translators
            .iter()
            .map(|x| {
                let moved = measure::convolve(k, &SignedMeasure::point_mass(k.points(), x), &mean)?;
                Ok(Residual {
                    point: x,
                    norm: (&moved - mean.as_signed()).tv_norm(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(bad) = residuals.iter().find(|r| !r.norm.is_zero()) {
            return Err(AmenabilityError::Certificate(format!(
                "residual {} at point {}",
                bad.norm, bad.point
            )));
        }
        Ok(MeanCertificate {
            mean,
            scope,
            residuals,
            mass_on_h,
        })
    }
}

fn point_mass(n: usize, x: usize) -> SignedMeasure {
    SignedMeasure::point_mass(n, x)
}

/// Linear form `m ↦ (p_x*m − m)({z})` as a coefficient row over `m`.
fn invariance_row(k: &FiniteSemihypergroup, x: usize, z: usize) -> Vec<Rational> {
    let n = k.points();
    let mut row: Vec<Rational> = (0..n).map(|y| k.entry(x, y, z).clone()).collect();
    row[z] -= Rational::one();
    row
}

/// `{m ≥ 0, Σm = 1, p_x*m = m for x ∈ translators}`, with trivial and
/// duplicate rows dropped.
fn invariance_problem(k: &FiniteSemihypergroup, translators: &PointSet) -> LpProblem {
    let n = k.points();
    let mut problem = LpProblem::new(n);
    problem.add_equality(vec![Rational::one(); n], Rational::one());
    let mut seen = HashSet::new();
    for x in translators.iter() {
        for z in 0..n {
            let row = invariance_row(k, x, z);
            if row.iter().all(Zero::is_zero) || !seen.insert(row.clone()) {
                continue;
            }
            problem.add_equality(row, Rational::zero());
        }
    }
    problem
}

fn probability(point: Vec<Rational>) -> Result<ProbabilityMeasure> {
    ProbabilityMeasure::new(point).map_err(AmenabilityError::from)
}

/// A topological left invariant mean, if one exists.
pub fn find_tlim(k: &FiniteSemihypergroup) -> Result<Option<MeanCertificate>> {
    let solution = lp::solve_feasibility(&invariance_problem(k, &k.universe()))?;
    match solution.point {
        Some(point) => Ok(Some(MeanCertificate::build(k, probability(point)?, MeanScope::WholeK)?)),
        None => Ok(None),
    }
}

/// A left invariant mean. Point-mass invariance already gives invariance
/// under all of `P(K)` here, so this is the same system as [`find_tlim`].
pub fn find_lim(k: &FiniteSemihypergroup) -> Result<Option<MeanCertificate>> {
    find_tlim(k)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DefectReport {
    /// `δ* = min_{m ∈ P(K)} max_x ‖p_x*m − m‖`.
    #[serde(serialize_with = "ser_rational")]
    pub minimal_defect: Rational,
    pub minimizer: ProbabilityMeasure,
    /// `‖p_x*m − m‖` at the minimizer, per point `x`.
    pub point_defects: Vec<Residual>,
}

impl DefectReport {
    pub fn is_zero(&self) -> bool {
        self.minimal_defect.is_zero()
    }
}

/// Minimises the worst invariance defect over `P(K)`.
///
/// Variables are `m` (n), `t[x][z] ≥ |(p_x*m − m)({z})|` (n²) and the bound
/// `s ≥ Σ_z t[x][z]` for every `x`; the objective is `s`.
pub fn minimize_defect(k: &FiniteSemihypergroup) -> Result<DefectReport> {
    let n = k.points();
    let t = |x: usize, z: usize| n + x * n + z;
    let s = n + n * n;
    let vars = s + 1;
    let mut problem = LpProblem::new(vars);
    let mut mass = vec![Rational::zero(); vars];
    mass[..n].fill(Rational::one());
    problem.add_equality(mass, Rational::one());
    for x in 0..n {
        for z in 0..n {
            let form = invariance_row(k, x, z);
            let mut upper = vec![Rational::zero(); vars];
            let mut lower = vec![Rational::zero(); vars];
            for (y, c) in form.iter().enumerate() {
                upper[y] = c.clone();
                lower[y] = -c;
            }
            upper[t(x, z)] = -Rational::one();
            lower[t(x, z)] = -Rational::one();
            problem.add_le(upper, Rational::zero());
            problem.add_le(lower, Rational::zero());
        }
        let mut cap = vec![Rational::zero(); vars];
        for z in 0..n {
            cap[t(x, z)] = Rational::one();
        }
        cap[s] = -Rational::one();
        problem.add_le(cap, Rational::zero());
    }
    let mut objective = vec![Rational::zero(); vars];
    objective[s] = Rational::one();
    problem.minimize(objective);

    let solution = lp::solve_lp(&problem)?;
    let (Some(point), Some(value)) = (solution.point, solution.objective_value) else {
        return Err(AmenabilityError::Certificate(format!(
            "defect program ended with status {:?}",
            solution.status
        )));
    };
    let minimizer = probability(point[..n].to_vec())?;
    let point_defects = (0..n)
        .map(|x| {
            let moved = measure::convolve(k, &point_mass(n, x), &minimizer)?;
            Ok(Residual {
                point: x,
                norm: (&moved - minimizer.as_signed()).tv_norm(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = point_defects.iter().map(|r| &r.norm).max().cloned().unwrap_or_default();
    if worst != value {
        return Err(AmenabilityError::Certificate(format!(
            "defect optimum {value} disagrees with recomputed {worst}"
        )));
    }
    Ok(DefectReport {
        minimal_defect: value,
        minimizer,
        point_defects,
    })
}

/// `min{‖μ*ν‖ : ν ∈ P(K)}` and a minimizing `ν`.
///
/// Variables are `ν` (n) and `t[z] ≥ |(μ*ν)({z})|` (n); the objective is `Σ t`.
pub fn inf_conv_norm(k: &FiniteSemihypergroup, mu: &SignedMeasure) -> Result<(Rational, ProbabilityMeasure)> {
    let n = k.points();
    // column y holds μ*p_y
    let columns = (0..n)
        .map(|y| measure::convolve(k, mu, &point_mass(n, y)))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let vars = 2 * n;
    let mut problem = LpProblem::new(vars);
    let mut mass = vec![Rational::zero(); vars];
    mass[..n].fill(Rational::one());
    problem.add_equality(mass, Rational::one());
    for z in 0..n {
        let mut upper = vec![Rational::zero(); vars];
        let mut lower = vec![Rational::zero(); vars];
        for (y, column) in columns.iter().enumerate() {
            upper[y] = column.coefficient(z).clone();
            lower[y] = -column.coefficient(z);
        }
        upper[n + z] = -Rational::one();
        lower[n + z] = -Rational::one();
        problem.add_le(upper, Rational::zero());
        problem.add_le(lower, Rational::zero());
    }
    let mut objective = vec![Rational::zero(); vars];
    objective[n..].fill(Rational::one());
    problem.minimize(objective);

    let solution = lp::solve_lp(&problem)?;
    let (Some(point), Some(value)) = (solution.point, solution.objective_value) else {
        return Err(AmenabilityError::Certificate(format!(
            "convolution-norm program ended with status {:?}",
            solution.status
        )));
    };
    let nu = probability(point[..n].to_vec())?;
    let achieved = measure::convolve(k, mu, &nu)?.tv_norm();
    if achieved != value {
        return Err(AmenabilityError::Certificate(format!(
            "norm optimum {value} disagrees with recomputed {achieved}"
        )));
    }
    if value < mu.mass().abs() {
        return Err(AmenabilityError::Certificate(format!(
            "norm optimum {value} below |μ(K)| = {}",
            mu.mass().abs()
        )));
    }
    Ok((value, nu))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessResult {
    pub label: String,
    pub measure: SignedMeasure,
    #[serde(serialize_with = "ser_rational")]
    pub mass_abs: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub infimum: Rational,
    /// `inf‖μ*ν‖ − |μ(K)|`, never negative.
    #[serde(serialize_with = "ser_rational")]
    pub gap: Rational,
    pub minimizer: ProbabilityMeasure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Condition3Verdict {
    /// Some witness has a strictly positive gap.
    Refuted { witness: usize },
    /// Every tested witness has gap zero.
    Consistent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Condition3Report {
    pub witnesses: Vec<WitnessResult>,
    pub verdict: Condition3Verdict,
    /// Set when the default family's iterated construction ran to completion;
    /// that product measure is then itself invariant.
    pub constructed_mean: Option<ProbabilityMeasure>,
}

impl Condition3Report {
    pub fn refuted(&self) -> bool {
        matches!(self.verdict, Condition3Verdict::Refuted { .. })
    }

    pub fn refuting_witness(&self) -> Option<&WitnessResult> {
        match self.verdict {
            Condition3Verdict::Refuted { witness } => self.witnesses.get(witness),
            Condition3Verdict::Consistent => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Condition3Options {
    pub random_witnesses: usize,
    pub seed: u64,
}

impl Default for Condition3Options {
    fn default() -> Self {
        Condition3Options {
            random_witnesses: 8,
            seed: 0,
        }
    }
}

fn witness_result(k: &FiniteSemihypergroup, label: String, mu: SignedMeasure) -> Result<WitnessResult> {
    let (infimum, minimizer) = inf_conv_norm(k, &mu)?;
    let mass_abs = mu.mass().abs();
    let gap = &infimum - &mass_abs;
    Ok(WitnessResult {
        label,
        measure: mu,
        mass_abs,
        infimum,
        gap,
        minimizer,
    })
}

/// Tests `|μ(K)| = inf{‖μ*ν‖ : ν ∈ P(K)}` on a family of witnesses.
///
/// With `witnesses = None` the family is `p_x*p_y − p_y`, `p_x − p_y`, seeded
/// random measures of mass zero, and the iterated measures `p_x*ρ − ρ`:
/// starting from `ρ = p_0`, each `x` in turn gets a minimizer `ν` of
/// `‖(p_x*ρ − ρ)*ν‖` and `ρ ← ρ*ν`. Right-multiplying keeps every earlier
/// `p_y*ρ = ρ`, so if all those infima are zero the final `ρ` is invariant;
/// otherwise one of them is a strict-gap witness. The default family is
/// therefore decisive.
pub fn check_condition3(
    k: &FiniteSemihypergroup,
    witnesses: Option<&[SignedMeasure]>,
    options: Condition3Options,
) -> Result<Condition3Report> {
    let n = k.points();
    let mut results = Vec::new();
    let mut constructed_mean = None;
    match witnesses {
        Some(list) => {
            for (i, mu) in list.iter().enumerate() {
                results.push(witness_result(k, format!("supplied[{i}]"), mu.clone())?);
            }
        }
        None => {
            let mut seen = HashSet::new();
            let mut family = Vec::new();
            for x in 0..n {
                for y in 0..n {
                    let prod = measure::convolve(k, &point_mass(n, x), &point_mass(n, y))?;
                    family.push((format!("p{x}*p{y} - p{y}"), &prod - &point_mass(n, y)));
                }
            }
            for x in 0..n {
                for y in 0..n {
                    if x != y {
                        family.push((format!("p{x} - p{y}"), &point_mass(n, x) - &point_mass(n, y)));
                    }
                }
            }
            let random = sampling::sample_measures(n, options.random_witnesses, options.seed, MeasureConstraint::MassZero);
            for (i, mu) in random.into_iter().enumerate() {
                family.push((format!("random[{i}]"), mu));
            }
            for (label, mu) in family {
                if mu.is_zero() || !seen.insert(mu.coefficients().to_vec()) {
                    continue;
                }
                results.push(witness_result(k, label, mu)?);
            }

            let mut rho = SignedMeasure::point_mass(n, 0);
            let mut complete = true;
            for x in 0..n {
                let moved = measure::convolve(k, &point_mass(n, x), &rho)?;
                let mu = &moved - &rho;
                let result = witness_result(k, format!("iterated p{x}*rho - rho"), mu)?;
                let stalled = result.gap.is_positive();
                let nu = result.minimizer.clone();
                results.push(result);
                if stalled {
                    complete = false;
                    break;
                }
                rho = measure::convolve(k, &rho, &nu)?;
            }
            if complete {
                constructed_mean = Some(ProbabilityMeasure::try_from_signed(rho)?);
            }
        }
    }
    let verdict = match results.iter().position(|r| r.gap.is_positive()) {
        Some(witness) => Condition3Verdict::Refuted { witness },
        None => Condition3Verdict::Consistent,
    };
    if let Some(mean) = &constructed_mean {
        MeanCertificate::build(k, mean.clone(), MeanScope::WholeK)?;
    }
    Ok(Condition3Report {
        witnesses: results,
        verdict,
        constructed_mean,
    })
}

/// A `ν ∈ P(K)` with `p_z*ν` independent of `z`, which makes every right
/// translate `R_ν φ` a constant multiple of `𝟙`.
pub fn find_stationary(k: &FiniteSemihypergroup) -> Result<Option<ProbabilityMeasure>> {
    let n = k.points();
    let mut problem = LpProblem::new(n);
    problem.add_equality(vec![Rational::one(); n], Rational::one());
    let mut seen = HashSet::new();
    for z in 1..n {
        for w in 0..n {
            let row: Vec<Rational> = (0..n).map(|y| k.entry(z, y, w) - k.entry(0, y, w)).collect();
            if row.iter().all(Zero::is_zero) || !seen.insert(row.clone()) {
                continue;
            }
            problem.add_equality(row, Rational::zero());
        }
    }
    let solution = lp::solve_feasibility(&problem)?;
    let Some(point) = solution.point else {
        return Ok(None);
    };
    let nu = probability(point)?;
    let first = measure::convolve(k, &point_mass(n, 0), &nu)?;
    for z in 1..n {
        if measure::convolve(k, &point_mass(n, z), &nu)? != first {
            return Err(AmenabilityError::Certificate(format!("p{z}*ν differs from p0*ν")));
        }
    }
    Ok(Some(nu))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MassMode {
    /// Require `m(χ_H) = 1`.
    Full,
    /// Maximise `m(χ_H)` and accept any positive optimum.
    Max,
}

fn require_closed(k: &FiniteSemihypergroup, h: &PointSet) -> Result<()> {
    k.check_subset(h)?;
    if !k.is_closed(h) {
        return Err(StructureError::NotClosed { set: h.clone() }.into());
    }
    Ok(())
}

/// `max{m(χ_H) : m ∈ P(K), p_y*m = m ∀y ∈ H}` and a maximiser, or `None`
/// when no `H`-invariant mean exists at all.
pub fn max_h_mass(k: &FiniteSemihypergroup, h: &PointSet) -> Result<Option<(Rational, ProbabilityMeasure)>> {
    require_closed(k, h)?;
    let mut problem = invariance_problem(k, h);
    let objective = (0..k.points())
        .map(|z| if h.contains(z) { -Rational::one() } else { Rational::zero() })
        .collect();
    problem.minimize(objective);
    let solution = lp::solve_lp(&problem)?;
    match (solution.status, solution.point, solution.objective_value) {
        (LpStatus::Optimal, Some(point), Some(value)) => Ok(Some((-value, probability(point)?))),
        (LpStatus::Infeasible, _, _) => Ok(None),
        (status, _, _) => Err(AmenabilityError::Certificate(format!(
            "mass program ended with status {status:?}"
        ))),
    }
}

/// A mean on `K` invariant under translation by measures supported in `H`.
/// `Full` asks for all mass on `H`; `Max` for positive mass on `H`.
pub fn find_h_invariant_mean(k: &FiniteSemihypergroup, h: &PointSet, mode: MassMode) -> Result<Option<MeanCertificate>> {
    require_closed(k, h)?;
    let scope = MeanScope::HInvariant { h: h.clone() };
    match mode {
        MassMode::Full => {
            let mut problem = invariance_problem(k, h);
            if !h.is_full() {
                let row = (0..k.points())
                    .map(|z| if h.contains(z) { Rational::one() } else { Rational::zero() })
                    .collect();
                problem.add_equality(row, Rational::one());
            }
            let solution = lp::solve_feasibility(&problem)?;
            match solution.point {
                Some(point) => Ok(Some(MeanCertificate::build(k, probability(point)?, scope)?)),
                None => Ok(None),
            }
        }
        MassMode::Max => match max_h_mass(k, h)? {
            Some((value, mean)) if value.is_positive() => Ok(Some(MeanCertificate::build(k, mean, scope)?)),
            _ => Ok(None),
        },
    }
}

/// Comparison of `(μ*ν)_H` with `μ_H * ν_H` and the bounds on their distance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapReport {
    /// `‖(μ*ν)_H − μ_H * ν_H‖`.
    #[serde(serialize_with = "ser_rational")]
    pub gap: Rational,
    /// `Σ_y |ν|({y})·|μ|(Hỹ ∩ H^c) + Σ_x |μ|({x})·|ν|(x̃H ∩ H^c)`.
    #[serde(serialize_with = "ser_rational")]
    pub bound_general: Rational,
    /// `Σ_{y∈H} |μ|({y})·|ν|(ỹH ∩ H^c)`, only when `supp(μ) ⊆ H`.
    #[serde(serialize_with = "ser_opt_rational")]
    pub bound_supported: Option<Rational>,
    /// `supp(μ), supp(ν) ⊆ H`: the gap must vanish.
    pub both_supported: bool,
    /// Hypergroup, `H` a sub-hypergroup, `supp(μ) ⊆ H`: the gap must vanish.
    pub sub_hypergroup_case: bool,
}

impl GapReport {
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.gap > self.bound_general {
            out.push(format!("gap {} exceeds general bound {}", self.gap, self.bound_general));
        }
        if let Some(b) = &self.bound_supported {
            if &self.gap > b {
                out.push(format!("gap {} exceeds supported bound {b}", self.gap));
            }
        }
        if self.both_supported && !self.gap.is_zero() {
            out.push(format!("gap {} nonzero with both measures supported in H", self.gap));
        }
        if self.sub_hypergroup_case && !self.gap.is_zero() {
            out.push(format!("gap {} nonzero in the sub-hypergroup case", self.gap));
        }
        out
    }

    pub fn holds(&self) -> bool {
        self.failures().is_empty()
    }
}

pub fn restriction_gap(
    k: &FiniteSemihypergroup,
    h: &PointSet,
    mu: &SignedMeasure,
    nu: &SignedMeasure,
    hypergroup: Option<&HypergroupStructure>,
) -> Result<GapReport> {
    require_closed(k, h)?;
    let whole_product = measure::convolve(k, mu, nu)?;
    let restricted_product = measure::restrict(&whole_product, h)?;
    let product_of_restrictions = measure::convolve_on(k, h, &measure::restrict(mu, h)?, &measure::restrict(nu, h)?)?;
    let gap = restricted_product.checked_sub(&product_of_restrictions)?.tv_norm();

    let outside = h.complement();
    let abs_mu = mu.abs();
    let abs_nu = nu.abs();
    let n = k.points();
    let mut bound_general = Rational::zero();
    for y in 0..n {
        let weight = abs_nu.coefficient(y);
        if weight.is_zero() {
            continue;
        }
        let set = k.inverse_set(Side::Right, InverseMode::Weak, y, h).intersection(&outside);
        bound_general += weight * abs_mu.mass_on(&set);
    }
    for x in 0..n {
        let weight = abs_mu.coefficient(x);
        if weight.is_zero() {
            continue;
        }
        let set = k.inverse_set(Side::Left, InverseMode::Weak, x, h).intersection(&outside);
        bound_general += weight * abs_nu.mass_on(&set);
    }

    let mu_in_h = mu.support().is_subset(h);
    let bound_supported = mu_in_h.then(|| {
        h.iter()
            .map(|y| {
                let set = k.inverse_set(Side::Left, InverseMode::Weak, y, h).intersection(&outside);
                abs_mu.coefficient(y) * abs_nu.mass_on(&set)
            })
            .fold(Rational::zero(), |acc, v| acc + v)
    });
    let both_supported = mu_in_h && nu.support().is_subset(h);
    let sub_hypergroup_case = mu_in_h && hypergroup.is_some_and(|hg| hg.is_sub_hypergroup(h));
    Ok(GapReport {
        gap,
        bound_general,
        bound_supported,
        both_supported,
        sub_hypergroup_case,
    })
}

/// The four decidable characterisations of TLIM existence side by side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub tlim: Option<MeanCertificate>,
    pub defect: DefectReport,
    pub condition3: Condition3Report,
    pub stationary: Option<ProbabilityMeasure>,
    pub tlim_exists: bool,
    pub zero_defect: bool,
    pub no_gap_witness: bool,
    pub stationary_exists: bool,
    pub consistent: bool,
    pub notes: Vec<String>,
}

impl EquivalenceReport {
    pub fn outcomes(&self) -> [bool; 4] {
        [self.tlim_exists, self.zero_defect, self.no_gap_witness, self.stationary_exists]
    }
}

/// Runs all four decision procedures and checks that they agree.
pub fn verify_amenability_equivalence(k: &FiniteSemihypergroup, options: Condition3Options) -> Result<EquivalenceReport> {
    let tlim = find_tlim(k)?;
    let defect = minimize_defect(k)?;
    let condition3 = check_condition3(k, None, options)?;
    let stationary = find_stationary(k)?;
    let tlim_exists = tlim.is_some();
    let zero_defect = defect.is_zero();
    let no_gap_witness = !condition3.refuted();
    let stationary_exists = stationary.is_some();
    let consistent = [zero_defect, no_gap_witness, stationary_exists]
        .iter()
        .all(|&b| b == tlim_exists);
    Ok(EquivalenceReport {
        tlim,
        defect,
        condition3,
        stationary,
        tlim_exists,
        zero_defect,
        no_gap_witness,
        stationary_exists,
        consistent,
        notes: vec![F_ALGEBRA_NOTE.to_string(), LIM_NOTE.to_string()],
    })
}

/// TLIM existence on a sub-semihypergroup against `H`-invariant means on `K`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubEquivalenceReport {
    pub h: PointSet,
    /// TLIM of `H` on its own, indexed by the members of `H` in order.
    pub standalone_tlim: Option<ProbabilityMeasure>,
    pub full_mass: Option<MeanCertificate>,
    pub type_l: bool,
    /// Optimum of `m(χ_H)` over `H`-invariant means; `None` if there are none.
    #[serde(serialize_with = "ser_opt_rational")]
    pub max_mass: Option<Rational>,
    pub max_mass_positive: bool,
    pub consistent: bool,
}

impl SubEquivalenceReport {
    /// `(standalone, full mass, positive mass)`.
    pub fn outcomes(&self) -> (bool, bool, bool) {
        (self.standalone_tlim.is_some(), self.full_mass.is_some(), self.max_mass_positive)
    }
}

/// Checks standalone TLIM ⟺ full-mass `H`-invariant mean, and, for Type L
/// subsets, ⟺ positive-mass `H`-invariant mean.
pub fn verify_sub_equivalence(k: &FiniteSemihypergroup, h: &PointSet) -> Result<SubEquivalenceReport> {
    require_closed(k, h)?;
    let sub = k.restricted(h)?;
    let standalone_tlim = find_tlim(&sub)?.map(|c| c.mean);
    let full_mass = find_h_invariant_mean(k, h, MassMode::Full)?;
    if let Some(cert) = &full_mass {
        let outside = rational::sum(h.complement().iter().map(|z| cert.mean.coefficient(z)));
        if !outside.is_zero() {
            return Err(AmenabilityError::Certificate(format!("full-mass mean puts {outside} off H")));
        }
    }
    let type_l = k.is_type_l(h);
    let max_mass = max_h_mass(k, h)?.map(|(value, _)| value);
    let max_mass_positive = max_mass.as_ref().is_some_and(Signed::is_positive);
    let a = standalone_tlim.is_some();
    let b = full_mass.is_some();
    let consistent = a == b && (!type_l || a == max_mass_positive);
    Ok(SubEquivalenceReport {
        h: h.clone(),
        standalone_tlim,
        full_mass,
        type_l,
        max_mass,
        max_mass_positive,
        consistent,
    })
}
