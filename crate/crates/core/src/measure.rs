//! The measure algebra of a finite semihypergroup.
//!
//! Measures are coefficient vectors over the points. Bounded functions stand
//! in for elements of the dual, through `φ_f(μ) = Σ_z f(z) μ({z})`, and means
//! on the dual are probability vectors. Both kinds of vector may carry a
//! subset tag, in which case they live on that subset and must be moved back
//! with [`extend`] before they can meet full-universe vectors.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::pointset::PointSet;
use crate::rational::{self, Rational};
use crate::structure::{FiniteSemihypergroup, StructureError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("universe mismatch: {left} vs {right}")]
    UniverseMismatch { left: String, right: String },
    #[error("cannot restrict to the empty set")]
    EmptyRestriction,
    #[error("vector carries no subset tag")]
    MissingCarrier,
    #[error("expected {expected} coefficients, got {actual}")]
    Length { expected: usize, actual: usize },
    #[error("not a probability measure: {0}")]
    NotProbability(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

fn describe(carrier: &Option<PointSet>, len: usize) -> String {
    match carrier {
        Some(set) => format!("subset {set} of {} points", set.universe()),
        None => format!("{len} points"),
    }
}

fn check_tagged(carrier: &Option<PointSet>, len: usize) -> Result<(), MeasureError> {
    if let Some(set) = carrier {
        if set.is_empty() {
            return Err(MeasureError::EmptyRestriction);
        }
        if set.len() != len {
            return Err(MeasureError::Length {
                expected: set.len(),
                actual: len,
            });
        }
    }
    Ok(())
}

/// An element of `M(K)` (or of `M(E)` when tagged with a carrier `E`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedMeasure {
    coefficients: Vec<Rational>,
    carrier: Option<PointSet>,
}

impl SignedMeasure {
    pub fn new(coefficients: Vec<Rational>) -> Self {
        SignedMeasure {
            coefficients,
            carrier: None,
        }
    }

    /// A measure on the subset `carrier`, one coefficient per member in increasing order.
    pub fn on(carrier: PointSet, coefficients: Vec<Rational>) -> Result<Self, MeasureError> {
        let carrier = Some(carrier);
        check_tagged(&carrier, coefficients.len())?;
        Ok(SignedMeasure { coefficients, carrier })
    }

    pub fn zero(n: usize) -> Self {
        Self::new(vec![Rational::zero(); n])
    }

    pub fn point_mass(n: usize, x: usize) -> Self {
        let mut coefficients = vec![Rational::zero(); n];
        coefficients[x] = Rational::one();
        Self::new(coefficients)
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn coefficient(&self, z: usize) -> &Rational {
        &self.coefficients[z]
    }

    pub fn carrier(&self) -> Option<&PointSet> {
        self.carrier.as_ref()
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `μ(K)`.
    pub fn mass(&self) -> Rational {
        rational::sum(&self.coefficients)
    }

    /// Total variation norm `Σ_z |μ({z})|`.
    pub fn tv_norm(&self) -> Rational {
        rational::abs_sum(&self.coefficients)
    }

    /// `|μ|`.
    pub fn abs(&self) -> SignedMeasure {
        SignedMeasure {
            coefficients: self.coefficients.iter().map(|c| c.abs()).collect(),
            carrier: self.carrier.clone(),
        }
    }

    pub fn scaled(&self, factor: &Rational) -> SignedMeasure {
        SignedMeasure {
            coefficients: self.coefficients.iter().map(|c| c * factor).collect(),
            carrier: self.carrier.clone(),
        }
    }

    /// `μ(E)` for a full-universe measure.
    pub fn mass_on(&self, set: &PointSet) -> Rational {
        debug_assert!(self.carrier.is_none());
        rational::sum(set.iter().map(|z| &self.coefficients[z]))
    }

    /// `{z : μ({z}) ≠ 0}`, in the ambient point universe.
    pub fn support(&self) -> PointSet {
        match &self.carrier {
            None => PointSet::from_indices(
                self.len(),
                self.coefficients.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(z, _)| z),
            ),
            Some(set) => PointSet::from_indices(
                set.universe(),
                set.iter().zip(&self.coefficients).filter(|(_, c)| !c.is_zero()).map(|(z, _)| z),
            ),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(Zero::is_zero)
    }

    fn same_universe(&self, other: &SignedMeasure) -> Result<(), MeasureError> {
        if self.carrier != other.carrier || self.len() != other.len() {
            return Err(MeasureError::UniverseMismatch {
                left: describe(&self.carrier, self.len()),
                right: describe(&other.carrier, other.len()),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &SignedMeasure) -> Result<SignedMeasure, MeasureError> {
        self.same_universe(other)?;
        Ok(SignedMeasure {
            coefficients: self.coefficients.iter().zip(&other.coefficients).map(|(a, b)| a + b).collect(),
            carrier: self.carrier.clone(),
        })
    }

    pub fn checked_sub(&self, other: &SignedMeasure) -> Result<SignedMeasure, MeasureError> {
        self.same_universe(other)?;
        Ok(SignedMeasure {
            coefficients: self.coefficients.iter().zip(&other.coefficients).map(|(a, b)| a - b).collect(),
            carrier: self.carrier.clone(),
        })
    }
}

/// Panics on a universe mismatch; use [`SignedMeasure::checked_add`] otherwise.
impl Add for &SignedMeasure {
    type Output = SignedMeasure;

    fn add(self, other: &SignedMeasure) -> SignedMeasure {
        self.checked_add(other).expect("measures on different universes")
    }
}

/// Panics on a universe mismatch; use [`SignedMeasure::checked_sub`] otherwise.
impl Sub for &SignedMeasure {
    type Output = SignedMeasure;

    fn sub(self, other: &SignedMeasure) -> SignedMeasure {
        self.checked_sub(other).expect("measures on different universes")
    }
}

impl Neg for &SignedMeasure {
    type Output = SignedMeasure;

    fn neg(self) -> SignedMeasure {
        self.scaled(&-Rational::one())
    }
}

impl fmt::Display for SignedMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coefficients.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for SignedMeasure {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.coefficients.iter().map(rational::format_short))
    }
}

/// An element of `P(K)`: nonnegative coefficients summing to exactly one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ProbabilityMeasure(SignedMeasure);

impl ProbabilityMeasure {
    pub fn new(coefficients: Vec<Rational>) -> Result<Self, MeasureError> {
        if let Some((z, c)) = coefficients.iter().enumerate().find(|(_, c)| c.is_negative()) {
            return Err(MeasureError::NotProbability(format!("coefficient {c} at point {z}")));
        }
        let mass = rational::sum(&coefficients);
        if !mass.is_one() {
            return Err(MeasureError::NotProbability(format!("total mass {mass}")));
        }
        Ok(ProbabilityMeasure(SignedMeasure::new(coefficients)))
    }

    pub(crate) fn new_unchecked(coefficients: Vec<Rational>) -> Self {
        debug_assert!(Self::new(coefficients.clone()).is_ok());
        ProbabilityMeasure(SignedMeasure::new(coefficients))
    }

    pub fn point_mass(n: usize, x: usize) -> Self {
        ProbabilityMeasure(SignedMeasure::point_mass(n, x))
    }

    pub fn uniform(n: usize) -> Self {
        let weight = Rational::new(1.into(), (n as i64).into());
        ProbabilityMeasure(SignedMeasure::new(vec![weight; n]))
    }

    pub fn try_from_signed(measure: SignedMeasure) -> Result<Self, MeasureError> {
        if measure.carrier.is_some() {
            return Err(MeasureError::NotProbability("tagged with a subset".into()));
        }
        Self::new(measure.coefficients)
    }

    pub fn as_signed(&self) -> &SignedMeasure {
        &self.0
    }

    pub fn into_signed(self) -> SignedMeasure {
        self.0
    }

    pub fn coefficients(&self) -> &[Rational] {
        self.0.coefficients()
    }
}

impl std::ops::Deref for ProbabilityMeasure {
    type Target = SignedMeasure;

    fn deref(&self) -> &SignedMeasure {
        &self.0
    }
}

impl fmt::Display for ProbabilityMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A bounded function on the points, identified with the functional `φ_f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedFunction {
    values: Vec<Rational>,
    carrier: Option<PointSet>,
}

impl BoundedFunction {
    pub fn new(values: Vec<Rational>) -> Self {
        BoundedFunction { values, carrier: None }
    }

    pub fn on(carrier: PointSet, values: Vec<Rational>) -> Result<Self, MeasureError> {
        let carrier = Some(carrier);
        check_tagged(&carrier, values.len())?;
        Ok(BoundedFunction { values, carrier })
    }

    pub fn constant(n: usize, value: Rational) -> Self {
        Self::new(vec![value; n])
    }

    /// `𝟙 = χ_K`.
    pub fn one(n: usize) -> Self {
        Self::constant(n, Rational::one())
    }

    /// `χ_E`.
    pub fn indicator(set: &PointSet) -> Self {
        Self::new(
            (0..set.universe())
                .map(|z| if set.contains(z) { Rational::one() } else { Rational::zero() })
                .collect(),
        )
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, z: usize) -> &Rational {
        &self.values[z]
    }

    pub fn carrier(&self) -> Option<&PointSet> {
        self.carrier.as_ref()
    }

    pub fn min(&self) -> Option<&Rational> {
        self.values.iter().min()
    }

    pub fn max(&self) -> Option<&Rational> {
        self.values.iter().max()
    }

    /// `h_E` for a full-universe function.
    pub fn restrict(&self, set: &PointSet) -> Result<BoundedFunction, MeasureError> {
        if self.carrier.is_some() || set.universe() != self.values.len() {
            return Err(MeasureError::UniverseMismatch {
                left: describe(&self.carrier, self.values.len()),
                right: describe(&Some(set.clone()), set.len()),
            });
        }
        BoundedFunction::on(set.clone(), set.iter().map(|z| self.values[z].clone()).collect())
    }

    /// `h^e`: zero outside the carrier.
    pub fn extend(&self) -> Result<BoundedFunction, MeasureError> {
        let set = self.carrier.as_ref().ok_or(MeasureError::MissingCarrier)?;
        let mut values = vec![Rational::zero(); set.universe()];
        for (z, v) in set.iter().zip(&self.values) {
            values[z] = v.clone();
        }
        Ok(BoundedFunction::new(values))
    }
}

fn whole(k: &FiniteSemihypergroup, m: &SignedMeasure) -> Result<(), MeasureError> {
    if m.carrier.is_some() || m.len() != k.points() {
        return Err(MeasureError::UniverseMismatch {
            left: describe(&None, k.points()),
            right: describe(&m.carrier, m.len()),
        });
    }
    Ok(())
}

fn whole_fn(k: &FiniteSemihypergroup, f: &BoundedFunction) -> Result<(), MeasureError> {
    if f.carrier.is_some() || f.values.len() != k.points() {
        return Err(MeasureError::UniverseMismatch {
            left: describe(&None, k.points()),
            right: describe(&f.carrier, f.values.len()),
        });
    }
    Ok(())
}

/// `(μ*ν)({u}) = Σ_x Σ_y μ({x}) ν({y}) c[x][y][u]`.
pub fn convolve(
    k: &FiniteSemihypergroup,
    mu: &SignedMeasure,
    nu: &SignedMeasure,
) -> Result<SignedMeasure, MeasureError> {
    whole(k, mu)?;
    whole(k, nu)?;
    let n = k.points();
    let mut out = vec![Rational::zero(); n];
    for (x, a) in mu.coefficients.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
        for (y, b) in nu.coefficients.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
            let weight = a * b;
            let row = k.row(x, y);
            for u in k.product_support(x, y).iter() {
                out[u] += &weight * &row[u];
            }
        }
    }
    Ok(SignedMeasure::new(out))
}

/// Convolution inside a sub-semihypergroup `H`, using only the restricted
/// tensor. Both measures must be tagged with carrier `H`.
pub fn convolve_on(
    k: &FiniteSemihypergroup,
    h: &PointSet,
    mu: &SignedMeasure,
    nu: &SignedMeasure,
) -> Result<SignedMeasure, MeasureError> {
    k.check_subset(h)?;
    if !k.is_closed(h) {
        return Err(StructureError::NotClosed { set: h.clone() }.into());
    }
    for m in [mu, nu] {
        if m.carrier.as_ref() != Some(h) {
            return Err(MeasureError::UniverseMismatch {
                left: describe(&Some(h.clone()), h.len()),
                right: describe(&m.carrier, m.len()),
            });
        }
    }
    let members = h.to_vec();
    let mut out = vec![Rational::zero(); members.len()];
    for (a, &x) in mu.coefficients.iter().zip(&members).filter(|(a, _)| !a.is_zero()) {
        for (b, &y) in nu.coefficients.iter().zip(&members).filter(|(b, _)| !b.is_zero()) {
            let weight = a * b;
            for (slot, &u) in out.iter_mut().zip(&members) {
                let c = k.entry(x, y, u);
                if !c.is_zero() {
                    *slot += &weight * c;
                }
            }
        }
    }
    SignedMeasure::on(h.clone(), out)
}

/// `‖μ‖`.
pub fn tv_norm(mu: &SignedMeasure) -> Rational {
    mu.tv_norm()
}

/// `(L_x f)(y) = Σ_z c[x][y][z] f(z)`.
pub fn left_translate_fn(
    k: &FiniteSemihypergroup,
    f: &BoundedFunction,
    x: usize,
) -> Result<BoundedFunction, MeasureError> {
    whole_fn(k, f)?;
    if x >= k.points() {
        return Err(StructureError::IndexOutOfRange { index: x, n: k.points() }.into());
    }
    Ok(BoundedFunction::new(
        (0..k.points()).map(|y| rational::dot(k.row(x, y), &f.values)).collect(),
    ))
}

/// `(R_y f)(x) = Σ_z c[x][y][z] f(z)`.
pub fn right_translate_fn(
    k: &FiniteSemihypergroup,
    f: &BoundedFunction,
    y: usize,
) -> Result<BoundedFunction, MeasureError> {
    whole_fn(k, f)?;
    if y >= k.points() {
        return Err(StructureError::IndexOutOfRange { index: y, n: k.points() }.into());
    }
    Ok(BoundedFunction::new(
        (0..k.points()).map(|x| rational::dot(k.row(x, y), &f.values)).collect(),
    ))
}

/// The function representing `L_ν φ_f`, i.e. `z ↦ φ_f(ν * p_z)`.
pub fn dual_left_translate(
    k: &FiniteSemihypergroup,
    f: &BoundedFunction,
    nu: &SignedMeasure,
) -> Result<BoundedFunction, MeasureError> {
    whole_fn(k, f)?;
    whole(k, nu)?;
    let n = k.points();
    let values = (0..n)
        .map(|z| {
            nu.coefficients
                .iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .fold(Rational::zero(), |acc, (y, w)| acc + w * rational::dot(k.row(y, z), &f.values))
        })
        .collect();
    Ok(BoundedFunction::new(values))
}

/// The function representing `R_ν φ_f`, i.e. `z ↦ φ_f(p_z * ν)`.
pub fn dual_right_translate(
    k: &FiniteSemihypergroup,
    f: &BoundedFunction,
    nu: &SignedMeasure,
) -> Result<BoundedFunction, MeasureError> {
    whole_fn(k, f)?;
    whole(k, nu)?;
    let n = k.points();
    let values = (0..n)
        .map(|z| {
            nu.coefficients
                .iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .fold(Rational::zero(), |acc, (y, w)| acc + w * rational::dot(k.row(z, y), &f.values))
        })
        .collect();
    Ok(BoundedFunction::new(values))
}

/// `φ_f(μ) = Σ_z f(z) μ({z})`.
pub fn evaluate(f: &BoundedFunction, mu: &SignedMeasure) -> Result<Rational, MeasureError> {
    if f.carrier != mu.carrier || f.values.len() != mu.len() {
        return Err(MeasureError::UniverseMismatch {
            left: describe(&f.carrier, f.values.len()),
            right: describe(&mu.carrier, mu.len()),
        });
    }
    Ok(rational::dot(&f.values, &mu.coefficients))
}

/// `μ_E`.
pub fn restrict(mu: &SignedMeasure, set: &PointSet) -> Result<SignedMeasure, MeasureError> {
    if set.is_empty() {
        return Err(MeasureError::EmptyRestriction);
    }
    if mu.carrier.is_some() || set.universe() != mu.len() {
        return Err(MeasureError::UniverseMismatch {
            left: describe(&mu.carrier, mu.len()),
            right: describe(&Some(set.clone()), set.len()),
        });
    }
    SignedMeasure::on(set.clone(), set.iter().map(|z| mu.coefficients[z].clone()).collect())
}

/// `μ^e(B) = μ(B ∩ E)`.
pub fn extend(mu: &SignedMeasure) -> Result<SignedMeasure, MeasureError> {
    let set = mu.carrier.as_ref().ok_or(MeasureError::MissingCarrier)?;
    let mut coefficients = vec![Rational::zero(); set.universe()];
    for (z, c) in set.iter().zip(&mu.coefficients) {
        coefficients[z] = c.clone();
    }
    Ok(SignedMeasure::new(coefficients))
}

/// The three standard characterisations of a mean, evaluated for a vector
/// `m` viewed as a functional on bounded functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MeanFormulations {
    /// `m` is positive and `‖m‖ = 1`.
    pub positive_norm_one: bool,
    /// `‖m‖ = m(𝟙) = 1`.
    pub norm_equals_unit_mass: bool,
    /// `min f ≤ m(f) ≤ max f` for every `f`.
    pub bracketed: bool,
}

impl MeanFormulations {
    pub fn all(&self) -> bool {
        self.positive_norm_one && self.norm_equals_unit_mass && self.bracketed
    }

    pub fn any(&self) -> bool {
        self.positive_norm_one || self.norm_equals_unit_mass || self.bracketed
    }
}

/// `min f ≤ m(f) ≤ max f`.
pub fn is_bracketed(m: &[Rational], f: &BoundedFunction) -> bool {
    let value = rational::dot(m, f.values());
    match (f.min(), f.max()) {
        (Some(lo), Some(hi)) => lo <= &value && &value <= hi,
        _ => true,
    }
}

/// A function `f` with `m(f)` outside `[min f, max f]`, if one exists.
///
/// The candidates `±𝟙` and `±χ_{{z}}` are exhaustive: the bracket holds for
/// all `f` exactly when it holds for these.
pub fn bracket_violation(m: &[Rational]) -> Option<BoundedFunction> {
    let n = m.len();
    let mut candidates = vec![BoundedFunction::one(n), BoundedFunction::constant(n, -Rational::one())];
    for z in 0..n {
        let chi = BoundedFunction::indicator(&PointSet::singleton(n, z));
        let neg = BoundedFunction::new(chi.values().iter().map(|v| -v).collect());
        candidates.push(chi);
        candidates.push(neg);
    }
    candidates.into_iter().find(|f| !is_bracketed(m, f))
}

pub fn mean_formulations(m: &[Rational]) -> MeanFormulations {
    let norm = rational::abs_sum(m);
    let unit_mass = rational::sum(m);
    MeanFormulations {
        positive_norm_one: m.iter().all(|c| !c.is_negative()) && norm.is_one(),
        norm_equals_unit_mass: norm.is_one() && unit_mass.is_one(),
        bracketed: bracket_violation(m).is_none(),
    }
}
