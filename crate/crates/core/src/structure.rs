//! Finite semihypergroups encoded as convolution tensors, together with the
//! set-level constructions built on top of them (subset convolution, centres,
//! inverse sets, sub-semihypergroups).
//!
//! The tensor entry `c[x][y][z]` is the mass that `p_x * p_y` puts on `z`.
//! The continuity axioms of the general theory hold automatically for a finite
//! discrete point set, so [`ConvolutionTensor::verify_axioms`] only checks the
//! algebraic ones and records that fact as a note.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::measure::ProbabilityMeasure;
use crate::pointset::PointSet;
use crate::rational::{self, Rational};

/// Default cap on the point count for exhaustive sub-semihypergroup enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

/// Violations beyond this count are tallied but not listed individually.
pub const VIOLATION_LIST_LIMIT: usize = 4096;

const DISCRETE_NOTE: &str =
    "continuity of convolution and of the support map hold trivially in the discrete topology";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StructureError {
    #[error("a structure needs at least one point")]
    NoPoints,
    #[error("tensor has {actual} entries, expected {expected} for {n} points")]
    DimensionMismatch {
        n: usize,
        expected: usize,
        actual: usize,
    },
    #[error("negative coefficient {value} at ({x},{y},{z})")]
    NegativeEntry {
        x: usize,
        y: usize,
        z: usize,
        value: Rational,
    },
    #[error("point {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("expected {expected} names, got {actual}")]
    NameCount { expected: usize, actual: usize },
    #[error("not a semihypergroup: {0}")]
    Axioms(AxiomReport),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("not a hypergroup: {0}")]
    NotHypergroup(AxiomReport),
    #[error("{set} is not closed under convolution")]
    NotClosed { set: PointSet },
    #[error("subset {set} is empty or does not live on {n} points")]
    InvalidSubset { set: PointSet, n: usize },
    #[error(
        "refusing to enumerate all subsets of {n} points (cap {cap}); \
         raise the cap or supply candidate subsets explicitly"
    )]
    EnumerationCap { n: usize, cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `p_x * p_y` does not have total mass one.
    RowSum {
        x: usize,
        y: usize,
        #[serde(serialize_with = "crate::report::ser_rational")]
        sum: Rational,
    },
    /// `((p_x*p_y)*p_z)({u}) != (p_x*(p_y*p_z))({u})`.
    Associativity {
        x: usize,
        y: usize,
        z: usize,
        u: usize,
    },
    /// `p_x * p_e != p_x` or `p_e * p_x != p_x`.
    Identity { x: usize },
    /// The involution does not square to the identity at `x`.
    InvolutionOrder { x: usize },
    /// `c[x][y][z] != c[i(y)][i(x)][i(z)]`.
    AntiHomomorphism { x: usize, y: usize, z: usize },
    /// `e ∈ supp(p_x*p_y)` disagrees with `x = i(y)`.
    IdentitySupport { x: usize, y: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RowSum { x, y, sum } => write!(f, "row ({x},{y}) sums to {sum}"),
            Violation::Associativity { x, y, z, u } => {
                write!(f, "associativity fails for ({x},{y},{z}) at point {u}")
            }
            Violation::Identity { x } => write!(f, "identity law fails at {x}"),
            Violation::InvolutionOrder { x } => write!(f, "involution is not of order two at {x}"),
            Violation::AntiHomomorphism { x, y, z } => {
                write!(f, "involution is not an anti-homomorphism at ({x},{y},{z})")
            }
            Violation::IdentitySupport { x, y } => {
                write!(f, "identity-support axiom fails for ({x},{y})")
            }
        }
    }
}

/// Outcome of an axiom check. Empty means the checked axioms all hold.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct AxiomReport {
    pub violations: Vec<Violation>,
    /// Total number of violations found, including any not listed.
    pub violation_count: usize,
    pub notes: Vec<String>,
}

impl AxiomReport {
    pub fn is_empty(&self) -> bool {
        self.violation_count == 0
    }

    fn push(&mut self, v: Violation) {
        self.violation_count += 1;
        if self.violations.len() < VIOLATION_LIST_LIMIT {
            self.violations.push(v);
        }
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "no violations");
        }
        write!(f, "{} violation(s)", self.violation_count)?;
        if let Some(first) = self.violations.first() {
            write!(f, ", first: {first}")?;
        }
        Ok(())
    }
}

/// Dense `n×n×n` table of nonnegative rationals. May or may not satisfy the
/// semihypergroup axioms; see [`ConvolutionTensor::verify_axioms`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvolutionTensor {
    n: usize,
    entries: Vec<Rational>,
}

impl ConvolutionTensor {
    pub fn new(n: usize, entries: Vec<Rational>) -> Result<Self, StructureError> {
        if n == 0 {
            return Err(StructureError::NoPoints);
        }
        let expected = n * n * n;
        if entries.len() != expected {
            return Err(StructureError::DimensionMismatch {
                n,
                expected,
                actual: entries.len(),
            });
        }
        for (i, value) in entries.iter().enumerate() {
            if value < &Rational::zero() {
                return Err(StructureError::NegativeEntry {
                    x: i / (n * n),
                    y: (i / n) % n,
                    z: i % n,
                    value: value.clone(),
                });
            }
        }
        Ok(ConvolutionTensor { n, entries })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize) -> Rational) -> Result<Self, StructureError> {
        let mut entries = Vec::with_capacity(n * n * n);
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    entries.push(f(x, y, z));
                }
            }
        }
        Self::new(n, entries)
    }

    /// Builds the tensor from a row function returning `p_x * p_y` as a vector.
    pub fn from_rows(n: usize, f: impl Fn(usize, usize) -> Vec<Rational>) -> Result<Self, StructureError> {
        let mut entries = Vec::with_capacity(n * n * n);
        for x in 0..n {
            for y in 0..n {
                let row = f(x, y);
                if row.len() != n {
                    return Err(StructureError::DimensionMismatch {
                        n,
                        expected: n,
                        actual: row.len(),
                    });
                }
                entries.extend(row);
            }
        }
        Self::new(n, entries)
    }

    pub fn points(&self) -> usize {
        self.n
    }

    pub fn entry(&self, x: usize, y: usize, z: usize) -> &Rational {
        &self.entries[(x * self.n + y) * self.n + z]
    }

    pub fn row(&self, x: usize, y: usize) -> &[Rational] {
        let start = (x * self.n + y) * self.n;
        &self.entries[start..start + self.n]
    }

    pub fn set_row(&mut self, x: usize, y: usize, row: Vec<Rational>) -> Result<(), StructureError> {
        let n = self.n;
        for index in [x, y] {
            if index >= n {
                return Err(StructureError::IndexOutOfRange { index, n });
            }
        }
        if row.len() != n {
            return Err(StructureError::DimensionMismatch {
                n,
                expected: n,
                actual: row.len(),
            });
        }
        if let Some((z, value)) = row.iter().enumerate().find(|(_, v)| *v < &Rational::zero()) {
            return Err(StructureError::NegativeEntry {
                x,
                y,
                z,
                value: value.clone(),
            });
        }
        let start = (x * n + y) * n;
        self.entries.splice(start..start + n, row);
        Ok(())
    }

    fn sparse_rows(&self) -> Vec<Vec<(usize, &Rational)>> {
        (0..self.n * self.n)
            .map(|r| {
                let start = r * self.n;
                self.entries[start..start + self.n]
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .collect()
            })
            .collect()
    }

    /// Checks row normalisation and associativity exactly, listing every
    /// offending pair and quadruple.
    pub fn verify_axioms(&self) -> AxiomReport {
        let n = self.n;
        let mut report = AxiomReport {
            notes: vec![DISCRETE_NOTE.to_string()],
            ..AxiomReport::default()
        };
        for x in 0..n {
            for y in 0..n {
                let total = rational::sum(self.row(x, y));
                if !total.is_one() {
                    report.push(Violation::RowSum { x, y, sum: total });
                }
            }
        }

        let sparse = self.sparse_rows();
        let mut lhs = vec![Rational::zero(); n];
        let mut rhs = vec![Rational::zero(); n];
        let mut touched = vec![false; n];
        let mut touched_list = Vec::with_capacity(n);
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    // (p_x*p_y)*p_z
                    for &(w, a) in &sparse[x * n + y] {
                        for &(u, b) in &sparse[w * n + z] {
                            lhs[u] += a * b;
                            if !touched[u] {
                                touched[u] = true;
                                touched_list.push(u);
                            }
                        }
                    }
                    // p_x*(p_y*p_z)
                    for &(w, a) in &sparse[y * n + z] {
                        for &(u, b) in &sparse[x * n + w] {
                            rhs[u] += a * b;
                            if !touched[u] {
                                touched[u] = true;
                                touched_list.push(u);
                            }
                        }
                    }
                    touched_list.sort_unstable();
                    for &u in &touched_list {
                        if lhs[u] != rhs[u] {
                            report.push(Violation::Associativity { x, y, z, u });
                        }
                        lhs[u].set_zero();
                        rhs[u].set_zero();
                        touched[u] = false;
                    }
                    touched_list.clear();
                }
            }
        }
        report
    }
}

/// Which side an inverse set is taken on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `x̃E = {y : (p_x*p_y)(E) > 0}` and `x⁻¹E = {y : (p_x*p_y)(E) = 1}`.
    Left,
    /// `Ex̃ = {y : (p_y*p_x)(E) > 0}` and `Ex⁻¹ = {y : (p_y*p_x)(E) = 1}`.
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InverseMode {
    /// Positive mass on the target set.
    Weak,
    /// All mass on the target set.
    Full,
}

/// A sub-semihypergroup found by enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubSemihypergroup {
    pub set: PointSet,
    /// `Some` only when the parent is a hypergroup; then true iff the set is
    /// also closed under the involution.
    pub sub_hypergroup: Option<bool>,
}

/// A finite semihypergroup: a convolution tensor that passed
/// [`ConvolutionTensor::verify_axioms`]. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSemihypergroup {
    tensor: ConvolutionTensor,
    names: Option<Vec<String>>,
    supports: Vec<PointSet>,
}

impl FiniteSemihypergroup {
    pub fn new(tensor: ConvolutionTensor, names: Option<Vec<String>>) -> Result<Self, StructureError> {
        let n = tensor.points();
        if let Some(names) = &names {
            if names.len() != n {
                return Err(StructureError::NameCount {
                    expected: n,
                    actual: names.len(),
                });
            }
        }
        let report = tensor.verify_axioms();
        if !report.is_empty() {
            return Err(StructureError::Axioms(report));
        }
        let supports = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .map(|(x, y)| {
                PointSet::from_indices(
                    n,
                    tensor.row(x, y).iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(z, _)| z),
                )
            })
            .collect();
        Ok(FiniteSemihypergroup { tensor, names, supports })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize) -> Rational) -> Result<Self, StructureError> {
        Self::new(ConvolutionTensor::from_fn(n, f)?, None)
    }

    pub fn with_names(self, names: Vec<String>) -> Result<Self, StructureError> {
        Self::new(self.tensor, Some(names))
    }

    pub fn points(&self) -> usize {
        self.tensor.points()
    }

    pub fn tensor(&self) -> &ConvolutionTensor {
        &self.tensor
    }

    pub fn into_tensor(self) -> ConvolutionTensor {
        self.tensor
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn label(&self, x: usize) -> String {
        match &self.names {
            Some(names) => names[x].clone(),
            None => x.to_string(),
        }
    }

    pub fn entry(&self, x: usize, y: usize, z: usize) -> &Rational {
        self.tensor.entry(x, y, z)
    }

    pub fn row(&self, x: usize, y: usize) -> &[Rational] {
        self.tensor.row(x, y)
    }

    pub fn universe(&self) -> PointSet {
        PointSet::full(self.points())
    }

    fn check_index(&self, index: usize) -> Result<(), StructureError> {
        if index < self.points() {
            Ok(())
        } else {
            Err(StructureError::IndexOutOfRange { index, n: self.points() })
        }
    }

    pub fn check_subset(&self, set: &PointSet) -> Result<(), StructureError> {
        if set.universe() != self.points() || set.is_empty() {
            return Err(StructureError::InvalidSubset {
                set: set.clone(),
                n: self.points(),
            });
        }
        Ok(())
    }

    /// `p_x * p_y` as a probability measure.
    pub fn convolve_points(&self, x: usize, y: usize) -> Result<ProbabilityMeasure, StructureError> {
        self.check_index(x)?;
        self.check_index(y)?;
        Ok(ProbabilityMeasure::new_unchecked(self.row(x, y).to_vec()))
    }

    /// `supp(p_x * p_y)`.
    pub fn product_support(&self, x: usize, y: usize) -> &PointSet {
        &self.supports[x * self.points() + y]
    }

    /// `A * B`: the union of `supp(p_x*p_y)` over `x ∈ A`, `y ∈ B`.
    pub fn set_convolution(&self, a: &PointSet, b: &PointSet) -> PointSet {
        let mut out = PointSet::empty(self.points());
        for x in a.iter() {
            for y in b.iter() {
                out.union_with(self.product_support(x, y));
            }
        }
        out
    }

    /// `H * H ⊆ H`.
    pub fn is_closed(&self, h: &PointSet) -> bool {
        h.iter()
            .all(|x| h.iter().all(|y| self.product_support(x, y).is_subset(h)))
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.points();
        (0..n).all(|x| (x + 1..n).all(|y| self.row(x, y) == self.row(y, x)))
    }

    /// The unique `e` with `p_x*p_e = p_e*p_x = p_x` for every `x`, if any.
    pub fn detect_identity(&self) -> Option<usize> {
        let n = self.points();
        (0..n).find(|&e| {
            (0..n).all(|x| is_point_mass_at(self.row(x, e), x) && is_point_mass_at(self.row(e, x), x))
        })
    }

    /// Reads the involution off the identity-support axiom: `ĩ(y)` must be the
    /// unique `x` with `e ∈ supp(p_x*p_y)`. Returns `None` when that is not a
    /// well-defined permutation.
    pub fn derive_involution(&self, e: usize) -> Option<Vec<usize>> {
        let n = self.points();
        if e >= n {
            return None;
        }
        let mut inv = Vec::with_capacity(n);
        for y in 0..n {
            let mut hits = (0..n).filter(|&x| self.product_support(x, y).contains(e));
            let x = hits.next()?;
            if hits.next().is_some() {
                return None;
            }
            inv.push(x);
        }
        let mut seen = vec![false; n];
        for &x in &inv {
            if std::mem::replace(&mut seen[x], true) {
                return None;
            }
        }
        Some(inv)
    }

    /// Checks identity, involution order two, the anti-homomorphism property
    /// and the identity-support axiom for the given `(e, inv)`.
    pub fn verify_hypergroup(&self, e: usize, inv: &[usize]) -> Result<AxiomReport, StructureError> {
        let n = self.points();
        self.check_index(e)?;
        if inv.len() != n {
            return Err(StructureError::InvalidPermutation(format!(
                "length {} for {n} points",
                inv.len()
            )));
        }
        let mut seen = vec![false; n];
        for &x in inv {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(StructureError::InvalidPermutation(format!("{inv:?}")));
            }
        }

        let mut report = AxiomReport {
            notes: vec![DISCRETE_NOTE.to_string()],
            ..AxiomReport::default()
        };
        for x in 0..n {
            if !(is_point_mass_at(self.row(x, e), x) && is_point_mass_at(self.row(e, x), x)) {
                report.push(Violation::Identity { x });
            }
        }
        for x in 0..n {
            if inv[inv[x]] != x {
                report.push(Violation::InvolutionOrder { x });
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if self.entry(x, y, z) != self.entry(inv[y], inv[x], inv[z]) {
                        report.push(Violation::AntiHomomorphism { x, y, z });
                    }
                }
            }
        }
        for x in 0..n {
            for (y, &inv_y) in inv.iter().enumerate() {
                if self.product_support(x, y).contains(e) != (x == inv_y) {
                    report.push(Violation::IdentitySupport { x, y });
                }
            }
        }
        Ok(report)
    }

    /// Detects a hypergroup structure: identity by search, involution from
    /// the identity-support axiom, then a full [`Self::verify_hypergroup`].
    pub fn hypergroup_structure(&self) -> Option<HypergroupStructure> {
        let e = self.detect_identity()?;
        let inv = self.derive_involution(e)?;
        HypergroupStructure::new(self.clone(), e, inv).ok()
    }

    /// `Z_r(K)`: points whose left products with every point are point masses.
    pub fn right_centre(&self) -> PointSet {
        let n = self.points();
        PointSet::from_indices(n, (0..n).filter(|&x| (0..n).all(|y| self.product_support(x, y).len() == 1)))
    }

    /// `Z_l(K)`: points whose right products with every point are point masses.
    pub fn left_centre(&self) -> PointSet {
        let n = self.points();
        PointSet::from_indices(n, (0..n).filter(|&x| (0..n).all(|y| self.product_support(y, x).len() == 1)))
    }

    /// One of `x̃E`, `x⁻¹E`, `Ex̃`, `Ex⁻¹`, selected by `side` and `mode`.
    pub fn inverse_set(&self, side: Side, mode: InverseMode, x: usize, e: &PointSet) -> PointSet {
        let n = self.points();
        let members = (0..n).filter(|&y| {
            let row = match side {
                Side::Left => self.row(x, y),
                Side::Right => self.row(y, x),
            };
            let mass = rational::sum(e.iter().map(|z| &row[z]));
            match mode {
                InverseMode::Weak => mass > Rational::zero(),
                InverseMode::Full => mass.is_one(),
            }
        });
        PointSet::from_indices(n, members)
    }

    /// `x̃E = x⁻¹E` for every `x ∈ E`.
    pub fn is_type_l(&self, e: &PointSet) -> bool {
        e.iter().all(|x| {
            self.inverse_set(Side::Left, InverseMode::Weak, x, e)
                == self.inverse_set(Side::Left, InverseMode::Full, x, e)
        })
    }

    /// `Ex̃ = Ex⁻¹` for every `x ∈ E`.
    pub fn is_type_r(&self, e: &PointSet) -> bool {
        e.iter().all(|x| {
            self.inverse_set(Side::Right, InverseMode::Weak, x, e)
                == self.inverse_set(Side::Right, InverseMode::Full, x, e)
        })
    }

    /// All nonempty `H` with `H * H ⊆ H`, ordered by size then members.
    /// Refuses when the point count exceeds `cap` (default
    /// [`DEFAULT_ENUMERATION_CAP`]).
    pub fn enumerate_sub_semihypergroups(&self, cap: Option<usize>) -> Result<Vec<SubSemihypergroup>, StructureError> {
        let n = self.points();
        let cap = cap.unwrap_or(DEFAULT_ENUMERATION_CAP).min(63);
        if n > cap {
            return Err(StructureError::EnumerationCap { n, cap });
        }
        let candidates = (1u64..(1u64 << n)).map(|mask| PointSet::from_mask(n, mask));
        Ok(self.sub_semihypergroups_among(candidates))
    }

    /// Filters explicit candidates down to the sub-semihypergroups among them.
    pub fn sub_semihypergroups_among(&self, candidates: impl IntoIterator<Item = PointSet>) -> Vec<SubSemihypergroup> {
        let hypergroup = self.hypergroup_structure();
        let mut found: Vec<SubSemihypergroup> = candidates
            .into_iter()
            .filter(|h| h.universe() == self.points() && !h.is_empty() && self.is_closed(h))
            .map(|set| SubSemihypergroup {
                sub_hypergroup: hypergroup.as_ref().map(|hg| hg.is_involution_closed(&set)),
                set,
            })
            .collect();
        found.sort_by_key(|s| (s.set.len(), s.set.to_vec()));
        found.dedup_by(|a, b| a.set == b.set);
        found
    }

    /// The structure `H` carries on its own: the tensor restricted to `H×H×H`,
    /// with points renumbered in increasing order.
    pub fn restricted(&self, h: &PointSet) -> Result<FiniteSemihypergroup, StructureError> {
        self.check_subset(h)?;
        if !self.is_closed(h) {
            return Err(StructureError::NotClosed { set: h.clone() });
        }
        let members = h.to_vec();
        let tensor = ConvolutionTensor::from_fn(members.len(), |x, y, z| {
            self.entry(members[x], members[y], members[z]).clone()
        })?;
        let names = self
            .names
            .as_ref()
            .map(|names| members.iter().map(|&x| names[x].clone()).collect());
        FiniteSemihypergroup::new(tensor, names)
    }
}

fn is_point_mass_at(row: &[Rational], x: usize) -> bool {
    row.iter()
        .enumerate()
        .all(|(z, v)| if z == x { v.is_one() } else { v.is_zero() })
}

/// A semihypergroup with identity and involution satisfying the hypergroup axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypergroupStructure {
    base: FiniteSemihypergroup,
    identity: usize,
    involution: Vec<usize>,
}

impl HypergroupStructure {
    pub fn new(base: FiniteSemihypergroup, identity: usize, involution: Vec<usize>) -> Result<Self, StructureError> {
        let report = base.verify_hypergroup(identity, &involution)?;
        if !report.is_empty() {
            return Err(StructureError::NotHypergroup(report));
        }
        Ok(HypergroupStructure {
            base,
            identity,
            involution,
        })
    }

    pub fn base(&self) -> &FiniteSemihypergroup {
        &self.base
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn involution(&self) -> &[usize] {
        &self.involution
    }

    pub fn is_involution_closed(&self, set: &PointSet) -> bool {
        set.iter().all(|x| set.contains(self.involution[x]))
    }

    /// `Q * Q ⊆ Q` and `Q̃ = Q`.
    pub fn is_sub_hypergroup(&self, set: &PointSet) -> bool {
        !set.is_empty() && self.base.is_closed(set) && self.is_involution_closed(set)
    }
}
