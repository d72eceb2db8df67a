//! Instance builders: the standard small structures plus the combinators
//! used to grow a randomised corpus (products, adjoined identities and zeros,
//! relabelling, kernel-type structures).

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{self, Rational};
use crate::structure::{ConvolutionTensor, FiniteSemihypergroup, StructureError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuildError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("multiplication table is not associative")]
    NonAssociative,
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Cayley table: `table[a][b]` is the index of `a·b`.
pub type GroupTable = Vec<Vec<usize>>;

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceKind {
    RightZero(usize),
    LeftZero(usize),
    TwoPoint(Rational),
    Group(GroupTable),
    ConjugacyClass(GroupTable),
}

pub fn build_instance(kind: &InstanceKind) -> Result<FiniteSemihypergroup, BuildError> {
    match kind {
        InstanceKind::RightZero(n) => right_zero(*n),
        InstanceKind::LeftZero(n) => left_zero(*n),
        InstanceKind::TwoPoint(theta) => two_point(theta),
        InstanceKind::Group(table) => group(table),
        InstanceKind::ConjugacyClass(table) => conjugacy_class(table),
    }
}

fn delta(a: usize, b: usize) -> Rational {
    if a == b {
        Rational::one()
    } else {
        Rational::zero()
    }
}

fn positive(n: usize, what: &str) -> Result<(), BuildError> {
    if n == 0 {
        return Err(BuildError::InvalidParameter(format!("{what} needs at least one point")));
    }
    Ok(())
}

/// `p_x * p_y = p_y`.
pub fn right_zero(n: usize) -> Result<FiniteSemihypergroup, BuildError> {
    positive(n, "right_zero")?;
    Ok(FiniteSemihypergroup::from_fn(n, |_, y, z| delta(y, z))?)
}

/// `p_x * p_y = p_x`.
pub fn left_zero(n: usize) -> Result<FiniteSemihypergroup, BuildError> {
    positive(n, "left_zero")?;
    Ok(FiniteSemihypergroup::from_fn(n, |x, _, z| delta(x, z))?)
}

/// Two-point hypergroup: `0` is the identity and `p_1 * p_1 = θ p_0 + (1−θ) p_1`,
/// for `θ ∈ (0, 1]`. Involution is the identity map.
pub fn two_point(theta: &Rational) -> Result<FiniteSemihypergroup, BuildError> {
    if !theta.is_positive() || theta > &Rational::one() {
        return Err(BuildError::InvalidParameter(format!("θ = {theta} outside (0, 1]")));
    }
    let k = FiniteSemihypergroup::from_fn(2, |x, y, z| match (x, y) {
        (1, 1) => {
            if z == 0 {
                theta.clone()
            } else {
                Rational::one() - theta
            }
        }
        _ => delta(x ^ y, z),
    })?;
    Ok(k)
}

fn check_table(table: &GroupTable) -> Result<usize, BuildError> {
    let n = table.len();
    positive(n, "group table")?;
    for row in table {
        if row.len() != n || row.iter().any(|&v| v >= n) {
            return Err(BuildError::InvalidParameter("table must be square with entries < n".into()));
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Err(BuildError::NonAssociative);
                }
            }
        }
    }
    Ok(n)
}

/// Point-mass tensor of a finite semigroup (typically a group) table.
pub fn group(table: &GroupTable) -> Result<FiniteSemihypergroup, BuildError> {
    let n = check_table(table)?;
    Ok(FiniteSemihypergroup::from_fn(n, |x, y, z| delta(table[x][y], z))?)
}

fn group_identity_and_inverses(table: &GroupTable) -> Result<(usize, Vec<usize>), BuildError> {
    let n = table.len();
    let e = (0..n)
        .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
        .ok_or_else(|| BuildError::NotAGroup("no identity".into()))?;
    let inverses = (0..n)
        .map(|a| {
            (0..n)
                .find(|&b| table[a][b] == e && table[b][a] == e)
                .ok_or_else(|| BuildError::NotAGroup(format!("element {a} has no inverse")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((e, inverses))
}

/// Conjugacy classes of a group table, ordered by their smallest element.
pub fn conjugacy_classes(table: &GroupTable) -> Result<Vec<Vec<usize>>, BuildError> {
    let n = check_table(table)?;
    let (_, inverses) = group_identity_and_inverses(table)?;
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for g in 0..n {
        if class_of[g] != usize::MAX {
            continue;
        }
        let mut members: Vec<usize> = (0..n).map(|h| table[table[h][g]][inverses[h]]).collect();
        members.sort_unstable();
        members.dedup();
        for &m in &members {
            class_of[m] = classes.len();
        }
        classes.push(members);
    }
    Ok(classes)
}

/// Class hypergroup: `c[i][j][k] = #{(a, b) ∈ C_i × C_j : ab ∈ C_k} / (|C_i||C_j|)`,
/// which equals `a_ijk |C_k| / (|C_i||C_j|)` for the class-sum structure constants.
pub fn conjugacy_class(table: &GroupTable) -> Result<FiniteSemihypergroup, BuildError> {
    let classes = conjugacy_classes(table)?;
    let n = table.len();
    let mut class_of = vec![0; n];
    for (i, class) in classes.iter().enumerate() {
        for &g in class {
            class_of[g] = i;
        }
    }
    let m = classes.len();
    let mut counts = vec![0i64; m * m * m];
    for (i, ci) in classes.iter().enumerate() {
        for (j, cj) in classes.iter().enumerate() {
            for &a in ci {
                for &b in cj {
                    counts[(i * m + j) * m + class_of[table[a][b]]] += 1;
                }
            }
        }
    }
    let k = FiniteSemihypergroup::from_fn(m, |i, j, l| {
        let size = (classes[i].len() * classes[j].len()) as i64;
        rational::ratio(counts[(i * m + j) * m + l], size)
    })?;
    let names = (0..m).map(|i| format!("C{i}")).collect();
    Ok(k.with_names(names)?)
}

pub fn cyclic_group_table(n: usize) -> GroupTable {
    (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in permutations(n - 1) {
            let mut p = vec![first];
            p.extend(rest.into_iter().map(|v| if v >= first { v + 1 } else { v }));
            out.push(p);
        }
    }
    out
}

fn table_from_elements(elements: &[Vec<usize>]) -> GroupTable {
    let index = |p: &Vec<usize>| elements.iter().position(|q| q == p).expect("closed under composition");
    elements
        .iter()
        .map(|a| {
            elements
                .iter()
                .map(|b| index(&b.iter().map(|&i| a[i]).collect()))
                .collect()
        })
        .collect()
}

/// `S_n` with permutations in lexicographic order and `(στ)(i) = σ(τ(i))`.
pub fn symmetric_group_table(n: usize) -> GroupTable {
    table_from_elements(&permutations(n))
}

/// Dihedral group of order `2n` acting on the vertices of an `n`-gon.
pub fn dihedral_group_table(n: usize) -> GroupTable {
    let mut elements = Vec::with_capacity(2 * n);
    for r in 0..n {
        elements.push((0..n).map(|i| (i + r) % n).collect::<Vec<_>>());
    }
    for r in 0..n {
        elements.push((0..n).map(|i| (r + n - i) % n).collect::<Vec<_>>());
    }
    table_from_elements(&elements)
}

/// The class hypergroup of `S_3`: identity, transpositions, 3-cycles.
pub fn s3_classes() -> Result<FiniteSemihypergroup, BuildError> {
    conjugacy_class(&symmetric_group_table(3))
}

fn check_distribution(row: &[Rational], n: usize) -> Result<(), BuildError> {
    if row.len() != n || row.iter().any(Signed::is_negative) || !rational::sum(row).is_one() {
        return Err(BuildError::InvalidParameter("rows must be probability vectors on the points".into()));
    }
    Ok(())
}

/// Every product equals the same distribution `ρ`.
pub fn constant(rho: &[Rational]) -> Result<FiniteSemihypergroup, BuildError> {
    let n = rho.len();
    positive(n, "constant")?;
    check_distribution(rho, n)?;
    Ok(FiniteSemihypergroup::from_fn(n, |_, _, z| rho[z].clone())?)
}

fn kernel_structure(tensor: ConvolutionTensor) -> Result<FiniteSemihypergroup, BuildError> {
    FiniteSemihypergroup::new(tensor, None).map_err(|e| match e {
        StructureError::Axioms(_) => BuildError::NonAssociative,
        other => other.into(),
    })
}

/// `p_x * p_y = P[x]`; associative exactly when `P² = P`.
pub fn left_kernel(p: &[Vec<Rational>]) -> Result<FiniteSemihypergroup, BuildError> {
    let n = p.len();
    positive(n, "left_kernel")?;
    for row in p {
        check_distribution(row, n)?;
    }
    kernel_structure(ConvolutionTensor::from_fn(n, |x, _, z| p[x][z].clone())?)
}

/// `p_x * p_y = P[y]`; associative exactly when `P² = P`.
pub fn right_kernel(p: &[Vec<Rational>]) -> Result<FiniteSemihypergroup, BuildError> {
    let n = p.len();
    positive(n, "right_kernel")?;
    for row in p {
        check_distribution(row, n)?;
    }
    kernel_structure(ConvolutionTensor::from_fn(n, |_, y, z| p[y][z].clone())?)
}

/// Direct product; point `(a, b)` has index `a·|B| + b`.
pub fn product(a: &FiniteSemihypergroup, b: &FiniteSemihypergroup) -> Result<FiniteSemihypergroup, BuildError> {
    let nb = b.points();
    let n = a.points() * nb;
    Ok(FiniteSemihypergroup::from_fn(n, |x, y, z| {
        a.entry(x / nb, y / nb, z / nb) * b.entry(x % nb, y % nb, z % nb)
    })?)
}

/// Adds a new point `n` acting as a two-sided identity.
pub fn adjoin_identity(k: &FiniteSemihypergroup) -> Result<FiniteSemihypergroup, BuildError> {
    let n = k.points();
    Ok(FiniteSemihypergroup::from_fn(n + 1, |x, y, z| {
        if x == n {
            delta(y, z)
        } else if y == n {
            delta(x, z)
        } else if z == n {
            Rational::zero()
        } else {
            k.entry(x, y, z).clone()
        }
    })?)
}

/// Adds a new absorbing point `n`.
pub fn adjoin_zero(k: &FiniteSemihypergroup) -> Result<FiniteSemihypergroup, BuildError> {
    let n = k.points();
    Ok(FiniteSemihypergroup::from_fn(n + 1, |x, y, z| {
        if x == n || y == n {
            delta(z, n)
        } else if z == n {
            Rational::zero()
        } else {
            k.entry(x, y, z).clone()
        }
    })?)
}

/// Isomorphic copy where old point `x` becomes `perm[x]`.
pub fn relabel(k: &FiniteSemihypergroup, perm: &[usize]) -> Result<FiniteSemihypergroup, BuildError> {
    let n = k.points();
    let mut inverse = vec![usize::MAX; n];
    if perm.len() != n {
        return Err(BuildError::InvalidParameter("permutation length".into()));
    }
    for (x, &px) in perm.iter().enumerate() {
        if px >= n || inverse[px] != usize::MAX {
            return Err(BuildError::InvalidParameter(format!("{perm:?} is not a permutation")));
        }
        inverse[px] = x;
    }
    Ok(FiniteSemihypergroup::from_fn(n, |x, y, z| {
        k.entry(inverse[x], inverse[y], inverse[z]).clone()
    })?)
}

/// Parses group specifications of the form `cyclic:N`, `symmetric:N`, `dihedral:N`.
pub fn parse_group_spec(spec: &str) -> Result<GroupTable, BuildError> {
    let (family, size) = spec
        .split_once(':')
        .ok_or_else(|| BuildError::InvalidParameter(format!("group spec `{spec}` is not FAMILY:N")))?;
    let n: usize = size
        .parse()
        .map_err(|_| BuildError::InvalidParameter(format!("bad group size `{size}`")))?;
    positive(n, "group")?;
    match family {
        "cyclic" => Ok(cyclic_group_table(n)),
        "symmetric" if n <= 5 => Ok(symmetric_group_table(n)),
        "dihedral" if n >= 3 => Ok(dihedral_group_table(n)),
        _ => Err(BuildError::InvalidParameter(format!("unsupported group `{spec}`"))),
    }
}
