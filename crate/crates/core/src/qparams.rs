//! Quantum parameter matrices `N = (n_ij)` over Z/5, with `q_ij = q^{n_ij}`.
//!
//! Admissibility here means: zero diagonal, skew-symmetric, and every row sum
//! zero, so `(1,…,1)ᵀ` spans part of the kernel of `N`. The weaker "all row sums
//! equal" family is [`is_quantum_fermat`]. It contains five copies (one per
//! common row sum) of the admissible set, and zero-sum twists move between them.
//!
//! Classification runs over the 5¹⁰ strictly-upper-triangular fillings. Orbits
//! come from a breadth-first closure under generators of the three actions:
//! unit scaling, simultaneous permutation of rows and columns, and Zhang twists
//! `n_ij ↦ n_ij + a_i − a_j`.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Mod5;

/// Strictly-upper-triangular positions in row-major order.
pub const UPPER: [(usize, usize); 10] = [
    (0, 1),
    (0, 2),
    (0, 3),
    (0, 4),
    (1, 2),
    (1, 3),
    (1, 4),
    (2, 3),
    (2, 4),
    (3, 4),
];

/// Number of candidate fillings of the upper triangle.
pub const CANDIDATE_COUNT: u32 = 9_765_625;

/// A 5×5 matrix of exponents; ordered row-major lexicographically.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QMatrix([[Mod5; 5]; 5]);

impl QMatrix {
    pub fn zero() -> QMatrix {
        QMatrix::default()
    }

    pub fn from_entries(entries: [[i64; 5]; 5]) -> QMatrix {
        QMatrix(entries.map(|row| row.map(Mod5::new)))
    }

    /// Fills the upper triangle from `upper` (in [`UPPER`] order) and the
    /// lower triangle by skew-symmetry.
    pub fn from_upper(upper: [Mod5; 10]) -> QMatrix {
        let mut m = [[Mod5::ZERO; 5]; 5];
        for (k, &(i, j)) in UPPER.iter().enumerate() {
            m[i][j] = upper[k];
            m[j][i] = -upper[k];
        }
        QMatrix(m)
    }

    /// Decodes a candidate number in `0..5¹⁰` (base-5 digits, first upper
    /// entry most significant).
    pub fn from_code(mut code: u32) -> QMatrix {
        let mut upper = [Mod5::ZERO; 10];
        for k in (0..10).rev() {
            upper[k] = Mod5::from((code % 5) as u8);
            code /= 5;
        }
        QMatrix::from_upper(upper)
    }

    pub fn code(&self) -> u32 {
        UPPER
            .iter()
            .fold(0, |acc, &(i, j)| acc * 5 + self.0[i][j].value() as u32)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Mod5 {
        self.0[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Mod5) {
        self.0[i][j] = v;
    }

    pub fn entries(&self) -> [[u8; 5]; 5] {
        self.0.map(|row| row.map(Mod5::value))
    }

    pub fn row_sum(&self, i: usize) -> Mod5 {
        self.0[i].iter().fold(Mod5::ZERO, |s, &v| s + v)
    }

    /// `Some(r)` when every row sums to `r`.
    pub fn common_row_sum(&self) -> Option<Mod5> {
        let r = self.row_sum(0);
        (1..5).all(|i| self.row_sum(i) == r).then_some(r)
    }

    /// `n_ii = 0` and `n_ij = -n_ji`: `q_ii = q_ij q_ji = 1`.
    pub fn is_skew(&self) -> bool {
        (0..5).all(|i| {
            self.0[i][i].is_zero() && (0..i).all(|j| self.0[i][j] == -self.0[j][i])
        })
    }

    /// `n_ij + n_jk - n_ik` for a triple; genericity asks it to be nonzero.
    #[inline]
    pub fn triangle_defect(&self, i: usize, j: usize, k: usize) -> Mod5 {
        self.0[i][j] + self.0[j][k] - self.0[i][k]
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let r: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            write!(f, "[{}]", r.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for QMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries().serialize(s)
    }
}

/// Accepts any integers; entries are reduced mod 5.
impl<'de> Deserialize<'de> for QMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(d)?;
        if rows.len() != 5 || rows.iter().any(|r| r.len() != 5) {
            return Err(D::Error::custom(format!(
                "expected a 5x5 integer array, got {} rows with lengths {:?}",
                rows.len(),
                rows.iter().map(Vec::len).collect::<Vec<_>>()
            )));
        }
        let mut m = [[0i64; 5]; 5];
        for (i, r) in rows.iter().enumerate() {
            m[i].copy_from_slice(r);
        }
        Ok(QMatrix::from_entries(m))
    }
}

/// Conditions (i)–(iii) with `∏_j q_ij = 1`: skew and all row sums zero.
pub fn is_admissible(n: &QMatrix) -> bool {
    n.is_skew() && n.common_row_sum() == Some(Mod5::ZERO)
}

/// Conditions (i)–(iii) read literally: skew, `∏_j q_ij` independent of `i`.
pub fn is_quantum_fermat(n: &QMatrix) -> bool {
    n.is_skew() && n.common_row_sum().is_some()
}

/// `q_ij q_jk ≠ q_ik` for all 60 ordered triples of distinct indices.
pub fn is_generic(n: &QMatrix) -> bool {
    for i in 0..5 {
        for j in 0..5 {
            if j == i {
                continue;
            }
            for k in 0..5 {
                if k != i && k != j && n.triangle_defect(i, j, k).is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

/// A permutation σ of `{0..4}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Permutation([usize; 5]);

impl Permutation {
    pub fn identity() -> Permutation {
        Permutation([0, 1, 2, 3, 4])
    }

    pub fn new(images: &[usize]) -> Result<Permutation> {
        let mut seen = [false; 5];
        if images.len() != 5 {
            return Err(Error::InvalidPermutation(images.to_vec()));
        }
        for &v in images {
            if v >= 5 || std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidPermutation(images.to_vec()));
            }
        }
        let mut p = [0; 5];
        p.copy_from_slice(images);
        Ok(Permutation(p))
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation([0, 1, 2, 3, 4].map(|i| self.0[other.0[i]]))
    }

    /// All 120 permutations, lexicographic.
    pub fn all() -> Vec<Permutation> {
        let mut out = Vec::with_capacity(120);
        let mut p = [0, 1, 2, 3, 4];
        loop {
            out.push(Permutation(p));
            // next lexicographic permutation
            let Some(i) = (0..4).rev().find(|&i| p[i] < p[i + 1]) else {
                break;
            };
            let j = (i + 1..5).rev().find(|&j| p[j] > p[i]).unwrap();
            p.swap(i, j);
            p[i + 1..].reverse();
        }
        out
    }
}

/// `n_ij ↦ a·n_ij`: replacing `q` by `q^a`.
pub fn act_scale(n: &QMatrix, a: Mod5) -> Result<QMatrix> {
    if a.is_zero() {
        return Err(Error::ZeroScaling);
    }
    Ok(QMatrix(n.0.map(|row| row.map(|v| a * v))))
}

/// `ñ_ij = n_{σ(i)σ(j)}`: renaming the generators.
///
/// Acting by σ then τ equals acting once by `σ ∘ τ`.
pub fn act_permute(n: &QMatrix, sigma: &Permutation) -> QMatrix {
    let mut m = [[Mod5::ZERO; 5]; 5];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = n.0[sigma.apply(i)][sigma.apply(j)];
        }
    }
    QMatrix(m)
}

/// `n_ij ↦ n_ij + a_i − a_j`: the Zhang twist by `t_i ↦ q^{a_i} t_i`.
///
/// Every row sum moves by `-Σ a_j`, so only zero-sum `a` keep a matrix admissible.
pub fn act_twist(n: &QMatrix, a: &[Mod5; 5]) -> QMatrix {
    let mut m = n.0;
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = *v + a[i] - a[j];
        }
    }
    QMatrix(m)
}

/// A subset of {scale, permute, twist}.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ActionSet {
    pub scale: bool,
    pub permute: bool,
    pub twist: bool,
}

impl ActionSet {
    pub const ALL: ActionSet = ActionSet {
        scale: true,
        permute: true,
        twist: true,
    };
    pub const NONE: ActionSet = ActionSet {
        scale: false,
        permute: false,
        twist: false,
    };
    pub const PERMUTE_TWIST: ActionSet = ActionSet {
        scale: false,
        permute: true,
        twist: true,
    };

    /// Generator images of `n`: the 3 non-identity scalings, 120 permutations,
    /// and the zero-sum twists `e_i − e_{i+1}`.
    fn neighbours(&self, n: &QMatrix, perms: &[Permutation], out: &mut Vec<QMatrix>) {
        out.clear();
        if self.scale {
            out.extend([2, 3, 4].map(|a| act_scale(n, Mod5::new(a)).unwrap()));
        }
        if self.permute {
            out.extend(perms.iter().map(|p| act_permute(n, p)));
        }
        if self.twist {
            for i in 0..4 {
                let mut a = [Mod5::ZERO; 5];
                a[i] = Mod5::ONE;
                a[i + 1] = -Mod5::ONE;
                out.push(act_twist(n, &a));
            }
        }
    }
}

impl fmt::Display for ActionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [
            (self.scale, "scale"),
            (self.permute, "permute"),
            (self.twist, "twist"),
        ]
        .iter()
        .filter(|(on, _)| *on)
        .map(|(_, n)| *n)
        .collect();
        f.write_str(&names.join(","))
    }
}

impl FromStr for ActionSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<ActionSet> {
        let mut set = ActionSet::NONE;
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "scale" => set.scale = true,
                "permute" => set.permute = true,
                "twist" => set.twist = true,
                other => return Err(Error::Parse(format!("unknown action {other:?}"))),
            }
        }
        Ok(set)
    }
}

/// All admissible generic matrices, in candidate-code order.
pub fn enumerate_generic() -> Vec<QMatrix> {
    (0..CANDIDATE_COUNT)
        .into_par_iter()
        .map(QMatrix::from_code)
        .filter(|n| is_admissible(n) && is_generic(n))
        .collect()
}

/// All admissible matrices, generic or not, in candidate-code order.
pub fn enumerate_admissible() -> Vec<QMatrix> {
    (0..CANDIDATE_COUNT)
        .into_par_iter()
        .map(QMatrix::from_code)
        .filter(is_admissible)
        .collect()
}

/// Number of admissible candidates, generic or not.
pub fn admissible_count() -> usize {
    (0..CANDIDATE_COUNT)
        .into_par_iter()
        .filter(|&c| is_admissible(&QMatrix::from_code(c)))
        .count()
}

/// Closure of `{n}` under the generators of `actions`.
pub fn orbit(n: &QMatrix, actions: ActionSet) -> Result<HashSet<QMatrix>> {
    if !is_admissible(n) {
        return Err(Error::NotAdmissible(format!("{n:?}")));
    }
    Ok(closure(n, actions, &Permutation::all()))
}

fn closure(n: &QMatrix, actions: ActionSet, perms: &[Permutation]) -> HashSet<QMatrix> {
    let mut seen = HashSet::from([*n]);
    let mut queue = VecDeque::from([*n]);
    let mut buf = Vec::new();
    while let Some(m) = queue.pop_front() {
        actions.neighbours(&m, perms, &mut buf);
        for &next in &buf {
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    seen
}

/// Lexicographically least member of the orbit.
pub fn canonical_form(n: &QMatrix, actions: ActionSet) -> Result<QMatrix> {
    Ok(orbit(n, actions)?.into_iter().min().unwrap())
}

/// Orbits of a set under an action set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitPartition {
    pub actions: String,
    pub orbit_sizes: Vec<usize>,
    pub representatives: Vec<QMatrix>,
}

impl OrbitPartition {
    pub fn orbit_count(&self) -> usize {
        self.orbit_sizes.len()
    }
}

/// Splits `set` into orbits; orbits are listed by canonical representative.
///
/// Orbits are closed in the ambient set of admissible matrices, so members
/// outside `set` would show up as a size mismatch rather than be dropped.
pub fn partition_orbits(set: &[QMatrix], actions: ActionSet) -> OrbitPartition {
    let perms = Permutation::all();
    let mut remaining: HashSet<QMatrix> = set.iter().copied().collect();
    let mut seeds: Vec<QMatrix> = set.to_vec();
    seeds.sort();
    let mut orbits: Vec<(QMatrix, usize)> = Vec::new();
    for s in seeds {
        if !remaining.contains(&s) {
            continue;
        }
        let orb = closure(&s, actions, &perms);
        for m in &orb {
            remaining.remove(m);
        }
        orbits.push((*orb.iter().min().unwrap(), orb.len()));
    }
    orbits.sort();
    OrbitPartition {
        actions: actions.to_string(),
        orbit_sizes: orbits.iter().map(|o| o.1).collect(),
        representatives: orbits.iter().map(|o| o.0).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub admissible_count: usize,
    pub generic_count: usize,
    pub orbit_count_all_actions: usize,
    pub orbit_count_without_scaling: usize,
    /// Canonical representatives of the orbits under all three actions.
    pub canonical_representatives: Vec<QMatrix>,
    pub partitions: Vec<OrbitPartition>,
}

/// Enumerates, then partitions under all actions and under {permute, twist}.
/// `extra` adds one more partition (e.g. a CLI-selected action set).
pub fn classify_with(extra: Option<ActionSet>) -> ClassificationReport {
    let generic = enumerate_generic();
    classify_set(&generic, admissible_count(), extra)
}

pub fn classify() -> ClassificationReport {
    classify_with(None)
}

pub(crate) fn classify_set(
    generic: &[QMatrix],
    admissible_count: usize,
    extra: Option<ActionSet>,
) -> ClassificationReport {
    let all = partition_orbits(generic, ActionSet::ALL);
    let no_scale = partition_orbits(generic, ActionSet::PERMUTE_TWIST);
    let mut partitions = vec![all.clone(), no_scale.clone()];
    if let Some(a) = extra.filter(|a| *a != ActionSet::ALL && *a != ActionSet::PERMUTE_TWIST) {
        partitions.push(partition_orbits(generic, a));
    }
    ClassificationReport {
        admissible_count,
        generic_count: generic.len(),
        orbit_count_all_actions: all.orbit_count(),
        orbit_count_without_scaling: no_scale.orbit_count(),
        canonical_representatives: all.representatives,
        partitions,
    }
}

/// The canonical representative of the generic orbit under all actions.
pub fn canonical_generic() -> QMatrix {
    static CANON: std::sync::OnceLock<QMatrix> = std::sync::OnceLock::new();
    *CANON.get_or_init(|| {
        let first = (0..CANDIDATE_COUNT)
            .map(QMatrix::from_code)
            .find(|n| is_admissible(n) && is_generic(n))
            .expect("generic matrices exist");
        canonical_form(&first, ActionSet::ALL).unwrap()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(v: [i64; 10]) -> QMatrix {
        QMatrix::from_upper(v.map(Mod5::new))
    }

    // First generic admissible matrix in candidate order.
    fn generic() -> QMatrix {
        QMatrix::from_entries([
            [0, 0, 0, 0, 0],
            [0, 0, 1, 1, 3],
            [0, 4, 0, 2, 4],
            [0, 4, 3, 0, 3],
            [0, 2, 1, 2, 0],
        ])
    }

    // Circulant with n_{i,i+1} = 1, n_{i,i+2} = 2: admissible, not generic.
    fn circulant() -> QMatrix {
        let mut e = [[0i64; 5]; 5];
        for (i, row) in e.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = [0, 1, 2, -2, -1][(j + 5 - i) % 5];
            }
        }
        QMatrix::from_entries(e)
    }

    #[test]
    fn zero_matrix_is_admissible_not_generic() {
        assert!(is_admissible(&QMatrix::zero()));
        assert!(!is_generic(&QMatrix::zero()));
    }

    #[test]
    fn skew_violation() {
        let mut n = QMatrix::zero();
        n.set(0, 1, Mod5::ONE);
        n.set(1, 0, Mod5::ONE);
        assert!(!is_admissible(&n));
        assert!(!is_quantum_fermat(&n));
    }

    #[test]
    fn commuting_triple_is_not_generic() {
        let n = m([0, 0, 1, 2, 0, 3, 4, 1, 2, 3]);
        assert!(!is_generic(&n));
    }

    #[test]
    fn fixtures() {
        let n = generic();
        assert!(is_admissible(&n));
        assert!(is_generic(&n));
        assert!(is_admissible(&circulant()));
        // n_01 + n_12 - n_02 = 1 + 2 - 2
        assert!(!is_generic(&circulant()));
    }

    #[test]
    fn nonzero_row_sum_is_quantum_fermat_not_admissible() {
        let n = act_twist(&generic(), &[Mod5::new(4), Mod5::ZERO, Mod5::ZERO, Mod5::ZERO, Mod5::ZERO]);
        assert_eq!(n.common_row_sum(), Some(Mod5::ONE));
        assert!(is_quantum_fermat(&n));
        assert!(!is_admissible(&n));
        assert!(is_generic(&n));
    }

    #[test]
    fn code_round_trip() {
        for code in [0, 1, 12345, CANDIDATE_COUNT - 1] {
            assert_eq!(QMatrix::from_code(code).code(), code);
        }
    }

    #[test]
    fn scale_action_laws() {
        let n = circulant();
        assert_eq!(act_scale(&n, Mod5::ONE).unwrap(), n);
        let twice = act_scale(&act_scale(&n, Mod5::new(2)).unwrap(), Mod5::new(2)).unwrap();
        assert_eq!(twice, act_scale(&n, Mod5::new(4)).unwrap());
        assert_eq!(act_scale(&twice, Mod5::new(4)).unwrap(), act_scale(&n, Mod5::new(16)).unwrap());
        assert!(matches!(act_scale(&n, Mod5::ZERO), Err(Error::ZeroScaling)));
    }

    #[test]
    fn permute_action_laws() {
        let n = m([1, 2, 3, 4, 0, 1, 2, 3, 4, 0]);
        assert_eq!(act_permute(&n, &Permutation::identity()), n);
        let perms = Permutation::all();
        assert_eq!(perms.len(), 120);
        for s in perms.iter().step_by(7) {
            for t in perms.iter().step_by(11) {
                assert_eq!(
                    act_permute(&act_permute(&n, s), t),
                    act_permute(&n, &s.compose(t))
                );
            }
        }
        assert!(Permutation::new(&[0, 1, 2, 3, 3]).is_err());
        assert!(Permutation::new(&[0, 1, 2, 3]).is_err());
    }

    #[test]
    fn twist_action_laws() {
        let n = generic();
        assert_eq!(act_twist(&n, &[Mod5::ZERO; 5]), n);
        for c in Mod5::all() {
            assert_eq!(act_twist(&n, &[c; 5]), n);
        }
        let a = [1, 3, 0, 2, 4].map(Mod5::new);
        let t = act_twist(&n, &a);
        for i in 0..5 {
            for j in 0..5 {
                for k in 0..5 {
                    assert_eq!(t.triangle_defect(i, j, k), n.triangle_defect(i, j, k));
                }
            }
        }
        // row sums shift by -Σa = -10 = 0 here
        assert!(is_admissible(&t));
    }

    #[test]
    fn orbit_of_empty_action_set_is_singleton() {
        let n = generic();
        assert_eq!(orbit(&n, ActionSet::NONE).unwrap(), HashSet::from([n]));
        let bad = QMatrix::from_entries([[1; 5]; 5]);
        assert!(orbit(&bad, ActionSet::ALL).is_err());
    }

    #[test]
    fn action_set_parsing() {
        assert_eq!("scale,permute,twist".parse::<ActionSet>().unwrap(), ActionSet::ALL);
        assert_eq!("permute, twist".parse::<ActionSet>().unwrap(), ActionSet::PERMUTE_TWIST);
        assert_eq!("".parse::<ActionSet>().unwrap(), ActionSet::NONE);
        assert!("rotate".parse::<ActionSet>().is_err());
        assert_eq!(ActionSet::ALL.to_string(), "scale,permute,twist");
    }

    #[test]
    fn matrix_json_shape() {
        let n = circulant();
        let json = serde_json::to_string(&n).unwrap();
        assert!(json.starts_with("[[0,1,2,3,4],"));
        let back: QMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, n);
        let neg: QMatrix = serde_json::from_str("[[0,-1,0,0,1],[1,0,0,0,-1],[0,0,0,0,0],[0,0,0,0,0],[-1,1,0,0,0]]").unwrap();
        assert!(is_admissible(&neg));
        assert!(serde_json::from_str::<QMatrix>("[[0,1],[4,0]]").is_err());
    }
}
