//! Multiplication data of the sheaf algebra `𝒜 = ⊕_{a∈I} 𝒪_X(−|a|)`.
//!
//! The product of the `a` and `b` summands lands in the `a+b` summand and is
//! `q^{β(a,b)} · ∏_{i carried} x_i`, where
//! `β(a,b) = Σ_{i>j} n_ij a_i b_j (mod 5)` and `x_i = t_i⁵` is the degree-one
//! coordinate of `B = C[x₀..x₄]/(Σx_k)`. A carry at position `i` contributes one
//! factor `x_i`, so the section has degree `|a| + |b| − |a+b|`.
//!
//! Exponents live in a flat `625 × 625` array indexed by ordinals of `I`; sums
//! and carries come from the shared [`AdditionTable`].

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{index_add, index_set, AdditionTable, CarryVector, MultiIndex, INDEX_COUNT};
use crate::qparams::{is_quantum_fermat, QMatrix};
use crate::scalar::{CycNum, Mod5};

const PAIRS: usize = INDEX_COUNT * INDEX_COUNT;

/// Number of ordered triples of `I`.
pub const TRIPLE_COUNT: u64 = (INDEX_COUNT as u64).pow(3);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureTable {
    source: QMatrix,
    sums: Arc<AdditionTable>,
    exps: Vec<Mod5>,
}

/// One product `e_a · e_b = q^exp · x^carry · e_target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub a: MultiIndex,
    pub b: MultiIndex,
    pub target: MultiIndex,
    pub exp: Mod5,
    #[serde(with = "carry_flags")]
    pub carry: CarryVector,
}

mod carry_flags {
    use super::CarryVector;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(c: &CarryVector, s: S) -> Result<S::Ok, S::Error> {
        c.flags().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CarryVector, D::Error> {
        Ok(CarryVector::from_flags(<[bool; 5]>::deserialize(d)?))
    }
}

/// On-disk form of a table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableFile {
    pub source_matrix: QMatrix,
    pub entries: Vec<TableEntry>,
}

/// `β(a,b) = Σ_{i>j} n_ij a_i b_j (mod 5)`.
pub fn coefficient_exponent(n: &QMatrix, a: &MultiIndex, b: &MultiIndex) -> Mod5 {
    let (a, b) = (a.digits(), b.digits());
    let mut s = Mod5::ZERO;
    for i in 1..5 {
        for j in 0..i {
            s += n.get(i, j) * Mod5::from(a[i]) * Mod5::from(b[j]);
        }
    }
    s
}

/// Builds the full table. Any matrix satisfying the quintic conditions
/// (skew, equal row sums) is accepted.
pub fn build_table(n: &QMatrix) -> Result<StructureTable> {
    if !is_quantum_fermat(n) {
        return Err(Error::NotAdmissible(format!(
            "{n:?} is not skew-symmetric with equal row sums"
        )));
    }
    let set = index_set();
    let mut exps = vec![Mod5::ZERO; PAIRS];
    exps.par_chunks_mut(INDEX_COUNT)
        .zip(set.par_iter())
        .for_each(|(row, a)| {
            // β(a, ·) is the linear form b ↦ Σ_j (Σ_{i>j} n_ij a_i) b_j
            let ad = a.digits();
            let mut form = [Mod5::ZERO; 5];
            for (j, f) in form.iter_mut().enumerate() {
                for i in j + 1..5 {
                    *f += n.get(i, j) * Mod5::from(ad[i]);
                }
            }
            for (slot, b) in row.iter_mut().zip(set) {
                let bd = b.digits();
                let mut s = Mod5::ZERO;
                for j in 0..5 {
                    s += form[j] * Mod5::from(bd[j]);
                }
                *slot = s;
            }
        });
    Ok(StructureTable {
        source: *n,
        sums: Arc::clone(AdditionTable::shared()),
        exps,
    })
}

impl StructureTable {
    pub fn source_matrix(&self) -> &QMatrix {
        &self.source
    }

    #[inline]
    pub fn exp_at(&self, a: usize, b: usize) -> Mod5 {
        self.exps[a * INDEX_COUNT + b]
    }

    #[inline]
    pub fn target_at(&self, a: usize, b: usize) -> usize {
        self.sums.target(a, b)
    }

    #[inline]
    pub fn carry_at(&self, a: usize, b: usize) -> CarryVector {
        self.sums.carry(a, b)
    }

    pub fn entry(&self, a: &MultiIndex, b: &MultiIndex) -> TableEntry {
        let (i, j) = (a.ordinal(), b.ordinal());
        TableEntry {
            a: *a,
            b: *b,
            target: MultiIndex::from_ordinal(self.target_at(i, j)),
            exp: self.exp_at(i, j),
            carry: self.carry_at(i, j),
        }
    }

    /// The structure constant `q^β` as a field element.
    pub fn coefficient(&self, a: &MultiIndex, b: &MultiIndex) -> CycNum {
        CycNum::root_power(self.exp_at(a.ordinal(), b.ordinal()))
    }

    /// Overwrites one product. Tables edited this way are exactly what the
    /// verifiers exist to catch.
    pub fn set_entry(&mut self, e: TableEntry) {
        let (i, j) = (e.a.ordinal(), e.b.ordinal());
        self.exps[i * INDEX_COUNT + j] = e.exp;
        Arc::make_mut(&mut self.sums).set_entry(i, j, e.target.ordinal(), e.carry);
    }

    pub fn entries(&self) -> impl Iterator<Item = TableEntry> + '_ {
        let set = index_set();
        set.iter()
            .flat_map(move |a| set.iter().map(move |b| (a, b)))
            .map(|(a, b)| self.entry(a, b))
    }

    pub fn to_file(&self) -> TableFile {
        TableFile {
            source_matrix: self.source,
            entries: self.entries().collect(),
        }
    }

    /// Rebuilds a table from its file form. Every ordered pair must occur
    /// exactly once; the entries are taken as given (not recomputed).
    pub fn from_file(file: &TableFile) -> Result<StructureTable> {
        if file.entries.len() != PAIRS {
            return Err(Error::MalformedTable(format!(
                "expected {PAIRS} entries, found {}",
                file.entries.len()
            )));
        }
        let mut seen = vec![false; PAIRS];
        let mut table = StructureTable {
            source: file.source_matrix,
            sums: Arc::new(AdditionTable::shared().as_ref().clone()),
            exps: vec![Mod5::ZERO; PAIRS],
        };
        for e in &file.entries {
            let k = e.a.ordinal() * INDEX_COUNT + e.b.ordinal();
            if std::mem::replace(&mut seen[k], true) {
                return Err(Error::MalformedTable(format!("duplicate entry for a={}, b={}", e.a, e.b)));
            }
            table.set_entry(*e);
        }
        Ok(table)
    }

    /// First pair whose entry disagrees with the closed form for the source
    /// matrix (exponent, target or carry).
    pub fn first_inconsistency(&self) -> Option<(MultiIndex, MultiIndex)> {
        let set = index_set();
        for (i, a) in set.iter().enumerate() {
            for (j, b) in set.iter().enumerate() {
                let (s, c) = index_add(a, b);
                if self.exp_at(i, j) != coefficient_exponent(&self.source, a, b)
                    || self.target_at(i, j) != s.ordinal()
                    || self.carry_at(i, j) != c
                {
                    return Some((*a, *b));
                }
            }
        }
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// `(e_a e_b) e_c` and `e_a (e_b e_c)` land in different summands.
    Target,
    /// Carry monomials differ at some position.
    Carry,
    /// `β(a,b) + β(a+b,c) ≠ β(b,c) + β(a,b+c)`.
    Coefficient,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub a: MultiIndex,
    pub b: MultiIndex,
    pub c: MultiIndex,
    pub kind: ViolationKind,
}

impl From<Violation> for Error {
    fn from(v: Violation) -> Error {
        Error::AssociativityViolation {
            a: v.a,
            b: v.b,
            c: v.c,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum VerifyMode {
    /// Bilinearity of the exponents on all 625² pairs, monoid data on all
    /// pairs, carry associativity on the 125 digit triples.
    ExactBilinear,
    /// Every one of the 625³ triples; refuses to start when that exceeds
    /// `budget` checks.
    FullTriple { budget: Option<u64> },
    /// `count` uniformly random triples from a seeded generator.
    Sampled { count: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub mode: VerifyMode,
    pub passed: bool,
    /// Pairs or triples examined.
    pub checks: u64,
    pub violation: Option<Violation>,
}

/// Compares both association orders of one triple of ordinals.
pub fn check_triple(t: &StructureTable, a: usize, b: usize, c: usize) -> Option<ViolationKind> {
    let ab = t.target_at(a, b);
    let bc = t.target_at(b, c);
    if t.target_at(ab, c) != t.target_at(a, bc) {
        return Some(ViolationKind::Target);
    }
    let (c1, c2) = (t.carry_at(a, b).mask(), t.carry_at(ab, c).mask());
    let (c3, c4) = (t.carry_at(b, c).mask(), t.carry_at(a, bc).mask());
    for i in 0..5 {
        let l = (c1 >> i & 1) + (c2 >> i & 1);
        let r = (c3 >> i & 1) + (c4 >> i & 1);
        if l != r {
            return Some(ViolationKind::Carry);
        }
    }
    if t.exp_at(a, b) + t.exp_at(ab, c) != t.exp_at(b, c) + t.exp_at(a, bc) {
        return Some(ViolationKind::Coefficient);
    }
    None
}

fn violation(a: usize, b: usize, c: usize, kind: ViolationKind) -> Violation {
    Violation {
        a: MultiIndex::from_ordinal(a),
        b: MultiIndex::from_ordinal(b),
        c: MultiIndex::from_ordinal(c),
        kind,
    }
}

pub fn verify_associativity(t: &StructureTable, mode: VerifyMode) -> Result<VerifyReport> {
    let (checks, found) = match mode {
        VerifyMode::ExactBilinear => exact_bilinear(t),
        VerifyMode::FullTriple { budget } => {
            if let Some(budget) = budget.filter(|&b| b < TRIPLE_COUNT) {
                return Err(Error::BudgetExceeded {
                    needed: TRIPLE_COUNT,
                    budget,
                });
            }
            (TRIPLE_COUNT, full_scan(t))
        }
        VerifyMode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut found = None;
            for _ in 0..count {
                let (a, b, c) = (
                    rng.gen_range(0..INDEX_COUNT),
                    rng.gen_range(0..INDEX_COUNT),
                    rng.gen_range(0..INDEX_COUNT),
                );
                if let Some(k) = check_triple(t, a, b, c) {
                    found = Some(violation(a, b, c, k));
                    break;
                }
            }
            (count, found)
        }
    };
    Ok(VerifyReport {
        mode,
        passed: found.is_none(),
        checks,
        violation: found,
    })
}

fn full_scan(t: &StructureTable) -> Option<Violation> {
    (0..INDEX_COUNT).into_par_iter().find_map_first(|a| {
        for b in 0..INDEX_COUNT {
            for c in 0..INDEX_COUNT {
                if let Some(k) = check_triple(t, a, b, c) {
                    return Some(violation(a, b, c, k));
                }
            }
        }
        None
    })
}

/// Exponents of a bicharacter satisfy the cocycle identity, and carries are
/// positionwise, so associativity reduces to checks on pairs. When a pair
/// fails we look for a triple through it; a non-bilinear table can still be
/// a cocycle, so the final word belongs to the full scan.
fn exact_bilinear(t: &StructureTable) -> (u64, Option<Violation>) {
    let set = index_set();
    let mut checks = 0u64;

    // Monoid data must be digitwise addition with the carry rule.
    let bad_monoid = (0..INDEX_COUNT).into_par_iter().find_map_first(|i| {
        (0..INDEX_COUNT).find_map(|j| {
            let (s, c) = index_add(&set[i], &set[j]);
            (t.target_at(i, j) != s.ordinal() || t.carry_at(i, j) != c).then_some((i, j))
        })
    });
    checks += PAIRS as u64;

    // Carry associativity for the digit rule, per position.
    for x in 0u8..5 {
        for y in 0u8..5 {
            for z in 0u8..5 {
                let c = |p: u8, q: u8| u8::from(p + q >= 5);
                debug_assert_eq!(c(x, y) + c((x + y) % 5, z), c(y, z) + c(x, (y + z) % 5));
            }
        }
    }

    // Gram matrix of the exponents on the basis g_k = e_k − e_4 of I.
    let basis: Vec<usize> = (0..4)
        .map(|k| {
            let mut d = [0i64; 4];
            d[k] = 1;
            MultiIndex::from_first_four(d).ordinal()
        })
        .collect();
    let mut gram = [[Mod5::ZERO; 4]; 4];
    for k in 0..4 {
        for l in 0..4 {
            gram[k][l] = t.exp_at(basis[k], basis[l]);
        }
    }
    let bad_bilinear = (0..INDEX_COUNT).into_par_iter().find_map_first(|i| {
        let ac = set[i].basis_coords().map(Mod5::from);
        let mut form = [Mod5::ZERO; 4];
        for (l, f) in form.iter_mut().enumerate() {
            for k in 0..4 {
                *f += ac[k] * gram[k][l];
            }
        }
        (0..INDEX_COUNT).find_map(|j| {
            let bc = set[j].basis_coords().map(Mod5::from);
            let predicted = (0..4).fold(Mod5::ZERO, |s, l| s + form[l] * bc[l]);
            (predicted != t.exp_at(i, j)).then_some((i, j))
        })
    });
    checks += PAIRS as u64;

    let Some((a, b)) = bad_monoid.or(bad_bilinear) else {
        return (checks, None);
    };

    // Triples in which (a,b) appears as one of the four products.
    for x in 0..INDEX_COUNT {
        checks += 4;
        let minus = |p: usize, q: usize| {
            let (s, _) = index_add(&set[p], &set[q].neg());
            s.ordinal()
        };
        let candidates = [(a, b, x), (x, minus(a, x), b), (x, a, b), (a, x, minus(b, x))];
        for (p, q, r) in candidates {
            if let Some(k) = check_triple(t, p, q, r) {
                return (checks, Some(violation(p, q, r, k)));
            }
        }
    }
    (checks + TRIPLE_COUNT, full_scan(t))
}

/// The pairing `(u, v) ↦ proj_{4̄}(u·v)` on basis elements. Only pairs with
/// `a + b = 4̄` can be nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingMatrix {
    /// `rows[a]` lists `(b, value)` for the nonzero entries of row `a`.
    rows: Vec<Vec<(usize, PairingValue)>>,
}

/// Entry of the pairing: `q^exp` times the carry monomial (empty for a sound
/// table, since `a + (4̄ − a)` never carries).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairingValue {
    pub exp: Mod5,
    pub carry: CarryVector,
}

impl PairingValue {
    pub fn as_cyc(&self) -> Option<CycNum> {
        (self.carry.count() == 0).then(|| CycNum::root_power(self.exp))
    }
}

impl PairingMatrix {
    pub fn entry(&self, a: &MultiIndex, b: &MultiIndex) -> Option<PairingValue> {
        let j = b.ordinal();
        self.rows[a.ordinal()]
            .iter()
            .find(|(c, _)| *c == j)
            .map(|(_, v)| *v)
    }

    /// Entry as a field element; zero off the antidiagonal. `None` when the
    /// entry carries a coordinate factor instead of a pure scalar.
    pub fn value(&self, a: &MultiIndex, b: &MultiIndex) -> Option<CycNum> {
        match self.entry(a, b) {
            None => Some(CycNum::zero()),
            Some(v) => v.as_cyc(),
        }
    }

    pub fn nonzero_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// One unit entry per row and per column, none carrying a coordinate.
    pub fn is_perfect(&self) -> bool {
        let mut col_hits = vec![0u32; INDEX_COUNT];
        for row in &self.rows {
            if row.len() != 1 || row[0].1.carry.count() != 0 {
                return false;
            }
            col_hits[row[0].0] += 1;
        }
        col_hits.iter().all(|&h| h == 1)
    }
}

pub fn frobenius_pairing(t: &StructureTable) -> PairingMatrix {
    let top = MultiIndex::TOP.ordinal();
    let rows = (0..INDEX_COUNT)
        .map(|a| {
            (0..INDEX_COUNT)
                .filter(|&b| t.target_at(a, b) == top)
                .map(|b| {
                    (
                        b,
                        PairingValue {
                            exp: t.exp_at(a, b),
                            carry: t.carry_at(a, b),
                        },
                    )
                })
                .collect()
        })
        .collect();
    PairingMatrix { rows }
}

/// `(e_a, e_{4̄−a}) = (e_{4̄−a}, e_a)` for every `a ∈ I`.
pub fn is_symmetric_pairing(t: &StructureTable) -> bool {
    index_set().iter().all(|a| {
        let b = a.complement();
        let (i, j) = (a.ordinal(), b.ordinal());
        t.exp_at(i, j) == t.exp_at(j, i) && t.carry_at(i, j) == t.carry_at(j, i)
    })
}

/// Closed-form symmetry criterion `∏_j q_ij = 1` for all `i`.
pub fn row_sum_criterion(n: &QMatrix) -> bool {
    (0..5).all(|i| n.row_sum(i).is_zero())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    AssociativityFailure,
    Degenerate,
    FrobeniusNotSymmetric,
    CalabiYau,
}

impl Verdict {
    pub fn describe(&self) -> &'static str {
        match self {
            Verdict::AssociativityFailure => "associativity failure",
            Verdict::Degenerate => "Frobenius pairing degenerate",
            Verdict::FrobeniusNotSymmetric => "Frobenius, not symmetric",
            Verdict::CalabiYau => "Calabi–Yau pairing criterion satisfied",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyCertificate {
    pub matrix: QMatrix,
    pub associativity: VerifyReport,
    pub nondegenerate: bool,
    /// Elementwise check on the 625 antidiagonal pairs.
    pub symmetric: bool,
    /// `∏_j q_ij = 1` for all `i`, reported alongside for comparison.
    pub row_sum_criterion: bool,
    pub verdict: Verdict,
    pub summary: String,
}

pub fn cy_certificate(n: &QMatrix) -> Result<CyCertificate> {
    certify_table(&build_table(n)?)
}

/// Certificate for an existing (possibly edited) table. Associativity is
/// decided first.
pub fn certify_table(t: &StructureTable) -> Result<CyCertificate> {
    let associativity = verify_associativity(t, VerifyMode::ExactBilinear)?;
    let nondegenerate = frobenius_pairing(t).is_perfect();
    let symmetric = is_symmetric_pairing(t);
    let verdict = if !associativity.passed {
        Verdict::AssociativityFailure
    } else if !nondegenerate {
        Verdict::Degenerate
    } else if !symmetric {
        Verdict::FrobeniusNotSymmetric
    } else {
        Verdict::CalabiYau
    };
    Ok(CyCertificate {
        matrix: *t.source_matrix(),
        associativity,
        nondegenerate,
        symmetric,
        row_sum_criterion: row_sum_criterion(t.source_matrix()),
        verdict,
        summary: verdict.describe().to_string(),
    })
}
