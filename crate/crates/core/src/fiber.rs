//! Fibre algebras: the structure table evaluated at a closed point of
//! `X = {Σ x_i = 0} ⊂ P⁴`.
//!
//! At `p` the product is `e_a·e_b = ζ^{β(a,b)} ∏_{i carried} x_i(p) · e_{a+b}`.
//! The algebra is `I`-graded with one-dimensional pieces, so the center is
//! spanned by basis elements and can be read off pair by pair. The generic
//! machinery in [`FiniteAlgebra`] solves the same questions by exact
//! elimination and serves as the cross-check.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{index_set, INDEX_COUNT};
use crate::linalg::{dot, normalize, RowEchelon, SparseVec};
use crate::scalar::CycNum;
use crate::structure::{verify_associativity, StructureTable, VerifyMode};

/// A point of `X`, given by homogeneous coordinates summing to zero.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "[CycNum; 5]", into = "[CycNum; 5]")]
pub struct FiberPoint {
    coords: [CycNum; 5],
}

impl FiberPoint {
    pub fn new(coords: [CycNum; 5]) -> Result<FiberPoint> {
        if coords.iter().all(CycNum::is_zero) {
            return Err(Error::ZeroPoint);
        }
        let sum = coords.iter().fold(CycNum::zero(), |acc, x| &acc + x);
        if !sum.is_zero() {
            return Err(Error::PointOffHyperplane(format!("coordinates sum to {sum}")));
        }
        Ok(FiberPoint { coords })
    }

    pub fn from_ints(c: [i64; 5]) -> Result<FiberPoint> {
        FiberPoint::new(c.map(CycNum::from_int))
    }

    pub fn coords(&self) -> &[CycNum; 5] {
        &self.coords
    }

    /// Positions with `x_i ≠ 0`, as a bit mask.
    pub fn support(&self) -> u8 {
        (0..5).filter(|&i| !self.coords[i].is_zero()).fold(0, |m, i| m | 1 << i)
    }

    pub fn has_full_support(&self) -> bool {
        self.support() == 0b11111
    }

    /// The same projective point with coordinates multiplied by `lambda`.
    pub fn scaled(&self, lambda: &CycNum) -> Result<FiberPoint> {
        if lambda.is_zero() {
            return Err(Error::ZeroScaling);
        }
        FiberPoint::new(self.coords.clone().map(|x| &x * lambda))
    }
}

impl TryFrom<[CycNum; 5]> for FiberPoint {
    type Error = Error;
    fn try_from(c: [CycNum; 5]) -> Result<FiberPoint> {
        FiberPoint::new(c)
    }
}

impl From<FiberPoint> for [CycNum; 5] {
    fn from(p: FiberPoint) -> [CycNum; 5] {
        p.coords
    }
}

impl fmt::Debug for FiberPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiberPoint{:?}", self.coords)
    }
}

impl fmt::Display for FiberPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Parses five comma-separated rationals such as `1,-1,1/2,0,-1/2`.
impl FromStr for FiberPoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<FiberPoint> {
        let mut coords = Vec::with_capacity(5);
        let mut offset = 0;
        for part in s.split(',') {
            let t = part.trim();
            let r = BigRational::from_str(t).map_err(|_| {
                Error::Parse(format!("invalid coordinate {t:?} at position {offset}"))
            })?;
            coords.push(CycNum::from_rational(&r));
            offset += part.len() + 1;
        }
        let coords: [CycNum; 5] = coords
            .try_into()
            .map_err(|v: Vec<CycNum>| Error::Parse(format!("expected 5 coordinates, got {}", v.len())))?;
        FiberPoint::new(coords)
    }
}

/// A finite-dimensional algebra over Q(ζ₅) given on a basis.
pub trait FiniteAlgebra: Sync {
    fn dim(&self) -> usize;

    /// `e_i · e_j` as a sparse vector.
    fn mul_basis(&self, i: usize, j: usize) -> SparseVec;
}

/// Product of arbitrary elements.
pub fn multiply<A: FiniteAlgebra + ?Sized>(alg: &A, x: &[(usize, CycNum)], y: &[(usize, CycNum)]) -> SparseVec {
    let mut out = Vec::new();
    for (i, xi) in x {
        for (j, yj) in y {
            let c = xi * yj;
            for (k, v) in alg.mul_basis(*i, *j) {
                out.push((k, &c * &v));
            }
        }
    }
    normalize(out)
}

/// `τ_m = tr(L_{e_m})` for every basis element.
pub fn left_traces<A: FiniteAlgebra + ?Sized>(alg: &A) -> SparseVec {
    let n = alg.dim();
    let t: Vec<(usize, CycNum)> = (0..n)
        .into_par_iter()
        .map(|m| {
            let mut acc = CycNum::zero();
            for k in 0..n {
                for (c, v) in alg.mul_basis(m, k) {
                    if c == k {
                        acc += &v;
                    }
                }
            }
            (m, acc)
        })
        .collect();
    normalize(t)
}

/// Rows of the Gram matrix `T(e_i, e_j) = tr(L_{e_i e_j}) = Σ_m c_ij^m τ_m`.
pub fn trace_form_gram<A: FiniteAlgebra + ?Sized>(alg: &A) -> Vec<SparseVec> {
    let tau = left_traces(alg);
    let n = alg.dim();
    (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| (j, dot(&alg.mul_basis(i, j), &tau)))
                .filter(|(_, v)| !v.is_zero())
                .collect()
        })
        .collect()
}

/// `T(u, v)` for arbitrary elements.
pub fn trace_form<A: FiniteAlgebra + ?Sized>(alg: &A, u: &[(usize, CycNum)], v: &[(usize, CycNum)]) -> CycNum {
    dot(&multiply(alg, u, v), &left_traces(alg))
}

/// Basis of the kernel of the trace form, i.e. the Jacobson radical.
pub fn radical_basis<A: FiniteAlgebra + ?Sized>(alg: &A) -> Vec<SparseVec> {
    let mut e = RowEchelon::new(alg.dim());
    for row in trace_form_gram(alg) {
        e.insert(row);
    }
    e.nullspace()
}

pub fn radical_dim<A: FiniteAlgebra + ?Sized>(alg: &A) -> usize {
    let mut e = RowEchelon::new(alg.dim());
    for row in trace_form_gram(alg) {
        e.insert(row);
    }
    alg.dim() - e.rank()
}

pub fn is_semisimple<A: FiniteAlgebra + ?Sized>(alg: &A) -> bool {
    radical_dim(alg) == 0
}

/// Center dimension from the commutant system `z·e_b − e_b·z = 0` for all `b`.
pub fn center_dim_solve<A: FiniteAlgebra + ?Sized>(alg: &A) -> usize {
    let n = alg.dim();
    let blocks: Vec<Vec<SparseVec>> = (0..n)
        .into_par_iter()
        .map(|b| {
            // Row per output coordinate k, columns indexed by a.
            let mut rows: std::collections::BTreeMap<usize, SparseVec> = Default::default();
            for a in 0..n {
                for (k, v) in alg.mul_basis(a, b) {
                    rows.entry(k).or_default().push((a, v));
                }
                for (k, v) in alg.mul_basis(b, a) {
                    rows.entry(k).or_default().push((a, -v));
                }
            }
            rows.into_values().map(normalize).filter(|r| !r.is_empty()).collect()
        })
        .collect();
    let mut e = RowEchelon::new(n);
    for rows in blocks {
        for r in rows {
            if e.rank() == n {
                return 0;
            }
            e.insert(r);
        }
    }
    n - e.rank()
}

/// Whether `span(basis)` is closed under left and right multiplication by
/// every basis element.
pub fn is_two_sided_ideal<A: FiniteAlgebra + ?Sized>(alg: &A, basis: &[SparseVec]) -> bool {
    let mut e = RowEchelon::new(alg.dim());
    for v in basis {
        e.insert(v.clone());
    }
    (0..alg.dim()).into_par_iter().all(|b| {
        let eb = vec![(b, CycNum::one())];
        basis
            .iter()
            .all(|r| e.contains(multiply(alg, r, &eb)) && e.contains(multiply(alg, &eb, r)))
    })
}

/// An algebra given by its full table of basis products.
#[derive(Clone, Debug)]
pub struct TableAlgebra {
    dim: usize,
    products: Vec<SparseVec>,
}

impl TableAlgebra {
    pub fn new(dim: usize, f: impl Fn(usize, usize) -> SparseVec) -> TableAlgebra {
        let products = (0..dim * dim).map(|k| normalize(f(k / dim, k % dim))).collect();
        TableAlgebra { dim, products }
    }
}

impl FiniteAlgebra for TableAlgebra {
    fn dim(&self) -> usize {
        self.dim
    }

    fn mul_basis(&self, i: usize, j: usize) -> SparseVec {
        self.products[i * self.dim + j].clone()
    }
}

/// The fibre of the sheaf algebra at a point.
#[derive(Clone, Debug)]
pub struct FiberAlgebra {
    table: StructureTable,
    point: FiberPoint,
    // Carry monomial values indexed by mask.
    monomials: Vec<CycNum>,
}

/// Evaluates the table at `p`. The table must pass the exact associativity check.
pub fn specialize(t: &StructureTable, p: &FiberPoint) -> Result<FiberAlgebra> {
    let report = verify_associativity(t, VerifyMode::ExactBilinear)?;
    if let Some(v) = report.violation {
        return Err(v.into());
    }
    Ok(FiberAlgebra::new_unchecked(t.clone(), p.clone()))
}

impl FiberAlgebra {
    fn new_unchecked(table: StructureTable, point: FiberPoint) -> FiberAlgebra {
        let monomials = (0u8..32)
            .map(|mask| {
                (0..5)
                    .filter(|i| mask >> i & 1 == 1)
                    .fold(CycNum::one(), |acc, i| &acc * &point.coords[i])
            })
            .collect();
        FiberAlgebra {
            table,
            point,
            monomials,
        }
    }

    pub fn point(&self) -> &FiberPoint {
        &self.point
    }

    pub fn table(&self) -> &StructureTable {
        &self.table
    }

    /// Coefficient of `e_{a+b}` in `e_a·e_b`, by ordinals.
    pub fn coefficient(&self, a: usize, b: usize) -> CycNum {
        let m = &self.monomials[self.table.carry_at(a, b).mask() as usize];
        m.mul_root(self.table.exp_at(a, b))
    }

    pub fn target(&self, a: usize, b: usize) -> usize {
        self.table.target_at(a, b)
    }

    /// Center dimension read off the grading: `e_a` is central iff every
    /// `e_a·e_b` and `e_b·e_a` agree, and these share target and carries.
    pub fn center_dim_graded(&self) -> usize {
        self.central_basis().len()
    }

    /// Ordinals of the central basis elements.
    pub fn central_basis(&self) -> Vec<usize> {
        (0..INDEX_COUNT)
            .into_par_iter()
            .filter(|&a| {
                (0..INDEX_COUNT).all(|b| {
                    self.table.exp_at(a, b) == self.table.exp_at(b, a)
                        || self.monomials[self.table.carry_at(a, b).mask() as usize].is_zero()
                })
            })
            .collect()
    }

    /// Whether `other`, the fibre at `λ·p`, matches `self` under
    /// `f_a ↦ λ^{|a|} e_a`: each coefficient scales by `λ^{#carries}`.
    pub fn is_rescaling_of(&self, other: &FiberAlgebra, lambda: &CycNum) -> bool {
        let mut powers = vec![CycNum::one()];
        for k in 1..=5 {
            let next = &powers[k - 1] * lambda;
            powers.push(next);
        }
        (0..INDEX_COUNT).into_par_iter().all(|a| {
            (0..INDEX_COUNT).all(|b| {
                let k = self.table.carry_at(a, b).count() as usize;
                self.target(a, b) == other.target(a, b)
                    && other.coefficient(a, b) == &powers[k] * &self.coefficient(a, b)
            })
        })
    }

    pub fn analyze(&self) -> FiberReport {
        let center_dim = self.center_dim_graded();
        let radical_dim = radical_dim(self);
        FiberReport {
            point: self.point.clone(),
            center_dim,
            radical_dim,
            semisimple: radical_dim == 0,
        }
    }
}

impl FiniteAlgebra for FiberAlgebra {
    fn dim(&self) -> usize {
        INDEX_COUNT
    }

    fn mul_basis(&self, i: usize, j: usize) -> SparseVec {
        let c = self.coefficient(i, j);
        if c.is_zero() {
            Vec::new()
        } else {
            vec![(self.target(i, j), c)]
        }
    }
}

/// Summary of one fibre.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberReport {
    pub point: FiberPoint,
    pub center_dim: usize,
    pub radical_dim: usize,
    pub semisimple: bool,
}

/// Weight `|a|` of the basis element with the given ordinal.
pub fn basis_weight(a: usize) -> u32 {
    index_set()[a].weight()
}

/// `λ^{|a|}` rescaling of a sparse element, used to move elements between
/// the fibres at `p` and `λ·p`.
pub fn rescale_element(v: &[(usize, CycNum)], lambda: &CycNum) -> SparseVec {
    v.iter()
        .map(|(a, x)| {
            let mut s = x.clone();
            for _ in 0..basis_weight(*a) {
                s = &s * lambda;
            }
            (*a, s)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qparams::QMatrix;
    use crate::scalar::Mod5;
    use crate::structure::build_table;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn integer(v: i64) -> CycNum {
        CycNum::from_int(v)
    }

    fn root(k: i64) -> CycNum {
        CycNum::root_power(Mod5::new(k))
    }

    fn generic() -> QMatrix {
        QMatrix::from_entries([
            [0, 0, 0, 0, 0],
            [0, 0, 1, 1, 3],
            [0, 4, 0, 2, 4],
            [0, 4, 3, 0, 3],
            [0, 2, 1, 2, 0],
        ])
    }

    fn nilpotent() -> TableAlgebra {
        // Basis {1, e} with e² = 0.
        TableAlgebra::new(2, |i, j| match (i, j) {
            (0, k) | (k, 0) => vec![(k, CycNum::one())],
            _ => vec![],
        })
    }

    #[test]
    fn point_validation() {
        assert!(FiberPoint::from_ints([1, 1, 1, 1, -4]).is_ok());
        assert!(matches!(
            FiberPoint::from_ints([1, 1, 1, 1, 1]),
            Err(Error::PointOffHyperplane(_))
        ));
        assert!(matches!(FiberPoint::from_ints([0; 5]), Err(Error::ZeroPoint)));
        let p: FiberPoint = "1, -1/2, 0, 0, -1/2".parse().unwrap();
        assert_eq!(p.support(), 0b10011);
        assert!("1,2,3".parse::<FiberPoint>().is_err());
        assert!("1,x,0,0,-1".parse::<FiberPoint>().is_err());
    }

    #[test]
    fn nilpotent_fixture() {
        let a = nilpotent();
        assert_eq!(radical_dim(&a), 1);
        assert!(!is_semisimple(&a));
        assert_eq!(center_dim_solve(&a), 2);
        let rad = radical_basis(&a);
        assert_eq!(rad, vec![vec![(1, CycNum::one())]]);
        assert!(is_two_sided_ideal(&a, &rad));
    }

    #[test]
    fn matrix_algebra_fixture() {
        // 2×2 matrices: simple, center of dimension 1.
        let m = TableAlgebra::new(4, |x, y| {
            let (i, j, k, l) = (x / 2, x % 2, y / 2, y % 2);
            if j == k {
                vec![(2 * i + l, CycNum::one())]
            } else {
                vec![]
            }
        });
        assert_eq!(center_dim_solve(&m), 1);
        assert!(is_semisimple(&m));
    }

    #[test]
    fn commutative_fiber() {
        let t = build_table(&QMatrix::zero()).unwrap();
        let f = specialize(&t, &FiberPoint::from_ints([1, 1, 1, 1, -4]).unwrap()).unwrap();
        assert_eq!(f.center_dim_graded(), INDEX_COUNT);
        assert_eq!(radical_dim(&f), 0);
        assert!(is_semisimple(&f));
    }

    #[test]
    fn full_support_coefficients_nonzero_and_unit() {
        let t = build_table(&generic()).unwrap();
        let f = specialize(&t, &FiberPoint::from_ints([1, 2, -3, 4, -4]).unwrap()).unwrap();
        for a in 0..INDEX_COUNT {
            assert_eq!(f.mul_basis(0, a), vec![(a, CycNum::one())]);
            assert_eq!(f.mul_basis(a, 0), vec![(a, CycNum::one())]);
            for b in (0..INDEX_COUNT).step_by(7) {
                assert!(!f.coefficient(a, b).is_zero());
            }
        }
    }

    #[test]
    fn coefficient_is_root_times_monomial() {
        let t = build_table(&generic()).unwrap();
        let p = FiberPoint::from_ints([1, 2, -3, 4, -4]).unwrap();
        let f = specialize(&t, &p).unwrap();
        let set = index_set();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let (a, b) = (rng.gen_range(0..INDEX_COUNT), rng.gen_range(0..INDEX_COUNT));
            let e = t.entry(&set[a], &set[b]);
            let mut expected = CycNum::root_power(e.exp);
            for i in e.carry.positions() {
                expected = &expected * &p.coords()[i];
            }
            assert_eq!(f.coefficient(a, b), expected);
        }
    }

    #[test]
    fn specialize_rejects_broken_table() {
        let mut t = build_table(&generic()).unwrap();
        let set = index_set();
        let mut e = t.entry(&set[7], &set[11]);
        e.exp += Mod5::new(1);
        t.set_entry(e);
        let p = FiberPoint::from_ints([1, 1, 1, 1, -4]).unwrap();
        assert!(matches!(specialize(&t, &p), Err(Error::AssociativityViolation { .. })));
    }

    #[test]
    fn fiber_associativity_sampled() {
        let t = build_table(&generic()).unwrap();
        let f = specialize(&t, &FiberPoint::from_ints([1, -1, 1, -1, 0]).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..2000 {
            let (a, b, c) = (
                rng.gen_range(0..INDEX_COUNT),
                rng.gen_range(0..INDEX_COUNT),
                rng.gen_range(0..INDEX_COUNT),
            );
            let ea = vec![(a, CycNum::one())];
            let ec = vec![(c, CycNum::one())];
            let ab = f.mul_basis(a, b);
            let bc = f.mul_basis(b, c);
            assert_eq!(multiply(&f, &ab, &ec), multiply(&f, &ea, &bc));
        }
    }

    #[test]
    fn rescaling_equivalence() {
        let t = build_table(&generic()).unwrap();
        let p = FiberPoint::from_ints([1, 2, -3, 4, -4]).unwrap();
        let lambda = &CycNum::from_int(3) + &root(2);
        let f = specialize(&t, &p).unwrap();
        let g = specialize(&t, &p.scaled(&lambda).unwrap()).unwrap();
        assert!(f.is_rescaling_of(&g, &lambda));
        assert!(!f.is_rescaling_of(&g, &integer(3)));
        // The map is multiplicative on random elements.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let u: SparseVec = (0..3).map(|_| (rng.gen_range(0..INDEX_COUNT), root(rng.gen_range(0..5)))).collect();
            let v: SparseVec = (0..3).map(|_| (rng.gen_range(0..INDEX_COUNT), integer(rng.gen_range(-3..4)))).collect();
            let (u, v) = (normalize(u), normalize(v));
            let lhs = rescale_element(&multiply(&g, &u, &v), &lambda);
            let rhs = multiply(&f, &rescale_element(&u, &lambda), &rescale_element(&v, &lambda));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn trace_form_is_symmetric() {
        let t = build_table(&generic()).unwrap();
        let f = specialize(&t, &FiberPoint::from_ints([1, 2, -3, 4, -4]).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let mut rand_elem = || -> SparseVec {
                normalize(
                    (0..6)
                        .map(|_| {
                            let c = &integer(rng.gen_range(-4..5)) + &root(rng.gen_range(0..5));
                            (rng.gen_range(0..INDEX_COUNT), c)
                        })
                        .collect(),
                )
            };
            let (u, v) = (rand_elem(), rand_elem());
            assert_eq!(trace_form(&f, &u, &v), trace_form(&f, &v, &u));
        }
    }

    #[test]
    fn point_json_round_trip() {
        let p = FiberPoint::from_ints([1, -1, 1, -1, 0]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        let q: FiberPoint = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }
}
