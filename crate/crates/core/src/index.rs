//! The index set `I ⊂ (Z/5)⁵` of digit vectors whose digit sum is a multiple
//! of 5. Its 625 elements label the line-bundle summands `𝒪(-|a|)` of the
//! sheaf algebra; addition is digitwise mod 5 and records where a digit sum
//! overflowed (a carry).

use std::fmt;
use std::sync::OnceLock;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const INDEX_COUNT: usize = 625;

/// An element of `I`, digits in `0..=4`, digit sum divisible by 5.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex([u8; 5]);

/// Positions `i` where `a_i + b_i ≥ 5`, as a 5-bit mask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct CarryVector(u8);

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex([0; 5]);
    /// `4̄ = (4,4,4,4,4)`, the index of the `𝒪(-4) ≅ ω_X` summand.
    pub const TOP: MultiIndex = MultiIndex([4; 5]);

    pub fn new(digits: [i64; 5]) -> Result<MultiIndex> {
        if digits.iter().any(|d| !(0..5).contains(d)) || digits.iter().sum::<i64>() % 5 != 0 {
            return Err(Error::InvalidIndex(digits.to_vec()));
        }
        Ok(MultiIndex(digits.map(|d| d as u8)))
    }

    /// Reduces arbitrary integers mod 5, then fixes the last digit so the sum
    /// lands in `I`. Used by samplers and the monoid's group structure.
    pub fn from_first_four(d: [i64; 4]) -> MultiIndex {
        let d = d.map(|v| v.rem_euclid(5) as u8);
        let last = (25 - d.iter().map(|&v| v as u32).sum::<u32>() % 5) % 5;
        MultiIndex([d[0], d[1], d[2], d[3], last as u8])
    }

    #[inline]
    pub fn digits(&self) -> [u8; 5] {
        self.0
    }

    /// `|a| = (a₀ + … + a₄) / 5`. Not additive; see [`index_add`].
    #[inline]
    pub fn weight(&self) -> u32 {
        self.0.iter().map(|&d| d as u32).sum::<u32>() / 5
    }

    /// Position of `self` in [`index_set`].
    #[inline]
    pub fn ordinal(&self) -> usize {
        tables().ordinal_of_code[self.code()] as usize
    }

    pub fn from_ordinal(i: usize) -> MultiIndex {
        index_set()[i]
    }

    #[inline]
    fn code(&self) -> usize {
        self.0.iter().fold(0usize, |acc, &d| acc * 5 + d as usize)
    }

    /// Additive inverse in `I`.
    pub fn neg(&self) -> MultiIndex {
        MultiIndex(self.0.map(|d| (5 - d) % 5))
    }

    /// `4̄ - a`, digitwise, the Frobenius partner of `a`.
    pub fn complement(&self) -> MultiIndex {
        MultiIndex(self.0.map(|d| 4 - d))
    }

    /// Coordinates in the basis `e_k - e_4 (k = 0..4)` of `I ≅ (Z/5)⁴`.
    pub fn basis_coords(&self) -> [u8; 4] {
        [self.0[0], self.0[1], self.0[2], self.0[3]]
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.0;
        write!(f, "({},{},{},{},{})", d[0], d[1], d[2], d[3], d[4])
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiIndex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = <[i64; 5]>::deserialize(d)?;
        MultiIndex::new(v).map_err(D::Error::custom)
    }
}

impl CarryVector {
    pub fn from_mask(mask: u8) -> CarryVector {
        CarryVector(mask & 0x1f)
    }

    pub fn from_flags(flags: [bool; 5]) -> CarryVector {
        CarryVector(
            flags
                .iter()
                .enumerate()
                .fold(0, |m, (i, &f)| m | ((f as u8) << i)),
        )
    }

    #[inline]
    pub fn mask(&self) -> u8 {
        self.0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn flags(&self) -> [bool; 5] {
        [0, 1, 2, 3, 4].map(|i| self.get(i))
    }

    pub fn count(&self) -> u32 {
        self.0.count_ones()
    }

    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        (0..5).filter(|&i| self.get(i))
    }
}

/// Digitwise sum mod 5 together with the carry flags.
pub fn index_add(a: &MultiIndex, b: &MultiIndex) -> (MultiIndex, CarryVector) {
    let mut sum = [0u8; 5];
    let mut mask = 0u8;
    for i in 0..5 {
        let s = a.0[i] + b.0[i];
        if s >= 5 {
            mask |= 1 << i;
            sum[i] = s - 5;
        } else {
            sum[i] = s;
        }
    }
    (MultiIndex(sum), CarryVector(mask))
}

/// All 625 elements of `I`, in lexicographic digit order.
pub fn enumerate_index_set() -> Vec<MultiIndex> {
    index_set().to_vec()
}

pub fn index_set() -> &'static [MultiIndex] {
    &tables().elements
}

/// Number of elements of each weight 0..=4.
pub fn weight_histogram(set: &[MultiIndex]) -> [usize; 5] {
    let mut h = [0; 5];
    for a in set {
        h[a.weight() as usize] += 1;
    }
    h
}

/// Precomputed sum/carry of every ordered pair of ordinals. The table does
/// not depend on the quantum parameters and is shared by every structure
/// table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditionTable {
    target: Vec<u16>,
    carry: Vec<u8>,
}

impl AdditionTable {
    pub fn compute() -> AdditionTable {
        let elems = index_set();
        let n = elems.len();
        let mut target = Vec::with_capacity(n * n);
        let mut carry = Vec::with_capacity(n * n);
        for a in elems {
            for b in elems {
                let (s, c) = index_add(a, b);
                target.push(s.ordinal() as u16);
                carry.push(c.mask());
            }
        }
        AdditionTable { target, carry }
    }

    /// The table shared process-wide.
    pub fn shared() -> &'static std::sync::Arc<AdditionTable> {
        static SHARED: OnceLock<std::sync::Arc<AdditionTable>> = OnceLock::new();
        SHARED.get_or_init(|| std::sync::Arc::new(AdditionTable::compute()))
    }

    #[inline]
    pub fn target(&self, a: usize, b: usize) -> usize {
        self.target[a * INDEX_COUNT + b] as usize
    }

    #[inline]
    pub fn carry(&self, a: usize, b: usize) -> CarryVector {
        CarryVector(self.carry[a * INDEX_COUNT + b])
    }

    pub(crate) fn set_entry(&mut self, a: usize, b: usize, target: usize, carry: CarryVector) {
        self.target[a * INDEX_COUNT + b] = target as u16;
        self.carry[a * INDEX_COUNT + b] = carry.mask();
    }
}

struct Tables {
    elements: Vec<MultiIndex>,
    ordinal_of_code: Vec<u16>,
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut elements = Vec::with_capacity(INDEX_COUNT);
        let mut ordinal_of_code = vec![u16::MAX; 3125];
        for code in 0..3125usize {
            let mut d = [0u8; 5];
            let mut c = code;
            for i in (0..5).rev() {
                d[i] = (c % 5) as u8;
                c /= 5;
            }
            if d.iter().map(|&v| v as u32).sum::<u32>() % 5 == 0 {
                ordinal_of_code[code] = elements.len() as u16;
                elements.push(MultiIndex(d));
            }
        }
        Tables {
            elements,
            ordinal_of_code,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_set_size_and_histogram() {
        let set = enumerate_index_set();
        assert_eq!(set.len(), 625);
        assert_eq!(weight_histogram(&set), [1, 121, 381, 121, 1]);
        assert_eq!(set[0], MultiIndex::ZERO);
        assert_eq!(MultiIndex::ZERO.weight(), 0);
        assert_eq!(*set.last().unwrap(), MultiIndex::TOP);
    }

    #[test]
    fn weights() {
        assert_eq!(MultiIndex::new([0; 5]).unwrap().weight(), 0);
        assert_eq!(MultiIndex::new([4; 5]).unwrap().weight(), 4);
        assert_eq!(MultiIndex::new([1; 5]).unwrap().weight(), 1);
    }

    #[test]
    fn rejects_bad_digits() {
        assert!(MultiIndex::new([1, 0, 0, 0, 0]).is_err());
        assert!(MultiIndex::new([5, 0, 0, 0, 0]).is_err());
        assert!(MultiIndex::new([-1, 1, 0, 0, 0]).is_err());
        assert!(serde_json::from_str::<MultiIndex>("[1,2,3,4,0]").is_ok());
        assert!(serde_json::from_str::<MultiIndex>("[1,2,3,4,1]").is_err());
    }

    #[test]
    fn add_examples() {
        let top = MultiIndex::TOP;
        for a in index_set() {
            assert_eq!(index_add(a, &MultiIndex::ZERO), (*a, CarryVector::default()));
            let (s, c) = index_add(a, &a.complement());
            assert_eq!(s, top);
            assert_eq!(c.count(), 0);
        }
        let (s, c) = index_add(&top, &top);
        assert_eq!(s, MultiIndex::new([3; 5]).unwrap());
        assert_eq!(c.flags(), [true; 5]);
    }

    #[test]
    fn weight_additivity_with_carries() {
        let set = index_set();
        for a in set {
            for b in set {
                let (s, c) = index_add(a, b);
                assert_eq!(a.weight() + b.weight(), s.weight() + c.count());
            }
        }
    }

    #[test]
    fn subgroup_and_complement_involution() {
        for a in index_set() {
            let (s, _) = index_add(a, &a.neg());
            assert_eq!(s, MultiIndex::ZERO);
            let c = a.complement();
            assert_eq!(c.complement(), *a);
            assert_eq!(c.weight(), 4 - a.weight());
            assert_eq!(MultiIndex::from_ordinal(a.ordinal()), *a);
            assert_eq!(MultiIndex::from_first_four(a.basis_coords().map(i64::from)), *a);
        }
    }

    #[test]
    fn carry_associativity_all_triples_per_position() {
        // Carries are positionwise, so the 125 digit triples cover every
        // triple of I.
        for x in 0u8..5 {
            for y in 0u8..5 {
                for z in 0u8..5 {
                    let c = |p: u8, q: u8| u8::from(p + q >= 5);
                    let lhs = c(x, y) + c((x + y) % 5, z);
                    let rhs = c(y, z) + c(x, (y + z) % 5);
                    assert_eq!(lhs, rhs, "digits {x},{y},{z}");
                }
            }
        }
    }

    #[test]
    fn addition_table_matches_index_add() {
        let t = AdditionTable::shared();
        let set = index_set();
        for (i, a) in set.iter().enumerate().step_by(7) {
            for (j, b) in set.iter().enumerate() {
                let (s, c) = index_add(a, b);
                assert_eq!(t.target(i, j), s.ordinal());
                assert_eq!(t.carry(i, j), c);
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn idx() -> impl Strategy<Value = MultiIndex> {
            (0usize..625).prop_map(MultiIndex::from_ordinal)
        }

        proptest! {
            #[test]
            fn carry_associativity(a in idx(), b in idx(), c in idx()) {
                let (ab, c1) = index_add(&a, &b);
                let (_, c2) = index_add(&ab, &c);
                let (bc, c3) = index_add(&b, &c);
                let (_, c4) = index_add(&a, &bc);
                for i in 0..5 {
                    prop_assert_eq!(c1.get(i) as u8 + c2.get(i) as u8, c3.get(i) as u8 + c4.get(i) as u8);
                }
            }
        }
    }
}
