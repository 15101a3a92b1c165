//! Exact scalars: residues mod 5 and elements of the cyclotomic field Q(ζ₅).
//!
//! A [`CycNum`] is stored in the power basis `{1, ζ, ζ², ζ³}`. Any ζ⁴ term is
//! folded back through the minimal polynomial `1 + x + x² + x³ + x⁴`, so two
//! values are equal exactly when their coefficient vectors are equal.
//!
//! Internally the four rational coefficients share one positive denominator
//! (`num / den` with `gcd(num₀..num₃, den) = 1`). Products of integral values
//! then never touch a gcd, which is what the rewriting engine spends its time on.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A residue class in Z/5, always stored as its representative in `0..5`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mod5(u8);

impl Mod5 {
    pub const ZERO: Mod5 = Mod5(0);
    pub const ONE: Mod5 = Mod5(1);

    pub const fn new(v: i64) -> Mod5 {
        Mod5(v.rem_euclid(5) as u8)
    }

    #[inline]
    pub const fn value(self) -> u8 {
        self.0
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self) -> Option<Mod5> {
        // 1·1 = 2·3 = 4·4 = 1 (mod 5)
        const INV: [u8; 5] = [0, 1, 3, 2, 4];
        (self.0 != 0).then(|| Mod5(INV[self.0 as usize]))
    }

    pub fn all() -> impl Iterator<Item = Mod5> {
        (0..5).map(Mod5)
    }

    pub fn units() -> impl Iterator<Item = Mod5> {
        (1..5).map(Mod5)
    }
}

impl From<u8> for Mod5 {
    fn from(v: u8) -> Self {
        Mod5(v % 5)
    }
}

impl Add for Mod5 {
    type Output = Mod5;
    #[inline]
    fn add(self, rhs: Mod5) -> Mod5 {
        Mod5((self.0 + rhs.0) % 5)
    }
}

impl AddAssign for Mod5 {
    #[inline]
    fn add_assign(&mut self, rhs: Mod5) {
        *self = *self + rhs;
    }
}

impl Sub for Mod5 {
    type Output = Mod5;
    #[inline]
    fn sub(self, rhs: Mod5) -> Mod5 {
        Mod5((self.0 + 5 - rhs.0) % 5)
    }
}

impl Neg for Mod5 {
    type Output = Mod5;
    #[inline]
    fn neg(self) -> Mod5 {
        Mod5((5 - self.0) % 5)
    }
}

impl Mul for Mod5 {
    type Output = Mod5;
    #[inline]
    fn mul(self, rhs: Mod5) -> Mod5 {
        Mod5((self.0 * rhs.0) % 5)
    }
}

impl fmt::Display for Mod5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Mod5 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.0)
    }
}

impl<'de> Deserialize<'de> for Mod5 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = u8::deserialize(d)?;
        if v < 5 {
            Ok(Mod5(v))
        } else {
            Err(D::Error::custom(format!("residue {v} is outside 0..=4")))
        }
    }
}

/// An exact element `c₀ + c₁ζ + c₂ζ² + c₃ζ³` of Q(ζ₅).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycNum {
    num: [BigInt; 4],
    den: BigInt,
}

impl CycNum {
    pub fn zero() -> CycNum {
        CycNum {
            num: Default::default(),
            den: BigInt::one(),
        }
    }

    pub fn one() -> CycNum {
        CycNum::from_int(1)
    }

    pub fn from_int(v: i64) -> CycNum {
        let mut c = CycNum::zero();
        c.num[0] = BigInt::from(v);
        c
    }

    pub fn from_rational(r: &BigRational) -> CycNum {
        CycNum::from_coeffs([r.clone(), BigRational::zero(), BigRational::zero(), BigRational::zero()])
    }

    /// Builds a value from coefficients in the basis `{1, ζ, ζ², ζ³}`.
    pub fn from_coeffs(coeffs: [BigRational; 4]) -> CycNum {
        let den = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coeffs.map(|c| c.numer() * (&den / c.denom()));
        CycNum::normalized(num, den)
    }

    /// Builds a value from integer coefficients of `1, ζ, ζ², ζ³, ζ⁴`.
    pub fn from_power_coeffs(c: [i64; 5]) -> CycNum {
        let num = [0, 1, 2, 3].map(|i| BigInt::from(c[i] - c[4]));
        CycNum {
            num,
            den: BigInt::one(),
        }
    }

    /// `ζ^k` in canonical form.
    pub fn root_power(k: Mod5) -> CycNum {
        let mut c = CycNum::zero();
        match k.value() {
            4 => c.num = [-1, -1, -1, -1].map(BigInt::from),
            i => c.num[i as usize] = BigInt::one(),
        }
        c
    }

    fn normalized(mut num: [BigInt; 4], mut den: BigInt) -> CycNum {
        if den.is_negative() {
            den = -den;
            for n in &mut num {
                *n = -&*n;
            }
        }
        if !den.is_one() {
            let g = num.iter().fold(den.clone(), |g, n| g.gcd(n));
            if !g.is_one() {
                den /= &g;
                for n in &mut num {
                    *n /= &g;
                }
            }
        }
        CycNum { num, den }
    }

    pub fn coeffs(&self) -> [BigRational; 4] {
        [0, 1, 2, 3].map(|i| BigRational::new(self.num[i].clone(), self.den.clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(Zero::is_zero)
    }

    /// True when the value lies in Z[ζ].
    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// If `self = ζ^k` returns `k`.
    pub fn as_root_of_unity(&self) -> Option<Mod5> {
        Mod5::all().find(|&k| *self == CycNum::root_power(k))
    }

    /// Multiplication by `ζ^k`: a rotation of coefficients, no arithmetic.
    pub fn mul_root(&self, k: Mod5) -> CycNum {
        if k.is_zero() {
            return self.clone();
        }
        // Lift to the length-5 vector over 1..ζ⁴, rotate, fold ζ⁴ back.
        let mut p: [BigInt; 5] = Default::default();
        for i in 0..4 {
            p[(i + k.value() as usize) % 5] = self.num[i].clone();
        }
        let top = p[4].clone();
        let num = [0, 1, 2, 3].map(|i| &p[i] - &top);
        CycNum {
            num,
            den: self.den.clone(),
        }
    }

    pub fn scale_int(&self, k: &BigInt) -> CycNum {
        CycNum::normalized(self.num.clone().map(|n| n * k), self.den.clone())
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// the minimal polynomial `1 + x + x² + x³ + x⁴`.
    pub fn inv(&self) -> Result<CycNum> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let a = self.coeffs().to_vec();
        let m = vec![BigRational::one(); 5];
        // s·a + t·m = g with g a nonzero constant, because m is irreducible.
        let (g, s) = poly_ext_gcd(a, m);
        debug_assert_eq!(g.len(), 1);
        let g0 = g[0].clone();
        let mut coeffs: [BigRational; 4] = Default::default();
        for (i, c) in s.into_iter().enumerate() {
            coeffs[i] = c / &g0;
        }
        Ok(CycNum::from_coeffs(coeffs))
    }

    pub fn checked_div(&self, rhs: &CycNum) -> Result<CycNum> {
        Ok(self * &rhs.inv()?)
    }

    /// Common denominator of the coefficients.
    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    /// Integer numerators over [`CycNum::denominator`].
    pub fn numerators(&self) -> &[BigInt; 4] {
        &self.num
    }

    /// Floating-point embedding with ζ = exp(2πi/5). Debugging aid only.
    pub fn to_complex_approx(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        let den = self.den.to_f64().unwrap_or(f64::NAN);
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, n) in self.num.iter().enumerate() {
            let t = std::f64::consts::TAU * k as f64 / 5.0;
            let c = n.to_f64().unwrap_or(f64::NAN) / den;
            re += c * t.cos();
            im += c * t.sin();
        }
        (re, im)
    }
}

// Polynomials over Q as coefficient vectors, lowest degree first.
fn poly_trim(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    let lead = &b[db];
    if r.len() <= db {
        return (vec![], r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let f = r.last().unwrap() / lead;
        for (i, bc) in b.iter().enumerate() {
            let t = &r[shift + i] - &f * bc;
            r[shift + i] = t;
        }
        q[shift] = f;
        r.pop();
        poly_trim(&mut r);
    }
    (q, r)
}

fn poly_mul_sub(s0: &[BigRational], q: &[BigRational], s1: &[BigRational]) -> Vec<BigRational> {
    // s0 - q·s1
    let len = s0.len().max(q.len() + s1.len());
    let mut out = vec![BigRational::zero(); len];
    for (i, c) in s0.iter().enumerate() {
        out[i] += c;
    }
    for (i, qc) in q.iter().enumerate() {
        for (j, sc) in s1.iter().enumerate() {
            out[i + j] -= qc * sc;
        }
    }
    poly_trim(&mut out);
    out
}

/// Returns `(g, s)` with `s·a ≡ g (mod m)`, `g = gcd(a, m)`.
fn poly_ext_gcd(a: Vec<BigRational>, m: Vec<BigRational>) -> (Vec<BigRational>, Vec<BigRational>) {
    let (mut r0, mut r1) = (a, m);
    poly_trim(&mut r0);
    poly_trim(&mut r1);
    let (mut s0, mut s1) = (vec![BigRational::one()], vec![]);
    while !r1.is_empty() {
        let (q, r) = poly_divrem(&r0, &r1);
        let s = poly_mul_sub(&s0, &q, &s1);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    (r0, s0)
}

impl Zero for CycNum {
    fn zero() -> Self {
        CycNum::zero()
    }
    fn is_zero(&self) -> bool {
        CycNum::is_zero(self)
    }
}

impl One for CycNum {
    fn one() -> Self {
        CycNum::one()
    }
}

impl Default for CycNum {
    fn default() -> Self {
        CycNum::zero()
    }
}

impl<'a> Add<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn add(self, rhs: &CycNum) -> CycNum {
        if self.den == rhs.den {
            let num = [0, 1, 2, 3].map(|i| &self.num[i] + &rhs.num[i]);
            return CycNum::normalized(num, self.den.clone());
        }
        let num = [0, 1, 2, 3].map(|i| &self.num[i] * &rhs.den + &rhs.num[i] * &self.den);
        CycNum::normalized(num, &self.den * &rhs.den)
    }
}

impl Add for CycNum {
    type Output = CycNum;
    fn add(self, rhs: CycNum) -> CycNum {
        &self + &rhs
    }
}

impl AddAssign<&CycNum> for CycNum {
    fn add_assign(&mut self, rhs: &CycNum) {
        if self.den.is_one() && rhs.den.is_one() {
            for i in 0..4 {
                self.num[i] += &rhs.num[i];
            }
        } else {
            *self = &*self + rhs;
        }
    }
}

impl<'a> Sub<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &CycNum) -> CycNum {
        self + &(-rhs)
    }
}

impl Sub for CycNum {
    type Output = CycNum;
    fn sub(self, rhs: CycNum) -> CycNum {
        &self - &rhs
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            num: self.num.clone().map(|n| -n),
            den: self.den.clone(),
        }
    }
}

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -&self
    }
}

impl<'a> Mul<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &CycNum) -> CycNum {
        if self.is_zero() || rhs.is_zero() {
            return CycNum::zero();
        }
        // Schoolbook product into degrees 0..=6, then ζ⁵ = 1 folds 5,6 onto 0,1
        // and ζ⁴ = -(1+ζ+ζ²+ζ³) removes degree 4.
        let mut p: [BigInt; 7] = Default::default();
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.num.iter().enumerate() {
                if !b.is_zero() {
                    p[i + j] += a * b;
                }
            }
        }
        let [p0, p1, p2, p3, p4, p5, p6] = p;
        let c0 = p0 + p5;
        let c1 = p1 + p6;
        let num = [c0 - &p4, c1 - &p4, p2 - &p4, p3 - &p4];
        CycNum::normalized(num, &self.den * &rhs.den)
    }
}

impl Mul for CycNum {
    type Output = CycNum;
    fn mul(self, rhs: CycNum) -> CycNum {
        &self * &rhs
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNum{}", self)
    }
}

/// Polynomial notation in `ζ`, e.g. `1 - ζ^2 + 1/2ζ^3`.
impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            match (first, neg) {
                (true, true) => write!(f, "-")?,
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
                (true, false) => {}
            }
            first = false;
            let unit = a.is_one();
            match k {
                0 => write!(f, "{a}")?,
                _ if unit => {}
                _ => write!(f, "{a}")?,
            }
            match k {
                0 => {}
                1 => write!(f, "ζ")?,
                _ => write!(f, "ζ^{k}")?,
            }
        }
        Ok(())
    }
}

/// Serialized as four exact fraction strings, e.g. `["1/2","0","-1","0"]`.
impl Serialize for CycNum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = self.coeffs().iter().map(|c| c.to_string()).collect();
        strs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let strs = <[String; 4]>::deserialize(d)?;
        let mut coeffs: [BigRational; 4] = Default::default();
        for (i, s) in strs.iter().enumerate() {
            coeffs[i] = BigRational::from_str(s.trim())
                .map_err(|e| D::Error::custom(format!("coefficient {i} ({s:?}): {e}")))?;
        }
        Ok(CycNum::from_coeffs(coeffs))
    }
}
