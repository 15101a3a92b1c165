//! Hilbert polynomials and line-bundle cohomology on `X ≅ P³`.
//!
//! A twist multiset `{(d, m)}` stands for `⊕ 𝒪(d)^{⊕m}`. Cohomology of each
//! summand is given in closed form: `h⁰(𝒪(d)) = C(d+3, 3)` for `d ≥ 0`,
//! `h³(𝒪(d)) = C(−d−1, 3)` for `d ≤ −4`, and nothing in degrees 1 and 2.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A polynomial in `n` with exact rational coefficients, lowest degree first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RatPolynomial {
    coeffs: Vec<BigRational>,
}

impl RatPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> RatPolynomial {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPolynomial { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> RatPolynomial {
        RatPolynomial::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn zero() -> RatPolynomial {
        RatPolynomial::default()
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coefficient(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, n: i64) -> BigRational {
        let x = BigRational::from_integer(n.into());
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * &x + c)
    }

    /// Value at `n` when it is an integer.
    pub fn eval_int(&self, n: i64) -> Option<BigInt> {
        let v = self.eval(n);
        v.is_integer().then(|| v.to_integer())
    }

    pub fn add(&self, other: &RatPolynomial) -> RatPolynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &RatPolynomial, i: usize| p.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero);
        RatPolynomial::new((0..len).map(|i| get(self, i) + get(other, i)).collect())
    }

    pub fn neg(&self) -> RatPolynomial {
        RatPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &RatPolynomial) -> RatPolynomial {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigRational) -> RatPolynomial {
        RatPolynomial::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &RatPolynomial) -> RatPolynomial {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return RatPolynomial::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPolynomial::new(out)
    }
}

impl fmt::Display for RatPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                _ if a.is_one() => {}
                _ => write!(f, "{a}*")?,
            }
            match k {
                0 => {}
                1 => f.write_str("n")?,
                _ => write!(f, "n^{k}")?,
            }
        }
        Ok(())
    }
}

/// Serialized as the list of coefficient fraction strings, lowest degree first.
impl Serialize for RatPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| BigRational::from_str(s.trim()).map_err(serde::de::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(RatPolynomial::new)
    }
}

/// `⊕ 𝒪(d)^{⊕m}`: a list of `(twist, multiplicity)` with positive multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistMultiset(Vec<(i64, u64)>);

impl TwistMultiset {
    pub fn new(parts: Vec<(i64, u64)>) -> Result<TwistMultiset> {
        if let Some((d, _)) = parts.iter().find(|(_, m)| *m == 0) {
            return Err(Error::Parse(format!("multiplicity of twist {d} must be positive")));
        }
        Ok(TwistMultiset(parts))
    }

    /// `𝒜 = 𝒪 ⊕ 𝒪(−1)^{121} ⊕ 𝒪(−2)^{381} ⊕ 𝒪(−3)^{121} ⊕ 𝒪(−4)`.
    pub fn sheaf_algebra() -> TwistMultiset {
        TwistMultiset(vec![(0, 1), (-1, 121), (-2, 381), (-3, 121), (-4, 1)])
    }

    pub fn parts(&self) -> &[(i64, u64)] {
        &self.0
    }

    pub fn rank(&self) -> u64 {
        self.0.iter().map(|p| p.1).sum()
    }
}

impl FromStr for TwistMultiset {
    type Err = Error;

    /// `"0:1,-1:121,-2:381"`: comma-separated `twist:multiplicity` pairs.
    fn from_str(s: &str) -> Result<TwistMultiset> {
        let parts = s
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| {
                let (d, m) = p
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("expected twist:multiplicity, got {p:?}")))?;
                let d = d.trim().parse::<i64>().map_err(|e| Error::Parse(format!("twist {d:?}: {e}")))?;
                let m = m.trim().parse::<u64>().map_err(|e| Error::Parse(format!("multiplicity {m:?}: {e}")))?;
                Ok((d, m))
            })
            .collect::<Result<Vec<_>>>()?;
        TwistMultiset::new(parts)
    }
}

/// `χ(𝒪_{P³}(n + d)) = (n+d+1)(n+d+2)(n+d+3)/6` as a polynomial in `n`.
fn euler_characteristic_line(d: i64) -> RatPolynomial {
    let lin = |c: i64| RatPolynomial::from_ints(&[c, 1]);
    lin(d + 1)
        .mul(&lin(d + 2))
        .mul(&lin(d + 3))
        .scale(&BigRational::new(1.into(), 6.into()))
}

/// `p(n) = Σ m · χ(𝒪(n + d))`.
pub fn hilbert_polynomial(tw: &TwistMultiset) -> RatPolynomial {
    tw.0.iter().fold(RatPolynomial::zero(), |acc, &(d, m)| {
        acc.add(&euler_characteristic_line(d).scale(&BigRational::from_integer(m.into())))
    })
}

fn binom3(m: i64) -> u128 {
    if m < 3 {
        return 0;
    }
    let m = m as u128;
    m * (m - 1) * (m - 2) / 6
}

/// `dim H^i(P³, 𝒪(d))`.
pub fn cohomology_dim(d: i64, i: i64) -> Result<u128> {
    match i {
        0 if d >= 0 => Ok(binom3(d + 3)),
        3 if d <= -4 => Ok(binom3(-d - 1)),
        0..=3 => Ok(0),
        _ => Err(Error::CohomologyDegree(i)),
    }
}

/// `(h⁰, h¹, h², h³)` of the twisted sum `⊕ 𝒪(n + d)^{⊕m}`.
pub fn sheaf_cohomology(tw: &TwistMultiset, n: i64) -> [u128; 4] {
    let mut h = [0u128; 4];
    for &(d, m) in &tw.0 {
        for (i, slot) in h.iter_mut().enumerate() {
            *slot += m as u128 * cohomology_dim(n + d, i as i64).expect("degree in range");
        }
    }
    h
}

/// `h⁰ − h¹ + h² − h³`.
pub fn euler_characteristic(h: &[u128; 4]) -> BigInt {
    let b = |v: u128| BigInt::from(v);
    b(h[0]) - b(h[1]) + b(h[2]) - b(h[3])
}

/// For a quotient `𝒜 → F` with Hilbert polynomial `h` of degree ≤ 1, the
/// kernel has Hilbert polynomial `p₀ − h`. Returns `(h, p₀ − h)`.
pub fn dt_polynomial_pair(h: &RatPolynomial) -> Result<(RatPolynomial, RatPolynomial)> {
    match h.degree() {
        Some(d) if d >= 2 => Err(Error::DegreeTooLarge(d)),
        _ => {
            let p0 = hilbert_polynomial(&TwistMultiset::sheaf_algebra());
            Ok((h.clone(), p0.sub(h)))
        }
    }
}
