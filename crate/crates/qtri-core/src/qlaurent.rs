//! Sparse one-variable Laurent polynomials over arbitrary-precision
//! integers: the coefficient ring `Z[v^{+-1}]`.
//!
//! Values are kept in canonical sparse form (no stored zero coefficient),
//! so structural equality is ring equality. Coefficients are `BigInt`
//! because the coefficients of basis elements grow with the quiver weight
//! and must never overflow silently.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// An element of `Z[v^{+-1}]`, stored as a map from degree to coefficient.
#[derive(Clone, PartialEq, Eq, Default, PartialOrd, Ord, Hash)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::v_pow(0)
    }

    /// The monomial `v^d`.
    pub fn v_pow(d: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(d, BigInt::one());
        LaurentPoly { coeffs }
    }

    pub fn constant(c: i64) -> Self {
        LaurentPoly::from_terms([(0, c)])
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, i64)>>(terms: I) -> Self {
        let mut p = LaurentPoly::zero();
        for (d, c) in terms {
            p.add_term(d, &BigInt::from(c));
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeff(0).is_one()
    }

    pub fn coeff(&self, d: i64) -> BigInt {
        self.coeffs.get(&d).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.coeffs.iter().map(|(&d, c)| (d, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn add_term(&mut self, d: i64, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(d).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&d);
        }
    }

    /// Largest exponent with nonzero coefficient; the zero polynomial has none.
    pub fn deg(&self) -> Result<i64> {
        self.coeffs.keys().next_back().copied().ok_or(Error::ZeroDegree)
    }

    pub fn min_deg(&self) -> Result<i64> {
        self.coeffs.keys().next().copied().ok_or(Error::ZeroDegree)
    }

    /// The bar substitution `v -> v^{-1}`; an involution.
    pub fn bar(&self) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(&d, c)| (-d, c.clone())).collect() }
    }

    /// Multiply by `v^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(&d, c)| (d + k, c.clone())).collect() }
    }

    /// Value at `v = 1`, i.e. the coefficient sum.
    pub fn eval_at_one(&self) -> BigInt {
        self.coeffs.values().sum()
    }

    /// True iff the polynomial is fixed by bar, i.e. `c(d) = c(-d)`.
    pub fn is_symmetric(&self) -> bool {
        self.bar() == *self
    }

    /// True iff the coefficients weakly decrease away from degree 0 along
    /// each parity class: `c(b) >= c(b + 2)` for all `b >= 0` and
    /// `c(b) >= c(b - 2)` for all `b <= 0`, with gaps counted as zeros.
    ///
    /// Checking in steps of two matches the supports that occur here
    /// (Gaussian binomials and the basis coefficients live on a single
    /// parity), so e.g. `v^2 + v^{-2}` dips at 0 and is not unimodal while
    /// `v^4 + v^2 + 2 + v^{-2} + v^{-4}` is.
    pub fn is_unimodal(&self) -> bool {
        let (lo, hi) = match (self.min_deg(), self.deg()) {
            (Ok(lo), Ok(hi)) => (lo.min(0), hi.max(0)),
            _ => return true,
        };
        for b in 0..=hi {
            if self.coeff(b) < self.coeff(b + 2) {
                return false;
            }
        }
        for b in lo..=0 {
            if self.coeff(b) < self.coeff(b - 2) {
                return false;
            }
        }
        true
    }

    /// For `p` with `bar(p) = -p`, the unique `q` in `v Z[v]` with
    /// `q - bar(q) = p`: the positive-degree part of `p`.
    pub fn positive_part(&self) -> Result<Self> {
        if self.bar() != -self {
            return Err(Error::NotAntiInvariant);
        }
        Ok(LaurentPoly {
            coeffs: self.coeffs.iter().filter(|(&d, _)| d > 0).map(|(&d, c)| (d, c.clone())).collect(),
        })
    }

    /// True iff every term has positive degree, i.e. the value lies in `v Z[v]`.
    pub fn in_v_zv(&self) -> bool {
        self.coeffs.keys().all(|&d| d > 0)
    }

    /// If the polynomial is a single term `1 * v^s`, return `s`.
    pub fn as_unit_v_pow(&self) -> Option<i64> {
        if self.coeffs.len() == 1 {
            let (&d, c) = self.coeffs.iter().next().unwrap();
            if c.is_one() {
                return Some(d);
            }
        }
        None
    }

    pub fn scale_bigint(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly { coeffs: self.coeffs.iter().map(|(&d, c)| (d, c * k)).collect() }
    }
}

/// The balanced q-integer `[n] = (v^n - v^{-n}) / (v - v^{-1})`.
pub fn qint(n: u64) -> LaurentPoly {
    let mut p = LaurentPoly::zero();
    let n = n as i64;
    let mut d = 1 - n;
    while d < n {
        p.add_term(d, &BigInt::one());
        d += 2;
    }
    p
}

/// The balanced Gaussian binomial, by the q-Pascal recurrence
/// `[n k] = v^k [n-1 k] + v^{k-n} [n-1 k-1]`; zero when `k < 0` or `k > n`.
///
/// Division never enters; equality with the `[n]!`-quotient form is a test.
pub fn qbinom(n: u64, k: i64) -> LaurentPoly {
    if k < 0 || k > n as i64 {
        return LaurentPoly::zero();
    }
    let k = k as u64;
    // row-by-row q-Pascal triangle
    let mut row: Vec<LaurentPoly> = vec![LaurentPoly::one()];
    for m in 1..=n {
        let mut next = Vec::with_capacity(row.len() + 1);
        for j in 0..=m.min(k) {
            let mut p = LaurentPoly::zero();
            if (j as usize) < row.len() {
                p += &row[j as usize].shift(j as i64);
            }
            if j > 0 {
                p += &row[j as usize - 1].shift(j as i64 - m as i64);
            }
            next.push(p);
        }
        row = next;
    }
    row[k as usize].clone()
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&d, c) in self.coeffs.iter().rev() {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            if d == 0 {
                write!(f, "{a}")?;
            } else {
                if !a.is_one() {
                    write!(f, "{a}*")?;
                }
                if d == 1 {
                    write!(f, "v")?;
                } else {
                    write!(f, "v^{d}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl std::ops::$trait<LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$method(&rhs)
            }
        }
        impl std::ops::$trait<&LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: &LaurentPoly) -> LaurentPoly {
                (&self).$method(rhs)
            }
        }
        impl std::ops::$trait<LaurentPoly> for &LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: LaurentPoly) -> LaurentPoly {
                self.$method(&rhs)
            }
        }
    };
}

impl std::ops::Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (d, c) in rhs.terms() {
            out.add_term(d, c);
        }
        out
    }
}
forward_binop!(Add, add);

impl std::ops::Sub<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (d, c) in rhs.terms() {
            out.add_term(d, &(-c));
        }
        out
    }
}
forward_binop!(Sub, sub);

impl std::ops::Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (d1, c1) in self.terms() {
            for (d2, c2) in rhs.terms() {
                out.add_term(d1 + d2, &(c1 * c2));
            }
        }
        out
    }
}
forward_binop!(Mul, mul);

impl std::ops::Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(&d, c)| (d, -c)).collect() }
    }
}

impl std::ops::Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl std::ops::AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (d, c) in rhs.terms() {
            self.add_term(d, c);
        }
    }
}

impl std::ops::SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        for (d, c) in rhs.terms() {
            self.add_term(d, &(-c));
        }
    }
}

/// JSON form: an object mapping decimal-string degree to decimal-string
/// coefficient, in increasing degree order, e.g. `{"-2":"1","0":"2","2":"1"}`.
impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.coeffs.len()))?;
        for (d, c) in &self.coeffs {
            map.serialize_entry(&d.to_string(), &c.to_string())?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = LaurentPoly;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a map from degree strings to coefficient strings")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> std::result::Result<LaurentPoly, A::Error> {
                let mut p = LaurentPoly::zero();
                while let Some((d, c)) = access.next_entry::<String, String>()? {
                    let d: i64 = d.parse().map_err(serde::de::Error::custom)?;
                    let c: BigInt = c.parse().map_err(serde::de::Error::custom)?;
                    p.add_term(d, &c);
                }
                Ok(p)
            }
        }
        deserializer.deserialize_map(V)
    }
}
