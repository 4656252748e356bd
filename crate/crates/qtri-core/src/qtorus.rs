//! The based quantum torus: free `Z[v^{+-1}]`-module on monomials `X^e`,
//! `e` an integer vector of length 2n, with multiplication twisted by a
//! skew form, `X^e X^f = v^{L(e,f)} X^{e+f}`.
//!
//! Elements are immutable once built and all products are pure functions;
//! the ambient form is shared behind an `Arc`. Elements carrying different
//! forms cannot be combined (checked at every binary operation).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::matrix::IntMat;
use crate::qlaurent::LaurentPoly;
use crate::{Error, Result};

/// An exponent of a torus monomial: an integer vector of length 2n whose
/// first n coordinates are cluster slots and last n are frozen slots.
///
/// The derived ordering is lexicographic, which fixes a deterministic
/// iteration order everywhere.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExpVec(pub Vec<i64>);

impl ExpVec {
    pub fn zero(len: usize) -> Self {
        ExpVec(vec![0; len])
    }

    /// The standard basis vector `e_i` (0-based).
    pub fn unit(i: usize, len: usize) -> Self {
        let mut v = vec![0; len];
        v[i] = 1;
        ExpVec(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// Sum of the last n coordinates; `n = len / 2`.
    pub fn frozen_sum(&self) -> i64 {
        let n = self.0.len() / 2;
        self.0[n..].iter().sum()
    }

    pub fn upper(&self) -> &[i64] {
        &self.0[..self.0.len() / 2]
    }

    pub fn frozen(&self) -> &[i64] {
        &self.0[self.0.len() / 2..]
    }
}

impl std::ops::Index<usize> for ExpVec {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl std::ops::Add<&ExpVec> for &ExpVec {
    type Output = ExpVec;
    fn add(self, rhs: &ExpVec) -> ExpVec {
        assert_eq!(self.len(), rhs.len(), "exponent length mismatch");
        ExpVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl std::ops::Sub<&ExpVec> for &ExpVec {
    type Output = ExpVec;
    fn sub(self, rhs: &ExpVec) -> ExpVec {
        assert_eq!(self.len(), rhs.len(), "exponent length mismatch");
        ExpVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl fmt::Debug for ExpVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<i64>> for ExpVec {
    fn from(v: Vec<i64>) -> Self {
        ExpVec(v)
    }
}

impl Serialize for ExpVec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// A skew-symmetric bilinear form on `Z^{2n}`, evaluated as `e^T L f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewForm {
    mat: IntMat,
}

impl SkewForm {
    pub fn new(mat: IntMat) -> Result<Self> {
        mat.is_skew_symmetric()?;
        Ok(SkewForm { mat })
    }

    /// Number of slots, i.e. 2n.
    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &IntMat {
        &self.mat
    }

    /// `e^T L f`. Panics on a length mismatch.
    pub fn eval(&self, e: &ExpVec, f: &ExpVec) -> i64 {
        assert_eq!(e.len(), self.dim(), "exponent/form dimension mismatch");
        assert_eq!(f.len(), self.dim(), "exponent/form dimension mismatch");
        let mut acc = 0;
        for (i, &ei) in e.0.iter().enumerate() {
            if ei == 0 {
                continue;
            }
            let mut row = 0;
            for (j, &fj) in f.0.iter().enumerate() {
                if fj != 0 {
                    row += self.mat[(i, j)] * fj;
                }
            }
            acc += ei * row;
        }
        acc
    }
}

/// A finitely supported `Z[v^{+-1}]`-combination of torus monomials.
#[derive(Clone)]
pub struct TorusElem {
    form: Arc<SkewForm>,
    terms: BTreeMap<ExpVec, LaurentPoly>,
}

impl TorusElem {
    pub fn zero(form: &Arc<SkewForm>) -> Self {
        TorusElem { form: Arc::clone(form), terms: BTreeMap::new() }
    }

    pub fn one(form: &Arc<SkewForm>) -> Self {
        TorusElem::monomial(form, ExpVec::zero(form.dim()))
    }

    /// The basis monomial `X^e` with coefficient 1.
    pub fn monomial(form: &Arc<SkewForm>, e: ExpVec) -> Self {
        TorusElem::term(form, e, LaurentPoly::one())
    }

    pub fn term(form: &Arc<SkewForm>, e: ExpVec, c: LaurentPoly) -> Self {
        assert_eq!(e.len(), form.dim(), "exponent/form dimension mismatch");
        let mut t = TorusElem::zero(form);
        t.add_term(e, &c);
        t
    }

    pub fn form(&self) -> &Arc<SkewForm> {
        &self.form
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExpVec, &LaurentPoly)> {
        self.terms.iter()
    }

    /// Exponents with nonzero coefficient, in lexicographic order.
    pub fn support(&self) -> impl Iterator<Item = &ExpVec> {
        self.terms.keys()
    }

    /// Coefficient at `e`; the zero polynomial when absent.
    pub fn coeff_at(&self, e: &ExpVec) -> LaurentPoly {
        self.terms.get(e).cloned().unwrap_or_else(LaurentPoly::zero)
    }

    pub fn add_term(&mut self, e: ExpVec, c: &LaurentPoly) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(slot) => {
                slot.insert(c.clone());
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    fn assert_same_form(&self, other: &TorusElem) {
        assert!(
            Arc::ptr_eq(&self.form, &other.form) || self.form == other.form,
            "cannot combine torus elements over different skew forms"
        );
    }

    /// Multiply every coefficient by `v^k`.
    pub fn scale_vpow(&self, k: i64) -> Self {
        TorusElem {
            form: Arc::clone(&self.form),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.shift(k))).collect(),
        }
    }

    pub fn scale_poly(&self, p: &LaurentPoly) -> Self {
        let mut out = TorusElem::zero(&self.form);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), &(c * p));
        }
        out
    }

    /// The bar-involution: fixes every `X^e` and sends `v` to `v^{-1}`,
    /// so it acts on coefficients term by term.
    pub fn bar(&self) -> Self {
        TorusElem {
            form: Arc::clone(&self.form),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.bar())).collect(),
        }
    }

    pub fn is_bar_invariant(&self) -> bool {
        self.terms.values().all(|c| c.is_symmetric())
    }

    /// m-fold product, with the empty product equal to 1.
    pub fn pow(&self, m: u64) -> Self {
        let mut out = TorusElem::one(&self.form);
        for _ in 0..m {
            out = &out * self;
        }
        out
    }
}

impl PartialEq for TorusElem {
    fn eq(&self, other: &Self) -> bool {
        self.form == other.form && self.terms == other.terms
    }
}
impl Eq for TorusElem {}

impl std::ops::Add<&TorusElem> for &TorusElem {
    type Output = TorusElem;
    fn add(self, rhs: &TorusElem) -> TorusElem {
        self.assert_same_form(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c);
        }
        out
    }
}

impl std::ops::Sub<&TorusElem> for &TorusElem {
    type Output = TorusElem;
    fn sub(self, rhs: &TorusElem) -> TorusElem {
        self.assert_same_form(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), &(-c));
        }
        out
    }
}

impl std::ops::Mul<&TorusElem> for &TorusElem {
    type Output = TorusElem;
    fn mul(self, rhs: &TorusElem) -> TorusElem {
        self.assert_same_form(rhs);
        let mut out = TorusElem::zero(&self.form);
        for (e, c) in &self.terms {
            for (f, d) in &rhs.terms {
                let twist = self.form.eval(e, f);
                out.add_term(e + f, &(c * d).shift(twist));
            }
        }
        out
    }
}

impl std::ops::Neg for &TorusElem {
    type Output = TorusElem;
    fn neg(self) -> TorusElem {
        TorusElem {
            form: Arc::clone(&self.form),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl std::ops::AddAssign<&TorusElem> for TorusElem {
    fn add_assign(&mut self, rhs: &TorusElem) {
        self.assert_same_form(rhs);
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), c);
        }
    }
}

impl fmt::Debug for TorusElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*X^{e:?}")?;
        }
        Ok(())
    }
}

/// JSON form: a list of `{"exp": [...], "coeff": {...}}`, sorted by exponent.
impl Serialize for TorusElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            seq.serialize_element(&TermJson { exp: e, coeff: c })?;
        }
        seq.end()
    }
}

struct TermJson<'a> {
    exp: &'a ExpVec,
    coeff: &'a LaurentPoly,
}

impl Serialize for TermJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Term", 2)?;
        st.serialize_field("exp", self.exp)?;
        st.serialize_field("coeff", self.coeff)?;
        st.end()
    }
}

impl TorusElem {
    /// Parse the list-of-terms JSON form against a given ambient form.
    pub fn from_json(form: &Arc<SkewForm>, value: &serde_json::Value) -> Result<Self> {
        let arr = value.as_array().ok_or_else(|| Error::Input("expected a JSON array of terms".into()))?;
        let mut out = TorusElem::zero(form);
        for item in arr {
            let exp = item
                .get("exp")
                .and_then(|e| e.as_array())
                .ok_or_else(|| Error::Input("term missing \"exp\"".into()))?;
            let exp: Vec<i64> = exp
                .iter()
                .map(|x| x.as_i64().ok_or_else(|| Error::Input("non-integer exponent".into())))
                .collect::<Result<_>>()?;
            if exp.len() != form.dim() {
                return Err(Error::Input(format!(
                    "exponent length {} does not match 2n = {}",
                    exp.len(),
                    form.dim()
                )));
            }
            let coeff = item.get("coeff").ok_or_else(|| Error::Input("term missing \"coeff\"".into()))?;
            let coeff: LaurentPoly =
                serde_json::from_value(coeff.clone()).map_err(|e| Error::Input(e.to_string()))?;
            out.add_term(ExpVec(exp), &coeff);
        }
        Ok(out)
    }
}
