//! The combinatorial shadow of the graded quiver varieties: dominance,
//! the maximal dominant vector below `v`, dimension counts, Poincare
//! polynomials, the q-binomial generating series of the fibers, and the
//! support bound
//! `f(v)`.

use std::fmt::Write as _;

use crate::qlaurent::{qbinom, LaurentPoly};
use crate::qtorus::{ExpVec, TorusElem};
use crate::seedkit::{cq_apply, phi, w_of_a, BipartiteQuiver, Seed, WVector};
use crate::{Error, Result};

/// A pair of dimension vectors, componentwise nonnegative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimPair {
    pub v: Vec<i64>,
    pub w: WVector,
}

impl DimPair {
    pub fn new(v: Vec<i64>, w: WVector) -> Result<Self> {
        if v.len() != w.n() {
            return Err(Error::Input("v and w have different ranks".into()));
        }
        if v.iter().any(|&x| x < 0) {
            return Err(Error::Input("v has a negative component".into()));
        }
        Ok(DimPair { v, w })
    }
}

/// Nonemptiness of the fiber indexed by `(v, w)`:
/// `v_a <= w_a` at sinks and `v_b <= w'_b + sum_{h: s(h)=b} v_{t(h)}` at sources.
pub fn is_nonempty_f(q: &BipartiteQuiver, v: &[i64], w: &WVector) -> bool {
    assert_eq!(v.len(), q.n(), "length mismatch");
    if v.iter().any(|&x| x < 0) {
        return false;
    }
    for alpha in q.sinks() {
        if v[alpha] > w.w(alpha) {
            return false;
        }
    }
    for beta in q.sources() {
        let bound = w.wp(beta)
            + q.arrows().iter().filter(|a| a.source == beta).map(|a| a.mult * v[a.target]).sum::<i64>();
        if v[beta] > bound {
            return false;
        }
    }
    true
}

/// l-dominance: `w - C_q v >= 0` componentwise.
pub fn is_l_dominant(q: &BipartiteQuiver, v: &[i64], w: &WVector) -> bool {
    assert_eq!(v.len(), q.n(), "length mismatch");
    if v.iter().any(|&x| x < 0) {
        return false;
    }
    cq_apply(q, v)
        .iter()
        .enumerate()
        .all(|(i, &(u, up))| w.w(i) >= u && w.wp(i) >= up)
}

/// All l-dominant `v` for `w`, in lexicographic order. The set is finite:
/// sinks are bounded by `w_a` and sources by `min(w_b, w'_b + arrow sums)`.
pub fn dom_set(q: &BipartiteQuiver, w: &WVector) -> Vec<Vec<i64>> {
    enumerate_sinks_then_sources(q, w, true)
        .into_iter()
        .filter(|v| is_l_dominant(q, v, w))
        .collect()
}

/// The vectors satisfying the nonemptiness condition, in lexicographic
/// order; this is the enumeration domain for supports.
pub fn nonempty_set(q: &BipartiteQuiver, w: &WVector) -> Vec<Vec<i64>> {
    enumerate_sinks_then_sources(q, w, false)
}

/// Enumerate sinks first (bounded by `w_a`), then sources (bounded by
/// `w'_b` plus the arrow-weighted sink values, optionally capped by `w_b`
/// for dominance pre-filtering).
fn enumerate_sinks_then_sources(q: &BipartiteQuiver, w: &WVector, cap_sources_by_w: bool) -> Vec<Vec<i64>> {
    let n = q.n();
    let sinks: Vec<usize> = q.sinks().collect();
    let sources: Vec<usize> = q.sources().collect();

    let mut out = Vec::new();
    let mut v = vec![0i64; n];
    fn rec_sources(
        q: &BipartiteQuiver,
        w: &WVector,
        sources: &[usize],
        cap: bool,
        v: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        match sources.split_first() {
            None => out.push(v.clone()),
            Some((&beta, rest)) => {
                let mut bound = w.wp(beta)
                    + q.arrows().iter().filter(|a| a.source == beta).map(|a| a.mult * v[a.target]).sum::<i64>();
                if cap {
                    bound = bound.min(w.w(beta));
                }
                for x in 0..=bound {
                    v[beta] = x;
                    rec_sources(q, w, rest, cap, v, out);
                }
                v[beta] = 0;
            }
        }
    }
    fn rec_sinks(
        q: &BipartiteQuiver,
        w: &WVector,
        sinks: &[usize],
        sources: &[usize],
        cap: bool,
        v: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        match sinks.split_first() {
            None => rec_sources(q, w, sources, cap, v, out),
            Some((&alpha, rest)) => {
                for x in 0..=w.w(alpha) {
                    v[alpha] = x;
                    rec_sinks(q, w, rest, sources, cap, v, out);
                }
                v[alpha] = 0;
            }
        }
    }
    rec_sinks(q, w, &sinks, &sources, cap_sources_by_w, &mut v, &mut out);
    out.sort();
    out
}

/// The componentwise-maximal l-dominant vector below `v`:
/// `vbar_i = min(v_i, w_i, w'_i + sum_{h: i-j} min(v_j, w_j))`.
pub fn vbar(q: &BipartiteQuiver, v: &[i64], w: &WVector) -> Vec<i64> {
    assert_eq!(v.len(), q.n(), "length mismatch");
    let m: Vec<i64> = (0..q.n()).map(|i| v[i].min(w.w(i))).collect();
    (0..q.n())
        .map(|i| {
            let nbr: i64 = q
                .arrows()
                .iter()
                .map(|a| {
                    if a.source == i {
                        a.mult * m[a.target]
                    } else if a.target == i {
                        a.mult * m[a.source]
                    } else {
                        0
                    }
                })
                .sum();
            m[i].min(w.wp(i) + nbr)
        })
        .collect()
}

/// Dimension of the projective fiber,
/// `d = sum_a w_a v_a + sum_b w'_b v_b - sum_i v_i^2 + sum_h v_{s(h)} v_{t(h)}`.
pub fn dim_f(q: &BipartiteQuiver, v: &[i64], w: &WVector) -> Result<i64> {
    if !is_nonempty_f(q, v, w) {
        return Err(Error::EmptyVariety);
    }
    let mut d = 0;
    for alpha in q.sinks() {
        d += w.w(alpha) * v[alpha];
    }
    for beta in q.sources() {
        d += w.wp(beta) * v[beta];
    }
    for x in v {
        d -= x * x;
    }
    for a in q.arrows() {
        d += a.mult * v[a.source] * v[a.target];
    }
    Ok(d)
}

/// Dimension of the bundle over it:
/// `dtilde = d + sum_a v_a w'_a + sum_b v_b w_b`.
pub fn dim_ftilde(q: &BipartiteQuiver, v: &[i64], w: &WVector) -> Result<i64> {
    let d = dim_f(q, v, w)?;
    Ok(d + bundle_rank(q, v, w))
}

/// `sum_a v_a w'_a + sum_b v_b w_b`, the rank of the bundle.
pub(crate) fn bundle_rank(q: &BipartiteQuiver, v: &[i64], w: &WVector) -> i64 {
    let mut r = 0;
    for alpha in q.sinks() {
        r += v[alpha] * w.wp(alpha);
    }
    for beta in q.sources() {
        r += v[beta] * w.w(beta);
    }
    r
}

/// Poincare polynomial of the fiber, in the convention
/// `P(X) = sum_i dim H^i(X) v^i`:
/// `v^d * prod_b [w'_b + arrow sum ; v_b] * prod_a [w_a ; v_a]`.
///
/// All exponents are even and nonnegative and the degree is `2d`.
pub fn poincare_f(q: &BipartiteQuiver, v: &[i64], w: &WVector) -> Result<LaurentPoly> {
    let d = dim_f(q, v, w)?;
    let mut p = LaurentPoly::v_pow(d);
    for beta in q.sources() {
        let top = w.wp(beta)
            + q.arrows().iter().filter(|a| a.source == beta).map(|a| a.mult * v[a.target]).sum::<i64>();
        p = p * qbinom(top as u64, v[beta]);
    }
    for alpha in q.sinks() {
        p = p * qbinom(w.w(alpha) as u64, v[alpha]);
    }
    Ok(p)
}

/// The q-binomial generating series of the fibers as a torus element:
/// `sum_v v^{d - dtilde} prod_b [w'_b + arrow sum ; v_b] prod_a [w_a ; v_a]
///  X^{phi(w) + Btilde v}`, summed over the nonempty region.
pub fn chi_m(s: &Seed, q: &BipartiteQuiver, w: &WVector) -> TorusElem {
    assert!(seed_matches_quiver(s, q), "seed is not the principal seed of this quiver");
    let base = phi(q, w);
    let mut out = TorusElem::zero(s.form());
    for v in nonempty_set(q, w) {
        let mut coeff = LaurentPoly::v_pow(-bundle_rank(q, &v, w));
        for beta in q.sources() {
            let top = w.wp(beta)
                + q.arrows().iter().filter(|a| a.source == beta).map(|a| a.mult * v[a.target]).sum::<i64>();
            coeff = coeff * qbinom(top as u64, v[beta]);
        }
        for alpha in q.sinks() {
            coeff = coeff * qbinom(w.w(alpha) as u64, v[alpha]);
        }
        let e = &base + &ExpVec(s.btilde().mul_vec(&v));
        out.add_term(e, &coeff);
    }
    out
}

pub(crate) fn seed_matches_quiver(s: &Seed, q: &BipartiteQuiver) -> bool {
    if s.n() != q.n() {
        return false;
    }
    if s.b_top() != q.b_matrix() {
        return false;
    }
    let n = s.n();
    (0..n).all(|i| (0..n).all(|j| s.btilde()[(n + i, j)] == i64::from(i == j)))
}

/// The degree bound `f(v) = -sum_i (a_i + v_i) v_i + sum_h v_{s(h)} v_{t(h)}`
/// (arrow term weighted by multiplicity). Only the first n coordinates of
/// `a` are read.
pub fn f_bound(q: &BipartiteQuiver, a: &ExpVec, v: &[i64]) -> i64 {
    assert_eq!(v.len(), q.n(), "length mismatch");
    assert!(a.len() >= q.n(), "index too short");
    let mut f = 0;
    for (i, &vi) in v.iter().enumerate() {
        f -= (a[i] + vi) * vi;
    }
    for arr in q.arrows() {
        f += arr.mult * v[arr.source] * v[arr.target];
    }
    f
}

/// The finite enumeration region `{v >= 0 : nonempty for w_of_a(a)}`
/// containing the support of the basis element at `a`.
pub fn support_region(q: &BipartiteQuiver, a: &ExpVec) -> Vec<Vec<i64>> {
    nonempty_set(q, &w_of_a(q, a))
}

/// TSV rows `v_1 .. v_n  f(v)  in_support` over the bounding box of the
/// support region plus a one-cell margin, so the `f = 0` boundary is
/// visible when plotted. `in_support` is rendered as 1/0 from the given
/// predicate.
pub fn support_tsv<F: Fn(&[i64]) -> bool>(q: &BipartiteQuiver, a: &ExpVec, in_support: F) -> String {
    let region = support_region(q, a);
    let n = q.n();
    let mut hi = vec![0i64; n];
    for v in &region {
        for i in 0..n {
            hi[i] = hi[i].max(v[i]);
        }
    }
    for x in hi.iter_mut() {
        *x += 1;
    }
    let mut rows = Vec::new();
    let mut v = vec![0i64; n];
    loop {
        rows.push(v.clone());
        let mut i = n;
        loop {
            if i == 0 {
                let mut out = String::new();
                for row in &rows {
                    for x in row {
                        write!(out, "{x}\t").unwrap();
                    }
                    let f = f_bound(q, a, row);
                    writeln!(out, "{f}\t{}", i32::from(in_support(row))).unwrap();
                }
                return out;
            }
            i -= 1;
            if v[i] < hi[i] {
                v[i] += 1;
                break;
            }
            v[i] = 0;
        }
    }
}
