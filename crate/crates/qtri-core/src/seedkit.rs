//! Quantum seeds, mutation, the bipartite quiver model, and the index
//! bookkeeping that ties cluster data to quiver-variety data.
//!
//! Vertices are 0-based everywhere in code; diagnostics print them 1-based.

use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::matrix::IntMat;
use crate::qtorus::{ExpVec, SkewForm};
use crate::{Error, Result};

#[inline]
pub(crate) fn pos(x: i64) -> i64 {
    x.max(0)
}

/// A quantum seed `(Lambda, Btilde)` with `Lambda` a 2n x 2n skew form and
/// `Btilde` a 2n x n exchange matrix whose top block mutates from `B` and
/// bottom block from the identity.
#[derive(Clone, PartialEq, Eq)]
pub struct Seed {
    lambda: Arc<SkewForm>,
    btilde: IntMat,
}

impl Seed {
    /// The principal seed: `Btilde = [B; I]`, `Lambda = [[0, -I], [I, -B]]`.
    pub fn principal(b: &IntMat) -> Result<Self> {
        b.is_skew_symmetric()?;
        let n = b.rows();
        let mut lambda = IntMat::zeros(2 * n, 2 * n);
        let mut btilde = IntMat::zeros(2 * n, n);
        for i in 0..n {
            lambda[(i, n + i)] = -1;
            lambda[(n + i, i)] = 1;
            btilde[(n + i, i)] = 1;
            for j in 0..n {
                lambda[(n + i, n + j)] = -b[(i, j)];
                btilde[(i, j)] = b[(i, j)];
            }
        }
        Ok(Seed { lambda: Arc::new(SkewForm::new(lambda)?), btilde })
    }

    pub fn n(&self) -> usize {
        self.btilde.cols()
    }

    pub fn form(&self) -> &Arc<SkewForm> {
        &self.lambda
    }

    pub fn btilde(&self) -> &IntMat {
        &self.btilde
    }

    /// The k-th column of `Btilde` as a length-2n exponent vector.
    pub fn btilde_col(&self, k: usize) -> ExpVec {
        ExpVec(self.btilde.col(k))
    }

    /// The top n x n block of `Btilde`.
    pub fn b_top(&self) -> IntMat {
        let n = self.n();
        let mut b = IntMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                b[(i, j)] = self.btilde[(i, j)];
            }
        }
        b
    }

    /// Mutation at direction `k` (0-based); an involution.
    pub fn mutate(&self, k: usize) -> Result<Self> {
        let n = self.n();
        let m = 2 * n;
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k + 1, n });
        }
        let bt = &self.btilde;
        let mut nb = IntMat::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                nb[(i, j)] = if i == k || j == k {
                    -bt[(i, j)]
                } else {
                    bt[(i, j)] + pos(bt[(i, k)]) * pos(bt[(k, j)]) - pos(-bt[(i, k)]) * pos(-bt[(k, j)])
                };
            }
        }
        // Lambda'(e_k, e_j) = Lambda(-e_k + [b_k]_+, e_j); other rows unchanged.
        let lam = self.lambda.matrix();
        let mut nl = lam.clone();
        let bk = bt.col(k);
        let wvec: Vec<i64> = (0..m).map(|i| pos(bk[i]) - i64::from(i == k)).collect();
        for j in 0..m {
            if j == k {
                continue;
            }
            let val: i64 = (0..m).map(|i| wvec[i] * lam[(i, j)]).sum();
            nl[(k, j)] = val;
            nl[(j, k)] = -val;
        }
        nl[(k, k)] = 0;
        let seed = Seed { lambda: Arc::new(SkewForm::new(nl)?), btilde: nb };
        debug_assert!(seed.compatibility_holds());
        Ok(seed)
    }

    /// The compatibility pairing `Lambda(b_k, e_j) = delta_{jk}` for
    /// `1 <= j, k <= n`; holds for the principal seed and is preserved by
    /// mutation.
    pub fn compatibility_holds(&self) -> bool {
        let n = self.n();
        for k in 0..n {
            let bk = self.btilde_col(k);
            for j in 0..n {
                let v = self.lambda.eval(&bk, &ExpVec::unit(j, 2 * n));
                if v != i64::from(j == k) {
                    return false;
                }
            }
        }
        true
    }
}

impl std::fmt::Debug for Seed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Seed {{ lambda: {:?}, btilde: {:?} }}", self.lambda.matrix(), self.btilde)
    }
}

impl Serialize for Seed {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Seed", 2)?;
        st.serialize_field("lambda", &self.lambda.matrix().to_rows())?;
        st.serialize_field("btilde", &self.btilde.to_rows())?;
        st.end()
    }
}

/// One multiplicity class of arrows `source -> target` in the quiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arrow {
    pub source: usize,
    pub target: usize,
    pub mult: i64,
}

/// A bipartite quiver: every vertex is a pure sink or a pure source, and
/// each arrow class goes source -> sink with positive multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteQuiver {
    n: usize,
    is_source: Vec<bool>,
    arrows: Vec<Arrow>,
}

impl BipartiteQuiver {
    /// Split `B` into sinks and sources and collect the arrow classes.
    ///
    /// A vertex with a positive row entry receives arrows, one with a
    /// negative row entry emits; a vertex doing both is rejected. Isolated
    /// vertices count as sinks.
    pub fn from_b(b: &IntMat) -> Result<Self> {
        b.is_skew_symmetric()?;
        let n = b.rows();
        let mut is_source = vec![false; n];
        for i in 0..n {
            let receives = (0..n).any(|j| b[(i, j)] > 0);
            let emits = (0..n).any(|j| b[(i, j)] < 0);
            if receives && emits {
                return Err(Error::NotBipartite { vertex: i + 1 });
            }
            is_source[i] = emits;
        }
        let mut arrows = Vec::new();
        for beta in 0..n {
            if !is_source[beta] {
                continue;
            }
            for alpha in 0..n {
                let mult = b[(alpha, beta)];
                if mult > 0 {
                    arrows.push(Arrow { source: beta, target: alpha, mult });
                }
            }
        }
        arrows.sort_by_key(|a| (a.source, a.target));
        Ok(BipartiteQuiver { n, is_source, arrows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_source(&self, i: usize) -> bool {
        self.is_source[i]
    }

    pub fn is_sink(&self, i: usize) -> bool {
        !self.is_source[i]
    }

    /// Sources in increasing index order.
    pub fn sources(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&i| self.is_source[i])
    }

    /// Sinks in increasing index order.
    pub fn sinks(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&i| !self.is_source[i])
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    /// Total arrow multiplicity between `i` and `j`, either orientation.
    pub fn mult_between(&self, i: usize, j: usize) -> i64 {
        self.arrows
            .iter()
            .filter(|a| (a.source == i && a.target == j) || (a.source == j && a.target == i))
            .map(|a| a.mult)
            .sum()
    }

    /// Rebuild the exchange matrix: `b[target][source] = mult`.
    pub fn b_matrix(&self) -> IntMat {
        let mut b = IntMat::zeros(self.n, self.n);
        for a in &self.arrows {
            b[(a.target, a.source)] = a.mult;
            b[(a.source, a.target)] = -a.mult;
        }
        b
    }

    /// The acyclic order used for standard monomials: all sources in
    /// increasing index, then all sinks in increasing index.
    pub fn acyclic_order(&self) -> Vec<usize> {
        self.sources().chain(self.sinks()).collect()
    }
}

/// Dimension data `(w_i, w'_i)` per vertex, all nonnegative.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WVector {
    pairs: Vec<(i64, i64)>,
}

impl WVector {
    pub fn new(pairs: Vec<(i64, i64)>) -> Result<Self> {
        if pairs.iter().any(|&(w, wp)| w < 0 || wp < 0) {
            return Err(Error::NegativeW);
        }
        Ok(WVector { pairs })
    }

    pub fn zero(n: usize) -> Self {
        WVector { pairs: vec![(0, 0); n] }
    }

    /// Interleaved flat form `[w_1, w'_1, w_2, w'_2, ...]`.
    pub fn from_flat(flat: &[i64]) -> Result<Self> {
        if !flat.len().is_multiple_of(2) {
            return Err(Error::Input("w must have an even number of entries".into()));
        }
        WVector::new(flat.chunks(2).map(|c| (c[0], c[1])).collect())
    }

    pub fn to_flat(&self) -> Vec<i64> {
        self.pairs.iter().flat_map(|&(w, wp)| [w, wp]).collect()
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn w(&self, i: usize) -> i64 {
        self.pairs[i].0
    }

    pub fn wp(&self, i: usize) -> i64 {
        self.pairs[i].1
    }

    pub fn pairs(&self) -> &[(i64, i64)] {
        &self.pairs
    }

    pub fn set(&mut self, i: usize, w: i64, wp: i64) {
        assert!(w >= 0 && wp >= 0, "w components must stay nonnegative");
        self.pairs[i] = (w, wp);
    }

    pub fn is_zero(&self) -> bool {
        self.pairs.iter().all(|&(w, wp)| w == 0 && wp == 0)
    }

    /// True iff `min(w_i, w'_i) = 0` for every `i`.
    pub fn is_phi_part(&self) -> bool {
        self.pairs.iter().all(|&(w, wp)| w.min(wp) == 0)
    }

    /// The unique splitting `w = fw + phiw` with `fw_i = fw'_i` and
    /// `phiw_i * phiw'_i = 0` componentwise.
    pub fn split(&self) -> (WVector, WVector) {
        let mut fw = Vec::with_capacity(self.n());
        let mut pw = Vec::with_capacity(self.n());
        for &(w, wp) in &self.pairs {
            let m = w.min(wp);
            fw.push((m, m));
            pw.push((w - m, wp - m));
        }
        (WVector { pairs: fw }, WVector { pairs: pw })
    }
}

/// The q-Cartan operator: `C_q v = (v_i, v_i - sum_{h: i-j} v_j)` with the
/// arrow sum over both orientations, weighted by multiplicity. The result
/// may be negative, so it is returned as raw pairs rather than a `WVector`.
pub fn cq_apply(q: &BipartiteQuiver, v: &[i64]) -> Vec<(i64, i64)> {
    assert_eq!(v.len(), q.n(), "length mismatch");
    let mut out: Vec<(i64, i64)> = v.iter().map(|&vi| (vi, vi)).collect();
    for a in q.arrows() {
        out[a.source].1 -= a.mult * v[a.target];
        out[a.target].1 -= a.mult * v[a.source];
    }
    out
}

/// The index map sending `w` to a torus exponent: `w_b - w'_b` on sources,
/// `w'_a - w_a` on sinks, zero on the frozen block.
pub fn phi(q: &BipartiteQuiver, w: &WVector) -> ExpVec {
    let n = q.n();
    assert_eq!(w.n(), n, "length mismatch");
    let mut e = vec![0i64; 2 * n];
    for (i, x) in e.iter_mut().enumerate().take(n) {
        *x = if q.is_source(i) { w.w(i) - w.wp(i) } else { w.wp(i) - w.w(i) };
    }
    ExpVec(e)
}

/// The inverse-direction convention: the dimension data attached to an
/// index `a` (only the first n coordinates are read).
///
/// Sinks take `(w, w') = ([-a]_+, [a]_+)` and sources the transpose; this
/// is the assignment under which `phi(w_of_a(a))` restricts to `a` on the
/// first n coordinates.
pub fn w_of_a(q: &BipartiteQuiver, a: &ExpVec) -> WVector {
    let n = q.n();
    assert!(a.len() >= n, "index too short");
    let pairs = (0..n)
        .map(|i| {
            if q.is_source(i) {
                (pos(a[i]), pos(-a[i]))
            } else {
                (pos(-a[i]), pos(a[i]))
            }
        })
        .collect();
    WVector { pairs }
}

/// Composite mutation at every source, in increasing index order; the
/// sources are pairwise non-adjacent so the order does not matter.
pub fn mu_i1(s: &Seed, q: &BipartiteQuiver) -> Seed {
    let mut seed = s.clone();
    for beta in q.sources() {
        seed = seed.mutate(beta).expect("source index in range");
    }
    seed
}
