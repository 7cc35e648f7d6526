//! Bounded complexes of Tate objects up to homotopy.
//!
//! Homological indexing: d_n maps degree n to degree n−1. In bracket
//! notation [A → Ḃ] the dotted term sits in degree 0, so A is in degree 1.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coefficients::{CoeffError, CoefficientRing, RingElement};
use crate::tatecat::{
    assemble, blocks_from_strings, blocks_to_strings, GradedMatrix, Matrix, TateError, TateObject,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error(transparent)]
    Tate(#[from] TateError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error("d_{degree} does not fit the terms: {detail}")]
    Shape { degree: i64, detail: String },
    #[error("homology needs a field, got {0}")]
    NotAField(CoefficientRing),
    #[error("not a chain map: {0}")]
    NotAChainMap(String),
    #[error("malformed complex document: {0}")]
    Json(String),
}

/// Outcome of a decision that may be out of reach over ℤ[1/e].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    True,
    False,
    Indeterminate,
}

impl From<bool> for Verdict {
    fn from(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Indeterminate => "indeterminate",
        })
    }
}

/// Integer Laurent polynomial in q, stored as exponent → coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct Laurent(BTreeMap<i64, i64>);

impl Laurent {
    pub fn zero() -> Self {
        Laurent(BTreeMap::new())
    }

    pub fn monomial(coeff: i64, exp: i64) -> Self {
        let mut out = Laurent::zero();
        out.add_term(exp, coeff);
        out
    }

    fn add_term(&mut self, exp: i64, coeff: i64) {
        let c = self.0.entry(exp).or_insert(0);
        *c += coeff;
        if *c == 0 {
            self.0.remove(&exp);
        }
    }

    pub fn coeff(&self, exp: i64) -> i64 {
        self.0.get(&exp).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> &BTreeMap<i64, i64> {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        let mut out = Laurent::zero();
        for (a, x) in &self.0 {
            for (b, y) in &other.0 {
                out.add_term(a + b, x * y);
            }
        }
        out
    }

    pub fn neg(&self) -> Laurent {
        Laurent(self.0.iter().map(|(e, c)| (*e, -c)).collect())
    }

    /// q ↦ q⁻¹.
    pub fn invert(&self) -> Laurent {
        Laurent(self.0.iter().map(|(e, c)| (-e, *c)).collect())
    }

    pub fn shift(&self, by: i64) -> Laurent {
        Laurent(self.0.iter().map(|(e, c)| (e + by, *c)).collect())
    }

    /// ±q^t, if that is what this is.
    pub fn as_signed_monomial(&self) -> Option<(i64, i64)> {
        match self.0.iter().next() {
            Some((e, c)) if self.0.len() == 1 && c.abs() == 1 => Some((*c, *e)),
            _ => None,
        }
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.0.iter().enumerate() {
            let sign = if *c < 0 { "-" } else { "+" };
            if i == 0 {
                if *c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            match (*e, a) {
                (0, _) => write!(f, "{a}")?,
                (1, 1) => f.write_str("q")?,
                (1, _) => write!(f, "{a}q")?,
                (_, 1) => write!(f, "q^{e}")?,
                _ => write!(f, "{a}q^{e}")?,
            }
        }
        Ok(())
    }
}

/// A bounded complex in K^b(Tate(F)).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TateComplex {
    ring: CoefficientRing,
    terms: BTreeMap<i64, TateObject>,
    // d_n for every n with nonzero terms in n and n−1
    diffs: BTreeMap<i64, GradedMatrix>,
}

impl TateComplex {
    /// Checks ring and shape bookkeeping; d² = 0 is left to [`validate`](Self::validate).
    pub fn new(
        ring: CoefficientRing,
        terms: BTreeMap<i64, TateObject>,
        diffs: BTreeMap<i64, GradedMatrix>,
    ) -> Result<Self, ComplexError> {
        let mut terms = terms;
        terms.retain(|_, x| !x.is_zero());
        if let Some(x) = terms.values().find(|x| x.ring() != ring) {
            return Err(TateError::RingMismatch(ring, x.ring()).into());
        }
        let mut out = TateComplex {
            ring,
            terms,
            diffs: BTreeMap::new(),
        };
        for (n, d) in diffs {
            let (src, tgt) = (out.term(n), out.term(n - 1));
            if d.source() != &src || d.target() != &tgt {
                if d.is_zero() && d.source().is_zero() && d.target().is_zero() {
                    continue;
                }
                return Err(ComplexError::Shape {
                    degree: n,
                    detail: format!("{} → {} vs terms {} → {}", d.source(), d.target(), src, tgt),
                });
            }
            if !src.is_zero() && !tgt.is_zero() {
                out.diffs.insert(n, d);
            }
        }
        out.fill_zero_diffs();
        Ok(out)
    }

    fn fill_zero_diffs(&mut self) {
        let degrees: Vec<i64> = self.terms.keys().copied().collect();
        for n in degrees {
            if self.terms.contains_key(&(n - 1)) && !self.diffs.contains_key(&n) {
                let d = GradedMatrix::zero(&self.terms[&n], &self.terms[&(n - 1)]);
                self.diffs.insert(n, d);
            }
        }
    }

    pub fn zero(ring: CoefficientRing) -> Self {
        TateComplex {
            ring,
            terms: BTreeMap::new(),
            diffs: BTreeMap::new(),
        }
    }

    /// The object placed in a single degree.
    pub fn concentrated(obj: TateObject, degree: i64) -> Self {
        let ring = obj.ring();
        TateComplex::new(ring, BTreeMap::from([(degree, obj)]), BTreeMap::new()).unwrap()
    }

    /// 𝟙{twist}[shift].
    pub fn tate(ring: CoefficientRing, twist: i64, shift: i64) -> Self {
        Self::concentrated(TateObject::unit(ring, twist), shift)
    }

    pub fn unit(ring: CoefficientRing) -> Self {
        Self::tate(ring, 0, 0)
    }

    /// [source → target] with source in `degree` and target in `degree − 1`.
    pub fn two_term(degree: i64, map: GradedMatrix) -> Self {
        let ring = map.ring();
        let terms = BTreeMap::from([
            (degree, map.source().clone()),
            (degree - 1, map.target().clone()),
        ]);
        TateComplex::new(ring, terms, BTreeMap::from([(degree, map)])).unwrap()
    }

    pub fn ring(&self) -> CoefficientRing {
        self.ring
    }

    pub fn terms(&self) -> &BTreeMap<i64, TateObject> {
        &self.terms
    }

    pub fn term(&self, n: i64) -> TateObject {
        self.terms
            .get(&n)
            .cloned()
            .unwrap_or_else(|| TateObject::zero(self.ring))
    }

    /// d_n : C_n → C_{n−1}.
    pub fn diff(&self, n: i64) -> GradedMatrix {
        self.diffs
            .get(&n)
            .cloned()
            .unwrap_or_else(|| GradedMatrix::zero(&self.term(n), &self.term(n - 1)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_rank(&self) -> usize {
        self.terms.values().map(|x| x.total_rank()).sum()
    }

    pub fn has_zero_differentials(&self) -> bool {
        self.diffs.values().all(|d| d.is_zero())
    }

    /// (degree, twist) → rank.
    pub fn rank_table(&self) -> BTreeMap<(i64, i64), usize> {
        let mut out = BTreeMap::new();
        for (n, x) in &self.terms {
            for (t, r) in x.ranks() {
                out.insert((*n, *t), *r);
            }
        }
        out
    }

    /// Problems that make this not a complex; empty when valid.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = vec![];
        for (n, x) in &self.terms {
            if x.ring() != self.ring {
                out.push(format!("term in degree {n} has ring {}", x.ring()));
            }
        }
        for (n, d) in &self.diffs {
            if d.source() != &self.term(*n) || d.target() != &self.term(n - 1) {
                out.push(format!("d_{n} has the wrong source or target"));
                continue;
            }
            if self.diffs.contains_key(&(n - 1)) {
                match self.diff(n - 1).compose(d) {
                    Ok(sq) if sq.is_zero() => {}
                    Ok(_) => out.push(format!("d_{} ∘ d_{n} ≠ 0", n - 1)),
                    Err(e) => out.push(e.to_string()),
                }
            }
        }
        out
    }

    pub fn validate(&self) -> bool {
        self.diagnostics().is_empty()
    }

    /// C[m]{t}: degree n moves to n + m, twists move by t, differentials pick up (−1)^m.
    pub fn shift_twist(&self, m: i64, t: i64) -> TateComplex {
        let sign = if m % 2 == 0 {
            self.ring.one()
        } else {
            -&self.ring.one()
        };
        TateComplex {
            ring: self.ring,
            terms: self.terms.iter().map(|(n, x)| (n + m, x.twist(t))).collect(),
            diffs: self
                .diffs
                .iter()
                .map(|(n, d)| (n + m, d.twist(t).scale(&sign)))
                .collect(),
        }
    }

    pub fn shift(&self, m: i64) -> TateComplex {
        self.shift_twist(m, 0)
    }

    pub fn twist(&self, t: i64) -> TateComplex {
        self.shift_twist(0, t)
    }

    pub fn direct_sum(&self, other: &TateComplex) -> Result<TateComplex, ComplexError> {
        if self.ring != other.ring {
            return Err(TateError::RingMismatch(self.ring, other.ring).into());
        }
        let degrees: Vec<i64> = self.degree_span(other);
        let mut terms = BTreeMap::new();
        let mut diffs = BTreeMap::new();
        for &n in &degrees {
            terms.insert(n, self.term(n).direct_sum(&other.term(n)));
            let srcs = [self.term(n), other.term(n)];
            let tgts = [self.term(n - 1), other.term(n - 1)];
            let d = assemble(
                self.ring,
                &srcs,
                &tgts,
                vec![((0, 0), self.diff(n)), ((1, 1), other.diff(n))],
            )?;
            diffs.insert(n, d);
        }
        TateComplex::new(self.ring, terms, diffs)
    }

    fn degree_span(&self, other: &TateComplex) -> Vec<i64> {
        let mut v: Vec<i64> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .copied()
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// Summands of (C ⊗ D)_n as (i, j) with i + j = n, ordered by i.
    fn tensor_pairs(&self, other: &TateComplex, n: i64) -> Vec<(i64, i64)> {
        self.terms
            .keys()
            .filter(|i| other.terms.contains_key(&(n - **i)))
            .map(|i| (*i, n - i))
            .collect()
    }

    /// Koszul tensor: d(x ⊗ y) = dx ⊗ y + (−1)^i x ⊗ dy.
    pub fn tensor(&self, other: &TateComplex) -> Result<TateComplex, ComplexError> {
        if self.ring != other.ring {
            return Err(TateError::RingMismatch(self.ring, other.ring).into());
        }
        let ring = self.ring;
        let mut degrees = vec![];
        for i in self.terms.keys() {
            for j in other.terms.keys() {
                degrees.push(i + j);
            }
        }
        degrees.sort();
        degrees.dedup();

        let obj = |(i, j): (i64, i64)| self.term(i).tensor(&other.term(j));
        let mut terms = BTreeMap::new();
        let mut diffs = BTreeMap::new();
        for &n in &degrees {
            let src_pairs = self.tensor_pairs(other, n);
            let tgt_pairs = self.tensor_pairs(other, n - 1);
            let srcs: Vec<TateObject> = src_pairs.iter().map(|p| obj(*p)).collect();
            let tgts: Vec<TateObject> = tgt_pairs.iter().map(|p| obj(*p)).collect();
            terms.insert(
                n,
                srcs.iter()
                    .fold(TateObject::zero(ring), |acc, x| acc.direct_sum(x)),
            );
            if tgt_pairs.is_empty() {
                continue;
            }
            let mut parts = vec![];
            for (si, &(i, j)) in src_pairs.iter().enumerate() {
                if let Some(ti) = tgt_pairs.iter().position(|&p| p == (i - 1, j)) {
                    let id = GradedMatrix::identity(&other.term(j));
                    parts.push(((ti, si), self.diff(i).tensor(&id)?));
                }
                if let Some(ti) = tgt_pairs.iter().position(|&p| p == (i, j - 1)) {
                    let id = GradedMatrix::identity(&self.term(i));
                    let mut g = id.tensor(&other.diff(j))?;
                    if i.rem_euclid(2) == 1 {
                        g = g.scale(&-&ring.one());
                    }
                    parts.push(((ti, si), g));
                }
            }
            diffs.insert(n, assemble(ring, &srcs, &tgts, parts)?);
        }
        TateComplex::new(ring, terms, diffs)
    }

    /// D(C)_k = dual(C_{−k}), with δ_k the transpose of d_{1−k}. No sign is
    /// introduced, so dualizing twice returns the complex unchanged.
    pub fn dual(&self) -> TateComplex {
        TateComplex {
            ring: self.ring,
            terms: self.terms.iter().map(|(n, x)| (-n, x.dual())).collect(),
            diffs: self
                .diffs
                .iter()
                .map(|(n, d)| (1 - n, d.dual()))
                .collect(),
        }
    }

    /// Cancels unit pivots until none remain. Pivot order: lowest degree of the
    /// differential, then lowest twist, then first unit entry row-major.
    pub fn minimize(&self) -> TateComplex {
        let ring = self.ring;
        let mut ranks: BTreeMap<i64, BTreeMap<i64, usize>> = self
            .terms
            .iter()
            .map(|(n, x)| (*n, x.ranks().clone()))
            .collect();
        let mut blocks: BTreeMap<(i64, i64), Matrix> = BTreeMap::new();
        for (n, d) in &self.diffs {
            for (t, m) in d.blocks() {
                blocks.insert((*n, *t), m.clone());
            }
        }

        while let Some((n, t, r, c)) = find_pivot(&blocks) {
            let m = &blocks[&(n, t)];
            let f_inv = m.get(r, c).inverse().expect("unit pivot");
            let mut reduced = m.without(Some(r), Some(c));
            for i in 0..m.rows() {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let a = m.get(i, c) * &f_inv;
                let ii = if i > r { i - 1 } else { i };
                for j in 0..m.cols() {
                    if j == c || m.get(r, j).is_zero() {
                        continue;
                    }
                    let jj = if j > c { j - 1 } else { j };
                    let v = reduced.get(ii, jj) - &(&a * m.get(r, j));
                    reduced.set(ii, jj, v);
                }
            }
            blocks.insert((n, t), reduced);
            if let Some(up) = blocks.get_mut(&(n + 1, t)) {
                *up = up.without(Some(c), None);
            }
            if let Some(down) = blocks.get_mut(&(n - 1, t)) {
                *down = down.without(None, Some(r));
            }
            *ranks.get_mut(&n).unwrap().get_mut(&t).unwrap() -= 1;
            *ranks.get_mut(&(n - 1)).unwrap().get_mut(&t).unwrap() -= 1;
        }

        let terms: BTreeMap<i64, TateObject> = ranks
            .into_iter()
            .map(|(n, r)| (n, TateObject::from_ranks(ring, r)))
            .filter(|(_, x)| !x.is_zero())
            .collect();
        let mut diffs = BTreeMap::new();
        for (n, src) in &terms {
            let Some(tgt) = terms.get(&(n - 1)) else {
                continue;
            };
            let mine: BTreeMap<i64, Matrix> = blocks
                .range((*n, i64::MIN)..=(*n, i64::MAX))
                .filter(|(_, m)| m.rows() > 0 && m.cols() > 0)
                .map(|((_, t), m)| (*t, m.clone()))
                .collect();
            let d = GradedMatrix::from_blocks(src, tgt, mine).expect("minimize keeps shapes");
            diffs.insert(*n, d);
        }
        TateComplex::new(ring, terms, diffs).expect("minimize keeps shapes")
    }

    /// (degree, twist) → rank of homology, over a field.
    pub fn homology(&self) -> Result<BTreeMap<(i64, i64), usize>, ComplexError> {
        if !self.ring.is_field() {
            return Err(ComplexError::NotAField(self.ring));
        }
        Ok(self.field_homology())
    }

    // Ranks over the fraction field; for ZInvE this is homology ⊗ ℚ.
    fn field_homology(&self) -> BTreeMap<(i64, i64), usize> {
        let mut out = BTreeMap::new();
        for (n, x) in &self.terms {
            for (t, r) in x.ranks() {
                let out_rank = self.diffs.get(n).map_or(0, |d| d.block(*t).rank());
                let in_rank = self.diffs.get(&(n + 1)).map_or(0, |d| d.block(*t).rank());
                let h = r - out_rank - in_rank;
                if h > 0 {
                    out.insert((*n, *t), h);
                }
            }
        }
        out
    }

    /// Homotopy equivalence. Complete over fields; over ℤ[1/e] decided when
    /// both minimal forms have zero differentials or the rational homology differs.
    pub fn equivalent(&self, other: &TateComplex) -> Verdict {
        if self.ring != other.ring {
            return Verdict::False;
        }
        if self.ring.is_field() {
            return (self.field_homology() == other.field_homology()).into();
        }
        if self.field_homology() != other.field_homology() {
            return Verdict::False;
        }
        let (a, b) = (self.minimize(), other.minimize());
        if a.has_zero_differentials() && b.has_zero_differentials() {
            (a.rank_table() == b.rank_table()).into()
        } else {
            Verdict::Indeterminate
        }
    }

    /// ⊗-invertibility: the minimal form must be a single 𝟙{t}[m].
    pub fn is_invertible(&self) -> Verdict {
        let m = self.minimize();
        if m.total_rank() == 1 {
            return Verdict::True;
        }
        if self.ring.is_field() || m.has_zero_differentials() {
            return Verdict::False;
        }
        let rational: usize = self.field_homology().values().sum();
        if rational != 1 {
            return Verdict::False;
        }
        Verdict::Indeterminate
    }

    /// Σ (−1)^n rank(C_n at twist t) q^t.
    pub fn euler(&self) -> Laurent {
        let mut out = Laurent::zero();
        for (n, x) in &self.terms {
            let sign = if n.rem_euclid(2) == 0 { 1 } else { -1 };
            for (t, r) in x.ranks() {
                out.add_term(*t, sign * *r as i64);
            }
        }
        out
    }

    pub fn change_ring(
        &self,
        ring: CoefficientRing,
        f: impl Fn(&RingElement) -> Result<RingElement, CoeffError> + Copy,
    ) -> Result<TateComplex, ComplexError> {
        let terms = self
            .terms
            .iter()
            .map(|(n, x)| (*n, x.with_ring(ring)))
            .collect();
        let diffs = self
            .diffs
            .iter()
            .map(|(n, d)| Ok((*n, d.change_ring(ring, f)?)))
            .collect::<Result<_, CoeffError>>()?;
        TateComplex::new(ring, terms, diffs)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ComplexRepr::from(self)).expect("complex serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<TateComplex, ComplexError> {
        let repr: ComplexRepr =
            serde_json::from_value(value.clone()).map_err(|e| ComplexError::Json(e.to_string()))?;
        repr.into_complex()
    }
}

fn find_pivot(blocks: &BTreeMap<(i64, i64), Matrix>) -> Option<(i64, i64, usize, usize)> {
    for ((n, t), m) in blocks {
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                if m.get(r, c).is_unit() {
                    return Some((*n, *t, r, c));
                }
            }
        }
    }
    None
}

impl fmt::Display for TateComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::notation::complex_string(self))
    }
}

#[derive(Serialize, Deserialize)]
struct ComplexRepr {
    ring: CoefficientRing,
    terms: BTreeMap<i64, BTreeMap<i64, usize>>,
    diff: BTreeMap<i64, BTreeMap<i64, Vec<String>>>,
}

impl From<&TateComplex> for ComplexRepr {
    fn from(c: &TateComplex) -> Self {
        ComplexRepr {
            ring: c.ring,
            terms: c
                .terms
                .iter()
                .map(|(n, x)| (*n, x.ranks().clone()))
                .collect(),
            diff: c
                .diffs
                .iter()
                .filter(|(_, d)| !d.is_zero())
                .map(|(n, d)| (*n, blocks_to_strings(d)))
                .collect(),
        }
    }
}

impl ComplexRepr {
    fn into_complex(self) -> Result<TateComplex, ComplexError> {
        let ring = self.ring;
        let terms: BTreeMap<i64, TateObject> = self
            .terms
            .into_iter()
            .map(|(n, r)| (n, TateObject::from_ranks(ring, r)))
            .collect();
        let obj = |n: i64| {
            terms
                .get(&n)
                .cloned()
                .unwrap_or_else(|| TateObject::zero(ring))
        };
        let mut diffs = BTreeMap::new();
        for (n, blocks) in &self.diff {
            diffs.insert(*n, blocks_from_strings(&obj(*n), &obj(n - 1), blocks)?);
        }
        TateComplex::new(ring, terms, diffs)
    }
}

/// A degreewise family of maps C_n → D_n commuting with the differentials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainMap {
    source: TateComplex,
    target: TateComplex,
    maps: BTreeMap<i64, GradedMatrix>,
}

impl ChainMap {
    pub fn new(
        source: TateComplex,
        target: TateComplex,
        maps: BTreeMap<i64, GradedMatrix>,
    ) -> Result<Self, ComplexError> {
        let mut full = BTreeMap::new();
        for n in source.degree_span(&target) {
            let f = match maps.get(&n) {
                Some(f) => f.clone(),
                None => GradedMatrix::zero(&source.term(n), &target.term(n)),
            };
            if f.source() != &source.term(n) || f.target() != &target.term(n) {
                return Err(ComplexError::NotAChainMap(format!(
                    "component in degree {n} has the wrong shape"
                )));
            }
            full.insert(n, f);
        }
        for n in source.degree_span(&target) {
            let lhs = target.diff(n).compose(&full[&n])?;
            let f_prev = full.get(&(n - 1)).cloned().unwrap_or_else(|| {
                GradedMatrix::zero(&source.term(n - 1), &target.term(n - 1))
            });
            let rhs = f_prev.compose(&source.diff(n))?;
            if lhs != rhs {
                return Err(ComplexError::NotAChainMap(format!(
                    "square at degree {n} does not commute"
                )));
            }
        }
        Ok(ChainMap {
            source,
            target,
            maps: full,
        })
    }

    pub fn identity(c: &TateComplex) -> Self {
        let maps = c
            .terms
            .iter()
            .map(|(n, x)| (*n, GradedMatrix::identity(x)))
            .collect();
        ChainMap {
            source: c.clone(),
            target: c.clone(),
            maps,
        }
    }

    pub fn zero(source: &TateComplex, target: &TateComplex) -> Self {
        ChainMap::new(source.clone(), target.clone(), BTreeMap::new()).unwrap()
    }

    pub fn source(&self) -> &TateComplex {
        &self.source
    }

    pub fn target(&self) -> &TateComplex {
        &self.target
    }

    pub fn component(&self, n: i64) -> GradedMatrix {
        self.maps
            .get(&n)
            .cloned()
            .unwrap_or_else(|| GradedMatrix::zero(&self.source.term(n), &self.target.term(n)))
    }

    pub fn scale(&self, s: &RingElement) -> ChainMap {
        ChainMap {
            source: self.source.clone(),
            target: self.target.clone(),
            maps: self.maps.iter().map(|(n, f)| (*n, f.scale(s))).collect(),
        }
    }

    /// cone(f)_n = C_{n−1} ⊕ D_n with differential [[−d_C, 0], [−f, d_D]].
    pub fn cone(&self) -> TateComplex {
        let (c, d) = (&self.source, &self.target);
        let ring = c.ring;
        let minus = -&ring.one();
        let mut degrees: Vec<i64> = c.terms.keys().map(|n| n + 1).chain(d.terms.keys().copied()).collect();
        degrees.sort();
        degrees.dedup();
        let mut terms = BTreeMap::new();
        let mut diffs = BTreeMap::new();
        for &n in &degrees {
            let srcs = [c.term(n - 1), d.term(n)];
            let tgts = [c.term(n - 2), d.term(n - 1)];
            terms.insert(n, srcs[0].direct_sum(&srcs[1]));
            let parts = vec![
                ((0, 0), c.diff(n - 1).scale(&minus)),
                ((1, 0), self.component(n - 1).scale(&minus)),
                ((1, 1), d.diff(n)),
            ];
            diffs.insert(n, assemble(ring, &srcs, &tgts, parts).expect("cone blocks fit"));
        }
        TateComplex::new(ring, terms, diffs).expect("cone shapes")
    }
}
