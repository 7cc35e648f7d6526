//! The additive category Tate(F): finite sums of twisted units 𝟙{n}.
//!
//! An object is a rank vector indexed by twist. Since Hom(𝟙{n}, 𝟙{m}) = 0
//! for n ≠ m, a morphism is a family of matrices, one per twist.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::coefficients::{CoeffError, CoefficientRing, RingElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TateError {
    #[error("objects do not match: {0}")]
    Mismatch(String),
    #[error("rings differ: {0} vs {1}")]
    RingMismatch(CoefficientRing, CoefficientRing),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// Dense matrix over a coefficient ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    ring: CoefficientRing,
    rows: usize,
    cols: usize,
    data: Vec<RingElement>,
}

impl Matrix {
    pub fn zeros(ring: CoefficientRing, rows: usize, cols: usize) -> Self {
        Matrix {
            ring,
            rows,
            cols,
            data: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: CoefficientRing, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn from_rows(ring: CoefficientRing, rows: Vec<Vec<RingElement>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let data: Vec<RingElement> = rows.into_iter().flatten().collect();
        assert_eq!(data.len(), r * c, "ragged matrix rows");
        Matrix {
            ring,
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_i64(ring: CoefficientRing, rows: &[&[i64]]) -> Self {
        Self::from_rows(
            ring,
            rows.iter()
                .map(|r| r.iter().map(|&x| ring.from_i64(x)).collect())
                .collect(),
        )
    }

    /// Row-major data of the given shape.
    pub fn from_flat(
        ring: CoefficientRing,
        rows: usize,
        cols: usize,
        data: Vec<RingElement>,
    ) -> Result<Self, TateError> {
        if data.len() != rows * cols {
            return Err(TateError::Mismatch(format!(
                "expected {} entries for a {rows}×{cols} block, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(x) = data.iter().find(|x| x.ring() != ring) {
            return Err(TateError::RingMismatch(ring, x.ring()));
        }
        Ok(Matrix {
            ring,
            rows,
            cols,
            data,
        })
    }

    pub fn ring(&self) -> CoefficientRing {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &RingElement {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: RingElement) {
        debug_assert_eq!(x.ring(), self.ring);
        self.data[r * self.cols + c] = x;
    }

    pub fn data(&self) -> &[RingElement] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix shapes do not chain");
        let mut out = Matrix::zeros(self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j);
                    let v = cur + &(a * b);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            ring: self.ring,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, s: &RingElement) -> Matrix {
        Matrix {
            ring: self.ring,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn kronecker(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.ring, self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, a * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn map_entries(
        &self,
        ring: CoefficientRing,
        f: impl Fn(&RingElement) -> Result<RingElement, CoeffError>,
    ) -> Result<Matrix, CoeffError> {
        Ok(Matrix {
            ring,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_, _>>()?,
        })
    }

    /// Copy with one row and/or one column deleted.
    pub fn without(&self, row: Option<usize>, col: Option<usize>) -> Matrix {
        let rows: Vec<usize> = (0..self.rows).filter(|&i| Some(i) != row).collect();
        let cols: Vec<usize> = (0..self.cols).filter(|&j| Some(j) != col).collect();
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in &rows {
            for &j in &cols {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix {
            ring: self.ring,
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }

    /// Rank over a field (ZInvE matrices are ranked over ℚ).
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<RingElement>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.field_entry(i, j)).collect())
            .collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&r| !m[r][c].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            let inv = m[rank][c].inverse().expect("field pivot");
            for r in 0..self.rows {
                if r != rank && !m[r][c].is_zero() {
                    let factor = &m[r][c] * &inv;
                    for k in c..self.cols {
                        let sub = &factor * &m[rank][k];
                        m[r][k] = &m[r][k] - &sub;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn field_entry(&self, i: usize, j: usize) -> RingElement {
        let x = self.get(i, j);
        match self.ring {
            CoefficientRing::ZInvE(_) => CoefficientRing::Rationals
                .from_rational(&x.to_rational())
                .unwrap(),
            _ => x.clone(),
        }
    }

    /// Determinant of a square matrix, computed in the fraction field.
    pub fn determinant(&self) -> RingElement {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut m: Vec<Vec<RingElement>> = (0..n)
            .map(|i| (0..n).map(|j| self.field_entry(i, j)).collect())
            .collect();
        let field_ring = m
            .first()
            .and_then(|r| r.first())
            .map(|x| x.ring())
            .unwrap_or(self.ring);
        let mut det = field_ring.one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
                return self.ring.zero();
            };
            if p != c {
                m.swap(p, c);
                det = -&det;
            }
            det = &det * &m[c][c];
            let inv = m[c][c].inverse().unwrap();
            for r in c + 1..n {
                if m[r][c].is_zero() {
                    continue;
                }
                let factor = &m[r][c] * &inv;
                for k in c..n {
                    let sub = &factor * &m[c][k];
                    m[r][k] = &m[r][k] - &sub;
                }
            }
        }
        match self.ring {
            CoefficientRing::ZInvE(_) => self
                .ring
                .from_rational(&det.to_rational())
                .expect("determinant of a ZInvE matrix lies in ZInvE"),
            _ => det,
        }
    }
}

/// A finite sum ⊕ 𝟙{t}^{r_t}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TateObject {
    ring: CoefficientRing,
    ranks: BTreeMap<i64, usize>,
}

impl TateObject {
    pub fn zero(ring: CoefficientRing) -> Self {
        TateObject {
            ring,
            ranks: BTreeMap::new(),
        }
    }

    /// 𝟙{t}.
    pub fn unit(ring: CoefficientRing, twist: i64) -> Self {
        Self::from_ranks(ring, [(twist, 1)])
    }

    pub fn from_ranks(ring: CoefficientRing, ranks: impl IntoIterator<Item = (i64, usize)>) -> Self {
        let mut out = BTreeMap::new();
        for (t, r) in ranks {
            *out.entry(t).or_insert(0) += r;
        }
        out.retain(|_, r| *r > 0);
        TateObject { ring, ranks: out }
    }

    pub fn ring(&self) -> CoefficientRing {
        self.ring
    }

    pub fn ranks(&self) -> &BTreeMap<i64, usize> {
        &self.ranks
    }

    pub fn rank(&self, twist: i64) -> usize {
        self.ranks.get(&twist).copied().unwrap_or(0)
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn twist(&self, t: i64) -> TateObject {
        TateObject {
            ring: self.ring,
            ranks: self.ranks.iter().map(|(k, r)| (k + t, *r)).collect(),
        }
    }

    pub fn direct_sum(&self, other: &TateObject) -> TateObject {
        Self::from_ranks(
            self.ring,
            self.ranks
                .iter()
                .chain(other.ranks.iter())
                .map(|(t, r)| (*t, *r)),
        )
    }

    pub fn tensor(&self, other: &TateObject) -> TateObject {
        let mut ranks = BTreeMap::new();
        for (a, ra) in &self.ranks {
            for (b, rb) in &other.ranks {
                *ranks.entry(a + b).or_insert(0) += ra * rb;
            }
        }
        TateObject {
            ring: self.ring,
            ranks,
        }
    }

    pub fn dual(&self) -> TateObject {
        TateObject {
            ring: self.ring,
            ranks: self.ranks.iter().map(|(t, r)| (-t, *r)).collect(),
        }
    }

    pub fn with_ring(&self, ring: CoefficientRing) -> TateObject {
        TateObject {
            ring,
            ranks: self.ranks.clone(),
        }
    }
}

impl fmt::Display for TateObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::notation::object_string(self, false))
    }
}

/// Basis of (x ⊗ y) at each twist: triples (twist in x, index in x, index in y),
/// ordered by x-twist, then x-index, then y-index.
pub(crate) fn tensor_basis(
    x: &TateObject,
    y: &TateObject,
) -> BTreeMap<i64, Vec<(i64, usize, usize)>> {
    let mut out: BTreeMap<i64, Vec<(i64, usize, usize)>> = BTreeMap::new();
    for (&a, &ra) in &x.ranks {
        for (&b, &rb) in &y.ranks {
            let v = out.entry(a + b).or_default();
            for i in 0..ra {
                for j in 0..rb {
                    v.push((a, i, j));
                }
            }
        }
    }
    out
}

/// A morphism of Tate objects: one matrix per twist (target rank × source rank).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedMatrix {
    source: TateObject,
    target: TateObject,
    blocks: BTreeMap<i64, Matrix>,
}

impl GradedMatrix {
    pub fn zero(source: &TateObject, target: &TateObject) -> Self {
        let ring = source.ring;
        let mut blocks = BTreeMap::new();
        for (&t, &r) in &source.ranks {
            let rt = target.rank(t);
            if rt > 0 {
                blocks.insert(t, Matrix::zeros(ring, rt, r));
            }
        }
        GradedMatrix {
            source: source.clone(),
            target: target.clone(),
            blocks,
        }
    }

    pub fn identity(obj: &TateObject) -> Self {
        GradedMatrix {
            source: obj.clone(),
            target: obj.clone(),
            blocks: obj
                .ranks
                .iter()
                .map(|(&t, &r)| (t, Matrix::identity(obj.ring, r)))
                .collect(),
        }
    }

    /// Builds a morphism from the nonzero blocks; missing twists are zero.
    pub fn from_blocks(
        source: &TateObject,
        target: &TateObject,
        blocks: BTreeMap<i64, Matrix>,
    ) -> Result<Self, TateError> {
        if source.ring != target.ring {
            return Err(TateError::RingMismatch(source.ring, target.ring));
        }
        let mut out = GradedMatrix::zero(source, target);
        for (t, m) in blocks {
            let (r, c) = (target.rank(t), source.rank(t));
            if m.rows() != r || m.cols() != c {
                return Err(TateError::Mismatch(format!(
                    "block at twist {t} is {}×{}, expected {r}×{c}",
                    m.rows(),
                    m.cols()
                )));
            }
            if m.ring() != source.ring {
                return Err(TateError::RingMismatch(source.ring, m.ring()));
            }
            if r > 0 && c > 0 {
                out.blocks.insert(t, m);
            }
        }
        Ok(out)
    }

    pub fn source(&self) -> &TateObject {
        &self.source
    }

    pub fn target(&self) -> &TateObject {
        &self.target
    }

    pub fn ring(&self) -> CoefficientRing {
        self.source.ring
    }

    pub fn blocks(&self) -> &BTreeMap<i64, Matrix> {
        &self.blocks
    }

    /// Block at a twist, zero-filled when absent.
    pub fn block(&self, t: i64) -> Matrix {
        self.blocks.get(&t).cloned().unwrap_or_else(|| {
            Matrix::zeros(self.ring(), self.target.rank(t), self.source.rank(t))
        })
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(|m| m.is_zero())
    }

    /// g ∘ f.
    pub fn compose(&self, f: &GradedMatrix) -> Result<GradedMatrix, TateError> {
        if f.target != self.source {
            return Err(TateError::Mismatch(format!(
                "cannot compose: {} vs {}",
                f.target, self.source
            )));
        }
        let mut out = GradedMatrix::zero(&f.source, &self.target);
        for (t, m) in out.blocks.iter_mut() {
            let inner = self.source.rank(*t);
            if inner > 0 {
                *m = self.block(*t).mul(&f.block(*t));
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &GradedMatrix) -> Result<GradedMatrix, TateError> {
        if self.source != other.source || self.target != other.target {
            return Err(TateError::Mismatch("cannot add morphisms between different objects".into()));
        }
        let mut out = self.clone();
        for (t, m) in out.blocks.iter_mut() {
            *m = m.add(&other.block(*t));
        }
        Ok(out)
    }

    pub fn scale(&self, s: &RingElement) -> GradedMatrix {
        let mut out = self.clone();
        for m in out.blocks.values_mut() {
            *m = m.scale(s);
        }
        out
    }

    pub fn twist(&self, t: i64) -> GradedMatrix {
        GradedMatrix {
            source: self.source.twist(t),
            target: self.target.twist(t),
            blocks: self.blocks.iter().map(|(k, m)| (k + t, m.clone())).collect(),
        }
    }

    /// Blockwise Kronecker product, in the basis order of [`tensor_basis`].
    pub fn tensor(&self, g: &GradedMatrix) -> Result<GradedMatrix, TateError> {
        if self.ring() != g.ring() {
            return Err(TateError::RingMismatch(self.ring(), g.ring()));
        }
        let src = self.source.tensor(&g.source);
        let tgt = self.target.tensor(&g.target);
        let sb = tensor_basis(&self.source, &g.source);
        let tb = tensor_basis(&self.target, &g.target);
        let mut out = GradedMatrix::zero(&src, &tgt);
        for (t, m) in out.blocks.iter_mut() {
            let (Some(sbasis), Some(tbasis)) = (sb.get(t), tb.get(t)) else {
                continue;
            };
            for (col, &(a, i, j)) in sbasis.iter().enumerate() {
                let fa = self.blocks.get(&a);
                let gb = g.blocks.get(&(t - a));
                let (Some(fa), Some(gb)) = (fa, gb) else {
                    continue;
                };
                for (row, &(a2, r, s)) in tbasis.iter().enumerate() {
                    if a2 != a {
                        continue;
                    }
                    let v = fa.get(r, i) * gb.get(s, j);
                    if !v.is_zero() {
                        m.set(row, col, v);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Transpose with twists negated: D(f): D(target) → D(source).
    pub fn dual(&self) -> GradedMatrix {
        GradedMatrix {
            source: self.target.dual(),
            target: self.source.dual(),
            blocks: self
                .blocks
                .iter()
                .map(|(t, m)| (-t, m.transpose()))
                .collect(),
        }
    }

    /// Every block square with unit determinant.
    pub fn is_isomorphism(&self) -> bool {
        if self.source.ranks != self.target.ranks {
            return false;
        }
        self.source
            .ranks
            .keys()
            .all(|&t| self.block(t).determinant().is_unit())
    }

    pub fn change_ring(
        &self,
        ring: CoefficientRing,
        f: impl Fn(&RingElement) -> Result<RingElement, CoeffError> + Copy,
    ) -> Result<GradedMatrix, CoeffError> {
        Ok(GradedMatrix {
            source: self.source.with_ring(ring),
            target: self.target.with_ring(ring),
            blocks: self
                .blocks
                .iter()
                .map(|(t, m)| Ok((*t, m.map_entries(ring, f)?)))
                .collect::<Result<_, CoeffError>>()?,
        })
    }
}

/// Morphism ⊕ sources → ⊕ targets from its nonzero components, keyed by
/// (target index, source index). Summands are stacked in list order at each twist.
pub fn assemble(
    ring: CoefficientRing,
    sources: &[TateObject],
    targets: &[TateObject],
    parts: Vec<((usize, usize), GradedMatrix)>,
) -> Result<GradedMatrix, TateError> {
    let sum = |xs: &[TateObject]| {
        xs.iter()
            .fold(TateObject::zero(ring), |acc, x| acc.direct_sum(x))
    };
    let (src, tgt) = (sum(sources), sum(targets));
    let offset = |xs: &[TateObject], idx: usize, t: i64| -> usize {
        xs[..idx].iter().map(|x| x.rank(t)).sum()
    };
    let mut out = GradedMatrix::zero(&src, &tgt);
    for ((ti, si), g) in parts {
        if g.source() != &sources[si] || g.target() != &targets[ti] {
            return Err(TateError::Mismatch(format!(
                "component ({ti},{si}) is {} → {}, expected {} → {}",
                g.source(),
                g.target(),
                sources[si],
                targets[ti]
            )));
        }
        for (t, m) in g.blocks() {
            let (r0, c0) = (offset(targets, ti, *t), offset(sources, si, *t));
            let big = out.blocks.get_mut(t).expect("shared twist has a block");
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    let x = m.get(i, j);
                    if !x.is_zero() {
                        let v = big.get(r0 + i, c0 + j) + x;
                        big.set(r0 + i, c0 + j, v);
                    }
                }
            }
        }
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct ObjectRepr {
    ring: CoefficientRing,
    ranks: BTreeMap<i64, usize>,
}

impl Serialize for TateObject {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ObjectRepr {
            ring: self.ring,
            ranks: self.ranks.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TateObject {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = ObjectRepr::deserialize(d)?;
        Ok(TateObject::from_ranks(r.ring, r.ranks))
    }
}

/// Per-twist row-major element arrays, as strings.
pub(crate) fn blocks_to_strings(g: &GradedMatrix) -> BTreeMap<i64, Vec<String>> {
    g.blocks
        .iter()
        .map(|(t, m)| (*t, m.data.iter().map(|x| x.to_string()).collect()))
        .collect()
}

pub(crate) fn blocks_from_strings(
    source: &TateObject,
    target: &TateObject,
    blocks: &BTreeMap<i64, Vec<String>>,
) -> Result<GradedMatrix, TateError> {
    let ring = source.ring;
    let mut out = BTreeMap::new();
    for (t, data) in blocks {
        let elems = data
            .iter()
            .map(|s| ring.parse_element(s))
            .collect::<Result<Vec<_>, _>>()?;
        out.insert(
            *t,
            Matrix::from_flat(ring, target.rank(*t), source.rank(*t), elems)?,
        );
    }
    GradedMatrix::from_blocks(source, target, out)
}

#[derive(Serialize, Deserialize)]
struct MorphismRepr {
    ring: CoefficientRing,
    source: BTreeMap<i64, usize>,
    target: BTreeMap<i64, usize>,
    blocks: BTreeMap<i64, Vec<String>>,
}

impl Serialize for GradedMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MorphismRepr {
            ring: self.ring(),
            source: self.source.ranks.clone(),
            target: self.target.ranks.clone(),
            blocks: blocks_to_strings(self),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GradedMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = MorphismRepr::deserialize(d)?;
        let source = TateObject::from_ranks(r.ring, r.source);
        let target = TateObject::from_ranks(r.ring, r.target);
        blocks_from_strings(&source, &target, &r.blocks).map_err(serde::de::Error::custom)
    }
}

/// dim_F Hom(a, b) = Σ_t rank_a(t)·rank_b(t).
pub fn hom_dimension(a: &TateObject, b: &TateObject) -> usize {
    a.ranks.iter().map(|(t, r)| r * b.rank(*t)).sum()
}

/// Elementary morphisms spanning Hom(a, b).
pub fn hom_basis(a: &TateObject, b: &TateObject) -> Vec<GradedMatrix> {
    let mut out = vec![];
    for (&t, &r) in &a.ranks {
        for i in 0..b.rank(t) {
            for j in 0..r {
                let mut m = Matrix::zeros(a.ring, b.rank(t), r);
                m.set(i, j, a.ring.one());
                out.push(GradedMatrix::from_blocks(a, b, BTreeMap::from([(t, m)])).unwrap());
            }
        }
    }
    out
}

/// Scalar helper: a rational that must lie in the ring.
pub fn scalar(ring: CoefficientRing, q: &BigRational) -> Result<RingElement, TateError> {
    if q.is_zero() {
        return Ok(ring.zero());
    }
    Ok(ring.from_rational(q)?)
}
