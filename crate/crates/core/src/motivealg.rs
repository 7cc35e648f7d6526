//! Symbolic quadric motives: Tate, Rost and quadric atoms, their splitting over
//! a field context, and morphism entries that evaluate to matrices once split.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coefficients::{fmt_fraction, parse_rational};
use crate::quadform::{
    is_isotropic, split_hyperbolic, symbol_vanishes, FieldContext, PfisterSymbol,
    QuadError, QuadraticForm,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MotiveError {
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("cannot parse {what} {input:?}")]
    Parse { what: &'static str, input: String },
    #[error("entry {entry} is not allowed from {source_atom} to {target}")]
    BadEntry {
        entry: String,
        source_atom: String,
        target: String,
    },
    #[error("differential d_{degree} has shape {got:?}, expected {expected:?}")]
    Shape {
        degree: i64,
        got: (usize, usize),
        expected: (usize, usize),
    },
    #[error("no composition rule for {0} after {1}")]
    NoComposite(String, String),
    #[error("twist-inconsistent rewrite: {0}")]
    TwistMismatch(String),
}

/// Y_φ or the deformed quadric Y_φ^a = {φ = aZ²}, whose motive is that of φ ⊥ ⟨−a⟩.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Flavor {
    Projective,
    Deformed(BigRational),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MotiveAtom {
    Tate {
        twist: i64,
    },
    Rost {
        symbol: PfisterSymbol,
        twist: i64,
    },
    Quadric {
        form: QuadraticForm,
        twist: i64,
        flavor: Flavor,
    },
}

impl MotiveAtom {
    pub fn tate(twist: i64) -> Self {
        MotiveAtom::Tate { twist }
    }

    pub fn rost(symbol: PfisterSymbol, twist: i64) -> Self {
        MotiveAtom::Rost { symbol, twist }
    }

    pub fn quadric(form: QuadraticForm, twist: i64) -> Self {
        MotiveAtom::Quadric {
            form,
            twist,
            flavor: Flavor::Projective,
        }
    }

    pub fn deformed(form: QuadraticForm, a: BigRational, twist: i64) -> Self {
        MotiveAtom::Quadric {
            form,
            twist,
            flavor: Flavor::Deformed(a),
        }
    }

    pub fn twist(&self) -> i64 {
        match self {
            MotiveAtom::Tate { twist }
            | MotiveAtom::Rost { twist, .. }
            | MotiveAtom::Quadric { twist, .. } => *twist,
        }
    }

    pub fn is_tate(&self) -> bool {
        matches!(self, MotiveAtom::Tate { .. })
    }

    pub fn twisted(&self, by: i64) -> MotiveAtom {
        let mut out = self.clone();
        match &mut out {
            MotiveAtom::Tate { twist }
            | MotiveAtom::Rost { twist, .. }
            | MotiveAtom::Quadric { twist, .. } => *twist += by,
        }
        out
    }

    /// Twist of the top Chow class relative to the atom: the source twist of a
    /// fundamental class. None for Tate atoms.
    pub fn top_offset(&self) -> Option<i64> {
        match self {
            MotiveAtom::Tate { .. } => None,
            MotiveAtom::Rost { symbol, .. } => Some(symbol.rost_top()),
            MotiveAtom::Quadric { form, flavor, .. } => Some(match flavor {
                Flavor::Projective => form.dim() as i64 - 2,
                Flavor::Deformed(_) => form.dim() as i64 - 1,
            }),
        }
    }

    /// The projective form whose quadric has this motive.
    fn underlying_form(&self) -> Option<QuadraticForm> {
        match self {
            MotiveAtom::Quadric { form, flavor, .. } => Some(match flavor {
                Flavor::Projective => form.clone(),
                Flavor::Deformed(a) => form.with_entry(&-a).expect("a ≠ 0"),
            }),
            _ => None,
        }
    }
}

fn fmt_entries(xs: &[BigRational]) -> String {
    xs.iter().map(fmt_fraction).collect::<Vec<_>>().join(",")
}

impl fmt::Display for MotiveAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MotiveAtom::Tate { twist } => write!(f, "T{{{twist}}}"),
            MotiveAtom::Rost { symbol, twist } => {
                write!(f, "R({}){{{twist}}}", fmt_entries(symbol.entries()))
            }
            MotiveAtom::Quadric {
                form,
                twist,
                flavor: Flavor::Projective,
            } => write!(f, "Q[{}]{{{twist}}}", fmt_entries(form.entries())),
            MotiveAtom::Quadric {
                form,
                twist,
                flavor: Flavor::Deformed(a),
            } => write!(
                f,
                "Qa[{};a={}]{{{twist}}}",
                fmt_entries(form.entries()),
                fmt_fraction(a)
            ),
        }
    }
}

impl FromStr for MotiveAtom {
    type Err = MotiveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MotiveError::Parse {
            what: "atom",
            input: s.to_string(),
        };
        let s = s.trim();
        let (body, twist) = match s.strip_suffix('}').and_then(|x| x.rsplit_once('{')) {
            Some((body, t)) => (body.trim(), t.trim().parse::<i64>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let list = |inner: &str| -> Result<Vec<BigRational>, MotiveError> {
            if inner.trim().is_empty() {
                return Ok(vec![]);
            }
            inner
                .split(',')
                .map(|x| parse_rational(x.trim()).map_err(|_| bad()))
                .collect()
        };
        if body == "T" {
            return Ok(MotiveAtom::tate(twist));
        }
        if let Some(inner) = body.strip_prefix("R(").and_then(|x| x.strip_suffix(')')) {
            let symbol = PfisterSymbol::new(list(inner)?).map_err(|_| bad())?;
            return Ok(MotiveAtom::rost(symbol, twist));
        }
        if let Some(inner) = body.strip_prefix("Qa[").and_then(|x| x.strip_suffix(']')) {
            let (entries, a) = inner.split_once(';').ok_or_else(bad)?;
            let a = a.trim().strip_prefix("a=").ok_or_else(bad)?;
            let a = parse_rational(a.trim()).map_err(|_| bad())?;
            if a.is_zero() {
                return Err(bad());
            }
            let form = QuadraticForm::new(list(entries)?).map_err(|_| bad())?;
            return Ok(MotiveAtom::deformed(form, a, twist));
        }
        if let Some(inner) = body.strip_prefix("Q[").and_then(|x| x.strip_suffix(']')) {
            let form = QuadraticForm::new(list(inner)?).map_err(|_| bad())?;
            return Ok(MotiveAtom::quadric(form, twist));
        }
        Err(bad())
    }
}

/// A finite direct sum of atoms, in a fixed order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MotiveObject {
    atoms: Vec<MotiveAtom>,
}

impl MotiveObject {
    pub fn new(atoms: Vec<MotiveAtom>) -> Self {
        MotiveObject { atoms }
    }

    pub fn zero() -> Self {
        MotiveObject::default()
    }

    pub fn atoms(&self) -> &[MotiveAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn twisted(&self, by: i64) -> MotiveObject {
        MotiveObject::new(self.atoms.iter().map(|a| a.twisted(by)).collect())
    }

    /// Twist → multiplicity of the Tate atoms.
    pub fn tate_ranks(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for a in &self.atoms {
            if let MotiveAtom::Tate { twist } = a {
                *out.entry(*twist).or_insert(0) += 1;
            }
        }
        out
    }
}

impl fmt::Display for MotiveObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.atoms.iter().map(|a| a.to_string()).collect();
        f.write_str(&parts.join(" ⊕ "))
    }
}

/// Generators of the morphism algebra between atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MorphismEntry {
    Zero,
    /// Between Tate atoms of equal twist.
    Scalar(BigRational),
    /// Between equal non-Tate atoms.
    Id,
    /// Rost or quadric atom → 𝟙 at the atom's twist.
    Struct,
    /// Fundamental class: 𝟙 at the top twist → Rost or quadric atom.
    Fund,
    /// Y_φ → Y_φ^a.
    Incl,
    /// R(ā,b){t} → R(ā){t + 2^{n−1}}: identity on the top class.
    Descend,
    /// A nonzero map touching a Tate-free summand, kept symbolically.
    Opaque,
}

impl MorphismEntry {
    pub fn scalar(n: i64) -> Self {
        if n == 0 {
            MorphismEntry::Zero
        } else {
            MorphismEntry::Scalar(BigRational::from_integer(n.into()))
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, MorphismEntry::Zero)
    }

    /// Checks the twist bookkeeping of this entry between two atoms.
    pub fn admissible(&self, source: &MotiveAtom, target: &MotiveAtom) -> bool {
        use MotiveAtom as A;
        use MorphismEntry as E;
        match (self, source, target) {
            (E::Zero, _, _) => true,
            (E::Scalar(_), A::Tate { twist: s }, A::Tate { twist: t }) => s == t,
            (E::Id, s, t) => !s.is_tate() && s == t,
            (E::Struct, s, A::Tate { twist }) => !s.is_tate() && s.twist() == *twist,
            (E::Fund, A::Tate { twist }, t) => t
                .top_offset()
                .is_some_and(|top| t.twist() + top == *twist),
            (
                E::Incl,
                A::Quadric {
                    form: f1,
                    twist: t1,
                    flavor: Flavor::Projective,
                },
                A::Quadric {
                    form: f2,
                    twist: t2,
                    flavor: Flavor::Deformed(_),
                },
            ) => f1 == f2 && t1 == t2,
            (
                E::Descend,
                A::Rost {
                    symbol: long,
                    twist: t1,
                },
                A::Rost {
                    symbol: short,
                    twist: t2,
                },
            ) => {
                long.len() == short.len() + 1
                    && long.entries()[..short.len()] == *short.entries()
                    && *t2 == t1 + short.rost_top() + 1
            }
            (E::Opaque, s, t) => !s.is_tate() || !t.is_tate(),
            _ => false,
        }
    }

    /// g ∘ self for the pairs the computations need.
    pub fn then(
        &self,
        g: &MorphismEntry,
        source: &MotiveAtom,
        target: &MotiveAtom,
    ) -> Result<MorphismEntry, MotiveError> {
        use MorphismEntry as E;
        Ok(match (self, g) {
            (E::Zero, _) | (_, E::Zero) => E::Zero,
            (f, E::Id) => f.clone(),
            (E::Id, g) => g.clone(),
            (E::Scalar(a), E::Scalar(b)) => E::Scalar(a * b),
            (E::Scalar(a), g) if a.is_one() => g.clone(),
            (f, E::Scalar(b)) if b.is_one() => f.clone(),
            (E::Fund, E::Struct) => {
                if source.twist() != target.twist() {
                    E::Zero
                } else {
                    // a zero-dimensional quadric or a length-one symbol: two points
                    E::scalar(2)
                }
            }
            (E::Fund, E::Descend) => {
                if !E::Fund.admissible(source, target) {
                    return Err(MotiveError::TwistMismatch(format!("{source} → {target}")));
                }
                E::Fund
            }
            _ => return Err(MotiveError::NoComposite(g.to_string(), self.to_string())),
        })
    }
}

impl fmt::Display for MorphismEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphismEntry::Zero => f.write_str("0"),
            MorphismEntry::Scalar(q) => f.write_str(&fmt_fraction(q)),
            MorphismEntry::Id => f.write_str("Id"),
            MorphismEntry::Struct => f.write_str("Struct"),
            MorphismEntry::Fund => f.write_str("Fund"),
            MorphismEntry::Incl => f.write_str("Incl"),
            MorphismEntry::Descend => f.write_str("Descend"),
            MorphismEntry::Opaque => f.write_str("Opaque"),
        }
    }
}

impl FromStr for MorphismEntry {
    type Err = MotiveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim() {
            "Id" => MorphismEntry::Id,
            "Struct" => MorphismEntry::Struct,
            "Fund" => MorphismEntry::Fund,
            "Incl" => MorphismEntry::Incl,
            "Descend" => MorphismEntry::Descend,
            "Opaque" => MorphismEntry::Opaque,
            other => {
                let q = parse_rational(other).map_err(|_| MotiveError::Parse {
                    what: "entry",
                    input: s.to_string(),
                })?;
                if q.is_zero() {
                    MorphismEntry::Zero
                } else {
                    MorphismEntry::Scalar(q)
                }
            }
        })
    }
}

/// Rows index target atoms, columns source atoms.
pub type EntryMatrix = Vec<Vec<MorphismEntry>>;

/// A bounded complex of atoms with symbolic differentials d_n: terms(n) → terms(n−1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightComplex {
    terms: BTreeMap<i64, MotiveObject>,
    diffs: BTreeMap<i64, EntryMatrix>,
}

impl WeightComplex {
    pub fn new(
        terms: BTreeMap<i64, MotiveObject>,
        diffs: BTreeMap<i64, EntryMatrix>,
    ) -> Result<Self, MotiveError> {
        let mut terms = terms;
        terms.retain(|_, x| !x.is_empty());
        let out = WeightComplex {
            terms,
            diffs: BTreeMap::new(),
        };
        let mut kept = BTreeMap::new();
        for (n, m) in diffs {
            let (src, tgt) = (out.term(n), out.term(n - 1));
            let got = (m.len(), m.first().map_or(0, |r| r.len()));
            let expected = (tgt.len(), src.len());
            let ragged = m.iter().any(|r| r.len() != got.1);
            let empty_ok = src.is_empty() || tgt.is_empty();
            if (got != expected || ragged) && !(empty_ok && m.iter().flatten().all(|e| e.is_zero())) {
                return Err(MotiveError::Shape {
                    degree: n,
                    got,
                    expected,
                });
            }
            if empty_ok {
                continue;
            }
            for (i, row) in m.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    if !e.admissible(&src.atoms[j], &tgt.atoms[i]) {
                        return Err(MotiveError::BadEntry {
                            entry: e.to_string(),
                            source_atom: src.atoms[j].to_string(),
                            target: tgt.atoms[i].to_string(),
                        });
                    }
                }
            }
            kept.insert(n, m);
        }
        Ok(WeightComplex { diffs: kept, ..out })
    }

    /// One object in one degree.
    pub fn concentrated(obj: MotiveObject, degree: i64) -> Self {
        WeightComplex::new(BTreeMap::from([(degree, obj)]), BTreeMap::new()).unwrap()
    }

    pub fn terms(&self) -> &BTreeMap<i64, MotiveObject> {
        &self.terms
    }

    pub fn term(&self, n: i64) -> MotiveObject {
        self.terms.get(&n).cloned().unwrap_or_default()
    }

    /// d_n, zero-filled when absent.
    pub fn diff(&self, n: i64) -> EntryMatrix {
        self.diffs.get(&n).cloned().unwrap_or_else(|| {
            vec![vec![MorphismEntry::Zero; self.term(n).len()]; self.term(n - 1).len()]
        })
    }

    pub fn twisted(&self, by: i64) -> WeightComplex {
        WeightComplex {
            terms: self
                .terms
                .iter()
                .map(|(n, x)| (*n, x.twisted(by)))
                .collect(),
            diffs: self.diffs.clone(),
        }
    }

    /// Keeps only the atoms satisfying `keep`, with the matching rows and columns.
    pub fn restrict(&self, keep: impl Fn(&MotiveAtom) -> bool) -> WeightComplex {
        let idx: BTreeMap<i64, Vec<usize>> = self
            .terms
            .iter()
            .map(|(n, x)| {
                (
                    *n,
                    (0..x.len()).filter(|&i| keep(&x.atoms[i])).collect(),
                )
            })
            .collect();
        let empty = vec![];
        let terms = self
            .terms
            .iter()
            .map(|(n, x)| {
                (
                    *n,
                    MotiveObject::new(idx[n].iter().map(|&i| x.atoms[i].clone()).collect()),
                )
            })
            .collect();
        let diffs = self
            .diffs
            .iter()
            .map(|(n, m)| {
                let rows = idx.get(&(n - 1)).unwrap_or(&empty);
                let cols = idx.get(n).unwrap_or(&empty);
                let sub: EntryMatrix = rows
                    .iter()
                    .map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect())
                    .collect();
                (*n, sub)
            })
            .collect();
        WeightComplex::new(terms, diffs).expect("restriction keeps entries admissible")
    }

    /// d_{n−1} ∘ d_n through the entry algebra, for complexes whose composites
    /// stay inside the table.
    pub fn square(&self, n: i64) -> Result<EntryMatrix, MotiveError> {
        let (a, b, c) = (self.term(n), self.term(n - 1), self.term(n - 2));
        let (f, g) = (self.diff(n), self.diff(n - 1));
        let mut out = vec![vec![MorphismEntry::Zero; a.len()]; c.len()];
        for i in 0..c.len() {
            for j in 0..a.len() {
                let mut acc: Option<BigRational> = None;
                let mut symbolic = None;
                for k in 0..b.len() {
                    let e = f[k][j].then(&g[i][k], &a.atoms[j], &c.atoms[i])?;
                    match e {
                        MorphismEntry::Zero => {}
                        MorphismEntry::Scalar(q) => *acc.get_or_insert_with(BigRational::zero) += q,
                        other => symbolic = Some(other),
                    }
                }
                out[i][j] = match (acc, symbolic) {
                    (_, Some(s)) => s,
                    (Some(q), None) if !q.is_zero() => MorphismEntry::Scalar(q),
                    _ => MorphismEntry::Zero,
                };
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let repr = WeightRepr {
            terms: self
                .terms
                .iter()
                .map(|(n, x)| (*n, x.atoms.iter().map(|a| a.to_string()).collect()))
                .collect(),
            diff: self
                .diffs
                .iter()
                .filter(|(_, m)| m.iter().flatten().any(|e| !e.is_zero()))
                .map(|(n, m)| {
                    (
                        *n,
                        m.iter()
                            .map(|r| r.iter().map(|e| e.to_string()).collect())
                            .collect(),
                    )
                })
                .collect(),
        };
        serde_json::to_value(repr).expect("weight complex serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<WeightComplex, MotiveError> {
        let bad = |e: String| MotiveError::Parse {
            what: "weight complex",
            input: e,
        };
        let repr: WeightRepr =
            serde_json::from_value(value.clone()).map_err(|e| bad(e.to_string()))?;
        let terms = repr
            .terms
            .into_iter()
            .map(|(n, xs)| {
                Ok((
                    n,
                    MotiveObject::new(
                        xs.iter()
                            .map(|s| s.parse())
                            .collect::<Result<_, MotiveError>>()?,
                    ),
                ))
            })
            .collect::<Result<BTreeMap<_, _>, MotiveError>>()?;
        let diffs = repr
            .diff
            .into_iter()
            .map(|(n, rows)| {
                Ok((
                    n,
                    rows.iter()
                        .map(|r| r.iter().map(|s| s.parse()).collect())
                        .collect::<Result<EntryMatrix, MotiveError>>()?,
                ))
            })
            .collect::<Result<BTreeMap<_, _>, MotiveError>>()?;
        WeightComplex::new(terms, diffs)
    }
}

impl fmt::Display for WeightComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (Some(lo), Some(hi)) = (
            self.terms.keys().next().copied(),
            self.terms.keys().last().copied(),
        ) else {
            return f.write_str("0");
        };
        let (lo, hi) = (lo.min(0), hi.max(0));
        let mut parts = vec![];
        for n in (lo..=hi).rev() {
            let body = self.term(n).to_string();
            parts.push(if n == 0 { format!("{body}\u{307}") } else { body });
        }
        write!(f, "[{}]", parts.join(" → "))
    }
}

#[derive(Serialize, Deserialize)]
struct WeightRepr {
    terms: BTreeMap<i64, Vec<String>>,
    #[serde(default)]
    diff: BTreeMap<i64, Vec<Vec<String>>>,
}

// ---- splitting ---------------------------------------------------------------

/// One summand after splitting: a Tate motive or a Tate-free leftover.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Piece {
    Tate(i64),
    Kept(MotiveAtom),
}

impl Piece {
    fn twisted(&self, by: i64) -> Piece {
        match self {
            Piece::Tate(t) => Piece::Tate(t + by),
            Piece::Kept(a) => Piece::Kept(a.twisted(by)),
        }
    }

    fn atom(&self) -> MotiveAtom {
        match self {
            Piece::Tate(t) => MotiveAtom::tate(*t),
            Piece::Kept(a) => a.clone(),
        }
    }
}

/// How the pieces of a split atom are arranged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    /// No pieces (an empty quadric).
    Empty,
    /// A single Tate atom.
    Unit,
    /// Two points: structure map (1, 1), fundamental class (1, 1)ᵀ.
    Points,
    /// Bottom class first, top class last.
    Chain,
    /// Nothing split.
    Kept,
}

#[derive(Debug, Clone)]
struct Decomp {
    pieces: Vec<Piece>,
    layout: Layout,
}

impl Decomp {
    fn kept(atom: MotiveAtom) -> Self {
        Decomp {
            pieces: vec![Piece::Kept(atom)],
            layout: Layout::Kept,
        }
    }

    fn twisted(mut self, by: i64) -> Self {
        self.pieces = self.pieces.iter().map(|p| p.twisted(by)).collect();
        self
    }

    fn len(&self) -> usize {
        self.pieces.len()
    }

    /// Row vector of the structure map to 𝟙.
    fn structure(&self) -> Vec<Cell> {
        let mut v = vec![Cell::Zero; self.len()];
        match self.layout {
            Layout::Empty => {}
            Layout::Unit | Layout::Chain => v[0] = Cell::one(),
            Layout::Points => v = vec![Cell::one(), Cell::one()],
            Layout::Kept => v[0] = Cell::Opaque,
        }
        v
    }

    /// Column vector of the fundamental class.
    fn fundamental(&self) -> Vec<Cell> {
        let mut v = vec![Cell::Zero; self.len()];
        match self.layout {
            Layout::Empty => {}
            Layout::Unit => v[0] = Cell::one(),
            Layout::Chain => *v.last_mut().unwrap() = Cell::one(),
            Layout::Points => v = vec![Cell::one(), Cell::one()],
            Layout::Kept => v[0] = Cell::Opaque,
        }
        v
    }
}

/// An evaluated matrix entry.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Cell {
    Zero,
    Scalar(BigRational),
    /// Still symbolic: one end is an atom that did not split.
    Entry(MorphismEntry),
    Opaque,
}

impl Cell {
    fn one() -> Cell {
        Cell::Scalar(BigRational::one())
    }
}

type CellMatrix = Vec<Vec<Cell>>;

fn zeros(rows: usize, cols: usize) -> CellMatrix {
    vec![vec![Cell::Zero; cols]; rows]
}

/// Decomposition of the projective quadric Y_φ by repeated hyperbolic splitting.
fn decompose_form(ctx: &FieldContext, form: &QuadraticForm) -> Result<Decomp, QuadError> {
    let n = form.dim();
    if n <= 1 {
        return Ok(Decomp {
            pieces: vec![],
            layout: Layout::Empty,
        });
    }
    let Some(psi) = split_hyperbolic(ctx, form)? else {
        return Ok(Decomp::kept(MotiveAtom::quadric(form.clone(), 0)));
    };
    if n == 2 {
        return Ok(Decomp {
            pieces: vec![Piece::Tate(0), Piece::Tate(0)],
            layout: Layout::Points,
        });
    }
    let inner = decompose_form(ctx, &psi)?.twisted(1);
    Ok(chain(inner, n as i64 - 2))
}

fn chain(inner: Decomp, top: i64) -> Decomp {
    let mut pieces = vec![Piece::Tate(0)];
    pieces.extend(inner.pieces);
    pieces.push(Piece::Tate(top));
    Decomp {
        pieces,
        layout: Layout::Chain,
    }
}

/// Decomposition of Y_φ^a, splitting the same hyperbolic planes as φ while φ
/// stays isotropic, then φ ⊥ ⟨−a⟩ on its own.
fn decompose_deformed(
    ctx: &FieldContext,
    form: &QuadraticForm,
    a: &BigRational,
) -> Result<Decomp, QuadError> {
    if form.dim() >= 2 {
        if let Some(psi) = split_hyperbolic(ctx, form)? {
            let inner = decompose_deformed(ctx, &psi, a)?.twisted(1);
            return Ok(chain(inner, form.dim() as i64 - 1));
        }
    }
    decompose_form(ctx, &form.with_entry(&-a)?)
}

/// Matrix of Y_φ → Y_φ^a between the two decompositions.
fn inclusion(ctx: &FieldContext, form: &QuadraticForm, a: &BigRational) -> Result<CellMatrix, QuadError> {
    let src = decompose_form(ctx, form)?;
    let tgt = decompose_deformed(ctx, form, a)?;
    let mut m = zeros(tgt.len(), src.len());
    match src.layout {
        Layout::Empty => {}
        Layout::Kept | Layout::Unit => {
            for row in m.iter_mut() {
                row[0] = Cell::Opaque;
            }
        }
        Layout::Points => {
            // both points land on the point class of the conic
            m[0][0] = Cell::one();
            m[0][1] = Cell::one();
        }
        Layout::Chain => {
            let psi = split_hyperbolic(ctx, form)?.expect("chain layout means isotropic");
            let inner = inclusion(ctx, &psi, a)?;
            let inner_fund = decompose_deformed(ctx, &psi, a)?.fundamental();
            m[0][0] = Cell::one();
            for (i, row) in inner.iter().enumerate() {
                for (j, c) in row.iter().enumerate() {
                    m[1 + i][1 + j] = c.clone();
                }
            }
            let top = src.len() - 1;
            for (i, c) in inner_fund.into_iter().enumerate() {
                m[1 + i][top] = c;
            }
        }
    }
    Ok(m)
}

fn atom_decomp(ctx: &FieldContext, atom: &MotiveAtom) -> Result<Decomp, QuadError> {
    Ok(match atom {
        MotiveAtom::Tate { twist } => Decomp {
            pieces: vec![Piece::Tate(*twist)],
            layout: Layout::Unit,
        },
        MotiveAtom::Rost { symbol, twist } => {
            if !symbol_vanishes(ctx, symbol)? {
                Decomp::kept(atom.clone())
            } else if symbol.len() == 1 {
                Decomp {
                    pieces: vec![Piece::Tate(*twist), Piece::Tate(*twist)],
                    layout: Layout::Points,
                }
            } else {
                Decomp {
                    pieces: vec![Piece::Tate(*twist), Piece::Tate(twist + symbol.rost_top())],
                    layout: Layout::Chain,
                }
            }
        }
        MotiveAtom::Quadric { form, twist, flavor } => {
            let d = match flavor {
                Flavor::Projective => decompose_form(ctx, form)?,
                Flavor::Deformed(a) => decompose_deformed(ctx, form, a)?,
            };
            if d.layout == Layout::Kept {
                Decomp::kept(atom.clone())
            } else {
                d.twisted(*twist)
            }
        }
    })
}

fn evaluate_entry(
    ctx: &FieldContext,
    entry: &MorphismEntry,
    source: (&MotiveAtom, &Decomp),
    target: (&MotiveAtom, &Decomp),
) -> Result<CellMatrix, MotiveError> {
    let (sa, sd) = source;
    let (ta, td) = target;
    let mut m = zeros(td.len(), sd.len());
    // atom to atom with at least one end unsplit: nothing to evaluate yet
    let unsplit = sd.layout == Layout::Kept || td.layout == Layout::Kept;
    if unsplit && sd.len() == 1 && td.len() == 1 {
        m[0][0] = Cell::Entry(entry.clone());
        return Ok(m);
    }
    match entry {
        MorphismEntry::Zero => {}
        MorphismEntry::Scalar(q) => m[0][0] = Cell::Scalar(q.clone()),
        MorphismEntry::Id => {
            for (i, p) in sd.pieces.iter().enumerate() {
                m[i][i] = match p {
                    Piece::Tate(_) => Cell::one(),
                    Piece::Kept(_) => Cell::Opaque,
                };
            }
        }
        MorphismEntry::Struct => m[0] = sd.structure(),
        MorphismEntry::Fund => {
            for (i, c) in td.fundamental().into_iter().enumerate() {
                m[i][0] = c;
            }
        }
        MorphismEntry::Incl => {
            let MotiveAtom::Quadric {
                form,
                flavor: Flavor::Deformed(a),
                ..
            } = ta
            else {
                unreachable!("admissibility checked")
            };
            if sd.layout == Layout::Kept || td.layout == Layout::Kept {
                for row in m.iter_mut() {
                    for c in row.iter_mut() {
                        *c = Cell::Opaque;
                    }
                }
            } else {
                m = inclusion(ctx, form, a)?;
            }
        }
        MorphismEntry::Descend => match (sd.layout, td.layout) {
            (Layout::Kept, _) => {
                for row in m.iter_mut() {
                    row[0] = Cell::Opaque;
                }
            }
            (_, Layout::Kept) => m[0][sd.len() - 1] = Cell::Entry(MorphismEntry::Fund),
            (_, _) => {
                let top = sd.len() - 1;
                for (i, c) in td.fundamental().into_iter().enumerate() {
                    m[i][top] = c;
                }
            }
        },
        MorphismEntry::Opaque => {
            for row in m.iter_mut() {
                for c in row.iter_mut() {
                    *c = Cell::Opaque;
                }
            }
        }
    }
    // Tate pieces only talk to Tate pieces of the same twist
    for (i, tp) in td.pieces.iter().enumerate() {
        for (j, sp) in sd.pieces.iter().enumerate() {
            if let (Piece::Tate(t), Piece::Tate(s), Cell::Scalar(_)) = (tp, sp, &m[i][j]) {
                if s != t {
                    return Err(MotiveError::TwistMismatch(format!(
                        "{entry} from {sa} to {ta} sends twist {s} to {t}"
                    )));
                }
            }
            if matches!((tp, sp), (Piece::Tate(_), Piece::Tate(_))) && m[i][j] == Cell::Opaque {
                m[i][j] = Cell::Zero;
            }
        }
    }
    Ok(m)
}

/// Splits every atom over the context and rewrites the differentials on the
/// pieces. Tate-free pieces stay as atoms. An entry between two atoms that are
/// still whole stays symbolic, so splitting again over a finer context gives the
/// same result; other entries touching a Tate-free piece become `Opaque`.
pub fn evaluate_entries(ctx: &FieldContext, wc: &WeightComplex) -> Result<WeightComplex, MotiveError> {
    let mut decomps: BTreeMap<i64, Vec<Decomp>> = BTreeMap::new();
    for (n, x) in wc.terms() {
        decomps.insert(
            *n,
            x.atoms()
                .iter()
                .map(|a| atom_decomp(ctx, a))
                .collect::<Result<_, _>>()?,
        );
    }
    let terms: BTreeMap<i64, MotiveObject> = decomps
        .iter()
        .map(|(n, ds)| {
            (
                *n,
                MotiveObject::new(ds.iter().flat_map(|d| d.pieces.iter().map(Piece::atom)).collect()),
            )
        })
        .collect();
    let mut diffs = BTreeMap::new();
    for n in wc.terms().keys() {
        let (Some(sds), Some(tds)) = (decomps.get(n), decomps.get(&(n - 1))) else {
            continue;
        };
        let d = wc.diff(*n);
        let (src, tgt) = (wc.term(*n), wc.term(n - 1));
        let rows: usize = tds.iter().map(|d| d.len()).sum();
        let cols: usize = sds.iter().map(|d| d.len()).sum();
        let mut big = vec![vec![MorphismEntry::Zero; cols]; rows];
        let mut r0 = 0;
        for (i, td) in tds.iter().enumerate() {
            let mut c0 = 0;
            for (j, sd) in sds.iter().enumerate() {
                let block = evaluate_entry(ctx, &d[i][j], (&src.atoms()[j], sd), (&tgt.atoms()[i], td))?;
                for (bi, row) in block.into_iter().enumerate() {
                    for (bj, c) in row.into_iter().enumerate() {
                        big[r0 + bi][c0 + bj] = match c {
                            Cell::Zero => MorphismEntry::Zero,
                            Cell::Scalar(q) if q.is_zero() => MorphismEntry::Zero,
                            Cell::Scalar(q) => MorphismEntry::Scalar(q),
                            Cell::Entry(e) => e,
                            Cell::Opaque => MorphismEntry::Opaque,
                        };
                    }
                }
                c0 += sd.len();
            }
            r0 += td.len();
        }
        diffs.insert(*n, big);
    }
    WeightComplex::new(terms, diffs)
}

/// M(Y_φ) or M(Y_φ^a) split over the context, as a sum of Tate atoms and
/// Tate-free leftovers.
pub fn quadric_motive(
    ctx: &FieldContext,
    form: &QuadraticForm,
    flavor: &Flavor,
) -> Result<MotiveObject, MotiveError> {
    let atom = MotiveAtom::Quadric {
        form: form.clone(),
        twist: 0,
        flavor: flavor.clone(),
    };
    let d = atom_decomp(ctx, &atom)?;
    Ok(MotiveObject::new(d.pieces.iter().map(Piece::atom).collect()))
}

/// R_ā{t} as 𝟙{t} ⊕ 𝟙{t + 2^{n−1} − 1} when the symbol vanishes, else unchanged.
pub fn rost_split(ctx: &FieldContext, atom: &MotiveAtom) -> Result<MotiveObject, MotiveError> {
    let d = atom_decomp(ctx, atom)?;
    Ok(MotiveObject::new(d.pieces.iter().map(Piece::atom).collect()))
}

/// Rost decomposition of the Pfister quadrics: with b, the projective quadric of
/// ⟨⟨ā, b⟩⟩ restricted to its Rost part R(ā,b) ⊕ ⊕_{k=1}^{2^{n−1}−1} R(ā){k};
/// without b, ⊕_{k=0}^{2^{n−1}−1} R(ā){k}.
pub fn pfister_quadric_motive(symbol: &PfisterSymbol, b: Option<&BigRational>) -> Result<MotiveObject, MotiveError> {
    let n = symbol.len() as u32;
    let count = (1i64 << (n - 1)) - 1;
    let mut atoms = vec![];
    match b {
        Some(b) => {
            atoms.push(MotiveAtom::rost(symbol.extend(b)?, 0));
            atoms.extend((1..=count).map(|k| MotiveAtom::rost(symbol.clone(), k)));
        }
        None => atoms.extend((0..=count).map(|k| MotiveAtom::rost(symbol.clone(), k))),
    }
    Ok(MotiveObject::new(atoms))
}

/// No Tate summand over the context.
pub fn is_tate_free(ctx: &FieldContext, atom: &MotiveAtom) -> Result<bool, MotiveError> {
    Ok(match atom {
        MotiveAtom::Tate { .. } => false,
        MotiveAtom::Rost { symbol, .. } => !symbol_vanishes(ctx, symbol)?,
        MotiveAtom::Quadric { .. } => {
            let form = atom.underlying_form().unwrap();
            // an empty quadric has no summands at all
            form.dim() >= 2 && !is_isotropic(ctx, &form)?
        }
    })
}

/// Total rank a fully split atom contributes: the number of Chow classes.
pub fn split_rank(atom: &MotiveAtom) -> usize {
    match atom {
        MotiveAtom::Tate { .. } => 1,
        MotiveAtom::Rost { .. } => 2,
        MotiveAtom::Quadric { .. } => {
            let n = atom.underlying_form().unwrap().dim();
            n - n % 2
        }
    }
}

#[cfg(test)]
fn rational(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(e: &[i64]) -> QuadraticForm {
        QuadraticForm::from_ints(e).unwrap()
    }

    fn sym(e: &[i64]) -> PfisterSymbol {
        PfisterSymbol::from_ints(e).unwrap()
    }

    fn tates(obj: &MotiveObject) -> Vec<i64> {
        obj.atoms().iter().map(|a| a.twist()).collect()
    }

    #[test]
    fn quadric_motive_examples() {
        let q = FieldContext::rationals();
        let conic = quadric_motive(&q, &form(&[1, -1, 1]), &Flavor::Projective).unwrap();
        assert!(conic.atoms().iter().all(|a| a.is_tate()));
        assert_eq!(tates(&conic), vec![0, 1]);
        let h = quadric_motive(&q, &QuadraticForm::hyperbolic(), &Flavor::Projective).unwrap();
        assert_eq!(tates(&h), vec![0, 0]);
        let aniso = quadric_motive(&q, &form(&[1, 1, 1]), &Flavor::Projective).unwrap();
        assert_eq!(aniso.atoms(), &[MotiveAtom::quadric(form(&[1, 1, 1]), 0)]);
        let geo = quadric_motive(&FieldContext::Geometric, &form(&[1, 1, 1]), &Flavor::Projective).unwrap();
        assert_eq!(tates(&geo), vec![0, 1]);
    }

    #[test]
    fn full_split_matches_class_count() {
        // independent count: a split quadric of dimension D has one class in
        // each twist 0..=D, plus a second middle class when D is even
        let g = FieldContext::Geometric;
        for n in 2..=9usize {
            let f = QuadraticForm::from_ints(&vec![1; n]).unwrap();
            let m = quadric_motive(&g, &f, &Flavor::Projective).unwrap();
            let mut got = tates(&m);
            got.sort();
            let d = n as i64 - 2;
            let mut expected: Vec<i64> = (0..=d).collect();
            if d % 2 == 0 {
                expected.push(d / 2);
            }
            expected.sort();
            assert_eq!(got, expected, "n = {n}");
            assert_eq!(got.len(), split_rank(&MotiveAtom::quadric(f, 0)));
        }
    }

    #[test]
    fn rost_split_examples() {
        let q = FieldContext::rationals();
        let r = rost_split(&q, &MotiveAtom::rost(sym(&[7, 1]), 0)).unwrap();
        assert_eq!(tates(&r), vec![0, 1]);
        let a = MotiveAtom::rost(sym(&[-1, -1]), 0);
        assert_eq!(rost_split(&q, &a).unwrap().atoms(), std::slice::from_ref(&a));
        let s = rost_split(&FieldContext::Geometric, &MotiveAtom::rost(sym(&[2, 3, 5]), 2)).unwrap();
        assert_eq!(tates(&s), vec![2, 5]);
    }

    #[test]
    fn pfister_motive_examples() {
        let b = rational(7);
        let m = pfister_quadric_motive(&sym(&[3]), Some(&b)).unwrap();
        assert_eq!(m.atoms(), &[MotiveAtom::rost(sym(&[3, 7]), 0)]);
        let m = pfister_quadric_motive(&sym(&[2, 3]), Some(&b)).unwrap();
        assert_eq!(m.atoms(), &[MotiveAtom::rost(sym(&[2, 3, 7]), 0), MotiveAtom::rost(sym(&[2, 3]), 1)]);
        let m = pfister_quadric_motive(&sym(&[2, 3]), None).unwrap();
        assert_eq!(m.atoms(), &[MotiveAtom::rost(sym(&[2, 3]), 0), MotiveAtom::rost(sym(&[2, 3]), 1)]);
    }

    #[test]
    fn tate_free_examples() {
        let q = FieldContext::rationals();
        assert!(!is_tate_free(&q, &MotiveAtom::tate(0)).unwrap());
        assert!(is_tate_free(&q, &MotiveAtom::quadric(form(&[1, 1, 1]), 0)).unwrap());
        assert!(is_tate_free(&q, &MotiveAtom::rost(sym(&[-1, -1]), 0)).unwrap());
        assert!(!is_tate_free(&q, &MotiveAtom::deformed(form(&[1, 1]), rational(2), 0)).unwrap());
    }

    #[test]
    fn atom_syntax_round_trips() {
        for s in ["T{3}", "R(2,-1){0}", "Q[1,1,-3]{2}", "Qa[1,1,-3;a=1]{0}", "Qa[1/2;a=-2]{-1}"] {
            let a: MotiveAtom = s.parse().unwrap();
            assert_eq!(a.to_string(), s);
        }
        assert_eq!("T".parse::<MotiveAtom>().unwrap(), MotiveAtom::tate(0));
        assert!("R(){0}".parse::<MotiveAtom>().is_err());
        assert!("Qa[1;a=0]".parse::<MotiveAtom>().is_err());
    }

    #[test]
    fn struct_evaluates_on_bottom() {
        let g = FieldContext::Geometric;
        let r = MotiveAtom::rost(sym(&[2, 3]), 0);
        let wc = WeightComplex::new(
            BTreeMap::from([
                (0, MotiveObject::new(vec![r])),
                (-1, MotiveObject::new(vec![MotiveAtom::tate(0)])),
            ]),
            BTreeMap::from([(0, vec![vec![MorphismEntry::Struct]])]),
        )
        .unwrap();
        let e = evaluate_entries(&g, &wc).unwrap();
        assert_eq!(e.diff(0), vec![vec![MorphismEntry::scalar(1), MorphismEntry::Zero]]);
    }

    #[test]
    fn entry_twist_rules() {
        let r = MotiveAtom::rost(sym(&[2, 3]), 0);
        assert!(MorphismEntry::Struct.admissible(&r, &MotiveAtom::tate(0)));
        assert!(!MorphismEntry::Struct.admissible(&r, &MotiveAtom::tate(1)));
        assert!(MorphismEntry::Fund.admissible(&MotiveAtom::tate(1), &r));
        assert!(!MorphismEntry::Scalar(rational(1)).admissible(&MotiveAtom::tate(0), &MotiveAtom::tate(1)));
        let long = MotiveAtom::rost(sym(&[2, 3, 5]), 0);
        assert!(MorphismEntry::Descend.admissible(&long, &r.twisted(2)));
        assert!(!MorphismEntry::Descend.admissible(&long, &r.twisted(4)));
        let mismatch = MorphismEntry::Fund
            .then(&MorphismEntry::Struct, &MotiveAtom::tate(1), &MotiveAtom::tate(0))
            .unwrap();
        assert_eq!(mismatch, MorphismEntry::Zero);
    }

    #[test]
    fn descend_after_fund_is_twisted_fund() {
        // 𝟙{2^n − 1} → R(ā,b) → R(ā){2^{n−1}} after splitting both, n = 2
        let g = FieldContext::Geometric;
        let long = MotiveAtom::rost(sym(&[2, 3, 5]), 0);
        let short = MotiveAtom::rost(sym(&[2, 3]), 2);
        let wc = WeightComplex::new(
            BTreeMap::from([
                (1, MotiveObject::new(vec![MotiveAtom::tate(3)])),
                (0, MotiveObject::new(vec![long])),
                (-1, MotiveObject::new(vec![short])),
            ]),
            BTreeMap::from([
                (1, vec![vec![MorphismEntry::Fund]]),
                (0, vec![vec![MorphismEntry::Descend]]),
            ]),
        )
        .unwrap();
        let e = evaluate_entries(&g, &wc).unwrap();
        // d_1 = (0, 1)ᵀ into 𝟙 ⊕ 𝟙{3}; d_0 sends the top class to the top class
        assert_eq!(e.diff(1), vec![vec![MorphismEntry::Zero], vec![MorphismEntry::scalar(1)]]);
        assert_eq!(
            e.diff(0),
            vec![
                vec![MorphismEntry::Zero, MorphismEntry::Zero],
                vec![MorphismEntry::Zero, MorphismEntry::scalar(1)]
            ]
        );
        let comp = MorphismEntry::Fund
            .then(&MorphismEntry::Descend, &MotiveAtom::tate(3), &MotiveAtom::rost(sym(&[2, 3]), 2))
            .unwrap();
        assert_eq!(comp, MorphismEntry::Fund);
    }
}
