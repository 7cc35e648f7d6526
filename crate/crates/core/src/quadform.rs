//! Diagonal quadratic forms over ℚ and isotropy oracles for the field
//! contexts the engine base-changes to.
//!
//! Everything here works with square classes: a nonzero rational is
//! represented up to squares by a squarefree integer of the same sign.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coefficients::{fmt_fraction, is_prime, parse_rational};

pub const DEFAULT_MAX_CANDIDATES: u64 = 1_000_000;
const FIRST_SEARCH_BOUND: i64 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuadError {
    #[error("quadratic forms must have nonzero entries")]
    ZeroEntry,
    #[error("a Pfister symbol needs at least one entry")]
    EmptySymbol,
    #[error("cannot parse {what} {input:?}")]
    Parse { what: &'static str, input: String },
    #[error("isotropic vector search exceeded {limit} candidates for form {form}")]
    ResourceLimit { limit: u64, form: String },
    #[error("scripted context has no answer for form key {0}")]
    UnknownContext(String),
    #[error("invalid field context: {0}")]
    InvalidContext(String),
    #[error("entry {entry} is not a unit modulo {p}")]
    NotAUnitModP { entry: String, p: u64 },
    #[error("square class of {0} does not fit in 64 bits")]
    TooLarge(String),
}

/// A non-degenerate diagonal form ⟨a₁, …, a_n⟩ with rational entries.
///
/// The empty form only shows up as an anisotropic kernel.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadraticForm {
    entries: Vec<BigRational>,
}

impl QuadraticForm {
    pub fn new(entries: Vec<BigRational>) -> Result<Self, QuadError> {
        if entries.iter().any(|e| e.is_zero()) {
            return Err(QuadError::ZeroEntry);
        }
        Ok(QuadraticForm { entries })
    }

    pub fn from_ints(entries: &[i64]) -> Result<Self, QuadError> {
        Self::new(entries.iter().map(|&e| BigRational::from_integer(e.into())).collect())
    }

    pub fn empty() -> Self {
        QuadraticForm { entries: vec![] }
    }

    /// ⟨1, −1⟩.
    pub fn hyperbolic() -> Self {
        Self::from_ints(&[1, -1]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.entries
    }

    /// Dimension of the projective quadric cut out by the form (−1 when empty).
    pub fn quadric_dim(&self) -> i64 {
        self.dim() as i64 - 2
    }

    pub fn discriminant(&self) -> BigRational {
        self.entries
            .iter()
            .fold(BigRational::one(), |acc, e| acc * e)
    }

    pub fn orthogonal_sum(&self, other: &QuadraticForm) -> QuadraticForm {
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        QuadraticForm { entries }
    }

    /// φ ⊥ ⟨c⟩.
    pub fn with_entry(&self, c: &BigRational) -> Result<QuadraticForm, QuadError> {
        if c.is_zero() {
            return Err(QuadError::ZeroEntry);
        }
        let mut entries = self.entries.clone();
        entries.push(c.clone());
        Ok(QuadraticForm { entries })
    }

    pub fn scale(&self, c: &BigRational) -> QuadraticForm {
        QuadraticForm {
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    pub fn tensor(&self, other: &QuadraticForm) -> QuadraticForm {
        let mut entries = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.entries {
            for b in &other.entries {
                entries.push(a * b);
            }
        }
        QuadraticForm { entries }
    }

    /// Square-class representatives, sorted.
    pub fn normalize(&self) -> QuadraticForm {
        let mut classes: Vec<i64> = self.square_classes();
        classes.sort_unstable();
        QuadraticForm {
            entries: classes
                .into_iter()
                .map(|c| BigRational::from_integer(c.into()))
                .collect(),
        }
    }

    /// Square classes of the entries, in entry order.
    pub fn square_classes(&self) -> Vec<i64> {
        self.entries.iter().map(square_class).collect()
    }

    /// Canonical key: normalized entries joined by commas.
    pub fn key(&self) -> String {
        let mut classes = self.square_classes();
        classes.sort_unstable();
        classes
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// First pair of entries whose square classes are c and −c.
    fn opposite_pair(&self) -> Option<(usize, usize)> {
        let classes = self.square_classes();
        for i in 0..classes.len() {
            for j in i + 1..classes.len() {
                if classes[i] == -classes[j] {
                    return Some((i, j));
                }
            }
        }
        None
    }

    fn without(&self, skip: &[usize]) -> QuadraticForm {
        QuadraticForm {
            entries: self
                .entries
                .iter()
                .enumerate()
                .filter(|(i, _)| !skip.contains(i))
                .map(|(_, e)| e.clone())
                .collect(),
        }
    }

    fn is_subform_of(&self, other: &QuadraticForm) -> bool {
        let mut pool = other.square_classes();
        for c in self.square_classes() {
            match pool.iter().position(|&x| x == c) {
                Some(i) => {
                    pool.swap_remove(i);
                }
                None => return false,
            }
        }
        true
    }
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(fmt_fraction).collect();
        write!(f, "<{}>", parts.join(","))
    }
}

impl FromStr for QuadraticForm {
    type Err = QuadError;

    /// Comma-separated rationals, optionally wrapped in `<…>` or `⟨…⟩`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s
            .trim()
            .trim_start_matches(['<', '⟨', '['])
            .trim_end_matches(['>', '⟩', ']']);
        if t.trim().is_empty() {
            return Ok(QuadraticForm::empty());
        }
        let entries = t
            .split(',')
            .map(|x| {
                parse_rational(x).map_err(|_| QuadError::Parse {
                    what: "form",
                    input: s.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        QuadraticForm::new(entries)
    }
}

/// A symbol ā = (a₁, …, a_n) with nonzero entries, n ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PfisterSymbol {
    entries: Vec<BigRational>,
}

impl PfisterSymbol {
    pub fn new(entries: Vec<BigRational>) -> Result<Self, QuadError> {
        if entries.is_empty() {
            return Err(QuadError::EmptySymbol);
        }
        if entries.iter().any(|e| e.is_zero()) {
            return Err(QuadError::ZeroEntry);
        }
        Ok(PfisterSymbol { entries })
    }

    pub fn from_ints(entries: &[i64]) -> Result<Self, QuadError> {
        Self::new(entries.iter().map(|&e| BigRational::from_integer(e.into())).collect())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.entries
    }

    /// (ā, b).
    pub fn extend(&self, b: &BigRational) -> Result<PfisterSymbol, QuadError> {
        let mut entries = self.entries.clone();
        entries.push(b.clone());
        PfisterSymbol::new(entries)
    }

    /// 2^{n−1} − 1: the twist of the upper Chow class of the Rost motive.
    pub fn rost_top(&self) -> i64 {
        (1i64 << (self.len() - 1)) - 1
    }
}

impl fmt::Display for PfisterSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(fmt_fraction).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for PfisterSymbol {
    type Err = QuadError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let err = || QuadError::Parse {
            what: "symbol",
            input: s.to_string(),
        };
        if t.trim().is_empty() {
            return Err(QuadError::EmptySymbol);
        }
        let entries = t
            .split(',')
            .map(|x| parse_rational(x).map_err(|_| err()))
            .collect::<Result<Vec<_>, _>>()?;
        PfisterSymbol::new(entries)
    }
}

/// ⟨1, −a₁⟩ ⊗ ⋯ ⊗ ⟨1, −a_n⟩.
pub fn pfister(symbol: &PfisterSymbol) -> QuadraticForm {
    let one = BigRational::one();
    symbol
        .entries
        .iter()
        .fold(QuadraticForm { entries: vec![one.clone()] }, |acc, a| {
            acc.tensor(&QuadraticForm {
                entries: vec![one.clone(), -a.clone()],
            })
        })
}

// ---------------------------------------------------------------------------
// square classes and local symbols

fn squarefree_u128(mut n: u128) -> u128 {
    let mut out = 1u128;
    let mut d = 2u128;
    while d * d <= n {
        let mut k = 0;
        while n.is_multiple_of(d) {
            n /= d;
            k += 1;
        }
        if k % 2 == 1 {
            out *= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    out * n
}

/// Squarefree integer with the same sign as `q`, equal to `q` modulo squares.
pub fn square_class(q: &BigRational) -> i64 {
    try_square_class(q).expect("square class out of range")
}

pub fn try_square_class(q: &BigRational) -> Result<i64, QuadError> {
    let prod: BigInt = q.numer() * q.denom();
    let neg = prod.is_negative();
    let abs = prod
        .abs()
        .to_u128()
        .ok_or_else(|| QuadError::TooLarge(fmt_fraction(q)))?;
    let sf = squarefree_u128(abs);
    let sf = i64::try_from(sf).map_err(|_| QuadError::TooLarge(fmt_fraction(q)))?;
    Ok(if neg { -sf } else { sf })
}

fn isqrt_i128(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = (n as f64).sqrt() as i128;
    (r.saturating_sub(2)..=r + 2).find(|&x| x >= 0 && x * x == n)
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u128;
    let m128 = m as u128;
    let mut b128 = b as u128 % m128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b128 % m128;
        }
        b128 = b128 * b128 % m128;
        e >>= 1;
    }
    b = r as u64;
    b
}

/// Legendre symbol (u/p) for odd prime p and u prime to p.
fn legendre(u: i64, p: u64) -> i8 {
    let r = u.rem_euclid(p as i64) as u64;
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

fn valuation(mut n: i64, p: i64) -> (u32, i64) {
    let mut k = 0;
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    (k, n)
}

/// A place of ℚ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Place {
    Real,
    Prime(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

fn hilbert_classes(a: i64, b: i64, v: Place) -> i8 {
    match v {
        Place::Real => {
            if a < 0 && b < 0 {
                -1
            } else {
                1
            }
        }
        Place::Prime(2) => {
            let (alpha, u) = valuation(a, 2);
            let (beta, w) = valuation(b, 2);
            let eps = |x: i64| ((x - 1) / 2).rem_euclid(2);
            let omega = |x: i64| ((x as i128 * x as i128 - 1) / 8).rem_euclid(2) as i64;
            let e = eps(u) * eps(w) + alpha as i64 * omega(w) + beta as i64 * omega(u);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Prime(p) => {
            let (alpha, u) = valuation(a, p as i64);
            let (beta, w) = valuation(b, p as i64);
            let mut s: i8 = 1;
            if (alpha * beta) % 2 == 1 && (p % 4 == 3) {
                s = -s;
            }
            if beta % 2 == 1 {
                s *= legendre(u, p);
            }
            if alpha % 2 == 1 {
                s *= legendre(w, p);
            }
            s
        }
    }
}

/// The Hilbert symbol (a, b)_v: +1 iff z² = ax² + by² has a nonzero solution over ℚ_v.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, v: Place) -> i8 {
    assert!(!a.is_zero() && !b.is_zero(), "Hilbert symbol of zero");
    hilbert_classes(square_class(a), square_class(b), v)
}

fn is_local_square(c: i64, v: Place) -> bool {
    match v {
        Place::Real => c > 0,
        Place::Prime(2) => {
            let (k, u) = valuation(c, 2);
            k % 2 == 0 && u.rem_euclid(8) == 1
        }
        Place::Prime(p) => {
            let (k, u) = valuation(c, p as i64);
            k % 2 == 0 && legendre(u, p) == 1
        }
    }
}

/// Product of square classes, reduced back to a squarefree class.
fn class_product(classes: &[i64]) -> i64 {
    let mut acc: i64 = 1;
    for &c in classes {
        let g = num_integer::gcd(acc, c).abs();
        acc = (acc / g) * (c / g);
    }
    acc
}

/// Local isotropy of the form over ℚ_v.
pub fn is_isotropic_at(form: &QuadraticForm, v: Place) -> bool {
    let a = form.square_classes();
    local_isotropic_classes(&a, v)
}

fn local_isotropic_classes(a: &[i64], v: Place) -> bool {
    let n = a.len();
    if n <= 1 {
        return false;
    }
    if v == Place::Real {
        return a.iter().any(|&x| x > 0) && a.iter().any(|&x| x < 0);
    }
    let d = class_product(a);
    if n == 2 {
        return is_local_square(-d, v);
    }
    if n >= 5 {
        return true;
    }
    let mut eps: i8 = 1;
    for i in 0..n {
        for j in i + 1..n {
            eps *= hilbert_classes(a[i], a[j], v);
        }
    }
    if n == 3 {
        hilbert_classes(-1, -d, v) == eps
    } else {
        !is_local_square(d, v) || eps == hilbert_classes(-1, -1, v)
    }
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Places where a form with these square classes can fail to be isotropic.
pub fn relevant_places(classes: &[i64]) -> Vec<Place> {
    let mut primes = vec![2u64];
    for &c in classes {
        for p in prime_divisors(c.unsigned_abs()) {
            if !primes.contains(&p) {
                primes.push(p);
            }
        }
    }
    primes.sort_unstable();
    let mut out = vec![Place::Real];
    out.extend(primes.into_iter().map(Place::Prime));
    out
}

fn rational_isotropic_classes(a: &[i64]) -> bool {
    match a.len() {
        0 | 1 => false,
        2 => a[0] == -a[1],
        _ => relevant_places(a)
            .into_iter()
            .all(|v| local_isotropic_classes(a, v)),
    }
}

// ---------------------------------------------------------------------------
// isotropic vector search over ℚ

struct Search<'a> {
    coeffs: &'a [i64],
    limit: u64,
    used: u64,
}

impl Search<'_> {
    /// Enumerates the first m−1 coordinates shell by shell and solves for the last.
    fn find(&mut self) -> Result<Option<Vec<i64>>, ()> {
        let m = self.coeffs.len();
        let free = m - 1;
        let mut bound = FIRST_SEARCH_BOUND;
        let mut r = 1i64;
        loop {
            while r <= bound {
                let mut x = vec![0i64; free];
                if let Some(v) = self.shell(&mut x, 0, r, false)? {
                    return Ok(Some(v));
                }
                r += 1;
            }
            bound *= 2;
        }
    }

    fn shell(
        &mut self,
        x: &mut Vec<i64>,
        i: usize,
        r: i64,
        hit: bool,
    ) -> Result<Option<Vec<i64>>, ()> {
        if i == x.len() {
            if !hit {
                return Ok(None);
            }
            self.used += 1;
            if self.used > self.limit {
                return Err(());
            }
            return Ok(self.solve_last(x));
        }
        // once a coordinate reached ±r the rest range freely; before that,
        // the last free coordinate must hit ±r
        let remaining_must_hit = !hit && i + 1 == x.len();
        for c in -r..=r {
            if remaining_must_hit && c.abs() != r {
                continue;
            }
            x[i] = c;
            if let Some(v) = self.shell(x, i + 1, r, hit || c.abs() == r)? {
                return Ok(Some(v));
            }
        }
        x[i] = 0;
        Ok(None)
    }

    fn solve_last(&self, x: &[i64]) -> Option<Vec<i64>> {
        let last = *self.coeffs.last().unwrap() as i128;
        let s: i128 = x
            .iter()
            .zip(self.coeffs)
            .map(|(&xi, &c)| c as i128 * xi as i128 * xi as i128)
            .sum();
        if s % last != 0 {
            return None;
        }
        let y = isqrt_i128(-s / last)?;
        let mut v = x.to_vec();
        v.push(y as i64);
        Some(v)
    }
}

/// Smallest-support isotropic vector of a diagonal integer form known to be
/// isotropic over ℚ. Subforms are tried first, smallest dimension first.
fn isotropic_vector_q(classes: &[i64], limit: u64) -> Result<Vec<i64>, QuadError> {
    let n = classes.len();
    for i in 0..n {
        for j in i + 1..n {
            if classes[i] == -classes[j] {
                let mut v = vec![0; n];
                v[i] = 1;
                v[j] = 1;
                return Ok(v);
            }
        }
    }
    for k in 3..=n {
        for subset in combinations(n, k) {
            let sub: Vec<i64> = subset.iter().map(|&i| classes[i]).collect();
            if !rational_isotropic_classes(&sub) {
                continue;
            }
            let mut search = Search {
                coeffs: &sub,
                limit,
                used: 0,
            };
            let found = search.find();
            match found {
                Ok(Some(w)) => {
                    let mut v = vec![0; n];
                    for (&i, &c) in subset.iter().zip(&w) {
                        v[i] = c;
                    }
                    return Ok(v);
                }
                Ok(None) => unreachable!("search only stops on success or limit"),
                Err(()) => {
                    return Err(QuadError::ResourceLimit {
                        limit,
                        form: format!("{classes:?}"),
                    })
                }
            }
        }
    }
    unreachable!("caller guarantees isotropy")
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    go(0, n, k, &mut vec![], &mut out);
    out
}

/// Diagonalizes a symmetric rational matrix by congruence; returns the diagonal.
fn diagonalize(mut g: Vec<Vec<BigRational>>) -> Vec<BigRational> {
    let mut out = vec![];
    while !g.is_empty() {
        let n = g.len();
        let pivot = (0..n).find(|&i| !g[i][i].is_zero());
        let p = match pivot {
            Some(p) => p,
            None => {
                // all diagonal entries vanish: replace e_i by e_i + e_j
                let (i, j) = (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !g[i][j].is_zero())
                    .expect("degenerate restriction");
                for k in 0..n {
                    let add = g[j][k].clone();
                    g[i][k] = &g[i][k] + &add;
                }
                for k in 0..n {
                    let add = g[k][j].clone();
                    g[k][i] = &g[k][i] + &add;
                }
                i
            }
        };
        let piv = g[p][p].clone();
        let mut rest = vec![];
        for i in (0..n).filter(|&i| i != p) {
            let row: Vec<BigRational> = (0..n)
                .filter(|&j| j != p)
                .map(|j| &g[i][j] - &(&g[i][p] * &g[p][j] / &piv))
                .collect();
            rest.push(row);
        }
        out.push(piv);
        g = rest;
    }
    out
}

/// ψ with ⟨s⟩ ≅ ψ ⊥ ℍ, given an isotropic vector v of the diagonal form ⟨s⟩.
fn hyperbolic_complement(s: &[i64], v: &[i64]) -> QuadraticForm {
    let n = s.len();
    let j = (0..n).find(|&i| v[i] != 0).unwrap();
    let k = (0..n).find(|&i| i != j && v[i] != 0).unwrap();
    let q = |x: i64| BigRational::from_integer(x.into());
    let skv = q(s[k]) * q(v[k]);
    // basis of the complement: e_i − (s_i v_i)/(s_k v_k) e_k, for i ∉ {j, k}
    let idx: Vec<usize> = (0..n).filter(|&i| i != j && i != k).collect();
    let c: Vec<BigRational> = idx.iter().map(|&i| -(q(s[i]) * q(v[i])) / &skv).collect();
    let gram: Vec<Vec<BigRational>> = (0..idx.len())
        .map(|a| {
            (0..idx.len())
                .map(|b| {
                    let diag = if a == b { q(s[idx[a]]) } else { BigRational::zero() };
                    diag + &c[a] * &c[b] * q(s[k])
                })
                .collect()
        })
        .collect();
    QuadraticForm::new(diagonalize(gram))
        .expect("complement of a hyperbolic plane is non-degenerate")
        .normalize()
}

// ---------------------------------------------------------------------------
// field contexts

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnknownPolicy {
    ErrorOnUnknown,
    AnisotropicOnUnknown,
    IsotropicOnUnknown,
}

/// A table of isotropy answers standing in for an abstract extension field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptedContext {
    pub isotropic: BTreeMap<String, bool>,
    /// Optional Witt reductions: key of φ ↦ entries of ψ with φ ≅ ψ ⊥ ℍ.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub reduce: BTreeMap<String, String>,
    pub policy: UnknownPolicy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldContext {
    Rationals { max_candidates: u64 },
    Reals,
    /// 𝔽_p, p odd.
    Finite(u64),
    /// Separably closed base change: every form of dimension ≥ 2 is isotropic.
    Geometric,
    Scripted(ScriptedContext),
}

impl FieldContext {
    pub fn rationals() -> Self {
        FieldContext::Rationals {
            max_candidates: DEFAULT_MAX_CANDIDATES,
        }
    }

    pub fn finite(p: u64) -> Result<Self, QuadError> {
        if p == 2 {
            return Err(QuadError::InvalidContext(
                "characteristic 2 is excluded".into(),
            ));
        }
        if !is_prime(p) {
            return Err(QuadError::InvalidContext(format!("{p} is not prime")));
        }
        Ok(FieldContext::Finite(p))
    }

    pub fn scripted(mut table: ScriptedContext) -> Result<Self, QuadError> {
        table.validate()?;
        Ok(FieldContext::Scripted(table))
    }

    pub fn scripted_from_json(text: &str) -> Result<Self, QuadError> {
        let table: ScriptedContext = serde_json::from_str(text)
            .map_err(|e| QuadError::InvalidContext(format!("scripted context: {e}")))?;
        Self::scripted(table)
    }

    /// Short label used in reports.
    pub fn label(&self) -> String {
        match self {
            FieldContext::Rationals { .. } => "Q".into(),
            FieldContext::Reals => "R".into(),
            FieldContext::Finite(p) => format!("F{p}"),
            FieldContext::Geometric => "geometric".into(),
            FieldContext::Scripted(_) => "scripted".into(),
        }
    }

    fn residues_mod_p(&self, form: &QuadraticForm, p: u64) -> Result<Vec<u64>, QuadError> {
        form.entries
            .iter()
            .map(|e| {
                let pb = BigInt::from(p);
                let num = e.numer().mod_floor(&pb).to_u64().unwrap();
                let den = e.denom().mod_floor(&pb).to_u64().unwrap();
                if num == 0 || den == 0 {
                    return Err(QuadError::NotAUnitModP {
                        entry: fmt_fraction(e),
                        p,
                    });
                }
                Ok(num * pow_mod(den, p - 2, p) % p)
            })
            .collect()
    }
}

impl ScriptedContext {
    fn canonical(&mut self) -> Result<(), QuadError> {
        let mut iso = BTreeMap::new();
        for (k, v) in &self.isotropic {
            let f: QuadraticForm = k.parse()?;
            iso.insert(f.key(), *v);
        }
        self.isotropic = iso;
        let mut red = BTreeMap::new();
        for (k, v) in &self.reduce {
            let f: QuadraticForm = k.parse()?;
            red.insert(f.key(), v.clone());
        }
        self.reduce = red;
        Ok(())
    }

    fn validate(&mut self) -> Result<(), QuadError> {
        self.canonical()?;
        let forms: Vec<(QuadraticForm, bool)> = self
            .isotropic
            .iter()
            .map(|(k, v)| (k.parse::<QuadraticForm>().unwrap(), *v))
            .collect();
        for (f, iso) in &forms {
            if f.dim() <= 1 && *iso {
                return Err(QuadError::InvalidContext(format!(
                    "form {} of dimension ≤ 1 marked isotropic",
                    f.key()
                )));
            }
            if f.opposite_pair().is_some() && !*iso {
                return Err(QuadError::InvalidContext(format!(
                    "form {} contains c and −c but is marked anisotropic",
                    f.key()
                )));
            }
        }
        for (small, small_iso) in &forms {
            for (big, big_iso) in &forms {
                if *small_iso && !*big_iso && small.is_subform_of(big) {
                    return Err(QuadError::InvalidContext(format!(
                        "isotropic form {} is a subform of anisotropic form {}",
                        small.key(),
                        big.key()
                    )));
                }
            }
        }
        for (k, v) in &self.reduce {
            let phi: QuadraticForm = k.parse()?;
            let psi: QuadraticForm = v.parse()?;
            if psi.dim() + 2 != phi.dim() {
                return Err(QuadError::InvalidContext(format!(
                    "reduction {k} ↦ {v} must drop exactly one hyperbolic plane"
                )));
            }
            if square_class(&phi.discriminant()) != -square_class(&psi.discriminant()) {
                return Err(QuadError::InvalidContext(format!(
                    "reduction {k} ↦ {v} changes the discriminant class"
                )));
            }
            if self.isotropic.get(k) == Some(&false) {
                return Err(QuadError::InvalidContext(format!(
                    "reduction given for anisotropic form {k}"
                )));
            }
        }
        Ok(())
    }

    fn lookup(&self, form: &QuadraticForm) -> Result<bool, QuadError> {
        if form.dim() <= 1 {
            return Ok(false);
        }
        let key = form.key();
        if let Some(&v) = self.isotropic.get(&key) {
            return Ok(v);
        }
        if form.opposite_pair().is_some() {
            return Ok(true);
        }
        for (k, &v) in &self.isotropic {
            let other: QuadraticForm = k.parse()?;
            if v && other.is_subform_of(form) {
                return Ok(true);
            }
            if !v && form.is_subform_of(&other) {
                return Ok(false);
            }
        }
        match self.policy {
            UnknownPolicy::ErrorOnUnknown => Err(QuadError::UnknownContext(key)),
            UnknownPolicy::AnisotropicOnUnknown => Ok(false),
            UnknownPolicy::IsotropicOnUnknown => Ok(true),
        }
    }

    fn reduce(&self, form: &QuadraticForm) -> Result<QuadraticForm, QuadError> {
        if let Some((i, j)) = form.opposite_pair() {
            return Ok(form.without(&[i, j]));
        }
        if let Some(psi) = self.reduce.get(&form.key()) {
            return psi.parse();
        }
        match self.policy {
            UnknownPolicy::ErrorOnUnknown => Err(QuadError::UnknownContext(format!(
                "Witt reduction of {}",
                form.key()
            ))),
            _ => Ok(symbolic_residual(form)),
        }
    }
}

/// A representative of dimension n − 2 and discriminant class −d(φ), free of
/// opposite pairs whenever the discriminant allows it. Used where a scripted
/// table is silent.
fn symbolic_residual(form: &QuadraticForm) -> QuadraticForm {
    let n = form.dim() - 2;
    if n == 0 {
        return QuadraticForm::empty();
    }
    let target = -square_class(&form.discriminant());
    for x in [1i64, 2, 3, 5, 6, 7, 10, 11] {
        let rest = class_product(&vec![x; n - 1]);
        let last = class_product(&[target, rest]);
        if n == 1 || last != -x {
            let mut e = vec![x; n - 1];
            e.push(last);
            return QuadraticForm::from_ints(&e).unwrap();
        }
    }
    // binary with discriminant −1: necessarily hyperbolic
    QuadraticForm::from_ints(&[1, -1]).unwrap()
}

/// Isotropy of φ over the context.
pub fn is_isotropic(ctx: &FieldContext, form: &QuadraticForm) -> Result<bool, QuadError> {
    match ctx {
        FieldContext::Rationals { .. } => Ok(rational_isotropic_classes(&form.square_classes())),
        FieldContext::Reals => Ok(local_isotropic_classes(&form.square_classes(), Place::Real)),
        FieldContext::Finite(p) => {
            let r = ctx.residues_mod_p(form, *p)?;
            Ok(match r.len() {
                0 | 1 => false,
                2 => {
                    let d = r[0] as u128 * r[1] as u128 % *p as u128;
                    let minus_d = (*p as u128 - d) % *p as u128;
                    pow_mod(minus_d as u64, (p - 1) / 2, *p) == 1
                }
                _ => true,
            })
        }
        FieldContext::Geometric => Ok(form.dim() >= 2),
        FieldContext::Scripted(table) => table.lookup(form),
    }
}

/// One Witt step: `Some(ψ)` with φ ≅ ψ ⊥ ℍ when φ is isotropic.
pub fn split_hyperbolic(
    ctx: &FieldContext,
    form: &QuadraticForm,
) -> Result<Option<QuadraticForm>, QuadError> {
    if !is_isotropic(ctx, form)? {
        return Ok(None);
    }
    let n = form.dim();
    let psi = match ctx {
        FieldContext::Rationals { max_candidates } => {
            let s = form.square_classes();
            let v = isotropic_vector_q(&s, *max_candidates)?;
            if n == 2 {
                QuadraticForm::empty()
            } else {
                hyperbolic_complement(&s, &v)
            }
        }
        FieldContext::Reals => {
            let s = form.square_classes();
            let pos = s.iter().filter(|&&c| c > 0).count();
            let neg = n - pos;
            let mut e = vec![1i64; pos - 1];
            e.extend(vec![-1i64; neg - 1]);
            QuadraticForm::from_ints(&e).unwrap()
        }
        FieldContext::Finite(p) => {
            if n == 2 {
                QuadraticForm::empty()
            } else {
                let r = ctx.residues_mod_p(form, *p)?;
                let d = r.iter().fold(1u128, |acc, &x| acc * x as u128 % *p as u128) as u64;
                let target = (*p - d) % *p;
                // ψ = ⟨1, …, 1, δ⟩ with δ in the square class of −d
                let delta = if pow_mod(target, (p - 1) / 2, *p) == 1 {
                    1
                } else {
                    (2..*p)
                        .find(|&x| pow_mod(x, (p - 1) / 2, *p) != 1)
                        .unwrap()
                };
                let mut e = vec![1i64; n - 3];
                e.push(delta as i64);
                QuadraticForm::from_ints(&e).unwrap()
            }
        }
        FieldContext::Geometric => QuadraticForm {
            entries: form.entries[..n - 2].to_vec(),
        },
        FieldContext::Scripted(table) => table.reduce(form)?,
    };
    Ok(Some(psi))
}

/// φ ≅ m·ℍ ⊥ φ_an with φ_an anisotropic over the context.
pub fn witt_decompose(
    ctx: &FieldContext,
    form: &QuadraticForm,
) -> Result<(usize, QuadraticForm), QuadError> {
    let mut m = 0;
    let mut cur = form.clone();
    while let Some(psi) = split_hyperbolic(ctx, &cur)? {
        m += 1;
        cur = psi;
    }
    Ok((m, cur))
}

pub fn witt_index(ctx: &FieldContext, form: &QuadraticForm) -> Result<usize, QuadError> {
    Ok(witt_decompose(ctx, form)?.0)
}

/// ∂(ā) = 0 over the context, i.e. the Pfister form is isotropic (hence hyperbolic).
pub fn symbol_vanishes(ctx: &FieldContext, symbol: &PfisterSymbol) -> Result<bool, QuadError> {
    is_isotropic(ctx, &pfister(symbol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(e: &[i64]) -> QuadraticForm {
        QuadraticForm::from_ints(e).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(form(&[4, -8, 9]).normalize(), form(&[-2, 1, 1]));
        assert_eq!(form(&[1]).normalize(), form(&[1]));
        let f = QuadraticForm::new(vec![rat(2, 3)]).unwrap();
        assert_eq!(f.normalize(), form(&[6]));
    }

    #[test]
    fn orthogonal_sums() {
        assert_eq!(
            form(&[1]).orthogonal_sum(&form(&[-1])),
            QuadraticForm::hyperbolic()
        );
        assert_eq!(form(&[1, 1]).orthogonal_sum(&form(&[-7])), form(&[1, 1, -7]));
        assert_eq!(
            form(&[3, 5]).orthogonal_sum(&QuadraticForm::empty()),
            form(&[3, 5])
        );
    }

    #[test]
    fn pfister_forms() {
        let s = PfisterSymbol::from_ints(&[5]).unwrap();
        assert_eq!(pfister(&s), form(&[1, -5]));
        let s = PfisterSymbol::from_ints(&[-1, -1]).unwrap();
        assert_eq!(pfister(&s), form(&[1, 1, 1, 1]));
        let s = PfisterSymbol::from_ints(&[1, 3]).unwrap();
        let p = pfister(&s);
        assert_eq!(p.dim(), 4);
        assert!(p.opposite_pair().is_some());
    }

    #[test]
    fn hilbert_examples() {
        let m1 = rat(-1, 1);
        assert_eq!(hilbert_symbol(&m1, &m1, Place::Real), -1);
        assert_eq!(hilbert_symbol(&m1, &m1, Place::Prime(2)), -1);
        assert_eq!(hilbert_symbol(&rat(2, 1), &rat(3, 1), Place::Prime(3)), -1);
    }

    #[test]
    fn rational_isotropy_examples() {
        let q = FieldContext::rationals();
        assert!(is_isotropic(&q, &form(&[1, 1, -1])).unwrap());
        assert!(!is_isotropic(&q, &form(&[1, 1, 1, 1])).unwrap());
        assert!(!is_isotropic(&q, &form(&[1, 1, 1, -7])).unwrap());
        assert!(is_isotropic(&q, &form(&[1, 1, 1, 1, -7])).unwrap());
    }

    #[test]
    fn witt_examples() {
        let q = FieldContext::rationals();
        assert_eq!(witt_decompose(&q, &form(&[1, -1, 1])).unwrap(), (1, form(&[1])));
        assert_eq!(
            witt_decompose(&q, &form(&[1, 1, 1, 1])).unwrap(),
            (0, form(&[1, 1, 1, 1]))
        );
        let (m, an) = witt_decompose(&q, &form(&[1, 1, -2, -3])).unwrap();
        assert_eq!(m, 1);
        assert_eq!(an.dim(), 2);
        assert!(!is_isotropic(&q, &an).unwrap());
        assert_eq!(square_class(&an.discriminant()), -6);
    }

    #[test]
    fn finite_and_real_contexts() {
        let f5 = FieldContext::finite(5).unwrap();
        assert!(is_isotropic(&f5, &form(&[1, 1])).unwrap()); // −1 is a square mod 5
        let f7 = FieldContext::finite(7).unwrap();
        assert!(!is_isotropic(&f7, &form(&[1, 1])).unwrap());
        assert!(is_isotropic(&f7, &form(&[1, 1, 1])).unwrap());
        assert_eq!(witt_decompose(&f7, &form(&[1, 1, 1, 1])).unwrap().0, 2);
        assert_eq!(witt_decompose(&f7, &form(&[1, 1, 1, 3])).unwrap().0, 1);
        assert!(FieldContext::finite(2).is_err());
        assert!(matches!(
            is_isotropic(&f5, &form(&[5, 1])),
            Err(QuadError::NotAUnitModP { .. })
        ));
        let r = FieldContext::Reals;
        assert_eq!(
            witt_decompose(&r, &form(&[1, 2, -3, 5, -7])).unwrap(),
            (2, form(&[1]))
        );
    }

    #[test]
    fn symbol_vanishing() {
        let q = FieldContext::rationals();
        let s = PfisterSymbol::from_ints(&[3, 1]).unwrap();
        assert!(symbol_vanishes(&q, &s).unwrap());
        assert!(symbol_vanishes(&FieldContext::Reals, &s).unwrap());
        let s = PfisterSymbol::from_ints(&[-1, -1]).unwrap();
        assert!(!symbol_vanishes(&q, &s).unwrap());
        let s = PfisterSymbol::from_ints(&[-1, -1, -1]).unwrap();
        assert!(!symbol_vanishes(&FieldContext::Reals, &s).unwrap());
    }

    #[test]
    fn resource_limit_is_an_error() {
        let q = FieldContext::Rationals { max_candidates: 3 };
        let f = form(&[1, 1, 1, 1, -7]);
        assert!(matches!(
            split_hyperbolic(&q, &f),
            Err(QuadError::ResourceLimit { .. })
        ));
    }

    #[test]
    fn scripted_contexts() {
        let json = r#"{"isotropic": {"1,1,1,1": false, "-7,1,1,1,1": true}, "policy": "error-on-unknown"}"#;
        let ctx = FieldContext::scripted_from_json(json).unwrap();
        assert!(!is_isotropic(&ctx, &form(&[1, 1, 1, 1])).unwrap());
        // subform of an anisotropic entry
        assert!(!is_isotropic(&ctx, &form(&[1, 1])).unwrap());
        // contains ±c
        assert!(is_isotropic(&ctx, &form(&[3, -3, 2])).unwrap());
        assert!(matches!(
            is_isotropic(&ctx, &form(&[2, 3, 5])),
            Err(QuadError::UnknownContext(_))
        ));
        // the reduction of an isotropic form without ±c needs a table entry
        assert!(matches!(
            split_hyperbolic(&ctx, &form(&[1, 1, 1, 1, -7])),
            Err(QuadError::UnknownContext(_))
        ));
        assert_eq!(
            split_hyperbolic(&ctx, &form(&[3, -3, 2])).unwrap(),
            Some(form(&[2]))
        );
    }

    #[test]
    fn scripted_closure_violations_rejected() {
        let bad = [
            r#"{"isotropic": {"1,-1": false}, "policy": "error-on-unknown"}"#,
            r#"{"isotropic": {"3": true}, "policy": "error-on-unknown"}"#,
            r#"{"isotropic": {"1,1": true, "1,1,1": false}, "policy": "error-on-unknown"}"#,
            r#"{"isotropic": {"1,1,1": true}, "reduce": {"1,1,1": "1,1"}, "policy": "error-on-unknown"}"#,
        ];
        for b in bad {
            assert!(FieldContext::scripted_from_json(b).is_err(), "{b}");
        }
    }

    #[test]
    fn symbolic_residuals_have_the_right_invariants() {
        assert_eq!(symbolic_residual(&form(&[1, 1, 1, 1])), form(&[1, -1]));
        let cases: [&[i64]; 4] = [&[1, 2, 3, 5], &[2, 2, 3, -5], &[1, 1, 1, 2], &[1, 1, 1, 1, 1]];
        for e in cases {
            let f = form(e);
            let r = symbolic_residual(&f);
            assert_eq!(r.dim(), f.dim() - 2);
            assert_eq!(square_class(&r.discriminant()), -square_class(&f.discriminant()));
            assert!(r.opposite_pair().is_none());
        }
    }

    #[test]
    fn parse_forms_and_symbols() {
        let f: QuadraticForm = "1,1,-2/3".parse().unwrap();
        assert_eq!(f.dim(), 3);
        assert!("1,0".parse::<QuadraticForm>().is_err());
        let s: PfisterSymbol = "(-1,-1)".parse().unwrap();
        assert_eq!(s.len(), 2);
        assert!("()".parse::<PfisterSymbol>().is_err());
    }
}
