//! The finite computations behind the invertibility and Hu statements: the two
//! weight complexes they are about, the splitting patterns they are checked
//! under, and reports comparing functor images with their expected values.
//!
//! Every verdict here is about images under Φ and Ψ. Turning that into a
//! statement about the motives themselves needs conservativity, which is not
//! something this crate executes.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coefficients::CoefficientRing;
use crate::fixedpoint::{phi, psi, FunctorError, FunctorRequest};
use crate::homotopy::{TateComplex, Verdict};
use crate::motivealg::{MorphismEntry, MotiveAtom, MotiveError, MotiveObject, WeightComplex};
use crate::notation::{parse_shape, shape_of, NotationError};
use crate::quadform::{
    is_isotropic, pfister, split_hyperbolic, symbol_vanishes, witt_decompose, FieldContext, PfisterSymbol,
    QuadError, QuadraticForm, ScriptedContext, UnknownPolicy,
};

/// Attached to every report.
pub const SCOPE: &str = "functor-image check (Φ over the context, or Ψ); not a statement in DM";

pub const MAX_TABLE_N: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Functor(#[from] FunctorError),
    #[error(transparent)]
    Motive(#[from] MotiveError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Notation(#[from] NotationError),
    #[error("context {context} matches no splitting pattern: {reason}")]
    NoPattern { context: String, reason: String },
    #[error("{0}")]
    Input(String),
}

/// A context with the name it is reported under.
#[derive(Debug, Clone)]
pub struct LabeledContext {
    pub label: String,
    pub context: FieldContext,
}

impl LabeledContext {
    pub fn new(label: impl Into<String>, context: FieldContext) -> Self {
        LabeledContext {
            label: label.into(),
            context,
        }
    }

    /// Labeled by [`FieldContext::label`].
    pub fn plain(context: FieldContext) -> Self {
        LabeledContext {
            label: context.label(),
            context,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseReport {
    pub label: String,
    pub context: String,
    pub input: String,
    pub computed: String,
    pub expected: String,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl CaseReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::True
    }
}

/// Worst verdict of a batch: any false wins, then any indeterminate.
pub fn overall(reports: &[CaseReport]) -> Verdict {
    if reports.iter().any(|r| r.verdict == Verdict::False) {
        Verdict::False
    } else if reports.iter().any(|r| r.verdict == Verdict::Indeterminate) {
        Verdict::Indeterminate
    } else {
        Verdict::True
    }
}

fn one() -> BigRational {
    BigRational::one()
}

/// The weight complex of the affine quadric {φ = a}:
/// degree 1 is Y_φ ⊕ 𝟙{d+1}, degree 0 the deformed quadric, d = dim φ − 2.
pub fn affine_quadric_complex(form: &QuadraticForm, a: &BigRational) -> Result<WeightComplex, MotiveError> {
    let d = form.dim() as i64 - 2;
    let top = MotiveObject::new(vec![MotiveAtom::quadric(form.clone(), 0), MotiveAtom::tate(d + 1)]);
    let bottom = MotiveObject::new(vec![MotiveAtom::deformed(form.clone(), a.clone(), 0)]);
    WeightComplex::new(
        BTreeMap::from([(1, top), (0, bottom)]),
        BTreeMap::from([(1, vec![vec![MorphismEntry::Incl, MorphismEntry::Fund]])]),
    )
}

/// The reduced motive of the affine Pfister quadric attached to (ā, b):
/// R(ā,b) in degree 0 mapping to R(ā){2^{n−1}} ⊕ 𝟙 in degree −1.
pub fn affine_pfister_complex(symbol: &PfisterSymbol, b: &BigRational) -> Result<WeightComplex, MotiveError> {
    if symbol.is_empty() {
        return Err(MotiveError::Parse {
            what: "symbol",
            input: "()".into(),
        });
    }
    let long = symbol.extend(b)?;
    let shift = 1i64 << (symbol.len() - 1);
    let top = MotiveObject::new(vec![MotiveAtom::rost(long, 0)]);
    let bottom = MotiveObject::new(vec![MotiveAtom::rost(symbol.clone(), shift), MotiveAtom::tate(0)]);
    WeightComplex::new(
        BTreeMap::from([(0, top), (-1, bottom)]),
        BTreeMap::from([(0, vec![vec![MorphismEntry::Descend], vec![MorphismEntry::Struct]])]),
    )
}

// ---------------------------------------------------------------------------
// splitting patterns

/// Which of the two symbols (ā,b) and ā vanish. ∂(ā) = 0 forces ∂(ā,b) = 0,
/// so there are three.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitPattern {
    NothingSplits,
    LongSplits,
    AllSplit,
}

impl SplitPattern {
    pub const ALL: [SplitPattern; 3] = [
        SplitPattern::NothingSplits,
        SplitPattern::LongSplits,
        SplitPattern::AllSplit,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SplitPattern::NothingSplits => "nothing-splits",
            SplitPattern::LongSplits => "long-splits",
            SplitPattern::AllSplit => "all-split",
        }
    }

    fn flags(&self) -> (bool, bool) {
        match self {
            SplitPattern::NothingSplits => (false, false),
            SplitPattern::LongSplits => (true, false),
            SplitPattern::AllSplit => (true, true),
        }
    }
}

/// A scripted context realizing the pattern for (ā, b). Unknown forms are errors,
/// so the context cannot answer questions the pattern does not settle.
pub fn pattern_context(symbol: &PfisterSymbol, b: &BigRational, pattern: SplitPattern) -> Result<LabeledContext, VerifyError> {
    let (long, short) = pattern.flags();
    let table = ScriptedContext {
        isotropic: BTreeMap::from([
            (pfister(&symbol.extend(b)?).key(), long),
            (pfister(symbol).key(), short),
        ]),
        reduce: BTreeMap::new(),
        policy: UnknownPolicy::ErrorOnUnknown,
    };
    Ok(LabeledContext::new(
        format!("pattern:{}", pattern.name()),
        FieldContext::scripted(table)?,
    ))
}

pub fn pattern_contexts(symbol: &PfisterSymbol, b: &BigRational) -> Result<Vec<LabeledContext>, VerifyError> {
    SplitPattern::ALL
        .iter()
        .map(|p| pattern_context(symbol, b, *p))
        .collect()
}

pub fn classify(ctx: &LabeledContext, symbol: &PfisterSymbol, b: &BigRational) -> Result<SplitPattern, VerifyError> {
    let long = symbol_vanishes(&ctx.context, &symbol.extend(b)?)?;
    let short = symbol_vanishes(&ctx.context, symbol)?;
    SplitPattern::ALL
        .into_iter()
        .find(|p| p.flags() == (long, short))
        .ok_or_else(|| VerifyError::NoPattern {
            context: ctx.label.clone(),
            reason: format!("{symbol} vanishes but {} does not", symbol.extend(b).unwrap()),
        })
}

// ---------------------------------------------------------------------------
// Hu

fn functor_label(f: &FunctorRequest, label: &str) -> String {
    match f {
        FunctorRequest::Phi(_) => format!("Φ[{label}]"),
        FunctorRequest::Psi { e } => format!("Ψ[ℤ[1/{e}]]"),
    }
}

fn hu_case(f: &FunctorRequest, label: &str, symbol: &PfisterSymbol, b: &BigRational) -> Result<CaseReport, VerifyError> {
    let n = symbol.len() as i64;
    let long = symbol.extend(b)?;
    let left = f.apply(&affine_pfister_complex(&long, &one())?)?;
    let right = f.apply(&affine_pfister_complex(symbol, b)?)?.shift(1);
    let lhs = left.tensor(&right).map_err(FunctorError::from)?.minimize();
    let rhs = f.apply(&affine_pfister_complex(symbol, &one())?)?.twist(1 << n).minimize();
    Ok(CaseReport {
        label: "hu".into(),
        context: functor_label(f, label),
        input: format!("a={symbol} b={}", crate::coefficients::fmt_fraction(b)),
        computed: lhs.to_string(),
        expected: rhs.to_string(),
        verdict: lhs.equivalent(&rhs),
        note: SCOPE.into(),
    })
}

/// U(ā,b;1) ⊗ U(ā;b)[1] against U(ā;1){2^n} under Φ for every context and under Ψ.
/// Contexts whose answers are inconsistent with any pattern are rejected.
pub fn check_hu(symbol: &PfisterSymbol, b: &BigRational, ctxs: &[LabeledContext]) -> Result<Vec<CaseReport>, VerifyError> {
    if symbol.is_empty() {
        return Err(VerifyError::Input("the symbol needs at least one entry".into()));
    }
    let mut out = vec![];
    for ctx in ctxs {
        let pattern = classify(ctx, symbol, b)?;
        let mut r = hu_case(&FunctorRequest::Phi(ctx.context.clone()), &ctx.label, symbol, b)?;
        r.label = format!("hu/{}", pattern.name());
        out.push(r);
    }
    let mut r = hu_case(&FunctorRequest::Psi { e: 1 }, "", symbol, b)?;
    r.label = "hu/psi".into();
    out.push(r);
    Ok(out)
}

// ---------------------------------------------------------------------------
// tables

/// Row objects, as (label, symbol is extended by b, last argument is b).
const ROWS: [&str; 3] = ["U[a,b;1]", "U[a;b]", "U[a;1]"];

/// Expected raw complexes by row, for the nothing-splits and long-splits columns.
const RAW: [[&str; 2]; 3] = [
    ["[𝟙̇ ⊕ 𝟙{2^{n+1}−1} → 𝟙]", "[𝟙̇ ⊕ 𝟙{2^{n+1}−1} → 𝟙{2^n} ⊕ 𝟙{2^{n+1}−1} ⊕ 𝟙]"],
    ["[0̇ → 𝟙]", "[𝟙̇ ⊕ 𝟙{2^n−1} → 𝟙]"],
    ["[𝟙̇ ⊕ 𝟙{2^n−1} → 𝟙]", "[𝟙̇ ⊕ 𝟙{2^n−1} → 𝟙]"],
];

const SIMPLIFIED: [[&str; 2]; 3] = [
    ["𝟙{2^{n+1}−1}", "𝟙{2^n}[−1]"],
    ["𝟙[−1]", "𝟙{2^n−1}"],
    ["𝟙{2^n−1}", "𝟙{2^n−1}"],
];

const COLUMNS: [SplitPattern; 2] = [SplitPattern::NothingSplits, SplitPattern::LongSplits];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableCell {
    pub row: String,
    pub column: SplitPattern,
    pub raw: String,
    pub raw_expected: String,
    pub simplified: String,
    pub simplified_expected: String,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tables {
    pub n: usize,
    pub symbol: String,
    pub b: String,
    pub cells: Vec<TableCell>,
}

impl Tables {
    pub fn all_match(&self) -> bool {
        self.cells.iter().all(|c| c.matches)
    }
}

const PRIMES: [i64; MAX_TABLE_N] = [2, 3, 5, 7, 11, 13];

/// Φ of the three affine Pfister complexes under the two non-trivial columns,
/// raw and minimized, next to the expected shapes. ā is the first n primes, b = −1.
pub fn emit_tables(n: usize) -> Result<Tables, VerifyError> {
    if n == 0 || n > MAX_TABLE_N {
        return Err(VerifyError::Input(format!("n must lie in 1..={MAX_TABLE_N}, got {n}")));
    }
    let symbol = PfisterSymbol::from_ints(&PRIMES[..n])?;
    let b = BigRational::from_integer((-1).into());
    let inputs = [
        (symbol.extend(&b)?, one()),
        (symbol.clone(), b.clone()),
        (symbol.clone(), one()),
    ];
    let mut cells = vec![];
    for (r, (sym, last)) in inputs.iter().enumerate() {
        let wc = affine_pfister_complex(sym, last)?;
        for (c, pattern) in COLUMNS.iter().enumerate() {
            let ctx = pattern_context(&symbol, &b, *pattern)?;
            let raw = phi(&ctx.context, &wc)?;
            let simplified = raw.minimize();
            let ok = shape_of(&raw) == parse_shape(RAW[r][c], Some(n as i64))?
                && shape_of(&simplified) == parse_shape(SIMPLIFIED[r][c], Some(n as i64))?;
            cells.push(TableCell {
                row: ROWS[r].into(),
                column: *pattern,
                raw: raw.to_string(),
                raw_expected: RAW[r][c].into(),
                simplified: simplified.to_string(),
                simplified_expected: SIMPLIFIED[r][c].into(),
                matches: ok,
            });
        }
    }
    Ok(Tables {
        n,
        symbol: symbol.to_string(),
        b: "-1".into(),
        cells,
    })
}

// ---------------------------------------------------------------------------
// invertibility

/// Strips hyperbolic planes while the form has dimension ≥ 3 and is isotropic.
/// A dimension-2 isotropic form is kept: it is the base case, not a step.
fn strip_planes(ctx: &FieldContext, form: &QuadraticForm) -> Result<(usize, QuadraticForm), VerifyError> {
    let mut m = 0;
    let mut cur = form.clone();
    while cur.dim() >= 3 {
        match split_hyperbolic(ctx, &cur)? {
            Some(psi) => {
                cur = psi;
                m += 1;
            }
            None => break,
        }
    }
    Ok((m, cur))
}

/// Expected image of the stripped form, with the branch it falls under.
fn expected_branch(
    ctx: &FieldContext,
    form: &QuadraticForm,
    a: &BigRational,
    ring: CoefficientRing,
) -> Result<(&'static str, TateComplex), VerifyError> {
    let deformed = form.with_entry(&-a)?;
    let iso = is_isotropic(ctx, &deformed)?;
    Ok(match form.dim() {
        0 => return Err(VerifyError::Input("the form must be non-empty".into())),
        1 if iso => ("iv: ⟨c,−a⟩ isotropic", TateComplex::unit(ring)),
        1 => ("iv: ⟨c,−a⟩ anisotropic", TateComplex::tate(ring, 0, 1)),
        2 if is_isotropic(ctx, form)? => ("i: hyperbolic plane", TateComplex::tate(ring, 0, 1)),
        dim => {
            let d = dim as i64 - 2;
            if iso {
                ("iii: φ⊥⟨−a⟩ isotropic", TateComplex::unit(ring))
            } else {
                ("ii: φ⊥⟨−a⟩ anisotropic", TateComplex::tate(ring, d + 1, 1))
            }
        }
    })
}

fn input_string(form: &QuadraticForm, a: &BigRational) -> String {
    format!("φ={form} a={}", crate::coefficients::fmt_fraction(a))
}

fn invertibility_cases(
    f: &FunctorRequest,
    label: &str,
    split_ctx: &FieldContext,
    form: &QuadraticForm,
    a: &BigRational,
) -> Result<Vec<CaseReport>, VerifyError> {
    let ring = match f {
        FunctorRequest::Phi(_) => CoefficientRing::Gf2,
        FunctorRequest::Psi { e } => CoefficientRing::z_inv(*e).map_err(FunctorError::from)?,
    };
    let context = functor_label(f, label);
    let input = input_string(form, a);
    let mut out = vec![];
    let computed = f.apply(&affine_quadric_complex(form, a)?)?.minimize();
    let (m, stripped) = strip_planes(split_ctx, form)?;
    if m > 0 {
        let reduced = f.apply(&affine_quadric_complex(&stripped, a)?)?.twist(m as i64).minimize();
        out.push(CaseReport {
            label: format!("i: {m} hyperbolic step(s) to {stripped}"),
            context: context.clone(),
            input: input.clone(),
            computed: computed.to_string(),
            expected: reduced.to_string(),
            verdict: computed.equivalent(&reduced),
            note: SCOPE.into(),
        });
    }
    let (branch, expected) = expected_branch(split_ctx, &stripped, a, ring)?;
    let expected = expected.twist(m as i64);
    let invertible = computed.is_invertible();
    let matches = computed.equivalent(&expected);
    let verdict = match (invertible, matches) {
        (Verdict::True, Verdict::True) => Verdict::True,
        (Verdict::False, _) | (_, Verdict::False) => Verdict::False,
        _ => Verdict::Indeterminate,
    };
    out.push(CaseReport {
        label: branch.into(),
        context,
        input,
        computed: computed.to_string(),
        expected: expected.to_string(),
        verdict,
        note: format!("invertible: {invertible}; {SCOPE}"),
    });
    Ok(out)
}

/// Φ of the affine quadric complex under every context plus Ψ, each checked
/// to be invertible and equal to the value its branch predicts.
pub fn check_invertibility(
    form: &QuadraticForm,
    a: &BigRational,
    ctxs: &[LabeledContext],
) -> Result<Vec<CaseReport>, VerifyError> {
    let mut out = vec![];
    for ctx in ctxs {
        out.extend(invertibility_cases(
            &FunctorRequest::Phi(ctx.context.clone()),
            &ctx.label,
            &ctx.context,
            form,
            a,
        )?);
    }
    out.extend(invertibility_cases(
        &FunctorRequest::Psi { e: 1 },
        "",
        &FieldContext::Geometric,
        form,
        a,
    )?);
    Ok(out)
}

/// Two scripted contexts tailored to (φ, a): one where only forms with an
/// opposite pair are isotropic, and one that additionally makes
/// φ_an ⊥ ⟨−a⟩ isotropic, where φ_an is φ with its opposite pairs removed.
/// The second exists only when φ_an is non-empty and the pattern is realizable.
pub fn form_pattern_contexts(form: &QuadraticForm, a: &BigRational) -> Result<Vec<LabeledContext>, VerifyError> {
    let base = ScriptedContext {
        isotropic: BTreeMap::new(),
        reduce: BTreeMap::new(),
        policy: UnknownPolicy::AnisotropicOnUnknown,
    };
    let first = FieldContext::scripted(base.clone())?;
    let (_, stripped) = strip_planes(&first, form)?;
    let mut out = vec![LabeledContext::new("pattern:generic", first)];
    let core = if stripped.dim() == 2 && is_isotropic(&out[0].context, &stripped)? {
        QuadraticForm::empty()
    } else {
        stripped
    };
    if core.dim() >= 1 {
        let deformed = core.with_entry(&-a)?;
        let mut table = base;
        table.isotropic.insert(deformed.key(), true);
        let second = FieldContext::scripted(table)?;
        // if the discriminant forces a second plane, φ_an would be isotropic
        // too and no field has this pattern
        if witt_decompose(&second, &deformed)?.0 == 1 {
            out.push(LabeledContext::new("pattern:deformed-isotropic", second));
        }
    }
    Ok(out)
}

/// ℚ, ℝ and the two tailored patterns.
pub fn corpus_contexts(form: &QuadraticForm, a: &BigRational) -> Result<Vec<LabeledContext>, VerifyError> {
    let mut out = vec![
        LabeledContext::plain(FieldContext::rationals()),
        LabeledContext::plain(FieldContext::Reals),
    ];
    out.extend(form_pattern_contexts(form, a)?);
    Ok(out)
}

/// C(ψ ⊥ ℍ) ≃ C(ψ){1} under Φ over the context and under Ψ.
pub fn check_shift_lemma(form: &QuadraticForm, a: &BigRational, ctx: &FieldContext) -> Result<Verdict, VerifyError> {
    let bigger = form.orthogonal_sum(&QuadraticForm::hyperbolic());
    let big = affine_quadric_complex(&bigger, a)?;
    let small = affine_quadric_complex(form, a)?;
    let mut verdicts = vec![];
    for f in [FunctorRequest::Phi(ctx.clone()), FunctorRequest::Psi { e: 1 }] {
        let lhs = f.apply(&big)?.minimize();
        let rhs = f.apply(&small)?.twist(1).minimize();
        verdicts.push(lhs.equivalent(&rhs));
    }
    Ok(if verdicts.contains(&Verdict::False) {
        Verdict::False
    } else if verdicts.contains(&Verdict::Indeterminate) {
        Verdict::Indeterminate
    } else {
        Verdict::True
    })
}

/// Ψ of the affine Pfister complex, minimized.
pub fn psi_of_affine_pfister(symbol: &PfisterSymbol, b: &BigRational) -> Result<TateComplex, VerifyError> {
    Ok(psi(&affine_pfister_complex(symbol, b)?)?.minimize())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(e: &[i64]) -> QuadraticForm {
        QuadraticForm::from_ints(e).unwrap()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn sym(e: &[i64]) -> PfisterSymbol {
        PfisterSymbol::from_ints(e).unwrap()
    }

    #[test]
    fn builders_have_the_stated_terms() {
        let c = affine_quadric_complex(&form(&[1, 1]), &q(1)).unwrap();
        assert_eq!(c.term(1).to_string(), "Q[1,1]{0} ⊕ T{1}");
        assert_eq!(c.term(0).len(), 1);
        let u = affine_pfister_complex(&sym(&[2]), &q(7)).unwrap();
        assert_eq!(u.term(-1).to_string(), "R(2){1} ⊕ T{0}");
        let u3 = affine_pfister_complex(&sym(&[2, 3, 5]), &q(7)).unwrap();
        assert_eq!(u3.term(-1).atoms()[0].twist(), 4);
    }

    #[test]
    fn branch_examples_over_q() {
        let ctx = [LabeledContext::plain(FieldContext::rationals())];
        let r = check_invertibility(&form(&[1, 1, 1]), &q(1), &ctx).unwrap();
        assert!(r[0].label.starts_with("iii"), "{r:?}");
        assert_eq!(r[0].computed, "𝟙");
        let r = check_invertibility(&form(&[1, 1]), &q(-1), &ctx).unwrap();
        assert!(r[0].label.starts_with("ii"), "{r:?}");
        assert_eq!(r[0].computed, "𝟙{1}[1]");
        assert!(r.iter().all(CaseReport::passed), "{r:?}");
    }

    #[test]
    fn hyperbolic_steps_reported() {
        let ctx = [LabeledContext::plain(FieldContext::rationals())];
        let r = check_invertibility(&form(&[1, -1, 1, 1, 1]), &q(2), &ctx).unwrap();
        assert!(r[0].label.starts_with("i: 1"), "{r:?}");
        assert!(r.iter().all(CaseReport::passed), "{r:?}");
    }

    #[test]
    fn patterns_classify_and_reject() {
        let (s, b) = (sym(&[-1, -1]), q(7));
        for (ctx, p) in pattern_contexts(&s, &b).unwrap().iter().zip(SplitPattern::ALL) {
            assert_eq!(classify(ctx, &s, &b).unwrap(), p);
        }
        // ⟨⟨−1,−1⟩⟩ is anisotropic over ℚ, the 8-dimensional one is indefinite
        let qctx = LabeledContext::plain(FieldContext::rationals());
        assert_eq!(classify(&qctx, &s, &b).unwrap(), SplitPattern::LongSplits);
        let bad = ScriptedContext {
            isotropic: BTreeMap::from([
                (pfister(&s.extend(&b).unwrap()).key(), false),
                (pfister(&s).key(), true),
            ]),
            reduce: BTreeMap::new(),
            policy: UnknownPolicy::ErrorOnUnknown,
        };
        // an isotropic subform of an anisotropic form is refused already
        assert!(FieldContext::scripted(bad).is_err());
    }

    #[test]
    fn hu_small_cases() {
        let (s, b) = (sym(&[-1, -1]), q(7));
        let mut ctxs = pattern_contexts(&s, &b).unwrap();
        ctxs.push(LabeledContext::plain(FieldContext::rationals()));
        let r = check_hu(&s, &b, &ctxs).unwrap();
        assert_eq!(r.len(), 5);
        assert!(r.iter().all(CaseReport::passed), "{r:#?}");
    }

    #[test]
    fn tables_for_n_one() {
        let t = emit_tables(1).unwrap();
        assert_eq!(t.cells.len(), 6);
        assert!(t.all_match(), "{t:#?}");
        assert!(emit_tables(0).is_err());
        assert!(emit_tables(MAX_TABLE_N + 1).is_err());
    }

    #[test]
    fn shift_lemma_examples() {
        let qctx = FieldContext::rationals();
        assert_eq!(check_shift_lemma(&form(&[1, 1, 1]), &q(1), &qctx).unwrap(), Verdict::True);
        assert_eq!(check_shift_lemma(&form(&[1]), &q(1), &qctx).unwrap(), Verdict::True);
        assert_eq!(
            check_shift_lemma(&form(&[1, 1]), &q(3), &FieldContext::Geometric).unwrap(),
            Verdict::True
        );
    }

    #[test]
    fn psi_value() {
        for n in 1..=3 {
            let s = sym(&PRIMES[..n]);
            let c = psi_of_affine_pfister(&s, &q(-1)).unwrap();
            let z = CoefficientRing::z_inv(1).unwrap();
            assert_eq!(c, TateComplex::tate(z, 1 << (n - 1), -1));
        }
    }
}
