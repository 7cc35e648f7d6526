//! The functors into K^b(Tate): Φ over a field context (split, drop the
//! Tate-free part, reduce to 𝔽₂) and Ψ (split everything, keep ℤ[1/e]).

use std::collections::BTreeMap;

use thiserror::Error;

use crate::coefficients::{CoeffError, CoefficientRing, RingElement};
use crate::homotopy::{ComplexError, TateComplex};
use crate::motivealg::{evaluate_entries, MotiveAtom, MorphismEntry, MotiveError, WeightComplex};
use crate::quadform::FieldContext;
use crate::tatecat::{GradedMatrix, Matrix, TateObject};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FunctorError {
    #[error(transparent)]
    Motive(#[from] MotiveError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error("atom {0} did not split over the geometric context")]
    Unsplit(String),
    #[error("entry {0} survived between Tate atoms")]
    Symbolic(String),
    #[error("result is not a complex: {0}")]
    NotAComplex(String),
}

/// Which functor to apply.
#[derive(Debug, Clone)]
pub enum FunctorRequest {
    Phi(FieldContext),
    Psi { e: u64 },
}

impl FunctorRequest {
    pub fn apply(&self, wc: &WeightComplex) -> Result<TateComplex, FunctorError> {
        match self {
            FunctorRequest::Phi(ctx) => phi(ctx, wc),
            FunctorRequest::Psi { e } => psi_with(wc, *e),
        }
    }
}

/// Converts a weight complex made only of Tate atoms. Within a degree the
/// atoms are sorted stably by twist to match the rank-vector basis.
pub fn to_tate_complex(wc: &WeightComplex, ring: CoefficientRing) -> Result<TateComplex, FunctorError> {
    let mut positions: BTreeMap<i64, Vec<(i64, usize)>> = BTreeMap::new();
    let mut terms = BTreeMap::new();
    for (n, x) in wc.terms() {
        let mut seen: BTreeMap<i64, usize> = BTreeMap::new();
        let mut pos = vec![];
        for a in x.atoms() {
            let MotiveAtom::Tate { twist } = a else {
                return Err(FunctorError::Unsplit(a.to_string()));
            };
            let slot = seen.entry(*twist).or_insert(0);
            pos.push((*twist, *slot));
            *slot += 1;
        }
        terms.insert(*n, TateObject::from_ranks(ring, seen));
        positions.insert(*n, pos);
    }
    let mut diffs = BTreeMap::new();
    for (n, src) in &terms {
        let Some(tgt) = terms.get(&(n - 1)) else {
            continue;
        };
        let d = wc.diff(*n);
        let mut blocks: BTreeMap<i64, Matrix> = BTreeMap::new();
        for (i, row) in d.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                let (tt, ti) = positions[&(n - 1)][i];
                let (st, sj) = positions[n][j];
                let value: RingElement = match e {
                    MorphismEntry::Zero => continue,
                    MorphismEntry::Scalar(q) => ring.from_rational(q)?,
                    other => return Err(FunctorError::Symbolic(other.to_string())),
                };
                if tt != st {
                    return Err(MotiveError::TwistMismatch(format!("{e} from twist {st} to {tt}")).into());
                }
                let m = blocks
                    .entry(tt)
                    .or_insert_with(|| Matrix::zeros(ring, tgt.rank(tt), src.rank(tt)));
                let v = m.get(ti, sj) + &value;
                m.set(ti, sj, v);
            }
        }
        diffs.insert(*n, GradedMatrix::from_blocks(src, tgt, blocks).map_err(ComplexError::from)?);
    }
    let c = TateComplex::new(ring, terms, diffs)?;
    let problems = c.diagnostics();
    if !problems.is_empty() {
        return Err(FunctorError::NotAComplex(problems.join("; ")));
    }
    Ok(c)
}

/// Φ over the context: split, delete Tate-free atoms, evaluate over 𝔽₂. Not minimized.
pub fn phi(ctx: &FieldContext, wc: &WeightComplex) -> Result<TateComplex, FunctorError> {
    let split = evaluate_entries(ctx, wc)?;
    let tate_part = split.restrict(MotiveAtom::is_tate);
    to_tate_complex(&tate_part, CoefficientRing::Gf2)
}

/// Ψ with coefficients ℤ[1/e] for e = 1 (characteristic zero).
pub fn psi(wc: &WeightComplex) -> Result<TateComplex, FunctorError> {
    psi_with(wc, 1)
}

pub fn psi_with(wc: &WeightComplex, e: u64) -> Result<TateComplex, FunctorError> {
    let ring = CoefficientRing::z_inv(e)?;
    let split = evaluate_entries(&FieldContext::Geometric, wc)?;
    to_tate_complex(&split, ring)
}

/// Entrywise reduction ℤ[1/e] → 𝔽₂.
pub fn mod2(c: &TateComplex) -> Result<TateComplex, FunctorError> {
    if !matches!(c.ring(), CoefficientRing::ZInvE(_)) {
        return Err(CoeffError::NoMod2(c.ring()).into());
    }
    Ok(c.change_ring(CoefficientRing::Gf2, RingElement::reduce_mod2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homotopy::Verdict;
    use crate::motivealg::MotiveObject;
    use crate::quadform::QuadraticForm;

    fn single(atom: MotiveAtom) -> WeightComplex {
        WeightComplex::concentrated(MotiveObject::new(vec![atom]), 0)
    }

    #[test]
    fn tate_atoms_pass_through() {
        let wc = single(MotiveAtom::tate(5));
        let q = FieldContext::rationals();
        assert_eq!(phi(&q, &wc).unwrap(), TateComplex::tate(CoefficientRing::Gf2, 5, 0));
        let z1 = CoefficientRing::z_inv(1).unwrap();
        assert_eq!(psi(&wc).unwrap(), TateComplex::tate(z1, 5, 0));
    }

    #[test]
    fn psi_splits_a_conic() {
        let wc = single(MotiveAtom::quadric(QuadraticForm::from_ints(&[1, 1, 1]).unwrap(), 0));
        let c = psi(&wc).unwrap();
        let z1 = CoefficientRing::z_inv(1).unwrap();
        let expected = TateComplex::tate(z1, 0, 0)
            .direct_sum(&TateComplex::tate(z1, 1, 0))
            .unwrap();
        assert_eq!(c, expected);
        // over ℚ the conic is anisotropic, so Φ drops it
        assert!(phi(&FieldContext::rationals(), &wc).unwrap().is_zero());
    }

    #[test]
    fn mod2_examples() {
        let z3 = CoefficientRing::z_inv(3).unwrap();
        let z1 = CoefficientRing::z_inv(1).unwrap();
        let arrow = |ring: CoefficientRing, s: i64| {
            let u = TateObject::unit(ring, 0);
            let m = GradedMatrix::from_blocks(&u, &u, BTreeMap::from([(0, Matrix::from_i64(ring, &[&[s]]))])).unwrap();
            TateComplex::two_term(1, m)
        };
        assert_eq!(
            mod2(&TateComplex::tate(z3, 2, 1)).unwrap(),
            TateComplex::tate(CoefficientRing::Gf2, 2, 1)
        );
        let two = mod2(&arrow(z3, 2)).unwrap();
        assert!(two.has_zero_differentials());
        assert_eq!(two.total_rank(), 2);
        assert_eq!(mod2(&arrow(z1, 3)).unwrap(), arrow(CoefficientRing::Gf2, 1));
        assert!(mod2(&TateComplex::unit(CoefficientRing::Rationals)).is_err());
        assert_eq!(mod2(&arrow(z1, 3)).unwrap().is_invertible(), Verdict::False);
    }
}
