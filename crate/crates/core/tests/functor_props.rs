use num_rational::BigRational;
use proptest::prelude::*;
use quadmot::fixedpoint::{mod2, phi, psi};
use quadmot::homotopy::Verdict;
use quadmot::motivealg::evaluate_entries;
use quadmot::quadform::{FieldContext, PfisterSymbol, QuadraticForm};
use quadmot::verify::{affine_pfister_complex, affine_quadric_complex, pattern_context, SplitPattern};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn symbol() -> impl Strategy<Value = PfisterSymbol> {
    prop::collection::vec(prop::sample::select(vec![-1i64, 2, 3, 5, 7]), 1..=4)
        .prop_map(|e| PfisterSymbol::from_ints(&e).unwrap())
}

fn scalar() -> impl Strategy<Value = BigRational> {
    prop::sample::select(vec![7i64, -1, 3, -5]).prop_map(rat)
}

fn form() -> impl Strategy<Value = QuadraticForm> {
    prop::collection::vec(prop::sample::select(vec![1i64, -1, 2, -2, 3, -3, 5]), 1..=5)
        .prop_map(|e| QuadraticForm::from_ints(&e).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Splitting over a coarse pattern first and then over a finer one is the
    /// same as splitting over the finer one directly.
    #[test]
    fn splitting_commutes_with_refinement(s in symbol(), b in scalar()) {
        let wc = affine_pfister_complex(&s, &b).unwrap();
        // a pattern that contradicts an obvious hyperbolic plane is refused
        let realizable: Vec<_> = SplitPattern::ALL
            .iter()
            .filter_map(|p| pattern_context(&s, &b, *p).ok())
            .map(|c| c.context)
            .collect();
        prop_assert!(!realizable.is_empty());
        for (i, coarse) in realizable.iter().enumerate() {
            let pre = evaluate_entries(coarse, &wc).unwrap();
            for fine in &realizable[i..] {
                let direct = phi(fine, &wc).unwrap();
                prop_assert!(direct.validate());
                prop_assert_eq!(phi(fine, &pre).unwrap(), direct);
            }
        }
    }

    #[test]
    fn psi_mod_two_is_phi_when_everything_splits(s in symbol(), b in scalar()) {
        let wc = affine_pfister_complex(&s, &b).unwrap();
        let all = pattern_context(&s, &b, SplitPattern::AllSplit).unwrap().context;
        let reduced = mod2(&psi(&wc).unwrap()).unwrap();
        prop_assert!(reduced.validate());
        prop_assert_eq!(reduced.equivalent(&phi(&all, &wc).unwrap()), Verdict::True);
    }

    #[test]
    fn affine_quadrics_agree_geometrically(f in form(), a in scalar()) {
        let wc = affine_quadric_complex(&f, &a).unwrap();
        let p = phi(&FieldContext::Geometric, &wc).unwrap();
        let q = psi(&wc).unwrap();
        prop_assert!(p.validate() && q.validate());
        prop_assert_eq!(mod2(&q).unwrap().equivalent(&p), Verdict::True);
        prop_assert_eq!(q.minimize().is_invertible(), Verdict::True);
    }

    /// Φ over ℚ, ℝ and 𝔽₁₁ yields a valid complex with an invertible minimal model.
    #[test]
    fn phi_outputs_validate(f in form(), a in scalar()) {
        let wc = affine_quadric_complex(&f, &a).unwrap();
        for ctx in [FieldContext::rationals(), FieldContext::Reals, FieldContext::finite(11).unwrap()] {
            let c = phi(&ctx, &wc).unwrap();
            prop_assert!(c.validate(), "{:?}", c.diagnostics());
            prop_assert_eq!(c.minimize().is_invertible(), Verdict::True);
        }
    }
}
