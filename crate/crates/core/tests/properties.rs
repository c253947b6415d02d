use magvertex::algebra::{
    bracket_class, BracketSum, CompareMode, FactoredRat, LaurentPoly, Monomial, VarSet, Vars, GRID,
};
use magvertex::series::Series;
use num_rational::BigRational;
use proptest::prelude::*;

fn vars() -> Vars {
    VarSet::new(&["a", "b", "c"]).unwrap()
}

fn monomial(exps: &[i32], unit: i32) -> Monomial {
    Monomial::from_stored(&exps.iter().map(|e| e * unit).collect::<Vec<_>>())
}

/// Small integer-coefficient polynomials on the quarter grid.
fn poly() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((prop::array::uniform3(-2i32..=2), -3i64..=3), 0..4).prop_map(|ts| {
        let v = vars();
        let mut p = LaurentPoly::zero(&v);
        for (e, c) in ts {
            p.add_term(monomial(&e, 1), BigRational::from_integer(c.into()));
        }
        p
    })
}

fn nontrivial(unit: i32) -> impl Strategy<Value = Monomial> {
    prop::array::uniform3(-2i32..=2)
        .prop_filter("nontrivial", |e| e.iter().any(|&x| x != 0))
        .prop_map(move |e| monomial(&e, unit))
}

/// Integer classes without a constant term.
fn class() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((nontrivial(GRID), prop::sample::select(vec![-2i64, -1, 1, 2])), 1..4)
        .prop_map(|ts| {
            let v = vars();
            let mut p = LaurentPoly::zero(&v);
            for (m, c) in ts {
                p.add_term(m, BigRational::from_integer(c.into()));
            }
            p
        })
}

/// `poly / [m]` terms.
fn bracket_sum() -> impl Strategy<Value = BracketSum> {
    prop::collection::vec((poly(), nontrivial(GRID)), 1..3).prop_map(|ts| {
        let v = vars();
        let mut s = BracketSum::zero(&v);
        for (p, m) in ts {
            let f = FactoredRat::from_brackets(&v, [(&m, -1)]).unwrap();
            s = s.add(&BracketSum::from(&f).mul_poly(&p));
        }
        s
    })
}

fn series(n: usize) -> impl Strategy<Value = Series<BracketSum>> {
    prop::collection::vec(bracket_sum(), n).prop_map(|cs| {
        let mut coeffs = vec![BracketSum::zero(&vars())];
        coeffs.extend(cs);
        Series::new(coeffs).unwrap()
    })
}

fn same(a: &Series<BracketSum>, b: &Series<BracketSum>) -> bool {
    (0..=a.order()).all(|k| a.coeff(k).equals(b.coeff(k), CompareMode::Exact).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_laws(p in poly(), q in poly(), r in poly()) {
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert!((&p - &p).is_zero());
    }

    #[test]
    fn adams_is_a_monoid_action(p in poly(), a in 1u32..4, b in 1u32..4) {
        prop_assert_eq!(p.adams(a).adams(b), p.adams(a * b));
        prop_assert_eq!(p.adams(1), p.clone());
        prop_assert_eq!((&p * &p).adams(a), &p.adams(a) * &p.adams(a));
    }

    #[test]
    fn bracket_is_multiplicative(v in class(), w in class()) {
        let sum = bracket_class(&(&v + &w)).unwrap();
        let prod = bracket_class(&v).unwrap().mul(&bracket_class(&w).unwrap()).unwrap();
        prop_assert!(BracketSum::from(&sum)
            .equals(&BracketSum::from(&prod), CompareMode::Exact)
            .unwrap());
    }

    #[test]
    fn dual_negates_the_bracket_up_to_rank_parity(v in class()) {
        let up = bracket_class(&v).unwrap();
        let down = bracket_class(&v.dual()).unwrap();
        let rank: i64 = v.terms().map(|(_, c)| c.to_integer().try_into().unwrap_or(0i64)).sum();
        let want = if rank % 2 == 0 { up } else { up.negate() };
        prop_assert!(BracketSum::from(&down)
            .equals(&BracketSum::from(&want), CompareMode::Exact)
            .unwrap());
    }

    #[test]
    fn exact_and_random_agree(x in bracket_sum(), y in bracket_sum(), seed in any::<u64>()) {
        let exact = x.equals(&y, CompareMode::Exact).unwrap();
        let random = x.equals(&y, CompareMode::random(seed)).unwrap();
        prop_assert_eq!(exact, random);
        prop_assert!(x.equals(&x.add(&y).sub(&y), CompareMode::random(seed)).unwrap());
    }

    #[test]
    fn exp_turns_sums_into_products(f in series(3), g in series(3)) {
        let lhs = f.add(&g).unwrap().exp().unwrap();
        let rhs = f.exp().unwrap().mul(&g.exp().unwrap()).unwrap();
        prop_assert!(same(&lhs, &rhs));
        let lhs = f.add(&g).unwrap().pleth_exp().unwrap();
        let rhs = f.pleth_exp().unwrap().mul(&g.pleth_exp().unwrap()).unwrap();
        prop_assert!(same(&lhs, &rhs));
    }

    #[test]
    fn log_inverts_exp(f in series(4)) {
        prop_assert!(same(&f.exp().unwrap().log().unwrap(), &f));
        prop_assert!(same(&f.pleth_exp().unwrap().pleth_log().unwrap(), &f));
    }
}
