use divfilt::beatty::BeattySequence;
use divfilt::intersection::{example_dn, example_form, BivariatePolynomial, DivisorExpr, IntersectionForm};
use divfilt::quadfield::example_alpha;
use divfilt::Rational;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use proptest::prelude::*;

const GENS: [&str; 3] = ["S", "F", "K"];

fn full_form() -> impl Strategy<Value = IntersectionForm> {
    prop::collection::vec(-500i64..500, 10).prop_map(|vals| {
        let mut f = IntersectionForm::new(&GENS).unwrap();
        let mut it = vals.into_iter();
        for i in 0..3 {
            for j in i..3 {
                for k in j..3 {
                    let v = Rational::from_integer(it.next().unwrap().into());
                    f.set([GENS[i], GENS[j], GENS[k]], v).unwrap();
                }
            }
        }
        f
    })
}

fn linear() -> impl Strategy<Value = BivariatePolynomial> {
    (-20i64..20, -20i64..20, -20i64..20)
        .prop_map(|(a, b, c)| BivariatePolynomial::from_int_terms(&[(a, 1, 0), (b, 0, 1), (c, 0, 0)]))
}

fn divisor() -> impl Strategy<Value = DivisorExpr> {
    prop::collection::vec((0usize..3, linear()), 0..4).prop_map(|parts| {
        parts
            .into_iter()
            .fold(DivisorExpr::new(), |e, (g, p)| e.with(GENS[g], p).unwrap())
    })
}

fn cubic() -> impl Strategy<Value = BivariatePolynomial> {
    prop::collection::vec(-1000i64..1000, 4).prop_map(|c| {
        BivariatePolynomial::from_int_terms(&[(c[0], 3, 0), (c[1], 2, 1), (c[2], 1, 2), (c[3], 0, 3)])
    })
}

proptest! {
    #[test]
    fn triple_product_is_symmetric(f in full_form(), a in divisor(), b in divisor(), c in divisor()) {
        let abc = f.triple_product(&a, &b, &c).unwrap();
        prop_assert_eq!(&abc, &f.triple_product(&c, &a, &b).unwrap());
        prop_assert_eq!(&abc, &f.triple_product(&b, &a, &c).unwrap());
    }

    #[test]
    fn triple_product_is_multilinear(
        f in full_form(), a in divisor(), a2 in divisor(), b in divisor(), c in divisor()
    ) {
        let lhs = f.triple_product(&a.add(&a2), &b, &c).unwrap();
        let rhs = f.triple_product(&a, &b, &c).unwrap() + f.triple_product(&a2, &b, &c).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn difference_drops_top_degree(p in cubic(), sigma in -3i64..=3) {
        let diff = p.difference(sigma);
        prop_assert!(diff.homogeneous_part(3).is_zero());
        prop_assert!(diff.total_degree().is_none_or(|d| d <= 2));
    }

    #[test]
    fn difference_telescopes_for_random_cubic(p in cubic(), n in 1u64..=10_000) {
        let alpha = example_alpha();
        let x = alpha.ceil_scaled(n);
        let x_next = alpha.ceil_scaled(n + 1);
        let sigma = (&x_next - &x).to_i64().unwrap();
        let lhs = p.evaluate_at_n(&alpha, n + 1) - p.evaluate_at_n(&alpha, n);
        prop_assert_eq!(lhs, p.difference(sigma).evaluate_integers(&x, &BigInt::from(n)));
    }
}

#[test]
fn example_cubic_telescopes_up_to_ten_thousand() {
    let alpha = example_alpha();
    let beatty = BeattySequence::new(alpha.clone()).unwrap();
    let dn = example_dn();
    let p = example_form().triple_product(&dn, &dn, &dn).unwrap();
    let diffs = [p.difference(0), p.difference(1)];
    for n in 1..=10_000u64 {
        let sigma = beatty.sigma(n).to_usize().unwrap();
        let x = alpha.ceil_scaled(n);
        let lhs = p.evaluate_at_n(&alpha, n + 1) - p.evaluate_at_n(&alpha, n);
        assert_eq!(lhs, diffs[sigma].evaluate_integers(&x, &BigInt::from(n)), "n = {n}");
    }
}

#[test]
fn json_round_trip_of_example() {
    let f = example_form();
    let back = IntersectionForm::from_json(&f.to_json()).unwrap();
    assert_eq!(back, f);
}
