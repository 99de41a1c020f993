use divfilt::quadfield::{parse_rational, FloorKernel};
use divfilt::{QuadExt, Radicand, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

const RADICANDS: [u64; 6] = [2, 3, 5, 6, 7, 1_000_003];

fn radicand() -> impl Strategy<Value = Radicand> {
    prop::sample::select(RADICANDS.to_vec()).prop_map(|d| Radicand::new(d).unwrap())
}

fn rational() -> impl Strategy<Value = Rational> {
    (-10_000i64..10_000, 1i64..500).prop_map(|(p, q)| Rational::new(p.into(), q.into()))
}

fn element(d: Radicand) -> impl Strategy<Value = QuadExt> {
    (rational(), rational()).prop_map(move |(a, b)| QuadExt::new(a, b, d))
}

fn triple() -> impl Strategy<Value = (QuadExt, QuadExt, QuadExt)> {
    radicand().prop_flat_map(|d| (element(d), element(d), element(d)))
}

/// Compares two 50-digit renderings as signed decimals.
fn decimal_cmp(x: &str, y: &str) -> std::cmp::Ordering {
    let parse = |s: &str| -> BigInt { s.replace('.', "").parse().unwrap() };
    parse(x).cmp(&parse(y))
}

proptest! {
    #[test]
    fn field_axioms((x, y, z) in triple()) {
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!((&x + &y) + &z, &x + (&y + &z));
        prop_assert_eq!((&x * &y) * &z, &x * (&y * &z));
        prop_assert_eq!(&x * (&y + &z), &x * &y + &x * &z);
        prop_assert_eq!(&x - &x, QuadExt::zero(x.radicand()));
        if !x.is_zero() {
            prop_assert_eq!(&x * &x.inv().unwrap(), QuadExt::one(x.radicand()));
            prop_assert_eq!((&y / &x) * &x, y.clone());
        } else {
            prop_assert!(x.inv().is_err());
        }
    }

    #[test]
    fn norm_is_multiplicative((x, y, _) in triple()) {
        prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        prop_assert_eq!(&x * &x.conj(), QuadExt::from_rational(x.norm(), x.radicand()));
    }

    #[test]
    fn sign_matches_decimal_order((x, y, _) in triple()) {
        let dx = x.to_decimal(50).unwrap();
        let dy = y.to_decimal(50).unwrap();
        let exact = x.partial_cmp(&y).unwrap();
        let approx = decimal_cmp(&dx, &dy);
        // Rounded renderings can tie but never invert the order.
        prop_assert!(approx == exact || approx == std::cmp::Ordering::Equal);
        prop_assert_eq!((&x - &y).sign() as i32, exact as i32);
    }

    #[test]
    fn floor_bounds((x, _, _) in triple(), n in 0u64..=100_000) {
        let f = x.floor_scaled(n);
        let nx = x.scale(&Rational::from_integer(n.into()));
        let lo = QuadExt::from_rational(Rational::from_integer(f.clone()), x.radicand());
        let hi = QuadExt::from_rational(Rational::from_integer(f.clone() + BigInt::one()), x.radicand());
        prop_assert!(lo <= nx);
        prop_assert!(nx < hi);
        prop_assert_eq!(FloorKernel::new(&x).floor(n), f.clone());
        prop_assert_eq!(x.ceil_scaled(n), -(-&x).floor_scaled(n));
    }

    #[test]
    fn sqrt_satisfies_defining_relation(d in radicand(), k in 1u64..1000) {
        let s = QuadExt::sqrt_d(d);
        prop_assert_eq!(s.pow(2), QuadExt::from_integer(d.value() as i64, d));
        // floor(k sqrt d)^2 <= k^2 d < (floor + 1)^2
        let f = s.floor_scaled(k);
        let target = BigInt::from(k) * k * d.value();
        prop_assert!(&f * &f <= target);
        prop_assert!((&f + 1) * (&f + 1) > target);
    }

    #[test]
    fn rational_round_trip(p in any::<i64>(), q in 1i64..i64::MAX) {
        let r = Rational::new(p.into(), q.into());
        prop_assert_eq!(parse_rational(&r.to_string()).unwrap(), r);
    }

    #[test]
    fn serde_round_trip((x, _, _) in triple()) {
        let text = serde_json::to_string(&x).unwrap();
        let back: QuadExt = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, x);
    }
}

#[test]
fn zero_sign_and_decimal() {
    let d = Radicand::new(3).unwrap();
    let z = QuadExt::zero(d);
    assert_eq!(z.sign(), 0);
    assert!(z.a().is_zero());
    assert_eq!(z.to_decimal(3).unwrap(), "0.000");
}
