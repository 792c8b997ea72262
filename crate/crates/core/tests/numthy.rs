mod common;

use common::*;
use genus2_core::factor::{factor_ipoly, rational_roots};
use genus2_core::fields::Fp2;
use genus2_core::integer::{factor, is_prime_u64, squarefree_part, valuation};
use genus2_core::ipoly::{discriminant, eval_rat, from_desc, resultant};
use genus2_core::padic::{sqclass_qp, PadicNum, SquareVerdict};
use genus2_core::real::{count_real_roots, isolate_real_roots};
use genus2_core::IPoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::Rng;

const PREC: u32 = 20;

fn small_rat() -> impl Strategy<Value = BigRational> {
    (-500i64..500, 1i64..200).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

/// Rational square-class test via exact arithmetic in `Z/p^k`.
fn is_square_brute(t: &BigRational, p: u64) -> bool {
    let n = t.numer() * t.denom();
    let (e, u) = {
        let mut u = n.clone();
        let mut e = 0;
        while (&u % BigInt::from(p)).is_zero() {
            u /= BigInt::from(p);
            e += 1;
        }
        (e, u)
    };
    if e % 2 == 1 {
        return false;
    }
    let m = if p == 2 { 8 } else { p };
    let r: u64 = u.mod_floor(&BigInt::from(m)).try_into().unwrap();
    (1..m).any(|y| y * y % m == r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn padic_ring_ops_match_rationals(a in small_rat(), b in small_rat(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let pa = PadicNum::from_rational(&a, p, PREC);
        let pb = PadicNum::from_rational(&b, p, PREC);
        let sum = PadicNum::from_rational(&(&a + &b), p, PREC);
        let prod = PadicNum::from_rational(&(&a * &b), p, PREC);
        prop_assert!(pa.add(&pb).agrees(&sum, None));
        prop_assert!(pa.mul(&pb).agrees(&prod, None));
        prop_assert!(pa.sub(&pb).agrees(&PadicNum::from_rational(&(&a - &b), p, PREC), None));
        if !b.is_zero() {
            let q = PadicNum::from_rational(&(&a / &b), p, PREC);
            prop_assert!(pa.div(&pb).unwrap().agrees(&q, None));
        }
    }

    #[test]
    fn square_class_matches_brute(a in small_rat(), p in prop::sample::select(vec![2u64, 3, 5, 7, 11])) {
        let c = sqclass_qp(&a, p);
        if a.is_zero() {
            prop_assert_eq!(c.verdict, SquareVerdict::Zero);
        } else {
            prop_assert_eq!(c.verdict == SquareVerdict::Square, is_square_brute(&a, p));
            if let Some(w) = c.witness {
                let sq = w.mul(&w);
                prop_assert!(sq.agrees(&PadicNum::from_rational(&a, p, PREC), Some(10)));
            }
        }
    }

    #[test]
    fn factorization_expands(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (da, db) = (r.gen_range(1..=3), r.gen_range(1..=3));
        let a = random_poly(&mut r, da, 5);
        let b = random_poly(&mut r, db, 5);
        let f = a.mul(&b);
        let fz = factor_ipoly(&f).unwrap();
        prop_assert_eq!(fz.expand(), f);
        for (g, _) in &fz.factors {
            prop_assert!(g.leading().unwrap().is_positive());
        }
        prop_assert!(fz.factors.iter().map(|(_, e)| *e as usize).sum::<usize>() >= 2);
    }

    #[test]
    fn integer_factorization_is_exact(n in 2i64..10_000_000) {
        let fs = factor(&BigInt::from(n)).unwrap();
        let back = fs.iter().fold(BigInt::one(), |acc, (q, e)| acc * q.pow(*e));
        prop_assert_eq!(back, BigInt::from(n));
        for (q, e) in &fs {
            let q: u64 = q.try_into().unwrap();
            prop_assert!(is_prime_u64(q));
            prop_assert_eq!(valuation(&BigInt::from(n), q), *e);
        }
    }

    #[test]
    fn resultant_is_product_of_root_differences(r1 in -6i64..6, r2 in -6i64..6, s1 in -6i64..6) {
        // Res((x - r1)(x - r2), x - s1) = (r1 - s1)(r2 - s1)
        let g = from_desc(&[1, -(r1 + r2), r1 * r2]);
        let h = from_desc(&[1, -s1]);
        prop_assert_eq!(resultant(&g, &h).unwrap(), BigInt::from((r1 - s1) * (r2 - s1)));
        prop_assert_eq!(discriminant(&g).unwrap(), BigInt::from((r1 - r2) * (r1 - r2)));
    }

    #[test]
    fn sturm_counts_planted_roots(roots in prop::collection::btree_set(-20i64..20, 1..5), seed in any::<u64>()) {
        // planted roots times a positive-definite quadratic
        let mut f: IPoly = from_desc(&[1, 0, 1 + (seed % 7) as i64]);
        for &t in &roots {
            f = f.mul(&from_desc(&[1, -t]));
        }
        prop_assert_eq!(count_real_roots(&f), roots.len());
        let iso = isolate_real_roots(&f);
        prop_assert_eq!(iso.len(), roots.len());
        for ((a, b), &t) in iso.iter().zip(&roots) {
            prop_assert!(a <= &rat(t) && &rat(t) <= b);
        }
        let rr = rational_roots(&f).unwrap();
        prop_assert_eq!(rr.len(), roots.len());
        for x in rr {
            prop_assert!(eval_rat(&f, &x).is_zero());
        }
    }
}

#[test]
fn fp2_square_roots() {
    for p in [3u64, 5, 7, 11, 13] {
        let ctx = Fp2::zero(p).unwrap();
        let elems: Vec<Fp2> = ctx.elements().collect();
        assert_eq!(elems.len() as u64, p * p);
        let squares: std::collections::HashSet<_> =
            elems.iter().map(|x| (*x * *x).parts()).collect();
        for x in &elems {
            match x.sqrt() {
                Some(y) => assert_eq!(y * y, *x),
                None => assert!(!squares.contains(&x.parts())),
            }
        }
        // every element of F_p is a square in F_p^2
        for a in 0..p {
            assert!(ctx.new(a, 0).sqrt().is_some());
        }
    }
}

#[test]
fn squarefree_parts() {
    for (n, s) in [
        (12i64, 3i64),
        (-18, -2),
        (1, 1),
        (-1, -1),
        (72, 2),
        (19 * 49, 19),
    ] {
        assert_eq!(squarefree_part(&BigInt::from(n)).unwrap(), BigInt::from(s));
    }
    assert!(discriminant(&golden()).unwrap().abs() > BigInt::zero());
}
