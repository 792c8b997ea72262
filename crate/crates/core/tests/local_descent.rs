mod common;

use common::*;
use genus2_core::curve::{make_curve, HypCurve};
use genus2_core::descent::{
    factorizations, selmer_set, twist_solvable, twist_support, DescentVerdict, Factorization,
};
use genus2_core::integer::squarefree_part;
use genus2_core::ipoly::{eval_int, eval_rat, from_desc};
use genus2_core::local::{
    everywhere_locally, replay_refutation, replay_witness, solvable_qp, solvable_r, Place,
    Refutation,
};
use genus2_core::pipeline::negate_x;
use genus2_core::search::{search, RatPoint, DEFAULT_MODULI};
use genus2_core::IPoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

/// Independent square test in `Q_p` for a nonzero integer.
fn is_qp_square(n: &BigInt, p: u64) -> bool {
    if n.is_zero() {
        return true;
    }
    let bp = BigInt::from(p);
    let mut u = n.clone();
    let mut v = 0;
    while (&u % &bp).is_zero() {
        u /= &bp;
        v += 1;
    }
    if v % 2 == 1 {
        return false;
    }
    if p == 2 {
        return u.mod_floor(&BigInt::from(8)) == BigInt::one();
    }
    let r = u.mod_floor(&bp);
    (1..p).any(|y| BigInt::from(y * y % p) == r)
}

/// Search `x` in `[0, p^k)` and `x = 1/(p t)` for a `Q_p`-point.
fn brute_qp_point(f: &IPoly, p: u64, k: u32) -> bool {
    let m = p.pow(k);
    let deg = f.degree().unwrap();
    let n = deg + deg % 2;
    for a in 0..m {
        if is_qp_square(&eval_int(f, &BigInt::from(a)), p) {
            return true;
        }
        // z = p a: x = 1/z, value z^n f(1/z) has the same square class
        let z = BigInt::from(p) * BigInt::from(a);
        let mut hom = BigInt::zero();
        for (i, c) in f.coeffs().iter().enumerate() {
            hom += c * z.pow((n - i) as u32);
        }
        if is_qp_square(&hom, p) {
            return true;
        }
    }
    false
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn qp_solvability_agrees_with_brute_force(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = random_curve(&mut r, &[5, 6], 4);
        for p in [2u64, 3, 5, 7] {
            let res = solvable_qp(&c, p).unwrap();
            let found = brute_qp_point(c.f(), p, if p == 2 { 6 } else { 3 });
            if found {
                prop_assert!(res.solvable, "p = {} brute found a point", p);
            }
            match (&res.witness, &res.refutation) {
                (Some(w), _) => prop_assert!(replay_witness(std::slice::from_ref(c.f()), w)),
                (None, Some(Refutation::Padic { leaves, .. })) => {
                    prop_assert!(replay_refutation(std::slice::from_ref(c.f()), p, leaves))
                }
                _ => prop_assert!(false, "missing certificate"),
            }
        }
    }

    #[test]
    fn local_verdict_is_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = random_curve(&mut r, &[6], 3);
        let base = everywhere_locally(&c).unwrap().verdict;
        // x -> x + 1 and x -> -x preserve the curve over every completion
        let shifted = c.f().shift_scale(&BigInt::one(), &BigInt::one());
        let c1 = make_curve(shifted).unwrap();
        prop_assert_eq!(everywhere_locally(&c1).unwrap().verdict, base);
        let c2 = make_curve(negate_x(c.f())).unwrap();
        prop_assert_eq!(everywhere_locally(&c2).unwrap().verdict, base);
    }

    #[test]
    fn descent_is_sound(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = random_curve(&mut r, &[5, 6], 3);
        let pts = search(&c, 40, &DEFAULT_MODULI).points;
        let Some(RatPoint::Affine { x, .. }) = pts.iter().find(|p| {
            matches!(p, RatPoint::Affine { x, .. } if !eval_rat(c.f(), x).is_zero())
        }) else {
            return Ok(());
        };
        prop_assert!(everywhere_locally(&c).unwrap().verdict);
        let out = selmer_set(&c).unwrap();
        prop_assert_eq!(out.verdict, DescentVerdict::Inconclusive);
        for rep in &out.reports {
            let g = &rep.factorization.g;
            let gx = eval_rat(g, x);
            // d = squarefree part of g(x0), numerator times denominator
            let d = squarefree_part(&(gx.numer() * gx.denom())).unwrap();
            prop_assert!(rep.survivors.contains(&d), "{:?} missing {}", g, d);
        }
    }
}

fn golden_split() -> (HypCurve, Factorization) {
    let c = make_curve(golden()).unwrap();
    let f = factorizations(&c)
        .unwrap()
        .into_iter()
        .find(|f| !f.is_trivial())
        .unwrap();
    (c, f)
}

#[test]
fn golden_twists() {
    let (_, f) = golden_split();
    assert_eq!(twist_support(&f).unwrap(), vec![19]);
    for d in [-1i64, -19] {
        assert!(
            !twist_solvable(&f, &BigInt::from(d), Place::Real)
                .unwrap()
                .solvable
        );
    }
    for d in [1i64, 19] {
        assert!(
            !twist_solvable(&f, &BigInt::from(d), Place::Prime(3))
                .unwrap()
                .solvable
        );
    }
}

#[test]
fn factorization_examples() {
    let irred = make_curve(from_desc(&[1, 0, 0, 0, 0, 1, 1])).unwrap();
    let fs = factorizations(&irred).unwrap();
    assert_eq!(fs.len(), 1);
    assert!(fs[0].is_trivial());
    // x (x^5 + x + 1): the (1, 5) split has both degrees odd
    let odd = make_curve(from_desc(&[1, 0, 0, 0, 1, 1, 0])).unwrap();
    for f in factorizations(&odd).unwrap() {
        assert!(f.g.deg() % 2 == 0 || f.h.deg() % 2 == 0);
    }
    let f = Factorization {
        g: from_desc(&[1, 0, 1]),
        h: from_desc(&[1, 0, 0, 0, 2]),
    };
    assert_eq!(twist_support(&f).unwrap(), vec![3]);
}

#[test]
fn descent_with_known_point_keeps_trivial_twist() {
    // (x^2 + 1)(x^4 + 1) has the point (0, 1)
    let c = make_curve(from_desc(&[1, 0, 1, 0, 1, 0, 1])).unwrap();
    let out = selmer_set(&c).unwrap();
    assert_eq!(out.verdict, DescentVerdict::Inconclusive);
    let split = out
        .reports
        .iter()
        .find(|r| !r.factorization.is_trivial())
        .unwrap();
    assert!(split.survivors.contains(&BigInt::one()));
}

#[test]
fn real_place_examples() {
    let neg = make_curve(from_desc(&[-1, 0, 0, 0, 0, 0, -1])).unwrap();
    assert!(!solvable_r(&neg).solvable);
    assert!(!everywhere_locally(&neg).unwrap().verdict);
    let c = make_curve(golden()).unwrap();
    let r = solvable_r(&c);
    assert!(r.solvable);
    assert!(r.witness.unwrap().coord.abs() <= rat(2));
}

#[test]
fn els_failure_empties_trivial_factorization() {
    let mut r = rng(23);
    let mut seen = 0;
    while seen < 10 {
        let c = random_curve(&mut r, &[6], 3);
        if everywhere_locally(&c).unwrap().verdict {
            continue;
        }
        let out = selmer_set(&c).unwrap();
        let trivial = out
            .reports
            .iter()
            .find(|r| r.factorization.is_trivial())
            .unwrap();
        assert!(trivial.is_empty(), "{c:?}");
        assert_eq!(out.verdict, DescentVerdict::EmptyProven);
        seen += 1;
    }
}
