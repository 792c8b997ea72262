#![allow(dead_code)]

use std::collections::HashMap;

use genus2_core::curve::{make_curve, HypCurve};
use genus2_core::ipoly::from_desc;
use genus2_core::jacobian::{to_odd_degree_model, Jacobian, MumfordDiv, OddModel};
use genus2_core::search::{search, RatPoint, DEFAULT_MODULI};
use genus2_core::sieve::MWInput;
use genus2_core::{Fp, IPoly, Poly};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn affine(x: i64, y: i64) -> RatPoint {
    RatPoint::Affine {
        x: rat(x),
        y: rat(y),
    }
}

/// `-(x^2+x-1)(x^4+x^3+x^2+x+2)`.
pub fn golden() -> IPoly {
    from_desc(&[-1, -2, -1, -1, -2, -1, 2])
}

/// Uniform coefficients in `[-b, b]` with nonzero leading term.
pub fn random_poly(r: &mut impl Rng, degree: usize, b: i64) -> IPoly {
    let mut c: Vec<BigInt> = (0..degree).map(|_| r.gen_range(-b..=b).into()).collect();
    let mut lc = 0;
    while lc == 0 {
        lc = r.gen_range(-b..=b);
    }
    c.push(lc.into());
    IPoly::new(c)
}

pub fn random_curve(r: &mut impl Rng, degrees: &[usize], b: i64) -> HypCurve {
    loop {
        let d = degrees[r.gen_range(0..degrees.len())];
        if let Ok(c) = make_curve(random_poly(r, d, b)) {
            return c;
        }
    }
}

/// Monic quintic with good reduction at every prime in `primes`.
pub fn random_good_quintic(r: &mut impl Rng, primes: &[u64], b: i64) -> HypCurve {
    loop {
        let mut f = random_poly(r, 5, b);
        let mut c = f.coeffs().to_vec();
        c[5] = BigInt::from(1);
        f = IPoly::new(c);
        if let Ok(c) = make_curve(f) {
            if primes.iter().all(|&p| !c.is_bad(p)) {
                return c;
            }
        }
    }
}

/// Every Mumford pair `(u, v)` over `F_p`: the oracle for `J(F_p)`.
pub fn mumford_enumeration(f: &Poly<Fp>, p: u64) -> Vec<MumfordDiv<Fp>> {
    let e = |v: u64| Fp::new(v, p);
    let mut out = vec![MumfordDiv {
        u: Poly::constant(e(1)),
        v: Poly::zero(),
    }];
    for a in 0..p {
        let u = Poly::new(vec![e(a), e(1)]);
        for b in 0..p {
            let v = Poly::constant(e(b));
            if f.sub(&v.square()).rem(&u).unwrap().is_zero() {
                out.push(MumfordDiv { u: u.clone(), v });
            }
        }
    }
    for a0 in 0..p {
        for a1 in 0..p {
            let u = Poly::new(vec![e(a0), e(a1), e(1)]);
            for b0 in 0..p {
                for b1 in 0..p {
                    let v = Poly::new(vec![e(b0), e(b1)]);
                    if f.sub(&v.square()).rem(&u).unwrap().is_zero() {
                        out.push(MumfordDiv { u: u.clone(), v });
                    }
                }
            }
        }
    }
    out
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
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

/// Invariant factors of a finite abelian group from the orders of all of
/// its elements, computed by repeated addition.
pub fn brute_invariants(jac: &Jacobian<Fp>, elems: &[MumfordDiv<Fp>]) -> Vec<u64> {
    let n = elems.len() as u64;
    let orders: Vec<u64> = elems
        .iter()
        .map(|x| {
            let mut acc = x.clone();
            let mut k = 1;
            while !jac.is_identity(&acc) {
                acc = jac.add(&acc, x).unwrap();
                k += 1;
            }
            k
        })
        .collect();
    // exponent partition for each prime, from #{x : l^k x = 0}
    let mut cols: Vec<Vec<u64>> = Vec::new();
    for l in prime_factors(n) {
        let mut e = 0;
        let mut m = n;
        while m.is_multiple_of(l) {
            m /= l;
            e += 1;
        }
        // at_least[k - 1] = number of cyclic factors of exponent >= k
        let mut at_least = Vec::new();
        let mut prev = 0;
        for k in 1..=e {
            let lk = l.pow(k);
            let killed = orders.iter().filter(|&&o| lk % o == 0).count() as u64;
            let t = killed.ilog(l);
            assert_eq!(l.pow(t), killed);
            at_least.push(t - prev);
            prev = t;
        }
        let mut exps = vec![0u32; at_least[0] as usize];
        for (k, &c) in at_least.iter().enumerate() {
            for x in exps.iter_mut().take(c as usize) {
                *x = k as u32 + 1;
            }
        }
        cols.push(exps.iter().map(|&x| l.pow(x)).collect());
    }
    let len = cols.iter().map(Vec::len).max().unwrap_or(0);
    let mut inv = vec![1u64; len];
    for col in cols {
        // largest exponents go to the last invariant factor
        for (i, q) in col.iter().enumerate() {
            inv[len - 1 - i] *= q;
        }
    }
    inv.retain(|&d| d > 1);
    inv
}

pub struct Fixture {
    pub curve: HypCurve,
    pub input: MWInput,
    pub points: Vec<RatPoint>,
    /// Coordinates of `[P - infinity]` on the odd model in the generators.
    pub coords: HashMap<RatPoint, Vec<BigInt>>,
}

fn coordinates(input: &MWInput, points: &[RatPoint], range: i64) -> HashMap<RatPoint, Vec<BigInt>> {
    let jac = input.model.jacobian_q();
    let tors: Vec<u64> = input.torsion.iter().map(|(_, t)| *t).collect();
    let free_range: Vec<i64> = if input.free.is_empty() {
        vec![0]
    } else {
        (-range..=range).collect()
    };
    let mut table = HashMap::new();
    let total: u64 = tors.iter().product();
    for a in free_range {
        for mut idx in 0..total {
            let mut coords = Vec::new();
            if !input.free.is_empty() {
                coords.push(BigInt::from(a));
            }
            for &t in &tors {
                coords.push(BigInt::from(idx % t));
                idx /= t;
            }
            let d = input.combination(&coords).unwrap();
            table.entry(d).or_insert(coords);
        }
    }
    let mut out = HashMap::new();
    for pt in points {
        let odd = input.model.to_odd(pt).unwrap();
        let d = input.model.point_divisor(&odd).unwrap();
        let c = table
            .get(&d)
            .unwrap_or_else(|| panic!("no coordinates for {pt:?}"))
            .clone();
        assert!(jac.is_valid(&d));
        out.insert(pt.clone(), c);
    }
    out
}

/// Rank 1: `y^2 = x(x-1)(x-2)(x-5)(x-6)`.
pub fn rank1() -> Fixture {
    let curve = make_curve(from_desc(&[1, -14, 65, -112, 60, 0])).unwrap();
    let model = to_odd_degree_model(&curve).unwrap();
    let pd = |x, y| model.point_divisor(&affine(x, y)).unwrap();
    let free = vec![pd(3, 6)];
    let torsion = vec![(pd(0, 0), 2), (pd(1, 0), 2), (pd(2, 0), 2), (pd(5, 0), 2)];
    let input = MWInput::new(model.clone(), free, torsion, true).unwrap();
    let points = search(&curve, 200, &DEFAULT_MODULI).points;
    let coords = coordinates(&input, &points, 6);
    Fixture {
        curve,
        input,
        points,
        coords,
    }
}

/// Rank 0: `y^2 = x^5 + 1`, `J(Q) = Z/5 + Z/2`.
pub fn rank0() -> Fixture {
    let curve = make_curve(from_desc(&[1, 0, 0, 0, 0, 1])).unwrap();
    let model: OddModel = to_odd_degree_model(&curve).unwrap();
    let pd = |x, y| model.point_divisor(&affine(x, y)).unwrap();
    let torsion = vec![(pd(0, 1), 5), (pd(-1, 0), 2)];
    let input = MWInput::new(model.clone(), Vec::new(), torsion, false).unwrap();
    let points = search(&curve, 200, &DEFAULT_MODULI).points;
    let coords = coordinates(&input, &points, 0);
    Fixture {
        curve,
        input,
        points,
        coords,
    }
}
