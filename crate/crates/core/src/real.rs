//! Real roots of integer polynomials: Sturm sequences and isolation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ipoly::{eval_rat, primitive_from_rat, to_rat, IPoly, RatPoly};
use crate::poly::Poly;

fn sign(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Sturm sequence `f, f', -rem(f, f'), ...` with primitive integer members.
pub fn sturm_sequence(f: &IPoly) -> Vec<IPoly> {
    let mut seq = vec![f.clone()];
    if f.deg() < 1 {
        return seq;
    }
    seq.push(f.derivative());
    loop {
        let n = seq.len();
        let a = to_rat(&seq[n - 2]);
        let b = to_rat(&seq[n - 1]);
        let r: RatPoly = a.rem(&b).expect("nonzero divisor");
        if r.is_zero() {
            break;
        }
        // keep the sign of -r, drop the positive content
        let mut p = primitive_from_rat(&r.neg());
        let lc_r = r.neg().leading().unwrap().clone();
        if lc_r.is_positive() != p.leading().unwrap().is_positive() {
            p = p.neg();
        }
        seq.push(p);
    }
    seq
}

fn variations_at(seq: &[IPoly], x: &BigRational) -> usize {
    let mut last = 0;
    let mut v = 0;
    for p in seq {
        let s = sign(&eval_rat(p, x));
        if s != 0 {
            if last != 0 && s != last {
                v += 1;
            }
            last = s;
        }
    }
    v
}

fn variations_at_infinity(seq: &[IPoly], positive: bool) -> usize {
    let mut last = 0;
    let mut v = 0;
    for p in seq {
        let lc = p.leading().unwrap();
        let mut s = if lc.is_positive() { 1 } else { -1 };
        if !positive && p.deg() % 2 == 1 {
            s = -s;
        }
        if last != 0 && s != last {
            v += 1;
        }
        last = s;
    }
    v
}

/// Number of distinct real roots of `f` (nonzero).
pub fn count_real_roots(f: &IPoly) -> usize {
    let seq = sturm_sequence(f);
    variations_at_infinity(&seq, false) - variations_at_infinity(&seq, true)
}

/// Distinct real roots in the half-open interval `(a, b]`.
pub fn count_roots_in(f: &IPoly, a: &BigRational, b: &BigRational) -> usize {
    let seq = sturm_sequence(f);
    variations_at(&seq, a) - variations_at(&seq, b)
}

/// All real roots lie strictly inside `(-B, B)`.
pub fn cauchy_bound(f: &IPoly) -> BigRational {
    let lc = BigRational::from_integer(f.leading().unwrap().abs());
    let m = f
        .coeffs()
        .iter()
        .map(|c| BigRational::from_integer(c.abs()))
        .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
    BigRational::one() + m / lc + BigRational::one()
}

/// Isolating intervals for the real roots of `f`, sorted.
///
/// Each `(a, b)` contains exactly one root in `(a, b]`, and neither endpoint
/// is a root unless `a == b` (an exact rational root).
pub fn isolate_real_roots(f: &IPoly) -> Vec<(BigRational, BigRational)> {
    if f.deg() < 1 {
        return Vec::new();
    }
    let seq = sturm_sequence(f);
    let b = cauchy_bound(f);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    let two = BigRational::from_integer(BigInt::from(2));
    while let Some((lo, hi)) = stack.pop() {
        let n = variations_at(&seq, &lo) - variations_at(&seq, &hi);
        if n == 0 {
            continue;
        }
        if n == 1 {
            out.push((lo, hi));
            continue;
        }
        let mid = (&lo + &hi) / &two;
        if eval_rat(f, &mid).is_zero() {
            out.push((mid.clone(), mid.clone()));
            // step off the root on both sides
            let mut eps = (&hi - &lo) / BigRational::from_integer(BigInt::from(4));
            loop {
                let l = &mid - &eps;
                let r = &mid + &eps;
                if count_with(&seq, &l, &mid) == 1
                    && count_with(&seq, &mid, &r) == 0
                    && !eval_rat(f, &l).is_zero()
                    && !eval_rat(f, &r).is_zero()
                {
                    stack.push((lo.clone(), l));
                    stack.push((r, hi.clone()));
                    break;
                }
                eps /= &two;
            }
            continue;
        }
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn count_with(seq: &[IPoly], a: &BigRational, b: &BigRational) -> usize {
    variations_at(seq, a) - variations_at(seq, b)
}

/// Rationals meeting every connected component of the complement of the real
/// roots of all `polys` (and the roots themselves when exact).
pub fn sample_points(polys: &[IPoly]) -> Vec<BigRational> {
    let prod = polys
        .iter()
        .filter(|p| p.deg() >= 1)
        .fold(Poly::constant(BigInt::one()), |a, p| a.mul(p));
    let sf = squarefree_int(&prod);
    let roots = isolate_real_roots(&sf);
    if roots.is_empty() {
        return vec![BigRational::zero()];
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let mut pts = vec![&roots[0].0 - BigRational::one()];
    for (i, (a, b)) in roots.iter().enumerate() {
        if a == b {
            pts.push(a.clone());
        }
        if let Some((next, _)) = roots.get(i + 1) {
            pts.push((b + next) / &two);
        }
    }
    pts.push(&roots[roots.len() - 1].1 + BigRational::one());
    pts
}

/// Squarefree part over Q, as a primitive integer polynomial.
pub fn squarefree_int(f: &IPoly) -> IPoly {
    if f.deg() < 1 {
        return f.clone();
    }
    let fr = to_rat(f);
    let g = Poly::gcd(&fr, &fr.derivative()).expect("field");
    primitive_from_rat(&fr.div_exact(&g).expect("gcd divides"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ipoly::from_desc;

    #[test]
    fn counts_and_isolates() {
        // (x-1)(x+2)(x^2+1)
        let f = from_desc(&[1, 1, -1, 1, -2]);
        assert_eq!(count_real_roots(&f), 2);
        let iv = isolate_real_roots(&f);
        assert_eq!(iv.len(), 2);
        let x6m1 = from_desc(&[1, 0, 0, 0, 0, 0, -1]);
        assert_eq!(count_real_roots(&x6m1), 2);
        assert_eq!(count_real_roots(&from_desc(&[-1, 0, 0, 0, 0, 0, -1])), 0);
        // x^3 - 2x: roots at 0 and +-sqrt 2; the bisection hits 0 exactly
        let g = from_desc(&[1, 0, -2, 0]);
        let iv = isolate_real_roots(&g);
        assert_eq!(iv.len(), 3);
        for (a, b) in &iv {
            assert_eq!(count_roots_in(&g, a, b) + usize::from(a == b), 1);
        }
    }

    #[test]
    fn samples_hit_every_region() {
        let g = from_desc(&[1, 0, -4]); // roots +-2
        let h = from_desc(&[1, -1]); // root 1
        let pts = sample_points(&[g.clone(), h.clone()]);
        let mut patterns: Vec<(i32, i32)> = pts
            .iter()
            .map(|x| (sign(&eval_rat(&g, x)), sign(&eval_rat(&h, x))))
            .filter(|(a, b)| *a != 0 && *b != 0)
            .collect();
        patterns.sort();
        patterns.dedup();
        // regions: (-inf,-2): (+,-); (-2,1): (-,-); (1,2): (-,+); (2,inf): (+,+)
        assert_eq!(patterns, vec![(-1, -1), (-1, 1), (1, -1), (1, 1)]);
    }
}
