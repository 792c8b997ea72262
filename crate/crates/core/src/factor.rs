//! Factorization of small-degree integer polynomials over the rationals.
//!
//! Squarefree split, factorization modulo a small good prime, Hensel lifting,
//! then Zassenhaus recombination. The degree cap keeps the subset search tiny.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fields::Fp;
use crate::integer::primes_up_to;
use crate::ipoly::{content, div_exact_int, primitive_from_rat, primitive_part, to_rat, IPoly};
use crate::poly::Poly;
use crate::scalar::Scalar;

/// Degree cap for [`factor_ipoly`].
pub const MAX_FACTOR_DEGREE: usize = 10;

/// `f = content * prod factor_i^{e_i}` with primitive irreducible factors of
/// positive leading coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct IntFactorization {
    pub content: BigInt,
    pub factors: Vec<(IPoly, u32)>,
}

impl IntFactorization {
    pub fn expand(&self) -> IPoly {
        self.factors
            .iter()
            .fold(Poly::constant(self.content.clone()), |acc, (g, e)| {
                acc.mul(&g.pow(*e))
            })
    }
}

pub fn factor_ipoly(f: &IPoly) -> Result<IntFactorization> {
    let Some(deg) = f.degree() else {
        return Err(Error::ZeroPolynomial);
    };
    if deg > MAX_FACTOR_DEGREE {
        return Err(Error::DegreeTooLarge(deg));
    }
    let c = content(f);
    let pp = primitive_part(f);
    let mut factors: Vec<(IPoly, u32)> = Vec::new();
    for (part, mult) in squarefree_decomposition(&pp)? {
        for g in factor_squarefree(&part)? {
            factors.push((g, mult));
        }
    }
    factors.sort_by(|a, b| canonical_cmp(&a.0, &b.0).then(a.1.cmp(&b.1)));
    Ok(IntFactorization {
        content: c,
        factors,
    })
}

/// Order by degree, then coefficients from the leading one down.
pub fn canonical_cmp(a: &IPoly, b: &IPoly) -> std::cmp::Ordering {
    a.deg()
        .cmp(&b.deg())
        .then_with(|| a.coeffs().iter().rev().cmp(b.coeffs().iter().rev()))
}

/// Yun's algorithm on a primitive polynomial; returns primitive parts with
/// their multiplicities, skipping constants.
fn squarefree_decomposition(f: &IPoly) -> Result<Vec<(IPoly, u32)>> {
    let fq = to_rat(f);
    let df = fq.derivative();
    let mut out = Vec::new();
    if df.is_zero() {
        return Ok(out);
    }
    let a0 = Poly::gcd(&fq, &df)?;
    let mut b = fq.div_exact(&a0)?;
    let mut c = df.div_exact(&a0)?;
    let mut d = c.sub(&b.derivative());
    let mut i = 1;
    while b.deg() > 0 {
        let a = Poly::gcd(&b, &d)?;
        if a.deg() > 0 {
            out.push((primitive_from_rat(&a), i));
        }
        b = b.div_exact(&a)?;
        c = d.div_exact(&a)?;
        d = c.sub(&b.derivative());
        i += 1;
    }
    Ok(out)
}

fn fp_poly(f: &IPoly, p: u64) -> Poly<Fp> {
    f.map(|c| Fp::from_bigint(c, p))
}

fn powmod(base: &Poly<Fp>, mut e: BigInt, m: &Poly<Fp>) -> Result<Poly<Fp>> {
    let one = Poly::constant(m.leading().unwrap().one_like());
    let mut acc = one;
    let mut b = base.rem(m)?;
    let two = BigInt::from(2);
    while !e.is_zero() {
        if e.is_odd() {
            acc = acc.mul(&b).rem(m)?;
        }
        b = b.square().rem(m)?;
        e /= &two;
    }
    Ok(acc)
}

/// Distinct-degree then equal-degree factorization of a monic squarefree
/// polynomial over `F_p`, `p` odd.
pub fn factor_mod_p(g: &Poly<Fp>, p: u64, rng: &mut impl Rng) -> Result<Vec<Poly<Fp>>> {
    let x = Poly::new(vec![Fp::new(0, p), Fp::new(1, p)]);
    let mut rest = g.monic()?;
    let mut h = x.clone();
    let mut out = Vec::new();
    let mut d = 1;
    while rest.deg() >= 2 * d as isize {
        h = powmod(&h, BigInt::from(p), &rest)?;
        let gd = Poly::gcd(&h.sub(&x), &rest)?;
        if gd.deg() > 0 {
            out.extend(equal_degree(&gd, d, p, rng)?);
            rest = rest.div_exact(&gd)?;
            h = h.rem(&rest)?;
        }
        d += 1;
    }
    if rest.deg() > 0 {
        out.push(rest);
    }
    Ok(out)
}

fn equal_degree(g: &Poly<Fp>, d: usize, p: u64, rng: &mut impl Rng) -> Result<Vec<Poly<Fp>>> {
    let n = g.degree().unwrap();
    if n == d {
        return Ok(vec![g.clone()]);
    }
    let exp: BigInt = (BigInt::from(p).pow(d as u32) - 1) / 2;
    loop {
        let a = Poly::new((0..n).map(|_| Fp::new(rng.gen_range(0..p), p)).collect());
        if a.deg() < 1 {
            continue;
        }
        let one = Poly::constant(Fp::new(1, p));
        let b = powmod(&a, exp.clone(), g)?.sub(&one);
        let h = Poly::gcd(&b, g)?;
        if h.deg() > 0 && h.deg() < g.deg() {
            let mut out = equal_degree(&h, d, p, rng)?;
            out.extend(equal_degree(&g.div_exact(&h)?, d, p, rng)?);
            return Ok(out);
        }
    }
}

fn sym_mod(c: &BigInt, m: &BigInt) -> BigInt {
    let r = c.mod_floor(m);
    if &r + &r > *m {
        r - m
    } else {
        r
    }
}

fn reduce_mod(f: &IPoly, m: &BigInt) -> IPoly {
    f.map(|c| c.mod_floor(m))
}

fn lift_fp(f: &Poly<Fp>) -> IPoly {
    f.map(|c| BigInt::from(c.value()))
}

/// Lift a monic factorization `f = a b (mod p)` to `mod p^k`.
fn hensel_pair(f: &IPoly, a: &Poly<Fp>, b: &Poly<Fp>, p: u64, k: u32) -> Result<(IPoly, IPoly)> {
    let (g, s, t) = Poly::xgcd(a, b)?;
    debug_assert!(g.is_one_poly());
    let mut ai = lift_fp(a);
    let mut bi = lift_fp(b);
    let bp = BigInt::from(p);
    let mut pj = bp.clone();
    for _ in 1..k {
        let pnext = &pj * &bp;
        let diff = reduce_mod(&f.sub(&ai.mul(&bi)), &pnext);
        let e = fp_poly(&diff.map(|c| c / &pj), p);
        let (q, alpha) = e.mul(&t).div_rem(a)?;
        let beta = e.mul(&s).add(&q.mul(b)).rem(b)?;
        ai = reduce_mod(&ai.add(&lift_fp(&alpha).map(|c| c * &pj)), &pnext);
        bi = reduce_mod(&bi.add(&lift_fp(&beta).map(|c| c * &pj)), &pnext);
        pj = pnext;
    }
    Ok((ai, bi))
}

trait PolyOneExt {
    fn is_one_poly(&self) -> bool;
}

impl PolyOneExt for Poly<Fp> {
    fn is_one_poly(&self) -> bool {
        self.degree() == Some(0) && self.coeffs()[0].is_one_elem()
    }
}

fn hensel_multi(f: &IPoly, facs: &[Poly<Fp>], p: u64, k: u32) -> Result<Vec<IPoly>> {
    if facs.len() == 1 {
        return Ok(vec![f.clone()]);
    }
    let mid = facs.len() / 2;
    let prod = |fs: &[Poly<Fp>]| {
        fs.iter()
            .fold(Poly::constant(Fp::new(1, p)), |acc, g| acc.mul(g))
    };
    let (a, b) = hensel_pair(f, &prod(&facs[..mid]), &prod(&facs[mid..]), p, k)?;
    let mut out = hensel_multi(&a, &facs[..mid], p, k)?;
    out.extend(hensel_multi(&b, &facs[mid..], p, k)?);
    Ok(out)
}

fn choose_prime(g: &IPoly, rng: &mut ChaCha8Rng) -> Result<(u64, Vec<Poly<Fp>>)> {
    let lc = g.leading().unwrap();
    let mut best: Option<(u64, Vec<Poly<Fp>>)> = None;
    let mut tried = 0;
    for p in primes_up_to(2000).into_iter().skip(1) {
        if (lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let gp = fp_poly(g, p);
        if Poly::gcd(&gp, &gp.derivative())?.deg() > 0 {
            continue;
        }
        let facs = factor_mod_p(&gp, p, rng)?;
        if best.as_ref().is_none_or(|(_, b)| facs.len() < b.len()) {
            best = Some((p, facs));
        }
        tried += 1;
        if tried >= 5 {
            break;
        }
    }
    best.ok_or_else(|| Error::FactoringFailed("no good prime below 2000".into()))
}

/// Factor a primitive squarefree polynomial of positive degree.
fn factor_squarefree(g: &IPoly) -> Result<Vec<IPoly>> {
    let deg = g.degree().unwrap();
    if deg == 0 {
        return Ok(Vec::new());
    }
    let mut g = primitive_part(g);
    if deg == 1 {
        return Ok(vec![g]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (p, modular) = choose_prime(&g, &mut rng)?;
    if modular.len() == 1 {
        return Ok(vec![g]);
    }
    // coefficient bound for any factor, times lc
    let norm2: BigInt = g.coeffs().iter().map(|c| c * c).sum();
    let lc0 = g.leading().unwrap().abs();
    let bound = (BigInt::one() << deg) * (norm2.sqrt() + 1) * &lc0;
    let bp = BigInt::from(p);
    let mut k = 1u32;
    let mut pk = bp.clone();
    while pk <= &bound * 2 {
        pk *= &bp;
        k += 1;
    }
    let lc_inv = crate::integer::inv_mod_big(g.leading().unwrap(), &pk).unwrap();
    let monic = reduce_mod(&g.map(|c| c * &lc_inv), &pk);
    let mut lifted = hensel_multi(&monic, &modular, p, k)?;

    let mut found = Vec::new();
    let mut size = 1;
    while 2 * size <= lifted.len() {
        let mut progress = false;
        for subset in subsets(lifted.len(), size) {
            let lc = g.leading().unwrap().clone();
            let cand = subset.iter().fold(Poly::constant(lc), |acc, &i| {
                reduce_mod(&acc.mul(&lifted[i]), &pk)
            });
            let cand = primitive_part(&cand.map(|c| sym_mod(c, &pk)));
            if let Ok(q) = div_exact_int(&g, &cand) {
                found.push(cand);
                g = primitive_part(&q);
                let keep: Vec<IPoly> = lifted
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !subset.contains(i))
                    .map(|(_, f)| f.clone())
                    .collect();
                lifted = keep;
                progress = true;
                break;
            }
        }
        if !progress {
            size += 1;
        }
    }
    if g.deg() > 0 {
        found.push(g);
    }
    Ok(found)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Rational roots of an integer polynomial (each listed once).
pub fn rational_roots(f: &IPoly) -> Result<Vec<num_rational::BigRational>> {
    let fac = factor_ipoly(f)?;
    Ok(fac
        .factors
        .iter()
        .filter(|(g, _)| g.degree() == Some(1))
        .map(|(g, _)| num_rational::BigRational::new(-g.coeffs()[0].clone(), g.coeffs()[1].clone()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ipoly::from_desc;

    #[test]
    fn golden_sextic_factors() {
        let g = from_desc(&[1, 1, -1]);
        let h = from_desc(&[1, 1, 1, 1, 2]);
        let f = g.mul(&h).neg();
        let fac = factor_ipoly(&f).unwrap();
        assert_eq!(fac.content, BigInt::from(-1));
        assert_eq!(fac.factors, vec![(g, 1), (h, 1)]);
        assert_eq!(fac.expand(), f);
    }

    #[test]
    fn cyclotomic_split() {
        let fac = factor_ipoly(&from_desc(&[1, 0, 0, 0, 0, 0, -1])).unwrap();
        let got: Vec<IPoly> = fac.factors.iter().map(|(g, _)| g.clone()).collect();
        assert_eq!(
            got,
            vec![
                from_desc(&[1, -1]),
                from_desc(&[1, 1]),
                from_desc(&[1, -1, 1]),
                from_desc(&[1, 1, 1]),
            ]
        );
    }

    /// Exhaustive oracle: no rational root and no integer quadratic factor
    /// `x^2 + b x + c` with `c | 1`.
    #[test]
    fn x4_plus_1_irreducible() {
        let f = from_desc(&[1, 0, 0, 0, 1]);
        let to_i = |x: i64| BigInt::from(x);
        assert!(!crate::ipoly::eval_int(&f, &to_i(1)).is_zero());
        assert!(!crate::ipoly::eval_int(&f, &to_i(-1)).is_zero());
        for c in [-1i64, 1] {
            for b in -4i64..=4 {
                let q = from_desc(&[1, b, c]);
                assert!(div_exact_int(&f, &q).is_err());
            }
        }
        let fac = factor_ipoly(&f).unwrap();
        assert_eq!(fac.factors, vec![(f, 1)]);
    }

    #[test]
    fn multiplicities_and_content() {
        let f = from_desc(&[6, -6])
            .mul(&from_desc(&[1, -1]))
            .mul(&from_desc(&[1, 0, 2]));
        let fac = factor_ipoly(&f).unwrap();
        assert_eq!(fac.content, BigInt::from(6));
        assert_eq!(
            fac.factors,
            vec![(from_desc(&[1, -1]), 2), (from_desc(&[1, 0, 2]), 1)]
        );
        assert_eq!(fac.expand(), f);
    }

    #[test]
    fn degree_cap() {
        let f = from_desc(&[1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]);
        assert_eq!(factor_ipoly(&f), Err(Error::DegreeTooLarge(11)));
    }

    #[test]
    fn swinnerton_dyer_like_many_modular_factors() {
        // x^4 - 10x^2 + 1 is irreducible but splits modulo every prime
        let f = from_desc(&[1, 0, -10, 0, 1]);
        assert_eq!(factor_ipoly(&f).unwrap().factors, vec![(f, 1)]);
    }
}
