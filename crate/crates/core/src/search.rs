//! Rational points of bounded height by a quadratic-residue sieve.
//!
//! Points `x = a/b` with `|a|, |b| <= H` are found by testing whether the
//! binary form `F(a, b) = b^n f(a/b)` (`n` the least even integer `>= deg f`)
//! is a square. Residues mod small prime powers discard most pairs before the
//! exact square-root test.

use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::HypCurve;
use crate::integer::{exact_sqrt, exact_sqrt_i128};
use crate::ipoly::{eval_rat, homogeneous_eval};
use crate::serial;

pub const DEFAULT_MODULI: [u64; 6] = [16, 9, 5, 7, 11, 13];
/// Quick-pass and full-pass height bounds of the decision chain.
pub const QUICK_BOUND: u64 = 80;
pub const DEFAULT_BOUND: u64 = 1519;

/// A rational point; at infinity `sign` is 0 for odd degree and +-1 otherwise.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RatPoint {
    Affine {
        #[serde(with = "serial::rat")]
        x: BigRational,
        #[serde(with = "serial::rat")]
        y: BigRational,
    },
    Infinity {
        #[serde(with = "serial::display")]
        sign: i8,
    },
}

impl RatPoint {
    /// Exact check against `y^2 = f(x)`.
    pub fn verify(&self, curve: &HypCurve) -> bool {
        match self {
            RatPoint::Affine { x, y } => y * y == eval_rat(curve.f(), x),
            RatPoint::Infinity { sign } => {
                if curve.degree() % 2 == 1 {
                    *sign == 0
                } else {
                    (*sign == 1 || *sign == -1)
                        && !curve.leading().is_negative()
                        && exact_sqrt(curve.leading()).is_some()
                }
            }
        }
    }

    pub fn x(&self) -> Option<&BigRational> {
        match self {
            RatPoint::Affine { x, .. } => Some(x),
            RatPoint::Infinity { .. } => None,
        }
    }

    /// Naive height `max(|a|, |b|)` of the x-coordinate; 0 at infinity.
    pub fn height(&self) -> BigInt {
        match self {
            RatPoint::Affine { x, .. } => x.numer().abs().max(x.denom().clone()),
            RatPoint::Infinity { .. } => BigInt::zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    #[serde(with = "serial::u64_str")]
    pub bound: u64,
    pub points: Vec<RatPoint>,
    /// Coprime pairs that reached the exact square test.
    #[serde(with = "serial::u64_str")]
    pub tested: u64,
    /// Coprime pairs discarded by the residue sieve.
    #[serde(with = "serial::u64_str")]
    pub eliminated: u64,
    #[serde(with = "serial::u64_str")]
    pub wall_ms: u64,
}

impl SearchReport {
    pub fn eliminated_fraction(&self) -> f64 {
        let total = self.tested + self.eliminated;
        if total == 0 {
            0.0
        } else {
            self.eliminated as f64 / total as f64
        }
    }
}

/// Rational points at infinity of the smooth model.
pub fn points_at_infinity(curve: &HypCurve) -> Vec<RatPoint> {
    if curve.degree() % 2 == 1 {
        return vec![RatPoint::Infinity { sign: 0 }];
    }
    let lc = curve.leading();
    if !lc.is_negative() && exact_sqrt(lc).is_some() {
        vec![
            RatPoint::Infinity { sign: -1 },
            RatPoint::Infinity { sign: 1 },
        ]
    } else {
        Vec::new()
    }
}

fn form_degree(curve: &HypCurve) -> usize {
    let d = curve.degree();
    d + d % 2
}

/// Points over a square value `F(a, b) = s^2`.
fn push_points(out: &mut Vec<RatPoint>, a: i64, b: i64, s: BigInt, half: u32) {
    let x = BigRational::new(BigInt::from(a), BigInt::from(b));
    let y = BigRational::new(s.clone(), BigInt::from(b).pow(half));
    if s.is_zero() {
        out.push(RatPoint::Affine { x, y });
    } else {
        out.push(RatPoint::Affine {
            x: x.clone(),
            y: -y.clone(),
        });
        out.push(RatPoint::Affine { x, y });
    }
}

enum Evaluator {
    Small(Vec<i128>),
    Big(Vec<BigInt>),
}

impl Evaluator {
    fn new(curve: &HypCurve, h: u64) -> Self {
        let n = form_degree(curve) as u32;
        let coeffs: Vec<BigInt> = (0..=n as usize)
            .map(|i| curve.f().coeff(i).cloned().unwrap_or_default())
            .collect();
        let sum: BigInt = coeffs.iter().map(|c| c.abs()).sum();
        let bound = sum * BigInt::from(h.max(1)).pow(n);
        if bound.bits() < 126 {
            Evaluator::Small(coeffs.iter().map(|c| c.to_i128().unwrap()).collect())
        } else {
            Evaluator::Big(coeffs)
        }
    }

    /// `sqrt(F(a, b))` when it is an integer square.
    fn sqrt_form(&self, a: i64, b: i64) -> Option<BigInt> {
        match self {
            Evaluator::Small(c) => {
                exact_sqrt_i128(form_i128(c, a as i128, b as i128)).map(BigInt::from)
            }
            Evaluator::Big(c) => {
                let (a, b) = (BigInt::from(a), BigInt::from(b));
                let n = c.len() - 1;
                let v = homogeneous_eval(&crate::poly::Poly::new(c.clone()), n, &a, &b);
                exact_sqrt(&v)
            }
        }
    }
}

/// `sum c_i a^i b^(n-i)` by Horner in `a`: `((c_n a + c_{n-1} b) a + c_{n-2} b^2) a + ...`
fn form_i128(c: &[i128], a: i128, b: i128) -> i128 {
    let mut acc: i128 = 0;
    let mut bpow: i128 = 1;
    for ci in c.iter().rev() {
        acc = acc * a + ci * bpow;
        bpow *= b;
    }
    acc
}

/// Bitset of `a mod m` values with `F(a, b)` a square mod `m`, for each
/// `b mod m`.
fn residue_tables(curve: &HypCurve, m: u64) -> Vec<Vec<bool>> {
    let mut is_sq = vec![false; m as usize];
    for y in 0..m {
        is_sq[(y * y % m) as usize] = true;
    }
    let n = form_degree(curve);
    let c: Vec<i64> = (0..=n)
        .map(|i| {
            curve
                .f()
                .coeff(i)
                .cloned()
                .unwrap_or_default()
                .mod_floor(&BigInt::from(m))
                .to_i64()
                .unwrap()
        })
        .collect();
    let mi = m as i64;
    (0..m)
        .map(|b| {
            (0..m)
                .map(|a| {
                    let (a, b) = (a as i64, b as i64);
                    let mut v = 0i64;
                    for i in 0..=n {
                        let mut t = c[i];
                        for _ in 0..i {
                            t = t * a % mi;
                        }
                        for _ in i..n {
                            t = t * b % mi;
                        }
                        v = (v + t) % mi;
                    }
                    is_sq[v as usize]
                })
                .collect()
        })
        .collect()
}

/// For each modulus and each `b mod m`, the admissible `a in [-H, H]` as
/// packed words.
struct Sieve {
    h: i64,
    words: usize,
    // tables[j][b mod m_j] -> bitset over a + H
    tables: Vec<(u64, Vec<Vec<u64>>)>,
}

impl Sieve {
    fn new(curve: &HypCurve, h: u64, moduli: &[u64]) -> Self {
        let h = h as i64;
        let len = (2 * h + 1) as usize;
        let words = len.div_ceil(64);
        let tables = moduli
            .iter()
            .map(|&m| {
                let res = residue_tables(curve, m);
                let per_b = res
                    .iter()
                    .map(|row| {
                        let mut bits = vec![0u64; words];
                        for idx in 0..len {
                            let a = idx as i64 - h;
                            if row[a.rem_euclid(m as i64) as usize] {
                                bits[idx / 64] |= 1 << (idx % 64);
                            }
                        }
                        bits
                    })
                    .collect();
                (m, per_b)
            })
            .collect();
        Sieve { h, words, tables }
    }

    fn survivors(&self, b: i64, out: &mut Vec<u64>) {
        out.clear();
        out.resize(self.words, u64::MAX);
        let len = (2 * self.h + 1) as usize;
        if !len.is_multiple_of(64) {
            out[self.words - 1] = (1u64 << (len % 64)) - 1;
        }
        for (m, per_b) in &self.tables {
            let row = &per_b[b.rem_euclid(*m as i64) as usize];
            for (o, r) in out.iter_mut().zip(row) {
                *o &= r;
            }
        }
    }
}

fn coprime_count(b: i64, h: i64) -> u64 {
    (-h..=h).filter(|a| a.gcd(&b) == 1).count() as u64
}

struct Partial {
    points: Vec<RatPoint>,
    tested: u64,
    eliminated: u64,
}

fn scan_b(b: i64, sieve: &Sieve, eval: &Evaluator, half: u32) -> Partial {
    let mut bits = Vec::new();
    sieve.survivors(b, &mut bits);
    let mut points = Vec::new();
    let mut tested = 0;
    for (w, &word) in bits.iter().enumerate() {
        let mut word = word;
        while word != 0 {
            let bit = word.trailing_zeros() as usize;
            word &= word - 1;
            let a = (w * 64 + bit) as i64 - sieve.h;
            if a.gcd(&b) != 1 {
                continue;
            }
            tested += 1;
            if let Some(s) = eval.sqrt_form(a, b) {
                push_points(&mut points, a, b, s, half);
            }
        }
    }
    Partial {
        points,
        tested,
        eliminated: coprime_count(b, sieve.h) - tested,
    }
}

/// All rational points with `|a|, |b| <= h`, plus the points at infinity.
pub fn search(curve: &HypCurve, h: u64, moduli: &[u64]) -> SearchReport {
    let start = Instant::now();
    let mut points = points_at_infinity(curve);
    let mut tested = 0;
    let mut eliminated = 0;
    if h >= 1 {
        let sieve = Sieve::new(curve, h, moduli);
        let eval = Evaluator::new(curve, h);
        let half = (form_degree(curve) / 2) as u32;
        let parts: Vec<Partial> = (1..=h as i64)
            .into_par_iter()
            .map(|b| scan_b(b, &sieve, &eval, half))
            .collect();
        for p in parts {
            points.extend(p.points);
            tested += p.tested;
            eliminated += p.eliminated;
        }
    }
    points.sort();
    SearchReport {
        bound: h,
        points,
        tested,
        eliminated,
        wall_ms: start.elapsed().as_millis() as u64,
    }
}

/// Unsieved reference search with the same contract as [`search`].
pub fn brute_search(curve: &HypCurve, h: u64) -> SearchReport {
    let start = Instant::now();
    let mut points = points_at_infinity(curve);
    let n = form_degree(curve);
    let half = (n / 2) as u32;
    let mut tested = 0;
    let hi = h as i64;
    for b in 1..=hi {
        for a in -hi..=hi {
            if a.gcd(&b) != 1 {
                continue;
            }
            tested += 1;
            let v = homogeneous_eval(curve.f(), n, &BigInt::from(a), &BigInt::from(b));
            if let Some(s) = exact_sqrt(&v) {
                push_points(&mut points, a, b, s, half);
            }
        }
    }
    points.sort();
    SearchReport {
        bound: h,
        points,
        tested,
        eliminated: 0,
        wall_ms: start.elapsed().as_millis() as u64,
    }
}
