//! Prime fields, their quadratic extensions, and capped-precision `Z/p^k`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::integer::{inv_mod, inv_mod_big, is_prime_u64, legendre_u64, mul_mod, pow_mod};
use crate::scalar::Scalar;

/// Largest prime modulus supported by [`Fp`]; products must fit in `u64`.
pub const MAX_FP_PRIME: u64 = 1 << 31;

/// Element of the prime field `F_p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    v: u64,
    p: u64,
}

impl Fp {
    pub fn is_zero(&self) -> bool {
        self.v == 0
    }

    pub fn new(v: u64, p: u64) -> Self {
        debug_assert!(p < MAX_FP_PRIME);
        Fp { v: v % p, p }
    }

    pub fn from_i64(v: i64, p: u64) -> Self {
        Fp {
            v: v.rem_euclid(p as i64) as u64,
            p,
        }
    }

    pub fn from_bigint(v: &BigInt, p: u64) -> Self {
        Fp {
            v: v.mod_floor(&BigInt::from(p)).to_u64().unwrap(),
            p,
        }
    }

    /// Reduce a rational whose denominator is prime to `p`.
    pub fn from_rational(r: &BigRational, p: u64) -> Result<Self> {
        let den = Fp::from_bigint(r.denom(), p);
        if den.v == 0 {
            return Err(Error::BadReduction(p));
        }
        Ok(Fp::from_bigint(r.numer(), p) * den.try_inv()?)
    }

    pub fn value(&self) -> u64 {
        self.v
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Quadratic character: 0, 1 or -1.
    pub fn chi(&self) -> i32 {
        legendre_u64(self.v, self.p)
    }

    pub fn sqrt(&self) -> Option<Fp> {
        crate::integer::sqrt_mod_p(self.v, self.p).map(|r| Fp::new(r, self.p))
    }

    /// Symmetric lift to `(-p/2, p/2]`.
    pub fn lift_signed(&self) -> i64 {
        if self.v > self.p / 2 {
            self.v as i64 - self.p as i64
        } else {
            self.v as i64
        }
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        let s = self.v + rhs.v;
        Fp {
            v: if s >= self.p { s - self.p } else { s },
            p: self.p,
        }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        Fp {
            v: if self.v >= rhs.v {
                self.v - rhs.v
            } else {
                self.v + self.p - rhs.v
            },
            p: self.p,
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        Fp {
            v: self.v * rhs.v % self.p,
            p: self.p,
        }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp {
            v: if self.v == 0 { 0 } else { self.p - self.v },
            p: self.p,
        }
    }
}

impl Scalar for Fp {
    fn zero_like(&self) -> Self {
        Fp { v: 0, p: self.p }
    }
    fn one_like(&self) -> Self {
        Fp { v: 1, p: self.p }
    }
    fn is_zero_elem(&self) -> bool {
        self.v == 0
    }
    fn from_int_like(&self, n: &BigInt) -> Self {
        Fp::from_bigint(n, self.p)
    }
    fn from_i64_like(&self, n: i64) -> Self {
        Fp::from_i64(n, self.p)
    }
    fn try_inv(&self) -> Result<Self> {
        inv_mod(self.v, self.p)
            .map(|v| Fp { v, p: self.p })
            .ok_or(Error::NonInvertible)
    }
}

/// Smallest positive quadratic non-residue modulo an odd prime.
pub fn smallest_nonresidue(p: u64) -> u64 {
    (2..p)
        .find(|&a| legendre_u64(a, p) == -1)
        .expect("odd prime")
}

/// Element `a + b*s` of `F_{p^2} = F_p[s]/(s^2 - nu)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp2 {
    a: u64,
    b: u64,
    p: u64,
    nu: u64,
}

impl Fp2 {
    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// Build the field context for `F_{p^2}`; `p` must be an odd prime.
    pub fn zero(p: u64) -> Result<Self> {
        if p == 2 || !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        let nu = smallest_nonresidue(p);
        debug_assert_eq!(legendre_u64(nu, p), -1);
        Ok(Fp2 { a: 0, b: 0, p, nu })
    }

    pub fn new(&self, a: u64, b: u64) -> Self {
        Fp2 {
            a: a % self.p,
            b: b % self.p,
            p: self.p,
            nu: self.nu,
        }
    }

    pub fn from_fp(&self, x: Fp) -> Self {
        self.new(x.value(), 0)
    }

    pub fn parts(&self) -> (u64, u64) {
        (self.a, self.b)
    }

    pub fn nonresidue(&self) -> u64 {
        self.nu
    }

    /// Norm to `F_p`: `a^2 - nu b^2`.
    pub fn norm(&self) -> Fp {
        let p = self.p;
        Fp::new(self.a * self.a % p, p) - Fp::new(self.nu * (self.b * self.b % p) % p, p)
    }

    /// Quadratic character on `F_{p^2}`, via the norm map.
    pub fn chi(&self) -> i32 {
        self.norm().chi()
    }

    pub fn frobenius(&self) -> Self {
        Fp2 {
            a: self.a,
            b: if self.b == 0 { 0 } else { self.p - self.b },
            ..*self
        }
    }

    /// Enumerate all field elements.
    pub fn elements(&self) -> impl Iterator<Item = Fp2> + '_ {
        (0..self.p).flat_map(move |a| (0..self.p).map(move |b| self.new(a, b)))
    }

    /// Square root via Tonelli-Shanks in the group of order `p^2 - 1`, if one exists.
    pub fn sqrt(&self) -> Option<Fp2> {
        if self.is_zero() {
            return Some(*self);
        }
        if self.chi() != 1 {
            return None;
        }
        let q = self.p * self.p;
        // Tonelli-Shanks in the cyclic group of order q - 1.
        let mut s = 0;
        let mut odd = q - 1;
        while odd.is_multiple_of(2) {
            odd /= 2;
            s += 1;
        }
        let z = self
            .elements()
            .find(|e| !e.is_zero() && e.chi() == -1)
            .unwrap();
        let mut m = s;
        let mut c = z.pow_u64(odd);
        let mut tt = self.pow_u64(odd);
        let mut r = self.pow_u64(odd.div_ceil(2));
        while !tt.is_one_elem() {
            let mut i = 0;
            let mut t2 = tt;
            while !t2.is_one_elem() {
                t2 = t2 * t2;
                i += 1;
            }
            let b = c.pow_u64(1 << (m - i - 1));
            m = i;
            c = b * b;
            tt = tt * c;
            r = r * b;
        }
        Some(r)
    }
}

impl fmt::Debug for Fp2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}s", self.a, self.b)
    }
}

impl Add for Fp2 {
    type Output = Fp2;
    fn add(self, rhs: Fp2) -> Fp2 {
        let p = self.p;
        Fp2 {
            a: (self.a + rhs.a) % p,
            b: (self.b + rhs.b) % p,
            ..self
        }
    }
}

impl Sub for Fp2 {
    type Output = Fp2;
    fn sub(self, rhs: Fp2) -> Fp2 {
        let p = self.p;
        Fp2 {
            a: (self.a + p - rhs.a) % p,
            b: (self.b + p - rhs.b) % p,
            ..self
        }
    }
}

impl Mul for Fp2 {
    type Output = Fp2;
    fn mul(self, rhs: Fp2) -> Fp2 {
        let p = self.p;
        let ac = self.a * rhs.a % p;
        let bd = self.b * rhs.b % p;
        let ad = self.a * rhs.b % p;
        let bc = self.b * rhs.a % p;
        Fp2 {
            a: (ac + self.nu * bd % p) % p,
            b: (ad + bc) % p,
            ..self
        }
    }
}

impl Neg for Fp2 {
    type Output = Fp2;
    fn neg(self) -> Fp2 {
        let p = self.p;
        Fp2 {
            a: (p - self.a) % p,
            b: (p - self.b) % p,
            ..self
        }
    }
}

impl Scalar for Fp2 {
    fn zero_like(&self) -> Self {
        self.new(0, 0)
    }
    fn one_like(&self) -> Self {
        self.new(1, 0)
    }
    fn is_zero_elem(&self) -> bool {
        self.a == 0 && self.b == 0
    }
    fn from_int_like(&self, n: &BigInt) -> Self {
        self.from_fp(Fp::from_bigint(n, self.p))
    }
    fn try_inv(&self) -> Result<Self> {
        let n = self.norm();
        let ni = n.try_inv()?.value();
        let p = self.p;
        Ok(Fp2 {
            a: self.a * ni % p,
            b: (p - self.b) % p * ni % p,
            ..*self
        })
    }
}

/// Modulus data shared by elements of `Z/p^k`.
#[derive(Debug, PartialEq, Eq)]
pub struct ZpkModulus {
    pub p: u64,
    pub k: u32,
    pub modulus: BigInt,
}

/// Residue modulo `p^k`: the capped-precision coefficient ring used for
/// p-adic Jacobian arithmetic. Division by a non-unit is an error.
#[derive(Clone)]
pub struct Zpk {
    v: BigInt,
    m: Arc<ZpkModulus>,
}

impl PartialEq for Zpk {
    fn eq(&self, other: &Self) -> bool {
        self.v == other.v && self.m.modulus == other.m.modulus
    }
}

impl Zpk {
    pub fn is_zero(&self) -> bool {
        Zero::is_zero(&self.v)
    }

    pub fn ring(p: u64, k: u32) -> Arc<ZpkModulus> {
        Arc::new(ZpkModulus {
            p,
            k,
            modulus: BigInt::from(p).pow(k),
        })
    }

    pub fn new(v: &BigInt, m: &Arc<ZpkModulus>) -> Self {
        Zpk {
            v: v.mod_floor(&m.modulus),
            m: m.clone(),
        }
    }

    pub fn from_rational(r: &BigRational, m: &Arc<ZpkModulus>) -> Result<Self> {
        let den = Zpk::new(r.denom(), m);
        Ok(Zpk::new(r.numer(), m) * den.try_inv().map_err(|_| Error::BadReduction(m.p))?)
    }

    pub fn value(&self) -> &BigInt {
        &self.v
    }

    pub fn modulus(&self) -> &Arc<ZpkModulus> {
        &self.m
    }

    pub fn prime(&self) -> u64 {
        self.m.p
    }

    pub fn is_unit(&self) -> bool {
        !Zero::is_zero(&(&self.v % BigInt::from(self.m.p)))
    }

    /// Reduction to `F_p`.
    pub fn reduce(&self) -> Fp {
        Fp::from_bigint(&self.v, self.m.p)
    }

    /// Symmetric lift to `(-p^k/2, p^k/2]`.
    pub fn lift_signed(&self) -> BigInt {
        let half = &self.m.modulus >> 1;
        if self.v > half {
            &self.v - &self.m.modulus
        } else {
            self.v.clone()
        }
    }

    /// Square root of a unit square by Hensel lifting from `F_p` (odd `p`).
    pub fn sqrt_unit(&self) -> Option<Zpk> {
        if self.m.p == 2 || !self.is_unit() {
            return None;
        }
        let r0 = self.reduce().sqrt()?;
        let mut r = Zpk::new(&BigInt::from(r0.value()), &self.m);
        let two = self.from_i64_like(2);
        for _ in 0..(self.m.k.max(1) as usize)
            .next_power_of_two()
            .trailing_zeros()
            + 2
        {
            let inv = (two.clone() * r.clone()).try_inv().ok()?;
            r = r.clone() - (r.square() - self.clone()) * inv;
        }
        (r.square() == *self).then_some(r)
    }
}

impl fmt::Debug for Zpk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self.v, self.m.p, self.m.k)
    }
}

impl Add for Zpk {
    type Output = Zpk;
    fn add(self, rhs: Zpk) -> Zpk {
        let mut v = self.v + rhs.v;
        if v >= self.m.modulus {
            v -= &self.m.modulus;
        }
        Zpk { v, m: self.m }
    }
}

impl Sub for Zpk {
    type Output = Zpk;
    fn sub(self, rhs: Zpk) -> Zpk {
        let mut v = self.v - rhs.v;
        if v.sign() == num_bigint::Sign::Minus {
            v += &self.m.modulus;
        }
        Zpk { v, m: self.m }
    }
}

impl Mul for Zpk {
    type Output = Zpk;
    fn mul(self, rhs: Zpk) -> Zpk {
        Zpk {
            v: (self.v * rhs.v) % &self.m.modulus,
            m: self.m,
        }
    }
}

impl Neg for Zpk {
    type Output = Zpk;
    fn neg(self) -> Zpk {
        if Zero::is_zero(&self.v) {
            self
        } else {
            Zpk {
                v: &self.m.modulus - self.v,
                m: self.m,
            }
        }
    }
}

impl Scalar for Zpk {
    fn zero_like(&self) -> Self {
        Zpk {
            v: BigInt::zero(),
            m: self.m.clone(),
        }
    }
    fn one_like(&self) -> Self {
        Zpk {
            v: BigInt::one(),
            m: self.m.clone(),
        }
    }
    fn is_zero_elem(&self) -> bool {
        Zero::is_zero(&self.v)
    }
    fn from_int_like(&self, n: &BigInt) -> Self {
        Zpk::new(n, &self.m)
    }
    fn try_inv(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NonInvertible);
        }
        let inv = inv_mod_big(&self.v, &self.m.modulus).ok_or(Error::NonInvertible)?;
        Ok(Zpk {
            v: inv,
            m: self.m.clone(),
        })
    }
}

/// Euler's criterion packaged for callers that hold raw residues.
pub fn is_qr(a: u64, p: u64) -> bool {
    a.is_multiple_of(p) || pow_mod(a % p, (p - 1) / 2, p) == 1
}

/// `a * b mod p` convenience re-export for kernels working on raw residues.
pub fn fp_mul(a: u64, b: u64, p: u64) -> u64 {
    mul_mod(a, b, p)
}
