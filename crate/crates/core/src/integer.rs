//! Integer helpers: primality, factorization, modular square roots.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Trial division limit before switching to Pollard rho.
pub const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

const RHO_ITERATION_CAP: u64 = 2_000_000;

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (g, x, _) = egcd_i128(a as i128 % m as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m as i128) as u64)
}

fn egcd_i128(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, x, y) = egcd_i128(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Probabilistic primality for big integers (fixed bases, so deterministic).
pub fn is_probable_prime(n: &BigInt) -> bool {
    if n.sign() != Sign::Plus {
        return false;
    }
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    let n = n.magnitude();
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let a = BigUint::from(a);
        if (&a % n).is_zero() {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i as u64))
        .collect()
}

pub fn next_prime(n: u64) -> u64 {
    let mut c = n + 1;
    while !is_prime_u64(c) {
        c += 1;
    }
    c
}

fn small_primes() -> &'static [u64] {
    use std::sync::OnceLock;
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_DIVISION_LIMIT))
}

fn rho_u64(n: u64) -> Option<u64> {
    if n.is_multiple_of(2) {
        return Some(2);
    }
    for c in 1..50u64 {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        let mut iters = 0;
        while d == 1 && iters < RHO_ITERATION_CAP {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
            iters += 1;
        }
        if d != 1 && d != n {
            return Some(d);
        }
    }
    None
}

fn rho_big(n: &BigInt) -> Option<BigInt> {
    for c in 1..20u32 {
        let c = BigInt::from(c);
        let f = |x: &BigInt| (x * x + &c).mod_floor(n);
        let mut x = BigInt::from(2);
        let mut y = BigInt::from(2);
        let mut d = BigInt::one();
        let mut iters = 0;
        while d.is_one() && iters < RHO_ITERATION_CAP {
            x = f(&x);
            y = f(&f(&y));
            d = (&x - &y).abs().gcd(n);
            iters += 1;
        }
        if !d.is_one() && &d != n {
            return Some(d);
        }
    }
    None
}

fn split_cofactor(n: BigInt, out: &mut Vec<BigInt>) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    if is_probable_prime(&n) {
        out.push(n);
        return Ok(());
    }
    let d = match n.to_u64() {
        Some(small) => rho_u64(small).map(BigInt::from),
        None => rho_big(&n),
    }
    .ok_or_else(|| Error::FactoringFailed(n.to_string()))?;
    let e = &n / &d;
    split_cofactor(d, out)?;
    split_cofactor(e, out)
}

/// Factor `|n|` into primes with multiplicities, ascending. `n` must be nonzero.
pub fn factor(n: &BigInt) -> Result<Vec<(BigInt, u32)>> {
    if n.is_zero() {
        return Err(Error::InvalidInput("cannot factor zero".into()));
    }
    let mut m = n.abs();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    for &p in small_primes() {
        if m.is_one() {
            break;
        }
        let bp = BigInt::from(p);
        if &bp * &bp > m {
            break;
        }
        let mut e = 0;
        while (&m % &bp).is_zero() {
            m /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((bp, e));
        }
    }
    let mut rest = Vec::new();
    split_cofactor(m, &mut rest)?;
    for p in rest {
        match out.iter_mut().find(|(q, _)| *q == p) {
            Some(entry) => entry.1 += 1,
            None => out.push((p, 1)),
        }
    }
    out.sort();
    Ok(out)
}

pub fn factor_u64(n: u64) -> Result<Vec<(u64, u32)>> {
    Ok(factor(&BigInt::from(n))?
        .into_iter()
        .map(|(p, e)| (p.to_u64().expect("factor of u64 fits"), e))
        .collect())
}

/// Distinct prime divisors of `n`.
pub fn prime_support(n: &BigInt) -> Result<Vec<BigInt>> {
    Ok(factor(n)?.into_iter().map(|(p, _)| p).collect())
}

/// `v_p(n)`; `n` nonzero.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let bp = BigInt::from(p);
    let mut m = n.clone();
    let mut e = 0;
    loop {
        let (q, r) = m.div_rem(&bp);
        if !r.is_zero() {
            return e;
        }
        m = q;
        e += 1;
    }
}

/// Split `n = p^v * u` with `p` not dividing `u`.
pub fn split_valuation(n: &BigInt, p: u64) -> (u32, BigInt) {
    let bp = BigInt::from(p);
    let mut m = n.clone();
    let mut e = 0;
    loop {
        let (q, r) = m.div_rem(&bp);
        if !r.is_zero() {
            return (e, m);
        }
        m = q;
        e += 1;
    }
}

/// Squarefree part with sign: `n = s * m^2`, `s` squarefree.
pub fn squarefree_part(n: &BigInt) -> Result<BigInt> {
    let mut s = if n.is_negative() {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    for (p, e) in factor(n)? {
        if e % 2 == 1 {
            s *= p;
        }
    }
    Ok(s)
}

pub fn is_squarefree(n: &BigInt) -> Result<bool> {
    Ok(factor(n)?.iter().all(|&(_, e)| e == 1))
}

/// Exact square root of a nonnegative integer, if it is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

pub fn exact_sqrt_i128(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = (n as u128).sqrt() as i128;
    (r * r == n).then_some(r)
}

/// Legendre symbol of `a` modulo an odd prime `p`: -1, 0, or 1.
pub fn legendre(a: &BigInt, p: u64) -> i32 {
    let r = a.mod_floor(&BigInt::from(p)).to_u64().unwrap();
    legendre_u64(r, p)
}

pub fn legendre_u64(a: u64, p: u64) -> i32 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if p == 2 {
        return 1;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Tonelli-Shanks square root modulo an odd prime.
pub fn sqrt_mod_p(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if legendre_u64(a, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while legendre_u64(z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Modular inverse for big integers.
pub fn inv_mod_big(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

/// Chinese remaindering of `x = r_i mod m_i` for pairwise coprime moduli.
pub fn crt(residues: &[(u128, u128)]) -> (u128, u128) {
    let mut acc = (0u128, 1u128);
    for &(r, m) in residues {
        if m == 1 {
            continue;
        }
        let (a, n) = acc;
        let n_big = BigInt::from(n);
        let m_big = BigInt::from(m);
        let inv = inv_mod_big(&n_big, &m_big).expect("moduli coprime");
        let diff = (BigInt::from(r) - BigInt::from(a)).mod_floor(&m_big);
        let t = (diff * inv).mod_floor(&m_big);
        let x = BigInt::from(a) + n_big * t;
        acc = (x.to_u128().unwrap(), n * m);
    }
    acc
}

pub fn gcd_u128(a: u128, b: u128) -> u128 {
    a.gcd(&b)
}
