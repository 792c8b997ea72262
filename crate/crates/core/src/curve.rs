//! The curve `y^2 = f(x)` and point counts over finite fields.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fields::{Fp, Fp2};
use crate::integer::{is_prime_u64, legendre, prime_support};
use crate::ipoly::{discriminant, to_coeff_list, IPoly};
use crate::scalar::Scalar;

/// A hyperelliptic curve `y^2 = f(x)` with squarefree integral `f`.
#[derive(Clone, PartialEq)]
pub struct HypCurve {
    f: IPoly,
    genus: usize,
    disc: BigInt,
    bad_primes: Vec<u64>,
}

impl std::fmt::Debug for HypCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "HypCurve[{}]", to_coeff_list(&self.f))
    }
}

/// Validate `f` and build the curve, factoring `2 lc(f) disc(f)`.
pub fn make_curve(f: IPoly) -> Result<HypCurve> {
    let d = f.degree().unwrap_or(0);
    if !(3..=10).contains(&d) {
        return Err(Error::DegreeOutOfRange(d));
    }
    let disc = discriminant(&f)?;
    if disc.is_zero() {
        return Err(Error::NotSquarefree);
    }
    let n = BigInt::from(2) * f.leading().unwrap() * &disc;
    let mut bad_primes = Vec::new();
    for p in prime_support(&n)? {
        let p = p
            .to_u64()
            .ok_or_else(|| Error::FactoringFailed(format!("bad prime {p} exceeds 64 bits")))?;
        bad_primes.push(p);
    }
    bad_primes.sort_unstable();
    Ok(HypCurve {
        genus: (d - 1) / 2,
        f,
        disc,
        bad_primes,
    })
}

impl HypCurve {
    pub fn f(&self) -> &IPoly {
        &self.f
    }

    pub fn degree(&self) -> usize {
        self.f.degree().unwrap()
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    pub fn bad_primes(&self) -> &[u64] {
        &self.bad_primes
    }

    pub fn is_bad(&self, p: u64) -> bool {
        self.bad_primes.binary_search(&p).is_ok()
    }

    pub fn leading(&self) -> &BigInt {
        self.f.leading().unwrap()
    }

    /// Checks that `p` is an odd prime of good reduction.
    pub fn check_good(&self, p: u64) -> Result<()> {
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        if self.is_bad(p) {
            return Err(Error::BadPrime(p));
        }
        Ok(())
    }

    pub fn reduce_fp(&self, p: u64) -> crate::poly::Poly<Fp> {
        self.f.map(|c| Fp::from_bigint(c, p))
    }

    /// Number of points at infinity over `F_p` (`F_{p^2}` when `ext2`).
    pub fn points_at_infinity_mod(&self, p: u64, ext2: bool) -> u64 {
        if self.degree() % 2 == 1 {
            1
        } else if ext2 || legendre(self.leading(), p) == 1 {
            2
        } else {
            0
        }
    }

    /// Is the real place trivially fine (odd degree or positive leading term)?
    pub fn real_at_infinity(&self) -> bool {
        self.degree() % 2 == 1 || self.leading().is_positive()
    }
}

/// `#C(F_p)` on the smooth model.
pub fn count_points_fp(curve: &HypCurve, p: u64) -> Result<u64> {
    curve.check_good(p)?;
    let f = curve.reduce_fp(p);
    let mut n = 0u64;
    for x in 0..p {
        n += match f.eval(&Fp::new(x, p)).chi() {
            1 => 2,
            0 => 1,
            _ => 0,
        };
    }
    Ok(n + curve.points_at_infinity_mod(p, false))
}

/// `#C(F_{p^2})` on the smooth model, by enumeration of the quadratic extension.
pub fn count_points_fp2(curve: &HypCurve, p: u64) -> Result<u64> {
    curve.check_good(p)?;
    let ctx = Fp2::zero(p)?;
    let f = curve.f.map(|c| ctx.from_int_like(c));
    let mut n = 0u64;
    for x in ctx.elements() {
        n += match f.eval(&x).chi() {
            1 => 2,
            0 => 1,
            _ => 0,
        };
    }
    Ok(n + curve.points_at_infinity_mod(p, true))
}

/// `#C(F_q)` for `q = p^ext`, `ext` in {1, 2}.
pub fn count_points(curve: &HypCurve, p: u64, ext: u32) -> Result<u64> {
    match ext {
        1 => count_points_fp(curve, p),
        2 => count_points_fp2(curve, p),
        _ => Err(Error::InvalidInput(format!("extension degree {ext}"))),
    }
}

/// Affine `F_p`-points `(x, y)` of the curve, `y` in `[0, p)`.
pub fn affine_points_fp(f: &crate::poly::Poly<Fp>, p: u64) -> Vec<(Fp, Fp)> {
    let mut out = Vec::new();
    for x in 0..p {
        let xx = Fp::new(x, p);
        let v = f.eval(&xx);
        if v.is_zero() {
            out.push((xx, v));
        } else if let Some(y) = v.sqrt() {
            out.push((xx, y));
            out.push((xx, -y));
        }
    }
    out
}
