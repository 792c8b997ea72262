//! Capped-precision p-adic numbers and square classes in `Q_p`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integer::{inv_mod_big, legendre, split_valuation, sqrt_mod_p};

/// Default relative precision for p-adic computations.
pub const DEFAULT_PRECISION: u32 = 8;

/// `p^val * unit`, with `unit` known modulo `p^prec`.
///
/// A zero `unit` encodes the inexact zero known modulo `p^val`
/// (absolute precision `val`, `prec = 0`).
#[derive(Clone, PartialEq, Eq)]
pub struct PadicNum {
    p: u64,
    val: i64,
    unit: BigInt,
    prec: u32,
}

fn ppow(p: u64, e: u32) -> BigInt {
    BigInt::from(p).pow(e)
}

impl PadicNum {
    pub fn zero(p: u64, abs_prec: i64) -> Self {
        PadicNum {
            p,
            val: abs_prec,
            unit: BigInt::zero(),
            prec: 0,
        }
    }

    /// Normalize `p^val * x` known modulo `p^abs_prec`.
    fn normalize(p: u64, val: i64, x: BigInt, abs_prec: i64) -> Self {
        if abs_prec <= val {
            return PadicNum::zero(p, abs_prec);
        }
        let m = ppow(p, (abs_prec - val) as u32);
        let x = x.mod_floor(&m);
        if x.is_zero() {
            return PadicNum::zero(p, abs_prec);
        }
        let (e, u) = split_valuation(&x, p);
        let v = val + e as i64;
        let prec = (abs_prec - v) as u32;
        PadicNum {
            p,
            val: v,
            unit: u.mod_floor(&ppow(p, prec)),
            prec,
        }
    }

    pub fn from_int(n: &BigInt, p: u64, prec: u32) -> Self {
        if n.is_zero() {
            return PadicNum::zero(p, prec as i64);
        }
        let (e, u) = split_valuation(n, p);
        PadicNum {
            p,
            val: e as i64,
            unit: u.mod_floor(&ppow(p, prec)),
            prec,
        }
    }

    /// Rational with `prec` digits of relative precision.
    pub fn from_rational(r: &BigRational, p: u64, prec: u32) -> Self {
        if r.is_zero() {
            return PadicNum::zero(p, prec as i64);
        }
        let (en, un) = split_valuation(r.numer(), p);
        let (ed, ud) = split_valuation(r.denom(), p);
        let m = ppow(p, prec);
        let inv = inv_mod_big(&ud, &m).expect("unit");
        PadicNum {
            p,
            val: en as i64 - ed as i64,
            unit: (un * inv).mod_floor(&m),
            prec,
        }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    /// Valuation; for the inexact zero, the lower bound `abs_precision`.
    pub fn valuation(&self) -> i64 {
        self.val
    }

    pub fn unit(&self) -> &BigInt {
        &self.unit
    }

    pub fn relative_precision(&self) -> u32 {
        self.prec
    }

    /// The element is known modulo `p^abs_precision`.
    pub fn abs_precision(&self) -> i64 {
        self.val + self.prec as i64
    }

    /// Representative modulo `p^n` for `0 <= n <= abs_precision`; `None` if
    /// the valuation is negative.
    pub fn residue(&self, n: u32) -> Option<BigInt> {
        assert!(n as i64 <= self.abs_precision());
        if self.is_zero() {
            return Some(BigInt::zero());
        }
        if self.val < 0 {
            return None;
        }
        let m = ppow(self.p, n);
        Some((&self.unit * ppow(self.p, self.val as u32)).mod_floor(&m))
    }

    pub fn neg(&self) -> Self {
        PadicNum {
            unit: (-&self.unit).mod_floor(&ppow(self.p, self.prec)),
            ..self.clone()
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.p, o.p);
        let abs = self.abs_precision().min(o.abs_precision());
        match (self.is_zero(), o.is_zero()) {
            (true, true) => return PadicNum::zero(self.p, abs),
            (true, false) => return PadicNum::normalize(o.p, o.val, o.unit.clone(), abs),
            (false, true) => return PadicNum::normalize(self.p, self.val, self.unit.clone(), abs),
            _ => {}
        }
        let v = self.val.min(o.val);
        let a = &self.unit * ppow(self.p, (self.val - v) as u32);
        let b = &o.unit * ppow(self.p, (o.val - v) as u32);
        PadicNum::normalize(self.p, v, a + b, abs)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.p, o.p);
        match (self.is_zero(), o.is_zero()) {
            (true, true) => PadicNum::zero(self.p, self.val + o.val),
            (true, false) => PadicNum::zero(self.p, self.val + o.val),
            (false, true) => PadicNum::zero(self.p, self.val + o.val),
            _ => {
                let prec = self.prec.min(o.prec);
                PadicNum {
                    p: self.p,
                    val: self.val + o.val,
                    unit: (&self.unit * &o.unit).mod_floor(&ppow(self.p, prec)),
                    prec,
                }
            }
        }
    }

    /// Division; the divisor must be known to be nonzero.
    pub fn div(&self, o: &Self) -> Result<Self> {
        assert_eq!(self.p, o.p);
        if o.is_zero() || o.prec == 0 {
            return Err(Error::PrecisionLoss);
        }
        if self.is_zero() {
            return Ok(PadicNum::zero(self.p, self.val - o.val));
        }
        let prec = self.prec.min(o.prec);
        let m = ppow(self.p, prec);
        let inv = inv_mod_big(&o.unit, &m).ok_or(Error::NonInvertible)?;
        Ok(PadicNum {
            p: self.p,
            val: self.val - o.val,
            unit: (&self.unit * inv).mod_floor(&m),
            prec,
        })
    }

    /// Scale by an integer.
    pub fn scale(&self, n: &BigInt) -> Self {
        let big = PadicNum::from_int(n, self.p, self.prec.max(1) + 64);
        self.mul(&big)
    }

    /// Whether two numbers agree to the smaller of their absolute precisions
    /// (capped at `n` when given).
    pub fn agrees(&self, o: &Self, n: Option<i64>) -> bool {
        let mut abs = self.abs_precision().min(o.abs_precision());
        if let Some(n) = n {
            abs = abs.min(n);
        }
        let d = self.sub(o);
        d.is_zero() || d.valuation() >= abs
    }

    /// Decimal rendering `unit * p^val (prec)` for certificates.
    pub fn to_string_repr(&self) -> String {
        if self.is_zero() {
            return format!("O({}^{})", self.p, self.val);
        }
        format!(
            "{}*{}^{} + O({}^{})",
            self.unit,
            self.p,
            self.val,
            self.p,
            self.abs_precision()
        )
    }
}

impl fmt::Debug for PadicNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_repr())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SquareVerdict {
    Square,
    Nonsquare,
    Zero,
}

/// Square-class verdict in `Q_p`, with a square root when one exists.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareClass {
    pub verdict: SquareVerdict,
    pub witness: Option<PadicNum>,
}

impl SquareClass {
    pub fn is_square_or_zero(&self) -> bool {
        self.verdict != SquareVerdict::Nonsquare
    }
}

/// Square root of a `p`-adic unit modulo `p^k`, if the unit is a square.
/// For `p = 2` the root is only determined modulo `2^(k-1)`.
pub fn sqrt_unit_mod(u: &BigInt, p: u64, k: u32) -> Option<BigInt> {
    let bp = BigInt::from(p);
    if (u % &bp).is_zero() {
        return None;
    }
    if p == 2 {
        if u.mod_floor(&BigInt::from(8)) != BigInt::one() {
            return None;
        }
        let mut r = BigInt::one();
        for j in 3..k {
            // r^2 = u mod 2^j; fix the next bit
            let m = BigInt::one() << (j + 1);
            if (&r * &r - u).mod_floor(&m) != BigInt::zero() {
                r += BigInt::one() << (j - 1);
            }
        }
        return Some(r.mod_floor(&(BigInt::one() << k.saturating_sub(1))));
    }
    let r0 = sqrt_mod_p(u.mod_floor(&bp).try_into().unwrap(), p)?;
    let mut r = BigInt::from(r0);
    let mut m = bp.clone();
    let target = ppow(p, k);
    while m < target {
        m = (&m * &m).min(target.clone());
        let inv = inv_mod_big(&(BigInt::from(2) * &r), &m)?;
        r = (&r - (&r * &r - u) * inv).mod_floor(&m);
    }
    Some(r)
}

/// Decide whether `t` is a square in `Q_p`, with a root to
/// [`DEFAULT_PRECISION`] digits when it is.
pub fn sqclass_qp(t: &BigRational, p: u64) -> SquareClass {
    sqclass_qp_prec(t, p, DEFAULT_PRECISION)
}

pub fn sqclass_qp_prec(t: &BigRational, p: u64, k: u32) -> SquareClass {
    if t.is_zero() {
        return SquareClass {
            verdict: SquareVerdict::Zero,
            witness: None,
        };
    }
    let (en, un) = split_valuation(t.numer(), p);
    let (ed, ud) = split_valuation(t.denom(), p);
    let v = en as i64 - ed as i64;
    let nonsquare = SquareClass {
        verdict: SquareVerdict::Nonsquare,
        witness: None,
    };
    if v % 2 != 0 {
        return nonsquare;
    }
    let is_sq = if p == 2 {
        (&un * &ud).mod_floor(&BigInt::from(8)) == BigInt::one()
    } else {
        legendre(&(&un * &ud), p) == 1
    };
    if !is_sq {
        return nonsquare;
    }
    // root of the unit part un / ud
    let m = ppow(p, k + 1);
    let unit = (&un * inv_mod_big(&ud, &m).unwrap()).mod_floor(&m);
    let root = sqrt_unit_mod(&unit, p, k + 1).expect("square unit has a root");
    let rprec = if p == 2 { k } else { k + 1 };
    SquareClass {
        verdict: SquareVerdict::Square,
        witness: Some(PadicNum {
            p,
            val: v / 2,
            unit: root.mod_floor(&ppow(p, rprec)),
            prec: rprec,
        }),
    }
}
