//! Dense univariate polynomials over a [`Scalar`] ring.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense polynomial, coefficients in ascending degree order.
///
/// The zero polynomial has no coefficients; otherwise the last coefficient
/// is nonzero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero_elem()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    /// `x - a`
    pub fn linear_root(a: T) -> Self {
        let one = a.one_like();
        Poly::new(vec![-a, one])
    }

    /// The monomial `c x^n`.
    pub fn monomial(c: T, n: usize) -> Self {
        let mut v = vec![c.zero_like(); n + 1];
        v[n] = c;
        Poly::new(v)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the convention `deg 0 = -1`.
    pub fn deg(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn coeff(&self, i: usize) -> Option<&T> {
        self.coeffs.get(i)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one_elem())
    }

    pub fn eval(&self, x: &T) -> T {
        let mut it = self.coeffs.iter().rev();
        let Some(first) = it.next() else {
            return x.zero_like();
        };
        it.fold(first.clone(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn neg(&self) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(|a| -a.clone()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => a.clone() + b.clone(),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Poly::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero_elem() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let one = match self.coeffs.first() {
            Some(c) => Poly::constant(c.one_like()),
            None => return if e == 0 { panic!("0^0") } else { Poly::zero() },
        };
        let mut base = self.clone();
        let mut acc = one;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.square();
            e >>= 1;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.from_i64_like(i as i64) * c.clone())
                .collect(),
        )
    }

    /// Make monic; fails when the leading coefficient is not invertible.
    pub fn monic(&self) -> Result<Self> {
        match self.leading() {
            None => Ok(self.clone()),
            Some(lc) => Ok(self.scale(&lc.try_inv()?)),
        }
    }

    /// Euclidean division; the divisor's leading coefficient must be a unit.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let Some(dd) = d.degree() else {
            return Err(Error::ZeroPolynomial);
        };
        let inv = d.leading().unwrap().try_inv()?;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let zero = inv.zero_like();
        let mut q = vec![zero; r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = r[i + dd].clone() * inv.clone();
            if !c.is_zero_elem() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[i + j] = r[i + j].clone() - c.clone() * dc.clone();
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        Ok((Poly::new(q), Poly::new(r)))
    }

    pub fn rem(&self, d: &Self) -> Result<Self> {
        Ok(self.div_rem(d)?.1)
    }

    /// Exact division; errors when the remainder is nonzero.
    pub fn div_exact(&self, d: &Self) -> Result<Self> {
        let (q, r) = self.div_rem(d)?;
        if !r.is_zero() {
            return Err(Error::InvalidInput("inexact polynomial division".into()));
        }
        Ok(q)
    }

    /// Extended gcd over a field: returns monic `g` with `g = s a + t b`.
    ///
    /// Over rings with non-units (capped-precision residues) a non-invertible
    /// leading coefficient along the remainder sequence raises `NonInvertible`.
    pub fn xgcd(a: &Self, b: &Self) -> Result<(Self, Self, Self)> {
        let one_of = |p: &Self, q: &Self| -> Option<T> {
            p.coeffs.first().or(q.coeffs.first()).map(|c| c.one_like())
        };
        let Some(one) = one_of(a, b) else {
            return Ok((Poly::zero(), Poly::zero(), Poly::zero()));
        };
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::constant(one.clone()), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::constant(one));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1)?;
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.leading() {
            None => Ok((r0, s0, t0)),
            Some(lc) => {
                let inv = lc.try_inv()?;
                Ok((r0.scale(&inv), s0.scale(&inv), t0.scale(&inv)))
            }
        }
    }

    pub fn gcd(a: &Self, b: &Self) -> Result<Self> {
        Ok(Self::xgcd(a, b)?.0)
    }

    /// Map coefficients through a ring homomorphism.
    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn try_map<U: Scalar>(&self, f: impl Fn(&T) -> Result<U>) -> Result<Poly<U>> {
        Ok(Poly::new(
            self.coeffs.iter().map(f).collect::<Result<Vec<_>>>()?,
        ))
    }

    /// Compose with `x -> a + b x`.
    pub fn shift_scale(&self, a: &T, b: &T) -> Self {
        let lin = Poly::new(vec![a.clone(), b.clone()]);
        let mut acc = Poly::<T>::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&Poly::constant(c.clone()));
        }
        acc
    }

    /// Reverse with respect to a formal degree `n >= deg`: `x^n f(1/x)`.
    pub fn reverse(&self, n: usize) -> Self {
        let Some(first) = self.coeffs.first() else {
            return Poly::zero();
        };
        let zero = first.zero_like();
        let mut v = vec![zero; n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[n - i] = c.clone();
        }
        Poly::new(v)
    }
}

impl<T: Scalar + fmt::Debug> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero_elem() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c:?}")?,
                1 => write!(f, "({c:?})*x")?,
                _ => write!(f, "({c:?})*x^{i}")?,
            }
        }
        Ok(())
    }
}
