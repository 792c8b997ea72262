//! Genus-2 Jacobian arithmetic in Mumford representation on a monic quintic
//! model `Y^2 = F(X)`, with base point at infinity.

use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curve::{count_points_fp, count_points_fp2, make_curve, HypCurve};
use crate::error::{Error, Result};
use crate::factor::rational_roots;
use crate::fields::{Fp, Fp2, Zpk, ZpkModulus};
use crate::group::{group_structure, AbelianGroup, GroupStructure};
use crate::integer::exact_sqrt;
use crate::ipoly::{eval_rat, to_rat, IPoly};
use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::search::RatPoint;
use crate::serial;

/// Coordinate change from the original model to the odd model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OddMap {
    /// `X = lc x`, `Y = lc^2 y`.
    Scale {
        #[serde(with = "serial::big")]
        lc: BigInt,
    },
    /// `X = lc / (x - r)`, `Y = lc^2 d y / (x - r)^3`.
    Moebius {
        #[serde(with = "serial::rat")]
        r: BigRational,
        #[serde(with = "serial::big")]
        lc: BigInt,
        #[serde(with = "serial::big")]
        d: BigInt,
    },
}

/// Monic quintic model of a genus-2 curve, with the maps to and from the
/// original model.
#[derive(Debug, Clone)]
pub struct OddModel {
    pub original: HypCurve,
    pub curve: HypCurve,
    pub map: OddMap,
}

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Monic quintic model: rescale a quintic, or send a rational Weierstrass
/// point of a sextic to infinity.
pub fn to_odd_degree_model(curve: &HypCurve) -> Result<OddModel> {
    if curve.genus() != 2 {
        return Err(Error::InvalidInput("odd model needs genus 2".into()));
    }
    let f = curve.f();
    if curve.degree() == 5 {
        let lc = curve.leading().clone();
        let big_f = monicize(f, &lc);
        return Ok(OddModel {
            original: curve.clone(),
            curve: make_curve(big_f)?,
            map: OddMap::Scale { lc },
        });
    }
    let mut roots = rational_roots(f)?;
    roots.sort_by(|a, b| {
        let ha = a.numer().abs().max(a.denom().clone());
        let hb = b.numer().abs().max(b.denom().clone());
        ha.cmp(&hb).then(b.cmp(a))
    });
    let r = roots
        .into_iter()
        .next()
        .ok_or(Error::NoRationalWeierstrass)?;
    // g(t) = t^6 f(r + 1/t), a quintic with leading coefficient f'(r)
    let shifted = to_rat(f).shift_scale(&r, &rat(1));
    let g = shifted.reverse(6);
    let d = g
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let d2 = rat(&d * &d);
    let big_g: IPoly = g.map(|c| c * &d2).map(|c| c.to_integer());
    let lc = big_g.leading().unwrap().clone();
    let big_f = monicize(&big_g, &lc);
    Ok(OddModel {
        original: curve.clone(),
        curve: make_curve(big_f)?,
        map: OddMap::Moebius { r, lc, d },
    })
}

/// `lc^4 g(X / lc)` for a quintic `g` with leading coefficient `lc`.
fn monicize(g: &IPoly, lc: &BigInt) -> IPoly {
    let c = g.coeffs();
    Poly::new(
        (0..=5)
            .map(|i| {
                if i == 5 {
                    BigInt::one()
                } else {
                    &c[i] * lc.pow(4 - i as u32)
                }
            })
            .collect(),
    )
}

impl OddModel {
    /// Image of a point of the original model.
    pub fn to_odd(&self, p: &RatPoint) -> Result<RatPoint> {
        match (&self.map, p) {
            (OddMap::Scale { lc }, RatPoint::Affine { x, y }) => Ok(RatPoint::Affine {
                x: x * rat(lc.clone()),
                y: y * rat(lc * lc),
            }),
            (OddMap::Scale { .. }, RatPoint::Infinity { .. }) => Ok(RatPoint::Infinity { sign: 0 }),
            (OddMap::Moebius { r, lc, d }, RatPoint::Affine { x, y }) => {
                if x == r {
                    return Ok(RatPoint::Infinity { sign: 0 });
                }
                let t = (x - r).recip();
                Ok(RatPoint::Affine {
                    x: &t * rat(lc.clone()),
                    y: rat(lc * lc * d) * y * &t * &t * &t,
                })
            }
            (OddMap::Moebius { lc, d, .. }, RatPoint::Infinity { sign }) => {
                let a = exact_sqrt(self.original.leading())
                    .filter(|_| self.original.leading().is_positive())
                    .ok_or_else(|| Error::InvalidInput("no rational points at infinity".into()))?;
                Ok(RatPoint::Affine {
                    x: BigRational::zero(),
                    y: rat(lc * lc * d * a * BigInt::from(*sign)),
                })
            }
        }
    }

    /// Image of a point of the odd model on the original model.
    pub fn from_odd(&self, p: &RatPoint) -> Result<RatPoint> {
        match (&self.map, p) {
            (OddMap::Scale { lc }, RatPoint::Affine { x, y }) => Ok(RatPoint::Affine {
                x: x / rat(lc.clone()),
                y: y / rat(lc * lc),
            }),
            (OddMap::Scale { .. }, RatPoint::Infinity { .. }) => Ok(RatPoint::Infinity { sign: 0 }),
            (OddMap::Moebius { r, .. }, RatPoint::Infinity { .. }) => Ok(RatPoint::Affine {
                x: r.clone(),
                y: BigRational::zero(),
            }),
            (OddMap::Moebius { r, lc, d }, RatPoint::Affine { x, y }) => {
                if x.is_zero() {
                    let sign = if y.is_positive() { 1 } else { -1 };
                    return Ok(RatPoint::Infinity { sign });
                }
                Ok(RatPoint::Affine {
                    x: r + rat(lc.clone()) / x,
                    y: y * rat(lc.clone()) / (rat(d.clone()) * x * x * x),
                })
            }
        }
    }

    /// Jacobian over the rationals.
    pub fn jacobian_q(&self) -> Jacobian<BigRational> {
        Jacobian::new(to_rat(self.curve.f()))
    }

    /// Jacobian over `F_p`; `p` must be good for the odd model.
    pub fn jacobian_fp(&self, p: u64) -> Result<Jacobian<Fp>> {
        self.curve.check_good(p)?;
        Ok(Jacobian::new(self.curve.reduce_fp(p)))
    }

    /// Jacobian over `Z/p^k`.
    pub fn jacobian_zpk(&self, m: &std::sync::Arc<ZpkModulus>) -> Jacobian<Zpk> {
        Jacobian::new(self.curve.f().map(|c| Zpk::new(c, m)))
    }

    /// `[P - infinity]` for a rational point of the odd model.
    pub fn point_divisor(&self, p: &RatPoint) -> Result<MumfordDiv<BigRational>> {
        let jac = self.jacobian_q();
        match p {
            RatPoint::Infinity { .. } => Ok(jac.identity()),
            RatPoint::Affine { x, y } => {
                if y * y != eval_rat(self.curve.f(), x) {
                    return Err(Error::InvalidInput("point not on the odd model".into()));
                }
                Ok(jac.point(x.clone(), y.clone()))
            }
        }
    }
}

/// A class `[D - deg(D) infinity]` as `(u, v)`: `u` monic of degree at most
/// 2, `deg v < deg u`, `u | F - v^2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MumfordDiv<T: Scalar> {
    pub u: Poly<T>,
    pub v: Poly<T>,
}

/// The Jacobian of `Y^2 = F(X)`, `F` monic quintic, over the ring of `F`'s
/// coefficients.
#[derive(Debug, Clone)]
pub struct Jacobian<T: Scalar> {
    pub f: Poly<T>,
    one: T,
}

impl<T: Scalar> Jacobian<T> {
    pub fn new(f: Poly<T>) -> Self {
        let one = f.leading().expect("nonzero model").one_like();
        Jacobian { f, one }
    }

    pub fn one(&self) -> T {
        self.one.clone()
    }

    pub fn identity(&self) -> MumfordDiv<T> {
        MumfordDiv {
            u: Poly::constant(self.one.clone()),
            v: Poly::zero(),
        }
    }

    pub fn is_identity(&self, d: &MumfordDiv<T>) -> bool {
        d.u.deg() == 0
    }

    /// `[(x0, y0) - infinity]`.
    pub fn point(&self, x0: T, y0: T) -> MumfordDiv<T> {
        MumfordDiv {
            u: Poly::new(vec![-x0, self.one.clone()]),
            v: Poly::constant(y0),
        }
    }

    pub fn is_valid(&self, d: &MumfordDiv<T>) -> bool {
        d.u.is_monic()
            && d.u.deg() <= 2
            && d.v.deg() < d.u.deg()
            && self
                .f
                .sub(&d.v.square())
                .rem(&d.u)
                .map(|r| r.is_zero())
                .unwrap_or(false)
    }

    pub fn neg(&self, d: &MumfordDiv<T>) -> MumfordDiv<T> {
        MumfordDiv {
            u: d.u.clone(),
            v: d.v.neg(),
        }
    }

    /// Cantor composition followed by reduction.
    ///
    /// Coprime supports and doublings go through inverses modulo `u`, which
    /// only need unit resultants; other cases use the extended gcd chain.
    pub fn add(&self, a: &MumfordDiv<T>, b: &MumfordDiv<T>) -> Result<MumfordDiv<T>> {
        if a.u.deg() == 0 {
            return Ok(b.clone());
        }
        if b.u.deg() == 0 {
            return Ok(a.clone());
        }
        if a.u != b.u {
            if let Ok(s) = inv_mod_small(&a.u, &b.u) {
                let t = b.v.sub(&a.v).mul(&s).rem(&b.u)?;
                let u = a.u.mul(&b.u);
                let v = a.v.add(&a.u.mul(&t)).rem(&u)?;
                return self.reduce(u, v);
            }
        } else if a.v == b.v {
            if let Ok(s) = inv_mod_small(&a.v.add(&a.v), &a.u) {
                let k = self.f.sub(&a.v.square()).div_exact(&a.u)?;
                let k = k.mul(&s).rem(&a.u)?;
                let u = a.u.square();
                let v = a.v.add(&a.u.mul(&k)).rem(&u)?;
                return self.reduce(u, v);
            }
        }
        self.add_general(a, b)
    }

    fn add_general(&self, a: &MumfordDiv<T>, b: &MumfordDiv<T>) -> Result<MumfordDiv<T>> {
        let (d1, e1, e2) = Poly::xgcd(&a.u, &b.u)?;
        let (d, c1, c2) = Poly::xgcd(&d1, &a.v.add(&b.v))?;
        let s1 = c1.mul(&e1);
        let s2 = c1.mul(&e2);
        let u = a.u.mul(&b.u).div_exact(&d.square())?;
        let num = s1
            .mul(&a.u)
            .mul(&b.v)
            .add(&s2.mul(&b.u).mul(&a.v))
            .add(&c2.mul(&a.v.mul(&b.v).add(&self.f)));
        let v = num.div_exact(&d)?.rem(&u)?;
        self.reduce(u, v)
    }

    fn reduce(&self, mut u: Poly<T>, mut v: Poly<T>) -> Result<MumfordDiv<T>> {
        while u.deg() > 2 {
            let u2 = self.f.sub(&v.square()).div_exact(&u)?.monic()?;
            v = v.neg().rem(&u2)?;
            u = u2;
        }
        let u = u.monic()?;
        let v = v.rem(&u)?;
        Ok(MumfordDiv { u, v })
    }

    pub fn sub(&self, a: &MumfordDiv<T>, b: &MumfordDiv<T>) -> Result<MumfordDiv<T>> {
        self.add(a, &self.neg(b))
    }

    pub fn double(&self, a: &MumfordDiv<T>) -> Result<MumfordDiv<T>> {
        self.add(a, a)
    }

    /// `k a` by double-and-add; negative `k` negates.
    pub fn scalar_mul(&self, a: &MumfordDiv<T>, k: &BigInt) -> Result<MumfordDiv<T>> {
        let base = if k.is_negative() {
            self.neg(a)
        } else {
            a.clone()
        };
        let k = k.abs();
        let mut acc = self.identity();
        for i in (0..k.bits()).rev() {
            acc = self.double(&acc)?;
            if k.bit(i) {
                acc = self.add(&acc, &base)?;
            }
        }
        Ok(acc)
    }
}

impl<T: Scalar + Eq + Hash> AbelianGroup for Jacobian<T> {
    type Elem = MumfordDiv<T>;

    fn identity(&self) -> MumfordDiv<T> {
        Jacobian::identity(self)
    }

    fn op(&self, a: &MumfordDiv<T>, b: &MumfordDiv<T>) -> MumfordDiv<T> {
        self.add(a, b).expect("field arithmetic")
    }

    fn inv(&self, a: &MumfordDiv<T>) -> MumfordDiv<T> {
        self.neg(a)
    }

    fn is_identity(&self, a: &MumfordDiv<T>) -> bool {
        a.u.deg() == 0
    }
}

/// Inverse of `a` modulo monic `u` of degree 1 or 2 (norm formula);
/// `NonInvertible` when the resultant is not a unit.
pub fn inv_mod_small<T: Scalar>(a: &Poly<T>, u: &Poly<T>) -> Result<Poly<T>> {
    let a = a.rem(u)?;
    let one = u.leading().ok_or(Error::ZeroPolynomial)?.one_like();
    let zero = one.zero_like();
    match u.degree() {
        Some(1) => Ok(Poly::constant(
            a.coeff(0).cloned().unwrap_or(zero).try_inv()?,
        )),
        Some(2) => {
            let a0 = a.coeff(0).cloned().unwrap_or(zero.clone());
            let b = a.coeff(1).cloned().unwrap_or(zero);
            let c0 = u.coeffs()[0].clone();
            let c1 = u.coeffs()[1].clone();
            let norm = a0.clone() * a0.clone() - a0.clone() * b.clone() * c1.clone()
                + b.clone() * b.clone() * c0;
            let ni = norm.try_inv()?;
            Ok(Poly::new(vec![(a0 - b.clone() * c1) * ni.clone(), -b * ni]))
        }
        _ => Err(Error::InvalidInput("modulus degree must be 1 or 2".into())),
    }
}

/// `#J(F_p) = (N1^2 + N2)/2 - p` from point counts of the smooth model.
pub fn jac_order_fp(curve: &HypCurve, p: u64) -> Result<u64> {
    if curve.genus() != 2 {
        return Err(Error::InvalidInput("genus 2 required".into()));
    }
    curve.check_good(p)?;
    if p == 2 {
        return Err(Error::BadPrime(2));
    }
    let n1 = count_points_fp(curve, p)? as u128;
    let n2 = count_points_fp2(curve, p)? as u128;
    Ok(((n1 * n1 + n2) / 2 - p as u128) as u64)
}

/// All `v` (degree below 2) with `v^2 = F mod u` for monic quadratic `u`.
pub fn sqrt_mod_quadratic(f: &Poly<Fp>, u: &Poly<Fp>, p: u64) -> Vec<Poly<Fp>> {
    let c0 = u.coeffs()[0];
    let c1 = u.coeffs()[1];
    let two = Fp::new(2, p);
    let inv2 = two.try_inv().unwrap();
    let disc = c1 * c1 - Fp::new(4, p) * c0;
    let mut out = Vec::new();
    if disc.is_zero() {
        // u = (x - a)^2: Hensel lift of a square root at a
        let a = -c1 * inv2;
        let fa = f.eval(&a);
        if let Some(y0) = fa.sqrt().filter(|y| !y.is_zero()) {
            let df = f.derivative().eval(&a);
            for y in [y0, -y0] {
                let c = df * (two * y).try_inv().unwrap();
                out.push(Poly::new(vec![y - c * a, c]));
            }
        }
    } else if disc.chi() == 1 {
        let s = disc.sqrt().unwrap();
        let a = (-c1 + s) * inv2;
        let b = (-c1 - s) * inv2;
        let ya = f.eval(&a).sqrt();
        let yb = f.eval(&b).sqrt();
        if let (Some(ya), Some(yb)) = (ya, yb) {
            let mut las = vec![ya];
            if !ya.is_zero() {
                las.push(-ya);
            }
            let mut lbs = vec![yb];
            if !yb.is_zero() {
                lbs.push(-yb);
            }
            let inv = (a - b).try_inv().unwrap();
            for &va in &las {
                for &vb in &lbs {
                    let slope = (va - vb) * inv;
                    out.push(Poly::new(vec![va - slope * a, slope]));
                }
            }
        }
    } else {
        // irreducible: alpha = (-c1 + m s)/2 in F_p[s]/(s^2 - nu)
        let ctx = Fp2::zero(p).expect("odd prime");
        let nu = Fp::new(ctx.nonresidue(), p);
        let m = (disc * nu.try_inv().unwrap()).sqrt().unwrap();
        let alpha_a = -c1 * inv2;
        let alpha_b = m * inv2;
        let alpha = ctx.new(alpha_a.value(), alpha_b.value());
        let fe = f.map(|c| ctx.from_fp(*c));
        if let Some(y) = fe.eval(&alpha).sqrt() {
            let mut ys = vec![y];
            if !y.is_zero() {
                ys.push(-y);
            }
            let binv = alpha_b.try_inv().unwrap();
            for y in ys {
                let (y0, y1) = y.parts();
                let v1 = Fp::new(y1, p) * binv;
                let v0 = Fp::new(y0, p) - v1 * alpha_a;
                out.push(Poly::new(vec![v0, v1]));
            }
        }
    }
    out
}

/// A uniformly random element of `J(F_p)`.
pub fn random_divisor(jac: &Jacobian<Fp>, rng: &mut impl Rng) -> MumfordDiv<Fp> {
    let p = jac.f.coeffs()[0].modulus();
    loop {
        let k = rng.gen_range(0..p * p + p + 1);
        let pick = rng.gen_range(0..4usize);
        if k == 0 {
            if pick == 0 {
                return jac.identity();
            }
            continue;
        }
        if k <= p {
            let a = Fp::new(k - 1, p);
            let fa = jac.f.eval(&a);
            let Some(y) = fa.sqrt() else { continue };
            let ys = if y.is_zero() { vec![y] } else { vec![y, -y] };
            if let Some(&y) = ys.get(pick) {
                return jac.point(a, y);
            }
            continue;
        }
        let k = k - p - 1;
        let u = Poly::new(vec![Fp::new(k % p, p), Fp::new(k / p, p), Fp::new(1, p)]);
        let vs = sqrt_mod_quadratic(&jac.f, &u, p);
        if let Some(v) = vs.into_iter().nth(pick) {
            return MumfordDiv { u, v };
        }
    }
}

/// `J(F_p)` with its invariant factors, a basis and discrete logarithms.
#[derive(Debug, Clone)]
pub struct JacGroupFp {
    pub p: u64,
    pub order: u64,
    pub jac: Jacobian<Fp>,
    pub structure: GroupStructure<MumfordDiv<Fp>>,
}

impl JacGroupFp {
    pub fn invariants(&self) -> &[u64] {
        &self.structure.invariants
    }

    pub fn basis(&self) -> &[MumfordDiv<Fp>] {
        &self.structure.basis
    }

    pub fn dlog(&self, d: &MumfordDiv<Fp>) -> Option<Vec<u64>> {
        self.structure.dlog(&self.jac, d)
    }

    pub fn element(&self, coords: &[u64]) -> MumfordDiv<Fp> {
        self.structure.element(&self.jac, coords)
    }
}

/// Group structure of `J(F_p)` for the odd model; deterministic in `seed`.
pub fn group_structure_fp(model: &OddModel, p: u64, seed: u64) -> Result<JacGroupFp> {
    let order = jac_order_fp(&model.curve, p)?;
    let jac = model.jacobian_fp(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut sample = || random_divisor(&jac, &mut rng);
    let structure = group_structure(&jac, order, &mut sample)?;
    Ok(JacGroupFp {
        p,
        order,
        jac,
        structure,
    })
}

/// Coefficient-wise reduction of a rational divisor modulo `p`.
pub fn reduce_div(d: &MumfordDiv<BigRational>, p: u64) -> Result<MumfordDiv<Fp>> {
    let red = |c: &BigRational| Fp::from_rational(c, p).map_err(|_| Error::BadReduction(p));
    Ok(MumfordDiv {
        u: d.u.try_map(red)?,
        v: d.v.try_map(red)?,
    })
}

/// Image of a rational divisor in `J(Z/p^k)`.
pub fn reduce_div_zpk(
    d: &MumfordDiv<BigRational>,
    m: &std::sync::Arc<ZpkModulus>,
) -> Result<MumfordDiv<Zpk>> {
    let red = |c: &BigRational| Zpk::from_rational(c, m);
    Ok(MumfordDiv {
        u: d.u.try_map(red)?,
        v: d.v.try_map(red)?,
    })
}

/// Serialized divisor: field tag and ascending coefficient lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivRecord {
    /// `"Q"` or `"F_p"` with the prime written out.
    pub field: String,
    pub u: Vec<String>,
    pub v: Vec<String>,
}

impl DivRecord {
    pub fn from_q(d: &MumfordDiv<BigRational>) -> Self {
        DivRecord {
            field: "Q".into(),
            u: d.u.coeffs().iter().map(serial::rat_to_string).collect(),
            v: d.v.coeffs().iter().map(serial::rat_to_string).collect(),
        }
    }

    pub fn from_fp(d: &MumfordDiv<Fp>, p: u64) -> Self {
        DivRecord {
            field: format!("F_{p}"),
            u: d.u.coeffs().iter().map(|c| c.value().to_string()).collect(),
            v: d.v.coeffs().iter().map(|c| c.value().to_string()).collect(),
        }
    }

    pub fn to_q(&self) -> Result<MumfordDiv<BigRational>> {
        if self.field != "Q" {
            return Err(Error::InvalidInput(format!("field tag {}", self.field)));
        }
        let parse = |v: &[String]| -> Result<Poly<BigRational>> {
            Ok(Poly::new(
                v.iter()
                    .map(|s| {
                        serial::rat_from_str(s)
                            .ok_or_else(|| Error::InvalidInput(format!("coefficient {s:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?,
            ))
        };
        Ok(MumfordDiv {
            u: parse(&self.u)?,
            v: parse(&self.v)?,
        })
    }

    pub fn to_fp(&self) -> Result<(MumfordDiv<Fp>, u64)> {
        let p: u64 = self
            .field
            .strip_prefix("F_")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::InvalidInput(format!("field tag {}", self.field)))?;
        let parse = |v: &[String]| -> Result<Poly<Fp>> {
            Ok(Poly::new(
                v.iter()
                    .map(|s| {
                        s.parse::<BigInt>()
                            .map(|n| Fp::from_bigint(&n, p))
                            .map_err(|_| Error::InvalidInput(format!("coefficient {s:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?,
            ))
        };
        Ok((
            MumfordDiv {
                u: parse(&self.u)?,
                v: parse(&self.v)?,
            },
            p,
        ))
    }

    /// One JSON object per line.
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_line(line: &str) -> Result<Self> {
        serde_json::from_str(line).map_err(|e| Error::Parse {
            pos: e.column(),
            msg: e.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ipoly::from_desc;

    fn x5p1() -> OddModel {
        to_odd_degree_model(&make_curve(from_desc(&[1, 0, 0, 0, 0, 1])).unwrap()).unwrap()
    }

    #[test]
    fn quintic_model_unchanged() {
        let m = x5p1();
        assert_eq!(m.curve.f(), m.original.f());
    }

    #[test]
    fn sextic_without_linear_factor_rejected() {
        let c = make_curve(from_desc(&[-1, -2, -1, -1, -2, -1, 2])).unwrap();
        assert_eq!(
            to_odd_degree_model(&c).unwrap_err(),
            Error::NoRationalWeierstrass
        );
    }

    #[test]
    fn sextic_maps_round_trip() {
        let c = make_curve(from_desc(&[1, 0, 0, 0, 0, 0, -1])).unwrap();
        let m = to_odd_degree_model(&c).unwrap();
        assert_eq!(m.curve.degree(), 5);
        let pts = [
            RatPoint::Affine {
                x: rat(-1),
                y: rat(0),
            },
            RatPoint::Affine {
                x: rat(1),
                y: rat(0),
            },
            RatPoint::Infinity { sign: 1 },
            RatPoint::Infinity { sign: -1 },
        ];
        for pt in pts {
            let q = m.to_odd(&pt).unwrap();
            assert!(q.verify(&m.curve), "{q:?}");
            assert_eq!(m.from_odd(&q).unwrap(), pt);
        }
    }

    #[test]
    fn order_five_point() {
        let m = x5p1();
        let jac = m.jacobian_q();
        let d = m
            .point_divisor(&RatPoint::Affine {
                x: rat(0),
                y: rat(1),
            })
            .unwrap();
        let five = jac.scalar_mul(&d, &BigInt::from(5)).unwrap();
        assert!(jac.is_identity(&five));
        let two = jac.scalar_mul(&d, &BigInt::from(2)).unwrap();
        assert!(!jac.is_identity(&two));
        assert!(jac.is_valid(&two));
    }

    #[test]
    fn structure_product_is_order() {
        let m = x5p1();
        for p in [3u64, 7, 11, 13] {
            let g = group_structure_fp(&m, p, 1).unwrap();
            assert_eq!(g.invariants().iter().product::<u64>(), g.order);
            let mut rng = ChaCha8Rng::seed_from_u64(p);
            for _ in 0..20 {
                let d = random_divisor(&g.jac, &mut rng);
                assert!(g.jac.is_valid(&d));
                let c = g.dlog(&d).unwrap();
                assert_eq!(g.element(&c), d);
            }
        }
    }

    #[test]
    fn records_round_trip() {
        let m = x5p1();
        let d = m
            .point_divisor(&RatPoint::Affine {
                x: rat(-1),
                y: rat(0),
            })
            .unwrap();
        let line = DivRecord::from_q(&d).to_line();
        assert_eq!(DivRecord::from_line(&line).unwrap().to_q().unwrap(), d);
        let r = reduce_div(&d, 7).unwrap();
        let (back, p) = DivRecord::from_fp(&r, 7).to_fp().unwrap();
        assert_eq!((back, p), (r, 7));
    }
}
