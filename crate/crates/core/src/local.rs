//! Local solvability of `d_i u_i^2 = G_i(x)` systems over `R` and `Q_p`.
//!
//! A system is a list of integer polynomials `G_1, ..., G_k`; a local point
//! is an `x` in `P^1` with every `G_i(x)` a square (zero allowed). On the
//! inverted chart `z = 1/x` each `G_i` is replaced by its reversal to the
//! next even degree, which changes values by an even power of `z`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::curve::HypCurve;
use crate::error::{Error, Result};
use crate::fields::{Fp, MAX_FP_PRIME};
use crate::integer::{is_prime_u64, legendre, primes_up_to, split_valuation, valuation};
use crate::ipoly::{content, discriminant, eval_rat, IPoly};
use crate::padic::{sqclass_qp, SquareVerdict};
use crate::poly::Poly;
use crate::real::sample_points;
use crate::serial;

/// Residue enumeration is skipped above this prime; only the integer scan runs.
pub const ENUMERATION_LIMIT: u64 = 1 << 24;

const SCAN_RADIUS: i64 = 64;
const LARGE_PRIME_SCAN_RADIUS: i64 = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Real,
    Prime(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "REAL"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

impl Serialize for Place {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Place {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "REAL" {
            return Ok(Place::Real);
        }
        s.parse()
            .map(Place::Prime)
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Chart {
    /// `x` itself; `x` in `Z_p` at a prime.
    Affine,
    /// `z = 1/x`; `z` in `p Z_p` at a prime.
    Inverted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Evidence {
    /// Every value is a square (zero allowed) at the coordinate.
    Square,
    /// Polynomial `index` has a Hensel root in the disc; the others are
    /// squares throughout it.
    Root { index: usize },
}

/// Evidence of a local point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalWitness {
    pub place: Place,
    pub chart: Chart,
    #[serde(with = "serial::rat")]
    pub coord: BigRational,
    /// The witness holds on the disc `coord + p^k Z_p`; `None` for an exact
    /// coordinate.
    pub disc_exponent: Option<u32>,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LeafReason {
    OddValuation,
    Nonresidue,
}

/// A disc `center + p^k Z_p` on which polynomial `poly` takes only
/// non-square values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefutationLeaf {
    pub chart: Chart,
    #[serde(with = "serial::big")]
    pub center: BigInt,
    pub k: u32,
    pub poly: usize,
    pub reason: LeafReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Refutation {
    /// Sample points covering every sign region; each has a negative value.
    Real {
        #[serde(with = "rat_vec")]
        samples: Vec<BigRational>,
    },
    /// The exhausted disc tree, as its leaves.
    Padic {
        depth_bound: u32,
        leaves: Vec<RefutationLeaf>,
    },
}

mod rat_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: serde::Serializer>(
        v: &[BigRational],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&serial::rat_to_string(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<BigRational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| {
                serial::rat_from_str(s)
                    .ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
            })
            .collect()
    }
}

/// Outcome at one place.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalResult {
    pub place: Place,
    pub solvable: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<LocalWitness>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub refutation: Option<Refutation>,
}

/// `x^n G(1/x)` with `n` the least even integer `>= deg G`.
pub fn reverse_even(g: &IPoly) -> IPoly {
    let d = g.degree().unwrap_or(0);
    g.reverse(d + d % 2)
}

fn chart_polys(polys: &[IPoly], chart: Chart) -> Vec<IPoly> {
    match chart {
        Chart::Affine => polys.to_vec(),
        Chart::Inverted => polys.iter().map(reverse_even).collect(),
    }
}

fn is_square_or_zero_qp(v: &BigRational, p: u64) -> bool {
    sqclass_qp(v, p).verdict != SquareVerdict::Nonsquare
}

/// Depth cap `v_p(disc) + 2 v_p(4) + 3` for the product of the chart polynomials.
pub fn depth_bound(chart_polys: &[IPoly], p: u64) -> Result<u32> {
    let prod = chart_polys
        .iter()
        .filter(|g| g.deg() >= 1)
        .fold(Poly::constant(BigInt::one()), |a, g| a.mul(g));
    let vd = if prod.deg() >= 2 {
        let d = discriminant(&prod)?;
        if d.is_zero() {
            return Err(Error::NotSquarefree);
        }
        valuation(&d, p)
    } else {
        0
    };
    Ok(vd + 2 * valuation(&BigInt::from(4), p) + 3)
}

// ----- real place -----

/// Solvability of the system over `R`.
pub fn solve_real(polys: &[IPoly]) -> LocalResult {
    let ok = |x: &BigRational| polys.iter().all(|g| !eval_rat(g, x).is_negative());
    let small = (0..=10i64).flat_map(|n| if n == 0 { vec![0] } else { vec![n, -n] });
    for n in small {
        let x = BigRational::from_integer(BigInt::from(n));
        if ok(&x) {
            return real_yes(x);
        }
    }
    let samples = sample_points(polys);
    for x in &samples {
        if ok(x) {
            return real_yes(x.clone());
        }
    }
    LocalResult {
        place: Place::Real,
        solvable: false,
        witness: None,
        refutation: Some(Refutation::Real { samples }),
    }
}

fn real_yes(x: BigRational) -> LocalResult {
    LocalResult {
        place: Place::Real,
        solvable: true,
        witness: Some(LocalWitness {
            place: Place::Real,
            chart: Chart::Affine,
            coord: x,
            disc_exponent: None,
            evidence: Evidence::Square,
        }),
        refutation: None,
    }
}

// ----- p-adic place -----

#[derive(Debug, Clone, Copy, PartialEq)]
enum Class {
    Square,
    NonSquare(LeafReason),
    Undetermined { simple_root: bool },
}

struct Disc {
    chart: Chart,
    center: BigInt,
    k: u32,
    depth: u32,
    /// `(original index, parity of stripped p-power, G(center + p^k t))`
    polys: Vec<(usize, u32, IPoly)>,
}

struct PadicSolver {
    p: u64,
    bp: BigInt,
    bound: u32,
    leaves: Vec<RefutationLeaf>,
}

fn eval_mod(h: &IPoly, t: &BigInt, m: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in h.coeffs().iter().rev() {
        acc = (acc * t + c).mod_floor(m);
    }
    acc
}

impl PadicSolver {
    fn classify(&self, parity: u32, h: &IPoly, hp: &Poly<Fp>, dhp: &Poly<Fp>, t0: u64) -> Class {
        let p = self.p;
        if p == 2 {
            let t = BigInt::from(t0);
            let two = BigInt::from(2);
            if eval_mod(h, &t, &two).is_zero() {
                let d = h.derivative();
                return Class::Undetermined {
                    simple_root: !eval_mod(&d, &t, &two).is_zero(),
                };
            }
            if parity == 1 {
                return Class::NonSquare(LeafReason::OddValuation);
            }
            let eight = BigInt::from(8);
            let ones = (0..4u64)
                .filter(|s| eval_mod(h, &BigInt::from(t0 + 2 * s), &eight).is_one())
                .count();
            return match ones {
                4 => Class::Square,
                0 => Class::NonSquare(LeafReason::Nonresidue),
                _ => Class::Undetermined { simple_root: false },
            };
        }
        let x = Fp::new(t0, p);
        let v = hp.eval(&x);
        if v.is_zero() {
            return Class::Undetermined {
                simple_root: !dhp.eval(&x).is_zero(),
            };
        }
        if parity == 1 {
            Class::NonSquare(LeafReason::OddValuation)
        } else if v.chi() == 1 {
            Class::Square
        } else {
            Class::NonSquare(LeafReason::Nonresidue)
        }
    }

    fn solve(&mut self, disc: Disc) -> Result<Option<LocalWitness>> {
        let p = self.p;
        // strip p-power content
        let stripped: Vec<(usize, u32, IPoly)> = disc
            .polys
            .iter()
            .map(|(i, par, g)| {
                let c = content(g);
                let (e, _) = split_valuation(&c, p);
                let h = if e == 0 {
                    g.clone()
                } else {
                    let pe = self.bp.pow(e);
                    g.map(|a| a / &pe)
                };
                (*i, (par + e) % 2, h)
            })
            .collect();
        let reduced: Vec<(Poly<Fp>, Poly<Fp>)> = stripped
            .iter()
            .map(|(_, _, h)| {
                if p == 2 {
                    (Poly::zero(), Poly::zero())
                } else {
                    let hp = h.map(|c| Fp::from_bigint(c, p));
                    let dhp = hp.derivative();
                    (hp, dhp)
                }
            })
            .collect();
        let pk = self.bp.pow(disc.k);
        for t0 in 0..p {
            let classes: Vec<Class> = stripped
                .iter()
                .zip(&reduced)
                .map(|((_, par, h), (hp, dhp))| self.classify(*par, h, hp, dhp, t0))
                .collect();
            let center = &disc.center + &pk * BigInt::from(t0);
            if let Some(pos) = classes
                .iter()
                .position(|c| matches!(c, Class::NonSquare(_)))
            {
                let Class::NonSquare(reason) = classes[pos] else {
                    unreachable!()
                };
                self.leaves.push(RefutationLeaf {
                    chart: disc.chart,
                    center: center.clone(),
                    k: disc.k + 1,
                    poly: stripped[pos].0,
                    reason,
                });
                continue;
            }
            let undet: Vec<usize> = classes
                .iter()
                .enumerate()
                .filter(|(_, c)| matches!(c, Class::Undetermined { .. }))
                .map(|(j, _)| j)
                .collect();
            if undet.is_empty() {
                return Ok(Some(self.witness(&disc, center, Evidence::Square)));
            }
            if undet.len() == 1 {
                if let Class::Undetermined { simple_root: true } = classes[undet[0]] {
                    let index = stripped[undet[0]].0;
                    return Ok(Some(self.witness(&disc, center, Evidence::Root { index })));
                }
            }
            if disc.depth + 1 > self.bound {
                return Err(Error::DepthExceeded {
                    p,
                    bound: self.bound,
                });
            }
            let shift = BigInt::from(t0);
            let child_polys = undet
                .iter()
                .map(|&j| {
                    let (i, par, h) = &stripped[j];
                    (*i, *par, h.shift_scale(&shift, &self.bp))
                })
                .collect();
            let child = Disc {
                chart: disc.chart,
                center,
                k: disc.k + 1,
                depth: disc.depth + 1,
                polys: child_polys,
            };
            if let Some(w) = self.solve(child)? {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }

    // Square evidence holds on center + p^(k+1) Z_p; a root witness records
    // the parent exponent k, where the stripped polynomial at t = 0 has a
    // simple root mod p.
    fn witness(&self, disc: &Disc, center: BigInt, evidence: Evidence) -> LocalWitness {
        let k = match evidence {
            Evidence::Square => disc.k + 1,
            Evidence::Root { .. } => disc.k,
        };
        LocalWitness {
            place: Place::Prime(self.p),
            chart: disc.chart,
            coord: BigRational::from_integer(center),
            disc_exponent: Some(k),
            evidence,
        }
    }
}

fn scan_witness(polys: &[IPoly], p: u64, radius: i64) -> Option<LocalWitness> {
    for n in 0..=radius {
        for x in if n == 0 { vec![0] } else { vec![n, -n] } {
            let xr = BigRational::from_integer(BigInt::from(x));
            let vals: Vec<BigRational> = polys.iter().map(|g| eval_rat(g, &xr)).collect();
            if vals.iter().all(|v| is_square_or_zero_qp(v, p)) {
                return Some(LocalWitness {
                    place: Place::Prime(p),
                    chart: Chart::Affine,
                    coord: xr,
                    disc_exponent: None,
                    evidence: Evidence::Square,
                });
            }
        }
    }
    None
}

/// Solvability of the system over `Q_p`.
pub fn solve_qp(polys: &[IPoly], p: u64) -> Result<LocalResult> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    let radius = if p > ENUMERATION_LIMIT {
        LARGE_PRIME_SCAN_RADIUS
    } else {
        SCAN_RADIUS
    };
    if let Some(w) = scan_witness(polys, p, radius) {
        return Ok(yes(p, w));
    }
    if p > ENUMERATION_LIMIT || p >= MAX_FP_PRIME {
        return Err(Error::PrimeTooLarge(p));
    }
    let mut leaves = Vec::new();
    let mut max_bound = 0;
    for chart in [Chart::Affine, Chart::Inverted] {
        let cp = chart_polys(polys, chart);
        let bound = depth_bound(&cp, p)?;
        max_bound = max_bound.max(bound);
        let bp = BigInt::from(p);
        let (k, start): (u32, Vec<IPoly>) = match chart {
            Chart::Affine => (0, cp),
            Chart::Inverted => (
                1,
                cp.iter()
                    .map(|g| g.shift_scale(&BigInt::zero(), &bp))
                    .collect(),
            ),
        };
        let mut solver = PadicSolver {
            p,
            bp,
            bound,
            leaves: Vec::new(),
        };
        let disc = Disc {
            chart,
            center: BigInt::zero(),
            k,
            depth: 0,
            polys: start
                .into_iter()
                .enumerate()
                .map(|(i, g)| (i, 0, g))
                .collect(),
        };
        if let Some(w) = solver.solve(disc)? {
            return Ok(yes(p, w));
        }
        leaves.extend(solver.leaves);
    }
    Ok(LocalResult {
        place: Place::Prime(p),
        solvable: false,
        witness: None,
        refutation: Some(Refutation::Padic {
            depth_bound: max_bound,
            leaves,
        }),
    })
}

fn yes(p: u64, w: LocalWitness) -> LocalResult {
    LocalResult {
        place: Place::Prime(p),
        solvable: true,
        witness: Some(w),
        refutation: None,
    }
}

/// Re-check a witness against the system, independently of the search.
pub fn replay_witness(polys: &[IPoly], w: &LocalWitness) -> bool {
    let cp = chart_polys(polys, w.chart);
    let x = &w.coord;
    match w.place {
        Place::Real => cp.iter().all(|g| !eval_rat(g, x).is_negative()),
        Place::Prime(p) => {
            if w.chart == Chart::Inverted && !x.is_zero() && valuation_rat(x, p) < 1 {
                return false;
            }
            match &w.evidence {
                Evidence::Square => cp.iter().all(|g| is_square_or_zero_qp(&eval_rat(g, x), p)),
                Evidence::Root { index } => {
                    let Some(k) = w.disc_exponent else {
                        return eval_rat(&cp[*index], x).is_zero();
                    };
                    if !x.is_integer() {
                        return false;
                    }
                    let c = x.to_integer();
                    let bp = BigInt::from(p);
                    // G(c + p^k t) / content: root mod p with unit derivative
                    let h = cp[*index].shift_scale(&c, &bp.pow(k));
                    let cont = content(&h);
                    let (e, _) = split_valuation(&cont, p);
                    let pe = bp.pow(e);
                    let h = h.map(|a| a / &pe);
                    let h0 = h.coeff(0).cloned().unwrap_or_default();
                    let h1 = h.coeff(1).cloned().unwrap_or_default();
                    let hensel = (&h0 % &bp).is_zero() && !(&h1 % &bp).is_zero();
                    hensel
                        && cp
                            .iter()
                            .enumerate()
                            .all(|(i, g)| i == *index || is_square_or_zero_qp(&eval_rat(g, x), p))
                }
            }
        }
    }
}

fn valuation_rat(x: &BigRational, p: u64) -> i64 {
    valuation(x.numer(), p) as i64 - valuation(x.denom(), p) as i64
}

/// Independent check of a p-adic refutation: the leaves cover `Z_p` (affine)
/// and `p Z_p` (inverted), and each leaf is a non-square disc.
pub fn replay_refutation(polys: &[IPoly], p: u64, leaves: &[RefutationLeaf]) -> bool {
    let bp = BigInt::from(p);
    for leaf in leaves {
        let g = &chart_polys(polys, leaf.chart)[leaf.poly];
        let h = g.shift_scale(&leaf.center, &bp.pow(leaf.k));
        let (e, _) = split_valuation(&content(&h), p);
        let pe = bp.pow(e);
        let h = h.map(|a| a / &pe);
        let ok = match leaf.reason {
            LeafReason::OddValuation => {
                e % 2 == 1 && (0..p).all(|t| !eval_mod(&h, &BigInt::from(t), &bp).is_zero())
            }
            LeafReason::Nonresidue => e % 2 == 0 && unit_nonsquare_on_disc(&h, p),
        };
        if !ok {
            return false;
        }
    }
    for (chart, c0, k0) in [
        (Chart::Affine, BigInt::zero(), 0u32),
        (Chart::Inverted, BigInt::zero(), 1u32),
    ] {
        let ls: Vec<&RefutationLeaf> = leaves.iter().filter(|l| l.chart == chart).collect();
        if !covers(&ls, &c0, k0, p) {
            return false;
        }
    }
    true
}

// h(t) takes unit non-square values for every t in Z_p.
fn unit_nonsquare_on_disc(h: &IPoly, p: u64) -> bool {
    let bp = BigInt::from(p);
    // h(t) mod p (mod 8 at p = 2) depends only on t mod p (mod 8)
    if p == 2 {
        let eight = BigInt::from(8);
        (0..8u64).all(|t| {
            let v = eval_mod(h, &BigInt::from(t), &eight);
            !(&v % 2u32).is_zero() && v.mod_floor(&eight) != BigInt::one()
        })
    } else {
        (0..p).all(|t| {
            let v = eval_mod(h, &BigInt::from(t), &bp);
            !v.is_zero() && legendre(&v, p) == -1
        })
    }
}

fn covers(leaves: &[&RefutationLeaf], center: &BigInt, k: u32, p: u64) -> bool {
    let pk = BigInt::from(p).pow(k);
    let m = center.mod_floor(&pk);
    if leaves.iter().any(|l| {
        l.k <= k
            && (center - &l.center)
                .mod_floor(&BigInt::from(p).pow(l.k))
                .is_zero()
    }) {
        return true;
    }
    let deeper: Vec<&RefutationLeaf> = leaves
        .iter()
        .copied()
        .filter(|l| l.k > k && (&l.center - &m).mod_floor(&pk).is_zero())
        .collect();
    if deeper.is_empty() {
        return false;
    }
    (0..p).all(|t| covers(&deeper, &(&m + &pk * BigInt::from(t)), k + 1, p))
}

// ----- curves -----

/// Primes `p < 4 g^2`, below which the Weil bound does not force a smooth
/// point at a good prime.
pub fn weil_small_primes(genus: usize) -> Vec<u64> {
    let g = genus as u64;
    primes_up_to(4 * g * g - 1)
}

pub fn solvable_r(curve: &HypCurve) -> LocalResult {
    solve_real(std::slice::from_ref(curve.f()))
}

pub fn solvable_qp(curve: &HypCurve, p: u64) -> Result<LocalResult> {
    solve_qp(std::slice::from_ref(curve.f()), p)
}

/// The finite set of primes that need testing: bad primes and small primes.
pub fn local_test_primes(curve: &HypCurve) -> Vec<u64> {
    let mut ps: Vec<u64> = curve.bad_primes().to_vec();
    ps.extend(weil_small_primes(curve.genus()));
    ps.sort_unstable();
    ps.dedup();
    ps
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElsReport {
    pub verdict: bool,
    pub places: Vec<LocalResult>,
}

/// Everywhere-local solvability; stops at the first failing place.
pub fn everywhere_locally(curve: &HypCurve) -> Result<ElsReport> {
    let mut places = vec![solvable_r(curve)];
    if !places[0].solvable {
        return Ok(ElsReport {
            verdict: false,
            places,
        });
    }
    for p in local_test_primes(curve) {
        let r = solvable_qp(curve, p)?;
        let ok = r.solvable;
        places.push(r);
        if !ok {
            return Ok(ElsReport {
                verdict: false,
                places,
            });
        }
    }
    Ok(ElsReport {
        verdict: true,
        places,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::make_curve;
    use crate::ipoly::from_desc;

    fn golden() -> IPoly {
        // -(x^2+x-1)(x^4+x^3+x^2+x+2)
        from_desc(&[-1, -2, -1, -1, -2, -1, 2])
    }

    #[test]
    fn golden_is_els() {
        let c = make_curve(golden()).unwrap();
        let r = everywhere_locally(&c).unwrap();
        assert!(r.verdict);
        for pl in &r.places {
            assert!(replay_witness(
                std::slice::from_ref(c.f()),
                pl.witness.as_ref().unwrap()
            ));
        }
    }

    #[test]
    fn negative_definite_fails_at_real() {
        let c = make_curve(from_desc(&[-1, 0, 0, 0, 0, 0, -1])).unwrap();
        let r = everywhere_locally(&c).unwrap();
        assert!(!r.verdict);
        assert_eq!(r.places[0].place, Place::Real);
        assert!(solvable_r(&make_curve(from_desc(&[-1, 0, 0, 0, 0, 0, 1])).unwrap()).solvable);
    }

    #[test]
    fn refutation_at_three() {
        // y^2 = 3(x^6 + x + 1)... use a system that fails: d = 1 twist of the
        // golden split at p = 3
        let g = from_desc(&[-1, -1, 1]);
        let h = from_desc(&[1, 1, 1, 1, 2]);
        let r = solve_qp(&[g.clone(), h.clone()], 3).unwrap();
        assert!(!r.solvable);
        let Some(Refutation::Padic { leaves, .. }) = &r.refutation else {
            panic!()
        };
        assert!(replay_refutation(&[g, h], 3, leaves));
    }

    #[test]
    fn reverse_even_degrees() {
        let f = from_desc(&[1, 0, 0, 0, 0, 1]);
        assert_eq!(reverse_even(&f), from_desc(&[1, 0, 0, 0, 0, 1, 0]));
        assert_eq!(weil_small_primes(2), vec![2, 3, 5, 7, 11, 13]);
    }
}
