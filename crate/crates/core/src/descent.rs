//! Two-cover descent for `y^2 = g(x) h(x)`.
//!
//! Each rational point lifts to a twist `d u^2 = g(x), d v^2 = h(x)` with
//! squarefree `d` supported on the primes where `g` and `h` can share a root
//! mod p. If no twist of some factorization has points everywhere locally,
//! the curve has no rational points.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::HypCurve;
use crate::error::{Error, Result};
use crate::factor::factor_ipoly;
use crate::integer::{prime_support, primes_up_to};
use crate::ipoly::{resultant, IPoly};
use crate::local::{solve_qp, solve_real, LocalResult, Place};
use crate::poly::Poly;
use crate::serial;

/// Primes below which a good prime can fail to have local points on a twist
/// (genus up to 5, bound `4 g^2`).
pub const TWIST_SMALL_PRIME_LIMIT: u64 = 97;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    #[serde(with = "serial::ipoly")]
    pub g: IPoly,
    #[serde(with = "serial::ipoly")]
    pub h: IPoly,
}

impl Factorization {
    pub fn is_trivial(&self) -> bool {
        self.g.deg() < 1 || self.h.deg() < 1
    }
}

/// All splittings `f = g h` of the rational factorization with `deg g`,
/// `deg h` not both odd, up to swapping. The content and sign go on `g`.
pub fn factorizations(curve: &HypCurve) -> Result<Vec<Factorization>> {
    let fac = factor_ipoly(curve.f())?;
    let factors: Vec<IPoly> = fac
        .factors
        .iter()
        .flat_map(|(g, e)| std::iter::repeat_n(g.clone(), *e as usize))
        .collect();
    let r = factors.len();
    let one = Poly::constant(BigInt::one());
    let mut out = Vec::new();
    // subsets of all factors but the last; the last always lands in h
    for mask in 0u32..(1 << (r - 1)) {
        let mut g = Poly::constant(fac.content.clone());
        let mut h = one.clone();
        for (j, fj) in factors.iter().enumerate() {
            if j + 1 < r && mask & (1 << j) != 0 {
                g = g.mul(fj);
            } else {
                h = h.mul(fj);
            }
        }
        if g.deg() % 2 == 1 && h.deg() % 2 == 1 {
            continue;
        }
        out.push(Factorization { g, h });
    }
    Ok(out)
}

/// Primes dividing `Res(g, h)` or `gcd(lc g, lc h)`.
pub fn twist_support(fact: &Factorization) -> Result<Vec<u64>> {
    let res = resultant(&fact.g, &fact.h)?;
    let lc = fact.g.leading().unwrap().gcd(fact.h.leading().unwrap());
    let mut ps = Vec::new();
    for n in [res, lc] {
        for p in prime_support(&n)? {
            ps.push(
                p.to_u64()
                    .ok_or_else(|| Error::FactoringFailed(format!("support prime {p}")))?,
            );
        }
    }
    ps.sort_unstable();
    ps.dedup();
    Ok(ps)
}

/// Squarefree `d = +-prod S` over subsets `S` of the support.
pub fn twists(support: &[u64]) -> Vec<BigInt> {
    let mut out = Vec::new();
    for mask in 0u64..(1 << support.len()) {
        let mut d = BigInt::one();
        for (j, p) in support.iter().enumerate() {
            if mask & (1 << j) != 0 {
                d *= *p;
            }
        }
        out.push(d.clone());
        out.push(-d);
    }
    out.sort_by(|a, b| a.magnitude().cmp(b.magnitude()).then(b.cmp(a)));
    out
}

fn twisted(fact: &Factorization, d: &BigInt) -> [IPoly; 2] {
    let dc = Poly::constant(d.clone());
    [fact.g.mul(&dc), fact.h.mul(&dc)]
}

/// Local solvability of `d u^2 = g(x), d v^2 = h(x)` at one place.
pub fn twist_solvable(fact: &Factorization, d: &BigInt, place: Place) -> Result<LocalResult> {
    let polys = twisted(fact, d);
    match place {
        Place::Real => Ok(solve_real(&polys)),
        Place::Prime(p) => solve_qp(&polys, p),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistReport {
    #[serde(with = "serial::big")]
    pub d: BigInt,
    pub survives: bool,
    pub places: Vec<LocalResult>,
    /// Primes where local solvability could not be decided; the twist is
    /// kept alive at these.
    #[serde(default, with = "serial::u64_vec")]
    pub undetermined: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelmerReport {
    pub factorization: Factorization,
    #[serde(with = "serial::u64_vec")]
    pub support: Vec<u64>,
    #[serde(with = "serial::u64_vec")]
    pub primes_tested: Vec<u64>,
    pub twists: Vec<TwistReport>,
    #[serde(with = "serial::big_vec")]
    pub survivors: Vec<BigInt>,
}

impl SelmerReport {
    pub fn is_empty(&self) -> bool {
        self.survivors.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DescentVerdict {
    EmptyProven,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelmerOutcome {
    pub verdict: DescentVerdict,
    pub reports: Vec<SelmerReport>,
}

/// Places tested for the twists of one factorization.
pub fn twist_primes(curve: &HypCurve, support: &[u64]) -> Vec<u64> {
    let mut ps = primes_up_to(TWIST_SMALL_PRIME_LIMIT);
    ps.extend_from_slice(support);
    ps.extend_from_slice(curve.bad_primes());
    ps.sort_unstable();
    ps.dedup();
    ps
}

/// The descent report for one factorization; every place is recorded for
/// every twist.
pub fn selmer_report(curve: &HypCurve, fact: &Factorization) -> Result<SelmerReport> {
    let support = twist_support(fact)?;
    let primes = twist_primes(curve, &support);
    let places: Vec<Place> = std::iter::once(Place::Real)
        .chain(primes.iter().map(|&p| Place::Prime(p)))
        .collect();
    let reports = twists(&support)
        .into_par_iter()
        .map(|d| {
            let mut results = Vec::new();
            let mut undetermined = Vec::new();
            for &pl in &places {
                match twist_solvable(fact, &d, pl) {
                    Ok(r) => results.push(r),
                    Err(Error::PrimeTooLarge(p)) => undetermined.push(p),
                    Err(e) => return Err(e),
                }
            }
            Ok(TwistReport {
                survives: results.iter().all(|r| r.solvable),
                d,
                places: results,
                undetermined,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let survivors = reports
        .iter()
        .filter(|t| t.survives)
        .map(|t| t.d.clone())
        .collect();
    Ok(SelmerReport {
        factorization: fact.clone(),
        support,
        primes_tested: primes,
        twists: reports,
        survivors,
    })
}

/// Run the descent over every factorization; `EmptyProven` as soon as one
/// factorization has no surviving twist.
pub fn selmer_set(curve: &HypCurve) -> Result<SelmerOutcome> {
    let mut reports = Vec::new();
    for fact in factorizations(curve)? {
        reports.push(selmer_report(curve, &fact)?);
    }
    let verdict = if reports.iter().any(|r| r.is_empty()) {
        DescentVerdict::EmptyProven
    } else {
        DescentVerdict::Inconclusive
    };
    Ok(SelmerOutcome { verdict, reports })
}
