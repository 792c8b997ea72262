//! Chabauty's criterion for rank 1 in genus 2: the mod-p annihilating
//! differential from first-order p-adic integrals, the separating modulus,
//! and the combined determination of `C(Q)` with the Mordell-Weil sieve.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Fp, Zpk, ZpkModulus};
use crate::group::order_of;
use crate::integer::{factor_u64, primes_up_to};
use crate::jacobian::{
    inv_mod_small, jac_order_fp, reduce_div, reduce_div_zpk, sqrt_mod_quadratic, Jacobian,
    MumfordDiv, OddModel,
};
use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::search::RatPoint;
use crate::serial;
use crate::sieve::{
    coset_eliminate_set, run_sieve, CosetOutcome, MWInput, SieveCertificate, SieveOptions,
};

pub const DEFAULT_PRECISION: u32 = 8;
pub const DEFAULT_PMAX: u64 = 100;
const AUX_ATTEMPTS: usize = 24;

/// `(log_0, log_1)` of a Jacobian point modulo `p^2`, for the basis
/// `x^i dx / 2y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogVector {
    #[serde(with = "serial::u64_str")]
    pub p: u64,
    #[serde(with = "serial::big")]
    pub l0: BigInt,
    #[serde(with = "serial::big")]
    pub l1: BigInt,
}

impl LogVector {
    fn p2(&self) -> BigInt {
        BigInt::from(self.p).pow(2)
    }

    pub fn scale(&self, k: &BigInt) -> LogVector {
        let m = self.p2();
        LogVector {
            p: self.p,
            l0: (&self.l0 * k).mod_floor(&m),
            l1: (&self.l1 * k).mod_floor(&m),
        }
    }

    pub fn add(&self, other: &LogVector) -> LogVector {
        let m = self.p2();
        LogVector {
            p: self.p,
            l0: (&self.l0 + &other.l0).mod_floor(&m),
            l1: (&self.l1 + &other.l1).mod_floor(&m),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.l0.is_zero() && self.l1.is_zero()
    }
}

/// Elements of `F_p[x]/(u)` for monic quadratic `u`, as polynomials of
/// degree below 2.
struct QuadAlg {
    u: Poly<Fp>,
}

impl QuadAlg {
    fn mul(&self, a: &Poly<Fp>, b: &Poly<Fp>) -> Poly<Fp> {
        a.mul(b).rem(&self.u).expect("monic modulus")
    }

    fn inv(&self, a: &Poly<Fp>) -> Result<Poly<Fp>> {
        inv_mod_small(a, &self.u)
    }

    /// Trace to `F_p`: `Tr(c0 + c1 x) = 2 c0 - c1 u_1`.
    fn trace(&self, a: &Poly<Fp>) -> Fp {
        let p = self.u.coeffs()[0].modulus();
        let zero = Fp::new(0, p);
        let c0 = a.coeff(0).copied().unwrap_or(zero);
        let c1 = a.coeff(1).copied().unwrap_or(zero);
        c0 + c0 - c1 * self.u.coeffs()[1]
    }
}

/// Auxiliary class `T = [Q1 + Q2 - 2 infinity]` over `Z/p^k` with
/// reduction avoiding Weierstrass points and infinity.
struct Aux {
    t: MumfordDiv<Zpk>,
    ubar: Poly<Fp>,
    vbar: Poly<Fp>,
}

fn random_aux(
    jac: &Jacobian<Zpk>,
    fbar: &Poly<Fp>,
    p: u64,
    ring: &Arc<ZpkModulus>,
    rng: &mut impl Rng,
) -> Result<Aux> {
    for _ in 0..10_000 {
        let b0 = rng.gen_range(0..p);
        let b1 = rng.gen_range(0..p);
        let ubar = Poly::new(vec![Fp::new(b0, p), Fp::new(b1, p), Fp::new(1, p)]);
        let disc = Fp::new(b1, p) * Fp::new(b1, p) - Fp::new(4 * b0 % p, p);
        if disc.is_zero() || Poly::gcd(&ubar, fbar)?.deg() > 0 {
            continue;
        }
        let vs = sqrt_mod_quadratic(fbar, &ubar, p);
        if vs.is_empty() {
            continue;
        }
        let vbar = vs[rng.gen_range(0..vs.len())].clone();
        let lift = |q: &Poly<Fp>| -> Poly<Zpk> {
            Poly::new(
                (0..3)
                    .map(|i| {
                        let c = q.coeff(i).map_or(0, |c| c.value());
                        Zpk::new(&BigInt::from(c), ring)
                    })
                    .collect(),
            )
        };
        let u = lift(&ubar);
        let mut v = lift(&vbar);
        // Newton iteration for v^2 = F in (Z/p^k)[x]/(u)
        let two = Zpk::new(&BigInt::from(2), ring);
        for _ in 0..=(ring.k.max(1) as f64).log2().ceil() as usize + 1 {
            let err = v.square().sub(&jac.f).rem(&u)?;
            if err.is_zero() {
                break;
            }
            let inv = inv_mod_small(&v.scale(&two), &u)?;
            v = v.sub(&err.mul(&inv).rem(&u)?);
        }
        let t = MumfordDiv { u, v };
        if !jac.is_valid(&t) {
            return Err(Error::PrecisionLoss);
        }
        return Ok(Aux { t, ubar, vbar });
    }
    Err(Error::WeierstrassDisk)
}

/// `T + m D` by a ladder seeded at `T`.
fn shifted_multiple(
    jac: &Jacobian<Zpk>,
    t: &MumfordDiv<Zpk>,
    d: &MumfordDiv<Zpk>,
    m: u64,
) -> Result<MumfordDiv<Zpk>> {
    if m == 0 {
        return Ok(t.clone());
    }
    let mut acc = jac.add(t, d)?;
    for bit in (0..63 - m.leading_zeros()).rev() {
        // T + k D  ->  T + 2k D  =  2 (T + k D) - T
        acc = jac.sub(&jac.double(&acc)?, t)?;
        if (m >> bit) & 1 == 1 {
            acc = jac.add(&acc, d)?;
        }
    }
    Ok(acc)
}

fn log_once(
    model: &OddModel,
    d: &MumfordDiv<BigRational>,
    p: u64,
    m: u64,
    k: u32,
    rng: &mut impl Rng,
) -> Result<LogVector> {
    let ring = Zpk::ring(p, k);
    let jac = model.jacobian_zpk(&ring);
    let fbar = model.curve.reduce_fp(p);
    let aux = random_aux(&jac, &fbar, p, &ring, rng)?;
    let dz = reduce_div_zpk(d, &ring)?;
    let big_f = shifted_multiple(&jac, &aux.t, &dz, m)?;
    let red = |q: &Poly<Zpk>| q.map(|c| c.reduce());
    if big_f.u.deg() != 2 || red(&big_f.u) != aux.ubar || red(&big_f.v) != aux.vbar {
        return Err(Error::WeierstrassDisk);
    }
    // delta = u_F - u_T lies in p (Z/p^k)[x]; its quotient by p mod p
    let delta = big_f.u.sub(&aux.t.u);
    let pb = BigInt::from(p);
    let mut dq = Vec::new();
    for i in 0..2 {
        let c = delta.coeff(i).map_or(BigInt::zero(), |c| c.value().clone());
        if !(&c % &pb).is_zero() {
            return Err(Error::PrecisionLoss);
        }
        dq.push(Fp::from_bigint(&(c / &pb), p));
    }
    let dq = Poly::new(dq);
    let alg = QuadAlg {
        u: aux.ubar.clone(),
    };
    // first-order disk integrals: -p Tr( delta' x^i / (2 u' v) )
    let du = aux.ubar.derivative();
    let denom = alg.mul(&du, &aux.vbar.scale(&Fp::new(2, p)));
    let w = alg.mul(&dq, &alg.inv(&denom)?);
    let xw = alg.mul(&w, &Poly::new(vec![Fp::new(0, p), Fp::new(1, p)]));
    let p2 = BigInt::from(p).pow(2);
    let lift = |t: Fp| (-(BigInt::from(t.value()) * &pb)).mod_floor(&p2);
    let log_e = LogVector {
        p,
        l0: lift(alg.trace(&w)),
        l1: lift(alg.trace(&xw)),
    };
    let minv = crate::integer::inv_mod_big(&BigInt::from(m), &p2).ok_or(Error::PDividesOrder(p))?;
    Ok(log_e.scale(&minv))
}

/// Order of the reduction of `d` in `J(F_p)`.
pub fn reduced_order(model: &OddModel, d: &MumfordDiv<BigRational>, p: u64) -> Result<u64> {
    let jac = model.jacobian_fp(p)?;
    let r = reduce_div(d, p)?;
    order_of(&jac, &r, jac_order_fp(&model.curve, p)?)
}

/// `log(D) mod p^2` on the odd model; `multiplier` scales the order used
/// for the kernel step (1 by default).
pub fn jac_log_mod_p2_with(
    model: &OddModel,
    d: &MumfordDiv<BigRational>,
    p: u64,
    seed: u64,
    multiplier: u64,
) -> Result<LogVector> {
    if p == 2 {
        return Err(Error::BadPrime(2));
    }
    let m = reduced_order(model, d, p)? * multiplier;
    if m.is_multiple_of(p) {
        return Err(Error::PDividesOrder(p));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = Error::PrecisionLoss;
    for k in [
        DEFAULT_PRECISION,
        DEFAULT_PRECISION + 4,
        DEFAULT_PRECISION + 8,
    ] {
        for _ in 0..AUX_ATTEMPTS {
            match log_once(model, d, p, m, k, &mut rng) {
                Ok(l) => return Ok(l),
                Err(e @ (Error::NonInvertible | Error::PrecisionLoss | Error::WeierstrassDisk)) => {
                    last = e
                }
                Err(e) => return Err(e),
            }
        }
    }
    Err(last)
}

pub fn jac_log_mod_p2(
    model: &OddModel,
    d: &MumfordDiv<BigRational>,
    p: u64,
    seed: u64,
) -> Result<LogVector> {
    jac_log_mod_p2_with(model, d, p, seed, 1)
}

/// Projective `(a0 : a1)` over `F_p`, first nonzero entry 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffModP {
    #[serde(with = "serial::u64_str")]
    pub p: u64,
    #[serde(with = "serial::u64_str")]
    pub a0: u64,
    #[serde(with = "serial::u64_str")]
    pub a1: u64,
}

impl DiffModP {
    pub fn normalized(p: u64, a0: Fp, a1: Fp) -> Option<DiffModP> {
        let lead = if !a0.is_zero() { a0 } else { a1 };
        let inv = lead.try_inv().ok()?;
        Some(DiffModP {
            p,
            a0: (a0 * inv).value(),
            a1: (a1 * inv).value(),
        })
    }

    /// `a0 l0 + a1 l1 mod p^2` with the entries lifted to `[0, p)`.
    pub fn pairing(&self, log: &LogVector) -> BigInt {
        (BigInt::from(self.a0) * &log.l0 + BigInt::from(self.a1) * &log.l1)
            .mod_floor(&BigInt::from(self.p).pow(2))
    }
}

/// The kernel line `(l1' : -l0')` of `log(D) = p (l0', l1')`.
pub fn annihilator_from_log(log: &LogVector) -> Result<DiffModP> {
    let p = log.p;
    let pb = BigInt::from(p);
    let l0 = Fp::from_bigint(&(&log.l0 / &pb), p);
    let l1 = Fp::from_bigint(&(&log.l1 / &pb), p);
    if l0.is_zero() && l1.is_zero() {
        return Err(Error::ZeroLog(p));
    }
    Ok(DiffModP::normalized(p, l1, -l0).expect("nonzero"))
}

/// Annihilating differential mod `p` for a rank-1 input.
pub fn annihilator_mod_p(input: &MWInput, p: u64, seed: u64) -> Result<(DiffModP, LogVector)> {
    if input.free.len() != 1 {
        return Err(Error::InvalidInput(format!(
            "annihilator needs rank 1, got {}",
            input.free.len()
        )));
    }
    let log = jac_log_mod_p2(&input.model, &input.free[0], p, seed)?;
    match annihilator_from_log(&log) {
        Ok(w) => Ok((w, log)),
        Err(Error::ZeroLog(_)) => {
            // retry once with fresh auxiliary randomness before giving up
            let log2 = jac_log_mod_p2(&input.model, &input.free[0], p, seed ^ 0x5eed)?;
            annihilator_from_log(&log2)
                .map(|w| (w, log2))
                .map_err(|_| Error::UnusablePrime(p))
        }
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CriterionFailure {
    AtInfinity,
    WeierstrassPoint {
        #[serde(with = "serial::u64_str")]
        x: u64,
    },
    TwoPoints {
        #[serde(with = "serial::u64_str")]
        x: u64,
    },
}

/// Evidence that `(a0 + a1 x) dx / 2y` has no zero on `C(F_p)`, and the
/// separating modulus `N = #J(F_p)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparatingCert {
    #[serde(with = "serial::u64_str")]
    pub p: u64,
    #[serde(with = "serial::u64_str")]
    pub n: u64,
    pub omega: DiffModP,
    /// Only possible zero: `x* = -a0/a1`.
    #[serde(with = "serial::u64_str")]
    pub x_star: u64,
    /// `F(x*) mod p`, a quadratic non-residue.
    #[serde(with = "serial::u64_str")]
    pub f_at_x_star: u64,
    pub log: Option<LogVector>,
    #[serde(with = "serial::u64_str")]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CriterionOutcome {
    Pass(SeparatingCert),
    Fail(CriterionFailure),
}

/// Check that the differential does not vanish on `C(F_p)`.
pub fn criterion(model: &OddModel, omega: &DiffModP, p: u64) -> Result<CriterionOutcome> {
    if p == 2 {
        return Err(Error::BadPrime(2));
    }
    model.curve.check_good(p)?;
    if omega.a1 == 0 {
        return Ok(CriterionOutcome::Fail(CriterionFailure::AtInfinity));
    }
    let a0 = Fp::new(omega.a0, p);
    let a1 = Fp::new(omega.a1, p);
    let x = -a0 * a1.try_inv()?;
    let fx = model.curve.reduce_fp(p).eval(&x);
    match fx.chi() {
        0 => Ok(CriterionOutcome::Fail(CriterionFailure::WeierstrassPoint {
            x: x.value(),
        })),
        1 => Ok(CriterionOutcome::Fail(CriterionFailure::TwoPoints {
            x: x.value(),
        })),
        _ => Ok(CriterionOutcome::Pass(SeparatingCert {
            p,
            n: jac_order_fp(&model.curve, p)?,
            omega: *omega,
            x_star: x.value(),
            f_at_x_star: fx.value(),
            log: None,
            seed: 0,
        })),
    }
}

/// Re-check a certificate's nonvanishing evidence and modulus.
pub fn replay_separating(model: &OddModel, cert: &SeparatingCert) -> Result<bool> {
    let p = cert.p;
    let ok_log = cert
        .log
        .as_ref()
        .is_none_or(|l| cert.omega.pairing(l).is_zero());
    Ok(ok_log
        && matches!(criterion(model, &cert.omega, p)?, CriterionOutcome::Pass(ref c) if c.n == cert.n && c.x_star == cert.x_star))
}

/// Residue class in `C(F_p)` of a point of the odd model (`None` at
/// infinity).
pub fn residue_class(pt: &RatPoint, p: u64) -> Result<Option<(u64, u64)>> {
    match pt {
        RatPoint::Infinity { .. } => Ok(None),
        RatPoint::Affine { x, y } => {
            // points with x non-integral at p lie in the disk at infinity
            if (x.denom() % BigInt::from(p)).is_zero() {
                return Ok(None);
            }
            let xr = Fp::from_rational(x, p)?;
            let yr = Fp::from_rational(y, p)?;
            Ok(Some((xr.value(), yr.value())))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DeterminationStatus {
    ProvenComplete,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Determination {
    pub status: DeterminationStatus,
    /// Points on the original model.
    pub points: Vec<RatPoint>,
    pub rank: usize,
    pub separating: Option<SeparatingCert>,
    pub sieve: Option<SieveCertificate>,
    pub cosets: Option<CosetOutcome>,
    /// Classes of `A/NA` that no sieve run eliminated and no point explains.
    pub unexplained: Vec<Vec<String>>,
    /// Rank 0: `gcd` of `#J(F_p)` over the checked primes.
    #[serde(with = "serial::u64_str")]
    pub torsion_bound: u64,
    pub assumptions: Vec<String>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct DetermineOptions {
    pub pmax: u64,
    pub seed: u64,
    pub sieve_prime_bound: u64,
    pub multipliers: Vec<u64>,
    pub cap: u128,
    /// Largest free coordinate tried when explaining a surviving class.
    pub explain_bound: u64,
    /// Separating primes tried before giving up.
    pub attempts: usize,
}

impl Default for DetermineOptions {
    fn default() -> Self {
        DetermineOptions {
            pmax: DEFAULT_PMAX,
            seed: 0,
            sieve_prime_bound: 200,
            multipliers: vec![2, 3, 4, 6],
            cap: crate::sieve::DEFAULT_CAP,
            explain_bound: 40,
            attempts: 3,
        }
    }
}

/// A rational point `P` with `D = [P - infinity]` (or infinity for the
/// identity), if `D` has that shape.
fn as_point(d: &MumfordDiv<BigRational>) -> Option<RatPoint> {
    match d.u.deg() {
        0 => Some(RatPoint::Infinity { sign: 0 }),
        1 => Some(RatPoint::Affine {
            x: -d.u.coeffs()[0].clone(),
            y: d.v.coeff(0).cloned().unwrap_or_else(BigRational::zero),
        }),
        _ => None,
    }
}

/// All torsion coordinate vectors lifting `c_j mod g_j` to `[0, t_j)`.
fn torsion_lifts(torsion: &[u64], class: &[u64], n: u64) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for (&t, &c) in torsion.iter().zip(class) {
        let g = num_integer::gcd(t, n);
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..t / g).map(move |k| {
                    let mut w = v.clone();
                    w.push(c + g * k);
                    w
                })
            })
            .collect();
    }
    out
}

fn finish_points(input: &MWInput, pts: &[RatPoint]) -> Result<Vec<RatPoint>> {
    let mut out = pts
        .iter()
        .map(|p| input.model.from_odd(p))
        .collect::<Result<Vec<_>>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

fn check_known(input: &MWInput, known: &[RatPoint], found: &[RatPoint]) -> Vec<String> {
    known
        .iter()
        .filter(|k| !found.contains(k))
        .map(|k| format!("known point {k:?} not among the determined points"))
        .chain(
            known
                .iter()
                .filter(|k| !k.verify(&input.model.original))
                .map(|k| format!("known point {k:?} is not on the curve")),
        )
        .collect()
}

fn determine_rank0(
    input: &MWInput,
    known: &[RatPoint],
    opts: &DetermineOptions,
) -> Result<Determination> {
    let group = input.group();
    let size: u128 = group.torsion.iter().map(|&t| t as u128).product();
    if size > opts.cap {
        return Err(Error::CapExceeded {
            size,
            cap: opts.cap,
        });
    }
    let mut pts = Vec::new();
    for coords in torsion_lifts(&group.torsion, &vec![0; group.torsion.len()], 1) {
        let c: Vec<BigInt> = coords.iter().map(|&x| BigInt::from(x)).collect();
        if let Some(pt) = as_point(&input.combination(&c)?) {
            pts.push(pt);
        }
    }
    let mut bound = 0u64;
    for p in primes_up_to(opts.sieve_prime_bound.min(100))
        .into_iter()
        .skip(1)
    {
        if input.model.curve.is_bad(p) {
            continue;
        }
        bound = num_integer::gcd(bound, jac_order_fp(&input.model.curve, p)?);
    }
    let points = finish_points(input, &pts)?;
    let diagnostics = check_known(input, known, &points);
    let torsion_ok = bound as u128 == size;
    let mut assumptions = vec!["J(Q) has rank 0".to_string()];
    if !torsion_ok {
        assumptions.push("the torsion generators generate J(Q)_tors".into());
    }
    let complete = diagnostics.is_empty() && (torsion_ok || input.index_coprime);
    Ok(Determination {
        status: if complete {
            DeterminationStatus::ProvenComplete
        } else {
            DeterminationStatus::Undecided
        },
        points,
        rank: 0,
        separating: None,
        sieve: None,
        cosets: None,
        unexplained: Vec::new(),
        torsion_bound: bound,
        assumptions,
        diagnostics,
    })
}

/// Separating certificates at good primes up to `pmax`, by increasing `p`.
pub fn separating_primes(input: &MWInput, pmax: u64, seed: u64) -> Vec<SeparatingCert> {
    let primes: Vec<u64> = primes_up_to(pmax)
        .into_iter()
        .filter(|&p| p > 2 && !input.model.curve.is_bad(p))
        .collect();
    let mut certs: Vec<SeparatingCert> = primes
        .par_iter()
        .filter_map(|&p| {
            if input.generators().any(|d| reduce_div(d, p).is_err()) {
                return None;
            }
            let (omega, log) = annihilator_mod_p(input, p, seed ^ p).ok()?;
            match criterion(&input.model, &omega, p).ok()? {
                CriterionOutcome::Pass(mut c) => {
                    c.log = Some(log);
                    c.seed = seed ^ p;
                    Some(c)
                }
                CriterionOutcome::Fail(_) => None,
            }
        })
        .collect();
    certs.sort_by_key(|c| c.p);
    certs
}

fn largest_prime_factor(n: u64) -> u64 {
    factor_u64(n)
        .ok()
        .and_then(|f| f.last().map(|(l, _)| *l))
        .unwrap_or(n)
}

/// Determine `C(Q)` from generators of `J(Q)` (rank 0 or 1).
pub fn determine_rational_points(
    input: &MWInput,
    known: &[RatPoint],
    opts: &DetermineOptions,
) -> Result<Determination> {
    match input.free.len() {
        0 => return determine_rank0(input, known, opts),
        1 => {}
        r => {
            return Err(Error::InvalidInput(format!(
                "rank {r} is not supported (needs rank < genus with one differential)"
            )))
        }
    }
    let mut certs = separating_primes(input, opts.pmax, opts.seed);
    if certs.is_empty() {
        return Err(Error::NoSeparatingPrime(opts.pmax));
    }
    let known_odd = known
        .iter()
        .map(|k| input.model.to_odd(k))
        .collect::<Result<Vec<_>>>()?;
    let mut diagnostics = Vec::new();
    // soundness observable: known points in distinct residue classes
    certs.retain(|c| {
        let mut seen = std::collections::HashSet::new();
        let ok = known_odd.iter().all(|pt| {
            residue_class(pt, c.p)
                .map(|r| seen.insert(r))
                .unwrap_or(false)
        });
        if !ok {
            diagnostics.push(format!("known points collide mod {}", c.p));
        }
        ok
    });
    certs.sort_by_key(|c| (largest_prime_factor(c.n), c.p));
    let sieve_primes: Vec<u64> = primes_up_to(opts.sieve_prime_bound)
        .into_iter()
        .filter(|&p| p > 2)
        .collect();
    let group = input.group();
    let sopts = SieveOptions {
        cap: opts.cap,
        seed: opts.seed,
    };
    let mut best: Option<Determination> = None;
    for cert in certs.into_iter().take(opts.attempts) {
        let big_n = cert.n;
        if group.quotient_size(big_n) > opts.cap {
            diagnostics.push(format!("A/NA too large for N = {big_n}"));
            continue;
        }
        let sieve = run_sieve(input, big_n, &sieve_primes, sopts)?;
        let mut pts = Vec::new();
        let mut unexplained = Vec::new();
        for class in sieve.survivor_classes() {
            let rep = group.smallest_representative(&class, big_n);
            let mut explained = false;
            if rep[0].magnitude() <= &opts.explain_bound.into() {
                for lift in torsion_lifts(&group.torsion, &class[1..], big_n) {
                    let mut coords = vec![rep[0].clone()];
                    coords.extend(lift.iter().map(|&x| BigInt::from(x)));
                    if let Some(pt) = as_point(&input.combination(&coords)?) {
                        pts.push(pt);
                        explained = true;
                        break;
                    }
                }
            }
            if !explained {
                unexplained.push(class);
            }
        }
        let cosets = if unexplained.is_empty() {
            None
        } else {
            Some(coset_eliminate_set(
                input,
                &unexplained,
                big_n,
                &sieve_primes,
                &opts.multipliers,
                sopts,
            )?)
        };
        let eliminated = cosets.as_ref().is_none_or(|c| c.is_eliminated());
        let points = finish_points(input, &pts)?;
        let mut diags = diagnostics.clone();
        diags.extend(check_known(input, known, &points));
        let complete = eliminated && diags.is_empty() && input.index_coprime;
        let det = Determination {
            status: if complete {
                DeterminationStatus::ProvenComplete
            } else {
                DeterminationStatus::Undecided
            },
            points,
            rank: 1,
            separating: Some(cert),
            sieve: Some(sieve),
            cosets,
            unexplained: if eliminated {
                Vec::new()
            } else {
                unexplained
                    .iter()
                    .map(|c| c.iter().map(|x| x.to_string()).collect())
                    .collect()
            },
            torsion_bound: 0,
            assumptions: vec![
                "the free generator and torsion generate a subgroup of index coprime to the sieve moduli".into(),
            ],
            diagnostics: diags,
        };
        if complete {
            return Ok(det);
        }
        if best.is_none() {
            best = Some(det);
        }
    }
    best.ok_or(Error::NoSeparatingPrime(opts.pmax))
}
