//! The Mordell-Weil sieve: intersect the image of `A/nA` with the images of
//! `C(F_p)` in `J(F_p)/nJ(F_p)` over many good primes.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::gcd;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::curve::affine_points_fp;
use crate::error::{Error, Result};
use crate::jacobian::{group_structure_fp, jac_order_fp, reduce_div, MumfordDiv, OddModel};
use crate::serial;

pub const DEFAULT_CAP: u128 = 1_000_000;

/// Generators of a finite-index subgroup `A` of `J(Q)` on the odd model.
#[derive(Debug, Clone)]
pub struct MWInput {
    pub model: OddModel,
    pub free: Vec<MumfordDiv<BigRational>>,
    pub torsion: Vec<(MumfordDiv<BigRational>, u64)>,
    /// User assertion: `[J(Q) : A]` is coprime to every sieve modulus.
    pub index_coprime: bool,
}

impl MWInput {
    /// Validate the generators: on the Jacobian, torsion of the stated order.
    pub fn new(
        model: OddModel,
        free: Vec<MumfordDiv<BigRational>>,
        torsion: Vec<(MumfordDiv<BigRational>, u64)>,
        index_coprime: bool,
    ) -> Result<Self> {
        let jac = model.jacobian_q();
        for d in free.iter().chain(torsion.iter().map(|(d, _)| d)) {
            if !jac.is_valid(d) {
                return Err(Error::InvalidInput(format!("not a Mumford divisor: {d:?}")));
            }
        }
        for (d, t) in &torsion {
            if *t == 0 || !jac.is_identity(&jac.scalar_mul(d, &BigInt::from(*t))?) {
                return Err(Error::InvalidInput(format!(
                    "torsion order {t} not verified"
                )));
            }
            for (l, _) in crate::integer::factor_u64(*t)? {
                if jac.is_identity(&jac.scalar_mul(d, &BigInt::from(t / l))?) {
                    return Err(Error::InvalidInput(format!("torsion order {t} not exact")));
                }
            }
        }
        Ok(MWInput {
            model,
            free,
            torsion,
            index_coprime,
        })
    }

    pub fn group(&self) -> AbstractGroup {
        AbstractGroup {
            rank: self.free.len(),
            torsion: self.torsion.iter().map(|(_, t)| *t).collect(),
        }
    }

    pub fn generators(&self) -> impl Iterator<Item = &MumfordDiv<BigRational>> {
        self.free.iter().chain(self.torsion.iter().map(|(d, _)| d))
    }

    /// `sum c_i g_i` over the rationals.
    pub fn combination(&self, coords: &[BigInt]) -> Result<MumfordDiv<BigRational>> {
        let jac = self.model.jacobian_q();
        let mut acc = jac.identity();
        for (g, c) in self.generators().zip(coords) {
            acc = jac.add(&acc, &jac.scalar_mul(g, c)?)?;
        }
        Ok(acc)
    }
}

/// `Z^r + sum Z/t_j`, elements as coordinate vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractGroup {
    pub rank: usize,
    #[serde(with = "serial::u64_vec")]
    pub torsion: Vec<u64>,
}

impl AbstractGroup {
    /// Moduli of the components of `A/nA`.
    pub fn quotient_moduli(&self, n: u64) -> Vec<u64> {
        std::iter::repeat_n(n, self.rank)
            .chain(self.torsion.iter().map(|&t| gcd(t, n)))
            .collect()
    }

    pub fn quotient_size(&self, n: u64) -> u128 {
        self.quotient_moduli(n).iter().map(|&m| m as u128).product()
    }

    /// Reduce a class of `A/nA` to `A/mA` for `m | n`.
    pub fn project(&self, class: &[u64], m: u64) -> Vec<u64> {
        class
            .iter()
            .zip(self.quotient_moduli(m))
            .map(|(c, q)| c % q)
            .collect()
    }

    /// Representative with coordinates in `(-q/2, q/2]`.
    pub fn smallest_representative(&self, class: &[u64], n: u64) -> Vec<BigInt> {
        class
            .iter()
            .zip(self.quotient_moduli(n))
            .map(|(&c, q)| {
                if 2 * c > q {
                    BigInt::from(c) - BigInt::from(q)
                } else {
                    BigInt::from(c)
                }
            })
            .collect()
    }
}

/// Mixed-radix index of a class, first coordinate least significant.
pub fn encode(class: &[u64], moduli: &[u64]) -> u64 {
    class
        .iter()
        .zip(moduli)
        .rev()
        .fold(0u64, |acc, (c, m)| acc * m + c)
}

/// Inverse of [`encode`].
pub fn decode(mut idx: u64, moduli: &[u64]) -> Vec<u64> {
    moduli
        .iter()
        .map(|m| {
            let c = idx % m;
            idx /= m;
            c
        })
        .collect()
}

/// Sieve data at one prime: `phi_p` on the generators and the image `W_p` of
/// `C(F_p)`, both in coordinates of `J(F_p)/nJ(F_p)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeData {
    #[serde(with = "serial::u64_str")]
    pub p: u64,
    #[serde(with = "serial::u64_str")]
    pub n: u64,
    #[serde(with = "serial::u64_str")]
    pub jac_order: u64,
    /// Moduli `gcd(n_i, n)` of `J(F_p)/nJ(F_p)`.
    #[serde(with = "serial::u64_vec")]
    pub moduli: Vec<u64>,
    /// Row `k`: image of generator `k`.
    pub phi: Vec<Vec<String>>,
    /// Images of the points of `C(F_p)`, sorted.
    pub image: Vec<Vec<String>>,
}

impl PrimeData {
    /// Build from raw vectors (used for injected test data too).
    pub fn from_parts(
        p: u64,
        n: u64,
        jac_order: u64,
        moduli: Vec<u64>,
        phi: Vec<Vec<u64>>,
        image: BTreeSet<Vec<u64>>,
    ) -> Self {
        let s = |v: &Vec<u64>| v.iter().map(|x| x.to_string()).collect();
        PrimeData {
            p,
            n,
            jac_order,
            moduli,
            phi: phi.iter().map(s).collect(),
            image: image.iter().map(s).collect(),
        }
    }

    fn phi_u64(&self) -> Vec<Vec<u64>> {
        parse_rows(&self.phi)
    }

    fn image_set(&self) -> BTreeSet<Vec<u64>> {
        parse_rows(&self.image).into_iter().collect()
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("serializable");
        hex::encode(Sha256::digest(json))
    }

    /// The part of `#J(F_p)` visible modulo `n`.
    pub fn useful_part(&self) -> u64 {
        gcd(self.jac_order, self.n)
    }
}

fn parse_rows(rows: &[Vec<String>]) -> Vec<Vec<u64>> {
    rows.iter()
        .map(|r| r.iter().map(|x| x.parse().expect("decimal")).collect())
        .collect()
}

/// Compute `phi_p` and `W_p` for the modulus `n`.
pub fn prime_data(input: &MWInput, p: u64, n: u64, seed: u64) -> Result<PrimeData> {
    if p == 2 {
        return Err(Error::BadPrime(2));
    }
    input.model.curve.check_good(p)?;
    let reduced = input
        .generators()
        .map(|d| reduce_div(d, p))
        .collect::<Result<Vec<_>>>()?;
    let order = jac_order_fp(&input.model.curve, p)?;
    if gcd(order, n) == 1 {
        let phi = vec![Vec::new(); reduced.len()];
        return Ok(PrimeData::from_parts(
            p,
            n,
            order,
            Vec::new(),
            phi,
            [Vec::new()].into(),
        ));
    }
    let grp = group_structure_fp(&input.model, p, seed)?;
    let moduli = grp.structure.quotient_moduli(n);
    let jac = &grp.jac;
    let dl = |d: &MumfordDiv<crate::fields::Fp>| {
        grp.structure
            .dlog_mod(jac, d, Some(n))
            .ok_or_else(|| Error::InvalidInput(format!("dlog failed at p = {p}")))
    };
    let phi = reduced.iter().map(&dl).collect::<Result<Vec<_>>>()?;
    let mut image = BTreeSet::new();
    image.insert(vec![0; moduli.len()]);
    for (x, y) in affine_points_fp(&jac.f, p) {
        image.insert(dl(&jac.point(x, y))?);
    }
    Ok(PrimeData::from_parts(p, n, order, moduli, phi, image))
}

/// `phi_p(a)` mod `nJ(F_p)` for a class `a` of `A/nA`.
fn apply(phi: &[Vec<u64>], moduli: &[u64], class: &[u64]) -> Vec<u64> {
    let mut out = vec![0u128; moduli.len()];
    for (row, &c) in phi.iter().zip(class) {
        if c == 0 {
            continue;
        }
        for (i, &x) in row.iter().enumerate() {
            out[i] = (out[i] + x as u128 * c as u128) % moduli[i].max(1) as u128;
        }
    }
    out.into_iter().map(|x| x as u64).collect()
}

/// Keep the classes whose image lies in `W_p` for every prime of `data`;
/// returns the survivors after each prime.
pub fn intersect(
    group: &AbstractGroup,
    n: u64,
    start: Vec<u64>,
    data: &[PrimeData],
) -> Vec<Vec<u64>> {
    let moduli = group.quotient_moduli(n);
    let mut cur = start;
    let mut history = Vec::with_capacity(data.len());
    for d in data {
        let phi = d.phi_u64();
        let image = d.image_set();
        cur.retain(|&idx| {
            let class = decode(idx, &moduli);
            image.contains(&apply(&phi, &d.moduli, &class))
        });
        history.push(cur.clone());
    }
    history
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SieveVerdict {
    EmptyProven,
    Survivors,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeRecord {
    #[serde(with = "serial::u64_str")]
    pub p: u64,
    #[serde(with = "serial::u64_str")]
    pub jac_order: u64,
    #[serde(with = "serial::u64_vec")]
    pub moduli: Vec<u64>,
    pub digest: String,
    #[serde(with = "serial::u64_str")]
    pub survivors_after: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedPrime {
    #[serde(with = "serial::u64_str")]
    pub p: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveCertificate {
    #[serde(with = "serial::u64_str")]
    pub n: u64,
    pub group: AbstractGroup,
    #[serde(with = "serial::u64_str")]
    pub seed: u64,
    /// Prime order: decreasing `log gcd(#J(F_p), n) / log p`.
    pub schedule: String,
    pub primes: Vec<PrimeRecord>,
    pub skipped: Vec<SkippedPrime>,
    #[serde(with = "serial::u64_str")]
    pub initial_classes: u64,
    /// Surviving classes of `A/nA`.
    pub survivors: Vec<Vec<String>>,
    pub index_coprime_assumed: bool,
    pub verdict: SieveVerdict,
}

impl SieveCertificate {
    pub fn survivor_classes(&self) -> Vec<Vec<u64>> {
        parse_rows(&self.survivors)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SieveOptions {
    pub cap: u128,
    pub seed: u64,
}

impl Default for SieveOptions {
    fn default() -> Self {
        SieveOptions {
            cap: DEFAULT_CAP,
            seed: 0,
        }
    }
}

fn score(d: &PrimeData) -> f64 {
    (d.useful_part() as f64).ln() / (d.p as f64).ln()
}

/// Prime data for every usable prime, in schedule order, plus the skipped
/// primes with reasons.
fn scheduled_data(
    input: &MWInput,
    n: u64,
    primes: &[u64],
    seed: u64,
) -> (Vec<PrimeData>, Vec<SkippedPrime>) {
    let results: Vec<(u64, Result<PrimeData>)> = primes
        .par_iter()
        .map(|&p| (p, prime_data(input, p, n, seed)))
        .collect();
    let mut data = Vec::new();
    let mut skipped = Vec::new();
    for (p, r) in results {
        match r {
            Ok(d) => data.push(d),
            Err(e) => skipped.push(SkippedPrime {
                p,
                reason: e.to_string(),
            }),
        }
    }
    data.sort_by(|a, b| score(b).total_cmp(&score(a)).then(a.p.cmp(&b.p)));
    (data, skipped)
}

fn run_on(
    input: &MWInput,
    n: u64,
    start: Vec<u64>,
    data: &[PrimeData],
    skipped: Vec<SkippedPrime>,
    seed: u64,
) -> SieveCertificate {
    let group = input.group();
    let moduli = group.quotient_moduli(n);
    let initial = start.len() as u64;
    let history = intersect(&group, n, start.clone(), data);
    let mut records = Vec::new();
    for (d, surv) in data.iter().zip(&history) {
        records.push(PrimeRecord {
            p: d.p,
            jac_order: d.jac_order,
            moduli: d.moduli.clone(),
            digest: d.digest(),
            survivors_after: surv.len() as u64,
        });
        if surv.is_empty() {
            break;
        }
    }
    let last = history.last().cloned().unwrap_or(start);
    let survivors: Vec<Vec<String>> = last
        .iter()
        .map(|&i| decode(i, &moduli).iter().map(|c| c.to_string()).collect())
        .collect();
    let verdict = if survivors.is_empty() && input.index_coprime {
        SieveVerdict::EmptyProven
    } else {
        SieveVerdict::Survivors
    };
    SieveCertificate {
        n,
        group,
        seed,
        schedule: "gcd-per-log".into(),
        primes: records,
        skipped,
        initial_classes: initial,
        survivors,
        index_coprime_assumed: input.index_coprime,
        verdict,
    }
}

fn check_cap(size: u128, cap: u128) -> Result<()> {
    if size > cap {
        Err(Error::CapExceeded { size, cap })
    } else {
        Ok(())
    }
}

/// Sieve all of `A/nA` with the given primes.
pub fn run_sieve(
    input: &MWInput,
    n: u64,
    primes: &[u64],
    opts: SieveOptions,
) -> Result<SieveCertificate> {
    let group = input.group();
    check_cap(group.quotient_size(n), opts.cap)?;
    let (data, skipped) = scheduled_data(input, n, primes, opts.seed);
    let start: Vec<u64> = (0..group.quotient_size(n) as u64).collect();
    Ok(run_on(input, n, start, &data, skipped, opts.seed))
}

/// Re-derive every recorded prime's data and check digests and survivors.
pub fn replay(input: &MWInput, cert: &SieveCertificate, start: Vec<u64>) -> Result<bool> {
    let mut data = Vec::new();
    for rec in &cert.primes {
        let d = prime_data(input, rec.p, cert.n, cert.seed)?;
        if d.digest() != rec.digest {
            return Ok(false);
        }
        data.push(d);
    }
    let group = input.group();
    let history = intersect(&group, cert.n, start, &data);
    let counts_match = history
        .iter()
        .zip(&cert.primes)
        .all(|(h, r)| h.len() as u64 == r.survivors_after);
    let moduli = group.quotient_moduli(cert.n);
    let last: Vec<Vec<u64>> = history
        .last()
        .map(|h| h.iter().map(|&i| decode(i, &moduli)).collect())
        .unwrap_or_default();
    Ok(counts_match && (cert.primes.is_empty() || last == cert.survivor_classes()))
}

/// Classes of `A/nA` lying over one of the classes `c0s` of `A/NA`.
pub fn classes_over(group: &AbstractGroup, c0s: &[Vec<u64>], big_n: u64, n: u64) -> Vec<u64> {
    let moduli = group.quotient_moduli(n);
    let wanted: BTreeSet<Vec<u64>> = c0s.iter().cloned().collect();
    let small = group.quotient_moduli(big_n);
    let mut out = Vec::new();
    // walk each c0's fibre: coordinate i runs over c0_i + q_i k
    for c0 in &wanted {
        let steps: Vec<u64> = moduli.iter().zip(&small).map(|(m, q)| m / q).collect();
        let total: u64 = steps.iter().product();
        for k in 0..total {
            let ks = decode(k, &steps);
            let class: Vec<u64> = c0
                .iter()
                .zip(&ks)
                .zip(&small)
                .map(|((c, k), q)| c + q * k)
                .collect();
            out.push(encode(&class, &moduli));
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CosetOutcome {
    Eliminated {
        certificate: SieveCertificate,
    },
    Survived {
        certificate: SieveCertificate,
        /// Smallest representatives of the surviving classes, for point checks.
        representatives: Vec<Vec<String>>,
    },
    CapReached {
        #[serde(with = "serial::u64_str")]
        n: u64,
        certificate: Option<SieveCertificate>,
    },
}

impl CosetOutcome {
    pub fn is_eliminated(&self) -> bool {
        matches!(self, CosetOutcome::Eliminated { .. })
    }
}

/// Sieve the cosets `c0 + N A` with moduli `k N` for `k` in `multipliers`.
pub fn coset_eliminate_set(
    input: &MWInput,
    c0s: &[Vec<u64>],
    big_n: u64,
    primes: &[u64],
    multipliers: &[u64],
    opts: SieveOptions,
) -> Result<CosetOutcome> {
    if big_n < 2 {
        return Err(Error::InvalidInput(
            "coset modulus must be at least 2".into(),
        ));
    }
    let group = input.group();
    let small = group.quotient_moduli(big_n);
    for c0 in c0s {
        if c0.len() != small.len() || c0.iter().zip(&small).any(|(c, q)| c >= q) {
            return Err(Error::InvalidInput(format!("class {c0:?} not in A/NA")));
        }
    }
    let mut last = None;
    for &k in multipliers {
        let n = big_n
            .checked_mul(k)
            .ok_or_else(|| Error::InvalidInput("modulus overflow".into()))?;
        let per = group.quotient_size(n) / group.quotient_size(big_n);
        if per * c0s.len() as u128 > opts.cap {
            return Ok(CosetOutcome::CapReached {
                n,
                certificate: last,
            });
        }
        let start = classes_over(&group, c0s, big_n, n);
        let (data, skipped) = scheduled_data(input, n, primes, opts.seed);
        let cert = run_on(input, n, start, &data, skipped, opts.seed);
        if cert.survivors.is_empty() {
            return Ok(CosetOutcome::Eliminated { certificate: cert });
        }
        last = Some(cert);
    }
    let certificate = last.ok_or_else(|| Error::InvalidInput("no multipliers".into()))?;
    let representatives = certificate
        .survivor_classes()
        .iter()
        .map(|c| {
            group
                .smallest_representative(c, certificate.n)
                .iter()
                .map(|x| x.to_string())
                .collect()
        })
        .collect();
    Ok(CosetOutcome::Survived {
        certificate,
        representatives,
    })
}

/// Single-coset form of [`coset_eliminate_set`].
pub fn coset_eliminate(
    input: &MWInput,
    c0: &[u64],
    big_n: u64,
    primes: &[u64],
    multipliers: &[u64],
    opts: SieveOptions,
) -> Result<CosetOutcome> {
    coset_eliminate_set(input, &[c0.to_vec()], big_n, primes, multipliers, opts)
}

/// Class in `A/nA` of a divisor given by its coordinates in the generators.
pub fn class_of(group: &AbstractGroup, coords: &[BigInt], n: u64) -> Vec<u64> {
    coords
        .iter()
        .zip(group.quotient_moduli(n))
        .map(|(c, q)| {
            let q = BigInt::from(q);
            let r = ((c % &q) + &q) % &q;
            u64::try_from(r).expect("small modulus")
        })
        .collect()
}

/// Class of the reduction of `d` at a prime, via `phi_p` (used for
/// cross-checks when a divisor's coordinates are unknown).
pub fn reduced_image(
    input: &MWInput,
    d: &MumfordDiv<BigRational>,
    p: u64,
    n: u64,
    seed: u64,
) -> Result<Vec<u64>> {
    let grp = group_structure_fp(&input.model, p, seed)?;
    let r = reduce_div(d, p)?;
    grp.structure
        .dlog_mod(&grp.jac, &r, Some(n))
        .ok_or_else(|| Error::InvalidInput("dlog failed".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn injected_cyclic_fixture() {
        // A = Z, n = 6; two primes with J(F_p)/6 = Z/6 and Z/3
        let g = AbstractGroup {
            rank: 1,
            torsion: vec![],
        };
        let d1 = PrimeData::from_parts(
            7,
            6,
            12,
            vec![6],
            vec![vec![1]],
            [vec![0], vec![2], vec![3]].into_iter().collect(),
        );
        let d2 = PrimeData::from_parts(
            11,
            6,
            9,
            vec![3],
            vec![vec![2]],
            [vec![0], vec![1]].into_iter().collect(),
        );
        let h = intersect(&g, 6, (0..6).collect(), &[d1.clone(), d2.clone()]);
        assert_eq!(h[0], vec![0, 2, 3]);
        // 2a mod 3 in {0, 1}: a in {0, 2, 3, 5}
        assert_eq!(h[1], vec![0, 2, 3]);
        let h2 = intersect(&g, 6, (0..6).collect(), &[d2, d1]);
        assert_eq!(h2[1], h[1]);
    }

    #[test]
    fn coset_fibres() {
        let g = AbstractGroup {
            rank: 1,
            torsion: vec![2],
        };
        let cls = classes_over(&g, &[vec![1, 0]], 3, 6);
        let moduli = g.quotient_moduli(6);
        let decoded: Vec<Vec<u64>> = cls.iter().map(|&i| decode(i, &moduli)).collect();
        assert_eq!(decoded.len(), 4);
        for c in decoded {
            assert_eq!(c[0] % 3, 1);
        }
    }
}
