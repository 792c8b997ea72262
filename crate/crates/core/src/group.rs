//! Generic finite abelian groups: orders, discrete logs and structure from
//! random sampling.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use num_integer::{gcd, Roots};

use crate::error::{Error, Result};
use crate::integer::{crt, factor_u64};

/// An abelian group written additively.
pub trait AbelianGroup {
    type Elem: Clone + Eq + Hash + Debug;

    fn identity(&self) -> Self::Elem;
    fn op(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;

    fn double(&self, a: &Self::Elem) -> Self::Elem {
        self.op(a, a)
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.op(a, &self.inv(b))
    }

    fn mul(&self, a: &Self::Elem, k: u64) -> Self::Elem {
        let mut acc = self.identity();
        for bit in (0..64 - k.leading_zeros()).rev() {
            acc = self.double(&acc);
            if (k >> bit) & 1 == 1 {
                acc = self.op(&acc, a);
            }
        }
        acc
    }

    fn is_identity(&self, a: &Self::Elem) -> bool {
        *a == self.identity()
    }
}

/// Order of `g`, given a multiple `n` of it.
pub fn order_of<G: AbelianGroup>(grp: &G, g: &G::Elem, n: u64) -> Result<u64> {
    let mut ord = n;
    for (l, _) in factor_u64(n)? {
        while ord.is_multiple_of(l) && grp.is_identity(&grp.mul(g, ord / l)) {
            ord /= l;
        }
    }
    Ok(ord)
}

/// `k` with `k base = target`, `0 <= k < n`, where `n` is a multiple of the
/// order of `base`.
pub fn bsgs<G: AbelianGroup>(grp: &G, base: &G::Elem, target: &G::Elem, n: u64) -> Option<u64> {
    let m = n.sqrt() + 1;
    let mut table = HashMap::with_capacity(m as usize);
    let mut cur = grp.identity();
    for j in 0..m {
        table.entry(cur.clone()).or_insert(j);
        cur = grp.op(&cur, base);
    }
    let giant = grp.inv(&grp.mul(base, m));
    let mut t = target.clone();
    for i in 0..=m {
        if let Some(&j) = table.get(&t) {
            let k = i * m + j;
            if k < n || n == 0 {
                return Some(k % n.max(1));
            }
        }
        t = grp.op(&t, &giant);
    }
    None
}

/// Solve `target = sum c_i e_i` with each `e_i` of order `l`, `c_i < l`.
fn dlog_elementary<G: AbelianGroup>(
    grp: &G,
    basis: &[G::Elem],
    target: &G::Elem,
    l: u64,
) -> Option<Vec<u64>> {
    if basis.is_empty() {
        return grp.is_identity(target).then(Vec::new);
    }
    let rest = &basis[1..];
    let count = l.checked_pow(rest.len() as u32)?;
    // baby steps on the first generator, shared across the outer loop
    let m = l.sqrt() + 1;
    let mut table = HashMap::with_capacity(m as usize);
    let mut cur = grp.identity();
    for j in 0..m {
        table.entry(cur.clone()).or_insert(j);
        cur = grp.op(&cur, &basis[0]);
    }
    let giant = grp.inv(&grp.mul(&basis[0], m));
    for idx in 0..count {
        let mut cs = Vec::with_capacity(rest.len());
        let mut r = idx;
        let mut t = target.clone();
        for e in rest {
            let c = r % l;
            r /= l;
            cs.push(c);
            if c != 0 {
                t = grp.sub(&t, &grp.mul(e, c));
            }
        }
        for i in 0..=m {
            if let Some(&j) = table.get(&t) {
                let c0 = (i * m + j) % l;
                let mut out = vec![c0];
                out.extend(cs);
                return Some(out);
            }
            t = grp.op(&t, &giant);
        }
    }
    None
}

/// An `l`-group with an independent basis `basis[i]` of order `l^exps[i]`.
#[derive(Debug, Clone)]
pub struct LGroup<E> {
    pub l: u64,
    pub basis: Vec<E>,
    pub exps: Vec<u32>,
}

impl<E: Clone + Eq + Hash + Debug> LGroup<E> {
    pub fn order(&self) -> u64 {
        self.exps.iter().map(|&a| self.l.pow(a)).product()
    }

    /// Coordinates of `h` in the basis, or `None` if `h` is outside the
    /// subgroup.
    pub fn dlog<G: AbelianGroup<Elem = E>>(&self, grp: &G, h: &E) -> Option<Vec<u64>> {
        let l = self.l;
        let live: Vec<usize> = (0..self.basis.len())
            .filter(|&i| self.exps[i] > 0)
            .collect();
        if live.is_empty() {
            return grp.is_identity(h).then(|| vec![0; self.basis.len()]);
        }
        let a_max = live.iter().map(|&i| self.exps[i]).max().unwrap();
        let top: Vec<usize> = live
            .iter()
            .copied()
            .filter(|&i| self.exps[i] == a_max)
            .collect();
        // multiply by l^(A-1): only maximal-order generators survive
        let scale = l.pow(a_max - 1);
        let hs = grp.mul(h, scale);
        let es: Vec<E> = top
            .iter()
            .map(|&i| grp.mul(&self.basis[i], scale))
            .collect();
        let digits = dlog_elementary(grp, &es, &hs, l)?;
        let mut rem = h.clone();
        for (&i, &d) in top.iter().zip(&digits) {
            if d != 0 {
                rem = grp.sub(&rem, &grp.mul(&self.basis[i], d));
            }
        }
        // remainder lives in the subgroup with l * b_i in place of b_i
        let mut sub = self.clone();
        for &i in &top {
            sub.basis[i] = grp.mul(&self.basis[i], l);
            sub.exps[i] -= 1;
        }
        let inner = sub.dlog(grp, &rem)?;
        let mut out = inner;
        for (&i, &d) in top.iter().zip(&digits) {
            out[i] = d + l * out[i];
        }
        for (i, c) in out.iter_mut().enumerate() {
            *c %= l.pow(self.exps[i]);
        }
        Some(out)
    }
}

/// Smith normal form of a square integer matrix: returns the diagonal and
/// `vinv` with new generators `f_j = sum_i vinv[j][i] e_i`.
pub fn smith_normal_form(mut r: Vec<Vec<i128>>) -> (Vec<i128>, Vec<Vec<i128>>) {
    let n = r.len();
    let mut vinv: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect();
    for t in 0..n {
        loop {
            // pivot: smallest nonzero entry in the remaining block
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if r[i][j] != 0 && best.is_none_or(|(bi, bj)| r[i][j].abs() < r[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return (diag(&r), vinv);
            };
            r.swap(t, pi);
            if pj != t {
                for row in r.iter_mut() {
                    row.swap(t, pj);
                }
                vinv.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..n {
                let q = r[i][t].div_euclid(r[t][t]);
                if q != 0 {
                    for j in t..n {
                        r[i][j] -= q * r[t][j];
                    }
                }
                if r[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let q = r[t][j].div_euclid(r[t][t]);
                if q != 0 {
                    // col_j -= q col_t; generators: row_t of vinv += q row_j
                    for row in r.iter_mut() {
                        row[j] -= q * row[t];
                    }
                    let (a, b) = if t < j {
                        let (lo, hi) = vinv.split_at_mut(j);
                        (&mut lo[t], &hi[0])
                    } else {
                        unreachable!()
                    };
                    for (x, y) in a.iter_mut().zip(b.iter()) {
                        *x += q * y;
                    }
                }
                if r[t][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold a non-divisible entry into row t
            let mut fixed = true;
            'outer: for i in t + 1..n {
                for j in t + 1..n {
                    if r[i][j] % r[t][t] != 0 {
                        for k in t..n {
                            let v = r[i][k];
                            r[t][k] += v;
                        }
                        fixed = false;
                        break 'outer;
                    }
                }
            }
            if fixed {
                break;
            }
        }
    }
    (diag(&r), vinv)
}

fn diag(r: &[Vec<i128>]) -> Vec<i128> {
    (0..r.len()).map(|i| r[i][i].abs()).collect()
}

/// Structure of the `l`-Sylow subgroup of order `l^e`, from random elements
/// of the whole group of order `n`.
pub fn sylow_structure<G: AbelianGroup>(
    grp: &G,
    n: u64,
    l: u64,
    e: u32,
    sample: &mut impl FnMut() -> G::Elem,
    max_samples: usize,
) -> Result<LGroup<G::Elem>> {
    let target = l.pow(e);
    let cof = n / target;
    let mut cur = LGroup {
        l,
        basis: Vec::new(),
        exps: Vec::new(),
    };
    let mut samples = 0;
    while cur.order() < target {
        samples += 1;
        if samples > max_samples {
            return Err(Error::InvalidInput(format!(
                "sylow {l}^{e}: sampling did not generate the subgroup"
            )));
        }
        let g = grp.mul(&sample(), cof);
        // smallest l^j with l^j g in the current subgroup
        let mut j = 0u32;
        let mut gj = g.clone();
        let coords = loop {
            if let Some(c) = cur.dlog(grp, &gj) {
                break c;
            }
            gj = grp.mul(&gj, l);
            j += 1;
            if j > e {
                return Err(Error::InvalidInput("element order exceeds sylow".into()));
            }
        };
        if j == 0 {
            continue;
        }
        // relations: l^a_i b_i = 0, l^j g - sum c_i b_i = 0
        let k = cur.basis.len();
        let mut rel = vec![vec![0i128; k + 1]; k + 1];
        for i in 0..k {
            rel[i][i] = i128::from(l).pow(cur.exps[i]);
        }
        for i in 0..k {
            rel[k][i] = -(coords[i] as i128);
        }
        rel[k][k] = i128::from(l).pow(j);
        let (d, vinv) = smith_normal_form(rel);
        let mut gens: Vec<G::Elem> = cur.basis.clone();
        gens.push(g);
        let mut basis = Vec::new();
        let mut exps = Vec::new();
        for (row, &dj) in vinv.iter().zip(&d) {
            if dj == 1 {
                continue;
            }
            let mut a = 0u32;
            let mut t = dj;
            while t % i128::from(l) == 0 {
                t /= i128::from(l);
                a += 1;
            }
            debug_assert_eq!(t, 1);
            let mut elem = grp.identity();
            for (c, gi) in row.iter().zip(&gens) {
                let c = c.rem_euclid(i128::from(target)) as u64;
                if c != 0 {
                    elem = grp.op(&elem, &grp.mul(gi, c));
                }
            }
            basis.push(elem);
            exps.push(a);
        }
        cur = LGroup { l, basis, exps };
    }
    // sort by increasing order
    let mut idx: Vec<usize> = (0..cur.basis.len()).collect();
    idx.sort_by_key(|&i| cur.exps[i]);
    Ok(LGroup {
        l,
        basis: idx.iter().map(|&i| cur.basis[i].clone()).collect(),
        exps: idx.iter().map(|&i| cur.exps[i]).collect(),
    })
}

/// Invariant-factor decomposition with a basis and discrete logarithms.
#[derive(Debug, Clone)]
pub struct GroupStructure<E> {
    pub order: u64,
    /// `n_1 | n_2 | ...`, all `> 1`.
    pub invariants: Vec<u64>,
    pub basis: Vec<E>,
    pub sylows: Vec<LGroup<E>>,
}

impl<E: Clone + Eq + Hash + Debug> GroupStructure<E> {
    /// Coordinates of `h` with respect to `basis`, modulo the invariants.
    pub fn dlog<G: AbelianGroup<Elem = E>>(&self, grp: &G, h: &E) -> Option<Vec<u64>> {
        self.dlog_mod(grp, h, None)
    }

    /// Coordinates modulo `gcd(n_i, n)`, the image in `G / nG`; only the
    /// Sylow subgroups for primes dividing `n` are visited.
    pub fn dlog_mod<G: AbelianGroup<Elem = E>>(
        &self,
        grp: &G,
        h: &E,
        n: Option<u64>,
    ) -> Option<Vec<u64>> {
        let k = self.invariants.len();
        let mut parts: Vec<Vec<(u128, u128)>> = vec![Vec::new(); k];
        for s in &self.sylows {
            if n.is_some_and(|n| n % s.l != 0) {
                continue;
            }
            let le = s.order();
            let cof = self.order / le;
            let hl = grp.mul(h, cof);
            let c = s.dlog(grp, &hl)?;
            // undo the cofactor on each cyclic component; sylow generators
            // are aligned to the last invariants
            let off = k - s.basis.len();
            for (i, ci) in c.iter().enumerate() {
                let m = s.l.pow(s.exps[i]);
                let inv = crate::integer::inv_mod(cof % m, m).unwrap_or(0);
                let target = n.map_or(m, |n| gcd(m, n));
                let v = ((*ci as u128) * (inv as u128)) % (target as u128);
                parts[off + i].push((v, target as u128));
            }
        }
        Some(parts.iter().map(|rs| crt(rs).0 as u64).collect())
    }

    /// `gcd(n_i, n)` for each invariant factor.
    pub fn quotient_moduli(&self, n: u64) -> Vec<u64> {
        self.invariants.iter().map(|&m| gcd(m, n)).collect()
    }

    /// `sum c_i basis_i`.
    pub fn element<G: AbelianGroup<Elem = E>>(&self, grp: &G, coords: &[u64]) -> E {
        let mut acc = grp.identity();
        for (b, &c) in self.basis.iter().zip(coords) {
            if c != 0 {
                acc = grp.op(&acc, &grp.mul(b, c));
            }
        }
        acc
    }
}

/// Full structure of a group of known order `n`.
pub fn group_structure<G: AbelianGroup>(
    grp: &G,
    n: u64,
    sample: &mut impl FnMut() -> G::Elem,
) -> Result<GroupStructure<G::Elem>> {
    let mut sylows = Vec::new();
    for (l, e) in factor_u64(n)? {
        sylows.push(sylow_structure(
            grp,
            n,
            l,
            e,
            sample,
            200 + 50 * e as usize,
        )?);
    }
    let k = sylows.iter().map(|s| s.basis.len()).max().unwrap_or(0);
    let mut invariants = vec![1u64; k];
    let mut basis = vec![grp.identity(); k];
    for s in &sylows {
        let off = k - s.basis.len();
        for (i, b) in s.basis.iter().enumerate() {
            invariants[off + i] *= s.l.pow(s.exps[i]);
            basis[off + i] = grp.op(&basis[off + i], b);
        }
    }
    Ok(GroupStructure {
        order: n,
        invariants,
        basis,
        sylows,
    })
}

/// `Z/n_1 x ... x Z/n_k` with componentwise addition; used in tests and for
/// injected sieve data.
#[derive(Debug, Clone)]
pub struct ProductGroup {
    pub moduli: Vec<u64>,
}

impl AbelianGroup for ProductGroup {
    type Elem = Vec<u64>;

    fn identity(&self) -> Vec<u64> {
        vec![0; self.moduli.len()]
    }

    fn op(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter()
            .zip(b)
            .zip(&self.moduli)
            .map(|((x, y), m)| ((*x as u128 + *y as u128) % *m as u128) as u64)
            .collect()
    }

    fn inv(&self, a: &Vec<u64>) -> Vec<u64> {
        a.iter()
            .zip(&self.moduli)
            .map(|(x, m)| (m - x % m) % m)
            .collect()
    }
}
