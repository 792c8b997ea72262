//! Orchestration: parsing, the `decide` chain, result caching and the census.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chabauty::{
    determine_rational_points, Determination, DeterminationStatus, DetermineOptions,
};
use crate::curve::{make_curve, HypCurve};
use crate::descent::{selmer_set, DescentVerdict, SelmerOutcome};
use crate::error::{Error, Result};
use crate::ipoly::{parse_ipoly, to_coeff_list, IPoly};
use crate::jacobian::{to_odd_degree_model, DivRecord};
use crate::local::{everywhere_locally, ElsReport};
use crate::search::{search, RatPoint, SearchReport, DEFAULT_MODULI};
use crate::serial;
use crate::sieve::MWInput;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const CACHE_ENV: &str = "GENUS2_CACHE_DIR";
pub const CACHE_FILE: &str = "decisions.jsonl";
pub const QUICK_BOUND: u64 = 80;
pub const FULL_BOUND: u64 = 1519;

/// Is the top nonzero odd-index coefficient negative?
fn needs_flip(f: &IPoly) -> bool {
    f.coeffs()
        .iter()
        .enumerate()
        .rev()
        .find(|(i, c)| i % 2 == 1 && !c.is_zero())
        .is_some_and(|(_, c)| c.is_negative())
}

/// `f(-x)`.
pub fn negate_x(f: &IPoly) -> IPoly {
    IPoly::new(
        f.coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
            .collect(),
    )
}

/// Canonical representative of `{f(x), f(-x)}`: the top nonzero odd-index
/// coefficient is positive, so odd-degree models get `lc > 0`.
pub fn normalize(f: &IPoly) -> IPoly {
    if needs_flip(f) {
        negate_x(f)
    } else {
        f.clone()
    }
}

fn curve_text(line: &str) -> Result<String> {
    let t = line.split('#').next().unwrap_or("").trim();
    if t.starts_with('{') {
        let v: serde_json::Value = serde_json::from_str(t).map_err(|e| Error::Parse {
            pos: e.column(),
            msg: e.to_string(),
        })?;
        return v
            .get("curve")
            .and_then(|c| c.as_str())
            .map(str::to_string)
            .ok_or(Error::Parse {
                pos: 0,
                msg: "missing \"curve\" field".into(),
            });
    }
    if t.starts_with('"') {
        return serde_json::from_str(t).map_err(|e| Error::Parse {
            pos: e.column(),
            msg: e.to_string(),
        });
    }
    Ok(t.to_string())
}

/// Parse a coefficient list (leading first), an expression in `x`, or a JSON
/// line carrying either, and return the normalized genus-2 curve.
pub fn parse_and_normalize(line: &str) -> Result<HypCurve> {
    let f = parse_ipoly(&curve_text(line)?)?;
    let curve = make_curve(normalize(&f))?;
    if curve.genus() != 2 {
        return Err(Error::DegreeOutOfRange(curve.degree()));
    }
    Ok(curve)
}

/// Cache key of a curve: its normalized coefficient list.
pub fn curve_key(curve: &HypCurve) -> String {
    to_coeff_list(&normalize(curve.f()))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TorsionRecord {
    pub div: DivRecord,
    #[serde(with = "serial::u64_str")]
    pub order: u64,
}

/// Mordell-Weil generators on the odd-degree model of the normalized curve.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct GeneratorSpec {
    #[serde(default)]
    pub free: Vec<DivRecord>,
    #[serde(default)]
    pub torsion: Vec<TorsionRecord>,
    /// Assert that the generated subgroup has index coprime to the sieve moduli.
    #[serde(default)]
    pub index_coprime: bool,
}

impl GeneratorSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse {
            pos: e.column(),
            msg: e.to_string(),
        })
    }

    pub fn to_input(&self, curve: &HypCurve) -> Result<MWInput> {
        let model = to_odd_degree_model(curve)?;
        let free = self
            .free
            .iter()
            .map(|d| d.to_q())
            .collect::<Result<Vec<_>>>()?;
        let torsion = self
            .torsion
            .iter()
            .map(|t| Ok((t.div.to_q()?, t.order)))
            .collect::<Result<Vec<_>>>()?;
        MWInput::new(model, free, torsion, self.index_coprime)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Stage {
    Search,
    Local,
    Descent,
    Determine,
}

#[derive(Debug, Clone)]
pub struct DecideOptions {
    pub search_bounds: Vec<u64>,
    pub seed: u64,
    pub generators: Option<GeneratorSpec>,
    pub determine: DetermineOptions,
    /// Last stage of the chain to run.
    pub stop_after: Stage,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            search_bounds: vec![QUICK_BOUND, FULL_BOUND],
            seed: 0,
            generators: None,
            determine: DetermineOptions::default(),
            stop_after: Stage::Determine,
        }
    }
}

impl DecideOptions {
    /// Hash of every option that influences the record.
    pub fn fingerprint(&self) -> String {
        let v = serde_json::json!({
            "bounds": self.search_bounds.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            "seed": self.seed.to_string(),
            "generators": self.generators,
            "pmax": self.determine.pmax.to_string(),
            "sieve_prime_bound": self.determine.sieve_prime_bound.to_string(),
            "stop_after": self.stop_after,
            "version": VERSION,
        });
        let h = Sha256::digest(v.to_string().as_bytes());
        hex::encode(&h[..8])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    HasPoints,
    EmptyLocal,
    EmptyDescent,
    EmptySieve,
    DeterminedComplete,
    Undecided,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificates {
    pub search: Vec<SearchReport>,
    pub local: Option<ElsReport>,
    pub descent: Option<SelmerOutcome>,
    pub determination: Option<Determination>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub stage: String,
    #[serde(with = "serial::u64_str")]
    pub ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionRecord {
    /// Normalized coefficient list, leading first.
    pub curve: String,
    pub key: String,
    pub status: Status,
    /// `points` is provably all of `C(Q)`.
    pub complete: bool,
    pub points: Vec<RatPoint>,
    pub certificates: Certificates,
    pub diagnostics: Vec<String>,
    pub timings: Vec<Timing>,
    pub version: String,
    #[serde(with = "serial::u64_str")]
    pub seed: u64,
}

impl DecisionRecord {
    pub fn is_decided(&self) -> bool {
        self.status != Status::Undecided
    }

    /// Copy with timings and search wall clocks zeroed.
    pub fn without_timings(&self) -> Self {
        let mut r = self.clone();
        r.timings.iter_mut().for_each(|t| t.ms = 0);
        r.certificates.search.iter_mut().for_each(|s| s.wall_ms = 0);
        r
    }
}

pub fn record_key(curve: &HypCurve, opts: &DecideOptions) -> String {
    format!("{}|{}", curve_key(curve), opts.fingerprint())
}

fn timed<T>(timings: &mut Vec<Timing>, stage: &str, f: impl FnOnce() -> T) -> T {
    let t = Instant::now();
    let out = f();
    timings.push(Timing {
        stage: stage.into(),
        ms: t.elapsed().as_millis() as u64,
    });
    out
}

fn run_determination(
    curve: &HypCurve,
    spec: &GeneratorSpec,
    known: &[RatPoint],
    opts: &DecideOptions,
) -> Result<Determination> {
    let input = spec.to_input(curve)?;
    let mut dopts = opts.determine.clone();
    dopts.seed = opts.seed;
    determine_rational_points(&input, known, &dopts)
}

/// Run the decision chain on a normalized curve.
pub fn decide(curve: &HypCurve, opts: &DecideOptions) -> DecisionRecord {
    let mut rec = DecisionRecord {
        curve: curve_key(curve),
        key: record_key(curve, opts),
        status: Status::Undecided,
        complete: false,
        points: Vec::new(),
        certificates: Certificates::default(),
        diagnostics: Vec::new(),
        timings: Vec::new(),
        version: VERSION.into(),
        seed: opts.seed,
    };
    let mut timings = Vec::new();
    for &h in &opts.search_bounds {
        let rep = timed(&mut timings, &format!("search_{h}"), || {
            search(curve, h, &DEFAULT_MODULI)
        });
        if let Some(bad) = rep.points.iter().find(|p| !p.verify(curve)) {
            rec.diagnostics
                .push(format!("search returned an invalid point {bad:?}"));
        }
        let found = !rep.points.is_empty();
        rec.points = rep.points.clone();
        rec.certificates.search.push(rep);
        if found {
            break;
        }
    }
    if !rec.points.is_empty() {
        rec.status = Status::HasPoints;
    }
    let want = |s: Stage| opts.stop_after >= s;
    if rec.points.is_empty() && want(Stage::Local) {
        match timed(&mut timings, "local", || everywhere_locally(curve)) {
            Ok(r) => {
                let ok = r.verdict;
                rec.certificates.local = Some(r);
                if !ok {
                    rec.status = Status::EmptyLocal;
                    rec.complete = true;
                }
            }
            Err(e) => rec.diagnostics.push(format!("local: {e}")),
        }
    }
    let els = rec.certificates.local.as_ref().is_some_and(|r| r.verdict);
    if rec.status == Status::Undecided && els && want(Stage::Descent) {
        match timed(&mut timings, "descent", || selmer_set(curve)) {
            Ok(s) => {
                if s.verdict == DescentVerdict::EmptyProven {
                    rec.status = Status::EmptyDescent;
                    rec.complete = true;
                }
                rec.certificates.descent = Some(s);
            }
            Err(e) => rec.diagnostics.push(format!("descent: {e}")),
        }
    }
    if !rec.complete && want(Stage::Determine) {
        if let Some(spec) = &opts.generators {
            let known = rec.points.clone();
            match timed(&mut timings, "determine", || {
                run_determination(curve, spec, &known, opts)
            }) {
                Ok(det) => {
                    if det.status == DeterminationStatus::ProvenComplete {
                        rec.complete = true;
                        rec.points = det.points.clone();
                        rec.points.sort();
                        rec.status = if rec.points.is_empty() {
                            Status::EmptySieve
                        } else {
                            Status::DeterminedComplete
                        };
                    } else {
                        rec.diagnostics.extend(det.diagnostics.iter().cloned());
                    }
                    rec.certificates.determination = Some(det);
                }
                Err(e) => rec.diagnostics.push(format!("determine: {e}")),
            }
        }
    }
    rec.timings = timings;
    rec
}

/// Append-only JSONL store of decision records keyed by [`record_key`].
pub struct Cache {
    path: PathBuf,
    records: HashMap<String, DecisionRecord>,
    file: File,
}

impl Cache {
    pub fn open(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(CACHE_FILE);
        let mut records = HashMap::new();
        if path.exists() {
            for line in BufReader::new(File::open(&path)?).lines() {
                if let Ok(r) = serde_json::from_str::<DecisionRecord>(&line?) {
                    records.insert(r.key.clone(), r);
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Cache {
            path,
            records,
            file,
        })
    }

    /// Directory from `flag`, else from the environment; `None` when neither is set.
    pub fn resolve_dir(flag: Option<&Path>) -> Option<PathBuf> {
        flag.map(Path::to_path_buf)
            .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&DecisionRecord> {
        self.records.get(key)
    }

    pub fn put(&mut self, rec: &DecisionRecord) -> Result<()> {
        writeln!(self.file, "{}", serde_json::to_string(rec)?)?;
        self.file.flush()?;
        self.records.insert(rec.key.clone(), rec.clone());
        Ok(())
    }
}

/// [`decide`] through an optional cache; the flag is true on a cache hit.
pub fn decide_cached(
    curve: &HypCurve,
    opts: &DecideOptions,
    cache: Option<&Mutex<Cache>>,
) -> Result<(DecisionRecord, bool)> {
    let key = record_key(curve, opts);
    if let Some(c) = cache {
        if let Some(r) = c.lock().expect("cache lock").get(&key) {
            return Ok((r.clone(), true));
        }
    }
    let rec = decide(curve, opts);
    if let Some(c) = cache {
        c.lock().expect("cache lock").put(&rec)?;
    }
    Ok((rec, false))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusConfig {
    #[serde(with = "serial::u64_str")]
    pub bound: u64,
    #[serde(with = "serial::u64_vec")]
    pub degrees: Vec<u64>,
    /// Number of uniform samples; `None` enumerates the whole box.
    #[serde(with = "serial::opt_u64_str")]
    pub samples: Option<u64>,
    #[serde(with = "serial::u64_str")]
    pub seed: u64,
    pub stop_after: Stage,
    #[serde(with = "serial::u64_vec")]
    pub search_bounds: Vec<u64>,
    /// Largest number of curves a run may evaluate.
    #[serde(with = "serial::u64_str")]
    pub budget: u64,
    #[serde(with = "serial::u64_str")]
    pub shard: u64,
    #[serde(with = "serial::u64_str")]
    pub shards: u64,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig {
            bound: 3,
            degrees: vec![5, 6],
            samples: Some(1000),
            seed: 0,
            stop_after: Stage::Descent,
            search_bounds: vec![QUICK_BOUND, FULL_BOUND],
            budget: 10_000_000,
            shard: 0,
            shards: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    HasPoints,
    EmptyLocal,
    EmptyDescent,
    Undecided,
    Error,
    /// Not a genus-2 curve, or not the canonical representative in the box.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusEntry {
    #[serde(with = "serial::u64_str")]
    pub index: u64,
    pub curve: String,
    pub outcome: Outcome,
    /// Search bound at which the first point appeared.
    pub found_at: Option<String>,
    pub els: Option<bool>,
    pub error: Option<String>,
}

/// Exact count with its denominator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fraction {
    #[serde(with = "serial::u64_str")]
    pub num: u64,
    #[serde(with = "serial::u64_str")]
    pub den: u64,
}

impl Fraction {
    pub fn value(&self) -> f64 {
        if self.den == 0 {
            0.0
        } else {
            self.num as f64 / self.den as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub config: CensusConfig,
    /// Curves evaluated (skipped indices excluded).
    #[serde(with = "serial::u64_str")]
    pub total: u64,
    #[serde(with = "serial::u64_str")]
    pub skipped: u64,
    /// Mutually exclusive outcomes; numerators sum to `total`.
    pub outcomes: BTreeMap<Outcome, Fraction>,
    /// Point found at each search bound (first success only).
    pub found_at: BTreeMap<String, Fraction>,
    pub everywhere_local: Fraction,
    pub local_but_descent_empty: Fraction,
}

impl CensusReport {
    pub fn from_entries(config: &CensusConfig, entries: &[CensusEntry]) -> Self {
        let skipped = entries
            .iter()
            .filter(|e| e.outcome == Outcome::Skipped)
            .count() as u64;
        let live: Vec<&CensusEntry> = entries
            .iter()
            .filter(|e| e.outcome != Outcome::Skipped)
            .collect();
        let total = live.len() as u64;
        let frac = |num: usize| Fraction {
            num: num as u64,
            den: total,
        };
        let mut outcomes = BTreeMap::new();
        for o in [
            Outcome::HasPoints,
            Outcome::EmptyLocal,
            Outcome::EmptyDescent,
            Outcome::Undecided,
            Outcome::Error,
        ] {
            outcomes.insert(o, frac(live.iter().filter(|e| e.outcome == o).count()));
        }
        let mut found_at = BTreeMap::new();
        for h in &config.search_bounds {
            let hs = h.to_string();
            let n = live
                .iter()
                .filter(|e| e.found_at.as_deref() == Some(hs.as_str()))
                .count();
            found_at.insert(hs, frac(n));
        }
        CensusReport {
            config: config.clone(),
            total,
            skipped,
            outcomes,
            found_at,
            everywhere_local: frac(live.iter().filter(|e| e.els == Some(true)).count()),
            local_but_descent_empty: frac(
                live.iter()
                    .filter(|e| e.outcome == Outcome::EmptyDescent)
                    .count(),
            ),
        }
    }
}

fn box_size(bound: u64, degree: u64) -> u64 {
    (2 * bound) * (2 * bound + 1).pow(degree as u32)
}

impl CensusConfig {
    /// Number of indices in the run before sharding.
    pub fn population(&self) -> u64 {
        match self.samples {
            Some(n) => n,
            None => self.degrees.iter().map(|&d| box_size(self.bound, d)).sum(),
        }
    }

    pub fn fingerprint(&self) -> String {
        let mut c = self.clone();
        c.shard = 0;
        c.shards = 1;
        let h = Sha256::digest(serde_json::to_string(&c).expect("serializable").as_bytes());
        hex::encode(&h[..8])
    }

    /// The polynomial at `index`; `None` for non-squarefree box entries.
    pub fn polynomial(&self, index: u64) -> Option<IPoly> {
        let b = self.bound as i64;
        match self.samples {
            Some(_) => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(index);
                loop {
                    let d = self.degrees[rng.gen_range(0..self.degrees.len())];
                    let mut c: Vec<BigInt> = (0..d)
                        .map(|_| BigInt::from(rng.gen_range(-b..=b)))
                        .collect();
                    let mut lc = 0;
                    while lc == 0 {
                        lc = rng.gen_range(-b..=b);
                    }
                    c.push(BigInt::from(lc));
                    let f = IPoly::new(c);
                    if make_curve(f.clone()).is_ok() {
                        return Some(f);
                    }
                }
            }
            None => {
                let mut idx = index;
                for &d in &self.degrees {
                    let n = box_size(self.bound, d);
                    if idx >= n {
                        idx -= n;
                        continue;
                    }
                    let w = (2 * b + 1) as u64;
                    let mut c = Vec::with_capacity(d as usize + 1);
                    for _ in 0..d {
                        c.push(BigInt::from((idx % w) as i64 - b));
                        idx /= w;
                    }
                    let lc = idx as i64 - b;
                    c.push(BigInt::from(if lc >= 0 { lc + 1 } else { lc }));
                    let f = IPoly::new(c);
                    return make_curve(f.clone()).ok().map(|_| f);
                }
                None
            }
        }
    }
}

/// Evaluate one census index.
pub fn census_entry(config: &CensusConfig, index: u64) -> CensusEntry {
    let skipped = |curve: String| CensusEntry {
        index,
        curve,
        outcome: Outcome::Skipped,
        found_at: None,
        els: None,
        error: None,
    };
    let Some(f) = config.polynomial(index) else {
        return skipped(String::new());
    };
    if config.samples.is_none() && normalize(&f) != f {
        return skipped(to_coeff_list(&f));
    }
    let curve = match make_curve(normalize(&f)) {
        Ok(c) if c.genus() == 2 => c,
        _ => return skipped(to_coeff_list(&f)),
    };
    let opts = DecideOptions {
        search_bounds: config.search_bounds.clone(),
        seed: config.seed,
        generators: None,
        determine: DetermineOptions::default(),
        stop_after: config.stop_after,
    };
    let rec = decide(&curve, &opts);
    let found_at = rec
        .certificates
        .search
        .iter()
        .find(|s| !s.points.is_empty())
        .map(|s| s.bound.to_string());
    let els = if found_at.is_some() {
        Some(true)
    } else {
        rec.certificates.local.as_ref().map(|r| r.verdict)
    };
    let outcome = match rec.status {
        Status::HasPoints | Status::DeterminedComplete => Outcome::HasPoints,
        Status::EmptyLocal => Outcome::EmptyLocal,
        Status::EmptyDescent | Status::EmptySieve => Outcome::EmptyDescent,
        Status::Undecided if !rec.diagnostics.is_empty() => Outcome::Error,
        Status::Undecided => Outcome::Undecided,
    };
    CensusEntry {
        index,
        curve: rec.curve,
        outcome,
        found_at,
        els,
        error: rec.diagnostics.first().cloned(),
    }
}

const CENSUS_CHUNK: usize = 256;

/// Run one shard of a census. With `log_dir`, entries are appended to a JSONL
/// log as they finish and an interrupted run resumes from it.
pub fn run_census(config: &CensusConfig, log_dir: Option<&Path>) -> Result<CensusReport> {
    if config.shards == 0 || config.shard >= config.shards {
        return Err(Error::InvalidInput(format!(
            "shard {} of {}",
            config.shard, config.shards
        )));
    }
    if config.degrees.is_empty() || config.degrees.iter().any(|d| !(5..=6).contains(d)) {
        return Err(Error::InvalidInput("degrees must be 5 or 6".into()));
    }
    let population = config.population();
    let mine = (population + config.shards - 1 - config.shard) / config.shards;
    if mine > config.budget {
        return Err(Error::InvalidInput(format!(
            "{mine} curves exceed the budget {}",
            config.budget
        )));
    }
    let mut entries: Vec<CensusEntry> = Vec::new();
    let mut log = None;
    if let Some(dir) = log_dir {
        std::fs::create_dir_all(dir)?;
        let path = census_log_path(dir, config);
        if path.exists() {
            for line in BufReader::new(File::open(&path)?).lines() {
                if let Ok(e) = serde_json::from_str::<CensusEntry>(&line?) {
                    entries.push(e);
                }
            }
        }
        log = Some(OpenOptions::new().create(true).append(true).open(&path)?);
    }
    let done: HashSet<u64> = entries.iter().map(|e| e.index).collect();
    entries.retain(|e| e.index % config.shards == config.shard);
    let todo: Vec<u64> = (config.shard..population)
        .step_by(config.shards as usize)
        .filter(|i| !done.contains(i))
        .collect();
    for chunk in todo.chunks(CENSUS_CHUNK) {
        let batch: Vec<CensusEntry> = chunk.par_iter().map(|&i| census_entry(config, i)).collect();
        if let Some(f) = log.as_mut() {
            for e in &batch {
                writeln!(f, "{}", serde_json::to_string(e)?)?;
            }
            f.flush()?;
        }
        entries.extend(batch);
    }
    entries.sort_by_key(|e| e.index);
    entries.dedup_by_key(|e| e.index);
    Ok(CensusReport::from_entries(config, &entries))
}

pub fn census_log_path(dir: &Path, config: &CensusConfig) -> PathBuf {
    dir.join(format!(
        "census-{}-shard{}of{}.jsonl",
        config.fingerprint(),
        config.shard,
        config.shards
    ))
}

/// Combine the logs of every shard of `config` found in `dir`.
pub fn merge_census(dir: &Path, config: &CensusConfig) -> Result<CensusReport> {
    let mut entries = Vec::new();
    for shard in 0..config.shards {
        let mut c = config.clone();
        c.shard = shard;
        let path = census_log_path(dir, &c);
        if !path.exists() {
            return Err(Error::Io(format!("missing shard log {}", path.display())));
        }
        for line in BufReader::new(File::open(&path)?).lines() {
            if let Ok(e) = serde_json::from_str::<CensusEntry>(&line?) {
                entries.push(e);
            }
        }
    }
    entries.sort_by_key(|e| e.index);
    entries.dedup_by_key(|e| e.index);
    let mut c = config.clone();
    c.shard = 0;
    c.shards = 1;
    Ok(CensusReport::from_entries(&c, &entries))
}
