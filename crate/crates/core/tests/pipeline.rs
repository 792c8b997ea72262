mod common;

use std::sync::Mutex;

use common::*;
use genus2_core::ipoly::{from_desc, to_coeff_list};
use genus2_core::jacobian::DivRecord;
use genus2_core::pipeline::{
    curve_key, decide, decide_cached, merge_census, negate_x, parse_and_normalize, run_census,
    Cache, CensusConfig, DecideOptions, DecisionRecord, GeneratorSpec, Outcome, Stage, Status,
    TorsionRecord,
};
use proptest::prelude::*;

fn quick() -> DecideOptions {
    DecideOptions {
        search_bounds: vec![80],
        ..Default::default()
    }
}

fn curve(desc: &[i64]) -> genus2_core::curve::HypCurve {
    parse_and_normalize(&to_coeff_list(&from_desc(desc))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn key_is_invariant_under_negation(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = random_curve(&mut r, &[5, 6], 5);
        let a = parse_and_normalize(&to_coeff_list(c.f())).unwrap();
        let b = parse_and_normalize(&to_coeff_list(&negate_x(c.f()))).unwrap();
        prop_assert_eq!(curve_key(&a), curve_key(&b));
        prop_assert_eq!(a.f(), b.f());
    }
}

#[test]
fn golden_is_empty_by_descent() {
    let c = curve(&[-1, -2, -1, -1, -2, -1, 2]);
    let rec = decide(&c, &DecideOptions::default());
    assert_eq!(rec.status, Status::EmptyDescent);
    assert!(rec.complete && rec.points.is_empty());
    assert!(rec.certificates.local.as_ref().unwrap().verdict);
    let json = serde_json::to_string(&rec).unwrap();
    let back: DecisionRecord = serde_json::from_str(&json).unwrap();
    assert_eq!(back, rec);
}

#[test]
fn chain_stops_at_first_verdict() {
    let pts = decide(&curve(&[1, 0, 0, 0, 0, 1]), &quick());
    assert_eq!(pts.status, Status::HasPoints);
    assert!(!pts.complete);
    assert!(pts.certificates.local.is_none());
    let neg = decide(&curve(&[-1, 0, 0, 0, 0, 0, -1]), &quick());
    assert_eq!(neg.status, Status::EmptyLocal);
    assert!(neg.complete && neg.certificates.descent.is_none());
    let only_search = DecideOptions {
        stop_after: Stage::Search,
        ..quick()
    };
    let u = decide(&curve(&[-1, 0, 0, 0, 0, 0, -1]), &only_search);
    assert_eq!(u.status, Status::Undecided);
}

fn spec_of(fx: &Fixture) -> GeneratorSpec {
    GeneratorSpec {
        free: fx.input.free.iter().map(DivRecord::from_q).collect(),
        torsion: fx
            .input
            .torsion
            .iter()
            .map(|(d, o)| TorsionRecord {
                div: DivRecord::from_q(d),
                order: *o,
            })
            .collect(),
        index_coprime: fx.input.index_coprime,
    }
}

#[test]
fn rank_zero_is_determined() {
    let fx = rank0();
    let spec = spec_of(&fx);
    let json = serde_json::to_string(&spec).unwrap();
    assert_eq!(GeneratorSpec::from_json(&json).unwrap(), spec);
    let opts = DecideOptions {
        generators: Some(spec),
        ..quick()
    };
    let rec = decide(&fx.curve, &opts);
    assert_eq!(
        rec.status,
        Status::DeterminedComplete,
        "{:?}",
        rec.diagnostics
    );
    assert!(rec.complete);
    let mut expect = fx.points.clone();
    expect.sort();
    assert_eq!(rec.points, expect);
}

#[test]
fn cache_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let c = curve(&[-1, -2, -1, -1, -2, -1, 2]);
    let opts = quick();
    let cache = Mutex::new(Cache::open(dir.path()).unwrap());
    let (a, hit_a) = decide_cached(&c, &opts, Some(&cache)).unwrap();
    let (b, hit_b) = decide_cached(&c, &opts, Some(&cache)).unwrap();
    assert!(!hit_a && hit_b);
    assert_eq!(a, b);
    drop(cache);
    let reopened = Mutex::new(Cache::open(dir.path()).unwrap());
    assert_eq!(reopened.lock().unwrap().len(), 1);
    let (c2, hit) = decide_cached(&c, &opts, Some(&reopened)).unwrap();
    assert!(hit);
    assert_eq!(c2, a);
    // a different seed is a different key, and the record matches a fresh run
    let other = DecideOptions { seed: 9, ..quick() };
    let (d, hit) = decide_cached(&c, &other, Some(&reopened)).unwrap();
    assert!(!hit);
    assert_ne!(d.key, a.key);
    assert_eq!(d.without_timings().status, a.status);
    assert_eq!(decide(&c, &opts).without_timings(), a.without_timings());
}

fn small_census() -> CensusConfig {
    CensusConfig {
        samples: Some(60),
        seed: 5,
        search_bounds: vec![80],
        ..Default::default()
    }
}

#[test]
fn census_is_deterministic() {
    let cfg = small_census();
    let a = run_census(&cfg, None).unwrap();
    let b = run_census(&cfg, None).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.total + a.skipped, 60);
    let sum: u64 = a.outcomes.values().map(|f| f.num).sum();
    assert_eq!(sum, a.total);
    assert!(a.outcomes.get(&Outcome::Error).map_or(0, |f| f.num) == 0);
}

#[test]
fn shards_merge_to_the_full_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_census();
    let full = run_census(&cfg, None).unwrap();
    for shard in 0..3 {
        let c = CensusConfig {
            shard,
            shards: 3,
            ..cfg.clone()
        };
        run_census(&c, Some(dir.path())).unwrap();
    }
    let merged = merge_census(
        dir.path(),
        &CensusConfig {
            shards: 3,
            ..cfg.clone()
        },
    )
    .unwrap();
    assert_eq!(merged, full);
    // a rerun resumes from the log without re-evaluating
    let again = run_census(
        &CensusConfig {
            shard: 1,
            shards: 3,
            ..cfg
        },
        Some(dir.path()),
    )
    .unwrap();
    assert_eq!(again.total + again.skipped, 20);
}

#[test]
fn census_rejects_bad_configs() {
    let over = CensusConfig {
        budget: 10,
        ..small_census()
    };
    assert!(run_census(&over, None).is_err());
    let bad = CensusConfig {
        degrees: vec![4],
        ..small_census()
    };
    assert!(run_census(&bad, None).is_err());
    let shard = CensusConfig {
        shard: 2,
        shards: 2,
        ..small_census()
    };
    assert!(run_census(&shard, None).is_err());
}
