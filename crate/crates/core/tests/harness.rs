use dworklab::harness::{run_suite, JobSpec, MuChoice, PolySource, Status, Suite, SCHEMA};
use dworklab::laurent::LaurentPoly;
use dworklab::par::Execution;
use dworklab::Error;
use num_bigint::BigInt;
use std::str::FromStr;

fn poly(n: usize, terms: &[(&[i64], i64)]) -> LaurentPoly<BigInt> {
    LaurentPoly::from_int_terms(n, terms)
}

fn hesse(c: i64) -> PolySource {
    PolySource::inline(&poly(
        2,
        &[(&[0, 0], c), (&[1, 0], 1), (&[0, 1], 1), (&[-1, -1], 1)],
    ))
}

/// A grid small enough to run every suite in well under a second or two.
fn small(suite: Suite) -> JobSpec {
    let base = JobSpec::for_suite(suite);
    match suite {
        Suite::Hhw => JobSpec {
            polys: vec![hesse(1)],
            primes: vec![5],
            max_steps: 1,
            ..base
        },
        Suite::Asd => JobSpec {
            curves: vec![[-1, 0]],
            primes: vec![5],
            max_steps: 2,
            ..base
        },
        Suite::Gauss => JobSpec {
            polys: base.polys[..1].to_vec(),
            primes: vec![3],
            bound: 9,
            ..base
        },
        Suite::Dwork => JobSpec {
            families: vec![("simplicial".into(), 2)],
            primes: vec![3],
            scales: vec![[1, 1]],
            ..base
        },
        Suite::Super => JobSpec {
            primes: vec![3],
            max_steps: 1,
            vectors: vec![vec![1, 1]],
            ..base
        },
        Suite::Crosscheck => JobSpec {
            polys: vec![hesse(3)],
            primes: vec![5],
            ..base
        },
        Suite::HigherHw => JobSpec {
            families: vec![("simplicial".into(), 2)],
            constants: vec![1],
            max_level: 2,
            ..base
        },
        Suite::Routes => JobSpec {
            primes: vec![3],
            samples: 3,
            max_steps: 2,
            ..base
        },
    }
}

#[test]
fn small_grids_pass() {
    for suite in Suite::ALL {
        let r = run_suite(suite, &small(suite), Execution::Sequential).unwrap();
        assert!(r.passed(), "{}", r.summary());
    }
}

#[test]
fn corrupted_fixtures_fail_every_suite() {
    for suite in Suite::ALL {
        let job = JobSpec {
            tamper: 1,
            ..small(suite)
        };
        let r = run_suite(suite, &job, Execution::Sequential).unwrap();
        assert!(!r.passed(), "{suite} passed with corrupted data");
        let bad = r.failures().next().expect("a failing cell");
        assert_eq!(bad.status, Status::Fail);
        assert!(bad.witness.is_some(), "{suite}: failure without witness");
        let json = r.to_json(false);
        assert_eq!(json["pass"], false);
    }
}

#[test]
fn reports_are_deterministic() {
    for suite in [Suite::Routes, Suite::Gauss, Suite::Hhw] {
        let job = small(suite);
        let a = serde_json::to_string(
            &run_suite(suite, &job, Execution::Parallel)
                .unwrap()
                .to_json(false),
        )
        .unwrap();
        let b = serde_json::to_string(
            &run_suite(suite, &job, Execution::Sequential)
                .unwrap()
                .to_json(false),
        )
        .unwrap();
        let c = serde_json::to_string(
            &run_suite(suite, &job, Execution::Parallel)
                .unwrap()
                .to_json(false),
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }
}

#[test]
fn seeds_change_route_samples() {
    let job = small(Suite::Routes);
    let a = run_suite(Suite::Routes, &job, Execution::Sequential).unwrap();
    let b = run_suite(
        Suite::Routes,
        &JobSpec { seed: 7, ..job },
        Execution::Sequential,
    )
    .unwrap();
    assert_ne!(a.to_json(false)["cells"], b.to_json(false)["cells"]);
}

#[test]
fn supersingular_cells_are_skipped() {
    let job = JobSpec {
        polys: vec![hesse(0)],
        primes: vec![5],
        max_steps: 1,
        ..JobSpec::for_suite(Suite::Hhw)
    };
    let r = run_suite(Suite::Hhw, &job, Execution::Sequential).unwrap();
    assert!(r.count(Status::Skipped) > 0);
    assert!(r.passed());
    // s = 1 product congruence is β_p ≡ β_p
    assert!(r.cells.iter().any(|c| c.status == Status::Pass));
}

#[test]
fn gauss_hypothesis_is_suite_level() {
    let bad = PolySource::inline(&poly(
        2,
        &[(&[0, 0], 1), (&[1, 0], 1), (&[0, 1], 1), (&[2, 0], 1)],
    ));
    let job = JobSpec {
        polys: vec![bad],
        ..small(Suite::Gauss)
    };
    assert!(run_suite(Suite::Gauss, &job, Execution::Sequential).is_err());
    let job = JobSpec {
        primes: vec![2],
        ..small(Suite::Gauss)
    };
    assert!(run_suite(Suite::Gauss, &job, Execution::Sequential).is_err());
}

#[test]
fn gauss_records_observed_strength() {
    let r = run_suite(Suite::Gauss, &small(Suite::Gauss), Execution::Sequential).unwrap();
    // 1+x+y at p = 3 holds one digit beyond ord(v)
    assert!(r
        .cells
        .iter()
        .all(|c| c.params["observed_excess"].as_u64().is_some_and(|e| e >= 1)));
}

#[test]
fn job_specs_round_trip() {
    for suite in Suite::ALL {
        let job = JobSpec::for_suite(suite);
        let text = serde_json::to_string(&job).unwrap();
        assert!(!text.contains("tamper"));
        assert_eq!(serde_json::from_str::<JobSpec>(&text).unwrap(), job);
        assert_eq!(Suite::from_str(suite.name()).unwrap(), suite);
    }
    assert!(matches!(
        Suite::from_str("bogus"),
        Err(Error::InvalidInput(_))
    ));
    let partial: JobSpec = serde_json::from_str(r#"{"primes": [3]}"#).unwrap();
    assert_eq!(partial.schema, SCHEMA);
    assert_eq!(partial.mu, vec![MuChoice::Interior]);
}

#[test]
fn report_schema_and_timing() {
    let r = run_suite(Suite::Super, &small(Suite::Super), Execution::Sequential).unwrap();
    let plain = r.to_json(false);
    assert_eq!(plain["schema"], SCHEMA);
    assert_eq!(plain["suite"], "super");
    assert!(plain.get("elapsed_ms").is_none());
    assert!(r.to_json(true).get("elapsed_ms").is_some());
}

#[test]
fn file_sources_load() {
    let dir = std::env::temp_dir().join(format!("dworklab-harness-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("f.json");
    std::fs::write(
        &path,
        r#"{"n":1,"terms":[{"e":[1],"c":1},{"e":[0],"c":-2}]}"#,
    )
    .unwrap();
    let f = PolySource::File { path: path.clone() }.load().unwrap();
    assert_eq!(f, poly(1, &[(&[1], 1), (&[0], -2)]));
    assert!(PolySource::File {
        path: dir.join("missing.json")
    }
    .load()
    .is_err());
    let p = PolySource::Preset {
        name: "simplicial".into(),
        n: 2,
    }
    .load()
    .unwrap();
    assert_eq!(p.params(), 1);
    std::fs::remove_dir_all(dir).ok();
}
