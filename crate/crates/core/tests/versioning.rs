//! Snapshot histories checked against a harness that keeps every state.

mod support;

use std::sync::Arc;

use chrono::Duration;
use quill_core::rdf::{graph_diff, Graph};
use quill_core::store::{prov_graph_name, QuadStore};
use quill_core::versioning::{At, Source, VersionError};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use support::history_oracle::{check_chain, entity, run_sequence, version_store, version_store_on, AGENT};

#[test]
fn reconstruction_matches_retained_states() {
    for seed in 0..240u64 {
        let mut rng = StdRng::seed_from_u64(seed);
        let (vs, clock) = version_store();
        let e = entity(seed as usize);
        let len = rng.random_range(1..=20);
        let states = run_sequence(&mut rng, &vs, &clock, &e, len);

        assert_eq!(vs.latest_index(&e), len as u64);
        for (i, want) in states.iter().enumerate() {
            let got = vs.materialize(&e, At::Index(i as u64 + 1)).unwrap();
            assert_eq!(&got, want, "seed {seed}: version {}", i + 1);
        }
        assert_eq!(&vs.current(&e), states.last().unwrap());

        for i in 1..=len as u64 {
            for j in 1..=len as u64 {
                let d = vs.diff_versions(&e, i, j).unwrap();
                let (si, sj) = (&states[i as usize - 1], &states[j as usize - 1]);
                assert_eq!(&d.apply(si), sj, "seed {seed}: diff {i}->{j}");
                assert_eq!(d, graph_diff(si, sj));
            }
        }
        check_chain(&vs.history(&e)).unwrap_or_else(|m| panic!("seed {seed}: {m}"));
    }
}

#[test]
fn time_lookup_picks_latest_at_or_before() {
    let mut rng = StdRng::seed_from_u64(7);
    let (vs, clock) = version_store();
    let e = entity(1);
    let states = run_sequence(&mut rng, &vs, &clock, &e, 15);
    let history = vs.history(&e);
    for (k, s) in history.snapshots.iter().enumerate() {
        assert_eq!(vs.materialize(&e, At::Time(s.generated_at)).unwrap(), states[k]);
        let just_before = s.generated_at - Duration::milliseconds(1);
        match vs.materialize(&e, At::Time(just_before)) {
            Ok(g) => assert_eq!(g, states[k - 1]),
            Err(VersionError::TimestampBeforeCreation { .. }) => assert_eq!(k, 0),
            Err(other) => panic!("{other}"),
        }
    }
}

#[test]
fn restore_appends_one_snapshot_and_keeps_history() {
    for seed in 0..200u64 {
        let mut rng = StdRng::seed_from_u64(1000 + seed);
        let (vs, clock) = version_store();
        let e = entity(seed as usize);
        let len = rng.random_range(2..=20);
        let states = run_sequence(&mut rng, &vs, &clock, &e, len);
        let target = rng.random_range(1..len as u64);
        let before = vs.history(&e);
        let prov_before: Vec<Graph> = (1..=len as u64)
            .map(|i| vs.store().graph(&prov_graph_name(&e, i)).unwrap())
            .collect();

        clock.advance(Duration::seconds(1));
        let result = vs.restore(&e, target, AGENT);
        if &states[target as usize - 1] == states.last().unwrap() {
            assert!(matches!(result, Err(VersionError::NoChange(_))));
            assert_eq!(vs.history(&e), before);
            continue;
        }
        let rec = result.unwrap();
        let after = vs.history(&e);
        assert_eq!(after.snapshots.len(), before.snapshots.len() + 1);
        assert_eq!(rec.index, len as u64 + 1);
        assert_eq!(rec.primary_source, Some(Source::Iri(prov_graph_name(&e, target))));
        assert_eq!(rec.description.as_deref(), Some("restore"));

        // Earlier records are unchanged except that the old latest is now
        // invalidated at the restore time.
        let mut expected = before.snapshots.clone();
        expected.last_mut().unwrap().invalidated_at = Some(rec.generated_at);
        assert_eq!(after.snapshots[..len], expected[..]);
        for (i, g) in prov_before.iter().enumerate() {
            assert_eq!(&vs.store().graph(&prov_graph_name(&e, i as u64 + 1)).unwrap(), g);
        }

        assert_eq!(vs.current(&e), states[target as usize - 1]);
        assert_eq!(
            vs.materialize(&e, At::Index(rec.index)).unwrap(),
            vs.materialize(&e, At::Index(target)).unwrap()
        );
        check_chain(&after).unwrap();
    }
}

#[test]
fn delete_then_restore_round_trip() {
    let mut rng = StdRng::seed_from_u64(99);
    let (vs, clock) = version_store();
    let e = entity(3);
    let states = run_sequence(&mut rng, &vs, &clock, &e, 5);
    let tomb = vs.delete_entity(&e, AGENT).unwrap();
    assert!(vs.history(&e).tombstoned);
    assert!(!vs.exists(&e));
    assert_eq!(tomb.delta.removed, states[4]);
    vs.restore(&e, 5, AGENT).unwrap();
    assert!(vs.exists(&e));
    assert_eq!(vs.current(&e), states[4]);
    check_chain(&vs.history(&e)).unwrap();
}

#[test]
fn reads_never_change_history() {
    let mut rng = StdRng::seed_from_u64(5);
    let (vs, clock) = version_store();
    let e = entity(0);
    run_sequence(&mut rng, &vs, &clock, &e, 10);
    let before = vs.history(&e);
    let sequence = vs.store().sequence();
    for i in 1..=10 {
        vs.materialize(&e, At::Index(i)).unwrap();
        vs.diff_versions(&e, i, 11 - i).unwrap();
        vs.snapshot(&e, i).unwrap();
    }
    assert!(vs.materialize(&e, At::Index(11)).is_err());
    assert!(vs.commit(&e, vs.current(&e), AGENT, None, None).is_err());
    assert_eq!(vs.history(&e), before);
    assert_eq!(vs.store().sequence(), sequence);
}

#[test]
fn histories_rebuild_from_provenance_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = StdRng::seed_from_u64(11);
    let mut expected = Vec::new();
    {
        let store = Arc::new(QuadStore::open(dir.path()).unwrap());
        let (vs, clock) = version_store_on(store.clone());
        for k in 0..6 {
            let e = entity(k);
            let len = rng.random_range(1..=12);
            run_sequence(&mut rng, &vs, &clock, &e, len);
            if k % 3 == 0 {
                vs.restore(&e, 1, AGENT).ok();
            }
            expected.push(vs.history(&e));
        }
        store.persist().unwrap();
    }
    let store = Arc::new(QuadStore::open(dir.path()).unwrap());
    let (vs, _) = version_store_on(store);
    assert_eq!(vs.entities().len(), 6);
    for h in expected {
        assert_eq!(vs.history(&h.entity), h);
        for s in &h.snapshots {
            vs.materialize(&h.entity, At::Index(s.index)).unwrap();
        }
    }
}

#[test]
fn agent_is_required() {
    let (vs, _) = version_store();
    let mut rng = StdRng::seed_from_u64(0);
    let state = support::history_oracle::next_state(&mut rng, &entity(0), &Graph::new());
    assert!(matches!(vs.commit(&entity(0), state.clone(), "", None, None), Err(VersionError::MissingAgent)));
    assert!(matches!(
        vs.commit(&entity(0), state, "not an iri", None, None),
        Err(VersionError::InvalidAgent(_))
    ));
    assert_eq!(vs.latest_index(&entity(0)), 0);
}
