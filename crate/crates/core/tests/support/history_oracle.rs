//! Random edit sequences for one entity, with every intermediate state kept
//! in full so reconstructed versions can be checked against it.

#![allow(dead_code)]

use std::sync::Arc;

use chrono::{Duration, TimeZone, Utc};
use quill_core::rdf::{Graph, Term, Triple};
use quill_core::store::QuadStore;
use quill_core::versioning::{EntityHistory, ManualClock, VersionStore};
use rand::rngs::StdRng;
use rand::seq::IteratorRandom;
use rand::Rng;

pub const AGENT: &str = "https://orcid.org/0000-0002-1825-0097";

pub fn entity(i: usize) -> String {
    format!("https://w3id.org/quill/data/journalarticle/{i}")
}

fn skolem(entity: &str, k: usize) -> Term {
    Term::iri(format!("https://w3id.org/quill/data/.well-known/genid/{}-{k}", entity.rsplit('/').next().unwrap()))
}

fn pred(k: usize) -> Term {
    Term::iri(format!("http://purl.org/dc/terms/p{k}"))
}

/// A state different from `current`, built by one to three random edits.
pub fn next_state(rng: &mut StdRng, entity: &str, current: &Graph) -> Graph {
    let root = Term::iri(entity);
    loop {
        let mut g = current.clone();
        for _ in 0..rng.random_range(1..=3) {
            match rng.random_range(0..6) {
                0 | 1 => {
                    g.insert(Triple::new(
                        root.clone(),
                        pred(rng.random_range(0..4)),
                        Term::string(format!("v{}", rng.random_range(0..6))),
                    ));
                }
                2 => {
                    if let Some(t) = g.iter().choose(rng).cloned() {
                        g.remove(&t);
                    }
                }
                3 => {
                    let node = skolem(entity, rng.random_range(0..3));
                    g.insert(Triple::new(root.clone(), pred(9), node.clone()));
                    g.insert(Triple::new(
                        node,
                        pred(rng.random_range(0..2)),
                        Term::lang_string(format!("w{}", rng.random_range(0..3)), "en"),
                    ));
                }
                4 => {
                    // Replace every value of one predicate.
                    let p = pred(rng.random_range(0..4));
                    let old: Vec<Triple> = g.with_subject(&root).filter(|t| t.predicate == p).cloned().collect();
                    for t in &old {
                        g.remove(t);
                    }
                    g.insert(Triple::new(root.clone(), p, Term::string(format!("r{}", rng.random_range(0..6)))));
                }
                _ => {
                    if rng.random_bool(0.15) {
                        g = Graph::new();
                    }
                }
            }
        }
        // Drop skolem nodes no longer linked from the root.
        let g = g.reachable_from(&root);
        if &g != current {
            return g;
        }
    }
}

pub fn version_store() -> (VersionStore, Arc<ManualClock>) {
    version_store_on(Arc::new(QuadStore::in_memory()))
}

pub fn version_store_on(store: Arc<QuadStore>) -> (VersionStore, Arc<ManualClock>) {
    let clock = Arc::new(ManualClock::new(Utc.with_ymd_and_hms(2025, 1, 1, 9, 0, 0).unwrap()));
    (VersionStore::open(store, clock.clone()).unwrap(), clock)
}

/// Commits `len` random states, returning every state in index order.
pub fn run_sequence(
    rng: &mut StdRng,
    vs: &VersionStore,
    clock: &ManualClock,
    entity: &str,
    len: usize,
) -> Vec<Graph> {
    let mut states = Vec::with_capacity(len);
    let mut current = vs.current(entity);
    for _ in 0..len {
        let next = next_state(rng, entity, &current);
        clock.advance(Duration::milliseconds(rng.random_range(0..3000)));
        vs.commit(entity, next.clone(), AGENT, None, None).unwrap();
        states.push(next.clone());
        current = next;
    }
    states
}

/// Chain integrity and provenance completeness for one history.
pub fn check_chain(history: &EntityHistory) -> Result<(), String> {
    let snaps = &history.snapshots;
    for (i, s) in snaps.iter().enumerate() {
        if s.index != i as u64 + 1 {
            return Err(format!("index {} at position {i}", s.index));
        }
        if s.agent.is_empty() {
            return Err(format!("snapshot {} has no agent", s.index));
        }
        if s.delta.is_empty() {
            return Err(format!("snapshot {} has an empty delta", s.index));
        }
        if !s.delta.added.intersection(&s.delta.removed).is_empty() {
            return Err(format!("snapshot {} adds and removes the same triple", s.index));
        }
        if s.description.as_deref() == Some("restore") && s.primary_source.is_none() {
            return Err(format!("restore snapshot {} has no source", s.index));
        }
        match snaps.get(i + 1) {
            Some(next) => {
                if next.generated_at <= s.generated_at {
                    return Err(format!("generatedAt not increasing at {}", next.index));
                }
                if s.invalidated_at != Some(next.generated_at) {
                    return Err(format!("invalidatedAt of {} does not match", s.index));
                }
            }
            None => {
                if s.invalidated_at.is_some() {
                    return Err("latest snapshot is invalidated".into());
                }
            }
        }
    }
    Ok(())
}
