//! Per-entity snapshot histories on top of [`QuadStore`].
//!
//! Only the latest state of an entity is kept in full (its data graph);
//! each snapshot stores the delta that produced it, and older states are
//! rebuilt by reverting deltas from the latest one down.

mod prov;

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use chrono::{DateTime, Duration, Utc};
use parking_lot::{Mutex, RwLock};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

pub use prov::{format_timestamp, parse_timestamp, read_snapshot, snapshot_graph};

use crate::rdf::{graph_diff, is_absolute_iri, is_skolem_iri, Delta, Graph, Term};
use crate::store::{data_graph_name, prov_graph_name, QuadStore, StoreError, TxChange, PROV_SEGMENT};

pub const RESTORE_DESCRIPTION: &str = "restore";
pub const DELETE_DESCRIPTION: &str = "delete";

#[derive(Debug, thiserror::Error)]
pub enum VersionError {
    #[error("no change: the new state of <{0}> equals its current state")]
    NoChange(String),
    #[error("commit has no agent")]
    MissingAgent,
    #[error("agent {0:?} is not an absolute IRI")]
    InvalidAgent(String),
    #[error("invalid state for <{entity}>: {message}")]
    InvalidState { entity: String, message: String },
    #[error("unknown entity <{0}>")]
    UnknownEntity(String),
    #[error("<{entity}> has no snapshot {index} (latest is {latest})")]
    IndexOutOfRange { entity: String, index: u64, latest: u64 },
    #[error("<{entity}> did not exist at {at}")]
    TimestampBeforeCreation { entity: String, at: String },
    #[error("<{entity}> changed concurrently: expected snapshot {expected}, found {latest}")]
    Stale { entity: String, expected: u64, latest: u64 },
    #[error("corrupt provenance graph <{graph}>: {message}")]
    CorruptProvenance { graph: String, message: String },
    #[error(transparent)]
    Store(#[from] StoreError),
}

pub trait Clock: Send + Sync {
    fn now(&self) -> DateTime<Utc>;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<Utc> {
        Utc::now()
    }
}

/// A clock that only moves when told to.
#[derive(Debug)]
pub struct ManualClock(Mutex<DateTime<Utc>>);

impl ManualClock {
    pub fn new(start: DateTime<Utc>) -> Self {
        Self(Mutex::new(start))
    }

    pub fn set(&self, t: DateTime<Utc>) {
        *self.0.lock() = t;
    }

    pub fn advance(&self, d: Duration) {
        *self.0.lock() += d;
    }
}

impl Clock for ManualClock {
    fn now(&self) -> DateTime<Utc> {
        *self.0.lock()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Iri(String),
    Text(String),
}

impl Serialize for Source {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let (kind, value) = match self {
            Source::Iri(v) => ("iri", v),
            Source::Text(v) => ("text", v),
        };
        let mut st = s.serialize_struct("Source", 2)?;
        st.serialize_field("type", kind)?;
        st.serialize_field("value", value)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapshotRecord {
    pub entity: String,
    pub index: u64,
    pub generated_at: DateTime<Utc>,
    pub invalidated_at: Option<DateTime<Utc>>,
    pub agent: String,
    pub primary_source: Option<Source>,
    pub description: Option<String>,
    pub delta: Delta,
}

/// A delta as two arrays of N-Triples statements.
pub fn delta_json(delta: &Delta) -> serde_json::Value {
    let lines = |g: &Graph| g.iter().map(|t| t.to_string()).collect::<Vec<_>>();
    serde_json::json!({ "added": lines(&delta.added), "removed": lines(&delta.removed) })
}

impl Serialize for SnapshotRecord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SnapshotRecord", 8)?;
        st.serialize_field("entity", &self.entity)?;
        st.serialize_field("index", &self.index)?;
        st.serialize_field("generatedAt", &format_timestamp(&self.generated_at))?;
        st.serialize_field("invalidatedAt", &self.invalidated_at.as_ref().map(format_timestamp))?;
        st.serialize_field("agent", &self.agent)?;
        st.serialize_field("primarySource", &self.primary_source)?;
        st.serialize_field("description", &self.description)?;
        st.serialize_field("delta", &delta_json(&self.delta))?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntityHistory {
    pub entity: String,
    pub snapshots: Vec<SnapshotRecord>,
    pub tombstoned: bool,
}

impl EntityHistory {
    pub fn latest(&self) -> Option<&SnapshotRecord> {
        self.snapshots.last()
    }
}

/// Which snapshot to materialize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum At {
    Index(u64),
    /// The latest snapshot generated at or before this instant.
    Time(DateTime<Utc>),
}

#[derive(Debug, Default)]
struct EntityRecord {
    snapshots: Vec<SnapshotRecord>,
    current: Graph,
}

impl EntityRecord {
    fn latest(&self) -> u64 {
        self.snapshots.len() as u64
    }

    fn resolve(&self, entity: &str, at: At) -> Result<u64, VersionError> {
        match at {
            At::Index(i) if i >= 1 && i <= self.latest() => Ok(i),
            At::Index(index) => Err(VersionError::IndexOutOfRange {
                entity: entity.to_owned(),
                index,
                latest: self.latest(),
            }),
            At::Time(t) => self
                .snapshots
                .iter()
                .rposition(|s| s.generated_at <= t)
                .map(|i| i as u64 + 1)
                .ok_or_else(|| VersionError::TimestampBeforeCreation {
                    entity: entity.to_owned(),
                    at: format_timestamp(&t),
                }),
        }
    }

    fn materialize(&self, index: u64) -> Graph {
        let mut state = self.current.clone();
        for s in self.snapshots[index as usize..].iter().rev() {
            state = s.delta.revert(&state);
        }
        state
    }
}

/// Snapshot histories for every entity in a store. The histories are
/// cached in memory and rebuilt from the provenance graphs on open; entity
/// data graphs must only be written through this type.
pub struct VersionStore {
    store: Arc<QuadStore>,
    clock: Arc<dyn Clock>,
    records: RwLock<HashMap<String, Arc<EntityRecord>>>,
}

impl std::fmt::Debug for VersionStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VersionStore")
            .field("entities", &self.records.read().len())
            .finish()
    }
}

fn check_agent(agent: &str) -> Result<(), VersionError> {
    if agent.trim().is_empty() {
        return Err(VersionError::MissingAgent);
    }
    if !is_absolute_iri(agent) {
        return Err(VersionError::InvalidAgent(agent.to_owned()));
    }
    Ok(())
}

fn check_state(entity: &str, state: &Graph) -> Result<(), VersionError> {
    let invalid = |message: String| VersionError::InvalidState {
        entity: entity.to_owned(),
        message,
    };
    if !is_absolute_iri(entity) {
        return Err(invalid("entity is not an absolute IRI".into()));
    }
    if state.has_blank_nodes() {
        return Err(invalid("state contains blank nodes; skolemize first".into()));
    }
    let root = Term::iri(entity);
    if let Some(t) = state
        .iter()
        .find(|t| t.subject != root && !t.subject.as_iri().is_some_and(is_skolem_iri))
    {
        return Err(invalid(format!("subject {} is outside the entity", t.subject)));
    }
    if !state.is_empty() && state.with_subject(&root).next().is_none() {
        return Err(invalid("no triple has the entity as subject".into()));
    }
    Ok(())
}

impl VersionStore {
    /// Rebuilds histories from the provenance graphs already in `store`.
    pub fn open(store: Arc<QuadStore>, clock: Arc<dyn Clock>) -> Result<Self, VersionError> {
        let records = store.read(|ds| -> Result<_, VersionError> {
            let mut counts: BTreeMap<String, u64> = BTreeMap::new();
            for name in ds.graph_names() {
                if let Some(i) = name.rfind(PROV_SEGMENT) {
                    if let Ok(n) = name[i + PROV_SEGMENT.len()..].parse::<u64>() {
                        let max = counts.entry(name[..i].to_owned()).or_default();
                        *max = (*max).max(n);
                    }
                }
            }
            let mut records = HashMap::new();
            for (entity, count) in counts {
                let mut snapshots = Vec::with_capacity(count as usize);
                for index in 1..=count {
                    let name = prov_graph_name(&entity, index);
                    let graph = ds.graph(&name).ok_or_else(|| VersionError::CorruptProvenance {
                        graph: name.clone(),
                        message: "missing snapshot graph".into(),
                    })?;
                    if index > 1 {
                        let prev: &mut SnapshotRecord = snapshots.last_mut().unwrap();
                        prev.invalidated_at = prov::read_invalidation(&entity, index, graph);
                    }
                    snapshots.push(read_snapshot(&entity, index, graph)?);
                }
                let current = ds.graph(&data_graph_name(&entity)).cloned().unwrap_or_default();
                records.insert(entity, Arc::new(EntityRecord { snapshots, current }));
            }
            Ok(records)
        })?;
        Ok(Self {
            store,
            clock,
            records: RwLock::new(records),
        })
    }

    pub fn store(&self) -> &Arc<QuadStore> {
        &self.store
    }

    fn record(&self, entity: &str) -> Option<Arc<EntityRecord>> {
        self.records.read().get(entity).cloned()
    }

    fn known(&self, entity: &str) -> Result<Arc<EntityRecord>, VersionError> {
        self.record(entity)
            .filter(|r| !r.snapshots.is_empty())
            .ok_or_else(|| VersionError::UnknownEntity(entity.to_owned()))
    }

    /// Every entity with at least one snapshot, sorted.
    pub fn entities(&self) -> Vec<String> {
        let mut out: Vec<_> = self.records.read().keys().cloned().collect();
        out.sort();
        out
    }

    /// The current state; empty for unknown or deleted entities.
    pub fn current(&self, entity: &str) -> Graph {
        self.record(entity).map(|r| r.current.clone()).unwrap_or_default()
    }

    pub fn exists(&self, entity: &str) -> bool {
        self.record(entity).is_some_and(|r| !r.current.is_empty())
    }

    pub fn latest_index(&self, entity: &str) -> u64 {
        self.record(entity).map_or(0, |r| r.latest())
    }

    pub fn commit(
        &self,
        entity: &str,
        new_state: Graph,
        agent: &str,
        source: Option<Source>,
        description: Option<String>,
    ) -> Result<SnapshotRecord, VersionError> {
        self.commit_inner(entity, new_state, agent, source, description, None)
    }

    /// Like [`VersionStore::commit`], but fails with `Stale` unless the
    /// entity's latest index is still `expected` (0 for a new entity).
    pub fn commit_at(
        &self,
        entity: &str,
        expected: u64,
        new_state: Graph,
        agent: &str,
        source: Option<Source>,
        description: Option<String>,
    ) -> Result<SnapshotRecord, VersionError> {
        self.commit_inner(entity, new_state, agent, source, description, Some(expected))
    }

    fn commit_inner(
        &self,
        entity: &str,
        new_state: Graph,
        agent: &str,
        source: Option<Source>,
        description: Option<String>,
        expected: Option<u64>,
    ) -> Result<SnapshotRecord, VersionError> {
        check_agent(agent)?;
        check_state(entity, &new_state)?;
        let guard = self.store.write([entity]);
        let before = self.record(entity).unwrap_or_default();
        if let Some(expected) = expected.filter(|e| *e != before.latest()) {
            return Err(VersionError::Stale {
                entity: entity.to_owned(),
                expected,
                latest: before.latest(),
            });
        }
        let delta = graph_diff(&before.current, &new_state);
        if delta.is_empty() {
            return Err(VersionError::NoChange(entity.to_owned()));
        }

        let now = self.clock.now();
        let now = DateTime::from_timestamp_millis(now.timestamp_millis()).unwrap_or(now);
        let generated_at = match before.snapshots.last() {
            Some(prev) if now <= prev.generated_at => prev.generated_at + Duration::milliseconds(1),
            _ => now,
        };
        let record = SnapshotRecord {
            entity: entity.to_owned(),
            index: before.latest() + 1,
            generated_at,
            invalidated_at: None,
            agent: agent.to_owned(),
            primary_source: source,
            description,
            delta,
        };

        let data_graph = data_graph_name(entity);
        let mut tx = TxChange::new();
        tx.remove_graph(&record.delta.removed, &data_graph);
        tx.add_graph(&record.delta.added, &data_graph);
        tx.add_graph(&snapshot_graph(&record), &prov_graph_name(entity, record.index));
        guard.apply(&tx)?;

        let mut snapshots = before.snapshots.clone();
        if let Some(prev) = snapshots.last_mut() {
            prev.invalidated_at = Some(generated_at);
        }
        snapshots.push(record.clone());
        self.records.write().insert(
            entity.to_owned(),
            Arc::new(EntityRecord {
                snapshots,
                current: new_state,
            }),
        );
        drop(guard);
        Ok(record)
    }

    /// All snapshots in index order; empty for unknown entities.
    pub fn history(&self, entity: &str) -> EntityHistory {
        let record = self.record(entity).unwrap_or_default();
        EntityHistory {
            entity: entity.to_owned(),
            tombstoned: !record.snapshots.is_empty() && record.current.is_empty(),
            snapshots: record.snapshots.clone(),
        }
    }

    pub fn snapshot(&self, entity: &str, index: u64) -> Result<SnapshotRecord, VersionError> {
        let record = self.known(entity)?;
        let i = record.resolve(entity, At::Index(index))?;
        Ok(record.snapshots[i as usize - 1].clone())
    }

    pub fn materialize(&self, entity: &str, at: At) -> Result<Graph, VersionError> {
        let record = self.known(entity)?;
        let index = record.resolve(entity, at)?;
        Ok(record.materialize(index))
    }

    pub fn diff_versions(&self, entity: &str, i: u64, j: u64) -> Result<Delta, VersionError> {
        let record = self.known(entity)?;
        let i = record.resolve(entity, At::Index(i))?;
        let j = record.resolve(entity, At::Index(j))?;
        Ok(graph_diff(&record.materialize(i), &record.materialize(j)))
    }

    /// Commits the state of snapshot `index` again as a new snapshot whose
    /// primary source is that snapshot's provenance graph.
    pub fn restore(&self, entity: &str, index: u64, agent: &str) -> Result<SnapshotRecord, VersionError> {
        check_agent(agent)?;
        let state = self.materialize(entity, At::Index(index))?;
        self.commit(
            entity,
            state,
            agent,
            Some(Source::Iri(prov_graph_name(entity, index))),
            Some(RESTORE_DESCRIPTION.to_owned()),
        )
    }

    /// Commits the empty state. History is kept; a later restore brings
    /// the entity back.
    pub fn delete_entity(&self, entity: &str, agent: &str) -> Result<SnapshotRecord, VersionError> {
        self.known(entity)?;
        self.commit(
            entity,
            Graph::new(),
            agent,
            None,
            Some(DELETE_DESCRIPTION.to_owned()),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::Triple;
    use chrono::TimeZone;

    const E: &str = "http://x/e";
    const AGENT: &str = "https://orcid.org/0000-0002-1825-0097";

    fn t(p: &str, o: &str) -> Triple {
        Triple::new(Term::iri(E), Term::iri(format!("http://x/{p}")), Term::string(o))
    }

    fn state(ts: &[Triple]) -> Graph {
        ts.iter().cloned().collect()
    }

    fn fixture() -> (VersionStore, Arc<ManualClock>) {
        let clock = Arc::new(ManualClock::new(Utc.with_ymd_and_hms(2024, 5, 1, 12, 0, 0).unwrap()));
        let vs = VersionStore::open(Arc::new(QuadStore::in_memory()), clock.clone()).unwrap();
        (vs, clock)
    }

    #[test]
    fn commit_at_rejects_stale_expectation() {
        let (vs, _) = fixture();
        vs.commit_at(E, 0, state(&[t("a", "1")]), AGENT, None, None).unwrap();
        assert!(matches!(
            vs.commit_at(E, 0, state(&[t("a", "2")]), AGENT, None, None),
            Err(VersionError::Stale { expected: 0, latest: 1, .. })
        ));
        vs.commit_at(E, 1, state(&[t("a", "2")]), AGENT, None, None).unwrap();
        assert_eq!(vs.latest_index(E), 2);
    }

    #[test]
    fn first_commit_adds_everything() {
        let (vs, _) = fixture();
        let s = state(&[t("a", "1"), t("b", "2"), t("c", "3")]);
        let rec = vs.commit(E, s.clone(), AGENT, None, None).unwrap();
        assert_eq!(rec.index, 1);
        assert_eq!(rec.delta.added, s);
        assert!(rec.delta.removed.is_empty());
        assert!(matches!(
            vs.commit(E, s, AGENT, None, None),
            Err(VersionError::NoChange(_))
        ));
    }

    #[test]
    fn agent_required() {
        let (vs, _) = fixture();
        let s = state(&[t("a", "1")]);
        assert!(matches!(vs.commit(E, s.clone(), "", None, None), Err(VersionError::MissingAgent)));
        assert!(matches!(vs.commit(E, s, "alice", None, None), Err(VersionError::InvalidAgent(_))));
    }

    #[test]
    fn chain_and_clock_guard() {
        let (vs, clock) = fixture();
        vs.commit(E, state(&[t("a", "1")]), AGENT, None, None).unwrap();
        // Clock does not move: the guard bumps by one millisecond.
        vs.commit(E, state(&[t("a", "2")]), AGENT, None, None).unwrap();
        clock.advance(Duration::seconds(5));
        vs.commit(E, state(&[t("a", "3")]), AGENT, None, None).unwrap();
        let h = vs.history(E);
        assert_eq!(h.snapshots.len(), 3);
        assert_eq!(
            h.snapshots[1].generated_at - h.snapshots[0].generated_at,
            Duration::milliseconds(1)
        );
        for w in h.snapshots.windows(2) {
            assert_eq!(w[0].invalidated_at, Some(w[1].generated_at));
        }
        assert!(h.snapshots[2].invalidated_at.is_none());
        assert!(vs.history("http://x/unknown").snapshots.is_empty());
    }

    #[test]
    fn materialize_by_index_and_time() {
        let (vs, clock) = fixture();
        let s1 = state(&[t("a", "1")]);
        let s2 = state(&[t("a", "1"), t("b", "2")]);
        let r1 = vs.commit(E, s1.clone(), AGENT, None, None).unwrap();
        clock.advance(Duration::minutes(1));
        vs.commit(E, s2.clone(), AGENT, None, None).unwrap();
        assert_eq!(vs.materialize(E, At::Index(1)).unwrap(), s1);
        assert_eq!(vs.materialize(E, At::Index(2)).unwrap(), s2);
        assert_eq!(vs.materialize(E, At::Time(r1.generated_at + Duration::seconds(1))).unwrap(), s1);
        assert!(matches!(
            vs.materialize(E, At::Time(r1.generated_at - Duration::seconds(1))),
            Err(VersionError::TimestampBeforeCreation { .. })
        ));
        assert!(matches!(
            vs.materialize(E, At::Index(3)),
            Err(VersionError::IndexOutOfRange { latest: 2, .. })
        ));
        assert!(matches!(
            vs.materialize("http://x/none", At::Index(1)),
            Err(VersionError::UnknownEntity(_))
        ));
        assert!(vs.diff_versions(E, 2, 2).unwrap().is_empty());
        assert_eq!(vs.diff_versions(E, 1, 2).unwrap(), vs.snapshot(E, 2).unwrap().delta);
    }

    #[test]
    fn restore_and_delete() {
        let (vs, _) = fixture();
        let a = state(&[t("a", "1")]);
        let b = state(&[t("a", "2")]);
        vs.commit(E, a.clone(), AGENT, None, None).unwrap();
        vs.commit(E, b.clone(), AGENT, None, None).unwrap();
        assert!(matches!(vs.restore(E, 2, AGENT), Err(VersionError::NoChange(_))));
        let r = vs.restore(E, 1, AGENT).unwrap();
        assert_eq!(r.index, 3);
        assert_eq!(r.primary_source, Some(Source::Iri(format!("{E}/prov/se/1"))));
        assert_eq!(r.description.as_deref(), Some("restore"));
        assert_eq!(vs.current(E), a);
        vs.restore(E, 2, AGENT).unwrap();
        assert_eq!(vs.current(E), b);

        vs.delete_entity(E, AGENT).unwrap();
        let h = vs.history(E);
        assert!(h.tombstoned);
        assert!(vs.current(E).is_empty());
        assert!(matches!(vs.delete_entity(E, AGENT), Err(VersionError::NoChange(_))));
        assert_eq!(vs.materialize(E, At::Index(1)).unwrap(), a);
        vs.restore(E, 1, AGENT).unwrap();
        assert!(!vs.history(E).tombstoned);
        assert_eq!(vs.current(E), a);
    }

    #[test]
    fn state_must_belong_to_entity() {
        let (vs, _) = fixture();
        let other = Triple::new(Term::iri("http://x/f"), Term::iri("http://x/p"), Term::string("v"));
        assert!(matches!(
            vs.commit(E, state(&[t("a", "1"), other]), AGENT, None, None),
            Err(VersionError::InvalidState { .. })
        ));
        let blank = Triple::new(Term::iri(E), Term::iri("http://x/p"), Term::blank("b0"));
        assert!(matches!(
            vs.commit(E, state(&[blank]), AGENT, None, None),
            Err(VersionError::InvalidState { .. })
        ));
    }

    #[test]
    fn histories_rebuild_from_store() {
        let (vs, clock) = fixture();
        vs.commit(E, state(&[t("a", "1")]), AGENT, Some(Source::Text("letter, 1911".into())), None)
            .unwrap();
        clock.advance(Duration::seconds(1));
        vs.commit(E, state(&[t("a", "2")]), AGENT, None, Some("fix".into())).unwrap();
        let reopened = VersionStore::open(vs.store().clone(), clock).unwrap();
        assert_eq!(reopened.history(E), vs.history(E));
        assert_eq!(reopened.current(E), vs.current(E));
    }
}
