//! Transactional quad store. Entity data lives in the named graph
//! `<entity>/graph`; provenance snapshots in `<entity>/prov/se/<n>`.
//!
//! Writes are serialized per entity. A transaction is staged on private
//! copies of the graphs it touches, written to the journal, and only then
//! swapped in under the dataset lock, so readers see whole transactions or
//! nothing. [`QuadStore::persist`] compacts the dataset into `data.nq` and
//! empties the journal.

mod journal;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use parking_lot::{Condvar, Mutex, RwLock};

use crate::rdf::{parse_nquads, serialize_nquads, Dataset, Graph, Quad, RdfError, Term, Triple};
use journal::Journal;

pub const DATA_GRAPH_SUFFIX: &str = "/graph";
pub const PROV_SEGMENT: &str = "/prov/se/";
pub const DATA_FILE: &str = "data.nq";
pub const JOURNAL_FILE: &str = "journal.log";

pub fn data_graph_name(entity: &str) -> String {
    format!("{entity}{DATA_GRAPH_SUFFIX}")
}

pub fn prov_graph_name(entity: &str, index: u64) -> String {
    format!("{entity}{PROV_SEGMENT}{index}")
}

/// The entity a graph belongs to. The default graph maps to the empty
/// string; graphs outside the naming scheme are their own entity.
pub fn entity_of_graph(graph: Option<&str>) -> &str {
    let Some(name) = graph else { return "" };
    if let Some(entity) = name.strip_suffix(DATA_GRAPH_SUFFIX) {
        return entity;
    }
    match name.rfind(PROV_SEGMENT) {
        Some(i) if name[i + PROV_SEGMENT.len()..].bytes().all(|b| b.is_ascii_digit()) => &name[..i],
        _ => name,
    }
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("corrupt data file: {0}")]
    Syntax(#[from] RdfError),
    #[error("corrupt journal record at byte {offset}: {message}")]
    CorruptJournal { offset: u64, message: String },
    #[error("entity <{0}> is being written by another transaction")]
    Conflict(String),
    #[error("quad is both added and removed: {0}")]
    Overlap(Box<Quad>),
    #[error("transaction touches entity <{0}> which the writer does not hold")]
    NotClaimed(String),
    #[error("injected fault")]
    InjectedFault,
    #[error("store is unusable after a failed journal write; reopen it")]
    Poisoned,
    #[error("store has no persistence directory")]
    NotPersistent,
}

/// Quads to add and remove in one atomic step.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TxChange {
    pub additions: BTreeSet<Quad>,
    pub removals: BTreeSet<Quad>,
}

impl TxChange {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, quad: Quad) {
        self.additions.insert(quad);
    }

    pub fn remove(&mut self, quad: Quad) {
        self.removals.insert(quad);
    }

    pub fn add_graph(&mut self, graph: &Graph, name: &str) {
        for t in graph {
            self.add(t.clone().in_graph(Some(name.to_owned())));
        }
    }

    pub fn remove_graph(&mut self, graph: &Graph, name: &str) {
        for t in graph {
            self.remove(t.clone().in_graph(Some(name.to_owned())));
        }
    }

    pub fn is_empty(&self) -> bool {
        self.additions.is_empty() && self.removals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.additions.len() + self.removals.len()
    }

    pub fn check(&self) -> Result<(), StoreError> {
        match self.additions.intersection(&self.removals).next() {
            Some(q) => Err(StoreError::Overlap(Box::new(q.clone()))),
            None => Ok(()),
        }
    }

    pub fn entities(&self) -> BTreeSet<String> {
        self.additions
            .iter()
            .chain(&self.removals)
            .map(|q| entity_of_graph(q.graph.as_deref()).to_owned())
            .collect()
    }

    fn graphs(&self) -> BTreeSet<Option<String>> {
        self.additions
            .iter()
            .chain(&self.removals)
            .map(|q| q.graph.clone())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CommitToken {
    /// Number of transactions applied since the store was opened. A no-op
    /// token carries the current value without advancing it.
    pub sequence: u64,
    pub noop: bool,
}

/// Test hook simulating a crash at a chosen point of the next transaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultPoint {
    /// Fail after this many quad operations have been staged. Nothing is
    /// journaled and the store stays usable.
    AfterQuads(usize),
    /// Write only this many bytes of the journal record, then die.
    TornJournal(usize),
    /// Write the whole journal record, then die before the in-memory swap.
    AfterJournal,
}

struct Persistence {
    dir: PathBuf,
    journal: Journal,
}

pub struct QuadStore {
    dataset: RwLock<Dataset>,
    writers: Mutex<HashSet<String>>,
    released: Condvar,
    persistence: Option<Mutex<Persistence>>,
    commit_lock: Mutex<()>,
    sequence: AtomicU64,
    dirty: AtomicBool,
    poisoned: AtomicBool,
    fault: Mutex<Option<FaultPoint>>,
}

impl std::fmt::Debug for QuadStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QuadStore")
            .field("quads", &self.len())
            .field("dir", &self.dir())
            .finish()
    }
}

impl QuadStore {
    fn with_dataset(dataset: Dataset, persistence: Option<Persistence>) -> Self {
        Self {
            dataset: RwLock::new(dataset),
            writers: Mutex::new(HashSet::new()),
            released: Condvar::new(),
            persistence: persistence.map(Mutex::new),
            commit_lock: Mutex::new(()),
            sequence: AtomicU64::new(0),
            dirty: AtomicBool::new(false),
            poisoned: AtomicBool::new(false),
            fault: Mutex::new(None),
        }
    }

    pub fn in_memory() -> Self {
        Self::with_dataset(Dataset::new(), None)
    }

    /// Opens (creating if needed) a store directory: loads `data.nq`, then
    /// replays every complete journal record on top of it.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, StoreError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let mut dataset = match fs::read_to_string(dir.join(DATA_FILE)) {
            Ok(text) => parse_nquads(&text)?,
            Err(e) if e.kind() == io::ErrorKind::NotFound => Dataset::new(),
            Err(e) => return Err(e.into()),
        };
        let (journal, changes) = Journal::open(&dir.join(JOURNAL_FILE))?;
        let replayed = !changes.is_empty();
        for change in &changes {
            apply_in_place(&mut dataset, change);
        }
        let store = Self::with_dataset(
            dataset,
            Some(Persistence {
                dir: dir.to_owned(),
                journal,
            }),
        );
        store.dirty.store(replayed, Ordering::SeqCst);
        Ok(store)
    }

    /// Alias of [`QuadStore::open`].
    pub fn load(dir: impl AsRef<Path>) -> Result<Self, StoreError> {
        Self::open(dir)
    }

    pub fn dir(&self) -> Option<PathBuf> {
        self.persistence.as_ref().map(|p| p.lock().dir.clone())
    }

    pub fn len(&self) -> usize {
        self.dataset.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.dataset.read().is_empty()
    }

    /// True when there are journaled changes not yet compacted into the
    /// data file.
    pub fn is_dirty(&self) -> bool {
        self.dirty.load(Ordering::SeqCst)
    }

    pub fn sequence(&self) -> u64 {
        self.sequence.load(Ordering::SeqCst)
    }

    pub fn read<R>(&self, f: impl FnOnce(&Dataset) -> R) -> R {
        f(&self.dataset.read())
    }

    pub fn snapshot(&self) -> Dataset {
        self.dataset.read().clone()
    }

    pub fn graph(&self, name: &str) -> Option<Graph> {
        self.dataset.read().graph(name).cloned()
    }

    pub fn graph_names(&self) -> Vec<String> {
        self.dataset.read().graph_names().map(str::to_owned).collect()
    }

    pub fn contains(&self, quad: &Quad) -> bool {
        self.dataset.read().contains(quad)
    }

    /// All quads matching the bound positions, default graph first, then
    /// named graphs by name, each in triple order. `graph: None` matches
    /// every graph.
    pub fn match_pattern(
        &self,
        subject: Option<&Term>,
        predicate: Option<&str>,
        object: Option<&Term>,
        graph: Option<&str>,
    ) -> Vec<Quad> {
        let ds = self.dataset.read();
        let matches = |t: &Triple| {
            predicate.is_none_or(|p| t.predicate.as_iri() == Some(p))
                && object.is_none_or(|o| &t.object == o)
        };
        let scan = |name: Option<&str>, g: &Graph, out: &mut Vec<Quad>| {
            let triples: Box<dyn Iterator<Item = &Triple>> = match subject {
                Some(s) => Box::new(g.with_subject(s)),
                None => Box::new(g.iter()),
            };
            out.extend(
                triples
                    .filter(|t| matches(t))
                    .map(|t| t.clone().in_graph(name.map(str::to_owned))),
            );
        };
        let mut out = Vec::new();
        match graph {
            Some(name) => {
                if let Some(g) = ds.graph(name) {
                    scan(Some(name), g, &mut out);
                }
            }
            None => {
                scan(None, ds.default_graph(), &mut out);
                for (name, g) in ds.named_graphs() {
                    scan(Some(name), g, &mut out);
                }
            }
        }
        out
    }

    /// Arms a [`FaultPoint`] for the next transaction.
    pub fn inject_fault(&self, fault: FaultPoint) {
        *self.fault.lock() = Some(fault);
    }

    /// Claims the entities without waiting; fails if any is held.
    pub fn try_write<I, S>(&self, entities: I) -> Result<WriteGuard<'_>, StoreError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let wanted: Vec<String> = entities.into_iter().map(Into::into).collect();
        let mut held = self.writers.lock();
        if let Some(busy) = wanted.iter().find(|e| held.contains(*e)) {
            return Err(StoreError::Conflict(busy.clone()));
        }
        held.extend(wanted.iter().cloned());
        Ok(WriteGuard {
            store: self,
            entities: wanted,
        })
    }

    /// Claims the entities, blocking until no other writer holds any of
    /// them. All-or-nothing, so two writers cannot deadlock.
    pub fn write<I, S>(&self, entities: I) -> WriteGuard<'_>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let wanted: Vec<String> = entities.into_iter().map(Into::into).collect();
        let mut held = self.writers.lock();
        while wanted.iter().any(|e| held.contains(e)) {
            self.released.wait(&mut held);
        }
        held.extend(wanted.iter().cloned());
        WriteGuard {
            store: self,
            entities: wanted,
        }
    }

    /// Applies a change atomically, failing with a conflict if another
    /// writer holds one of the entities it touches.
    pub fn apply_tx(&self, change: &TxChange) -> Result<CommitToken, StoreError> {
        change.check()?;
        if change.is_empty() {
            return Ok(self.noop_token());
        }
        self.try_write(change.entities())?.apply(change)
    }

    fn noop_token(&self) -> CommitToken {
        CommitToken {
            sequence: self.sequence(),
            noop: true,
        }
    }

    fn commit(&self, change: &TxChange) -> Result<CommitToken, StoreError> {
        if self.poisoned.load(Ordering::SeqCst) {
            return Err(StoreError::Poisoned);
        }
        change.check()?;
        if change.is_empty() {
            return Ok(self.noop_token());
        }
        let fault = self.fault.lock().take();

        // Stage on copies; the caller holds the entity claims, so the
        // source graphs cannot change underneath us.
        let mut staged: HashMap<Option<String>, Graph> = {
            let ds = self.dataset.read();
            change
                .graphs()
                .into_iter()
                .map(|name| {
                    let g = match &name {
                        None => ds.default_graph().clone(),
                        Some(n) => ds.graph(n).cloned().unwrap_or_default(),
                    };
                    (name, g)
                })
                .collect()
        };
        let ops = change
            .removals
            .iter()
            .map(|q| (false, q))
            .chain(change.additions.iter().map(|q| (true, q)));
        for (applied, (add, quad)) in ops.enumerate() {
            if fault == Some(FaultPoint::AfterQuads(applied)) {
                return Err(StoreError::InjectedFault);
            }
            let g = staged.get_mut(&quad.graph).expect("graph staged");
            if add {
                g.insert(quad.triple());
            } else {
                g.remove(&quad.triple());
            }
        }

        let _order = self.commit_lock.lock();
        if let Some(persistence) = &self.persistence {
            let record = journal::encode(change);
            let mut p = persistence.lock();
            match fault {
                Some(FaultPoint::TornJournal(n)) => {
                    let n = n.min(record.len().saturating_sub(1));
                    p.journal.append(&record[..n])?;
                    self.poisoned.store(true, Ordering::SeqCst);
                    return Err(StoreError::InjectedFault);
                }
                Some(FaultPoint::AfterJournal) => {
                    p.journal.append(&record)?;
                    self.poisoned.store(true, Ordering::SeqCst);
                    return Err(StoreError::InjectedFault);
                }
                _ => {}
            }
            if let Err(e) = p.journal.append(&record) {
                // A partial record may be on disk; refuse further writes
                // until reopening truncates it.
                self.poisoned.store(true, Ordering::SeqCst);
                return Err(e.into());
            }
        }
        let mut ds = self.dataset.write();
        for (name, graph) in staged {
            match name {
                None => ds.set_default_graph(graph),
                Some(n) => ds.set_graph(&n, graph),
            }
        }
        drop(ds);
        self.dirty.store(true, Ordering::SeqCst);
        Ok(CommitToken {
            sequence: self.sequence.fetch_add(1, Ordering::SeqCst) + 1,
            noop: false,
        })
    }

    /// Writes the whole dataset to `data.nq` (via a temporary file and a
    /// rename) and empties the journal. Blocks writers for the duration.
    pub fn persist(&self) -> Result<PathBuf, StoreError> {
        let persistence = self.persistence.as_ref().ok_or(StoreError::NotPersistent)?;
        if self.poisoned.load(Ordering::SeqCst) {
            return Err(StoreError::Poisoned);
        }
        let _order = self.commit_lock.lock();
        let mut p = persistence.lock();
        let text = serialize_nquads(&self.dataset.read());
        let target = p.dir.join(DATA_FILE);
        write_atomically(&target, text.as_bytes())?;
        p.journal.truncate()?;
        self.dirty.store(false, Ordering::SeqCst);
        Ok(target)
    }

    pub fn journal_path(&self) -> Option<PathBuf> {
        self.persistence
            .as_ref()
            .map(|p| p.lock().journal.path().to_owned())
    }
}

fn apply_in_place(ds: &mut Dataset, change: &TxChange) {
    for q in &change.removals {
        ds.remove(q);
    }
    for q in &change.additions {
        ds.insert(q.clone());
    }
}

fn write_atomically(target: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = target.with_extension("nq.tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, target)?;
    if let Some(dir) = target.parent() {
        // Best effort: not every platform can fsync a directory.
        if let Ok(d) = fs::File::open(dir) {
            let _ = d.sync_all();
        }
    }
    Ok(())
}

/// Exclusive write access to a set of entities. Released on drop.
pub struct WriteGuard<'a> {
    store: &'a QuadStore,
    entities: Vec<String>,
}

impl WriteGuard<'_> {
    pub fn entities(&self) -> &[String] {
        &self.entities
    }

    pub fn apply(&self, change: &TxChange) -> Result<CommitToken, StoreError> {
        for entity in change.entities() {
            if !self.entities.contains(&entity) {
                return Err(StoreError::NotClaimed(entity));
            }
        }
        self.store.commit(change)
    }
}

impl Drop for WriteGuard<'_> {
    fn drop(&mut self) {
        let mut held = self.store.writers.lock();
        for e in &self.entities {
            held.remove(e);
        }
        self.store.released.notify_all();
    }
}
