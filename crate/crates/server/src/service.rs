//! Entity operations behind the HTTP routes and the command line: the
//! document pipeline (keyword policy, graph build, validation), IRI
//! minting, search and bulk import.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use parking_lot::Mutex;
use quill_core::profile::{
    expand_keywords, validate_keywords, KeywordMode, KeywordViolation, ProfileBundle, UnknownKeywordError,
};
use quill_core::rdf::{is_skolem_iri, local_name, skolemize, Delta, Graph, Term, Triple};
use quill_core::shacl::{validate_nodes, ValidationReport};
use quill_core::store::{QuadStore, StoreError};
use quill_core::versioning::{At, Clock, EntityHistory, SnapshotRecord, Source, VersionError, VersionStore};
use quill_core::vocab::{dcterms, foaf, rdf, rdfs, xsd};
use serde::Serialize;

use crate::document::{primary_class, DocumentError, EntityDocument};

pub const IMPORT_DESCRIPTION: &str = "import";

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("no shape for entity type <{0}>")]
    UnknownType(String),
    #[error("no entity <{0}>")]
    NotFound(String),
    #[error("entity <{0}> has been deleted")]
    Deleted(String),
    #[error("version {index} of <{entity}> is empty (the entity was deleted)")]
    EmptyVersion { entity: String, index: u64 },
    #[error("entity <{0}> already exists")]
    Collision(String),
    #[error("document iri <{document}> does not match <{target}>")]
    IriMismatch { document: String, target: String },
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error("the entity does not conform to the profile shapes ({} result(s))", .0.results.len())]
    Invalid(ValidationReport),
    #[error("macro-categories removed while their terms are still present")]
    KeywordClosure(Vec<KeywordViolation>),
    #[error(transparent)]
    UnknownKeywords(#[from] UnknownKeywordError),
    #[error(transparent)]
    Version(#[from] VersionError),
}

impl From<StoreError> for ServiceError {
    fn from(e: StoreError) -> Self {
        ServiceError::Version(e.into())
    }
}

pub type Result<T, E = ServiceError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchHit {
    pub iri: String,
    #[serde(rename = "type")]
    pub class: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Imported {
    pub iri: String,
    pub index: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Skipped {
    pub iri: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ImportSummary {
    pub imported: Vec<Imported>,
    pub skipped: Vec<Skipped>,
    /// Triples not owned by any typed entity in the input.
    pub unowned_triples: usize,
}

pub struct Curator {
    profile: Arc<ProfileBundle>,
    versions: VersionStore,
    base: String,
    counters: Mutex<BTreeMap<String, u64>>,
    compact_every: u64,
    writes: AtomicU64,
}

const LABEL_PREDICATES: [&str; 3] = [dcterms::TITLE, rdfs::LABEL, foaf::NAME];

fn plain_strings<'a>(graph: &'a Graph, subject: &'a Term, predicate: &'a str) -> impl Iterator<Item = &'a str> + 'a {
    graph
        .objects(subject, predicate)
        .filter_map(Term::as_literal)
        .filter(|l| l.datatype() == xsd::STRING)
        .map(|l| l.lexical())
}

fn label_of(graph: &Graph, root: &Term) -> Option<String> {
    for p in LABEL_PREDICATES {
        if let Some(l) = graph.objects(root, p).find_map(Term::as_literal) {
            return Some(l.lexical().to_owned());
        }
    }
    let family = graph.object(root, foaf::FAMILY_NAME).map(Term::value);
    let given = graph.object(root, foaf::GIVEN_NAME).map(Term::value);
    match (family, given) {
        (Some(f), Some(g)) => Some(format!("{f}, {g}")),
        (Some(n), None) | (None, Some(n)) => Some(n.to_owned()),
        (None, None) => None,
    }
}

fn label_texts(graph: &Graph, root: &Term) -> Vec<String> {
    LABEL_PREDICATES
        .into_iter()
        .chain([foaf::FAMILY_NAME, foaf::GIVEN_NAME])
        .flat_map(|p| graph.objects(root, p).filter_map(Term::as_literal))
        .map(|l| l.lexical().to_lowercase())
        .collect()
}

impl Curator {
    pub fn new(
        profile: Arc<ProfileBundle>,
        store: Arc<QuadStore>,
        clock: Arc<dyn Clock>,
        base: &str,
    ) -> Result<Self, VersionError> {
        let versions = VersionStore::open(store, clock)?;
        let base = base.trim_end_matches('/').to_owned();
        let mut counters = BTreeMap::new();
        for e in versions.entities() {
            if let Some((kind, n)) = e
                .strip_prefix(&format!("{base}/"))
                .and_then(|rest| rest.split_once('/'))
                .and_then(|(kind, n)| Some((kind, n.parse::<u64>().ok()?)))
            {
                let c = counters.entry(kind.to_owned()).or_insert(0);
                *c = (*c).max(n);
            }
        }
        Ok(Self {
            profile,
            versions,
            base,
            counters: Mutex::new(counters),
            compact_every: 0,
            writes: AtomicU64::new(0),
        })
    }

    /// Compacts the journal into the data file every `n` writes (0: never).
    pub fn with_compaction(mut self, n: u64) -> Self {
        self.compact_every = n;
        self
    }

    pub fn profile(&self) -> &ProfileBundle {
        &self.profile
    }

    pub fn versions(&self) -> &VersionStore {
        &self.versions
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    /// An absolute IRI as is; anything else relative to the base.
    pub fn resolve_id(&self, id: &str) -> String {
        if id.contains("://") || id.starts_with("urn:") {
            id.to_owned()
        } else {
            format!("{}/{}", self.base, id.trim_start_matches('/'))
        }
    }

    /// `<base>/<lowercased class local name>/<n>` with the next unused n.
    pub fn mint_iri(&self, class: &str) -> String {
        let kind = local_name(class).to_lowercase();
        let mut counters = self.counters.lock();
        let n = counters.entry(kind.clone()).or_insert(0);
        loop {
            *n += 1;
            let iri = format!("{}/{kind}/{n}", self.base);
            if self.versions.latest_index(&iri) == 0 {
                return iri;
            }
        }
    }

    fn note_write(&self) {
        let n = self.writes.fetch_add(1, Ordering::SeqCst) + 1;
        if self.compact_every > 0 && n.is_multiple_of(self.compact_every) {
            if let Err(e) = self.persist() {
                tracing::warn!("journal compaction failed: {e}");
            }
        }
    }

    /// Writes the data file if the store has a directory.
    pub fn persist(&self) -> Result<Option<PathBuf>, StoreError> {
        let store = self.versions.store();
        if store.dir().is_none() {
            return Ok(None);
        }
        store.persist().map(Some)
    }

    /// Validates the nodes of `graph` with the types of the entities it
    /// references (from the store, or from `extra`) in view.
    pub fn validate_state(&self, graph: &Graph, extra: Option<&Graph>) -> ValidationReport {
        let subjects: BTreeSet<Term> = graph.iter().map(|t| t.subject.clone()).collect();
        let mut data = graph.clone();
        let referenced: BTreeSet<&Term> = graph
            .iter()
            .map(|t| &t.object)
            .filter(|o| o.is_iri() && !subjects.contains(*o))
            .collect();
        for r in referenced {
            let current = self.versions.current(r.value());
            let sources = [Some(&current), extra];
            for g in sources.into_iter().flatten() {
                for class in g.objects(r, rdf::TYPE) {
                    data.insert(Triple::new(r.clone(), Term::iri(rdf::TYPE), class.clone()));
                }
            }
        }
        validate_nodes(&data, &self.profile.shapes, &subjects)
    }

    fn keywords_of(&self, iri: &str, graph: &Graph) -> BTreeSet<String> {
        let root = Term::iri(iri);
        plain_strings(graph, &root, self.profile.keyword_predicate())
            .map(str::to_owned)
            .collect()
    }

    /// Adds the category of every term. On update, a category the client
    /// dropped while one of its terms stays is rejected instead of being
    /// silently added back.
    fn keyword_policy(&self, keywords: &BTreeSet<String>, prior: Option<&BTreeSet<String>>) -> Result<BTreeSet<String>> {
        let vocab = &self.profile.vocabulary;
        // Unknown terms are reported first; closure is only meaningful for
        // a set the vocabulary fully knows.
        let expanded = expand_keywords(keywords, vocab, KeywordMode::Strict)?;
        if let Some(prior) = prior {
            let violations: Vec<KeywordViolation> = validate_keywords(keywords, vocab)
                .into_iter()
                .filter(|v| prior.contains(&v.missing_category))
                .collect();
            if !violations.is_empty() {
                return Err(ServiceError::KeywordClosure(violations));
            }
        }
        Ok(expanded)
    }

    fn prepare(&self, iri: &str, doc: &EntityDocument, prior: Option<&BTreeSet<String>>) -> Result<Graph> {
        if self.profile.shapes.for_class(&doc.class).is_none() {
            return Err(ServiceError::UnknownType(doc.class.clone()));
        }
        if let Some(doc_iri) = doc.iri.as_deref().filter(|d| *d != iri) {
            return Err(ServiceError::IriMismatch {
                document: doc_iri.to_owned(),
                target: iri.to_owned(),
            });
        }
        let mut doc = doc.clone();
        doc.keywords = self.keyword_policy(&doc.keywords, prior)?;
        let graph = doc.to_graph(&self.profile, iri, &self.base)?;
        let report = self.validate_state(&graph, None);
        if !report.conforms {
            return Err(ServiceError::Invalid(report));
        }
        Ok(graph)
    }

    pub fn create(
        &self,
        doc: &EntityDocument,
        agent: &str,
        source: Option<Source>,
        description: Option<String>,
    ) -> Result<(String, SnapshotRecord)> {
        let iri = match &doc.iri {
            Some(iri) => {
                if self.versions.latest_index(iri) > 0 {
                    return Err(ServiceError::Collision(iri.clone()));
                }
                iri.clone()
            }
            None => {
                if self.profile.shapes.for_class(&doc.class).is_none() {
                    return Err(ServiceError::UnknownType(doc.class.clone()));
                }
                self.mint_iri(&doc.class)
            }
        };
        let graph = self.prepare(&iri, doc, None)?;
        let record = self
            .versions
            .commit_at(&iri, 0, graph, agent, source, description)
            .map_err(|e| match e {
                VersionError::Stale { .. } => ServiceError::Collision(iri.clone()),
                other => other.into(),
            })?;
        self.note_write();
        Ok((iri, record))
    }

    fn live(&self, iri: &str) -> Result<(u64, Graph)> {
        let latest = self.versions.latest_index(iri);
        if latest == 0 {
            return Err(ServiceError::NotFound(iri.to_owned()));
        }
        let current = self.versions.current(iri);
        if current.is_empty() {
            return Err(ServiceError::Deleted(iri.to_owned()));
        }
        Ok((latest, current))
    }

    pub fn update(
        &self,
        iri: &str,
        doc: &EntityDocument,
        agent: &str,
        source: Option<Source>,
        description: Option<String>,
    ) -> Result<SnapshotRecord> {
        let (latest, current) = self.live(iri)?;
        let prior = self.keywords_of(iri, &current);
        let graph = self.prepare(iri, doc, Some(&prior))?;
        let record = self.versions.commit_at(iri, latest, graph, agent, source, description)?;
        self.note_write();
        Ok(record)
    }

    pub fn delete(&self, iri: &str, agent: &str) -> Result<SnapshotRecord> {
        self.live(iri)?;
        let record = self.versions.delete_entity(iri, agent)?;
        self.note_write();
        Ok(record)
    }

    pub fn restore(&self, iri: &str, index: u64, agent: &str) -> Result<SnapshotRecord> {
        self.history(iri)?;
        let record = self.versions.restore(iri, index, agent)?;
        self.note_write();
        Ok(record)
    }

    pub fn document(&self, iri: &str) -> Result<EntityDocument> {
        let (_, current) = self.live(iri)?;
        Ok(EntityDocument::from_graph(&self.profile, iri, &current)?)
    }

    pub fn version_document(&self, iri: &str, index: u64) -> Result<EntityDocument> {
        self.history(iri)?;
        let state = self.versions.materialize(iri, At::Index(index))?;
        if state.is_empty() {
            return Err(ServiceError::EmptyVersion {
                entity: iri.to_owned(),
                index,
            });
        }
        Ok(EntityDocument::from_graph(&self.profile, iri, &state)?)
    }

    pub fn history(&self, iri: &str) -> Result<EntityHistory> {
        let history = self.versions.history(iri);
        if history.snapshots.is_empty() {
            return Err(ServiceError::NotFound(iri.to_owned()));
        }
        Ok(history)
    }

    pub fn diff(&self, iri: &str, i: u64, j: u64) -> Result<Delta> {
        self.history(iri)?;
        Ok(self.versions.diff_versions(iri, i, j)?)
    }

    /// Live entities, filtered by class (including declared supertypes) and
    /// by a case-insensitive substring of a title or label, or an exact
    /// keyword. Sorted by IRI.
    pub fn search(&self, class: Option<&str>, query: Option<&str>) -> Vec<SearchHit> {
        let needle = query.map(str::trim).filter(|q| !q.is_empty());
        let lowered = needle.map(str::to_lowercase);
        self.versions
            .entities()
            .into_iter()
            .filter_map(|iri| {
                let graph = self.versions.current(&iri);
                let root = Term::iri(&iri);
                if graph.is_empty() {
                    return None;
                }
                if class.is_some_and(|c| !graph.has_type(&root, c)) {
                    return None;
                }
                if let (Some(needle), Some(lowered)) = (needle, &lowered) {
                    let by_label = label_texts(&graph, &root).iter().any(|t| t.contains(lowered.as_str()));
                    let by_keyword = plain_strings(&graph, &root, self.profile.keyword_predicate()).any(|k| k == needle);
                    if !by_label && !by_keyword {
                        return None;
                    }
                }
                Some(SearchHit {
                    class: primary_class(&self.profile, &graph, &root).unwrap_or_default(),
                    label: label_of(&graph, &root).unwrap_or_else(|| iri.clone()),
                    iri,
                })
            })
            .collect()
    }

    /// Imports every typed entity in `data` as its own commit. Blank nodes
    /// are skolemized first; keywords are expanded leniently (unknown terms
    /// kept). Entities that fail validation are skipped and reported.
    pub fn import(&self, data: &Graph, agent: &str) -> ImportSummary {
        let data = skolemize(data, &self.base);
        let roots: BTreeSet<Term> = data
            .iter()
            .filter(|t| t.predicate.value() == rdf::TYPE)
            .filter(|t| t.subject.as_iri().is_some_and(|s| !is_skolem_iri(s)))
            .filter(|t| t.object.as_iri().is_some_and(|c| self.profile.shapes.for_class(c).is_some()))
            .map(|t| t.subject.clone())
            .collect();
        let mut summary = ImportSummary::default();
        let mut owned = Graph::new();
        for root in roots {
            let iri = root.value().to_owned();
            let mut graph = data.owned_by(&root);
            owned = owned.union(&graph);
            if let Some(class) = primary_class(&self.profile, &graph, &root) {
                for sup in self.profile.supertypes_of(&class) {
                    graph.insert(Triple::new(root.clone(), Term::iri(rdf::TYPE), Term::iri(sup)));
                }
            }
            let keywords = self.keywords_of(&iri, &graph);
            let expanded = expand_keywords(&keywords, &self.profile.vocabulary, KeywordMode::Lenient)
                .expect("lenient expansion does not fail");
            for k in expanded.difference(&keywords) {
                graph.insert(Triple::new(root.clone(), Term::iri(self.profile.keyword_predicate()), Term::string(k)));
            }
            let report = self.validate_state(&graph, Some(&data));
            if !report.conforms {
                let first = &report.results[0];
                summary.skipped.push(Skipped {
                    reason: format!(
                        "{} violation(s), first: {} on <{}>",
                        report.results.len(),
                        first.message,
                        first.path
                    ),
                    iri,
                });
                continue;
            }
            match self.versions.commit(&iri, graph, agent, None, Some(IMPORT_DESCRIPTION.to_owned())) {
                Ok(record) => {
                    self.note_write();
                    summary.imported.push(Imported { iri, index: record.index });
                }
                Err(e) => summary.skipped.push(Skipped { iri, reason: e.to_string() }),
            }
        }
        summary.unowned_triples = data.difference(&owned).len();
        summary
    }
}
