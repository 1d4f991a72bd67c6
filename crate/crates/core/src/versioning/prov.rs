//! RDF encoding of snapshot records.
//!
//! Snapshot `n` of entity `e` is the named graph `<e/prov/se/n>`, whose only
//! subject is `<e/prov/se/n>` itself:
//!
//! ```text
//! <e/prov/se/n> a prov:Entity, quill:Snapshot ;
//!     prov:specializationOf <e> ;
//!     quill:snapshotIndex n ;
//!     prov:generatedAtTime "…"^^xsd:dateTime ;
//!     prov:wasAttributedTo <agent> ;
//!     prov:hadPrimarySource <iri> | quill:sourceNote "text" ;
//!     dcterms:description "…" ;
//!     prov:wasDerivedFrom <e/prov/se/n-1> ;
//!     quill:addedTriples "<N-Triples lines>" ;
//!     quill:removedTriples "<N-Triples lines>" .
//! <e/prov/se/n-1> prov:invalidatedAtTime "…"^^xsd:dateTime .
//! ```
//!
//! The invalidation time of snapshot `n-1` lives in graph `n`, so a
//! provenance graph is never touched again once written.

use chrono::{DateTime, SecondsFormat, Utc};

use super::{Source, SnapshotRecord, VersionError};
use crate::rdf::{parse_quad_line, Delta, Graph, Term, Triple};
use crate::store::prov_graph_name;
use crate::vocab::{dcterms, prov, quill, rdf, xsd};

pub fn format_timestamp(ts: &DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::Millis, true)
}

pub fn parse_timestamp(text: &str) -> Option<DateTime<Utc>> {
    DateTime::parse_from_rfc3339(text)
        .ok()
        .map(|t| t.with_timezone(&Utc))
}

fn timestamp_term(ts: &DateTime<Utc>) -> Term {
    Term::typed(format_timestamp(ts), xsd::DATE_TIME)
}

fn triples_block(graph: &Graph) -> String {
    let mut out = String::new();
    for t in graph {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out
}

fn parse_block(text: &str, graph: &str) -> Result<Graph, VersionError> {
    let mut out = Graph::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let quad = parse_quad_line(line).map_err(|e| VersionError::CorruptProvenance {
            graph: graph.to_owned(),
            message: e.to_string(),
        })?;
        out.insert(quad.triple());
    }
    Ok(out)
}

/// The provenance graph for `record`, including the invalidation time of
/// the snapshot it supersedes.
pub fn snapshot_graph(record: &SnapshotRecord) -> Graph {
    let me = Term::iri(prov_graph_name(&record.entity, record.index));
    let p = |iri: &str| Term::iri(iri);
    let mut g = Graph::new();
    let mut add = |pred: &str, obj: Term| {
        g.insert(Triple::new(me.clone(), p(pred), obj));
    };
    add(rdf::TYPE, p(prov::ENTITY));
    add(rdf::TYPE, p(quill::SNAPSHOT));
    add(prov::SPECIALIZATION_OF, p(&record.entity));
    add(
        quill::SNAPSHOT_INDEX,
        Term::typed(record.index.to_string(), xsd::INTEGER),
    );
    add(prov::GENERATED_AT_TIME, timestamp_term(&record.generated_at));
    add(prov::WAS_ATTRIBUTED_TO, p(&record.agent));
    match &record.primary_source {
        Some(Source::Iri(iri)) => add(prov::HAD_PRIMARY_SOURCE, p(iri)),
        Some(Source::Text(text)) => add(quill::SOURCE_NOTE, Term::string(text.clone())),
        None => {}
    }
    if let Some(d) = &record.description {
        add(dcterms::DESCRIPTION, Term::string(d.clone()));
    }
    add(quill::ADDED_TRIPLES, Term::string(triples_block(&record.delta.added)));
    add(quill::REMOVED_TRIPLES, Term::string(triples_block(&record.delta.removed)));
    if record.index > 1 {
        let prev = Term::iri(prov_graph_name(&record.entity, record.index - 1));
        add(prov::WAS_DERIVED_FROM, prev.clone());
        g.insert(Triple::new(
            prev,
            p(prov::INVALIDATED_AT_TIME),
            timestamp_term(&record.generated_at),
        ));
    }
    g
}

/// Decodes snapshot `index` of `entity` from its provenance graph. The
/// invalidation time is left unset; it is filled from the next graph.
pub fn read_snapshot(entity: &str, index: u64, graph: &Graph) -> Result<SnapshotRecord, VersionError> {
    let name = prov_graph_name(entity, index);
    let me = Term::iri(name.clone());
    let corrupt = |message: &str| VersionError::CorruptProvenance {
        graph: name.clone(),
        message: message.to_owned(),
    };
    let literal = |pred: &str| {
        graph
            .object(&me, pred)
            .and_then(Term::as_literal)
            .map(|l| l.lexical().to_owned())
    };
    let iri = |pred: &str| {
        graph
            .object(&me, pred)
            .and_then(Term::as_iri)
            .map(str::to_owned)
    };
    let generated_at = literal(prov::GENERATED_AT_TIME)
        .as_deref()
        .and_then(parse_timestamp)
        .ok_or_else(|| corrupt("missing or invalid generatedAtTime"))?;
    let agent = iri(prov::WAS_ATTRIBUTED_TO).ok_or_else(|| corrupt("missing wasAttributedTo"))?;
    let primary_source = iri(prov::HAD_PRIMARY_SOURCE)
        .map(Source::Iri)
        .or_else(|| literal(quill::SOURCE_NOTE).map(Source::Text));
    let added = parse_block(&literal(quill::ADDED_TRIPLES).unwrap_or_default(), &name)?;
    let removed = parse_block(&literal(quill::REMOVED_TRIPLES).unwrap_or_default(), &name)?;
    Ok(SnapshotRecord {
        entity: entity.to_owned(),
        index,
        generated_at,
        invalidated_at: None,
        agent,
        primary_source,
        description: literal(dcterms::DESCRIPTION),
        delta: Delta { added, removed },
    })
}

/// The invalidation time that graph `index` records for snapshot `index-1`.
pub fn read_invalidation(entity: &str, index: u64, graph: &Graph) -> Option<DateTime<Utc>> {
    let prev = Term::iri(prov_graph_name(entity, index - 1));
    graph
        .object(&prev, prov::INVALIDATED_AT_TIME)
        .and_then(Term::as_literal)
        .and_then(|l| parse_timestamp(l.lexical()))
}
