//! The JSON projection of one entity's graph.
//!
//! ```json
//! {
//!   "iri": "https://w3id.org/quill/data/journalarticle/1",
//!   "type": "http://purl.org/spar/fabio/JournalArticle",
//!   "fields": {
//!     "http://purl.org/dc/terms/title": [{"type": "literal", "value": "..."}],
//!     "http://purl.org/vocab/frbr/core#partOf": [{"type": "iri", "value": "..."}],
//!     "http://purl.org/spar/datacite/hasIdentifier": [
//!       {"type": "node", "iri": "...genid/...", "fields": {...}}
//!     ]
//!   },
//!   "keywords": ["epigram"]
//! }
//! ```
//!
//! `type` is the entity's most specific class with a shape; `rdf:type`
//! statements for it and its declared supertypes are implied. Keywords are
//! the plain-string values of the profile's keyword predicate. Objects that
//! are skolem IRIs described in the same graph become nested nodes.

use std::collections::{BTreeMap, BTreeSet};

use quill_core::profile::ProfileBundle;
use quill_core::rdf::{is_absolute_iri, is_skolem_iri, mint_skolem_iri, Graph, Term, Triple};
use quill_core::vocab::{rdf, xsd};
use serde::{Deserialize, Serialize};

pub type Fields = BTreeMap<String, Vec<FieldValue>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum FieldValue {
    Iri {
        value: String,
    },
    Literal {
        value: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        datatype: Option<String>,
        #[serde(default, rename = "xml:lang", skip_serializing_if = "Option::is_none")]
        language: Option<String>,
    },
    Node {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        iri: Option<String>,
        #[serde(default)]
        fields: Fields,
    },
}

impl FieldValue {
    pub fn literal(value: impl Into<String>) -> Self {
        FieldValue::Literal {
            value: value.into(),
            datatype: None,
            language: None,
        }
    }

    pub fn typed(value: impl Into<String>, datatype: &str) -> Self {
        FieldValue::Literal {
            value: value.into(),
            datatype: Some(datatype.to_owned()),
            language: None,
        }
    }

    pub fn iri(value: impl Into<String>) -> Self {
        FieldValue::Iri { value: value.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntityDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iri: Option<String>,
    #[serde(rename = "type")]
    pub class: String,
    #[serde(default)]
    pub fields: Fields,
    #[serde(default)]
    pub keywords: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DocumentError {
    #[error("entity <{0}> has no rdf:type")]
    Untyped(String),
    #[error("<{0}> is not an absolute IRI")]
    NotAnIri(String),
    #[error("nested node <{0}> is not a skolem IRI")]
    NotSkolem(String),
    #[error("literal {value:?} has both a datatype and a language tag")]
    LangAndDatatype { value: String },
    #[error("{0} cannot be used as a field; use \"type\" or \"keywords\"")]
    ReservedField(String),
}

/// The most specific class of `root` that has a shape, else its first type.
pub fn primary_class(profile: &ProfileBundle, graph: &Graph, root: &Term) -> Option<String> {
    let types: Vec<&str> = graph.objects(root, rdf::TYPE).filter_map(Term::as_iri).collect();
    let shaped: Vec<&str> = types.iter().copied().filter(|t| profile.shapes.for_class(t).is_some()).collect();
    let candidates = if shaped.is_empty() { &types } else { &shaped };
    candidates
        .iter()
        .find(|c| !candidates.iter().any(|other| profile.supertypes_of(other).any(|s| s == **c)))
        .or(candidates.first())
        .map(|c| (*c).to_owned())
}

fn implied_types(profile: &ProfileBundle, class: &str) -> BTreeSet<String> {
    std::iter::once(class)
        .chain(profile.supertypes_of(class))
        .map(str::to_owned)
        .collect()
}

fn to_value(term: &Term) -> FieldValue {
    match term {
        Term::Iri(v) | Term::BlankNode(v) => FieldValue::Iri { value: v.clone() },
        Term::Literal(l) => FieldValue::Literal {
            value: l.lexical().to_owned(),
            datatype: (l.language().is_none() && l.datatype() != xsd::STRING).then(|| l.datatype().to_owned()),
            language: l.language().map(str::to_owned),
        },
    }
}

fn node_fields(graph: &Graph, node: &Term, visiting: &mut BTreeSet<Term>, skip: &dyn Fn(&Triple) -> bool) -> Fields {
    visiting.insert(node.clone());
    let mut fields = Fields::new();
    for t in graph.with_subject(node) {
        if skip(t) {
            continue;
        }
        let nested = t.object.as_iri().is_some_and(is_skolem_iri)
            && !visiting.contains(&t.object)
            && graph.with_subject(&t.object).next().is_some();
        let value = if nested {
            FieldValue::Node {
                iri: t.object.as_iri().map(str::to_owned),
                fields: node_fields(graph, &t.object, visiting, &|_| false),
            }
        } else {
            to_value(&t.object)
        };
        fields.entry(t.predicate.value().to_owned()).or_default().push(value);
    }
    visiting.remove(node);
    fields
}

impl EntityDocument {
    pub fn from_graph(profile: &ProfileBundle, entity: &str, graph: &Graph) -> Result<Self, DocumentError> {
        let root = Term::iri(entity);
        let class = primary_class(profile, graph, &root).ok_or_else(|| DocumentError::Untyped(entity.to_owned()))?;
        let implied = implied_types(profile, &class);
        let keyword = profile.keyword_predicate();
        let is_keyword = |t: &Triple| {
            t.predicate.value() == keyword
                && t.object.as_literal().is_some_and(|l| l.datatype() == xsd::STRING)
        };
        let keywords = graph
            .with_subject(&root)
            .filter(|t| is_keyword(t))
            .map(|t| t.object.value().to_owned())
            .collect();
        let fields = node_fields(graph, &root, &mut BTreeSet::new(), &|t| {
            is_keyword(t)
                || (t.predicate.value() == rdf::TYPE && t.object.as_iri().is_some_and(|c| implied.contains(c)))
        });
        Ok(Self {
            iri: Some(entity.to_owned()),
            class,
            fields,
            keywords,
        })
    }

    /// Builds the entity graph. Nested nodes without an IRI get a fresh
    /// skolem IRI under `base`; keywords are written as given.
    pub fn to_graph(&self, profile: &ProfileBundle, entity: &str, base: &str) -> Result<Graph, DocumentError> {
        let root = Term::iri(entity);
        let mut g = Graph::new();
        check_iri(&self.class)?;
        for class in implied_types(profile, &self.class) {
            g.insert(Triple::new(root.clone(), Term::iri(rdf::TYPE), Term::Iri(class)));
        }
        for k in &self.keywords {
            g.insert(Triple::new(root.clone(), Term::iri(profile.keyword_predicate()), Term::string(k)));
        }
        if self.fields.contains_key(profile.keyword_predicate()) {
            // A keyword with a language tag or datatype is still allowed
            // through the field map; plain strings belong in `keywords`.
            let plain = self.fields[profile.keyword_predicate()]
                .iter()
                .any(|v| matches!(v, FieldValue::Literal { datatype: None, language: None, .. }));
            if plain {
                return Err(DocumentError::ReservedField(profile.keyword_predicate().to_owned()));
            }
        }
        add_fields(&mut g, &root, &self.fields, base)?;
        Ok(g)
    }
}

fn check_iri(iri: &str) -> Result<(), DocumentError> {
    if is_absolute_iri(iri) {
        Ok(())
    } else {
        Err(DocumentError::NotAnIri(iri.to_owned()))
    }
}

fn add_fields(g: &mut Graph, subject: &Term, fields: &Fields, base: &str) -> Result<(), DocumentError> {
    for (predicate, values) in fields {
        check_iri(predicate)?;
        let p = Term::iri(predicate);
        for value in values {
            let object = match value {
                FieldValue::Iri { value } => {
                    check_iri(value)?;
                    Term::iri(value)
                }
                FieldValue::Literal {
                    value,
                    language: Some(lang),
                    datatype,
                } => {
                    if datatype.as_deref().is_some_and(|d| d != rdf::LANG_STRING) {
                        return Err(DocumentError::LangAndDatatype { value: value.clone() });
                    }
                    Term::lang_string(value, lang)
                }
                FieldValue::Literal { value, datatype, .. } => {
                    let dt = datatype.as_deref().unwrap_or(xsd::STRING);
                    check_iri(dt)?;
                    Term::typed(value, dt)
                }
                FieldValue::Node { iri, fields } => {
                    let node = match iri {
                        Some(iri) if is_skolem_iri(iri) => Term::iri(iri),
                        Some(iri) => return Err(DocumentError::NotSkolem(iri.clone())),
                        None => Term::Iri(mint_skolem_iri(base)),
                    };
                    add_fields(g, &node, fields, base)?;
                    node
                }
            };
            g.insert(Triple::new(subject.clone(), p.clone(), object));
        }
    }
    Ok(())
}
