//! Data profiles: a SHACL shapes file, a keyword vocabulary and display
//! labels, loaded together from one directory.
//!
//! ```text
//! <profile>/shapes.ttl        node shapes, plus rdfs:subClassOf axioms
//! <profile>/vocabulary.yaml   keyword categories and their terms
//! <profile>/display.json      {"<class IRI>": "label", ...}
//! ```

mod vocabulary;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

pub use vocabulary::{
    expand_keywords, load_vocabulary, validate_keywords, ControlledVocabulary, KeywordMode,
    KeywordViolation, UnknownKeywordError, VocabularyError,
};

use crate::rdf::{local_name, parse_turtle, Graph, RdfError, Term};
use crate::shacl::{derive_form_schema, load_shapes, FormSchema, ShapeLoadError, ShapesModel};
use crate::vocab::{cito, prism, rdfs};

pub const SHAPES_FILE: &str = "shapes.ttl";
pub const VOCABULARY_FILE: &str = "vocabulary.yaml";
pub const DISPLAY_FILE: &str = "display.json";

#[derive(Debug, thiserror::Error)]
pub enum ProfileProblem {
    #[error("cannot read {file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{SHAPES_FILE}: {0}")]
    Turtle(#[from] RdfError),
    #[error("{SHAPES_FILE}: {0}")]
    Shapes(#[from] ShapeLoadError),
    #[error("{VOCABULARY_FILE}: {0}")]
    Vocabulary(#[from] VocabularyError),
    #[error("{DISPLAY_FILE}: {0}")]
    Display(String),
    #[error("{DISPLAY_FILE}: class <{0}> has no shape")]
    UnknownDisplayClass(String),
    #[error("{SHAPES_FILE}: no citation link types (sh:in on cito:hasCitationCharacterisation)")]
    NoLinkTypes,
}

/// Everything wrong with a profile directory, not just the first problem.
#[derive(Debug)]
pub struct ProfileError {
    pub problems: Vec<ProfileProblem>,
}

impl fmt::Display for ProfileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid profile ({} problem", self.problems.len())?;
        if self.problems.len() != 1 {
            f.write_str("s")?;
        }
        f.write_str(")")?;
        for p in &self.problems {
            write!(f, "\n  - {p}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ProfileError {}

#[derive(Debug, Clone)]
pub struct ProfileBundle {
    pub shapes: ShapesModel,
    pub shapes_graph: Graph,
    pub vocabulary: ControlledVocabulary,
    pub display: BTreeMap<String, String>,
    pub link_types: BTreeSet<String>,
    pub form_schema: FormSchema,
    /// Transitive `rdfs:subClassOf` closure declared in the shapes file.
    pub supertypes: BTreeMap<String, BTreeSet<String>>,
}

impl ProfileBundle {
    /// Builds and cross-checks a bundle from the three documents.
    pub fn from_documents(shapes_ttl: &str, vocabulary: &str, display_json: &str) -> Result<Self, ProfileError> {
        let mut problems = Vec::new();
        let graph = parse_turtle(shapes_ttl, None)
            .map_err(|e| problems.push(e.into()))
            .ok();
        let shapes = graph
            .as_ref()
            .and_then(|g| load_shapes(g).map_err(|e| problems.push(e.into())).ok());
        let vocab = load_vocabulary(vocabulary)
            .map_err(|e| problems.push(e.into()))
            .ok();
        let display = serde_json::from_str::<BTreeMap<String, String>>(display_json)
            .map_err(|e| problems.push(ProfileProblem::Display(e.to_string())))
            .ok();

        let mut link_types = BTreeSet::new();
        if let Some(shapes) = &shapes {
            link_types = shapes
                .shapes()
                .iter()
                .flat_map(|s| &s.properties)
                .filter(|p| p.path.predicate == cito::HAS_CITATION_CHARACTERISATION)
                .flat_map(|p| p.in_list.iter().flatten())
                .filter_map(|t| t.as_iri().map(str::to_owned))
                .collect();
            if link_types.is_empty() {
                problems.push(ProfileProblem::NoLinkTypes);
            }
            if let Some(display) = &display {
                for class in display.keys() {
                    if shapes.for_class(class).is_none() {
                        problems.push(ProfileProblem::UnknownDisplayClass(class.clone()));
                    }
                }
            }
        }

        match (graph, shapes, vocab, display) {
            (Some(graph), Some(shapes), Some(vocabulary), Some(display)) if problems.is_empty() => {
                Ok(Self {
                    form_schema: derive_form_schema(&shapes),
                    supertypes: subclass_closure(&graph),
                    shapes,
                    shapes_graph: graph,
                    vocabulary,
                    display,
                    link_types,
                })
            }
            _ => Err(ProfileError { problems }),
        }
    }

    pub fn keyword_predicate(&self) -> &'static str {
        prism::KEYWORD
    }

    /// Display label for a class: the configured one, else its local name.
    pub fn class_label<'a>(&'a self, class: &'a str) -> &'a str {
        self.display
            .get(class)
            .map(String::as_str)
            .unwrap_or_else(|| local_name(class))
    }

    pub fn supertypes_of(&self, class: &str) -> impl Iterator<Item = &str> + '_ {
        self.supertypes.get(class).into_iter().flatten().map(String::as_str)
    }
}

fn subclass_closure(graph: &Graph) -> BTreeMap<String, BTreeSet<String>> {
    let mut direct: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for t in graph.iter() {
        if t.predicate.as_iri() == Some(rdfs::SUB_CLASS_OF) {
            if let (Term::Iri(sub), Term::Iri(sup)) = (&t.subject, &t.object) {
                direct.entry(sub.clone()).or_default().insert(sup.clone());
            }
        }
    }
    let mut closure = BTreeMap::new();
    for class in direct.keys() {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<&String> = direct[class].iter().collect();
        while let Some(c) = stack.pop() {
            if c != class && seen.insert(c.clone()) {
                stack.extend(direct.get(c).into_iter().flatten());
            }
        }
        closure.insert(class.clone(), seen);
    }
    closure
}

pub fn load_profile(dir: impl AsRef<Path>) -> Result<ProfileBundle, ProfileError> {
    let dir = dir.as_ref();
    let mut problems = Vec::new();
    let mut read = |name: &str| match std::fs::read_to_string(dir.join(name)) {
        Ok(text) => Some(text),
        Err(source) => {
            problems.push(ProfileProblem::Io {
                file: dir.join(name).display().to_string(),
                source,
            });
            None
        }
    };
    let shapes = read(SHAPES_FILE);
    let vocabulary = read(VOCABULARY_FILE);
    let display = read(DISPLAY_FILE);
    match (shapes, vocabulary, display) {
        (Some(s), Some(v), Some(d)) => ProfileBundle::from_documents(&s, &v, &d),
        _ => Err(ProfileError { problems }),
    }
}
