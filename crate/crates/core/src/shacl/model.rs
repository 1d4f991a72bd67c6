use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::rdf::Term;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ShapeLoadError {
    #[error("shape <{shape}> references undeclared node shape <{target}>")]
    DanglingNodeRef { shape: String, target: String },
    #[error("property <{path}> of shape <{shape}> declares both sh:datatype and sh:class")]
    DatatypeAndClass { shape: String, path: String },
    #[error("property <{path}> of shape <{shape}> has sh:minCount {min} > sh:maxCount {max}")]
    MinExceedsMax {
        shape: String,
        path: String,
        min: u64,
        max: u64,
    },
    #[error("node shapes <{first}> and <{second}> both target class <{class}>")]
    DuplicateTarget {
        class: String,
        first: String,
        second: String,
    },
    #[error("duplicate node shape <{0}>")]
    DuplicateShape(String),
    #[error("invalid shape definition at {node}: {message}")]
    Invalid { node: String, message: String },
}

impl ShapeLoadError {
    pub(crate) fn invalid(node: &Term, message: impl Into<String>) -> Self {
        ShapeLoadError::Invalid {
            node: node.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathDirection {
    Forward,
    Inverse,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PropertyPath {
    pub predicate: String,
    pub direction: PathDirection,
}

impl PropertyPath {
    pub fn forward(predicate: impl Into<String>) -> Self {
        Self {
            predicate: predicate.into(),
            direction: PathDirection::Forward,
        }
    }

    pub fn inverse(predicate: impl Into<String>) -> Self {
        Self {
            predicate: predicate.into(),
            direction: PathDirection::Inverse,
        }
    }
}

impl fmt::Display for PropertyPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.direction {
            PathDirection::Forward => write!(f, "<{}>", self.predicate),
            PathDirection::Inverse => write!(f, "^<{}>", self.predicate),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Iri,
    Literal,
    BlankNodeOrIri,
}

impl NodeKind {
    pub fn matches(self, term: &Term) -> bool {
        match self {
            NodeKind::Iri => term.is_iri(),
            NodeKind::Literal => term.is_literal(),
            NodeKind::BlankNodeOrIri => !term.is_literal(),
        }
    }
}

/// A compiled `sh:pattern`. The dialect is the `regex` crate's: no
/// backreferences or lookaround.
#[derive(Debug, Clone)]
pub struct Pattern {
    source: String,
    regex: regex::Regex,
}

impl Pattern {
    pub fn new(source: &str) -> Result<Self, regex::Error> {
        Ok(Self {
            source: source.to_owned(),
            regex: regex::Regex::new(source)?,
        })
    }

    pub fn as_str(&self) -> &str {
        &self.source
    }

    pub fn is_match(&self, text: &str) -> bool {
        self.regex.is_match(text)
    }
}

impl PartialEq for Pattern {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyShape {
    pub path: PropertyPath,
    pub min_count: Option<u64>,
    pub max_count: Option<u64>,
    pub datatype: Option<String>,
    pub class: Option<String>,
    pub node_kind: Option<NodeKind>,
    pub in_list: Option<Vec<Term>>,
    pub pattern: Option<Pattern>,
    pub has_value: Option<Term>,
    pub node: Option<String>,
    pub name: Option<String>,
    pub description: Option<String>,
    pub order: Option<f64>,
}

impl PropertyShape {
    pub fn new(path: PropertyPath) -> Self {
        Self {
            path,
            min_count: None,
            max_count: None,
            datatype: None,
            class: None,
            node_kind: None,
            in_list: None,
            pattern: None,
            has_value: None,
            node: None,
            name: None,
            description: None,
            order: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeShape {
    pub iri: String,
    pub target_class: Option<String>,
    /// Form field order: `sh:order` ascending, unordered properties last.
    pub properties: Vec<PropertyShape>,
    pub label: Option<String>,
}

/// Shapes indexed by IRI and by target class. Immutable once built.
#[derive(Debug, Clone, Default)]
pub struct ShapesModel {
    shapes: Vec<NodeShape>,
    by_iri: HashMap<String, usize>,
    by_target: BTreeMap<String, usize>,
    warnings: Vec<String>,
}

impl ShapesModel {
    /// Checks the model invariants: distinct shape IRIs, one shape per
    /// target class, resolvable `sh:node` references, `minCount ≤ maxCount`,
    /// no property with both datatype and class, non-empty `sh:in`.
    pub fn new(shapes: Vec<NodeShape>) -> Result<Self, ShapeLoadError> {
        Self::with_warnings(shapes, Vec::new())
    }

    pub(crate) fn with_warnings(
        mut shapes: Vec<NodeShape>,
        warnings: Vec<String>,
    ) -> Result<Self, ShapeLoadError> {
        shapes.sort_by(|a, b| a.iri.cmp(&b.iri));
        let mut by_iri = HashMap::new();
        let mut by_target = BTreeMap::new();
        for (i, shape) in shapes.iter().enumerate() {
            if by_iri.insert(shape.iri.clone(), i).is_some() {
                return Err(ShapeLoadError::DuplicateShape(shape.iri.clone()));
            }
            if let Some(class) = &shape.target_class {
                if let Some(prev) = by_target.insert(class.clone(), i) {
                    return Err(ShapeLoadError::DuplicateTarget {
                        class: class.clone(),
                        first: shapes[prev].iri.clone(),
                        second: shape.iri.clone(),
                    });
                }
            }
        }
        for shape in &shapes {
            for p in &shape.properties {
                let path = p.path.predicate.clone();
                if p.datatype.is_some() && p.class.is_some() {
                    return Err(ShapeLoadError::DatatypeAndClass {
                        shape: shape.iri.clone(),
                        path,
                    });
                }
                if let (Some(min), Some(max)) = (p.min_count, p.max_count) {
                    if min > max {
                        return Err(ShapeLoadError::MinExceedsMax {
                            shape: shape.iri.clone(),
                            path,
                            min,
                            max,
                        });
                    }
                }
                if p.max_count == Some(0) {
                    return Err(ShapeLoadError::Invalid {
                        node: shape.iri.clone(),
                        message: format!("sh:maxCount of {path} must be positive"),
                    });
                }
                if p.in_list.as_ref().is_some_and(Vec::is_empty) {
                    return Err(ShapeLoadError::Invalid {
                        node: shape.iri.clone(),
                        message: format!("sh:in of {path} is empty"),
                    });
                }
                if let Some(target) = &p.node {
                    if !by_iri.contains_key(target) {
                        return Err(ShapeLoadError::DanglingNodeRef {
                            shape: shape.iri.clone(),
                            target: target.clone(),
                        });
                    }
                }
            }
        }
        Ok(Self {
            shapes,
            by_iri,
            by_target,
            warnings,
        })
    }

    /// Shapes sorted by IRI.
    pub fn shapes(&self) -> &[NodeShape] {
        &self.shapes
    }

    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    pub fn shape(&self, iri: &str) -> Option<&NodeShape> {
        self.by_iri.get(iri).map(|&i| &self.shapes[i])
    }

    pub(crate) fn shape_index(&self, iri: &str) -> Option<usize> {
        self.by_iri.get(iri).copied()
    }

    pub fn for_class(&self, class: &str) -> Option<&NodeShape> {
        self.by_target.get(class).map(|&i| &self.shapes[i])
    }

    pub fn target_classes(&self) -> impl Iterator<Item = &str> + '_ {
        self.by_target.keys().map(String::as_str)
    }

    /// Unsupported SHACL vocabulary seen while loading.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}
