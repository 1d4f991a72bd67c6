use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::model::{PathDirection, PropertyShape, ShapesModel};
use crate::rdf::{Graph, Term};
use crate::vocab::rdf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Component {
    MinCount,
    MaxCount,
    Datatype,
    Class,
    NodeKind,
    In,
    Pattern,
    HasValue,
    Node,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ValidationResult {
    pub focus_node: Term,
    pub path: String,
    pub component: Component,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offending_value: Option<Term>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub conforms: bool,
    pub results: Vec<ValidationResult>,
}

impl ValidationReport {
    fn from_results(mut results: Vec<ValidationResult>) -> Self {
        results.sort();
        Self {
            conforms: results.is_empty(),
            results,
        }
    }
}

/// How focus nodes are distributed over threads. `Parallel` degrades to
/// sequential when the crate is built without the `parallel` feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

/// Validates every node whose `rdf:type` is a shape's target class.
pub fn validate(data: &Graph, shapes: &ShapesModel) -> ValidationReport {
    validate_with(data, shapes, None, Execution::default())
}

/// Like [`validate`], restricted to focus nodes contained in `focus`. Other
/// nodes in `data` are still visible to `sh:class` and `sh:node` checks.
pub fn validate_nodes(data: &Graph, shapes: &ShapesModel, focus: &BTreeSet<Term>) -> ValidationReport {
    validate_with(data, shapes, Some(focus), Execution::default())
}

pub fn validate_with(
    data: &Graph,
    shapes: &ShapesModel,
    focus: Option<&BTreeSet<Term>>,
    execution: Execution,
) -> ValidationReport {
    let validator = Validator::new(data, shapes);
    let jobs: Vec<(usize, &Term)> = shapes
        .shapes()
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.target_class.as_deref().map(|c| (i, c)))
        .flat_map(|(i, class)| {
            let class = Term::Iri(class.to_owned());
            data.iter()
                .filter(move |t| t.predicate.value() == rdf::TYPE && t.object == class)
                .map(move |t| (i, &t.subject))
                .filter(|(_, node)| focus.is_none_or(|f| f.contains(*node)))
                .collect::<Vec<_>>()
        })
        .collect();

    let run = |&(shape, node): &(usize, &Term)| {
        let mut stack = vec![(node.clone(), shape)];
        validator.check_shape(node, shape, &mut stack)
    };
    let results: Vec<ValidationResult> = match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            jobs.par_iter().flat_map_iter(run).collect()
        }
        _ => jobs.iter().flat_map(run).collect(),
    };
    ValidationReport::from_results(results)
}

struct Validator<'a> {
    data: &'a Graph,
    shapes: &'a ShapesModel,
    /// (predicate, object) → subjects, for inverse paths.
    inverse: HashMap<(&'a str, &'a Term), Vec<&'a Term>>,
}

impl<'a> Validator<'a> {
    fn new(data: &'a Graph, shapes: &'a ShapesModel) -> Self {
        let inverse_predicates: BTreeSet<&str> = shapes
            .shapes()
            .iter()
            .flat_map(|s| &s.properties)
            .filter(|p| p.path.direction == PathDirection::Inverse)
            .map(|p| p.path.predicate.as_str())
            .collect();
        let mut inverse: HashMap<(&str, &Term), Vec<&Term>> = HashMap::new();
        if !inverse_predicates.is_empty() {
            for t in data.iter() {
                if inverse_predicates.contains(t.predicate.value()) {
                    inverse
                        .entry((t.predicate.value(), &t.object))
                        .or_default()
                        .push(&t.subject);
                }
            }
        }
        Self {
            data,
            shapes,
            inverse,
        }
    }

    fn values<'b>(&'b self, focus: &'b Term, prop: &'b PropertyShape) -> Vec<&'b Term> {
        match prop.path.direction {
            PathDirection::Forward => self.data.objects(focus, &prop.path.predicate).collect(),
            PathDirection::Inverse => self
                .inverse
                .get(&(prop.path.predicate.as_str(), focus))
                .cloned()
                .unwrap_or_default(),
        }
    }

    fn check_shape(
        &self,
        focus: &Term,
        shape: usize,
        stack: &mut Vec<(Term, usize)>,
    ) -> Vec<ValidationResult> {
        let shape = &self.shapes.shapes()[shape];
        shape
            .properties
            .iter()
            .flat_map(|p| self.check_property(focus, p, stack))
            .collect()
    }

    /// Whether `node` conforms to shape `shape`. A (node, shape) pair already
    /// on the stack is treated as conforming, which ends cycles.
    fn conforms(&self, node: &Term, shape: usize, stack: &mut Vec<(Term, usize)>) -> bool {
        if stack.iter().any(|(n, s)| *s == shape && n == node) {
            return true;
        }
        stack.push((node.clone(), shape));
        let ok = self.shapes.shapes()[shape]
            .properties
            .iter()
            .all(|p| self.check_property(node, p, stack).is_empty());
        stack.pop();
        ok
    }

    fn check_property(
        &self,
        focus: &Term,
        prop: &PropertyShape,
        stack: &mut Vec<(Term, usize)>,
    ) -> Vec<ValidationResult> {
        let values = self.values(focus, prop);
        self.check_values(focus, prop, &values, stack)
    }

    fn check_values(
        &self,
        focus: &Term,
        prop: &PropertyShape,
        values: &[&Term],
        stack: &mut Vec<(Term, usize)>,
    ) -> Vec<ValidationResult> {
        let mut out = Vec::new();
        let path = &prop.path.predicate;
        let mut push = |component, value: Option<&Term>, message: String| {
            out.push(ValidationResult {
                focus_node: focus.clone(),
                path: path.clone(),
                component,
                offending_value: value.cloned(),
                message,
            })
        };
        let count = values.len() as u64;
        if let Some(min) = prop.min_count {
            if count < min {
                push(
                    Component::MinCount,
                    None,
                    format!("{} requires at least {min} value(s), found {count}", prop.path),
                );
            }
        }
        if let Some(max) = prop.max_count {
            if count > max {
                push(
                    Component::MaxCount,
                    None,
                    format!("{} allows at most {max} value(s), found {count}", prop.path),
                );
            }
        }
        if let Some(expected) = &prop.has_value {
            if !values.contains(&expected) {
                push(
                    Component::HasValue,
                    None,
                    format!("{} must include the value {expected}", prop.path),
                );
            }
        }
        for &value in values {
            if let Some(dt) = &prop.datatype {
                if value.as_literal().is_none_or(|l| l.datatype() != dt) {
                    push(Component::Datatype, Some(value), format!("{value} is not a literal of datatype <{dt}>"));
                }
            }
            if let Some(class) = &prop.class {
                if value.is_literal() || !self.data.has_type(value, class) {
                    push(Component::Class, Some(value), format!("{value} is not an instance of <{class}>"));
                }
            }
            if let Some(kind) = prop.node_kind {
                if !kind.matches(value) {
                    push(Component::NodeKind, Some(value), format!("{value} does not have node kind {kind:?}"));
                }
            }
            if let Some(list) = &prop.in_list {
                if !list.contains(value) {
                    push(Component::In, Some(value), format!("{value} is not one of the allowed values"));
                }
            }
            if let Some(pattern) = &prop.pattern {
                if value.is_blank() || !pattern.is_match(value.value()) {
                    push(
                        Component::Pattern,
                        Some(value),
                        format!("{value} does not match pattern {:?}", pattern.as_str()),
                    );
                }
            }
            if let Some(node_shape) = &prop.node {
                let idx = self
                    .shapes
                    .shape_index(node_shape)
                    .expect("sh:node references are resolved at load time");
                if !self.conforms(value, idx, stack) {
                    push(Component::Node, Some(value), format!("{value} does not conform to shape <{node_shape}>"));
                }
            }
        }
        out
    }
}
