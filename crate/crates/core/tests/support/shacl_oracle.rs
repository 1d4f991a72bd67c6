//! Random small SHACL instances and a brute-force checker written straight
//! from the constraint definitions, used as an oracle for `validate`.

#![allow(dead_code)]

use std::collections::BTreeSet;

use quill_core::rdf::{Graph, Term, Triple};
use quill_core::shacl::{NodeKind, NodeShape, Pattern, PathDirection, PropertyPath, PropertyShape, ShapesModel};
use quill_core::vocab::{rdf, xsd};
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::Rng;

const NS: &str = "http://oracle.test/";
const PATTERNS: &[&str] = &["^a", "1$", "^http", "node", "[0-9]"];

fn iri(local: impl std::fmt::Display) -> Term {
    Term::iri(format!("{NS}{local}"))
}

fn class(i: usize) -> String {
    format!("{NS}C{i}")
}

fn predicate(i: usize) -> String {
    format!("{NS}p{i}")
}

fn shape_iri(i: usize) -> String {
    format!("{NS}S{i}")
}

fn literals() -> Vec<Term> {
    vec![
        Term::string("a"),
        Term::string("b1"),
        Term::string("node"),
        Term::typed("1", xsd::INTEGER),
        Term::typed("21", xsd::INTEGER),
        Term::lang_string("a", "en"),
    ]
}

/// Nodes: up to 8 IRIs plus up to 2 blank nodes (≤ 10 in total).
fn nodes(n_iri: usize, n_blank: usize) -> Vec<Term> {
    (0..n_iri)
        .map(|i| iri(format!("node{i}")))
        .chain((0..n_blank).map(|i| Term::blank(format!("b{i}"))))
        .collect()
}

pub fn random_graph(rng: &mut StdRng) -> Graph {
    let nodes = nodes(rng.random_range(1..=8), rng.random_range(0..=2));
    let lits = literals();
    let mut g = Graph::new();
    for node in &nodes {
        if rng.random_bool(0.6) {
            let c = rng.random_range(0..3);
            g.insert(Triple::new(node.clone(), Term::iri(rdf::TYPE), Term::iri(class(c))));
        }
    }
    for _ in 0..rng.random_range(0..=20) {
        let s = nodes.choose(rng).unwrap().clone();
        let p = Term::iri(predicate(rng.random_range(0..3)));
        let o = if rng.random_bool(0.5) {
            nodes.choose(rng).unwrap().clone()
        } else {
            lits.choose(rng).unwrap().clone()
        };
        g.insert(Triple::new(s, p, o));
    }
    g
}

fn any_term(rng: &mut StdRng) -> Term {
    if rng.random_bool(0.5) {
        literals().choose(rng).unwrap().clone()
    } else {
        iri(format!("node{}", rng.random_range(0..8)))
    }
}

fn random_property(rng: &mut StdRng, n_shapes: usize) -> PropertyShape {
    let path = if rng.random_bool(0.2) {
        PropertyPath::inverse(predicate(rng.random_range(0..3)))
    } else {
        PropertyPath::forward(predicate(rng.random_range(0..3)))
    };
    let mut p = PropertyShape::new(path);
    if rng.random_bool(0.4) {
        p.min_count = Some(rng.random_range(0..=2));
    }
    if rng.random_bool(0.4) {
        p.max_count = Some(rng.random_range(p.min_count.unwrap_or(0).max(1)..=3));
    }
    match rng.random_range(0..4) {
        0 => p.datatype = Some([xsd::STRING, xsd::INTEGER, rdf::LANG_STRING].choose(rng).unwrap().to_string()),
        1 => p.class = Some(class(rng.random_range(0..3))),
        _ => {}
    }
    if rng.random_bool(0.25) {
        p.node_kind = Some(*[NodeKind::Iri, NodeKind::Literal, NodeKind::BlankNodeOrIri].choose(rng).unwrap());
    }
    if rng.random_bool(0.25) {
        p.in_list = Some((0..rng.random_range(1..=3)).map(|_| any_term(rng)).collect());
    }
    if rng.random_bool(0.25) {
        p.pattern = Some(Pattern::new(PATTERNS.choose(rng).unwrap()).unwrap());
    }
    if rng.random_bool(0.2) {
        p.has_value = Some(any_term(rng));
    }
    if rng.random_bool(0.3) {
        p.node = Some(shape_iri(rng.random_range(0..n_shapes)));
    }
    p
}

pub fn random_shapes(rng: &mut StdRng) -> ShapesModel {
    let n = rng.random_range(1..=3);
    let mut classes: Vec<usize> = (0..3).collect();
    let shapes = (0..n)
        .map(|i| NodeShape {
            iri: shape_iri(i),
            target_class: if rng.random_bool(0.8) {
                let k = rng.random_range(0..classes.len());
                Some(class(classes.remove(k)))
            } else {
                None
            },
            properties: (0..rng.random_range(1..=3)).map(|_| random_property(rng, n)).collect(),
            label: None,
        })
        .collect();
    ShapesModel::new(shapes).expect("generator respects model invariants")
}

/// (focus, path, component name, offending value)
pub type Finding = (Term, String, &'static str, Option<Term>);

fn values(data: &Graph, focus: &Term, path: &PropertyPath) -> Vec<Term> {
    data.iter()
        .filter(|t| t.predicate.as_iri() == Some(path.predicate.as_str()))
        .filter_map(|t| match path.direction {
            PathDirection::Forward if &t.subject == focus => Some(t.object.clone()),
            PathDirection::Inverse if &t.object == focus => Some(t.subject.clone()),
            _ => None,
        })
        .collect()
}

fn has_type(data: &Graph, node: &Term, class: &str) -> bool {
    data.iter().any(|t| {
        &t.subject == node && t.predicate.as_iri() == Some(rdf::TYPE) && t.object.as_iri() == Some(class)
    })
}

fn node_kind_ok(kind: NodeKind, v: &Term) -> bool {
    match kind {
        NodeKind::Iri => matches!(v, Term::Iri(_)),
        NodeKind::Literal => matches!(v, Term::Literal(_)),
        NodeKind::BlankNodeOrIri => matches!(v, Term::Iri(_) | Term::BlankNode(_)),
    }
}

fn findings_for(
    data: &Graph,
    model: &ShapesModel,
    focus: &Term,
    shape: &NodeShape,
    in_progress: &BTreeSet<(Term, String)>,
) -> Vec<Finding> {
    let mut out = Vec::new();
    for p in &shape.properties {
        let vals = values(data, focus, &p.path);
        let path = p.path.predicate.clone();
        let mut add = |c: &'static str, v: Option<Term>| out.push((focus.clone(), path.clone(), c, v));
        let n = vals.len() as u64;
        if p.min_count.is_some_and(|m| n < m) {
            add("MinCount", None);
        }
        if p.max_count.is_some_and(|m| n > m) {
            add("MaxCount", None);
        }
        if p.has_value.as_ref().is_some_and(|h| !vals.contains(h)) {
            add("HasValue", None);
        }
        for v in &vals {
            if let Some(dt) = &p.datatype {
                let ok = matches!(v, Term::Literal(l) if l.datatype() == dt);
                if !ok {
                    add("Datatype", Some(v.clone()));
                }
            }
            if let Some(c) = &p.class {
                if !has_type(data, v, c) {
                    add("Class", Some(v.clone()));
                }
            }
            if let Some(k) = p.node_kind {
                if !node_kind_ok(k, v) {
                    add("NodeKind", Some(v.clone()));
                }
            }
            if let Some(list) = &p.in_list {
                if !list.iter().any(|x| x == v) {
                    add("In", Some(v.clone()));
                }
            }
            if let Some(pat) = &p.pattern {
                let text = match v {
                    Term::Iri(s) => Some(s.as_str()),
                    Term::Literal(l) => Some(l.lexical()),
                    Term::BlankNode(_) => None,
                };
                if !text.is_some_and(|t| pat.is_match(t)) {
                    add("Pattern", Some(v.clone()));
                }
            }
            if let Some(target) = &p.node {
                if !node_conforms(data, model, v, target, in_progress) {
                    add("Node", Some(v.clone()));
                }
            }
        }
    }
    out
}

fn node_conforms(
    data: &Graph,
    model: &ShapesModel,
    node: &Term,
    shape: &str,
    in_progress: &BTreeSet<(Term, String)>,
) -> bool {
    let key = (node.clone(), shape.to_owned());
    if in_progress.contains(&key) {
        return true;
    }
    let mut next = in_progress.clone();
    next.insert(key);
    let shape = model.shapes().iter().find(|s| s.iri == shape).unwrap();
    findings_for(data, model, node, shape, &next).is_empty()
}

/// Every (focus node, property shape, constraint) combination, checked
/// by scanning the whole graph each time.
pub fn brute_force(data: &Graph, model: &ShapesModel) -> Vec<Finding> {
    let mut out = Vec::new();
    for shape in model.shapes() {
        let Some(target) = &shape.target_class else { continue };
        let focus: BTreeSet<Term> = data
            .iter()
            .filter(|t| t.predicate.as_iri() == Some(rdf::TYPE) && t.object.as_iri() == Some(target))
            .map(|t| t.subject.clone())
            .collect();
        for f in focus {
            let start = BTreeSet::from([(f.clone(), shape.iri.clone())]);
            out.extend(findings_for(data, model, &f, shape, &start));
        }
    }
    out.sort();
    out
}

pub fn engine_findings(report: &quill_core::shacl::ValidationReport) -> Vec<Finding> {
    let mut out: Vec<Finding> = report
        .results
        .iter()
        .map(|r| {
            let name = match r.component {
                quill_core::shacl::Component::MinCount => "MinCount",
                quill_core::shacl::Component::MaxCount => "MaxCount",
                quill_core::shacl::Component::Datatype => "Datatype",
                quill_core::shacl::Component::Class => "Class",
                quill_core::shacl::Component::NodeKind => "NodeKind",
                quill_core::shacl::Component::In => "In",
                quill_core::shacl::Component::Pattern => "Pattern",
                quill_core::shacl::Component::HasValue => "HasValue",
                quill_core::shacl::Component::Node => "Node",
            };
            (r.focus_node.clone(), r.path.clone(), name, r.offending_value.clone())
        })
        .collect();
    out.sort();
    out
}
