use std::collections::{BTreeSet, HashSet};

use super::model::*;
use crate::rdf::{Graph, Term};
use crate::vocab::{rdf, rdfs, sh};

const NODE_SHAPE_KEYS: &[&str] = &[
    rdf::TYPE,
    sh::TARGET_CLASS,
    sh::PROPERTY,
    sh::NAME,
    rdfs::LABEL,
    sh::DESCRIPTION,
];

const PROPERTY_SHAPE_KEYS: &[&str] = &[
    rdf::TYPE,
    sh::PATH,
    sh::MIN_COUNT,
    sh::MAX_COUNT,
    sh::DATATYPE,
    sh::CLASS,
    sh::NODE_KIND,
    sh::IN,
    sh::PATTERN,
    sh::HAS_VALUE,
    sh::NODE,
    sh::NAME,
    sh::DESCRIPTION,
    sh::ORDER,
];

/// Builds a [`ShapesModel`] from a shapes graph. Node shapes are the IRI
/// subjects typed `sh:NodeShape` or carrying `sh:targetClass`/`sh:property`.
pub fn load_shapes(graph: &Graph) -> Result<ShapesModel, ShapeLoadError> {
    let mut candidates = BTreeSet::new();
    for t in graph.iter() {
        let p = t.predicate.value();
        if (p == rdf::TYPE && t.object.as_iri() == Some(sh::NODE_SHAPE))
            || p == sh::TARGET_CLASS
            || p == sh::PROPERTY
        {
            candidates.insert(t.subject.clone());
        }
    }
    let mut warnings = Vec::new();
    let mut shapes = Vec::with_capacity(candidates.len());
    for node in &candidates {
        let Term::Iri(iri) = node else {
            return Err(ShapeLoadError::invalid(node, "node shapes must be IRIs"));
        };
        collect_warnings(graph, node, NODE_SHAPE_KEYS, &mut warnings);
        let target_class = single_iri(graph, node, sh::TARGET_CLASS)?;
        let label = single_string(graph, node, sh::NAME)?
            .or(single_string(graph, node, rdfs::LABEL)?);
        let mut properties = graph
            .objects(node, sh::PROPERTY)
            .map(|p| load_property(graph, p, &mut warnings))
            .collect::<Result<Vec<_>, _>>()?;
        sort_properties(&mut properties);
        shapes.push(NodeShape {
            iri: iri.clone(),
            target_class,
            properties,
            label,
        });
    }
    warnings.sort();
    warnings.dedup();
    ShapesModel::with_warnings(shapes, warnings)
}

fn sort_properties(props: &mut [PropertyShape]) {
    props.sort_by(|a, b| match (a.order, b.order) {
        (Some(x), Some(y)) => x.total_cmp(&y).then_with(|| a.path.cmp(&b.path)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.path.cmp(&b.path),
    });
}

fn collect_warnings(graph: &Graph, node: &Term, known: &[&str], warnings: &mut Vec<String>) {
    for t in graph.with_subject(node) {
        let p = t.predicate.value();
        if p.starts_with(sh::NS) && !known.contains(&p) {
            warnings.push(format!("unsupported SHACL property <{p}> on {node} ignored"));
        }
    }
}

fn single<'a>(graph: &'a Graph, node: &Term, predicate: &str) -> Result<Option<&'a Term>, ShapeLoadError> {
    let mut values = graph.objects(node, predicate);
    let first = values.next();
    if values.next().is_some() {
        return Err(ShapeLoadError::invalid(
            node,
            format!("more than one value for <{predicate}>"),
        ));
    }
    Ok(first)
}

fn single_iri(graph: &Graph, node: &Term, predicate: &str) -> Result<Option<String>, ShapeLoadError> {
    match single(graph, node, predicate)? {
        None => Ok(None),
        Some(Term::Iri(iri)) => Ok(Some(iri.clone())),
        Some(other) => Err(ShapeLoadError::invalid(
            node,
            format!("<{predicate}> must be an IRI, found {other}"),
        )),
    }
}

fn single_string(graph: &Graph, node: &Term, predicate: &str) -> Result<Option<String>, ShapeLoadError> {
    match single(graph, node, predicate)? {
        None => Ok(None),
        Some(Term::Literal(lit)) => Ok(Some(lit.lexical().to_owned())),
        Some(other) => Err(ShapeLoadError::invalid(
            node,
            format!("<{predicate}> must be a literal, found {other}"),
        )),
    }
}

fn single_count(graph: &Graph, node: &Term, predicate: &str) -> Result<Option<u64>, ShapeLoadError> {
    match single_string(graph, node, predicate)? {
        None => Ok(None),
        Some(lex) => lex.trim().trim_start_matches('+').parse().map(Some).map_err(|_| {
            ShapeLoadError::invalid(node, format!("<{predicate}> must be a non-negative integer, found \"{lex}\""))
        }),
    }
}

fn load_property(
    graph: &Graph,
    node: &Term,
    warnings: &mut Vec<String>,
) -> Result<PropertyShape, ShapeLoadError> {
    if node.is_literal() {
        return Err(ShapeLoadError::invalid(node, "sh:property value must be a node"));
    }
    collect_warnings(graph, node, PROPERTY_SHAPE_KEYS, warnings);
    let path = match single(graph, node, sh::PATH)? {
        None => return Err(ShapeLoadError::invalid(node, "property shape without sh:path")),
        Some(Term::Iri(p)) => PropertyPath::forward(p.clone()),
        Some(path_node @ Term::BlankNode(_)) => {
            let steps: Vec<_> = graph.with_subject(path_node).collect();
            match steps.as_slice() {
                [t] if t.predicate.value() == sh::INVERSE_PATH && t.object.is_iri() => {
                    PropertyPath::inverse(t.object.value())
                }
                _ => {
                    return Err(ShapeLoadError::invalid(
                        node,
                        "only predicate and sh:inversePath paths are supported",
                    ))
                }
            }
        }
        Some(other) => {
            return Err(ShapeLoadError::invalid(node, format!("invalid sh:path {other}")))
        }
    };
    let mut shape = PropertyShape::new(path);
    shape.min_count = single_count(graph, node, sh::MIN_COUNT)?;
    shape.max_count = single_count(graph, node, sh::MAX_COUNT)?;
    shape.datatype = single_iri(graph, node, sh::DATATYPE)?;
    shape.class = single_iri(graph, node, sh::CLASS)?;
    shape.node = single_iri(graph, node, sh::NODE)?;
    shape.name = single_string(graph, node, sh::NAME)?;
    shape.description = single_string(graph, node, sh::DESCRIPTION)?;
    shape.has_value = single(graph, node, sh::HAS_VALUE)?.cloned();
    shape.node_kind = match single_iri(graph, node, sh::NODE_KIND)?.as_deref() {
        None => None,
        Some(sh::IRI) => Some(NodeKind::Iri),
        Some(sh::LITERAL) => Some(NodeKind::Literal),
        Some(sh::BLANK_NODE_OR_IRI) => Some(NodeKind::BlankNodeOrIri),
        Some(other) => {
            return Err(ShapeLoadError::invalid(
                node,
                format!("unsupported sh:nodeKind <{other}>"),
            ))
        }
    };
    if let Some(source) = single_string(graph, node, sh::PATTERN)? {
        shape.pattern = Some(Pattern::new(&source).map_err(|e| {
            ShapeLoadError::invalid(node, format!("invalid sh:pattern {source:?}: {e}"))
        })?);
    }
    if let Some(order) = single_string(graph, node, sh::ORDER)? {
        shape.order = Some(order.trim().parse().map_err(|_| {
            ShapeLoadError::invalid(node, format!("sh:order must be numeric, found \"{order}\""))
        })?);
    }
    if let Some(head) = single(graph, node, sh::IN)? {
        shape.in_list = Some(read_list(graph, head)?);
    }
    Ok(shape)
}

/// Walks an `rdf:first`/`rdf:rest` chain written out explicitly.
fn read_list(graph: &Graph, head: &Term) -> Result<Vec<Term>, ShapeLoadError> {
    let mut items = Vec::new();
    let mut seen = HashSet::new();
    let mut cell = head.clone();
    while cell.as_iri() != Some(rdf::NIL) {
        if !seen.insert(cell.clone()) {
            return Err(ShapeLoadError::invalid(head, "cyclic RDF list"));
        }
        let first = single(graph, &cell, rdf::FIRST)?
            .ok_or_else(|| ShapeLoadError::invalid(&cell, "list cell without rdf:first"))?;
        items.push(first.clone());
        cell = single(graph, &cell, rdf::REST)?
            .ok_or_else(|| ShapeLoadError::invalid(&cell, "list cell without rdf:rest"))?
            .clone();
    }
    Ok(items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::parse_turtle;

    const PREFIXES: &str = "@prefix sh: <http://www.w3.org/ns/shacl#> .\n\
        @prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .\n\
        @prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n\
        @prefix ex: <http://x/> .\n";

    fn load(body: &str) -> Result<ShapesModel, ShapeLoadError> {
        load_shapes(&parse_turtle(&format!("{PREFIXES}{body}"), None).unwrap())
    }

    #[test]
    fn empty_graph_has_no_shapes() {
        assert!(load_shapes(&Graph::new()).unwrap().is_empty());
    }

    #[test]
    fn loads_constraints_in_order() {
        let model = load(
            r#"ex:S a sh:NodeShape ; sh:targetClass ex:C ;
                sh:property [ sh:path ex:b ; sh:order 2 ; sh:datatype xsd:string ; sh:minCount 1 ; sh:maxCount 1 ] ;
                sh:property [ sh:path ex:a ; sh:order 1 ; sh:in [ rdf:first "x" ; rdf:rest [ rdf:first "y" ; rdf:rest rdf:nil ] ] ] ;
                sh:property [ sh:path [ sh:inversePath ex:inv ] ; sh:nodeKind sh:IRI ; sh:pattern "^http" ] ;
                sh:property [ sh:path ex:n ; sh:node ex:T ; sh:severity sh:Warning ] .
              ex:T a sh:NodeShape ."#,
        )
        .unwrap();
        assert_eq!(model.len(), 2);
        let s = model.for_class("http://x/C").unwrap();
        let paths: Vec<_> = s.properties.iter().map(|p| p.path.to_string()).collect();
        assert_eq!(paths, ["<http://x/a>", "<http://x/b>", "^<http://x/inv>", "<http://x/n>"]);
        assert_eq!(s.properties[0].in_list.as_ref().unwrap().len(), 2);
        assert_eq!(s.properties[1].min_count, Some(1));
        assert_eq!(model.warnings().len(), 1);
    }

    #[test]
    fn dangling_node_reference() {
        let err = load("ex:S sh:targetClass ex:C ; sh:property [ sh:path ex:p ; sh:node ex:Missing ] .")
            .unwrap_err();
        assert!(matches!(err, ShapeLoadError::DanglingNodeRef { .. }));
    }

    #[test]
    fn conflicting_constraints() {
        let err = load("ex:S sh:targetClass ex:C ; sh:property [ sh:path ex:p ; sh:datatype xsd:string ; sh:class ex:D ] .")
            .unwrap_err();
        assert!(matches!(err, ShapeLoadError::DatatypeAndClass { .. }));
        let err = load("ex:S sh:targetClass ex:C ; sh:property [ sh:path ex:p ; sh:minCount 3 ; sh:maxCount 2 ] .")
            .unwrap_err();
        assert!(matches!(err, ShapeLoadError::MinExceedsMax { min: 3, max: 2, .. }));
        let err = load("ex:S sh:targetClass ex:C ; sh:property [ sh:path ex:p ; sh:in rdf:nil ] .").unwrap_err();
        assert!(matches!(err, ShapeLoadError::Invalid { .. }));
        let err = load("ex:S sh:targetClass ex:C . ex:T sh:targetClass ex:C .").unwrap_err();
        assert!(matches!(err, ShapeLoadError::DuplicateTarget { .. }));
        let err = load("ex:S sh:targetClass ex:C ; sh:property [ sh:path ex:p ; sh:pattern \"(\" ] .")
            .unwrap_err();
        assert!(err.to_string().contains("sh:pattern"));
    }
}
