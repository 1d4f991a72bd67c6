//! Round-trips every fixture under tests/fixtures/rdf and checks the parse
//! against an independent parser (oxttl).

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use quill_core::rdf::{
    parse_nquads, parse_turtle, serialize_nquads, serialize_turtle, Dataset, Graph, PrefixMap, Quad, Term,
};

fn fixtures() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/rdf");
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("ttl" | "nq")))
        .collect();
    files.sort();
    files
}

fn from_ox(term: oxrdf::Term) -> Term {
    match term {
        oxrdf::Term::NamedNode(n) => Term::iri(n.into_string()),
        // Labels are parser-specific; compare blank nodes by position only.
        oxrdf::Term::BlankNode(_) => Term::blank("_"),
        oxrdf::Term::Literal(l) => {
            let value = l.value().replace("\r\n", "\n");
            match l.language() {
                Some(lang) => Term::lang_string(value, &lang.to_ascii_lowercase()),
                None => Term::typed(value, l.datatype().as_str()),
            }
        }
    }
}

fn erase_blanks(term: &Term) -> Term {
    if term.is_blank() {
        Term::blank("_")
    } else {
        term.clone()
    }
}

type Shape = BTreeSet<(Term, Term, Term, Option<String>)>;

fn shape_of(ds: &Dataset) -> Shape {
    ds.quads()
        .map(|q| (erase_blanks(&q.subject), q.predicate, erase_blanks(&q.object), q.graph))
        .collect()
}

fn oracle(path: &Path, bytes: &[u8]) -> Shape {
    if path.extension().unwrap() == "ttl" {
        oxttl::TurtleParser::new()
            .for_slice(bytes)
            .map(|t| {
                let t = t.unwrap_or_else(|e| panic!("oracle rejects {}: {e}", path.display()));
                (from_ox(t.subject.into()), from_ox(t.predicate.into()), from_ox(t.object), None)
            })
            .collect()
    } else {
        oxttl::NQuadsParser::new()
            .for_slice(bytes)
            .map(|q| {
                let q = q.unwrap_or_else(|e| panic!("oracle rejects {}: {e}", path.display()));
                let graph = match q.graph_name {
                    oxrdf::GraphName::NamedNode(n) => Some(n.into_string()),
                    oxrdf::GraphName::DefaultGraph => None,
                    oxrdf::GraphName::BlankNode(_) => panic!("blank graph names are not used"),
                };
                (from_ox(q.subject.into()), from_ox(q.predicate.into()), from_ox(q.object), graph)
            })
            .collect()
    }
}

fn default_only(graph: Graph) -> Dataset {
    graph.into_iter().map(|t| t.in_graph(None)).collect()
}

fn load(path: &Path) -> Dataset {
    let text = std::fs::read_to_string(path).unwrap();
    if path.extension().unwrap() == "ttl" {
        default_only(parse_turtle(&text, None).unwrap_or_else(|e| panic!("{}: {e}", path.display())))
    } else {
        parse_nquads(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
    }
}

#[test]
fn at_least_fifty_fixtures() {
    assert!(fixtures().len() >= 50, "only {} fixtures", fixtures().len());
}

#[test]
fn parse_agrees_with_oxttl() {
    for path in fixtures() {
        let bytes = std::fs::read(&path).unwrap();
        // Blank-node erasure can merge distinct triples; compare sets of the
        // erased form, which both sides collapse the same way.
        assert_eq!(shape_of(&load(&path)), oracle(&path, &bytes), "{}", path.display());
    }
}

#[test]
fn round_trip_through_both_formats() {
    let start = Instant::now();
    let prefixes: PrefixMap = [
        ("ex", "http://example.org/"),
        ("xsd", "http://www.w3.org/2001/XMLSchema#"),
        ("dcterms", "http://purl.org/dc/terms/"),
    ]
    .into_iter()
    .map(|(a, b)| (a.to_owned(), b.to_owned()))
    .collect();
    for path in fixtures() {
        let ds = load(&path);
        let nq = serialize_nquads(&ds);
        assert_eq!(parse_nquads(&nq).unwrap(), ds, "{} via N-Quads", path.display());
        assert_eq!(serialize_nquads(&parse_nquads(&nq).unwrap()), nq, "{} not stable", path.display());
        let lines: Vec<&str> = nq.lines().collect();
        assert!(lines.windows(2).all(|w| w[0] < w[1]), "{} unsorted output", path.display());
        assert!(!nq.contains('\r'));

        if ds.graph_names().next().is_none() {
            let graph = ds.default_graph();
            let ttl = serialize_turtle(graph, &prefixes);
            let back = parse_turtle(&ttl, None).unwrap_or_else(|e| panic!("{}: {e}\n{ttl}", path.display()));
            assert_eq!(&back, graph, "{} via Turtle", path.display());
        }
    }
    assert!(start.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn quad_display_is_nquads() {
    let q = Quad::new(
        Term::iri("http://example.org/s"),
        Term::iri("http://example.org/p"),
        Term::lang_string("x", "EN"),
        Some("http://example.org/g".into()),
    );
    assert_eq!(q.to_string(), "<http://example.org/s> <http://example.org/p> \"x\"@en <http://example.org/g> .");
}
