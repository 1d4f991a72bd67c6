//! RDF terms, graphs and datasets, with Turtle and N-Quads codecs.

mod cursor;
mod graph;
mod nquads;
mod term;
mod turtle;

pub use graph::{
    graph_diff, is_skolem_iri, mint_skolem_iri, skolemize, Dataset, Delta, Graph, Quad, Triple,
    GENID_SEGMENT,
};
pub use nquads::{parse_nquads, parse_quad_line, serialize_nquads};
pub use term::{is_absolute_iri, JsonTerm, Literal, Term};
pub use turtle::{parse_turtle, serialize_turtle, PrefixMap};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RdfError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("relative IRI <{iri}> at {line}:{column} with no base IRI")]
    RelativeIri {
        iri: String,
        line: usize,
        column: usize,
    },
}

/// Local name of an IRI: the part after the last `#` or `/`.
pub fn local_name(iri: &str) -> &str {
    iri.rsplit(['#', '/']).next().unwrap_or(iri)
}
