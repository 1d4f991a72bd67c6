//! N-Quads: the persistence format. Output is one quad per line, lines
//! sorted bytewise, LF-terminated.

use super::cursor::Cursor;
use super::graph::{Dataset, Quad};
use super::term::{is_absolute_iri, Term};
use super::RdfError;
use crate::vocab::{rdf, xsd};

pub fn parse_nquads(text: &str) -> Result<Dataset, RdfError> {
    let mut cur = Cursor::new(text);
    let mut dataset = Dataset::new();
    loop {
        cur.skip_ws();
        if cur.at_end() {
            return Ok(dataset);
        }
        dataset.insert(parse_statement(&mut cur)?);
        cur.skip_inline_ws();
        if cur.peek() == Some('#') {
            while !matches!(cur.peek(), Some('\n') | None) {
                cur.bump();
            }
        }
        match cur.peek() {
            Some('\n') | None => {}
            _ => return Err(cur.unexpected("end of line")),
        }
    }
}

/// Parses a single quad line such as the ones stored in snapshot delta blocks.
pub fn parse_quad_line(line: &str) -> Result<Quad, RdfError> {
    let mut cur = Cursor::new(line);
    cur.skip_inline_ws();
    let quad = parse_statement(&mut cur)?;
    cur.skip_inline_ws();
    if !cur.at_end() {
        return Err(cur.unexpected("end of line"));
    }
    Ok(quad)
}

fn parse_statement(cur: &mut Cursor) -> Result<Quad, RdfError> {
    let subject = match cur.peek() {
        Some('<') => iri(cur)?,
        Some('_') => blank(cur)?,
        _ => return Err(cur.unexpected("subject")),
    };
    cur.skip_inline_ws();
    if cur.peek() != Some('<') {
        return Err(cur.unexpected("predicate IRI"));
    }
    let predicate = iri(cur)?;
    cur.skip_inline_ws();
    let object = match cur.peek() {
        Some('<') => iri(cur)?,
        Some('_') => blank(cur)?,
        Some('"') => literal(cur)?,
        _ => return Err(cur.unexpected("object")),
    };
    cur.skip_inline_ws();
    let graph = match cur.peek() {
        Some('<') => match iri(cur)? {
            Term::Iri(g) => Some(g),
            _ => unreachable!(),
        },
        Some('_') => return Err(cur.error("blank node graph labels are not supported")),
        _ => None,
    };
    cur.skip_inline_ws();
    cur.expect('.')?;
    Ok(Quad {
        subject,
        predicate,
        object,
        graph,
    })
}

fn iri(cur: &mut Cursor) -> Result<Term, RdfError> {
    let iri = cur.read_iriref()?;
    if !is_absolute_iri(&iri) {
        return Err(cur.error(format!("relative IRI <{iri}> is not allowed in N-Quads")));
    }
    Ok(Term::Iri(iri))
}

fn blank(cur: &mut Cursor) -> Result<Term, RdfError> {
    if !cur.starts_with("_:") {
        return Err(cur.unexpected("blank node"));
    }
    cur.advance(2);
    Ok(Term::BlankNode(cur.read_bnode_label()?))
}

fn literal(cur: &mut Cursor) -> Result<Term, RdfError> {
    let lexical = cur.read_string(false)?;
    if cur.eat('@') {
        let tag = cur.read_langtag()?;
        return Ok(Term::lang_string(lexical, &tag));
    }
    if cur.starts_with("^^") {
        cur.advance(2);
        let Term::Iri(datatype) = iri(cur)? else {
            unreachable!()
        };
        if datatype == rdf::LANG_STRING {
            return Err(cur.error("rdf:langString literal without a language tag"));
        }
        return Ok(Term::typed(lexical, datatype));
    }
    Ok(Term::typed(lexical, xsd::STRING))
}

pub fn serialize_nquads(dataset: &Dataset) -> String {
    let mut lines: Vec<String> = dataset.quads().map(|q| q.to_string()).collect();
    lines.sort_unstable();
    let mut out = String::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    out
}
