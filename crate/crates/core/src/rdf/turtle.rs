//! Turtle reader and writer.
//!
//! Supported: `@prefix`/`@base` and their SPARQL-style forms, the `a`
//! keyword, predicate and object lists, typed and language-tagged literals,
//! numeric and boolean shorthands, labelled blank nodes and `[ ... ]`
//! property lists. RDF collections and quoted triples are rejected.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use super::cursor::{is_pn_chars, is_pn_chars_base, is_pn_chars_u, Cursor};
use super::graph::{Graph, Triple};
use super::term::{is_absolute_iri, write_iri, write_quoted, Literal, Term};
use super::RdfError;
use crate::vocab::{rdf, xsd};

/// Prefix label to namespace IRI.
pub type PrefixMap = BTreeMap<String, String>;

pub fn parse_turtle(text: &str, base: Option<&str>) -> Result<Graph, RdfError> {
    let mut parser = Parser {
        cur: Cursor::new(text),
        base: base.map(str::to_owned),
        prefixes: HashMap::new(),
        labels: BTreeSet::new(),
        anon: 0,
        triples: Vec::new(),
    };
    parser.document()?;
    Ok(parser.finish())
}

/// Placeholder prefix for anonymous nodes; renamed once the document's own
/// labels are known so generated labels never collide with them.
const ANON_MARK: char = '\u{0}';

struct Parser {
    cur: Cursor,
    base: Option<String>,
    prefixes: HashMap<String, String>,
    labels: BTreeSet<String>,
    anon: usize,
    triples: Vec<Triple>,
}

impl Parser {
    fn finish(self) -> Graph {
        let mut prefix = String::from("b");
        while self.labels.iter().any(|l| l.starts_with(&prefix)) {
            prefix.push('b');
        }
        let rename = |t: Term| match t {
            Term::BlankNode(l) if l.starts_with(ANON_MARK) => {
                Term::BlankNode(format!("{prefix}{}", &l[1..]))
            }
            other => other,
        };
        self.triples
            .into_iter()
            .map(|t| Triple {
                subject: rename(t.subject),
                predicate: t.predicate,
                object: rename(t.object),
            })
            .collect()
    }

    fn document(&mut self) -> Result<(), RdfError> {
        loop {
            self.cur.skip_ws();
            if self.cur.at_end() {
                return Ok(());
            }
            self.statement()?;
        }
    }

    fn statement(&mut self) -> Result<(), RdfError> {
        if self.cur.starts_with("@prefix") {
            self.cur.advance(7);
            self.prefix_decl()?;
            self.cur.skip_ws();
            return self.cur.expect('.');
        }
        if self.cur.starts_with("@base") {
            self.cur.advance(5);
            self.base_decl()?;
            self.cur.skip_ws();
            return self.cur.expect('.');
        }
        if self.keyword_ahead("PREFIX") {
            self.cur.advance(6);
            return self.prefix_decl();
        }
        if self.keyword_ahead("BASE") {
            self.cur.advance(4);
            return self.base_decl();
        }
        self.triples_stmt()?;
        self.cur.skip_ws();
        self.cur.expect('.')
    }

    fn keyword_ahead(&self, kw: &str) -> bool {
        self.cur.starts_with_ignore_case(kw)
            && self
                .cur
                .peek_at(kw.len())
                .is_some_and(|c| c.is_whitespace() || c == '<' || c == '#')
    }

    fn prefix_decl(&mut self) -> Result<(), RdfError> {
        self.cur.skip_ws();
        let mut label = String::new();
        while let Some(c) = self.cur.peek() {
            if c == ':' {
                break;
            }
            if !(is_pn_chars(c) || c == '.') {
                return Err(self.cur.unexpected("prefix name"));
            }
            label.push(c);
            self.cur.bump();
        }
        if label.ends_with('.') || label.starts_with(|c: char| !is_pn_chars_base(c)) {
            return Err(self.cur.error(format!("invalid prefix label '{label}'")));
        }
        self.cur.expect(':')?;
        self.cur.skip_ws();
        let iri = self.iri_ref()?;
        self.prefixes.insert(label, iri);
        Ok(())
    }

    fn base_decl(&mut self) -> Result<(), RdfError> {
        self.cur.skip_ws();
        let iri = self.iri_ref()?;
        self.base = Some(iri);
        Ok(())
    }

    /// `<...>` resolved against the current base.
    fn iri_ref(&mut self) -> Result<String, RdfError> {
        let (line, column) = self.cur.position();
        let raw = self.cur.read_iriref()?;
        if is_absolute_iri(&raw) {
            return Ok(raw);
        }
        let Some(base) = &self.base else {
            return Err(RdfError::RelativeIri { iri: raw, line, column });
        };
        url::Url::parse(base)
            .and_then(|b| b.join(&raw))
            .map(String::from)
            .map_err(|e| RdfError::Syntax {
                line,
                column,
                message: format!("cannot resolve <{raw}> against <{base}>: {e}"),
            })
    }

    fn triples_stmt(&mut self) -> Result<(), RdfError> {
        if self.cur.peek() == Some('[') {
            let subject = self.blank_node_property_list()?;
            self.cur.skip_ws();
            if self.cur.peek() != Some('.') {
                self.predicate_object_list(&subject)?;
            }
            return Ok(());
        }
        let subject = self.subject()?;
        self.cur.skip_ws();
        self.predicate_object_list(&subject)
    }

    fn subject(&mut self) -> Result<Term, RdfError> {
        match self.cur.peek() {
            Some('<') if self.cur.peek_at(1) == Some('<') => {
                Err(self.cur.error("quoted triples are not supported"))
            }
            Some('<') => Ok(Term::Iri(self.iri_ref()?)),
            Some('_') if self.cur.peek_at(1) == Some(':') => self.labelled_blank(),
            Some('(') => Err(self.cur.error("RDF collections are not supported")),
            Some(_) => Ok(Term::Iri(self.prefixed_name()?)),
            None => Err(self.cur.unexpected("subject")),
        }
    }

    fn labelled_blank(&mut self) -> Result<Term, RdfError> {
        self.cur.advance(2);
        let label = self.cur.read_bnode_label()?;
        self.labels.insert(label.clone());
        Ok(Term::BlankNode(label))
    }

    fn fresh_blank(&mut self) -> Term {
        self.anon += 1;
        Term::BlankNode(format!("{ANON_MARK}{}", self.anon))
    }

    fn predicate_object_list(&mut self, subject: &Term) -> Result<(), RdfError> {
        loop {
            let predicate = self.verb()?;
            self.cur.skip_ws();
            self.object_list(subject, &predicate)?;
            self.cur.skip_ws();
            if !self.cur.eat(';') {
                return Ok(());
            }
            // Repeated or trailing semicolons are allowed.
            loop {
                self.cur.skip_ws();
                if !self.cur.eat(';') {
                    break;
                }
            }
            if matches!(self.cur.peek(), Some('.' | ']') | None) {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> Result<Term, RdfError> {
        if self.cur.peek() == Some('a')
            && !self
                .cur
                .peek_at(1)
                .is_some_and(|c| is_pn_chars(c) || c == ':' || c == '.')
        {
            self.cur.bump();
            return Ok(Term::Iri(rdf::TYPE.to_owned()));
        }
        match self.cur.peek() {
            Some('<') => Ok(Term::Iri(self.iri_ref()?)),
            Some('_' | '[' | '"' | '\'') => Err(self.cur.error("predicate must be an IRI")),
            Some(_) => Ok(Term::Iri(self.prefixed_name()?)),
            None => Err(self.cur.unexpected("predicate")),
        }
    }

    fn object_list(&mut self, subject: &Term, predicate: &Term) -> Result<(), RdfError> {
        loop {
            let object = self.object()?;
            self.triples.push(Triple {
                subject: subject.clone(),
                predicate: predicate.clone(),
                object,
            });
            self.cur.skip_ws();
            if !self.cur.eat(',') {
                return Ok(());
            }
            self.cur.skip_ws();
        }
    }

    fn object(&mut self) -> Result<Term, RdfError> {
        match self.cur.peek() {
            Some('<') if self.cur.peek_at(1) == Some('<') => {
                Err(self.cur.error("quoted triples are not supported"))
            }
            Some('<') => Ok(Term::Iri(self.iri_ref()?)),
            Some('_') if self.cur.peek_at(1) == Some(':') => self.labelled_blank(),
            Some('[') => self.blank_node_property_list(),
            Some('(') => Err(self.cur.error("RDF collections are not supported")),
            Some('"' | '\'') => self.rdf_literal(),
            Some(c) if c.is_ascii_digit() || matches!(c, '+' | '-' | '.') => self.numeric_literal(),
            Some(_) => {
                if let Some(b) = ["true", "false"].into_iter().find(|kw| {
                    self.cur.starts_with(kw)
                        && !self
                            .cur
                            .peek_at(kw.len())
                            .is_some_and(|c| is_pn_chars(c) || c == ':')
                }) {
                    self.cur.advance(b.len());
                    return Ok(Term::typed(b, xsd::BOOLEAN));
                }
                Ok(Term::Iri(self.prefixed_name()?))
            }
            None => Err(self.cur.unexpected("object")),
        }
    }

    fn blank_node_property_list(&mut self) -> Result<Term, RdfError> {
        self.cur.expect('[')?;
        let node = self.fresh_blank();
        self.cur.skip_ws();
        if !self.cur.eat(']') {
            self.predicate_object_list(&node)?;
            self.cur.skip_ws();
            self.cur.expect(']')?;
        }
        Ok(node)
    }

    fn rdf_literal(&mut self) -> Result<Term, RdfError> {
        let lexical = self.cur.read_string(true)?;
        if self.cur.eat('@') {
            let tag = self.cur.read_langtag()?;
            return Ok(Term::Literal(Literal::lang_string(lexical, &tag)));
        }
        if self.cur.starts_with("^^") {
            self.cur.advance(2);
            let datatype = match self.cur.peek() {
                Some('<') => self.iri_ref()?,
                _ => self.prefixed_name()?,
            };
            if datatype == rdf::LANG_STRING {
                return Err(self.cur.error("rdf:langString literal without a language tag"));
            }
            return Ok(Term::typed(lexical, datatype));
        }
        Ok(Term::string(lexical))
    }

    fn numeric_literal(&mut self) -> Result<Term, RdfError> {
        let mut lex = String::new();
        if let Some(sign @ ('+' | '-')) = self.cur.peek() {
            lex.push(sign);
            self.cur.bump();
        }
        let digits = |p: &mut Self, out: &mut String| {
            let mut n = 0;
            while let Some(c) = p.cur.peek().filter(char::is_ascii_digit) {
                out.push(c);
                p.cur.bump();
                n += 1;
            }
            n
        };
        let int_digits = digits(self, &mut lex);
        let mut datatype = xsd::INTEGER;
        // A '.' belongs to the number only when a digit or exponent follows;
        // otherwise it terminates the statement.
        if self.cur.peek() == Some('.')
            && self
                .cur
                .peek_at(1)
                .is_some_and(|c| c.is_ascii_digit() || (int_digits > 0 && matches!(c, 'e' | 'E')))
        {
            self.cur.bump();
            lex.push('.');
            digits(self, &mut lex);
            datatype = xsd::DECIMAL;
        } else if int_digits == 0 {
            return Err(self.cur.unexpected("number"));
        }
        if let Some(e @ ('e' | 'E')) = self.cur.peek() {
            lex.push(e);
            self.cur.bump();
            if let Some(sign @ ('+' | '-')) = self.cur.peek() {
                lex.push(sign);
                self.cur.bump();
            }
            if digits(self, &mut lex) == 0 {
                return Err(self.cur.unexpected("exponent digits"));
            }
            datatype = xsd::DOUBLE;
        }
        Ok(Term::typed(lex, datatype))
    }

    fn prefixed_name(&mut self) -> Result<String, RdfError> {
        let (line, column) = self.cur.position();
        let mut prefix = String::new();
        while let Some(c) = self.cur.peek() {
            if c == ':' {
                break;
            }
            if is_pn_chars(c) || (c == '.' && !prefix.is_empty()) {
                prefix.push(c);
                self.cur.bump();
            } else {
                break;
            }
        }
        if self.cur.peek() != Some(':') {
            return Err(RdfError::Syntax {
                line,
                column,
                message: if prefix.is_empty() {
                    match self.cur.peek() {
                        Some(c) => format!("unexpected '{}'", c.escape_debug()),
                        None => "unexpected end of input".to_owned(),
                    }
                } else {
                    format!("expected prefixed name, found '{prefix}'")
                },
            });
        }
        self.cur.bump();
        let Some(ns) = self.prefixes.get(&prefix).cloned() else {
            return Err(RdfError::Syntax {
                line,
                column,
                message: format!("undeclared prefix '{prefix}:'"),
            });
        };
        let local = self.local_name()?;
        Ok(ns + &local)
    }

    fn local_name(&mut self) -> Result<String, RdfError> {
        let mut local = String::new();
        let mut first = true;
        while let Some(c) = self.cur.peek() {
            let ok = if first {
                is_pn_chars_u(c) || c == ':' || c.is_ascii_digit()
            } else {
                is_pn_chars(c) || c == ':' || c == '.'
            };
            if c == '%' {
                let hex = |o| self.cur.peek_at(o).is_some_and(|h: char| h.is_ascii_hexdigit());
                if !(hex(1) && hex(2)) {
                    return Err(self.cur.error("invalid percent escape in local name"));
                }
                for _ in 0..3 {
                    local.push(self.cur.bump().unwrap_or_default());
                }
            } else if c == '\\' {
                self.cur.bump();
                match self.cur.peek() {
                    Some(e) if "_~.-!$&'()*+,;=/?#@%".contains(e) => {
                        local.push(e);
                        self.cur.bump();
                    }
                    _ => return Err(self.cur.unexpected("local name escape")),
                }
            } else if ok {
                if c == '.' {
                    // Trailing dots end the statement.
                    let mut look = 1;
                    while self.cur.peek_at(look) == Some('.') {
                        look += 1;
                    }
                    let next = self.cur.peek_at(look);
                    if !next.is_some_and(|n| is_pn_chars(n) || n == ':' || n == '%' || n == '\\') {
                        break;
                    }
                }
                local.push(c);
                self.cur.bump();
            } else {
                break;
            }
            first = false;
        }
        Ok(local)
    }
}

fn is_safe_local(local: &str) -> bool {
    let mut chars = local.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_alphanumeric() || c == '_' => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        }
        Some(_) => false,
    }
}

struct Writer<'a> {
    prefixes: Vec<(&'a str, &'a str)>,
}

impl Writer<'_> {
    fn iri(&self, out: &mut String, iri: &str) {
        // Longest matching namespace wins.
        let best = self
            .prefixes
            .iter()
            .filter(|(_, ns)| !ns.is_empty() && iri.starts_with(ns) && is_safe_local(&iri[ns.len()..]))
            .max_by_key(|(_, ns)| ns.len());
        match best {
            Some((label, ns)) => {
                let _ = write!(out, "{label}:{}", &iri[ns.len()..]);
            }
            None => {
                let _ = write_iri(out, iri);
            }
        }
    }

    fn term(&self, out: &mut String, term: &Term) {
        match term {
            Term::Iri(iri) => self.iri(out, iri),
            Term::BlankNode(label) => {
                let _ = write!(out, "_:{label}");
            }
            Term::Literal(lit) => {
                let _ = write_quoted(out, lit.lexical());
                if let Some(lang) = lit.language() {
                    let _ = write!(out, "@{lang}");
                } else if lit.datatype() != xsd::STRING {
                    out.push_str("^^");
                    self.iri(out, lit.datatype());
                }
            }
        }
    }
}

/// Writes prefix directives (sorted by label) followed by one statement per
/// subject. Output is a pure function of the graph and the prefix map.
pub fn serialize_turtle(graph: &Graph, prefixes: &PrefixMap) -> String {
    let writer = Writer {
        prefixes: prefixes
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .collect(),
    };
    let mut out = String::new();
    for (label, ns) in prefixes {
        let _ = write!(out, "@prefix {label}: ");
        let _ = write_iri(&mut out, ns);
        out.push_str(" .\n");
    }
    if !prefixes.is_empty() && !graph.is_empty() {
        out.push('\n');
    }
    let mut current_subject: Option<&Term> = None;
    let mut current_predicate: Option<&Term> = None;
    for triple in graph.iter() {
        if current_subject != Some(&triple.subject) {
            if current_subject.is_some() {
                out.push_str(" .\n");
            }
            writer.term(&mut out, &triple.subject);
            out.push(' ');
            current_subject = Some(&triple.subject);
        } else if current_predicate == Some(&triple.predicate) {
            out.push_str(", ");
            writer.term(&mut out, &triple.object);
            continue;
        } else {
            out.push_str(" ;\n    ");
        }
        if triple.predicate.as_iri() == Some(rdf::TYPE) {
            out.push('a');
        } else {
            writer.term(&mut out, &triple.predicate);
        }
        out.push(' ');
        writer.term(&mut out, &triple.object);
        current_predicate = Some(&triple.predicate);
    }
    if current_subject.is_some() {
        out.push_str(" .\n");
    }
    out
}
