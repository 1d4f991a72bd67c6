use std::fmt;

use serde::{Deserialize, Serialize};

use crate::vocab::{rdf, xsd};

/// An RDF term. Equality and ordering are structural: literals compare by
/// lexical form, datatype and language tag, never by value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(String),
    BlankNode(String),
    Literal(Literal),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    lexical: String,
    datatype: String,
    language: Option<String>,
}

impl Literal {
    /// A typed literal. Use [`Literal::lang_string`] for language-tagged text.
    pub fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        let datatype = datatype.into();
        debug_assert!(datatype != rdf::LANG_STRING, "langString literal needs a tag");
        Self {
            lexical: lexical.into(),
            datatype,
            language: None,
        }
    }

    pub fn string(lexical: impl Into<String>) -> Self {
        Self::typed(lexical, xsd::STRING)
    }

    /// Language tags are stored lowercased.
    pub fn lang_string(lexical: impl Into<String>, language: &str) -> Self {
        Self {
            lexical: lexical.into(),
            datatype: rdf::LANG_STRING.to_owned(),
            language: Some(language.to_ascii_lowercase()),
        }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &str {
        &self.datatype
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }
}

/// True when `s` starts with a URI scheme followed by ':'.
pub fn is_absolute_iri(s: &str) -> bool {
    let Some(colon) = s.find(':') else {
        return false;
    };
    let scheme = &s[..colon];
    let mut chars = scheme.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

impl Term {
    pub fn iri(iri: impl Into<String>) -> Self {
        let iri = iri.into();
        debug_assert!(is_absolute_iri(&iri), "relative IRI {iri:?}");
        Term::Iri(iri)
    }

    pub fn blank(label: impl Into<String>) -> Self {
        Term::BlankNode(label.into())
    }

    pub fn string(lexical: impl Into<String>) -> Self {
        Term::Literal(Literal::string(lexical))
    }

    pub fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        Term::Literal(Literal::typed(lexical, datatype))
    }

    pub fn lang_string(lexical: impl Into<String>, language: &str) -> Self {
        Term::Literal(Literal::lang_string(lexical, language))
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::BlankNode(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    /// The lexical form of a literal, the IRI string, or the blank node label.
    pub fn value(&self) -> &str {
        match self {
            Term::Iri(s) | Term::BlankNode(s) => s,
            Term::Literal(lit) => &lit.lexical,
        }
    }
}

/// Characters that must be escaped inside `<...>`.
fn iri_needs_escape(c: char) -> bool {
    c <= ' ' || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
}

pub(crate) fn write_iri(f: &mut impl fmt::Write, iri: &str) -> fmt::Result {
    f.write_char('<')?;
    for c in iri.chars() {
        if iri_needs_escape(c) {
            write!(f, "\\u{:04X}", c as u32)?;
        } else {
            f.write_char(c)?;
        }
    }
    f.write_char('>')
}

pub(crate) fn write_quoted(f: &mut impl fmt::Write, s: &str) -> fmt::Result {
    f.write_char('"')?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\r' => f.write_str("\\r")?,
            '\t' => f.write_str("\\t")?,
            c if (c as u32) < 0x20 || c == '\u{7f}' => write!(f, "\\u{:04X}", c as u32)?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('"')
}

/// N-Triples rendering.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write_iri(f, iri),
            Term::BlankNode(label) => write!(f, "_:{label}"),
            Term::Literal(lit) => {
                write_quoted(f, &lit.lexical)?;
                if let Some(lang) = &lit.language {
                    write!(f, "@{lang}")
                } else if lit.datatype != xsd::STRING {
                    f.write_str("^^")?;
                    write_iri(f, &lit.datatype)
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// JSON projection of a term, shaped like SPARQL JSON result bindings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum JsonTerm {
    Iri {
        value: String,
    },
    Bnode {
        value: String,
    },
    Literal {
        value: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        datatype: Option<String>,
        #[serde(default, rename = "xml:lang", skip_serializing_if = "Option::is_none")]
        language: Option<String>,
    },
}

impl From<&Term> for JsonTerm {
    fn from(term: &Term) -> Self {
        match term {
            Term::Iri(v) => JsonTerm::Iri { value: v.clone() },
            Term::BlankNode(v) => JsonTerm::Bnode { value: v.clone() },
            Term::Literal(lit) => JsonTerm::Literal {
                value: lit.lexical.clone(),
                datatype: (lit.language.is_none() && lit.datatype != xsd::STRING)
                    .then(|| lit.datatype.clone()),
                language: lit.language.clone(),
            },
        }
    }
}

impl From<JsonTerm> for Term {
    fn from(term: JsonTerm) -> Self {
        match term {
            JsonTerm::Iri { value } => Term::Iri(value),
            JsonTerm::Bnode { value } => Term::BlankNode(value),
            JsonTerm::Literal {
                value,
                language: Some(lang),
                ..
            } => Term::lang_string(value, &lang),
            JsonTerm::Literal {
                value, datatype, ..
            } => Term::typed(value, datatype.unwrap_or_else(|| xsd::STRING.to_owned())),
        }
    }
}

impl Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        JsonTerm::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        JsonTerm::deserialize(deserializer).map(Term::from)
    }
}
