//! Controlled keyword vocabulary and the macro-category closure rule.
//!
//! Configuration grammar (a small YAML subset):
//!
//! ```text
//! # comment
//! exegetical products:
//!   - scholia
//!   - "scholia à recueil"
//! ```
//!
//! A category line starts in column 0 and ends with `:`. Term lines are
//! indented and start with `- `; terms may be wrapped in single or double
//! quotes. Blank lines and `#` comments are ignored.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VocabularyError {
    #[error("line {line}: term {term:?} is already listed under {first:?}")]
    DuplicateTerm {
        term: String,
        first: String,
        line: usize,
    },
    #[error("category {0:?} has no terms")]
    EmptyCategory(String),
    #[error("line {line}: category {name:?} is declared twice")]
    DuplicateCategory { name: String, line: usize },
    #[error("line {line}: term {term:?} is also a category name")]
    TermIsCategory { term: String, line: usize },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ControlledVocabulary {
    categories: BTreeMap<String, BTreeSet<String>>,
    #[serde(skip)]
    term_index: BTreeMap<String, String>,
}

impl ControlledVocabulary {
    pub fn categories(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.categories
    }

    pub fn category_of(&self, term: &str) -> Option<&str> {
        self.term_index.get(term).map(String::as_str)
    }

    pub fn is_category(&self, name: &str) -> bool {
        self.categories.contains_key(name)
    }

    pub fn is_term(&self, name: &str) -> bool {
        self.term_index.contains_key(name)
    }

    pub fn knows(&self, keyword: &str) -> bool {
        self.is_term(keyword) || self.is_category(keyword)
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    /// Builds a vocabulary from `(category, terms)` pairs.
    pub fn from_categories<C, T>(pairs: impl IntoIterator<Item = (C, T)>) -> Result<Self, VocabularyError>
    where
        C: Into<String>,
        T: IntoIterator,
        T::Item: Into<String>,
    {
        let mut builder = Builder::default();
        for (category, terms) in pairs {
            builder.category(category.into(), 0)?;
            for term in terms {
                builder.term(term.into(), 0)?;
            }
        }
        builder.finish()
    }
}

#[derive(Default)]
struct Builder {
    vocab: ControlledVocabulary,
    open: Option<String>,
}

impl Builder {
    fn close(&mut self) -> Result<(), VocabularyError> {
        if let Some(name) = self.open.take() {
            if self.vocab.categories[&name].is_empty() {
                return Err(VocabularyError::EmptyCategory(name));
            }
        }
        Ok(())
    }

    fn category(&mut self, name: String, line: usize) -> Result<(), VocabularyError> {
        self.close()?;
        if name.is_empty() {
            return Err(VocabularyError::Syntax {
                line,
                message: "empty category name".into(),
            });
        }
        if self.vocab.categories.contains_key(&name) {
            return Err(VocabularyError::DuplicateCategory { name, line });
        }
        if self.vocab.term_index.contains_key(&name) {
            return Err(VocabularyError::TermIsCategory { term: name, line });
        }
        self.vocab.categories.insert(name.clone(), BTreeSet::new());
        self.open = Some(name);
        Ok(())
    }

    fn term(&mut self, term: String, line: usize) -> Result<(), VocabularyError> {
        let Some(category) = self.open.clone() else {
            return Err(VocabularyError::Syntax {
                line,
                message: "term before any category".into(),
            });
        };
        if term.is_empty() {
            return Err(VocabularyError::Syntax {
                line,
                message: "empty term".into(),
            });
        }
        if self.vocab.categories.contains_key(&term) {
            return Err(VocabularyError::TermIsCategory { term, line });
        }
        if let Some(first) = self.vocab.term_index.get(&term) {
            return Err(VocabularyError::DuplicateTerm {
                term,
                first: first.clone(),
                line,
            });
        }
        self.vocab.term_index.insert(term.clone(), category.clone());
        self.vocab.categories.get_mut(&category).unwrap().insert(term);
        Ok(())
    }

    fn finish(mut self) -> Result<ControlledVocabulary, VocabularyError> {
        self.close()?;
        Ok(self.vocab)
    }
}

fn unquote(s: &str) -> &str {
    let s = s.trim();
    for q in ['"', '\''] {
        if s.len() >= 2 && s.starts_with(q) && s.ends_with(q) {
            return &s[1..s.len() - 1];
        }
    }
    s
}

pub fn load_vocabulary(text: &str) -> Result<ControlledVocabulary, VocabularyError> {
    let mut builder = Builder::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let indented = raw.starts_with([' ', '\t']);
        if indented {
            let Some(item) = trimmed.strip_prefix("- ").or_else(|| (trimmed == "-").then_some("")) else {
                return Err(VocabularyError::Syntax {
                    line,
                    message: format!("expected `- term`, found {trimmed:?}"),
                });
            };
            builder.term(unquote(item).to_owned(), line)?;
        } else {
            let Some(name) = trimmed.strip_suffix(':') else {
                return Err(VocabularyError::Syntax {
                    line,
                    message: format!("expected `category:`, found {trimmed:?}"),
                });
            };
            builder.category(unquote(name).to_owned(), line)?;
        }
    }
    builder.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeywordMode {
    /// Unknown keywords are an error.
    Strict,
    /// Unknown keywords pass through unchanged.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown keywords: {}", .0.iter().map(|k| format!("{k:?}")).collect::<Vec<_>>().join(", "))]
pub struct UnknownKeywordError(pub Vec<String>);

/// `keywords` plus the category of every keyword that is a term.
pub fn expand_keywords(
    keywords: &BTreeSet<String>,
    vocab: &ControlledVocabulary,
    mode: KeywordMode,
) -> Result<BTreeSet<String>, UnknownKeywordError> {
    if mode == KeywordMode::Strict {
        let unknown: Vec<String> = keywords.iter().filter(|k| !vocab.knows(k)).cloned().collect();
        if !unknown.is_empty() {
            return Err(UnknownKeywordError(unknown));
        }
    }
    let mut out = keywords.clone();
    out.extend(
        keywords
            .iter()
            .filter_map(|k| vocab.category_of(k))
            .map(str::to_owned),
    );
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct KeywordViolation {
    pub term: String,
    pub missing_category: String,
}

/// One violation per term whose category is absent from `keywords`.
pub fn validate_keywords(keywords: &BTreeSet<String>, vocab: &ControlledVocabulary) -> Vec<KeywordViolation> {
    keywords
        .iter()
        .filter_map(|k| {
            let category = vocab.category_of(k)?;
            (!keywords.contains(category)).then(|| KeywordViolation {
                term: k.clone(),
                missing_category: category.to_owned(),
            })
        })
        .collect()
}
