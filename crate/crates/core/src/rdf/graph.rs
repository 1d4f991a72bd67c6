use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::Bound;

use super::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl Triple {
    /// Panics if the subject is a literal or the predicate is not an IRI.
    pub fn new(subject: Term, predicate: Term, object: Term) -> Self {
        assert!(!subject.is_literal(), "literal subject {subject}");
        assert!(predicate.is_iri(), "non-IRI predicate {predicate}");
        Self {
            subject,
            predicate,
            object,
        }
    }

    pub fn in_graph(self, graph: Option<String>) -> Quad {
        Quad {
            subject: self.subject,
            predicate: self.predicate,
            object: self.object,
            graph,
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// A triple in a named graph, or in the default graph when `graph` is `None`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quad {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
    pub graph: Option<String>,
}

impl Quad {
    pub fn new(subject: Term, predicate: Term, object: Term, graph: Option<String>) -> Self {
        Triple::new(subject, predicate, object).in_graph(graph)
    }

    pub fn triple(&self) -> Triple {
        Triple {
            subject: self.subject.clone(),
            predicate: self.predicate.clone(),
            object: self.object.clone(),
        }
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.predicate, self.object)?;
        if let Some(g) = &self.graph {
            f.write_str(" ")?;
            super::term::write_iri(f, g)?;
        }
        f.write_str(" .")
    }
}

/// A set of triples, iterated in (subject, predicate, object) order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Graph {
    triples: BTreeSet<Triple>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false when the triple was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        self.triples.insert(triple)
    }

    pub fn remove(&mut self, triple: &Triple) -> bool {
        self.triples.remove(triple)
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> + '_ {
        self.triples.iter()
    }

    /// All triples with the given subject, using the subject-first ordering.
    pub fn with_subject(&self, subject: &Term) -> impl Iterator<Item = &Triple> + '_ {
        let subject = subject.clone();
        let lower = Triple {
            subject: subject.clone(),
            predicate: Term::Iri(String::new()),
            object: Term::Iri(String::new()),
        };
        self.triples
            .range((Bound::Included(lower), Bound::Unbounded))
            .take_while(move |t| t.subject == subject)
    }

    pub fn objects(&self, subject: &Term, predicate: &str) -> impl Iterator<Item = &Term> + '_ {
        let predicate = predicate.to_owned();
        self.with_subject(subject)
            .filter(move |t| t.predicate.value() == predicate)
            .map(|t| &t.object)
    }

    pub fn object(&self, subject: &Term, predicate: &str) -> Option<&Term> {
        self.objects(subject, predicate).next()
    }

    pub fn subjects(&self, predicate: &str, object: &Term) -> impl Iterator<Item = &Term> + '_ {
        let predicate = predicate.to_owned();
        let object = object.clone();
        self.triples
            .iter()
            .filter(move |t| t.predicate.value() == predicate && t.object == object)
            .map(|t| &t.subject)
    }

    pub fn has_type(&self, node: &Term, class: &str) -> bool {
        self.objects(node, crate::vocab::rdf::TYPE)
            .any(|c| c.as_iri() == Some(class))
    }

    pub fn union(&self, other: &Graph) -> Graph {
        let mut out = self.clone();
        out.extend(other.iter().cloned());
        out
    }

    pub fn difference(&self, other: &Graph) -> Graph {
        self.triples.difference(&other.triples).cloned().collect()
    }

    pub fn intersection(&self, other: &Graph) -> Graph {
        self.triples.intersection(&other.triples).cloned().collect()
    }

    pub fn has_blank_nodes(&self) -> bool {
        self.iter()
            .any(|t| t.subject.is_blank() || t.object.is_blank())
    }

    /// Triples whose subject is `root` or is reachable from `root` through
    /// object links that stay inside this graph.
    pub fn reachable_from(&self, root: &Term) -> Graph {
        let mut out = Graph::new();
        let mut seen = BTreeSet::new();
        let mut stack = vec![root.clone()];
        while let Some(node) = stack.pop() {
            if !seen.insert(node.clone()) {
                continue;
            }
            for t in self.with_subject(&node) {
                out.insert(t.clone());
                if !t.object.is_literal() && !seen.contains(&t.object) {
                    stack.push(t.object.clone());
                }
            }
        }
        out
    }

    /// Triples of `root` and of the skolem or blank nodes it owns, found by
    /// following object links into such nodes only.
    pub fn owned_by(&self, root: &Term) -> Graph {
        let mut out = Graph::new();
        let mut seen = BTreeSet::new();
        let mut stack = vec![root.clone()];
        while let Some(node) = stack.pop() {
            if !seen.insert(node.clone()) {
                continue;
            }
            for t in self.with_subject(&node) {
                out.insert(t.clone());
                let owned = t.object.is_blank() || t.object.as_iri().is_some_and(is_skolem_iri);
                if owned && !seen.contains(&t.object) {
                    stack.push(t.object.clone());
                }
            }
        }
        out
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        Self {
            triples: iter.into_iter().collect(),
        }
    }
}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        self.triples.extend(iter)
    }
}

impl IntoIterator for Graph {
    type Item = Triple;
    type IntoIter = std::collections::btree_set::IntoIter<Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.into_iter()
    }
}

impl<'a> IntoIterator for &'a Graph {
    type Item = &'a Triple;
    type IntoIter = std::collections::btree_set::Iter<'a, Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.iter()
    }
}

/// A default graph plus named graphs. Named graphs never stay empty.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dataset {
    default: Graph,
    named: BTreeMap<String, Graph>,
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, quad: Quad) -> bool {
        let Quad {
            subject,
            predicate,
            object,
            graph,
        } = quad;
        let triple = Triple {
            subject,
            predicate,
            object,
        };
        match graph {
            None => self.default.insert(triple),
            Some(name) => self.named.entry(name).or_default().insert(triple),
        }
    }

    pub fn remove(&mut self, quad: &Quad) -> bool {
        let triple = quad.triple();
        match &quad.graph {
            None => self.default.remove(&triple),
            Some(name) => match self.named.entry(name.clone()) {
                Entry::Occupied(mut entry) => {
                    let removed = entry.get_mut().remove(&triple);
                    if entry.get().is_empty() {
                        entry.remove();
                    }
                    removed
                }
                Entry::Vacant(_) => false,
            },
        }
    }

    pub fn contains(&self, quad: &Quad) -> bool {
        let triple = quad.triple();
        match &quad.graph {
            None => self.default.contains(&triple),
            Some(name) => self.named.get(name).is_some_and(|g| g.contains(&triple)),
        }
    }

    pub fn default_graph(&self) -> &Graph {
        &self.default
    }

    pub fn graph(&self, name: &str) -> Option<&Graph> {
        self.named.get(name)
    }

    pub fn graph_names(&self) -> impl Iterator<Item = &str> + '_ {
        self.named.keys().map(String::as_str)
    }

    pub fn named_graphs(&self) -> impl Iterator<Item = (&str, &Graph)> + '_ {
        self.named.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn set_default_graph(&mut self, graph: Graph) {
        self.default = graph;
    }

    /// Replaces a named graph wholesale; an empty graph removes the entry.
    pub fn set_graph(&mut self, name: &str, graph: Graph) {
        if graph.is_empty() {
            self.named.remove(name);
        } else {
            self.named.insert(name.to_owned(), graph);
        }
    }

    pub fn len(&self) -> usize {
        self.default.len() + self.named.values().map(Graph::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.default.is_empty() && self.named.is_empty()
    }

    /// Default graph first, then named graphs by name.
    pub fn quads(&self) -> impl Iterator<Item = Quad> + '_ {
        self.default
            .iter()
            .map(|t| t.clone().in_graph(None))
            .chain(self.named.iter().flat_map(|(name, g)| {
                g.iter().map(move |t| t.clone().in_graph(Some(name.clone())))
            }))
    }
}

impl FromIterator<Quad> for Dataset {
    fn from_iter<I: IntoIterator<Item = Quad>>(iter: I) -> Self {
        let mut ds = Dataset::new();
        for q in iter {
            ds.insert(q);
        }
        ds
    }
}

/// The change between two graphs: what to add and what to remove.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Delta {
    pub added: Graph,
    pub removed: Graph,
}

impl Delta {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty()
    }

    /// `(base ∖ removed) ∪ added`.
    pub fn apply(&self, base: &Graph) -> Graph {
        let mut out = base.difference(&self.removed);
        out.extend(self.added.iter().cloned());
        out
    }

    /// Inverse of [`Delta::apply`]: `(state ∖ added) ∪ removed`.
    pub fn revert(&self, state: &Graph) -> Graph {
        let mut out = state.difference(&self.added);
        out.extend(self.removed.iter().cloned());
        out
    }
}

pub fn graph_diff(before: &Graph, after: &Graph) -> Delta {
    Delta {
        added: after.difference(before),
        removed: before.difference(after),
    }
}

pub const GENID_SEGMENT: &str = "/.well-known/genid/";

pub fn is_skolem_iri(iri: &str) -> bool {
    iri.contains(GENID_SEGMENT)
}

pub fn mint_skolem_iri(base: &str) -> String {
    format!(
        "{}{}{}",
        base.trim_end_matches('/'),
        GENID_SEGMENT,
        uuid::Uuid::new_v4()
    )
}

/// Replaces every blank node with a fresh `<base>/.well-known/genid/<uuid>`
/// IRI. Equal labels map to the same IRI within one call.
pub fn skolemize(graph: &Graph, base: &str) -> Graph {
    let mut mapping: HashMap<String, Term> = HashMap::new();
    let mut map = |term: &Term| -> Term {
        match term {
            Term::BlankNode(label) => mapping
                .entry(label.clone())
                .or_insert_with(|| Term::Iri(mint_skolem_iri(base)))
                .clone(),
            other => other.clone(),
        }
    };
    graph
        .iter()
        .map(|t| Triple {
            subject: map(&t.subject),
            predicate: t.predicate.clone(),
            object: map(&t.object),
        })
        .collect()
}
