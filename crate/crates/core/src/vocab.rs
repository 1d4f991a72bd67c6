//! IRI constants for the vocabularies the engine and the bibliographic
//! profile rely on.

pub mod rdf {
    pub const NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    pub const TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const FIRST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#first";
    pub const REST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#rest";
    pub const NIL: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#nil";
    pub const LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
}

pub mod rdfs {
    pub const NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
    pub const LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
    pub const SUB_CLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
    pub const RESOURCE: &str = "http://www.w3.org/2000/01/rdf-schema#Resource";
}

pub mod xsd {
    pub const NS: &str = "http://www.w3.org/2001/XMLSchema#";
    pub const STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
    pub const INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
    pub const DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
    pub const DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
    pub const BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";
    pub const DATE_TIME: &str = "http://www.w3.org/2001/XMLSchema#dateTime";
    pub const G_YEAR: &str = "http://www.w3.org/2001/XMLSchema#gYear";
    pub const POSITIVE_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#positiveInteger";
}

pub mod sh {
    pub const NS: &str = "http://www.w3.org/ns/shacl#";
    pub const NODE_SHAPE: &str = "http://www.w3.org/ns/shacl#NodeShape";
    pub const PROPERTY_SHAPE: &str = "http://www.w3.org/ns/shacl#PropertyShape";
    pub const TARGET_CLASS: &str = "http://www.w3.org/ns/shacl#targetClass";
    pub const PROPERTY: &str = "http://www.w3.org/ns/shacl#property";
    pub const PATH: &str = "http://www.w3.org/ns/shacl#path";
    pub const INVERSE_PATH: &str = "http://www.w3.org/ns/shacl#inversePath";
    pub const MIN_COUNT: &str = "http://www.w3.org/ns/shacl#minCount";
    pub const MAX_COUNT: &str = "http://www.w3.org/ns/shacl#maxCount";
    pub const DATATYPE: &str = "http://www.w3.org/ns/shacl#datatype";
    pub const CLASS: &str = "http://www.w3.org/ns/shacl#class";
    pub const NODE_KIND: &str = "http://www.w3.org/ns/shacl#nodeKind";
    pub const IN: &str = "http://www.w3.org/ns/shacl#in";
    pub const PATTERN: &str = "http://www.w3.org/ns/shacl#pattern";
    pub const HAS_VALUE: &str = "http://www.w3.org/ns/shacl#hasValue";
    pub const NODE: &str = "http://www.w3.org/ns/shacl#node";
    pub const NAME: &str = "http://www.w3.org/ns/shacl#name";
    pub const DESCRIPTION: &str = "http://www.w3.org/ns/shacl#description";
    pub const ORDER: &str = "http://www.w3.org/ns/shacl#order";
    pub const IRI: &str = "http://www.w3.org/ns/shacl#IRI";
    pub const LITERAL: &str = "http://www.w3.org/ns/shacl#Literal";
    pub const BLANK_NODE_OR_IRI: &str = "http://www.w3.org/ns/shacl#BlankNodeOrIRI";
}

pub mod prov {
    pub const NS: &str = "http://www.w3.org/ns/prov#";
    pub const ENTITY: &str = "http://www.w3.org/ns/prov#Entity";
    pub const GENERATED_AT_TIME: &str = "http://www.w3.org/ns/prov#generatedAtTime";
    pub const INVALIDATED_AT_TIME: &str = "http://www.w3.org/ns/prov#invalidatedAtTime";
    pub const WAS_ATTRIBUTED_TO: &str = "http://www.w3.org/ns/prov#wasAttributedTo";
    pub const HAD_PRIMARY_SOURCE: &str = "http://www.w3.org/ns/prov#hadPrimarySource";
    pub const SPECIALIZATION_OF: &str = "http://www.w3.org/ns/prov#specializationOf";
    pub const WAS_DERIVED_FROM: &str = "http://www.w3.org/ns/prov#wasDerivedFrom";
}

pub mod dcterms {
    pub const NS: &str = "http://purl.org/dc/terms/";
    pub const TITLE: &str = "http://purl.org/dc/terms/title";
    pub const ABSTRACT: &str = "http://purl.org/dc/terms/abstract";
    pub const DESCRIPTION: &str = "http://purl.org/dc/terms/description";
}

pub mod foaf {
    pub const NS: &str = "http://xmlns.com/foaf/0.1/";
    pub const NAME: &str = "http://xmlns.com/foaf/0.1/name";
    pub const FAMILY_NAME: &str = "http://xmlns.com/foaf/0.1/familyName";
    pub const GIVEN_NAME: &str = "http://xmlns.com/foaf/0.1/givenName";
    pub const AGENT: &str = "http://xmlns.com/foaf/0.1/Agent";
}

pub mod prism {
    pub const NS: &str = "http://prismstandard.org/namespaces/basic/2.0/";
    pub const KEYWORD: &str = "http://prismstandard.org/namespaces/basic/2.0/keyword";
    pub const PUBLICATION_DATE: &str = "http://prismstandard.org/namespaces/basic/2.0/publicationDate";
    pub const PAGE_RANGE: &str = "http://prismstandard.org/namespaces/basic/2.0/pageRange";
}

pub mod fabio {
    pub const NS: &str = "http://purl.org/spar/fabio/";
    pub const EXPRESSION: &str = "http://purl.org/spar/fabio/Expression";
    pub const JOURNAL_ARTICLE: &str = "http://purl.org/spar/fabio/JournalArticle";
    pub const REVIEW_ARTICLE: &str = "http://purl.org/spar/fabio/ReviewArticle";
    pub const REVIEW: &str = "http://purl.org/spar/fabio/Review";
    pub const JOURNAL: &str = "http://purl.org/spar/fabio/Journal";
    pub const JOURNAL_VOLUME: &str = "http://purl.org/spar/fabio/JournalVolume";
    pub const JOURNAL_ISSUE: &str = "http://purl.org/spar/fabio/JournalIssue";
    pub const HAS_SEQUENCE_IDENTIFIER: &str = "http://purl.org/spar/fabio/hasSequenceIdentifier";
}

pub mod frbr {
    pub const PART_OF: &str = "http://purl.org/vocab/frbr/core#partOf";
}

pub mod datacite {
    pub const NS: &str = "http://purl.org/spar/datacite/";
    pub const IDENTIFIER: &str = "http://purl.org/spar/datacite/Identifier";
    pub const HAS_IDENTIFIER: &str = "http://purl.org/spar/datacite/hasIdentifier";
    pub const USES_IDENTIFIER_SCHEME: &str = "http://purl.org/spar/datacite/usesIdentifierScheme";
    pub const DOI: &str = "http://purl.org/spar/datacite/doi";
    pub const ISSN: &str = "http://purl.org/spar/datacite/issn";
    pub const EISSN: &str = "http://purl.org/spar/datacite/eissn";
    pub const ISBN: &str = "http://purl.org/spar/datacite/isbn";
}

pub mod literal {
    pub const HAS_LITERAL_VALUE: &str =
        "http://www.essepuntato.it/2010/06/literalreification/hasLiteralValue";
}

pub mod pro {
    pub const NS: &str = "http://purl.org/spar/pro/";
    pub const ROLE_IN_TIME: &str = "http://purl.org/spar/pro/RoleInTime";
    pub const IS_DOCUMENT_CONTEXT_FOR: &str = "http://purl.org/spar/pro/isDocumentContextFor";
    pub const WITH_ROLE: &str = "http://purl.org/spar/pro/withRole";
    pub const IS_HELD_BY: &str = "http://purl.org/spar/pro/isHeldBy";
    pub const AUTHOR: &str = "http://purl.org/spar/pro/author";
    pub const EDITOR: &str = "http://purl.org/spar/pro/editor";
}

pub mod cito {
    pub const NS: &str = "http://purl.org/spar/cito/";
    pub const CITATION: &str = "http://purl.org/spar/cito/Citation";
    pub const HAS_CITING_ENTITY: &str = "http://purl.org/spar/cito/hasCitingEntity";
    pub const HAS_CITED_ENTITY: &str = "http://purl.org/spar/cito/hasCitedEntity";
    pub const HAS_CITATION_CHARACTERISATION: &str =
        "http://purl.org/spar/cito/hasCitationCharacterisation";
    pub const REPLIES_TO: &str = "http://purl.org/spar/cito/repliesTo";
}

/// Project vocabulary for things no published ontology covers: snapshot
/// delta blocks and explicit author positions.
pub mod quill {
    pub const NS: &str = "https://w3id.org/quill/ns#";
    pub const SNAPSHOT: &str = "https://w3id.org/quill/ns#Snapshot";
    pub const SNAPSHOT_INDEX: &str = "https://w3id.org/quill/ns#snapshotIndex";
    pub const ADDED_TRIPLES: &str = "https://w3id.org/quill/ns#addedTriples";
    pub const REMOVED_TRIPLES: &str = "https://w3id.org/quill/ns#removedTriples";
    pub const SOURCE_NOTE: &str = "https://w3id.org/quill/ns#sourceNote";
    pub const POSITION: &str = "https://w3id.org/quill/ns#position";
}
