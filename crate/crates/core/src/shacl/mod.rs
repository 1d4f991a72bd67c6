//! A SHACL subset: loading shapes from a Turtle graph, validating data
//! graphs, and compiling shapes into a form description for editors.
//!
//! Supported vocabulary: `sh:targetClass`, `sh:property`, `sh:path`
//! (a predicate, or `[ sh:inversePath p ]`), `sh:minCount`, `sh:maxCount`,
//! `sh:datatype`, `sh:class`, `sh:nodeKind` (IRI, Literal, BlankNodeOrIRI),
//! `sh:in`, `sh:pattern`, `sh:hasValue`, `sh:node`, `sh:name`,
//! `sh:description` and `sh:order`. Every result has violation severity.
//! Targeting reads direct `rdf:type` assertions only.

mod form;
mod load;
mod model;
mod validate;

pub use form::{derive_form_schema, FieldKind, FormField, FormSchema};
pub use load::load_shapes;
pub use model::{
    NodeKind, NodeShape, Pattern, PathDirection, PropertyPath, PropertyShape, ShapeLoadError,
    ShapesModel,
};
pub use validate::{
    validate, validate_nodes, validate_with, Component, Execution, ValidationReport,
    ValidationResult,
};
