use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::model::{NodeKind, NodeShape, PropertyShape, ShapesModel};
use crate::rdf::{local_name, Term};
use crate::vocab::{rdf, rdfs, xsd};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    Text,
    TypedLiteral,
    Dropdown,
    EntityReference,
    NestedForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FormField {
    pub predicate: String,
    pub label: String,
    pub kind: FieldKind,
    pub required: bool,
    pub repeatable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<Vec<Term>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub datatype: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub referenced_class: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nested_shape: Option<String>,
}

/// Form fields per target class. Serializes as a JSON object keyed by class
/// IRI; shapes without a target class are keyed by their own IRI.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FormSchema {
    pub entries: BTreeMap<String, Vec<FormField>>,
}

impl FormSchema {
    pub fn fields(&self, class: &str) -> Option<&[FormField]> {
        self.entries.get(class).map(Vec::as_slice)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("form schema is always serializable")
    }
}

fn is_string_like(datatype: &str) -> bool {
    matches!(datatype, xsd::STRING | rdf::LANG_STRING)
}

fn field_for(model: &ShapesModel, prop: &PropertyShape) -> FormField {
    let mut field = FormField {
        predicate: prop.path.predicate.clone(),
        label: prop
            .name
            .clone()
            .unwrap_or_else(|| local_name(&prop.path.predicate).to_owned()),
        kind: FieldKind::Text,
        required: prop.min_count.unwrap_or(0) >= 1,
        repeatable: prop.max_count.is_none_or(|m| m > 1),
        options: None,
        datatype: prop.datatype.clone(),
        referenced_class: None,
        nested_shape: None,
    };
    if let Some(options) = &prop.in_list {
        field.kind = FieldKind::Dropdown;
        field.options = Some(options.clone());
    } else if prop.class.is_some() || prop.node_kind == Some(NodeKind::Iri) {
        field.kind = FieldKind::EntityReference;
        field.referenced_class = Some(
            prop.class
                .clone()
                .or_else(|| {
                    prop.node
                        .as_deref()
                        .and_then(|n| model.shape(n))
                        .and_then(|s| s.target_class.clone())
                })
                .unwrap_or_else(|| rdfs::RESOURCE.to_owned()),
        );
    } else if let Some(nested) = &prop.node {
        field.kind = FieldKind::NestedForm;
        field.nested_shape = Some(nested.clone());
    } else if prop.datatype.as_deref().is_some_and(|d| !is_string_like(d)) {
        field.kind = FieldKind::TypedLiteral;
    }
    field
}

fn schema_key(shape: &NodeShape) -> String {
    shape.target_class.clone().unwrap_or_else(|| shape.iri.clone())
}

/// One field per property shape, in property order. Kind precedence:
/// `sh:in` → dropdown; `sh:class` or `sh:nodeKind sh:IRI` → entity
/// reference; `sh:node` → nested form; non-string datatype → typed literal;
/// otherwise text.
pub fn derive_form_schema(model: &ShapesModel) -> FormSchema {
    let entries = model
        .shapes()
        .iter()
        .map(|shape| {
            let fields = shape.properties.iter().map(|p| field_for(model, p)).collect();
            (schema_key(shape), fields)
        })
        .collect();
    FormSchema { entries }
}
