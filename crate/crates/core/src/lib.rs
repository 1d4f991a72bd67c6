pub mod rdf;
pub mod profile;
pub mod shacl;
pub mod store;
pub mod versioning;
pub mod vocab;
