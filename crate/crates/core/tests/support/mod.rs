pub mod shacl_oracle;
pub mod history_oracle;
