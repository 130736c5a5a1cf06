//! Patient event graphs from relational EMR tables.
//!
//! The crate turns cleaned CSV exports of patient, hospitalization,
//! diagnosis, medication, assay, and surgery records into an RDF event
//! graph: typed medical events tied to their patient and to registry
//! entities, temporal relations between same-patient events, and
//! similarity-based links into an external terminology graph. A small
//! conjunctive query language answers clinical questions over the
//! result.
//!
//! Modules follow the pipeline order:
//!
//! - [`preprocess`]: table cleaning (qualitative folding, unit
//!   conversion, multi-value explosion, missing-value policy).
//! - [`mapping`]: table-to-triples conversion and the entity registry.
//! - [`temporal`]: the five temporal relations, full and reduced
//!   construction, closure inference.
//! - [`matcher`]: string-similarity linking against a terminology graph.
//! - [`store`] and [`query`]: an indexed triple store and the query
//!   language over it.
//! - [`pipeline`]: file-level orchestration shared with the CLI.
//!
//! [`model`], [`vocab`], [`ntriples`], and [`decimal`] supply the shared
//! vocabulary: terms, namespaces, canonical serialization, and exact
//! decimal arithmetic.

pub mod decimal;
pub mod mapping;
pub mod matcher;
pub mod model;
pub mod ntriples;
pub mod pipeline;
pub mod preprocess;
pub mod query;
pub mod store;
pub mod temporal;
pub mod vocab;
