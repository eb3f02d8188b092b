//! HTTP/JSON API and command line over the assay knowledge graph store.

pub mod api;
pub mod app;
pub mod cli;
pub mod error;
