pub mod compare;
pub mod corpus;
pub mod curation;
pub mod graph;
pub mod ntriples;
pub mod semantifier;
pub mod snapshot;
pub mod store;
pub mod uri;
