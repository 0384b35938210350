//! Nearly-unsupervised information extraction over file-based corpora.
//!
//! The workflow links entity vocabularies into documents, extracts
//! statements either along dependency paths ([`pathie`]) or by cleaning
//! externally produced OpenIE triples ([`openie_clean`]), maps predicates to
//! a curated relation vocabulary ([`canonical`]), and reports corpus
//! statistics ([`analytics`]). [`pipeline`] runs the whole chain as resumable
//! stages over a workspace directory.

pub mod error;
pub mod text;

pub mod analytics;
pub mod canonical;
pub mod corpus;
pub mod linker;
pub mod openie_clean;
pub mod pathie;
pub mod pipeline;
pub mod statement;
pub mod vocabulary;

pub use error::{Error, Result};
