//! Entity retrieval over RDF triples.
//!
//! The pipeline runs in three steps: triples are read into a labelled graph
//! ([`graph`]), closed under forward-chaining rules and turned into journey
//! pattern documents ([`inference`]), then indexed into field-structured
//! inverted indexes ([`index`]) that keyword queries are evaluated against
//! ([`query`]). [`eval`] scores query runs with precision, recall and
//! F-measure.

pub mod cli;
pub mod error;
pub mod eval;
pub mod graph;
pub mod index;
pub mod inference;
pub mod query;

pub use error::{EvalError, GraphError, IndexError, ParseError, QueryError, RuleError};
