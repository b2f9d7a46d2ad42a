//! XML parsing, containment labeling, the per-tag inverted index and the
//! synthetic document generators.

mod gen;
mod index;
mod xml;

use thiserror::Error;

pub use gen::{gen_doc, DocShape, GenError};
pub use index::{
    load_index, save_index, DocumentStats, IndexFormatError, InvertedIndex, LabelStream,
};
pub use xml::parse_and_label;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed XML at byte {pos}: {msg}")]
    Xml { pos: u64, msg: String },
    #[error("document has no root element")]
    EmptyDocument,
}
