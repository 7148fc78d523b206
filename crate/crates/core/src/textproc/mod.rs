//! Sentence segmentation, filtering, lemmatization, and the "project" POS heuristic.

mod filter;
mod lemma;
mod pos;
mod segment;

use unicode_segmentation::UnicodeSegmentation;

pub use filter::{
    filter_pipeline, is_financial_sentence, is_numeric_sentence, FilterStats, FilterToggles, FinancialMatcher,
    NumericFilter, TextPipeline, DEFAULT_CURRENCY_SYMBOLS,
};
pub use lemma::lemma;
pub use pos::{pos_of_project, PosCall};
pub use segment::Segmenter;

use crate::corpus::{Document, Sentence};

/// Word tokens on Unicode word boundaries; punctuation and symbols are dropped.
pub fn words(text: &str) -> Vec<&str> {
    text.unicode_words().collect()
}

/// Segments `doc` with the built-in abbreviation list.
pub fn segment(doc: &Document) -> Vec<Sentence> {
    Segmenter::default().segment(&doc.doc_id, &doc.raw_text)
}
