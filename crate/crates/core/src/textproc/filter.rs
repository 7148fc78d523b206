//! The numeric and financial-relevance sentence filters.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::segment::Segmenter;
use super::words;
use crate::corpus::{Document, Sentence, TermSet};

pub const DEFAULT_CURRENCY_SYMBOLS: &[char] = &['$', '€', '£', '¥'];

/// Accepts sentences with a currency-prefixed or percent-suffixed number.
#[derive(Debug, Clone)]
pub struct NumericFilter {
    currency_symbols: Vec<char>,
}

impl Default for NumericFilter {
    fn default() -> Self {
        NumericFilter {
            currency_symbols: DEFAULT_CURRENCY_SYMBOLS.to_vec(),
        }
    }
}

impl NumericFilter {
    pub fn new(currency_symbols: impl IntoIterator<Item = char>) -> Self {
        NumericFilter {
            currency_symbols: currency_symbols.into_iter().collect(),
        }
    }

    /// True when a digit directly follows a currency symbol or directly precedes `%`.
    pub fn is_numeric(&self, text: &str) -> bool {
        let mut prev: Option<char> = None;
        let mut chars = text.chars().peekable();
        while let Some(c) = chars.next() {
            if self.currency_symbols.contains(&c) && chars.peek().is_some_and(char::is_ascii_digit) {
                return true;
            }
            if c == '%' && prev.is_some_and(|p| p.is_ascii_digit()) {
                return true;
            }
            prev = Some(c);
        }
        false
    }
}

pub fn is_numeric_sentence(text: &str) -> bool {
    NumericFilter::default().is_numeric(text)
}

/// Dictionary matcher over word tokens; multi-word terms match contiguous tokens.
#[derive(Debug, Clone)]
pub struct FinancialMatcher {
    by_first_token: HashMap<String, Vec<Vec<String>>>,
}

impl FinancialMatcher {
    pub fn new(terms: &TermSet) -> Self {
        let mut by_first_token: HashMap<String, Vec<Vec<String>>> = HashMap::new();
        for term in terms.iter() {
            let tokens: Vec<String> = words(term).into_iter().map(str::to_string).collect();
            if let Some(first) = tokens.first() {
                by_first_token.entry(first.clone()).or_default().push(tokens);
            }
        }
        FinancialMatcher { by_first_token }
    }

    pub fn is_financial(&self, text: &str) -> bool {
        let lower = text.to_lowercase();
        self.matches_tokens(&words(&lower))
    }

    pub fn matches_tokens(&self, tokens: &[&str]) -> bool {
        tokens.iter().enumerate().any(|(i, token)| {
            self.by_first_token.get(*token).is_some_and(|candidates| {
                candidates
                    .iter()
                    .any(|term| tokens.len() - i >= term.len() && term.iter().zip(&tokens[i..]).all(|(a, b)| a == b))
            })
        })
    }
}

pub fn is_financial_sentence(text: &str, terms: &TermSet) -> bool {
    FinancialMatcher::new(terms).is_financial(text)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FilterStats {
    pub total_sentences: usize,
    pub numeric_sentences: usize,
    pub numeric_financial_sentences: usize,
    pub retention_numeric: f64,
    pub retention_financial: f64,
}

impl FilterStats {
    pub fn from_counts(total: usize, numeric: usize, numeric_financial: usize) -> Self {
        let ratio = |n: usize| if total == 0 { 0.0 } else { n as f64 / total as f64 };
        FilterStats {
            total_sentences: total,
            numeric_sentences: numeric,
            numeric_financial_sentences: numeric_financial,
            retention_numeric: ratio(numeric),
            retention_financial: ratio(numeric_financial),
        }
    }

    pub fn merge(&self, other: &FilterStats) -> FilterStats {
        FilterStats::from_counts(
            self.total_sentences + other.total_sentences,
            self.numeric_sentences + other.numeric_sentences,
            self.numeric_financial_sentences + other.numeric_financial_sentences,
        )
    }
}

/// Which filter stages select sentences. Flags are computed regardless.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterToggles {
    pub numeric: bool,
    pub financial: bool,
}

impl Default for FilterToggles {
    fn default() -> Self {
        FilterToggles {
            numeric: true,
            financial: true,
        }
    }
}

/// Segmenter plus both filters, configured once and shared across documents.
#[derive(Debug, Clone)]
pub struct TextPipeline {
    pub segmenter: Segmenter,
    pub numeric: NumericFilter,
    pub financial: FinancialMatcher,
    pub toggles: FilterToggles,
}

impl TextPipeline {
    pub fn new(terms: &TermSet) -> Self {
        TextPipeline {
            segmenter: Segmenter::default(),
            numeric: NumericFilter::default(),
            financial: FinancialMatcher::new(terms),
            toggles: FilterToggles::default(),
        }
    }

    /// Segments `doc` and sets the numeric/financial flags on every sentence.
    ///
    /// The financial test only runs on numeric sentences.
    pub fn annotate(&self, doc: &Document) -> Vec<Sentence> {
        let mut sentences = self.segmenter.segment(&doc.doc_id, &doc.raw_text);
        for s in &mut sentences {
            s.flags.is_numeric = self.numeric.is_numeric(&s.text);
            s.flags.is_financial = s.flags.is_numeric && self.financial.is_financial(&s.text);
        }
        sentences
    }

    pub fn stats(sentences: &[Sentence]) -> FilterStats {
        FilterStats::from_counts(
            sentences.len(),
            sentences.iter().filter(|s| s.flags.is_numeric).count(),
            sentences.iter().filter(|s| s.flags.is_financial).count(),
        )
    }

    /// Whether an annotated sentence passes the enabled filter stages.
    pub fn selects(&self, sentence: &Sentence) -> bool {
        let numeric_ok = !self.toggles.numeric || sentence.flags.is_numeric;
        let financial_ok = !self.toggles.financial
            || sentence.flags.is_financial
            || (!sentence.flags.is_numeric && !self.toggles.numeric && self.financial.is_financial(&sentence.text));
        numeric_ok && financial_ok
    }

    /// Numeric-financial sentences of `doc` in order, plus counts over all its sentences.
    pub fn filter(&self, doc: &Document) -> (Vec<Sentence>, FilterStats) {
        let sentences = self.annotate(doc);
        let stats = Self::stats(&sentences);
        let kept = sentences.into_iter().filter(|s| self.selects(s)).collect();
        (kept, stats)
    }
}

pub fn filter_pipeline(doc: &Document, terms: &TermSet) -> (Vec<Sentence>, FilterStats) {
    TextPipeline::new(terms).filter(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Sector, SourceKind};
    use chrono::NaiveDate;

    fn doc(text: &str) -> Document {
        Document {
            doc_id: "d".into(),
            source_kind: SourceKind::EarningsCall,
            ticker: "T".into(),
            sector: Sector::Unknown,
            period: NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
            raw_text: text.into(),
        }
    }

    #[test]
    fn numeric_examples() {
        assert!(is_numeric_sentence(
            "consolidated total capital was $2.9 billion for the quarter."
        ));
        assert!(is_numeric_sentence(
            "we expect revenue growth to be in the range of 5.5% to 6.5% year on year."
        ));
        assert!(!is_numeric_sentence("the company hired 300 employees."));
        assert!(!is_numeric_sentence("costs of $ 5 million"));
        assert!(!is_numeric_sentence("growth of 5 %"));
        assert!(is_numeric_sentence("a charge of €1,200 was taken"));
        assert!(is_numeric_sentence("up 1,234%"));
    }

    #[test]
    fn custom_currency_symbols() {
        let f = NumericFilter::new(['₹']);
        assert!(f.is_numeric("sales of ₹500 crore"));
        assert!(!f.is_numeric("sales of $500"));
    }

    #[test]
    fn financial_examples() {
        let cash = TermSet::new(["cash flow"]).unwrap();
        assert!(is_financial_sentence(
            "free cash flow of $2.3 billion was up 10.5%",
            &cash
        ));
        let revenue = TermSet::new(["revenue"]).unwrap();
        assert!(!is_financial_sentence("it cost $5.", &revenue));
        assert!(is_financial_sentence("REVENUE grew 3%.", &revenue));
        assert!(!is_financial_sentence("revenues grew 3%.", &revenue));
    }

    #[test]
    fn hyphenated_terms_match_both_forms() {
        let terms = TermSet::new(["year-over-year"]).unwrap();
        assert!(is_financial_sentence("sales rose 4% year over year", &terms));
        assert!(is_financial_sentence("sales rose 4% year-over-year", &terms));
        let spaced = TermSet::new(["cash flow"]).unwrap();
        assert!(is_financial_sentence("cash-flow was $3", &spaced));
        assert!(!is_financial_sentence("cash was $3 and flow", &spaced));
    }

    #[test]
    fn no_numeric_sentences() {
        let terms = TermSet::new(["revenue"]).unwrap();
        let (kept, stats) = filter_pipeline(&doc("Revenue grew. We are happy."), &terms);
        assert!(kept.is_empty());
        assert_eq!(stats.total_sentences, 2);
        assert_eq!(stats.numeric_sentences, 0);
        assert_eq!(stats.retention_numeric, 0.0);
    }

    #[test]
    fn toggles_change_selection_only() {
        let terms = TermSet::new(["revenue"]).unwrap();
        let d = doc("Revenue grew. Costs rose 5%. Revenue rose 2%.");
        let mut p = TextPipeline::new(&terms);
        assert_eq!(p.filter(&d).0.len(), 1);
        p.toggles.financial = false;
        assert_eq!(p.filter(&d).0.len(), 2);
        p.toggles = FilterToggles {
            numeric: false,
            financial: true,
        };
        let (kept, stats) = p.filter(&d);
        assert_eq!(kept.len(), 2);
        assert_eq!(stats.numeric_financial_sentences, 1);
    }
}
