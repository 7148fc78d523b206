//! Rule-based sentence splitting.
//!
//! A boundary is placed after a run of `.`, `!` or `?` (plus any closing
//! quotes or brackets) when it is followed by whitespace and then an
//! upper-case letter, an opening quote, or a digit. A terminator followed by
//! a line break always ends the sentence, and so does a blank line.
//! Periods that close a known abbreviation or a single initial never split.
//! Periods inside tokens (decimals, domains, `u.s.`) are never followed by
//! whitespace and so never split either.

use std::collections::HashSet;

use crate::corpus::{Sentence, SentenceFlags};

const BUILTIN_ABBREVIATIONS: &[&str] = &[
    "mr.", "mrs.", "ms.", "dr.", "prof.", "sr.", "jr.", "st.", "messrs.", "inc.", "corp.", "co.", "ltd.", "llc.",
    "plc.", "bros.", "vs.", "e.g.", "i.e.", "al.", "cf.", "u.s.", "u.k.", "u.s.a.", "u.n.", "q1.", "q2.", "q3.", "q4.",
    "no.", "nos.", "approx.", "dept.", "est.", "fig.", "jan.", "feb.", "mar.", "apr.", "jun.", "jul.", "aug.", "sep.",
    "sept.", "oct.", "nov.", "dec.",
];

const CLOSERS: &[char] = &['"', '\'', ')', ']', '}', '\u{201d}', '\u{2019}'];
const OPENERS: &[char] = &['"', '\'', '(', '[', '\u{201c}', '\u{2018}'];

#[derive(Debug, Clone)]
pub struct Segmenter {
    abbreviations: HashSet<String>,
}

impl Default for Segmenter {
    fn default() -> Self {
        Segmenter {
            abbreviations: BUILTIN_ABBREVIATIONS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl Segmenter {
    /// Built-in abbreviations plus `extra`; a missing trailing period is added.
    pub fn with_abbreviations<I, S>(extra: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut seg = Segmenter::default();
        for abbr in extra {
            let abbr = abbr.as_ref().trim().to_lowercase();
            if abbr.is_empty() {
                continue;
            }
            if abbr.ends_with('.') {
                seg.abbreviations.insert(abbr);
            } else {
                seg.abbreviations.insert(format!("{abbr}."));
            }
        }
        seg
    }

    pub fn is_abbreviation(&self, token: &str) -> bool {
        self.abbreviations.contains(token)
    }

    /// Byte spans of the sentences in `text`, in order.
    pub fn split(&self, text: &str) -> Vec<(usize, usize)> {
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let n = chars.len();
        let byte_at = |i: usize| if i < n { chars[i].0 } else { text.len() };

        let mut spans = Vec::new();
        let mut start: Option<usize> = None;
        let mut i = 0;
        while i < n {
            let (pos, c) = chars[i];
            if start.is_none() {
                if c.is_whitespace() {
                    i += 1;
                    continue;
                }
                start = Some(pos);
            }
            let sentence_start = start.unwrap_or(pos);

            if c == '\n' {
                let mut k = i + 1;
                let mut blank_line = false;
                while k < n && chars[k].1.is_whitespace() {
                    blank_line |= chars[k].1 == '\n';
                    k += 1;
                }
                if blank_line {
                    spans.push((sentence_start, trim_end(text, sentence_start, pos)));
                    start = None;
                    i = k;
                    continue;
                }
            }

            if matches!(c, '.' | '!' | '?') {
                let mut j = i;
                while j < n && matches!(chars[j].1, '.' | '!' | '?') {
                    j += 1;
                }
                let single_period = j == i + 1 && c == '.';
                while j < n && CLOSERS.contains(&chars[j].1) {
                    j += 1;
                }
                let end = byte_at(j);
                if j == n {
                    spans.push((sentence_start, end));
                    start = None;
                    i = j;
                    continue;
                }
                if chars[j].1.is_whitespace() {
                    let mut k = j;
                    let mut newline = false;
                    while k < n && chars[k].1.is_whitespace() {
                        newline |= chars[k].1 == '\n';
                        k += 1;
                    }
                    if k == n {
                        spans.push((sentence_start, end));
                        start = None;
                        i = k;
                        continue;
                    }
                    let next = chars[k].1;
                    let opens = next.is_uppercase() || next.is_ascii_digit() || OPENERS.contains(&next);
                    let guarded = single_period && self.guards(text, sentence_start, pos);
                    if newline || (opens && !guarded) {
                        spans.push((sentence_start, end));
                        start = None;
                        i = k;
                        continue;
                    }
                }
                i = j;
                continue;
            }
            i += 1;
        }
        if let Some(s) = start {
            spans.push((s, trim_end(text, s, text.len())));
        }
        spans
    }

    /// Whether the period at byte `dot` closes an abbreviation or an initial.
    fn guards(&self, text: &str, sentence_start: usize, dot: usize) -> bool {
        let token_start = text[sentence_start..dot]
            .rfind(char::is_whitespace)
            .map(|p| sentence_start + p + 1)
            .unwrap_or(sentence_start);
        let token = text[token_start..=dot].trim_start_matches(OPENERS);
        let mut letters = token[..token.len() - 1].chars();
        if let (Some(first), None) = (letters.next(), letters.next()) {
            if first.is_uppercase() {
                return true;
            }
        }
        self.abbreviations.contains(&token.to_lowercase())
    }

    pub fn segment(&self, doc_id: &str, raw_text: &str) -> Vec<Sentence> {
        self.split(raw_text)
            .into_iter()
            .enumerate()
            .map(|(index, (s, e))| Sentence {
                doc_id: doc_id.to_string(),
                index,
                text: raw_text[s..e].to_string(),
                byte_span: (s, e),
                flags: SentenceFlags::default(),
            })
            .collect()
    }
}

fn trim_end(text: &str, start: usize, end: usize) -> usize {
    start + text[start..end].trim_end().len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(input: &str) -> Vec<String> {
        Segmenter::default()
            .split(input)
            .into_iter()
            .map(|(s, e)| input[s..e].to_string())
            .collect()
    }

    #[test]
    fn title_abbreviation_does_not_split() {
        assert_eq!(
            texts("Mr. Smith raised guidance. Revenue rose 5%."),
            vec!["Mr. Smith raised guidance.", "Revenue rose 5%."]
        );
    }

    #[test]
    fn decimal_stays_intact() {
        assert_eq!(
            texts("EPS was $1.25. Margins expanded."),
            vec!["EPS was $1.25.", "Margins expanded."]
        );
    }

    #[test]
    fn empty_and_whitespace_input() {
        assert!(texts("").is_empty());
        assert!(texts("  \n\t ").is_empty());
    }

    #[test]
    fn guarded_tokens() {
        assert_eq!(
            texts("Shipments to the U.S. Rose sharply. See www.example.com for details. Apple Inc. Reported 3%."),
            vec![
                "Shipments to the U.S. Rose sharply.",
                "See www.example.com for details.",
                "Apple Inc. Reported 3%."
            ]
        );
        assert_eq!(
            texts("Costs vs. Budget were flat, e.g. Labor. Results in Q3. Beat plan."),
            vec!["Costs vs. Budget were flat, e.g. Labor.", "Results in Q3. Beat plan."]
        );
        assert_eq!(
            texts("J. Smith spoke. Then we left."),
            vec!["J. Smith spoke.", "Then we left."]
        );
        assert_eq!(texts("Smith et al. Found this."), vec!["Smith et al. Found this."]);
    }

    #[test]
    fn other_terminators_and_quotes() {
        assert_eq!(
            texts("Is growth back? \"Yes,\" he said! (Really.) 2021 was good..."),
            vec!["Is growth back?", "\"Yes,\" he said!", "(Really.)", "2021 was good..."]
        );
    }

    #[test]
    fn lowercase_continuation_does_not_split() {
        assert_eq!(
            texts("Sales rose 3%. and then fell."),
            vec!["Sales rose 3%. and then fell."]
        );
    }

    #[test]
    fn line_breaks() {
        assert_eq!(
            texts("revenue was $5.\nwe expect 3%.\n\nheading without stop\nstill heading"),
            vec![
                "revenue was $5.",
                "we expect 3%.",
                "heading without stop\nstill heading"
            ]
        );
    }

    #[test]
    fn extra_abbreviations() {
        let seg = Segmenter::with_abbreviations(["Approx", "fy."]);
        let spans = seg.split("Growth of FY. Twenty was fine.");
        assert_eq!(spans.len(), 1);
        assert!(seg.is_abbreviation("approx."));
    }

    #[test]
    fn trailing_text_without_terminator() {
        assert_eq!(texts("One. Two  "), vec!["One.", "Two"]);
    }
}
