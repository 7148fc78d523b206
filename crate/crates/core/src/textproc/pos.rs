//! Verb/noun disambiguation for the word "project".
//!
//! Full POS tagging is not needed by any labeling rule except the one keyed
//! on "project", so this is a small context heuristic rather than a tagger.

use serde::{Deserialize, Serialize};

use super::lemma::lemma;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PosCall {
    VerbLike,
    NonVerb,
}

const VERB_MARKERS: &[&str] = &[
    "will", "would", "may", "might", "can", "could", "should", "shall", "must", "to",
];

const SUBJECTS: &[&str] = &[
    "i",
    "we",
    "you",
    "they",
    "he",
    "she",
    "it",
    "management",
    "we'll",
    "they'll",
    "we'd",
    "they'd",
    "i'll",
    "we're",
    "they're",
];

const ADVERBS: &[&str] = &[
    "now",
    "also",
    "currently",
    "still",
    "further",
    "not",
    "really",
    "just",
    "already",
    "again",
    "therefore",
    "thus",
    "conservatively",
    "broadly",
    "generally",
    "continue",
    "do",
    "don't",
    "cannot",
    "can't",
    "won't",
    "now,",
    "again,",
];

const DETERMINERS: &[&str] = &[
    "the", "a", "an", "this", "that", "these", "those", "each", "every", "any", "some", "no", "another", "our",
    "their", "its", "his", "her", "my", "your", "whose", "several", "many", "few", "various", "both", "all", "other",
    "such",
];

const PREPOSITIONS: &[&str] = &[
    "of", "in", "on", "for", "with", "from", "by", "at", "into", "about", "per", "under", "over", "through", "across",
    "during", "without", "within", "between", "among", "after", "before", "via", "and", "or",
];

const MODIFIERS: &[&str] = &[
    "new", "major", "large", "big", "key", "pilot", "first", "second", "third", "last", "next", "single", "joint",
    "main", "current", "previous", "prior", "flagship", "largest", "biggest", "one", "two", "three", "four", "five",
    "six", "seven", "eight", "nine", "ten", "dozen",
];

/// Tokens that commonly follow a verb "project(s)" (its object or complement).
const OBJECT_STARTS: &[&str] = &[
    "a",
    "an",
    "the",
    "that",
    "revenue",
    "revenues",
    "sales",
    "earnings",
    "growth",
    "margin",
    "margins",
    "income",
    "eps",
    "cash",
    "demand",
    "costs",
    "capital",
    "free",
    "operating",
    "net",
    "gross",
    "total",
    "roughly",
    "approximately",
    "about",
    "similar",
    "stronger",
    "weaker",
    "stable",
    "higher",
    "lower",
    "modest",
    "double",
    "low",
    "high",
    "mid",
];

/// Tokens that commonly follow a noun "projects".
const NOUN_FOLLOWERS: &[&str] = &[
    "were",
    "are",
    "was",
    "is",
    "have",
    "had",
    "has",
    "will",
    "would",
    "in",
    "of",
    "for",
    "and",
    "or",
    "with",
    "to",
    "that",
    "which",
    "account",
    "worth",
    "totaling",
    "including",
    "such",
    "like",
    "earned",
    "generated",
    "contributed",
    "delivered",
    "added",
    "returned",
    "cost",
    "costs",
];

fn is_number_like(token: &str) -> bool {
    token.chars().next().is_some_and(|c| c.is_ascii_digit() || c == '$')
}

/// Classifies the "project" token at `position` in lower-cased `tokens`.
pub fn pos_of_project(tokens: &[&str], position: usize) -> Result<PosCall> {
    let surface = tokens
        .get(position)
        .ok_or_else(|| Error::invalid("token position", format!("{position} out of range")))?
        .to_lowercase();
    if lemma(&surface) != "project" {
        return Err(Error::invalid(
            "token position",
            format!("{surface:?} does not lemmatize to \"project\""),
        ));
    }
    if matches!(surface.as_str(), "projected" | "projecting") {
        return Ok(PosCall::VerbLike);
    }

    let prev = tokens[..position]
        .iter()
        .rev()
        .map(|t| t.to_lowercase())
        .find(|t| !ADVERBS.contains(&t.as_str()));
    let next = tokens.get(position + 1).map(|t| t.to_lowercase());
    let Some(prev) = prev else {
        return Ok(PosCall::NonVerb);
    };
    let prev = prev.as_str();

    if VERB_MARKERS.contains(&prev) || SUBJECTS.contains(&prev) {
        return Ok(PosCall::VerbLike);
    }
    if DETERMINERS.contains(&prev)
        || PREPOSITIONS.contains(&prev)
        || MODIFIERS.contains(&prev)
        || is_number_like(prev)
        || prev.ends_with("est")
    {
        return Ok(PosCall::NonVerb);
    }

    let next = next.as_deref();
    let takes_object = next.is_some_and(|n| OBJECT_STARTS.contains(&n) || is_number_like(n));
    if surface == "projects" {
        // Singular subject + third-person verb, unless the continuation reads as a noun phrase.
        if next.is_some_and(|n| NOUN_FOLLOWERS.contains(&n)) && !takes_object {
            return Ok(PosCall::NonVerb);
        }
        return Ok(PosCall::VerbLike);
    }
    // Bare "project" after a content word: a plural subject with an object reads as a verb,
    // anything else as a noun compound ("infrastructure project").
    let plural_subject = prev.ends_with('s') && !prev.ends_with("ss");
    if plural_subject && takes_object {
        Ok(PosCall::VerbLike)
    } else {
        Ok(PosCall::NonVerb)
    }
}
