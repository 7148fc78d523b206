use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Vote;
use crate::error::{Error, Result};
use crate::textproc::{lemma, pos_of_project, words, PosCall};

/// The shipped rule file.
pub const DEFAULT_RULES_JSON: &str = include_str!("../../data/rules.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detector {
    Phrase,
    LemmaWord,
    PosProject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchScope {
    Anywhere,
    #[default]
    TokenBoundary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSpec {
    pub rule_id: String,
    pub detector: Detector,
    #[serde(default)]
    pub patterns: Vec<String>,
    pub emit: Vote,
    #[serde(default)]
    pub match_scope: MatchScope,
}

impl RuleSpec {
    fn validate(&self) -> Result<()> {
        if self.rule_id.trim().is_empty() {
            return Err(Error::invalid("rule", "empty rule_id"));
        }
        if self.emit == Vote::Abstain {
            return Err(Error::invalid(
                "rule",
                format!("{} emits 0; rules abstain implicitly", self.rule_id),
            ));
        }
        let blank = self.patterns.iter().any(|p| p.trim().is_empty());
        if self.detector != Detector::PosProject && (self.patterns.is_empty() || blank) {
            return Err(Error::invalid(
                "rule",
                format!("{} needs non-empty patterns", self.rule_id),
            ));
        }
        Ok(())
    }

    pub fn is_out_of_claim(&self) -> bool {
        self.emit == Vote::OutStrong
    }
}

/// A rule with its patterns normalized for matching.
#[derive(Debug, Clone)]
struct CompiledRule {
    detector: Detector,
    emit: Vote,
    /// (lower-cased pattern, require word boundaries)
    phrases: Vec<(String, bool)>,
    lemmas: Vec<String>,
}

impl CompiledRule {
    fn new(spec: &RuleSpec) -> Self {
        let phrases = spec
            .patterns
            .iter()
            .map(|p| {
                let p = p.trim().to_lowercase();
                let single_word = p.chars().all(char::is_alphabetic);
                let bounded = single_word || spec.match_scope == MatchScope::TokenBoundary;
                (p, bounded)
            })
            .collect();
        let lemmas = spec.patterns.iter().map(|p| lemma(p.trim())).collect();
        CompiledRule {
            detector: spec.detector,
            emit: spec.emit,
            phrases,
            lemmas,
        }
    }

    fn apply(&self, sentence: &AnalyzedSentence) -> Vote {
        let hit = match self.detector {
            Detector::Phrase => self
                .phrases
                .iter()
                .any(|(p, bounded)| contains_phrase(&sentence.lower, p, *bounded)),
            Detector::LemmaWord => sentence.lemmas.iter().any(|l| self.lemmas.iter().any(|p| p == l)),
            Detector::PosProject => sentence.project_verb,
        };
        if hit {
            self.emit
        } else {
            Vote::Abstain
        }
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Case-folded substring search; `bounded` additionally requires word edges
/// wherever the pattern itself starts or ends with a word character.
fn contains_phrase(haystack: &str, pattern: &str, bounded: bool) -> bool {
    if !bounded {
        return haystack.contains(pattern);
    }
    let starts_word = pattern.chars().next().is_some_and(is_word_char);
    let ends_word = pattern.chars().next_back().is_some_and(is_word_char);
    haystack.match_indices(pattern).any(|(start, m)| {
        let before_ok = !starts_word || !haystack[..start].chars().next_back().is_some_and(is_word_char);
        let after_ok = !ends_word || !haystack[start + m.len()..].chars().next().is_some_and(is_word_char);
        before_ok && after_ok
    })
}

/// Per-sentence features shared by all rules.
#[derive(Debug, Clone)]
pub struct AnalyzedSentence {
    pub lower: String,
    pub lemmas: Vec<String>,
    pub project_verb: bool,
}

impl AnalyzedSentence {
    pub fn new(text: &str) -> Self {
        let lower = text.to_lowercase();
        let tokens = words(&lower);
        let lemmas: Vec<String> = tokens.iter().map(|t| lemma(t)).collect();
        let project_verb = lemmas
            .iter()
            .enumerate()
            .any(|(i, l)| l == "project" && matches!(pos_of_project(&tokens, i), Ok(PosCall::VerbLike)));
        AnalyzedSentence {
            lower,
            lemmas,
            project_verb,
        }
    }
}

/// An ordered, validated collection of labeling rules.
#[derive(Debug, Clone)]
pub struct RuleSet {
    specs: Vec<RuleSpec>,
    compiled: Vec<CompiledRule>,
}

impl RuleSet {
    pub fn new(specs: Vec<RuleSpec>) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::invalid("rule set", "no rules"));
        }
        let mut ids = HashSet::new();
        for spec in &specs {
            spec.validate()?;
            if !ids.insert(spec.rule_id.as_str()) {
                return Err(Error::Duplicate {
                    key: format!("rule_id {}", spec.rule_id),
                });
            }
        }
        let compiled = specs.iter().map(CompiledRule::new).collect();
        Ok(RuleSet { specs, compiled })
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let specs: Vec<RuleSpec> =
            serde_json::from_str(json).map_err(|e| Error::invalid("rules file", e.to_string()))?;
        RuleSet::new(specs)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let json = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RuleSet::from_json(&json)
    }

    pub fn default_rules() -> Self {
        RuleSet::from_json(DEFAULT_RULES_JSON).expect("shipped rules are valid")
    }

    pub fn specs(&self) -> &[RuleSpec] {
        &self.specs
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    /// Rules restricted to the given positions, in the given order.
    pub fn subset(&self, positions: &[usize]) -> Result<Self> {
        RuleSet::new(positions.iter().map(|&i| self.specs[i].clone()).collect())
    }

    pub fn votes(&self, sentence: &AnalyzedSentence) -> Vec<Vote> {
        self.compiled.iter().map(|r| r.apply(sentence)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.specs).expect("rules serialize")
    }
}

pub fn apply_rule(rule: &RuleSpec, text: &str) -> Vote {
    CompiledRule::new(rule).apply(&AnalyzedSentence::new(text))
}

/// One vote per rule, in rule order.
pub fn vote_vector(text: &str, rules: &RuleSet) -> Vec<Vote> {
    rules.votes(&AnalyzedSentence::new(text))
}
