//! Engine configuration file and the resolved engine built from it.

use std::path::{Path, PathBuf};

use claimforge_core::corpus::{default_dictionary, load_dictionary, load_word_list, TermSet};
use claimforge_core::sentiment::SentimentLexicon;
use claimforge_core::textproc::{FilterToggles, NumericFilter, Segmenter, TextPipeline, DEFAULT_CURRENCY_SYMBOLS};
use claimforge_core::weaklabel::{Aggregator, RuleSet};
use serde::Deserialize;

use crate::error::CliError;

pub const THREADS_ENV: &str = "CLAIMFORGE_THREADS";

/// Contents of the TOML config file. Relative paths resolve against the
/// directory holding the file.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EngineConfig {
    pub dictionary: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub abbreviations: Option<PathBuf>,
    pub positive_words: Option<PathBuf>,
    pub negative_words: Option<PathBuf>,
    pub currency_symbols: Option<Vec<String>>,
    #[serde(default)]
    pub filter: FilterSection,
    #[serde(default)]
    pub aggregator: Aggregator,
    pub threads: Option<usize>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    20240607
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FilterSection {
    #[serde(default = "yes")]
    pub numeric: bool,
    #[serde(default = "yes")]
    pub financial: bool,
}

fn yes() -> bool {
    true
}

impl Default for FilterSection {
    fn default() -> Self {
        FilterSection {
            numeric: true,
            financial: true,
        }
    }
}

impl EngineConfig {
    pub fn defaults() -> Self {
        EngineConfig {
            seed: default_seed(),
            ..EngineConfig::default()
        }
    }

    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, CliError> {
        let mut config: EngineConfig =
            toml::from_str(text).map_err(|e| CliError::config(format!("invalid config: {e}")))?;
        for path in [
            &mut config.dictionary,
            &mut config.rules,
            &mut config.abbreviations,
            &mut config.positive_words,
            &mut config.negative_words,
        ]
        .into_iter()
        .flatten()
        {
            if path.is_relative() {
                *path = base_dir.join(&*path);
            }
        }
        config.check_paths()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_toml(&text, base)
    }

    fn check_paths(&self) -> Result<(), CliError> {
        let named = [
            ("dictionary", &self.dictionary),
            ("rules", &self.rules),
            ("abbreviations", &self.abbreviations),
            ("positive_words", &self.positive_words),
            ("negative_words", &self.negative_words),
        ];
        for (name, path) in named {
            if let Some(p) = path {
                if !p.is_file() {
                    return Err(CliError::config(format!("{name}: {} does not exist", p.display())));
                }
            }
        }
        if self.positive_words.is_some() != self.negative_words.is_some() {
            return Err(CliError::config(
                "positive_words and negative_words must be given together",
            ));
        }
        if self.threads == Some(0) {
            return Err(CliError::config("threads must be at least 1"));
        }
        Ok(())
    }

    /// Worker count: the environment variable wins over the file, default 1.
    pub fn thread_count(&self) -> Result<usize, CliError> {
        match std::env::var(THREADS_ENV) {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(n) if n > 0 => Ok(n),
                _ => Err(CliError::config(format!(
                    "{THREADS_ENV}={v:?} is not a positive integer"
                ))),
            },
            Err(_) => Ok(self.threads.unwrap_or(1)),
        }
    }

    fn currency(&self) -> Result<Vec<char>, CliError> {
        match &self.currency_symbols {
            None => Ok(DEFAULT_CURRENCY_SYMBOLS.to_vec()),
            Some(list) => list
                .iter()
                .map(|s| {
                    let mut chars = s.chars();
                    match (chars.next(), chars.next()) {
                        (Some(c), None) => Ok(c),
                        _ => Err(CliError::config(format!("currency symbol {s:?} must be one character"))),
                    }
                })
                .collect(),
        }
    }

    pub fn build(&self) -> Result<Engine, CliError> {
        let terms = match &self.dictionary {
            Some(p) => load_dictionary(p)?,
            None => default_dictionary(),
        };
        let rules = match &self.rules {
            Some(p) => RuleSet::load(p)?,
            None => RuleSet::default_rules(),
        };
        let segmenter = match &self.abbreviations {
            Some(p) => Segmenter::with_abbreviations(load_word_list(p)?),
            None => Segmenter::default(),
        };
        let lexicon = match (&self.positive_words, &self.negative_words) {
            (Some(p), Some(n)) => SentimentLexicon::new(load_word_list(p)?, load_word_list(n)?)?,
            _ => SentimentLexicon::default_lexicon(),
        };
        let mut text = TextPipeline::new(&terms);
        text.segmenter = segmenter;
        text.numeric = NumericFilter::new(self.currency()?);
        text.toggles = FilterToggles {
            numeric: self.filter.numeric,
            financial: self.filter.financial,
        };
        Ok(Engine {
            terms,
            text,
            rules,
            lexicon,
            aggregator: self.aggregator,
            threads: self.thread_count()?,
            seed: self.seed,
        })
    }
}

/// Everything a command needs, loaded once.
#[derive(Debug, Clone)]
pub struct Engine {
    pub terms: TermSet,
    pub text: TextPipeline,
    pub rules: RuleSet,
    pub lexicon: SentimentLexicon,
    pub aggregator: Aggregator,
    pub threads: usize,
    pub seed: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paths_resolve_against_config_dir() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("dict.txt"), "revenue\n").unwrap();
        let cfg = EngineConfig::from_toml(
            "dictionary = \"dict.txt\"\naggregator = \"majority\"\nthreads = 2\n[filter]\nfinancial = false\n",
            dir.path(),
        )
        .unwrap();
        assert_eq!(cfg.dictionary.as_deref(), Some(dir.path().join("dict.txt").as_path()));
        assert_eq!(cfg.aggregator, Aggregator::Majority);
        assert!(cfg.filter.numeric && !cfg.filter.financial);
        let engine = cfg.build().unwrap();
        assert_eq!(engine.terms.len(), 1);
    }

    #[test]
    fn missing_dictionary_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = EngineConfig::from_toml("dictionary = \"nope.txt\"", dir.path()).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("nope.txt"));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_symbols() {
        let dir = tempfile::tempdir().unwrap();
        assert!(EngineConfig::from_toml("dictonary = \"x\"", dir.path()).is_err());
        let cfg = EngineConfig::from_toml("currency_symbols = [\"US$\"]", dir.path()).unwrap();
        assert!(cfg.build().is_err());
    }
}
