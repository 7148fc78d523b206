//! Suffix-stripping verb lemmatizer.
//!
//! Covers the inflections that matter to the labeling rules: regular `-s`,
//! `-ed` and `-ing` forms, plus an exception table for common irregular verbs.
//! Unknown words pass through unchanged.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

const IRREGULAR: &[(&str, &str)] = &[
    ("am", "be"),
    ("is", "be"),
    ("are", "be"),
    ("was", "be"),
    ("were", "be"),
    ("been", "be"),
    ("being", "be"),
    ("has", "have"),
    ("had", "have"),
    ("having", "have"),
    ("does", "do"),
    ("did", "do"),
    ("done", "do"),
    ("went", "go"),
    ("gone", "go"),
    ("made", "make"),
    ("saw", "see"),
    ("seen", "see"),
    ("grew", "grow"),
    ("grown", "grow"),
    ("rose", "rise"),
    ("risen", "rise"),
    ("fell", "fall"),
    ("fallen", "fall"),
    ("came", "come"),
    ("became", "become"),
    ("foresaw", "foresee"),
    ("foreseen", "foresee"),
    ("paid", "pay"),
    ("said", "say"),
    ("spent", "spend"),
    ("took", "take"),
    ("taken", "take"),
    ("gave", "give"),
    ("given", "give"),
    ("brought", "bring"),
    ("thought", "think"),
    ("built", "build"),
    ("sold", "sell"),
    ("bought", "buy"),
    ("held", "hold"),
    ("kept", "keep"),
    ("led", "lead"),
    ("met", "meet"),
    ("won", "win"),
    ("lost", "lose"),
    ("began", "begin"),
    ("begun", "begin"),
    ("knew", "know"),
    ("known", "know"),
    ("told", "tell"),
    ("felt", "feel"),
    ("left", "leave"),
    ("meant", "mean"),
    ("sought", "seek"),
    ("set", "set"),
    ("cut", "cut"),
    ("put", "put"),
    ("forecast", "forecast"),
    ("outgrew", "outgrow"),
    ("undertook", "undertake"),
];

/// Base forms used to choose between candidate stems (`anticipat` vs `anticipate`).
const KNOWN_BASES: &[&str] = &[
    "expect",
    "anticipate",
    "predict",
    "forecast",
    "envision",
    "contemplate",
    "project",
    "record",
    "declare",
    "estimate",
    "plan",
    "guide",
    "intend",
    "aim",
    "incur",
    "increase",
    "decrease",
    "decline",
    "grow",
    "reduce",
    "improve",
    "achieve",
    "deliver",
    "generate",
    "continue",
    "remain",
    "believe",
    "target",
    "raise",
    "lower",
    "change",
    "provide",
    "produce",
    "operate",
    "complete",
    "expand",
    "invest",
    "acquire",
    "close",
    "report",
    "use",
    "make",
    "drive",
    "factor",
    "see",
    "hope",
    "require",
    "exceed",
    "benefit",
    "impact",
    "result",
    "include",
    "hire",
    "create",
    "announce",
    "manage",
    "purchase",
    "repurchase",
    "issue",
    "outperform",
    "compare",
    "offset",
    "enter",
    "rise",
    "save",
    "realize",
    "assume",
    "tout",
    "entitle",
    "peg",
    "book",
    "post",
    "return",
    "earn",
    "gain",
    "lose",
    "narrow",
    "widen",
    "stabilize",
    "accelerate",
    "moderate",
    "recover",
    "rebound",
    "contribute",
    "add",
    "drop",
    "slow",
    "shrink",
    "double",
    "triple",
    "deploy",
    "launch",
    "position",
    "execute",
    "pursue",
    "plan",
    "prepare",
    "budget",
    "schedule",
    "commit",
    "pledge",
    "promise",
    "outline",
    "reiterate",
    "reaffirm",
    "update",
    "revise",
    "adjust",
    "set",
    "exceed",
    "surpass",
    "approach",
    "approve",
    "authorize",
    "allocate",
    "distribute",
    "pay",
    "fund",
    "finance",
    "borrow",
    "refinance",
    "reach",
    "total",
    "amount",
    "represent",
    "account",
    "comprise",
    "decide",
    "determine",
    "emerge",
    "evolve",
    "face",
    "foresee",
    "guarantee",
    "imagine",
    "indicate",
    "plateau",
    "prove",
    "recognize",
    "signal",
    "suggest",
    "sustain",
    "trend",
    "upgrade",
    "downgrade",
    "value",
    "weigh",
    "yield",
    "ramp",
    "ship",
    "stop",
    "occur",
    "prefer",
    "transfer",
    "admit",
    "omit",
    "permit",
    "refer",
];

fn irregular() -> &'static HashMap<&'static str, &'static str> {
    static TABLE: OnceLock<HashMap<&'static str, &'static str>> = OnceLock::new();
    TABLE.get_or_init(|| IRREGULAR.iter().copied().collect())
}

fn known_bases() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| KNOWN_BASES.iter().copied().collect())
}

/// Lemma of a single lower- or mixed-case word token.
///
/// Idempotent: `lemma(&lemma(w)) == lemma(w)` for every input.
pub fn lemma(token: &str) -> String {
    let word = token.to_lowercase();
    let once = reduce(&word);
    if once == word || reduce(&once) == once {
        once
    } else {
        // A reduction that would keep reducing is not trusted.
        word
    }
}

fn reduce(word: &str) -> String {
    if let Some(base) = irregular().get(word) {
        return (*base).to_string();
    }
    if word.len() < 4 || !word.chars().all(|c| c.is_alphabetic() || c == '\'') {
        return word.to_string();
    }
    if let Some(stem) = word.strip_suffix("'s").or_else(|| word.strip_suffix("\u{2019}s")) {
        return stem.to_string();
    }
    if word.contains('\'') {
        return word.to_string();
    }

    if word.len() >= 5 {
        if let Some(stem) = word.strip_suffix("ies").or_else(|| word.strip_suffix("ied")) {
            return format!("{stem}y");
        }
    }
    if let Some(stem) = word.strip_suffix("ing") {
        if stem.len() >= 3 && stem.chars().any(is_vowel) {
            return resolve_stem(stem);
        }
        return word.to_string();
    }
    if let Some(stem) = word.strip_suffix("ed") {
        if stem.len() >= 3 && stem.chars().any(is_vowel) {
            if stem.ends_with('e') && !known_bases().contains(stem) {
                // "speed", "agreed": too ambiguous to strip.
                return word.to_string();
            }
            return resolve_stem(stem);
        }
        return word.to_string();
    }
    for sibilant in ["sses", "shes", "ches", "xes", "zes"] {
        if word.ends_with(sibilant) {
            return word[..word.len() - 2].to_string();
        }
    }
    if word.ends_with('s') && !word.ends_with("ss") && !word.ends_with("us") && !word.ends_with("is") {
        return word[..word.len() - 1].to_string();
    }
    word.to_string()
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

fn resolve_stem(stem: &str) -> String {
    let bases = known_bases();
    if bases.contains(stem) {
        return stem.to_string();
    }
    let with_e = format!("{stem}e");
    if bases.contains(with_e.as_str()) {
        return with_e;
    }
    let bytes = stem.as_bytes();
    let last = bytes[bytes.len() - 1];
    let doubled = bytes.len() >= 2 && last == bytes[bytes.len() - 2] && !is_vowel(last as char);
    if doubled {
        let single = &stem[..stem.len() - 1];
        if bases.contains(single) || !matches!(last, b'l' | b's' | b'z') {
            return single.to_string();
        }
        return stem.to_string();
    }
    if stem.ends_with("at")
        || stem.ends_with("iz")
        || stem.ends_with("bl")
        || stem.ends_with('v')
        || stem.ends_with('c')
    {
        return with_e;
    }
    stem.to_string()
}
