use std::io::Write;

use chrono::NaiveDate;
use claimforge_core::corpus::{load_documents, write_documents_jsonl, Document, DocumentFormat, Sector, SourceKind};
use claimforge_core::textproc::{is_numeric_sentence, lemma, pos_of_project, segment, words, PosCall, Segmenter};
use proptest::prelude::*;

fn document() -> impl Strategy<Value = Document> {
    (
        "[a-z0-9]{1,8}",
        prop::bool::ANY,
        "[A-Z]{1,5}",
        prop::option::of(1u8..=12),
        0u32..3000,
        "[A-Za-z][A-Za-z0-9 .,$%!?\"'\n]{0,60}",
    )
        .prop_map(|(id, call, ticker, sector, days, text)| Document {
            doc_id: id,
            source_kind: if call {
                SourceKind::EarningsCall
            } else {
                SourceKind::AnalystReport
            },
            ticker,
            sector: sector.map(Sector::Known).unwrap_or(Sector::Unknown),
            period: NaiveDate::from_ymd_opt(2015, 1, 1).unwrap() + chrono::Days::new(days as u64),
            raw_text: text,
        })
}

fn unique_docs() -> impl Strategy<Value = Vec<Document>> {
    prop::collection::vec(document(), 0..12).prop_map(|mut docs| {
        docs.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        docs.dedup_by(|a, b| a.doc_id == b.doc_id);
        docs
    })
}

fn write_jsonl(docs: &[Document]) -> tempfile::NamedTempFile {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write_documents_jsonl(docs, &mut file).unwrap();
    file.flush().unwrap();
    file
}

proptest! {
    #[test]
    fn jsonl_round_trip(docs in unique_docs()) {
        let file = write_jsonl(&docs);
        let loaded = load_documents(file.path(), DocumentFormat::Jsonl).unwrap();
        prop_assert_eq!(&loaded, &docs);
        let again = write_jsonl(&loaded);
        prop_assert_eq!(std::fs::read(file.path()).unwrap(), std::fs::read(again.path()).unwrap());
    }

    #[test]
    fn loading_ignores_input_order(docs in unique_docs(), seed in any::<u64>()) {
        let mut shuffled = docs.clone();
        let n = shuffled.len();
        for i in (1..n).rev() {
            let j = (seed.wrapping_mul(6364136223846793005).wrapping_add(i as u64) % (i as u64 + 1)) as usize;
            shuffled.swap(i, j);
        }
        let a = load_documents(write_jsonl(&docs).path(), DocumentFormat::Jsonl).unwrap();
        let b = load_documents(write_jsonl(&shuffled).path(), DocumentFormat::Jsonl).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn segments_partition_the_text(text in "[A-Za-z0-9 .!?,$%\"'()\n]{0,200}") {
        let spans = Segmenter::default().split(&text);
        let mut cursor = 0;
        for &(start, end) in &spans {
            prop_assert!(start < end);
            prop_assert!(start >= cursor);
            prop_assert!(text[cursor..start].trim().is_empty(), "dropped text between spans");
            let piece = &text[start..end];
            prop_assert_eq!(piece.trim(), piece);
            cursor = end;
        }
        prop_assert!(text[cursor..].trim().is_empty());
    }

    #[test]
    fn sentence_indices_and_spans_are_consistent(doc in document()) {
        let sentences = segment(&doc);
        for (i, s) in sentences.iter().enumerate() {
            prop_assert_eq!(s.index, i);
            prop_assert_eq!(&doc.raw_text[s.byte_span.0..s.byte_span.1], s.text.as_str());
            prop_assert_eq!(&s.doc_id, &doc.doc_id);
        }
    }

    #[test]
    fn dollar_amounts_are_numeric(prefix in "[a-z ]{0,30}", n in 0u64..1_000_000, suffix in "[a-z ]{0,30}") {
        let text = format!("{prefix} ${n} {suffix}");
        prop_assert!(is_numeric_sentence(&text));
        let pct = format!("{prefix} {n}% {suffix}");
        prop_assert!(is_numeric_sentence(&pct));
    }

    #[test]
    fn letters_only_are_never_numeric(text in "[a-zA-Z ,.]{0,80}") {
        prop_assert!(!is_numeric_sentence(&text));
    }

    #[test]
    fn lemma_is_idempotent(word in "[a-z]{1,14}") {
        let once = lemma(&word);
        prop_assert_eq!(lemma(&once), once.clone());
    }
}

#[test]
fn project_heuristic_accuracy_on_labeled_usages() {
    let data = include_str!("data/project_pos.tsv");
    let (mut total, mut correct) = (0, 0);
    let mut misses = Vec::new();
    for line in data.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let (label, sentence) = line.split_once('\t').unwrap();
        let lower = sentence.to_lowercase();
        let tokens = words(&lower);
        let pos = tokens.iter().position(|t| lemma(t) == "project").unwrap();
        let expected = if label == "verb" {
            PosCall::VerbLike
        } else {
            PosCall::NonVerb
        };
        total += 1;
        if pos_of_project(&tokens, pos).unwrap() == expected {
            correct += 1;
        } else {
            misses.push(sentence);
        }
    }
    assert!(total >= 50);
    let accuracy = correct as f64 / total as f64;
    assert!(accuracy >= 0.9, "accuracy {accuracy}; misses: {misses:#?}");
}
