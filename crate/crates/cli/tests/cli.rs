use std::path::{Path, PathBuf};
use std::process::Command;

use chrono::{Datelike, NaiveDate};
use claimforge::bench::run_bench;
use claimforge::config::EngineConfig;
use claimforge_core::corpus::{curated_gold, write_documents_jsonl, Document, Sector, SourceKind};
use claimforge_core::synth::bench_corpus;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_claimforge"));
    cmd.env_remove("CLAIMFORGE_THREADS");
    cmd
}

fn run(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn doc(id: &str, ticker: &str, date: NaiveDate, text: &str) -> Document {
    Document {
        doc_id: id.into(),
        source_kind: SourceKind::EarningsCall,
        ticker: ticker.into(),
        sector: Sector::Unknown,
        period: date,
        raw_text: text.into(),
    }
}

fn write_docs(dir: &Path, docs: &[Document]) -> PathBuf {
    let path = dir.join("documents.jsonl");
    write_documents_jsonl(docs, std::fs::File::create(&path).unwrap()).unwrap();
    path
}

fn prompt_document() -> Document {
    let text: Vec<String> = curated_gold()[..6].iter().map(|g| g.text.clone()).collect();
    doc(
        "prompts",
        "PRM",
        NaiveDate::from_ymd_opt(2023, 2, 1).unwrap(),
        &text.join("\n"),
    )
}

fn read_lines(path: PathBuf) -> Vec<serde_json::Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn pipeline_labels_prompt_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let docs = write_docs(dir.path(), &[prompt_document()]);
    let out = dir.path().join("out");
    let (code, err) = run(&[
        "pipeline",
        "--documents",
        docs.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let preds = read_lines(out.join("predictions.jsonl"));
    let labels: Vec<&str> = preds.iter().map(|p| p["label"].as_str().unwrap()).collect();
    assert_eq!(
        labels,
        [
            "OUTOFCLAIM",
            "OUTOFCLAIM",
            "OUTOFCLAIM",
            "INCLAIM",
            "INCLAIM",
            "INCLAIM"
        ]
    );
    assert!(preds[0]["votes"].as_array().unwrap().iter().any(|v| v == -1));
    for name in [
        "sentences.jsonl",
        "optimism.csv",
        "doc_optimism.csv",
        "events.csv",
        "filter_stats.json",
        "report.md",
    ] {
        assert!(out.join(name).is_file(), "{name}");
    }
    let events = std::fs::read_to_string(out.join("events.csv")).unwrap();
    assert_eq!(events, "key,ticker,event_date\nPRM:2023Q1,PRM,2023-02-01\n");
}

#[test]
fn empty_corpus_gives_empty_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let docs = dir.path().join("empty.jsonl");
    std::fs::write(&docs, "").unwrap();
    let out = dir.path().join("out");
    let (code, err) = run(&[
        "pipeline",
        "--documents",
        docs.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(std::fs::read_to_string(out.join("predictions.jsonl")).unwrap(), "");
    assert_eq!(std::fs::read_to_string(out.join("sentences.jsonl")).unwrap(), "");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = dir.path().join("engine.toml");
    std::fs::write(&cfg, "dictionary = \"missing.txt\"\n").unwrap();
    let docs = write_docs(dir.path(), &[prompt_document()]);
    let (code, err) = run(&[
        "pipeline",
        "--config",
        cfg.to_str().unwrap(),
        "--documents",
        docs.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 1, "{err}");
    assert!(err.contains("missing.txt"));

    assert_eq!(run(&["no-such-command"]).0, 1);
    assert_eq!(run(&["--help"]).0, 0);

    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"doc_id\": \"a\"}\n").unwrap();
    let (code, err) = run(&[
        "segment",
        "--documents",
        bad.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains(":1:"), "{err}");

    let (code, _) = run(&[
        "segment",
        "--documents",
        "/nonexistent/docs.jsonl",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);

    let (code, _) = bin()
        .env("CLAIMFORGE_THREADS", "zero")
        .args([
            "segment",
            "--documents",
            docs.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .map(|o| (o.status.code().unwrap(), ()))
        .unwrap();
    assert_eq!(code, 1);
}

#[test]
fn evaluate_identical_predictions_scores_one() {
    let dir = tempfile::tempdir().unwrap();
    let docs = write_docs(dir.path(), &[prompt_document()]);
    let out = dir.path().join("out");
    let (code, err) = run(&[
        "label",
        "--documents",
        docs.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let mut gold = String::from("doc_id,sentence_index,label\n");
    for p in read_lines(out.join("predictions.jsonl")) {
        gold.push_str(&format!(
            "{},{},{}\n",
            p["doc_id"].as_str().unwrap(),
            p["sentence_index"],
            p["label"].as_str().unwrap()
        ));
    }
    let gold_path = dir.path().join("gold.csv");
    std::fs::write(&gold_path, gold).unwrap();
    let eval_out = dir.path().join("eval");
    let (code, err) = run(&[
        "evaluate",
        "--predictions",
        out.join("predictions.jsonl").to_str().unwrap(),
        "--gold",
        gold_path.to_str().unwrap(),
        "--out",
        eval_out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let mut reader = csv::Reader::from_path(eval_out.join("metrics.csv")).unwrap();
    let headers = reader.headers().unwrap().clone();
    let row = reader.records().next().unwrap().unwrap();
    let f1 = row.get(headers.iter().position(|h| h == "f1").unwrap()).unwrap();
    assert_eq!(f1.parse::<f64>().unwrap(), 1.0);
}

#[test]
fn ablate_emits_one_row_per_in_claim_rule() {
    let dir = tempfile::tempdir().unwrap();
    let gold = dir.path().join("gold.tsv");
    std::fs::write(&gold, claimforge_core::corpus::CURATED_GOLD_TSV).unwrap();
    let out = dir.path().join("out");
    let (code, err) = run(&[
        "ablate",
        "--gold-sentences",
        gold.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let rows = csv::Reader::from_path(out.join("ablation.csv"))
        .unwrap()
        .records()
        .count();
    let in_rules = claimforge_core::weaklabel::RuleSet::default_rules()
        .specs()
        .iter()
        .filter(|s| !s.is_out_of_claim())
        .count();
    assert_eq!(rows, in_rules);
}

#[test]
fn synthetic_backtest_accuracy() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let (code, err) = run(&["backtest", "--synthetic", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let confusion = std::fs::read_to_string(out.join("confusion.csv")).unwrap();
    let last = confusion.lines().last().unwrap();
    let acc: f64 = last.rsplit(',').next().unwrap().parse().unwrap();
    assert!((0.78..=0.84).contains(&acc), "{confusion}");
    assert!(last.starts_with("all,accuracy,10000,"));

    // the generated inputs replay through the file-based path
    let replay = dir.path().join("replay");
    let (code, err) = run(&[
        "backtest",
        "--optimism",
        out.join("optimism.csv").to_str().unwrap(),
        "--outcomes",
        out.join("outcomes.csv").to_str().unwrap(),
        "--train",
        "2010Q1..2011Q4",
        "--test",
        "2012Q1..2016Q4",
        "--out",
        replay.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(
        std::fs::read(out.join("trades.csv")).unwrap(),
        std::fs::read(replay.join("trades.csv")).unwrap()
    );
}

/// Small market with three firms over two years of weekday trading.
fn market_fixture(dir: &Path) -> (PathBuf, PathBuf, PathBuf, PathBuf) {
    let start = NaiveDate::from_ymd_opt(2019, 1, 1).unwrap();
    let mut days = Vec::new();
    let mut d = start;
    while days.len() < 520 {
        if d.weekday().number_from_monday() <= 5 {
            days.push(d);
        }
        d = d.succ_opt().unwrap();
    }
    let tickers = ["AAA", "BBB", "CCC"];
    let mut prices = String::from("ticker,date,close\n");
    let mut index = String::from("date,close\n");
    for (i, day) in days.iter().enumerate() {
        index.push_str(&format!(
            "{day},{:.4}\n",
            3000.0 + (i as f64 * 0.37).sin() * 40.0 + i as f64
        ));
    }
    for (t, ticker) in tickers.iter().enumerate() {
        for (i, day) in days.iter().enumerate() {
            let close = 50.0 + 10.0 * t as f64 + (i as f64 * (0.11 + t as f64 * 0.05)).sin() * 5.0 + i as f64 * 0.02;
            prices.push_str(&format!("{ticker},{day},{close:.4}\n"));
        }
    }
    let phrases = [
        "We expect revenue of ${n} million next year.",
        "Revenue was ${n} million, up {p}% with strong growth.",
        "We anticipate weak demand and a loss of ${n} million.",
        "Gross margin improved to {p}% on record profit.",
    ];
    let mut docs = Vec::new();
    let mut eps = String::from("ticker,period_end,actual_eps,median_forecast_eps,quarter_end_price\n");
    for (t, ticker) in tickers.iter().enumerate() {
        for q in 0..6u32 {
            let month = 1 + 3 * (q % 4);
            let year = 2019 + (q / 4) as i32;
            let date = NaiveDate::from_ymd_opt(year, month + 1, 10).unwrap();
            let (q, t) = (q as usize, t);
            let text: Vec<String> = (0..3 + (q + 2 * t) % 3)
                .map(|k| {
                    phrases[(k * k + 3 * q + 5 * t) % 4]
                        .replace("{n}", &(10 + k * 7 + t).to_string())
                        .replace("{p}", &(3 + k + q).to_string())
                })
                .collect();
            docs.push(doc(&format!("{ticker}-{year}-{month}"), ticker, date, &text.join(" ")));
            let end_month = month + 2;
            let end = NaiveDate::from_ymd_opt(year, end_month, if end_month == 6 || end_month == 9 { 30 } else { 31 })
                .unwrap();
            let actual = 1.0 + 0.1 * ((q + t) % 3) as f64;
            eps.push_str(&format!("{ticker},{end},{actual:.2},1.05,{:.1}\n", 40.0 + t as f64));
        }
    }
    let docs_path = write_docs(dir, &docs);
    let p = dir.join("prices.csv");
    let i = dir.join("index.csv");
    let e = dir.join("eps.csv");
    std::fs::write(&p, prices).unwrap();
    std::fs::write(&i, index).unwrap();
    std::fs::write(&e, eps).unwrap();
    (docs_path, p, i, e)
}

#[test]
fn study_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let (docs, prices, index, eps) = market_fixture(dir.path());
    let out = dir.path().join("pipe");
    let (code, err) = run(&[
        "pipeline",
        "--documents",
        docs.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let study = dir.path().join("study");
    let (code, err) = run(&[
        "study",
        "--optimism",
        out.join("optimism.csv").to_str().unwrap(),
        "--eps",
        eps.to_str().unwrap(),
        "--prices",
        prices.to_str().unwrap(),
        "--index",
        index.to_str().unwrap(),
        "--events",
        out.join("events.csv").to_str().unwrap(),
        "--subset-optimism",
        out.join("subset_optimism.csv").to_str().unwrap(),
        "--subset-sizes",
        out.join("subset_sizes.csv").to_str().unwrap(),
        "--out",
        study.to_str().unwrap(),
    ]);
    assert_eq!(
        code,
        0,
        "{err}\n{}",
        std::fs::read_to_string(out.join("optimism.csv")).unwrap()
    );
    let table = std::fs::read_to_string(study.join("regression_table.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(
        lines.next().unwrap(),
        "outcome,alpha,beta,se_alpha,se_beta,t_beta,p_beta,n,stars"
    );
    let outcomes: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(outcomes, ["surprise", "car_2_30", "car_2_60"]);
    let adjusted = csv::Reader::from_path(study.join("adjusted_betas.csv"))
        .unwrap()
        .records()
        .count();
    assert!(adjusted > 0);

    let bt = dir.path().join("bt");
    let (code, err) = run(&[
        "backtest",
        "--optimism",
        out.join("optimism.csv").to_str().unwrap(),
        "--prices",
        prices.to_str().unwrap(),
        "--index",
        index.to_str().unwrap(),
        "--events",
        out.join("events.csv").to_str().unwrap(),
        "--train",
        "2019Q1..2019Q3",
        "--test",
        "2019Q4..2020Q2",
        "--out",
        bt.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(bt.join("confusion.csv").is_file());
}

#[test]
fn bench_command_reports_latency() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let (code, err) = run(&[
        "bench",
        "--synthetic",
        "2000",
        "--repetitions",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("latency.json")).unwrap()).unwrap();
    assert_eq!(report["sentences_processed"], 2000);
    assert!(report["p50_us"].as_f64().unwrap() <= report["p99_us"].as_f64().unwrap());
    let (code, _) = run(&["bench", "--synthetic", "10", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 1);
}

#[test]
fn bench_wall_time_scales_linearly() {
    let engine = EngineConfig::defaults().build().unwrap();
    let small = bench_corpus(20_000, 25, 1);
    let large = bench_corpus(40_000, 25, 1);
    let best = |docs: &[Document]| {
        (0..3)
            .map(|_| run_bench(&engine, docs, 3).unwrap().wall_time_secs)
            .fold(f64::INFINITY, f64::min)
    };
    let ratio = best(&large) / best(&small);
    assert!(
        (1.4..=2.6).contains(&ratio),
        "doubling the corpus changed wall time by {ratio}"
    );
}

#[test]
fn single_sentence_latency_is_flat() {
    let engine = EngineConfig::defaults().build().unwrap();
    let docs: Vec<Document> = (0..1000)
        .map(|i| {
            doc(
                &format!("d{i:04}"),
                "T",
                NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
                "We expect revenue of $5 million.",
            )
        })
        .collect();
    let r = run_bench(&engine, &docs, 3).unwrap();
    assert_eq!(r.sentences_processed, 1000);
    assert!(r.p99_us <= r.p50_us * 20.0 + 5.0, "p50 {} p99 {}", r.p50_us, r.p99_us);
}
