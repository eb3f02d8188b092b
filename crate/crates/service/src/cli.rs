//! Command-line front end. Every command opens the store snapshot, runs one
//! operation and saves the snapshot again if the operation changed anything.
//! A failing command leaves the snapshot untouched.

use std::fs;
use std::io::{BufReader, Read, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::time::Duration;

use assaykg::compare::{render_csv, render_json, render_text, SimilarityMode};
use assaykg::curation::Verdict;
use assaykg::ntriples::{ImportMode, DEFAULT_BASE_URI};
use assaykg::semantifier::Metrics;
use assaykg::snapshot::save_snapshot;
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::api::{serve, OutputFormat, ServeOptions, DEFAULT_EVAL_SPLIT, DEFAULT_K, DEFAULT_MIN_FREQ};
use crate::app::{train_config, App, SessionView, DEFAULT_STORE_PATH, STORE_ENV};
use crate::error::ServiceError;

#[derive(Debug, Parser)]
#[command(name = "assaykg", version, about = "Knowledge graph of semantified bioassays")]
pub struct Cli {
    /// Store snapshot to operate on.
    #[arg(long, global = true, env = STORE_ENV, default_value = DEFAULT_STORE_PATH)]
    pub store: PathBuf,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    #[default]
    Statements,
    Properties,
}

impl From<Mode> for SimilarityMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Statements => SimilarityMode::Statements,
            Mode::Properties => SimilarityMode::Properties,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Add an annotated corpus (JSON Lines) to the store and graph.
    Ingest { corpus: PathBuf },
    /// Statement statistics over every contribution in the graph.
    Stats,
    /// Train the semantifier on the ingested corpus.
    Train {
        #[arg(long, default_value_t = DEFAULT_MIN_FREQ)]
        min_freq: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        calibration_split: Option<f64>,
    },
    /// Submit assay text and open a curation session with its predictions.
    #[command(group(ArgGroup::new("input").required(true)))]
    Semantify {
        #[arg(long, group = "input")]
        text_file: Option<PathBuf>,
        #[arg(long, group = "input")]
        stdin: bool,
        #[arg(long)]
        title: Option<String>,
        #[arg(long)]
        top_k: Option<usize>,
        /// Accept every proposal and finalize right away.
        #[arg(long)]
        auto_accept: bool,
    },
    /// Apply a decisions file to a session.
    Curate {
        session: String,
        /// Lines of `accept <pid>`, `reject <pid>`, `accept all`, `reject all`
        /// or `add <property> :: <value>`; `#` starts a comment.
        #[arg(long)]
        decisions: PathBuf,
        #[arg(long)]
        finalize: bool,
        #[arg(long, requires = "finalize")]
        title: Option<String>,
    },
    /// Show a curation session.
    Session { session: String },
    /// Close a session without writing anything to the graph.
    Discard { session: String },
    /// Tabulate contributions side by side.
    Compare {
        #[arg(required = true)]
        ids: Vec<String>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Contributions most similar to one contribution.
    Similar {
        id: String,
        #[arg(short, default_value_t = DEFAULT_K)]
        k: usize,
        #[arg(long, value_enum, default_value_t)]
        mode: Mode,
    },
    /// Write the graph as N-Triples (`-` for standard output).
    Export {
        #[arg(long)]
        ntriples: PathBuf,
        #[arg(long, default_value = DEFAULT_BASE_URI)]
        base_uri: String,
    },
    /// Read N-Triples into the graph.
    Import {
        #[arg(long)]
        ntriples: PathBuf,
        #[arg(long, default_value = DEFAULT_BASE_URI)]
        base_uri: String,
        /// Keep the lines applied before a malformed one.
        #[arg(long)]
        partial: bool,
    },
    /// Copy the store to another snapshot.
    Save { snapshot: PathBuf },
    /// Replace the store with a verified snapshot.
    Load { snapshot: PathBuf },
    /// Hold-out evaluation of the semantifier.
    Eval {
        #[arg(long, default_value_t = DEFAULT_EVAL_SPLIT)]
        split: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_MIN_FREQ)]
        min_freq: usize,
    },
    /// Serve the HTTP API over the store.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Seconds between flushes of changed state.
        #[arg(long, default_value_t = 5)]
        flush_interval: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurateStep {
    Decide(String, Verdict),
    DecideAll(Verdict),
    Add(String, String),
}

pub fn parse_decisions(text: &str) -> Result<Vec<CurateStep>, ServiceError> {
    let mut steps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = || ServiceError::InvalidRequest(format!("decisions line {}: cannot read {raw:?}", i + 1));
        let (verb, rest) = line.split_once(char::is_whitespace).ok_or_else(bad)?;
        let rest = rest.trim();
        let step = match verb.to_ascii_lowercase().as_str() {
            "add" => {
                let (p, v) = rest.split_once("::").ok_or_else(bad)?;
                CurateStep::Add(p.trim().to_string(), v.trim().to_string())
            }
            v => {
                let verdict: Verdict = v.parse().map_err(|_| bad())?;
                match rest {
                    "all" | "*" => CurateStep::DecideAll(verdict),
                    pid if !pid.contains(char::is_whitespace) => CurateStep::Decide(pid.to_string(), verdict),
                    _ => return Err(bad()),
                }
            }
        };
        steps.push(step);
    }
    Ok(steps)
}

fn format_mean(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0');
    if s.ends_with('.') {
        format!("{s}0")
    } else {
        s.to_string()
    }
}

fn opt(n: Option<usize>) -> String {
    n.map_or_else(|| "-".to_string(), |n| n.to_string())
}

fn stdout(e: std::io::Error) -> ServiceError {
    ServiceError::io("stdout")(e)
}

fn json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), ServiceError> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    writeln!(out, "{text}").map_err(stdout)
}

fn session_text(out: &mut dyn Write, s: &SessionView) -> std::io::Result<()> {
    writeln!(out, "session {} {}", s.session_id, s.state)?;
    for p in &s.proposals {
        writeln!(out, "{}\t{:.4}\t{}\t{} :: {}", p.proposal_id, p.score, decision_word(p.decision), p.property, p.value)?;
    }
    for m in &s.manual_additions {
        writeln!(out, "+\t\tmanual\t{} :: {}", m.property, m.value)?;
    }
    if let Some(c) = s.contribution_id {
        writeln!(out, "contribution {c}")?;
    }
    Ok(())
}

fn decision_word(d: assaykg::curation::Decision) -> &'static str {
    match d {
        assaykg::curation::Decision::Pending => "pending",
        assaykg::curation::Decision::Accepted => "accepted",
        assaykg::curation::Decision::Rejected => "rejected",
    }
}

fn metrics_text(out: &mut dyn Write, m: &Metrics) -> std::io::Result<()> {
    writeln!(out, "micro precision {:.4}", m.micro_precision)?;
    writeln!(out, "micro recall {:.4}", m.micro_recall)?;
    writeln!(out, "micro f1 {:.4}", m.micro_f1)?;
    writeln!(out, "macro precision {:.4}", m.macro_precision)?;
    writeln!(out, "macro recall {:.4}", m.macro_recall)?;
    writeln!(out, "macro f1 {:.4}", m.macro_f1)?;
    writeln!(
        out,
        "gold {} / accepted {} / matched {} over {} assays",
        m.gold_total,
        m.accepted_total,
        m.true_positive_total,
        m.assays.len()
    )
}

fn read_input(path: &PathBuf) -> Result<Vec<u8>, ServiceError> {
    fs::read(path).map_err(ServiceError::io(path.display()))
}

/// Runs one command, writing its normal output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), ServiceError> {
    let mut app = App::open(&cli.store)?;
    match cli.command {
        Command::Ingest { corpus } => {
            let file = fs::File::open(&corpus).map_err(ServiceError::io(corpus.display()))?;
            let summary = app.ingest(BufReader::new(file))?;
            app.save()?;
            for w in &summary.warnings {
                eprintln!("warning: line {}: {}", w.line, w.message);
            }
            if cli.json {
                json(out, &summary)?;
            } else {
                writeln!(
                    out,
                    "ingested {} assays ({} already present)",
                    summary.report.added,
                    summary.report.skipped.len()
                )
                .map_err(stdout)?;
            }
        }
        Command::Stats => {
            let s = app.store.stats();
            if cli.json {
                json(out, &s)?;
            } else {
                writeln!(
                    out,
                    "assays {}\nstatements min {} / max {} / mean {}\ndistinct types {}\ndistinct formats {}",
                    s.assay_count,
                    opt(s.statements_min),
                    opt(s.statements_max),
                    format_mean(s.statements_mean),
                    s.distinct_types,
                    s.distinct_formats
                )
                .map_err(stdout)?;
            }
        }
        Command::Train {
            min_freq,
            seed,
            calibration_split,
        } => {
            let summary = app.train(min_freq, &train_config(seed, calibration_split))?;
            app.save()?;
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            if cli.json {
                json(out, &summary)?;
            } else {
                writeln!(
                    out,
                    "trained {} labels ({} dropped)\nmodel {} sha256 {}",
                    summary.labels,
                    summary.dropped.len(),
                    summary.model.path,
                    summary.model.sha256
                )
                .map_err(stdout)?;
            }
        }
        Command::Semantify {
            text_file,
            stdin,
            title,
            top_k,
            auto_accept,
        } => {
            let bytes = match text_file {
                Some(path) => read_input(&path)?,
                None => {
                    debug_assert!(stdin);
                    let mut buf = Vec::new();
                    std::io::stdin().read_to_end(&mut buf).map_err(ServiceError::io("stdin"))?;
                    buf
                }
            };
            let text = String::from_utf8(bytes)
                .map_err(|_| ServiceError::InvalidRequest("assay text is not UTF-8".into()))?;
            let assay = app.store.submit_assay(title.as_deref(), &text)?;
            let summary = app.semantify(&assay, top_k, auto_accept)?;
            app.save()?;
            if cli.json {
                json(out, &summary)?;
            } else {
                writeln!(out, "assay {}\nsession {}", summary.assay_id, summary.session_id).map_err(stdout)?;
                for p in &summary.proposals {
                    writeln!(out, "{}\t{:.4}\t{} :: {}", p.proposal_id, p.score, p.property, p.value).map_err(stdout)?;
                }
                if let Some(c) = summary.contribution_id {
                    writeln!(out, "contribution {c}").map_err(stdout)?;
                }
            }
        }
        Command::Curate {
            session,
            decisions,
            finalize,
            title,
        } => {
            let text = String::from_utf8(read_input(&decisions)?)
                .map_err(|_| ServiceError::InvalidRequest("decisions file is not UTF-8".into()))?;
            for step in parse_decisions(&text)? {
                match step {
                    CurateStep::Decide(pid, v) => {
                        app.store.decide(&session, &pid, v)?;
                    }
                    CurateStep::DecideAll(v) => {
                        let pending: Vec<String> = app
                            .store
                            .session(&session)?
                            .proposals()
                            .iter()
                            .filter(|p| p.decision == assaykg::curation::Decision::Pending)
                            .map(|p| p.proposal_id.clone())
                            .collect();
                        for pid in pending {
                            app.store.decide(&session, &pid, v)?;
                        }
                    }
                    CurateStep::Add(p, v) => {
                        app.store.add_manual(&session, &p, &v)?;
                    }
                }
            }
            if finalize {
                app.store.finalize(&session, title.as_deref())?;
            }
            app.save()?;
            let view = app.session_view(&session)?;
            if cli.json {
                json(out, &view)?;
            } else {
                session_text(out, &view).map_err(stdout)?;
            }
        }
        Command::Session { session } => {
            let view = app.session_view(&session)?;
            if cli.json {
                json(out, &view)?;
            } else {
                session_text(out, &view).map_err(stdout)?;
            }
        }
        Command::Discard { session } => {
            app.store.discard(&session)?;
            app.save()?;
            let view = app.session_view(&session)?;
            if cli.json {
                json(out, &view)?;
            } else {
                session_text(out, &view).map_err(stdout)?;
            }
        }
        Command::Compare { ids, format } => {
            let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
            let table = app.store.compare(&refs)?;
            let rendered = match (cli.json, format) {
                (true, _) | (_, OutputFormat::Json) => render_json(&table),
                (_, OutputFormat::Csv) => render_csv(&table),
                (_, OutputFormat::Text) => render_text(&table),
            };
            write!(out, "{rendered}").map_err(stdout)?;
            if !rendered.ends_with('\n') {
                writeln!(out).map_err(stdout)?;
            }
        }
        Command::Similar { id, k, mode } => {
            let results = app.store.similar(&id, k, mode.into())?;
            if cli.json {
                json(out, &results)?;
            } else {
                for r in &results {
                    writeln!(out, "{}\t{:.4}", r.contribution, r.score).map_err(stdout)?;
                }
            }
        }
        Command::Export { ntriples, base_uri } => {
            let text = app.store.export_ntriples(&base_uri)?;
            if ntriples.as_os_str() == "-" {
                out.write_all(text.as_bytes()).map_err(stdout)?;
            } else {
                fs::write(&ntriples, &text).map_err(ServiceError::io(ntriples.display()))?;
                writeln!(out, "exported {} triples to {}", text.lines().count(), ntriples.display()).map_err(stdout)?;
            }
        }
        Command::Import {
            ntriples,
            base_uri,
            partial,
        } => {
            let bytes = read_input(&ntriples)?;
            let mode = if partial { ImportMode::Partial } else { ImportMode::Transactional };
            let result = app.store.import_ntriples(&bytes, &base_uri, mode);
            if result.is_ok() || partial {
                app.save()?;
            }
            let report = result?;
            if cli.json {
                json(out, &report)?;
            } else {
                writeln!(
                    out,
                    "imported {} triples: {} statements added, {} duplicates, {} new resources, {} new predicates",
                    report.triples,
                    report.statements_added,
                    report.duplicates,
                    report.new_resources.len(),
                    report.new_predicates.len()
                )
                .map_err(stdout)?;
            }
        }
        Command::Save { snapshot } => {
            let sum = save_snapshot(&app.store, &snapshot)?;
            writeln!(out, "saved {} sha256 {sum}", snapshot.display()).map_err(stdout)?;
        }
        Command::Load { snapshot } => {
            app.replace_from(&snapshot)?;
            let sum = app.save()?;
            writeln!(out, "loaded {} into {} sha256 {sum}", snapshot.display(), cli.store.display()).map_err(stdout)?;
        }
        Command::Eval { split, seed, min_freq } => {
            let metrics = app.store.evaluate(split, min_freq, &train_config(seed, None))?;
            if cli.json {
                json(out, &metrics)?;
            } else {
                metrics_text(out, &metrics).map_err(stdout)?;
            }
        }
        Command::Serve {
            port,
            host,
            flush_interval,
        } => {
            let runtime = tokio::runtime::Runtime::new().map_err(ServiceError::io("runtime"))?;
            runtime.block_on(serve(
                app,
                ServeOptions {
                    addr: SocketAddr::new(host, port),
                    flush_interval: Duration::from_secs(flush_interval.max(1)),
                },
            ))?;
        }
    }
    Ok(())
}

/// The one-line form errors take on standard error.
pub fn error_line(e: &ServiceError) -> String {
    let message = e.to_string().split_whitespace().collect::<Vec<_>>().join(" ");
    format!("error: {}: {message}", e.code())
}
