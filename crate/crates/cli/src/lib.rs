//! Batch driver: parses a job, runs it (or reads it from the cache) and
//! writes a deterministic JSON report.

pub mod cache;
pub mod config;
pub mod tasks;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use serde_json::{json, Value};
use thiserror::Error;

pub use cache::{cache_gc, Cache, GcSummary, CACHE_ENV};
pub use config::{Cli, JobConfig, Task};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("{job}: {source}")]
    Module {
        job: String,
        #[source]
        source: confgraph::Error,
    },
    #[error("io: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use confgraph::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Module { source, .. } => match source {
                E::UnknownBuiltin(_)
                | E::SingularPairing
                | E::Parse { .. }
                | E::Validation(_)
                | E::FlavorViolation(_)
                | E::ShapeMismatch(_)
                | E::AlgebraMismatch(_)
                | E::NotATree(_) => 2,
                E::NotStabilized(_) => 1,
                E::Io(_) | E::Linalg(_) => 3,
            },
            CliError::Io(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    /// The report exactly as written.
    pub report: Vec<u8>,
    pub exit_code: i32,
    pub from_cache: bool,
}

impl Outcome {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.report).expect("reports are JSON")
    }
}

/// Serialize with sorted keys, two-space indent and a trailing newline.
pub fn to_bytes(v: &Value) -> Vec<u8> {
    let mut b = serde_json::to_vec_pretty(v).expect("serializable");
    b.push(b'\n');
    b
}

pub fn config_hash(cfg: &JobConfig) -> String {
    let canon = json!({ "tool_version": TOOL_VERSION, "config": cfg.canonical() });
    cache::sha256_hex(serde_json::to_string(&canon).expect("serializable").as_bytes())
}

fn cache_dir(cfg: &JobConfig) -> Option<PathBuf> {
    cfg.cache_dir.clone().or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
}

fn status_of(report: &Value, allow_unstable: bool) -> i32 {
    let passed = report["checks_passed"].as_bool().unwrap_or(false);
    let stable = report["all_stabilized"].as_bool().unwrap_or(true);
    if passed && (stable || allow_unstable) {
        0
    } else {
        1
    }
}

fn build_report(cfg: &JobConfig, hash: &str) -> Result<Value, CliError> {
    let r = tasks::execute(cfg)?;
    let passed = r.checks.values().all(|&b| b);
    let stable = r.stabilized.unwrap_or(true);
    let status = match (passed, stable) {
        (false, _) => "check_failed",
        (true, false) => "not_stabilized",
        (true, true) => "ok",
    };
    Ok(json!({
        "tool": "confgraph",
        "version": TOOL_VERSION,
        "config_hash": hash,
        "config": cfg.canonical(),
        "result": r.result,
        "checks": r.checks,
        "checks_passed": passed,
        "all_stabilized": stable,
        "status": status,
    }))
}

fn gc_report(cfg: &JobConfig) -> Result<Value, CliError> {
    let dir = cache_dir(cfg).expect("validated");
    let s = cache_gc(&dir)?;
    Ok(json!({
        "tool": "confgraph",
        "version": TOOL_VERSION,
        "task": "cache-gc",
        "objects": s.objects,
        "verified": s.verified,
        "evicted": s.evicted,
        "index_entries": s.index_entries,
        "dangling_index": s.dangling_index,
        "checks_passed": true,
        "status": "ok",
    }))
}

/// Run one resolved job.
pub fn run_job(cfg: &JobConfig) -> Result<Outcome, CliError> {
    if cfg.task == Task::CacheGc {
        let report = to_bytes(&gc_report(cfg)?);
        emit(cfg, &report)?;
        return Ok(Outcome {
            report,
            exit_code: 0,
            from_cache: false,
        });
    }
    let hash = config_hash(cfg);
    let store = match cache_dir(cfg) {
        Some(d) => Some(Cache::open(&d)?),
        None => None,
    };
    let cached = store.as_ref().and_then(|c| c.get(&hash));
    let from_cache = cached.is_some();
    let report = match cached {
        Some(b) => b,
        None => {
            let v = match cfg.workers {
                Some(w) => rayon::ThreadPoolBuilder::new()
                    .num_threads(w)
                    .build()
                    .map_err(|e| CliError::Config(format!("--workers: {e}")))?
                    .install(|| build_report(cfg, &hash))?,
                None => build_report(cfg, &hash)?,
            };
            let b = to_bytes(&v);
            if let Some(c) = &store {
                c.put(&hash, &b)?;
            }
            b
        }
    };
    let v: Value = serde_json::from_slice(&report).map_err(|e| CliError::Io(e.to_string()))?;
    emit(cfg, &report)?;
    Ok(Outcome {
        exit_code: status_of(&v, cfg.allow_unstable),
        report,
        from_cache,
    })
}

fn emit(cfg: &JobConfig, report: &[u8]) -> Result<(), CliError> {
    match &cfg.out {
        Some(p) => cache::write_atomic(p, report)?,
        None => std::io::stdout().write_all(report)?,
    }
    Ok(())
}

/// Parse arguments and run; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = JobConfig::from_cli(&cli).and_then(|cfg| run_job(&cfg));
    match result {
        Ok(o) => o.exit_code,
        Err(e) => {
            eprintln!("confgraph: {e}");
            e.exit_code()
        }
    }
}
