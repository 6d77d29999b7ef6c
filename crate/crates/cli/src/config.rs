//! Command line and the resolved job configuration.

use std::fs;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use confgraph::complex::FlavorKind;
use confgraph::gc::GCElement;
use confgraph::ls::LSModel;
use confgraph::{Graph, PDAlgebra};
use serde_json::{json, Value};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Task {
    Betti,
    LsBetti,
    BvBetti,
    CheckMc,
    CheckD2,
    CheckCoassoc,
    CheckComodule,
    CheckLes,
    Compare,
    Sbg,
    CacheGc,
}

impl Task {
    pub fn name(&self) -> String {
        self.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
    }
}

#[derive(Parser, Clone, Debug)]
#[command(name = "confgraph", version, about = "Cohomology of graph complexes for configuration spaces")]
pub struct Cli {
    #[arg(long, value_enum)]
    pub task: Task,
    /// Builtin algebra: S^D, T^2, Sigma_g, CP^2, S^axS^b.
    #[arg(long)]
    pub manifold: Option<String>,
    #[arg(long)]
    pub algebra_file: Option<PathBuf>,
    /// `z0` or a file with one graph literal per line.
    #[arg(long, default_value = "z0")]
    pub mc: String,
    #[arg(long)]
    pub n: Option<u8>,
    #[arg(long, allow_negative_numbers = true)]
    pub deg_min: Option<i32>,
    #[arg(long, allow_negative_numbers = true)]
    pub deg_max: Option<i32>,
    #[arg(long)]
    pub kmax: Option<u8>,
    #[arg(long)]
    pub kprobe: Option<u8>,
    /// graphsD, graphsM, graphsM_notadpole, graphsM_reduced, graphsM_forest, bv.
    #[arg(long)]
    pub flavor: Option<String>,
    #[arg(long)]
    pub surface: Option<String>,
    #[arg(long)]
    pub k: Option<u8>,
    /// Dimension for undecorated graphs.
    #[arg(long)]
    pub dim: Option<u8>,
    #[arg(long)]
    pub max_vertices: Option<u8>,
    #[arg(long)]
    pub max_loop: Option<i32>,
    #[arg(long)]
    pub max_edges: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub allow_unstable: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlavorName {
    GraphsD,
    Kind(FlavorKind),
}

pub fn parse_flavor(s: &str, n: u8) -> Result<FlavorName, CliError> {
    let key: String = s.chars().filter(|c| c.is_alphanumeric()).collect::<String>().to_lowercase();
    Ok(match key.as_str() {
        "graphsd" => FlavorName::GraphsD,
        "graphsm" => FlavorName::Kind(FlavorKind::GraphsM),
        "graphsmnotadpole" | "notadpole" => FlavorName::Kind(FlavorKind::GraphsMNoTadpole),
        "graphsmreduced" | "reduced" => FlavorName::Kind(FlavorKind::Reduced),
        "graphsmforest" | "forest" => FlavorName::Kind(FlavorKind::Forest),
        "bv" | "bvgraphs" => FlavorName::Kind(FlavorKind::Bv { framed: n }),
        _ => return Err(CliError::Config(format!("unknown flavor {s:?}"))),
    })
}

pub fn flavor_label(f: FlavorName) -> String {
    match f {
        FlavorName::GraphsD => "GraphsD".into(),
        FlavorName::Kind(k) => k.name(),
    }
}

/// A job with every default filled in.
#[derive(Clone, Debug)]
pub struct JobConfig {
    pub task: Task,
    pub algebra: Option<PDAlgebra>,
    pub mc: Option<GCElement>,
    /// `None` means every flavor applicable to the algebra.
    pub flavor: Option<FlavorName>,
    pub dim: u8,
    pub n: u8,
    pub k: u8,
    pub lo: i32,
    pub hi: i32,
    pub k_max: u8,
    pub k_probe: u8,
    pub max_vertices: u8,
    pub max_loop: i32,
    pub max_edges: usize,
    pub out: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    pub allow_unstable: bool,
}

fn builtin(name: &str) -> Result<PDAlgebra, CliError> {
    PDAlgebra::builtin(name).map_err(|e| CliError::Config(e.to_string()))
}

fn parse_mc(path: &str, alg: &PDAlgebra) -> Result<GCElement, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("MC file {path}: {e}")))?;
    let mut terms: Vec<(Graph, confgraph::Rational)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let t = Graph::parse_literal(line, Some(alg)).map_err(|e| CliError::Config(format!("{path}:{}: {e}", i + 1)))?;
        terms.push(t);
    }
    Ok(GCElement::from_terms(alg.dim as u8, terms))
}

impl JobConfig {
    pub fn from_cli(cli: &Cli) -> Result<JobConfig, CliError> {
        let task = cli.task;
        let algebra = match (&cli.manifold, &cli.algebra_file, &cli.surface) {
            (Some(_), Some(_), _) => return Err(CliError::Config("--manifold and --algebra-file are exclusive".into())),
            (Some(m), None, _) => Some(builtin(m)?),
            (None, Some(p), _) => Some(PDAlgebra::load(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?),
            (None, None, Some(s)) => Some(builtin(s)?),
            (None, None, None) => None,
        };
        if let Some(a) = &algebra {
            let bad = a.validate();
            if !bad.is_empty() {
                let v: Vec<String> = bad.iter().map(|v| v.to_string()).collect();
                return Err(CliError::Config(format!("invalid algebra: {}", v.join("; "))));
            }
        }
        let need_algebra = |what: &str| -> Result<PDAlgebra, CliError> {
            algebra.clone().ok_or_else(|| CliError::Config(format!("{what} needs --manifold, --surface or --algebra-file")))
        };
        let mc = match cli.mc.as_str() {
            "z0" => None,
            path => Some(parse_mc(path, &need_algebra("--mc <path>")?)?),
        };
        let n_default = match task {
            Task::CheckCoassoc => 4,
            Task::CheckLes => 0,
            Task::CheckMc | Task::CacheGc => 0,
            _ => 2,
        };
        let n = cli.n.unwrap_or(n_default);
        let default_flavor = match task {
            Task::BvBetti | Task::CheckLes => Some("bv"),
            Task::Betti | Task::CheckComodule | Task::Compare => Some(if algebra.is_some() { "graphsM" } else { "graphsD" }),
            Task::CheckD2 if algebra.is_none() => Some("graphsD"),
            _ => None,
        };
        let flavor = match cli.flavor.as_deref().or(default_flavor) {
            Some(f) => Some(parse_flavor(f, n)?),
            None => None,
        };
        let dim = match (&algebra, cli.dim) {
            (Some(a), Some(d)) if d as i32 != a.dim => {
                return Err(CliError::Config(format!("--dim {d} disagrees with the algebra dimension {}", a.dim)))
            }
            (Some(a), _) => a.dim as u8,
            (None, Some(d)) => d,
            (None, None) => 2,
        };
        if dim < 2 {
            return Err(CliError::Config(format!("dimension {dim} < 2")));
        }
        let mut cfg = JobConfig {
            task,
            algebra: algebra.clone(),
            mc,
            flavor,
            dim,
            n,
            k: cli.k.unwrap_or(1),
            lo: cli.deg_min.unwrap_or(0),
            hi: 0,
            k_max: cli.kmax.unwrap_or(1),
            k_probe: 0,
            max_vertices: cli.max_vertices.unwrap_or(3),
            max_loop: cli.max_loop.unwrap_or(2),
            max_edges: cli.max_edges.unwrap_or(3),
            out: cli.out.clone(),
            cache_dir: cli.cache_dir.clone(),
            workers: cli.workers,
            allow_unstable: cli.allow_unstable,
        };
        cfg.k_probe = cli.kprobe.unwrap_or(cfg.k_max + 1);
        cfg.hi = match cli.deg_max {
            Some(h) => h,
            None => cfg.default_hi(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn default_hi(&self) -> i32 {
        match (self.task, self.flavor, &self.algebra) {
            (Task::CheckLes, _, _) => 3,
            (Task::BvBetti, _, _) | (_, Some(FlavorName::Kind(FlavorKind::Bv { .. })), _) => 2 * self.n as i32 + 1,
            (_, Some(FlavorName::GraphsD), _) | (_, _, None) => (self.n as i32 - 1).max(0) * (self.dim as i32 - 1),
            (_, _, Some(a)) => LSModel::new(a, self.n).top_degree(),
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        let cfg = |m: String| Err(CliError::Config(m));
        if self.lo > self.hi {
            return cfg(format!("empty degree window [{}, {}]", self.lo, self.hi));
        }
        if self.k_probe <= self.k_max && self.uses_truncation() {
            return cfg(format!("--kprobe {} must exceed --kmax {}", self.k_probe, self.k_max));
        }
        let needs_alg = matches!(
            self.task,
            Task::LsBetti | Task::BvBetti | Task::CheckMc | Task::CheckLes | Task::Compare | Task::Sbg
        ) || matches!(self.flavor, Some(FlavorName::Kind(_))) && self.task != Task::CacheGc;
        if needs_alg && self.algebra.is_none() {
            return cfg(format!("task {} needs --manifold, --surface or --algebra-file", self.task.name()));
        }
        if matches!(self.task, Task::BvBetti | Task::CheckLes) && self.dim != 2 {
            return cfg("framed graphs need a surface".into());
        }
        if self.task == Task::CheckLes && self.k == 0 {
            return cfg("--k must be at least 1".into());
        }
        if self.task == Task::CacheGc && self.cache_dir.is_none() && std::env::var_os(crate::cache::CACHE_ENV).is_none() {
            return cfg(format!("cache-gc needs --cache-dir or {}", crate::cache::CACHE_ENV));
        }
        if self.n == 0 && matches!(self.task, Task::Betti | Task::LsBetti | Task::Compare | Task::Sbg | Task::CheckComodule) {
            return cfg("--n must be positive".into());
        }
        Ok(())
    }

    fn uses_truncation(&self) -> bool {
        matches!(self.task, Task::Betti | Task::BvBetti | Task::CheckLes | Task::Compare)
    }

    /// The fields that determine the report, in canonical form.
    pub fn canonical(&self) -> Value {
        let alg = self.algebra.as_ref();
        let algebra = alg.map(|a| serde_json::from_str::<Value>(&a.to_json()).unwrap_or(Value::String(a.to_json())));
        let mc = match (&self.mc, alg) {
            (None, _) => json!("z0"),
            (Some(z), a) => json!(z.terms.to_literals(a)),
        };
        json!({
            "task": self.task.name(),
            "algebra": algebra,
            "mc": mc,
            "flavor": self.flavor.map(flavor_label),
            "dim": self.dim,
            "n": self.n,
            "k": self.k,
            "deg_min": self.lo,
            "deg_max": self.hi,
            "k_max": self.k_max,
            "k_probe": self.k_probe,
            "max_vertices": self.max_vertices,
            "max_loop": self.max_loop,
            "max_edges": self.max_edges,
        })
    }
}
