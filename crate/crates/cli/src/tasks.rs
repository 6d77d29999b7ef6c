//! One function per task, each returning the `result` section of a report.

use std::collections::BTreeMap;

use confgraph::bv::{bv_betti, les_check, LesNode};
use confgraph::complex::{self, enumerate_basis, Flavor, FlavorKind, Stabilization};
use confgraph::gc::{check_mc, z0, GCContext, MCBox};
use confgraph::ls::{self, LSModel};
use confgraph::operad::{coassociativity_suite, comodule_suite, gra_comodule_suite, SuiteReport};
use confgraph::PDAlgebra;
use confgraph_linalg::BettiTable;
use serde_json::{json, Value};

use crate::config::{FlavorName, JobConfig, Task};
use crate::CliError;

/// What a task produced, before it is wrapped into a report.
#[derive(Clone, Debug, Default)]
pub struct TaskResult {
    pub result: Value,
    pub checks: BTreeMap<String, bool>,
    /// `None` when the task reports no truncated cohomology.
    pub stabilized: Option<bool>,
}

impl TaskResult {
    fn check(&mut self, name: &str, ok: bool) {
        self.checks.insert(name.to_string(), ok);
    }

    fn stable(&mut self, ok: bool) {
        self.stabilized = Some(self.stabilized.unwrap_or(true) && ok);
    }
}

fn module(job: &str) -> impl Fn(confgraph::Error) -> CliError + '_ {
    move |e| CliError::Module { job: job.to_string(), source: e }
}

fn alg(cfg: &JobConfig) -> &PDAlgebra {
    cfg.algebra.as_ref().expect("validated")
}

fn flavor_of(cfg: &JobConfig, f: FlavorName) -> Result<Flavor, CliError> {
    match f {
        FlavorName::GraphsD => Ok(Flavor::graphs_d(cfg.dim)),
        FlavorName::Kind(k) => Flavor::decorated(k, alg(cfg), cfg.mc.clone()).map_err(module("flavor")),
    }
}

pub fn table_json(t: &BettiTable) -> Value {
    let entries: Vec<Value> = (0..t.betti.len())
        .map(|i| {
            json!({
                "degree": t.lo + i as i32,
                "betti": t.betti[i],
                "dim": t.dims[i],
                "stabilized": t.stabilized[i],
            })
        })
        .collect();
    json!({
        "deg_min": t.lo,
        "deg_max": t.hi(),
        "betti": t.betti,
        "entries": entries,
    })
}

fn stab_json(s: &Stabilization) -> Value {
    json!({
        "k_max": s.k_max,
        "k_probe": s.k_probe,
        "image_by_target_k": s.image,
        "image_from_k_max_minus_one": s.source,
    })
}

fn suite_json(r: &SuiteReport) -> Value {
    json!({ "checked": r.checked, "failures": r.failures })
}

pub fn execute(cfg: &JobConfig) -> Result<TaskResult, CliError> {
    let mut out = TaskResult::default();
    match cfg.task {
        Task::Betti => {
            let f = flavor_of(cfg, cfg.flavor.expect("validated"))?;
            let (t, s) = complex::betti(&f, cfg.n, cfg.lo, cfg.hi, cfg.k_max, cfg.k_probe).map_err(module("betti"))?;
            out.stable(t.stabilized.iter().all(|&b| b));
            out.result = json!({
                "flavor": f.kind.name(),
                "table": table_json(&t),
                "stabilization": stab_json(&s),
            });
        }
        Task::LsBetti => {
            let a = alg(cfg);
            let t = ls::ls_betti(a, cfg.n, cfg.lo, cfg.hi).map_err(module("ls-betti"))?;
            let top = LSModel::new(a, cfg.n).top_degree();
            let mut result = json!({ "table": table_json(&t) });
            if cfg.lo <= 0 && cfg.hi >= top {
                let chi = t.euler_characteristic();
                let expected = ls::expected_euler(a, cfg.n);
                result["euler_characteristic"] = json!(chi);
                result["expected_euler_characteristic"] = json!(expected);
                out.check("euler_characteristic", chi == expected);
            }
            out.result = result;
        }
        Task::BvBetti => {
            let (t, s) = bv_betti(alg(cfg), cfg.n, cfg.lo, cfg.hi, cfg.k_max, cfg.k_probe).map_err(module("bv-betti"))?;
            out.stable(t.stabilized.iter().all(|&b| b));
            out.result = json!({
                "framed": cfg.n,
                "table": table_json(&t),
                "stabilization": stab_json(&s),
            });
        }
        Task::CheckMc => {
            let a = alg(cfg);
            let ctx = GCContext::new(a).map_err(module("check-mc"))?;
            let z = cfg.mc.clone().unwrap_or_else(|| z0(a));
            let r = check_mc(
                &ctx,
                &z,
                MCBox {
                    max_vertices: cfg.max_vertices,
                    max_loop: cfg.max_loop,
                },
            );
            let boxes: Vec<Value> = r
                .boxes
                .iter()
                .map(|b| {
                    json!({
                        "vertices": b.vertices,
                        "loop_order": b.loop_order,
                        "graphs_checked": b.graphs_checked,
                        "holds": b.holds,
                    })
                })
                .collect();
            out.check("maurer_cartan", r.holds());
            out.result = json!({
                "mc_terms": z.terms.len(),
                "boxes": boxes,
                "residual": r.residual.to_literals(Some(a)),
            });
        }
        Task::CheckD2 => {
            let flavors: Vec<FlavorName> = match (cfg.flavor, &cfg.algebra) {
                (Some(f), _) => vec![f],
                (None, None) => vec![FlavorName::GraphsD],
                (None, Some(a)) => {
                    let mut v = vec![
                        FlavorName::Kind(FlavorKind::GraphsM),
                        FlavorName::Kind(FlavorKind::GraphsMNoTadpole),
                        FlavorName::Kind(FlavorKind::Reduced),
                        FlavorName::Kind(FlavorKind::Forest),
                    ];
                    if a.dim == 2 {
                        v.push(FlavorName::Kind(FlavorKind::Bv { framed: cfg.n }));
                    }
                    v
                }
            };
            let mut per = BTreeMap::new();
            for f in flavors {
                let fl = flavor_of(cfg, f)?;
                let (checked, bad) = complex::d2_defects(&fl, cfg.n, cfg.lo, cfg.hi, cfg.k_max).map_err(module("check-d2"))?;
                let r = SuiteReport {
                    checked,
                    failures: bad.iter().map(|g| g.to_string()).collect(),
                };
                out.check(&format!("d_squared_zero/{}", fl.kind.name()), r.passed());
                per.insert(fl.kind.name(), suite_json(&r));
            }
            out.result = json!({ "flavors": per });
        }
        Task::CheckCoassoc => {
            let r = coassociativity_suite(cfg.dim, cfg.n, cfg.max_edges).map_err(module("check-coassoc"))?;
            out.check("coassociativity", r.passed());
            out.result = suite_json(&r);
        }
        Task::CheckComodule => {
            let f = flavor_of(cfg, cfg.flavor.expect("validated"))?;
            let gra = gra_comodule_suite(alg(cfg), cfg.n, cfg.max_edges, 2).map_err(module("check-comodule"))?;
            out.check("comodule_square_generators", gra.passed());
            // without tadpoles the merged-edge term of the coaction is lost
            let twisted = if f.tadpoles_allowed() {
                let r = comodule_suite(&f, cfg.n, cfg.lo, cfg.hi, cfg.k_max).map_err(module("check-comodule"))?;
                out.check("comodule_square_twisted", r.passed());
                suite_json(&r)
            } else {
                Value::Null
            };
            out.result = json!({ "flavor": f.kind.name(), "generators": suite_json(&gra), "twisted": twisted });
        }
        Task::CheckLes => {
            let r = les_check(alg(cfg), cfg.n, cfg.k, cfg.lo, cfg.hi, cfg.k_max, cfg.k_probe).map_err(module("check-les"))?;
            let entries: Vec<Value> = r
                .entries
                .iter()
                .map(|e| {
                    json!({
                        "node": match e.node {
                            LesNode::Total => "total",
                            LesNode::BaseBeforeEuler => "base_before_euler",
                            LesNode::BaseAfterEuler => "base_after_euler",
                        },
                        "degree": e.degree,
                        "dim": e.dim,
                        "rank_in": e.rank_in,
                        "rank_out": e.rank_out,
                        "exact": e.exact,
                        "stabilized": e.stabilized,
                    })
                })
                .collect();
            out.check("exact_in_stabilized_degrees", r.exact_where_stabilized());
            out.stable(r.entries.iter().all(|e| e.stabilized));
            out.result = json!({
                "framed": r.framed,
                "unframed": r.unframed,
                "k_max": r.k_max,
                "exact_everywhere": r.exact(),
                "entries": entries,
            });
        }
        Task::Compare => {
            let a = alg(cfg);
            let f = flavor_of(cfg, cfg.flavor.expect("validated"))?;
            let (t, s) = complex::betti(&f, cfg.n, cfg.lo, cfg.hi, cfg.k_max, cfg.k_probe).map_err(module("compare"))?;
            let l = ls::ls_betti(a, cfg.n, cfg.lo, cfg.hi).map_err(module("compare"))?;
            let mismatched: Vec<i32> = (0..t.betti.len())
                .filter(|&i| t.stabilized[i] && t.betti[i] != l.betti[i])
                .map(|i| t.lo + i as i32)
                .collect();
            let mut defects = Vec::new();
            let mut checked = 0;
            for p in cfg.lo..=cfg.hi {
                let basis = enumerate_basis(&f, cfg.n, p, cfg.k_max);
                checked += basis.len();
                defects.extend(ls::chain_map_defects(&f, &basis).map_err(module("compare"))?.iter().map(|g| g.to_string()));
            }
            out.check("betti_agree_where_stabilized", mismatched.is_empty());
            out.check("projection_is_chain_map", defects.is_empty());
            out.stable(t.stabilized.iter().all(|&b| b));
            out.result = json!({
                "flavor": f.kind.name(),
                "graphs": table_json(&t),
                "stabilization": stab_json(&s),
                "ls": table_json(&l),
                "mismatched_degrees": mismatched,
                "chain_map": { "checked": checked, "defects": defects },
            });
        }
        Task::Sbg => {
            let a = alg(cfg);
            let poly = ls::sbg_polynomial(&a.poincare_polynomial(), cfg.n as u32, cfg.dim as u32);
            let top = LSModel::new(a, cfg.n).top_degree().max(poly.len() as i32 - 1);
            let t = ls::ls_betti(a, cfg.n, 0, top).map_err(module("sbg"))?;
            let violations = ls::sbg_violations(&poly, &t);
            out.check("sbg_dominates_betti", violations.is_empty());
            out.result = json!({
                "sbg": poly,
                "betti": t.betti,
                "violations": violations,
            });
        }
        Task::CacheGc => unreachable!("handled by the driver"),
    }
    Ok(out)
}
