use std::fs;
use std::path::Path;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use bramsey_core::constructions::{h_tilde, lower_bound_coloring};
use bramsey_core::cycle::{find_cycle_with, verify_cycle, CycleCertificate, CycleOutcome, SearchOptions};
use bramsey_core::embed::{find_long_mono_cycle, PipelineConfig};
use bramsey_core::matching::{best_connected_matchings_with, max_matching, verify_connected_matching};
use bramsey_core::ramsey::{bramsey, decide_arrowing_with, Checkpoint, RamseyOptions, RamseyOutcome};
use bramsey_core::random::{random_coloring, random_min_degree_coloring};
use bramsey_core::regularity::{
    is_eps_regular_with, reduced_graph_with, verify_witness, ClusterPartition, Ratio, ReductionRule, RegularityMode, RegularityOutcome,
};
use bramsey_core::tutte::{tutte_partition, verify_tutte, TutteOutcome};
use bramsey_core::{Budget, ColoredBipartiteGraph, Exec};

use crate::output::emit;
use crate::{
    Cli, Command, Construct, CycleCmd, DecompCmd, Global, MatchingCmd, ModeArg, PipelineCmd, RamseyCmd, RegularityCmd, RuleArg, Status,
};

pub fn run(cli: &Cli) -> Result<Status> {
    let g = &cli.global;
    let exec = executor(g.jobs)?;
    match &cli.command {
        Command::Construct(c) => construct(g, c),
        Command::Cycle(c) => cycle(g, c, exec),
        Command::Matching(MatchingCmd::Best { graph }) => {
            let host = load_graph(graph)?;
            let certs = best_connected_matchings_with(&host, exec);
            let verified: Vec<bool> = certs.iter().map(|c| verify_connected_matching(&host, c)).collect();
            emit(g, &json!({ "kind": "connected_matchings", "certificates": certs, "verified": verified }))?;
            Ok(Status::Ok)
        }
        Command::Decomp(DecompCmd::Tutte { color, alpha, graph }) => {
            let host = load_graph(graph)?;
            check_color(&host, *color)?;
            let view = host.color_view(*color);
            let alpha = alpha.unwrap_or_else(|| 2 * max_matching(&view).size() + 1);
            let outcome = tutte_partition(&view, alpha)?;
            let (verified, status) = match &outcome {
                TutteOutcome::Decomposition { decomposition } => match verify_tutte(&view, decomposition) {
                    Ok(()) => (json!(true), Status::Ok),
                    Err(d) => (json!(d.to_string()), Status::Negative),
                },
                TutteOutcome::Matching { .. } => (json!(true), Status::Ok),
                TutteOutcome::NotFound => (Value::Null, Status::Negative),
            };
            emit(g, &json!({ "kind": "tutte", "color": color, "alpha": alpha, "outcome": outcome, "verified": verified }))?;
            Ok(status)
        }
        Command::Regularity(c) => regularity(g, c, exec),
        Command::Pipeline(PipelineCmd::Run(p)) => {
            let one = Ratio::from_integer(1);
            let mut cfg = if p.min_degree {
                PipelineConfig::min_degree(p.xi)
            } else {
                match p.alpha.as_slice() {
                    [a1, a2] => PipelineConfig::new(*a1, *a2, p.xi),
                    _ => bail!("--alpha takes exactly two values"),
                }
            };
            cfg.k = p.clusters;
            cfg.eps = p.eps.unwrap_or(cfg.eps);
            cfg.beta = p.beta.unwrap_or(one);
            cfg.n = p.n;
            cfg.seed = g.seed;
            cfg.exec = exec;
            cfg.timing = g.timing;
            let host = match (&p.graph, p.random) {
                (Some(path), _) => load_graph(path)?,
                (None, Some(n)) if p.min_degree => {
                    let need = (Ratio::new(7, 8) + Ratio::from_integer(9) * p.xi) * Ratio::from_integer(n as i64);
                    let delta = need.floor().to_integer() as usize + 1;
                    if delta > n {
                        bail!("no host on {n} vertices per side has minimum degree above {need}");
                    }
                    random_min_degree_coloring(n, delta, 2, g.seed)
                }
                (None, Some(n)) => random_coloring(n, n, 2, g.seed),
                (None, None) => bail!("give a graph file or --random N"),
            };
            let report = find_long_mono_cycle(&host, &cfg)?;
            let status = if report.succeeded() { Status::Ok } else { Status::Negative };
            emit(g, &tagged("pipeline_run", &report)?)?;
            Ok(status)
        }
        Command::Ramsey(c) => ramsey(g, c, exec),
        Command::Report { dir } => crate::report::report(g, dir),
    }
}

fn executor(jobs: usize) -> Result<Exec> {
    if jobs == 1 {
        return Ok(Exec::Sequential);
    }
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().context("starting the worker pool")?;
        Ok(Exec::Parallel)
    }
    #[cfg(not(feature = "parallel"))]
    Ok(Exec::Sequential)
}

fn budget(g: &Global) -> Budget {
    Budget { max_nodes: g.budget_nodes, max_time: g.budget_ms.map(Duration::from_millis) }
}

fn load_graph(path: &Path) -> Result<ColoredBipartiteGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ColoredBipartiteGraph::from_text(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn check_color(g: &ColoredBipartiteGraph, color: u8) -> Result<()> {
    if color == 0 || color as usize > g.r() {
        bail!("color {color} outside 1..={}", g.r());
    }
    Ok(())
}

/// The serialized value with a leading `kind` field.
fn tagged<T: Serialize>(kind: &str, v: &T) -> Result<Value> {
    let mut obj = serde_json::Map::new();
    obj.insert("kind".into(), json!(kind));
    match serde_json::to_value(v)? {
        Value::Object(m) => obj.extend(m),
        other => {
            obj.insert("value".into(), other);
        }
    }
    Ok(Value::Object(obj))
}

fn construct(g: &Global, c: &Construct) -> Result<Status> {
    let (graph, name) = match c {
        Construct::LowerBound { lengths } => (lower_bound_coloring(lengths)?, "lower_bound"),
        Construct::HTilde { n } => (h_tilde(*n)?, "h_tilde"),
    };
    let text = graph.to_text();
    match &g.output {
        Some(path) => {
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            let summary = json!({
                "kind": "graph", "construction": name, "path": path.display().to_string(),
                "n1": graph.n1(), "n2": graph.n2(), "r": graph.r(), "min_degree": graph.min_degree(),
            });
            println!("{}", serde_json::to_string(&summary)?);
        }
        None => print!("{text}"),
    }
    Ok(Status::Ok)
}

fn cycle(g: &Global, c: &CycleCmd, exec: Exec) -> Result<Status> {
    match c {
        CycleCmd::Find { color, length, graph } => {
            let host = load_graph(graph)?;
            check_color(&host, *color)?;
            let opts = SearchOptions { budget: budget(g), exec };
            let outcome = find_cycle_with(&host.color_view(*color), *length, opts)?;
            let (artifact, status) = match outcome {
                CycleOutcome::Found(cert) => {
                    let verified = verify_cycle(&host, &cert).is_ok();
                    (json!({ "kind": "cycle_search", "color": color, "length": length, "outcome": "found", "certificate": cert, "verified": verified }), Status::Ok)
                }
                CycleOutcome::Absent => (json!({ "kind": "cycle_search", "color": color, "length": length, "outcome": "absent" }), Status::Negative),
                CycleOutcome::Unknown { nodes } => {
                    (json!({ "kind": "cycle_search", "color": color, "length": length, "outcome": "unknown", "nodes": nodes }), Status::Budget)
                }
            };
            emit(g, &artifact)?;
            Ok(status)
        }
        CycleCmd::Verify { certificate, graph } => {
            let host = load_graph(graph)?;
            let raw: Value = load_json(certificate)?;
            let inner = raw.get("certificate").cloned().unwrap_or(raw);
            let cert: CycleCertificate = serde_json::from_value(inner).with_context(|| format!("no cycle certificate in {}", certificate.display()))?;
            let (artifact, status) = match verify_cycle(&host, &cert) {
                Ok(()) => (json!({ "kind": "cycle_verification", "valid": true, "length": cert.length, "color": cert.color }), Status::Ok),
                Err(d) => (json!({ "kind": "cycle_verification", "valid": false, "defect": d.to_string() }), Status::Negative),
            };
            emit(g, &artifact)?;
            Ok(status)
        }
    }
}

fn regularity(g: &Global, c: &RegularityCmd, exec: Exec) -> Result<Status> {
    match c {
        RegularityCmd::Check { color, a, b, eps, mode, probes, graph } => {
            let host = load_graph(graph)?;
            check_color(&host, *color)?;
            let view = host.color_view(*color);
            let mode = match mode {
                ModeArg::Exact => RegularityMode::Exact,
                ModeArg::Witness => RegularityMode::Witness { seed: g.seed, probes: *probes },
            };
            let outcome = is_eps_regular_with(&view, a, b, *eps, &mode, exec)?;
            let status = match &outcome {
                RegularityOutcome::Regular => Status::Ok,
                RegularityOutcome::Irregular { witness } => {
                    if !verify_witness(&view, a, b, *eps, witness) {
                        bail!("internal error: the irregularity witness does not verify");
                    }
                    Status::Negative
                }
                RegularityOutcome::Unknown => Status::Budget,
            };
            let mut artifact = tagged("regularity", &outcome)?;
            artifact["color"] = json!(color);
            artifact["eps"] = json!(format!("{}/{}", eps.numer(), eps.denom()));
            artifact["check"] = serde_json::to_value(&mode)?;
            emit(g, &artifact)?;
            Ok(status)
        }
        RegularityCmd::Reduce { partition, clusters, rule, param, graph } => {
            let host = load_graph(graph)?;
            let p = match partition {
                Some(path) => {
                    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                    ClusterPartition::from_text(&text).with_context(|| format!("parsing {}", path.display()))?
                }
                None => ClusterPartition::uniform(host.n1(), host.n2(), *clusters)?,
            };
            let rule = match rule {
                RuleArg::Majority => ReductionRule::MajorityHalfEps { eps: *param },
                RuleArg::Degree => ReductionRule::DegreeForm { d: *param },
            };
            let reduced = reduced_graph_with(&host, &p, rule, exec)?;
            emit(g, &json!({ "kind": "reduced_graph", "k": p.k(), "m": p.m(), "reduced": reduced }))?;
            Ok(Status::Ok)
        }
    }
}

fn ramsey(g: &Global, c: &RamseyCmd, exec: Exec) -> Result<Status> {
    let opts = RamseyOptions { budget: budget(g), exec, timing: g.timing };
    match c {
        RamseyCmd::Decide { n, lengths, resume, checkpoint } => {
            let resume: Option<Checkpoint> = resume.as_deref().map(load_json).transpose()?;
            let verdict = decide_arrowing_with(*n, lengths, &opts, resume.as_ref())?;
            let status = match &verdict.outcome {
                RamseyOutcome::AllColoringsHit => Status::Ok,
                RamseyOutcome::GoodColoring { .. } => Status::Negative,
                RamseyOutcome::BudgetExhausted { checkpoint: cp } => {
                    if let Some(path) = checkpoint {
                        fs::write(path, serde_json::to_string(cp)? + "\n").with_context(|| format!("writing {}", path.display()))?;
                    }
                    Status::Budget
                }
            };
            emit(g, &tagged("ramsey_verdict", &verdict)?)?;
            Ok(status)
        }
        RamseyCmd::Value { lengths, nmax } => {
            let value = bramsey(lengths, *nmax, &opts)?;
            let status = if value.value.is_some() {
                Status::Ok
            } else if value.verdicts.last().is_some_and(|v| matches!(v.outcome, RamseyOutcome::BudgetExhausted { .. })) {
                Status::Budget
            } else {
                Status::Negative
            };
            emit(g, &tagged("ramsey_value", &value)?)?;
            Ok(status)
        }
    }
}
