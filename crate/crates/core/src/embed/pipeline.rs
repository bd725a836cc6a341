//! End-to-end search for a long monochromatic cycle in a 2-colored graph:
//! uniform cluster partition, reduced graph, connected matching, closed walk,
//! stitching. Every stage is recorded; only the final certificate is trusted.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::path::PairParams;
use super::stitch::{stitch_long_cycle, StitchOptions, StitchPlan};
use super::walk::{walk_plan, WalkPlan};
use crate::cycle::{verify_cycle, CycleCertificate};
use crate::graph::{Color, ColoredBipartiteGraph};
use crate::matching::{best_connected_matchings_with, ConnectedMatchingCertificate};
use crate::regularity::{
    is_eps_regular, ratio_serde, reduced_graph_with, ClusterPartition, Ratio, ReducedColoredGraph, ReductionRule, RegularityMode,
    RegularityOutcome,
};
use crate::{Error, Exec, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineMode {
    /// Complete host, targets `2 floor(alpha_i n)` with `n = floor(N / (alpha_1 + alpha_2 + 8 xi))`.
    #[default]
    Complete,
    /// Host with `delta > (7/8 + 9 xi) N`, target `2n` with `n = floor(N / (2 + 8 xi))`.
    MinDegree,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub mode: PipelineMode,
    #[serde(with = "ratio_pair")]
    pub alphas: [Ratio; 2],
    #[serde(with = "ratio_serde")]
    pub xi: Ratio,
    /// Clusters per side.
    pub k: usize,
    #[serde(with = "ratio_serde")]
    pub eps: Ratio,
    #[serde(with = "ratio_serde")]
    pub beta: Ratio,
    /// Overrides the mode's reduction rule.
    pub rule: Option<ReductionRule>,
    /// Overrides the `n` derived from `N`.
    pub n: Option<usize>,
    pub seed: u64,
    /// Witness-mode probes per pair and color.
    pub probes: usize,
    #[serde(skip)]
    pub exec: Exec,
    /// Record wall-clock time per stage.
    #[serde(skip)]
    pub timing: bool,
}

mod ratio_pair {
    use super::Ratio;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Ratio; 2], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(|r| format!("{}/{}", r.numer(), r.denom())).collect();
        serde::Serialize::serialize(&strs, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Ratio; 2], D::Error> {
        let v = <[String; 2]>::deserialize(d)?;
        let p = |s: &str| crate::regularity::parse_ratio(s).map_err(serde::de::Error::custom);
        Ok([p(&v[0])?, p(&v[1])?])
    }
}

impl PipelineConfig {
    /// Complete-host configuration with the crate defaults: `k = 6`,
    /// `eps = 1/200`, `beta = 1`.
    pub fn new(alpha1: Ratio, alpha2: Ratio, xi: Ratio) -> Self {
        PipelineConfig {
            mode: PipelineMode::Complete,
            alphas: [alpha1, alpha2],
            xi,
            k: 6,
            eps: Ratio::new(1, 200),
            beta: Ratio::from_integer(1),
            rule: None,
            n: None,
            seed: 0,
            probes: 8,
            exec: Exec::default(),
            timing: false,
        }
    }

    /// Minimum-degree configuration: degree-form reduced graph with `d = xi`.
    pub fn min_degree(xi: Ratio) -> Self {
        let one = Ratio::from_integer(1);
        PipelineConfig { mode: PipelineMode::MinDegree, ..Self::new(one, one, xi) }
    }

    pub fn rule(&self) -> ReductionRule {
        self.rule.unwrap_or(match self.mode {
            PipelineMode::Complete => ReductionRule::MajorityHalfEps { eps: self.eps },
            PipelineMode::MinDegree => ReductionRule::DegreeForm { d: self.xi },
        })
    }

    /// `N / n` lower bound: `alpha_1 + alpha_2 + 8 xi`, or `2 + 8 xi`.
    pub fn denominator(&self) -> Ratio {
        let eight_xi = Ratio::from_integer(8) * self.xi;
        match self.mode {
            PipelineMode::Complete => self.alphas[0] + self.alphas[1] + eight_xi,
            PipelineMode::MinDegree => Ratio::from_integer(2) + eight_xi,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageStatus {
    Ok,
    /// Completed, but a checkable hypothesis was not confirmed.
    Flagged,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub status: StageStatus,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

/// Length accounting for the stitched color. `max_length` is
/// `t + 2 a floor(m - 5 eps m / beta)`, compared against
/// `2a (1 - 5 eps)(1 - eps) N / k + t`; `reachable` is the smaller ceiling left
/// once anchors have been taken out of the clusters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Accounting {
    pub max_length: usize,
    pub reachable: usize,
    #[serde(with = "ratio_serde")]
    pub bound: Ratio,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub config: PipelineConfig,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    /// Target cycle length per color (0 when the color has no target).
    pub targets: Vec<usize>,
    pub stages: Vec<Stage>,
    pub reduced: Option<ReducedColoredGraph>,
    pub matchings: Vec<ConnectedMatchingCertificate>,
    pub walk: Option<WalkPlan>,
    pub plan: Option<StitchPlan>,
    pub accounting: Option<Accounting>,
    pub certificate: Option<CycleCertificate>,
}

impl PipelineReport {
    pub fn color(&self) -> Option<Color> {
        self.certificate.as_ref().map(|c| c.color)
    }

    pub fn succeeded(&self) -> bool {
        self.certificate.is_some()
    }

    /// Name of the first failed stage.
    pub fn failed_stage(&self) -> Option<&str> {
        self.stages.iter().find(|s| s.status == StageStatus::Failed).map(|s| s.name.as_str())
    }
}

struct Recorder {
    stages: Vec<Stage>,
    timing: bool,
    clock: Instant,
}

impl Recorder {
    fn push(&mut self, name: impl Into<String>, status: StageStatus, detail: impl Into<String>) {
        let millis = self.timing.then(|| self.clock.elapsed().as_millis() as u64);
        self.stages.push(Stage { name: name.into(), status, detail: detail.into(), millis });
        self.clock = Instant::now();
    }
}

/// Looks for a monochromatic cycle of the target length in some color.
///
/// Errors are precondition rejections (wrong color count, host not complete
/// or below the degree threshold, `N` too small for the requested `n`).
/// Stage failures are reported in the returned report.
pub fn find_long_mono_cycle(g: &ColoredBipartiteGraph, cfg: &PipelineConfig) -> Result<PipelineReport> {
    if g.r() != 2 {
        return Err(Error::invalid(format!("the pipeline needs a 2-colored graph, got r = {}", g.r())));
    }
    if g.n1() != g.n2() {
        return Err(Error::invalid("the pipeline needs equal sides"));
    }
    if cfg.xi <= Ratio::from_integer(0) || cfg.alphas.iter().any(|a| *a <= Ratio::from_integer(0)) {
        return Err(Error::invalid("alpha and xi must be positive"));
    }
    let big_n = g.n1();
    let nn = Ratio::from_integer(big_n as i64);
    match cfg.mode {
        PipelineMode::Complete if !g.is_complete() => return Err(Error::invalid("host graph is not complete")),
        PipelineMode::MinDegree => {
            let need = (Ratio::new(7, 8) + Ratio::from_integer(9) * cfg.xi) * nn;
            if Ratio::from_integer(g.min_degree() as i64) <= need {
                return Err(Error::invalid(format!("minimum degree {} is not above {}", g.min_degree(), need)));
            }
        }
        _ => {}
    }
    let denom = cfg.denominator();
    let n = match cfg.n {
        Some(n) => {
            if nn < denom * Ratio::from_integer(n as i64) {
                return Err(Error::invalid(format!("N = {big_n} is below ({denom}) * {n}")));
            }
            n
        }
        None => (nn / denom).floor().to_integer() as usize,
    };
    let targets: Vec<usize> = match cfg.mode {
        PipelineMode::Complete => cfg.alphas.iter().map(|a| 2 * (*a * Ratio::from_integer(n as i64)).floor().to_integer() as usize).collect(),
        PipelineMode::MinDegree => vec![2 * n; 2],
    };
    if targets.iter().all(|&t| t < 4) {
        return Err(Error::invalid(format!("n = {n} gives no target cycle of length at least 4")));
    }

    let mut rec = Recorder { stages: Vec::new(), timing: cfg.timing, clock: Instant::now() };
    let mut report = PipelineReport {
        config: cfg.clone(),
        big_n,
        n,
        k: cfg.k,
        m: 0,
        targets: targets.clone(),
        stages: Vec::new(),
        reduced: None,
        matchings: Vec::new(),
        walk: None,
        plan: None,
        accounting: None,
        certificate: None,
    };
    rec.push("precondition", StageStatus::Ok, format!("N = {big_n}, n = {n}, targets {targets:?}"));

    let partition = match ClusterPartition::uniform(big_n, big_n, cfg.k) {
        Ok(p) => p,
        Err(e) => {
            rec.push("partition", StageStatus::Failed, e.to_string());
            report.stages = rec.stages;
            return Ok(report);
        }
    };
    report.m = partition.m();
    rec.push("partition", StageStatus::Ok, format!("k = {}, m = {}, |X0| = {}", cfg.k, partition.m(), partition.x0.len()));

    // Witness-mode regularity audit; Unknown pairs are used anyway.
    let jobs: Vec<(usize, usize, Color)> =
        (0..cfg.k).flat_map(|i| (0..cfg.k).flat_map(move |j| [(i, j, 1), (i, j, 2)])).collect();
    let outcomes = cfg.exec.map(&jobs, |&(i, j, c)| {
        let view = g.color_view(c);
        let mode = RegularityMode::Witness { seed: cfg.seed ^ ((i * cfg.k + j) as u64 * 2 + c as u64), probes: cfg.probes };
        is_eps_regular(&view, &partition.x_clusters[i], &partition.y_clusters[j], cfg.eps, &mode)
    });
    let irregular = outcomes.iter().filter(|o| matches!(o, Ok(RegularityOutcome::Irregular { .. }))).count();
    rec.push(
        "regularity",
        StageStatus::Flagged,
        format!("{irregular} of {} pair-colors irregular by witness, the rest unconfirmed", jobs.len()),
    );

    let h = match reduced_graph_with(g, &partition, cfg.rule(), cfg.exec) {
        Ok(h) => h,
        Err(e) => {
            rec.push("reduced_graph", StageStatus::Failed, e.to_string());
            report.stages = rec.stages;
            return Ok(report);
        }
    };
    let counts = [1, 2].map(|c| h.colors.iter().filter(|&&x| x == c).count());
    let status = if h.audit() { StageStatus::Ok } else { StageStatus::Failed };
    rec.push("reduced_graph", status, format!("{} red and {} blue reduced edges of {}", counts[0], counts[1], cfg.k * cfg.k));
    let hg = h.as_graph();
    let matchings = best_connected_matchings_with(&hg, cfg.exec);
    rec.push(
        "connected_matching",
        StageStatus::Ok,
        format!("saturated: red {}, blue {}", matchings[0].saturated, matchings[1].saturated),
    );
    report.reduced = Some(h.clone());
    report.matchings = matchings.clone();

    let opts = StitchOptions { beta: cfg.beta, eps: cfg.eps, seed: cfg.seed, exec: cfg.exec };
    for (ci, cert) in matchings.iter().enumerate() {
        let color = (ci + 1) as Color;
        let target = targets[ci];
        let stage = |s: &str| format!("{s}[{color}]");
        if target < 4 {
            rec.push(stage("walk"), StageStatus::Failed, format!("target {target} too short"));
            continue;
        }
        let plan = match walk_plan(&h, color, cert) {
            Ok(p) => p,
            Err(e) => {
                rec.push(stage("walk"), StageStatus::Failed, e.to_string());
                continue;
            }
        };
        rec.push(stage("walk"), StageStatus::Ok, format!("t = {}, {} matched steps", plan.t, plan.matched.len()));
        match stitch_long_cycle(g, &partition, &h, &plan, target, &opts) {
            Ok(res) => {
                let a = plan.matched.len() as i64;
                let one = Ratio::from_integer(1);
                let bound = Ratio::from_integer(2 * a)
                    * (one - Ratio::from_integer(5) * cfg.eps)
                    * (one - cfg.eps)
                    * Ratio::new(big_n as i64, cfg.k as i64)
                    + Ratio::from_integer(plan.t as i64);
                let max_l = PairParams { m: partition.m(), beta: cfg.beta, eps: cfg.eps }.max_l();
                let max_length = plan.t + 2 * plan.matched.len() * max_l;
                let reachable = res.plan.max_length();
                let holds = Ratio::from_integer(max_length as i64) >= bound;
                let flagged = res.paths.iter().any(|p| !p.hypotheses.all_hold()) || !holds;
                let status = if flagged { StageStatus::Flagged } else { StageStatus::Ok };
                rec.push(stage("stitch"), status, format!("l = {:?}, max length {max_length}, reachable {reachable}", res.plan.lengths));
                let verified = verify_cycle(g, &res.certificate);
                rec.push(
                    "verify",
                    if verified.is_ok() { StageStatus::Ok } else { StageStatus::Failed },
                    match verified {
                        Ok(()) => format!("color {color} cycle of length {}", res.certificate.length),
                        Err(d) => d.to_string(),
                    },
                );
                report.walk = Some(plan);
                report.accounting = Some(Accounting { max_length, reachable, bound, holds });
                report.plan = Some(res.plan);
                report.certificate = Some(res.certificate);
                break;
            }
            Err(e) => rec.push(stage("stitch"), StageStatus::Failed, e.to_string()),
        }
    }
    report.stages = rec.stages;
    Ok(report)
}
