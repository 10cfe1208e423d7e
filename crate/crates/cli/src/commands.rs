use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};

use resistnet_core::experiment::{run_study, summarize, StudyConfig, MAX_STEPS};
use resistnet_core::graph::io::{read_graph, write_graph};
use resistnet_core::robustness::{MarginAnalysis, MarginReport, SandwichBounds, SectorSpec, SectorVerdict, UncertaintySpec};
use resistnet_core::simulation::{
    detect_clusters, laplacian_spectral_radius, nonlinear_spectral_bound, perturbed_weights, simulate_linear,
    simulate_nonlinear, suggested_duration, InitialState, NonlinearCoupling, OutputGraph, SimulationConfig,
    CLUSTER_TOL,
};
use resistnet_core::stability::{
    classify_stability, multi_negative_edge_thresholds, negative_cut_verdict, total_resistance_necessary_check,
    CutVerdict, StabilityClass, ThresholdOutcome, Witness,
};
use resistnet_core::{Error, Graph};

use crate::report::{document, num, nums, rounded};

/// Largest number of rows written to a trajectory CSV.
const MAX_CSV_ROWS: usize = 10_000;

pub enum Status {
    Success,
    /// Analytic "unstable" or "not applicable" outcome (exit code 2).
    Analytic,
}

pub struct Outcome {
    pub doc: Value,
    pub status: Status,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn new(doc: Value, status: Status) -> Self {
        Self { doc, status, warnings: Vec::new() }
    }
}

fn load(path: &Path) -> Result<Graph> {
    read_graph(path).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn bounds_value(b: &SandwichBounds<f64>) -> Value {
    json!({
        "inv_max_weight": num(b.inv_max_weight),
        "max_edge_resistance": num(b.max_edge_resistance),
        "sigma_bar_m11": num(b.sigma_bar_m11),
        "r_total": num(b.r_total),
        "weight_bound_holds": b.weight_bound_holds(),
    })
}

fn margin_value(r: &MarginReport<f64>) -> Value {
    json!({
        "method": r.method.as_str(),
        "global_margin": num(r.global_margin),
        "binding_edge": r.binding_edge,
        "per_edge": r.per_edge.iter().map(|(&k, &m)| json!({"edge": k, "margin": num(m)})).collect::<Vec<_>>(),
        "bounds": r.bounds.as_ref().map(bounds_value),
    })
}

fn sector_value(v: &SectorVerdict<f64>, alpha: f64, beta: f64) -> Value {
    json!({
        "sector": nums([alpha, beta]),
        "verdict": if v.stable { "stable" } else { "not_certified" },
        "gain_bound": num(v.gain_bound),
        "max_abs_alpha": num(v.max_abs_alpha),
        "gain_ok": v.gain_ok,
        "quadratic_min": num(v.quadratic_min),
        "quadratic_ok": v.quadratic_ok,
        "derivation_form_min": num(v.derivation_form_min),
        "derivation_form_ok": v.derivation_form_ok,
        "forms_disagree": v.forms_disagree,
    })
}

fn negative_edge_value(g: &Graph, tol: f64) -> Value {
    let negatives = g.signed_partition().negative_edges;
    if negatives.is_empty() {
        return Value::Null;
    }
    let cut = match negative_cut_verdict(g) {
        CutVerdict::IndefiniteByCut { cut_edges } => json!({"verdict": "indefinite_by_cut", "cut_edges": cut_edges}),
        CutVerdict::Inconclusive => json!({"verdict": "inconclusive", "cut_edges": []}),
    };
    let thresholds = match multi_negative_edge_thresholds(g) {
        Ok(ThresholdOutcome::Applicable(list)) => json!({
            "status": "applicable",
            "edges": list.iter().map(|t| json!({
                "edge": t.edge,
                "weight": num(t.weight),
                "threshold": num(t.threshold),
                "within": t.within,
            })).collect::<Vec<_>>(),
        }),
        Ok(ThresholdOutcome::NotApplicable { first, second }) => {
            json!({"status": "not_applicable", "overlapping_edges": [first, second]})
        }
        Err(e) => json!({"status": "unavailable", "reason": e.to_string()}),
    };
    let total = match total_resistance_necessary_check(g, tol) {
        Ok(c) => json!({
            "status": "computed",
            "inverse_weight_sum": num(c.inverse_weight_sum),
            "total_resistance": num(c.total_resistance),
            "passes": c.passes,
        }),
        Err(e) => json!({"status": "unavailable", "reason": e.to_string()}),
    };
    json!({"count": negatives.len(), "cut": cut, "thresholds": thresholds, "total_resistance_check": total})
}

pub fn analyze(path: &Path, tol: f64) -> Result<Outcome> {
    let g = load(path)?;
    let verdict = classify_stability(&g, tol)?;
    let witness = match &verdict.witness {
        Some(Witness::CutEdges(e)) => json!({"kind": "cut_edges", "edges": e}),
        Some(Witness::ViolatingEdges(e)) => json!({"kind": "violating_edges", "edges": e}),
        None => Value::Null,
    };
    let s = verdict.signature;
    let (margin, sandwich, margin_note) = match MarginAnalysis::new(&g, tol) {
        Ok(a) => {
            let worst = a.worst_single_edge()?;
            let all = a.small_gain_margin(&UncertaintySpec::all_edges(&g))?;
            (margin_value(&worst), json!({"all_edges": margin_value(&all)}), Value::Null)
        }
        Err(e) => (Value::Null, Value::Null, Value::String(e.to_string())),
    };
    let body = json!({
        "graph": {
            "nodes": g.node_count(),
            "edges": g.edge_count(),
            "components": verdict.component_count,
            "balanced": g.is_balanced(),
        },
        "stability": {
            "verdict": verdict.classification.as_str(),
            "signature": {"n_plus": s.n_plus, "n_minus": s.n_minus, "n_zero": s.n_zero},
            "witness": witness,
        },
        "negative_edges": negative_edge_value(&g, tol),
        "worst_single_edge": margin,
        "small_gain": sandwich,
        "margin_unavailable": margin_note,
    });
    let status =
        if verdict.classification == StabilityClass::Unstable { Status::Analytic } else { Status::Success };
    Ok(Outcome::new(document("analyze", body), status))
}

enum EdgeSelection {
    All,
    Single(usize),
    Set(Vec<usize>),
}

fn parse_index(s: &str) -> Result<usize> {
    s.trim().parse().with_context(|| format!("invalid edge index {s:?}"))
}

fn parse_edges(s: &str) -> Result<EdgeSelection> {
    if s == "all" {
        return Ok(EdgeSelection::All);
    }
    if let Some(k) = s.strip_prefix("single:") {
        return Ok(EdgeSelection::Single(parse_index(k)?));
    }
    if let Some(list) = s.strip_prefix("set:") {
        let edges = list.split(',').map(parse_index).collect::<Result<Vec<_>>>()?;
        return Ok(EdgeSelection::Set(edges));
    }
    bail!("--edges must be all, single:<k> or set:<k1,k2,...>, got {s:?}")
}

fn parse_pair(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s.split_once(',').ok_or_else(|| anyhow!("--sector expects a,b, got {s:?}"))?;
    Ok((a.trim().parse().context("sector lower bound")?, b.trim().parse().context("sector upper bound")?))
}

pub fn margin(path: &Path, edges: &str, sector: Option<&str>, tol: f64) -> Result<Outcome> {
    let g = load(path)?;
    let selection = parse_edges(edges)?;
    let sector = sector.map(parse_pair).transpose()?;
    let analysis = match MarginAnalysis::new(&g, tol) {
        Ok(a) => a,
        Err(e @ Error::NotNominallyStable { .. }) => {
            let body = json!({
                "status": "not_nominally_stable",
                "explanation": format!("{e}; margins need a nominally stable connected network (signature (n-1, 0, 1))"),
            });
            return Ok(Outcome::new(document("margin", body), Status::Analytic));
        }
        Err(e) => return Err(e.into()),
    };
    let mut warnings = Vec::new();
    let (spec, report) = match selection {
        EdgeSelection::All => {
            let spec = UncertaintySpec::all_edges(&g);
            let r = analysis.small_gain_margin(&spec)?;
            (spec, r)
        }
        EdgeSelection::Single(k) => (UncertaintySpec::single(k), analysis.single_edge_margin(k)?),
        EdgeSelection::Set(list) => {
            let spec = UncertaintySpec::new(list, 0.0)?;
            let r = match analysis.disjoint_paths_margin(&spec) {
                Ok(r) => r,
                Err(Error::NotApplicable(why)) => {
                    warnings.push(format!("warning: {why}; falling back to small_gain"));
                    analysis.small_gain_margin(&spec)?
                }
                Err(e) => return Err(e.into()),
            };
            (spec, r)
        }
    };
    let mut body = margin_value(&report);
    body["uncertain_edges"] = json!(spec.uncertain_edges);
    let mut status = Status::Success;
    if let Some((a, b)) = sector {
        let sectors = SectorSpec::uniform(spec.uncertain_edges.len(), a, b)?;
        let v = analysis.sector_stability_check(&spec, &sectors)?;
        if !v.stable {
            status = Status::Analytic;
        }
        body["sector_check"] = sector_value(&v, a, b);
    }
    Ok(Outcome { doc: document("margin", body), status, warnings })
}

fn parse_perturbation(s: &str) -> Result<(usize, f64)> {
    let (k, d) = s.split_once('=').ok_or_else(|| anyhow!("--perturb expects k=delta, got {s:?}"))?;
    Ok((parse_index(k)?, d.trim().parse().with_context(|| format!("invalid perturbation in {s:?}"))?))
}

fn parse_coupling(s: &str) -> Result<(usize, NonlinearCoupling<f64>)> {
    let (k, rest) = s.split_once('=').ok_or_else(|| anyhow!("--nonlinear expects k=a,b,c, got {s:?}"))?;
    let p: Vec<f64> = rest
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("invalid coupling parameters in {s:?}"))?;
    if p.len() != 3 {
        bail!("--nonlinear expects three parameters a,b,c, got {s:?}");
    }
    Ok((parse_index(k)?, NonlinearCoupling::new(p[0], p[1], p[2])?))
}

fn parse_x0(s: &str) -> Result<InitialState<f64>> {
    if let Some(seed) = s.strip_prefix("random:") {
        return Ok(InitialState::Random { seed: seed.trim().parse().context("invalid random seed")? });
    }
    let values = s.split(',').map(|x| x.trim().parse::<f64>()).collect::<Result<Vec<_>, _>>();
    Ok(InitialState::Given(values.with_context(|| format!("--x0 expects a comma list or random:<seed>, got {s:?}"))?))
}

pub struct SimulateArgs<'a> {
    pub graph: &'a Path,
    pub perturb: &'a [String],
    pub nonlinear: &'a [String],
    pub duration: Option<f64>,
    pub dt: Option<f64>,
    pub x0: Option<&'a str>,
    pub out: Option<&'a Path>,
}

pub fn simulate(args: &SimulateArgs<'_>, tol: f64) -> Result<Outcome> {
    let g = load(args.graph)?;
    let delta = args.perturb.iter().map(|s| parse_perturbation(s)).collect::<Result<Vec<_>>>()?;
    let couplings = args.nonlinear.iter().map(|s| parse_coupling(s)).collect::<Result<Vec<_>>>()?;
    if !delta.is_empty() && !couplings.is_empty() {
        bail!("--perturb and --nonlinear cannot be combined");
    }
    let initial = parse_x0(args.x0.unwrap_or("random:0"))?;
    let x0 = initial.resolve(g.node_count())?;

    let (bound, horizon) = if couplings.is_empty() {
        let w = perturbed_weights(&g, &delta)?;
        (laplacian_spectral_radius(&g, &w)?, suggested_duration(&g, &w, &x0, tol))
    } else {
        // Far from the origin each coupled edge acts like weight w + a; near
        // it the weight can drop to w + α.
        let (mut far, mut low) = (g.weights(), g.weights());
        for &(k, phi) in &couplings {
            g.edges().get(k).ok_or_else(|| anyhow!("coupling edge {k} does not exist"))?;
            far[k] += phi.a;
            low[k] += phi.sector().0;
        }
        let t = suggested_duration(&g, &far, &x0, tol).max(suggested_duration(&g, &low, &x0, tol));
        (nonlinear_spectral_bound(&g, &couplings)?, t)
    };
    let dt = args.dt.unwrap_or(if bound > 0.0 { 0.9 * 2.0 / bound } else { 0.01 });
    let duration = args.duration.unwrap_or_else(|| horizon.min(MAX_STEPS as f64 * dt).max(dt));
    let mut cfg = SimulationConfig::new(duration, dt, initial).with_output(OutputGraph::SameAsGraph);
    cfg.record_stride = cfg.steps().div_ceil(MAX_CSV_ROWS).max(1);

    let tr = if couplings.is_empty() {
        simulate_linear(&g, &delta, &cfg)?
    } else {
        simulate_nonlinear(&g, &couplings, &cfg)?
    };
    if let Some(out) = args.out {
        let file = File::create(out).with_context(|| format!("cannot create {}", out.display()))?;
        let mut w = BufWriter::new(file);
        tr.write_csv(&mut w).and_then(|_| w.flush()).with_context(|| format!("cannot write {}", out.display()))?;
    }
    let summary = summarize("simulation", &g, &cfg, &tr);
    let clusters = if tr.diverged { Vec::new() } else { detect_clusters(&tr.final_state, CLUSTER_TOL) };
    let body = json!({
        "outcome": summary.outcome.as_str(),
        "cluster_count": summary.cluster_count,
        "clusters": clusters,
        "duration": num(cfg.duration),
        "dt": num(cfg.dt),
        "steps": summary.steps,
        "divergence_time": summary.divergence_time.map(num),
        "final_disagreement": num(summary.final_disagreement),
        "trajectory_file": args.out.map(|p| p.display().to_string()),
    });
    Ok(Outcome::new(document("simulate", body), Status::Success))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

pub fn repro(nodes: usize, radius: f64, seed: u64, out: &Path, tol: f64) -> Result<Outcome> {
    let study = run_study(&StudyConfig { nodes, radius, seed, tol })?;
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let mut files: Vec<PathBuf> = Vec::new();

    let graph_path = out.join("graph.json");
    write_graph(&study.graph, &graph_path)?;
    files.push(graph_path);

    let mut points = String::from("node,x,y\n");
    for (i, (x, y)) in study.points.iter().enumerate() {
        points.push_str(&format!("{i},{x:.16e},{y:.16e}\n"));
    }
    let points_path = out.join("points.csv");
    write_file(&points_path, points.as_bytes())?;
    files.push(points_path);

    let report = document("repro_sec6", rounded(serde_json::to_value(&study.report)?));
    let report_path = out.join("report.json");
    write_file(&report_path, crate::report::to_json(&report).as_bytes())?;
    files.push(report_path);

    for (name, tr) in &study.trajectories {
        let path = out.join(format!("{name}.csv"));
        let mut buf = Vec::new();
        tr.write_csv(&mut buf)?;
        write_file(&path, &buf)?;
        files.push(path);
    }

    let r = &study.report;
    let body = json!({
        "seed": r.seed,
        "nodes": r.nodes,
        "radius": num(r.radius),
        "binding_edge": r.binding_edge,
        "binding_endpoints": [r.binding_endpoints.0, r.binding_endpoints.1],
        "binding_is_argmax_resistance": r.binding_edge == r.scan_argmax_edge,
        "max_edge_resistance": num(r.max_edge_resistance),
        "margin": num(r.margin),
        "runs": {
            "nominal": r.nominal.outcome.as_str(),
            "boundary": format!("{} ({} clusters)", r.boundary.outcome.as_str(), r.boundary.cluster_count),
            "beyond": r.beyond.outcome.as_str(),
            "nonlinear_unstable": r.nonlinear_unstable.run.outcome.as_str(),
            "nonlinear_stable": r.nonlinear_stable.run.outcome.as_str(),
            "nonlinear_reference": r.nonlinear_reference.run.outcome.as_str(),
        },
        "files": files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    });
    Ok(Outcome::new(document("repro_sec6_summary", body), Status::Success))
}
