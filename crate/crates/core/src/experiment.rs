//! Random-geometric-graph robustness study: locate the edge with the largest
//! effective resistance, then simulate the network nominally, exactly at
//! that edge's margin, just beyond it, and with nonlinear couplings on it.
//!
//! The reference study reports a binding resistance of 0.429 together with
//! the coupling `φ(y) = -3y + sin y`. Generated instances have a different
//! binding resistance `R*`, so the coupling is transported by the factor
//! `s = 0.429 / R*`: `φ(y) = -3s·y + s·sin y`. This keeps the coupling's
//! position relative to the margin `1/R*`. The untransported coupling is
//! simulated as well and reported for information.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::linalg::symmetric_eigen;
use crate::robustness::MarginAnalysis;
use crate::scalar::Real;
use crate::spectral::pseudoinverse;
use crate::simulation::{
    detect_clusters, generate_rgg_with_points, laplacian_spectral_radius, nonlinear_spectral_bound,
    perturbed_weights, simulate_linear, simulate_nonlinear, InitialState, NonlinearCoupling, OutputGraph,
    SimulationConfig, Trajectory, CLUSTER_TOL, DIVERGENCE_FACTOR,
};

/// Binding resistance of the reference instance.
pub const REFERENCE_RESISTANCE: f64 = 0.429;
/// Reference coupling `φ(y) = a·y + b·sin(c·y)`.
pub const REFERENCE_COUPLING: (f64, f64, f64) = (-3.0, 1.0, 1.0);
/// Linear part of the sector-satisfying coupling, in units of the margin.
pub const STABLE_COUPLING_A: f64 = -0.25;
/// Beyond-margin perturbation factor.
pub const BEYOND_FACTOR: f64 = 1.001;
/// Amplitude of the cut-aligned component in the nonlinear initial state.
pub const NONLINEAR_AMPLITUDE: f64 = 10.0;
/// Time step as a fraction of the explicit stability limit `2/ρ`.
pub const STEP_FRACTION: f64 = 0.9;
/// Convergence horizon in units of the slowest decay time.
pub const SETTLE_TIMES: f64 = 40.0;
/// Step budget per run; longer horizons are truncated.
pub const MAX_STEPS: usize = 2_000_000;
/// Recorded rows per trajectory (upper bound).
pub const MAX_ROWS: usize = 1000;

pub const DEFAULT_NODES: usize = 75;
pub const DEFAULT_RADIUS: f64 = 0.2;
pub const DEFAULT_SEED: u64 = 31;

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub nodes: usize,
    pub radius: f64,
    pub seed: u64,
    pub tol: f64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self { nodes: DEFAULT_NODES, radius: DEFAULT_RADIUS, seed: DEFAULT_SEED, tol: f64::default_tol() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunOutcome {
    Converged,
    Clustered,
    Diverged,
}

impl RunOutcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Converged => "converged",
            Self::Clustered => "clustered",
            Self::Diverged => "diverged",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub name: String,
    pub duration: f64,
    pub dt: f64,
    pub steps: usize,
    pub outcome: RunOutcome,
    pub cluster_count: usize,
    pub cluster_sizes: Vec<usize>,
    pub final_disagreement: f64,
    pub divergence_time: Option<f64>,
}

/// Summarizes a trajectory: diverged, one cluster, or several.
pub fn summarize(name: &str, g: &WeightedGraph<f64>, cfg: &SimulationConfig<f64>, tr: &Trajectory<f64>) -> RunSummary {
    let clusters = if tr.diverged { Vec::new() } else { detect_clusters(&tr.final_state, CLUSTER_TOL) };
    let outcome = if tr.diverged {
        RunOutcome::Diverged
    } else if clusters.len() <= 1 {
        RunOutcome::Converged
    } else {
        RunOutcome::Clustered
    };
    let x = &tr.final_state;
    let final_disagreement = g.edges().iter().map(|e| (x[e.tail] - x[e.head]).powi(2)).sum::<f64>().sqrt();
    RunSummary {
        name: name.to_string(),
        duration: cfg.duration,
        dt: cfg.dt,
        steps: tr.steps_taken,
        outcome,
        cluster_count: clusters.len(),
        cluster_sizes: clusters.iter().map(Vec::len).collect(),
        final_disagreement,
        divergence_time: tr.divergence_time,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingRun {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub sector: (f64, f64),
    pub sector_check: bool,
    pub run: RunSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyReport {
    pub nodes: usize,
    pub radius: f64,
    pub seed: u64,
    pub generation_attempts: usize,
    pub edge_count: usize,
    pub lambda_2: f64,
    pub spectral_radius: f64,
    pub binding_edge: usize,
    pub binding_endpoints: (usize, usize),
    pub binding_weight: f64,
    pub binding_is_bridge: bool,
    pub max_edge_resistance: f64,
    pub margin: f64,
    /// Argmax of an independent pseudoinverse-based resistance scan.
    pub scan_argmax_edge: usize,
    pub coupling_scale: f64,
    pub nominal: RunSummary,
    pub boundary: RunSummary,
    pub beyond: RunSummary,
    pub nonlinear_unstable: CouplingRun,
    pub nonlinear_stable: CouplingRun,
    pub nonlinear_reference: CouplingRun,
}

#[derive(Debug, Clone)]
pub struct StudyOutcome {
    pub report: StudyReport,
    pub graph: WeightedGraph<f64>,
    pub points: Vec<(f64, f64)>,
    /// `(name, trajectory)` for every simulation run.
    pub trajectories: Vec<(String, Trajectory<f64>)>,
}

fn sorted_eigenvalues(g: &WeightedGraph<f64>, weights: &[f64]) -> Vec<f64> {
    symmetric_eigen(&g.laplacian_with_weights(weights).view()).values
}

fn stride_for(duration: f64, dt: f64) -> usize {
    ((duration / dt).ceil() as usize).div_ceil(MAX_ROWS).max(1)
}

fn config(duration: f64, spectral_bound: f64, x0: &[f64], edge: (usize, usize)) -> SimulationConfig<f64> {
    let dt = STEP_FRACTION * 2.0 / spectral_bound;
    let duration = duration.min(MAX_STEPS as f64 * dt);
    SimulationConfig::new(duration.max(dt), dt, InitialState::Given(x0.to_vec()))
        .with_output(OutputGraph::Edges(vec![edge]))
        .with_stride(stride_for(duration, dt))
}

/// Horizon for a linear run with an unstable mode: the time for the
/// projection of `x0` on that mode to exceed the divergence threshold, with
/// 20% headroom.
fn escape_time(g: &WeightedGraph<f64>, weights: &[f64], x0: &[f64]) -> Option<f64> {
    let eig = symmetric_eigen(&g.laplacian_with_weights(weights).view());
    let lam = eig.values[0];
    if lam >= 0.0 {
        return None;
    }
    let v = eig.vectors.column(0);
    let proj = v.iter().zip(x0).map(|(a, b)| a * b).sum::<f64>().abs().max(1e-12);
    let x0_norm = x0.iter().map(|v| v * v).sum::<f64>().sqrt();
    let growth = (DIVERGENCE_FACTOR * (1.0 + x0_norm) / proj).ln();
    Some(1.2 * growth / -lam)
}

/// Convergence horizon `SETTLE_TIMES / λ` for the smallest eigenvalue above
/// the `zeros` structural zeros.
fn settle_time(eigs: &[f64], zeros: usize) -> Result<f64> {
    let lam = eigs.get(zeros).copied().unwrap_or(0.0);
    if lam <= 0.0 {
        return Err(Error::Numerical(format!("expected a positive eigenvalue after {zeros} zeros, got {lam}")));
    }
    Ok(SETTLE_TIMES / lam)
}

pub fn run_study(cfg: &StudyConfig) -> Result<StudyOutcome> {
    let geo = generate_rgg_with_points::<f64>(cfg.nodes, cfg.radius, cfg.seed)?;
    let g = geo.graph;
    let n = g.node_count();
    let analysis = MarginAnalysis::new(&g, cfg.tol)?;
    let worst = analysis.worst_single_edge()?;
    let k = worst.binding_edge.ok_or_else(|| Error::Numerical("graph has no edges".into()))?;
    let edge = *g.edge(k);
    let endpoints = edge.endpoints();
    let margin = worst.global_margin;
    let r_star = 1.0 / margin;

    // Independent check: resistances read off the spectral pseudoinverse.
    let lp = pseudoinverse(&g.laplacian().view(), cfg.tol)?;
    let scan: Vec<f64> = g
        .edges()
        .iter()
        .map(|e| lp[[e.tail, e.tail]] + lp[[e.head, e.head]] - 2.0 * lp[[e.tail, e.head]])
        .collect();
    let r_max = scan.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scan_argmax_edge = scan
        .iter()
        .position(|&r| r >= r_max - cfg.tol * r_max)
        .expect("nonempty scan");

    let nominal_w = g.weights();
    let nominal_eigs = sorted_eigenvalues(&g, &nominal_w);
    let rho = laplacian_spectral_radius(&g, &nominal_w)?;
    let x0 = InitialState::<f64>::Random { seed: cfg.seed }.resolve(n)?;
    let mut trajectories = Vec::new();

    let nominal_cfg = config(settle_time(&nominal_eigs, 1)?, rho, &x0, endpoints);
    let tr = simulate_linear(&g, &[], &nominal_cfg)?;
    let nominal = summarize("nominal", &g, &nominal_cfg, &tr);
    trajectories.push(("nominal".to_string(), tr));

    let boundary_delta = [(k, -margin)];
    let boundary_w = perturbed_weights(&g, &boundary_delta)?;
    let boundary_eig = symmetric_eigen(&g.laplacian_with_weights(&boundary_w).view());
    let boundary_cfg = config(settle_time(&boundary_eig.values, 2)?, laplacian_spectral_radius(&g, &boundary_w)?, &x0, endpoints);
    let tr = simulate_linear(&g, &boundary_delta, &boundary_cfg)?;
    let boundary = summarize("boundary", &g, &boundary_cfg, &tr);
    trajectories.push(("boundary".to_string(), tr));

    let beyond_delta = [(k, -BEYOND_FACTOR * margin)];
    let beyond_w = perturbed_weights(&g, &beyond_delta)?;
    let beyond_t = escape_time(&g, &beyond_w, &x0)
        .ok_or_else(|| Error::Numerical("beyond-margin Laplacian has no negative eigenvalue".into()))?;
    let beyond_cfg = config(beyond_t, laplacian_spectral_radius(&g, &beyond_w)?, &x0, endpoints);
    let tr = simulate_linear(&g, &beyond_delta, &beyond_cfg)?;
    let beyond = summarize("beyond", &g, &beyond_cfg, &tr);
    trajectories.push(("beyond".to_string(), tr));

    // Nonlinear runs start with a large split along the extra null direction
    // of the boundary Laplacian.
    let mode = cut_mode(&boundary_eig.vectors, n);
    let x0_nl: Vec<f64> = x0.iter().zip(&mode).map(|(a, m)| a + NONLINEAR_AMPLITUDE * m).collect();

    let scale = REFERENCE_RESISTANCE / r_star;
    let (ra, rb, rc) = REFERENCE_COUPLING;
    let couplings = [
        ("nonlinear_unstable", NonlinearCoupling::new(ra * scale, rb * scale, rc)?),
        ("nonlinear_stable", NonlinearCoupling::new(STABLE_COUPLING_A / r_star, rb * scale, rc)?),
        ("nonlinear_reference", NonlinearCoupling::new(ra, rb, rc)?),
    ];
    let mut coupling_runs = Vec::new();
    for (name, phi) in couplings {
        let run = coupling_run(&analysis, &g, k, phi, &x0_nl, &nominal_eigs, name)?;
        trajectories.push((name.to_string(), run.1));
        coupling_runs.push(run.0);
    }
    let nonlinear_reference = coupling_runs.pop().expect("three runs");
    let nonlinear_stable = coupling_runs.pop().expect("three runs");
    let nonlinear_unstable = coupling_runs.pop().expect("three runs");

    let report = StudyReport {
        nodes: n,
        radius: cfg.radius,
        seed: cfg.seed,
        generation_attempts: geo.attempts,
        edge_count: g.edge_count(),
        lambda_2: nominal_eigs[1],
        spectral_radius: rho,
        binding_edge: k,
        binding_endpoints: endpoints,
        binding_weight: edge.weight,
        binding_is_bridge: !g.without_edge(k).is_connected(),
        max_edge_resistance: r_star,
        margin,
        scan_argmax_edge,
        coupling_scale: scale,
        nominal,
        boundary,
        beyond,
        nonlinear_unstable,
        nonlinear_stable,
        nonlinear_reference,
    };
    Ok(StudyOutcome { report, graph: g, points: geo.points, trajectories })
}

/// Extra null vector of the boundary Laplacian, orthogonal to the ones
/// vector, scaled to unit max-norm with a nonnegative first nonzero entry.
fn cut_mode(vectors: &ndarray::Array2<f64>, n: usize) -> Vec<f64> {
    // Columns 0 and 1 span the null space; remove the consensus direction.
    let mut best = vec![0.0; n];
    let mut best_norm = 0.0;
    for col in 0..2.min(vectors.ncols()) {
        let v = vectors.column(col);
        let mean = v.sum() / n as f64;
        let w: Vec<f64> = v.iter().map(|x| x - mean).collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>();
        if norm > best_norm {
            best_norm = norm;
            best = w;
        }
    }
    let max = best.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return best;
    }
    let sign = best.iter().find(|x| x.abs() > 1e-12 * max).map_or(1.0, |x| x.signum());
    best.iter().map(|x| sign * x / max).collect()
}

fn coupling_run(
    analysis: &MarginAnalysis<'_, f64>,
    g: &WeightedGraph<f64>,
    k: usize,
    phi: NonlinearCoupling<f64>,
    x0: &[f64],
    nominal_eigs: &[f64],
    name: &str,
) -> Result<(CouplingRun, Trajectory<f64>)> {
    let (alpha, beta) = phi.sector();
    let sector_check = if alpha < beta { analysis.single_edge_sector_check(k, alpha, beta)? } else { false };
    // Far from the origin the sine term is bounded, so the edge behaves
    // like a linear edge of weight w + a.
    let mut far_w = g.weights();
    far_w[k] += phi.a;
    let mut worst_w = g.weights();
    worst_w[k] += phi.a - (phi.b * phi.c).abs();
    let worst_eigs = sorted_eigenvalues(g, &worst_w);
    let duration = match escape_time(g, &far_w, x0) {
        Some(t) => 2.0 * t,
        None if worst_eigs[1] > 0.0 => SETTLE_TIMES / worst_eigs[1],
        None => settle_time(nominal_eigs, 1)?,
    };
    let bound = nonlinear_spectral_bound(g, &[(k, phi)])?;
    let cfg = config(duration, bound, x0, g.edge(k).endpoints());
    let tr = simulate_nonlinear(g, &[(k, phi)], &cfg)?;
    let run = summarize(name, g, &cfg, &tr);
    Ok((CouplingRun { a: phi.a, b: phi.b, c: phi.c, sector: (alpha, beta), sector_check, run }, tr))
}
