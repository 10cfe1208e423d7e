//! Fixed-step RK4 integration of the consensus dynamics
//! `ẋ = -L x - E_Δ Φ(E_Δᵀ x) + v`, cluster detection, and seeded random
//! geometric graphs.

mod rgg;

use std::io::{self, Write};

use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::scalar::Real;
use crate::spectral;

pub use rgg::{generate_rgg, generate_rgg_with_points, GeometricGraph, SplitMix64, MAX_RGG_ATTEMPTS};

/// Divergence is declared once `‖x‖ > DIVERGENCE_FACTOR · (1 + ‖x(0)‖)`.
pub const DIVERGENCE_FACTOR: f64 = 1e9;
/// Default absolute tolerance for [`detect_clusters`].
pub const CLUSTER_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState<T> {
    Given(Vec<T>),
    /// Uniform on `[-1, 1)` from a [`SplitMix64`] stream.
    Random { seed: u64 },
}

impl<T: Real> InitialState<T> {
    pub fn resolve(&self, n: usize) -> Result<Vec<T>> {
        match self {
            Self::Given(x) if x.len() == n => {
                if x.iter().all(|v| v.is_finite()) {
                    Ok(x.clone())
                } else {
                    Err(Error::NonFinite)
                }
            }
            Self::Given(x) => Err(Error::InvalidArgument(format!(
                "initial state has {} entries for {n} nodes",
                x.len()
            ))),
            Self::Random { seed } => {
                let mut rng = SplitMix64::new(*seed);
                Ok((0..n).map(|_| T::lit(2.0 * rng.next_f64() - 1.0)).collect())
            }
        }
    }
}

/// Exogenous node input `v(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Input<T> {
    Zero,
    /// Constant `amplitude` on one node during `[start, start + duration)`.
    Burst { node: usize, amplitude: T, start: T, duration: T },
    /// Zero-order hold: row `i` applies from `times[i]` until `times[i+1]`.
    Table { times: Vec<T>, values: Vec<Vec<T>> },
}

impl<T: Real> Input<T> {
    fn validate(&self, n: usize) -> Result<()> {
        match self {
            Self::Zero => Ok(()),
            Self::Burst { node, .. } if *node >= n => {
                Err(Error::InvalidArgument(format!("burst node {node} outside 0..{n}")))
            }
            Self::Burst { .. } => Ok(()),
            Self::Table { times, values } => {
                if times.len() != values.len() || values.iter().any(|r| r.len() != n) {
                    return Err(Error::InvalidArgument("input table shape does not match the graph".into()));
                }
                if times.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidArgument("input table times must increase".into()));
                }
                Ok(())
            }
        }
    }

    fn add_to(&self, t: T, dx: &mut [T]) {
        match self {
            Self::Zero => {}
            Self::Burst { node, amplitude, start, duration } => {
                if t >= *start && t < *start + *duration {
                    dx[*node] += *amplitude;
                }
            }
            Self::Table { times, values } => {
                let idx = times.partition_point(|&s| s <= t);
                if idx > 0 {
                    for (d, &v) in dx.iter_mut().zip(&values[idx - 1]) {
                        *d += v;
                    }
                }
            }
        }
    }
}

/// Edges for the output `z = E(G_o)ᵀ x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutputGraph {
    None,
    SameAsGraph,
    /// `(tail, head)` pairs; `z_k = x_tail - x_head`.
    Edges(Vec<(usize, usize)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig<T> {
    pub duration: T,
    pub dt: T,
    pub initial_state: InitialState<T>,
    pub input: Input<T>,
    pub output_graph: OutputGraph,
    /// Keep every `record_stride`-th step; the final step is always kept.
    pub record_stride: usize,
}

impl<T: Real> SimulationConfig<T> {
    pub fn new(duration: T, dt: T, initial_state: InitialState<T>) -> Self {
        Self {
            duration,
            dt,
            initial_state,
            input: Input::Zero,
            output_graph: OutputGraph::SameAsGraph,
            record_stride: 1,
        }
    }

    pub fn with_output(mut self, output: OutputGraph) -> Self {
        self.output_graph = output;
        self
    }

    pub fn with_input(mut self, input: Input<T>) -> Self {
        self.input = input;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    /// Number of RK4 steps; the step actually taken is `duration / steps`.
    pub fn steps(&self) -> usize {
        let ratio = (self.duration / self.dt).to_f64().unwrap_or(f64::INFINITY);
        (ratio - 1e-9).ceil().max(1.0) as usize
    }

    fn validate(&self, g: &WeightedGraph<T>) -> Result<()> {
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(Error::InvalidArgument("dt must be positive".into()));
        }
        if !self.duration.is_finite() || self.duration < self.dt {
            return Err(Error::InvalidArgument("duration must be at least dt".into()));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidArgument("record stride must be positive".into()));
        }
        let n = g.node_count();
        if let OutputGraph::Edges(list) = &self.output_graph {
            if let Some(&(u, v)) = list.iter().find(|&&(u, v)| u >= n || v >= n) {
                return Err(Error::InvalidArgument(format!("output edge ({u}, {v}) outside 0..{n}")));
            }
        }
        self.input.validate(n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
    pub outputs: Vec<Vec<T>>,
    pub diverged: bool,
    pub divergence_time: Option<T>,
    /// State at the last integrated step (the divergence step if diverged).
    pub final_state: Vec<T>,
    pub steps_taken: usize,
}

impl<T: Real> Trajectory<T> {
    /// CSV with header `t,x0,..,x{n-1}[,z0,..]`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let n = self.states.first().map_or(0, Vec::len);
        let m = self.outputs.first().map_or(0, Vec::len);
        let mut header = String::from("t");
        for i in 0..n {
            header.push_str(&format!(",x{i}"));
        }
        for k in 0..m {
            header.push_str(&format!(",z{k}"));
        }
        writeln!(out, "{header}")?;
        for ((t, x), z) in self.times.iter().zip(&self.states).zip(&self.outputs) {
            let mut line = format!("{:.16e}", t.to_f64().unwrap_or(f64::NAN));
            for v in x.iter().chain(z) {
                line.push_str(&format!(",{:.16e}", v.to_f64().unwrap_or(f64::NAN)));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn final_output(&self) -> Option<&[T]> {
        self.outputs.last().map(Vec::as_slice)
    }
}

/// Per-edge coupling `φ(y) = a·y + b·sin(c·y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonlinearCoupling<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Real> NonlinearCoupling<T> {
    pub fn new(a: T, b: T, c: T) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::NonFinite);
        }
        if c == T::zero() {
            return Err(Error::InvalidArgument("coupling frequency c must be nonzero".into()));
        }
        Ok(Self { a, b, c })
    }

    pub fn eval(&self, y: T) -> T {
        self.a * y + self.b * (self.c * y).sin()
    }

    /// Sector `[a - |bc|, a + |bc|]`.
    pub fn sector(&self) -> (T, T) {
        let r = (self.b * self.c).abs();
        (self.a - r, self.a + r)
    }

    pub fn max_slope(&self) -> T {
        self.a.abs() + (self.b * self.c).abs()
    }
}

struct Dynamics<'a, T> {
    edges: Vec<(usize, usize, T)>,
    nonlinear: Vec<(usize, usize, NonlinearCoupling<T>)>,
    input: &'a Input<T>,
}

impl<T: Real> Dynamics<'_, T> {
    fn rhs(&self, t: T, x: &[T], dx: &mut [T]) {
        dx.iter_mut().for_each(|d| *d = T::zero());
        for &(a, b, w) in &self.edges {
            let flow = w * (x[a] - x[b]);
            dx[a] -= flow;
            dx[b] += flow;
        }
        for (a, b, phi) in &self.nonlinear {
            let flow = phi.eval(x[*a] - x[*b]);
            dx[*a] -= flow;
            dx[*b] += flow;
        }
        self.input.add_to(t, dx);
    }
}

fn norm<T: Real>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |s, &v| s + v * v).sqrt()
}

fn output_pairs<T: Real>(g: &WeightedGraph<T>, out: &OutputGraph) -> Vec<(usize, usize)> {
    match out {
        OutputGraph::None => Vec::new(),
        OutputGraph::SameAsGraph => g.edges().iter().map(|e| e.endpoints()).collect(),
        OutputGraph::Edges(list) => list.clone(),
    }
}

fn integrate<T: Real>(g: &WeightedGraph<T>, dynamics: &Dynamics<'_, T>, cfg: &SimulationConfig<T>) -> Result<Trajectory<T>> {
    let n = g.node_count();
    let mut x = cfg.initial_state.resolve(n)?;
    let pairs = output_pairs(g, &cfg.output_graph);
    let output = |x: &[T]| pairs.iter().map(|&(a, b)| x[a] - x[b]).collect::<Vec<T>>();
    let limit = T::lit(DIVERGENCE_FACTOR) * (T::one() + norm(&x));

    let steps = cfg.steps();
    let h = cfg.duration / T::from_usize_lossy(steps);
    let half = h * T::lit(0.5);
    let sixth = h / T::lit(6.0);

    let mut traj = Trajectory {
        times: vec![T::zero()],
        states: vec![x.clone()],
        outputs: vec![output(&x)],
        diverged: false,
        divergence_time: None,
        final_state: Vec::new(),
        steps_taken: 0,
    };
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n]);

    for step in 1..=steps {
        let t0 = h * T::from_usize_lossy(step - 1);
        dynamics.rhs(t0, &x, &mut k1);
        for i in 0..n {
            tmp[i] = x[i] + half * k1[i];
        }
        dynamics.rhs(t0 + half, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = x[i] + half * k2[i];
        }
        dynamics.rhs(t0 + half, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = x[i] + h * k3[i];
        }
        dynamics.rhs(t0 + h, &tmp, &mut k4);
        for i in 0..n {
            x[i] += sixth * (k1[i] + T::lit(2.0) * (k2[i] + k3[i]) + k4[i]);
        }

        let t = if step == steps { cfg.duration } else { h * T::from_usize_lossy(step) };
        let nx = norm(&x);
        let blown = !(nx <= limit);
        if blown || step % cfg.record_stride == 0 || step == steps {
            traj.times.push(t);
            traj.states.push(x.clone());
            traj.outputs.push(output(&x));
        }
        traj.steps_taken = step;
        if blown {
            traj.diverged = true;
            traj.divergence_time = Some(t);
            break;
        }
    }
    traj.final_state = x;
    Ok(traj)
}

fn check_step<T: Real>(dt: T, spectral_bound: T) -> Result<()> {
    if spectral_bound > T::zero() && dt >= T::lit(2.0) / spectral_bound {
        return Err(Error::StepTooLarge {
            dt: dt.to_f64().unwrap_or(f64::NAN),
            bound: (T::lit(2.0) / spectral_bound).to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Effective weights `w_k + δ_k` after additive perturbations.
pub fn perturbed_weights<T: Real>(g: &WeightedGraph<T>, delta: &[(usize, T)]) -> Result<Vec<T>> {
    let mut w = g.weights();
    for &(k, d) in delta {
        g.check_edge(k)?;
        if !d.is_finite() {
            return Err(Error::NonFinite);
        }
        w[k] += d;
    }
    Ok(w)
}

/// Spectral radius of `L` under the given edge weights.
pub fn laplacian_spectral_radius<T: Real>(g: &WeightedGraph<T>, weights: &[T]) -> Result<T> {
    spectral::spectral_radius(&g.laplacian_with_weights(weights).view())
}

/// A horizon long enough to show the outcome from `x0` under `weights`.
/// With `L ⪰ 0` it is `40/λ` for the slowest decaying mode; otherwise 1.2
/// times the time the fastest-growing mode needs to cross the divergence
/// threshold. Eigenvalues within `tol · max(1, max|λ|)` count as zero.
pub fn suggested_duration<T: Real>(g: &WeightedGraph<T>, weights: &[T], x0: &[T], tol: T) -> T {
    let eig = crate::linalg::symmetric_eigen(&g.laplacian_with_weights(weights).view());
    let thr = spectral::zero_threshold(&eig, tol);
    let lam = eig.values[0];
    if lam < -thr {
        let v = eig.vectors.column(0);
        let proj = v.iter().zip(x0).fold(T::zero(), |s, (&a, &b)| s + a * b).abs().max(T::lit(1e-12));
        let growth = (T::lit(DIVERGENCE_FACTOR) * (T::one() + norm(x0)) / proj).ln();
        return T::lit(1.2) * growth / -lam;
    }
    match eig.values.iter().find(|&&l| l > thr) {
        Some(&l) => T::lit(40.0) / l,
        None => T::one(),
    }
}

/// `ẋ = -L(G_δ) x + v` with `G_δ` the graph under additive weight
/// perturbations `delta` (edge index, δ). Requires `dt < 2 / ρ(L(G_δ))`.
pub fn simulate_linear<T: Real>(
    g: &WeightedGraph<T>,
    delta: &[(usize, T)],
    cfg: &SimulationConfig<T>,
) -> Result<Trajectory<T>> {
    cfg.validate(g)?;
    let weights = perturbed_weights(g, delta)?;
    check_step(cfg.dt, laplacian_spectral_radius(g, &weights)?)?;
    let edges = g.edges().iter().zip(&weights).map(|(e, &w)| (e.tail, e.head, w)).collect();
    integrate(g, &Dynamics { edges, nonlinear: Vec::new(), input: &cfg.input }, cfg)
}

/// Step bound used for nonlinear runs: `ρ(L) + max slope · λ_max(E_Δᵀ E_Δ)`.
pub fn nonlinear_spectral_bound<T: Real>(
    g: &WeightedGraph<T>,
    couplings: &[(usize, NonlinearCoupling<T>)],
) -> Result<T> {
    let rho = laplacian_spectral_radius(g, &g.weights())?;
    if couplings.is_empty() {
        return Ok(rho);
    }
    let idx: Vec<usize> = couplings.iter().map(|&(k, _)| k).collect();
    let e = g.incidence_of(&idx);
    let gram: Array2<T> = e.t().dot(&e);
    let lam = spectral::spectral_radius(&gram.view())?;
    let slope = couplings.iter().fold(T::zero(), |m, (_, c)| m.max(c.max_slope()));
    Ok(rho + slope * lam)
}

/// `ẋ = -L x - E_Δ Φ(E_Δᵀ x) + v` with `Φ` acting edgewise on the listed
/// edges, on top of their nominal weights.
pub fn simulate_nonlinear<T: Real>(
    g: &WeightedGraph<T>,
    couplings: &[(usize, NonlinearCoupling<T>)],
    cfg: &SimulationConfig<T>,
) -> Result<Trajectory<T>> {
    cfg.validate(g)?;
    let mut seen = vec![false; g.edge_count()];
    for &(k, _) in couplings {
        g.check_edge(k)?;
        if std::mem::replace(&mut seen[k], true) {
            return Err(Error::InvalidArgument(format!("edge {k} has two couplings")));
        }
    }
    check_step(cfg.dt, nonlinear_spectral_bound(g, couplings)?)?;
    let edges = g.edges().iter().map(|e| (e.tail, e.head, e.weight)).collect();
    let nonlinear = couplings
        .iter()
        .map(|&(k, c)| {
            let e = g.edge(k);
            (e.tail, e.head, c)
        })
        .collect();
    integrate(g, &Dynamics { edges, nonlinear, input: &cfg.input }, cfg)
}

/// Groups nodes whose values chain together with gaps `≤ tol`; groups are
/// ordered by smallest member and list members ascending.
pub fn detect_clusters<T: Real>(values: &[T], tol: T) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap_or(std::cmp::Ordering::Equal).then(i.cmp(&j)));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut prev: Option<T> = None;
    for &i in &order {
        match (prev, groups.last_mut()) {
            (Some(p), Some(g)) if values[i] - p <= tol => g.push(i),
            _ => groups.push(vec![i]),
        }
        prev = Some(values[i]);
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    groups.sort_by_key(|g| g[0]);
    groups
}
