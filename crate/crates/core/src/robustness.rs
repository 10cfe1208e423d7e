//! Robustness margins for additive edge-weight uncertainty and sector
//! conditions for nonlinear edge couplings.
//!
//! Everything is expressed through `M11(s) = Pᵀ Rᵀ (sI + L_ess)⁻¹ L_e(F) R P`,
//! whose zero-frequency value is `Pᵀ Rᵀ (R W Rᵀ)⁻¹ R P`, the resistance
//! matrix of the uncertain edges.

use std::collections::BTreeMap;

use ndarray::{s, Array2};
use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ForestDecomposition, WeightedGraph};
use crate::linalg::{symmetrize, Lu};
use crate::resistance::ResistanceOperator;
use crate::scalar::Real;
use crate::spectral;
use crate::stability::{classify_stability, first_overlap, StabilityClass};

/// Uncertain edge set `E_Δ` with the norm bound `δ̄`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UncertaintySpec<T> {
    pub uncertain_edges: Vec<usize>,
    pub bound: T,
}

impl<T: Real> UncertaintySpec<T> {
    pub fn new(uncertain_edges: Vec<usize>, bound: T) -> Result<Self> {
        if !(bound >= T::zero()) || !bound.is_finite() {
            return Err(Error::InvalidArgument("uncertainty bound must be finite and nonnegative".into()));
        }
        let mut sorted = uncertain_edges.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!("edge {} listed twice", w[0])));
        }
        Ok(Self { uncertain_edges, bound })
    }

    pub fn all_edges(g: &WeightedGraph<T>) -> Self {
        Self { uncertain_edges: (0..g.edge_count()).collect(), bound: T::zero() }
    }

    pub fn single(edge: usize) -> Self {
        Self { uncertain_edges: vec![edge], bound: T::zero() }
    }

    /// Selection matrix `P` (`|E| × |E_Δ|`).
    pub fn selection_matrix(&self, edge_count: usize) -> Array2<T> {
        let mut p = Array2::zeros((edge_count, self.uncertain_edges.len()));
        for (j, &k) in self.uncertain_edges.iter().enumerate() {
            p[[k, j]] = T::one();
        }
        p
    }

    fn validate(&self, g: &WeightedGraph<T>) -> Result<()> {
        self.uncertain_edges.iter().try_for_each(|&k| g.check_edge(k))
    }
}

/// Per-edge sectors `[α_i, β_i]`, aligned with `UncertaintySpec::uncertain_edges`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorSpec<T> {
    pub sectors: Vec<(T, T)>,
}

impl<T: Real> SectorSpec<T> {
    pub fn new(sectors: Vec<(T, T)>) -> Result<Self> {
        for (i, &(a, b)) in sectors.iter().enumerate() {
            if !a.is_finite() || !b.is_finite() || a >= b {
                return Err(Error::InvalidArgument(format!("sector {i} is not of the form [a, b] with a < b")));
            }
        }
        Ok(Self { sectors })
    }

    pub fn uniform(count: usize, alpha: T, beta: T) -> Result<Self> {
        Self::new(vec![(alpha, beta); count])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginMethod {
    ExactSingleEdge,
    SmallGain,
    UniformWeight,
    DisjointPaths,
}

impl MarginMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::ExactSingleEdge => "exact_single_edge",
            Self::SmallGain => "small_gain",
            Self::UniformWeight => "uniform_weight",
            Self::DisjointPaths => "disjoint_paths",
        }
    }
}

/// The four quantities of the `M11(0)` sandwich.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichBounds<T> {
    /// `(max_{E_Δ} w)⁻¹`.
    pub inv_max_weight: T,
    /// `max_{E_Δ} R_e`, the largest diagonal entry of `M11(0)`.
    pub max_edge_resistance: T,
    pub sigma_bar_m11: T,
    /// `trace M11(0)`.
    pub r_total: T,
}

impl<T: Real> SandwichBounds<T> {
    /// `max_edge_resistance ≤ sigma_bar_m11 ≤ r_total` up to relative `tol`.
    pub fn ordered(&self, tol: T) -> bool {
        let slack = tol * self.r_total.abs().max(T::one());
        self.max_edge_resistance <= self.sigma_bar_m11 + slack && self.sigma_bar_m11 <= self.r_total + slack
    }

    /// The weight lower bound `inv_max_weight ≤ max_edge_resistance`; it can
    /// fail (unit triangle: 1 against 2/3), so it is reported, not enforced.
    pub fn weight_bound_holds(&self) -> bool {
        self.inv_max_weight <= self.max_edge_resistance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginReport<T> {
    /// Open bound: perturbations strictly below it are tolerated. Infinite
    /// when there is no uncertain edge.
    pub global_margin: T,
    pub method: MarginMethod,
    /// Exact margin `1/R_e` of each listed edge taken alone.
    pub per_edge: BTreeMap<usize, T>,
    pub binding_edge: Option<usize>,
    pub bounds: Option<SandwichBounds<T>>,
}

impl<T: Real> MarginReport<T> {
    /// Whether a perturbation of norm `bound` is covered by the margin.
    pub fn certifies(&self, bound: T) -> bool {
        bound < self.global_margin
    }
}

/// Diagnostics of the two sector conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorVerdict<T> {
    pub stable: bool,
    /// `1 / σ̄(M11(0))`.
    pub gain_bound: T,
    pub max_abs_alpha: T,
    pub gain_ok: bool,
    /// Smallest eigenvalue of `2W + P(K² - 2K - I)Pᵀ`.
    pub quadratic_min: T,
    pub quadratic_ok: bool,
    /// Smallest eigenvalue of `2W - P(K - I)²Pᵀ`, the matrix appearing in
    /// the derivation; it differs from the stated condition in two signs.
    pub derivation_form_min: T,
    pub derivation_form_ok: bool,
    pub forms_disagree: bool,
}

/// Nominal data shared by the margin computations.
#[derive(Debug, Clone)]
pub struct MarginAnalysis<'g, T> {
    graph: &'g WeightedGraph<T>,
    operator: ResistanceOperator<T>,
    l_ess: Array2<T>,
    tol: T,
}

impl<'g, T: Real> MarginAnalysis<'g, T> {
    /// Fails with [`Error::NotNominallyStable`] unless `L ⪰ 0` with a single
    /// zero eigenvalue.
    pub fn new(graph: &'g WeightedGraph<T>, tol: T) -> Result<Self> {
        let verdict = classify_stability(graph, tol)?;
        if verdict.classification != StabilityClass::StableAgreement || verdict.component_count != 1 {
            return Err(Error::NotNominallyStable { signature: verdict.signature });
        }
        let operator = ResistanceOperator::new(graph)?;
        let l_ess = operator.forest().essential_edge_laplacian(&graph.weights());
        Ok(Self { graph, operator, l_ess, tol })
    }

    pub fn graph(&self) -> &WeightedGraph<T> {
        self.graph
    }

    pub fn forest(&self) -> &ForestDecomposition<T> {
        self.operator.forest()
    }

    fn columns_of_r(&self, edges: &[usize]) -> Array2<T> {
        let r = &self.forest().r;
        let mut out = Array2::zeros((r.nrows(), edges.len()));
        for (j, &k) in edges.iter().enumerate() {
            out.column_mut(j).assign(&r.column(k));
        }
        out
    }

    /// `M11(0) = Pᵀ Rᵀ (R W Rᵀ)⁻¹ R P`.
    pub fn m11_at_zero(&self, spec: &UncertaintySpec<T>) -> Result<Array2<T>> {
        spec.validate(self.graph)?;
        let rp = self.columns_of_r(&spec.uncertain_edges);
        let m = rp.t().dot(&self.operator.rwr_inverse().dot(&rp));
        Ok(symmetrize(&m.view()))
    }

    /// `M11(jω)`, solving `(jωI + L_ess) X = L_e(F) R P` through its real
    /// `2f × 2f` embedding.
    pub fn m11_frequency_response(&self, spec: &UncertaintySpec<T>, omega: T) -> Result<Array2<Complex<T>>> {
        spec.validate(self.graph)?;
        if !omega.is_finite() {
            return Err(Error::InvalidArgument("frequency must be finite".into()));
        }
        let rp = self.columns_of_r(&spec.uncertain_edges);
        let rhs = self.forest().le_forest.dot(&rp);
        let f = self.l_ess.nrows();
        let k = rp.ncols();
        let mut a = Array2::zeros((2 * f, 2 * f));
        a.slice_mut(s![..f, ..f]).assign(&self.l_ess);
        a.slice_mut(s![f.., f..]).assign(&self.l_ess);
        for i in 0..f {
            a[[i, f + i]] = -omega;
            a[[f + i, i]] = omega;
        }
        let mut b = Array2::zeros((2 * f, k));
        b.slice_mut(s![..f, ..]).assign(&rhs);
        let x = Lu::factor(&a.view())?.solve(&b.view());
        let re = rp.t().dot(&x.slice(s![..f, ..]));
        let im = rp.t().dot(&x.slice(s![f.., ..]));
        Ok(Array2::from_shape_fn((k, k), |(i, j)| Complex::new(re[[i, j]], im[[i, j]])))
    }

    /// `1 / R_e` for each listed edge.
    pub fn edge_margins(&self, edges: &[usize]) -> Result<BTreeMap<usize, T>> {
        edges
            .iter()
            .map(|&k| {
                self.graph.check_edge(k)?;
                let (u, v) = self.graph.edge(k).endpoints();
                Ok((k, T::one() / self.operator.resistance(u, v)?))
            })
            .collect()
    }

    pub fn sandwich_bounds(&self, spec: &UncertaintySpec<T>) -> Result<SandwichBounds<T>> {
        let m = self.m11_at_zero(spec)?;
        let bounds = self.sandwich_from(spec, &m)?;
        if !bounds.ordered(self.tol) {
            return Err(Error::Numerical(format!(
                "resistance sandwich violated: max R_e = {}, sigma = {}, trace = {}",
                bounds.max_edge_resistance, bounds.sigma_bar_m11, bounds.r_total
            )));
        }
        Ok(bounds)
    }

    fn sandwich_from(&self, spec: &UncertaintySpec<T>, m: &Array2<T>) -> Result<SandwichBounds<T>> {
        let max_w = spec
            .uncertain_edges
            .iter()
            .map(|&k| self.graph.edge(k).weight)
            .fold(T::neg_infinity(), T::max);
        Ok(SandwichBounds {
            inv_max_weight: T::one() / max_w,
            max_edge_resistance: m.diag().iter().copied().fold(T::neg_infinity(), T::max),
            sigma_bar_m11: spectral::spectral_norm(&m.view())?,
            r_total: m.diag().iter().fold(T::zero(), |s, &x| s + x),
        })
    }

    fn is_uniform_full(&self, spec: &UncertaintySpec<T>) -> Option<T> {
        let m = self.graph.edge_count();
        if spec.uncertain_edges.len() != m || m == 0 {
            return None;
        }
        let w0 = self.graph.edge(0).weight;
        (w0 > T::zero() && self.graph.edges().iter().all(|e| e.weight == w0)).then_some(w0)
    }

    /// Small-gain margin `1 / σ̄(M11(0))`, promoted to the exact single-edge
    /// result or the uniform-weight result when those apply.
    pub fn small_gain_margin(&self, spec: &UncertaintySpec<T>) -> Result<MarginReport<T>> {
        let m = self.m11_at_zero(spec)?;
        let per_edge = self.edge_margins(&spec.uncertain_edges)?;
        if spec.uncertain_edges.is_empty() {
            return Ok(MarginReport {
                global_margin: T::infinity(),
                method: MarginMethod::SmallGain,
                per_edge,
                binding_edge: None,
                bounds: None,
            });
        }
        let bounds = self.sandwich_from(spec, &m)?;
        if !bounds.ordered(self.tol) {
            return Err(Error::Numerical("resistance sandwich violated".into()));
        }
        let (global_margin, method, binding_edge) = if spec.uncertain_edges.len() == 1 {
            let k = spec.uncertain_edges[0];
            (per_edge[&k], MarginMethod::ExactSingleEdge, Some(k))
        } else if let Some(alpha) = self.is_uniform_full(spec) {
            (alpha, MarginMethod::UniformWeight, None)
        } else {
            (T::one() / bounds.sigma_bar_m11, MarginMethod::SmallGain, None)
        };
        Ok(MarginReport { global_margin, method, per_edge, binding_edge, bounds: Some(bounds) })
    }

    /// Exact margin of one edge: `1 / R_uv(G)`.
    pub fn single_edge_margin(&self, edge: usize) -> Result<MarginReport<T>> {
        let per_edge = self.edge_margins(&[edge])?;
        let spec = UncertaintySpec::single(edge);
        let bounds = self.sandwich_bounds(&spec)?;
        Ok(MarginReport {
            global_margin: per_edge[&edge],
            method: MarginMethod::ExactSingleEdge,
            per_edge,
            binding_edge: Some(edge),
            bounds: Some(bounds),
        })
    }

    /// Margin against an attacker perturbing any one edge: the smallest
    /// `1 / R_e`, attained across the largest edge resistance. Ties within
    /// relative `tol` resolve to the lowest edge index.
    pub fn worst_single_edge(&self) -> Result<MarginReport<T>> {
        let edges: Vec<usize> = (0..self.graph.edge_count()).collect();
        let spec = UncertaintySpec::all_edges(self.graph);
        let m = self.m11_at_zero(&spec)?;
        let per_edge: BTreeMap<usize, T> = edges.iter().map(|&k| (k, T::one() / m[[k, k]])).collect();
        let binding_edge = argmin_lowest(&per_edge, self.tol);
        let global_margin = binding_edge.map_or(T::infinity(), |k| per_edge[&k]);
        Ok(MarginReport {
            global_margin,
            method: MarginMethod::ExactSingleEdge,
            per_edge,
            binding_edge,
            bounds: None,
        })
    }

    /// Path sets in the whole graph for the uncertain edges.
    pub fn uncertain_path_sets(&self, spec: &UncertaintySpec<T>) -> Result<Vec<(usize, Vec<usize>)>> {
        spec.uncertain_edges
            .iter()
            .map(|&k| {
                let (u, v) = self.graph.edge(k).endpoints();
                Ok((k, self.graph.path_edge_set(u, v)?))
            })
            .collect()
    }

    /// Margin `min_e 1/R_e` for uncertain edges with pairwise disjoint path
    /// sets; [`Error::NotApplicable`] otherwise.
    pub fn disjoint_paths_margin(&self, spec: &UncertaintySpec<T>) -> Result<MarginReport<T>> {
        spec.validate(self.graph)?;
        let sets = self.uncertain_path_sets(spec)?;
        if let Some((a, b)) = first_overlap(&sets) {
            return Err(Error::NotApplicable(format!(
                "path sets of uncertain edges {a} and {b} overlap; use the small-gain margin"
            )));
        }
        let per_edge = self.edge_margins(&spec.uncertain_edges)?;
        let binding_edge = argmin_lowest(&per_edge, self.tol);
        let global_margin = binding_edge.map_or(T::infinity(), |k| per_edge[&k]);
        let bounds = if spec.uncertain_edges.is_empty() { None } else { Some(self.sandwich_bounds(spec)?) };
        Ok(MarginReport { global_margin, method: MarginMethod::DisjointPaths, per_edge, binding_edge, bounds })
    }

    /// Gain condition `max|α_i| < 1/σ̄(M11(0))` and quadratic condition
    /// `2W + P(K² - 2K - I)Pᵀ ≻ 0` with `K = diag(β_i - α_i)`.
    pub fn sector_stability_check(&self, spec: &UncertaintySpec<T>, sectors: &SectorSpec<T>) -> Result<SectorVerdict<T>> {
        if sectors.sectors.len() != spec.uncertain_edges.len() {
            return Err(Error::InvalidArgument(format!(
                "{} sectors for {} uncertain edges",
                sectors.sectors.len(),
                spec.uncertain_edges.len()
            )));
        }
        SectorSpec::new(sectors.sectors.clone())?;
        let m = self.m11_at_zero(spec)?;
        let sigma = spectral::spectral_norm(&m.view())?;
        let gain_bound = if sigma > T::zero() { T::one() / sigma } else { T::infinity() };
        let max_abs_alpha = sectors.sectors.iter().fold(T::zero(), |acc, &(a, _)| acc.max(a.abs()));
        let gain_ok = max_abs_alpha < gain_bound;

        let two = T::lit(2.0);
        let mut stated: Vec<T> = self.graph.edges().iter().map(|e| two * e.weight).collect();
        let mut derived = stated.clone();
        for (&k, &(a, b)) in spec.uncertain_edges.iter().zip(&sectors.sectors) {
            let width = b - a;
            stated[k] += width * width - two * width - T::one();
            derived[k] -= (width - T::one()) * (width - T::one());
        }
        // Both matrices are diagonal, so the smallest eigenvalue is the
        // smallest diagonal entry.
        let min_of = |d: &[T]| d.iter().copied().fold(T::infinity(), T::min);
        let quadratic_min = min_of(&stated);
        let derivation_form_min = min_of(&derived);
        let quadratic_ok = quadratic_min > self.tol;
        let derivation_form_ok = derivation_form_min > self.tol;
        Ok(SectorVerdict {
            stable: gain_ok && quadratic_ok,
            gain_bound,
            max_abs_alpha,
            gain_ok,
            quadratic_min,
            quadratic_ok,
            derivation_form_min,
            derivation_form_ok,
            forms_disagree: quadratic_ok != derivation_form_ok,
        })
    }

    /// Single-edge sector test: `|α| < 1/R_uv` and
    /// `(β-α)² - 2(β-α) - 1 > -2 w_uv`.
    pub fn single_edge_sector_check(&self, edge: usize, alpha: T, beta: T) -> Result<bool> {
        SectorSpec::new(vec![(alpha, beta)])?;
        let margin = self.edge_margins(&[edge])?[&edge];
        let width = beta - alpha;
        let two = T::lit(2.0);
        let w = self.graph.edge(edge).weight;
        Ok(alpha.abs() < margin && width * width - two * width - T::one() > -two * w)
    }
}

fn argmin_lowest<T: Real>(values: &BTreeMap<usize, T>, tol: T) -> Option<usize> {
    let min = values.values().copied().fold(T::infinity(), T::min);
    let slack = tol * min.abs().max(T::epsilon());
    values.iter().find(|(_, &v)| v <= min + slack).map(|(&k, _)| k)
}

pub fn m11_at_zero<T: Real>(g: &WeightedGraph<T>, spec: &UncertaintySpec<T>) -> Result<Array2<T>> {
    MarginAnalysis::new(g, T::default_tol())?.m11_at_zero(spec)
}

pub fn m11_frequency_response<T: Real>(
    g: &WeightedGraph<T>,
    spec: &UncertaintySpec<T>,
    omega: T,
) -> Result<Array2<Complex<T>>> {
    MarginAnalysis::new(g, T::default_tol())?.m11_frequency_response(spec, omega)
}

pub fn small_gain_margin<T: Real>(g: &WeightedGraph<T>, spec: &UncertaintySpec<T>) -> Result<MarginReport<T>> {
    MarginAnalysis::new(g, T::default_tol())?.small_gain_margin(spec)
}

pub fn single_edge_margin<T: Real>(g: &WeightedGraph<T>, edge: usize) -> Result<MarginReport<T>> {
    MarginAnalysis::new(g, T::default_tol())?.single_edge_margin(edge)
}

pub fn worst_single_edge<T: Real>(g: &WeightedGraph<T>) -> Result<MarginReport<T>> {
    MarginAnalysis::new(g, T::default_tol())?.worst_single_edge()
}

pub fn disjoint_paths_margin<T: Real>(g: &WeightedGraph<T>, spec: &UncertaintySpec<T>) -> Result<MarginReport<T>> {
    MarginAnalysis::new(g, T::default_tol())?.disjoint_paths_margin(spec)
}

pub fn sandwich_bounds<T: Real>(g: &WeightedGraph<T>, spec: &UncertaintySpec<T>) -> Result<SandwichBounds<T>> {
    MarginAnalysis::new(g, T::default_tol())?.sandwich_bounds(spec)
}

pub fn sector_stability_check<T: Real>(
    g: &WeightedGraph<T>,
    spec: &UncertaintySpec<T>,
    sectors: &SectorSpec<T>,
) -> Result<SectorVerdict<T>> {
    MarginAnalysis::new(g, T::default_tol())?.sector_stability_check(spec, sectors)
}

pub fn single_edge_sector_check<T: Real>(g: &WeightedGraph<T>, edge: usize, alpha: T, beta: T) -> Result<bool> {
    MarginAnalysis::new(g, T::default_tol())?.single_edge_sector_check(edge, alpha, beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::spectral::complex_spectral_norm;
    use approx::assert_relative_eq;

    fn unit_triangle() -> WeightedGraph<f64> {
        build_graph(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap()
    }

    fn with_weights(w: f64) -> WeightedGraph<f64> {
        build_graph(3, [(0, 1, w), (0, 2, w), (1, 2, w)]).unwrap()
    }

    #[test]
    fn nominal_instability_is_rejected() {
        let g = build_graph(3, [(0, 1, 1.0), (1, 2, -0.1)]).unwrap();
        assert!(matches!(
            small_gain_margin(&g, &UncertaintySpec::single(0)),
            Err(Error::NotNominallyStable { .. })
        ));
    }

    #[test]
    fn m11_examples() {
        let g = unit_triangle();
        let one = m11_at_zero(&g, &UncertaintySpec::single(0)).unwrap();
        assert_relative_eq!(one[[0, 0]], 2.0 / 3.0, max_relative = 1e-12);

        let g2 = with_weights(2.0);
        let all = m11_at_zero(&g2, &UncertaintySpec::all_edges(&g2)).unwrap();
        assert_relative_eq!(spectral::spectral_norm(&all.view()).unwrap(), 0.5, max_relative = 1e-12);

        let m = m11_at_zero(&g, &UncertaintySpec::all_edges(&g)).unwrap();
        assert_relative_eq!(m.diag().sum(), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn frequency_response_examples() {
        let g = unit_triangle();
        let spec = UncertaintySpec::single(1);
        let a = MarginAnalysis::new(&g, 1e-9).unwrap();
        let zero = a.m11_frequency_response(&spec, 0.0).unwrap();
        let real = a.m11_at_zero(&spec).unwrap();
        assert!((zero[[0, 0]].re - real[[0, 0]]).abs() < 1e-12 && zero[[0, 0]].im.abs() < 1e-12);

        let high = a.m11_frequency_response(&spec, 1e6).unwrap();
        assert!(complex_spectral_norm(&high.view()).unwrap() <= 1e-4);

        let peak = spectral::spectral_norm(&real.view()).unwrap();
        for w in [0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0] {
            let r = a.m11_frequency_response(&spec, w).unwrap();
            assert!(complex_spectral_norm(&r.view()).unwrap() <= peak + 1e-8);
        }
    }

    #[test]
    fn small_gain_examples() {
        let g = unit_triangle();
        let r = small_gain_margin(&g, &UncertaintySpec::single(2)).unwrap();
        assert_eq!(r.method, MarginMethod::ExactSingleEdge);
        assert_relative_eq!(r.global_margin, 1.5, max_relative = 1e-12);

        let g2 = with_weights(2.0);
        let r = small_gain_margin(&g2, &UncertaintySpec::all_edges(&g2)).unwrap();
        assert_eq!(r.method, MarginMethod::UniformWeight);
        assert_eq!(r.global_margin, 2.0);

        let mixed = build_graph(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0 + 1e-12)]).unwrap();
        let r = small_gain_margin(&mixed, &UncertaintySpec::all_edges(&mixed)).unwrap();
        assert_eq!(r.method, MarginMethod::SmallGain);
        assert_relative_eq!(r.global_margin, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn single_edge_examples() {
        let g = unit_triangle();
        for k in 0..3 {
            assert_relative_eq!(single_edge_margin(&g, k).unwrap().global_margin, 1.5, max_relative = 1e-12);
        }
        let pair = build_graph(2, [(0, 1, 0.7)]).unwrap();
        assert_relative_eq!(single_edge_margin(&pair, 0).unwrap().global_margin, 0.7, max_relative = 1e-12);
        // pendant bridge (2,3) weight 5
        let bridge = build_graph(4, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0), (2, 3, 5.0)]).unwrap();
        assert_relative_eq!(single_edge_margin(&bridge, 3).unwrap().global_margin, 5.0, max_relative = 1e-12);
    }

    #[test]
    fn worst_edge_examples() {
        let r = worst_single_edge(&unit_triangle()).unwrap();
        assert_eq!(r.binding_edge, Some(0));
        assert!(r.per_edge.values().all(|&m| (m - 1.5).abs() < 1e-12));

        let path = build_graph(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let r = worst_single_edge(&path).unwrap();
        assert_eq!(r.binding_edge, Some(0));
        assert_relative_eq!(r.global_margin, 1.0, max_relative = 1e-12);

        let star = build_graph(4, [(0, 1, 2.0), (0, 2, 1.0), (0, 3, 3.0)]).unwrap();
        let r = worst_single_edge(&star).unwrap();
        assert_eq!(r.binding_edge, Some(1));
        assert_relative_eq!(r.global_margin, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn disjoint_paths_examples() {
        let cactus = build_graph(
            5,
            [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (2, 3, 2.0), (3, 4, 2.0), (2, 4, 2.0)],
        )
        .unwrap();
        let r = disjoint_paths_margin(&cactus, &UncertaintySpec::new(vec![0, 5], 0.0).unwrap()).unwrap();
        assert_eq!(r.method, MarginMethod::DisjointPaths);
        assert_relative_eq!(r.global_margin, 1.5, max_relative = 1e-12);
        assert_eq!(r.binding_edge, Some(0));

        let g = unit_triangle();
        let one = disjoint_paths_margin(&g, &UncertaintySpec::single(1)).unwrap();
        assert_relative_eq!(one.global_margin, single_edge_margin(&g, 1).unwrap().global_margin);

        let cycle = build_graph(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0), (0, 2, 1.0), (1, 3, 1.0)])
            .unwrap();
        assert!(matches!(
            disjoint_paths_margin(&cycle, &UncertaintySpec::new(vec![4, 5], 0.0).unwrap()),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn sandwich_examples() {
        let g = unit_triangle();
        let b = sandwich_bounds(&g, &UncertaintySpec::all_edges(&g)).unwrap();
        assert_relative_eq!(b.inv_max_weight, 1.0);
        assert_relative_eq!(b.max_edge_resistance, 2.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(b.sigma_bar_m11, 1.0, max_relative = 1e-12);
        assert_relative_eq!(b.r_total, 2.0, max_relative = 1e-12);
        assert!(!b.weight_bound_holds());

        let b = sandwich_bounds(&g, &UncertaintySpec::single(0)).unwrap();
        assert_relative_eq!(b.max_edge_resistance, b.sigma_bar_m11, max_relative = 1e-12);

        let g3 = with_weights(3.0);
        let b = sandwich_bounds(&g3, &UncertaintySpec::all_edges(&g3)).unwrap();
        assert_relative_eq!(b.sigma_bar_m11, 1.0 / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn sector_examples() {
        let g = unit_triangle();
        let a = MarginAnalysis::new(&g, 1e-9).unwrap();
        let spec = UncertaintySpec::single(0);

        let small = a.sector_stability_check(&spec, &SectorSpec::new(vec![(0.0, 0.1)]).unwrap()).unwrap();
        assert!(small.stable);

        let r = 2.0 / 3.0;
        let gain = a.sector_stability_check(&spec, &SectorSpec::new(vec![(-2.0 / r, 0.0)]).unwrap()).unwrap();
        assert!(!gain.gain_ok && !gain.stable);

        let wide = a.sector_stability_check(&spec, &SectorSpec::new(vec![(-1.0, 1.0)]).unwrap()).unwrap();
        assert_relative_eq!(wide.quadratic_min, 1.0, max_relative = 1e-12);
        assert!(wide.stable);

        let light = build_graph(3, [(0, 1, 0.4), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        let v = sector_stability_check(&light, &spec, &SectorSpec::new(vec![(-0.5, 1.5)]).unwrap()).unwrap();
        assert!(!v.quadratic_ok);
        assert_relative_eq!(v.quadratic_min, -0.2, max_relative = 1e-12);

        assert!(SectorSpec::new(vec![(1.0, 1.0)]).is_err());
    }

    #[test]
    fn single_edge_sector_examples() {
        let g = unit_triangle();
        assert!(single_edge_sector_check(&g, 0, -1.0, 1.0).unwrap());
        assert!(!single_edge_sector_check(&g, 0, -1.6, 0.4).unwrap());
        let light = build_graph(3, [(0, 1, 0.4), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        assert!(!single_edge_sector_check(&light, 0, -0.5, 1.5).unwrap());
    }
}
