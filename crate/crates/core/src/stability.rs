//! Definiteness of signed Laplacians: signature classification, the block
//! LMI test, negative cuts, and resistance thresholds for negative edges.

use ndarray::{s, Array2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::resistance::ResistanceOperator;
use crate::scalar::Real;
use crate::spectral::{self, Signature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityClass {
    StableAgreement,
    Marginal,
    Unstable,
}

impl StabilityClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::StableAgreement => "stable_agreement",
            Self::Marginal => "marginal",
            Self::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// Negative edges joining distinct components of the positive subgraph.
    CutEdges(Vec<usize>),
    /// Negative edges whose magnitude exceeds their resistance threshold.
    ViolatingEdges(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilityVerdict {
    pub classification: StabilityClass,
    pub signature: Signature,
    pub component_count: usize,
    pub witness: Option<Witness>,
}

/// Signature of `L` computed as `s(R W Rᵀ) + (0, 0, c)`.
pub fn laplacian_signature<T: Real>(g: &WeightedGraph<T>, tol: T) -> Result<Signature> {
    let forest = g.spanning_forest();
    let rwr = forest.rwr(&g.weights());
    Ok(spectral::signature_of(&rwr.view(), tol)? + Signature::new(0, 0, forest.component_count))
}

pub fn classify_stability<T: Real>(g: &WeightedGraph<T>, tol: T) -> Result<StabilityVerdict> {
    let signature = laplacian_signature(g, tol)?;
    let c = g.connected_components().count;
    let classification = if signature.n_minus > 0 {
        StabilityClass::Unstable
    } else if signature.n_zero > c {
        StabilityClass::Marginal
    } else {
        StabilityClass::StableAgreement
    };
    let witness = if classification == StabilityClass::Unstable { unstable_witness(g) } else { None };
    Ok(StabilityVerdict { classification, signature, component_count: c, witness })
}

fn unstable_witness<T: Real>(g: &WeightedGraph<T>) -> Option<Witness> {
    let cut = g.negative_cut_components();
    if cut.cut_exists {
        return Some(Witness::CutEdges(cut.cut_edges));
    }
    match multi_negative_edge_thresholds(g).ok()? {
        ThresholdOutcome::Applicable(list) => {
            let bad: Vec<usize> = list.iter().filter(|t| !t.within).map(|t| t.edge).collect();
            (!bad.is_empty()).then_some(Witness::ViolatingEdges(bad))
        }
        ThresholdOutcome::NotApplicable { .. } => None,
    }
}

/// PSD test of `[[|W₋|⁻¹, E₋ᵀ], [E₋, E₊ W₊ E₊ᵀ]]`, equivalent to `L ⪰ 0`.
pub fn lmi_psd_check<T: Real>(g: &WeightedGraph<T>, tol: T) -> Result<bool> {
    let part = g.signed_partition();
    if part.negative_edges.is_empty() {
        return spectral::is_psd(&g.laplacian().view(), tol);
    }
    let k = part.negative_edges.len();
    let n = g.node_count();
    let e_minus = g.incidence_of(&part.negative_edges);
    let (g_plus, _) = g.positive_subgraph();
    let mut block = Array2::zeros((k + n, k + n));
    for (i, &e) in part.negative_edges.iter().enumerate() {
        block[[i, i]] = T::one() / g.edge(e).weight.abs();
    }
    block.slice_mut(s![..k, k..]).assign(&e_minus.t());
    block.slice_mut(s![k.., ..k]).assign(&e_minus);
    block.slice_mut(s![k.., k..]).assign(&g_plus.laplacian());
    spectral::is_psd(&block.view(), tol)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum CutVerdict {
    IndefiniteByCut { cut_edges: Vec<usize> },
    Inconclusive,
}

/// A negative cut forces `L` to be indefinite whatever the magnitudes.
pub fn negative_cut_verdict<T: Real>(g: &WeightedGraph<T>) -> CutVerdict {
    let cut = g.negative_cut_components();
    if cut.cut_exists {
        CutVerdict::IndefiniteByCut { cut_edges: cut.cut_edges }
    } else {
        CutVerdict::Inconclusive
    }
}

fn positive_connected_operator<T: Real>(g_plus: &WeightedGraph<T>) -> Result<ResistanceOperator<T>> {
    if let Some(k) = g_plus.edges().iter().position(|e| e.weight <= T::zero()) {
        return Err(Error::Precondition(format!("positive subgraph has non-positive edge {k}")));
    }
    let c = g_plus.connected_components().count;
    if c != 1 {
        return Err(Error::Precondition(format!(
            "positive subgraph has {c} components; negative edges form a cut"
        )));
    }
    ResistanceOperator::new(g_plus)
}

/// Largest magnitude `μ` for which adding edge `(u, v)` with weight `-μ` to
/// the positive graph keeps the Laplacian PSD: `1 / R_uv(G₊)`.
pub fn single_negative_edge_threshold<T: Real>(g_plus: &WeightedGraph<T>, u: usize, v: usize) -> Result<T> {
    g_plus.check_node(u)?;
    g_plus.check_node(v)?;
    let op = positive_connected_operator(g_plus)?;
    Ok(T::one() / op.resistance(u, v)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeThreshold<T> {
    pub edge: usize,
    pub weight: T,
    pub threshold: T,
    /// `|w| ≤ threshold`.
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum ThresholdOutcome<T> {
    Applicable(Vec<EdgeThreshold<T>>),
    /// Path sets of these two negative edges share a positive edge.
    NotApplicable { first: usize, second: usize },
}

/// Path sets in `G₊` (original edge indices) for every negative edge.
pub fn negative_path_sets<T: Real>(g: &WeightedGraph<T>) -> Result<Vec<(usize, Vec<usize>)>> {
    let (g_plus, map) = g.positive_subgraph();
    g.signed_partition()
        .negative_edges
        .into_iter()
        .map(|k| {
            let (u, v) = g.edge(k).endpoints();
            let set = g_plus.path_edge_set(u, v)?.into_iter().map(|j| map[j]).collect();
            Ok((k, set))
        })
        .collect()
}

pub(crate) fn first_overlap(sets: &[(usize, Vec<usize>)]) -> Option<(usize, usize)> {
    for (i, (a, pa)) in sets.iter().enumerate() {
        for (b, pb) in &sets[i + 1..] {
            if pa.iter().any(|x| pb.binary_search(x).is_ok()) {
                return Some((*a, *b));
            }
        }
    }
    None
}

/// Per-negative-edge thresholds `1 / R_k(G₊)`, valid when the path sets of
/// the negative edges are pairwise disjoint.
pub fn multi_negative_edge_thresholds<T: Real>(g: &WeightedGraph<T>) -> Result<ThresholdOutcome<T>> {
    let (g_plus, _) = g.positive_subgraph();
    let op = positive_connected_operator(&g_plus)?;
    let sets = negative_path_sets(g)?;
    if let Some((first, second)) = first_overlap(&sets) {
        return Ok(ThresholdOutcome::NotApplicable { first, second });
    }
    let list = sets
        .iter()
        .map(|&(k, _)| {
            let e = g.edge(k);
            let threshold = T::one() / op.resistance(e.tail, e.head)?;
            Ok(EdgeThreshold { edge: k, weight: e.weight, threshold, within: e.weight.abs() <= threshold })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ThresholdOutcome::Applicable(list))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TotalResistanceCheck<T> {
    /// `Σ 1/|w_k|` over negative edges.
    pub inverse_weight_sum: T,
    /// `Σ R_k(G₊)` over negative-edge endpoint pairs.
    pub total_resistance: T,
    pub passes: bool,
}

/// Necessary condition for `L ⪰ 0`: `Σ 1/|w_k| ≥ Σ R_k(G₊)`. A failure
/// certifies indefiniteness. Equality is tested with relative slack `tol`.
pub fn total_resistance_necessary_check<T: Real>(g: &WeightedGraph<T>, tol: T) -> Result<TotalResistanceCheck<T>> {
    let (g_plus, _) = g.positive_subgraph();
    let op = positive_connected_operator(&g_plus)?;
    let negatives = g.signed_partition().negative_edges;
    let pairs: Vec<_> = negatives.iter().map(|&k| g.edge(k).endpoints()).collect();
    let rm = op.pair_resistance_matrix(&pairs)?;
    let total_resistance = rm.diag().iter().fold(T::zero(), |s, &x| s + x);
    let inverse_weight_sum = negatives.iter().fold(T::zero(), |s, &k| s + T::one() / g.edge(k).weight.abs());
    let slack = tol * total_resistance.abs().max(T::one());
    Ok(TotalResistanceCheck {
        inverse_weight_sum,
        total_resistance,
        passes: inverse_weight_sum + slack >= total_resistance,
    })
}
