//! Effective resistance through the Laplacian pseudoinverse and through the
//! edge form `xᵀ (R W Rᵀ)⁻¹ x` with `x = E_F^L (e_u - e_v)`.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::graph::{ForestDecomposition, WeightedGraph};
use crate::linalg::checked_symmetric_inverse;
use crate::scalar::Real;
use crate::spectral;

/// Relative singular-value cutoff for `R W Rᵀ`.
pub const SINGULAR_RATIO: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResistanceMethod {
    Pseudoinverse,
    #[default]
    EdgeForm,
}

pub(crate) fn singular_ratio<T: Real>() -> T {
    T::lit(SINGULAR_RATIO).max(T::epsilon() * T::lit(16.0))
}

/// Cached forest data and `(R W Rᵀ)⁻¹` for repeated resistance queries.
#[derive(Debug, Clone)]
pub struct ResistanceOperator<T> {
    forest: ForestDecomposition<T>,
    rwr_inv: Array2<T>,
}

impl<T: Real> ResistanceOperator<T> {
    pub fn new(g: &WeightedGraph<T>) -> Result<Self> {
        let forest = g.spanning_forest();
        Self::with_forest(g, forest)
    }

    pub fn with_forest(g: &WeightedGraph<T>, forest: ForestDecomposition<T>) -> Result<Self> {
        let rwr = forest.rwr(&g.weights());
        let rwr_inv = checked_symmetric_inverse(&rwr.view(), singular_ratio(), "R W R^T")?;
        Ok(Self { forest, rwr_inv })
    }

    pub fn forest(&self) -> &ForestDecomposition<T> {
        &self.forest
    }

    /// `(R W Rᵀ)⁻¹`.
    pub fn rwr_inverse(&self) -> &Array2<T> {
        &self.rwr_inv
    }

    fn pair_vector(&self, u: usize, v: usize) -> Array1<T> {
        let li = &self.forest.left_inverse;
        &li.column(u) - &li.column(v)
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<()> {
        let n = self.forest.component_labels.len();
        if u >= n || v >= n {
            return Err(Error::InvalidArgument(format!("node pair ({u}, {v}) outside 0..{n}")));
        }
        if u == v {
            return Err(Error::InvalidArgument(format!("resistance endpoints coincide (node {u})")));
        }
        if self.forest.component_labels[u] != self.forest.component_labels[v] {
            return Err(Error::InfiniteResistance { u, v });
        }
        Ok(())
    }

    pub fn resistance(&self, u: usize, v: usize) -> Result<T> {
        self.check_pair(u, v)?;
        let x = self.pair_vector(u, v);
        Ok(x.dot(&self.rwr_inv.dot(&x)))
    }

    /// `Xᵀ (R W Rᵀ)⁻¹ X` where column `k` of `X` is `E_F^L (e_u - e_v)` for
    /// the `k`-th pair.
    pub fn pair_resistance_matrix(&self, pairs: &[(usize, usize)]) -> Result<Array2<T>> {
        let f = self.forest.forest_size();
        let mut x = Array2::zeros((f, pairs.len()));
        for (k, &(u, v)) in pairs.iter().enumerate() {
            self.check_pair(u, v)?;
            x.column_mut(k).assign(&self.pair_vector(u, v));
        }
        let out = x.t().dot(&self.rwr_inv.dot(&x));
        Ok(crate::linalg::symmetrize(&out.view()))
    }

    /// Laplacian pseudoinverse assembled as `(E_F^L)ᵀ (R W Rᵀ)⁻¹ E_F^L`.
    pub fn laplacian_pseudoinverse(&self) -> Array2<T> {
        let li = &self.forest.left_inverse;
        let out = li.t().dot(&self.rwr_inv.dot(li));
        crate::linalg::symmetrize(&out.view())
    }
}

fn check_nodes<T: Real>(g: &WeightedGraph<T>, u: usize, v: usize) -> Result<()> {
    g.check_node(u)?;
    g.check_node(v)?;
    if u == v {
        return Err(Error::InvalidArgument(format!("resistance endpoints coincide (node {u})")));
    }
    let comps = g.connected_components();
    if !comps.same(u, v) {
        return Err(Error::InfiniteResistance { u, v });
    }
    Ok(())
}

/// `R_uv = (e_u - e_v)ᵀ L† (e_u - e_v)`; negative values are possible on
/// signed graphs and are returned as-is.
pub fn effective_resistance<T: Real>(
    g: &WeightedGraph<T>,
    u: usize,
    v: usize,
    method: ResistanceMethod,
) -> Result<T> {
    check_nodes(g, u, v)?;
    match method {
        ResistanceMethod::EdgeForm => ResistanceOperator::new(g)?.resistance(u, v),
        ResistanceMethod::Pseudoinverse => {
            let lp = spectral::pseudoinverse(&g.laplacian().view(), T::default_tol())?;
            Ok(lp[[u, u]] + lp[[v, v]] - lp[[u, v]] - lp[[v, u]])
        }
    }
}

fn require_connected<T: Real>(g: &WeightedGraph<T>) -> Result<()> {
    let c = g.connected_components().count;
    if c != 1 {
        return Err(Error::Disconnected { components: c });
    }
    Ok(())
}

/// Resistance matrix over an edge subset; diagonal entry `k` is the
/// resistance across the endpoints of `edge_subset[k]`.
pub fn resistance_matrix<T: Real>(g: &WeightedGraph<T>, edge_subset: &[usize]) -> Result<Array2<T>> {
    require_connected(g)?;
    for &k in edge_subset {
        g.check_edge(k)?;
    }
    let pairs: Vec<_> = edge_subset.iter().map(|&k| g.edge(k).endpoints()).collect();
    ResistanceOperator::new(g)?.pair_resistance_matrix(&pairs)
}

/// Trace of [`resistance_matrix`].
pub fn total_effective_resistance<T: Real>(g: &WeightedGraph<T>, edge_subset: &[usize]) -> Result<T> {
    let m = resistance_matrix(g, edge_subset)?;
    Ok(m.diag().iter().fold(T::zero(), |s, &x| s + x))
}
