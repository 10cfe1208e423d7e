use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::scalar::Real;

pub const MAX_RGG_ATTEMPTS: usize = 100;

/// SplitMix64 stream. Fixed here so that graph instances are reproducible
/// bit for bit across implementations.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

#[derive(Debug, Clone)]
pub struct GeometricGraph<T> {
    pub graph: WeightedGraph<T>,
    pub points: Vec<(f64, f64)>,
    /// Draws needed until the graph came out connected (1-based).
    pub attempts: usize,
}

/// `n` uniform points in the unit square (x then y per node), an edge for
/// every pair at distance `≤ radius` with weight `1 / distance`. Draws
/// continue from the same stream until the graph is connected.
pub fn generate_rgg_with_points<T: Real>(n: usize, radius: f64, seed: u64) -> Result<GeometricGraph<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument("random geometric graph needs at least 2 nodes".into()));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let mut rng = SplitMix64::new(seed);
    for attempt in 1..=MAX_RGG_ATTEMPTS {
        let points: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let x = rng.next_f64();
                let y = rng.next_f64();
                (x, y)
            })
            .collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let d = (points[i].0 - points[j].0).hypot(points[i].1 - points[j].1);
                // Coincident points (probability zero) carry no finite weight.
                if d <= radius && d > 0.0 {
                    edges.push((i, j, T::lit(1.0 / d)));
                }
            }
        }
        let graph = WeightedGraph::new(n, edges)?;
        if graph.is_connected() {
            return Ok(GeometricGraph { graph, points, attempts: attempt });
        }
    }
    Err(Error::Generation { attempts: MAX_RGG_ATTEMPTS })
}

pub fn generate_rgg<T: Real>(n: usize, radius: f64, seed: u64) -> Result<WeightedGraph<T>> {
    generate_rgg_with_points(n, radius, seed).map(|g| g.graph)
}
