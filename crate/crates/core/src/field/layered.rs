use std::f64::consts::LN_2;

use rand::Rng;
use rand_distr::StandardNormal;

use super::{FieldSample, GridSpec, SamplerKind};
use crate::rng;

/// Interpolation stencil of one coordinate: lower node, weight of the upper
/// node, and the factor restoring unit variance between nodes.
#[derive(Debug, Clone, Copy)]
struct Stencil {
    node: usize,
    t: f64,
    norm: f64,
}

struct Layer {
    nodes: usize,
    stencils: Vec<Stencil>,
}

impl Layer {
    fn new(j: u32, spec: &GridSpec) -> Self {
        // layer 0 is a single constant node; layer j >= 1 has nodes at the
        // vertices a 2^-j, a = 0..=2^j, of the dyadic lattice
        let nodes = if j == 0 { 1 } else { (1usize << j) + 1 };
        let cells = (1usize << j) as f64;
        let eps = spec.epsilon();
        let stencil = |x: f64| -> Stencil {
            if nodes == 1 {
                return Stencil { node: 0, t: 0.0, norm: 1.0 };
            }
            let u = x * cells;
            let node = (u.floor() as usize).min(nodes - 2);
            let t = u - node as f64;
            Stencil {
                node,
                t,
                norm: ((1.0 - t).powi(2) + t * t).sqrt().recip(),
            }
        };
        let stencils: Vec<Stencil> = (0..spec.n_per_side())
            .map(|i| stencil(i as f64 * eps))
            .collect();
        Layer { nodes, stencils }
    }

    fn add_to(&self, values: &mut [f64], noise: &[f64], n: usize) {
        let nodes = self.nodes;
        let at = |a: usize, b: usize| -> f64 {
            if a < nodes && b < nodes {
                noise[b * nodes + a]
            } else {
                0.0
            }
        };
        for (j, sy) in self.stencils.iter().enumerate() {
            for (i, sx) in self.stencils.iter().enumerate() {
                let (a, b) = (sx.node, sy.node);
                let v = (1.0 - sx.t) * (1.0 - sy.t) * at(a, b)
                    + sx.t * (1.0 - sy.t) * at(a + 1, b)
                    + (1.0 - sx.t) * sy.t * at(a, b + 1)
                    + sx.t * sy.t * at(a + 1, b + 1);
                values[j * n + i] += LN_2.sqrt() * sx.norm * sy.norm * v;
            }
        }
    }
}

/// Hierarchical field: for each scale `j = 1..=k`, i.i.d. normals of
/// variance `log 2` at the vertices of the dyadic lattice of mesh `2^-j`,
/// bilinearly interpolated, plus a constant layer for `j = 0`. Interpolated
/// values are rescaled pointwise so that every layer adds exactly `log 2` of
/// variance at every vertex; plain interpolation would leave only 4/9 of it
/// on average between nodes, flattening the covariance decay.
pub struct LayeredField {
    spec: GridSpec,
    layers: Vec<Layer>,
}

impl LayeredField {
    pub fn new(spec: GridSpec) -> Self {
        let layers = (0..=spec.level()).map(|j| Layer::new(j, &spec)).collect();
        LayeredField { spec, layers }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn working_bytes(&self) -> usize {
        2 * self.spec.vertex_count() * std::mem::size_of::<f64>()
    }

    fn layer_noise(&self, seed: u64, j: usize) -> Vec<f64> {
        let nodes = self.layers[j].nodes;
        let mut rng = rng::stream(rng::derive_seed(seed, &[j as u64]));
        (0..nodes * nodes).map(|_| rng.sample(StandardNormal)).collect()
    }

    fn layer_values(&self, seed: u64, j: usize) -> Vec<f64> {
        let n = self.spec.n_per_side();
        let mut values = vec![0.0; n * n];
        self.layers[j].add_to(&mut values, &self.layer_noise(seed, j), n);
        values
    }

    pub fn sample(&self, seed: u64) -> FieldSample {
        let n = self.spec.n_per_side();
        let mut values = vec![0.0; n * n];
        for (j, layer) in self.layers.iter().enumerate() {
            layer.add_to(&mut values, &self.layer_noise(seed, j), n);
        }
        FieldSample::normalized(self.spec, values, SamplerKind::Layered, seed)
    }
}

/// Unnormalised contribution of every layer, coarsest first; their sum is the
/// field before mean normalisation.
pub fn layer_contributions(spec: GridSpec, seed: u64) -> Vec<Vec<f64>> {
    let s = LayeredField::new(spec);
    (0..s.layers.len()).map(|j| s.layer_values(seed, j)).collect()
}
