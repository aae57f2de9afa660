use std::cmp::Ordering;
use std::collections::BinaryHeap;

const NO_PRED: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    vertex: u32,
}

impl Eq for Entry {}

impl Ord for Entry {
    // reversed so the max-heap pops the smallest distance, then the smallest index
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest vertex-weighted path on an `n x n` grid graph.
///
/// A path's length is the sum of the weights of all its vertices, so sources
/// start at their own weight and each relaxation adds the weight of the
/// vertex being entered. Equal tentative distances are resolved towards the
/// smaller vertex index, both when extracting from the queue and when
/// choosing a predecessor.
pub(crate) struct GridSearch<'a> {
    n: usize,
    weights: &'a [f64],
    dist: Vec<f64>,
    pred: Vec<u32>,
}

impl<'a> GridSearch<'a> {
    pub(crate) fn new(n: usize, weights: &'a [f64]) -> Self {
        debug_assert_eq!(weights.len(), n * n);
        GridSearch {
            n,
            weights,
            dist: vec![f64::INFINITY; n * n],
            pred: vec![NO_PRED; n * n],
        }
    }

    /// Runs until the first vertex satisfying `is_target` is settled and
    /// returns it with its distance.
    pub(crate) fn run<F>(&mut self, sources: &[usize], is_target: F) -> Option<(usize, f64)>
    where
        F: Fn(usize) -> bool,
    {
        let n = self.n;
        let mut settled = vec![false; n * n];
        let mut heap = BinaryHeap::with_capacity(4 * n);
        for &s in sources {
            let d = self.weights[s];
            if d < self.dist[s] {
                self.dist[s] = d;
                heap.push(Entry {
                    dist: d,
                    vertex: s as u32,
                });
            }
        }

        while let Some(Entry { dist, vertex }) = heap.pop() {
            let u = vertex as usize;
            if settled[u] || dist > self.dist[u] {
                continue;
            }
            settled[u] = true;
            if is_target(u) {
                return Some((u, dist));
            }
            let (i, j) = (u % n, u / n);
            let mut relax = |v: usize| {
                if settled[v] {
                    return;
                }
                let cand = dist + self.weights[v];
                if cand < self.dist[v] {
                    self.dist[v] = cand;
                    self.pred[v] = vertex;
                    heap.push(Entry {
                        dist: cand,
                        vertex: v as u32,
                    });
                } else if cand == self.dist[v] && vertex < self.pred[v] {
                    self.pred[v] = vertex;
                }
            };
            if j > 0 {
                relax(u - n);
            }
            if i > 0 {
                relax(u - 1);
            }
            if i + 1 < n {
                relax(u + 1);
            }
            if j + 1 < n {
                relax(u + n);
            }
        }
        None
    }

    /// Vertices from the source to `target`, following predecessors.
    pub(crate) fn path_to(&self, target: usize) -> Vec<usize> {
        let mut path = vec![target];
        let mut v = target;
        while self.pred[v] != NO_PRED {
            v = self.pred[v] as usize;
            path.push(v);
        }
        path.reverse();
        path
    }
}
