use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// A QUBO in `offset + sum h_i x_i + sum J_ij x_i x_j` form with `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboCompiled {
    linear: Vec<f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    offset: f64,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl QuboCompiled {
    pub(crate) fn from_parts(
        linear: Vec<f64>,
        quadratic: BTreeMap<(usize, usize), f64>,
        offset: f64,
    ) -> Self {
        let mut q = Self {
            linear,
            quadratic,
            offset,
            adjacency: Vec::new(),
        };
        q.rebuild_adjacency();
        q
    }

    /// Builds a QUBO from raw coefficients. Pairs are unordered, repeated pairs
    /// accumulate, and `(i, i)` folds into the linear weight of `i`.
    pub fn from_terms<I>(
        variable_count: usize,
        linear: &[f64],
        quadratic: I,
        offset: f64,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, usize), f64)>,
    {
        if linear.len() > variable_count {
            return Err(Error::SampleLength {
                expected: variable_count,
                got: linear.len(),
            });
        }
        let mut lin = vec![0.0; variable_count];
        lin[..linear.len()].copy_from_slice(linear);
        let mut quad: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for ((a, b), w) in quadratic {
            if a >= variable_count || b >= variable_count {
                return Err(Error::FlatIndexOutOfRange(a.max(b)));
            }
            if a == b {
                lin[a] += w;
            } else {
                *quad.entry((a.min(b), a.max(b))).or_insert(0.0) += w;
            }
        }
        quad.retain(|_, w| *w != 0.0);
        Ok(Self::from_parts(lin, quad, offset))
    }

    fn rebuild_adjacency(&mut self) {
        let mut adj = vec![Vec::new(); self.linear.len()];
        for (&(i, j), &w) in &self.quadratic {
            adj[i].push((j, w));
            adj[j].push((i, w));
        }
        self.adjacency = adj;
    }

    pub fn variable_count(&self) -> usize {
        self.linear.len()
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Neighbour lists `(j, J_ij)` for each variable.
    pub fn adjacency(&self) -> &[Vec<(usize, f64)>] {
        &self.adjacency
    }

    pub fn is_zero(&self) -> bool {
        self.linear.iter().all(|&h| h == 0.0) && self.quadratic.is_empty()
    }

    pub fn energy(&self, sample: &[bool]) -> Result<f64> {
        if sample.len() != self.linear.len() {
            return Err(Error::SampleLength {
                expected: self.linear.len(),
                got: sample.len(),
            });
        }
        Ok(self.energy_unchecked(sample))
    }

    pub(crate) fn energy_unchecked(&self, sample: &[bool]) -> f64 {
        let mut e = self.offset;
        for (h, &s) in self.linear.iter().zip(sample) {
            if s {
                e += h;
            }
        }
        for (&(i, j), &w) in &self.quadratic {
            if sample[i] && sample[j] {
                e += w;
            }
        }
        e
    }

    /// Local field `h_i + sum_j J_ij x_j`, i.e. the energy change of turning `i` on.
    pub fn local_field(&self, sample: &[bool], i: usize) -> f64 {
        let mut f = self.linear[i];
        for &(j, w) in &self.adjacency[i] {
            if sample[j] {
                f += w;
            }
        }
        f
    }
}
