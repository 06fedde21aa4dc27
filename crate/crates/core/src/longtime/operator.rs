use ndarray::{s, Array2, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::graphon::{GraphonKernel, Quadrature};
use crate::par;

/// Largest power tried when looking for a positivity witness `A^k > 0`.
pub const PRIMITIVITY_MAX_POWER: usize = 8;

/// `T_W` on a finite grid: `(A g)_a = Σ_b A[a][b] g_b`.
///
/// On the quadrature grid `A[a][b]` is the ν-mean of `W(x_a, ·)` over cell `b`
/// times the cell mass `1/M`. For class models the cells are the classes
/// and the masses are the class weights.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    matrix: Array2<f64>,
    masses: Vec<f64>,
    nodes: Vec<f64>,
    edges: Vec<f64>,
    nonnegative: bool,
    symmetric: bool,
    primitivity_k: Option<usize>,
}

impl DiscreteOperator {
    pub fn new(kernel: &GraphonKernel, quad: &Quadrature) -> Self {
        let m = quad.len();
        let w = quad.weight();
        let mut data = vec![0.0; m * m];
        par::for_each_row_mut(&mut data, m, |a, row| {
            let x = quad.nodes()[a];
            for (b, v) in row.iter_mut().enumerate() {
                *v = kernel.cell_mean(x, quad, b) * w;
            }
        });
        let matrix = Array2::from_shape_vec((m, m), data).expect("square");
        Self::assemble(matrix, vec![w; m], quad.nodes().to_vec(), quad.edges().to_vec())
    }

    /// Class operator `Ã = (α_b m_ab)` with classes on consecutive intervals of masses `α`.
    pub fn from_classes(m: &[f64], alpha: &[f64]) -> Result<Self> {
        let p = alpha.len();
        if p == 0 || m.len() != p * p {
            return Err(Error::InvalidArgument(format!(
                "class matrix needs {} entries for {p} classes, got {}",
                p * p,
                m.len()
            )));
        }
        let total: f64 = alpha.iter().sum();
        if (total - 1.0).abs() > 1e-9 || alpha.iter().any(|&a| !(a > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "class masses must be positive and sum to 1, got sum {total}"
            )));
        }
        if m.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::Model("class connectivities must be >= 0".into()));
        }
        let matrix = Array2::from_shape_fn((p, p), |(a, b)| alpha[b] * m[a * p + b]);
        let mut edges = vec![0.0];
        for a in alpha {
            edges.push(edges.last().unwrap() + a);
        }
        *edges.last_mut().unwrap() = 1.0;
        let nodes = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        Ok(Self::assemble(matrix, alpha.to_vec(), nodes, edges))
    }

    fn assemble(matrix: Array2<f64>, masses: Vec<f64>, nodes: Vec<f64>, edges: Vec<f64>) -> Self {
        let nonnegative = matrix.iter().all(|&v| v >= 0.0);
        let scale = matrix.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        // A[a][b]/m_b is the kernel value, which is what symmetry refers to.
        let symmetric = matrix.indexed_iter().all(|((a, b), &v)| {
            (v / masses[b] - matrix[(b, a)] / masses[a]).abs() <= 1e-12 * (1.0 + scale / masses[b])
        });
        let primitivity_k = if nonnegative { primitivity_witness(&matrix) } else { None };
        DiscreteOperator {
            matrix,
            masses,
            nodes,
            edges,
            nonnegative,
            symmetric,
            primitivity_k,
        }
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn matrix(&self) -> ArrayView2<'_, f64> {
        self.matrix.view()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Smallest `k ≤ 8` with `A^k > 0` entrywise.
    pub fn primitivity_k(&self) -> Option<usize> {
        self.primitivity_k
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let m = self.len();
        par::map_range(m, |a| {
            self.matrix
                .row(a)
                .iter()
                .zip(v)
                .map(|(w, x)| w * x)
                .sum()
        })
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.matrix.sum_axis(Axis(1)).to_vec()
    }

    /// `‖A‖_∞`, the largest absolute row sum.
    pub fn max_row_sum(&self) -> f64 {
        self.matrix
            .rows()
            .into_iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `A · X` for a cell-major `X` (one row per cell), computed in row blocks.
    pub fn mix(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        const BLOCK: usize = 32;
        let m = self.len();
        let blocks = m.div_ceil(BLOCK);
        let parts = par::map_range(blocks, |k| {
            let rows = k * BLOCK..((k + 1) * BLOCK).min(m);
            self.matrix.slice(s![rows, ..]).dot(&x)
        });
        let views: Vec<_> = parts.iter().map(|p| p.view()).collect();
        ndarray::concatenate(Axis(0), &views).expect("blocks share the column count")
    }

    /// Discrete `L²(ν)` norm `(Σ m_a v_a²)^{1/2}`.
    pub fn l2_norm(&self, v: &[f64]) -> f64 {
        v.iter().zip(&self.masses).map(|(x, m)| m * x * x).sum::<f64>().sqrt()
    }
}

fn primitivity_witness(a: &Array2<f64>) -> Option<usize> {
    let m = a.nrows();
    let words = m.div_ceil(64);
    let pattern: Vec<Vec<u64>> = (0..m)
        .map(|i| {
            let mut row = vec![0u64; words];
            for j in 0..m {
                if a[(i, j)] > 0.0 {
                    row[j / 64] |= 1 << (j % 64);
                }
            }
            row
        })
        .collect();
    let full = |row: &[u64]| (0..m).all(|j| row[j / 64] >> (j % 64) & 1 == 1);
    let mut power = pattern.clone();
    for k in 1..=PRIMITIVITY_MAX_POWER {
        if power.iter().all(|r| full(r)) {
            return Some(k);
        }
        if k == PRIMITIVITY_MAX_POWER {
            break;
        }
        // (P^k A)_i = OR over j ∈ P^k_i of A_j.
        power = par::map_range(m, |i| {
            let mut next = vec![0u64; words];
            for j in 0..m {
                if power[i][j / 64] >> (j % 64) & 1 == 1 {
                    for (n, p) in next.iter_mut().zip(&pattern[j]) {
                        *n |= p;
                    }
                }
            }
            next
        });
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphon::degree_field;

    #[test]
    fn ones_reproduce_degree_field() {
        let q = Quadrature::uniform(200).unwrap();
        for k in [
            GraphonKernel::product(),
            GraphonKernel::p_nearest(0.1).unwrap(),
            GraphonKernel::constant(0.4),
        ] {
            let op = DiscreteOperator::new(&k, &q);
            let d = degree_field(&k, &q);
            let ones = op.apply(&vec![1.0; 200]);
            for (a, b) in ones.iter().zip(&d.values) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn p_nearest_primitivity_power() {
        // Support width 2r per step: A^k > 0 once k·r ≥ 1/2.
        let q = Quadrature::uniform(100).unwrap();
        let op = DiscreteOperator::new(&GraphonKernel::p_nearest(0.1).unwrap(), &q);
        assert_eq!(op.primitivity_k(), Some(5));
        assert!(op.is_symmetric() && op.is_nonnegative());
        let thin = DiscreteOperator::new(&GraphonKernel::p_nearest(0.05).unwrap(), &q);
        assert_eq!(thin.primitivity_k(), None);
    }

    #[test]
    fn class_operator() {
        let op = DiscreteOperator::from_classes(&[0.0, 1.0, 1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert_eq!(op.apply(&[1.0, 2.0]), vec![1.0, 0.5]);
        // The swap is periodic: no power is positive.
        assert_eq!(op.primitivity_k(), None);
        let full = DiscreteOperator::from_classes(&[0.0, 1.0, 1.0, 1.0], &[0.5, 0.5]).unwrap();
        assert_eq!(full.primitivity_k(), Some(2));
        assert!(op.is_symmetric());
        assert!(DiscreteOperator::from_classes(&[1.0], &[0.9]).is_err());
        assert!(DiscreteOperator::from_classes(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn block_mix_matches_dense_product() {
        let q = Quadrature::uniform(70).unwrap();
        let op = DiscreteOperator::new(&GraphonKernel::product(), &q);
        let x = Array2::from_shape_fn((70, 5), |(i, j)| (i * 3 + j) as f64 * 0.01);
        let dense = op.matrix().dot(&x);
        let mixed = op.mix(x.view());
        assert!((&dense - &mixed).iter().all(|v| v.abs() < 1e-12));
    }
}
