//! Dense complex linear algebra helpers on top of nalgebra, plus a column-major
//! sparse view of Pauli sums used for block decomposition.

use nalgebra::DMatrix;
use petgraph::unionfind::UnionFind;

use crate::hamiltonian::PauliSum;
use crate::pauli::C64;

/// Entries smaller than this are treated as structural zeros.
pub const STRUCTURAL_ZERO: f64 = 1e-14;

pub fn czero() -> C64 {
    C64::new(0.0, 0.0)
}

/// Eigenvalues in ascending order and matching eigenvector columns.
pub fn hermitian_eigen(m: DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

/// Largest singular value, from the top eigenvalue of `A^dagger A` or `A A^dagger`
/// (whichever is smaller).
pub fn op_norm(a: &DMatrix<C64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let gram = if a.ncols() <= a.nrows() {
        a.adjoint() * a
    } else {
        a * a.adjoint()
    };
    let top = gram.symmetric_eigenvalues().iter().copied().fold(0.0f64, f64::max);
    top.max(0.0).sqrt()
}

/// `exp(-i h t)` for Hermitian `h`.
pub fn expm_hermitian(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let (vals, vecs) = hermitian_eigen(h.clone());
    let mut scaled = vecs.clone();
    for (c, &l) in vals.iter().enumerate() {
        let ph = C64::from_polar(1.0, -l * t);
        for r in 0..scaled.nrows() {
            scaled[(r, c)] *= ph;
        }
    }
    scaled * vecs.adjoint()
}

pub fn commutator(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a * b - b * a
}

pub fn identity(dim: usize) -> DMatrix<C64> {
    DMatrix::identity(dim, dim)
}

/// `||U^dagger U - I||`.
pub fn unitarity_defect(u: &DMatrix<C64>) -> f64 {
    op_norm(&(u.adjoint() * u - identity(u.ncols())))
}

/// Hermitian operator stored column by column with merged entries.
#[derive(Clone, Debug)]
pub struct SparseHermitian {
    dim: usize,
    cols: Vec<Vec<(usize, C64)>>,
}

impl SparseHermitian {
    pub fn from_pauli_sum(h: &PauliSum) -> Self {
        let dim = 1usize << h.n();
        let terms: Vec<_> = h.terms().collect();
        let cols = (0..dim)
            .map(|b| {
                let mut col: Vec<(usize, C64)> = Vec::with_capacity(terms.len());
                for (c, p) in &terms {
                    let (r, ph) = p.act_on_basis(b);
                    match col.iter_mut().find(|(row, _)| *row == r) {
                        Some((_, v)) => *v += ph * *c,
                        None => col.push((r, ph * *c)),
                    }
                }
                col.retain(|(_, v)| v.norm() > STRUCTURAL_ZERO);
                col.sort_by_key(|(r, _)| *r);
                col
            })
            .collect();
        Self { dim, cols }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column(&self, c: usize) -> &[(usize, C64)] {
        &self.cols[c]
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.cols[c]
            .binary_search_by_key(&r, |(row, _)| *row)
            .map(|i| self.cols[c][i].1)
            .unwrap_or_else(|_| czero())
    }

    /// Nonzero off-diagonal entries as `(row, col, value)`.
    pub fn off_diagonal(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().filter(move |(r, _)| *r != c).map(move |&(r, v)| (r, c, v)))
    }

    /// Connected components of the off-diagonal graph, each sorted, ordered by
    /// smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        components_of(self.dim, self.off_diagonal().map(|(r, c, _)| (r, c)))
    }

    pub fn dense_block(&self, indices: &[usize]) -> DMatrix<C64> {
        let mut pos = vec![usize::MAX; self.dim];
        for (i, &b) in indices.iter().enumerate() {
            pos[b] = i;
        }
        let mut m = DMatrix::zeros(indices.len(), indices.len());
        for (j, &b) in indices.iter().enumerate() {
            for &(r, v) in &self.cols[b] {
                if pos[r] != usize::MAX {
                    m[(pos[r], j)] = v;
                }
            }
        }
        m
    }
}

/// Union-find components of `0..dim` under the given edges.
pub fn components_of(dim: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::<usize>::new(dim);
    for (a, b) in edges {
        uf.union(a, b);
    }
    let labels = uf.into_labeling();
    let mut slot = vec![usize::MAX; dim];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (b, &root) in labels.iter().enumerate() {
        if slot[root] == usize::MAX {
            slot[root] = out.len();
            out.push(Vec::new());
        }
        out[slot[root]].push(b);
    }
    out
}
