//! Exact diagonalization of the site-basis Hamiltonian.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::HamiltonianMatrix;

/// Eigenpairs sorted by ascending energy. Column `k` of `vectors` belongs to
/// `values[k]`; each column has its largest-magnitude component positive
/// (lowest index wins ties).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

pub fn eigendecompose(h: &HamiltonianMatrix) -> Result<EigenSystem> {
    EigenSystem::of_symmetric(h.matrix())
}

impl EigenSystem {
    pub fn of_symmetric(m: &DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Input("eigendecomposition needs a square matrix".into()));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numeric("non-finite matrix entry".into()));
        }
        let dim = m.nrows();
        let a = faer::Mat::<f64>::from_fn(dim, dim, |i, j| m[(i, j)]);
        let eig = a
            .self_adjoint_eigen(faer::Side::Lower)
            .map_err(|e| Error::Numeric(format!("eigensolver did not converge: {e:?}")))?;
        let (s, u) = (eig.S(), eig.U());
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));

        let values = DVector::from_iterator(dim, order.iter().map(|&k| s[k]));
        let mut vectors = DMatrix::zeros(dim, dim);
        for (col, &k) in order.iter().enumerate() {
            let mut v = DVector::from_fn(dim, |i, _| u[(i, k)]);
            fix_sign(&mut v);
            vectors.set_column(col, &v);
        }
        Ok(EigenSystem { values, vectors })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> DVector<f64> {
        self.vectors.column(k).into_owned()
    }

    /// Index of the eigenvalue closest to zero.
    pub fn min_abs_index(&self) -> usize {
        self.values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(k, _)| k)
            .expect("non-empty spectrum")
    }

    /// Indices of the `count` eigenvalues of smallest magnitude, in ascending
    /// order of energy.
    pub fn smallest_magnitude(&self, count: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.dim()).collect();
        idx.sort_by(|&a, &b| self.values[a].abs().total_cmp(&self.values[b].abs()));
        idx.truncate(count);
        idx.sort_unstable();
        idx
    }

    /// Largest `|H v_k − E_k v_k|` over all pairs.
    pub fn max_residual(&self, h: &DMatrix<f64>) -> f64 {
        let hv = h * &self.vectors;
        let mut worst = 0.0_f64;
        for k in 0..self.dim() {
            for i in 0..self.dim() {
                worst = worst.max((hv[(i, k)] - self.values[k] * self.vectors[(i, k)]).abs());
            }
        }
        worst
    }

    /// Largest deviation of `VᵀV` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let gram = self.vectors.transpose() * &self.vectors;
        let mut worst = 0.0_f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - target).abs());
            }
        }
        worst
    }
}

fn fix_sign(v: &mut DVector<f64>) {
    let mut best = 0;
    for (k, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = k;
        }
    }
    if v[best] < 0.0 {
        v.neg_mut();
    }
}

/// Energy window (in units of `J`) inside which near-zero levels count as
/// tied when following the zero-energy state.
pub const ZERO_MODE_TIE_WINDOW: f64 = 1e-9;

/// Picks the zero-energy state of `eig`: the level of minimum `|E|`. When
/// other levels sit within [`ZERO_MODE_TIE_WINDOW`] of it, `previous` decides:
/// it is projected onto the span of the tied levels, so that exact
/// degeneracies (e.g. fully dimerized chains) do not make the choice depend
/// on the solver's arbitrary basis. Without `previous` the atom ket is used.
///
/// Returns the energy and a unit vector whose overlap with `previous` is
/// non-negative.
pub fn follow_zero_mode(eig: &EigenSystem, previous: Option<&DVector<f64>>, atom_index: usize) -> (f64, DVector<f64>) {
    let dim = eig.dim();
    let reference = previous.cloned().unwrap_or_else(|| {
        let mut e = DVector::zeros(dim);
        e[atom_index] = 1.0;
        e
    });
    let k0 = eig.min_abs_index();
    let emin = eig.values[k0].abs();
    let tied: Vec<usize> = (0..dim)
        .filter(|&k| eig.values[k].abs() <= emin + ZERO_MODE_TIE_WINDOW)
        .collect();

    if tied.len() > 1 {
        let mut proj = DVector::zeros(dim);
        let mut energy = 0.0;
        for &k in &tied {
            let c = eig.vectors.column(k).dot(&reference);
            proj += eig.vectors.column(k) * c;
            energy += c * c * eig.values[k];
        }
        let norm = proj.norm();
        if norm > 1e-6 {
            return (energy / (norm * norm), proj / norm);
        }
    }

    let best = tied
        .iter()
        .copied()
        .max_by(|&a, &b| {
            let oa = eig.vectors.column(a).dot(&reference).abs();
            let ob = eig.vectors.column(b).dot(&reference).abs();
            oa.total_cmp(&ob)
        })
        .unwrap_or(k0);
    let mut v = eig.vector(best);
    if v.dot(&reference) < 0.0 {
        v.neg_mut();
    }
    (eig.values[best], v)
}
