//! Reference constructions written directly from the site layout, shared by
//! the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use ssh_passage::model::{Chain1Contact, Chain2Contact, CouplingScenario};

pub fn hoppings(theta: f64) -> (f64, f64) {
    (1.0 + theta.cos(), 1.0 - theta.cos())
}

/// One open SSH chain `A_1 B_1 … A_N B_N` with `J = 1`.
pub fn ssh_chain(n: usize, theta: f64) -> DMatrix<f64> {
    let (j1, j2) = hoppings(theta);
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        h[(2 * i, 2 * i + 1)] = j1;
        h[(2 * i + 1, 2 * i)] = j1;
        if i + 1 < n {
            h[(2 * i + 1, 2 * i + 2)] = j2;
            h[(2 * i + 2, 2 * i + 1)] = j2;
        }
    }
    h
}

/// Full `(4N + 1)`-site Hamiltonian assembled block by block.
pub fn full_hamiltonian(n: usize, theta: f64, s: &CouplingScenario) -> DMatrix<f64> {
    let chain = ssh_chain(n, theta);
    let mut h = DMatrix::zeros(4 * n + 1, 4 * n + 1);
    h.view_mut((0, 0), (2 * n, 2 * n)).copy_from(&chain);
    h.view_mut((2 * n, 2 * n), (2 * n, 2 * n)).copy_from(&chain);
    let atom = 4 * n;
    let c1 = 2 * (s.cell_p - 1) + usize::from(s.chain1 == Chain1Contact::B);
    let c2 = 2 * n + 2 * (s.cell_q - 1) + usize::from(s.chain2 == Chain2Contact::D);
    h[(atom, atom)] = s.delta;
    h[(atom, c1)] = s.g1;
    h[(c1, atom)] = s.g1;
    h[(atom, c2)] = s.g2;
    h[(c2, atom)] = s.g2;
    h
}

pub fn sorted_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

/// The five-state matrix written out by hand.
pub fn five_state(g: f64, g1: f64, g2: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(
        5,
        5,
        &[
            0.0, g1, 0.0, g2, 0.0, //
            g1, 0.0, g, 0.0, 0.0, //
            0.0, g, 0.0, 0.0, 0.0, //
            g2, 0.0, 0.0, 0.0, g, //
            0.0, 0.0, 0.0, g, 0.0,
        ],
    )
}

pub fn scenario(c1: Chain1Contact, p: usize, c2: Chain2Contact, q: usize, g1: f64, g2: f64) -> CouplingScenario {
    CouplingScenario::new(c1, p, c2, q, g1, g2)
}
