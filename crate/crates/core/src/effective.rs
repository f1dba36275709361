//! Closed-form edge states of the topological chains and the five-state
//! reduction (atom plus the two edge states of each chain) with its dark
//! state.

use nalgebra::{DVector, SMatrix, SVector};

use crate::error::{Error, Result};
use crate::model::{Chain1Contact, Chain2Contact, ChainParams, CouplingScenario, Phase};

pub type Matrix5 = SMatrix<f64, 5, 5>;
pub type Vector5 = SVector<f64, 5>;

fn require_topological(params: &ChainParams) -> Result<()> {
    match params.phase() {
        Phase::Topological => Ok(()),
        phase => Err(Error::Domain(format!(
            "edge states need the topological phase (J1 < J2), chains are {phase:?} at θ = {}",
            params.theta()
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Edge {
    Left,
    Right,
}

impl Edge {
    pub fn opposite(self) -> Edge {
        match self {
            Edge::Left => Edge::Right,
            Edge::Right => Edge::Left,
        }
    }
}

/// Left and right edge states of one chain as `2N`-component vectors in the
/// chain's own layout `[A_1, B_1, ..., A_N, B_N]`. The left state lives on
/// the A (or C) sublattice, the right one on B (or D).
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeStatePair {
    pub left: DVector<f64>,
    pub right: DVector<f64>,
    /// `N_L = N_R`.
    pub norm_const: f64,
    /// `r = J1 / J2`.
    pub localization_ratio: f64,
}

impl EdgeStatePair {
    pub fn edge(&self, edge: Edge) -> &DVector<f64> {
        match edge {
            Edge::Left => &self.left,
            Edge::Right => &self.right,
        }
    }
}

/// `N_L = sqrt(1 − r²) / sqrt(1 − r^{2N})`.
pub fn edge_norm(ratio: f64, n_cells: usize) -> f64 {
    let n = n_cells as i32;
    ((1.0 - ratio * ratio) / (1.0 - ratio.powi(2 * n))).sqrt()
}

pub fn analytic_edge_states(params: &ChainParams) -> Result<EdgeStatePair> {
    require_topological(params)?;
    let n = params.n_cells();
    let r = params.hoppings().ratio();
    let norm = edge_norm(r, n);
    let mut left = DVector::zeros(2 * n);
    let mut right = DVector::zeros(2 * n);
    for i in 1..=n {
        left[2 * (i - 1)] = norm * (-r).powi((i - 1) as i32);
        right[2 * (i - 1) + 1] = norm * (-r).powi((n - i) as i32);
    }
    Ok(EdgeStatePair {
        left,
        right,
        norm_const: norm,
        localization_ratio: r,
    })
}

/// Coupling `G = (−1)^{N+1} N_L² J1 r^{N−1}` between the left and right edge
/// states of a finite chain; the two in-gap levels sit at `±G`.
pub fn hybridization_energy(params: &ChainParams) -> Result<f64> {
    require_topological(params)?;
    let n = params.n_cells();
    let h = params.hoppings();
    let r = h.ratio();
    let norm = edge_norm(r, n);
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    Ok(sign * norm * norm * h.intra * r.powi(n as i32 - 1))
}

/// Effective atom couplings `(G_1, G_2)` to the edge state each contact
/// touches: `g N_L (−r)^{p−1}` for an A/C contact, `g N_R (−r)^{N−p}` for B/D.
pub fn effective_couplings(params: &ChainParams, scenario: &CouplingScenario) -> Result<(f64, f64)> {
    require_topological(params)?;
    scenario.validate(params.n_cells())?;
    let n = params.n_cells() as i32;
    let r = params.hoppings().ratio();
    let norm = edge_norm(r, params.n_cells());
    let amp = |cell: usize, left: bool| {
        let exp = if left { cell as i32 - 1 } else { n - cell as i32 };
        norm * (-r).powi(exp)
    };
    let g1 = scenario.g1 * amp(scenario.cell_p, scenario.chain1 == Chain1Contact::A);
    let g2 = scenario.g2 * amp(scenario.cell_q, scenario.chain2 == Chain2Contact::C);
    Ok((g1, g2))
}

/// Labels of the five-state basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FiveStateKet {
    AtomExcited,
    Chain1(Edge),
    Chain2(Edge),
}

/// Atom plus the edge states of both chains, ordered
/// `[atom, contacted edge 1, far edge 1, contacted edge 2, far edge 2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiveStateModel {
    pub hybridization: f64,
    pub coupling1: f64,
    pub coupling2: f64,
    pub basis: [FiveStateKet; 5],
    pub matrix: Matrix5,
}

impl FiveStateModel {
    /// Five-state matrix for given `G`, `G_1`, `G_2` with the basis of an
    /// (A, C) contact.
    pub fn from_couplings(hybridization: f64, coupling1: f64, coupling2: f64) -> Self {
        let basis = basis_for(Chain1Contact::A, Chain2Contact::C);
        FiveStateModel {
            hybridization,
            coupling1,
            coupling2,
            basis,
            matrix: five_state_matrix(hybridization, coupling1, coupling2),
        }
    }

    /// Eigenvalues of the matrix, ascending, from a numeric solver.
    pub fn eigenvalues(&self) -> [f64; 5] {
        let m = nalgebra::DMatrix::from_iterator(5, 5, self.matrix.iter().copied());
        let ev = crate::spectral::EigenSystem::of_symmetric(&m)
            .expect("finite 5x5 matrix")
            .values;
        [ev[0], ev[1], ev[2], ev[3], ev[4]]
    }

    /// Roots of `λ(λ² − G²)(λ² − G² − G_1² − G_2²)`, ascending.
    pub fn closed_form_eigenvalues(&self) -> [f64; 5] {
        let g = self.hybridization.abs();
        let outer = (self.hybridization.powi(2) + self.coupling1.powi(2) + self.coupling2.powi(2)).sqrt();
        [-outer, -g, 0.0, g, outer]
    }

    pub fn mixing_angles(&self) -> Result<MixingAngles> {
        mixing_angles(self.hybridization, self.coupling1, self.coupling2)
    }

    pub fn dark_state(&self) -> Result<DarkState> {
        let m = self.mixing_angles()?;
        Ok(dark_state(m.chi, m.phi))
    }
}

fn basis_for(c1: Chain1Contact, c2: Chain2Contact) -> [FiveStateKet; 5] {
    let e1 = match c1 {
        Chain1Contact::A => Edge::Left,
        Chain1Contact::B => Edge::Right,
    };
    let e2 = match c2 {
        Chain2Contact::C => Edge::Left,
        Chain2Contact::D => Edge::Right,
    };
    [
        FiveStateKet::AtomExcited,
        FiveStateKet::Chain1(e1),
        FiveStateKet::Chain1(e1.opposite()),
        FiveStateKet::Chain2(e2),
        FiveStateKet::Chain2(e2.opposite()),
    ]
}

fn five_state_matrix(g: f64, g1: f64, g2: f64) -> Matrix5 {
    #[rustfmt::skip]
    let m = Matrix5::new(
        0.0, g1,  0.0, g2,  0.0,
        g1,  0.0, g,   0.0, 0.0,
        0.0, g,   0.0, 0.0, 0.0,
        g2,  0.0, 0.0, 0.0, g,
        0.0, 0.0, 0.0, g,   0.0,
    );
    m
}

/// Five-state reduction at the chain parameters of `params`. Only meaningful
/// near resonance (`Δ = 0`); the detuning is not part of the matrix.
pub fn five_state_model(params: &ChainParams, scenario: &CouplingScenario) -> Result<FiveStateModel> {
    let g = hybridization_energy(params)?;
    let (g1, g2) = effective_couplings(params, scenario)?;
    Ok(FiveStateModel {
        hybridization: g,
        coupling1: g1,
        coupling2: g2,
        basis: basis_for(scenario.chain1, scenario.chain2),
        matrix: five_state_matrix(g, g1, g2),
    })
}

/// The five basis kets of [`five_state_model`] written out in the full site
/// basis, using the analytic edge states.
pub fn five_state_basis_vectors(params: &ChainParams, scenario: &CouplingScenario) -> Result<[DVector<f64>; 5]> {
    let edges = analytic_edge_states(params)?;
    let n = params.n_cells();
    let dim = params.dim();
    let basis = basis_for(scenario.chain1, scenario.chain2);
    let ket = |label: FiveStateKet| {
        let mut v = DVector::zeros(dim);
        match label {
            FiveStateKet::AtomExcited => v[4 * n] = 1.0,
            FiveStateKet::Chain1(e) => v.rows_mut(0, 2 * n).copy_from(edges.edge(e)),
            FiveStateKet::Chain2(e) => v.rows_mut(2 * n, 2 * n).copy_from(edges.edge(e)),
        }
        v
    };
    Ok(basis.map(ket))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingAngles {
    pub chi: f64,
    pub phi: f64,
}

/// Mixing angles of the dark state of the five-state matrix.
///
/// `tan χ = sqrt(G_1² + G_2²) / |G|` with `χ ∈ [0, π/2]` and
/// `tan φ = G_2 / G_1`. The quadrant of `φ` carries the sign of `G`:
/// `φ = atan2(G_2, G_1)` for `G ≤ 0` and `atan2(−G_2, −G_1)` for `G > 0`,
/// which is what makes `(cos χ, 0, sin χ cos φ, 0, sin χ sin φ)` a null
/// vector for either sign of `G`.
pub fn mixing_angles(hybridization: f64, coupling1: f64, coupling2: f64) -> Result<MixingAngles> {
    if hybridization == 0.0 && coupling1 == 0.0 && coupling2 == 0.0 {
        return Err(Error::Domain("mixing angles undefined when G = G_1 = G_2 = 0".into()));
    }
    let chi = coupling1.hypot(coupling2).atan2(hybridization.abs());
    let phi = if hybridization > 0.0 {
        (-coupling2).atan2(-coupling1)
    } else {
        coupling2.atan2(coupling1)
    };
    Ok(MixingAngles { chi, phi })
}

/// Zero-energy state of the five-state model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarkState {
    pub chi: f64,
    pub phi: f64,
    pub vector: Vector5,
}

impl DarkState {
    /// Weights on the atom and the two far edge states.
    pub fn populations(&self) -> [f64; 3] {
        [self.vector[0].powi(2), self.vector[2].powi(2), self.vector[4].powi(2)]
    }
}

pub fn dark_state(chi: f64, phi: f64) -> DarkState {
    let (s, c) = chi.sin_cos();
    let vector = Vector5::new(c, 0.0, s * phi.cos(), 0.0, s * phi.sin());
    DarkState { chi, phi, vector }
}

/// The dark state in the full site basis: atom amplitude `cos χ` plus the far
/// edge state of each chain weighted by `sin χ cos φ` and `sin χ sin φ`.
pub fn embed_dark_state(dark: &DarkState, params: &ChainParams, scenario: &CouplingScenario) -> Result<DVector<f64>> {
    let kets = five_state_basis_vectors(params, scenario)?;
    let mut v = DVector::zeros(params.dim());
    for (amp, ket) in dark.vector.iter().zip(kets.iter()) {
        if *amp != 0.0 {
            v.axpy(*amp, ket, 1.0);
        }
    }
    Ok(v)
}
