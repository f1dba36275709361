//! Parameter space and exact single-excitation Hamiltonian of a two-level
//! giant atom attached to two open SSH chains.
//!
//! Energies are measured in units of the base hopping `J` with the common
//! sublattice frequency taken as the zero of energy, so chain sites carry only
//! their disorder offsets on the diagonal and the atom carries the detuning.
//!
//! Basis layout for `N` cells per chain (0-based indices):
//!
//! ```text
//! [A_1, B_1, ..., A_N, B_N,  C_1, D_1, ..., C_N, D_N,  atom]
//!  0    1         2N-2 2N-1  2N   2N+1      4N-2 4N-1  4N
//! ```

use std::f64::consts::TAU;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used to call a chain critical (`J1 == J2`).
pub const CRITICAL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    n_cells: usize,
    hopping: f64,
    theta: f64,
    reference_frequency: f64,
}

impl ChainParams {
    pub fn new(n_cells: usize, hopping: f64, theta: f64) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::config("n_cells", "need at least one cell"));
        }
        if !(hopping.is_finite() && hopping > 0.0) {
            return Err(Error::config("hopping", format!("must be > 0, got {hopping}")));
        }
        check_theta(theta)?;
        Ok(ChainParams {
            n_cells,
            hopping,
            theta,
            reference_frequency: 0.0,
        })
    }

    /// Records the physical sublattice frequency. It never enters the
    /// Hamiltonian, which is written relative to it.
    pub fn with_reference_frequency(mut self, omega_o: f64) -> Self {
        self.reference_frequency = omega_o;
        self
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        check_theta(theta)?;
        Ok(ChainParams { theta, ..*self })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn hopping(&self) -> f64 {
        self.hopping
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn reference_frequency(&self) -> f64 {
        self.reference_frequency
    }

    pub fn hoppings(&self) -> Hoppings {
        Hoppings::at(self.hopping, self.theta)
    }

    pub fn phase(&self) -> Phase {
        let h = self.hoppings();
        phase_classification(h.intra, h.inter)
    }

    /// Dimension of the single-excitation space, `4N + 1`.
    pub fn dim(&self) -> usize {
        4 * self.n_cells + 1
    }

    pub fn basis(&self) -> BasisIndex {
        BasisIndex::new(self.n_cells)
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=TAU).contains(&theta) {
        return Err(Error::config("theta", format!("must lie in [0, 2π], got {theta}")));
    }
    Ok(())
}

/// Intra-cell (`J1`) and inter-cell (`J2`) hopping of both chains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hoppings {
    pub intra: f64,
    pub inter: f64,
}

impl Hoppings {
    pub fn at(hopping: f64, theta: f64) -> Self {
        let c = theta.cos();
        Hoppings {
            intra: hopping * (1.0 + c),
            inter: hopping * (1.0 - c),
        }
    }

    /// Edge-state localization ratio `J1 / J2`.
    pub fn ratio(&self) -> f64 {
        self.intra / self.inter
    }
}

/// `(J1, J2) = (J(1 + cos θ), J(1 − cos θ))`.
pub fn hopping_amplitudes(params: &ChainParams) -> (f64, f64) {
    let h = params.hoppings();
    (h.intra, h.inter)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Trivial,
    Critical,
    Topological,
}

/// Classifies an open chain from its hoppings. `J1 + J2 = 2J` supplies the
/// energy scale for the critical tolerance.
pub fn phase_classification(intra: f64, inter: f64) -> Phase {
    let scale = 0.5 * (intra + inter);
    let diff = intra - inter;
    if diff.abs() <= CRITICAL_TOLERANCE * scale {
        Phase::Critical
    } else if diff > 0.0 {
        Phase::Trivial
    } else {
        Phase::Topological
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chain1Contact {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chain2Contact {
    C,
    D,
}

/// Where and how strongly the atom touches the two chains, plus its detuning
/// from the sublattice frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingScenario {
    pub chain1: Chain1Contact,
    /// 1-based cell of the chain-1 contact.
    pub cell_p: usize,
    pub chain2: Chain2Contact,
    /// 1-based cell of the chain-2 contact.
    pub cell_q: usize,
    pub g1: f64,
    pub g2: f64,
    pub delta: f64,
}

impl CouplingScenario {
    pub fn new(chain1: Chain1Contact, cell_p: usize, chain2: Chain2Contact, cell_q: usize, g1: f64, g2: f64) -> Self {
        CouplingScenario {
            chain1,
            cell_p,
            chain2,
            cell_q,
            g1,
            g2,
            delta: 0.0,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn validate(&self, n_cells: usize) -> Result<()> {
        if !(1..=n_cells).contains(&self.cell_p) {
            return Err(Error::config(
                "cell_p",
                format!("must lie in [1, {n_cells}], got {}", self.cell_p),
            ));
        }
        if !(1..=n_cells).contains(&self.cell_q) {
            return Err(Error::config(
                "cell_q",
                format!("must lie in [1, {n_cells}], got {}", self.cell_q),
            ));
        }
        for (field, g) in [("g1", self.g1), ("g2", self.g2)] {
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::config(field, format!("must be finite and >= 0, got {g}")));
            }
        }
        if !self.delta.is_finite() {
            return Err(Error::config("delta", "must be finite"));
        }
        Ok(())
    }

    pub fn contact_sites(&self) -> (Site, Site) {
        let s1 = match self.chain1 {
            Chain1Contact::A => Site::A(self.cell_p),
            Chain1Contact::B => Site::B(self.cell_p),
        };
        let s2 = match self.chain2 {
            Chain2Contact::C => Site::C(self.cell_q),
            Chain2Contact::D => Site::D(self.cell_q),
        };
        (s1, s2)
    }

    /// End sites that receive the excitation: the edge opposite to the one
    /// the atom talks to (A contact sends it to `B_N`, B contact to `A_1`, and
    /// likewise for the second chain).
    pub fn receiving_sites(&self, n_cells: usize) -> (Site, Site) {
        let s1 = match self.chain1 {
            Chain1Contact::A => Site::B(n_cells),
            Chain1Contact::B => Site::A(1),
        };
        let s2 = match self.chain2 {
            Chain2Contact::C => Site::D(n_cells),
            Chain2Contact::D => Site::C(1),
        };
        (s1, s2)
    }
}

impl fmt::Display for CouplingScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (s1, s2) = self.contact_sites();
        write!(f, "({s1}, {s2})")
    }
}

/// A basis ket of the single-excitation space. Cells are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Site {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    Atom,
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::A(i) => write!(f, "A{i}"),
            Site::B(i) => write!(f, "B{i}"),
            Site::C(i) => write!(f, "C{i}"),
            Site::D(i) => write!(f, "D{i}"),
            Site::Atom => write!(f, "atom"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisIndex {
    n_cells: usize,
}

impl BasisIndex {
    pub fn new(n_cells: usize) -> Self {
        BasisIndex { n_cells }
    }

    pub fn dim(&self) -> usize {
        4 * self.n_cells + 1
    }

    pub fn atom(&self) -> usize {
        4 * self.n_cells
    }

    /// Index of `site`, or `None` when its cell lies outside `[1, N]`.
    pub fn index(&self, site: Site) -> Option<usize> {
        let n = self.n_cells;
        let cell = |i: usize| (1..=n).contains(&i).then(|| 2 * (i - 1));
        match site {
            Site::A(i) => cell(i),
            Site::B(i) => cell(i).map(|k| k + 1),
            Site::C(i) => cell(i).map(|k| 2 * n + k),
            Site::D(i) => cell(i).map(|k| 2 * n + k + 1),
            Site::Atom => Some(4 * n),
        }
    }

    pub fn site(&self, index: usize) -> Option<Site> {
        let n = self.n_cells;
        if index == 4 * n {
            return Some(Site::Atom);
        }
        if index > 4 * n {
            return None;
        }
        let (chain2, local) = if index >= 2 * n {
            (true, index - 2 * n)
        } else {
            (false, index)
        };
        let cell = local / 2 + 1;
        Some(match (chain2, local % 2) {
            (false, 0) => Site::A(cell),
            (false, _) => Site::B(cell),
            (true, 0) => Site::C(cell),
            (true, _) => Site::D(cell),
        })
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.dim())
            .map(|k| self.site(k).expect("in range").to_string())
            .collect()
    }
}

/// Static disorder on the chains: one offset per lattice site (basis order,
/// `4N` entries) and one per bond (`2(2N − 1)` entries, chain 1 then chain 2,
/// each ordered along the chain starting at the `A_1`/`C_1` end).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderRealization {
    pub onsite_offsets: Vec<f64>,
    pub bond_offsets: Vec<f64>,
}

impl DisorderRealization {
    pub fn clean(n_cells: usize) -> Self {
        DisorderRealization {
            onsite_offsets: vec![0.0; 4 * n_cells],
            bond_offsets: vec![0.0; bond_count(n_cells)],
        }
    }

    pub fn is_clean(&self) -> bool {
        self.onsite_offsets.iter().chain(&self.bond_offsets).all(|&x| x == 0.0)
    }

    pub fn validate(&self, n_cells: usize) -> Result<()> {
        if self.onsite_offsets.len() != 4 * n_cells {
            return Err(Error::config(
                "onsite_offsets",
                format!("expected {} entries, got {}", 4 * n_cells, self.onsite_offsets.len()),
            ));
        }
        if self.bond_offsets.len() != bond_count(n_cells) {
            return Err(Error::config(
                "bond_offsets",
                format!(
                    "expected {} entries, got {}",
                    bond_count(n_cells),
                    self.bond_offsets.len()
                ),
            ));
        }
        if !self
            .onsite_offsets
            .iter()
            .chain(&self.bond_offsets)
            .all(|x| x.is_finite())
        {
            return Err(Error::config("disorder", "offsets must be finite"));
        }
        Ok(())
    }

    /// The realization alone as a `(4N + 1)`-dimensional matrix, with the
    /// bond offsets on the chain bonds and nothing on the atom.
    pub fn perturbation_matrix(&self, n_cells: usize) -> Result<DMatrix<f64>> {
        self.validate(n_cells)?;
        let dim = 4 * n_cells + 1;
        let mut m = DMatrix::zeros(dim, dim);
        for (k, &d) in self.onsite_offsets.iter().enumerate() {
            m[(k, k)] = d;
        }
        for (b, &d) in self.bond_offsets.iter().enumerate() {
            let (i, j, _) = chain_bond(n_cells, b);
            m[(i, j)] = d;
            m[(j, i)] = d;
        }
        Ok(m)
    }
}

/// Number of hopping bonds in both chains together.
pub fn bond_count(n_cells: usize) -> usize {
    2 * (2 * n_cells - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BondKind {
    Intra,
    Inter,
    Atom1,
    Atom2,
}

/// Endpoints and kind of chain bond `b` in the ordering used by
/// [`DisorderRealization::bond_offsets`].
fn chain_bond(n_cells: usize, b: usize) -> (usize, usize, BondKind) {
    let per_chain = 2 * n_cells - 1;
    let (offset, k) = if b < per_chain {
        (0, b)
    } else {
        (2 * n_cells, b - per_chain)
    };
    let kind = if k % 2 == 0 { BondKind::Intra } else { BondKind::Inter };
    (offset + k, offset + k + 1, kind)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bond {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

/// Sparse form of the Hamiltonian: diagonal plus the list of nonzero bonds
/// (each stored once, `i < j` not required).
#[derive(Debug, Clone, PartialEq)]
pub struct TightBinding {
    pub diagonal: Vec<f64>,
    pub bonds: Vec<Bond>,
}

impl TightBinding {
    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn to_dense(&self) -> HamiltonianMatrix {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (k, &d) in self.diagonal.iter().enumerate() {
            m[(k, k)] = d;
        }
        for b in &self.bonds {
            m[(b.i, b.j)] = b.value;
            m[(b.j, b.i)] = b.value;
        }
        HamiltonianMatrix { matrix: m }
    }

    /// `out = H · v` for complex or real vectors.
    pub fn apply<T>(&self, v: &[T], out: &mut [T])
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::AddAssign,
    {
        for ((o, &x), &d) in out.iter_mut().zip(v).zip(&self.diagonal) {
            *o = x * d;
        }
        for b in &self.bonds {
            let (vi, vj) = (v[b.i], v[b.j]);
            out[b.i] += vj * b.value;
            out[b.j] += vi * b.value;
        }
    }

    /// Upper bound on the spectral radius (maximum absolute row sum).
    pub fn norm_bound(&self) -> f64 {
        let mut rows: Vec<f64> = self.diagonal.iter().map(|d| d.abs()).collect();
        for b in &self.bonds {
            rows[b.i] += b.value.abs();
            rows[b.j] += b.value.abs();
        }
        rows.into_iter().fold(0.0, f64::max)
    }
}

/// Everything except the sweep angle: chains, contacts and disorder. The
/// Hamiltonian at any angle is produced from this without revalidation, which
/// the propagator relies on.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    n_cells: usize,
    hopping: f64,
    scenario: CouplingScenario,
    disorder: DisorderRealization,
    kinds: Vec<BondKind>,
}

impl Lattice {
    pub fn new(
        n_cells: usize,
        hopping: f64,
        scenario: &CouplingScenario,
        disorder: Option<&DisorderRealization>,
    ) -> Result<Self> {
        // reuse the parameter checks
        ChainParams::new(n_cells, hopping, 0.0)?;
        scenario.validate(n_cells)?;
        let disorder = match disorder {
            Some(d) => {
                d.validate(n_cells)?;
                d.clone()
            }
            None => DisorderRealization::clean(n_cells),
        };
        let mut kinds: Vec<BondKind> = (0..bond_count(n_cells)).map(|b| chain_bond(n_cells, b).2).collect();
        kinds.push(BondKind::Atom1);
        kinds.push(BondKind::Atom2);
        Ok(Lattice {
            n_cells,
            hopping,
            scenario: *scenario,
            disorder,
            kinds,
        })
    }

    pub fn from_params(
        params: &ChainParams,
        scenario: &CouplingScenario,
        disorder: Option<&DisorderRealization>,
    ) -> Result<Self> {
        Lattice::new(params.n_cells(), params.hopping(), scenario, disorder)
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn hopping(&self) -> f64 {
        self.hopping
    }

    pub fn scenario(&self) -> &CouplingScenario {
        &self.scenario
    }

    pub fn disorder(&self) -> &DisorderRealization {
        &self.disorder
    }

    pub fn dim(&self) -> usize {
        4 * self.n_cells + 1
    }

    pub fn basis(&self) -> BasisIndex {
        BasisIndex::new(self.n_cells)
    }

    pub fn params_at(&self, theta: f64) -> Result<ChainParams> {
        ChainParams::new(self.n_cells, self.hopping, theta)
    }

    pub fn tight_binding(&self, theta: f64) -> TightBinding {
        let mut tb = TightBinding {
            diagonal: vec![0.0; self.dim()],
            bonds: Vec::with_capacity(self.kinds.len()),
        };
        self.fill(theta, &mut tb);
        tb
    }

    /// Overwrites `tb` with the Hamiltonian at `theta`, reusing its buffers.
    pub fn fill(&self, theta: f64, tb: &mut TightBinding) {
        let n = self.n_cells;
        let h = Hoppings::at(self.hopping, theta);
        let basis = self.basis();

        tb.diagonal.clear();
        tb.diagonal.extend_from_slice(&self.disorder.onsite_offsets);
        tb.diagonal.push(self.scenario.delta);

        tb.bonds.clear();
        for (b, &offset) in self.disorder.bond_offsets.iter().enumerate() {
            let (i, j, kind) = chain_bond(n, b);
            let base = match kind {
                BondKind::Intra => h.intra,
                _ => h.inter,
            };
            tb.bonds.push(Bond {
                i,
                j,
                value: base + offset,
            });
        }
        let (s1, s2) = self.scenario.contact_sites();
        let atom = basis.atom();
        tb.bonds.push(Bond {
            i: basis.index(s1).expect("validated contact"),
            j: atom,
            value: self.scenario.g1,
        });
        tb.bonds.push(Bond {
            i: basis.index(s2).expect("validated contact"),
            j: atom,
            value: self.scenario.g2,
        });
    }

    pub fn hamiltonian(&self, theta: f64) -> HamiltonianMatrix {
        self.tight_binding(theta).to_dense()
    }
}

/// Dense real symmetric Hamiltonian in the site basis.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    matrix: DMatrix<f64>,
}

impl HamiltonianMatrix {
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Input(format!(
                "matrix is {}x{}, not square",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(HamiltonianMatrix { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }
}

impl std::ops::Index<(usize, usize)> for HamiltonianMatrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.matrix[idx]
    }
}

pub fn build_hamiltonian(
    params: &ChainParams,
    scenario: &CouplingScenario,
    disorder: &DisorderRealization,
) -> Result<HamiltonianMatrix> {
    let lattice = Lattice::from_params(params, scenario, Some(disorder))?;
    Ok(lattice.hamiltonian(params.theta()))
}

/// Hamiltonian of one isolated chain (`2N` sites, `A_1 B_1 ... A_N B_N`).
pub fn chain_hamiltonian(params: &ChainParams) -> HamiltonianMatrix {
    let n = params.n_cells();
    let h = params.hoppings();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..2 * n - 1 {
        let v = if k % 2 == 0 { h.intra } else { h.inter };
        m[(k, k + 1)] = v;
        m[(k + 1, k)] = v;
    }
    HamiltonianMatrix { matrix: m }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ac(g1: f64, g2: f64) -> CouplingScenario {
        CouplingScenario::new(Chain1Contact::A, 1, Chain2Contact::C, 1, g1, g2)
    }

    #[test]
    fn hoppings_at_reference_angles() {
        let p = ChainParams::new(4, 1.0, 0.0).unwrap();
        assert_eq!(hopping_amplitudes(&p), (2.0, 0.0));

        let (j1, j2) = hopping_amplitudes(&p.with_theta(PI / 2.0).unwrap());
        assert!((j1 - 1.0).abs() < 1e-15 && (j2 - 1.0).abs() < 1e-15);

        // cos(0.7π) = -0.587785252292473
        let (j1, j2) = hopping_amplitudes(&p.with_theta(0.7 * PI).unwrap());
        assert!((j1 - 0.412215).abs() < 1e-6);
        assert!((j2 - 1.587785).abs() < 1e-6);
    }

    #[test]
    fn phases() {
        let p = ChainParams::new(4, 1.0, 0.4 * PI).unwrap();
        assert_eq!(p.phase(), Phase::Trivial);
        assert_eq!(p.with_theta(0.7 * PI).unwrap().phase(), Phase::Topological);
        assert_eq!(p.with_theta(PI / 2.0).unwrap().phase(), Phase::Critical);
        assert_eq!(phase_classification(1.0, 1.0 + 1e-13), Phase::Critical);
        assert_eq!(phase_classification(1.0, 1.0 + 1e-9), Phase::Topological);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ChainParams::new(0, 1.0, 0.0).unwrap_err().is_config());
        assert!(ChainParams::new(2, 0.0, 0.0).is_err());
        assert!(ChainParams::new(2, 1.0, -1e-9).is_err());
        assert!(ChainParams::new(2, 1.0, TAU + 1e-9).is_err());
        assert!(ChainParams::new(2, 1.0, TAU).is_ok());

        let p = ChainParams::new(2, 1.0, 1.0).unwrap();
        let mut s = ac(0.1, 0.1);
        s.cell_q = 3;
        match build_hamiltonian(&p, &s, &DisorderRealization::clean(2)) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "cell_q"),
            other => panic!("{other:?}"),
        }
        let err = build_hamiltonian(&p, &ac(0.1, 0.1), &DisorderRealization::clean(3)).unwrap_err();
        assert!(err.is_config());
    }

    #[test]
    fn basis_layout() {
        let b = BasisIndex::new(3);
        assert_eq!(b.dim(), 13);
        assert_eq!(b.index(Site::A(1)), Some(0));
        assert_eq!(b.index(Site::B(3)), Some(5));
        assert_eq!(b.index(Site::C(1)), Some(6));
        assert_eq!(b.index(Site::D(2)), Some(9));
        assert_eq!(b.index(Site::Atom), Some(12));
        assert_eq!(b.index(Site::A(0)), None);
        assert_eq!(b.index(Site::D(4)), None);
        for k in 0..b.dim() {
            assert_eq!(b.index(b.site(k).unwrap()), Some(k));
        }
        assert_eq!(b.site(13), None);
    }

    #[test]
    fn single_cell_matrix_by_hand() {
        let theta = 0.3;
        let p = ChainParams::new(1, 1.0, theta).unwrap();
        let (g1, g2, delta) = (0.2, 0.35, -0.05);
        let s = ac(g1, g2).with_delta(delta);
        let h = build_hamiltonian(&p, &s, &DisorderRealization::clean(1)).unwrap();
        let j1 = 1.0 + theta.cos();
        #[rustfmt::skip]
        let expected = DMatrix::from_row_slice(5, 5, &[
            0.0, j1,  0.0, 0.0, g1,
            j1,  0.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, j1,  g2,
            0.0, 0.0, j1,  0.0, 0.0,
            g1,  0.0, g2,  0.0, delta,
        ]);
        assert_eq!(h.matrix(), &expected);
    }

    #[test]
    fn contacts_for_each_scenario() {
        let n = 3;
        let p = ChainParams::new(n, 1.0, 2.0).unwrap();
        let b = p.basis();
        for (c1, c2) in [
            (Chain1Contact::A, Chain2Contact::C),
            (Chain1Contact::A, Chain2Contact::D),
            (Chain1Contact::B, Chain2Contact::C),
            (Chain1Contact::B, Chain2Contact::D),
        ] {
            let s = CouplingScenario::new(c1, 2, c2, 3, 0.1, 0.2);
            let h = build_hamiltonian(&p, &s, &DisorderRealization::clean(n)).unwrap();
            let atom = b.atom();
            let nonzero: Vec<(usize, f64)> = (0..atom)
                .filter(|&k| h[(atom, k)] != 0.0)
                .map(|k| (k, h[(atom, k)]))
                .collect();
            let (s1, s2) = s.contact_sites();
            assert_eq!(nonzero, vec![(b.index(s1).unwrap(), 0.1), (b.index(s2).unwrap(), 0.2)]);
        }
    }

    #[test]
    fn zero_coupling_is_block_diagonal() {
        let p = ChainParams::new(3, 1.0, 2.1).unwrap();
        let h = build_hamiltonian(&p, &ac(0.0, 0.0), &DisorderRealization::clean(3)).unwrap();
        let n = 3;
        for i in 0..h.dim() {
            for j in 0..h.dim() {
                let block = |k: usize| {
                    if k < 2 * n {
                        0
                    } else if k < 4 * n {
                        1
                    } else {
                        2
                    }
                };
                if block(i) != block(j) {
                    assert_eq!(h[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn chain_block_matches_isolated_chain() {
        let p = ChainParams::new(4, 1.0, 2.2).unwrap();
        let h = build_hamiltonian(&p, &ac(0.1, 0.1), &DisorderRealization::clean(4)).unwrap();
        let c = chain_hamiltonian(&p);
        assert_eq!(h.matrix().view((0, 0), (8, 8)), c.matrix().view((0, 0), (8, 8)));
        assert_eq!(h.matrix().view((8, 8), (8, 8)), c.matrix().view((0, 0), (8, 8)));
    }

    #[test]
    fn apply_matches_dense_product() {
        let lattice = Lattice::new(3, 1.0, &ac(0.3, 0.1).with_delta(0.2), None).unwrap();
        let tb = lattice.tight_binding(1.9);
        let dense = tb.to_dense();
        let v: Vec<f64> = (0..tb.dim()).map(|k| (k as f64 * 0.7).sin()).collect();
        let mut out = vec![0.0; tb.dim()];
        tb.apply(&v, &mut out);
        let expected = dense.matrix() * nalgebra::DVector::from_column_slice(&v);
        for k in 0..tb.dim() {
            assert!((out[k] - expected[k]).abs() < 1e-14);
        }
        let eig = dense.matrix().clone().symmetric_eigenvalues();
        let radius = eig.iter().fold(0.0_f64, |m, e| m.max(e.abs()));
        assert!(tb.norm_bound() >= radius - 1e-12);
    }
}
