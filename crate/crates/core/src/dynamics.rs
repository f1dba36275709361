//! Time-dependent Schrödinger evolution under the hopping sweep
//! `θ(t) = θ_start + Ω t`.
//!
//! Each step of length `h` freezes the Hamiltonian at the midpoint angle
//! `θ(t + h/2)` and applies `exp(−i H h)` exactly. Two evaluations of the
//! exponential are available: a Taylor series on the sparse Hamiltonian,
//! summed until the terms drop below 1e-18 (the default), and the spectral
//! decomposition of the dense matrix.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::effective::{five_state_model, FiveStateModel};
use crate::error::{Error, Result};
use crate::model::{Chain1Contact, Chain2Contact, CouplingScenario, Lattice, Site, TightBinding};
use crate::spectral::EigenSystem;

pub type C64 = Complex<f64>;
pub type StateVector = DVector<C64>;

/// Allowed deviation of `‖ψ‖²` from one for an initial state.
pub const NORM_TOLERANCE: f64 = 1e-9;
/// Allowed deviation for states handed to [`fidelity`]; evolved states
/// accumulate rounding over ~10⁶ steps.
pub const FIDELITY_NORM_TOLERANCE: f64 = 1e-8;
/// Upper bound on stored samples when `sample_every` is left automatic.
pub const MAX_SAMPLES: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSchedule {
    pub omega: f64,
    pub theta_start: f64,
    pub theta_end: f64,
}

impl SweepSchedule {
    pub fn new(omega: f64, theta_start: f64, theta_end: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::config("omega", format!("must be > 0, got {omega}")));
        }
        if !(0.0..=TAU).contains(&theta_start) {
            return Err(Error::config("theta_start", "must lie in [0, 2π]"));
        }
        if !(theta_end > theta_start && theta_end <= TAU) {
            return Err(Error::config(
                "theta_end",
                format!("must lie in (theta_start, 2π], got {theta_end}"),
            ));
        }
        Ok(SweepSchedule {
            omega,
            theta_start,
            theta_end,
        })
    }

    /// `θ: 0 → π` over `t_f = π / Ω`.
    pub fn full(omega: f64) -> Result<Self> {
        SweepSchedule::new(omega, 0.0, PI)
    }

    pub fn t_final(&self) -> f64 {
        (self.theta_end - self.theta_start) / self.omega
    }

    pub fn theta_at(&self, t: f64) -> f64 {
        (self.theta_start + self.omega * t).min(self.theta_end)
    }
}

/// How θ varies during an evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Drive {
    Sweep(SweepSchedule),
    /// θ held fixed for `duration`.
    Hold {
        theta: f64,
        duration: f64,
    },
}

impl Drive {
    pub fn hold(theta: f64, duration: f64) -> Result<Self> {
        if !(0.0..=TAU).contains(&theta) {
            return Err(Error::config("theta", "must lie in [0, 2π]"));
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::config("duration", format!("must be > 0, got {duration}")));
        }
        Ok(Drive::Hold { theta, duration })
    }

    pub fn duration(&self) -> f64 {
        match self {
            Drive::Sweep(s) => s.t_final(),
            Drive::Hold { duration, .. } => *duration,
        }
    }

    pub fn theta_at(&self, t: f64) -> f64 {
        match self {
            Drive::Sweep(s) => s.theta_at(t),
            Drive::Hold { theta, .. } => *theta,
        }
    }

    /// Largest |dθ/dt| along the drive.
    pub fn rate(&self) -> f64 {
        match self {
            Drive::Sweep(s) => s.omega,
            Drive::Hold { .. } => 0.0,
        }
    }
}

impl From<SweepSchedule> for Drive {
    fn from(s: SweepSchedule) -> Self {
        Drive::Sweep(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpMethod {
    #[default]
    Taylor,
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stepping {
    pub dt: f64,
    /// Record every `k`-th step; `None` picks `k` so that at most
    /// [`MAX_SAMPLES`] samples are stored.
    pub sample_every: Option<usize>,
    pub method: ExpMethod,
}

impl Default for Stepping {
    fn default() -> Self {
        Stepping {
            dt: 0.1,
            sample_every: None,
            method: ExpMethod::Taylor,
        }
    }
}

impl Stepping {
    pub fn with_dt(dt: f64) -> Self {
        Stepping {
            dt,
            ..Default::default()
        }
    }

    pub fn sample_every(mut self, k: usize) -> Self {
        self.sample_every = Some(k);
        self
    }

    pub fn method(mut self, method: ExpMethod) -> Self {
        self.method = method;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::config("dt", format!("must be > 0, got {}", self.dt)));
        }
        if self.sample_every == Some(0) {
            return Err(Error::config("sample_every", "must be >= 1"));
        }
        Ok(())
    }
}

/// Sampled evolution. `populations[k][i] = |states[k][i]|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub thetas: Vec<f64>,
    pub states: Vec<StateVector>,
    pub populations: Vec<Vec<f64>>,
}

impl Trajectory {
    fn with_capacity(n: usize) -> Self {
        Trajectory {
            times: Vec::with_capacity(n),
            thetas: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            populations: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, t: f64, theta: f64, psi: &[C64]) -> Result<()> {
        if psi.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Numeric(format!("non-finite amplitude at t = {t}")));
        }
        self.times.push(t);
        self.thetas.push(theta);
        self.states.push(DVector::from_column_slice(psi));
        self.populations.push(psi.iter().map(|z| z.norm_sqr()).collect());
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("trajectory has samples")
    }

    pub fn final_populations(&self) -> &[f64] {
        self.populations.last().expect("trajectory has samples")
    }

    /// Population of basis index `index` at every sample.
    pub fn series(&self, index: usize) -> Vec<f64> {
        self.populations.iter().map(|p| p[index]).collect()
    }

    /// Largest `|‖ψ‖² − 1|` over the samples.
    pub fn max_norm_drift(&self) -> f64 {
        self.populations
            .iter()
            .map(|p| (p.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Ket with a single unit amplitude at `index`.
pub fn basis_state(dim: usize, index: usize) -> StateVector {
    let mut v = DVector::from_element(dim, C64::new(0.0, 0.0));
    v[index] = C64::new(1.0, 0.0);
    v
}

/// Atom excited, chains empty.
pub fn atom_excited(n_cells: usize) -> StateVector {
    basis_state(4 * n_cells + 1, 4 * n_cells)
}

pub fn to_complex(v: &DVector<f64>) -> StateVector {
    v.map(|x| C64::new(x, 0.0))
}

fn check_norm(psi: &StateVector, tol: f64, what: &str) -> Result<()> {
    let n2 = psi.norm_squared();
    if !n2.is_finite() || (n2 - 1.0).abs() > tol {
        return Err(Error::Input(format!("{what} has ‖ψ‖² = {n2}, expected 1")));
    }
    Ok(())
}

/// Applies `exp(−i H(θ) h)` in place.
trait Exponentiator {
    fn step(&mut self, theta: f64, h: f64, psi: &mut [C64]) -> Result<()>;
}

struct SparseTaylor<'a> {
    lattice: &'a Lattice,
    tb: TightBinding,
    term: Vec<C64>,
    next: Vec<C64>,
}

impl<'a> SparseTaylor<'a> {
    fn new(lattice: &'a Lattice) -> Self {
        let dim = lattice.dim();
        SparseTaylor {
            lattice,
            tb: lattice.tight_binding(0.0),
            term: vec![C64::new(0.0, 0.0); dim],
            next: vec![C64::new(0.0, 0.0); dim],
        }
    }
}

const TAYLOR_CUTOFF: f64 = 1e-18;
const TAYLOR_MAX_TERMS: usize = 60;

impl Exponentiator for SparseTaylor<'_> {
    fn step(&mut self, theta: f64, h: f64, psi: &mut [C64]) -> Result<()> {
        self.lattice.fill(theta, &mut self.tb);
        let substeps = (self.tb.norm_bound() * h / 2.0).ceil().max(1.0) as usize;
        let tau = h / substeps as f64;
        for _ in 0..substeps {
            self.term.copy_from_slice(psi);
            let mut converged = false;
            for k in 1..=TAYLOR_MAX_TERMS {
                self.tb.apply(&self.term, &mut self.next);
                // term_k = (−iτ/k) H term_{k−1}
                let c = tau / k as f64;
                let mut largest = 0.0_f64;
                for ((t, n), p) in self.term.iter_mut().zip(&self.next).zip(psi.iter_mut()) {
                    *t = C64::new(c * n.im, -c * n.re);
                    *p += *t;
                    largest = largest.max(t.re.abs().max(t.im.abs()));
                }
                if largest < TAYLOR_CUTOFF {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::Numeric(format!(
                    "Taylor series for exp(-iHh) did not converge at θ = {theta}"
                )));
            }
        }
        Ok(())
    }
}

/// `exp(−iHh) ψ = V e^{−iEh} Vᵀ ψ` from the dense spectral decomposition.
struct DenseSpectral<F: FnMut(f64) -> Result<DMatrix<f64>>> {
    hamiltonian: F,
    coeffs: Vec<C64>,
}

impl<F: FnMut(f64) -> Result<DMatrix<f64>>> DenseSpectral<F> {
    fn new(hamiltonian: F) -> Self {
        DenseSpectral {
            hamiltonian,
            coeffs: Vec::new(),
        }
    }
}

impl<F: FnMut(f64) -> Result<DMatrix<f64>>> Exponentiator for DenseSpectral<F> {
    fn step(&mut self, theta: f64, h: f64, psi: &mut [C64]) -> Result<()> {
        let m = (self.hamiltonian)(theta)?;
        let eig = EigenSystem::of_symmetric(&m)?;
        let dim = eig.dim();
        self.coeffs.clear();
        for k in 0..dim {
            let col = eig.vectors.column(k);
            let mut c = C64::new(0.0, 0.0);
            for (v, p) in col.iter().zip(psi.iter()) {
                c += *p * *v;
            }
            let (s, co) = (eig.values[k] * h).sin_cos();
            self.coeffs.push(c * C64::new(co, -s));
        }
        for (i, p) in psi.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (k, c) in self.coeffs.iter().enumerate() {
                acc += *c * eig.vectors[(i, k)];
            }
            *p = acc;
        }
        Ok(())
    }
}

fn run<E: Exponentiator>(exp: &mut E, drive: &Drive, initial: &StateVector, stepping: &Stepping) -> Result<Trajectory> {
    stepping.validate()?;
    check_norm(initial, NORM_TOLERANCE, "initial state")?;
    let total = drive.duration();
    let dt = stepping.dt;
    let n_steps = ((total / dt) * (1.0 - 1e-14)).ceil().max(1.0) as usize;
    let every = stepping
        .sample_every
        .unwrap_or_else(|| n_steps.div_ceil(MAX_SAMPLES - 2).max(1));

    let mut traj = Trajectory::with_capacity(n_steps / every + 2);
    let mut psi: Vec<C64> = initial.iter().copied().collect();
    traj.push(0.0, drive.theta_at(0.0), &psi)?;

    for k in 0..n_steps {
        let t0 = k as f64 * dt;
        let t1 = if k + 1 == n_steps { total } else { (k + 1) as f64 * dt };
        let h = t1 - t0;
        exp.step(drive.theta_at(t0 + 0.5 * h), h, &mut psi)?;
        if (k + 1) % every == 0 || k + 1 == n_steps {
            traj.push(t1, drive.theta_at(t1), &psi)?;
        }
    }
    Ok(traj)
}

/// Evolves `initial` on the full lattice under `drive`.
pub fn propagate(lattice: &Lattice, drive: &Drive, initial: &StateVector, stepping: &Stepping) -> Result<Trajectory> {
    if initial.len() != lattice.dim() {
        return Err(Error::Input(format!(
            "initial state has dimension {}, lattice needs {}",
            initial.len(),
            lattice.dim()
        )));
    }
    match stepping.method {
        ExpMethod::Taylor => run(&mut SparseTaylor::new(lattice), drive, initial, stepping),
        ExpMethod::Spectral => {
            let mut exp = DenseSpectral::new(|theta| Ok(lattice.hamiltonian(theta).into_matrix()));
            run(&mut exp, drive, initial, stepping)
        }
    }
}

/// Evolves five amplitudes under the five-state matrix `H_sub(θ(t))`, with
/// the edge-state kets treated as fixed labels. Every angle visited must be
/// in the topological phase.
pub fn propagate_five_state(
    lattice: &Lattice,
    drive: &Drive,
    initial: &StateVector,
    stepping: &Stepping,
) -> Result<Trajectory> {
    if initial.len() != 5 {
        return Err(Error::Input("five-state evolution needs a 5-component state".into()));
    }
    let scenario = *lattice.scenario();
    let mut exp = DenseSpectral::new(|theta| {
        let params = lattice.params_at(theta)?;
        let model: FiveStateModel = five_state_model(&params, &scenario)?;
        Ok(DMatrix::from_iterator(5, 5, model.matrix.iter().copied()))
    });
    run(&mut exp, drive, initial, stepping)
}

/// `|⟨target|final⟩|`, the modulus of the overlap.
pub fn fidelity(final_state: &StateVector, target: &StateVector) -> Result<f64> {
    if final_state.len() != target.len() {
        return Err(Error::Input("states have different dimensions".into()));
    }
    check_norm(final_state, FIDELITY_NORM_TOLERANCE, "final state")?;
    check_norm(target, FIDELITY_NORM_TOLERANCE, "target state")?;
    Ok(target.dotc(final_state).norm().min(1.0))
}

/// `(|B_N⟩ + |D_N⟩)/√2`, the transfer target for an (A, C) contact.
pub fn standard_target(scenario: &CouplingScenario, n_cells: usize) -> Result<StateVector> {
    if (scenario.chain1, scenario.chain2) != (Chain1Contact::A, Chain2Contact::C) {
        return Err(Error::Input(format!(
            "the standard target is defined for (A, C) contacts, got {scenario}; use receiving_target"
        )));
    }
    Ok(receiving_target(scenario, n_cells))
}

/// Equal superposition of the two end sites that receive the excitation for
/// this contact choice (see [`CouplingScenario::receiving_sites`]).
pub fn receiving_target(scenario: &CouplingScenario, n_cells: usize) -> StateVector {
    let basis = crate::model::BasisIndex::new(n_cells);
    let (s1, s2) = scenario.receiving_sites(n_cells);
    let mut v = DVector::from_element(basis.dim(), C64::new(0.0, 0.0));
    for s in [s1, s2] {
        v[basis.index(s).expect("end site exists")] = C64::new(FRAC_1_SQRT_2, 0.0);
    }
    v
}

/// Final population on a site.
pub fn site_population(traj: &Trajectory, n_cells: usize, site: Site) -> Option<f64> {
    let idx = crate::model::BasisIndex::new(n_cells).index(site)?;
    traj.final_populations().get(idx).copied()
}
