//! Adiabaticity of the zero-energy passage in the full system.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::model::{ChainParams, CouplingScenario, DisorderRealization, Lattice, Phase};
use crate::spectral::EigenSystem;

/// Step in θ used for the finite-difference eigenvector derivative.
pub const THETA_STEP: f64 = 1e-6;

/// Minimum level spacing (in units of `J`) accepted by the adiabaticity
/// parameter.
pub const DEGENERACY_THRESHOLD: f64 = 1e-14;

/// Zero-energy level and its upper neighbour at one angle.
#[derive(Debug, Clone, PartialEq)]
pub struct GapInfo {
    pub zero_energy: f64,
    pub upper_energy: f64,
    pub zero_state: DVector<f64>,
    pub upper_state: DVector<f64>,
}

impl GapInfo {
    pub fn gap(&self) -> f64 {
        self.upper_energy - self.zero_energy
    }
}

fn gap_info(lattice: &Lattice, theta: f64) -> Result<GapInfo> {
    let eig = EigenSystem::of_symmetric(lattice.hamiltonian(theta).matrix())?;
    let k0 = eig.min_abs_index();
    if k0 + 1 >= eig.dim() {
        return Err(Error::Domain("zero-energy level has no upper neighbour".into()));
    }
    Ok(GapInfo {
        zero_energy: eig.values[k0],
        upper_energy: eig.values[k0 + 1],
        zero_state: eig.vector(k0),
        upper_state: eig.vector(k0 + 1),
    })
}

/// Eigenvector of `lattice` at `theta` that best overlaps `reference`, with
/// its sign chosen so that the overlap is positive.
fn matching_vector(lattice: &Lattice, theta: f64, reference: &DVector<f64>) -> Result<DVector<f64>> {
    let eig = EigenSystem::of_symmetric(lattice.hamiltonian(theta).matrix())?;
    let (best, overlap) = (0..eig.dim())
        .map(|k| (k, eig.vectors.column(k).dot(reference)))
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .expect("non-empty");
    let mut v = eig.vector(best);
    if overlap < 0.0 {
        v.neg_mut();
    }
    Ok(v)
}

/// `Λ = |⟨dΨ_G/dt | Ψ_0⟩| / (λ_1 − λ_0)` for the exact Hamiltonian.
///
/// `Ψ_0` is the level of minimum `|E|` and `Ψ_G` the next level above it. The
/// time derivative is `dθ/dt` times a central difference in θ with step
/// [`THETA_STEP`] (one-sided at the ends of `[0, 2π]`); the neighbouring
/// eigenvectors are matched to `Ψ_G` by overlap.
pub fn adiabaticity_parameter(
    params: &ChainParams,
    scenario: &CouplingScenario,
    dtheta_dt: f64,
    disorder: Option<&DisorderRealization>,
) -> Result<f64> {
    if params.phase() != Phase::Topological {
        return Err(Error::Domain(format!(
            "adiabaticity parameter is defined in the topological phase, θ = {}",
            params.theta()
        )));
    }
    let lattice = Lattice::from_params(params, scenario, disorder)?;
    let theta = params.theta();
    let info = gap_info(&lattice, theta)?;
    let threshold = DEGENERACY_THRESHOLD * params.hopping();
    if info.gap().abs() < threshold {
        return Err(Error::Degenerate {
            gap: info.gap(),
            threshold,
        });
    }
    if dtheta_dt == 0.0 {
        return Ok(0.0);
    }

    let h = THETA_STEP * theta.abs().max(1.0);
    let lo = (theta - h).max(0.0);
    let hi = (theta + h).min(std::f64::consts::TAU);
    let plus = matching_vector(&lattice, hi, &info.upper_state)?;
    let minus = matching_vector(&lattice, lo, &info.upper_state)?;
    let derivative = (plus - minus) * (dtheta_dt / (hi - lo));
    Ok((derivative.dot(&info.zero_state) / info.gap()).abs())
}

/// Zero-energy level and its upper neighbour of the exact Hamiltonian.
pub fn zero_mode_gap(
    params: &ChainParams,
    scenario: &CouplingScenario,
    disorder: Option<&DisorderRealization>,
) -> Result<GapInfo> {
    let lattice = Lattice::from_params(params, scenario, disorder)?;
    gap_info(&lattice, params.theta())
}
