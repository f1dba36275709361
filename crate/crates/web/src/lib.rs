//! WebAssembly bindings for a static browser demo. The atom touches `A_1`
//! and `C_1`; every operation returns a flat `Float64Array`.

use std::f64::consts::PI;

use ssh_passage::dynamics::{atom_excited, propagate, Drive, Stepping, SweepSchedule};
use ssh_passage::effective::five_state_model;
use ssh_passage::model::{Chain1Contact, Chain2Contact, ChainParams, CouplingScenario, Lattice, Phase};
use ssh_passage::spectral::EigenSystem;
use wasm_bindgen::prelude::*;

const MAX_CELLS: usize = 10;

fn scenario(g1: f64, g2: f64, delta: f64) -> CouplingScenario {
    CouplingScenario::new(Chain1Contact::A, 1, Chain2Contact::C, 1, g1, g2).with_delta(delta)
}

fn check_cells(n_cells: usize) -> Result<(), String> {
    if (1..=MAX_CELLS).contains(&n_cells) {
        Ok(())
    } else {
        Err(format!("n_cells must lie in [1, {MAX_CELLS}]"))
    }
}

/// Ascending eigenvalues of the full Hamiltonian at `θ = theta_pi · π`.
pub fn spectrum(n_cells: usize, theta_pi: f64, g1: f64, g2: f64, delta: f64) -> Result<Vec<f64>, String> {
    check_cells(n_cells)?;
    let lattice = Lattice::new(n_cells, 1.0, &scenario(g1, g2, delta), None).map_err(|e| e.to_string())?;
    let eig = EigenSystem::of_symmetric(lattice.hamiltonian(theta_pi * PI).matrix()).map_err(|e| e.to_string())?;
    Ok(eig.values.iter().copied().collect())
}

/// Rows `[θ/π, atom, far edge 1, far edge 2]` of the dark-state weights on
/// `points` angles over `(π/2, π]`.
pub fn dark_state_curve(n_cells: usize, g1: f64, g2: f64, points: usize) -> Result<Vec<f64>, String> {
    check_cells(n_cells)?;
    let points = points.clamp(2, 2000);
    let params = ChainParams::new(n_cells, 1.0, PI).map_err(|e| e.to_string())?;
    let s = scenario(g1, g2, 0.0);
    let mut out = Vec::with_capacity(4 * points);
    for k in 1..=points {
        let t = 0.5 + 0.5 * k as f64 / points as f64;
        let at = params.with_theta(t * PI).map_err(|e| e.to_string())?;
        if at.phase() != Phase::Topological {
            continue;
        }
        let Ok(dark) = five_state_model(&at, &s).and_then(|m| m.dark_state()) else {
            continue;
        };
        let p = dark.populations();
        out.extend([t, p[0], p[1], p[2]]);
    }
    Ok(out)
}

/// Rows `[t, θ/π, atom, B_N, D_N]` for the sweep `θ: 0 → π` at rate `omega`,
/// starting from the excited atom. About `samples` rows are returned.
pub fn transfer(n_cells: usize, g1: f64, g2: f64, delta: f64, omega: f64, samples: usize) -> Result<Vec<f64>, String> {
    check_cells(n_cells)?;
    if !(omega.is_finite() && omega >= 1e-4) {
        return Err("omega must be at least 1e-4".into());
    }
    let lattice = Lattice::new(n_cells, 1.0, &scenario(g1, g2, delta), None).map_err(|e| e.to_string())?;
    let drive = Drive::Sweep(SweepSchedule::full(omega).map_err(|e| e.to_string())?);
    let dt = 0.1;
    let steps = (drive.duration() / dt).ceil() as usize;
    let stride = (steps / samples.clamp(2, 5000)).max(1);
    let traj = propagate(
        &lattice,
        &drive,
        &atom_excited(n_cells),
        &Stepping::with_dt(dt).sample_every(stride),
    )
    .map_err(|e| e.to_string())?;
    let basis = lattice.basis();
    let (r1, r2) = lattice.scenario().receiving_sites(n_cells);
    let (a, b, d) = (
        basis.atom(),
        basis.index(r1).expect("site"),
        basis.index(r2).expect("site"),
    );
    let mut out = Vec::with_capacity(5 * traj.len());
    for ((t, th), p) in traj.times.iter().zip(&traj.thetas).zip(&traj.populations) {
        out.extend([*t, th / PI, p[a], p[b], p[d]]);
    }
    Ok(out)
}

#[wasm_bindgen(js_name = spectrum)]
pub fn spectrum_js(n_cells: usize, theta_pi: f64, g1: f64, g2: f64, delta: f64) -> Result<Vec<f64>, JsError> {
    spectrum(n_cells, theta_pi, g1, g2, delta).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = darkStateCurve)]
pub fn dark_state_curve_js(n_cells: usize, g1: f64, g2: f64, points: usize) -> Result<Vec<f64>, JsError> {
    dark_state_curve(n_cells, g1, g2, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = transfer)]
pub fn transfer_js(
    n_cells: usize,
    g1: f64,
    g2: f64,
    delta: f64,
    omega: f64,
    samples: usize,
) -> Result<Vec<f64>, JsError> {
    transfer(n_cells, g1, g2, delta, omega, samples).map_err(|e| JsError::new(&e))
}
