//! Reproducible static disorder and ensemble statistics.
//!
//! Every offset is drawn from ChaCha20 (via `rand_chacha`) keyed by three
//! numbers: the master seed selects the key (`seed_from_u64`), the
//! realization index selects the stream, and the draw id selects the 64-bit
//! word position (`2 · id`). Draw ids are `0..4N` for the sites in basis
//! order followed by `4N + b` for bond `b`. One `u64` becomes
//! `u = (x >> 11) · 2⁻⁵³ ∈ [0, 1)` and the offset is `ξ (2u − 1)`.
//! Realizations therefore do not depend on evaluation order, and a site keeps
//! its draw when other sites are added or removed.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::dynamics::{fidelity, propagate, Drive, StateVector, Stepping};
use crate::error::{Error, Result};
use crate::model::{bond_count, DisorderRealization, Lattice};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderSpec {
    /// Half-width of the on-site frequency offsets.
    pub xi_onsite: f64,
    /// Half-width of the hopping offsets.
    pub xi_bond: f64,
    pub n_realizations: usize,
    pub master_seed: u64,
}

impl DisorderSpec {
    pub fn validate(&self) -> Result<()> {
        for (field, xi) in [("xi_onsite", self.xi_onsite), ("xi_bond", self.xi_bond)] {
            if !(xi.is_finite() && xi >= 0.0) {
                return Err(Error::config(field, format!("must be finite and >= 0, got {xi}")));
            }
        }
        if self.n_realizations == 0 {
            return Err(Error::config("n_realizations", "need at least one realization"));
        }
        Ok(())
    }
}

fn uniform_offset(rng: &mut ChaCha20Rng, draw_id: u64, xi: f64) -> f64 {
    if xi == 0.0 {
        return 0.0;
    }
    rng.set_word_pos(2 * draw_id as u128);
    let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    xi * (2.0 * u - 1.0)
}

pub fn sample_realization(spec: &DisorderSpec, index: usize, n_cells: usize) -> Result<DisorderRealization> {
    spec.validate()?;
    if index >= spec.n_realizations {
        return Err(Error::config(
            "index",
            format!("realization {index} out of range (n = {})", spec.n_realizations),
        ));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(spec.master_seed);
    rng.set_stream(index as u64);
    let sites = 4 * n_cells;
    let onsite_offsets = (0..sites)
        .map(|j| uniform_offset(&mut rng, j as u64, spec.xi_onsite))
        .collect();
    let bond_offsets = (0..bond_count(n_cells))
        .map(|b| uniform_offset(&mut rng, (sites + b) as u64, spec.xi_bond))
        .collect();
    Ok(DisorderRealization {
        onsite_offsets,
        bond_offsets,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantityStats {
    pub name: String,
    pub mean: f64,
    /// Population standard deviation (divides by the number of values).
    pub std: f64,
    pub values: Vec<f64>,
}

impl QuantityStats {
    pub fn from_values(name: &str, values: Vec<f64>) -> Self {
        let n = values.len().max(1) as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        QuantityStats {
            name: name.to_string(),
            mean,
            std: var.sqrt(),
            values,
        }
    }
}

/// A realization that could not be evaluated. `(master_seed, index)`
/// regenerates it with [`sample_realization`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationFailure {
    pub master_seed: u64,
    pub index: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub master_seed: u64,
    /// Realization indices that completed, in ascending order; `values` of
    /// every quantity line up with these.
    pub indices: Vec<usize>,
    pub quantities: Vec<QuantityStats>,
    pub failures: Vec<RealizationFailure>,
}

impl EnsembleStats {
    pub fn quantity(&self, name: &str) -> Option<&QuantityStats> {
        self.quantities.iter().find(|q| q.name == name)
    }
}

/// Evaluates `f` on every realization and collects the named outputs.
/// Realizations run in parallel when the `parallel` feature is on; results are
/// identical either way.
pub fn ensemble_map<F>(spec: &DisorderSpec, n_cells: usize, names: &[&str], f: F) -> Result<EnsembleStats>
where
    F: Fn(&DisorderRealization) -> Result<Vec<f64>> + Sync,
{
    spec.validate()?;
    let run_one = |index: usize| -> (usize, Result<Vec<f64>>) {
        let out = sample_realization(spec, index, n_cells).and_then(|r| f(&r));
        (index, out)
    };
    #[cfg(feature = "parallel")]
    let results: Vec<(usize, Result<Vec<f64>>)> = {
        use rayon::prelude::*;
        (0..spec.n_realizations).into_par_iter().map(run_one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<(usize, Result<Vec<f64>>)> = (0..spec.n_realizations).map(run_one).collect();

    let mut indices = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    let mut failures = Vec::new();
    for (index, r) in results {
        match r {
            Ok(values) if values.len() == names.len() => {
                indices.push(index);
                for (c, v) in columns.iter_mut().zip(values) {
                    c.push(v);
                }
            }
            Ok(values) => failures.push(RealizationFailure {
                master_seed: spec.master_seed,
                index,
                message: format!("expected {} outputs, got {}", names.len(), values.len()),
            }),
            Err(e) => failures.push(RealizationFailure {
                master_seed: spec.master_seed,
                index,
                message: e.to_string(),
            }),
        }
    }
    let quantities = names
        .iter()
        .zip(columns)
        .map(|(name, values)| QuantityStats::from_values(name, values))
        .collect();
    Ok(EnsembleStats {
        master_seed: spec.master_seed,
        indices,
        quantities,
        failures,
    })
}

/// Transfer fidelity over a disorder ensemble. Quantities: `fidelity`
/// (`|⟨target|ψ(t_f)⟩|`) and `target_weight` (final population on the
/// target's support).
pub fn ensemble_fidelity(
    clean: &Lattice,
    drive: &Drive,
    initial: &StateVector,
    target: &StateVector,
    stepping: &Stepping,
    spec: &DisorderSpec,
) -> Result<EnsembleStats> {
    let n = clean.n_cells();
    ensemble_map(spec, n, &["fidelity", "target_weight"], |realization| {
        let lattice = Lattice::new(n, clean.hopping(), clean.scenario(), Some(realization))?;
        let traj = propagate(&lattice, drive, initial, stepping)?;
        let psi = traj.final_state();
        let f = fidelity(psi, target)?;
        let weight = target
            .iter()
            .zip(psi.iter())
            .filter(|(t, _)| t.norm() > 0.0)
            .map(|(_, p)| p.norm_sqr())
            .sum();
        Ok(vec![f, weight])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(xi_onsite: f64, xi_bond: f64) -> DisorderSpec {
        DisorderSpec {
            xi_onsite,
            xi_bond,
            n_realizations: 8,
            master_seed: 0x5eed,
        }
    }

    #[test]
    fn zero_width_is_clean() {
        let r = sample_realization(&spec(0.0, 0.0), 3, 4).unwrap();
        assert_eq!(r, DisorderRealization::clean(4));
    }

    #[test]
    fn offsets_stay_in_range_and_are_sized() {
        let s = spec(1e-3, 0.1);
        for i in 0..s.n_realizations {
            let r = sample_realization(&s, i, 5).unwrap();
            r.validate(5).unwrap();
            assert!(r.onsite_offsets.iter().all(|x| x.abs() <= 1e-3));
            assert!(r.bond_offsets.iter().all(|x| x.abs() <= 0.1));
        }
    }

    #[test]
    fn deterministic_and_distinct() {
        let s = spec(0.5, 0.5);
        let a = sample_realization(&s, 2, 4).unwrap();
        let b = sample_realization(&s, 2, 4).unwrap();
        assert_eq!(a, b);
        let c = sample_realization(&s, 3, 4).unwrap();
        assert_ne!(a, c);
        let other_seed = DisorderSpec { master_seed: 1, ..s };
        assert_ne!(a, sample_realization(&other_seed, 2, 4).unwrap());
    }

    #[test]
    fn site_draws_do_not_depend_on_chain_length() {
        let s = spec(0.5, 0.0);
        let short = sample_realization(&s, 1, 2).unwrap();
        let long = sample_realization(&s, 1, 6).unwrap();
        assert_eq!(short.onsite_offsets[..8], long.onsite_offsets[..8]);
    }

    #[test]
    fn index_out_of_range() {
        assert!(sample_realization(&spec(0.1, 0.1), 8, 4).unwrap_err().is_config());
        let bad = DisorderSpec {
            xi_bond: -1.0,
            ..spec(0.1, 0.1)
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn population_std() {
        let q = QuantityStats::from_values("x", vec![1.0, 3.0]);
        assert_eq!(q.mean, 2.0);
        assert_eq!(q.std, 1.0);
        let single = QuantityStats::from_values("x", vec![0.7]);
        assert_eq!(single.std, 0.0);
    }

    #[test]
    fn failures_are_recorded_not_dropped() {
        let s = spec(0.1, 0.0);
        let stats = ensemble_map(&s, 2, &["v"], |r| {
            if r.onsite_offsets[0] > 0.0 {
                Err(Error::Numeric("boom".into()))
            } else {
                Ok(vec![r.onsite_offsets[0]])
            }
        })
        .unwrap();
        assert_eq!(stats.indices.len() + stats.failures.len(), 8);
        assert!(stats.quantity("v").unwrap().values.iter().all(|v| *v <= 0.0));
        assert!(!stats.failures.is_empty());
        for f in &stats.failures {
            let again = sample_realization(&s, f.index, 2).unwrap();
            assert_eq!(f.master_seed, s.master_seed);
            assert!(again.onsite_offsets[0] > 0.0);
        }
    }
}
