//! Experiment configuration: a TOML file merged over per-experiment
//! defaults, then `key=value` overrides on dotted paths.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ExperimentKind;
use crate::dynamics::{Drive, ExpMethod, Stepping, SweepSchedule};
use crate::error::{Error, Result};
use crate::model::{Chain1Contact, Chain2Contact, ChainParams, CouplingScenario, Lattice};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemSection {
    pub n_cells: usize,
    pub hopping: f64,
    /// Fixed sweep angle in units of π (spectra and fixed-angle runs).
    pub theta_pi: f64,
}

impl Default for SystemSection {
    fn default() -> Self {
        SystemSection {
            n_cells: 4,
            hopping: 1.0,
            theta_pi: 0.7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CouplingSection {
    pub chain1: Chain1Contact,
    pub p: usize,
    pub chain2: Chain2Contact,
    pub q: usize,
    pub g1: f64,
    pub g2: f64,
    pub delta: f64,
}

impl Default for CouplingSection {
    fn default() -> Self {
        CouplingSection {
            chain1: Chain1Contact::A,
            p: 1,
            chain2: Chain2Contact::C,
            q: 1,
            g1: 0.01,
            g2: 0.01,
            delta: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub omega: f64,
    pub theta_start_pi: f64,
    pub theta_end_pi: f64,
    pub dt: f64,
    /// 0 picks the sampling stride automatically.
    pub sample_every: usize,
    pub method: ExpMethod,
    /// Evolution time for fixed-angle runs.
    pub hold_duration: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            omega: 1e-4,
            theta_start_pi: 0.0,
            theta_end_pi: 1.0,
            dt: 0.1,
            sample_every: 0,
            method: ExpMethod::Taylor,
            hold_duration: 5e3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DisorderSection {
    pub xi_onsite: f64,
    pub xi_bond: f64,
    pub realizations: usize,
    pub seed: u64,
}

impl Default for DisorderSection {
    fn default() -> Self {
        DisorderSection {
            xi_onsite: 0.0,
            xi_bond: 0.0,
            realizations: 20,
            seed: 2024,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

/// `points` samples from `start` to `end` inclusive, or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub points: usize,
    pub scale: Scale,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
}

impl Default for Grid {
    fn default() -> Self {
        Grid::linear(0.0, 1.0, 200)
    }
}

impl Grid {
    pub fn linear(start: f64, end: f64, points: usize) -> Self {
        Grid {
            start,
            end,
            points,
            scale: Scale::Linear,
            values: Vec::new(),
        }
    }

    pub fn log(start: f64, end: f64, points: usize) -> Self {
        Grid {
            scale: Scale::Log,
            ..Grid::linear(start, end, points)
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if !self.values.is_empty() {
            return self.values.clone();
        }
        if self.points == 1 {
            return vec![self.start];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    return self.end;
                }
                let s = k as f64 / last;
                match self.scale {
                    Scale::Linear => self.start + s * (self.end - self.start),
                    Scale::Log => (self.start.ln() + s * (self.end.ln() - self.start.ln())).exp(),
                }
            })
            .collect()
    }

    fn validate(&self, field: &str) -> Result<()> {
        if self.values.is_empty() {
            if self.points == 0 {
                return Err(Error::config(format!("{field}.points"), "grid must not be empty"));
            }
            if !(self.start.is_finite() && self.end.is_finite()) {
                return Err(Error::config(field, "grid bounds must be finite"));
            }
            if self.points > 1 && self.end <= self.start {
                return Err(Error::config(
                    format!("{field}.end"),
                    format!("grid must be strictly increasing ({} <= {})", self.end, self.start),
                ));
            }
            if self.scale == Scale::Log && self.start <= 0.0 {
                return Err(Error::config(
                    format!("{field}.start"),
                    "log grid needs a positive start",
                ));
            }
        } else {
            if !self.values.iter().all(|v| v.is_finite()) {
                return Err(Error::config(format!("{field}.values"), "values must be finite"));
            }
            if self.values.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::config(
                    format!("{field}.values"),
                    "values must be strictly increasing",
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    /// Sweep angle in units of π.
    pub theta_pi: Grid,
    pub delta: Grid,
    pub omega: Grid,
    pub n_cells: Vec<usize>,
    /// `(p, q)` contact cells for the mixing-angle sweep.
    pub contacts: Vec<[usize; 2]>,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            theta_pi: Grid::linear(0.0, 1.0, 200),
            delta: Grid::linear(-0.4, 0.4, 81),
            omega: Grid::log(1e-5, 1e-2, 13),
            n_cells: (2..=12).collect(),
            contacts: vec![[1, 1], [1, 4], [4, 1], [2, 4], [3, 4], [4, 4]],
        }
    }
}

/// Which level of the spectrum the hybrid-mode map follows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchSelect {
    /// The central level with the largest atom weight at the first grid point.
    Atom,
    /// 1-based position among the five central levels at the first grid point.
    Index(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    pub formats: Vec<Format>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: None,
            formats: vec![Format::Csv, Format::Json, Format::Svg],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub system: SystemSection,
    pub coupling: CouplingSection,
    pub sweep: SweepSection,
    pub disorder: DisorderSection,
    pub grid: GridSection,
    pub branch: BranchSelect,
    pub output: OutputSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: ExperimentKind::AdiabaticEvolve,
            system: SystemSection::default(),
            coupling: CouplingSection::default(),
            sweep: SweepSection::default(),
            disorder: DisorderSection::default(),
            grid: GridSection::default(),
            branch: BranchSelect::Atom,
            output: OutputSection::default(),
        }
    }
}

impl ExperimentConfig {
    /// Defaults tuned for one experiment.
    pub fn defaults_for(kind: ExperimentKind) -> Self {
        let mut c = ExperimentConfig {
            experiment: kind,
            ..Default::default()
        };
        match kind {
            ExperimentKind::SpectrumVsDelta | ExperimentKind::HybridModeMap => {
                c.grid.delta = Grid::linear(-0.1, 0.1, 81);
            }
            ExperimentKind::HoldEvolve => {
                c.system.theta_pi = 0.4;
            }
            ExperimentKind::DisorderMap => {
                c.disorder.xi_onsite = 1e-3;
                c.disorder.realizations = 1;
            }
            ExperimentKind::DisorderFidelity => {
                c.disorder.xi_bond = 1e-3;
            }
            _ => {}
        }
        c
    }

    /// Resolves a configuration: experiment defaults, then the file (if
    /// any), then `overrides` of the form `section.key=value`.
    pub fn resolve(kind: ExperimentKind, file: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let text = match file {
            Some(path) => Some(std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?),
            None => None,
        };
        Self::resolve_str(kind, text.as_deref(), overrides)
    }

    pub fn resolve_str(kind: ExperimentKind, file: Option<&str>, overrides: &[String]) -> Result<Self> {
        let defaults = Self::defaults_for(kind);
        let mut table = toml::Table::try_from(&defaults)
            .map_err(|e| Error::config("config", format!("cannot encode defaults: {e}")))?;
        if let Some(text) = file {
            let user: toml::Table =
                toml::from_str(text).map_err(|e| Error::config("config", e.message().to_string()))?;
            merge(&mut table, user);
        }
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        table.insert("experiment".into(), toml::Value::String(kind.name().into()));

        let config: ExperimentConfig = serde_path_to_error::deserialize(toml::Value::Table(table))
            .map_err(|e| Error::config(e.path().to_string(), e.inner().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.system;
        if s.n_cells == 0 {
            return Err(Error::config("system.n_cells", "need at least one cell"));
        }
        if !(s.hopping.is_finite() && s.hopping > 0.0) {
            return Err(Error::config("system.hopping", "must be > 0"));
        }
        if !(0.0..=2.0).contains(&s.theta_pi) {
            return Err(Error::config("system.theta_pi", "must lie in [0, 2]"));
        }
        let c = &self.coupling;
        if !(1..=s.n_cells).contains(&c.p) {
            return Err(Error::config("coupling.p", format!("must lie in [1, {}]", s.n_cells)));
        }
        if !(1..=s.n_cells).contains(&c.q) {
            return Err(Error::config("coupling.q", format!("must lie in [1, {}]", s.n_cells)));
        }
        for (f, v) in [("coupling.g1", c.g1), ("coupling.g2", c.g2)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config(f, "must be finite and >= 0"));
            }
        }
        if !c.delta.is_finite() {
            return Err(Error::config("coupling.delta", "must be finite"));
        }
        let w = &self.sweep;
        if !(w.omega.is_finite() && w.omega > 0.0) {
            return Err(Error::config("sweep.omega", "must be > 0"));
        }
        if !(0.0..=2.0).contains(&w.theta_start_pi) {
            return Err(Error::config("sweep.theta_start_pi", "must lie in [0, 2]"));
        }
        if !(w.theta_end_pi > w.theta_start_pi && w.theta_end_pi <= 2.0) {
            return Err(Error::config("sweep.theta_end_pi", "must lie in (theta_start_pi, 2]"));
        }
        if !(w.dt.is_finite() && w.dt > 0.0) {
            return Err(Error::config("sweep.dt", "must be > 0"));
        }
        if !(w.hold_duration.is_finite() && w.hold_duration > 0.0) {
            return Err(Error::config("sweep.hold_duration", "must be > 0"));
        }
        let d = &self.disorder;
        for (f, v) in [("disorder.xi_onsite", d.xi_onsite), ("disorder.xi_bond", d.xi_bond)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config(f, "must be finite and >= 0"));
            }
        }
        if d.realizations == 0 {
            return Err(Error::config("disorder.realizations", "must be >= 1"));
        }
        let g = &self.grid;
        g.theta_pi.validate("grid.theta_pi")?;
        g.delta.validate("grid.delta")?;
        g.omega.validate("grid.omega")?;
        if g.theta_pi.values().iter().any(|t| !(0.0..=2.0).contains(t)) {
            return Err(Error::config("grid.theta_pi", "angles must lie in [0, 2]"));
        }
        if g.omega.values().iter().any(|o| *o <= 0.0) {
            return Err(Error::config("grid.omega", "rates must be > 0"));
        }
        if g.n_cells.is_empty() || g.n_cells.windows(2).any(|w| w[1] <= w[0]) || g.n_cells[0] == 0 {
            return Err(Error::config(
                "grid.n_cells",
                "must be non-empty, positive and strictly increasing",
            ));
        }
        if g.contacts.is_empty() {
            return Err(Error::config("grid.contacts", "must not be empty"));
        }
        let contacts = if self.experiment == ExperimentKind::MixingAngleSweep {
            &g.contacts[..]
        } else {
            &[]
        };
        for [p, q] in contacts {
            if !(1..=s.n_cells).contains(p) || !(1..=s.n_cells).contains(q) {
                return Err(Error::config(
                    "grid.contacts",
                    format!("({p}, {q}) outside [1, {}]", s.n_cells),
                ));
            }
        }
        if let BranchSelect::Index(k) = self.branch {
            if !(1..=5).contains(&k) {
                return Err(Error::config("branch.index", "must lie in [1, 5]"));
            }
        }
        Ok(())
    }

    pub fn chain_params(&self) -> Result<ChainParams> {
        ChainParams::new(self.system.n_cells, self.system.hopping, self.system.theta_pi * PI)
    }

    pub fn scenario(&self) -> CouplingScenario {
        let c = &self.coupling;
        CouplingScenario::new(c.chain1, c.p, c.chain2, c.q, c.g1, c.g2).with_delta(c.delta)
    }

    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.system.n_cells, self.system.hopping, &self.scenario(), None)
    }

    pub fn schedule(&self) -> Result<SweepSchedule> {
        SweepSchedule::new(
            self.sweep.omega,
            self.sweep.theta_start_pi * PI,
            self.sweep.theta_end_pi * PI,
        )
    }

    pub fn hold(&self) -> Result<Drive> {
        Drive::hold(self.system.theta_pi * PI, self.sweep.hold_duration)
    }

    pub fn stepping(&self) -> Stepping {
        Stepping {
            dt: self.sweep.dt,
            sample_every: (self.sweep.sample_every > 0).then_some(self.sweep.sample_every),
            method: self.sweep.method,
        }
    }

    pub fn disorder_spec(&self) -> crate::disorder::DisorderSpec {
        crate::disorder::DisorderSpec {
            xi_onsite: self.disorder.xi_onsite,
            xi_bond: self.disorder.xi_bond,
            n_realizations: self.disorder.realizations,
            master_seed: self.disorder.seed,
        }
    }
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Applies `a.b.c=value`. The value is read as a TOML value when it parses as
/// one (numbers, booleans, arrays, quoted strings) and as a bare string
/// otherwise.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::config(assignment, "override must look like key=value"))?;
    let path = path.trim();
    let raw = raw.trim();
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(Error::config(path, "empty key in override path"));
    }
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));

    let mut cur = table;
    for key in &keys[..keys.len() - 1] {
        let entry = cur
            .entry(key.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = match entry {
            toml::Value::Table(t) => t,
            _ => return Err(Error::config(path, format!("`{key}` is not a section"))),
        };
    }
    cur.insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}
