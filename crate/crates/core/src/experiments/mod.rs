//! Named experiments that turn a configuration into result tables and files.

pub mod config;
pub mod svg;
pub mod table;

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use serde_json::json;

pub use config::{BranchSelect, ExperimentConfig, Format, Grid};
pub use table::{Column, Metadata, PlotSpec, ResultTable, Role, SCHEMA_VERSION};

use crate::disorder::{ensemble_fidelity, sample_realization};
use crate::dynamics::{atom_excited, fidelity, propagate, receiving_target, Drive, StateVector, Trajectory};
use crate::effective::{five_state_model, hybridization_energy};
use crate::error::{Error, Result};
use crate::model::{DisorderRealization, Lattice, Phase};
use crate::spectral::{follow_zero_mode, EigenSystem};

macro_rules! experiments {
    ($($variant:ident => $name:literal, $figure:literal, $about:literal;)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
        #[serde(rename_all = "kebab-case")]
        pub enum ExperimentKind {
            $($variant,)*
        }

        impl ExperimentKind {
            pub const ALL: &'static [ExperimentKind] = &[$(ExperimentKind::$variant,)*];

            pub fn name(self) -> &'static str {
                match self { $(ExperimentKind::$variant => $name,)* }
            }

            /// Figure the experiment reproduces.
            pub fn figure(self) -> &'static str {
                match self { $(ExperimentKind::$variant => $figure,)* }
            }

            pub fn description(self) -> &'static str {
                match self { $(ExperimentKind::$variant => $about,)* }
            }
        }
    };
}

experiments! {
    SpectrumVsDelta => "spectrum-vs-delta", "Fig. 2(c)", "five in-gap levels of the full Hamiltonian versus detuning";
    HybridModeMap => "hybrid-mode-map", "Fig. 2(d)", "site probabilities of one tracked in-gap level versus detuning";
    HoldEvolve => "hold-evolve", "Fig. 2(a-b)", "populations at a fixed angle, atom initially excited";
    MixingAngleSweep => "mixing-angle-sweep", "Fig. 3(a-b)", "dark-state mixing angles versus sweep angle for several contact cells";
    DarkStatePopulations => "dark-state-populations", "Fig. 3(c-d)", "dark-state weights on the atom and the far edges versus sweep angle";
    GapMap => "gap-map", "Fig. 4", "edge hybridization |G| and mixing angle over chain length and sweep angle";
    ZeroStateMap => "zero-state-map", "Figs. 5, A1", "site probabilities of the exact zero-energy state versus sweep angle";
    AdiabaticEvolve => "adiabatic-evolve", "Fig. 6", "populations during the sweep, atom initially excited";
    FidelityVsDelta => "fidelity-vs-delta", "Fig. 7(c)", "transfer fidelity versus detuning";
    FidelityVsOmega => "fidelity-vs-omega", "Fig. 7(d)", "transfer fidelity versus sweep rate";
    DisorderMap => "disorder-map", "Fig. 7(a-b)", "zero-state map under sampled static disorder";
    DisorderFidelity => "disorder-fidelity", "Fig. 7(a-b)", "transfer fidelity over a disorder ensemble";
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
                Error::config(
                    "experiment",
                    format!("unknown experiment `{s}` (known: {})", names.join(", ")),
                )
            })
    }
}

fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

struct Context<'a> {
    config: &'a ExperimentConfig,
    config_json: serde_json::Value,
    timestamp: u64,
}

impl<'a> Context<'a> {
    fn new(config: &'a ExperimentConfig) -> Self {
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Context {
            config,
            config_json: serde_json::to_value(config).expect("config serializes"),
            timestamp,
        }
    }

    fn table(&self, name: &str, columns: Vec<Column>, seeds: Vec<u64>) -> ResultTable {
        ResultTable::new(
            columns,
            Metadata {
                experiment: self.config.experiment.name().to_string(),
                table: name.to_string(),
                schema_version: SCHEMA_VERSION,
                code_version: env!("CARGO_PKG_VERSION").to_string(),
                config: self.config_json.clone(),
                seeds,
                timestamp: self.timestamp,
                summary: Default::default(),
            },
        )
    }
}

fn site_columns(n_cells: usize) -> Vec<String> {
    crate::model::BasisIndex::new(n_cells)
        .labels()
        .into_iter()
        .map(|l| format!("p_{l}"))
        .collect()
}

fn theta_grid(config: &ExperimentConfig) -> Vec<f64> {
    config.grid.theta_pi.values()
}

fn summary(table: &mut ResultTable, key: &str, value: serde_json::Value) {
    table.metadata.summary.insert(key.to_string(), value);
}

/// Runs one experiment, handing every finished table to `sink` as soon as it
/// is complete.
pub fn run_experiment(config: &ExperimentConfig, sink: &mut dyn FnMut(ResultTable) -> Result<()>) -> Result<()> {
    config.validate()?;
    let ctx = Context::new(config);
    match config.experiment {
        ExperimentKind::SpectrumVsDelta => sink(spectrum_vs_delta(&ctx)?),
        ExperimentKind::HybridModeMap => sink(hybrid_mode_map(&ctx)?),
        ExperimentKind::HoldEvolve => sink(evolve(&ctx, config.hold()?)?),
        ExperimentKind::MixingAngleSweep => sink(mixing_angle_sweep(&ctx)?),
        ExperimentKind::DarkStatePopulations => sink(dark_state_populations(&ctx)?),
        ExperimentKind::GapMap => sink(gap_map(&ctx)?),
        ExperimentKind::ZeroStateMap => sink(zero_state_map(&ctx)?),
        ExperimentKind::AdiabaticEvolve => sink(evolve(&ctx, Drive::Sweep(config.schedule()?))?),
        ExperimentKind::FidelityVsDelta => sink(fidelity_vs_delta(&ctx)?),
        ExperimentKind::FidelityVsOmega => sink(fidelity_vs_omega(&ctx)?),
        ExperimentKind::DisorderMap => disorder_map(&ctx, sink),
        ExperimentKind::DisorderFidelity => sink(disorder_fidelity(&ctx)?),
    }
}

/// Runs an experiment and returns its tables.
pub fn run_collect(config: &ExperimentConfig) -> Result<Vec<ResultTable>> {
    let mut out = Vec::new();
    run_experiment(config, &mut |t| {
        out.push(t);
        Ok(())
    })?;
    Ok(out)
}

/// Writes a table in the requested formats and returns the paths written.
pub fn write_table(table: &ResultTable, dir: &Path, formats: &[Format]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut put = |path: PathBuf, text: String| -> Result<()> {
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        written.push(path);
        Ok(())
    };
    for f in formats {
        match f {
            Format::Csv => put(table.csv_path(dir), table.to_csv())?,
            Format::Json => put(table.sidecar_path(dir), table.sidecar_json())?,
            Format::Svg => {
                if let Some(svg) = svg::render(table) {
                    put(table.svg_path(dir), svg)?;
                }
            }
        }
    }
    Ok(written)
}

fn spectrum_vs_delta(ctx: &Context) -> Result<ResultTable> {
    let c = ctx.config;
    let n = c.system.n_cells;
    let theta = c.system.theta_pi * PI;
    let mut columns = vec![Column::coord("delta", "J")];
    columns.extend((1..=5).map(|k| Column::value(format!("e{k}"), "J")));
    let mut table = ctx
        .table(c.experiment.name(), columns, vec![])
        .with_plot(PlotSpec::Lines {
            x: "delta".into(),
            ys: (1..=5).map(|k| format!("e{k}")).collect(),
            groups: vec![],
        });

    let window = 0.1 * c.system.hopping;
    let deltas = c.grid.delta.values();
    let rows = par_map(&deltas, |&delta| -> Result<(Vec<f64>, Vec<usize>)> {
        let lattice = Lattice::new(n, c.system.hopping, &c.scenario().with_delta(delta), None)?;
        let eig = EigenSystem::of_symmetric(lattice.hamiltonian(theta).matrix())?;
        let mut row = vec![delta];
        row.extend(eig.smallest_magnitude(5).into_iter().map(|k| eig.values[k]));
        let inside: Vec<usize> = (0..eig.dim()).filter(|&k| eig.values[k].abs() <= window).collect();
        Ok((row, inside))
    });
    // sorted-level positions that enter the window anywhere on the grid
    let mut branches = std::collections::BTreeSet::new();
    let mut min_spacing = f64::INFINITY;
    for r in rows {
        let (row, inside) = r?;
        min_spacing = row[1..].windows(2).map(|w| w[1] - w[0]).fold(min_spacing, f64::min);
        branches.extend(inside);
        table.push(row)?;
    }
    table.sort_rows();
    summary(&mut table, "branches_within_0.1J", json!(branches.len()));
    summary(&mut table, "min_adjacent_spacing", json!(min_spacing));
    Ok(table)
}

/// Index among the five in-gap levels (ascending energy) chosen at the first
/// grid point.
fn initial_branch(eig: &EigenSystem, central: &[usize], atom: usize, select: &BranchSelect) -> usize {
    match select {
        BranchSelect::Atom => *central
            .iter()
            .max_by(|&&a, &&b| eig.vectors[(atom, a)].abs().total_cmp(&eig.vectors[(atom, b)].abs()))
            .expect("five levels"),
        BranchSelect::Index(k) => central[k - 1],
    }
}

fn hybrid_mode_map(ctx: &Context) -> Result<ResultTable> {
    let c = ctx.config;
    let n = c.system.n_cells;
    let theta = c.system.theta_pi * PI;
    let sites = site_columns(n);
    let mut columns = vec![Column::coord("delta", "J"), Column::value("energy", "J")];
    columns.extend(sites.iter().map(|s| Column::value(s.clone(), "1")));
    let mut table = ctx
        .table(c.experiment.name(), columns, vec![])
        .with_plot(PlotSpec::Heatmap {
            x: "delta".into(),
            ys: sites.clone(),
        });

    let deltas = c.grid.delta.values();
    let eigs = par_map(&deltas, |&delta| -> Result<EigenSystem> {
        let lattice = Lattice::new(n, c.system.hopping, &c.scenario().with_delta(delta), None)?;
        EigenSystem::of_symmetric(lattice.hamiltonian(theta).matrix())
    });
    let atom = 4 * n;
    let mut previous: Option<DVector<f64>> = None;
    for (delta, eig) in deltas.iter().zip(eigs) {
        let eig = eig?;
        let mut central = eig.smallest_magnitude(5);
        central.sort_unstable();
        let k = match &previous {
            None => initial_branch(&eig, &central, atom, &c.branch),
            Some(prev) => *central
                .iter()
                .max_by(|&&a, &&b| {
                    let oa = eig.vectors.column(a).dot(prev).abs();
                    let ob = eig.vectors.column(b).dot(prev).abs();
                    oa.total_cmp(&ob)
                })
                .expect("five levels"),
        };
        let mut v = eig.vector(k);
        if let Some(prev) = &previous {
            if v.dot(prev) < 0.0 {
                v.neg_mut();
            }
        }
        let mut row = vec![*delta, eig.values[k]];
        row.extend(v.iter().map(|a| a * a));
        table.push(row)?;
        previous = Some(v);
    }
    summary(
        &mut table,
        "branch",
        serde_json::to_value(&c.branch).expect("serializes"),
    );
    Ok(table)
}

fn mixing_angle_sweep(ctx: &Context) -> Result<ResultTable> {
    let c = ctx.config;
    let columns = vec![
        Column::coord("p", "1"),
        Column::coord("q", "1"),
        Column::coord("theta_over_pi", "pi"),
        Column::value("chi", "rad"),
        Column::value("phi", "rad"),
    ];
    let mut table = ctx
        .table(c.experiment.name(), columns, vec![])
        .with_plot(PlotSpec::Lines {
            x: "theta_over_pi".into(),
            ys: vec!["chi".into()],
            groups: vec!["p".into(), "q".into()],
        });
    let params = c.chain_params()?;
    for &[p, q] in &c.grid.contacts {
        let mut scenario = c.scenario();
        scenario.cell_p = p;
        scenario.cell_q = q;
        for t in theta_grid(c) {
            let at = params.with_theta(t * PI)?;
            if at.phase() != Phase::Topological {
                continue;
            }
            match five_state_model(&at, &scenario)?.mixing_angles() {
                Ok(m) => table.push(vec![p as f64, q as f64, t, m.chi, m.phi])?,
                Err(Error::Domain(_)) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    table.sort_rows();
    Ok(table)
}

fn dark_state_populations(ctx: &Context) -> Result<ResultTable> {
    let c = ctx.config;
    let columns = vec![
        Column::coord("theta_over_pi", "pi"),
        Column::value("atom", "1"),
        Column::value("far_edge_1", "1"),
        Column::value("far_edge_2", "1"),
    ];
    let mut table = ctx
        .table(c.experiment.name(), columns, vec![])
        .with_plot(PlotSpec::Lines {
            x: "theta_over_pi".into(),
            ys: vec!["atom".into(), "far_edge_1".into(), "far_edge_2".into()],
            groups: vec![],
        });
    let params = c.chain_params()?;
    let scenario = c.scenario();
    for t in theta_grid(c) {
        let at = params.with_theta(t * PI)?;
        if at.phase() != Phase::Topological {
            continue;
        }
        match five_state_model(&at, &scenario)?.dark_state() {
            Ok(d) => {
                let pops = d.populations();
                table.push(vec![t, pops[0], pops[1], pops[2]])?;
            }
            Err(Error::Domain(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(table)
}

fn gap_map(ctx: &Context) -> Result<ResultTable> {
    let c = ctx.config;
    let columns = vec![
        Column::coord("n_cells", "1"),
        Column::coord("theta_over_pi", "pi"),
        Column::value("abs_g", "J"),
        Column::value("chi", "rad"),
    ];
    let mut table = ctx
        .table(c.experiment.name(), columns, vec![])
        .with_plot(PlotSpec::Grid {
            x: "theta_over_pi".into(),
            y: "n_cells".into(),
            value: "abs_g".into(),
        });
    let thetas = theta_grid(c);
    let per_n = par_map(&c.grid.n_cells, |&n| -> Result<Vec<Vec<f64>>> {
        let params = crate::model::ChainParams::new(n, c.system.hopping, 0.0)?;
        let mut scenario = c.scenario();
        scenario.cell_p = scenario.cell_p.min(n);
        scenario.cell_q = scenario.cell_q.min(n);
        let mut rows = Vec::new();
        for &t in &thetas {
            let at = params.with_theta(t * PI)?;
            if at.phase() != Phase::Topological {
                continue;
            }
            let g = hybridization_energy(&at)?;
            match five_state_model(&at, &scenario)?.mixing_angles() {
                Ok(m) => rows.push(vec![n as f64, t, g.abs(), m.chi]),
                Err(Error::Domain(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        Ok(rows)
    });
    for rows in per_n {
        for row in rows? {
            table.push(row)?;
        }
    }
    table.sort_rows();
    Ok(table)
}

/// Exact zero-energy state followed along the θ grid. Rows:
/// `[θ/π, E, |ψ_i|²...]`.
fn zero_state_rows(ctx: &Context, disorder: Option<&DisorderRealization>) -> Result<Vec<Vec<f64>>> {
    let c = ctx.config;
    let n = c.system.n_cells;
    let lattice = Lattice::new(n, c.system.hopping, &c.scenario(), disorder)?;
    let thetas = theta_grid(c);
    let eigs = par_map(&thetas, |&t| {
        EigenSystem::of_symmetric(lattice.hamiltonian(t * PI).matrix())
    });
    let mut previous: Option<DVector<f64>> = None;
    let mut rows = Vec::with_capacity(thetas.len());
    for (t, eig) in thetas.iter().zip(eigs) {
        let (energy, v) = follow_zero_mode(&eig?, previous.as_ref(), 4 * n);
        let mut row = vec![*t, energy];
        row.extend(v.iter().map(|a| a * a));
        rows.push(row);
        previous = Some(v);
    }
    Ok(rows)
}

fn zero_state_columns(n: usize, leading: Vec<Column>) -> (Vec<Column>, Vec<String>) {
    let sites = site_columns(n);
    let mut columns = leading;
    columns.push(Column::coord("theta_over_pi", "pi"));
    columns.push(Column::value("energy", "J"));
    columns.extend(sites.iter().map(|s| Column::value(s.clone(), "1")));
    (columns, sites)
}

fn zero_state_map(ctx: &Context) -> Result<ResultTable> {
    let c = ctx.config;
    let (columns, sites) = zero_state_columns(c.system.n_cells, vec![]);
    let mut table = ctx
        .table(c.experiment.name(), columns, vec![])
        .with_plot(PlotSpec::Heatmap {
            x: "theta_over_pi".into(),
            ys: sites,
        });
    for row in zero_state_rows(ctx, None)? {
        table.push(row)?;
    }
    Ok(table)
}

fn disorder_map(ctx: &Context, sink: &mut dyn FnMut(ResultTable) -> Result<()>) -> Result<()> {
    let c = ctx.config;
    let n = c.system.n_cells;
    let spec = c.disorder_spec();
    let seeds = vec![spec.master_seed];
    let (columns, sites) = zero_state_columns(n, vec![Column::coord("realization", "1")]);
    let mut table = ctx.table(c.experiment.name(), columns, seeds.clone());
    if spec.n_realizations == 1 {
        table = table.with_plot(PlotSpec::Heatmap {
            x: "theta_over_pi".into(),
            ys: sites.clone(),
        });
    }
    let indices: Vec<usize> = (0..spec.n_realizations).collect();
    let per_realization = par_map(&indices, |&i| -> Result<Vec<Vec<f64>>> {
        let r = sample_realization(&spec, i, n)?;
        zero_state_rows(ctx, Some(&r))
    });
    let mut sum: Vec<Vec<f64>> = Vec::new();
    for (i, rows) in per_realization.into_iter().enumerate() {
        let rows = rows?;
        if sum.is_empty() {
            sum = vec![vec![0.0; rows[0].len()]; rows.len()];
        }
        for (acc, row) in sum.iter_mut().zip(&rows) {
            for (a, v) in acc.iter_mut().zip(row) {
                *a += v;
            }
        }
        for row in rows {
            let mut full = vec![i as f64];
            full.extend(row);
            table.push(full)?;
        }
    }
    sink(table)?;

    let (columns, sites) = zero_state_columns(n, vec![]);
    let mut mean = ctx
        .table(&format!("{}-mean", c.experiment.name()), columns, seeds)
        .with_plot(PlotSpec::Heatmap {
            x: "theta_over_pi".into(),
            ys: sites,
        });
    let count = spec.n_realizations as f64;
    for row in sum {
        mean.push(row.into_iter().map(|v| v / count).collect())?;
    }
    summary(&mut mean, "realizations", json!(spec.n_realizations));
    sink(mean)
}

fn trajectory_table(ctx: &Context, traj: &Trajectory, lattice: &Lattice) -> Result<ResultTable> {
    let c = ctx.config;
    let n = lattice.n_cells();
    let sites = site_columns(n);
    let mut columns = vec![Column::coord("time", "1/J"), Column::value("theta_over_pi", "pi")];
    columns.extend(sites.iter().map(|s| Column::value(s.clone(), "1")));
    let basis = lattice.basis();
    let (r1, r2) = c.scenario().receiving_sites(n);
    let shown = vec!["p_atom".to_string(), format!("p_{}", r1), format!("p_{}", r2)];
    let mut table = ctx
        .table(c.experiment.name(), columns, vec![])
        .with_plot(PlotSpec::Lines {
            x: "time".into(),
            ys: shown,
            groups: vec![],
        });
    for ((t, th), pops) in traj.times.iter().zip(&traj.thetas).zip(&traj.populations) {
        let mut row = vec![*t, th / PI];
        row.extend(pops.iter().copied());
        table.push(row)?;
    }
    let fin = traj.final_populations();
    let target = receiving_target(&c.scenario(), n);
    summary(&mut table, "final_atom", json!(fin[basis.atom()]));
    summary(
        &mut table,
        &format!("final_{r1}"),
        json!(fin[basis.index(r1).expect("site")]),
    );
    summary(
        &mut table,
        &format!("final_{r2}"),
        json!(fin[basis.index(r2).expect("site")]),
    );
    summary(&mut table, "fidelity", json!(fidelity(traj.final_state(), &target)?));
    summary(&mut table, "max_norm_drift", json!(traj.max_norm_drift()));
    Ok(table)
}

fn evolve(ctx: &Context, drive: Drive) -> Result<ResultTable> {
    let c = ctx.config;
    let lattice = c.lattice()?;
    let traj = propagate(&lattice, &drive, &atom_excited(lattice.n_cells()), &c.stepping())?;
    let mut table = trajectory_table(ctx, &traj, &lattice)?;
    if let Drive::Hold { .. } = drive {
        let atom = traj.series(lattice.basis().atom());
        summary(
            &mut table,
            "min_atom",
            json!(atom.iter().copied().fold(f64::INFINITY, f64::min)),
        );
    }
    Ok(table)
}

/// Final fidelity and weight on the receiving sites after one sweep.
fn transfer(lattice: &Lattice, drive: &Drive, ctx: &Context) -> Result<Vec<f64>> {
    let n = lattice.n_cells();
    let target = receiving_target(lattice.scenario(), n);
    let stepping = ctx.config.stepping();
    let traj = propagate(lattice, drive, &atom_excited(n), &stepping)?;
    let psi: &StateVector = traj.final_state();
    let weight = target
        .iter()
        .zip(psi.iter())
        .filter(|(t, _)| t.norm() > 0.0)
        .map(|(_, p)| p.norm_sqr())
        .sum();
    Ok(vec![fidelity(psi, &target)?, weight])
}

fn fidelity_table(ctx: &Context, coord: Column, values: Vec<f64>, rows: Vec<Result<Vec<f64>>>) -> Result<ResultTable> {
    let c = ctx.config;
    let name = coord.name.clone();
    let columns = vec![
        coord,
        Column::value("fidelity", "1"),
        Column::value("target_weight", "1"),
    ];
    let mut table = ctx
        .table(c.experiment.name(), columns, vec![])
        .with_plot(PlotSpec::Lines {
            x: name,
            ys: vec!["fidelity".into()],
            groups: vec![],
        });
    for (x, r) in values.into_iter().zip(rows) {
        let mut row = vec![x];
        row.extend(r?);
        table.push(row)?;
    }
    table.sort_rows();
    Ok(table)
}

fn fidelity_vs_delta(ctx: &Context) -> Result<ResultTable> {
    let c = ctx.config;
    let drive = Drive::Sweep(c.schedule()?);
    let deltas = c.grid.delta.values();
    let rows = par_map(&deltas, |&delta| {
        let lattice = Lattice::new(
            c.system.n_cells,
            c.system.hopping,
            &c.scenario().with_delta(delta),
            None,
        )?;
        transfer(&lattice, &drive, ctx)
    });
    fidelity_table(ctx, Column::coord("delta", "J"), deltas, rows)
}

fn fidelity_vs_omega(ctx: &Context) -> Result<ResultTable> {
    let c = ctx.config;
    let lattice = c.lattice()?;
    let omegas = c.grid.omega.values();
    let rows = par_map(&omegas, |&omega| {
        let drive = Drive::Sweep(crate::dynamics::SweepSchedule::new(
            omega,
            c.sweep.theta_start_pi * PI,
            c.sweep.theta_end_pi * PI,
        )?);
        transfer(&lattice, &drive, ctx)
    });
    fidelity_table(ctx, Column::coord("omega", "J"), omegas, rows)
}

fn disorder_fidelity(ctx: &Context) -> Result<ResultTable> {
    let c = ctx.config;
    let spec = c.disorder_spec();
    let lattice = c.lattice()?;
    let n = lattice.n_cells();
    let drive = Drive::Sweep(c.schedule()?);
    let target = receiving_target(lattice.scenario(), n);
    let stats = ensemble_fidelity(&lattice, &drive, &atom_excited(n), &target, &c.stepping(), &spec)?;
    let columns = vec![
        Column::coord("realization", "1"),
        Column::value("fidelity", "1"),
        Column::value("target_weight", "1"),
    ];
    let mut table = ctx
        .table(c.experiment.name(), columns, vec![spec.master_seed])
        .with_plot(PlotSpec::Lines {
            x: "realization".into(),
            ys: vec!["fidelity".into()],
            groups: vec![],
        });
    let f = stats.quantity("fidelity").expect("fidelity");
    let w = stats.quantity("target_weight").expect("target_weight");
    for (k, &i) in stats.indices.iter().enumerate() {
        table.push(vec![i as f64, f.values[k], w.values[k]])?;
    }
    summary(&mut table, "fidelity_mean", json!(f.mean));
    summary(&mut table, "fidelity_std", json!(f.std));
    summary(&mut table, "target_weight_mean", json!(w.mean));
    summary(
        &mut table,
        "failures",
        serde_json::to_value(&stats.failures).expect("serializes"),
    );
    if !stats.failures.is_empty() {
        return Err(Error::Numeric(format!(
            "{} of {} realizations failed: {}",
            stats.failures.len(),
            spec.n_realizations,
            stats.failures[0].message
        )));
    }
    Ok(table)
}
