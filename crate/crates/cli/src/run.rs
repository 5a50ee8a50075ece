use std::fs;
use std::path::{Path, PathBuf};

use polref::helix::find_flip_peak;
use polref::stack::two_layer_approx;
use polref::treversal::{identity_18_residual, identity_19_residual, max_interior_residual};
use polref::vessel::run_vessel;
use polref::{
    exact_stack_solve, helix_solve, helix_solve_sliced, Complex64, MirrorChannelTable, ScatteringSolution, Side, Spin,
    StackError, VesselReport,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Mode, ScanConfig, TableSource};
use crate::error::{invalid, CliError};
use crate::table::{write_scattering, write_table, ScatteringRow};

/// Command-line settings that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

pub fn run_config(path: &Path, overrides: &Overrides) -> Result<Vec<PathBuf>, CliError> {
    let mut cfg = ScanConfig::load(path)?;
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &overrides.out {
        cfg.output = out.clone();
    }
    run(&cfg)
}

/// Validates `cfg`, runs its scan and returns the files written.
pub fn run(cfg: &ScanConfig) -> Result<Vec<PathBuf>, CliError> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.output)?;
    match cfg.mode {
        Mode::TwoLayer => run_two_layer(cfg),
        Mode::Stack => {
            let stack = cfg.stack()?;
            let rows = scan(&cfg.k_grid(), |k| exact_stack_solve(k, &stack).map_err(|e| numerical(k, e)))?;
            let path = cfg.output.join("stack.csv");
            write_scattering(&path, &rows)?;
            Ok(vec![path])
        }
        Mode::Helix => {
            let mirror = cfg.helix_mirror()?;
            let slices = cfg.helix.and_then(|h| h.n_slices);
            let rows = scan(&cfg.k_grid(), |k| {
                match slices {
                    Some(n) => helix_solve_sliced(k, &mirror, n),
                    None => helix_solve(k, &mirror),
                }
                .map(|s| s.scattering())
                .map_err(|e| numerical(k, e))
            })?;
            let path = cfg.output.join("helix.csv");
            write_scattering(&path, &rows)?;
            Ok(vec![path])
        }
        Mode::Trcheck => run_trcheck(cfg),
        Mode::Vessel => run_vessel_mode(cfg),
    }
}

fn numerical(k: f64, e: impl std::fmt::Display) -> CliError {
    CliError::Numerical { k, message: e.to_string() }
}

/// Solves every k in parallel; rows come back in grid order and the first failing k wins.
fn scan<F>(ks: &[f64], solve: F) -> Result<Vec<ScatteringRow>, CliError>
where
    F: Fn(f64) -> Result<ScatteringSolution, CliError> + Sync,
{
    let results: Vec<_> = ks
        .par_iter()
        .map(|&k| {
            let sol = solve(k)?;
            if !sol.is_finite() {
                return Err(numerical(k, "non-finite amplitudes"));
            }
            Ok(ScatteringRow::from_solution(&sol))
        })
        .collect();
    results.into_iter().collect()
}

pub fn two_layer_file(index: usize) -> String {
    format!("two_layer_phi{index}.csv")
}

fn run_two_layer(cfg: &ScanConfig) -> Result<Vec<PathBuf>, CliError> {
    let ks = cfg.k_grid();
    let mut written = Vec::new();
    for (i, &phi) in cfg.phi.iter().enumerate() {
        let pair = cfg.two_layer_pair(phi)?;
        let [first, second] = [&pair.layers()[0], &pair.layers()[1]];
        let rows = scan(&ks, |k| {
            if cfg.approximate {
                Ok(two_layer_approx(k, first, second))
            } else {
                exact_stack_solve(k, &pair).map_err(|e| numerical(k, e))
            }
        })?;
        let path = cfg.output.join(two_layer_file(i));
        write_scattering(&path, &rows)?;
        written.push(path);
    }
    Ok(written)
}

pub const TRCHECK_HEADER: [&str; 8] = ["case", "k", "u_re", "u_abs", "d", "identity18", "identity19", "interior_max"];

fn run_trcheck(cfg: &ScanConfig) -> Result<Vec<PathBuf>, CliError> {
    // listed layers are scanned over the k-grid; random barriers each get their own k
    let mut cases: Vec<(f64, Complex64, f64)> = Vec::new();
    for layer in &cfg.layers {
        let u = Complex64::new(layer.u_re, -layer.u_abs);
        cases.extend(cfg.k_grid().into_iter().map(|k| (k, u, layer.thickness)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let scale = cfg.k_max * cfg.k_max;
    for _ in 0..cfg.trcheck.random_cases {
        let k = rng.random_range(cfg.k_min..=cfg.k_max);
        let u_re = scale * rng.random_range(-1.0..4.0);
        let u_abs = scale * 10f64.powf(rng.random_range(-8.0..0.5));
        let d = rng.random_range(0.2..5.0) / cfg.k_max;
        cases.push((k, Complex64::new(u_re, -u_abs), d));
    }

    let rows: Vec<[f64; 8]> = cases
        .par_iter()
        .enumerate()
        .map(|(i, &(k, u, d))| {
            [
                i as f64,
                k,
                u.re,
                -u.im,
                d,
                identity_18_residual(k, u, d).norm(),
                identity_19_residual(k, u, d).norm(),
                max_interior_residual(k, u, d),
            ]
        })
        .collect();
    if let Some(bad) = rows.iter().find(|r| r.iter().any(|x| !x.is_finite())) {
        return Err(numerical(bad[1], "non-finite residual"));
    }
    let path = cfg.output.join("trcheck.csv");
    write_table(&path, &TRCHECK_HEADER, &rows)?;
    Ok(vec![path])
}

#[derive(Debug, Serialize)]
struct ChannelRow {
    side: &'static str,
    spin: char,
    transmit_no_flip: f64,
    transmit_flip: f64,
    reflect_no_flip: f64,
    reflect_flip: f64,
    absorb: f64,
}

#[derive(Debug, Serialize)]
struct VesselOutput {
    table_source: TableSource,
    k: Option<f64>,
    table: Vec<ChannelRow>,
    n_particles: usize,
    n_steps: usize,
    seed: u64,
    transitions: [[u64; 4]; 4],
    absorbed: u64,
    state_occupancy: [f64; 4],
    compartment_occupancy: [f64; 2],
    compartment_occupancy_sigma: f64,
    polarization: [f64; 2],
    polarization_sigma: [f64; 2],
    occupancy_drift: f64,
    cycle_current: f64,
    cycle_current_sigma: f64,
    cycle_significance: f64,
}

impl VesselOutput {
    fn new(source: TableSource, k: Option<f64>, table: &MirrorChannelTable, r: VesselReport) -> Self {
        let mut rows = Vec::new();
        for side in Side::BOTH {
            for spin in Spin::BOTH {
                let p = table.row(side, spin);
                rows.push(ChannelRow {
                    side: match side {
                        Side::Left => "left",
                        Side::Right => "right",
                    },
                    spin: spin.symbol(),
                    transmit_no_flip: p.transmit_no_flip,
                    transmit_flip: p.transmit_flip,
                    reflect_no_flip: p.reflect_no_flip,
                    reflect_flip: p.reflect_flip,
                    absorb: p.absorb,
                });
            }
        }
        Self {
            table_source: source,
            k,
            table: rows,
            n_particles: r.n_particles,
            n_steps: r.n_steps,
            seed: r.seed,
            transitions: r.transitions,
            absorbed: r.absorbed,
            state_occupancy: r.state_occupancy,
            compartment_occupancy: r.compartment_occupancy,
            compartment_occupancy_sigma: r.compartment_occupancy_sigma,
            polarization: r.polarization,
            polarization_sigma: r.polarization_sigma,
            occupancy_drift: r.occupancy_drift,
            cycle_current: r.cycle_current,
            cycle_current_sigma: r.cycle_current_sigma,
            cycle_significance: r.cycle_significance(),
        }
    }
}

fn stack_error(k: f64) -> impl Fn(StackError) -> CliError {
    move |e| numerical(k, e)
}

/// Channel table for the vessel and the k it was taken at.
fn vessel_table(cfg: &ScanConfig) -> Result<(MirrorChannelTable, Option<f64>), CliError> {
    let spec = cfg.vessel.expect("validated");
    let table_err = |k: f64| move |e: polref::VesselError| numerical(k, e);
    match spec.table {
        TableSource::SpinBlind => {
            let table = MirrorChannelTable::spin_blind(spec.transmission).map_err(|e| invalid(e.to_string()))?;
            Ok((table, None))
        }
        TableSource::Helix => {
            let mirror = cfg.helix_mirror()?;
            let k = match spec.k {
                Some(k) => k,
                None => {
                    let peak = find_flip_peak(&mirror, &cfg.k_grid()).map_err(|e| numerical(cfg.k_min, e))?;
                    peak.ok_or_else(|| invalid("k-grid has no point above the total-reflection edge"))?.k
                }
            };
            let left = helix_solve(k, &mirror).map_err(|e| numerical(k, e))?.scattering();
            let right = helix_solve(k, &mirror.reversed()).map_err(|e| numerical(k, e))?.scattering();
            Ok((MirrorChannelTable::from_solutions(&left, &right).map_err(table_err(k))?, Some(k)))
        }
        TableSource::TwoLayer => {
            let pair = cfg.two_layer_pair(cfg.phi[0])?;
            let k = match spec.k {
                Some(k) => k,
                None => {
                    // strongest T-odd asymmetry on the grid
                    let rows = scan(&cfg.k_grid(), |k| exact_stack_solve(k, &pair).map_err(stack_error(k)))?;
                    rows.iter()
                        .max_by(|a, b| (a.t.pp() - a.t.mm()).abs().total_cmp(&(b.t.pp() - b.t.mm()).abs()))
                        .expect("k_points ≥ 2")
                        .k
                }
            };
            let left = exact_stack_solve(k, &pair).map_err(stack_error(k))?;
            let right = exact_stack_solve(k, &pair.reversed()).map_err(stack_error(k))?;
            Ok((MirrorChannelTable::from_solutions(&left, &right).map_err(table_err(k))?, Some(k)))
        }
    }
}

fn run_vessel_mode(cfg: &ScanConfig) -> Result<Vec<PathBuf>, CliError> {
    let spec = cfg.vessel.expect("validated");
    let (table, k) = vessel_table(cfg)?;
    let report = run_vessel(&table, spec.n_particles, spec.n_steps, cfg.seed)
        .map_err(|e| CliError::Simulation(e.to_string()))?;
    let out = VesselOutput::new(spec.table, k, &table, report);
    let path = cfg.output.join("vessel_report.json");
    fs::write(&path, serde_json::to_string_pretty(&out)? + "\n")?;
    Ok(vec![path])
}
