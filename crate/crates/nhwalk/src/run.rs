//! Dispatch of a resolved configuration to the model crates.

use std::path::Path;

use nhwalk_core::hatano_nelson::{
    default_complex_eps, lr_product_profile, mobility_edges, sample_disorder, spectrum,
    StateSelector,
};
use nhwalk_core::numerics::mix_seed;
use nhwalk_core::quantum_walk::{
    build_walk_operator, eigenphases, evolve, CoinEnsemble, CoinField, CoinParams, WalkState,
};
use nhwalk_core::transfer_matrix::kappa_curve;
use nhwalk_core::{Complex64, HnParams64, ModelError, SeededRng};
use rayon::prelude::*;

use crate::config::{CoinKind, Experiment, RunConfig};
use crate::error::{RunError, ValidationError};
use crate::output::{Cell, OutputTable};

pub const THREADS_ENV: &str = "NHWALK_THREADS";

/// Worker count from `NHWALK_THREADS`, defaulting to the number of processors.
pub fn thread_count() -> Result<usize, ValidationError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(ValidationError::new(
                THREADS_ENV,
                format!("expected a positive integer, got `{v}`"),
            )),
        },
        Err(std::env::VarError::NotPresent) => Ok(std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)),
        Err(e) => Err(ValidationError::new(THREADS_ENV, e.to_string())),
    }
}

/// Runs `config` on a pool of `threads` workers.
pub fn run_with_threads(config: &RunConfig, threads: usize) -> Result<OutputTable, RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| ValidationError::new(THREADS_ENV, e.to_string()))?;
    pool.install(|| run(config))
}

/// Runs `config` on the current rayon pool and writes the table to `config.out` if set.
pub fn execute(config: &RunConfig) -> Result<OutputTable, RunError> {
    let table = run_with_threads(config, thread_count()?)?;
    if let Some(out) = &config.out {
        table.write_atomic(Path::new(out))?;
    }
    Ok(table)
}

/// Runs `config` on the current rayon pool.
pub fn run(config: &RunConfig) -> Result<OutputTable, RunError> {
    config.validate()?;
    let mut table = OutputTable::new(config);
    match config.experiment {
        Experiment::HnSpectrum => hn_spectrum(config, &mut table)?,
        Experiment::HnProfile => hn_profile(config, &mut table)?,
        Experiment::HnKappaEdges => hn_kappa_edges(config, &mut table)?,
        Experiment::WalkEvolve => walk_evolve(config, &mut table)?,
        Experiment::WalkSpectrum => walk_spectrum(config, &mut table)?,
        Experiment::TmKappa => tm_kappa(config, &mut table)?,
    }
    Ok(table)
}

fn realization_seed(config: &RunConfig, r: usize) -> u64 {
    mix_seed(config.seed, r as u64)
}

/// Evaluates `f` on every (g, realization) pair in parallel and returns results in
/// (g, realization) order. The first failure in that order is reported.
fn sweep<R: Send>(
    config: &RunConfig,
    f: impl Fn(f64, usize) -> Result<R, ModelError> + Sync,
) -> Result<Vec<Vec<R>>, RunError> {
    let gs = config.g_values();
    let reps = config.realizations;
    let tasks: Vec<(usize, usize)> = (0..gs.len())
        .flat_map(|i| (0..reps).map(move |r| (i, r)))
        .collect();
    let results: Vec<Result<R, ModelError>> =
        tasks.par_iter().map(|&(i, r)| f(gs[i], r)).collect();
    let mut grouped: Vec<Vec<R>> = (0..gs.len()).map(|_| Vec::with_capacity(reps)).collect();
    for (&(i, r), res) in tasks.iter().zip(results) {
        let value = res.map_err(|source| RunError::Numerical {
            point: format!("g = {}, realization {r}", gs[i]),
            source,
        })?;
        grouped[i].push(value);
    }
    Ok(grouped)
}

fn hn_params(config: &RunConfig, g: f64, r: usize) -> HnParams64 {
    HnParams64::new(config.sites.expect("resolved"), g)
        .with_disorder(config.disorder.expect("resolved"))
        .with_boundary(config.boundary())
        .with_seed(realization_seed(config, r))
}

fn hn_eigenvalues(config: &RunConfig, g: f64, r: usize) -> Result<Vec<Complex64>, ModelError> {
    let p = hn_params(config, g, r);
    spectrum(&p, &sample_disorder(&p)?)
}

fn push_spectra(table: &mut OutputTable, gs: &[f64], spectra: Vec<Vec<Vec<Complex64>>>) {
    for (&g, per_g) in gs.iter().zip(spectra) {
        let mut index = 0i64;
        for eigs in per_g {
            for z in eigs {
                table.push(vec![Cell::Real(g), Cell::Int(index), Cell::Real(z.re), Cell::Real(z.im)]);
                index += 1;
            }
        }
    }
}

fn hn_spectrum(config: &RunConfig, table: &mut OutputTable) -> Result<(), RunError> {
    let spectra = sweep(config, |g, r| hn_eigenvalues(config, g, r))?;
    push_spectra(table, config.g_values(), spectra);
    Ok(())
}

fn hn_profile(config: &RunConfig, table: &mut OutputTable) -> Result<(), RunError> {
    let selector = config
        .state
        .map(StateSelector::Index)
        .unwrap_or(StateSelector::LowestRealPart);
    let profiles = sweep(config, |g, r| {
        let p = hn_params(config, g, r);
        lr_product_profile(&p, &sample_disorder(&p)?, selector, config.tol)
    })?;
    let reps = config.realizations as f64;
    let mut energies = Vec::new();
    for (&g, per_g) in config.g_values().iter().zip(profiles) {
        let sites = per_g[0].product.len();
        for x in 0..sites {
            let mean = per_g.iter().map(|p| p.product[x]).sum::<f64>() / reps;
            table.push(vec![Cell::Real(g), Cell::Int(x as i64), Cell::Real(mean)]);
        }
        if config.realizations == 1 {
            energies.push(toml::Value::Array(vec![
                toml::Value::Float(per_g[0].energy.re),
                toml::Value::Float(per_g[0].energy.im),
            ]));
        }
    }
    if !energies.is_empty() {
        table
            .metadata
            .notes
            .insert("state_energy".into(), toml::Value::Array(energies));
    }
    Ok(())
}

fn hn_kappa_edges(config: &RunConfig, table: &mut OutputTable) -> Result<(), RunError> {
    let edges = sweep(config, |g, r| {
        let eigs = hn_eigenvalues(config, g, r)?;
        match mobility_edges(&eigs, g, default_complex_eps(&eigs)) {
            Ok(e) => Ok(Some(e)),
            Err(ModelError::NoComplexArc { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    })?;
    let mut skipped = Vec::new();
    for (&g, per_g) in config.g_values().iter().zip(edges) {
        let found: Vec<_> = per_g.into_iter().flatten().collect();
        if found.is_empty() {
            skipped.push(toml::Value::Float(g));
            continue;
        }
        let n = found.len() as f64;
        let lower = found.iter().map(|e| e.lower_edge).sum::<f64>() / n;
        let upper = found.iter().map(|e| e.upper_edge).sum::<f64>() / n;
        table.push(vec![Cell::Real(g), Cell::Real(lower), Cell::Real(upper)]);
    }
    if !skipped.is_empty() {
        table
            .metadata
            .notes
            .insert("no_complex_arc".into(), toml::Value::Array(skipped));
    }
    Ok(())
}

pub fn coin_ensemble(config: &RunConfig) -> CoinEnsemble<f64> {
    match config.coin.expect("resolved") {
        CoinKind::Haar => CoinEnsemble::Haar,
        CoinKind::Simple => CoinEnsemble::Uniform(CoinParams::simple()),
        CoinKind::Fixed => CoinEnsemble::FixedMixing {
            theta_mix: config.coin_theta.expect("validated"),
        },
    }
}

fn coin_field(config: &RunConfig, r: usize) -> CoinField<f64> {
    let mut rng = SeededRng::new(realization_seed(config, r));
    CoinField::sample(config.sites.expect("resolved"), &coin_ensemble(config), &mut rng)
}

fn walk_evolve(config: &RunConfig, table: &mut OutputTable) -> Result<(), RunError> {
    let sites = config.sites.expect("resolved");
    let steps = config.steps.expect("resolved");
    let origin = sites / 2;
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    let init = WalkState::localized(
        sites,
        origin,
        Complex64::new(amp, 0.0),
        Complex64::new(0.0, amp),
        config.boundary(),
    );
    let runs = sweep(config, |g, r| evolve(&init, &coin_field(config, r), g, steps))?;
    let per_g = runs.into_iter().next().expect("single g");
    let reps = config.realizations as f64;
    for t in 0..=steps {
        for x in 0..sites {
            let p = per_g.iter().map(|run| run[t][x]).sum::<f64>() / reps;
            table.push(vec![
                Cell::Int(t as i64),
                Cell::Int(x as i64 - origin as i64),
                Cell::Real(p),
            ]);
        }
    }
    Ok(())
}

fn walk_spectrum(config: &RunConfig, table: &mut OutputTable) -> Result<(), RunError> {
    let spectra = sweep(config, |g, r| {
        let u = build_walk_operator(&coin_field(config, r), g, config.boundary());
        Ok(eigenphases(&u, g)?.thetas)
    })?;
    push_spectra(table, config.g_values(), spectra);
    Ok(())
}

fn tm_kappa(config: &RunConfig, table: &mut OutputTable) -> Result<(), RunError> {
    let grid = config.theta_grid.as_deref().expect("resolved");
    let steps = config.products.expect("resolved");
    let ensemble = coin_ensemble(config);
    let mut curves = Vec::with_capacity(config.realizations);
    for r in 0..config.realizations {
        let curve = kappa_curve(&ensemble, grid, steps, realization_seed(config, r)).map_err(
            |source| RunError::Numerical {
                point: format!("theta grid, realization {r}"),
                source,
            },
        )?;
        curves.push(curve);
    }
    let reps = config.realizations as f64;
    let mut flagged = Vec::new();
    for (i, &theta) in grid.iter().enumerate() {
        let kappa = curves.iter().map(|c| c[i].kappa).sum::<f64>() / reps;
        let stderr = curves.iter().map(|c| c[i].stderr.powi(2)).sum::<f64>().sqrt() / reps;
        if curves.iter().any(|c| c[i].flagged) {
            flagged.push(toml::Value::Float(theta));
        }
        table.push(vec![Cell::Real(theta), Cell::Real(kappa), Cell::Real(stderr)]);
    }
    if !flagged.is_empty() {
        table
            .metadata
            .notes
            .insert("nonpositive_kappa".into(), toml::Value::Array(flagged));
    }
    Ok(())
}
