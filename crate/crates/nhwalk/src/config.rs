//! Run configuration: TOML file, command-line overrides, defaults and validation.

use std::fmt;
use std::str::FromStr;

use nhwalk_core::transfer_matrix::default_theta_grid;
use nhwalk_core::Boundary;
use serde::{Deserialize, Serialize};

use crate::error::ValidationError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Experiment {
    HnSpectrum,
    HnProfile,
    HnKappaEdges,
    WalkEvolve,
    WalkSpectrum,
    TmKappa,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::HnSpectrum,
        Experiment::HnProfile,
        Experiment::HnKappaEdges,
        Experiment::WalkEvolve,
        Experiment::WalkSpectrum,
        Experiment::TmKappa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::HnSpectrum => "hn_spectrum",
            Experiment::HnProfile => "hn_profile",
            Experiment::HnKappaEdges => "hn_kappa_edges",
            Experiment::WalkEvolve => "walk_evolve",
            Experiment::WalkSpectrum => "walk_spectrum",
            Experiment::TmKappa => "tm_kappa",
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Experiment::HnSpectrum => &["g", "index", "re_E", "im_E"],
            Experiment::HnProfile => &["g", "x", "product"],
            Experiment::HnKappaEdges => &["g", "lower_edge", "upper_edge"],
            Experiment::WalkEvolve => &["t", "x", "P"],
            Experiment::WalkSpectrum => &["g", "index", "re_theta", "im_theta"],
            Experiment::TmKappa => &["theta", "kappa", "stderr"],
        }
    }

    fn is_hn(self) -> bool {
        matches!(
            self,
            Experiment::HnSpectrum | Experiment::HnProfile | Experiment::HnKappaEdges
        )
    }

    fn is_walk(self) -> bool {
        matches!(
            self,
            Experiment::WalkEvolve | Experiment::WalkSpectrum | Experiment::TmKappa
        )
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = ValidationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| ValidationError::new("experiment", format!("unknown experiment `{s}`")))
    }
}

/// Per-site coin distribution for the walk experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoinKind {
    Haar,
    /// `(1/√2) [[1, 1], [-1, 1]]` on every site.
    Simple,
    /// Mixing angle `coin_theta` with uniformly random phases.
    Fixed,
}

/// Partially specified configuration, as read from a file or the command line.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigInput {
    pub experiment: Option<Experiment>,
    #[serde(rename = "L")]
    pub sites: Option<usize>,
    pub g: Option<f64>,
    pub g_list: Option<Vec<f64>>,
    #[serde(rename = "W")]
    pub disorder: Option<f64>,
    pub boundary: Option<String>,
    #[serde(rename = "T")]
    pub steps: Option<usize>,
    #[serde(rename = "N")]
    pub products: Option<usize>,
    pub theta_grid: Option<Vec<f64>>,
    pub theta_points: Option<usize>,
    pub coin: Option<CoinKind>,
    pub coin_theta: Option<f64>,
    pub state: Option<usize>,
    pub seed: Option<u64>,
    pub realizations: Option<usize>,
    pub tol: Option<f64>,
    pub out: Option<String>,
}

impl ConfigInput {
    pub fn from_toml(text: &str) -> Result<Self, ValidationError> {
        toml::from_str(text).map_err(|e| {
            let field = e
                .message()
                .split('`')
                .nth(1)
                .filter(|f| !f.is_empty())
                .unwrap_or("config")
                .to_string();
            ValidationError::new(field, e.message().trim().to_string())
        })
    }

    /// Values set in `over` replace those in `self`.
    pub fn overlay(mut self, over: ConfigInput) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(
            experiment, sites, disorder, boundary, steps, products, theta_grid, theta_points,
            coin, coin_theta, state, seed, realizations, tol, out
        );
        // a scalar g on one layer and a list on the other: the overriding layer wins outright
        if over.g.is_some() || over.g_list.is_some() {
            self.g = over.g;
            self.g_list = over.g_list;
        }
        self
    }

    pub fn resolve(self) -> Result<RunConfig, ValidationError> {
        RunConfig::resolve(self)
    }
}

/// Fully resolved configuration; unused fields for the chosen experiment are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub sites: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_list: Option<Vec<f64>>,
    #[serde(rename = "W", skip_serializing_if = "Option::is_none")]
    pub disorder: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary: Option<String>,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub products: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coin: Option<CoinKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coin_theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<usize>,
    pub seed: u64,
    pub realizations: usize,
    pub tol: f64,
    /// Not echoed: where the table goes is not part of the experiment.
    #[serde(skip)]
    pub out: Option<String>,
}

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_THETA_POINTS: usize = 129;

fn tenths(from: u32, to: u32) -> Vec<f64> {
    (from..=to).map(|k| k as f64 / 10.0).collect()
}

fn unused(field: &'static str, e: Experiment) -> ValidationError {
    ValidationError::new(field, format!("not used by {e}"))
}

impl RunConfig {
    fn resolve(input: ConfigInput) -> Result<Self, ValidationError> {
        let e = input
            .experiment
            .ok_or_else(|| ValidationError::new("experiment", "missing"))?;

        let uses_sites = e != Experiment::TmKappa;
        let uses_g = e != Experiment::TmKappa;
        let uses_disorder = e.is_hn();
        let uses_boundary = e != Experiment::TmKappa;
        let uses_steps = e == Experiment::WalkEvolve;
        let uses_products = e == Experiment::TmKappa;
        let uses_theta = e == Experiment::TmKappa;
        let uses_coin = e.is_walk();
        let uses_state = e == Experiment::HnProfile;

        let check = |used: bool, present: bool, field: &'static str| {
            if !used && present {
                Err(unused(field, e))
            } else {
                Ok(())
            }
        };
        check(uses_sites, input.sites.is_some(), "L")?;
        check(uses_g, input.g.is_some() || input.g_list.is_some(), "g")?;
        check(uses_disorder, input.disorder.is_some(), "W")?;
        check(uses_boundary, input.boundary.is_some(), "boundary")?;
        check(uses_steps, input.steps.is_some(), "T")?;
        check(uses_products, input.products.is_some(), "N")?;
        check(uses_theta, input.theta_grid.is_some(), "theta_grid")?;
        check(uses_theta, input.theta_points.is_some(), "theta_points")?;
        check(uses_coin, input.coin.is_some(), "coin")?;
        check(uses_coin, input.coin_theta.is_some(), "coin_theta")?;
        check(uses_state, input.state.is_some(), "state")?;

        if input.g.is_some() && input.g_list.is_some() {
            return Err(ValidationError::new("g_list", "give either g or g_list, not both"));
        }

        let steps = uses_steps.then(|| input.steps.unwrap_or(100));
        let sites = uses_sites.then(|| {
            input.sites.unwrap_or(match e {
                Experiment::WalkEvolve => 2 * steps.unwrap_or(100) + 2,
                Experiment::WalkSpectrum => 500,
                _ => 1000,
            })
        });
        let g_list = uses_g.then(|| match (input.g, input.g_list) {
            (Some(g), _) => vec![g],
            (None, Some(list)) => list,
            (None, None) => match e {
                Experiment::HnSpectrum => tenths(0, 11),
                Experiment::HnProfile => vec![0.0, 0.9, 1.0],
                Experiment::HnKappaEdges => tenths(1, 11),
                Experiment::WalkEvolve => vec![0.0],
                _ => vec![0.40, 0.45, 0.50, 0.55, 0.60],
            },
        });
        let theta_grid = if uses_theta {
            match (input.theta_grid, input.theta_points) {
                (Some(_), Some(_)) => {
                    return Err(ValidationError::new(
                        "theta_grid",
                        "give either theta_grid or theta_points, not both",
                    ))
                }
                (Some(grid), None) => Some(grid),
                (None, points) => {
                    let n = points.unwrap_or(DEFAULT_THETA_POINTS);
                    if n == 0 {
                        return Err(ValidationError::new("theta_points", "must be positive"));
                    }
                    Some(default_theta_grid::<f64>(n))
                }
            }
        } else {
            None
        };
        let coin = uses_coin.then(|| input.coin.unwrap_or(CoinKind::Haar));

        let cfg = RunConfig {
            experiment: e,
            sites,
            g_list,
            disorder: uses_disorder.then(|| input.disorder.unwrap_or(1.0)),
            boundary: uses_boundary
                .then(|| input.boundary.unwrap_or_else(|| Boundary::Periodic.to_string())),
            steps,
            products: uses_products.then(|| input.products.unwrap_or(100_000)),
            theta_grid,
            coin,
            coin_theta: input.coin_theta,
            state: input.state,
            seed: input.seed.unwrap_or(0),
            realizations: input.realizations.unwrap_or(1),
            tol: input.tol.unwrap_or(DEFAULT_TOL),
            out: input.out,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        let e = self.experiment;
        if let Some(l) = self.sites {
            let min = if e == Experiment::WalkEvolve { 1 } else { 2 };
            if l < min {
                return Err(ValidationError::new("L", format!("must be at least {min}")));
            }
        }
        if let Some(list) = &self.g_list {
            if list.is_empty() {
                return Err(ValidationError::new("g_list", "empty"));
            }
            if let Some(g) = list.iter().find(|g| !g.is_finite() || g.abs() > 700.0) {
                return Err(ValidationError::new("g_list", format!("{g} is not a usable field strength")));
            }
            if list.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(ValidationError::new("g_list", "must be strictly increasing"));
            }
            if e == Experiment::WalkEvolve && list.len() != 1 {
                return Err(ValidationError::new("g_list", "walk_evolve takes a single g"));
            }
        }
        if let Some(w) = self.disorder {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(ValidationError::new("W", "must be finite and nonnegative"));
            }
        }
        if let Some(b) = &self.boundary {
            b.parse::<Boundary>().map_err(|r| ValidationError::new("boundary", r))?;
        }
        if let Some(t) = self.steps {
            if t == 0 {
                return Err(ValidationError::new("T", "must be positive"));
            }
            let l = self.sites.unwrap_or(0);
            if l < 2 * t + 2 {
                return Err(ValidationError::new(
                    "L",
                    format!("walk_evolve needs L >= 2T+2 = {} so the front never wraps", 2 * t + 2),
                ));
            }
        }
        if let Some(n) = self.products {
            if n < nhwalk_core::transfer_matrix::MIN_STEPS {
                return Err(ValidationError::new("N", "must be at least 1000"));
            }
        }
        if let Some(grid) = &self.theta_grid {
            if grid.is_empty() {
                return Err(ValidationError::new("theta_grid", "empty"));
            }
            if let Some(t) = grid.iter().find(|t| !(t.abs() <= std::f64::consts::PI)) {
                return Err(ValidationError::new("theta_grid", format!("{t} outside [-pi, pi]")));
            }
            if grid.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(ValidationError::new("theta_grid", "must be strictly increasing"));
            }
        }
        match (self.coin, self.coin_theta) {
            (Some(CoinKind::Fixed), None) => {
                return Err(ValidationError::new("coin_theta", "required for coin = \"fixed\""))
            }
            (Some(CoinKind::Fixed), Some(th)) => {
                if !th.is_finite() {
                    return Err(ValidationError::new("coin_theta", "must be finite"));
                }
                if e == Experiment::TmKappa && th.cos().abs() < nhwalk_core::quantum_walk::MIN_COS_THETA {
                    return Err(ValidationError::new("coin_theta", "perfectly reflecting coin has no transfer matrix"));
                }
            }
            (_, Some(_)) => {
                return Err(ValidationError::new("coin_theta", "only used with coin = \"fixed\""))
            }
            _ => {}
        }
        if let (Some(k), Some(l)) = (self.state, self.sites) {
            if k >= l {
                return Err(ValidationError::new("state", format!("index {k} out of range for L = {l}")));
            }
        }
        if self.seed > i64::MAX as u64 {
            return Err(ValidationError::new("seed", "must fit in a signed 64-bit integer"));
        }
        if self.realizations == 0 {
            return Err(ValidationError::new("realizations", "must be positive"));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(ValidationError::new("tol", "must be positive and finite"));
        }
        Ok(())
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
            .as_deref()
            .map(|b| b.parse().expect("validated"))
            .unwrap_or_default()
    }

    pub fn g_values(&self) -> &[f64] {
        self.g_list.as_deref().unwrap_or(&[])
    }

    /// The resolved configuration as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
