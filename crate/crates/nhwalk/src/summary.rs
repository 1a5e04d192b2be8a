//! Condensed per-experiment results computed from an output table.

use std::fmt;

use nhwalk_core::hatano_nelson::fit_localization;
use nhwalk_core::Boundary;

use crate::config::Experiment;
use crate::error::TableError;
use crate::output::OutputTable;

/// Fraction above which a g value counts as past the complexification transition.
pub const TRANSITION_FRACTION: f64 = 0.01;
/// `|Im θ|` threshold for walk eigenphases.
pub const WALK_IMAG_EPS: f64 = 1e-6;
/// Relative `|Im E|` threshold for Hatano-Nelson spectra.
pub const HN_IMAG_EPS_REL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct FractionPoint {
    pub g: f64,
    pub fraction: f64,
    /// Real part of the complex eigenvalue closest to the real axis centre, if any.
    pub first_complex_re: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileFit {
    pub g: f64,
    pub kappa: Option<f64>,
    pub center: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Summary {
    Spectrum {
        points: Vec<FractionPoint>,
        transition_g: Option<f64>,
    },
    Profile(Vec<ProfileFit>),
    Edges(Vec<(f64, f64)>),
    Evolution {
        final_t: i64,
        total_weight: f64,
        mean_x: f64,
    },
    Kappa {
        mean: f64,
        max_deviation: f64,
    },
}

pub fn summarize(table: &OutputTable) -> Result<Summary, TableError> {
    let e = table.experiment();
    let expected: Vec<String> = e.columns().iter().map(|c| c.to_string()).collect();
    if table.header != expected || table.rows.iter().any(|r| r.len() != expected.len()) {
        return Err(TableError::SchemaMismatch {
            expected,
            found: table.header.clone(),
        });
    }
    let col = |j: usize| -> Vec<f64> { table.rows.iter().map(|r| r[j].as_f64()).collect() };
    Ok(match e {
        Experiment::HnSpectrum | Experiment::WalkSpectrum => {
            let (g, re, im) = (col(0), col(2), col(3));
            let points: Vec<FractionPoint> = groups(&g)
                .into_iter()
                .map(|(gv, range)| {
                    let eps = if e == Experiment::HnSpectrum {
                        let max = range
                            .clone()
                            .map(|i| re[i].hypot(im[i]))
                            .fold(0.0, f64::max);
                        HN_IMAG_EPS_REL * max
                    } else {
                        WALK_IMAG_EPS
                    };
                    let n = range.len() as f64;
                    let complex: Vec<usize> = range.filter(|&i| im[i].abs() > eps).collect();
                    let first_complex_re = complex
                        .iter()
                        .map(|&i| re[i])
                        .min_by(|a, b| a.abs().total_cmp(&b.abs()));
                    FractionPoint {
                        g: gv,
                        fraction: complex.len() as f64 / n,
                        first_complex_re,
                    }
                })
                .collect();
            let transition_g = points
                .iter()
                .find(|p| p.fraction > TRANSITION_FRACTION)
                .map(|p| p.g);
            Summary::Spectrum {
                points,
                transition_g,
            }
        }
        Experiment::HnProfile => {
            let (g, product) = (col(0), col(2));
            let boundary: Boundary = table
                .metadata
                .config
                .boundary
                .as_deref()
                .and_then(|b| b.parse().ok())
                .unwrap_or_default();
            Summary::Profile(
                groups(&g)
                    .into_iter()
                    .map(|(gv, range)| {
                        let fit = fit_localization(&product[range], boundary).ok();
                        ProfileFit {
                            g: gv,
                            kappa: fit.map(|f| f.kappa),
                            center: fit.map(|f| f.center),
                        }
                    })
                    .collect(),
            )
        }
        Experiment::HnKappaEdges => {
            let (g, lo, hi) = (col(0), col(1), col(2));
            let mut pairs = Vec::new();
            for i in 0..g.len() {
                pairs.push((lo[i], g[i]));
                pairs.push((hi[i], g[i]));
            }
            Summary::Edges(pairs)
        }
        Experiment::WalkEvolve => {
            let (t, x, p) = (col(0), col(1), col(2));
            let final_t = t.iter().copied().fold(0.0, f64::max);
            let last: Vec<usize> = (0..t.len()).filter(|&i| t[i] == final_t).collect();
            let total: f64 = last.iter().map(|&i| p[i]).sum();
            let mean_x = if total > 0.0 {
                last.iter().map(|&i| x[i] * p[i]).sum::<f64>() / total
            } else {
                0.0
            };
            Summary::Evolution {
                final_t: final_t as i64,
                total_weight: total,
                mean_x,
            }
        }
        Experiment::TmKappa => {
            let k = col(1);
            if k.is_empty() {
                return Err(TableError::Parse {
                    line: 0,
                    reason: "no rows".into(),
                });
            }
            let mean = k.iter().sum::<f64>() / k.len() as f64;
            let max_deviation = k.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
            Summary::Kappa {
                mean,
                max_deviation,
            }
        }
    })
}

/// Contiguous runs of equal keys, in table order.
fn groups(keys: &[f64]) -> Vec<(f64, std::ops::Range<usize>)> {
    let mut out: Vec<(f64, std::ops::Range<usize>)> = Vec::new();
    for (i, &k) in keys.iter().enumerate() {
        match out.last_mut() {
            Some((last, range)) if *last == k => range.end = i + 1,
            _ => out.push((k, i..i + 1)),
        }
    }
    out
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_else(|| "none".into())
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Summary::Spectrum {
                points,
                transition_g,
            } => {
                writeln!(f, "g,complex_fraction,first_complex_re")?;
                for p in points {
                    writeln!(f, "{},{},{}", p.g, p.fraction, opt(p.first_complex_re))?;
                }
                writeln!(f, "transition_g = {}", opt(*transition_g))
            }
            Summary::Profile(fits) => {
                writeln!(f, "g,kappa,center")?;
                for p in fits {
                    writeln!(f, "{},{},{}", p.g, opt(p.kappa), opt(p.center))?;
                }
                Ok(())
            }
            Summary::Edges(pairs) => {
                writeln!(f, "edge_energy,g")?;
                for (e, g) in pairs {
                    writeln!(f, "{e},{g}")?;
                }
                Ok(())
            }
            Summary::Evolution {
                final_t,
                total_weight,
                mean_x,
            } => writeln!(f, "t = {final_t}\ntotal_weight = {total_weight}\nmean_x = {mean_x}"),
            Summary::Kappa {
                mean,
                max_deviation,
            } => writeln!(f, "mean_kappa = {mean}\nmax_deviation = {max_deviation}"),
        }
    }
}
