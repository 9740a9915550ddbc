//! Path sources for the CLI: built-in generators or CSV files.

use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::grid::{sample_brownian, Grid, RngStream, SampledPath};
use crate::io::load_path;
use crate::roughvol::{rl_fbm, NoisePath};

/// `power:eta=E`, `const:c=C`, `brownian`, `fbm:H=H`, or a CSV file.
#[derive(Clone, Debug, PartialEq)]
pub enum PathSpec {
    Power { eta: f64 },
    Const { c: f64 },
    Brownian,
    Fbm { hurst: f64 },
    File(PathBuf),
}

fn param(body: &str, key: &str) -> Result<f64> {
    let (k, v) = body
        .split_once('=')
        .ok_or_else(|| Error::Malformed(format!("expected {key}=<value>, got `{body}`")))?;
    if k.trim() != key {
        return Err(Error::Malformed(format!(
            "expected parameter `{key}`, got `{k}`"
        )));
    }
    v.trim()
        .parse()
        .map_err(|_| Error::Malformed(format!("`{v}` is not a number")))
}

impl FromStr for PathSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some(("power", body)) => Ok(Self::Power {
                eta: param(body, "eta")?,
            }),
            Some(("const", body)) => Ok(Self::Const {
                c: param(body, "c")?,
            }),
            Some(("fbm", body)) => {
                let hurst = param(body, "H")?;
                if !(hurst > 0.0 && hurst < 1.0) {
                    return Err(invalid("H", format!("{hurst} is not in (0, 1)")));
                }
                Ok(Self::Fbm { hurst })
            }
            _ if s == "brownian" => Ok(Self::Brownian),
            _ if s.ends_with(".csv") => Ok(Self::File(PathBuf::from(s))),
            _ => Err(Error::Malformed(format!("unknown path source `{s}`"))),
        }
    }
}

/// Grid settings shared by the path-based subcommands.
#[derive(Clone, Copy, Debug)]
pub struct GridChoice {
    pub horizon: f64,
    /// Dyadic grid: blocks and cells per block.
    pub levels: u32,
    pub per_level: usize,
    /// Uniform grid `(0, T]`, used when an fBM is requested.
    pub steps: usize,
}

/// Realises several specs on one common grid. Random sources share one
/// noise path, so `brownian` and `fbm:H=..` are driven by the same `W`.
pub struct PathFactory {
    grid: Grid,
    noise: Option<NoisePath>,
    brownian: Option<SampledPath>,
}

fn drop_origin(p: &SampledPath) -> Result<SampledPath> {
    SampledPath::new(
        Grid::new(p.times()[1..].to_vec())?,
        p.values()[1..].to_vec(),
    )
}

impl PathFactory {
    pub fn new(specs: &[&PathSpec], choice: GridChoice, seed: u64) -> Result<Self> {
        let rng = RngStream::new(seed, 0);
        let files: Vec<SampledPath> = specs
            .iter()
            .filter_map(|s| match s {
                PathSpec::File(p) => Some(load_path::<f64>(p)),
                _ => None,
            })
            .collect::<Result<_>>()?;
        let wants_fbm = specs.iter().any(|s| matches!(s, PathSpec::Fbm { .. }));
        if let Some(first) = files.first() {
            if files.iter().any(|f| !f.grid().same_as(first.grid())) {
                return Err(Error::GridMismatch);
            }
            if wants_fbm {
                return Err(invalid("fbm", "cannot be combined with CSV input"));
            }
            let grid = first.grid().clone();
            let brownian = Some(sample_brownian(&grid, &rng)?);
            return Ok(Self {
                grid,
                noise: None,
                brownian,
            });
        }
        if wants_fbm {
            let noise = NoisePath::sample(choice.horizon, choice.steps, 0.0, 0.0, &rng)?;
            let brownian = drop_origin(&noise.on_unit()?)?;
            return Ok(Self {
                grid: brownian.grid().clone(),
                noise: Some(noise),
                brownian: Some(brownian),
            });
        }
        let grid = Grid::dyadic(choice.horizon, choice.levels, choice.per_level)?;
        let brownian = Some(sample_brownian(&grid, &rng)?);
        Ok(Self {
            grid,
            noise: None,
            brownian,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn realise(&self, spec: &PathSpec) -> Result<SampledPath> {
        match spec {
            PathSpec::Power { eta } => SampledPath::from_fn(self.grid.clone(), |t| t.powf(*eta)),
            PathSpec::Const { c } => SampledPath::constant(self.grid.clone(), *c),
            PathSpec::Brownian => Ok(self.brownian.clone().expect("noise is always sampled")),
            PathSpec::Fbm { hurst } => {
                let noise = self.noise.as_ref().expect("fbm implies a noise lattice");
                let p = drop_origin(&rl_fbm(noise, *hurst)?)?;
                SampledPath::new(self.grid.clone(), p.values().to_vec())
            }
            PathSpec::File(p) => {
                let path = load_path::<f64>(p)?;
                SampledPath::new(self.grid.clone(), path.values().to_vec())
            }
        }
    }
}
