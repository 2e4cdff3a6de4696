//! TOML run configuration.
//!
//! ```toml
//! [[channel]]
//! name = "attenuator"
//! s = 1
//! K = [0.7071067811865476, 0.0, 0.0, 0.7071067811865476]
//! l = [0.0, 0.0]
//! mu = [0.25, 0.0, 0.0, 0.25]
//!
//! [[state]]
//! name = "thermal"
//! s = 1
//! mean = [0.0, 0.0]
//! cov = [1.5, 0.0, 0.0, 1.5]
//!
//! [sweep]
//! p = 2.0
//! beta_start = 0.1
//! beta_stop = 1e-5
//! points = 17
//! ```
//!
//! Matrices are row-major with `2s × 2s` entries.

use std::path::Path;

use bgc_core::{GaussianChannel, GibbsFamily, SymplecticSpace};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default, rename = "channel", skip_serializing_if = "Vec::is_empty")]
    pub channels: Vec<ChannelSpec>,
    #[serde(default, rename = "state", skip_serializing_if = "Vec::is_empty")]
    pub states: Vec<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub name: String,
    pub s: usize,
    #[serde(rename = "K")]
    pub k: Vec<f64>,
    pub l: Vec<f64>,
    pub mu: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub name: String,
    pub s: usize,
    pub mean: Vec<f64>,
    pub cov: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Row-major Hamiltonian matrix; identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default = "default_beta_start")]
    pub beta_start: f64,
    #[serde(default = "default_beta_stop")]
    pub beta_stop: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

fn default_beta_start() -> f64 {
    1e-1
}

fn default_beta_stop() -> f64 {
    1e-5
}

fn default_points() -> usize {
    17
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            epsilon: None,
            p: None,
            q: None,
            beta_start: default_beta_start(),
            beta_stop: default_beta_stop(),
            points: default_points(),
            output_path: None,
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Parse(e.to_string()))
    }

    /// Channel by name, or the first one when `name` is `None`.
    pub fn channel(&self, name: Option<&str>) -> Result<&ChannelSpec, CliError> {
        match name {
            Some(n) => self
                .channels
                .iter()
                .find(|c| c.name == n)
                .ok_or_else(|| CliError::Parse(format!("no channel named {n:?}"))),
            None => self
                .channels
                .first()
                .ok_or_else(|| CliError::Parse("config defines no [[channel]]".into())),
        }
    }
}

fn space(s: usize, owner: &str) -> Result<SymplecticSpace, CliError> {
    SymplecticSpace::standard(s)
        .map_err(|_| CliError::Parse(format!("{owner}: s must be positive")))
}

fn matrix(values: &[f64], n: usize, what: &str, owner: &str) -> Result<DMatrix<f64>, CliError> {
    if values.len() != n * n {
        return Err(CliError::Parse(format!(
            "{owner}: {what} has {} entries, expected {}",
            values.len(),
            n * n
        )));
    }
    Ok(DMatrix::from_row_slice(n, n, values))
}

fn vector(values: &[f64], n: usize, what: &str, owner: &str) -> Result<DVector<f64>, CliError> {
    if values.len() != n {
        return Err(CliError::Parse(format!(
            "{owner}: {what} has {} entries, expected {n}",
            values.len()
        )));
    }
    Ok(DVector::from_column_slice(values))
}

/// Shape-checked matrices of a channel, before the CP test.
pub struct ChannelParts {
    pub space: SymplecticSpace,
    pub k: DMatrix<f64>,
    pub l: DVector<f64>,
    pub mu: DMatrix<f64>,
}

impl ChannelSpec {
    pub fn parts(&self) -> Result<ChannelParts, CliError> {
        let owner = format!("channel {:?}", self.name);
        let space = space(self.s, &owner)?;
        let n = space.dim();
        Ok(ChannelParts {
            k: matrix(&self.k, n, "K", &owner)?,
            l: vector(&self.l, n, "l", &owner)?,
            mu: matrix(&self.mu, n, "mu", &owner)?,
            space,
        })
    }

    pub fn build(&self) -> Result<GaussianChannel, CliError> {
        let p = self.parts()?;
        Ok(GaussianChannel::new(p.k, p.l, p.mu, &p.space)?)
    }
}

impl StateSpec {
    pub fn parts(&self) -> Result<(SymplecticSpace, DVector<f64>, DMatrix<f64>), CliError> {
        let owner = format!("state {:?}", self.name);
        let space = space(self.s, &owner)?;
        let n = space.dim();
        Ok((
            space.clone(),
            vector(&self.mean, n, "mean", &owner)?,
            matrix(&self.cov, n, "cov", &owner)?,
        ))
    }
}

impl SweepSpec {
    /// Mode count implied by `epsilon`, if given.
    pub fn modes(&self) -> Result<Option<usize>, CliError> {
        let Some(eps) = &self.epsilon else {
            return Ok(None);
        };
        let n = (eps.len() as f64).sqrt().round() as usize;
        if n * n != eps.len() || !n.is_multiple_of(2) || n == 0 {
            return Err(CliError::Parse(format!(
                "sweep: epsilon has {} entries, not a 2s x 2s matrix",
                eps.len()
            )));
        }
        Ok(Some(n / 2))
    }

    pub fn family(&self, space: &SymplecticSpace) -> Result<GibbsFamily, CliError> {
        match &self.epsilon {
            None => Ok(GibbsFamily::isotropic(space)),
            Some(eps) => {
                let eps = matrix(eps, space.dim(), "epsilon", "sweep")?;
                Ok(GibbsFamily::new(space, eps)?)
            }
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.beta_start > self.beta_stop && self.beta_stop > 0.0) {
            return Err(CliError::Validation(format!(
                "sweep: need beta_start > beta_stop > 0, got {} and {}",
                self.beta_start, self.beta_stop
            )));
        }
        if self.points < 3 {
            return Err(CliError::Validation(format!(
                "sweep: need points >= 3, got {}",
                self.points
            )));
        }
        Ok(())
    }

    pub fn betas(&self) -> Result<Vec<f64>, CliError> {
        self.validate()?;
        Ok(bgc_core::fit::geometric_grid(
            self.beta_start,
            self.beta_stop,
            self.points,
        )?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[[channel]]
name = "att"
s = 1
K = [0.7071067811865476, 0.0, 0.0, 0.7071067811865476]
l = [0.0, 0.0]
mu = [0.25, 0.0, 0.0, 0.25]

[[state]]
name = "vac"
s = 1
mean = [0.1, -0.2]
cov = [0.5, 0.0, 0.0, 0.5]

[sweep]
p = 2.0
q = 1.0
beta_start = 0.1
beta_stop = 1e-5
points = 9
output_path = "out.csv"
epsilon = [1.0, 0.0, 0.0, 1.0]
"#;

    #[test]
    fn round_trip_is_identity() {
        let a = Config::parse(SAMPLE).unwrap();
        let b = Config::parse(&a.to_toml().unwrap()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.sweep.as_ref().unwrap().beta_stop, 1e-5);
    }

    #[test]
    fn sweep_defaults_fill_in() {
        let c = Config::parse("[sweep]\np = 3.0\n").unwrap();
        let s = c.sweep.unwrap();
        assert_eq!((s.beta_start, s.beta_stop, s.points), (0.1, 1e-5, 17));
    }

    #[test]
    fn bad_length_is_a_parse_error() {
        let c = Config::parse(&SAMPLE.replace("l = [0.0, 0.0]", "l = [0.0]")).unwrap();
        assert!(matches!(c.channels[0].parts(), Err(CliError::Parse(_))));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(
            Config::parse("[sweep]\nbogus = 1\n"),
            Err(CliError::Parse(_))
        ));
    }

    #[test]
    fn epsilon_shape_gives_modes() {
        let mut s = SweepSpec::default();
        assert_eq!(s.modes().unwrap(), None);
        s.epsilon = Some(vec![0.0; 16]);
        assert_eq!(s.modes().unwrap(), Some(2));
        s.epsilon = Some(vec![0.0; 9]);
        assert!(s.modes().is_err());
    }
}
