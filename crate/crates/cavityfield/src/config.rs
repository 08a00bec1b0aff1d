//! Run configuration: a single JSON file drives the CLI and the batch
//! examples. Keys carry explicit units (`e_mpa`, `gamma_kpa`) so configs stay
//! self-describing and diffable.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::annulus::MapOptions;
use crate::geometry::{build_case_boundary, CasePreset, CavitySpec, MaterialParams, PlaneMode};
use crate::solver::SolverConfig;
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MaterialConfig {
    pub e_mpa: f64,
    pub nu: f64,
    pub gamma_kpa: f64,
    pub k0: f64,
    #[serde(default = "default_plane_mode")]
    pub plane_mode: PlaneMode,
}

fn default_plane_mode() -> PlaneMode {
    PlaneMode::PlaneStrain
}

/// Axisymmetric cavity parameters (series-generated boundary).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinAxiConfig {
    pub a: f64,
    #[serde(default)]
    pub b: Vec<f64>,
    pub alpha: f64,
}

/// Exactly one of `preset`, `csv` or `lin_axi` selects the cavity.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct GeometryConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lin_axi: Option<LinAxiConfig>,
    /// Collocation points per boundary half for generated cavities.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collocation_n: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolverSettings {
    #[serde(default = "default_n0")]
    pub n0: usize,
    #[serde(default = "default_m")]
    pub m_trunc: usize,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    /// Assignment factor of the charge-point offsets; defaults to 1.2
    /// (0.8 for axisymmetric cavities).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k2: Option<f64>,
    /// Backward-series length; absent means the square point-correspondence
    /// fit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backward_series_len: Option<usize>,
}

fn default_n0() -> usize {
    80
}
fn default_m() -> usize {
    360
}
fn default_epsilon() -> f64 {
    1e-16
}
fn default_max_iters() -> usize {
    100
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            n0: default_n0(),
            m_trunc: default_m(),
            epsilon: default_epsilon(),
            max_iters: default_max_iters(),
            k2: None,
            backward_series_len: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterMode {
    On,
    Off,
    Both,
}

impl std::str::FromStr for FilterMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "on" => Ok(FilterMode::On),
            "off" => Ok(FilterMode::Off),
            "both" => Ok(FilterMode::Both),
            other => Err(format!(
                "unknown filter mode `{other}` (expected on, off or both)"
            )),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridConfig {
    #[serde(default = "default_theta_count")]
    pub theta_count: usize,
    /// Interior ring radii to emit in addition to the two boundaries.
    #[serde(default)]
    pub rings: Vec<f64>,
}

fn default_theta_count() -> usize {
    720
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            theta_count: default_theta_count(),
            rings: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub material: MaterialConfig,
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub solver: SolverSettings,
    /// Normalized free-surface half-width (joint abscissa over cavity depth).
    #[serde(default = "default_x0")]
    pub x0: f64,
    #[serde(default = "default_filter")]
    pub filter: FilterMode,
    #[serde(default)]
    pub grids: GridConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<PathBuf>,
}

fn default_x0() -> f64 {
    1.0
}
fn default_filter() -> FilterMode {
    FilterMode::On
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidConfig {
            field: "config".into(),
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| Error::InvalidConfig {
            field: "config".into(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.material()?;
        m.validate()?;
        let g = &self.geometry;
        let selected = g.preset.is_some() as u8 + g.csv.is_some() as u8 + g.lin_axi.is_some() as u8;
        if selected != 1 {
            return Err(Error::InvalidConfig {
                field: "geometry".into(),
                message: format!(
                    "exactly one of `preset`, `csv`, `lin_axi` must be set, found {selected}"
                ),
            });
        }
        if let Some(name) = &g.preset {
            if CasePreset::named(name).is_none() {
                return Err(Error::InvalidConfig {
                    field: "geometry.preset".into(),
                    message: format!("unknown preset `{name}` (expected case1..case4)"),
                });
            }
        }
        if !(self.x0 > 0.0) {
            return Err(Error::InvalidConfig {
                field: "x0".into(),
                message: format!("must be positive, got {}", self.x0),
            });
        }
        if self.grids.theta_count < 8 {
            return Err(Error::InvalidConfig {
                field: "grids.theta_count".into(),
                message: "need at least 8 angles".into(),
            });
        }
        for r in &self.grids.rings {
            if !(0.0 < *r && *r < 1.0) {
                return Err(Error::InvalidConfig {
                    field: "grids.rings".into(),
                    message: format!("ring radius {r} must lie in (0, 1)"),
                });
            }
        }
        self.solver_config().validate()
    }

    pub fn material(&self) -> Result<MaterialParams> {
        MaterialParams::new(
            self.material.e_mpa,
            self.material.nu,
            self.material.gamma_kpa,
            self.material.k0,
            self.material.plane_mode,
        )
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            n0: self.solver.n0,
            m_trunc: self.solver.m_trunc,
            epsilon: self.solver.epsilon,
            max_iters: self.solver.max_iters,
        }
    }

    pub fn map_options(&self) -> MapOptions {
        let default_k2 = if self.geometry.lin_axi.is_some() {
            0.8
        } else {
            1.2
        };
        MapOptions {
            assignment_factor: self.solver.k2.unwrap_or(default_k2),
            backward_series_len: self.solver.backward_series_len,
        }
    }

    /// Same cavity regenerated at a different free-surface half-width.
    pub fn build_spec_with_x0(&self, x0: f64) -> Result<CavitySpec> {
        let mut c = self.clone();
        c.x0 = x0;
        c.build_spec()
    }

    /// Builds the cavity trace the configuration describes.
    pub fn build_spec(&self) -> Result<CavitySpec> {
        let g = &self.geometry;
        if let Some(name) = &g.preset {
            let preset = CasePreset::named(name).ok_or_else(|| Error::InvalidConfig {
                field: "geometry.preset".into(),
                message: format!("unknown preset `{name}`"),
            })?;
            let preset = match g.collocation_n {
                Some(n) => preset.with_half_count(n),
                None => preset,
            };
            return build_case_boundary(&preset, self.x0);
        }
        if let Some(path) = &g.csv {
            return CavitySpec::from_csv(path, self.x0, path.display().to_string());
        }
        if let Some(axi) = &g.lin_axi {
            let preset = CasePreset::Axisymmetric {
                mobius_a: axi.a,
                shape_coeffs: axi.b.clone(),
                inner_radius: axi.alpha,
                half_count: g.collocation_n.unwrap_or(30),
            };
            return build_case_boundary(&preset, self.x0);
        }
        Err(Error::InvalidConfig {
            field: "geometry".into(),
            message: "no cavity source selected".into(),
        })
    }
}
