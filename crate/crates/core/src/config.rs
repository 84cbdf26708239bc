//! Run configuration read from TOML.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::basis::BasisKind;
use crate::expr::{parse, Bindings};
use crate::geometry::DEFAULT_MEASURE;
use crate::grid::Grid;
use crate::immersion::SurfaceRelation;
use crate::matrix::{c, Mat, C};
use crate::model::AffineSolution;
use crate::solutions::{Catalog, SolutionError};
use crate::symmetry::Generator;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config syntax: {0}")]
    Syntax(String),
    #[error("config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Solution(#[from] SolutionError),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "Tolerances::default_el")]
    pub el: f64,
    /// Only enforced when set.
    #[serde(default)]
    pub dc: Option<f64>,
    #[serde(default = "Tolerances::default_path")]
    pub path: f64,
    #[serde(default = "Tolerances::default_relation")]
    pub relation: f64,
    #[serde(default = "Tolerances::default_curvature")]
    pub curvature: f64,
    #[serde(default = "Tolerances::default_frame")]
    pub frame: f64,
    #[serde(default = "Tolerances::default_orthonormality")]
    pub orthonormality: f64,
    #[serde(default = "Tolerances::default_invariance")]
    pub invariance: f64,
    /// Smallest residual slope accepted for a symmetry generator.
    #[serde(default = "Tolerances::default_slope")]
    pub slope: f64,
}

impl Tolerances {
    fn default_el() -> f64 {
        1e-9
    }
    fn default_path() -> f64 {
        1e-10
    }
    fn default_relation() -> f64 {
        1e-10
    }
    fn default_curvature() -> f64 {
        1e-8
    }
    fn default_frame() -> f64 {
        1e-7
    }
    fn default_orthonormality() -> f64 {
        1e-10
    }
    fn default_invariance() -> f64 {
        1e-10
    }
    fn default_slope() -> f64 {
        1.9
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeomConfig {
    /// Fail unless every sample has this Gaussian curvature.
    pub expect_curvature: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImmerseConfig {
    pub relation: Option<SurfaceRelation>,
    /// Coordinates at the base point, for path-integrated surfaces.
    pub anchor: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameConfig {
    #[serde(default)]
    pub phi: f64,
    /// Sample points; the grid when empty.
    #[serde(default)]
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(default = "QuadratureConfig::default_resolution")]
    pub resolution: usize,
    /// Integration square for the Willmore functional; the grid by default.
    #[serde(default)]
    pub region: Option<Grid>,
}

impl QuadratureConfig {
    fn default_resolution() -> usize {
        4
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            resolution: Self::default_resolution(),
            region: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SymmetryAction {
    /// A generator by name ("S1", "T1_2", "X1:xi^2", …) or "all".
    Generator {
        generator: String,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
    },
    /// f → Uf, U given as rows of [re, im].
    Projective { u: Vec<Vec<[f64; 2]>> },
    /// The spin-1 image of (a, b) acting on N = 3.
    Su2 { a: [f64; 2], b: [f64; 2] },
}

fn default_epsilon() -> f64 {
    1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Name of a built-in catalog entry supplying N, w, parameters,
    /// singularities and the grid when they are not given here.
    #[serde(default)]
    pub entry: Option<String>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub w: Option<Vec<String>>,
    #[serde(default)]
    pub wbar: Option<Vec<String>>,
    #[serde(default)]
    pub params: BTreeMap<String, [f64; 2]>,
    #[serde(default)]
    pub singularities: Vec<[f64; 2]>,
    #[serde(default)]
    pub grid: Option<Grid>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub basis: Option<BasisKind>,
    #[serde(default)]
    pub base_point: [f64; 2],
    #[serde(default = "default_measure")]
    pub measure: f64,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub geom: GeomConfig,
    #[serde(default)]
    pub immerse: ImmerseConfig,
    #[serde(default)]
    pub frame: FrameConfig,
    #[serde(default)]
    pub charge: QuadratureConfig,
    #[serde(default)]
    pub willmore: QuadratureConfig,
    #[serde(default)]
    pub symmetry: Option<SymmetryAction>,
}

fn default_measure() -> f64 {
    DEFAULT_MEASURE
}

/// A parsed config together with its hash and the solution it names.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub hash: String,
    pub n: usize,
    pub solution: AffineSolution,
    pub grid: Grid,
}

impl Resolved {
    pub fn points(&self) -> Vec<C> {
        self.grid.points()
    }

    pub fn base_point(&self) -> C {
        c(self.config.base_point[0], self.config.base_point[1])
    }

    pub fn singularities(&self) -> Vec<C> {
        self.grid.exclude.iter().map(|p| c(p[0], p[1])).collect()
    }
}

/// Hex SHA-256 of the config text.
pub fn config_hash(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

impl RunConfig {
    pub fn from_text(text: &str) -> Result<RunConfig, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))
    }

    /// Fills in catalog defaults, checks consistency and builds the solution.
    pub fn resolve(mut self, text: &str) -> Result<Resolved, ConfigError> {
        if let Some(name) = &self.entry {
            let cat = Catalog::builtin();
            let e = cat.get(name)?;
            self.n.get_or_insert(e.n);
            self.w.get_or_insert_with(|| e.w.clone());
            for (k, v) in &e.params {
                self.params.entry(k.clone()).or_insert(*v);
            }
            self.singularities.extend(e.singularities.iter().copied());
            self.grid.get_or_insert_with(|| e.grid.clone());
        }
        let w = self.w.clone().ok_or_else(|| invalid("`w` is required unless `entry` is given"))?;
        let n = self.n.unwrap_or(w.len() + 1);
        if n < 2 || w.len() != n - 1 {
            return Err(invalid(format!("N = {n} needs {} fields, got {}", n.saturating_sub(1), w.len())));
        }
        let mut grid = self
            .grid
            .clone()
            .ok_or_else(|| invalid("`grid` is required unless `entry` is given"))?;
        if grid.resolution == 0 || !(grid.half_width > 0.0) {
            return Err(invalid("grid needs a positive half width and resolution"));
        }
        grid.exclude.extend(self.singularities.iter().copied());
        if let Some(r) = grid.exclusion_radius {
            if r < grid.spacing() {
                return Err(invalid(format!(
                    "exclusion radius {r} is smaller than one grid cell ({})",
                    grid.spacing()
                )));
            }
        }
        let t = &self.tolerances;
        let tols = [t.el, t.path, t.relation, t.curvature, t.frame, t.orthonormality, t.invariance];
        if tols.iter().chain(t.dc.iter()).any(|v| !(*v > 0.0)) {
            return Err(invalid("tolerances must be positive"));
        }
        if let Some(b) = self.basis {
            if b.dim() != n {
                return Err(invalid(format!("basis {b:?} needs N = {}", b.dim())));
            }
        }
        let mut bindings = Bindings::new();
        for (k, v) in &self.params {
            bindings.insert(k, c(v[0], v[1]));
        }
        let parse_all = |v: &[String]| {
            v.iter()
                .map(|s| parse(s).map_err(|e| invalid(format!("expression `{s}`: {e}"))))
                .collect::<Result<Vec<_>, _>>()
        };
        let we = parse_all(&w)?;
        let solution = match &self.wbar {
            None => AffineSolution::new(we, bindings),
            Some(wb) => {
                if wb.len() != w.len() {
                    return Err(invalid("`wbar` must have as many entries as `w`"));
                }
                AffineSolution::with_conjugates(we, parse_all(wb)?, bindings)
            }
        }
        .map_err(|e| invalid(e.to_string()))?;
        if let Some(SymmetryAction::Generator { generator, epsilon }) = &self.symmetry {
            if generator != "all" {
                generator
                    .parse::<Generator>()
                    .map_err(|e| invalid(format!("generator `{generator}`: {e}")))?;
            }
            if !(*epsilon > 0.0) {
                return Err(invalid("epsilon must be positive"));
            }
        }
        Ok(Resolved {
            hash: config_hash(text),
            n,
            solution,
            grid,
            config: self,
        })
    }
}

/// Parses U from rows of [re, im] pairs.
pub fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<Mat, ConfigError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(invalid("U must be a non-empty square matrix"));
    }
    let data: Vec<C> = rows.iter().flatten().map(|v| c(v[0], v[1])).collect();
    Ok(Mat::from_row_slice(n, n, &data))
}
