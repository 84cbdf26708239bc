//! Square sample grids in the ξ plane.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type C = Complex64;

/// `resolution × resolution` points on the square centred at `center` with
/// half side `half_width`, row-major in Im ξ then Re ξ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub center: [f64; 2],
    pub half_width: f64,
    pub resolution: usize,
    /// Points to keep away from, e.g. poles of the solution.
    #[serde(default)]
    pub exclude: Vec<[f64; 2]>,
    /// Minimum distance to an excluded point; defaults to one cell.
    #[serde(default)]
    pub exclusion_radius: Option<f64>,
}

impl Grid {
    pub fn square(center: C, half_width: f64, resolution: usize) -> Grid {
        Grid {
            center: [center.re, center.im],
            half_width,
            resolution,
            exclude: Vec::new(),
            exclusion_radius: None,
        }
    }

    pub fn excluding(mut self, points: &[C]) -> Grid {
        self.exclude.extend(points.iter().map(|p| [p.re, p.im]));
        self
    }

    pub fn spacing(&self) -> f64 {
        if self.resolution <= 1 {
            0.0
        } else {
            2.0 * self.half_width / (self.resolution - 1) as f64
        }
    }

    fn radius(&self) -> f64 {
        self.exclusion_radius.unwrap_or_else(|| self.spacing())
    }

    /// All grid points, including those near excluded points.
    pub fn all_points(&self) -> Vec<C> {
        let n = self.resolution;
        let h = self.spacing();
        let (x0, y0) = (self.center[0] - self.half_width, self.center[1] - self.half_width);
        if n == 1 {
            return vec![C::new(self.center[0], self.center[1])];
        }
        let mut out = Vec::with_capacity(n * n);
        for iy in 0..n {
            for ix in 0..n {
                out.push(C::new(x0 + ix as f64 * h, y0 + iy as f64 * h));
            }
        }
        out
    }

    /// Grid points at least one exclusion radius away from every excluded point.
    pub fn points(&self) -> Vec<C> {
        let r = self.radius();
        self.all_points()
            .into_iter()
            .filter(|p| {
                self.exclude
                    .iter()
                    .all(|e| (p - C::new(e[0], e[1])).norm() >= r)
            })
            .collect()
    }
}
