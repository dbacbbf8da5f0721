use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Quadrature noise spectrum sampled on an `(omega', theta)` grid,
/// normalised so that vacuum gives 1 (0 dB).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpectrum {
    pub omega_grid: Vec<f64>,
    pub theta_grid: Vec<f64>,
    /// `s_linear[i][j]` is the value at `omega_grid[i]`, `theta_grid[j]`.
    pub s_linear: Vec<Vec<f64>>,
    pub s_db: Vec<Vec<f64>>,
}

/// Values closer than this, in dB, count as equal when locating minima.
/// Rounding noise must not pick between mirror-image points.
pub const TIE_DB: f64 = 1e-9;

pub fn to_db(s: f64) -> f64 {
    10.0 * s.log10()
}

/// Grid location of an extremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub omega_index: usize,
    pub theta_index: usize,
    pub omega: f64,
    pub theta: f64,
    pub s_db: f64,
}

impl NoiseSpectrum {
    pub fn from_linear(omega_grid: Vec<f64>, theta_grid: Vec<f64>, s_linear: Vec<Vec<f64>>) -> Self {
        let s_db = s_linear
            .iter()
            .map(|row| row.iter().copied().map(to_db).collect())
            .collect();
        Self {
            omega_grid,
            theta_grid,
            s_linear,
            s_db,
        }
    }

    pub fn len(&self) -> usize {
        self.omega_grid.len() * self.theta_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Checks shape consistency and strict positivity.
    pub fn check(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::EmptyResult);
        }
        let (n, m) = (self.omega_grid.len(), self.theta_grid.len());
        let shaped = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == m);
        if !shaped(&self.s_linear) || !shaped(&self.s_db) {
            return Err(Error::Document(format!("spectrum values are not {n}x{m}")));
        }
        if self.s_linear.iter().flatten().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::Document("spectrum values must be finite and > 0".into()));
        }
        Ok(())
    }

    pub fn at(&self, omega_index: usize, theta_index: usize) -> f64 {
        self.s_linear[omega_index][theta_index]
    }

    pub fn db_at(&self, omega_index: usize, theta_index: usize) -> f64 {
        self.s_db[omega_index][theta_index]
    }

    /// Values at one angle across the frequency grid, in dB.
    pub fn db_column(&self, theta_index: usize) -> Vec<f64> {
        self.s_db.iter().map(|row| row[theta_index]).collect()
    }

    /// Minimum over the grid restricted to the given angles and to
    /// frequencies accepted by `omega_filter`. Values within [`TIE_DB`]
    /// are ties; ties go to the lowest `omega'`, then the lowest `theta`.
    pub fn min_where(
        &self,
        theta_indices: impl IntoIterator<Item = usize> + Clone,
        omega_filter: impl Fn(f64) -> bool,
    ) -> Option<GridPoint> {
        let mut best: Option<GridPoint> = None;
        let mut order: Vec<usize> = (0..self.omega_grid.len()).collect();
        order.sort_by(|&a, &b| self.omega_grid[a].total_cmp(&self.omega_grid[b]));
        let mut thetas: Vec<usize> = theta_indices.into_iter().collect();
        thetas.sort_by(|&a, &b| self.theta_grid[a].total_cmp(&self.theta_grid[b]));
        for &i in &order {
            let omega = self.omega_grid[i];
            if !omega_filter(omega) {
                continue;
            }
            for &j in &thetas {
                let s_db = self.s_db[i][j];
                if best.is_none_or(|b| s_db < b.s_db - TIE_DB) {
                    best = Some(GridPoint {
                        omega_index: i,
                        theta_index: j,
                        omega,
                        theta: self.theta_grid[j],
                        s_db,
                    });
                }
            }
        }
        best
    }

    pub fn min(&self) -> Option<GridPoint> {
        self.min_where(0..self.theta_grid.len(), |_| true)
    }

    /// Index of the grid angle equal to `theta` modulo pi, if any.
    pub fn theta_index_mod_pi(&self, theta: f64) -> Option<usize> {
        self.theta_grid.iter().position(|&t| {
            let diff = (t - theta).rem_euclid(PI);
            diff < 1e-9 || PI - diff < 1e-9
        })
    }
}

/// `n` uniformly spaced points on `[lo, hi]`; a single point sits at `lo`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            // Weighted form: a grid with lo = -hi is exactly antisymmetric
            // and has an exact zero at its centre.
            let m = (n - 1) as f64;
            (0..n)
                .map(|k| match k {
                    0 => lo,
                    k if k == n - 1 => hi,
                    k => (lo * (m - k as f64) + hi * k as f64) / m,
                })
                .collect()
        }
    }
}

/// Default analysis window: `omega'` in `[-3W, 3W]` on 2001 points.
pub fn default_omega_grid(w: f64) -> Vec<f64> {
    uniform_grid(-3.0 * w, 3.0 * w, DEFAULT_OMEGA_POINTS)
}

pub const DEFAULT_OMEGA_POINTS: usize = 2001;

/// The two plotted quadratures, `pi/6` and `2pi/3`.
pub fn default_theta_grid() -> Vec<f64> {
    vec![PI / 6.0, 2.0 * PI / 3.0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_spectrum_tie_breaks_to_first_point() {
        let s = NoiseSpectrum::from_linear(vec![0.2, -0.1, 0.0], vec![1.0, 0.5], vec![vec![1.0; 2]; 3]);
        let m = s.min().unwrap();
        assert_eq!(m.s_db, 0.0);
        assert_eq!(m.omega, -0.1);
        assert_eq!(m.theta, 0.5);
    }

    #[test]
    fn rounding_noise_is_a_tie() {
        let s = NoiseSpectrum::from_linear(vec![-0.1, 0.1], vec![0.0], vec![vec![0.5], vec![0.5 * (1.0 - 1e-15)]]);
        assert_eq!(s.min().unwrap().omega, -0.1);
    }

    #[test]
    fn restricted_minimum() {
        let s = NoiseSpectrum::from_linear(vec![-1.0, 1.0, 2.0], vec![0.0], vec![vec![0.5], vec![0.8], vec![0.7]]);
        assert_eq!(s.min().unwrap().omega, -1.0);
        assert_eq!(s.min_where([0], |w| w > 0.0).unwrap().omega, 2.0);
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let g = uniform_grid(-0.3, 0.3, 2001);
        assert_eq!(g.len(), 2001);
        assert_eq!(g[0], -0.3);
        assert_eq!(g[2000], 0.3);
        assert_eq!(uniform_grid(1.0, 2.0, 1), vec![1.0]);
    }

    #[test]
    fn symmetric_grid_is_exactly_antisymmetric() {
        let g = uniform_grid(-0.3, 0.3, 2001);
        assert_eq!(g[1000], 0.0);
        for k in 0..g.len() {
            assert_eq!(g[k], -g[g.len() - 1 - k]);
        }
    }

    #[test]
    fn check_rejects_bad_values() {
        let mut s = NoiseSpectrum::from_linear(vec![0.0], vec![0.0], vec![vec![1.0]]);
        assert!(s.check().is_ok());
        s.s_linear[0][0] = -1.0;
        assert!(s.check().is_err());
        let e = NoiseSpectrum::from_linear(vec![], vec![0.0], vec![]);
        assert!(matches!(e.check(), Err(Error::EmptyResult)));
    }

    #[test]
    fn orthogonal_angle_lookup() {
        let s = NoiseSpectrum::from_linear(vec![0.0], default_theta_grid(), vec![vec![1.0, 1.0]]);
        assert_eq!(s.theta_index_mod_pi(PI / 6.0 + PI / 2.0), Some(1));
        assert_eq!(s.theta_index_mod_pi(2.0 * PI / 3.0 + PI / 2.0), Some(0));
        assert_eq!(s.theta_index_mod_pi(0.3), None);
    }
}
