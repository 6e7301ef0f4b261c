//! Finite-difference oracle for the transformed equation.
//!
//! Dividing `∂z(z u) = u + z u_z` through by `z` gives the evolution form
//!
//! ```text
//! u_z = [2 u_yy + (y + 2(k1-1) z) u_y - (2 k2 z² + 1) u] / z,
//! ```
//!
//! which is integrated from `z_start > 0` with a theta scheme (Crank-Nicolson
//! at theta = 1/2), central differences in `y` and Dirichlet data at both ends
//! of the `y` interval. Nothing here touches the series recurrence; the series
//! only enters through [`compare`] and [`truncation_sweep`].

use std::fmt::Write as _;

use crate::error::GridError;
use crate::series::{ParamSet, SeriesSolution};
use crate::tridiag;

/// `k1`, `k2` in double precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloatParams {
    pub k1: f64,
    pub k2: f64,
}

impl From<&ParamSet> for FloatParams {
    fn from(p: &ParamSet) -> Self {
        Self {
            k1: p.k1_f64(),
            k2: p.k2_f64(),
        }
    }
}

/// Uniform rectangle `[y_min, y_max] x [z_start, z_end]` with `ny` points in
/// `y` and `nz` steps in `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
    pub z_start: f64,
    pub z_end: f64,
    pub nz: usize,
}

impl Grid {
    pub fn validate(&self) -> Result<(), GridError> {
        let fail = |msg: String| Err(GridError::InvalidGrid(msg));
        let finite = [self.y_min, self.y_max, self.z_start, self.z_end]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return fail("bounds must be finite".into());
        }
        if self.ny < 3 {
            return fail(format!("ny = {} (need at least 3)", self.ny));
        }
        if self.y_max <= self.y_min {
            return fail(format!(
                "y_max = {} must exceed y_min = {}",
                self.y_max, self.y_min
            ));
        }
        if self.z_start <= 0.0 {
            return fail(format!("z_start = {} must be > 0", self.z_start));
        }
        if self.z_end <= self.z_start {
            return fail(format!(
                "z_end = {} must exceed z_start = {}",
                self.z_end, self.z_start
            ));
        }
        if self.nz < 1 {
            return fail("nz must be at least 1".into());
        }
        Ok(())
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    pub fn dz(&self) -> f64 {
        (self.z_end - self.z_start) / self.nz as f64
    }

    pub fn y(&self, i: usize) -> f64 {
        if i == self.ny - 1 {
            self.y_max
        } else {
            self.y_min + i as f64 * self.dy()
        }
    }

    pub fn z(&self, k: usize) -> f64 {
        if k == self.nz {
            self.z_end
        } else {
            self.z_start + k as f64 * self.dz()
        }
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny).map(|i| self.y(i)).collect()
    }

    /// Same rectangle with `factor` times as many z-steps.
    pub fn refined_in_z(&self, factor: usize) -> Self {
        Self {
            nz: self.nz * factor,
            ..*self
        }
    }
}

/// Right-hand side of `u_z = F(y, z, u, u_y, u_yy)`.
pub fn evolution_form(
    params: FloatParams,
    y: f64,
    z: f64,
    u: f64,
    u_y: f64,
    u_yy: f64,
) -> Result<f64, GridError> {
    if z <= 0.0 {
        return Err(GridError::SingularTime { z });
    }
    let drift = y + 2.0 * (params.k1 - 1.0) * z;
    let decay = 2.0 * params.k2 * z * z + 1.0;
    Ok((2.0 * u_yy + drift * u_y - decay * u) / z)
}

/// Stepping controls for [`fd_solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct FdOptions {
    /// Implicitness in `[0, 1]`; 1/2 is Crank-Nicolson.
    pub theta: f64,
    /// Keep every `save_every`-th level. The first and last levels are always kept.
    pub save_every: usize,
    /// Extra z-values whose nearest level is kept.
    pub keep_z: Vec<f64>,
}

impl Default for FdOptions {
    fn default() -> Self {
        Self {
            theta: 0.5,
            save_every: 1,
            keep_z: Vec::new(),
        }
    }
}

impl FdOptions {
    pub fn final_only() -> Self {
        Self {
            save_every: usize::MAX,
            ..Self::default()
        }
    }
}

/// Retained z-levels of a finite-difference run.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSolution {
    pub grid: Grid,
    pub params: FloatParams,
    pub theta: f64,
    /// Step index of each retained level, increasing.
    pub levels: Vec<usize>,
    /// `slices[l][i]` is `u(y_i, z_{levels[l]})`.
    pub slices: Vec<Vec<f64>>,
}

impl GridSolution {
    pub fn z_of(&self, level: usize) -> f64 {
        self.grid.z(self.levels[level])
    }

    pub fn final_slice(&self) -> &[f64] {
        self.slices
            .last()
            .expect("at least the initial level is retained")
    }

    /// Index of the retained level closest to `z`.
    pub fn nearest_level(&self, z: f64) -> usize {
        let mut best = 0;
        for l in 1..self.levels.len() {
            if (self.z_of(l) - z).abs() < (self.z_of(best) - z).abs() {
                best = l;
            }
        }
        best
    }

    /// CSV with header `y,z,u`, one row per grid point, level-major.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("y,z,u\n");
        for (l, slice) in self.slices.iter().enumerate() {
            let z = self.z_of(l);
            for (i, u) in slice.iter().enumerate() {
                let _ = writeln!(out, "{},{},{}", self.grid.y(i), z, u);
            }
        }
        out
    }
}

/// Advances `initial_slice` (values at `z_start`) to `z_end`.
///
/// Row `i` of the step solves
/// `u1_i - theta dz F_i(z1, u1) = u0_i + (1 - theta) dz F_i(z0, u0)`
/// for interior points, with `u1` at both ends taken from `boundary_source`.
pub fn fd_solve(
    params: FloatParams,
    initial_slice: &[f64],
    grid: &Grid,
    boundary_source: impl Fn(f64, f64) -> f64,
    options: &FdOptions,
) -> Result<GridSolution, GridError> {
    grid.validate()?;
    if initial_slice.len() != grid.ny {
        return Err(GridError::LengthMismatch {
            expected: grid.ny,
            got: initial_slice.len(),
        });
    }
    if !(0.0..=1.0).contains(&options.theta) {
        return Err(GridError::Precondition(format!(
            "theta = {} must lie in [0, 1]",
            options.theta
        )));
    }
    if initial_slice.iter().any(|u| !u.is_finite()) {
        return Err(GridError::Instability {
            step: 0,
            z: grid.z_start,
        });
    }

    let ny = grid.ny;
    let interior = ny - 2;
    let dy = grid.dy();
    let dz = grid.dz();
    let theta = options.theta;
    let ys = grid.ys();

    let keep_steps: Vec<usize> = options
        .keep_z
        .iter()
        .filter(|z| z.is_finite())
        .map(|&z| (((z - grid.z_start) / dz).round().max(0.0) as usize).min(grid.nz))
        .collect();
    let keep = |k: usize| {
        k == 0
            || k == grid.nz
            || (options.save_every != 0 && k.is_multiple_of(options.save_every))
            || keep_steps.contains(&k)
    };

    // Stencil of F at level z: F_i = lo_i u_{i-1} + mid_i u_i + hi_i u_{i+1}.
    let stencil = |z: f64, i: usize| -> (f64, f64, f64) {
        let drift = ys[i] + 2.0 * (params.k1 - 1.0) * z;
        let decay = 2.0 * params.k2 * z * z + 1.0;
        let diff = 2.0 / (dy * dy);
        let adv = drift / (2.0 * dy);
        (
            (diff - adv) / z,
            (-2.0 * diff - decay) / z,
            (diff + adv) / z,
        )
    };

    let mut current = initial_slice.to_vec();
    let mut levels = vec![0];
    let mut slices = vec![current.clone()];
    let mut next = vec![0.0; ny];
    let mut lower = vec![0.0; interior.saturating_sub(1)];
    let mut diag = vec![0.0; interior];
    let mut upper = vec![0.0; interior.saturating_sub(1)];
    let mut rhs = vec![0.0; interior];

    for k in 0..grid.nz {
        let z0 = grid.z(k);
        let z1 = grid.z(k + 1);
        let left = boundary_source(grid.y_min, z1);
        let right = boundary_source(grid.y_max, z1);

        for j in 0..interior {
            let i = j + 1;
            let (lo0, mid0, hi0) = stencil(z0, i);
            let explicit = lo0 * current[i - 1] + mid0 * current[i] + hi0 * current[i + 1];
            rhs[j] = current[i] + (1.0 - theta) * dz * explicit;

            let (lo1, mid1, hi1) = stencil(z1, i);
            diag[j] = 1.0 - theta * dz * mid1;
            let a = -theta * dz * lo1;
            let c = -theta * dz * hi1;
            if j == 0 {
                rhs[j] -= a * left;
            } else {
                lower[j - 1] = a;
            }
            if j + 1 == interior {
                rhs[j] -= c * right;
            } else {
                upper[j] = c;
            }
        }
        tridiag::solve_in_place(&lower, &mut diag, &upper, &mut rhs);

        next[0] = left;
        next[ny - 1] = right;
        next[1..ny - 1].copy_from_slice(&rhs);
        if next.iter().any(|u| !u.is_finite()) {
            return Err(GridError::Instability { step: k + 1, z: z1 });
        }
        std::mem::swap(&mut current, &mut next);
        if keep(k + 1) {
            levels.push(k + 1);
            slices.push(current.clone());
        }
    }

    Ok(GridSolution {
        grid: *grid,
        params,
        theta,
        levels,
        slices,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMetrics {
    pub max_abs: f64,
    pub rms: f64,
    /// `(y, z)` where `max_abs` is attained.
    pub at_point: (f64, f64),
}

/// Deviation of the truncated series from the grid solution over interior
/// points, at the retained level nearest `z_eval`.
pub fn compare(
    s: &SeriesSolution,
    sol: &GridSolution,
    z_eval: f64,
) -> Result<ErrorMetrics, GridError> {
    let g = &sol.grid;
    let slack = 0.5 * g.dz();
    if !(z_eval >= g.z_start - slack && z_eval <= g.z_end + slack) {
        return Err(GridError::OutOfRange {
            z: z_eval,
            z_start: g.z_start,
            z_end: g.z_end,
        });
    }
    let level = sol.nearest_level(z_eval);
    let z = sol.z_of(level);
    let slice = &sol.slices[level];
    let mut max_abs = 0.0;
    let mut at_point = (g.y(1), z);
    let mut sum_sq = 0.0;
    for (i, u) in slice.iter().enumerate().take(g.ny - 1).skip(1) {
        let y = g.y(i);
        let err = (s.evaluate_f64(y, z) - u).abs();
        sum_sq += err * err;
        if err > max_abs {
            max_abs = err;
            at_point = (y, z);
        }
    }
    let rms = (sum_sq / (g.ny - 2) as f64).sqrt();
    Ok(ErrorMetrics {
        max_abs,
        rms,
        at_point,
    })
}

/// Self-convergence of [`fd_solve`] under repeated halving of `dz`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    /// Step counts of the successive runs.
    pub nz: Vec<usize>,
    /// Max-norm difference of final slices between consecutive runs.
    pub differences: Vec<f64>,
    /// `log2` of consecutive difference ratios.
    pub rates: Vec<f64>,
}

impl ConvergenceStudy {
    /// Rate from the finest three runs.
    pub fn order(&self) -> f64 {
        *self.rates.last().expect("at least three levels")
    }
}

/// Runs `refinement_levels` solves starting from `grid.nz` steps and doubling
/// each time. The profile seeds the initial slice and is held fixed at both
/// ends of the `y` interval.
pub fn convergence_study(
    params: FloatParams,
    profile: impl Fn(f64) -> f64,
    grid: &Grid,
    refinement_levels: usize,
    theta: f64,
) -> Result<ConvergenceStudy, GridError> {
    if refinement_levels < 3 {
        return Err(GridError::Precondition(format!(
            "refinement_levels = {refinement_levels}; a rate estimate needs at least 3"
        )));
    }
    grid.validate()?;
    let initial: Vec<f64> = grid.ys().into_iter().map(&profile).collect();
    let options = FdOptions {
        theta,
        ..FdOptions::final_only()
    };
    let mut nz = Vec::with_capacity(refinement_levels);
    let mut finals = Vec::with_capacity(refinement_levels);
    for level in 0..refinement_levels {
        let g = grid.refined_in_z(1 << level);
        let sol = fd_solve(params, &initial, &g, |y, _| profile(y), &options)?;
        nz.push(g.nz);
        finals.push(sol.final_slice().to_vec());
    }
    let differences: Vec<f64> = finals
        .windows(2)
        .map(|w| {
            w[0].iter()
                .zip(&w[1])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let rates = differences
        .windows(2)
        .map(|w| (w[0] / w[1]).log2())
        .collect();
    Ok(ConvergenceStudy {
        nz,
        differences,
        rates,
    })
}

/// Empirical convergence order in `dz` at theta = 1/2.
pub fn observed_order(
    params: FloatParams,
    profile: impl Fn(f64) -> f64,
    grid: &Grid,
    refinement_levels: usize,
) -> Result<f64, GridError> {
    convergence_study(params, profile, grid, refinement_levels, 0.5).map(|s| s.order())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub order: usize,
    pub z: f64,
    pub max_abs: f64,
    pub rms: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    fn row(&self, order: usize, z: f64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.order == order && r.z == z)
    }

    fn orders(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.rows.iter().map(|r| r.order).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    fn zs(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.rows.iter().map(|r| r.z).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Whether `max_abs` strictly decreases with `N` at this `z`.
    pub fn decreasing_in_order(&self, z: f64) -> bool {
        let errs: Vec<f64> = self
            .orders()
            .into_iter()
            .filter_map(|n| self.row(n, z).map(|r| r.max_abs))
            .collect();
        errs.windows(2).all(|w| w[1] < w[0])
    }

    /// Whether `max_abs` is non-decreasing in `z` at this `N`.
    pub fn increasing_in_z(&self, order: usize) -> bool {
        let errs: Vec<f64> = self
            .zs()
            .into_iter()
            .filter_map(|z| self.row(order, z).map(|r| r.max_abs))
            .collect();
        errs.windows(2).all(|w| w[1] >= w[0])
    }

    /// `(z, decreasing_in_order(z))` for every z in the table.
    pub fn order_trends(&self) -> Vec<(f64, bool)> {
        self.zs()
            .into_iter()
            .map(|z| (z, self.decreasing_in_order(z)))
            .collect()
    }

    /// `(N, increasing_in_z(N))` for every N in the table.
    pub fn z_trends(&self) -> Vec<(usize, bool)> {
        self.orders()
            .into_iter()
            .map(|n| (n, self.increasing_in_z(n)))
            .collect()
    }

    /// CSV with header `N,z,max_abs,rms`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,z,max_abs,rms\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{:e},{:e}", r.order, r.z, r.max_abs, r.rms);
        }
        out
    }
}

/// Tabulates [`compare`] for every series and every `z`.
pub fn truncation_sweep(
    series: &[SeriesSolution],
    sol: &GridSolution,
    z_values: &[f64],
) -> Result<SweepTable, GridError> {
    if let Some(first) = series.first() {
        let consistent = series
            .iter()
            .all(|s| s.params() == first.params() && s.terms()[0] == first.terms()[0]);
        if !consistent {
            return Err(GridError::Precondition(
                "all series in a sweep must share k1, k2 and f_0".into(),
            ));
        }
    }
    let mut rows = Vec::with_capacity(series.len() * z_values.len());
    for s in series {
        for &z in z_values {
            let m = compare(s, sol, z)?;
            rows.push(SweepRow {
                order: s.order(),
                z,
                max_abs: m.max_abs,
                rms: m.rms,
            });
        }
    }
    Ok(SweepTable { rows })
}

/// Closed-form solution for the initial profile `f_0 = scale * y`:
/// `u = scale * (y + (k1 - 1) z) * exp(-k2 z²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearProfileSolution {
    pub params: FloatParams,
    pub scale: f64,
}

impl LinearProfileSolution {
    pub fn value(&self, y: f64, z: f64) -> f64 {
        let p = self.params;
        self.scale * (y + (p.k1 - 1.0) * z) * (-p.k2 * z * z).exp()
    }

    pub fn d_y(&self, z: f64) -> f64 {
        self.scale * (-self.params.k2 * z * z).exp()
    }

    pub fn d_z(&self, y: f64, z: f64) -> f64 {
        let p = self.params;
        let e = (-p.k2 * z * z).exp();
        self.scale * e * ((p.k1 - 1.0) - 2.0 * p.k2 * z * (y + (p.k1 - 1.0) * z))
    }

    pub fn slice(&self, grid: &Grid, z: f64) -> Vec<f64> {
        grid.ys().into_iter().map(|y| self.value(y, z)).collect()
    }
}

/// Max-abs change of the final slice when the `y` interval is widened by
/// `extra_points` on each side at the same spacing, over the original points.
pub fn domain_sensitivity(
    params: FloatParams,
    grid: &Grid,
    source: impl Fn(f64, f64) -> f64,
    extra_points: usize,
    theta: f64,
) -> Result<f64, GridError> {
    let options = FdOptions {
        theta,
        ..FdOptions::final_only()
    };
    let base_init: Vec<f64> = grid
        .ys()
        .into_iter()
        .map(|y| source(y, grid.z_start))
        .collect();
    let base = fd_solve(params, &base_init, grid, &source, &options)?;
    let pad = extra_points as f64 * grid.dy();
    let wide = Grid {
        y_min: grid.y_min - pad,
        y_max: grid.y_max + pad,
        ny: grid.ny + 2 * extra_points,
        ..*grid
    };
    let wide_init: Vec<f64> = wide
        .ys()
        .into_iter()
        .map(|y| source(y, wide.z_start))
        .collect();
    let widened = fd_solve(params, &wide_init, &wide, &source, &options)?;
    Ok(base
        .final_slice()
        .iter()
        .zip(&widened.final_slice()[extra_points..])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
