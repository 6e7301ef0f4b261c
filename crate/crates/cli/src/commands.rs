use std::path::{Path, PathBuf};

use bsseries::oracle::{
    compare, convergence_study, domain_sensitivity, fd_solve, truncation_sweep, FdOptions,
    FloatParams, LinearProfileSolution, SweepTable,
};
use bsseries::rational::to_f64;
use bsseries::{adm_identity_check, expand, AdmReport, GridError, SeriesError, SeriesSolution};
use serde::Serialize;

use crate::config::{DataSource, RunConfig};
use crate::{write_atomic, CliError};

fn expand_config(cfg: &RunConfig, order: usize) -> Result<SeriesSolution, CliError> {
    let params = cfg.params()?;
    let f0 = cfg.initial_profile()?;
    expand(&f0, order, &params).map_err(|e| match e {
        SeriesError::InadmissibleInitial { residual } => {
            CliError::Inadmissible(residual.to_string())
        }
        SeriesError::Resonance { order, .. } => CliError::Resonance(order),
    })
}

fn read_series(path: &Path) -> Result<SeriesSolution, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    SeriesSolution::from_json(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn cmd_expand(cfg: &RunConfig, out: Option<PathBuf>) -> Result<PathBuf, CliError> {
    let series = expand_config(cfg, cfg.order)?;
    let path = out
        .or_else(|| cfg.output.series.clone())
        .unwrap_or_else(|| PathBuf::from("series.json"));
    write_atomic(&path, (series.to_json() + "\n").as_bytes())?;
    Ok(path)
}

#[derive(Debug, Serialize)]
pub struct RecurrenceOrder {
    pub n: usize,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct RecurrenceReport {
    pub orders: Vec<RecurrenceOrder>,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct ResidualReport {
    /// `null` when the residual vanishes identically.
    pub min_z_degree: Option<usize>,
    pub required_min_z_degree: usize,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub order: usize,
    pub recurrence: RecurrenceReport,
    pub adm: AdmReport,
    pub residual: ResidualReport,
    pub pass: bool,
}

pub fn verify_series(series: &SeriesSolution) -> VerifyReport {
    let orders: Vec<RecurrenceOrder> = series
        .recurrence_defects()
        .iter()
        .enumerate()
        .map(|(n, d)| RecurrenceOrder {
            n,
            pass: d.is_zero(),
        })
        .collect();
    let recurrence = RecurrenceReport {
        pass: orders.iter().all(|o| o.pass),
        orders,
    };
    let adm = adm_identity_check(series);
    let min_z_degree = series.pde_residual().min_z_degree();
    let required = series.order() + 1;
    let residual = ResidualReport {
        min_z_degree,
        required_min_z_degree: required,
        pass: min_z_degree.is_none_or(|d| d >= required),
    };
    let pass = recurrence.pass && adm.pass && residual.pass;
    VerifyReport {
        order: series.order(),
        recurrence,
        adm,
        residual,
        pass,
    }
}

pub fn cmd_verify(
    cfg: &RunConfig,
    series_in: Option<&Path>,
    out: Option<PathBuf>,
) -> Result<(PathBuf, VerifyReport), CliError> {
    let series = match series_in {
        Some(path) => read_series(path)?,
        None => expand_config(cfg, cfg.order)?,
    };
    let report = verify_series(&series);
    let path = out
        .or_else(|| cfg.output.report.clone())
        .unwrap_or_else(|| PathBuf::from("report.json"));
    let text = serde_json::to_string_pretty(&report).expect("report serialization") + "\n";
    write_atomic(&path, text.as_bytes())?;
    Ok((path, report))
}

#[derive(Debug, Serialize)]
pub struct OracleSummary {
    pub grid_z_end: f64,
    pub nz: usize,
    pub theta: f64,
    pub source: &'static str,
    pub observed_order: f64,
    pub domain_sensitivity_max_abs: f64,
    /// For each z: does the error strictly decrease with N?
    pub decreasing_in_order: Vec<(f64, bool)>,
    /// For each N: is the error non-decreasing in z?
    pub increasing_in_z: Vec<(usize, bool)>,
}

fn grid_error(e: GridError) -> CliError {
    match e {
        GridError::Instability { .. } => CliError::Instability(e.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

pub fn cmd_oracle(
    cfg: &RunConfig,
    series_in: Option<&Path>,
    out_dir: Option<PathBuf>,
) -> Result<(PathBuf, OracleSummary), CliError> {
    let (base_grid, theta) = cfg.grid()?;
    let z_values = cfg.sweep_z(&base_grid);
    if let Some(bad) = z_values
        .iter()
        .find(|&&z| z.is_nan() || z < base_grid.z_start)
    {
        return Err(CliError::Config(format!(
            "sweep z = {bad} lies below z_start = {}",
            base_grid.z_start
        )));
    }

    let mut orders = cfg.sweep_orders();
    let top = match series_in {
        Some(path) => {
            let s = read_series(path)?;
            orders.retain(|&n| n <= s.order());
            s
        }
        None => expand_config(
            cfg,
            orders.iter().copied().max().unwrap_or(0).max(cfg.order),
        )?,
    };
    let metric_order = cfg.order.min(top.order());
    let params = FloatParams::from(top.params());

    // Extend the grid at fixed dz so every requested z is covered.
    let z_max = z_values.iter().copied().fold(base_grid.z_end, f64::max);
    let mut grid = base_grid;
    if z_max > base_grid.z_end {
        let dz = base_grid.dz();
        grid.nz = ((z_max - base_grid.z_start) / dz).ceil() as usize;
        grid.z_end = base_grid.z_start + grid.nz as f64 * dz;
    }

    let scale = to_f64(&top.terms()[0].coeff(1));
    let exact = LinearProfileSolution { params, scale };
    let source = cfg.oracle.source;
    let top_ref = &top;
    let data = move |y: f64, z: f64| match source {
        DataSource::ClosedForm => exact.value(y, z),
        DataSource::Series => top_ref.evaluate_f64(y, z),
    };

    let options = FdOptions {
        theta,
        save_every: cfg.oracle.save_every.max(1),
        keep_z: z_values.clone(),
    };
    let initial: Vec<f64> = grid
        .ys()
        .into_iter()
        .map(|y| data(y, grid.z_start))
        .collect();
    let levels = cfg.oracle.refinement_levels;
    let pad = cfg.oracle.domain_pad;

    let (solved, (study, sensitivity)) = rayon::join(
        || fd_solve(params, &initial, &grid, data, &options),
        || {
            rayon::join(
                || convergence_study(params, |y| (-y * y).exp(), &base_grid, levels, theta),
                || domain_sensitivity(params, &base_grid, data, pad, theta),
            )
        },
    );
    let solution = solved.map_err(grid_error)?;
    let study = study.map_err(grid_error)?;
    let sensitivity = sensitivity.map_err(grid_error)?;

    let truncated: Vec<SeriesSolution> = orders.iter().map(|&n| top.truncate(n)).collect();
    let table = truncation_sweep(&truncated, &solution, &z_values).map_err(grid_error)?;

    let metric_series = top.truncate(metric_order);
    let mut metrics = SweepTable::default();
    for &z in &z_values {
        let m = compare(&metric_series, &solution, z).map_err(grid_error)?;
        metrics.rows.push(bsseries::oracle::SweepRow {
            order: metric_order,
            z,
            max_abs: m.max_abs,
            rms: m.rms,
        });
    }

    let dir = out_dir
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("oracle_out"));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;

    let mut convergence = String::from("nz,difference,rate\n");
    for (i, nz) in study.nz.iter().enumerate().skip(1) {
        let rate = if i >= 2 {
            study.rates[i - 2].to_string()
        } else {
            String::new()
        };
        convergence.push_str(&format!("{nz},{:e},{rate}\n", study.differences[i - 1]));
    }

    write_atomic(&dir.join("grid.csv"), solution.to_csv().as_bytes())?;
    write_atomic(&dir.join("sweep.csv"), table.to_csv().as_bytes())?;
    write_atomic(&dir.join("metrics.csv"), metrics.to_csv().as_bytes())?;
    write_atomic(&dir.join("convergence.csv"), convergence.as_bytes())?;

    let summary = OracleSummary {
        grid_z_end: grid.z_end,
        nz: grid.nz,
        theta,
        source: match source {
            DataSource::ClosedForm => "closed_form",
            DataSource::Series => "series",
        },
        observed_order: study.order(),
        domain_sensitivity_max_abs: sensitivity,
        decreasing_in_order: table.order_trends(),
        increasing_in_z: table.z_trends(),
    };
    let text = serde_json::to_string_pretty(&summary).expect("summary serialization") + "\n";
    write_atomic(&dir.join("summary.json"), text.as_bytes())?;
    Ok((dir, summary))
}
