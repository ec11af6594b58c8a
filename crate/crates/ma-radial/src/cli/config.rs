//! Plain key=value problem configuration.

use std::path::Path;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::problem::{Problem, SolverParams};
use crate::quadrature::Grid;

/// A parsed configuration file: the problem statement plus solver
/// controls. One `key = value` per line, `#` starts a comment, the key
/// set is closed. `n`, `f`, and `boundary_value` are required; the rest
/// default to the solver's usual settings.
#[derive(Debug, Clone)]
pub struct ConfigFile {
    pub n: u32,
    pub f: Expr,
    pub boundary_value: f64,
    pub t_max: f64,
    pub grid_nodes: usize,
    pub grid_grading: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
}

fn set<T>(slot: &mut Option<T>, key: &str, value: T) -> Result<()> {
    if slot.is_some() {
        return Err(Error::Config(format!("duplicate key: {key}")));
    }
    *slot = Some(value);
    Ok(())
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value for {key}: `{value}`")))
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<ConfigFile> {
        let mut n = None;
        let mut f: Option<Expr> = None;
        let mut boundary_value = None;
        let mut t_max = None;
        let mut grid_nodes = None;
        let mut grid_grading = None;
        let mut tol = None;
        let mut max_iter = None;
        let mut damping = None;

        for (idx, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {}: expected key = value, got `{line}`",
                    idx + 1
                )));
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "n" => set(&mut n, key, number::<u32>(key, value)?)?,
                "f" => set(
                    &mut f,
                    key,
                    value
                        .parse()
                        .map_err(|e| Error::Config(format!("invalid value for f: {e}")))?,
                )?,
                "boundary_value" => set(&mut boundary_value, key, number::<f64>(key, value)?)?,
                "t_max" => set(&mut t_max, key, number::<f64>(key, value)?)?,
                "grid_nodes" => set(&mut grid_nodes, key, number::<usize>(key, value)?)?,
                "grid_grading" => set(&mut grid_grading, key, number::<f64>(key, value)?)?,
                "tol" => set(&mut tol, key, number::<f64>(key, value)?)?,
                "max_iter" => set(&mut max_iter, key, number::<usize>(key, value)?)?,
                "damping" => set(&mut damping, key, number::<f64>(key, value)?)?,
                other => return Err(Error::Config(format!("unknown key: {other}"))),
            }
        }

        let missing = |key: &str| Error::Config(format!("missing key: {key}"));
        Ok(ConfigFile {
            n: n.ok_or_else(|| missing("n"))?,
            f: f.ok_or_else(|| missing("f"))?,
            boundary_value: boundary_value.ok_or_else(|| missing("boundary_value"))?,
            t_max: t_max.unwrap_or(0.5),
            grid_nodes: grid_nodes.unwrap_or(Grid::DEFAULT_NODES),
            grid_grading: grid_grading.unwrap_or(Grid::DEFAULT_RATIO),
            tol: tol.unwrap_or(1e-10),
            max_iter: max_iter.unwrap_or(200),
            damping: damping.unwrap_or(1.0),
        })
    }

    pub fn load(path: &Path) -> Result<ConfigFile> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ConfigFile::parse(&text)
    }

    /// The configured problem; range errors (bad damping, bad grid, …)
    /// surface here with the offending parameter named.
    pub fn problem(&self) -> Result<Problem> {
        Problem::new(self.n, self.f.clone(), self.boundary_value)?
            .with_t_max(self.t_max)?
            .with_grid(self.grid_nodes, self.grid_grading)?
            .with_params(SolverParams {
                tolerance: self.tol,
                max_iter: self.max_iter,
                damping: self.damping,
            })
    }
}
