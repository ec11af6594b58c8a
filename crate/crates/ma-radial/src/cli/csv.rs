//! Solution profiles as CSV.
//!
//! One row per grid node, shortest round-trip decimals throughout, so a
//! file read back reproduces the solve's arrays bitwise. Cells that only
//! exist as limits are left empty: g2 and g3 on the center row, the
//! residual on the center and boundary rows.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::quadrature::SampledFunction;
use crate::solver::{nonneg_stencil_interpolant, Solution};
use crate::verify;

pub const CSV_HEADER: &str = "t,r,g,g1,g2,g3,phi,kappa,residual";

/// The columns of a solution CSV. NaN marks cells that are empty in the
/// file; the column layouts fix where those may appear.
#[derive(Debug, Clone)]
pub struct SolutionTable {
    pub t: Vec<f64>,
    pub r: Vec<f64>,
    pub g: Vec<f64>,
    pub g1: Vec<f64>,
    pub g2: Vec<f64>,
    pub g3: Vec<f64>,
    pub phi: Vec<f64>,
    pub kappa: Vec<f64>,
    pub residual: Vec<f64>,
}

/// |det D²u − φ| / max(1, |φ|) at one node, from the stored columns
/// alone, so a reader of the file can reproduce the column exactly.
fn node_residual(n: u32, t: f64, g1: f64, g2: f64, phi: f64) -> f64 {
    let det = (g2 * 2.0 * t + g1) * g1.powi(n as i32 - 1);
    (det - phi).abs() / 1.0f64.max(phi.abs())
}

pub fn table_from_solution(sol: &Solution) -> SolutionTable {
    let t = sol.grid.nodes().to_vec();
    let nn = t.len();
    let n = sol.problem.n();
    let g1 = sol.g1.values().to_vec();
    let g2 = sol.g2.values().to_vec();
    let phi = sol.phi.values().to_vec();
    let mut residual = vec![f64::NAN; nn];
    for i in 1..nn.saturating_sub(1) {
        residual[i] = node_residual(n, t[i], g1[i], g2[i], phi[i]);
    }
    SolutionTable {
        r: t.iter().map(|&t| (2.0 * t).sqrt()).collect(),
        t,
        g: sol.g.values().to_vec(),
        g1,
        g2,
        g3: sol.g3.values().to_vec(),
        phi,
        kappa: sol.kappa_vals.values().to_vec(),
        residual,
    }
}

pub fn render_csv(table: &SolutionTable) -> String {
    let mut out = String::with_capacity(table.t.len() * 96);
    out.push_str(CSV_HEADER);
    out.push('\n');
    let cell = |v: f64| {
        if v.is_nan() {
            String::new()
        } else {
            v.to_string()
        }
    };
    for i in 0..table.t.len() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            table.t[i],
            table.r[i],
            table.g[i],
            table.g1[i],
            cell(table.g2[i]),
            cell(table.g3[i]),
            table.phi[i],
            table.kappa[i],
            cell(table.residual[i]),
        ));
    }
    out
}

pub fn parse_csv(text: &str) -> Result<SolutionTable> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, head)) if head.trim_end() == CSV_HEADER => {}
        _ => {
            return Err(Error::SolutionFile(format!(
                "first line must be the header `{CSV_HEADER}`"
            )))
        }
    }
    let mut table = SolutionTable {
        t: Vec::new(),
        r: Vec::new(),
        g: Vec::new(),
        g1: Vec::new(),
        g2: Vec::new(),
        g3: Vec::new(),
        phi: Vec::new(),
        kappa: Vec::new(),
        residual: Vec::new(),
    };
    for (idx, raw) in lines {
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::SolutionFile(format!(
                "line {}: expected 9 fields, got {}",
                idx + 1,
                fields.len()
            )));
        }
        let mut parsed = [0.0f64; 9];
        for (col, (slot, field)) in parsed.iter_mut().zip(&fields).enumerate() {
            *slot = if field.is_empty() {
                f64::NAN
            } else {
                field.parse().map_err(|_| {
                    Error::SolutionFile(format!(
                        "line {}: bad number `{field}` in column {}",
                        idx + 1,
                        col + 1
                    ))
                })?
            };
        }
        table.t.push(parsed[0]);
        table.r.push(parsed[1]);
        table.g.push(parsed[2]);
        table.g1.push(parsed[3]);
        table.g2.push(parsed[4]);
        table.g3.push(parsed[5]);
        table.phi.push(parsed[6]);
        table.kappa.push(parsed[7]);
        table.residual.push(parsed[8]);
    }
    let nn = table.t.len();
    if nn < 4 {
        return Err(Error::SolutionFile(format!("only {nn} data rows")));
    }
    for i in 0..nn {
        let center = i == 0;
        let boundary = i + 1 == nn;
        if table.g2[i].is_nan() != center || table.g3[i].is_nan() != center {
            return Err(Error::SolutionFile(format!(
                "row {i}: g2/g3 must be empty exactly on the center row"
            )));
        }
        if table.residual[i].is_nan() != (center || boundary) {
            return Err(Error::SolutionFile(format!(
                "row {i}: residual must be empty exactly on the center and boundary rows"
            )));
        }
        for v in [table.t[i], table.r[i], table.g[i], table.g1[i], table.phi[i], table.kappa[i]] {
            if !v.is_finite() {
                return Err(Error::SolutionFile(format!("row {i}: non-finite value")));
            }
        }
    }
    Ok(table)
}

fn same_bits(a: f64, b: f64) -> bool {
    a.to_bits() == b.to_bits()
}

/// Rebuild the [`Solution`] a table came from, checking on the way that
/// the table really belongs to this problem: the t column must equal the
/// configured grid bitwise, and the r, κ, and residual columns must equal
/// what the other columns imply. The interpolants are reconstructed with
/// the same rules the solver uses, so the result matches the original
/// solve bitwise everywhere except the iteration counters, which a file
/// does not carry.
pub fn rebuild_solution(p: &Problem, table: &SolutionTable) -> Result<Solution> {
    let grid = Arc::new(p.grid());
    let nodes = grid.nodes();
    let nn = nodes.len();
    if table.t.len() != nn {
        return Err(Error::SolutionFile(format!(
            "{} rows but the configured grid has {nn} nodes",
            table.t.len()
        )));
    }
    if !same_bits(table.g[nn - 1], p.boundary_value()) {
        return Err(Error::SolutionFile(format!(
            "boundary row has g = {} but the config pins {}",
            table.g[nn - 1],
            p.boundary_value()
        )));
    }
    for i in 0..nn {
        if !same_bits(table.t[i], nodes[i]) {
            return Err(Error::SolutionFile(format!(
                "t column diverges from the configured grid at row {i} ({} vs {})",
                table.t[i], nodes[i]
            )));
        }
        if !same_bits(table.r[i], (2.0 * table.t[i]).sqrt()) {
            return Err(Error::SolutionFile(format!(
                "row {i}: r = {} is not sqrt(2t)",
                table.r[i]
            )));
        }
        if !same_bits(table.kappa[i], p.kappa_at(table.t[i])?) {
            return Err(Error::SolutionFile(format!(
                "kappa column does not match f(t, 0, 0) at row {i}"
            )));
        }
        let expected = if i == 0 || i + 1 == nn {
            f64::NAN
        } else {
            node_residual(p.n(), table.t[i], table.g1[i], table.g2[i], table.phi[i])
        };
        if !same_bits(table.residual[i], expected) {
            return Err(Error::SolutionFile(format!(
                "residual column does not match the other columns at row {i}"
            )));
        }
    }

    let g = SampledFunction::with_slopes(grid.clone(), table.g.clone(), table.g1.clone())?;
    let g1 = SampledFunction::new(grid.clone(), table.g1.clone())?;
    let g2 = SampledFunction::new(grid.clone(), table.g2.clone())?;
    let g3 = SampledFunction::new(grid.clone(), table.g3.clone())?;
    let phi = nonneg_stencil_interpolant(&grid, &table.phi)?;
    let kappa_vals = SampledFunction::new(grid.clone(), table.kappa.clone())?;
    let mut q = vec![0.0; nn];
    for i in 1..nn {
        q[i] = 2.0 * nodes[i] * table.g2[i];
    }
    let q = SampledFunction::new(grid.clone(), q)?;
    let (residual_max, _) = verify::residual_profile(
        p.f(),
        p.n(),
        &g,
        &g1,
        &g2,
        &verify::default_check_radii(grid.t_max()),
    )?;
    Ok(Solution {
        problem: p.clone(),
        c_u: table.g[0],
        g,
        g1,
        g2,
        g3,
        phi,
        kappa_vals,
        q,
        iterations: 0,
        final_update: 0.0,
        residual_max,
        grid,
    })
}
