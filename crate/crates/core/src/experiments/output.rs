//! Plain-text emitters: CSV tables and gnuplot-style snapshot files.

use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::fem::{CoefficientVector, FeSpace};
use crate::imex::TimeSeries;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// `t,mass,energy,linf`
pub fn series_csv(series: &TimeSeries) -> String {
    let mut s = String::from("t,mass,energy,linf\n");
    for k in 0..series.len() {
        let cells = [series.times[k], series.mass[k], series.energy[k], series.linf[k]].map(fmt_real);
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// One row per DOF: `x |u| Re(u) Im(u)` in 1D, `x y |u| Re(u) Im(u)` in 2D.
/// 2D rows are grouped by `y` with blank lines between groups, the layout
/// gnuplot's `splot` expects for grid data.
pub fn snapshot(space: &FeSpace, u: &CoefficientVector) -> String {
    let d = space.dim().as_usize();
    let mut order: Vec<usize> = (0..space.n_dofs()).collect();
    let pts = space.dof_points();
    order.sort_by(|&a, &b| pts[a][1].total_cmp(&pts[b][1]).then(pts[a][0].total_cmp(&pts[b][0])));
    let mut s = String::new();
    let mut last_y = None;
    for i in order {
        let p = pts[i];
        if d == 2 {
            if last_y.is_some_and(|y| y != p[1]) {
                s.push('\n');
            }
            last_y = Some(p[1]);
        }
        let v = u.values()[i];
        let mut cells: Vec<String> = p[..d].iter().map(|&c| fmt_real(c)).collect();
        cells.extend([v.norm(), v.re, v.im].map(fmt_real));
        s.push_str(&cells.join(" "));
        s.push('\n');
    }
    s
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    Ok(())
}
