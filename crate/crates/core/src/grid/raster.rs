use super::GridSpec;
use crate::geometry::{Polyline, Pose};
use crate::scenario::Footprint;

const EDGE_TOL: f64 = 1e-9;

/// Whether a point exactly on an edge with outward normal `(nx, ny)` belongs to
/// the rectangle. Only left edges (and bottom edges when vertical) are kept, so
/// two rectangles sharing an edge never both claim a point on it and the rule
/// depends on the world-frame outline alone, not on which way the object faces.
fn owns_edge(nx: f64, ny: f64) -> bool {
    nx < -EDGE_TOL || (nx.abs() <= EDGE_TOL && ny < 0.0)
}

/// Row-major indices (ascending) of the cells whose centres lie inside the
/// oriented rectangle. The cell holding the pose itself is always included when
/// it lies in the grid.
pub fn rasterize_footprint(pose: &Pose, footprint: &Footprint, spec: &GridSpec) -> Vec<usize> {
    let (s, c) = pose.heading.sin_cos();
    let a = 0.5 * footprint.length;
    let b = 0.5 * footprint.width;
    let ex = a * c.abs() + b * s.abs();
    let ey = a * s.abs() + b * c.abs();

    let col = |x: f64| ((x - spec.origin[0]) / spec.cell_length - 0.5).floor();
    let row = |y: f64| ((y - spec.origin[1]) / spec.cell_width - 0.5).floor();
    let i0 = (col(pose.x - ex) as i64).max(0);
    let i1 = (col(pose.x + ex) as i64 + 1).min(spec.cols as i64 - 1);
    let j0 = (row(pose.y - ey) as i64).max(0);
    let j1 = (row(pose.y + ey) as i64 + 1).min(spec.rows as i64 - 1);

    let tol_a = EDGE_TOL * a.max(1.0);
    let tol_b = EDGE_TOL * b.max(1.0);
    let mut cells = Vec::new();
    for j in j0..=j1 {
        for i in i0..=i1 {
            let p = spec.center(i as usize, j as usize);
            let (dx, dy) = (p.x - pose.x, p.y - pose.y);
            let lon = dx * c + dy * s;
            let lat = -dx * s + dy * c;
            let inside_lon = if (lon.abs() - a).abs() <= tol_a {
                let sign = lon.signum();
                owns_edge(sign * c, sign * s)
            } else {
                lon.abs() < a
            };
            if !inside_lon {
                continue;
            }
            let inside_lat = if (lat.abs() - b).abs() <= tol_b {
                let sign = lat.signum();
                owns_edge(-sign * s, sign * c)
            } else {
                lat.abs() < b
            };
            if inside_lat {
                cells.push(spec.index(i as usize, j as usize));
            }
        }
    }
    if let Some((i, j)) = spec.cell_of(crate::geometry::Point::new(pose.x, pose.y)) {
        let k = spec.index(i, j);
        if let Err(pos) = cells.binary_search(&k) {
            cells.insert(pos, k);
        }
    }
    cells
}

/// Ascending indices of the cells a polyline passes through, found by sampling
/// it at a quarter of the smaller cell side.
pub fn rasterize_polyline(line: &Polyline, spec: &GridSpec) -> Vec<usize> {
    let step = 0.25 * spec.cell_length.min(spec.cell_width);
    let mut cells: Vec<usize> = line
        .resample(step)
        .into_iter()
        .filter_map(|p| spec.cell_of(p).map(|(i, j)| spec.index(i, j)))
        .collect();
    cells.sort_unstable();
    cells.dedup();
    cells
}
