//! Cartesian grids over the scene: geometry, footprint rasterization, the
//! augmented occupancy grid of the current scene and predicted occupancy grids.

mod file;
mod occupancy;
mod raster;

pub use file::{GridFile, GridKind, GRID_TEXT_MAGIC};
pub use occupancy::{
    build_aog, build_pog, road_limit_mask, AugmentedOccupancyGrid, PredictedOccupancyGrid,
    AOG_CHANNELS,
};
pub use raster::{rasterize_footprint, rasterize_polyline};

use serde::{Deserialize, Serialize};

use crate::geometry::Point;
use crate::{Error, Result};

/// Grid geometry: `cols` cells of `cell_length` along X and `rows` cells of
/// `cell_width` along Y, starting at `origin`. Cells are indexed row-major,
/// `j * cols + i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub origin: [f64; 2],
    pub cell_length: f64,
    pub cell_width: f64,
    pub cols: usize,
    pub rows: usize,
}

impl GridSpec {
    pub fn new(
        origin: [f64; 2],
        cell_length: f64,
        cell_width: f64,
        cols: usize,
        rows: usize,
    ) -> Result<Self> {
        let spec = Self {
            origin,
            cell_length,
            cell_width,
            cols,
            rows,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.origin.iter().all(|v| v.is_finite());
        if !finite || !(self.cell_length > 0.0 && self.cell_length.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bad grid geometry: {self:?}"
            )));
        }
        if !(self.cell_width > 0.0 && self.cell_width.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bad grid geometry: {self:?}"
            )));
        }
        if self.cols == 0 || self.rows == 0 || self.cols.checked_mul(self.rows).is_none() {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least one cell: {self:?}"
            )));
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.cols * self.rows
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.cols + i
    }

    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index % self.cols, index / self.cols)
    }

    pub fn center(&self, i: usize, j: usize) -> Point {
        Point::new(
            self.origin[0] + (i as f64 + 0.5) * self.cell_length,
            self.origin[1] + (j as f64 + 0.5) * self.cell_width,
        )
    }

    /// Column and row of the cell containing `p`, if inside the grid.
    pub fn cell_of(&self, p: Point) -> Option<(usize, usize)> {
        let fi = ((p.x - self.origin[0]) / self.cell_length).floor();
        let fj = ((p.y - self.origin[1]) / self.cell_width).floor();
        if fi >= 0.0 && fj >= 0.0 && fi < self.cols as f64 && fj < self.rows as f64 {
            Some((fi as usize, fj as usize))
        } else {
            None
        }
    }

    pub(crate) fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}
