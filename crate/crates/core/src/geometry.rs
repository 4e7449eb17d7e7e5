//! Planar geometry helpers: points, poses and arc-length parameterized polylines.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Position and heading of a rigid body in the global frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose {
    pub const fn new(x: f64, y: f64, heading: f64) -> Self {
        Self { x, y, heading }
    }

    /// Displaces the pose by `lon` along `direction` and `lat` along its left normal.
    pub fn displaced(&self, direction: f64, lon: f64, lat: f64) -> Pose {
        let (s, c) = direction.sin_cos();
        Pose {
            x: self.x + lon * c - lat * s,
            y: self.y + lon * s + lat * c,
            heading: self.heading,
        }
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(std::f64::consts::TAU);
    if r > std::f64::consts::PI {
        r -= std::f64::consts::TAU;
    }
    r
}

/// Result of projecting a point onto a polyline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    /// Arc length of the foot point.
    pub s: f64,
    /// Signed lateral offset, positive to the left of the direction of travel.
    pub lateral: f64,
}

/// Polyline with cached cumulative arc lengths. Queries beyond either end
/// extrapolate along the first or last segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct Polyline {
    points: Vec<Point>,
    cumulative: Vec<f64>,
}

impl TryFrom<Vec<[f64; 2]>> for Polyline {
    type Error = String;

    fn try_from(raw: Vec<[f64; 2]>) -> Result<Self, Self::Error> {
        Polyline::new(raw.into_iter().map(|[x, y]| Point::new(x, y)).collect())
    }
}

impl From<Polyline> for Vec<[f64; 2]> {
    fn from(p: Polyline) -> Self {
        p.points.iter().map(|q| [q.x, q.y]).collect()
    }
}

impl Polyline {
    /// Builds a polyline; needs at least two points and no zero-length segments.
    pub fn new(points: Vec<Point>) -> Result<Self, String> {
        if points.len() < 2 {
            return Err(format!(
                "polyline needs at least 2 points, got {}",
                points.len()
            ));
        }
        if points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err("polyline has non-finite coordinates".into());
        }
        let mut cumulative = Vec::with_capacity(points.len());
        cumulative.push(0.0);
        for w in points.windows(2) {
            let d = w[0].distance(&w[1]);
            if d <= 1e-12 {
                return Err(format!(
                    "zero-length polyline segment at ({}, {})",
                    w[0].x, w[0].y
                ));
            }
            cumulative.push(cumulative.last().unwrap() + d);
        }
        Ok(Self { points, cumulative })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    pub fn start(&self) -> Point {
        self.points[0]
    }

    pub fn end(&self) -> Point {
        *self.points.last().unwrap()
    }

    fn segment_for(&self, s: f64) -> usize {
        let n = self.points.len() - 1;
        if s <= 0.0 {
            return 0;
        }
        match self
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&s).unwrap())
        {
            Ok(k) => k.min(n - 1),
            Err(k) => (k - 1).min(n - 1),
        }
    }

    fn segment_dir(&self, k: usize) -> (f64, f64) {
        let a = self.points[k];
        let b = self.points[k + 1];
        let len = self.cumulative[k + 1] - self.cumulative[k];
        ((b.x - a.x) / len, (b.y - a.y) / len)
    }

    pub fn point_at(&self, s: f64) -> Point {
        let k = self.segment_for(s);
        let (dx, dy) = self.segment_dir(k);
        let a = self.points[k];
        let ds = s - self.cumulative[k];
        Point::new(a.x + dx * ds, a.y + dy * ds)
    }

    pub fn heading_at(&self, s: f64) -> f64 {
        let (dx, dy) = self.segment_dir(self.segment_for(s));
        dy.atan2(dx)
    }

    /// Orthogonal projection onto the closest segment. The first and last
    /// segments are treated as rays so points beyond the ends project outside
    /// `[0, length]`.
    pub fn project(&self, p: Point) -> Projection {
        self.project_range(p, 0, self.points.len() - 1)
    }

    /// Projection restricted to segments overlapping `[s_min, s_max]`.
    pub fn project_window(&self, p: Point, s_min: f64, s_max: f64) -> Projection {
        let first = self.segment_for(s_min);
        let last = self.segment_for(s_max) + 1;
        self.project_range(p, first, last)
    }

    fn project_range(&self, p: Point, first: usize, last: usize) -> Projection {
        let n = self.points.len() - 1;
        let mut best = (
            f64::INFINITY,
            Projection {
                s: 0.0,
                lateral: 0.0,
            },
        );
        for k in first..last.min(n) {
            let a = self.points[k];
            let (dx, dy) = self.segment_dir(k);
            let len = self.cumulative[k + 1] - self.cumulative[k];
            let rx = p.x - a.x;
            let ry = p.y - a.y;
            let mut u = rx * dx + ry * dy;
            if k > 0 {
                u = u.max(0.0);
            }
            if k + 1 < n {
                u = u.min(len);
            }
            let fx = a.x + dx * u;
            let fy = a.y + dy * u;
            let d2 = (p.x - fx).powi(2) + (p.y - fy).powi(2);
            if d2 < best.0 {
                let lateral = dx * ry - dy * rx;
                best = (
                    d2,
                    Projection {
                        s: self.cumulative[k] + u,
                        lateral,
                    },
                );
            }
        }
        best.1
    }

    /// Appends `other`, dropping its first point when it coincides with our end.
    pub fn concat(&self, other: &Polyline) -> Polyline {
        let mut pts = self.points.clone();
        let skip = usize::from(self.end().distance(&other.start()) < 1e-6);
        pts.extend(other.points.iter().skip(skip).copied());
        // Near-duplicates closer than 1e-6 but further than 1e-12 are kept; that
        // still forms a valid polyline.
        Polyline::new(pts).expect("concatenation of valid polylines")
    }

    /// Extends the last segment by `extra` metres.
    pub fn extended(&self, extra: f64) -> Polyline {
        let mut pts = self.points.clone();
        let end = self.point_at(self.length() + extra);
        pts.push(end);
        Polyline::new(pts).expect("extension of a valid polyline")
    }

    /// Distance along the ray `origin + t * dir` (unit `dir`) to the first crossing
    /// with this polyline, if any.
    pub fn ray_hit(&self, origin: Point, dir: (f64, f64)) -> Option<f64> {
        let mut best: Option<f64> = None;
        for w in self.points.windows(2) {
            let ex = w[1].x - w[0].x;
            let ey = w[1].y - w[0].y;
            let denom = dir.0 * ey - dir.1 * ex;
            if denom.abs() < 1e-14 {
                continue;
            }
            let qx = w[0].x - origin.x;
            let qy = w[0].y - origin.y;
            let t = (qx * ey - qy * ex) / denom;
            let u = (qx * dir.1 - qy * dir.0) / denom;
            if t >= 0.0 && (0.0..=1.0).contains(&u) && best.is_none_or(|b| t < b) {
                best = Some(t);
            }
        }
        best
    }

    /// Samples points every `step` metres (plus the end point).
    pub fn resample(&self, step: f64) -> Vec<Point> {
        let n = (self.length() / step).ceil().max(1.0) as usize;
        (0..=n)
            .map(|k| self.point_at(self.length() * k as f64 / n as f64))
            .collect()
    }
}

/// Points on a circular arc from `start_angle` to `end_angle` (radians), spaced
/// at most `step` metres apart.
pub fn arc_points(
    center: Point,
    radius: f64,
    start_angle: f64,
    end_angle: f64,
    step: f64,
) -> Vec<Point> {
    let sweep = end_angle - start_angle;
    let n = ((sweep.abs() * radius) / step).ceil().max(1.0) as usize;
    (0..=n)
        .map(|k| {
            let a = start_angle + sweep * k as f64 / n as f64;
            Point::new(center.x + radius * a.cos(), center.y + radius * a.sin())
        })
        .collect()
}
