//! Planar points, distances and angles about candidate o-space centres.

use crate::error::{Error, Result};
use crate::math;

/// A point in the scene plane, in the same length unit as the persons.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub u: f64,
    pub v: f64,
}

impl Point {
    pub const fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }

    pub fn squared_distance(&self, other: &Point) -> f64 {
        let du = self.u - other.u;
        let dv = self.v - other.v;
        du * du + dv * dv
    }

    /// Arithmetic mean of a non-empty set of points, `None` when empty.
    pub fn mean<'a>(points: impl IntoIterator<Item = &'a Point>) -> Option<Point> {
        let (mut su, mut sv, mut n) = (0.0, 0.0, 0usize);
        for p in points {
            su += p.u;
            sv += p.v;
            n += 1;
        }
        (n > 0).then(|| Point::new(su / n as f64, sv / n as f64))
    }
}

/// Euclidean distance.
pub fn distance(a: Point, b: Point) -> f64 {
    math::sqrt(a.squared_distance(&b))
}

/// Unsigned angle in `[0, π]` between `a` and `b` as seen from `center`.
pub fn angle_about(center: Point, a: Point, b: Point) -> Result<f64> {
    let (au, av) = (a.u - center.u, a.v - center.v);
    let (bu, bv) = (b.u - center.u, b.v - center.v);
    if (au == 0.0 && av == 0.0) || (bu == 0.0 && bv == 0.0) {
        return Err(Error::DegenerateGeometry("point coincides with the centre"));
    }
    let cross = au * bv - av * bu;
    let dot = au * bu + av * bv;
    Ok(math::atan2(math::abs(cross), dot))
}
