//! Convex hulls of eigenvalue clouds and their distance from the origin.
//!
//! For a unitary the numerical range is the convex hull of its spectrum, so
//! the minimum overlap `min |<psi|X|psi>|` is the distance from 0 to that
//! polygon.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Points closer than this (in each coordinate) are merged before hulling.
pub const DEDUP_TOLERANCE: f64 = 1e-9;
/// Cross products at or below this are treated as collinear / on-boundary.
pub const COLLINEAR_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarPoint {
    pub x: f64,
    pub y: f64,
}

impl PlanarPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }

    fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y
    }
}

impl From<Complex64> for PlanarPoint {
    fn from(z: Complex64) -> Self {
        Self::new(z.re, z.im)
    }
}

/// `(a - o) x (b - o)`; positive for a counter-clockwise turn.
fn cross(o: PlanarPoint, a: PlanarPoint, b: PlanarPoint) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn dedup_sorted(points: &[PlanarPoint]) -> Vec<PlanarPoint> {
    let mut kept: Vec<PlanarPoint> = Vec::with_capacity(points.len());
    for &p in points {
        let duplicate = kept
            .iter()
            .rev()
            .take_while(|q| q.x >= p.x - DEDUP_TOLERANCE)
            .any(|q| (q.x - p.x).abs() <= DEDUP_TOLERANCE && (q.y - p.y).abs() <= DEDUP_TOLERANCE);
        if !duplicate {
            kept.push(p);
        }
    }
    kept
}

/// Monotone-chain convex hull, counter-clockwise, collinear points removed.
///
/// Degenerate inputs give one vertex (all points coincide) or two (all
/// points collinear).
pub fn convex_hull(points: &[PlanarPoint]) -> Result<Vec<PlanarPoint>> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(p) = points.iter().find(|p| !p.x.is_finite() || !p.y.is_finite()) {
        return Err(Error::Precondition(format!("non-finite point ({}, {})", p.x, p.y)));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    let pts = dedup_sorted(&sorted);
    if pts.len() < 3 {
        return Ok(pts);
    }

    let mut hull: Vec<PlanarPoint> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= COLLINEAR_TOLERANCE {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= COLLINEAR_TOLERANCE
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    Ok(hull)
}

/// Distance from the origin to the segment `[a, b]`.
pub fn distance_origin_to_segment(a: PlanarPoint, b: PlanarPoint) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return a.norm();
    }
    let t = (-a.dot(ab) / len2).clamp(0.0, 1.0);
    PlanarPoint::new(a.x + t * ab.x, a.y + t * ab.y).norm()
}

/// Distance from the origin to a hull produced by [`convex_hull`]; zero when
/// the origin is inside or on the boundary.
pub fn distance_origin_to_hull(hull: &[PlanarPoint]) -> f64 {
    match hull {
        [] => f64::INFINITY,
        [p] => p.norm(),
        [a, b] => distance_origin_to_segment(*a, *b),
        _ => {
            let origin = PlanarPoint::new(0.0, 0.0);
            let edges = || hull.iter().zip(hull.iter().cycle().skip(1));
            if edges().all(|(a, b)| cross(*a, *b, origin) >= -COLLINEAR_TOLERANCE) {
                return 0.0;
            }
            edges().map(|(a, b)| distance_origin_to_segment(*a, *b)).fold(f64::INFINITY, f64::min)
        }
    }
}

/// `min_{z in conv(points)} |z|`.
pub fn distance_origin_to_convex_hull(points: &[PlanarPoint]) -> Result<f64> {
    Ok(distance_origin_to_hull(&convex_hull(points)?))
}

/// Length of the shortest arc of the unit circle containing all the given
/// angles, i.e. `2 pi` minus the largest circular gap between them.
///
/// For points on the unit circle spanning an arc `L < pi`, the distance from
/// the origin to their hull is `cos(L/2)`; working with `L` keeps
/// `sin(L/2)` accurate when the points cluster near one direction.
pub fn covering_arc_length(angles: &[f64]) -> Result<f64> {
    if angles.is_empty() {
        return Err(Error::EmptyInput);
    }
    if angles.iter().any(|a| !a.is_finite()) {
        return Err(Error::Precondition("non-finite angle".into()));
    }
    use std::f64::consts::{PI, TAU};
    // Keep angles in (-pi, pi] as given so clusters around 0 lose nothing.
    let mut sorted: Vec<f64> = angles
        .iter()
        .map(|&a| if (-PI..=PI).contains(&a) { a } else { a.sin().atan2(a.cos()) })
        .collect();
    sorted.sort_by(f64::total_cmp);
    let (first, last) = (sorted[0], sorted[sorted.len() - 1]);
    let wrap = first + TAU - last;
    let inner = sorted.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if wrap >= inner {
        Ok(last - first)
    } else {
        Ok((TAU - inner).max(0.0))
    }
}
