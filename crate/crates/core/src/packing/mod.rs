//! Sierpinski packings and the geometric functionals on them: diameters,
//! set distances, Hausdorff and relative distance, intersection counting.
//!
//! Continua are restricted to points, spherical disks, and simple chart
//! polygons. These cover every experiment in the lab while keeping the
//! intersection predicates exact.

mod fatness;
mod generate;

pub use fatness::{estimate_fatness, FatnessConfig, FatnessEstimate, MobiusRegion, Region};
pub use generate::{generate, GenerateKind};

use crate::error::{Error, Result};
use crate::sphere::{
    chart_radius_to_spherical, spherical_distance, spherical_radius_to_chart, MobiusTransform,
    SpherePoint, PI,
};
use num_complex::Complex64;

/// Which metric a set functional is computed in. The spherical metric is
/// the default; the chart metric exists for small-scale plane experiments
/// where exact Euclidean values are wanted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Spherical,
    Chart,
}

fn point_distance(m: Metric, a: Complex64, b: Complex64) -> f64 {
    match m {
        Metric::Spherical => spherical_distance(SpherePoint::Finite(a), SpherePoint::Finite(b)),
        Metric::Chart => (a - b).norm(),
    }
}

/// One peripheral continuum of a packing.
#[derive(Clone, Debug)]
pub struct PeripheralContinuum {
    pub id: usize,
    pub shape: Shape,
}

#[derive(Clone, Debug)]
pub enum Shape {
    Point(Complex64),
    /// Geodesic disk: chart center and spherical radius in (0, pi).
    Disk { center: Complex64, radius: f64 },
    /// Simple, positively oriented chart polygon.
    Polygon(Vec<Complex64>),
}

impl PeripheralContinuum {
    pub fn point(id: usize, p: Complex64) -> Self {
        PeripheralContinuum {
            id,
            shape: Shape::Point(p),
        }
    }

    pub fn disk(id: usize, center: Complex64, spherical_radius: f64) -> Result<Self> {
        if !(0.0..PI).contains(&spherical_radius) || spherical_radius == 0.0 {
            return Err(Error::Geometry(format!(
                "disk radius {spherical_radius} outside (0, pi)"
            )));
        }
        Ok(PeripheralContinuum {
            id,
            shape: Shape::Disk {
                center,
                radius: spherical_radius,
            },
        })
    }

    /// Disk given by its chart circle (center, chart radius).
    pub fn disk_chart(id: usize, center: Complex64, chart_radius: f64) -> Result<Self> {
        // spherical center lies on the ray through the chart center
        let near = center * (1.0 - chart_radius / center.norm().max(1e-300));
        let far = center * (1.0 + chart_radius / center.norm().max(1e-300));
        let (near, far) = if center.norm() < 1e-12 {
            (
                Complex64::new(-chart_radius, 0.0),
                Complex64::new(chart_radius, 0.0),
            )
        } else {
            (near, far)
        };
        let d = spherical_distance(SpherePoint::Finite(near), SpherePoint::Finite(far));
        // geodesic midpoint of near/far along the ray
        let t_near = chart_radius_to_spherical(near.norm()) * near_sign(center, near);
        let t_far = chart_radius_to_spherical(far.norm()) * near_sign(center, far);
        let t_mid = 0.5 * (t_near + t_far);
        let dir = if center.norm() < 1e-12 {
            Complex64::new(1.0, 0.0)
        } else {
            center / center.norm()
        };
        let mid_chart = dir * spherical_radius_to_chart(t_mid.abs()) * t_mid.signum();
        Self::disk(id, mid_chart, d / 2.0)
    }

    pub fn polygon(id: usize, vertices: Vec<Complex64>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Geometry("polygon needs at least 3 vertices".into()));
        }
        if !polygon_is_simple(&vertices) {
            return Err(Error::Geometry("polygon is self-intersecting".into()));
        }
        let vertices = if polygon_signed_area(&vertices) < 0.0 {
            vertices.into_iter().rev().collect()
        } else {
            vertices
        };
        Ok(PeripheralContinuum {
            id,
            shape: Shape::Polygon(vertices),
        })
    }

    pub fn square(id: usize, lower_left: Complex64, side: f64) -> Result<Self> {
        Self::polygon(
            id,
            vec![
                lower_left,
                lower_left + Complex64::new(side, 0.0),
                lower_left + Complex64::new(side, side),
                lower_left + Complex64::new(0.0, side),
            ],
        )
    }

    pub fn is_point(&self) -> bool {
        matches!(self.shape, Shape::Point(_))
    }

    /// Chart circle (center, radius) of a disk continuum.
    pub fn chart_circle(&self) -> Option<(Complex64, f64)> {
        match &self.shape {
            Shape::Disk { center, radius } => {
                let rot = MobiusTransform::rotation_to_origin(SpherePoint::Finite(*center));
                let t = spherical_radius_to_chart(*radius);
                rot.inverse().map_circle(Complex64::new(0.0, 0.0), t).ok()
            }
            _ => None,
        }
    }

    /// Closed-set membership.
    pub fn contains(&self, p: SpherePoint) -> bool {
        match (&self.shape, p) {
            (Shape::Point(q), SpherePoint::Finite(z)) => (z - q).norm() == 0.0,
            (Shape::Point(_), SpherePoint::Infinity) => false,
            (Shape::Disk { center, radius }, p) => {
                spherical_distance(SpherePoint::Finite(*center), p) <= *radius
            }
            (Shape::Polygon(vs), SpherePoint::Finite(z)) => {
                polygon_contains(vs, z) || polygon_boundary_chart_distance(vs, z) == 0.0
            }
            (Shape::Polygon(_), SpherePoint::Infinity) => false,
        }
    }

    /// `n` points on the boundary (all of them for a point).
    pub fn boundary_samples(&self, n: usize) -> Vec<Complex64> {
        match &self.shape {
            Shape::Point(p) => vec![*p],
            Shape::Disk { center, radius } => {
                let rot = MobiusTransform::rotation_to_origin(SpherePoint::Finite(*center));
                let inv = rot.inverse();
                let t = spherical_radius_to_chart(*radius);
                (0..n)
                    .map(|k| {
                        let th = crate::sphere::TAU * k as f64 / n as f64;
                        inv.apply_chart(Complex64::from_polar(t, th))
                    })
                    .collect()
            }
            Shape::Polygon(vs) => sample_polygon_boundary(vs, n),
        }
    }

    /// Chart bounding box (x0, y0, x1, y1) with a small safety margin.
    pub fn chart_bbox(&self) -> (f64, f64, f64, f64) {
        let pts = match &self.shape {
            Shape::Point(p) => vec![*p],
            Shape::Polygon(vs) => vs.clone(),
            Shape::Disk { .. } => self.boundary_samples(64),
        };
        let mut x0 = f64::INFINITY;
        let mut y0 = f64::INFINITY;
        let mut x1 = f64::NEG_INFINITY;
        let mut y1 = f64::NEG_INFINITY;
        for p in &pts {
            x0 = x0.min(p.re);
            y0 = y0.min(p.im);
            x1 = x1.max(p.re);
            y1 = y1.max(p.im);
        }
        let m = 1e-9 + 1e-4 * ((x1 - x0).abs() + (y1 - y0).abs());
        (x0 - m, y0 - m, x1 + m, y1 + m)
    }
}

fn near_sign(center: Complex64, p: Complex64) -> f64 {
    // sign of p relative to the ray direction through center
    if center.norm() < 1e-12 {
        if p.re >= 0.0 {
            1.0
        } else {
            -1.0
        }
    } else if (p / center).re >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

// -------------------------------------------------------------------------
// Diameters
// -------------------------------------------------------------------------

/// Diameter of a continuum. Zero exactly for points.
pub fn diameter(k: &PeripheralContinuum, metric: Metric) -> f64 {
    match &k.shape {
        Shape::Point(_) => 0.0,
        Shape::Disk { radius, .. } => match metric {
            Metric::Spherical => (2.0 * radius).min(PI),
            Metric::Chart => {
                let (_, r) = k.chart_circle().expect("disk chart circle");
                2.0 * r
            }
        },
        Shape::Polygon(vs) => match metric {
            Metric::Chart => max_pairwise(vs, Metric::Chart),
            Metric::Spherical => {
                // vertices first, then edge refinement until stable
                let mut best = max_pairwise(vs, Metric::Spherical);
                let mut n = vs.len() * 8;
                for _ in 0..8 {
                    let samples = sample_polygon_boundary(vs, n);
                    let cur = max_pairwise(&samples, Metric::Spherical);
                    if (cur - best).abs() < 1e-9 {
                        return cur.max(best);
                    }
                    best = best.max(cur);
                    n *= 2;
                }
                best
            }
        },
    }
}

fn max_pairwise(pts: &[Complex64], metric: Metric) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.max(point_distance(metric, pts[i], pts[j]));
        }
    }
    best
}

/// sqrt of the sum of squared diameters of all continua.
pub fn l2_diameters(p: &Packing, metric: Metric) -> f64 {
    p.continua
        .iter()
        .map(|k| {
            let d = diameter(k, metric);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

// -------------------------------------------------------------------------
// Point-to-set and set-to-set distances
// -------------------------------------------------------------------------

fn polygon_boundary_chart_distance(vs: &[Complex64], p: Complex64) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..vs.len() {
        let a = vs[i];
        let b = vs[(i + 1) % vs.len()];
        best = best.min(point_segment_chart_distance(p, a, b));
    }
    best
}

fn point_segment_chart_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let denom = ab.norm_sqr();
    if denom == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).re * ab.re + (p - a).im * ab.im) / denom;
    let t = t.clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

fn point_segment_distance(metric: Metric, p: Complex64, a: Complex64, b: Complex64) -> f64 {
    match metric {
        Metric::Chart => point_segment_chart_distance(p, a, b),
        Metric::Spherical => {
            // coarse scan then ternary refinement in the chart parameter
            let f = |t: f64| point_distance(metric, p, a + (b - a) * t);
            let mut lo = 0.0;
            let mut hi = 1.0;
            let mut best_t = 0.0;
            let mut best = f64::INFINITY;
            for k in 0..=16 {
                let t = k as f64 / 16.0;
                let d = f(t);
                if d < best {
                    best = d;
                    best_t = t;
                }
            }
            lo = (best_t - 1.0 / 16.0).max(0.0);
            hi = (best_t + 1.0 / 16.0).min(1.0);
            for _ in 0..60 {
                let m1 = lo + (hi - lo) / 3.0;
                let m2 = hi - (hi - lo) / 3.0;
                if f(m1) <= f(m2) {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
            f(0.5 * (lo + hi)).min(best)
        }
    }
}

/// Distance from a point to a closed continuum (0 inside).
pub fn distance_to(k: &PeripheralContinuum, p: SpherePoint, metric: Metric) -> f64 {
    match (&k.shape, p) {
        (Shape::Point(q), p) => match metric {
            Metric::Spherical => spherical_distance(SpherePoint::Finite(*q), p),
            Metric::Chart => match p {
                SpherePoint::Finite(z) => (z - q).norm(),
                SpherePoint::Infinity => f64::INFINITY,
            },
        },
        (Shape::Disk { center, radius }, p) => match metric {
            Metric::Spherical => {
                (spherical_distance(SpherePoint::Finite(*center), p) - radius).max(0.0)
            }
            Metric::Chart => {
                let (c, r) = k.chart_circle().expect("disk chart circle");
                match p {
                    SpherePoint::Finite(z) => ((z - c).norm() - r).max(0.0),
                    SpherePoint::Infinity => f64::INFINITY,
                }
            }
        },
        (Shape::Polygon(vs), SpherePoint::Finite(z)) => {
            if polygon_contains(vs, z) {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for i in 0..vs.len() {
                let a = vs[i];
                let b = vs[(i + 1) % vs.len()];
                best = best.min(point_segment_distance(metric, z, a, b));
            }
            best
        }
        (Shape::Polygon(vs), SpherePoint::Infinity) => match metric {
            Metric::Chart => f64::INFINITY,
            Metric::Spherical => vs
                .iter()
                .map(|v| spherical_distance(SpherePoint::Finite(*v), SpherePoint::Infinity))
                .fold(f64::INFINITY, f64::min),
        },
    }
}

/// Exact-where-possible intersection predicate for two continua.
pub fn intersects(a: &PeripheralContinuum, b: &PeripheralContinuum) -> bool {
    use Shape::*;
    match (&a.shape, &b.shape) {
        (Disk { center, radius }, Disk { center: c2, radius: r2 }) => {
            spherical_distance(SpherePoint::Finite(*center), SpherePoint::Finite(*c2))
                <= radius + r2
        }
        (Point(p), _) => b.contains(SpherePoint::Finite(*p)),
        (_, Point(p)) => a.contains(SpherePoint::Finite(*p)),
        (Polygon(v1), Polygon(v2)) => {
            for i in 0..v1.len() {
                let a1 = v1[i];
                let a2 = v1[(i + 1) % v1.len()];
                for j in 0..v2.len() {
                    if segments_intersect(a1, a2, v2[j], v2[(j + 1) % v2.len()]) {
                        return true;
                    }
                }
            }
            polygon_contains(v2, v1[0]) || polygon_contains(v1, v2[0])
        }
        (Disk { .. }, Polygon(_)) => disk_polygon_intersect(a, b),
        (Polygon(_), Disk { .. }) => disk_polygon_intersect(b, a),
    }
}

fn disk_polygon_intersect(disk: &PeripheralContinuum, poly: &PeripheralContinuum) -> bool {
    let (center, radius) = match &disk.shape {
        Shape::Disk { center, radius } => (*center, *radius),
        _ => unreachable!(),
    };
    if poly.contains(SpherePoint::Finite(center)) {
        return true;
    }
    distance_to(poly, SpherePoint::Finite(center), Metric::Spherical) <= radius
}

/// Minimal distance between two continua (0 if they intersect).
pub fn set_distance(a: &PeripheralContinuum, b: &PeripheralContinuum, metric: Metric) -> f64 {
    if intersects(a, b) {
        return 0.0;
    }
    let mut n = 32;
    let mut best = f64::INFINITY;
    for _ in 0..8 {
        let sa = a.boundary_samples(n);
        let sb = b.boundary_samples(n);
        let mut cur = f64::INFINITY;
        for p in &sa {
            cur = cur.min(distance_to(b, SpherePoint::Finite(*p), metric));
        }
        for p in &sb {
            cur = cur.min(distance_to(a, SpherePoint::Finite(*p), metric));
        }
        if (best - cur).abs() < 1e-7 && best.is_finite() {
            return cur.min(best);
        }
        best = best.min(cur);
        n *= 2;
    }
    best
}

/// Hausdorff distance between two closed continua, by adaptive boundary
/// discretization refined until the value moves less than 1e-7.
pub fn hausdorff_distance(a: &PeripheralContinuum, b: &PeripheralContinuum, metric: Metric) -> f64 {
    let mut n = 64;
    let mut prev = f64::NAN;
    for _ in 0..7 {
        let sa = a.boundary_samples(n);
        let sb = b.boundary_samples(n);
        let d_ab = sa
            .iter()
            .map(|p| distance_to(b, SpherePoint::Finite(*p), metric))
            .fold(0.0, f64::max);
        let d_ba = sb
            .iter()
            .map(|p| distance_to(a, SpherePoint::Finite(*p), metric))
            .fold(0.0, f64::max);
        let cur = d_ab.max(d_ba);
        if !prev.is_nan() && (cur - prev).abs() < 1e-7 {
            return cur;
        }
        prev = cur;
        n *= 2;
    }
    prev
}

/// Relative distance dist(E, F) / min(diam E, diam F).
pub fn relative_distance(
    e: &PeripheralContinuum,
    f: &PeripheralContinuum,
    metric: Metric,
) -> Result<f64> {
    let de = diameter(e, metric);
    let df = diameter(f, metric);
    if de == 0.0 || df == 0.0 {
        return Err(Error::Geometry("relative distance needs non-degenerate sets".into()));
    }
    Ok(set_distance(e, f, metric) / de.min(df))
}

/// Continuum radii s in (0, r) whose circle S(x, s) meets the connected
/// set K: an interval, so its measure is max - min of the hit range.
pub fn radial_hit_measure(k: &PeripheralContinuum, x: SpherePoint, r: f64) -> f64 {
    let samples = k.boundary_samples(512);
    let mut dmin = f64::INFINITY;
    let mut dmax: f64 = 0.0;
    for p in &samples {
        let d = spherical_distance(x, SpherePoint::Finite(*p));
        dmin = dmin.min(d);
        dmax = dmax.max(d);
    }
    if k.contains(x) {
        dmin = 0.0;
    }
    if dmin >= r {
        return 0.0;
    }
    dmax.min(r) - dmin
}

// -------------------------------------------------------------------------
// Packing
// -------------------------------------------------------------------------

/// Ordered family of disjoint continua.
#[derive(Clone, Debug)]
pub struct Packing {
    pub label: String,
    pub continua: Vec<PeripheralContinuum>,
}

impl Packing {
    pub fn new(label: impl Into<String>, continua: Vec<PeripheralContinuum>) -> Result<Self> {
        let p = Packing {
            label: label.into(),
            continua,
        };
        p.validate(1)?;
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.continua.len()
    }

    pub fn is_empty(&self) -> bool {
        self.continua.is_empty()
    }

    /// Packing restricted to its first `n` continua.
    pub fn truncate(&self, n: usize) -> Packing {
        Packing {
            label: format!("{}[..{}]", self.label, n),
            continua: self.continua[..n.min(self.continua.len())].to_vec(),
        }
    }

    /// Disjointness of closures and the nonincreasing-diameter tail.
    pub fn validate(&self, monotone_from: usize) -> Result<()> {
        for i in 0..self.continua.len() {
            for j in i + 1..self.continua.len() {
                if intersects(&self.continua[i], &self.continua[j]) {
                    return Err(Error::Geometry(format!(
                        "continua {} and {} are not disjoint",
                        self.continua[i].id, self.continua[j].id
                    )));
                }
            }
        }
        let diams: Vec<f64> = self
            .continua
            .iter()
            .map(|k| diameter(k, Metric::Spherical))
            .collect();
        for w in diams.windows(2).skip(monotone_from.saturating_sub(1)) {
            if w[1] > w[0] + 1e-12 {
                return Err(Error::Geometry(
                    "diameters must be nonincreasing beyond the configured index".into(),
                ));
            }
        }
        Ok(())
    }

    /// Minimum pairwise distance between continua.
    pub fn min_pairwise_distance(&self, metric: Metric) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.continua.len() {
            for j in i + 1..self.continua.len() {
                best = best.min(set_distance(&self.continua[i], &self.continua[j], metric));
            }
        }
        best
    }
}

/// Number of continua meeting `e` whose diameter is at least `a * diam(e)`.
pub fn count_large_intersecting(
    p: &Packing,
    e: &PeripheralContinuum,
    a: f64,
    metric: Metric,
) -> usize {
    let de = diameter(e, metric);
    p.continua
        .iter()
        .filter(|k| diameter(k, metric) >= a * de && intersects(k, e))
        .count()
}

// -------------------------------------------------------------------------
// Polygon predicates (chart)
// -------------------------------------------------------------------------

pub(crate) fn polygon_contains(vs: &[Complex64], p: Complex64) -> bool {
    let mut inside = false;
    let n = vs.len();
    let mut j = n - 1;
    for i in 0..n {
        let vi = vs[i];
        let vj = vs[j];
        if (vi.im > p.im) != (vj.im > p.im) {
            let x = (vj.re - vi.re) * (p.im - vi.im) / (vj.im - vi.im) + vi.re;
            if p.re < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

pub(crate) fn polygon_signed_area(vs: &[Complex64]) -> f64 {
    let mut s = 0.0;
    for i in 0..vs.len() {
        let a = vs[i];
        let b = vs[(i + 1) % vs.len()];
        s += a.re * b.im - b.re * a.im;
    }
    0.5 * s
}

fn orient(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    (b.re - a.re) * (c.im - a.im) - (b.im - a.im) * (c.re - a.re)
}

pub(crate) fn segments_intersect(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |p: Complex64, q: Complex64, r: Complex64| {
        orient(p, q, r) == 0.0
            && r.re >= p.re.min(q.re)
            && r.re <= p.re.max(q.re)
            && r.im >= p.im.min(q.im)
            && r.im <= p.im.max(q.im)
    };
    on(c, d, a) || on(c, d, b) || on(a, b, c) || on(a, b, d)
}

pub(crate) fn polygon_is_simple(vs: &[Complex64]) -> bool {
    let n = vs.len();
    for i in 0..n {
        let a = vs[i];
        let b = vs[(i + 1) % n];
        for j in i + 1..n {
            // skip adjacent edges, they share an endpoint
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let c = vs[j];
            let d = vs[(j + 1) % n];
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

pub(crate) fn sample_polygon_boundary(vs: &[Complex64], n: usize) -> Vec<Complex64> {
    let total: f64 = (0..vs.len())
        .map(|i| (vs[(i + 1) % vs.len()] - vs[i]).norm())
        .sum();
    let mut out = Vec::with_capacity(n + vs.len());
    for i in 0..vs.len() {
        let a = vs[i];
        let b = vs[(i + 1) % vs.len()];
        let len = (b - a).norm();
        let m = ((n as f64 * len / total).ceil() as usize).max(2);
        for k in 0..m {
            out.push(a + (b - a) * (k as f64 / m as f64));
        }
    }
    out
}
