//! Spherical primitives: the extended plane as the unit sphere via
//! stereographic projection, the spherical metric and measure, Mobius
//! transformations, and spherical derivatives.
//!
//! Conventions fixed once and recorded in every output file: unit sphere,
//! projection from the north pole onto the equatorial plane, so the chart
//! origin is the south pole, infinity is the north pole, and the total
//! measure is 4*pi. The length element in the chart is 2|dz|/(1+|z|^2).

use crate::error::{Error, Result};
use num_complex::Complex64;

pub const TAU: f64 = std::f64::consts::TAU;
pub const PI: f64 = std::f64::consts::PI;

/// Point of the extended complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub fn new(re: f64, im: f64) -> Self {
        SpherePoint::Finite(Complex64::new(re, im))
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            SpherePoint::Finite(z)
        } else {
            SpherePoint::Infinity
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    /// Chart coordinate; None at infinity.
    pub fn chart(&self) -> Option<Complex64> {
        match self {
            SpherePoint::Finite(z) => Some(*z),
            SpherePoint::Infinity => None,
        }
    }

    /// Unit 3-vector on the sphere. Infinity is the north pole.
    pub fn to_vec3(&self) -> [f64; 3] {
        match self {
            SpherePoint::Infinity => [0.0, 0.0, 1.0],
            SpherePoint::Finite(z) => {
                let n = z.norm_sqr();
                if n > 1e300 {
                    return [0.0, 0.0, 1.0];
                }
                let d = 1.0 + n;
                [2.0 * z.re / d, 2.0 * z.im / d, (n - 1.0) / d]
            }
        }
    }

    pub fn from_vec3(v: [f64; 3]) -> Self {
        let denom = 1.0 - v[2];
        if denom <= 1e-15 {
            SpherePoint::Infinity
        } else {
            SpherePoint::Finite(Complex64::new(v[0] / denom, v[1] / denom))
        }
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        SpherePoint::from_complex(z)
    }
}

/// Chordal distance in [0, 2]: Euclidean distance of the sphere images.
pub fn chordal_distance(a: SpherePoint, b: SpherePoint) -> f64 {
    match (a, b) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
        (SpherePoint::Finite(z), SpherePoint::Infinity)
        | (SpherePoint::Infinity, SpherePoint::Finite(z)) => {
            2.0 / (1.0 + z.norm_sqr()).sqrt()
        }
        (SpherePoint::Finite(z), SpherePoint::Finite(w)) => {
            let num = 2.0 * (z - w).norm();
            num / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
        }
    }
}

/// Spherical (great-circle) distance in [0, pi].
pub fn spherical_distance(a: SpherePoint, b: SpherePoint) -> f64 {
    let c = chordal_distance(a, b) * 0.5;
    2.0 * c.clamp(0.0, 1.0).asin()
}

/// Conformal factor of the spherical metric in the chart: 2/(1+|z|^2).
pub fn conformal_factor(z: Complex64) -> f64 {
    2.0 / (1.0 + z.norm_sqr())
}

/// Area of a spherical cap of geodesic radius `r` (r in [0, pi]).
pub fn cap_area(r: f64) -> f64 {
    2.0 * PI * (1.0 - r.cos())
}

/// Geodesic radius reached from the origin by chart radius `t`.
pub fn chart_radius_to_spherical(t: f64) -> f64 {
    2.0 * t.atan()
}

/// Chart radius corresponding to geodesic radius `r` from the origin.
pub fn spherical_radius_to_chart(r: f64) -> f64 {
    (r * 0.5).tan()
}

// -------------------------------------------------------------------------
// Mobius transformations
// -------------------------------------------------------------------------

/// Fractional-linear map (az+b)/(cz+d), stored normalized to ad - bc = 1.
#[derive(Clone, Copy, Debug)]
pub struct MobiusTransform {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl MobiusTransform {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() < 1e-200 {
            return Err(Error::Geometry("singular Mobius matrix".into()));
        }
        let s = det.sqrt();
        Ok(MobiusTransform {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        })
    }

    pub fn identity() -> Self {
        MobiusTransform {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(1.0, 0.0),
        }
    }

    /// Similarity z -> alpha z + beta.
    pub fn similarity(alpha: Complex64, beta: Complex64) -> Result<Self> {
        Self::new(alpha, beta, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    }

    /// Sphere rotation moving `p` to the chart origin (an SU(2) element).
    pub fn rotation_to_origin(p: SpherePoint) -> Self {
        match p {
            // north pole to origin: z -> -1/z
            SpherePoint::Infinity => MobiusTransform {
                a: Complex64::new(0.0, 0.0),
                b: Complex64::new(0.0, -1.0),
                c: Complex64::new(0.0, -1.0),
                d: Complex64::new(0.0, 0.0),
            },
            SpherePoint::Finite(p) => {
                let s = (1.0 + p.norm_sqr()).sqrt();
                MobiusTransform {
                    a: Complex64::new(1.0 / s, 0.0),
                    b: -p / s,
                    c: p.conj() / s,
                    d: Complex64::new(1.0 / s, 0.0),
                }
            }
        }
    }

    pub fn apply(&self, p: SpherePoint) -> SpherePoint {
        match p {
            SpherePoint::Infinity => {
                if self.c.norm() == 0.0 {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(self.a / self.c)
                }
            }
            SpherePoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den.norm() < 1e-300 {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Chart evaluation; caller must know the image is finite.
    pub fn apply_chart(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    /// self after `other`: (self . other)(z) = self(other(z)).
    pub fn compose(&self, other: &MobiusTransform) -> Self {
        MobiusTransform {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> Self {
        MobiusTransform {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Complex derivative at a finite point: 1/(cz+d)^2 for det 1.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let den = self.c * z + self.d;
        1.0 / (den * den)
    }

    /// Spherical derivative, finite and positive on the whole sphere:
    /// (1+|z|^2) / (|az+b|^2 + |cz+d|^2).
    pub fn spherical_derivative(&self, p: SpherePoint) -> f64 {
        match p {
            SpherePoint::Finite(z) => {
                let num = 1.0 + z.norm_sqr();
                let den = (self.a * z + self.b).norm_sqr() + (self.c * z + self.d).norm_sqr();
                num / den
            }
            SpherePoint::Infinity => 1.0 / (self.a.norm_sqr() + self.c.norm_sqr()),
        }
    }

    /// Image of a chart circle (a circle on the sphere) as a chart circle.
    /// Errors if the image passes through infinity.
    pub fn map_circle(&self, center: Complex64, radius: f64) -> Result<(Complex64, f64)> {
        let pts = [
            center + Complex64::new(radius, 0.0),
            center + Complex64::new(-radius, 0.0),
            center + Complex64::new(0.0, radius),
        ];
        let mut img = [Complex64::new(0.0, 0.0); 3];
        for (i, p) in pts.iter().enumerate() {
            match self.apply(SpherePoint::Finite(*p)) {
                SpherePoint::Finite(w) => img[i] = w,
                SpherePoint::Infinity => {
                    return Err(Error::Geometry("circle image through infinity".into()))
                }
            }
        }
        circumcircle(img[0], img[1], img[2])
    }
}

/// Circle through three points (chart coordinates).
pub fn circumcircle(p1: Complex64, p2: Complex64, p3: Complex64) -> Result<(Complex64, f64)> {
    let ax = p1.re;
    let ay = p1.im;
    let bx = p2.re;
    let by = p2.im;
    let cx = p3.re;
    let cy = p3.im;
    let d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
    if d.abs() < 1e-30 {
        return Err(Error::Geometry("collinear points in circumcircle".into()));
    }
    let a2 = ax * ax + ay * ay;
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
    let uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
    let center = Complex64::new(ux, uy);
    Ok((center, (p1 - center).norm()))
}

/// The unique Mobius map sending (z_inf, z_0, z_1) to (inf, 0, 1).
///
/// The image of z_1 is pinned to 1 exactly, not just to the unit circle,
/// so repeated runs produce identical output.
pub fn mobius_normalize(
    z_inf: SpherePoint,
    z_0: SpherePoint,
    z_1: SpherePoint,
) -> Result<MobiusTransform> {
    let too_close = |p: SpherePoint, q: SpherePoint| chordal_distance(p, q) < 1e-14;
    if too_close(z_inf, z_0) || too_close(z_inf, z_1) || too_close(z_0, z_1) {
        return Err(Error::Geometry("coincident normalization points".into()));
    }
    // Cross ratio map T(z) = (z - z0)(z1 - zinf) / ((z - zinf)(z1 - z0)),
    // with the usual degenerations when one of the points is infinity.
    use SpherePoint::*;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let t = match (z_inf, z_0, z_1) {
        (Infinity, Finite(z0), Finite(z1)) => {
            // z -> (z - z0)/(z1 - z0)
            MobiusTransform::new(one, -z0, zero, z1 - z0)?
        }
        (Finite(zi), Infinity, Finite(z1)) => {
            // z -> (z1 - zi)/(z - zi)
            MobiusTransform::new(zero, z1 - zi, one, -zi)?
        }
        (Finite(zi), Finite(z0), Infinity) => {
            // z -> (z - z0)/(z - zi)
            MobiusTransform::new(one, -z0, one, -zi)?
        }
        (Finite(zi), Finite(z0), Finite(z1)) => {
            let k = z1 - zi;
            let m = z1 - z0;
            // (z - z0) k / ((z - zi) m)
            MobiusTransform::new(k, -z0 * k, m, -zi * m)?
        }
        _ => unreachable!("distinctness rules out two infinities"),
    };
    Ok(t)
}

/// Spherical derivative of a holomorphic map given its value and complex
/// derivative at a finite chart point with finite image.
pub fn spherical_derivative(z: Complex64, fz: Complex64, dfz: Complex64) -> f64 {
    (1.0 + z.norm_sqr()) / (1.0 + fz.norm_sqr()) * dfz.norm()
}

// -------------------------------------------------------------------------
// Spherical area
// -------------------------------------------------------------------------

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Signed solid angle of the geodesic triangle (a, b, c).
fn triangle_solid_angle(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let num = dot(a, cross(b, c));
    let den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
    2.0 * num.atan2(den)
}

/// Signed spherical area of the geodesic polygon with the given sphere
/// vertices, by a triangle fan from the first vertex. The sign is chosen
/// so that chart-counterclockwise polygons come out positive.
fn geodesic_polygon_area(vs: &[[f64; 3]]) -> f64 {
    let mut total = 0.0;
    for i in 1..vs.len() - 1 {
        total += triangle_solid_angle(vs[0], vs[i], vs[i + 1]);
    }
    -total
}

/// Spherical area enclosed by a chart polygon (straight chart edges),
/// computed by spherical excess after subdividing each edge until the
/// value stabilizes below `tol`.
///
/// The polygon must be simple and positively oriented in the chart.
pub fn polygon_spherical_area(vertices: &[Complex64], tol: f64) -> Result<f64> {
    if vertices.len() < 3 {
        return Err(Error::Geometry("polygon needs at least 3 vertices".into()));
    }
    let mut subdiv = 4usize;
    let mut prev = f64::NAN;
    for _ in 0..12 {
        let mut pts: Vec<[f64; 3]> = Vec::with_capacity(vertices.len() * subdiv);
        for i in 0..vertices.len() {
            let a = vertices[i];
            let b = vertices[(i + 1) % vertices.len()];
            for k in 0..subdiv {
                let t = k as f64 / subdiv as f64;
                let z = a + (b - a) * t;
                pts.push(SpherePoint::Finite(z).to_vec3());
            }
        }
        let area = geodesic_polygon_area(&pts);
        if !prev.is_nan() && (area - prev).abs() < tol {
            return Ok(area);
        }
        prev = area;
        subdiv *= 2;
    }
    Ok(prev)
}

/// Integrate `f` over the whole sphere by midpoint quadrature on two charts
/// (|z| <= 1 and its inversion), with `n` cells per axis in each chart.
///
/// `f` is evaluated at finite chart points only; the map u -> 1/u is an
/// isometry of the spherical metric, which covers the outer chart.
pub fn integrate_sphere<F>(f: F, n: usize, parallel: bool) -> f64
where
    F: Fn(Complex64) -> f64 + Sync + Send,
{
    let h = 2.0 / n as f64;
    let cell = |idx: usize, invert: bool| -> f64 {
        let iy = idx / n;
        let ix = idx % n;
        let x = -1.0 + (ix as f64 + 0.5) * h;
        let y = -1.0 + (iy as f64 + 0.5) * h;
        let z = Complex64::new(x, y);
        if z.norm_sqr() > 1.0 {
            return 0.0;
        }
        let lam = conformal_factor(z);
        let w = if invert { 1.0 / z } else { z };
        f(w) * lam * lam * h * h
    };
    let inner: Vec<f64> = if parallel {
        crate::exec::map_range(n * n, |i| cell(i, false))
    } else {
        crate::exec::map_range_seq(n * n, |i| cell(i, false))
    };
    let outer: Vec<f64> = if parallel {
        crate::exec::map_range(n * n, |i| cell(i, true))
    } else {
        crate::exec::map_range_seq(n * n, |i| cell(i, true))
    };
    inner.iter().sum::<f64>() + outer.iter().sum::<f64>()
}

/// Adaptive spherical area of a chart region given by a membership test.
///
/// Covers the bounding box `(x0, y0)..(x1, y1)` with `n0 x n0` cells and
/// recursively subdivides cells whose corner/center classifications
/// disagree, up to `depth` levels. Returns (area, evaluation count).
pub fn region_area_adaptive<F>(
    inside: &F,
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
    n0: usize,
    depth: usize,
) -> (f64, u64)
where
    F: Fn(Complex64) -> bool + Sync,
{
    let hx = (x1 - x0) / n0 as f64;
    let hy = (y1 - y0) / n0 as f64;
    let results: Vec<(f64, u64)> = crate::exec::map_range(n0 * n0, |idx| {
        let iy = idx / n0;
        let ix = idx % n0;
        let cx0 = x0 + ix as f64 * hx;
        let cy0 = y0 + iy as f64 * hy;
        cell_area_adaptive(inside, cx0, cy0, hx, hy, depth)
    });
    let mut area = 0.0;
    let mut count = 0;
    for (a, c) in results {
        area += a;
        count += c;
    }
    (area, count)
}

fn cell_area_adaptive<F>(inside: &F, x: f64, y: f64, hx: f64, hy: f64, depth: usize) -> (f64, u64)
where
    F: Fn(Complex64) -> bool,
{
    let corners = [
        Complex64::new(x, y),
        Complex64::new(x + hx, y),
        Complex64::new(x, y + hy),
        Complex64::new(x + hx, y + hy),
    ];
    let center = Complex64::new(x + hx * 0.5, y + hy * 0.5);
    let c_in = inside(center);
    let mut mixed = false;
    for p in corners {
        if inside(p) != c_in {
            mixed = true;
            break;
        }
    }
    let lam = conformal_factor(center);
    if !mixed || depth == 0 {
        // midpoint rule; a mixed cell at depth 0 contributes by its center
        let a = if c_in { lam * lam * hx * hy } else { 0.0 };
        return (a, 5);
    }
    let hx2 = hx * 0.5;
    let hy2 = hy * 0.5;
    let mut area = 0.0;
    let mut count = 5;
    for (dx, dy) in [(0.0, 0.0), (hx2, 0.0), (0.0, hy2), (hx2, hy2)] {
        let (a, c) = cell_area_adaptive(inside, x + dx, y + dy, hx2, hy2, depth - 1);
        area += a;
        count += c;
    }
    (area, count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_point(rng: &mut ChaCha8Rng) -> SpherePoint {
        // uniform on the sphere via Gaussian 3-vector
        let v: [f64; 3] = [
            rng.sample(rand_distr_standard()),
            rng.sample(rand_distr_standard()),
            rng.sample(rand_distr_standard()),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        SpherePoint::from_vec3([v[0] / n, v[1] / n, v[2] / n])
    }

    // Box-Muller standard normal without extra deps.
    struct StdNormal;
    fn rand_distr_standard() -> StdNormal {
        StdNormal
    }
    impl rand::distributions::Distribution<f64> for StdNormal {
        fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
            let u1: f64 = rng.gen_range(1e-12..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
        }
    }

    #[test]
    fn round_trip_chart_vec3() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let p = rand_point(&mut rng);
            let q = SpherePoint::from_vec3(p.to_vec3());
            assert!(chordal_distance(p, q) < 1e-12);
        }
        assert!(SpherePoint::Infinity.to_vec3() == [0.0, 0.0, 1.0]);
        assert!(SpherePoint::from_vec3([0.0, 0.0, 1.0]).is_infinite());
    }

    #[test]
    fn distance_poles_and_equator() {
        let zero = SpherePoint::new(0.0, 0.0);
        let one = SpherePoint::new(1.0, 0.0);
        assert_relative_eq!(spherical_distance(zero, SpherePoint::Infinity), PI, epsilon = 1e-15);
        assert_relative_eq!(spherical_distance(zero, one), PI / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn distance_matches_great_circle_oracle() {
        // oracle: arccos of the dot product of the stereographic images
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let a = rand_point(&mut rng);
            let b = rand_point(&mut rng);
            let d = spherical_distance(a, b);
            let oracle = dot(a.to_vec3(), b.to_vec3()).clamp(-1.0, 1.0).acos();
            assert!((d - oracle).abs() < 1e-12, "d={d} oracle={oracle}");
        }
    }

    #[test]
    fn metric_axioms_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a = rand_point(&mut rng);
            let b = rand_point(&mut rng);
            let c = rand_point(&mut rng);
            let ab = spherical_distance(a, b);
            let ba = spherical_distance(b, a);
            assert!((ab - ba).abs() < 1e-12);
            assert!(spherical_distance(a, a) == 0.0);
            let ac = spherical_distance(a, c);
            let cb = spherical_distance(c, b);
            assert!(ab <= ac + cb + 1e-12);
            assert!((0.0..=PI + 1e-15).contains(&ab));
        }
    }

    #[test]
    fn cap_areas() {
        assert_relative_eq!(cap_area(PI), 4.0 * PI, epsilon = 1e-12);
        assert_relative_eq!(cap_area(PI / 2.0), 2.0 * PI, epsilon = 1e-12);
    }

    #[test]
    fn small_square_area_matches_conformal_factor() {
        // Monte Carlo point counting on the sphere as the oracle.
        let s = 0.01;
        let verts = [
            Complex64::new(-s, -s),
            Complex64::new(s, -s),
            Complex64::new(s, s),
            Complex64::new(-s, s),
        ];
        let area = polygon_spherical_area(&verts, 1e-13).unwrap();
        let expected = (2.0 * s) * (2.0 * s) * 4.0; // lambda(0)^2 = 4
        assert_relative_eq!(area, expected, max_relative = 5e-3);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 4_000_000u64;
        let mut hits = 0u64;
        for _ in 0..n {
            let p = rand_point(&mut rng);
            if let SpherePoint::Finite(z) = p {
                if z.re.abs() <= s && z.im.abs() <= s {
                    hits += 1;
                }
            }
        }
        let mc = hits as f64 / n as f64 * 4.0 * PI;
        // MC error at ~4e6 samples and this tiny area is a few percent.
        assert_relative_eq!(area, mc, max_relative = 0.12);
    }

    #[test]
    fn hemisphere_by_adaptive_region() {
        let (a, _) = region_area_adaptive(
            &|z: Complex64| z.norm_sqr() <= 1.0,
            -1.2,
            -1.2,
            1.2,
            1.2,
            64,
            4,
        );
        assert_relative_eq!(a, 2.0 * PI, max_relative = 2e-3);
    }

    #[test]
    fn integrate_sphere_total_area() {
        let total = integrate_sphere(|_| 1.0, 200, false);
        assert_relative_eq!(total, 4.0 * PI, max_relative = 2e-2);
    }

    #[test]
    fn mobius_normalize_trivial_and_random() {
        let id = mobius_normalize(
            SpherePoint::Infinity,
            SpherePoint::new(0.0, 0.0),
            SpherePoint::new(1.0, 0.0),
        )
        .unwrap();
        let z = Complex64::new(0.3, -0.7);
        assert!((id.apply_chart(z) - z).norm() < 1e-14);

        let inv = mobius_normalize(
            SpherePoint::new(0.0, 0.0),
            SpherePoint::Infinity,
            SpherePoint::new(1.0, 0.0),
        )
        .unwrap();
        assert!((inv.apply_chart(z) - 1.0 / z).norm() < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let p = rand_point(&mut rng);
            let q = rand_point(&mut rng);
            let r = rand_point(&mut rng);
            if chordal_distance(p, q) < 1e-3
                || chordal_distance(q, r) < 1e-3
                || chordal_distance(p, r) < 1e-3
            {
                continue;
            }
            let t = mobius_normalize(p, q, r).unwrap();
            assert!(t.apply(p).is_infinite() || chordal_distance(t.apply(p), SpherePoint::Infinity) < 1e-10);
            assert!(chordal_distance(t.apply(q), SpherePoint::new(0.0, 0.0)) < 1e-10);
            assert!(chordal_distance(t.apply(r), SpherePoint::new(1.0, 0.0)) < 1e-10);
        }
    }

    #[test]
    fn mobius_composition_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let m1 = MobiusTransform::new(
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            );
            let m2 = MobiusTransform::new(
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            );
            let (m1, m2) = match (m1, m2) {
                (Ok(a), Ok(b)) => (a, b),
                _ => continue,
            };
            let p = rand_point(&mut rng);
            let via_compose = m1.compose(&m2).apply(p);
            let via_apply = m1.apply(m2.apply(p));
            assert!(chordal_distance(via_compose, via_apply) < 1e-12);
            let back = m1.inverse().apply(m1.apply(p));
            assert!(chordal_distance(back, p) < 1e-12);
        }
    }

    #[test]
    fn rotations_are_isometries() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let p = rand_point(&mut rng);
            let rot = MobiusTransform::rotation_to_origin(p);
            assert!(chordal_distance(rot.apply(p), SpherePoint::new(0.0, 0.0)) < 1e-12);
            for _ in 0..5 {
                let q = rand_point(&mut rng);
                let d = rot.spherical_derivative(q);
                assert!((d - 1.0).abs() < 1e-10, "|DT| = {d}");
            }
        }
    }

    #[test]
    fn spherical_derivative_formula_cases() {
        // identity
        let z = Complex64::new(0.4, 0.2);
        assert_relative_eq!(
            spherical_derivative(z, z, Complex64::new(1.0, 0.0)),
            1.0,
            epsilon = 1e-15
        );
        // f(z) = 2z at z = 0
        assert_relative_eq!(
            spherical_derivative(
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(2.0, 0.0)
            ),
            2.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn chain_rule_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let t = MobiusTransform::rotation_to_origin(rand_point(&mut rng));
            // f(z) = z^2 + 1, sampled pointwise
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let fz = z * z + 1.0;
            let dfz = 2.0 * z;
            let df = spherical_derivative(z, fz, dfz);
            let dt = t.spherical_derivative(SpherePoint::Finite(fz));
            let tfz = t.apply(SpherePoint::Finite(fz));
            let composite = match tfz {
                SpherePoint::Finite(w) => {
                    spherical_derivative(z, w, t.derivative(fz) * dfz)
                }
                SpherePoint::Infinity => continue,
            };
            assert!((composite - dt * df).abs() <= 1e-10 * (1.0 + composite.abs()));
        }
    }

    #[test]
    fn area_covariance_under_rotation() {
        let verts: Vec<Complex64> = vec![
            Complex64::new(0.1, 0.1),
            Complex64::new(0.8, 0.2),
            Complex64::new(0.7, 0.9),
            Complex64::new(0.05, 0.6),
        ];
        let a0 = polygon_spherical_area(&verts, 1e-12).unwrap();
        let rot = MobiusTransform::rotation_to_origin(SpherePoint::new(0.4, -0.3));
        // push a dense sampling of the polygon boundary through the rotation
        let mut img = Vec::new();
        let sub = 512;
        for i in 0..verts.len() {
            let a = verts[i];
            let b = verts[(i + 1) % verts.len()];
            for k in 0..sub {
                let t = k as f64 / sub as f64;
                img.push(rot.apply_chart(a + (b - a) * t));
            }
        }
        let a1 = polygon_spherical_area(&img, 1e-12).unwrap();
        assert_relative_eq!(a0, a1, max_relative = 1e-6);
    }
}
