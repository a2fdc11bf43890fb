//! Fatness estimation: the minimum over sampled centers and radii of
//! area(B(x,r) /\ K) / r^2, restricted to balls that do not contain K.
//!
//! Sampling is boundary-biased (worst ratios occur at the boundary) with a
//! dyadic radius grid. The estimate is an upper bound on the true fatness
//! constant; sample counts are recorded so tolerance claims are auditable.

use super::{PeripheralContinuum, Shape};
use crate::sphere::{region_area_adaptive, spherical_distance, MobiusTransform, SpherePoint};
use num_complex::Complex64;

/// Anything fatness can be estimated on: peripheral continua and their
/// Mobius images.
pub trait Region: Sync {
    fn contains(&self, p: SpherePoint) -> bool;
    fn boundary_samples(&self, n: usize) -> Vec<Complex64>;
    fn chart_bbox(&self) -> (f64, f64, f64, f64);
    fn is_degenerate(&self) -> bool;
}

impl Region for PeripheralContinuum {
    fn contains(&self, p: SpherePoint) -> bool {
        PeripheralContinuum::contains(self, p)
    }
    fn boundary_samples(&self, n: usize) -> Vec<Complex64> {
        PeripheralContinuum::boundary_samples(self, n)
    }
    fn chart_bbox(&self) -> (f64, f64, f64, f64) {
        PeripheralContinuum::chart_bbox(self)
    }
    fn is_degenerate(&self) -> bool {
        matches!(self.shape, Shape::Point(_))
    }
}

/// Mobius image of a continuum, evaluated through the inverse map.
pub struct MobiusRegion<'a> {
    pub base: &'a PeripheralContinuum,
    pub map: MobiusTransform,
    inverse: MobiusTransform,
}

impl<'a> MobiusRegion<'a> {
    pub fn new(base: &'a PeripheralContinuum, map: MobiusTransform) -> Self {
        MobiusRegion {
            base,
            map,
            inverse: map.inverse(),
        }
    }
}

impl Region for MobiusRegion<'_> {
    fn contains(&self, p: SpherePoint) -> bool {
        self.base.contains(self.inverse.apply(p))
    }
    fn boundary_samples(&self, n: usize) -> Vec<Complex64> {
        self.base
            .boundary_samples(n)
            .iter()
            .filter_map(|z| self.map.apply(SpherePoint::Finite(*z)).chart())
            .collect()
    }
    fn chart_bbox(&self) -> (f64, f64, f64, f64) {
        let pts = Region::boundary_samples(self, 256);
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
    fn is_degenerate(&self) -> bool {
        self.base.is_degenerate()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FatnessConfig {
    /// Number of boundary centers x to try.
    pub boundary_points: usize,
    /// Number of dyadic radii per center.
    pub radii: usize,
    /// Grid resolution of the area quadrature.
    pub area_grid: usize,
    /// Adaptive refinement depth of the area quadrature.
    pub area_depth: usize,
    pub parallel: bool,
}

impl Default for FatnessConfig {
    fn default() -> Self {
        FatnessConfig {
            boundary_points: 24,
            radii: 8,
            area_grid: 24,
            area_depth: 4,
            parallel: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FatnessEstimate {
    pub tau_hat: f64,
    /// (center, radius) attaining the minimum ratio.
    pub witness: Option<(Complex64, f64)>,
    /// Number of (x, r) pairs evaluated.
    pub pairs: usize,
    /// Total membership evaluations spent in area quadrature.
    pub area_evals: u64,
}

/// Upper bound on the fatness constant of `k` from sampled centers/radii.
///
/// Points are fat for every constant, so a degenerate region returns the
/// infinity sentinel.
pub fn estimate_fatness<R: Region>(k: &R, cfg: &FatnessConfig) -> FatnessEstimate {
    if k.is_degenerate() {
        return FatnessEstimate {
            tau_hat: f64::INFINITY,
            witness: None,
            pairs: 0,
            area_evals: 0,
        };
    }
    let centers = k.boundary_samples(cfg.boundary_points);
    let all_samples = k.boundary_samples(cfg.boundary_points * 8);
    let (bx0, by0, bx1, by1) = k.chart_bbox();

    struct Eval {
        ratio: f64,
        center: Complex64,
        radius: f64,
        evals: u64,
    }

    let per_center = |x: &Complex64| -> Vec<Eval> {
        let xp = SpherePoint::Finite(*x);
        // largest admissible radius: just below the containment threshold
        let r_contain = all_samples
            .iter()
            .map(|q| spherical_distance(xp, SpherePoint::Finite(*q)))
            .fold(0.0, f64::max);
        let r_max = r_contain * 0.98;
        let mut out = Vec::with_capacity(cfg.radii);
        for j in 0..cfg.radii {
            let r = r_max * 0.5f64.powi(j as i32);
            if r <= 0.0 {
                break;
            }
            let inside =
                |z: Complex64| k.contains(SpherePoint::Finite(z)) && spherical_distance(xp, SpherePoint::Finite(z)) <= r;
            let (area, evals) =
                region_area_adaptive(&inside, bx0, by0, bx1, by1, cfg.area_grid, cfg.area_depth);
            out.push(Eval {
                ratio: area / (r * r),
                center: *x,
                radius: r,
                evals,
            });
        }
        out
    };

    let evals: Vec<Vec<Eval>> = if cfg.parallel {
        crate::exec::map(&centers, per_center)
    } else {
        crate::exec::map_seq(&centers, per_center)
    };

    let mut tau_hat = f64::INFINITY;
    let mut witness = None;
    let mut pairs = 0;
    let mut area_evals = 0;
    for group in &evals {
        for e in group {
            pairs += 1;
            area_evals += e.evals;
            if e.ratio < tau_hat {
                tau_hat = e.ratio;
                witness = Some((e.center, e.radius));
            }
        }
    }
    FatnessEstimate {
        tau_hat,
        witness,
        pairs,
        area_evals,
    }
}
