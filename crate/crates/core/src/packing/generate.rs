//! Test-family factory: carpet levels, random square families with
//! square-summable diameters, and random disk families.

use super::{intersects, Packing, PeripheralContinuum};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub enum GenerateKind {
    /// Middle squares of the standard carpet subdivision of [0,1]^2,
    /// levels 1..=level, ordered level by level.
    Carpet { level: u32 },
    /// Axis-aligned squares with Euclidean diameters ~ i^(-s), s > 1/2,
    /// placed by rejection in [-1,1]^2.
    RandomL2 { seed: u64, exponent: f64, count: usize },
    /// Disks with radii ~ i^(-3/4), placed by rejection in [-1,1]^2.
    Round { seed: u64, count: usize },
}

pub fn generate(kind: &GenerateKind) -> Result<Packing> {
    match kind {
        GenerateKind::Carpet { level } => carpet(*level),
        GenerateKind::RandomL2 {
            seed,
            exponent,
            count,
        } => random_l2(*seed, *exponent, *count),
        GenerateKind::Round { seed, count } => round(*seed, *count),
    }
}

fn carpet(level: u32) -> Result<Packing> {
    if level == 0 || level > 6 {
        return Err(Error::Geometry("carpet level must be in 1..=6".into()));
    }
    let mut continua = Vec::new();
    let mut id = 0;
    // cells that survive at each level; (x, y, side) of the cell
    let mut cells = vec![(0.0f64, 0.0f64, 1.0f64)];
    for _ in 0..level {
        let mut next = Vec::with_capacity(cells.len() * 8);
        for (x, y, s) in &cells {
            let t = s / 3.0;
            continua.push(PeripheralContinuum::square(
                id,
                Complex64::new(x + t, y + t),
                t,
            )?);
            id += 1;
            for iy in 0..3 {
                for ix in 0..3 {
                    if ix == 1 && iy == 1 {
                        continue;
                    }
                    next.push((x + ix as f64 * t, y + iy as f64 * t, t));
                }
            }
        }
        cells = next;
    }
    Ok(Packing {
        label: format!("carpet-{level}"),
        continua,
    })
}

fn random_l2(seed: u64, exponent: f64, count: usize) -> Result<Packing> {
    if exponent <= 0.5 {
        return Err(Error::Geometry(
            "exponent must exceed 1/2 for square-summable diameters".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 0.25;
    let mut continua: Vec<PeripheralContinuum> = Vec::with_capacity(count);
    for i in 0..count {
        let diam = scale * ((i + 1) as f64).powf(-exponent);
        let side = diam / std::f64::consts::SQRT_2;
        let mut placed = false;
        for _ in 0..4000 {
            let x = rng.gen_range(-1.0..1.0 - side);
            let y = rng.gen_range(-1.0..1.0 - side);
            let cand = PeripheralContinuum::square(i, Complex64::new(x, y), side)?;
            if continua.iter().all(|k| !touches(k, &cand)) {
                continua.push(cand);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::Geometry(format!(
                "placement failed at continuum {i}: parameters overcrowd the window"
            )));
        }
    }
    Ok(Packing {
        label: format!("random-l2-s{exponent}-seed{seed}"),
        continua,
    })
}

fn round(seed: u64, count: usize) -> Result<Packing> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 0.12;
    let mut continua: Vec<PeripheralContinuum> = Vec::with_capacity(count);
    for i in 0..count {
        let chart_r = scale * ((i + 1) as f64).powf(-0.75);
        let mut placed = false;
        for _ in 0..4000 {
            let x = rng.gen_range(-1.0..1.0);
            let y = rng.gen_range(-1.0..1.0);
            let cand = PeripheralContinuum::disk_chart(i, Complex64::new(x, y), chart_r)?;
            if continua.iter().all(|k| !touches(k, &cand)) {
                continua.push(cand);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::Geometry(format!(
                "placement failed at continuum {i}: parameters overcrowd the window"
            )));
        }
    }
    Ok(Packing {
        label: format!("round-seed{seed}"),
        continua,
    })
}

/// Rejection predicate with a small separation margin so closures stay
/// strictly disjoint.
fn touches(a: &PeripheralContinuum, b: &PeripheralContinuum) -> bool {
    if intersects(a, b) {
        return true;
    }
    super::set_distance(a, b, super::Metric::Chart) < 5e-3
}
