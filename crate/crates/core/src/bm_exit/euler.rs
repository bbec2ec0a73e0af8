use rand::Rng;
use rand_distr::StandardNormal;

use super::law::open_unit;
use crate::domains::{polygon_half_planes, Domain, Shape, StartPoint};
use crate::error::{domain, Result};
use crate::rng::SampleRng;

/// Bridge crossing probabilities below `exp(-CUTOFF)` are skipped.
const CROSSING_CUTOFF: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
enum BoundaryPiece {
    /// Interior is `normal · x < offset`, `normal` a unit vector.
    Plane {
        normal: [f64; 3],
        offset: f64,
    },
    Sphere {
        center: [f64; 3],
        radius: f64,
    },
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

impl BoundaryPiece {
    fn distance(&self, x: &[f64; 3]) -> f64 {
        match self {
            Self::Plane { normal, offset } => offset - dot(normal, x),
            Self::Sphere { center, radius } => radius - dot(&sub(x, center), &sub(x, center)).sqrt(),
        }
    }

    /// Distances of both step endpoints to the supporting half-plane used
    /// for the bridge correction. A sphere is replaced by its tangent plane
    /// at the boundary point nearest to the endpoint closer to it.
    fn plane_distances(&self, from: &[f64; 3], to: &[f64; 3], d_from: f64, d_to: f64) -> (f64, f64) {
        match self {
            Self::Plane { .. } => (d_from, d_to),
            Self::Sphere { center, radius } => {
                let near = if d_from <= d_to { from } else { to };
                let r = sub(near, center);
                let norm = dot(&r, &r).sqrt();
                if norm == 0.0 {
                    return (d_from, d_to);
                }
                let n = [r[0] / norm, r[1] / norm, r[2] / norm];
                (radius - dot(&n, &sub(from, center)), radius - dot(&n, &sub(to, center)))
            }
        }
    }
}

/// Euler scheme for `τ_D` with Brownian-bridge crossing corrections.
///
/// Each step adds `√dt · N(0, I)`. If the new point is outside, the exit is
/// recorded; otherwise each boundary piece is tested for an unseen
/// excursion with probability `exp(−2 δ₁ δ₂ / dt)`, `δᵢ` the endpoint
/// distances to the (tangent) half-plane. A detected exit is stamped at the
/// midpoint of its step.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerBridgeSampler {
    dim: usize,
    start: [f64; 3],
    dt: f64,
    pieces: Vec<BoundaryPiece>,
}

fn axis(dim: usize, sign: f64) -> [f64; 3] {
    let mut n = [0.0; 3];
    n[dim] = sign;
    n
}

fn embed(x: &[f64]) -> [f64; 3] {
    let mut p = [0.0; 3];
    p[..x.len()].copy_from_slice(x);
    p
}

impl EulerBridgeSampler {
    pub fn new(d: &Domain, z: &StartPoint, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return domain(format!("time step must be positive, got {dt}"));
        }
        z.require_interior(d)?;
        let plane = |normal, offset| BoundaryPiece::Plane { normal, offset };
        let pieces = match d.shape() {
            Shape::Interval { a, b } => vec![plane(axis(0, 1.0), *b), plane(axis(0, -1.0), -a)],
            Shape::Ball { center, radius } => vec![BoundaryPiece::Sphere { center: embed(center), radius: *radius }],
            Shape::Rectangle { xmin, xmax, ymin, ymax } => vec![
                plane(axis(0, 1.0), *xmax),
                plane(axis(0, -1.0), -xmin),
                plane(axis(1, 1.0), *ymax),
                plane(axis(1, -1.0), -ymin),
            ],
            Shape::Polygon { vertices } => {
                polygon_half_planes(vertices).into_iter().map(|(n, b)| plane([n[0], n[1], 0.0], b)).collect()
            }
            Shape::Slab { half_width, dim } => {
                vec![plane(axis(dim - 1, 1.0), *half_width), plane(axis(dim - 1, -1.0), *half_width)]
            }
            Shape::Lens { half_width, radius } => vec![
                plane(axis(1, 1.0), *half_width),
                plane(axis(1, -1.0), *half_width),
                BoundaryPiece::Sphere { center: [0.0; 3], radius: *radius },
            ],
        };
        Ok(Self { dim: d.dimension(), start: embed(z.coords()), dt, pieces })
    }

    /// Default step `1e-4 · R_D²`.
    pub fn default_dt(d: &Domain) -> f64 {
        1e-4 * d.geometry().inradius.powi(2)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn sample(&self, rng: &mut SampleRng) -> f64 {
        let sdt = self.dt.sqrt();
        let mut x = self.start;
        let mut dist: Vec<f64> = self.pieces.iter().map(|p| p.distance(&x)).collect();
        let mut steps: u64 = 0;
        loop {
            let mut y = x;
            for yi in y.iter_mut().take(self.dim) {
                let g: f64 = rng.sample(StandardNormal);
                *yi += sdt * g;
            }
            steps += 1;
            let exit_time = (steps as f64 - 0.5) * self.dt;
            for (piece, d_prev) in self.pieces.iter().zip(dist.iter_mut()) {
                let d_next = piece.distance(&y);
                if d_next <= 0.0 {
                    return exit_time;
                }
                let (a, b) = piece.plane_distances(&x, &y, *d_prev, d_next);
                let exponent = 2.0 * a * b / self.dt;
                if a > 0.0 && b > 0.0 && exponent < CROSSING_CUTOFF && open_unit(rng) < (-exponent).exp() {
                    return exit_time;
                }
                *d_prev = d_next;
            }
            x = y;
        }
    }
}
