//! Domains, their geometric invariants, and the comparison domains built
//! from them: the equal-volume ball `D*`, the interval `I(D)`, the slab
//! `S(D)` and the planar lens `C(D)`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Raw tagged description; validated into a [`Domain`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    /// `(a, b) ⊂ R`.
    Interval { a: f64, b: f64 },
    /// Open ball in `R^n`, `n = center.len() ≤ 3`.
    Ball { center: Vec<f64>, radius: f64 },
    /// Axis-aligned rectangle in `R^2`.
    Rectangle { xmin: f64, xmax: f64, ymin: f64, ymax: f64 },
    /// Strictly convex polygon, vertices counterclockwise.
    #[serde(alias = "convex_polygon")]
    Polygon { vertices: Vec<[f64; 2]> },
    /// `R^{dim-1} × (-half_width, half_width)`.
    Slab { half_width: f64, dim: usize },
    /// `[R × (-half_width, half_width)] ∩ B(0, radius)` in `R^2`.
    Lens { half_width: f64, radius: f64 },
}

/// A validated domain. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Shape", into = "Shape")]
pub struct Domain {
    shape: Shape,
}

impl TryFrom<Shape> for Domain {
    type Error = Error;

    fn try_from(shape: Shape) -> Result<Self> {
        Domain::new(shape)
    }
}

impl From<Domain> for Shape {
    fn from(d: Domain) -> Self {
        d.shape
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Validation(msg()))
    }
}

fn finite(values: &[f64]) -> bool {
    values.iter().all(|x| x.is_finite())
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

impl Domain {
    pub fn new(shape: Shape) -> Result<Self> {
        match &shape {
            Shape::Interval { a, b } => {
                check(finite(&[*a, *b]) && a < b, || format!("interval needs a < b, got ({a}, {b})"))?
            }
            Shape::Ball { center, radius } => {
                check((1..=3).contains(&center.len()), || {
                    format!("ball dimension must be 1, 2 or 3, got {}", center.len())
                })?;
                check(finite(center) && radius.is_finite() && *radius > 0.0, || {
                    format!("ball radius must be positive, got {radius}")
                })?;
            }
            Shape::Rectangle { xmin, xmax, ymin, ymax } => {
                check(finite(&[*xmin, *xmax, *ymin, *ymax]) && xmin < xmax && ymin < ymax, || {
                    "rectangle needs xmin < xmax and ymin < ymax".to_string()
                })?
            }
            Shape::Polygon { vertices } => validate_polygon(vertices)?,
            Shape::Slab { half_width, dim } => {
                check(half_width.is_finite() && *half_width > 0.0, || {
                    format!("slab half-width must be positive, got {half_width}")
                })?;
                check((1..=3).contains(dim), || format!("slab dimension must be 1, 2 or 3, got {dim}"))?;
            }
            Shape::Lens { half_width, radius } => {
                check(half_width.is_finite() && radius.is_finite() && *half_width > 0.0 && *radius > 0.0, || {
                    format!("lens needs positive half-width and radius, got ({half_width}, {radius})")
                })?
            }
        }
        Ok(Self { shape })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(Shape::Interval { a, b })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        Self::new(Shape::Ball { center, radius })
    }

    pub fn rectangle(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Self> {
        Self::new(Shape::Rectangle { xmin, xmax, ymin, ymax })
    }

    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(Shape::Polygon { vertices })
    }

    pub fn slab(half_width: f64, dim: usize) -> Result<Self> {
        Self::new(Shape::Slab { half_width, dim })
    }

    pub fn lens(half_width: f64, radius: f64) -> Result<Self> {
        Self::new(Shape::Lens { half_width, radius })
    }

    /// Equilateral triangle with the given side, centroid at the origin and
    /// one horizontal edge at the bottom.
    pub fn equilateral_triangle(side: f64) -> Result<Self> {
        let h = side * 3f64.sqrt() / 2.0;
        Self::polygon(vec![[-side / 2.0, -h / 3.0], [side / 2.0, -h / 3.0], [0.0, 2.0 * h / 3.0]])
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Short tag used in reports.
    pub fn kind(&self) -> &'static str {
        match self.shape {
            Shape::Interval { .. } => "interval",
            Shape::Ball { .. } => "ball",
            Shape::Rectangle { .. } => "rectangle",
            Shape::Polygon { .. } => "polygon",
            Shape::Slab { .. } => "slab",
            Shape::Lens { .. } => "lens",
        }
    }

    pub fn dimension(&self) -> usize {
        match &self.shape {
            Shape::Interval { .. } => 1,
            Shape::Ball { center, .. } => center.len(),
            Shape::Rectangle { .. } | Shape::Polygon { .. } | Shape::Lens { .. } => 2,
            Shape::Slab { dim, .. } => *dim,
        }
    }

    pub fn geometry(&self) -> Geometry {
        match &self.shape {
            Shape::Interval { a, b } => Geometry { volume: b - a, inradius: 0.5 * (b - a), diameter: b - a },
            Shape::Ball { center, radius } => {
                Geometry { volume: ball_volume(center.len(), *radius), inradius: *radius, diameter: 2.0 * radius }
            }
            Shape::Rectangle { xmin, xmax, ymin, ymax } => {
                let (w, h) = (xmax - xmin, ymax - ymin);
                Geometry { volume: w * h, inradius: 0.5 * w.min(h), diameter: w.hypot(h) }
            }
            Shape::Polygon { vertices } => {
                let (_, inradius) = chebyshev_center(vertices);
                Geometry { volume: shoelace_area(vertices), inradius, diameter: vertex_diameter(vertices) }
            }
            Shape::Slab { half_width, dim } => Geometry {
                volume: if *dim == 1 { 2.0 * half_width } else { f64::INFINITY },
                inradius: *half_width,
                diameter: if *dim == 1 { 2.0 * half_width } else { f64::INFINITY },
            },
            Shape::Lens { half_width, radius } => {
                let (h, rho) = (*half_width, *radius);
                let volume = if rho <= h {
                    PI * rho * rho
                } else {
                    2.0 * (h * (rho * rho - h * h).sqrt() + rho * rho * (h / rho).asin())
                };
                Geometry { volume, inradius: h.min(rho), diameter: 2.0 * rho }
            }
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension() {
            return domain(format!(
                "point has dimension {} but the {} lives in R^{}",
                x.len(),
                self.kind(),
                self.dimension()
            ));
        }
        if !finite(x) {
            return domain("point has non-finite coordinates");
        }
        Ok(())
    }

    /// Membership in the open set.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        self.check_point(x)?;
        Ok(self.signed_distance(x) > 0.0)
    }

    /// Distance to the boundary for interior points, `0` otherwise.
    pub fn distance_to_boundary(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.signed_distance(x).max(0.0))
    }

    /// Positive inside, nonpositive outside; equals the boundary distance
    /// for interior points.
    fn signed_distance(&self, x: &[f64]) -> f64 {
        match &self.shape {
            Shape::Interval { a, b } => (x[0] - a).min(b - x[0]),
            Shape::Ball { center, radius } => {
                let r2: f64 = x.iter().zip(center).map(|(xi, ci)| (xi - ci).powi(2)).sum();
                radius - r2.sqrt()
            }
            Shape::Rectangle { xmin, xmax, ymin, ymax } => {
                (x[0] - xmin).min(xmax - x[0]).min(x[1] - ymin).min(ymax - x[1])
            }
            Shape::Polygon { vertices } => {
                edge_half_planes(vertices).map(|(n, b)| b - n[0] * x[0] - n[1] * x[1]).fold(f64::INFINITY, f64::min)
            }
            Shape::Slab { half_width, dim } => half_width - x[dim - 1].abs(),
            Shape::Lens { half_width, radius } => (half_width - x[1].abs()).min(radius - x[0].hypot(x[1])),
        }
    }

    /// Builds the comparison domain `kind` for `self`. The comparison
    /// domain is always centered at the origin, which is its canonical
    /// start point.
    pub fn symmetrize(&self, kind: Symmetrization) -> Result<Domain> {
        let g = self.geometry();
        let n = self.dimension();
        match kind {
            Symmetrization::EqualVolumeBall => {
                if !g.volume.is_finite() {
                    return Err(Error::Precondition(format!(
                        "the equal-volume ball needs finite volume; a {} has infinite volume",
                        self.kind()
                    )));
                }
                Domain::ball(vec![0.0; n], ball_radius_for_volume(n, g.volume))
            }
            Symmetrization::IntervalI => Domain::interval(-g.inradius, g.inradius),
            Symmetrization::SlabS => Domain::slab(g.inradius, n),
            Symmetrization::LensC => {
                if n != 2 {
                    return Err(Error::Precondition(format!("the lens comparison is planar; domain lives in R^{n}")));
                }
                if !g.diameter.is_finite() {
                    return Err(Error::Precondition(format!(
                        "the lens comparison needs finite diameter; a {} is unbounded",
                        self.kind()
                    )));
                }
                Domain::lens(g.inradius, g.diameter - g.inradius)
            }
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.shape {
            Shape::Interval { a, b } => write!(f, "interval({a},{b})"),
            Shape::Ball { center, radius } => write!(f, "ball({center:?},r={radius})"),
            Shape::Rectangle { xmin, xmax, ymin, ymax } => {
                write!(f, "rectangle({xmin},{xmax})x({ymin},{ymax})")
            }
            Shape::Polygon { vertices } => write!(f, "polygon({vertices:?})"),
            Shape::Slab { half_width, dim } => write!(f, "slab(h={half_width},n={dim})"),
            Shape::Lens { half_width, radius } => write!(f, "lens(h={half_width},rho={radius})"),
        }
    }
}

/// Volume, inradius `R_D` and diameter `d_D`. Unbounded quantities are
/// `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub volume: f64,
    pub inradius: f64,
    pub diameter: f64,
}

/// Comparison-domain constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Symmetrization {
    /// `D*`: origin-centered ball of the same volume.
    #[serde(rename = "equal-volume-ball")]
    EqualVolumeBall,
    /// `I(D) = (-R_D, R_D)`.
    #[serde(rename = "interval-I", alias = "interval-i")]
    IntervalI,
    /// `S(D) = R^{n-1} × I(D)`.
    #[serde(rename = "slab-S", alias = "slab-s")]
    SlabS,
    /// `C(D) = [R × I(D)] ∩ B(0, d_D − R_D)`.
    #[serde(rename = "lens-C", alias = "lens-c")]
    LensC,
}

impl fmt::Display for Symmetrization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Symmetrization::EqualVolumeBall => "equal-volume-ball",
            Symmetrization::IntervalI => "interval-I",
            Symmetrization::SlabS => "slab-S",
            Symmetrization::LensC => "lens-C",
        })
    }
}

/// A start point `z ∈ R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StartPoint(Vec<f64>);

impl StartPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// Errors unless the point lies strictly inside `d`.
    pub fn require_interior(&self, d: &Domain) -> Result<()> {
        if d.contains(&self.0)? {
            Ok(())
        } else {
            Err(Error::Precondition(format!("start point {self} is not interior to {d}")))
        }
    }
}

impl From<Vec<f64>> for StartPoint {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl fmt::Display for StartPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(";"))
    }
}

pub fn ball_volume(dim: usize, radius: f64) -> f64 {
    match dim {
        1 => 2.0 * radius,
        2 => PI * radius * radius,
        3 => 4.0 / 3.0 * PI * radius.powi(3),
        _ => unreachable!("validated dimension"),
    }
}

fn ball_radius_for_volume(dim: usize, volume: f64) -> f64 {
    match dim {
        1 => 0.5 * volume,
        2 => (volume / PI).sqrt(),
        3 => (3.0 * volume / (4.0 * PI)).cbrt(),
        _ => unreachable!("validated dimension"),
    }
}

fn validate_polygon(vertices: &[[f64; 2]]) -> Result<()> {
    let m = vertices.len();
    check(m >= 3, || format!("polygon needs at least 3 vertices, got {m}"))?;
    check(vertices.iter().all(|p| finite(p)), || "polygon has non-finite vertices".into())?;
    let mut turning = 0.0;
    for i in 0..m {
        let (a, b, c) = (vertices[i], vertices[(i + 1) % m], vertices[(i + 2) % m]);
        let turn = cross(a, b, c);
        check(turn > 0.0, || {
            if turn == 0.0 {
                format!("polygon has collinear vertices around index {}", (i + 1) % m)
            } else {
                format!("polygon is not convex and counterclockwise at vertex {}", (i + 1) % m)
            }
        })?;
        let e1 = [b[0] - a[0], b[1] - a[1]];
        let e2 = [c[0] - b[0], c[1] - b[1]];
        turning += (e1[0] * e2[1] - e1[1] * e2[0]).atan2(e1[0] * e2[0] + e1[1] * e2[1]);
    }
    // all left turns but winding twice or more means a self-intersecting star
    check((turning - 2.0 * PI).abs() < 1e-6, || "polygon is self-intersecting".into())
}

/// Outward unit normals `n` and offsets `b` with interior `n·x < b`.
fn edge_half_planes(vertices: &[[f64; 2]]) -> impl Iterator<Item = ([f64; 2], f64)> + '_ {
    let m = vertices.len();
    (0..m).map(move |i| {
        let (p, q) = (vertices[i], vertices[(i + 1) % m]);
        let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
        let len = dx.hypot(dy);
        let n = [dy / len, -dx / len];
        (n, n[0] * p[0] + n[1] * p[1])
    })
}

/// Outward unit normals and offsets of a convex polygon's edges.
pub fn polygon_half_planes(vertices: &[[f64; 2]]) -> Vec<([f64; 2], f64)> {
    edge_half_planes(vertices).collect()
}

pub fn shoelace_area(vertices: &[[f64; 2]]) -> f64 {
    let m = vertices.len();
    0.5 * (0..m)
        .map(|i| {
            let (p, q) = (vertices[i], vertices[(i + 1) % m]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
}

fn vertex_diameter(vertices: &[[f64; 2]]) -> f64 {
    let mut best: f64 = 0.0;
    for (i, p) in vertices.iter().enumerate() {
        for q in &vertices[i + 1..] {
            best = best.max((p[0] - q[0]).hypot(p[1] - q[1]));
        }
    }
    best
}

/// Largest inscribed disk of a convex polygon, as `(center, radius)`.
///
/// Solves `max r` subject to `n_i·c + r ≤ b_i` over the edge half-planes.
/// The feasible set in `(c, r)` is a bounded polytope, so the optimum sits
/// on a vertex; vertices are enumerated as triples of active constraints.
pub fn chebyshev_center(vertices: &[[f64; 2]]) -> ([f64; 2], f64) {
    let planes = polygon_half_planes(vertices);
    let scale = vertex_diameter(vertices).max(1.0);
    let feas_tol = 1e-12 * scale;
    let mut best = ([0.0, 0.0], f64::NEG_INFINITY);
    let m = planes.len();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let rows = [planes[i], planes[j], planes[k]];
                let Some((c, r)) = solve_active(&rows) else { continue };
                if r <= best.1 || r < 0.0 {
                    continue;
                }
                if planes.iter().all(|(n, b)| n[0] * c[0] + n[1] * c[1] + r <= b + feas_tol) {
                    best = (c, r);
                }
            }
        }
    }
    best
}

/// Solves `n·c + r = b` for three constraints by Cramer's rule.
fn solve_active(rows: &[([f64; 2], f64); 3]) -> Option<([f64; 2], f64)> {
    let m = rows.map(|(n, _)| [n[0], n[1], 1.0]);
    let rhs = rows.map(|(_, b)| b);
    let det3 = |a: [[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let det = det3(m);
    if det.abs() < 1e-12 {
        return None;
    }
    let replaced = |col: usize| {
        let mut a = m;
        for (row, b) in a.iter_mut().zip(rhs) {
            row[col] = b;
        }
        det3(a) / det
    };
    Some(([replaced(0), replaced(1)], replaced(2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn rect() -> Domain {
        Domain::rectangle(-1.0, 1.0, -2.0, 2.0).unwrap()
    }

    #[test]
    fn rectangle_geometry() {
        let g = rect().geometry();
        assert_eq!(g.volume, 8.0);
        assert_eq!(g.inradius, 1.0);
        assert_relative_eq!(g.diameter, 2.0 * 5f64.sqrt());
    }

    #[test]
    fn disk_geometry() {
        let g = Domain::ball(vec![0.0, 0.0], 2.0).unwrap().geometry();
        assert_relative_eq!(g.volume, 4.0 * PI);
        assert_eq!(g.inradius, 2.0);
        assert_eq!(g.diameter, 4.0);
    }

    #[test]
    fn triangle_inradius_from_the_linear_program() {
        let g = Domain::equilateral_triangle(2.0).unwrap().geometry();
        assert_relative_eq!(g.inradius, 1.0 / 3f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(g.diameter, 2.0, max_relative = 1e-12);
        assert_relative_eq!(g.volume, 3f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn polygon_inradius_of_a_square_matches_the_rectangle() {
        let square = Domain::polygon(vec![[0.0, 0.0], [3.0, 0.0], [3.0, 1.0], [0.0, 1.0]]).unwrap();
        let (center, r) = match square.shape() {
            Shape::Polygon { vertices } => chebyshev_center(vertices),
            _ => unreachable!(),
        };
        assert_relative_eq!(r, 0.5, max_relative = 1e-12);
        assert_relative_eq!(center[1], 0.5, max_relative = 1e-12);
    }

    #[test]
    fn invalid_polygons_are_rejected() {
        let clockwise = vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]];
        assert!(matches!(Domain::polygon(clockwise), Err(Error::Validation(_))));
        let collinear = vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [1.0, 1.0]];
        assert!(matches!(Domain::polygon(collinear), Err(Error::Validation(_))));
        let dart = vec![[0.0, 0.0], [2.0, 0.0], [1.0, 0.3], [1.0, 2.0]];
        assert!(matches!(Domain::polygon(dart), Err(Error::Validation(_))));
        let pentagram: Vec<[f64; 2]> = (0..5)
            .map(|i| {
                let a = 2.0 * PI * (2 * i) as f64 / 5.0;
                [a.cos(), a.sin()]
            })
            .collect();
        assert!(matches!(Domain::polygon(pentagram), Err(Error::Validation(_))));
        assert!(Domain::polygon(vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
    }

    #[test]
    fn other_invalid_shapes() {
        assert!(Domain::interval(1.0, 1.0).is_err());
        assert!(Domain::ball(vec![0.0; 4], 1.0).is_err());
        assert!(Domain::ball(vec![0.0], 0.0).is_err());
        assert!(Domain::slab(-1.0, 2).is_err());
        assert!(Domain::lens(1.0, 0.0).is_err());
        assert!(Domain::rectangle(0.0, 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn symmetrizations_of_the_rectangle() {
        let d = rect();
        let ball = d.symmetrize(Symmetrization::EqualVolumeBall).unwrap();
        assert_eq!(ball.shape(), &Shape::Ball { center: vec![0.0, 0.0], radius: (8.0 / PI).sqrt() });
        assert_relative_eq!(ball.geometry().volume, 8.0, max_relative = 1e-12);
        assert_eq!(d.symmetrize(Symmetrization::SlabS).unwrap(), Domain::slab(1.0, 2).unwrap());
        assert_eq!(d.symmetrize(Symmetrization::IntervalI).unwrap(), Domain::interval(-1.0, 1.0).unwrap());
        match d.symmetrize(Symmetrization::LensC).unwrap().shape() {
            Shape::Lens { half_width, radius } => {
                assert_eq!(*half_width, 1.0);
                assert_relative_eq!(*radius, 2.0 * 5f64.sqrt() - 1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn inadmissible_symmetrizations() {
        let slab = Domain::slab(1.0, 2).unwrap();
        assert!(matches!(slab.symmetrize(Symmetrization::EqualVolumeBall), Err(Error::Precondition(_))));
        assert!(matches!(slab.symmetrize(Symmetrization::LensC), Err(Error::Precondition(_))));
        let ball3 = Domain::ball(vec![0.0; 3], 1.0).unwrap();
        assert!(matches!(ball3.symmetrize(Symmetrization::LensC), Err(Error::Precondition(_))));
    }

    #[test]
    fn membership_and_distance() {
        let d = rect();
        assert!(d.contains(&[0.0, 0.0]).unwrap());
        assert_eq!(d.distance_to_boundary(&[0.0, 0.0]).unwrap(), 1.0);
        let ball = Domain::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert!(!ball.contains(&[2.0, 0.0]).unwrap());
        assert_eq!(ball.distance_to_boundary(&[2.0, 0.0]).unwrap(), 0.0);
        let lens = Domain::lens(1.0, 3.0).unwrap();
        assert_eq!(lens.distance_to_boundary(&[0.0, 0.5]).unwrap(), 0.5);
        assert_eq!(lens.distance_to_boundary(&[2.5, 0.0]).unwrap(), 0.5);
        assert!(matches!(d.contains(&[0.0]), Err(Error::Domain(_))));
        let slab = Domain::slab(1.0, 3).unwrap();
        assert_eq!(slab.distance_to_boundary(&[100.0, -7.0, 0.25]).unwrap(), 0.75);
    }

    #[test]
    fn lens_geometry() {
        let g = Domain::lens(1.0, 3.0).unwrap().geometry();
        assert_eq!(g.inradius, 1.0);
        assert_eq!(g.diameter, 6.0);
        // ∫_{-1}^{1} 2√(9 − y²) dy
        let exact = 2.0 * (8f64.sqrt() + 9.0 * (1.0f64 / 3.0).asin());
        assert_relative_eq!(g.volume, exact, max_relative = 1e-14);
        let disk_like = Domain::lens(2.0, 1.0).unwrap().geometry();
        assert_relative_eq!(disk_like.volume, PI);
    }

    #[test]
    fn json_shape_round_trip() {
        let json = r#"{"shape":"rectangle","xmin":-1,"xmax":1,"ymin":-2,"ymax":2}"#;
        let d: Domain = serde_json::from_str(json).unwrap();
        assert_eq!(d, rect());
        let back: Domain = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);
        let bad = r#"{"shape":"interval","a":1,"b":0}"#;
        assert!(serde_json::from_str::<Domain>(bad).is_err());
        let alias = r#"{"shape":"convex_polygon","vertices":[[0,0],[1,0],[0,1]]}"#;
        assert!(serde_json::from_str::<Domain>(alias).is_ok());
    }

    fn regular_polygon(m: usize, radius: f64, phase: f64, stretch: f64) -> Vec<[f64; 2]> {
        (0..m)
            .map(|i| {
                let a = phase + 2.0 * PI * i as f64 / m as f64;
                [stretch * radius * a.cos(), radius * a.sin()]
            })
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn chebyshev_radius_matches_grid_maximum(
            m in 3usize..9, phase in 0.0f64..1.0, stretch in 0.4f64..2.5
        ) {
            let vertices = regular_polygon(m, 1.0, phase, stretch);
            let d = Domain::polygon(vertices.clone()).unwrap();
            let g = d.geometry();
            prop_assert!(g.inradius <= 0.5 * g.diameter + 1e-12);

            let (xs, ys): (Vec<f64>, Vec<f64>) = vertices.iter().map(|p| (p[0], p[1])).unzip();
            let (x0, x1) = (xs.iter().cloned().fold(f64::INFINITY, f64::min), xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
            let (y0, y1) = (ys.iter().cloned().fold(f64::INFINITY, f64::min), ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
            let n = 300;
            let (hx, hy) = ((x1 - x0) / n as f64, (y1 - y0) / n as f64);
            let mut grid_max: f64 = 0.0;
            for i in 0..=n {
                for j in 0..=n {
                    let p = [x0 + i as f64 * hx, y0 + j as f64 * hy];
                    let dist = d.distance_to_boundary(&p).unwrap();
                    prop_assert!(dist <= g.inradius + 1e-12);
                    grid_max = grid_max.max(dist);
                }
            }
            // distance is 1-Lipschitz, so the grid maximum is within half a cell diagonal
            prop_assert!(g.inradius - grid_max <= 0.5 * hx.hypot(hy) + 1e-12);
        }

        #[test]
        fn equal_volume_ball_preserves_volume(w in 0.1f64..5.0, h in 0.1f64..5.0) {
            let d = Domain::rectangle(0.0, w, 0.0, h).unwrap();
            let ball = d.symmetrize(Symmetrization::EqualVolumeBall).unwrap();
            prop_assert!((ball.geometry().volume / (w * h) - 1.0).abs() < 1e-12);
        }
    }
}
