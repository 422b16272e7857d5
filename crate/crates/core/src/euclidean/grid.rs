//! Discretized Euclidean balls.
//!
//! Points are lattice points `spacing·k`, `k ∈ Z^d`, inside a ball around
//! the origin. Distances are compared through exact integer squared norms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite::{FiniteMetric, SearchHost};

/// Lattice points of `spacing·Z^d` within `radius` of the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridHost {
    dim: usize,
    spacing: f64,
    radius: f64,
    /// Row-major integer coordinates, `len × dim`.
    coords: Vec<i64>,
}

/// Spacing used for a `(1+ε')`-accurate discretization.
pub fn grid_spacing(d: usize, eps_prime: f64, u: f64, l: f64) -> f64 {
    eps_prime / (2.0 * (d as f64).sqrt()) * u.min(l)
}

/// Grid covering the ball of radius `2·delta`, which contains every set of
/// diameter `delta` once one of its points is moved to the origin.
pub fn discretize_ball(
    delta: f64,
    d: usize,
    eps_prime: f64,
    u: f64,
    l: f64,
    point_budget: usize,
) -> Result<GridHost> {
    if !(eps_prime > 0.0 && eps_prime.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "eps_prime must be positive, got {eps_prime}"
        )));
    }
    GridHost::ball(
        2.0 * delta,
        d,
        grid_spacing(d, eps_prime, u, l),
        point_budget,
    )
}

impl GridHost {
    /// All lattice points within `radius`, in lexicographic order of their
    /// integer coordinates. Fails once more than `point_budget` points exist.
    pub fn ball(radius: f64, dim: usize, spacing: f64, point_budget: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "dimension must be at least 1".into(),
            ));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid spacing must be positive, got {spacing}"
            )));
        }
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "radius must be nonnegative, got {radius}"
            )));
        }
        let reach = (radius / spacing + 1e-9).floor() as i64;
        let limit = (radius / spacing) * (radius / spacing) + 1e-9;
        // a cheap lower bound on the count before enumerating
        if (reach as f64 / (dim as f64).sqrt())
            .floor()
            .mul_add(2.0, 1.0)
            .powi(dim as i32)
            > point_budget as f64
        {
            return Err(Error::PointBudgetExceeded {
                budget: point_budget,
            });
        }
        let mut coords = Vec::new();
        let mut k = vec![-reach; dim];
        let mut count = 0usize;
        loop {
            let norm: i64 = k.iter().map(|x| x * x).sum();
            if (norm as f64) <= limit {
                count += 1;
                if count > point_budget {
                    return Err(Error::PointBudgetExceeded {
                        budget: point_budget,
                    });
                }
                coords.extend_from_slice(&k);
            }
            // odometer increment
            let mut axis = dim;
            loop {
                if axis == 0 {
                    return Ok(GridHost {
                        dim,
                        spacing,
                        radius,
                        coords,
                    });
                }
                axis -= 1;
                if k[axis] < reach {
                    k[axis] += 1;
                    break;
                }
                k[axis] = -reach;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn lattice(&self, p: usize) -> &[i64] {
        &self.coords[p * self.dim..(p + 1) * self.dim]
    }

    /// Coordinates of point `p`.
    pub fn point(&self, p: usize) -> Vec<f64> {
        self.lattice(p)
            .iter()
            .map(|&k| k as f64 * self.spacing)
            .collect()
    }

    /// Index of the origin.
    pub fn center(&self) -> usize {
        // the origin is the middle point of a lattice ball in lexicographic order
        self.len() / 2
    }

    /// Nearest lattice point to `x`, whether or not it lies in the ball.
    pub fn round(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .map(|&v| (v / self.spacing).round() * self.spacing)
            .collect()
    }

    fn squared(&self, p: usize, q: usize) -> i64 {
        self.lattice(p)
            .iter()
            .zip(self.lattice(q))
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    /// Explicit metric over the grid points, named by their integer coordinates.
    pub fn to_finite_metric(&self) -> FiniteMetric {
        let m = self.len();
        let names = (0..m)
            .map(|p| {
                let parts: Vec<String> = self.lattice(p).iter().map(|k| k.to_string()).collect();
                format!("g({})", parts.join(","))
            })
            .collect();
        let mut matrix = vec![0.0; m * m];
        for p in 0..m {
            for q in 0..m {
                matrix[p * m + q] = self.distance(p, q);
            }
        }
        FiniteMetric::from_trusted(names, matrix)
    }
}

impl SearchHost for GridHost {
    fn len(&self) -> usize {
        GridHost::len(self)
    }

    fn distance(&self, p: usize, q: usize) -> f64 {
        (self.squared(p, q) as f64).sqrt() * self.spacing
    }

    fn within(&self, p: usize, q: usize, radius: f64) -> bool {
        let r = radius / self.spacing;
        self.squared(p, q) as f64 <= r * r
    }

    fn beyond(&self, p: usize, q: usize, radius: f64) -> bool {
        if radius <= 0.0 {
            return true;
        }
        let r = radius / self.spacing;
        self.squared(p, q) as f64 >= r * r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    /// Lattice points in a ball, counted one coordinate at a time.
    fn lattice_count(reach: f64, dim: usize) -> usize {
        fn rec(left: f64, dim: usize) -> usize {
            if dim == 0 {
                return 1;
            }
            let r = (left + 1e-9).sqrt().floor() as i64;
            (-r..=r).map(|k| rec(left - (k * k) as f64, dim - 1)).sum()
        }
        rec(reach * reach, dim)
    }

    #[test]
    fn one_dimensional_ball() {
        let g = discretize_ball(1.0, 1, 0.5, 1.0, 1.0, 100).unwrap();
        assert_eq!(g.spacing(), 0.25);
        assert_eq!(g.len(), 17);
        assert_eq!(g.point(0), vec![-2.0]);
        assert_eq!(g.point(g.center()), vec![0.0]);
    }

    #[test]
    fn two_dimensional_count_matches_lattice_oracle() {
        let g = discretize_ball(1.0, 2, 1.0, 1.0, 1.0, 10_000).unwrap();
        let spacing = 1.0 / (2.0 * 2f64.sqrt());
        assert!((g.spacing() - spacing).abs() < 1e-15);
        assert_eq!(g.len(), lattice_count(2.0 / spacing, 2));
        assert!(
            g.len() < 4 * 4 * 4 * 4,
            "bounded by (2·radius/spacing + 1)^2"
        );
        assert_eq!(g.point(g.center()), vec![0.0, 0.0]);
    }

    #[test]
    fn three_dimensional_count() {
        let g = GridHost::ball(2.0, 3, 0.5, 100_000).unwrap();
        assert_eq!(g.len(), lattice_count(4.0, 3));
    }

    #[test]
    fn budget_is_enforced() {
        let err = discretize_ball(10.0, 2, 0.1, 1.0, 1.0, 50).unwrap_err();
        assert!(matches!(err, Error::PointBudgetExceeded { budget: 50 }));
        let err = GridHost::ball(3.0, 2, 1.0, 28).unwrap_err();
        assert!(matches!(err, Error::PointBudgetExceeded { .. }));
        assert_eq!(GridHost::ball(3.0, 2, 1.0, 29).unwrap().len(), 29);
    }

    #[test]
    fn zero_radius_is_one_point() {
        let g = GridHost::ball(0.0, 2, 0.3, 1).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.point(0), vec![0.0, 0.0]);
    }

    #[test]
    fn rounding_error_is_bounded() {
        for d in 1..=3 {
            let g = GridHost::ball(1.0, d, 0.2, 100_000).unwrap();
            let mut rng = crate::rng::stream(7, d as u64);
            for _ in 0..1000 {
                let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.5..0.5)).collect();
                let y: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.5..0.5)).collect();
                let true_d = crate::embedding::euclid(&x, &y);
                let rounded = crate::embedding::euclid(&g.round(&x), &g.round(&y));
                assert!((rounded - true_d).abs() <= (d as f64).sqrt() * g.spacing() + 1e-12);
            }
        }
    }

    #[test]
    fn exact_comparisons_agree_with_distances() {
        let g = GridHost::ball(1.0, 2, 0.25, 1000).unwrap();
        for p in 0..g.len() {
            for q in 0..g.len() {
                let d = g.distance(p, q);
                assert_eq!(g.within(p, q, 0.75), d <= 0.75 + 1e-12);
                assert_eq!(g.beyond(p, q, 0.75), d >= 0.75 - 1e-12);
            }
        }
    }

    #[test]
    fn finite_metric_view_is_valid() {
        let g = GridHost::ball(0.5, 2, 0.25, 100).unwrap();
        let m = g.to_finite_metric();
        let doc = m.to_document();
        assert!(FiniteMetric::new(doc.points, doc.matrix).is_ok());
    }
}
