//! Point containers shared by every builder.
//!
//! Datasets are stored row-major in one flat buffer so that million-point
//! instances do not pay for a heap allocation per point.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numeric::pairwise_sum;

/// A single point in `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return invalid("a point needs at least one coordinate");
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return invalid("point coordinates must be finite");
        }
        Ok(Self(coords))
    }

    pub fn scalar(x: f64) -> Result<Self> {
        Self::new(vec![x])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Euclidean distance between two points of equal dimension.
pub fn dist(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return invalid(format!("dimension mismatch: {} vs {}", p.len(), q.len()));
    }
    Ok(sq_dist(p, q).sqrt())
}

#[inline]
pub(crate) fn sq_dist(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// An ordered collection of points sharing one dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    dim: usize,
    coords: Vec<f64>,
}

impl Dataset {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return invalid("dimension must be at least 1");
        }
        if !coords.len().is_multiple_of(dim) {
            return invalid(format!(
                "{} coordinates do not split into rows of dimension {dim}",
                coords.len()
            ));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return invalid(format!("non-finite coordinate in row {}", pos / dim));
        }
        Ok(Self { dim, coords })
    }

    pub fn empty(dim: usize) -> Self {
        Self { dim: dim.max(1), coords: Vec::new() }
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return invalid("no rows given");
        };
        let dim = first.as_ref().len();
        let mut coords = Vec::with_capacity(dim * rows.len());
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return invalid(format!("row {i} has dimension {} (expected {dim})", row.len()));
            }
            coords.extend_from_slice(row);
        }
        Self::new(dim, coords)
    }

    pub fn from_points(points: &[Point]) -> Result<Self> {
        let rows: Vec<&[f64]> = points.iter().map(Point::coords).collect();
        Self::from_rows(&rows)
    }

    /// One-dimensional dataset from scalars.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        Self::new(1, values.to_vec())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn push(&mut self, row: &[f64]) -> Result<()> {
        if row.len() != self.dim {
            return invalid(format!("row has dimension {} (expected {})", row.len(), self.dim));
        }
        if row.iter().any(|c| !c.is_finite()) {
            return invalid("non-finite coordinate");
        }
        self.coords.extend_from_slice(row);
        Ok(())
    }

    /// Rows at `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.row(i));
        }
        Self { dim: self.dim, coords }
    }

    pub fn point(&self, i: usize) -> Point {
        Point(self.row(i).to_vec())
    }

    /// First coordinate of every row; the natural view of a 1D dataset.
    pub fn first_coords(&self) -> Vec<f64> {
        self.rows().map(|r| r[0]).collect()
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.coords
    }
}

/// Points with strictly positive weights. This is the coreset representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSet {
    points: Dataset,
    weights: Vec<f64>,
    total_weight: f64,
}

impl WeightedSet {
    pub fn new(points: Dataset, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return invalid(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            ));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return invalid(format!("weight {i} is not a positive finite real"));
        }
        let total_weight = pairwise_sum(&weights);
        Ok(Self { points, weights, total_weight })
    }

    /// Every point with weight one.
    pub fn unit(points: Dataset) -> Self {
        let weights = vec![1.0; points.len()];
        let total_weight = points.len() as f64;
        Self { points, weights, total_weight }
    }

    pub fn empty(dim: usize) -> Self {
        Self { points: Dataset::empty(dim), weights: Vec::new(), total_weight: 0.0 }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn points(&self) -> &Dataset {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.points.row(i)
    }

    /// Concatenation of two weighted sets of the same dimension.
    pub fn union(&self, other: &WeightedSet) -> Result<Self> {
        if self.is_empty() {
            return Ok(other.clone());
        }
        if other.is_empty() {
            return Ok(self.clone());
        }
        if self.dim() != other.dim() {
            return invalid("cannot join weighted sets of different dimension");
        }
        let mut coords = self.points.as_flat().to_vec();
        coords.extend_from_slice(other.points.as_flat());
        let mut weights = self.weights.clone();
        weights.extend_from_slice(&other.weights);
        Self::new(Dataset::new(self.dim(), coords)?, weights)
    }

    /// Multiply every weight by `factor` (> 0).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let weights = self.weights.iter().map(|w| w * factor).collect();
        Self::new(self.points.clone(), weights)
    }
}

/// The clustering exponent `z`: 1 for median-type costs, 2 for means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Power {
    One,
    Two,
}

impl Power {
    pub fn from_exponent(z: u32) -> Result<Self> {
        match z {
            1 => Ok(Power::One),
            2 => Ok(Power::Two),
            _ => invalid(format!("exponent z must be 1 or 2, got {z}")),
        }
    }

    pub fn exponent(self) -> u32 {
        match self {
            Power::One => 1,
            Power::Two => 2,
        }
    }

    /// `dist^z` from a squared distance.
    #[inline]
    pub fn of_sq(self, sq: f64) -> f64 {
        match self {
            Power::One => sq.sqrt(),
            Power::Two => sq,
        }
    }

    /// `dist^z` from a distance.
    #[inline]
    pub fn of_dist(self, d: f64) -> f64 {
        match self {
            Power::One => d,
            Power::Two => d * d,
        }
    }

    /// Inverse of [`Power::of_dist`].
    #[inline]
    pub fn root(self, v: f64) -> f64 {
        match self {
            Power::One => v,
            Power::Two => v.sqrt(),
        }
    }
}

/// `k >= 1` centers together with the exponent of the objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterSet {
    centers: Dataset,
    power: Power,
}

impl CenterSet {
    pub fn new(centers: Dataset, power: Power) -> Result<Self> {
        if centers.is_empty() {
            return invalid("a center set needs at least one center");
        }
        Ok(Self { centers, power })
    }

    pub fn single(center: &[f64], power: Power) -> Result<Self> {
        Self::new(Dataset::new(center.len(), center.to_vec())?, power)
    }

    /// One 1D center.
    pub fn scalar(c: f64, power: Power) -> Result<Self> {
        Self::single(&[c], power)
    }

    pub fn k(&self) -> usize {
        self.centers.len()
    }

    pub fn dim(&self) -> usize {
        self.centers.dim()
    }

    pub fn power(&self) -> Power {
        self.power
    }

    pub fn centers(&self) -> &Dataset {
        &self.centers
    }

    pub fn center(&self, i: usize) -> &[f64] {
        self.centers.row(i)
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return invalid(format!(
                "center dimension {} does not match data dimension {dim}",
                self.dim()
            ));
        }
        Ok(())
    }

    /// Index of the nearest center and the squared distance to it.
    #[inline]
    pub fn nearest(&self, p: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (j, c) in self.centers.rows().enumerate() {
            let d = sq_dist(p, c);
            if d < best.1 {
                best = (j, d);
            }
        }
        best
    }

    /// `dist(p, C)^z`.
    #[inline]
    pub fn cost_of(&self, p: &[f64]) -> f64 {
        self.power.of_sq(self.nearest(p).1)
    }

    /// `dist(p, C)`.
    #[inline]
    pub fn distance(&self, p: &[f64]) -> f64 {
        self.nearest(p).1.sqrt()
    }
}
