//! Regularly sampled 2D grids: bivariate ECDFs and Gaussian KDE heat maps.
//!
//! Both grids sample the same inclusive lattice over a bounding box: column
//! `j` sits at `x_min + j/(n-1) * (x_max - x_min)` and row `i` at the
//! analogous `y`. A single column (or row) sits at the maximum. Values are
//! stored row-major with row 0 at the minimal `y`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::schedule::Point;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Bounds {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self, StatsError> {
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite || x_min >= x_max || y_min >= y_max {
            return Err(StatsError::DegenerateBounds);
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    /// Tight bounding box of the points.
    pub fn enclosing<'a, I>(points: I) -> Result<Self, StatsError>
    where
        I: IntoIterator<Item = &'a Point>,
    {
        let mut it = points.into_iter().peekable();
        if it.peek().is_none() {
            return Err(StatsError::EmptyPoints);
        }
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in it {
            if !p.is_finite() {
                return Err(StatsError::NonFiniteValue);
            }
            x0 = x0.min(p.x);
            x1 = x1.max(p.x);
            y0 = y0.min(p.y);
            y1 = y1.max(p.y);
        }
        Self::new(x0, x1, y0, y1)
    }

    pub fn x_lattice(&self, cols: usize) -> Vec<f64> {
        lattice(self.x_min, self.x_max, cols)
    }

    pub fn y_lattice(&self, rows: usize) -> Vec<f64> {
        lattice(self.y_min, self.y_max, rows)
    }
}

fn lattice(min: f64, max: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![max];
    }
    let last = count - 1;
    (0..count)
        .map(|j| {
            if j == last {
                max
            } else {
                min + (j as f64 / last as f64) * (max - min)
            }
        })
        .collect()
}

/// Row-major `rows x cols` values over a lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    rows: usize,
    cols: usize,
    bounds: Bounds,
    values: Vec<f64>,
}

impl Grid {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.cols..(row + 1) * self.cols]
    }

    fn same_shape(&self, other: &Grid) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.bounds == other.bounds
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcdfGrid(Grid);

impl EcdfGrid {
    pub fn grid(&self) -> &Grid {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid(Grid);

impl DensityGrid {
    pub fn grid(&self) -> &Grid {
        &self.0
    }
}

fn check_inputs(points: &[Point], rows: usize, cols: usize) -> Result<(), StatsError> {
    if rows == 0 || cols == 0 {
        return Err(StatsError::InvalidGridSize);
    }
    if points.is_empty() {
        return Err(StatsError::EmptyPoints);
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(StatsError::NonFiniteValue);
    }
    Ok(())
}

/// Bivariate ECDF sampled on the lattice: entry `(i, j)` is the fraction of
/// points with `x <= x_j` and `y <= y_i`.
pub fn ecdf_grid(points: &[Point], rows: usize, cols: usize, bounds: Bounds) -> Result<EcdfGrid, StatsError> {
    check_inputs(points, rows, cols)?;
    let xs = bounds.x_lattice(cols);
    let ys = bounds.y_lattice(rows);

    // Each point contributes to every lattice node at or beyond the first
    // node dominating it, so bin by that node and take 2D prefix sums.
    let mut cum = vec![0u64; rows * cols];
    for p in points {
        let j = xs.partition_point(|&x| x < p.x);
        let i = ys.partition_point(|&y| y < p.y);
        if i < rows && j < cols {
            cum[i * cols + j] += 1;
        }
    }
    for i in 0..rows {
        for j in 0..cols {
            let mut c = cum[i * cols + j];
            if i > 0 {
                c += cum[(i - 1) * cols + j];
            }
            if j > 0 {
                c += cum[i * cols + j - 1];
            }
            if i > 0 && j > 0 {
                c -= cum[(i - 1) * cols + j - 1];
            }
            cum[i * cols + j] = c;
        }
    }
    let n = points.len() as f64;
    Ok(EcdfGrid(Grid {
        rows,
        cols,
        bounds,
        values: cum.into_iter().map(|c| c as f64 / n).collect(),
    }))
}

/// Root mean squared difference of two ECDF grids over all `m * n` entries.
pub fn ecdf_rmse(a: &EcdfGrid, b: &EcdfGrid) -> Result<f64, StatsError> {
    if !a.0.same_shape(&b.0) {
        return Err(StatsError::ShapeMismatch);
    }
    let sum_sq: f64 = a.0.values.iter().zip(&b.0.values).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok((sum_sq / a.0.values.len() as f64).sqrt())
}

fn sample_sd(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (ss / (n - 1.0)).sqrt()
}

/// Scott's rule for 2D data, `sd * n^(-1/6)` per axis.
pub fn scott_bandwidth(points: &[Point]) -> Result<(f64, f64), StatsError> {
    if points.len() < 2 {
        return Err(StatsError::TooFewPoints);
    }
    let factor = (points.len() as f64).powf(-1.0 / 6.0);
    let hx = sample_sd(points.iter().map(|p| p.x)) * factor;
    let hy = sample_sd(points.iter().map(|p| p.y)) * factor;
    if !(hx > 0.0 && hy > 0.0) || !hx.is_finite() || !hy.is_finite() {
        return Err(StatsError::TooFewPoints);
    }
    Ok((hx, hy))
}

/// Product-Gaussian kernel density estimate on the lattice.
pub fn kde_grid(
    points: &[Point],
    rows: usize,
    cols: usize,
    bounds: Bounds,
    bandwidth: Option<(f64, f64)>,
) -> Result<DensityGrid, StatsError> {
    check_inputs(points, rows, cols)?;
    let (hx, hy) = match bandwidth {
        Some((hx, hy)) => {
            if !(hx.is_finite() && hy.is_finite() && hx > 0.0 && hy > 0.0) {
                return Err(StatsError::InvalidBandwidth);
            }
            (hx, hy)
        }
        None => scott_bandwidth(points)?,
    };
    let xs = bounds.x_lattice(cols);
    let ys = bounds.y_lattice(rows);
    let kernel = |d: f64, h: f64| {
        let u = d / h;
        (-0.5 * u * u).exp() / (h * (2.0 * PI).sqrt())
    };

    // the kernel is separable, so evaluate each axis once per point
    let mut values = vec![0.0f64; rows * cols];
    let mut kx = vec![0.0f64; cols];
    for p in points {
        for (k, &x) in kx.iter_mut().zip(&xs) {
            *k = kernel(x - p.x, hx);
        }
        for (i, &y) in ys.iter().enumerate() {
            let ky = kernel(y - p.y, hy);
            if ky == 0.0 {
                continue;
            }
            for (v, &k) in values[i * cols..(i + 1) * cols].iter_mut().zip(&kx) {
                *v += ky * k;
            }
        }
    }
    let n = points.len() as f64;
    values.iter_mut().for_each(|v| *v /= n);
    Ok(DensityGrid(Grid {
        rows,
        cols,
        bounds,
        values,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit() -> Bounds {
        Bounds::new(0.0, 1.0, 0.0, 1.0).unwrap()
    }

    fn brute_ecdf(points: &[Point], rows: usize, cols: usize, b: Bounds) -> Vec<f64> {
        let xs = b.x_lattice(cols);
        let ys = b.y_lattice(rows);
        let mut out = Vec::new();
        for y in &ys {
            for x in &xs {
                let c = points.iter().filter(|p| p.x <= *x && p.y <= *y).count();
                out.push(c as f64 / points.len() as f64);
            }
        }
        out
    }

    #[test]
    fn point_at_minimal_corner() {
        let g = ecdf_grid(&[Point::new(0.0, 0.0)], 2, 2, unit()).unwrap();
        assert_eq!(g.grid().values(), [1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn point_at_maximal_corner() {
        let g = ecdf_grid(&[Point::new(1.0, 1.0)], 2, 2, unit()).unwrap();
        assert_eq!(g.grid().values(), [0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn single_point_rmse() {
        let a = ecdf_grid(&[Point::new(0.0, 0.0)], 2, 2, unit()).unwrap();
        let b = ecdf_grid(&[Point::new(1.0, 1.0)], 2, 2, unit()).unwrap();
        let d = ecdf_rmse(&a, &b).unwrap();
        assert!((d - 0.75f64.sqrt()).abs() < 1e-9);
        assert!((d - 0.8660).abs() < 1e-4);
        assert_eq!(ecdf_rmse(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn single_column_sits_at_maximum() {
        let g = ecdf_grid(&[Point::new(0.5, 0.0), Point::new(1.0, 1.0)], 1, 1, unit()).unwrap();
        assert_eq!(g.grid().values(), [1.0]);
    }

    #[test]
    fn shape_mismatch() {
        let p = [Point::new(0.5, 0.5)];
        let a = ecdf_grid(&p, 2, 2, unit()).unwrap();
        let b = ecdf_grid(&p, 2, 3, unit()).unwrap();
        let c = ecdf_grid(&p, 2, 2, Bounds::new(0.0, 2.0, 0.0, 1.0).unwrap()).unwrap();
        assert_eq!(ecdf_rmse(&a, &b), Err(StatsError::ShapeMismatch));
        assert_eq!(ecdf_rmse(&a, &c), Err(StatsError::ShapeMismatch));
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(Bounds::new(1.0, 1.0, 0.0, 1.0), Err(StatsError::DegenerateBounds));
        assert_eq!(Bounds::new(0.0, f64::NAN, 0.0, 1.0), Err(StatsError::DegenerateBounds));
        assert_eq!(ecdf_grid(&[], 2, 2, unit()), Err(StatsError::EmptyPoints));
        assert_eq!(
            ecdf_grid(&[Point::new(0.0, 0.0)], 0, 2, unit()),
            Err(StatsError::InvalidGridSize)
        );
        assert_eq!(
            kde_grid(&[Point::new(0.0, 0.0)], 4, 4, unit(), None),
            Err(StatsError::TooFewPoints)
        );
        assert_eq!(
            kde_grid(&[Point::new(0.0, 0.0), Point::new(0.0, 1.0)], 4, 4, unit(), None),
            Err(StatsError::TooFewPoints)
        );
        assert_eq!(
            kde_grid(&[Point::new(0.0, 0.0)], 4, 4, unit(), Some((0.0, 1.0))),
            Err(StatsError::InvalidBandwidth)
        );
        assert_eq!(Bounds::enclosing(&[]), Err(StatsError::EmptyPoints));
        assert_eq!(
            Bounds::enclosing(&[Point::new(1.0, 1.0)]),
            Err(StatsError::DegenerateBounds)
        );
    }

    #[test]
    fn kde_peaks_at_data() {
        let pts = [Point::new(0.2, 0.3), Point::new(0.8, 0.7)];
        let g = kde_grid(&pts, 11, 11, unit(), Some((0.05, 0.05))).unwrap();
        let (imax, _) = g
            .grid()
            .values()
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        let (row, col) = (imax / 11, imax % 11);
        let nearest = [(3, 2), (7, 8)];
        assert!(nearest.contains(&(row, col)), "peak at {row},{col}");
    }

    #[test]
    fn kde_mirror_symmetry() {
        let pts = [
            Point::new(0.2, 0.1),
            Point::new(0.8, 0.1),
            Point::new(0.35, 0.6),
            Point::new(0.65, 0.6),
        ];
        let g = kde_grid(&pts, 9, 13, unit(), None).unwrap();
        let g = g.grid();
        for i in 0..g.rows() {
            for j in 0..g.cols() {
                let a = g.get(i, j);
                let b = g.get(i, g.cols() - 1 - j);
                assert!((a - b).abs() <= 1e-9 * a.max(1.0), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn kde_integrates_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<Point> = (0..1000)
            .map(|_| Point::new(rng.random::<f64>() * 4.0, rng.random::<f64>() * 2.0))
            .collect();
        let (hx, hy) = scott_bandwidth(&pts).unwrap();
        let b = Bounds::new(-6.5 * hx, 4.0 + 6.5 * hx, -6.5 * hy, 2.0 + 6.5 * hy).unwrap();
        let (rows, cols) = (120, 160);
        let g = kde_grid(&pts, rows, cols, b, None).unwrap();
        let cell = (b.x_max - b.x_min) / (cols - 1) as f64 * (b.y_max - b.y_min) / (rows - 1) as f64;
        let mass: f64 = g.grid().values().iter().sum::<f64>() * cell;
        assert!((mass - 1.0).abs() < 0.05, "mass {mass}");
        assert!(g.grid().values().iter().all(|v| v.is_finite() && *v >= 0.0));
    }

    fn points() -> impl Strategy<Value = Vec<Point>> {
        prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0).prop_map(|(x, y)| Point::new(x, y)), 1..40)
    }

    proptest! {
        #[test]
        fn ecdf_matches_brute_force(pts in points(), rows in 1usize..7, cols in 1usize..7) {
            let b = Bounds::new(-4.0, 4.0, -4.5, 3.0).unwrap();
            let g = ecdf_grid(&pts, rows, cols, b).unwrap();
            prop_assert_eq!(g.grid().values(), &brute_ecdf(&pts, rows, cols, b)[..]);
        }

        #[test]
        fn ecdf_monotone_and_bounded(pts in points(), rows in 1usize..7, cols in 1usize..7) {
            let b = Bounds::enclosing(&pts);
            prop_assume!(b.is_ok());
            let g = ecdf_grid(&pts, rows, cols, b.unwrap()).unwrap();
            let g = g.grid();
            for i in 0..rows {
                for j in 0..cols {
                    let v = g.get(i, j);
                    prop_assert!((0.0..=1.0).contains(&v));
                    if i > 0 { prop_assert!(g.get(i - 1, j) <= v); }
                    if j > 0 { prop_assert!(g.get(i, j - 1) <= v); }
                }
            }
            prop_assert_eq!(g.get(rows - 1, cols - 1), 1.0);
        }

        #[test]
        fn rmse_symmetric_and_triangle(a in points(), b in points(), c in points()) {
            let bounds = Bounds::new(-5.0, 5.0, -5.0, 5.0).unwrap();
            let ga = ecdf_grid(&a, 6, 5, bounds).unwrap();
            let gb = ecdf_grid(&b, 6, 5, bounds).unwrap();
            let gc = ecdf_grid(&c, 6, 5, bounds).unwrap();
            let ab = ecdf_rmse(&ga, &gb).unwrap();
            prop_assert_eq!(ab, ecdf_rmse(&gb, &ga).unwrap());
            prop_assert!(ab <= 1.0);
            let ac = ecdf_rmse(&ga, &gc).unwrap();
            let bc = ecdf_rmse(&gb, &gc).unwrap();
            prop_assert!(ac <= ab + bc + 1e-12);
        }
    }
}
