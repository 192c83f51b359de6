//! Local constant estimator with a rectangular kernel.

use crate::error::{invalid, Result};
use crate::estimators::{Dataset, Predictor};
use crate::space::{CovariateSpace, Point};

/// Datasets larger than this are searched through a cell grid.
pub const INDEX_THRESHOLD: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LceConfig {
    pub bandwidth: f64,
    pub default_value: f64,
}

impl LceConfig {
    pub fn new(bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(invalid("bandwidth", "must be positive and finite"));
        }
        Ok(LceConfig {
            bandwidth,
            default_value: 0.0,
        })
    }
}

/// Mean response over the open ball of radius `h` around the query point,
/// `default_value` when the ball holds no data.
#[derive(Debug, Clone)]
pub struct Lce {
    space: CovariateSpace,
    cfg: LceConfig,
    dim: usize,
    /// Coordinates, flattened, in index order.
    coords: Vec<f64>,
    ys: Vec<f64>,
    /// Original dataset position of each stored row.
    order: Vec<usize>,
    grid: Option<CellGrid>,
}

#[derive(Debug, Clone)]
struct CellGrid {
    lo: f64,
    cells: Vec<usize>,
    width: Vec<f64>,
    periodic: bool,
    /// `starts[c]..starts[c+1]` are the stored rows in cell `c`.
    starts: Vec<usize>,
}

impl CellGrid {
    fn build(space: &CovariateSpace, h: f64) -> Option<CellGrid> {
        let dim = space.ambient_dim();
        if dim > 3 {
            return None;
        }
        let (lo, extents, periodic): (f64, Vec<f64>, bool) = match space {
            CovariateSpace::UnitBall3 | CovariateSpace::UnitSphere2 => (-1.0, vec![2.0; 3], false),
            CovariateSpace::Torus { dim } => (0.0, vec![1.0; *dim], true),
            CovariateSpace::Box { sides } => (0.0, sides.to_vec(), true),
        };
        // chord distance never exceeds geodesic distance, so ±1 cell covers the sphere too
        let cells: Vec<usize> = extents
            .iter()
            .map(|e| ((e / h).floor() as usize).clamp(1, 256))
            .collect();
        let width = extents.iter().zip(&cells).map(|(e, c)| e / *c as f64).collect();
        Some(CellGrid {
            lo,
            cells,
            width,
            periodic,
            starts: Vec::new(),
        })
    }

    fn axis_cell(&self, k: usize, v: f64) -> usize {
        let c = ((v - self.lo) / self.width[k]).floor();
        (c.max(0.0) as usize).min(self.cells[k] - 1)
    }

    fn cell_of(&self, x: &[f64]) -> usize {
        let mut id = 0;
        for k in (0..self.cells.len()).rev() {
            id = id * self.cells[k] + self.axis_cell(k, x[k]);
        }
        id
    }

    fn total(&self) -> usize {
        self.cells.iter().product()
    }

    /// Candidate cells along axis `k` around cell `c`, without repeats.
    fn axis_range(&self, k: usize, c: usize) -> ([usize; 3], usize) {
        let n = self.cells[k];
        if n <= 3 && self.periodic {
            return ([0, 1, 2], n);
        }
        if self.periodic {
            return ([(c + n - 1) % n, c, (c + 1) % n], 3);
        }
        let lo = c.saturating_sub(1);
        let hi = (c + 1).min(n - 1);
        let mut out = [0; 3];
        for (i, v) in (lo..=hi).enumerate() {
            out[i] = v;
        }
        (out, hi - lo + 1)
    }

    fn visit_neighbours(&self, x: &[f64], mut visit: impl FnMut(usize)) {
        let dim = self.cells.len();
        let mut ranges = [([0usize; 3], 1usize); 3];
        for (k, r) in ranges.iter_mut().enumerate().take(dim) {
            *r = self.axis_range(k, self.axis_cell(k, x[k]));
        }
        let mut pos = [0usize; 3];
        'outer: loop {
            let mut id = 0;
            for k in (0..dim).rev() {
                id = id * self.cells[k] + ranges[k].0[pos[k]];
            }
            visit(id);
            for k in 0..dim {
                pos[k] += 1;
                if pos[k] < ranges[k].1 {
                    continue 'outer;
                }
                pos[k] = 0;
            }
            break;
        }
    }
}

impl Lce {
    pub fn fit(data: &Dataset, cfg: LceConfig) -> Lce {
        let space = data.space().clone();
        let dim = space.ambient_dim();
        let mut grid = if data.len() > INDEX_THRESHOLD {
            CellGrid::build(&space, cfg.bandwidth)
        } else {
            None
        };
        let mut order: Vec<usize> = (0..data.len()).collect();
        if let Some(g) = grid.as_mut() {
            let cell: Vec<usize> = data.points().iter().map(|p| g.cell_of(p.coords())).collect();
            order.sort_by_key(|i| cell[*i]);
            let mut starts = vec![0usize; g.total() + 1];
            for c in &cell {
                starts[c + 1] += 1;
            }
            for c in 0..g.total() {
                starts[c + 1] += starts[c];
            }
            g.starts = starts;
        }
        let mut coords = Vec::with_capacity(data.len() * dim);
        let mut ys = Vec::with_capacity(data.len());
        for i in &order {
            coords.extend_from_slice(data.points()[*i].coords());
            ys.push(data.responses()[*i]);
        }
        Lce {
            space,
            cfg,
            dim,
            coords,
            ys,
            order,
            grid,
        }
    }

    pub fn config(&self) -> LceConfig {
        self.cfg
    }

    pub fn train_len(&self) -> usize {
        self.ys.len()
    }

    fn scan(&self, x: &[f64], mut hit: impl FnMut(usize)) {
        let h = self.cfg.bandwidth;
        let mut check = |row: usize| {
            let c = &self.coords[row * self.dim..(row + 1) * self.dim];
            if self.space.distance_unchecked(x, c) < h {
                hit(row);
            }
        };
        match &self.grid {
            Some(g) => g.visit_neighbours(x, |cell| {
                for row in g.starts[cell]..g.starts[cell + 1] {
                    check(row);
                }
            }),
            None => (0..self.ys.len()).for_each(check),
        }
    }

    /// Dataset indices with `distance(x, X_i) < h`, ascending.
    pub fn neighbours(&self, x: &Point) -> Vec<usize> {
        let mut out = Vec::new();
        if x.dim() == self.dim {
            self.scan(x.coords(), |row| out.push(self.order[row]));
        }
        out.sort_unstable();
        out
    }
}

impl Predictor for Lce {
    fn predict(&self, x: &Point) -> f64 {
        if x.dim() != self.dim {
            return self.cfg.default_value;
        }
        let mut sum = 0.0;
        let mut count = 0usize;
        self.scan(x.coords(), |row| {
            sum += self.ys[row];
            count += 1;
        });
        if count == 0 {
            self.cfg.default_value
        } else {
            sum / count as f64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{sample_point, Distribution, SimRng};
    use rand::SeedableRng;

    fn ball_data(n: usize, seed: u64, f: impl Fn(&Point) -> f64) -> Dataset {
        let mut rng = SimRng::seed_from_u64(seed);
        let xs: Vec<Point> = (0..n)
            .map(|_| sample_point(&CovariateSpace::UnitBall3, Distribution::UniformSpace, &mut rng).unwrap())
            .collect();
        let ys = xs.iter().map(&f).collect();
        Dataset::new(CovariateSpace::UnitBall3, xs, ys).unwrap()
    }

    #[test]
    fn empty_ball_gives_default() {
        let data = Dataset::new(CovariateSpace::UnitBall3, vec![Point::xyz(0.9, 0.0, 0.0)], vec![4.0]).unwrap();
        let lce = Lce::fit(&data, LceConfig::new(0.1).unwrap());
        assert_eq!(lce.predict(&Point::xyz(0.0, 0.0, 0.0)), 0.0);
    }

    #[test]
    fn single_and_pair_means() {
        let data = Dataset::new(
            CovariateSpace::UnitBall3,
            vec![Point::xyz(0.05, 0.0, 0.0), Point::xyz(0.5, 0.0, 0.0)],
            vec![2.5, 9.0],
        )
        .unwrap();
        let lce = Lce::fit(&data, LceConfig::new(0.1).unwrap());
        assert_eq!(lce.predict(&Point::xyz(0.0, 0.0, 0.0)), 2.5);

        let data = Dataset::new(
            CovariateSpace::UnitBall3,
            vec![Point::xyz(0.05, 0.0, 0.0), Point::xyz(-0.05, 0.0, 0.0)],
            vec![1.0, 2.0],
        )
        .unwrap();
        let lce = Lce::fit(&data, LceConfig::new(0.1).unwrap());
        assert_eq!(lce.predict(&Point::xyz(0.0, 0.0, 0.0)), 1.5);
    }

    #[test]
    fn kernel_is_strict() {
        let data = Dataset::new(CovariateSpace::UnitBall3, vec![Point::xyz(0.5, 0.0, 0.0)], vec![1.0]).unwrap();
        let lce = Lce::fit(&data, LceConfig::new(0.5).unwrap());
        assert_eq!(lce.predict(&Point::xyz(0.0, 0.0, 0.0)), 0.0);
    }

    #[test]
    fn index_matches_brute_force() {
        let f = |x: &Point| x.coords()[0] + 2.0 * x.coords()[2];
        let big = ball_data(3000, 5, f);
        let mut rng = SimRng::seed_from_u64(6);
        for h in [0.03, 0.1, 0.4, 1.5] {
            let indexed = Lce::fit(&big, LceConfig::new(h).unwrap());
            assert!(indexed.grid.is_some());
            for _ in 0..200 {
                let x = sample_point(&CovariateSpace::UnitBall3, Distribution::UniformSpace, &mut rng).unwrap();
                let expected: Vec<usize> = (0..big.len())
                    .filter(|i| CovariateSpace::UnitBall3.distance(&x, &big.points()[*i]).unwrap() < h)
                    .collect();
                assert_eq!(indexed.neighbours(&x), expected);
            }
        }
    }

    #[test]
    fn torus_index_wraps() {
        let t2 = CovariateSpace::torus(2).unwrap();
        let mut rng = SimRng::seed_from_u64(8);
        let xs: Vec<Point> = (0..2000)
            .map(|_| sample_point(&t2, Distribution::UniformSpace, &mut rng).unwrap())
            .collect();
        let ys = vec![1.0; xs.len()];
        let data = Dataset::new(t2.clone(), xs, ys).unwrap();
        for h in [0.05, 0.3, 0.45] {
            let lce = Lce::fit(&data, LceConfig::new(h).unwrap());
            for x in [Point::xy(0.0, 0.0), Point::xy(0.99, 0.5), Point::xy(0.4, 0.01)] {
                let expected: Vec<usize> = (0..data.len())
                    .filter(|i| t2.distance(&x, &data.points()[*i]).unwrap() < h)
                    .collect();
                assert_eq!(lce.neighbours(&x), expected);
            }
        }
    }

    #[test]
    fn sphere_index_matches_brute_force() {
        let s2 = CovariateSpace::UnitSphere2;
        let mut rng = SimRng::seed_from_u64(9);
        let xs: Vec<Point> = (0..1500)
            .map(|_| sample_point(&s2, Distribution::UniformSpace, &mut rng).unwrap())
            .collect();
        let ys = vec![0.5; xs.len()];
        let data = Dataset::new(s2.clone(), xs, ys).unwrap();
        let lce = Lce::fit(&data, LceConfig::new(0.2).unwrap());
        for _ in 0..100 {
            let x = sample_point(&s2, Distribution::UniformSpace, &mut rng).unwrap();
            let expected: Vec<usize> = (0..data.len())
                .filter(|i| s2.distance(&x, &data.points()[*i]).unwrap() < 0.2)
                .collect();
            assert_eq!(lce.neighbours(&x), expected);
        }
    }
}
