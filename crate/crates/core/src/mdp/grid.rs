use crate::error::{MdpError, Result};

/// A partition of an interval into cells, one per representative point.
///
/// Cell `i` is `[edges[i-1], edges[i])` with the outer ends taken from the
/// first and last points; the last cell is closed on the right. A point may be
/// marked as an *atom*: its cell shrinks to `{x_i}` and the neighbours absorb
/// the two half-cells it would otherwise own.
#[derive(Clone, Debug, PartialEq)]
pub struct CellGrid {
    points: Vec<f64>,
    edges: Vec<f64>,
    atoms: Vec<usize>,
}

impl CellGrid {
    /// Midpoint cells around strictly increasing `points`.
    pub fn midpoint(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(MdpError::Empty("grid needs at least one point"));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(MdpError::InvalidParameter("grid points must be strictly increasing".into()));
        }
        let edges = points.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        Ok(Self { points, edges, atoms: Vec::new() })
    }

    /// `n` evenly spaced points from `lo` to `hi`, endpoints exact.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(lo < hi) {
            return Err(MdpError::InvalidParameter(format!("uniform grid needs n >= 2 and lo < hi, got n={n}")));
        }
        let step = (hi - lo) / (n - 1) as f64;
        let points = (0..n).map(|i| if i + 1 == n { hi } else { lo + step * i as f64 }).collect();
        Self::midpoint(points)
    }

    /// Explicit cell boundaries (`edges.len() == points.len() - 1`).
    pub fn with_edges(points: Vec<f64>, edges: Vec<f64>) -> Result<Self> {
        if points.is_empty() || edges.len() + 1 != points.len() {
            return Err(MdpError::InvalidParameter("need exactly one edge between consecutive points".into()));
        }
        if edges.windows(2).any(|w| w[0] > w[1]) {
            return Err(MdpError::InvalidParameter("edges must be non-decreasing".into()));
        }
        Ok(Self { points, edges, atoms: Vec::new() })
    }

    /// Turn point `i` into a zero-width cell.
    pub fn make_atom(&mut self, i: usize) {
        let n = self.points.len();
        assert!(i < n);
        if self.atoms.contains(&i) {
            return;
        }
        let x = self.points[i];
        if i > 0 {
            self.edges[i - 1] = x;
        }
        if i + 1 < n {
            self.edges[i] = x;
        }
        self.atoms.push(i);
        self.atoms.sort_unstable();
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn atoms(&self) -> &[usize] {
        &self.atoms
    }

    pub fn is_atom(&self, i: usize) -> bool {
        self.atoms.binary_search(&i).is_ok()
    }

    pub fn cell_of(&self, x: f64) -> usize {
        for &i in &self.atoms {
            if self.points[i] == x {
                return i;
            }
        }
        self.edges.partition_point(|&e| e <= x)
    }

    /// `(lo, hi, closed)` describing cell `i` as `[lo, hi)` or `[lo, hi]`.
    pub fn cell_bounds(&self, i: usize) -> (f64, f64, bool) {
        let n = self.points.len();
        if self.is_atom(i) {
            let x = self.points[i];
            return (x, x, true);
        }
        let lo = if i == 0 { f64::NEG_INFINITY } else { self.edges[i - 1] };
        let hi = if i + 1 == n { f64::INFINITY } else { self.edges[i] };
        (lo, hi, i + 1 == n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_hits_half_exactly() {
        let g = CellGrid::uniform(0.0, 1.0, 201).unwrap();
        assert_eq!(g.points()[100], 0.5);
        assert_eq!(g.points()[200], 1.0);
        assert_eq!(g.cell_of(0.5), 100);
        assert_eq!(g.cell_of(0.0024), 0);
        assert_eq!(g.cell_of(0.0025), 1);
    }

    #[test]
    fn atom_at_right_end() {
        let mut g = CellGrid::uniform(0.0, 1.0, 3).unwrap();
        g.make_atom(2);
        assert_eq!(g.cell_of(1.0), 2);
        assert_eq!(g.cell_of(0.999_999), 1);
        assert_eq!(g.cell_bounds(1), (0.25, 1.0, false));
        assert_eq!(g.cell_bounds(2), (1.0, 1.0, true));
    }

    #[test]
    fn interior_atom() {
        let mut g = CellGrid::uniform(0.0, 1.0, 5).unwrap();
        g.make_atom(2);
        assert_eq!(g.cell_of(0.5), 2);
        assert_eq!(g.cell_of(0.49), 1);
        assert_eq!(g.cell_of(0.51), 3);
    }
}
