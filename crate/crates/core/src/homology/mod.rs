//! Relative homology of (S, Sigma) over the rationals: ranks, classes of
//! saddle connections, period coordinates, the orientation double cover and
//! the relation systems over triangulation edges.

pub mod cover;
pub mod relations;

use crate::geom::SaddleConnection;
use crate::num::{Rat, Vec2};
use crate::surface::Surface;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("chain-complex rank {complex} disagrees with the formula value {formula}")]
    RankMismatch { complex: usize, formula: usize },
    #[error("the given edges do not form a basis of the relative homology")]
    NotABasis,
    #[error("surface is already orientable")]
    AlreadyOrientable,
    #[error("the fixed edges are not homologically independent")]
    DependentFixedEdges,
}

/// Dense exact matrix over Q with row-echelon utilities.
#[derive(Clone, Debug)]
pub struct RatMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn at(&self, r: usize, c: usize) -> &Rat {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        self.data[r * self.cols + c] = v;
    }

    pub fn from_columns(cols: &[Vec<Rat>]) -> Self {
        let rows = cols.first().map(|c| c.len()).unwrap_or(0);
        let mut m = RatMatrix::zero(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.echelon().len()
    }

    /// In-place forward elimination; returns the pivot column per pivot row.
    fn echelon(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self.at(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for c in 0..self.cols {
                    self.data.swap(p * self.cols + c, row * self.cols + c);
                }
            }
            let inv = Rat::one() / self.at(row, col).clone();
            for c in col..self.cols {
                let v = self.at(row, c) * &inv;
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r != row && !self.at(r, col).is_zero() {
                    let f = self.at(r, col).clone();
                    for c in col..self.cols {
                        let v = self.at(r, c) - &f * self.at(row, c);
                        self.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// Solve self * x = b; None if inconsistent. Free variables are set to
    /// zero.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = RatMatrix::zero(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.at(r, c).clone());
            }
            aug.set(r, self.cols, b[r].clone());
        }
        let pivots = aug.echelon();
        // inconsistent iff a pivot lands in the last column
        if pivots.iter().any(|&c| c == self.cols) {
            return None;
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (row, &col) in pivots.iter().enumerate() {
            x[col] = aug.at(row, self.cols).clone();
        }
        Some(x)
    }
}

/// Index of the edge (canonical-side order) for each canonical side.
pub fn edge_index_map(s: &Surface) -> (Vec<usize>, Vec<usize>) {
    let edges = s.edges();
    let mut index = vec![usize::MAX; s.n_sides()];
    for (i, &c) in edges.iter().enumerate() {
        index[c] = i;
        index[s.partner(c)] = i;
    }
    (edges, index)
}

/// Signed coefficient of `side` against its edge's canonical orientation.
pub fn side_sign(s: &Surface, side: usize) -> i64 {
    if side <= s.partner(side) {
        1
    } else {
        -1
    }
}

/// Columns of the boundary map C2 -> C1 (one per triangle).
pub fn boundary_columns(s: &Surface) -> Vec<Vec<Rat>> {
    let (edges, index) = edge_index_map(s);
    let ne = edges.len();
    let mut cols = Vec::with_capacity(s.n_triangles());
    for t in 0..s.n_triangles() {
        let mut col = vec![Rat::zero(); ne];
        for side in s.sides_of(t) {
            let e = index[side];
            col[e] = &col[e] + crate::num::rat_int(side_sign(s, side));
        }
        cols.push(col);
    }
    cols
}

/// The class of a saddle connection in C1/(im d2): a signed sum of
/// triangulation edges obtained by sliding each crossing point to a corner.
pub fn class_of(s: &Surface, sc: &SaddleConnection) -> Vec<Rat> {
    let (edges, index) = edge_index_map(s);
    let ne = edges.len();
    let mut chain = vec![Rat::zero(); ne];
    let mut add_side = |chain: &mut Vec<Rat>, side: usize, sgn: i64| {
        let e = index[side];
        chain[e] = &chain[e] + crate::num::rat_int(sgn * side_sign(s, side));
    };
    // connect two corners of one triangle along its boundary
    let connect = |chain: &mut Vec<Rat>, from_corner: usize, to_corner: usize,
                   add: &mut dyn FnMut(&mut Vec<Rat>, usize, i64)| {
        if from_corner == to_corner {
            return;
        }
        let t = from_corner / 3;
        debug_assert_eq!(t, to_corner / 3);
        if to_corner == 3 * t + (from_corner + 1) % 3 {
            add(chain, from_corner, 1);
        } else {
            // to = from + 2: go backwards along the side ending at `from`
            add(chain, to_corner, -1);
        }
    };
    let mut cur = sc.start_corner;
    for &crossed in &sc.crossings {
        // route through the tail vertex of the crossed side
        connect(&mut chain, cur, crossed, &mut add_side);
        // the same surface vertex seen from the next triangle
        cur = s.next_in_tri(s.partner(crossed));
    }
    connect(&mut chain, cur, sc.end_corner, &mut add_side);
    chain
}

/// Dimension h of the period-coordinate domain: 2g + k - 1 for orientable
/// surfaces, 2g + k - 2 otherwise; cross-checked against the chain-complex
/// rank of H1(S, Sigma; Q).
pub fn h_dimension(s: &Surface) -> Result<usize, HomologyError> {
    let complex = relative_h1_dim(s);
    let g = s.genus() as usize;
    let k = s.n_vertices();
    let formula = 2 * g + k - 1;
    if complex != formula {
        return Err(HomologyError::RankMismatch { complex, formula });
    }
    if crate::surface::validate::is_orientable(s) {
        Ok(formula)
    } else {
        Ok(formula - 1)
    }
}

/// dim H1(S, Sigma; Q) from the chain complex: E - rank(d2).
pub fn relative_h1_dim(s: &Surface) -> usize {
    let cols = boundary_columns(s);
    let ne = s.n_edges();
    let m = RatMatrix::from_columns(&cols);
    ne - m.rank()
}

/// Rank over Q of the classes of the given saddle connections in
/// H1(S, Sigma).
pub fn independent_rank(s: &Surface, edges: &[SaddleConnection]) -> usize {
    let mut cols = boundary_columns(s);
    let base = RatMatrix::from_columns(&cols).rank();
    for sc in edges {
        cols.push(class_of(s, sc));
    }
    RatMatrix::from_columns(&cols).rank() - base
}

/// Period coordinates with respect to a basis of h oriented saddle
/// connections.
pub fn period_coordinates(
    s: &Surface,
    basis: &[SaddleConnection],
) -> Result<Vec<Vec2>, HomologyError> {
    let h = h_dimension(s)?;
    if basis.len() != h || independent_rank(s, basis) != h {
        return Err(HomologyError::NotABasis);
    }
    Ok(basis.iter().map(|sc| sc.holonomy.clone()).collect())
}

/// Express `chain` as a combination of the basis classes modulo boundaries;
/// the result has one coefficient per basis element.
pub fn express_in_basis(
    s: &Surface,
    basis: &[SaddleConnection],
    chain: &[Rat],
) -> Result<Vec<Rat>, HomologyError> {
    let mut cols: Vec<Vec<Rat>> = basis.iter().map(|sc| class_of(s, sc)).collect();
    let nb = cols.len();
    cols.extend(boundary_columns(s));
    let m = RatMatrix::from_columns(&cols);
    let x = m.solve(chain).ok_or(HomologyError::NotABasis)?;
    Ok(x[..nb].to_vec())
}

/// Replace the holonomy cocycle by the one taking the given periods on the
/// basis. Every edge holonomy is reconstructed linearly; triangle closure
/// holds exactly by construction.
pub fn reconstruct_from_periods(
    s: &Surface,
    basis: &[SaddleConnection],
    periods: &[Vec2],
) -> Result<Surface, HomologyError> {
    assert_eq!(basis.len(), periods.len());
    let (edges, _index) = edge_index_map(s);
    let ne = edges.len();
    let mut out = s.clone();
    for (i, &c) in edges.iter().enumerate() {
        let mut unit = vec![Rat::zero(); ne];
        unit[i] = Rat::one();
        let coeffs = express_in_basis(s, basis, &unit)?;
        let mut v = Vec2::zero();
        for (cf, p) in coeffs.iter().zip(periods.iter()) {
            v = v.add(&p.scale(cf));
        }
        out.hol[c] = v.clone();
        let p = s.partner(c);
        out.hol[p] = if s.gluing_sign(c) > 0 { v.neg() } else { v };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::enumerate::{saddle_connections_up_to, DEFAULT_NODE_BUDGET};
    use crate::num::rat_int;
    use crate::surface::fixtures;

    #[test]
    fn h_of_fixtures() {
        assert_eq!(h_dimension(&fixtures::square_torus()).unwrap(), 2);
        assert_eq!(h_dimension(&fixtures::l_shape()).unwrap(), 4);
        // fig1: g = 2, k = 3, varsigma = -1 -> h = 2g + k - 2 = 5
        assert_eq!(h_dimension(&fixtures::fig1()).unwrap(), 5);
    }

    #[test]
    fn chain_complex_rank_matches_formula() {
        for s in [fixtures::square_torus(), fixtures::l_shape(), fixtures::fig1()] {
            let g = s.genus() as usize;
            let k = s.n_vertices();
            assert_eq!(relative_h1_dim(&s), 2 * g + k - 1);
        }
    }

    #[test]
    fn triangle_edges_have_rank_two() {
        let s = fixtures::square_torus();
        let scs: Vec<_> = s.sides_of(0).iter().map(|&e| SaddleConnection::from_side(&s, e)).collect();
        assert_eq!(independent_rank(&s, &scs), 2);
    }

    #[test]
    fn torus_connections_up_to_two_have_rank_two() {
        let s = fixtures::square_torus();
        let scs = saddle_connections_up_to(&s, &rat_int(4), DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(scs.len(), 4);
        assert_eq!(independent_rank(&s, &scs), 2);
    }

    #[test]
    fn single_loop_has_rank_one() {
        let s = fixtures::square_torus();
        let sc = SaddleConnection::from_side(&s, 0);
        assert_eq!(independent_rank(&s, &[sc]), 1);
    }

    #[test]
    fn torus_periods() {
        let s = fixtures::square_torus();
        // sides 0 and 1 have holonomy (1,0) and (0,1)
        let basis = vec![
            SaddleConnection::from_side(&s, 0),
            SaddleConnection::from_side(&s, 1),
        ];
        let periods = period_coordinates(&s, &basis).unwrap();
        assert_eq!(periods[0], Vec2::new(rat_int(1), rat_int(0)));
        assert_eq!(periods[1], Vec2::new(rat_int(0), rat_int(1)));
    }

    #[test]
    fn periods_transform_linearly_under_matrix() {
        use crate::flow::{apply_matrix, FlowMatrix};
        let s = fixtures::l_shape();
        let h = h_dimension(&s).unwrap();
        // choose h independent edges greedily
        let mut basis = Vec::new();
        for e in s.edges() {
            let cand = SaddleConnection::from_side(&s, e);
            basis.push(cand);
            if independent_rank(&s, &basis) < basis.len() {
                basis.pop();
            }
            if basis.len() == h {
                break;
            }
        }
        assert_eq!(basis.len(), h);
        let m = FlowMatrix::diag(crate::num::rat(3, 2));
        let flowed = apply_matrix(&s, &m).unwrap();
        let before = period_coordinates(&s, &basis).unwrap();
        let basis_after: Vec<_> = basis
            .iter()
            .map(|sc| SaddleConnection::from_side(&flowed, sc.start_corner))
            .collect();
        let after = period_coordinates(&flowed, &basis_after).unwrap();
        for (b, a) in before.iter().zip(after.iter()) {
            assert_eq!(m.apply(b), *a);
        }
    }

    #[test]
    fn reconstruct_roundtrip() {
        let s = fixtures::l_shape();
        let h = h_dimension(&s).unwrap();
        let mut basis = Vec::new();
        for e in s.edges() {
            basis.push(SaddleConnection::from_side(&s, e));
            if independent_rank(&s, &basis) < basis.len() {
                basis.pop();
            }
            if basis.len() == h {
                break;
            }
        }
        let periods = period_coordinates(&s, &basis).unwrap();
        let back = reconstruct_from_periods(&s, &basis, &periods).unwrap();
        assert!(back == s);
    }

    #[test]
    fn class_of_closed_edge_path_is_consistent() {
        // on the torus, the class of a length-sqrt(2) diagonal equals the
        // sum of the classes of the two unit edges
        let s = fixtures::square_torus();
        let scs = saddle_connections_up_to(&s, &rat_int(2), DEFAULT_NODE_BUDGET).unwrap();
        let diag = scs
            .iter()
            .find(|sc| sc.holonomy == Vec2::new(rat_int(1), rat_int(1)))
            .unwrap();
        let c_diag = class_of(&s, diag);
        let c0 = class_of(&s, &SaddleConnection::from_side(&s, 0));
        let c1 = class_of(&s, &SaddleConnection::from_side(&s, 1));
        let sum: Vec<Rat> = c0.iter().zip(c1.iter()).map(|(a, b)| a + b).collect();
        // difference must be a boundary
        let diff: Vec<Rat> = c_diag.iter().zip(sum.iter()).map(|(a, b)| a - b).collect();
        let bm = RatMatrix::from_columns(&boundary_columns(&s));
        assert!(bm.solve(&diff).is_some());
    }
}
