//! Metric geometry of the quadratic differential: saddle connections,
//! cylinders, annuli, extremal-length estimators and the thick-thin
//! decomposition.

pub mod enumerate;
pub mod insert;
pub mod unfold;
pub mod trace;

use crate::num::{line_intersection, Transform, Vec2};
use crate::surface::Surface;

/// A saddle connection: a straight developed segment between singular
/// vertices, recorded as its start corner, holonomy in the start chart, and
/// the ordered list of sides its interior crosses.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SaddleConnection {
    pub start_corner: usize,
    pub end_corner: usize,
    pub holonomy: Vec2,
    pub crossings: Vec<usize>,
}

impl SaddleConnection {
    /// The triangulation edge `side` as a saddle connection (no interior
    /// crossings).
    pub fn from_side(s: &Surface, side: usize) -> SaddleConnection {
        SaddleConnection {
            start_corner: side,
            end_corner: s.next_in_tri(side),
            holonomy: s.holonomy(side).clone(),
            crossings: Vec::new(),
        }
    }

    /// Canonical unoriented representative: flip orientation unless the
    /// holonomy already points into the canonical half-plane.
    pub fn canonical(&self, s: &Surface) -> SaddleConnection {
        if self.holonomy.is_canonical_direction() {
            self.clone()
        } else {
            self.reversed(s)
        }
    }

    pub fn reversed(&self, s: &Surface) -> SaddleConnection {
        let transforms = develop_crossings(s, self.start_tri(), &self.crossings);
        let last = transforms.last().unwrap();
        let rev_hol = last.inverse().apply_vector(&self.holonomy).neg();
        let crossings: Vec<usize> = self.crossings.iter().rev().map(|&c| s.partner(c)).collect();
        SaddleConnection {
            start_corner: self.end_corner,
            end_corner: self.start_corner,
            holonomy: rev_hol,
            crossings,
        }
    }

    pub fn start_tri(&self) -> usize {
        self.start_corner / 3
    }

    pub fn end_tri(&self) -> usize {
        self.end_corner / 3
    }

    pub fn length_sq(&self) -> crate::num::Rat {
        self.holonomy.norm_sq()
    }

    pub fn start_vertex(&self, s: &Surface) -> usize {
        s.vertex_at(self.start_corner)
    }

    pub fn end_vertex(&self, s: &Surface) -> usize {
        s.vertex_at(self.end_corner)
    }

    /// True if this is a triangulation edge; returns the canonical side.
    pub fn as_edge(&self, s: &Surface) -> Option<usize> {
        if self.crossings.is_empty() {
            Some(s.edge_rep(self.start_corner))
        } else {
            None
        }
    }

    /// Per-triangle straight pieces (triangle, entry point, exit point) in
    /// each triangle's own chart. Endpoints of the whole connection are the
    /// corner positions.
    pub fn segments(&self, s: &Surface) -> Vec<(usize, Vec2, Vec2)> {
        let start = s.corner_pos(self.start_corner);
        let target = start.add(&self.holonomy);
        let transforms = develop_crossings(s, self.start_tri(), &self.crossings);
        let mut out = Vec::with_capacity(self.crossings.len() + 1);
        let mut prev_local = start.clone();
        let mut cur_tri = self.start_tri();
        for (i, &side) in self.crossings.iter().enumerate() {
            let g = &transforms[i];
            let a = g.apply(&s.side_tail(side));
            let b = g.apply(&s.side_head(side));
            let q = line_intersection(&start, &target, &a, &b);
            let q_local = g.inverse().apply(&q);
            out.push((cur_tri, prev_local, q_local.clone()));
            // transfer the point into the next triangle's chart
            let p = s.partner(side);
            let gn = &transforms[i + 1];
            prev_local = gn.inverse().apply(&q);
            cur_tri = s.tri_of(p);
        }
        let end_local = s.corner_pos(self.end_corner);
        out.push((cur_tri, prev_local, end_local));
        out
    }
}

/// Transforms G_i mapping the chart of the i-th visited triangle into the
/// chart of `start_tri`, following the given exit sides. The result has
/// length `crossings.len() + 1`.
pub fn develop_crossings(s: &Surface, start_tri: usize, crossings: &[usize]) -> Vec<Transform> {
    let mut out = Vec::with_capacity(crossings.len() + 1);
    let mut g = Transform::identity();
    out.push(g.clone());
    let mut tri = start_tri;
    for &side in crossings {
        assert_eq!(s.tri_of(side), tri, "crossing side not in current triangle");
        g = g.compose(&s.neighbor_transform(side));
        tri = s.tri_of(s.partner(side));
        out.push(g.clone());
    }
    out
}
