//! Triangulated half-translation surfaces with exact holonomy.
//!
//! A surface is a set of triangles with counterclockwise side vectors,
//! glued in pairs. Side `s` belongs to triangle `s / 3` and runs from
//! corner `s % 3` to corner `(s + 1) % 3`. A gluing identifies side `s`
//! with side `glue[s]` traversed the opposite way; the sign records the
//! holonomy of the identification: `+1` is a translation gluing
//! (`v' = -v`), `-1` a half-turn gluing (`v' = v`).

pub mod fixtures;
pub mod io;
pub mod validate;

use crate::num::{Rat, Transform, Vec2};
use num_traits::Zero;
use std::collections::BTreeSet;

#[derive(Clone, PartialEq, Eq)]
pub struct Surface {
    pub(crate) glue: Vec<usize>,
    pub(crate) sign: Vec<i8>,
    pub(crate) hol: Vec<Vec2>,
    pub(crate) corner_vertex: Vec<usize>,
    pub(crate) n_vertices: usize,
    pub(crate) marked: BTreeSet<usize>,
}

impl Surface {
    /// Assemble a surface from raw gluing data. Vertex ids are computed
    /// from the corner orbits. Geometric invariants are NOT checked here;
    /// call [`validate::validate`] for that.
    pub fn new(glue: Vec<usize>, sign: Vec<i8>, hol: Vec<Vec2>, marked: BTreeSet<usize>) -> Self {
        assert_eq!(glue.len() % 3, 0);
        assert_eq!(glue.len(), sign.len());
        assert_eq!(glue.len(), hol.len());
        let mut s = Surface {
            glue,
            sign,
            hol,
            corner_vertex: Vec::new(),
            n_vertices: 0,
            marked,
        };
        s.recompute_vertices();
        s
    }

    pub fn n_sides(&self) -> usize {
        self.glue.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.glue.len() / 3
    }

    pub fn n_edges(&self) -> usize {
        self.glue.len() / 2
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn marked(&self) -> &BTreeSet<usize> {
        &self.marked
    }

    pub fn holonomy(&self, side: usize) -> &Vec2 {
        &self.hol[side]
    }

    pub fn partner(&self, side: usize) -> usize {
        self.glue[side]
    }

    pub fn gluing_sign(&self, side: usize) -> i8 {
        self.sign[side]
    }

    pub fn tri_of(&self, side: usize) -> usize {
        side / 3
    }

    pub fn sides_of(&self, tri: usize) -> [usize; 3] {
        [3 * tri, 3 * tri + 1, 3 * tri + 2]
    }

    pub fn next_in_tri(&self, side: usize) -> usize {
        3 * (side / 3) + (side + 1) % 3
    }

    pub fn prev_in_tri(&self, side: usize) -> usize {
        3 * (side / 3) + (side + 2) % 3
    }

    /// Vertex at the tail of `side` (corner id == side id).
    pub fn vertex_at(&self, corner: usize) -> usize {
        self.corner_vertex[corner]
    }

    /// Position of corner `s % 3` in the local chart of triangle `s / 3`
    /// (corner 0 at the origin).
    pub fn corner_pos(&self, corner: usize) -> Vec2 {
        let t = corner / 3;
        match corner % 3 {
            0 => Vec2::zero(),
            1 => self.hol[3 * t].clone(),
            _ => self.hol[3 * t].add(&self.hol[3 * t + 1]),
        }
    }

    pub fn side_tail(&self, side: usize) -> Vec2 {
        self.corner_pos(side)
    }

    pub fn side_head(&self, side: usize) -> Vec2 {
        self.corner_pos(self.next_in_tri(side))
    }

    /// Transform placing the chart of the triangle across `side` into the
    /// chart of `side`'s own triangle.
    pub fn neighbor_transform(&self, side: usize) -> Transform {
        let partner = self.glue[side];
        let flip = self.sign[side] < 0;
        let head_p = self.side_head(partner);
        let tail = self.side_tail(side);
        let t = if flip { tail.add(&head_p) } else { tail.sub(&head_p) };
        Transform { flip, t }
    }

    /// The next corner counterclockwise around the vertex of `corner`.
    pub fn ccw_next_corner(&self, corner: usize) -> usize {
        self.glue[self.prev_in_tri(corner)]
    }

    /// The previous corner (clockwise) around the vertex of `corner`.
    pub fn cw_next_corner(&self, corner: usize) -> usize {
        self.next_in_tri(self.glue[corner])
    }

    pub(crate) fn recompute_vertices(&mut self) {
        let n = self.n_sides();
        let mut vert = vec![usize::MAX; n];
        let mut count = 0;
        for start in 0..n {
            if vert[start] != usize::MAX {
                continue;
            }
            let mut c = start;
            loop {
                vert[c] = count;
                c = self.ccw_next_corner(c);
                if c == start {
                    break;
                }
            }
            count += 1;
        }
        self.corner_vertex = vert;
        self.n_vertices = count;
    }

    /// All corners in the ccw orbit of the vertex `v`, starting from its
    /// lowest-numbered corner.
    pub fn corners_of_vertex(&self, v: usize) -> Vec<usize> {
        let start = (0..self.n_sides())
            .find(|&c| self.corner_vertex[c] == v)
            .expect("vertex id out of range");
        let mut out = vec![start];
        let mut c = self.ccw_next_corner(start);
        while c != start {
            out.push(c);
            c = self.ccw_next_corner(c);
        }
        out
    }

    /// Canonical side of the edge containing `side`.
    pub fn edge_rep(&self, side: usize) -> usize {
        side.min(self.glue[side])
    }

    /// Canonical sides, one per edge, in increasing order.
    pub fn edges(&self) -> Vec<usize> {
        (0..self.n_sides()).filter(|&s| s < self.glue[s]).collect()
    }

    pub fn triangle_area_twice(&self, tri: usize) -> Rat {
        self.hol[3 * tri].cross(&self.hol[3 * tri + 1])
    }

    pub fn area(&self) -> Rat {
        let mut a = Rat::zero();
        for t in 0..self.n_triangles() {
            a = a + self.triangle_area_twice(t);
        }
        a / crate::num::rat_int(2)
    }

    /// Squared length of the shortest triangulation edge. This equals the
    /// squared systole when the triangulation is Delaunay.
    pub fn min_edge_norm_sq(&self) -> Rat {
        self.edges()
            .iter()
            .map(|&s| self.hol[s].norm_sq())
            .min()
            .expect("surface has no edges")
    }

    /// Euler characteristic of the closed surface.
    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices as i64 - self.n_edges() as i64 + self.n_triangles() as i64
    }

    pub fn genus(&self) -> i64 {
        (2 - self.euler_characteristic()) / 2
    }
}
