//! Exact ray tracing on the developed surface: the saddle connection from a
//! vertex with a given holonomy, and straight leaves from interior points.

use super::SaddleConnection;
use crate::intersections::Polyline;
use crate::num::{orient2d, Rat, Transform, Vec2};
use crate::surface::Surface;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;

/// The unique saddle connection leaving `vertex` with the given holonomy
/// (measured in the chart of whichever corner cone contains the
/// direction). None if the straight ray hits a singularity strictly before
/// the target point.
pub fn trace_saddle_connection(
    s: &Surface,
    vertex: usize,
    holonomy: &Vec2,
) -> Option<SaddleConnection> {
    'corner: for &corner in s.corners_of_vertex(vertex).iter() {
        let u = s.holonomy(corner).clone();
        let w = s.holonomy(s.prev_in_tri(corner)).neg();
        // direction strictly inside the open cone (u, w)?
        let inside =
            u.cross(holonomy).is_positive() && holonomy.cross(&w).is_positive();
        let on_u = u.cross(holonomy).is_zero() && u.dot(holonomy).is_positive();
        if on_u {
            // along the side itself: a saddle connection iff it IS the side
            return if &u == holonomy {
                Some(SaddleConnection::from_side(s, corner))
            } else {
                None
            };
        }
        if !inside {
            continue;
        }
        // walk the ray through the developed triangles; it leaves the
        // start triangle through the side opposite to the corner
        let base = s.corner_pos(corner);
        let target = holonomy.clone();
        let opposite = s.next_in_tri(corner);
        let mut g = Transform { flip: false, t: base.neg() };
        g = g.compose(&s.neighbor_transform(opposite));
        let mut crossings: Vec<usize> = vec![opposite];
        let mut entry = s.partner(opposite);
        loop {
            // current triangle is the one containing side `entry`; examine
            // the developed copies of its corners
            let tri = entry / 3;
            for k in 0..3 {
                let c = 3 * tri + k;
                let p = g.apply(&s.corner_pos(c));
                if p == target {
                    return Some(SaddleConnection {
                        start_corner: corner,
                        end_corner: c,
                        holonomy: holonomy.clone(),
                        crossings,
                    });
                }
                // a vertex strictly inside the open segment kills the ray
                if p.cross(&target).is_zero()
                    && p.dot(&target).is_positive()
                    && p.norm_sq() < target.norm_sq()
                {
                    continue 'corner;
                }
            }
            // find the exit side: the unique other side of `tri` properly
            // crossed by the open ray toward `target`
            let mut exit = None;
            for k in 0..3 {
                let side = 3 * tri + k;
                if side == entry {
                    continue;
                }
                let a = g.apply(&s.side_tail(side));
                let b = g.apply(&s.side_head(side));
                // segment (a,b) strictly crossed by segment (0, target)?
                if crate::num::segments_properly_cross(&Vec2::zero(), &target, &a, &b) {
                    exit = Some(side);
                    break;
                }
            }
            let exit = exit?;
            crossings.push(exit);
            g = g.compose(&s.neighbor_transform(exit));
            entry = s.partner(exit);
            if crossings.len() > 10_000 {
                return None;
            }
        }
    }
    None
}

/// Trace the closed straight leaf through an interior point. Returns the
/// per-triangle pieces if the leaf closes up within `max_steps` crossings
/// without meeting a vertex.
pub fn closed_leaf(
    s: &Surface,
    tri: usize,
    start: &Vec2,
    dir: &Vec2,
    max_steps: usize,
) -> Option<Polyline> {
    let mut segs: Vec<(usize, Vec2, Vec2)> = Vec::new();
    let mut cur_tri = tri;
    let mut p = start.clone();
    let mut d = dir.clone();
    for _ in 0..max_steps {
        // exit point from cur_tri along direction d
        let mut best: Option<(Rat, usize, Vec2)> = None;
        for k in 0..3 {
            let side = 3 * cur_tri + k;
            let a = s.side_tail(side);
            let b = s.side_head(side);
            let e = b.sub(&a);
            let denom = d.cross(&e);
            if denom.is_zero() {
                continue;
            }
            let t = a.sub(&p).cross(&e) / denom.clone();
            if !t.is_positive() {
                continue;
            }
            let q = p.add(&d.scale(&t));
            // q strictly interior to the side?
            let u = q.sub(&a).dot(&e);
            if !u.is_positive() || u >= e.norm_sq() {
                // hitting a corner exactly aborts the trace
                if q == a || q == b {
                    return None;
                }
                continue;
            }
            if best.as_ref().map(|(bt, _, _)| &t < bt).unwrap_or(true) {
                best = Some((t, side, q));
            }
        }
        let (_, side, q) = best?;
        // does this piece run through the start point again?
        if !segs.is_empty()
            && cur_tri == tri
            && d.cross(dir).is_zero()
            && d.dot(dir).is_positive()
        {
            let along = start.sub(&p).dot(&d);
            if start.sub(&p).cross(&d).is_zero()
                && along.is_positive()
                && along <= q.sub(&p).dot(&d)
            {
                segs.push((cur_tri, p.clone(), start.clone()));
                return Some(Polyline { segs, closed: true });
            }
        }
        segs.push((cur_tri, p.clone(), q.clone()));
        let g = s.neighbor_transform(side).inverse();
        p = g.apply(&q);
        d = g.apply_vector(&d);
        cur_tri = s.tri_of(s.partner(side));
    }
    None
}

/// A closed geodesic circle in the direction `dir` through a generic
/// interior point of the surface, if it exists: deterministic retries over
/// a sequence of basepoints inside triangle 0.
pub fn generic_circle(s: &Surface, dir: &Vec2, max_steps: usize) -> Option<Polyline> {
    for k in 2..40u32 {
        let a = s.side_tail(0);
        let b = s.side_head(0);
        let c = s.side_tail(2);
        // barycentric-ish interior point with spread coordinates
        let wa = crate::num::rat(1, k as i64 * 7 - 3);
        let wb = crate::num::rat(1, k as i64 * 13 + 1);
        let p0 = a.add(&b.sub(&a).scale(&wa)).add(&c.sub(&a).scale(&wb));
        if orient2d(&a, &b, &p0) != Ordering::Greater {
            continue;
        }
        if let Some(pl) = closed_leaf(s, 0, &p0, dir, max_steps) {
            return Some(pl);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat_int;
    use crate::surface::fixtures;

    #[test]
    fn trace_recovers_torus_connections() {
        let s = fixtures::square_torus();
        let sc = trace_saddle_connection(&s, 0, &Vec2::new(rat_int(2), rat_int(1))).unwrap();
        assert_eq!(sc.holonomy, Vec2::new(rat_int(2), rat_int(1)));
        assert_eq!(sc.crossings.len() + 1, sc.segments(&s).len());
        // (2, 2) passes through the vertex copy at (1,1): not a connection
        assert!(trace_saddle_connection(&s, 0, &Vec2::new(rat_int(2), rat_int(2))).is_none());
        // the edge itself
        let e = trace_saddle_connection(&s, 0, &Vec2::new(rat_int(1), rat_int(0))).unwrap();
        assert!(e.crossings.is_empty());
    }

    #[test]
    fn torus_circles_close() {
        let s = fixtures::square_torus();
        let c = generic_circle(&s, &Vec2::new(rat_int(1), rat_int(0)), 64).unwrap();
        assert!(c.closed);
        let c2 = generic_circle(&s, &Vec2::new(rat_int(2), rat_int(1)), 256).unwrap();
        assert!(c2.segs.len() >= 3);
    }
}
