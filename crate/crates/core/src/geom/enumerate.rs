//! Complete enumeration of saddle connections up to a length bound, by
//! exact wedge subdivision: from every corner, develop across the opposite
//! side, splitting the direction wedge at each developed apex.

use super::SaddleConnection;
use crate::num::{rat_int, Rat, Transform, Vec2};
use crate::surface::Surface;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumError {
    #[error("wedge search budget exceeded (explored {0} nodes); length bound too large")]
    BudgetExceeded(u64),
}

pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

/// All saddle connections with squared length <= `len_sq`, unoriented
/// (canonical direction representatives), sorted by (length, direction,
/// start corner).
pub fn saddle_connections_up_to(
    s: &Surface,
    len_sq: &Rat,
    budget: u64,
) -> Result<Vec<SaddleConnection>, EnumError> {
    let mut found: Vec<SaddleConnection> = Vec::new();

    // triangulation edges are saddle connections with empty crossing lists
    for side in s.edges() {
        if &s.holonomy(side).norm_sq() <= &len_sq.clone() {
            let sc = SaddleConnection::from_side(s, side);
            found.push(sc.canonical(s));
        }
    }

    let mut nodes: u64 = 0;
    for corner in 0..s.n_sides() {
        wedge_search(s, corner, len_sq, budget, &mut nodes, &mut found)?;
    }

    // keep canonical orientations only; each oriented connection is found
    // exactly once, so this halves the interior list without a set
    let mut out: Vec<SaddleConnection> = found
        .into_iter()
        .filter(|sc| sc.holonomy.is_canonical_direction())
        .collect();
    out.sort_by(|p, q| {
        p.length_sq()
            .cmp(&q.length_sq())
            .then_with(|| p.holonomy.pseudo_angle().cmp(&q.holonomy.pseudo_angle()))
            .then_with(|| p.start_corner.cmp(&q.start_corner))
            .then_with(|| p.crossings.cmp(&q.crossings))
    });
    out.dedup();
    Ok(out)
}

struct SearchFrame {
    /// entry side in the entered triangle (partner of the crossed side)
    entry: usize,
    /// chart of the entered triangle -> corner frame
    g: Transform,
    /// open wedge: { v | cross(right, v) > 0 and cross(v, left) > 0 }
    right: Vec2,
    left: Vec2,
    crossings: Vec<usize>,
}

fn wedge_search(
    s: &Surface,
    corner: usize,
    len_sq: &Rat,
    budget: u64,
    nodes: &mut u64,
    found: &mut Vec<SaddleConnection>,
) -> Result<(), EnumError> {
    let u = s.holonomy(corner).clone(); // toward next corner
    let w = s.holonomy(s.prev_in_tri(corner)).neg(); // toward prev corner
    let base = s.corner_pos(corner);
    // corner frame: corner at origin
    let shift = Transform { flip: false, t: base.neg() };
    let opposite = s.next_in_tri(corner);
    let mut stack = vec![SearchFrame {
        entry: s.partner(opposite),
        g: shift.compose(&Transform::identity()).compose(&s.neighbor_transform(opposite)),
        right: u,
        left: w,
        crossings: vec![opposite],
    }];

    while let Some(frame) = stack.pop() {
        *nodes += 1;
        if *nodes > budget {
            return Err(EnumError::BudgetExceeded(*nodes));
        }
        let p = frame.entry;
        let apex_corner = s.prev_in_tri(p);
        let apex = frame.g.apply(&s.corner_pos(apex_corner));
        let cr = frame.right.cross(&apex);
        let cl = apex.cross(&frame.left);
        let apex_inside = cr.is_positive() && cl.is_positive();
        if apex_inside && &apex.norm_sq() <= len_sq {
            found.push(SaddleConnection {
                start_corner: corner,
                end_corner: apex_corner,
                holonomy: apex.clone(),
                crossings: frame.crossings.clone(),
            });
        }

        // sides beyond: next(p) spans head(p)..apex, prev(p) spans apex..tail(p)
        let b = frame.g.apply(&s.side_head(p));
        let a = frame.g.apply(&s.side_tail(p));

        let mut recurse = |side: usize, right: Vec2, left: Vec2, seg_a: &Vec2, seg_b: &Vec2, stack: &mut Vec<SearchFrame>| {
            if !right.cross(&left).is_positive() {
                return; // empty open wedge
            }
            if !wedge_segment_reachable(&right, &left, seg_a, seg_b, len_sq) {
                return;
            }
            let mut crossings = frame.crossings.clone();
            crossings.push(side);
            stack.push(SearchFrame {
                entry: s.partner(side),
                g: frame.g.compose(&s.neighbor_transform(side)),
                right,
                left,
                crossings,
            });
        };

        if apex_inside {
            recurse(s.next_in_tri(p), frame.right.clone(), apex.clone(), &b, &apex, &mut stack);
            recurse(s.prev_in_tri(p), apex.clone(), frame.left.clone(), &apex, &a, &mut stack);
        } else if !cr.is_positive() {
            // apex at or right of the right boundary: everything continues
            // through prev(p)
            recurse(s.prev_in_tri(p), frame.right.clone(), frame.left.clone(), &apex, &a, &mut stack);
        } else {
            // apex at or left of the left boundary: through next(p)
            recurse(s.next_in_tri(p), frame.right.clone(), frame.left.clone(), &b, &apex, &mut stack);
        }
    }
    Ok(())
}

/// Is any point of the segment, clipped to the closed wedge, within the
/// length bound of the origin?
fn wedge_segment_reachable(right: &Vec2, left: &Vec2, a: &Vec2, b: &Vec2, len_sq: &Rat) -> bool {
    // clip parameter interval [0,1] of a + t (b - a) against both half-planes
    let d = b.sub(a);
    let mut lo = Rat::zero();
    let mut hi = rat_int(1);
    for (n, keep_positive) in [(right, true), (left, false)] {
        // constraint: cross(n, a + t d) >= 0 (or <= 0)
        let c0 = n.cross(a);
        let c1 = n.cross(&d);
        let (c0, c1) = if keep_positive { (c0, c1) } else { (-c0, -c1) };
        match c1.cmp(&Rat::zero()) {
            Ordering::Equal => {
                if c0 < Rat::zero() {
                    return false;
                }
            }
            Ordering::Greater => {
                let t = -c0 / c1;
                if t > lo {
                    lo = t;
                }
            }
            Ordering::Less => {
                let t = -c0 / c1;
                if t < hi {
                    hi = t;
                }
            }
        }
        if lo > hi {
            return false;
        }
    }
    let pa = a.add(&d.scale(&lo));
    let pb = a.add(&d.scale(&hi));
    &crate::num::point_segment_dist_sq(&Vec2::zero(), &pa, &pb) <= len_sq
}

/// Exact squared systole: the squared length of the shortest saddle
/// connection, which is always an edge of the Delaunay retriangulation.
pub fn systole_sq(s: &Surface) -> Rat {
    let (del, _) = crate::flow::make_delaunay(s).expect("delaunay for systole");
    del.min_edge_norm_sq()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;
    use crate::surface::fixtures;

    /// Independent oracle: on the square torus, unoriented saddle
    /// connections of length <= L are exactly the coprime lattice vectors
    /// (p, q) with p^2 + q^2 <= L^2, up to sign.
    pub fn coprime_vectors_up_to(len_sq: &Rat) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        let l = crate::num::rat_to_f64(len_sq).sqrt().ceil() as i64 + 1;
        for p in -l..=l {
            for q in -l..=l {
                if (p, q) == (0, 0) {
                    continue;
                }
                let v = Vec2::new(rat_int(p), rat_int(q));
                if !v.is_canonical_direction() {
                    continue;
                }
                if num_integer::gcd(p, q) != 1 {
                    continue;
                }
                if &v.norm_sq() <= len_sq {
                    out.push((p, q));
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn torus_enumeration_matches_oracle_small() {
        let s = fixtures::square_torus();
        for l in 1..=8i64 {
            let len_sq = rat_int(l * l);
            let got = saddle_connections_up_to(&s, &len_sq, DEFAULT_NODE_BUDGET).unwrap();
            let mut got_vecs: Vec<(i64, i64)> = got
                .iter()
                .map(|sc| {
                    use num_traits::ToPrimitive;
                    (
                        sc.holonomy.x.to_integer().to_i64().unwrap(),
                        sc.holonomy.y.to_integer().to_i64().unwrap(),
                    )
                })
                .collect();
            got_vecs.sort();
            got_vecs.dedup();
            assert_eq!(got_vecs.len(), got.len(), "duplicate connections at L={l}");
            assert_eq!(got_vecs, coprime_vectors_up_to(&len_sq), "mismatch at L={l}");
        }
    }

    #[test]
    fn torus_l2_is_four_connections() {
        let s = fixtures::square_torus();
        let got = saddle_connections_up_to(&s, &rat_int(4), DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(got.len(), 4);
        let got1 = saddle_connections_up_to(&s, &rat_int(1), DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(got1.len(), 2);
    }

    #[test]
    fn below_systole_is_empty() {
        for s in [fixtures::square_torus(), fixtures::l_shape(), fixtures::fig1()] {
            let sys = systole_sq(&s);
            let below = &sys * rat(99, 100);
            let got = saddle_connections_up_to(&s, &below, DEFAULT_NODE_BUDGET).unwrap();
            assert!(got.is_empty());
        }
    }

    #[test]
    fn systole_values() {
        assert_eq!(systole_sq(&fixtures::square_torus()), rat_int(1));
        let flowed = crate::flow::apply_matrix(
            &fixtures::square_torus(),
            &crate::flow::FlowMatrix::diag(rat_int(2)),
        )
        .unwrap();
        assert_eq!(systole_sq(&flowed), rat(1, 4));
        assert_eq!(systole_sq(&fixtures::fig1()), rat(1, 100));
    }

    #[test]
    fn paths_develop_straight() {
        let s = fixtures::fig1();
        let got = saddle_connections_up_to(&s, &rat_int(9), DEFAULT_NODE_BUDGET).unwrap();
        assert!(!got.is_empty());
        for sc in &got {
            let segs = sc.segments(&s);
            assert_eq!(segs.len(), sc.crossings.len() + 1);
            // total displacement equals holonomy
            let transforms = super::super::develop_crossings(&s, sc.start_tri(), &sc.crossings);
            let mut total = Vec2::zero();
            for ((tri, from, to), g) in segs.iter().zip(transforms.iter()) {
                let _ = tri;
                total = total.add(&g.apply(to).sub(&g.apply(from)));
            }
            assert_eq!(total, sc.holonomy);
        }
    }
}
