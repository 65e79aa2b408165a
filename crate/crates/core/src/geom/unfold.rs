//! Exact region growing over developed triangle copies: distances from
//! chains of edges (one-sided) and from single edges (two-sided) to the
//! nearest singularity copy. This is the engine behind expanding-annulus
//! radii, cylinder heights and thick-piece sizes.

use crate::num::{orient2d, point_segment_dist_sq, segment_segment_dist_sq, Rat, Transform, Vec2};
use crate::surface::Surface;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};

/// A closed chain of sides (each traversed tail to head, consecutive
/// endpoints identified) developed into the plane, together with the seed
/// triangles of its left side.
pub struct DevelopedChain {
    /// one period of polyline vertices, length chain.len() + 1
    pub points: Vec<Vec2>,
    /// transform mapping the frame forward by one period
    pub period: Transform,
    /// (triangle, chart-into-chain-frame) for the left-side seed sectors
    pub seeds: Vec<(usize, Transform)>,
}

/// Wrap a corner's clockwise neighbor at the same vertex: used to sweep
/// the sectors on the left of a chain at a junction.
fn cw_next(s: &Surface, corner: usize) -> (usize, Transform) {
    let g = s.neighbor_transform(corner);
    (s.next_in_tri(s.partner(corner)), g)
}

/// Develop a closed chain of sides along its left. Returns None when a
/// junction pinches (zero angle on the left).
pub fn develop_chain_left(s: &Surface, chain: &[usize]) -> Option<DevelopedChain> {
    assert!(!chain.is_empty());
    let mut points = Vec::with_capacity(chain.len() + 1);
    let mut seeds: Vec<(usize, Transform)> = Vec::new();
    // frame: tail of chain[0] at origin, chart of tri(chain[0])
    let mut g = Transform { flip: false, t: s.side_tail(chain[0]).neg() };
    points.push(Vec2::zero());
    for i in 0..chain.len() {
        let side = chain[i];
        seeds.push((s.tri_of(side), g.clone()));
        points.push(g.apply(&s.side_head(side)));
        // junction walk from the head corner of `side` to the tail corner
        // of the next side, clockwise (sweeping the left sectors)
        let next_side = chain[(i + 1) % chain.len()];
        let mut c = s.next_in_tri(side);
        let mut steps = 0;
        while c != next_side {
            let (c2, step) = cw_next(s, c);
            g = g.compose(&step);
            seeds.push((s.tri_of(c2), g.clone()));
            c = c2;
            steps += 1;
            if steps > s.n_sides() {
                return None; // pinched or inconsistent chain
            }
        }
    }
    // g maps the chart of tri(chain[0]) at the start of the NEXT period
    // into the frame; the period transform on the frame is g composed with
    // the inverse of the initial chart shift
    let shift = Transform { flip: false, t: s.side_tail(chain[0]).neg() };
    let period = g.compose(&shift.inverse());
    Some(DevelopedChain { points, period, seeds })
}

fn point_in_triangle(p: &Vec2, a: &Vec2, b: &Vec2, c: &Vec2) -> bool {
    orient2d(a, b, p) != Ordering::Less
        && orient2d(b, c, p) != Ordering::Less
        && orient2d(c, a, p) != Ordering::Less
}

fn tri_polyline_dist_sq(tri: [&Vec2; 3], pts: &[Vec2]) -> Rat {
    let mut best: Option<Rat> = None;
    for w in pts.windows(2) {
        for k in 0..3 {
            let d = segment_segment_dist_sq(tri[k], tri[(k + 1) % 3], &w[0], &w[1]);
            if best.as_ref().map(|b| &d < b).unwrap_or(true) {
                best = Some(d);
            }
        }
        if point_in_triangle(&w[0], tri[0], tri[1], tri[2]) {
            return Rat::zero();
        }
    }
    best.unwrap_or_else(Rat::zero)
}

fn point_polyline_dist_sq(p: &Vec2, pts: &[Vec2]) -> Rat {
    let mut best: Option<Rat> = None;
    for w in pts.windows(2) {
        let d = point_segment_dist_sq(p, &w[0], &w[1]);
        if best.as_ref().map(|b| &d < b).unwrap_or(true) {
            best = Some(d);
        }
    }
    best.expect("empty polyline")
}

/// Core BFS: squared distance from the polyline to the nearest vertex copy
/// strictly off the polyline, exploring developed triangle copies from the
/// seeds, never crossing `forbidden` edges, and ignoring anything at
/// squared distance >= cap_sq. Returns cap_sq when nothing closer exists.
fn clearance_bfs(
    s: &Surface,
    pts: &[Vec2],
    seeds: &[(usize, Transform)],
    forbidden: &BTreeSet<usize>,
    cap_sq: &Rat,
) -> Rat {
    let mut best = cap_sq.clone();
    let mut visited: HashSet<(usize, Transform)> = HashSet::new();
    let mut stack: Vec<(usize, Transform)> = seeds.to_vec();
    while let Some((tri, g)) = stack.pop() {
        if !visited.insert((tri, g.clone())) {
            continue;
        }
        let p0 = g.apply(&s.corner_pos(3 * tri));
        let p1 = g.apply(&s.corner_pos(3 * tri + 1));
        let p2 = g.apply(&s.corner_pos(3 * tri + 2));
        if tri_polyline_dist_sq([&p0, &p1, &p2], pts) >= best {
            continue;
        }
        for (k, p) in [&p0, &p1, &p2].into_iter().enumerate() {
            let _ = k;
            let d = point_polyline_dist_sq(p, pts);
            if d.is_positive() && d < best {
                best = d;
            }
        }
        for k in 0..3 {
            let side = 3 * tri + k;
            if forbidden.contains(&s.edge_rep(side)) {
                continue;
            }
            let gn = g.compose(&s.neighbor_transform(side));
            stack.push((s.tri_of(s.partner(side)), gn));
        }
    }
    best
}

/// Extend one period of chain points to cover every point within
/// sqrt(cap) of the central copies.
fn periodize(points: &[Vec2], period: &Transform, cap_sq: &Rat) -> Vec<Vec2> {
    // crude but safe period count: reach = sqrt(cap), period length >=
    // |p_n - p_0| (straight chains) or bounded below by systole; use f64
    // with generous slack
    let reach = crate::num::rat_to_f64(cap_sq).sqrt();
    let shift = period.apply(&points[0]).sub(&points[0]);
    let plen = crate::num::rat_to_f64(&shift.norm_sq()).sqrt().max(1e-9);
    let n = ((2.0 * reach / plen).ceil() as i64 + 2).min(400);
    let mut fwd = Vec::new();
    let mut all: Vec<Vec2> = Vec::new();
    // backward copies
    let inv = period.inverse();
    let mut g = inv.clone();
    for _ in 0..n {
        let copy: Vec<Vec2> = points.iter().map(|p| g.apply(p)).collect();
        fwd.push(copy);
        g = g.compose(&inv);
    }
    for copy in fwd.into_iter().rev() {
        all.extend(copy);
    }
    all.extend(points.iter().cloned());
    let mut g = period.clone();
    for _ in 0..n {
        all.extend(points.iter().map(|p| g.apply(p)));
        g = g.compose(period);
    }
    all
}

/// Squared clearance on the left side of a closed chain of sides: the
/// distance to the first singularity copy strictly off the chain line,
/// capped at cap_sq. Returns 0 for pinched chains.
/// The same chain traversed the other way (so "left" becomes the other
/// side).
pub fn reversed_chain(s: &Surface, chain: &[usize]) -> Vec<usize> {
    chain.iter().rev().map(|&c| s.partner(c)).collect()
}

pub fn chain_clearance_sq(s: &Surface, chain: &[usize], cap_sq: &Rat) -> Rat {
    let Some(dev) = develop_chain_left(s, chain) else {
        return Rat::zero();
    };
    let pts = periodize(&dev.points, &dev.period, cap_sq);
    let forbidden: BTreeSet<usize> = chain.iter().map(|&c| s.edge_rep(c)).collect();
    clearance_bfs(s, &pts, &dev.seeds, &forbidden, cap_sq)
}

/// Squared clearance of a single edge, growing on both sides: distance to
/// the nearest vertex copy other than the edge's own endpoints in place.
pub fn edge_clearance_sq(s: &Surface, side: usize, cap_sq: &Rat) -> Rat {
    let a = s.side_tail(side);
    let b = s.side_head(side);
    // frame of tri(side); seed both adjacent triangles
    let seeds = vec![
        (s.tri_of(side), Transform::identity()),
        (s.tri_of(s.partner(side)), s.neighbor_transform(side)),
    ];
    let pts = vec![a, b];
    clearance_bfs(s, &pts, &seeds, &BTreeSet::new(), cap_sq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{rat, rat_int};
    use crate::surface::fixtures;

    #[test]
    fn torus_edge_clearance() {
        // around the horizontal edge of the unit torus, the nearest other
        // vertex copy sits at distance... copies of the single vertex fill
        // the lattice; nearest off-segment copy of Z^2 to the segment
        // [(0,0),(1,0)] is at distance 1
        let s = fixtures::square_torus();
        let c = edge_clearance_sq(&s, 0, &rat_int(100));
        assert_eq!(c, rat_int(1));
    }

    #[test]
    fn fig1_short_edge_clearance() {
        // around the short fold-adjacent edge (length 1/10) the nearest
        // singularity copy is the fold point at distance 1
        let s = fixtures::fig1();
        // side 5 is the short edge (l1 -> l0)
        assert_eq!(s.holonomy(1).norm_sq(), rat(1, 100));
        let c = edge_clearance_sq(&s, 1, &rat_int(100));
        assert_eq!(c, rat_int(1));
    }

    #[test]
    fn torus_chain_clearance_both_sides() {
        // the horizontal edge as a closed chain: one side clearance is 1
        // (next lattice row)
        let s = fixtures::square_torus();
        let left = chain_clearance_sq(&s, &[0], &rat_int(100));
        let right = chain_clearance_sq(&s, &[s.partner(0)], &rat_int(100));
        assert_eq!(left, rat_int(1));
        assert_eq!(right, rat_int(1));
    }

    #[test]
    fn fig1_beta_left_boundary_clearance() {
        // the m1 -> m2 edge (side 10) bounds the wide cylinder; growing
        // into the left rectangle stops at the x = 0 wall, distance 1
        let s = fixtures::fig1();
        assert_eq!(s.holonomy(10), &Vec2::new(rat_int(0), rat_int(2)));
        let grow_left = chain_clearance_sq(&s, &[10], &rat_int(100));
        let grow_right = chain_clearance_sq(&s, &[s.partner(10)], &rat_int(100));
        // one side reaches the l-column at distance 1; the other side is
        // the interior of the cylinder, first copies at distance 10
        let mut got = [grow_left, grow_right];
        got.sort();
        assert_eq!(got, [rat_int(1), rat_int(100)]);
    }
}
