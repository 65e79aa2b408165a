//! Exact geometric intersection numbers between saddle connections and
//! curves realized on a common surface. Only transverse crossings count:
//! collinear overlaps and endpoint touches at singularities contribute
//! nothing.

use crate::geom::SaddleConnection;
use crate::homology::relations::RelationSet;
use crate::num::{orient2d, Rat, Vec2};
use crate::surface::Surface;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeSet;

/// A curve or arc as per-triangle straight pieces in the local charts.
#[derive(Clone, Debug)]
pub struct Polyline {
    pub segs: Vec<(usize, Vec2, Vec2)>,
    pub closed: bool,
}

impl Polyline {
    pub fn from_sc(s: &Surface, sc: &SaddleConnection) -> Polyline {
        Polyline { segs: sc.segments(s), closed: false }
    }

    /// Concatenate the segments of a cyclic chain of saddle connections.
    pub fn from_chain(s: &Surface, chain: &[SaddleConnection], closed: bool) -> Polyline {
        let mut segs = Vec::new();
        for sc in chain {
            segs.extend(sc.segments(s));
        }
        Polyline { segs, closed }
    }
}

/// One transverse crossing, keyed by exact positions along both chains.
#[derive(PartialEq, Eq, PartialOrd, Ord, Clone)]
struct CrossKey {
    pos_a: (usize, Rat),
    pos_b: (usize, Rat),
}

fn crossings(s: &Surface, a: &Polyline, b: &Polyline) -> Vec<(CrossKey, i8)> {
    let mut out: BTreeSet<(CrossKey, i8)> = BTreeSet::new();
    for (ia, (ta, a0, a1)) in a.segs.iter().enumerate() {
        let da = a1.sub(a0);
        if da.is_zero() {
            continue;
        }
        for (ib, (tb, b0, b1)) in b.segs.iter().enumerate() {
            if ta != tb {
                continue;
            }
            let db = b1.sub(b0);
            if db.is_zero() {
                continue;
            }
            let denom = da.cross(&db);
            if denom.is_zero() {
                continue; // parallel or collinear: tangential, counts zero
            }
            // a0 + u da = b0 + v db
            let diff = b0.sub(a0);
            let u = diff.cross(&db) / denom.clone();
            let v = diff.cross(&da) / denom.clone();
            if u < Rat::zero() || u > crate::num::rat_int(1) || v < Rat::zero() || v > crate::num::rat_int(1) {
                continue;
            }
            let p = a0.add(&da.scale(&u));
            // crossings exactly at a vertex of the triangle never count
            let tri = *ta;
            if (0..3).any(|k| p == s.corner_pos(3 * tri + k)) {
                continue;
            }
            // canonical chain coordinates (segment index, parameter in [0,1))
            let norm = |chain: &Polyline, i: usize, t: Rat| -> Option<(usize, Rat)> {
                if t == crate::num::rat_int(1) {
                    let next = i + 1;
                    if next == chain.segs.len() {
                        if chain.closed {
                            Some((0, Rat::zero()))
                        } else {
                            None // endpoint of an open chain: a vertex, skip
                        }
                    } else {
                        Some((next, Rat::zero()))
                    }
                } else if t.is_zero() && i == 0 && !chain.closed {
                    None
                } else {
                    Some((i, t))
                }
            };
            let (Some(pos_a), Some(pos_b)) = (norm(a, ia, u), norm(b, ib, v)) else {
                continue;
            };
            let sign = if da.cross(&db).is_positive() { 1i8 } else { -1 };
            out.insert((CrossKey { pos_a, pos_b }, sign));
        }
    }
    out.into_iter().collect()
}

/// Number of transverse interior crossings. Self-intersection of a single
/// saddle connection is zero by definition.
pub fn intersection_number(s: &Surface, a: &Polyline, b: &Polyline) -> usize {
    crossings(s, a, b).len()
}

/// Signed sum of crossings; well defined because chart changes have linear
/// part ±identity, which preserves cross-product signs.
pub fn algebraic_intersection(s: &Surface, a: &Polyline, b: &Polyline) -> i64 {
    crossings(s, a, b).iter().map(|(_, sg)| *sg as i64).sum()
}

pub fn intersection_number_scs(s: &Surface, a: &SaddleConnection, b: &SaddleConnection) -> usize {
    if a.canonical(s) == b.canonical(s) {
        return 0;
    }
    intersection_number(s, &Polyline::from_sc(s, a), &Polyline::from_sc(s, b))
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum IntersectionError {
    #[error("triangulations do not share the vertex set")]
    VertexSetMismatch,
}

/// Pairwise intersection matrix between two families of saddle connections
/// on the same underlying surface. Identical connections give zero.
pub fn intersection_matrix(
    s: &Surface,
    t_a: &[SaddleConnection],
    t_b: &[SaddleConnection],
) -> Result<Vec<Vec<usize>>, IntersectionError> {
    for sc in t_a.iter().chain(t_b) {
        if sc.start_corner >= s.n_sides() || sc.end_corner >= s.n_sides() {
            return Err(IntersectionError::VertexSetMismatch);
        }
    }
    let pa: Vec<Polyline> = t_a.iter().map(|x| Polyline::from_sc(s, x)).collect();
    let pb: Vec<Polyline> = t_b.iter().map(|x| Polyline::from_sc(s, x)).collect();
    let mut m = vec![vec![0usize; t_b.len()]; t_a.len()];
    for (i, a) in t_a.iter().enumerate() {
        for (j, b) in t_b.iter().enumerate() {
            m[i][j] = if a.canonical(s) == b.canonical(s) {
                0
            } else {
                intersection_number(s, &pa[i], &pb[j])
            };
        }
    }
    Ok(m)
}

/// Unsigned slope |y| / |x| in [0, +inf], compared exactly.
fn slope_cmp(a: &Vec2, b: &Vec2) -> Ordering {
    // |y_a| * |x_b|  vs  |y_b| * |x_a|
    let lhs = a.y.abs() * b.x.abs();
    let rhs = b.y.abs() * a.x.abs();
    lhs.cmp(&rhs)
}

/// b intersects a essentially positively: the slope of b exceeds the slope
/// of a, or they cross at most `slack` times.
pub fn essentially_positive(
    s: &Surface,
    a: &SaddleConnection,
    b: &SaddleConnection,
    slack: usize,
) -> bool {
    if slope_cmp(&b.holonomy, &a.holonomy) == Ordering::Greater {
        return true;
    }
    intersection_number_scs(s, a, b) <= slack
}

/// Evaluate a relation against a target chain: the signed sum of
/// coefficient times geometric intersection number.
pub fn relation_residual(
    s: &Surface,
    relations: &RelationSet,
    rel_index: usize,
    target: &Polyline,
) -> i64 {
    let rel = &relations.relations[rel_index];
    let mut sum = 0i64;
    for (item, &c) in relations.items.iter().zip(rel.coeffs.iter()) {
        if c == 0 {
            continue;
        }
        let p = Polyline::from_sc(s, item);
        sum += c * intersection_number(s, &p, target) as i64;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::enumerate::{saddle_connections_up_to, DEFAULT_NODE_BUDGET};
    use crate::num::rat_int;
    use crate::surface::fixtures;

    fn torus_sc(p: i64, q: i64) -> SaddleConnection {
        let s = fixtures::square_torus();
        crate::geom::trace::trace_saddle_connection(&s, 0, &Vec2::new(rat_int(p), rat_int(q)))
            .unwrap_or_else(|| panic!("({p},{q}) is not a saddle connection"))
    }

    /// The (p,q) curve class realized as a circle through a generic point.
    fn torus_circle(p: i64, q: i64) -> Polyline {
        let s = fixtures::square_torus();
        let d = Vec2::new(rat_int(p), rat_int(q));
        crate::geom::trace::generic_circle(&s, &d, 4096).expect("periodic direction")
    }

    #[test]
    fn torus_ground_truth_small() {
        let s = fixtures::square_torus();
        let cases = [((1, 0), (0, 1), 1), ((1, 0), (1, 2), 2), ((1, 2), (2, 1), 3), ((1, 1), (1, -1), 2)];
        for ((p, q), (r, t), expect) in cases {
            let a = torus_circle(p, q);
            let b = torus_circle(r, t);
            assert_eq!(
                intersection_number(&s, &a, &b),
                expect,
                "I(({p},{q}),({r},{t}))"
            );
            assert_eq!(intersection_number(&s, &b, &a), expect, "symmetry");
        }
    }

    #[test]
    fn self_intersection_zero() {
        let s = fixtures::square_torus();
        let a = torus_sc(2, 3);
        assert_eq!(intersection_number_scs(&s, &a, &a), 0);
    }

    #[test]
    fn torus_lattice_oracle_exhaustive() {
        // |ps - qr| for coprime pairs with entries up to 4 here; the full
        // |.| <= 10 sweep runs in the acceptance suite
        let s = fixtures::square_torus();
        let max = 4i64;
        let mut pairs = Vec::new();
        for p in -max..=max {
            for q in -max..=max {
                if num_integer::gcd(p, q) == 1 && Vec2::new(rat_int(p), rat_int(q)).is_canonical_direction() {
                    pairs.push((p, q));
                }
            }
        }
        for &(p, q) in &pairs {
            for &(r, t) in &pairs {
                if (p, q) >= (r, t) {
                    continue;
                }
                let a = torus_circle(p, q);
                let b = torus_circle(r, t);
                let expect = (p * t - q * r).unsigned_abs() as usize;
                assert_eq!(
                    intersection_number(&s, &a, &b),
                    expect,
                    "I(({p},{q}),({r},{t}))"
                );
            }
        }
    }

    #[test]
    fn matrix_of_self_is_zero() {
        let s = fixtures::fig1();
        let edges: Vec<SaddleConnection> = s
            .edges()
            .into_iter()
            .map(|e| SaddleConnection::from_side(&s, e))
            .collect();
        let m = intersection_matrix(&s, &edges, &edges).unwrap();
        for row in &m {
            assert!(row.iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn essentially_positive_by_slope_and_slack() {
        let s = fixtures::square_torus();
        let a = torus_sc(1, 1); // slope 1
        let b = torus_sc(1, 2); // slope 2
        assert!(essentially_positive(&s, &a, &b, 0));
        // slope 1 vs slope 2 reversed: falls back to the crossing count
        assert!(!essentially_positive(&s, &b, &torus_sc(5, 2), 0));
        assert!(essentially_positive(&s, &b, &torus_sc(5, 2), 8));
    }

    #[test]
    fn triangle_relation_residual_bounded_for_flowed_targets() {
        // Targets are edges of forward-flowed Delaunay triangulations,
        // pulled back to the base surface: the setting of the relation.
        use crate::flow::{geodesic_flow, FlowMatrix};
        use crate::homology::relations::triangle_relations;
        let s = fixtures::square_torus();
        let rs = triangle_relations(&s);
        let mut targets: Vec<SaddleConnection> = Vec::new();
        for lam in [2i64, 4, 8] {
            let (f, _) = geodesic_flow(&s, &rat_int(lam)).unwrap();
            let back = FlowMatrix::diag(crate::num::rat(1, lam));
            for e in f.edges() {
                let base_hol = back.apply(f.holonomy(e));
                let sc = crate::geom::trace::trace_saddle_connection(&s, 0, &base_hol)
                    .expect("flowed edge is a base saddle connection");
                targets.push(sc);
            }
        }
        assert!(targets.len() >= 9);
        for (ri, _) in rs.relations.iter().enumerate() {
            for t in &targets {
                let res = relation_residual(&s, &rs, ri, &Polyline::from_sc(&s, t));
                assert!(res.abs() <= 1, "residual {res} for target {:?}", t.holonomy);
            }
        }
    }

    #[test]
    fn algebraic_pairing_of_relations_bounded() {
        use crate::homology::relations::{epsilon_sign, triangle_relations};
        // pair each triangle relation (edges oriented by the leaf rule)
        // against closed curves; the signed sum stays in [-1, 1]
        let s = fixtures::square_torus();
        let rs = triangle_relations(&s);
        for (p, q) in [(1i64, 0i64), (0, 1), (1, 1), (1, 2), (2, 1), (3, 2), (2, 3), (5, 1)] {
            let c = Polyline::from_sc(&s, &torus_sc(p, q));
            for rel in &rs.relations {
                let mut sum = 0i64;
                for (item, &cf) in rs.items.iter().zip(rel.coeffs.iter()) {
                    if cf == 0 {
                        continue;
                    }
                    let pl = Polyline::from_sc(&s, item);
                    let alg = algebraic_intersection(&s, &pl, &c);
                    sum += cf * epsilon_sign(&item.holonomy) * alg;
                }
                assert!(sum.abs() <= 1, "pairing {sum} for ({p},{q})");
            }
        }
    }
}
