//! Relation systems over the edges of a triangulation: one signed relation
//! per triangle (from the vertical-leaf rule) and, on non-orientable
//! surfaces, the polygon relation supported on the cut edges whose two
//! boundary representatives develop to negatives of each other.

use super::{independent_rank, HomologyError, RatMatrix};
use crate::geom::SaddleConnection;
use crate::num::{Rat, Transform, Vec2};
use crate::surface::Surface;
use num_traits::{Signed, Zero};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelationKind {
    /// relation from the triangle with this index
    Triangle(usize),
    NonOrientable,
    /// the item with this index is frozen to zero
    FixedEdge(usize),
}

#[derive(Debug, Clone)]
pub struct Relation {
    pub kind: RelationKind,
    /// one signed integer coefficient per item of the owning RelationSet
    pub coeffs: Vec<i64>,
}

/// A set of integer relations over a common list of saddle connections
/// (the module Z[U]).
#[derive(Debug, Clone)]
pub struct RelationSet {
    pub items: Vec<SaddleConnection>,
    pub relations: Vec<Relation>,
}

impl RelationSet {
    /// Relation vectors re-expressed over a consistent orientation of the
    /// items (each item oriented to have positive perturbed horizontal
    /// component). In these coordinates the triangle relations are exactly
    /// boundaries; ranks have homological meaning.
    pub fn homology_columns(&self) -> Vec<Vec<Rat>> {
        let deltas: Vec<i64> = self.items.iter().map(|it| epsilon_sign(&it.holonomy)).collect();
        self.relations
            .iter()
            .map(|r| {
                r.coeffs
                    .iter()
                    .zip(deltas.iter())
                    .map(|(&c, &d)| crate::num::rat_int(c * d))
                    .collect()
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        let cols = self.homology_columns();
        if cols.is_empty() {
            return 0;
        }
        RatMatrix::from_columns(&cols).rank()
    }

    /// Rank of the relation vectors over GF(2). The non-orientable cut
    /// relation is independent of the triangle relations in this sense.
    pub fn rank_mod2(&self) -> usize {
        let mut rows: Vec<u128> = self
            .relations
            .iter()
            .map(|r| {
                let mut bits: u128 = 0;
                for (i, &c) in r.coeffs.iter().enumerate() {
                    if c.rem_euclid(2) == 1 {
                        bits |= 1 << i;
                    }
                }
                bits
            })
            .collect();
        assert!(self.items.len() <= 128);
        let mut rank = 0;
        for col in 0..self.items.len() {
            let mask = 1u128 << col;
            let Some(p) = (rank..rows.len()).find(|&r| rows[r] & mask != 0) else {
                continue;
            };
            rows.swap(rank, p);
            for r in 0..rows.len() {
                if r != rank && rows[r] & mask != 0 {
                    rows[r] ^= rows[rank];
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Orientation of a vector against the perturbed vertical foliation: +1 if
/// its horizontal component (after the infinitesimal clockwise rotation
/// Re -> Re - eps Im) is positive.
pub fn epsilon_sign(v: &Vec2) -> i64 {
    if !v.x.is_zero() {
        if v.x.is_positive() {
            1
        } else {
            -1
        }
    } else if v.y.is_negative() {
        1
    } else {
        -1
    }
}

/// Index of the edge of `items` matching canonical side `c`, if present.
fn item_of_side(s: &Surface, items: &[SaddleConnection], c: usize) -> Option<usize> {
    items.iter().position(|it| it.as_edge(s) == Some(s.edge_rep(c)))
}

/// Signs (+1, +1, -1) for the sides of triangle `t`: the side whose
/// horizontal span equals the sum of the other two receives -1. Exact ties
/// (one vertical side, two sides of equal span) are broken by an
/// infinitesimal clockwise rotation of the vertical direction.
pub fn triangle_relation_signs(s: &Surface, t: usize) -> [i64; 3] {
    let sides = s.sides_of(t);
    let wide = wide_side_index(&[
        s.holonomy(sides[0]).clone(),
        s.holonomy(sides[1]).clone(),
        s.holonomy(sides[2]).clone(),
    ]);
    let mut out = [1i64; 3];
    out[wide] = -1;
    out
}

fn wide_side_index(v: &[Vec2; 3]) -> usize {
    let key = |w: &Vec2| (w.x.abs(), perturbed_span(w));
    let mut best = 0;
    for i in 1..3 {
        if key(&v[i]) > key(&v[best]) {
            best = i;
        }
    }
    best
}

/// First-order change of |Re| under the rotation Re -> Re - eps Im.
fn perturbed_span(w: &Vec2) -> Rat {
    if w.x.is_zero() {
        w.y.abs()
    } else if w.x.is_positive() {
        -w.y.clone()
    } else {
        w.y.clone()
    }
}

/// One relation per listed triangle, with coefficients over `items`. Every
/// edge of each triangle must appear in `items`.
pub fn triangle_relations_over(
    s: &Surface,
    items: &[SaddleConnection],
    triangles: &[usize],
) -> RelationSet {
    let mut relations = Vec::new();
    for &t in triangles {
        let signs = triangle_relation_signs(s, t);
        let mut coeffs = vec![0i64; items.len()];
        for (k, side) in s.sides_of(t).into_iter().enumerate() {
            let idx = item_of_side(s, items, side)
                .expect("triangle side missing from the relation item list");
            coeffs[idx] += signs[k];
        }
        relations.push(Relation { kind: RelationKind::Triangle(t), coeffs });
    }
    RelationSet { items: items.to_vec(), relations }
}

/// Triangle relations of the surface's own triangulation, over its edges.
pub fn triangle_relations(s: &Surface) -> RelationSet {
    let items: Vec<SaddleConnection> = s
        .edges()
        .into_iter()
        .map(|e| SaddleConnection::from_side(s, e))
        .collect();
    let triangles: Vec<usize> = (0..s.n_triangles()).collect();
    triangle_relations_over(s, &items, &triangles)
}

/// The non-orientable relation over `items` (which must contain every edge
/// it needs): cut the surface to a polygon along edges of `items`
/// preferring to keep other edges glued, develop, and collect the cut edges
/// whose two representatives are negatives, with signs from the horizontal
/// component of the boundary-oriented occurrence.
pub fn nonorientable_relation(
    s: &Surface,
    items: &[SaddleConnection],
) -> Result<Relation, HomologyError> {
    if crate::surface::validate::is_orientable(s) {
        return Err(HomologyError::AlreadyOrientable);
    }
    let in_items: BTreeSet<usize> = s
        .edges()
        .into_iter()
        .filter(|&c| item_of_side(s, items, c).is_some())
        .collect();

    // spanning tree of the dual graph, preferring non-item edges so the cut
    // set lands inside `items`
    let nt = s.n_triangles();
    let mut tree_tf: Vec<Option<Transform>> = vec![None; nt];
    tree_tf[0] = Some(Transform::identity());
    let mut in_tree: BTreeSet<usize> = BTreeSet::new();
    loop {
        let mut grew = false;
        for pass in 0..2 {
            for side in 0..s.n_sides() {
                let c = s.edge_rep(side);
                let prefer_non_item = !in_items.contains(&c);
                if pass == 0 && !prefer_non_item {
                    continue;
                }
                let t = s.tri_of(side);
                let u = s.tri_of(s.partner(side));
                if tree_tf[t].is_some() && tree_tf[u].is_none() {
                    let g = tree_tf[t].clone().unwrap().compose(&s.neighbor_transform(side));
                    tree_tf[u] = Some(g);
                    in_tree.insert(c);
                    grew = true;
                }
            }
            if grew {
                break;
            }
        }
        if !grew {
            break;
        }
    }
    assert!(tree_tf.iter().all(|t| t.is_some()), "disconnected surface");
    let tf: Vec<Transform> = tree_tf.into_iter().map(|t| t.unwrap()).collect();

    let mut coeffs = vec![0i64; items.len()];
    let mut nonempty = false;
    for c in s.edges() {
        if in_tree.contains(&c) {
            continue;
        }
        let p = s.partner(c);
        let f1 = s.tri_of(c);
        let f2 = s.tri_of(p);
        let w1 = tf[f1].apply_vector(s.holonomy(c));
        let w2 = tf[f2].apply_vector(s.holonomy(p));
        // oriented-edge occurrences are w1 and -w2; cut edge belongs to the
        // relation iff they are negatives, i.e. w2 == w1
        if w2 != w1 {
            continue;
        }
        let idx = item_of_side(s, items, c).ok_or(HomologyError::NotABasis)?;
        let sigma = if !w1.x.is_zero() {
            if w1.x.is_positive() {
                1
            } else {
                -1
            }
        } else if w1.y.is_negative() {
            1
        } else {
            -1
        };
        coeffs[idx] += sigma;
        nonempty = true;
    }
    assert!(nonempty, "non-orientable surface must yield a nonempty cut relation");
    Ok(Relation { kind: RelationKind::NonOrientable, coeffs })
}

/// dim(Z[U] / <R>) where R consists of the given relations plus the fixed
/// edges (each frozen to zero). The fixed edges must be homologically
/// independent in H1(S, Sigma).
pub fn h_r(
    s: &Surface,
    relations: &RelationSet,
    fixed: &[usize],
) -> Result<usize, HomologyError> {
    let fixed_scs: Vec<SaddleConnection> =
        fixed.iter().map(|&i| relations.items[i].clone()).collect();
    if independent_rank(s, &fixed_scs) != fixed.len() {
        return Err(HomologyError::DependentFixedEdges);
    }
    let mut cols: Vec<Vec<Rat>> = relations.homology_columns();
    for &i in fixed {
        let mut unit = vec![Rat::zero(); relations.items.len()];
        unit[i] = crate::num::rat_int(1);
        cols.push(unit);
    }
    let rank = if cols.is_empty() { 0 } else { RatMatrix::from_columns(&cols).rank() };
    Ok(relations.items.len() - rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::fixtures;

    #[test]
    fn torus_triangle_relations() {
        let s = fixtures::square_torus();
        let rs = triangle_relations(&s);
        assert_eq!(rs.relations.len(), 2);
        for r in &rs.relations {
            let mut sorted: Vec<i64> = r.coeffs.clone();
            sorted.sort();
            assert_eq!(sorted, vec![-1, 1, 1]);
        }
        // both triangles share the same three edges: rank 1
        assert_eq!(rs.rank(), 1);
    }

    #[test]
    fn torus_h_r_drops_by_fixed_edges() {
        let s = fixtures::square_torus();
        let rs = triangle_relations(&s);
        assert_eq!(h_r(&s, &rs, &[]).unwrap(), 2);
        // fix the horizontal edge (1,0): item of side 0
        let idx = rs
            .items
            .iter()
            .position(|it| it.holonomy == Vec2::new(crate::num::rat_int(1), crate::num::rat_int(0)))
            .unwrap();
        assert_eq!(h_r(&s, &rs, &[idx]).unwrap(), 1);
    }

    #[test]
    fn torus_nonorientable_rejected() {
        let s = fixtures::square_torus();
        let rs = triangle_relations(&s);
        assert!(matches!(
            nonorientable_relation(&s, &rs.items),
            Err(HomologyError::AlreadyOrientable)
        ));
    }

    #[test]
    fn fig1_nonorientable_relation_increases_rank() {
        let s = fixtures::fig1();
        let mut rs = triangle_relations(&s);
        // mod 2 the triangle relations are exactly the boundaries
        let base_rank2 = rs.rank_mod2();
        assert_eq!(base_rank2, s.n_triangles() - 1);
        let rel = nonorientable_relation(&s, &rs.items).unwrap();
        assert!(rel.coeffs.iter().any(|&c| c != 0));
        rs.relations.push(rel);
        // the cut edges are independent in Z2-relative homology
        assert_eq!(rs.rank_mod2(), base_rank2 + 1);
    }

    #[test]
    fn fig1_h_r_matches_h_minus_j() {
        use crate::homology::h_dimension;
        let s = fixtures::fig1();
        let h = h_dimension(&s).unwrap();
        let mut rs = triangle_relations(&s);
        let rel = nonorientable_relation(&s, &rs.items).unwrap();
        rs.relations.push(rel);
        assert_eq!(h_r(&s, &rs, &[]).unwrap(), h);
        // fix the short edge (side 5 is edge 1 of the polygon, length 1/10)
        let short_idx = rs
            .items
            .iter()
            .position(|it| it.length_sq() == crate::num::rat(1, 100))
            .unwrap();
        assert_eq!(h_r(&s, &rs, &[short_idx]).unwrap(), h - 1);
    }

    #[test]
    fn lshape_h_r_is_h() {
        use crate::homology::h_dimension;
        let s = fixtures::l_shape();
        let h = h_dimension(&s).unwrap();
        let rs = triangle_relations(&s);
        assert_eq!(h_r(&s, &rs, &[]).unwrap(), h);
        for j in 1..=2usize {
            // greedily pick j independent disjoint edges
            let mut fixed: Vec<usize> = Vec::new();
            for (i, _) in rs.items.iter().enumerate() {
                let mut cand = fixed.clone();
                cand.push(i);
                let scs: Vec<_> = cand.iter().map(|&k| rs.items[k].clone()).collect();
                if independent_rank(&s, &scs) == cand.len() {
                    fixed = cand;
                }
                if fixed.len() == j {
                    break;
                }
            }
            assert_eq!(fixed.len(), j);
            assert_eq!(h_r(&s, &rs, &fixed).unwrap(), h - j);
        }
    }
}
