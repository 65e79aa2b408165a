//! The SL(2,R) action on holonomy coordinates and the Teichmüller geodesic
//! flow, parametrized by a rational stretch factor so every intermediate
//! surface stays exact. Delaunay retriangulation keeps triangulations
//! geometric along the way.

use crate::num::{incircle, rat, rat_int, rat_to_f64, Rat, Vec2};
use crate::surface::Surface;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlowError {
    #[error("matrix determinant is not ±1")]
    InvalidDeterminant,
    #[error("triangle {0} degenerates under the matrix; retriangulate first")]
    DegenerateTriangle(usize),
    #[error("flow factor must be positive")]
    NonPositiveFactor,
    #[error("edge {0} violates the Delaunay predicate but is glued to its own triangle")]
    UnflippableEdge(usize),
}

/// A 2x2 rational matrix acting on holonomy vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowMatrix {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
    pub d: Rat,
}

impl FlowMatrix {
    pub fn diag(lambda: Rat) -> Self {
        FlowMatrix {
            a: lambda.clone(),
            b: Rat::zero(),
            c: Rat::zero(),
            d: Rat::one() / lambda,
        }
    }

    pub fn shear(k: Rat) -> Self {
        FlowMatrix { a: Rat::one(), b: k, c: Rat::zero(), d: Rat::one() }
    }

    pub fn det(&self) -> Rat {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn apply(&self, v: &Vec2) -> Vec2 {
        Vec2::new(&self.a * &v.x + &self.b * &v.y, &self.c * &v.x + &self.d * &v.y)
    }
}

/// One recorded flip: the canonical side of the flipped edge and the
/// cumulative stretch factor at which it happened.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipEvent {
    pub edge: usize,
    pub at_lambda: Rat,
}

pub type FlipLog = Vec<FlipEvent>;

/// Apply a |det| = 1 matrix to every holonomy vector. Combinatorics are
/// unchanged; fails if some triangle would lose positive orientation.
pub fn apply_matrix(s: &Surface, m: &FlowMatrix) -> Result<Surface, FlowError> {
    if m.det().abs() != Rat::one() {
        return Err(FlowError::InvalidDeterminant);
    }
    let mut out = s.clone();
    for h in out.hol.iter_mut() {
        *h = m.apply(h);
    }
    for t in 0..out.n_triangles() {
        if !out.triangle_area_twice(t).is_positive() {
            return Err(FlowError::DegenerateTriangle(t));
        }
    }
    Ok(out)
}

/// Developed quad around an interior edge: (A, B) the edge endpoints in the
/// chart of `side`'s triangle, C the apex of that triangle, D the developed
/// apex of the partner triangle.
pub(crate) fn edge_quad(s: &Surface, side: usize) -> (Vec2, Vec2, Vec2, Vec2) {
    let p = s.partner(side);
    let g = s.neighbor_transform(side);
    let a = s.corner_pos(side);
    let b = s.corner_pos(s.next_in_tri(side));
    let c = s.corner_pos(s.prev_in_tri(side));
    let d = g.apply(&s.corner_pos(s.prev_in_tri(p)));
    (a, b, c, d)
}

/// True iff the edge satisfies the flat Delaunay property (opposite apex on
/// or outside the circumcircle).
pub fn edge_is_delaunay(s: &Surface, side: usize) -> bool {
    let (a, b, c, d) = edge_quad(s, side);
    incircle(&a, &b, &c, &d) != Ordering::Greater
}

/// True if the edge lies between two distinct triangles and its flip quad
/// is strictly convex, so the flip is geometrically valid.
pub(crate) fn edge_is_flippable(s: &Surface, side: usize) -> bool {
    let p = s.partner(side);
    if s.tri_of(side) == s.tri_of(p) {
        return false;
    }
    let (a, b, c, d) = edge_quad(s, side);
    // new triangles (A, D, C) and (D, B, C) must be positively oriented
    d.sub(&a).cross(&c.sub(&d)).is_positive() && b.sub(&d).cross(&c.sub(&b)).is_positive()
}

/// Flip the edge through `side` in place, returning the slot remapping of
/// the four outer sides as (old, new) pairs. Caller must ensure the two
/// adjacent triangles are distinct and the flip quad is strictly convex
/// (always true for a Delaunay violation).
pub(crate) fn flip_edge(s: &mut Surface, side: usize) -> [(usize, usize); 4] {
    let p = s.partner(side);
    let t = s.tri_of(side);
    let u = s.tri_of(p);
    assert_ne!(t, u, "flip of self-glued edge");
    let g = s.neighbor_transform(side);
    let (a, b, c, d) = edge_quad(s, side);

    let sn = s.next_in_tri(side);
    let sp = s.prev_in_tri(side);
    let pn = s.next_in_tri(p);
    let pp = s.prev_in_tri(p);

    // slot assignment:
    //   tri t: [A->D, D->C, C->A]   tri u: [D->B, B->C, C->D]
    let slot_of = |old: usize| -> usize {
        if old == pn {
            3 * t
        } else if old == sp {
            3 * t + 2
        } else if old == pp {
            3 * u
        } else if old == sn {
            3 * u + 1
        } else {
            unreachable!()
        }
    };
    let transformed = |old: usize| -> bool { g.flip && (old == pn || old == pp) };

    let va = s.corner_vertex[side];
    let vb = s.corner_vertex[sn];
    let vc = s.corner_vertex[sp];
    let vd = s.corner_vertex[pp];

    let outer = [pn, sp, pp, sn];
    let mut new_glue = s.glue.clone();
    let mut new_sign = s.sign.clone();
    let mut new_hol = s.hol.clone();

    for &o in &outer {
        let q = s.glue[o];
        let ns = slot_of(o);
        let (nq, q_moved) = if outer.contains(&q) { (slot_of(q), true) } else { (q, false) };
        new_glue[ns] = nq;
        new_glue[nq] = ns;
        let mut sg = s.sign[o];
        let flips = transformed(o) as u8 + if q_moved { transformed(q) as u8 } else { 0 };
        if flips % 2 == 1 {
            sg = -sg;
        }
        new_sign[ns] = sg;
        new_sign[nq] = sg;
        let v = if transformed(o) { s.hol[o].neg() } else { s.hol[o].clone() };
        new_hol[ns] = v;
        if !q_moved {
            new_hol[nq] = s.hol[q].clone();
        }
    }

    // the new diagonal, both copies in the chart of t
    new_hol[3 * t + 1] = c.sub(&d);
    new_hol[3 * u + 2] = d.sub(&c);
    new_glue[3 * t + 1] = 3 * u + 2;
    new_glue[3 * u + 2] = 3 * t + 1;
    new_sign[3 * t + 1] = 1;
    new_sign[3 * u + 2] = 1;

    let mut new_cv = s.corner_vertex.clone();
    new_cv[3 * t] = va;
    new_cv[3 * t + 1] = vd;
    new_cv[3 * t + 2] = vc;
    new_cv[3 * u] = vd;
    new_cv[3 * u + 1] = vb;
    new_cv[3 * u + 2] = vc;

    s.glue = new_glue;
    s.sign = new_sign;
    s.hol = new_hol;
    s.corner_vertex = new_cv;

    debug_assert!(s.triangle_area_twice(t).is_positive(), "flip produced flat triangle");
    debug_assert!(s.triangle_area_twice(u).is_positive(), "flip produced flat triangle");
    debug_assert_eq!(a.sub(&b).norm_sq().is_zero(), false);
    [(pn, 3 * t), (sp, 3 * t + 2), (pp, 3 * u), (sn, 3 * u + 1)]
}

/// Apply a flip's side remapping to a list of tracked side ids.
pub(crate) fn remap_sides(map: &[(usize, usize); 4], tracked: &mut [usize]) {
    for t in tracked.iter_mut() {
        if let Some(&(_, new)) = map.iter().find(|&&(old, _)| old == *t) {
            *t = new;
        }
    }
}

/// Flip until every non-frozen edge satisfies the Delaunay predicate.
/// `frozen` is a per-side bitset of constrained edges, kept in sync across
/// flips. Ties (cocircular quads) never flip, so the result is idempotent.
pub(crate) fn make_delaunay_frozen(
    s: &mut Surface,
    frozen: &mut Vec<bool>,
    mut on_flip: impl FnMut(usize),
) -> Result<(), FlowError> {
    let mut queue: VecDeque<usize> = s.edges().into();
    let mut budget: u64 = 10_000_000;
    while let Some(side) = queue.pop_front() {
        let p = s.partner(side);
        if frozen[side] || frozen[p] {
            continue;
        }
        if edge_is_delaunay(s, side) {
            continue;
        }
        if s.tri_of(side) == s.tri_of(p) {
            return Err(FlowError::UnflippableEdge(s.edge_rep(side)));
        }
        budget = budget.checked_sub(1).expect("Delaunay flip budget exhausted");
        let _ = budget;
        on_flip(s.edge_rep(side));
        let map = flip_edge(s, side);
        apply_flip_to_frozen(&map, frozen);
        let t = s.tri_of(side);
        let u = s.tri_of(p);
        for e in s.sides_of(t).into_iter().chain(s.sides_of(u)) {
            queue.push_back(e.min(s.partner(e)));
        }
    }
    Ok(())
}

/// Update a per-side frozen bitset across a flip.
pub(crate) fn apply_flip_to_frozen(map: &[(usize, usize); 4], frozen: &mut [bool]) {
    let olds: Vec<bool> = map.iter().map(|&(o, _)| frozen[o]).collect();
    let t = map[0].1 / 3;
    let u = map[2].1 / 3;
    for k in 0..3 {
        frozen[3 * t + k] = false;
        frozen[3 * u + k] = false;
    }
    for (i, &(_, n)) in map.iter().enumerate() {
        frozen[n] = olds[i];
    }
}

/// Retriangulate to the flat Delaunay triangulation. The surface metric is
/// unchanged (same singularities, same saddle connections).
pub fn make_delaunay(s: &Surface) -> Result<(Surface, FlipLog), FlowError> {
    let mut out = s.clone();
    let mut log = Vec::new();
    let mut frozen = vec![false; s.n_sides()];
    make_delaunay_frozen(&mut out, &mut frozen, |e| {
        log.push(FlipEvent { edge: e, at_lambda: rat_int(1) })
    })?;
    Ok((out, log))
}

pub fn is_delaunay(s: &Surface) -> bool {
    s.edges().iter().all(|&e| edge_is_delaunay(s, e))
}

/// Teichmüller geodesic flow by diag(lambda, 1/lambda), applied in rational
/// sub-steps with Delaunay flips in between, so every intermediate
/// triangulation is geometric. The product of the sub-steps is exactly
/// `lambda`.
pub fn geodesic_flow(s: &Surface, lambda: &Rat) -> Result<(Surface, FlipLog), FlowError> {
    if !lambda.is_positive() {
        return Err(FlowError::NonPositiveFactor);
    }
    let mut out = s.clone();
    let mut log: FlipLog = Vec::new();
    if lambda.is_one() {
        return Ok((out, log));
    }

    // pick k sub-steps of roughly equal size, each within 1% of lambda^(1/k)
    let lf = rat_to_f64(lambda).abs();
    let k = (lf.ln().abs() / 1.4f64.ln()).ceil().max(1.0) as usize;
    let step = crate::num::rat_from_f64(lf.powf(1.0 / k as f64), 1_000_000);
    let mut cumulative = Rat::one();
    for i in 0..k {
        let factor = if i + 1 == k {
            // land exactly on lambda
            lambda / &cumulative
        } else {
            step.clone()
        };
        cumulative = &cumulative * &factor;
        out = apply_matrix(&out, &FlowMatrix::diag(factor))?;
        let at = cumulative.clone();
        let mut frozen = vec![false; out.n_sides()];
        make_delaunay_frozen(&mut out, &mut frozen, |e| {
            log.push(FlipEvent { edge: e, at_lambda: at.clone() })
        })?;
    }
    debug_assert_eq!(cumulative, *lambda);
    Ok((out, log))
}

/// Convenience: a rational approximation of e^tau with denominator 10^6,
/// used wherever the paper's real time parameter must be pinned.
pub fn lambda_for_tau(tau: f64) -> Rat {
    crate::num::rat_from_f64(tau.exp(), 1_000_000)
}

/// Shear matrix [[1, k], [0, 1]] as a surface operation.
pub fn sheared(s: &Surface, k: i64) -> Surface {
    apply_matrix(s, &FlowMatrix::shear(rat(k, 1))).expect("shear preserves orientation")
}
