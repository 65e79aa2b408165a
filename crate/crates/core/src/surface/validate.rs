//! Validation, stratum signatures, orientability and area normalization.

use super::Surface;
use crate::num::{rat_int, Rat, Vec2};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("triangle {0} does not close: side vectors sum to a nonzero vector")]
    ClosureViolation(usize),
    #[error("gluing of sides {0} and {1} is inconsistent with the gluing sign")]
    GluingInconsistency(usize, usize),
    #[error("triangle {0} has non-positive signed area")]
    NonPositiveTriangle(usize),
    #[error("the glued complex is disconnected")]
    Disconnected,
    #[error("surface has zero area")]
    ZeroArea,
    #[error("Gauss-Bonnet mismatch: sum of orders {got} != 4g-4 = {expected}")]
    GaussBonnetMismatch { got: i64, expected: i64 },
    #[error("gluing map is not a fixed-point-free involution at side {0}")]
    BadInvolution(usize),
}

/// Diagnostics produced by [`validate`]. `errors` is empty iff the surface
/// satisfies every structural and geometric invariant.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub errors: Vec<SurfaceError>,
    pub genus: i64,
    pub n_vertices: usize,
    pub area: Rat,
    pub connected: bool,
}

impl Diagnostics {
    pub fn ok(&self) -> bool {
        self.errors.is_empty()
    }
}

pub fn validate(s: &Surface) -> Diagnostics {
    let mut errors = Vec::new();
    for side in 0..s.n_sides() {
        let p = s.glue[side];
        if p >= s.n_sides() || p == side || s.glue[p] != side {
            errors.push(SurfaceError::BadInvolution(side));
        }
    }
    if errors.is_empty() {
        for t in 0..s.n_triangles() {
            let sum = s.hol[3 * t].add(&s.hol[3 * t + 1]).add(&s.hol[3 * t + 2]);
            if !sum.is_zero() {
                errors.push(SurfaceError::ClosureViolation(t));
            }
            if !s.triangle_area_twice(t).is_positive() {
                errors.push(SurfaceError::NonPositiveTriangle(t));
            }
        }
        for side in 0..s.n_sides() {
            let p = s.glue[side];
            if side < p {
                if s.sign[side] != s.sign[p] {
                    errors.push(SurfaceError::GluingInconsistency(side, p));
                    continue;
                }
                let expected = if s.sign[side] > 0 {
                    s.hol[side].neg()
                } else {
                    s.hol[side].clone()
                };
                if s.hol[p] != expected {
                    errors.push(SurfaceError::GluingInconsistency(side, p));
                }
            }
        }
    }
    let connected = is_connected(s);
    if !connected {
        errors.push(SurfaceError::Disconnected);
    }
    let area = s.area();
    if area.is_zero() || area.is_negative() {
        errors.push(SurfaceError::ZeroArea);
    }
    Diagnostics {
        errors,
        genus: s.genus(),
        n_vertices: s.n_vertices(),
        area,
        connected,
    }
}

fn is_connected(s: &Surface) -> bool {
    let n = s.n_triangles();
    if n == 0 {
        return false;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(t) = stack.pop() {
        for side in s.sides_of(t) {
            let p = s.glue[side];
            if p < s.n_sides() {
                let u = s.tri_of(p);
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
    }
    count == n
}

/// Stratum signature: quadratic-differential orders per vertex plus the
/// orientability sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratumSignature {
    /// Order nu_i for each vertex id i; cone angle is (2 + nu_i) * pi.
    pub nu: Vec<i64>,
    /// +1 if the surface is the square of an abelian differential.
    pub varsigma: i8,
}

/// Total cone angle at vertex `v`, in half-turns (angle = result * pi).
pub fn cone_angle_half_turns(s: &Surface, v: usize) -> i64 {
    let corners = s.corners_of_vertex(v);
    // Develop prong directions around the vertex and lift the pseudo-angle.
    let mut tf = crate::num::Transform::identity();
    let first = s.hol[corners[0]].clone();
    let mut lifted = first.pseudo_angle();
    let start = lifted.clone();
    for &c in &corners {
        // crossing the side entering this corner moves to the next corner
        let s_in = s.prev_in_tri(c);
        tf = tf.compose(&s.neighbor_transform(s_in));
        let c_next = s.glue[s_in];
        let dir = tf.apply_vector(&s.hol[c_next]);
        let raw = dir.pseudo_angle();
        // lift raw into the open interval (lifted, lifted + 2): each corner
        // angle is strictly between 0 and pi (= 2 pseudo-units of half-turn)
        let four = rat_int(4);
        let mut k = ((&lifted - &raw) / &four).floor();
        let mut cand = &raw + &four * &k;
        while cand <= lifted {
            k = k + rat_int(1);
            cand = &raw + &four * &k;
        }
        debug_assert!(cand > lifted && cand < &lifted + rat_int(2) + rat_int(1));
        lifted = cand;
    }
    let total = &lifted - &start;
    // total pseudo-angle of a closed walk is an exact even/odd integer
    // (2 pseudo-units per half-turn pi)
    assert!(total.is_integer(), "cone angle walk did not close up");
    let n: BigInt = total.to_integer() / BigInt::from(2);
    use num_traits::ToPrimitive;
    n.to_i64().expect("cone angle too large")
}

/// Compute the stratum signature. Errors with GaussBonnetMismatch if the
/// angle bookkeeping is inconsistent with the genus.
pub fn stratum_signature(s: &Surface) -> Result<StratumSignature, SurfaceError> {
    let mut nu = Vec::with_capacity(s.n_vertices());
    for v in 0..s.n_vertices() {
        let half_turns = cone_angle_half_turns(s, v);
        nu.push(half_turns - 2);
    }
    let total: i64 = nu.iter().sum();
    let expected = 4 * s.genus() - 4;
    if total != expected {
        return Err(SurfaceError::GaussBonnetMismatch { got: total, expected });
    }
    let varsigma = if is_orientable(s) { 1 } else { -1 };
    Ok(StratumSignature { nu, varsigma })
}

/// True iff the gluing-sign cocycle is trivializable: fix a gauge on a
/// spanning tree of the triangle adjacency graph and check every co-tree
/// gluing.
pub fn is_orientable(s: &Surface) -> bool {
    gauge_fix(s).is_some()
}

/// Gauge g: triangles -> {+1, -1} making all spanning-tree gluings
/// effectively translations; None if some co-tree gluing stays inconsistent
/// (i.e. the surface is genuinely non-orientable as a quadratic
/// differential).
pub fn gauge_fix(s: &Surface) -> Option<Vec<i8>> {
    let (gauge, consistent) = gauge_fix_tree(s);
    if consistent {
        Some(gauge)
    } else {
        None
    }
}

/// Always returns a spanning-tree gauge; the flag tells whether all co-tree
/// gluings are consistent with it.
pub fn gauge_fix_tree(s: &Surface) -> (Vec<i8>, bool) {
    let n = s.n_triangles();
    let mut gauge = vec![0i8; n];
    gauge[0] = 1;
    let mut stack = vec![0usize];
    while let Some(t) = stack.pop() {
        for side in s.sides_of(t) {
            let u = s.tri_of(s.glue[side]);
            if gauge[u] == 0 {
                gauge[u] = gauge[t] * s.sign[side];
                stack.push(u);
            }
        }
    }
    let mut consistent = true;
    for side in 0..s.n_sides() {
        let t = s.tri_of(side);
        let u = s.tri_of(s.glue[side]);
        if gauge[t] * gauge[u] * s.sign[side] != 1 {
            consistent = false;
        }
    }
    (gauge, consistent)
}

/// Result of area normalization.
pub struct Normalized {
    pub surface: Surface,
    /// Exact scale factor applied to every holonomy vector.
    pub scale: Rat,
    /// |new area - 1|; zero when the scale was exactly representable.
    pub residual: Rat,
}

/// Scale the surface to unit area. The scale is exact when 1/sqrt(area) is
/// rational; otherwise it is a rational approximation with residual below
/// 1e-12.
pub fn normalize_area(s: &Surface) -> Result<Normalized, SurfaceError> {
    let area = s.area();
    if !area.is_positive() {
        return Err(SurfaceError::ZeroArea);
    }
    let scale = match crate::num::rat_sqrt_exact(&area) {
        Some(root) => Rat::from_integer(BigInt::from(1)) / root,
        None => {
            // 1/sqrt(p/q) = sqrt(p*q)/p; integer sqrt at high precision
            let p = area.numer().clone();
            let q = area.denom().clone();
            let k: BigInt = BigInt::from(10).pow(24);
            let root = (&p * &q * &k * &k).sqrt();
            Rat::new(root, p * k)
        }
    };
    let mut out = s.clone();
    for h in out.hol.iter_mut() {
        *h = h.scale(&scale);
    }
    let new_area = out.area();
    let residual = (new_area - rat_int(1)).abs();
    assert!(
        residual < Rat::new(BigInt::from(1), BigInt::from(10).pow(12)),
        "normalization residual too large"
    );
    Ok(Normalized { surface: out, scale, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::fixtures;

    #[test]
    fn torus_validates() {
        let s = fixtures::square_torus();
        let d = validate(&s);
        assert!(d.ok(), "errors: {:?}", d.errors);
        assert_eq!(d.genus, 1);
        assert_eq!(d.n_vertices, 1);
        assert_eq!(d.area, rat_int(1));
    }

    #[test]
    fn torus_stratum() {
        let s = fixtures::square_torus();
        let sig = stratum_signature(&s).unwrap();
        assert_eq!(sig.nu, vec![0]);
        assert_eq!(sig.varsigma, 1);
    }

    #[test]
    fn broken_torus_fails_closure() {
        let mut s = fixtures::square_torus();
        s.hol[1] = Vec2::new(rat_int(0), rat_int(2));
        let d = validate(&s);
        assert!(d
            .errors
            .iter()
            .any(|e| matches!(e, SurfaceError::ClosureViolation(0))));
    }

    #[test]
    fn lshape_stratum() {
        let s = fixtures::l_shape();
        let d = validate(&s);
        assert!(d.ok(), "errors: {:?}", d.errors);
        assert_eq!(d.genus, 2);
        assert_eq!(d.area, rat_int(3));
        let sig = stratum_signature(&s).unwrap();
        assert_eq!(sig.nu, vec![4]);
        assert_eq!(sig.varsigma, 1);
    }

    #[test]
    fn fig1_validates_nonorientable() {
        let s = fixtures::fig1();
        let d = validate(&s);
        assert!(d.ok(), "errors: {:?}", d.errors);
        assert_eq!(d.genus, 2);
        assert_eq!(d.n_vertices, 3);
        let sig = stratum_signature(&s).unwrap();
        assert_eq!(sig.varsigma, -1);
        let mut nu = sig.nu.clone();
        nu.sort();
        assert_eq!(nu, vec![-1, 2, 3]);
        assert_eq!(nu.iter().sum::<i64>(), 4);
        // the pole sits at the marked puncture
        let pole = sig.nu.iter().position(|&n| n == -1).unwrap();
        assert!(s.marked().contains(&pole));
    }

    #[test]
    fn normalize_exact_and_approx() {
        let s = fixtures::square_torus_scaled(rat_int(3));
        assert_eq!(s.area(), rat_int(9));
        let n = normalize_area(&s).unwrap();
        assert_eq!(n.scale, crate::num::rat(1, 3));
        assert!(n.residual.is_zero());

        let l = fixtures::l_shape(); // area 3, sqrt irrational
        let n = normalize_area(&l).unwrap();
        assert!(!n.residual.is_zero());
        assert!(n.residual < Rat::new(BigInt::from(1), BigInt::from(10).pow(12)));
    }
}
