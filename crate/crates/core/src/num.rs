//! Exact rational scalars, planar vectors and the geometric predicates the
//! rest of the crate is built on. Everything here is exact: no tolerances.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parse "p/q" or plain "p".
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| format!("bad numerator in {s:?}"))?;
    let d: BigInt = den.parse().map_err(|_| format!("bad denominator in {s:?}"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Rat::new(n, d))
}

/// Canonical text form used by the file formats: always "p/q", reduced,
/// positive denominator.
pub fn format_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Nearest rational to an f64 with denominator `den`. Used where a real
/// parameter (like e^tau) must be pinned to an exact rational.
pub fn rat_from_f64(x: f64, den: i64) -> Rat {
    let n = (x * den as f64).round() as i64;
    rat(n, den)
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    let n = bigint_to_f64(r.numer());
    let d = bigint_to_f64(r.denom());
    n / d
}

fn bigint_to_f64(b: &BigInt) -> f64 {
    // num's to_f64 saturates; this is fine for reporting.
    use num_traits::ToPrimitive;
    b.to_f64().unwrap_or(f64::INFINITY)
}

/// Exact square root test: Some(s) with s*s == r, for r >= 0.
pub fn rat_sqrt_exact(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let ns = r.numer().sqrt();
    let ds = r.denom().sqrt();
    if &(&ns * &ns) == r.numer() && &(&ds * &ds) == r.denom() {
        Some(Rat::new(ns, ds))
    } else {
        None
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Vec2 {
    pub x: Rat,
    pub y: Rat,
}

impl fmt::Debug for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Vec2 {
    pub fn new(x: Rat, y: Rat) -> Self {
        Vec2 { x, y }
    }

    pub fn zero() -> Self {
        Vec2 { x: Rat::zero(), y: Rat::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn add(&self, o: &Vec2) -> Vec2 {
        Vec2::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn sub(&self, o: &Vec2) -> Vec2 {
        Vec2::new(&self.x - &o.x, &self.y - &o.y)
    }

    pub fn neg(&self) -> Vec2 {
        Vec2::new(-&self.x, -&self.y)
    }

    pub fn scale(&self, s: &Rat) -> Vec2 {
        Vec2::new(&self.x * s, &self.y * s)
    }

    pub fn dot(&self, o: &Vec2) -> Rat {
        &self.x * &o.x + &self.y * &o.y
    }

    pub fn cross(&self, o: &Vec2) -> Rat {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn norm_sq(&self) -> Rat {
        self.dot(self)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (rat_to_f64(&self.x), rat_to_f64(&self.y))
    }

    /// The canonical representative of {v, -v}: y > 0, or y == 0 and x > 0.
    pub fn is_canonical_direction(&self) -> bool {
        match self.y.cmp(&Rat::zero()) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => self.x.is_positive(),
        }
    }

    pub fn canonical_direction(&self) -> Vec2 {
        if self.is_canonical_direction() {
            self.clone()
        } else {
            self.neg()
        }
    }

    /// Primitive integer-direction key for grouping parallel vectors:
    /// the canonical direction divided by gcd-like content.
    pub fn direction_key(&self) -> Vec2 {
        let c = self.canonical_direction();
        // scale so that it becomes (p, q) with p, q coprime integers
        let dx = c.x.denom().clone();
        let dy = c.y.denom().clone();
        let l = num_integer::lcm(dx, dy);
        let px = (&c.x * Rat::from_integer(l.clone())).to_integer();
        let py = (&c.y * Rat::from_integer(l)).to_integer();
        let g = num_integer::gcd(px.clone(), py.clone());
        if g.is_zero() {
            return Vec2::zero();
        }
        Vec2::new(
            Rat::from_integer(px / g.clone()),
            Rat::from_integer(py / g),
        )
    }

    /// Monotone rational pseudo-angle on [0, 4): quadrant index plus a
    /// strictly increasing rational within the quadrant. Orders directions
    /// counterclockwise starting from the positive x-axis.
    pub fn pseudo_angle(&self) -> Rat {
        assert!(!self.is_zero(), "pseudo_angle of zero vector");
        let x = &self.x;
        let y = &self.y;
        let ax = x.abs();
        let ay = y.abs();
        let denom = &ax + &ay;
        let t = if !y.is_negative() && x.is_positive() {
            // quadrant 0: [ +x .. +y )
            &ay / &denom
        } else if y.is_positive() && !x.is_positive() {
            rat_int(1) + &ax / &denom
        } else if !y.is_positive() && x.is_negative() {
            rat_int(2) + &ay / &denom
        } else {
            rat_int(3) + &ax / &denom
        };
        t
    }
}

/// Sign of the orientation of the triangle (a, b, c): > 0 counterclockwise.
pub fn orient2d(a: &Vec2, b: &Vec2, c: &Vec2) -> Ordering {
    let v = b.sub(a).cross(&c.sub(a));
    v.cmp(&Rat::zero())
}

/// Sign of the incircle predicate: for counterclockwise (a, b, c), the
/// result is Greater iff d lies strictly inside the circumcircle.
pub fn incircle(a: &Vec2, b: &Vec2, c: &Vec2, d: &Vec2) -> Ordering {
    let ax = &a.x - &d.x;
    let ay = &a.y - &d.y;
    let bx = &b.x - &d.x;
    let by = &b.y - &d.y;
    let cx = &c.x - &d.x;
    let cy = &c.y - &d.y;
    let a2 = &ax * &ax + &ay * &ay;
    let b2 = &bx * &bx + &by * &by;
    let c2 = &cx * &cx + &cy * &cy;
    let det = &a2 * (&bx * &cy - &by * &cx) - &b2 * (&ax * &cy - &ay * &cx)
        + &c2 * (&ax * &by - &ay * &bx);
    det.cmp(&Rat::zero())
}

/// A developing-map transform. Charts of a half-translation surface differ
/// by v -> ±v + t, so the linear part is just a sign.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Transform {
    pub flip: bool,
    pub t: Vec2,
}

impl Transform {
    pub fn identity() -> Self {
        Transform { flip: false, t: Vec2::zero() }
    }

    pub fn apply(&self, p: &Vec2) -> Vec2 {
        if self.flip {
            self.t.sub(p)
        } else {
            self.t.add(p)
        }
    }

    pub fn apply_vector(&self, v: &Vec2) -> Vec2 {
        if self.flip {
            v.neg()
        } else {
            v.clone()
        }
    }

    /// self ∘ other: first apply `other`, then `self`.
    pub fn compose(&self, other: &Transform) -> Transform {
        Transform {
            flip: self.flip != other.flip,
            t: self.apply(&other.t),
        }
    }

    pub fn inverse(&self) -> Transform {
        if self.flip {
            // x -> t - x is an involution
            self.clone()
        } else {
            Transform { flip: false, t: self.t.neg() }
        }
    }
}

/// Squared distance from point p to the segment [a, b].
pub fn point_segment_dist_sq(p: &Vec2, a: &Vec2, b: &Vec2) -> Rat {
    let ab = b.sub(a);
    let ap = p.sub(a);
    let len2 = ab.norm_sq();
    if len2.is_zero() {
        return ap.norm_sq();
    }
    let t = ap.dot(&ab) / &len2;
    if t <= Rat::zero() {
        ap.norm_sq()
    } else if t >= Rat::one() {
        p.sub(b).norm_sq()
    } else {
        let foot = a.add(&ab.scale(&t));
        p.sub(&foot).norm_sq()
    }
}

/// Squared distance between two segments (0 if they intersect).
pub fn segment_segment_dist_sq(a: &Vec2, b: &Vec2, c: &Vec2, d: &Vec2) -> Rat {
    if segments_properly_cross(a, b, c, d) || point_on_segment(c, a, b) || point_on_segment(d, a, b)
        || point_on_segment(a, c, d) || point_on_segment(b, c, d)
    {
        return Rat::zero();
    }
    let mut best = point_segment_dist_sq(a, c, d);
    for v in [point_segment_dist_sq(b, c, d), point_segment_dist_sq(c, a, b), point_segment_dist_sq(d, a, b)] {
        if v < best {
            best = v;
        }
    }
    best
}

pub fn point_on_segment(p: &Vec2, a: &Vec2, b: &Vec2) -> bool {
    if orient2d(a, b, p) != Ordering::Equal {
        return false;
    }
    let ab = b.sub(a);
    let t = p.sub(a).dot(&ab);
    t >= Rat::zero() && t <= ab.norm_sq()
}

/// Strict proper crossing: the open segments meet in exactly one interior
/// point. Shared endpoints and collinear overlap do NOT count.
pub fn segments_properly_cross(a: &Vec2, b: &Vec2, c: &Vec2, d: &Vec2) -> bool {
    let o1 = orient2d(a, b, c);
    let o2 = orient2d(a, b, d);
    let o3 = orient2d(c, d, a);
    let o4 = orient2d(c, d, b);
    o1 != Ordering::Equal
        && o2 != Ordering::Equal
        && o3 != Ordering::Equal
        && o4 != Ordering::Equal
        && o1 != o2
        && o3 != o4
}

/// Intersection point of lines (a,b) and (c,d); caller guarantees they are
/// not parallel.
pub fn line_intersection(a: &Vec2, b: &Vec2, c: &Vec2, d: &Vec2) -> Vec2 {
    let r = b.sub(a);
    let s = d.sub(c);
    let denom = r.cross(&s);
    assert!(!denom.is_zero(), "parallel lines in line_intersection");
    let t = c.sub(a).cross(&s) / denom;
    a.add(&r.scale(&t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rat_roundtrip() {
        let r = parse_rat("-3/6").unwrap();
        assert_eq!(r, rat(-1, 2));
        assert_eq!(format_rat(&r), "-1/2");
        assert_eq!(parse_rat("7").unwrap(), rat_int(7));
    }

    #[test]
    fn pseudo_angle_orders_directions() {
        let dirs = [
            Vec2::new(rat_int(1), rat_int(0)),
            Vec2::new(rat_int(2), rat_int(1)),
            Vec2::new(rat_int(1), rat_int(1)),
            Vec2::new(rat_int(0), rat_int(1)),
            Vec2::new(rat_int(-1), rat_int(1)),
            Vec2::new(rat_int(-1), rat_int(0)),
            Vec2::new(rat_int(-1), rat_int(-2)),
            Vec2::new(rat_int(1), rat_int(-1)),
        ];
        for w in dirs.windows(2) {
            assert!(w[0].pseudo_angle() < w[1].pseudo_angle());
        }
    }

    #[test]
    fn incircle_sign() {
        let a = Vec2::new(rat_int(0), rat_int(0));
        let b = Vec2::new(rat_int(1), rat_int(0));
        let c = Vec2::new(rat_int(0), rat_int(1));
        let inside = Vec2::new(rat(1, 4), rat(1, 4));
        let outside = Vec2::new(rat_int(2), rat_int(2));
        let on = Vec2::new(rat_int(1), rat_int(1));
        assert_eq!(incircle(&a, &b, &c, &inside), Ordering::Greater);
        assert_eq!(incircle(&a, &b, &c, &outside), Ordering::Less);
        assert_eq!(incircle(&a, &b, &c, &on), Ordering::Equal);
    }

    #[test]
    fn transform_compose_inverse() {
        let g = Transform { flip: true, t: Vec2::new(rat_int(3), rat_int(1)) };
        let h = Transform { flip: false, t: Vec2::new(rat_int(-1), rat_int(2)) };
        let p = Vec2::new(rat(1, 2), rat(5, 3));
        let gh = g.compose(&h);
        assert_eq!(gh.apply(&p), g.apply(&h.apply(&p)));
        assert_eq!(g.compose(&g.inverse()).apply(&p), p);
        assert_eq!(h.inverse().apply(&h.apply(&p)), p);
    }

    #[test]
    fn exact_sqrt() {
        assert_eq!(rat_sqrt_exact(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rat_sqrt_exact(&rat(2, 1)), None);
    }
}
