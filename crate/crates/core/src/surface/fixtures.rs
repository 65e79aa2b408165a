//! Canonical surfaces used throughout the test suite and shipped as .surf
//! files: the unit square torus, the L-shaped origami in H(2), and the
//! once-punctured genus-2 polygon with a short fold edge, a long cylinder
//! and a simple pole.

use super::Surface;
use crate::num::{rat, rat_int, Rat, Vec2};
use std::collections::BTreeSet;

fn v(x: Rat, y: Rat) -> Vec2 {
    Vec2::new(x, y)
}

/// Unit square torus, two triangles, one marked vertex.
pub fn square_torus() -> Surface {
    square_torus_scaled(rat_int(1))
}

pub fn square_torus_scaled(c: Rat) -> Surface {
    let z = || rat_int(0);
    let hol = vec![
        // T0: (0,0) (1,0) (1,1)
        v(c.clone(), z()),
        v(z(), c.clone()),
        v(-c.clone(), -c.clone()),
        // T1: (0,0) (1,1) (0,1)
        v(c.clone(), c.clone()),
        v(-c.clone(), z()),
        v(z(), -c.clone()),
    ];
    let glue = vec![4, 5, 3, 2, 0, 1];
    let sign = vec![1i8; 6];
    let marked = BTreeSet::from([0]);
    Surface::new(glue, sign, hol, marked)
}

/// L-shaped translation surface made of three unit squares: stratum H(2),
/// i.e. nu = (4) as a quadratic differential, one vertex of angle 6 pi.
pub fn l_shape() -> Surface {
    let z = || rat_int(0);
    let one = || rat_int(1);
    let hol = vec![
        // T0 (a,m,d)
        v(one(), z()),
        v(z(), one()),
        v(-one(), -one()),
        // T1 (m,b,c)
        v(one(), z()),
        v(z(), one()),
        v(-one(), -one()),
        // T2 (m,c,d)
        v(one(), one()),
        v(-one(), z()),
        v(z(), -one()),
        // T3 (a,d,e)
        v(one(), one()),
        v(z(), one()),
        v(-one(), rat_int(-2)),
        // T4 (a,e,g)
        v(one(), rat_int(2)),
        v(-one(), -one()),
        v(z(), -one()),
        // T5 (g,e,f)
        v(one(), one()),
        v(-one(), z()),
        v(z(), -one()),
    ];
    let glue = vec![
        16, 8, 9, // T0
        7, 17, 6, // T1
        5, 3, 1, // T2
        2, 14, 12, // T3
        11, 15, 10, // T4
        13, 0, 4, // T5
    ];
    let sign = vec![1i8; 18];
    Surface::new(glue, sign, hol, BTreeSet::new())
}

/// The once-punctured genus-2 polygon surface with a fold (edge 2), a short
/// edge (edge 1, length `a`), and a wide flat cylinder (crossed by edge 4).
/// Non-orientable as a quadratic differential; vertices: a zero of order 3,
/// a zero of order 2 and a simple pole at the marked puncture.
pub fn fig1() -> Surface {
    fig1_with_short_edge(rat(1, 10))
}

pub fn fig1_with_short_edge(a: Rat) -> Surface {
    let z = || rat_int(0);
    let one = || rat_int(1);
    let half = || rat(1, 2);
    let ten = || rat_int(10);
    let two = || rat_int(2);
    let hol = vec![
        // T0 (l0,m0,m1)
        v(one(), z()),
        v(z(), a.clone()),
        v(-one(), -a.clone()),
        // T1 (l0,m1,l1)
        v(one(), a.clone()),
        v(-one(), z()),
        v(z(), -a.clone()),
        // T2 (l1,m1,l2)
        v(one(), z()),
        v(-one(), one()),
        v(z(), -one()),
        // T3 (l2,m1,m2)
        v(one(), -one()),
        v(z(), two()),
        v(-one(), -one()),
        // T4 (l2,m2,l3)
        v(one(), one()),
        v(-one(), z()),
        v(z(), -one()),
        // T5 (m1,r0,r1)
        v(ten(), z()),
        v(z(), half()),
        v(-ten(), -half()),
        // T6 (m1,r1,r2)
        v(ten(), half()),
        v(z(), half()),
        v(-ten(), -one()),
        // T7 (m1,r2,r3)
        v(ten(), one()),
        v(z(), half()),
        v(-ten(), -rat(3, 2)),
        // T8 (m1,r3,r4)
        v(ten(), rat(3, 2)),
        v(z(), half()),
        v(-ten(), -two()),
        // T9 (m1,r4,m2)
        v(ten(), two()),
        v(-ten(), z()),
        v(z(), -two()),
    ];
    let glue = vec![
        13, 5, 3, // T0
        2, 6, 1, // T1
        4, 9, 14, // T2
        7, 29, 12, // T3
        11, 0, 8, // T4
        28, 22, 18, // T5
        17, 25, 21, // T6
        20, 16, 24, // T7
        23, 19, 27, // T8
        26, 15, 10, // T9
    ];
    let mut sign = vec![1i8; 30];
    for s in [8, 14, 16, 22, 19, 25] {
        sign[s] = -1;
    }
    let mut surf = Surface::new(glue, sign, hol, BTreeSet::new());
    // the puncture is the fold point l2 = tail of side 8
    let pole = surf.vertex_at(8);
    surf.marked = BTreeSet::from([pole]);
    surf
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_vertex_counts() {
        assert_eq!(square_torus().n_vertices(), 1);
        assert_eq!(l_shape().n_vertices(), 1);
        assert_eq!(fig1().n_vertices(), 3);
    }

    #[test]
    fn fig1_short_edge_is_shortest() {
        let s = fig1();
        assert_eq!(s.min_edge_norm_sq(), rat(1, 100));
        assert_eq!(s.area(), rat(221, 10));
    }
}
