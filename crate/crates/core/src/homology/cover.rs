//! The canonical orientation double cover of a non-orientable quadratic
//! differential: the translation surface on which the pulled-back foliation
//! is orientable, with deck involution and ramification data.

use super::HomologyError;
use crate::surface::validate::{gauge_fix_tree, is_orientable};
use crate::surface::Surface;
use std::collections::BTreeSet;

pub struct DoubleCover {
    pub cover: Surface,
    /// cover triangle index -> (base triangle, sheet in {0, 1})
    pub projection: Vec<(usize, u8)>,
    /// deck involution on cover triangles
    pub deck_triangle: Vec<usize>,
    /// base vertices over which the cover is ramified
    pub ramification: Vec<usize>,
    /// cover vertex -> base vertex
    pub vertex_projection: Vec<usize>,
}

/// Build the double cover on which the gluing-sign cocycle trivializes.
pub fn orientation_double_cover(s: &Surface) -> Result<DoubleCover, HomologyError> {
    if is_orientable(s) {
        return Err(HomologyError::AlreadyOrientable);
    }
    let (gauge, _) = gauge_fix_tree(s);
    let nt = s.n_triangles();
    let ns = s.n_sides();
    // effective sign after gauge fixing
    let eff = |side: usize| -> i8 {
        let t = s.tri_of(side);
        let u = s.tri_of(s.partner(side));
        gauge[t] * gauge[u] * s.gluing_sign(side)
    };

    // cover triangle (t, sheet): index t + sheet * nt
    let mut glue = vec![0usize; 2 * ns];
    let sign = vec![1i8; 2 * ns];
    let mut hol = Vec::with_capacity(2 * ns);
    for sheet in 0..2u8 {
        for side in 0..ns {
            let p = s.partner(side);
            let target_sheet = if eff(side) > 0 { sheet } else { 1 - sheet };
            glue[side + sheet as usize * ns] = p + target_sheet as usize * ns;
        }
        for side in 0..ns {
            let t = s.tri_of(side);
            let e = if (gauge[t] > 0) == (sheet == 0) { 1 } else { -1 };
            hol.push(if e > 0 { s.hol[side].clone() } else { s.hol[side].neg() });
        }
    }
    let cover = Surface::new(glue, sign, hol, BTreeSet::new());

    let mut projection = Vec::with_capacity(2 * nt);
    for sheet in 0..2u8 {
        for t in 0..nt {
            projection.push((t, sheet));
        }
    }
    // deck swaps sheets
    let deck_triangle: Vec<usize> = (0..2 * nt).map(|i| (i + nt) % (2 * nt)).collect();

    // vertex projection via corners
    let mut vertex_projection = vec![usize::MAX; cover.n_vertices()];
    for c in 0..cover.n_sides() {
        let base_corner = c % ns;
        vertex_projection[cover.vertex_at(c)] = s.vertex_at(base_corner);
    }
    let mut fiber = vec![0usize; s.n_vertices()];
    for &b in &vertex_projection {
        fiber[b] += 1;
    }
    let ramification: Vec<usize> = (0..s.n_vertices()).filter(|&v| fiber[v] == 1).collect();

    // carry marked points up
    let mut cover = cover;
    let marked: BTreeSet<usize> = (0..cover.n_vertices())
        .filter(|&v| s.marked().contains(&vertex_projection[v]))
        .collect();
    cover.marked = marked;

    Ok(DoubleCover { cover, projection, deck_triangle, ramification, vertex_projection })
}
