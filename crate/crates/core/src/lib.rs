//! Exact-arithmetic toolkit for half-translation surfaces (quadratic
//! differentials): the SL(2,R) action and Teichmüller geodesic flow in
//! period coordinates, saddle connection enumeration, extremal-length
//! estimation, thick-thin decompositions, regular triangulations,
//! homological relation systems, and closed-geodesic counting on the
//! once-punctured torus.

pub mod num;
pub mod flow;
pub mod geom;
pub mod homology;
pub mod intersections;
pub mod surface;

pub use num::{Rat, Transform, Vec2};
pub use surface::Surface;
