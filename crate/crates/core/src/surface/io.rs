//! The .surf text format: JSON-shaped, with exact rational holonomy strings.
//!
//! ```json
//! {"triangles":[[0,1,2],...],
//!  "gluing":[[sideA,sideB,sign],...],
//!  "holonomy":{"0":"1/1,0/1", ...},
//!  "marked":[vertexIds]}
//! ```
//!
//! Saving always emits the canonical form (sorted keys, reduced fractions
//! with explicit denominators), so save . load = identity byte-for-byte on
//! canonical files.

use super::Surface;
use crate::num::{format_rat, parse_rat, Vec2};
use std::collections::BTreeSet;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SurfError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("bad {field}: {msg}")]
    Field { field: &'static str, msg: String },
}

pub fn to_string(s: &Surface) -> String {
    let mut out = String::new();
    out.push_str("{\"triangles\":[");
    for t in 0..s.n_triangles() {
        if t > 0 {
            out.push(',');
        }
        write!(out, "[{},{},{}]", 3 * t, 3 * t + 1, 3 * t + 2).unwrap();
    }
    out.push_str("],\"gluing\":[");
    let mut first = true;
    for side in 0..s.n_sides() {
        let p = s.glue[side];
        if side < p {
            if !first {
                out.push(',');
            }
            first = false;
            write!(out, "[{},{},{}]", side, p, s.sign[side]).unwrap();
        }
    }
    out.push_str("],\"holonomy\":{");
    for side in 0..s.n_sides() {
        if side > 0 {
            out.push(',');
        }
        write!(
            out,
            "\"{}\":\"{},{}\"",
            side,
            format_rat(&s.hol[side].x),
            format_rat(&s.hol[side].y)
        )
        .unwrap();
    }
    out.push_str("},\"marked\":[");
    for (i, m) in s.marked.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{m}").unwrap();
    }
    out.push_str("]}\n");
    out
}

pub fn from_str(text: &str) -> Result<Surface, SurfError> {
    let val: serde_json::Value =
        serde_json::from_str(text).map_err(|e| SurfError::Json(e.to_string()))?;
    let obj = val
        .as_object()
        .ok_or_else(|| SurfError::Json("top level must be an object".into()))?;

    let triangles = obj
        .get("triangles")
        .and_then(|v| v.as_array())
        .ok_or(SurfError::Field { field: "triangles", msg: "missing array".into() })?;
    let n_tri = triangles.len();
    let n_sides = 3 * n_tri;
    for (t, tri) in triangles.iter().enumerate() {
        let arr = tri.as_array().ok_or(SurfError::Field {
            field: "triangles",
            msg: format!("triangle {t} is not an array"),
        })?;
        let ids: Vec<u64> = arr.iter().filter_map(|x| x.as_u64()).collect();
        if ids != vec![3 * t as u64, 3 * t as u64 + 1, 3 * t as u64 + 2] {
            return Err(SurfError::Field {
                field: "triangles",
                msg: format!("triangle {t} must list sides [{},{},{}]", 3 * t, 3 * t + 1, 3 * t + 2),
            });
        }
    }

    let mut glue = vec![usize::MAX; n_sides];
    let mut sign = vec![0i8; n_sides];
    let gluing = obj
        .get("gluing")
        .and_then(|v| v.as_array())
        .ok_or(SurfError::Field { field: "gluing", msg: "missing array".into() })?;
    for entry in gluing {
        let arr = entry.as_array().ok_or(SurfError::Field {
            field: "gluing",
            msg: "entry is not an array".into(),
        })?;
        if arr.len() != 3 {
            return Err(SurfError::Field { field: "gluing", msg: "entry must be [a,b,sign]".into() });
        }
        let a = arr[0].as_u64().ok_or(SurfError::Field { field: "gluing", msg: "bad side".into() })? as usize;
        let b = arr[1].as_u64().ok_or(SurfError::Field { field: "gluing", msg: "bad side".into() })? as usize;
        let sg = arr[2].as_i64().ok_or(SurfError::Field { field: "gluing", msg: "bad sign".into() })?;
        if a >= n_sides || b >= n_sides || a == b || !(sg == 1 || sg == -1) {
            return Err(SurfError::Field { field: "gluing", msg: format!("bad entry [{a},{b},{sg}]") });
        }
        if glue[a] != usize::MAX || glue[b] != usize::MAX {
            return Err(SurfError::Field { field: "gluing", msg: format!("side {a} or {b} glued twice") });
        }
        glue[a] = b;
        glue[b] = a;
        sign[a] = sg as i8;
        sign[b] = sg as i8;
    }
    if let Some(s) = glue.iter().position(|&g| g == usize::MAX) {
        return Err(SurfError::Field { field: "gluing", msg: format!("side {s} is unglued") });
    }

    let holonomy = obj
        .get("holonomy")
        .and_then(|v| v.as_object())
        .ok_or(SurfError::Field { field: "holonomy", msg: "missing object".into() })?;
    let mut hol = Vec::with_capacity(n_sides);
    for side in 0..n_sides {
        let key = side.to_string();
        let text = holonomy
            .get(&key)
            .and_then(|v| v.as_str())
            .ok_or(SurfError::Field { field: "holonomy", msg: format!("missing side {side}") })?;
        let (xs, ys) = text.split_once(',').ok_or(SurfError::Field {
            field: "holonomy",
            msg: format!("side {side}: expected \"x,y\""),
        })?;
        let x = parse_rat(xs).map_err(|m| SurfError::Field { field: "holonomy", msg: m })?;
        let y = parse_rat(ys).map_err(|m| SurfError::Field { field: "holonomy", msg: m })?;
        hol.push(Vec2::new(x, y));
    }

    let mut marked = BTreeSet::new();
    if let Some(arr) = obj.get("marked").and_then(|v| v.as_array()) {
        for m in arr {
            let id = m.as_u64().ok_or(SurfError::Field { field: "marked", msg: "bad vertex id".into() })? as usize;
            marked.insert(id);
        }
    }
    let surf = Surface::new(glue, sign, hol, marked);
    for &m in &surf.marked {
        if m >= surf.n_vertices() {
            return Err(SurfError::Field {
                field: "marked",
                msg: format!("vertex id {m} out of range (surface has {} vertices)", surf.n_vertices()),
            });
        }
    }
    Ok(surf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::fixtures;

    #[test]
    fn roundtrip_bit_exact() {
        for s in [fixtures::square_torus(), fixtures::l_shape(), fixtures::fig1()] {
            let text = to_string(&s);
            let back = from_str(&text).unwrap();
            assert!(back == s);
            assert_eq!(to_string(&back), text);
        }
    }
}
