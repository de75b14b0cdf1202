//! Zero sets of the two field components.
//!
//! Each component factors as `xi_i g_i`, so the coordinate axes are added
//! exactly and only the cofactors `g_i` are contoured.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::curves::find_root;
use crate::error::{Error, Result};
use crate::model::{FieldCoeffs, ParamPoint, Rect, StatePoint, SystemModel};

pub const MIN_RESOLUTION: usize = 16;

pub type Polyline = Vec<StatePoint>;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Nullclines {
    /// Zero set of the first component, axis `xi1 = 0` first when visible.
    pub f1: Vec<Polyline>,
    /// Zero set of the second component, axis `xi2 = 0` first when visible.
    pub f2: Vec<Polyline>,
}

impl Nullclines {
    pub fn is_empty(&self) -> bool {
        self.f1.is_empty() && self.f2.is_empty()
    }
}

/// Grid edge identifier: `(i, j, horizontal)` for the edge leaving node `(i, j)`.
type EdgeKey = (usize, usize, bool);

/// Contours `g = 0` on a `res x res` cell grid over `w`.
fn contour(g: &dyn Fn(f64, f64) -> f64, w: &Rect, res: usize) -> Vec<Polyline> {
    let hx = w.width() / res as f64;
    let hy = w.height() / res as f64;
    let node_x = |i: usize| if i == res { w.x1 } else { w.x0 + i as f64 * hx };
    let node_y = |j: usize| if j == res { w.y1 } else { w.y0 + j as f64 * hy };
    let n = res + 1;
    let mut vals = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            vals[j * n + i] = g(node_x(i), node_y(j));
        }
    }
    // zero counts as positive so every crossing is a strict sign change
    let pos = |i: usize, j: usize| vals[j * n + i] >= 0.0;

    let mut crossings: BTreeMap<EdgeKey, StatePoint> = BTreeMap::new();
    let mut crossing = |key: EdgeKey| -> Option<EdgeKey> {
        let (i, j, horiz) = key;
        let (i2, j2) = if horiz { (i + 1, j) } else { (i, j + 1) };
        if pos(i, j) == pos(i2, j2) {
            return None;
        }
        crossings.entry(key).or_insert_with(|| {
            let (a, b) = if horiz { (node_x(i), node_x(i2)) } else { (node_y(j), node_y(j2)) };
            let (fa, fb) = (vals[j * n + i], vals[j2 * n + i2]);
            if horiz {
                let y = node_y(j);
                let x = find_root(&mut |x| Ok(g(x, y)), a, b, fa, fb).map(|r| r.0).unwrap_or(0.5 * (a + b));
                StatePoint::new(x, y)
            } else {
                let x = node_x(i);
                let y = find_root(&mut |y| Ok(g(x, y)), a, b, fa, fb).map(|r| r.0).unwrap_or(0.5 * (a + b));
                StatePoint::new(x, y)
            }
        });
        Some(key)
    };

    let mut adjacency: BTreeMap<EdgeKey, Vec<EdgeKey>> = BTreeMap::new();
    let mut link = |a: EdgeKey, b: EdgeKey| {
        adjacency.entry(a).or_default().push(b);
        adjacency.entry(b).or_default().push(a);
    };
    for j in 0..res {
        for i in 0..res {
            let bottom = crossing((i, j, true));
            let right = crossing((i + 1, j, false));
            let top = crossing((i, j + 1, true));
            let left = crossing((i, j, false));
            let hits: Vec<EdgeKey> = [bottom, right, top, left].into_iter().flatten().collect();
            match hits.len() {
                2 => link(hits[0], hits[1]),
                4 => {
                    // saddle cell: the centre value decides which corners connect
                    let c = g(node_x(i) + 0.5 * hx, node_y(j) + 0.5 * hy) >= 0.0;
                    if c == pos(i, j) {
                        link(hits[0], hits[1]);
                        link(hits[2], hits[3]);
                    } else {
                        link(hits[0], hits[3]);
                        link(hits[1], hits[2]);
                    }
                }
                _ => {}
            }
        }
    }

    let mut visited: BTreeMap<EdgeKey, bool> = adjacency.keys().map(|k| (*k, false)).collect();
    let mut lines = Vec::new();
    let walk = |start: EdgeKey, visited: &mut BTreeMap<EdgeKey, bool>| -> Vec<EdgeKey> {
        let mut path = vec![start];
        visited.insert(start, true);
        let mut cur = start;
        loop {
            let next = adjacency[&cur].iter().copied().find(|k| !visited[k]);
            match next {
                Some(k) => {
                    visited.insert(k, true);
                    path.push(k);
                    cur = k;
                }
                None => {
                    // close loops explicitly
                    if path.len() > 2 && adjacency[&cur].contains(&start) {
                        path.push(start);
                    }
                    return path;
                }
            }
        }
    };
    // open chains start at their endpoints; what remains are closed loops
    let starts: Vec<EdgeKey> = adjacency.iter().filter(|(_, v)| v.len() == 1).map(|(k, _)| *k).collect();
    for s in starts {
        if !visited[&s] {
            lines.push(walk(s, &mut visited));
        }
    }
    let rest: Vec<EdgeKey> = adjacency.keys().copied().collect();
    for s in rest {
        if !visited[&s] {
            lines.push(walk(s, &mut visited));
        }
    }
    lines.into_iter().map(|path| path.iter().map(|k| crossings[k]).collect()).collect()
}

fn axis_segment(w: &Rect, vertical: bool) -> Option<Polyline> {
    if vertical && w.x0 <= 0.0 && 0.0 <= w.x1 {
        Some(vec![StatePoint::new(0.0, w.y0), StatePoint::new(0.0, w.y1)])
    } else if !vertical && w.y0 <= 0.0 && 0.0 <= w.y1 {
        Some(vec![StatePoint::new(w.x0, 0.0), StatePoint::new(w.x1, 0.0)])
    } else {
        None
    }
}

/// Nullclines from prebuilt coefficients.
pub fn nullclines_of(c: &FieldCoeffs, window: &Rect, resolution: usize) -> Result<Nullclines> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::Validation(format!("nullcline resolution must be at least {MIN_RESOLUTION}, got {resolution}")));
    }
    if !window.is_ordered() {
        return Err(Error::Validation("nullcline window must be finite and ordered".into()));
    }
    let mut out = Nullclines::default();
    if window.is_degenerate() {
        return Ok(out);
    }
    out.f1.extend(axis_segment(window, true));
    out.f2.extend(axis_segment(window, false));
    out.f1.extend(contour(&|x, y| c.factors(x, y).0, window, resolution));
    out.f2.extend(contour(&|x, y| c.factors(x, y).1, window, resolution));
    Ok(out)
}

/// Polylines for `f1 = 0` and `f2 = 0` inside `window`.
pub fn nullclines(model: &SystemModel, mu: ParamPoint, window: &Rect, resolution: usize) -> Result<Nullclines> {
    nullclines_of(&model.coeffs(mu)?, window, resolution)
}
