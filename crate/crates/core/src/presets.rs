//! Reference models used throughout the tests, benches and CLI examples.
//!
//! `ma`, `mh` and `mb` are the three worked models; `family_g(k)` and
//! `family_f(k)` give one representative per sign pattern of the
//! `theta(0) = 0` and `delta(0) = 0` bifurcation diagrams respectively.

use crate::model::{SystemModel, DEFAULT_RADIUS};
use crate::poly::BivariatePoly;

fn c(v: f64) -> BivariatePoly {
    BivariatePoly::constant(v)
}

fn lin(c0: f64, c1: f64, c2: f64) -> BivariatePoly {
    BivariatePoly::from_terms(&[(0, 0, c0), (1, 0, c1), (0, 1, c2)])
}

fn zero() -> BivariatePoly {
    BivariatePoly::default()
}

#[allow(clippy::too_many_arguments)]
fn build(
    theta: BivariatePoly,
    gamma: BivariatePoly,
    delta: BivariatePoly,
    m: BivariatePoly,
    n: BivariatePoly,
    s: BivariatePoly,
    p: BivariatePoly,
) -> SystemModel {
    SystemModel::new(theta, gamma, delta, m, n, s, p, DEFAULT_RADIUS).expect("preset models are valid")
}

/// `theta = 3 mu2, gamma = -1, delta = 1 + mu1, N = 1`.
pub fn ma() -> SystemModel {
    build(lin(0.0, 0.0, 3.0), c(-1.0), lin(1.0, 1.0, 0.0), zero(), c(1.0), zero(), zero())
}

/// `ma` with `theta2 = -3`.
pub fn ma_mirror() -> SystemModel {
    build(lin(0.0, 0.0, -3.0), c(-1.0), lin(1.0, 1.0, 0.0), zero(), c(1.0), zero(), zero())
}

/// `theta = -3 mu2, gamma = -1, delta = -1, N = 1`: carries a Hopf curve.
pub fn mh() -> SystemModel {
    build(lin(0.0, 0.0, -3.0), c(-1.0), c(-1.0), zero(), c(1.0), zero(), zero())
}

/// `theta = -1, gamma = -1, delta = mu1`, all cubic terms zero.
pub fn mb() -> SystemModel {
    build(c(-1.0), c(-1.0), lin(0.0, 1.0, 0.0), zero(), zero(), zero(), zero())
}

/// One model per diagram family G1..=G9 (`theta(0) = 0`, `N > 0`).
pub fn family_g(k: usize) -> SystemModel {
    let (delta0, theta1, theta2, gamma) = match k {
        1 => (1.0, 0.5, 1.5, -1.0),
        2 => (1.0, 0.5, 3.0, -1.0),
        3 => (-1.0, 0.5, -1.5, -1.0),
        4 => (-1.0, 0.5, -4.0, -0.25),
        5 => (-1.0, 0.5, -3.0, -1.0),
        6 => (1.0, 0.5, 0.5, -1.0),
        7 => (1.0, -0.5, -0.5, -1.0),
        8 => (-1.0, 0.5, 0.5, -1.0),
        9 => (-1.0, -0.5, -0.5, -1.0),
        _ => panic!("diagram family G{k} does not exist"),
    };
    build(
        lin(0.0, theta1, theta2),
        c(gamma),
        lin(delta0, 1.0, 0.0),
        zero(),
        c(1.0),
        zero(),
        zero(),
    )
}

/// One model per diagram family F1..=F4 (`delta(0) = 0`), by the signs of
/// `theta` and `sigma2 = (theta delta1 - S) / theta^2`.
pub fn family_f(k: usize) -> SystemModel {
    let (theta, s) = match k {
        1 => (1.0, 0.0),
        2 => (1.0, 2.0),
        3 => (-1.0, 0.0),
        4 => (-1.0, -2.0),
        _ => panic!("diagram family F{k} does not exist"),
    };
    build(c(theta), c(-1.0), lin(0.0, 1.0, 0.0), zero(), c(1.0), c(s), c(0.5))
}

/// Looks a preset up by its lowercase name (`ma`, `mh`, `g3`, `f2`, ...).
pub fn by_name(name: &str) -> Option<SystemModel> {
    match name {
        "ma" => Some(ma()),
        "ma-mirror" => Some(ma_mirror()),
        "mh" => Some(mh()),
        "mb" => Some(mb()),
        _ => {
            let (head, tail) = name.split_at(1.min(name.len()));
            let k: usize = tail.parse().ok()?;
            match head {
                "g" if (1..=9).contains(&k) => Some(family_g(k)),
                "f" if (1..=4).contains(&k) => Some(family_f(k)),
                _ => None,
            }
        }
    }
}
