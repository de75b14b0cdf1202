//! Truncated bivariate polynomials in the parameters `(mu1, mu2)`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_MAX_DEGREE: usize = 3;

/// Polynomial `sum c_ij mu1^i mu2^j` over `i + j <= max_degree`.
///
/// Coefficients are stored densely, row `i` holding the `mu2` powers
/// `0..=max_degree - i`. Evaluation is exact polynomial arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariatePoly {
    max_degree: usize,
    rows: Vec<Vec<f64>>,
}

impl Default for BivariatePoly {
    fn default() -> Self {
        Self::zero(DEFAULT_MAX_DEGREE)
    }
}

impl BivariatePoly {
    pub fn zero(max_degree: usize) -> Self {
        let rows = (0..=max_degree).map(|i| vec![0.0; max_degree - i + 1]).collect();
        Self { max_degree, rows }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_terms(&[(0, 0, c)])
    }

    /// Builds a polynomial from `(i, j, c)` triples; repeated monomials add up.
    /// The degree is the larger of [`DEFAULT_MAX_DEGREE`] and the highest `i + j`.
    pub fn from_terms(terms: &[(usize, usize, f64)]) -> Self {
        let deg = terms
            .iter()
            .map(|&(i, j, _)| i + j)
            .max()
            .unwrap_or(0)
            .max(DEFAULT_MAX_DEGREE);
        let mut p = Self::zero(deg);
        for &(i, j, c) in terms {
            p.rows[i][j] += c;
        }
        p
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.rows.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0.0)
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, c: f64) {
        if i + j > self.max_degree {
            self.raise_degree(i + j);
        }
        self.rows[i][j] = c;
    }

    fn raise_degree(&mut self, deg: usize) {
        let mut p = Self::zero(deg);
        for (i, row) in self.rows.iter().enumerate() {
            p.rows[i][..row.len()].copy_from_slice(row);
        }
        *self = p;
    }

    /// Value at the origin.
    pub fn constant_term(&self) -> f64 {
        self.rows[0][0]
    }

    /// First-order coefficients `(d/dmu1, d/dmu2)` at the origin.
    pub fn linear_terms(&self) -> (f64, f64) {
        (self.coeff(1, 0), self.coeff(0, 1))
    }

    /// Nested Horner evaluation: inner in `mu2`, outer in `mu1`.
    pub fn eval(&self, mu1: f64, mu2: f64) -> f64 {
        self.rows.iter().rev().fold(0.0, |acc, row| {
            let inner = row.iter().rev().fold(0.0, |a, &c| a * mu2 + c);
            acc * mu1 + inner
        })
    }

    /// Exact partial derivative with respect to `mu1` (`which == 1`) or `mu2`.
    pub fn partial(&self, which: u8) -> Self {
        let mut out = Self::zero(self.max_degree);
        for (i, row) in self.rows.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                match which {
                    1 if i > 0 => out.rows[i - 1][j] += c * i as f64,
                    2 if j > 0 => out.rows[i][j - 1] += c * j as f64,
                    _ => {}
                }
            }
        }
        out
    }

    /// Substitutes `mu -> mu / c`, i.e. scales `c_ij` by `c^-(i+j)`.
    pub fn rescale_args(&self, c: f64) -> Self {
        let mut out = self.clone();
        for (i, row) in out.rows.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v /= c.powi((i + j) as i32);
            }
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.rows.iter_mut().flatten().for_each(|v| *v *= factor);
        out
    }

    pub fn is_finite(&self) -> bool {
        self.rows.iter().flatten().all(|c| c.is_finite())
    }

    /// Nonzero coefficients keyed `"i,j"`.
    pub fn to_key_map(&self) -> BTreeMap<String, f64> {
        let mut map = BTreeMap::new();
        for (i, row) in self.rows.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c != 0.0 {
                    map.insert(format!("{i},{j}"), c);
                }
            }
        }
        map
    }

    pub fn from_key_map(map: &BTreeMap<String, f64>) -> Result<Self> {
        let mut terms = Vec::with_capacity(map.len());
        let mut seen = std::collections::BTreeSet::new();
        for (key, &c) in map {
            let (i, j) = parse_key(key)?;
            if !seen.insert((i, j)) {
                return Err(Error::Validation(format!("duplicate monomial {key:?}")));
            }
            if !c.is_finite() {
                return Err(Error::Validation(format!("coefficient {key:?} is not finite")));
            }
            // -0.0 is folded to 0.0 so that write/read cycles are stable
            terms.push((i, j, if c == 0.0 { 0.0 } else { c }));
        }
        Ok(Self::from_terms(&terms))
    }
}

fn parse_key(key: &str) -> Result<(usize, usize)> {
    let bad = || Error::Validation(format!("monomial key {key:?} must look like \"i,j\""));
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    let i = a.trim().parse::<usize>().map_err(|_| bad())?;
    let j = b.trim().parse::<usize>().map_err(|_| bad())?;
    if i + j > 16 {
        return Err(Error::Validation(format!("monomial {key:?} exceeds degree 16")));
    }
    Ok((i, j))
}

/// All complex roots of `sum_k c[k] x^k` by Aberth iteration.
///
/// Leading coefficients that vanish are dropped, so the result has
/// `degree` entries. Intended for the low degrees that occur here.
pub fn univariate_roots(c: &[f64]) -> Vec<Complex64> {
    let scale = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut n = c.len();
    while n > 0 && c[n - 1].abs() <= 1e-15 * scale {
        n -= 1;
    }
    if n <= 1 {
        return Vec::new();
    }
    let c = &c[..n];
    let deg = n - 1;
    let lead = c[deg];
    let eval = |z: Complex64| {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &a in c.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    };
    // start on a circle whose radius is the geometric mean of the root moduli
    let radius = if c[0] != 0.0 { (c[0] / lead).abs().powf(1.0 / deg as f64) } else { 1.0 };
    let radius = radius.max(f64::MIN_POSITIVE.sqrt());
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / deg as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..deg {
            let (p, dp) = eval(z[k]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..deg).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
                moved = moved.max(step.norm() / z[k].norm().max(f64::MIN_POSITIVE));
            }
        }
        if moved <= 1e-15 {
            break;
        }
    }
    z
}
