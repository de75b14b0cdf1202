//! Sweep-level properties: admissibility and region coherence.

use kolmogorov::curves::{curve_residual, CurveId};
use kolmogorov::par::Execution;
use kolmogorov::report::{class_tuple, is_admissible, sweep, sweep_csv, Sweep};
use kolmogorov::{presets, Rect, SystemModel, Tolerances};

fn models() -> Vec<(String, SystemModel)> {
    let mut v: Vec<(String, SystemModel)> =
        vec![("MA".into(), presets::ma()), ("MH".into(), presets::mh()), ("MB".into(), presets::mb())];
    v.extend((1..=9).map(|k| (format!("G{k}"), presets::family_g(k))));
    v.extend((1..=4).map(|k| (format!("F{k}"), presets::family_f(k))));
    v
}

/// Region label plus the side of every curve of the case. Cells sharing this
/// key and adjacent in the grid lie in one component of the curve complement.
fn cell_key(m: &SystemModel, s: &Sweep, i: usize, j: usize, tols: &Tolerances) -> String {
    let c = s.cell(i, j);
    let mut key = c.region.map(|r| r.name()).unwrap_or_else(|| "?".into());
    for id in CurveId::for_case(s.case) {
        key.push(match curve_residual(m, id, c.mu, tols) {
            Ok(r) if r > 0.0 => '+',
            Ok(r) if r < 0.0 => '-',
            Ok(_) => '0',
            Err(_) => 'x',
        });
    }
    key
}

#[test]
fn hyperbolic_tuple_is_constant_on_region_components() {
    let tols = Tolerances::default();
    for (name, m) in models() {
        let s = sweep(&m, &Rect::centered(0.02), 64, &tols, Execution::Parallel).unwrap();
        let n = s.resolution;
        let keys: Vec<String> = (0..n * n).map(|k| cell_key(&m, &s, k % n, k / n, &tols)).collect();
        let mut compared = 0;
        for j in 0..n {
            for i in 0..n {
                for (di, dj) in [(1, 0), (0, 1)] {
                    let (i2, j2) = (i + di, j + dj);
                    if i2 >= n || j2 >= n || keys[j * n + i] != keys[j2 * n + i2] {
                        continue;
                    }
                    let (a, b) = (class_tuple(s.cell(i, j)), class_tuple(s.cell(i2, j2)));
                    if a.is_hyperbolic() && b.is_hyperbolic() {
                        assert_eq!(a, b, "{name}: neighbours {:?} and {:?} share key {}", s.cell(i, j).mu, s.cell(i2, j2).mu, keys[j * n + i]);
                        compared += 1;
                    }
                }
            }
        }
        assert!(compared > n * n, "{name}: only {compared} comparisons");
    }
}

#[test]
fn every_family_sweep_is_admissible() {
    let tols = Tolerances::default();
    for (name, m) in models() {
        for r in [0.005, 0.02] {
            let s = sweep(&m, &Rect::centered(r), 48, &tols, Execution::Parallel).unwrap();
            for c in &s.cells {
                let t = class_tuple(c);
                assert!(is_admissible(s.case, &t), "{name} r={r}: {t} at {:?}", c.mu);
            }
        }
    }
}

#[test]
fn sweep_csv_is_identical_across_executions() {
    let tols = Tolerances::default();
    let m = presets::mb();
    let w = Rect::new(-0.02, 0.01, -0.015, 0.02);
    let a = sweep_csv(&sweep(&m, &w, 40, &tols, Execution::Parallel).unwrap()).unwrap();
    let b = sweep_csv(&sweep(&m, &w, 40, &tols, Execution::Sequential).unwrap()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 1 + 40 * 40);
}
