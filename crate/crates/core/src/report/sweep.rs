//! Parameter-plane sweeps.

use serde::Serialize;

use crate::classify::{classify_equilibrium, EigenReport, StabilityClass};
use crate::curves::{region_of, RegionLabel};
use crate::equilibria::{all_equilibria, analysable_case, EquilibriumId, Status};
use crate::error::{Error, Result};
use crate::model::{DegeneracyCase, ParamPoint, Rect, StatePoint, SystemModel};
use crate::par::{map_range, Execution};
use crate::tolerances::Tolerances;

pub const MAX_RESOLUTION: usize = 2048;

/// One equilibrium of a sweep cell. `error` is set when it could not be
/// located or classified; the remaining fields then hold whatever was known.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InventoryEntry {
    pub id: EquilibriumId,
    pub status: Option<Status>,
    pub point: Option<StatePoint>,
    pub eigen: Option<EigenReport>,
    pub class: Option<StabilityClass>,
    pub error: Option<String>,
}

impl InventoryEntry {
    fn failed(id: EquilibriumId, e: &Error) -> Self {
        Self { id, status: None, point: None, eigen: None, class: None, error: Some(e.to_string()) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub mu: ParamPoint,
    pub region: Option<RegionLabel>,
    pub region_error: Option<String>,
    /// Every tracked equilibrium of the case, in reporting order.
    pub inventory: Vec<InventoryEntry>,
}

impl SweepCell {
    pub fn entry(&self, id: EquilibriumId) -> Option<&InventoryEntry> {
        self.inventory.iter().find(|e| e.id == id)
    }

    pub fn has_error(&self) -> bool {
        self.region_error.is_some() || self.inventory.iter().any(|e| e.error.is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub case: DegeneracyCase,
    pub window: Rect,
    pub resolution: usize,
    /// Row-major with `mu2` rows from `y0` upward and `mu1` columns from `x0`.
    pub cells: Vec<SweepCell>,
}

impl Sweep {
    pub fn cell(&self, i: usize, j: usize) -> &SweepCell {
        &self.cells[j * self.resolution + i]
    }

    /// Centre of cell `(i, j)` for the given window and resolution.
    pub fn cell_center(window: &Rect, resolution: usize, i: usize, j: usize) -> ParamPoint {
        let hx = window.width() / resolution as f64;
        let hy = window.height() / resolution as f64;
        ParamPoint::new(window.x0 + (i as f64 + 0.5) * hx, window.y0 + (j as f64 + 0.5) * hy)
    }
}

/// Locates, labels and classifies everything at one parameter point.
/// Failures are recorded in the cell, never returned.
pub fn analyze_point(model: &SystemModel, case: DegeneracyCase, mu: ParamPoint, tols: &Tolerances) -> SweepCell {
    let (region, region_error) = match region_of(model, mu, tols) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let ids = EquilibriumId::for_case(case);
    let inventory = match all_equilibria(model, mu, tols) {
        Err(e) => ids.iter().map(|id| InventoryEntry::failed(*id, &e)).collect(),
        Ok(found) => ids
            .iter()
            .map(|id| match found.iter().find(|(k, _)| k == id) {
                None => InventoryEntry::failed(*id, &Error::Validation(format!("{id} not computed"))),
                Some((_, Err(e))) => InventoryEntry::failed(*id, e),
                Some((_, Ok(eq))) => {
                    let mut entry = InventoryEntry {
                        id: *id,
                        status: Some(eq.status),
                        point: Some(eq.point),
                        eigen: None,
                        class: None,
                        error: None,
                    };
                    if eq.exists() {
                        match classify_equilibrium(model, mu, eq, tols) {
                            Ok((rep, class)) => {
                                entry.eigen = Some(rep);
                                entry.class = Some(class);
                            }
                            // a virtual point's classification is informational only
                            Err(e) if eq.is_proper() => entry.error = Some(e.to_string()),
                            Err(_) => {}
                        }
                    }
                    entry
                }
            })
            .collect(),
    };
    SweepCell { mu, region, region_error, inventory }
}

/// Analyses the centre of every cell of a `resolution x resolution` grid over `window`.
pub fn sweep(model: &SystemModel, window: &Rect, resolution: usize, tols: &Tolerances, exec: Execution) -> Result<Sweep> {
    let case = analysable_case(model)?;
    if resolution == 0 || resolution > MAX_RESOLUTION {
        return Err(Error::Validation(format!("sweep resolution must be in 1..={MAX_RESOLUTION}, got {resolution}")));
    }
    if !window.is_ordered() {
        return Err(Error::Validation("sweep window must be finite and ordered".into()));
    }
    if window.max_norm() > model.radius * (1.0 + 1e-12) {
        return Err(Error::Domain { norm: window.max_norm(), radius: model.radius });
    }
    let cells = map_range(resolution * resolution, exec, |k| {
        let mu = Sweep::cell_center(window, resolution, k % resolution, k / resolution);
        analyze_point(model, case, mu, tols)
    });
    Ok(Sweep { case, window: *window, resolution, cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::discriminant;
    use crate::presets;

    #[test]
    fn single_cell_is_the_window_centre() {
        let m = presets::ma();
        let t = Tolerances::default();
        let s = sweep(&m, &Rect::new(-0.01, 0.03, 0.0, 0.02), 1, &t, Execution::Sequential).unwrap();
        assert_eq!(s.cells.len(), 1);
        assert_eq!(s.cells[0], analyze_point(&m, DegeneracyCase::CaseA, ParamPoint::new(0.01, 0.01), &t));
    }

    #[test]
    fn axis_pair_follows_the_discriminant() {
        let m = presets::ma();
        let t = Tolerances::default();
        let s = sweep(&m, &Rect::centered(0.01), 64, &t, Execution::Parallel).unwrap();
        assert_eq!(s.cells.len(), 64 * 64);
        for c in &s.cells {
            assert!(c.region.is_some());
            assert_eq!(c.inventory.len(), 5);
            let d = discriminant(&m, c.mu).unwrap();
            let e11 = c.entry(EquilibriumId::E11).unwrap();
            if d > 0.0 {
                assert_ne!(e11.status, Some(Status::Absent));
            } else if d < 0.0 {
                assert_eq!(e11.status, Some(Status::Absent));
            }
        }
    }

    #[test]
    fn window_outside_disk_rejected() {
        let m = presets::ma();
        let r = sweep(&m, &Rect::centered(0.2), 4, &Tolerances::default(), Execution::Sequential);
        assert!(matches!(r, Err(Error::Domain { .. })));
    }

    #[test]
    fn resolution_bounds() {
        let m = presets::ma();
        let t = Tolerances::default();
        assert!(sweep(&m, &Rect::centered(0.01), 0, &t, Execution::Sequential).is_err());
        assert!(sweep(&m, &Rect::centered(0.01), MAX_RESOLUTION + 1, &t, Execution::Sequential).is_err());
    }
}
