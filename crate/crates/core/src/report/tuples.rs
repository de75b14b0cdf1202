//! Class tuples and the admissible tuple sets of both cases.

use std::fmt;

use serde::Serialize;

use crate::equilibria::Status;
use crate::model::DegeneracyCase;

use super::sweep::SweepCell;

/// One code per tracked equilibrium: `s`, `a`, `r`, `-` (absent or virtual),
/// `u` (non-hyperbolic) or `?` (could not be computed).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ClassTuple(pub String);

impl ClassTuple {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn has_nonhyperbolic(&self) -> bool {
        self.0.contains('u')
    }

    pub fn has_error(&self) -> bool {
        self.0.contains('?')
    }

    pub fn is_hyperbolic(&self) -> bool {
        !self.has_nonhyperbolic() && !self.has_error()
    }
}

impl fmt::Display for ClassTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn class_tuple(cell: &SweepCell) -> ClassTuple {
    ClassTuple(
        cell.inventory
            .iter()
            .map(|e| match (e.status, e.class) {
                (Some(Status::Absent | Status::Virtual), _) => '-',
                _ if e.error.is_some() => '?',
                (Some(Status::Proper), Some(c)) => c.code(),
                _ => '?',
            })
            .collect(),
    )
}

/// `(O, E11, E12, E2, E3)` for `theta(0) = 0`, one entry per admissible configuration.
pub const TUPLES_CASE_A: [&str; 22] = [
    "s--s-", "s--rs", "r---s", "rrs-s", "rss--", "ss---", "as-s-", "rsa-s", "r----", "sr---", "ar-s-",
    "sras-", "ssasr", "s--sr", "s--r-", "srssa", "srssr", "s--sa", "sr--s", "ssas-", "rrs--", "as-sr",
];

/// `(O, E1, E2, E3)` for `delta(0) = 0`: the open sectors cut out by the axes,
/// T2 and T4 for either sign of `theta(0)` and `sigma2`.
pub const TUPLES_CASE_B: [&str; 14] = [
    // theta > 0
    "ra-s", "rs--", "ssr-", "sars", "sas-", "s---", "a-s-",
    // theta < 0
    "r---", "s-r-", "s-sr", "sr--", "ss-r", "assr", "ars-",
];

pub fn admissible_tuples(case: DegeneracyCase) -> &'static [&'static str] {
    match case {
        DegeneracyCase::CaseA => &TUPLES_CASE_A,
        DegeneracyCase::CaseB => &TUPLES_CASE_B,
        _ => &[],
    }
}

/// Member of the case's tuple set, or a near-curve tuple containing `u`.
pub fn is_admissible(case: DegeneracyCase, t: &ClassTuple) -> bool {
    t.has_nonhyperbolic() || admissible_tuples(case).contains(&t.as_str())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::EquilibriumId;
    use crate::model::ParamPoint;
    use crate::presets;
    use crate::report::sweep::analyze_point;
    use crate::tolerances::Tolerances;
    use std::collections::BTreeSet;

    fn tuple_at(m: &crate::SystemModel, case: DegeneracyCase, mu1: f64, mu2: f64) -> String {
        class_tuple(&analyze_point(m, case, ParamPoint::new(mu1, mu2), &Tolerances::default())).0
    }

    #[test]
    fn tuple_sets_have_no_duplicates() {
        assert_eq!(TUPLES_CASE_A.iter().collect::<BTreeSet<_>>().len(), 22);
        assert_eq!(TUPLES_CASE_B.iter().collect::<BTreeSet<_>>().len(), 14);
        assert!(TUPLES_CASE_A.iter().all(|t| t.len() == 5));
        assert!(TUPLES_CASE_B.iter().all(|t| t.len() == 4));
    }

    #[test]
    fn ma_examples() {
        let m = presets::ma();
        assert_eq!(tuple_at(&m, DegeneracyCase::CaseA, 0.0004, 0.02), "rss--");
        let t = tuple_at(&m, DegeneracyCase::CaseA, -0.005, -0.005);
        assert_eq!(t.matches('-').count(), 2, "{t}");
        assert!(is_admissible(DegeneracyCase::CaseA, &ClassTuple(t)));
    }

    #[test]
    fn axis_pair_absent_cell() {
        // discriminant negative, E2 virtual, E3 interior
        let m = presets::ma();
        assert_eq!(tuple_at(&m, DegeneracyCase::CaseA, 0.01, 0.001), "r---s");
    }

    #[test]
    fn origin_only_cell() {
        let mut cell = analyze_point(&presets::ma(), DegeneracyCase::CaseA, ParamPoint::new(0.01, 0.001), &Tolerances::default());
        for e in &mut cell.inventory[1..] {
            e.status = Some(Status::Virtual);
        }
        assert_eq!(class_tuple(&cell).0, "r----");
    }

    #[test]
    fn error_marker() {
        let mut cell = analyze_point(&presets::mb(), DegeneracyCase::CaseB, ParamPoint::new(0.01, 0.01), &Tolerances::default());
        cell.inventory[3].status = Some(Status::Proper);
        cell.inventory[3].class = None;
        cell.inventory[3].error = Some("x".into());
        assert_eq!(cell.inventory[3].id, EquilibriumId::E3);
        assert!(class_tuple(&cell).has_error());
        assert!(!is_admissible(DegeneracyCase::CaseB, &class_tuple(&cell)));
    }

    #[test]
    fn nonhyperbolic_always_admissible() {
        assert!(is_admissible(DegeneracyCase::CaseA, &ClassTuple("uuuuu".into())));
        assert!(!is_admissible(DegeneracyCase::CaseA, &ClassTuple("aaaaa".into())));
    }
}
