//! Phase diagram of det-1 matrices: `SO(2)`, `M₁`, `M₂`, `A`, `A⊥`,
//! `N₁∩N₂`, `N₁\N₂`, `N₂\N₁`.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{bc_to_matrix, Matrix2};
use crate::energy::{w_hom, HomValue, SlipSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RegionTag {
    SO2,
    M1,
    M2,
    A,
    APerp,
    N1capN2,
    N1only,
    N2only,
    OffManifold,
}

impl RegionTag {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionTag::SO2 => "SO2",
            RegionTag::M1 => "M1",
            RegionTag::M2 => "M2",
            RegionTag::A => "A",
            RegionTag::APerp => "APerp",
            RegionTag::N1capN2 => "N1capN2",
            RegionTag::N1only => "N1only",
            RegionTag::N2only => "N2only",
            RegionTag::OffManifold => "OffManifold",
        }
    }

    /// Open region selected by strict signs of `|Fv₁| − 1`, `|Fv₂| − 1`, `Fv₁·Fv₂`.
    fn open(n1_above: bool, n2_above: bool, dot_positive: bool) -> Self {
        match (n1_above, n2_above) {
            (true, true) if dot_positive => RegionTag::A,
            (true, true) => RegionTag::APerp,
            (false, false) => RegionTag::N1capN2,
            (false, true) => RegionTag::N1only,
            (true, false) => RegionTag::N2only,
        }
    }
}

impl fmt::Display for RegionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegionLabel {
    pub tag: RegionTag,
    /// Open regions reachable by flipping inequalities that are within
    /// `tol` of equality; empty in the interior of a region.
    pub boundary: Vec<RegionTag>,
}

impl RegionLabel {
    pub fn is_interior(&self) -> bool {
        self.boundary.is_empty()
    }
}

pub fn classify(f: Matrix2, s: &SlipSystem, tol: f64) -> RegionLabel {
    if (f.det() - 1.0).abs() > tol {
        return RegionLabel {
            tag: RegionTag::OffManifold,
            boundary: Vec::new(),
        };
    }
    let fv1 = f * s.v1();
    let fv2 = f * s.v2();
    let (n1, n2) = (fv1.norm(), fv2.norm());
    let dot = fv1.dot(fv2);
    let near1 = (n1 - 1.0).abs() <= tol;
    let near2 = (n2 - 1.0).abs() <= tol;
    let near_dot = dot.abs() <= tol * (n1 * n2).max(1.0);

    let tag = match (near1, near2) {
        (true, true) => RegionTag::SO2,
        (true, false) => RegionTag::M1,
        (false, true) => RegionTag::M2,
        (false, false) => RegionTag::open(n1 > 1.0, n2 > 1.0, dot > 0.0),
    };

    let options = |near: bool, sign: bool| if near { vec![false, true] } else { vec![sign] };
    let mut reachable = BTreeSet::new();
    for a in options(near1, n1 > 1.0) {
        for b in options(near2, n2 > 1.0) {
            for d in options(near_dot, dot > 0.0) {
                reachable.insert(RegionTag::open(a, b, d));
            }
        }
    }
    let boundary = if reachable.len() > 1 {
        reachable.into_iter().collect()
    } else {
        Vec::new()
    };
    RegionLabel { tag, boundary }
}

/// Cell centers of a uniform `n`-cell partition of `[−range, range]`.
pub fn grid_centers(range: f64, n: usize) -> Vec<f64> {
    let h = 2.0 * range / n as f64;
    (0..n).map(|i| -range + (i as f64 + 0.5) * h).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionCell {
    pub b: f64,
    pub c: f64,
    pub label: RegionLabel,
    #[serde(skip)]
    pub energy: HomValue,
}

/// Classify `bc_to_matrix(b, c)` over an `n × n` grid of cell centers.
/// Rows run over `b`, columns over `c`.
pub fn region_map(s: &SlipSystem, range: f64, n: usize, tol: f64) -> Vec<RegionCell> {
    let centers = grid_centers(range, n);
    (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (b, c) = (centers[k / n], centers[k % n]);
            let f = bc_to_matrix(b, c);
            RegionCell {
                b,
                c,
                label: classify(f, s, tol),
                energy: w_hom(f, s, tol),
            }
        })
        .collect()
}
