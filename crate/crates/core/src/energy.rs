//! Energy densities of the condensed two-slip model and their relaxations.
//!
//! All functions take the deformation gradient `F` and a [`SlipSystem`].
//! Off-manifold states carry [`ExtendedEnergy::Infinite`] rather than a
//! floating infinity.

use std::cmp::Ordering;
use std::f64::consts::FRAC_PI_4;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::algebra::{Matrix2, Vector2};
use crate::error::{Error, Result};
use crate::regions::{classify, RegionLabel, RegionTag};
use crate::tolerances::{DOMAIN_SLACK, UNIT_TOL};

/// Two unit slip directions `v1`, `v2` at mutual angle `2θ`, plus the soft
/// volume fraction `λ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlipSystem {
    v1: Vector2,
    v2: Vector2,
    v3: Vector2,
    theta: f64,
    lambda: f64,
    orthogonal: bool,
}

impl SlipSystem {
    /// Slips from explicit vectors. The inputs are normalized; the pair must
    /// be right-handed with an angle in `[π/2, π)`.
    pub fn from_vectors(v1: Vector2, v2: Vector2, lambda: f64) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidSlipSystem(msg));
        let (Some(u1), Some(u2)) = (v1.normalized(), v2.normalized()) else {
            return invalid("slip vectors must be nonzero and finite".into());
        };
        let cross = u1.perp().dot(u2);
        if cross <= 0.0 {
            return invalid(format!("(v1, v2) must be right-handed, v1⊥·v2 = {cross}"));
        }
        let mut theta = 0.5 * cross.atan2(u1.dot(u2));
        if theta < FRAC_PI_4 - UNIT_TOL {
            return invalid(format!(
                "half-angle θ = {theta} must lie in [π/4, π/2), i.e. v1·v2 ≤ 0"
            ));
        }
        if (theta - FRAC_PI_4).abs() <= UNIT_TOL {
            theta = FRAC_PI_4;
        }
        Self::assemble(u1, u2, theta, lambda)
    }

    /// Orthogonal slips `v1` and `v2 = v1⊥`.
    pub fn orthogonal(v1: Vector2, lambda: f64) -> Result<Self> {
        Self::from_vectors(v1, v1.perp(), lambda)
    }

    /// Slips placed by half-angle only: `v1 = (sin θ, cos θ)`,
    /// `v2 = (−sin θ, cos θ)`, so that `v3 = (0, −1)`.
    pub fn from_theta(theta: f64, lambda: f64) -> Result<Self> {
        if !(FRAC_PI_4 - UNIT_TOL..std::f64::consts::FRAC_PI_2).contains(&theta) {
            return Err(Error::InvalidSlipSystem(format!(
                "half-angle θ = {theta} must lie in [π/4, π/2)"
            )));
        }
        let theta = if (theta - FRAC_PI_4).abs() <= UNIT_TOL {
            FRAC_PI_4
        } else {
            theta
        };
        let (s, c) = theta.sin_cos();
        Self::assemble(Vector2::new(s, c), Vector2::new(-s, c), theta, lambda)
    }

    fn assemble(v1: Vector2, v2: Vector2, theta: f64, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidSlipSystem(format!(
                "soft volume fraction λ = {lambda} must lie in (0, 1)"
            )));
        }
        let sum = v1 + v2;
        let v3 = sum * (-1.0 / sum.norm());
        Ok(Self {
            v1,
            v2,
            v3,
            theta,
            lambda,
            orthogonal: theta == FRAC_PI_4,
        })
    }

    pub fn v1(&self) -> Vector2 {
        self.v1
    }

    pub fn v2(&self) -> Vector2 {
        self.v2
    }

    pub fn v3(&self) -> Vector2 {
        self.v3
    }

    pub fn v3_perp(&self) -> Vector2 {
        self.v3.perp()
    }

    /// Slip direction `i ∈ {1, 2}`.
    pub fn v(&self, i: usize) -> Vector2 {
        match i {
            1 => self.v1,
            2 => self.v2,
            _ => panic!("slip index must be 1 or 2, got {i}"),
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn is_orthogonal(&self) -> bool {
        self.orthogonal
    }

    /// Same slips with another soft volume fraction.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::assemble(self.v1, self.v2, self.theta, lambda)
    }

    /// Reflection about the `v3` axis; it exchanges `v1` and `v2`.
    pub fn bisector_reflection(&self) -> Matrix2 {
        self.v3.outer(self.v3) * 2.0 - Matrix2::IDENTITY
    }
}

/// A nonnegative energy value or the off-manifold marker.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedEnergy {
    Finite(f64),
    Infinite,
}

impl ExtendedEnergy {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedEnergy::Finite(v) => Some(v),
            ExtendedEnergy::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == ExtendedEnergy::Infinite
    }

    /// Floating view, mapping `Infinite` to `f64::INFINITY`.
    pub fn as_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl PartialOrd for ExtendedEnergy {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use ExtendedEnergy::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.partial_cmp(b),
            (Finite(_), Infinite) => Some(Ordering::Less),
            (Infinite, Finite(_)) => Some(Ordering::Greater),
            (Infinite, Infinite) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for ExtendedEnergy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedEnergy::Finite(v) => write!(f, "{v}"),
            ExtendedEnergy::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtendedEnergy {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedEnergy::Finite(v) => serializer.serialize_f64(*v),
            ExtendedEnergy::Infinite => serializer.serialize_str("inf"),
        }
    }
}

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

/// Is `F` within `tol` of `M = M₁ ∪ M₂`?
pub fn on_manifold(f: Matrix2, s: &SlipSystem, tol: f64) -> bool {
    (f.det() - 1.0).abs() <= tol
        && ((f * s.v1).norm() - 1.0)
            .abs()
            .min(((f * s.v2).norm() - 1.0).abs())
            <= tol
}

/// The condensed energy `W`: `|F|² − 2` on `M`, infinite elsewhere.
pub fn w_condensed(f: Matrix2, s: &SlipSystem, tol: f64) -> ExtendedEnergy {
    if on_manifold(f, s, tol) {
        ExtendedEnergy::Finite(pos(f.frobenius_sq() - 2.0))
    } else {
        ExtendedEnergy::Infinite
    }
}

/// `χ(z) = ((2z² − 1)₊^{1/2} − 1)₊²`.
pub fn chi(z: f64) -> f64 {
    pos(pos(2.0 * z * z - 1.0).sqrt() - 1.0).powi(2)
}

/// Member of the `h` family of envelope profiles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HKind {
    H,
    HStar,
    HPerp,
    HPerpStar,
    HPlus,
    HPerpPlus,
}

impl HKind {
    pub const ALL: [HKind; 6] = [
        HKind::H,
        HKind::HStar,
        HKind::HPerp,
        HKind::HPerpStar,
        HKind::HPlus,
        HKind::HPerpPlus,
    ];

    fn name(self) -> &'static str {
        match self {
            HKind::H => "h",
            HKind::HStar => "h*",
            HKind::HPerp => "h⊥",
            HKind::HPerpStar => "h⊥*",
            HKind::HPlus => "h+",
            HKind::HPerpPlus => "h⊥+",
        }
    }
}

/// Evaluate a member of the `h` family at `z` for half-angle `theta`.
///
/// `H` and `HPerp` are the clamped forms valid for every `z ≥ 0`; the starred
/// and plus forms require `z ≥ sin θ` (resp. `z ≥ cos θ`).
pub fn h_family(z: f64, theta: f64, which: HKind) -> Result<f64> {
    let (s, c) = theta.sin_cos();
    // The ⊥ variants are the plain ones with sin and cos exchanged.
    let (s, c) = match which {
        HKind::H | HKind::HStar | HKind::HPlus => (s, c),
        HKind::HPerp | HKind::HPerpStar | HKind::HPerpPlus => (c, s),
    };
    match which {
        HKind::H | HKind::HPerp => {
            Ok(pos(pos(z * z / (s * s) - 1.0).sqrt() - c / s).powi(2))
        }
        _ => {
            if z < s - DOMAIN_SLACK {
                return Err(Error::Domain {
                    what: which.name(),
                    z,
                    floor: s,
                });
            }
            let root = pos(z * z - s * s).sqrt();
            let sign = match which {
                HKind::HStar | HKind::HPerpStar => -1.0,
                _ => 1.0,
            };
            Ok((1.0 + z * z + sign * 2.0 * c * root) / (s * s) - 2.0)
        }
    }
}

/// `h(z)`; total in `z`.
pub fn h(z: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    pos(pos(z * z / (s * s) - 1.0).sqrt() - c / s).powi(2)
}

/// `h⊥(z)`; total in `z`.
pub fn h_perp(z: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    pos(pos(z * z / (c * c) - 1.0).sqrt() - s / c).powi(2)
}

/// Convex majorant `f` of the relaxation. For orthogonal slips
/// `max{(|Fv₁|²−1)₊, (|Fv₂|²−1)₊, χ(max{|Fv₃|, |Fv₃⊥|})}`, otherwise
/// `max{h(|Fv₃|), h⊥(|Fv₃⊥|)}`.
pub fn f_majorant(f: Matrix2, s: &SlipSystem) -> f64 {
    let z3 = (f * s.v3).norm();
    let z3p = (f * s.v3_perp()).norm();
    if s.orthogonal {
        pos((f * s.v1).norm_sq() - 1.0)
            .max(pos((f * s.v2).norm_sq() - 1.0))
            .max(chi(z3.max(z3p)))
    } else {
        h(z3, s.theta).max(h_perp(z3p, s.theta))
    }
}

/// Relaxed energy for orthogonal slips.
pub fn w_hom_orthogonal(f: Matrix2, s: &SlipSystem, tol: f64) -> ExtendedEnergy {
    if (f.det() - 1.0).abs() > tol {
        return ExtendedEnergy::Infinite;
    }
    let n1 = (f * s.v1).norm();
    let n2 = (f * s.v2).norm();
    let value = if n1 <= 1.0 {
        (f * s.v1.perp()).norm_sq() - 1.0
    } else if n2 <= 1.0 {
        (f * s.v2.perp()).norm_sq() - 1.0
    } else {
        chi((f * s.v3).norm().max((f * s.v3_perp()).norm()))
    };
    ExtendedEnergy::Finite(pos(value))
}

/// Relaxed energy where known in closed form, otherwise two-sided bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HomValue {
    Known(ExtendedEnergy),
    Bounds { lower: f64, upper: f64 },
}

impl HomValue {
    pub fn known(self) -> Option<ExtendedEnergy> {
        match self {
            HomValue::Known(e) => Some(e),
            HomValue::Bounds { .. } => None,
        }
    }
}

/// Mismatch between adjacent closed-form branches at a boundary point.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchDisagreement {
    pub label: RegionLabel,
    pub neighbour: RegionTag,
    pub gap: f64,
}

fn branch_value(f: Matrix2, s: &SlipSystem, tag: RegionTag) -> HomValue {
    let theta = s.theta;
    let z3 = (f * s.v3).norm();
    let z3p = (f * s.v3_perp()).norm();
    let slip = |i: usize| pos((f * s.v(i).perp()).norm_sq() - 1.0);
    let finite = |v: f64| HomValue::Known(ExtendedEnergy::Finite(v));
    match tag {
        RegionTag::OffManifold => HomValue::Known(ExtendedEnergy::Infinite),
        RegionTag::SO2 | RegionTag::M1 => finite(slip(1)),
        RegionTag::M2 => finite(slip(2)),
        RegionTag::A | RegionTag::N1capN2 => finite(h(z3, theta)),
        RegionTag::APerp => finite(h_perp(z3p, theta)),
        RegionTag::N1only | RegionTag::N2only => {
            let i = if tag == RegionTag::N1only { 1 } else { 2 };
            let (sn, cs) = theta.sin_cos();
            let mut upper = slip(i);
            if z3 >= sn {
                upper = upper.min(h_family(z3, theta, HKind::HPlus).unwrap_or(f64::INFINITY));
            }
            if z3p >= cs {
                upper = upper.min(h_family(z3p, theta, HKind::HPerpPlus).unwrap_or(f64::INFINITY));
            }
            HomValue::Bounds {
                lower: h(z3, theta).max(h_perp(z3p, theta)),
                upper,
            }
        }
    }
}

/// Relaxed energy for general slip angles, with the boundary cross-check
/// result. Boundary points use the branch of their own label; every adjacent
/// branch must agree within `10·tol`.
pub fn w_hom_general_checked(
    f: Matrix2,
    s: &SlipSystem,
    tol: f64,
) -> (HomValue, Option<BranchDisagreement>) {
    let label = classify(f, s, tol);
    let value = branch_value(f, s, label.tag);
    let mut worst: Option<BranchDisagreement> = None;
    if let HomValue::Known(ExtendedEnergy::Finite(v)) = value {
        let band = 10.0 * tol * v.abs().max(1.0);
        for &neighbour in &label.boundary {
            let gap = match branch_value(f, s, neighbour) {
                HomValue::Known(e) => (e.as_f64() - v).abs(),
                HomValue::Bounds { lower, upper } => pos(lower - v).max(pos(v - upper)),
            };
            if gap > band && worst.as_ref().is_none_or(|w| gap > w.gap) {
                worst = Some(BranchDisagreement {
                    label: label.clone(),
                    neighbour,
                    gap,
                });
            }
        }
    }
    (value, worst)
}

/// Relaxed energy for general slip angles: `Known` on `A`, `A⊥`, `N₁∩N₂` and
/// `M`, `Bounds` on `N₁\N₂` and `N₂\N₁`.
pub fn w_hom_general(f: Matrix2, s: &SlipSystem, tol: f64) -> HomValue {
    let (value, disagreement) = w_hom_general_checked(f, s, tol);
    if let Some(d) = disagreement {
        log::warn!(
            "closed-form branches disagree by {:e} between {:?} and {:?} at {:?}",
            d.gap,
            d.label.tag,
            d.neighbour,
            f
        );
    }
    value
}

/// Dispatch on the slip geometry.
pub fn w_hom(f: Matrix2, s: &SlipSystem, tol: f64) -> HomValue {
    if s.orthogonal {
        HomValue::Known(w_hom_orthogonal(f, s, tol))
    } else {
        w_hom_general(f, s, tol)
    }
}

/// `N = R(I + (γ/λ) e₁⊗e₂)` from `λN + (1−λ)R = R(I + γ e₁⊗e₂)`.
pub fn soft_gradient(gamma: f64, lambda: f64, rotation: Matrix2) -> Matrix2 {
    rotation * Matrix2::new(1.0, gamma / lambda, 0.0, 1.0)
}

/// Relaxed energy of the soft phase as a function of the macroscopic shear
/// `γ`, for orthogonal slips with `v1 = (a, b)`.
pub fn w_hom_scalar(gamma: f64, s: &SlipSystem) -> f64 {
    let (a, b) = (s.v1.x, s.v1.y);
    let lambda = s.lambda;
    let g = gamma / lambda;
    let ab = a * b;
    let lower_slip = 2.0 * ab * g + b * b * g * g;
    let upper_slip = -2.0 * ab * g + a * a * g * g;
    if ab == 0.0 {
        // One slip is a coordinate axis and stays unstretched.
        return g * g;
    }
    let (first, second, radicand) = if ab > 0.0 {
        (
            (0.0..=2.0 * lambda * b / a).contains(&gamma),
            (-2.0 * lambda * a / b..=0.0).contains(&gamma),
            1.0 + 2.0 * (a * a - b * b) * g + (1.0 + 2.0 * ab) * g * g,
        )
    } else {
        (
            (2.0 * lambda * b / a..=0.0).contains(&gamma),
            (0.0..=-2.0 * lambda * a / b).contains(&gamma),
            1.0 + 2.0 * (b * b - a * a) * g + (1.0 - 2.0 * ab) * g * g,
        )
    };
    if first {
        lower_slip
    } else if second {
        upper_slip
    } else {
        pos(pos(radicand).sqrt() - 1.0).powi(2)
    }
}

/// Checks `f(A + D) ≤ |A + D|² − 2 + c(√|D| + |D|)(√|A| + |A| + √|D| + |D|)`
/// for `A = R(I + γ₂ v₂⊗v₁)` or `R(I + γ₂ v₁⊗v₂)` and `D = R γ₁ e₁⊗e₂`.
pub fn lemma_fad_check(a: Matrix2, d: Matrix2, c: f64, s: &SlipSystem) -> Result<bool> {
    const STRUCTURE_TOL: f64 = 1e-10;
    if !s.orthogonal {
        return Err(Error::Precondition("the estimate needs orthogonal slips".into()));
    }
    let e12 = Vector2::new(1.0, 0.0).outer(Vector2::new(0.0, 1.0));
    let forms = [(s.v2, s.v2, s.v1), (s.v1, s.v1, s.v2)];
    let structured = forms.iter().any(|&(fixed, u, w)| {
        let q = a * fixed;
        if (q.norm() - 1.0).abs() > STRUCTURE_TOL {
            return false;
        }
        let r = q.outer(fixed) + q.perp().outer(fixed.perp());
        let g = r.transpose() * a - Matrix2::IDENTITY;
        let gamma2 = u.dot(g * w);
        let a_ok = max_abs(g - u.outer(w) * gamma2) <= STRUCTURE_TOL * a.frobenius().max(1.0);
        let rd = r.transpose() * d;
        let d_ok = max_abs(rd - e12 * rd.m12) <= STRUCTURE_TOL * d.frobenius().max(1.0);
        a_ok && d_ok
    });
    if !structured {
        return Err(Error::Precondition(
            "A and D must share a rotation R with A = R(I + γ v_i⊗v_j), D = R γ' e1⊗e2".into(),
        ));
    }
    let f = a + d;
    let (na, nd) = (a.frobenius(), d.frobenius());
    let rhs = f.frobenius_sq() - 2.0 + c * (nd.sqrt() + nd) * (na.sqrt() + na + nd.sqrt() + nd);
    // Rounding slack: with D = 0 both sides agree analytically.
    Ok(f_majorant(f, s) <= rhs + 1e-12 * f.frobenius_sq().max(1.0))
}

fn max_abs(m: Matrix2) -> f64 {
    m.entries().iter().fold(0.0, |acc, e| acc.max(e.abs()))
}
