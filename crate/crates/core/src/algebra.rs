//! Exact 2×2 algebra, rank-one lines and the frame identities the
//! laminate constructions rely on.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances::{FRAME_TOL, ROOT_TOL, UNIT_TOL};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vector2 {
    pub x: f64,
    pub y: f64,
}

impl Vector2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector at angle `phi` from the first axis.
    pub fn from_angle(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self::new(c, s)
    }

    /// Counter-clockwise rotation by π/2: `(x, y) ↦ (−y, x)`.
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    /// Tensor product `self ⊗ other`, i.e. the matrix `x ↦ self (other · x)`.
    pub fn outer(self, other: Self) -> Matrix2 {
        Matrix2::new(
            self.x * other.x,
            self.x * other.y,
            self.y * other.x,
            self.y * other.y,
        )
    }
}

impl Add for Vector2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vector2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vector2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vector2 {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

/// Row-major 2×2 matrix `[[m11, m12], [m21, m22]]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Matrix2 {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl Matrix2 {
    pub const IDENTITY: Self = Self::new(1.0, 0.0, 0.0, 1.0);

    pub const fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub const fn diag(a: f64, d: f64) -> Self {
        Self::new(a, 0.0, 0.0, d)
    }

    /// Counter-clockwise rotation by `angle`.
    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c, -s, s, c)
    }

    /// Matrix with the given columns.
    pub fn from_columns(c1: Vector2, c2: Vector2) -> Self {
        Self::new(c1.x, c2.x, c1.y, c2.y)
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.m11 * self.m11 + self.m12 * self.m12 + self.m21 * self.m21 + self.m22 * self.m22
    }

    pub fn frobenius(&self) -> f64 {
        self.frobenius_sq().sqrt()
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.m11, self.m21, self.m12, self.m22)
    }

    pub fn apply(&self, v: Vector2) -> Vector2 {
        Vector2::new(
            self.m11 * v.x + self.m12 * v.y,
            self.m21 * v.x + self.m22 * v.y,
        )
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.m11, self.m12, self.m21, self.m22]
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|e| e.is_finite())
    }
}

impl Add for Matrix2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.m11 + o.m11,
            self.m12 + o.m12,
            self.m21 + o.m21,
            self.m22 + o.m22,
        )
    }
}

impl Sub for Matrix2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(
            self.m11 - o.m11,
            self.m12 - o.m12,
            self.m21 - o.m21,
            self.m22 - o.m22,
        )
    }
}

impl Neg for Matrix2 {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl Mul<f64> for Matrix2 {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::new(self.m11 * k, self.m12 * k, self.m21 * k, self.m22 * k)
    }
}

impl Mul<Vector2> for Matrix2 {
    type Output = Vector2;
    fn mul(self, v: Vector2) -> Vector2 {
        self.apply(v)
    }
}

impl Mul for Matrix2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.m11 * o.m11 + self.m12 * o.m21,
            self.m11 * o.m12 + self.m12 * o.m22,
            self.m21 * o.m11 + self.m22 * o.m21,
            self.m21 * o.m12 + self.m22 * o.m22,
        )
    }
}

/// `M v`.
pub fn apply(m: Matrix2, v: Vector2) -> Vector2 {
    m.apply(v)
}

/// Both sides of `|Fa|²|Fb|² = |Fa·Fb|² + det(F)(a⊥·b)²`.
///
/// The identity is exact only for `det F = 1`; both sides are returned so
/// callers can measure the gap.
pub fn identity_f1(f: Matrix2, a: Vector2, b: Vector2) -> (f64, f64) {
    let fa = f * a;
    let fb = f * b;
    let lhs = fa.norm_sq() * fb.norm_sq();
    let cross = a.perp().dot(b);
    let rhs = fa.dot(fb).powi(2) + f.det() * cross * cross;
    (lhs, rhs)
}

/// `(|Fa|² + |Fb|² − 2(a·b)(Fa·Fb)) / (a⊥·b)²`, which equals `|F|²` for unit `a`, `b`.
pub fn identity_f2(f: Matrix2, a: Vector2, b: Vector2) -> Result<f64> {
    for (name, v) in [("a", a), ("b", b)] {
        if (v.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::Precondition(format!(
                "{name} must be a unit vector, |{name}| = {}",
                v.norm()
            )));
        }
    }
    let cross = a.perp().dot(b);
    if cross.abs() < FRAME_TOL {
        return Err(Error::DegenerateFrame {
            cross: cross.abs(),
            limit: FRAME_TOL,
        });
    }
    let fa = f * a;
    let fb = f * b;
    Ok((fa.norm_sq() + fb.norm_sq() - 2.0 * a.dot(b) * fa.dot(fb)) / (cross * cross))
}

/// Symmetric positive definite det-1 representative of the `(b, c)` plane:
/// `[[a+b, c], [c, a−b]]` with `a = √(1+b²+c²)`.
pub fn bc_to_matrix(b: f64, c: f64) -> Matrix2 {
    let a = (1.0 + b * b + c * c).sqrt();
    // a ± b loses digits when |b| dominates; use (a+b)(a−b) = 1 + c² instead.
    let (p, m) = if b >= 0.0 {
        let p = a + b;
        (p, (1.0 + c * c) / p)
    } else {
        let m = a - b;
        ((1.0 + c * c) / m, m)
    };
    Matrix2::new(p, c, c, m)
}

/// Real roots of a quadratic (or of the constant-in-`t` degenerate case).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Roots {
    None,
    One(f64),
    /// Ascending.
    Two(f64, f64),
}

impl Roots {
    pub fn to_vec(self) -> Vec<f64> {
        match self {
            Roots::None => vec![],
            Roots::One(r) => vec![r],
            Roots::Two(r, s) => vec![r, s],
        }
    }

    pub fn len(self) -> usize {
        match self {
            Roots::None => 0,
            Roots::One(_) => 1,
            Roots::Two(..) => 2,
        }
    }

    pub fn is_empty(self) -> bool {
        self.len() == 0
    }

    fn map(self, mut f: impl FnMut(f64) -> f64) -> Self {
        match self {
            Roots::None => Roots::None,
            Roots::One(r) => Roots::One(f(r)),
            Roots::Two(r, s) => {
                let (r, s) = (f(r), f(s));
                if r <= s {
                    Roots::Two(r, s)
                } else {
                    Roots::Two(s, r)
                }
            }
        }
    }
}

/// Real roots of `a t² + b t + c` with `a ≠ 0`, via the cancellation-free
/// form of the quadratic formula. Near-zero discriminants give a double root.
pub fn solve_quadratic(a: f64, b: f64, c: f64) -> Roots {
    let disc = b * b - 4.0 * a * c;
    let scale = 1f64.max(b * b).max((4.0 * a * c).abs());
    if disc < -ROOT_TOL * scale {
        return Roots::None;
    }
    if disc.abs() <= ROOT_TOL * scale {
        return Roots::One(-b / (2.0 * a));
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    let (r1, r2) = (q / a, c / q);
    if r1 <= r2 {
        Roots::Two(r1, r2)
    } else {
        Roots::Two(r2, r1)
    }
}

/// The line `t ↦ base (I + t a⊗n)` in matrix space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankOneLine {
    pub base: Matrix2,
    pub left: Vector2,
    pub normal: Vector2,
    /// `a·n = 0`, so the determinant is constant along the line.
    pub det_preserving: bool,
}

impl RankOneLine {
    pub fn new(base: Matrix2, left: Vector2, normal: Vector2) -> Self {
        let scale = 1f64.max(left.norm() * normal.norm());
        let det_preserving = left.dot(normal).abs() <= ROOT_TOL * scale;
        Self {
            base,
            left,
            normal,
            det_preserving,
        }
    }

    pub fn point(&self, t: f64) -> Matrix2 {
        self.base + (self.base * self.left).outer(self.normal) * t
    }
}

/// Solutions of `|F_t v| = 1` along a rank-one line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum UnitImageTimes {
    Roots(Roots),
    /// `n·v = 0` and `|F v| = 1`: the constraint holds for every `t`.
    DegenerateConstant,
}

impl UnitImageTimes {
    pub fn roots(self) -> Roots {
        match self {
            UnitImageTimes::Roots(r) => r,
            UnitImageTimes::DegenerateConstant => Roots::None,
        }
    }
}

/// All real `t` with `|line.point(t) v| = 1`, ascending, each polished by one
/// Newton step on the directly evaluated residual.
pub fn solve_unit_image_times(line: &RankOneLine, v: Vector2) -> UnitImageTimes {
    let fv = line.base * v;
    let fa = line.base * line.left;
    let nv = line.normal.dot(v);
    let c = fv.norm_sq() - 1.0;
    let scale = 1f64.max(line.base.frobenius()).max(line.normal.norm());
    if nv.abs() <= ROOT_TOL * scale {
        return if c.abs() <= ROOT_TOL * 1f64.max(fv.norm_sq()) {
            UnitImageTimes::DegenerateConstant
        } else {
            UnitImageTimes::Roots(Roots::None)
        };
    }
    let alpha = nv * nv * fa.norm_sq();
    let beta = 2.0 * nv * fa.dot(fv);
    let roots = solve_quadratic(alpha, beta, c);
    let polished = roots.map(|t| {
        let w = fv + fa * (t * nv);
        let g = w.norm_sq() - 1.0;
        let dg = 2.0 * nv * fa.dot(w);
        if dg.abs() > ROOT_TOL * scale {
            t - g / dg
        } else {
            t
        }
    });
    UnitImageTimes::Roots(polished)
}
