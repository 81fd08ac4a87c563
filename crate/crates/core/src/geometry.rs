//! Rotation, Euler-angle and rigid-transform algebra.
//!
//! Conventions used throughout the crate:
//!
//! * Euler angles `(phi, theta, psi)` are intrinsic rotations about X, Y and Z,
//!   composed as `R = Rz(psi) * Ry(theta) * Rx(phi)`.
//! * A [`RigidTransform`] `T_s^d` maps points expressed in frame `d` into frame
//!   `s`; `compose(a, b)` is the matrix product `a * b` (apply `b` first).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Matrix4, Vector3};
use thiserror::Error;

pub type Vec3 = Vector3<f64>;

/// Tolerance for `R^T R = I` and `det R = 1` on matrices built in-process.
pub const ROTATION_TOLERANCE: f64 = 1e-9;
/// Above this orthonormality defect a matrix read from text is rejected
/// instead of repaired.
pub const REPAIR_LIMIT: f64 = 1e-4;
/// `|r31|` at or above `1 - GIMBAL_EPS` is treated as gimbal lock.
pub const GIMBAL_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("matrix is not a rotation: orthonormality defect {defect:.3e}, det {det:.6}")]
    NotARotation { defect: f64, det: f64 },
    #[error("non-finite value in transform")]
    NonFinite,
    #[error("expected 16 numbers for a 4x4 transform, found {0}")]
    WrongCount(usize),
    #[error("bottom row of transform must be [0 0 0 1]")]
    BadBottomRow,
    #[error("cannot parse number `{0}`")]
    Parse(String),
}

/// A proper rotation matrix. Columns are the images of the X, Y, Z axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(Matrix3<f64>);

impl RotationMatrix {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Checks the invariants at [`ROTATION_TOLERANCE`].
    pub fn new(m: Matrix3<f64>) -> Result<Self, GeometryError> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let defect = orthonormality_defect(&m);
        let det = m.determinant();
        if defect > ROTATION_TOLERANCE || (det - 1.0).abs() > ROTATION_TOLERANCE {
            return Err(GeometryError::NotARotation { defect, det });
        }
        Ok(Self(m))
    }

    /// Accepts a matrix that is a rotation up to serialization rounding.
    ///
    /// Defects up to [`ROTATION_TOLERANCE`] pass through untouched, defects up
    /// to [`REPAIR_LIMIT`] are projected onto the nearest rotation, anything
    /// larger is rejected.
    pub fn new_repaired(m: Matrix3<f64>) -> Result<Self, GeometryError> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let defect = orthonormality_defect(&m);
        let det = m.determinant();
        if defect > REPAIR_LIMIT || det <= 0.0 {
            return Err(GeometryError::NotARotation { defect, det });
        }
        if defect <= ROTATION_TOLERANCE && (det - 1.0).abs() <= ROTATION_TOLERANCE {
            return Ok(Self(m));
        }
        Self::new(nearest_rotation(&m))
    }

    /// Rotation whose columns are the given axes.
    pub fn from_columns(i: &Vec3, j: &Vec3, k: &Vec3) -> Result<Self, GeometryError> {
        Self::new(Matrix3::from_columns(&[*i, *j, *k]))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    /// Row-major element access, zero based.
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    pub fn column(&self, c: usize) -> Vec3 {
        self.0.column(c).into_owned()
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    /// Geodesic angle between two rotations, radians.
    pub fn angle_to(&self, other: &Self) -> f64 {
        let rel = self.0.transpose() * other.0;
        ((rel.trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos()
    }

    pub fn rot_x(a: f64) -> Self {
        let (s, c) = a.sin_cos();
        Self(Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c))
    }

    pub fn rot_y(a: f64) -> Self {
        let (s, c) = a.sin_cos();
        Self(Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c))
    }

    pub fn rot_z(a: f64) -> Self {
        let (s, c) = a.sin_cos();
        Self(Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0))
    }
}

/// `||R^T R - I||_F`
pub fn orthonormality_defect(m: &Matrix3<f64>) -> f64 {
    (m.transpose() * m - Matrix3::identity()).norm()
}

fn nearest_rotation(m: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = m.svd(true, true);
    let u = svd.u.expect("svd u");
    let v_t = svd.v_t.expect("svd v_t");
    let mut r = u * v_t;
    if r.determinant() < 0.0 {
        let mut u = u;
        let mut col = u.column_mut(2);
        col *= -1.0;
        r = u * v_t;
    }
    r
}

/// Intrinsic X, Y, Z rotation angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct EulerAngles {
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
}

impl EulerAngles {
    pub fn new(phi: f64, theta: f64, psi: f64) -> Self {
        Self { phi, theta, psi }
    }
}

/// Result of extracting Euler angles from a rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerSolution {
    pub angles: EulerAngles,
    /// Set when `|r31| >= 1 - GIMBAL_EPS`; `phi` is then pinned to zero.
    pub gimbal_lock: bool,
}

/// Gripper roll, pitch and yaw extracted from a transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RollPitchYaw {
    pub gamma: f64,
    pub beta: f64,
    pub alpha: f64,
    pub gimbal_lock: bool,
}

/// Maps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a % (2.0 * PI);
    if w <= -PI {
        w += 2.0 * PI;
    } else if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// `R = Rz(psi) Ry(theta) Rx(phi)`.
pub fn rot_from_euler(angles: EulerAngles) -> RotationMatrix {
    let rx = RotationMatrix::rot_x(angles.phi);
    let ry = RotationMatrix::rot_y(angles.theta);
    let rz = RotationMatrix::rot_z(angles.psi);
    rz.mul(&ry).mul(&rx)
}

/// Inverse of [`rot_from_euler`].
///
/// Uses `phi = atan2(j_Z, k_Z)`, `theta = asin(-i_Z)`, `psi = atan2(i_Y, i_X)`.
/// At gimbal lock `phi := 0` and `psi = atan2(-r12, r22)`.
pub fn euler_from_rot(r: &RotationMatrix) -> EulerSolution {
    let m = r.matrix();
    let i_z = m[(2, 0)];
    if i_z.abs() >= 1.0 - GIMBAL_EPS {
        let theta = if i_z < 0.0 { PI / 2.0 } else { -PI / 2.0 };
        let psi = wrap_angle((-m[(0, 1)]).atan2(m[(1, 1)]));
        return EulerSolution {
            angles: EulerAngles::new(0.0, theta, psi),
            gimbal_lock: true,
        };
    }
    let phi = wrap_angle(m[(2, 1)].atan2(m[(2, 2)]));
    let theta = (-i_z).clamp(-1.0, 1.0).asin();
    let psi = wrap_angle(m[(1, 0)].atan2(m[(0, 0)]));
    EulerSolution {
        angles: EulerAngles::new(phi, theta, psi),
        gimbal_lock: false,
    }
}

/// Roll `gamma = atan2(r32, r33)`, pitch `beta = atan2(-r31, sqrt(r32^2 + r33^2))`,
/// yaw `alpha = atan2(r21, r11)`.
///
/// This is the same extraction as [`euler_from_rot`] under renamed symbols and
/// goes through the same code, so the two agree bit for bit.
pub fn rpy_from_transform(t: &RigidTransform) -> RollPitchYaw {
    let sol = euler_from_rot(&t.rotation);
    RollPitchYaw {
        gamma: sol.angles.phi,
        beta: sol.angles.theta,
        alpha: sol.angles.psi,
        gimbal_lock: sol.gimbal_lock,
    }
}

/// Rotation plus translation, `[[R, t], [0, 1]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub rotation: RotationMatrix,
    pub translation: Vec3,
}

impl Default for RigidTransform {
    fn default() -> Self {
        Self::identity()
    }
}

impl RigidTransform {
    pub fn new(rotation: RotationMatrix, translation: Vec3) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    pub fn identity() -> Self {
        Self::new(RotationMatrix::identity(), Vec3::zeros())
    }

    pub fn from_translation(x: f64, y: f64, z: f64) -> Self {
        Self::new(RotationMatrix::identity(), Vec3::new(x, y, z))
    }

    pub fn from_rotation(rotation: RotationMatrix) -> Self {
        Self::new(rotation, Vec3::zeros())
    }

    pub fn to_matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0)
            .copy_from(self.rotation.matrix());
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    /// Builds a transform from a homogeneous matrix, repairing small
    /// orthonormality defects in the rotation block.
    pub fn from_matrix(m: &Matrix4<f64>) -> Result<Self, GeometryError> {
        let bottom = [m[(3, 0)], m[(3, 1)], m[(3, 2)], m[(3, 3)]];
        if bottom.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        if bottom[0].abs() > 1e-12
            || bottom[1].abs() > 1e-12
            || bottom[2].abs() > 1e-12
            || (bottom[3] - 1.0).abs() > 1e-12
        {
            return Err(GeometryError::BadBottomRow);
        }
        let rotation = RotationMatrix::new_repaired(m.fixed_view::<3, 3>(0, 0).into_owned())?;
        let translation: Vec3 = m.fixed_view::<3, 1>(0, 3).into_owned();
        if translation.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        Ok(Self::new(rotation, translation))
    }

    /// Row-major 16 numbers.
    pub fn to_row_major(&self) -> [f64; 16] {
        let m = self.to_matrix();
        let mut out = [0.0; 16];
        for r in 0..4 {
            for c in 0..4 {
                out[r * 4 + c] = m[(r, c)];
            }
        }
        out
    }

    pub fn from_row_major(values: &[f64]) -> Result<Self, GeometryError> {
        if values.len() != 16 {
            return Err(GeometryError::WrongCount(values.len()));
        }
        Self::from_matrix(&Matrix4::from_row_slice(values))
    }

    pub fn transform_point(&self, p: &Vec3) -> Vec3 {
        self.rotation.apply(p) + self.translation
    }
}

/// `(R^T, -R^T t)`.
pub fn invert(t: &RigidTransform) -> RigidTransform {
    let rt = t.rotation.transpose();
    RigidTransform::new(rt, -rt.apply(&t.translation))
}

/// Matrix product `a * b`: applies `b` first, then `a`.
pub fn compose(a: &RigidTransform, b: &RigidTransform) -> RigidTransform {
    RigidTransform::new(
        a.rotation.mul(&b.rotation),
        a.rotation.apply(&b.translation) + a.translation,
    )
}

/// Formats a number with 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{:.16e}", v)
}

/// Parses whitespace separated numbers, skipping `#` comment lines.
pub fn parse_numbers(text: &str) -> Result<Vec<f64>, GeometryError> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(|c: char| c.is_whitespace() || c == ','))
        .filter(|tok| !tok.is_empty())
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| GeometryError::Parse(tok.to_string()))
        })
        .collect()
}

impl fmt::Display for RigidTransform {
    /// Four lines of four numbers, row-major.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_row_major();
        for r in 0..4 {
            let row: Vec<String> = v[r * 4..r * 4 + 4].iter().map(|x| fmt_f64(*x)).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for RigidTransform {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_row_major(&parse_numbers(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn max_abs(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
        (a - b).abs().max()
    }

    // Plain triple loop, independent of nalgebra's product.
    fn mul3(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    out[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        out
    }

    fn mul4(a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
        let mut out = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    out[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        out
    }

    fn rows4(t: &RigidTransform) -> [[f64; 4]; 4] {
        let v = t.to_row_major();
        let mut out = [[0.0; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                out[r][c] = v[r * 4 + c];
            }
        }
        out
    }

    fn arb_transform() -> impl Strategy<Value = RigidTransform> {
        (
            -PI..PI,
            -1.5f64..1.5,
            -PI..PI,
            -5.0f64..5.0,
            -5.0f64..5.0,
            -5.0f64..5.0,
        )
            .prop_map(|(a, b, c, x, y, z)| {
                RigidTransform::new(
                    rot_from_euler(EulerAngles::new(a, b, c)),
                    Vec3::new(x, y, z),
                )
            })
    }

    #[test]
    fn euler_zero_is_identity() {
        let r = rot_from_euler(EulerAngles::default());
        assert_eq!(*r.matrix(), Matrix3::identity());
    }

    #[test]
    fn pure_yaw_quarter_turn() {
        let r = rot_from_euler(EulerAngles::new(0.0, 0.0, PI / 2.0));
        let expected = Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        assert!(max_abs(r.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn euler_product_matches_factor_matrices() {
        let (phi, theta, psi) = (0.1f64, 0.2f64, 0.3f64);
        let rx = [
            [1.0, 0.0, 0.0],
            [0.0, phi.cos(), -phi.sin()],
            [0.0, phi.sin(), phi.cos()],
        ];
        let ry = [
            [theta.cos(), 0.0, theta.sin()],
            [0.0, 1.0, 0.0],
            [-theta.sin(), 0.0, theta.cos()],
        ];
        let rz = [
            [psi.cos(), -psi.sin(), 0.0],
            [psi.sin(), psi.cos(), 0.0],
            [0.0, 0.0, 1.0],
        ];
        let m = mul3(&mul3(&rz, &ry), &rx);
        let r = rot_from_euler(EulerAngles::new(phi, theta, psi));
        for i in 0..3 {
            for j in 0..3 {
                assert!((r.at(i, j) - m[i][j]).abs() < 1e-15);
            }
        }
        // Closed-form entries of the composed matrix.
        let (sf, cf) = phi.sin_cos();
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = psi.sin_cos();
        assert!((r.at(0, 1) - (sf * st * cp - cf * sp)).abs() < 1e-15);
        assert!((r.at(2, 1) - sf * ct).abs() < 1e-15);
        assert!((r.at(1, 2) - (cf * st * sp - sf * cp)).abs() < 1e-15);
    }

    #[test]
    fn euler_identity_and_round_trip() {
        let sol = euler_from_rot(&RotationMatrix::identity());
        assert_eq!(sol.angles, EulerAngles::new(0.0, 0.0, 0.0));
        assert!(!sol.gimbal_lock);

        let sol = euler_from_rot(&rot_from_euler(EulerAngles::new(0.1, 0.2, 0.3)));
        assert!((sol.angles.phi - 0.1).abs() < 1e-9);
        assert!((sol.angles.theta - 0.2).abs() < 1e-9);
        assert!((sol.angles.psi - 0.3).abs() < 1e-9);
    }

    #[test]
    fn gimbal_lock_pins_phi() {
        let r = rot_from_euler(EulerAngles::new(0.4, PI / 2.0, 0.7));
        assert!((r.at(2, 0) + 1.0).abs() < 1e-15);
        let sol = euler_from_rot(&r);
        assert!(sol.gimbal_lock);
        assert_eq!(sol.angles.phi, 0.0);
        assert_eq!(sol.angles.theta, PI / 2.0);
        // Only phi - psi is observable here; the fallback must still reproduce R.
        let back = rot_from_euler(sol.angles);
        assert!(max_abs(back.matrix(), r.matrix()) < 1e-12);

        let r = rot_from_euler(EulerAngles::new(0.4, -PI / 2.0, 0.7));
        let sol = euler_from_rot(&r);
        assert!(sol.gimbal_lock);
        assert!(max_abs(rot_from_euler(sol.angles).matrix(), r.matrix()) < 1e-12);
    }

    #[test]
    fn angles_are_wrapped() {
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        let sol = euler_from_rot(&RotationMatrix::rot_x(PI));
        assert_eq!(sol.angles.phi, PI);
    }

    #[test]
    fn rpy_single_axis() {
        let t = RigidTransform::from_rotation(RotationMatrix::rot_x(0.4));
        let rpy = rpy_from_transform(&t);
        assert!((rpy.gamma - 0.4).abs() < 1e-15);
        assert_eq!(rpy.beta, 0.0);
        assert_eq!(rpy.alpha, 0.0);
        let rpy = rpy_from_transform(&RigidTransform::identity());
        assert_eq!((rpy.gamma, rpy.beta, rpy.alpha), (0.0, 0.0, 0.0));
    }

    #[test]
    fn rpy_formula_agrees_with_explicit_atan2() {
        let r = rot_from_euler(EulerAngles::new(-0.7, 0.35, 2.1));
        let m = r.matrix();
        let gamma = m[(2, 1)].atan2(m[(2, 2)]);
        let beta = (-m[(2, 0)]).atan2((m[(2, 1)].powi(2) + m[(2, 2)].powi(2)).sqrt());
        let alpha = m[(1, 0)].atan2(m[(0, 0)]);
        let rpy = rpy_from_transform(&RigidTransform::from_rotation(r));
        assert!((rpy.gamma - gamma).abs() < 1e-12);
        assert!((rpy.beta - beta).abs() < 1e-12);
        assert!((rpy.alpha - alpha).abs() < 1e-12);
    }

    #[test]
    fn invert_simple_cases() {
        assert_eq!(
            invert(&RigidTransform::identity()),
            RigidTransform::identity()
        );
        let t = invert(&RigidTransform::from_translation(1.0, 2.0, 3.0));
        assert_eq!(t.translation, Vec3::new(-1.0, -2.0, -3.0));
        assert_eq!(*t.rotation.matrix(), Matrix3::identity());
    }

    #[test]
    fn compose_simple_cases() {
        let t = RigidTransform::new(RotationMatrix::rot_y(0.3), Vec3::new(1.0, -2.0, 0.5));
        assert_eq!(compose(&RigidTransform::identity(), &t), t);
        let s = compose(
            &RigidTransform::from_translation(1.0, 2.0, 3.0),
            &RigidTransform::from_translation(0.5, -1.0, 2.0),
        );
        assert_eq!(s.translation, Vec3::new(1.5, 1.0, 5.0));

        let a = RigidTransform::from_rotation(RotationMatrix::rot_z(PI / 2.0));
        let b = RigidTransform::from_translation(1.0, 0.0, 0.0);
        let c = compose(&a, &b);
        let oracle = mul4(&rows4(&a), &rows4(&b));
        assert!((c.translation - Vec3::new(0.0, 1.0, 0.0)).abs().max() < 1e-15);
        let got = rows4(&c);
        for i in 0..4 {
            for j in 0..4 {
                assert!((got[i][j] - oracle[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn repair_accepts_rounding_and_rejects_garbage() {
        let r = rot_from_euler(EulerAngles::new(0.3, -0.2, 1.1));
        let noisy = r.matrix() + Matrix3::from_element(1e-7);
        assert!(RotationMatrix::new(noisy).is_err());
        let fixed = RotationMatrix::new_repaired(noisy).unwrap();
        assert!(orthonormality_defect(fixed.matrix()) < 1e-12);
        assert!(fixed.angle_to(&r) < 1e-6);

        let bad = r.matrix() + Matrix3::from_element(1e-2);
        assert!(RotationMatrix::new_repaired(bad).is_err());
        let reflection = Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0);
        assert!(RotationMatrix::new_repaired(reflection).is_err());
    }

    #[test]
    fn text_round_trip_is_exact() {
        let t = RigidTransform::new(
            rot_from_euler(EulerAngles::new(0.123456789, -0.987654321, 2.5)),
            Vec3::new(0.1, -1.0 / 3.0, 12.75),
        );
        let text = t.to_string();
        assert_eq!(text.lines().count(), 4);
        let back: RigidTransform = text.parse().unwrap();
        assert_eq!(back, t);
        assert!(matches!(
            "1 2 3".parse::<RigidTransform>(),
            Err(GeometryError::WrongCount(3))
        ));
        let bad_bottom = "1 0 0 0\n0 1 0 0\n0 0 1 0\n1 0 0 1";
        assert_eq!(
            bad_bottom.parse::<RigidTransform>(),
            Err(GeometryError::BadBottomRow)
        );
    }

    proptest! {
        #[test]
        fn round_trip_away_from_gimbal_lock(
            phi in -PI..PI, theta in (-PI / 2.0 + 0.01)..(PI / 2.0 - 0.01), psi in -PI..PI
        ) {
            let r = rot_from_euler(EulerAngles::new(phi, theta, psi));
            prop_assert!(orthonormality_defect(r.matrix()) < 1e-9);
            prop_assert!((r.matrix().determinant() - 1.0).abs() < 1e-9);
            let sol = euler_from_rot(&r);
            prop_assert!(!sol.gimbal_lock);
            let back = rot_from_euler(sol.angles);
            prop_assert!((back.matrix() - r.matrix()).norm() < 1e-9);
            prop_assert!(sol.angles.phi > -PI && sol.angles.phi <= PI);
            prop_assert!(sol.angles.psi > -PI && sol.angles.psi <= PI);
        }

        #[test]
        fn rpy_matches_euler(t in arb_transform()) {
            let rpy = rpy_from_transform(&t);
            let e = euler_from_rot(&t.rotation);
            prop_assert_eq!(rpy.gamma, e.angles.phi);
            prop_assert_eq!(rpy.beta, e.angles.theta);
            prop_assert_eq!(rpy.alpha, e.angles.psi);
        }

        #[test]
        fn invert_is_inverse_and_involution(t in arb_transform()) {
            let id = compose(&t, &invert(&t));
            prop_assert!((id.to_matrix() - Matrix4::identity()).abs().max() < 1e-12);
            let back = invert(&invert(&t));
            prop_assert!((back.to_matrix() - t.to_matrix()).abs().max() < 1e-12);
        }

        #[test]
        fn compose_is_associative(a in arb_transform(), b in arb_transform(), c in arb_transform()) {
            let l = compose(&compose(&a, &b), &c);
            let r = compose(&a, &compose(&b, &c));
            prop_assert!((l.to_matrix() - r.to_matrix()).abs().max() < 1e-12);
        }
    }
}
