//! Array geometry: element coordinates, spherical unit vectors, angle
//! extraction, rotations, and antenna field patterns.
//!
//! Coordinate convention: global frame is z-up, and an unrotated array has
//! its boresight along +x with the element grid in the y-z plane (columns
//! step along +y, rows along +z). Rotations are applied as
//! R_z(bearing) · R_y(downtilt) · R_x(slant).

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use num_complex::Complex;

/// 3-component vector in meters (or dimensionless for unit vectors).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3<F> {
    pub x: F,
    pub y: F,
    pub z: F,
}

impl<F: Scalar> Vec3<F> {
    pub fn new(x: F, y: F, z: F) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(F::zero(), F::zero(), F::zero())
    }

    pub fn dot(self, other: Self) -> F {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Self) -> Self {
        Self::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm_sq(self) -> F {
        self.dot(self)
    }

    pub fn norm(self) -> F {
        self.norm_sq().sqrt()
    }

    pub fn scale(self, k: F) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }

    pub fn normalized(self) -> Result<Self> {
        let n = self.norm();
        if n <= F::zero() {
            return Err(Error::DegenerateDirection);
        }
        Ok(self.scale(F::one() / n))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl<F: Scalar> std::ops::Add for Vec3<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl<F: Scalar> std::ops::Sub for Vec3<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl<F: Scalar> std::ops::Neg for Vec3<F> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// 3x3 rotation matrix, row-major.
#[derive(Debug, Clone, Copy)]
pub struct Rot3<F> {
    m: [[F; 3]; 3],
}

impl<F: Scalar> Rot3<F> {
    pub fn identity() -> Self {
        let o = F::one();
        let z = F::zero();
        Self {
            m: [[o, z, z], [z, o, z], [z, z, o]],
        }
    }

    /// R_z(bearing) · R_y(downtilt) · R_x(slant), angles in radians.
    ///
    /// Downtilt is positive when the boresight rotates downward (toward -z),
    /// matching the usual antenna convention for a +x boresight.
    pub fn from_bearing_downtilt_slant(bearing: F, downtilt: F, slant: F) -> Self {
        let (sa, ca) = bearing.sin_cos();
        let (sb, cb) = downtilt.sin_cos();
        let (sg, cg) = slant.sin_cos();
        // Rows of Rz(a)·Ry(b)·Rx(g).
        Self {
            m: [
                [ca * cb, ca * sb * sg - sa * cg, ca * sb * cg + sa * sg],
                [sa * cb, sa * sb * sg + ca * cg, sa * sb * cg - ca * sg],
                [-sb, cb * sg, cb * cg],
            ],
        }
    }

    pub fn apply(&self, v: Vec3<F>) -> Vec3<F> {
        Vec3::new(
            self.m[0][0] * v.x + self.m[0][1] * v.y + self.m[0][2] * v.z,
            self.m[1][0] * v.x + self.m[1][1] * v.y + self.m[1][2] * v.z,
            self.m[2][0] * v.x + self.m[2][1] * v.y + self.m[2][2] * v.z,
        )
    }

    /// Apply the inverse rotation (transpose), i.e. global frame -> local.
    pub fn apply_inverse(&self, v: Vec3<F>) -> Vec3<F> {
        Vec3::new(
            self.m[0][0] * v.x + self.m[1][0] * v.y + self.m[2][0] * v.z,
            self.m[0][1] * v.x + self.m[1][1] * v.y + self.m[2][1] * v.z,
            self.m[0][2] * v.x + self.m[1][2] * v.y + self.m[2][2] * v.z,
        )
    }
}

/// Uniform planar (or linear) array of antenna elements.
///
/// Each grid position carries `polarizations` co-located elements. For
/// dual-polarized arrays the two elements use slants +45 and -45 degrees and
/// share per-position near-field and SNS parameters.
#[derive(Debug, Clone)]
pub struct ArrayGeometry<F> {
    pub rows: usize,
    pub cols: usize,
    /// Horizontal element spacing, meters (along local +y).
    pub spacing_h: F,
    /// Vertical element spacing, meters (along local +z).
    pub spacing_v: F,
    /// 1 or 2 co-located polarizations per grid position.
    pub polarizations: usize,
    /// Slant angle of the single polarization, radians. Ignored for
    /// dual-polarized arrays, which use +/-45 degrees.
    pub single_pol_slant: F,
    pub reference_point: Vec3<F>,
    pub bearing: F,
    pub downtilt: F,
    pub slant: F,
}

impl<F: Scalar> ArrayGeometry<F> {
    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::InvalidConfig("array needs rows, cols >= 1".into()));
        }
        if !(self.polarizations == 1 || self.polarizations == 2) {
            return Err(Error::InvalidConfig("polarizations must be 1 or 2".into()));
        }
        if self.spacing_h < F::zero() || self.spacing_v < F::zero() {
            return Err(Error::InvalidConfig("element spacing must be >= 0".into()));
        }
        Ok(())
    }

    /// Physical aperture width W = (cols - 1) · spacing_h, meters.
    pub fn width(&self) -> F {
        F::from_usize(self.cols - 1).unwrap() * self.spacing_h
    }

    /// Physical aperture height H = (rows - 1) · spacing_v, meters.
    pub fn height(&self) -> F {
        F::from_usize(self.rows - 1).unwrap() * self.spacing_v
    }

    /// Number of grid positions (excluding polarization duplication).
    pub fn num_positions(&self) -> usize {
        self.rows * self.cols
    }

    /// Total element count including polarizations.
    pub fn num_elements(&self) -> usize {
        self.num_positions() * self.polarizations
    }

    pub fn rotation(&self) -> Rot3<F> {
        Rot3::from_bearing_downtilt_slant(self.bearing, self.downtilt, self.slant)
    }

    /// Grid position index for element `e`; elements are position-major.
    pub fn position_of_element(&self, e: usize) -> usize {
        e / self.polarizations
    }

    /// Polarization slant angle of element `e`, radians.
    pub fn slant_of_element(&self, e: usize) -> F {
        if self.polarizations == 1 {
            self.single_pol_slant
        } else if e % 2 == 0 {
            F::FRAC_PI_4()
        } else {
            -F::FRAC_PI_4()
        }
    }

    /// In-plane (horizontal, vertical) coordinates of every grid position in
    /// meters; horizontal in [0, W], vertical in [0, H]. Row-major order.
    /// These are the (x_s, y_s) coordinates used by the BS-side SNS models.
    pub fn plane_coords(&self) -> Vec<(F, F)> {
        let mut out = Vec::with_capacity(self.num_positions());
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.push((
                    F::from_usize(c).unwrap() * self.spacing_h,
                    F::from_usize(r).unwrap() * self.spacing_v,
                ));
            }
        }
        out
    }
}

/// Grid-position location vectors relative to the reference point, rotated to
/// the global frame. Row-major; position (0,0) sits at the reference point.
pub fn element_positions<F: Scalar>(geom: &ArrayGeometry<F>) -> Vec<Vec3<F>> {
    let rot = geom.rotation();
    let mut out = Vec::with_capacity(geom.num_positions());
    for r in 0..geom.rows {
        for c in 0..geom.cols {
            let local = Vec3::new(
                F::zero(),
                F::from_usize(c).unwrap() * geom.spacing_h,
                F::from_usize(r).unwrap() * geom.spacing_v,
            );
            out.push(rot.apply(local));
        }
    }
    out
}

/// Spherical unit vector (sin θ cos φ, sin θ sin φ, cos θ).
pub fn spherical_unit_vector<F: Scalar>(zenith: F, azimuth: F) -> Vec3<F> {
    let (st, ct) = zenith.sin_cos();
    let (sp, cp) = azimuth.sin_cos();
    Vec3::new(st * cp, st * sp, ct)
}

/// Zenith and azimuth of a (not necessarily unit) vector.
///
/// Azimuth is wrapped to (-pi, pi]; at the poles it is defined as 0.
/// Errors on the zero vector.
pub fn angles_from_vector<F: Scalar>(v: Vec3<F>) -> Result<(F, F)> {
    let n = v.norm();
    if !(n > F::zero()) || !v.is_finite() {
        return Err(Error::DegenerateDirection);
    }
    let zenith = (v.z / n).clamp(-F::one(), F::one()).acos();
    let azimuth = if v.x == F::zero() && v.y == F::zero() {
        F::zero()
    } else {
        let a = v.y.atan2(v.x);
        // atan2 returns [-pi, pi]; fold the closed lower end onto +pi.
        if a <= -F::PI() {
            F::PI()
        } else {
            a
        }
    };
    Ok((zenith, azimuth))
}

/// Wrap an angle to (-pi, pi].
pub fn wrap_angle<F: Scalar>(a: F) -> F {
    let two_pi = F::lit(2.0) * F::PI();
    let mut x = a % two_pi;
    if x > F::PI() {
        x -= two_pi;
    } else if x <= -F::PI() {
        x += two_pi;
    }
    x
}

/// Fraunhofer far-field boundary 2·D²/λ, meters.
pub fn fraunhofer_distance<F: Scalar>(aperture: F, wavelength: F) -> F {
    F::lit(2.0) * aperture * aperture / wavelength
}

/// Antenna element field pattern.
#[derive(Debug, Clone)]
pub enum FieldPattern<F> {
    /// Unit gain in every direction.
    Isotropic,
    /// 3GPP-style directional element envelope. All parameters configured,
    /// gains in dB, beamwidths in degrees.
    Directional {
        max_gain_dbi: F,
        theta_3db_deg: F,
        phi_3db_deg: F,
        sla_v_db: F,
        a_max_db: F,
    },
}

impl<F: Scalar> FieldPattern<F> {
    /// Field components (F_theta, F_phi) for a ray at (zenith, azimuth) in
    /// the pattern's local frame, with the element polarization slant.
    pub fn evaluate(&self, zenith: F, azimuth: F, pol_slant: F) -> (Complex<F>, Complex<F>) {
        let amp = match self {
            FieldPattern::Isotropic => F::one(),
            FieldPattern::Directional {
                max_gain_dbi,
                theta_3db_deg,
                phi_3db_deg,
                sla_v_db,
                a_max_db,
            } => {
                let deg = F::lit(180.0) / F::PI();
                let theta_deg = zenith * deg;
                let phi_deg = wrap_angle(azimuth) * deg;
                let twelve = F::lit(12.0);
                let ninety = F::lit(90.0);
                let av = -(twelve * ((theta_deg - ninety) / *theta_3db_deg).powi(2)).min(*sla_v_db);
                let ah = -(twelve * (phi_deg / *phi_3db_deg).powi(2)).min(*a_max_db);
                let a = -(-(av + ah)).min(*a_max_db);
                ((*max_gain_dbi + a) / F::lit(20.0)).exp10()
            }
        };
        let (s, c) = pol_slant.sin_cos();
        (
            Complex::new(amp * c, F::zero()),
            Complex::new(amp * s, F::zero()),
        )
    }

    /// Power gain |F_theta|^2 + |F_phi|^2 in a direction; slant-independent.
    pub fn power_gain(&self, zenith: F, azimuth: F) -> F {
        let (ft, fp) = self.evaluate(zenith, azimuth, F::zero());
        ft.norm_sqr() + fp.norm_sqr()
    }
}

trait Exp10 {
    fn exp10(self) -> Self;
}

impl<F: Scalar> Exp10 for F {
    fn exp10(self) -> Self {
        F::lit(10.0).powf(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn geom(rows: usize, cols: usize, sh: f64, sv: f64) -> ArrayGeometry<f64> {
        ArrayGeometry {
            rows,
            cols,
            spacing_h: sh,
            spacing_v: sv,
            polarizations: 1,
            single_pol_slant: 0.0,
            reference_point: Vec3::zero(),
            bearing: 0.0,
            downtilt: 0.0,
            slant: 0.0,
        }
    }

    #[test]
    fn single_element_at_reference() {
        let p = element_positions(&geom(1, 1, 0.5, 0.5));
        assert_eq!(p.len(), 1);
        assert_eq!((p[0].x, p[0].y, p[0].z), (0.0, 0.0, 0.0));
    }

    #[test]
    fn one_by_two_offsets_along_y() {
        let lam = 0.0428;
        let p = element_positions(&geom(1, 2, 0.5 * lam, 0.5 * lam));
        assert_eq!(p.len(), 2);
        assert!((p[0].y - 0.0).abs() < 1e-15);
        assert!((p[1].y - 0.5 * lam).abs() < 1e-15);
        assert!(p[1].x.abs() < 1e-15 && p[1].z.abs() < 1e-15);
    }

    #[test]
    fn two_by_two_distance_matrix_matches_brute_force() {
        // Brute-force oracle: coordinates written out by hand for a 2x2 grid
        // with spacings (0.3, 0.2).
        let p = element_positions(&geom(2, 2, 0.3, 0.2));
        let expect = [
            (0.0, 0.0, 0.0),
            (0.0, 0.3, 0.0),
            (0.0, 0.0, 0.2),
            (0.0, 0.3, 0.2),
        ];
        for (a, e) in p.iter().zip(expect.iter()) {
            assert!((a.x - e.0).abs() < 1e-15);
            assert!((a.y - e.1).abs() < 1e-15);
            assert!((a.z - e.2).abs() < 1e-15);
        }
        for i in 0..4 {
            for j in 0..4 {
                let d_impl = (p[i] - p[j]).norm();
                let dx = expect[i].0 - expect[j].0;
                let dy = expect[i].1 - expect[j].1;
                let dz = expect[i].2 - expect[j].2;
                let d_oracle = (dx * dx + dy * dy + dz * dz).sqrt();
                assert!((d_impl - d_oracle).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rotation_is_isometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let flat = element_positions(&geom(3, 4, 0.25, 0.15));
        for _ in 0..50 {
            let mut g = geom(3, 4, 0.25, 0.15);
            g.bearing = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            g.downtilt = rng.gen_range(-1.0..1.0);
            g.slant = rng.gen_range(-1.0..1.0);
            let rotated = element_positions(&g);
            for i in 0..flat.len() {
                for j in 0..flat.len() {
                    let d0 = (flat[i] - flat[j]).norm();
                    let d1 = (rotated[i] - rotated[j]).norm();
                    assert!((d0 - d1).abs() < 1e-10, "isometry violated: {d0} vs {d1}");
                }
            }
        }
    }

    #[test]
    fn spherical_unit_vector_basics() {
        let v = spherical_unit_vector(std::f64::consts::FRAC_PI_2, 0.0);
        assert!((v.x - 1.0).abs() < 1e-15 && v.y.abs() < 1e-15 && v.z.abs() < 1e-12);
        let v = spherical_unit_vector(0.0_f64, 1.2345);
        assert!(v.x.abs() < 1e-15 && v.y.abs() < 1e-15 && (v.z - 1.0).abs() < 1e-15);
        // Direct trigonometric evaluation at (pi/3, pi/4).
        let v = spherical_unit_vector(std::f64::consts::FRAC_PI_3, std::f64::consts::FRAC_PI_4);
        assert!((v.x - 0.612372435695795).abs() < 1e-14);
        assert!((v.y - 0.612372435695794).abs() < 1e-14);
        assert!((v.z - 0.5).abs() < 1e-14);
    }

    #[test]
    fn unit_norm_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let th = rng.gen_range(0.0..std::f64::consts::PI);
            let ph = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            let n = spherical_unit_vector(th, ph).norm();
            assert!((n - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn angles_from_vector_basics() {
        let (th, ph) = angles_from_vector(Vec3::new(1.0, 0.0, 0.0)).unwrap();
        assert!((th - std::f64::consts::FRAC_PI_2).abs() < 1e-15 && ph.abs() < 1e-15);
        // Pole convention: azimuth defined as 0.
        let (th, ph) = angles_from_vector(Vec3::new(0.0_f64, 0.0, 5.0)).unwrap();
        assert!(th.abs() < 1e-15 && ph == 0.0);
        assert!(angles_from_vector(Vec3::<f64>::zero()).is_err());
    }

    #[test]
    fn angle_round_trip_away_from_poles() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut n = 0;
        while n < 100 {
            let th = rng.gen_range(0.0..std::f64::consts::PI);
            if th < 1e-6 || (std::f64::consts::PI - th) < 1e-6 {
                continue;
            }
            let ph = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            let (th2, ph2) = angles_from_vector(spherical_unit_vector(th, ph)).unwrap();
            assert!((th - th2).abs() < 1e-9, "zenith {th} vs {th2}");
            assert!(wrap_angle(ph - ph2).abs() < 1e-9, "azimuth {ph} vs {ph2}");
            n += 1;
        }
    }

    #[test]
    fn isotropic_pattern_slants() {
        let p = FieldPattern::<f64>::Isotropic;
        let (ft, fp) = p.evaluate(1.0, 0.3, 0.0);
        assert!((ft.re - 1.0).abs() < 1e-15 && fp.re.abs() < 1e-15);
        let (ft, fp) = p.evaluate(1.0, 0.3, std::f64::consts::FRAC_PI_2);
        assert!(ft.re.abs() < 1e-15 && (fp.re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn directional_pattern_boresight_peak() {
        let p: FieldPattern<f64> = FieldPattern::Directional {
            max_gain_dbi: 8.0,
            theta_3db_deg: 65.0,
            phi_3db_deg: 65.0,
            sla_v_db: 30.0,
            a_max_db: 30.0,
        };
        // Envelope evaluated at zero offsets: amplitude 10^(8/20).
        let peak = 10f64.powf(8.0 / 20.0);
        let (ft, _) = p.evaluate(std::f64::consts::FRAC_PI_2, 0.0, 0.0);
        assert!((ft.re - peak).abs() < 1e-12);
        // Off boresight the gain can only drop.
        assert!(p.power_gain(std::f64::consts::FRAC_PI_2, 1.0) < peak * peak);
        // Floor: attenuation is capped at A_max below peak.
        let floor = 10f64.powf((8.0 - 30.0) / 10.0);
        assert!(p.power_gain(std::f64::consts::PI, std::f64::consts::PI) >= floor - 1e-12);
    }

    #[test]
    fn fraunhofer_values() {
        assert!((fraunhofer_distance(1.0_f64, 0.0428) - 46.7289719626).abs() < 1e-9);
        let lam = 0.03_f64;
        assert!((fraunhofer_distance(lam, lam) - 2.0 * lam).abs() < 1e-15);
        assert!(
            (fraunhofer_distance(2.0_f64, 0.0428) - 4.0 * fraunhofer_distance(1.0, 0.0428)).abs()
                < 1e-9
        );
    }

    #[test]
    fn rotation_inverse_round_trip() {
        let r = Rot3::from_bearing_downtilt_slant(0.4_f64, -0.2, 0.9);
        let v = Vec3::new(1.0, -2.0, 0.5);
        let back = r.apply_inverse(r.apply(v));
        assert!((back - v).norm() < 1e-14);
    }
}
