//! Physical blocker-based BS-side SNS: rectangular screens, rotated per ray
//! and per element so the departure direction is perpendicular to the
//! screen, with knife-edge diffraction losses combined over the four edges.
//!
//! A ray whose element-receiver segment does not intersect any screen takes
//! zero loss, so an empty or irrelevant scene reproduces the unblocked
//! channel bit-exactly.

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::scalar::Scalar;
use rand::Rng;
use serde::Deserialize;

/// Blocker archetypes. `BuildingEdge` switches to the single-edge
/// simplification; the other kinds differ only in their configured sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockerKind {
    Billboard,
    StreetLamp,
    BuildingEdge,
    Pillar,
}

/// A rectangular screen blocker.
#[derive(Debug, Clone, Copy)]
pub struct Blocker<F> {
    pub kind: BlockerKind,
    pub center: Vec3<F>,
    pub width: F,
    pub height: F,
    /// Center velocity; the screen translates linearly with time.
    pub velocity: Vec3<F>,
}

impl<F: Scalar> Blocker<F> {
    pub fn validate(&self) -> Result<()> {
        if !(self.width > F::zero() && self.height > F::zero()) {
            return Err(Error::InvalidConfig("blocker sizes must be > 0".into()));
        }
        Ok(())
    }

    pub fn center_at(&self, t: F) -> Vec3<F> {
        self.center + self.velocity.scale(t)
    }
}

/// A screen oriented perpendicular to a ray.
#[derive(Debug, Clone, Copy)]
pub struct OrientedScreen<F> {
    pub center: Vec3<F>,
    /// In-plane horizontal axis (perpendicular to global z and the normal).
    pub h_axis: Vec3<F>,
    /// In-plane vertical axis completing the right-handed frame.
    pub v_axis: Vec3<F>,
    pub normal: Vec3<F>,
    pub half_w: F,
    pub half_h: F,
}

impl<F: Scalar> OrientedScreen<F> {
    /// The four corner points (++, +-, -+, --) in (h, v) signs.
    pub fn corners(&self) -> [Vec3<F>; 4] {
        let hw = self.h_axis.scale(self.half_w);
        let hv = self.v_axis.scale(self.half_h);
        [
            self.center + hw + hv,
            self.center + hw - hv,
            self.center - hw + hv,
            self.center - hw - hv,
        ]
    }

    /// (h, v, n) coordinates of a point relative to the screen center.
    fn local(&self, p: Vec3<F>) -> (F, F, F) {
        let d = p - self.center;
        (d.dot(self.h_axis), d.dot(self.v_axis), d.dot(self.normal))
    }
}

/// Rotate a blocker's screen about its center so the given ray direction is
/// perpendicular to it. Rays parallel to global z fall back to global x as
/// the horizontal axis. Errors on a zero direction.
pub fn rotate_screen<F: Scalar>(
    blocker: &Blocker<F>,
    ray_direction: Vec3<F>,
    t: F,
) -> Result<OrientedScreen<F>> {
    let normal = ray_direction.normalized()?;
    let z = Vec3::new(F::zero(), F::zero(), F::one());
    let cross = z.cross(normal);
    let h_axis = if cross.norm() < F::lit(1e-9) {
        Vec3::new(F::one(), F::zero(), F::zero())
    } else {
        cross.normalized()?
    };
    let v_axis = normal.cross(h_axis);
    Ok(OrientedScreen {
        center: blocker.center_at(t),
        h_axis,
        v_axis,
        normal,
        half_w: blocker.width / F::lit(2.0),
        half_h: blocker.height / F::lit(2.0),
    })
}

/// Single-edge knife-edge diffraction factor
/// F = atan(±(π/2)·sqrt((π/λ)(D1 + D2 − r)))/π,
/// positive sign when the direct path is shadowed by the screen. A slightly
/// negative D1 + D2 − r from rounding clamps to zero.
pub fn edge_factor<F: Scalar>(d1: F, d2: F, r: F, lambda: F, shadowed: bool) -> F {
    let detour = (d1 + d2 - r).max(F::zero());
    let arg = F::FRAC_PI_2() * (F::PI() * detour / lambda).sqrt();
    let signed = if shadowed { arg } else { -arg };
    signed.atan() / F::PI()
}

/// Diffraction factors from the four screen edges.
#[derive(Debug, Clone, Copy)]
pub struct EdgeDiffraction<F> {
    pub f_h1: F,
    pub f_h2: F,
    pub f_w1: F,
    pub f_w2: F,
}

/// Where the element-receiver segment crosses the screen plane, in screen
/// coordinates; `None` when it does not cross between the endpoints.
fn plane_crossing<F: Scalar>(
    screen: &OrientedScreen<F>,
    element: Vec3<F>,
    receiver: Vec3<F>,
) -> Option<(F, F)> {
    let (eh, ev, en) = screen.local(element);
    let (xh, xv, xn) = screen.local(receiver);
    if en * xn >= F::zero() {
        return None;
    }
    let t = en / (en - xn);
    Some((eh + t * (xh - eh), ev + t * (xv - ev)))
}

/// Knife-edge factor for one edge, evaluated in the projection plane
/// spanned by the screen normal and the axis perpendicular to the edge.
/// `edge_coord` is the edge position on that axis (e.g. +half_h for the top
/// edge); `(ea, en)` and `(xa, xn)` are the element/receiver coordinates in
/// that plane.
fn projected_edge_factor<F: Scalar>(
    ea: F,
    en: F,
    xa: F,
    xn: F,
    edge_coord: F,
    lambda: F,
    shadowed: bool,
) -> F {
    let hyp = |da: F, dn: F| (da * da + dn * dn).sqrt();
    let d1 = hyp(ea - edge_coord, en);
    let d2 = hyp(xa - edge_coord, xn);
    let r = hyp(ea - xa, en - xn);
    edge_factor(d1, d2, r, lambda, shadowed)
}

/// Four-edge diffraction factors for a shadowed element-receiver pair.
pub fn edge_diffraction<F: Scalar>(
    screen: &OrientedScreen<F>,
    element: Vec3<F>,
    receiver: Vec3<F>,
    lambda: F,
) -> EdgeDiffraction<F> {
    let (eh, ev, en) = screen.local(element);
    let (xh, xv, xn) = screen.local(receiver);
    EdgeDiffraction {
        f_h1: projected_edge_factor(ev, en, xv, xn, screen.half_h, lambda, true),
        f_h2: projected_edge_factor(ev, en, xv, xn, -screen.half_h, lambda, true),
        f_w1: projected_edge_factor(eh, en, xh, xn, screen.half_w, lambda, true),
        f_w2: projected_edge_factor(eh, en, xh, xn, -screen.half_w, lambda, true),
    }
}

/// Combine the four edge factors into a knife-edge loss in dB. Returns
/// +inf when the combination hits the log singularity (total blockage).
pub fn combine_edge_factors<F: Scalar>(f: &EdgeDiffraction<F>) -> F {
    let arg = F::one() - (f.f_h1 + f.f_h2) * (f.f_w1 + f.f_w2);
    if arg <= F::zero() {
        return F::infinity();
    }
    -F::lit(20.0) * arg.log10()
}

/// Single-edge simplification for very large blockers: the remaining edges'
/// projected distances are treated as infinite (factors 0.5).
pub fn single_edge_loss_db<F: Scalar>(f_edge: F) -> F {
    let arg = F::lit(0.5) - f_edge;
    if arg <= F::zero() {
        return F::infinity();
    }
    -F::lit(20.0) * arg.log10()
}

/// Knife-edge loss of one blocker for one element-receiver pair, dB.
/// Zero when the direct segment does not intersect the oriented screen.
pub fn blocker_loss_db<F: Scalar>(
    element: Vec3<F>,
    receiver: Vec3<F>,
    blocker: &Blocker<F>,
    lambda: F,
    t: F,
) -> Result<F> {
    let dir = receiver - element;
    let screen = rotate_screen(blocker, dir, t)?;
    let Some((h_int, v_int)) = plane_crossing(&screen, element, receiver) else {
        return Ok(F::zero());
    };
    if blocker.kind == BlockerKind::BuildingEdge {
        // Half-plane below the top edge, unbounded in width and depth.
        if v_int > screen.half_h {
            return Ok(F::zero());
        }
        let (ev, en) = {
            let (_, ev, en) = screen.local(element);
            (ev, en)
        };
        let (xv, xn) = {
            let (_, xv, xn) = screen.local(receiver);
            (xv, xn)
        };
        let f = projected_edge_factor(ev, en, xv, xn, screen.half_h, lambda, true);
        return Ok(single_edge_loss_db(f));
    }
    if h_int.abs() > screen.half_w || v_int.abs() > screen.half_h {
        return Ok(F::zero());
    }
    let f = edge_diffraction(&screen, element, receiver, lambda);
    Ok(combine_edge_factors(&f))
}

/// A static-per-drop collection of blockers.
#[derive(Debug, Clone, Default)]
pub struct Scene<F> {
    pub blockers: Vec<Blocker<F>>,
}

impl<F: Scalar> Scene<F> {
    pub fn validate(&self) -> Result<()> {
        self.blockers.iter().try_for_each(Blocker::validate)
    }
}

/// Linear power attenuation of one element-receiver pair across the whole
/// scene; per-blocker dB losses add.
pub fn scene_attenuation<F: Scalar>(
    scene: &Scene<F>,
    element: Vec3<F>,
    receiver: Vec3<F>,
    lambda: F,
    t: F,
) -> Result<F> {
    let mut total_db = F::zero();
    for b in &scene.blockers {
        total_db += blocker_loss_db(element, receiver, b, lambda, t)?;
    }
    Ok((-total_db).db_to_linear())
}

/// Sample sizes for the four blocker kinds; purely illustrative defaults
/// used by the bundled configs.
pub fn default_size<F: Scalar>(kind: BlockerKind) -> (F, F) {
    match kind {
        BlockerKind::Billboard => (F::lit(3.0), F::lit(2.0)),
        BlockerKind::StreetLamp => (F::lit(0.3), F::lit(4.0)),
        BlockerKind::BuildingEdge => (F::lit(30.0), F::lit(20.0)),
        BlockerKind::Pillar => (F::lit(0.6), F::lit(3.0)),
    }
}

/// Uniformly scatter `count` blockers of one kind inside a disc of `radius`
/// around the origin at the given height band. Used by demo configs.
pub fn scatter_blockers<F: Scalar, R: Rng + ?Sized>(
    kind: BlockerKind,
    count: usize,
    radius: F,
    center_height: F,
    rng: &mut R,
) -> Vec<Blocker<F>> {
    let (w, h) = default_size(kind);
    (0..count)
        .map(|_| {
            let r = radius * F::uniform_01(rng).sqrt();
            let phi = F::uniform_01(rng) * F::lit(2.0) * F::PI();
            Blocker {
                kind,
                center: Vec3::new(r * phi.cos(), r * phi.sin(), center_height),
                width: w,
                height: h,
                velocity: Vec3::zero(),
            }
        })
        .collect()
}
