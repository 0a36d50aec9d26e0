//! Planar ray geometry for finger-object contact resolution.
//!
//! Fingers press along rays; objects are convex cross-sections (circles and
//! rotated rectangles). Each intersection routine returns the nearest
//! boundary crossing from outside together with the outward surface normal
//! there, which is all the contact model needs.

/// A 2-D point or vector.
pub type Vec2 = [f64; 2];

pub fn rotate(v: Vec2, angle_rad: f64) -> Vec2 {
    let (s, c) = angle_rad.sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

pub fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn cross(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn add(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn scale(v: Vec2, k: f64) -> Vec2 {
    [k * v[0], k * v[1]]
}

pub fn unit(angle_rad: f64) -> Vec2 {
    let (s, c) = angle_rad.sin_cos();
    [c, s]
}

/// A boundary crossing: distance along the ray, hit point, and the outward
/// unit normal of the surface at that point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub t: f64,
    pub point: Vec2,
    pub outward_normal: Vec2,
}

/// Nearest intersection of the ray `origin + t * dir` (t > 0) with a circle,
/// for an origin outside the circle. Tangential grazes do not count as hits.
pub fn ray_circle(origin: Vec2, dir: Vec2, center: Vec2, radius: f64) -> Option<Hit> {
    let oc = sub(origin, center);
    // |oc + t*dir|^2 = r^2, with |dir| = 1.
    let b = dot(oc, dir);
    let c = dot(oc, oc) - radius * radius;
    if c <= 0.0 {
        return None; // origin inside or on the circle: not a valid press
    }
    let disc = b * b - c;
    if disc <= 0.0 {
        return None; // miss, or graze exactly on the tangent line
    }
    let t = -b - disc.sqrt();
    if t <= 0.0 {
        return None; // circle behind the origin
    }
    let point = add(origin, scale(dir, t));
    let outward_normal = scale(sub(point, center), 1.0 / radius);
    Some(Hit {
        t,
        point,
        outward_normal,
    })
}

/// Nearest intersection with an axis-aligned box of half-extents
/// `(half_w, half_h)` centered at the local origin, by the slab method.
/// Origin must be outside the box.
fn ray_box_local(origin: Vec2, dir: Vec2, half_w: f64, half_h: f64) -> Option<Hit> {
    if origin[0].abs() <= half_w && origin[1].abs() <= half_h {
        return None; // origin inside: not a valid press
    }
    let mut t_enter = f64::NEG_INFINITY;
    let mut t_exit = f64::INFINITY;
    // Outward normal of the slab face crossed at t_enter.
    let mut enter_normal = [0.0, 0.0];

    for axis in 0..2 {
        let half = if axis == 0 { half_w } else { half_h };
        let o = origin[axis];
        let d = dir[axis];
        if d == 0.0 {
            if o.abs() > half {
                return None; // parallel to the slab and outside it
            }
            continue;
        }
        let mut t1 = (-half - o) / d;
        let mut t2 = (half - o) / d;
        // The entering face is the one on the side the ray comes from.
        let mut normal = [0.0, 0.0];
        normal[axis] = if d > 0.0 { -1.0 } else { 1.0 };
        if t1 > t2 {
            std::mem::swap(&mut t1, &mut t2);
        }
        if t1 > t_enter {
            t_enter = t1;
            enter_normal = normal;
        }
        t_exit = t_exit.min(t2);
    }

    if t_enter > t_exit || t_enter <= 0.0 {
        return None;
    }
    let point = add(origin, scale(dir, t_enter));
    Some(Hit {
        t: t_enter,
        point,
        outward_normal: enter_normal,
    })
}

/// Nearest intersection with a rectangle of half-extents `(half_w, half_h)`
/// centered at `center` and rotated by `rot_rad`. Returns the hit in world
/// coordinates.
pub fn ray_rect(
    origin: Vec2,
    dir: Vec2,
    center: Vec2,
    rot_rad: f64,
    half_w: f64,
    half_h: f64,
) -> Option<Hit> {
    // Solve in the rectangle's local frame, then map back.
    let local_origin = rotate(sub(origin, center), -rot_rad);
    let local_dir = rotate(dir, -rot_rad);
    let hit = ray_box_local(local_origin, local_dir, half_w, half_h)?;
    Some(Hit {
        t: hit.t,
        point: add(rotate(hit.point, rot_rad), center),
        outward_normal: rotate(hit.outward_normal, rot_rad),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9
    }

    #[test]
    fn head_on_circle_hit() {
        let hit = ray_circle([0.0, 80.0], [0.0, -1.0], [0.0, 0.0], 30.0).unwrap();
        assert!((hit.t - 50.0).abs() < TOL);
        assert!(close(hit.point[0], 0.0) && close(hit.point[1], 30.0));
        assert!(close(hit.outward_normal[0], 0.0) && close(hit.outward_normal[1], 1.0));
    }

    #[test]
    fn oblique_circle_hit_has_unit_normal() {
        let dir = unit(200.0_f64.to_radians());
        let hit = ray_circle([60.0, 25.0], dir, [0.0, 0.0], 30.0).unwrap();
        let r = (hit.point[0] * hit.point[0] + hit.point[1] * hit.point[1]).sqrt();
        assert!(close(r, 30.0));
        let n = hit.outward_normal;
        assert!(close(n[0] * n[0] + n[1] * n[1], 1.0));
        // The ray must be entering, not leaving.
        assert!(dot(dir, n) < 0.0);
    }

    #[test]
    fn circle_misses_and_rejections() {
        // Pointing away.
        assert!(ray_circle([0.0, 80.0], [0.0, 1.0], [0.0, 0.0], 30.0).is_none());
        // Offset line that never reaches the circle.
        assert!(ray_circle([50.0, 50.0], [0.0, -1.0], [0.0, 0.0], 30.0).is_none());
        // Origin inside.
        assert!(ray_circle([1.0, 1.0], [1.0, 0.0], [0.0, 0.0], 30.0).is_none());
        // Exact graze along the tangent line does not count.
        assert!(ray_circle([-100.0, 30.0], [1.0, 0.0], [0.0, 0.0], 30.0).is_none());
    }

    #[test]
    fn box_faces_report_their_normals() {
        // From the left.
        let hit = ray_rect([-100.0, 3.0], [1.0, 0.0], [0.0, 0.0], 0.0, 20.0, 10.0).unwrap();
        assert!((hit.t - 80.0).abs() < TOL);
        assert_eq!(hit.outward_normal, [-1.0, 0.0]);
        // From above.
        let hit = ray_rect([5.0, 90.0], [0.0, -1.0], [0.0, 0.0], 0.0, 20.0, 10.0).unwrap();
        assert!((hit.t - 80.0).abs() < TOL);
        assert_eq!(hit.outward_normal, [0.0, 1.0]);
        // Oblique ray entering through the bottom.
        let dir = unit(30.0_f64.to_radians());
        let hit = ray_rect([-40.0, -40.0], dir, [0.0, 0.0], 0.0, 30.0, 10.0).unwrap();
        assert!(close(hit.point[1], -10.0));
        assert_eq!(hit.outward_normal, [0.0, -1.0]);
    }

    #[test]
    fn box_misses_and_rejections() {
        // Parallel to a slab, outside it.
        assert!(ray_rect([-100.0, 50.0], [1.0, 0.0], [0.0, 0.0], 0.0, 20.0, 10.0).is_none());
        // Box entirely behind the ray.
        assert!(ray_rect([100.0, 0.0], [1.0, 0.0], [0.0, 0.0], 0.0, 20.0, 10.0).is_none());
        // Origin inside.
        assert!(ray_rect([0.0, 0.0], [1.0, 0.0], [0.0, 0.0], 0.0, 20.0, 10.0).is_none());
    }

    #[test]
    fn rotated_rect_matches_rotating_the_ray_instead() {
        // Intersecting a rect rotated by phi equals intersecting the
        // unrotated rect with the inversely rotated ray.
        let phi = 0.31_f64;
        let origin = [-70.0, -35.0];
        let dir = unit(0.4);
        let direct = ray_rect(origin, dir, [3.0, -2.0], phi, 25.0, 40.0).unwrap();
        let local_o = rotate(sub(origin, [3.0, -2.0]), -phi);
        let local_d = rotate(dir, -phi);
        let undone = ray_rect(local_o, local_d, [0.0, 0.0], 0.0, 25.0, 40.0).unwrap();
        assert!(close(direct.t, undone.t));
        let back = rotate(undone.outward_normal, phi);
        assert!(close(direct.outward_normal[0], back[0]));
        assert!(close(direct.outward_normal[1], back[1]));
    }

    #[test]
    fn vertical_ray_onto_rotated_rect_top_face() {
        // A rect rotated 6 degrees still catches a descending center ray on
        // its top face, with the normal rotated accordingly.
        let phi = 6.0_f64.to_radians();
        let hit = ray_rect([0.0, 80.0], [0.0, -1.0], [0.0, 0.0], phi, 30.0, 55.0).unwrap();
        let expect = rotate([0.0, 1.0], phi);
        assert!(close(hit.outward_normal[0], expect[0]));
        assert!(close(hit.outward_normal[1], expect[1]));
        assert!(hit.point[1] > 50.0);
    }
}
