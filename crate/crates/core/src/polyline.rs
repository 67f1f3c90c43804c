//! Closed polylines in the plane: crossings, winding numbers, distances.

use crate::poly::C64;

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Crossing of closed segments `p0p1` and `q0q1`, as parameters `(s, t)`
/// along each. Collinear overlaps report the first shared endpoint found.
pub fn segment_intersection(p0: C64, p1: C64, q0: C64, q1: C64) -> Option<(f64, f64)> {
    let r = p1 - p0;
    let s = q1 - q0;
    let denom = cross(r, s);
    let qp = q0 - p0;
    if denom == 0.0 {
        if cross(qp, r) != 0.0 {
            return None;
        }
        // Collinear: project onto r.
        let rr = r.norm_sqr();
        if rr == 0.0 {
            return if (q0 - p0).norm() == 0.0 { Some((0.0, 0.0)) } else { None };
        }
        let t0 = (qp.re * r.re + qp.im * r.im) / rr;
        let t1 = ((q1 - p0).re * r.re + (q1 - p0).im * r.im) / rr;
        let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        if hi < 0.0 || lo > 1.0 {
            return None;
        }
        let s_par = lo.max(0.0);
        let point = p0 + r * s_par;
        let ss = s.norm_sqr();
        let t_par = if ss == 0.0 {
            0.0
        } else {
            let d = point - q0;
            (d.re * s.re + d.im * s.im) / ss
        };
        return Some((s_par, t_par.clamp(0.0, 1.0)));
    }
    let t = cross(qp, s) / denom;
    let u = cross(qp, r) / denom;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Some((t, u))
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    /// Segment index and parameter on the first polyline.
    pub first: (usize, f64),
    /// Segment index and parameter on the second polyline.
    pub second: (usize, f64),
    pub point: C64,
}

fn bbox_disjoint(a0: C64, a1: C64, b0: C64, b1: C64) -> bool {
    a0.re.max(a1.re) < b0.re.min(b1.re)
        || b0.re.max(b1.re) < a0.re.min(a1.re)
        || a0.im.max(a1.im) < b0.im.min(b1.im)
        || b0.im.max(b1.im) < a0.im.min(a1.im)
}

/// First crossing between non-adjacent edges of a closed polyline.
pub fn self_intersection(pts: &[C64]) -> Option<Crossing> {
    let n = pts.len();
    if n < 4 {
        return None;
    }
    for i in 0..n {
        let (a0, a1) = (pts[i], pts[(i + 1) % n]);
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (b0, b1) = (pts[j], pts[(j + 1) % n]);
            if bbox_disjoint(a0, a1, b0, b1) {
                continue;
            }
            if let Some((s, t)) = segment_intersection(a0, a1, b0, b1) {
                return Some(Crossing {
                    first: (i, s),
                    second: (j, t),
                    point: a0 + (a1 - a0) * s,
                });
            }
        }
    }
    None
}

/// First crossing between edges of two closed polylines.
pub fn curves_intersection(a: &[C64], b: &[C64]) -> Option<Crossing> {
    let (n, m) = (a.len(), b.len());
    for i in 0..n {
        let (a0, a1) = (a[i], a[(i + 1) % n]);
        for j in 0..m {
            let (b0, b1) = (b[j], b[(j + 1) % m]);
            if bbox_disjoint(a0, a1, b0, b1) {
                continue;
            }
            if let Some((s, t)) = segment_intersection(a0, a1, b0, b1) {
                return Some(Crossing {
                    first: (i, s),
                    second: (j, t),
                    point: a0 + (a1 - a0) * s,
                });
            }
        }
    }
    None
}

/// Winding number of a closed polyline about `p` (crossing-rule version).
pub fn winding_number(pts: &[C64], p: C64) -> i32 {
    let n = pts.len();
    let mut wn = 0;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        let side = cross(b - a, p - a);
        if a.im <= p.im {
            if b.im > p.im && side > 0.0 {
                wn += 1;
            }
        } else if b.im <= p.im && side < 0.0 {
            wn -= 1;
        }
    }
    wn
}

/// Winding number of sampled values about the origin, from accumulated
/// argument increments. `None` if consecutive samples turn by more than
/// `max_turn` radians (undersampled) or hit zero.
pub fn argument_winding(values: &[C64], max_turn: f64) -> Option<i32> {
    let n = values.len();
    let mut total = 0.0;
    for i in 0..n {
        let a = values[i];
        let b = values[(i + 1) % n];
        if a.norm() == 0.0 || b.norm() == 0.0 {
            return None;
        }
        let d = (b / a).arg();
        if d.abs() > max_turn {
            return None;
        }
        total += d;
    }
    Some((total / std::f64::consts::TAU).round() as i32)
}

pub fn point_segment_distance(p: C64, a: C64, b: C64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let ap = p - a;
    let t = ((ap.re * ab.re + ap.im * ab.im) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

fn segment_distance(a0: C64, a1: C64, b0: C64, b1: C64) -> f64 {
    if segment_intersection(a0, a1, b0, b1).is_some() {
        return 0.0;
    }
    point_segment_distance(a0, b0, b1)
        .min(point_segment_distance(a1, b0, b1))
        .min(point_segment_distance(b0, a0, a1))
        .min(point_segment_distance(b1, a0, a1))
}

/// Smallest distance between two closed polylines.
pub fn polyline_distance(a: &[C64], b: &[C64]) -> f64 {
    let (n, m) = (a.len(), b.len());
    let mut best = f64::INFINITY;
    for i in 0..n {
        let (a0, a1) = (a[i], a[(i + 1) % n]);
        for j in 0..m {
            let (b0, b1) = (b[j], b[(j + 1) % m]);
            // Cheap rejection using the current best.
            let gap_re = (a0.re.min(a1.re) - b0.re.max(b1.re)).max(b0.re.min(b1.re) - a0.re.max(a1.re));
            let gap_im = (a0.im.min(a1.im) - b0.im.max(b1.im)).max(b0.im.min(b1.im) - a0.im.max(a1.im));
            if gap_re.max(gap_im) > best {
                continue;
            }
            best = best.min(segment_distance(a0, a1, b0, b1));
        }
    }
    best
}
