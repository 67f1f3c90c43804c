//! Deterministic SVG/CSV artifacts. SVG flips the imaginary axis so that
//! the picture has the usual orientation.

use std::f64::consts::TAU;
use std::fmt::Write;
use std::path::Path;

use anyhow::{bail, Result};
use teichkit::operators::pre_schwarzian;
use teichkit::{CircleMap, DiskMap, EvaluationGrid, RunConfig, WeldingPair, C64};

use crate::commands::{emit, read_json};
use crate::{PlotKind, Status};

pub fn plot(object: &Path, kind: PlotKind, gamma: Option<&Path>, samples: usize, cfg: &RunConfig) -> Result<Status> {
    if samples < 8 {
        bail!("need at least 8 samples");
    }
    let out = match kind {
        PlotKind::Boundary => {
            let f: DiskMap = read_json(object)?;
            svg(&[(f.boundary_polyline(samples), "#1f5fa8")])
        }
        PlotKind::Polyline => {
            let f: DiskMap = read_json(object)?;
            let mut s = String::from("theta,re,im\n");
            for j in 0..samples {
                let t = TAU * j as f64 / samples as f64;
                let w = f.boundary_point(t);
                writeln!(s, "{t:.12},{:.12},{:.12}", w.re, w.im)?;
            }
            s
        }
        PlotKind::Heat => {
            let f: DiskMap = read_json(object)?;
            let a = pre_schwarzian(&f)?;
            let grid = EvaluationGrid::initial(&cfg.policy());
            let mut s = String::from("r,theta,x,y,weighted_modulus\n");
            for n in grid.nodes() {
                let v = (1.0 - n.r * n.r) * a.eval(n.z).norm();
                writeln!(s, "{:.12},{:.12},{:.12},{:.12},{:.12e}", n.r, n.theta, n.z.re, n.z.im, v)?;
            }
            s
        }
        PlotKind::Welding => {
            let p: WeldingPair = read_json(object)?;
            let g: Vec<C64> = (0..samples)
                .map(|j| p.g.eval(C64::from_polar(1.0, TAU * j as f64 / samples as f64)))
                .collect();
            svg(&[(p.f.boundary_polyline(samples), "#1f5fa8"), (g, "#c0392b")])
        }
        PlotKind::Seam => {
            let p: WeldingPair = read_json(object)?;
            let Some(gamma) = gamma else {
                bail!("--kind seam needs --gamma");
            };
            let gamma: CircleMap = read_json(gamma)?;
            let mut s = String::from("theta,f_re,f_im,g_re,g_im,residual\n");
            for j in 0..samples {
                let t = TAU * j as f64 / samples as f64;
                let f = p.f.boundary_point(t);
                let g = p.g.eval(C64::from_polar(1.0, gamma.angle(t)));
                writeln!(
                    s,
                    "{t:.12},{:.12},{:.12},{:.12},{:.12},{:.6e}",
                    f.re,
                    f.im,
                    g.re,
                    g.im,
                    (g - f).norm()
                )?;
            }
            s
        }
    };
    emit(&out, cfg)?;
    Ok(Status::Pass)
}

/// Closed paths, one per curve, in a viewBox fitted to all of them.
fn svg(curves: &[(Vec<C64>, &str)]) -> String {
    let pts = curves.iter().flat_map(|c| c.0.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        x0 = x0.min(p.re);
        x1 = x1.max(p.re);
        y0 = y0.min(-p.im);
        y1 = y1.max(-p.im);
    }
    let size = (x1 - x0).max(y1 - y0).max(1e-9);
    let pad = 0.05 * size;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.6} {:.6} {:.6} {:.6}\">\n",
        x0 - pad,
        y0 - pad,
        x1 - x0 + 2.0 * pad,
        y1 - y0 + 2.0 * pad
    );
    for (curve, color) in curves {
        let mut d = String::new();
        for (j, p) in curve.iter().enumerate() {
            let _ = write!(d, "{}{:.6} {:.6} ", if j == 0 { "M" } else { "L" }, p.re, -p.im);
        }
        d.push('Z');
        let _ = writeln!(
            s,
            "  <path d=\"{d}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{:.6}\"/>",
            0.004 * size
        );
    }
    s.push_str("</svg>\n");
    s
}
