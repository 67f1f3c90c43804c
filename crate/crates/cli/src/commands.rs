use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use teichkit::atlas::{
    check_nonoverlap, chart_with, default_atlas, make_config, transition, transition_holomorphy_check,
    ChartOptions, ChiDirection, HolomorphyReport, LocalChart, NonOverlappingTuple, PuncturedSphereConfig,
    SpherePoint, Verdict,
};
use teichkit::curves::{gateaux_check, GateauxConfig};
use teichkit::metrics::{d_o, d_ps, d_s, norm_a1, norm_a2, with_norm_a1, with_norm_a2, Distance};
use teichkit::operators::{beta, beta_hat, chi, pre_schwarzian, schwarzian};
use teichkit::verify::{self, geometric_left_map, Suite, VerifyOptions};
use teichkit::welding::{unweld, verify_welding, weld, UnweldConfig, WeldConfig};
use teichkit::{
    BersPoint, ChiPoint, CircleMap, DiskMap, HolomorphicCurve, Mobius, NormEstimate, OneDifferential, Poly,
    QuadDifferential, RunConfig, WeldingPair, C64,
};

use crate::{plot, Command, MetricArg, Status};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| anyhow!("{}: parse error: {e}", path.display()))
}

pub fn emit(text: &str, cfg: &RunConfig) -> Result<()> {
    match &cfg.out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(value: &T, cfg: &RunConfig) -> Result<()> {
    emit(&(serde_json::to_string_pretty(value)? + "\n"), cfg)
}

pub fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<Status> {
    match cmd {
        Command::Analyze { map } => analyze(map, cfg),
        Command::Distance { f, g, metric } => distance(f, g, *metric, cfg),
        Command::Weld { gamma, m, terms } => weld_cmd(gamma, *m, *terms, cfg),
        Command::Unweld { f, nodes, modes } => unweld_cmd(f, *nodes, *modes, cfg),
        Command::Chart { points, index } => chart(points, *index, cfg),
        Command::Nonoverlap { tuple, samples } => nonoverlap(tuple, *samples, cfg),
        Command::Transition { from, to, psi, check } => transition_cmd(from, to, psi, *check, cfg),
        Command::Gateaux { curve, h } => gateaux(curve, h.as_deref(), cfg),
        Command::Verify { suite, corpus } => verify_cmd(suite, corpus.as_deref(), cfg),
        Command::Plot {
            object,
            kind,
            gamma,
            samples,
        } => plot::plot(object, *kind, gamma.as_deref(), *samples, cfg),
    }
}

#[derive(Serialize)]
struct Norms {
    pre_schwarzian: NormEstimate,
    schwarzian: NormEstimate,
}

#[derive(Serialize)]
struct AnalyzeReport {
    truncation: usize,
    map: DiskMap,
    pre_schwarzian: OneDifferential,
    schwarzian: QuadDifferential,
    beta: BersPoint,
    beta_hat: OneDifferential,
    chi: ChiPoint,
    norms: Norms,
}

fn analyze(path: &Path, cfg: &RunConfig) -> Result<Status> {
    let f: DiskMap = read_json(path)?;
    let n = cfg.truncation;
    let policy = cfg.policy();
    let one = |d: OneDifferential| OneDifferential::from_rational(d.rational().clone(), n);
    let quad = |d: QuadDifferential| QuadDifferential::from_rational(d.rational().clone(), n);
    let a = one(pre_schwarzian(&f)?);
    let s = quad(schwarzian(&f)?);
    let norms = Norms {
        pre_schwarzian: norm_a1(&a, &policy),
        schwarzian: norm_a2(&s, &policy),
    };
    let b = beta(&f)?;
    let x = chi(&f)?;
    let report = AnalyzeReport {
        truncation: n,
        pre_schwarzian: with_norm_a1(a.clone(), &policy),
        schwarzian: with_norm_a2(s, &policy),
        beta: BersPoint {
            quad: quad(b.quad),
            c: b.c,
        },
        beta_hat: one(beta_hat(&f)?),
        chi: ChiPoint {
            one: one(x.one),
            c: x.c,
        },
        norms,
        map: f,
    };
    emit_json(&report, cfg)?;
    Ok(Status::Pass)
}

fn distance(f: &Path, g: &Path, metric: MetricArg, cfg: &RunConfig) -> Result<Status> {
    let (f, g): (DiskMap, DiskMap) = (read_json(f)?, read_json(g)?);
    let p = cfg.policy();
    #[derive(Serialize)]
    struct All {
        s: Distance,
        ps: Distance,
        o: Distance,
    }
    match metric {
        MetricArg::S => emit_json(&d_s(&f, &g, &p)?, cfg)?,
        MetricArg::Ps => emit_json(&d_ps(&f, &g, &p)?, cfg)?,
        MetricArg::O => emit_json(&d_o(&f, &g, &p)?, cfg)?,
        MetricArg::All => emit_json(
            &All {
                s: d_s(&f, &g, &p)?,
                ps: d_ps(&f, &g, &p)?,
                o: d_o(&f, &g, &p)?,
            },
            cfg,
        )?,
    }
    Ok(Status::Pass)
}

fn weld_cmd(gamma: &Path, m: f64, terms: usize, cfg: &RunConfig) -> Result<Status> {
    let gamma: CircleMap = read_json(gamma)?;
    let wc = WeldConfig {
        terms,
        samples: 4 * terms,
        tol: cfg.tolerances.newton,
        ..WeldConfig::default()
    };
    let pair = weld(&gamma, m, &wc)?;
    let r = verify_welding(&pair, &gamma, 256);
    eprintln!(
        "weld: {} iterations, seam residual sup {:.3e} (L2 {:.3e}) at 256 samples",
        pair.iterations, r.sup, r.l2
    );
    emit_json(&pair, cfg)?;
    Ok(Status::Pass)
}

/// A bare map, or a welding pair whose `f` is used.
#[derive(Deserialize)]
#[serde(untagged)]
enum MapOrPair {
    Map(DiskMap),
    Pair(WeldingPair),
}

fn unweld_cmd(f: &Path, nodes: usize, modes: usize, cfg: &RunConfig) -> Result<Status> {
    let f = match read_json::<MapOrPair>(f)? {
        MapOrPair::Map(m) => m,
        MapOrPair::Pair(p) => p.f,
    };
    let u = unweld(
        &f,
        &UnweldConfig {
            nodes,
            modes,
            terms: modes,
        },
    )?;
    emit_json(&u, cfg)?;
    Ok(Status::Pass)
}

#[derive(Deserialize)]
struct PointsFile {
    points: Vec<SpherePoint>,
}

#[derive(Serialize)]
struct ChartReport {
    config: PuncturedSphereConfig,
    charts: Vec<LocalChart>,
}

fn chart(points: &Path, index: Option<usize>, cfg: &RunConfig) -> Result<Status> {
    let p: PointsFile = read_json(points)?;
    let config = make_config(p.points)?;
    let opts = ChartOptions::default();
    let charts = match index {
        Some(i) => vec![chart_with(&config, i, &opts)?],
        None => default_atlas(&config)?,
    };
    emit_json(&ChartReport { config, charts }, cfg)?;
    Ok(Status::Pass)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TupleInput {
    Explicit { charts: Vec<LocalChart>, maps: Vec<DiskMap> },
    Default { points: Vec<SpherePoint>, maps: Vec<DiskMap> },
}

fn nonoverlap(tuple: &Path, samples: usize, cfg: &RunConfig) -> Result<Status> {
    let tuple = match read_json::<TupleInput>(tuple)? {
        TupleInput::Explicit { charts, maps } => NonOverlappingTuple::new(charts, maps)?,
        TupleInput::Default { points, maps } => {
            NonOverlappingTuple::new(default_atlas(&make_config(points)?)?, maps)?
        }
    };
    let report = check_nonoverlap(&tuple, samples)?;
    emit_json(&report, cfg)?;
    Ok(if report.verdict == Verdict::Pass {
        Status::Pass
    } else {
        Status::Fail
    })
}

#[derive(Serialize)]
struct TransitionReport {
    map: DiskMap,
    #[serde(skip_serializing_if = "Option::is_none")]
    holomorphy: Option<HolomorphyReport>,
}

fn transition_cmd(from: &Path, to: &Path, psi: &Path, check: bool, cfg: &RunConfig) -> Result<Status> {
    let (a, b): (LocalChart, LocalChart) = (read_json(from)?, read_json(to)?);
    let psi: DiskMap = read_json(psi)?;
    let map = transition(&a, &b, &psi)?;
    let holomorphy = if check {
        let zero = C64::new(0.0, 0.0);
        let dirs = [
            ChiDirection { phi: Poly::one(), c: zero },
            ChiDirection {
                phi: Poly::from_real(&[0.0, 1.0]),
                c: zero,
            },
        ];
        Some(transition_holomorphy_check(&a, &b, &psi, &dirs, cfg.tolerances.fd_step)?)
    } else {
        None
    };
    let pass = holomorphy.as_ref().is_none_or(|h| h.cr_residual <= 1e-6);
    emit_json(&TransitionReport { map, holomorphy }, cfg)?;
    Ok(if pass { Status::Pass } else { Status::Fail })
}

fn gateaux(curve: &Path, h: Option<&Path>, cfg: &RunConfig) -> Result<Status> {
    let curve: HolomorphicCurve = read_json(curve)?;
    let h: Mobius = match h {
        Some(p) => read_json(p)?,
        None => geometric_left_map(),
    };
    let gc = GateauxConfig {
        cr_step: cfg.tolerances.fd_step,
        policy: cfg.policy(),
        ..GateauxConfig::default()
    };
    let rep = gateaux_check(&h, &curve, &gc)?;
    let mut csv = String::from("t,residual,second_order_lhs,observed_constant,bound_holds\n");
    for r in &rep.rows {
        csv.push_str(&format!(
            "{:e},{:e},{:e},{:e},{}\n",
            r.t, r.residual, r.second_order_lhs, r.observed_constant, r.bound_holds
        ));
    }
    csv.push_str(&format!(
        "# summary slope={} exact={} cr_residual={:e} derivative_mismatch={:e} passed={}\n",
        rep.slope.map_or("none".into(), |s| format!("{s:.6}")),
        rep.exact,
        rep.cr_residual,
        rep.derivative_mismatch,
        rep.passed
    ));
    emit(&csv, cfg)?;
    Ok(if rep.passed { Status::Pass } else { Status::Fail })
}

fn verify_cmd(suite: &str, corpus: Option<&Path>, cfg: &RunConfig) -> Result<Status> {
    let suite: Suite = suite.parse()?;
    let mut opts = VerifyOptions::from(cfg);
    if let Some(p) = corpus {
        opts.corpus = Some(read_json(p)?);
    }
    let (report, times) = verify::run_timed(suite, &opts);
    for (s, r) in times.iter().zip(&report.suites) {
        eprintln!(
            "{} {:<10} {:>8.2?}",
            if r.passed { "PASS" } else { "FAIL" },
            s.0.name(),
            s.1
        );
    }
    emit_json(&report, cfg)?;
    Ok(if report.passed { Status::Pass } else { Status::Fail })
}
