use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use infocorr::classical::{
    cplus, cplus_facets, membership_lp, min_g_lp, system_at_g, MembershipOptions, Variant, Weight,
    SeparatingInequality,
};
use infocorr::geometry::{remove_redundant, write_polyhedron, DdOptions};
use infocorr::hierarchy::{
    certify_info, solve_randomness_bound, upper_bound, CertifyOptions, Evaluation, HierarchyConfig, Mode,
};
use infocorr::model::{behavior_from_csv, guess_to_info, info_to_guess, BehaviorRecord, Prior, Scenario, Witness, WitnessRecord};
use infocorr::quantum::{seesaw_optimize, Ensemble, MeasurementSet, SeesawConfig};
use infocorr::rational;
use infocorr::{Error, Result};

use crate::output::{csv_body, emit, json_body, RunManifest};
use crate::{Cli, Command, GridArgs, RelaxArgs};

pub fn run(cli: Cli, args: &[String]) -> Result<u8> {
    match cli.command {
        Command::Facets(a) => facets(a, args),
        Command::Membership(a) => membership(a, args),
        Command::Bound(a) => bound(a, args),
        Command::Seesaw(a) => seesaw(a, args),
        Command::Randomness(a) => randomness(a, args),
        Command::CertifyInfo(a) => certify(a, args),
        Command::Rerun(a) => rerun(&a.file, a.out.as_deref()),
    }
}

fn rerun(file: &Path, out: Option<&Path>) -> Result<u8> {
    let m = RunManifest::extract(&std::fs::read_to_string(file)?)?;
    let mut args = Vec::with_capacity(m.args.len() + 2);
    let mut it = m.args.iter();
    while let Some(a) = it.next() {
        if a == "--out" {
            it.next();
        } else if !a.starts_with("--out=") {
            args.push(a.clone());
        }
    }
    if let Some(o) = out {
        args.push("--out".into());
        args.push(o.display().to_string());
    }
    let argv: Vec<String> = std::iter::once("infocorr".to_string()).chain(args.iter().cloned()).collect();
    let cli = <Cli as clap::Parser>::try_parse_from(&argv).map_err(|e| Error::Parse(format!("manifest arguments: {e}")))?;
    if matches!(cli.command, Command::Rerun(_)) {
        return Err(Error::Parse("a manifest cannot replay another rerun".into()));
    }
    run(cli, &args)
}

fn parse_variant(s: &str) -> Result<Variant> {
    match s {
        "stochastic" | "c" => Ok(Variant::Stochastic),
        "det" | "deterministic" => Ok(Variant::Deterministic),
        other => Err(Error::Parse(format!("unknown variant `{other}` (stochastic or det)"))),
    }
}

fn load_witness(spec: &str) -> Result<Witness> {
    if Path::new(spec).is_file() {
        let rec: WitnessRecord = serde_json::from_str(&std::fs::read_to_string(spec)?)?;
        rec.to_witness()
    } else {
        Witness::named(spec)
    }
}

fn parse_values(spec: &str) -> Result<Vec<f64>> {
    let num = |t: &str| rational::parse(t.trim()).map(|r| rational::to_f64(&r));
    let parts: Vec<&str> = spec.split(':').collect();
    let mut v = match parts.as_slice() {
        [a, b, n] => {
            let (a, b) = (num(a)?, num(b)?);
            let n: usize = n.trim().parse().map_err(|_| Error::Parse(format!("bad point count in `{spec}`")))?;
            match n {
                0 => return Err(Error::Parse(format!("empty grid `{spec}`"))),
                1 => vec![a],
                _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
            }
        }
        [_] => spec.split(',').map(num).collect::<Result<Vec<_>>>()?,
        _ => return Err(Error::Parse(format!("cannot parse grid `{spec}`"))),
    };
    v.sort_by(f64::total_cmp);
    v.dedup();
    Ok(v)
}

/// `(G, alpha)` pairs sorted by `G`.
fn grid(g: &GridArgs, prior: &Prior, m: &mut RunManifest) -> Result<Vec<(f64, f64)>> {
    let pts = match (&g.g, &g.alpha) {
        (Some(spec), None) => {
            let gs = parse_values(spec)?;
            m.g_grid = Some(gs.clone());
            gs.into_iter().map(|g| Ok((g, guess_to_info(g, prior)?))).collect::<Result<Vec<_>>>()?
        }
        (None, Some(spec)) => {
            let al = parse_values(spec)?;
            m.alpha_grid = Some(al.clone());
            al.into_iter().map(|a| Ok((info_to_guess(a, prior)?, a))).collect::<Result<Vec<_>>>()?
        }
        _ => return Err(Error::Parse("give exactly one of --g or --alpha".into())),
    };
    Ok(pts)
}

fn single(g: &GridArgs, prior: &Prior, m: &mut RunManifest) -> Result<(f64, f64)> {
    let pts = grid(g, prior, m)?;
    match pts.as_slice() {
        [p] => Ok(*p),
        _ => Err(Error::Parse("this command takes a single G or alpha".into())),
    }
}

fn relaxation(r: &RelaxArgs, m: &mut RunManifest) -> Result<HierarchyConfig> {
    let mode: Mode = r.mode.parse()?;
    let mut cfg = HierarchyConfig::new(mode, r.level);
    if let Some(f) = &r.filter {
        let spec = if Path::new(f).is_file() { std::fs::read_to_string(f)?.trim().to_string() } else { f.clone() };
        cfg = cfg.with_filter(&spec)?;
    }
    if let Some(l) = &r.localizer_filter {
        let spec = if Path::new(l).is_file() { std::fs::read_to_string(l)?.trim().to_string() } else { l.clone() };
        cfg.localizer_filter = Some(infocorr::hierarchy::Filter::resolve(&spec)?);
    }
    m.mode = Some(mode.to_string());
    m.level = Some(cfg.level);
    m.filter = Some(cfg.filter_name());
    Ok(cfg)
}

fn record_out(m: &mut RunManifest, out: Option<&Path>) {
    if let Some(o) = out {
        m.outputs.push(o.to_path_buf());
    }
}

fn facets(a: crate::FacetsArgs, args: &[String]) -> Result<u8> {
    let s = Scenario::parse(&a.scenario)?;
    let prior = Prior::parse(&a.prior.prior, s.n_x)?;
    let variant = parse_variant(&a.variant)?;
    let mut m = RunManifest::new("facets", args);
    m.scenario = Some(s.label());
    m.prior = Some(prior.label());
    record_out(&mut m, a.out.as_deref());
    let opts = DdOptions::default();
    let lifted = cplus_facets(&cplus(s, &prior, variant, &opts)?, &opts)?;
    let sys = match &a.g {
        Some(g) => {
            let g = rational::parse(g)?;
            m.g_grid = Some(vec![rational::to_f64(&g)]);
            remove_redundant(&system_at_g(&lifted, &g))
        }
        None => lifted,
    };
    emit(a.out.as_deref(), &(m.comment() + &write_polyhedron(&sys, None)))?;
    Ok(0)
}

#[derive(Serialize)]
struct MembershipOut {
    feasible: bool,
    g: f64,
    distance: f64,
    /// Least G at which the behavior is classical; absent when the search failed.
    g_min: Option<f64>,
    weights: Vec<Weight>,
    certificate: Option<SeparatingInequality>,
    reduced_alphabet: bool,
}

fn membership(a: crate::MembershipArgs, args: &[String]) -> Result<u8> {
    let text = std::fs::read_to_string(&a.behavior)?;
    let p = if text.trim_start().starts_with('{') {
        serde_json::from_str::<BehaviorRecord>(&text)?.to_behavior()?
    } else {
        let s = a.scenario.as_deref().ok_or_else(|| Error::Parse("CSV behaviors need --scenario".into()))?;
        behavior_from_csv(Scenario::parse(s)?, &text)?
    };
    let s = p.scenario();
    let prior = Prior::parse(&a.prior.prior, s.n_x)?;
    let variant = parse_variant(&a.variant)?;
    let mut m = RunManifest::new("membership", args);
    m.scenario = Some(s.label());
    m.prior = Some(prior.label());
    record_out(&mut m, a.out.as_deref());
    let (g, _) = single(&a.grid, &prior, &mut m)?;
    let opts = MembershipOptions { tol: a.tol, n_m: a.n_m, ..Default::default() };
    let r = membership_lp(&p, &prior, g, variant, &opts)?;
    let g_min = min_g_lp(&p, &prior, variant, &opts).ok();
    let out = MembershipOut {
        feasible: r.feasible,
        g,
        distance: r.distance,
        g_min,
        weights: r.weights,
        certificate: r.certificate,
        reduced_alphabet: r.reduced_alphabet,
    };
    emit(a.out.as_deref(), &json_body(&m, &out)?)?;
    Ok(if out.feasible { 0 } else { 2 })
}

#[derive(Serialize)]
struct BoundRow {
    g: f64,
    alpha: f64,
    bound: f64,
    dual: f64,
    status: String,
    verified: bool,
    iterations: u32,
    solve_time: f64,
}

fn bound(a: crate::BoundArgs, args: &[String]) -> Result<u8> {
    let w = load_witness(&a.witness)?;
    let prior = Prior::parse(&a.prior.prior, w.scenario().n_x)?;
    let mut m = RunManifest::new("bound", args);
    m.scenario = Some(w.scenario().label());
    m.prior = Some(prior.label());
    m.witness = Some(a.witness.clone());
    record_out(&mut m, a.out.as_deref());
    let pts = grid(&a.grid, &prior, &mut m)?;
    let cfg = relaxation(&a.relax, &mut m)?;
    let rows = pts
        .par_iter()
        .map(|&(g, alpha)| {
            let r = upper_bound(&w, &prior, g, &cfg)?;
            Ok(BoundRow {
                g,
                alpha,
                bound: r.value,
                dual: r.dual,
                status: format!("{:?}", r.status),
                verified: r.verified,
                iterations: r.iterations,
                solve_time: r.solve_time,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    emit(a.out.as_deref(), &csv_body(&m, &rows)?)?;
    Ok(0)
}

#[derive(Serialize)]
struct SeesawOut<'a> {
    g: f64,
    alpha: f64,
    dim: usize,
    value: f64,
    restart: usize,
    converged: bool,
    trace: &'a [f64],
    ensemble: &'a Ensemble,
    measurements: &'a MeasurementSet,
    strategy_files: Vec<PathBuf>,
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn seesaw(a: crate::SeesawArgs, args: &[String]) -> Result<u8> {
    let w = load_witness(&a.witness)?;
    let prior = Prior::parse(&a.prior.prior, w.scenario().n_x)?;
    let mut m = RunManifest::new("seesaw", args);
    m.scenario = Some(w.scenario().label());
    m.prior = Some(prior.label());
    m.witness = Some(a.witness.clone());
    m.seed = Some(a.seed);
    let (g, alpha) = single(&a.grid, &prior, &mut m)?;
    let cfg = SeesawConfig { restarts: a.restarts, max_rounds: a.rounds, seed: a.seed, ..SeesawConfig::new(a.dim) };
    let r = seesaw_optimize(&w, &prior, g, &cfg)?;
    let files = match &a.out {
        Some(o) => vec![sibling(o, ".ensemble.json"), sibling(o, ".measurements.json")],
        None => Vec::new(),
    };
    record_out(&mut m, a.out.as_deref());
    m.outputs.extend(files.iter().cloned());
    if let [e, ms] = files.as_slice() {
        emit(Some(e), &(serde_json::to_string_pretty(&r.ensemble)? + "\n"))?;
        emit(Some(ms), &(serde_json::to_string_pretty(&r.measurements)? + "\n"))?;
    }
    let out = SeesawOut {
        g,
        alpha,
        dim: a.dim,
        value: r.value,
        restart: r.restart,
        converged: r.converged,
        trace: &r.trace,
        ensemble: &r.ensemble,
        measurements: &r.measurements,
        strategy_files: files,
    };
    emit(a.out.as_deref(), &json_body(&m, &out)?)?;
    Ok(0)
}

#[derive(Serialize)]
struct RandomnessRow {
    g: f64,
    alpha: f64,
    witness_max: f64,
    observed: f64,
    p_star: f64,
    h_min: f64,
    verified: bool,
}

fn parse_event(s: &str, sc: Scenario) -> Result<(usize, usize)> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad event `{s}`"))))
        .collect::<Result<_>>()?;
    match parts.as_slice() {
        [x, y] if (1..=sc.n_x).contains(x) && (1..=sc.n_y).contains(y) => Ok((x - 1, y - 1)),
        _ => Err(Error::OutOfRange(format!("event `{s}` is not a one-based x,y pair in scenario {sc}"))),
    }
}

fn randomness(a: crate::RandomnessArgs, args: &[String]) -> Result<u8> {
    let w = load_witness(&a.witness)?;
    let s = w.scenario();
    let prior = Prior::parse(&a.prior.prior, s.n_x)?;
    let event = parse_event(&a.event, s)?;
    let mut m = RunManifest::new("randomness", args);
    m.scenario = Some(s.label());
    m.prior = Some(prior.label());
    m.witness = Some(a.witness.clone());
    record_out(&mut m, a.out.as_deref());
    let pts = grid(&a.grid, &prior, &mut m)?;
    let cfg = relaxation(&a.relax, &mut m)?;
    let rows = pts
        .par_iter()
        .map(|&(g, alpha)| {
            let top = upper_bound(&w, &prior, g, &cfg)?;
            let observed = a.observed.unwrap_or(top.value);
            let r = solve_randomness_bound(&w, Some(observed), &prior, g, event, &cfg, a.pin_tol)?;
            Ok(RandomnessRow {
                g,
                alpha,
                witness_max: top.value,
                observed,
                p_star: r.p_star,
                h_min: r.h_min,
                verified: r.verified && top.verified,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    emit(a.out.as_deref(), &csv_body(&m, &rows)?)?;
    Ok(0)
}

#[derive(Serialize)]
struct CertifyOut {
    observed: f64,
    error: f64,
    /// Certified: no G below `g_lower` reaches the observed value.
    alpha_lower: f64,
    g_lower: f64,
    g_upper: f64,
    /// Same search at `observed - error` and `observed + error`.
    alpha_at_minus_error: f64,
    alpha_at_plus_error: Option<f64>,
    evaluations: Vec<Evaluation>,
    verified: bool,
}

fn certify(a: crate::CertifyArgs, args: &[String]) -> Result<u8> {
    let w = load_witness(&a.witness)?;
    let prior = Prior::parse(&a.prior.prior, w.scenario().n_x)?;
    let mut m = RunManifest::new("certify-info", args);
    m.scenario = Some(w.scenario().label());
    m.prior = Some(prior.label());
    m.witness = Some(a.witness.clone());
    record_out(&mut m, a.out.as_deref());
    let cfg = relaxation(&a.relax, &mut m)?;
    let opts = CertifyOptions { alpha_tol: a.alpha_tol, with_upper: a.with_upper, ..Default::default() };
    let c = certify_info(&w, &prior, a.observed, a.error, &cfg, &opts)?;
    let out = CertifyOut {
        observed: c.observed,
        error: c.error,
        alpha_lower: c.central.alpha,
        g_lower: c.central.g_low,
        g_upper: c.central.g_high,
        alpha_at_minus_error: c.lower.alpha,
        alpha_at_plus_error: c.upper.map(|u| u.alpha),
        evaluations: c.evaluations,
        verified: c.verified,
    };
    emit(a.out.as_deref(), &json_body(&m, &out)?)?;
    Ok(0)
}
