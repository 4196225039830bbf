use std::io::{Read, Write};

use flatscape::classical_mc::{estimate_tts, geometric_schedule, pt_run, sa_success_counts, total_variation, PtConfig, SaConfig, TtsEstimate, TtsPoint, UpdateMix};
use flatscape::graphs::{generate_star, generate_unit_disk, Graph};
use flatscape::landscape::{bottleneck_range, classical_bound, independence_polynomial, BoundKind, BoundParams, LandscapeProfile};
use flatscape::qmc::{exact_gibbs_diagonal, qmc_bound_inputs, qmc_run, QmcConfig, QMC_DENSE_LIMIT};
use flatscape::spectral::{gap_report, Couplings, EnergyUnit, GapOptions, GapReport, ResolventConfig, ResolventMode, ScanConfig};
use flatscape::star_models::{star_level_crossing, StarPrediction};
use flatscape::tight_binding::{build_chain, bulk_diagnostics, chain_gap_profile, compare_with_full, synthesize_schedule};
use flatscape::{Chain, Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::*;
use crate::manifest::{sha256_hex, Run};

/// Version of the `compare` table layout.
pub const COMPARE_SCHEMA: u32 = 1;

pub fn dispatch(cli: &Cli, argv: &[String]) -> Result<()> {
    match &cli.command {
        Command::Gen(a) => gen(cli, a, argv),
        Command::Profile(a) => profile(cli, a, argv),
        Command::Sa(a) => sa(cli, a, argv),
        Command::Pt(a) => pt(cli, a, argv),
        Command::Qmc(a) => qmc(cli, a, argv),
        Command::Gap(a) => gap(cli, a, argv, false),
        Command::Resolvent(a) => gap(cli, a, argv, true),
        Command::Chain(a) => chain(cli, a, argv),
        Command::Star(a) => star(cli, a, argv),
        Command::Compare(a) => compare(cli, a, argv),
    }
}

/// Reads an instance from a file or standard input. Either a bare graph or
/// an object carrying it under `"graph"` is accepted.
fn read_graph(input: &GraphInput, run: &mut Run) -> Result<Graph> {
    let mut bytes = Vec::new();
    if input.graph == "-" {
        std::io::stdin().read_to_end(&mut bytes)?;
    } else {
        bytes = std::fs::read(&input.graph)?;
    }
    run.input(&input.graph, &bytes);
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::Parse(e.to_string()))?;
    let v: Value = serde_json::from_str(text)?;
    match v.get("graph") {
        Some(inner) => Graph::from_json(&inner.to_string()),
        None => Graph::from_json(text),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Instance {
    id: String,
    family: String,
    n: usize,
    edges: usize,
    n_b: Option<usize>,
    l: Option<usize>,
}

fn instance(g: &Graph) -> Instance {
    let meta_usize = |k: &str| g.meta().get(k).and_then(Value::as_u64).map(|x| x as usize);
    let family = serde_json::to_value(g.kind()).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_else(|| "generic".into());
    let (n_b, l) = (meta_usize("n_b"), meta_usize("l"));
    let id = match (n_b, l, meta_usize("width"), meta_usize("height"), meta_usize("seed")) {
        (Some(nb), Some(l), ..) => format!("star({nb},{l})"),
        (_, _, Some(w), Some(h), Some(s)) => format!("unit_disk({w}x{h},seed={s})"),
        _ => format!("graph-{}", &sha256_hex(g.to_json().as_bytes())[..12]),
    };
    Instance { id, family, n: g.n(), edges: g.edges().len(), n_b, l }
}

fn bound_params(b: &BoundArgs) -> BoundParams {
    BoundParams { k: b.k, eps: b.eps, ..Default::default() }
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

fn pair(v: &[f64], what: &str) -> Result<(f64, f64)> {
    match v {
        [a, b] if a.is_finite() && b.is_finite() => Ok((*a, *b)),
        _ => Err(Error::Config(format!("{what} expects two comma-separated numbers"))),
    }
}

fn emit_stdout(v: &impl Serialize) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn gen(cli: &Cli, a: &GenArgs, argv: &[String]) -> Result<()> {
    let mut run = Run::new(&cli.out, "gen", "gen", cli.seed)?;
    let g = match a.family {
        Family::UnitDisk => generate_unit_disk(a.width, a.height, a.filling, a.radius_sq, cli.seed)?,
        Family::Star => generate_star(a.nb, a.l)?,
    };
    let mut text = g.to_json();
    text.push('\n');
    run.write(&a.name, text.as_bytes())?;
    print!("{text}");
    run.finish(argv)
}

#[derive(Serialize)]
struct ProfileOutput {
    instance: Instance,
    profile: LandscapeProfile,
    b_star: usize,
    bottleneck: Vec<usize>,
    unimodal: bool,
    unimodality_violations: Vec<usize>,
    k: usize,
    k_prime: usize,
    eps: f64,
    sa_bound: f64,
    pt_local_bound: f64,
    pt_isoenergetic_bound: f64,
}

fn profile(cli: &Cli, a: &ProfileArgs, argv: &[String]) -> Result<()> {
    let mut run = Run::new(&cli.out, "profile", "profile", cli.seed)?;
    let g = read_graph(&a.input, &mut run)?;
    let p = independence_polynomial(&g)?;
    let params = BoundParams { k_prime: a.k_prime, ..bound_params(&a.bound) };
    let out = ProfileOutput {
        instance: instance(&g),
        b_star: p.b_star(),
        bottleneck: bottleneck_range(&p).collect(),
        unimodal: p.is_unimodal(),
        unimodality_violations: p.unimodality_violations(),
        k: params.k,
        k_prime: params.k_prime,
        eps: params.eps,
        sa_bound: classical_bound(&p, BoundKind::Sa, &params)?,
        pt_local_bound: classical_bound(&p, BoundKind::PtLocal, &params)?,
        pt_isoenergetic_bound: classical_bound(&p, BoundKind::PtIsoenergetic, &params)?,
        profile: p,
    };
    run.write_json("profile.json", &out)?;
    let p = &out.profile;
    let rows = (0..=p.alpha()).map(|b| vec![b.to_string(), p.count(b).to_string(), if b == 0 { String::new() } else { fmt(p.ratio(b)) }]);
    run.write_csv("profile.csv", &["b", "count", "ratio_prev"], rows)?;
    run.finish(argv)
}

#[derive(Serialize)]
struct TtsOutput<C: Serialize> {
    instance: Instance,
    config: C,
    points: Vec<TtsPoint>,
    estimate: TtsEstimate,
    bound: f64,
}

/// Writes the time-to-solution report and table; a censored estimate is
/// reported after the artifacts are on disk.
fn finish_tts<C: Serialize>(mut run: Run, stem: &str, out: TtsOutput<C>, argv: &[String]) -> Result<()> {
    run.write_json(&format!("{stem}.json"), &out)?;
    let rows = out.estimate.points.iter().zip(&out.points).map(|(&(t, p, tts), pt)| vec![fmt(t), pt.trials.to_string(), pt.successes.to_string(), fmt(p), fmt(tts)]);
    run.write_csv(&format!("{stem}.csv"), &["length", "trials", "successes", "p", "tts"], rows)?;
    run.finish(argv)?;
    if out.estimate.censored {
        return Err(Error::Degenerate("no run length reached the target; time to solution is censored".into()));
    }
    Ok(())
}

fn sa(cli: &Cli, a: &SaArgs, argv: &[String]) -> Result<()> {
    let mut run = Run::new(&cli.out, "sa", "sa", cli.seed)?;
    let g = read_graph(&a.input, &mut run)?;
    let (lo, hi) = pair(&a.beta, "--beta")?;
    if !(0.0..=1.0).contains(&a.flip_weight) {
        return Err(Error::Config("--flip-weight must lie in [0, 1]".into()));
    }
    let base = SaConfig { mix: UpdateMix { flip: a.flip_weight, exchange: 1.0 - a.flip_weight }, seed: cli.seed, ..Default::default() };
    let points = sa_success_counts(&g, &base, (lo, hi), &a.lengths, a.trials)?;
    let estimate = estimate_tts(&points, a.p_target, a.bootstrap, cli.seed)?;
    let p = independence_polynomial(&g)?;
    let bound = classical_bound(&p, BoundKind::Sa, &BoundParams { k: base.mix.k(), ..Default::default() })?;
    let config = json!({ "beta": [lo, hi], "mix": base.mix, "lengths": a.lengths, "trials": a.trials, "p_target": a.p_target });
    finish_tts(run, "sa", TtsOutput { instance: instance(&g), config, points, estimate, bound }, argv)
}

fn pt(cli: &Cli, a: &PtArgs, argv: &[String]) -> Result<()> {
    let mut run = Run::new(&cli.out, "pt", "pt", cli.seed)?;
    let g = read_graph(&a.input, &mut run)?;
    let (lo, hi) = pair(&a.beta, "--beta")?;
    let base = PtConfig { betas: geometric_schedule(lo, hi, a.replicas), isoenergetic: a.isoenergetic, seed: cli.seed, stop_at_hit: true, ..Default::default() };
    let mut points = Vec::with_capacity(a.lengths.len());
    for (li, &len) in a.lengths.iter().enumerate() {
        let mut successes = 0;
        for t in 0..a.trials {
            let cfg = PtConfig { sweeps: len, stream: ((li as u64) << 32) | t as u64, ..base.clone() };
            successes += pt_run(&g, &cfg)?.success() as usize;
        }
        points.push(TtsPoint { length: len as f64, trials: a.trials, successes });
    }
    let estimate = estimate_tts(&points, a.p_target, a.bootstrap, cli.seed)?;
    let p = independence_polynomial(&g)?;
    let kind = if a.isoenergetic { BoundKind::PtIsoenergetic } else { BoundKind::PtLocal };
    let bound = classical_bound(&p, kind, &BoundParams { k: base.mix.k(), k_prime: base.mix.k(), ..Default::default() })?;
    finish_tts(run, "pt", TtsOutput { instance: instance(&g), config: base, points, estimate, bound }, argv)
}

fn qmc(cli: &Cli, a: &QmcArgs, argv: &[String]) -> Result<()> {
    let mut run = Run::new(&cli.out, "qmc", "qmc", cli.seed)?;
    let g = read_graph(&a.input, &mut run)?;
    let cfg = QmcConfig { omega: a.omega, delta: a.delta, lambda: a.lambda, beta: a.beta, slices: a.slices, sweeps: a.sweeps, burn_in: a.sweeps / 10, seed: cli.seed, ..Default::default() };
    let res = qmc_run(&g, &cfg)?;
    let exact = if res.states.len() <= QMC_DENSE_LIMIT { Some(exact_gibbs_diagonal(&g, a.omega, a.delta, a.lambda, a.beta)?.1) } else { None };
    let tv = exact.as_ref().map(|e| total_variation(&res.marginal, e));
    let couplings = Couplings::new(a.omega, a.delta).with_lambda(a.lambda);
    let bound = qmc_bound_inputs(&g, couplings, a.beta, a.bound.k, a.bound.eps)?;
    run.write_json("qmc.json", &json!({ "instance": instance(&g), "result": res, "exact": exact, "tv_to_exact": tv, "bound": bound }))?;
    let rows = res.states.iter().enumerate().map(|(i, z)| {
        vec![z.to_string(), z.count_ones().to_string(), fmt(res.marginal[i]), fmt(res.slice_averaged[i]), exact.as_ref().map(|e| fmt(e[i])).unwrap_or_default()]
    });
    run.write_csv("qmc.csv", &["state", "size", "slice1", "slice_averaged", "exact"], rows)?;
    run.finish(argv)
}

#[derive(Serialize, Deserialize)]
struct GapOutput {
    schema_version: u32,
    instance: Instance,
    alpha: usize,
    k: usize,
    eps: f64,
    sa_bound: f64,
    report: GapReport,
}

fn gap(cli: &Cli, a: &GapArgs, argv: &[String], resolvent: bool) -> Result<()> {
    let command = if resolvent { "resolvent" } else { "gap" };
    let stem = a.label.clone().unwrap_or_else(|| command.into());
    let mut run = Run::new(&cli.out, command, &stem, cli.seed)?;
    let g = read_graph(&a.input, &mut run)?;
    let (unit, range) = match (&a.delta_range, &a.range) {
        (Some(_), Some(_)) => return Err(Error::Config("give either --range or --delta-range".into())),
        (Some(r), None) => (EnergyUnit::Omega, pair(r, "--delta-range")?),
        (None, r) => {
            let unit = match a.unit {
                Unit::Delta => EnergyUnit::Delta,
                Unit::Omega => EnergyUnit::Omega,
            };
            (unit, r.as_deref().map(|r| pair(r, "--range")).transpose()?.unwrap_or(unit.default_range()))
        }
    };
    if resolvent && a.lambda != 0.0 {
        return Err(Error::Config("the resolvent pipeline needs --lambda 0".into()));
    }
    let rcfg = ResolventConfig { mode: a.series.map_or(ResolventMode::Exact, ResolventMode::Series), ..Default::default() };
    let opts = GapOptions {
        scan: ScanConfig { unit, range, points: a.points, lambda: a.lambda, ..Default::default() },
        symmetric: a.symmetric,
        resolvent: resolvent.then_some(rcfg),
        validity: resolvent,
        ..Default::default()
    };
    let report = gap_report(&g, &opts)?;
    let p = independence_polynomial(&g)?;
    let params = bound_params(&a.bound);
    let out = GapOutput {
        schema_version: COMPARE_SCHEMA,
        instance: instance(&g),
        alpha: p.alpha(),
        k: params.k,
        eps: params.eps,
        sa_bound: classical_bound(&p, BoundKind::Sa, &params)?,
        report,
    };
    run.write_json(&format!("{stem}.json"), &out)?;
    let rows = out.report.scan.grid.iter().map(|&(x, d)| vec![fmt(x), fmt(d)]);
    run.write_csv(&format!("{stem}.csv"), &["coordinate", "gap"], rows)?;
    run.finish(argv)?;
    if out.report.boundary_minimum {
        eprintln!("warning: gap minimum on the edge of the scan range");
    }
    Ok(())
}

fn chain(cli: &Cli, a: &ChainArgs, argv: &[String]) -> Result<()> {
    let mut run = Run::new(&cli.out, "chain", "chain", cli.seed)?;
    let g = read_graph(&a.input, &mut run)?;
    let p = independence_polynomial(&g)?;
    let chain: Chain = build_chain(&p, a.omega)?;
    let range = a.delta_range.as_deref().map(|r| pair(r, "--delta-range")).transpose()?;
    let profile = chain_gap_profile(&chain, range, a.points)?;
    let bulk = bulk_diagnostics(&chain, a.points)?;
    let schedule = synthesize_schedule(&profile, a.c, a.window, 32);
    let comparison = a.lambda.map(|l| compare_with_full(&g, l, a.points)).transpose()?;
    let out = json!({
        "instance": instance(&g),
        "couplings": chain.couplings,
        "profile": profile,
        "bulk": bulk,
        "schedule": schedule.as_ref().ok(),
        "schedule_error": schedule.as_ref().err().map(|e| e.to_string()),
        "comparison": comparison,
    });
    run.write_json("chain.json", &out)?;
    run.write_csv("chain_couplings.csv", &["b", "t_b"], chain.couplings.iter().enumerate().map(|(i, t)| vec![(i + 1).to_string(), fmt(*t)]))?;
    run.write_csv("chain_gap.csv", &["delta", "gap"], profile.curve.iter().map(|&(d, x)| vec![fmt(d), fmt(x)]))?;
    if let Ok(s) = &schedule {
        run.write_csv("chain_schedule.csv", &["t", "delta"], s.samples.iter().map(|&(t, d)| vec![fmt(t), fmt(d)]))?;
    }
    run.finish(argv)
}

#[derive(Serialize)]
struct StarOutput {
    prediction: StarPrediction,
    graph: Value,
}

fn star(cli: &Cli, a: &StarArgs, argv: &[String]) -> Result<()> {
    let mut run = Run::new(&cli.out, "star", "star", cli.seed)?;
    let prediction = star_level_crossing(a.nb, a.l, a.omega)?;
    let graph: Value = serde_json::from_str(&generate_star(a.nb, a.l)?.to_json())?;
    let out = StarOutput { prediction, graph };
    run.write_json("star.json", &out)?;
    emit_stdout(&out)?;
    run.finish(argv)
}

#[derive(Serialize)]
struct Series {
    family: String,
    l: Option<usize>,
    points: usize,
    /// Least-squares slope of `ln Δ⁻¹` against `ln` of the SA bound.
    slope: Option<f64>,
}

fn slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn compare(cli: &Cli, a: &CompareArgs, argv: &[String]) -> Result<()> {
    let mut run = Run::new(&cli.out, "compare", "compare", cli.seed)?;
    if a.reports.is_empty() {
        return Err(Error::Config("no reports to compare".into()));
    }
    let mut reports = Vec::new();
    for path in &a.reports {
        let bytes = std::fs::read(path)?;
        run.input(&path.display().to_string(), &bytes);
        let r: GapOutput = serde_json::from_slice(&bytes).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        if r.schema_version != COMPARE_SCHEMA {
            return Err(Error::Parse(format!("{}: schema version {}", path.display(), r.schema_version)));
        }
        reports.push(r);
    }
    let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
    let rows = reports.iter().map(|r| {
        vec![
            COMPARE_SCHEMA.to_string(),
            r.instance.id.clone(),
            r.instance.n.to_string(),
            r.alpha.to_string(),
            r.instance.family.clone(),
            opt(r.instance.l),
            opt(r.instance.n_b),
            fmt(r.sa_bound),
            fmt(r.report.gap),
            fmt(1.0 / r.report.gap),
            fmt(r.report.crossing),
        ]
    });
    run.write_csv(&a.name, &["schema_version", "instance", "n", "alpha", "family", "l", "n_b", "sa_bound", "gap", "inv_gap", "crossing"], rows)?;
    let mut keys: Vec<(String, Option<usize>)> = reports.iter().map(|r| (r.instance.family.clone(), r.instance.l)).collect();
    keys.sort();
    keys.dedup();
    let series: Vec<Series> = keys
        .into_iter()
        .map(|(family, l)| {
            let sel: Vec<&GapOutput> = reports.iter().filter(|r| r.instance.family == family && r.instance.l == l).collect();
            let xs: Vec<f64> = sel.iter().map(|r| r.sa_bound.ln()).collect();
            let ys: Vec<f64> = sel.iter().map(|r| -r.report.gap.ln()).collect();
            Series { family, l, points: sel.len(), slope: slope(&xs, &ys) }
        })
        .collect();
    let stem = a.name.strip_suffix(".csv").unwrap_or(&a.name);
    run.write_json(&format!("{stem}.json"), &json!({ "schema_version": COMPARE_SCHEMA, "series": series }))?;
    run.finish(argv)
}
