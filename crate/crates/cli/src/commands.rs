use std::collections::BTreeMap;
use std::path::Path;

use graphlap::{
    check_harnack, check_minimum_principle, cutoff_function, distances_from, form_lower_bound, form_lower_bound_on,
    gauge_to_schrodinger, harnack_certificate, kernel_growth_probe, kl_proxy_check, laplacian_form_lower_bound,
    metric_ball, ray_completeness_diagnostic, ring_estimate_check, run_exhaustion, solve_dirichlet, Completeness,
    DirichletProblem, ErrorClass, ExplicitGraph, GraphFunction, GraphSpec, LaplacianSpec, PathFamily,
    SchrodingerOperator, SeriesVerdict, VertexId, WeightedGraph,
};
use rayon::prelude::*;
use serde_json::json;

use crate::report::{inputs_digest, Row, RunReport, Section, Series, Verdict};
use crate::{CatalogAction, Cli, Command, Common, Failure};

type CmdResult<T> = std::result::Result<T, Failure>;

const RESIDUAL_TOL: f64 = 1e-8;
const KERNEL_TOL: f64 = 1e-12;
const AGMON_TOL: f64 = 1e-10;
const FORM_TOL: f64 = 1e-10;
const FORM_AGREEMENT_TOL: f64 = 1e-8;
const CLASSIFIER_WINDOW: f64 = 0.15;
const DEFAULT_EXHAUSTION_TOL: f64 = 1e-10;
const REFERENCE_TOL: f64 = 1e-6;

struct Input {
    graph: WeightedGraph,
    potential: Option<GraphFunction>,
    family: Option<(PathFamily, VertexId)>,
    files: Vec<Vec<u8>>,
}

fn read_spec(path: &Path) -> CmdResult<(GraphSpec, Vec<u8>)> {
    let bytes = std::fs::read(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|_| Failure::usage(format!("{} is not UTF-8", path.display())))?;
    Ok((GraphSpec::parse(text)?, bytes))
}

fn load_input(c: &Common) -> CmdResult<Input> {
    match (&c.graph, c.family.as_slice()) {
        (Some(_), [_, ..]) => Err(Failure::usage("give either --graph or --family, not both")),
        (Some(path), []) => {
            let (spec, bytes) = read_spec(path)?;
            let n_max = match &spec {
                GraphSpec::Family { family } => Some(family.n_max),
                GraphSpec::Explicit(_) => None,
            };
            let loaded = spec.load()?;
            Ok(Input {
                graph: loaded.graph,
                potential: loaded.potential,
                family: loaded.family.zip(n_max),
                files: vec![bytes],
            })
        }
        (None, [id]) => {
            let fam: PathFamily = id.parse()?;
            let n_max = c.n_max.ok_or_else(|| Failure::usage("--family needs --n-max"))?;
            Ok(Input {
                graph: fam.instantiate(n_max)?,
                potential: None,
                family: Some((fam, n_max)),
                files: Vec::new(),
            })
        }
        (None, []) => Err(Failure::usage("--graph or --family is required")),
        (None, _) => Err(Failure::usage("this command takes a single --family")),
    }
}

/// The Schrödinger operator an input describes, and how it was formed.
fn operator(input: &Input) -> CmdResult<(SchrodingerOperator, &'static str)> {
    if let Some((fam, n_max)) = &input.family {
        return Ok((fam.conjugate_operator(*n_max)?, "family gauge potential in double-double"));
    }
    match &input.potential {
        Some(w) => Ok((SchrodingerOperator::with_potential(&input.graph, w)?, "explicit conductances and potential")),
        None => Ok((
            gauge_to_schrodinger(&LaplacianSpec::new(input.graph.clone()))?,
            "gauge of the weighted Laplacian",
        )),
    }
}

pub fn run(cli: &Cli, argv: Vec<String>) -> CmdResult<()> {
    if let Command::Catalog {
        action: CatalogAction::Emit { id },
    } = &cli.command
    {
        return emit(&cli.common, id);
    }
    let mut tolerances = BTreeMap::new();
    let (section, files) = match &cli.command {
        Command::Inspect => {
            let input = load_input(&cli.common)?;
            (inspect(&input)?, input.files)
        }
        Command::Dirichlet {
            region,
            boundary,
            boundary_value,
        } => {
            tolerances.insert("relative_residual".into(), RESIDUAL_TOL);
            let input = load_input(&cli.common)?;
            (dirichlet(&input, region, boundary.as_deref(), *boundary_value)?, input.files)
        }
        Command::Harmonic { x0, radius, monitor } => {
            let tol = cli.common.tol.unwrap_or(DEFAULT_EXHAUSTION_TOL);
            tolerances.insert("exhaustion_change".into(), tol);
            tolerances.insert("relative_residual".into(), RESIDUAL_TOL);
            let input = load_input(&cli.common)?;
            (harmonic(&input, *x0, *radius, monitor, tol)?, input.files)
        }
        Command::Distance { from, to, radius } => {
            let input = load_input(&cli.common)?;
            (distance(&input, *from, *to, *radius)?, input.files)
        }
        Command::Probe {
            lambda,
            classify_n_max,
            agmon_radius,
        } => {
            for (k, v) in [
                ("kernel_recurrence", KERNEL_TOL),
                ("agmon_identity", AGMON_TOL),
                ("form_bound", FORM_TOL),
                ("form_bound_agreement", FORM_AGREEMENT_TOL),
                ("classifier_window", CLASSIFIER_WINDOW),
            ] {
                tolerances.insert(k.into(), v);
            }
            probe(&cli.common, *lambda, *classify_n_max, *agmon_radius)?
        }
        Command::Catalog { .. } => (catalog_list(), Vec::new()),
    };
    let configuration = json!({ "common": &cli.common, "command": &cli.command });
    let report = RunReport {
        command: argv,
        version: env!("CARGO_PKG_VERSION").to_string(),
        inputs_digest: inputs_digest(&configuration, &files),
        configuration,
        tolerances,
        rows: section.rows,
        verdicts: section.verdicts,
        series: section.series,
    };
    print!("{}", report.table());
    if let Some(path) = &cli.common.out {
        report.write_json(path)?;
    }
    if let Some(dir) = &cli.common.csv {
        report.write_csv(dir)?;
    }
    Ok(())
}

fn inspect(input: &Input) -> CmdResult<Section> {
    let g = &input.graph;
    let (op, source) = operator(input)?;
    let mut s = Section::default();
    let omegas: Vec<f64> = g.vertices().map(|x| g.omega(x)).collect::<graphlap::Result<_>>()?;
    let conds: Vec<f64> = g.edges().map(|e| e.2).collect();
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    s.rows.push(
        Row::new("graph")
            .with("vertices", g.len())
            .with("edges", g.edge_count())
            .with("max_degree", g.max_degree()?)
            .with("connected", g.is_connected())
            .with("frontier", g.frontier().collect::<Vec<_>>())
            .with("omega_min", min(&omegas))
            .with("omega_max", max(&omegas))
            .with("conductance_min", min(&conds))
            .with("conductance_max", max(&conds)),
    );
    if let Some((fam, n_max)) = &input.family {
        let a = fam.asymptotics();
        s.rows.push(
            Row::new("family")
                .with("id", fam.to_string())
                .with("description", fam.description())
                .with("first_vertex", fam.first_vertex())
                .with("n_max", n_max)
                .with("expected_completeness", a.completeness)
                .with("omega_square_summable", a.omega_square_summable)
                .with("potential", a.potential)
                .with("source", a.source),
        );
    }
    let mut series = Series::new(&["vertex", "omega", "potential"]);
    let mut potentials = Vec::new();
    for x in g.vertices() {
        let w = op.potential(x)?;
        potentials.push(w);
        series.rows.push(vec![x as f64, g.omega(x)?, w]);
    }
    let a: Vec<f64> = op.graph().edges().map(|e| e.2).collect();
    s.rows.push(
        Row::new("operator")
            .with("source", source)
            .with("potential_min", min(&potentials))
            .with("potential_max", max(&potentials))
            .with("a_min", min(&a))
            .with("a_max", max(&a)),
    );
    s.series.insert("potential".into(), series);
    Ok(s)
}

fn parse_vertices(text: &str) -> CmdResult<Vec<VertexId>> {
    let bad = || Failure::usage(format!("cannot parse vertex list {text:?}"));
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let (a, b): (VertexId, VertexId) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

fn parse_assignments(text: &str) -> CmdResult<BTreeMap<VertexId, f64>> {
    let bad = || Failure::usage(format!("cannot parse boundary data {text:?}; expected vertex=value,..."));
    let mut out = BTreeMap::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(bad)?;
        out.insert(k.trim().parse().map_err(|_| bad())?, v.trim().parse().map_err(|_| bad())?);
    }
    Ok(out)
}

fn dirichlet(input: &Input, region: &str, boundary: Option<&str>, default_value: f64) -> CmdResult<Section> {
    let (op, source) = operator(input)?;
    let region = input.graph.region(parse_vertices(region)?)?;
    let given = boundary.map(parse_assignments).transpose()?.unwrap_or_default();
    if let Some(x) = given.keys().find(|x| !region.boundary.contains(x)) {
        return Err(graphlap::Error::Input(format!("vertex {x} is not a boundary vertex of the region")).into());
    }
    let data: GraphFunction = region
        .boundary
        .iter()
        .map(|&x| (x, given.get(&x).copied().unwrap_or(default_value)))
        .collect();
    let sol = solve_dirichlet(&DirichletProblem {
        operator: &op,
        region: &region,
        boundary: &data,
    })?;
    let mut s = Section::default();
    s.rows.push(
        Row::new("dirichlet")
            .with("operator", source)
            .with("interior", region.interior.len())
            .with("boundary", region.boundary.len())
            .with("method", sol.method)
            .with("relative_residual", sol.relative_residual)
            .with("absolute_residual", sol.absolute_residual)
            .with("positivity_margin", sol.positivity_margin),
    );
    if region.interior.len() <= 20 {
        let mut row = Row::new("solution");
        for &x in &region.interior {
            row = row.with(&format!("f({x})"), sol.solution.get(x));
        }
        s.rows.push(row);
    }
    let mut series = Series::new(&["vertex", "value", "interior"]);
    for &x in &region.members {
        series.rows.push(vec![x as f64, sol.solution.get(x), f64::from(u8::from(region.interior.contains(&x)))]);
    }
    s.series.insert("solution".into(), series);
    s.verdicts.push(Verdict::pass_fail(
        "interior residual",
        sol.relative_residual <= RESIDUAL_TOL,
        sol.relative_residual,
        RESIDUAL_TOL,
        "dirichlet-unique-solution",
    ));
    s.verdicts.push(Verdict::pass_fail(
        "interior system positive",
        sol.positivity_margin > 1e-12,
        sol.positivity_margin,
        1e-12,
        "dirichlet-positive-system",
    ));
    let nonnegative = data.iter().all(|(_, v)| v >= 0.0) && data.iter().any(|(_, v)| v > 0.0);
    if nonnegative {
        let min = region.interior.iter().map(|&x| sol.solution.get(x)).fold(f64::INFINITY, f64::min);
        s.verdicts.push(Verdict::pass_fail(
            "strict interior positivity",
            min > 0.0,
            min,
            0.0,
            "dirichlet-strict-positivity",
        ));
        match harnack_certificate(&op, &region).and_then(|cert| check_harnack(&op, &region, &sol.solution, &cert)) {
            Ok(h) => s.verdicts.push(Verdict::new(
                "harnack two-sided bound",
                if h.holds { "pass" } else { "fail" },
                Some(h.max_ratio),
                h.k,
                "harnack-certificate",
            )),
            Err(e) => s.rows.push(Row::new("harnack").with("not_applicable", e.to_string())),
        }
    }
    match check_minimum_principle(&op, &region, &sol.solution) {
        Ok(m) => s.verdicts.push(Verdict::new(
            "minimum principle",
            if m.consistent() { "consistent" } else { "violated" },
            Some(m.minimum),
            0.0,
            "minimum-principle",
        )),
        Err(e) if e.class() == ErrorClass::Precondition => {
            s.rows.push(Row::new("minimum_principle").with("not_applicable", e.to_string()))
        }
        Err(e) => return Err(e.into()),
    }
    Ok(s)
}

fn opt(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

fn harmonic(input: &Input, x0: VertexId, radius: Option<usize>, monitor: &[VertexId], tol: f64) -> CmdResult<Section> {
    let (op, source) = operator(input)?;
    let g = &input.graph;
    let radius = match radius {
        Some(r) => r,
        None => g.hops_to_frontier(x0)?.unwrap_or(g.len()),
    };
    let monitored = if monitor.is_empty() { None } else { Some(monitor.to_vec()) };
    let r = run_exhaustion(&op, x0, radius, tol, monitored)?;
    let scale = r.phi.get(x0);
    let mut s = Section::default();
    s.rows.push(
        Row::new("exhaustion")
            .with("operator", source)
            .with("x0", x0)
            .with("max_radius", radius)
            .with("final_radius", r.final_radius)
            .with("converged_at", r.converged_at)
            .with("final_relative_residual", r.final_relative_residual)
            .with("window_violations", r.window_violations),
    );
    let monitored: Vec<VertexId> = r
        .rows
        .iter()
        .rev()
        .find(|row| !row.monitored.is_empty())
        .map(|row| row.monitored.keys().copied().collect())
        .unwrap_or_default();
    let mut row = Row::new("phi_normalized");
    for &x in &monitored {
        row = row.with(&format!("phi({x})"), r.phi.get(x) / scale);
    }
    s.rows.push(row);
    let mut radii = Series::new(&["radius", "psi_x0", "max_delta", "relative_residual", "positivity_margin"]);
    for row in &r.rows {
        radii.rows.push(vec![
            row.radius as f64,
            opt(row.psi_x0),
            opt(row.max_delta),
            opt(row.relative_residual),
            opt(row.positivity_margin),
        ]);
    }
    s.series.insert("radii".into(), radii);
    let mut phi = Series::new(&["vertex", "phi"]);
    for (x, v) in r.phi.iter() {
        phi.rows.push(vec![x as f64, v / scale]);
    }
    s.series.insert("phi".into(), phi);
    let last_delta = r.rows.iter().rev().find_map(|row| row.max_delta);
    s.verdicts.push(Verdict::new(
        "exhaustion stabilized",
        if r.converged() { "converged" } else { "inconclusive" },
        last_delta,
        tol,
        "ground-state-exhaustion",
    ));
    s.verdicts.push(Verdict::pass_fail(
        "harmonic residual on the final ball",
        r.final_relative_residual <= RESIDUAL_TOL,
        r.final_relative_residual,
        RESIDUAL_TOL,
        "p-harmonic-residual",
    ));
    s.verdicts.push(Verdict::pass_fail(
        "values inside harnack windows",
        r.window_violations == 0,
        r.window_violations as f64,
        0.0,
        "harnack-certificate",
    ));
    // on a ray from its true endpoint the harmonic function is unique up to
    // scale, and the gauge weight itself is harmonic for the conjugate operator
    if let Some((fam, _)) = &input.family {
        if x0 == fam.first_vertex() {
            let w0 = g.omega(x0)?;
            let mut worst = 0.0f64;
            for &x in &monitored {
                let reference = g.omega(x)? / w0;
                worst = worst.max((r.phi.get(x) / scale - reference).abs() / reference);
            }
            s.verdicts.push(Verdict::pass_fail(
                "proportional to the vertex weight",
                worst <= REFERENCE_TOL,
                worst,
                REFERENCE_TOL,
                "gauge-weight-harmonic",
            ));
        }
    }
    Ok(s)
}

fn distance(input: &Input, from: VertexId, to: Option<VertexId>, radius: Option<f64>) -> CmdResult<Section> {
    let (op, source) = operator(input)?;
    let g = op.graph();
    let d = distances_from(g, from)?;
    let mut s = Section::default();
    let mut row = Row::new("distance").with("metric", source).with("from", from);
    if let Some(y) = to {
        let dy = *d.get(&y).ok_or(graphlap::Error::UnknownVertex(y))?;
        row = row.with("to", y).with("delta", dy);
    }
    let reachable = d.values().copied().filter(|v| v.is_finite());
    row = row.with("eccentricity", reachable.fold(0.0, f64::max));
    s.rows.push(row);
    let mut series = Series::new(&["vertex", "distance"]);
    for (x, v) in &d {
        series.rows.push(vec![*x as f64, *v]);
    }
    s.series.insert("distances".into(), series);
    if let Some(r) = radius {
        let ball = metric_ball(g, from, r)?;
        let f = cutoff_function(g, from, r)?;
        s.rows.push(
            Row::new("metric_ball")
                .with("radius", r)
                .with("members", ball.members.len())
                .with("cutoff_support", f.nonzero_support().count()),
        );
        let mut cutoff = Series::new(&["vertex", "cutoff"]);
        for (x, v) in f.iter() {
            cutoff.rows.push(vec![x as f64, v]);
        }
        s.series.insert("cutoff".into(), cutoff);
    }
    Ok(s)
}

fn file_stem(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' }).collect()
}

fn probe(
    c: &Common,
    lambda: Option<f64>,
    classify_n_max: u64,
    agmon_radius: Option<f64>,
) -> CmdResult<(Section, Vec<Vec<u8>>)> {
    let mut files = Vec::new();
    let runs: Vec<(PathFamily, VertexId)> = match (&c.graph, c.family.is_empty()) {
        (Some(_), false) => return Err(Failure::usage("give either --graph or --family, not both")),
        (Some(path), true) => {
            let (spec, bytes) = read_spec(path)?;
            files.push(bytes);
            match spec {
                GraphSpec::Family { family } => vec![(family.family()?, family.n_max)],
                GraphSpec::Explicit(_) => {
                    return Err(graphlap::Error::Precondition("probes need a path family record".into()).into())
                }
            }
        }
        (None, false) => {
            let n_max = c.n_max.ok_or_else(|| Failure::usage("--family needs --n-max"))?;
            c.family
                .iter()
                .map(|id| id.parse::<PathFamily>().map(|f| (f, n_max)))
                .collect::<graphlap::Result<_>>()?
        }
        (None, true) => return Err(Failure::usage("--graph or --family is required")),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(c.jobs.max(1))
        .build()
        .map_err(|e| Failure::usage(e.to_string()))?;
    let results: Vec<CmdResult<Section>> = pool.install(|| {
        runs.par_iter()
            .map(|(fam, n_max)| probe_family(fam, *n_max, lambda, classify_n_max, agmon_radius))
            .collect()
    });
    let mut section = Section::default();
    for r in results {
        section.extend(r?);
    }
    Ok((section, files))
}

fn verdict_name<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn probe_family(
    fam: &PathFamily,
    n_max: VertexId,
    lambda: Option<f64>,
    classify_n_max: u64,
    agmon_radius: Option<f64>,
) -> CmdResult<Section> {
    let id = fam.to_string();
    let mut s = Section::default();

    let growth = kernel_growth_probe(fam, lambda, n_max)?;
    s.rows.push(
        Row::new(format!("kernel growth {id}"))
            .with("shift", growth.shift)
            .with("n_max", n_max)
            .with("first_values", &growth.values[..growth.values.len().min(6)])
            .with("monotone_from", growth.monotone_from)
            .with("growth_persists", growth.growth_persists)
            .with("rescalings", growth.rescalings)
            .with("ln_l2_partial_sum", growth.log_l2_partial_sums.last().copied())
            .with("max_relative_residual", growth.max_relative_residual)
            .with("verdict", growth.verdict),
    );
    let mut series = Series::new(&["n", "mantissa", "binary_scale", "ln_abs_v", "ln_l2_partial_sum"]);
    for (i, &m) in growth.values.iter().enumerate() {
        let n = growth.first + i as VertexId;
        series.rows.push(vec![
            n as f64,
            m,
            growth.binary_scale[i] as f64,
            growth.log_abs(n),
            growth.log_l2_partial_sums[i],
        ]);
    }
    s.series.insert(format!("growth-{}", file_stem(&id)), series);
    s.verdicts.push(Verdict::pass_fail(
        &format!("{id}: kernel recurrence residual"),
        growth.max_relative_residual <= KERNEL_TOL,
        growth.max_relative_residual,
        KERNEL_TOL,
        "kernel-growth-recurrence",
    ));
    s.verdicts.push(Verdict::new(
        &format!("{id}: kernel candidate"),
        verdict_name(&growth.verdict),
        growth.log_l2_partial_sums.last().copied(),
        0.0,
        "kernel-growth-mechanism",
    ));

    let comp = ray_completeness_diagnostic(fam, classify_n_max)?;
    let kl = kl_proxy_check(fam, classify_n_max)?;
    s.rows.push(
        Row::new(format!("completeness {id}"))
            .with("series_n_max", classify_n_max)
            .with("exponent", comp.series.exponent)
            .with("log_exponent", comp.series.log_exponent)
            .with("partial_sum", comp.series.partial_sums.last().map(|p| p.1))
            .with("verdict", comp.verdict)
            .with("expected", comp.expected)
            .with("omega_square_exponent", kl.series.exponent)
            .with("omega_square_summable", kl.summable)
            .with("omega_square_expected", kl.expected_summable),
    );
    let comp_name = comp.verdict.map(|v| verdict_name(&v)).unwrap_or_else(|| "inconclusive".into());
    s.verdicts.push(Verdict::new(
        &format!("{id}: metric completeness"),
        comp_name,
        Some(comp.series.exponent),
        CLASSIFIER_WINDOW,
        "metric-completeness-series",
    ));
    s.verdicts.push(Verdict::new(
        &format!("{id}: completeness matches record"),
        if comp.agrees() { "pass" } else { "fail" },
        Some(comp.series.exponent),
        CLASSIFIER_WINDOW,
        "metric-completeness-threshold",
    ));
    s.verdicts.push(Verdict::new(
        &format!("{id}: weight-square sum"),
        match kl.series.verdict {
            SeriesVerdict::Convergent => "finite",
            SeriesVerdict::Divergent => "infinite",
            SeriesVerdict::Inconclusive => "inconclusive",
        },
        Some(kl.series.exponent),
        CLASSIFIER_WINDOW,
        "weight-square-sum-proxy",
    ));

    let h = fam.conjugate_operator(n_max)?;
    let fb = form_lower_bound(&h)?;
    let lb = laplacian_form_lower_bound(&LaplacianSpec::new(fam.instantiate(n_max)?))?;
    let disagreement = (fb.value - lb.value).abs() / fb.value.abs().max(lb.value.abs()).max(f64::MIN_POSITIVE);
    s.rows.push(
        Row::new(format!("form bound {id}"))
            .with("truncation_size", fb.size)
            .with("schrodinger", fb.value)
            .with("weighted_laplacian", lb.value)
            .with("iterations", fb.iterations),
    );
    let bounded = fb.value >= -FORM_TOL;
    s.verdicts.push(Verdict::pass_fail(
        &format!("{id}: form bounded below"),
        bounded,
        fb.value,
        FORM_TOL,
        "form-lower-bound",
    ));
    s.verdicts.push(Verdict::pass_fail(
        &format!("{id}: form bound gauge invariance"),
        disagreement <= FORM_AGREEMENT_TOL,
        disagreement,
        FORM_AGREEMENT_TOL,
        "form-bound-gauge-invariance",
    ));

    let constant_weight = matches!(fam, PathFamily::Constant { .. } | PathFamily::RayPower { .. });
    s.verdicts.push(Verdict::new(
        &format!("{id}: constant-weight criterion hypotheses"),
        if constant_weight { "satisfied" } else { "not-satisfied" },
        None,
        0.0,
        "constant-weight-criterion",
    ));
    let complete = comp.verdict == Some(Completeness::Complete);
    s.verdicts.push(Verdict::new(
        &format!("{id}: complete-metric criterion hypotheses"),
        if complete && bounded { "satisfied" } else { "not-satisfied" },
        Some(fb.value),
        FORM_TOL,
        "complete-metric-criterion",
    ));

    if let Some(radius) = agmon_radius {
        let x0 = fam.first_vertex();
        let outer = metric_ball(h.graph(), x0, radius + 1.0)?;
        let k = form_lower_bound_on(&h, &outer.members)?.value;
        let lam = k - 1.0;
        let v = kernel_growth_probe(fam, Some(-lam), n_max)?.to_function()?;
        let ring = ring_estimate_check(&h, lam, &v, x0, radius)?;
        s.rows.push(
            Row::new(format!("ring estimate {id}"))
                .with("radius", radius)
                .with("lambda", lam)
                .with("form_bound_on_outer_ball", k)
                .with("inner_mass", ring.inner_mass)
                .with("form_value", ring.form_value)
                .with("upper_bound", ring.upper_bound)
                .with("literal_ring_bound", ring.literal_ring_bound)
                .with("agmon_residual", ring.agmon.residual),
        );
        s.verdicts.push(Verdict::pass_fail(
            &format!("{id}: agmon identity"),
            ring.agmon.residual <= AGMON_TOL,
            ring.agmon.residual,
            AGMON_TOL,
            "agmon-identity",
        ));
        s.verdicts.push(Verdict::pass_fail(
            &format!("{id}: ring estimate chain"),
            ring.chain_holds(),
            ring.form_value,
            1e-12,
            "ring-estimate",
        ));
    }
    Ok(s)
}

fn catalog_list() -> Section {
    let mut s = Section::default();
    for fam in PathFamily::builtin() {
        let a = fam.asymptotics();
        s.rows.push(
            Row::new(fam.to_string())
                .with("description", fam.description())
                .with("first_vertex", fam.first_vertex())
                .with("completeness", a.completeness)
                .with("omega_square_summable", a.omega_square_summable)
                .with("potential", a.potential)
                .with("source", a.source),
        );
    }
    s
}

fn emit(c: &Common, id: &str) -> CmdResult<()> {
    let fam: PathFamily = id.parse()?;
    let n_max = c.n_max.ok_or_else(|| Failure::usage("catalog emit needs --n-max"))?;
    let g = fam.instantiate(n_max)?;
    let spec = ExplicitGraph::from_graph(&g, None)?;
    let mut text = serde_json::to_string_pretty(&spec).map_err(std::io::Error::other)?;
    text.push('\n');
    match &c.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_lists() {
        assert_eq!(parse_vertices("1..3, 7").unwrap(), vec![1, 2, 3, 7]);
        assert!(parse_vertices("a").is_err());
        assert_eq!(parse_assignments("1=0.5,3=2").unwrap(), BTreeMap::from([(1, 0.5), (3, 2.0)]));
        assert!(parse_assignments("1:2").is_err());
    }

    #[test]
    fn stems_are_file_safe() {
        assert_eq!(file_stem("power:alpha=1,beta=0.5"), "power_alpha_1_beta_0.5");
    }
}
