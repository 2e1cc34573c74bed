use std::path::Path;

use serde::Serialize;

use authtel::cert::{
    self, classical_crossing, default_alpha, figure2_rows, fidelity_bound, measurement_alpha,
    measurement_selftest_fidelity, AlphaSource, CertError, CertificateParams, FidelityCertificate, FormulaIds,
    PlanBounds, Range,
};
use authtel::npa::{build_moment_problem, default_words, export_sdpa, read_sdpa, to_sdp_instance, Objective, ProblemSpec, WordList};
use authtel::protosim::{soundness_experiment, ExperimentConfig, ExperimentSummary, SourceSpec};
use authtel::sdp::{derive_alpha as fit_curve, min_fidelity_curve, solve, CurvePoint, SdpStatus, SolutionReport, Tolerances};
use authtel::{Inequality, Trust};

use crate::output::{csv_header, write_csv, write_json, Envelope, SCHEMA};
use crate::{
    CertArgs, CertifyArgs, CliError, DeriveArgs, ExportArgs, FigureArgs, Format, PlanArgs, SimulateArgs, SolveArgs,
    SolverArgs, Status,
};

/// ε grid used for derived constants unless overridden.
pub const DEFAULT_GRID: [f64; 5] = [0.01, 0.02, 0.05, 0.1, 0.2];

fn envelope<'a, C: Serialize, R: Serialize>(
    command: &'a str,
    config: &'a C,
    seed: Option<u64>,
    formulas: Vec<String>,
    result: R,
) -> Envelope<'a, C, R> {
    Envelope { schema: SCHEMA, version: authtel::VERSION, command, config, seed, formulas, result }
}

fn formula_list(ids: &FormulaIds) -> Vec<String> {
    vec![ids.bound.clone(), ids.copies.clone(), ids.tail.clone()]
}

fn default_inequality(trust: Trust) -> Inequality {
    match trust {
        Trust::OneSided => Inequality::Steering,
        Trust::DeviceIndependent => Inequality::Chsh,
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// ε from either `--epsilon` or `--violation`.
fn resolve_epsilon(epsilon: Option<f64>, violation: Option<f64>, inequality: Inequality) -> Result<Option<f64>, CliError> {
    match (epsilon, violation) {
        (Some(_), Some(_)) => Err(usage("give either --epsilon or --violation, not both")),
        (Some(e), None) => Ok(Some(e)),
        (None, Some(v)) => Ok(Some(inequality.max_value() - v)),
        (None, None) => Ok(None),
    }
}

fn solver_tolerances(s: &SolverArgs) -> Tolerances {
    let d = Tolerances::default();
    Tolerances {
        gap: s.gap_tol.unwrap_or(d.gap),
        residual: s.residual_tol.unwrap_or(d.residual),
        max_iterations: s.max_iterations.unwrap_or(d.max_iterations),
    }
}

/// State constant from a fresh minimum-fidelity curve on [`DEFAULT_GRID`].
fn sdp_state_alpha(trust: Trust, inequality: Inequality) -> Result<f64, CliError> {
    let words = default_words(trust);
    let curve = min_fidelity_curve(trust, Objective::State, inequality, &DEFAULT_GRID, &words, &Tolerances::default())?;
    Ok(fit_curve(curve)?.alpha)
}

fn resolve_alpha(
    trust: Trust,
    inequality: Inequality,
    alpha: Option<f64>,
    source: Option<AlphaSource>,
) -> Result<(f64, AlphaSource), CliError> {
    let published = || default_alpha(trust, inequality).ok_or(CliError::Cert(CertError::Unsupported));
    match (source, alpha) {
        (None, None) | (Some(AlphaSource::PaperDefault), None) => Ok((published()?, AlphaSource::PaperDefault)),
        (None, Some(a)) | (Some(AlphaSource::Explicit), Some(a)) => Ok((a, AlphaSource::Explicit)),
        (Some(AlphaSource::Explicit), None) => Err(usage("--alpha-source explicit needs --alpha")),
        (Some(AlphaSource::SdpDerived), None) => Ok((sdp_state_alpha(trust, inequality)?, AlphaSource::SdpDerived)),
        (Some(s), Some(_)) => Err(usage(format!("--alpha conflicts with --alpha-source {}", s.as_str()))),
    }
}

/// Fully specified certificate parameters; `q` and ε are required.
fn resolve_params(c: &CertArgs) -> Result<CertificateParams, CliError> {
    let trust = c.trust.unwrap_or(Trust::OneSided);
    let inequality = c.inequality.unwrap_or(default_inequality(trust));
    let epsilon = resolve_epsilon(c.epsilon, c.violation, inequality)?.ok_or_else(|| usage("--epsilon or --violation is required"))?;
    let q = c.q.ok_or_else(|| usage("--q is required"))?;
    let (alpha, source) = resolve_alpha(trust, inequality, c.alpha, c.alpha_source)?;
    let params = CertificateParams {
        trust,
        inequality,
        iid: c.iid.unwrap_or(true),
        epsilon,
        q,
        x: c.x.unwrap_or(1.0),
        alpha,
        alpha_source: source,
    };
    params.validate()?;
    Ok(params)
}

#[derive(Debug, Serialize)]
struct PlanConfig {
    trust: Trust,
    inequality: Inequality,
    iid: bool,
    target_fidelity: f64,
    target_probability: f64,
    bounds: PlanBounds,
    alpha: f64,
    alpha_source: AlphaSource,
    table_points: usize,
    format: Format,
}

#[derive(Debug, Clone, Serialize)]
struct PlanRow {
    kind: &'static str,
    epsilon: f64,
    violation: f64,
    q: f64,
    x: f64,
    copies: u64,
    fidelity: f64,
    probability: f64,
}

impl PlanRow {
    fn of(kind: &'static str, c: &FidelityCertificate) -> Self {
        let p = &c.params;
        PlanRow {
            kind,
            epsilon: p.epsilon,
            violation: p.inequality.max_value() - p.epsilon,
            q: p.q,
            x: p.x,
            copies: c.copies,
            fidelity: c.fidelity,
            probability: c.probability,
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
enum PlanResult {
    Feasible { plan: Box<cert::Plan>, table: Vec<PlanRow> },
    Infeasible { binding: cert::Binding, detail: String, table: Vec<PlanRow> },
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 || lo == hi {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

pub fn plan(a: PlanArgs) -> Result<Status, CliError> {
    let trust = a.cert.trust.unwrap_or(Trust::OneSided);
    let inequality = a.cert.inequality.unwrap_or(default_inequality(trust));
    let iid = a.cert.iid.unwrap_or(true);
    let (alpha, alpha_source) = resolve_alpha(trust, inequality, a.cert.alpha, a.cert.alpha_source)?;
    let epsilon = match resolve_epsilon(a.cert.epsilon, a.cert.violation, inequality)? {
        Some(e) => Range::Fixed(e),
        None => Range::Between(a.epsilon_min.unwrap_or(1e-4), a.epsilon_max.unwrap_or(0.999)),
    };
    let q = match a.cert.q {
        Some(q) => Range::Fixed(q),
        None => Range::Between(1.0, a.q_max.unwrap_or(1e4)),
    };
    let x = match (a.cert.x, a.x_max) {
        (Some(x), _) => Range::Fixed(x),
        (None, Some(hi)) => Range::Between(0.1, hi),
        (None, None) => Range::Fixed(1.0),
    };
    let config = PlanConfig {
        trust,
        inequality,
        iid,
        target_fidelity: a.target_fidelity.unwrap_or(2.0 / 3.0),
        target_probability: a.target_probability.unwrap_or(0.0),
        bounds: PlanBounds { epsilon, q, x, max_copies: a.max_copies },
        alpha,
        alpha_source,
        table_points: a.table_points.unwrap_or(12),
        format: a.format.unwrap_or(Format::Json),
    };
    let run = |bounds: &PlanBounds| {
        cert::plan(config.target_fidelity, config.target_probability, trust, inequality, iid, Some((alpha, alpha_source)), bounds)
    };
    let mut table = Vec::new();
    if let Range::Between(lo, hi) = epsilon {
        for e in log_grid(lo, hi, config.table_points) {
            if let Ok(p) = run(&PlanBounds { epsilon: Range::Fixed(e), ..config.bounds }) {
                table.push(PlanRow::of("table", &p.certificate));
            }
        }
    }
    let outcome = run(&config.bounds);
    let formulas = match &outcome {
        Ok(p) => formula_list(&p.certificate.formula),
        Err(_) => Vec::new(),
    };
    let (result, status) = match outcome {
        Ok(p) => {
            let mut rows = vec![PlanRow::of("optimum", &p.certificate)];
            rows.extend(table.iter().cloned());
            (PlanResult::Feasible { plan: Box::new(p), table: rows }, Status::Success)
        }
        Err(CertError::Infeasible { binding, detail }) => {
            let msg = format!("infeasible ({binding}): {detail}");
            (PlanResult::Infeasible { binding, detail, table: table.clone() }, Status::Negative(msg))
        }
        Err(e) => return Err(e.into()),
    };
    match config.format {
        Format::Json => write_json(a.out.as_deref(), &envelope("plan", &config, None, formulas, &result))?,
        Format::Csv => {
            let rows = match &result {
                PlanResult::Feasible { table, .. } | PlanResult::Infeasible { table, .. } => table,
            };
            let mut comments = csv_header("plan", &config, None, &formulas)?;
            if let PlanResult::Infeasible { binding, detail, .. } = &result {
                comments.push(format!("infeasible {binding}: {detail}"));
            }
            write_csv(a.out.as_deref(), &comments, rows)?
        }
    }
    Ok(status)
}

#[derive(Debug, Serialize)]
struct CertifyRow {
    epsilon: f64,
    violation: f64,
    q: f64,
    x: f64,
    alpha: f64,
    alpha_source: AlphaSource,
    copies: u64,
    deviation: f64,
    fidelity: f64,
    probability: f64,
    vacuous: bool,
    measurement_fidelity: Option<f64>,
}

#[derive(Debug, Serialize)]
struct CertifyResult {
    certificate: cert::CertificateDocument,
    /// Measurement self-test bound at the same violation, where defined for the setting.
    measurement_fidelity: Option<f64>,
}

pub fn certify(a: CertifyArgs) -> Result<Status, CliError> {
    let params = resolve_params(&a.cert)?;
    let format = a.format.unwrap_or(Format::Json);
    let c = fidelity_bound(&params)?;
    let violation = params.inequality.max_value() - params.epsilon;
    let measurement_fidelity = match (params.trust, params.inequality) {
        (Trust::OneSided, Inequality::Steering) | (Trust::DeviceIndependent, Inequality::Chsh) => {
            Some(measurement_selftest_fidelity(violation, params.trust)?)
        }
        _ => None,
    };
    let formulas = formula_list(&c.formula);
    #[derive(Serialize)]
    struct Config {
        params: CertificateParams,
        format: Format,
    }
    let config = Config { params, format };
    match format {
        Format::Json => {
            let result = CertifyResult { certificate: cert::CertificateDocument::new(c.clone()), measurement_fidelity };
            write_json(a.out.as_deref(), &envelope("certify", &config, None, formulas, result))?
        }
        Format::Csv => {
            let row = CertifyRow {
                epsilon: params.epsilon,
                violation,
                q: params.q,
                x: params.x,
                alpha: params.alpha,
                alpha_source: params.alpha_source,
                copies: c.copies,
                deviation: c.deviation,
                fidelity: c.fidelity,
                probability: c.probability,
                vacuous: c.vacuous,
                measurement_fidelity,
            };
            write_csv(a.out.as_deref(), &csv_header("certify", &config, None, &formulas)?, &[row])?
        }
    }
    Ok(if c.vacuous { Status::Negative("certificate is vacuous at these parameters".into()) } else { Status::Success })
}

fn source_spec(a: &SimulateArgs) -> Result<SourceSpec, CliError> {
    let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| usage(format!("this source needs --{flag}")));
    Ok(match a.source.as_deref().unwrap_or("honest-ideal") {
        "honest-ideal" | "honest" => SourceSpec::HonestIdeal,
        "werner" => SourceSpec::Werner { visibility: need(a.visibility, "visibility")? },
        "one-bad-pair" => SourceSpec::OneBadPair { bad_visibility: a.bad_visibility.unwrap_or(0.0) },
        "drifting" => SourceSpec::Drifting {
            start: need(a.start, "start")?,
            end: need(a.end, "end")?,
            levels: a.levels.unwrap_or(16),
        },
        other => return Err(usage(format!("unknown source `{other}`"))),
    })
}

#[derive(Debug, Serialize)]
struct SimulateConfig {
    params: CertificateParams,
    source: SourceSpec,
    experiment: ExperimentConfig,
}

#[derive(Debug, Serialize)]
struct SimulateResult<'a> {
    schema: &'static str,
    summary: &'a ExperimentSummary,
}

pub fn simulate(a: SimulateArgs) -> Result<Status, CliError> {
    let params = resolve_params(&a.cert)?;
    let spec = source_spec(&a)?;
    let experiment = ExperimentConfig {
        trials: a.trials.unwrap_or(100),
        seed: a.seed.unwrap_or(0),
        teleport_inputs: a.teleport_inputs.unwrap_or(0),
    };
    let config = SimulateConfig { params, source: spec, experiment };
    let report = soundness_experiment(&spec.build()?, &params, &experiment)?;
    let formulas = formula_list(&fidelity_bound(&params)?.formula);
    if let Some(path) = a.csv.as_deref() {
        let comments = csv_header("simulate", &config, Some(experiment.seed), &formulas)?;
        let mut out = crate::output::sink(Some(path))?;
        report.write_csv(&mut out, &comments)?;
    }
    let result = SimulateResult { schema: authtel::protosim::SCHEMA, summary: &report.summary };
    write_json(a.out.as_deref(), &envelope("simulate", &config, Some(experiment.seed), formulas, result))?;
    let s = &report.summary;
    Ok(if s.bound_honored {
        Status::Success
    } else {
        Status::Negative(format!(
            "bound violated in {:.4} of accepted runs, above {:.4} + {:.4}",
            s.violation_fraction, s.failure_probability, s.margin
        ))
    })
}

#[derive(Debug, Serialize)]
struct DeriveConfig {
    trust: Trust,
    inequality: Inequality,
    objective: String,
    grid: Vec<f64>,
    tolerances: Tolerances,
}

#[derive(Debug, Serialize)]
struct CurveRow {
    objective: Objective,
    epsilon: f64,
    f_min: Option<f64>,
    status: SdpStatus,
    primal_objective: f64,
    dual_objective: f64,
    gap: f64,
    iterations: usize,
}

#[derive(Debug, Serialize)]
struct ObjectiveAlpha {
    objective: Objective,
    alpha: Option<f64>,
    binding_epsilon: Option<f64>,
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct DeriveResult {
    alpha: Option<f64>,
    published: Option<f64>,
    relative_deviation: Option<f64>,
    /// `√(2α)`, the matching trace-distance coefficient.
    trace_distance_coefficient: Option<f64>,
    objectives: Vec<ObjectiveAlpha>,
}

fn parse_objectives(name: &str, trust: Trust) -> Result<Vec<Objective>, CliError> {
    if name.eq_ignore_ascii_case("measurement") {
        return Ok(Objective::for_trust(trust).iter().copied().filter(|o| o.is_measurement()).collect());
    }
    let o: Objective = name.parse()?;
    if !Objective::for_trust(trust).contains(&o) {
        return Err(usage(format!("objective {} is not defined for {}", o.as_str(), trust.as_str())));
    }
    Ok(vec![o])
}

pub fn derive_alpha(a: DeriveArgs) -> Result<Status, CliError> {
    let trust = a.trust.unwrap_or(Trust::OneSided);
    let inequality = a.inequality.unwrap_or(default_inequality(trust));
    let config = DeriveConfig {
        trust,
        inequality,
        objective: a.objective.clone().unwrap_or_else(|| "state".into()),
        grid: a.grid.clone().unwrap_or_else(|| DEFAULT_GRID.to_vec()),
        tolerances: solver_tolerances(&a.solver),
    };
    let objectives = parse_objectives(&config.objective, trust)?;
    let words = default_words(trust);
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for &objective in &objectives {
        let curve: Vec<CurvePoint> = min_fidelity_curve(trust, objective, inequality, &config.grid, &words, &config.tolerances)?;
        rows.extend(curve.iter().map(|p| CurveRow {
            objective,
            epsilon: p.epsilon,
            f_min: p.f_min,
            status: p.status,
            primal_objective: p.primal_objective,
            dual_objective: p.dual_objective,
            gap: p.gap,
            iterations: p.iterations,
        }));
        fits.push(match fit_curve(curve) {
            Ok(d) => ObjectiveAlpha { objective, alpha: Some(d.alpha), binding_epsilon: Some(d.binding_epsilon), error: None },
            Err(e) => ObjectiveAlpha { objective, alpha: None, binding_epsilon: None, error: Some(e.to_string()) },
        });
    }
    let failed: Vec<String> = fits.iter().filter_map(|f| f.error.clone()).collect();
    let alpha = failed.is_empty().then(|| fits.iter().filter_map(|f| f.alpha).fold(f64::NEG_INFINITY, f64::max));
    let published = if objectives.iter().any(|o| o.is_measurement()) {
        Some(measurement_alpha(trust))
    } else {
        default_alpha(trust, inequality)
    };
    let result = DeriveResult {
        alpha,
        published,
        relative_deviation: alpha.zip(published).map(|(a, p)| (a - p) / p),
        trace_distance_coefficient: alpha.map(|a| (2.0 * a).sqrt()),
        objectives: fits,
    };
    if let Some(path) = a.csv.as_deref() {
        write_csv(Some(path), &csv_header("derive-alpha", &config, None, &[])?, &rows)?;
    }
    write_json(a.out.as_deref(), &envelope("derive-alpha", &config, None, Vec::new(), &result))?;
    Ok(if failed.is_empty() { Status::Success } else { Status::Negative(format!("no certified constant: {}", failed.join("; "))) })
}

#[derive(Debug, Serialize)]
struct ExportSummary {
    gamma_size: usize,
    block: usize,
    moments: usize,
    constraints: usize,
    equal: usize,
    adjoint: usize,
    self_adjoint: usize,
    normalization: usize,
    sdp_dimension: usize,
    sdp_constraints: usize,
}

pub fn npa_export(a: ExportArgs) -> Result<Status, CliError> {
    let trust = a.trust.unwrap_or(Trust::OneSided);
    let inequality = a.inequality.unwrap_or(default_inequality(trust));
    let objective: Objective = a.objective.as_deref().unwrap_or("state").parse()?;
    let epsilon = resolve_epsilon(a.epsilon, a.violation, inequality)?.unwrap_or(0.0);
    let out = a.out.as_deref().ok_or_else(|| usage("--out is required"))?;
    let words = match a.words.as_deref() {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            let list = WordList::from_json(&text)?;
            if list.trust != trust {
                return Err(usage(format!("word list is for {}, not {}", list.trust.as_str(), trust.as_str())));
            }
            list.words
        }
        None => default_words(trust),
    };
    let problem = build_moment_problem(trust, &words, objective, inequality, inequality.max_value() - epsilon)?;
    export_sdpa(&problem, out)?;
    let instance = to_sdp_instance(&problem);
    let (equal, adjoint, self_adjoint, normalization) = problem.constraint_breakdown();
    let summary = ExportSummary {
        gamma_size: problem.size(),
        block: problem.block(),
        moments: problem.moments.len(),
        constraints: problem.constraints.len(),
        equal,
        adjoint,
        self_adjoint,
        normalization,
        sdp_dimension: instance.dim,
        sdp_constraints: instance.constraints.len(),
    };
    let config = ProblemSpec::of(&problem);
    write_json(a.summary.as_deref(), &envelope("npa-export", &config, None, Vec::new(), &summary))?;
    Ok(Status::Success)
}

#[derive(Debug, Serialize)]
struct SolveResult {
    problem: Option<ProblemSpec>,
    report: SolutionReport,
}

pub fn sdp_solve(a: SolveArgs) -> Result<Status, CliError> {
    let input: &Path = a.input.as_deref().ok_or_else(|| usage("--input is required"))?;
    let text = std::fs::read_to_string(input).map_err(|e| CliError::Io(format!("{}: {e}", input.display())))?;
    let doc = read_sdpa(&text)?;
    let tolerances = solver_tolerances(&a.solver);
    let sol = solve(&doc.instance, &tolerances);
    #[derive(Serialize)]
    struct Config {
        tolerances: Tolerances,
        include_matrices: bool,
    }
    let config = Config { tolerances, include_matrices: a.include_matrices.unwrap_or(false) };
    let status = sol.status;
    let result = SolveResult { problem: doc.spec, report: sol.report(config.include_matrices) };
    write_json(a.out.as_deref(), &envelope("sdp-solve", &config, None, Vec::new(), &result))?;
    Ok(if status == SdpStatus::Optimal {
        Status::Success
    } else {
        Status::Negative(format!("solver finished with status {}", serde_json::to_string(&status)?))
    })
}

#[derive(Debug, Serialize)]
struct FigureConfig {
    trusts: Vec<Trust>,
    inequality: Inequality,
    q_iid: f64,
    q_noniid: f64,
    x: f64,
    alpha: Option<f64>,
    grid: Vec<f64>,
    format: Format,
}

#[derive(Debug, Clone, Serialize)]
pub struct Crossing {
    pub trust: Trust,
    pub regime: &'static str,
    pub epsilon: f64,
    pub violation: f64,
    pub bracket: (f64, f64),
}

#[derive(Debug, Serialize)]
struct FigureResult {
    rows: Vec<cert::Figure2Row>,
    crossings: Vec<Crossing>,
    monotone: bool,
}

fn monotone(rows: &[cert::Figure2Row]) -> bool {
    rows.windows(2).all(|w| {
        w[0].trust != w[1].trust
            || (w[1].f_iid <= w[0].f_iid
                && w[1].f_noniid <= w[0].f_noniid
                && w[1].k_iid <= w[0].k_iid
                && w[1].k_noniid <= w[0].k_noniid)
    })
}

pub fn figure2(a: FigureArgs) -> Result<Status, CliError> {
    let inequality = a.inequality.unwrap_or(Inequality::Chsh);
    let trusts = match (a.trust, inequality) {
        (Some(t), _) => vec![t],
        (None, Inequality::Chsh) => vec![Trust::OneSided, Trust::DeviceIndependent],
        (None, Inequality::Steering) => vec![Trust::OneSided],
    };
    let (lo, hi, n) = (a.epsilon_min.unwrap_or(0.005), a.epsilon_max.unwrap_or(0.5), a.points.unwrap_or(100));
    if !(lo > 0.0 && hi < 1.0 && lo < hi && n >= 2) {
        return Err(usage("grid needs 0 < epsilon-min < epsilon-max < 1 and at least 2 points"));
    }
    let config = FigureConfig {
        trusts,
        inequality,
        q_iid: a.q_iid.unwrap_or(35.0),
        q_noniid: a.q_noniid.unwrap_or(20.0),
        x: a.x.unwrap_or(1.0),
        alpha: a.alpha,
        grid: (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
        format: a.format.unwrap_or(Format::Csv),
    };
    let alpha = config.alpha.map(|v| (v, AlphaSource::Explicit));
    let mut rows = Vec::new();
    let mut crossings = Vec::new();
    let mut formulas = Vec::new();
    for &trust in &config.trusts {
        let r = figure2_rows(trust, inequality, alpha, &config.grid, config.q_iid, config.q_noniid, config.x)?;
        for (regime, pick) in [("iid", true), ("noniid", false)] {
            let pts: Vec<(f64, f64)> = r.iter().map(|row| (row.epsilon, if pick { row.f_iid } else { row.f_noniid })).collect();
            if let Some((epsilon, bracket)) = classical_crossing(&pts) {
                crossings.push(Crossing { trust, regime, epsilon, violation: inequality.max_value() - epsilon, bracket });
            }
        }
        rows.extend(r);
    }
    for iid in [true, false] {
        let p = CertificateParams::new(config.trusts[0], inequality, iid, 0.1, 1.0, 1.0)?;
        formulas.extend(formula_list(&fidelity_bound(&p)?.formula));
    }
    let result = FigureResult { monotone: monotone(&rows), rows, crossings };
    match config.format {
        Format::Json => write_json(a.out.as_deref(), &envelope("figure2", &config, None, formulas, &result))?,
        Format::Csv => {
            let mut comments = csv_header("figure2", &config, None, &formulas)?;
            for c in &result.crossings {
                comments.push(format!(
                    "crossing {} {} epsilon {:.6} violation {:.6} between {} and {}",
                    c.trust.as_str(),
                    c.regime,
                    c.epsilon,
                    c.violation,
                    c.bracket.0,
                    c.bracket.1
                ));
            }
            write_csv(a.out.as_deref(), &comments, &result.rows)?
        }
    }
    Ok(Status::Success)
}
