//! Scenario dispatch and result tables.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::algebra::Species;
use crate::config::{OutputFormat, RunConfig, Scenario};
use crate::cranking::{diagonalization_residual, normal_modes_oracle, paper_params, OscillatorFrequencies};
use crate::error::Error;
use crate::geometry::{angle_shift_check, canonical_pair_check, isotropy_check};
use crate::manifold::{fill_orbitals, prolate_seed, selfconsistent_frequencies, CrankingProblem, HamiltonianSpec};
use crate::scissors::{build_bdagger, build_two_fluid_with, scissors_frequency};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("`{key}`: {message}")]
    Validation { key: String, message: String },
    #[error("{scenario}: {source}")]
    Domain {
        scenario: String,
        #[source]
        source: Error,
    },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl RunError {
    pub fn class(&self) -> &'static str {
        match self {
            RunError::Parse { .. } => "ParseError",
            RunError::Validation { .. } => "ValidationError",
            RunError::Domain { .. } => "DomainError",
            RunError::Io { .. } => "IoError",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Parse { .. } | RunError::Validation { .. } => 2,
            RunError::Domain { .. } => 3,
            RunError::Io { .. } => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            metadata: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }
}

struct Context {
    scenario: Scenario,
}

impl Context {
    fn domain(&self, source: Error) -> RunError {
        RunError::Domain {
            scenario: self.scenario.name().to_string(),
            source,
        }
    }
}

fn invalid(key: &str, message: impl Into<String>) -> RunError {
    RunError::Validation {
        key: key.to_string(),
        message: message.into(),
    }
}

fn hamiltonian(config: &RunConfig) -> Result<HamiltonianSpec, Error> {
    Ok(HamiltonianSpec {
        qq_isoscalar: config.system.qq_isoscalar,
        qq_isovector: config.system.qq_isovector,
        selfconsistent: config.system.selfconsistent,
        ..HamiltonianSpec::new(config.system.base_frequency)?
    })
}

/// All `Z + N` particles as one fluid in the configured potential.
fn single_fluid(config: &RunConfig) -> Result<CrankingProblem, Error> {
    let sys = &config.system;
    let spec = hamiltonian(config)?;
    let a = sys.z + sys.n;
    let (config_slater, freqs) = match sys.frequencies {
        Some(w) => {
            let f = OscillatorFrequencies::from_array(w)?;
            (fill_orbitals(a, sys.degeneracy, &f, Species::SingleFluid)?, f)
        }
        None if sys.selfconsistent => {
            let seed = prolate_seed(sys.base_frequency);
            let c = fill_orbitals(a, sys.degeneracy, &seed, Species::SingleFluid)?;
            let sol = selfconsistent_frequencies(&spec, &[c])?;
            (sol.configs[0].clone(), sol.freqs)
        }
        None => {
            let f = OscillatorFrequencies::spherical(sys.base_frequency)?;
            (fill_orbitals(a, sys.degeneracy, &f, Species::SingleFluid)?, f)
        }
    };
    CrankingProblem::with_options(config_slater, freqs, config.numerics.solver_options())
}

fn linspace(top: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![top];
    }
    (0..steps).map(|i| top * i as f64 / (steps - 1) as f64).collect()
}

/// Volume-conserving prolate frequencies `(s, s, s⁻²)·ω̄₀` with deformation `η`.
pub fn prolate_frequencies(base: f64, eta: f64) -> Result<OscillatorFrequencies, Error> {
    let s = ((1.0 + eta) / (1.0 - eta)).powf(1.0 / 6.0);
    OscillatorFrequencies::new(base * s, base * s, base / (s * s))
}

pub fn run_scenario(config: &RunConfig) -> Result<ResultTable, RunError> {
    let ctx = Context {
        scenario: config.scenario.scenario,
    };
    let mut table = match ctx.scenario {
        Scenario::CrankSweep => crank_sweep(config, &ctx)?,
        Scenario::Yrast => yrast(config, &ctx)?,
        Scenario::CanonicalCheck => canonical(config, &ctx)?,
        Scenario::IsotropyCheck => isotropy(config, &ctx)?,
        Scenario::Scissors => scissors(config, &ctx)?,
        Scenario::AngleShift => angle_shift(config, &ctx)?,
    };
    let mut meta = metadata(config);
    meta.append(&mut table.metadata);
    table.metadata = meta;
    if table.rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(ctx.domain(Error::InvalidInput("non-finite value in results".into())));
    }
    // Signed zeros print as "-0" in CSV; fold them.
    for v in table.rows.iter_mut().flatten() {
        *v += 0.0;
    }
    Ok(table)
}

fn metadata(config: &RunConfig) -> Vec<(String, String)> {
    let s = &config.system;
    let n = &config.numerics;
    let solver = n.solver_options();
    let mut out = vec![
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("scenario".to_string(), config.scenario.scenario.name().to_string()),
        ("system.Z".to_string(), s.z.to_string()),
        ("system.N".to_string(), s.n.to_string()),
        ("system.degeneracy".to_string(), s.degeneracy.to_string()),
        ("system.base_frequency".to_string(), format!("{:e}", s.base_frequency)),
        ("system.qq_isoscalar".to_string(), format!("{:e}", s.qq_isoscalar)),
        ("system.qq_isovector".to_string(), format!("{:e}", s.qq_isovector)),
        ("system.selfconsistent".to_string(), s.selfconsistent.to_string()),
    ];
    let sc = &config.scenario;
    for (key, value) in [
        ("scenario.omega_max", sc.omega_max),
        ("scenario.I_max", sc.i_max),
        ("scenario.I", sc.i),
        ("scenario.eta_max", sc.eta_max),
    ] {
        if let Some(v) = value {
            out.push((key.to_string(), format!("{v:e}")));
        }
    }
    if let Some(steps) = sc.steps {
        out.push(("scenario.steps".to_string(), steps.to_string()));
    }
    out.push(("scenario.phi".to_string(), format!("{:e}", sc.phi)));
    for (key, value) in [
        ("numerics.omega_step", n.omega_step),
        ("numerics.tangent_step", n.tangent_step),
        ("numerics.angle_step", n.angle_step),
        ("numerics.restoring_step", n.restoring_step),
        ("numerics.critical_margin", n.critical_margin),
        ("numerics.polish_param_tol", solver.polish.param_tol),
        ("numerics.polish_value_tol", solver.polish.value_tol),
        ("numerics.inversion_tol", solver.inversion_tol),
    ] {
        out.push((key.to_string(), format!("{value:e}")));
    }
    out.push(("numerics.sweep_points".to_string(), n.sweep_points.to_string()));
    out
}

fn record_frequencies(table: &mut ResultTable, freqs: &OscillatorFrequencies) {
    let w = freqs.w();
    table.meta("frequencies", format!("{:e} {:e} {:e}", w[0], w[1], w[2]));
    table.meta("critical_frequency", format!("{:e}", w[1].min(w[2])));
}

fn crank_sweep(config: &RunConfig, ctx: &Context) -> Result<ResultTable, RunError> {
    let problem = single_fluid(config).map_err(|e| ctx.domain(e))?;
    let crit = problem.critical_frequency();
    let omega_max = config.scenario.omega_max.unwrap_or(0.9 * crit);
    if omega_max >= crit {
        return Err(invalid(
            "scenario.omega_max",
            format!("{omega_max} is not below the critical frequency {crit}"),
        ));
    }
    let mut table = ResultTable::new(&[
        "omega",
        "J",
        "energy",
        "lambda",
        "theta2",
        "theta3",
        "Omega_plus_oracle",
        "Omega_minus_oracle",
        "Omega2_paper",
        "Omega3_paper",
        "diag_residual",
        "stable",
    ]);
    record_frequencies(&mut table, problem.freqs());
    for omega in linspace(omega_max, config.scenario.steps.unwrap_or(21)) {
        let s = problem.solve(omega).map_err(|e| ctx.domain(e))?;
        let params = paper_params(problem.freqs(), omega);
        let modes = normal_modes_oracle(problem.freqs(), omega);
        let diag = diagonalization_residual(&params, problem.freqs()).map_err(|e| ctx.domain(e))?;
        let paper = params.frequencies();
        table.push(vec![
            omega,
            s.angular_momentum,
            s.energy,
            s.trial.lambda,
            s.trial.theta[1],
            s.trial.theta[2],
            modes.omega_plus,
            modes.omega_minus,
            paper[1],
            paper[2],
            diag.residual,
            f64::from(u8::from(params.stable && modes.stable)),
        ]);
    }
    Ok(table)
}

fn checked_i_max(config: &RunConfig, problem: &CrankingProblem, ctx: &Context) -> Result<f64, RunError> {
    let max = problem.max_angular_momentum().map_err(|e| ctx.domain(e))?;
    let i_max = config.scenario.i_max.unwrap_or(0.8 * max);
    if i_max > max {
        return Err(invalid(
            "scenario.I_max",
            format!("{i_max} exceeds the largest attainable angular momentum {max}"),
        ));
    }
    Ok(i_max)
}

fn yrast(config: &RunConfig, ctx: &Context) -> Result<ResultTable, RunError> {
    let problem = single_fluid(config).map_err(|e| ctx.domain(e))?;
    let i_max = checked_i_max(config, &problem, ctx)?;
    let mut table = ResultTable::new(&["I", "omega_I", "energy", "lambda", "theta2", "theta3"]);
    record_frequencies(&mut table, problem.freqs());
    let curve = problem
        .yrast(i_max, config.scenario.steps.unwrap_or(21))
        .map_err(|e| ctx.domain(e))?;
    for s in curve {
        table.push(vec![
            s.angular_momentum,
            s.omega,
            s.energy,
            s.trial.lambda,
            s.trial.theta[1],
            s.trial.theta[2],
        ]);
    }
    Ok(table)
}

fn canonical(config: &RunConfig, ctx: &Context) -> Result<ResultTable, RunError> {
    let problem = single_fluid(config).map_err(|e| ctx.domain(e))?;
    let points = match config.scenario.i {
        Some(i) => {
            let max = problem.max_angular_momentum().map_err(|e| ctx.domain(e))?;
            if i > max {
                return Err(invalid("scenario.I", format!("{i} exceeds the largest attainable angular momentum {max}")));
            }
            vec![i]
        }
        None => {
            let i_max = checked_i_max(config, &problem, ctx)?;
            let grid = linspace(i_max, config.scenario.steps.unwrap_or(11));
            grid[1..grid.len() - 1].to_vec()
        }
    };
    let mut table = ResultTable::new(&["I", "omega_form_value", "deviation_from_1"]);
    record_frequencies(&mut table, problem.freqs());
    for i in points {
        let v = canonical_pair_check(&problem, i, config.scenario.phi, config.numerics.tangent_step)
            .map_err(|e| ctx.domain(e))?;
        table.push(vec![i, v, (v - 1.0).abs()]);
    }
    Ok(table)
}

fn isotropy(config: &RunConfig, ctx: &Context) -> Result<ResultTable, RunError> {
    let problem = single_fluid(config).map_err(|e| ctx.domain(e))?;
    let state = problem.solve(0.0).map_err(|e| ctx.domain(e))?;
    let report = isotropy_check(&state).map_err(|e| ctx.domain(e))?;
    let mut table = ResultTable::new(&["k", "expect_Lk", "max_pairwise_form"]);
    record_frequencies(&mut table, problem.freqs());
    for k in 0..3 {
        let lk = crate::algebra::expectation(&problem.generators().l[k], &state.map, &state.config)
            .map_err(|e| ctx.domain(e))?;
        table.push(vec![(k + 1) as f64, lk, report.max_pairing]);
    }
    Ok(table)
}

fn scissors(config: &RunConfig, ctx: &Context) -> Result<ResultTable, RunError> {
    let spec = hamiltonian(config).map_err(|e| ctx.domain(e))?;
    let s = &config.system;
    let mut sys = build_two_fluid_with(&spec, s.z, s.n, s.degeneracy, config.numerics.solver_options())
        .map_err(|e| ctx.domain(e))?;
    sys.restoring_step = config.numerics.restoring_step;
    let partial = scissors_frequency(&sys).map_err(|e| ctx.domain(e))?;
    let r = build_bdagger(&sys, &partial).map_err(|e| ctx.domain(e))?;
    let mut table = ResultTable::new(&[
        "inertia_p",
        "inertia_n",
        "restoring_C",
        "Omega",
        "a_p",
        "a_n",
        "norm_residual",
        "decouple_residual",
    ]);
    record_frequencies(&mut table, &sys.freqs);
    table.meta("harmonic_ratio", format!("{:e}", r.harmonic_ratio));
    table.push(vec![
        r.inertia_p,
        r.inertia_n,
        r.restoring_c,
        r.omega,
        r.a_p,
        r.a_n,
        r.norm_residual,
        r.decouple_residual,
    ]);
    Ok(table)
}

fn angle_shift(config: &RunConfig, ctx: &Context) -> Result<ResultTable, RunError> {
    let reference = single_fluid(config).map_err(|e| ctx.domain(e))?;
    let slater = reference.config().clone();
    let mut table = ResultTable::new(&["deformation_eta", "analytic_rate", "numeric_rate", "difference"]);
    let eta_max = config.scenario.eta_max.unwrap_or(0.5);
    for eta in linspace(eta_max, config.scenario.steps.unwrap_or(11)) {
        let freqs = prolate_frequencies(config.system.base_frequency, eta).map_err(|e| ctx.domain(e))?;
        let problem = CrankingProblem::with_options(slater.clone(), freqs, config.numerics.solver_options())
            .map_err(|e| ctx.domain(e))?;
        let state = problem.solve(0.0).map_err(|e| ctx.domain(e))?;
        let shift = angle_shift_check(&state, config.numerics.angle_step).map_err(|e| ctx.domain(e))?;
        table.push(vec![
            freqs.eta(),
            shift.analytic,
            shift.numeric,
            (shift.analytic - shift.numeric).abs(),
        ]);
    }
    Ok(table)
}

/// Serializes a table. CSV uses fixed-precision scientific notation; JSON
/// keeps full round-trip precision.
pub fn emit(table: &ResultTable, format: OutputFormat, precision: usize) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = String::new();
            for (k, v) in &table.metadata {
                let _ = writeln!(out, "# {k} = {v}");
            }
            out.push_str(&table.columns.join(","));
            out.push('\n');
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:.precision$e}")).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out
        }
        OutputFormat::Json => {
            let metadata: Map<String, Value> = table
                .metadata
                .iter()
                .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                .collect();
            let doc = json!({
                "metadata": metadata,
                "columns": table.columns,
                "rows": table.rows,
            });
            let mut text = serde_json::to_string_pretty(&doc).expect("finite values serialize");
            text.push('\n');
            text
        }
    }
}

pub fn write_output(text: &str, path: Option<&Path>) -> Result<(), RunError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| RunError::Io {
            path: p.display().to_string(),
            message: e.to_string(),
        }),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes()).map_err(|e| RunError::Io {
                path: "<stdout>".into(),
                message: e.to_string(),
            })
        }
    }
}
