//! Run configuration: a TOML document with `[system]`, `[scenario]`,
//! `[numerics]` and `[output]` sections of scalar keys.

use std::fmt;
use std::path::PathBuf;

use toml::{Table, Value};

use crate::manifold::SolverOptions;
use crate::runner::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    CrankSweep,
    Yrast,
    CanonicalCheck,
    IsotropyCheck,
    Scissors,
    AngleShift,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::CrankSweep,
        Scenario::Yrast,
        Scenario::CanonicalCheck,
        Scenario::IsotropyCheck,
        Scenario::Scissors,
        Scenario::AngleShift,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::CrankSweep => "crank-sweep",
            Scenario::Yrast => "yrast",
            Scenario::CanonicalCheck => "canonical-check",
            Scenario::IsotropyCheck => "isotropy-check",
            Scenario::Scissors => "scissors",
            Scenario::AngleShift => "angle-shift",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }

    /// Scenario keys besides `name` that this scenario reads.
    fn keys(self) -> &'static [&'static str] {
        match self {
            Scenario::CrankSweep => &["omega_max", "steps"],
            Scenario::Yrast => &["I_max", "steps"],
            Scenario::CanonicalCheck => &["I_max", "steps", "I", "phi"],
            Scenario::IsotropyCheck | Scenario::Scissors => &[],
            Scenario::AngleShift => &["eta_max", "steps"],
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub z: usize,
    pub n: usize,
    pub degeneracy: u32,
    pub base_frequency: f64,
    pub qq_isoscalar: f64,
    pub qq_isovector: f64,
    pub selfconsistent: bool,
    /// Fixed `(w1, w2, w3)`; overrides the self-consistent frequencies.
    pub frequencies: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub omega_max: Option<f64>,
    pub i_max: Option<f64>,
    pub steps: Option<usize>,
    pub phi: f64,
    pub i: Option<f64>,
    pub eta_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericsConfig {
    pub omega_step: f64,
    pub tangent_step: f64,
    pub angle_step: f64,
    pub restoring_step: f64,
    pub critical_margin: f64,
    pub sweep_points: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        let solver = SolverOptions::default();
        Self {
            omega_step: solver.omega_step,
            tangent_step: 1e-5,
            angle_step: 1e-5,
            restoring_step: crate::scissors::RESTORING_STEP,
            critical_margin: solver.critical_margin,
            sweep_points: solver.sweep_points,
        }
    }
}

impl NumericsConfig {
    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            omega_step: self.omega_step,
            critical_margin: self.critical_margin,
            sweep_points: self.sweep_points,
            ..SolverOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub format: OutputFormat,
    pub path: Option<PathBuf>,
    pub precision: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub scenario: ScenarioConfig,
    pub numerics: NumericsConfig,
    pub output: OutputConfig,
}

const SECTIONS: [&str; 4] = ["system", "scenario", "numerics", "output"];
const SYSTEM_KEYS: [&str; 10] = [
    "Z",
    "N",
    "degeneracy",
    "base_frequency",
    "qq_isoscalar",
    "qq_isovector",
    "selfconsistent",
    "w1",
    "w2",
    "w3",
];
const SCENARIO_KEYS: [&str; 7] = ["name", "omega_max", "I_max", "steps", "phi", "I", "eta_max"];
const NUMERICS_KEYS: [&str; 6] = [
    "omega_step",
    "tangent_step",
    "angle_step",
    "restoring_step",
    "critical_margin",
    "sweep_points",
];
const OUTPUT_KEYS: [&str; 3] = ["format", "path", "precision"];

fn invalid(key: impl Into<String>, message: impl Into<String>) -> RunError {
    RunError::Validation {
        key: key.into(),
        message: message.into(),
    }
}

fn suggestion(word: &str, candidates: &[&str]) -> String {
    candidates
        .iter()
        .map(|c| (strsim::levenshtein(word, c), *c))
        .filter(|(d, c)| *d <= 2.max(c.len() / 3))
        .min()
        .map(|(_, c)| format!("; did you mean `{c}`?"))
        .unwrap_or_default()
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Typed, validated access to one section.
struct Section<'a> {
    name: &'static str,
    table: Option<&'a Table>,
}

impl<'a> Section<'a> {
    fn key(&self, key: &str) -> String {
        format!("{}.{}", self.name, key)
    }

    fn get(&self, key: &str) -> Option<&'a Value> {
        self.table.and_then(|t| t.get(key))
    }

    fn float(&self, key: &str) -> Result<Option<f64>, RunError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Float(v)) if v.is_finite() => Ok(Some(*v)),
            Some(Value::Integer(v)) => Ok(Some(*v as f64)),
            Some(other) => Err(invalid(self.key(key), format!("expected a finite number, got {other}"))),
        }
    }

    fn integer(&self, key: &str) -> Result<Option<i64>, RunError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Integer(v)) => Ok(Some(*v)),
            Some(other) => Err(invalid(self.key(key), format!("expected an integer, got {other}"))),
        }
    }

    fn count(&self, key: &str, min: i64) -> Result<Option<usize>, RunError> {
        match self.integer(key)? {
            None => Ok(None),
            Some(v) if v >= min => Ok(Some(v as usize)),
            Some(v) => Err(invalid(self.key(key), format!("must be at least {min}, got {v}"))),
        }
    }

    fn positive(&self, key: &str) -> Result<Option<f64>, RunError> {
        match self.float(key)? {
            Some(v) if v <= 0.0 => Err(invalid(self.key(key), format!("must be positive, got {v}"))),
            other => Ok(other),
        }
    }

    fn non_negative(&self, key: &str) -> Result<Option<f64>, RunError> {
        match self.float(key)? {
            Some(v) if v < 0.0 => Err(invalid(self.key(key), format!("must be non-negative, got {v}"))),
            other => Ok(other),
        }
    }

    fn string(&self, key: &str) -> Result<Option<&'a str>, RunError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(invalid(self.key(key), format!("expected a string, got {other}"))),
        }
    }

    fn boolean(&self, key: &str) -> Result<Option<bool>, RunError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(*b)),
            Some(other) => Err(invalid(self.key(key), format!("expected true or false, got {other}"))),
        }
    }

    fn reject_unknown(&self, known: &[&str]) -> Result<(), RunError> {
        if let Some(t) = self.table {
            for key in t.keys() {
                if !known.contains(&key.as_str()) {
                    return Err(invalid(self.key(key), format!("unknown key{}", suggestion(key, known))));
                }
            }
        }
        Ok(())
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, RunError> {
    let doc: Table = text.parse().map_err(|e: toml::de::Error| {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        RunError::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    for (key, value) in &doc {
        if !SECTIONS.contains(&key.as_str()) {
            return Err(invalid(key.clone(), format!("unknown section{}", suggestion(key, &SECTIONS))));
        }
        if !value.is_table() {
            return Err(invalid(key.clone(), "expected a [section]"));
        }
    }
    let section = |name: &'static str| Section {
        name,
        table: doc.get(name).and_then(Value::as_table),
    };
    let system = parse_system(&section("system"))?;
    let scenario = parse_scenario(&section("scenario"))?;
    let numerics = parse_numerics(&section("numerics"))?;
    let output = parse_output(&section("output"))?;
    check_particles(&system, scenario.scenario)?;
    Ok(RunConfig {
        system,
        scenario,
        numerics,
        output,
    })
}

fn parse_system(s: &Section) -> Result<SystemConfig, RunError> {
    s.reject_unknown(&SYSTEM_KEYS)?;
    let z = s.count("Z", 0)?.ok_or_else(|| invalid("system.Z", "required"))?;
    let n = s.count("N", 0)?.ok_or_else(|| invalid("system.N", "required"))?;
    let degeneracy = s.count("degeneracy", 1)?.unwrap_or(2);
    let degeneracy = u32::try_from(degeneracy).map_err(|_| invalid("system.degeneracy", "too large"))?;
    let w = [s.positive("w1")?, s.positive("w2")?, s.positive("w3")?];
    let frequencies = match w {
        [None, None, None] => None,
        [Some(a), Some(b), Some(c)] => {
            if b < c {
                return Err(invalid("system.w2", format!("axes are labelled with w2 >= w3, got w2 = {b} < w3 = {c}")));
            }
            Some([a, b, c])
        }
        _ => return Err(invalid("system.w1", "give all of w1, w2, w3 or none")),
    };
    let selfconsistent = match (s.boolean("selfconsistent")?, frequencies) {
        (Some(true), Some(_)) => {
            return Err(invalid("system.selfconsistent", "conflicts with explicit w1, w2, w3"));
        }
        (Some(flag), _) => flag,
        (None, fixed) => fixed.is_none(),
    };
    Ok(SystemConfig {
        z,
        n,
        degeneracy,
        base_frequency: s.positive("base_frequency")?.unwrap_or(1.0),
        qq_isoscalar: s.float("qq_isoscalar")?.unwrap_or(0.0),
        qq_isovector: s.float("qq_isovector")?.unwrap_or(0.0),
        selfconsistent,
        frequencies,
    })
}

fn parse_scenario(s: &Section) -> Result<ScenarioConfig, RunError> {
    s.reject_unknown(&SCENARIO_KEYS)?;
    let name = s.string("name")?.ok_or_else(|| invalid("scenario.name", "required"))?;
    let names: Vec<&str> = Scenario::ALL.iter().map(|s| s.name()).collect();
    let scenario = Scenario::from_name(name)
        .ok_or_else(|| invalid("scenario.name", format!("unknown scenario `{name}`{}", suggestion(name, &names))))?;
    if let Some(t) = s.table {
        for key in t.keys() {
            if key != "name" && !scenario.keys().contains(&key.as_str()) {
                return Err(invalid(s.key(key), format!("not used by scenario {scenario}")));
            }
        }
    }
    let min_steps = match scenario {
        Scenario::CrankSweep => 1,
        Scenario::CanonicalCheck => 3,
        _ => 2,
    };
    let eta_max = s.non_negative("eta_max")?;
    if let Some(e) = eta_max {
        if e >= 1.0 {
            return Err(invalid("scenario.eta_max", format!("must be below 1, got {e}")));
        }
    }
    Ok(ScenarioConfig {
        scenario,
        omega_max: s.non_negative("omega_max")?,
        i_max: s.non_negative("I_max")?,
        steps: s.count("steps", min_steps)?,
        phi: s.float("phi")?.unwrap_or(0.0),
        i: s.non_negative("I")?,
        eta_max,
    })
}

fn parse_numerics(s: &Section) -> Result<NumericsConfig, RunError> {
    s.reject_unknown(&NUMERICS_KEYS)?;
    let d = NumericsConfig::default();
    let margin = s.positive("critical_margin")?.unwrap_or(d.critical_margin);
    if margin >= 1.0 {
        return Err(invalid("numerics.critical_margin", format!("must be below 1, got {margin}")));
    }
    Ok(NumericsConfig {
        omega_step: s.positive("omega_step")?.unwrap_or(d.omega_step),
        tangent_step: s.positive("tangent_step")?.unwrap_or(d.tangent_step),
        angle_step: s.positive("angle_step")?.unwrap_or(d.angle_step),
        restoring_step: s.positive("restoring_step")?.unwrap_or(d.restoring_step),
        critical_margin: margin,
        sweep_points: s.count("sweep_points", 2)?.unwrap_or(d.sweep_points),
    })
}

fn parse_output(s: &Section) -> Result<OutputConfig, RunError> {
    s.reject_unknown(&OUTPUT_KEYS)?;
    let format = match s.string("format")? {
        None | Some("csv") => OutputFormat::Csv,
        Some("json") => OutputFormat::Json,
        Some(other) => return Err(invalid("output.format", format!("expected csv or json, got `{other}`"))),
    };
    let precision = s.count("precision", 1)?.unwrap_or(12);
    if precision > 17 {
        return Err(invalid("output.precision", format!("at most 17 digits, got {precision}")));
    }
    Ok(OutputConfig {
        format,
        path: s.string("path")?.map(PathBuf::from),
        precision,
    })
}

fn check_particles(system: &SystemConfig, scenario: Scenario) -> Result<(), RunError> {
    let d = system.degeneracy as usize;
    if scenario == Scenario::Scissors {
        for (key, count) in [("system.Z", system.z), ("system.N", system.n)] {
            if count == 0 || count % d != 0 {
                return Err(invalid(key, format!("each fluid needs a positive multiple of degeneracy {d}, got {count}")));
            }
        }
    } else {
        let a = system.z + system.n;
        if a == 0 || !a.is_multiple_of(d) {
            return Err(invalid("system.N", format!("Z + N = {a} is not a positive multiple of degeneracy {d}")));
        }
    }
    Ok(())
}
