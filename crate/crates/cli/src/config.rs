//! TOML scenario configs and their translation to core scenarios.
//!
//! ```toml
//! name = "two_qubits"
//! audits = ["zero_temperature:B", "conservation"]
//!
//! [[subsystems]]
//! label = "A"
//! dim = 2
//! hamiltonian = "qubit(1.0)"
//! initial = "gibbs(0.5)"
//!
//! [[subsystems]]
//! label = "B"
//! dim = 3
//! hamiltonian = "oscillator(3, 1.0)"
//! initial = { pure = { re = [0.7071067811865476, 0.0, 0.7071067811865476] } }
//!
//! [[couplings]]
//! strength = 0.15
//! factors = ["A:sigma_plus", "B:a"]
//! hermitian_conjugate = true
//!
//! [times]
//! t_end = 40.0
//! points = 201
//! ```
//!
//! A config either names a `preset` or declares `[[subsystems]]`, never
//! both. Matrices are `{ re = [[...]], im = [[...]] }` with `im` optional.

use std::path::Path;

use effthermo_core::dynamics::LocalOperator;
use effthermo_core::ergotropy::SearchConfig;
use effthermo_core::laws::Tolerances;
use effthermo_core::qmat::{CMatrix, DEFAULT_DIM_CAP};
use effthermo_core::scenarios::{
    preset, AuditSpec, CouplingSpec, HamiltonianSpec, LocalState, Scenario, SubsystemSpec, TimeGrid,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audits: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subsystems: Vec<SubsystemConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub couplings: Vec<CouplingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<TimesConfig>,
    #[serde(default, skip_serializing_if = "ToleranceConfig::is_empty")]
    pub tolerances: ToleranceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsystemConfig {
    pub label: String,
    pub dim: usize,
    /// `"qubit(ω)"`, `"oscillator(levels, ω)"`, `{ levels = [...] }` or a
    /// matrix.
    pub hamiltonian: toml::Value,
    /// `"ground"`, `"excited"`, `"level(k)"`, `"gibbs(β)"`,
    /// `"temperature(T)"`, `{ pure = {re, im} }` or `{ matrix = {re, im} }`.
    pub initial: toml::Value,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strength: Option<f64>,
    /// `"label:operator"` entries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub hermitian_conjugate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixConfig {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorConfig {
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimesConfig {
    pub t_end: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inequality: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonnegativity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_conservation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy_conservation: Option<f64>,
}

impl ToleranceConfig {
    fn is_empty(&self) -> bool {
        *self == ToleranceConfig::default()
    }

    pub fn apply(&self, base: Tolerances) -> Result<Tolerances, CliError> {
        let pick = |name: &str, v: Option<f64>, d: f64| match v {
            Some(x) if !(x >= 0.0 && x.is_finite()) => {
                Err(CliError::config(format!("tolerances.{name}"), format!("must be a nonnegative number, got {x}")))
            }
            Some(x) => Ok(x),
            None => Ok(d),
        };
        Ok(Tolerances {
            identity: pick("identity", self.identity, base.identity)?,
            inequality: pick("inequality", self.inequality, base.inequality)?,
            nonnegativity: pick("nonnegativity", self.nonnegativity, base.nonnegativity)?,
            energy_conservation: pick("energy_conservation", self.energy_conservation, base.energy_conservation)?,
            entropy_conservation: pick("entropy_conservation", self.entropy_conservation, base.entropy_conservation)?,
        })
    }
}

/// Parameter names: `g` (every product coupling), `g_<i>` (coupling `i`),
/// `T_<label>` / `beta_<label>` (Gibbs initial state), `omega_<label>`,
/// `t_end`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: String,
    pub values: Vec<f64>,
    /// Evaluation time of the zero-temperature limit table; defaults to the
    /// end of the time grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Parse(m) => CliError::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Parse(e.to_string()))
    }

    /// Builds the scenario this config describes. `seed` overrides the
    /// config's own seed for random presets.
    pub fn scenario(&self, seed: Option<u64>) -> Result<Scenario, CliError> {
        let mut scenario = match (&self.preset, self.subsystems.is_empty()) {
            (Some(_), false) => {
                return Err(CliError::config("preset", "a config names a preset or declares [[subsystems]], not both"))
            }
            (None, true) => {
                return Err(CliError::config("subsystems", "no scenario: set `preset` or declare [[subsystems]]"))
            }
            (Some(name), true) => {
                if !self.couplings.is_empty() {
                    return Err(CliError::config("couplings", "couplings cannot be added to a preset"));
                }
                preset(name, seed.or(self.seed).unwrap_or(0)).map_err(|e| CliError::config("preset", e.to_string()))?
            }
            (None, false) => self.declared()?,
        };
        if let Some(name) = &self.name {
            scenario.name = name.clone();
        }
        if let Some(t) = self.times {
            scenario.times = TimeGrid { t_end: t.t_end, points: t.points };
        }
        if let Some(audits) = &self.audits {
            scenario.audits = audits
                .iter()
                .enumerate()
                .map(|(k, a)| parse_audit(a).map_err(|m| CliError::config(format!("audits[{k}]"), m)))
                .collect::<Result<_, _>>()?;
        }
        if let Some(cap) = self.dim_cap {
            scenario.dim_cap = cap;
        }
        Ok(scenario)
    }

    fn declared(&self) -> Result<Scenario, CliError> {
        let mut subsystems = Vec::with_capacity(self.subsystems.len());
        for (k, s) in self.subsystems.iter().enumerate() {
            let at = |field: &str| format!("subsystems[{k}].{field}");
            if s.dim == 0 {
                return Err(CliError::config(at("dim"), "must be at least 1"));
            }
            let hamiltonian = parse_hamiltonian(&s.hamiltonian).map_err(|m| CliError::config(at("hamiltonian"), m))?;
            if hamiltonian.dim() != s.dim {
                return Err(CliError::config(
                    at("hamiltonian"),
                    format!("has dimension {} but dim = {}", hamiltonian.dim(), s.dim),
                ));
            }
            let initial = parse_initial(&s.initial, s.dim).map_err(|m| CliError::config(at("initial"), m))?;
            subsystems.push(SubsystemSpec { label: s.label.clone(), hamiltonian, initial });
        }
        let mut couplings = Vec::with_capacity(self.couplings.len());
        for (k, c) in self.couplings.iter().enumerate() {
            couplings.push(parse_coupling(c).map_err(|(field, m)| CliError::config(format!("couplings[{k}].{field}"), m))?);
        }
        let times = self.times.ok_or_else(|| CliError::config("times", "missing [times] section"))?;
        Ok(Scenario {
            name: self.name.clone().unwrap_or_else(|| "scenario".into()),
            subsystems,
            couplings,
            times: TimeGrid { t_end: times.t_end, points: times.points },
            audits: vec![AuditSpec::Conservation],
            dim_cap: self.dim_cap.unwrap_or(DEFAULT_DIM_CAP),
        })
    }

    /// Full declarative config of a scenario (no preset reference).
    pub fn from_scenario(s: &Scenario) -> Self {
        ConfigFile {
            name: Some(s.name.clone()),
            preset: None,
            seed: None,
            dim_cap: (s.dim_cap != DEFAULT_DIM_CAP).then_some(s.dim_cap),
            audits: Some(s.audits.iter().map(format_audit).collect()),
            subsystems: s
                .subsystems
                .iter()
                .map(|sub| SubsystemConfig {
                    label: sub.label.clone(),
                    dim: sub.hamiltonian.dim(),
                    hamiltonian: format_hamiltonian(&sub.hamiltonian),
                    initial: format_initial(&sub.initial),
                })
                .collect(),
            couplings: s.couplings.iter().map(format_coupling).collect(),
            times: Some(TimesConfig { t_end: s.times.t_end, points: s.times.points }),
            tolerances: ToleranceConfig::default(),
            sweep: None,
        }
    }
}

/// `name(arg, arg, ...)` or a bare `name`.
fn call_syntax(s: &str) -> Result<(&str, Vec<&str>), String> {
    let s = s.trim();
    match s.find('(') {
        None => Ok((s, Vec::new())),
        Some(open) => {
            let inner = s[open + 1..].strip_suffix(')').ok_or_else(|| format!("unbalanced parentheses in `{s}`"))?;
            let args = if inner.trim().is_empty() { Vec::new() } else { inner.split(',').map(str::trim).collect() };
            Ok((s[..open].trim(), args))
        }
    }
}

fn number(arg: &str) -> Result<f64, String> {
    arg.parse::<f64>().map_err(|_| format!("`{arg}` is not a number"))
}

fn expect_args<'a>(name: &str, args: &'a [&'a str], n: usize) -> Result<&'a [&'a str], String> {
    if args.len() != n {
        return Err(format!("`{name}` takes {n} argument(s), got {}", args.len()));
    }
    Ok(args)
}

fn complex_matrix(m: &MatrixConfig) -> Result<CMatrix, String> {
    let n = m.re.len();
    if n == 0 || m.re.iter().any(|row| row.len() != n) {
        return Err("`re` must be a nonempty square matrix".into());
    }
    if let Some(im) = &m.im {
        if im.len() != n || im.iter().any(|row| row.len() != n) {
            return Err("`im` must have the same shape as `re`".into());
        }
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        Complex64::new(m.re[i][j], m.im.as_ref().map_or(0.0, |im| im[i][j]))
    }))
}

fn complex_vector(v: &VectorConfig) -> Result<Vec<Complex64>, String> {
    if let Some(im) = &v.im {
        if im.len() != v.re.len() {
            return Err("`im` must have the same length as `re`".into());
        }
    }
    Ok(v.re.iter().enumerate().map(|(k, &re)| Complex64::new(re, v.im.as_ref().map_or(0.0, |im| im[k]))).collect())
}

fn matrix_config(m: &CMatrix) -> MatrixConfig {
    let re = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect()).collect();
    let has_im = m.iter().any(|z| z.im != 0.0);
    let im = has_im.then(|| (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].im).collect()).collect());
    MatrixConfig { re, im }
}

fn to_value<T: Serialize>(v: &T) -> toml::Value {
    toml::Value::try_from(v).expect("config values serialize")
}

fn table<T: Serialize>(key: &str, v: &T) -> toml::Value {
    let mut t = toml::Table::new();
    t.insert(key.into(), to_value(v));
    toml::Value::Table(t)
}

pub fn parse_hamiltonian(v: &toml::Value) -> Result<HamiltonianSpec, String> {
    match v {
        toml::Value::String(s) => {
            let (name, args) = call_syntax(s)?;
            match name {
                "qubit" => Ok(HamiltonianSpec::Qubit { omega: number(expect_args(name, &args, 1)?[0])? }),
                "oscillator" => {
                    let a = expect_args(name, &args, 2)?;
                    let levels = a[0].parse::<usize>().map_err(|_| format!("`{}` is not a level count", a[0]))?;
                    Ok(HamiltonianSpec::Oscillator { levels, omega: number(a[1])? })
                }
                "levels" => Ok(HamiltonianSpec::Levels(args.iter().map(|a| number(a)).collect::<Result<_, _>>()?)),
                other => Err(format!("unknown Hamiltonian `{other}`; use qubit(ω), oscillator(levels, ω), levels(...) or a matrix")),
            }
        }
        toml::Value::Table(t) if t.contains_key("levels") => {
            #[derive(Deserialize)]
            #[serde(deny_unknown_fields)]
            struct Levels {
                levels: Vec<f64>,
            }
            let l: Levels = v.clone().try_into().map_err(|e: toml::de::Error| e.message().to_string())?;
            Ok(HamiltonianSpec::Levels(l.levels))
        }
        toml::Value::Table(_) => {
            let m: MatrixConfig = v.clone().try_into().map_err(|e: toml::de::Error| e.message().to_string())?;
            Ok(HamiltonianSpec::Matrix(complex_matrix(&m)?))
        }
        _ => Err("expected a string such as \"qubit(1.0)\" or a matrix table".into()),
    }
}

fn format_hamiltonian(h: &HamiltonianSpec) -> toml::Value {
    match h {
        HamiltonianSpec::Qubit { omega } => toml::Value::String(format!("qubit({omega:?})")),
        HamiltonianSpec::Oscillator { levels, omega } => toml::Value::String(format!("oscillator({levels}, {omega:?})")),
        HamiltonianSpec::Levels(l) => table("levels", l),
        HamiltonianSpec::Matrix(m) => to_value(&matrix_config(m)),
    }
}

pub fn parse_initial(v: &toml::Value, dim: usize) -> Result<LocalState, String> {
    let state = match v {
        toml::Value::String(s) => {
            let (name, args) = call_syntax(s)?;
            match name {
                "ground" => {
                    expect_args(name, &args, 0)?;
                    LocalState::Ground
                }
                "excited" => {
                    expect_args(name, &args, 0)?;
                    LocalState::Level(1)
                }
                "level" => {
                    let a = expect_args(name, &args, 1)?[0];
                    LocalState::Level(a.parse().map_err(|_| format!("`{a}` is not a level index"))?)
                }
                "gibbs" => LocalState::Gibbs { beta: number(expect_args(name, &args, 1)?[0])? },
                "temperature" => {
                    let t = number(expect_args(name, &args, 1)?[0])?;
                    LocalState::Gibbs { beta: inverse_temperature(t)? }
                }
                "maximally_mixed" => {
                    expect_args(name, &args, 0)?;
                    LocalState::Gibbs { beta: 0.0 }
                }
                other => {
                    return Err(format!(
                        "unknown initial state `{other}`; use ground, excited, level(k), gibbs(β), temperature(T), maximally_mixed, {{pure = ...}} or {{matrix = ...}}"
                    ))
                }
            }
        }
        toml::Value::Table(t) => {
            #[derive(Deserialize)]
            #[serde(deny_unknown_fields)]
            struct InitialTable {
                pure: Option<VectorConfig>,
                matrix: Option<MatrixConfig>,
            }
            let parsed: InitialTable = toml::Value::Table(t.clone())
                .try_into()
                .map_err(|e: toml::de::Error| e.message().to_string())?;
            match (parsed.pure, parsed.matrix) {
                (Some(p), None) => LocalState::Pure(complex_vector(&p)?),
                (None, Some(m)) => LocalState::Matrix(complex_matrix(&m)?),
                _ => return Err("give exactly one of `pure` or `matrix`".into()),
            }
        }
        _ => return Err("expected a string such as \"ground\" or a table".into()),
    };
    let n = match &state {
        LocalState::Pure(a) => Some(a.len()),
        LocalState::Matrix(m) => Some(m.nrows()),
        LocalState::Level(k) if *k >= dim => return Err(format!("level {k} does not exist for dim = {dim}")),
        _ => None,
    };
    if let Some(n) = n {
        if n != dim {
            return Err(format!("has dimension {n} but dim = {dim}"));
        }
    }
    Ok(state)
}

fn inverse_temperature(t: f64) -> Result<f64, String> {
    if t.is_nan() || t < 0.0 {
        return Err(format!("temperature must be nonnegative, got {t}"));
    }
    Ok(if t == 0.0 { f64::INFINITY } else { 1.0 / t })
}

fn format_initial(s: &LocalState) -> toml::Value {
    match s {
        LocalState::Gibbs { beta } => toml::Value::String(format!("gibbs({beta:?})")),
        LocalState::Ground => toml::Value::String("ground".into()),
        LocalState::Level(k) => toml::Value::String(format!("level({k})")),
        LocalState::Pure(a) => {
            let re = a.iter().map(|z| z.re).collect();
            let im = a.iter().any(|z| z.im != 0.0).then(|| a.iter().map(|z| z.im).collect());
            table("pure", &VectorConfig { re, im })
        }
        LocalState::Matrix(m) => table("matrix", &matrix_config(m)),
    }
}

fn parse_coupling(c: &CouplingConfig) -> Result<CouplingSpec, (&'static str, String)> {
    match (&c.matrix, &c.factors) {
        (Some(_), Some(_)) => Err(("matrix", "give either `matrix` or `factors`, not both".into())),
        (Some(m), None) => {
            if c.strength.is_some() || c.hermitian_conjugate {
                return Err(("matrix", "`strength` and `hermitian_conjugate` apply to `factors` only".into()));
            }
            Ok(CouplingSpec::Matrix(complex_matrix(m).map_err(|e| ("matrix", e))?))
        }
        (None, None) => Err(("factors", "missing field `factors` (or `matrix`)".into())),
        (None, Some(factors)) => {
            let strength = c.strength.ok_or(("strength", "missing field `strength`".to_string()))?;
            let factors = factors
                .iter()
                .map(|f| {
                    let (label, op) = f
                        .split_once(':')
                        .ok_or(("factors", format!("`{f}` is not of the form label:operator")))?;
                    let op = LocalOperator::parse(op.trim()).map_err(|e| ("factors", e.to_string()))?;
                    Ok((label.trim().to_string(), op))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if factors.is_empty() {
                return Err(("factors", "needs at least one factor".into()));
            }
            Ok(CouplingSpec::Product { strength, factors, hermitian_conjugate: c.hermitian_conjugate })
        }
    }
}

fn format_coupling(c: &CouplingSpec) -> CouplingConfig {
    match c {
        CouplingSpec::Product { strength, factors, hermitian_conjugate } => CouplingConfig {
            strength: Some(*strength),
            factors: Some(factors.iter().map(|(l, op)| format!("{l}:{}", op.name())).collect()),
            hermitian_conjugate: *hermitian_conjugate,
            matrix: None,
        },
        CouplingSpec::Matrix(m) => CouplingConfig { matrix: Some(matrix_config(m)), ..CouplingConfig::default() },
    }
}

/// `kind` or `kind:subsystem`; `ergotropy_decay(grid, iterations, shrink)`
/// sets the search.
pub fn parse_audit(s: &str) -> Result<AuditSpec, String> {
    let (head, subsystem) = match s.split_once(':') {
        Some((h, l)) => (h.trim(), Some(l.trim().to_string())),
        None => (s.trim(), None),
    };
    let (name, args) = call_syntax(head)?;
    let need = |sub: Option<String>| sub.ok_or_else(|| format!("`{name}` needs a subsystem, e.g. `{name}:B`"));
    let none = |sub: &Option<String>| match sub {
        Some(_) => Err(format!("`{name}` does not take a subsystem")),
        None => Ok(()),
    };
    if name != "ergotropy_decay" && !args.is_empty() {
        return Err(format!("`{name}` takes no arguments"));
    }
    match name {
        "entropy_production" => Ok(AuditSpec::EntropyProduction { subsystem: need(subsystem)? }),
        "zero_temperature" => Ok(AuditSpec::ZeroTemperature { subsystem: need(subsystem)? }),
        "thermodynamic_identity" => Ok(AuditSpec::ThermodynamicIdentity { subsystem: need(subsystem)? }),
        "multipartite" => none(&subsystem).map(|_| AuditSpec::Multipartite),
        "conservation" | "ledger" => none(&subsystem).map(|_| AuditSpec::Conservation),
        "ergotropy_decay" => {
            none(&subsystem)?;
            let mut search = SearchConfig::default();
            match args.len() {
                0 => {}
                n @ (3 | 4) => {
                    search.grid_points = args[0].parse().map_err(|_| format!("`{}` is not a point count", args[0]))?;
                    search.iterations = args[1].parse().map_err(|_| format!("`{}` is not an iteration count", args[1]))?;
                    search.shrink = number(args[2])?;
                    if n == 4 {
                        search.starts = args[3].parse().map_err(|_| format!("`{}` is not a start count", args[3]))?;
                    }
                }
                n => return Err(format!("`ergotropy_decay` takes 0, 3 or 4 arguments, got {n}")),
            }
            Ok(AuditSpec::ErgotropyDecay { search })
        }
        other => Err(format!(
            "unknown audit `{other}`; known: entropy_production, zero_temperature, thermodynamic_identity, multipartite, conservation, ergotropy_decay"
        )),
    }
}

pub fn format_audit(a: &AuditSpec) -> String {
    match a {
        AuditSpec::EntropyProduction { subsystem }
        | AuditSpec::ZeroTemperature { subsystem }
        | AuditSpec::ThermodynamicIdentity { subsystem } => format!("{}:{subsystem}", a.kind()),
        AuditSpec::ErgotropyDecay { search } => {
            format!(
                "ergotropy_decay({}, {}, {:?}, {})",
                search.grid_points, search.iterations, search.shrink, search.starts
            )
        }
        _ => a.kind().to_string(),
    }
}

/// Sets a sweep parameter on a copy of the scenario.
pub fn apply_parameter(base: &Scenario, parameter: &str, value: f64) -> Result<Scenario, String> {
    let mut s = base.clone();
    let sub = |s: &mut Scenario, label: &str| -> Result<usize, String> {
        s.index_of(label).map_err(|_| format!("sweep parameter `{parameter}` names unknown subsystem `{label}`"))
    };
    if parameter == "t_end" {
        s.times.t_end = value;
    } else if parameter == "g" {
        let mut any = false;
        for c in &mut s.couplings {
            if let CouplingSpec::Product { strength, .. } = c {
                *strength = value;
                any = true;
            }
        }
        if !any {
            return Err("sweep parameter `g` needs at least one product coupling".into());
        }
    } else if let Some(i) = parameter.strip_prefix("g_") {
        let i: usize = i.parse().map_err(|_| format!("`{parameter}`: expected g_<coupling index>"))?;
        match s.couplings.get_mut(i) {
            Some(CouplingSpec::Product { strength, .. }) => *strength = value,
            Some(CouplingSpec::Matrix(_)) => return Err(format!("coupling {i} is a matrix and has no strength")),
            None => return Err(format!("sweep parameter `{parameter}`: no coupling {i}")),
        }
    } else if let Some(label) = parameter.strip_prefix("T_") {
        let k = sub(&mut s, label)?;
        s.subsystems[k].initial = LocalState::Gibbs { beta: inverse_temperature(value)? };
    } else if let Some(label) = parameter.strip_prefix("beta_") {
        let k = sub(&mut s, label)?;
        s.subsystems[k].initial = LocalState::Gibbs { beta: value };
    } else if let Some(label) = parameter.strip_prefix("omega_") {
        let k = sub(&mut s, label)?;
        match &mut s.subsystems[k].hamiltonian {
            HamiltonianSpec::Qubit { omega } | HamiltonianSpec::Oscillator { omega, .. } => *omega = value,
            _ => return Err(format!("subsystem `{label}` has no frequency parameter")),
        }
    } else {
        return Err(format!(
            "unknown sweep parameter `{parameter}`; use g, g_<i>, T_<label>, beta_<label>, omega_<label> or t_end"
        ));
    }
    Ok(s)
}
