//! Run configuration.
//!
//! A config file is flat `key = value` text; `#` starts a comment and blank
//! lines are ignored. Keys match the long flag names, with `-` or `_`:
//!
//! ```text
//! # inputs
//! gamma_ratio = 1e-6
//! abar        = 4          # or: omega0 = 2e9 and accel = 2.4e18
//! theta       = pi/2       # radians; k*pi/n forms are accepted
//! periods     = 1
//! steps       = 1000
//! method      = all        # quadrature | closed_form | first_order | kinematic
//! out         = rho.csv
//! ```
//!
//! Flags override file values. Every rejected field is reported at once.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use accelphase::bath::SPEED_OF_LIGHT;
use accelphase::{AtomBathParams, Method};

use crate::error::{CliError, FieldError, Result};

pub const KEYS: [&str; 17] = [
    "gamma_ratio",
    "abar",
    "omega0",
    "accel",
    "theta",
    "omega_shift",
    "periods",
    "steps",
    "samples",
    "method",
    "oracle",
    "quick",
    "perturb",
    "out",
    "plot",
    "theta_points",
    "abar_values",
];

/// Which subcommand the configuration is validated for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Evolve,
    Phase,
    Diff,
    Sweep,
    Check,
}

impl Command {
    fn needs_abar(self) -> bool {
        matches!(self, Command::Evolve | Command::Phase | Command::Diff)
    }

    fn needs_out(self) -> bool {
        matches!(self, Command::Evolve | Command::Sweep)
    }
}

/// Where the dimensionless acceleration came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AbarSource {
    Direct,
    /// `accel / (c ω₀)` from SI inputs.
    Si {
        omega0: f64,
        accel: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub gamma_ratio: f64,
    /// Resolved `ā`; `None` only for commands that do not need it.
    pub abar: Option<f64>,
    pub abar_source: AbarSource,
    /// Transition frequency in rad/s, used for SI time reports.
    pub omega0: Option<f64>,
    pub theta: f64,
    pub omega_shift: f64,
    pub periods: u32,
    pub steps: usize,
    /// Kinematic-phase samples per quasi-cycle.
    pub samples: usize,
    /// `None` runs every method.
    pub method: Option<Method>,
    pub oracle: bool,
    pub quick: bool,
    /// Added to the rate `A` on the RK4 side of the check suite.
    pub perturb: f64,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    pub theta_points: usize,
    pub abar_values: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            gamma_ratio: 1e-6,
            abar: None,
            abar_source: AbarSource::Direct,
            omega0: None,
            theta: PI / 2.0,
            omega_shift: 0.0,
            periods: 1,
            steps: 1000,
            samples: 100_000,
            method: None,
            oracle: false,
            quick: false,
            perturb: 0.0,
            out: None,
            plot: None,
            theta_points: 33,
            abar_values: Vec::new(),
        }
    }
}

impl RunConfig {
    /// Atom-bath parameters; requires a resolved `ā`.
    pub fn params(&self) -> Result<AtomBathParams> {
        let abar = self.abar.ok_or_else(|| {
            CliError::Validation(vec![FieldError {
                field: "abar".into(),
                reason: "required (or omega0 and accel)".into(),
            }])
        })?;
        Ok(AtomBathParams::new(self.gamma_ratio, abar, self.theta)?
            .with_omega_shift(self.omega_shift)?)
    }

    /// The `ā` grid for a sweep: `abar_values`, else the resolved `ā`, else 4.
    pub fn sweep_abars(&self) -> Vec<f64> {
        if !self.abar_values.is_empty() {
            self.abar_values.clone()
        } else {
            vec![self.abar.unwrap_or(4.0)]
        }
    }
}

/// Reads `key = value` pairs. Later duplicates win.
pub fn parse_config_text(
    text: &str,
) -> std::result::Result<BTreeMap<String, String>, Vec<FieldError>> {
    let mut map = BTreeMap::new();
    let mut errors = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) => {
                map.insert(normalise_key(k), v.trim().to_string());
            }
            None => errors.push(FieldError {
                field: format!("line {}", n + 1),
                reason: format!("expected key = value, got {line:?}"),
            }),
        }
    }
    if errors.is_empty() {
        Ok(map)
    } else {
        Err(errors)
    }
}

fn normalise_key(k: &str) -> String {
    k.trim().to_ascii_lowercase().replace('-', "_")
}

/// Builds a validated config from an optional file and flag overrides.
pub fn load(
    file: Option<&Path>,
    overrides: &[(&str, String)],
    command: Command,
) -> Result<RunConfig> {
    let mut map = match file {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            parse_config_text(&text).map_err(CliError::Validation)?
        }
        None => BTreeMap::new(),
    };
    for (k, v) in overrides {
        map.insert(normalise_key(k), v.clone());
    }
    from_map(&map, command)
}

/// Validates raw key/value pairs, collecting every problem.
pub fn from_map(map: &BTreeMap<String, String>, command: Command) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut errors = Vec::new();
    let mut fail = |field: &str, reason: String| {
        errors.push(FieldError {
            field: field.to_string(),
            reason,
        })
    };

    for key in map.keys() {
        if !KEYS.contains(&key.as_str()) {
            fail(key, "unknown key".into());
        }
    }

    let get = |k: &str| map.get(k).map(String::as_str);

    fn number(v: &str) -> std::result::Result<f64, String> {
        match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(format!("expected a finite number, got {v:?}")),
        }
    }
    fn count(v: &str) -> std::result::Result<usize, String> {
        v.parse::<usize>()
            .map_err(|_| format!("expected a non-negative integer, got {v:?}"))
    }
    fn flag(v: &str) -> std::result::Result<bool, String> {
        match v {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            _ => Err(format!("expected true or false, got {v:?}")),
        }
    }

    if let Some(v) = get("gamma_ratio") {
        match number(v) {
            Ok(x) if x >= 0.0 => cfg.gamma_ratio = x,
            Ok(x) => fail("gamma_ratio", format!("must be >= 0, got {x}")),
            Err(e) => fail("gamma_ratio", e),
        }
    }
    if let Some(v) = get("theta") {
        match parse_angle(v) {
            Some(x) if (0.0..=PI + 1e-15).contains(&x) => cfg.theta = x.min(PI),
            Some(x) => fail("theta", format!("must lie in [0, pi], got {x}")),
            None => fail(
                "theta",
                format!("expected radians or a k*pi/n form, got {v:?}"),
            ),
        }
    }
    if let Some(v) = get("omega_shift") {
        match number(v) {
            Ok(x) if x > -1.0 => cfg.omega_shift = x,
            Ok(x) => fail("omega_shift", format!("must be > -1, got {x}")),
            Err(e) => fail("omega_shift", e),
        }
    }

    let positive = |v: &str| match number(v) {
        Ok(x) if x > 0.0 => Ok(x),
        Ok(x) => Err(format!("must be > 0, got {x}")),
        Err(e) => Err(e),
    };
    let abar = get("abar").map(|v| match number(v) {
        Ok(x) if x >= 0.0 => Ok(x),
        Ok(x) => Err(format!("must be >= 0, got {x}")),
        Err(e) => Err(e),
    });
    let omega0 = get("omega0").map(positive);
    let accel = get("accel").map(|v| match number(v) {
        Ok(x) if x >= 0.0 => Ok(x),
        Ok(x) => Err(format!("must be >= 0, got {x}")),
        Err(e) => Err(e),
    });
    for (field, r) in [("abar", &abar), ("omega0", &omega0), ("accel", &accel)] {
        if let Some(Err(e)) = r {
            fail(field, e.clone());
        }
    }
    let ok = |r: &Option<std::result::Result<f64, String>>| {
        r.as_ref().and_then(|x| x.as_ref().ok().copied())
    };
    cfg.omega0 = ok(&omega0);
    match (abar.is_some(), accel.is_some()) {
        (true, true) => fail(
            "accel",
            "give either abar or omega0 with accel, not both".into(),
        ),
        (true, false) => cfg.abar = ok(&abar),
        (false, true) => {
            if omega0.is_none() {
                fail("omega0", "required when accel is given".into());
            }
            if let (Some(w), Some(a)) = (ok(&omega0), ok(&accel)) {
                cfg.abar = Some(a / (SPEED_OF_LIGHT * w));
                cfg.abar_source = AbarSource::Si {
                    omega0: w,
                    accel: a,
                };
            }
        }
        (false, false) => {
            if command.needs_abar() {
                fail("abar", "required (or omega0 and accel)".into());
            }
        }
    }

    if let Some(v) = get("periods") {
        match count(v) {
            Ok(n) if n >= 1 && n <= u32::MAX as usize => cfg.periods = n as u32,
            Ok(n) => fail("periods", format!("must be >= 1, got {n}")),
            Err(e) => fail("periods", e),
        }
    }
    if let Some(v) = get("steps") {
        match count(v) {
            Ok(n) if n >= 1 => cfg.steps = n,
            Ok(n) => fail("steps", format!("must be >= 1, got {n}")),
            Err(e) => fail("steps", e),
        }
    }
    if let Some(v) = get("samples") {
        match count(v) {
            Ok(n) if n >= 16 => cfg.samples = n,
            Ok(n) => fail("samples", format!("must be >= 16, got {n}")),
            Err(e) => fail("samples", e),
        }
    }
    if let Some(v) = get("theta_points") {
        match count(v) {
            Ok(n) if n >= 2 => cfg.theta_points = n,
            Ok(n) => fail("theta_points", format!("must be >= 2, got {n}")),
            Err(e) => fail("theta_points", e),
        }
    }
    if let Some(v) = get("method") {
        match parse_method(v) {
            Some(m) => cfg.method = m,
            None => fail(
                "method",
                format!(
                    "expected all, quadrature, closed_form, first_order or kinematic, got {v:?}"
                ),
            ),
        }
    }
    for (key, slot) in [("oracle", &mut cfg.oracle), ("quick", &mut cfg.quick)] {
        if let Some(v) = get(key) {
            match flag(v) {
                Ok(b) => *slot = b,
                Err(e) => fail(key, e),
            }
        }
    }
    if let Some(v) = get("perturb") {
        match number(v) {
            Ok(x) => cfg.perturb = x,
            Err(e) => fail("perturb", e),
        }
    }
    if let Some(v) = get("abar_values") {
        let parsed: std::result::Result<Vec<f64>, String> = v
            .split(',')
            .map(|s| match number(s.trim()) {
                Ok(x) if x >= 0.0 => Ok(x),
                Ok(x) => Err(format!("values must be >= 0, got {x}")),
                Err(e) => Err(e),
            })
            .collect();
        match parsed {
            Ok(list) => cfg.abar_values = list,
            Err(e) => fail("abar_values", e),
        }
    }
    cfg.out = get("out").filter(|v| !v.is_empty()).map(PathBuf::from);
    cfg.plot = get("plot").filter(|v| !v.is_empty()).map(PathBuf::from);
    if command.needs_out() && cfg.out.is_none() {
        fail("out", "an output path is required".into());
    }

    if errors.is_empty() {
        Ok(cfg)
    } else {
        Err(CliError::Validation(errors))
    }
}

fn parse_method(v: &str) -> Option<Option<Method>> {
    match v.trim().to_ascii_lowercase().replace('-', "_").as_str() {
        "all" => Some(None),
        "quadrature" => Some(Some(Method::Quadrature)),
        "closed_form" => Some(Some(Method::ClosedForm)),
        "first_order" => Some(Some(Method::FirstOrder)),
        "kinematic" => Some(Some(Method::Kinematic)),
        _ => None,
    }
}

/// Parses radians, also accepting `pi`, `pi/n`, `k*pi` and `k*pi/n`.
pub fn parse_angle(v: &str) -> Option<f64> {
    let v = v.trim();
    if let Ok(x) = v.parse::<f64>() {
        return x.is_finite().then_some(x);
    }
    let v = v.to_ascii_lowercase().replace('π', "pi");
    let (num, den) = match v.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().ok()?),
        None => (v.as_str(), 1.0),
    };
    let coef = num.strip_suffix("pi")?.trim().trim_end_matches('*').trim();
    let coef = if coef.is_empty() {
        1.0
    } else {
        coef.parse::<f64>().ok()?
    };
    let x = coef * PI / den;
    x.is_finite().then_some(x)
}
