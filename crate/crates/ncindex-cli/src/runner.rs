use std::fmt;
use std::time::Instant;

use ncindex::indexengines::{
    mckean_singer, pairing_index, residue_index, IndexReport, PairingMode,
};
use ncindex::models::{
    circle_triple, circle_unitary, circle_unitary_cyclic, moyal_projection_mask, moyal_triple,
    torus_triple, FourierPolynomial, KClass, Parity, SpectralTriple,
};

use crate::config::{ConfigError, KeyValues};

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    UnknownModel(String),
    UnknownClass(String),
    UnknownMethod(String),
    Engine(ncindex::Error),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::UnknownModel(m) => {
                write!(f, "unknown model {m:?}: expected one of circle, torus, moyal")
            }
            RunError::UnknownClass(c) => write!(
                f,
                "unknown class {c:?}: expected winding (odd models) or modes (even models)"
            ),
            RunError::UnknownMethod(m) => write!(
                f,
                "unknown method {m:?}: expected compression, trace-power, no-double, residue or mckean-singer"
            ),
            RunError::Engine(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<ncindex::Error> for RunError {
    fn from(e: ncindex::Error) -> Self {
        RunError::Engine(e)
    }
}

/// A validated run: model, class, method list and tolerances.
pub struct RunSpec {
    pub triple: SpectralTriple,
    pub class: KClass,
    pub methods: Vec<String>,
    pub mu: f64,
    pub eps: f64,
    pub tol_scale: f64,
    pub seed: u64,
}

fn method_tolerance(method: &str) -> f64 {
    match method {
        "compression" | "trace-power" | "no-double" => 0.1,
        _ => 0.3,
    }
}

fn log_level() -> u8 {
    match std::env::var("NCINDEX_LOG").as_deref() {
        Ok("debug") => 2,
        Ok("info") => 1,
        _ => 0,
    }
}

macro_rules! info {
    ($($arg:tt)*) => {
        if log_level() >= 1 {
            eprintln!($($arg)*);
        }
    };
}

/// Build and validate a run from parsed key-values.
pub fn build_run(kv: &KeyValues, method_override: Option<&str>, tol_scale: f64) -> Result<RunSpec, RunError> {
    let kind = kv.require("model.kind")?;
    let n = kv.get_usize("model.n")?.unwrap_or(16);
    let theta = kv.get_f64("model.theta", 1.0)?;
    let triple = match kind {
        "circle" => circle_triple(n, &[FourierPolynomial::monomial("u", 1)])?,
        "torus" => {
            let p = kv.get_usize("model.p")?.unwrap_or(1);
            torus_triple(p, n, theta)?
        }
        "moyal" => {
            let th = kv.get_f64("model.theta", 2.0)?;
            moyal_triple(n, th)?
        }
        other => return Err(RunError::UnknownModel(other.to_string())),
    };

    let class_kind = kv.require("class.kind")?;
    let class = match class_kind {
        "winding" => {
            let w: i64 = kv
                .require("class.winding")?
                .parse()
                .map_err(|_| RunError::UnknownClass("class.winding not an integer".into()))?;
            KClass::Unitary {
                name: format!("winding{w}"),
                mat: circle_unitary(n, w)?,
                cyclic: Some(circle_unitary_cyclic(n, w)),
            }
        }
        "modes" => {
            let modes: Vec<usize> = kv
                .require("class.modes")?
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| RunError::UnknownClass("class.modes not a list of integers".into()))?;
            KClass::Projection {
                name: format!("p{{{}}}", modes.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",")),
                mask: moyal_projection_mask(n, &modes),
            }
        }
        other => return Err(RunError::UnknownClass(other.to_string())),
    };

    // parity compatibility before any computation
    if class.parity() != triple.parity {
        return Err(RunError::Engine(ncindex::Error::ParityMismatch(format!(
            "{} class on {} model",
            class.name(),
            triple.name
        ))));
    }

    let methods_text = match method_override {
        Some(m) => m.to_string(),
        None => kv.get("methods").unwrap_or("compression").to_string(),
    };
    let methods: Vec<String> = methods_text
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    for m in &methods {
        match m.as_str() {
            "compression" | "trace-power" | "no-double" | "residue" | "mckean-singer" => {}
            other => return Err(RunError::UnknownMethod(other.to_string())),
        }
        // mckean-singer only applies to even classes
        if m == "mckean-singer" && triple.parity != Parity::Even {
            return Err(RunError::Engine(ncindex::Error::ParityMismatch(
                "mckean-singer requires an even model".into(),
            )));
        }
    }

    Ok(RunSpec {
        triple,
        class,
        methods,
        mu: kv.get_f64("mu", 0.5)?,
        eps: kv.get_f64("eps", 1.0)?,
        tol_scale,
        seed: kv.get_f64("seed", 0.0)? as u64,
    })
}

/// Execute a run and collect the report (rows in config order).
pub fn execute(spec: &RunSpec) -> Result<IndexReport, RunError> {
    let mut report = IndexReport::default();
    for method in &spec.methods {
        let start = Instant::now();
        info!("running {method} on {} / {}", spec.triple.name, spec.class.name());
        let value = match method.as_str() {
            "compression" => {
                pairing_index(&spec.triple, &spec.class, spec.mu, spec.eps, PairingMode::Compression)?
            }
            "trace-power" => {
                pairing_index(&spec.triple, &spec.class, spec.mu, spec.eps, PairingMode::TracePower)?
            }
            "no-double" => {
                pairing_index(&spec.triple, &spec.class, spec.mu, spec.eps, PairingMode::NoDouble)?
            }
            "residue" => residue_index(&spec.triple, &spec.class)?,
            "mckean-singer" => mckean_singer(&spec.triple, &spec.class)?,
            _ => unreachable!("validated"),
        };
        let runtime = start.elapsed().as_millis();
        report.push(
            &spec.triple.name,
            spec.class.name(),
            method,
            &value,
            method_tolerance(method) * spec.tol_scale,
            runtime,
        );
    }
    Ok(report)
}

/// Parse config text, run all requested methods, return the report.
pub fn run_config_text(
    text: &str,
    method_override: Option<&str>,
    tol_scale: f64,
) -> Result<IndexReport, RunError> {
    let kv = KeyValues::parse(text)?;
    let spec = build_run(&kv, method_override, tol_scale)?;
    execute(&spec)
}

/// Load a config file, run it, return the report.
pub fn run_config(
    path: &std::path::Path,
    method_override: Option<&str>,
    tol_scale: f64,
) -> Result<IndexReport, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::Engine(e.into()))?;
    run_config_text(&text, method_override, tol_scale)
}
