//! Spec-file parsing and command dispatch behind the `phimodel` binary.
//!
//! Spec files are sectioned `key = value` text; `#` starts a comment:
//!
//! ```text
//! [space]
//! T = 1
//! [phi]
//! zeta = 2
//! [modulus]
//! C = 1
//! alpha = 0.4
//! [coefficients]
//! family = wiener-kl
//! [xi]
//! distribution = gaussian
//! scale = 1
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{EntropyExponent, IntervalSpace, Modulus};
use crate::orlicz::{PhiClass, PhiFunction, RandomCoefficient};
use crate::planner::{check_condition, plan_minimal_n, sweep, PlanOptions, Theorem};
use crate::process::{CoefficientFamily, DampedTrig, FiniteSine, Perturbation, ProcessSpec, WienerKl, XiSequence};
use crate::simulate::{sample_paths, TimeGrid, DEFAULT_GRID};
use crate::validate::{estimate_exceedance, ValidationConfig};

const SECTIONS: [&str; 5] = ["space", "phi", "modulus", "coefficients", "xi"];

#[derive(Debug)]
struct Entry {
    value: String,
    line: usize,
}

#[derive(Debug, Default)]
struct Sections {
    label: String,
    map: BTreeMap<String, BTreeMap<String, Entry>>,
    header_line: BTreeMap<String, usize>,
}

impl Sections {
    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::SpecParse {
            path: self.label.clone(),
            line,
            message: message.into(),
        }
    }

    fn section_line(&self, section: &str) -> usize {
        self.header_line.get(section).copied().unwrap_or(0)
    }

    fn raw(&self, section: &str, key: &str) -> Option<&Entry> {
        self.map.get(section).and_then(|s| s.get(key))
    }

    fn str(&self, section: &str, key: &str) -> Result<&Entry> {
        self.raw(section, key).ok_or_else(|| {
            self.err(
                self.section_line(section),
                format!("missing key '{key}' in section [{section}]"),
            )
        })
    }

    fn num_opt(&self, section: &str, key: &str) -> Result<Option<f64>> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse::<f64>()
                .map(Some)
                .map_err(|_| self.err(e.line, format!("'{key}' must be a number, got '{}'", e.value))),
        }
    }

    fn num(&self, section: &str, key: &str) -> Result<f64> {
        self.str(section, key)?;
        Ok(self.num_opt(section, key)?.unwrap())
    }

    /// Wraps a module error with the line of the offending key.
    fn at<T>(&self, section: &str, key: &str, r: Result<T>) -> Result<T> {
        r.map_err(|e| {
            let line = self.raw(section, key).map_or(self.section_line(section), |e| e.line);
            self.err(line, e.to_string())
        })
    }
}

fn tokenize(text: &str, label: &str) -> Result<Sections> {
    let mut out = Sections {
        label: label.to_string(),
        ..Sections::default()
    };
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap().trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| out.err(line, format!("malformed section header '{body}'")))?
                .trim()
                .to_ascii_lowercase();
            if !SECTIONS.contains(&name.as_str()) {
                return Err(out.err(line, format!("unknown section [{name}]")));
            }
            if out.header_line.insert(name.clone(), line).is_some() {
                return Err(out.err(line, format!("section [{name}] appears twice")));
            }
            out.map.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let (k, v) = body
            .split_once('=')
            .ok_or_else(|| out.err(line, format!("expected 'key = value', got '{body}'")))?;
        let Some(section) = current.clone() else {
            return Err(out.err(line, "key outside of any section"));
        };
        let key = k.trim().to_string();
        let prev = out.map.get_mut(&section).unwrap().insert(
            key.clone(),
            Entry {
                value: v.trim().to_string(),
                line,
            },
        );
        if prev.is_some() {
            return Err(out.err(line, format!("duplicate key '{key}' in [{section}]")));
        }
    }
    for s in SECTIONS {
        if s != "xi" && !out.map.contains_key(s) {
            return Err(out.err(0, format!("missing section [{s}]")));
        }
    }
    Ok(out)
}

fn check_keys(sec: &Sections, section: &str, allowed: &[&str]) -> Result<()> {
    if let Some(m) = sec.map.get(section) {
        for (k, e) in m {
            if !allowed.contains(&k.as_str()) {
                return Err(sec.err(e.line, format!("unknown key '{k}' in [{section}]")));
            }
        }
    }
    Ok(())
}

pub fn parse_spec_str(text: &str, label: &str) -> Result<ProcessSpec> {
    let sec = tokenize(text, label)?;
    check_keys(&sec, "space", &["T"])?;
    check_keys(&sec, "phi", &["zeta", "class"])?;
    check_keys(&sec, "modulus", &["C", "alpha", "entropy_exponent"])?;
    check_keys(
        &sec,
        "coefficients",
        &["family", "K", "amplitudes", "amplitude", "decay", "approx_error", "approx_error_decay"],
    )?;
    check_keys(&sec, "xi", &["distribution", "scale", "half_width", "tau"])?;

    let space = sec.at("space", "T", IntervalSpace::new(sec.num("space", "T")?))?;

    let zeta = sec.num("phi", "zeta")?;
    let phi = match sec.raw("phi", "class") {
        None => sec.at("phi", "zeta", PhiFunction::with_zeta(zeta))?,
        Some(e) => {
            let class = match e.value.to_ascii_uppercase().as_str() {
                "I" | "1" | "CLASSI" => PhiClass::ClassI,
                "II" | "2" | "CLASSII" => PhiClass::ClassII,
                other => return Err(sec.err(e.line, format!("class must be I or II, got '{other}'"))),
            };
            sec.at("phi", "class", PhiFunction::new(zeta, class))?
        }
    };

    let alpha = sec.num("modulus", "alpha")?;
    let modulus = sec.at("modulus", "alpha", Modulus::new(sec.num("modulus", "C")?, alpha))?;
    let a = sec.num_opt("modulus", "entropy_exponent")?.unwrap_or(alpha / 2.0);
    let entropy = sec.at("modulus", "entropy_exponent", EntropyExponent::new(a))?;

    let fam = sec.str("coefficients", "family")?;
    let fam_line = fam.line;
    let family: Arc<dyn CoefficientFamily> = match fam.value.as_str() {
        "wiener-kl" => Arc::new(WienerKl::new(&space)),
        "damped-trig" => {
            let amp = sec.num_opt("coefficients", "amplitude")?.unwrap_or(1.0);
            let decay = sec.num("coefficients", "decay")?;
            Arc::new(sec.at("coefficients", "decay", DampedTrig::new(&space, amp, decay))?)
        }
        "finite" => {
            let amps = match sec.raw("coefficients", "amplitudes") {
                Some(e) => e
                    .value
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<f64>()
                            .map_err(|_| sec.err(e.line, format!("bad amplitude '{}'", s.trim())))
                    })
                    .collect::<Result<Vec<f64>>>()?,
                None => {
                    let k = sec.num("coefficients", "K")?;
                    if !(k >= 1.0 && k.fract() == 0.0) {
                        return Err(sec.err(sec.str("coefficients", "K")?.line, "K must be a positive integer"));
                    }
                    let amp = sec.num_opt("coefficients", "amplitude")?.unwrap_or(1.0);
                    let decay = sec.num_opt("coefficients", "decay")?.unwrap_or(0.0);
                    (1..=k as usize).map(|j| amp * (j as f64).powf(-decay)).collect()
                }
            };
            if let Some(k) = sec.num_opt("coefficients", "K")? {
                if k != amps.len() as f64 {
                    let line = sec.str("coefficients", "K")?.line;
                    return Err(sec.err(line, format!("K = {k} but {} amplitudes given", amps.len())));
                }
            }
            Arc::new(sec.at("coefficients", "amplitudes", FiniteSine::new(&space, amps))?)
        }
        other => {
            return Err(sec.err(
                fam_line,
                format!("unknown family '{other}' (expected wiener-kl, damped-trig or finite)"),
            ))
        }
    };

    let perturbation = match sec.num_opt("coefficients", "approx_error")? {
        None => None,
        Some(eps) => {
            let decay = sec.num_opt("coefficients", "approx_error_decay")?.unwrap_or(0.0);
            Some(sec.at("coefficients", "approx_error", Perturbation::new(eps, decay))?)
        }
    };

    let xi = parse_xi(&sec, phi)?;

    sec.at(
        "coefficients",
        "family",
        ProcessSpec::new(space, modulus, entropy, phi, family, perturbation, XiSequence::Iid(xi)),
    )
}

fn parse_xi(sec: &Sections, phi: PhiFunction) -> Result<RandomCoefficient> {
    let dist = sec.raw("xi", "distribution").map_or("gaussian", |e| e.value.as_str());
    let line = sec.raw("xi", "distribution").map_or(sec.section_line("xi"), |e| e.line);
    let xi = match dist {
        "gaussian" => sec.at("xi", "scale", RandomCoefficient::gaussian(sec.num_opt("xi", "scale")?.unwrap_or(1.0)))?,
        "bounded" | "uniform" => sec.at("xi", "half_width", RandomCoefficient::bounded(sec.num("xi", "half_width")?))?,
        other => return Err(sec.err(line, format!("unknown distribution '{other}' (expected gaussian or bounded)"))),
    };
    match sec.num_opt("xi", "tau")? {
        Some(tau) => sec.at("xi", "tau", xi.with_tau(tau)),
        // the default standards are derived for the quadratic case
        None if phi.zeta() != 2.0 => Err(sec.err(
            line,
            format!("zeta = {} needs an explicit 'tau' for the coefficients", phi.zeta()),
        )),
        None => Ok(xi),
    }
}

pub fn parse_spec(path: &Path) -> Result<ProcessSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::SpecParse {
        path: path.display().to_string(),
        line: 0,
        message: format!("cannot read file: {e}"),
    })?;
    parse_spec_str(&text, &path.display().to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Bound,
    Plan,
    Simulate,
    Validate,
    Sweep,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Bound => "bound",
            Command::Plan => "plan",
            Command::Simulate => "simulate",
            Command::Validate => "validate",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Pretty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub spec_path: PathBuf,
    pub output_dir: Option<PathBuf>,
    pub delta: Option<f64>,
    pub nu: Option<f64>,
    pub n: Option<usize>,
    pub n_paths: usize,
    pub seed: u64,
    pub grid_size: usize,
    pub theorem: Option<Theorem>,
    pub format: Format,
    pub p: Option<f64>,
    pub x_min: f64,
    pub x_max: f64,
    pub x_points: usize,
}

impl RunConfig {
    pub fn new(command: Command, spec_path: impl Into<PathBuf>) -> Self {
        Self {
            command,
            spec_path: spec_path.into(),
            output_dir: None,
            delta: None,
            nu: None,
            n: None,
            n_paths: 10_000,
            seed: 0,
            grid_size: DEFAULT_GRID,
            theorem: None,
            format: Format::Csv,
            p: None,
            x_min: 0.25,
            x_max: 5.0,
            x_points: 40,
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

/// What a run produced: the text for stdout, warnings for stderr, and the
/// exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
    pub warnings: Vec<String>,
    pub written: Option<PathBuf>,
}

/// Fixed-width scientific notation with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, fmt_f64)
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_pretty(&self) -> String {
        let shorten = |c: &str| match c.parse::<f64>() {
            Ok(v) if c.contains('e') => format!("{v:.6e}"),
            _ => c.to_string(),
        };
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(|c| shorten(c)).collect()).collect();
        let widths: Vec<usize> = (0..self.header.len())
            .map(|j| cells.iter().map(|r| r[j].len()).chain([self.header[j].len()]).max().unwrap())
            .collect();
        let mut s = String::new();
        let line = |s: &mut String, items: &[String]| {
            let parts: Vec<String> = items.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            s.push_str(parts.join("  ").trim_end());
            s.push('\n');
        };
        line(&mut s, &self.header.iter().map(|h| h.to_string()).collect::<Vec<_>>());
        for r in &cells {
            line(&mut s, r);
        }
        s
    }
}

fn need<T>(v: Option<T>, flag: &str, cmd: Command) -> Result<T> {
    v.ok_or_else(|| Error::Cli(format!("'{}' needs --{flag}", cmd.name())))
}

/// Executes one command. Errors from the modules are returned as `Err`;
/// the binary maps them to exit status 1.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let spec = parse_spec(&cfg.spec_path)?;
    let theorem = cfg.theorem.unwrap_or_else(|| Theorem::default_for(spec.class()));
    let opts = PlanOptions::default();
    let mut warnings = Vec::new();
    let mut exit_code = EXIT_OK;
    let mut verdict: Option<String> = None;

    let table = match cfg.command {
        Command::Bound => {
            let n = cfg.n.unwrap_or(0);
            if cfg.x_points < 1 || !(cfg.x_min > 0.0 && cfg.x_max >= cfg.x_min) {
                return Err(Error::Cli("bound needs 0 < x-min <= x-max and x-points >= 1".into()));
            }
            let mut t = Table::new(vec!["x", "z_sup", "z_abs", "valid", "lambda_opt", "p"]);
            let mut any_valid = false;
            for i in 0..cfg.x_points {
                let x = if cfg.x_points == 1 {
                    cfg.x_min
                } else {
                    cfg.x_min + (cfg.x_max - cfg.x_min) * i as f64 / (cfg.x_points - 1) as f64
                };
                let p = if theorem.has_free_p() { cfg.p } else { None };
                let c = check_condition(&spec, n, x, theorem, p, &opts)?;
                any_valid |= c.valid;
                t.rows.push(vec![
                    fmt_f64(x),
                    fmt_f64(0.5 * c.nu_bound),
                    fmt_f64(c.nu_bound),
                    c.valid.to_string(),
                    fmt_opt(c.lambda_opt),
                    fmt_opt(c.p),
                ]);
            }
            if !any_valid {
                warnings.push(format!("no x in the range clears the {theorem} threshold"));
                exit_code = EXIT_INVALID;
            }
            t
        }
        Command::Plan => {
            let delta = need(cfg.delta, "delta", cfg.command)?;
            let nu = need(cfg.nu, "nu", cfg.command)?;
            match plan_minimal_n(&spec, delta, nu, theorem, &opts) {
                Ok(r) => {
                    let mut t = Table::new(vec![
                        "N",
                        "p_opt",
                        "nu_achieved",
                        "gamma_N",
                        "approx_part",
                        "tail_part",
                        "beta",
                        "delta_threshold",
                        "theorem",
                        "search",
                    ]);
                    t.rows.push(vec![
                        r.n.to_string(),
                        fmt_opt(r.p_opt),
                        fmt_f64(r.nu_achieved),
                        fmt_f64(r.gamma.gamma),
                        fmt_f64(r.gamma.approx_part),
                        fmt_f64(r.gamma.tail_part),
                        fmt_f64(r.beta),
                        fmt_opt(r.delta_threshold),
                        r.theorem.to_string(),
                        format!("{:?}", r.search).to_ascii_lowercase(),
                    ]);
                    t
                }
                Err(e @ Error::Unreachable { .. }) if e.to_string().contains("threshold") => {
                    warnings.push(e.to_string());
                    return Ok(Outcome {
                        exit_code: EXIT_INVALID,
                        stdout: String::new(),
                        warnings,
                        written: None,
                    });
                }
                Err(e) => return Err(e),
            }
        }
        Command::Simulate => {
            let n = need(cfg.n, "n", cfg.command)?;
            let grid = TimeGrid::uniform(spec.space.length(), cfg.grid_size)?;
            let batch = sample_paths(&spec, n, &grid, cfg.n_paths, cfg.seed, spec.has_approximation_error())?;
            let mut t = Table::new(vec!["path", "t", "x"]);
            for i in 0..batch.count {
                for (j, &tt) in grid.points().iter().enumerate() {
                    t.rows.push(vec![i.to_string(), fmt_f64(tt), fmt_f64(batch.path(i)[j])]);
                }
            }
            t
        }
        Command::Validate => {
            let n = need(cfg.n, "n", cfg.command)?;
            let delta = need(cfg.delta, "delta", cfg.command)?;
            let vcfg = ValidationConfig {
                grid: TimeGrid::uniform(spec.space.length(), cfg.grid_size)?,
                n_paths: cfg.n_paths,
                seed: cfg.seed,
                theorem,
                plan: opts,
                n_ref: None,
            };
            let r = estimate_exceedance(&spec, n, delta, &vcfg)?;
            let mut t = Table::new(vec![
                "N",
                "N_ref",
                "delta",
                "empirical_prob",
                "standard_error",
                "exceedances",
                "n_paths",
                "theoretical_bound",
                "bound_valid",
                "dominated",
                "remainder_gamma",
                "grid_size",
                "theorem",
            ]);
            t.rows.push(vec![
                r.n.to_string(),
                r.n_ref.to_string(),
                fmt_f64(r.delta),
                fmt_f64(r.empirical_prob),
                fmt_f64(r.standard_error),
                r.exceedances.to_string(),
                r.n_paths.to_string(),
                fmt_f64(r.theoretical_bound),
                r.bound_valid.to_string(),
                r.dominated.to_string(),
                fmt_f64(r.remainder_gamma),
                r.grid_size.to_string(),
                r.theorem.to_string(),
            ]);
            verdict = Some(if r.is_violation() {
                exit_code = EXIT_ERROR;
                warnings.push(format!(
                    "WARNING: bound violated: empirical {:.4e} > bound {:.4e} + 3 SE; this indicates a bug",
                    r.empirical_prob, r.theoretical_bound
                ));
                "verdict: VIOLATED".to_string()
            } else if !r.bound_valid {
                exit_code = EXIT_INVALID;
                format!("verdict: bound not applicable (delta below the {theorem} threshold)")
            } else if r.theoretical_bound > 1.0 {
                "verdict: bound vacuous (> 1)".to_string()
            } else {
                "verdict: dominated".to_string()
            });
            t
        }
        Command::Sweep => {
            let delta = need(cfg.delta, "delta", cfg.command)?;
            let n_max = cfg.n.unwrap_or(128);
            let ns: Vec<usize> = (1..=n_max).collect();
            let rows = sweep(&spec, delta, theorem, &ns, &opts)?;
            let mut t = Table::new(vec!["N", "gamma_N", "approx_part", "tail_part", "nu_bound", "valid", "p"]);
            for r in rows {
                let c = r.condition;
                t.rows.push(vec![
                    r.n.to_string(),
                    fmt_f64(c.gamma.gamma),
                    fmt_f64(c.gamma.approx_part),
                    fmt_f64(c.gamma.tail_part),
                    fmt_f64(c.nu_bound),
                    c.valid.to_string(),
                    fmt_opt(c.p),
                ]);
            }
            t
        }
    };

    let csv = table.to_csv();
    let written = match &cfg.output_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Error::Cli(format!("cannot create {}: {e}", dir.display())))?;
            let path = dir.join(format!("{}.csv", cfg.command.name()));
            std::fs::write(&path, &csv).map_err(|e| Error::Cli(format!("cannot write {}: {e}", path.display())))?;
            Some(path)
        }
        None => None,
    };
    let mut stdout = match cfg.format {
        Format::Csv => csv,
        Format::Pretty => table.to_pretty(),
    };
    if let Some(v) = verdict {
        let _ = writeln!(stdout, "{v}");
    }
    Ok(Outcome {
        exit_code,
        stdout,
        warnings,
        written,
    })
}
