//! Scenario files.
//!
//! A scenario is a flat key-value text file with three sections:
//!
//! ```text
//! # comment
//! [anchors]
//! V = 30, 55          # any other name defines an anchor point
//! A1 = 0, 0           # A<j>/B<j> place pair j (all pairs or none)
//! eve = W             # anchor holding the eavesdropper
//! irs = Z             # anchor holding the IRS
//!
//! [params]
//! L = 20
//! N = 2
//! Pmax = 0.0316
//! xi_per_element = 0.25   # or `xi = 5.0` for a fixed radius
//!
//! [run]
//! config = C1             # C1..C4 or custom
//! L = 10, 20, 30, 40
//! realizations = 10
//! seed = 1
//! baselines = random_phase_opt_power, no_irs_opt_power   # or all / none
//! out = results
//! ```
//!
//! Every key is optional. Missing anchors, users and parameters take the
//! default layout and the reference parameter values; named configurations
//! take their eavesdropper and IRS anchors from the label.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use irsec_core::baselines::BaselineKind;
use irsec_core::geometry::{default_anchors, default_users, ConfigLabel, Point, ScenarioConfig};
use irsec_core::params::{SystemParams, TrustRadius};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] irsec_core::Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

type Result<T> = std::result::Result<T, ScenarioError>;

/// The `[run]` section.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSection {
    pub l_values: Vec<usize>,
    pub realizations: usize,
    pub seed: u64,
    pub baselines: Vec<BaselineKind>,
    pub out: Option<PathBuf>,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            l_values: vec![10, 20, 30, 40],
            realizations: 50,
            seed: 1,
            baselines: default_baselines(),
            out: None,
        }
    }
}

/// The random-phase and no-IRS schemes. Grid and corner searches are
/// validation oracles and only run when asked for.
pub fn default_baselines() -> Vec<BaselineKind> {
    BaselineKind::ALL
        .into_iter()
        .filter(|k| k.power_mode().is_some())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub run: RunSection,
}

impl Scenario {
    /// A named layout with reference parameters and default run settings.
    pub fn named(label: ConfigLabel) -> Result<Self> {
        let run = RunSection::default();
        let params = SystemParams::reference(run.l_values[0], 2);
        Ok(Self {
            config: ScenarioConfig::named(label, params)?,
            run,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        parse(&text)
    }

    /// Parameters for `l` IRS elements.
    pub fn params_for(&self, l: usize) -> SystemParams {
        let mut p = self.config.params.clone();
        p.irs_elements = l;
        p
    }
}

#[derive(Default)]
struct Sections {
    anchors: BTreeMap<String, (usize, String)>,
    params: BTreeMap<String, (usize, String)>,
    run: BTreeMap<String, (usize, String)>,
}

fn split_sections(text: &str) -> Result<Sections> {
    let mut out = Sections::default();
    let mut current: Option<&str> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |msg: String| ScenarioError::Syntax { line: line_no, msg };
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = match name.trim() {
                "anchors" => Some("anchors"),
                "params" => Some("params"),
                "run" => Some("run"),
                other => return Err(syntax(format!("unknown section [{other}]"))),
            };
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| syntax(format!("expected `key = value`, got `{line}`")))?;
        let (key, value) = (key.trim().to_string(), value.trim().to_string());
        if key.is_empty() {
            return Err(syntax("empty key".into()));
        }
        let map = match current {
            Some("anchors") => &mut out.anchors,
            Some("params") => &mut out.params,
            Some("run") => &mut out.run,
            _ => return Err(syntax(format!("`{key}` outside of a section"))),
        };
        if map.insert(key.clone(), (line_no, value)).is_some() {
            return Err(syntax(format!("duplicate key `{key}`")));
        }
    }
    Ok(out)
}

fn at<T>(line: usize, r: std::result::Result<T, String>) -> Result<T> {
    r.map_err(|msg| ScenarioError::Syntax { line, msg })
}

fn parse_f64(key: &str, v: &str) -> std::result::Result<f64, String> {
    v.parse::<f64>()
        .map_err(|_| format!("`{key}`: `{v}` is not a number"))
}

fn parse_usize(key: &str, v: &str) -> std::result::Result<usize, String> {
    v.parse::<usize>()
        .map_err(|_| format!("`{key}`: `{v}` is not a nonnegative integer"))
}

fn parse_point(key: &str, v: &str) -> std::result::Result<Point, String> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [x, y] => Ok(Point::new(parse_f64(key, x)?, parse_f64(key, y)?)),
        _ => Err(format!("`{key}`: expected `x, y`, got `{v}`")),
    }
}

/// `A3` -> (true, 3), `B1` -> (false, 1).
fn user_key(key: &str) -> Option<(bool, usize)> {
    let (first, rest) = key.split_at(1);
    let is_a = match first {
        "A" => true,
        "B" => false,
        _ => return None,
    };
    rest.parse::<usize>()
        .ok()
        .filter(|&j| j >= 1)
        .map(|j| (is_a, j))
}

fn apply_param(p: &mut SystemParams, key: &str, v: &str) -> std::result::Result<(), String> {
    let f = || parse_f64(key, v);
    let u = || parse_usize(key, v);
    match key {
        "L" => p.irs_elements = u()?,
        "N" => p.pairs = u()?,
        "L0" => p.l0 = f()?,
        "alpha_irs" => p.alpha_irs = f()?,
        "alpha_direct" => p.alpha_direct = f()?,
        "beta_irs" => p.beta_irs = f()?,
        "beta_direct" => p.beta_direct = f()?,
        "sigma2" => p.sigma2 = f()?,
        "sigma_l2" => p.sigma_l2 = f()?,
        "Pmin" => p.p_min = f()?,
        "Pmax" => p.p_max = f()?,
        "eps1" => p.eps1 = f()?,
        "eps2" => p.eps2 = f()?,
        "eps3" => p.eps3 = f()?,
        "xi" => p.trust_radius = TrustRadius::Fixed(f()?),
        "xi_per_element" => p.trust_radius = TrustRadius::PerElement(f()?),
        "randomization_samples" => p.randomization_samples = u()?,
        "fp_max_iter" => p.fp_max_iter = u()?,
        "sca_max_iter" => p.sca_max_iter = u()?,
        "outer_max_iter" => p.outer_max_iter = u()?,
        "feasibility_tol" => p.solver.feasibility_tol = f()?,
        "gap_tol" => p.solver.gap_tol = f()?,
        "max_newton" => p.solver.max_newton = u()?,
        _ => return Err(format!("unknown parameter `{key}`")),
    }
    Ok(())
}

/// Parses bare `key = value` parameter lines on top of the reference values.
pub fn parse_params(text: &str) -> std::result::Result<SystemParams, String> {
    let mut p = SystemParams::reference(1, 2);
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("expected `key = value`, got `{line}`"))?;
        apply_param(&mut p, k.trim(), v.trim())?;
    }
    p.validate().map_err(|e| e.to_string())?;
    Ok(p)
}

pub fn parse_baselines(v: &str) -> std::result::Result<Vec<BaselineKind>, String> {
    match v.trim() {
        "all" => return Ok(BaselineKind::ALL.to_vec()),
        "none" | "" => return Ok(Vec::new()),
        _ => {}
    }
    let mut out = Vec::new();
    for name in v.split(',').map(str::trim) {
        let k = BaselineKind::parse(name).ok_or_else(|| format!("unknown baseline `{name}`"))?;
        if !out.contains(&k) {
            out.push(k);
        }
    }
    Ok(out)
}

pub fn parse_l_list(v: &str) -> std::result::Result<Vec<usize>, String> {
    let l: Vec<usize> = v
        .split(',')
        .map(|s| parse_usize("L", s.trim()))
        .collect::<std::result::Result<_, _>>()?;
    if l.is_empty() || l.contains(&0) {
        return Err("L list must be nonempty and positive".into());
    }
    Ok(l)
}

pub fn parse(text: &str) -> Result<Scenario> {
    let sec = split_sections(text)?;

    let mut run = RunSection::default();
    let mut label = ConfigLabel::Custom;
    for (key, (line, v)) in &sec.run {
        let line = *line;
        match key.as_str() {
            "config" => {
                label = at(
                    line,
                    ConfigLabel::parse(v).ok_or_else(|| format!("unknown config `{v}`")),
                )?
            }
            "L" => run.l_values = at(line, parse_l_list(v))?,
            "realizations" => run.realizations = at(line, parse_usize(key, v))?,
            "seed" => at(
                line,
                v.parse::<u64>()
                    .map(|s| run.seed = s)
                    .map_err(|_| format!("bad seed `{v}`")),
            )?,
            "baselines" => run.baselines = at(line, parse_baselines(v))?,
            "out" => run.out = Some(PathBuf::from(v)),
            _ => {
                return Err(ScenarioError::Syntax {
                    line,
                    msg: format!("unknown run key `{key}`"),
                })
            }
        }
    }
    if run.realizations == 0 {
        return Err(ScenarioError::Invalid(
            "realizations must be at least 1".into(),
        ));
    }

    let mut params = SystemParams::reference(run.l_values[0], 2);
    let mut l_given = false;
    for (key, (line, v)) in &sec.params {
        at(*line, apply_param(&mut params, key, v))?;
        l_given |= key == "L";
    }
    if !l_given {
        params.irs_elements = run.l_values[0];
    }
    if !sec.run.contains_key("L") && l_given {
        run.l_values = vec![params.irs_elements];
    }

    let mut anchors = default_anchors();
    let mut a_pos = BTreeMap::new();
    let mut b_pos = BTreeMap::new();
    let mut eve = None;
    let mut irs = None;
    for (key, (line, v)) in &sec.anchors {
        let line = *line;
        match key.as_str() {
            "eve" => eve = Some(v.clone()),
            "irs" => irs = Some(v.clone()),
            _ => {
                let p = at(line, parse_point(key, v))?;
                match user_key(key) {
                    Some((true, j)) => {
                        a_pos.insert(j, p);
                    }
                    Some((false, j)) => {
                        b_pos.insert(j, p);
                    }
                    None => {
                        anchors.insert(key.clone(), p);
                    }
                }
            }
        }
    }

    let users = if a_pos.is_empty() && b_pos.is_empty() {
        if params.pairs != 2 {
            return Err(ScenarioError::Invalid(format!(
                "the default layout has 2 pairs but N = {}; place users with A1, B1, ...",
                params.pairs
            )));
        }
        default_users()
    } else {
        let n = params.pairs;
        let complete = (1..=n).all(|j| a_pos.contains_key(&j) && b_pos.contains_key(&j))
            && a_pos.len() == n
            && b_pos.len() == n;
        if !complete {
            return Err(ScenarioError::Invalid(format!(
                "user positions must define A1..A{n} and B1..B{n} exactly"
            )));
        }
        (1..=n).map(|j| (a_pos[&j], b_pos[&j])).collect()
    };

    let (eve, irs) = match (label.anchors(), eve, irs) {
        (_, Some(e), Some(i)) => (e, i),
        (Some((e, i)), e2, i2) => (
            e2.unwrap_or_else(|| e.into()),
            i2.unwrap_or_else(|| i.into()),
        ),
        (None, _, _) => {
            return Err(ScenarioError::Invalid(
                "a custom configuration needs `eve` and `irs` in [anchors]".into(),
            ))
        }
    };

    params.validate()?;
    let scenario = Scenario {
        config: ScenarioConfig {
            label,
            users,
            anchors,
            eve_anchor: eve,
            irs_anchor: irs,
            params,
        },
        run,
    };
    irsec_core::geometry::place_nodes(&scenario.config)?;
    Ok(scenario)
}

/// Writes a scenario back in file form. `parse(&render(s)) == s`.
pub fn render(s: &Scenario) -> String {
    let c = &s.config;
    let p = &c.params;
    let mut out = String::new();
    out.push_str("[anchors]\n");
    for (name, pt) in &c.anchors {
        let _ = writeln!(out, "{name} = {:?}, {:?}", pt.x, pt.y);
    }
    for (j, (a, b)) in c.users.iter().enumerate() {
        let _ = writeln!(out, "A{} = {:?}, {:?}", j + 1, a.x, a.y);
        let _ = writeln!(out, "B{} = {:?}, {:?}", j + 1, b.x, b.y);
    }
    let _ = writeln!(out, "eve = {}\nirs = {}", c.eve_anchor, c.irs_anchor);

    out.push_str("\n[params]\n");
    for (k, v) in param_entries(p) {
        let _ = writeln!(out, "{k} = {v}");
    }

    out.push_str("\n[run]\n");
    let _ = writeln!(out, "config = {}", c.label);
    let ls: Vec<String> = s.run.l_values.iter().map(usize::to_string).collect();
    let _ = writeln!(out, "L = {}", ls.join(", "));
    let _ = writeln!(out, "realizations = {}", s.run.realizations);
    let _ = writeln!(out, "seed = {}", s.run.seed);
    let bs: Vec<&str> = s.run.baselines.iter().map(|b| b.as_str()).collect();
    let _ = writeln!(
        out,
        "baselines = {}",
        if bs.is_empty() {
            "none".into()
        } else {
            bs.join(", ")
        }
    );
    if let Some(o) = &s.run.out {
        let _ = writeln!(out, "out = {}", o.display());
    }
    out
}

/// Every parameter as `(key, value)` in file syntax.
pub fn param_entries(p: &SystemParams) -> Vec<(&'static str, String)> {
    let (xi_key, xi) = match p.trust_radius {
        TrustRadius::PerElement(c) => ("xi_per_element", c),
        TrustRadius::Fixed(x) => ("xi", x),
    };
    vec![
        ("L", p.irs_elements.to_string()),
        ("N", p.pairs.to_string()),
        ("L0", format!("{:?}", p.l0)),
        ("alpha_irs", format!("{:?}", p.alpha_irs)),
        ("alpha_direct", format!("{:?}", p.alpha_direct)),
        ("beta_irs", format!("{:?}", p.beta_irs)),
        ("beta_direct", format!("{:?}", p.beta_direct)),
        ("sigma2", format!("{:?}", p.sigma2)),
        ("sigma_l2", format!("{:?}", p.sigma_l2)),
        ("Pmin", format!("{:?}", p.p_min)),
        ("Pmax", format!("{:?}", p.p_max)),
        ("eps1", format!("{:?}", p.eps1)),
        ("eps2", format!("{:?}", p.eps2)),
        ("eps3", format!("{:?}", p.eps3)),
        (xi_key, format!("{xi:?}")),
        ("randomization_samples", p.randomization_samples.to_string()),
        ("fp_max_iter", p.fp_max_iter.to_string()),
        ("sca_max_iter", p.sca_max_iter.to_string()),
        ("outer_max_iter", p.outer_max_iter.to_string()),
        ("feasibility_tol", format!("{:?}", p.solver.feasibility_tol)),
        ("gap_tol", format!("{:?}", p.solver.gap_tol)),
        ("max_newton", p.solver.max_newton.to_string()),
    ]
}
