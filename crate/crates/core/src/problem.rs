//! JSON problem files: named groups, algebras, Galois setups, fans,
//! morphisms and polynomial families, plus a list of jobs over them.
//!
//! Everything a job refers to is resolved and validated when the file is
//! loaded. Jobs then run independently and each records either a result or
//! an error in a versioned [`Report`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::etale::{component_degrees, is_pseudo_split, EtaleAlgebraDescriptor};
use crate::fan::{
    barycentric_subdivision, enumerate_points, height, height_bound_m, iterated_barycentric,
    star_subdivision, validate_smooth_fan, Cone, FanMorphism, HeightBound, SmoothKatoFan,
    Subdivision, DEFAULT_HEIGHT_CAP,
};
use crate::frobenian::{
    delta, density_s_eq_1, mean, predict_surjectivity, s_lt_one_witness, s_profile, s_value,
    surjectivity_set, GaloisSetup,
};
use crate::oracle::{
    compare_with_prediction, empirical_density_parallel, has_qp_root, ComparisonReport,
    DensityEstimate, IntPoly, PolynomialFamily,
};
use crate::perm::{GroupAction, Permutation, PermutationGroup, DEFAULT_GROUP_ORDER_CAP};
use crate::rational::{self, Rational};

pub const REPORT_SCHEMA: &str = "pseudosplit-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Config {
    pub group_order_cap: usize,
    pub height_cap: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            group_order_cap: DEFAULT_GROUP_ORDER_CAP,
            height_cap: DEFAULT_HEIGHT_CAP,
        }
    }
}

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed problem file at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{location}: {message}")]
    Invalid { location: String, message: String },
}

fn invalid<T>(location: impl Into<String>, message: impl ToString) -> Result<T, ProblemError> {
    Err(ProblemError::Invalid {
        location: location.into(),
        message: message.to_string(),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    #[serde(default)]
    groups: BTreeMap<String, RawGroup>,
    #[serde(default)]
    algebras: BTreeMap<String, RawAlgebra>,
    #[serde(default)]
    setups: BTreeMap<String, RawSetup>,
    #[serde(default)]
    fans: BTreeMap<String, RawFan>,
    #[serde(default)]
    morphisms: BTreeMap<String, RawMorphism>,
    #[serde(default)]
    families: BTreeMap<String, Vec<Vec<i64>>>,
    #[serde(default)]
    jobs: Vec<Job>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    degree: usize,
    generators: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgebra {
    group: String,
    /// generators of each component subgroup
    components: Vec<Vec<Vec<usize>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSetup {
    algebra: Option<String>,
    lambda: Option<String>,
    gamma: Option<Vec<Vec<usize>>>,
    #[serde(rename = "G")]
    g: Option<String>,
    #[serde(rename = "N")]
    n: Option<Vec<Vec<usize>>>,
    quotient: Option<Vec<Vec<usize>>>,
    fiber: Option<RawFiber>,
    #[serde(default)]
    empty_fiber: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFiber {
    size: usize,
    images: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFan {
    dim: usize,
    rays: Vec<Vec<i64>>,
    cones: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMorphism {
    source: String,
    target: String,
    cone_map: Vec<Vec<usize>>,
    matrices: Vec<Vec<Vec<u64>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubdivisionKind {
    Star,
    Barycentric,
    Iterated,
}

/// One unit of work. Fields name objects declared elsewhere in the file;
/// `element` is a permutation image array.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Job {
    Pseudosplit {
        algebra: String,
    },
    Split {
        algebra: String,
    },
    SProfile {
        setup: String,
    },
    SValue {
        setup: String,
        element: Vec<usize>,
    },
    SWitness {
        setup: String,
        element: Vec<usize>,
    },
    DensityS1 {
        setup: String,
    },
    Delta {
        setup: String,
    },
    /// `lambda` is the common group of all strata.
    PredictSurjectivity {
        lambda: String,
        strata: Vec<String>,
        element: Vec<usize>,
    },
    SurjectivitySet {
        lambda: String,
        strata: Vec<String>,
    },
    FanValidate {
        fan: String,
    },
    FanSubdivide {
        fan: String,
        kind: SubdivisionKind,
        #[serde(default)]
        cone: Option<Vec<usize>>,
        #[serde(default)]
        iterations: Option<u32>,
    },
    FanPoints {
        fan: String,
        max_height: u64,
    },
    HeightBoundM {
        morphism: String,
        #[serde(default)]
        cap: Option<u64>,
    },
    OracleRoot {
        family: String,
        prime: u64,
    },
    OracleDensity {
        family: String,
        lower: u64,
        upper: u64,
        #[serde(default)]
        workers: Option<usize>,
    },
    /// Exactly one of `predicted` (a `"p/q"` string) and `predicted_setup`
    /// (whose s-profile mean is used) must be given.
    OracleCompare {
        family: String,
        lower: u64,
        upper: u64,
        tolerance: f64,
        #[serde(default)]
        predicted: Option<String>,
        #[serde(default)]
        predicted_setup: Option<String>,
    },
}

impl Job {
    pub fn command(&self) -> &'static str {
        match self {
            Job::Pseudosplit { .. } => "pseudosplit",
            Job::Split { .. } => "split",
            Job::SProfile { .. } => "s-profile",
            Job::SValue { .. } => "s-value",
            Job::SWitness { .. } => "s-witness",
            Job::DensityS1 { .. } => "density-s1",
            Job::Delta { .. } => "delta",
            Job::PredictSurjectivity { .. } => "predict-surjectivity",
            Job::SurjectivitySet { .. } => "surjectivity-set",
            Job::FanValidate { .. } => "fan-validate",
            Job::FanSubdivide { .. } => "fan-subdivide",
            Job::FanPoints { .. } => "fan-points",
            Job::HeightBoundM { .. } => "height-bound-m",
            Job::OracleRoot { .. } => "oracle-root",
            Job::OracleDensity { .. } => "oracle-density",
            Job::OracleCompare { .. } => "oracle-compare",
        }
    }
}

/// A fully resolved problem file.
#[derive(Clone, Debug)]
pub struct Problem {
    pub groups: BTreeMap<String, PermutationGroup>,
    pub algebras: BTreeMap<String, EtaleAlgebraDescriptor>,
    pub setups: BTreeMap<String, GaloisSetup>,
    pub fans: BTreeMap<String, SmoothKatoFan>,
    pub morphisms: BTreeMap<String, FanMorphism>,
    pub families: BTreeMap<String, PolynomialFamily>,
    pub jobs: Vec<Job>,
}

pub fn parse_problem_file(path: &Path, config: &Config) -> Result<Problem, ProblemError> {
    let text = std::fs::read_to_string(path).map_err(|source| ProblemError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_problem_str(&text, config)
}

pub fn parse_problem_str(text: &str, config: &Config) -> Result<Problem, ProblemError> {
    let raw: RawProblem = serde_json::from_str(text).map_err(|e| ProblemError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    resolve(raw, config)
}

fn perm_of(images: &[usize], degree: usize, loc: &str) -> Result<Permutation, ProblemError> {
    let p = match Permutation::new(images.to_vec()) {
        Ok(p) => p,
        Err(e) => return invalid(loc, e),
    };
    if p.degree() != degree {
        return invalid(loc, format!("expected degree {degree}, got {}", p.degree()));
    }
    Ok(p)
}

fn perms_of(
    list: &[Vec<usize>],
    degree: usize,
    loc: &str,
) -> Result<Vec<Permutation>, ProblemError> {
    list.iter()
        .enumerate()
        .map(|(i, v)| perm_of(v, degree, &format!("{loc}[{i}]")))
        .collect()
}

fn lookup<'a, T>(
    map: &'a BTreeMap<String, T>,
    kind: &str,
    name: &str,
    loc: &str,
) -> Result<&'a T, ProblemError> {
    match map.get(name) {
        Some(t) => Ok(t),
        None => invalid(loc, format!("unknown {kind} {name:?}")),
    }
}

fn resolve(raw: RawProblem, config: &Config) -> Result<Problem, ProblemError> {
    let mut groups = BTreeMap::new();
    for (name, g) in &raw.groups {
        let loc = format!("groups.{name}");
        if g.degree == 0 {
            return invalid(loc, "degree must be positive");
        }
        let gens = perms_of(&g.generators, g.degree, &format!("{loc}.generators"))?;
        match PermutationGroup::with_cap(g.degree, gens, config.group_order_cap) {
            Ok(group) => groups.insert(name.clone(), group),
            Err(e) => return invalid(loc, e),
        };
    }

    let mut algebras = BTreeMap::new();
    for (name, a) in &raw.algebras {
        let loc = format!("algebras.{name}");
        let group = lookup(&groups, "group", &a.group, &format!("{loc}.group"))?;
        let mut comps = vec![];
        for (i, gens) in a.components.iter().enumerate() {
            let cloc = format!("{loc}.components[{i}]");
            let gens = perms_of(gens, group.degree(), &cloc)?;
            match group.subgroup(gens) {
                Ok(h) => comps.push(h),
                Err(e) => return invalid(cloc, e),
            }
        }
        match EtaleAlgebraDescriptor::new(group.clone(), comps) {
            Ok(d) => algebras.insert(name.clone(), d),
            Err(e) => return invalid(loc, e),
        };
    }

    let mut setups = BTreeMap::new();
    for (name, s) in &raw.setups {
        let loc = format!("setups.{name}");
        let setup = resolve_setup(s, &loc, &groups, &algebras)?;
        setups.insert(name.clone(), setup);
    }

    let mut fans = BTreeMap::new();
    for (name, f) in &raw.fans {
        let loc = format!("fans.{name}");
        match SmoothKatoFan::validated(f.dim, f.rays.clone(), f.cones.clone()) {
            Ok(fan) => fans.insert(name.clone(), fan),
            Err(e) => return invalid(loc, e),
        };
    }

    let mut morphisms = BTreeMap::new();
    for (name, m) in &raw.morphisms {
        let loc = format!("morphisms.{name}");
        let source = lookup(&fans, "fan", &m.source, &format!("{loc}.source"))?;
        let target = lookup(&fans, "fan", &m.target, &format!("{loc}.target"))?;
        let cone_map = m.cone_map.iter().map(|c| Cone::new(c.clone())).collect();
        match FanMorphism::new(source.clone(), target.clone(), cone_map, m.matrices.clone()) {
            Ok(phi) => morphisms.insert(name.clone(), phi),
            Err(e) => return invalid(loc, e),
        };
    }

    let mut families = BTreeMap::new();
    for (name, members) in &raw.families {
        let polys = members.iter().map(|c| IntPoly::new(c.clone())).collect();
        match PolynomialFamily::new(polys) {
            Ok(f) => families.insert(name.clone(), f),
            Err(e) => return invalid(format!("families.{name}"), e),
        };
    }

    let problem = Problem {
        groups,
        algebras,
        setups,
        fans,
        morphisms,
        families,
        jobs: raw.jobs,
    };
    for (i, job) in problem.jobs.iter().enumerate() {
        check_job(&problem, job, &format!("jobs[{i}]"))?;
    }
    Ok(problem)
}

fn resolve_setup(
    s: &RawSetup,
    loc: &str,
    groups: &BTreeMap<String, PermutationGroup>,
    algebras: &BTreeMap<String, EtaleAlgebraDescriptor>,
) -> Result<GaloisSetup, ProblemError> {
    if let Some(a) = &s.algebra {
        if s.lambda.is_some()
            || s.g.is_some()
            || s.gamma.is_some()
            || s.n.is_some()
            || s.quotient.is_some()
            || s.fiber.is_some()
            || s.empty_fiber
        {
            return invalid(loc, "\"algebra\" excludes every other setup field");
        }
        let d = lookup(algebras, "algebra", a, &format!("{loc}.algebra"))?;
        return GaloisSetup::from_descriptor(d).or_else(|e| invalid(loc, e));
    }
    let (Some(lname), Some(gname), Some(quot)) = (&s.lambda, &s.g, &s.quotient) else {
        return invalid(
            loc,
            "needs \"lambda\", \"G\" and \"quotient\" (or \"algebra\")",
        );
    };
    let lambda = lookup(groups, "group", lname, &format!("{loc}.lambda"))?;
    let g = lookup(groups, "group", gname, &format!("{loc}.G"))?;
    let gamma = match &s.gamma {
        Some(gens) => {
            let gens = perms_of(gens, lambda.degree(), &format!("{loc}.gamma"))?;
            lambda
                .subgroup(gens)
                .or_else(|e| invalid(format!("{loc}.gamma"), e))?
        }
        None => lambda.whole(),
    };
    let n = match &s.n {
        Some(gens) => {
            let gens = perms_of(gens, g.degree(), &format!("{loc}.N"))?;
            g.subgroup(gens)
                .or_else(|e| invalid(format!("{loc}.N"), e))?
        }
        None => g.trivial_subgroup(),
    };
    let quot = perms_of(quot, lambda.degree(), &format!("{loc}.quotient"))?;
    let fiber = match (&s.fiber, s.empty_fiber) {
        (Some(_), true) => return invalid(loc, "\"fiber\" and \"empty_fiber\" are exclusive"),
        (None, false) => return invalid(loc, "give \"fiber\" or set \"empty_fiber\": true"),
        (None, true) => None,
        (Some(f), false) => {
            let floc = format!("{loc}.fiber");
            if f.size == 0 {
                None
            } else {
                let imgs = perms_of(&f.images, f.size, &format!("{floc}.images"))?;
                Some(GroupAction::new(g.clone(), f.size, imgs).or_else(|e| invalid(floc, e))?)
            }
        }
    };
    GaloisSetup::new(lambda.clone(), gamma, g.clone(), n, quot, fiber).or_else(|e| invalid(loc, e))
}

fn check_job(p: &Problem, job: &Job, loc: &str) -> Result<(), ProblemError> {
    let setup_elem = |setup: &str, element: &[usize]| -> Result<(), ProblemError> {
        let s = lookup(&p.setups, "setup", setup, &format!("{loc}.setup"))?;
        let e = perm_of(element, s.lambda().degree(), &format!("{loc}.element"))?;
        if !s.lambda().contains(&e) {
            return invalid(format!("{loc}.element"), format!("{e} is not in Λ"));
        }
        Ok(())
    };
    let strata = |lambda: &str, strata: &[String]| -> Result<&PermutationGroup, ProblemError> {
        let l = lookup(&p.groups, "group", lambda, &format!("{loc}.lambda"))?;
        for (i, s) in strata.iter().enumerate() {
            lookup(&p.setups, "setup", s, &format!("{loc}.strata[{i}]"))?;
        }
        Ok(l)
    };
    match job {
        Job::Pseudosplit { algebra } | Job::Split { algebra } => {
            lookup(&p.algebras, "algebra", algebra, &format!("{loc}.algebra"))?;
        }
        Job::SProfile { setup } | Job::DensityS1 { setup } | Job::Delta { setup } => {
            lookup(&p.setups, "setup", setup, &format!("{loc}.setup"))?;
        }
        Job::SValue { setup, element } | Job::SWitness { setup, element } => {
            setup_elem(setup, element)?;
        }
        Job::PredictSurjectivity {
            lambda,
            strata: st,
            element,
        } => {
            let l = strata(lambda, st)?;
            let e = perm_of(element, l.degree(), &format!("{loc}.element"))?;
            if !l.contains(&e) {
                return invalid(format!("{loc}.element"), format!("{e} is not in {lambda}"));
            }
        }
        Job::SurjectivitySet { lambda, strata: st } => {
            strata(lambda, st)?;
        }
        Job::FanValidate { fan } | Job::FanPoints { fan, .. } => {
            lookup(&p.fans, "fan", fan, &format!("{loc}.fan"))?;
        }
        Job::FanSubdivide {
            fan,
            kind,
            cone,
            iterations,
        } => {
            lookup(&p.fans, "fan", fan, &format!("{loc}.fan"))?;
            match (kind, cone, iterations) {
                (SubdivisionKind::Star, Some(_), None)
                | (SubdivisionKind::Barycentric, None, None)
                | (SubdivisionKind::Iterated, None, Some(_)) => {}
                _ => return invalid(
                    loc,
                    "star takes \"cone\", iterated takes \"iterations\", barycentric takes neither",
                ),
            }
        }
        Job::HeightBoundM { morphism, .. } => {
            lookup(
                &p.morphisms,
                "morphism",
                morphism,
                &format!("{loc}.morphism"),
            )?;
        }
        Job::OracleRoot { family, .. } | Job::OracleDensity { family, .. } => {
            lookup(&p.families, "family", family, &format!("{loc}.family"))?;
        }
        Job::OracleCompare {
            family,
            predicted,
            predicted_setup,
            ..
        } => {
            lookup(&p.families, "family", family, &format!("{loc}.family"))?;
            match (predicted, predicted_setup) {
                (Some(q), None) => {
                    if rational::parse(q).is_none() {
                        return invalid(
                            format!("{loc}.predicted"),
                            format!("invalid rational {q:?}"),
                        );
                    }
                }
                (None, Some(s)) => {
                    lookup(&p.setups, "setup", s, &format!("{loc}.predicted_setup"))?;
                }
                _ => {
                    return invalid(
                        loc,
                        "give exactly one of \"predicted\" and \"predicted_setup\"",
                    )
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassValue {
    pub representative: Permutation,
    pub cycles: String,
    pub size: usize,
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointRow {
    pub cone: Cone,
    pub coords: Vec<u64>,
    pub height: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanTable {
    pub rays: Vec<Vec<i64>>,
    pub maximal_cones: Vec<Cone>,
}

impl FanTable {
    fn of(f: &SmoothKatoFan) -> Self {
        FanTable {
            rays: f.rays().to_vec(),
            maximal_cones: f.maximal_cones(),
        }
    }
}

/// The result of one job.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum JobOutput {
    Pseudosplit {
        pseudo_split: bool,
        split: bool,
        degrees: Vec<usize>,
        uncovered: Vec<Permutation>,
    },
    Split {
        split: bool,
        fixed_component: Option<usize>,
    },
    SProfile {
        classes: Vec<ClassValue>,
        #[serde(with = "rational::serde_str")]
        mean: Rational,
        empty_fiber: bool,
    },
    SValue {
        element: Permutation,
        #[serde(with = "rational::serde_str")]
        value: Rational,
    },
    SWitness {
        element: Permutation,
        witness: Option<Permutation>,
    },
    Density {
        #[serde(with = "rational::serde_str")]
        value: Rational,
    },
    PredictSurjectivity {
        element: Permutation,
        surjective: bool,
    },
    SurjectivitySet {
        classes: Vec<Permutation>,
        #[serde(with = "rational::serde_str")]
        density: Rational,
    },
    FanValidate {
        valid: bool,
        violations: Vec<String>,
        rays: usize,
        maximal_cones: usize,
    },
    FanSubdivide {
        refined: FanTable,
        valid: bool,
    },
    FanPoints {
        max_height: u64,
        points: Vec<PointRow>,
    },
    HeightBoundM(HeightBound),
    OracleRoot {
        prime: u64,
        has_root: bool,
    },
    OracleDensity(DensityEstimate),
    OracleCompare(ComparisonReport),
}

impl JobOutput {
    fn summary(&self) -> String {
        let q = rational::format;
        match self {
            JobOutput::Pseudosplit {
                pseudo_split,
                split,
                degrees,
                uncovered,
            } => format!(
                "pseudo-split={pseudo_split} split={split} degrees={degrees:?} uncovered={}",
                uncovered.len()
            ),
            JobOutput::Split {
                split,
                fixed_component,
            } => format!("split={split} fixed_component={fixed_component:?}"),
            JobOutput::SProfile {
                classes,
                mean,
                empty_fiber,
            } => {
                let vals: Vec<String> = classes
                    .iter()
                    .map(|c| format!("{}:{}", c.cycles, q(&c.value)))
                    .collect();
                format!(
                    "mean={} empty_fiber={empty_fiber} [{}]",
                    q(mean),
                    vals.join(", ")
                )
            }
            JobOutput::SValue { element, value } => format!("s({element})={}", q(value)),
            JobOutput::SWitness { element, witness } => match witness {
                Some(w) => format!("s({element})<1 witnessed by {w}"),
                None => format!("s({element})=1"),
            },
            JobOutput::Density { value } => q(value),
            JobOutput::PredictSurjectivity {
                element,
                surjective,
            } => format!("{element}: surjective={surjective}"),
            JobOutput::SurjectivitySet { classes, density } => {
                format!("density={} classes={}", q(density), classes.len())
            }
            JobOutput::FanValidate {
                valid, violations, ..
            } => {
                if *valid {
                    "valid".to_string()
                } else {
                    format!("invalid: {}", violations.join("; "))
                }
            }
            JobOutput::FanSubdivide { refined, valid } => format!(
                "{} rays, {} maximal cones, valid={valid}",
                refined.rays.len(),
                refined.maximal_cones.len()
            ),
            JobOutput::FanPoints { max_height, points } => {
                format!("{} points of height <= {max_height}", points.len())
            }
            JobOutput::HeightBoundM(hb) => {
                format!("m={} (cap {}, complete={})", hb.m, hb.cap, hb.complete)
            }
            JobOutput::OracleRoot { prime, has_root } => format!("p={prime}: root={has_root}"),
            JobOutput::OracleDensity(e) => format!(
                "{}/{} good primes in [{}, {}] -> {} ({:.6}); excluded {:?}",
                e.successes,
                e.good_primes,
                e.lower,
                e.upper,
                q(&e.ratio),
                e.ratio_f64(),
                e.excluded
            ),
            JobOutput::OracleCompare(c) => format!(
                "estimate={} predicted={} deviation={} tolerance={} pass={}",
                q(&c.estimate.ratio),
                q(&c.predicted),
                c.deviation_decimal,
                c.tolerance,
                c.pass
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JobStatus {
    Ok,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobReport {
    pub index: usize,
    pub command: String,
    pub status: JobStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<JobOutput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub jobs: Vec<JobReport>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> serde_json::Result<Report> {
        serde_json::from_str(s)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for j in &self.jobs {
            let body = match (&j.result, &j.error) {
                (Some(r), _) => r.summary(),
                (None, Some(e)) => format!("error: {e}"),
                (None, None) => String::new(),
            };
            let _ = writeln!(out, "[{}] {}: {}", j.index, j.command, body);
        }
        out
    }

    pub fn failed_jobs(&self) -> usize {
        self.jobs
            .iter()
            .filter(|j| j.status == JobStatus::Error)
            .count()
    }
}

/// Runs every job, `threads` at a time, and reports them in index order.
pub fn run(problem: &Problem, config: &Config, threads: usize) -> Report {
    let one = |(index, job): (usize, &Job)| {
        let outcome = panic::catch_unwind(AssertUnwindSafe(|| run_job(problem, config, job)))
            .unwrap_or_else(|e| {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Err(format!("internal error: {msg}"))
            });
        let (status, result, error) = match outcome {
            Ok(r) => (JobStatus::Ok, Some(r), None),
            Err(e) => (JobStatus::Error, None, Some(e)),
        };
        JobReport {
            index,
            command: job.command().to_string(),
            status,
            result,
            error,
        }
    };
    let jobs = if threads <= 1 {
        problem.jobs.iter().enumerate().map(one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(|| problem.jobs.par_iter().enumerate().map(one).collect())
    };
    Report {
        schema: REPORT_SCHEMA.to_string(),
        jobs,
    }
}

fn perm(v: &[usize]) -> Permutation {
    Permutation::new(v.to_vec()).expect("checked while loading")
}

fn run_job(p: &Problem, config: &Config, job: &Job) -> Result<JobOutput, String> {
    let e = |x: &dyn std::fmt::Display| x.to_string();
    Ok(match job {
        Job::Pseudosplit { algebra } => {
            let d = &p.algebras[algebra];
            let r = is_pseudo_split(d);
            JobOutput::Pseudosplit {
                pseudo_split: r.is_pseudo_split,
                split: r.is_split,
                degrees: component_degrees(d),
                uncovered: r.uncovered,
            }
        }
        Job::Split { algebra } => {
            let r = is_pseudo_split(&p.algebras[algebra]);
            JobOutput::Split {
                split: r.is_split,
                fixed_component: r.fixed_component,
            }
        }
        Job::SProfile { setup } => {
            let prof = s_profile(&p.setups[setup]);
            let classes = prof
                .values
                .iter()
                .map(|(c, v)| ClassValue {
                    representative: c.representative.clone(),
                    cycles: c.representative.to_string(),
                    size: c.size(),
                    value: v.clone(),
                })
                .collect();
            JobOutput::SProfile {
                classes,
                mean: mean(&prof.values),
                empty_fiber: prof.empty_fiber,
            }
        }
        Job::SValue { setup, element } => {
            let element = perm(element);
            let value = s_value(&p.setups[setup], &element).map_err(|x| e(&x))?;
            JobOutput::SValue { element, value }
        }
        Job::SWitness { setup, element } => {
            let element = perm(element);
            let witness = s_lt_one_witness(&p.setups[setup], &element).map_err(|x| e(&x))?;
            JobOutput::SWitness { element, witness }
        }
        Job::DensityS1 { setup } => JobOutput::Density {
            value: density_s_eq_1(&p.setups[setup]),
        },
        Job::Delta { setup } => JobOutput::Density {
            value: delta(&p.setups[setup]),
        },
        Job::PredictSurjectivity {
            strata, element, ..
        } => {
            let st: Vec<GaloisSetup> = strata.iter().map(|s| p.setups[s].clone()).collect();
            let element = perm(element);
            let surjective = predict_surjectivity(&st, &element).map_err(|x| e(&x))?;
            JobOutput::PredictSurjectivity {
                element,
                surjective,
            }
        }
        Job::SurjectivitySet { lambda, strata } => {
            let st: Vec<GaloisSetup> = strata.iter().map(|s| p.setups[s].clone()).collect();
            let r = surjectivity_set(&p.groups[lambda], &st).map_err(|x| e(&x))?;
            JobOutput::SurjectivitySet {
                classes: r.classes,
                density: r.density,
            }
        }
        Job::FanValidate { fan } => {
            let f = &p.fans[fan];
            let r = validate_smooth_fan(f);
            JobOutput::FanValidate {
                valid: r.is_valid(),
                violations: r.violations,
                rays: f.rays().len(),
                maximal_cones: f.maximal_cones().len(),
            }
        }
        Job::FanSubdivide {
            fan,
            kind,
            cone,
            iterations,
        } => {
            let f = &p.fans[fan];
            let s: Subdivision = match kind {
                SubdivisionKind::Star => {
                    star_subdivision(f, &Cone::new(cone.clone().unwrap_or_default()))
                }
                SubdivisionKind::Barycentric => barycentric_subdivision(f),
                SubdivisionKind::Iterated => iterated_barycentric(f, iterations.unwrap_or(1)),
            }
            .map_err(|x| e(&x))?;
            JobOutput::FanSubdivide {
                valid: validate_smooth_fan(&s.refined).is_valid(),
                refined: FanTable::of(&s.refined),
            }
        }
        Job::FanPoints { fan, max_height } => {
            if *max_height > config.height_cap {
                return Err(format!(
                    "max_height {max_height} exceeds the height cap {}",
                    config.height_cap
                ));
            }
            let points = enumerate_points(&p.fans[fan], *max_height)
                .into_iter()
                .map(|q| PointRow {
                    height: height(&q),
                    cone: q.cone,
                    coords: q.coords,
                })
                .collect();
            JobOutput::FanPoints {
                max_height: *max_height,
                points,
            }
        }
        Job::HeightBoundM { morphism, cap } => {
            let cap = cap.unwrap_or(config.height_cap);
            if cap > config.height_cap {
                return Err(format!(
                    "cap {cap} exceeds the height cap {}",
                    config.height_cap
                ));
            }
            JobOutput::HeightBoundM(height_bound_m(&p.morphisms[morphism], cap).map_err(|x| e(&x))?)
        }
        Job::OracleRoot { family, prime } => JobOutput::OracleRoot {
            prime: *prime,
            has_root: has_qp_root(&p.families[family], *prime).map_err(|x| e(&x))?,
        },
        Job::OracleDensity {
            family,
            lower,
            upper,
            workers,
        } => JobOutput::OracleDensity(
            empirical_density_parallel(&p.families[family], *lower, *upper, workers.unwrap_or(1))
                .map_err(|x| e(&x))?,
        ),
        Job::OracleCompare {
            family,
            lower,
            upper,
            tolerance,
            predicted,
            predicted_setup,
        } => {
            let target = match (predicted, predicted_setup) {
                (Some(q), _) => rational::parse(q).expect("checked while loading"),
                (None, Some(s)) => mean(&s_profile(&p.setups[s]).values),
                (None, None) => unreachable!("checked while loading"),
            };
            JobOutput::OracleCompare(
                compare_with_prediction(&p.families[family], &target, *lower, *upper, *tolerance)
                    .map_err(|x| e(&x))?,
            )
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const KLEIN: &str = r#"{
        "groups": {
            "V4": {"degree": 4, "generators": [[1,0,3,2], [2,3,0,1]]},
            "C2": {"degree": 2, "generators": [[1,0]]}
        },
        "setups": {
            "klein": {"lambda": "V4", "gamma": [[2,3,0,1]], "G": "C2",
                      "quotient": [[2,3,0,1]], "fiber": {"size": 2, "images": [[1,0]]}}
        },
        "jobs": [
            {"command": "density-s1", "setup": "klein"},
            {"command": "delta", "setup": "klein"},
            {"command": "s-value", "setup": "klein", "element": [2,3,0,1]},
            {"command": "s-witness", "setup": "klein", "element": [2,3,0,1]}
        ]
    }"#;

    fn load(s: &str) -> Result<Problem, ProblemError> {
        parse_problem_str(s, &Config::default())
    }

    fn results(r: &Report) -> Vec<&JobOutput> {
        r.jobs.iter().map(|j| j.result.as_ref().unwrap()).collect()
    }

    #[test]
    fn klein_jobs() {
        let p = load(KLEIN).unwrap();
        let r = run(&p, &Config::default(), 1);
        let out = results(&r);
        assert_eq!(
            out[0],
            &JobOutput::Density {
                value: rational::ratio(3, 4)
            }
        );
        assert_eq!(
            out[1],
            &JobOutput::Density {
                value: rational::ratio(1, 2)
            }
        );
        assert!(
            matches!(out[2], JobOutput::SValue { value, .. } if value == &rational::from_int(0))
        );
        assert!(matches!(
            out[3],
            JobOutput::SWitness {
                witness: Some(_),
                ..
            }
        ));
    }

    #[test]
    fn empty_jobs_give_empty_report() {
        let p = load(r#"{"jobs": []}"#).unwrap();
        let r = run(&p, &Config::default(), 1);
        assert!(r.jobs.is_empty());
        assert_eq!(r.schema, REPORT_SCHEMA);
    }

    #[test]
    fn dangling_reference_is_named() {
        let err = load(r#"{"jobs": [{"command": "delta", "setup": "nope"}]}"#).unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("jobs[0].setup") && msg.contains("\"nope\""),
            "{msg}"
        );
        let err = load(r#"{"algebras": {"a": {"group": "S9", "components": []}}}"#).unwrap_err();
        assert!(err.to_string().contains("algebras.a.group"));
    }

    #[test]
    fn malformed_inputs_are_located() {
        let err = load(r#"{"groups": {"g": {"degree": 3, "generators": [[0,0,1]]}}}"#).unwrap_err();
        assert!(
            err.to_string().starts_with("groups.g.generators[0]"),
            "{err}"
        );
        let err = load(r#"{"fans": {"f": {"dim": 2, "rays": [[2,0],[0,1]], "cones": [[0,1]]}}}"#)
            .unwrap_err();
        assert!(err.to_string().starts_with("fans.f"), "{err}");
        // N = <(0 1)> is not normal in S3
        let err = load(
            r#"{"groups": {"S3": {"degree": 3, "generators": [[1,2,0],[1,0,2]]},
                           "T": {"degree": 1, "generators": []}},
                "setups": {"s": {"lambda": "T", "G": "S3", "N": [[1,0,2]],
                                 "quotient": [[0],[0]], "empty_fiber": true}}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("not normal"), "{err}");
        assert!(matches!(
            load("{ not json"),
            Err(ProblemError::Syntax { .. })
        ));
        assert!(matches!(
            load(r#"{"jobs": [{"command": "frobnicate"}]}"#),
            Err(ProblemError::Syntax { .. })
        ));
    }

    #[test]
    fn job_errors_are_isolated() {
        let text = r#"{
            "families": {"i": [[1,0,1]]},
            "jobs": [
                {"command": "oracle-root", "family": "i", "prime": 2},
                {"command": "oracle-root", "family": "i", "prime": 5}
            ]
        }"#;
        let r = run(&load(text).unwrap(), &Config::default(), 2);
        assert_eq!(r.jobs[0].status, JobStatus::Error);
        assert_eq!(
            r.jobs[1].result,
            Some(JobOutput::OracleRoot {
                prime: 5,
                has_root: true
            })
        );
        assert_eq!(r.failed_jobs(), 1);
    }

    #[test]
    fn report_round_trips() {
        let r = run(&load(KLEIN).unwrap(), &Config::default(), 1);
        let json = r.to_json();
        let back = Report::from_json(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), json);
        assert!(json.contains("\"3/4\""));
    }
}
