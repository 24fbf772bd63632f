//! Verification suite: catalog cross-validation, class sharing,
//! counterexamples, the projectability lattice, closed forms, equivariance,
//! score checks and class discrimination, collected into one report.
//!
//! Every section is a pure function of the configuration. Trials draw from
//! counter-mode streams of the master seed, so reports are reproducible
//! byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{expected_mnss, lookup, CatalogEntry};
use crate::coverage::{brute_force_projectable, is_projectable, mcss, mnss, projection_interval, Interval, SampleSize};
use crate::density::{richardson_dlogf, trial_rng, DensityModel, InverseCdfSampler, Sample};
use crate::equivalence::{class_grid, same_class, tilt};
use crate::error::{Error, Result};
use crate::estimator::{closed_form_mle, Estimator, SolverOptions};
use crate::extended::ExtendedReal;
use crate::family::FamilySpec;
use crate::forge::{compare_on_sample, forge_odd_h, verify_counterexample, AgreementReport, HSpec, Witness};
use crate::estimator::LocationSolver;
use crate::score::{kind_score, ImageSummary, KindTag, ParameterKind, ProbeConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// A catalog family and the kinds to check; no kinds means every
/// characterizable kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyCase {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub kinds: Vec<KindTag>,
}

impl FamilyCase {
    pub fn new(name: &str, kinds: &[KindTag]) -> Self {
        Self { name: name.into(), params: BTreeMap::new(), kinds: kinds.to_vec() }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.into(), value);
        self
    }

    fn entry(&self) -> Result<CatalogEntry> {
        lookup(&self.name, &self.params)
    }

    fn resolved_kinds(&self, entry: &CatalogEntry) -> Vec<KindTag> {
        if self.kinds.is_empty() {
            entry.characterizable_kinds()
        } else {
            self.kinds.clone()
        }
    }

    fn key(&self, kind: KindTag) -> String {
        format!("{}/{kind}", self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Residual tolerance of every MLE solve.
    pub mle_tol: f64,
    /// Analytic against finite-difference scores.
    pub score_tol: f64,
    /// Estimates within a class agree to this.
    pub agreement_tol: f64,
    /// Closed form against numeric root.
    pub closed_form_tol: f64,
    pub equivariance_tol: f64,
    /// Recovery of the tilt exponent.
    pub class_tol: f64,
    /// Numeric against analytic finite image bounds, relative.
    pub bounds_rel_tol: f64,
    /// Counterexample agreement at n = 3 on random samples.
    pub forge_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            mle_tol: 1e-10,
            score_tol: 1e-6,
            agreement_tol: 1e-7,
            closed_form_tol: 1e-8,
            equivariance_tol: 1e-8,
            class_tol: 1e-6,
            bounds_rel_tol: 1e-3,
            forge_tol: 1e-4,
        }
    }
}

/// Estimates a forged density must produce on a fixed sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub sample: Vec<f64>,
    pub theta_f: f64,
    pub theta_g: f64,
    pub min_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleCase {
    pub target: FamilySpec,
    /// Parsed by [`HSpec::from_str`](std::str::FromStr).
    pub h: String,
    #[serde(default)]
    pub witness: Option<WitnessCheck>,
    /// Highest admissible agreement fraction at n = 3.
    #[serde(default = "default_max_n3_fraction")]
    pub max_n3_fraction: f64,
}

fn default_max_n3_fraction() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairMember {
    Family(FamilySpec),
    Forged { target: FamilySpec, h: String },
}

impl PairMember {
    fn model(&self) -> Result<DensityModel> {
        match self {
            PairMember::Family(spec) => Ok(spec.resolve()?.model),
            PairMember::Forged { target, h } => forge_odd_h(&target.resolve()?.model, &h.parse()?),
        }
    }

    fn label(&self) -> String {
        match self {
            PairMember::Family(FamilySpec::Catalog { name, .. }) => name.clone(),
            PairMember::Family(FamilySpec::Tabulated(_)) => "tabulated".into(),
            PairMember::Forged { target, h } => {
                let t = PairMember::Family(target.clone()).label();
                format!("forged({t}; {h})")
            }
        }
    }
}

/// Two densities expected to lie in distinct classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistinctPair {
    pub f: PairMember,
    pub g: PairMember,
    pub kind: KindTag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LatticeConfig {
    pub values: Vec<f64>,
    pub n_min: usize,
    pub n_max: usize,
    pub grid: usize,
    /// `(p_minus, p_plus, mcss)` triples checked exactly.
    pub anchors: Vec<(f64, f64, usize)>,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            values: vec![0.5, 1.0, 1.5, 2.0, 3.0],
            n_min: 2,
            n_max: 8,
            grid: 41,
            anchors: vec![(1.0, 3.0, 4), (1.0, 1.0, 2)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub schema_version: u32,
    pub families: Vec<FamilyCase>,
    pub classes: Vec<FamilyCase>,
    pub tilts: Vec<f64>,
    pub counterexamples: Vec<CounterexampleCase>,
    pub distinct_pairs: Vec<DistinctPair>,
    pub trials: usize,
    pub sample_sizes: Vec<usize>,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub closed_form_samples: usize,
    /// Inclusive range of closed-form sample sizes.
    pub closed_form_sizes: (usize, usize),
    pub shifts: Vec<f64>,
    pub rescales: Vec<f64>,
    pub lattice: LatticeConfig,
    pub output_path: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        use KindTag::{Group, Location, Scale};
        let mut families = vec![FamilyCase::new("gaussian", &[Location, Scale])];
        families.extend([0.5, 1.0, 2.0, 5.0].map(|a| FamilyCase::new("gamma", &[Scale]).with("alpha", a)));
        families.push(FamilyCase::new("generalized_gaussian", &[Location]));
        families.push(FamilyCase::new("laplace", &[Scale]));
        families.extend([0.5, 1.0, 2.0, 3.0].map(|k| FamilyCase::new("weibull", &[Scale]).with("k", k)));
        families.push(FamilyCase::new("gumbel", &[Location, Scale]));
        families.push(FamilyCase::new("logistic", &[Location, Scale]));
        families.push(FamilyCase::new("sinh_arcsinh_skew_normal", &[Group]));
        families.extend([0.5, 1.0, 2.0, 3.0, 5.0].map(|nu| FamilyCase::new("student", &[Scale]).with("nu", nu)));

        let classes = vec![
            FamilyCase::new("gaussian", &[Location]),
            FamilyCase::new("logistic", &[Location]),
            FamilyCase::new("gumbel", &[Location]),
            FamilyCase::new("gamma", &[Scale]).with("alpha", 2.0),
            FamilyCase::new("weibull", &[Scale]).with("k", 2.0),
        ];
        let quartic = "odd-power:d=1,p=3".to_string();
        let counterexamples = vec![CounterexampleCase {
            target: FamilySpec::catalog("gaussian"),
            h: quartic.clone(),
            witness: Some(WitnessCheck {
                sample: vec![0.0, 0.0, 3.0],
                theta_f: 1.0,
                // real root of 2 t^3 = (3 - t)^3
                theta_g: 3.0 / (1.0 + 2f64.cbrt()),
                min_gap: 0.3,
            }),
            max_n3_fraction: default_max_n3_fraction(),
        }];
        let gaussian = || PairMember::Family(FamilySpec::catalog("gaussian"));
        let distinct_pairs = vec![
            DistinctPair {
                f: gaussian(),
                g: PairMember::Family(FamilySpec::catalog("logistic")),
                kind: Location,
            },
            DistinctPair {
                f: gaussian(),
                g: PairMember::Forged { target: FamilySpec::catalog("gaussian"), h: quartic },
                kind: Location,
            },
        ];
        Self {
            schema_version: SCHEMA_VERSION,
            families,
            classes,
            tilts: vec![0.5, 2.0, 5.0],
            counterexamples,
            distinct_pairs,
            trials: 200,
            sample_sizes: vec![3, 5, 8],
            seed: 42,
            tolerances: Tolerances::default(),
            closed_form_samples: 500,
            closed_form_sizes: (2, 12),
            shifts: vec![-5.0, 1.0, 10.0],
            rescales: vec![0.5, 2.0, 10.0],
            lattice: LatticeConfig::default(),
            output_path: None,
        }
    }
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SuiteConfig = serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("schema_version {} is not {SCHEMA_VERSION}", self.schema_version));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.sample_sizes.iter().any(|&n| n == 0) {
            return bad("every sample size must be at least 1".into());
        }
        let t = &self.tolerances;
        let tols = [
            t.mle_tol,
            t.score_tol,
            t.agreement_tol,
            t.closed_form_tol,
            t.equivariance_tol,
            t.class_tol,
            t.bounds_rel_tol,
            t.forge_tol,
        ];
        if tols.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return bad("tolerances must be positive and finite".into());
        }
        if self.tilts.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
            return bad("tilt exponents must be positive".into());
        }
        let (lo, hi) = self.closed_form_sizes;
        if lo == 0 || lo > hi {
            return bad(format!("closed_form_sizes ({lo}, {hi}) is not a valid range"));
        }
        if self.rescales.iter().any(|&l| !(l > 0.0 && l.is_finite())) || self.shifts.iter().any(|s| !s.is_finite()) {
            return bad("rescales must be positive and shifts finite".into());
        }
        let l = &self.lattice;
        if !(3..=101).contains(&l.grid) || l.n_min < 1 || l.n_min > l.n_max || l.n_max > 8 {
            return bad("lattice needs 3 <= grid <= 101 and 1 <= n_min <= n_max <= 8".into());
        }
        if l.values.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return bad("lattice values must be positive and finite".into());
        }
        Ok(())
    }

    fn solver_opts(&self) -> SolverOptions {
        SolverOptions::with_tol(self.tolerances.mle_tol)
    }
}

/// Stream index of trial `trial` in case `case` of section `section`.
fn stream(section: u64, case: usize, trial: usize) -> u64 {
    (section << 56) | ((case as u64) << 32) | trial as u64
}

fn draw(sampler: &InverseCdfSampler, n: usize, seed: u64, index: u64) -> Result<Sample> {
    sampler.sample_with(n, &mut trial_rng(seed, index))
}

/// Per-piece image bounds and coverage of one family and kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub key: String,
    pub params: BTreeMap<String, f64>,
    pub pieces: Vec<ImageSummary>,
    pub mcss: Vec<SampleSize>,
    pub mnss: SampleSize,
    pub expected_mnss: SampleSize,
    pub provenance: String,
    pub needs_scale_identification: bool,
    pub matches: bool,
    pub passed: bool,
}

pub fn family_records(cfg: &SuiteConfig) -> Result<Vec<FamilyRecord>> {
    let probe = ProbeConfig::default();
    let jobs = family_jobs(&cfg.families)?;
    jobs.par_iter()
        .map(|(case, entry, kind)| {
            let profiles = entry.analyze(*kind, &probe)?;
            let computed = mnss(&profiles)?.value;
            let expected = expected_mnss(entry, *kind)?;
            let mcss = profiles
                .iter()
                .map(|p| mcss(p.p_minus, p.p_plus).map(|m| m.value))
                .collect::<Result<Vec<_>>>()?;
            let provenance = profiles
                .iter()
                .map(|p| p.provenance.to_string())
                .collect::<Vec<_>>()
                .join("; ");
            let matches = computed == expected;
            Ok(FamilyRecord {
                key: case.key(*kind),
                params: entry.params.clone(),
                pieces: profiles.iter().map(|p| p.summary()).collect(),
                mcss,
                mnss: computed,
                expected_mnss: expected,
                provenance,
                needs_scale_identification: entry.needs_scale_identification,
                matches,
                passed: matches,
            })
        })
        .collect()
}

fn family_jobs(cases: &[FamilyCase]) -> Result<Vec<(FamilyCase, CatalogEntry, KindTag)>> {
    let mut jobs = Vec::new();
    for case in cases {
        let entry = case.entry()?;
        for kind in case.resolved_kinds(&entry) {
            jobs.push((case.clone(), entry.clone(), kind));
        }
    }
    Ok(jobs)
}

/// Analytic bounds of one piece against the numeric endpoint walk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub analytic: (ExtendedReal, ExtendedReal),
    pub numeric: (ExtendedReal, ExtendedReal),
    pub finiteness_match: bool,
    pub max_rel_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub key: String,
    pub params: BTreeMap<String, f64>,
    pub grid_points: usize,
    /// Analytic score against the finite-difference score.
    pub max_abs_diff: f64,
    pub bounds: Vec<BoundCheck>,
    pub passed: bool,
}

const SCORE_GRID: usize = 201;
/// Coarse step of the extrapolated difference used against analytic scores.
const FD_STEP: f64 = 1e-3;

pub fn score_records(cfg: &SuiteConfig) -> Result<Vec<ScoreRecord>> {
    let probe = ProbeConfig::default();
    let jobs = family_jobs(&cfg.families)?;
    jobs.par_iter()
        .map(|(case, entry, kind)| {
            let k = entry.parameter_kind(*kind)?;
            let model = entry.score_model(*kind);
            let plain = model.without_derivative();
            let fd_model = plain.clone().with_derivative(move |x| richardson_dlogf(&plain, x, FD_STEP).unwrap_or(f64::NAN));
            let analytic = entry
                .kind(*kind)
                .and_then(|e| e.analytic_score.clone())
                .ok_or_else(|| Error::NotCharacterizable(format!("{} has no analytic score", case.key(*kind))))?;
            let mut max_abs_diff = 0.0f64;
            for x in model.support().probe_grid(SCORE_GRID, probe.half_width) {
                let fd = kind_score(&fd_model, &k, x)?;
                max_abs_diff = max_abs_diff.max((analytic(x) - fd).abs());
            }
            let numeric = entry.analyze_numeric(*kind, &probe)?;
            let expected = entry.kind(*kind).map(|e| e.analytic_bounds.clone()).unwrap_or_default();
            if expected.len() != numeric.len() {
                return Err(Error::NotCharacterizable(format!(
                    "{}: {} analytic pieces for {} analyzed pieces",
                    case.key(*kind),
                    expected.len(),
                    numeric.len()
                )));
            }
            let bounds: Vec<BoundCheck> = expected
                .iter()
                .zip(&numeric)
                .map(|(&(am, ap), p)| bound_check((am, ap), (p.numeric_p_minus, p.numeric_p_plus)))
                .collect();
            let tol = &cfg.tolerances;
            let passed = max_abs_diff < tol.score_tol
                && bounds.iter().all(|b| b.finiteness_match && b.max_rel_err < tol.bounds_rel_tol);
            Ok(ScoreRecord {
                key: case.key(*kind),
                params: entry.params.clone(),
                grid_points: SCORE_GRID,
                max_abs_diff,
                bounds,
                passed,
            })
        })
        .collect()
}

fn bound_check(analytic: (ExtendedReal, ExtendedReal), numeric: (ExtendedReal, ExtendedReal)) -> BoundCheck {
    let pairs = [(analytic.0, numeric.0), (analytic.1, numeric.1)];
    let finiteness_match = pairs.iter().all(|(a, n)| a.is_finite() == n.is_finite());
    let max_rel_err = pairs
        .iter()
        .filter_map(|(a, n)| match (a, n) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(n)) => Some((a - n).abs() / a.abs().max(1e-300)),
            _ => None,
        })
        .fold(0.0, f64::max);
    BoundCheck { analytic, numeric, finiteness_match, max_rel_err }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharingBySize {
    pub n: usize,
    pub trials: usize,
    pub max_gap: f64,
}

/// MLE sharing between a family and one of its tilts, and recovery of the
/// tilt exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub key: String,
    pub params: BTreeMap<String, f64>,
    pub d: f64,
    pub sharing: Vec<SharingBySize>,
    pub recovered_d: Option<f64>,
    pub d_error: Option<f64>,
    pub shared: bool,
    pub recovered: bool,
    pub passed: bool,
}

pub fn class_records(cfg: &SuiteConfig) -> Result<Vec<ClassRecord>> {
    let jobs: Vec<_> = family_jobs(&cfg.classes)?
        .into_iter()
        .flat_map(|(c, e, k)| cfg.tilts.iter().map(move |&d| (c.clone(), e.clone(), k, d)))
        .collect();
    jobs.par_iter()
        .enumerate()
        .map(|(case_index, (case, entry, kind, d))| {
            let k = entry.parameter_kind(*kind)?;
            let base = entry.score_model(*kind);
            let g = tilt(base, *d, &k)?.model;
            let sf = Estimator::new(base, &k, cfg.solver_opts())?;
            let sg = Estimator::new(&g, &k, cfg.solver_opts())?;
            let sampler = InverseCdfSampler::new(&entry.model)?;
            let sharing = cfg
                .sample_sizes
                .iter()
                .enumerate()
                .map(|(si, &n)| {
                    let gaps = (0..cfg.trials)
                        .into_par_iter()
                        .map(|t| {
                            let s = draw(&sampler, n, cfg.seed, stream(1, case_index, si * cfg.trials + t))?;
                            Ok((sf.solve(&s)?.theta_hat - sg.solve(&s)?.theta_hat).abs())
                        })
                        .collect::<Result<Vec<f64>>>()?;
                    Ok(SharingBySize { n, trials: cfg.trials, max_gap: gaps.into_iter().fold(0.0, f64::max) })
                })
                .collect::<Result<Vec<_>>>()?;
            let recovered_d = same_class(base, &g, &k, &class_grid(&base.support()), cfg.tolerances.class_tol)?;
            let d_error = recovered_d.map(|r| (r - d).abs());
            let shared = sharing.iter().all(|s| s.max_gap < cfg.tolerances.agreement_tol);
            let recovered = d_error.is_some_and(|e| e < cfg.tolerances.class_tol);
            Ok(ClassRecord {
                key: case.key(*kind),
                params: entry.params.clone(),
                d: *d,
                sharing,
                recovered_d,
                d_error,
                shared,
                recovered,
                passed: shared && recovered,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRecord {
    pub target: String,
    pub h: String,
    pub n2: AgreementReport,
    pub n3: AgreementReport,
    pub witness: Option<Witness>,
    pub witness_expected: Option<WitnessCheck>,
    pub witness_ok: bool,
    pub distinct_class: bool,
    pub passed: bool,
}

pub fn counterexample_records(cfg: &SuiteConfig) -> Result<Vec<CounterexampleRecord>> {
    cfg.counterexamples
        .iter()
        .enumerate()
        .map(|(i, case)| {
            let f = case.target.resolve()?.model;
            let h: HSpec = case.h.parse()?;
            let g = forge_odd_h(&f, &h)?;
            let tol = &cfg.tolerances;
            let seed2 = cfg.seed ^ stream(2, i, 0);
            let seed3 = cfg.seed ^ stream(3, i, 0);
            let n2 = verify_counterexample(&f, &g, 2, cfg.trials, seed2, tol.agreement_tol)?;
            let n3 = verify_counterexample(&f, &g, 3, cfg.trials, seed3, tol.forge_tol)?;
            let (witness, witness_ok) = match &case.witness {
                Some(w) => {
                    let sf = LocationSolver::new(&f, cfg.solver_opts())?;
                    let sg = LocationSolver::new(&g, cfg.solver_opts())?;
                    let got = compare_on_sample(&sf, &sg, &Sample::new(w.sample.clone())?)?;
                    let ok = (got.theta_f - w.theta_f).abs() < tol.closed_form_tol
                        && (got.theta_g - w.theta_g).abs() < tol.closed_form_tol
                        && got.gap > w.min_gap;
                    (Some(got), ok)
                }
                None => (None, true),
            };
            let grid = class_grid(&f.support());
            let distinct_class = same_class(&f, &g, &ParameterKind::Location, &grid, tol.class_tol)?.is_none();
            let sharp = n2.fraction == 1.0 && n3.fraction <= case.max_n3_fraction;
            Ok(CounterexampleRecord {
                target: PairMember::Family(case.target.clone()).label(),
                h: case.h.clone(),
                n2,
                n3,
                witness,
                witness_expected: case.witness.clone(),
                witness_ok,
                distinct_class,
                passed: sharp && witness_ok && distinct_class,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeRecord {
    pub p_minus: f64,
    pub p_plus: f64,
    pub n: usize,
    pub projection: Interval,
    pub formula: bool,
    pub brute_force: bool,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McssAnchor {
    pub p_minus: f64,
    pub p_plus: f64,
    pub expected: SampleSize,
    pub computed: SampleSize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSection {
    pub grid: usize,
    pub total: usize,
    pub agreed: usize,
    pub cases: Vec<LatticeRecord>,
    pub anchors: Vec<McssAnchor>,
    pub passed: bool,
}

pub fn lattice_section(cfg: &SuiteConfig) -> Result<LatticeSection> {
    let l = &cfg.lattice;
    let mut points = Vec::new();
    for &pm in &l.values {
        for &pp in &l.values {
            for n in l.n_min..=l.n_max {
                points.push((pm, pp, n));
            }
        }
    }
    let cases = points
        .par_iter()
        .map(|&(pm, pp, n)| {
            let (m, p) = (ExtendedReal::Finite(pm), ExtendedReal::Finite(pp));
            let formula = is_projectable(m, p, n)?;
            let brute_force = brute_force_projectable(pm, pp, n, l.grid)?;
            Ok(LatticeRecord {
                p_minus: pm,
                p_plus: pp,
                n,
                projection: projection_interval(m, p, n),
                formula,
                brute_force,
                agree: formula == brute_force,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let anchors = l
        .anchors
        .iter()
        .map(|&(pm, pp, expected)| {
            let computed = mcss(ExtendedReal::Finite(pm), ExtendedReal::Finite(pp))?.value;
            let expected = SampleSize::Finite(expected);
            Ok(McssAnchor { p_minus: pm, p_plus: pp, expected, computed, passed: computed == expected })
        })
        .collect::<Result<Vec<_>>>()?;
    let agreed = cases.iter().filter(|c| c.agree).count();
    let passed = agreed == cases.len() && anchors.iter().all(|a| a.passed);
    Ok(LatticeSection { grid: l.grid, total: cases.len(), agreed, cases, anchors, passed })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormRecord {
    pub key: String,
    pub params: BTreeMap<String, f64>,
    pub formula: String,
    pub samples: usize,
    /// Relative deviation for the scale kind, absolute otherwise.
    pub relative: bool,
    pub max_deviation: f64,
    pub within_tol: usize,
    pub passed: bool,
}

pub fn closed_form_records(cfg: &SuiteConfig) -> Result<Vec<ClosedFormRecord>> {
    let jobs: Vec<_> = family_jobs(&cfg.families)?
        .into_iter()
        .filter(|(_, e, k)| e.closed_form(*k).is_some())
        .collect();
    let (lo, hi) = cfg.closed_form_sizes;
    jobs.par_iter()
        .enumerate()
        .map(|(case_index, (case, entry, kind))| {
            let form = entry.closed_form(*kind).expect("filtered above");
            let solver = Estimator::new(&entry.model, &entry.parameter_kind(*kind)?, cfg.solver_opts())?;
            let sampler = InverseCdfSampler::new(&entry.model)?;
            let relative = *kind == KindTag::Scale;
            let devs = (0..cfg.closed_form_samples)
                .into_par_iter()
                .map(|i| {
                    let n = lo + i % (hi - lo + 1);
                    let s = draw(&sampler, n, cfg.seed, stream(4, case_index, i))?;
                    let closed = closed_form_mle(entry, *kind, &s)?.theta_hat;
                    let numeric = solver.solve(&s)?.theta_hat;
                    let dev = (closed - numeric).abs();
                    Ok(if relative { dev / closed.abs() } else { dev })
                })
                .collect::<Result<Vec<f64>>>()?;
            let tol = cfg.tolerances.closed_form_tol;
            let within_tol = devs.iter().filter(|&&d| d < tol).count();
            Ok(ClosedFormRecord {
                key: case.key(*kind),
                params: entry.params.clone(),
                formula: form.id().to_string(),
                samples: devs.len(),
                relative,
                max_deviation: devs.iter().copied().fold(0.0, f64::max),
                within_tol,
                passed: within_tol == devs.len(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivarianceRecord {
    pub key: String,
    pub params: BTreeMap<String, f64>,
    /// Shifts for the location kind, rescale factors for the scale kind.
    pub transforms: Vec<f64>,
    pub samples: usize,
    pub max_deviation: f64,
    pub passed: bool,
}

pub fn equivariance_records(cfg: &SuiteConfig) -> Result<Vec<EquivarianceRecord>> {
    let jobs: Vec<_> = family_jobs(&cfg.families)?
        .into_iter()
        .filter(|(_, _, k)| matches!(k, KindTag::Location | KindTag::Scale))
        .collect();
    jobs.par_iter()
        .enumerate()
        .map(|(case_index, (case, entry, kind))| {
            let solver = Estimator::new(&entry.model, &entry.parameter_kind(*kind)?, cfg.solver_opts())?;
            let sampler = InverseCdfSampler::new(&entry.model)?;
            let transforms = if *kind == KindTag::Location { &cfg.shifts } else { &cfg.rescales };
            let sizes = if cfg.sample_sizes.is_empty() { vec![3] } else { cfg.sample_sizes.clone() };
            let devs = (0..cfg.trials)
                .into_par_iter()
                .map(|i| {
                    let s = draw(&sampler, sizes[i % sizes.len()], cfg.seed, stream(5, case_index, i))?;
                    let base = solver.solve(&s)?.theta_hat;
                    let mut worst = 0.0f64;
                    for &c in transforms {
                        let dev = if *kind == KindTag::Location {
                            let moved = solver.solve(&s.map(|x| x + c)?)?.theta_hat;
                            (moved - base - c).abs()
                        } else {
                            let moved = solver.solve(&s.map(|x| x * c)?)?.theta_hat;
                            (moved * c / base - 1.0).abs()
                        };
                        worst = worst.max(dev);
                    }
                    Ok(worst)
                })
                .collect::<Result<Vec<f64>>>()?;
            let max_deviation = devs.into_iter().fold(0.0, f64::max);
            Ok(EquivarianceRecord {
                key: case.key(*kind),
                params: entry.params.clone(),
                transforms: transforms.clone(),
                samples: cfg.trials,
                max_deviation,
                passed: max_deviation < cfg.tolerances.equivariance_tol,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminationRecord {
    pub f: String,
    pub g: String,
    pub kind: KindTag,
    /// Exponent `d` when the pair was judged to share a class.
    pub recovered_d: Option<f64>,
    pub passed: bool,
}

pub fn discrimination_records(cfg: &SuiteConfig) -> Result<Vec<DiscriminationRecord>> {
    cfg.distinct_pairs
        .par_iter()
        .map(|pair| {
            let f = pair.f.model()?;
            let g = pair.g.model()?;
            let kind = match pair.kind {
                KindTag::Location => ParameterKind::Location,
                KindTag::Scale => ParameterKind::Scale,
                KindTag::Group => {
                    return Err(Error::InvalidConfig("distinct pairs support location and scale only".into()))
                }
            };
            let recovered_d = same_class(&f, &g, &kind, &class_grid(&f.support()), cfg.tolerances.class_tol)?;
            Ok(DiscriminationRecord {
                f: pair.f.label(),
                g: pair.g.label(),
                kind: pair.kind,
                recovered_d,
                passed: recovered_d.is_none(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub seed: u64,
    pub trials: usize,
    pub passed: bool,
    pub families: Vec<FamilyRecord>,
    pub scores: Vec<ScoreRecord>,
    pub classes: Vec<ClassRecord>,
    pub counterexamples: Vec<CounterexampleRecord>,
    pub lattice: LatticeSection,
    pub closed_forms: Vec<ClosedFormRecord>,
    pub equivariance: Vec<EquivarianceRecord>,
    pub discrimination: Vec<DiscriminationRecord>,
}

impl SuiteReport {
    /// `(section, passed)` for every section.
    pub fn verdicts(&self) -> Vec<(&'static str, bool)> {
        vec![
            ("lattice", self.lattice.passed),
            ("families", self.families.iter().all(|r| r.passed)),
            ("classes", self.classes.iter().all(|r| r.passed)),
            ("counterexamples", self.counterexamples.iter().all(|r| r.passed)),
            ("closed_forms", self.closed_forms.iter().all(|r| r.passed)),
            ("equivariance", self.equivariance.iter().all(|r| r.passed)),
            ("scores", self.scores.iter().all(|r| r.passed)),
            ("discrimination", self.discrimination.iter().all(|r| r.passed)),
        ]
    }
}

/// Runs every section and writes the machine report to `output_path` when set.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let mut report = SuiteReport {
        schema_version: SCHEMA_VERSION,
        seed: cfg.seed,
        trials: cfg.trials,
        passed: false,
        families: family_records(cfg)?,
        scores: score_records(cfg)?,
        classes: class_records(cfg)?,
        counterexamples: counterexample_records(cfg)?,
        lattice: lattice_section(cfg)?,
        closed_forms: closed_form_records(cfg)?,
        equivariance: equivariance_records(cfg)?,
        discrimination: discrimination_records(cfg)?,
    };
    report.passed = report.verdicts().iter().all(|(_, ok)| *ok);
    if let Some(path) = &cfg.output_path {
        std::fs::write(path, emit_report(&report, ReportFormat::Machine)?)?;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Machine,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "machine" | "json" => Ok(ReportFormat::Machine),
            other => Err(Error::Parse(format!("unknown report format `{other}`"))),
        }
    }
}

pub fn emit_report(report: &SuiteReport, format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Machine => {
            let mut out = serde_json::to_vec_pretty(report)?;
            out.push(b'\n');
            Ok(out)
        }
        ReportFormat::Text => Ok(text_report(report).into_bytes()),
    }
}

pub fn parse_report(bytes: &[u8]) -> Result<SuiteReport> {
    let report: SuiteReport = serde_json::from_slice(bytes)?;
    if report.schema_version != SCHEMA_VERSION {
        return Err(Error::Parse(format!("unsupported schema_version {}", report.schema_version)));
    }
    Ok(report)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn params_label(p: &BTreeMap<String, f64>) -> String {
    if p.is_empty() {
        return "-".into();
    }
    p.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",")
}

fn opt(v: Option<f64>) -> String {
    v.map_or("-".into(), |v| format!("{v:.3e}"))
}

fn text_report(r: &SuiteReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "schema {}  seed {}  trials {}", r.schema_version, r.seed, r.trials);

    let _ = writeln!(s, "\n[families]");
    let _ = writeln!(s, "{:<32} {:<16} {:>10} {:>6} {:>8}  {:<9} verdict", "key", "params", "mcss", "mnss", "expected", "bounds");
    for f in &r.families {
        let mcss = f.mcss.iter().map(|m| m.to_string()).collect::<Vec<_>>().join("|");
        let prov = if f.provenance.contains("numeric") { "numeric" } else { "analytic" };
        let _ = writeln!(
            s,
            "{:<32} {:<16} {:>10} {:>6} {:>8}  {:<9} {}",
            f.key, params_label(&f.params), mcss, f.mnss.to_string(), f.expected_mnss.to_string(), prov, verdict(f.passed)
        );
    }

    let _ = writeln!(s, "\n[scores]");
    let _ = writeln!(s, "{:<32} {:<16} {:>12} {:>12}  verdict", "key", "params", "max |a-fd|", "bound rel");
    for x in &r.scores {
        let rel = x.bounds.iter().map(|b| b.max_rel_err).fold(0.0, f64::max);
        let _ = writeln!(s, "{:<32} {:<16} {:>12.3e} {:>12.3e}  {}", x.key, params_label(&x.params), x.max_abs_diff, rel, verdict(x.passed));
    }

    let _ = writeln!(s, "\n[classes]");
    let _ = writeln!(s, "{:<20} {:<10} {:>5} {:>12} {:>12}  verdict", "key", "params", "d", "max gap", "d error");
    for c in &r.classes {
        let gap = c.sharing.iter().map(|x| x.max_gap).fold(0.0, f64::max);
        let _ = writeln!(s, "{:<20} {:<10} {:>5} {:>12.3e} {:>12}  {}", c.key, params_label(&c.params), c.d, gap, opt(c.d_error), verdict(c.passed));
    }

    let _ = writeln!(s, "\n[counterexamples]");
    for c in &r.counterexamples {
        let _ = writeln!(s, "{} vs h = {}", c.target, c.h);
        let _ = writeln!(s, "  n=2 agreement {:.3} (tol {:e})", c.n2.fraction, c.n2.tol);
        let _ = writeln!(s, "  n=3 agreement {:.3} (tol {:e})", c.n3.fraction, c.n3.tol);
        if let Some(w) = &c.witness {
            let _ = writeln!(s, "  witness {:?}: {:.12} vs {:.12} (gap {:.5})", w.sample, w.theta_f, w.theta_g, w.gap);
        }
        let _ = writeln!(s, "  distinct class {}  {}", c.distinct_class, verdict(c.passed));
    }

    let l = &r.lattice;
    let _ = writeln!(s, "\n[lattice]");
    let _ = writeln!(s, "formula vs brute force (grid {}): {}/{}", l.grid, l.agreed, l.total);
    for a in &l.anchors {
        let _ = writeln!(s, "mcss({}, {}) = {} (expected {})  {}", a.p_minus, a.p_plus, a.computed, a.expected, verdict(a.passed));
    }
    for c in l.cases.iter().filter(|c| !c.agree) {
        let _ = writeln!(s, "  disagreement at ({}, {}), n = {}", c.p_minus, c.p_plus, c.n);
    }

    let _ = writeln!(s, "\n[closed_forms]");
    let _ = writeln!(s, "{:<32} {:<16} {:<18} {:>12} {:>9}  verdict", "key", "params", "formula", "max dev", "within");
    for c in &r.closed_forms {
        let _ = writeln!(
            s,
            "{:<32} {:<16} {:<18} {:>12.3e} {:>4}/{:<4}  {}",
            c.key, params_label(&c.params), c.formula, c.max_deviation, c.within_tol, c.samples, verdict(c.passed)
        );
    }

    let _ = writeln!(s, "\n[equivariance]");
    for e in &r.equivariance {
        let _ = writeln!(s, "{:<32} {:<16} {:>12.3e}  {}", e.key, params_label(&e.params), e.max_deviation, verdict(e.passed));
    }

    let _ = writeln!(s, "\n[discrimination]");
    for d in &r.discrimination {
        let _ = writeln!(s, "{} vs {} ({}): {}  {}", d.f, d.g, d.kind, d.recovered_d.map_or("distinct".into(), |v| format!("d = {v}")), verdict(d.passed));
    }

    let _ = writeln!(s, "\n[verdicts]");
    for (name, ok) in r.verdicts() {
        let _ = writeln!(s, "{name:<16} {}", verdict(ok));
    }
    let _ = writeln!(s, "overall          {}", verdict(r.passed));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig {
            families: vec![FamilyCase::new("gaussian", &[KindTag::Location])],
            classes: vec![FamilyCase::new("gaussian", &[KindTag::Location])],
            tilts: vec![2.0],
            counterexamples: Vec::new(),
            distinct_pairs: Vec::new(),
            trials: 5,
            closed_form_samples: 10,
            lattice: LatticeConfig { values: vec![1.0, 3.0], n_max: 4, grid: 11, ..LatticeConfig::default() },
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn rejects_zero_trials() {
        let cfg = SuiteConfig { trials: 0, ..small() };
        assert!(matches!(run_suite(&cfg), Err(Error::InvalidConfig(_))));
        assert!(matches!(SuiteConfig::from_json(r#"{"trials": 0}"#), Err(Error::InvalidConfig(_))));
        assert!(matches!(SuiteConfig::from_json(r#"{"bogus": 0}"#).map(|c| c.trials), Ok(200)));
    }

    #[test]
    fn gaussian_location_only() {
        let r = run_suite(&small()).unwrap();
        assert_eq!(r.families.len(), 1);
        assert_eq!(r.families[0].key, "gaussian/location");
        assert_eq!(r.families[0].mnss, SampleSize::Finite(3));
        assert!(r.families[0].matches);
        assert!(r.passed, "{}", text_report(&r));
    }

    #[test]
    fn machine_roundtrip_and_determinism() {
        let a = run_suite(&small()).unwrap();
        let bytes = emit_report(&a, ReportFormat::Machine).unwrap();
        assert_eq!(parse_report(&bytes).unwrap(), a);
        let b = emit_report(&run_suite(&small()).unwrap(), ReportFormat::Machine).unwrap();
        assert_eq!(bytes, b);
    }

    #[test]
    fn empty_families() {
        let cfg = SuiteConfig { families: Vec::new(), ..small() };
        let r = run_suite(&cfg).unwrap();
        let text = String::from_utf8(emit_report(&r, ReportFormat::Machine).unwrap()).unwrap();
        assert!(text.contains("\"schema_version\": 1"));
        assert!(text.contains("\"families\": []"));
    }

    #[test]
    fn config_roundtrip() {
        let cfg = SuiteConfig::default();
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(SuiteConfig::from_json(&json).unwrap(), cfg);
    }
}
