//! Staged runs (plan, basis, matrix, bounds, zeta) with caching and a
//! structured report.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dense::Graded;
use crate::error::{Error, Result};
use crate::frobenius::{assemble_matrix, lattice_shift, rank_diagnostic, DeltaPowers, FrobMatrix};
use crate::geometry::{build_basis, parse_and_lift, CohomologyBasis, HodgeProfile, HypersurfaceSpec, LiftSource, ProblemFile};
use crate::groebner::{cache_key, StrongGB};
use crate::precision::{choose_working_precision, PrecisionPlan};
use crate::reduction::ReductionContext;
use crate::residue::Modulus;
use crate::spectral::{charpoly_mod, geometric_picard_bound, ModMatrix, TateBoundReport};
use crate::zeta::{curve_charpoly_from_counts, trace_consistency, PointCountSeries, TraceVerdict, DEFAULT_COUNT_CAP};

/// Environment variable naming the default cache directory.
pub const CACHE_DIR_ENV: &str = "HYPERFROB_CACHE_DIR";

pub const DEFAULT_MEMORY_LIMIT: u64 = 8 << 30;

pub const HEURISTIC_STAMP: &str = "heuristic: insufficient certified precision";
pub const CERTIFIED_STAMP: &str = "certified";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Plan,
    Basis,
    Matrix,
    Bounds,
    Zeta,
    Full,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Mode> {
        Ok(match s {
            "plan" => Mode::Plan,
            "basis" => Mode::Basis,
            "matrix" => Mode::Matrix,
            "bounds" => Mode::Bounds,
            "zeta" => Mode::Zeta,
            "full" => Mode::Full,
            _ => return Err(Error::Input(format!("unknown mode {s:?}"))),
        })
    }

    fn wants_basis(self) -> bool {
        matches!(self, Mode::Basis | Mode::Matrix | Mode::Bounds | Mode::Full)
    }

    fn wants_matrix(self) -> bool {
        matches!(self, Mode::Matrix | Mode::Bounds | Mode::Full)
    }

    fn wants_bounds(self) -> bool {
        matches!(self, Mode::Bounds | Mode::Full)
    }

    fn wants_counts(self) -> bool {
        matches!(self, Mode::Zeta | Mode::Full)
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub mode: Mode,
    /// Target precision; falls back to the problem file, then 2.
    pub precision: Option<u64>,
    /// Working precision override; marks all output heuristic.
    pub prescreen: Option<u64>,
    /// 0 uses the default thread pool.
    pub workers: usize,
    pub cache_dir: Option<PathBuf>,
    pub i_max: u32,
    pub count_cap: u64,
    pub memory_limit: u64,
    pub report_path: Option<PathBuf>,
    pub matrix_out: Option<PathBuf>,
    /// Embed the matrix rows in the report.
    pub inline_matrix: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::Full,
            precision: None,
            prescreen: None,
            workers: 0,
            cache_dir: std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from),
            i_max: 3,
            count_cap: DEFAULT_COUNT_CAP,
            memory_limit: DEFAULT_MEMORY_LIMIT,
            report_path: None,
            matrix_out: None,
            inline_matrix: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecEcho {
    pub name: Option<String>,
    pub p: u64,
    pub n: usize,
    pub degree: u32,
    pub variables: Vec<String>,
    pub polynomial: String,
    pub lift: String,
    pub lift_source: LiftSource,
    pub hash: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanEcho {
    pub r: u64,
    /// Target handed to the planner: `r` plus the digits lost to basis rescaling.
    pub planner_target: u64,
    pub s: u64,
    pub j_max: u64,
    pub arithmetic_precision: u64,
    pub max_pole: u64,
    pub source: String,
    pub truncation_verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisSummary {
    pub dimension: usize,
    pub hodge_profile: Vec<usize>,
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixSummary {
    pub qualifier: String,
    pub convention: String,
    pub certified_precision: i64,
    pub trace: i64,
    pub rank_mod_p: usize,
    pub file: Option<String>,
    pub rows: Option<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharPolyEcho {
    pub qualifier: String,
    /// `det(T I - M)`, ascending coefficients as signed residues.
    pub coefficients: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsEcho {
    pub qualifier: String,
    pub certified: bool,
    pub report: TateBoundReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaEcho {
    pub counts: Vec<u64>,
    pub closed_points_integral: bool,
    pub verdicts: Vec<TraceVerdict>,
    /// Exact characteristic polynomial of Frobenius for plane curves, from the counts.
    pub curve_charpoly: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorEcho {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryEstimate {
    pub top_degree: i64,
    pub top_dimension: u64,
    pub workspace_bytes: u64,
    pub limit_bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub mode: Mode,
    pub stamp: String,
    pub spec: Option<SpecEcho>,
    pub plan: Option<PlanEcho>,
    pub memory: Option<MemoryEstimate>,
    pub basis: Option<BasisSummary>,
    pub matrix: Option<MatrixSummary>,
    pub charpoly: Option<CharPolyEcho>,
    pub bounds: Option<BoundsEcho>,
    pub zeta: Option<ZetaEcho>,
    pub diagnostics: Vec<String>,
    pub error: Option<ErrorEcho>,
    /// Wall-clock seconds per stage.
    pub timings: BTreeMap<String, f64>,
}

impl RunReport {
    fn new(mode: Mode) -> Self {
        RunReport {
            tool: format!("hyperfrob {}", env!("CARGO_PKG_VERSION")),
            mode,
            stamp: CERTIFIED_STAMP.into(),
            spec: None,
            plan: None,
            memory: None,
            basis: None,
            matrix: None,
            charpoly: None,
            bounds: None,
            zeta: None,
            diagnostics: Vec::new(),
            error: None,
            timings: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// JSON without the timing fields, for comparing runs.
    pub fn to_json_without_timings(&self) -> String {
        let mut r = self.clone();
        r.timings.clear();
        r.to_json()
    }

    /// Short human-readable summary.
    pub fn summary(&self) -> String {
        let mut out = Vec::new();
        if let Some(s) = &self.spec {
            out.push(format!("hypersurface: degree {} in P^{} over F_{}", s.degree, s.n, s.p));
        }
        if let Some(p) = &self.plan {
            out.push(format!(
                "plan: r = {}, s = {}, working precision p^{} ({})",
                p.r, p.s, p.arithmetic_precision, p.source
            ));
        }
        if let Some(b) = &self.basis {
            out.push(format!("basis: dimension {}, Hodge profile {:?}", b.dimension, b.hodge_profile));
        }
        if let Some(m) = &self.matrix {
            out.push(format!("matrix: {}, trace {}, rank mod p {}", m.qualifier, m.trace, m.rank_mod_p));
        }
        if let Some(b) = &self.bounds {
            out.push(format!(
                "Picard bounds ({}): arithmetic {}, geometric {}",
                b.qualifier, b.report.arithmetic_bound, b.report.geometric_bound
            ));
        }
        if let Some(z) = &self.zeta {
            out.push(format!("point counts: {:?}", z.counts));
            for v in &z.verdicts {
                out.push(format!(
                    "  trace check i = {}: {} (count {} vs {} mod {})",
                    v.i,
                    if v.pass { "pass" } else { "FAIL" },
                    v.count,
                    v.predicted,
                    v.modulus
                ));
            }
        }
        for d in &self.diagnostics {
            out.push(format!("note: {d}"));
        }
        if let Some(e) = &self.error {
            out.push(format!("error ({}): {}", e.kind, e.message));
        }
        out.push(format!("status: {}", self.stamp));
        out.join("\n") + "\n"
    }
}

/// Result of [`run`]: the report, the exit code, and the matrix if one was computed.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: RunReport,
    pub exit_code: i32,
    pub matrix: Option<FrobMatrix>,
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Input(_) | Error::NotPrime(_) | Error::NotHomogeneous => "input",
        Error::Singular { .. } => "singular",
        Error::PrecisionExhausted(_) | Error::RefinementUnstable(_) => "precision",
        Error::CapExceeded { .. } => "cap",
        Error::ResourceLimit(_) => "resource",
        Error::Unsupported(_) => "unsupported",
        _ => "internal",
    }
}

/// Plan for a run: certified from the planner, or with the series truncation
/// overridden for prescreening. The planner target includes the digits the
/// basis rescaling costs, so the matrix is still known modulo `p^r`.
pub fn plan_for(r: u64, n: u64, p: u64, prescreen: Option<u64>) -> Result<PrecisionPlan> {
    let mut plan = choose_working_precision(r + lattice_shift(n, p), n, p)?;
    if let Some(s) = prescreen {
        if s < n {
            return Err(Error::Input(format!("prescreen precision {s} is below n = {n}")));
        }
        plan.s = s;
        plan.j_max = s - n;
    }
    Ok(plan)
}

/// Estimated peak memory of the matrix stage.
pub fn estimate_memory(spec: &HypersurfaceSpec, plan: &PrecisionPlan, workers: usize) -> MemoryEstimate {
    let nv = spec.nvars() as u64;
    let top = plan.max_pole();
    let top_degree = top as i64 * spec.d as i64 - nv as i64;
    let dim = |k: i64| -> u64 {
        if k < 0 {
            return 0;
        }
        (1..nv).fold(1u128, |acc, i| acc * (k as u128 + i as u128) / i as u128) as u64
    };
    let top_dimension = dim(top_degree);
    let deltas: u64 = (0..=plan.j_max).map(|j| dim((j * plan.p * spec.d as u64) as i64)).sum();
    let threads = if workers == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get()) as u64
    } else {
        workers as u64
    };
    // Per column: numerator, the two accumulators, and the incoming term.
    let per_column = 4 * 8 * top_dimension;
    let exps = 2 * nv * top_dimension;
    MemoryEstimate {
        top_degree,
        top_dimension,
        workspace_bytes: threads * per_column + 8 * deltas + exps,
        limit_bytes: 0,
    }
}

fn timed<T>(timings: &mut BTreeMap<String, f64>, key: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let start = Instant::now();
    let out = f();
    timings.insert(key.into(), start.elapsed().as_secs_f64());
    out
}

fn gb_for(spec: &HypersurfaceSpec, g: &Graded, precision: u32, cache: Option<&Path>) -> Result<StrongGB> {
    let path = cache.map(|d| d.join(format!("gb-{}.json", cache_key(spec, precision))));
    if let Some(path) = &path {
        if let Some(gb) = StrongGB::load(path, spec, g, precision) {
            return Ok(gb);
        }
    }
    let gb = StrongGB::compute(spec, g, precision)?;
    if let (Some(path), Some(dir)) = (&path, cache) {
        std::fs::create_dir_all(dir)?;
        gb.save(path)?;
    }
    Ok(gb)
}

fn matrix_cache_path(dir: &Path, spec: &HypersurfaceSpec, plan: &PrecisionPlan, prec: u64) -> PathBuf {
    dir.join(format!(
        "matrix-{}-r{}-s{}-w{}.json",
        spec.content_hash(),
        plan.r,
        plan.s,
        prec
    ))
}

/// Compute (or load from the cache) the Frobenius matrix.
pub fn compute_matrix(
    spec: &HypersurfaceSpec,
    basis: &CohomologyBasis,
    plan: &PrecisionPlan,
    cache: Option<&Path>,
) -> Result<FrobMatrix> {
    let prec = plan.arithmetic_precision();
    let cached = cache.map(|d| matrix_cache_path(d, spec, plan, prec));
    if let Some(path) = &cached {
        if let Ok(text) = std::fs::read_to_string(path) {
            if let Ok(m) = serde_json::from_str::<FrobMatrix>(&text) {
                return Ok(m);
            }
        }
    }
    let prec32 = u32::try_from(prec).map_err(|_| Error::ResourceLimit("working precision too large".into()))?;
    let md = Modulus::new(spec.p, prec32)
        .map_err(|_| Error::ResourceLimit(format!("p^{prec} does not fit in a machine word")))?;
    let g = Arc::new(Graded::new(spec.nvars()));
    let gb = gb_for(spec, &g, prec32, cache)?;
    let ctx = ReductionContext::new(spec, basis, g.clone(), &gb)?;
    let deltas = DeltaPowers::new(spec, &g, md, plan.j_max)?;
    let m = assemble_matrix(spec, &ctx, plan, &deltas)?;
    if let (Some(path), Some(dir)) = (&cached, cache) {
        std::fs::create_dir_all(dir)?;
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, serde_json::to_string(&m).map_err(|e| Error::Internal(e.to_string()))?)?;
        std::fs::rename(&tmp, path)?;
    }
    Ok(m)
}

struct Stages<'a> {
    config: &'a RunConfig,
    report: RunReport,
    matrix: Option<FrobMatrix>,
}

impl Stages<'_> {
    fn run(&mut self, problem: &ProblemFile) -> Result<()> {
        let config = self.config;
        let mode = config.mode;
        let cache = config.cache_dir.as_deref();
        let r = config.precision.or(problem.precision).unwrap_or(2);
        let prescreen = config.prescreen.or(problem.prescreen);
        if prescreen.is_some() {
            self.report.stamp = HEURISTIC_STAMP.into();
        }
        let timings = &mut self.report.timings;

        let spec = timed(timings, "parse", || parse_and_lift(problem))?;
        self.report.spec = Some(SpecEcho {
            name: problem.name.clone(),
            p: spec.p,
            n: spec.n,
            degree: spec.d,
            variables: spec.names.clone(),
            polynomial: spec.poly_text(),
            lift: spec.lift_text(),
            lift_source: spec.lift_source,
            hash: spec.content_hash(),
        });

        let plan = timed(timings, "plan", || plan_for(r, spec.n as u64, spec.p, prescreen))?;
        self.report.plan = Some(PlanEcho {
            r,
            planner_target: plan.r,
            s: plan.s,
            j_max: plan.j_max,
            arithmetic_precision: plan.arithmetic_precision(),
            max_pole: plan.max_pole(),
            source: if prescreen.is_some() {
                "prescreen override".into()
            } else {
                "refined loss table".into()
            },
            truncation_verified: prescreen.is_none() && plan.verify_truncation(),
        });
        if mode == Mode::Plan {
            return Ok(());
        }

        let mut basis_data: Option<(CohomologyBasis, HodgeProfile)> = None;
        if mode.wants_basis() {
            let (basis, profile) = timed(timings, "basis", || build_basis(&spec))?;
            self.report.basis = Some(BasisSummary {
                dimension: basis.dim(),
                hodge_profile: profile.counts.clone(),
                labels: basis
                    .labels(&spec.names)
                    .into_iter()
                    .map(|(h, m)| format!("{h}:{m}"))
                    .collect(),
            });
            basis_data = Some((basis, profile));
        }

        if mode.wants_matrix() {
            let (basis, profile) = basis_data.as_ref().expect("basis stage ran");
            let mut mem = estimate_memory(&spec, &plan, config.workers);
            mem.limit_bytes = config.memory_limit;
            self.report.memory = Some(mem.clone());
            if mem.workspace_bytes > config.memory_limit {
                return Err(Error::ResourceLimit(format!(
                    "estimated workspace {} bytes exceeds the limit of {} bytes; lower --workers to reduce concurrent columns",
                    mem.workspace_bytes, config.memory_limit
                )));
            }
            let matrix = timed(timings, "matrix", || {
                crate::par::with_workers(config.workers, || compute_matrix(&spec, basis, &plan, cache))
            })?;
            let md = matrix.modulus();
            let qualifier = format!("mod {}^{}", spec.p, matrix.r);
            if let Some(w) = rank_diagnostic(&matrix, profile.counts.first().copied().unwrap_or(0)) {
                self.report.diagnostics.push(w);
            }
            let mut file = None;
            if let Some(path) = &config.matrix_out {
                std::fs::write(path, matrix.to_text())?;
                file = Some(path.display().to_string());
            }
            self.report.matrix = Some(MatrixSummary {
                qualifier: qualifier.clone(),
                convention: "M = p^-1 F on H^n of the complement, columns are images of basis elements".into(),
                certified_precision: matrix.certified_precision,
                trace: md.to_signed(matrix.trace()),
                rank_mod_p: matrix.rank_mod_p(),
                file,
                rows: config
                    .inline_matrix
                    .then(|| matrix.rows().iter().map(|r| r.iter().map(|&v| md.to_signed(v)).collect()).collect()),
            });
            let cp = charpoly_mod(&ModMatrix::from_frob(&matrix));
            self.report.charpoly = Some(CharPolyEcho {
                qualifier,
                coefficients: cp.signed(),
            });
            self.matrix = Some(matrix);
        }

        if mode.wants_bounds() {
            let matrix = self.matrix.as_ref().expect("matrix stage ran");
            if spec.n == 3 {
                let rep = timed(&mut self.report.timings, "bounds", || Ok(geometric_picard_bound(matrix)))?;
                let certified = prescreen.is_none();
                self.report.bounds = Some(BoundsEcho {
                    qualifier: if certified {
                        format!("certified from M mod {}^{}", spec.p, matrix.r)
                    } else {
                        HEURISTIC_STAMP.into()
                    },
                    certified,
                    report: rep,
                });
            } else {
                self.report
                    .diagnostics
                    .push("Picard bounds are defined for surfaces only; stage skipped".into());
            }
        }

        if mode.wants_counts() {
            let series = timed(&mut self.report.timings, "zeta", || {
                crate::par::with_workers(config.workers, || {
                    PointCountSeries::compute(&spec, config.i_max, config.count_cap, cache)
                })
            })?;
            let verdicts = match &self.matrix {
                Some(m) => trace_consistency(m, spec.n, &series),
                None => Vec::new(),
            };
            let curve_charpoly = if spec.n == 2 {
                let genus = ((spec.d - 1) * (spec.d - 2) / 2) as usize;
                (series.counts.len() >= genus)
                    .then(|| curve_charpoly_from_counts(spec.p, genus, &series.counts))
                    .transpose()?
                    .map(|c| c.iter().map(|x| x.to_string()).collect())
            } else {
                None
            };
            let failed: Vec<u32> = verdicts.iter().filter(|v| !v.pass).map(|v| v.i).collect();
            self.report.zeta = Some(ZetaEcho {
                closed_points_integral: series.closed_points().is_some(),
                counts: series.counts,
                verdicts,
                curve_charpoly,
            });
            if !failed.is_empty() && prescreen.is_none() {
                return Err(Error::Internal(format!("trace formula fails for i = {failed:?}")));
            }
        }
        Ok(())
    }
}

/// Run the requested stages and produce a report and exit code. Errors are
/// recorded in the report rather than returned.
pub fn run(config: &RunConfig, problem: &ProblemFile) -> RunOutcome {
    let mut stages = Stages {
        config,
        report: RunReport::new(config.mode),
        matrix: None,
    };
    let result = stages.run(problem);
    let Stages { mut report, matrix, .. } = stages;
    let exit_code = match &result {
        Ok(()) => 0,
        Err(e) => {
            report.error = Some(ErrorEcho {
                kind: error_kind(e).into(),
                message: e.to_string(),
                exit_code: e.exit_code(),
            });
            e.exit_code()
        }
    };
    if let Some(path) = &config.report_path {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            report.diagnostics.push(format!("could not write report: {e}"));
        }
    }
    RunOutcome {
        report,
        exit_code,
        matrix,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(p: u64, n: usize, poly: &str) -> ProblemFile {
        ProblemFile {
            p,
            n,
            polynomial: poly.into(),
            ..Default::default()
        }
    }

    #[test]
    fn plan_mode_reports_s() {
        let cfg = RunConfig {
            mode: Mode::Plan,
            precision: Some(3),
            cache_dir: None,
            ..Default::default()
        };
        let out = run(&cfg, &problem(3, 3, "x0^4 + x1^4 + x2^4 + x3^4"));
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.report.plan.unwrap().s, 7);
    }

    #[test]
    fn errors_map_to_exit_codes() {
        let cfg = RunConfig {
            mode: Mode::Basis,
            cache_dir: None,
            ..Default::default()
        };
        let out = run(&cfg, &problem(4, 2, "x0^3 + x1^3 + x2^3"));
        assert_eq!(out.exit_code, 2);
        let out = run(&cfg, &problem(2, 3, "x0^4 + x1^4 + x2^4 + x3^4"));
        assert_eq!(out.exit_code, 3);
        assert_eq!(out.report.error.unwrap().kind, "singular");
        let zeta = RunConfig {
            mode: Mode::Zeta,
            i_max: 4,
            count_cap: 1000,
            cache_dir: None,
            ..Default::default()
        };
        assert_eq!(run(&zeta, &problem(3, 3, "x0^4 + x1^4 + x2^4 + x3^4")).exit_code, 5);
    }

    #[test]
    fn memory_guard_refuses_large_runs() {
        let cfg = RunConfig {
            mode: Mode::Matrix,
            memory_limit: 1000,
            cache_dir: None,
            ..Default::default()
        };
        let out = run(&cfg, &problem(5, 2, "x0^3 + x1^3 + x2^3 + x0*x1*x2"));
        assert_eq!(out.exit_code, 6);
    }

    #[test]
    fn curve_full_run_and_prescreen_stamp() {
        let cfg = RunConfig {
            mode: Mode::Full,
            precision: Some(2),
            i_max: 2,
            cache_dir: None,
            ..Default::default()
        };
        let pf = problem(5, 2, "x0^3 + x1^3 + x2^3 + x0*x1*x2");
        let out = run(&cfg, &pf);
        assert_eq!(out.exit_code, 0, "{:?}", out.report.error);
        assert_eq!(out.report.stamp, CERTIFIED_STAMP);
        let z = out.report.zeta.as_ref().unwrap();
        assert!(z.verdicts.iter().all(|v| v.pass));
        assert_eq!(z.curve_charpoly.as_ref().unwrap().len(), 3);
        let pre = RunConfig {
            prescreen: Some(3),
            ..cfg
        };
        let out = run(&pre, &pf);
        assert_eq!(out.report.stamp, HEURISTIC_STAMP);
    }

    #[test]
    fn warm_cache_reproduces_report() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig {
            mode: Mode::Full,
            precision: Some(2),
            i_max: 2,
            cache_dir: Some(dir.path().to_path_buf()),
            ..Default::default()
        };
        let pf = problem(7, 2, "x0^3 + x1^3 + 3*x2^3 + x0*x1*x2");
        let a = run(&cfg, &pf);
        let b = run(&cfg, &pf);
        assert_eq!(a.exit_code, 0, "{:?}", a.report.error);
        assert_eq!(a.report.to_json_without_timings(), b.report.to_json_without_timings());
    }
}
