//! Parallel replicate execution and result persistence.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use lfpp_core::engine::{census, crossing_distance, multi_xi_evaluate, CensusResult, CrossingResult};
use lfpp_core::field::{FieldSampler, GridSpec, SamplerConfig, SamplerKind, DEFAULT_FOURIER_C0, MAX_LEVEL};
use lfpp_core::rng::replicate_seed;
use lfpp_core::scaling::ExperimentPlan;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const CROSSINGS_FILE: &str = "crossings.jsonl";
pub const CENSUS_FILE: &str = "census.jsonl";
pub const GEODESICS_FILE: &str = "geodesics.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Per-vertex bytes held by one crossing computation besides the sampler:
/// field, weights, distances, predecessors, heap entries.
const ENGINE_BYTES_PER_VERTEX: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationPlan {
    pub xi_list: Vec<f64>,
    pub k_list: Vec<u32>,
    pub replicates: usize,
    pub sampler: SamplerKind,
    pub master_seed: u64,
    /// `xi_tilde` values at which every geodesic's length is re-evaluated.
    pub multi_xi: Vec<f64>,
    pub census_alpha: Vec<f64>,
    pub padding_factor: f64,
    pub fourier_c0: f64,
    pub save_geodesics: bool,
    pub memory_budget_mb: u64,
    pub quantile: f64,
    pub slack_lambda: f64,
    pub slack_census: f64,
    pub min_k: u32,
}

impl SimulationPlan {
    pub const DEFAULT_MEMORY_BUDGET_MB: u64 = 2048;

    pub fn new(xi_list: Vec<f64>, k_list: Vec<u32>, replicates: usize, sampler: SamplerKind, master_seed: u64) -> Self {
        SimulationPlan {
            xi_list,
            k_list,
            replicates,
            sampler,
            master_seed,
            multi_xi: Vec::new(),
            census_alpha: Vec::new(),
            padding_factor: GridSpec::DEFAULT_PADDING,
            fourier_c0: DEFAULT_FOURIER_C0,
            save_geodesics: false,
            memory_budget_mb: Self::DEFAULT_MEMORY_BUDGET_MB,
            quantile: ExperimentPlan::DEFAULT_QUANTILE,
            slack_lambda: ExperimentPlan::DEFAULT_SLACK_LAMBDA,
            slack_census: ExperimentPlan::DEFAULT_SLACK_CENSUS,
            min_k: ExperimentPlan::DEFAULT_MIN_K,
        }
    }

    /// Checks what a run needs; fitting needs more (see [`Self::experiment`]).
    pub fn validate(&self) -> Result<()> {
        if self.k_list.is_empty() {
            bail!("no scale levels given");
        }
        if self.k_list.windows(2).any(|w| w[0] >= w[1]) {
            bail!("scale levels must be strictly increasing");
        }
        if let Some(k) = self.k_list.iter().find(|&&k| k > MAX_LEVEL) {
            bail!("level {k} exceeds {MAX_LEVEL}");
        }
        if self.replicates == 0 {
            bail!("replicates must be positive");
        }
        if self.sampler == SamplerKind::Supplied {
            bail!("the simulate command needs a sampler, not supplied fields");
        }
        for (name, list) in [("xi", &self.xi_list), ("multi-xi", &self.multi_xi)] {
            if let Some(x) = list.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
                bail!("{name} value {x} must be finite and nonnegative");
            }
        }
        if let Some(a) = self.census_alpha.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            bail!("census alpha {a} must be finite and positive");
        }
        if self.xi_list.is_empty() && self.census_alpha.is_empty() {
            bail!("nothing to compute: give at least one xi or census alpha");
        }
        GridSpec::new(self.k_list[0], self.padding_factor)?;
        Ok(())
    }

    /// The fitting plan over the same grid of scales.
    pub fn experiment(&self) -> Result<ExperimentPlan> {
        let p = ExperimentPlan {
            xi_list: self.xi_list.clone(),
            k_list: self.k_list.clone(),
            replicates: self.replicates,
            sampler: self.sampler,
            master_seed: self.master_seed,
            quantile: self.quantile,
            slack_lambda: self.slack_lambda,
            slack_census: self.slack_census,
            min_k: self.min_k,
        };
        p.validate()?;
        Ok(p)
    }

    fn spec(&self, k: u32) -> Result<GridSpec> {
        Ok(GridSpec::new(k, self.padding_factor)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiLength {
    pub xi_tilde: f64,
    pub length: f64,
}

/// One crossing per (xi, k, replicate).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingRecord {
    pub xi: f64,
    pub k: u32,
    pub replicate: u64,
    pub seed: u64,
    pub sampler: SamplerKind,
    pub distance: f64,
    pub vertex_count: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub multi_xi: Vec<XiLength>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geodesic: Option<Vec<usize>>,
}

impl CrossingRecord {
    pub fn length_at(&self, xi_tilde: f64) -> Option<f64> {
        self.multi_xi
            .iter()
            .find(|m| m.xi_tilde.to_bits() == xi_tilde.to_bits())
            .map(|m| m.length)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CensusRecord {
    pub alpha: f64,
    pub k: u32,
    pub replicate: u64,
    pub seed: u64,
    pub sampler: SamplerKind,
    pub count: usize,
    pub epsilon: f64,
}

impl From<&CensusRecord> for CensusResult {
    fn from(r: &CensusRecord) -> Self {
        CensusResult {
            alpha: r.alpha,
            level: r.k,
            count: r.count,
            epsilon: r.epsilon,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimulationOutput {
    pub crossings: Vec<CrossingRecord>,
    pub census: Vec<CensusRecord>,
    /// Wall time per level, in seconds.
    pub level_seconds: Vec<(u32, f64)>,
}

/// Estimated peak bytes for running `plan` on `workers` threads.
pub fn memory_estimate(plan: &SimulationPlan, workers: usize) -> Result<u64> {
    let k = *plan.k_list.last().context("no scale levels")?;
    let spec = plan.spec(k)?;
    let (shared, per_sample) = FieldSampler::memory_estimate(plan.sampler, spec)?;
    let per_worker = per_sample + ENGINE_BYTES_PER_VERTEX * spec.vertex_count();
    Ok((shared + per_worker * workers) as u64)
}

fn sampler_config(plan: &SimulationPlan) -> SamplerConfig {
    SamplerConfig {
        fourier_c0: plan.fourier_c0,
    }
}

fn run_replicate(
    plan: &SimulationPlan,
    sampler: &FieldSampler,
    k: u32,
    r: u64,
) -> Result<(Vec<CrossingRecord>, Vec<CensusRecord>)> {
    let seed = replicate_seed(plan.master_seed, k, r);
    let field = sampler.sample(seed);
    let crossings = plan
        .xi_list
        .iter()
        .map(|&xi| {
            let c: CrossingResult = crossing_distance(&field, xi)?;
            let lengths = multi_xi_evaluate(&c.geodesic, &field, &plan.multi_xi)?;
            Ok(CrossingRecord {
                xi,
                k,
                replicate: r,
                seed,
                sampler: plan.sampler,
                distance: c.distance,
                vertex_count: c.vertex_count,
                multi_xi: plan
                    .multi_xi
                    .iter()
                    .zip(lengths)
                    .map(|(&xi_tilde, length)| XiLength { xi_tilde, length })
                    .collect(),
                geodesic: plan.save_geodesics.then(|| c.geodesic.vertices.clone()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let counts = plan
        .census_alpha
        .iter()
        .map(|&alpha| {
            let c = census(&field, alpha)?;
            Ok(CensusRecord {
                alpha,
                k,
                replicate: r,
                seed,
                sampler: plan.sampler,
                count: c.count,
                epsilon: c.epsilon,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((crossings, counts))
}

/// Runs every replicate of the plan on a pool of `workers` threads.
///
/// Seeds depend only on (master seed, level, replicate), and results are
/// collected in task order, so the output does not depend on `workers`.
pub fn run_simulation(plan: &SimulationPlan, workers: usize) -> Result<SimulationOutput> {
    plan.validate()?;
    if workers == 0 {
        bail!("worker count must be at least 1");
    }
    let need = memory_estimate(plan, workers)?;
    let budget = plan.memory_budget_mb * 1024 * 1024;
    if need > budget {
        bail!(
            "estimated memory {need} bytes for level {} on {workers} workers exceeds the budget of {budget} bytes",
            plan.k_list.last().unwrap()
        );
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    let mut out = SimulationOutput::default();
    for &k in &plan.k_list {
        let started = Instant::now();
        let sampler = FieldSampler::new(plan.sampler, plan.spec(k)?, &sampler_config(plan))?;
        let results: Vec<_> = pool.install(|| {
            (0..plan.replicates as u64)
                .into_par_iter()
                .map(|r| run_replicate(plan, &sampler, k, r))
                .collect::<Result<Vec<_>>>()
        })?;
        // xi-major within a level keeps each (xi, k) cell contiguous
        for i in 0..plan.xi_list.len() {
            out.crossings.extend(results.iter().map(|(c, _)| c[i].clone()));
        }
        for i in 0..plan.census_alpha.len() {
            out.census.extend(results.iter().map(|(_, c)| c[i]));
        }
        out.level_seconds.push((k, started.elapsed().as_secs_f64()));
    }
    Ok(out)
}

fn jsonl<T: Serialize>(records: &[T]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    for r in records {
        serde_json::to_writer(&mut buf, r)?;
        buf.push(b'\n');
    }
    Ok(buf)
}

fn geodesics_csv(plan: &SimulationPlan, records: &[CrossingRecord]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["xi", "k", "replicate", "step", "x", "y"])?;
    for r in records {
        let Some(path) = &r.geodesic else { continue };
        let spec = plan.spec(r.k)?;
        for (step, &v) in path.iter().enumerate() {
            let (x, y) = spec.position(v);
            w.serialize((r.xi, r.k, r.replicate, step, x, y))?;
        }
    }
    w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub file: String,
    pub records: usize,
    pub sha256: String,
}

/// The reproducible part of the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestBody {
    pub tool: String,
    pub code_version: String,
    pub plan: SimulationPlan,
    pub fourier_c0: f64,
    pub outputs: Vec<OutputEntry>,
}

/// Run details that legitimately vary between invocations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub workers: usize,
    pub started_unix_ms: u128,
    pub elapsed_seconds: f64,
    pub level_seconds: Vec<(u32, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    /// sha256 of the JSON encoding of `body`.
    pub digest: String,
    pub body: ManifestBody,
    pub run: RunInfo,
}

impl ManifestBody {
    pub fn digest(&self) -> Result<String> {
        Ok(sha256_hex(&serde_json::to_vec(self)?))
    }
}

/// Writes the record files and the manifest into `dir`.
pub fn write_run(
    dir: &Path,
    plan: &SimulationPlan,
    output: &SimulationOutput,
    workers: usize,
    started: SystemTime,
    elapsed_seconds: f64,
) -> Result<Manifest> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut files = vec![
        (CROSSINGS_FILE, output.crossings.len(), jsonl(&output.crossings)?),
        (CENSUS_FILE, output.census.len(), jsonl(&output.census)?),
    ];
    if plan.save_geodesics {
        let steps = output.crossings.iter().filter_map(|r| r.geodesic.as_ref()).map(Vec::len).sum();
        files.push((GEODESICS_FILE, steps, geodesics_csv(plan, &output.crossings)?));
    }
    let mut outputs = Vec::new();
    for (name, records, bytes) in files {
        let path = dir.join(name);
        fs::write(&path, &bytes).with_context(|| format!("writing {}", path.display()))?;
        outputs.push(OutputEntry {
            file: name.into(),
            records,
            sha256: sha256_hex(&bytes),
        });
    }
    let body = ManifestBody {
        tool: env!("CARGO_PKG_NAME").into(),
        code_version: env!("CARGO_PKG_VERSION").into(),
        plan: plan.clone(),
        fourier_c0: plan.fourier_c0,
        outputs,
    };
    let manifest = Manifest {
        digest: body.digest()?,
        body,
        run: RunInfo {
            workers,
            started_unix_ms: started.duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0),
            elapsed_seconds,
            level_seconds: output.level_seconds.clone(),
        },
    };
    let path = dir.join(MANIFEST_FILE);
    let mut f = fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
    serde_json::to_writer_pretty(&mut f, &manifest)?;
    f.write_all(b"\n")?;
    Ok(manifest)
}

/// Runs the plan and writes its outputs.
pub fn simulate_to_dir(dir: &Path, plan: &SimulationPlan, workers: usize) -> Result<Manifest> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let output = run_simulation(plan, workers)?;
    write_run(dir, plan, &output, workers, started, clock.elapsed().as_secs_f64())
}

fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).with_context(|| format!("{}:{}", path.display(), i + 1)))
        .collect()
}

/// Plan and records of a finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunData {
    pub plan: SimulationPlan,
    pub crossings: Vec<CrossingRecord>,
    pub census: Vec<CensusRecord>,
}

pub fn read_run(dir: &Path) -> Result<RunData> {
    let path = dir.join(MANIFEST_FILE);
    let manifest: Manifest = serde_json::from_str(
        &fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?,
    )
    .with_context(|| format!("parsing {}", path.display()))?;
    Ok(RunData {
        plan: manifest.body.plan,
        crossings: read_jsonl(&dir.join(CROSSINGS_FILE))?,
        census: read_jsonl(&dir.join(CENSUS_FILE))?,
    })
}
