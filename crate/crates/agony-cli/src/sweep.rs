//! Monte Carlo sweeps over the backward-link probability `s`.
//!
//! One task per `(s, replicate)`: sample an RSBM graph, minimize agony,
//! compare against the planted ranking, evaluate the first-order theory
//! columns, and optionally run a depth-2 iterated refinement. Tasks run
//! on a worker pool but rows and per-task confusion matrices are written
//! in task order, so output bytes depend only on the spec and the master
//! seed — never on the worker count.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use agony_core::eval::{agony, AgonyExponent};
use agony_core::metrics::{adjusted_rand_index, confusion_matrix};
use agony_core::rsbm::{estimate_affinity, sample, RsbmParams};
use agony_core::solve::{iterated_agony, minimize_d0, minimize_d1, IterationOptions};
use agony_core::{mix_seed, theory, Ranking};

/// Errors from sweep validation or file output.
#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    /// The spec violates a precondition.
    #[error("invalid sweep spec: {0}")]
    InvalidSpec(String),
    /// Model parameters rejected by the generator.
    #[error(transparent)]
    Rsbm(#[from] agony_core::rsbm::RsbmError),
    /// Output files could not be written.
    #[error("writing {path}: {source}")]
    Io {
        /// The file being written.
        path: PathBuf,
        /// Underlying error.
        source: std::io::Error,
    },
}

/// Everything a sweep needs; serialized into the summary for provenance.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepSpec {
    /// Agony exponent, 0 or 1.
    pub d: u32,
    /// Adjacent-forward probability.
    pub p: f64,
    /// Distant-forward probability.
    pub q: f64,
    /// Planted class count; must be a power of two (the theory columns
    /// need `R = 2^a`).
    pub r: u32,
    /// Nodes per planted class.
    pub n_per_class: u32,
    /// Values of `s` to sweep.
    pub s_grid: Vec<f64>,
    /// Replicates per `s`.
    pub replicates: u32,
    /// Master seed; per-task seeds derive from it.
    pub master_seed: u64,
    /// Also run a depth-2 iterated refinement per graph.
    pub iterate: bool,
    /// Record wall-clock times (off by default so outputs are
    /// byte-identical across machines).
    pub timed: bool,
    /// Worker threads (0 = library default).
    pub threads: usize,
}

/// One output row per `(s, replicate)`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepRow {
    /// Backward-link probability of this task.
    pub s: f64,
    /// Replicate index (0-based).
    pub replicate: u32,
    /// The task's derived seed.
    pub seed: u64,
    /// Optimal hierarchy found by the solver.
    pub h_star: f64,
    /// Adjusted Rand index between the solution and the planted ranking.
    pub ari_level1: f64,
    /// Class count of the solution.
    pub classes_level1: u32,
    /// Hierarchy of the depth-2 composed ranking (empty when iteration
    /// is off).
    pub h_level2: Option<f64>,
    /// ARI of the composed ranking vs planted.
    pub ari_level2: Option<f64>,
    /// Class count of the composed ranking.
    pub classes_level2: Option<u32>,
    /// Hierarchy of the planted ranking on this sample.
    pub planted_h: f64,
    /// First-order planted estimate from the true parameters.
    pub hbar_planted: f64,
    /// First-order optimal estimate from parameters re-estimated off the
    /// sampled graph.
    pub hbar_star_theory: f64,
    /// Task wall time in seconds (0 unless `timed`).
    pub wall_time: f64,
}

/// Per-`s` medians reported in the summary JSON.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepLevelSummary {
    /// The swept value.
    pub s: f64,
    /// Median optimal hierarchy.
    pub median_h_star: f64,
    /// Median level-1 ARI.
    pub median_ari_level1: f64,
    /// Median level-1 class count.
    pub median_classes_level1: f64,
    /// Median level-2 ARI, when iterating.
    pub median_ari_level2: Option<f64>,
    /// Median level-2 class count, when iterating.
    pub median_classes_level2: Option<f64>,
}

/// What [`run_sweep`] produced.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepSummary {
    /// The spec, echoed for provenance.
    pub spec: SweepSpec,
    /// Rows CSV path.
    pub rows_file: PathBuf,
    /// Total rows written.
    pub rows: usize,
    /// Per-`s` medians.
    pub per_s: Vec<SweepLevelSummary>,
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite medians"));
    let n = values.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

fn validate(spec: &SweepSpec) -> Result<(), SweepError> {
    if spec.d > 1 {
        return Err(SweepError::InvalidSpec(format!("d must be 0 or 1, got {}", spec.d)));
    }
    if !spec.r.is_power_of_two() || spec.r < 2 {
        return Err(SweepError::InvalidSpec(format!(
            "class count R must be a power of two >= 2, got {}",
            spec.r
        )));
    }
    if spec.n_per_class == 0 {
        return Err(SweepError::InvalidSpec("n_per_class must be >= 1".into()));
    }
    if spec.replicates == 0 {
        return Err(SweepError::InvalidSpec("replicates must be >= 1".into()));
    }
    if spec.s_grid.is_empty() {
        return Err(SweepError::InvalidSpec("s grid is empty".into()));
    }
    for &s in &spec.s_grid {
        if !(s.is_finite() && (0.0..=1.0).contains(&s)) {
            return Err(SweepError::InvalidSpec(format!("s = {s} outside [0, 1]")));
        }
    }
    Ok(())
}

struct TaskOutput {
    row: SweepRow,
    confusion_name: String,
    confusion_csv: String,
}

fn run_task(spec: &SweepSpec, s_index: usize, replicate: u32) -> Result<TaskOutput, SweepError> {
    let s = spec.s_grid[s_index];
    let params = RsbmParams::uniform(spec.p, spec.q, s, spec.r, spec.n_per_class)?;
    let seed = mix_seed(spec.master_seed, s_index as u64, u64::from(replicate));
    let started = spec.timed.then(Instant::now);
    let (graph, planted) = sample(&params, seed);
    let d_exp = AgonyExponent::new(f64::from(spec.d)).expect("validated");

    let level1 = if spec.d == 0 { minimize_d0(&graph) } else { minimize_d1(&graph) };
    let ari_level1 =
        adjusted_rand_index(&planted, &level1.ranking).expect("lengths match by construction");
    let planted_h = agony(&graph, &planted, d_exp).expect("lengths match").hierarchy;

    let a = spec.r.trailing_zeros();
    let hbar_planted =
        theory::hbar_planted(f64::from(spec.d), spec.p, spec.q, s, spec.r).unwrap_or(f64::NAN);
    let est = estimate_affinity(&graph, &planted).expect("planted ranking fits the graph");
    let (p_hat, q_hat, s_hat) = (est.p.unwrap_or(0.0), est.q.unwrap_or(0.0), est.s);
    let hbar_star_theory = if spec.d == 0 {
        let n_total = u64::from(spec.r) * u64::from(spec.n_per_class);
        theory::optimal_summary_d0(p_hat, q_hat, s_hat, a, n_total)
            .map_or(f64::NAN, |sum| sum.hbar_star)
    } else {
        theory::optimal_summary_d1(p_hat, q_hat, s_hat, a)
            .ok()
            .and_then(|sum| sum.hbar_star)
            .unwrap_or(f64::NAN)
    };

    let (h_level2, ari_level2, classes_level2) = if spec.iterate {
        let tree = iterated_agony(&graph, d_exp, &IterationOptions::default())
            .expect("depth and exponent validated");
        let composed: &Ranking = &tree.composed;
        let h2 = agony(&graph, composed, d_exp).expect("lengths match").hierarchy;
        let ari2 = adjusted_rand_index(&planted, composed).expect("lengths match");
        (Some(h2), Some(ari2), Some(composed.num_classes()))
    } else {
        (None, None, None)
    };

    let confusion = confusion_matrix(&planted, &level1.ranking).expect("lengths match");
    let mut confusion_csv = String::new();
    for row in confusion.to_dense() {
        let cells: Vec<String> = row.iter().map(u64::to_string).collect();
        confusion_csv.push_str(&cells.join(","));
        confusion_csv.push('\n');
    }

    let wall_time = started.map_or(0.0, |t| t.elapsed().as_secs_f64());
    Ok(TaskOutput {
        row: SweepRow {
            s,
            replicate,
            seed,
            h_star: level1.hierarchy,
            ari_level1,
            classes_level1: level1.num_classes,
            h_level2,
            ari_level2,
            classes_level2,
            planted_h,
            hbar_planted,
            hbar_star_theory,
            wall_time,
        },
        confusion_name: format!("conf_s{s}_r{replicate}.csv"),
        confusion_csv,
    })
}

/// Runs the sweep, writing `rows.csv`, one `conf_s<value>_r<idx>.csv`
/// per task, and `summary.json` into `out_dir`.
///
/// # Errors
///
/// [`SweepError::InvalidSpec`] before any work starts; IO errors while
/// writing.
pub fn run_sweep(spec: &SweepSpec, out_dir: &Path) -> Result<SweepSummary, SweepError> {
    validate(spec)?;
    fs::create_dir_all(out_dir)
        .map_err(|source| SweepError::Io { path: out_dir.to_owned(), source })?;

    let tasks: Vec<(usize, u32)> = (0..spec.s_grid.len())
        .flat_map(|s_index| (0..spec.replicates).map(move |rep| (s_index, rep)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.threads)
        .build()
        .map_err(|e| SweepError::InvalidSpec(format!("worker pool: {e}")))?;
    let outputs: Result<Vec<TaskOutput>, SweepError> = pool.install(|| {
        use rayon::prelude::*;
        tasks.par_iter().map(|&(s_index, rep)| run_task(spec, s_index, rep)).collect()
    });
    let outputs = outputs?;

    let rows_file = out_dir.join("rows.csv");
    let write_err =
        |path: &Path, source: std::io::Error| SweepError::Io { path: path.to_owned(), source };
    let mut writer = csv::Writer::from_writer(Vec::new());
    for output in &outputs {
        writer
            .serialize(&output.row)
            .map_err(|e| write_err(&rows_file, std::io::Error::other(e)))?;
    }
    let csv_bytes =
        writer.into_inner().map_err(|e| write_err(&rows_file, std::io::Error::other(e)))?;
    fs::write(&rows_file, csv_bytes).map_err(|e| write_err(&rows_file, e))?;

    for output in &outputs {
        let path = out_dir.join(&output.confusion_name);
        fs::write(&path, &output.confusion_csv).map_err(|e| write_err(&path, e))?;
    }

    let per_s = spec
        .s_grid
        .iter()
        .enumerate()
        .map(|(s_index, &s)| {
            let rows: Vec<&SweepRow> = outputs
                .iter()
                .map(|o| &o.row)
                .skip(s_index * spec.replicates as usize)
                .take(spec.replicates as usize)
                .collect();
            SweepLevelSummary {
                s,
                median_h_star: median(rows.iter().map(|r| r.h_star).collect()),
                median_ari_level1: median(rows.iter().map(|r| r.ari_level1).collect()),
                median_classes_level1: median(
                    rows.iter().map(|r| f64::from(r.classes_level1)).collect(),
                ),
                median_ari_level2: spec
                    .iterate
                    .then(|| median(rows.iter().filter_map(|r| r.ari_level2).collect())),
                median_classes_level2: spec.iterate.then(|| {
                    median(rows.iter().filter_map(|r| r.classes_level2.map(f64::from)).collect())
                }),
            }
        })
        .collect();

    let summary = SweepSummary {
        spec: spec.clone(),
        rows_file: rows_file.clone(),
        rows: outputs.len(),
        per_s,
    };
    let summary_path = out_dir.join("summary.json");
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| write_err(&summary_path, std::io::Error::other(e)))?;
    fs::write(&summary_path, json).map_err(|e| write_err(&summary_path, e))?;
    Ok(summary)
}
