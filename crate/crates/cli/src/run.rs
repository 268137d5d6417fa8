use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;
use shadowlab_core::estimators::{
    bound_report, default_delta, estimate_conditional_mi, estimate_elogn_sweep, estimate_n_sweep,
    reference_shadow, validate_dpi, BoundValue, Flag, LogN,
};
use shadowlab_core::geometry::{hausdorff, symmetry_group, Body, EmbeddedBody};
use shadowlab_core::parallel::current_workers;
use shadowlab_core::sampling::{iterate_chain, project_chain, sample_chain, RandomSource};
use shadowlab_core::strata::{stratify, theorem2_lower_bound, BoundMode, StratReport};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{num, opt_num, sig17, write_csv, write_json, write_text, Record};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pipeline {
    Sample,
    Project,
    EstimateN,
    Bound,
    Mi,
    Dpi,
    Stratify,
    Full,
}

impl Pipeline {
    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Sample => "sample",
            Pipeline::Project => "project",
            Pipeline::EstimateN => "estimate-n",
            Pipeline::Bound => "bound",
            Pipeline::Mi => "mi",
            Pipeline::Dpi => "dpi",
            Pipeline::Stratify => "stratify",
            Pipeline::Full => "full",
        }
    }

    /// Substream label; `full` reuses the labels of its stages so each
    /// output matches the standalone subcommand.
    fn stream_label(self) -> u64 {
        match self {
            Pipeline::Sample => 1,
            Pipeline::Project => 2,
            Pipeline::EstimateN => 3,
            Pipeline::Bound => 4,
            Pipeline::Mi => 5,
            Pipeline::Dpi => 6,
            Pipeline::Stratify => 7,
            Pipeline::Full => 0,
        }
    }
}

const STAGES: [Pipeline; 7] = [
    Pipeline::Sample,
    Pipeline::Project,
    Pipeline::EstimateN,
    Pipeline::Bound,
    Pipeline::Mi,
    Pipeline::Dpi,
    Pipeline::Stratify,
];

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: &'static str,
    pub library_version: &'static str,
    pub master_seed: u64,
    pub workers_requested: usize,
    pub workers_used: usize,
    pub body_id: String,
    pub config: ExperimentConfig,
    pub config_file: String,
    pub outputs: BTreeMap<String, String>,
    pub substreams: BTreeMap<String, u64>,
    pub skipped: Vec<String>,
    pub started_unix_seconds: u64,
    pub wall_clock_seconds: f64,
}

struct Run {
    cfg: ExperimentConfig,
    body: Body,
    body_id: String,
    seed: u64,
    out: PathBuf,
    delta: f64,
    outputs: BTreeMap<String, String>,
    substreams: BTreeMap<String, u64>,
    skipped: Vec<String>,
}

fn flags_text(flags: &[Flag]) -> Option<String> {
    if flags.is_empty() {
        return None;
    }
    let names: Vec<String> = flags
        .iter()
        .map(|f| match f {
            Flag::Divergent => "DIVERGENT".to_string(),
            Flag::FiniteGroupDegenerate => "FINITE_GROUP_DEGENERATE".to_string(),
        })
        .collect();
    Some(names.join(","))
}

fn logn_value(v: LogN) -> Value {
    opt_num(v.finite())
}

impl Run {
    fn n(&self) -> usize {
        self.body.ambient_dim()
    }

    fn source(&mut self, p: Pipeline) -> RandomSource {
        let src = RandomSource::new(self.seed).substream(p.stream_label());
        self.substreams.insert(p.name().to_string(), src.stream_id);
        src
    }

    fn path(&mut self, quantity: &str, file: &str) -> PathBuf {
        self.outputs.insert(quantity.to_string(), file.to_string());
        self.out.join(file)
    }

    fn record(&self, quantity: &str, value: Value, n_samples: usize) -> Record {
        Record::new(quantity, value, n_samples, self.seed, &self.body_id)
    }

    fn chain_length(&self, m: Option<usize>) -> usize {
        m.unwrap_or(self.n().saturating_sub(1))
    }

    fn sample(&mut self) -> CliResult<()> {
        let src = self.source(Pipeline::Sample);
        let n = self.n();
        let m = self.chain_length(self.cfg.chain.m);
        let mut rows = Vec::new();
        let mut overlap = 0.0f64;
        for s in 0..self.cfg.chain.samples {
            let chain = sample_chain(&mut src.substream(s as u64).rng(), n, m)?;
            overlap = overlap.max(chain.max_overlap());
            for (i, u) in chain.directions().iter().enumerate() {
                let mut row = vec![s.to_string(), (i + 1).to_string()];
                row.extend(u.iter().map(|x| sig17(*x)));
                rows.push(row);
            }
        }
        let mut header = vec!["sample".to_string(), "direction".to_string()];
        header.extend((0..n).map(|j| format!("x{j}")));
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let csv = self.path("direction_chains", "sample.csv");
        write_csv(&csv, &header, &rows)?;
        let rec = self.record("chain_max_overlap", num(overlap), self.cfg.chain.samples);
        let json = self.path("chain_max_overlap", "sample.json");
        write_json(&json, &vec![rec])
    }

    fn project(&mut self) -> CliResult<()> {
        let src = self.source(Pipeline::Project);
        let n = self.n();
        let m = self.chain_length(self.cfg.chain.m);
        let mut rows = Vec::new();
        let mut worst = 0.0f64;
        for s in 0..self.cfg.chain.samples {
            let chain = sample_chain(&mut src.substream(s as u64).rng(), n, m)?;
            let stages = project_chain(&self.body, &chain)?;
            if let Body::Polytope(p) = &self.body {
                let direct = EmbeddedBody::project_onto(p, &chain.residual_subspace());
                let last = iterate_chain(&self.body, &chain)?.pop().expect("m >= 1");
                worst = worst.max(hausdorff(
                    &last.embedded_polytope(),
                    &direct.embedded_polytope(),
                )?);
            }
            for (i, st) in stages.iter().enumerate() {
                let (kind, count) = match st.body() {
                    Body::Polytope(p) => ("polytope", p.len()),
                    Body::Ball { .. } => ("ball", 0),
                };
                rows.push(vec![
                    s.to_string(),
                    (i + 1).to_string(),
                    st.dim().to_string(),
                    kind.to_string(),
                    count.to_string(),
                    sig17(st.body().circumradius()),
                ]);
                if s == 0 {
                    if let Body::Polytope(p) = st.body() {
                        let file = format!("project_stage{}.txt", i + 1);
                        let path = self.path(&format!("shadow_stage{}", i + 1), &file);
                        write_text(&path, &p.to_text())?;
                    }
                }
            }
        }
        let csv = self.path("projection_stages", "project.csv");
        write_csv(
            &csv,
            &["sample", "stage", "dim", "kind", "vertices", "circumradius"],
            &rows,
        )?;
        let rec = self.record("projection_chain_gap", num(worst), self.cfg.chain.samples);
        let json = self.path("projection_chain_gap", "project.json");
        write_json(&json, &vec![rec])
    }

    fn estimate_n(&mut self) -> CliResult<()> {
        let src = self.source(Pipeline::EstimateN);
        let eps = self.cfg.estimate.epsilons.clone();
        let k2 = reference_shadow(&self.body, &src, 0)?;
        let sweep = estimate_n_sweep(&self.body, &k2, &eps, self.cfg.estimate.samples, &src)?;
        let (outer, inner) = (self.cfg.estimate.outer, self.cfg.estimate.inner);
        let elogn = estimate_elogn_sweep(&self.body, &eps, outer, inner, &src)?;

        let mut records = Vec::new();
        let mut rows = Vec::new();
        for e in &sweep {
            records.push(
                self.record("n_epsilon_fraction", num(e.fraction), e.n_samples)
                    .epsilon(e.epsilon)
                    .ci(Some(e.wilson_ci)),
            );
            rows.push(vec![
                sig17(e.epsilon),
                e.n_samples.to_string(),
                e.hits.to_string(),
                sig17(e.fraction),
                sig17(e.wilson_ci.0),
                sig17(e.wilson_ci.1),
                self.seed.to_string(),
                self.body_id.clone(),
            ]);
        }
        let csv = self.path("n_epsilon_fraction", "estimate_n.csv");
        write_csv(
            &csv,
            &["epsilon", "n_samples", "hits", "fraction", "ci_lo", "ci_hi", "seed", "body_id"],
            &rows,
        )?;

        let mut rows = Vec::new();
        for e in &elogn {
            records.push(
                self.record("e_log_n", logn_value(e.value), e.outer * e.inner)
                    .epsilon(e.epsilon)
                    .ci(e.ci)
                    .flag(flags_text(&e.flags)),
            );
            let min_fraction = e.fractions.iter().copied().fold(f64::INFINITY, f64::min);
            rows.push(vec![
                sig17(e.epsilon),
                e.value.finite().map(sig17).unwrap_or_default(),
                flags_text(&e.flags).unwrap_or_default(),
                e.ci.map(|c| sig17(c.0)).unwrap_or_default(),
                e.ci.map(|c| sig17(c.1)).unwrap_or_default(),
                e.outer.to_string(),
                e.inner.to_string(),
                sig17(min_fraction),
                self.seed.to_string(),
                self.body_id.clone(),
            ]);
        }
        let csv = self.path("e_log_n", "e_log_n.csv");
        write_csv(
            &csv,
            &[
                "epsilon", "e_log_n", "flag", "ci_lo", "ci_hi", "outer", "inner", "min_fraction",
                "seed", "body_id",
            ],
            &rows,
        )?;
        let json = self.path("estimate_n", "estimate_n.json");
        write_json(&json, &records)
    }

    fn bound(&mut self) -> CliResult<()> {
        let src = self.source(Pipeline::Bound);
        let eps = self.cfg.bound_epsilon();
        let est = &self.cfg.estimate;
        let rep = bound_report(
            &self.body,
            eps,
            est.outer,
            est.inner,
            self.cfg.information.chains,
            self.delta,
            &src,
        )?;
        let draws = rep.outer * rep.inner;
        let flags = flags_text(&rep.flags);
        let bound_flag = match rep.bound {
            BoundValue::Finite(_) => flags.clone(),
            BoundValue::Infinite => Some(match &flags {
                Some(f) => format!("INFINITE,{f}"),
                None => "INFINITE".to_string(),
            }),
        };
        let records = vec![
            self.record("theorem1_first_term", num(rep.first_term), 0),
            self.record("e_log_n", logn_value(rep.e_log_n), draws)
                .epsilon(eps)
                .flag(flags),
            self.record("theorem1_bound", opt_num(rep.bound.finite()), draws)
                .epsilon(eps)
                .flag(bound_flag),
            self.record("mi_plugin", num(rep.mi_plugin), rep.chains)
                .delta(rep.delta),
        ];
        let json = self.path("theorem1_bound", "bound.json");
        write_json(&json, &records)
    }

    fn mi(&mut self) -> CliResult<()> {
        let src = self.source(Pipeline::Mi);
        let m = self.chain_length(self.cfg.information.m);
        let chains = self.cfg.information.chains;
        let mut records = Vec::new();
        let mut rows = Vec::new();
        for &mult in &self.cfg.information.delta_multipliers.clone() {
            let delta = self.delta * mult;
            let est = estimate_conditional_mi(&self.body, m, chains, delta, &src)?;
            records.push(
                self.record(&format!("conditional_mi_k1_k{m}"), num(est.value), est.n_samples)
                    .delta(delta),
            );
            rows.push(vec![
                sig17(mult),
                sig17(delta),
                m.to_string(),
                est.n_samples.to_string(),
                sig17(est.value),
                est.classes_x.to_string(),
                est.classes_y.to_string(),
                est.classes_joint.to_string(),
                self.seed.to_string(),
                self.body_id.clone(),
            ]);
        }
        let csv = self.path("mi_delta_sweep", "mi.csv");
        write_csv(
            &csv,
            &[
                "delta_multiplier", "delta", "m", "n_samples", "mi", "classes_k1", "classes_km",
                "classes_joint", "seed", "body_id",
            ],
            &rows,
        )?;
        let json = self.path("conditional_mi", "mi.json");
        write_json(&json, &records)
    }

    fn dpi(&mut self) -> CliResult<()> {
        let src = self.source(Pipeline::Dpi);
        let m = self.chain_length(self.cfg.information.m);
        let info = &self.cfg.information;
        let rep = validate_dpi(&self.body, m, info.chains, self.delta, info.bootstrap, &src)?;
        let half = 2.0 * rep.stderr;
        let records = vec![
            self.record("mi_k1_k2", num(rep.mi_first_second.value), rep.n_samples)
                .delta(rep.delta),
            self.record(&format!("mi_k1_k{m}"), num(rep.mi_first_last.value), rep.n_samples)
                .delta(rep.delta),
            self.record("dpi_check", num(rep.difference), rep.n_samples)
                .delta(rep.delta)
                .ci(Some((rep.difference - half, rep.difference + half)))
                .flag(Some(if rep.pass { "PASS" } else { "FAIL" }.to_string())),
        ];
        let rows = vec![
            vec![
                "k1_k2".to_string(),
                sig17(rep.mi_first_second.value),
                rep.mi_first_second.classes_x.to_string(),
                rep.mi_first_second.classes_y.to_string(),
                rep.mi_first_second.classes_joint.to_string(),
            ],
            vec![
                format!("k1_k{m}"),
                sig17(rep.mi_first_last.value),
                rep.mi_first_last.classes_x.to_string(),
                rep.mi_first_last.classes_y.to_string(),
                rep.mi_first_last.classes_joint.to_string(),
            ],
        ];
        let csv = self.path("dpi_comparison", "dpi.csv");
        write_csv(&csv, &["pair", "mi", "classes_a", "classes_b", "classes_joint"], &rows)?;
        let json = self.path("dpi_check", "dpi.json");
        write_json(&json, &records)
    }

    fn stratify(&mut self) -> CliResult<()> {
        let src = self.source(Pipeline::Stratify);
        let n = self.n();
        let (report, mode) = match &self.body {
            Body::Ball { .. } => (StratReport::analytic_ball(n), BoundMode::AnalyticBall),
            Body::Polytope(p) => {
                let g = symmetry_group(p, self.cfg.tolerances.group)?;
                let rep = stratify(&g, n, self.cfg.strata.samples, &src, self.cfg.tolerances.subspace)?;
                (rep, BoundMode::Counting)
            }
        };
        let lower = theorem2_lower_bound(&report, mode)?;
        let records = vec![
            self.record("theorem2_lower_bound", num(lower), report.n_samples)
                .flag(flags_text(&report.flags)),
            self.record("symmetry_group_order", num(report.group_order as f64), 0),
        ];
        let rows: Vec<Vec<String>> = report
            .strata
            .iter()
            .enumerate()
            .map(|(i, s)| {
                vec![
                    i.to_string(),
                    s.class_rep.order().to_string(),
                    sig17(s.v),
                    s.count.to_string(),
                    sig17(s.mu_hat),
                    s.class_rep.contains_negative_identity().to_string(),
                    report.measure_convention.to_string(),
                ]
            })
            .collect();
        let csv = self.path("strata", "strata.csv");
        write_csv(
            &csv,
            &[
                "class",
                "stabilizer_order",
                "v",
                "count",
                "mu_hat",
                "contains_negative_identity",
                "measure",
            ],
            &rows,
        )?;
        let json = self.path("theorem2_lower_bound", "strata.json");
        write_json(&json, &records)
    }

    fn stage(&mut self, p: Pipeline) -> CliResult<()> {
        match p {
            Pipeline::Sample => self.sample(),
            Pipeline::Project => self.project(),
            Pipeline::EstimateN => self.estimate_n(),
            Pipeline::Bound => self.bound(),
            Pipeline::Mi => self.mi(),
            Pipeline::Dpi => self.dpi(),
            Pipeline::Stratify => self.stratify(),
            Pipeline::Full => unreachable!("full is expanded by the caller"),
        }
    }
}

/// Runs one pipeline and writes its outputs, the resolved config and the
/// manifest into `out`.
pub fn run(
    pipeline: Pipeline,
    mut cfg: ExperimentConfig,
    seed: u64,
    workers: usize,
    out: &Path,
) -> CliResult<RunManifest> {
    let started = Instant::now();
    let started_unix_seconds = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    cfg.seed = seed;
    cfg.out = None;
    let body = cfg.body.build()?;
    let delta = cfg.information.delta.unwrap_or_else(|| default_delta(&body));
    let mut run = Run {
        body_id: cfg.body.id(),
        cfg: cfg.clone(),
        body,
        seed,
        out: out.to_path_buf(),
        delta,
        outputs: BTreeMap::new(),
        substreams: BTreeMap::new(),
        skipped: Vec::new(),
    };
    if pipeline == Pipeline::Full {
        for p in STAGES {
            let m = run.chain_length(run.cfg.information.m);
            if p == Pipeline::Dpi && m < 3 && run.cfg.information.m.is_none() {
                run.skipped.push(format!("dpi: needs n >= 4, body has n = {}", run.n()));
                continue;
            }
            run.stage(p)?;
        }
    } else {
        run.stage(pipeline)?;
    }
    let config_file = "config.toml".to_string();
    write_text(&out.join(&config_file), &cfg.to_toml())?;
    let manifest = RunManifest {
        subcommand: pipeline.name(),
        library_version: env!("CARGO_PKG_VERSION"),
        master_seed: seed,
        workers_requested: workers,
        workers_used: current_workers(),
        body_id: run.body_id.clone(),
        config: cfg,
        config_file,
        outputs: run.outputs,
        substreams: run.substreams,
        skipped: run.skipped,
        started_unix_seconds,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    write_json(&out.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

