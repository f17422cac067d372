//! Seeded experiments: random matrix instances run through the reverse
//! reduction, bulk validation of the forward reduction, and CSV output.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::oracle::brute_min_pm;
use crate::poly::Gf2Poly;
use crate::reductions::{
    forward_reduce_with, lift_solution, reverse_lift, reverse_reduce, solve_min_pm, Engine,
    LiftInit, MinPmInstance, ReverseLiftOptions, Rhs,
};
use crate::search::{rng_from_seed, SolverConfig};
use crate::toeplitz::{BinaryMatrix, Projection};

/// `m x k` matrix with independent entries, each 1 with probability `density`.
pub fn gen_random_matrix(m: usize, k: usize, density: f64, seed: u64) -> Result<BinaryMatrix> {
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidConfig(format!("density {density} outside (0, 1]")));
    }
    let mut rng = rng_from_seed(seed);
    BinaryMatrix::from_fn(m, k, |_, _| rng.random_bool(density))
}

/// SplitMix64 finalizer; derives independent sub-seeds from a trial seed.
fn mix(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const TAG_MULTIPLE: u64 = 1;
const TAG_HC: u64 = 2;
const TAG_SA: u64 = 3;
const TAG_RHS: u64 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Matrix shapes `(m, k)`.
    pub sizes: Vec<(usize, usize)>,
    pub trials: usize,
    /// Trial `i` generates its matrix from seed `base_seed + i`.
    pub base_seed: u64,
    pub density: f64,
    pub projection: Projection,
    /// Engine producing the multiple `P * Q` of each projected instance.
    pub multiple_engine: Engine,
    /// Schedule shared by every solver call; seeds are overridden per call.
    pub solver: SolverConfig,
    pub init: LiftInit,
    /// Random right-hand sides instead of `A x = 0`.
    pub random_rhs: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            sizes: vec![(40, 30)],
            trials: 50,
            base_seed: 0,
            density: 0.5,
            projection: Projection::default(),
            multiple_engine: Engine::HillClimb,
            solver: SolverConfig::default(),
            init: LiftInit::Truncate,
            random_rhs: false,
        }
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sizes: Vec<String> = self.sizes.iter().map(|(m, k)| format!("{m}x{k}")).collect();
        writeln!(f, "sizes={}", sizes.join(","))?;
        writeln!(f, "trials={}", self.trials)?;
        writeln!(f, "base-seed={}", self.base_seed)?;
        writeln!(f, "density={}", self.density)?;
        writeln!(f, "projection={}", self.projection)?;
        writeln!(f, "multiple-engine={}", self.multiple_engine)?;
        let init = match self.init {
            LiftInit::Truncate => "truncate",
            LiftInit::DropFirst => "drop-first",
        };
        writeln!(f, "lift-init={init}")?;
        writeln!(f, "rhs={}", if self.random_rhs { "random" } else { "homogeneous" })?;
        write!(f, "{}", self.solver)
    }
}

/// One trial of the reverse experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub weight_p: usize,
    /// Weight of the multiple `P * Q`.
    pub weight_pq: usize,
    /// Violations of the assignment seeded from `Q`.
    pub initial_norm: usize,
    pub norm_hc: usize,
    pub norm_sa: usize,
}

impl TrialRecord {
    pub fn ratio_hc(&self) -> f64 {
        self.norm_hc as f64 / self.weight_pq as f64
    }

    pub fn ratio_sa(&self) -> f64 {
        self.norm_sa as f64 / self.weight_pq as f64
    }

    pub fn inverse_ratio_hc(&self) -> f64 {
        self.weight_pq as f64 / self.norm_hc as f64
    }

    pub fn inverse_ratio_sa(&self) -> f64 {
        self.weight_pq as f64 / self.norm_sa as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub max: f64,
    pub mean: f64,
    pub median: f64,
}

impl Stats {
    /// `None` for an empty sample.
    pub fn of(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
        };
        Some(Stats {
            max: sorted[n - 1],
            mean: sorted.iter().sum::<f64>() / n as f64,
            median,
        })
    }
}

/// All trials for one matrix shape.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeReport {
    pub rows: usize,
    pub cols: usize,
    /// Dimensions of the Toeplitz operator of the projected instance.
    pub lwpm_rows: usize,
    pub lwpm_cols: usize,
    pub records: Vec<TrialRecord>,
    /// Trials that raised an error, with the message.
    pub failures: Vec<(usize, String)>,
}

impl SizeReport {
    pub fn ratios_hc(&self) -> Vec<f64> {
        self.records.iter().map(TrialRecord::ratio_hc).collect()
    }

    pub fn ratios_sa(&self) -> Vec<f64> {
        self.records.iter().map(TrialRecord::ratio_sa).collect()
    }

    pub fn stats_hc(&self) -> Option<Stats> {
        Stats::of(&self.ratios_hc())
    }

    pub fn stats_sa(&self) -> Option<Stats> {
        Stats::of(&self.ratios_sa())
    }

    fn stem(&self) -> String {
        format!("{}_{}", self.rows, self.cols)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub sizes: Vec<SizeReport>,
}

fn run_trial(cfg: &ExperimentConfig, m: usize, k: usize, trial: usize) -> Result<TrialRecord> {
    let seed = cfg.base_seed.wrapping_add(trial as u64);
    let a = gen_random_matrix(m, k, cfg.density, seed)?;
    let inst = reverse_reduce(&a, cfg.projection)?;
    let sol = solve_min_pm(
        &inst,
        cfg.multiple_engine,
        &cfg.solver.clone().with_seed(mix(seed, TAG_MULTIPLE)),
    )?;
    let opts = ReverseLiftOptions {
        init: cfg.init,
        rhs: if cfg.random_rhs {
            Rhs::Random(mix(seed, TAG_RHS))
        } else {
            Rhs::Homogeneous
        },
    };
    let lift = |engine: Engine, tag: u64| {
        let solver = cfg.solver.clone().with_seed(mix(seed, tag)).with_forbid_zero(true);
        reverse_lift(&a, &sol.multiple, inst.poly(), engine, &solver, opts)
    };
    let hc = lift(Engine::HillClimb, TAG_HC)?;
    let sa = lift(Engine::SimulatedAnneal, TAG_SA)?;
    Ok(TrialRecord {
        trial,
        seed,
        weight_p: inst.poly().weight(),
        weight_pq: sol.weight,
        initial_norm: hc.initial_norm,
        norm_hc: hc.norm,
        norm_sa: sa.norm,
    })
}

/// Runs every trial for every shape: random matrix, projection onto a
/// Toeplitz instance, a multiple from the configured engine, then hill
/// climbing and annealing seeded from that multiple. Trials run in parallel
/// but the report is in trial order and depends only on the config.
pub fn run_reverse_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if cfg.trials == 0 {
        return Err(Error::InvalidConfig("at least one trial required".into()));
    }
    cfg.solver.validate()?;
    let mut sizes = Vec::with_capacity(cfg.sizes.len());
    for &(m, k) in &cfg.sizes {
        if m == 0 || k == 0 {
            return Err(Error::EmptyMatrix);
        }
        let outcomes: Vec<Result<TrialRecord>> = (0..cfg.trials)
            .into_par_iter()
            .map(|trial| run_trial(cfg, m, k, trial))
            .collect();
        let mut records = Vec::new();
        let mut failures = Vec::new();
        for (trial, outcome) in outcomes.into_iter().enumerate() {
            match outcome {
                Ok(r) => records.push(r),
                Err(e) => failures.push((trial, e.to_string())),
            }
        }
        sizes.push(SizeReport {
            rows: m,
            cols: k,
            lwpm_rows: m + k + 1,
            lwpm_cols: k + 1,
            records,
            failures,
        });
    }
    Ok(ExperimentReport {
        config: cfg.clone(),
        sizes,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".to_string(), |x| x.to_string())
}

impl ExperimentReport {
    /// Per-shape maxima: `maxsat_instance,lwpm_instance,max_ratio_hc,max_ratio_sa`.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("maxsat_instance,lwpm_instance,max_ratio_hc,max_ratio_sa\n");
        for s in &self.sizes {
            let _ = writeln!(
                out,
                "{}x{},{}x{},{},{}",
                s.rows,
                s.cols,
                s.lwpm_rows,
                s.lwpm_cols,
                fmt_opt(s.stats_hc().map(|st| st.max)),
                fmt_opt(s.stats_sa().map(|st| st.max)),
            );
        }
        out
    }

    /// Max, mean and median of both ratio orientations per shape.
    pub fn aggregates_csv(&self) -> String {
        let mut out = String::from(
            "maxsat_instance,series,orientation,trials,failures,max,mean,median\n",
        );
        for s in &self.sizes {
            let series: [(&str, &str, Vec<f64>); 4] = [
                ("hc", "norm/pq", s.ratios_hc()),
                ("sa", "norm/pq", s.ratios_sa()),
                ("hc", "pq/norm", s.records.iter().map(TrialRecord::inverse_ratio_hc).collect()),
                ("sa", "pq/norm", s.records.iter().map(TrialRecord::inverse_ratio_sa).collect()),
            ];
            for (name, orientation, values) in series {
                let st = Stats::of(&values);
                let _ = writeln!(
                    out,
                    "{}x{},{name},{orientation},{},{},{},{},{}",
                    s.rows,
                    s.cols,
                    s.records.len(),
                    s.failures.len(),
                    fmt_opt(st.map(|x| x.max)),
                    fmt_opt(st.map(|x| x.mean)),
                    fmt_opt(st.map(|x| x.median)),
                );
            }
        }
        out
    }

    /// One row per trial with every measured quantity.
    pub fn records_csv(&self, size: &SizeReport) -> String {
        let mut out = String::from(
            "trial,seed,weight_p,weight_pq,initial_norm,norm_hc,norm_sa,ratio_hc,ratio_sa,inv_ratio_hc,inv_ratio_sa\n",
        );
        for r in &size.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.trial,
                r.seed,
                r.weight_p,
                r.weight_pq,
                r.initial_norm,
                r.norm_hc,
                r.norm_sa,
                r.ratio_hc(),
                r.ratio_sa(),
                r.inverse_ratio_hc(),
                r.inverse_ratio_sa()
            );
        }
        for (trial, msg) in &size.failures {
            let _ = writeln!(out, "# trial {trial} failed: {msg}");
        }
        out
    }

    /// A plotted series: header `x,y`, then `instance,value` with instances
    /// numbered from 1.
    pub fn series_csv(size: &SizeReport, value: impl Fn(&TrialRecord) -> usize) -> String {
        let mut out = String::from("x,y\n");
        for (i, r) in size.records.iter().enumerate() {
            let _ = writeln!(out, "{},{}", i + 1, value(r));
        }
        out
    }

    /// Human-readable table of per-shape maxima.
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<16} {:<16} {:<22} {:<22}\n",
            "MAX-SAT instance", "LWPM instance", "Max ratio for HC", "Max ratio for SA"
        );
        for s in &self.sizes {
            let _ = writeln!(
                out,
                "{:<16} {:<16} {:<22} {:<22}",
                format!("{}x{}", s.rows, s.cols),
                format!("{}x{}", s.lwpm_rows, s.lwpm_cols),
                fmt_opt(s.stats_hc().map(|st| st.max)),
                fmt_opt(s.stats_sa().map(|st| st.max)),
            );
        }
        out
    }

    /// Writes `summary.csv`, `aggregates.csv`, `config.txt` and, per shape,
    /// `{m}_{k}_pq.csv`, `{m}_{k}_hc.csv`, `{m}_{k}_sa.csv` and
    /// `{m}_{k}_records.csv` into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("summary.csv"), self.summary_csv())?;
        fs::write(dir.join("aggregates.csv"), self.aggregates_csv())?;
        fs::write(dir.join("config.txt"), self.config.to_string())?;
        for s in &self.sizes {
            let stem = s.stem();
            fs::write(dir.join(format!("{stem}_pq.csv")), Self::series_csv(s, |r| r.weight_pq))?;
            fs::write(dir.join(format!("{stem}_hc.csv")), Self::series_csv(s, |r| r.norm_hc))?;
            fs::write(dir.join(format!("{stem}_sa.csv")), Self::series_csv(s, |r| r.norm_sa))?;
            fs::write(dir.join(format!("{stem}_records.csv")), self.records_csv(s))?;
        }
        Ok(())
    }
}

/// A failed identity check in [`run_forward_validation`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub instance: MinPmInstance,
    pub assignment: Option<BitVec>,
    pub detail: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# {}", self.detail)?;
        write!(f, "{}", self.instance)?;
        if let Some(x) = &self.assignment {
            writeln!(f, "gamma {x}")?;
        }
        Ok(())
    }
}

impl FromStr for Counterexample {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut detail = String::new();
        let mut assignment = None;
        let mut rest = String::new();
        for line in text.lines() {
            if let Some(d) = line.strip_prefix("# ") {
                detail = d.to_string();
            } else if let Some(g) = line.strip_prefix("gamma ") {
                assignment = Some(g.parse()?);
            } else {
                rest.push_str(line);
                rest.push('\n');
            }
        }
        Ok(Counterexample {
            instance: rest.parse()?,
            assignment,
            detail,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForwardValidationReport {
    pub instances: usize,
    pub passed: usize,
}

/// Largest `t + 1` drawn by [`run_forward_validation`].
const VALIDATION_MAX_VARS: usize = 14;

/// Checks, for `count` random instances with `deg P <= max_degree`, that the
/// lifted weight equals the violation count for random assignments and that
/// the pinned exhaustive optimum, the unpinned exhaustive optimum and the
/// polynomial oracle agree. The first instance is always `P = 1`.
pub fn run_forward_validation(count: usize, max_degree: usize, seed: u64) -> Result<ForwardValidationReport> {
    let mut rng = rng_from_seed(seed);
    let cfg = SolverConfig::default();
    let fail = |instance: &MinPmInstance, assignment: Option<BitVec>, detail: String| {
        Error::Counterexample(
            Counterexample {
                instance: instance.clone(),
                assignment,
                detail,
            }
            .to_string(),
        )
    };
    for idx in 0..count {
        let d = if idx == 0 { 0 } else { rng.random_range(0..=max_degree) };
        let poly = Gf2Poly::from_exponents((0..d).filter(|_| rng.random_bool(0.5)).chain([d]));
        let n = d + rng.random_range(1..=VALIDATION_MAX_VARS);
        let inst = MinPmInstance::new(poly, n)?;
        let system = forward_reduce_with(&inst, false).system().clone();

        for _ in 0..8 {
            let x = BitVec::from_fn(inst.t() + 1, |_| rng.random_bool(0.5));
            if x.is_zero() {
                continue;
            }
            let k = lift_solution(&inst, &x)?;
            let violations = system.violation_count(&x)?;
            if k.weight() != violations {
                return Err(fail(
                    &inst,
                    Some(x),
                    format!("weight {} != violations {violations}", k.weight()),
                ));
            }
        }

        let (_, oracle) = brute_min_pm(inst.poly(), n)?;
        let pinned = solve_min_pm(&inst, Engine::Exhaustive, &cfg)?.weight;
        let (x, satisfied) = system.exhaustive_solve(true)?;
        let unpinned = system.constraints() - satisfied;
        if !(oracle == pinned && pinned == unpinned) {
            return Err(fail(
                &inst,
                Some(x),
                format!("oracle {oracle}, pinned {pinned}, unpinned {unpinned}"),
            ));
        }
    }
    Ok(ForwardValidationReport {
        instances: count,
        passed: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_generation() {
        let a = gen_random_matrix(5, 7, 1.0, 3).unwrap();
        assert_eq!(a.count_ones(), 35);
        assert_eq!(gen_random_matrix(20, 20, 0.3, 11), gen_random_matrix(20, 20, 0.3, 11));
        assert_ne!(gen_random_matrix(20, 20, 0.3, 11), gen_random_matrix(20, 20, 0.3, 12));
        assert!(gen_random_matrix(2, 2, 0.0, 1).is_err());
        assert!(gen_random_matrix(2, 2, 1.5, 1).is_err());
    }

    #[test]
    fn matrix_density_within_five_sigma() {
        let (m, k, density) = (40, 25, 0.3);
        let draws = 1000;
        let ones: usize = (0..draws)
            .map(|s| gen_random_matrix(m, k, density, s).unwrap().count_ones())
            .sum();
        let trials = (m * k * draws as usize) as f64;
        let mean = trials * density;
        let sigma = (trials * density * (1.0 - density)).sqrt();
        assert!((ones as f64 - mean).abs() < 5.0 * sigma, "{ones} vs {mean} +- {sigma}");
    }

    #[test]
    fn stats() {
        let st = Stats::of(&[3.0, 1.0, 2.0, 10.0]).unwrap();
        assert_eq!(st.max, 10.0);
        assert_eq!(st.median, 2.5);
        assert_eq!(st.mean, 4.0);
        assert_eq!(Stats::of(&[2.0]).unwrap().median, 2.0);
        assert!(Stats::of(&[]).is_none());
    }

    #[test]
    fn small_experiment_is_deterministic() {
        let cfg = ExperimentConfig {
            sizes: vec![(12, 8)],
            trials: 3,
            base_seed: 5,
            ..Default::default()
        };
        let a = run_reverse_experiment(&cfg).unwrap();
        let b = run_reverse_experiment(&cfg).unwrap();
        assert_eq!(a, b);
        let s = &a.sizes[0];
        assert_eq!((s.lwpm_rows, s.lwpm_cols), (21, 9));
        assert_eq!(s.records.len() + s.failures.len(), 3);
        for r in &s.records {
            assert!(r.norm_hc <= r.initial_norm);
            assert!(r.norm_sa <= r.initial_norm);
            assert!(r.weight_pq <= r.weight_p);
        }
        assert_eq!(a.summary_csv().lines().count(), 2);
        assert!(a.summary_csv().starts_with("maxsat_instance,lwpm_instance,max_ratio_hc,max_ratio_sa\n12x8,21x9,"));
    }

    #[test]
    fn zero_trials_rejected() {
        let cfg = ExperimentConfig {
            trials: 0,
            ..Default::default()
        };
        assert!(run_reverse_experiment(&cfg).is_err());
    }

    #[test]
    fn forward_validation_passes() {
        let report = run_forward_validation(40, 8, 17).unwrap();
        assert_eq!(report.passed, 40);
    }

    #[test]
    fn counterexample_round_trip() {
        let c = Counterexample {
            instance: MinPmInstance::new("1 + x^2 + x^3".parse().unwrap(), 9).unwrap(),
            assignment: Some("100101".parse().unwrap()),
            detail: "weight 3 != violations 4".into(),
        };
        assert_eq!(c.to_string().parse::<Counterexample>().unwrap(), c);
    }
}
