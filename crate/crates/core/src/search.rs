//! Stochastic local search over assignments of an [`AffineSystem`].
//!
//! Both solvers minimize the violation count. Neighbours are the
//! assignments at Hamming distance one; the cost change of every possible
//! flip is cached and updated incrementally, so a flip of variable `v` costs
//! the total support size of the constraints containing `v`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::affine::AffineSystem;
use crate::bits::{Assignment, BitVec};
use crate::error::{Error, Result};

/// The generator behind every seeded run. ChaCha8 output is specified
/// bit-for-bit, so seeded runs agree across platforms.
pub type SearchRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SearchRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HcVariant {
    /// Move to a uniformly random member of the best neighbour set.
    #[default]
    Stochastic,
    /// Move to the lowest-indexed best neighbour.
    Steepest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SaReturn {
    /// Best assignment visited by the walk.
    #[default]
    Best,
    /// Assignment held when the temperature drops to the floor.
    Final,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub seed: u64,
    /// Per-run move budget (hill climbing) or step budget (annealing).
    pub max_iters: usize,
    /// Extra runs from uniformly random nonzero starting points.
    pub restarts: usize,
    pub t_initial: f64,
    pub t_min: f64,
    /// Geometric cooling factor.
    pub alpha: f64,
    pub forbid_zero: bool,
    pub sa_return: SaReturn,
    pub hc_variant: HcVariant,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0,
            max_iters: 100_000,
            restarts: 0,
            t_initial: 10.0,
            t_min: 0.001,
            alpha: 0.95,
            forbid_zero: false,
            sa_return: SaReturn::Best,
            hc_variant: HcVariant::Stochastic,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_forbid_zero(mut self, forbid_zero: bool) -> Self {
        self.forbid_zero = forbid_zero;
        self
    }

    /// Checks parameter ranges. A schedule with `t_initial <= t_min` is
    /// accepted: annealing then performs no steps.
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max-iters must be positive".into()));
        }
        if !(self.t_initial > 0.0 && self.t_initial.is_finite()) {
            return Err(Error::InvalidConfig("t-initial must be positive".into()));
        }
        if !(self.t_min > 0.0 && self.t_min.is_finite()) {
            return Err(Error::InvalidConfig("t-min must be positive".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig("alpha must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("invalid value '{value}' for {key}")))
        }
        match key {
            "seed" => self.seed = num(key, value)?,
            "max-iters" => self.max_iters = num(key, value)?,
            "restarts" => self.restarts = num(key, value)?,
            "t-initial" => self.t_initial = num(key, value)?,
            "t-min" => self.t_min = num(key, value)?,
            "alpha" => self.alpha = num(key, value)?,
            "forbid-zero" => self.forbid_zero = num(key, value)?,
            "sa-return" => {
                self.sa_return = match value {
                    "best" => SaReturn::Best,
                    "final" => SaReturn::Final,
                    _ => return Err(Error::InvalidConfig(format!("invalid sa-return '{value}'"))),
                }
            }
            "hc-variant" => {
                self.hc_variant = match value {
                    "stochastic" => HcVariant::Stochastic,
                    "steepest" => HcVariant::Steepest,
                    _ => return Err(Error::InvalidConfig(format!("invalid hc-variant '{value}'"))),
                }
            }
            _ => return Err(Error::InvalidConfig(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Applies a `key=value` file on top of `self`. Blank lines and `#`
    /// comments are skipped.
    pub fn apply_kv(&mut self, text: &str) -> Result<()> {
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected key=value, found '{line}'", idx + 1))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }
}

impl fmt::Display for SolverConfig {
    /// The same `key=value` form read by [`SolverConfig::apply_kv`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed={}", self.seed)?;
        writeln!(f, "max-iters={}", self.max_iters)?;
        writeln!(f, "restarts={}", self.restarts)?;
        writeln!(f, "t-initial={}", self.t_initial)?;
        writeln!(f, "t-min={}", self.t_min)?;
        writeln!(f, "alpha={}", self.alpha)?;
        writeln!(f, "forbid-zero={}", self.forbid_zero)?;
        let sa = match self.sa_return {
            SaReturn::Best => "best",
            SaReturn::Final => "final",
        };
        writeln!(f, "sa-return={sa}")?;
        let hc = match self.hc_variant {
            HcVariant::Stochastic => "stochastic",
            HcVariant::Steepest => "steepest",
        };
        writeln!(f, "hc-variant={hc}")
    }
}

/// Every assignment at Hamming distance one from `x`, in flip-index order.
pub fn neighbours(x: &Assignment, forbid_zero: bool) -> Vec<Assignment> {
    let single = x.count_ones() == 1;
    (0..x.len())
        .filter(|&v| !(forbid_zero && single && x.get(v)))
        .map(|v| {
            let mut y = x.clone();
            y.flip(v);
            y
        })
        .collect()
}

/// Assignment plus the cached consequences of flipping each variable.
struct FlipState<'a> {
    supports: &'a [Vec<u32>],
    occurrences: &'a [Vec<u32>],
    x: Assignment,
    violated: Vec<bool>,
    cost: usize,
    /// Change of `cost` if the variable were flipped.
    delta: Vec<i64>,
    ones: usize,
}

/// Support lists of a system, shared by all runs on it.
struct Incidence {
    supports: Vec<Vec<u32>>,
    occurrences: Vec<Vec<u32>>,
}

impl Incidence {
    fn new(s: &AffineSystem) -> Self {
        let supports = (0..s.constraints())
            .map(|c| s.row(c).iter_ones().map(|v| v as u32).collect())
            .collect();
        let occurrences = s
            .occurrences()
            .into_iter()
            .map(|o| o.into_iter().map(|c| c as u32).collect())
            .collect();
        Incidence {
            supports,
            occurrences,
        }
    }
}

impl<'a> FlipState<'a> {
    fn new(s: &AffineSystem, inc: &'a Incidence, x: Assignment) -> Self {
        let violated: Vec<bool> = (0..s.constraints())
            .map(|c| s.row(c).dot(&x) != s.rhs().get(c))
            .collect();
        let cost = violated.iter().filter(|&&v| v).count();
        let delta = inc
            .occurrences
            .iter()
            .map(|occ| {
                occ.iter()
                    .map(|&c| if violated[c as usize] { -1 } else { 1 })
                    .sum()
            })
            .collect();
        let ones = x.count_ones();
        FlipState {
            supports: &inc.supports,
            occurrences: &inc.occurrences,
            x,
            violated,
            cost,
            delta,
            ones,
        }
    }

    fn allowed(&self, v: usize, forbid_zero: bool) -> bool {
        !(forbid_zero && self.ones == 1 && self.x.get(v))
    }

    fn flip(&mut self, v: usize) {
        if self.x.get(v) {
            self.ones -= 1;
        } else {
            self.ones += 1;
        }
        self.x.flip(v);
        let d = self.delta[v];
        self.cost = (self.cost as i64 + d) as usize;
        for &c in &self.occurrences[v] {
            let c = c as usize;
            self.violated[c] = !self.violated[c];
            let step = if self.violated[c] { -2 } else { 2 };
            for &u in &self.supports[c] {
                self.delta[u as usize] += step;
            }
        }
    }
}

fn check_start(s: &AffineSystem, x0: &Assignment, cfg: &SolverConfig) -> Result<()> {
    cfg.validate()?;
    if x0.len() != s.vars() {
        return Err(Error::LengthMismatch {
            expected: s.vars(),
            actual: x0.len(),
        });
    }
    if cfg.forbid_zero && x0.is_zero() {
        return Err(Error::ZeroAssignment);
    }
    Ok(())
}

/// Uniform random assignment of `k` bits, redrawn while zero if `nonzero`.
pub fn random_assignment(k: usize, nonzero: bool, rng: &mut SearchRng) -> Assignment {
    loop {
        let x = BitVec::from_fn(k, |_| rng.random_bool(0.5));
        if !(nonzero && x.is_zero()) {
            return x;
        }
    }
}

fn random_nonzero(k: usize, rng: &mut SearchRng) -> Assignment {
    random_assignment(k, true, rng)
}

/// Local search from `x0` that only ever takes strictly improving moves.
/// Each climb stops at a local minimum (no neighbour strictly better) or
/// after `max_iters` moves; further climbs start from random points when
/// `restarts > 0`, and the best result overall is returned.
pub fn hill_climb(s: &AffineSystem, x0: &Assignment, cfg: &SolverConfig) -> Result<Assignment> {
    check_start(s, x0, cfg)?;
    let inc = Incidence::new(s);
    let mut rng = rng_from_seed(cfg.seed);
    let mut best = climb(FlipState::new(s, &inc, x0.clone()), cfg, &mut rng);
    for _ in 0..cfg.restarts {
        let start = random_nonzero(s.vars(), &mut rng);
        let run = climb(FlipState::new(s, &inc, start), cfg, &mut rng);
        if run.cost < best.cost {
            best = run;
        }
    }
    Ok(best.x)
}

fn climb<'a>(mut st: FlipState<'a>, cfg: &SolverConfig, rng: &mut SearchRng) -> FlipState<'a> {
    let mut ties = Vec::new();
    for _ in 0..cfg.max_iters {
        let mut best_delta = i64::MAX;
        ties.clear();
        for v in 0..st.x.len() {
            if !st.allowed(v, cfg.forbid_zero) {
                continue;
            }
            let d = st.delta[v];
            if d < best_delta {
                best_delta = d;
                ties.clear();
            }
            if d == best_delta {
                ties.push(v);
            }
        }
        if ties.is_empty() || best_delta >= 0 {
            break;
        }
        let v = match cfg.hc_variant {
            HcVariant::Stochastic => ties[rng.random_range(0..ties.len())],
            HcVariant::Steepest => ties[0],
        };
        st.flip(v);
    }
    st
}

/// Simulated annealing from `x0` with geometric cooling. One uniformly random
/// neighbour is proposed per temperature; it is accepted when it is no worse,
/// or with probability `exp(-increase / T)` otherwise. The walk ends once the
/// temperature reaches `t_min` or after `max_iters` steps.
pub fn simulated_anneal(s: &AffineSystem, x0: &Assignment, cfg: &SolverConfig) -> Result<Assignment> {
    check_start(s, x0, cfg)?;
    if cfg.t_initial <= cfg.t_min {
        return Ok(x0.clone());
    }
    let inc = Incidence::new(s);
    let mut rng = rng_from_seed(cfg.seed);
    let (mut best, mut best_cost) = anneal(FlipState::new(s, &inc, x0.clone()), cfg, &mut rng)?;
    for _ in 0..cfg.restarts {
        let start = random_nonzero(s.vars(), &mut rng);
        let (x, cost) = anneal(FlipState::new(s, &inc, start), cfg, &mut rng)?;
        if cost < best_cost {
            best = x;
            best_cost = cost;
        }
    }
    Ok(best)
}

fn anneal(mut st: FlipState<'_>, cfg: &SolverConfig, rng: &mut SearchRng) -> Result<(Assignment, usize)> {
    let k = st.x.len();
    let mut best = st.x.clone();
    let mut best_cost = st.cost;
    let mut temp = cfg.t_initial;
    let mut steps = 0;
    while temp > cfg.t_min && steps < cfg.max_iters {
        // with forbid_zero and a single set bit, that bit may not be cleared
        let v = if cfg.forbid_zero && st.ones == 1 {
            if k == 1 {
                return Err(Error::EmptyNeighbourhood);
            }
            let blocked = st.x.iter_ones().next().expect("one set bit");
            let r = rng.random_range(0..k - 1);
            if r >= blocked {
                r + 1
            } else {
                r
            }
        } else {
            rng.random_range(0..k)
        };
        let d = st.delta[v];
        if d <= 0 || rng.random::<f64>() < (-(d as f64) / temp).exp() {
            st.flip(v);
            if st.cost < best_cost {
                best_cost = st.cost;
                best.clone_from(&st.x);
            }
        }
        temp *= cfg.alpha;
        steps += 1;
    }
    Ok(match cfg.sa_return {
        SaReturn::Best => (best, best_cost),
        SaReturn::Final => {
            let cost = st.cost;
            (st.x, cost)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Gf2Poly;
    use crate::toeplitz::ToeplitzOperator;
    use proptest::prelude::{any, prop, prop_assert, prop_assert_eq, proptest, Strategy};

    fn bits(s: &str) -> BitVec {
        s.parse().unwrap()
    }

    fn x0_is_one() -> AffineSystem {
        AffineSystem::from_constraints(1, &[(vec![0], true)]).unwrap()
    }

    fn figure_system() -> AffineSystem {
        let op = ToeplitzOperator::build(&"1 + x + x^2".parse::<Gf2Poly>().unwrap(), 4).unwrap();
        AffineSystem::from_toeplitz(&op)
    }

    #[test]
    fn neighbourhoods() {
        let n = neighbours(&bits("00"), false);
        assert_eq!(n, vec![bits("10"), bits("01")]);
        assert!(neighbours(&bits("1"), true).is_empty());
        assert_eq!(neighbours(&bits("10110"), false).len(), 5);
        assert_eq!(neighbours(&bits("00100"), true).len(), 4);
    }

    #[test]
    fn hill_climb_single_flip() {
        let cfg = SolverConfig::default();
        assert_eq!(hill_climb(&x0_is_one(), &bits("0"), &cfg).unwrap(), bits("1"));
    }

    #[test]
    fn hill_climb_stays_at_local_minimum() {
        let s = figure_system();
        let cfg = SolverConfig::default().with_forbid_zero(true);
        // Q = 1 + x: K = 1 + x^3 already has minimum weight
        let x0 = bits("11000");
        let x = hill_climb(&s, &x0, &cfg).unwrap();
        assert_eq!(s.violation_count(&x).unwrap(), 2);
    }

    #[test]
    fn hill_climb_reaches_local_minimum() {
        let s = figure_system();
        for variant in [HcVariant::Stochastic, HcVariant::Steepest] {
            let cfg = SolverConfig {
                hc_variant: variant,
                forbid_zero: true,
                ..SolverConfig::default()
            };
            let x = hill_climb(&s, &bits("10111"), &cfg).unwrap();
            let f = s.violation_count(&x).unwrap();
            for y in neighbours(&x, true) {
                assert!(s.violation_count(&y).unwrap() >= f);
            }
        }
    }

    #[test]
    fn errors() {
        let s = figure_system();
        let cfg = SolverConfig::default().with_forbid_zero(true);
        assert_eq!(hill_climb(&s, &BitVec::zeros(5), &cfg), Err(Error::ZeroAssignment));
        assert_eq!(
            simulated_anneal(&s, &BitVec::zeros(3), &cfg),
            Err(Error::LengthMismatch { expected: 5, actual: 3 })
        );
        assert_eq!(
            simulated_anneal(&x0_is_one(), &bits("1"), &cfg),
            Err(Error::EmptyNeighbourhood)
        );
        let bad = SolverConfig {
            alpha: 1.0,
            ..SolverConfig::default()
        };
        assert!(matches!(hill_climb(&s, &bits("10000"), &bad), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn annealing_degenerate_schedule_returns_start() {
        let cfg = SolverConfig {
            t_initial: 0.5,
            t_min: 1.0,
            ..SolverConfig::default()
        };
        let s = figure_system();
        assert_eq!(simulated_anneal(&s, &bits("10110"), &cfg).unwrap(), bits("10110"));
    }

    #[test]
    fn annealing_finds_single_flip() {
        let cfg = SolverConfig::default();
        assert_eq!(simulated_anneal(&x0_is_one(), &bits("0"), &cfg).unwrap(), bits("1"));
    }

    #[test]
    fn annealing_greedy_limit_rejects_worsening() {
        // one step at a temperature where exp(-1/T) underflows to zero
        let cfg = SolverConfig {
            t_initial: 1e-9,
            t_min: 1e-10,
            alpha: 0.05,
            sa_return: SaReturn::Final,
            ..SolverConfig::default()
        };
        let s = figure_system();
        // from the all-zero optimum every flip strictly worsens
        for seed in 0..50 {
            let x = simulated_anneal(&s, &BitVec::zeros(5), &cfg.clone().with_seed(seed)).unwrap();
            assert!(x.is_zero());
        }
    }

    #[test]
    fn config_kv_round_trip() {
        let cfg = SolverConfig {
            seed: 42,
            restarts: 3,
            alpha: 0.9,
            forbid_zero: true,
            sa_return: SaReturn::Final,
            hc_variant: HcVariant::Steepest,
            ..SolverConfig::default()
        };
        let mut parsed = SolverConfig::default();
        parsed.apply_kv(&cfg.to_string()).unwrap();
        assert_eq!(parsed, cfg);
        assert!(parsed.apply_kv("colour=blue").is_err());
        assert!(parsed.apply_kv("alpha").is_err());
        assert!(parsed.apply_kv("seed=-1").is_err());
    }

    fn arb_case() -> impl Strategy<Value = (AffineSystem, BitVec, u64)> {
        (1usize..=16, 1usize..=24).prop_flat_map(|(k, m)| {
            (
                prop::collection::vec((prop::collection::vec(any::<bool>(), k), any::<bool>()), m),
                prop::collection::vec(any::<bool>(), k),
                any::<u64>(),
            )
                .prop_map(move |(rows, x0, seed)| {
                    let rhs = BitVec::from_bools(&rows.iter().map(|r| r.1).collect::<Vec<_>>());
                    let rows = rows.iter().map(|r| BitVec::from_bools(&r.0)).collect();
                    (AffineSystem::new(k, rows, rhs).unwrap(), BitVec::from_bools(&x0), seed)
                })
        })
    }

    proptest! {
        #[test]
        fn solvers_never_worsen((s, x0, seed) in arb_case(), restarts in 0usize..3) {
            let forbid = !x0.is_zero();
            let cfg = SolverConfig { seed, restarts, forbid_zero: forbid, ..SolverConfig::default() };
            let f0 = s.violation_count(&x0).unwrap();
            let hc = hill_climb(&s, &x0, &cfg).unwrap();
            prop_assert!(s.violation_count(&hc).unwrap() <= f0);
            prop_assert!(!(forbid && hc.is_zero()));
            match simulated_anneal(&s, &x0, &cfg) {
                Ok(sa) => {
                    prop_assert!(s.violation_count(&sa).unwrap() <= f0);
                    prop_assert!(!(forbid && sa.is_zero()));
                }
                Err(e) => prop_assert_eq!(e, Error::EmptyNeighbourhood),
            }
        }

        #[test]
        fn seeded_runs_repeat((s, x0, seed) in arb_case()) {
            let cfg = SolverConfig { seed, restarts: 1, ..SolverConfig::default() };
            prop_assert_eq!(hill_climb(&s, &x0, &cfg).unwrap(), hill_climb(&s, &x0, &cfg).unwrap());
            prop_assert_eq!(
                simulated_anneal(&s, &x0, &cfg).unwrap(),
                simulated_anneal(&s, &x0, &cfg).unwrap()
            );
        }

        #[test]
        fn incremental_deltas_match_recount((s, x0, seed) in arb_case()) {
            let inc = Incidence::new(&s);
            let mut st = FlipState::new(&s, &inc, x0);
            let mut rng = rng_from_seed(seed);
            for _ in 0..20 {
                let v = rng.random_range(0..s.vars());
                st.flip(v);
                prop_assert_eq!(st.cost, s.violation_count(&st.x).unwrap());
                for u in 0..s.vars() {
                    let mut y = st.x.clone();
                    y.flip(u);
                    let expect = s.violation_count(&y).unwrap() as i64 - st.cost as i64;
                    prop_assert_eq!(st.delta[u], expect);
                }
            }
        }
    }
}
