//! Reductions between low-weight polynomial multiples and affine MAX-SAT.
//!
//! Forward direction: the instance `(P, n)` maps to the homogeneous system
//! `M(P, t) x = 0` with `t = n - deg P - 1`. An assignment `x` lifts back to
//! the multiple `K = P * Q_x`, and the number of constraints `x` violates is
//! exactly the weight of `K`, so optima correspond one to one.
//!
//! Reverse direction: a 0/1 matrix `A` is projected onto a Toeplitz operator,
//! which names a polynomial and hence an instance. A multiple found for that
//! instance seeds a local search on `A x = b`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::affine::AffineSystem;
use crate::bits::{Assignment, BitVec};
use crate::error::{Error, Result};
use crate::poly::Gf2Poly;
use crate::search::{hill_climb, rng_from_seed, simulated_anneal, SolverConfig};
use crate::toeplitz::{project_toeplitz, BinaryMatrix, Projection, ToeplitzOperator};

/// A low-weight multiple instance: find a nonzero multiple of `P` with
/// degree below `n` and minimum weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinPmInstance {
    poly: Gf2Poly,
    degree: usize,
    n: usize,
}

impl MinPmInstance {
    pub fn new(poly: Gf2Poly, n: usize) -> Result<Self> {
        let degree = poly.degree().ok_or(Error::ZeroPolynomial)?;
        if n <= degree {
            return Err(Error::DegreeBound { n, degree });
        }
        Ok(MinPmInstance { poly, degree, n })
    }

    pub fn poly(&self) -> &Gf2Poly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Largest admissible degree of a multiplier `Q`.
    pub fn t(&self) -> usize {
        self.n - self.degree - 1
    }

    pub fn operator(&self) -> ToeplitzOperator {
        ToeplitzOperator::build(&self.poly, self.t()).expect("instance polynomial is nonzero")
    }

    /// Bits in the binary encoding of the instance: `d + 1` coefficients plus
    /// the bit length of `n`.
    pub fn size(&self) -> usize {
        (self.degree + 1) + (usize::BITS - self.n.leading_zeros()) as usize
    }
}

impl fmt::Display for MinPmInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "poly {}", self.poly)?;
        writeln!(f, "n {}", self.n)
    }
}

impl FromStr for MinPmInstance {
    type Err = Error;

    /// Reads the `poly ..` / `n ..` lines; `#` comments are skipped.
    fn from_str(text: &str) -> Result<Self> {
        let mut poly = None;
        let mut n = None;
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once(' ').unwrap_or((line, ""));
            match key {
                "poly" => poly = Some(value.parse::<Gf2Poly>()?),
                "n" => {
                    n = Some(value.trim().parse::<usize>().map_err(|_| {
                        Error::parse(idx + 1, format!("line {}: invalid n '{value}'", idx + 1))
                    })?)
                }
                other => {
                    return Err(Error::parse(idx + 1, format!("line {}: unknown key '{other}'", idx + 1)))
                }
            }
        }
        let poly = poly.ok_or_else(|| Error::parse(0, "missing 'poly' line"))?;
        let n = n.ok_or_else(|| Error::parse(0, "missing 'n' line"))?;
        MinPmInstance::new(poly, n)
    }
}

/// A variable fixed before solving.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pin {
    pub var: usize,
    pub value: bool,
}

/// Output of the forward reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionCertificate {
    system: AffineSystem,
    pin: Option<Pin>,
    degree: usize,
    t: usize,
    n: usize,
}

impl ReductionCertificate {
    /// The unpinned system `M(P, t) x = 0`.
    pub fn system(&self) -> &AffineSystem {
        &self.system
    }

    pub fn pin(&self) -> Option<Pin> {
        self.pin
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The system actually handed to a solver: the pin substituted away.
    /// `None` when the pin fixes the only variable.
    pub fn working_system(&self) -> Option<AffineSystem> {
        match self.pin {
            None => Some(self.system.clone()),
            Some(_) if self.system.vars() == 1 => None,
            Some(Pin { var, value }) => Some(self.system.pin(var, value).expect("pin in range")),
        }
    }

    /// Reinserts the pinned bit into an assignment of the working system.
    pub fn restore(&self, x: &Assignment) -> Assignment {
        match self.pin {
            None => x.clone(),
            Some(Pin { var, value }) => BitVec::from_fn(x.len() + 1, |j| match j.cmp(&var) {
                std::cmp::Ordering::Less => x.get(j),
                std::cmp::Ordering::Equal => value,
                std::cmp::Ordering::Greater => x.get(j - 1),
            }),
        }
    }
}

impl fmt::Display for ReductionCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "degree {}", self.degree)?;
        writeln!(f, "t {}", self.t)?;
        writeln!(f, "n {}", self.n)?;
        match self.pin {
            Some(Pin { var, value }) => writeln!(f, "pin x{var}={}", u8::from(value))?,
            None => writeln!(f, "pin none")?,
        }
        writeln!(f, "system")?;
        write!(f, "{}", self.system)
    }
}

impl FromStr for ReductionCertificate {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let (head, body) = text
            .split_once("system\n")
            .ok_or_else(|| Error::parse(0, "missing 'system' section"))?;
        let mut fields = std::collections::HashMap::new();
        for line in head.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (k, v) = line
                .split_once(' ')
                .ok_or_else(|| Error::parse(0, format!("malformed line '{line}'")))?;
            fields.insert(k, v.trim());
        }
        let num = |key: &str| -> Result<usize> {
            fields
                .get(key)
                .ok_or_else(|| Error::parse(0, format!("missing '{key}'")))?
                .parse()
                .map_err(|_| Error::parse(0, format!("invalid '{key}'")))
        };
        let (degree, t, n) = (num("degree")?, num("t")?, num("n")?);
        let pin = match fields.get("pin").copied() {
            None | Some("none") => None,
            Some(spec) => {
                let (var, value) = spec
                    .strip_prefix('x')
                    .and_then(|s| s.split_once('='))
                    .ok_or_else(|| Error::parse(0, format!("invalid pin '{spec}'")))?;
                let var = var.parse().map_err(|_| Error::parse(0, format!("invalid pin '{spec}'")))?;
                let value = match value {
                    "0" => false,
                    "1" => true,
                    _ => return Err(Error::parse(0, format!("invalid pin '{spec}'"))),
                };
                Some(Pin { var, value })
            }
        };
        let system: AffineSystem = body.parse()?;
        if system.constraints() != degree + t + 1 || system.vars() != t + 1 || n != degree + t + 1 {
            return Err(Error::InvalidSystem("certificate dimensions disagree".into()));
        }
        Ok(ReductionCertificate {
            system,
            pin,
            degree,
            t,
            n,
        })
    }
}

/// Forward reduction with `x_0` (the constant term of `Q`) pinned to 1, which
/// excludes the zero multiple without changing the optimum.
pub fn forward_reduce(inst: &MinPmInstance) -> ReductionCertificate {
    forward_reduce_with(inst, true)
}

pub fn forward_reduce_with(inst: &MinPmInstance, pin_constant: bool) -> ReductionCertificate {
    ReductionCertificate {
        system: AffineSystem::from_toeplitz(&inst.operator()),
        pin: pin_constant.then_some(Pin { var: 0, value: true }),
        degree: inst.degree,
        t: inst.t(),
        n: inst.n,
    }
}

/// The multiple `P * Q` where `Q` has coefficient vector `x` (length `t + 1`).
pub fn lift_solution(inst: &MinPmInstance, x: &Assignment) -> Result<Gf2Poly> {
    if x.len() != inst.t() + 1 {
        return Err(Error::LengthMismatch {
            expected: inst.t() + 1,
            actual: x.len(),
        });
    }
    if x.is_zero() {
        return Err(Error::ZeroMultiple);
    }
    Ok(inst.poly.mul(&Gf2Poly::from_bits(x)))
}

/// Solver used on an affine system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Exhaustive,
    HillClimb,
    SimulatedAnneal,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Exhaustive => "exhaustive",
            Engine::HillClimb => "hc",
            Engine::SimulatedAnneal => "sa",
        }
    }

    /// Runs the engine from `x0`; the exhaustive engine ignores `x0`.
    pub fn run(self, s: &AffineSystem, x0: &Assignment, cfg: &SolverConfig) -> Result<Assignment> {
        match self {
            Engine::Exhaustive => Ok(s.exhaustive_solve(cfg.forbid_zero)?.0),
            Engine::HillClimb => hill_climb(s, x0, cfg),
            Engine::SimulatedAnneal => simulated_anneal(s, x0, cfg),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(Engine::Exhaustive),
            "hc" | "hill-climb" => Ok(Engine::HillClimb),
            "sa" | "simulated-anneal" => Ok(Engine::SimulatedAnneal),
            other => Err(Error::parse(0, format!("unknown engine '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinPmSolution {
    pub multiple: Gf2Poly,
    pub multiplier: Gf2Poly,
    pub weight: usize,
    /// True when `weight` is the proven optimum.
    pub exact: bool,
}

/// Finds a low-weight multiple through the pinned forward reduction. Local
/// search engines start from `Q = 1`, i.e. from `K = P` itself.
pub fn solve_min_pm(inst: &MinPmInstance, engine: Engine, cfg: &SolverConfig) -> Result<MinPmSolution> {
    let cert = forward_reduce(inst);
    let full = match cert.working_system() {
        None => BitVec::ones(1),
        Some(s) => {
            let cfg = SolverConfig {
                forbid_zero: false,
                ..cfg.clone()
            };
            let x = engine.run(&s, &BitVec::zeros(s.vars()), &cfg)?;
            cert.restore(&x)
        }
    };
    let multiple = lift_solution(inst, &full)?;
    Ok(MinPmSolution {
        weight: multiple.weight(),
        multiple,
        multiplier: Gf2Poly::from_bits(&full),
        exact: engine == Engine::Exhaustive,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Evaluation {
    pub weight: usize,
    pub exact: bool,
}

/// Optimum weight (exhaustive engine) or an upper bound on it.
pub fn evaluate_min_pm(inst: &MinPmInstance, engine: Engine, cfg: &SolverConfig) -> Result<Evaluation> {
    let sol = solve_min_pm(inst, engine, cfg)?;
    Ok(Evaluation {
        weight: sol.weight,
        exact: sol.exact,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decision {
    pub holds: bool,
    /// A positive answer always carries a witness; a negative one is only
    /// proven by the exhaustive engine.
    pub exact: bool,
}

/// Is there a nonzero multiple of degree `< n` with weight at most `w`?
pub fn decide_min_pm(inst: &MinPmInstance, w: usize, engine: Engine, cfg: &SolverConfig) -> Result<Decision> {
    let eval = evaluate_min_pm(inst, engine, cfg)?;
    let holds = eval.weight <= w;
    Ok(Decision {
        holds,
        exact: eval.exact || holds,
    })
}

/// Instance named by the Toeplitz form of `a`: `deg P = m`, `t = k`, so
/// `n = m + k + 1`.
pub fn reverse_reduce(a: &BinaryMatrix, projection: Projection) -> Result<MinPmInstance> {
    let (p, t) = project_toeplitz(a, projection)?;
    let n = p.degree().expect("projection forces the leading term") + t + 1;
    MinPmInstance::new(p, n)
}

/// How the multiplier `Q` (with `k + 1` coefficients) seeds a `k`-variable
/// assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LiftInit {
    /// Coefficients `b_0 .. b_{k-1}`.
    #[default]
    Truncate,
    /// Coefficients `b_1 .. b_k`.
    DropFirst,
}

/// Right-hand side of the system defined by a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rhs {
    #[default]
    Homogeneous,
    /// Uniform random bits from the given seed.
    Random(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReverseLiftOptions {
    pub init: LiftInit,
    pub rhs: Rhs,
}

/// The affine system `A x = b` for the chosen right-hand side.
pub fn reverse_system(a: &BinaryMatrix, rhs: Rhs) -> Result<AffineSystem> {
    let b = match rhs {
        Rhs::Homogeneous => BitVec::zeros(a.rows()),
        Rhs::Random(seed) => {
            let mut rng = rng_from_seed(seed);
            BitVec::from_fn(a.rows(), |_| rng.random_bool(0.5))
        }
    };
    AffineSystem::from_matrix(a, b)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReverseLift {
    pub initial: Assignment,
    pub assignment: Assignment,
    /// Violations of the starting assignment.
    pub initial_norm: usize,
    /// Violations of the refined assignment.
    pub norm: usize,
    /// Weight of the multiple the lift started from.
    pub weight_pq: usize,
}

impl ReverseLift {
    /// `norm / weight_pq`.
    pub fn ratio(&self) -> f64 {
        self.norm as f64 / self.weight_pq as f64
    }
}

/// Seeds an assignment for `A x = b` from the multiple `K` of `P` and refines
/// it with `engine`.
pub fn reverse_lift(
    a: &BinaryMatrix,
    k: &Gf2Poly,
    p: &Gf2Poly,
    engine: Engine,
    cfg: &SolverConfig,
    opts: ReverseLiftOptions,
) -> Result<ReverseLift> {
    if k.is_zero() {
        return Err(Error::ZeroMultiple);
    }
    let (q, r) = k.div_rem(p)?;
    if !r.is_zero() {
        return Err(Error::NotDivisible {
            divisor: p.to_string(),
            dividend: k.to_string(),
        });
    }
    let vars = a.cols();
    let initial = match opts.init {
        LiftInit::Truncate => q.to_bits(vars),
        LiftInit::DropFirst => BitVec::from_fn(vars, |j| q.coeff(j + 1)),
    };
    let system = reverse_system(a, opts.rhs)?;
    let initial_norm = system.violation_count(&initial)?;
    let assignment = engine.run(&system, &initial, cfg)?;
    let norm = system.violation_count(&assignment)?;
    Ok(ReverseLift {
        initial,
        assignment,
        initial_norm,
        norm,
        weight_pq: k.weight(),
    })
}
