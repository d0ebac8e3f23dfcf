//! Norm estimation `‖T‖ = sup |T(x^{(1)}, …, x^{(m)})|` over products of ℓ_p
//! unit balls.
//!
//! The main routine is multi-start alternating maximization: with all but one
//! argument fixed the form is a linear functional `⟨c, ·⟩` whose maximizer on
//! the ℓ_p ball is known in closed form ([`dual_argmax`]), so each slot update
//! is exact and the objective never decreases. Every iterate is feasible, so
//! the reported value is always a valid lower bound on the norm.
//!
//! Two exact oracles sit next to it: [`clarkson_sup`] for the 2×2 form `T_2`
//! on ℓ_p, and [`brute_force_linf_norm`] for small forms at `p = ∞`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::forms::FormExpr;
use crate::lp::{check_p, conjugate, lp_norm, pairwise_sum};
use crate::{Error, Result};

pub const DEFAULT_STARTS: usize = 64;
pub const DEFAULT_SWEEP_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_SWEEPS: usize = 500;
/// Fresh random restarts allowed for a start that hits a zero functional.
pub const MAX_DEGENERATE_RETRIES: usize = 3;
/// Grid size of the coarse scan in [`clarkson_sup`].
pub const CLARKSON_GRID: usize = 1024;
/// Bracket width at which the golden-section refinement stops.
pub const CLARKSON_TOL: f64 = 1e-12;
/// Coordinate budget of [`brute_force_linf_norm`].
pub const BRUTE_FORCE_MAX_COORDS: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeConfig {
    /// ℓ_p exponent of every argument space (`f64::INFINITY` allowed).
    pub p: f64,
    pub starts: usize,
    pub master_seed: u64,
    /// A sweep improving the objective by less than this (relative) ends a run.
    pub sweep_tol: f64,
    pub max_sweeps: usize,
}

impl OptimizeConfig {
    pub fn new(p: f64) -> Self {
        Self { p, starts: DEFAULT_STARTS, master_seed: 0, sweep_tol: DEFAULT_SWEEP_TOL, max_sweeps: DEFAULT_MAX_SWEEPS }
    }

    pub fn with_starts(mut self, starts: usize) -> Self {
        self.starts = starts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_p(self.p)?;
        if self.starts == 0 {
            return Err(Error::InvalidParameter("starts must be at least 1"));
        }
        if self.sweep_tol.is_nan() || self.sweep_tol <= 0.0 {
            return Err(Error::InvalidParameter("sweep_tol must be positive"));
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidParameter("max_sweeps must be at least 1"));
        }
        Ok(())
    }
}

/// Outcome of one start of [`sup_norm`].
#[derive(Debug, Clone, PartialEq)]
pub struct StartRecord {
    pub index: usize,
    pub seed: u64,
    pub value: f64,
    pub sweeps: usize,
    pub converged: bool,
    /// Restarts caused by a vanishing slot functional.
    pub restarts: usize,
    /// All retries were used up without a clean run.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    pub best_value: f64,
    /// Arguments attaining `best_value`, indexed by slot.
    pub witness: Vec<Vec<f64>>,
    pub per_start: Vec<StartRecord>,
    pub converged_fraction: f64,
    pub p: f64,
    pub master_seed: u64,
}

impl OptimizeResult {
    /// Reduces per-start outcomes; ties go to the lowest start index, so the
    /// result does not depend on the order the starts were run in.
    pub fn from_starts(config: &OptimizeConfig, mut outcomes: Vec<(StartRecord, Vec<Vec<f64>>)>) -> Self {
        outcomes.sort_by_key(|(r, _)| r.index);
        let mut best: Option<usize> = None;
        for (i, (r, _)) in outcomes.iter().enumerate() {
            let better = match best {
                Some(b) => r.value > outcomes[b].0.value,
                None => true,
            };
            if better {
                best = Some(i);
            }
        }
        let converged = outcomes.iter().filter(|(r, _)| r.converged).count();
        let converged_fraction = if outcomes.is_empty() { 0.0 } else { converged as f64 / outcomes.len() as f64 };
        let (best_value, witness) = match best {
            Some(b) => (outcomes[b].0.value, outcomes[b].1.clone()),
            None => (0.0, Vec::new()),
        };
        OptimizeResult {
            best_value,
            witness,
            per_start: outcomes.into_iter().map(|(r, _)| r).collect(),
            converged_fraction,
            p: config.p,
            master_seed: config.master_seed,
        }
    }
}

/// Maximizer of `⟨c, x⟩` over the ℓ_p unit ball, and the maximum `‖c‖_{p*}`.
///
/// Ties at `p = 1` go to the lowest index; at `p = ∞`, `sign(0) = +1`.
pub fn dual_argmax(c: &[f64], p: f64) -> Result<(Vec<f64>, f64)> {
    check_p(p)?;
    if c.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroFunctional);
    }
    let sign = |v: f64| if v < 0.0 { -1.0 } else { 1.0 };
    if p.is_infinite() {
        let abs: Vec<f64> = c.iter().map(|v| v.abs()).collect();
        return Ok((c.iter().map(|&v| sign(v)).collect(), pairwise_sum(&abs)));
    }
    if p == 1.0 {
        let (j, max) = c.iter().enumerate().fold(
            (0, 0.0_f64),
            |(bj, bm), (j, v)| {
                if v.abs() > bm {
                    (j, v.abs())
                } else {
                    (bj, bm)
                }
            },
        );
        let mut x = vec![0.0; c.len()];
        x[j] = sign(c[j]);
        return Ok((x, max));
    }
    let q = conjugate(p);
    let norm = lp_norm(c, q);
    let x = c.iter().map(|&v| sign(v) * (v.abs() / norm).powf(q - 1.0)).collect();
    Ok((x, norm))
}

/// One alternating-maximization run.
#[derive(Debug, Clone, PartialEq)]
pub struct Ascent {
    pub value: f64,
    pub witness: Vec<Vec<f64>>,
    pub sweeps: usize,
    pub converged: bool,
    /// `|T(start)|` followed by the objective after every slot update.
    pub trace: Vec<f64>,
}

fn check_top_level(expr: &FormExpr) -> Result<()> {
    match expr.signature().iter().enumerate().find(|(k, (s, _))| k != s) {
        Some((_, &(s, _))) => Err(Error::InvalidSlot(s)),
        None => Ok(()),
    }
}

/// Cyclic slot updates `x^{(k)} ← argmax_{‖x‖_p ≤ 1} T(…, x, …)` from `start`
/// until a full sweep gains less than `sweep_tol` (relative) or `max_sweeps`
/// sweeps have run. Fails with [`Error::ZeroFunctional`] when a slot
/// functional vanishes.
pub fn alternating_ascent(expr: &FormExpr, config: &OptimizeConfig, start: Vec<Vec<f64>>) -> Result<Ascent> {
    check_top_level(expr)?;
    let mut args = start;
    let mut trace = vec![expr.evaluate(&args)?.abs()];
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < config.max_sweeps {
        let before = *trace.last().expect("trace is nonempty");
        for k in 0..expr.degree() {
            let c = expr.slot_coefficients(&args, k)?;
            let (x, value) = dual_argmax(&c, config.p)?;
            args[k] = x;
            trace.push(value);
        }
        sweeps += 1;
        let after = *trace.last().expect("trace is nonempty");
        if after - before <= config.sweep_tol * after.abs() {
            converged = true;
            break;
        }
    }
    let value = expr.evaluate(&args)?.abs();
    Ok(Ascent { value, witness: args, sweeps, converged, trace })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// RNG seed of start `index`; depends only on `(master_seed, index)`.
pub fn start_seed(master_seed: u64, index: usize) -> u64 {
    splitmix64(splitmix64(master_seed) ^ index as u64)
}

/// Cubed standard normal samples, normalized to ℓ_p norm 1.
fn random_start(expr: &FormExpr, p: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    expr.dims()
        .into_iter()
        .map(|n| loop {
            let v: Vec<f64> = (0..n)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(rng);
                    z * z * z
                })
                .collect();
            let norm = lp_norm(&v, p);
            if norm > 0.0 && norm.is_finite() {
                break v.into_iter().map(|x| x / norm).collect();
            }
        })
        .collect()
}

/// Runs start `index` of a [`sup_norm`] computation.
pub fn run_start(expr: &FormExpr, config: &OptimizeConfig, index: usize) -> Result<(StartRecord, Vec<Vec<f64>>)> {
    let seed = start_seed(config.master_seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut restarts = 0;
    loop {
        let start = random_start(expr, config.p, &mut rng);
        match alternating_ascent(expr, config, start.clone()) {
            Ok(run) => {
                let record = StartRecord {
                    index,
                    seed,
                    value: run.value,
                    sweeps: run.sweeps,
                    converged: run.converged,
                    restarts,
                    degenerate: false,
                };
                return Ok((record, run.witness));
            }
            Err(Error::ZeroFunctional) if restarts < MAX_DEGENERATE_RETRIES => restarts += 1,
            Err(Error::ZeroFunctional) => {
                let value = expr.evaluate(&start)?.abs();
                let record =
                    StartRecord { index, seed, value, sweeps: 0, converged: false, restarts, degenerate: true };
                return Ok((record, start));
            }
            Err(e) => return Err(e),
        }
    }
}

/// Multi-start estimate of `‖T‖` on `ℓ_p^{n_1} × ⋯ × ℓ_p^{n_m}`.
///
/// Runs `config.starts` independent [`alternating_ascent`] runs and keeps the
/// best. The result is a deterministic function of `config`.
pub fn sup_norm(expr: &FormExpr, config: &OptimizeConfig) -> Result<OptimizeResult> {
    config.validate()?;
    check_top_level(expr)?;
    let outcomes = (0..config.starts).map(|i| run_start(expr, config, i)).collect::<Result<Vec<_>>>()?;
    Ok(OptimizeResult::from_starts(config, outcomes))
}

fn clarkson_ratio(x: f64, p: f64) -> f64 {
    let q = conjugate(p);
    let num = ((1.0 + x).powf(q) + (1.0 - x).powf(q)).powf(1.0 / q);
    num / (1.0 + x.powf(p)).powf(1.0 / p)
}

/// `sup_{x∈[0,1]} ((1+x)^{p*} + (1−x)^{p*})^{1/p*} / (1+x^p)^{1/p}`, the norm
/// of `T_2` on `ℓ_p^2 × ℓ_p^2`. Requires `p ≥ 2`; equals 2 at `p = ∞`.
pub fn clarkson_sup(p: f64) -> Result<f64> {
    if p.is_nan() || p < 2.0 {
        return Err(Error::InvalidExponent { value: p, reason: "clarkson_sup requires p ≥ 2" });
    }
    if p.is_infinite() {
        return Ok(2.0);
    }
    let f = |x: f64| clarkson_ratio(x, p);
    let last = CLARKSON_GRID - 1;
    let grid = |i: usize| i as f64 / last as f64;
    let (best_i, best) =
        (0..CLARKSON_GRID).map(|i| (i, f(grid(i)))).fold(
            (0, f64::NEG_INFINITY),
            |acc, cur| {
                if cur.1 > acc.1 {
                    cur
                } else {
                    acc
                }
            },
        );
    let lo = grid(best_i.saturating_sub(1));
    let hi = grid((best_i + 1).min(last));
    Ok(best.max(golden_section_max(f, lo, hi, CLARKSON_TOL)))
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut best = fc.max(fd).max(f(a)).max(f(b));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        best = best.max(fc).max(fd);
        if c >= d {
            break;
        }
    }
    best
}

/// Exact `‖T‖` at `p = ∞` for forms with at most [`BRUTE_FORCE_MAX_COORDS`]
/// coordinates in total.
///
/// The maximum of a multilinear form over a product of cubes is attained at
/// sign vectors. Sign patterns are enumerated for every slot but the widest
/// one, whose optimal contribution is `‖c‖_1` of its slot functional; the
/// first enumerated coordinate is pinned to `+1` since `T(−x) = −T(x)`.
pub fn brute_force_linf_norm(expr: &FormExpr) -> Result<f64> {
    check_top_level(expr)?;
    let dims = expr.dims();
    let total: usize = dims.iter().sum();
    if total > BRUTE_FORCE_MAX_COORDS {
        return Err(Error::TooLarge { count: total as u128, limit: BRUTE_FORCE_MAX_COORDS as u128 });
    }
    let widest = (0..dims.len()).max_by_key(|&k| (dims[k], core::cmp::Reverse(k))).expect("degree ≥ 1");
    let free: usize = total - dims[widest];
    let patterns: u64 = if free == 0 { 1 } else { 1 << (free - 1) };

    let mut args: Vec<Vec<f64>> = dims.iter().map(|&n| vec![1.0; n]).collect();
    let mut best = 0.0_f64;
    for pattern in 0..patterns {
        // bit b of `pattern` drives free coordinate b + 1; coordinate 0 stays +1
        let mut bit = 0usize;
        for (k, arg) in args.iter_mut().enumerate() {
            if k == widest {
                continue;
            }
            for x in arg.iter_mut() {
                *x = if bit == 0 || (pattern >> (bit - 1)) & 1 == 0 { 1.0 } else { -1.0 };
                bit += 1;
            }
        }
        let c = expr.slot_coefficients(&args, widest)?;
        let abs: Vec<f64> = c.iter().map(|v| v.abs()).collect();
        best = best.max(pairwise_sum(&abs));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{make_littlewood, CoeffTensor};

    #[test]
    fn dual_argmax_examples() {
        let (x, v) = dual_argmax(&[1.0, 1.0], 2.0).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((x[0] - h).abs() < 1e-15 && (x[1] - h).abs() < 1e-15);
        assert!((v - 2f64.sqrt()).abs() < 1e-15);

        let (x, v) = dual_argmax(&[1.0, -1.0], f64::INFINITY).unwrap();
        assert_eq!((x, v), (vec![1.0, -1.0], 2.0));

        let (x, v) = dual_argmax(&[1.0, 1.0], 4.0).unwrap();
        assert!((v - 2f64.powf(0.75)).abs() < 1e-14);
        assert!((lp_norm(&x, 4.0) - 1.0).abs() < 1e-14);
        assert!((x[0] + x[1] - 2f64.powf(0.75)).abs() < 1e-14);

        // ties and zeros
        let (x, v) = dual_argmax(&[2.0, -2.0, 1.0], 1.0).unwrap();
        assert_eq!((x, v), (vec![1.0, 0.0, 0.0], 2.0));
        let (x, _) = dual_argmax(&[0.0, -3.0], f64::INFINITY).unwrap();
        assert_eq!(x, vec![1.0, -1.0]);

        assert_eq!(dual_argmax(&[0.0, 0.0], 2.0).unwrap_err(), Error::ZeroFunctional);
        assert!(dual_argmax(&[1.0], 0.5).is_err());
    }

    #[test]
    fn ascent_on_t2() {
        let t2 = make_littlewood(2).unwrap();
        let cfg = OptimizeConfig::new(f64::INFINITY);
        let run = alternating_ascent(&t2, &cfg, vec![vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(run.value, 2.0);
        assert!(run.sweeps <= 2);

        let cfg = OptimizeConfig::new(2.0);
        let run = alternating_ascent(&t2, &cfg, vec![vec![0.6, 0.8], vec![1.0, 0.0]]).unwrap();
        assert!((run.value - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_functional_is_reported() {
        // T(x, y) = x_1 y_1, started with y = e_2
        let leaf = FormExpr::leaf(vec![0, 1], CoeffTensor::new(vec![2, 2], vec![(vec![1, 1], 1.0)]).unwrap()).unwrap();
        let cfg = OptimizeConfig::new(2.0);
        let err = alternating_ascent(&leaf, &cfg, vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap_err();
        assert_eq!(err, Error::ZeroFunctional);
    }

    #[test]
    fn clarkson_examples() {
        assert!((clarkson_sup(2.0).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!((clarkson_sup(4.0).unwrap() - 3f64.sqrt()).abs() < 1e-12);
        assert!((clarkson_sup(8.0).unwrap() - 1.892).abs() < 5e-4);
        assert_eq!(clarkson_sup(f64::INFINITY).unwrap(), 2.0);
        assert!(clarkson_sup(1.5).is_err());
    }

    #[test]
    fn golden_section_finds_interior_maximum() {
        let v = golden_section_max(|x| -(x - 0.3) * (x - 0.3) + 1.0, 0.0, 1.0, 1e-12);
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        assert!(OptimizeConfig::new(2.0).with_starts(0).validate().is_err());
        assert!(OptimizeConfig::new(0.5).validate().is_err());
        let mut c = OptimizeConfig::new(2.0);
        c.sweep_tol = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn seeds_are_distinct_per_start() {
        let seeds: Vec<u64> = (0..100).map(|i| start_seed(7, i)).collect();
        for (i, a) in seeds.iter().enumerate() {
            assert!(seeds[i + 1..].iter().all(|b| a != b));
        }
        assert_ne!(start_seed(1, 0), start_seed(2, 0));
    }
}
