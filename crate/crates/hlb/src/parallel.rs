//! Multi-start optimization across threads.

use hlb_core::optimizer::{run_start, DEFAULT_MAX_SWEEPS, DEFAULT_STARTS, DEFAULT_SWEEP_TOL};
use hlb_core::{FormExpr, OptimizeConfig, OptimizeResult};
use rayon::prelude::*;

use crate::cache::{CacheKey, ResultCache};
use crate::rational::Rational;

/// Default master seed, "HL" in ASCII followed by 2015.
pub const DEFAULT_SEED: u64 = 0x484C_2015;

/// Optimizer settings shared by every command; `p` is supplied per run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub starts: usize,
    pub seed: u64,
    pub sweep_tol: f64,
    pub max_sweeps: usize,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            starts: DEFAULT_STARTS,
            seed: DEFAULT_SEED,
            sweep_tol: DEFAULT_SWEEP_TOL,
            max_sweeps: DEFAULT_MAX_SWEEPS,
        }
    }
}

impl RunSettings {
    pub fn config(&self, p: f64) -> OptimizeConfig {
        let mut cfg = OptimizeConfig::new(p).with_starts(self.starts).with_seed(self.seed);
        cfg.sweep_tol = self.sweep_tol;
        cfg.max_sweeps = self.max_sweeps;
        cfg
    }
}

/// Whether a run was computed or read back.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Computed,
    Cached,
}

/// [`par_sup_norm`] behind an optional cache. Only computed results are written.
pub fn optimize_cached(
    family: &str,
    expr: &FormExpr,
    p: Rational,
    settings: &RunSettings,
    cache: Option<&ResultCache>,
) -> anyhow::Result<(OptimizeResult, Source)> {
    let key = CacheKey::new(family, expr.degree(), p, settings.starts, settings.seed, settings.sweep_tol);
    if let Some(hit) = cache.and_then(|c| c.get(&key)) {
        return Ok((hit, Source::Cached));
    }
    let result = par_sup_norm(expr, &settings.config(p.to_f64()))?;
    if let Some(c) = cache {
        c.put(&key, &result, p)?;
    }
    Ok((result, Source::Computed))
}

/// Same result as [`hlb_core::optimizer::sup_norm`], bit for bit, for any
/// thread count: starts are seeded by index and reduced in index order.
pub fn par_sup_norm(expr: &FormExpr, config: &OptimizeConfig) -> hlb_core::Result<OptimizeResult> {
    config.validate()?;
    let outcomes =
        (0..config.starts).into_par_iter().map(|i| run_start(expr, config, i)).collect::<hlb_core::Result<Vec<_>>>()?;
    Ok(OptimizeResult::from_starts(config, outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use hlb_core::forms::{make_littlewood, make_tilde};
    use hlb_core::optimizer::sup_norm;

    #[test]
    fn matches_sequential_for_any_thread_count() {
        for (form, p) in [(make_littlewood(4).unwrap(), 8.0), (make_tilde(4).unwrap(), 8.0)] {
            let cfg = OptimizeConfig::new(p).with_starts(16).with_seed(7);
            let seq = sup_norm(&form, &cfg).unwrap();
            for threads in [1, 3, 8] {
                let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
                let par = pool.install(|| par_sup_norm(&form, &cfg)).unwrap();
                assert_eq!(par.best_value.to_bits(), seq.best_value.to_bits());
                assert_eq!(par, seq);
            }
        }
    }

    #[test]
    fn cached_runs_are_identical() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResultCache::new(dir.path());
        let form = make_littlewood(3).unwrap();
        let settings = RunSettings { starts: 5, ..RunSettings::default() };
        let p = Rational::integer(6);
        let (a, src_a) = optimize_cached("littlewood", &form, p, &settings, Some(&cache)).unwrap();
        let (b, src_b) = optimize_cached("littlewood", &form, p, &settings, Some(&cache)).unwrap();
        assert_eq!((src_a, src_b), (Source::Computed, Source::Cached));
        assert_eq!(a, b);
        let (c, src_c) = optimize_cached("littlewood", &form, p, &settings, None).unwrap();
        assert_eq!((c, src_c), (a, Source::Computed));
    }

    #[test]
    fn rejects_bad_configs() {
        let form = make_littlewood(2).unwrap();
        assert!(par_sup_norm(&form, &OptimizeConfig::new(4.0).with_starts(0)).is_err());
        assert!(par_sup_norm(&form, &OptimizeConfig::new(0.5)).is_err());
    }
}
