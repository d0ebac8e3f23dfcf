//! Lower bounds for Hardy–Littlewood constants `C_{ℝ,m,p}`, generalized
//! Bohnenblust–Hille constants `C^ℝ_{m,∞,q}` and polynomial constants
//! `D_{ℝ,m,p}`.
//!
//! Ratio methods report `numerator / norm`, where the numerator is a
//! coefficient norm and the norm is `‖T‖` (or an estimate of it).

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;

use crate::forms::{FormExpr, DEFAULT_EXPAND_LIMIT};
use crate::norms::{check_alpha, coeff_lq, hl_exponent, mixed_norm, validate_exponents, ExponentVector};
use crate::optimizer::{brute_force_linf_norm, clarkson_sup, OptimizeResult};
use crate::{Error, Result};

/// Known upper bound `C^ℝ_{3,∞,q} ≤ 2^{3/4}` for the three exponent vectors
/// handled by [`verify_three_linear_optimal`]. Taken as given, not derived here.
pub const GBH3_UPPER: f64 = 1.681_792_830_507_429; // 2^{3/4}

/// Agreement required between lower and upper constants in
/// [`verify_three_linear_optimal`].
pub const OPTIMAL3_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Clarkson,
    Dimant,
    Numeric,
    GbhJfapel,
    GbhThispel,
    Poly,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Clarkson => "clarkson",
            Method::Dimant => "dimant",
            Method::Numeric => "numeric",
            Method::GbhJfapel => "gbh-jfapel",
            Method::GbhThispel => "gbh-thispel",
            Method::Poly => "poly",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [Self::Clarkson, Self::Dimant, Self::Numeric, Self::GbhJfapel, Self::GbhThispel, Self::Poly]
            .into_iter()
            .find(|m| m.name() == name)
    }
}

/// Summability exponent attached to a bound.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundExponent {
    Scalar(f64),
    Vector(ExponentVector),
}

/// Where a numeric bound's norm came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub master_seed: u64,
    pub starts: usize,
    pub converged_fraction: f64,
}

/// A rigorous band for numeric bounds: using a proven upper bound on `‖T‖`
/// in place of the estimate gives a certified lower bound on the constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Certified {
    pub norm_upper: f64,
    pub bound_lower: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundRecord {
    pub m: usize,
    pub p: f64,
    pub method: Method,
    pub exponent: BoundExponent,
    pub numerator: f64,
    /// `‖T‖` or its estimate.
    pub norm: f64,
    pub bound: f64,
    pub provenance: Option<Provenance>,
    pub certified: Option<Certified>,
}

impl BoundRecord {
    fn ratio(m: usize, p: f64, method: Method, exponent: BoundExponent, numerator: f64, norm: f64) -> Self {
        BoundRecord {
            m,
            p,
            method,
            exponent,
            numerator,
            norm,
            bound: numerator / norm,
            provenance: None,
            certified: None,
        }
    }

    /// Attaches the certified band for a proven `‖T‖ ≤ norm_upper`.
    pub fn certify(mut self, norm_upper: f64) -> Self {
        self.certified = Some(Certified { norm_upper, bound_lower: self.numerator / norm_upper });
        self
    }
}

/// `(2mp + 2m − p − 2m²)/(mp)`, written in `1/p` so that `p = ∞` works.
fn clarkson_exponent(m: usize, p: f64) -> f64 {
    let mf = m as f64;
    (2.0 * mf - 1.0) / mf + (2.0 - 2.0 * mf) / p
}

/// `C_{ℝ,m,p} ≥ 2^{(2mp+2m−p−2m²)/(mp)} / clarkson_sup(p)` for `p ≥ 2m`.
pub fn bound_clarkson(m: usize, p: f64) -> Result<BoundRecord> {
    if m < 2 {
        return Err(Error::InvalidDegree { degree: m, reason: "requires m ≥ 2" });
    }
    if p.is_nan() || p < 2.0 * m as f64 {
        return Err(Error::InvalidExponent { value: p, reason: "clarkson bound requires p ≥ 2m" });
    }
    let numerator = 2f64.powf(clarkson_exponent(m, p));
    let rho = hl_exponent(m, p)?;
    Ok(BoundRecord::ratio(m, p, Method::Clarkson, BoundExponent::Scalar(rho), numerator, clarkson_sup(p)?))
}

/// The earlier closed form `2^{(mp+2m−2m²−p)/(mp)}` for `p > 2m`, kept for
/// comparison with [`bound_clarkson`].
pub fn bound_old(m: usize, p: f64) -> f64 {
    let mf = m as f64;
    2f64.powf((mf * p + 2.0 * mf - 2.0 * mf * mf - p) / (mf * p))
}

/// `C_{ℝ,m,p} ≥ 2^{(mp+2m−2m²)/p} / clarkson_sup(p)` for `m < p < 2m`.
pub fn bound_dimant(m: usize, p: f64) -> Result<BoundRecord> {
    if m < 2 {
        return Err(Error::InvalidDegree { degree: m, reason: "requires m ≥ 2" });
    }
    let mf = m as f64;
    if !(p > mf && p < 2.0 * mf) {
        return Err(Error::InvalidExponent { value: p, reason: "requires m < p < 2m" });
    }
    let numerator = 2f64.powf((mf * p + 2.0 * mf - 2.0 * mf * mf) / p);
    let rho = hl_exponent(m, p)?;
    Ok(BoundRecord::ratio(m, p, Method::Dimant, BoundExponent::Scalar(rho), numerator, clarkson_sup(p)?))
}

/// Proven `‖T_{m,p}‖ ≤ 2^{m−2} ‖T_{2,p}‖` for the Littlewood family, `p ≥ 2`.
pub fn littlewood_norm_upper(m: usize, p: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::InvalidDegree { degree: m, reason: "requires m ≥ 2" });
    }
    Ok(2f64.powi(m as i32 - 2) * clarkson_sup(p)?)
}

/// `‖(T(e_j))_j‖_ρ` with `ρ = hl_exponent(m, p)`. Forms with ±1 coefficients
/// and a known count `N` use `N^{1/ρ}`; others are expanded.
pub fn hl_numerator(expr: &FormExpr, m: usize, p: f64) -> Result<f64> {
    let rho = hl_exponent(m, p)?;
    if expr.has_unit_coefficients() {
        let n = expr.analytic_count().expect("unit forms have a count") as f64;
        return Ok(n.powf(1.0 / rho));
    }
    coeff_lq(&expr.expand_coeffs(DEFAULT_EXPAND_LIMIT)?, rho)
}

/// `C_{ℝ,m,p} ≳ ‖coefficients‖_ρ / norm.best_value`.
///
/// `best_value` is a lower estimate of `‖T‖`, so this ratio over-estimates
/// the bound that the exact norm would give; see [`BoundRecord::certify`]
/// for a rigorous band.
pub fn bound_numeric(expr: &FormExpr, m: usize, p: f64, norm: &OptimizeResult) -> Result<BoundRecord> {
    if expr.degree() != m {
        return Err(Error::ArityMismatch { expected: m, found: expr.degree() });
    }
    if norm.best_value.is_nan() || norm.best_value <= 0.0 {
        return Err(Error::InvalidParameter("norm estimate must be positive"));
    }
    let numerator = hl_numerator(expr, m, p)?;
    let rho = hl_exponent(m, p)?;
    let mut record = BoundRecord::ratio(m, p, Method::Numeric, BoundExponent::Scalar(rho), numerator, norm.best_value);
    record.provenance = Some(Provenance {
        master_seed: norm.master_seed,
        starts: norm.per_start.len(),
        converged_fraction: norm.converged_fraction,
    });
    Ok(record)
}

/// `C^ℝ_{m,∞,q} ≥ 2^{(2m−αm−4+3α)/(2α)}` for `q = (α, β_m, …, β_m)`.
pub fn bound_gbh_jfapel(m: usize, alpha: f64) -> Result<BoundRecord> {
    check_alpha(m, alpha)?;
    let q = ExponentVector::alpha_leading(m, alpha)?;
    check_gbh(&q, m)?;
    let mf = m as f64;
    let value = 2f64.powf((2.0 * mf - alpha * mf - 4.0 + 3.0 * alpha) / (2.0 * alpha));
    Ok(gbh_record(m, Method::GbhJfapel, q, value))
}

/// `C^ℝ_{m,∞,q} ≥ 2^{(3αm−2m−5α+4)/(2α(m−1))}` for `q = (β_m, …, β_m, α)`.
pub fn bound_gbh_thispel(m: usize, alpha: f64) -> Result<BoundRecord> {
    check_alpha(m, alpha)?;
    let q = ExponentVector::alpha_trailing(m, alpha)?;
    check_gbh(&q, m)?;
    let mf = m as f64;
    let value = 2f64.powf((3.0 * alpha * mf - 2.0 * mf - 5.0 * alpha + 4.0) / (2.0 * alpha * (mf - 1.0)));
    Ok(gbh_record(m, Method::GbhThispel, q, value))
}

fn check_gbh(q: &ExponentVector, m: usize) -> Result<()> {
    if validate_exponents(q, m, f64::INFINITY).is_valid() {
        Ok(())
    } else {
        Err(Error::InvalidParameter("exponent vector is not admissible"))
    }
}

// closed-form records: numerator = bound, norm = 1
fn gbh_record(m: usize, method: Method, q: ExponentVector, value: f64) -> BoundRecord {
    BoundRecord::ratio(m, f64::INFINITY, method, BoundExponent::Vector(q), value, 1.0)
}

/// `(2^{2m−3} · 2^{β_m/α})^{1/β_m}`, the mixed norm of `T_m`'s coefficients
/// under `(β_m, …, β_m, α)`.
pub fn thispel_mixed_norm_identity(m: usize, alpha: f64) -> f64 {
    let beta = ExponentVector::beta(m, alpha);
    (2f64.powi(2 * m as i32 - 3) * 2f64.powf(beta / alpha)).powf(1.0 / beta)
}

/// One line of [`verify_three_linear_optimal`].
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalCase {
    pub q: ExponentVector,
    pub mechanism: &'static str,
    pub lower: f64,
    pub upper: f64,
}

impl OptimalCase {
    pub fn holds(&self) -> bool {
        (self.lower - self.upper).abs() <= OPTIMAL3_TOL
    }
}

/// Lower bounds matching [`GBH3_UPPER`] for `m = 3` and
/// `q ∈ {(4/3,4/3,2), (4/3,8/5,8/5), (4/3,2,4/3)}`.
pub fn verify_three_linear_optimal() -> Result<Vec<OptimalCase>> {
    let t3 = crate::forms::make_littlewood(3)?;
    let coeffs = t3.expand_coeffs(DEFAULT_EXPAND_LIMIT)?;
    let t3_norm = brute_force_linf_norm(&t3)?;

    let thispel = bound_gbh_thispel(3, 2.0)?;
    let jfapel = bound_gbh_jfapel(3, 4.0 / 3.0)?;
    let direct_q = ExponentVector::new(alloc::vec![4.0 / 3.0, 2.0, 4.0 / 3.0])?;
    let direct = mixed_norm(&coeffs, &direct_q)? / t3_norm;

    let as_vector = |e: BoundExponent| match e {
        BoundExponent::Vector(q) => q,
        BoundExponent::Scalar(_) => unreachable!("gbh records carry vectors"),
    };
    Ok(alloc::vec![
        OptimalCase {
            q: as_vector(thispel.exponent),
            mechanism: "gbh-thispel",
            lower: thispel.bound,
            upper: GBH3_UPPER
        },
        OptimalCase { q: as_vector(jfapel.exponent), mechanism: "gbh-jfapel", lower: jfapel.bound, upper: GBH3_UPPER },
        OptimalCase { q: direct_q, mechanism: "direct T_3", lower: direct, upper: GBH3_UPPER },
    ])
}

/// `D_{ℝ, n·2^m, p} ≥ (2^n/(n+1))^{2^m−1}`.
pub fn poly_lower_bound(m: u32, n: u32) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("m and n must be at least 1"));
    }
    let base = 2f64.powi(n as i32) / (n as f64 + 1.0);
    Ok(base.powf(2f64.powi(m as i32) - 1.0))
}

/// `(2^n/(n+1))^{(2^m−1)/(n 2^m)}`, the degree-normalized form of
/// [`poly_lower_bound`]; tends to `2/(n+1)^{1/n}` as `m → ∞`.
pub fn poly_lower_bound_root(m: u32, n: u32) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("m and n must be at least 1"));
    }
    let nf = n as f64;
    let ln_base = nf * core::f64::consts::LN_2 - (nf + 1.0).ln();
    let scale = 2f64.powi(m as i32);
    Ok((ln_base * (scale - 1.0) / (nf * scale)).exp())
}

/// [`poly_lower_bound`] as a record for degree `d = n·2^m`: the polynomial
/// `Q_{2^m}^n` has norm one on every ℓ_p, so `norm = 1`. Valid for all
/// `p > d`; reported at `p = ∞`.
pub fn bound_poly(m: u32, n: u32) -> Result<BoundRecord> {
    let value = poly_lower_bound(m, n)?;
    let degree = 1usize.checked_shl(m).and_then(|s| s.checked_mul(n as usize)).ok_or(Error::Overflow)?;
    let rho = hl_exponent(degree.max(2), f64::INFINITY)?;
    Ok(BoundRecord::ratio(degree, f64::INFINITY, Method::Poly, BoundExponent::Scalar(rho), value, 1.0))
}
