//! JSON and CSV encodings of coefficient tensors, optimizer results, bound
//! records and polynomials. Floats are written in shortest round-trip form,
//! so decoding reproduces every value bit for bit.

use hlb_core::bounds::{BoundExponent, BoundRecord};
use hlb_core::optimizer::StartRecord;
use hlb_core::polynomials::Polynomial;
use hlb_core::{CoeffTensor, OptimizeConfig, OptimizeResult};
use serde::{Deserialize, Serialize};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorEntry {
    pub idx: Vec<usize>,
    pub c: f64,
}

/// `{"degree", "dims", "entries": [{"idx": [1-based], "c"}]}`, entries sorted by `idx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorJson {
    pub degree: usize,
    pub dims: Vec<usize>,
    pub entries: Vec<TensorEntry>,
}

impl From<&CoeffTensor> for TensorJson {
    fn from(t: &CoeffTensor) -> Self {
        TensorJson {
            degree: t.degree(),
            dims: t.dims().to_vec(),
            entries: t.iter().map(|(idx, c)| TensorEntry { idx, c }).collect(),
        }
    }
}

impl TryFrom<TensorJson> for CoeffTensor {
    type Error = anyhow::Error;

    fn try_from(j: TensorJson) -> anyhow::Result<Self> {
        anyhow::ensure!(j.degree == j.dims.len(), "degree {} but {} dims", j.degree, j.dims.len());
        Ok(CoeffTensor::new(j.dims, j.entries.into_iter().map(|e| (e.idx, e.c)))?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartJson {
    pub index: usize,
    pub seed: u64,
    pub value: f64,
    pub sweeps: usize,
    pub converged: bool,
    pub restarts: usize,
    pub degenerate: bool,
}

impl From<&StartRecord> for StartJson {
    fn from(r: &StartRecord) -> Self {
        StartJson {
            index: r.index,
            seed: r.seed,
            value: r.value,
            sweeps: r.sweeps,
            converged: r.converged,
            restarts: r.restarts,
            degenerate: r.degenerate,
        }
    }
}

impl From<StartJson> for StartRecord {
    fn from(j: StartJson) -> Self {
        StartRecord {
            index: j.index,
            seed: j.seed,
            value: j.value,
            sweeps: j.sweeps,
            converged: j.converged,
            restarts: j.restarts,
            degenerate: j.degenerate,
        }
    }
}

/// `{"best", "witness", "starts", "seed", "per_start"}` plus the exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeJson {
    pub best: f64,
    pub witness: Vec<Vec<f64>>,
    pub starts: usize,
    pub seed: u64,
    pub p: String,
    pub per_start: Vec<StartJson>,
}

impl OptimizeJson {
    pub fn new(result: &OptimizeResult, p: Rational) -> Self {
        OptimizeJson {
            best: result.best_value,
            witness: result.witness.clone(),
            starts: result.per_start.len(),
            seed: result.master_seed,
            p: p.to_string(),
            per_start: result.per_start.iter().map(StartJson::from).collect(),
        }
    }

    pub fn into_result(self) -> anyhow::Result<OptimizeResult> {
        let p: Rational = self.p.parse()?;
        anyhow::ensure!(self.starts == self.per_start.len(), "start count does not match per_start");
        let converged = self.per_start.iter().filter(|s| s.converged).count();
        let converged_fraction = if self.starts == 0 { 0.0 } else { converged as f64 / self.starts as f64 };
        let config = OptimizeConfig::new(p.to_f64()).with_starts(self.starts).with_seed(self.seed);
        Ok(OptimizeResult {
            best_value: self.best,
            witness: self.witness,
            per_start: self.per_start.into_iter().map(StartRecord::from).collect(),
            converged_fraction,
            p: config.p,
            master_seed: config.master_seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExponentJson {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl ExponentJson {
    fn csv(&self) -> String {
        match self {
            ExponentJson::Scalar(v) => v.to_string(),
            ExponentJson::Vector(v) => v.iter().map(f64::to_string).collect::<Vec<_>>().join(";"),
        }
    }
}

/// One bound row. `seed`, `starts` and the certified fields are present
/// for numeric bounds only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundJson {
    pub m: usize,
    pub p_num: String,
    pub p_den: u64,
    pub method: String,
    pub exponent: ExponentJson,
    pub numerator: f64,
    pub norm: f64,
    pub bound: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub starts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub converged_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certified_norm_upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certified_bound_lower: Option<f64>,
}

impl BoundJson {
    /// `p` is passed separately so that rational inputs keep their exact form.
    pub fn new(record: &BoundRecord, p: Rational) -> Self {
        let (p_num, p_den) = p.parts();
        let exponent = match &record.exponent {
            BoundExponent::Scalar(v) => ExponentJson::Scalar(*v),
            BoundExponent::Vector(q) => ExponentJson::Vector(q.as_slice().to_vec()),
        };
        BoundJson {
            m: record.m,
            p_num,
            p_den,
            method: record.method.name().to_string(),
            exponent,
            numerator: record.numerator,
            norm: record.norm,
            bound: record.bound,
            seed: record.provenance.as_ref().map(|p| p.master_seed),
            starts: record.provenance.as_ref().map(|p| p.starts),
            converged_fraction: record.provenance.as_ref().map(|p| p.converged_fraction),
            certified_norm_upper: record.certified.as_ref().map(|c| c.norm_upper),
            certified_bound_lower: record.certified.as_ref().map(|c| c.bound_lower),
        }
    }
}

pub const BOUND_CSV_HEADER: &str = "m,p_num,p_den,method,exponent,numerator,norm,bound,seed";

/// CSV with [`BOUND_CSV_HEADER`]; vector exponents are `;`-separated.
pub fn bounds_to_csv(rows: &[BoundJson]) -> String {
    let mut out = String::from(BOUND_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let seed = r.seed.map(|s| s.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.m,
            r.p_num,
            r.p_den,
            r.method,
            r.exponent.csv(),
            r.numerator,
            r.norm,
            r.bound,
            seed
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyEntry {
    pub alpha: Vec<u32>,
    pub c: i64,
}

/// `{"nvars", "degree", "entries": [{"alpha", "c"}]}`, entries sorted by `alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub nvars: usize,
    pub degree: u32,
    pub entries: Vec<PolyEntry>,
}

impl From<&Polynomial> for PolynomialJson {
    fn from(p: &Polynomial) -> Self {
        PolynomialJson {
            nvars: p.nvars(),
            degree: p.degree(),
            entries: p.iter().map(|(alpha, c)| PolyEntry { alpha: alpha.to_vec(), c }).collect(),
        }
    }
}

impl TryFrom<PolynomialJson> for Polynomial {
    type Error = anyhow::Error;

    fn try_from(j: PolynomialJson) -> anyhow::Result<Self> {
        Ok(Polynomial::new(j.nvars, j.degree, j.entries.into_iter().map(|e| (e.alpha, e.c)))?)
    }
}
