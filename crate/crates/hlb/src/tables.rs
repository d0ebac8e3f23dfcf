//! The two numeric tables: `T_m` on `ℓ_{2m}` for `m = 2..9` (`dell99`) and
//! `T̃_m` on `ℓ_{2m}` for `m = 4, 8, 16` (`t44`).

use std::fmt::Write as _;

use hlb_core::bounds::{hl_numerator, littlewood_norm_upper};
use hlb_core::forms::{make_littlewood, make_tilde};
use hlb_core::FormExpr;
use serde::Serialize;

use crate::cache::{CacheKey, ResultCache};
use crate::parallel::{optimize_cached, RunSettings, Source};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableName {
    Dell99,
    T44,
}

/// One reference row: degree, printed norm, printed bound.
pub struct Reference {
    pub m: usize,
    pub norm: f64,
    pub bound: f64,
    /// Rows that need an explicit opt-in (hours of search).
    pub heavy: bool,
}

const DELL99: [Reference; 8] = [
    Reference { m: 2, norm: 1.74, bound: 1.149, heavy: false },
    Reference { m: 3, norm: 3.29, bound: 1.215, heavy: false },
    Reference { m: 4, norm: 6.40, bound: 1.250, heavy: false },
    Reference { m: 5, norm: 12.60, bound: 1.269, heavy: false },
    Reference { m: 6, norm: 25.00, bound: 1.280, heavy: false },
    Reference { m: 7, norm: 49.47, bound: 1.293, heavy: false },
    Reference { m: 8, norm: 98.36, bound: 1.301, heavy: false },
    Reference { m: 9, norm: 195.81, bound: 1.307, heavy: false },
];

const T44: [Reference; 3] = [
    Reference { m: 4, norm: 6.20, bound: 1.290, heavy: false },
    Reference { m: 8, norm: 91.48, bound: 1.399, heavy: false },
    Reference { m: 16, norm: 22137.70, bound: 1.480, heavy: true },
];

/// Printed precision of reference norms and bounds.
const NORM_DIGITS: usize = 2;
const BOUND_DIGITS: usize = 3;

impl TableName {
    pub fn name(self) -> &'static str {
        match self {
            TableName::Dell99 => "dell99",
            TableName::T44 => "t44",
        }
    }

    pub fn family(self) -> &'static str {
        match self {
            TableName::Dell99 => "littlewood",
            TableName::T44 => "tilde",
        }
    }

    pub fn references(self) -> &'static [Reference] {
        match self {
            TableName::Dell99 => &DELL99,
            TableName::T44 => &T44,
        }
    }

    fn form(self, m: usize) -> hlb_core::Result<FormExpr> {
        match self {
            TableName::Dell99 => make_littlewood(m),
            TableName::T44 => make_tilde(m),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TableOptions {
    pub settings: RunSettings,
    /// Inclusive degree filter.
    pub min_m: usize,
    pub max_m: usize,
    pub include_heavy: bool,
    pub cache: Option<ResultCache>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    /// Heavy row not requested and not in the cache.
    Absent,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub m: usize,
    pub p: u64,
    pub numerator: f64,
    pub norm: Option<f64>,
    pub bound: Option<f64>,
    /// Numerator over a proven upper bound on the norm, where one is known.
    pub certified_bound: Option<f64>,
    pub reference_norm: f64,
    pub reference_bound: f64,
    /// `(norm − reference_norm)/reference_norm`.
    pub rel_dev: Option<f64>,
    pub converged_fraction: Option<f64>,
    pub status: RowStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub table: &'static str,
    pub family: &'static str,
    pub starts: usize,
    pub seed: u64,
    pub rows: Vec<TableRow>,
}

impl Table {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.status != RowStatus::Error)
    }
}

fn row(name: TableName, r: &Reference, opts: &TableOptions, log: &mut dyn FnMut(String)) -> TableRow {
    let p = 2 * r.m as u64;
    let mut out = TableRow {
        m: r.m,
        p,
        numerator: f64::NAN,
        norm: None,
        bound: None,
        certified_bound: None,
        reference_norm: r.norm,
        reference_bound: r.bound,
        rel_dev: None,
        converged_fraction: None,
        status: RowStatus::Ok,
        error: None,
    };
    let fail = |mut out: TableRow, e: String| {
        out.status = RowStatus::Error;
        out.error = Some(e);
        out
    };
    let form = match name.form(r.m) {
        Ok(f) => f,
        Err(e) => return fail(out, e.to_string()),
    };
    out.numerator = match hl_numerator(&form, r.m, p as f64) {
        Ok(v) => v,
        Err(e) => return fail(out, e.to_string()),
    };
    let rp = Rational::integer(p);
    let cached = if r.heavy && !opts.include_heavy {
        let key =
            CacheKey::new(name.family(), r.m, rp, opts.settings.starts, opts.settings.seed, opts.settings.sweep_tol);
        match opts.cache.as_ref().and_then(|c| c.get(&key)) {
            Some(hit) => Some(hit),
            None => {
                log(format!("{} m={}: heavy row skipped (pass --include-heavy)", name.name(), r.m));
                out.status = RowStatus::Absent;
                return out;
            }
        }
    } else {
        None
    };
    let result = match cached {
        Some(hit) => hit,
        None => match optimize_cached(name.family(), &form, rp, &opts.settings, opts.cache.as_ref()) {
            Ok((res, src)) => {
                let how = if src == Source::Cached { "cache hit" } else { "computed" };
                log(format!("{} m={}: {how}", name.name(), r.m));
                res
            }
            Err(e) => return fail(out, format!("{e:#}")),
        },
    };
    let norm = result.best_value;
    out.norm = Some(norm);
    out.bound = Some(out.numerator / norm);
    out.rel_dev = Some((norm - r.norm) / r.norm);
    out.converged_fraction = Some(result.converged_fraction);
    if name == TableName::Dell99 {
        out.certified_bound = littlewood_norm_upper(r.m, p as f64).ok().map(|u| out.numerator / u);
    }
    out
}

/// Computes the selected rows in degree order. Failures stay in their row.
pub fn compute_table(name: TableName, opts: &TableOptions, log: &mut dyn FnMut(String)) -> Table {
    let rows = name
        .references()
        .iter()
        .filter(|r| (opts.min_m..=opts.max_m).contains(&r.m))
        .map(|r| row(name, r, opts, log))
        .collect();
    Table { table: name.name(), family: name.family(), starts: opts.settings.starts, seed: opts.settings.seed, rows }
}

/// Decimal rendering of `x` rounded half away from zero to `digits` places.
pub fn round_half_up(x: f64, digits: usize) -> String {
    let scale = 10f64.powi(digits as i32);
    let r = (x.abs() * scale + 0.5).floor() / scale;
    let sign = if x < 0.0 && r != 0.0 { "-" } else { "" };
    format!("{sign}{r:.digits$}")
}

fn opt(v: Option<f64>, f: impl Fn(f64) -> String) -> String {
    v.map(f).unwrap_or_else(|| "—".to_string())
}

fn number(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{x:.0}")
    } else {
        round_half_up(x, 4)
    }
}

fn status_text(r: &TableRow) -> String {
    match r.status {
        RowStatus::Ok => "ok".to_string(),
        RowStatus::Absent => "absent".to_string(),
        RowStatus::Error => format!("error: {}", r.error.as_deref().unwrap_or("")),
    }
}

/// Markdown with values rounded half-up to the reference precision.
pub fn render_md(t: &Table) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} ({} family, p = 2m, {} starts, seed {:#x})", t.table, t.family, t.starts, t.seed);
    let _ = writeln!(s);
    let _ = writeln!(s, "| m | p | numerator | norm | bound | certified bound | reference norm | reference bound | rel. dev. | status |");
    let _ = writeln!(s, "|---|---|---|---|---|---|---|---|---|---|");
    for r in &t.rows {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |",
            r.m,
            r.p,
            number(r.numerator),
            opt(r.norm, |v| round_half_up(v, NORM_DIGITS)),
            opt(r.bound, |v| round_half_up(v, BOUND_DIGITS)),
            opt(r.certified_bound, |v| round_half_up(v, BOUND_DIGITS)),
            round_half_up(r.reference_norm, NORM_DIGITS),
            round_half_up(r.reference_bound, BOUND_DIGITS),
            opt(r.rel_dev, |v| format!("{}%", round_half_up(100.0 * v, 2))),
            status_text(r)
        );
    }
    s
}

pub const TABLE_CSV_HEADER: &str =
    "table,m,p,numerator,norm,bound,certified_bound,reference_norm,reference_bound,rel_dev,status";

/// CSV with raw doubles; empty cells for missing values.
pub fn render_csv(t: &Table) -> String {
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut s = String::from(TABLE_CSV_HEADER);
    s.push('\n');
    for r in &t.rows {
        let status = status_text(r).replace(',', ";");
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            t.table,
            r.m,
            r.p,
            r.numerator,
            cell(r.norm),
            cell(r.bound),
            cell(r.certified_bound),
            r.reference_norm,
            r.reference_bound,
            cell(r.rel_dev),
            status
        );
    }
    s
}

pub fn render_json(t: &Table) -> String {
    let mut s = serde_json::to_string_pretty(t).expect("tables serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(max_m: usize) -> TableOptions {
        TableOptions {
            settings: RunSettings { starts: 8, ..RunSettings::default() },
            min_m: 2,
            max_m,
            include_heavy: false,
            cache: None,
        }
    }

    #[test]
    fn half_up_rounding() {
        assert_eq!(round_half_up(1.745, 2), "1.75");
        assert_eq!(round_half_up(1.7320508, 2), "1.73");
        assert_eq!(round_half_up(1.2495, 3), "1.250");
        assert_eq!(round_half_up(-0.125, 2), "-0.13");
        assert_eq!(round_half_up(-0.001, 2), "0.00");
    }

    #[test]
    fn small_dell99() {
        let t = compute_table(TableName::Dell99, &opts(3), &mut |_| {});
        assert_eq!(t.rows.len(), 2);
        assert!(t.all_ok());
        let r2 = &t.rows[0];
        assert_eq!((r2.m, r2.p, r2.numerator), (2, 4, 2.0));
        assert!((r2.norm.unwrap() - 3f64.sqrt()).abs() < 1e-6);
        assert!(r2.certified_bound.unwrap() <= r2.bound.unwrap() + 1e-9);
        let md = render_md(&t);
        assert!(md.contains("| 2 | 4 | 2 | 1.73 | 1.155 |"), "{md}");
        let csv = render_csv(&t);
        assert_eq!(csv.lines().count(), 3);
        let json: serde_json::Value = serde_json::from_str(&render_json(&t)).unwrap();
        assert_eq!(json["rows"][0]["norm"].as_f64(), r2.norm);
    }

    #[test]
    fn heavy_row_is_absent_by_default() {
        let mut o = opts(16);
        o.min_m = 16;
        let t = compute_table(TableName::T44, &o, &mut |_| {});
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.rows[0].status, RowStatus::Absent);
        assert_eq!(t.rows[0].numerator, 32768.0);
        assert!(render_md(&t).contains("| 16 | 32 | 32768 | — | — | — | 22137.70 | 1.480 | — | absent |"));
    }
}
