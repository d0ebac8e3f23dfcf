//! Invariant suites run by `hlb verify`.

use std::fmt::Write as _;

use hlb_core::bounds::{bound_clarkson, bound_numeric, littlewood_norm_upper, verify_three_linear_optimal};
use hlb_core::forms::make_littlewood;
use hlb_core::lp::lp_norm;
use hlb_core::optimizer::{brute_force_linf_norm, clarkson_sup};
use hlb_core::polynomials::{check_eq_m, DEFAULT_TERM_CAP};
use serde::Serialize;

use crate::parallel::{par_sup_norm, RunSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Optimal3,
    Sandwich,
    Oracles,
    Eqm,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Optimal3 => "optimal3",
            Suite::Sandwich => "sandwich",
            Suite::Oracles => "oracles",
            Suite::Eqm => "eqm",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: &'static str,
    pub checks: Vec<Check>,
}

impl Report {
    fn new(suite: Suite) -> Self {
        Report { suite: suite.name(), checks: Vec::new() }
    }

    fn push(&mut self, name: String, ok: bool, detail: String) {
        self.checks.push(Check { name, ok, detail });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(s, "{} {}: {}", if c.ok { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        let failed = self.checks.iter().filter(|c| !c.ok).count();
        let _ = writeln!(s, "{}: {} checks, {} failed", self.suite, self.checks.len(), failed);
        s
    }

    pub fn render_csv(&self) -> String {
        let mut s = String::from("suite,check,status,detail\n");
        for c in &self.checks {
            let status = if c.ok { "pass" } else { "fail" };
            let _ = writeln!(s, "{},{},{},\"{}\"", self.suite, c.name, status, c.detail.replace('"', "\"\""));
        }
        s
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// `4/3`-style text for exponents with small denominators.
pub fn fraction(v: f64) -> String {
    if v.is_infinite() {
        return "inf".to_string();
    }
    for den in 1..=12u32 {
        let num = (v * den as f64).round();
        if (v * den as f64 - num).abs() < 1e-9 {
            return if den == 1 { format!("{num}") } else { format!("{num}/{den}") };
        }
    }
    v.to_string()
}

pub fn optimal3() -> Report {
    let mut r = Report::new(Suite::Optimal3);
    match verify_three_linear_optimal() {
        Ok(cases) => {
            for c in cases {
                let q: Vec<String> = c.q.as_slice().iter().map(|&v| fraction(v)).collect();
                let ok = c.holds();
                let relation = if ok { "lower = upper = 2^{3/4}" } else { "lower ≠ upper" };
                r.push(
                    format!("q=({})", q.join(", ")),
                    ok,
                    format!("{relation} via {} (lower {}, upper {})", c.mechanism, c.lower, c.upper),
                );
            }
        }
        Err(e) => r.push("optimal3".into(), false, e.to_string()),
    }
    r
}

/// Every start of every run stays below the proven norm bound and its
/// witness is feasible and attains the reported value.
pub fn sandwich(settings: &RunSettings, max_m: usize) -> Report {
    let mut r = Report::new(Suite::Sandwich);
    for m in 2..=max_m {
        let form = match make_littlewood(m) {
            Ok(f) => f,
            Err(e) => {
                r.push(format!("T_{m}"), false, e.to_string());
                continue;
            }
        };
        for p in [2.0 * m as f64, 4.0 * m as f64] {
            let name = format!("T_{m} on l_{p}");
            let res = match par_sup_norm(&form, &settings.config(p)) {
                Ok(res) => res,
                Err(e) => {
                    r.push(name, false, e.to_string());
                    continue;
                }
            };
            let upper = littlewood_norm_upper(m, p).expect("m ≥ 2, p ≥ 2");
            let worst = res.per_start.iter().map(|s| s.value).fold(0.0, f64::max);
            let feasible = res.witness.iter().all(|x| (lp_norm(x, p) - 1.0).abs() <= 1e-12);
            let attained =
                form.evaluate(&res.witness).map(|v| (v.abs() - res.best_value).abs() <= 1e-9 * res.best_value.max(1.0));
            let ok = worst <= upper + 1e-9 && feasible && attained == Ok(true);
            r.push(
                name,
                ok,
                format!(
                    "best {worst} ≤ 2^(m−2)·clarkson_sup = {upper} over {} starts; witness feasible: {feasible}",
                    res.per_start.len()
                ),
            );
        }
    }
    r
}

/// The optimizer against the Clarkson supremum and the corner enumeration,
/// and the numeric bound against the closed form.
pub fn oracles(settings: &RunSettings) -> Report {
    let mut r = Report::new(Suite::Oracles);
    let t2 = make_littlewood(2).expect("m = 2");
    for p in [4.0, 8.0, 16.0] {
        let name = format!("T_2 on l_{p} vs clarkson_sup");
        match (par_sup_norm(&t2, &settings.config(p)), clarkson_sup(p)) {
            (Ok(res), Ok(exact)) => {
                let ok = (res.best_value - exact).abs() <= 1e-4;
                r.push(name, ok, format!("sup_norm {} vs {exact}", res.best_value));
                if p <= 8.0 {
                    let numeric = bound_numeric(&t2, 2, p, &res).map(|b| b.bound);
                    let closed = bound_clarkson(2, p).map(|b| b.bound);
                    if let (Ok(a), Ok(b)) = (numeric, closed) {
                        r.push(
                            format!("bound routes at m=2, p={p}"),
                            (a - b).abs() <= 2e-3,
                            format!("numeric {a} vs closed form {b}"),
                        );
                    }
                }
            }
            (Err(e), _) | (_, Err(e)) => r.push(name, false, e.to_string()),
        }
    }
    for m in 2..=4 {
        let name = format!("T_{m} on l_inf vs corners");
        let form = make_littlewood(m).expect("m ≥ 2");
        match (par_sup_norm(&form, &settings.config(f64::INFINITY)), brute_force_linf_norm(&form)) {
            (Ok(res), Ok(brute)) => {
                let ok = (res.best_value - brute).abs() <= 1e-9 && brute == 2f64.powi(m as i32 - 1);
                r.push(name, ok, format!("sup_norm {} vs corner max {brute}", res.best_value));
            }
            (Err(e), _) | (_, Err(e)) => r.push(name, false, e.to_string()),
        }
    }
    r
}

pub fn eqm(max_m: u32, max_n: u32) -> Report {
    let mut r = Report::new(Suite::Eqm);
    for m in 1..=max_m {
        for n in 1..=max_n {
            let name = format!("m={m}, n={n}");
            match check_eq_m(m, n, DEFAULT_TERM_CAP) {
                Ok(rep) => {
                    let ok = rep.holds();
                    r.push(name, ok, format!("|Q_{}^{n}|_inf = {} ≥ {}", 1u64 << m, rep.lhs, rep.rhs));
                }
                Err(e) => r.push(name, false, e.to_string()),
            }
        }
    }
    r
}
