use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use rc_core::congruence::{builtin_claims, eval_sum, telescoped_sums, verify_claim_range, FlaggedPoint};
use rc_core::exactmath::{int, BigRat, Poly};
use rc_core::sequences::{
    builtin, central_trinomial_by_expansion, check_derived_recurrence, check_recurrence_consistency,
    eval_direct, SequenceRegistry, SumFormula,
};
use rc_core::telescoper::{
    certify, discover_weights, find_telescoper, ShiftWindow, TelescopeProblem,
    TelescoperCertificate, WeightTemplate,
};

#[derive(Debug, Serialize)]
pub struct Entry {
    pub name: String,
    pub pass: bool,
    pub points: usize,
    pub elapsed_ms: u128,
    pub detail: String,
    pub flagged: Vec<FlaggedPoint>,
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub entries: Vec<Entry>,
    pub elapsed_ms: u128,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }
}

const UPTO: i64 = 200;

fn poly(s: &str) -> Poly {
    Poly::parse(s).expect("valid polynomial literal")
}

fn timed(name: &str, f: impl FnOnce() -> Result<(usize, String), String>) -> Entry {
    let start = Instant::now();
    let (pass, points, detail) = match f() {
        Ok((points, detail)) => (true, points, detail),
        Err(detail) => (false, 0, detail),
    };
    Entry {
        name: name.to_string(),
        pass,
        points,
        elapsed_ms: start.elapsed().as_millis(),
        detail,
        flagged: vec![],
    }
}

fn partial_sums(cert: &TelescoperCertificate, reg: &SequenceRegistry) -> Result<Vec<BigRat>, String> {
    let s0 = cert.antidifference_at(reg, 0).map_err(|e| e.to_string())?;
    (1..=UPTO)
        .map(|n| {
            cert.antidifference_at(reg, n)
                .map(|s| s - &s0)
                .map_err(|e| e.to_string())
        })
        .collect()
}

/// Finds and certifies a telescoper, then checks it against direct summation for `1 <= n <= UPTO`.
fn reproduce(
    reg: &SequenceRegistry,
    prob: &TelescopeProblem,
    p: &str,
    deg: usize,
    sum: &SumFormula,
) -> Result<(TelescoperCertificate, Vec<BigRat>), String> {
    let cert = find_telescoper(reg, prob, &poly(p), deg).map_err(|e| e.to_string())?;
    certify(&cert, reg, UPTO).map_err(|e| e.to_string())?;
    let sums = partial_sums(&cert, reg)?;
    for (n, s) in (1..=UPTO).zip(&sums) {
        let direct = eval_sum(sum, n, reg).map_err(|e| e.to_string())?;
        if &direct != s {
            return Err(format!("S({n}) - S(0) = {s} but the direct sum is {direct}"));
        }
    }
    Ok((cert, sums))
}

fn certificate_entries(reg: &SequenceRegistry) -> Vec<Entry> {
    let sums = telescoped_sums();
    let t_window = |lo: i64| TelescopeProblem::square("T", ShiftWindow::new(lo, lo + 1), (0, 1));
    vec![
        timed("certificate: (8k+9) W_k^2", || {
            let prob = TelescopeProblem::square("W", ShiftWindow::new(-2, 0), (0, 0));
            let (cert, s) = reproduce(reg, &prob, "8k+9", 2, &sums[0].0)?;
            if s[0] != int(9) || s[1] != int(26) {
                return Err(format!("spot values {} and {}, expected 9 and 26", s[0], s[1]));
            }
            if s != partial_sums(&sums[0].1, reg)? {
                return Err("differs from the reference antidifference".into());
            }
            Ok((UPTO as usize, cert.pretty()))
        }),
        timed("certificate: k(k+1)(8k+9) T_k T_{k+1}, two windows", || {
            let weight = "k(k+1)(8k+9)";
            let (lower, a) = reproduce(reg, &t_window(-1), weight, 4, &sums[1].0)?;
            let (_, b) = reproduce(reg, &t_window(0), weight, 4, &sums[2].0)?;
            if a != b {
                return Err("windows [-1, 0] and [0, 1] give different partial sums".into());
            }
            if a[0] != int(0) {
                return Err(format!("S(1) - S(0) = {}, expected 0", a[0]));
            }
            Ok((UPTO as usize, lower.pretty()))
        }),
        timed("certificate: (k+1)(16k+21) T_k T_{k+1}", || {
            let (cert, s) = reproduce(reg, &t_window(-1), "(k+1)(16k+21)", 4, &sums[3].0)?;
            if s != partial_sums(&sums[3].1, reg)? {
                return Err("differs from the reference antidifference".into());
            }
            Ok((UPTO as usize, cert.pretty()))
        }),
        timed("discovery: (k+1)(αk+β) over T_k T_{k+1}", || {
            let tmpl = WeightTemplate {
                factor: poly("k+1"),
                degree: 1,
            };
            let d = discover_weights(reg, &t_window(-1), &tmpl, 3).map_err(|e| e.to_string())?;
            if !d.contains_weight_direction(&[int(21), int(16)]) {
                return Err("direction (16, 21) not in the weight space".into());
            }
            Ok((d.weighted.len(), format!("weight space dimension {}", d.weight_dimension())))
        }),
        timed("discovery: αk+β over W_k^2", || {
            let prob = TelescopeProblem::square("W", ShiftWindow::new(-2, 0), (0, 0));
            let tmpl = WeightTemplate {
                factor: Poly::one(),
                degree: 1,
            };
            let d = discover_weights(reg, &prob, &tmpl, 2).map_err(|e| e.to_string())?;
            if !d.contains_weight_direction(&[int(9), int(8)]) {
                return Err("direction (8, 9) not in the weight space".into());
            }
            Ok((d.weighted.len(), format!("weight space dimension {}", d.weight_dimension())))
        }),
    ]
}

fn oracle_entries() -> Vec<Entry> {
    vec![
        timed("oracle: W and T recurrences against binomial sums", || {
            for def in [builtin::w(), builtin::t()] {
                check_recurrence_consistency(&def, 60).map_err(|e| format!("{}: {e}", def.name))?;
            }
            Ok((122, "n <= 60".into()))
        }),
        timed("oracle: three definitions of T", || {
            let reg = SequenceRegistry::with_builtins();
            let alt = builtin::trinomial_alt_formula();
            for n in 0..=60 {
                let rec = BigRat::from_integer(reg.term("T", n).map_err(|e| e.to_string())?);
                let by_alt = eval_direct(&alt, n).map_err(|e| e.to_string())?;
                let by_poly = BigRat::from_integer(central_trinomial_by_expansion(n as usize));
                if rec != by_alt || rec != by_poly {
                    return Err(format!("disagreement at n = {n}"));
                }
            }
            Ok((61, "n <= 60".into()))
        }),
        timed("oracle: recurrence of t_n = (T_{n+1} - 3T_n)/2", || {
            check_derived_recurrence(&builtin::small_t(), &builtin::small_t_recurrence(), 100)
                .map_err(|e| e.to_string())?;
            Ok((99, "residual zero for n <= 100".into()))
        }),
    ]
}

/// Runs the certificate and oracle checks, then every built-in claim.
pub fn run(reg: &SequenceRegistry, jobs: Option<usize>) -> SuiteReport {
    let start = Instant::now();
    let mut entries = certificate_entries(reg);
    entries.extend(oracle_entries());
    for c in builtin_claims() {
        let r = verify_claim_range(&c, c.range.0, c.range.1, reg, jobs);
        let detail = match r.failures.first() {
            Some(f) => format!("{} failures, first at n = {}: {}", r.failures.len(), f.point, f.reason),
            None => format!("{} for n in [{}, {}]", c.description, r.range.0, r.range.1),
        };
        entries.push(Entry {
            name: format!("claim: {}", c.id),
            pass: r.pass,
            points: r.checked,
            elapsed_ms: r.elapsed_ms,
            detail,
            flagged: r.flagged,
        });
    }
    SuiteReport {
        entries,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

pub fn print_table(r: &SuiteReport) {
    for e in &r.entries {
        eprintln!(
            "{:<4}  {:<58} {:>6} pts {:>7} ms",
            if e.pass { "PASS" } else { "FAIL" },
            e.name,
            e.points,
            e.elapsed_ms
        );
        if !e.pass {
            eprintln!("      {}", e.detail);
        }
        for f in &e.flagged {
            eprintln!(
                "      note: n = {} {} (lhs ≡ {}, rhs ≡ {} mod {})",
                f.point,
                if f.holds { "holds" } else { "does not hold" },
                f.lhs_residue.as_deref().unwrap_or("?"),
                f.rhs_residue.as_deref().unwrap_or("?"),
                f.modulus.as_deref().unwrap_or("?"),
            );
        }
    }
    let failed = r.entries.iter().filter(|e| !e.pass).count();
    eprintln!(
        "{} of {} checks passed in {:.1} s",
        r.entries.len() - failed,
        r.entries.len(),
        r.elapsed_ms as f64 / 1000.0
    );
}

pub fn to_json(r: &SuiteReport, timings: bool) -> Value {
    let mut v = json!({
        "pass": r.pass(),
        "entries": r.entries,
    });
    if timings {
        v["elapsed_ms"] = json!(r.elapsed_ms);
    } else if let Some(es) = v["entries"].as_array_mut() {
        for e in es {
            if let Some(m) = e.as_object_mut() {
                m.remove("elapsed_ms");
            }
        }
    }
    v
}
