mod suite;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use rc_core::congruence::{
    builtin_claims, evaluate_claim, verify_claim_range, CongruenceClaim, Domain, Parity,
    VerificationReport,
};
use rc_core::exactmath::{format_rat, Poly};
use rc_core::sequences::{SequenceRegistry, SequenceSource};
use rc_core::telescoper::{
    certify, check_hl_mode, discover_weights, find_telescoper, reduce_mod, ShiftWindow,
    TelescopeError, TelescopeProblem, TelescoperCertificate, WeightTemplate,
    DEFAULT_DEGREE_BOUND,
};

#[derive(Parser)]
#[command(name = "rc", version, about = "Telescoping certificates and exact congruence checks")]
struct Cli {
    /// JSON file with extra sequence definitions (a list of sources).
    #[arg(long, global = true)]
    sequences: Option<PathBuf>,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for claim checking.
    #[arg(long, global = true, env = "RC_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find g with p(k) a_{k+s} b_{k+t} = Δ_k Σ g_{i,j}(k) a_{k+i} b_{k+j}.
    Telescope {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Weight polynomial, e.g. "8*k+9".
        #[arg(long)]
        p: String,
    },
    /// Solve for the weight and the certificate together.
    Discover {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Degree of the free part of the weight.
        #[arg(long)]
        p_degree: usize,
        /// Fixed factor of the weight.
        #[arg(long, default_value = "1")]
        p_factor: String,
    },
    /// Check a certificate symbolically and against exact partial sums.
    Certify {
        /// Certificate JSON file, or "-" for stdin.
        cert: PathBuf,
        #[arg(long, default_value_t = 200)]
        upto: i64,
        /// Also test whether q divides every g (no new denominators).
        #[arg(long)]
        hl: Option<String>,
        /// Also reduce every g modulo this polynomial.
        #[arg(long)]
        reduce_mod: Option<String>,
    },
    /// Verify congruence claims over a range of n.
    Verify {
        /// Claim id; may be repeated. Defaults to every claim.
        #[arg(long)]
        claim: Vec<String>,
        /// JSON file with a claim or a list of claims.
        #[arg(long)]
        claims_file: Option<PathBuf>,
        /// Range lo..hi; defaults to each claim's own range.
        #[arg(long, allow_hyphen_values = true)]
        range: Option<String>,
        /// Restrict to primes in lo..hi.
        #[arg(long, conflicts_with = "range")]
        primes: Option<String>,
        /// Comma-separated points to skip.
        #[arg(long, allow_hyphen_values = true)]
        exclude: Option<String>,
        /// List the available claims and exit.
        #[arg(long)]
        list: bool,
        /// Include wall times in the JSON output.
        #[arg(long)]
        timings: bool,
    },
    /// Print sequence terms or claim values.
    Eval {
        #[arg(long, required_unless_present = "claim")]
        seq: Option<String>,
        #[arg(long, conflicts_with = "seq")]
        claim: Option<String>,
        #[arg(long)]
        claims_file: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        range: String,
    },
    /// Reproduce every certificate and verify every built-in claim.
    PaperSuite {
        /// Include wall times in the JSON output.
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Args)]
struct ProblemArgs {
    #[arg(long)]
    seq: String,
    /// Second factor; defaults to --seq, "1" means the constant sequence.
    #[arg(long)]
    seq_b: Option<String>,
    /// Basis window lo..hi for the first factor.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    window_b: Option<String>,
    /// Shifts of the summand, "s" or "s,t".
    #[arg(long, allow_hyphen_values = true)]
    target_shifts: Option<String>,
    /// Largest degree of the g polynomials.
    #[arg(long, default_value_t = DEFAULT_DEGREE_BOUND)]
    deg: usize,
    /// Keep (i, j) and (j, i) as separate unknowns for symmetric products.
    #[arg(long)]
    no_merge: bool,
}

/// Malformed input; exits with status 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Usage(msg.into()).into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.is::<Usage>() { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let reg = registry(cli.sequences.as_deref())?;
    let out = cli.out.as_deref();
    match cli.command {
        Command::Telescope { problem, p } => {
            let prob = build_problem(&reg, &problem)?;
            let p = parse_poly(&p)?;
            match find_telescoper(&reg, &prob, &p, problem.deg) {
                Ok(cert) => {
                    eprintln!("{}", cert.pretty());
                    emit(&serde_json::to_value(&cert)?, out)?;
                    Ok(true)
                }
                Err(TelescopeError::NotFound { deg_bound }) => {
                    eprintln!("no certificate with g-degree <= {deg_bound}");
                    emit(&json!({ "found": false, "deg_bound": deg_bound }), out)?;
                    Ok(false)
                }
                Err(e) => usage(e.to_string()),
            }
        }
        Command::Discover {
            problem,
            p_degree,
            p_factor,
        } => {
            let prob = build_problem(&reg, &problem)?;
            let template = WeightTemplate {
                factor: parse_poly(&p_factor)?,
                degree: p_degree,
            };
            let d = discover_weights(&reg, &prob, &template, problem.deg)
                .map_err(|e| Usage(e.to_string()))?;
            let sol = |s: &rc_core::telescoper::Solution| {
                json!({
                    "weights": s.weights.iter().map(format_rat).collect::<Vec<_>>(),
                    "p": s.certificate.p.to_string(),
                    "certificate": s.certificate,
                })
            };
            eprintln!(
                "weight space dimension {}, {} kernel solutions",
                d.weight_dimension(),
                d.kernel.len()
            );
            emit(
                &json!({
                    "weight_dimension": d.weight_dimension(),
                    "weighted": d.weighted.iter().map(sol).collect::<Vec<_>>(),
                    "kernel": d.kernel.iter().map(sol).collect::<Vec<_>>(),
                }),
                out,
            )?;
            Ok(true)
        }
        Command::Certify {
            cert,
            upto,
            hl,
            reduce_mod: rm,
        } => {
            let text = read_input(&cert)?;
            let cert: TelescoperCertificate = serde_json::from_str(&text)
                .map_err(|e| Usage(format!("{}: {e}", cert.display())))?;
            let mut result = match certify(&cert, &reg, upto) {
                Ok(r) => {
                    let mut v = serde_json::to_value(&r)?;
                    v["pass"] = json!(true);
                    v
                }
                Err(e) => json!({ "pass": false, "error": e.to_string() }),
            };
            if let Some(q) = hl {
                result["hl_mode"] = json!(check_hl_mode(&cert, &parse_poly(&q)?));
            }
            if let Some(q) = rm {
                let q = parse_poly(&q)?;
                if q.is_zero() {
                    return usage("--reduce-mod needs a nonzero polynomial");
                }
                result["reduced"] = serde_json::to_value(reduce_mod(&cert, &q)?)?;
            }
            let pass = result["pass"] == json!(true);
            eprintln!("{}", if pass { "certificate passes" } else { "certificate FAILS" });
            emit(&result, out)?;
            Ok(pass)
        }
        Command::Verify {
            claim,
            claims_file,
            range,
            primes,
            exclude,
            list,
            timings,
        } => {
            let claims = select_claims(load_claims(claims_file.as_deref())?, &claim)?;
            if list {
                for c in &claims {
                    println!("{:<32} {}", c.id, c.description);
                }
                return Ok(true);
            }
            let exclude = parse_list(exclude.as_deref())?;
            let range = match (&range, &primes) {
                (Some(r), _) | (_, Some(r)) => Some(parse_range(r)?),
                _ => None,
            };
            let mut reports = Vec::new();
            for mut c in claims {
                restrict(&mut c.domain, primes.is_some(), &exclude);
                let (lo, hi) = range.unwrap_or(c.range);
                let r = verify_claim_range(&c, lo, hi, &reg, cli.jobs);
                print_row(&r);
                reports.push(r);
            }
            let pass = reports.iter().all(|r| r.pass);
            let v: Vec<Value> = reports.iter().map(|r| report_json(r, timings)).collect();
            emit(&Value::Array(v), out)?;
            Ok(pass)
        }
        Command::Eval {
            seq,
            claim,
            claims_file,
            range,
        } => {
            let (lo, hi) = parse_range(&range)?;
            let rows: Vec<Value> = if let Some(id) = claim {
                let c = select_claims(load_claims(claims_file.as_deref())?, &[id])?.remove(0);
                (lo..=hi)
                    .map(|n| match evaluate_claim(&c, n, &reg) {
                        Ok(v) => {
                            let (lr, rr) = v.residues();
                            json!({
                                "n": n,
                                "lhs": format_rat(&v.lhs),
                                "rhs": format_rat(&v.rhs),
                                "modulus": v.modulus.as_ref().map(|m| m.to_string()),
                                "lhs_residue": lr,
                                "rhs_residue": rr,
                                "holds": v.holds(),
                                "in_domain": c.domain.contains(n),
                            })
                        }
                        Err(e) => json!({ "n": n, "error": e.to_string() }),
                    })
                    .collect()
            } else {
                let name = seq.expect("clap requires --seq without --claim");
                if reg.get(&name).is_none() {
                    return usage(format!("unknown sequence {name:?}"));
                }
                let terms = reg.terms(&name, lo, hi).context("evaluating terms")?;
                (lo..=hi)
                    .zip(terms)
                    .map(|(n, t)| json!({ "n": n, "value": t.to_string() }))
                    .collect()
            };
            emit(&Value::Array(rows), out)?;
            Ok(true)
        }
        Command::PaperSuite { timings } => {
            let report = suite::run(&reg, cli.jobs);
            suite::print_table(&report);
            emit(&suite::to_json(&report, timings), out)?;
            Ok(report.pass())
        }
    }
}

fn registry(extra: Option<&Path>) -> Result<SequenceRegistry> {
    let mut reg = SequenceRegistry::with_builtins();
    if let Some(path) = extra {
        let text = read_input(path)?;
        let sources: Vec<SequenceSource> = serde_json::from_str(&text)
            .map_err(|e| Usage(format!("{}: {e}", path.display())))?;
        for s in sources {
            if let SequenceSource::Recursive(d) = &s {
                d.validate().map_err(|e| Usage(format!("sequence {}: {e}", d.name)))?;
            }
            reg.insert(s);
        }
    }
    Ok(reg)
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())).into())
}

fn emit(v: &Value, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn parse_poly(s: &str) -> Result<Poly> {
    Poly::parse(s).map_err(|e| Usage(format!("polynomial {s:?}: {e}")).into())
}

fn parse_range(s: &str) -> Result<(i64, i64)> {
    let (a, b) = match s.split_once("..") {
        Some(x) => x,
        None => return usage(format!("expected lo..hi, got {s:?}")),
    };
    let lo: i64 = a.trim().parse().map_err(|_| Usage(format!("bad range {s:?}")))?;
    let hi: i64 = b.trim().parse().map_err(|_| Usage(format!("bad range {s:?}")))?;
    if lo > hi {
        return usage(format!("empty range {s:?}"));
    }
    Ok((lo, hi))
}

fn parse_list(s: Option<&str>) -> Result<Vec<i64>> {
    let Some(s) = s else { return Ok(vec![]) };
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Usage(format!("bad integer {x:?} in {s:?}")).into())
        })
        .collect()
}

fn parse_window(s: &str) -> Result<ShiftWindow> {
    ShiftWindow::parse(s).map_err(|e| Usage(e).into())
}

fn order_of(reg: &SequenceRegistry, name: &str) -> Result<usize> {
    match reg.def(name) {
        Ok(d) => Ok(d.recurrence.order()),
        Err(e) => usage(e.to_string()),
    }
}

fn build_problem(reg: &SequenceRegistry, a: &ProblemArgs) -> Result<TelescopeProblem> {
    let order_a = order_of(reg, &a.seq)?;
    let seq_b = match a.seq_b.as_deref() {
        None => Some(a.seq.clone()),
        Some("1") => None,
        Some(b) => Some(b.to_string()),
    };
    let window_a = match &a.window {
        Some(w) => parse_window(w)?,
        None => ShiftWindow::trailing(order_a),
    };
    let window_b = match (&seq_b, &a.window_b) {
        (None, None) => ShiftWindow::new(0, 0),
        (None, Some(_)) => return usage("--window-b needs a second sequence"),
        (Some(_), Some(w)) => parse_window(w)?,
        (Some(b), None) if *b == a.seq => window_a,
        (Some(b), None) => ShiftWindow::trailing(order_of(reg, b)?),
    };
    let shifts = parse_list(a.target_shifts.as_deref())?;
    let target_shifts = match (shifts.as_slice(), &seq_b) {
        ([], _) => (0, 0),
        ([s], None) => (*s, 0),
        ([s, t], Some(_)) => (*s, *t),
        _ => return usage("--target-shifts takes one shift per sequence"),
    };
    for (name, w) in [(Some(&a.seq), window_a), (seq_b.as_ref(), window_b)] {
        if let Some(name) = name {
            let d = order_of(reg, name)?;
            if w.len() != d {
                return usage(format!("window {w} for {name} must have length {d}"));
            }
        }
    }
    Ok(TelescopeProblem {
        seq_a: a.seq.clone(),
        seq_b,
        window_a,
        window_b,
        target_shifts,
        merge_symmetric: !a.no_merge,
    })
}

fn load_claims(path: Option<&Path>) -> Result<Vec<CongruenceClaim>> {
    let Some(path) = path else {
        return Ok(builtin_claims());
    };
    let text = read_input(path)?;
    let v: Value =
        serde_json::from_str(&text).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    let parsed = if v.is_array() {
        serde_json::from_value(v)
    } else {
        serde_json::from_value(v).map(|c| vec![c])
    };
    parsed.map_err(|e| Usage(format!("{}: {e}", path.display())).into())
}

fn select_claims(all: Vec<CongruenceClaim>, ids: &[String]) -> Result<Vec<CongruenceClaim>> {
    if ids.is_empty() {
        return Ok(all);
    }
    ids.iter()
        .map(|id| {
            all.iter()
                .find(|c| &c.id == id)
                .cloned()
                .ok_or_else(|| anyhow!(Usage(format!("unknown claim {id:?}; see `rc verify --list`"))))
        })
        .collect()
}

fn restrict(domain: &mut Domain, primes_only: bool, extra: &[i64]) {
    if primes_only {
        if let Domain::Integers { from, exclude } = domain {
            *domain = Domain::Primes {
                min: *from,
                exclude: std::mem::take(exclude),
                parity: Parity::Any,
            };
        }
    }
    match domain {
        Domain::Integers { exclude, .. } | Domain::Primes { exclude, .. } => {
            exclude.extend_from_slice(extra)
        }
    }
}

fn report_json(r: &VerificationReport, timings: bool) -> Value {
    let mut v = serde_json::to_value(r).expect("report serializes");
    if !timings {
        if let Value::Object(m) = &mut v {
            m.remove("elapsed_ms");
        }
    }
    v
}

fn print_row(r: &VerificationReport) {
    eprintln!(
        "{:<32} {:<4} {:>5} points {:>7} ms{}",
        r.claim,
        if r.pass { "PASS" } else { "FAIL" },
        r.checked,
        r.elapsed_ms,
        match r.failures.first() {
            Some(f) => format!("  first failure at n = {}: {}", f.point, f.reason),
            None => String::new(),
        }
    );
    for f in &r.flagged {
        eprintln!(
            "{:<32} note at n = {}: {} ({})",
            "",
            f.point,
            if f.holds { "holds" } else { "does not hold" },
            f.detail
        );
    }
}
