//! Command-line front end: run verification suites, emit machine-readable
//! certificates or human-readable tables.
//!
//! Exit codes: 0 if everything verified, 1 if anything was refuted, 2 if
//! anything came back undetermined, 3 on usage or I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use sgcert_core::certified::{Expr, Outcome};
use sgcert_core::corollary::{self, CoverageError};
use sgcert_core::groups::{self, construct, GroupKind, GroupLimits};
use sgcert_core::lemmas;
use sgcert_core::report::{interval_json, verdict_json, Certificate};
use sgcert_core::sgbound;

#[derive(Parser)]
#[command(
    name = "sgcert",
    version,
    about = "Certified verification of the subgroup-count bound 7.3722 * r^(log2(r)/4 + 1.5315)",
    after_help = "Exit codes: 0 all verified, 1 any refuted, 2 any undetermined, 3 usage/IO error."
)]
struct Cli {
    /// Precision-escalation cap in bits.
    #[arg(long, global = true, default_value_t = 4096)]
    precision_cap: u32,

    /// Worker threads for the data-parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Output::Table)]
    output: Output,

    /// Subgroup-enumeration cap.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    cap: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Table,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Certify the constant enclosures: C(p), c(p), and the two tail sums.
    Constants,
    /// Verify one lemma (0..=6).
    Lemma {
        #[arg(long)]
        index: u8,
    },
    /// Run the exceptional-range sweep with coverage certification.
    Corollary {
        /// Sweep manifest file (defaults to the built-in ranges).
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Construct a group, enumerate its subgroups, and report.
    Group(GroupArgs),
    /// Everything: lemmas 0-6, the sweep, the scalar checks, the constants,
    /// and the group suite up to order 128.
    All {
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GroupArgs {
    /// One of: cyclic, dihedral, elementary-abelian, symmetric, alternating,
    /// quaternion8, dicyclic, product, from-file.
    #[arg(long)]
    kind: String,
    /// Order / degree parameter (cyclic, dihedral, symmetric, alternating,
    /// dicyclic).
    #[arg(long)]
    n: Option<usize>,
    /// Prime for elementary-abelian.
    #[arg(long)]
    p: Option<u64>,
    /// Exponent for elementary-abelian.
    #[arg(long)]
    k: Option<u32>,
    /// Cayley-table file for from-file.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Comma-separated factors for product, e.g.
    /// "cyclic:2,dihedral:8,elemab:3:2".
    #[arg(long)]
    factors: Option<String>,
    /// Also check the subgroup count against f(r), the chain bound, and
    /// the main bound.
    #[arg(long)]
    check_theorem: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprintln!("{e}");
            return ExitCode::from(3);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    configure_jobs(cli.jobs)?;
    let prec_cap = cli.precision_cap;
    let certs = match &cli.command {
        Command::Constants => constants_certs(prec_cap)?,
        Command::Lemma { index } => {
            vec![lemmas::verify_lemma(*index, prec_cap).map_err(|e| e.to_string())?]
        }
        Command::Corollary { manifest } => {
            let ranges = load_ranges(manifest.as_deref())?;
            vec![run_corollary(&ranges, prec_cap)?]
        }
        Command::Group(args) => group_certs(args, cli.cap, prec_cap)?,
        Command::All { manifest } => {
            let mut certs = Vec::new();
            for index in 0..=6u8 {
                certs.push(lemmas::verify_lemma(index, prec_cap).map_err(|e| e.to_string())?);
            }
            let ranges = load_ranges(manifest.as_deref())?;
            certs.push(run_corollary(&ranges, prec_cap)?);
            certs.extend(lemmas::section4_checks(prec_cap).map_err(|e| e.to_string())?);
            certs.extend(constants_certs(prec_cap)?);
            certs.push(
                groups::suite_certificate(128, cli.cap, prec_cap).map_err(|e| e.to_string())?,
            );
            certs
        }
    };
    emit(&certs, cli.output);
    let severity = certs.iter().map(|c| c.severity()).max().unwrap_or(0);
    Ok(severity as u8)
}

fn configure_jobs(jobs: Option<usize>) -> Result<(), String> {
    #[cfg(feature = "parallel")]
    if let Some(n) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| format!("cannot configure {n} worker threads: {e}"))?;
    }
    #[cfg(not(feature = "parallel"))]
    if jobs.is_some() {
        eprintln!("note: built without the `parallel` feature; --jobs is ignored");
    }
    Ok(())
}

fn load_ranges(path: Option<&std::path::Path>) -> Result<Vec<corollary::SweepRange>, String> {
    match path {
        None => Ok(corollary::default_ranges()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| format!("cannot read manifest {}: {e}", p.display()))?;
            corollary::parse_manifest(&text).map_err(|e| format!("{}: {e}", p.display()))
        }
    }
}

fn run_corollary(ranges: &[corollary::SweepRange], prec_cap: u32) -> Result<Certificate, String> {
    match corollary::verify_corollary1(ranges, prec_cap) {
        Ok(cert) => Ok(cert),
        Err(e @ (CoverageError::Incomplete { .. } | CoverageError::Missing { .. })) => {
            Err(e.to_string())
        }
        Err(CoverageError::Cert(e)) => Err(e.to_string()),
    }
}

fn constants_certs(prec_cap: u32) -> Result<Vec<Certificate>, String> {
    let mut certs = Vec::new();
    let tol = 1e-9;
    for p in [2u64, 3, 5, 7] {
        let t0 = std::time::Instant::now();
        let c = sgbound::euler_product_c(p, tol).map_err(|e| e.to_string())?;
        let mut cert = Certificate::new(format!("constants/C({p})"), Outcome::Verified, 96)
            .with_detail(json!({"interval": interval_json(&c.interval, 10)}));
        cert.elapsed_ms = t0.elapsed().as_millis() as u64;
        certs.push(cert);
    }
    for p in [2u64, 3] {
        let t0 = std::time::Instant::now();
        let c = sgbound::growth_constant_c(p, tol).map_err(|e| e.to_string())?;
        let mut cert = Certificate::new(format!("constants/c({p})"), Outcome::Verified, 96)
            .with_detail(json!({"interval": interval_json(&c.interval, 10)}));
        cert.elapsed_ms = t0.elapsed().as_millis() as u64;
        certs.push(cert);
    }
    {
        let t0 = std::time::Instant::now();
        let c2 = Expr::prod([Expr::ratio(2129, 1000), Expr::EulerC(2)]);
        let v = sgcert_core::certified::certified_compare(
            &c2,
            &Expr::ratio(73722, 10000),
            prec_cap,
        )
        .map_err(|e| e.to_string())?;
        let outcome = match v.outcome {
            Outcome::Verified | Outcome::Equal => Outcome::Verified,
            o => o,
        };
        let mut cert = Certificate::new("constants/c(2)<7.3722", outcome, v.prec_used)
            .with_detail(json!({"verdict": verdict_json(&v)}));
        cert.elapsed_ms = t0.elapsed().as_millis() as u64;
        certs.push(cert);
    }
    {
        let t0 = std::time::Instant::now();
        let theta = sgbound::theta_constants(prec_cap).map_err(|e| e.to_string())?;
        let items = [
            ("constants/theta-even<=2.129", &theta.even_verdict, Some(&theta.even_sum)),
            ("constants/theta-odd<=2.53175", &theta.odd_verdict, Some(&theta.odd_sum)),
            ("constants/theta-odd-even-reduction", &theta.odd_even_verdict, None),
        ];
        for (id, v, sum) in items {
            let outcome = match v.outcome {
                Outcome::Verified | Outcome::Equal => Outcome::Verified,
                o => o,
            };
            let detail = match sum {
                Some(s) => json!({"verdict": verdict_json(v), "sum": interval_json(s, 10)}),
                None => json!({"verdict": verdict_json(v)}),
            };
            let mut cert = Certificate::new(id, outcome, v.prec_used).with_detail(detail);
            cert.elapsed_ms = t0.elapsed().as_millis() as u64;
            certs.push(cert);
        }
    }
    Ok(certs)
}

fn parse_factor(atom: &str) -> Result<GroupKind, String> {
    let parts: Vec<&str> = atom.split(':').collect();
    let num = |i: usize| -> Result<usize, String> {
        parts
            .get(i)
            .ok_or_else(|| format!("factor {atom:?} is missing a parameter"))?
            .parse::<usize>()
            .map_err(|_| format!("factor {atom:?} has a non-numeric parameter"))
    };
    match parts[0] {
        "cyclic" => Ok(GroupKind::Cyclic(num(1)?)),
        "dihedral" => Ok(GroupKind::Dihedral(num(1)?)),
        "elemab" => Ok(GroupKind::ElementaryAbelian(num(1)? as u64, num(2)? as u32)),
        "symmetric" => Ok(GroupKind::Symmetric(num(1)? as u32)),
        "alternating" => Ok(GroupKind::Alternating(num(1)? as u32)),
        "quaternion8" => Ok(GroupKind::Quaternion8),
        "dicyclic" => Ok(GroupKind::Dicyclic(num(1)?)),
        other => Err(format!("unknown product factor kind {other:?}")),
    }
}

fn parse_kind(args: &GroupArgs) -> Result<GroupKind, String> {
    let need_n = || args.n.ok_or_else(|| format!("--kind {} requires --n", args.kind));
    match args.kind.as_str() {
        "cyclic" => Ok(GroupKind::Cyclic(need_n()?)),
        "dihedral" => Ok(GroupKind::Dihedral(need_n()?)),
        "elementary-abelian" => {
            let p = args.p.ok_or("--kind elementary-abelian requires --p")?;
            let k = args.k.ok_or("--kind elementary-abelian requires --k")?;
            Ok(GroupKind::ElementaryAbelian(p, k))
        }
        "symmetric" => Ok(GroupKind::Symmetric(need_n()? as u32)),
        "alternating" => Ok(GroupKind::Alternating(need_n()? as u32)),
        "quaternion8" => Ok(GroupKind::Quaternion8),
        "dicyclic" => Ok(GroupKind::Dicyclic(need_n()?)),
        "product" => {
            let spec = args
                .factors
                .as_deref()
                .ok_or("--kind product requires --factors \"kind:arg,kind:arg\"")?;
            let kinds: Result<Vec<GroupKind>, String> =
                spec.split(',').map(|a| parse_factor(a.trim())).collect();
            Ok(GroupKind::Product(kinds?))
        }
        "from-file" => {
            let file = args.file.clone().ok_or("--kind from-file requires --file")?;
            Ok(GroupKind::FromFile(file))
        }
        other => Err(format!(
            "unknown group kind {other:?} (expected cyclic, dihedral, elementary-abelian, \
             symmetric, alternating, quaternion8, dicyclic, product, or from-file)"
        )),
    }
}

fn group_certs(args: &GroupArgs, cap: usize, prec_cap: u32) -> Result<Vec<Certificate>, String> {
    let t0 = std::time::Instant::now();
    let kind = parse_kind(args)?;
    let limits = GroupLimits { max_subgroups: cap, ..GroupLimits::default() };
    let g = construct::make_group(&kind, &limits).map_err(|e| e.to_string())?;
    let enumeration = groups::enumerate_subgroups(&g, cap).map_err(|e| e.to_string())?;

    let mut sylow = Vec::new();
    let order = g.order() as u64;
    let mut q = 2u64;
    let mut rest = order;
    while rest > 1 {
        while rest % q != 0 && q * q <= order {
            q += 1;
        }
        let p = if rest % q == 0 { q } else { rest };
        let census = groups::sylow_census(&g, &enumeration.subgroups, p)
            .map_err(|e| e.to_string())?;
        sylow.push(json!({
            "p": p,
            "count": census.count,
            "sylow_order": census.sylow_order,
            "divides_bound_ok": census.divides_bound_ok,
            "congruence_ok": census.congruence_ok,
        }));
        while rest % p == 0 {
            rest /= p;
        }
    }

    let mut detail = json!({
        "group": g.name,
        "order": g.order(),
        "subgroup_count": enumeration.subgroups.len(),
        "enumeration_complete": enumeration.complete,
        "associativity": format!("{:?}", g.assoc_check),
        "sylow": sylow,
    });
    let mut outcome =
        if enumeration.complete { Outcome::Verified } else { Outcome::Undetermined };
    if args.check_theorem {
        let report =
            groups::check_theorem(&g, &enumeration, prec_cap).map_err(|e| e.to_string())?;
        detail["theorem"] = groups::theorem_report_json(&report);
        outcome = sgcert_core::report::combine_outcomes([outcome, report.outcome]);
    }
    let mut cert =
        Certificate::new(format!("group/{}", g.name), outcome, prec_cap).with_detail(detail);
    if !enumeration.complete {
        cert = cert.with_note(format!(
            "enumeration stopped at the cap of {cap} subgroups; counts are partial"
        ));
    }
    cert.elapsed_ms = t0.elapsed().as_millis() as u64;
    Ok(vec![cert])
}

fn emit(certs: &[Certificate], output: Output) {
    let mut sorted: Vec<&Certificate> = certs.iter().collect();
    sorted.sort_by(|a, b| a.claim_id.cmp(&b.claim_id));
    match output {
        Output::Json => {
            let values: Vec<serde_json::Value> =
                sorted.iter().map(|c| serde_json::to_value(c).expect("serializable")).collect();
            println!("{}", serde_json::to_string_pretty(&values).expect("serializable"));
        }
        Output::Table => {
            println!("{:<42} {:<12} {:>6} {:>9}", "CLAIM", "OUTCOME", "PREC", "ELAPSED");
            for c in sorted {
                println!(
                    "{:<42} {:<12} {:>6} {:>7}ms",
                    c.claim_id,
                    format!("{:?}", c.outcome).to_lowercase(),
                    c.prec_used,
                    c.elapsed_ms
                );
                if let Some(summary) = table_summary(c) {
                    println!("    {summary}");
                }
                for note in &c.notes {
                    println!("    note: {note}");
                }
            }
        }
    }
}

/// One compact, interval-faithful line for table mode.
fn table_summary(c: &Certificate) -> Option<String> {
    let d = &c.detail;
    if let Some(iv) = d.get("interval") {
        return Some(format!(
            "value in [{}, {}] (outward)",
            iv["lo"].as_str().unwrap_or("?"),
            iv["hi"].as_str().unwrap_or("?")
        ));
    }
    if let Some(sum) = d.get("sum") {
        return Some(format!(
            "sum in [{}, {}] (outward); {}",
            sum["lo"].as_str().unwrap_or("?"),
            sum["hi"].as_str().unwrap_or("?"),
            verdict_line(d.get("verdict")?)?,
        ));
    }
    if let Some(v) = d.get("verdict") {
        return verdict_line(v);
    }
    if let Some(n) = d.get("subgroup_count") {
        return Some(format!("order {}, {} subgroups", d["order"], n));
    }
    if let Some(n) = d.get("orders_checked") {
        let ratio = d
            .get("max_ratio")
            .and_then(|r| Some((r.get("lo")?.as_str()?, r.get("hi")?.as_str()?)));
        return match ratio {
            Some((lo, hi)) => Some(format!(
                "{n} orders checked; max f/B in [{lo}, {hi}] at r = {}",
                d["max_ratio_r"]
            )),
            None => Some(format!("{n} orders checked")),
        };
    }
    if let Some(ranges) = d.get("finite_ranges").and_then(|v| v.as_array()) {
        let parts: Vec<String> = ranges
            .iter()
            .map(|r| format!("p={}: max_m={}", r["p"], r["certified_max_m"]))
            .collect();
        return Some(parts.join(", "));
    }
    if let Some(sweep) = d.get("sweep") {
        return Some(format!(
            "{} orders swept, {} violations",
            sweep["orders_checked"],
            sweep["violations"].as_array().map_or(0, |v| v.len())
        ));
    }
    None
}

fn verdict_line(v: &serde_json::Value) -> Option<String> {
    Some(format!(
        "{}: lhs {} vs rhs {}",
        v["outcome"].as_str()?,
        v["lhs"].as_str().unwrap_or("-"),
        v["rhs"].as_str().unwrap_or("-")
    ))
}
