//! `cyclelift`: functional graphs of integer polynomials over `Z/mZ`, cycle
//! lifting along `Z/p^nZ`, and CRT checks.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cyclelift::crt::{check_crt_isomorphism_with_limits, lcm_cycle_check_with_limits};
use cyclelift::graph::{build_graph_with_limits, cycle_reached_from_with_limits};
use cyclelift::lifting::trials::{run_lift_trials, TrialConfig};
use cyclelift::lifting::{
    check_lift_laws, predict_lift, tower_with_limits, verify_lift_with_limits, LiftRecord,
};
use cyclelift::{
    make_modulus, multiplier, r_value, Cycle, Error, Limits, Modulus, PolyFunc, PrimePower,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "cyclelift",
    version,
    about = "Cycle structure of polynomial maps on Z/mZ and its lifts along Z/p^nZ"
)]
struct Cli {
    /// Vertex limit for enumerated graphs (overrides CYCLELIFT_MAX_VERTICES).
    #[arg(long, global = true)]
    max_vertices: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the functional graph G(f, Z/mZ).
    Graph {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Fill the vertices of each cycle in DOT output.
        #[arg(long)]
        color_cycles: bool,
    },
    /// List the cycles of G(f, Z/mZ), with lambda_bar and r when m is a prime power.
    Cycles {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Predict (and with --verify, observe) how cycles mod p^n lift to p^(n+1).
    Lift(LiftArgs),
    /// Follow every cycle through the levels p, p^2, ..., p^N.
    Tower {
        #[arg(long, allow_hyphen_values = true)]
        poly: PolyFunc,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        levels: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Check G(f, Z/mnZ) against the tensor product of G(f, Z/mZ) and G(f, Z/nZ).
    CrtCheck {
        #[arg(long, allow_hyphen_values = true)]
        poly: PolyFunc,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Args)]
struct Target {
    #[arg(long, allow_hyphen_values = true)]
    poly: PolyFunc,
    #[arg(long, conflicts_with_all = ["prime", "power"], required_unless_present = "prime")]
    m: Option<u64>,
    #[arg(long, requires = "power")]
    prime: Option<u64>,
    #[arg(long, requires = "prime")]
    power: Option<u32>,
}

impl Target {
    fn modulus(&self) -> Result<Modulus, Error> {
        match (self.m, self.prime, self.power) {
            (Some(m), _, _) => make_modulus(m),
            (None, Some(p), Some(n)) => Ok(PrimePower::new(p, n)?.modulus()),
            _ => unreachable!("clap enforces one modulus form"),
        }
    }
}

#[derive(Args)]
struct LiftArgs {
    #[arg(
        long,
        allow_hyphen_values = true,
        required_unless_present = "random_trials"
    )]
    poly: Option<PolyFunc>,
    #[arg(long, required_unless_present = "random_trials")]
    prime: Option<u64>,
    #[arg(long, required_unless_present = "random_trials")]
    power: Option<u32>,
    /// Only the cycle reached from this vertex.
    #[arg(long)]
    cycle_containing: Option<u64>,
    /// Enumerate the lifted graph and compare with the prediction.
    #[arg(long)]
    verify: bool,
    /// Run the randomized lift oracle instead, over this many random (f, p, n).
    #[arg(long, conflicts_with_all = ["poly", "prime", "power", "cycle_containing", "verify"])]
    random_trials: Option<usize>,
    #[arg(long, default_value_t = 0, requires = "random_trials")]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Dot,
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// What a command prints, and whether every verification it ran held.
struct Report {
    output: String,
    ok: bool,
    diagnostics: Vec<String>,
}

impl Report {
    fn ok(output: String) -> Self {
        Report {
            output,
            ok: true,
            diagnostics: Vec::new(),
        }
    }
}

fn render_json(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("JSON values always serialize")
}

fn no_dot(format: Format) -> Result<(), Failure> {
    if format == Format::Dot {
        return Err(Failure::Usage(
            "--format dot is only available for `graph`".into(),
        ));
    }
    Ok(())
}

fn graph(target: &Target, format: Format, color: bool, limits: &Limits) -> Result<Report, Failure> {
    let g = build_graph_with_limits(&target.poly, &target.modulus()?, limits)?;
    let output = match format {
        Format::Dot => g.to_dot(color),
        Format::Json => render_json(&g.to_json()),
        Format::Text => {
            let mut out = format!(
                "G({}, Z/{}Z): {} cycles\n",
                target.poly,
                g.len(),
                g.cycles().len()
            );
            for v in 0..g.len() as u64 {
                let mark = if g.is_periodic(v) { " *" } else { "" };
                writeln!(out, "{v} -> {}{mark}", g.successor(v)).unwrap();
            }
            for c in g.cycles() {
                writeln!(out, "cycle of size {}: {:?}", c.size(), c.vertices()).unwrap();
            }
            out
        }
    };
    Ok(Report::ok(output))
}

fn cycle_row(f: &PolyFunc, level: Option<PrimePower>, c: &Cycle) -> Result<Value, Error> {
    let mut row = json!({ "v0": c.first(), "size": c.size(), "vertices": c.vertices() });
    if let Some(level) = level {
        let m = multiplier(f, level, c)?;
        let pred = predict_lift(f, level, c)?;
        let obj = row.as_object_mut().unwrap();
        obj.insert("lambda".into(), json!(m.lambda));
        obj.insert("lambda_bar".into(), json!(m.lambda_bar));
        obj.insert("order".into(), json!(m.order));
        obj.insert("r".into(), json!(r_value(f, level, c, c.first())?));
        obj.insert("case".into(), json!(pred.case));
    }
    Ok(row)
}

fn cycles(target: &Target, format: Format, limits: &Limits) -> Result<Report, Failure> {
    no_dot(format)?;
    let modulus = target.modulus()?;
    let g = build_graph_with_limits(&target.poly, &modulus, limits)?;
    let level = modulus.as_prime_power();
    let rows = g
        .cycles()
        .iter()
        .map(|c| cycle_row(&target.poly, level, c))
        .collect::<Result<Vec<_>, _>>()?;
    let output = match format {
        Format::Json => render_json(&json!({
            "poly": target.poly.to_json(),
            "modulus": modulus.value(),
            "cycles": rows,
        })),
        _ => {
            let mut out = format!(
                "G({}, Z/{}Z): {} cycles\n",
                target.poly,
                modulus.value(),
                rows.len()
            );
            let header = if level.is_some() {
                "v0\tsize\tlambda_bar\torder\tr\tcase"
            } else {
                "v0\tsize"
            };
            writeln!(out, "{header}").unwrap();
            for row in &rows {
                write!(out, "{}\t{}", row["v0"], row["size"]).unwrap();
                if level.is_some() {
                    let case = row["case"].as_str().unwrap_or_default();
                    let order = row["order"]
                        .as_u64()
                        .map_or("-".to_string(), |o| o.to_string());
                    write!(
                        out,
                        "\t{}\t{order}\t{}\t{case}",
                        row["lambda_bar"], row["r"]
                    )
                    .unwrap();
                }
                out.push('\n');
            }
            out
        }
    };
    Ok(Report::ok(output))
}

fn lift(args: &LiftArgs, limits: &Limits) -> Result<Report, Failure> {
    no_dot(args.format)?;
    if let Some(trials) = args.random_trials {
        return lift_trials(trials, args.seed, args.format, limits);
    }
    let (Some(f), Some(p), Some(n)) = (&args.poly, args.prime, args.power) else {
        unreachable!("clap requires --poly, --prime and --power without --random-trials")
    };
    let level = PrimePower::new(p, n)?;
    let cycles = match args.cycle_containing {
        Some(v) if v >= level.value() => {
            return Err(Error::Domain(format!(
                "vertex {v} is not below the modulus {}",
                level.value()
            ))
            .into())
        }
        Some(v) => vec![cycle_reached_from_with_limits(f, level.value(), v, limits)?],
        None => build_graph_with_limits(f, &level.modulus(), limits)?
            .cycles()
            .to_vec(),
    };

    let mut records = Vec::with_capacity(cycles.len());
    let mut diagnostics = Vec::new();
    for c in &cycles {
        if args.verify {
            let report = verify_lift_with_limits(f, level, c, limits)?;
            diagnostics.extend(check_lift_laws(f, &report)?.iter().map(ToString::to_string));
            records.push(LiftRecord::from(&report));
        } else {
            records.push(LiftRecord::predicted_only(
                level,
                c,
                &predict_lift(f, level, c)?,
            ));
        }
    }
    let ok = diagnostics.is_empty() && records.iter().all(|r| r.matched != Some(false));

    let output = match args.format {
        Format::Json if args.cycle_containing.is_some() => {
            render_json(&serde_json::to_value(&records[0]).unwrap())
        }
        Format::Json => render_json(&serde_json::to_value(&records).unwrap()),
        _ => {
            let mut out = format!(
                "lifts of G({f}, Z/{}Z) to Z/{}Z\n",
                level.value(),
                level.value() * p
            );
            writeln!(
                out,
                "v0\tsize\tcase\tlambda_bar\tr\tpredicted\tobserved\tmatch"
            )
            .unwrap();
            for r in &records {
                let observed = r
                    .observed
                    .as_ref()
                    .map_or("-".to_string(), ToString::to_string);
                let matched = r.matched.map_or("-".to_string(), |m| m.to_string());
                let rv = r.r.map_or("-".to_string(), |r| r.to_string());
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{rv}\t{}\t{observed}\t{matched}",
                    r.cycle[0],
                    r.cycle.len(),
                    r.case,
                    r.lambda_bar,
                    r.predicted
                )
                .unwrap();
            }
            out
        }
    };
    Ok(Report {
        output,
        ok,
        diagnostics,
    })
}

fn lift_trials(
    trials: usize,
    seed: u64,
    format: Format,
    limits: &Limits,
) -> Result<Report, Failure> {
    let config = TrialConfig {
        trials,
        limits: *limits,
        ..TrialConfig::lift(seed)
    };
    let summary = run_lift_trials(&config)?;
    let diagnostics = summary
        .failures
        .iter()
        .map(|t| {
            format!(
                "failed: f = {}, p = {}, n = {}: {} mismatches, {} law violations",
                t.poly,
                t.prime,
                t.power,
                t.mismatches,
                t.violations.len()
            )
        })
        .collect();
    let output = match format {
        Format::Json => render_json(&serde_json::to_value(&summary).unwrap()),
        _ => format!(
            "seed {}: {} trials, {} passed, {} failed ({} cycles, {} mismatches, {} law violations)\n",
            summary.seed,
            summary.trials,
            summary.passed,
            summary.failed,
            summary.cycles_checked,
            summary.mismatches,
            summary.violations
        ),
    };
    Ok(Report {
        output,
        ok: summary.all_passed(),
        diagnostics,
    })
}

fn tower(
    f: &PolyFunc,
    p: u64,
    levels: u32,
    format: Format,
    limits: &Limits,
) -> Result<Report, Failure> {
    no_dot(format)?;
    let report = tower_with_limits(f, p, levels, limits)?;
    let output = match format {
        Format::Json => render_json(&serde_json::to_value(&report).unwrap()),
        _ => {
            let mut out = format!("tower of {f} over p = {p}, levels 1..{levels}\n");
            if report.edge_regime {
                out.push_str("edge regime: r persistence is not guaranteed\n");
            }
            for level in &report.levels {
                writeln!(
                    out,
                    "level {} (Z/{}Z): {} cycles",
                    level.level,
                    level.modulus,
                    level.cycles.len()
                )
                .unwrap();
                for c in &level.cycles {
                    let parent = c.parent.map_or("-".to_string(), |p| p.to_string());
                    writeln!(
                        out,
                        "  #{} v0={} size={} lambda_bar={} r={} parent={parent} case={}",
                        c.id, c.v0, c.size, c.lambda_bar, c.r, c.case
                    )
                    .unwrap();
                }
            }
            writeln!(out, "{} violations", report.violations.len()).unwrap();
            out
        }
    };
    let diagnostics = report.violations.iter().map(ToString::to_string).collect();
    Ok(Report {
        output,
        ok: report.is_consistent(),
        diagnostics,
    })
}

fn crt_check(
    f: &PolyFunc,
    m: u64,
    n: u64,
    format: Format,
    limits: &Limits,
) -> Result<Report, Failure> {
    no_dot(format)?;
    let isomorphic = check_crt_isomorphism_with_limits(f, m, n, limits)?;
    let rows = lcm_cycle_check_with_limits(f, m, n, limits)?;
    let mut diagnostics: Vec<String> = rows
        .iter()
        .filter(|r| !r.found)
        .map(|r| {
            format!(
                "no cycle of size {} = lcm({}, {}) mod {}",
                r.lcm,
                r.k,
                r.l,
                m * n
            )
        })
        .collect();
    if !isomorphic {
        diagnostics.insert(
            0,
            format!("G({f}, Z/{}Z) is not isomorphic to the product", m * n),
        );
    }
    let output = match format {
        Format::Json => render_json(&json!({
            "poly": f.to_json(),
            "m": m,
            "n": n,
            "isomorphic": isomorphic,
            "lcm": rows,
        })),
        _ => {
            let mut out = format!("isomorphic: {isomorphic}\nk\tl\tlcm\tfound\n");
            for r in &rows {
                writeln!(out, "{}\t{}\t{}\t{}", r.k, r.l, r.lcm, r.found).unwrap();
            }
            out
        }
    };
    Ok(Report {
        output,
        ok: diagnostics.is_empty(),
        diagnostics,
    })
}

fn run(cli: Cli) -> Result<Report, Failure> {
    let limits = match cli.max_vertices {
        Some(max) => Limits::new(max),
        None => Limits::from_env()?,
    };
    match cli.command {
        Command::Graph {
            target,
            format,
            color_cycles,
        } => graph(&target, format, color_cycles, &limits),
        Command::Cycles { target, format } => cycles(&target, format, &limits),
        Command::Lift(args) => lift(&args, &limits),
        Command::Tower {
            poly,
            prime,
            levels,
            format,
        } => tower(&poly, prime, levels, format, &limits),
        Command::CrtCheck { poly, m, n, format } => crt_check(&poly, m, n, format, &limits),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => {
            print!("{}", report.output);
            if !report.output.ends_with('\n') {
                println!();
            }
            for d in &report.diagnostics {
                eprintln!("{d}");
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
