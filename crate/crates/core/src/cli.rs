//! The `apportion` command line.
//!
//! Exit codes: 0 when the command succeeded and every checked property held,
//! 1 when a property failed, a fixture mismatched or a tie was refused, and
//! 2 on malformed input or usage.

use std::ffi::OsString;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::json;

use crate::arith;
use crate::divisor::verify_certificate;
use crate::error::{Error, Result};
use crate::fixtures;
use crate::io::InstanceFile;
use crate::method::Method;
use crate::model::{quotas, Instance, SeatAward, TiePolicy};
use crate::properties::{self, PCReport};
use crate::search::{search_pc_violations, SearchConfig, SearchMode};

#[derive(Debug, Parser)]
#[command(name = "apportion", version, about = "Exact apportionment methods and property audits")]
pub struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Per-seat log for seat-by-seat methods.
    #[arg(long, global = true)]
    pub trace: bool,
    /// larger-population-first, lower-index-first or fail-on-tie.
    #[arg(long, global = true, default_value = "larger-population-first")]
    pub tie: String,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apportion the seats of one house.
    Compute {
        method: String,
        file: PathBuf,
        #[arg(long)]
        house: Option<u64>,
    },
    /// Audit a method against one property on one instance.
    Check {
        property: Property,
        method: String,
        file: PathBuf,
        #[arg(long)]
        house: Option<u64>,
        /// Upper house size for `monotone`, and for `quota` over a range.
        #[arg(long)]
        max_house: Option<u64>,
        /// Population multipliers for `homogeneous`.
        #[arg(long, value_delimiter = ',', default_value = "2,3,10")]
        multipliers: Vec<u64>,
    },
    /// Look for proportional-consistency violations.
    Search {
        method: String,
        /// State count, `N` or `A..B`.
        #[arg(long, default_value = "5")]
        states: String,
        #[arg(long, default_value_t = 20_000)]
        max_pop: u64,
        #[arg(long, default_value_t = 1)]
        min_house: u64,
        #[arg(long, default_value_t = 60)]
        max_house: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Enumerate every primitive population vector instead of sampling.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        stop_after: Option<usize>,
    },
    /// Compare stored reference allocations with live results.
    Reproduce {
        #[arg(default_value = "all")]
        fixture: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Property {
    Pc,
    Quota,
    Monotone,
    Homogeneous,
    Weakprop,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(Error::Tie(report)) => {
            let _ = writeln!(err, "error: {report}");
            1
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let policy: TiePolicy = cli.tie.parse()?;
    match &cli.command {
        Command::Compute { method, file, house } => compute(cli, policy, method, file, *house, out),
        Command::Check {
            property,
            method,
            file,
            house,
            max_house,
            multipliers,
        } => {
            let method: Method = method.parse()?;
            let input = InstanceFile::load(file)?;
            let instance = input.instance()?;
            let house = house.or(input.house);
            let ctx = Ctx { cli, policy, instance: &instance };
            match property {
                Property::Pc => check_pc(&ctx, &method, need_house(house)?, out),
                Property::Quota => check_quota(&ctx, &method, house, *max_house, out),
                Property::Monotone => {
                    let top = max_house.or(house).ok_or_else(|| usage("--max-house or a house size is required"))?;
                    check_monotone(&ctx, &method, top, out)
                }
                Property::Homogeneous => check_homogeneous(&ctx, &method, need_house(house)?, multipliers, out),
                Property::Weakprop => check_weakprop(&ctx, &method, out),
            }
        }
        Command::Search {
            method,
            states,
            max_pop,
            min_house,
            max_house,
            seed,
            trials,
            exhaustive,
            stop_after,
        } => {
            let config = SearchConfig {
                method: method.parse()?,
                states: parse_states(states)?,
                max_pop: *max_pop,
                houses: *min_house..=*max_house,
                mode: if *exhaustive {
                    SearchMode::Exhaustive
                } else {
                    SearchMode::Random {
                        seed: *seed,
                        trials: *trials,
                    }
                },
                stop_after: *stop_after,
                policy,
            };
            search(cli, &config, out)
        }
        Command::Reproduce { fixture } => reproduce(cli, fixture, out),
    }
}

fn usage(msg: &str) -> Error {
    Error::InvalidConfig(msg.to_string())
}

fn need_house(house: Option<u64>) -> Result<u64> {
    house.ok_or_else(|| usage("no house size: pass --house or set \"house\" in the instance file"))
}

/// `N`, `A..B`, `A..=B` or `A-B`.
pub fn parse_states(s: &str) -> Result<RangeInclusive<usize>> {
    let bad = || usage(&format!("bad state count {s:?}"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let range = if let Some((a, b)) = s.split_once("..=").or_else(|| s.split_once("..")) {
        num(a)?..=num(b)?
    } else if let Some((a, b)) = s.split_once('-') {
        num(a)?..=num(b)?
    } else {
        let n = num(s)?;
        n..=n
    };
    if range.is_empty() || *range.start() == 0 {
        return Err(bad());
    }
    Ok(range)
}

struct Ctx<'a> {
    cli: &'a Cli,
    policy: TiePolicy,
    instance: &'a Instance,
}

fn label(instance: &Instance, sorted: usize) -> String {
    let pos = instance.order()[sorted];
    match instance.names() {
        Some(names) => names[pos].clone(),
        None => (pos + 1).to_string(),
    }
}

fn labels(instance: &Instance, sorted: &[usize]) -> String {
    let parts: Vec<String> = sorted.iter().map(|&i| label(instance, i)).collect();
    format!("{{{}}}", parts.join(", "))
}

fn vector(v: &[u64]) -> String {
    let parts: Vec<String> = v.iter().map(u64::to_string).collect();
    format!("({})", parts.join(", "))
}

fn json_line(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn json_pretty(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

/// A seat award with state indices moved to input positions.
#[derive(Serialize)]
struct TraceStep {
    house: u64,
    state: usize,
    tied: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    upper_ok: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha_bound: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha_tilde: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lower_ok: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eligible: Option<Vec<usize>>,
}

fn trace_step(instance: &Instance, award: &SeatAward) -> TraceStep {
    let to_input = |set: &[usize]| -> Vec<usize> {
        let mut v: Vec<usize> = set.iter().map(|&i| instance.order()[i]).collect();
        v.sort_unstable();
        v
    };
    let sets = award.eligibility.as_ref();
    TraceStep {
        house: award.house,
        state: instance.order()[award.state],
        tied: award.tied,
        upper_ok: sets.map(|s| to_input(&s.upper_ok)),
        alpha_bound: sets.and_then(|s| s.alpha_bound),
        alpha_tilde: sets.and_then(|s| s.alpha_tilde),
        lower_ok: sets.map(|s| to_input(&s.lower_ok)),
        eligible: sets.map(|s| to_input(&s.eligible)),
    }
}

fn compute(
    cli: &Cli,
    policy: TiePolicy,
    method: &str,
    file: &PathBuf,
    house: Option<u64>,
    out: &mut dyn Write,
) -> Result<i32> {
    let method: Method = method.parse()?;
    let input = InstanceFile::load(file)?;
    let instance = input.instance()?;
    let house = need_house(house.or(input.house))?;
    let shift = input.shift.clone().unwrap_or_default();
    let q = quotas(&instance, house, &shift)?;
    let h = method.apportion_traced(&instance, house, policy, cli.trace)?;
    let certificate = match &method {
        Method::Divisor(rule) => Some(verify_certificate(&instance, &h, rule)?),
        _ => None,
    };
    let seats = instance.input_order(h.seats());
    let quota_text: Vec<String> = instance.input_order(&q.values).iter().map(arith::format_fraction).collect();
    let pops = instance.input_order(instance.populations());
    let steps: Option<Vec<TraceStep>> = h
        .trace()
        .map(|t| t.iter().map(|a| trace_step(&instance, a)).collect());

    if cli.json {
        let mut doc = json!({
            "method": method.to_string(),
            "house": house,
            "shift": arith::format_fraction(&shift),
            "populations": pops.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "quotas": quota_text,
            "seats": seats,
            "tie_flag": h.tie_flag(),
        });
        if let Some(names) = instance.names() {
            doc["names"] = json!(names);
        }
        if let Some(c) = &certificate {
            doc["certificate"] = json!({
                "lower": c.lower,
                "upper": c.upper,
                "witness": c.witness,
            });
        }
        if let Some(steps) = &steps {
            doc["trace"] = serde_json::to_value(steps)?;
        }
        json_pretty(out, &doc)?;
        return Ok(0);
    }

    writeln!(out, "method  {method}")?;
    writeln!(out, "house   {house}")?;
    if !shift.eq(&Default::default()) {
        writeln!(out, "shift   {}", arith::format_fraction(&shift))?;
    }
    writeln!(out, "{:<12} {:>14} {:>20} {:>6}", "state", "population", "quota", "seats")?;
    let by_input = instance.input_order(&(0..instance.len()).collect::<Vec<_>>());
    for (pos, &sorted) in by_input.iter().enumerate() {
        let exact = &quota_text[pos];
        let approx = q.values[sorted].to_f64().unwrap_or(f64::NAN);
        let quota = if exact.contains('/') {
            format!("{exact} ≈ {approx:.3}")
        } else {
            exact.clone()
        };
        writeln!(
            out,
            "{:<12} {:>14} {:>20} {:>6}",
            label(&instance, sorted),
            pops[pos],
            quota,
            seats[pos]
        )?;
    }
    writeln!(out, "seats   {}", vector(&seats))?;
    writeln!(out, "tie     {}", if h.tie_flag() { "yes (a tie-break decided the outcome)" } else { "no" })?;
    if let Some(c) = &certificate {
        writeln!(out, "divisor bounds  [{}, {}]", c.lower, c.upper)?;
        if let Some(w) = &c.witness {
            writeln!(out, "divisor         {w}")?;
        }
    }
    if let (Some(trace), Some(steps)) = (h.trace(), &steps) {
        for (award, step) in trace.iter().zip(steps) {
            write!(out, "seat {:>4} -> {}", step.house, label(&instance, award.state))?;
            if step.tied {
                write!(out, " (tie)")?;
            }
            if let Some(sets) = &award.eligibility {
                let tilde = sets.alpha_tilde.map_or("-".to_string(), |a| a.to_string());
                write!(
                    out,
                    "  U={} α̃={} L={} eligible={}",
                    labels(&instance, &sets.upper_ok),
                    tilde,
                    labels(&instance, &sets.lower_ok),
                    labels(&instance, &sets.eligible)
                )?;
            }
            writeln!(out)?;
        }
    }
    Ok(0)
}

fn print_report(ctx: &Ctx, report: &PCReport, out: &mut dyn Write) -> Result<()> {
    let inst = ctx.instance;
    writeln!(out, "method  {}", report.method)?;
    writeln!(out, "house   {}  seats {}", report.house, vector(&inst.input_order(report.base.seats())))?;
    if report.verdicts.is_empty() {
        writeln!(out, "no scale factor makes every seat count integral; nothing to check")?;
    }
    for v in &report.verdicts {
        writeln!(
            out,
            "λ={:<6} expected {:<30} actual {:<30} {}",
            v.lambda.to_string(),
            vector(&inst.input_order(&v.expected)),
            vector(&inst.input_order(v.actual.seats())),
            if v.pass { "ok" } else { "FAIL" }
        )?;
    }
    if report.tie_involved {
        writeln!(out, "note: a tie-break was involved; the verdict is advisory")?;
    }
    writeln!(out, "{}", if report.overall { "consistent" } else { "NOT consistent" })?;
    Ok(())
}

fn check_pc(ctx: &Ctx, method: &Method, house: u64, out: &mut dyn Write) -> Result<i32> {
    let report = properties::check_pc(method, ctx.instance, house, ctx.policy)?;
    if ctx.cli.json {
        json_pretty(out, &report)?;
    } else {
        print_report(ctx, &report, out)?;
    }
    Ok(if report.overall { 0 } else { 1 })
}

fn check_quota(
    ctx: &Ctx,
    method: &Method,
    house: Option<u64>,
    max_house: Option<u64>,
    out: &mut dyn Write,
) -> Result<i32> {
    let houses: Vec<u64> = match (house, max_house) {
        (_, Some(top)) => (0..=top).collect(),
        (Some(h), None) => vec![h],
        (None, None) => return Err(usage("no house size: pass --house or --max-house")),
    };
    let mut breach = None;
    for h in &houses {
        breach = properties::check_quota(method, ctx.instance, *h, ctx.policy)?;
        if breach.is_some() {
            break;
        }
    }
    let breach = breach.map(|mut b| {
        b.state = ctx.instance.order()[b.state];
        b
    });
    if ctx.cli.json {
        json_pretty(out, &json!({"property": "quota", "method": method.to_string(), "holds": breach.is_none(), "witness": breach}))?;
    } else {
        match &breach {
            None => writeln!(out, "{method} satisfies quota at {} house size(s)", houses.len())?,
            Some(b) => writeln!(
                out,
                "{method} breaks quota at H={}: state {} gets {} seats, quota bounds [{}, {}]",
                b.house,
                match ctx.instance.names() {
                    Some(n) => n[b.state].clone(),
                    None => (b.state + 1).to_string(),
                },
                b.seats,
                b.lower,
                b.upper
            )?,
        }
    }
    Ok(if breach.is_none() { 0 } else { 1 })
}

fn check_monotone(ctx: &Ctx, method: &Method, top: u64, out: &mut dyn Write) -> Result<i32> {
    let breach = properties::check_house_monotone(method, ctx.instance, top, ctx.policy)?;
    if ctx.cli.json {
        let witness = breach.map(|b| json!({"house": b.house, "state": ctx.instance.order()[b.state]}));
        json_pretty(out, &json!({"property": "monotone", "method": method.to_string(), "max_house": top, "holds": breach.is_none(), "witness": witness}))?;
    } else {
        match breach {
            None => writeln!(out, "{method} is house monotone for H = 0..={top}")?,
            Some(b) => writeln!(
                out,
                "{method} is not house monotone: state {} loses a seat going to H={}",
                label(ctx.instance, b.state),
                b.house
            )?,
        }
    }
    Ok(if breach.is_none() { 0 } else { 1 })
}

fn check_homogeneous(
    ctx: &Ctx,
    method: &Method,
    house: u64,
    multipliers: &[u64],
    out: &mut dyn Write,
) -> Result<i32> {
    if multipliers.contains(&0) {
        return Err(usage("multipliers must be positive"));
    }
    let failing = properties::check_homogeneity(method, ctx.instance, house, multipliers, ctx.policy)?;
    if ctx.cli.json {
        json_pretty(out, &json!({"property": "homogeneous", "method": method.to_string(), "house": house, "multipliers": multipliers, "holds": failing.is_none(), "witness": failing}))?;
    } else {
        match failing {
            None => writeln!(out, "{method} is homogeneous at H={house} for multipliers {multipliers:?}")?,
            Some(c) => writeln!(out, "{method} changes its allocation when populations are multiplied by {c}")?,
        }
    }
    Ok(if failing.is_none() { 0 } else { 1 })
}

fn check_weakprop(ctx: &Ctx, method: &Method, out: &mut dyn Write) -> Result<i32> {
    let quota: Option<Vec<u64>> = ctx
        .instance
        .input_order(ctx.instance.populations())
        .iter()
        .map(|v| v.to_u64())
        .collect();
    let quota = quota.ok_or_else(|| usage("populations too large to use as a quota vector"))?;
    let actual = properties::check_weak_proportionality(method, &quota, ctx.policy)?;
    if ctx.cli.json {
        json_pretty(out, &json!({"property": "weakprop", "method": method.to_string(), "quota": quota, "holds": actual.is_none(), "actual": actual}))?;
    } else {
        match &actual {
            None => writeln!(out, "{method} returns the integer quotas {}", vector(&quota))?,
            Some(a) => writeln!(out, "{method} returns {} for integer quotas {}", vector(a), vector(&quota))?,
        }
    }
    Ok(if actual.is_none() { 0 } else { 1 })
}

fn search(cli: &Cli, config: &SearchConfig, out: &mut dyn Write) -> Result<i32> {
    let outcome = search_pc_violations(config)?;
    for report in &outcome.violations {
        json_line(out, report)?;
    }
    let summary = json!({
        "summary": {
            "method": config.method.to_string(),
            "checked": outcome.checked,
            "vacuous": outcome.vacuous,
            "violations": outcome.violations.len(),
            "advisories": outcome.advisories.len(),
        }
    });
    if cli.json {
        json_line(out, &summary)?;
    } else {
        writeln!(
            out,
            "checked {} candidates ({} with no admissible scale factor): {} violation(s), {} tie-affected failure(s) set aside",
            outcome.checked,
            outcome.vacuous,
            outcome.violations.len(),
            outcome.advisories.len()
        )?;
    }
    Ok(if outcome.violations.is_empty() { 0 } else { 1 })
}

fn reproduce(cli: &Cli, which: &str, out: &mut dyn Write) -> Result<i32> {
    let selected = if which == "all" {
        fixtures::fixtures()?
    } else {
        vec![fixtures::fixture(which)?]
    };
    let mut rows = Vec::new();
    for fx in &selected {
        rows.extend(fixtures::reproduce(fx)?);
    }
    let all_pass = rows.iter().all(|r| r.pass);
    if cli.json {
        json_pretty(out, &rows)?;
    } else {
        writeln!(out, "{:<9} {:<38} {:<18} {:<30} {:<30} result", "fixture", "method", "check", "expected", "actual")?;
        for r in &rows {
            writeln!(
                out,
                "{:<9} {:<38} {:<18} {:<30} {:<30} {}",
                r.fixture,
                r.method,
                r.check,
                vector(&r.expected),
                vector(&r.actual),
                if r.pass { "PASS" } else { "FAIL" }
            )?;
        }
        let passed = rows.iter().filter(|r| r.pass).count();
        writeln!(out, "{passed}/{} checks passed", rows.len())?;
    }
    Ok(if all_pass { 0 } else { 1 })
}
