//! Command-line front end. Every subcommand writes CSV: a `#` header echoing
//! the invocation and the full parameter set, one row of column names, then
//! data rows. Computed floats carry 17 significant digits.
//!
//! Patterns are given as a decimal index (`102`), a bit string of length `M`
//! (`01100110`) or comma-separated bits (`0,1,1,0,0,1,1,0`). Labelings are a
//! name (`brgc`, `nbc`, `fbc`, `bsgc`, `ag`) or comma-separated pattern
//! indices listed from the most significant bit (`15,60,102`). SNR grids are
//! `start:step:stop` in dB with both ends included, or a single value.
//!
//! Usage errors exit with status 2; a failed `verify` exits with 1.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::analytic_ber::{a_phi, labeling_ber, labeling_coefficients, pattern_ber, DemodKind};
use crate::constellation::{
    all_patterns, make_pam, named_labeling, BitPattern, Labeling, LabelingName,
};
use crate::demod::{abd_decide, exact_llr, maxlog_llr, sd_decide, ChannelParams};
use crate::error::{Error, Result};
use crate::labeling_space::count_distinct_ber_labelings;
use crate::montecarlo::{simulate, Demodulator, SimConfig, SimTarget};
use crate::pattern_classes::enumerate_classes;
use crate::thresholds::{bd_thresholds, midpoint_thresholds};
use crate::verify;

#[derive(Debug, Parser)]
#[command(
    name = "pamber",
    version,
    about = "Bit-error rates of PAM constellations under SD, BD and ABD demodulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analytic BER curves of patterns or labelings
    Ber(BerArgs),
    /// Exact and max-log L-values with the resulting bit decisions
    Llr(LlrArgs),
    /// Exact-LLR decision thresholds against the midpoints
    Thresholds(ThresholdsArgs),
    /// Equivalence classes of bit patterns
    Classes(ClassesArgs),
    /// Distinct-BER classes of labelings
    Labelings(LabelingsArgs),
    /// Monte-Carlo BER estimates
    Simulate(SimulateArgs),
    /// Runs the built-in self-checks
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, PartialEq)]
struct Grid(Vec<f64>);

fn parse_grid(text: &str) -> std::result::Result<Grid, String> {
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    let (start, step, stop) = match parts[..] {
        [v] => (v, 1.0, v),
        [a, b, c] => (a, b, c),
        _ => return Err("expected `start:step:stop` or a single value".into()),
    };
    if !(start.is_finite() && step.is_finite() && stop.is_finite()) || step <= 0.0 || stop < start {
        return Err("need finite values, step > 0 and stop >= start".into());
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    // snap to 12 decimals so 0.1-style steps print cleanly
    Ok(Grid(
        (0..n)
            .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
            .collect(),
    ))
}

#[derive(Debug, Args)]
struct OutArg {
    /// Write CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BerArgs {
    /// Constellation size
    #[arg(long = "M", default_value_t = 8)]
    m: usize,
    /// Pattern to evaluate (repeatable)
    #[arg(long)]
    pattern: Vec<String>,
    /// Labeling to evaluate (repeatable); default `brgc` when nothing is given
    #[arg(long)]
    labeling: Vec<String>,
    /// Every weight-M/2 pattern
    #[arg(long)]
    all_patterns: bool,
    /// One witness per distinct-BER labeling class (M <= 8)
    #[arg(long)]
    all_labelings: bool,
    /// SNR grid in dB
    #[arg(long, default_value = "0:1:20", value_parser = parse_grid, allow_hyphen_values = true)]
    snr: Grid,
    #[arg(long, default_value = "abd", value_parser = parse_demod)]
    demod: Demodulator,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Args)]
struct LlrArgs {
    #[arg(long = "M", default_value_t = 4)]
    m: usize,
    #[arg(long, default_value = "brgc")]
    labeling: String,
    #[arg(long, default_value = "0:5:10", value_parser = parse_grid, allow_hyphen_values = true)]
    snr: Grid,
    /// Observation grid
    #[arg(long, default_value = "-1.5:0.05:1.5", value_parser = parse_grid, allow_hyphen_values = true)]
    y: Grid,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Args)]
struct ThresholdsArgs {
    #[arg(long = "M", default_value_t = 8)]
    m: usize,
    /// Patterns (repeatable); default 15, 60 and 102
    #[arg(long)]
    pattern: Vec<String>,
    #[arg(long, default_value = "0:1:30", value_parser = parse_grid, allow_hyphen_values = true)]
    snr: Grid,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Args)]
struct ClassesArgs {
    #[arg(long = "M", default_value_t = 8)]
    m: usize,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Args)]
struct LabelingsArgs {
    #[arg(long = "M", default_value_t = 8)]
    m: usize,
    /// Only the classes of the named labelings
    #[arg(long)]
    named: bool,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long = "M", default_value_t = 8)]
    m: usize,
    /// Simulate a single bit with this pattern instead of a labeling
    #[arg(long, conflicts_with = "labeling")]
    pattern: Option<String>,
    #[arg(long, default_value = "brgc")]
    labeling: String,
    #[arg(long, default_value = "0:5:10", value_parser = parse_grid, allow_hyphen_values = true)]
    snr: Grid,
    #[arg(long, default_value = "abd", value_parser = parse_demod)]
    demod: Demodulator,
    /// Symbols per SNR point
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    out: OutArg,
}

fn parse_demod(text: &str) -> std::result::Result<Demodulator, String> {
    text.parse().map_err(|e: Error| e.to_string())
}

fn parse_labeling(size: usize, text: &str) -> Result<(String, Labeling)> {
    if let Ok(name) = text.parse::<LabelingName>() {
        return Ok((name.as_str().to_string(), named_labeling(name, size)?));
    }
    let indices = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::UnknownLabeling(text.to_string()))
        })
        .collect::<Result<Vec<u64>>>()?;
    let l = Labeling::from_pattern_indices(size, &indices)?;
    Ok((join(&indices), l))
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn sci(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.16e}")
    }
}

fn demod_kind(d: Demodulator) -> DemodKind {
    match d {
        Demodulator::Bd => DemodKind::BdNumeric,
        Demodulator::Sd | Demodulator::Abd => DemodKind::AbdMidpoints,
    }
}

/// BD thresholds can vanish at low SNR; such points are reported as `nan`.
fn or_nan(r: Result<f64>) -> Result<f64> {
    match r {
        Err(Error::NoSignChange { .. }) => Ok(f64::NAN),
        other => other,
    }
}

fn header(argv: &[String], params: &dyn std::fmt::Debug, columns: &str) -> String {
    format!(
        "# pamber {}\n# command: {}\n# params: {params:?}\n{columns}\n",
        env!("CARGO_PKG_VERSION"),
        argv.join(" ")
    )
}

enum Target {
    Pattern(BitPattern),
    Labeling(Labeling),
}

fn ber_csv(args: &BerArgs, argv: &[String]) -> Result<String> {
    let c = make_pam(args.m)?;
    let mut targets: Vec<(String, Target)> = Vec::new();
    for p in &args.pattern {
        let p = BitPattern::parse(args.m, p)?;
        targets.push((format!("pattern {}", p.index()), Target::Pattern(p)));
    }
    if args.all_patterns {
        for p in all_patterns(args.m)? {
            targets.push((format!("pattern {}", p.index()), Target::Pattern(p)));
        }
    }
    for l in &args.labeling {
        let (name, l) = parse_labeling(args.m, l)?;
        targets.push((format!("labeling {name}"), Target::Labeling(l)));
    }
    if args.all_labelings {
        for class in count_distinct_ber_labelings(args.m)?.1 {
            let w: Vec<u64> = class
                .witness
                .columns()
                .iter()
                .map(BitPattern::index)
                .collect();
            targets.push((
                format!("labeling {}", join(&w)),
                Target::Labeling(class.witness),
            ));
        }
    }
    if targets.is_empty() {
        targets.push((
            format!("labeling {}", LabelingName::Brgc),
            Target::Labeling(named_labeling(LabelingName::Brgc, args.m)?),
        ));
    }
    let kind = demod_kind(args.demod);
    let mut s = header(argv, args, "snr_db,target,demod,ber");
    for (name, t) in &targets {
        for &db in &args.snr.0 {
            let params = ChannelParams::from_db(db)?;
            let v = match t {
                Target::Pattern(p) => or_nan(pattern_ber(p, &c, params, kind))?,
                Target::Labeling(l) => or_nan(labeling_ber(l, &c, params, kind))?,
            };
            writeln!(s, "{db},{name},{},{}", args.demod, sci(v)).unwrap();
        }
    }
    Ok(s)
}

fn llr_csv(args: &LlrArgs, argv: &[String]) -> Result<String> {
    let c = make_pam(args.m)?;
    let (_, l) = parse_labeling(args.m, &args.labeling)?;
    let mut s = header(argv, args, "snr_db,y,j,exact,maxlog,bd_bit,abd_bit,sd_bit");
    for &db in &args.snr.0 {
        let params = ChannelParams::from_db(db)?;
        for &y in &args.y.0 {
            let exact = exact_llr(y, &l, &c, params);
            let maxlog = maxlog_llr(y, &l, &c, params);
            let bd = abd_decide(&exact);
            let abd = abd_decide(&maxlog);
            let sd = sd_decide(y, &l, &c);
            for j in 0..l.bits_per_symbol() {
                writeln!(
                    s,
                    "{db},{y},{j},{},{},{},{},{}",
                    sci(exact.values[j]),
                    sci(maxlog.values[j]),
                    bd[j],
                    abd[j],
                    sd[j]
                )
                .unwrap();
            }
        }
    }
    Ok(s)
}

fn thresholds_csv(args: &ThresholdsArgs, argv: &[String]) -> Result<String> {
    let c = make_pam(args.m)?;
    let patterns: Vec<BitPattern> = if args.pattern.is_empty() {
        [15, 60, 102]
            .iter()
            .map(|&w| BitPattern::from_index(args.m, w))
            .collect::<Result<_>>()?
    } else {
        args.pattern
            .iter()
            .map(|p| BitPattern::parse(args.m, p))
            .collect::<Result<_>>()?
    };
    let mid = midpoint_thresholds(&c);
    let mut s = header(argv, args, "snr_db,pattern,k,beta_k,midpoint");
    for p in &patterns {
        for &db in &args.snr.0 {
            let params = ChannelParams::from_db(db)?;
            let found = match bd_thresholds(p, &c, params) {
                Ok(t) => Some(t),
                Err(Error::NoSignChange { .. }) => None,
                Err(e) => return Err(e),
            };
            // thresholds are numbered from 1, as beta_1 .. beta_{M-1}
            for k in (0..args.m - 1).filter(|&k| p.bit(k) != p.bit(k + 1)) {
                let beta = found.as_ref().map_or(f64::NAN, |t| t.betas[k]);
                writeln!(
                    s,
                    "{db},{},{},{},{}",
                    p.index(),
                    k + 1,
                    sci(beta),
                    sci(mid.betas[k])
                )
                .unwrap();
            }
        }
    }
    Ok(s)
}

fn classes_csv(args: &ClassesArgs, argv: &[String]) -> Result<String> {
    let mut s = header(
        argv,
        args,
        "rank,representative_w,representative,members,symmetry,a",
    );
    for (rank, class) in enumerate_classes(args.m)?.iter().enumerate() {
        writeln!(
            s,
            "{},{},{},{},{},{}",
            rank + 1,
            class.representative.index(),
            class.representative,
            join(&class.members),
            class.symmetry,
            join(&class.coefficients.entries)
        )
        .unwrap();
    }
    Ok(s)
}

fn labelings_csv(args: &LabelingsArgs, argv: &[String]) -> Result<String> {
    let (_, classes) = count_distinct_ber_labelings(args.m)?;
    let named: Vec<(LabelingName, Vec<i64>)> = LabelingName::ALL
        .iter()
        .filter_map(|&n| {
            named_labeling(n, args.m)
                .ok()
                .map(|l| (n, labeling_coefficients(&l).entries))
        })
        .collect();
    let mut s = header(argv, args, "rank,name,W,alpha,a_phi,population");
    for (rank, class) in classes.iter().enumerate() {
        let names: Vec<&str> = named
            .iter()
            .filter(|(_, a)| *a == class.alpha.entries)
            .map(|(n, _)| n.as_str())
            .collect();
        if args.named && names.is_empty() {
            continue;
        }
        let w: Vec<u64> = class
            .witness
            .columns()
            .iter()
            .map(BitPattern::index)
            .collect();
        writeln!(
            s,
            "{},{},{},{},{},{}",
            rank + 1,
            names.join("|"),
            join(&w),
            join(&class.alpha.entries),
            a_phi(&class.alpha),
            class.population
        )
        .unwrap();
    }
    Ok(s)
}

fn simulate_csv(args: &SimulateArgs, argv: &[String]) -> Result<String> {
    let c = make_pam(args.m)?;
    let target = match &args.pattern {
        Some(p) => SimTarget::Pattern(BitPattern::parse(args.m, p)?),
        None => SimTarget::Labeling(parse_labeling(args.m, &args.labeling)?.1),
    };
    let config = SimConfig {
        trials: args.trials,
        seed: args.seed,
        snr_db_grid: args.snr.0.clone(),
        demodulator: args.demod,
    };
    let estimates = simulate(&target, &c, &config)?;
    let kind = demod_kind(args.demod);
    let mut s = header(
        argv,
        args,
        "snr_db,demod,ber,stderr,trials,seed,bit_errors,bits_sent,analytic",
    );
    for e in &estimates {
        let params = ChannelParams::from_db(e.point.snr_db)?;
        let analytic = match &target {
            SimTarget::Pattern(p) => or_nan(pattern_ber(p, &c, params, kind))?,
            SimTarget::Labeling(l) => or_nan(labeling_ber(l, &c, params, kind))?,
        };
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            e.point.snr_db,
            args.demod,
            sci(e.point.value),
            sci(e.stderr),
            args.trials,
            args.seed,
            e.bit_errors,
            e.bits_sent,
            sci(analytic)
        )
        .unwrap();
    }
    Ok(s)
}

fn verify_csv(args: &VerifyArgs, argv: &[String]) -> (String, bool) {
    let results = verify::run_all();
    let mut s = header(argv, args, "check,status,detail");
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        writeln!(s, "{},{status},{}", r.name, r.detail.replace(',', ";")).unwrap();
    }
    (s, results.iter().all(|r| r.passed))
}

fn emit(out: &OutArg, text: &str) -> std::io::Result<()> {
    match &out.out {
        Some(path) => std::fs::write(path, text),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let echo: Vec<String> = std::iter::once("pamber".to_string())
        .chain(
            argv.iter()
                .skip(1)
                .map(|a| a.to_string_lossy().into_owned()),
        )
        .collect();

    let (result, out, verified) = match &cli.command {
        Command::Ber(a) => (ber_csv(a, &echo), &a.out, true),
        Command::Llr(a) => (llr_csv(a, &echo), &a.out, true),
        Command::Thresholds(a) => (thresholds_csv(a, &echo), &a.out, true),
        Command::Classes(a) => (classes_csv(a, &echo), &a.out, true),
        Command::Labelings(a) => (labelings_csv(a, &echo), &a.out, true),
        Command::Simulate(a) => (simulate_csv(a, &echo), &a.out, true),
        Command::Verify(a) => {
            let (text, ok) = verify_csv(a, &echo);
            (Ok(text), &a.out, ok)
        }
    };
    let text = match result {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if let Err(e) = emit(out, &text) {
        eprintln!("error: {e}");
        return 1;
    }
    if verified {
        0
    } else {
        eprintln!("verification failed");
        1
    }
}
