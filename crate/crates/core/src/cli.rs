//! Command-line front end.

use crate::check::{check_tff_text, CheckOptions};
use crate::diag::{Diagnostic, Severity};
use crate::emit::EmitOptions;
use crate::kif::parse_kif_named;
use crate::pipeline::{TranslateOptions, Translation, Translator};
use crate::preprocess::ExclusionPolicy;
use crate::prover::{run_prover, ProverConfig, ProverError, SzsStatus, DEFAULT_TEMPLATE};
use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const PROVER_ENV: &str = "SUMO_TFF_PROVER";

const EXIT_CODES: &str = "Exit codes:
  translate  0 success, 1 error diagnostics, 2 unreadable or unparsable input
  check      0 well sorted, 1 sort errors or TFF syntax errors, 2 unreadable input
  prove      0 Theorem or Unsatisfiable, 1 any other SZS status, 2 unreadable input
             or translation errors, 3 prover not found, 4 prover timed out";

#[derive(Debug, Parser)]
#[command(name = "sumo-tff", version, about = "Translate SUO-KIF into TFF0 with native arithmetic", after_help = EXIT_CODES)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Translate KIF files into one TFF problem.
    Translate(TranslateArgs),
    /// Sort-check a TFF file.
    Check(CheckArgs),
    /// Translate KIF files (or take a TFF file) and run a prover on the result.
    Prove(ProveArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// key=value file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Also print notes.
    #[arg(short, long)]
    pub verbose: bool,
}

#[derive(Debug, Args)]
pub struct TranslateFlags {
    /// Numeric type to leave out of the translation; replaces the default list.
    #[arg(long = "exclude", value_name = "TYPE")]
    pub exclude: Vec<String>,
    /// Declare every numeric variant of each relation used.
    #[arg(long)]
    pub exhaustive_variants: bool,
    /// Map FloorFn and CeilingFn to $floor and $ceiling.
    #[arg(long)]
    pub builtin_floor_ceiling: bool,
    /// Worker threads (0 = one per core).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Unit names become kb_<NAME>_<n>.
    #[arg(long)]
    pub kb_name: Option<String>,
}

#[derive(Debug, Args)]
pub struct TranslateArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Output file (default: standard output).
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub flags: TranslateFlags,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub input: PathBuf,
    /// Treat undeclared symbols as errors.
    #[arg(long)]
    pub strict: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ProveArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// KIF file whose formulas become conjectures.
    #[arg(long)]
    pub query: Option<PathBuf>,
    /// Prover executable (default: $SUMO_TFF_PROVER, then `vampire`).
    #[arg(long)]
    pub prover: Option<String>,
    /// Prover arguments; {timeout} and {file} are substituted.
    #[arg(long)]
    pub prover_args: Option<String>,
    /// Seconds.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub timeout: Option<u64>,
    /// Keep the generated problem here.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// Print the prover output.
    #[arg(long)]
    pub show_output: bool,
    #[command(flatten)]
    pub flags: TranslateFlags,
    #[command(flatten)]
    pub common: Common,
}

/// Plain `key = value` lines; `#` starts a comment.
#[derive(Debug, Default, Clone)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, String> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            values.insert(k.trim().replace('_', "-"), v.trim().to_string());
        }
        Ok(Config { values })
    }

    fn load(path: Option<&Path>) -> Result<Config, String> {
        match path {
            None => Ok(Config::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
                Config::parse(&text).map_err(|e| format!("{}: {e}", p.display()))
            }
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn flag(&self, key: &str) -> Result<bool, String> {
        match self.get(key) {
            None => Ok(false),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => Err(format!("{key}: expected a boolean, got {v}")),
        }
    }

    fn number<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, String> {
        self.get(key).map(|v| v.parse().map_err(|_| format!("{key}: expected a number, got {v}"))).transpose()
    }
}

fn translate_options(flags: &TranslateFlags, cfg: &Config) -> Result<TranslateOptions, String> {
    let mut opts = TranslateOptions::default();
    if !flags.exclude.is_empty() {
        opts.exclusion = ExclusionPolicy::with_types(flags.exclude.iter().cloned());
    } else if let Some(list) = cfg.get("exclude") {
        opts.exclusion = ExclusionPolicy::with_types(list.split(',').map(str::trim).filter(|s| !s.is_empty()));
    }
    opts.exhaustive_variants = flags.exhaustive_variants || cfg.flag("exhaustive-variants")?;
    opts.emit = EmitOptions { builtin_floor_ceiling: flags.builtin_floor_ceiling || cfg.flag("builtin-floor-ceiling")? };
    opts.jobs = match flags.jobs {
        Some(j) => j,
        None => cfg.number("jobs")?.unwrap_or(0),
    };
    if let Some(name) = flags.kb_name.clone().or_else(|| cfg.get("kb-name").map(String::from)) {
        opts.kb_name = name;
    }
    Ok(opts)
}

fn report(diags: &[Diagnostic], verbose: bool, err: &mut dyn Write) {
    for d in diags {
        if verbose || d.severity > Severity::Note {
            let _ = writeln!(err, "{d}");
        }
    }
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn run_translation(inputs: &[PathBuf], query: Option<&Path>, opts: TranslateOptions) -> Result<Translation, String> {
    let mut axioms = Vec::new();
    for p in inputs {
        let text = read(p)?;
        axioms.extend(parse_kif_named(&text, &p.display().to_string()).map_err(|e| format!("{}: {e}", p.display()))?);
    }
    let conjectures = match query {
        Some(q) => parse_kif_named(&read(q)?, &q.display().to_string()).map_err(|e| format!("{}: {e}", q.display()))?,
        None => Vec::new(),
    };
    let t = Translator::new(&axioms, opts).map_err(|e| e.to_string())?;
    Ok(t.translate_with_conjectures(&axioms, &conjectures))
}

fn write_output(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn cmd_translate(a: &TranslateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    let cfg = Config::load(a.common.config.as_deref())?;
    let opts = translate_options(&a.flags, &cfg)?;
    let t = run_translation(&a.inputs, None, opts)?;
    report(&t.diagnostics, a.common.verbose, err);
    let text = t.to_tff().map_err(|e| e.to_string())?;
    let target = a.out.clone().or_else(|| cfg.get("out").map(PathBuf::from));
    write_output(target.as_deref(), &text, out)?;
    let _ = writeln!(err, "{}", t.summary);
    Ok(i32::from(t.has_errors()))
}

fn cmd_check(a: &CheckArgs, err: &mut dyn Write) -> Result<i32, String> {
    let cfg = Config::load(a.common.config.as_deref())?;
    let text = read(&a.input)?;
    let opts = CheckOptions { strict: a.strict || cfg.flag("strict")?, file: a.input.display().to_string() };
    match check_tff_text(&text, &opts) {
        Err(e) => {
            let _ = writeln!(err, "{}:{}: error: {}", opts.file, e.line, e.message);
            Ok(1)
        }
        Ok(diags) => {
            report(&diags, a.common.verbose, err);
            let errors = diags.iter().filter(|d| d.is_error()).count();
            let _ = writeln!(err, "{errors} error(s), {} warning(s)", diags.iter().filter(|d| d.severity == Severity::Warning).count());
            Ok(i32::from(errors > 0))
        }
    }
}

fn cmd_prove(a: &ProveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    let cfg = Config::load(a.common.config.as_deref())?;
    let all_tff = a.inputs.iter().all(|p| p.extension().is_some_and(|e| e == "tff" || e == "p"));
    let problem = if all_tff && a.query.is_none() {
        let mut text = String::new();
        for p in &a.inputs {
            text.push_str(&read(p)?);
            text.push('\n');
        }
        text
    } else {
        let opts = translate_options(&a.flags, &cfg)?;
        let t = run_translation(&a.inputs, a.query.as_deref(), opts)?;
        report(&t.diagnostics, a.common.verbose, err);
        let _ = writeln!(err, "{}", t.summary);
        if t.has_errors() {
            return Err("translation produced errors".into());
        }
        t.to_tff().map_err(|e| e.to_string())?
    };

    let tmp;
    let file = match a.out.clone().or_else(|| cfg.get("out").map(PathBuf::from)) {
        Some(p) => {
            std::fs::write(&p, &problem).map_err(|e| format!("{}: {e}", p.display()))?;
            p
        }
        None => {
            tmp = tempfile::Builder::new().suffix(".tff").tempfile().map_err(|e| e.to_string())?;
            std::fs::write(tmp.path(), &problem).map_err(|e| e.to_string())?;
            tmp.path().to_path_buf()
        }
    };

    let exe = a
        .prover
        .clone()
        .or_else(|| cfg.get("prover").map(String::from))
        .or_else(|| std::env::var(PROVER_ENV).ok().filter(|s| !s.is_empty()))
        .unwrap_or_else(|| "vampire".into());
    let timeout = match a.timeout {
        Some(t) => t,
        None => cfg.number("timeout")?.unwrap_or(300),
    };
    if timeout == 0 {
        return Err("timeout must be positive".into());
    }
    let template = a.prover_args.clone().or_else(|| cfg.get("prover-args").map(String::from)).unwrap_or_else(|| DEFAULT_TEMPLATE.into());
    let pc = ProverConfig { executable: exe, template, timeout };
    match run_prover(&pc, &file) {
        Err(ProverError::Missing(exe)) => {
            let _ = writeln!(err, "error: prover `{exe}` not found; pass --prover PATH or set {PROVER_ENV}");
            Ok(3)
        }
        Err(e) => Err(e.to_string()),
        Ok(r) => {
            if a.show_output {
                let _ = out.write_all(r.raw.as_bytes());
            }
            let _ = writeln!(out, "{}", r.status);
            let _ = writeln!(err, "prover time: {:.2}s, proof steps: {}", r.wall_time.as_secs_f64(), r.steps.len());
            Ok(match r.status {
                s if s.is_proof() => 0,
                SzsStatus::Timeout => 4,
                _ => 1,
            })
        }
    }
}

/// Run one parsed command; returns the process exit code.
pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let res = match &cli.command {
        Command::Translate(a) => cmd_translate(a, out, err),
        Command::Check(a) => cmd_check(a, err),
        Command::Prove(a) => cmd_prove(a, out, err),
    };
    res.unwrap_or_else(|e| {
        let _ = writeln!(err, "error: {e}");
        2
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let c = Config::parse("# comment\nexclude = ImaginaryNumber, ComplexNumber\nexhaustive_variants = yes\njobs=4\n").unwrap();
        assert_eq!(c.get("exhaustive-variants"), Some("yes"));
        assert!(c.flag("exhaustive-variants").unwrap());
        assert_eq!(c.number::<usize>("jobs").unwrap(), Some(4));
        assert!(Config::parse("novalue").is_err());
        assert!(c.flag("jobs").is_err());
    }

    #[test]
    fn flags_override_config() {
        let cli = Cli::parse_from(["sumo-tff", "translate", "a.kif", "--exclude", "BinaryNumber", "--jobs", "2"]);
        let Command::Translate(a) = cli.command else { panic!() };
        let cfg = Config::parse("exclude = ImaginaryNumber\njobs = 8\nkb-name = Test").unwrap();
        let o = translate_options(&a.flags, &cfg).unwrap();
        assert_eq!(o.exclusion.excluded_types.iter().collect::<Vec<_>>(), ["BinaryNumber"]);
        assert_eq!(o.jobs, 2);
        assert_eq!(o.kb_name, "Test");
    }
}
