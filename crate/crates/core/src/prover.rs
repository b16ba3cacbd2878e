//! Running an external TFF prover and reading its SZS verdict.

use std::io::Read;
use std::path::Path;
use std::process::{Command, Stdio};
use std::sync::mpsc;
use std::time::{Duration, Instant};
use thiserror::Error;

pub const DEFAULT_TEMPLATE: &str = "--mode casc -t {timeout} {file}";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SzsStatus {
    Theorem,
    Unsatisfiable,
    Satisfiable,
    CounterSatisfiable,
    Timeout,
    GaveUp,
    Error,
}

impl SzsStatus {
    fn from_word(w: &str) -> SzsStatus {
        match w {
            "Theorem" | "THM" => SzsStatus::Theorem,
            "Unsatisfiable" | "UNS" | "ContradictoryAxioms" | "CAX" => SzsStatus::Unsatisfiable,
            "Satisfiable" | "SAT" => SzsStatus::Satisfiable,
            "CounterSatisfiable" | "CSA" => SzsStatus::CounterSatisfiable,
            "Timeout" | "TimeOut" | "TMO" => SzsStatus::Timeout,
            "GaveUp" | "GUP" | "ResourceOut" | "RSO" | "Unknown" | "UNK" | "Incomplete" | "INC" | "MemoryOut" | "MMO" => {
                SzsStatus::GaveUp
            }
            _ => SzsStatus::Error,
        }
    }

    /// A refutation was found.
    pub fn is_proof(self) -> bool {
        matches!(self, SzsStatus::Theorem | SzsStatus::Unsatisfiable)
    }
}

impl std::fmt::Display for SzsStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub label: String,
    pub rule: String,
    pub parents: Vec<String>,
    pub formula: String,
}

#[derive(Debug, Clone)]
pub struct ProverResult {
    pub status: SzsStatus,
    pub raw: String,
    pub wall_time: Duration,
    pub steps: Vec<ProofStep>,
}

#[derive(Debug, Error)]
pub enum ProverError {
    #[error("prover executable not found: {0}")]
    Missing(String),
    #[error("cannot run prover {exe}: {source}")]
    Io {
        exe: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone)]
pub struct ProverConfig {
    pub executable: String,
    /// Argument template; `{timeout}` and `{file}` are substituted. The file is appended when absent.
    pub template: String,
    pub timeout: u64,
}

impl ProverConfig {
    pub fn new(executable: impl Into<String>, timeout: u64) -> Self {
        ProverConfig { executable: executable.into(), template: DEFAULT_TEMPLATE.to_string(), timeout }
    }

    pub fn args(&self, file: &Path) -> Vec<String> {
        let file = file.display().to_string();
        let mut has_file = false;
        let mut args: Vec<String> = self
            .template
            .split_whitespace()
            .map(|a| {
                has_file |= a.contains("{file}");
                a.replace("{timeout}", &self.timeout.to_string()).replace("{file}", &file)
            })
            .collect();
        if !has_file {
            args.push(file);
        }
        args
    }
}

/// First `SZS status <word>` in the output; `None` when there is none.
pub fn parse_szs_status(output: &str) -> Option<SzsStatus> {
    output.lines().find_map(|line| {
        let at = line.find("SZS status")?;
        let word = line[at + "SZS status".len()..].split_whitespace().next()?;
        Some(SzsStatus::from_word(word.trim_end_matches([',', '.', ';'])))
    })
}

pub fn run_prover(cfg: &ProverConfig, file: &Path) -> Result<ProverResult, ProverError> {
    let start = Instant::now();
    let mut cmd = Command::new(&cfg.executable);
    cmd.args(cfg.args(file)).stdin(Stdio::null()).stdout(Stdio::piped()).stderr(Stdio::piped());
    #[cfg(unix)]
    {
        use std::os::unix::process::CommandExt;
        cmd.process_group(0);
    }
    let mut child = cmd.spawn().map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => ProverError::Missing(cfg.executable.clone()),
        _ => ProverError::Io { exe: cfg.executable.clone(), source: e },
    })?;

    let (tx, rx) = mpsc::channel();
    for mut pipe in [child.stdout.take().map(|p| Box::new(p) as Box<dyn Read + Send>), child.stderr.take().map(|p| Box::new(p) as Box<dyn Read + Send>)]
        .into_iter()
        .flatten()
    {
        let tx = tx.clone();
        std::thread::spawn(move || {
            let mut buf = Vec::new();
            let _ = pipe.read_to_end(&mut buf);
            let _ = tx.send(String::from_utf8_lossy(&buf).into_owned());
        });
    }
    drop(tx);

    let deadline = start + Duration::from_secs(cfg.timeout);
    let mut timed_out = false;
    loop {
        match child.try_wait() {
            Ok(Some(_)) => break,
            Ok(None) if Instant::now() >= deadline => {
                timed_out = true;
                kill_group(&mut child);
                break;
            }
            Ok(None) => std::thread::sleep(Duration::from_millis(10)),
            Err(e) => return Err(ProverError::Io { exe: cfg.executable.clone(), source: e }),
        }
    }

    let mut raw = String::new();
    let grace = Instant::now() + Duration::from_millis(500);
    for _ in 0..2 {
        match rx.recv_timeout(grace.saturating_duration_since(Instant::now())) {
            Ok(s) => raw.push_str(&s),
            Err(_) => break,
        }
    }

    let status = match parse_szs_status(&raw) {
        Some(s) => s,
        None if timed_out => SzsStatus::Timeout,
        None => SzsStatus::Error,
    };
    let steps = extract_refutation_steps(&raw);
    Ok(ProverResult { status, raw, wall_time: start.elapsed(), steps })
}

fn kill_group(child: &mut std::process::Child) {
    #[cfg(unix)]
    {
        let _ = Command::new("kill")
            .args(["-KILL", "--", &format!("-{}", child.id())])
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .status();
    }
    let _ = child.kill();
    let _ = child.wait();
}

/// Split `s` at top-level commas, respecting brackets and quotes.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start, mut quote) = (0i32, 0, None);
    for (i, c) in s.char_indices() {
        match (quote, c) {
            (Some(q), c) if c == q => quote = None,
            (Some(_), _) => {}
            (None, '\'' | '"') => quote = Some(c),
            (None, '(' | '[') => depth += 1,
            (None, ')' | ']') => depth -= 1,
            (None, ',') if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}

/// End index (exclusive) of the parenthesized group opening at `open`.
fn matching_paren(s: &str, open: usize) -> Option<usize> {
    let mut depth = 0i32;
    let mut quote = None;
    for (i, c) in s[open..].char_indices() {
        match (quote, c) {
            (Some(q), c) if c == q => quote = None,
            (Some(_), _) => {}
            (None, '\'' | '"') => quote = Some(c),
            (None, '(') => depth += 1,
            (None, ')') => {
                depth -= 1;
                if depth == 0 {
                    return Some(open + i + 1);
                }
            }
            _ => {}
        }
    }
    None
}

fn list_items(s: &str) -> Vec<String> {
    let s = s.trim();
    let inner = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')).unwrap_or("");
    split_top(inner).into_iter().filter(|x| !x.is_empty()).map(str::to_string).collect()
}

fn origin(source: &str) -> (String, Vec<String>) {
    let source = source.trim();
    let Some(open) = source.find('(') else { return (source.to_string(), Vec::new()) };
    let head = source[..open].trim();
    let inner = source[open + 1..].strip_suffix(')').unwrap_or(&source[open + 1..]);
    let parts = split_top(inner);
    match head {
        "inference" => {
            let parents = parts.get(2).map(|p| list_items(p)).unwrap_or_default();
            (parts.first().unwrap_or(&"").to_string(), parents)
        }
        "file" => {
            let name = parts.get(1).copied().unwrap_or("");
            (if name == "assert" { "assert" } else { "file" }.to_string(), Vec::new())
        }
        "introduced" => (parts.first().unwrap_or(&"introduced").to_string(), Vec::new()),
        other => (other.to_string(), Vec::new()),
    }
}

fn squash(s: &str) -> String {
    let mut s = s.trim();
    while s.starts_with('(') && matching_paren(s, 0) == Some(s.len()) {
        s = s[1..s.len() - 1].trim();
    }
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Proof units in output order, from TPTP-style `tff(...)`/`fof(...)`/`cnf(...)` lines
/// or Vampire's native `N. formula [rule parents]` lines.
pub fn extract_refutation_steps(output: &str) -> Vec<ProofStep> {
    let mut steps = Vec::new();
    let mut pos = 0;
    while pos < output.len() {
        let rest = &output[pos..];
        let Some(rel) = ["tff(", "fof(", "cnf(", "thf("].iter().filter_map(|k| rest.find(k)).min() else { break };
        let at = pos + rel;
        let preceded_ok = output[..at].chars().next_back().is_none_or(|c| !c.is_alphanumeric() && c != '_');
        let Some(end) = matching_paren(output, at + 3) else { break };
        pos = end;
        if !preceded_ok {
            pos = at + 4;
            continue;
        }
        let parts = split_top(&output[at + 4..end - 1]);
        if parts.len() < 3 || parts[1] == "type" {
            continue;
        }
        let (rule, parents) = parts.get(3).map(|s| origin(s)).unwrap_or_default();
        steps.push(ProofStep { label: parts[0].to_string(), rule, parents, formula: squash(parts[2]) });
    }
    if steps.is_empty() {
        steps = native_steps(output);
    }
    steps
}

fn native_steps(output: &str) -> Vec<ProofStep> {
    output
        .lines()
        .filter_map(|line| {
            let line = line.trim();
            let (num, rest) = line.split_once(". ")?;
            if num.is_empty() || !num.chars().all(|c| c.is_ascii_digit()) {
                return None;
            }
            let open = rest.rfind('[')?;
            let ann = rest[open + 1..].strip_suffix(']')?;
            let mut words = ann.split_whitespace();
            let rule = words.next()?.to_string();
            let parents = words.flat_map(|w| w.split(',')).filter(|p| !p.is_empty()).map(str::to_string).collect();
            Some(ProofStep { label: num.to_string(), rule, parents, formula: squash(&rest[..open]) })
        })
        .collect()
}
