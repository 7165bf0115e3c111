use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use acms_core::catalog;
use acms_core::classify::{classify, CheckStatus, ClassificationReport};
use acms_core::cone::correspondence_suite;
use acms_core::dsl::{self, StructureFile};
use acms_core::report::{to_value, Report};
use acms_core::residual::{ResidualReport, TolerancePolicy};
use acms_core::sampling::SamplingPlan;
use acms_core::search::{self, dim3_remark_check, scan_family};
use acms_core::structure::axiom_residual;
use acms_core::Error;
use clap::{Args, Parser, Subcommand};

const EXIT_OK: u8 = 0;
const EXIT_SUITE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

/// Classify almost contact metric structures given in coordinates.
#[derive(Parser, Debug)]
#[command(name = "acms", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Args, Debug)]
struct Options {
    /// Sample points per structure
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Random tangent vectors per point
    #[arg(long, global = true)]
    vectors: Option<usize>,
    /// Seed for all sampling
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Residual below which a condition holds
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Residual above which a condition fails
    #[arg(long = "dead-band", global = true, default_value_t = 1e-3)]
    dead_band: f64,
    /// Write the JSON report to this path (`-` for standard output)
    #[arg(long, global = true)]
    json: Option<String>,
    /// Suppress the human-readable summary
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the almost contact metric axioms only
    Check { file: PathBuf },
    /// Full classification with identity and implication checks
    Classify { file: PathBuf },
    /// Identity and implication checks only
    Identities { file: PathBuf },
    /// Classify the product cone and compare with the base
    Cone { file: PathBuf },
    /// Scan a family declared with a [family] section
    Search { file: PathBuf },
    /// Built-in example structures and families
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    /// List catalog entries and built-in families
    List,
    /// Print an entry or family in the structure file format
    Export { name: String },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_INPUT };
        Failure { code, message: e.to_string() }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, message: message.into() }
}

impl Options {
    fn plan(&self) -> SamplingPlan {
        let d = SamplingPlan::default();
        SamplingPlan::new(self.points.unwrap_or(d.points), self.vectors.unwrap_or(d.vectors), self.seed.unwrap_or(d.seed))
    }

    fn policy(&self) -> Result<TolerancePolicy, Failure> {
        let ok = self.tol.is_finite() && self.tol > 0.0 && self.dead_band.is_finite() && self.dead_band >= self.tol;
        if !ok {
            return Err(input_error(format!(
                "need 0 < --tol <= --dead-band, got tol {} and dead band {}",
                self.tol, self.dead_band
            )));
        }
        Ok(TolerancePolicy { tol: self.tol, dead_band: self.dead_band })
    }

    fn json_to_stdout(&self) -> bool {
        self.json.as_deref() == Some("-")
    }
}

/// Human-readable output; goes to stderr when stdout carries JSON.
struct Console {
    quiet: bool,
    to_stderr: bool,
}

impl Console {
    fn line(&self, s: impl AsRef<str>) {
        if self.quiet {
            return;
        }
        if self.to_stderr {
            eprintln!("{}", s.as_ref());
        } else {
            println!("{}", s.as_ref());
        }
    }

    fn residual(&self, r: &ResidualReport) {
        self.line(format!("  {:<22} {:<13} {:.3e}", r.name, r.verdict.as_str(), r.residual));
    }

    fn check(&self, name: &str, status: CheckStatus, detail: &str) {
        self.line(format!("  {:<44} {:<13} {}", name, status.as_str(), detail).trim_end());
    }
}

fn read_file(path: &PathBuf) -> Result<StructureFile, Failure> {
    let text = fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    dsl::parse(&text).map_err(|e| input_error(format!("{}:{e}", path.display())))
}

fn write_json(opts: &Options, report: &Report) -> Result<(), Failure> {
    let Some(target) = &opts.json else { return Ok(()) };
    let text = report.to_json();
    if target == "-" {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| input_error(format!("stdout: {e}")))
    } else {
        fs::write(target, text).map_err(|e| input_error(format!("{target}: {e}")))
    }
}

/// Exit status for a classification: only suite failures are nonzero.
fn classification_status(r: &ClassificationReport) -> (u8, &'static str) {
    if r.failures().is_empty() {
        (EXIT_OK, "ok")
    } else {
        (EXIT_SUITE, "suite_failure")
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let opts = &cli.opts;
    let console = Console { quiet: opts.quiet, to_stderr: opts.json_to_stdout() };
    let policy = opts.policy()?;
    let plan = opts.plan();
    match &cli.command {
        Command::Check { file } => {
            let s = read_file(file)?.to_structure()?;
            let axioms = axiom_residual(&s, &plan, &policy)?;
            console.line(format!("{} (dimension {})", s.name, s.dim()));
            for c in &axioms.components {
                console.residual(c);
            }
            console.line(format!("Axioms: {}", axioms.max.verdict.as_str()));
            let mut report = Report::new("check", &s.name, &plan, &policy);
            report
                .section("axioms", &axioms)
                .section("verdicts", &serde_json::json!({ "Axioms": axioms.max.verdict.as_str() }))
                .status("ok");
            write_json(opts, &report)?;
            Ok(EXIT_OK)
        }
        Command::Classify { file } => {
            let s = read_file(file)?.to_structure()?;
            let r = classify(&s, &plan, &policy)?;
            let (code, status) = classification_status(&r);
            console.line(format!("{} (dimension {})", s.name, s.dim()));
            for c in &r.conditions {
                console.residual(c);
            }
            report_failures(&console, &r.failures());
            let mut report = Report::new("classify", &s.name, &plan, &policy);
            report.classification(&r).status(status);
            write_json(opts, &report)?;
            Ok(code)
        }
        Command::Identities { file } => {
            let s = read_file(file)?.to_structure()?;
            let r = classify(&s, &plan, &policy)?;
            let (code, status) = classification_status(&r);
            console.line(format!("{} identities", s.name));
            for c in &r.identities {
                console.check(&c.name, c.status, &format!("{:.3e} < {:.0e}", c.residual, c.threshold));
            }
            console.line(format!("{} implications", s.name));
            for c in &r.implications {
                console.check(&c.name, c.status, "");
            }
            report_failures(&console, &r.failures());
            let mut report = Report::new("identities", &s.name, &plan, &policy);
            report
                .section("axioms", &r.axioms)
                .section("identities", &r.identities)
                .section("implications", &r.implications)
                .status(status);
            write_json(opts, &report)?;
            Ok(code)
        }
        Command::Cone { file } => {
            let s = read_file(file)?.to_structure()?;
            let r = correspondence_suite(&s, &plan, &policy)?;
            let failures = r.failures();
            console.line(format!("cone over {}", s.name));
            for c in &r.classes {
                console.residual(c);
            }
            for c in &r.identities {
                console.check(&c.name, c.status, &format!("{:.3e}", c.residual));
            }
            for c in &r.correspondences {
                console.check(&c.name, c.status, "");
            }
            report_failures(&console, &failures);
            let mut report = Report::new("cone", &s.name, &plan, &policy);
            let sign = r.nijenhuis.sign();
            report
                .section("cone", &r)
                .section("nijenhuis_sign", &sign)
                .status(if failures.is_empty() { "ok" } else { "suite_failure" });
            write_json(opts, &report)?;
            Ok(if failures.is_empty() { EXIT_OK } else { EXIT_SUITE })
        }
        Command::Search { file } => {
            let mut f = read_file(file)?.to_family()?;
            if let Some(p) = opts.points {
                f.plan.points = p;
            }
            if let Some(v) = opts.vectors {
                f.plan.vectors = v;
            }
            if let Some(seed) = opts.seed {
                f.plan.seed = seed;
                if let search::ParamSampler::Random { seed: s, .. } = &mut f.sampler {
                    *s = seed;
                }
            }
            let outcome = scan_family(&f)?;
            let remark = if f.template.dim() == 3 { Some(dim3_remark_check(&f)?) } else { None };
            let remark_failed = remark.as_ref().is_some_and(|r| r.status == CheckStatus::Fail);
            console.line(format!("{}: {}", f.name, outcome.summary));
            for w in &outcome.witnesses {
                console.line(format!("  witness at {:?}: quasi {:.3e}, contact {:.3e}", w.params, w.confirmed_quasi, w.confirmed_contact));
            }
            if let Some(r) = &remark {
                console.check("dim3_quasi_contact_implies_contact", r.status, &format!("{} quasi contact samples", r.non_vacuous));
            }
            let status = if outcome.found() {
                "witness_found"
            } else if remark_failed {
                "suite_failure"
            } else {
                "ok"
            };
            let mut report = Report::new("search", &f.name, &f.plan, &policy);
            report
                .section("search", &outcome)
                .section("family", &serde_json::json!({ "params": to_value(&f.params), "sampler": to_value(&f.sampler) }))
                .section("note", "a null result does not settle whether quasi contact metric implies contact metric")
                .status(status);
            if let Some(r) = &remark {
                report.section("dim3_remark", r);
            }
            write_json(opts, &report)?;
            Ok(if status == "ok" { EXIT_OK } else { EXIT_SUITE })
        }
        Command::Catalog { action: CatalogAction::List } => {
            let entries = catalog::entries();
            let families = search::builtin_families();
            for e in &entries {
                console.line(format!("{:<30} {}", e.name, e.description));
            }
            for f in &families {
                console.line(format!("{:<30} family, {} parameter(s)", f.name, f.params.len()));
            }
            let mut report = Report::new("catalog", "", &plan, &policy);
            let list: Vec<_> = entries
                .iter()
                .map(|e| serde_json::json!({ "name": e.name, "description": e.description, "kind": "structure" }))
                .chain(families.iter().map(|f| serde_json::json!({ "name": f.name, "kind": "family" })))
                .collect();
            report.section("entries", &list).status("ok");
            write_json(opts, &report)?;
            Ok(EXIT_OK)
        }
        Command::Catalog { action: CatalogAction::Export { name } } => {
            let file = if let Some(e) = catalog::lookup(name) {
                StructureFile::from_structure(&e.structure)
            } else if let Some(f) = search::lookup_family(name) {
                StructureFile::from_family(&f)
            } else {
                return Err(input_error(format!("no catalog entry or family named `{name}`")));
            };
            print!("{}", file.to_text());
            Ok(EXIT_OK)
        }
    }
}

fn report_failures(console: &Console, failures: &[String]) {
    if !failures.is_empty() {
        console.line(format!("suite failures: {}", failures.join(", ")));
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("ACMS_THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().map_err(|_| input_error(format!("ACMS_THREADS must be a number, got `{raw}`")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| input_error(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = configure_threads().and_then(|_| run(&cli));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("acms: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use acms_core::classify::ConditionId;
    use acms_core::residual::Verdict;

    #[test]
    fn corrupted_report_is_a_suite_failure() {
        let e = catalog::lookup("darboux_3").unwrap();
        let policy = TolerancePolicy::default();
        let mut r = classify(&e.structure, &SamplingPlan::new(10, 2, 0), &policy).unwrap();
        assert_eq!(classification_status(&r), (EXIT_OK, "ok"));
        let i = ConditionId::ALL.iter().position(|c| *c == ConditionId::QuasiContactC1Prime).unwrap();
        r.conditions[i].residual = 0.5;
        r.conditions[i].verdict = Verdict::Fails;
        r.recheck_implications().unwrap();
        assert_eq!(classification_status(&r), (EXIT_SUITE, "suite_failure"));
    }

    #[test]
    fn flags_parse_with_defaults() {
        let cli = Cli::try_parse_from(["acms", "classify", "f.acms", "--seed", "7"]).unwrap();
        assert_eq!(cli.opts.plan().seed, 7);
        assert_eq!(cli.opts.plan().points, 100);
        assert_eq!(cli.opts.policy().unwrap(), TolerancePolicy::default());
        let bad = Cli::try_parse_from(["acms", "check", "f", "--tol", "1", "--dead-band", "0.1"]).unwrap();
        assert!(bad.opts.policy().is_err());
    }
}
