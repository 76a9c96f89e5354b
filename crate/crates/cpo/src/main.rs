use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::rc::Rc;

use clap::{Parser, ValueEnum};

use cpo::cpo::{Definition, Derivation, EngineConfig, Variant};
use cpo::parse::parse_problem;
use cpo::print::{print_compact, print_paper};
use cpo::system::{
    check_system, prepare, search_parameters, RuleOutcome, SearchLimits, SearchOutcome,
    SystemReport,
};
use cpo::typeorder::TypeOrderConfig;

/// Checks that a higher-order rewrite system is compatible with a
/// computability path ordering, and searches for orienting parameters.
#[derive(Parser)]
#[command(name = "cpo", version, about)]
struct Cli {
    /// Problem file to read
    file: PathBuf,

    /// Which form of the ordering to use: 1 is the basic form, 2 adds the
    /// accessibility cases
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    definition: u8,

    /// Ordering variant; the unsound ones reproduce known counterexamples
    #[arg(long, value_enum, default_value_t = VariantArg::Sound)]
    variant: VariantArg,

    /// Derivation output for oriented rules
    #[arg(long, value_enum, default_value_t = TraceArg::Off)]
    trace: TraceArg,

    /// Search precedences and statuses for a combination that orients every
    /// rule, honoring declared ones as constraints
    #[arg(long)]
    search: bool,

    /// Depth budget for the comparison search
    #[arg(long, default_value_t = 512)]
    max_depth: usize,

    /// Arrow-nesting rounds applied when closing the type universe
    #[arg(long, default_value_t = 1)]
    universe_depth: usize,

    /// Cap on the size of the closed type universe
    #[arg(long, default_value_t = 2048)]
    universe_max: usize,

    /// Cap on (precedence, status) candidates examined during search
    #[arg(long, default_value_t = 100_000)]
    max_candidates: usize,

    /// Validate the problem and its type order, then stop
    #[arg(long)]
    validate_only: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Sound,
    UnsoundStat,
    UnsoundAppabs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TraceArg {
    Off,
    Compact,
    Paper,
}

impl Cli {
    fn engine_config(&self) -> EngineConfig {
        EngineConfig {
            definition: match self.definition {
                1 => Definition::One,
                _ => Definition::Two,
            },
            variant: match self.variant {
                VariantArg::Sound => Variant::Sound,
                VariantArg::UnsoundStat => Variant::UnsoundStatX,
                VariantArg::UnsoundAppabs => Variant::UnsoundAppabsZ,
            },
            max_depth: self.max_depth,
        }
    }

    fn type_config(&self) -> TypeOrderConfig {
        TypeOrderConfig {
            arrow_rounds: self.universe_depth,
            max_universe: self.universe_max,
        }
    }
}

fn print_trace(trace: TraceArg, d: &Rc<Derivation>) {
    match trace {
        TraceArg::Off => {}
        TraceArg::Compact => print!("{}", print_compact(d)),
        TraceArg::Paper => print!("{}", print_paper(d)),
    }
}

fn report_rules(report: &SystemReport, trace: TraceArg) {
    for rule in &report.rules {
        match &rule.outcome {
            RuleOutcome::Oriented(d) => {
                println!("rule {}: oriented", rule.name);
                print_trace(trace, d);
            }
            RuleOutcome::NotOriented(frontier) => {
                println!("rule {}: not oriented", rule.name);
                for fg in frontier {
                    println!("  blocked: {}  [{}]", fg.goal, fg.reason);
                }
            }
            RuleOutcome::Truncated(frontier) => {
                println!("rule {}: truncated at the depth budget", rule.name);
                for fg in frontier {
                    println!("  blocked: {}  [{}]", fg.goal, fg.reason);
                }
            }
        }
    }
}

fn verdict_code(report: &SystemReport) -> u8 {
    if report.all_oriented() {
        0
    } else if report.any_truncated() {
        3
    } else {
        1
    }
}

fn run(cli: &Cli) -> Result<u8, String> {
    let src = fs::read_to_string(&cli.file)
        .map_err(|e| format!("{}: {e}", cli.file.display()))?;
    let sys = parse_problem(&src).map_err(|e| format!("{}: {e}", cli.file.display()))?;
    let cfg = cli.engine_config();
    let tcfg = cli.type_config();

    if cli.validate_only {
        let prepared =
            prepare(&sys, cfg.definition, tcfg).map_err(|e| e.to_string())?;
        cpo::system::build_parameters(&sys).map_err(|e| e.to_string())?;
        println!(
            "validation: ok ({} rules, {} types in the universe)",
            sys.rules.len(),
            prepared.order.universe().len()
        );
        return Ok(0);
    }

    if cli.search {
        let limits = SearchLimits { max_candidates: cli.max_candidates };
        match search_parameters(&sys, cfg, tcfg, limits).map_err(|e| e.to_string())? {
            SearchOutcome::Found(w) => {
                println!("search: found parameters after {} candidate(s)", w.tried);
                let groups: Vec<String> =
                    w.blocks.iter().map(|b| b.join(" = ")).collect();
                println!("precedence (highest first): {}", groups.join(" > "));
                for (sym, st) in &w.status_decls {
                    let word = match st {
                        cpo::prec::Status::Mul => "mul",
                        cpo::prec::Status::Lex => "lex",
                    };
                    println!("status {sym} {word};");
                }
                report_rules(&w.report, cli.trace);
                Ok(0)
            }
            SearchOutcome::Exhausted { tried, capped } => {
                if capped {
                    println!(
                        "search: no orienting parameters in the first {tried} candidate(s), cap reached"
                    );
                } else {
                    println!("search: no orienting parameters among {tried} candidate(s)");
                }
                Ok(1)
            }
        }
    } else {
        let report = check_system(&sys, cfg, tcfg).map_err(|e| e.to_string())?;
        report_rules(&report, cli.trace);
        Ok(verdict_code(&report))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
