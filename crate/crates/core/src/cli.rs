//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::padic::{valuation, Prime};
use crate::poly::Polynomial;
use crate::render::{render_ascii, render_dot, render_json, render_truncated_json};
use crate::scalar::Scalar;
use crate::sequences::{
    period_report, stirling_tree, valuation_grid, EmpiricalStatus, DEFAULT_WITNESSES,
};
use crate::tree::{
    brute_force_classify, classify_star, closed_form, node_label, LabelRule, NodeLabel,
    ResidueClass, SplitAnalysis, TreeBuilder, TreeNode, DEFAULT_DEPTH, DEFAULT_NODE_BUDGET,
};
use crate::verify;

#[derive(Debug, Parser)]
#[command(
    name = "valtree",
    version,
    about = "p-adic valuation trees of integer polynomials"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Ascii,
    Dot,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rule {
    Modular,
    Constant,
}

impl From<Rule> for LabelRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Modular => LabelRule::Modular,
            Rule::Constant => LabelRule::Constant,
        }
    }
}

/// Coefficient arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IntKind {
    Big,
    I64,
    I128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Trichotomy,
    Eq4,
    Legendre,
    CentralBinomial,
    Stirling,
    N2plus7,
}

#[derive(Debug, Clone, clap::Args)]
pub struct TreeArgs {
    /// Polynomial in x and y, e.g. "x^2 + y^2 + x*y + 1".
    pub polynomial: String,
    #[arg(short = 'p', long = "prime")]
    pub p: u64,
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    pub depth: u32,
    /// 1 or 2; inferred from the presence of y by default.
    #[arg(long)]
    pub arity: Option<usize>,
    /// Terminal rule; `constant` for one variable and `modular` for two by default.
    #[arg(long, value_enum)]
    pub rule: Option<Rule>,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub budget: usize,
    #[arg(long, value_enum, default_value_t = IntKind::Big)]
    pub int: IntKind,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// p-adic valuation of an integer.
    Val {
        #[arg(allow_hyphen_values = true)]
        n: String,
        #[arg(short = 'p', long = "prime")]
        p: u64,
    },
    /// Build and render the valuation tree.
    Tree {
        #[command(flatten)]
        args: TreeArgs,
        #[arg(long, value_enum, default_value_t = Format::Ascii)]
        format: Format,
    },
    /// Classify the split of one starred class, with the brute-force oracle.
    Classify {
        polynomial: String,
        #[arg(short = 'p', long = "prime")]
        p: u64,
        #[arg(long)]
        level: u32,
        /// Comma-separated residues mod p^level, e.g. "1,2".
        #[arg(long)]
        residues: String,
    },
    /// Piecewise closed form, or the unresolved frontier.
    ClosedForm {
        #[command(flatten)]
        args: TreeArgs,
    },
    /// Valuations over the window [0, N)^arity.
    Grid {
        polynomial: String,
        #[arg(short = 'p', long = "prime")]
        p: u64,
        #[arg(long, default_value_t = 16)]
        window: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Minimal period of the valuation grid and the value set.
    Period {
        polynomial: String,
        #[arg(short = 'p', long = "prime")]
        p: u64,
        #[arg(long, default_value_t = 16)]
        window: usize,
        #[arg(long, value_enum, default_value_t = Format::Ascii)]
        format: Format,
    },
    /// Sampled valuation tree of n -> S(n, k).
    Stirling {
        #[arg(short = 'k')]
        k: u64,
        #[arg(short = 'p', long = "prime", default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        #[arg(long, default_value_t = DEFAULT_WITNESSES)]
        witnesses: usize,
        #[arg(long, value_enum, default_value_t = Format::Ascii)]
        format: Format,
    },
    /// Run a property suite against its oracle.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(short = 'p', long = "prime", default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Tree depth (trichotomy: 5, n2plus7: 20 when omitted).
        #[arg(long)]
        depth: Option<u32>,
        /// Upper bound of n for the sequence suites.
        #[arg(long)]
        n_max: Option<u64>,
    },
}

/// Parses `args` (program name first), runs the command, and returns the
/// exit code: 0 on success, 1 on domain or argument errors and failed
/// verification, 2 when the node budget is exhausted.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::BudgetExceeded { .. } => 2,
                _ => 1,
            }
        }
    }
}

fn prime(p: u64) -> Result<Prime> {
    Prime::new(p).map_err(|_| Error::OutOfRange(format!("-p {p}: {p} is not prime")))
}

fn parse_poly<T: Scalar>(text: &str) -> Result<Polynomial<T>> {
    text.parse()
}

fn io(e: std::io::Error) -> Error {
    Error::Document(format!("write failed: {e}"))
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Val { n, p } => {
            let p = prime(p)?;
            let n: BigInt = n
                .trim()
                .parse()
                .map_err(|_| Error::OutOfRange(format!("`{n}` is not an integer")))?;
            writeln!(out, "{}", valuation(&n, p)).map_err(io)?;
            Ok(0)
        }
        Command::Tree { args, format } => match args.int {
            IntKind::Big => tree_cmd::<BigInt>(&args, format, out, err),
            IntKind::I64 => tree_cmd::<i64>(&args, format, out, err),
            IntKind::I128 => tree_cmd::<i128>(&args, format, out, err),
        },
        Command::Classify {
            polynomial,
            p,
            level,
            residues,
        } => classify_cmd(&polynomial, p, level, &residues, out),
        Command::ClosedForm { args } => match args.int {
            IntKind::Big => closed_form_cmd::<BigInt>(&args, out),
            IntKind::I64 => closed_form_cmd::<i64>(&args, out),
            IntKind::I128 => closed_form_cmd::<i128>(&args, out),
        },
        Command::Grid {
            polynomial,
            p,
            window,
            format,
        } => {
            let f: Polynomial<BigInt> = parse_poly(&polynomial)?;
            let grid = valuation_grid(&f, prime(p)?, window)?;
            let text = match format {
                Format::Csv => grid.to_csv(),
                Format::Json => pretty(&grid),
                Format::Ascii => grid
                    .rows()
                    .iter()
                    .map(|row| row.iter().map(|v| format!("{v:>3}")).collect::<String>() + "\n")
                    .collect(),
                Format::Dot => {
                    return Err(Error::OutOfRange(
                        "--format dot applies to trees only".into(),
                    ))
                }
            };
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(0)
        }
        Command::Period {
            polynomial,
            p,
            window,
            format,
        } => {
            let f: Polynomial<BigInt> = parse_poly(&polynomial)?;
            let report = period_report(&f, prime(p)?, window)?;
            let text = match format {
                Format::Json => pretty(&report),
                Format::Ascii => {
                    let period = match report.period {
                        Some(d) => format!(
                            "{d} (power of {}: {})",
                            report.p,
                            if report.is_power_of_p { "yes" } else { "no" }
                        ),
                        None => format!("inconclusive at window {}", report.window),
                    };
                    let vset: Vec<String> = report.vset.iter().map(ToString::to_string).collect();
                    format!("period: {period}\nvset: {{{}}}\n", vset.join(", "))
                }
                _ => return Err(Error::OutOfRange("--format must be ascii or json".into())),
            };
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(0)
        }
        Command::Stirling {
            k,
            p,
            depth,
            witnesses,
            format,
        } => {
            let report = stirling_tree(k, prime(p)?, depth, witnesses)?;
            let text = match format {
                Format::Json => pretty(&report),
                Format::Ascii => {
                    let mut s = format!(
                        "{}, p = {}, depth {}, {} witnesses, n >= {}\n",
                        report.sequence, report.p, report.depth, report.witnesses, report.start
                    );
                    for node in &report.nodes {
                        let label = match node.status {
                            EmpiricalStatus::Terminal { valuation, .. } => valuation.to_string(),
                            EmpiricalStatus::Mixed => "mixed".into(),
                        };
                        s += &format!(
                            "{}({} mod {}) {label}\n",
                            "  ".repeat(node.level as usize),
                            node.residue,
                            node.modulus
                        );
                    }
                    let counts: Vec<String> = report
                        .non_terminal_counts
                        .iter()
                        .map(ToString::to_string)
                        .collect();
                    s += &format!("non-terminal classes per level: {}\n", counts.join(" "));
                    s
                }
                _ => return Err(Error::OutOfRange("--format must be ascii or json".into())),
            };
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(0)
        }
        Command::Verify {
            suite,
            degree,
            p,
            samples,
            seed,
            depth,
            n_max,
        } => {
            let report = match suite {
                Suite::Trichotomy => verify::trichotomy_samples::<i128>(
                    degree,
                    prime(p)?,
                    samples,
                    depth.unwrap_or(5),
                    seed,
                )?,
                Suite::Eq4 => verify::gradient_identity_suite(samples, seed)?,
                Suite::Legendre => {
                    verify::legendre_suite(n_max.unwrap_or(500), &[2, 3, 5, 7, 11, 13])?
                }
                Suite::CentralBinomial => verify::central_binomial_suite(n_max.unwrap_or(200)),
                Suite::Stirling => verify::stirling_suite(n_max.unwrap_or(60))?,
                Suite::N2plus7 => verify::n2plus7_suite(depth.unwrap_or(20))?,
            };
            write!(out, "{report}").map_err(io)?;
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}

fn pretty<S: serde::Serialize>(v: &S) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn builder(args: &TreeArgs) -> Result<TreeBuilder> {
    let mut b = TreeBuilder::new(prime(args.p)?)
        .max_depth(args.depth)
        .node_budget(args.budget);
    if let Some(a) = args.arity {
        b = b.arity(a);
    }
    if let Some(r) = args.rule {
        b = b.rule(r.into());
    }
    Ok(b)
}

fn tree_cmd<T: Scalar>(
    args: &TreeArgs,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let f: Polynomial<T> = parse_poly(&args.polynomial)?;
    let tree = match builder(args)?.build(&f) {
        Ok(t) => t,
        Err(Error::BudgetExceeded { limit }) => {
            if format == Format::Json {
                let arity = args.arity.unwrap_or_else(|| f.natural_arity());
                let rule = args.rule.map_or(LabelRule::default_for(arity), Into::into);
                let doc = render_truncated_json(&f, prime(args.p)?, arity, args.depth, rule, limit);
                out.write_all(doc.as_bytes()).map_err(io)?;
            }
            writeln!(
                err,
                "error: tree exceeds the node budget of {limit}; raise --budget or lower --depth"
            )
            .map_err(io)?;
            return Ok(2);
        }
        Err(e) => return Err(e),
    };
    let text = match format {
        Format::Ascii => render_ascii(&tree),
        Format::Dot => render_dot(&tree),
        Format::Json => render_json(&tree),
        Format::Csv => {
            return Err(Error::OutOfRange(
                "--format csv applies to grids only".into(),
            ))
        }
    };
    out.write_all(text.as_bytes()).map_err(io)?;
    Ok(0)
}

fn closed_form_cmd<T: Scalar>(args: &TreeArgs, out: &mut dyn Write) -> Result<i32> {
    let f: Polynomial<T> = parse_poly(&args.polynomial)?;
    let tree = builder(args)?.build(&f)?;
    write!(out, "{}", closed_form(&tree)).map_err(io)?;
    Ok(0)
}

fn describe(s: &SplitAnalysis) -> String {
    let lin: Vec<String> = s.lin.iter().map(ToString::to_string).collect();
    let digits: Vec<String> = s
        .star_digits
        .iter()
        .map(|d| {
            format!(
                "({})",
                d.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(", ")
            )
        })
        .collect();
    format!(
        "alpha={} lin=({}) {} star digits [{}]",
        s.alpha,
        lin.join(", "),
        s.kind.name(),
        digits.join(", ")
    )
}

fn classify_cmd(
    polynomial: &str,
    p: u64,
    level: u32,
    residues: &str,
    out: &mut dyn Write,
) -> Result<i32> {
    let p = prime(p)?;
    let f: Polynomial<BigInt> = parse_poly(polynomial)?;
    let residues = residues
        .split(',')
        .map(|r| {
            r.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::OutOfRange(format!("--residues: `{r}` is not an integer")))
        })
        .collect::<Result<Vec<_>>>()?;
    let class = ResidueClass::new(level, residues, p)?;
    let label = node_label(&f, &class, p, LabelRule::Modular)?;
    if label != NodeLabel::Star {
        return Err(Error::Precondition(format!(
            "{class} is terminal (label {label}), not starred"
        )));
    }
    let node = TreeNode::leaf(class, label);
    let fast = classify_star(&f, p, &node)?;
    let oracle = brute_force_classify(&f, p, &node)?;
    writeln!(out, "node {} at level {level}", node.class).map_err(io)?;
    writeln!(out, "gradient: {}", describe(&fast)).map_err(io)?;
    writeln!(out, "oracle:   {}", describe(&oracle)).map_err(io)?;
    writeln!(out, "agree: {}", if fast == oracle { "yes" } else { "no" }).map_err(io)?;
    Ok(if fast == oracle { 0 } else { 1 })
}
