//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::Instant;

use num_bigint::BigInt;
use rand::Rng;
use valtree::padic::valuation;
use valtree::sequences::period_report;
use valtree::tree::{closed_form, ClosedFormReport};
use valtree::verify::{
    central_binomial_suite, gradient_identity_suite, legendre_suite, n2plus7_suite, seeded_rng,
    stirling_suite, trichotomy_suite, VerifyReport,
};
use valtree::{LabelRule, NodeLabel, Poly, Prime, Tree, TreeBuilder, Valuation};

const SQUARE_PLUS_FIVE_ASCII: &str = include_str!("golden/square_plus_five.txt");
const QUADRIC_JSON: &str = include_str!("golden/quadric.json");
const SQUARE_PLUS_FIVE: &str = "x^2 + 5";
const QUADRIC: &str = "x^2 + y^2 + x*y + x + y + 1";

const TRICHOTOMY_POLYNOMIALS: usize = 500;
const TRICHOTOMY_DEPTH: u32 = 5;
const GRADIENT_SAMPLES: usize = 1000;
const N2PLUS7_DEPTH: u32 = 20;
const LEGENDRE_N_MAX: u64 = 500;
const LEGENDRE_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];
const CENTRAL_N_MAX: u64 = 200;
const STIRLING_N_MAX: u64 = 60;
const CLOSED_FORM_POINTS: usize = 1000;
const SEED: u64 = 20240601;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("valtree").chain(args.iter().copied());
    let code = valtree::cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn suite(report: VerifyReport) -> Outcome {
    let line = report.to_string();
    let first = line.lines().next().unwrap_or_default().to_string();
    if report.passed() && report.checked > 0 {
        Ok(first)
    } else {
        Err(line.trim_end().replace('\n', "\n      "))
    }
}

fn square_plus_five_tree() -> Tree {
    TreeBuilder::new(prime(2))
        .build(&SQUARE_PLUS_FIVE.parse::<Poly>().unwrap())
        .unwrap()
}

fn quadric_tree() -> Tree {
    TreeBuilder::new(prime(2))
        .max_depth(4)
        .build(&QUADRIC.parse::<Poly>().unwrap())
        .unwrap()
}

fn square_plus_five() -> Outcome {
    let (code, out, err) = cli(&["tree", SQUARE_PLUS_FIVE, "-p", "2"]);
    ensure(code == 0, format!("exit {code}: {err}"))?;
    ensure(
        out == SQUARE_PLUS_FIVE_ASCII,
        format!("ASCII differs from golden:\n{out}"),
    )?;
    let t = square_plus_five_tree();
    let kids: Vec<NodeLabel> = t.root.children.iter().map(|c| c.label).collect();
    ensure(t.root.label == NodeLabel::Star, "root is not starred")?;
    ensure(
        kids == [NodeLabel::Terminal(0), NodeLabel::Terminal(1)],
        format!("children {kids:?}"),
    )?;
    ensure(t.frontier().count() == 0, "frontier is not empty")?;
    ensure(
        t.root.children.iter().all(|c| c.children.is_empty()),
        "children are not leaves",
    )?;
    Ok(format!("{} nodes, golden ASCII matched", t.node_count()))
}

fn quadric() -> Outcome {
    let (code, out, err) = cli(&[
        "tree", QUADRIC, "-p", "2", "--depth", "4", "--format", "json",
    ]);
    ensure(code == 0, format!("exit {code}: {err}"))?;
    ensure(out == QUADRIC_JSON, "JSON differs from golden")?;
    let t = quadric_tree();
    ensure(t.rule == LabelRule::Modular, "wrong label rule")?;
    let level1: Vec<NodeLabel> = t.level(1).iter().map(|n| n.label).collect();
    let zeros = level1
        .iter()
        .filter(|l| **l == NodeLabel::Terminal(0))
        .count();
    let stars = level1.iter().filter(|l| **l == NodeLabel::Star).count();
    ensure(
        level1.len() == 4 && zeros == 3 && stars == 1,
        format!("level 1 {level1:?}"),
    )?;
    let level2: Vec<NodeLabel> = t.level(2).iter().map(|n| n.label).collect();
    ensure(
        level2 == [NodeLabel::Terminal(1); 4],
        format!("level 2 {level2:?}"),
    )?;
    ensure(t.node_count() == 9, format!("{} nodes", t.node_count()))?;
    let report = closed_form(&t);
    let ClosedFormReport::Closed { pieces } = &report else {
        return Err(format!("closed form unresolved:\n{report}"));
    };
    for piece in pieces {
        let both_odd = piece
            .class
            .residues
            .iter()
            .all(|r| r % 2 == BigInt::from(1));
        let want = u32::from(both_odd);
        ensure(
            piece.valuation == want,
            format!("piece {} has valuation {}", piece.class, piece.valuation),
        )?;
    }
    Ok(format!(
        "golden JSON matched, CLOSED with {} pieces",
        pieces.len()
    ))
}

fn trichotomy() -> Outcome {
    let mut total = 0;
    let mut walked = 0;
    for degree in [2u32, 3] {
        for p in [2u64, 3, 5, 7] {
            let seed = SEED ^ (u64::from(degree) << 8) ^ p;
            let (report, summary) = trichotomy_suite::<i64>(
                degree,
                prime(p),
                TRICHOTOMY_POLYNOMIALS,
                TRICHOTOMY_DEPTH,
                seed,
            )
            .map_err(|e| format!("degree {degree}, p = {p}: {e}"))?;
            ensure(
                summary.polynomials == TRICHOTOMY_POLYNOMIALS,
                format!(
                    "degree {degree}, p = {p}: {} polynomials",
                    summary.polynomials
                ),
            )?;
            suite(report).map_err(|e| format!("degree {degree}, p = {p}: {e}"))?;
            total += summary.star_nodes;
            walked += summary.walked;
        }
    }
    Ok(format!(
        "{total} star nodes over 8 configurations x {TRICHOTOMY_POLYNOMIALS} polynomials matched oracle ({walked} trees walked without materializing)"
    ))
}

fn closed_form_soundness() -> Outcome {
    let mut rng = seeded_rng(SEED);
    let two = prime(2);
    let mut checked = 0;
    for t in [square_plus_five_tree(), quadric_tree()] {
        let report = closed_form(&t);
        ensure(report.is_closed(), format!("{} is not closed", t.f))?;
        for _ in 0..CLOSED_FORM_POINTS {
            let point: Vec<BigInt> = (0..t.arity)
                .map(|_| BigInt::from(rng.gen_range(0u64..1 << 40)))
                .collect();
            let direct = valuation(&t.f.evaluate_at(&point).unwrap(), two);
            let table = report.lookup(&point).map(Valuation::Finite);
            ensure(
                table == Some(direct),
                format!("{} at {point:?}: table {table:?}, direct {direct}", t.f),
            )?;
            checked += 1;
        }
    }
    Ok(format!("{checked} random points agreed with table lookup"))
}

fn periodicity() -> Outcome {
    let f2: Poly = QUADRIC.parse().unwrap();
    let r = period_report(&f2, prime(2), 8).map_err(|e| e.to_string())?;
    ensure(
        r.period == Some(2) && r.is_power_of_p,
        format!("quadric: period {:?}", r.period),
    )?;
    let g: Poly = "x^2 + 7".parse().unwrap();
    let r = period_report(&g, prime(2), 64).map_err(|e| e.to_string())?;
    ensure(
        r.period.is_none(),
        format!("x^2 + 7: period {:?}", r.period),
    )?;
    Ok("period 2 on the 8x8 grid; x^2 + 7 has no period at window 64".into())
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1 tree of x^2 + 5", square_plus_five),
        ("2 tree of x^2 + y^2 + x*y + x + y + 1", quadric),
        ("3 trichotomy", trichotomy),
        ("4 gradient coefficients", || {
            suite(gradient_identity_suite(GRADIENT_SAMPLES, SEED).map_err(|e| e.to_string())?)
        }),
        ("5 n^2 + 7 splitting", || {
            suite(n2plus7_suite(N2PLUS7_DEPTH).map_err(|e| e.to_string())?)
        }),
        ("6 legendre", || {
            suite(legendre_suite(LEGENDRE_N_MAX, &LEGENDRE_PRIMES).map_err(|e| e.to_string())?)
        }),
        ("7 central binomial", || {
            suite(central_binomial_suite(CENTRAL_N_MAX))
        }),
        ("8 stirling closed forms", || {
            suite(stirling_suite(STIRLING_N_MAX).map_err(|e| e.to_string())?)
        }),
        ("9 periodicity", periodicity),
        ("10 closed-form soundness", closed_form_soundness),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({secs:.2}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name} ({secs:.2}s): {detail}");
            }
        }
    }
    println!("acceptance: {failed} criteria failed");
    if failed > 0 {
        std::process::exit(1);
    }
}
