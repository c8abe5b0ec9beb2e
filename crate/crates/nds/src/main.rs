use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use nds::family::SetFamily;
use nds::ideals::ideals_bruteforce;
use nds::preorder::FunctionalMap;
use nds::reduction::certify;
use nds::rooted::RootedFamily;
use nds::search::{mine_conjecture, verify_main_theorem, MineOptions, ScanOptions};
use nds::suites;

#[derive(Parser)]
#[command(name = "nds", version, about = "NDS statistics, checked reductions and exhaustive searches over order-ideal families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print family statistics for a map, rooted family or set family
    Analyze(AnalyzeArgs),
    /// Build and print the checked reduction certificate of a map
    Certify(CertifyArgs),
    /// Run the per-lemma invariant suites up to a ground size
    VerifyLemmas(VerifyLemmasArgs),
    /// Scan all maps on n vertices and report the maximum NDS
    VerifyTheorem(VerifyTheoremArgs),
    /// Exhaustively mine unique-root rooted families for positive NDS
    Mine(MineArgs),
    /// Render the Hasse diagram of a map as DOT
    ExportDot(ExportDotArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Functional map as space-separated 0-indexed images, e.g. "1 1"
    #[arg(long, value_name = "IMAGES")]
    map: Option<String>,
    /// File holding the functional map text form
    #[arg(long, value_name = "FILE", conflicts_with = "map")]
    map_file: Option<PathBuf>,
}

impl InputArgs {
    fn functional_map(&self) -> Result<FunctionalMap, String> {
        let text = match (&self.map, &self.map_file) {
            (Some(t), _) => t.clone(),
            (None, Some(p)) => {
                fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?
            }
            (None, None) => return Err("one of --map or --map-file is required".into()),
        };
        text.parse().map_err(|e| format!("bad map {text:?}: {e}"))
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// RootedFamily JSON file ({"n":..,"rules":[{"stem":[..],"root":..}]})
    #[arg(long, value_name = "FILE", conflicts_with_all = ["map", "map_file"])]
    rooted: Option<PathBuf>,
    /// SetFamily JSON file ({"n":..,"sets":[[..],..]})
    #[arg(long, value_name = "FILE", conflicts_with_all = ["map", "map_file", "rooted"])]
    sets: Option<PathBuf>,
    /// Write the analysis as JSON to this path
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Write an element,degree,rare table to this path
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyLemmasArgs {
    /// Ground size bound for the exhaustive suites
    #[arg(long, default_value_t = 5)]
    n: usize,
    /// Seed for the randomized suites
    #[arg(long, default_value_t = suites::DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
struct VerifyTheoremArgs {
    #[arg(long)]
    n: usize,
    /// Worker threads (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// Restrict the scan to poset instances (every cycle a fixed point)
    #[arg(long)]
    posets_only: bool,
    /// Scan one representative per relabeling orbit
    #[arg(long)]
    canonical: bool,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MineArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    max_stem: usize,
    #[arg(long)]
    jobs: Option<usize>,
    /// Require every element to root exactly one rule instead of at most one
    #[arg(long)]
    exactly_one: bool,
    /// Resumable cursor file; checkpoints progress during long runs
    #[arg(long, value_name = "FILE")]
    cursor: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportDotArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

/// a..z for small grounds, e0,e1,... beyond that.
fn element_name(i: usize, n: usize) -> String {
    if n <= 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("e{i}")
    }
}

fn set_names(elems: &[usize], n: usize) -> String {
    let inner: Vec<String> = elems.iter().map(|&e| element_name(e, n)).collect();
    format!("{{{}}}", inner.join(","))
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn analyze(args: &AnalyzeArgs) -> Result<i32, String> {
    let (family, map): (SetFamily, Option<FunctionalMap>) = if let Some(p) = &args.sets {
        let text = fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
        (serde_json::from_str(&text).map_err(|e| format!("{}: {e}", p.display()))?, None)
    } else if let Some(p) = &args.rooted {
        let text = fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
        let rf: RootedFamily =
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", p.display()))?;
        (rf.closure_system(), None)
    } else {
        let f = args.input.functional_map()?;
        (ideals_bruteforce(&f).into_family(), Some(f))
    };

    let n = family.ground_size();
    let degrees = family.degrees();
    let rare: Vec<usize> = (0..n).filter(|&u| family.is_rare(u).unwrap()).collect();

    println!("n: {n}");
    println!("family size: {}", family.len());
    println!("total member size: {}", family.total_size());
    println!("nds: {}", family.nds());
    println!("average-rare: {}", family.is_average_rare());
    let deg_line: Vec<String> = (0..n)
        .map(|u| format!("{}={}", element_name(u, n), degrees[u]))
        .collect();
    println!("degrees: {}", deg_line.join(" "));
    println!("rare: {}", set_names(&rare, n));

    let mut report = json!({
        "n": n,
        "family": serde_json::to_value(&family).unwrap(),
        "size": family.len(),
        "total_size": family.total_size(),
        "nds": family.nds(),
        "average_rare": family.is_average_rare(),
        "degrees": degrees,
        "rare": rare,
    });
    if let Some(f) = &map {
        let pre = f.preorder();
        let maximal = pre.maximal_elements().elems();
        let classes: Vec<Vec<usize>> = pre
            .equiv_classes()
            .classes()
            .iter()
            .map(|c| c.elems())
            .collect();
        println!("maximal: {}", set_names(&maximal, n));
        let class_line: Vec<String> = classes.iter().map(|c| set_names(c, n)).collect();
        println!("classes: {}", class_line.join(" "));
        report["map"] = json!(f.images());
        report["maximal"] = json!(maximal);
        report["classes"] = json!(classes);
    }

    if let Some(p) = &args.out {
        fs::write(p, serde_json::to_string_pretty(&report).unwrap())
            .map_err(|e| format!("{}: {e}", p.display()))?;
    }
    if let Some(p) = &args.csv {
        let mut csv = String::from("element,degree,rare\n");
        for u in 0..n {
            csv.push_str(&format!(
                "{},{},{}\n",
                element_name(u, n),
                degrees[u],
                rare.contains(&u)
            ));
        }
        fs::write(p, csv).map_err(|e| format!("{}: {e}", p.display()))?;
    }
    Ok(0)
}

fn run_certify(args: &CertifyArgs) -> Result<i32, String> {
    let f = args.input.functional_map()?;
    match certify(&f) {
        Ok(cert) => {
            let text = serde_json::to_string_pretty(&cert.record()).unwrap();
            write_or_print(&args.out, &text)?;
            Ok(0)
        }
        Err(e) => {
            eprintln!("certification failed: {e}");
            Ok(1)
        }
    }
}

fn run_verify_lemmas(args: &VerifyLemmasArgs) -> Result<i32, String> {
    let results = suites::run_all(args.n, args.seed).map_err(|e| e.to_string())?;
    let mut ok = true;
    for r in &results {
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {} ({} instances): {}", r.id, r.instances, r.description);
        ok &= r.passed;
    }
    Ok(if ok { 0 } else { 1 })
}

fn run_verify_theorem(args: &VerifyTheoremArgs) -> Result<i32, String> {
    let opts = ScanOptions {
        canonical_only: args.canonical,
        posets_only: args.posets_only,
        jobs: args.jobs,
    };
    let report = verify_main_theorem(args.n, &opts).map_err(|e| e.to_string())?;
    println!(
        "n={} scanned={} max_nds={} counterexamples={} ({:.3}s)",
        report.n,
        report.instances_scanned,
        report.max_nds,
        report.counterexamples.len(),
        report.wall_time
    );
    if let Some(p) = &args.out {
        fs::write(p, serde_json::to_string_pretty(&report).unwrap())
            .map_err(|e| format!("{}: {e}", p.display()))?;
    }
    Ok(if report.found_counterexample() { 1 } else { 0 })
}

fn run_mine(args: &MineArgs) -> Result<i32, String> {
    let opts = MineOptions {
        exactly_one: args.exactly_one,
        jobs: args.jobs,
        cursor: args.cursor.clone(),
        checkpoint_every: 1 << 20,
    };
    let report = mine_conjecture(args.n, args.max_stem, &opts).map_err(|e| e.to_string())?;
    println!(
        "n={} max_stem={} scanned={} max_nds={} counterexamples={} ({:.3}s)",
        report.n,
        args.max_stem,
        report.instances_scanned,
        report.max_nds,
        report.counterexamples.len(),
        report.wall_time
    );
    if let Some(p) = &args.out {
        fs::write(p, serde_json::to_string_pretty(&report).unwrap())
            .map_err(|e| format!("{}: {e}", p.display()))?;
    }
    Ok(if report.found_counterexample() { 1 } else { 0 })
}

fn run_export_dot(args: &ExportDotArgs) -> Result<i32, String> {
    let f = args.input.functional_map()?;
    let n = f.ground_size();
    let pre = f.preorder();
    let part = pre.equiv_classes();
    let mut dot = String::from("digraph hasse {\n");
    if part.class_count() == n {
        for v in 0..n {
            dot.push_str(&format!("  \"{}\";\n", element_name(v, n)));
        }
        for (lo, hi) in f.hasse_covers().map_err(|e| e.to_string())? {
            dot.push_str(&format!(
                "  \"{}\" -> \"{}\";\n",
                element_name(lo, n),
                element_name(hi, n)
            ));
        }
    } else {
        // quotient the preorder and label class vertices with their members
        let q = f.quotient(&part).map_err(|e| e.to_string())?;
        let label = |c: usize| {
            let class = &part.classes()[c];
            if class.len() == 1 {
                element_name(class.min_elem().unwrap(), n)
            } else {
                set_names(&class.elems(), n)
            }
        };
        for c in 0..part.class_count() {
            dot.push_str(&format!("  \"{}\";\n", label(c)));
        }
        for (lo, hi) in q.hasse_covers().map_err(|e| e.to_string())? {
            dot.push_str(&format!("  \"{}\" -> \"{}\";\n", label(lo), label(hi)));
        }
    }
    dot.push('}');
    write_or_print(&args.out, &dot)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(args) => analyze(args),
        Command::Certify(args) => run_certify(args),
        Command::VerifyLemmas(args) => run_verify_lemmas(args),
        Command::VerifyTheorem(args) => run_verify_theorem(args),
        Command::Mine(args) => run_mine(args),
        Command::ExportDot(args) => run_export_dot(args),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
