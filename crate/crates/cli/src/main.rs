//! `mimham`: command-line driver for the reduction workbench.
//!
//! Exit codes: 0 ok, 1 negative decision, 2 bad input, 3 decided by
//! normalization, 4 width cap exceeded, 5 search budget exhausted.

mod manifest;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use mimham_core::counterexample::{search_counterexample, CounterexampleError};
use mimham_core::formula::{normalize, parse_dimacs, sat_oracle, NormalizationStatus};
use mimham_core::gadgets::{
    build_clause_gadget, search_gadget, verify_gadget_contract, CATALOG_SEEDS,
};
use mimham_core::graph::LinearOrder;
use mimham_core::ham::{find_ham_cycle, find_ham_path, SearchOptions, SearchOutcome};
use mimham_core::mim::mim_width;
use mimham_core::reduction::{
    dummy_edges, reduce, to_cycle_instance, Instance, InstanceFile, ProblemKind,
};
use mimham_core::witness::{
    assignment_from_path, assignment_to_text, check_respectable, consecutive_dt_check,
    parse_assignment_text, parse_path_text, path_from_assignment, path_to_text, verify_path,
    WitnessError,
};

use manifest::{manifest_path_for, sha256_hex, RunManifest};

#[derive(Debug, Parser)]
#[command(
    name = "mimham",
    version,
    about = "3-CNF to Hamiltonian Path reduction workbench"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Dot,
}

#[derive(Debug, Clone, Copy, Default, Args)]
struct Budget {
    /// Stop the search after this many nodes.
    #[arg(long)]
    budget_nodes: Option<u64>,
    /// Stop the search after this many milliseconds (not reproducible).
    #[arg(long)]
    budget_ms: Option<u64>,
}

impl Budget {
    fn options(&self) -> SearchOptions {
        let mut opts = SearchOptions::default();
        if let Some(n) = self.budget_nodes {
            opts = opts.with_node_budget(n);
        }
        opts.time_budget = self.budget_ms.map(Duration::from_millis);
        opts
    }

    fn record(&self, manifest: &mut RunManifest) {
        manifest.budget_nodes = self.budget_nodes;
        manifest.budget_ms = self.budget_ms;
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reduce a DIMACS CNF file to a Hamiltonian Path (or Cycle) instance.
    Reduce {
        cnf: PathBuf,
        /// Output directory.
        #[arg(short, long, default_value = ".")]
        out: PathBuf,
        /// Emit the Hamiltonian Cycle variant with an apex vertex.
        #[arg(long)]
        cycle: bool,
    },
    /// Certify the mim-width of the order stored in an instance file.
    Certify {
        instance: PathBuf,
        #[arg(long, default_value_t = 25)]
        cap: usize,
    },
    /// Search for a Hamiltonian path (or cycle, for cycle instances).
    Solve {
        instance: PathBuf,
        /// Write the witness here.
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        budget: Budget,
    },
    /// Build the witness path of a satisfying assignment.
    Witness {
        instance: PathBuf,
        /// Assignment over the original variables; defaults to the truth-table oracle.
        #[arg(short, long)]
        assignment: Option<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Read the assignment encoded by a witness path.
    Extract {
        instance: PathBuf,
        path: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Check the traversal discipline of a witness path.
    Respect {
        instance: PathBuf,
        path: PathBuf,
        /// Variable index; defaults to the number of variables.
        #[arg(long)]
        a: Option<usize>,
        /// Column index; defaults to the number of clauses.
        #[arg(long)]
        b: Option<usize>,
    },
    /// Search for a bipartite graph on which the subdivision-clique construction fails.
    Counterexample {
        #[arg(short, long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        min_n: usize,
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        /// Maximum number of (graph, ordering) pairs to examine.
        #[arg(long)]
        budget_nodes: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print an instance or graph file as DOT or canonical text.
    Export {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Verify the shipped clause gadgets, optionally regenerating them.
    Gadgets {
        /// Write the catalog files here.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Also rerun the gadget search and compare with the shipped catalog.
        #[arg(long)]
        slow_gadget_check: bool,
        /// Search seed, overriding the catalog seeds.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        budget_nodes: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Ok,
    Negative,
    Decided,
    CapExceeded,
    Budget,
}

impl Outcome {
    fn code(self) -> u8 {
        match self {
            Outcome::Ok => 0,
            Outcome::Negative => 1,
            Outcome::Decided => 3,
            Outcome::CapExceeded => 4,
            Outcome::Budget => 5,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Reduce { cnf, out, cycle } => cmd_reduce(&cnf, &out, cycle),
        Command::Certify { instance, cap } => cmd_certify(&instance, cap),
        Command::Solve {
            instance,
            out,
            budget,
        } => cmd_solve(&instance, out.as_deref(), budget),
        Command::Witness {
            instance,
            assignment,
            out,
        } => cmd_witness(&instance, assignment.as_deref(), &out),
        Command::Extract {
            instance,
            path,
            out,
        } => cmd_extract(&instance, &path, out.as_deref()),
        Command::Respect {
            instance,
            path,
            a,
            b,
        } => cmd_respect(&instance, &path, a, b),
        Command::Counterexample {
            out,
            min_n,
            max_n,
            budget_nodes,
            format,
        } => cmd_counterexample(&out, min_n..=max_n, budget_nodes, format),
        Command::Export { file, format, out } => cmd_export(&file, format, out.as_deref()),
        Command::Gadgets {
            out,
            slow_gadget_check,
            seed,
            budget_nodes,
        } => cmd_gadgets(out.as_deref(), slow_gadget_check, seed, budget_nodes),
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn read_text(path: &Path) -> Result<String> {
    let bytes = read(path)?;
    String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
}

fn load_instance(path: &Path) -> Result<Instance> {
    Instance::from_text(&read_text(path)?).with_context(|| format!("loading {}", path.display()))
}

fn cmd_reduce(cnf: &Path, out: &Path, cycle: bool) -> Result<Outcome> {
    let bytes = read(cnf)?;
    let formula = parse_dimacs(&bytes).with_context(|| format!("parsing {}", cnf.display()))?;
    let normalized = normalize(&formula);
    match normalized.status() {
        NormalizationStatus::DecidedSat => {
            println!("SAT by propagation");
            return Ok(Outcome::Decided);
        }
        NormalizationStatus::DecidedUnsat => {
            println!("UNSAT by propagation");
            return Ok(Outcome::Decided);
        }
        NormalizationStatus::Reducible => {}
    }
    let mut instance = reduce(&normalized)?;
    if cycle {
        instance = to_cycle_instance(&instance)?;
    }
    instance.set_source(format!("sha256:{}", sha256_hex(&bytes)));
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;

    let mut manifest = RunManifest::new("reduce");
    manifest.input(cnf, &bytes);
    manifest.write(&out.join("instance.txt"), &instance.to_text())?;
    manifest.write(&out.join("order.txt"), &instance.order().to_text())?;
    manifest.write(&out.join("wiring.txt"), &wiring_report(&instance))?;
    manifest.save(&out.join("manifest.json"))?;

    let g = instance.graph();
    println!(
        "{} instance: {} variables, {} clauses, {} vertices, {} edges ({} dummy)",
        instance.kind().as_str(),
        instance.n(),
        instance.m(),
        g.vertex_count(),
        g.edge_count(),
        g.dummy_edges().len()
    );
    println!("wrote {}", out.join("instance.txt").display());
    Ok(Outcome::Ok)
}

fn wiring_report(instance: &Instance) -> String {
    let f = instance.formula();
    let mut out = String::from("c clause pair literal sigma tau sigma-edge tau-edge\n");
    for w in instance.wiring() {
        let lit = w.literal;
        let original = f.original_var(lit.var()) as i64 * if lit.is_negated() { -1 } else { 1 };
        let _ = writeln!(
            out,
            "wire {} {} {} {} {} {}-{} {}-{}",
            w.clause,
            w.pair,
            original,
            w.sigma,
            w.tau,
            w.sigma_edge.0,
            w.sigma_edge.1,
            w.tau_edge.0,
            w.tau_edge.1
        );
    }
    for (u, v) in dummy_edges(instance) {
        let _ = writeln!(out, "dummy {} {}", instance.label(u), instance.label(v));
    }
    out
}

fn cmd_certify(path: &Path, cap: usize) -> Result<Outcome> {
    let file = InstanceFile::parse(&read_text(path)?)
        .with_context(|| format!("loading {}", path.display()))?;
    let order = file
        .order
        .clone()
        .context("instance file has no order line")?;
    let report = mim_width(&file.graph, &order, cap)?;
    println!("vertices {}", file.graph.vertex_count());
    let top = report.per_prefix.iter().copied().max().unwrap_or(0);
    let mut summary = Vec::new();
    for value in 0..=top {
        let count = report.per_prefix.iter().filter(|&&v| v == value).count();
        if count > 0 {
            summary.push(format!("{value}:{count}"));
        }
    }
    println!("prefix maxima (value:prefixes) {}", summary.join(" "));
    let matching: Vec<String> = report
        .witness
        .edges
        .iter()
        .map(|(u, v)| format!("{u}-{v}"))
        .collect();
    if report.within_cap() {
        println!("width {} (cap {cap})", report.width);
        println!("argmax prefix {}", report.position);
        println!("matching {}", matching.join(" "));
        Ok(Outcome::Ok)
    } else {
        println!("CAP EXCEEDED: width > {cap} at prefix {}", report.position);
        println!("matching {}", matching.join(" "));
        Ok(Outcome::CapExceeded)
    }
}

fn cmd_solve(path: &Path, out: Option<&Path>, budget: Budget) -> Result<Outcome> {
    let text = read_text(path)?;
    let file = InstanceFile::parse(&text).with_context(|| format!("loading {}", path.display()))?;
    let opts = budget.options();
    let (outcome, noun) = match file.kind {
        ProblemKind::Path => (find_ham_path(&file.graph, &opts), "PATH"),
        ProblemKind::Cycle => (find_ham_cycle(&file.graph, &opts), "CYCLE"),
    };
    match outcome {
        SearchOutcome::Found(p) => {
            println!("HAMILTONIAN {noun} FOUND");
            if let Some(out) = out {
                let mut manifest = RunManifest::new("solve");
                manifest.input(path, text.as_bytes());
                budget.record(&mut manifest);
                manifest.write(out, &path_to_text(&p))?;
                manifest.save(&manifest_path_for(out))?;
            } else {
                print!("{}", path_to_text(&p));
            }
            Ok(Outcome::Ok)
        }
        SearchOutcome::NotFound => {
            println!("NO HAMILTONIAN {noun}");
            Ok(Outcome::Negative)
        }
        SearchOutcome::BudgetExceeded => {
            println!("BUDGET EXCEEDED");
            Ok(Outcome::Budget)
        }
    }
}

fn cmd_witness(path: &Path, assignment: Option<&Path>, out: &Path) -> Result<Outcome> {
    let text = read_text(path)?;
    let instance =
        Instance::from_text(&text).with_context(|| format!("loading {}", path.display()))?;
    let f = instance.formula();
    let mut manifest = RunManifest::new("witness");
    manifest.input(path, text.as_bytes());
    let renamed = match assignment {
        Some(a) => {
            let a_text = read_text(a)?;
            manifest.input(a, a_text.as_bytes());
            f.project(&parse_assignment_text(&a_text)?)
        }
        None => match sat_oracle(f.formula())? {
            Some(a) => a,
            None => {
                println!("UNSATISFIABLE");
                return Ok(Outcome::Negative);
            }
        },
    };
    match path_from_assignment(&instance, &renamed) {
        Ok(p) => {
            manifest.write(out, &path_to_text(&p))?;
            manifest.save(&manifest_path_for(out))?;
            println!("wrote {}", out.display());
            Ok(Outcome::Ok)
        }
        Err(e @ (WitnessError::NotSatisfying | WitnessError::IncompleteAssignment(_))) => {
            println!("REJECTED: {e}");
            Ok(Outcome::Negative)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_extract(path: &Path, walk: &Path, out: Option<&Path>) -> Result<Outcome> {
    let text = read_text(path)?;
    let instance =
        Instance::from_text(&text).with_context(|| format!("loading {}", path.display()))?;
    let walk_text = read_text(walk)?;
    let p = parse_path_text(&walk_text)?;
    let assignment = match assignment_from_path(&instance, &p) {
        Ok(a) => instance.formula().lift(&a),
        Err(e @ WitnessError::IrregularTraversal { .. }) => {
            println!("REJECTED: {e}");
            return Ok(Outcome::Negative);
        }
        Err(e) => return Err(e.into()),
    };
    let rendered = assignment_to_text(&assignment);
    match out {
        Some(out) => {
            let mut manifest = RunManifest::new("extract");
            manifest.input(path, text.as_bytes());
            manifest.input(walk, walk_text.as_bytes());
            manifest.write(out, &rendered)?;
            manifest.save(&manifest_path_for(out))?;
        }
        None => print!("{rendered}"),
    }
    Ok(Outcome::Ok)
}

fn cmd_respect(path: &Path, walk: &Path, a: Option<usize>, b: Option<usize>) -> Result<Outcome> {
    let instance = load_instance(path)?;
    let p = parse_path_text(&read_text(walk)?)?;
    let (a, b) = (a.unwrap_or(instance.n()), b.unwrap_or(instance.m()));
    if a == 0 || a > instance.n() || b == 0 || b > instance.m() {
        bail!(
            "need 1 <= a <= {} and 1 <= b <= {}",
            instance.n(),
            instance.m()
        );
    }
    let g = instance.graph();
    let mut ok = true;
    match check_respectable(&instance, &p, a, b) {
        Ok(()) => println!("({a}, {b})-respectable: yes"),
        Err(e) => {
            println!("({a}, {b})-respectable: no ({e})");
            ok = false;
        }
    }
    let triples = consecutive_dt_check(&instance, &p);
    println!(
        "consecutive dot triples: {}",
        if triples { "yes" } else { "no" }
    );
    let dummy_free = verify_path(g, &p, false, true).is_ok();
    println!(
        "dummy edges used: {}",
        if dummy_free { "none" } else { "some" }
    );
    Ok(if ok && triples && dummy_free {
        Outcome::Ok
    } else {
        Outcome::Negative
    })
}

fn cmd_counterexample(
    out: &Path,
    range: std::ops::RangeInclusive<usize>,
    budget: Option<u64>,
    format: Format,
) -> Result<Outcome> {
    let found = match search_counterexample(range.clone(), budget) {
        Ok(found) => found,
        Err(CounterexampleError::BudgetExhausted) => {
            println!("BUDGET EXCEEDED");
            return Ok(Outcome::Budget);
        }
        Err(e) => return Err(e.into()),
    };
    let Some(hit) = found else {
        println!(
            "no counterexample with n in {}..={}",
            range.start(),
            range.end()
        );
        return Ok(Outcome::Negative);
    };
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let g = hit.instance.graph();
    let h = &hit.output.graph;
    let n = hit.instance.a_count();
    let g_label = |v: usize| {
        Some(if v < n {
            format!("a{}", v + 1)
        } else {
            format!("b{}", v - n + 1)
        })
    };

    let mut manifest = RunManifest::new("counterexample");
    manifest.budget_nodes = budget;
    manifest.write(&out.join("g.txt"), &g.to_text())?;
    manifest.write(&out.join("h.txt"), &h.to_text())?;
    manifest.write(&out.join("cycle.txt"), &path_to_text(&hit.cycle))?;
    if format == Format::Dot {
        manifest.write(&out.join("g.dot"), &g.to_dot("G", g_label))?;
        manifest.write(
            &out.join("h.dot"),
            &h.to_dot("H", |v| Some(hit.output.label(v))),
        )?;
    }
    let mut report = String::new();
    let _ = writeln!(report, "G: {n} + {n} vertices, {} edges", g.edge_count());
    let edges: Vec<String> = hit
        .instance
        .edges()
        .iter()
        .map(|(a, b)| format!("a{a}b{b}"))
        .collect();
    let _ = writeln!(report, "edges {}", edges.join(" "));
    let _ = writeln!(report, "G has no Hamiltonian cycle");
    let _ = writeln!(
        report,
        "H: {} vertices, {} edges",
        h.vertex_count(),
        h.edge_count()
    );
    let cycle: Vec<String> = hit.cycle.iter().map(|&v| hit.output.label(v)).collect();
    let _ = writeln!(report, "H Hamiltonian cycle {}", cycle.join(" "));
    manifest.write(&out.join("report.txt"), &report)?;
    manifest.save(&out.join("manifest.json"))?;
    print!("{report}");
    Ok(Outcome::Ok)
}

fn cmd_export(path: &Path, format: Format, out: Option<&Path>) -> Result<Outcome> {
    let text = read_text(path)?;
    let rendered = match Instance::from_text(&text) {
        Ok(instance) => match format {
            Format::Dot => instance.to_dot(),
            Format::Text => instance.to_text(),
        },
        Err(_) => {
            let file = InstanceFile::parse(&text)
                .with_context(|| format!("loading {}", path.display()))?;
            match format {
                Format::Dot => file.graph.to_dot("graph", |_| None),
                Format::Text => {
                    let mut s = file.graph.to_text();
                    s.push_str(
                        &file
                            .order
                            .as_ref()
                            .map(LinearOrder::to_text)
                            .unwrap_or_default(),
                    );
                    s
                }
            }
        }
    };
    match out {
        Some(out) => {
            let mut manifest = RunManifest::new("export");
            manifest.input(path, text.as_bytes());
            manifest.write(out, &rendered)?;
            manifest.save(&manifest_path_for(out))?;
        }
        None => print!("{rendered}"),
    }
    Ok(Outcome::Ok)
}

fn cmd_gadgets(
    out: Option<&Path>,
    slow: bool,
    seed: Option<u64>,
    budget: Option<u64>,
) -> Result<Outcome> {
    let mut manifest = RunManifest::new("gadgets");
    manifest.seed = seed;
    manifest.budget_nodes = budget;
    let mut ok = true;
    let mut outcome = Outcome::Ok;
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    for (k, max_vertices, catalog_seed) in CATALOG_SEEDS {
        let mut gadget = build_clause_gadget(k)?;
        match verify_gadget_contract(&gadget) {
            Ok(cert) => println!(
                "gamma{k}: {} vertices, {} edges, {} pairs, {} path systems checked: contract ok",
                gadget.vertex_count(),
                gadget.graph().edge_count(),
                gadget.arity(),
                cert.path_systems
            ),
            Err(e) => {
                println!("gamma{k}: contract violated: {e}");
                ok = false;
            }
        }
        if slow {
            let s = seed.unwrap_or(catalog_seed);
            match search_gadget(k, max_vertices, budget.unwrap_or(50_000_000), s) {
                Ok(Some(found)) => {
                    let same = found == gadget;
                    println!(
                        "gamma{k}: search (seed {s}, limit {max_vertices}) found {} vertices, {}",
                        found.vertex_count(),
                        if same {
                            "identical to catalog"
                        } else {
                            "differs from catalog"
                        }
                    );
                    if !same && seed.is_none() {
                        ok = false;
                    }
                    gadget = found;
                }
                Ok(None) => {
                    println!("gamma{k}: search found nothing");
                    ok = false;
                }
                Err(e) => {
                    println!("gamma{k}: search stopped: {e}");
                    outcome = Outcome::Budget;
                }
            }
        }
        if let Some(dir) = out {
            manifest.write(
                &dir.join(format!("gamma{k}.txt")),
                &gadget.to_catalog_text(),
            )?;
        }
    }
    if let Some(dir) = out {
        manifest.save(&dir.join("manifest.json"))?;
    }
    Ok(if !ok { Outcome::Negative } else { outcome })
}
