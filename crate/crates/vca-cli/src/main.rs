//! Command-line surface for variable-strength covering arrays: generate
//! hypergraph families, evaluate size bounds, construct arrays, verify them,
//! and emit plot-ready comparison data. Every command is a thin composition
//! of library calls; all randomized commands take an explicit seed.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use vca::bounds::{
    bound_table, bound_table_for_system, design_dependency_bound, n_dens, n_dens_design,
    n_general_lll, n_prob_design, n_prob_symmetric, rational_to_f64, BoundTableRow,
    DesignParams, EventClassSystem, GeneralLllOptions,
};
use vca::construct::{moser_tardos, random_fill, vardens, verify, VcaArray, VerifyOutcome};
use vca::generators::{
    complete_uniform, cyclic_consecutive, h15, random_triangulation, steiner_triple_system,
    TriangulationSeedSpec,
};
use vca::hypergraph::{EdgeClassPartition, Hypergraph};

#[derive(Parser)]
#[command(name = "vca", version, about = "Variable-strength covering array toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a hypergraph (or design) from one of the built-in families.
    Gen(GenArgs),
    /// Bound tables as CSV: symmetric, general and asymmetric local lemmas
    /// plus the density guarantee.
    Bounds(BoundsArgs),
    /// Build an array with the chosen algorithm and report its size.
    Construct(ConstructArgs),
    /// Check an array file against a hypergraph; exits 1 with a witness on
    /// missing coverage.
    Verify(VerifyArgs),
    /// Per-alphabet comparison series: density bound, general-lemma bound,
    /// and actual greedy run sizes (log scale).
    FigureData(FigureDataArgs),
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    family: GenFamily,
}

#[derive(Subcommand)]
enum GenFamily {
    /// Complete t-uniform hypergraph on k vertices.
    Complete {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cyclic consecutive hypergraph with k edges of t consecutive vertices.
    Cyclic {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random sphere triangulation on k vertices (2k-4 triangles).
    Triangulation {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Steiner triple system on k points, written as a design file.
    Sts {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also write the block hypergraph here.
        #[arg(long)]
        hg: Option<PathBuf>,
    },
    /// The 15-vertex mixed-strength hypergraph (4 triples + 99 pairs).
    H15 {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ClassMode {
    /// Partition by rank, then split classes until dependency profiles are
    /// uniform.
    Refine,
    /// Partition by edge cardinality only.
    Rank,
}

#[derive(Args)]
struct BoundsArgs {
    /// Hypergraph file (`.hg`).
    #[arg(long, conflicts_with_all = ["system", "steiner"])]
    input: Option<PathBuf>,
    /// Event-class system file (alphabet line, rank line, matrix rows).
    #[arg(long, conflicts_with = "steiner", requires = "edges")]
    system: Option<PathBuf>,
    /// Edge census for --system inputs (the density bound needs it).
    #[arg(long)]
    edges: Option<u64>,
    /// Emit design-formula evaluations over a k grid instead.
    #[arg(long, requires_all = ["s", "t", "lambda", "k_grid"])]
    steiner: bool,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    lambda: Option<usize>,
    /// Comma-separated k values for --steiner.
    #[arg(long)]
    k_grid: Option<String>,
    /// How to derive event classes from a hypergraph.
    #[arg(long, value_enum, default_value_t = ClassMode::Refine)]
    classes: ClassMode,
    /// Alphabet sizes, either one value (`4`) or an inclusive range (`2..10`).
    #[arg(long, default_value = "2..10")]
    v_range: String,
    /// Cap for the general-lemma search; fails if nothing is feasible below.
    #[arg(long)]
    cap: Option<f64>,
    #[arg(long)]
    out: PathBuf,
    /// Full float precision instead of two decimals.
    #[arg(long)]
    precise: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Random,
    Mt,
    Vardens,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    v: u32,
    #[arg(long, value_enum)]
    alg: Algorithm,
    /// Required for the randomized algorithms (random, mt).
    #[arg(long)]
    seed: Option<u64>,
    /// Row count; required for random, defaults to the symmetric bound for mt.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    max_rounds: u64,
    /// With more than one trial, seeds seed..seed+trials are run and a CSV
    /// of per-trial results is written instead of an array.
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    array: PathBuf,
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct FigureDataArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = ClassMode::Refine)]
    classes: ClassMode,
    #[arg(long, default_value = "2..10")]
    v_range: String,
    /// Greedy runs averaged per row; 0 omits the run series.
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    precise: bool,
}

fn main() {
    let cli = Cli::parse();
    init_thread_pool();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    };
    std::process::exit(code);
}

/// `VCA_THREADS` caps the worker count of the global pool.
fn init_thread_pool() {
    #[cfg(feature = "parallel")]
    if let Ok(threads) = std::env::var("VCA_THREADS") {
        if let Ok(threads) = threads.parse::<usize>() {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global()
                .ok();
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Construct(args) => cmd_construct(args),
        Command::Verify(args) => cmd_verify(args),
        Command::FigureData(args) => cmd_figure_data(args),
    }
}

fn cmd_gen(args: GenArgs) -> Result<i32> {
    match args.family {
        GenFamily::Complete { k, t, out } => {
            let h = complete_uniform(k, t)?;
            h.write_hg(&out)?;
            println!("wrote {} ({} edges)", out.display(), h.edge_count());
        }
        GenFamily::Cyclic { k, t, out } => {
            let h = cyclic_consecutive(k, t)?;
            h.write_hg(&out)?;
            println!("wrote {} ({} edges)", out.display(), h.edge_count());
        }
        GenFamily::Triangulation { k, seed, out } => {
            let h = random_triangulation(TriangulationSeedSpec { k, rng_seed: seed })?;
            h.write_hg(&out)?;
            println!("wrote {} ({} edges)", out.display(), h.edge_count());
        }
        GenFamily::Sts { k, out, hg } => {
            let design = steiner_triple_system(k)?;
            design.write_design(&out)?;
            println!("wrote {} ({} blocks)", out.display(), design.blocks.len());
            if let Some(hg_path) = hg {
                let h = design.to_hypergraph()?;
                h.write_hg(&hg_path)?;
                println!("wrote {} ({} edges)", hg_path.display(), h.edge_count());
            }
        }
        GenFamily::H15 { out } => {
            let (h, _) = h15();
            h.write_hg(&out)?;
            println!("wrote {} ({} edges)", out.display(), h.edge_count());
        }
    }
    Ok(0)
}

fn parse_v_range(spec: &str) -> Result<Vec<u32>> {
    let parse = |s: &str| -> Result<u32> {
        s.trim()
            .parse()
            .with_context(|| format!("bad alphabet size {s:?}"))
    };
    let range = if let Some((a, b)) = spec.split_once("..") {
        let (lo, hi) = (parse(a)?, parse(b)?);
        if lo > hi {
            bail!("empty alphabet range {spec:?}");
        }
        (lo..=hi).collect()
    } else {
        vec![parse(spec)?]
    };
    if range.iter().any(|&v| v < 2) {
        bail!("alphabet sizes must be at least 2");
    }
    Ok(range)
}

fn fmt(x: f64, precise: bool) -> String {
    if precise {
        format!("{x}")
    } else {
        format!("{x:.2}")
    }
}

fn load_classes(h: &Hypergraph, mode: ClassMode) -> Result<EdgeClassPartition> {
    let by_rank = h.rank_partition()?;
    Ok(match mode {
        ClassMode::Rank => by_rank,
        ClassMode::Refine => h.refine_partition(&by_rank)?,
    })
}

fn table_csv(rows: &[BoundTableRow], precise: bool) -> String {
    let mut out = String::from("v,n_s,n_g,n_a,n_dens,p_gs,p_as\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.v,
            fmt(r.n_s, precise),
            fmt(r.n_g, precise),
            fmt(r.n_a, precise),
            fmt(r.n_dens, precise),
            fmt(r.p_gs, precise),
            fmt(r.p_as, precise),
        ));
    }
    out
}

fn cmd_bounds(args: BoundsArgs) -> Result<i32> {
    let v_range = parse_v_range(&args.v_range)?;
    let csv = if args.steiner {
        let params_base = DesignParams {
            s: args.s.unwrap(),
            t: args.t.unwrap(),
            lambda: args.lambda.unwrap(),
            k: 0,
        };
        let k_grid: Vec<usize> = args
            .k_grid
            .as_deref()
            .unwrap()
            .split(',')
            .map(|tok| tok.trim().parse().context("bad k in --k-grid"))
            .collect::<Result<_>>()?;
        let mut out = String::from("k,v,prob_ln_arg,dens_ln_arg,n_prob,n_dens\n");
        for &k in &k_grid {
            let p = DesignParams { k, ..params_base };
            let degree = design_dependency_bound(&p)?;
            let blocks = p.block_count();
            for &v in &v_range {
                let prob = n_prob_design(&p, v)?;
                let b = rational_to_f64(&blocks);
                let dens = n_dens_design(&p, v, b.round() as u64)?;
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    k,
                    v,
                    fmt(rational_to_f64(&degree.ln_argument()), args.precise),
                    fmt(b, args.precise),
                    fmt(prob.n_real, args.precise),
                    fmt(dens.n_real, args.precise),
                ));
            }
        }
        out
    } else if let Some(system_path) = &args.system {
        let sys = EventClassSystem::load_system(system_path)?;
        let opts = GeneralLllOptions { n_cap: args.cap, ..GeneralLllOptions::default() };
        let rows = bound_table_for_system(&sys, args.edges.unwrap(), v_range, &opts)?;
        table_csv(&rows, args.precise)
    } else if let Some(input) = &args.input {
        let h = Hypergraph::load_hg(input)?;
        let classes = load_classes(&h, args.classes)?;
        let opts = GeneralLllOptions { n_cap: args.cap, ..GeneralLllOptions::default() };
        let rows = bound_table(&h, &classes, v_range, &opts)?;
        table_csv(&rows, args.precise)
    } else {
        bail!("one of --input, --system or --steiner is required");
    };
    std::fs::write(&args.out, &csv)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!("wrote {}", args.out.display());
    Ok(0)
}

fn cmd_construct(args: ConstructArgs) -> Result<i32> {
    let h = Hypergraph::load_hg(&args.input)?;
    let t = h.rank()? as u32;
    let d = h.dependency_degree()? as u64;
    let e = h.edge_count() as u64;
    let needs_seed = matches!(args.alg, Algorithm::Random | Algorithm::Mt);
    if needs_seed && args.seed.is_none() {
        bail!("--seed is required for the randomized algorithms");
    }
    if matches!(args.alg, Algorithm::Random) && args.n.is_none() {
        bail!("--n is required for --alg random");
    }
    let seed0 = args.seed.unwrap_or(0);
    let bound = match args.alg {
        Algorithm::Vardens => n_dens(e, t, args.v).n_int,
        _ => n_prob_symmetric(d, t, args.v).n_int,
    };
    let n_rows = args.n.unwrap_or(bound as usize);

    let run_one = |seed: u64| -> Result<(Option<VcaArray>, &'static str)> {
        Ok(match args.alg {
            Algorithm::Vardens => (Some(vardens(&h, args.v)?), "vardens"),
            Algorithm::Random => (Some(random_fill(&h, args.v, n_rows, seed)), "random"),
            Algorithm::Mt => match moser_tardos(&h, args.v, n_rows, seed, args.max_rounds) {
                Ok(a) => (Some(a), "mt"),
                Err(vca::ConstructError::ResampleCapExceeded { .. }) => (None, "mt"),
                Err(err) => return Err(err.into()),
            },
        })
    };

    if args.trials <= 1 {
        let (array, name) = run_one(seed0)?;
        let Some(array) = array else {
            eprintln!("construction failed: resampling cap {} exceeded", args.max_rounds);
            return Ok(1);
        };
        array.write_array(&args.out, seed0, name)?;
        let verified = verify(&array, &h)?.is_covered();
        println!("N={} bound={} verified={}", array.n(), bound, verified);
        return Ok(if verified { 0 } else { 1 });
    }

    let mut csv = String::from("v,seed,n,bound,verified\n");
    let mut sizes = Vec::new();
    let mut all_verified = true;
    for seed in seed0..seed0 + args.trials {
        let (array, _) = run_one(seed)?;
        match array {
            Some(array) => {
                let verified = verify(&array, &h)?.is_covered();
                all_verified &= verified;
                sizes.push(array.n());
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    args.v,
                    seed,
                    array.n(),
                    bound,
                    verified
                ));
            }
            None => {
                all_verified = false;
                csv.push_str(&format!("{},{},,{},false\n", args.v, seed, bound));
            }
        }
    }
    std::fs::write(&args.out, &csv)
        .with_context(|| format!("writing {}", args.out.display()))?;
    if !sizes.is_empty() {
        let mean = sizes.iter().sum::<usize>() as f64 / sizes.len() as f64;
        println!(
            "trials={} min={} max={} mean={:.2} bound={}",
            sizes.len(),
            sizes.iter().min().unwrap(),
            sizes.iter().max().unwrap(),
            mean,
            bound
        );
    }
    Ok(if all_verified { 0 } else { 1 })
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let h = Hypergraph::load_hg(&args.input)?;
    let (array, _, _) = VcaArray::load_array(&args.array)?;
    match verify(&array, &h)? {
        VerifyOutcome::Covered => {
            println!("covered");
            Ok(0)
        }
        VerifyOutcome::Uncovered { edge, missing } => {
            let cols: Vec<String> = h.edge(edge)?.iter().map(|c| c.to_string()).collect();
            let tuple: Vec<String> = missing.iter().map(|s| s.to_string()).collect();
            println!(
                "uncovered: edge {edge} {{{}}} missing tuple ({})",
                cols.join(" "),
                tuple.join(" ")
            );
            Ok(1)
        }
    }
}

fn cmd_figure_data(args: FigureDataArgs) -> Result<i32> {
    let h = Hypergraph::load_hg(&args.input)?;
    let classes = load_classes(&h, args.classes)?;
    let t = h.rank()? as u32;
    let e = h.edge_count() as u64;
    let v_range = parse_v_range(&args.v_range)?;
    let with_runs = args.trials > 0;
    let mut csv = String::from(if with_runs {
        "v,ln_n_dens,ln_n_g,ln_run_mean\n"
    } else {
        "v,ln_n_dens,ln_n_g\n"
    });
    for &v in &v_range {
        let sys = EventClassSystem::from_hypergraph(&h, &classes, v)?;
        let n_g = n_general_lll(&sys, &GeneralLllOptions::default())?.report.n_real;
        let dens = n_dens(e, t, v).n_real;
        let mut row = format!(
            "{},{},{}",
            v,
            fmt(dens.ln(), args.precise),
            fmt(n_g.ln(), args.precise)
        );
        if with_runs {
            let mut total = 0usize;
            for _ in 0..args.trials {
                total += vardens(&h, v)?.n();
            }
            let mean = total as f64 / args.trials as f64;
            row.push_str(&format!(",{}", fmt(mean.ln(), args.precise)));
        }
        csv.push_str(&row);
        csv.push('\n');
    }
    std::fs::write(&args.out, &csv)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!("wrote {}", args.out.display());
    Ok(0)
}
