//! Command-line front end: build, query, verify, bench, render, gen.
//!
//! Exit codes: 0 success, 1 parse/IO error, 2 partition failure at the
//! root, 3 verification violation, 64 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use entroloc::analysis::{run_benchmark, CSV_HEADER};
use entroloc::geom::{parse_rat, Point};
use entroloc::measure::load_measure;
use entroloc::render::{render_node_svg, Layer};
use entroloc::storage::{load_structure, save_structure, verify_structure, Structure};
use entroloc::subdivision::{load_subdivision, normalize_unit_square, save_subdivision};
use entroloc::tree::{build_tree, query, TreeParams};
use entroloc::Error;

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_PARTITION_FAILED: u8 = 2;
const EXIT_VERIFY_FAILED: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "entroloc",
    about = "Distribution-sensitive planar point location",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the partition tree and backup structure for a subdivision and
    /// a query measure.
    Build {
        /// Subdivision JSON file.
        #[arg(long)]
        subdivision: PathBuf,
        /// Measure JSON file.
        #[arg(long)]
        measure: PathBuf,
        /// Output structure file.
        #[arg(long, short = 'o')]
        out: PathBuf,
        /// Partition size per level.
        #[arg(long, default_value_t = 8)]
        r: usize,
        /// Depth constant (rational, 0 < alpha < 1/2).
        #[arg(long, default_value = "1/4")]
        alpha: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cap on the per-level sample size m = ceil(256 r^3 ln r).
        #[arg(long, default_value_t = 20_000)]
        m_cap: usize,
        #[arg(long, default_value_t = 64)]
        max_retries: u32,
        /// Crossing-budget constant.
        #[arg(long, default_value_t = 4.0)]
        c_cross: f64,
        /// Chord-stabbing constant (recorded; used by the bench budgets).
        #[arg(long, default_value_t = 6.0)]
        c_stab: f64,
        /// Point-partition strategy: recursive-median or quantile-grid.
        #[arg(long, default_value = "recursive-median")]
        strategy: String,
    },
    /// Locate a point (original input coordinates; rationals like "2/7").
    Query {
        #[arg(long)]
        structure: PathBuf,
        x: String,
        y: String,
    },
    /// Re-run all exact invariants of a built structure.
    Verify {
        #[arg(long)]
        structure: PathBuf,
    },
    /// Benchmark D-sampled queries and report cost vs entropy (CSV/JSON).
    Bench {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        queries: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Fixture name used in the report rows.
        #[arg(long, default_value = "fixture")]
        name: String,
        /// Write the CSV report here (stdout otherwise).
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the full JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Skip the CSV header row.
        #[arg(long)]
        no_header: bool,
    },
    /// Render layered SVG for one tree node.
    Render {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, default_value_t = 0)]
        node: usize,
        #[arg(long, short = 'o')]
        out: PathBuf,
        /// Comma-separated subset of
        /// triangles,tree,arrangement,triangulation,subdivision.
        #[arg(long)]
        layers: Option<String>,
    },
    /// Write a built-in fixture pair (subdivision + measure) to files.
    Gen {
        /// tri | islands<k> | grid<n> | soup<n>
        #[arg(long)]
        fixture: String,
        /// uniform | hot | skewed | islands | disconnected
        #[arg(long, default_value = "uniform")]
        measure: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        measure_out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap would exit 2, which collides with "partition failed".
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::PartitionFailed { .. } => EXIT_PARTITION_FAILED,
                Error::VerifyFailed { .. } => EXIT_VERIFY_FAILED,
                _ => EXIT_ERROR,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> entroloc::Result<u8> {
    match cli.command {
        Command::Build {
            subdivision,
            measure,
            out,
            r,
            alpha,
            seed,
            m_cap,
            max_retries,
            c_cross,
            c_stab,
            strategy,
        } => {
            if r < 2 {
                eprintln!("usage error: --r must be at least 2");
                return Ok(EXIT_USAGE);
            }
            let alpha = parse_rat(&alpha)?;
            if !(alpha > entroloc::geom::rat_i(0) && alpha < entroloc::geom::rat(1, 2)) {
                eprintln!("usage error: --alpha must satisfy 0 < alpha < 1/2");
                return Ok(EXIT_USAGE);
            }
            let strategy = match strategy.as_str() {
                "recursive-median" => entroloc::partition::Strategy::RecursiveMedian,
                "quantile-grid" => entroloc::partition::Strategy::QuantileGrid,
                other => {
                    eprintln!("usage error: unknown strategy {other:?}");
                    return Ok(EXIT_USAGE);
                }
            };
            let g = load_subdivision(&subdivision)?;
            let d = load_measure(&measure)?;
            let (g, d, transform) = normalize_unit_square(&g, &d)?;
            let params = TreeParams {
                r,
                alpha,
                seed,
                partition: entroloc::partition::PartitionParams {
                    strategy,
                    m_cap,
                    max_retries,
                    c_cross,
                },
            };
            let started = std::time::Instant::now();
            let tree = build_tree(&g, &d, &params)?;
            // Attempt log to stderr: one CSV row per verification attempt.
            eprintln!("node,attempt,m,covers_all,max_incremental_mass,max_line_crossings,accepted");
            for row in &tree.attempt_log {
                eprintln!(
                    "{},{},{},{},{},{},{}",
                    row.node,
                    row.attempt,
                    row.m,
                    row.covers_all,
                    entroloc::geom::format_rat(&row.max_incremental_mass),
                    row.max_line_crossings,
                    row.accepted,
                );
            }
            let structure = Structure { g, d, transform, tree, backup_seed: seed, c_stab };
            save_structure(&structure, &out)?;
            eprintln!(
                "built {} nodes ({} terminal leaves, {} retries) in {:.2?}; wrote {}",
                structure.tree.node_count(),
                structure.tree.terminal_leaf_count(),
                structure.tree.total_retries(),
                started.elapsed(),
                out.display()
            );
            Ok(EXIT_OK)
        }
        Command::Query { structure, x, y } => {
            let s = load_structure(&structure)?;
            let p_raw = Point::new(parse_rat(&x)?, parse_rat(&y)?);
            let p = s.transform.apply(&p_raw);
            let backup = s.backup();
            let (label, stats) = query(&s.tree, &backup, s.g.outer_label(), &p);
            println!(
                "label={label} comparisons={} depth={} terminal={} backup={}",
                stats.comparisons, stats.depth, stats.terminal, stats.used_backup
            );
            Ok(EXIT_OK)
        }
        Command::Verify { structure } => {
            let s = load_structure(&structure)?;
            let summary = verify_structure(&s)?;
            println!(
                "ok: {} nodes, {} partitions, {} terminal labels, {} backup trapezoids",
                summary.nodes_checked,
                summary.partitions_checked,
                summary.terminal_labels_checked,
                summary.backup_trapezoids
            );
            Ok(EXIT_OK)
        }
        Command::Bench { structure, queries, seed, name, csv, json, no_header } => {
            let s = load_structure(&structure)?;
            let backup = s.backup();
            let report = run_benchmark(&name, &s.g, &s.d, &s.tree, &backup, queries, seed)?;
            let mut csv_text = String::new();
            if !no_header {
                csv_text.push_str(CSV_HEADER);
                csv_text.push('\n');
            }
            csv_text.push_str(&report.csv_row());
            csv_text.push('\n');
            match csv {
                Some(path) => std::fs::write(path, csv_text)?,
                None => print!("{csv_text}"),
            }
            if let Some(path) = json {
                std::fs::write(path, serde_json::to_string_pretty(&report)?)?;
            }
            Ok(EXIT_OK)
        }
        Command::Render { structure, node, out, layers } => {
            let s = load_structure(&structure)?;
            let layers = match layers {
                None => Layer::all(),
                Some(list) => {
                    let mut ls = Vec::new();
                    for item in list.split(',') {
                        ls.push(Layer::parse(item.trim())?);
                    }
                    ls
                }
            };
            let svg = render_node_svg(&s.tree, node, &s.g, &layers)?;
            std::fs::write(&out, svg)?;
            eprintln!("wrote {}", out.display());
            Ok(EXIT_OK)
        }
        Command::Gen { fixture, measure, out, measure_out, seed } => {
            let g = match fixture.as_str() {
                "tri" => entroloc::fixtures::tri(),
                s if s.starts_with("islands") => {
                    let k: usize = s["islands".len()..]
                        .parse()
                        .map_err(|_| Error::Invalid(format!("bad fixture {s:?}")))?;
                    entroloc::fixtures::islands(k)
                }
                s if s.starts_with("grid") => {
                    let n: usize = s["grid".len()..]
                        .parse()
                        .map_err(|_| Error::Invalid(format!("bad fixture {s:?}")))?;
                    entroloc::fixtures::grid(n)
                }
                s if s.starts_with("soup") => {
                    let n: usize = s["soup".len()..]
                        .parse()
                        .map_err(|_| Error::Invalid(format!("bad fixture {s:?}")))?;
                    entroloc::fixtures::random_disjoint_segments(n, seed)
                }
                other => return Err(Error::Invalid(format!("unknown fixture {other:?}"))),
            };
            let d = match measure.as_str() {
                "uniform" => entroloc::fixtures::uniform_measure_on_box(),
                "hot" => entroloc::fixtures::hot_cell_measure(),
                "skewed" => entroloc::fixtures::skewed_99_1(),
                "islands" => entroloc::fixtures::islands_skew_measure(2),
                "disconnected" => entroloc::fixtures::disconnected_measure(),
                other => return Err(Error::Invalid(format!("unknown measure {other:?}"))),
            };
            save_subdivision(&g, &out)?;
            entroloc::measure::save_measure(&d, &measure_out)?;
            eprintln!("wrote {} and {}", out.display(), measure_out.display());
            Ok(EXIT_OK)
        }
    }
}
