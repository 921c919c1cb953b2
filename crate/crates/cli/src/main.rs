//! `goag`: drive the graph-of-groups toolkit from the command line.
//!
//! Exit status: 0 for success (and for "yes" answers), 1 when a checked
//! property is falsified (a nontrivial word, a failed verification), 2
//! for unusable input. Output files are written only after the whole
//! computation has finished, so a failing run never leaves partial
//! artifacts behind.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use goag_core::bassserre::{cover_ball, cover_ball_dot, tree_ball, tree_ball_dot};
use goag_core::cat0::{build_gram, verify_gram};
use goag_core::exhaust::{build_chain, verify_chain, ChainStrategy};
use goag_core::intmat::int;
use goag_core::rationalize::RationalizationContext;
use goag_core::suite::run_all;
use goag_core::words::Pi1;
use goag_core::{GraphOfGroups, RatMat, Result};

#[derive(Parser)]
#[command(name = "goag", version, about = "Fundamental groups of graphs of abelian groups")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Subgraph,
    Subgroup,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a graph file and run the structural checks.
    Validate { input: PathBuf },
    /// Print the canonical spanning tree and the non-tree edges.
    Tree { input: PathBuf },
    /// Reduce a word to its normal form.
    Reduce {
        input: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Decide whether a word represents the identity.
    IsTrivial {
        input: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Map a word through the rationalization homomorphism.
    Phi {
        input: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Print the matrices the free generators act by.
    Rho { input: PathBuf },
    /// Dimensions of Q, R and Q/R, the R basis, and the embedding report.
    Qr { input: PathBuf },
    /// Explore a ball of the coset tree around the first vertex (DOT).
    Ball {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(long = "coset-bound", default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
        coset_bound: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Explore a ball of the universal cover of the graph (DOT).
    Cover {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build and verify compatible Gram matrices on a tree of free groups.
    Cat0 { input: PathBuf },
    /// Build an exhaustion chain and check it on random words.
    Chain {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = StrategyArg::Subgraph)]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run every module's sampled invariants against one input.
    Verify {
        input: PathBuf,
        #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load(path: &Path) -> Result<GraphOfGroups> {
    let text = std::fs::read_to_string(path)?;
    GraphOfGroups::from_json(&text)
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// 1x1 matrices read better as plain rationals.
fn scalar_or_matrix(m: &RatMat) -> String {
    if m.rows() == 1 && m.cols() == 1 {
        m.get(0, 0).to_string()
    } else {
        goag_core::ratmat::format_mat(m)
    }
}

fn run(cmd: Cmd) -> Result<u8> {
    match cmd {
        Cmd::Validate { input } => {
            let text = std::fs::read_to_string(&input)?;
            let g = GraphOfGroups::from_json_unchecked(&text)?;
            let report = g.validate();
            println!("{report}");
            if report.is_valid() {
                Ok(0)
            } else {
                Ok(2)
            }
        }
        Cmd::Tree { input } => {
            let g = load(&input)?;
            let tree = g.maximal_tree();
            println!("root: {}", g.vertex(tree.root).id);
            for &e in &tree.oriented {
                println!(
                    "tree edge: {} ({} -> {})",
                    g.edge(e).id,
                    g.vertex(g.edge(e).from).id,
                    g.vertex(g.edge(e).to).id
                );
            }
            for &e in &tree.non_tree {
                println!("non-tree edge: {}", g.edge(e).id);
            }
            Ok(0)
        }
        Cmd::Reduce { input, word } => {
            let pi1 = Pi1::new(load(&input)?)?;
            let w = pi1.parse_word(&word)?;
            let nf = pi1.reduce(&w)?;
            println!("{}", pi1.format_normal_form(&nf));
            Ok(0)
        }
        Cmd::IsTrivial { input, word } => {
            let pi1 = Pi1::new(load(&input)?)?;
            let w = pi1.parse_word(&word)?;
            if pi1.is_trivial(&w)? {
                println!("trivial");
                Ok(0)
            } else {
                println!("nontrivial");
                Ok(1)
            }
        }
        Cmd::Phi { input, word } => {
            let pi1 = Pi1::new(load(&input)?)?;
            let ctx = RationalizationContext::new(&pi1)?;
            let w = pi1.parse_word(&word)?;
            println!("{}", ctx.format_element(&ctx.phi(&w)?));
            Ok(0)
        }
        Cmd::Rho { input } => {
            let pi1 = Pi1::new(load(&input)?)?;
            let ctx = RationalizationContext::new(&pi1)?;
            if ctx.free_rank() == 0 {
                println!("no non-tree edges");
            }
            for i in 0..ctx.free_rank() {
                let id = &ctx.graph().edge(ctx.non_tree_edges()[i]).id;
                println!("rho({id}) = {}", scalar_or_matrix(ctx.rho(i)));
            }
            Ok(0)
        }
        Cmd::Qr { input } => {
            let pi1 = Pi1::new(load(&input)?)?;
            let ctx = RationalizationContext::new(&pi1)?;
            let mut line = format!(
                "dim Q = {}, dim R = {}, dim Q/R = {}",
                ctx.dim_q(),
                ctx.dim_r(),
                ctx.dim_qr()
            );
            for i in 0..ctx.free_rank() {
                let id = &ctx.graph().edge(ctx.non_tree_edges()[i]).id;
                line.push_str(&format!("; rho({id}) = {}", scalar_or_matrix(ctx.rho(i))));
            }
            println!("{line}");
            let basis = ctx.r_basis();
            if basis.rows() == 0 {
                println!("R basis: empty");
            }
            for i in 0..basis.rows() {
                let row: Vec<String> = basis.row(i).iter().map(|x| x.to_string()).collect();
                println!("R basis row: [{}]", row.join(", "));
            }
            for l in &ctx.check_embedding().lines {
                println!("{l}");
            }
            Ok(0)
        }
        Cmd::Ball { input, radius, coset_bound, output } => {
            let pi1 = Pi1::new(load(&input)?)?;
            let ball = tree_ball(&pi1, 0, radius, &int(coset_bound as i64))?;
            emit(&tree_ball_dot(&pi1, &ball), output.as_deref())?;
            Ok(0)
        }
        Cmd::Cover { input, radius, output } => {
            let g = load(&input)?;
            let ball = cover_ball(&g, 0, radius)?;
            emit(&cover_ball_dot(&g, &ball), output.as_deref())?;
            Ok(0)
        }
        Cmd::Cat0 { input } => {
            let g = load(&input)?;
            let asg = build_gram(&g, 0)?;
            let report = verify_gram(&g, &asg)?;
            for v in 0..g.vertex_count() {
                println!(
                    "gram {} = {}",
                    g.vertex(v).id,
                    scalar_or_matrix(&asg.vertex_grams[v])
                );
            }
            for l in &report.lines {
                println!("{l}");
            }
            Ok(if report.is_ok() { 0 } else { 1 })
        }
        Cmd::Chain { input, strategy, samples, seed } => {
            let g = load(&input)?;
            let strategy = match strategy {
                StrategyArg::Subgraph => ChainStrategy::Subgraph,
                StrategyArg::Subgroup => ChainStrategy::Subgroup,
            };
            let chain = build_chain(&g, strategy)?;
            println!("stages: {}", chain.len());
            let report = verify_chain(&chain, samples as usize, seed)?;
            for l in &report.lines {
                println!("{l}");
            }
            Ok(if report.is_ok() { 0 } else { 1 })
        }
        Cmd::Verify { input, samples, seed } => {
            let g = load(&input)?;
            let report = run_all(&g, samples as usize, seed)?;
            for l in &report.lines {
                println!("{l}");
            }
            println!("{}", if report.is_ok() { "all checks passed" } else { "FAILED" });
            Ok(if report.is_ok() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    // die quietly when a downstream pipe closes early (e.g. `goag ... | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
