use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "rw", version, about = "Structural Ramsey checks over finite categories of finite structures")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Structure catalog (JSON); expanded catalogs are accepted too.
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,
    /// Abstract category table (JSON).
    #[arg(long, global = true, conflicts_with = "catalog")]
    pub category: Option<PathBuf>,
    /// Work in the opposite category.
    #[arg(long, global = true)]
    pub op: bool,
    /// Write the report here instead of stdout.
    #[arg(short = 'o', long, global = true)]
    pub output: Option<PathBuf>,
    /// Print a human-readable summary to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    /// Seed for randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    pub timing: bool,
    #[arg(long, global = true, env = "RW_BUDGET_NODES", value_parser = clap::value_parser!(u64).range(1..))]
    pub budget_nodes: Option<u64>,
    #[arg(long, global = true, env = "RW_BUDGET_SECS", value_parser = clap::value_parser!(u64).range(1..))]
    pub budget_secs: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Category tables: axioms, skeleton, opposite, generated catalogs.
    #[command(subcommand)]
    Cat(CatCmd),
    /// Decide C → (B)^A_{k,t}.
    Arrow(ArrowArgs),
    /// Catalog-relative bounds on the small Ramsey degree of A.
    Degree(DegreeArgs),
    /// Amalgamation: weak amalgamation, 2-out-of-k, failure chains, Claim 1.
    Amalgam(AmalgamArgs),
    /// Truncated sequences: colimits, weak Fraïssé and homogeneity checks.
    #[command(subcommand)]
    Seq(SeqCmd),
    /// Coloring expansions C* → C.
    #[command(subcommand)]
    Expand(ExpandCmd),
    /// Re-verify every certificate in a report.
    Replay(ReplayArgs),
}

#[derive(Debug, Subcommand)]
pub enum CatCmd {
    /// Category laws, (C1)-(C5), directedness and local finiteness.
    Check,
    /// Isomorphism classes with their canonical isomorphisms.
    Skeleton,
    /// Write the opposite category as an abstract table.
    Op,
    /// Write a generated catalog.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Finite linear orders LO1..LOn.
    Lo,
    /// All graphs on 1..n vertices up to isomorphism.
    Graphs,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub max: usize,
}

#[derive(Debug, Args)]
pub struct ArrowArgs {
    #[arg(long = "C")]
    pub c: String,
    #[arg(long = "B")]
    pub b: String,
    #[arg(long = "A")]
    pub a: String,
    #[arg(short = 'k', value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    #[arg(short = 't', value_parser = clap::value_parser!(u64).range(1..))]
    pub t: u64,
    /// Also run the brute-force oracle and compare.
    #[arg(long)]
    pub oracle: bool,
    /// Largest number of colorings the oracle may enumerate.
    #[arg(long, default_value_t = 1 << 24)]
    pub oracle_budget: u64,
    /// Write the DIMACS encoding of the bad-coloring problem.
    #[arg(long)]
    pub cnf: Option<PathBuf>,
    /// Disable symmetry breaking.
    #[arg(long)]
    pub no_symmetry: bool,
}

#[derive(Debug, Args)]
pub struct DegreeArgs {
    #[arg(long = "A")]
    pub a: String,
    #[arg(long = "kmax", alias = "k-max", default_value_t = 3)]
    pub k_max: usize,
    /// Only consider B of at most this size.
    #[arg(long)]
    pub b_max_size: Option<usize>,
    /// Run the lower-bound search for this k (with --lower-n).
    #[arg(long, requires = "lower_n")]
    pub lower_k: Option<usize>,
    #[arg(long, requires = "lower_k", value_parser = clap::value_parser!(u64).range(2..))]
    pub lower_n: Option<u64>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["wap", "two_of_k", "chain", "claim1", "arrow"])))]
pub struct AmalgamArgs {
    /// Weak amalgamation over the whole catalog.
    #[arg(long)]
    pub wap: bool,
    #[arg(long)]
    pub max_candidates: Option<usize>,
    /// 2-out-of-k amalgamation at A.
    #[arg(long, requires = "a")]
    pub two_of_k: Option<usize>,
    /// Iterate the failure chain from id_A.
    #[arg(long, requires = "a")]
    pub chain: bool,
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    /// Run Claim 1 on the morphisms given by --f.
    #[arg(long, requires_all = ["a", "f"])]
    pub claim1: bool,
    #[arg(long, value_delimiter = ',')]
    pub f: Vec<String>,
    /// Is the named morphism an amalgamation arrow?
    #[arg(long)]
    pub arrow: Option<String>,
    #[arg(long = "A")]
    pub a: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum SeqCmd {
    /// Colimit of a structure chain.
    Colim(SeqFileArgs),
    /// Weak Fraïssé conditions of a truncated sequence.
    Wfcheck(WfArgs),
    /// Weak homogeneity of one object for a subcategory.
    Whom(WhomArgs),
    /// The cancellation lemma on random transformations between linear-order chains.
    Monotest(MonotestArgs),
}

#[derive(Debug, Args)]
pub struct SeqFileArgs {
    #[arg(long)]
    pub seq: PathBuf,
}

#[derive(Debug, Args)]
pub struct WfArgs {
    #[arg(long)]
    pub seq: PathBuf,
    #[arg(long, default_value_t = usize::MAX)]
    pub m_max: usize,
    #[arg(long, default_value_t = usize::MAX)]
    pub k_max: usize,
    /// Catalog objects to test against (default: all).
    #[arg(long, value_delimiter = ',')]
    pub objects: Vec<String>,
}

#[derive(Debug, Args)]
pub struct WhomArgs {
    #[arg(long = "S")]
    pub s: String,
    /// Objects of the subcategory (default: all).
    #[arg(long, value_delimiter = ',')]
    pub sub: Vec<String>,
    /// Also test ultrahomogeneity.
    #[arg(long)]
    pub ultra: bool,
}

#[derive(Debug, Args)]
pub struct MonotestArgs {
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Length of the truncated sequences.
    #[arg(long, default_value_t = 3)]
    pub len: usize,
}

#[derive(Debug, Args)]
pub struct DegreeOpts {
    /// Number of colors for a representative, as NAME=T; repeatable.
    #[arg(long = "degree", value_parser = parse_degree)]
    pub degrees: Vec<(String, u32)>,
    /// Largest fiber to enumerate.
    #[arg(long, default_value_t = 1 << 16)]
    pub max_fiber: u64,
}

fn parse_degree(s: &str) -> Result<(String, u32), String> {
    let (name, t) = s.split_once('=').ok_or_else(|| format!("expected NAME=T, got '{s}'"))?;
    let t: u32 = t.parse().map_err(|e| format!("bad degree in '{s}': {e}"))?;
    if t == 0 {
        return Err(format!("degree in '{s}' must be positive"));
    }
    Ok((name.to_string(), t))
}

#[derive(Debug, Subcommand)]
pub enum ExpandCmd {
    /// Write an expanded catalog with every expansion of the chosen objects.
    Build {
        #[command(flatten)]
        degrees: DegreeOpts,
        /// Objects to expand (default: all).
        #[arg(long, value_delimiter = ',')]
        objects: Vec<String>,
    },
    /// Forgetful-functor properties; uses the expansions listed in the
    /// catalog file as fibers when present.
    Check {
        #[command(flatten)]
        degrees: DegreeOpts,
    },
    /// Logical action, orbits, ages and the minimal-age selection for F.
    Orbits {
        #[command(flatten)]
        degrees: DegreeOpts,
        #[arg(long = "F")]
        f: String,
    },
    /// Expansion property over the age of the selected expansion of F,
    /// or over the expansions listed in the catalog file.
    Ep {
        #[command(flatten)]
        degrees: DegreeOpts,
        #[arg(long = "F")]
        f: Option<String>,
        #[arg(long)]
        max_size: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub report: PathBuf,
    /// Also re-run the searches behind arrow exhaustion statements.
    #[arg(long)]
    pub deep: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn degree_values() {
        assert_eq!(parse_degree("K2=2"), Ok(("K2".into(), 2)));
        assert!(parse_degree("K2").is_err());
        assert!(parse_degree("K2=0").is_err());
    }

    #[test]
    fn capital_flags() {
        let cli = Cli::try_parse_from(["rw", "arrow", "--catalog", "x", "--C", "LO6", "--B", "LO3", "--A", "LO2", "-k", "2", "-t", "1"]).unwrap();
        let Command::Arrow(a) = cli.command else { panic!() };
        assert_eq!((a.c.as_str(), a.k, a.t), ("LO6", 2, 1));
        assert!(Cli::try_parse_from(["rw", "arrow", "--C", "a", "--B", "b", "--A", "c", "-k", "0", "-t", "1"]).is_err());
        assert!(Cli::try_parse_from(["rw", "amalgam"]).is_err());
    }
}
