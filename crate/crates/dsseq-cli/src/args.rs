use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

/// Davenport-Schinzel sequences: generate, measure, verify and search.
///
/// Output is JSON unless `--text` is given. Exit codes: 0 success, 1 a
/// verified property failed, 2 usage error, 3 a budget was exhausted or a
/// search did not complete.
#[derive(Debug, Parser)]
#[command(name = "dsseq", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pub text: bool,

    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Oracle result cache (line-delimited JSON). Defaults to $DSSEQ_CACHE.
    #[arg(long, global = true, env = "DSSEQ_CACHE")]
    pub cache: Option<PathBuf>,

    /// Search node budget for oracles.
    #[arg(long, global = true, default_value_t = 5_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_nodes: u64,

    /// Search time limit for oracles, in seconds.
    #[arg(long, global = true, default_value_t = 300, value_parser = clap::value_parser!(u64).range(1..))]
    pub time_limit: u64,

    /// Longest sequence an oracle may build.
    #[arg(long, global = true, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_length: u64,

    /// Largest sequence `generate` will materialize, in symbols.
    #[arg(long, global = true, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub length_budget: u64,

    /// Bit budget for exact big-integer values.
    #[arg(long, global = true, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub bits: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Materialize a construction as a blocked sequence.
    #[command(subcommand)]
    Generate(Construction),

    /// Exact statistics of a construction without materializing it.
    #[command(subcommand)]
    Stats(StatsTarget),

    /// Check properties of a sequence file.
    Verify(VerifyArgs),

    /// Exhaustive search for small extremal values.
    #[command(subcommand)]
    Oracle(OracleCmd),

    /// Constant families of the upper-bound recurrences.
    #[command(subcommand)]
    Constants(ConstantsCmd),

    /// Ackermann hierarchy and its inverses.
    #[command(subcommand)]
    Ackermann(AckermannCmd),

    /// Formation detection and pattern embedding.
    #[command(subcommand)]
    Formations(FormationsCmd),

    /// Run the full verification suite.
    Suite(SuiteArgs),
}

#[derive(Debug, Subcommand)]
pub enum Construction {
    /// Order-3 construction Z_d(m).
    Z {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        m: u64,
    },
    /// Even-order construction S^s_k(m).
    Even {
        #[arg(long)]
        s: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        m: u64,
    },
    /// Order-3 sequence on at most n symbols from copies of Z_d(d).
    Interpolated {
        #[arg(long)]
        n: u64,
    },
    /// Blocked sequence with no (r,2)-formation and (r-1)(m-1) symbols.
    Aff {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        m: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum StatsTarget {
    Z {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        m: u64,
    },
    Even {
        #[arg(long)]
        s: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        m: u64,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Sequence file: either a bare `{blocks, special}` object or `generate` output.
    #[arg(long)]
    pub file: PathBuf,

    /// Comma-separated properties: `dsN`, `sparse=R`, `multiplicity=K`,
    /// `min-multiplicity=K`, `blocks-distinct`, `formation-free=R:S`,
    /// `construction` (invariants of the construction named in the file).
    #[arg(long, default_value = "construction")]
    pub props: String,
}

#[derive(Debug, Subcommand)]
pub enum OracleCmd {
    /// Longest order-s DS sequence on n symbols.
    Lambda {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        n: usize,
    },
    /// Longest order-s DS sequence on n symbols in at most m blocks.
    Psi {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// Most symbols in m blocks, each symbol in k blocks, no alternation of length s+2.
    Ads {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
    },
    /// Most symbols in m blocks, each symbol in k blocks, no (r,s)-formation.
    Aff {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
    },
    /// Longest sparse sequence on n symbols avoiding a pattern.
    Ex {
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        n: usize,
    },
    /// Longest r-sparse sequence on n symbols without an (r,s)-formation.
    F {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        n: usize,
    },
}

/// An inclusive integer range written `a` or `a-b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub lo: u32,
    pub hi: u32,
}

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("bad number {t:?}: {e}"));
        let (lo, hi) = match s.split_once('-') {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => (parse(s)?, parse(s)?),
        };
        if lo > hi {
            return Err(format!("empty range {s:?}"));
        }
        Ok(Span { lo, hi })
    }
}

#[derive(Debug, Subcommand)]
pub enum ConstantsCmd {
    /// P_{s,k} and Q_{s,k}.
    Pq {
        #[arg(long)]
        s: Span,
        #[arg(long)]
        k: Span,
        /// Multiplicative slack constants of the k >= 3 recurrence.
        #[arg(long, default_value_t = 1)]
        d_s: u64,
        #[arg(long, default_value_t = 1)]
        d_prime_s: u64,
    },
    /// R_s(d).
    R {
        #[arg(long)]
        s: Span,
        #[arg(long)]
        d: Span,
    },
    /// Symbol multiplicity of the even construction.
    Mu {
        #[arg(long)]
        s: Span,
        #[arg(long)]
        k: Span,
    },
    /// Threshold m0(s).
    M0 {
        #[arg(long)]
        s: Span,
    },
    /// Log-space growth diagnostics of one family.
    Growth {
        /// One of p, q, r, mu.
        #[arg(long)]
        family: String,
        #[arg(long)]
        s: u32,
        #[arg(long, default_value = "2-40")]
        index: Span,
    },
}

#[derive(Debug, Subcommand)]
pub enum AckermannCmd {
    /// A(n), or A_k(n) with --k.
    Eval {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: Option<u32>,
    },
    /// alpha(x), or alpha_k(x) with --k.
    Alpha {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        k: Option<u32>,
    },
    /// The hatted hierarchy value Â_k(m).
    Ahat {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum FormationsCmd {
    /// Rename a pattern so it embeds in a formation.
    Embed {
        /// Canonical pattern, e.g. `abcab` or `0 1 2 0 1`.
        #[arg(long)]
        pattern: String,
        /// JSON list of permutations, e.g. `[[0,1,2],[2,1,0]]`.
        #[arg(long)]
        formation: String,
    },
    /// Search a sequence for an (r,s)-formation.
    Check {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
    },
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// Run only these check ids (comma-separated).
    #[arg(long)]
    pub only: Option<String>,
}
