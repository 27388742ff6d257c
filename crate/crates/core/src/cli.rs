//! Command-line front end. [`run`] parses arguments, executes one command
//! and returns the process exit status: 0 on success, 1 when a
//! verification or search fails, 2 for malformed input.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::atlas::{self, ConstructionParams};
use crate::bipartite::{
    birank, classify, local_ranks, partial_transpose, BipartiteState, ProductVector, Verdict,
};
use crate::error::{Error, Result};
use crate::io::{read_state_file, write_state, write_state_file, Meta};
use crate::numerics::{eig_hermitian, kernel_basis, DEFAULT_TAU};
use crate::pencil::product_vectors_in_subspace_3x3;
use crate::report::{verify_paper, Check, Report, DEFAULT_SEED};
use crate::surgery::{
    greedy_decomposition, is_edge_state, length_2x3, range_product_vectors_2xn, subtract,
    subtraction_analysis, theorem23_decompose, CoreKind, EdgeKind, DEFAULT_GRID,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "birank", version, about = "Biranks, subtraction and lengths of qubit-qudit and two-qutrit states")]
pub struct Cli {
    /// Relative tolerance for ranks and PPT decisions.
    #[arg(long, global = true, default_value_t = DEFAULT_TAU)]
    pub tau: f64,
    /// Number of projective points in joint-range searches.
    #[arg(long, global = true, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write the state (construct, subtract) or the report (other commands) here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a named state family.
    Construct(Box<ConstructArgs>),
    /// Birank, PPT verdict, spectra and local ranks of a state file.
    Analyze(InputArgs),
    /// Subtract a multiple of a product projector.
    Subtract(SubtractArgs),
    /// Length of a separable 2 x 3 state (or decomposition of a 2 x N state).
    Length(InputArgs),
    /// Product vectors in the joint range (2 x N) or in range and kernel (3 x 3).
    ProductVectors(InputArgs),
    /// Edge-state test.
    Edge(InputArgs),
    /// Split a 2 x N state of birank (N+1, N+1) into product summands and a core.
    Decompose(InputArgs),
    /// Check every explicit state and claim.
    VerifyPaper,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// State file in the shared JSON format.
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct SubtractArgs {
    pub input: PathBuf,
    /// Product vector as JSON: {"a": [[re, im], ...], "b": [[re, im], ...]}.
    #[arg(long)]
    pub vector: String,
    /// Weight to subtract; defaults to the threshold min(lambda0, lambda1).
    #[arg(long)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(long)]
    pub family: String,
    /// Fixed example id (family `fixed`).
    #[arg(long)]
    pub id: Option<String>,
    #[arg(long = "N", alias = "n")]
    pub n: Option<usize>,
    #[arg(long)]
    pub j: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub d: Option<f64>,
    #[arg(long)]
    pub p0: Option<f64>,
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long)]
    pub p2: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub epsilon_prime: Option<f64>,
    /// Comma-separated real parameters.
    #[arg(long, value_delimiter = ',')]
    pub a_list: Option<Vec<f64>>,
    /// Comma-separated chain weights.
    #[arg(long, value_delimiter = ',')]
    pub c_list: Option<Vec<f64>>,
}

impl From<&ConstructArgs> for ConstructionParams {
    fn from(a: &ConstructArgs) -> Self {
        Self {
            family: a.family.clone(),
            id: a.id.clone(),
            n: a.n,
            j: a.j,
            k: a.k,
            p: a.p,
            a: a.a,
            b: a.b,
            c: a.c,
            d: a.d,
            p0: a.p0,
            p1: a.p1,
            p2: a.p2,
            epsilon: a.epsilon,
            epsilon_prime: a.epsilon_prime,
            a_list: a.a_list.clone(),
            c_list: a.c_list.clone(),
        }
    }
}

/// Exit status for an error: 2 when the input is at fault, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Format(_)
        | Error::Io(_)
        | Error::Json(_)
        | Error::Contract(_)
        | Error::Dimension(_)
        | Error::Domain(_)
        | Error::InvalidParameter(_)
        | Error::WouldBeNpt { .. } => 2,
        _ => 1,
    }
}

/// Parses `args` (including the program name) and runs the command,
/// printing the report to stdout. Returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok((report, stdout)) => {
            print!("{stdout}");
            if report.all_passed() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let mut report = Report::new(command_name(&cli.command), cli.tau, cli.grid, cli.seed);
            report.set("error", e.to_string());
            report.set("exit_code", exit_code(&e));
            eprint!("{}", render(&report, cli.format));
            exit_code(&e)
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Construct(_) => "construct",
        Command::Analyze(_) => "analyze",
        Command::Subtract(_) => "subtract",
        Command::Length(_) => "length",
        Command::ProductVectors(_) => "product-vectors",
        Command::Edge(_) => "edge",
        Command::Decompose(_) => "decompose",
        Command::VerifyPaper => "verify-paper",
    }
}

fn render(r: &Report, f: Format) -> String {
    match f {
        Format::Json => r.to_json() + "\n",
        Format::Text => r.to_text(),
    }
}

fn load(path: &Path) -> Result<BipartiteState> {
    Ok(read_state_file(path)?.state)
}

/// Runs the command; returns the report and the text for stdout.
pub fn execute(cli: &Cli) -> Result<(Report, String)> {
    if !(cli.tau > 0.0 && cli.tau < 1.0) {
        return Err(Error::InvalidParameter(format!("--tau must lie in (0, 1), got {}", cli.tau)));
    }
    if cli.grid < 8 {
        return Err(Error::InvalidParameter(format!("--grid must be at least 8, got {}", cli.grid)));
    }
    let (tau, grid) = (cli.tau, cli.grid);
    let mut report = Report::new(command_name(&cli.command), tau, grid, cli.seed);
    let mut state_out: Option<(BipartiteState, Meta)> = None;
    match &cli.command {
        Command::Construct(args) => {
            let params = ConstructionParams::from(args.as_ref());
            let (state, cert, used) = atlas::construct(&params)?;
            report.set("family", &params.family);
            report.set("params", &used);
            report.set("dims", [state.dim_a(), state.dim_b()]);
            if let Some(cert) = cert {
                let chk = cert.check(&state, tau)?;
                report.push(Check::new(
                    "certificate",
                    &params.family,
                    serde_json::to_value(&cert)?,
                    serde_json::to_value(chk)?,
                    chk.pass,
                ));
            }
            state_out = Some((state, Meta::new(&params.family, used, tau)));
        }
        Command::Analyze(a) => {
            let rho = load(&a.input)?;
            analyze(&rho, tau, &mut report)?;
        }
        Command::Subtract(s) => {
            let rho = load(&s.input)?;
            let pv: ProductVector = serde_json::from_str(&s.vector)
                .map_err(|e| Error::Format(format!("--vector: {e}")))?;
            let an = subtraction_analysis(&rho, &pv, tau)?;
            let lambda = s.lambda.unwrap_or_else(|| an.threshold());
            let sub = subtract(&rho, &pv, lambda, tau)?;
            report.set("analysis", an);
            report.set("lambda", lambda);
            report.set("before", [sub.before.r, sub.before.s]);
            report.set("predicted", [sub.predicted.r, sub.predicted.s]);
            report.set("observed", [sub.observed.r, sub.observed.s]);
            report.push(Check::new(
                "birank drop confirmed",
                "subtract",
                json!([sub.predicted.r, sub.predicted.s]),
                json!([sub.observed.r, sub.observed.s]),
                sub.confirmed(),
            ));
            state_out = Some((sub.state, Meta::new("subtract", json!({ "lambda": lambda }), tau)));
        }
        Command::Length(a) => {
            let rho = load(&a.input)?;
            let res = if (rho.dim_a(), rho.dim_b()) == (2, 3) {
                length_2x3(&rho, None, tau)?
            } else {
                greedy_decomposition(&rho, &[], tau)?
            };
            report.set("length", res.length);
            report.set("chain", res.chain.iter().map(|b| [b.r, b.s]).collect::<Vec<_>>());
            report.set("reconstruction_error", res.reconstruction_error);
            report.set("terms", &res.terms);
        }
        Command::ProductVectors(a) => {
            let rho = load(&a.input)?;
            product_vectors(&rho, grid, tau, &mut report)?;
        }
        Command::Edge(a) => {
            let rho = load(&a.input)?;
            let v = is_edge_state(&rho, grid, tau)?;
            report.set("verdict", v.verdict);
            report.set("edge", &v);
            if v.verdict == EdgeKind::Inconclusive {
                report.push(Check::new("edge decision", "edge", json!("decided"), json!("inconclusive"), false));
            }
        }
        Command::Decompose(a) => {
            let rho = load(&a.input)?;
            let d = theorem23_decompose(&rho, grid, tau)?;
            report.set("core_kind", d.core_kind);
            report.set("summands", &d.summands);
            report.set("core_birank", {
                let b = birank(&d.core, tau)?;
                [b.r, b.s]
            });
            report.set("core_terms", &d.core_terms);
            if let Some(v) = &d.edge {
                report.set("edge", v);
            }
            if let Some(t) = d.separable_terms() {
                report.set("length", t.len());
            }
            report.push(Check::new(
                "direct sum on B",
                "decompose",
                json!(true),
                json!(d.direct_sum_verified),
                d.direct_sum_verified,
            ));
            if d.core_kind == CoreKind::Inconclusive {
                report.push(Check::new("core decision", "decompose", json!("decided"), json!("inconclusive"), false));
            }
        }
        Command::VerifyPaper => {
            report = verify_paper(tau, grid, cli.seed);
        }
    }
    let mut stdout = String::new();
    if let Some((state, meta)) = state_out {
        match &cli.out {
            Some(path) => {
                write_state_file(path, &state, Some(&meta))?;
                stdout.push_str(&render(&report, cli.format));
            }
            None => stdout.push_str(&write_state(&state, Some(&meta))?),
        }
    } else {
        let text = render(&report, cli.format);
        if let Some(path) = &cli.out {
            std::fs::write(path, &text)?;
        }
        stdout.push_str(&text);
    }
    Ok((report, stdout))
}

fn analyze(rho: &BipartiteState, tau: f64, report: &mut Report) -> Result<()> {
    let b = birank(rho, tau)?;
    let cls = classify(rho, tau)?;
    let (ra, rb) = local_ranks(rho, tau)?;
    report.set("dims", [rho.dim_a(), rho.dim_b()]);
    report.set("trace", rho.trace());
    report.set("birank", [b.r, b.s]);
    report.set("verdict", cls.verdict);
    report.set("negative_count", cls.negative_count);
    report.set("min_eigenvalue_partial_transpose", cls.min_eigenvalue);
    report.set("local_ranks", [ra, rb]);
    report.set("eigenvalues", eig_hermitian(rho.matrix())?.values);
    report.set("eigenvalues_partial_transpose", eig_hermitian(partial_transpose(rho).matrix())?.values);
    if cls.verdict == Verdict::Ppt {
        report.set("rank_exceeds_local_ranks", b.r > ra.max(rb));
    }
    Ok(())
}

fn product_vectors(rho: &BipartiteState, grid: usize, tau: f64, report: &mut Report) -> Result<()> {
    match (rho.dim_a(), rho.dim_b()) {
        (2, _) => {
            let vs = range_product_vectors_2xn(rho, grid, tau)?;
            report.set("joint_range", &vs);
            report.set("count", vs.len());
        }
        (3, 3) => {
            let spec = eig_hermitian(rho.matrix())?;
            let range = spec.range_vectors(tau);
            let kernel = kernel_basis(rho.matrix(), tau)?;
            for (name, basis) in [("range", range), ("kernel", kernel)] {
                if (4..=5).contains(&basis.len()) {
                    let vs = product_vectors_in_subspace_3x3(&basis, tau)?;
                    report.set(&format!("{name}_count"), vs.len());
                    report.set(name, &vs);
                } else {
                    report.set(name, json!({ "skipped": format!("dimension {}", basis.len()) }));
                }
            }
        }
        (m, n) => {
            return Err(Error::Dimension(format!(
                "product-vector search covers 2 x N and 3 x 3 states, got {m} x {n}"
            )))
        }
    }
    Ok(())
}
