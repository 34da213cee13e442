//! `voxbox`: compress and decompress voxel fields with box covers, and
//! generate and check the reduction instances.
//!
//! Statistics are printed to stdout as `key=value` lines. Exit codes: 0 on
//! success, 1 on invalid input, 2 when a solver fails, 3 on I/O errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use thiserror::Error;
use voxbox_core::boxgeom::{rasterize, RangeSpace};
use voxbox_core::codec::{deserialize, Codeword};
use voxbox_core::engine::{compress_exact, compress_greedy, decompress_payload, verify_index_consistency};
use voxbox_core::field::VoxelField;
use voxbox_core::poly::{parse_polynomial, parse_self_describing, PiecewisePolynomial};
use voxbox_core::rational::{fmt_rational, parse_rational};
use voxbox_core::reductions::{
    build_apx_instance, build_np_instance, build_vgrid_instance, phi_embed, BinaryMatrix, Special3SC,
};
use voxbox_core::sweepline::cover_complement;
use voxbox_core::{Error, Q};

#[derive(Debug, Parser)]
#[command(name = "voxbox", version, about = "Box-cover compression of voxel fields under an energy distortion bound")]
struct Cli {
    /// Worker threads; outputs are identical for every value.
    #[arg(long, env = "VOXBOX_THREADS", global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compress a `.vvf` field with a `.poly` energy into a `.vbx` codeword.
    Compress(CompressArgs),
    /// Reconstruct a `.vvf` field from a `.vbx` codeword.
    Decompress(DecompressArgs),
    /// Generate reduction instances.
    Gen {
        #[command(subcommand)]
        kind: GenCommand,
    },
    /// Cover the cells outside a planar range space with disjoint boxes.
    CoverComplement(CoverArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Greedy,
    Exact,
}

#[derive(Debug, Args)]
struct CompressArgs {
    /// Input field (`.vvf`).
    #[arg(long)]
    field: PathBuf,
    /// Energy function (`.poly`).
    #[arg(long)]
    poly: PathBuf,
    /// Distortion bound, a rational in (0, 1).
    #[arg(long)]
    eps: String,
    /// Cover search.
    #[arg(long, value_enum, default_value = "greedy")]
    mode: Mode,
    /// Largest voxel count the exact search accepts; required with `--mode exact`.
    #[arg(long)]
    budget: Option<usize>,
    /// Output codeword (`.vbx`).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct DecompressArgs {
    /// Input codeword (`.vbx`).
    #[arg(long)]
    code: PathBuf,
    /// Output field (`.vvf`).
    #[arg(long)]
    out: PathBuf,
    /// Check the reconstruction against the original field.
    #[arg(long, requires = "field")]
    verify: bool,
    /// Original field (`.vvf`) for `--verify`.
    #[arg(long)]
    field: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum GenCommand {
    /// Compression instance of a binary matrix rectangle-cover question.
    NpMatrix(NpArgs),
    /// Random Special-3SC set system.
    Special3sc(SpecialArgs),
    /// Voxel-grid instance (embedded boxes plus complement cover) of a set system.
    Vgrid(VgridArgs),
    /// Compression instance of the voxel-grid instance of a set system.
    Apx(ApxArgs),
}

#[derive(Debug, Args)]
struct NpArgs {
    /// Use the 5 x 5 example matrix.
    #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
    fig3: bool,
    /// Matrix rows of 0/1 separated by commas, e.g. `010,111,010`.
    #[arg(long)]
    matrix: Option<String>,
    /// Rectangle budget for the ones.
    #[arg(long, default_value_t = 1)]
    k_prime: usize,
    /// Output field (`.vvf`).
    #[arg(long)]
    field: PathBuf,
    /// Output energy (`.poly`).
    #[arg(long)]
    poly: PathBuf,
}

#[derive(Debug, Args)]
struct SpecialArgs {
    /// Number of groups (even).
    #[arg(long)]
    m: usize,
    /// Sampler seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output instance (`.s3sc`).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct VgridArgs {
    /// Input instance (`.s3sc`).
    #[arg(long)]
    instance: PathBuf,
    /// Output range space.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ApxArgs {
    /// Input instance (`.s3sc`).
    #[arg(long)]
    instance: PathBuf,
    /// Output field (`.vvf`).
    #[arg(long)]
    field: PathBuf,
    /// Output energy (`.poly`).
    #[arg(long)]
    poly: PathBuf,
}

#[derive(Debug, Args)]
struct CoverArgs {
    /// Input range space on `[q]^2`.
    #[arg(long)]
    input: PathBuf,
    /// Output range space holding the complement boxes.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Solver(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Io(_)) | CliError::Io { .. } => 3,
            CliError::Core(Error::SolverFailure { .. } | Error::BudgetExceeded { .. }) | CliError::Solver(_) => 2,
            CliError::Core(_) | CliError::Validation(_) => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn stat(key: &str, value: impl std::fmt::Display) {
    println!("{key}={value}");
}

fn read_poly(path: &Path, dim: usize) -> CliResult<PiecewisePolynomial> {
    let text = read_text(path)?;
    let src: String = text.lines().filter(|l| !l.trim_start().starts_with('#')).collect::<Vec<_>>().join("\n");
    let t = src.trim_start();
    let f = if t.starts_with("dim") || t.starts_with("vars") { parse_self_describing(&src)? } else { parse_polynomial(&src, dim)? };
    if f.dim() != dim {
        return Err(CliError::Validation(format!("energy has {} variables but field vectors have {dim}", f.dim())));
    }
    Ok(f)
}

fn parse_eps(s: &str) -> CliResult<Q> {
    let eps = parse_rational(s)?;
    if eps <= Q::from_integer(0.into()) || eps >= Q::from_integer(1.into()) {
        return Err(CliError::Validation(format!("eps = {s} must lie in the open interval (0, 1)")));
    }
    Ok(eps)
}

fn cmd_compress(a: &CompressArgs) -> CliResult<()> {
    let field = VoxelField::from_vvf(&read_text(&a.field)?)?;
    let f = read_poly(&a.poly, field.d())?;
    let eps = parse_eps(&a.eps)?;
    let res = match a.mode {
        Mode::Greedy => compress_greedy(&field, &f, &eps)?,
        Mode::Exact => {
            let budget = a.budget.ok_or_else(|| CliError::Validation("--mode exact requires --budget".into()))?;
            compress_exact(&field, &f, &eps, budget)?
        }
    };
    write_bytes(&a.out, &res.codeword.to_vbx())?;
    stat("voxels", res.stats.voxels);
    stat("entries", res.stats.entries);
    stat("candidates", res.stats.candidates);
    stat("field_bits", res.stats.field_bits);
    stat("bit_length", res.stats.code_bits);
    stat("ratio", fmt_rational(&res.ratio));
    stat("eps", fmt_rational(&eps));
    stat("eps_star", fmt_rational(res.payload.eps_star()));
    Ok(())
}

fn cmd_decompress(a: &DecompressArgs) -> CliResult<()> {
    let bytes = std::fs::read(&a.code).map_err(|source| CliError::Io { path: a.code.clone(), source })?;
    let payload = deserialize(&Codeword::from_vbx(&bytes)?)?;
    let recon = decompress_payload(&payload)?;
    write_bytes(&a.out, recon.field_hat.to_vvf().as_bytes())?;
    stat("entries", payload.entries().len());
    stat("voxels", recon.field_hat.n());
    if a.verify {
        let path = a.field.as_ref().expect("clap enforces --field with --verify");
        let original = VoxelField::from_vvf(&read_text(path)?)?;
        let bad = verify_index_consistency(&original, &recon, payload.f(), payload.eps())?;
        stat("violations", bad.len());
        if let Some(first) = bad.first() {
            return Err(CliError::Solver(format!("{} voxels exceed the distortion bound, first at {:?}", bad.len(), first.0)));
        }
    }
    Ok(())
}

fn write_instance(field: &VoxelField, f: &PiecewisePolynomial, header: &str, field_path: &Path, poly_path: &Path) -> CliResult<()> {
    write_bytes(field_path, format!("# {header}\n{}", field.to_vvf()).as_bytes())?;
    write_bytes(poly_path, format!("# {header}\n{}\n", f.canonical()).as_bytes())
}

fn cmd_gen(kind: &GenCommand) -> CliResult<()> {
    match kind {
        GenCommand::NpMatrix(a) => {
            let mat = if a.fig3 {
                BinaryMatrix::fig3()
            } else {
                let rows: Vec<&str> = a.matrix.as_deref().unwrap_or_default().split(',').map(str::trim).collect();
                BinaryMatrix::from_rows(&rows)?
            };
            let inst = build_np_instance(&mat, a.k_prime)?;
            let header = format!("voxbox gen np-matrix, m={}, k_prime={}", mat.m(), a.k_prime);
            write_instance(&inst.field, &inst.f, &header, &a.field, &a.poly)?;
            stat("m", mat.m());
            stat("ones", mat.nnz());
            stat("k_prime", a.k_prime);
            stat("k_bits", inst.k_bits);
            stat("eps", fmt_rational(&inst.eps));
        }
        GenCommand::Special3sc(a) => {
            let inst = Special3SC::sample(a.m, a.seed)?;
            let text = format!("# voxbox gen special3sc, m={}, seed={}\n{}", a.m, a.seed, inst.to_text());
            write_bytes(&a.out, text.as_bytes())?;
            stat("n", inst.n());
            stat("m", inst.m());
            stat("sets", 5 * inst.m());
        }
        GenCommand::Vgrid(a) => {
            let inst = Special3SC::from_text(&read_text(&a.instance)?)?;
            let v = build_vgrid_instance(&phi_embed(&inst)?)?;
            let text = format!("# voxbox gen vgrid, m={}, boxes after the originals form the complement cover\n{}", inst.m(), v.range_space().to_text());
            write_bytes(&a.out, text.as_bytes())?;
            stat("q", v.q);
            stat("originals", v.originals().len());
            stat("complement", v.complement().len());
        }
        GenCommand::Apx(a) => {
            let inst = Special3SC::from_text(&read_text(&a.instance)?)?;
            let v = build_vgrid_instance(&phi_embed(&inst)?)?;
            let apx = build_apx_instance(&v)?;
            let header = format!("voxbox gen apx, m={}, q={}", inst.m(), v.q);
            write_instance(&apx.field, &apx.f, &header, &a.field, &a.poly)?;
            stat("q", v.q);
            stat("boxes", v.boxes.len());
            stat("eps", fmt_rational(&apx.eps));
            stat("alpha", fmt_rational(&apx.alpha));
        }
    }
    Ok(())
}

fn cmd_cover_complement(a: &CoverArgs) -> CliResult<()> {
    let space = RangeSpace::from_text(&read_text(&a.input)?)?;
    if space.k != 2 {
        return Err(CliError::Validation(format!("complement cover needs a planar range space, got k = {}", space.k)));
    }
    let h = cover_complement(&space)?;
    let dims = space.dims();
    let inside = rasterize(&dims, &space.boxes);
    let outside = rasterize(&dims, &h);
    let exact = inside.iter().zip(&outside).all(|(a, b)| a != b);
    let disjoint = h.iter().enumerate().all(|(i, x)| h[i + 1..].iter().all(|y| !x.intersects(y)));
    let out = RangeSpace::new(2, space.q, h)?;
    write_bytes(&a.out, out.to_text().as_bytes())?;
    stat("q", space.q);
    stat("boxes", space.boxes.len());
    stat("complement", out.boxes.len());
    stat("bound", (4 * space.boxes.len()).max(1));
    stat("pixel_check", if exact && disjoint { "ok" } else { "mismatch" });
    if exact && disjoint {
        Ok(())
    } else {
        Err(CliError::Solver("complement boxes do not tile the complement".into()))
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Compress(a) => cmd_compress(a),
        Command::Decompress(a) => cmd_decompress(a),
        Command::Gen { kind } => cmd_gen(kind),
        Command::CoverComplement(a) => cmd_cover_complement(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n);
    }
    let result = match pool.build() {
        Ok(pool) => pool.install(|| run(&cli)),
        Err(e) => Err(CliError::Validation(format!("cannot start {} worker threads: {e}", cli.threads.unwrap_or(0)))),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
