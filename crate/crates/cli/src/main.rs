//! Batch command-line surface for universally decodable matrix families:
//! construction, verification, bounds, transformations, encoding, decoding,
//! channel simulation, decoder benchmarking, and the zeroth-row MDS check.
//!
//! Exit codes: 0 on success or PASS, 1 on verification FAIL or decode
//! mismatch, 2 on usage or parse errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use udm_core::codec::{
    channel_erase, decode_gaussian, decode_newton, encode_matrix, op_count_profile, simulate,
    ChannelOutput, DecoderChoice,
};
use udm_core::fileio::{read_family, read_received, write_family, write_received};
use udm_core::gf::{field_new, FieldElement, FieldSpec};
use udm_core::linalg::MatrixGF;
use udm_core::transforms;
use udm_core::udm::{
    check_mds_zeroth_rows, construct_monomial_variant, construct_pascal, construct_q_plus_2,
    max_l_bound, verify_with_jobs, BetaSequence, ErasurePattern, PatternMode, Provenance,
    UdmFamily,
};

#[derive(Parser)]
#[command(
    name = "udm",
    version,
    about = "Universally decodable matrices over finite fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Pascal,
    Monomial,
    Qplus2,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Atleast,
}

impl From<ModeArg> for PatternMode {
    fn from(m: ModeArg) -> PatternMode {
        match m {
            ModeArg::Exact => PatternMode::Exact,
            ModeArg::Atleast => PatternMode::AtLeast,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DecoderArg {
    Gaussian,
    Newton,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Build a family and write it to a file.
    Construct(ConstructArgs),
    /// Check the full-rank condition over every erasure pattern.
    Verify(VerifyArgs),
    /// Report the maximal-L bound for given N, K, q.
    Bounds(BoundsArgs),
    /// Apply a family-to-family transformation.
    #[command(subcommand)]
    Transform(TransformCmd),
    /// Encode an information word, optionally erase, and write the received word.
    Encode(EncodeArgs),
    /// Decode a received word against a family.
    Decode(DecodeArgs),
    /// Run encode -> erase -> decode trials and report statistics.
    Simulate(SimulateArgs),
    /// Profile decoder cost (counted field multiplications and inversions).
    Bench(BenchArgs),
    /// Check that the zeroth rows form an MDS generator matrix.
    MdsCheck(MdsCheckArgs),
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long = "L")]
    l: Option<usize>,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long = "K")]
    k: Option<usize>,
    #[arg(long)]
    q: u64,
    /// Primitive element override (canonical value); defaults to the field's.
    #[arg(long)]
    alpha: Option<u64>,
    #[arg(long, value_enum, default_value = "pascal")]
    variant: Variant,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeArg,
    /// Worker threads for the pattern checks.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long = "N")]
    n: usize,
    #[arg(long = "K")]
    k: usize,
    #[arg(long)]
    q: u64,
}

#[derive(Subcommand)]
enum TransformCmd {
    /// Replace A_ell by C * A_ell (C lower-triangular, nonzero diagonal).
    Row {
        file: PathBuf,
        #[arg(long)]
        ell: usize,
        /// File with the N x N transform matrix, one row per line.
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replace every A_l by A_l * B (B invertible).
    Col {
        file: PathBuf,
        /// File with the K x K transform matrix, one row per line.
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reorder the family by a permutation of [L].
    Permute {
        file: PathBuf,
        /// Comma-separated permutation, e.g. 1,0,3,2.
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// m-fold Kronecker power of every matrix.
    Tensor {
        file: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rewrite consecutive pairs so overlap rows mirror each other.
    PairReversal {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Column-transform to a leading (I, J) pair.
    Normalize {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Shrink (L, N, K) to (L, N-1, K-1).
    Reduce {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    family: PathBuf,
    /// Comma-separated information word, e.g. 1,2,0.
    #[arg(long)]
    u: String,
    /// Comma-separated erasure pattern; defaults to nothing erased.
    #[arg(long)]
    pattern: Option<String>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    family: PathBuf,
    #[arg(long)]
    rx: PathBuf,
    #[arg(long, value_enum, default_value = "gaussian")]
    decoder: DecoderArg,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    family: PathBuf,
    #[arg(long)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long = "pattern-mode", value_enum, default_value = "exact")]
    pattern_mode: ModeArg,
    #[arg(long, value_enum, default_value = "gaussian")]
    decoder: DecoderArg,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 127)]
    q: u64,
    #[arg(long = "L", default_value_t = 16)]
    l: usize,
    /// Comma-separated information lengths, e.g. 16,32,64.
    #[arg(long = "Ks", default_value = "16,32,64")]
    ks: String,
    #[arg(long, default_value_t = 8)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct MdsCheckArgs {
    file: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Construct(args) => cmd_construct(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Transform(cmd) => cmd_transform(cmd),
        Command::Encode(args) => cmd_encode(args),
        Command::Decode(args) => cmd_decode(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Bench(args) => cmd_bench(args),
        Command::MdsCheck(args) => cmd_mds_check(args),
    }
}

fn load_family(path: &Path) -> Result<UdmFamily> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading family file {}", path.display()))?;
    let (family, warnings) =
        read_family(&text).with_context(|| format!("parsing family file {}", path.display()))?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    Ok(family)
}

fn parse_csv_usize(s: &str, what: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| anyhow!("{what} entry is not a non-negative integer: {t}"))
        })
        .collect()
}

fn parse_word(s: &str, spec: &FieldSpec) -> Result<Vec<FieldElement>> {
    s.split(',')
        .map(|t| {
            let v: u64 = t
                .trim()
                .parse()
                .map_err(|_| anyhow!("word entry is not a non-negative integer: {t}"))?;
            Ok(spec.element(v)?)
        })
        .collect()
}

fn load_matrix(path: &Path, spec: &FieldSpec) -> Result<MatrixGF> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading matrix file {}", path.display()))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let row: Vec<FieldElement> = trimmed
            .split_whitespace()
            .map(|t| {
                let v: u64 = t
                    .parse()
                    .map_err(|_| anyhow!("line {}: bad element {t}", i + 1))?;
                Ok(spec.element(v)?)
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("matrix file {} is empty", path.display());
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        bail!("matrix file {} has ragged rows", path.display());
    }
    Ok(MatrixGF::from_rows(rows))
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cmd_construct(args: ConstructArgs) -> Result<ExitCode> {
    let spec = field_new(args.q)?;
    let alpha = args.alpha.map(|v| spec.element(v)).transpose()?;
    let family = match args.variant {
        Variant::Pascal => {
            let l = args
                .l
                .ok_or_else(|| anyhow!("--L is required for the pascal variant"))?;
            let n = args
                .n
                .ok_or_else(|| anyhow!("--N is required for the pascal variant"))?;
            let k = args.k.unwrap_or(n);
            construct_pascal(l, n, k, &spec, alpha)?
        }
        Variant::Monomial => {
            let l = args
                .l
                .ok_or_else(|| anyhow!("--L is required for the monomial variant"))?;
            let n = args
                .n
                .ok_or_else(|| anyhow!("--N is required for the monomial variant"))?;
            if let Some(k) = args.k {
                if k != n {
                    bail!("the monomial variant needs K = N, got K = {k}, N = {n}");
                }
            }
            construct_monomial_variant(l, n, &spec, alpha)?
        }
        Variant::Qplus2 => {
            if args.l.is_some() || args.n.is_some() || args.k.is_some() {
                bail!("the qplus2 variant takes only --q; its shape is (q+2, 1, 3)");
            }
            construct_q_plus_2(&spec)?
        }
    };
    write_out(&args.out, &write_family(&family))?;
    println!(
        "constructed ({}, {}, {}, {}) family -> {}",
        family.l(),
        family.n(),
        family.k(),
        spec.q(),
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let family = load_family(&args.file)?;
    let report = verify_with_jobs(&family, args.mode.into(), args.jobs)?;
    if report.passed {
        println!("PASS {} patterns", report.patterns_checked);
        Ok(ExitCode::SUCCESS)
    } else {
        let witness = report.first_failure.expect("failed report has a witness");
        println!(
            "FAIL at {}: rank {} < {}",
            witness.pattern,
            witness.rank,
            family.k()
        );
        print!("{}", witness.stacked);
        println!("checked {} patterns", report.patterns_checked);
        Ok(ExitCode::from(1))
    }
}

fn cmd_bounds(args: BoundsArgs) -> Result<ExitCode> {
    // q must name a real field
    field_new(args.q)?;
    println!("{}", max_l_bound(args.n, args.k, args.q));
    Ok(ExitCode::SUCCESS)
}

fn cmd_transform(cmd: TransformCmd) -> Result<ExitCode> {
    let (family, out_path, transformed) = match cmd {
        TransformCmd::Row {
            file,
            ell,
            matrix,
            out,
        } => {
            let family = load_family(&file)?;
            if ell >= family.l() {
                bail!("--ell {ell} is out of range for L = {}", family.l());
            }
            let c = load_matrix(&matrix, family.spec())?;
            let t = transforms::row_transform(&family, ell, &c)?;
            (family, out, t)
        }
        TransformCmd::Col { file, matrix, out } => {
            let family = load_family(&file)?;
            let b = load_matrix(&matrix, family.spec())?;
            let t = transforms::col_transform(&family, &b)?;
            (family, out, t)
        }
        TransformCmd::Permute { file, sigma, out } => {
            let family = load_family(&file)?;
            let sigma = parse_csv_usize(&sigma, "sigma")?;
            let t = transforms::permute(&family, &sigma)?;
            (family, out, t)
        }
        TransformCmd::Tensor { file, m, out } => {
            let family = load_family(&file)?;
            let t = transforms::tensor_power(&family, m)?;
            (family, out, t)
        }
        TransformCmd::PairReversal { file, out } => {
            let family = load_family(&file)?;
            let t = transforms::pair_reversal(&family)?;
            (family, out, t)
        }
        TransformCmd::Normalize { file, out } => {
            let family = load_family(&file)?;
            let t = transforms::normalize_leading_pair(&family)?;
            (family, out, t)
        }
        TransformCmd::Reduce { file, out } => {
            let family = load_family(&file)?;
            let t = transforms::reduce(&family)?;
            (family, out, t)
        }
    };
    write_out(&out_path, &write_family(&transformed))?;
    println!(
        "transformed ({}, {}, {}, {}) -> ({}, {}, {}, {}) family -> {}",
        family.l(),
        family.n(),
        family.k(),
        family.spec().q(),
        transformed.l(),
        transformed.n(),
        transformed.k(),
        transformed.spec().q(),
        out_path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_encode(args: EncodeArgs) -> Result<ExitCode> {
    let family = load_family(&args.family)?;
    let spec = family.spec();
    let u = parse_word(&args.u, spec)?;
    let x = encode_matrix(&family, &u)?;
    let pattern = match &args.pattern {
        Some(p) => ErasurePattern::new(parse_csv_usize(p, "pattern")?, family.n())?,
        None => ErasurePattern::new(vec![family.n(); family.l()], family.n())?,
    };
    let out = channel_erase(&x, &pattern)?;
    let text = write_received(&out, family.k(), spec);
    match &args.out {
        Some(path) => write_out(path, &text)?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

/// Binds a received-word file to a family, cross-checking the header.
fn bind_received(family: &UdmFamily, rx_path: &Path) -> Result<ChannelOutput> {
    let text = fs::read_to_string(rx_path)
        .with_context(|| format!("reading received word {}", rx_path.display()))?;
    let parsed = read_received(&text)
        .with_context(|| format!("parsing received word {}", rx_path.display()))?;
    let (l, n, k, q) = (family.l(), family.n(), family.k(), family.spec().q());
    if (parsed.l, parsed.n, parsed.k, parsed.q) != (l, n, k, q) {
        bail!(
            "received word header ({}, {}, {}, {}) does not match the family ({l}, {n}, {k}, {q})",
            parsed.l,
            parsed.n,
            parsed.k,
            parsed.q
        );
    }
    Ok(parsed.into_channel_output(family.spec())?)
}

/// The construction's evaluation points, available only with pascal
/// provenance.
fn betas_for(family: &UdmFamily) -> Result<BetaSequence> {
    match family.provenance() {
        Provenance::Pascal { alpha } => Ok(BetaSequence::new(family.spec(), alpha, family.l())?),
        other => bail!(
            "the newton decoder needs pascal provenance in the family file \
             (found {other:?}); construct with --variant pascal or decode with --decoder gaussian"
        ),
    }
}

fn cmd_decode(args: DecodeArgs) -> Result<ExitCode> {
    let family = load_family(&args.family)?;
    let received = bind_received(&family, &args.rx)?;
    let gaussian = |fam: &UdmFamily| -> Result<Vec<FieldElement>> {
        Ok(decode_gaussian(fam, &received)?)
    };
    let newton = |fam: &UdmFamily| -> Result<Vec<FieldElement>> {
        let betas = betas_for(fam)?;
        Ok(decode_newton(&received, &betas, fam.k(), fam.spec())?)
    };
    let word = match args.decoder {
        DecoderArg::Gaussian => gaussian(&family)?,
        DecoderArg::Newton => newton(&family)?,
        DecoderArg::Both => {
            let g = gaussian(&family)?;
            let n = newton(&family)?;
            if g != n {
                println!("gaussian {}", join_word(&g));
                println!("newton {}", join_word(&n));
                eprintln!("error: decoders disagree");
                return Ok(ExitCode::from(1));
            }
            g
        }
    };
    println!("{}", join_word(&word));
    Ok(ExitCode::SUCCESS)
}

fn join_word(w: &[FieldElement]) -> String {
    w.iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode> {
    let family = load_family(&args.family)?;
    let choice = match args.decoder {
        DecoderArg::Gaussian => DecoderChoice::Gaussian,
        DecoderArg::Newton => DecoderChoice::Newton,
        DecoderArg::Both => DecoderChoice::Both,
    };
    let betas = match choice {
        DecoderChoice::Gaussian => None,
        _ => Some(betas_for(&family)?),
    };
    let mode: PatternMode = args.pattern_mode.into();
    let stats = simulate(
        &family,
        betas.as_ref(),
        args.trials,
        args.seed,
        mode,
        choice,
    )?;
    println!(
        "simulate family=({},{},{},{}) trials={} seed={} pattern-mode={} decoder={}",
        family.l(),
        family.n(),
        family.k(),
        family.spec().q(),
        args.trials,
        args.seed,
        match mode {
            PatternMode::Exact => "exact",
            PatternMode::AtLeast => "atleast",
        },
        match choice {
            DecoderChoice::Gaussian => "gaussian",
            DecoderChoice::Newton => "newton",
            DecoderChoice::Both => "both",
        }
    );
    println!("field ops counted: mul and inv only");
    println!("successes {}", stats.successes);
    println!("success_rate {:.6}", stats.success_rate());
    println!("mismatches {}", stats.mismatches);
    println!("singular_failures {}", stats.singular_failures);
    println!(
        "cross_decoder_mismatches {}",
        stats.cross_decoder_mismatches
    );
    if let Some(mean) = stats.mean_gaussian_ops() {
        println!("mean_ops_gaussian {mean:.6}");
    }
    if let Some(mean) = stats.mean_newton_ops() {
        println!("mean_ops_newton {mean:.6}");
    }
    if stats.successes == stats.trials && stats.cross_decoder_mismatches == 0 {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode> {
    let spec = field_new(args.q)?;
    let ks = parse_csv_usize(&args.ks, "Ks")?;
    let rows = op_count_profile(&spec, args.l, &ks, args.trials, args.seed)?;
    println!(
        "bench q={} L={} trials={} seed={}",
        args.q, args.l, args.trials, args.seed
    );
    println!("field ops counted: mul and inv only");
    for row in &rows {
        println!(
            "K {} mean_ops_gaussian {:.6} mean_ops_newton {:.6}",
            row.k, row.mean_gaussian_ops, row.mean_newton_ops
        );
    }
    for pair in rows.windows(2) {
        println!(
            "ratio K {}/{} gaussian {:.3} newton {:.3}",
            pair[1].k,
            pair[0].k,
            pair[1].mean_gaussian_ops / pair[0].mean_gaussian_ops,
            pair[1].mean_newton_ops / pair[0].mean_newton_ops
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_mds_check(args: MdsCheckArgs) -> Result<ExitCode> {
    let family = load_family(&args.file)?;
    if check_mds_zeroth_rows(&family)? {
        println!(
            "MDS PASS: all {} x {} submatrices of the zeroth-row matrix are nonsingular",
            family.k(),
            family.k()
        );
        Ok(ExitCode::SUCCESS)
    } else {
        println!(
            "MDS FAIL: a singular {} x {} submatrix exists",
            family.k(),
            family.k()
        );
        Ok(ExitCode::from(1))
    }
}
