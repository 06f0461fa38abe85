//! `rlseg`: block extraction and characterization on run-length compressed
//! binary documents.
//!
//! Block coordinates are 1-indexed and inclusive: `--x1 100 --x2 400` selects
//! 301 rows. `x` counts rows from the top, `y` counts columns from the left.
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 malformed input,
//! 4 internal consistency failure.

mod input;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use rlseg::io::{mh_encode_image, write_pbm, write_rle, MhOptions, PbmFormat};
use rlseg::{
    accuracy_compressed, accuracy_pixel, build_position_table, characterize, decode_image, extract_block_with_stats,
    oracle_crop, AccuracyResult, BlockSpec, Dims, FeatureContext, LogBase,
};
use rlseg::features::report;

use input::{load, read_bytes, EolArg, MhArgs, Usage};
use report::{AccuracyEntry, FeatureEntry, RunReport};

#[derive(Parser)]
#[command(name = "rlseg", version, about = "Extract and characterize blocks of run-length compressed binary documents")]
#[command(propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a PBM raster to RLC1 (or a raw MH stream)
    Encode(EncodeArgs),
    /// Convert an RLC1 file or raw MH stream to PBM
    Decode(DecodeArgs),
    /// Cut a block out of a compressed document without decompressing it
    Extract(ExtractArgs),
    /// Density, CEQ and SEQ of a block, optionally relative to its document
    Characterize(CharacterizeArgs),
    /// Accuracy of an extracted block against a ground truth
    Evaluate(EvaluateArgs),
    /// Print the size and run statistics of a document
    Info(InfoArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EncodeTo {
    Rlc,
    Mh,
}

#[derive(clap::Args)]
struct EncodeArgs {
    /// PBM input (P1 or P4)
    input: PathBuf,
    /// Output path
    output: PathBuf,
    /// Output format
    #[arg(long, value_enum, default_value = "rlc")]
    to: EncodeTo,
    /// EOL framing of MH output
    #[arg(long, value_enum, default_value = "required")]
    eol: EolArg,
    /// Byte-align rows of MH output
    #[arg(long)]
    byte_align: bool,
}

#[derive(clap::Args)]
struct DecodeArgs {
    /// RLC1 file, or raw MH stream with --width/--height/--eol
    input: PathBuf,
    /// PBM output path
    output: PathBuf,
    /// Write plain (P1) instead of raw (P4) PBM
    #[arg(long)]
    plain: bool,
    #[command(flatten)]
    mh: MhArgs,
}

#[derive(clap::Args)]
struct SpecArgs {
    /// First row of the block (1-indexed, inclusive)
    #[arg(long)]
    x1: usize,
    /// Last row of the block (inclusive)
    #[arg(long)]
    x2: usize,
    /// First column of the block (1-indexed, inclusive)
    #[arg(long)]
    y1: usize,
    /// Last column of the block (inclusive)
    #[arg(long)]
    y2: usize,
}

impl SpecArgs {
    fn spec(&self) -> BlockSpec {
        BlockSpec::new(self.x1, self.x2, self.y1, self.y2)
    }
}

#[derive(clap::Args)]
struct ExtractArgs {
    /// Compressed document (RLC1, PBM, or raw MH with --width/--height/--eol)
    input: PathBuf,
    #[command(flatten)]
    spec: SpecArgs,
    /// Where to write the block
    #[arg(short, long)]
    output: PathBuf,
    /// Write the block as PBM instead of RLC1
    #[arg(long)]
    decode_output: bool,
    /// Print the position table ("P1 R1 P2 R2" per row) to stdout
    #[arg(long)]
    trace: bool,
    /// Also check the block against a pixel-domain crop and record both accuracies
    #[arg(long)]
    verify: bool,
    /// Write a JSON run report to this path
    #[arg(long)]
    report: Option<PathBuf>,
    /// Include wall time in the report (makes it non-reproducible)
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    mh: MhArgs,
}

#[derive(clap::Args)]
struct CharacterizeArgs {
    /// The block (RLC1 or PBM)
    block: PathBuf,
    /// Source document, for relative features and the quadrant label
    #[arg(long, requires_all = ["x1", "y1"])]
    doc: Option<PathBuf>,
    /// Row of the block's top-left pixel in the document
    #[arg(long, requires = "doc")]
    x1: Option<usize>,
    /// Column of the block's top-left pixel in the document
    #[arg(long, requires = "doc")]
    y1: Option<usize>,
    /// Optional last row; must agree with the block height
    #[arg(long, requires = "doc")]
    x2: Option<usize>,
    /// Optional last column; must agree with the block width
    #[arg(long, requires = "doc")]
    y2: Option<usize>,
    /// Logarithm base for CEQ and SEQ: 2, e or 10
    #[arg(long, default_value = "e")]
    log_base: LogBase,
    /// Print a JSON run report instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AccuracyModeArg {
    Pixel,
    Compressed,
}

#[derive(clap::Args)]
struct EvaluateArgs {
    /// Extracted block
    #[arg(required_unless_present = "manifest")]
    extracted: Option<PathBuf>,
    /// Ground truth
    #[arg(required_unless_present = "manifest")]
    truth: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "pixel")]
    mode: AccuracyModeArg,
    /// File of "<extracted> <truth>" lines, paths relative to the manifest
    #[arg(long, conflicts_with_all = ["extracted", "truth"])]
    manifest: Option<PathBuf>,
    /// Worker threads for --manifest; output order does not depend on it
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,
    /// Print a JSON run report instead of text
    #[arg(long)]
    json: bool,
}

#[derive(clap::Args)]
struct InfoArgs {
    /// Document (RLC1, PBM, or raw MH with --width/--height/--eol)
    input: PathBuf,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    mh: MhArgs,
}

fn write_file(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

fn encode(args: EncodeArgs) -> anyhow::Result<()> {
    let grid = rlseg::io::read_pbm(&read_bytes(&args.input)?).with_context(|| args.input.display().to_string())?;
    let doc = rlseg::encode_image(&grid);
    let bytes = match args.to {
        EncodeTo::Rlc => write_rle(&doc),
        EncodeTo::Mh => mh_encode_image(
            &doc,
            MhOptions {
                eol: args.eol.into(),
                byte_align: args.byte_align,
            },
        )
        .into_bytes(),
    };
    write_file(&args.output, &bytes)
}

fn decode(args: DecodeArgs) -> anyhow::Result<()> {
    let loaded = load(&args.input, &args.mh, None)?;
    let fmt = if args.plain { PbmFormat::Plain } else { PbmFormat::Raw };
    write_file(&args.output, &write_pbm(&decode_image(&loaded.doc), fmt))
}

fn extract(args: ExtractArgs) -> anyhow::Result<()> {
    let start = Instant::now();
    let spec = args.spec.spec();
    let loaded = load(&args.input, &args.mh, Some(&spec))?;
    let doc = &loaded.doc;
    let (block, stats) = extract_block_with_stats(doc, &spec)?;

    if args.trace {
        print!("{}", build_position_table(doc, &spec)?);
    }
    let bytes = if args.decode_output {
        write_pbm(&decode_image(&block), PbmFormat::Raw)
    } else {
        write_rle(&block)
    };
    write_file(&args.output, &bytes)?;

    let mut accuracy = Vec::new();
    if args.verify {
        let crop = oracle_crop(&decode_image(doc), &spec)?;
        let pixel = accuracy_pixel(&decode_image(&block), &crop)?;
        let compressed = accuracy_compressed(&block, &rlseg::encode_image(&crop))?;
        if pixel.percentage != 100.0 || compressed.percentage != 100.0 {
            return Err(rlseg::Error::Inconsistent(format!(
                "extracted block differs from the pixel crop (pixel {:.4}, compressed {:.4})",
                pixel.percentage, compressed.percentage
            ))
            .into());
        }
        accuracy = vec![pixel.into(), compressed.into()];
    }

    if let Some(path) = &args.report {
        let report = RunReport {
            inputs: vec![loaded.describe("document", &args.input)],
            block: Some(spec),
            accuracy,
            counters: Some(stats),
            wall_time_ms: args.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
            ..RunReport::new("extract")
        };
        write_file(path, report.to_json().as_bytes())?;
    }
    Ok(())
}

fn characterize_cmd(args: CharacterizeArgs) -> anyhow::Result<()> {
    let no_mh = MhArgs::default();
    let block = load(&args.block, &no_mh, None)?;
    let mut inputs = vec![block.describe("block", &args.block)];
    let (doc, spec) = match (&args.doc, args.x1, args.y1) {
        (Some(path), Some(x1), Some(y1)) => {
            let spec = BlockSpec::from_origin(x1, y1, block.doc.width(), block.doc.height());
            for (given, implied, name) in [(args.x2, spec.x2, "x2"), (args.y2, spec.y2, "y2")] {
                if given.is_some_and(|v| v != implied) {
                    return Err(Usage(format!(
                        "--{name} {} disagrees with the block size (expected {implied})",
                        given.unwrap()
                    ))
                    .into());
                }
            }
            let doc = load(path, &no_mh, Some(&spec))?;
            inputs.push(doc.describe("document", path));
            (Some(doc.doc), Some(spec))
        }
        (None, None, None) => (None, None),
        _ => return Err(Usage("relative characterization needs --doc, --x1 and --y1".into()).into()),
    };
    let c = characterize(&block.doc, doc.as_ref(), spec.as_ref(), args.log_base)?;

    if args.json {
        let mut features = vec![FeatureEntry::new("absolute", c.absolute)];
        features.extend(c.relative.map(|r| FeatureEntry::new("relative", r)));
        features.extend(c.document.map(|r| FeatureEntry::new("document", r)));
        let report = RunReport {
            inputs,
            block: spec,
            features,
            quadrant: c.quadrant.map(|q| q.to_string()),
            ..RunReport::new("characterize")
        };
        print!("{}", report.to_json());
        return Ok(());
    }

    println!("block {}x{} (rows x columns), log base {}", block.doc.height(), block.doc.width(), args.log_base);
    println!("{:<9} {:>12} {:>16} {:>16}", "", "density", "CEQ", "SEQ");
    let rows = [Some(("absolute", c.absolute)), c.relative.map(|r| ("relative", r)), c.document.map(|r| ("document", r))];
    for (label, r) in rows.into_iter().flatten() {
        println!("{label:<9} {:>12.6} {:>16.6} {:>16.6}", r.density, r.ceq, r.seq);
    }
    if let Some(q) = c.quadrant {
        println!("quadrant: {q}");
    }
    Ok(())
}

fn accuracy_of(extracted: &Path, truth: &Path, mode: AccuracyModeArg) -> anyhow::Result<AccuracyResult> {
    let no_mh = MhArgs::default();
    let a = load(extracted, &no_mh, None)?.doc;
    let b = load(truth, &no_mh, None)?.doc;
    Ok(match mode {
        AccuracyModeArg::Pixel => accuracy_pixel(&decode_image(&a), &decode_image(&b))?,
        AccuracyModeArg::Compressed => accuracy_compressed(&a.canonicalized(), &b.canonicalized())?,
    })
}

fn read_manifest(path: &Path) -> anyhow::Result<Vec<(PathBuf, PathBuf)>> {
    let text = String::from_utf8(read_bytes(path)?)
        .map_err(|_| Usage(format!("{} is not UTF-8", path.display())))?;
    let dir = path.parent().unwrap_or(Path::new(""));
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [a, b] = fields[..] else {
            return Err(Usage(format!("{} line {}: expected \"<extracted> <truth>\"", path.display(), i + 1)).into());
        };
        pairs.push((dir.join(a), dir.join(b)));
    }
    pairs.sort();
    Ok(pairs)
}

fn evaluate(args: EvaluateArgs) -> anyhow::Result<()> {
    let pairs = match &args.manifest {
        Some(m) => read_manifest(m)?,
        None => vec![(args.extracted.clone().unwrap(), args.truth.clone().unwrap())],
    };
    let jobs = (args.jobs as usize).min(pairs.len().max(1));
    let mut results: Vec<Option<anyhow::Result<AccuracyResult>>> = (0..pairs.len()).map(|_| None).collect();
    std::thread::scope(|s| {
        let chunk = pairs.len().div_ceil(jobs).max(1);
        for (ps, rs) in pairs.chunks(chunk).zip(results.chunks_mut(chunk)) {
            s.spawn(move || {
                for ((a, b), slot) in ps.iter().zip(rs) {
                    *slot = Some(accuracy_of(a, b, args.mode));
                }
            });
        }
    });
    let mut accuracy = Vec::with_capacity(pairs.len());
    for ((a, b), r) in pairs.iter().zip(results) {
        let r = r.expect("every pair evaluated").with_context(|| format!("{} vs {}", a.display(), b.display()))?;
        accuracy.push(r);
    }

    if args.json {
        let accuracy = pairs
            .iter()
            .zip(accuracy)
            .map(|((a, b), result)| AccuracyEntry {
                extracted: Some(a.clone()),
                truth: Some(b.clone()),
                result,
            })
            .collect();
        let report = RunReport {
            accuracy,
            ..RunReport::new("evaluate")
        };
        print!("{}", report.to_json());
    } else if args.manifest.is_some() {
        for ((a, b), r) in pairs.iter().zip(&accuracy) {
            println!("{}\t{}\t{:.4}", a.display(), b.display(), r.percentage);
        }
    } else {
        println!("{:.4}", accuracy[0].percentage);
    }
    Ok(())
}

fn info(args: InfoArgs) -> anyhow::Result<()> {
    let loaded = load(&args.input, &args.mh, None)?;
    let doc = &loaded.doc;
    let ink: u64 = doc.rows().iter().map(rlseg::features::foreground_pixels).sum();
    let area = doc.width() as u64 * doc.height() as u64;
    if args.json {
        let dims = Dims::new(doc.height(), doc.width());
        let features = report(doc, &FeatureContext::absolute(dims, LogBase::E))?;
        let report = RunReport {
            inputs: vec![loaded.describe("document", &args.input)],
            features: vec![FeatureEntry::new("absolute", features)],
            ..RunReport::new("info")
        };
        print!("{}", report.to_json());
        return Ok(());
    }
    println!("format: {}", serde_json::to_value(loaded.format)?.as_str().unwrap_or("?"));
    println!("size: {} x {} (width x height)", doc.width(), doc.height());
    println!("runs: {}", doc.run_count());
    println!("canonical: {}", doc.is_canonical());
    println!("foreground pixels: {ink} ({:.6})", ink as f64 / area as f64);
    Ok(())
}

/// Maps a failure to its exit code.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<rlseg::Error>() {
            return match e {
                rlseg::Error::Parse { .. } => 3,
                rlseg::Error::Inconsistent(_) => 4,
                _ => 2,
            };
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Encode(a) => encode(a),
        Command::Decode(a) => decode(a),
        Command::Extract(a) => extract(a),
        Command::Characterize(a) => characterize_cmd(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Info(a) => info(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rlseg: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
