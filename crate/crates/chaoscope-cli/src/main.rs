//! `chaoscope`: spectral pictures, chaos statistics and membership
//! classification for the supported operator class.
//!
//! Machine output first: every command emits JSON (or CSV where noted) with
//! the effective parameters echoed under `"params"`. Identical argv and
//! seeds produce byte-identical output. Exit codes: 0 success, 1
//! computation error, 2 usage error, 3 relation violation or gallery
//! mismatch.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use chaoscope_core::classify::{classify, random_picture, relation_suite};
use chaoscope_core::gallery::{gallery, gallery_names, identity_perturbation, path_picture};
use chaoscope_core::numeric::c64;
use chaoscope_core::operator::OperatorSpec;
use chaoscope_core::orbit::{
    default_tau_grid, dichotomy_check, li_yorke_score, orbit, pair_profile, unimodal_certify,
    DELTA_HIGH, DELTA_LOW,
};
use chaoscope_core::spectral::{spectral_picture, weyl_spectrum};
use chaoscope_core::vector::SparseVector;
use chaoscope_core::SpectralPicture;

#[derive(Parser)]
#[command(name = "chaoscope", version, about = "operator spectra and chaos statistics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write output to a file instead of stdout.
    #[arg(long, short = 'o', global = true)]
    output: Option<std::path::PathBuf>,
    /// Human-readable JSON (indented); machine output is the default.
    #[arg(long, global = true)]
    pretty: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Operator document operations.
    Op {
        #[command(subcommand)]
        cmd: OpCmd,
    },
    /// Spectral engine.
    Spectral {
        #[command(subcommand)]
        cmd: SpectralCmd,
    },
    /// Decide the membership predicates of an operator's picture.
    Classify {
        #[command(flatten)]
        spec: SpecInput,
    },
    /// Orbit statistics.
    Orbit {
        #[command(subcommand)]
        cmd: OrbitCmd,
    },
    /// Certificates.
    Certify {
        #[command(subcommand)]
        cmd: CertifyCmd,
    },
    /// Orbit dichotomy suite on seeded sample vectors.
    Dichotomy {
        #[command(flatten)]
        spec: SpecInput,
        /// Number of seeded random sample vectors.
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        horizon: usize,
        #[arg(long, default_value_t = 1e-8)]
        delta: f64,
        /// Sample support range, inclusive.
        #[arg(long, default_value = "-10..10", value_parser = parse_range)]
        support: (i64, i64),
    },
    /// The example catalog.
    Gallery {
        #[command(subcommand)]
        cmd: GalleryCmd,
    },
    /// Spectral pictures along the 5B -> 5B² connectedness path.
    Path {
        /// Single parameter in [-1, 2].
        #[arg(long, conflicts_with = "samples")]
        t: Option<f64>,
        /// Evaluate this many uniformly spaced parameters instead.
        #[arg(long)]
        samples: Option<usize>,
        /// csv emits the positive-disk boundaries for plotting.
        #[arg(long, default_value = "json")]
        format: Format,
    },
    /// Perturbations of the identity.
    Perturb {
        #[command(subcommand)]
        cmd: PerturbCmd,
    },
    /// Run the inter-class relation suite on random pictures plus the
    /// gallery; exits 3 on any violation.
    Relations {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        count: usize,
        /// Curve budget per random picture (max 8).
        #[arg(long, default_value_t = 6)]
        budget: usize,
        /// Leave the gallery pictures out.
        #[arg(long)]
        skip_gallery: bool,
    },
}

#[derive(Subcommand)]
enum OpCmd {
    /// Parse, canonicalize and validate a spec document.
    Validate {
        #[command(flatten)]
        spec: SpecInput,
    },
    /// Apply an operator (power) to a vector.
    Apply {
        #[command(flatten)]
        spec: SpecInput,
        #[command(flatten)]
        vector: VectorInput,
        #[arg(long, default_value_t = 1)]
        power: u32,
    },
}

#[derive(Subcommand)]
enum SpectralCmd {
    /// Compute the spectral picture (json) or its boundary polylines (csv).
    Picture {
        #[command(flatten)]
        spec: SpecInput,
        #[arg(long, default_value = "json")]
        format: Format,
        /// Points per curve in csv output.
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
}

#[derive(Subcommand)]
enum OrbitCmd {
    /// Orbit norm sequence of one vector.
    Norms {
        #[command(flatten)]
        spec: SpecInput,
        #[command(flatten)]
        vector: VectorInput,
        #[arg(long, default_value_t = 100)]
        horizon: usize,
        #[arg(long, default_value = "json")]
        format: Format,
    },
    /// Li-Yorke proximity score of a pair.
    Pair {
        #[command(flatten)]
        spec: SpecInput,
        #[command(flatten)]
        pair: PairInput,
        #[arg(long, default_value_t = 1000)]
        horizon: usize,
        #[arg(long, default_value_t = DELTA_LOW)]
        delta_low: f64,
        #[arg(long, default_value_t = DELTA_HIGH)]
        delta_high: f64,
    },
    /// Distributional chaos statistics of a pair over a τ-grid.
    DcStats {
        #[command(flatten)]
        spec: SpecInput,
        #[command(flatten)]
        pair: PairInput,
        #[arg(long, default_value_t = 1000)]
        horizon: usize,
        #[arg(long, default_value_t = 1e-6)]
        tau_min: f64,
        #[arg(long, default_value_t = 1e2)]
        tau_max: f64,
        #[arg(long, default_value_t = 33)]
        tau_points: usize,
        #[arg(long, default_value = "json")]
        format: Format,
    },
}

#[derive(Subcommand)]
enum CertifyCmd {
    /// Search basis vectors for a norm-unimodality certificate.
    Unimodal {
        #[command(flatten)]
        spec: SpecInput,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        horizon: usize,
        /// Candidate basis index range, inclusive.
        #[arg(long, default_value = "0..100", value_parser = parse_range)]
        candidates: (i64, i64),
    },
}

#[derive(Subcommand)]
enum GalleryCmd {
    /// List the catalogued names.
    List,
    /// Verify an entry and emit its operator spec document; exits 3 when
    /// the computed data disagrees with the stored expectations.
    Build {
        name: String,
        /// Skip the expectation check.
        #[arg(long)]
        no_verify: bool,
    },
}

#[derive(Subcommand)]
enum PerturbCmd {
    /// Build I + K_ε and report norms plus within-block scrambling.
    Identity {
        #[arg(long)]
        epsilon: f64,
        /// Comma-separated increasing block dimensions.
        #[arg(long, value_parser = parse_dims, default_value = "4,16,64,256")]
        dims: Vec<usize>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SpecInput {
    /// Operator spec document path.
    #[arg(long)]
    spec: Option<std::path::PathBuf>,
    /// Operator spec document inline.
    #[arg(long)]
    inline: Option<String>,
    /// Use a gallery entry's operator.
    #[arg(long)]
    gallery: Option<String>,
}

#[derive(Args)]
struct VectorInput {
    /// Vector document path.
    #[arg(long)]
    vector: Option<std::path::PathBuf>,
    /// Vector document inline.
    #[arg(long)]
    vector_inline: Option<String>,
}

#[derive(Args)]
struct PairInput {
    /// First vector document path.
    #[arg(long)]
    x: Option<std::path::PathBuf>,
    #[arg(long)]
    x_inline: Option<String>,
    /// Second vector document path.
    #[arg(long)]
    y: Option<std::path::PathBuf>,
    #[arg(long)]
    y_inline: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI, got {s:?}"))?;
    let lo: i64 = a.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: i64 = b.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
    if lo > hi {
        return Err("empty range".into());
    }
    Ok((lo, hi))
}

fn parse_dims(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| e.to_string()))
        .collect()
}

/// Failure modes mapped to exit codes.
enum Failure {
    Computation(String),
    Violation(String),
}

impl From<chaoscope_core::Error> for Failure {
    fn from(e: chaoscope_core::Error) -> Self {
        Failure::Computation(e.to_string())
    }
}

type CommandResult = Result<Output, Failure>;

enum Output {
    Json(Value),
    Text(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli.command);
    match result {
        Ok(out) => {
            let rendered = match out {
                Output::Json(v) => {
                    let mut s = if cli.pretty {
                        serde_json::to_string_pretty(&v).expect("render")
                    } else {
                        serde_json::to_string(&v).expect("render")
                    };
                    s.push('\n');
                    s
                }
                Output::Text(s) => s,
            };
            match &cli.output {
                None => {
                    print!("{rendered}");
                    ExitCode::SUCCESS
                }
                Some(path) => match std::fs::File::create(path)
                    .and_then(|mut f| f.write_all(rendered.as_bytes()))
                {
                    Ok(()) => ExitCode::SUCCESS,
                    Err(e) => {
                        eprintln!("E: cannot write {}: {e}", path.display());
                        ExitCode::from(1)
                    }
                },
            }
        }
        Err(Failure::Computation(msg)) => {
            eprintln!("E: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Violation(msg)) => {
            eprintln!("E: {msg}");
            ExitCode::from(3)
        }
    }
}

fn load_spec(input: &SpecInput) -> Result<OperatorSpec, Failure> {
    if let Some(name) = &input.gallery {
        return Ok(gallery(name).map_err(Failure::from)?.spec);
    }
    let text = match (&input.spec, &input.inline) {
        (Some(path), None) => std::fs::read_to_string(path)
            .map_err(|e| Failure::Computation(format!("cannot read {}: {e}", path.display())))?,
        (None, Some(s)) => s.clone(),
        _ => return Err(Failure::Computation("exactly one operator source required".into())),
    };
    Ok(OperatorSpec::parse_json(&text)?)
}

fn load_vector(path: &Option<std::path::PathBuf>, inline: &Option<String>) -> Result<SparseVector, Failure> {
    let text = match (path, inline) {
        (Some(p), None) => std::fs::read_to_string(p)
            .map_err(|e| Failure::Computation(format!("cannot read {}: {e}", p.display())))?,
        (None, Some(s)) => s.clone(),
        _ => return Err(Failure::Computation("exactly one vector source required".into())),
    };
    Ok(SparseVector::parse_json(&text)?)
}

fn picture_value(p: &SpectralPicture) -> Value {
    serde_json::to_value(p).expect("picture serializes")
}

fn run(command: &Command) -> CommandResult {
    match command {
        Command::Op { cmd } => match cmd {
            OpCmd::Validate { spec } => {
                let op = load_spec(spec)?;
                Ok(Output::Json(json!({
                    "command": "op validate",
                    "result": {
                        "ok": true,
                        "canonical": serde_json::from_str::<Value>(&op.to_canonical_json()).unwrap(),
                        "norm_bound": op.norm_bound(),
                    },
                })))
            }
            OpCmd::Apply { spec, vector, power } => {
                let op = load_spec(spec)?;
                let v = load_vector(&vector.vector, &vector.vector_inline)?;
                let image = op.apply_power(&v, *power)?;
                Ok(Output::Json(json!({
                    "command": "op apply",
                    "params": { "power": power },
                    "result": serde_json::to_value(&image).unwrap(),
                })))
            }
        },
        Command::Spectral { cmd } => match cmd {
            SpectralCmd::Picture { spec, format, samples } => {
                let op = load_spec(spec)?;
                let picture = spectral_picture(&op)?;
                match format {
                    Format::Json => Ok(Output::Json(json!({
                        "command": "spectral picture",
                        "result": {
                            "picture": picture_value(&picture),
                            "weyl": serde_json::to_value(weyl_spectrum(&picture)).unwrap(),
                        },
                    }))),
                    Format::Csv => {
                        let mut s = format!("# chaoscope spectral picture samples={samples}\n");
                        s.push_str(&picture.boundary_csv(*samples));
                        Ok(Output::Text(s))
                    }
                }
            }
        },
        Command::Classify { spec } => {
            let op = load_spec(spec)?;
            let picture = spectral_picture(&op)?;
            let verdict = classify(&picture)?;
            Ok(Output::Json(json!({
                "command": "classify",
                "result": serde_json::to_value(&verdict).unwrap(),
            })))
        }
        Command::Orbit { cmd } => match cmd {
            OrbitCmd::Norms { spec, vector, horizon, format } => {
                let op = load_spec(spec)?;
                let v = load_vector(&vector.vector, &vector.vector_inline)?;
                let trace = orbit(&op, &v, *horizon)?;
                match format {
                    Format::Json => Ok(Output::Json(json!({
                        "command": "orbit norms",
                        "params": { "horizon": horizon },
                        "result": serde_json::to_value(&trace).unwrap(),
                    }))),
                    Format::Csv => {
                        let mut s = format!("# chaoscope orbit norms horizon={horizon}\n");
                        s.push_str(&trace.csv());
                        Ok(Output::Text(s))
                    }
                }
            }
            OrbitCmd::Pair { spec, pair, horizon, delta_low, delta_high } => {
                let op = load_spec(spec)?;
                let x = load_vector(&pair.x, &pair.x_inline)?;
                let y = load_vector(&pair.y, &pair.y_inline)?;
                let score = li_yorke_score(&op, &x, &y, *horizon, *delta_low, *delta_high)?;
                Ok(Output::Json(json!({
                    "command": "orbit pair",
                    "params": { "horizon": horizon, "delta_low": delta_low, "delta_high": delta_high },
                    "result": serde_json::to_value(&score).unwrap(),
                })))
            }
            OrbitCmd::DcStats {
                spec,
                pair,
                horizon,
                tau_min,
                tau_max,
                tau_points,
                format,
            } => {
                let op = load_spec(spec)?;
                let x = load_vector(&pair.x, &pair.x_inline)?;
                let y = load_vector(&pair.y, &pair.y_inline)?;
                let grid = if *tau_min == 1e-6 && *tau_max == 1e2 && *tau_points == 33 {
                    default_tau_grid()
                } else {
                    log_grid(*tau_min, *tau_max, *tau_points)
                        .map_err(Failure::Computation)?
                };
                let profile = pair_profile(&op, &x, &y, *horizon, &grid)?;
                match format {
                    Format::Json => Ok(Output::Json(json!({
                        "command": "orbit dc-stats",
                        "params": {
                            "horizon": horizon,
                            "tau_min": tau_min,
                            "tau_max": tau_max,
                            "tau_points": tau_points,
                        },
                        "result": serde_json::to_value(&profile).unwrap(),
                    }))),
                    Format::Csv => {
                        let mut s = format!(
                            "# chaoscope orbit dc-stats horizon={horizon} tau_min={tau_min} tau_max={tau_max} tau_points={tau_points}\n"
                        );
                        s.push_str(&profile.csv());
                        Ok(Output::Text(s))
                    }
                }
            }
        },
        Command::Certify { cmd } => match cmd {
            CertifyCmd::Unimodal { spec, gamma, m, horizon, candidates } => {
                let op = load_spec(spec)?;
                let cert = unimodal_certify(&op, *gamma, *m, *horizon, candidates.0..=candidates.1)?;
                let result = match cert {
                    Some(c) => json!({
                        "found": true,
                        "certificate": serde_json::to_value(&c).unwrap(),
                    }),
                    None => json!({ "found": false }),
                };
                Ok(Output::Json(json!({
                    "command": "certify unimodal",
                    "params": {
                        "gamma": gamma,
                        "m": m,
                        "horizon": horizon,
                        "candidates": [candidates.0, candidates.1],
                    },
                    "result": result,
                })))
            }
        },
        Command::Dichotomy { spec, count, seed, horizon, delta, support } => {
            let op = load_spec(spec)?;
            let samples = seeded_vectors(&op, *count, *seed, *support);
            let report = dichotomy_check(&op, &samples, *horizon, *delta)?;
            Ok(Output::Json(json!({
                "command": "dichotomy",
                "params": {
                    "count": count,
                    "seed": seed,
                    "horizon": horizon,
                    "delta": delta,
                    "support": [support.0, support.1],
                },
                "result": serde_json::to_value(&report).unwrap(),
            })))
        }
        Command::Gallery { cmd } => match cmd {
            GalleryCmd::List => Ok(Output::Json(json!({
                "command": "gallery list",
                "result": { "names": gallery_names() },
            }))),
            GalleryCmd::Build { name, no_verify } => {
                let entry = gallery(name)?;
                if !no_verify {
                    let mismatches = entry.verify()?;
                    if !mismatches.is_empty() {
                        return Err(Failure::Violation(format!(
                            "gallery mismatch: {}",
                            mismatches.join("; ")
                        )));
                    }
                }
                let spec_value: Value = serde_json::from_str(&entry.spec.to_canonical_json())
                    .expect("canonical spec reparses");
                Ok(Output::Json(json!({
                    "command": "gallery build",
                    "params": { "name": name, "verified": !no_verify },
                    "result": spec_value,
                })))
            }
        },
        Command::Path { t, samples, format } => {
            let points: Vec<f64> = match (t, samples) {
                (Some(t), None) => vec![*t],
                (None, Some(n)) => {
                    let n = (*n).max(2);
                    (0..n).map(|k| -1.0 + 3.0 * k as f64 / (n - 1) as f64).collect()
                }
                (None, None) => vec![0.5],
                (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
            };
            match format {
                Format::Json => {
                    let mut out = Vec::new();
                    for &tv in &points {
                        let p = path_picture(tv)?;
                        let v = classify(&p.picture)?;
                        out.push(json!({
                            "t": tv,
                            "F": v.f.value,
                            "point": serde_json::to_value(&p).unwrap(),
                        }));
                    }
                    Ok(Output::Json(json!({
                        "command": "path",
                        "params": { "count": points.len() },
                        "result": out,
                    })))
                }
                Format::Csv => {
                    let mut s = String::from("# chaoscope path positive-disk boundaries\nt,disk,point,re,im\n");
                    for &tv in &points {
                        let p = path_picture(tv)?;
                        for (di, c) in p.positive_index_regions.iter().enumerate() {
                            for k in 0..128 {
                                let theta = k as f64 * std::f64::consts::TAU / 128.0;
                                let z = c.center + c64(theta.cos(), theta.sin()) * c.radius;
                                s.push_str(&format!("{tv},{di},{k},{},{}\n", z.re, z.im));
                            }
                        }
                    }
                    Ok(Output::Text(s))
                }
            }
        }
        Command::Perturb { cmd } => match cmd {
            PerturbCmd::Identity { epsilon, dims } => {
                let report = identity_perturbation(*epsilon, dims)?;
                Ok(Output::Json(json!({
                    "command": "perturb identity",
                    "params": { "epsilon": epsilon, "dims": dims },
                    "result": serde_json::to_value(&report).unwrap(),
                })))
            }
        },
        Command::Relations { seed, count, budget, skip_gallery } => {
            let mut pictures = Vec::with_capacity(count + 8);
            for k in 0..*count {
                let p = random_picture(seed.wrapping_add(k as u64), *budget)?;
                pictures.push(p);
            }
            if !skip_gallery {
                for name in gallery_names() {
                    pictures.push(spectral_picture(&gallery(name)?.spec)?);
                }
            }
            let report = relation_suite(&pictures)?;
            let value = json!({
                "command": "relations",
                "params": {
                    "seed": seed,
                    "count": count,
                    "budget": budget,
                    "include_gallery": !skip_gallery,
                },
                "result": serde_json::to_value(&report).unwrap(),
            });
            if report.violations.is_empty() {
                Ok(Output::Json(value))
            } else {
                let rendered = serde_json::to_string(&value).expect("render");
                println!("{rendered}");
                Err(Failure::Violation(format!(
                    "{} relation violations",
                    report.violations.len()
                )))
            }
        }
    }
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(lo > 0.0 && hi > lo && points >= 2) {
        return Err("τ-grid needs 0 < tau_min < tau_max and at least 2 points".into());
    }
    let (a, b) = (lo.log10(), hi.log10());
    Ok((0..points)
        .map(|k| 10f64.powf(a + (b - a) * k as f64 / (points - 1) as f64))
        .collect())
}

/// Seeded random finite vectors with support clipped to the domain.
fn seeded_vectors(op: &OperatorSpec, count: usize, seed: u64, support: (i64, i64)) -> Vec<SparseVector> {
    use chaoscope_core::rand::Rng;
    use chaoscope_core::rand::SeedableRng;
    let dom = op.domain();
    let mut out = Vec::with_capacity(count);
    let mut rng = chaoscope_core::rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    while out.len() < count {
        let mut v = SparseVector::zero();
        for _ in 0..8 {
            let i = rng.random_range(support.0..=support.1);
            if dom.contains(i) {
                v.add_to(i, c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
            }
        }
        if !v.is_zero() {
            let n = v.norm();
            out.push(v.scale(c64(1.0 / n, 0.0)));
        }
    }
    out
}
