mod bench;
mod config;
mod io;
mod selftest;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ellbutterfly::butterfly;
use ellbutterfly::goppa::GoppaCode;
use ellbutterfly::lwe::{Ciphertext, Lwe, LweParams, PublicKey, SecretKey};
use ellbutterfly::ops::OpCounter;
use ellbutterfly::ring::RingCtx;
use ellbutterfly::tower::{cache_key, BPoint, Tower};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use config::{resolve, FileConfig};

/// Exit status classes.
#[derive(Debug)]
pub enum Fail {
    Usage(String),
    Math(String),
    Selftest(String),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Usage(_) => 1,
            Fail::Math(_) => 2,
            Fail::Selftest(_) => 3,
        }
    }
}

impl From<ellbutterfly::Error> for Fail {
    fn from(e: ellbutterfly::Error) -> Self {
        Fail::Math(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "ellbf", version, about = "Elliptic-curve butterflies over prime fields")]
struct Cli {
    /// File of `key = value` lines (p, delta, seed, curve, t, b, r, preset).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Debug, Default)]
pub struct CurveArgs {
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub delta: Option<u64>,
    /// `a1,a2,a3,a4,a6`.
    #[arg(long)]
    pub curve: Option<String>,
    /// `x,y` of a point of order `2^delta`.
    #[arg(long)]
    pub t: Option<String>,
    /// `x,y` of the coset point `b`.
    #[arg(long)]
    pub b: Option<String>,
    /// `x,y` of the auxiliary point `R`.
    #[arg(long)]
    pub r: Option<String>,
}

#[derive(Args, Clone, Debug)]
struct VecIo {
    /// Read vectors from this file instead of stdin.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Write results here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write `EBF1` frames instead of decimal lines (framed input is detected).
    #[arg(long)]
    binary: bool,
    /// Report the field operation count on stderr.
    #[arg(long)]
    ops: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Find a curve with a point of order 2^delta and print it.
    Search(CurveArgs),
    /// Build a tower and write it as JSON.
    Precompute {
        #[command(flatten)]
        curve: CurveArgs,
        /// Build over `R + <t>` instead of `b + <t>`.
        #[arg(long)]
        use_r: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Store under `<dir>/<key>.json`, reusing an existing entry.
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Values at `b + <t>` from u-coordinates.
    Eval {
        #[arg(long)]
        tower: PathBuf,
        #[command(flatten)]
        io: VecIo,
    },
    /// u-coordinates from values at `b + <t>`.
    Interp {
        #[arg(long)]
        tower: PathBuf,
        #[command(flatten)]
        io: VecIo,
    },
    /// Reduce a function on `2d` points of `L(2<t>)` to `L(<t>)`.
    Reduce {
        #[arg(long)]
        tower: PathBuf,
        #[command(flatten)]
        io: VecIo,
    },
    /// Ring product of consecutive pairs of vectors.
    Mul {
        #[arg(long)]
        tower_b: PathBuf,
        /// Omit for the diagonal ring.
        #[arg(long)]
        tower_r: Option<PathBuf>,
        #[command(flatten)]
        io: VecIo,
    },
    Goppa {
        #[command(subcommand)]
        cmd: GoppaCmd,
    },
    Lwe {
        #[command(subcommand)]
        cmd: LweCmd,
    },
    /// CSV timings and operation counts per d.
    Bench(bench::BenchArgs),
    /// Oracle and round-trip checks.
    Selftest(selftest::SelftestArgs),
}

#[derive(Args, Clone, Debug)]
struct GoppaSource {
    /// Tower with rational `Q`, `2dQ != O`; otherwise searched from p, delta.
    #[arg(long)]
    tower: Option<PathBuf>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    delta: Option<u64>,
}

#[derive(Subcommand)]
enum GoppaCmd {
    /// Codewords of `d/2`-symbol messages.
    Encode {
        #[command(flatten)]
        src: GoppaSource,
        #[command(flatten)]
        io: VecIo,
    },
    /// Messages of words, or `reject`.
    Check {
        #[command(flatten)]
        src: GoppaSource,
        #[command(flatten)]
        io: VecIo,
    },
}

#[derive(Subcommand)]
enum LweCmd {
    Keygen {
        /// `toy` or `guideline`.
        #[arg(long)]
        preset: Option<String>,
        /// JSON parameters overriding the preset.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        sk: PathBuf,
    },
    Enc {
        #[arg(long)]
        pk: PathBuf,
        /// `beta * ell^2` bits as a 0/1 string.
        #[arg(long)]
        message: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Dec {
        #[arg(long)]
        sk: PathBuf,
        #[arg(long)]
        ct: PathBuf,
    },
}

#[derive(Serialize, Deserialize)]
struct PkFile {
    params: LweParams,
    a: String,
    w: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct SkFile {
    params: LweParams,
    s: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct CtFile {
    params: LweParams,
    c1: Vec<String>,
    c2: Vec<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Fail::Usage(m) => eprintln!("usage error: {m}"),
                Fail::Math(m) => eprintln!("error: {m}"),
                Fail::Selftest(m) => eprintln!("selftest failed: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Fail> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let seed = cli.seed;
    match cli.cmd {
        Cmd::Search(args) => search(&args, &file, seed),
        Cmd::Precompute {
            curve,
            use_r,
            out,
            cache_dir,
        } => precompute(&curve, &file, seed, use_r, out.as_deref(), cache_dir.as_deref()),
        Cmd::Eval { tower, io } => tower_op(&tower, &io, |tw, v, ops| butterfly::evaluate(tw.view(), v, ops)),
        Cmd::Interp { tower, io } => tower_op(&tower, &io, |tw, v, ops| butterfly::interpolate(tw.view(), v, ops)),
        Cmd::Reduce { tower, io } => tower_op(&tower, &io, |tw, v, ops| butterfly::reduce(tw.view(), v, ops)),
        Cmd::Mul { tower_b, tower_r, io } => mul(&tower_b, tower_r.as_deref(), &io),
        Cmd::Goppa { cmd } => goppa(cmd, &file, seed),
        Cmd::Lwe { cmd } => lwe(cmd, &file, seed),
        Cmd::Bench(args) => bench::run(&args, &file, seed),
        Cmd::Selftest(args) => selftest::run(&args, seed),
    }
}

fn point_str(p: &ellbutterfly::curve::Point<u64>) -> String {
    match (p.x(), p.y()) {
        (Some(x), Some(y)) => format!("{x},{y}"),
        _ => "inf".into(),
    }
}

fn search(args: &CurveArgs, file: &FileConfig, seed: Option<u64>) -> Result<(), Fail> {
    let r = resolve(args, file, seed)?;
    println!("p = {}", r.p());
    println!("delta = {}", r.delta);
    println!("seed = {}", r.seed);
    println!("curve = {}", r.curve.coeffs().map(|c| c.to_string()).join(","));
    println!("t = {}", point_str(&r.t));
    println!("b = {}", point_str(&r.b));
    println!("r = {}", point_str(&r.r));
    Ok(())
}

fn precompute(
    args: &CurveArgs,
    file: &FileConfig,
    seed: Option<u64>,
    use_r: bool,
    out: Option<&Path>,
    cache_dir: Option<&Path>,
) -> Result<(), Fail> {
    let r = resolve(args, file, seed)?;
    let b = if use_r { r.r.clone() } else { r.b.clone() };
    let key = cache_key(r.p(), r.curve.coeffs(), &r.t, &BPoint::Rational(b.clone()));
    let cached = cache_dir.map(|dir| dir.join(format!("{key}.json")));
    if let Some(path) = &cached {
        if path.exists() {
            let text = read_text(path)?;
            Tower::from_json(&text)?;
            if let Some(o) = out {
                write_text(o, &text)?;
            }
            eprintln!("cached {}", path.display());
            return Ok(());
        }
    }
    let tower = Tower::build_rational(&r.curve, &r.t, &b)?;
    let json = tower.to_json();
    if let Some(path) = &cached {
        fs::create_dir_all(path.parent().unwrap()).map_err(|e| Fail::Math(e.to_string()))?;
        write_text(path, &json)?;
        eprintln!("stored {}", path.display());
    }
    match out {
        Some(o) => write_text(o, &json),
        None if cached.is_none() => io::write_output(None, json.as_bytes()),
        None => Ok(()),
    }
}

fn read_text(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::Math(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text).map_err(|e| Fail::Math(format!("{}: {e}", path.display())))
}

fn load_tower(path: &Path) -> Result<Tower, Fail> {
    Ok(Tower::from_json(&read_text(path)?)?)
}

fn tower_op(
    path: &Path,
    io: &VecIo,
    f: impl Fn(&Tower, &[u64], &mut OpCounter) -> ellbutterfly::Result<Vec<u64>>,
) -> Result<(), Fail> {
    let tw = load_tower(path)?;
    let p = tw.curve().field.modulus();
    let inputs = io::parse_vectors(&io::read_input(io.input.as_deref())?, p)?;
    let mut ops = OpCounter::new();
    let outs = inputs
        .iter()
        .map(|v| f(&tw, v, &mut ops))
        .collect::<ellbutterfly::Result<Vec<_>>>()?;
    finish(io, &outs, p, &ops)
}

fn finish(io: &VecIo, outs: &[Vec<u64>], p: u64, ops: &OpCounter) -> Result<(), Fail> {
    io::write_output(io.output.as_deref(), &io::format_vectors(outs, p, io.binary))?;
    if io.ops {
        eprintln!("ops = {}", ops.total());
    }
    Ok(())
}

fn mul(tower_b: &Path, tower_r: Option<&Path>, io: &VecIo) -> Result<(), Fail> {
    let b = load_tower(tower_b)?;
    let ring = match tower_r {
        Some(r) => RingCtx::new(b, load_tower(r)?)?,
        None => RingCtx::diagonal(b)?,
    };
    let p = ring.fp().modulus();
    let inputs = io::parse_vectors(&io::read_input(io.input.as_deref())?, p)?;
    if inputs.len() % 2 != 0 {
        return Err(Fail::Usage("mul needs an even number of vectors".into()));
    }
    let mut ops = OpCounter::new();
    let outs = inputs
        .chunks(2)
        .map(|fg| ring.multiply(&fg[0], &fg[1], &mut ops))
        .collect::<ellbutterfly::Result<Vec<_>>>()?;
    finish(io, &outs, p, &ops)
}

fn goppa_code(src: &GoppaSource, file: &FileConfig, seed: Option<u64>) -> Result<GoppaCode, Fail> {
    if let Some(path) = &src.tower {
        return Ok(GoppaCode::new(load_tower(path)?)?);
    }
    let args = CurveArgs {
        p: src.p,
        delta: src.delta,
        ..Default::default()
    };
    let r = resolve(&args, file, seed)?;
    if !GoppaCode::within_bound(r.fp, r.delta) {
        eprintln!("warning: q is below the length bound for d = {}", 1u64 << r.delta);
    }
    Ok(GoppaCode::search(r.fp, r.delta, r.seed)?)
}

fn goppa(cmd: GoppaCmd, file: &FileConfig, seed: Option<u64>) -> Result<(), Fail> {
    let mut ops = OpCounter::new();
    match cmd {
        GoppaCmd::Encode { src, io } => {
            let code = goppa_code(&src, file, seed)?;
            let p = code.fp().modulus();
            let msgs = io::parse_vectors(&io::read_input(io.input.as_deref())?, p)?;
            let outs = msgs
                .iter()
                .map(|m| code.encode(m, &mut ops))
                .collect::<ellbutterfly::Result<Vec<_>>>()?;
            finish(&io, &outs, p, &ops)
        }
        GoppaCmd::Check { src, io } => {
            let code = goppa_code(&src, file, seed)?;
            let p = code.fp().modulus();
            let words = io::parse_vectors(&io::read_input(io.input.as_deref())?, p)?;
            let mut text = String::new();
            for w in &words {
                match code.check(w, &mut ops)? {
                    Some(m) => text.push_str(&format!(
                        "ok {}\n",
                        m.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
                    )),
                    None => text.push_str("reject\n"),
                }
            }
            io::write_output(io.output.as_deref(), text.as_bytes())?;
            if io.ops {
                eprintln!("ops = {}", ops.total());
            }
            Ok(())
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Fail> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Fail::Math(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: Option<&Path>, v: &T) -> Result<(), Fail> {
    let text = serde_json::to_string_pretty(v).expect("serializable") + "\n";
    match path {
        Some(p) => write_text(p, &text),
        None => io::write_output(None, text.as_bytes()),
    }
}

fn hex_all(vs: &[Vec<u64>], p: u64) -> Vec<String> {
    vs.iter().map(|v| io::to_hex(v, p)).collect()
}

fn unhex_all(vs: &[String], p: u64) -> Result<Vec<Vec<u64>>, Fail> {
    vs.iter().map(|s| io::from_hex(s, p)).collect()
}

fn lwe(cmd: LweCmd, file: &FileConfig, seed: Option<u64>) -> Result<(), Fail> {
    let seed = seed.unwrap_or(0);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut ops = OpCounter::new();
    match cmd {
        LweCmd::Keygen { preset, params, pk, sk } => {
            let params = match (params, preset.as_deref().or(file.get("preset"))) {
                (Some(path), _) => read_json(&path)?,
                (None, name) => LweParams::preset(name.unwrap_or("toy")).map_err(|e| Fail::Usage(e.to_string()))?,
            };
            let scheme = Lwe::new(params.clone())?;
            let p = params.q;
            let (public, secret) = scheme.keygen(&mut rng, &mut ops)?;
            write_json(
                Some(&pk),
                &PkFile {
                    params: params.clone(),
                    a: io::to_hex(&public.a, p),
                    w: hex_all(&public.w, p),
                },
            )?;
            write_json(
                Some(&sk),
                &SkFile {
                    params,
                    s: hex_all(&secret.s, p),
                },
            )
        }
        LweCmd::Enc { pk, message, out } => {
            let f: PkFile = read_json(&pk)?;
            let p = f.params.q;
            let bits = message
                .trim()
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(Fail::Usage(format!("message must be 0/1 bits, got {c:?}"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let want = f.params.beta as usize * f.params.ell * f.params.ell;
            if bits.len() != want {
                return Err(Fail::Usage(format!("message needs {want} bits, got {}", bits.len())));
            }
            let scheme = Lwe::new(f.params.clone())?;
            let public: PublicKey = scheme.public_key(io::from_hex(&f.a, p)?, unhex_all(&f.w, p)?)?;
            let slots = ellbutterfly::lwe::bits_to_slots(&bits, f.params.beta);
            let ct = scheme.encrypt(&public, &slots, &mut rng, &mut ops)?;
            write_json(
                out.as_deref(),
                &CtFile {
                    params: f.params,
                    c1: hex_all(&ct.c1, p),
                    c2: hex_all(&ct.c2, p),
                },
            )
        }
        LweCmd::Dec { sk, ct } => {
            let s: SkFile = read_json(&sk)?;
            let c: CtFile = read_json(&ct)?;
            if s.params != c.params {
                return Err(Fail::Math("key and ciphertext parameters differ".into()));
            }
            let p = s.params.q;
            let scheme = Lwe::new(s.params.clone())?;
            let secret = SecretKey {
                s: unhex_all(&s.s, p)?,
            };
            let ct = Ciphertext {
                c1: unhex_all(&c.c1, p)?,
                c2: unhex_all(&c.c2, p)?,
            };
            let slots = scheme.decrypt(&secret, &ct, &mut ops)?;
            let bits = ellbutterfly::lwe::slots_to_bits(&slots, s.params.beta);
            println!("{}", bits.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>());
            Ok(())
        }
    }
}
