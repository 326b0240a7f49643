//! CSV rows `d,algorithm,wall_time,op_count`, wall time in seconds.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use ellbutterfly::butterfly;
use ellbutterfly::curve::{find_point_not_killed_by, find_torsion_curve};
use ellbutterfly::ntt::NttCtx;
use ellbutterfly::ops::OpCounter;
use ellbutterfly::ring::RingCtx;
use ellbutterfly::tower::Tower;
use ellbutterfly::{Field, Fp};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::FileConfig;
use crate::Fail;

#[derive(Args, Clone, Debug)]
pub struct BenchArgs {
    #[arg(long)]
    p: Option<u64>,
    #[arg(long, default_value_t = 8)]
    min_delta: u32,
    #[arg(long, default_value_t = 16)]
    max_delta: u32,
    /// Timed repetitions; the mean is reported.
    #[arg(long, default_value_t = 3)]
    reps: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub d: usize,
    pub algorithm: &'static str,
    pub wall_time: f64,
    pub op_count: u64,
}

fn timed(reps: u32, mut f: impl FnMut(&mut OpCounter) -> ellbutterfly::Result<Vec<u64>>) -> Result<(f64, u64), Fail> {
    let mut ops = OpCounter::new();
    f(&mut ops)?;
    let start = Instant::now();
    for _ in 0..reps {
        f(&mut OpCounter::new())?;
    }
    Ok((start.elapsed().as_secs_f64() / reps.max(1) as f64, ops.total()))
}

pub fn rows(p: u64, deltas: std::ops::RangeInclusive<u32>, reps: u32, seed: u64) -> Result<Vec<Row>, Fail> {
    let fp = Fp::new(p).map_err(|e| Fail::Usage(e.to_string()))?;
    let max = *deltas.end();
    let tc = find_torsion_curve(fp, max, seed)?;
    let e = &tc.curve;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for delta in deltas {
        let d = 1usize << delta;
        let t = e.mul(&tc.t, 1 << (max - delta));
        let b = find_point_not_killed_by(e, d as u64, seed ^ 0xb)?;
        let tw_b = Tower::build_rational(e, &t, &b)?;
        let tw_r = Tower::build_rational(e, &t, &tc.r)?;
        let x: Vec<u64> = (0..d).map(|_| fp.random(&mut rng)).collect();
        let y: Vec<u64> = (0..d).map(|_| fp.random(&mut rng)).collect();
        let mut push = |algorithm, (wall_time, op_count)| {
            out.push(Row {
                d,
                algorithm,
                wall_time,
                op_count,
            })
        };
        match NttCtx::new(fp, d) {
            Ok(ntt) => {
                push("ntt_eval", timed(reps, |o| ntt.forward(&x, o))?);
                push("ntt_interp", timed(reps, |o| ntt.inverse(&x, o))?);
            }
            Err(_) => eprintln!("note: no NTT of size {d} modulo {p}"),
        }
        push("ell_eval", timed(reps, |o| butterfly::evaluate(tw_b.view(), &x, o))?);
        push("ell_interp", timed(reps, |o| butterfly::interpolate(tw_b.view(), &x, o))?);
        push("ell_reduce", timed(reps, |o| butterfly::reduce(tw_b.view(), &x, o))?);
        let ring = RingCtx::new(tw_b, tw_r)?;
        push("ring_mul", timed(reps, |o| ring.multiply(&x, &y, o))?);
    }
    Ok(out)
}

pub fn run(args: &BenchArgs, file: &FileConfig, seed: Option<u64>) -> Result<(), Fail> {
    if args.min_delta < 1 || args.min_delta > args.max_delta || args.max_delta > 24 {
        return Err(Fail::Usage("need 1 <= min-delta <= max-delta <= 24".into()));
    }
    let p = match (args.p, file.get("p")) {
        (Some(p), _) => p,
        (None, Some(s)) => s.parse().map_err(|_| Fail::Usage(format!("p: {s:?}")))?,
        (None, None) => 998244353,
    };
    let seed = seed.or_else(|| file.get("seed").and_then(|s| s.parse().ok())).unwrap_or(0);
    let data = rows(p, args.min_delta..=args.max_delta, args.reps, seed)?;
    let sink: Box<dyn std::io::Write> = match &args.out {
        Some(path) => Box::new(std::fs::File::create(path).map_err(|e| Fail::Math(format!("{}: {e}", path.display())))?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for r in &data {
        w.serialize(r).map_err(|e| Fail::Math(e.to_string()))?;
    }
    w.flush().map_err(|e| Fail::Math(e.to_string()))
}
