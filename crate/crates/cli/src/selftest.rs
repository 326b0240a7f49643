//! Dense-oracle comparisons at small d, round trips up to `--max-delta`,
//! and optional integrity checks of tower files.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use ellbutterfly::basis::BasisTag;
use ellbutterfly::curve::{find_point_not_killed_by, find_torsion_curve};
use ellbutterfly::goppa::GoppaCode;
use ellbutterfly::lwe::{ChiSpec, Lwe, LweParams};
use ellbutterfly::ntt::{naive_dft, NttCtx};
use ellbutterfly::ops::OpCounter;
use ellbutterfly::ring::{multiply_oracle, RingCtx};
use ellbutterfly::tower::Tower;
use ellbutterfly::{Field, Fp};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::Fail;

#[derive(Args, Clone, Debug)]
pub struct SelftestArgs {
    /// Largest d for dense-oracle comparisons is `2^oracle_delta`.
    #[arg(long, default_value_t = 6)]
    oracle_delta: u32,
    /// Largest round-trip size is `2^max_delta`.
    #[arg(long, default_value_t = 12)]
    max_delta: u32,
    /// Tower files to verify (digests and defining identities).
    #[arg(long)]
    tower: Vec<PathBuf>,
}

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rv(fp: &Fp, n: usize, rng: &mut ChaCha8Rng) -> Vec<u64> {
    (0..n).map(|_| fp.random(rng)).collect()
}

fn oracles(max: u32, seed: u64) -> Check {
    let mut n = 0;
    for (p, k) in [(1000000007u64, 1u64), (998244353, 2)] {
        for delta in 1..=max {
            let tc = find_torsion_curve(Fp::new(p).unwrap(), delta, seed + 10 * k + delta as u64).map_err(s)?;
            let tw = Tower::build_rational(&tc.curve, &tc.t, &tc.r).map_err(s)?;
            let (fp, d, basis) = (tc.curve.field, tw.d(), tw.basis());
            let pts = tw.coset().unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ delta as u64);
            for _ in 0..10 {
                let f = rv(&fp, d, &mut rng);
                ensure(tw.evaluate(&f).map_err(s)? == basis.evaluate(BasisTag::U, &f, &pts).map_err(s)?, || {
                    format!("evaluate at p={p} d={d}")
                })?;
                ensure(tw.interpolate(&f).map_err(s)? == basis.interpolate(&f, &pts).map_err(s)?, || {
                    format!("interpolate at p={p} d={d}")
                })?;
                ensure(tw.reduce(&f).map_err(s)? == basis.reduce(&f, &pts).map_err(s)?, || {
                    format!("reduce at p={p} d={d}")
                })?;
                n += 3;
            }
        }
    }
    Ok(format!("{n} comparisons up to d = {}", 1u64 << max))
}

fn roundtrips(max: u32, seed: u64) -> Check {
    let tc = find_torsion_curve(Fp::new(1000000007).unwrap(), max, seed).map_err(s)?;
    let fp = tc.curve.field;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for delta in 1..=max {
        let t = tc.curve.mul(&tc.t, 1 << (max - delta));
        let tw = Tower::build_rational(&tc.curve, &t, &tc.r).map_err(s)?;
        let x = rv(&fp, tw.d(), &mut rng);
        ensure(tw.interpolate(&tw.evaluate(&x).map_err(s)?).map_err(s)? == x, || {
            format!("interpolate o evaluate at d={}", tw.d())
        })?;
        ensure(tw.evaluate(&tw.interpolate(&x).map_err(s)?).map_err(s)? == x, || {
            format!("evaluate o interpolate at d={}", tw.d())
        })?;
    }
    Ok(format!("d = 2..{}", 1u64 << max))
}

fn ring(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ops = OpCounter::new();
    for delta in 1..=4 {
        let tc = find_torsion_curve(Fp::new(10007).unwrap(), delta, seed + delta as u64).map_err(s)?;
        let b = find_point_not_killed_by(&tc.curve, 1 << delta, seed).map_err(s)?;
        let ring = RingCtx::new(
            Tower::build_rational(&tc.curve, &tc.t, &b).map_err(s)?,
            Tower::build_rational(&tc.curve, &tc.t, &tc.r).map_err(s)?,
        )
        .map_err(s)?;
        let fp = ring.fp();
        for _ in 0..5 {
            let (f, g) = (rv(&fp, ring.d(), &mut rng), rv(&fp, ring.d(), &mut rng));
            let fg = ring.multiply(&f, &g, &mut ops).map_err(s)?;
            ensure(fg == multiply_oracle(ring.tower_b(), &f, &g).map_err(s)?, || {
                format!("ring product at d={}", ring.d())
            })?;
        }
    }
    Ok("d = 2..16 against the pointwise product".into())
}

fn ntt(seed: u64) -> Check {
    let fp = Fp::new(998244353).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for delta in 1..=6 {
        let ctx = NttCtx::new(fp, 1 << delta).map_err(s)?;
        let x = rv(&fp, 1 << delta, &mut rng);
        let y = ctx.forward(&x, &mut OpCounter::new()).map_err(s)?;
        ensure(y == naive_dft(&fp, ctx.omega, &x), || format!("NTT at d={}", 1 << delta))?;
        ensure(ctx.inverse(&y, &mut OpCounter::new()).map_err(s)? == x, || {
            format!("inverse NTT at d={}", 1 << delta)
        })?;
    }
    Ok("d = 2..64 against the naive DFT".into())
}

fn goppa(seed: u64) -> Check {
    let code = GoppaCode::search(Fp::new(10007).unwrap(), 3, seed).map_err(s)?;
    let fp = code.fp();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ops = OpCounter::new();
    for _ in 0..20 {
        let m = rv(&fp, code.k(), &mut rng);
        let mut w = code.encode(&m, &mut ops).map_err(s)?;
        ensure(code.check(&w, &mut ops).map_err(s)? == Some(m), || "codeword rejected".into())?;
        w[0] = fp.add(&w[0], &1);
        ensure(code.check(&w, &mut ops).map_err(s)?.is_none(), || "corrupted word accepted".into())?;
    }
    Ok("encode/check at d = 8".into())
}

fn lwe(seed: u64) -> Check {
    let params = LweParams {
        q: 10007,
        delta: 4,
        chi: ChiSpec::Zero,
        beta: 2,
        ell: 2,
        curve_seed: seed,
        failure_target: 0.0,
    };
    let scheme = Lwe::new(params).map_err(s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ops = OpCounter::new();
    let (pk, sk) = scheme.keygen(&mut rng, &mut ops).map_err(s)?;
    for k in 0..4u64 {
        let slots: Vec<u64> = (0..4).map(|j| (k + j) % 4).collect();
        let ct = scheme.encrypt(&pk, &slots, &mut rng, &mut ops).map_err(s)?;
        ensure(scheme.decrypt(&sk, &ct, &mut ops).map_err(s)? == slots, || {
            "noiseless decryption".into()
        })?;
    }
    Ok("noiseless 2-bit, 2x2-slot scheme at d = 16".into())
}

fn tower_file(path: &PathBuf) -> Check {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let tw = Tower::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let rep = tw.verify_identities(10, 0).map_err(s)?;
    ensure(rep.ok(), || format!("{}: {:?}", path.display(), rep.failures))?;
    Ok(format!("{} (d = {}, {} identities)", path.display(), tw.d(), rep.checked))
}

pub fn run(args: &SelftestArgs, seed: Option<u64>) -> Result<(), Fail> {
    if args.oracle_delta > 6 || args.max_delta > 16 {
        return Err(Fail::Usage("need oracle-delta <= 6 and max-delta <= 16".into()));
    }
    let seed = seed.unwrap_or(1);
    let mut checks: Vec<(String, Box<dyn Fn() -> Check>)> = vec![
        ("oracles".into(), Box::new(move || oracles(args.oracle_delta, seed))),
        ("roundtrips".into(), Box::new(move || roundtrips(args.max_delta, seed))),
        ("ring".into(), Box::new(move || ring(seed))),
        ("ntt".into(), Box::new(move || ntt(seed))),
        ("goppa".into(), Box::new(move || goppa(seed))),
        ("lwe".into(), Box::new(move || lwe(seed))),
    ];
    for path in &args.tower {
        let p = path.clone();
        checks.push((format!("tower {}", path.display()), Box::new(move || tower_file(&p))));
    }
    let mut failed = Vec::new();
    for (name, f) in &checks {
        let start = Instant::now();
        match f() {
            Ok(msg) => println!("PASS  {name}: {msg} [{:.1?}]", start.elapsed()),
            Err(msg) => {
                println!("FAIL  {name}: {msg} [{:.1?}]", start.elapsed());
                failed.push(name.clone());
            }
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Fail::Selftest(failed.join(", ")))
    }
}
