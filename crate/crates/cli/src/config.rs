//! `key = value` run configuration; command-line flags take precedence.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use ellbutterfly::curve::{find_point_not_killed_by, find_torsion_curve, Curve, Point};
use ellbutterfly::Fp;

use crate::{CurveArgs, Fail};

pub const KEYS: [&str; 8] = ["p", "delta", "seed", "curve", "t", "b", "r", "preset"];

#[derive(Clone, Debug, Default)]
pub struct FileConfig(BTreeMap<String, String>);

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, Fail> {
        let text = fs::read_to_string(path).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, Fail> {
        let mut map = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Fail::Usage(format!("config line {}: expected key = value", k + 1)))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(Fail::Usage(format!("config line {}: unknown key {key:?}", k + 1)));
            }
            map.insert(key.to_string(), value.trim().to_string());
        }
        Ok(FileConfig(map))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }
}

fn parse_u64(key: &str, s: &str) -> Result<u64, Fail> {
    s.trim()
        .parse()
        .map_err(|_| Fail::Usage(format!("{key}: expected an integer, got {s:?}")))
}

fn parse_list(key: &str, s: &str) -> Result<Vec<u64>, Fail> {
    s.split(',').map(|x| parse_u64(key, x)).collect()
}

pub fn parse_point(key: &str, s: &str) -> Result<Point<u64>, Fail> {
    if s.trim() == "inf" {
        return Ok(Point::Infinity);
    }
    match parse_list(key, s)?.as_slice() {
        [x, y] => Ok(Point::Affine(*x, *y)),
        _ => Err(Fail::Usage(format!("{key}: expected x,y or inf"))),
    }
}

/// Fully resolved curve data; searches are deterministic in `seed`.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub fp: Fp,
    pub delta: u32,
    pub seed: u64,
    pub curve: Curve<Fp>,
    pub t: Point<u64>,
    pub b: Point<u64>,
    pub r: Point<u64>,
}

impl Resolved {
    pub fn p(&self) -> u64 {
        self.fp.modulus()
    }
}

/// Merges flags over the file and validates before any heavy work.
pub fn resolve(args: &CurveArgs, file: &FileConfig, seed: Option<u64>) -> Result<Resolved, Fail> {
    let pick = |flag: &Option<String>, key: &str| flag.clone().or_else(|| file.get(key).map(String::from));
    let p = pick(&args.p.map(|v| v.to_string()), "p").ok_or_else(|| Fail::Usage("missing p".into()))?;
    let p = parse_u64("p", &p)?;
    let fp = Fp::new(p).map_err(|e| Fail::Usage(e.to_string()))?;
    let seed = match seed {
        Some(s) => s,
        None => file.get("seed").map(|s| parse_u64("seed", s)).transpose()?.unwrap_or(0),
    };
    let delta = pick(&args.delta.map(|v| v.to_string()), "delta")
        .map(|s| parse_u64("delta", &s))
        .transpose()?;
    if let Some(dl) = delta {
        if dl == 0 || dl > 40 {
            return Err(Fail::Usage("delta must be in 1..=40".into()));
        }
    }
    let b = pick(&args.b, "b").map(|s| parse_point("b", &s)).transpose()?;
    let r = pick(&args.r, "r").map(|s| parse_point("r", &s)).transpose()?;
    let (curve, t, found_r) = match pick(&args.curve, "curve") {
        Some(c) => {
            let coeffs: [u64; 5] = parse_list("curve", &c)?
                .try_into()
                .map_err(|_| Fail::Usage("curve: expected a1,a2,a3,a4,a6".into()))?;
            let e = Curve::from_u64(fp, coeffs)?;
            let t = pick(&args.t, "t").ok_or_else(|| Fail::Usage("an explicit curve needs t".into()))?;
            (e, parse_point("t", &t)?, None)
        }
        None => {
            let dl = delta.ok_or_else(|| Fail::Usage("missing delta (or an explicit curve and t)".into()))?;
            let tc = find_torsion_curve(fp, dl as u32, seed)?;
            (tc.curve, tc.t, Some(tc.r))
        }
    };
    if !curve.contains(&t) {
        return Err(Fail::Math("t is not on the curve".into()));
    }
    let got = curve
        .two_power_order(&t, 40)
        .filter(|&k| k > 0)
        .ok_or_else(|| Fail::Math("t must have order 2^delta with delta >= 1".into()))?;
    if let Some(dl) = delta {
        if dl as u32 != got {
            return Err(Fail::Math(format!("t has order 2^{got}, not 2^{dl}")));
        }
    }
    let d = 1u64 << got;
    let r = match (r, found_r) {
        (Some(r), _) => r,
        (None, Some(r)) => r,
        (None, None) => find_point_not_killed_by(&curve, d, seed)?,
    };
    let b = match b {
        Some(b) => b,
        None => find_point_not_killed_by(&curve, d, seed ^ 0xb)?,
    };
    Ok(Resolved {
        fp,
        delta: got,
        seed,
        curve,
        t,
        b,
        r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_config_file() {
        let c = FileConfig::parse("# run\np = 10007\ndelta=3 # size\n\nseed = 5\n").unwrap();
        assert_eq!(c.get("p"), Some("10007"));
        assert_eq!(c.get("delta"), Some("3"));
        assert!(FileConfig::parse("q = 1").is_err());
        assert!(FileConfig::parse("p 1").is_err());
    }

    #[test]
    fn flags_override_file_and_search_is_deterministic() {
        let file = FileConfig::parse("p = 10007\ndelta = 2\nseed = 1").unwrap();
        let args = CurveArgs {
            delta: Some(3),
            ..Default::default()
        };
        let a = resolve(&args, &file, None).unwrap();
        let b = resolve(&args, &file, None).unwrap();
        assert_eq!(a.delta, 3);
        assert_eq!(a.curve, b.curve);
        assert_eq!(a.t, b.t);
        let explicit = CurveArgs {
            curve: Some(a.curve.coeffs().map(|v| v.to_string()).join(",")),
            t: Some(format!("{},{}", a.t.x().unwrap(), a.t.y().unwrap())),
            ..Default::default()
        };
        // delta = 2 from the file contradicts t
        assert!(matches!(resolve(&explicit, &file, None), Err(Fail::Math(_))));
        let explicit = CurveArgs {
            delta: Some(3),
            ..explicit
        };
        let c = resolve(&explicit, &file, Some(9)).unwrap();
        assert_eq!(c.delta, 3);
        assert_eq!(c.seed, 9);
        assert!(resolve(&CurveArgs::default(), &FileConfig::default(), None).is_err());
    }
}
