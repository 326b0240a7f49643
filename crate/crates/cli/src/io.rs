//! Vector I/O: whitespace-separated decimals, or frames
//! `"EBF1" | p: u64 LE | count: u32 LE | count residues` with each residue
//! little-endian in `width(p)` bytes.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::Fail;

pub const MAGIC: &[u8; 4] = b"EBF1";

/// `ceil(log2 p / 8)` bytes, enough for every residue below `p`.
pub fn width(p: u64) -> usize {
    let bits = 64 - (p - 1).leading_zeros() as usize;
    bits.div_ceil(8).max(1)
}

pub fn read_input(path: Option<&Path>) -> Result<Vec<u8>, Fail> {
    let mut buf = Vec::new();
    match path {
        Some(p) => buf = fs::read(p).map_err(|e| Fail::Math(format!("{}: {e}", p.display())))?,
        None => {
            std::io::stdin()
                .read_to_end(&mut buf)
                .map_err(|e| Fail::Math(format!("stdin: {e}")))?;
        }
    }
    Ok(buf)
}

pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), Fail> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| Fail::Math(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| Fail::Math(format!("stdout: {e}"))),
    }
}

/// Vectors from text (one per non-empty line) or, when the input starts
/// with the magic, from consecutive frames.
pub fn parse_vectors(bytes: &[u8], p: u64) -> Result<Vec<Vec<u64>>, Fail> {
    if bytes.starts_with(MAGIC) {
        let mut out = Vec::new();
        let mut rest = bytes;
        while !rest.is_empty() {
            let (v, tail) = decode_frame(rest, p)?;
            out.push(v);
            rest = tail;
        }
        return Ok(out);
    }
    let text = std::str::from_utf8(bytes).map_err(|_| Fail::Usage("input is not UTF-8 text".into()))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| parse_decimal_line(l, p))
        .collect()
}

pub fn parse_decimal_line(line: &str, p: u64) -> Result<Vec<u64>, Fail> {
    line.split_whitespace()
        .map(|tok| {
            let v: u64 = tok
                .parse()
                .map_err(|_| Fail::Usage(format!("not a decimal residue: {tok:?}")))?;
            if v >= p {
                return Err(Fail::Usage(format!("{v} is not reduced modulo {p}")));
            }
            Ok(v)
        })
        .collect()
}

pub fn format_vectors(vs: &[Vec<u64>], p: u64, binary: bool) -> Vec<u8> {
    if binary {
        return vs.iter().flat_map(|v| encode_frame(v, p)).collect();
    }
    let mut s = String::new();
    for v in vs {
        let line: Vec<String> = v.iter().map(u64::to_string).collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s.into_bytes()
}

pub fn encode_residues(v: &[u64], p: u64) -> Vec<u8> {
    let w = width(p);
    v.iter().flat_map(|x| x.to_le_bytes()[..w].to_vec()).collect()
}

pub fn decode_residues(bytes: &[u8], p: u64) -> Result<Vec<u64>, Fail> {
    let w = width(p);
    if !bytes.len().is_multiple_of(w) {
        return Err(Fail::Usage(format!("{} bytes is not a multiple of {w}", bytes.len())));
    }
    bytes
        .chunks(w)
        .map(|c| {
            let mut b = [0u8; 8];
            b[..w].copy_from_slice(c);
            let v = u64::from_le_bytes(b);
            if v >= p {
                Err(Fail::Usage(format!("{v} is not reduced modulo {p}")))
            } else {
                Ok(v)
            }
        })
        .collect()
}

pub fn encode_frame(v: &[u64], p: u64) -> Vec<u8> {
    let mut out = MAGIC.to_vec();
    out.extend(p.to_le_bytes());
    out.extend((v.len() as u32).to_le_bytes());
    out.extend(encode_residues(v, p));
    out
}

pub fn decode_frame(bytes: &[u8], p: u64) -> Result<(Vec<u64>, &[u8]), Fail> {
    if bytes.len() < 16 || &bytes[..4] != MAGIC {
        return Err(Fail::Usage("bad frame header".into()));
    }
    let fp = u64::from_le_bytes(bytes[4..12].try_into().unwrap());
    if fp != p {
        return Err(Fail::Usage(format!("frame is for p = {fp}, expected {p}")));
    }
    let n = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let len = n * width(p);
    if bytes.len() < 16 + len {
        return Err(Fail::Usage("truncated frame".into()));
    }
    Ok((decode_residues(&bytes[16..16 + len], p)?, &bytes[16 + len..]))
}

pub fn to_hex(v: &[u64], p: u64) -> String {
    hex::encode(encode_residues(v, p))
}

pub fn from_hex(s: &str, p: u64) -> Result<Vec<u64>, Fail> {
    let bytes = hex::decode(s.trim()).map_err(|e| Fail::Usage(format!("bad hex: {e}")))?;
    decode_residues(&bytes, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths() {
        assert_eq!(width(101), 1);
        assert_eq!(width(257), 2);
        assert_eq!(width(65537), 3);
        assert_eq!(width(998244353), 4);
        assert_eq!(width((1 << 61) - 1), 8);
    }

    #[test]
    fn frames_and_hex_roundtrip() {
        let p = 998244353;
        let a = vec![0, 1, p - 1, 12345];
        let b = vec![7];
        let bytes = format_vectors(&[a.clone(), b.clone()], p, true);
        assert_eq!(parse_vectors(&bytes, p).unwrap(), vec![a.clone(), b]);
        assert_eq!(from_hex(&to_hex(&a, p), p).unwrap(), a);
        assert!(parse_vectors(&bytes[..bytes.len() - 1], p).is_err());
        assert!(parse_vectors(&bytes, 101).is_err());
    }

    #[test]
    fn text_roundtrip() {
        let p = 10007;
        let vs = vec![vec![1, 2, 3], vec![10006, 0]];
        let bytes = format_vectors(&vs, p, false);
        assert_eq!(parse_vectors(&bytes, p).unwrap(), vs);
        assert!(parse_vectors(b"1 2 x", p).is_err());
        assert!(parse_vectors(b"10007", p).is_err());
    }
}
