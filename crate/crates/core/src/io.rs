//! On-disk formats: `ESEQ1` sequence files and the `eulerseq-dd-v1` JSON
//! document for defining data.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::defining::DefiningData;
use crate::error::{Error, Result};
use crate::quotients::Params;
use crate::sequences::BinarySequence;

pub const DD_SCHEMA: &str = "eulerseq-dd-v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SequenceFormat {
    /// One `0` or `1` per line.
    Ascii,
    /// Packed bytes, bit `u` at bit `u % 8` of byte `u / 8`.
    Bin,
}

pub fn header(params: &Params, count: usize) -> String {
    format!("ESEQ1 p={} r={} n={}\n", params.p(), params.r_frak(), count)
}

pub fn write_sequence<W: Write>(mut out: W, seq: &BinarySequence, format: SequenceFormat) -> Result<()> {
    out.write_all(header(seq.params(), seq.len()).as_bytes())?;
    match format {
        SequenceFormat::Ascii => {
            let mut body = Vec::with_capacity(2 * seq.len());
            for &b in seq.bits() {
                body.extend_from_slice(if b { b"1\n" } else { b"0\n" });
            }
            out.write_all(&body)?;
        }
        SequenceFormat::Bin => out.write_all(&pack_bits(seq.bits()))?,
    }
    out.flush()?;
    Ok(())
}

pub fn pack_bits(bits: &[bool]) -> Vec<u8> {
    let mut bytes = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            bytes[i / 8] |= 1 << (i % 8);
        }
    }
    bytes
}

pub fn unpack_bits(bytes: &[u8], count: usize) -> Vec<bool> {
    (0..count).map(|i| (bytes[i / 8] >> (i % 8)) & 1 == 1).collect()
}

/// Reads a sequence file; the body layout is recognised by its length
/// (`2n` bytes for ascii, `ceil(n/8)` for packed).
pub fn read_sequence<R: Read>(mut input: R) -> Result<(BinarySequence, SequenceFormat)> {
    let mut data = Vec::new();
    input.read_to_end(&mut data)?;
    let nl = data
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Parse("missing header line".into()))?;
    let head = std::str::from_utf8(&data[..nl]).map_err(|_| Error::Parse("header is not UTF-8".into()))?;
    let (p, r, n) = parse_header(head)?;
    let params = Params::new(p, r)?;
    let body = &data[nl + 1..];
    let (bits, format) = if body.len() == 2 * n {
        let mut bits = Vec::with_capacity(n);
        for (i, line) in body.chunks(2).enumerate() {
            match line {
                b"0\n" => bits.push(false),
                b"1\n" => bits.push(true),
                _ => return Err(Error::Parse(format!("bad ascii bit at line {}", i + 2))),
            }
        }
        (bits, SequenceFormat::Ascii)
    } else if body.len() == n.div_ceil(8) {
        if n % 8 != 0 && body.last().is_some_and(|&b| b >> (n % 8) != 0) {
            return Err(Error::Parse("nonzero padding bits".into()));
        }
        (unpack_bits(body, n), SequenceFormat::Bin)
    } else {
        return Err(Error::Parse(format!("body of {} bytes does not hold {n} bits", body.len())));
    };
    let period = params.period();
    Ok((BinarySequence::new(params, bits, period), format))
}

fn parse_header(line: &str) -> Result<(u64, u32, usize)> {
    let bad = || Error::Parse(format!("bad header {line:?}"));
    let mut it = line.split(' ');
    if it.next() != Some("ESEQ1") {
        return Err(bad());
    }
    let mut field = |key: &str| -> Result<&str> {
        it.next().and_then(|kv| kv.strip_prefix(key)).ok_or_else(bad)
    };
    let p = field("p=")?.parse().map_err(|_| bad())?;
    let r = field("r=")?.parse().map_err(|_| bad())?;
    let n = field("n=")?.parse().map_err(|_| bad())?;
    if it.next().is_some() {
        return Err(bad());
    }
    Ok((p, r, n))
}

/// Serialized form of [`DefiningData`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefiningDocument {
    pub schema: String,
    pub p: u64,
    pub r: u32,
    pub period: u64,
    pub lambda: u64,
    pub t0: u32,
    pub degree: usize,
    /// Coefficient bits of the field modulus as lowercase hex.
    pub modulus: String,
    pub beta: String,
    pub g: u64,
    pub unit_term_parity: bool,
    /// `eta[r - 1][l]`.
    pub eta: Vec<Vec<String>>,
}

impl DefiningDocument {
    pub fn from_data(dd: &DefiningData) -> Self {
        let modulus = dd.context().modulus();
        let mut hex = String::new();
        for (i, w) in modulus.words().iter().rev().enumerate() {
            if i == 0 {
                hex.push_str(&format!("{w:x}"));
            } else {
                hex.push_str(&format!("{w:016x}"));
            }
        }
        DefiningDocument {
            schema: DD_SCHEMA.to_string(),
            p: dd.params().p(),
            r: dd.params().r_frak(),
            period: dd.params().period(),
            lambda: dd.lambda(),
            t0: dd.t0(),
            degree: dd.context().degree(),
            modulus: hex,
            beta: dd.beta().to_hex(),
            g: dd.root().g,
            unit_term_parity: dd.unit_term_parity(),
            eta: dd.eta_table().iter().map(|row| row.iter().map(|e| e.to_hex()).collect()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: DefiningDocument = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.schema != DD_SCHEMA {
            return Err(Error::Parse(format!("unsupported schema {:?}", doc.schema)));
        }
        Ok(doc)
    }
}
