//! Binary winner-reaction files.
//!
//! Layout: magic `MCNNTTT\0`, version `u32` LE, record count `u64` LE, then
//! one record per pair: a length byte (18) followed by the 9 `before` and 9
//! `after` cells as signed bytes.

use std::io::{Read, Write};

use super::board::Board;
use super::games::ReactionPair;
use crate::{Error, Result};

pub const DATASET_MAGIC: &[u8; 8] = b"MCNNTTT\0";
pub const DATASET_VERSION: u32 = 1;
const RECORD_LEN: u8 = 18;

pub fn write_pairs<W: Write>(pairs: &[ReactionPair], mut out: W) -> Result<()> {
    out.write_all(DATASET_MAGIC)?;
    out.write_all(&DATASET_VERSION.to_le_bytes())?;
    out.write_all(&(pairs.len() as u64).to_le_bytes())?;
    let mut record = [0u8; 1 + RECORD_LEN as usize];
    record[0] = RECORD_LEN;
    for p in pairs {
        for (i, c) in p.before.cells().iter().chain(p.after.cells()).enumerate() {
            record[1 + i] = *c as u8;
        }
        out.write_all(&record)?;
    }
    Ok(())
}

pub fn read_pairs<R: Read>(mut input: R) -> Result<Vec<ReactionPair>> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let header = 8 + 4 + 8;
    if bytes.len() < header || &bytes[..8] != DATASET_MAGIC {
        return Err(Error::parse("not a tic-tac-toe dataset"));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != DATASET_VERSION {
        return Err(Error::parse(format!("unsupported dataset version {version}")));
    }
    let count = u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize;
    let mut pairs = Vec::with_capacity(count.min(1 << 20));
    let mut pos = header;
    for k in 0..count {
        let len = *bytes.get(pos).ok_or_else(|| Error::parse(format!("record {k} missing")))?;
        if len != RECORD_LEN {
            return Err(Error::parse(format!("record {k} has length {len}")));
        }
        let body = bytes
            .get(pos + 1..pos + 1 + len as usize)
            .ok_or_else(|| Error::parse(format!("record {k} truncated")))?;
        let cells = |s: &[u8]| -> Result<Board> {
            let mut c = [0i8; 9];
            for (o, b) in c.iter_mut().zip(s) {
                *o = *b as i8;
            }
            Board::new(c).map_err(|e| Error::parse(format!("record {k}: {e}")))
        };
        let pair = ReactionPair { before: cells(&body[..9])?, after: cells(&body[9..])? };
        let changed = (0..9).filter(|&i| pair.before.get(i) != pair.after.get(i)).count();
        if changed != 1 {
            return Err(Error::parse(format!("record {k} changes {changed} cells")));
        }
        pairs.push(pair);
        pos += 1 + len as usize;
    }
    if pos != bytes.len() {
        return Err(Error::parse("trailing bytes after the last record"));
    }
    Ok(pairs)
}
