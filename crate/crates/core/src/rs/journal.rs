//! Append-only binary journal of the recursion state, so an interrupted run
//! resumes at its last checkpoint instead of order zero.
//!
//! Layout: a 24-byte header (`RSJ1`, M, dps, guard as u32, bits as u64),
//! then one record per order: `len: u64`, payload, FNV-1a checksum of the
//! payload. Numbers are stored as sign byte, binary exponent and magnitude
//! bytes, which is host independent. A torn or corrupt trailing record is
//! dropped and the file is truncated back to the last good record.

use std::fs::{File, OpenOptions};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigUint;

use super::RsError;
use crate::precision::{BigReal, PrecisionContext};

const MAGIC: &[u8; 4] = b"RSJ1";
const HEADER_LEN: usize = 24;

pub(crate) fn journal_path(dir: &Path, m: u32, dps: u32) -> PathBuf {
    dir.join(format!("state_M{m}_dps{dps}_v1.bin"))
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn header(m: u32, ctx: PrecisionContext) -> Vec<u8> {
    let mut h = Vec::with_capacity(HEADER_LEN);
    h.extend_from_slice(MAGIC);
    h.extend_from_slice(&m.to_le_bytes());
    h.extend_from_slice(&ctx.dps().to_le_bytes());
    h.extend_from_slice(&ctx.guard().to_le_bytes());
    h.extend_from_slice(&(ctx.bits() as u64).to_le_bytes());
    h
}

fn put_real(out: &mut Vec<u8>, x: &BigReal) {
    let (neg, mantissa, exp2) = x.to_binary_parts();
    let bytes = mantissa.to_bytes_le();
    out.push(neg as u8);
    out.extend_from_slice(&exp2.to_le_bytes());
    out.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
    out.extend_from_slice(&bytes);
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let s = self.buf.get(self.pos..self.pos + n)?;
        self.pos += n;
        Some(s)
    }

    fn u32(&mut self) -> Option<u32> {
        Some(u32::from_le_bytes(self.take(4)?.try_into().ok()?))
    }

    fn u64(&mut self) -> Option<u64> {
        Some(u64::from_le_bytes(self.take(8)?.try_into().ok()?))
    }

    fn real(&mut self, ctx: PrecisionContext) -> Option<BigReal> {
        let neg = self.take(1)?[0] != 0;
        let exp2 = self.u64()? as i64;
        let len = self.u32()? as usize;
        let mantissa = BigUint::from_bytes_le(self.take(len)?);
        Some(BigReal::from_binary_parts(neg, &mantissa, exp2, ctx))
    }
}

/// Restored `(a_1 … a_n, ψ^{(1)} … ψ^{(n)})`, or `None` when no journal exists.
#[allow(clippy::type_complexity)]
pub(crate) fn load(
    path: &Path,
    m: u32,
    ctx: PrecisionContext,
) -> Result<Option<(Vec<BigReal>, Vec<Vec<BigReal>>)>, RsError> {
    if !path.exists() {
        return Ok(None);
    }
    let mut buf = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut buf))
        .map_err(|e| RsError::io(path, e))?;
    if buf.len() < HEADER_LEN || buf[..HEADER_LEN] != header(m, ctx)[..] {
        return Err(RsError::Journal {
            path: path.to_path_buf(),
            reason: "header does not match this run's M and precision".into(),
        });
    }
    let mut energies = Vec::new();
    let mut states = Vec::new();
    let mut good = HEADER_LEN;
    let mut cur = Cursor {
        buf: &buf,
        pos: HEADER_LEN,
    };
    while let Some(len) = cur.u64() {
        let Some(payload) = cur.take(len as usize) else {
            break;
        };
        let Some(sum) = cur.u64() else { break };
        if fnv1a(payload) != sum {
            break;
        }
        let mut p = Cursor {
            buf: payload,
            pos: 0,
        };
        let parsed = (|| {
            let k = p.u64()? as usize;
            let a = p.real(ctx)?;
            let n = p.u64()? as usize;
            let comps = (0..n).map(|_| p.real(ctx)).collect::<Option<Vec<_>>>()?;
            Some((k, a, comps))
        })();
        let Some((k, a, comps)) = parsed else { break };
        if k != energies.len() + 1 {
            return Err(RsError::Journal {
                path: path.to_path_buf(),
                reason: format!("expected order {}, found {k}", energies.len() + 1),
            });
        }
        energies.push(a);
        states.push(comps);
        good = cur.pos;
    }
    if good < buf.len() {
        OpenOptions::new()
            .write(true)
            .open(path)
            .and_then(|f| f.set_len(good as u64))
            .map_err(|e| RsError::io(path, e))?;
    }
    Ok(Some((energies, states)))
}

/// Appends one record per state; `energies[i]` is the energy produced
/// alongside `states[i]`.
pub(crate) fn append(
    path: &Path,
    m: u32,
    ctx: PrecisionContext,
    energies: &[BigReal],
    states: &[super::WavefunctionState],
) -> Result<(), RsError> {
    let fresh = !path.exists();
    let mut out = Vec::new();
    if fresh {
        out.extend_from_slice(&header(m, ctx));
    }
    for (a, s) in energies.iter().zip(states) {
        let mut payload = Vec::new();
        payload.extend_from_slice(&(s.order() as u64).to_le_bytes());
        put_real(&mut payload, a);
        let comps = s.even_components();
        payload.extend_from_slice(&(comps.len() as u64).to_le_bytes());
        for c in comps {
            put_real(&mut payload, c);
        }
        out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
        out.extend_from_slice(&payload);
        out.extend_from_slice(&fnv1a(&payload).to_le_bytes());
    }
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| RsError::io(path, e))?;
    f.write_all(&out)
        .and_then(|_| f.sync_data())
        .map_err(|e| RsError::io(path, e))
}
