//! Binary chain files.
//!
//! Layout, little-endian throughout:
//!
//! | offset | size | field |
//! |-------:|-----:|-------|
//! | 0 | 4 | magic `ESSC` |
//! | 4 | 4 | version (`u32`, currently 1) |
//! | 8 | 4 | number of chains (`u32`) |
//! | 12 | 8 | samples per chain (`u64`) |
//! | 20 | 8 each | `f64` samples, chain-major |

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use ess_core::ChainSet;

use crate::error::{io_err, HarnessError, Result};

pub const MAGIC: [u8; 4] = *b"ESSC";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: u64 = 20;

fn header(n_chains: u32, n_samples: u64) -> [u8; HEADER_LEN as usize] {
    let mut h = [0u8; HEADER_LEN as usize];
    h[..4].copy_from_slice(&MAGIC);
    h[4..8].copy_from_slice(&VERSION.to_le_bytes());
    h[8..12].copy_from_slice(&n_chains.to_le_bytes());
    h[12..20].copy_from_slice(&n_samples.to_le_bytes());
    h
}

/// Streaming writer for chains produced one at a time.
pub struct ChainWriter {
    out: BufWriter<File>,
    path: std::path::PathBuf,
    n_samples: u64,
    remaining: u32,
}

impl ChainWriter {
    pub fn create(path: &Path, n_chains: u32, n_samples: u64) -> Result<Self> {
        let file = File::create(path).map_err(io_err(path))?;
        let mut out = BufWriter::new(file);
        out.write_all(&header(n_chains, n_samples))
            .map_err(io_err(path))?;
        Ok(Self {
            out,
            path: path.to_path_buf(),
            n_samples,
            remaining: n_chains,
        })
    }

    pub fn push(&mut self, samples: &[f64]) -> Result<()> {
        if self.remaining == 0 || samples.len() as u64 != self.n_samples {
            return Err(HarnessError::Config(format!(
                "chain of length {} does not fit file declared as {} samples per chain",
                samples.len(),
                self.n_samples
            )));
        }
        for v in samples {
            self.out
                .write_all(&v.to_le_bytes())
                .map_err(io_err(&self.path))?;
        }
        self.remaining -= 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        if self.remaining != 0 {
            return Err(HarnessError::Config(format!(
                "{} declared chains were never written",
                self.remaining
            )));
        }
        self.out.flush().map_err(io_err(&self.path))
    }
}

pub fn write_chains(path: &Path, chains: &[Vec<f64>]) -> Result<()> {
    let n = chains.first().map_or(0, Vec::len) as u64;
    let mut w = ChainWriter::create(path, chains.len() as u32, n)?;
    for c in chains {
        w.push(c)?;
    }
    w.finish()
}

pub fn write_chain_set(path: &Path, set: &ChainSet) -> Result<()> {
    let chains: Vec<Vec<f64>> = set.chains().iter().map(|c| c.samples().to_vec()).collect();
    write_chains(path, &chains)
}

/// Parse a chain file image.
pub fn decode(bytes: &[u8]) -> Result<Vec<Vec<f64>>> {
    let len = bytes.len() as u64;
    if len < 4 {
        return Err(HarnessError::Truncated {
            expected: HEADER_LEN,
            found: len,
        });
    }
    let magic: [u8; 4] = bytes[..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(HarnessError::MagicMismatch { found: magic });
    }
    if len < HEADER_LEN {
        return Err(HarnessError::Truncated {
            expected: HEADER_LEN,
            found: len,
        });
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(HarnessError::VersionMismatch { found: version });
    }
    let n_chains = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as u64;
    let n_samples = u64::from_le_bytes(bytes[12..20].try_into().unwrap());
    let expected = n_chains
        .checked_mul(n_samples)
        .and_then(|v| v.checked_mul(8))
        .and_then(|v| v.checked_add(HEADER_LEN))
        .ok_or_else(|| HarnessError::Format {
            offset: 8,
            message: format!("{n_chains} x {n_samples} samples overflows"),
        })?;
    if len < expected {
        return Err(HarnessError::Truncated {
            expected,
            found: len,
        });
    }
    if len > expected {
        return Err(HarnessError::Format {
            offset: expected,
            message: format!("{} trailing bytes after the last sample", len - expected),
        });
    }
    let payload = &bytes[HEADER_LEN as usize..];
    let per_chain = n_samples as usize * 8;
    Ok((0..n_chains as usize)
        .map(|c| {
            payload[c * per_chain..(c + 1) * per_chain]
                .chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
                .collect()
        })
        .collect())
}

pub fn read_chains(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(io_err(path))?;
    decode(&bytes)
}

pub fn read_chain_set(path: &Path) -> Result<ChainSet> {
    Ok(ChainSet::from_vecs(read_chains(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn image(n_chains: u32, n_samples: u64, payload: usize) -> Vec<u8> {
        let mut v = header(n_chains, n_samples).to_vec();
        v.extend((0..payload).flat_map(|i| (i as f64).to_le_bytes()));
        v
    }

    #[test]
    fn decodes_valid_image() {
        let c = decode(&image(2, 3, 6)).unwrap();
        assert_eq!(c, vec![vec![0.0, 1.0, 2.0], vec![3.0, 4.0, 5.0]]);
    }

    #[test]
    fn distinct_errors() {
        let mut bad = image(2, 10, 20);
        bad[..4].copy_from_slice(b"XXXX");
        assert!(matches!(decode(&bad), Err(HarnessError::MagicMismatch { .. })));

        let mut v2 = image(2, 10, 20);
        v2[4] = 2;
        assert!(matches!(decode(&v2), Err(HarnessError::VersionMismatch { found: 2 })));

        assert!(matches!(
            decode(&image(2, 10, 19)),
            Err(HarnessError::Truncated { expected: 180, found: 172 })
        ));
        assert!(matches!(decode(&image(2, 10, 21)), Err(HarnessError::Format { offset: 180, .. })));
        assert!(matches!(decode(b"ES"), Err(HarnessError::Truncated { .. })));
    }
}
