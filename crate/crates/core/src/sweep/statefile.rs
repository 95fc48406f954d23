//! Plain-text statevector files:
//!
//! ```text
//! magicbench-state v1 n=<n>
//! <re> <im>     (2^n lines, basis order)
//! ```

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::state::StateVector;

const MAGIC_HEADER: &str = "magicbench-state v1";

pub fn write_state_file(path: &Path, psi: &StateVector) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "{MAGIC_HEADER} n={}", psi.n())?;
    for a in psi.amplitudes() {
        writeln!(w, "{} {}", a.re, a.im)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_state_file(path: &Path) -> Result<StateVector> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty state file".into()))??;
    let rest = header
        .strip_prefix(MAGIC_HEADER)
        .ok_or_else(|| Error::Parse(format!("bad header '{header}'")))?;
    let n: usize = rest
        .trim()
        .strip_prefix("n=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad qubit count in header '{header}'")))?;

    let dim = 1usize
        .checked_shl(n as u32)
        .filter(|_| (1..=16).contains(&n))
        .ok_or_else(|| Error::Parse(format!("unsupported qubit count {n}")))?;
    let mut amps = Vec::with_capacity(dim);
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let re: f64 = parts
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad amplitude on line {}", idx + 2)))?;
        let im: f64 = parts
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad amplitude on line {}", idx + 2)))?;
        if parts.next().is_some() {
            return Err(Error::Parse(format!("trailing tokens on line {}", idx + 2)));
        }
        amps.push(C64::new(re, im));
        if amps.len() > dim {
            return Err(Error::Parse(format!("more than 2^{n} amplitude lines")));
        }
    }
    if amps.len() != dim {
        return Err(Error::Parse(format!(
            "expected {dim} amplitudes, found {}",
            amps.len()
        )));
    }
    StateVector::from_amplitudes(n, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn round_trip_preserves_amplitudes_exactly() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let psi = StateVector::random(4, &mut rng);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.txt");
        write_state_file(&path, &psi).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("magicbench-state v1 n=4\n"));
        assert_eq!(text.lines().count(), 17);
        let back = read_state_file(&path).unwrap();
        // shortest-roundtrip float formatting makes this exact
        assert_eq!(psi, back);
    }

    #[test]
    fn malformed_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        std::fs::write(&path, "wrong header\n0 0\n").unwrap();
        assert!(matches!(read_state_file(&path), Err(Error::Parse(_))));
        std::fs::write(&path, "magicbench-state v1 n=2\n1 0\n0 0\n0 0\n").unwrap();
        assert!(matches!(read_state_file(&path), Err(Error::Parse(_))));
        std::fs::write(&path, "magicbench-state v1 n=1\n1 0 9\n0 0\n").unwrap();
        assert!(matches!(read_state_file(&path), Err(Error::Parse(_))));
    }
}
