//! Binary spectral snapshots.
//!
//! Layout (all little-endian):
//!
//! ```text
//! "ANSLAB1\n"                      8-byte magic
//! n: u32, N_1 … N_n: u32           dimension and grid sizes
//! t, ε, s, radius, θ: f64
//! n × Π N_i × (re: f64, im: f64)   coefficients, component by component
//! ```
//!
//! Coefficients are listed in row-major lattice order, each axis ascending
//! from `−N_i/2 + 1` to `N_i/2`. The box is `[0, 2π)ⁿ`.

use std::io::{Read, Write};

use num_complex::Complex;

use crate::spectral::{Grid, SpectralField, VectorField};
use crate::{Error, Result, Scalar};

pub const MAGIC: &[u8; 8] = b"ANSLAB1\n";

/// State of a run at one time, as stored on disk.
#[derive(Clone, Debug)]
pub struct Snapshot<T: Scalar> {
    pub t: T,
    pub eps: T,
    pub s: T,
    pub radius: T,
    pub theta: T,
    pub v: VectorField<T>,
}

/// Flat indices in row-major lattice order (each axis `−N/2+1 … N/2`).
fn lattice_order<T: Scalar>(grid: &Grid<T>) -> Vec<usize> {
    let sizes = grid.sizes();
    let n = sizes.len();
    let mut out = Vec::with_capacity(grid.len());
    let mut idx = vec![0usize; n];
    let mut lattice = vec![0i64; n];
    for _ in 0..grid.len() {
        for a in 0..n {
            lattice[a] = idx[a] as i64 - sizes[a] as i64 / 2 + 1;
        }
        out.push(grid.flat_of(&lattice));
        crate::spectral::odometer(&mut idx, sizes);
    }
    out
}

impl<T: Scalar> Snapshot<T> {
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        let grid = self.v.grid();
        let sizes = grid.sizes();
        let two_pi = std::f64::consts::TAU;
        if grid.lengths().iter().any(|l| (l.to_f64_lossy() - two_pi).abs() > 1e-12) {
            return Err(Error::Snapshot("only 2π-periodic boxes can be stored".into()));
        }
        let mut bytes = Vec::with_capacity(64 + 16 * grid.len() * grid.dim());
        bytes.extend_from_slice(MAGIC);
        bytes.extend_from_slice(&(sizes.len() as u32).to_le_bytes());
        for &n in sizes {
            bytes.extend_from_slice(&(n as u32).to_le_bytes());
        }
        for x in [self.t, self.eps, self.s, self.radius, self.theta] {
            bytes.extend_from_slice(&x.to_f64_lossy().to_le_bytes());
        }
        let order = lattice_order(grid);
        for comp in self.v.components() {
            let c = comp.coeffs();
            for &f in &order {
                bytes.extend_from_slice(&c[f].re.to_f64_lossy().to_le_bytes());
                bytes.extend_from_slice(&c[f].im.to_f64_lossy().to_le_bytes());
            }
        }
        w.write_all(&bytes)?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cur = Cursor { bytes, pos: 0 };
        if cur.take(8)? != MAGIC {
            return Err(Error::Snapshot("bad magic".into()));
        }
        let n = cur.u32()? as usize;
        if !(2..=8).contains(&n) {
            return Err(Error::Snapshot(format!("implausible dimension {n}")));
        }
        let sizes = (0..n).map(|_| cur.u32().map(|x| x as usize)).collect::<Result<Vec<_>>>()?;
        let grid = Grid::new(&sizes).map_err(|e| Error::Snapshot(e.to_string()))?;
        let header: Vec<T> = (0..5).map(|_| cur.f64().map(T::c)).collect::<Result<_>>()?;
        let expected = 16 * n * grid.len();
        if cur.remaining() != expected {
            return Err(Error::Snapshot(format!(
                "payload is {} bytes, expected {expected}",
                cur.remaining()
            )));
        }
        let order = lattice_order(&grid);
        let mut comps = Vec::with_capacity(n);
        for _ in 0..n {
            let mut coeffs = vec![Complex::<T>::default(); grid.len()];
            for &f in &order {
                let re = cur.f64()?;
                let im = cur.f64()?;
                coeffs[f] = Complex::new(T::c(re), T::c(im));
            }
            comps.push(SpectralField::from_coeffs(&grid, coeffs)?);
        }
        Ok(Self {
            t: header[0],
            eps: header[1],
            s: header[2],
            radius: header[3],
            theta: header[4],
            v: VectorField::new(comps)?,
        })
    }

    pub fn write_file(&self, path: &std::path::Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut f)?;
        f.flush()?;
        Ok(())
    }

    pub fn read_file(path: &std::path::Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        Self::from_bytes(&bytes)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::Snapshot("truncated file".into()));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_solenoidal, rng};

    #[test]
    fn round_trip_is_bit_exact() {
        let g = Grid::<f64>::new(&[8, 8, 16]).unwrap();
        let snap = Snapshot {
            t: 0.25,
            eps: 0.5,
            s: 1.5,
            radius: 0.9,
            theta: 0.005,
            v: random_solenoidal(&g, &mut rng(3)),
        };
        let mut bytes = vec![];
        snap.write_to(&mut bytes).unwrap();
        assert_eq!(&bytes[..8], MAGIC);
        assert_eq!(bytes.len(), 8 + 4 * 4 + 5 * 8 + 3 * 8 * 8 * 16 * 16);
        let back = Snapshot::<f64>::from_bytes(&bytes).unwrap();
        assert_eq!(back.t, 0.25);
        assert_eq!(back.theta, 0.005);
        for (a, b) in back.v.components().iter().zip(snap.v.components()) {
            assert_eq!(a.coeffs(), b.coeffs());
        }
    }

    #[test]
    fn first_coefficient_is_most_negative_lattice_point() {
        let g = Grid::<f64>::new(&[8, 8, 8]).unwrap();
        let mut f = SpectralField::zeros(&g);
        f.set_mode(&[-3, -3, -3], Complex::new(2.0, 1.0));
        let z = SpectralField::zeros(&g);
        let snap = Snapshot {
            t: 0.0,
            eps: 1.0,
            s: 1.5,
            radius: 1.0,
            theta: 0.0,
            v: VectorField::new(vec![f, z.clone(), z]).unwrap(),
        };
        let mut bytes = vec![];
        snap.write_to(&mut bytes).unwrap();
        let payload = 8 + 4 * 4 + 40;
        let re = f64::from_le_bytes(bytes[payload..payload + 8].try_into().unwrap());
        let im = f64::from_le_bytes(bytes[payload + 8..payload + 16].try_into().unwrap());
        assert_eq!((re, im), (2.0, 1.0));
    }

    #[test]
    fn rejects_truncation_and_bad_magic() {
        let g = Grid::<f64>::new(&[8, 8, 8]).unwrap();
        let snap = Snapshot {
            t: 0.0,
            eps: 1.0,
            s: 1.5,
            radius: 1.0,
            theta: 0.0,
            v: VectorField::zeros(&g),
        };
        let mut bytes = vec![];
        snap.write_to(&mut bytes).unwrap();
        assert!(Snapshot::<f64>::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(Snapshot::<f64>::from_bytes(&bad).is_err());
    }
}
