//! Classical sample-path channel.
//!
//! A stream is a finite array of complex samples `f_k = f(T^k omega)` over
//! the box `[0, n]`, the commutative counterpart of an operator orbit. The
//! averages
//!
//! ```text
//! (1/|n+1|) sum_{0<=k<=n} a(k) f_k
//! ```
//!
//! come in weighted, twisted, and all-roots-of-unity grid form; the grid
//! variant folds the samples modulo the grid and applies one d-dimensional
//! discrete Fourier transform, so a full 64^d sup costs little more than one
//! pass over the data.
//!
//! On disk a stream is a single JSON header line `{"d": …, "box": […]}`
//! followed by the samples in row-major order, each as two little-endian
//! binary64 values (real part then imaginary part).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::root_of_unity_sums;
use crate::lattice::{for_each_box, MultiIndex};
use crate::sum::KahanC64;
use crate::torus::TorusPoint;
use crate::weights::WeightSequence;

/// Complex samples on the box `[0, n]`, stored row-major.
#[derive(Debug, Clone)]
pub struct SampleStream {
    n: MultiIndex,
    values: ArrayD<Complex64>,
}

impl SampleStream {
    pub fn new(n: MultiIndex, values: ArrayD<Complex64>) -> Result<Self> {
        if n.dim() == 0 {
            return Err(Error::invalid("stream box must have dimension >= 1"));
        }
        if !n.is_nonnegative() {
            return Err(Error::invalid("stream box corner must be >= 0"));
        }
        let want: Vec<usize> = n.0.iter().map(|&v| v as usize + 1).collect();
        if values.shape() != want.as_slice() {
            return Err(Error::invalid(format!(
                "stream shape {:?} does not match box {:?}",
                values.shape(),
                want
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::invalid("stream samples must be finite"));
        }
        Ok(Self { n, values })
    }

    pub fn from_fn(n: &MultiIndex, mut f: impl FnMut(&[i64]) -> Complex64) -> Result<Self> {
        let shape: Vec<usize> = n.0.iter().map(|&v| v as usize + 1).collect();
        let mut vals = Vec::with_capacity(n.box_volume() as usize);
        for_each_box(&vec![0; n.dim()], &n.0, |k| vals.push(f(k)));
        let values = ArrayD::from_shape_vec(IxDyn(&shape), vals)
            .map_err(|e| Error::invalid(e.to_string()))?;
        Self::new(n.clone(), values)
    }

    pub fn dim(&self) -> usize {
        self.n.dim()
    }

    /// Inclusive upper corner of the sample box.
    pub fn n(&self) -> &MultiIndex {
        &self.n
    }

    pub fn values(&self) -> &ArrayD<Complex64> {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Serialize, Deserialize)]
struct StreamHeader {
    d: usize,
    #[serde(rename = "box")]
    corner: Vec<i64>,
}

/// Write header line plus raw little-endian binary64 pairs.
pub fn write_stream(path: &Path, stream: &SampleStream) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let header = StreamHeader {
        d: stream.dim(),
        corner: stream.n().0.clone(),
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for v in stream.values() {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_stream(path: &Path) -> Result<SampleStream> {
    let mut r = BufReader::new(File::open(path)?);
    let mut header_bytes = Vec::new();
    loop {
        let mut byte = [0u8; 1];
        r.read_exact(&mut byte)
            .map_err(|_| Error::invalid("stream header line missing newline"))?;
        if byte[0] == b'\n' {
            break;
        }
        header_bytes.push(byte[0]);
        if header_bytes.len() > 1 << 16 {
            return Err(Error::invalid("stream header line too long"));
        }
    }
    let header: StreamHeader = serde_json::from_slice(&header_bytes)?;
    if header.d != header.corner.len() {
        return Err(Error::invalid(format!(
            "header d = {} but box has {} entries",
            header.d,
            header.corner.len()
        )));
    }
    let n = MultiIndex(header.corner);
    if !n.is_nonnegative() {
        return Err(Error::invalid("stream box corner must be >= 0"));
    }
    let count = n.box_volume() as usize;
    let mut payload = Vec::with_capacity(count * 16);
    r.read_to_end(&mut payload)?;
    if payload.len() != count * 16 {
        return Err(Error::invalid(format!(
            "stream payload is {} bytes, expected {} for box {:?}",
            payload.len(),
            count * 16,
            n.0
        )));
    }
    let mut vals = Vec::with_capacity(count);
    for chunk in payload.chunks_exact(16) {
        let re = f64::from_le_bytes(chunk[..8].try_into().unwrap());
        let im = f64::from_le_bytes(chunk[8..].try_into().unwrap());
        vals.push(Complex64::new(re, im));
    }
    let shape: Vec<usize> = n.0.iter().map(|&v| v as usize + 1).collect();
    let values = ArrayD::from_shape_vec(IxDyn(&shape), vals)
        .map_err(|e| Error::invalid(e.to_string()))?;
    SampleStream::new(n, values)
}

fn check_weight_cover(stream: &SampleStream, a: &WeightSequence) -> Result<()> {
    if a.dim() != stream.dim() {
        return Err(Error::DimensionMismatch {
            expected: stream.dim(),
            got: a.dim(),
        });
    }
    let lo = a.lo();
    let hi = a.hi();
    if !lo.le(&MultiIndex(vec![0; stream.dim()])) || !stream.n().le(&hi) {
        return Err(Error::BoxExceeded(format!(
            "weights stored on [{:?}, {:?}] do not cover the stream box [0, {:?}]",
            lo.0,
            hi.0,
            stream.n().0
        )));
    }
    Ok(())
}

/// `(1/|n+1|) sum a(k) f_k` with compensated accumulation.
pub fn classical_sample_average(stream: &SampleStream, a: &WeightSequence) -> Result<Complex64> {
    check_weight_cover(stream, a)?;
    let mut acc = KahanC64::default();
    let mut iter = stream.values().iter();
    for_each_box(&vec![0; stream.dim()], &stream.n().0, |k| {
        acc.add(a.eval(k) * iter.next().expect("row-major walk matches storage"));
    });
    Ok(acc.value() / stream.n().box_volume())
}

/// Twist by `a(k) = lambda^k` without materializing the weight table.
pub fn classical_twisted_average(stream: &SampleStream, lambda: &TorusPoint) -> Result<Complex64> {
    if lambda.dim() != stream.dim() {
        return Err(Error::DimensionMismatch {
            expected: stream.dim(),
            got: lambda.dim(),
        });
    }
    let mut acc = KahanC64::default();
    let mut iter = stream.values().iter();
    let mut buf = MultiIndex(vec![0; stream.dim()]);
    for_each_box(&vec![0; stream.dim()], &stream.n().0, |k| {
        buf.0.copy_from_slice(k);
        acc.add(lambda.pow(&buf) * iter.next().expect("row-major walk matches storage"));
    });
    Ok(acc.value() / stream.n().box_volume())
}

/// All root-of-unity twists at once: entry `q` of the result is the twisted
/// average at `lambda_j = exp(2 pi i q_j / grid[j])`.
pub fn classical_twisted_grid(
    stream: &SampleStream,
    grid: &[usize],
) -> Result<ArrayD<Complex64>> {
    if grid.len() != stream.dim() {
        return Err(Error::DimensionMismatch {
            expected: stream.dim(),
            got: grid.len(),
        });
    }
    if grid.iter().any(|&g| g == 0) {
        return Err(Error::invalid("grid resolution must be >= 1 per axis"));
    }
    let mut folded = ArrayD::from_elem(IxDyn(grid), Complex64::new(0.0, 0.0));
    {
        let flat = folded.as_slice_mut().expect("freshly allocated layout");
        let mut iter = stream.values().iter();
        for_each_box(&vec![0; stream.dim()], &stream.n().0, |k| {
            let mut idx = 0usize;
            for (j, &kj) in k.iter().enumerate() {
                idx = idx * grid[j] + (kj.rem_euclid(grid[j] as i64)) as usize;
            }
            flat[idx] += iter.next().expect("row-major walk matches storage");
        });
    }
    let mut sums = root_of_unity_sums(&folded);
    let norm = 1.0 / stream.n().box_volume();
    sums.mapv_inplace(|v| v * norm);
    Ok(sums)
}

/// Largest magnitude over a twisted grid, the classical uniform sup.
pub fn grid_sup(grid_values: &ArrayD<Complex64>) -> f64 {
    grid_values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_stream_averages_to_the_constant() {
        let n = MultiIndex(vec![4, 6]);
        let stream = SampleStream::from_fn(&n, |_| c(2.5, -1.0)).unwrap();
        let ones = WeightSequence::constant(&n, c(1.0, 0.0)).unwrap();
        let avg = classical_sample_average(&stream, &ones).unwrap();
        assert!((avg - c(2.5, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn conjugate_twist_cancels_rotation_stream() {
        let z0 = TorusPoint::new(vec![0.3]).unwrap();
        let n = MultiIndex(vec![199]);
        let mut buf = MultiIndex(vec![0]);
        let stream = SampleStream::from_fn(&n, |k| {
            buf.0.copy_from_slice(k);
            z0.pow(&buf)
        })
        .unwrap();
        let avg = classical_twisted_average(&stream, &z0.conj()).unwrap();
        assert!((avg - c(1.0, 0.0)).norm() < 1e-11);
    }

    #[test]
    fn grid_picks_out_a_pure_root_of_unity() {
        // f_k = e^{2 pi i 3k/8} on n = 63: cell q = 5 gives exactly 1, the
        // rest cancel because 8 divides 64.
        let n = MultiIndex(vec![63]);
        let z = TorusPoint::new(vec![3.0 / 8.0]).unwrap();
        let mut buf = MultiIndex(vec![0]);
        let stream = SampleStream::from_fn(&n, |k| {
            buf.0.copy_from_slice(k);
            z.pow(&buf)
        })
        .unwrap();
        let grid = classical_twisted_grid(&stream, &[8]).unwrap();
        for q in 0..8 {
            let want = if q == 5 { 1.0 } else { 0.0 };
            assert!(
                (grid[[q]] - c(want, 0.0)).norm() < 1e-12,
                "cell {q}: {}",
                grid[[q]]
            );
        }
    }

    #[test]
    fn grid_agrees_with_per_point_twists() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let n = MultiIndex(vec![7, 5]);
        let stream = SampleStream::from_fn(&n, |_| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
        .unwrap();
        let grid = classical_twisted_grid(&stream, &[4, 3]).unwrap();
        for q1 in 0..4usize {
            for q2 in 0..3usize {
                let lambda =
                    TorusPoint::new(vec![q1 as f64 / 4.0, q2 as f64 / 3.0]).unwrap();
                let naive = classical_twisted_average(&stream, &lambda).unwrap();
                assert!(
                    (grid[[q1, q2]] - naive).norm() < 1e-10,
                    "cell ({q1},{q2})"
                );
            }
        }
    }

    #[test]
    fn iid_signs_have_small_uniform_sup() {
        // Sub-Gaussian prediction sqrt(2 ln 256 / 65536) is about 0.013.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = MultiIndex(vec![65535]);
        let stream = SampleStream::from_fn(&n, |_| {
            c(if rng.gen::<bool>() { 1.0 } else { -1.0 }, 0.0)
        })
        .unwrap();
        let grid = classical_twisted_grid(&stream, &[256]).unwrap();
        let sup = grid_sup(&grid);
        assert!(sup < 0.02, "sup {sup}");
    }

    #[test]
    fn zero_stream_gives_zero_everywhere() {
        let n = MultiIndex(vec![9, 9]);
        let stream = SampleStream::from_fn(&n, |_| c(0.0, 0.0)).unwrap();
        let grid = classical_twisted_grid(&stream, &[8, 8]).unwrap();
        assert_eq!(grid_sup(&grid), 0.0);
    }

    #[test]
    fn shape_mismatches_are_rejected() {
        let n = MultiIndex(vec![7]);
        let stream = SampleStream::from_fn(&n, |_| c(1.0, 0.0)).unwrap();
        // Wrong dimension.
        let a2 = WeightSequence::constant(&MultiIndex(vec![7, 7]), c(1.0, 0.0)).unwrap();
        assert!(classical_sample_average(&stream, &a2).is_err());
        // Too-short weight table does not cover the stream box.
        let short = WeightSequence::constant(&MultiIndex(vec![3]), c(1.0, 0.0)).unwrap();
        assert!(classical_sample_average(&stream, &short).is_err());
        assert!(classical_twisted_average(&stream, &TorusPoint::new(vec![0.1, 0.2]).unwrap())
            .is_err());
        assert!(classical_twisted_grid(&stream, &[4, 4]).is_err());
        assert!(classical_twisted_grid(&stream, &[0]).is_err());
        // Bad construction: shape/box mismatch.
        let vals = ArrayD::from_elem(IxDyn(&[3]), c(0.0, 0.0));
        assert!(SampleStream::new(MultiIndex(vec![7]), vals).is_err());
    }

    #[test]
    fn stream_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stream.bin");
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let n = MultiIndex(vec![5, 3]);
        let stream = SampleStream::from_fn(&n, |_| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
        .unwrap();
        write_stream(&path, &stream).unwrap();
        let back = read_stream(&path).unwrap();
        assert_eq!(back.n().0, stream.n().0);
        for (a, b) in back.values().iter().zip(stream.values().iter()) {
            assert_eq!(a, b, "payload must round-trip bit for bit");
        }
    }

    #[test]
    fn truncated_or_malformed_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.bin");
        std::fs::write(&path, b"{\"d\":1,\"box\":[3]}\n\x00\x00").unwrap();
        assert!(read_stream(&path).is_err());
        std::fs::write(&path, b"not json\n").unwrap();
        assert!(read_stream(&path).is_err());
        std::fs::write(&path, b"{\"d\":2,\"box\":[3]}\n").unwrap();
        assert!(read_stream(&path).is_err());
    }
}
