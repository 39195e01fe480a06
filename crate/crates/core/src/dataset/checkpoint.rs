//! Versioned binary checkpoint format.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic   8 bytes  "DAVGAECK"
//! version u32      currently 1
//! seed    u64      RNG seed the run was trained with
//! config  u32 len + UTF-8 bytes   flat key=value echo of the train config
//! kind    u8       0 = GCN, 1 = GAT
//! diag    u8       1 when the relation matrix is diagonal-only
//! grl     f64      gradient-reversal coefficient
//! [GAT]   slope f64, then the three attention vectors (u32 len + f64s)
//! w0, w_mu, w_logvar, r, w1: u32 rows + u32 cols + row-major f64s
//! b1, w2: u32 len + f64s
//! b2: f64
//! ```
//!
//! Floats round-trip through `to_le_bytes`/`from_le_bytes`, so save followed
//! by load reproduces every parameter bit for bit.

use std::path::Path;

use crate::model::{
    DiscriminatorParams, DistMultParams, EncoderKind, EncoderParams, GatParams, ModelParams,
};
use crate::numeric::DenseMatrix;

use super::{DataError, Result};

const MAGIC: &[u8; 8] = b"DAVGAECK";
/// Current checkpoint format version.
pub const CHECKPOINT_VERSION: u32 = 1;

/// A persisted model snapshot.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub version: u32,
    pub params: ModelParams,
    /// Flat key=value echo of the configuration that produced the params.
    pub config_echo: String,
    pub seed: u64,
}

fn codec_err(path: &Path, message: impl Into<String>) -> DataError {
    DataError::Checkpoint {
        path: path.display().to_string(),
        message: message.into(),
    }
}

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn new() -> Self {
        Self { buf: Vec::new() }
    }

    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn bytes(&mut self, v: &[u8]) {
        self.buf.extend_from_slice(v);
    }

    fn floats(&mut self, v: &[f64]) {
        self.u32(v.len() as u32);
        for &x in v {
            self.f64(x);
        }
    }

    fn matrix(&mut self, m: &DenseMatrix) {
        self.u32(m.rows() as u32);
        self.u32(m.cols() as u32);
        for &x in m.values() {
            self.f64(x);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(codec_err(self.path, "truncated file"));
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn floats(&mut self) -> Result<Vec<f64>> {
        let len = self.u32()? as usize;
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push(self.f64()?);
        }
        Ok(out)
    }

    fn matrix(&mut self) -> Result<DenseMatrix> {
        let rows = self.u32()? as usize;
        let cols = self.u32()? as usize;
        let mut values = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            values.push(self.f64()?);
        }
        DenseMatrix::from_vec(rows, cols, values)
            .map_err(|e| codec_err(self.path, format!("bad matrix payload: {e}")))
    }
}

/// Serialize a checkpoint to `path`.
pub fn save_checkpoint(
    params: &ModelParams,
    config_echo: &str,
    seed: u64,
    path: &Path,
) -> Result<()> {
    let mut w = Writer::new();
    w.bytes(MAGIC);
    w.u32(CHECKPOINT_VERSION);
    w.u64(seed);
    w.u32(config_echo.len() as u32);
    w.bytes(config_echo.as_bytes());
    w.bytes(&[match params.encoder.kind {
        EncoderKind::Gcn => 0u8,
        EncoderKind::Gat => 1u8,
    }]);
    w.bytes(&[params.distmult.diagonal as u8]);
    w.f64(params.discriminator.grl_lambda);
    if let Some(gat) = &params.encoder.gat {
        w.f64(gat.leaky_slope);
        w.floats(&gat.attn_hidden);
        w.floats(&gat.attn_mu);
        w.floats(&gat.attn_logvar);
    }
    w.matrix(&params.encoder.w0);
    w.matrix(&params.encoder.w_mu);
    w.matrix(&params.encoder.w_logvar);
    w.matrix(&params.distmult.r);
    w.matrix(&params.discriminator.w1);
    w.floats(&params.discriminator.b1);
    w.floats(&params.discriminator.w2);
    w.f64(params.discriminator.b2);
    std::fs::write(path, &w.buf).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Deserialize a checkpoint from `path`.
pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let buf = std::fs::read(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut r = Reader {
        buf: &buf,
        pos: 0,
        path,
    };
    let magic = r.take(8)?;
    if magic != MAGIC {
        return Err(codec_err(path, "wrong magic bytes; not a checkpoint file"));
    }
    let version = r.u32()?;
    if version != CHECKPOINT_VERSION {
        return Err(codec_err(
            path,
            format!("format version {version} unsupported (expected {CHECKPOINT_VERSION})"),
        ));
    }
    let seed = r.u64()?;
    let config_len = r.u32()? as usize;
    let config_echo = String::from_utf8(r.take(config_len)?.to_vec())
        .map_err(|_| codec_err(path, "config echo is not valid UTF-8"))?;
    let kind = match r.u8()? {
        0 => EncoderKind::Gcn,
        1 => EncoderKind::Gat,
        other => return Err(codec_err(path, format!("unknown encoder kind tag {other}"))),
    };
    let diagonal = match r.u8()? {
        0 => false,
        1 => true,
        other => return Err(codec_err(path, format!("bad diagonal flag {other}"))),
    };
    let grl_lambda = r.f64()?;
    let gat = if kind == EncoderKind::Gat {
        Some(GatParams {
            leaky_slope: r.f64()?,
            attn_hidden: r.floats()?,
            attn_mu: r.floats()?,
            attn_logvar: r.floats()?,
        })
    } else {
        None
    };
    let w0 = r.matrix()?;
    let w_mu = r.matrix()?;
    let w_logvar = r.matrix()?;
    let rel = r.matrix()?;
    let w1 = r.matrix()?;
    let b1 = r.floats()?;
    let w2 = r.floats()?;
    let b2 = r.f64()?;
    if r.pos != buf.len() {
        return Err(codec_err(path, "trailing bytes after checkpoint payload"));
    }
    Ok(Checkpoint {
        version,
        params: ModelParams {
            encoder: EncoderParams {
                kind,
                w0,
                w_mu,
                w_logvar,
                gat,
            },
            distmult: DistMultParams { r: rel, diagonal },
            discriminator: DiscriminatorParams {
                w1,
                b1,
                w2,
                b2,
                grl_lambda,
            },
        },
        config_echo,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Dims;
    use crate::numeric::RngState;

    fn sample_params(kind: EncoderKind) -> ModelParams {
        let mut rng = RngState::new(31);
        ModelParams::init(Dims::new(5, 4, 3, 4), kind, false, 1.0, &mut rng)
    }

    #[test]
    fn round_trip_is_bit_exact() {
        for kind in [EncoderKind::Gcn, EncoderKind::Gat] {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("model.ckpt");
            let params = sample_params(kind);
            save_checkpoint(&params, "epochs=200\nlr=0.01", 7, &path).unwrap();
            let loaded = load_checkpoint(&path).unwrap();
            assert_eq!(loaded.seed, 7);
            assert_eq!(loaded.config_echo, "epochs=200\nlr=0.01");
            // Bitwise equality of every parameter.
            let a = params.flatten();
            let b = loaded.params.flatten();
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn resave_without_training_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let first = dir.path().join("a.ckpt");
        let second = dir.path().join("b.ckpt");
        let params = sample_params(EncoderKind::Gcn);
        save_checkpoint(&params, "epochs=0", 3, &first).unwrap();
        let loaded = load_checkpoint(&first).unwrap();
        save_checkpoint(&loaded.params, &loaded.config_echo, loaded.seed, &second).unwrap();
        assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
    }

    #[test]
    fn wrong_magic_is_a_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bogus.ckpt");
        std::fs::write(&path, b"NOTMAGIC rest of file").unwrap();
        let err = load_checkpoint(&path).unwrap_err();
        assert!(err.to_string().contains("magic"), "{err}");
    }

    #[test]
    fn truncated_file_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        let params = sample_params(EncoderKind::Gcn);
        save_checkpoint(&params, "", 1, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
        let err = load_checkpoint(&path).unwrap_err();
        assert!(err.to_string().contains("truncated"), "{err}");
    }

    #[test]
    fn version_mismatch_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        let params = sample_params(EncoderKind::Gcn);
        save_checkpoint(&params, "", 1, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[8] = 99; // bump the version field
        std::fs::write(&path, &bytes).unwrap();
        let err = load_checkpoint(&path).unwrap_err();
        assert!(err.to_string().contains("version"), "{err}");
    }
}
