//! Weight files: a JSON manifest plus a sidecar blob of little-endian `f32`.
//!
//! ```json
//! {"format_version":1,
//!  "layers":[{"name":"fc1","kind":"dense","shape":[32,64],"offset":0,"length":2048}],
//!  "dtype":"f32le",
//!  "checksum":"crc32c:1a2b3c4d"}
//! ```
//!
//! Offsets and lengths count elements, not bytes. The checksum covers the
//! whole blob. The blob sits next to the manifest with the same file stem
//! and a `.bin` extension.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;
pub const DTYPE: &str = "f32le";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorEntry {
    pub name: String,
    pub kind: String,
    pub shape: Vec<usize>,
    pub offset: usize,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub layers: Vec<TensorEntry>,
    pub dtype: String,
    pub checksum: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub name: String,
    pub kind: String,
    pub shape: Vec<usize>,
    pub data: Vec<f32>,
}

impl Tensor {
    pub fn new(name: impl Into<String>, kind: impl Into<String>, shape: Vec<usize>, data: Vec<f32>) -> Result<Self> {
        let name = name.into();
        let expected: usize = shape.iter().product();
        if expected != data.len() {
            return Err(Error::TensorShape {
                name,
                detail: format!("shape {shape:?} holds {expected} values, got {}", data.len()),
            });
        }
        Ok(Tensor {
            name,
            kind: kind.into(),
            shape,
            data,
        })
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(|&x| f64::from(x)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeightsBundle {
    pub tensors: Vec<Tensor>,
}

impl WeightsBundle {
    pub fn get(&self, name: &str) -> Result<&Tensor> {
        self.tensors
            .iter()
            .find(|t| t.name == name)
            .ok_or_else(|| Error::MissingTensor(name.to_string()))
    }

    /// Fetches a tensor and checks its shape.
    pub fn expect(&self, name: &str, shape: &[usize]) -> Result<&Tensor> {
        let t = self.get(name)?;
        if t.shape != shape {
            return Err(Error::TensorShape {
                name: name.to_string(),
                detail: format!("expected shape {shape:?}, bundle has {:?}", t.shape),
            });
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }
}

pub fn blob_path(manifest_path: &Path) -> PathBuf {
    manifest_path.with_extension("bin")
}

pub fn checksum_string(blob: &[u8]) -> String {
    format!("crc32c:{:08x}", crc32c::crc32c(blob))
}

/// Encodes a bundle as a manifest and blob bytes, tensors packed in order.
pub fn encode_bundle(bundle: &WeightsBundle) -> (Manifest, Vec<u8>) {
    let mut blob = Vec::new();
    let mut layers = Vec::with_capacity(bundle.tensors.len());
    let mut offset = 0;
    for t in &bundle.tensors {
        layers.push(TensorEntry {
            name: t.name.clone(),
            kind: t.kind.clone(),
            shape: t.shape.clone(),
            offset,
            length: t.data.len(),
        });
        offset += t.data.len();
        for x in &t.data {
            blob.extend_from_slice(&x.to_le_bytes());
        }
    }
    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        layers,
        dtype: DTYPE.to_string(),
        checksum: checksum_string(&blob),
    };
    (manifest, blob)
}

/// Validates a manifest against its blob and materialises the tensors.
///
/// Shapes are checked before the checksum, so a truncated blob reports the
/// offending tensor rather than a hash mismatch.
pub fn decode_bundle(manifest: &Manifest, blob: &[u8]) -> Result<WeightsBundle> {
    let bad = |detail: String| Error::Format {
        what: "weights manifest",
        detail,
    };
    if manifest.format_version != FORMAT_VERSION {
        return Err(bad(format!(
            "unsupported format_version {}",
            manifest.format_version
        )));
    }
    if manifest.dtype != DTYPE {
        return Err(bad(format!("unsupported dtype `{}`", manifest.dtype)));
    }
    if !blob.len().is_multiple_of(4) {
        return Err(bad(format!("blob length {} is not a multiple of 4", blob.len())));
    }
    let n_values = blob.len() / 4;
    for e in &manifest.layers {
        let declared: usize = e.shape.iter().product();
        if declared != e.length {
            return Err(Error::TensorShape {
                name: e.name.clone(),
                detail: format!("shape {:?} holds {declared} values but length is {}", e.shape, e.length),
            });
        }
        if e.offset + e.length > n_values {
            return Err(Error::TensorShape {
                name: e.name.clone(),
                detail: format!(
                    "needs values {}..{} but the blob holds {n_values}",
                    e.offset,
                    e.offset + e.length
                ),
            });
        }
    }
    let actual = checksum_string(blob);
    if !actual.eq_ignore_ascii_case(&manifest.checksum) {
        return Err(Error::Checksum {
            expected: manifest.checksum.clone(),
            actual,
        });
    }
    let tensors = manifest
        .layers
        .iter()
        .map(|e| {
            let bytes = &blob[e.offset * 4..(e.offset + e.length) * 4];
            let data = bytes
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect();
            Tensor::new(e.name.clone(), e.kind.clone(), e.shape.clone(), data)
        })
        .collect::<Result<_>>()?;
    Ok(WeightsBundle { tensors })
}

pub fn load_weights(manifest_path: impl AsRef<Path>) -> Result<WeightsBundle> {
    let manifest_path = manifest_path.as_ref();
    let text = fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    let blob_path = blob_path(manifest_path);
    let blob = fs::read(&blob_path).map_err(|e| Error::io(&blob_path, e))?;
    decode_bundle(&manifest, &blob)
}

pub fn save_weights(manifest_path: impl AsRef<Path>, bundle: &WeightsBundle) -> Result<()> {
    let manifest_path = manifest_path.as_ref();
    let (manifest, blob) = encode_bundle(bundle);
    let blob_path = blob_path(manifest_path);
    fs::write(&blob_path, &blob).map_err(|e| Error::io(&blob_path, e))?;
    let text = serde_json::to_string_pretty(&manifest)?;
    fs::write(manifest_path, text + "\n").map_err(|e| Error::io(manifest_path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mlp_bundle() -> WeightsBundle {
        let t1 = Tensor::new("fc1", "dense", vec![3, 4], (0..12).map(|i| i as f32 * 0.25).collect()).unwrap();
        let t2 = Tensor::new("fc2", "dense", vec![2, 3], vec![-1.5, 0.0, 2.0, 1e-3, 7.0, -0.125]).unwrap();
        WeightsBundle { tensors: vec![t1, t2] }
    }

    #[test]
    fn round_trip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mlp.json");
        save_weights(&path, &mlp_bundle()).unwrap();
        assert!(dir.path().join("mlp.bin").exists());
        let loaded = load_weights(&path).unwrap();
        assert_eq!(loaded.len(), 2);
        assert_eq!(loaded, mlp_bundle());
    }

    #[test]
    fn manifest_field_layout() {
        let (m, blob) = encode_bundle(&mlp_bundle());
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.starts_with(r#"{"format_version":1,"layers":[{"name":"fc1","kind":"dense","shape":[3,4],"offset":0,"length":12}"#));
        assert!(json.contains(r#"{"name":"fc2","kind":"dense","shape":[2,3],"offset":12,"length":6}"#));
        assert!(json.contains(r#""dtype":"f32le","checksum":"crc32c:"#));
        assert_eq!(blob.len(), 18 * 4);
        // little-endian f32 of 0.25 at element 1
        assert_eq!(&blob[4..8], &0.25f32.to_le_bytes());
    }

    #[test]
    fn crc32c_known_vector() {
        // standard CRC-32C check value
        assert_eq!(checksum_string(b"123456789"), "crc32c:e3069283");
    }

    #[test]
    fn short_blob_is_a_shape_error() {
        let big = Tensor::new("fc1", "dense", vec![784, 600], vec![0.0; 784 * 600]).unwrap();
        let (mut manifest, _) = encode_bundle(&WeightsBundle { tensors: vec![big] });
        let small = Tensor::new("fc1", "dense", vec![784, 500], vec![0.0; 784 * 500]).unwrap();
        let (_, blob) = encode_bundle(&WeightsBundle { tensors: vec![small] });
        manifest.checksum = checksum_string(&blob);
        assert!(matches!(decode_bundle(&manifest, &blob), Err(Error::TensorShape { .. })));
    }

    #[test]
    fn length_disagreeing_with_shape_is_a_shape_error() {
        let (mut manifest, blob) = encode_bundle(&mlp_bundle());
        manifest.layers[1].shape = vec![3, 3];
        assert!(matches!(decode_bundle(&manifest, &blob), Err(Error::TensorShape { .. })));
    }

    #[test]
    fn bit_flip_is_a_checksum_error() {
        let (manifest, mut blob) = encode_bundle(&mlp_bundle());
        blob[13] ^= 0x04;
        assert!(matches!(decode_bundle(&manifest, &blob), Err(Error::Checksum { .. })));
    }

    #[test]
    fn missing_tensor_and_wrong_shape_lookup() {
        let b = mlp_bundle();
        assert!(matches!(b.get("fc3"), Err(Error::MissingTensor(_))));
        assert!(matches!(b.expect("fc1", &[4, 3]), Err(Error::TensorShape { .. })));
        assert!(b.expect("fc1", &[3, 4]).is_ok());
    }

    #[test]
    fn rejects_unknown_dtype_and_version() {
        let (mut m, blob) = encode_bundle(&mlp_bundle());
        m.dtype = "f16le".into();
        assert!(matches!(decode_bundle(&m, &blob), Err(Error::Format { .. })));
        let (mut m, blob) = encode_bundle(&mlp_bundle());
        m.format_version = 2;
        assert!(matches!(decode_bundle(&m, &blob), Err(Error::Format { .. })));
    }
}
