//! Model checkpoints.
//!
//! Layout (little-endian): magic `SOCM`, `u32` header length, a JSON header
//! with the config and input dimensions, `u32` tensor count, then per tensor
//! `u32` rows, `u32` cols and the row-major `f64` values. Tensors follow
//! [`GcnParams::tensors`] order.

use std::fs;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::model::GcnModel;
use super::params::GcnParams;
use super::train::History;
use super::GcnConfig;
use crate::error::{Error, Result};
use crate::rng;

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"SOCM";

#[derive(Serialize, Deserialize)]
struct Header {
    config: GcnConfig,
    nodes: usize,
    features: usize,
}

fn put_u32(buf: &mut Vec<u8>, v: usize) -> Result<()> {
    let v = u32::try_from(v).map_err(|_| Error::invalid("checkpoint dimension exceeds u32"))?;
    buf.extend_from_slice(&v.to_le_bytes());
    Ok(())
}

pub fn encode_checkpoint(model: &GcnModel) -> Result<Vec<u8>> {
    let header = serde_json::to_vec(&Header {
        config: model.config.clone(),
        nodes: model.nodes,
        features: model.features,
    })?;
    let tensors = model.params.tensors();
    let mut buf = Vec::with_capacity(16 + header.len() + 8 * model.params.parameter_count());
    buf.extend_from_slice(CHECKPOINT_MAGIC);
    put_u32(&mut buf, header.len())?;
    buf.extend_from_slice(&header);
    put_u32(&mut buf, tensors.len())?;
    for t in tensors {
        put_u32(&mut buf, t.nrows())?;
        put_u32(&mut buf, t.ncols())?;
        for v in t.iter() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(buf)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], String> {
        let end = self.pos.checked_add(n).filter(|e| *e <= self.bytes.len());
        match end {
            Some(end) => {
                let s = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(format!("truncated at byte {}", self.pos)),
        }
    }

    fn u32(&mut self) -> std::result::Result<usize, String> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")) as usize)
    }
}

pub fn decode_checkpoint(bytes: &[u8]) -> std::result::Result<GcnModel, String> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != CHECKPOINT_MAGIC {
        return Err("missing SOCM header".into());
    }
    let len = r.u32()?;
    let header: Header = serde_json::from_slice(r.take(len)?).map_err(|e| e.to_string())?;
    header.config.validate().map_err(|e| e.to_string())?;
    let mut params = GcnParams::init(&header.config, header.nodes, header.features, &mut rng::stream(0, &[]));
    let count = r.u32()?;
    let mut slots = params.tensors_mut();
    if count != slots.len() {
        return Err(format!("expected {} tensors, found {count}", slots.len()));
    }
    for (k, slot) in slots.iter_mut().enumerate() {
        let (rows, cols) = (r.u32()?, r.u32()?);
        if (rows, cols) != slot.dim() {
            return Err(format!("tensor {k}: expected {:?}, found ({rows}, {cols})", slot.dim()));
        }
        let values = r
            .take(8 * rows * cols)?
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        **slot = Array2::from_shape_vec((rows, cols), values).map_err(|e| e.to_string())?;
    }
    if r.pos != bytes.len() {
        return Err(format!("{} trailing bytes", bytes.len() - r.pos));
    }
    Ok(GcnModel {
        config: header.config,
        params,
        nodes: header.nodes,
        features: header.features,
    })
}

pub fn save_checkpoint(path: &Path, model: &GcnModel) -> Result<()> {
    let bytes = encode_checkpoint(model)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<GcnModel> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_checkpoint(&bytes).map_err(|detail| Error::Format {
        what: "checkpoint",
        path: path.to_path_buf(),
        detail,
    })
}

/// `epoch,train_loss,test_acc` with an empty accuracy cell when untracked.
pub fn write_history_csv(path: &Path, history: &History) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Internal(format!("{other:?}")),
    })?;
    w.write_record(["epoch", "train_loss", "test_acc"])?;
    for e in &history.epochs {
        w.write_record([
            e.epoch.to_string(),
            e.train_loss.to_string(),
            e.test_acc.map(|a| a.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gcn::{EpochRecord, Variant};

    #[test]
    fn round_trip_every_variant() {
        for (variant, use_s) in [
            (Variant::FtVanilla, true),
            (Variant::F, false),
            (Variant::T, false),
            (Variant::Tlr, false),
        ] {
            let cfg = GcnConfig {
                variant,
                use_s,
                layer_units: vec![5, 3],
                num_classes: 3,
                seed: 4,
                ..Default::default()
            };
            let model = GcnModel::new(cfg, 7, 4).unwrap();
            let bytes = encode_checkpoint(&model).unwrap();
            assert_eq!(&bytes[..4], b"SOCM");
            assert_eq!(decode_checkpoint(&bytes).unwrap(), model);
            assert!(decode_checkpoint(&bytes[..bytes.len() - 1]).is_err());
        }
    }

    #[test]
    fn history_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("history.csv");
        let h = History {
            epochs: vec![
                EpochRecord {
                    epoch: 0,
                    train_loss: 1.5,
                    test_acc: Some(0.25),
                },
                EpochRecord {
                    epoch: 1,
                    train_loss: 1.25,
                    test_acc: None,
                },
            ],
        };
        write_history_csv(&path, &h).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text, "epoch,train_loss,test_acc\n0,1.5,0.25\n1,1.25,\n");
    }
}
