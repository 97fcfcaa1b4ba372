//! Self-describing weight interchange format.
//!
//! `manifest.json` is a JSON array of layer records in execution order.
//! Parameterised layers list their tensors with a role, a row-major shape, a
//! byte offset into `weights.bin` and an element count. `weights.bin` holds
//! little-endian `f32` values. Transposed-convolution weights are laid out as
//! `[in_channels, out_channels, kernel_h, kernel_w]`.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::level::{TileType, VOLUME_SIZE};
use crate::scalar::Scalar;

use super::{GeneratorError, LATENT_SIZE};

pub const BN_EPS: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorRecord {
    pub role: String,
    pub shape: Vec<usize>,
    pub offset: usize,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerRecord {
    pub name: String,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub padding: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default)]
    pub tensors: Vec<TensorRecord>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Layer<T> {
    ConvTranspose2d {
        name: String,
        in_channels: usize,
        out_channels: usize,
        kernel: [usize; 2],
        stride: usize,
        padding: usize,
        weight: Vec<T>,
        bias: Option<Vec<T>>,
    },
    BatchNorm2d {
        name: String,
        eps: f64,
        scale: Vec<T>,
        shift: Vec<T>,
        running_mean: Vec<T>,
        running_var: Vec<T>,
    },
    Relu {
        name: String,
    },
    Tanh {
        name: String,
    },
}

impl<T: Scalar> Layer<T> {
    pub fn name(&self) -> &str {
        match self {
            Layer::ConvTranspose2d { name, .. }
            | Layer::BatchNorm2d { name, .. }
            | Layer::Relu { name }
            | Layer::Tanh { name } => name,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Layer::ConvTranspose2d { .. } => "conv_transpose2d",
            Layer::BatchNorm2d { .. } => "batch_norm2d",
            Layer::Relu { .. } => "relu",
            Layer::Tanh { .. } => "tanh",
        }
    }

    /// Shape produced from `input`, or why the layer cannot accept it.
    pub fn output_shape(&self, input: [usize; 3]) -> Result<[usize; 3], GeneratorError> {
        let [c, h, w] = input;
        match self {
            Layer::ConvTranspose2d { name, in_channels, out_channels, kernel, stride, padding, .. } => {
                if c != *in_channels {
                    return Err(GeneratorError::ShapeMismatch(format!(
                        "layer {name} expects {in_channels} input channels, got {c}"
                    )));
                }
                let side = |n: usize, k: usize| ((n - 1) * stride + k).checked_sub(2 * padding).filter(|v| *v > 0);
                match (side(h, kernel[0]), side(w, kernel[1])) {
                    (Some(oh), Some(ow)) => Ok([*out_channels, oh, ow]),
                    _ => Err(GeneratorError::ShapeMismatch(format!(
                        "layer {name} produces an empty output from {h}x{w}"
                    ))),
                }
            }
            Layer::BatchNorm2d { name, scale, .. } => {
                if scale.len() != c {
                    return Err(GeneratorError::ShapeMismatch(format!(
                        "layer {name} normalises {} channels, got {c}",
                        scale.len()
                    )));
                }
                Ok(input)
            }
            Layer::Relu { .. } | Layer::Tanh { .. } => Ok(input),
        }
    }
}

/// Validated generator parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorWeights<T> {
    layers: Vec<Layer<T>>,
}

impl<T: Scalar> GeneratorWeights<T> {
    pub const INPUT_SHAPE: [usize; 3] = [LATENT_SIZE, 1, 1];
    pub const OUTPUT_SHAPE: [usize; 3] = [TileType::COUNT, VOLUME_SIZE, VOLUME_SIZE];

    /// Checks that the layer chain maps 10x1x1 to 7x32x32 and ends in tanh.
    pub fn new(layers: Vec<Layer<T>>) -> Result<Self, GeneratorError> {
        let mut shape = Self::INPUT_SHAPE;
        for layer in &layers {
            shape = layer.output_shape(shape)?;
        }
        if shape != Self::OUTPUT_SHAPE {
            return Err(GeneratorError::ShapeMismatch(format!(
                "layer chain ends at {shape:?}, expected {:?}",
                Self::OUTPUT_SHAPE
            )));
        }
        match layers.last() {
            Some(Layer::Tanh { .. }) => Ok(GeneratorWeights { layers }),
            _ => Err(GeneratorError::ShapeMismatch("final layer must be tanh".into())),
        }
    }

    pub fn layers(&self) -> &[Layer<T>] {
        &self.layers
    }

    /// The four-stage DCGAN stack 10x1x1 -> 256x4x4 -> 128x8x8 -> 64x16x16
    /// -> 7x32x32 with every parameter produced by `init(layer, role, index)`.
    pub fn reference_with(mut init: impl FnMut(usize, &str, usize) -> T) -> Self {
        let stages = [(LATENT_SIZE, 256, 1, 0), (256, 128, 2, 1), (128, 64, 2, 1), (64, TileType::COUNT, 2, 1)];
        let mut layers = Vec::new();
        let mut fill = |layer: usize, role: &str, n: usize| (0..n).map(|i| init(layer, role, i)).collect::<Vec<T>>();
        for (i, &(cin, cout, stride, padding)) in stages.iter().enumerate() {
            let stage = i + 1;
            layers.push(Layer::ConvTranspose2d {
                name: format!("deconv{stage}"),
                in_channels: cin,
                out_channels: cout,
                kernel: [4, 4],
                stride,
                padding,
                weight: fill(layers.len(), "weight", cin * cout * 16),
                bias: Some(fill(layers.len(), "bias", cout)),
            });
            if stage < stages.len() {
                let idx = layers.len();
                layers.push(Layer::BatchNorm2d {
                    name: format!("bn{stage}"),
                    eps: BN_EPS,
                    scale: fill(idx, "scale", cout),
                    shift: fill(idx, "shift", cout),
                    running_mean: fill(idx, "running_mean", cout),
                    running_var: fill(idx, "running_var", cout),
                });
                layers.push(Layer::Relu { name: format!("relu{stage}") });
            } else {
                layers.push(Layer::Tanh { name: "tanh".into() });
            }
        }
        GeneratorWeights::new(layers).expect("reference stack is well formed")
    }

    /// Reference stack with small random weights and plausible batch-norm
    /// statistics, reproducible from `seed`.
    pub fn reference_random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::reference_with(|_, role, _| {
            let v: f64 = match role {
                "weight" => rng.random_range(-0.08..0.08),
                "bias" | "shift" | "running_mean" => rng.random_range(-0.1..0.1),
                "scale" => rng.random_range(0.8..1.2),
                _ => rng.random_range(0.5..1.5),
            };
            T::narrow(v)
        })
    }

    /// Manifest records and the matching little-endian f32 blob.
    pub fn to_interchange(&self) -> (Vec<LayerRecord>, Vec<u8>) {
        let mut blob = Vec::new();
        let mut records = Vec::new();
        let push = |blob: &mut Vec<u8>, role: &str, shape: Vec<usize>, values: &[T]| {
            let offset = blob.len();
            for v in values {
                blob.extend_from_slice(&(v.widen() as f32).to_le_bytes());
            }
            TensorRecord { role: role.into(), shape, offset, count: values.len() }
        };
        for layer in &self.layers {
            let mut record = LayerRecord {
                name: layer.name().into(),
                kind: layer.kind().into(),
                stride: None,
                padding: None,
                eps: None,
                tensors: Vec::new(),
            };
            match layer {
                Layer::ConvTranspose2d { in_channels, out_channels, kernel, stride, padding, weight, bias, .. } => {
                    record.stride = Some(*stride);
                    record.padding = Some(*padding);
                    let shape = vec![*in_channels, *out_channels, kernel[0], kernel[1]];
                    record.tensors.push(push(&mut blob, "weight", shape, weight));
                    if let Some(bias) = bias {
                        record.tensors.push(push(&mut blob, "bias", vec![*out_channels], bias));
                    }
                }
                Layer::BatchNorm2d { eps, scale, shift, running_mean, running_var, .. } => {
                    record.eps = Some(*eps);
                    let c = scale.len();
                    record.tensors.push(push(&mut blob, "scale", vec![c], scale));
                    record.tensors.push(push(&mut blob, "shift", vec![c], shift));
                    record.tensors.push(push(&mut blob, "running_mean", vec![c], running_mean));
                    record.tensors.push(push(&mut blob, "running_var", vec![c], running_var));
                }
                Layer::Relu { .. } | Layer::Tanh { .. } => {}
            }
            records.push(record);
        }
        (records, blob)
    }

    /// Builds weights from manifest records and blob bytes.
    pub fn from_interchange(records: &[LayerRecord], blob: &[u8]) -> Result<Self, GeneratorError> {
        let layers = records.iter().map(|r| layer_from_record(r, blob)).collect::<Result<Vec<_>, _>>()?;
        GeneratorWeights::new(layers)
    }
}

fn malformed(msg: String) -> GeneratorError {
    GeneratorError::MalformedManifest(msg)
}

fn read_tensor<T: Scalar>(layer: &LayerRecord, tensor: &TensorRecord, blob: &[u8]) -> Result<Vec<T>, GeneratorError> {
    let expected: usize = tensor.shape.iter().product();
    if tensor.count != expected {
        return Err(malformed(format!(
            "{}.{}: count {} does not match shape {:?}",
            layer.name, tensor.role, tensor.count, tensor.shape
        )));
    }
    let needed = tensor
        .count
        .checked_mul(4)
        .and_then(|n| n.checked_add(tensor.offset))
        .ok_or_else(|| malformed(format!("{}.{}: offset overflow", layer.name, tensor.role)))?;
    if needed > blob.len() {
        return Err(GeneratorError::TruncatedBlob {
            tensor: format!("{}.{}", layer.name, tensor.role),
            needed,
            available: blob.len(),
        });
    }
    Ok(blob[tensor.offset..needed]
        .chunks_exact(4)
        .map(|b| T::narrow(f64::from(f32::from_le_bytes([b[0], b[1], b[2], b[3]]))))
        .collect())
}

fn layer_from_record<T: Scalar>(record: &LayerRecord, blob: &[u8]) -> Result<Layer<T>, GeneratorError> {
    let find = |role: &str| record.tensors.iter().find(|t| t.role == role);
    let require =
        |role: &str| find(role).ok_or_else(|| malformed(format!("layer {} lacks tensor {role}", record.name)));
    let name = record.name.clone();
    match record.kind.as_str() {
        "conv_transpose2d" => {
            let weight = require("weight")?;
            let [cin, cout, kh, kw] = weight.shape[..] else {
                return Err(malformed(format!("layer {name}: weight must be 4-d, got {:?}", weight.shape)));
            };
            let bias = match find("bias") {
                Some(b) if b.shape != [cout] => {
                    return Err(GeneratorError::ShapeMismatch(format!(
                        "layer {name}: bias shape {:?} for {cout} output channels",
                        b.shape
                    )))
                }
                Some(b) => Some(read_tensor(record, b, blob)?),
                None => None,
            };
            let stride = record.stride.ok_or_else(|| malformed(format!("layer {name} lacks stride")))?;
            if stride == 0 {
                return Err(malformed(format!("layer {name}: stride must be positive")));
            }
            Ok(Layer::ConvTranspose2d {
                in_channels: cin,
                out_channels: cout,
                kernel: [kh, kw],
                stride,
                padding: record.padding.unwrap_or(0),
                weight: read_tensor(record, weight, blob)?,
                bias,
                name,
            })
        }
        "batch_norm2d" => {
            let roles = ["scale", "shift", "running_mean", "running_var"];
            let tensors = roles.map(require);
            let mut vectors = Vec::with_capacity(4);
            let channels = tensors[0].as_ref().map(|t| t.count).unwrap_or(0);
            for t in tensors {
                let t = t?;
                if t.shape != [channels] {
                    return Err(GeneratorError::ShapeMismatch(format!(
                        "layer {name}: {} has shape {:?}, expected [{channels}]",
                        t.role, t.shape
                    )));
                }
                vectors.push(read_tensor(record, t, blob)?);
            }
            let [scale, shift, running_mean, running_var]: [Vec<T>; 4] =
                vectors.try_into().expect("four batch-norm tensors");
            Ok(Layer::BatchNorm2d { eps: record.eps.unwrap_or(BN_EPS), scale, shift, running_mean, running_var, name })
        }
        "relu" => Ok(Layer::Relu { name }),
        "tanh" => Ok(Layer::Tanh { name }),
        other => Err(malformed(format!("layer {name}: unknown kind {other:?}"))),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, GeneratorError> {
    fs::read(path).map_err(|source| GeneratorError::Io { path: path.display().to_string(), source })
}

/// Loads and validates a `manifest.json` + `weights.bin` pair.
pub fn load_weights<T: Scalar>(
    manifest: impl AsRef<Path>,
    blob: impl AsRef<Path>,
) -> Result<GeneratorWeights<T>, GeneratorError> {
    let text = read(manifest.as_ref())?;
    let records: Vec<LayerRecord> =
        serde_json::from_slice(&text).map_err(|e| malformed(format!("{}: {e}", manifest.as_ref().display())))?;
    GeneratorWeights::from_interchange(&records, &read(blob.as_ref())?)
}

pub fn save_weights<T: Scalar>(
    weights: &GeneratorWeights<T>,
    manifest: impl AsRef<Path>,
    blob: impl AsRef<Path>,
) -> Result<(), GeneratorError> {
    let (records, bytes) = weights.to_interchange();
    let text = serde_json::to_string_pretty(&records).expect("manifest records serialize");
    let write = |path: &Path, data: &[u8]| {
        fs::write(path, data).map_err(|source| GeneratorError::Io { path: path.display().to_string(), source })
    };
    write(manifest.as_ref(), text.as_bytes())?;
    write(blob.as_ref(), &bytes)
}
