//! CNN layer descriptors and their im2col GEMM shapes.
//!
//! Convolutions become GEMMs by unfolding the input feature map: each output
//! pixel contributes one row of the unfolded matrix, each flattened filter
//! one weight column. Grouped/depthwise convolutions expand into per-group
//! GEMMs (`instances` copies of the per-group shape), which preserves MAC
//! counts without a separate engine path.

use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerKind {
    Conv,
    Fc,
    Pool,
    Activation,
}

impl FromStr for LayerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "conv" => Ok(LayerKind::Conv),
            "fc" => Ok(LayerKind::Fc),
            "pool" => Ok(LayerKind::Pool),
            "activation" => Ok(LayerKind::Activation),
            other => Err(Error::InvalidArgument(format!(
                "unknown layer kind '{other}'"
            ))),
        }
    }
}

/// One row of a model descriptor file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerDescriptor {
    pub name: String,
    pub kind: LayerKind,
    pub in_c: u32,
    pub in_h: u32,
    pub in_w: u32,
    pub out_c: u32,
    pub kernel_h: u32,
    pub kernel_w: u32,
    pub stride: u32,
    pub padding: u32,
    pub groups: u32,
}

impl LayerDescriptor {
    /// Output spatial dims under floor semantics. Errors if the kernel does
    /// not fit in the padded input.
    pub fn out_dims(&self) -> Result<(u32, u32)> {
        let dim = |i: u32, k: u32| -> Result<u32> {
            let padded = i + 2 * self.padding;
            if k == 0 || self.stride == 0 {
                return Err(Error::InvalidArgument(format!(
                    "layer '{}': kernel and stride must be >= 1",
                    self.name
                )));
            }
            if k > padded {
                return Err(Error::InvalidArgument(format!(
                    "layer '{}': kernel {k} larger than padded input {padded}",
                    self.name
                )));
            }
            Ok((padded - k) / self.stride + 1)
        };
        Ok((dim(self.in_h, self.kernel_h)?, dim(self.in_w, self.kernel_w)?))
    }

    /// Output shape (c, h, w) this layer produces.
    pub fn out_shape(&self) -> Result<(u32, u32, u32)> {
        match self.kind {
            LayerKind::Conv | LayerKind::Pool => {
                let (h, w) = self.out_dims()?;
                Ok((self.out_c, h, w))
            }
            LayerKind::Activation => Ok((self.in_c, self.in_h, self.in_w)),
            LayerKind::Fc => Ok((self.out_c, 1, 1)),
        }
    }

    /// Parallel GEMM instances this layer expands into (conv groups).
    pub fn gemm_instances(&self) -> u64 {
        match self.kind {
            LayerKind::Conv => u64::from(self.groups.max(1)),
            _ => 1,
        }
    }
}

/// An im2col GEMM: `rows` output pixels x `k` dot-product length x `cols`
/// filters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GemmShape {
    pub rows: u64,
    pub k: u64,
    pub cols: u64,
}

impl GemmShape {
    pub fn macs(&self) -> u64 {
        self.rows * self.k * self.cols
    }
}

/// Convert a conv layer into its per-group GEMM shape: rows = out_h * out_w,
/// k = kernel_h * kernel_w * (in_c / groups), cols = out_c / groups.
pub fn conv_to_gemm(layer: &LayerDescriptor) -> Result<GemmShape> {
    if layer.kind != LayerKind::Conv {
        return Err(Error::InvalidArgument(format!(
            "layer '{}' is not a conv layer",
            layer.name
        )));
    }
    let g = layer.groups.max(1);
    if !layer.in_c.is_multiple_of(g) || !layer.out_c.is_multiple_of(g) {
        return Err(Error::InvalidArgument(format!(
            "layer '{}': groups {g} must divide in_c {} and out_c {}",
            layer.name, layer.in_c, layer.out_c
        )));
    }
    let (out_h, out_w) = layer.out_dims()?;
    Ok(GemmShape {
        rows: u64::from(out_h) * u64::from(out_w),
        k: u64::from(layer.kernel_h) * u64::from(layer.kernel_w) * u64::from(layer.in_c / g),
        cols: u64::from(layer.out_c / g),
    })
}

/// Convert a fully-connected layer into a batch-1 GEMM.
pub fn fc_to_gemm(layer: &LayerDescriptor) -> Result<GemmShape> {
    if layer.kind != LayerKind::Fc {
        return Err(Error::InvalidArgument(format!(
            "layer '{}' is not an fc layer",
            layer.name
        )));
    }
    Ok(GemmShape {
        rows: 1,
        k: u64::from(layer.in_c),
        cols: u64::from(layer.out_c),
    })
}

/// Bit-slicing expansion when the hardware precision is below the model
/// precision: both operands slice into ceil(model/hw) pieces and every
/// input-slice x weight-slice pair costs one pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SliceFactor {
    pub input_slices: u32,
    pub weight_slices: u32,
    pub passes: u32,
}

pub fn bit_slices(model_bits: u32, hw_bits: u32) -> SliceFactor {
    let model_bits = model_bits.max(1);
    let hw_bits = hw_bits.max(1);
    let s = model_bits.div_ceil(hw_bits);
    SliceFactor {
        input_slices: s,
        weight_slices: s,
        passes: s * s,
    }
}

/// A parsed model: ordered layers plus the quantized operand width.
#[derive(Debug, Clone)]
pub struct CnnModel {
    pub name: String,
    pub layers: Vec<LayerDescriptor>,
    pub model_bits: u32,
}

impl CnnModel {
    /// Total multiply-accumulates over all GEMM-bearing layers.
    pub fn total_macs(&self) -> Result<u64> {
        let mut macs = 0u64;
        for l in &self.layers {
            macs += match l.kind {
                LayerKind::Conv => conv_to_gemm(l)?.macs() * l.gemm_instances(),
                LayerKind::Fc => fc_to_gemm(l)?.macs(),
                _ => 0,
            };
        }
        Ok(macs)
    }

    pub fn gemm_layer_count(&self) -> usize {
        self.layers
            .iter()
            .filter(|l| matches!(l.kind, LayerKind::Conv | LayerKind::Fc))
            .count()
    }
}

const MODEL_HEADER: &str = "name,kind,in_c,in_h,in_w,out_c,kernel_h,kernel_w,stride,padding,groups";

/// Loads a model descriptor CSV and checks the dimension chain.
///
/// Branching topologies (residual shortcuts, inception branches, channel
/// concatenation) mean a layer's input is not always the previous layer's
/// output, so the check keeps the set of feature-map shapes produced so far
/// and requires each layer's declared spatial input dims to match one of
/// them; channel counts may differ (concatenation).
pub fn load_model(path: &Path) -> Result<CnnModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        line: 0,
        msg: e.to_string(),
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "model".into());
    load_model_named(&text, &path.display().to_string(), name)
}

pub fn load_model_named(text: &str, path: &str, name: String) -> Result<CnnModel> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == MODEL_HEADER => {}
        Some((_, h)) => {
            return Err(Error::Parse {
                path: path.to_string(),
                line: 1,
                msg: format!("bad header '{h}', expected '{MODEL_HEADER}'"),
            })
        }
        None => {
            return Err(Error::Parse {
                path: path.to_string(),
                line: 1,
                msg: "empty file".into(),
            })
        }
    }

    let mut layers = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').map(str::trim).collect();
        if fields.len() != 11 {
            return Err(Error::Parse {
                path: path.to_string(),
                line: line_no,
                msg: format!("expected 11 columns, got {}", fields.len()),
            });
        }
        let num = |i: usize| -> Result<u32> {
            fields[i].parse().map_err(|_| Error::Parse {
                path: path.to_string(),
                line: line_no,
                msg: format!("column '{}' is not an integer: '{}'", i + 1, fields[i]),
            })
        };
        layers.push(LayerDescriptor {
            name: fields[0].to_string(),
            kind: fields[1].parse().map_err(|e| Error::Parse {
                path: path.to_string(),
                line: line_no,
                msg: format!("{e}"),
            })?,
            in_c: num(2)?,
            in_h: num(3)?,
            in_w: num(4)?,
            out_c: num(5)?,
            kernel_h: num(6)?,
            kernel_w: num(7)?,
            stride: num(8)?,
            padding: num(9)?,
            groups: num(10)?,
        });
    }

    check_dimension_chain(&layers)?;
    Ok(CnnModel {
        name,
        layers,
        model_bits: 8,
    })
}

fn check_dimension_chain(layers: &[LayerDescriptor]) -> Result<()> {
    // Shapes any later layer may legally consume: the model input plus every
    // produced output.
    let mut live: Vec<(u32, u32)> = Vec::new();
    let mut prev_name = "<input>".to_string();
    for (i, layer) in layers.iter().enumerate() {
        if i == 0 {
            live.push((layer.in_h, layer.in_w));
        }
        let declared = (layer.in_h, layer.in_w);
        // FC layers flatten whatever feature map precedes them.
        if layer.kind != LayerKind::Fc && !live.contains(&declared) {
            return Err(Error::DimensionChain {
                prev: prev_name,
                layer: layer.name.clone(),
                msg: format!(
                    "declared input {}x{} matches no produced feature map",
                    layer.in_h, layer.in_w
                ),
            });
        }
        let (_, oh, ow) = layer.out_shape()?;
        if !live.contains(&(oh, ow)) {
            live.push((oh, ow));
        }
        prev_name = layer.name.clone();
    }
    Ok(())
}
