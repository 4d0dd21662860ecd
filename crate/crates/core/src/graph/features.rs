use half::f16;
use half::slice::HalfFloatSliceExt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dtype {
    F16,
    F32,
}

impl Dtype {
    pub fn size_of(self) -> usize {
        match self {
            Dtype::F16 => 2,
            Dtype::F32 => 4,
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            Dtype::F16 => 1,
            Dtype::F32 => 2,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            1 => Some(Dtype::F16),
            2 => Some(Dtype::F32),
            _ => None,
        }
    }
}

impl std::str::FromStr for Dtype {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f16" => Ok(Dtype::F16),
            "f32" => Ok(Dtype::F32),
            other => Err(Error::invalid(format!("unknown dtype {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeatureData {
    F16(Vec<f16>),
    F32(Vec<f32>),
}

/// Row-major node feature matrix. Half-precision storage is widened to f32
/// when rows are gathered.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    data: FeatureData,
}

impl FeatureMatrix {
    pub fn new(rows: usize, cols: usize, data: FeatureData) -> Result<Self> {
        let len = match &data {
            FeatureData::F16(v) => v.len(),
            FeatureData::F32(v) => v.len(),
        };
        if len != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} feature matrix needs {} values, got {len}",
                rows * cols
            )));
        }
        Ok(FeatureMatrix { rows, cols, data })
    }

    pub fn from_f32(rows: usize, cols: usize, values: Vec<f32>) -> Result<Self> {
        Self::new(rows, cols, FeatureData::F32(values))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dtype(&self) -> Dtype {
        match self.data {
            FeatureData::F16(_) => Dtype::F16,
            FeatureData::F32(_) => Dtype::F32,
        }
    }

    pub fn data(&self) -> &FeatureData {
        &self.data
    }

    /// Writes row `row` as f32 into `out`, which must hold exactly `cols`
    /// values.
    #[inline]
    pub fn read_row(&self, row: usize, out: &mut [f32]) {
        let start = row * self.cols;
        let end = start + self.cols;
        match &self.data {
            FeatureData::F32(v) => out.copy_from_slice(&v[start..end]),
            FeatureData::F16(v) => v[start..end].convert_to_f32_slice(out),
        }
    }

    pub fn get(&self, row: usize, col: usize) -> f32 {
        let i = row * self.cols + col;
        match &self.data {
            FeatureData::F32(v) => v[i],
            FeatureData::F16(v) => v[i].to_f32(),
        }
    }

    pub fn row_f32(&self, row: usize) -> Vec<f32> {
        let mut out = vec![0.0; self.cols];
        self.read_row(row, &mut out);
        out
    }

    pub fn to_f32_vec(&self) -> Vec<f32> {
        match &self.data {
            FeatureData::F32(v) => v.clone(),
            FeatureData::F16(v) => v.to_f32_vec(),
        }
    }
}

/// Uniform features in [-1, 1], deterministic in `seed`. The f16 variant
/// draws the same f32 values and rounds each to nearest-even.
pub fn generate_features(n: usize, f: usize, dtype: Dtype, seed: u64) -> FeatureMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f32> = (0..n * f)
        .map(|_| rng.random_range(-1.0f32..=1.0))
        .collect();
    let data = match dtype {
        Dtype::F32 => FeatureData::F32(values),
        Dtype::F16 => FeatureData::F16(values.iter().map(|&x| f16::from_f32(x)).collect()),
    };
    FeatureMatrix {
        rows: n,
        cols: f,
        data,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    values: Vec<u32>,
    num_classes: u32,
}

impl LabelVector {
    pub fn new(values: Vec<u32>, num_classes: u32) -> Result<Self> {
        if let Some(pos) = values.iter().position(|&y| y >= num_classes) {
            return Err(Error::invalid(format!(
                "label {} at row {pos} is outside [0, {num_classes})",
                values[pos]
            )));
        }
        Ok(LabelVector {
            values,
            num_classes,
        })
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn num_classes(&self) -> u32 {
        self.num_classes
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn generate_labels(n: usize, num_classes: u32, seed: u64) -> Result<LabelVector> {
    if num_classes == 0 && n > 0 {
        return Err(Error::invalid("num_classes must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..n).map(|_| rng.random_range(0..num_classes)).collect();
    Ok(LabelVector {
        values,
        num_classes,
    })
}
