//! On-disk formats (all little-endian).
//!
//! | file     | layout |
//! |----------|--------|
//! | graph    | `"MFGC"`, version u32 = 1, num_nodes u64, num_edges u64, indptr (num_nodes+1) x u64, indices num_edges x u32 |
//! | features | `"FEAT"`, version u32 = 1, rows u64, cols u32, dtype u8 (1 = f16, 2 = f32), 3 padding bytes, row-major payload |
//! | labels   | `"LABL"`, version u32 = 1, rows u64, num_classes u32, rows x u32 |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use half::f16;

use super::{CsrGraph, Dtype, FeatureData, FeatureMatrix, LabelVector};
use crate::binio::{LeReader, LeWriter};
use crate::error::{Error, Result};

pub const CSR_MAGIC: [u8; 4] = *b"MFGC";
pub const FEATURE_MAGIC: [u8; 4] = *b"FEAT";
pub const LABEL_MAGIC: [u8; 4] = *b"LABL";
pub const FORMAT_VERSION: u32 = 1;

pub(crate) fn open(path: &Path) -> Result<(BufReader<File>, u64)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let len = file.metadata().map_err(|e| Error::io(path, e))?.len();
    Ok((BufReader::new(file), len))
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(BufWriter::new(file))
}

pub fn write_csr<W: Write>(g: &CsrGraph, out: W) -> Result<W> {
    let mut w = LeWriter::new(out);
    w.bytes(&CSR_MAGIC)?;
    w.u32(FORMAT_VERSION)?;
    w.u64(g.num_nodes() as u64)?;
    w.u64(g.num_edges() as u64)?;
    w.u64_slice(g.indptr())?;
    w.u32_slice(g.indices())?;
    w.finish()
}

pub fn read_csr<R: Read>(input: R, len: Option<u64>) -> Result<CsrGraph> {
    let mut r = LeReader::new(input, "graph file", len);
    r.expect_magic(CSR_MAGIC)?;
    r.expect_version(FORMAT_VERSION)?;
    let num_nodes = r.u64()?;
    let num_edges = r.u64()?;
    let indptr = r.u64_array(num_nodes.saturating_add(1))?;
    let indices = r.u32_array(num_edges)?;
    r.expect_end()?;
    CsrGraph::from_parts(indptr, indices).map_err(|e| Error::Malformed {
        context: "graph file",
        detail: e.to_string(),
    })
}

pub fn save_csr(g: &CsrGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_csr(g, create(path)?)?;
    Ok(())
}

pub fn load_csr(path: impl AsRef<Path>) -> Result<CsrGraph> {
    let (r, len) = open(path.as_ref())?;
    read_csr(r, Some(len))
}

pub fn write_features<W: Write>(fm: &FeatureMatrix, out: W) -> Result<W> {
    let mut w = LeWriter::new(out);
    w.bytes(&FEATURE_MAGIC)?;
    w.u32(FORMAT_VERSION)?;
    w.u64(fm.rows() as u64)?;
    w.u32(u32::try_from(fm.cols()).map_err(|_| Error::invalid("feature dimension exceeds u32"))?)?;
    w.u8(fm.dtype().code())?;
    w.bytes(&[0u8; 3])?;
    match fm.data() {
        FeatureData::F16(v) => {
            let bits: Vec<u16> = v.iter().map(|x| x.to_bits()).collect();
            w.u16_slice(&bits)?;
        }
        FeatureData::F32(v) => w.f32_slice(v)?,
    }
    w.finish()
}

pub fn read_features<R: Read>(input: R, len: Option<u64>) -> Result<FeatureMatrix> {
    let mut r = LeReader::new(input, "feature file", len);
    r.expect_magic(FEATURE_MAGIC)?;
    r.expect_version(FORMAT_VERSION)?;
    let rows = r.u64()?;
    let cols = r.u32()?;
    let code = r.u8()?;
    let dtype = Dtype::from_code(code).ok_or_else(|| Error::Malformed {
        context: "feature file",
        detail: format!("unknown dtype code {code}"),
    })?;
    r.skip(3)?;
    let count = rows.checked_mul(u64::from(cols)).ok_or(Error::Truncated {
        context: "feature file",
    })?;
    let data = match dtype {
        Dtype::F16 => FeatureData::F16(
            r.u16_array(count)?
                .into_iter()
                .map(f16::from_bits)
                .collect(),
        ),
        Dtype::F32 => FeatureData::F32(r.f32_array(count)?),
    };
    r.expect_end()?;
    FeatureMatrix::new(rows as usize, cols as usize, data)
}

pub fn save_features(fm: &FeatureMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_features(fm, create(path.as_ref())?)?;
    Ok(())
}

pub fn load_features(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    let (r, len) = open(path.as_ref())?;
    read_features(r, Some(len))
}

pub fn write_labels<W: Write>(y: &LabelVector, out: W) -> Result<W> {
    let mut w = LeWriter::new(out);
    w.bytes(&LABEL_MAGIC)?;
    w.u32(FORMAT_VERSION)?;
    w.u64(y.len() as u64)?;
    w.u32(y.num_classes())?;
    w.u32_slice(y.values())?;
    w.finish()
}

pub fn read_labels<R: Read>(input: R, len: Option<u64>) -> Result<LabelVector> {
    let mut r = LeReader::new(input, "label file", len);
    r.expect_magic(LABEL_MAGIC)?;
    r.expect_version(FORMAT_VERSION)?;
    let rows = r.u64()?;
    let num_classes = r.u32()?;
    let values = r.u32_array(rows)?;
    r.expect_end()?;
    LabelVector::new(values, num_classes).map_err(|e| Error::Malformed {
        context: "label file",
        detail: e.to_string(),
    })
}

pub fn save_labels(y: &LabelVector, path: impl AsRef<Path>) -> Result<()> {
    write_labels(y, create(path.as_ref())?)?;
    Ok(())
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<LabelVector> {
    let (r, len) = open(path.as_ref())?;
    read_labels(r, Some(len))
}
