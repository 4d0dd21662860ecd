//! Little-endian binary reading/writing helpers shared by the on-disk
//! formats. Short reads surface as `Error::Truncated`.

use std::io::{self, Read, Write};

use crate::error::{Error, Result};

pub(crate) struct LeReader<R> {
    inner: R,
    context: &'static str,
    remaining: Option<u64>,
}

impl<R: Read> LeReader<R> {
    /// `len` is the total input length when known; it lets array reads
    /// reject absurd declared sizes before allocating.
    pub fn new(inner: R, context: &'static str, len: Option<u64>) -> Self {
        LeReader {
            inner,
            context,
            remaining: len,
        }
    }

    fn fill(&mut self, buf: &mut [u8]) -> Result<()> {
        match self.inner.read_exact(buf) {
            Ok(()) => {
                if let Some(r) = self.remaining.as_mut() {
                    *r = r.saturating_sub(buf.len() as u64);
                }
                Ok(())
            }
            Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => Err(Error::Truncated {
                context: self.context,
            }),
            Err(e) => Err(e.into()),
        }
    }

    pub fn expect_magic(&mut self, expected: [u8; 4]) -> Result<()> {
        let mut found = [0u8; 4];
        self.fill(&mut found)?;
        if found != expected {
            return Err(Error::BadMagic {
                context: self.context,
                expected,
                found,
            });
        }
        Ok(())
    }

    pub fn expect_version(&mut self, expected: u32) -> Result<()> {
        let found = self.u32()?;
        if found != expected {
            return Err(Error::VersionMismatch {
                context: self.context,
                expected,
                found,
            });
        }
        Ok(())
    }

    pub fn u8(&mut self) -> Result<u8> {
        let mut b = [0u8; 1];
        self.fill(&mut b)?;
        Ok(b[0])
    }

    pub fn skip(&mut self, n: usize) -> Result<()> {
        let mut b = vec![0u8; n];
        self.fill(&mut b)
    }

    pub fn u32(&mut self) -> Result<u32> {
        let mut b = [0u8; 4];
        self.fill(&mut b)?;
        Ok(u32::from_le_bytes(b))
    }

    pub fn u64(&mut self) -> Result<u64> {
        let mut b = [0u8; 8];
        self.fill(&mut b)?;
        Ok(u64::from_le_bytes(b))
    }

    fn check_room(&self, count: u64, width: u64) -> Result<usize> {
        let bytes = count.checked_mul(width).ok_or(Error::Truncated {
            context: self.context,
        })?;
        if let Some(r) = self.remaining {
            if bytes > r {
                return Err(Error::Truncated {
                    context: self.context,
                });
            }
        }
        usize::try_from(count).map_err(|_| Error::Truncated {
            context: self.context,
        })
    }

    fn raw_array<const W: usize, T>(
        &mut self,
        count: u64,
        conv: fn([u8; W]) -> T,
    ) -> Result<Vec<T>> {
        let count = self.check_room(count, W as u64)?;
        let mut out = Vec::with_capacity(count);
        let mut chunk = vec![0u8; (64 * 1024 / W) * W];
        let mut left = count;
        while left > 0 {
            let take = left.min(chunk.len() / W);
            let buf = &mut chunk[..take * W];
            self.fill(buf)?;
            out.extend(
                buf.chunks_exact(W)
                    .map(|c| conv(c.try_into().expect("chunk width"))),
            );
            left -= take;
        }
        Ok(out)
    }

    pub fn u16_array(&mut self, count: u64) -> Result<Vec<u16>> {
        self.raw_array(count, u16::from_le_bytes)
    }

    pub fn u32_array(&mut self, count: u64) -> Result<Vec<u32>> {
        self.raw_array(count, u32::from_le_bytes)
    }

    pub fn u64_array(&mut self, count: u64) -> Result<Vec<u64>> {
        self.raw_array(count, u64::from_le_bytes)
    }

    pub fn f32_array(&mut self, count: u64) -> Result<Vec<f32>> {
        self.raw_array(count, f32::from_le_bytes)
    }

    /// Fails unless the input is fully consumed.
    pub fn expect_end(&mut self) -> Result<()> {
        let mut b = [0u8; 1];
        match self.inner.read(&mut b)? {
            0 => Ok(()),
            _ => Err(Error::Malformed {
                context: self.context,
                detail: "trailing bytes after payload".into(),
            }),
        }
    }
}

pub(crate) struct LeWriter<W> {
    inner: W,
}

impl<W: Write> LeWriter<W> {
    pub fn new(inner: W) -> Self {
        LeWriter { inner }
    }

    pub fn bytes(&mut self, b: &[u8]) -> Result<()> {
        self.inner.write_all(b)?;
        Ok(())
    }

    pub fn u8(&mut self, v: u8) -> Result<()> {
        self.bytes(&[v])
    }

    pub fn u32(&mut self, v: u32) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }

    pub fn u64(&mut self, v: u64) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }

    pub fn u16_slice(&mut self, vs: &[u16]) -> Result<()> {
        vs.iter().try_for_each(|v| self.bytes(&v.to_le_bytes()))
    }

    pub fn u32_slice(&mut self, vs: &[u32]) -> Result<()> {
        vs.iter().try_for_each(|v| self.bytes(&v.to_le_bytes()))
    }

    pub fn u64_slice(&mut self, vs: &[u64]) -> Result<()> {
        vs.iter().try_for_each(|v| self.bytes(&v.to_le_bytes()))
    }

    pub fn f32_slice(&mut self, vs: &[f32]) -> Result<()> {
        vs.iter().try_for_each(|v| self.bytes(&v.to_le_bytes()))
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner.flush()?;
        Ok(self.inner)
    }
}
