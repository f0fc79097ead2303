//! Binary container format shared by keys, matrices and the code registry.
//!
//! Every object starts with the magic `DSL1`, a `u16` format version, a `u8`
//! type tag and a list of `u32` dimensions (all little-endian). Bit payloads
//! are packed little-endian and padded to a byte per vector or matrix row.

use super::{BitMatrix, BitVec, Gf2Error, SparseMatrix};

pub const MAGIC: &[u8; 4] = b"DSL1";
pub const FORMAT_VERSION: u16 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum Tag {
    BitVec = 0,
    BitMatrix = 1,
    SparseMatrix = 2,
    Text = 3,
    Bundle = 4,
}

impl Tag {
    fn from_u8(v: u8) -> Result<Self, Gf2Error> {
        Ok(match v {
            0 => Tag::BitVec,
            1 => Tag::BitMatrix,
            2 => Tag::SparseMatrix,
            3 => Tag::Text,
            4 => Tag::Bundle,
            _ => return Err(Gf2Error::Format(format!("unknown type tag {v}"))),
        })
    }

    fn dims(self) -> usize {
        match self {
            Tag::BitVec | Tag::Text | Tag::Bundle => 1,
            Tag::BitMatrix | Tag::SparseMatrix => 2,
        }
    }
}

/// A decoded container object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Object {
    BitVec(BitVec),
    BitMatrix(BitMatrix),
    SparseMatrix(SparseMatrix),
    Text(String),
    /// Named sub-objects, in insertion order.
    Bundle(Vec<(String, Object)>),
}

fn header(out: &mut Vec<u8>, tag: Tag, dims: &[usize]) -> Result<(), Gf2Error> {
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.push(tag as u8);
    for &d in dims {
        let d = u32::try_from(d).map_err(|_| Gf2Error::Format(format!("dimension {d} exceeds u32")))?;
        out.extend_from_slice(&d.to_le_bytes());
    }
    Ok(())
}

impl Object {
    pub fn to_bytes(&self) -> Result<Vec<u8>, Gf2Error> {
        let mut out = Vec::new();
        self.write(&mut out)?;
        Ok(out)
    }

    fn write(&self, out: &mut Vec<u8>) -> Result<(), Gf2Error> {
        match self {
            Object::BitVec(v) => {
                header(out, Tag::BitVec, &[v.len()])?;
                out.extend_from_slice(&v.to_bytes());
            }
            Object::BitMatrix(m) => {
                header(out, Tag::BitMatrix, &[m.rows(), m.cols()])?;
                for r in m.row_vecs() {
                    out.extend_from_slice(&r.to_bytes());
                }
            }
            Object::SparseMatrix(m) => {
                header(out, Tag::SparseMatrix, &[m.rows(), m.cols()])?;
                let k = u16::try_from(m.k())
                    .map_err(|_| Gf2Error::Format("column weight exceeds u16".into()))?;
                out.extend_from_slice(&k.to_le_bytes());
                for col in m.columns() {
                    for &i in col {
                        out.extend_from_slice(&i.to_le_bytes());
                    }
                }
            }
            Object::Text(s) => {
                header(out, Tag::Text, &[s.len()])?;
                out.extend_from_slice(s.as_bytes());
            }
            Object::Bundle(entries) => {
                header(out, Tag::Bundle, &[entries.len()])?;
                for (name, obj) in entries {
                    let n = u16::try_from(name.len())
                        .map_err(|_| Gf2Error::Format("entry name too long".into()))?;
                    out.extend_from_slice(&n.to_le_bytes());
                    out.extend_from_slice(name.as_bytes());
                    obj.write(out)?;
                }
            }
        }
        Ok(())
    }

    /// Decodes exactly one object; trailing bytes are an error.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, Gf2Error> {
        let mut r = Reader { bytes, pos: 0 };
        let obj = r.object()?;
        if r.pos != bytes.len() {
            return Err(Gf2Error::Format(format!(
                "{} trailing bytes",
                bytes.len() - r.pos
            )));
        }
        Ok(obj)
    }

    pub fn into_bitvec(self) -> Result<BitVec, Gf2Error> {
        match self {
            Object::BitVec(v) => Ok(v),
            other => Err(other.wrong_kind("BitVec")),
        }
    }

    pub fn into_bitmatrix(self) -> Result<BitMatrix, Gf2Error> {
        match self {
            Object::BitMatrix(m) => Ok(m),
            other => Err(other.wrong_kind("BitMatrix")),
        }
    }

    pub fn into_sparse(self) -> Result<SparseMatrix, Gf2Error> {
        match self {
            Object::SparseMatrix(m) => Ok(m),
            other => Err(other.wrong_kind("SparseMatrix")),
        }
    }

    pub fn into_text(self) -> Result<String, Gf2Error> {
        match self {
            Object::Text(s) => Ok(s),
            other => Err(other.wrong_kind("Text")),
        }
    }

    pub fn into_bundle(self) -> Result<Bundle, Gf2Error> {
        match self {
            Object::Bundle(entries) => Ok(Bundle { entries }),
            other => Err(other.wrong_kind("Bundle")),
        }
    }

    fn wrong_kind(&self, want: &str) -> Gf2Error {
        let got = match self {
            Object::BitVec(_) => "BitVec",
            Object::BitMatrix(_) => "BitMatrix",
            Object::SparseMatrix(_) => "SparseMatrix",
            Object::Text(_) => "Text",
            Object::Bundle(_) => "Bundle",
        };
        Gf2Error::Format(format!("expected {want}, found {got}"))
    }
}

/// Convenience wrapper for building and reading bundles.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bundle {
    entries: Vec<(String, Object)>,
}

impl Bundle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: &str, obj: Object) -> &mut Self {
        self.entries.push((name.to_string(), obj));
        self
    }

    /// Removes and returns the first entry with this name.
    pub fn take(&mut self, name: &str) -> Result<Object, Gf2Error> {
        let pos = self
            .entries
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| Gf2Error::Format(format!("missing entry `{name}`")))?;
        Ok(self.entries.remove(pos).1)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.iter().any(|(n, _)| n == name)
    }

    pub fn into_object(self) -> Object {
        Object::Bundle(self.entries)
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, Gf2Error> {
        Object::Bundle(self.entries.clone()).to_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, Gf2Error> {
        Object::from_bytes(bytes)?.into_bundle()
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], Gf2Error> {
        if self.bytes.len() - self.pos < n {
            return Err(Gf2Error::Format("unexpected end of input".into()));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16, Gf2Error> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, Gf2Error> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn object(&mut self) -> Result<Object, Gf2Error> {
        if self.take(4)? != MAGIC {
            return Err(Gf2Error::Format("bad magic".into()));
        }
        let version = self.u16()?;
        if version != FORMAT_VERSION {
            return Err(Gf2Error::Format(format!("unsupported format version {version}")));
        }
        let tag = Tag::from_u8(self.take(1)?[0])?;
        let mut dims = [0usize; 2];
        for d in dims.iter_mut().take(tag.dims()) {
            *d = self.u32()? as usize;
        }
        Ok(match tag {
            Tag::BitVec => {
                let len = dims[0];
                Object::BitVec(BitVec::from_bytes(len, self.take(len.div_ceil(8))?))
            }
            Tag::BitMatrix => {
                let (rows, cols) = (dims[0], dims[1]);
                let per_row = cols.div_ceil(8);
                let mut data = Vec::with_capacity(rows);
                for _ in 0..rows {
                    data.push(BitVec::from_bytes(cols, self.take(per_row)?));
                }
                Object::BitMatrix(BitMatrix::from_rows(cols, data)?)
            }
            Tag::SparseMatrix => {
                let (rows, cols) = (dims[0], dims[1]);
                let k = self.u16()? as usize;
                let mut columns = Vec::with_capacity(cols);
                for _ in 0..cols {
                    let mut col = Vec::with_capacity(k);
                    for _ in 0..k {
                        col.push(self.u32()?);
                    }
                    columns.push(col);
                }
                Object::SparseMatrix(SparseMatrix::new(rows, k, columns)?)
            }
            Tag::Text => {
                let raw = self.take(dims[0])?;
                Object::Text(
                    String::from_utf8(raw.to_vec())
                        .map_err(|_| Gf2Error::Format("text entry is not UTF-8".into()))?,
                )
            }
            Tag::Bundle => {
                let mut entries = Vec::with_capacity(dims[0]);
                for _ in 0..dims[0] {
                    let n = self.u16()? as usize;
                    let name = String::from_utf8(self.take(n)?.to_vec())
                        .map_err(|_| Gf2Error::Format("entry name is not UTF-8".into()))?;
                    entries.push((name, self.object()?));
                }
                Object::Bundle(entries)
            }
        })
    }
}
