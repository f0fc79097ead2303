use std::collections::BTreeMap;
use std::sync::Arc;

use crate::gf2::io::{Bundle, Object};
use crate::gf2::{BitMatrix, BitVec};

use super::gf2m::first_primitive_poly;
use super::{BlockCode, ConcatenatedCode, EccError, InnerCode, RepetitionCode};

/// Bumped whenever code construction changes in a way that alters codewords.
pub const REGISTRY_VERSION: u32 = 1;

#[derive(Clone, Debug)]
enum Entry {
    Repetition(Arc<RepetitionCode>),
    Concatenated(Arc<ConcatenatedCode>),
}

impl Entry {
    fn code(&self) -> Arc<dyn BlockCode> {
        match self {
            Entry::Repetition(c) => c.clone(),
            Entry::Concatenated(c) => c.clone(),
        }
    }
}

/// Named codes, persisted with their inner generators and decoding tables so
/// that experiments do not depend on re-running the inner-code search.
#[derive(Clone, Debug, Default)]
pub struct CodeRegistry {
    entries: BTreeMap<String, Entry>,
}

fn concat_key(dim: usize) -> String {
    format!("concatenated/{dim}")
}

fn repetition_key(dim: usize, r: usize) -> String {
    format!("repetition/{dim}/{r}")
}

impl CodeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// The shipped concatenated code for `dim`, built on first use.
    pub fn concatenated(&mut self, dim: usize) -> Result<Arc<dyn BlockCode>, EccError> {
        let key = concat_key(dim);
        if let Some(e) = self.entries.get(&key) {
            return Ok(e.code());
        }
        let code = Arc::new(ConcatenatedCode::build(dim)?);
        self.entries.insert(key, Entry::Concatenated(code.clone()));
        Ok(code)
    }

    pub fn repetition(&mut self, dim: usize, r: usize) -> Result<Arc<dyn BlockCode>, EccError> {
        let key = repetition_key(dim, r);
        if let Some(e) = self.entries.get(&key) {
            return Ok(e.code());
        }
        let code = Arc::new(RepetitionCode::new(dim, r)?);
        self.entries.insert(key, Entry::Repetition(code.clone()));
        Ok(code)
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.keys().cloned().collect()
    }

    /// Looks up a code by registry key, e.g. `concatenated/224`.
    pub fn get(&self, name: &str) -> Option<Arc<dyn BlockCode>> {
        self.entries.get(name).map(Entry::code)
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, EccError> {
        let mut top = Bundle::new();
        top.push("version", Object::Text(REGISTRY_VERSION.to_string()));
        for (key, entry) in &self.entries {
            let mut b = Bundle::new();
            match entry {
                Entry::Repetition(c) => {
                    b.push(
                        "desc",
                        Object::Text(format!("kind=repetition\ndim={}\nr={}", c.dim(), c.repeats())),
                    );
                }
                Entry::Concatenated(c) => {
                    let inner = c.inner();
                    let bits = inner.dim();
                    b.push(
                        "desc",
                        Object::Text(format!(
                            "kind=concatenated\ndim={}\nb={}\nN={}\nK={}\nblock_len={}\npoly={}\ninner_distance={}\nt_err={}",
                            c.dim(),
                            bits,
                            c.outer().n(),
                            c.outer().k(),
                            c.block_len(),
                            c.outer().field().poly(),
                            inner.distance(),
                            c.t_err()
                        )),
                    );
                    b.push("inner_generator", Object::BitMatrix(inner.generator()));
                    let leaders = inner
                        .leaders()
                        .iter()
                        .map(|&e| BitVec::from_u64(2 * bits, e as u64))
                        .collect();
                    b.push(
                        "leaders",
                        Object::BitMatrix(BitMatrix::from_rows(2 * bits, leaders)?),
                    );
                }
            }
            top.push(key, b.into_object());
        }
        Ok(top.to_bytes()?)
    }

    /// Loads and re-validates every stored code.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, EccError> {
        let reg_err = |m: String| EccError::Registry(m);
        let Object::Bundle(entries) = Object::from_bytes(bytes)? else {
            return Err(reg_err("registry file is not a bundle".into()));
        };
        let mut out = Self::new();
        let mut saw_version = false;
        for (key, obj) in entries {
            if key == "version" {
                let v = obj.into_text()?;
                if v != REGISTRY_VERSION.to_string() {
                    return Err(reg_err(format!("registry version {v}, expected {REGISTRY_VERSION}")));
                }
                saw_version = true;
                continue;
            }
            let mut b = obj.into_bundle()?;
            let desc = parse_desc(&b.take("desc")?.into_text()?);
            let get = |k: &str| -> Result<usize, EccError> {
                desc.get(k)
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| reg_err(format!("`{key}`: missing field `{k}`")))
            };
            let entry = match desc.get("kind").map(String::as_str) {
                Some("repetition") => Entry::Repetition(Arc::new(RepetitionCode::new(get("dim")?, get("r")?)?)),
                Some("concatenated") => {
                    let bits = get("b")?;
                    let gen = b.take("inner_generator")?.into_bitmatrix()?;
                    if gen.rows() != 2 * bits || gen.cols() != bits {
                        return Err(reg_err(format!("`{key}`: inner generator has the wrong shape")));
                    }
                    let parity: Vec<u32> = (0..bits)
                        .map(|i| (0..bits).fold(0u32, |acc, j| acc | ((gen.get(bits + i, j) as u32) << j)))
                        .collect();
                    let inner = InnerCode::from_parity(bits, parity);
                    if inner.generator() != gen {
                        return Err(reg_err(format!("`{key}`: inner generator is not systematic")));
                    }
                    let leaders = b.take("leaders")?.into_bitmatrix()?;
                    let rebuilt: Vec<u32> = leaders.row_vecs().iter().map(|r| r.to_u64() as u32).collect();
                    if rebuilt != inner.leaders() {
                        return Err(reg_err(format!("`{key}`: stored decoding table does not match")));
                    }
                    if get("poly")? as u32 != first_primitive_poly(bits as u32) {
                        return Err(reg_err(format!("`{key}`: unexpected field polynomial")));
                    }
                    let code =
                        ConcatenatedCode::with_shape(bits, get("N")?, get("K")?, get("dim")?, get("block_len")?, inner)?;
                    if code.t_err() != get("t_err")? {
                        return Err(reg_err(format!("`{key}`: stored t_err disagrees")));
                    }
                    Entry::Concatenated(Arc::new(code))
                }
                other => return Err(reg_err(format!("`{key}`: unknown code kind {other:?}"))),
            };
            out.entries.insert(key, entry);
        }
        if !saw_version {
            return Err(reg_err("missing version".into()));
        }
        Ok(out)
    }
}

fn parse_desc(s: &str) -> BTreeMap<String, String> {
    s.lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}
