//! On-disk formats shared across the crate.
//!
//! Tensors travel as ATSR files: magic "ATSR", version byte 0x01, u32 rank,
//! rank x u32 extents, then little-endian f32 values row-major. Manifests and
//! plans are line-oriented `key = value` text with `#` comments.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

const ATSR_MAGIC: &[u8; 4] = b"ATSR";
const ATSR_VERSION: u8 = 0x01;

pub fn write_tensor(path: &Path, t: &Tensor) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(ATSR_MAGIC)?;
    w.write_all(&[ATSR_VERSION])?;
    w.write_all(&(t.rank() as u32).to_le_bytes())?;
    for &d in t.dims() {
        w.write_all(&(d as u32).to_le_bytes())?;
    }
    for &v in t.data() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_tensor(path: &Path) -> Result<Tensor> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != ATSR_MAGIC {
        return Err(Error::Format(format!("{}: bad ATSR magic", path.display())));
    }
    let mut ver = [0u8; 1];
    r.read_exact(&mut ver)?;
    if ver[0] != ATSR_VERSION {
        return Err(Error::Format(format!(
            "{}: unsupported ATSR version {}",
            path.display(),
            ver[0]
        )));
    }
    let rank = read_u32(&mut r)? as usize;
    if rank > 8 {
        return Err(Error::Format(format!("{}: rank {rank} too large", path.display())));
    }
    let mut dims = Vec::with_capacity(rank);
    for _ in 0..rank {
        dims.push(read_u32(&mut r)? as usize);
    }
    let len: usize = dims.iter().product();
    let mut data = vec![0.0f32; len];
    let mut buf = [0u8; 4];
    for v in data.iter_mut() {
        r.read_exact(&mut buf)?;
        *v = f32::from_le_bytes(buf);
    }
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(Error::Format(format!(
            "{}: trailing bytes after tensor payload",
            path.display()
        )));
    }
    Tensor::new(dims, data)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

/// Ordered `key = value` document. Order is preserved so files round-trip
/// byte-identically; keys may repeat.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvFile {
    pub entries: Vec<(String, String)>,
}

impl KvFile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get_all<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = (&'a str, &'a str)> {
        self.entries
            .iter()
            .filter(move |(k, _)| k.starts_with(prefix))
            .map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Format(format!("missing key `{key}`")))
    }

    pub fn parse(text: &str) -> Result<KvFile> {
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Format(format!(
                    "line {}: expected `key = value`, got `{raw}`",
                    lineno + 1
                )));
            };
            entries.push((key.trim().to_string(), value.trim().to_string()));
        }
        Ok(KvFile { entries })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    pub fn load(path: &Path) -> Result<KvFile> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        KvFile::parse(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// FNV-1a over bytes; used to name run directories from canonical configs.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn tensor_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for i in 0..10 {
            let dims = vec![
                rng.gen_range(1..5usize),
                rng.gen_range(1..5usize),
                rng.gen_range(1..5usize),
            ];
            let data: Vec<f32> = (0..dims.iter().product())
                .map(|_| rng.gen_range(-10.0..10.0f32))
                .collect();
            let t = Tensor::new(dims, data).unwrap();
            let path = dir.path().join(format!("t{i}.atsr"));
            write_tensor(&path, &t).unwrap();
            let back = read_tensor(&path).unwrap();
            assert_eq!(t.dims(), back.dims());
            for (a, b) in t.data().iter().zip(back.data()) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn tensor_header_layout_is_pinned() {
        let dir = tempfile::tempdir().unwrap();
        let t = Tensor::new(vec![1, 2], vec![1.0, -1.0]).unwrap();
        let path = dir.path().join("pin.atsr");
        write_tensor(&path, &t).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let mut want = vec![b'A', b'T', b'S', b'R', 0x01];
        want.extend_from_slice(&2u32.to_le_bytes());
        want.extend_from_slice(&1u32.to_le_bytes());
        want.extend_from_slice(&2u32.to_le_bytes());
        want.extend_from_slice(&1.0f32.to_le_bytes());
        want.extend_from_slice(&(-1.0f32).to_le_bytes());
        assert_eq!(bytes, want);
    }

    #[test]
    fn rejects_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.atsr");
        std::fs::write(&path, b"NOPE\x01").unwrap();
        assert!(matches!(read_tensor(&path), Err(Error::Format(_))));
    }

    #[test]
    fn kv_parse_and_round_trip() {
        let text = "# comment\nalpha = 1\n\nbeta.gamma = hello world\n";
        let kv = KvFile::parse(text).unwrap();
        assert_eq!(kv.get("alpha"), Some("1"));
        assert_eq!(kv.get("beta.gamma"), Some("hello world"));
        let again = KvFile::parse(&kv.to_text()).unwrap();
        assert_eq!(kv, again);
    }

    #[test]
    fn kv_rejects_missing_equals() {
        assert!(KvFile::parse("not a kv line").is_err());
    }
}
