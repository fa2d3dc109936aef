//! Binary model format.
//!
//! ```text
//! "PVEC" | version u32 | config | vocabulary | input matrix | output matrix | crc32
//! ```
//!
//! All integers and floats are little-endian; strings are a u32 byte length
//! followed by UTF-8. Matrices are `rows u64, cols u64` followed by
//! row-major f32 values. The trailing CRC-32 covers every preceding byte.

use std::io::{self, Cursor, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};

use crate::corpus::{Analysis, Vocabulary, WordEntry};
use crate::embeddings::config::{Composition, PropertyConfig, PropertySet};
use crate::embeddings::matrix::Matrix;
use crate::embeddings::model::Model;
use crate::error::{Error, Result};
use crate::fsutil::{read_file, PendingFile};

pub const MAGIC: &[u8; 4] = b"PVEC";
pub const VERSION: u32 = 1;

const MODE_PROPERTIES: u8 = 0;
const MODE_NGRAMS: u8 = 1;

impl Model {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut file = PendingFile::create(path.as_ref())?;
        file.write_all(&self.to_bytes())?;
        file.commit()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Model> {
        Model::from_bytes(&read_file(path.as_ref())?)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        write_model(&mut buf, self).expect("writing to a Vec cannot fail");
        let crc = crc32fast::hash(&buf);
        buf.write_u32::<LE>(crc).unwrap();
        buf
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Model> {
        if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
            return Err(Error::BadMagic);
        }
        if bytes.len() < MAGIC.len() + 8 {
            return Err(Error::Format("truncated file".into()));
        }
        let (body, tail) = bytes.split_at(bytes.len() - 4);
        let stored = u32::from_le_bytes(tail.try_into().unwrap());
        let computed = crc32fast::hash(body);
        if stored != computed {
            return Err(Error::Checksum { stored, computed });
        }

        let mut r = Cursor::new(&body[MAGIC.len()..]);
        let version = r.read_u32::<LE>().map_err(truncated)?;
        if version != VERSION {
            return Err(Error::Version(version));
        }
        let model = read_model(&mut r).map_err(|e| match e {
            Error::Io(io) => truncated(io),
            other => other,
        })?;
        if r.position() as usize != body.len() - MAGIC.len() {
            return Err(Error::Format("trailing bytes after output matrix".into()));
        }
        Ok(model)
    }
}

fn truncated(e: io::Error) -> Error {
    if e.kind() == io::ErrorKind::UnexpectedEof {
        Error::Format("truncated file".into())
    } else {
        Error::Io(e)
    }
}

fn write_string<W: Write>(w: &mut W, s: &str) -> io::Result<()> {
    w.write_u32::<LE>(s.len() as u32)?;
    w.write_all(s.as_bytes())
}

fn read_string<R: Read>(r: &mut R) -> Result<String> {
    let len = r.read_u32::<LE>()? as usize;
    let mut buf = vec![0; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|_| Error::Format("invalid UTF-8 string".into()))
}

fn write_matrix<W: Write>(w: &mut W, m: &Matrix<f32>) -> io::Result<()> {
    w.write_u64::<LE>(m.rows() as u64)?;
    w.write_u64::<LE>(m.cols() as u64)?;
    for &v in m.as_slice() {
        w.write_f32::<LE>(v)?;
    }
    Ok(())
}

fn read_matrix<R: Read>(r: &mut R, remaining: usize) -> Result<Matrix<f32>> {
    let rows = r.read_u64::<LE>()? as usize;
    let cols = r.read_u64::<LE>()? as usize;
    let n = rows
        .checked_mul(cols)
        .filter(|n| n.saturating_mul(4) <= remaining)
        .ok_or_else(|| Error::Format("truncated file".into()))?;
    let mut data = vec![0f32; n];
    r.read_f32_into::<LE>(&mut data)?;
    Ok(Matrix::from_vec(rows, cols, data))
}

fn write_model<W: Write>(w: &mut W, model: &Model) -> io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_u32::<LE>(VERSION)?;

    match model.config {
        PropertyConfig::Properties(set) => {
            w.write_u8(MODE_PROPERTIES)?;
            w.write_u8(set.bits())?;
            w.write_u32::<LE>(0)?;
            w.write_u32::<LE>(0)?;
            w.write_u64::<LE>(0)?;
        }
        PropertyConfig::NGrams { minn, maxn, buckets } => {
            w.write_u8(MODE_NGRAMS)?;
            w.write_u8(0)?;
            w.write_u32::<LE>(minn as u32)?;
            w.write_u32::<LE>(maxn as u32)?;
            w.write_u64::<LE>(buckets as u64)?;
        }
    }
    w.write_u8(match model.composition {
        Composition::Sum => 0,
        Composition::Mean => 1,
    })?;

    let vocab = &model.vocab;
    w.write_u64::<LE>(vocab.min_count())?;
    w.write_u64::<LE>(vocab.len() as u64)?;
    for word in vocab.words() {
        write_string(w, &word.surface)?;
        w.write_u64::<LE>(word.count)?;
        w.write_u32::<LE>(word.analyses.len() as u32)?;
        for a in &word.analyses {
            write_string(w, &a.lemma)?;
            write_string(w, &a.tag.to_string())?;
            w.write_u64::<LE>(a.count)?;
        }
    }
    w.write_u64::<LE>(vocab.n_properties() as u64)?;
    for key in vocab.properties() {
        write_string(w, key)?;
    }

    write_matrix(w, &model.input)?;
    write_matrix(w, &model.output)
}

fn read_model(r: &mut Cursor<&[u8]>) -> Result<Model> {
    let total = r.get_ref().len();
    let mode = r.read_u8()?;
    let bits = r.read_u8()?;
    let minn = r.read_u32::<LE>()? as usize;
    let maxn = r.read_u32::<LE>()? as usize;
    let buckets = r.read_u64::<LE>()? as usize;
    let config = match mode {
        MODE_PROPERTIES => PropertyConfig::Properties(PropertySet::from_bits(bits)?),
        MODE_NGRAMS => PropertyConfig::ngrams(minn, maxn, buckets)?,
        other => return Err(Error::Format(format!("unknown config mode {other}"))),
    };
    let composition = match r.read_u8()? {
        0 => Composition::Sum,
        1 => Composition::Mean,
        other => return Err(Error::Format(format!("unknown composition {other}"))),
    };

    let min_count = r.read_u64::<LE>()?;
    let n_words = r.read_u64::<LE>()? as usize;
    let mut words = Vec::with_capacity(n_words.min(total));
    for _ in 0..n_words {
        let surface = read_string(r)?;
        let count = r.read_u64::<LE>()?;
        let n_analyses = r.read_u32::<LE>()? as usize;
        let mut analyses = Vec::with_capacity(n_analyses.min(total));
        for _ in 0..n_analyses {
            let lemma = read_string(r)?;
            let tag = read_string(r)?
                .parse()
                .map_err(|_| Error::Format("invalid tag".into()))?;
            let count = r.read_u64::<LE>()?;
            analyses.push(Analysis { lemma, tag, count });
        }
        words.push(WordEntry {
            surface,
            count,
            analyses,
        });
    }
    let n_props = r.read_u64::<LE>()? as usize;
    let mut properties = Vec::with_capacity(n_props.min(total));
    for _ in 0..n_props {
        properties.push(read_string(r)?);
    }
    let vocab = Vocabulary::from_parts(words, properties, min_count)?;

    let remaining = total - r.position() as usize;
    let input = read_matrix(r, remaining)?;
    let remaining = total - r.position() as usize;
    let output = read_matrix(r, remaining)?;
    Model::from_parts(config, composition, vocab, input, output)
}
