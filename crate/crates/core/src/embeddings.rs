//! Pretrained word-embedding models in the word2vec text and binary formats.
//!
//! Vectors are held in double precision regardless of the on-disk
//! representation. Lookup is exact and case-sensitive.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use log::warn;

use crate::error::{Error, Result};

/// On-disk encoding of an embedding model.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingFormat {
    Text,
    Binary,
    #[default]
    Auto,
}

impl FromStr for EmbeddingFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(EmbeddingFormat::Text),
            "binary" => Ok(EmbeddingFormat::Binary),
            "auto" => Ok(EmbeddingFormat::Auto),
            other => Err(Error::InvalidArgument(format!(
                "unknown embedding format `{other}` (expected text, binary or auto)"
            ))),
        }
    }
}

impl fmt::Display for EmbeddingFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EmbeddingFormat::Text => "text",
            EmbeddingFormat::Binary => "binary",
            EmbeddingFormat::Auto => "auto",
        })
    }
}

/// Immutable token → vector map with a fixed dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingStore {
    dimension: usize,
    tokens: Vec<String>,
    data: Vec<f64>,
    index: HashMap<String, usize>,
}

impl EmbeddingStore {
    /// Builds a store from `(token, vector)` rows.
    ///
    /// All-zero rows are dropped with a warning so that cosine similarity is
    /// always defined for stored vectors.
    pub fn from_rows<I>(dimension: usize, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, Vec<f64>)>,
    {
        let mut builder = Builder::new(dimension)?;
        for (token, vector) in rows {
            if vector.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: vector.len(),
                });
            }
            builder.push(token, vector.into_iter())?;
        }
        Ok(builder.finish())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Tokens in load order.
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    /// The stored row for `token`, or `None` when it is out of vocabulary.
    pub fn vector_of(&self, token: &str) -> Option<&[f64]> {
        self.index.get(token).map(|&row| self.row(row))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.tokens
            .iter()
            .enumerate()
            .map(move |(row, token)| (token.as_str(), self.row(row)))
    }

    fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.dimension..(row + 1) * self.dimension]
    }

    pub fn load(path: impl AsRef<Path>, format: EmbeddingFormat) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        match format {
            EmbeddingFormat::Text => Self::parse_text(&bytes),
            EmbeddingFormat::Binary => Self::parse_binary(&bytes),
            EmbeddingFormat::Auto => match sniff_format(&bytes)? {
                EmbeddingFormat::Text => Self::parse_text(&bytes),
                _ => Self::parse_binary(&bytes),
            },
        }
    }

    pub fn load_text(path: impl AsRef<Path>) -> Result<Self> {
        Self::load(path, EmbeddingFormat::Text)
    }

    pub fn load_binary(path: impl AsRef<Path>) -> Result<Self> {
        Self::load(path, EmbeddingFormat::Binary)
    }

    /// Parses the word2vec text format: a `<count> <dim>` header followed by
    /// one `token v1 .. vdim` row per line.
    pub fn parse_text(bytes: &[u8]) -> Result<Self> {
        let text = std::str::from_utf8(bytes).map_err(|e| {
            let line = bytes[..e.valid_up_to()]
                .iter()
                .filter(|&&b| b == b'\n')
                .count()
                + 1;
            Error::Parse {
                line,
                message: "invalid UTF-8".into(),
            }
        })?;
        let mut lines = text.lines().enumerate();
        let header = match lines.next() {
            Some((_, line)) => line,
            None => return Err(Error::Header("empty file".into())),
        };
        let (count, dimension) = parse_header(header)?;
        let mut builder = Builder::new(dimension)?;
        let mut found = 0;

        for (idx, line) in lines {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            found += 1;
            if found > count {
                return Err(Error::VocabMismatch {
                    declared: count,
                    found,
                });
            }
            let mut fields = line.split_whitespace();
            let token = fields.next().unwrap_or_default().to_string();
            let mut values = Vec::with_capacity(dimension);
            for field in fields {
                let value: f64 = field.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("non-numeric field `{field}`"),
                })?;
                values.push(value);
            }
            if values.len() != dimension {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!(
                        "expected {dimension} components for `{token}`, found {}",
                        values.len()
                    ),
                });
            }
            builder
                .push(token, values.into_iter())
                .map_err(|e| match e {
                    Error::DuplicateToken(t) => Error::Parse {
                        line: line_no,
                        message: format!("duplicate token `{t}`"),
                    },
                    other => other,
                })?;
        }
        if found != count {
            return Err(Error::VocabMismatch {
                declared: count,
                found,
            });
        }
        Ok(builder.finish())
    }

    /// Parses the word2vec binary format: an ASCII header line, then per
    /// entry the token, one space, and `dim` little-endian `f32` values.
    /// A newline may separate entries.
    pub fn parse_binary(bytes: &[u8]) -> Result<Self> {
        let header_end = bytes.iter().position(|&b| b == b'\n').ok_or_else(|| {
            Error::Header(if bytes.is_empty() {
                "empty file".into()
            } else {
                "missing newline".into()
            })
        })?;
        let header = std::str::from_utf8(&bytes[..header_end])
            .map_err(|_| Error::Header("header is not ASCII".into()))?;
        let (count, dimension) = parse_header(header)?;
        let mut builder = Builder::new(dimension)?;
        let mut pos = header_end + 1;
        let block = dimension * 4;

        for index in 0..count {
            while pos < bytes.len() && (bytes[pos] == b'\n' || bytes[pos] == b'\r') {
                pos += 1;
            }
            if pos >= bytes.len() {
                return Err(Error::VocabMismatch {
                    declared: count,
                    found: index,
                });
            }
            let token_end = match bytes[pos..].iter().position(|&b| b == b' ') {
                Some(offset) => pos + offset,
                None => {
                    return Err(Error::Truncated { index, token: None });
                }
            };
            let token =
                String::from_utf8(bytes[pos..token_end].to_vec()).map_err(|_| Error::Parse {
                    line: index + 2,
                    message: format!("token of entry {index} is not valid UTF-8"),
                })?;
            pos = token_end + 1;
            if bytes.len() - pos < block {
                return Err(Error::Truncated {
                    index,
                    token: Some(token),
                });
            }
            let values = bytes[pos..pos + block]
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64);
            builder.push(token, values)?;
            pos += block;
        }
        if bytes[pos..].iter().any(|b| !b.is_ascii_whitespace()) {
            return Err(Error::VocabMismatch {
                declared: count,
                found: count + 1,
            });
        }
        Ok(builder.finish())
    }

    pub fn write_text<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.len(), self.dimension)?;
        for (token, vector) in self.iter() {
            out.write_all(token.as_bytes())?;
            for v in vector {
                write!(out, " {v}")?;
            }
            out.write_all(b"\n")?;
        }
        out.flush()
    }

    /// Writes the binary format, one newline after each entry.
    pub fn write_binary<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.len(), self.dimension)?;
        for (token, vector) in self.iter() {
            out.write_all(token.as_bytes())?;
            out.write_all(b" ")?;
            for &v in vector {
                out.write_all(&(v as f32).to_le_bytes())?;
            }
            out.write_all(b"\n")?;
        }
        out.flush()
    }

    pub fn save_text(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_text(BufWriter::new(file))
            .map_err(|e| Error::io(path, e))
    }

    pub fn save_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_binary(BufWriter::new(file))
            .map_err(|e| Error::io(path, e))
    }
}

struct Builder {
    dimension: usize,
    tokens: Vec<String>,
    data: Vec<f64>,
    index: HashMap<String, usize>,
}

impl Builder {
    fn new(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Header("dimension must be positive".into()));
        }
        Ok(Builder {
            dimension,
            tokens: Vec::new(),
            data: Vec::new(),
            index: HashMap::new(),
        })
    }

    fn push(&mut self, token: String, values: impl Iterator<Item = f64>) -> Result<()> {
        if token.is_empty() {
            return Err(Error::InvalidArgument("empty token".into()));
        }
        if self.index.contains_key(&token) {
            return Err(Error::DuplicateToken(token));
        }
        let start = self.data.len();
        self.data.extend(values);
        if self.data[start..].iter().all(|&v| v == 0.0) {
            warn!("dropping zero vector for token `{token}`");
            self.data.truncate(start);
            return Ok(());
        }
        self.index.insert(token.clone(), self.tokens.len());
        self.tokens.push(token);
        Ok(())
    }

    fn finish(self) -> EmbeddingStore {
        EmbeddingStore {
            dimension: self.dimension,
            tokens: self.tokens,
            data: self.data,
            index: self.index,
        }
    }
}

fn parse_header(line: &str) -> Result<(usize, usize)> {
    let mut fields = line.split_whitespace();
    let (Some(count), Some(dim), None) = (fields.next(), fields.next(), fields.next()) else {
        return Err(Error::Header(format!(
            "expected `<vocab_count> <dimension>`, found `{}`",
            line.trim()
        )));
    };
    let count = count
        .parse()
        .map_err(|_| Error::Header(format!("vocabulary count `{count}` is not an integer")))?;
    let dim = dim
        .parse()
        .map_err(|_| Error::Header(format!("dimension `{dim}` is not an integer")))?;
    Ok((count, dim))
}

/// Decides between text and binary by checking whether the first entry
/// after the header parses as a complete text row.
pub fn sniff_format(bytes: &[u8]) -> Result<EmbeddingFormat> {
    let header_end = bytes.iter().position(|&b| b == b'\n').ok_or_else(|| {
        Error::Header(if bytes.is_empty() {
            "empty file".into()
        } else {
            "missing newline".into()
        })
    })?;
    let header = std::str::from_utf8(&bytes[..header_end])
        .map_err(|_| Error::Header("header is not ASCII".into()))?;
    let (count, dim) = parse_header(header)?;
    if count == 0 {
        return Ok(EmbeddingFormat::Text);
    }
    let rest = &bytes[header_end + 1..];
    let line_end = rest.iter().position(|&b| b == b'\n').unwrap_or(rest.len());
    let looks_like_text = std::str::from_utf8(&rest[..line_end])
        .map(|line| {
            let mut fields = line.split_whitespace();
            fields.next().is_some() && {
                let values: Vec<_> = fields.collect();
                values.len() == dim && values.iter().all(|f| f.parse::<f64>().is_ok())
            }
        })
        .unwrap_or(false);
    Ok(if looks_like_text {
        EmbeddingFormat::Text
    } else {
        EmbeddingFormat::Binary
    })
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Cosine similarity, clamped to `[-1, 1]`.
///
/// Zero-length vectors have no direction and are reported as degenerate.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Degenerate("cosine of a zero vector".into()));
    }
    Ok((dot(a, b) / (na * nb)).clamp(-1.0, 1.0))
}

/// `v / |v|`, or `None` for the zero vector.
pub fn normalized(v: &[f64]) -> Option<Vec<f64>> {
    let n = norm(v);
    (n > 0.0).then(|| v.iter().map(|x| x / n).collect())
}
