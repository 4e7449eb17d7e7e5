//! Versioned binary model container. After the `PGRF` magic and version come a
//! JSON header, an offset table with one entry per classifier (plus the end
//! offset) and the classifier records, so a single cell can be read without
//! decoding the rest.

use std::fs::File;
use std::io::{Read, Seek, SeekFrom};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::tree::Node;
use super::{CellClassifier, DecisionTree, ForestClassifier, ForestConfig, PogEstimator};
use crate::grid::GridSpec;
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"PGRF";
pub const MODEL_VERSION: u32 = 1;
const TAG_CONSTANT: u8 = 0;
const TAG_FOREST: u8 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Header {
    spec: GridSpec,
    instances: Vec<f64>,
    classes: Vec<f64>,
    config: ForestConfig,
    seed: u64,
    n_features: usize,
    n_samples: usize,
    classifiers: usize,
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn encode(c: &CellClassifier, out: &mut Vec<u8>) {
    match c {
        CellClassifier::Constant(k) => {
            out.push(TAG_CONSTANT);
            out.push(*k);
        }
        CellClassifier::Forest(f) => {
            out.push(TAG_FOREST);
            put_u32(out, f.n_classes as u32);
            put_u32(out, f.m_try as u32);
            put_u32(out, f.trees.len() as u32);
            put_u32(out, f.in_bag.first().map_or(0, Vec::len) as u32);
            for (t, tree) in f.trees.iter().enumerate() {
                put_u32(out, tree.nodes.len() as u32);
                for n in &tree.nodes {
                    put_u32(out, n.feature);
                    out.extend_from_slice(&n.threshold.to_le_bytes());
                    put_u32(out, n.left);
                    put_u32(out, n.right);
                }
                put_u32(out, tree.leaf_counts.len() as u32);
                for &c in &tree.leaf_counts {
                    put_u32(out, c);
                }
                for w in f.in_bag.get(t).into_iter().flatten() {
                    out.extend_from_slice(&w.to_le_bytes());
                }
            }
        }
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    context: &'a str,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::format(self.context, "truncated model record"))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }
}

fn decode(bytes: &[u8], n_features: usize, context: &str) -> Result<CellClassifier> {
    let mut c = Cursor {
        bytes,
        pos: 0,
        context,
    };
    let bad = |m: &str| Error::format(context, m.to_string());
    match c.u8()? {
        TAG_CONSTANT => Ok(CellClassifier::Constant(c.u8()?)),
        TAG_FOREST => {
            let n_classes = c.u32()? as usize;
            let m_try = c.u32()? as usize;
            let n_trees = c.u32()? as usize;
            let words = c.u32()? as usize;
            let mut trees = Vec::with_capacity(n_trees);
            let mut in_bag = Vec::with_capacity(n_trees);
            for _ in 0..n_trees {
                let n_nodes = c.u32()? as usize;
                let mut nodes = Vec::with_capacity(n_nodes);
                for _ in 0..n_nodes {
                    nodes.push(Node {
                        feature: c.u32()?,
                        threshold: c.f64()?,
                        left: c.u32()?,
                        right: c.u32()?,
                    });
                }
                let n_counts = c.u32()? as usize;
                let leaf_counts = (0..n_counts).map(|_| c.u32()).collect::<Result<Vec<_>>>()?;
                for n in &nodes {
                    let ok = if n.is_leaf() {
                        (n.left as usize) < n_classes
                            && n.right as usize + n_classes <= leaf_counts.len()
                    } else {
                        (n.feature as usize) < n_features
                            && (n.left as usize) < n_nodes
                            && (n.right as usize) < n_nodes
                    };
                    if !ok {
                        return Err(bad("inconsistent tree node"));
                    }
                }
                if nodes.is_empty() {
                    return Err(bad("empty tree"));
                }
                trees.push(DecisionTree {
                    n_classes,
                    nodes,
                    leaf_counts,
                });
                if words > 0 {
                    in_bag.push((0..words).map(|_| c.u64()).collect::<Result<Vec<_>>>()?);
                }
            }
            if c.pos != bytes.len() {
                return Err(bad("trailing bytes in classifier record"));
            }
            Ok(CellClassifier::Forest(ForestClassifier {
                n_classes,
                n_features,
                m_try,
                trees,
                in_bag,
            }))
        }
        t => Err(bad(&format!("unknown classifier tag {t}"))),
    }
}

impl PogEstimator {
    pub fn to_bytes(&self) -> Vec<u8> {
        let header = Header {
            spec: self.spec,
            instances: self.instances.clone(),
            classes: self.classes.clone(),
            config: self.config.clone(),
            seed: self.seed,
            n_features: self.n_features,
            n_samples: self.n_samples,
            classifiers: self.classifiers.len(),
        };
        let header = serde_json::to_vec(&header).expect("header serializes");
        let mut records = Vec::new();
        let mut ends = Vec::with_capacity(self.classifiers.len());
        for c in &self.classifiers {
            encode(c, &mut records);
            ends.push(records.len() as u64);
        }
        let base = (4 + 4 + 8 + header.len() + 8 * (self.classifiers.len() + 1)) as u64;
        let mut out = Vec::with_capacity(base as usize + records.len());
        out.extend_from_slice(MAGIC);
        put_u32(&mut out, MODEL_VERSION);
        out.extend_from_slice(&(header.len() as u64).to_le_bytes());
        out.extend_from_slice(&header);
        out.extend_from_slice(&base.to_le_bytes());
        for e in ends {
            out.extend_from_slice(&(base + e).to_le_bytes());
        }
        out.extend_from_slice(&records);
        out
    }

    pub fn from_bytes(bytes: &[u8], context: &str) -> Result<Self> {
        let (header, offsets, _) = read_preamble(&mut std::io::Cursor::new(bytes), context)?;
        let classifiers = (0..header.classifiers)
            .map(|k| {
                let (a, b) = (offsets[k] as usize, offsets[k + 1] as usize);
                let record = bytes.get(a..b).ok_or_else(|| {
                    Error::format(context, "offset table points outside the file")
                })?;
                decode(record, header.n_features, context)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            spec: header.spec,
            instances: header.instances,
            classes: header.classes,
            config: header.config,
            seed: header.seed,
            n_features: header.n_features,
            n_samples: header.n_samples,
            classifiers,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes, &path.display().to_string())
    }
}

fn read_preamble<R: Read>(r: &mut R, context: &str) -> Result<(Header, Vec<u64>, u64)> {
    let short = |_| Error::format(context, "truncated model file");
    let mut fixed = [0u8; 16];
    r.read_exact(&mut fixed).map_err(short)?;
    if &fixed[..4] != MAGIC {
        return Err(Error::format(context, "not a model file"));
    }
    let version = u32::from_le_bytes(fixed[4..8].try_into().expect("4 bytes"));
    if version != MODEL_VERSION {
        return Err(Error::format(
            context,
            format!("unsupported model version {version}"),
        ));
    }
    let len = u64::from_le_bytes(fixed[8..16].try_into().expect("8 bytes"));
    let mut header =
        vec![0u8; usize::try_from(len).map_err(|_| Error::format(context, "bad header length"))?];
    r.read_exact(&mut header).map_err(short)?;
    let header: Header = serde_json::from_slice(&header)
        .map_err(|e| Error::format(context, format!("model header: {e}")))?;
    header
        .spec
        .validate()
        .map_err(|e| Error::format(context, e.to_string()))?;
    if header.classifiers != header.spec.cell_count() * header.instances.len() {
        return Err(Error::format(
            context,
            "classifier count does not match the grid",
        ));
    }
    let mut table = vec![0u8; 8 * (header.classifiers + 1)];
    r.read_exact(&mut table).map_err(short)?;
    let offsets: Vec<u64> = table
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    if offsets.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::format(context, "offset table is not ascending"));
    }
    let base = 16 + len + table.len() as u64;
    Ok((header, offsets, base))
}

/// Reads single classifiers from a model file on demand.
pub struct ModelReader {
    file: File,
    context: String,
    header: Header,
    offsets: Vec<u64>,
}

impl ModelReader {
    pub fn open(path: &Path) -> Result<Self> {
        let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
        let context = path.display().to_string();
        let (header, offsets, base) = read_preamble(&mut file, &context)?;
        if offsets[0] != base {
            return Err(Error::format(
                &context,
                "offset table does not start at the records",
            ));
        }
        Ok(Self {
            file,
            context,
            header,
            offsets,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.header.spec
    }

    pub fn instances(&self) -> &[f64] {
        &self.header.instances
    }

    pub fn classes(&self) -> &[f64] {
        &self.header.classes
    }

    pub fn classifier(&mut self, instance: usize, cell: usize) -> Result<CellClassifier> {
        let cells = self.header.spec.cell_count();
        if instance >= self.header.instances.len() || cell >= cells {
            return Err(Error::InvalidParameter(format!(
                "no classifier for instance {instance}, cell {cell}"
            )));
        }
        let k = instance * cells + cell;
        let (a, b) = (self.offsets[k], self.offsets[k + 1]);
        let mut record = vec![0u8; (b - a) as usize];
        self.file
            .seek(SeekFrom::Start(a))
            .and_then(|_| self.file.read_exact(&mut record))
            .map_err(|_| Error::format(&self.context, "truncated classifier record"))?;
        decode(&record, self.header.n_features, &self.context)
    }
}
