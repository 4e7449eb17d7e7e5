//! Grid files. The text variant is a small header followed by one line per
//! grid row; the binary variant stores the same content little-endian after
//! the `PGRD` magic. Both round-trip exactly and `from_bytes` accepts either.

use std::fmt::Write as _;
use std::path::Path;

use super::{AugmentedOccupancyGrid, GridSpec, PredictedOccupancyGrid, AOG_CHANNELS};
use crate::{Error, Result};

pub const GRID_TEXT_MAGIC: &str = "pogrid-grid";
const BINARY_MAGIC: &[u8; 4] = b"PGRD";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Aog,
    Pog,
    Mask,
}

impl GridKind {
    fn name(self) -> &'static str {
        match self {
            GridKind::Aog => "aog",
            GridKind::Pog => "pog",
            GridKind::Mask => "mask",
        }
    }

    fn channels(self) -> &'static [&'static str] {
        match self {
            GridKind::Aog => &["occupancy", "v", "psi", "ax", "ay"],
            GridKind::Pog => &["p"],
            GridKind::Mask => &["road_limit"],
        }
    }

    fn code(self) -> u8 {
        match self {
            GridKind::Aog => 0,
            GridKind::Pog => 1,
            GridKind::Mask => 2,
        }
    }

    fn from_code(code: u8) -> Option<Self> {
        [GridKind::Aog, GridKind::Pog, GridKind::Mask]
            .into_iter()
            .find(|k| k.code() == code)
    }

    fn from_name(name: &str) -> Option<Self> {
        [GridKind::Aog, GridKind::Pog, GridKind::Mask]
            .into_iter()
            .find(|k| k.name() == name)
    }
}

/// Contents of one grid file; `values` is row-major, channels innermost.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFile {
    pub kind: GridKind,
    pub spec: GridSpec,
    pub t_pred: Option<f64>,
    pub values: Vec<f64>,
}

impl GridFile {
    fn checked(self, context: &str) -> Result<Self> {
        self.spec
            .validate()
            .map_err(|e| Error::format(context, e.to_string()))?;
        let expected = self.spec.cell_count() * self.kind.channels().len();
        if self.values.len() != expected {
            return Err(Error::format(
                context,
                format!("expected {expected} values, found {}", self.values.len()),
            ));
        }
        if (self.kind == GridKind::Pog) != self.t_pred.is_some() {
            return Err(Error::format(
                context,
                "prediction time is required exactly for pog grids",
            ));
        }
        Ok(self)
    }

    pub fn to_text(&self) -> String {
        let s = &self.spec;
        let mut out = String::new();
        let _ = writeln!(out, "{GRID_TEXT_MAGIC} {VERSION}");
        let _ = writeln!(out, "kind {}", self.kind.name());
        let _ = writeln!(out, "origin {} {}", s.origin[0], s.origin[1]);
        let _ = writeln!(out, "cell {} {}", s.cell_length, s.cell_width);
        let _ = writeln!(out, "size {} {}", s.cols, s.rows);
        if let Some(t) = self.t_pred {
            let _ = writeln!(out, "t_pred {t}");
        }
        let _ = writeln!(out, "channels {}", self.kind.channels().join(" "));
        let per_row = s.cols * self.kind.channels().len();
        for row in self.values.chunks(per_row) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str, context: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let mut header = |key: &str| -> Result<Vec<&str>> {
            let (n, line) = lines
                .next()
                .ok_or_else(|| Error::format(context, format!("missing '{key}' line")))?;
            let mut parts = line.split_whitespace();
            if parts.next() != Some(key) {
                return Err(Error::format(
                    context,
                    format!("line {}: expected '{key}'", n + 1),
                ));
            }
            Ok(parts.collect())
        };
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::format(context, format!("bad number '{s}'")))
        };
        let int = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .map_err(|_| Error::format(context, format!("bad integer '{s}'")))
        };

        let version = header(GRID_TEXT_MAGIC)?;
        if version != [VERSION.to_string().as_str()] {
            return Err(Error::format(
                context,
                format!("unsupported version {version:?}"),
            ));
        }
        let kind = header("kind")?;
        let kind = kind
            .first()
            .and_then(|k| GridKind::from_name(k))
            .ok_or_else(|| Error::format(context, format!("unknown grid kind {kind:?}")))?;
        let pair = |v: Vec<&str>, what: &str| -> Result<(String, String)> {
            match v.as_slice() {
                [a, b] => Ok((a.to_string(), b.to_string())),
                _ => Err(Error::format(context, format!("'{what}' needs two values"))),
            }
        };
        let (ox, oy) = pair(header("origin")?, "origin")?;
        let (cl, cw) = pair(header("cell")?, "cell")?;
        let (ci, cj) = pair(header("size")?, "size")?;
        let spec = GridSpec {
            origin: [num(&ox)?, num(&oy)?],
            cell_length: num(&cl)?,
            cell_width: num(&cw)?,
            cols: int(&ci)?,
            rows: int(&cj)?,
        };
        let t_pred = if kind == GridKind::Pog {
            match header("t_pred")?.as_slice() {
                [t] => Some(num(t)?),
                _ => return Err(Error::format(context, "'t_pred' needs one value")),
            }
        } else {
            None
        };
        let channels = header("channels")?;
        if channels != kind.channels() {
            return Err(Error::format(
                context,
                format!("channels {channels:?} do not match kind {}", kind.name()),
            ));
        }
        let mut values = Vec::new();
        for (_, line) in lines {
            for tok in line.split_whitespace() {
                values.push(num(tok)?);
            }
        }
        GridFile {
            kind,
            spec,
            t_pred,
            values,
        }
        .checked(context)
    }

    pub fn to_binary(&self) -> Vec<u8> {
        let s = &self.spec;
        let mut out = Vec::with_capacity(64 + 8 * self.values.len());
        out.extend_from_slice(BINARY_MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(self.kind.code());
        out.push(u8::from(self.t_pred.is_some()));
        for v in [
            s.origin[0],
            s.origin[1],
            s.cell_length,
            s.cell_width,
            self.t_pred.unwrap_or(0.0),
        ] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&(s.cols as u64).to_le_bytes());
        out.extend_from_slice(&(s.rows as u64).to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_binary(bytes: &[u8], context: &str) -> Result<Self> {
        let mut r = Reader {
            bytes,
            pos: 0,
            context,
        };
        if r.take(4)? != BINARY_MAGIC {
            return Err(Error::format(context, "not a binary grid file"));
        }
        let version = u32::from_le_bytes(r.array()?);
        if version != VERSION {
            return Err(Error::format(
                context,
                format!("unsupported version {version}"),
            ));
        }
        let kind = r.take(1)?[0];
        let kind = GridKind::from_code(kind)
            .ok_or_else(|| Error::format(context, format!("unknown grid kind {kind}")))?;
        let has_t = r.take(1)?[0] != 0;
        let mut f = [0.0; 5];
        for v in &mut f {
            *v = f64::from_le_bytes(r.array()?);
        }
        let cols = u64::from_le_bytes(r.array()?) as usize;
        let rows = u64::from_le_bytes(r.array()?) as usize;
        let rest = &bytes[r.pos..];
        if !rest.len().is_multiple_of(8) {
            return Err(Error::format(context, "truncated payload"));
        }
        let values = rest
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        GridFile {
            kind,
            spec: GridSpec {
                origin: [f[0], f[1]],
                cell_length: f[2],
                cell_width: f[3],
                cols,
                rows,
            },
            t_pred: has_t.then_some(f[4]),
            values,
        }
        .checked(context)
    }

    /// Parses either variant, telling them apart by the binary magic.
    pub fn from_bytes(bytes: &[u8], context: &str) -> Result<Self> {
        if bytes.starts_with(BINARY_MAGIC) {
            Self::from_binary(bytes, context)
        } else {
            let text = std::str::from_utf8(bytes)
                .map_err(|_| Error::format(context, "neither binary nor UTF-8 text"))?;
            Self::from_text(text, context)
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes, &path.display().to_string())
    }

    pub fn save(&self, path: &Path, binary: bool) -> Result<()> {
        let bytes = if binary {
            self.to_binary()
        } else {
            self.to_text().into_bytes()
        };
        std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
    }

    pub fn into_aog(self) -> Result<AugmentedOccupancyGrid> {
        self.expect(GridKind::Aog)?;
        Ok(AugmentedOccupancyGrid {
            spec: self.spec,
            values: self.values,
        })
    }

    pub fn into_pog(self) -> Result<PredictedOccupancyGrid> {
        self.expect(GridKind::Pog)?;
        PredictedOccupancyGrid::new(self.spec, self.t_pred.unwrap_or_default(), self.values)
    }

    pub fn into_mask(self) -> Result<Vec<bool>> {
        self.expect(GridKind::Mask)?;
        Ok(self.values.iter().map(|&v| v != 0.0).collect())
    }

    fn expect(&self, kind: GridKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "expected a {} grid, found {}",
                kind.name(),
                self.kind.name()
            )))
        }
    }
}

impl From<&AugmentedOccupancyGrid> for GridFile {
    fn from(g: &AugmentedOccupancyGrid) -> Self {
        debug_assert_eq!(g.values.len(), AOG_CHANNELS * g.spec.cell_count());
        GridFile {
            kind: GridKind::Aog,
            spec: g.spec,
            t_pred: None,
            values: g.values.clone(),
        }
    }
}

impl From<&PredictedOccupancyGrid> for GridFile {
    fn from(g: &PredictedOccupancyGrid) -> Self {
        GridFile {
            kind: GridKind::Pog,
            spec: g.spec,
            t_pred: Some(g.t_pred),
            values: g.values.clone(),
        }
    }
}

impl GridFile {
    pub fn mask(spec: GridSpec, mask: &[bool]) -> Self {
        GridFile {
            kind: GridKind::Mask,
            spec,
            t_pred: None,
            values: mask.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect(),
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    context: &'a str,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        let out = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::format(self.context, "truncated header"))?;
        self.pos = end;
        Ok(out)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("slice of N bytes"))
    }
}
