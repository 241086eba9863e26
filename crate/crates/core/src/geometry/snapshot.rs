//! Snapshot container: one binary file per time level plus a JSON sidecar.
//!
//! Binary layout, little endian:
//!
//! ```text
//! magic      8 bytes  "AXSNAP01"
//! n_rho      u64
//! n_z        u64
//! h_rho      f64
//! h_z        f64
//! rho_max    f64
//! z_min      f64
//! z_max      f64
//! time       f64
//! n_kinds    u32
//! kinds      n_kinds x u8   (FieldKind::code)
//! data       n_kinds x (n_rho+1)(n_z+1) x f64, row-major in (i_rho, i_z)
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{CylGrid, Field, FieldKind, GeometryError};

pub const MAGIC: &[u8; 8] = b"AXSNAP01";
pub const SIDECAR: &str = "run.json";

/// All fields at one time level.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub fields: BTreeMap<FieldKind, Array2<f64>>,
}

impl Snapshot {
    pub fn new(time: f64) -> Self {
        Self { time, fields: BTreeMap::new() }
    }

    pub fn with(mut self, kind: FieldKind, values: Array2<f64>) -> Self {
        self.fields.insert(kind, values);
        self
    }

    pub fn get(&self, kind: FieldKind) -> Option<&Array2<f64>> {
        self.fields.get(&kind)
    }

    pub fn require(&self, kind: FieldKind) -> Result<&Array2<f64>, GeometryError> {
        self.get(kind).ok_or(GeometryError::MissingField { kind, time: self.time })
    }

    pub fn field(&self, grid: &Arc<CylGrid>, kind: FieldKind) -> Result<Field, GeometryError> {
        Field::new(grid.clone(), kind, self.time, self.require(kind)?.clone())
    }

    /// `|v|` from the three velocity components.
    pub fn speed(&self) -> Result<Array2<f64>, GeometryError> {
        let (a, b, c) = (
            self.require(FieldKind::VRho)?,
            self.require(FieldKind::VPhi)?,
            self.require(FieldKind::V3)?,
        );
        let mut out = Array2::zeros(a.dim());
        ndarray::Zip::from(&mut out)
            .and(a)
            .and(b)
            .and(c)
            .for_each(|o, &x, &y, &z| *o = (x * x + y * y + z * z).sqrt());
        Ok(out)
    }
}

/// Time-ordered snapshots on one grid.
#[derive(Clone, Debug)]
pub struct SnapshotSeries {
    pub grid: Arc<CylGrid>,
    pub snapshots: Vec<Snapshot>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SidecarEntry {
    pub file: String,
    pub time: f64,
    pub kinds: Vec<FieldKind>,
}

/// The plain-text description of a stored run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Sidecar {
    pub grid: CylGrid,
    pub snapshots: Vec<SidecarEntry>,
    #[serde(default)]
    pub meta: serde_json::Value,
}

impl SnapshotSeries {
    pub fn new(grid: Arc<CylGrid>, mut snapshots: Vec<Snapshot>) -> Result<Self, GeometryError> {
        snapshots.sort_by(|a, b| a.time.total_cmp(&b.time));
        for s in &snapshots {
            for v in s.fields.values() {
                if v.dim() != grid.shape() {
                    return Err(GeometryError::ShapeMismatch { expected: grid.shape(), found: v.dim() });
                }
            }
        }
        Ok(Self { grid, snapshots })
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time).collect()
    }

    pub fn first(&self) -> Result<&Snapshot, GeometryError> {
        self.snapshots.first().ok_or_else(|| GeometryError::OutsideDomain("empty snapshot series".into()))
    }

    pub fn last(&self) -> Result<&Snapshot, GeometryError> {
        self.snapshots.last().ok_or_else(|| GeometryError::OutsideDomain("empty snapshot series".into()))
    }

    /// The arrays of one kind, in time order.
    pub fn kind(&self, kind: FieldKind) -> Result<Vec<Array2<f64>>, GeometryError> {
        self.snapshots.iter().map(|s| s.require(kind).cloned()).collect()
    }

    pub fn speeds(&self) -> Result<Vec<Array2<f64>>, GeometryError> {
        self.snapshots.iter().map(Snapshot::speed).collect()
    }

    /// Copy with every velocity component multiplied by `factor`.
    pub fn scale_velocity(&self, factor: f64) -> Self {
        let snapshots = self
            .snapshots
            .iter()
            .map(|s| {
                let mut s = s.clone();
                for k in [FieldKind::VRho, FieldKind::VPhi, FieldKind::V3] {
                    if let Some(v) = s.fields.get_mut(&k) {
                        v.mapv_inplace(|x| x * factor);
                    }
                }
                s
            })
            .collect();
        Self { grid: self.grid.clone(), snapshots }
    }

    /// Writes `snap_NNNNNN.bin` files and the JSON sidecar into `dir`.
    pub fn save_dir(&self, dir: &Path, meta: serde_json::Value) -> Result<PathBuf, GeometryError> {
        fs::create_dir_all(dir)?;
        let mut entries = Vec::with_capacity(self.snapshots.len());
        for (k, s) in self.snapshots.iter().enumerate() {
            let file = format!("snap_{k:06}.bin");
            write_snapshot(&dir.join(&file), &self.grid, s)?;
            entries.push(SidecarEntry { file, time: s.time, kinds: s.fields.keys().copied().collect() });
        }
        let sidecar = Sidecar { grid: (*self.grid).clone(), snapshots: entries, meta };
        let path = dir.join(SIDECAR);
        fs::write(&path, serde_json::to_string_pretty(&sidecar)?)?;
        Ok(path)
    }

    pub fn load_dir(dir: &Path) -> Result<(Self, Sidecar), GeometryError> {
        let text = fs::read_to_string(dir.join(SIDECAR))?;
        let sidecar: Sidecar = serde_json::from_str(&text)?;
        let grid = Arc::new(sidecar.grid.clone());
        let mut snaps = Vec::with_capacity(sidecar.snapshots.len());
        for e in &sidecar.snapshots {
            let (g, s) = read_snapshot(&dir.join(&e.file))?;
            if !g.same_space(&grid) {
                return Err(GeometryError::Format(format!("{} does not match the sidecar grid", e.file)));
            }
            snaps.push(s);
        }
        Ok((Self::new(grid, snaps)?, sidecar))
    }
}

pub fn encode_snapshot(grid: &CylGrid, snap: &Snapshot) -> Vec<u8> {
    let n = grid.shape().0 * grid.shape().1;
    let mut buf = Vec::with_capacity(80 + snap.fields.len() * (1 + 8 * n));
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(grid.n_rho as u64).to_le_bytes());
    buf.extend_from_slice(&(grid.n_z as u64).to_le_bytes());
    for x in [grid.h_rho, grid.h_z, grid.rho_max, grid.z_min, grid.z_max, snap.time] {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    buf.extend_from_slice(&(snap.fields.len() as u32).to_le_bytes());
    buf.extend(snap.fields.keys().map(|k| k.code()));
    for v in snap.fields.values() {
        for x in v.iter() {
            buf.extend_from_slice(&x.to_le_bytes());
        }
    }
    buf
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], GeometryError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| GeometryError::Format("truncated snapshot".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64, GeometryError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, GeometryError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn decode_snapshot(buf: &[u8]) -> Result<(CylGrid, Snapshot), GeometryError> {
    let mut c = Cursor { buf, pos: 0 };
    if c.take(8)? != MAGIC {
        return Err(GeometryError::Format("bad magic".into()));
    }
    let n_rho = c.u64()? as usize;
    let n_z = c.u64()? as usize;
    let (h_rho, h_z, rho_max, z_min, z_max, time) = (c.f64()?, c.f64()?, c.f64()?, c.f64()?, c.f64()?, c.f64()?);
    let n_kinds = u32::from_le_bytes(c.take(4)?.try_into().unwrap()) as usize;
    let codes = c.take(n_kinds)?.to_vec();
    let grid = CylGrid { rho_max, z_min, z_max, n_rho, n_z, h_rho, h_z, dt: 0.0, t_start: 0.0, t_end: 0.0 };
    let shape = grid.shape();
    let mut snap = Snapshot::new(time);
    for code in codes {
        let kind = FieldKind::from_code(code).ok_or_else(|| GeometryError::Format(format!("unknown kind code {code}")))?;
        let raw = c.take(8 * shape.0 * shape.1)?;
        let data: Vec<f64> = raw.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect();
        snap.fields.insert(kind, Array2::from_shape_vec(shape, data).expect("length checked"));
    }
    if c.pos != buf.len() {
        return Err(GeometryError::Format("trailing bytes after snapshot".into()));
    }
    Ok((grid, snap))
}

pub fn write_snapshot(path: &Path, grid: &CylGrid, snap: &Snapshot) -> Result<(), GeometryError> {
    let mut f = fs::File::create(path)?;
    f.write_all(&encode_snapshot(grid, snap))?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<(CylGrid, Snapshot), GeometryError> {
    let mut buf = Vec::new();
    fs::File::open(path)?.read_to_end(&mut buf)?;
    decode_snapshot(&buf)
}
