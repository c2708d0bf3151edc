//! Training sets of `(c, s, d)` rows and their CSV + descriptor persistence.
//!
//! The CSV holds exactly 48 numeric columns `c1..c6,s1..s6,d1..d36` with
//! shortest round-trip float formatting. Provenance lives in a sidecar
//! descriptor (`<basename>.desc`) of `key=value` lines.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mech::{
    compose_f, right_cauchy_green, AppliedStretch, HyperelasticLaw, NeoHookeParams, Oracle, TangentVoigt,
    TransIsoParams, VoigtStrain, VoigtStress,
};
use crate::sampling::{HypercubeDesign, LhsDesign};

/// Width of the GP output vector: 6 stress + 36 tangent components.
pub const OUTPUT_WIDTH: usize = 42;
pub const SCHEMA_VERSION: u32 = 1;
const N_COLUMNS: usize = 48;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub c: VoigtStrain,
    pub s: VoigtStress,
    pub d: TangentVoigt,
}

impl Sample {
    /// The concatenated `(s, d)` output.
    pub fn target(&self) -> [f64; OUTPUT_WIDTH] {
        let mut y = [0.0; OUTPUT_WIDTH];
        y[..6].copy_from_slice(&self.s.0);
        y[6..].copy_from_slice(&self.d.0);
        y
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DesignTag {
    Hypercube { layers: usize },
    Lhs { seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DatasetMeta {
    pub oracle: Oracle,
    pub delta_t: f64,
    pub design: DesignTag,
    pub schema: u32,
}

impl DatasetMeta {
    /// Layer spacing of a hypercube design; `None` for LHS sets.
    pub fn layer_spacing(&self) -> Option<f64> {
        match self.design {
            DesignTag::Hypercube { layers } => Some(self.delta_t / layers as f64),
            DesignTag::Lhs { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingSet {
    pub rows: Vec<Sample>,
    pub meta: DatasetMeta,
}

impl TrainingSet {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn inputs(&self) -> Vec<[f64; 6]> {
        self.rows.iter().map(|r| r.c.0).collect()
    }
}

/// Anything that can be pushed through an oracle to make a training set.
pub trait Design {
    fn points(&self) -> &[AppliedStretch];
    fn delta_t(&self) -> f64;
    fn tag(&self) -> DesignTag;
}

impl Design for HypercubeDesign {
    fn points(&self) -> &[AppliedStretch] {
        &self.points
    }
    fn delta_t(&self) -> f64 {
        self.delta_t
    }
    fn tag(&self) -> DesignTag {
        DesignTag::Hypercube { layers: self.layers }
    }
}

impl Design for LhsDesign {
    fn points(&self) -> &[AppliedStretch] {
        &self.points
    }
    fn delta_t(&self) -> f64 {
        self.delta_t
    }
    fn tag(&self) -> DesignTag {
        DesignTag::Lhs { seed: self.seed }
    }
}

/// Evaluates `oracle` at every design point. Rows keep design order.
pub fn build_training_set(design: &impl Design, oracle: &Oracle) -> Result<TrainingSet> {
    let points = design.points();
    if points.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let evaluated: Vec<Result<Sample>> = points
        .par_iter()
        .map(|p| {
            let c = right_cauchy_green(&compose_f(p))?;
            let (s, d) = oracle.response(&c)?;
            Ok(Sample { c, s, d })
        })
        .collect();
    let mut rows = Vec::with_capacity(evaluated.len());
    for (index, r) in evaluated.into_iter().enumerate() {
        rows.push(r.map_err(|e| Error::AtDesignPoint {
            index,
            source: Box::new(e),
        })?);
    }
    Ok(TrainingSet {
        rows,
        meta: DatasetMeta {
            oracle: *oracle,
            delta_t: design.delta_t(),
            design: design.tag(),
            schema: SCHEMA_VERSION,
        },
    })
}

pub fn descriptor_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("desc")
}

fn header() -> Vec<String> {
    (1..=6)
        .map(|i| format!("c{i}"))
        .chain((1..=6).map(|i| format!("s{i}")))
        .chain((1..=36).map(|i| format!("d{i}")))
        .collect()
}

fn descriptor_text(meta: &DatasetMeta) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "schema={}", meta.schema);
    let _ = writeln!(out, "oracle={}", meta.oracle.name());
    match meta.oracle {
        Oracle::TransIso(p) => {
            let _ = writeln!(out, "mu={}", p.mu);
            let _ = writeln!(out, "beta={}", p.beta);
            let _ = writeln!(out, "gamma={}", p.gamma);
            let _ = writeln!(out, "a0={},{},{}", p.a0[0], p.a0[1], p.a0[2]);
        }
        Oracle::NeoHooke(p) => {
            let _ = writeln!(out, "mu={}", p.mu);
            let _ = writeln!(out, "beta={}", p.beta);
            let _ = writeln!(out, "nu={}", p.nu);
        }
    }
    let _ = writeln!(out, "delta_T={}", meta.delta_t);
    match meta.design {
        DesignTag::Hypercube { layers } => {
            let _ = writeln!(out, "n_h={layers}");
        }
        DesignTag::Lhs { seed } => {
            let _ = writeln!(out, "lhs_seed={seed}");
        }
    }
    out
}

fn parse_descriptor(text: &str) -> Result<DatasetMeta> {
    let mut map = std::collections::HashMap::new();
    for line in text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
    {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::SchemaMismatch(format!("descriptor line without `=`: {line}")))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    let get = |key: &str| {
        map.get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::SchemaMismatch(format!("descriptor is missing `{key}`")))
    };
    let num = |key: &str| -> Result<f64> {
        get(key)?
            .parse::<f64>()
            .map_err(|_| Error::SchemaMismatch(format!("descriptor `{key}` is not a number")))
    };
    let schema: u32 = get("schema")?
        .parse()
        .map_err(|_| Error::SchemaMismatch("descriptor schema is not an integer".into()))?;
    if schema != SCHEMA_VERSION {
        return Err(Error::SchemaMismatch(format!(
            "descriptor schema {schema}, expected {SCHEMA_VERSION}"
        )));
    }
    let oracle = match get("oracle")? {
        "trans-iso" => {
            let a0: Vec<f64> = get("a0")?
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::SchemaMismatch("descriptor `a0` is malformed".into()))?;
            let a0: [f64; 3] = a0
                .try_into()
                .map_err(|_| Error::SchemaMismatch("descriptor `a0` needs 3 components".into()))?;
            Oracle::TransIso(TransIsoParams::new(num("mu")?, num("beta")?, num("gamma")?, a0)?)
        }
        "neo-hooke" => Oracle::NeoHooke(NeoHookeParams::new(num("mu")?, num("nu")?)?),
        other => return Err(Error::SchemaMismatch(format!("unknown oracle `{other}`"))),
    };
    let design = if map.contains_key("n_h") {
        DesignTag::Hypercube {
            layers: get("n_h")?
                .parse()
                .map_err(|_| Error::SchemaMismatch("descriptor `n_h` is not an integer".into()))?,
        }
    } else {
        DesignTag::Lhs {
            seed: get("lhs_seed")?
                .parse()
                .map_err(|_| Error::SchemaMismatch("descriptor `lhs_seed` is not an integer".into()))?,
        }
    };
    Ok(DatasetMeta {
        oracle,
        delta_t: num("delta_T")?,
        design,
        schema,
    })
}

/// Writes the CSV and its descriptor. Output is a pure function of `ts`.
pub fn save_csv(ts: &TrainingSet, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(header()).map_err(|e| csv_error(path, e))?;
    let mut record = Vec::with_capacity(N_COLUMNS);
    for row in &ts.rows {
        record.clear();
        record.extend(row.c.0.iter().chain(&row.s.0).chain(&row.d.0).map(|v| format!("{v:e}")));
        w.write_record(&record).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    let desc = descriptor_path(path);
    fs::write(&desc, descriptor_text(&ts.meta)).map_err(|e| Error::io(desc, e))
}

pub fn load_csv(path: &Path) -> Result<TrainingSet> {
    let desc = descriptor_path(path);
    let meta = parse_descriptor(&fs::read_to_string(&desc).map_err(|e| Error::io(&desc, e))?)?;
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let found: Vec<String> = r
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    if found != header() {
        return Err(Error::SchemaMismatch(format!(
            "{}: expected header c1..c6,s1..s6,d1..d36, found {} columns starting `{}`",
            path.display(),
            found.len(),
            found.first().map(String::as_str).unwrap_or("")
        )));
    }
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        if rec.len() != N_COLUMNS {
            return Err(Error::SchemaMismatch(format!("row {i} has {} columns", rec.len())));
        }
        let mut vals = [0.0; N_COLUMNS];
        for (v, field) in vals.iter_mut().zip(rec.iter()) {
            *v = field
                .trim()
                .parse()
                .map_err(|_| Error::SchemaMismatch(format!("row {i}: `{field}` is not a number")))?;
        }
        let mut c = [0.0; 6];
        let mut s = [0.0; 6];
        let mut d = [0.0; 36];
        c.copy_from_slice(&vals[..6]);
        s.copy_from_slice(&vals[6..12]);
        d.copy_from_slice(&vals[12..]);
        if !seen.insert(c.map(f64::to_bits)) {
            let first = rows.iter().position(|r: &Sample| r.c.0 == c).unwrap_or(0);
            return Err(Error::DuplicateInputs(first, i));
        }
        rows.push(Sample {
            c: VoigtStrain(c),
            s: VoigtStress(s),
            d: TangentVoigt(d),
        });
    }
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(TrainingSet { rows, meta })
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!(),
        }
    } else {
        Error::SchemaMismatch(format!("{}: {e}", path.display()))
    }
}
