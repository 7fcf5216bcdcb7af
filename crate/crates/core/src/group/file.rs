//! Finite-group definition files.
//!
//! A group file is TOML:
//!
//! ```toml
//! name = "Z4"
//! order = 4
//! elements = ["0", "1", "2", "3"]        # labels; position = element index
//! mul = [[0, 1, 2, 3], [1, 2, 3, 0],     # mul[a][b] = index of a*b
//!        [2, 3, 0, 1], [3, 0, 1, 2]]
//! fundamental = "p1"                     # irrep carried by matter
//!
//! [[irreps]]
//! label = "p0"
//! dim = 1
//! # one dim x dim matrix per element, each entry a [re, im] pair
//! matrices = [[[[1.0, 0.0]]], [[[1.0, 0.0]]], [[[1.0, 0.0]]], [[[1.0, 0.0]]]]
//! ```
//!
//! Irreps must be given explicitly; they are never derived from the table.
//! Identity, inverses and conjugacy classes are derived from `mul`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GroupCatalogEntry, GroupKind, GroupSpec, Irrep, IrrepKind};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupFile {
    pub name: String,
    pub order: usize,
    pub elements: Vec<String>,
    pub mul: Vec<Vec<usize>>,
    pub fundamental: String,
    pub irreps: Vec<IrrepFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IrrepFile {
    pub label: String,
    pub dim: usize,
    pub matrices: Vec<Vec<Vec<[f64; 2]>>>,
}

impl GroupFile {
    pub fn into_entry(self) -> Result<GroupCatalogEntry> {
        if self.order != self.mul.len() {
            return Err(Error::Parse(format!(
                "order {} does not match a {}-row multiplication table",
                self.order,
                self.mul.len()
            )));
        }
        let spec = GroupSpec::from_table(self.name.clone(), self.mul, self.elements)?;
        let mut irreps = Vec::with_capacity(self.irreps.len());
        for ir in self.irreps {
            if ir.matrices.len() != self.order {
                return Err(Error::Parse(format!(
                    "irrep `{}` has {} matrices for {} elements",
                    ir.label,
                    ir.matrices.len(),
                    self.order
                )));
            }
            let mut mats = Vec::with_capacity(self.order);
            for rows in &ir.matrices {
                if rows.len() != ir.dim || rows.iter().any(|r| r.len() != ir.dim) {
                    return Err(Error::Parse(format!("irrep `{}` matrix is not {}x{}", ir.label, ir.dim, ir.dim)));
                }
                mats.push(CMatrix::from_fn(ir.dim, ir.dim, |i, j| c(rows[i][j][0], rows[i][j][1])));
            }
            irreps.push(Irrep {
                label: ir.label,
                dim: ir.dim,
                kind: IrrepKind::Finite,
                matrices: mats,
                generators: Vec::new(),
                casimir: None,
            });
        }
        let fundamental = irreps
            .iter()
            .position(|r| r.label == self.fundamental)
            .ok_or_else(|| Error::UnknownIrrep(self.fundamental.clone()))?;
        Ok(GroupCatalogEntry {
            name: self.name,
            group: GroupKind::Finite(spec),
            irreps,
            fundamental,
        })
    }

    pub fn from_entry(entry: &GroupCatalogEntry) -> Result<Self> {
        let g = entry.require_finite("group file export")?;
        Ok(Self {
            name: entry.name.clone(),
            order: g.order,
            elements: g.element_labels.clone(),
            mul: g.mul.clone(),
            fundamental: entry.irreps[entry.fundamental].label.clone(),
            irreps: entry
                .irreps
                .iter()
                .map(|r| IrrepFile {
                    label: r.label.clone(),
                    dim: r.dim,
                    matrices: r
                        .matrices
                        .iter()
                        .map(|m| {
                            (0..r.dim)
                                .map(|i| (0..r.dim).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                                .collect()
                        })
                        .collect(),
                })
                .collect(),
        })
    }
}

pub fn parse_group_toml(text: &str) -> Result<GroupCatalogEntry> {
    let file: GroupFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.into_entry()
}

pub fn load_group_file(path: impl AsRef<Path>) -> Result<GroupCatalogEntry> {
    let text = std::fs::read_to_string(path)?;
    parse_group_toml(&text)
}

pub fn to_toml(entry: &GroupCatalogEntry) -> Result<String> {
    toml::to_string(&GroupFile::from_entry(entry)?).map_err(|e| Error::Parse(e.to_string()))
}
