//! Material and atom presets, loaded from a versioned data file shipped with
//! the repository.

use super::SlidingError;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;

const EMBEDDED: &str = include_str!("../../data/materials.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaterialKind {
    Au,
    NSi,
}

impl MaterialKind {
    pub fn key(&self) -> &'static str {
        match self {
            MaterialKind::Au => "au",
            MaterialKind::NSi => "nsi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomKind {
    Rb,
    NvLow,
    NvHigh,
}

impl AtomKind {
    pub fn key(&self) -> &'static str {
        match self {
            AtomKind::Rb => "rb",
            AtomKind::NvLow => "nv_low",
            AtomKind::NvHigh => "nv_high",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct MaterialEntry {
    pub omega_s_rad_per_s: f64,
    pub gamma_tilde: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct GeometryEntry {
    pub d_min_nm: f64,
    pub d_max_nm: f64,
}

/// Parsed preset table.
#[derive(Debug, Clone, Deserialize)]
pub struct MaterialTable {
    pub version: u32,
    pub materials: BTreeMap<String, MaterialEntry>,
    pub atoms: BTreeMap<String, BTreeMap<String, f64>>,
    pub geometry: GeometryEntry,
}

impl MaterialTable {
    /// The table shipped with the crate.
    pub fn embedded() -> Result<Self, SlidingError> {
        Self::parse(EMBEDDED)
    }

    pub fn from_path(path: &Path) -> Result<Self, SlidingError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SlidingError::MaterialData(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, SlidingError> {
        let table: MaterialTable =
            toml::from_str(text).map_err(|e| SlidingError::MaterialData(e.to_string()))?;
        if table.version != 1 {
            return Err(SlidingError::MaterialData(format!(
                "unsupported data version {}",
                table.version
            )));
        }
        Ok(table)
    }

    pub fn material(&self, kind: MaterialKind) -> Result<&MaterialEntry, SlidingError> {
        self.materials
            .get(kind.key())
            .ok_or_else(|| SlidingError::MaterialData(format!("missing material {:?}", kind)))
    }

    /// Atom frequency ratio `w0/w_s` for the atom/material combination.
    pub fn omega0_tilde(&self, atom: AtomKind, mat: MaterialKind) -> Result<f64, SlidingError> {
        self.atoms
            .get(atom.key())
            .and_then(|m| m.get(mat.key()))
            .copied()
            .ok_or_else(|| {
                SlidingError::MaterialData(format!("missing atom preset {:?}/{:?}", atom, mat))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_table_has_expected_values() {
        let t = MaterialTable::embedded().unwrap();
        assert_eq!(t.version, 1);
        let au = t.material(MaterialKind::Au).unwrap();
        assert_eq!(au.omega_s_rad_per_s, 9.7e15);
        assert_eq!(au.gamma_tilde, 0.003);
        let nsi = t.material(MaterialKind::NSi).unwrap();
        assert_eq!(nsi.omega_s_rad_per_s, 2.47e14);
        assert_eq!(nsi.gamma_tilde, 1.0);
        assert_eq!(t.omega0_tilde(AtomKind::Rb, MaterialKind::NSi).unwrap(), 8.0);
        assert_eq!(t.omega0_tilde(AtomKind::Rb, MaterialKind::Au).unwrap(), 0.2);
        assert_eq!(t.omega0_tilde(AtomKind::NvHigh, MaterialKind::NSi).unwrap(), 0.2);
        assert_eq!(t.omega0_tilde(AtomKind::NvLow, MaterialKind::NSi).unwrap(), 4.0e-4);
        assert_eq!(t.geometry.d_min_nm, 1.0);
        assert_eq!(t.geometry.d_max_nm, 5.0);
    }
}
