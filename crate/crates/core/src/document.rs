//! JSON interchange for braces and enumeration corpora.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::abelian::{AbelianGroup, Elem};
use crate::brace::{verify_gamma, Brace, GammaFunction, GammaVerdict};
use crate::enumeration::{Enumeration, EnumerationMode, Method};
use crate::error::{Error, Result};
use crate::finite_ring::RingAction;
use crate::module::{matrix_of_table, Linearity, ModuleMap, ModuleShape};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModuleDoc {
    Shape(ModuleShape),
    Group(AbelianGroup),
}

impl ModuleDoc {
    pub fn group(&self) -> &AbelianGroup {
        match self {
            ModuleDoc::Shape(s) => s.group(),
            ModuleDoc::Group(g) => g,
        }
    }

    pub fn shape(&self) -> Option<&ModuleShape> {
        match self {
            ModuleDoc::Shape(s) => Some(s),
            ModuleDoc::Group(_) => None,
        }
    }
}

/// A registry entry: a matrix over `D` (or over `Z`, in the coordinates of
/// the underlying cyclic decomposition), or a bare permutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RegistryEntry {
    Matrix { linearity: Linearity, matrix: ModuleMap },
    Table { perm: Vec<Elem> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraceDocument {
    pub module: ModuleDoc,
    /// An acting ring, for braces over rings other than the module's own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<RingAction>,
    pub gamma: Vec<u32>,
    pub registry: Vec<RegistryEntry>,
}

fn entry_for(shape: Option<&ModuleShape>, table: &[Elem]) -> RegistryEntry {
    if let Some(s) = shape {
        if let Some(m) = matrix_of_table(s, table) {
            return RegistryEntry::Matrix { linearity: Linearity::D, matrix: m };
        }
        if let Some(m) = matrix_of_table(&s.z_shape(), table) {
            return RegistryEntry::Matrix { linearity: Linearity::Z, matrix: m };
        }
    }
    RegistryEntry::Table { perm: table.to_vec() }
}

impl BraceDocument {
    pub fn from_brace(b: &Brace, action: Option<&RingAction>) -> Self {
        let module = match b.shape() {
            Some(s) => ModuleDoc::Shape(s.clone()),
            None => ModuleDoc::Group(b.group().clone()),
        };
        let g = b.gamma();
        BraceDocument {
            module,
            action: action.cloned(),
            gamma: g.table.clone(),
            registry: g.registry.iter().map(|t| entry_for(b.shape(), t)).collect(),
        }
    }

    /// The raw gamma function, before any validation beyond decoding.
    pub fn gamma_function(&self) -> Result<GammaFunction> {
        let shape = self.module.shape();
        let n = self.module.group().size();
        let mut registry = Vec::with_capacity(self.registry.len());
        for (i, e) in self.registry.iter().enumerate() {
            let table = match e {
                RegistryEntry::Table { perm } => perm.clone(),
                RegistryEntry::Matrix { linearity, matrix } => {
                    let s = shape.ok_or_else(|| Error::Malformed(format!("registry entry {i}: matrix without a module shape")))?;
                    let s = match linearity {
                        Linearity::D => s.clone(),
                        Linearity::Z => s.z_shape(),
                    };
                    matrix.check_hom(&s).map_err(|e| Error::Malformed(format!("registry entry {i}: {e}")))?;
                    matrix.to_table(&s)
                }
            };
            if table.len() != n || table.iter().any(|&y| y as usize >= n) {
                return Err(Error::Malformed(format!("registry entry {i} does not act on {n} elements")));
            }
            registry.push(table);
        }
        if self.gamma.len() != n || self.gamma.iter().any(|&g| g as usize >= registry.len()) {
            return Err(Error::Malformed("gamma does not index the registry once per element".into()));
        }
        if let Some(a) = &self.action {
            if a.module() != self.module.group() {
                return Err(Error::Malformed("action module differs from the brace module".into()));
            }
        }
        Ok(GammaFunction { registry, table: self.gamma.clone() })
    }

    /// Runs the gamma-function checks without building a brace.
    pub fn verify(&self) -> Result<GammaVerdict> {
        let gamma = self.gamma_function()?;
        let xi = self.module.shape().map(|s| s.xi_table());
        Ok(verify_gamma(self.module.group(), xi.as_deref(), &gamma))
    }

    pub fn to_brace(&self) -> Result<Brace> {
        let gamma = self.gamma_function()?;
        Brace::new(self.module.group().clone(), self.module.shape().cloned(), gamma)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("brace documents serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub shape: ModuleDoc,
    pub mode: EnumerationMode,
    pub count: usize,
    pub method: Method,
    /// Seconds.
    pub wall_time: f64,
}

/// Writes one document per brace followed by the summary record.
pub fn write_corpus(out: &mut dyn Write, module: &ModuleDoc, e: &Enumeration) -> Result<CorpusSummary> {
    for b in &e.braces {
        writeln!(out, "{}", BraceDocument::from_brace(b, None).to_json()).map_err(io_err)?;
    }
    write_summary(out, module, e)
}

pub fn summary_of(module: &ModuleDoc, e: &Enumeration) -> CorpusSummary {
    CorpusSummary {
        shape: module.clone(),
        mode: e.mode,
        count: e.len(),
        method: e.method,
        wall_time: e.wall_time.as_secs_f64(),
    }
}

pub fn write_summary(out: &mut dyn Write, module: &ModuleDoc, e: &Enumeration) -> Result<CorpusSummary> {
    let summary = summary_of(module, e);
    writeln!(out, "{}", serde_json::to_string(&summary).expect("summary serializes")).map_err(io_err)?;
    Ok(summary)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CorpusLine {
    Summary(CorpusSummary),
    Brace(Box<BraceDocument>),
}

/// Reads a corpus; a single brace document (no summary) is accepted too.
pub fn read_corpus(input: &mut dyn BufRead) -> Result<(Vec<BraceDocument>, Vec<CorpusSummary>)> {
    let mut docs = Vec::new();
    let mut summaries = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<CorpusLine>(&line) {
            Ok(CorpusLine::Summary(s)) => summaries.push(s),
            Ok(CorpusLine::Brace(d)) => docs.push(*d),
            Err(e) => return Err(Error::Malformed(format!("line {}: {e}", i + 1))),
        }
    }
    Ok((docs, summaries))
}

fn io_err(e: std::io::Error) -> Error {
    Error::Malformed(format!("i/o: {e}"))
}
