//! JSON documents for S-posets, models, universal models and algebras.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteAlgebra};
use crate::coloring::{Model, ModelError, Variety};
use crate::poset::{Poset, PosetError};
use crate::set::{Color, Elem, ElemSet};
use crate::universal::{LayeredModel, Truncation, UElement};
use crate::upset::{SPoset, UpsetError};

pub const FORMAT_VERSION: u32 = 1;

fn format_version() -> u32 {
    FORMAT_VERSION
}

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error("field `{0}` is required here")]
    Missing(&'static str),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Upset(#[from] UpsetError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A poset with an `S` set, optionally colored, optionally carrying the
/// identity of each point of a universal model. Covers are `[lower, upper]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDocument {
    #[serde(default = "format_version")]
    pub format_version: u32,
    pub n_elements: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    #[serde(default)]
    pub covers: Vec<[Elem; 2]>,
    #[serde(default)]
    pub s: Vec<Elem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colors: Option<Vec<Color>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_vars: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variety>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layers: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layer_sizes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncated: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<Truncation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<UElement>>,
}

impl ModelDocument {
    fn bare(poset: &Poset, s: &ElemSet) -> ModelDocument {
        ModelDocument {
            format_version: FORMAT_VERSION,
            n_elements: poset.len(),
            names: poset.names().map(<[String]>::to_vec),
            covers: poset.covers().into_iter().map(|(a, b)| [a, b]).collect(),
            s: s.to_vec(),
            colors: None,
            n_vars: None,
            variant: None,
            layers: None,
            layer_sizes: None,
            truncated: None,
            truncation: None,
            elements: None,
        }
    }

    pub fn from_sposet(sp: &SPoset) -> ModelDocument {
        Self::bare(sp.poset(), sp.s())
    }

    pub fn from_model(m: &Model) -> ModelDocument {
        ModelDocument { colors: Some(m.colors().to_vec()), n_vars: Some(m.n()), ..Self::bare(m.poset(), m.sposet().s()) }
    }

    pub fn from_layered(lm: &LayeredModel) -> ModelDocument {
        ModelDocument {
            names: Some((0..lm.len()).map(|x| lm.name(x)).collect()),
            variant: Some(lm.variety()),
            layers: Some(lm.elements().iter().map(|e| e.layer).collect()),
            layer_sizes: Some(lm.layer_sizes().to_vec()),
            truncated: Some(lm.is_truncated()),
            truncation: lm.truncation(),
            elements: Some(lm.elements().to_vec()),
            ..Self::from_model(lm.model())
        }
    }

    fn check_version(&self) -> Result<(), DocumentError> {
        if self.format_version != FORMAT_VERSION {
            return Err(DocumentError::Version(self.format_version));
        }
        Ok(())
    }

    pub fn to_poset(&self) -> Result<Poset, DocumentError> {
        self.check_version()?;
        let p = Poset::new(self.n_elements, self.covers.iter().map(|&[a, b]| (a, b)))?;
        if let Some(c) = self.covers.iter().find(|&&[a, b]| !p.covers_up(a).contains(&b)) {
            return Err(DocumentError::Invalid(format!("[{}, {}] is not a cover", c[0], c[1])));
        }
        Ok(match &self.names {
            Some(names) => p.with_names(names.clone())?,
            None => p,
        })
    }

    pub fn to_sposet(&self) -> Result<SPoset, DocumentError> {
        let p = self.to_poset()?;
        if let Some(&bad) = self.s.iter().find(|&&x| x >= self.n_elements) {
            return Err(DocumentError::Invalid(format!("S contains {bad}, which is out of range")));
        }
        Ok(SPoset::from_indices(p, self.s.iter().copied())?)
    }

    /// The colored model. A document without colors is read as a model on
    /// `n_vars` (default 0) colors with every point colored `∅`.
    pub fn to_model(&self) -> Result<Model, DocumentError> {
        let sp = self.to_sposet()?;
        let colors = self.colors.clone().unwrap_or_else(|| vec![Color::EMPTY; self.n_elements]);
        let n = match self.n_vars {
            Some(n) => n,
            None => colors.iter().map(|c| c.max_color()).max().unwrap_or(0),
        };
        Ok(Model::new(sp, n, colors)?)
    }

    /// The universal model recorded in the document, rebuilt from the point
    /// identities and checked against the stored order and coloring.
    pub fn to_layered(&self) -> Result<LayeredModel, DocumentError> {
        let variety = self.variant.ok_or(DocumentError::Missing("variant"))?;
        let n = self.n_vars.ok_or(DocumentError::Missing("n_vars"))?;
        let elements = self.elements.clone().ok_or(DocumentError::Missing("elements"))?;
        let lm = LayeredModel::from_parts(variety, n, elements, self.truncation).map_err(DocumentError::Invalid)?;
        if ModelDocument::from_layered(&lm) != *self {
            return Err(DocumentError::Invalid("stored order or coloring disagrees with the point identities".into()));
        }
        Ok(lm)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn from_json(text: &str) -> Result<ModelDocument, DocumentError> {
        let doc: ModelDocument = serde_json::from_str(text)?;
        doc.check_version()?;
        Ok(doc)
    }
}

/// A finite algebra by its Hasse diagram and operation tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraDocument {
    #[serde(default = "format_version")]
    pub format_version: u32,
    pub n_elements: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub covers: Vec<[usize; 2]>,
    pub top: usize,
    pub meet: Vec<Vec<usize>>,
    pub imp: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nucleus: Option<Vec<usize>>,
    #[serde(default)]
    pub bounded: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variety>,
}

impl AlgebraDocument {
    pub fn from_algebra(a: &FiniteAlgebra) -> AlgebraDocument {
        let n = a.len();
        AlgebraDocument {
            format_version: FORMAT_VERSION,
            n_elements: n,
            labels: a.labels().map(<[String]>::to_vec),
            covers: a.order_covers().into_iter().map(|(x, y)| [x, y]).collect(),
            top: a.top(),
            meet: (0..n).map(|x| (0..n).map(|y| a.meet(x, y)).collect()).collect(),
            imp: (0..n).map(|x| (0..n).map(|y| a.imp(x, y)).collect()).collect(),
            nucleus: a.nucleus_table().map(<[usize]>::to_vec),
            bounded: a.is_bounded(),
            generators: None,
            variant: None,
        }
    }

    pub fn to_algebra(&self) -> Result<FiniteAlgebra, DocumentError> {
        if self.format_version != FORMAT_VERSION {
            return Err(DocumentError::Version(self.format_version));
        }
        let order = Poset::new(self.n_elements, self.covers.iter().map(|&[a, b]| (a, b)))?;
        let leq: Vec<Vec<bool>> =
            (0..self.n_elements).map(|a| (0..self.n_elements).map(|b| order.leq(a, b)).collect()).collect();
        let mut alg = FiniteAlgebra::new(&leq, &self.meet, &self.imp, self.top)?.with_bottom(self.bounded);
        if let Some(j) = &self.nucleus {
            alg = alg.with_nucleus(j.clone())?;
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.n_elements {
                return Err(DocumentError::Invalid("label count differs from n_elements".into()));
            }
            alg = alg.with_labels(labels.clone());
        }
        if let Some(&bad) = self.generators.iter().flatten().find(|&&g| g >= self.n_elements) {
            return Err(DocumentError::Invalid(format!("generator {bad} is out of range")));
        }
        Ok(alg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn from_json(text: &str) -> Result<AlgebraDocument, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }
}
