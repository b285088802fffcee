//! The fixed corpus of test maps, read from `data/corpus.toml`.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::parse::parse_map;
use crate::scalar::{FieldKind, Scalar};
use crate::series::XSeries;

const CORPUS_TOML: &str = include_str!("../data/corpus.toml");

#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
pub struct CorpusMap {
    pub name: String,
    /// The map `g` in the syntax of [`parse_map`].
    pub g: String,
    pub field: String,
}

impl CorpusMap {
    pub fn field_kind(&self) -> Result<FieldKind> {
        self.field.parse()
    }

    pub fn map<F: Scalar>(&self) -> Result<XSeries<F>> {
        parse_map(&self.g)
    }

    /// `f = g − x`.
    pub fn generator<F: Scalar>(&self) -> Result<XSeries<F>> {
        Ok(&self.map::<F>()? - &XSeries::x())
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
pub struct Corpus {
    pub initial_values: Vec<String>,
    pub logistic_mu: Vec<String>,
    pub operators: Vec<String>,
    pub horizon: usize,
    #[serde(rename = "map")]
    pub maps: Vec<CorpusMap>,
}

impl Corpus {
    pub fn builtin() -> Self {
        Self::from_toml(CORPUS_TOML).expect("bundled corpus parses")
    }

    pub fn from_toml(src: &str) -> Result<Self> {
        toml::from_str(src).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn initial_values<F: Scalar>(&self) -> Result<Vec<F>> {
        self.initial_values.iter().map(|s| F::parse_exact(s)).collect()
    }

    pub fn mus<F: Scalar>(&self) -> Result<Vec<F>> {
        self.logistic_mu.iter().map(|s| F::parse_exact(s)).collect()
    }
}
