//! JSON documents: matrices, variance maps, law descriptions.
//!
//! Complex scalars are `[re, im]` pairs and matrices are row-major arrays
//! of rows. A variance map is `{"kraus": [matrix, ...], "weight": "p/q"}`,
//! with the weight defaulting to `1/len`.

use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{BElement, CMat, CPMap, MatricialElement};
use crate::error::{Error, Result};
use crate::laws::{CentralLaw, Distribution, LawKind, MatrixModel};

pub type MatrixDoc = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_doc(m: &CMat) -> MatrixDoc {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

pub fn matrix_from_doc(doc: &MatrixDoc) -> Result<CMat> {
    let n = doc.len();
    if n == 0 || doc.iter().any(|row| row.len() != n) {
        return Err(Error::Config(format!(
            "matrix must be square and non-empty, got {n} rows"
        )));
    }
    Ok(CMat::from_fn(n, n, |i, j| {
        Complex64::new(doc[i][j][0], doc[i][j][1])
    }))
}

/// `serde(with)` adaptor for `CMat` fields.
pub mod cmat_json {
    use super::*;

    pub fn serialize<S: Serializer>(m: &CMat, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_doc(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CMat, D::Error> {
        let doc = MatrixDoc::deserialize(d)?;
        matrix_from_doc(&doc).map_err(serde::de::Error::custom)
    }
}

pub fn parse_ratio(s: &str) -> Result<Ratio<u64>> {
    let bad = || Error::Config(format!("weight {s:?} is not a positive rational p/q"));
    let (p, q) = match s.trim().split_once('/') {
        Some((p, q)) => (
            p.trim().parse::<u64>().map_err(|_| bad())?,
            q.trim().parse::<u64>().map_err(|_| bad())?,
        ),
        None => (s.trim().parse::<u64>().map_err(|_| bad())?, 1),
    };
    if p == 0 || q == 0 {
        return Err(bad());
    }
    Ok(Ratio::new(p, q))
}

pub fn format_ratio(r: Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CPMapDoc {
    pub kraus: Vec<MatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
}

impl CPMapDoc {
    pub fn to_cpmap(&self) -> Result<CPMap> {
        let kraus = self
            .kraus
            .iter()
            .map(|m| BElement::new(matrix_from_doc(m)?))
            .collect::<Result<Vec<_>>>()?;
        match &self.weight {
            Some(w) => CPMap::new(kraus, parse_ratio(w)?),
            None => CPMap::averaged(kraus),
        }
    }

    pub fn from_cpmap(eta: &CPMap) -> Self {
        Self {
            kraus: eta
                .kraus()
                .iter()
                .map(|k| matrix_to_doc(k.matrix()))
                .collect(),
            weight: Some(format_ratio(eta.weight())),
        }
    }
}

/// A law as read from JSON.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LawSpec {
    Bernoulli {
        variance: CPMapDoc,
    },
    Semicircle {
        variance: CPMapDoc,
    },
    Arcsine {
        variance: CPMapDoc,
    },
    MatrixModel {
        #[serde(rename = "X")]
        x: MatrixDoc,
        k: usize,
    },
}

impl LawSpec {
    pub fn central(kind: LawKind, eta: &CPMap) -> Self {
        let variance = CPMapDoc::from_cpmap(eta);
        match kind {
            LawKind::Bernoulli => Self::Bernoulli { variance },
            LawKind::Semicircle => Self::Semicircle { variance },
            LawKind::Arcsine => Self::Arcsine { variance },
        }
    }

    pub fn build(&self) -> Result<Arc<dyn Distribution>> {
        Ok(match self {
            Self::Bernoulli { variance } => Arc::new(CentralLaw::bernoulli(variance.to_cpmap()?)),
            Self::Semicircle { variance } => Arc::new(CentralLaw::semicircle(variance.to_cpmap()?)),
            Self::Arcsine { variance } => Arc::new(CentralLaw::arcsine(variance.to_cpmap()?)),
            Self::MatrixModel { x, k } => Arc::new(matrix_model(x, *k)?),
        })
    }

    /// The concrete model, when this is one.
    pub fn model(&self) -> Result<Option<MatrixModel>> {
        match self {
            Self::MatrixModel { x, k } => matrix_model(x, *k).map(Some),
            _ => Ok(None),
        }
    }

    /// Variance map of a central law.
    pub fn variance(&self) -> Result<Option<CPMap>> {
        match self {
            Self::Bernoulli { variance }
            | Self::Semicircle { variance }
            | Self::Arcsine { variance } => variance.to_cpmap().map(Some),
            Self::MatrixModel { .. } => Ok(None),
        }
    }
}

fn matrix_model(x: &MatrixDoc, k: usize) -> Result<MatrixModel> {
    let mat = matrix_from_doc(x)?;
    if k == 0 || mat.nrows() % k != 0 {
        return Err(Error::Config(format!(
            "X of size {} is not a {k} x {k} block matrix",
            mat.nrows()
        )));
    }
    let d = mat.nrows() / k;
    MatrixModel::new(MatricialElement::new(k, d, mat)?)
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let text = std::fs::read_to_string(path.as_ref())?;
    serde_json::from_str(&text).map_err(Error::from)
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<CMat> {
    matrix_from_doc(&read_json::<MatrixDoc>(path)?)
}
