use serde::{Deserialize, Serialize};

use super::{c, CMatrix, JointState, MeasurementModel, QcoreError, SideModel, TwoQubitState};

pub const SCHEMA: &str = "qcore/1";

/// Row-major complex matrix as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl ComplexMatrixDoc {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push([m[(i, j)].re, m[(i, j)].im]);
            }
        }
        ComplexMatrixDoc { rows: m.nrows(), cols: m.ncols(), data }
    }

    pub fn to_matrix(&self) -> Result<CMatrix, QcoreError> {
        if self.data.len() != self.rows * self.cols {
            return Err(QcoreError::Document(format!(
                "{}x{} matrix with {} entries",
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        Ok(CMatrix::from_fn(self.rows, self.cols, |i, j| {
            let [re, im] = self.data[i * self.cols + j];
            c(re, im)
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideDoc {
    /// `E_{0|0}` and `E_{0|1}`.
    pub projectors: [ComplexMatrixDoc; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QcoreBody {
    TwoQubitState { matrix: ComplexMatrixDoc },
    JointState { dims: [usize; 2], matrix: ComplexMatrixDoc },
    MeasurementModel { bob: SideDoc, alice: Option<SideDoc> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QcoreDocument {
    pub schema: String,
    #[serde(flatten)]
    pub body: QcoreBody,
}

impl QcoreDocument {
    fn wrap(body: QcoreBody) -> Self {
        QcoreDocument { schema: SCHEMA.to_string(), body }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, QcoreError> {
        let doc: QcoreDocument = serde_json::from_str(text).map_err(|e| QcoreError::Document(e.to_string()))?;
        if doc.schema != SCHEMA {
            return Err(QcoreError::Document(format!("unsupported schema `{}`", doc.schema)));
        }
        Ok(doc)
    }

    pub fn two_qubit_state(&self) -> Result<TwoQubitState, QcoreError> {
        match &self.body {
            QcoreBody::TwoQubitState { matrix } => TwoQubitState::new(matrix.to_matrix()?),
            _ => Err(QcoreError::Document("expected a two_qubit_state".into())),
        }
    }

    pub fn joint_state(&self) -> Result<JointState, QcoreError> {
        match &self.body {
            QcoreBody::JointState { dims, matrix } => JointState::new(matrix.to_matrix()?, (dims[0], dims[1])),
            QcoreBody::TwoQubitState { matrix } => Ok(TwoQubitState::new(matrix.to_matrix()?)?.to_joint()),
            _ => Err(QcoreError::Document("expected a state".into())),
        }
    }

    pub fn measurement_model(&self) -> Result<MeasurementModel, QcoreError> {
        let side = |d: &SideDoc| -> Result<SideModel, QcoreError> {
            SideModel::new([d.projectors[0].to_matrix()?, d.projectors[1].to_matrix()?])
        };
        match &self.body {
            QcoreBody::MeasurementModel { bob, alice } => Ok(MeasurementModel {
                bob: side(bob)?,
                alice: alice.as_ref().map(side).transpose()?,
            }),
            _ => Err(QcoreError::Document("expected a measurement_model".into())),
        }
    }
}

fn side_doc(side: &SideModel) -> SideDoc {
    SideDoc {
        projectors: [
            ComplexMatrixDoc::from_matrix(&side.projector(0, 0)),
            ComplexMatrixDoc::from_matrix(&side.projector(1, 0)),
        ],
    }
}

impl TwoQubitState {
    pub fn to_document(&self) -> QcoreDocument {
        QcoreDocument::wrap(QcoreBody::TwoQubitState { matrix: ComplexMatrixDoc::from_matrix(self.matrix()) })
    }
}

impl JointState {
    pub fn to_document(&self) -> QcoreDocument {
        let (a, b) = self.dims();
        QcoreDocument::wrap(QcoreBody::JointState { dims: [a, b], matrix: ComplexMatrixDoc::from_matrix(self.matrix()) })
    }
}

impl MeasurementModel {
    pub fn to_document(&self) -> QcoreDocument {
        QcoreDocument::wrap(QcoreBody::MeasurementModel {
            bob: side_doc(&self.bob),
            alice: self.alice.as_ref().map(side_doc),
        })
    }
}
