//! JSON persistence for trained models. One envelope for all three families,
//! tagged by `family`; loading and predicting is bit-identical on the same
//! platform because serde_json prints doubles in shortest round-trip form.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::activation::Sigmoid;
use crate::baselines::{ElmModel, KrrModel};
use crate::cfn::{CfnModel, SampleSet};
use crate::error::{Error, Result};
use crate::geometry::CenterChain;

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct ModelMetadata {
    pub seed: Option<u64>,
    pub train_rmse: Option<f64>,
}

/// Any trained model, for uniform prediction and persistence.
#[derive(Debug, Clone)]
pub enum TrainedModel {
    Cfn(CfnModel),
    Elm(ElmModel),
    Krr(KrrModel),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
enum ModelFile {
    Cfn {
        dimension: usize,
        activation: String,
        params: Option<(f64, f64)>,
        w: f64,
        order: usize,
        centers: Vec<Vec<f64>>,
        coeffs: Vec<f64>,
        metadata: ModelMetadata,
    },
    Elm {
        dimension: usize,
        activation: String,
        params: Option<(f64, f64)>,
        hidden_weights: Vec<Vec<f64>>,
        hidden_biases: Vec<f64>,
        outer_weights: Vec<f64>,
        metadata: ModelMetadata,
    },
    Krr {
        dimension: usize,
        kernel_width: f64,
        ridge: f64,
        support_inputs: Vec<Vec<f64>>,
        dual_coeffs: Vec<f64>,
        metadata: ModelMetadata,
    },
}

impl TrainedModel {
    pub fn family(&self) -> &'static str {
        match self {
            TrainedModel::Cfn(_) => "cfn",
            TrainedModel::Elm(_) => "elm",
            TrainedModel::Krr(_) => "krr",
        }
    }

    pub fn d(&self) -> usize {
        match self {
            TrainedModel::Cfn(m) => m.d(),
            TrainedModel::Elm(m) => m.d(),
            TrainedModel::Krr(m) => m.d(),
        }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        match self {
            TrainedModel::Cfn(m) => m.predict(x),
            TrainedModel::Elm(m) => m.predict(x),
            TrainedModel::Krr(m) => m.predict(x),
        }
    }

    pub fn predict_samples(&self, samples: &SampleSet) -> Vec<f64> {
        samples.inputs().map(|x| self.predict(x)).collect()
    }

    pub fn to_json(&self, metadata: &ModelMetadata) -> Result<String> {
        let file = match self {
            TrainedModel::Cfn(m) => ModelFile::Cfn {
                dimension: m.d(),
                activation: m.activation().name().to_string(),
                params: m.activation().params(),
                w: m.w(),
                order: m.order(),
                centers: m.chain().iter_centers().map(|c| c.to_vec()).collect(),
                coeffs: m.coeffs().to_vec(),
                metadata: metadata.clone(),
            },
            TrainedModel::Elm(m) => ModelFile::Elm {
                dimension: m.d(),
                activation: m.activation().name().to_string(),
                params: m.activation().params(),
                hidden_weights: m
                    .hidden_weights()
                    .rows()
                    .into_iter()
                    .map(|r| r.to_vec())
                    .collect(),
                hidden_biases: m.hidden_biases().to_vec(),
                outer_weights: m.outer_weights().to_vec(),
                metadata: metadata.clone(),
            },
            TrainedModel::Krr(m) => ModelFile::Krr {
                dimension: m.d(),
                kernel_width: m.kernel_width(),
                ridge: m.ridge(),
                support_inputs: (0..m.len()).map(|i| m.support_input(i).to_vec()).collect(),
                dual_coeffs: m.dual_coeffs().to_vec(),
                metadata: metadata.clone(),
            },
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<(TrainedModel, ModelMetadata)> {
        let file: ModelFile = serde_json::from_str(text)?;
        match file {
            ModelFile::Cfn { dimension, activation, params, w, order, centers, coeffs, metadata } => {
                let sigmoid = Sigmoid::from_name_params(&activation, params)?;
                let chain = CenterChain::from_ordered(&centers)?;
                if chain.d() != dimension {
                    return Err(Error::invalid("stored dimension disagrees with centers"));
                }
                let model = CfnModel::from_parts(chain, sigmoid, w, coeffs, order)?;
                Ok((TrainedModel::Cfn(model), metadata))
            }
            ModelFile::Elm {
                dimension,
                activation,
                params,
                hidden_weights,
                hidden_biases,
                outer_weights,
                metadata,
            } => {
                let sigmoid = Sigmoid::from_name_params(&activation, params)?;
                let n = hidden_weights.len();
                let mut w = Array2::zeros((n, dimension));
                for (k, row) in hidden_weights.iter().enumerate() {
                    if row.len() != dimension {
                        return Err(Error::invalid("stored hidden weight row has wrong length"));
                    }
                    for (j, &v) in row.iter().enumerate() {
                        w[[k, j]] = v;
                    }
                }
                let model = ElmModel::from_parts(
                    sigmoid,
                    w,
                    Array1::from_vec(hidden_biases),
                    Array1::from_vec(outer_weights),
                )?;
                Ok((TrainedModel::Elm(model), metadata))
            }
            ModelFile::Krr { dimension, kernel_width, ridge, support_inputs, dual_coeffs, metadata } => {
                let mut support = Vec::with_capacity(support_inputs.len() * dimension);
                for row in &support_inputs {
                    if row.len() != dimension {
                        return Err(Error::invalid("stored support row has wrong length"));
                    }
                    support.extend_from_slice(row);
                }
                let model =
                    KrrModel::from_parts(dimension, support, dual_coeffs, kernel_width, ridge)?;
                Ok((TrainedModel::Krr(model), metadata))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{elm_train, krr_train};
    use crate::cfn::EmptyCellRule;
    use crate::geometry::{equispaced_centers, CenterChain};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn samples(seed: u64) -> SampleSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<f64> = (0..80).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.cos() * 2.0).collect();
        SampleSet::new(1, xs, ys).unwrap()
    }

    fn assert_bit_identical_predictions(model: &TrainedModel, reloaded: &TrainedModel) {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        for _ in 0..64 {
            let x = [rng.random::<f64>() * 3.0 - 1.5];
            let a = model.predict(&x);
            let b = reloaded.predict(&x);
            assert_eq!(a.to_bits(), b.to_bits(), "prediction differs at {x:?}");
        }
    }

    #[test]
    fn cfn_round_trip() {
        let s = samples(1);
        let chain =
            CenterChain::from_ordered(&equispaced_centers(8, -1.0, 1.0).unwrap()).unwrap();
        let model =
            CfnModel::train(chain, Sigmoid::Logistic, 37.5, 3, &s, EmptyCellRule::ZeroMean)
                .unwrap();
        let meta = ModelMetadata { seed: Some(42), train_rmse: Some(model.rmse_on(&s)) };
        let wrapped = TrainedModel::Cfn(model);
        let json = wrapped.to_json(&meta).unwrap();
        let (back, meta2) = TrainedModel::from_json(&json).unwrap();
        assert_eq!(meta, meta2);
        assert_eq!(back.family(), "cfn");
        assert_bit_identical_predictions(&wrapped, &back);
    }

    #[test]
    fn elm_round_trip() {
        let s = samples(2);
        let model = elm_train(&s, 10, Sigmoid::Gompertz { a: 1.5, b: 0.5 }, 9).unwrap();
        let wrapped = TrainedModel::Elm(model);
        let json = wrapped.to_json(&ModelMetadata::default()).unwrap();
        let (back, _) = TrainedModel::from_json(&json).unwrap();
        assert_eq!(back.family(), "elm");
        assert_bit_identical_predictions(&wrapped, &back);
    }

    #[test]
    fn krr_round_trip() {
        let s = samples(3);
        let model = krr_train(&s, 0.7, 1e-4).unwrap();
        let wrapped = TrainedModel::Krr(model);
        let json = wrapped.to_json(&ModelMetadata::default()).unwrap();
        let (back, _) = TrainedModel::from_json(&json).unwrap();
        assert_eq!(back.family(), "krr");
        assert_bit_identical_predictions(&wrapped, &back);
    }

    #[test]
    fn malformed_json_is_rejected() {
        assert!(TrainedModel::from_json("{}").is_err());
        assert!(TrainedModel::from_json("{\"family\":\"svm\"}").is_err());
    }
}
