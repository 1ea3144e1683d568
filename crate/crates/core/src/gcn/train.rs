use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamState};
use super::model::{backward_prepared, forward_prepared, objective_from_logits, GcnModel, Prepared, TrainInputs};
use super::GcnConfig;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    /// `None` when test accuracy was not tracked or the test mask is empty.
    pub test_acc: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub epochs: Vec<EpochRecord>,
}

impl History {
    pub fn final_loss(&self) -> Option<f64> {
        self.epochs.last().map(|e| e.train_loss)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainOptions {
    /// Evaluate on the test rows after every epoch.
    pub track_test_accuracy: bool,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            track_test_accuracy: true,
        }
    }
}

pub fn train(inputs: &TrainInputs<'_>, config: &GcnConfig) -> Result<(GcnModel, History)> {
    train_with(inputs, config, TrainOptions::default())
}

/// Full-batch training. Aborts with [`Error::NonFinite`] as soon as the loss
/// or any parameter stops being finite.
pub fn train_with(inputs: &TrainInputs<'_>, config: &GcnConfig, options: TrainOptions) -> Result<(GcnModel, History)> {
    let mut model = GcnModel::new(config.clone(), inputs.nodes(), inputs.features.ncols())?;
    model.check_inputs(inputs)?;
    let prep = Prepared::new(config.variant, inputs);
    let mut adam = AdamState::new(&model.params);
    let track = options.track_test_accuracy && inputs.test_mask.iter().any(|m| *m);
    let mut history = History::default();

    for epoch in 0..config.epochs {
        let mut dropout = rng::stream(config.seed, &["dropout".into(), (epoch as u64).into()]);
        let pass = forward_prepared(&model, &prep, Some(&mut dropout));
        let train_loss = objective_from_logits(&model, &pass, inputs);
        if !train_loss.is_finite() || !model.params.is_finite() {
            return Err(Error::NonFinite {
                epoch,
                layer_norms: model.params.norms(),
            });
        }
        let grads = backward_prepared(&model, &prep, &pass, inputs);
        if !grads.is_finite() {
            return Err(Error::NonFinite {
                epoch,
                layer_norms: model.params.norms(),
            });
        }
        adam_step(&mut model.params, &grads, &mut adam, config.learning_rate);
        let test_acc = if track {
            let eval = forward_prepared(&model, &prep, None);
            Some(accuracy(&eval.probs, inputs.labels, inputs.test_mask))
        } else {
            None
        };
        history.epochs.push(EpochRecord {
            epoch,
            train_loss,
            test_acc,
        });
    }
    if !model.params.is_finite() {
        return Err(Error::NonFinite {
            epoch: config.epochs,
            layer_norms: model.params.norms(),
        });
    }
    Ok((model, history))
}

/// Fraction of test rows whose arg-max class matches the label.
pub fn evaluate(model: &GcnModel, inputs: &TrainInputs<'_>) -> Result<f64> {
    if !inputs.test_mask.iter().any(|m| *m) {
        return Err(Error::invalid("test mask is empty"));
    }
    model.check_inputs(inputs)?;
    let prep = Prepared::new(model.config.variant, inputs);
    let pass = forward_prepared(model, &prep, None);
    Ok(accuracy(&pass.probs, inputs.labels, inputs.test_mask))
}

pub(crate) fn accuracy(probs: &ndarray::Array2<f64>, labels: &[usize], mask: &[bool]) -> f64 {
    let mut hits = 0usize;
    let mut total = 0usize;
    for (i, row) in probs.rows().into_iter().enumerate() {
        if !mask[i] {
            continue;
        }
        total += 1;
        // first maximum wins on ties
        let mut best = 0;
        for (c, v) in row.iter().enumerate() {
            if *v > row[best] {
                best = c;
            }
        }
        if best == labels[i] {
            hits += 1;
        }
    }
    hits as f64 / total as f64
}
