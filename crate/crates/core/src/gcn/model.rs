use ndarray::{Array2, Axis, Zip};
use rand::Rng;

use super::params::{FirstLayer, GcnParams};
use super::{GcnConfig, Variant};
use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};
use crate::similarity::GraphRepresentative;

/// Everything a model sees for one split of one snapshot.
#[derive(Debug, Clone, Copy)]
pub struct TrainInputs<'a> {
    pub graph: &'a GraphRepresentative,
    pub features: &'a Array2<f64>,
    pub labels: &'a [usize],
    pub train_mask: &'a [bool],
    pub test_mask: &'a [bool],
}

impl<'a> TrainInputs<'a> {
    pub fn new(
        graph: &'a GraphRepresentative,
        features: &'a Array2<f64>,
        labels: &'a [usize],
        train_mask: &'a [bool],
        test_mask: &'a [bool],
    ) -> Result<Self> {
        let inputs = TrainInputs {
            graph,
            features,
            labels,
            train_mask,
            test_mask,
        };
        inputs.check_shapes()?;
        Ok(inputs)
    }

    pub fn nodes(&self) -> usize {
        self.graph.dim()
    }

    fn check_shapes(&self) -> Result<()> {
        let n = self.graph.matrix.nrows();
        if self.graph.matrix.ncols() != n {
            return Err(Error::invalid("graph representative must be square"));
        }
        if self.features.nrows() != n {
            return Err(Error::invalid(format!(
                "feature matrix has {} rows for {n} nodes",
                self.features.nrows()
            )));
        }
        if self.labels.len() != n || self.train_mask.len() != n || self.test_mask.len() != n {
            return Err(Error::invalid(format!("labels and masks must have length {n}")));
        }
        if self.train_mask.iter().zip(self.test_mask).any(|(a, b)| *a && *b) {
            return Err(Error::invalid("train and test masks overlap"));
        }
        if !self.train_mask.iter().any(|m| *m) {
            return Err(Error::invalid("train mask is empty"));
        }
        Ok(())
    }

    pub(crate) fn check_against(&self, cfg: &GcnConfig) -> Result<()> {
        self.check_shapes()?;
        if let Some(bad) = self.labels.iter().find(|l| **l >= cfg.num_classes) {
            return Err(Error::invalid(format!(
                "label {bad} out of range for {} classes",
                cfg.num_classes
            )));
        }
        Ok(())
    }
}

/// Per-input precomputation shared by every epoch.
pub(crate) struct Prepared<'a> {
    /// `None` means the identity (feature-only model).
    g: Option<&'a Array2<f64>>,
    /// Explicit transpose, only kept when `G` is not symmetric.
    g_t: Option<Array2<f64>>,
    /// `G X` (or `X` without topology); unused by topology-only variants.
    base: Option<Array2<f64>>,
}

impl<'a> Prepared<'a> {
    pub(crate) fn new(variant: Variant, inputs: &TrainInputs<'a>) -> Self {
        let g = variant.uses_topology().then_some(&inputs.graph.matrix);
        let g_t = g.filter(|m| **m != m.t()).map(|m| m.t().to_owned());
        let base = variant.uses_features().then(|| match g {
            Some(g) => g.dot(inputs.features),
            None => inputs.features.clone(),
        });
        Prepared { g, g_t, base }
    }

    fn prop(&self, m: &Array2<f64>) -> Array2<f64> {
        match self.g {
            Some(g) => g.dot(m),
            None => m.clone(),
        }
    }

    fn prop_t(&self, m: &Array2<f64>) -> Array2<f64> {
        match (&self.g_t, self.g) {
            (Some(gt), _) => gt.dot(m),
            (None, Some(g)) => g.dot(m),
            (None, None) => m.clone(),
        }
    }

    fn graph(&self) -> &Array2<f64> {
        self.g.expect("topology variants always carry G")
    }

    fn base(&self) -> &Array2<f64> {
        self.base.as_ref().expect("feature variants always carry GX")
    }
}

/// Intermediate values of one forward pass, kept for [`backward`].
#[derive(Debug, Clone)]
pub struct ForwardPass {
    /// Input of layer `l + 1`: the activation after ReLU and dropout.
    hidden: Vec<Array2<f64>>,
    /// Pre-activation of every layer.
    pre: Vec<Array2<f64>>,
    /// Inverted-dropout scale per hidden layer (`None` in evaluation mode).
    masks: Vec<Option<Array2<f64>>>,
    /// `(GX) ⊙ (1S)` when the feature weights are active.
    scaled_base: Option<Array2<f64>>,
    /// `G Wᵃ` for the low-rank first layer.
    g_a: Option<Array2<f64>>,
    pub probs: Array2<f64>,
}

impl ForwardPass {
    pub fn logits(&self) -> &Array2<f64> {
        self.pre.last().expect("at least one layer")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GcnModel {
    pub config: GcnConfig,
    pub params: GcnParams,
    pub nodes: usize,
    pub features: usize,
}

impl GcnModel {
    pub fn new(config: GcnConfig, nodes: usize, features: usize) -> Result<Self> {
        config.validate()?;
        let mut r = rng::stream(config.seed, &["init".into()]);
        let params = GcnParams::init(&config, nodes, features, &mut r);
        Ok(GcnModel {
            config,
            params,
            nodes,
            features,
        })
    }

    pub(crate) fn check_inputs(&self, inputs: &TrainInputs<'_>) -> Result<()> {
        inputs.check_against(&self.config)?;
        if inputs.nodes() != self.nodes || inputs.features.ncols() != self.features {
            return Err(Error::invalid(format!(
                "model built for {} nodes x {} features, inputs have {} x {}",
                self.nodes,
                self.features,
                inputs.nodes(),
                inputs.features.ncols()
            )));
        }
        Ok(())
    }

    /// Class probabilities in evaluation mode.
    pub fn predict(&self, inputs: &TrainInputs<'_>) -> Result<Array2<f64>> {
        Ok(forward(self, inputs, None)?.probs)
    }

    /// Training objective without dropout.
    pub fn objective(&self, inputs: &TrainInputs<'_>) -> Result<f64> {
        let pass = forward(self, inputs, None)?;
        Ok(objective_from_logits(self, &pass, inputs))
    }

    /// Gradient of [`objective`](Self::objective) with respect to every parameter.
    pub fn gradients(&self, inputs: &TrainInputs<'_>) -> Result<GcnParams> {
        let pass = forward(self, inputs, None)?;
        backward(self, &pass, inputs)
    }
}

/// Runs the network. With `dropout_rng` the pass is in training mode.
pub fn forward(model: &GcnModel, inputs: &TrainInputs<'_>, dropout_rng: Option<&mut StreamRng>) -> Result<ForwardPass> {
    model.check_inputs(inputs)?;
    let prep = Prepared::new(model.config.variant, inputs);
    Ok(forward_prepared(model, &prep, dropout_rng))
}

pub(crate) fn forward_prepared(
    model: &GcnModel,
    prep: &Prepared<'_>,
    mut dropout_rng: Option<&mut StreamRng>,
) -> ForwardPass {
    let cfg = &model.config;
    let p = &model.params;
    let depth = cfg.depth();

    let mut scaled_base = None;
    let mut g_a = None;
    let z0 = match &p.first {
        FirstLayer::Dense(w) if cfg.variant.uses_features() => match &p.s {
            Some(s) => {
                let xs = prep.base() * s;
                let z = xs.dot(w);
                scaled_base = Some(xs);
                z
            }
            None => prep.base().dot(w),
        },
        FirstLayer::Dense(w) => prep.graph().dot(w),
        FirstLayer::LowRank { a, b } => {
            let ga = prep.graph().dot(a);
            let z = ga.dot(b);
            g_a = Some(ga);
            z
        }
    };

    let mut pre = Vec::with_capacity(depth);
    let mut hidden: Vec<Array2<f64>> = Vec::with_capacity(depth - 1);
    let mut masks = Vec::with_capacity(depth - 1);
    pre.push(z0);
    for l in 0..depth {
        if l > 0 {
            let z = prep.prop(&hidden[l - 1].dot(&p.rest[l - 1]));
            pre.push(z);
        }
        if l + 1 < depth {
            let mut h = pre[l].mapv(|v| v.max(0.0));
            let mask = match dropout_rng.as_deref_mut() {
                Some(r) if cfg.dropout_p > 0.0 => {
                    let keep = 1.0 / (1.0 - cfg.dropout_p);
                    let m = Array2::from_shape_simple_fn(h.raw_dim(), || {
                        if r.gen::<f64>() < cfg.dropout_p {
                            0.0
                        } else {
                            keep
                        }
                    });
                    h *= &m;
                    Some(m)
                }
                _ => None,
            };
            hidden.push(h);
            masks.push(mask);
        }
    }

    let probs = softmax_rows(pre.last().expect("depth >= 1"));
    ForwardPass {
        hidden,
        pre,
        masks,
        scaled_base,
        g_a,
        probs,
    }
}

pub(crate) fn softmax_rows(logits: &Array2<f64>) -> Array2<f64> {
    let mut out = logits.clone();
    for mut row in out.rows_mut() {
        let m = row.fold(f64::NEG_INFINITY, |a, b| a.max(*b));
        row.mapv_inplace(|v| (v - m).exp());
        let s = row.sum();
        row.mapv_inplace(|v| v / s);
    }
    out
}

/// Mean of `-ln p[label]` over the masked rows.
pub fn cross_entropy(probs: &Array2<f64>, labels: &[usize], mask: &[bool]) -> f64 {
    let mut total = 0.0;
    let mut count = 0usize;
    for (i, row) in probs.rows().into_iter().enumerate() {
        if mask[i] {
            total -= row[labels[i]].max(f64::MIN_POSITIVE).ln();
            count += 1;
        }
    }
    total / count as f64
}

/// Sum of squared entries of every hidden-layer weight. The output layer and
/// the feature weights are not decayed.
pub(crate) fn decay_term(params: &GcnParams, depth: usize) -> f64 {
    let sq = |m: &Array2<f64>| m.iter().map(|v| v * v).sum::<f64>();
    let mut total = 0.0;
    if depth > 1 {
        total += match &params.first {
            FirstLayer::Dense(w) => sq(w),
            FirstLayer::LowRank { a, b } => sq(a) + sq(b),
        };
    }
    for w in params.rest.iter().take(depth.saturating_sub(2)) {
        total += sq(w);
    }
    total
}

/// Cross-entropy on the training rows plus `weight_decay · Σ‖W‖²`.
pub fn loss(probs: &Array2<f64>, labels: &[usize], train_mask: &[bool], model: &GcnModel) -> f64 {
    let cfg = &model.config;
    cross_entropy(probs, labels, train_mask) + cfg.weight_decay * decay_term(&model.params, cfg.depth())
}

/// Same value as [`loss`], computed through a log-sum-exp so tiny
/// probabilities cannot underflow.
pub(crate) fn objective_from_logits(model: &GcnModel, pass: &ForwardPass, inputs: &TrainInputs<'_>) -> f64 {
    let mut total = 0.0;
    let mut count = 0usize;
    for (i, row) in pass.logits().rows().into_iter().enumerate() {
        if inputs.train_mask[i] {
            let m = row.fold(f64::NEG_INFINITY, |a, b| a.max(*b));
            let lse = m + row.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
            total += lse - row[inputs.labels[i]];
            count += 1;
        }
    }
    let cfg = &model.config;
    total / count as f64 + cfg.weight_decay * decay_term(&model.params, cfg.depth())
}

/// Reverse-mode gradient of the training objective for the given pass.
pub fn backward(model: &GcnModel, pass: &ForwardPass, inputs: &TrainInputs<'_>) -> Result<GcnParams> {
    model.check_inputs(inputs)?;
    let prep = Prepared::new(model.config.variant, inputs);
    Ok(backward_prepared(model, &prep, pass, inputs))
}

pub(crate) fn backward_prepared(
    model: &GcnModel,
    prep: &Prepared<'_>,
    pass: &ForwardPass,
    inputs: &TrainInputs<'_>,
) -> GcnParams {
    let cfg = &model.config;
    let p = &model.params;
    let depth = cfg.depth();
    let decay = 2.0 * cfg.weight_decay;
    let n_train = inputs.train_mask.iter().filter(|m| **m).count() as f64;

    let mut dz = pass.probs.clone();
    for (i, mut row) in dz.rows_mut().into_iter().enumerate() {
        if inputs.train_mask[i] {
            row[inputs.labels[i]] -= 1.0;
            row.mapv_inplace(|v| v / n_train);
        } else {
            row.fill(0.0);
        }
    }

    let mut rest_grads = vec![Array2::zeros((0, 0)); p.rest.len()];
    for l in (1..depth).rev() {
        let w = &p.rest[l - 1];
        let dp = prep.prop_t(&dz);
        let mut dw = pass.hidden[l - 1].t().dot(&dp);
        if l + 1 < depth {
            dw.scaled_add(decay, w);
        }
        rest_grads[l - 1] = dw;
        let mut dh = dp.dot(&w.t());
        let z = &pass.pre[l - 1];
        match &pass.masks[l - 1] {
            Some(mask) => Zip::from(&mut dh).and(z).and(mask).for_each(|d, &zv, &mv| {
                *d = if zv > 0.0 { *d * mv } else { 0.0 };
            }),
            None => Zip::from(&mut dh).and(z).for_each(|d, &zv| {
                if zv <= 0.0 {
                    *d = 0.0;
                }
            }),
        }
        dz = dh;
    }

    let first_hidden = depth > 1;
    let mut s_grad = None;
    let first = match &p.first {
        FirstLayer::Dense(w) if cfg.variant.uses_features() => {
            let x = pass.scaled_base.as_ref().unwrap_or_else(|| prep.base());
            let mut dw = x.t().dot(&dz);
            if first_hidden {
                dw.scaled_add(decay, w);
            }
            if p.s.is_some() {
                let dx = dz.dot(&w.t());
                let ds = (prep.base() * &dx).sum_axis(Axis(0)).insert_axis(Axis(0));
                s_grad = Some(ds);
            }
            FirstLayer::Dense(dw)
        }
        FirstLayer::Dense(w) => {
            let mut dw = prep.prop_t(&dz);
            if first_hidden {
                dw.scaled_add(decay, w);
            }
            FirstLayer::Dense(dw)
        }
        FirstLayer::LowRank { a, b } => {
            let ga = pass.g_a.as_ref().expect("low-rank pass keeps G a");
            let mut db = ga.t().dot(&dz);
            let mut da = prep.prop_t(&dz.dot(&b.t()));
            if first_hidden {
                da.scaled_add(decay, a);
                db.scaled_add(decay, b);
            }
            FirstLayer::LowRank { a: da, b: db }
        }
    };

    GcnParams {
        first,
        rest: rest_grads,
        s: s_grad,
    }
}
