use super::params::GcnParams;

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPSILON: f64 = 1e-8;

/// First and second moment estimates plus the step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: GcnParams,
    pub v: GcnParams,
    pub step: u64,
}

impl AdamState {
    pub fn new(params: &GcnParams) -> Self {
        AdamState {
            m: params.zeros_like(),
            v: params.zeros_like(),
            step: 0,
        }
    }
}

/// One bias-corrected Adam update.
pub fn adam_step(params: &mut GcnParams, grads: &GcnParams, state: &mut AdamState, learning_rate: f64) {
    state.step += 1;
    let t = state.step as i32;
    let c1 = 1.0 - ADAM_BETA1.powi(t);
    let c2 = 1.0 - ADAM_BETA2.powi(t);
    let tensors = params.tensors_mut().into_iter();
    let moments = state.m.tensors_mut().into_iter().zip(state.v.tensors_mut());
    for ((p, (m, v)), g) in tensors.zip(moments).zip(grads.tensors()) {
        debug_assert_eq!(p.dim(), g.dim());
        ndarray::Zip::from(p).and(m).and(v).and(g).for_each(|p, m, v, &g| {
            *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
            *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *p -= learning_rate * m_hat / (v_hat.sqrt() + ADAM_EPSILON);
        });
    }
}
