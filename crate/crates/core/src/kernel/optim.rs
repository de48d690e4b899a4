//! Adam optimizer and finite-difference gradient checking.

use crate::error::{Error, Result};
use crate::kernel::ParamStore;

/// Adam moment estimates, aligned entry-by-entry with a [`ParamStore`].
#[derive(Clone, Debug)]
pub struct AdamState {
    step: u64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<Vec<f64>>,
    u: Vec<Vec<f64>>,
}

impl AdamState {
    /// Zero-initialized state with beta1=0.9, beta2=0.999, eps=1e-8.
    pub fn new(params: &ParamStore, lr: f64) -> Self {
        let m: Vec<Vec<f64>> = params.iter().map(|(_, t)| vec![0.0; t.numel()]).collect();
        let u = m.clone();
        AdamState {
            step: 0,
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m,
            u,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }
}

/// One Adam update with bias correction over every parameter in the store.
/// Parameters without a gradient buffer are treated as having zero
/// gradient.
pub fn adam_step(params: &mut ParamStore, state: &mut AdamState) -> Result<()> {
    if state.m.len() != params.len() {
        return Err(Error::internal(format!(
            "adam state has {} entries, store has {}",
            state.m.len(),
            params.len()
        )));
    }
    state.step += 1;
    let t = state.step as i32;
    let bc1 = 1.0 - state.beta1.powi(t);
    let bc2 = 1.0 - state.beta2.powi(t);
    for (idx, (name, tensor)) in params.iter_mut().enumerate() {
        let n = tensor.numel();
        if state.m[idx].len() != n {
            return Err(Error::internal(format!(
                "adam moment shape mismatch for '{name}'"
            )));
        }
        let m = &mut state.m[idx];
        let u = &mut state.u[idx];
        // Missing grad buffer means the parameter received no gradient.
        let has_grad = tensor.grad().is_some();
        let grad: Vec<f64> = if has_grad {
            tensor.grad().unwrap().to_vec()
        } else {
            vec![0.0; n]
        };
        let data = tensor.data_mut();
        for i in 0..n {
            let g = grad[i];
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g;
            u[i] = state.beta2 * u[i] + (1.0 - state.beta2) * g * g;
            let m_hat = m[i] / bc1;
            let u_hat = u[i] / bc2;
            data[i] -= state.lr * m_hat / (u_hat.sqrt() + state.eps);
        }
    }
    Ok(())
}

/// Result of a gradient check: worst relative error overall and per
/// parameter group.
#[derive(Clone, Debug)]
pub struct GradCheckReport {
    pub max_rel_err: f64,
    pub per_param: Vec<(String, f64)>,
}

/// Central-difference check of the gradients currently stored in `params`
/// against a deterministic scalar loss `f` (run any dropout disabled).
///
/// For every coordinate the relative error is
/// `|analytic - numeric| / max(|analytic|, |numeric|, 1e-8)`.
pub fn grad_check<F>(mut f: F, params: &mut ParamStore, eps: f64) -> Result<GradCheckReport>
where
    F: FnMut(&ParamStore) -> Result<f64>,
{
    let names: Vec<String> = params.iter().map(|(n, _)| n.to_string()).collect();
    let analytic: Vec<Vec<f64>> = params
        .iter()
        .map(|(_, t)| t.grad().map(|g| g.to_vec()).unwrap_or_else(|| vec![0.0; t.numel()]))
        .collect();
    let mut per_param = Vec::with_capacity(names.len());
    let mut max_rel = 0.0f64;
    for (idx, name) in names.iter().enumerate() {
        let n = params.get(name).numel();
        let mut group_max = 0.0f64;
        for i in 0..n {
            let orig = params.get(name).data()[i];
            params.get_mut(name).data_mut()[i] = orig + eps;
            let up = f(params)?;
            params.get_mut(name).data_mut()[i] = orig - eps;
            let down = f(params)?;
            params.get_mut(name).data_mut()[i] = orig;
            if !up.is_finite() || !down.is_finite() {
                return Err(Error::internal(format!(
                    "non-finite loss while checking '{name}'[{i}]"
                )));
            }
            let numeric = (up - down) / (2.0 * eps);
            let a = analytic[idx][i];
            if !a.is_finite() {
                return Err(Error::internal(format!(
                    "non-finite analytic gradient at '{name}'[{i}]"
                )));
            }
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-8);
            group_max = group_max.max(rel);
        }
        max_rel = max_rel.max(group_max);
        per_param.push((name.clone(), group_max));
    }
    Ok(GradCheckReport {
        max_rel_err: max_rel,
        per_param,
    })
}
