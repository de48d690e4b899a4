//! Differentiable operations.
//!
//! Shapes use `L` for sequence length, `E` for embedding width, `F` for
//! filter count, `V` for vocabulary size. All convolution, pooling, and
//! attention functions take a [`Mask`] and never read input rows at
//! invalid positions, so values stored in padding cannot influence any
//! output.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kernel::{Mask, Tensor};

/// Row lookup: output row `i` is `table` row `ids[i]`.
pub fn embed_lookup(ids: &[u32], table: &Tensor) -> Result<Tensor> {
    let (v, e) = (table.dim(0), table.dim(1));
    let mut out = vec![0.0; ids.len() * e];
    for (i, &id) in ids.iter().enumerate() {
        let id = id as usize;
        if id >= v {
            return Err(Error::input(format!(
                "token id {id} out of range for table with {v} rows"
            )));
        }
        out[i * e..(i + 1) * e].copy_from_slice(table.row(id));
    }
    Tensor::from_vec(&[ids.len(), e], out)
}

/// Accumulates `out_grad` rows into the grad buffer of the looked-up table
/// rows only.
pub fn embed_lookup_backward(ids: &[u32], out_grad: &Tensor, table: &mut Tensor) -> Result<()> {
    let e = table.dim(1);
    if out_grad.shape() != [ids.len(), e] {
        return Err(Error::internal(format!(
            "embed_lookup_backward: grad shape {:?} does not match {} ids x {}",
            out_grad.shape(),
            ids.len(),
            e
        )));
    }
    let grad = table.grad_mut();
    for (i, &id) in ids.iter().enumerate() {
        let row = id as usize * e;
        let g = out_grad.row(i);
        for (dst, src) in grad[row..row + e].iter_mut().zip(g) {
            *dst += src;
        }
    }
    Ok(())
}

/// Cache for [`conv1d_same_backward`]: pre-ReLU activations.
pub struct Conv1dCache {
    pre_act: Vec<f64>,
}

/// Width-`w` 1-d convolution over an `L x E` input, "same" output length,
/// with ReLU applied.
///
/// The right edge is zero padded at the mask's valid boundary, so every
/// valid position yields an output and each filter contributes exactly `L`
/// positions. Rows at invalid positions are never read; outputs there are
/// zero and must be ignored downstream.
pub fn conv1d_same(
    input: &Tensor,
    filters: &Tensor,
    bias: &Tensor,
    mask: Mask,
) -> Result<(Tensor, Conv1dCache)> {
    let (l, e) = (input.dim(0), input.dim(1));
    let (w, fe, f) = (filters.dim(0), filters.dim(1), filters.dim(2));
    if !(1..=3).contains(&w) {
        return Err(Error::input(format!("filter width {w} not in 1..=3")));
    }
    if w > l {
        return Err(Error::input(format!(
            "filter width {w} exceeds input length {l}"
        )));
    }
    if fe != e || bias.numel() != f || mask.len() != l {
        return Err(Error::input(format!(
            "conv1d_same: incompatible shapes input {:?}, filters {:?}, bias {:?}, mask len {}",
            input.shape(),
            filters.shape(),
            bias.shape(),
            mask.len()
        )));
    }
    let valid = mask.valid_len();
    let mut pre = vec![0.0; l * f];
    let mut out = vec![0.0; l * f];
    let fw = filters.data();
    for p in 0..valid {
        let acc = &mut pre[p * f..(p + 1) * f];
        acc.copy_from_slice(bias.data());
        for j in 0..w {
            if p + j >= valid {
                break;
            }
            let x = input.row(p + j);
            for (ei, &xv) in x.iter().enumerate() {
                let wrow = &fw[(j * e + ei) * f..(j * e + ei + 1) * f];
                for (a, &wv) in acc.iter_mut().zip(wrow) {
                    *a += xv * wv;
                }
            }
        }
        for (o, &z) in out[p * f..(p + 1) * f].iter_mut().zip(acc.iter()) {
            *o = z.max(0.0);
        }
    }
    Ok((
        Tensor::from_vec(&[l, f], out)?,
        Conv1dCache { pre_act: pre },
    ))
}

/// Accumulates filter and bias gradients, returns the input gradient.
pub fn conv1d_same_backward(
    input: &Tensor,
    filters: &mut Tensor,
    bias: &mut Tensor,
    mask: Mask,
    cache: &Conv1dCache,
    out_grad: &Tensor,
) -> Result<Tensor> {
    let (l, e) = (input.dim(0), input.dim(1));
    let (w, f) = (filters.dim(0), filters.dim(2));
    if out_grad.shape() != [l, f] {
        return Err(Error::internal(
            "conv1d_same_backward: grad shape mismatch".into(),
        ));
    }
    let valid = mask.valid_len();
    let mut d_input = vec![0.0; l * e];
    let fw: Vec<f64> = filters.data().to_vec();
    let f_grad = filters.grad_mut();
    let mut d_pre = vec![0.0; f];
    for p in 0..valid {
        for fi in 0..f {
            let active = cache.pre_act[p * f + fi] > 0.0;
            d_pre[fi] = if active { out_grad.data()[p * f + fi] } else { 0.0 };
        }
        for (bg, &d) in bias.grad_mut().iter_mut().zip(&d_pre) {
            *bg += d;
        }
        for j in 0..w {
            if p + j >= valid {
                break;
            }
            let x = input.row(p + j);
            let dx = &mut d_input[(p + j) * e..(p + j + 1) * e];
            for (ei, &xv) in x.iter().enumerate() {
                let base = (j * e + ei) * f;
                let mut s = 0.0;
                for fi in 0..f {
                    f_grad[base + fi] += xv * d_pre[fi];
                    s += fw[base + fi] * d_pre[fi];
                }
                dx[ei] += s;
            }
        }
    }
    Tensor::from_vec(&[l, e], d_input)
}

/// Cache for [`masked_max_pool_backward`]: argmax row per channel.
pub struct MaxPoolCache {
    argmax: Vec<usize>,
}

/// Per-channel maximum over valid positions only. Ties resolve to the
/// earliest position, which keeps the backward pass deterministic.
pub fn masked_max_pool(features: &Tensor, mask: Mask) -> Result<(Tensor, MaxPoolCache)> {
    let (l, f) = (features.dim(0), features.dim(1));
    if mask.len() != l {
        return Err(Error::input("masked_max_pool: mask length mismatch".into()));
    }
    let valid = mask.valid_len();
    if valid == 0 {
        return Err(Error::input(
            "masked_max_pool: no valid positions to pool over".into(),
        ));
    }
    let mut out = features.row(0).to_vec();
    let mut argmax = vec![0usize; f];
    for p in 1..valid {
        for (fi, &x) in features.row(p).iter().enumerate() {
            if x > out[fi] {
                out[fi] = x;
                argmax[fi] = p;
            }
        }
    }
    Ok((Tensor::from_vec(&[f], out)?, MaxPoolCache { argmax }))
}

/// Routes each channel's gradient to its argmax position.
pub fn masked_max_pool_backward(
    cache: &MaxPoolCache,
    out_grad: &[f64],
    features_shape: &[usize],
) -> Result<Tensor> {
    let f = features_shape[1];
    if out_grad.len() != f || cache.argmax.len() != f {
        return Err(Error::internal(
            "masked_max_pool_backward: channel count mismatch".into(),
        ));
    }
    let mut d = Tensor::zeros(features_shape);
    for (fi, (&p, &g)) in cache.argmax.iter().zip(out_grad).enumerate() {
        d.data_mut()[p * f + fi] += g;
    }
    Ok(d)
}

/// Softmax over positions where `valid(i)` holds; invalid positions get
/// weight exactly zero (their logits are treated as negative infinity).
pub fn masked_softmax(logits: &[f64], valid: impl Fn(usize) -> bool) -> Result<Vec<f64>> {
    let mut max = f64::NEG_INFINITY;
    for (i, &z) in logits.iter().enumerate() {
        if valid(i) && z > max {
            max = z;
        }
    }
    if max == f64::NEG_INFINITY {
        return Err(Error::input("softmax over zero valid positions".into()));
    }
    let mut out = vec![0.0; logits.len()];
    let mut sum = 0.0;
    for (i, &z) in logits.iter().enumerate() {
        if valid(i) {
            let e = (z - max).exp();
            out[i] = e;
            sum += e;
        }
    }
    for o in out.iter_mut() {
        *o /= sum;
    }
    Ok(out)
}

/// Scaled dot-product attention of a learned query over feature rows.
///
/// `h` is `R x d` where `R` is a whole multiple of `seg_mask.len()`: the
/// stacked feature maps of several filters over the same text, so position
/// `i` is valid iff `seg_mask.is_valid(i % seg_mask.len())`. Logits are
/// `h_i . q / sqrt(d)`; returns the weighted average `v` and the full
/// attention distribution (zero at masked positions, summing to one).
pub fn scaled_dot_attention(
    h: &Tensor,
    q: &Tensor,
    seg_mask: Mask,
) -> Result<(Tensor, Vec<f64>)> {
    let (r, d) = (h.dim(0), h.dim(1));
    if q.numel() != d {
        return Err(Error::input(format!(
            "query dim {} does not match feature dim {d}",
            q.numel()
        )));
    }
    if seg_mask.len() == 0 || r % seg_mask.len() != 0 {
        return Err(Error::input(format!(
            "attention rows {r} not a multiple of mask length {}",
            seg_mask.len()
        )));
    }
    if seg_mask.valid_len() == 0 {
        return Err(Error::input("attention over zero valid positions".into()));
    }
    let len = seg_mask.len();
    let scale = 1.0 / (d as f64).sqrt();
    let mut logits = vec![0.0; r];
    for i in 0..r {
        if seg_mask.is_valid(i % len) {
            logits[i] = dot(h.row(i), q.data()) * scale;
        }
    }
    let alpha = masked_softmax(&logits, |i| seg_mask.is_valid(i % len))?;
    let mut v = vec![0.0; d];
    for (i, &a) in alpha.iter().enumerate() {
        if a != 0.0 {
            for (vd, &hd) in v.iter_mut().zip(h.row(i)) {
                *vd += a * hd;
            }
        }
    }
    Ok((Tensor::from_vec(&[d], v)?, alpha))
}

/// Accumulates the query gradient, returns the gradient for `h`.
pub fn scaled_dot_attention_backward(
    h: &Tensor,
    q: &mut Tensor,
    alpha: &[f64],
    seg_mask: Mask,
    d_v: &[f64],
) -> Result<Tensor> {
    let (r, d) = (h.dim(0), h.dim(1));
    if alpha.len() != r || d_v.len() != d {
        return Err(Error::internal(
            "scaled_dot_attention_backward: shape mismatch".into(),
        ));
    }
    let len = seg_mask.len();
    let scale = 1.0 / (d as f64).sqrt();
    // v = sum_i alpha_i h_i
    let mut d_alpha = vec![0.0; r];
    let mut d_h = Tensor::zeros(&[r, d]);
    for i in 0..r {
        if seg_mask.is_valid(i % len) {
            d_alpha[i] = dot(d_v, h.row(i));
            let dh = &mut d_h.data_mut()[i * d..(i + 1) * d];
            for (x, &g) in dh.iter_mut().zip(d_v) {
                *x += alpha[i] * g;
            }
        }
    }
    // softmax backward: du_i = alpha_i (d_alpha_i - sum_j alpha_j d_alpha_j)
    let inner: f64 = alpha.iter().zip(&d_alpha).map(|(a, g)| a * g).sum();
    let q_data: Vec<f64> = q.data().to_vec();
    let q_grad = q.grad_mut();
    for i in 0..r {
        if !seg_mask.is_valid(i % len) {
            continue;
        }
        let du = alpha[i] * (d_alpha[i] - inner);
        if du == 0.0 {
            continue;
        }
        let hrow = h.row(i);
        let dh = &mut d_h.data_mut()[i * d..(i + 1) * d];
        for k in 0..d {
            q_grad[k] += du * hrow[k] * scale;
            dh[k] += du * q_data[k] * scale;
        }
    }
    Ok(d_h)
}

/// Numerically stable logistic function.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Binary cross-entropy on a logit, in log-sum-exp form:
/// `max(z,0) - z*y + ln(1 + exp(-|z|))`.
///
/// Returns `(loss, dloss/dlogit)` where the gradient is `sigmoid(z) - y`.
pub fn sigmoid_bce(logit: f64, label: bool) -> (f64, f64) {
    let y = if label { 1.0 } else { 0.0 };
    let loss = logit.max(0.0) - logit * y + (-logit.abs()).exp().ln_1p();
    (loss, sigmoid(logit) - y)
}

/// Cache for [`dropout_backward`]: survivor mask and the inverse-keep scale.
pub struct DropoutCache {
    keep: Vec<bool>,
    scale: f64,
}

/// Inverted dropout: in training mode each element is zeroed with
/// probability `p` and survivors are scaled by `1/(1-p)`; in eval mode the
/// identity. Returns the cache only when elements were actually dropped.
pub fn dropout(
    x: &Tensor,
    p: f64,
    training: bool,
    rng: &mut ChaCha8Rng,
) -> Result<(Tensor, Option<DropoutCache>)> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::input(format!("dropout probability {p} not in [0,1)")));
    }
    if !training || p == 0.0 {
        return Ok((x.clone(), None));
    }
    let scale = 1.0 / (1.0 - p);
    let mut out = x.clone();
    let mut keep = vec![true; x.numel()];
    for (o, k) in out.data_mut().iter_mut().zip(keep.iter_mut()) {
        if rng.random::<f64>() < p {
            *o = 0.0;
            *k = false;
        } else {
            *o *= scale;
        }
    }
    Ok((out, Some(DropoutCache { keep, scale })))
}

pub fn dropout_backward(cache: Option<&DropoutCache>, out_grad: &Tensor) -> Tensor {
    match cache {
        None => out_grad.clone(),
        Some(c) => {
            let mut d = out_grad.clone();
            for (g, &k) in d.data_mut().iter_mut().zip(&c.keep) {
                *g = if k { *g * c.scale } else { 0.0 };
            }
            d
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    fn tensor(shape: &[usize], data: &[f64]) -> Tensor {
        Tensor::from_vec(shape, data.to_vec()).unwrap()
    }

    #[test]
    fn embed_lookup_identity_table() {
        let table = tensor(&[3, 3], &[1., 0., 0., 0., 1., 0., 0., 0., 1.]);
        let out = embed_lookup(&[0], &table).unwrap();
        assert_eq!(out.data(), &[1., 0., 0.]);
    }

    #[test]
    fn embed_lookup_repeated_id_gives_identical_rows() {
        let table = tensor(&[3, 2], &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
        let out = embed_lookup(&[2, 2], &table).unwrap();
        assert_eq!(out.row(0), out.row(1));
        assert_eq!(out.row(0), &[0.5, 0.6]);
    }

    #[test]
    fn embed_lookup_rejects_out_of_range() {
        let table = tensor(&[2, 2], &[0.; 4]);
        assert!(matches!(
            embed_lookup(&[2], &table),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn embed_backward_accumulates_into_looked_up_rows_only() {
        // d(sum of output)/d(table row 2) with ids [2,2] is a row of 2s.
        let mut table = tensor(&[3, 2], &[0.; 6]);
        let ones = tensor(&[2, 2], &[1.; 4]);
        embed_lookup_backward(&[2, 2], &ones, &mut table).unwrap();
        assert_eq!(table.grad().unwrap(), &[0., 0., 0., 0., 2., 2.]);
    }

    #[test]
    fn conv_width1_identity_is_relu() {
        // E = F = 2, width-1 identity filter bank.
        let input = tensor(&[3, 2], &[1., -2., 0.5, -0.5, -1., 3.]);
        let filters = tensor(&[1, 2, 2], &[1., 0., 0., 1.]);
        let bias = tensor(&[2], &[0., 0.]);
        let (out, _) = conv1d_same(&input, &filters, &bias, Mask::all_valid(3)).unwrap();
        assert_eq!(out.data(), &[1., 0., 0.5, 0., 0., 3.]);
    }

    #[test]
    fn conv_width2_hand_case() {
        // Hand convolution: input column [1,2,3], all-ones width-2 filter,
        // zero bias. Pre-ReLU values are [3,5,3]; the last position sees
        // the zero pad. Values are positive so ReLU passes them through.
        let input = tensor(&[3, 1], &[1., 2., 3.]);
        let filters = tensor(&[2, 1, 1], &[1., 1.]);
        let bias = tensor(&[1], &[0.]);
        let (out, _) = conv1d_same(&input, &filters, &bias, Mask::all_valid(3)).unwrap();
        assert_eq!(out.data(), &[3., 5., 3.]);
    }

    #[test]
    fn conv_output_length_equals_input_length_all_widths() {
        let input = tensor(&[5, 2], &[0.3; 10]);
        for w in 1..=3usize {
            let filters = Tensor::from_vec(&[w, 2, 3], vec![0.1; w * 2 * 3]).unwrap();
            let bias = tensor(&[3], &[0.; 3]);
            let (out, _) = conv1d_same(&input, &filters, &bias, Mask::all_valid(5)).unwrap();
            assert_eq!(out.shape(), &[5, 3]);
        }
    }

    #[test]
    fn conv_rejects_width_longer_than_input() {
        let input = tensor(&[2, 1], &[1., 2.]);
        let filters = tensor(&[3, 1, 1], &[1., 1., 1.]);
        let bias = tensor(&[1], &[0.]);
        assert!(matches!(
            conv1d_same(&input, &filters, &bias, Mask::all_valid(2)),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn conv_never_reads_invalid_rows() {
        let filters = tensor(&[2, 1, 1], &[1., 1.]);
        let bias = tensor(&[1], &[0.]);
        let mask = Mask::new(3, 2).unwrap();
        let a = tensor(&[3, 1], &[1., 2., 100.]);
        let b = tensor(&[3, 1], &[1., 2., -7.]);
        let (oa, _) = conv1d_same(&a, &filters, &bias, mask).unwrap();
        let (ob, _) = conv1d_same(&b, &filters, &bias, mask).unwrap();
        assert_eq!(oa.data(), ob.data());
        // zero pad now sits at the valid boundary
        assert_eq!(oa.data(), &[3., 2., 0.]);
    }

    #[test]
    fn max_pool_columnwise() {
        let f = tensor(&[2, 2], &[1., 5., 3., 2.]);
        let (out, _) = masked_max_pool(&f, Mask::all_valid(2)).unwrap();
        assert_eq!(out.data(), &[3., 5.]);
    }

    #[test]
    fn max_pool_mask_forces_first_row() {
        let f = tensor(&[2, 2], &[1., 5., 3., 2.]);
        let (out, _) = masked_max_pool(&f, Mask::new(2, 1).unwrap()).unwrap();
        assert_eq!(out.data(), &[1., 5.]);
    }

    #[test]
    fn max_pool_rejects_empty_mask() {
        let f = tensor(&[2, 2], &[0.; 4]);
        assert!(masked_max_pool(&f, Mask::new(2, 0).unwrap()).is_err());
    }

    #[test]
    fn max_pool_tie_routes_gradient_to_earlier_position() {
        let f = tensor(&[3, 1], &[2., 7., 7.]);
        let (_, cache) = masked_max_pool(&f, Mask::all_valid(3)).unwrap();
        let d = masked_max_pool_backward(&cache, &[1.0], &[3, 1]).unwrap();
        assert_eq!(d.data(), &[0., 1., 0.]);
    }

    #[test]
    fn attention_identical_rows_uniform() {
        let h = tensor(&[4, 2], &[0.3, -0.1, 0.3, -0.1, 0.3, -0.1, 0.3, -0.1]);
        let q = tensor(&[2], &[1.7, 0.4]);
        let (_, alpha) = scaled_dot_attention(&h, &q, Mask::all_valid(4)).unwrap();
        for a in &alpha {
            assert!((a - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn attention_orthogonal_query_gives_mean_of_valid_rows() {
        // q orthogonal to every row: logits all zero, alpha uniform.
        let h = tensor(&[3, 2], &[1., 0., 2., 0., 5., 0.]);
        let q = tensor(&[2], &[0., 3.]);
        let mask = Mask::new(3, 2).unwrap();
        let (v, alpha) = scaled_dot_attention(&h, &q, mask).unwrap();
        assert_eq!(&alpha[..2], &[0.5, 0.5]);
        assert_eq!(alpha[2], 0.0);
        assert!((v.data()[0] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn attention_matches_independent_oracle() {
        // Oracle: recompute logits, softmax, and the weighted sum with
        // straight-line code on a random 6x4 case (3 segments of length 2).
        let mut rng = substream(11, "attn-oracle");
        let h_data: Vec<f64> = (0..24).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let q_data: Vec<f64> = (0..4).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let h = tensor(&[6, 4], &h_data);
        let q = tensor(&[4], &q_data);
        let (v, alpha) = scaled_dot_attention(&h, &q, Mask::all_valid(2)).unwrap();

        let scale = 1.0 / 2.0; // 1/sqrt(4)
        let logits: Vec<f64> = (0..6)
            .map(|i| (0..4).map(|k| h_data[i * 4 + k] * q_data[k]).sum::<f64>() * scale)
            .collect();
        let m = logits.iter().cloned().fold(f64::MIN, f64::max);
        let exps: Vec<f64> = logits.iter().map(|z| (z - m).exp()).collect();
        let s: f64 = exps.iter().sum();
        let want_alpha: Vec<f64> = exps.iter().map(|e| e / s).collect();
        let mut want_v = [0.0; 4];
        for i in 0..6 {
            for k in 0..4 {
                want_v[k] += want_alpha[i] * h_data[i * 4 + k];
            }
        }
        for (a, w) in alpha.iter().zip(&want_alpha) {
            assert!((a - w).abs() < 1e-10);
        }
        for (a, w) in v.data().iter().zip(&want_v) {
            assert!((a - w).abs() < 1e-10);
        }
    }

    #[test]
    fn attention_rejects_all_invalid() {
        let h = tensor(&[2, 2], &[0.; 4]);
        let q = tensor(&[2], &[0.; 2]);
        assert!(scaled_dot_attention(&h, &q, Mask::new(2, 0).unwrap()).is_err());
    }

    #[test]
    fn softmax_masked_positions_exactly_zero_and_sum_one() {
        let logits = [3.0, -1.0, 950.0, 2.0];
        let alpha = masked_softmax(&logits, |i| i != 2).unwrap();
        assert_eq!(alpha[2], 0.0);
        let sum: f64 = alpha.iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn softmax_shift_invariant() {
        let logits = [0.3, -2.0, 1.7, 0.0];
        let shifted: Vec<f64> = logits.iter().map(|z| z + 123.456).collect();
        let a = masked_softmax(&logits, |_| true).unwrap();
        let b = masked_softmax(&shifted, |_| true).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn bce_at_zero_logit_is_ln2_for_both_labels() {
        let ln2 = std::f64::consts::LN_2;
        assert!((sigmoid_bce(0.0, true).0 - ln2).abs() < 1e-15);
        assert!((sigmoid_bce(0.0, false).0 - ln2).abs() < 1e-15);
    }

    #[test]
    fn bce_large_logit_no_overflow() {
        // ln(1 + e^-30) = 9.35e-14, so the loss is 30 + 9.35e-14.
        let (loss, grad) = sigmoid_bce(30.0, false);
        assert!(loss.is_finite());
        assert!((loss - 30.0).abs() < 1e-12);
        assert!((grad - 1.0).abs() < 1e-12);
        let (loss_neg, _) = sigmoid_bce(-30.0, true);
        assert!((loss_neg - 30.0).abs() < 1e-12);
    }

    #[test]
    fn dropout_p_zero_is_identity() {
        let x = tensor(&[4], &[1., 2., 3., 4.]);
        let mut rng = substream(1, "dropout");
        let (out, cache) = dropout(&x, 0.0, true, &mut rng).unwrap();
        assert_eq!(out.data(), x.data());
        assert!(cache.is_none());
    }

    #[test]
    fn dropout_eval_mode_is_identity() {
        let x = tensor(&[4], &[1., 2., 3., 4.]);
        let mut rng = substream(1, "dropout");
        let (out, cache) = dropout(&x, 0.5, false, &mut rng).unwrap();
        assert_eq!(out.data(), x.data());
        assert!(cache.is_none());
    }

    #[test]
    fn dropout_rejects_p_one() {
        let x = tensor(&[1], &[1.]);
        let mut rng = substream(1, "dropout");
        assert!(dropout(&x, 1.0, true, &mut rng).is_err());
    }

    #[test]
    fn dropout_empirical_rate_close_to_p() {
        let n = 100_000;
        let x = Tensor::from_vec(&[n], vec![1.0; n]).unwrap();
        let mut rng = substream(42, "dropout");
        let (out, cache) = dropout(&x, 0.3, true, &mut rng).unwrap();
        let dropped = out.data().iter().filter(|&&v| v == 0.0).count();
        let rate = dropped as f64 / n as f64;
        assert!((rate - 0.3).abs() < 0.01, "drop rate {rate}");
        // survivors carry the inverted scale
        let c = cache.unwrap();
        assert!((c.scale - 1.0 / 0.7).abs() < 1e-15);
        for (&v, &k) in out.data().iter().zip(&c.keep) {
            if k {
                assert!((v - c.scale).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn dropout_backward_masks_and_scales() {
        let x = tensor(&[6], &[1.; 6]);
        let mut rng = substream(9, "dropout");
        let (_, cache) = dropout(&x, 0.5, true, &mut rng).unwrap();
        let g = tensor(&[6], &[1.; 6]);
        let d = dropout_backward(cache.as_ref(), &g);
        let c = cache.unwrap();
        for (i, &k) in c.keep.iter().enumerate() {
            let want = if k { c.scale } else { 0.0 };
            assert_eq!(d.data()[i], want);
        }
    }
}
