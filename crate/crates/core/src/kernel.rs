//! Minimal reverse-mode numeric kernel.
//!
//! Dense row-major [`Tensor`]s with an optional gradient buffer, exactly
//! the differentiable operations the classifiers need (embedding lookup,
//! width-1/2/3 "same" convolution with ReLU, masked max pooling, scaled
//! dot-product attention, stable sigmoid + BCE, inverted dropout), the
//! Adam optimizer, and a central finite-difference gradient checker.
//!
//! Forward functions return the output together with whatever cache the
//! matching `*_backward` function needs. Parameter gradients accumulate
//! into each parameter [`Tensor`]'s grad buffer; gradients for activations
//! are returned as plain tensors.

mod ops;
mod optim;
mod store;
mod tensor;

pub use ops::{
    conv1d_same, conv1d_same_backward, dropout, dropout_backward, embed_lookup,
    embed_lookup_backward, masked_max_pool, masked_max_pool_backward, masked_softmax,
    scaled_dot_attention, scaled_dot_attention_backward, sigmoid, sigmoid_bce, Conv1dCache,
    DropoutCache, MaxPoolCache,
};
pub use optim::{adam_step, grad_check, AdamState, GradCheckReport};
pub use store::ParamStore;
pub use tensor::{Mask, Tensor};
