//! LSTM regressor with hand-derived backpropagation through time and Adam.

mod adam;
mod checkpoint;
mod gradcheck;
mod network;
mod params;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use checkpoint::LstmModel;
pub use gradcheck::{batch_loss, gradient_check, relative_error, CHECK_BATCH, RELATIVE_ERROR_FLOOR};
pub use network::{
    backward, forward, forward_with_masks, lstm_cell_forward, mse_loss, sample_dropout_masks, sigmoid, ForwardCache,
    GateCache, Mode, SampleCache,
};
pub use params::{glorot_limit, init_params, lstm_block_param_count, param_count, LstmConfig, LstmParams, BLOCK_NAMES};
