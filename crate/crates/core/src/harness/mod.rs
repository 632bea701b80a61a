//! Monte-Carlo word-error-rate campaigns and the maximum-likelihood oracle.

mod ml;
mod wer;

pub use ml::ml_oracle_decode;
pub use wer::{
    paired_trial, parse_eps_grid, records_csv, wer_campaign, wilson_half_width, wilson_interval, Decoder,
    TrialOutcome, WerRecord, WER_CSV_HEADER,
};
