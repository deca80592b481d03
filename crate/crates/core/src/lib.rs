//! Bernoulli-Bernoulli restricted Boltzmann machines for piano-roll music.
//!
//! The crate covers the whole pipeline: reading Standard MIDI Files and IDX
//! images, rasterizing scores into 72×192 piano-roll windows, training an RBM
//! with contrastive divergence, composing new music with note-budgeted Gibbs
//! procedures, and analyzing the trained model (energies, hidden embeddings,
//! exact t-SNE).

pub mod analysis;
pub mod composer;
mod error;
pub mod pianoroll;
pub mod rbm;
pub mod rng;
pub mod score_io;
pub mod synth;
pub mod trainer;

pub use error::{Error, Result};
pub use pianoroll::{PianoRoll, RollDataset};
pub use rbm::{BinaryVec, HiddenState, RbmParams, VisibleState};
pub use rng::Rng;
pub use score_io::{NoteEvent, Score};
