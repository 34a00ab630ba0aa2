//! Message-passing reconstruction of nonnegative sparse signals measured
//! through sparse binary (LDPC parity-check) matrices.
//!
//! Three decoders share one synchronized schedule:
//!
//! * [`decode_ip`]: interval passing, which tightens per-edge lower/upper
//!   bounds on every signal component;
//! * [`decode_vb`]: node-based verification with the zero, degree-1 and
//!   identical-residual (coincidence) rules;
//! * [`decode_vbip`]: interval passing that also carries the verification
//!   residuals and coincidence flags. Its recovered set contains those of
//!   both other decoders at every iteration.
//!
//! Around them sit matrix construction and alist I/O ([`graph`]), the
//! half-normal signal model ([`signal`]) and a Monte Carlo harness with a
//! brute-force ℓ0 oracle ([`experiment`]).
//!
//! ```
//! use vbip::{decode_vbip, DecoderConfig, SensingMatrix};
//!
//! let h = SensingMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
//! let y = h.measure(&[0.0, 2.0, 0.0]).unwrap();
//! let r = decode_vbip(&h, &y, &DecoderConfig::default()).unwrap();
//! assert!(r.converged);
//! assert_eq!(r.estimate, vec![0.0, 2.0, 0.0]);
//! ```

// Graph code indexes parallel arrays by node id; `!(v >= 0.0)` is the NaN-rejecting form.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod decode;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod seed;
pub mod signal;

pub use decode::{
    decode, decode_ip, decode_observed, decode_vb, decode_vbip, Algorithm, DecodeResult, DecoderConfig,
    IterationView, Observer, Status,
};
pub use error::{Error, Result};
pub use experiment::{brute_force_sparsest, run_trial, sweep, Level, Sparsest, SweepConfig, SweepPoint};
pub use graph::{expand_qc, generate_regular, parse_alist, write_alist, BaseMatrix, RegularParams, SensingMatrix};
pub use signal::{generate_signal, reconstruction_success, SparseSignal};
