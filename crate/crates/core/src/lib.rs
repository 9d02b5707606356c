//! Secure beamforming and cooperative-jamming design for a multi-antenna
//! base station assisted by energy-harvesting jamming nodes.
//!
//! Two globally optimal schemes solve semidefinite relaxations
//! ([`sdp_schemes`]), two low-complexity schemes iterate second-order cone
//! programs ([`cccp_schemes`]), and [`baselines`] holds the zero-forcing
//! reference. All of them sit on the embedded conic solver in [`conic`].

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod baselines;
pub mod cccp_schemes;
pub mod complexity;
pub mod conic;
pub mod error;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod sdp_schemes;

pub use error::{Error, Result};
pub use model::{ChannelSet, SystemConfig, TransmitDesign};
