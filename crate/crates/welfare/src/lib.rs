//! Front ends for `welfare-core`: the `welfare` command line tool and an HTTP
//! JSON service. Both serialize through [`wire`].

pub mod cli;
pub mod config;
pub mod curve;
pub mod sampling;
pub mod service;
pub mod verify;
pub mod wire;
