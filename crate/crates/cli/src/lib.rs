// SPDX-License-Identifier: Apache-2.0

//! Library half of the `speedup` command: configuration types, trace
//! documents and the subcommand implementations.

pub mod commands;
pub mod config;
pub mod trace;
