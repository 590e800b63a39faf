//! caitlin — a musical program auralization toolchain.
//!
//! The pipeline: a mini-Pascal program is lexed, parsed and checked
//! ([`lang`]), executed by a tree-walking interpreter that records a
//! control-flow trace ([`interp`], [`trace`]), and the trace is rendered
//! through a swappable presentation schema ([`schema`]) into an
//! absolute-time score ([`score`]) which is finally encoded as a Standard
//! MIDI File ([`midi`]).
//!
//! Each language construct owns a signature motif; iteration constructs
//! are variations on one theme, selections on another. Boolean outcomes
//! are rendered in major (true) or minor (false) mode, so a bug that
//! perturbs control flow perturbs the music. The [`corpus`] module ships
//! a seeded-bug harness demonstrating exactly that.

pub mod corpus;
pub mod interp;
pub mod lang;
pub mod midi;
pub mod motif;
pub mod schema;
pub mod score;
pub mod trace;
