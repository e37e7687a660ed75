//! Backend for an empathy-driven participation platform.
//!
//! Policymakers publish scenarios with a short agreement pre-survey.
//! Citizens answer it, share *visions* (an image, a caption and a mood) and
//! play a guessing game on the moods of other people's visions. Policymakers
//! read aggregate reports.
//!
//! The engines ([`survey`], [`game`], [`analytics`]) are synchronous
//! functions over a [`storage::Store`]; [`Platform`] bundles them with a
//! clock, a scoring table and the [`images`] client, and [`api`] exposes the
//! platform over HTTP.

pub mod analytics;
pub mod api;
pub mod clock;
pub mod config;
pub mod demo;
pub mod domain;
pub mod game;
pub mod images;
mod platform;
pub mod storage;
pub mod survey;

pub use platform::{ErrorKind, Platform, PlatformError};
