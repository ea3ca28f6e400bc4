//! Certified verification of an explicit upper bound on the number of
//! subgroups of a finite group.
//!
//! A finite group of order `r` has at most `7.3722 * r^(log2(r)/4 + 1.5315)`
//! subgroups. This crate mechanically certifies every computational step of
//! that claim: the constants behind it, the per-prime exception ranges, the
//! composite-bound sweep over every exceptional order, and — at desk scale —
//! the bound itself against brute-force subgroup enumeration.
//!
//! All real arithmetic is interval arithmetic with exact dyadic endpoints
//! and directed rounding; nothing is ever decided by a floating-point
//! comparison.

pub mod certified;
pub mod corollary;
pub mod groups;
pub mod lemmas;
pub mod report;
pub mod sgbound;

pub(crate) mod parallel;
