//! Exact-arithmetic toolkit for the kite grid: the p6m symmetry group of
//! the grid in canonical integer form, discretization of grid-aligned
//! polygons into group-indexed cells, the hat monotile, the HTPF metatile
//! substitution that generates aperiodic hat patches, and analysis of
//! finite patches (covers, stabilizers, periods, tiling search).

pub mod scalar;
pub mod analysis;
pub mod discretize;
pub mod geometry;
pub mod grid;
pub mod group;
pub mod hats;
