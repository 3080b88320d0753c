//! Gate-level construction and analysis of parallel-multiplier final
//! adders: Dadda front-ends, arrival-profile timing, region
//! partitioning, a family of carry-propagate adder generators, and a
//! unit-weight cost model for comparing them.

pub mod adders;
pub mod costmodel;
pub mod error;
pub mod io;
pub mod multiplier;
pub mod netlist;
pub mod partition;
pub mod study;
pub mod timing;

pub use adders::{compose_hybrid, gen_adder, gen_bec, AdderKind, AdderSpec};
pub use costmodel::{
    activity_from_vectors, area, estimate_activity, power, Activity, CostReport, CostTables,
};
pub use error::{Error, Result};
pub use multiplier::{attach_cpa, build_front_end, build_multiplier, insert_buffer_tree, MultiplierFrontEnd};
pub use netlist::{BitAssignment, CellCounts, Gate, GateId, GateKind, NetId, Netlist, NetlistBuilder};
pub use partition::{
    closed_form_partition, compare_table, detect_regions, recommend, DivergenceReport,
    RegionPartition, RegionRecommendation,
};
pub use study::{
    run_study, verify, OracleKind, StudyConfig, StudyEntry, StudyReport, VerifyMode, VerifyOutcome,
};
pub use timing::{ArrivalProfile, DelayModel};
