//! Generation and ingestion of small triangulations and disks, and the
//! exhaustive harness.

mod canon;
mod generate;
mod harness;
mod plantri;

pub use canon::{canonical_rooted, disk_code, rooted_code, triangulation_code, Code};
pub use generate::{
    default_outer_face, gen_disk_triangulations, gen_plane_triangulations, rooted_instances, DiskClass, EnumError,
    RootedInstance, MAX_DISK_N, MAX_TRIANGULATION_N,
};
pub use harness::{
    run_harness, run_harness_with, verify_witness, wheel, AssignmentMode, Check, CheckReport, ConditionSummary,
    ExclusionMode, HarnessConfig, HarnessError, HarnessReport, HarnessWitness, RunOptions, Summary, Totals, Verdict,
    WheelSummary, WitnessKey,
};
pub use plantri::{parse_planar_code, write_planar_code, PlantriError};
