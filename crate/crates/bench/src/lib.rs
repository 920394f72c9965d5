//! Shared fixtures for the benchmark targets.

use symx_core::construction::{build_groups, ConstructionOutput, ConstructionParams};
use symx_core::PermGroup;

pub fn family(r: usize, s_is_s3: bool, m: usize) -> ConstructionOutput {
    let r_group = if r == 3 && s_is_s3 { PermGroup::symmetric(3) } else { PermGroup::cyclic(r) };
    let s_group = PermGroup::cyclic(2);
    let params = ConstructionParams::new(r_group, s_group, m).unwrap();
    build_groups(&params).unwrap()
}
