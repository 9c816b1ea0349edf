//! Two clusters of workstations joined by a backbone, each cluster connected
//! to the backbone through a switch, with a single repair unit shared by all
//! components.
//!
//! A state is `(left_n, left_r, right_n, right_r, busy, line_r, line_up,
//! toleft_r, toleft_up, toright_r, toright_up)`: the number of working
//! workstations per cluster, per-component "under repair" flags, the repair
//! unit's busy flag, and up flags for the backbone and both switches.

use crate::error::{Error, Result};
use crate::models::explore::{explore, ExploredChain, DEFAULT_STATE_LIMIT};

/// Workstation failure rate.
pub const WS_FAIL: f64 = 1.0 / 500.0;
/// Switch failure rate.
pub const SWITCH_FAIL: f64 = 1.0 / 4000.0;
/// Backbone failure rate.
pub const LINE_FAIL: f64 = 1.0 / 5000.0;
/// Rate at which the idle repair unit starts on a failed component.
pub const INSPECT: f64 = 10.0;
pub const WS_REPAIR: f64 = 2.0;
pub const SWITCH_REPAIR: f64 = 0.25;
pub const LINE_REPAIR: f64 = 0.125;

const LEFT_N: usize = 0;
const LEFT_R: usize = 1;
const RIGHT_N: usize = 2;
const RIGHT_R: usize = 3;
const BUSY: usize = 4;

/// `(under repair, up, repair rate, failure rate)` slots of the single components.
const COMPONENTS: [(usize, usize, f64, f64); 3] = [
    (5, 6, LINE_REPAIR, LINE_FAIL),
    (7, 8, SWITCH_REPAIR, SWITCH_FAIL),
    (9, 10, SWITCH_REPAIR, SWITCH_FAIL),
];

/// Initial state: everything working, repair unit idle.
pub fn initial_state(workstations: u32) -> Vec<u32> {
    vec![workstations, 0, workstations, 0, 0, 0, 1, 0, 1, 0, 1]
}

fn successors(n: u32, s: &[u32], out: &mut Vec<(f64, Vec<u32>)>) {
    let with = |changes: &[(usize, u32)]| {
        let mut t = s.to_vec();
        for &(i, v) in changes {
            t[i] = v;
        }
        t
    };
    let busy = s[BUSY] == 1;
    for (count, repairing) in [(LEFT_N, LEFT_R), (RIGHT_N, RIGHT_R)] {
        let working = s[count];
        let under_repair = s[repairing] == 1;
        if !under_repair && working < n && !busy {
            out.push((INSPECT, with(&[(repairing, 1), (BUSY, 1)])));
        }
        if under_repair && working < n && busy {
            out.push((
                WS_REPAIR,
                with(&[(repairing, 0), (count, working + 1), (BUSY, 0)]),
            ));
        }
        if working > 0 {
            out.push((WS_FAIL * f64::from(working), with(&[(count, working - 1)])));
        }
    }
    for (repairing, up, repair, fail) in COMPONENTS {
        let under_repair = s[repairing] == 1;
        let is_up = s[up] == 1;
        if !under_repair && !is_up && !busy {
            out.push((INSPECT, with(&[(repairing, 1), (BUSY, 1)])));
        }
        if under_repair && !is_up && busy {
            out.push((repair, with(&[(repairing, 0), (up, 1), (BUSY, 0)])));
        }
        if is_up {
            out.push((fail, with(&[(up, 0)])));
        }
    }
}

/// Reachable chain with `workstations` machines per cluster.
pub fn workstation_cluster(workstations: u32) -> Result<ExploredChain> {
    workstation_cluster_with_limit(workstations, DEFAULT_STATE_LIMIT)
}

pub fn workstation_cluster_with_limit(workstations: u32, limit: usize) -> Result<ExploredChain> {
    if workstations == 0 {
        return Err(Error::InvalidArgument(
            "a cluster needs at least one workstation".into(),
        ));
    }
    explore(initial_state(workstations), limit, |s, out| {
        successors(workstations, s, out)
    })
}
