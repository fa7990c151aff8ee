//! Grouping of structurally parallel moving links.
//!
//! Two moving links fall in one merged group when they hang between the
//! same neighbors (identical neighbor multisets), are not joined to each
//! other, are not joined to the ground, and none of them is annotated as
//! part of an equal-length group. Such links count as a single white patch
//! between black patches.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{natural_cmp, ValidatedMechanism};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MergeGroup {
    /// Member link ids in natural order.
    pub links: Vec<String>,
    pub merged: bool,
}

/// Partition of the moving links; groups are ordered by their first member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MergePartition {
    pub groups: Vec<MergeGroup>,
}

impl MergePartition {
    pub fn merged_groups(&self) -> impl Iterator<Item = &MergeGroup> {
        self.groups.iter().filter(|g| g.merged)
    }
}

pub(super) fn partition(m: &ValidatedMechanism) -> MergePartition {
    let ground = m.ground();
    let mut classes: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    let mut singles = Vec::new();
    for v in m.moving_links() {
        let mut neighbors: Vec<usize> = m.incident(v).iter().map(|&(_, w)| w).collect();
        if neighbors.contains(&ground) {
            singles.push(vec![v]);
            continue;
        }
        neighbors.sort_unstable();
        classes.entry(neighbors).or_default().push(v);
    }

    let mut groups: Vec<(Vec<usize>, bool)> = singles.into_iter().map(|g| (g, false)).collect();
    for members in classes.into_values() {
        let mergeable = members.len() >= 2
            && !members
                .iter()
                .any(|&v| m.links()[v].group.as_ref().is_some_and(|g| g.equal_lengths))
            && !members
                .iter()
                .any(|&v| m.incident(v).iter().any(|(_, w)| members.contains(w)));
        if mergeable {
            groups.push((members, true));
        } else {
            groups.extend(members.into_iter().map(|v| (vec![v], false)));
        }
    }

    let links = m.links();
    let mut groups: Vec<MergeGroup> = groups
        .into_iter()
        .map(|(members, merged)| {
            let mut ids: Vec<String> = members.iter().map(|&v| links[v].id.clone()).collect();
            ids.sort_by(|a, b| natural_cmp(a, b));
            MergeGroup { links: ids, merged }
        })
        .collect();
    groups.sort_by(|a, b| natural_cmp(&a.links[0], &b.links[0]));
    MergePartition { groups }
}
