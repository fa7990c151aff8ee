//! Zebra-crossing layout of a topology.
//!
//! A diagram is a list of columns, each a serial chain read from its base
//! (index 0, the ground attachment) upward. Joints expand into alternating
//! black and grey patches, links into white ones. A link is owned by the
//! first column that reaches it; later columns that touch it carry a
//! reference patch instead, so totals over owned patches equal the census.

mod render;

use std::collections::VecDeque;

use serde::Serialize;

use crate::analysis::draws_ground;
use crate::model::ValidatedMechanism;

pub use render::{render_svg, render_text};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PatchKind {
    Black,
    Grey,
    White,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Patch {
    pub kind: PatchKind,
    /// Joint id for black and grey patches, link id for white ones.
    pub label: String,
    /// A white patch standing for a link owned by another column.
    pub reference: bool,
    pub ground: bool,
}

impl Patch {
    fn black(label: &str) -> Self {
        Patch::new(PatchKind::Black, label)
    }

    fn grey(label: &str) -> Self {
        Patch::new(PatchKind::Grey, label)
    }

    fn new(kind: PatchKind, label: &str) -> Self {
        Patch {
            kind,
            label: label.to_string(),
            reference: false,
            ground: false,
        }
    }

    fn link(label: &str, ground: bool, reference: bool) -> Self {
        Patch {
            kind: PatchKind::White,
            label: label.to_string(),
            reference,
            ground,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ZebraDiagram {
    pub name: String,
    pub columns: Vec<Vec<Patch>>,
}

impl ZebraDiagram {
    pub fn owned(&self) -> impl Iterator<Item = &Patch> {
        self.columns.iter().flatten().filter(|p| !p.reference)
    }
}

/// Lays out every joint and link of `m`.
///
/// Chains start at the ground joints in adjacency order. A chain walks on
/// while the link just placed has exactly one joint left; at a branch or a
/// link already owned elsewhere the column ends, and any remaining joints
/// start new columns once every earlier chain has been drawn.
pub fn build_diagram(m: &ValidatedMechanism) -> ZebraDiagram {
    let ground = m.ground();
    let show_ground = draws_ground(m.class(), m.ground_joint_count() as u32);
    let mut link_done = vec![false; m.link_count()];
    let mut joint_done = vec![false; m.joint_count()];
    let mut columns: Vec<Vec<Patch>> = Vec::new();

    let link_patch =
        |v: usize, reference: bool| Patch::link(&m.links()[v].id, v == ground, reference);

    let mut queue: VecDeque<(usize, usize)> = m
        .incident(ground)
        .iter()
        .map(|&(j, _)| (ground, j))
        .collect();
    link_done[ground] = true;
    if queue.is_empty() || show_ground {
        let mut first = Vec::new();
        if show_ground {
            first.push(link_patch(ground, false));
        }
        columns.push(first);
    }

    let mut first_column = true;
    while let Some((base, joint)) = queue.pop_front() {
        if joint_done[joint] {
            continue;
        }
        let mut column = if first_column && show_ground {
            columns.pop().unwrap_or_default()
        } else if base != ground || show_ground {
            vec![link_patch(base, true)]
        } else {
            Vec::new()
        };
        first_column = false;

        let (mut at, mut via) = (base, joint);
        loop {
            joint_done[via] = true;
            let spec = &m.joints()[via];
            column.push(Patch::black(&spec.id));
            for _ in 1..spec.dof {
                column.push(Patch::grey(&spec.id));
                column.push(Patch::black(&spec.id));
            }
            let next = m.other_end(via, at);
            if link_done[next] {
                if next != ground || show_ground {
                    column.push(link_patch(next, true));
                }
                break;
            }
            link_done[next] = true;
            column.push(link_patch(next, false));
            let open: Vec<usize> = m
                .incident(next)
                .iter()
                .map(|&(j, _)| j)
                .filter(|&j| !joint_done[j])
                .collect();
            match open.as_slice() {
                [only] => {
                    at = next;
                    via = *only;
                }
                _ => {
                    queue.extend(open.into_iter().map(|j| (next, j)));
                    break;
                }
            }
        }
        columns.push(column);
    }

    ZebraDiagram {
        name: m.name().to_string(),
        columns,
    }
}

/// `(B, G, W)` over owned patches.
pub fn patch_totals(d: &ZebraDiagram) -> (u32, u32, u32) {
    d.owned().fold((0, 0, 0), |(b, g, w), p| match p.kind {
        PatchKind::Black => (b + 1, g, w),
        PatchKind::Grey => (b, g + 1, w),
        PatchKind::White => (b, g, w + 1),
    })
}

/// Output format of a rendered diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagramFormat {
    Text,
    Svg,
}

/// Conventional file name for a rendered diagram.
pub fn output_file_name(name: &str, format: DiagramFormat) -> String {
    match format {
        DiagramFormat::Text => format!("{name}.zebra.txt"),
        DiagramFormat::Svg => format!("{name}.zebra.svg"),
    }
}
