//! Mechanism data model.
//!
//! A [`Mechanism`] is a multigraph: links are vertices, joints are edges
//! carrying 1 to 3 degrees of freedom. Exactly one link is the ground.
//! [`Mechanism::validate`] checks the structural invariants and produces a
//! [`ValidatedMechanism`], which caches index-based adjacency and is what
//! every analysis routine consumes.

mod flow;
mod iso;
mod merge;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub(crate) use iso::{canonical_code, Code};
pub use iso::{CanonicalForm, MAX_EXACT_LINKS};
pub use merge::{MergeGroup, MergePartition};

/// Geometric annotation shared by links of one parallel group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct LinkGroup {
    pub id: String,
    /// Equal-length members keep their individual white patches.
    pub equal_lengths: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Link {
    pub id: String,
    pub is_ground: bool,
    /// Forces the platform weighting of this link to `legs - 1`.
    pub platform_legs: Option<u32>,
    pub group: Option<LinkGroup>,
}

impl Link {
    pub fn new(id: impl Into<String>) -> Self {
        Link {
            id: id.into(),
            is_ground: false,
            platform_legs: None,
            group: None,
        }
    }

    pub fn ground(id: impl Into<String>) -> Self {
        Link {
            is_ground: true,
            ..Link::new(id)
        }
    }

    pub fn with_group(mut self, group: impl Into<String>, equal_lengths: bool) -> Self {
        self.group = Some(LinkGroup {
            id: group.into(),
            equal_lengths,
        });
        self
    }

    pub fn with_platform_legs(mut self, legs: u32) -> Self {
        self.platform_legs = Some(legs);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Joint {
    pub id: String,
    pub dof: u8,
    /// Free-form label such as `revolute` or `spherical`.
    pub kind: String,
    pub endpoints: (String, String),
}

impl Joint {
    pub fn new(
        id: impl Into<String>,
        dof: u8,
        kind: impl Into<String>,
        a: impl Into<String>,
        b: impl Into<String>,
    ) -> Self {
        Joint {
            id: id.into(),
            dof,
            kind: kind.into(),
            endpoints: (a.into(), b.into()),
        }
    }

    pub fn revolute(id: impl Into<String>, a: impl Into<String>, b: impl Into<String>) -> Self {
        Joint::new(id, 1, "revolute", a, b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MechanismClass {
    Open,
    Planar,
    Spatial,
}

impl MechanismClass {
    pub fn as_str(self) -> &'static str {
        match self {
            MechanismClass::Open => "open",
            MechanismClass::Planar => "planar",
            MechanismClass::Spatial => "spatial",
        }
    }
}

impl fmt::Display for MechanismClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mechanism {
    pub name: String,
    pub class: MechanismClass,
    pub links: Vec<Link>,
    pub joints: Vec<Joint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("no link is marked as ground")]
    NoGroundLink,
    #[error("multiple ground links: {}", .0.join(", "))]
    MultipleGroundLinks(Vec<String>),
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
    #[error("joint `{joint}` references unknown link `{link}`")]
    DanglingJointEndpoint { joint: String, link: String },
    #[error("joint `{0}` connects a link to itself")]
    SelfLoopJoint(String),
    #[error("joint `{joint}` has dof {dof}, expected 1, 2 or 3")]
    BadJointDof { joint: String, dof: u8 },
    #[error("link `{link}` declares {legs} platform legs, expected at least 2")]
    BadPlatformLegs { link: String, legs: u32 },
    #[error("links not connected to the rest of the mechanism: {}", .0.join(", "))]
    DisconnectedGraph(Vec<String>),
    #[error("class `open` but the graph has cycle rank {0}")]
    OpenClassHasLoop(usize),
}

/// Every invariant violation found by [`Mechanism::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
pub struct ValidationErrors(pub Vec<ValidationError>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("link `{0}` is the ground link")]
    LinkIsGround(String),
    #[error("unknown link `{0}`")]
    UnknownLink(String),
    #[error("mechanism has {links} links; exact isomorphism search is limited to {limit}")]
    TooLargeForExactSearch { links: usize, limit: usize },
}

impl Mechanism {
    pub fn new(name: impl Into<String>, class: MechanismClass) -> Self {
        Mechanism {
            name: name.into(),
            class,
            links: Vec::new(),
            joints: Vec::new(),
        }
    }

    pub fn link(mut self, link: Link) -> Self {
        self.links.push(link);
        self
    }

    pub fn joint(mut self, joint: Joint) -> Self {
        self.joints.push(joint);
        self
    }

    /// Checks every invariant and reports all violations at once.
    pub fn validate(&self) -> Result<ValidatedMechanism, ValidationErrors> {
        let mut errors = Vec::new();

        let mut index = HashMap::new();
        for (i, link) in self.links.iter().enumerate() {
            if index.insert(link.id.clone(), i).is_some() {
                errors.push(ValidationError::DuplicateId(link.id.clone()));
            }
            if let Some(legs) = link.platform_legs {
                if legs < 2 {
                    errors.push(ValidationError::BadPlatformLegs {
                        link: link.id.clone(),
                        legs,
                    });
                }
            }
        }
        let mut joint_ids = HashMap::new();
        for joint in &self.joints {
            if joint_ids.insert(joint.id.as_str(), ()).is_some() || index.contains_key(&joint.id) {
                errors.push(ValidationError::DuplicateId(joint.id.clone()));
            }
        }

        let grounds: Vec<usize> = (0..self.links.len())
            .filter(|&i| self.links[i].is_ground)
            .collect();
        match grounds.len() {
            0 => errors.push(ValidationError::NoGroundLink),
            1 => {}
            _ => errors.push(ValidationError::MultipleGroundLinks(
                grounds.iter().map(|&i| self.links[i].id.clone()).collect(),
            )),
        }

        let mut adjacency = vec![Vec::new(); self.links.len()];
        let mut ends = Vec::with_capacity(self.joints.len());
        for (j, joint) in self.joints.iter().enumerate() {
            if !(1..=3).contains(&joint.dof) {
                errors.push(ValidationError::BadJointDof {
                    joint: joint.id.clone(),
                    dof: joint.dof,
                });
            }
            let mut resolve = |id: &String| match index.get(id) {
                Some(&i) => Some(i),
                None => {
                    errors.push(ValidationError::DanglingJointEndpoint {
                        joint: joint.id.clone(),
                        link: id.clone(),
                    });
                    None
                }
            };
            let a = resolve(&joint.endpoints.0);
            let b = resolve(&joint.endpoints.1);
            if let (Some(a), Some(b)) = (a, b) {
                if a == b {
                    errors.push(ValidationError::SelfLoopJoint(joint.id.clone()));
                } else {
                    adjacency[a].push((j, b));
                    adjacency[b].push((j, a));
                    ends.push((a, b));
                    continue;
                }
            }
            ends.push((usize::MAX, usize::MAX));
        }

        if !self.links.is_empty() {
            let start = grounds.first().copied().unwrap_or(0);
            let seen = reachable(&adjacency, start);
            let lost: Vec<String> = (0..self.links.len())
                .filter(|&i| !seen[i])
                .map(|i| self.links[i].id.clone())
                .collect();
            if !lost.is_empty() {
                errors.push(ValidationError::DisconnectedGraph(lost));
            }
        }

        if self.class == MechanismClass::Open {
            let rank = (self.joints.len() + 1).saturating_sub(self.links.len());
            if rank > 0 {
                errors.push(ValidationError::OpenClassHasLoop(rank));
            }
        }

        if !errors.is_empty() {
            return Err(ValidationErrors(errors));
        }

        for list in &mut adjacency {
            list.sort_by(|&(ja, na), &(jb, nb)| {
                natural_cmp(&self.links[na].id, &self.links[nb].id)
                    .then_with(|| natural_cmp(&self.joints[ja].id, &self.joints[jb].id))
            });
        }
        Ok(ValidatedMechanism {
            mech: self.clone(),
            ground: grounds[0],
            index,
            adjacency,
            ends,
        })
    }
}

fn reachable(adjacency: &[Vec<(usize, usize)>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; adjacency.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for &(_, w) in &adjacency[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// A mechanism whose invariants hold, with index-based adjacency.
///
/// Link and joint indices follow the order of the underlying
/// [`Mechanism`]. Adjacency lists are sorted by neighbor id, then joint id,
/// using [`natural_cmp`].
#[derive(Debug, Clone)]
pub struct ValidatedMechanism {
    mech: Mechanism,
    ground: usize,
    index: HashMap<String, usize>,
    adjacency: Vec<Vec<(usize, usize)>>,
    ends: Vec<(usize, usize)>,
}

impl PartialEq for ValidatedMechanism {
    fn eq(&self, other: &Self) -> bool {
        self.mech == other.mech
    }
}

impl ValidatedMechanism {
    pub fn mechanism(&self) -> &Mechanism {
        &self.mech
    }

    pub fn name(&self) -> &str {
        &self.mech.name
    }

    pub fn class(&self) -> MechanismClass {
        self.mech.class
    }

    pub fn links(&self) -> &[Link] {
        &self.mech.links
    }

    pub fn joints(&self) -> &[Joint] {
        &self.mech.joints
    }

    pub fn link_count(&self) -> usize {
        self.mech.links.len()
    }

    pub fn joint_count(&self) -> usize {
        self.mech.joints.len()
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn link_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// `(joint, neighbor)` pairs incident to link `v`.
    pub fn incident(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Link indices joined by joint `j`, in declaration order.
    pub fn joint_ends(&self, j: usize) -> (usize, usize) {
        self.ends[j]
    }

    pub fn other_end(&self, j: usize, v: usize) -> usize {
        let (a, b) = self.ends[j];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn moving_links(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.link_count()).filter(move |&v| v != self.ground)
    }

    /// Number of joints incident to the ground link, parallel joints counted
    /// individually.
    pub fn ground_joint_count(&self) -> usize {
        self.degree(self.ground)
    }

    /// Independent loops of the link-joint graph: `J - N + 1`.
    pub fn cycle_rank(&self) -> usize {
        self.joint_count() + 1 - self.link_count()
    }

    /// Maximum number of joint-disjoint paths from the ground to `link`.
    pub fn ground_flow(&self, link: &str) -> Result<usize, ModelError> {
        let v = self.target(link)?;
        Ok(flow::edge_disjoint_paths(self, self.ground, v))
    }

    /// Maximum number of paths from the ground to `link` sharing neither a
    /// joint nor an intermediate link. Each such path is one serial leg.
    pub fn leg_count(&self, link: &str) -> Result<usize, ModelError> {
        let v = self.target(link)?;
        Ok(flow::link_disjoint_paths(self, self.ground, v))
    }

    pub(crate) fn leg_count_at(&self, v: usize) -> usize {
        flow::link_disjoint_paths(self, self.ground, v)
    }

    fn target(&self, link: &str) -> Result<usize, ModelError> {
        let v = self
            .link_index(link)
            .ok_or_else(|| ModelError::UnknownLink(link.to_string()))?;
        if v == self.ground {
            return Err(ModelError::LinkIsGround(link.to_string()));
        }
        Ok(v)
    }

    pub fn merge_partition(&self) -> MergePartition {
        merge::partition(self)
    }

    pub fn canonical_form(&self) -> Result<CanonicalForm, ModelError> {
        iso::canonical_form(self)
    }

    /// True iff a bijection of links and joints preserves incidence, joint
    /// dof and the ground flag. Limited to [`MAX_EXACT_LINKS`] links.
    pub fn is_isomorphic(&self, other: &ValidatedMechanism) -> Result<bool, ModelError> {
        if self.link_count() != other.link_count() || self.joint_count() != other.joint_count() {
            // still reject oversized inputs consistently
            for m in [self, other] {
                if m.link_count() > MAX_EXACT_LINKS {
                    return Err(ModelError::TooLargeForExactSearch {
                        links: m.link_count(),
                        limit: MAX_EXACT_LINKS,
                    });
                }
            }
            return Ok(false);
        }
        Ok(self.canonical_form()? == other.canonical_form()?)
    }
}

pub fn are_isomorphic(a: &ValidatedMechanism, b: &ValidatedMechanism) -> Result<bool, ModelError> {
    a.is_isomorphic(b)
}

/// Orders identifiers so that digit runs compare numerically
/// (`l2 < l10`), falling back to byte order on ties.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (mut x, mut y) = (a.as_bytes(), b.as_bytes());
    loop {
        match (x.first(), y.first()) {
            (None, None) => return a.cmp(b),
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(p), Some(q)) if p.is_ascii_digit() && q.is_ascii_digit() => {
                let dx = x.iter().take_while(|c| c.is_ascii_digit()).count();
                let dy = y.iter().take_while(|c| c.is_ascii_digit()).count();
                let nx = trim_zeros(&x[..dx]);
                let ny = trim_zeros(&y[..dy]);
                let ord = nx.len().cmp(&ny.len()).then_with(|| nx.cmp(ny));
                if ord != Ordering::Equal {
                    return ord;
                }
                x = &x[dx..];
                y = &y[dy..];
            }
            (Some(p), Some(q)) => {
                if p != q {
                    return p.cmp(q);
                }
                x = &x[1..];
                y = &y[1..];
            }
        }
    }
}

fn trim_zeros(digits: &[u8]) -> &[u8] {
    let zeros = digits.iter().take_while(|&&c| c == b'0').count();
    &digits[zeros..]
}
