//! Patch census, loop count and the three mobility formulas.
//!
//! A topology is expanded into patches: every joint with `f` freedoms
//! contributes `f` black and `f - 1` grey patches, every drawn link one
//! white patch. The loop count is `L = B - (W + G) + 1` and the mobility is
//! picked by branch:
//!
//! | branch               | mobility                   |
//! |----------------------|----------------------------|
//! | open loop (`L = 0`)  | `M = B`                    |
//! | planar, grey patches | `M = Ns - 4L - Jf + 1`     |
//! | planar, black/white  | `M = Nw - L - Jf + 1`      |
//! | spatial              | `M = Nw - L - Jf + 1`      |
//!
//! The ground patch is drawn for open and planar mechanisms and for spatial
//! ones with at most two ground joints; multi-legged spatial manipulators
//! leave it out. In `Nw`, merged parallel links count once and a spatial
//! platform reached by a separate leg from every ground joint counts
//! `legs - 1`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::{MechanismClass, ValidatedMechanism};
use crate::textfmt::{CountsClass, CountsRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ZebraCounts {
    /// B
    pub black: u32,
    /// G
    pub grey: u32,
    /// W
    pub white: u32,
    /// Nw: weighted white patches between black patches.
    pub white_between: u32,
    /// Ns: weighted white and grey patches between black patches.
    pub patches_between: Option<u32>,
    /// Jf: joints on the ground link.
    pub ground_joints: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    OpenLoop,
    PlanarWithGrey,
    PlanarBlackWhite,
    Spatial,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::OpenLoop => "open_loop",
            Branch::PlanarWithGrey => "planar_with_grey",
            Branch::PlanarBlackWhite => "planar_black_white",
            Branch::Spatial => "spatial",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("class `open` but the census has {0} loops")]
    OpenClassWithLoops(i64),
    #[error("negative loop count {0}; the census is inconsistent")]
    NegativeLoopCount(i64),
    #[error("class `planar_grey` requires an `Ns` count")]
    MissingNs,
}

/// Classical Kutzbach-Grübler values for one mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ComparisonEntry {
    pub links: u32,
    pub j1: u32,
    pub j2: u32,
    pub j3: u32,
    pub planar: i64,
    pub spatial: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MobilityReport {
    pub name: String,
    /// `open`, `planar`, `spatial`, or a counts-mode class.
    pub class: String,
    pub counts: ZebraCounts,
    pub loops: i64,
    pub branch: Branch,
    pub mobility: i64,
    /// Set when the formula yields a negative mobility.
    pub overconstrained: bool,
    pub kutzbach: Option<ComparisonEntry>,
}

/// Expands a validated topology into its patch census.
pub fn derive_counts(m: &ValidatedMechanism) -> ZebraCounts {
    let black: u32 = m.joints().iter().map(|j| u32::from(j.dof)).sum();
    let grey: u32 = m.joints().iter().map(|j| u32::from(j.dof) - 1).sum();
    let ground_joints = m.ground_joint_count() as u32;
    let moving = m.link_count() as u32 - 1;
    let white = if draws_ground(m.class(), ground_joints) {
        moving + 1
    } else {
        moving
    };

    let white_between = m
        .merge_partition()
        .groups
        .iter()
        .map(|group| {
            let members: Vec<usize> = group
                .links
                .iter()
                .map(|id| m.link_index(id).expect("partition lists known links"))
                .collect();
            if let Some(legs) = members.iter().find_map(|&v| m.links()[v].platform_legs) {
                return legs - 1;
            }
            let platform = m.class() == MechanismClass::Spatial
                && ground_joints >= 3
                && m.leg_count_at(members[0]) == ground_joints as usize;
            if platform {
                ground_joints - 1
            } else {
                1
            }
        })
        .sum();

    ZebraCounts {
        black,
        grey,
        white,
        white_between,
        patches_between: Some(white_between + grey),
        ground_joints,
    }
}

/// Whether the ground link is drawn as a white patch.
pub fn draws_ground(class: MechanismClass, ground_joints: u32) -> bool {
    class != MechanismClass::Spatial || ground_joints <= 2
}

/// `L = B - (W + G) + 1`
pub fn loop_count(c: &ZebraCounts) -> i64 {
    i64::from(c.black) - (i64::from(c.white) + i64::from(c.grey)) + 1
}

pub fn classify(
    class: MechanismClass,
    c: &ZebraCounts,
    loops: i64,
) -> Result<Branch, AnalysisError> {
    if loops < 0 {
        return Err(AnalysisError::NegativeLoopCount(loops));
    }
    if loops == 0 {
        return Ok(Branch::OpenLoop);
    }
    match class {
        MechanismClass::Open => Err(AnalysisError::OpenClassWithLoops(loops)),
        MechanismClass::Planar if c.grey > 0 => Ok(Branch::PlanarWithGrey),
        MechanismClass::Planar => Ok(Branch::PlanarBlackWhite),
        MechanismClass::Spatial => Ok(Branch::Spatial),
    }
}

/// `M = B`
pub fn dof_open(c: &ZebraCounts) -> i64 {
    i64::from(c.black)
}

/// `M = Ns - 4L - Jf + 1`
pub fn dof_planar_grey(c: &ZebraCounts, loops: i64) -> Result<i64, AnalysisError> {
    let ns = c.patches_between.ok_or(AnalysisError::MissingNs)?;
    Ok(i64::from(ns) - 4 * loops - i64::from(c.ground_joints) + 1)
}

/// `M = Nw - L - Jf + 1`
pub fn dof_general(c: &ZebraCounts, loops: i64) -> i64 {
    i64::from(c.white_between) - loops - i64::from(c.ground_joints) + 1
}

fn mobility(branch: Branch, c: &ZebraCounts, loops: i64) -> Result<i64, AnalysisError> {
    match branch {
        Branch::OpenLoop => Ok(dof_open(c)),
        Branch::PlanarWithGrey => dof_planar_grey(c, loops),
        Branch::PlanarBlackWhite | Branch::Spatial => Ok(dof_general(c, loops)),
    }
}

pub fn analyze(m: &ValidatedMechanism) -> Result<MobilityReport, AnalysisError> {
    let counts = derive_counts(m);
    let loops = loop_count(&counts);
    let branch = classify(m.class(), &counts, loops)?;
    let mobility = mobility(branch, &counts, loops)?;
    Ok(MobilityReport {
        name: m.name().to_string(),
        class: m.class().to_string(),
        counts,
        loops,
        branch,
        mobility,
        overconstrained: mobility < 0,
        kutzbach: Some(kutzbach(m)),
    })
}

/// Applies the formula selected by the record's class to a supplied census.
pub fn analyze_counts(r: &CountsRecord) -> Result<MobilityReport, AnalysisError> {
    let counts = ZebraCounts {
        black: r.black,
        grey: r.grey,
        white: r.white,
        white_between: r.white_between,
        patches_between: r.patches_between,
        ground_joints: r.ground_joints,
    };
    let loops = loop_count(&counts);
    let branch = if loops < 0 {
        return Err(AnalysisError::NegativeLoopCount(loops));
    } else if loops == 0 {
        Branch::OpenLoop
    } else {
        match r.class {
            CountsClass::Open => return Err(AnalysisError::OpenClassWithLoops(loops)),
            CountsClass::PlanarGrey => Branch::PlanarWithGrey,
            CountsClass::PlanarBw => Branch::PlanarBlackWhite,
            CountsClass::Spatial => Branch::Spatial,
        }
    };
    let mobility = mobility(branch, &counts, loops)?;
    Ok(MobilityReport {
        name: r.name.clone(),
        class: r.class.to_string(),
        counts,
        loops,
        branch,
        mobility,
        overconstrained: mobility < 0,
        kutzbach: None,
    })
}

/// Joints tallied by degrees of freedom.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct JointCensus {
    pub j1: u32,
    pub j2: u32,
    pub j3: u32,
}

impl JointCensus {
    pub fn of(m: &ValidatedMechanism) -> Self {
        let mut c = JointCensus::default();
        for j in m.joints() {
            match j.dof {
                1 => c.j1 += 1,
                2 => c.j2 += 1,
                _ => c.j3 += 1,
            }
        }
        c
    }
}

/// `M = 3(n - 1) - 2 j1 - j2`
pub fn kutzbach_planar(links: u32, j1: u32, j2: u32) -> i64 {
    3 * (i64::from(links) - 1) - 2 * i64::from(j1) - i64::from(j2)
}

/// `M = 6(n - 1) - sum(6 - f)`
pub fn kutzbach_spatial(links: u32, census: JointCensus) -> i64 {
    6 * (i64::from(links) - 1)
        - 5 * i64::from(census.j1)
        - 4 * i64::from(census.j2)
        - 3 * i64::from(census.j3)
}

pub fn kutzbach(m: &ValidatedMechanism) -> ComparisonEntry {
    let census = JointCensus::of(m);
    let links = m.link_count() as u32;
    ComparisonEntry {
        links,
        j1: census.j1,
        j2: census.j2,
        j3: census.j3,
        planar: kutzbach_planar(links, census.j1, census.j2),
        spatial: kutzbach_spatial(links, census),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KutzbachVariant {
    Planar,
    Spatial,
}

impl KutzbachVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            KutzbachVariant::Planar => "planar",
            KutzbachVariant::Spatial => "spatial",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub name: String,
    pub zebra: i64,
    pub kutzbach: ComparisonEntry,
    /// Planar for planar mechanisms, spatial otherwise.
    pub reference: KutzbachVariant,
    pub agree: bool,
}

pub fn compare(m: &ValidatedMechanism) -> Result<Comparison, AnalysisError> {
    let report = analyze(m)?;
    let kutzbach = kutzbach(m);
    let (reference, value) = match m.class() {
        MechanismClass::Planar => (KutzbachVariant::Planar, kutzbach.planar),
        _ => (KutzbachVariant::Spatial, kutzbach.spatial),
    };
    Ok(Comparison {
        name: report.name,
        zebra: report.mobility,
        kutzbach,
        reference,
        agree: report.mobility == value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;

    fn counts(black: u32, grey: u32, white: u32) -> ZebraCounts {
        ZebraCounts {
            black,
            grey,
            white,
            white_between: 0,
            patches_between: None,
            ground_joints: 0,
        }
    }

    fn between(nw: u32, ns: Option<u32>, jf: u32) -> ZebraCounts {
        ZebraCounts {
            white_between: nw,
            patches_between: ns,
            ground_joints: jf,
            ..counts(0, 0, 0)
        }
    }

    #[test]
    fn loop_formula() {
        assert_eq!(loop_count(&counts(4, 0, 4)), 1);
        assert_eq!(loop_count(&counts(1, 0, 2)), 0);
        assert_eq!(loop_count(&counts(21, 3, 13)), 6);
    }

    #[test]
    fn open_formula() {
        assert_eq!(dof_open(&counts(1, 0, 2)), 1);
        assert_eq!(dof_open(&counts(0, 0, 1)), 0);
        assert_eq!(dof_open(&counts(6, 0, 7)), 6);
    }

    #[test]
    fn planar_grey_formula() {
        assert_eq!(dof_planar_grey(&between(0, Some(10), 2), 1), Ok(5));
        assert_eq!(dof_planar_grey(&between(0, Some(4), 2), 1), Ok(-1));
        assert_eq!(dof_planar_grey(&between(0, Some(13), 3), 2), Ok(3));
        assert_eq!(
            dof_planar_grey(&between(0, None, 3), 2),
            Err(AnalysisError::MissingNs)
        );
    }

    #[test]
    fn general_formula() {
        assert_eq!(dof_general(&between(17, None, 6), 6), 6);
        assert_eq!(dof_general(&between(4, None, 2), 1), 2);
        assert_eq!(dof_general(&between(3, None, 2), 2), 0);
    }

    #[test]
    fn kutzbach_values() {
        assert_eq!(kutzbach_planar(4, 4, 0), 1);
        assert_eq!(kutzbach_planar(5, 5, 0), 2);
        assert_eq!(kutzbach_planar(5, 6, 0), 0);
        assert_eq!(
            kutzbach_spatial(
                14,
                JointCensus {
                    j1: 6,
                    j2: 6,
                    j3: 6
                }
            ),
            6
        );
        assert_eq!(
            kutzbach_spatial(
                4,
                JointCensus {
                    j1: 2,
                    j2: 0,
                    j3: 2
                }
            ),
            2
        );
        assert_eq!(
            kutzbach_spatial(
                11,
                JointCensus {
                    j1: 12,
                    j2: 0,
                    j3: 0
                }
            ),
            0
        );
    }

    #[test]
    fn classification() {
        let c = counts(4, 0, 4);
        assert_eq!(
            classify(MechanismClass::Open, &counts(1, 0, 2), 0),
            Ok(Branch::OpenLoop)
        );
        assert_eq!(
            classify(MechanismClass::Planar, &c, 1),
            Ok(Branch::PlanarBlackWhite)
        );
        assert_eq!(
            classify(MechanismClass::Planar, &counts(5, 1, 4), 1),
            Ok(Branch::PlanarWithGrey)
        );
        assert_eq!(
            classify(MechanismClass::Spatial, &c, 1),
            Ok(Branch::Spatial)
        );
        assert_eq!(
            classify(MechanismClass::Open, &c, 1),
            Err(AnalysisError::OpenClassWithLoops(1))
        );
    }

    #[test]
    fn four_bar_pipeline() {
        let v = four_bar().validate().unwrap();
        let r = analyze(&v).unwrap();
        assert_eq!(
            r.counts,
            ZebraCounts {
                black: 4,
                grey: 0,
                white: 4,
                white_between: 3,
                patches_between: Some(3),
                ground_joints: 2
            }
        );
        assert_eq!(
            (r.loops, r.branch, r.mobility),
            (1, Branch::PlanarBlackWhite, 1)
        );
        let cmp = compare(&v).unwrap();
        assert_eq!((cmp.zebra, cmp.kutzbach.planar, cmp.agree), (1, 1, true));
    }

    #[test]
    fn stewart_pipeline() {
        let v = stewart().validate().unwrap();
        let r = analyze(&v).unwrap();
        assert_eq!(
            (
                r.counts.black,
                r.counts.grey,
                r.counts.white,
                r.counts.white_between
            ),
            (36, 18, 13, 17)
        );
        assert_eq!((r.loops, r.branch, r.mobility), (6, Branch::Spatial, 6));
        assert_eq!(r.kutzbach.unwrap().spatial, 6);
    }

    #[test]
    fn helical_and_six_bar() {
        let r = analyze(&helical().validate().unwrap()).unwrap();
        assert_eq!((r.loops, r.branch, r.mobility), (0, Branch::OpenLoop, 1));
        let cmp = compare(&helical().validate().unwrap()).unwrap();
        assert_eq!(
            (cmp.reference, cmp.kutzbach.spatial, cmp.agree),
            (KutzbachVariant::Spatial, 1, true)
        );
        let r = analyze(&six_bar(false).validate().unwrap()).unwrap();
        assert_eq!(
            (r.counts.white, r.counts.white_between, r.loops, r.mobility),
            (6, 4, 2, 1)
        );
        let r = analyze(&six_bar(true).validate().unwrap()).unwrap();
        assert_eq!(r.mobility, 2);
    }

    #[test]
    fn platform_override() {
        let mut m = six_bar(false);
        m.links[4].platform_legs = Some(4);
        let r = analyze(&m.validate().unwrap()).unwrap();
        assert_eq!(r.counts.white_between, 4 - 1 + 3);
    }

    #[test]
    fn counts_records() {
        let rec = |class, black, grey, white, nw, ns, jf| CountsRecord {
            name: "r".into(),
            class,
            black,
            grey,
            white,
            white_between: nw,
            patches_between: ns,
            ground_joints: jf,
        };
        let r = analyze_counts(&rec(CountsClass::PlanarBw, 16, 0, 12, 7, None, 2)).unwrap();
        assert_eq!((r.loops, r.mobility), (5, 1));
        let r = analyze_counts(&rec(CountsClass::Spatial, 21, 6, 10, 11, None, 3)).unwrap();
        assert_eq!((r.loops, r.mobility), (6, 3));
        let r = analyze_counts(&rec(CountsClass::Open, 3, 0, 4, 0, None, 0)).unwrap();
        assert_eq!((r.loops, r.branch, r.mobility), (0, Branch::OpenLoop, 3));
        assert_eq!(
            analyze_counts(&rec(CountsClass::PlanarGrey, 5, 1, 3, 3, None, 2)),
            Err(AnalysisError::MissingNs)
        );
        let r = analyze_counts(&rec(CountsClass::PlanarGrey, 5, 1, 3, 3, Some(4), 2)).unwrap();
        assert_eq!((r.loops, r.mobility, r.overconstrained), (2, -5, true));
        assert_eq!(
            analyze_counts(&rec(CountsClass::Open, 4, 0, 4, 0, None, 0)),
            Err(AnalysisError::OpenClassWithLoops(1))
        );
        assert_eq!(
            analyze_counts(&rec(CountsClass::Spatial, 1, 0, 5, 0, None, 0)),
            Err(AnalysisError::NegativeLoopCount(-3))
        );
    }
}
