//! Exhaustive enumeration of small planar chains and a zebra versus
//! Kutzbach comparison over all of them.
//!
//! Chains are loop-carrying multigraphs of revolute joints. Each graph is
//! generated from a non-increasing degree sequence by filling its adjacency
//! matrix row by row, deduplicated by its canonical form, and then offered
//! every choice of ground link; grounded chains are deduplicated again with
//! the ground-aware canonical form.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{analyze, kutzbach_planar};
use crate::model::{canonical_code, CanonicalForm, Code, Joint, Link, Mechanism, MechanismClass};

/// Largest link count the enumerator accepts.
pub const MAX_LINKS: usize = 8;
/// Largest cycle rank the enumerator accepts.
pub const MAX_LOOPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationSpec {
    pub min_links: usize,
    pub max_links: usize,
    /// Chains with cycle rank `1..=max_loops` are produced.
    pub max_loops: usize,
    /// Allow several joints between the same pair of links.
    pub multi_joints: bool,
    /// Allow the ground link to carry a single joint.
    pub hanging_ground: bool,
}

impl Default for EnumerationSpec {
    fn default() -> Self {
        EnumerationSpec {
            min_links: 2,
            max_links: 6,
            max_loops: MAX_LOOPS,
            multi_joints: false,
            hanging_ground: false,
        }
    }
}

impl EnumerationSpec {
    pub fn up_to(max_links: usize) -> Self {
        EnumerationSpec {
            max_links,
            ..Self::default()
        }
    }

    /// Simple cycles with `min_links..=max_links` links.
    pub fn single_cycles(min_links: usize, max_links: usize) -> Self {
        EnumerationSpec {
            min_links,
            max_links,
            max_loops: 1,
            ..Self::default()
        }
    }

    fn check(&self) -> Result<(), XvalError> {
        if self.max_links > MAX_LINKS {
            return Err(XvalError::BoundsExceeded(format!(
                "max_links {} is above {MAX_LINKS}",
                self.max_links
            )));
        }
        if self.min_links < 2 || self.min_links > self.max_links {
            return Err(XvalError::BoundsExceeded(format!(
                "link range {}..={} is empty or starts below 2",
                self.min_links, self.max_links
            )));
        }
        if self.max_loops == 0 || self.max_loops > MAX_LOOPS {
            return Err(XvalError::BoundsExceeded(format!(
                "max_loops {} is outside 1..={MAX_LOOPS}",
                self.max_loops
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum XvalError {
    #[error("enumeration bounds exceeded: {0}")]
    BoundsExceeded(String),
}

struct Filler<'a> {
    n: usize,
    multi: bool,
    rem: Vec<usize>,
    mult: Vec<usize>,
    sink: &'a mut dyn FnMut(&[usize]),
}

impl Filler<'_> {
    fn fill(&mut self, i: usize, k: usize) {
        let n = self.n;
        if i + 1 >= n {
            if self.rem[n - 1] == 0 {
                (self.sink)(&self.mult);
            }
            return;
        }
        if k == n {
            if self.rem[i] == 0 {
                self.fill(i + 1, i + 2);
            }
            return;
        }
        if self.rem[k..].iter().sum::<usize>() < self.rem[i] {
            return;
        }
        let cap = if self.multi { self.rem[i] } else { 1 };
        let hi = self.rem[i].min(self.rem[k]).min(cap);
        for m in (0..=hi).rev() {
            self.mult[i * n + k] = m;
            self.rem[i] -= m;
            self.rem[k] -= m;
            self.fill(i, k + 1);
            self.rem[i] += m;
            self.rem[k] += m;
        }
        self.mult[i * n + k] = 0;
    }
}

fn degree_sequences(n: usize, total: usize, max_degree: usize, hanging: bool) -> Vec<Vec<usize>> {
    fn go(
        n: usize,
        left: usize,
        cap: usize,
        hanging: bool,
        seq: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let pos = seq.len();
        if pos == n {
            if left == 0 {
                out.push(seq.clone());
            }
            return;
        }
        let slots = n - pos;
        // only the last vertex may hang
        let lo = if hanging && slots == 1 { 1 } else { 2 };
        let min_rest = 2 * (slots - 1) - usize::from(hanging && slots > 1);
        for d in (lo..=cap.min(left)).rev() {
            if left - d < min_rest || left - d > d * (slots - 1) {
                continue;
            }
            seq.push(d);
            go(n, left - d, d, hanging, seq, out);
            seq.pop();
        }
    }
    let mut out = Vec::new();
    go(n, total, max_degree, hanging, &mut Vec::new(), &mut out);
    out
}

fn connected(n: usize, mult: &[usize]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for w in 0..n {
            let m = if v < w {
                mult[v * n + w]
            } else {
                mult[w * n + v]
            };
            if m > 0 && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn grounded_mechanism(form: &CanonicalForm) -> Mechanism {
    let mut m = Mechanism::new(form.id(), MechanismClass::Planar);
    for v in 0..form.links {
        let id = format!("l{}", v + 1);
        m = m.link(if v == form.ground {
            Link::ground(id)
        } else {
            Link::new(id)
        });
    }
    for (i, &(a, b, dof)) in form.joints.iter().enumerate() {
        m = m.joint(Joint::new(
            format!("j{}", i + 1),
            dof,
            "revolute",
            format!("l{}", a + 1),
            format!("l{}", b + 1),
        ));
    }
    m
}

/// Every grounded chain allowed by `spec`, one per isomorphism class, in
/// canonical id order. Links of the returned mechanisms are numbered by
/// canonical position, so the ground is always `l1`.
pub fn enumerate_chains(spec: &EnumerationSpec) -> Result<Vec<Mechanism>, XvalError> {
    spec.check()?;
    let mut grounded: BTreeMap<String, CanonicalForm> = BTreeMap::new();
    for n in spec.min_links..=spec.max_links {
        for loops in 1..=spec.max_loops {
            let joints = n - 1 + loops;
            let max_degree = if spec.multi_joints { joints } else { n - 1 };
            let mut seen: HashSet<Code> = HashSet::new();
            for degrees in degree_sequences(n, 2 * joints, max_degree, spec.hanging_ground) {
                let mut sink = |mult: &[usize]| {
                    if !connected(n, mult) {
                        return;
                    }
                    let mut edges = Vec::with_capacity(joints);
                    for a in 0..n {
                        for b in a + 1..n {
                            edges.extend(std::iter::repeat_n((a, b, 1u8), mult[a * n + b]));
                        }
                    }
                    let (code, _) = canonical_code(n, &edges, None);
                    if !seen.insert(code) {
                        return;
                    }
                    let degree =
                        |v: usize| edges.iter().filter(|&&(a, b, _)| a == v || b == v).count();
                    let hanging = (0..n).find(|&v| degree(v) == 1);
                    for g in 0..n {
                        if hanging.is_some_and(|h| h != g) {
                            continue;
                        }
                        let (code, order) = canonical_code(n, &edges, Some(g));
                        let form = CanonicalForm {
                            links: n,
                            ground: order[g] as usize,
                            joints: code,
                        };
                        grounded.entry(form.id()).or_insert(form);
                    }
                };
                let mut filler = Filler {
                    n,
                    multi: spec.multi_joints,
                    rem: degrees,
                    mult: vec![0; n * n],
                    sink: &mut sink,
                };
                filler.fill(0, 1);
            }
        }
    }
    Ok(grounded.values().map(grounded_mechanism).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XvalRow {
    pub id: String,
    pub n: usize,
    pub j: usize,
    pub zebra_m: i64,
    pub kutzbach_m: i64,
    pub agree: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct XvalSummary {
    pub total: usize,
    pub agree: usize,
    pub disagree: usize,
}

impl fmt::Display for XvalSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "total={} agree={} disagree={}",
            self.total, self.agree, self.disagree
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XvalReport {
    pub rows: Vec<XvalRow>,
    pub summary: XvalSummary,
}

impl XvalReport {
    /// Rows as CSV with the header `id,n,j,zebra_m,kutzbach_m,agree`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.rows.is_empty() {
            w.write_record(["id", "n", "j", "zebra_m", "kutzbach_m", "agree"])
                .expect("in-memory write");
        }
        for row in &self.rows {
            w.serialize(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }
}

/// Zebra mobility against planar Kutzbach for every enumerated chain.
pub fn cross_validate(spec: &EnumerationSpec) -> Result<XvalReport, XvalError> {
    let rows: Vec<XvalRow> = enumerate_chains(spec)?
        .into_iter()
        .map(|m| {
            let v = m.validate().expect("enumerated chains are valid");
            let zebra_m = analyze(&v).expect("closed planar chains classify").mobility;
            let n = v.link_count();
            let j = v.joint_count();
            let kutzbach_m = kutzbach_planar(n as u32, j as u32, 0);
            XvalRow {
                id: m.name,
                n,
                j,
                zebra_m,
                kutzbach_m,
                agree: zebra_m == kutzbach_m,
            }
        })
        .collect();
    let agree = rows.iter().filter(|r| r.agree).count();
    Ok(XvalReport {
        summary: XvalSummary {
            total: rows.len(),
            agree,
            disagree: rows.len() - agree,
        },
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds() {
        assert!(matches!(
            enumerate_chains(&EnumerationSpec::up_to(9)),
            Err(XvalError::BoundsExceeded(_))
        ));
        let spec = EnumerationSpec {
            max_loops: 4,
            ..EnumerationSpec::default()
        };
        assert!(enumerate_chains(&spec).is_err());
        assert!(enumerate_chains(&EnumerationSpec::single_cycles(1, 4)).is_err());
        assert!(enumerate_chains(&EnumerationSpec::single_cycles(5, 4)).is_err());
    }

    #[test]
    fn four_link_cycle_is_one_class() {
        let chains = enumerate_chains(&EnumerationSpec::single_cycles(4, 4)).unwrap();
        assert_eq!(chains.len(), 1);
        assert_eq!(chains[0].name, "4:01.02.13.23");
    }

    #[test]
    fn three_links_give_the_triangle() {
        let report = cross_validate(&EnumerationSpec::up_to(3)).unwrap();
        assert_eq!(report.rows.len(), 1);
        let row = &report.rows[0];
        assert_eq!(
            (row.n, row.j, row.zebra_m, row.kutzbach_m, row.agree),
            (3, 3, 0, 0, true)
        );
    }

    #[test]
    fn two_links_need_multi_joints() {
        assert!(enumerate_chains(&EnumerationSpec::up_to(2))
            .unwrap()
            .is_empty());
        let spec = EnumerationSpec {
            max_links: 2,
            max_loops: 1,
            multi_joints: true,
            ..EnumerationSpec::default()
        };
        let chains = enumerate_chains(&spec).unwrap();
        assert_eq!(chains.len(), 1);
        assert_eq!(chains[0].joints.len(), 2);
    }

    #[test]
    fn degree_sequences_are_graphical_candidates() {
        let seqs = degree_sequences(4, 10, 3, false);
        assert_eq!(seqs, vec![vec![3, 3, 2, 2]]);
        let seqs = degree_sequences(3, 6, 2, true);
        assert_eq!(seqs, vec![vec![2, 2, 2]]);
        let seqs = degree_sequences(3, 6, 4, true);
        assert!(seqs.contains(&vec![3, 2, 1]));
    }

    #[test]
    fn csv_header_and_summary() {
        let report = cross_validate(&EnumerationSpec::single_cycles(3, 5)).unwrap();
        let csv = report.to_csv();
        assert!(csv.starts_with("id,n,j,zebra_m,kutzbach_m,agree\n"));
        assert_eq!(csv.lines().count(), 1 + report.rows.len());
        assert_eq!(report.summary.total, 3);
        assert_eq!(report.summary.to_string(), "total=3 agree=3 disagree=0");
        let empty = cross_validate(&EnumerationSpec::up_to(2)).unwrap();
        assert_eq!(empty.to_csv(), "id,n,j,zebra_m,kutzbach_m,agree\n");
    }
}
