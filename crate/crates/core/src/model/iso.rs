//! Exact canonical labeling for desk-scale mechanisms.
//!
//! Color refinement followed by exhaustive individualization. Every leaf of
//! the search tree is a discrete ordering of the links; the canonical form is
//! the lexicographically smallest joint list over all leaves. Branches are
//! pruned only through automorphisms (twin links and automorphisms found at
//! earlier leaves), so the result does not depend on input labeling.

use std::fmt::Write as _;

use serde::Serialize;

use super::{ModelError, ValidatedMechanism};

/// Largest link count accepted by the exact search.
pub const MAX_EXACT_LINKS: usize = 12;

/// Label-independent encoding of a mechanism's structure.
///
/// Links are numbered `0..links`; the ground link always receives 0.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CanonicalForm {
    pub links: usize,
    pub ground: usize,
    /// `(a, b, dof)` with `a <= b`, sorted.
    pub joints: Vec<(usize, usize, u8)>,
}

impl CanonicalForm {
    /// Compact textual id such as `4:01.03.12.23`. Positions are base-36
    /// digits; a joint with dof other than 1 carries a `^dof` suffix.
    pub fn id(&self) -> String {
        let digit = |v: usize| std::char::from_digit(v as u32, 36).unwrap_or('?');
        let mut out = format!("{}:", self.links);
        for (i, &(a, b, dof)) in self.joints.iter().enumerate() {
            if i > 0 {
                out.push('.');
            }
            out.push(digit(a));
            out.push(digit(b));
            if dof != 1 {
                let _ = write!(out, "^{dof}");
            }
        }
        out
    }
}

pub(crate) type Code = Vec<(usize, usize, u8)>;

/// Own color and sorted `(neighbor color, joint dofs)` pairs.
type Signature<'m> = (u32, Vec<(u32, &'m [u8])>);

struct Search<'a> {
    n: usize,
    ground: Option<usize>,
    /// Sorted dof multiset per ordered link pair.
    mat: Vec<Vec<Vec<u8>>>,
    joints: &'a [(usize, usize, u8)],
    best: Option<(Code, Vec<u32>)>,
    automorphisms: Vec<Vec<usize>>,
}

pub(super) fn canonical_form(m: &ValidatedMechanism) -> Result<CanonicalForm, ModelError> {
    let n = m.link_count();
    if n > MAX_EXACT_LINKS {
        return Err(ModelError::TooLargeForExactSearch {
            links: n,
            limit: MAX_EXACT_LINKS,
        });
    }
    let joints: Vec<(usize, usize, u8)> = (0..m.joint_count())
        .map(|j| {
            let (a, b) = m.joint_ends(j);
            (a, b, m.joints()[j].dof)
        })
        .collect();
    let (code, order) = canonical_code(n, &joints, Some(m.ground()));
    Ok(CanonicalForm {
        links: n,
        ground: order[m.ground()] as usize,
        joints: code,
    })
}

/// Canonical joint list of a multigraph on `0..n`, optionally with a
/// distinguished ground vertex, and the position given to each vertex.
pub(crate) fn canonical_code(
    n: usize,
    joints: &[(usize, usize, u8)],
    ground: Option<usize>,
) -> (Code, Vec<u32>) {
    let mut mat = vec![vec![Vec::new(); n]; n];
    for &(a, b, dof) in joints {
        mat[a][b].push(dof);
        mat[b][a].push(dof);
    }
    for row in &mut mat {
        for cell in row {
            cell.sort_unstable();
        }
    }
    let mut search = Search {
        n,
        ground,
        mat,
        joints,
        best: None,
        automorphisms: Vec::new(),
    };
    let colors: Vec<u32> = (0..n)
        .map(|v| u32::from(ground.is_some_and(|g| v != g)))
        .collect();
    let mut prefix = Vec::new();
    search.explore(colors, &mut prefix);
    search.best.expect("search visits at least one leaf")
}

impl Search<'_> {
    fn explore(&mut self, mut colors: Vec<u32>, prefix: &mut Vec<usize>) {
        self.refine(&mut colors);
        let cells = cell_count(&colors);
        if cells == self.n {
            self.leaf(colors);
            return;
        }

        // first non-singleton cell in color order
        let mut sizes = vec![0usize; cells];
        for &c in &colors {
            sizes[c as usize] += 1;
        }
        let target = sizes.iter().position(|&s| s > 1).unwrap() as u32;
        let cell: Vec<usize> = (0..self.n).filter(|&v| colors[v] == target).collect();

        let mut explored: Vec<usize> = Vec::new();
        for &v in &cell {
            if explored.iter().any(|&w| self.twins(v, w)) {
                continue;
            }
            if !explored.is_empty() && self.same_orbit(v, &explored, prefix) {
                continue;
            }
            let child = individualize(&colors, v);
            prefix.push(v);
            self.explore(child, prefix);
            prefix.pop();
            explored.push(v);
        }
    }

    fn refine(&self, colors: &mut Vec<u32>) {
        let mut cells = cell_count(colors);
        loop {
            let signatures: Vec<Signature> = (0..self.n)
                .map(|v| {
                    let mut sig: Vec<(u32, &[u8])> = (0..self.n)
                        .filter(|&w| !self.mat[v][w].is_empty())
                        .map(|w| (colors[w], self.mat[v][w].as_slice()))
                        .collect();
                    sig.sort_unstable();
                    (colors[v], sig)
                })
                .collect();
            let mut distinct: Vec<&Signature> = signatures.iter().collect();
            distinct.sort_unstable();
            distinct.dedup();
            let next: Vec<u32> = signatures
                .iter()
                .map(|s| distinct.binary_search(&s).unwrap() as u32)
                .collect();
            let refined = distinct.len();
            *colors = next;
            if refined == cells {
                return;
            }
            cells = refined;
        }
    }

    fn leaf(&mut self, order: Vec<u32>) {
        let mut code: Code = self
            .joints
            .iter()
            .map(|&(a, b, dof)| {
                let (pa, pb) = (order[a] as usize, order[b] as usize);
                (pa.min(pb), pa.max(pb), dof)
            })
            .collect();
        code.sort_unstable();
        debug_assert!(self.ground.is_none_or(|g| order[g] == 0));
        match &self.best {
            None => self.best = Some((code, order)),
            Some((best, best_order)) => {
                if code == *best {
                    // v -> w with best_order[w] == order[v]
                    let mut at = vec![0usize; self.n];
                    for (w, &p) in best_order.iter().enumerate() {
                        at[p as usize] = w;
                    }
                    let map = order.iter().map(|&p| at[p as usize]).collect();
                    self.automorphisms.push(map);
                } else if code < *best {
                    self.best = Some((code, order));
                }
            }
        }
    }

    /// Swapping twins `v` and `w` is an automorphism of the colored graph.
    fn twins(&self, v: usize, w: usize) -> bool {
        (0..self.n)
            .filter(|&x| x != v && x != w)
            .all(|x| self.mat[v][x] == self.mat[w][x])
    }

    fn same_orbit(&self, v: usize, explored: &[usize], prefix: &[usize]) -> bool {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for map in &self.automorphisms {
            if prefix.iter().any(|&p| map[p] != p) {
                continue;
            }
            for (x, &y) in map.iter().enumerate() {
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                parent[rx] = ry;
            }
        }
        let root = find(&mut parent, v);
        explored.iter().any(|&w| find(&mut parent, w) == root)
    }
}

fn cell_count(colors: &[u32]) -> usize {
    colors.iter().max().map_or(0, |&c| c as usize + 1)
}

fn individualize(colors: &[u32], v: usize) -> Vec<u32> {
    let target = colors[v];
    let doubled: Vec<u32> = colors
        .iter()
        .enumerate()
        .map(|(u, &c)| 2 * c + u32::from(c == target && u != v))
        .collect();
    let mut distinct = doubled.clone();
    distinct.sort_unstable();
    distinct.dedup();
    doubled
        .iter()
        .map(|c| distinct.binary_search(c).unwrap() as u32)
        .collect()
}

#[cfg(test)]
mod tests {
    use crate::model::fixtures::*;
    use crate::model::*;

    fn relabel(m: &Mechanism, perm: &[usize]) -> Mechanism {
        let name = |i: usize| format!("x{}", perm[i]);
        let pos = |id: &str| m.links.iter().position(|l| l.id == id).unwrap();
        let mut out = Mechanism::new(m.name.clone(), m.class);
        let mut links: Vec<Link> = m
            .links
            .iter()
            .enumerate()
            .map(|(i, l)| Link {
                id: name(i),
                ..l.clone()
            })
            .collect();
        links.reverse();
        out.links = links;
        out.joints = m
            .joints
            .iter()
            .rev()
            .map(|j| Joint {
                endpoints: (name(pos(&j.endpoints.1)), name(pos(&j.endpoints.0))),
                ..j.clone()
            })
            .collect();
        out
    }

    #[test]
    fn relabeled_four_bar_is_isomorphic() {
        let a = four_bar().validate().unwrap();
        let b = relabel(&four_bar(), &[3, 0, 2, 1]).validate().unwrap();
        assert!(are_isomorphic(&a, &b).unwrap());
        assert!(are_isomorphic(&a, &a).unwrap());
        assert_eq!(a.canonical_form().unwrap(), b.canonical_form().unwrap());
    }

    #[test]
    fn four_bar_and_five_bar_differ() {
        let a = four_bar().validate().unwrap();
        let b = five_bar().validate().unwrap();
        assert!(!are_isomorphic(&a, &b).unwrap());
    }

    #[test]
    fn ground_flag_and_dof_matter() {
        let a = Mechanism::new("a", MechanismClass::Planar)
            .link(Link::ground("g"))
            .link(Link::new("x"))
            .link(Link::new("y"))
            .joint(Joint::revolute("j1", "g", "x"))
            .joint(Joint::revolute("j2", "x", "y"));
        let b = Mechanism::new("b", MechanismClass::Planar)
            .link(Link::new("g"))
            .link(Link::ground("x"))
            .link(Link::new("y"))
            .joint(Joint::revolute("j1", "g", "x"))
            .joint(Joint::revolute("j2", "x", "y"));
        let c = Mechanism::new("c", MechanismClass::Planar)
            .link(Link::ground("g"))
            .link(Link::new("x"))
            .link(Link::new("y"))
            .joint(Joint::new("j1", 2, "universal", "g", "x"))
            .joint(Joint::revolute("j2", "x", "y"));
        let (a, b, c) = (
            a.validate().unwrap(),
            b.validate().unwrap(),
            c.validate().unwrap(),
        );
        assert!(!are_isomorphic(&a, &b).unwrap());
        assert!(!are_isomorphic(&a, &c).unwrap());
    }

    #[test]
    fn canonical_id_of_four_bar() {
        let f = four_bar().validate().unwrap().canonical_form().unwrap();
        assert_eq!(f.ground, 0);
        assert_eq!(f.id(), "4:01.02.13.23");
    }

    #[test]
    fn large_mechanisms_are_rejected() {
        let s = stewart().validate().unwrap();
        assert_eq!(
            s.canonical_form(),
            Err(ModelError::TooLargeForExactSearch {
                links: 14,
                limit: MAX_EXACT_LINKS
            })
        );
        assert!(are_isomorphic(&s, &s).is_err());
    }

    #[test]
    fn wide_star_terminates_quickly() {
        let mut m = Mechanism::new("star", MechanismClass::Open).link(Link::ground("g"));
        for i in 0..11 {
            m = m.link(Link::new(format!("a{i}"))).joint(Joint::revolute(
                format!("j{i}"),
                "g",
                format!("a{i}"),
            ));
        }
        let v = m.validate().unwrap();
        let f = v.canonical_form().unwrap();
        assert_eq!(f.joints.len(), 11);
    }
}
