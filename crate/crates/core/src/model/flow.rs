//! Unit-capacity max flow over the link-joint multigraph.

use std::collections::VecDeque;

use super::ValidatedMechanism;

struct Network {
    head: Vec<usize>,
    cap: Vec<u32>,
    adj: Vec<Vec<usize>>,
}

impl Network {
    fn new(nodes: usize) -> Self {
        Network {
            head: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    /// Adds `u -> v` with capacity `forward` and its residual twin with
    /// capacity `backward`. Arc `e ^ 1` is always the twin of arc `e`.
    fn arc(&mut self, u: usize, v: usize, forward: u32, backward: u32) {
        self.adj[u].push(self.head.len());
        self.head.push(v);
        self.cap.push(forward);
        self.adj[v].push(self.head.len());
        self.head.push(u);
        self.cap.push(backward);
    }

    fn max_flow(&mut self, source: usize, sink: usize) -> usize {
        let mut total = 0;
        loop {
            let mut via = vec![usize::MAX; self.adj.len()];
            let mut queue = VecDeque::from([source]);
            let mut seen = vec![false; self.adj.len()];
            seen[source] = true;
            while let Some(u) = queue.pop_front() {
                if u == sink {
                    break;
                }
                for &e in &self.adj[u] {
                    let v = self.head[e];
                    if self.cap[e] > 0 && !seen[v] {
                        seen[v] = true;
                        via[v] = e;
                        queue.push_back(v);
                    }
                }
            }
            if !seen[sink] {
                return total;
            }
            let mut v = sink;
            while v != source {
                let e = via[v];
                self.cap[e] -= 1;
                self.cap[e ^ 1] += 1;
                v = self.head[e ^ 1];
            }
            total += 1;
        }
    }
}

pub(super) fn edge_disjoint_paths(m: &ValidatedMechanism, from: usize, to: usize) -> usize {
    let mut net = Network::new(m.link_count());
    for j in 0..m.joint_count() {
        let (a, b) = m.joint_ends(j);
        // an undirected unit edge: either direction may carry the path
        net.arc(a, b, 1, 1);
    }
    net.max_flow(from, to)
}

pub(super) fn link_disjoint_paths(m: &ValidatedMechanism, from: usize, to: usize) -> usize {
    // link v becomes v_in = 2v and v_out = 2v + 1 joined by a unit arc;
    // the endpoints are not limited
    let n = m.link_count();
    let mut net = Network::new(2 * n);
    for v in 0..n {
        let through = if v == from || v == to {
            u32::MAX / 2
        } else {
            1
        };
        net.arc(2 * v, 2 * v + 1, through, 0);
    }
    for j in 0..m.joint_count() {
        let (a, b) = m.joint_ends(j);
        net.arc(2 * a + 1, 2 * b, 1, 0);
        net.arc(2 * b + 1, 2 * a, 1, 0);
    }
    net.max_flow(2 * from + 1, 2 * to)
}
