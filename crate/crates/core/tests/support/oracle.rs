//! Brute-force references for route discovery, written without any of the
//! crate's traversal code: adjacency is rebuilt from positions, shortest
//! paths come from a plain queue BFS, and cooperative paths from exhaustive
//! DFS over simple paths.

use std::collections::VecDeque;

use coaodv_sim::coopmath::{distance, is_cooperative, mobility};
use coaodv_sim::model::{NodeId, NodeState, Scenario};

pub struct Graph<'a> {
    scenario: &'a Scenario,
    nodes: Vec<&'a NodeState>,
    adj: Vec<Vec<usize>>,
}

impl<'a> Graph<'a> {
    pub fn new(scenario: &'a Scenario) -> Self {
        let cfg = scenario.config();
        let mut nodes: Vec<&NodeState> = scenario.nodes().iter().collect();
        nodes.sort_by_key(|n| n.id);
        let adj = (0..nodes.len())
            .map(|i| {
                (0..nodes.len())
                    .filter(|&j| {
                        j != i
                            && distance(nodes[i].position(), nodes[j].position(), cfg.distance_metric)
                                <= cfg.transmission_range
                    })
                    .collect()
            })
            .collect();
        Graph { scenario, nodes, adj }
    }

    fn index(&self, id: NodeId) -> usize {
        self.nodes.iter().position(|n| n.id == id).expect("known node")
    }

    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        for (i, ns) in self.adj.iter().enumerate() {
            for &j in ns {
                if i < j {
                    out.push((self.nodes[i].id, self.nodes[j].id));
                }
            }
        }
        out
    }

    pub fn neighbors(&self, id: NodeId) -> Vec<NodeId> {
        self.adj[self.index(id)].iter().map(|&j| self.nodes[j].id).collect()
    }

    /// Shortest hop count, `None` when unreachable.
    pub fn bfs_shortest(&self, source: NodeId, dest: NodeId) -> Option<u32> {
        let (s, d) = (self.index(source), self.index(dest));
        let mut dist = vec![None; self.nodes.len()];
        dist[s] = Some(0u32);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            if v == d {
                return dist[v];
            }
            for &w in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(dist[v].unwrap() + 1);
                    queue.push_back(w);
                }
            }
        }
        None
    }

    fn all_simple_paths(&self, s: usize, d: usize) -> Vec<Vec<usize>> {
        fn dfs(g: &Graph, d: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            let v = *path.last().unwrap();
            if v == d {
                out.push(path.clone());
                return;
            }
            for &w in &g.adj[v] {
                if !path.contains(&w) {
                    path.push(w);
                    dfs(g, d, path, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        dfs(self, d, &mut vec![s], &mut out);
        out
    }

    /// Every intermediate passes the cooperative predicate, with the rivals
    /// of each relay being its predecessor's neighbors not yet on the path.
    pub fn path_is_cooperative(&self, path: &[usize]) -> bool {
        let cfg = self.scenario.config();
        (1..path.len().saturating_sub(1)).all(|k| {
            let prev = path[k - 1];
            let peers: Vec<&NodeState> = self.adj[prev]
                .iter()
                .filter(|u| !path[..k].contains(u))
                .map(|&u| self.nodes[u])
                .collect();
            let verdict = is_cooperative(self.nodes[path[k]], self.nodes[prev], &peers, cfg).unwrap();
            // Cross-check the verdict's mobility clause by hand.
            let m = |n: &NodeState| mobility(&n.mobility_record, cfg.mobility_metric).unwrap();
            let least = peers.iter().map(|n| m(n)).fold(f64::INFINITY, f64::min);
            assert_eq!(verdict.mobility_ok, m(self.nodes[path[k]]) <= least);
            verdict.cooperative
        })
    }

    /// Lowest hop count over fully cooperative simple paths, with the
    /// lexicographically smallest such path.
    pub fn cooperative_shortest(&self, source: NodeId, dest: NodeId) -> Option<(u32, Vec<NodeId>)> {
        let (s, d) = (self.index(source), self.index(dest));
        self.all_simple_paths(s, d)
            .into_iter()
            .filter(|p| self.path_is_cooperative(p))
            .map(|p| {
                let ids: Vec<NodeId> = p.iter().map(|&i| self.nodes[i].id).collect();
                ((p.len() - 1) as u32, ids)
            })
            .min()
    }

    /// Lexicographically smallest among all shortest simple paths.
    pub fn smallest_shortest_path(&self, source: NodeId, dest: NodeId) -> Option<Vec<NodeId>> {
        let (s, d) = (self.index(source), self.index(dest));
        self.all_simple_paths(s, d)
            .into_iter()
            .map(|p| (p.len(), p.iter().map(|&i| self.nodes[i].id).collect::<Vec<_>>()))
            .min()
            .map(|(_, p)| p)
    }
}
