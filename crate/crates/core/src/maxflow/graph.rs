//! Boykov–Kolmogorov augmenting-path max-flow on a static graph.
//!
//! Two search trees grow from the terminals; an augmenting path is found when
//! they touch. Saturated tree edges orphan their subtrees, which are then
//! re-adopted or freed. Capacities are `i64` so flow values are exact.

use std::collections::VecDeque;

const NONE: u32 = u32::MAX;
const TERMINAL: u32 = u32::MAX - 1;
const ORPHAN: u32 = u32::MAX - 2;
const INF_DIST: u64 = u64::MAX;

/// Collects nodes and edges before freezing them into a [`FlowGraph`].
#[derive(Clone, Debug, Default)]
pub struct FlowGraphBuilder {
    nodes: usize,
    edges: Vec<(u32, u32, i64, i64)>,
}

impl FlowGraphBuilder {
    pub fn new(nodes: usize) -> Self {
        Self { nodes, edges: Vec::new() }
    }

    /// Adds `u → v` with capacity `cap` and `v → u` with capacity `rev_cap`.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: i64, rev_cap: i64) {
        debug_assert!(u != v && u < self.nodes && v < self.nodes);
        debug_assert!(cap >= 0 && rev_cap >= 0);
        self.edges.push((u as u32, v as u32, cap, rev_cap));
    }

    pub fn build(self) -> FlowGraph {
        let n = self.nodes;
        let mut first = vec![0u32; n + 1];
        for &(u, v, _, _) in &self.edges {
            first[u as usize + 1] += 1;
            first[v as usize + 1] += 1;
        }
        for i in 0..n {
            first[i + 1] += first[i];
        }
        let m = first[n] as usize;
        let mut fill = first.clone();
        let mut head = vec![0u32; m];
        let mut sister = vec![0u32; m];
        let mut cap = vec![0i64; m];
        for &(u, v, c, rc) in &self.edges {
            let a = fill[u as usize];
            fill[u as usize] += 1;
            let b = fill[v as usize];
            fill[v as usize] += 1;
            head[a as usize] = v;
            head[b as usize] = u;
            sister[a as usize] = b;
            sister[b as usize] = a;
            cap[a as usize] = c;
            cap[b as usize] = rc;
        }
        FlowGraph {
            first,
            head,
            sister,
            r_cap: cap.clone(),
            cap,
            tr_cap: vec![0; n],
            parent: vec![NONE; n],
            is_sink: vec![false; n],
            ts: vec![0; n],
            dist: vec![0; n],
            in_queue: vec![false; n],
            queue: VecDeque::new(),
            orphans: VecDeque::new(),
            time: 0,
            flow: 0,
        }
    }
}

/// A graph whose terminal capacities can be reset and re-solved.
#[derive(Clone, Debug)]
pub struct FlowGraph {
    first: Vec<u32>,
    head: Vec<u32>,
    sister: Vec<u32>,
    cap: Vec<i64>,
    r_cap: Vec<i64>,
    /// Residual terminal capacity: > 0 towards the source, < 0 towards the sink.
    tr_cap: Vec<i64>,
    parent: Vec<u32>,
    is_sink: Vec<bool>,
    ts: Vec<u64>,
    dist: Vec<u64>,
    in_queue: Vec<bool>,
    queue: VecDeque<u32>,
    orphans: VecDeque<u32>,
    time: u64,
    flow: i64,
}

impl FlowGraph {
    pub fn node_count(&self) -> usize {
        self.tr_cap.len()
    }

    /// Restores edge capacities and sets each node's net terminal capacity
    /// (`source - sink`). Flow through a node's two terminal edges is not
    /// counted; callers account for `min(source, sink)` themselves.
    pub fn reset(&mut self, terminal: &[i64]) {
        assert_eq!(terminal.len(), self.node_count());
        self.r_cap.copy_from_slice(&self.cap);
        self.tr_cap.copy_from_slice(terminal);
        self.flow = 0;
    }

    #[inline]
    fn arcs(&self, i: u32) -> std::ops::Range<u32> {
        self.first[i as usize]..self.first[i as usize + 1]
    }

    #[inline]
    fn set_active(&mut self, i: u32) {
        if !self.in_queue[i as usize] {
            self.in_queue[i as usize] = true;
            self.queue.push_back(i);
        }
    }

    fn next_active(&mut self) -> Option<u32> {
        while let Some(i) = self.queue.pop_front() {
            self.in_queue[i as usize] = false;
            if self.parent[i as usize] != NONE {
                return Some(i);
            }
        }
        None
    }

    #[inline]
    fn orphan_front(&mut self, i: u32) {
        self.parent[i as usize] = ORPHAN;
        self.orphans.push_front(i);
    }

    #[inline]
    fn orphan_rear(&mut self, i: u32) {
        self.parent[i as usize] = ORPHAN;
        self.orphans.push_back(i);
    }

    /// Runs max-flow from the current residual state and returns the flow
    /// pushed between the terminals.
    pub fn maxflow(&mut self) -> i64 {
        let n = self.node_count();
        self.queue.clear();
        self.orphans.clear();
        self.time = 0;
        for i in 0..n {
            self.in_queue[i] = false;
            self.ts[i] = 0;
            if self.tr_cap[i] > 0 {
                self.is_sink[i] = false;
                self.parent[i] = TERMINAL;
                self.dist[i] = 1;
                self.set_active(i as u32);
            } else if self.tr_cap[i] < 0 {
                self.is_sink[i] = true;
                self.parent[i] = TERMINAL;
                self.dist[i] = 1;
                self.set_active(i as u32);
            } else {
                self.parent[i] = NONE;
            }
        }

        let mut current: Option<u32> = None;
        loop {
            let i = match current.take() {
                Some(i) if self.parent[i as usize] != NONE => i,
                _ => match self.next_active() {
                    Some(i) => i,
                    None => break,
                },
            };
            let iu = i as usize;
            let mut middle = None;
            if !self.is_sink[iu] {
                for a in self.arcs(i) {
                    if self.r_cap[a as usize] == 0 {
                        continue;
                    }
                    let j = self.head[a as usize];
                    let ju = j as usize;
                    if self.parent[ju] == NONE {
                        self.is_sink[ju] = false;
                        self.parent[ju] = self.sister[a as usize];
                        self.ts[ju] = self.ts[iu];
                        self.dist[ju] = self.dist[iu] + 1;
                        self.set_active(j);
                    } else if self.is_sink[ju] {
                        middle = Some(a);
                        break;
                    } else if self.ts[ju] <= self.ts[iu] && self.dist[ju] > self.dist[iu] {
                        self.parent[ju] = self.sister[a as usize];
                        self.ts[ju] = self.ts[iu];
                        self.dist[ju] = self.dist[iu] + 1;
                    }
                }
            } else {
                for a in self.arcs(i) {
                    let s = self.sister[a as usize];
                    if self.r_cap[s as usize] == 0 {
                        continue;
                    }
                    let j = self.head[a as usize];
                    let ju = j as usize;
                    if self.parent[ju] == NONE {
                        self.is_sink[ju] = true;
                        self.parent[ju] = s;
                        self.ts[ju] = self.ts[iu];
                        self.dist[ju] = self.dist[iu] + 1;
                        self.set_active(j);
                    } else if !self.is_sink[ju] {
                        middle = Some(s);
                        break;
                    } else if self.ts[ju] <= self.ts[iu] && self.dist[ju] > self.dist[iu] {
                        self.parent[ju] = s;
                        self.ts[ju] = self.ts[iu];
                        self.dist[ju] = self.dist[iu] + 1;
                    }
                }
            }
            self.time += 1;
            if let Some(a) = middle {
                current = Some(i);
                self.augment(a);
                while let Some(o) = self.orphans.pop_front() {
                    if self.is_sink[o as usize] {
                        self.adopt_sink_orphan(o);
                    } else {
                        self.adopt_source_orphan(o);
                    }
                }
            }
        }
        self.flow
    }

    /// Pushes the bottleneck along source → `middle` → sink.
    fn augment(&mut self, middle: u32) {
        let m = middle as usize;
        let mut bottleneck = self.r_cap[m];

        let mut i = self.head[self.sister[m] as usize];
        loop {
            let a = self.parent[i as usize];
            if a == TERMINAL {
                break;
            }
            bottleneck = bottleneck.min(self.r_cap[self.sister[a as usize] as usize]);
            i = self.head[a as usize];
        }
        bottleneck = bottleneck.min(self.tr_cap[i as usize]);

        let mut i = self.head[m];
        loop {
            let a = self.parent[i as usize];
            if a == TERMINAL {
                break;
            }
            bottleneck = bottleneck.min(self.r_cap[a as usize]);
            i = self.head[a as usize];
        }
        bottleneck = bottleneck.min(-self.tr_cap[i as usize]);

        self.r_cap[self.sister[m] as usize] += bottleneck;
        self.r_cap[m] -= bottleneck;

        let mut i = self.head[self.sister[m] as usize];
        loop {
            let a = self.parent[i as usize];
            if a == TERMINAL {
                break;
            }
            let s = self.sister[a as usize] as usize;
            self.r_cap[a as usize] += bottleneck;
            self.r_cap[s] -= bottleneck;
            if self.r_cap[s] == 0 {
                self.orphan_front(i);
            }
            i = self.head[a as usize];
        }
        self.tr_cap[i as usize] -= bottleneck;
        if self.tr_cap[i as usize] == 0 {
            self.orphan_front(i);
        }

        let mut i = self.head[m];
        loop {
            let a = self.parent[i as usize];
            if a == TERMINAL {
                break;
            }
            let s = self.sister[a as usize] as usize;
            self.r_cap[s] += bottleneck;
            self.r_cap[a as usize] -= bottleneck;
            if self.r_cap[a as usize] == 0 {
                self.orphan_front(i);
            }
            i = self.head[a as usize];
        }
        self.tr_cap[i as usize] += bottleneck;
        if self.tr_cap[i as usize] == 0 {
            self.orphan_front(i);
        }

        self.flow += bottleneck;
    }

    /// Length of the tree path from `j` to its terminal, or `None` if the
    /// path runs into an orphan. Caches distances via the current timestamp.
    fn origin_distance(&mut self, mut j: u32) -> Option<u64> {
        let mut d = 0u64;
        loop {
            let ju = j as usize;
            if self.ts[ju] == self.time {
                return Some(d + self.dist[ju]);
            }
            let a = self.parent[ju];
            d += 1;
            if a == TERMINAL {
                self.ts[ju] = self.time;
                self.dist[ju] = 1;
                return Some(d);
            }
            if a == ORPHAN {
                return None;
            }
            j = self.head[a as usize];
        }
    }

    fn mark_path(&mut self, mut j: u32, mut d: u64) {
        while self.ts[j as usize] != self.time {
            self.ts[j as usize] = self.time;
            self.dist[j as usize] = d;
            d -= 1;
            j = self.head[self.parent[j as usize] as usize];
        }
    }

    fn adopt_source_orphan(&mut self, i: u32) {
        let mut best = NONE;
        let mut d_min = INF_DIST;
        for a0 in self.arcs(i) {
            if self.r_cap[self.sister[a0 as usize] as usize] == 0 {
                continue;
            }
            let j = self.head[a0 as usize];
            if self.is_sink[j as usize] || self.parent[j as usize] == NONE {
                continue;
            }
            if let Some(d) = self.origin_distance(j) {
                if d < d_min {
                    best = a0;
                    d_min = d;
                }
                self.mark_path(j, d);
            }
        }
        if best != NONE {
            self.parent[i as usize] = best;
            self.ts[i as usize] = self.time;
            self.dist[i as usize] = d_min + 1;
            return;
        }
        for a0 in self.arcs(i) {
            let j = self.head[a0 as usize];
            let a = self.parent[j as usize];
            if self.is_sink[j as usize] || a == NONE {
                continue;
            }
            if self.r_cap[self.sister[a0 as usize] as usize] > 0 {
                self.set_active(j);
            }
            if a != TERMINAL && a != ORPHAN && self.head[a as usize] == i {
                self.orphan_rear(j);
            }
        }
        self.parent[i as usize] = NONE;
    }

    fn adopt_sink_orphan(&mut self, i: u32) {
        let mut best = NONE;
        let mut d_min = INF_DIST;
        for a0 in self.arcs(i) {
            if self.r_cap[a0 as usize] == 0 {
                continue;
            }
            let j = self.head[a0 as usize];
            if !self.is_sink[j as usize] || self.parent[j as usize] == NONE {
                continue;
            }
            if let Some(d) = self.origin_distance(j) {
                if d < d_min {
                    best = a0;
                    d_min = d;
                }
                self.mark_path(j, d);
            }
        }
        if best != NONE {
            self.parent[i as usize] = best;
            self.ts[i as usize] = self.time;
            self.dist[i as usize] = d_min + 1;
            return;
        }
        for a0 in self.arcs(i) {
            let j = self.head[a0 as usize];
            let a = self.parent[j as usize];
            if !self.is_sink[j as usize] || a == NONE {
                continue;
            }
            if self.r_cap[a0 as usize] > 0 {
                self.set_active(j);
            }
            if a != TERMINAL && a != ORPHAN && self.head[a as usize] == i {
                self.orphan_rear(j);
            }
        }
        self.parent[i as usize] = NONE;
    }

    /// Nodes reachable from the source in the residual graph: the minimal
    /// source side among all minimum cuts.
    pub fn source_side(&self) -> Vec<bool> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut stack: Vec<u32> = (0..n as u32).filter(|&i| self.tr_cap[i as usize] > 0).collect();
        for &i in &stack {
            seen[i as usize] = true;
        }
        while let Some(i) = stack.pop() {
            for a in self.arcs(i) {
                let j = self.head[a as usize];
                if self.r_cap[a as usize] > 0 && !seen[j as usize] {
                    seen[j as usize] = true;
                    stack.push(j);
                }
            }
        }
        seen
    }
}
