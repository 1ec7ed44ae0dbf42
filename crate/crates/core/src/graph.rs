//! Spreading networks and the rate parameters bound to them.
//!
//! An edge `(i, j)` means "`j` can tell `i`": node `j` influences node `i`,
//! and the rate matrices are indexed the same way (`beta_t[(i, j)]`).

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::seed::{derive_seed, rng_from_seed};

/// Retries (with incremented seed) before a generator gives up on strong
/// connectivity.
pub const MAX_REGENERATIONS: u64 = 100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedNetwork {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl DirectedNetwork {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::param(format!(
                    "edge ({i}, {j}) out of range for n = {n}"
                )));
            }
            if i == j {
                return Err(Error::param(format!("self-loop at node {i}")));
            }
            set.insert((i, j));
        }
        Ok(DirectedNetwork { n, edges: set })
    }

    /// Inserts both `(i, j)` and `(j, i)` for every undirected pair.
    pub fn symmetric(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut both = Vec::new();
        for (a, b) in pairs {
            both.push((a, b));
            both.push((b, a));
        }
        Self::new(n, both)
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)));
        Self::new(n, edges).expect("complete graph is valid")
    }

    /// Bidirectional ring where each node is linked to `k / 2` neighbours on
    /// either side.
    pub fn ring_lattice(n: usize, k: usize) -> Result<Self> {
        if !k.is_multiple_of(2) || k < 2 || k >= n {
            return Err(Error::param(format!(
                "ring lattice needs even 2 <= k < n, got k = {k}, n = {n}"
            )));
        }
        let pairs = (0..n).flat_map(|i| (1..=k / 2).map(move |d| (i, (i + d) % n)));
        Self::symmetric(n, pairs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i, j))
    }

    /// In-degree of `i`: number of nodes that can tell `i`.
    pub fn in_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(i, _) in &self.edges {
            d[i] += 1;
        }
        d
    }

    /// `succ[j]` lists the nodes that `j` can tell.
    pub fn influence_lists(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n];
        for &(i, j) in &self.edges {
            out[j].push(i);
        }
        out
    }

    fn transpose_lists(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n];
        for &(i, j) in &self.edges {
            out[i].push(j);
        }
        out
    }

    /// True iff every node reaches every other along directed edges.
    pub fn is_strongly_connected(&self) -> bool {
        self.n <= 1 || strongly_connected_components(&self.influence_lists()).len() == 1
    }

    /// Unweighted shortest-path lengths from `src` along influence direction;
    /// `None` for unreachable nodes.
    pub fn bfs_distances(&self, src: usize) -> Vec<Option<usize>> {
        bfs(&self.influence_lists(), src)
    }

    /// Mean shortest-path length over ordered reachable pairs.
    pub fn mean_shortest_path(&self) -> f64 {
        let adj = self.influence_lists();
        let (mut total, mut count) = (0usize, 0usize);
        for s in 0..self.n {
            for d in bfs(&adj, s).into_iter().flatten() {
                if d > 0 {
                    total += d;
                    count += 1;
                }
            }
        }
        if count == 0 {
            0.0
        } else {
            total as f64 / count as f64
        }
    }

    /// Forward and transpose reachability from node 0.
    pub fn reaches_all_both_ways(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let fwd = bfs(&self.influence_lists(), 0);
        let bwd = bfs(&self.transpose_lists(), 0);
        fwd.iter().chain(&bwd).all(Option::is_some)
    }

    /// Edge-list text: header `n <count>`, then one `i j` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("n {}\n", self.n);
        for (i, j) in self.edges() {
            writeln!(s, "{i} {j}").unwrap();
        }
        s
    }

    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .enumerate()
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::param("empty edge list"))?;
        let n = match header.split_whitespace().collect::<Vec<_>>()[..] {
            ["n", count] => count
                .parse::<usize>()
                .map_err(|_| Error::param(format!("bad node count `{count}`")))?,
            _ => {
                return Err(Error::param(format!(
                    "expected header `n <count>`, got `{header}`"
                )))
            }
        };
        let mut edges = Vec::new();
        for (lineno, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::param(format!("line {}: bad index `{s}`", lineno + 1)))
            };
            match parts[..] {
                [a, b] => edges.push((parse(a)?, parse(b)?)),
                _ => return Err(Error::param(format!("line {}: expected `i j`", lineno + 1))),
            }
        }
        Self::new(n, edges)
    }

    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_edge_list()).map_err(|e| Error::io(path, e))
    }

    pub fn read_edge_list(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_edge_list(&text)
    }
}

/// Tarjan's algorithm, iterative. Components come out in reverse
/// topological order of the condensation.
pub fn strongly_connected_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut components = Vec::new();
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < adj[v].len() {
                let w = adj[v][*pos];
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    components.push(comp);
                }
            }
        }
    }
    components
}

fn bfs(adj: &[Vec<usize>], src: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap();
        for &w in &adj[v] {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

fn regenerate<F>(seed: u64, mut build: F) -> Result<DirectedNetwork>
where
    F: FnMut(u64) -> Result<DirectedNetwork>,
{
    for attempt in 0..MAX_REGENERATIONS {
        let net = build(seed.wrapping_add(attempt))?;
        if net.is_strongly_connected() {
            return Ok(net);
        }
    }
    Err(Error::param(format!(
        "no strongly connected network after {MAX_REGENERATIONS} attempts from seed {seed}"
    )))
}

/// Barabási–Albert preferential attachment, each undirected link realised in
/// both directions. Starts from a complete graph on `m + 1` nodes.
pub fn generate_scale_free(n: usize, m: usize, seed: u64) -> Result<DirectedNetwork> {
    if m < 1 || n < m + 1 {
        return Err(Error::param(format!(
            "scale-free generator needs n >= m + 1 >= 2, got n = {n}, m = {m}"
        )));
    }
    regenerate(seed, |s| {
        let mut rng = rng_from_seed(s);
        let m0 = m + 1;
        let mut pairs = Vec::new();
        // every endpoint occurrence, so uniform picks are degree-proportional
        let mut endpoints = Vec::new();
        for a in 0..m0 {
            for b in a + 1..m0 {
                pairs.push((a, b));
                endpoints.push(a);
                endpoints.push(b);
            }
        }
        for v in m0..n {
            let mut targets = BTreeSet::new();
            while targets.len() < m {
                targets.insert(*endpoints.choose(&mut rng).expect("non-empty"));
            }
            for &t in &targets {
                pairs.push((v, t));
                endpoints.push(v);
                endpoints.push(t);
            }
        }
        DirectedNetwork::symmetric(n, pairs)
    })
}

/// Watts–Strogatz ring rewiring; surviving undirected links in both
/// directions.
pub fn generate_small_world(n: usize, k: usize, p: f64, seed: u64) -> Result<DirectedNetwork> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!(
            "rewiring probability {p} outside [0, 1]"
        )));
    }
    if !k.is_multiple_of(2) || k < 2 || k >= n {
        return Err(Error::param(format!(
            "small-world generator needs even 2 <= k < n, got k = {k}, n = {n}"
        )));
    }
    regenerate(seed, |s| {
        let mut rng = rng_from_seed(s);
        let mut links: BTreeSet<(usize, usize)> = BTreeSet::new();
        let key = |a: usize, b: usize| (a.min(b), a.max(b));
        for i in 0..n {
            for d in 1..=k / 2 {
                links.insert(key(i, (i + d) % n));
            }
        }
        for d in 1..=k / 2 {
            for i in 0..n {
                let old = key(i, (i + d) % n);
                if !links.contains(&old) || rng.random::<f64>() >= p {
                    continue;
                }
                let degree_i = links.iter().filter(|&&(a, b)| a == i || b == i).count();
                if degree_i >= n - 1 {
                    continue;
                }
                let target = loop {
                    let w = rng.random_range(0..n);
                    if w != i && !links.contains(&key(i, w)) {
                        break w;
                    }
                };
                links.remove(&old);
                links.insert(key(i, target));
            }
        }
        DirectedNetwork::symmetric(n, links)
    })
}

/// Rate constants bound to a pair of spreading networks.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub g_r: DirectedNetwork,
    pub g_t: DirectedNetwork,
    pub beta_u: Matrix,
    pub beta_t: Matrix,
    pub gamma_u: Matrix,
    pub gamma_r: Matrix,
    pub theta: Vec<f64>,
    pub delta: Vec<f64>,
}

impl ModelParams {
    /// Validates sizes, sparsity patterns against the networks, positivity of
    /// `theta`/`delta` and strong connectivity of both networks. A rate matrix
    /// must be positive exactly on its network's edges, or zero everywhere.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        g_r: DirectedNetwork,
        g_t: DirectedNetwork,
        beta_u: Matrix,
        beta_t: Matrix,
        gamma_u: Matrix,
        gamma_r: Matrix,
        theta: Vec<f64>,
        delta: Vec<f64>,
    ) -> Result<Self> {
        let p = ModelParams {
            g_r,
            g_t,
            beta_u,
            beta_t,
            gamma_u,
            gamma_r,
            theta,
            delta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.theta.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.g_r.n();
        if self.g_t.n() != n {
            return Err(Error::param("rumor and truth networks differ in size"));
        }
        for (name, m, net) in [
            ("betaU", &self.beta_u, &self.g_r),
            ("betaT", &self.beta_t, &self.g_r),
            ("gammaU", &self.gamma_u, &self.g_t),
            ("gammaR", &self.gamma_r, &self.g_t),
        ] {
            if m.n() != n {
                return Err(Error::param(format!(
                    "{name} is {0}x{0}, expected {n}x{n}",
                    m.n()
                )));
            }
            // an identically zero matrix switches the mechanism off
            let switched_off = m.as_slice().iter().all(|&v| v == 0.0);
            for i in 0..n {
                for j in 0..n {
                    let v = m[(i, j)];
                    if !(v.is_finite() && v >= 0.0) {
                        return Err(Error::param(format!(
                            "{name}[{i}][{j}] = {v} is not a nonnegative rate"
                        )));
                    }
                    if !switched_off && (v > 0.0) != net.contains(i, j) {
                        return Err(Error::param(format!(
                            "{name}[{i}][{j}] = {v} disagrees with the network edge set"
                        )));
                    }
                }
            }
        }
        for (name, v) in [("theta", &self.theta), ("delta", &self.delta)] {
            if v.len() != n {
                return Err(Error::param(format!(
                    "{name} has length {}, expected {n}",
                    v.len()
                )));
            }
            if let Some((i, x)) = v
                .iter()
                .enumerate()
                .find(|(_, x)| !(x.is_finite() && **x > 0.0))
            {
                return Err(Error::param(format!("{name}[{i}] = {x} must be positive")));
            }
        }
        if !self.g_r.is_strongly_connected() {
            return Err(Error::param(
                "rumor-spreading network is not strongly connected",
            ));
        }
        if !self.g_t.is_strongly_connected() {
            return Err(Error::param(
                "truth-spreading network is not strongly connected",
            ));
        }
        Ok(())
    }

    /// Uniform rates on the given networks: every edge of `g_r` gets
    /// `beta_u`/`beta_t`, every edge of `g_t` gets `gamma_u`/`gamma_r`.
    pub fn uniform(
        g_r: DirectedNetwork,
        g_t: DirectedNetwork,
        rates: [f64; 4],
        theta: f64,
        delta: f64,
    ) -> Result<Self> {
        let n = g_r.n();
        let fill = |net: &DirectedNetwork, v: f64| {
            let mut m = Matrix::zeros(n);
            for (i, j) in net.edges() {
                m[(i, j)] = v;
            }
            m
        };
        let (bu, bt) = (fill(&g_r, rates[0]), fill(&g_r, rates[1]));
        let (gu, gr) = (fill(&g_t, rates[2]), fill(&g_t, rates[3]));
        Self::new(g_r, g_t, bu, bt, gu, gr, vec![theta; n], vec![delta; n])
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ParamsDoc::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ParamsDoc = serde_json::from_str(text)?;
        doc.try_into()
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// On-disk layout of [`ModelParams`].
#[derive(Serialize, Deserialize)]
struct ParamsDoc {
    n: usize,
    #[serde(rename = "gR_edges")]
    g_r_edges: Vec<[usize; 2]>,
    #[serde(rename = "gT_edges")]
    g_t_edges: Vec<[usize; 2]>,
    #[serde(rename = "betaU")]
    beta_u: Matrix,
    #[serde(rename = "betaT")]
    beta_t: Matrix,
    #[serde(rename = "gammaU")]
    gamma_u: Matrix,
    #[serde(rename = "gammaR")]
    gamma_r: Matrix,
    theta: Vec<f64>,
    delta: Vec<f64>,
}

impl From<&ModelParams> for ParamsDoc {
    fn from(p: &ModelParams) -> Self {
        ParamsDoc {
            n: p.n(),
            g_r_edges: p.g_r.edges().map(|(i, j)| [i, j]).collect(),
            g_t_edges: p.g_t.edges().map(|(i, j)| [i, j]).collect(),
            beta_u: p.beta_u.clone(),
            beta_t: p.beta_t.clone(),
            gamma_u: p.gamma_u.clone(),
            gamma_r: p.gamma_r.clone(),
            theta: p.theta.clone(),
            delta: p.delta.clone(),
        }
    }
}

impl TryFrom<ParamsDoc> for ModelParams {
    type Error = Error;
    fn try_from(d: ParamsDoc) -> Result<Self> {
        let g_r = DirectedNetwork::new(d.n, d.g_r_edges.into_iter().map(|[i, j]| (i, j)))?;
        let g_t = DirectedNetwork::new(d.n, d.g_t_edges.into_iter().map(|[i, j]| (i, j)))?;
        ModelParams::new(
            g_r, g_t, d.beta_u, d.beta_t, d.gamma_u, d.gamma_r, d.theta, d.delta,
        )
    }
}

/// Number of rate groups swept by the factorial design.
pub const RATE_GROUPS: usize = 6;
/// Combinations of the 3-level full factorial over the six groups.
pub const COMBOS: usize = 729;

/// Three scale levels for each rate group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateLevels {
    #[serde(rename = "betaU")]
    pub beta_u: [f64; 3],
    #[serde(rename = "betaT")]
    pub beta_t: [f64; 3],
    #[serde(rename = "gammaU")]
    pub gamma_u: [f64; 3],
    #[serde(rename = "gammaR")]
    pub gamma_r: [f64; 3],
    pub theta: [f64; 3],
    pub delta: [f64; 3],
}

impl Default for RateLevels {
    fn default() -> Self {
        let l = [0.1, 0.3, 0.5];
        RateLevels {
            beta_u: l,
            beta_t: l,
            gamma_u: l,
            gamma_r: l,
            theta: l,
            delta: l,
        }
    }
}

impl RateLevels {
    fn groups(&self) -> [&[f64; 3]; RATE_GROUPS] {
        [
            &self.beta_u,
            &self.beta_t,
            &self.gamma_u,
            &self.gamma_r,
            &self.theta,
            &self.delta,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for g in self.groups() {
            if g.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::param(format!(
                    "rate levels {g:?} must be nonnegative"
                )));
            }
        }
        for (name, g) in [("theta", &self.theta), ("delta", &self.delta)] {
            if g.iter().any(|v| *v <= 0.0) {
                return Err(Error::param(format!("{name} levels must be positive")));
            }
        }
        Ok(())
    }

    /// Scale of each group for a combo: base-3 digit `k` (least significant
    /// first) selects the level of group `k` in the order
    /// betaU, betaT, gammaU, gammaR, theta, delta.
    pub fn scales(&self, combo_index: usize) -> Result<[f64; RATE_GROUPS]> {
        if combo_index >= COMBOS {
            return Err(Error::param(format!(
                "combo index {combo_index} outside [0, {COMBOS})"
            )));
        }
        let mut out = [0.0; RATE_GROUPS];
        let mut rest = combo_index;
        for (slot, g) in out.iter_mut().zip(self.groups()) {
            *slot = g[rest % 3];
            rest /= 3;
        }
        Ok(out)
    }
}

/// Rates for one factorial combination. Each edge (or node, for theta and
/// delta) gets `scale * u` with `u ~ Uniform(0.5, 1.5)`, drawn from a stream
/// keyed by `(seed, combo_index)`.
pub fn sample_params(
    g_r: &DirectedNetwork,
    g_t: &DirectedNetwork,
    levels: &RateLevels,
    combo_index: usize,
    seed: u64,
) -> Result<ModelParams> {
    levels.validate()?;
    let scales = levels.scales(combo_index)?;
    let n = g_r.n();
    let mut rng = rng_from_seed(derive_seed(seed, combo_index as u64));
    let mut jitter = move || 0.5 + rng.random::<f64>();
    let mut edge_rates = |net: &DirectedNetwork, scale: f64| {
        let mut m = Matrix::zeros(n);
        for (i, j) in net.edges() {
            m[(i, j)] = scale * jitter();
        }
        m
    };
    let beta_u = edge_rates(g_r, scales[0]);
    let beta_t = edge_rates(g_r, scales[1]);
    let gamma_u = edge_rates(g_t, scales[2]);
    let gamma_r = edge_rates(g_t, scales[3]);
    let theta = (0..n).map(|_| scales[4] * jitter()).collect();
    let delta = (0..n).map(|_| scales[5] * jitter()).collect();
    ModelParams::new(
        g_r.clone(),
        g_t.clone(),
        beta_u,
        beta_t,
        gamma_u,
        gamma_r,
        theta,
        delta,
    )
}
