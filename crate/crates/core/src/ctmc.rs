//! The original URQT Markov chain on `4^n` joint states.
//!
//! Two routes to the node marginals: integrating the forward equation of the
//! full chain (small `n` only), and averaging Gillespie sample paths.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ModelParams;
use crate::matrix::{Matrix, SparseRows};
use crate::ode::Dopri5;
use crate::seed::{derive_seed, rng_from_seed};
use crate::trajectory::Trajectory;

/// Largest `n` whose generator may be built (`4^8 = 65536` states).
pub const MAX_GENERATOR_NODES: usize = 8;
/// Largest `n` for the forward-equation solver (`4^6 = 4096` states).
pub const MAX_EXACT_NODES: usize = 6;
/// Largest `n` for which a dense generator is materialised.
pub const MAX_DENSE_NODES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum NodeState {
    Uncertain = 0,
    Rumor = 1,
    Quarantined = 2,
    Truth = 3,
}

impl NodeState {
    pub const ALL: [NodeState; 4] = [
        NodeState::Uncertain,
        NodeState::Rumor,
        NodeState::Quarantined,
        NodeState::Truth,
    ];

    pub fn from_digit(d: usize) -> Option<Self> {
        Self::ALL.get(d).copied()
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Joint state of the network, one [`NodeState`] per node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OsnState(pub Vec<NodeState>);

impl OsnState {
    pub fn uniform(n: usize, s: NodeState) -> Self {
        OsnState(vec![s; n])
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// `sum_k state[k] * 4^k`.
    pub fn encode(&self) -> usize {
        self.0
            .iter()
            .rev()
            .fold(0usize, |acc, s| acc * 4 + s.index())
    }

    pub fn decode(mut code: usize, n: usize) -> Self {
        let mut v = Vec::with_capacity(n);
        for _ in 0..n {
            v.push(NodeState::ALL[code % 4]);
            code /= 4;
        }
        OsnState(v)
    }

    /// One uniformly chosen rumor-spreader, a distinct uniformly chosen
    /// truth-believer, everyone else uncertain. Needs `n >= 2`.
    pub fn seeded_outbreak(n: usize, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("an outbreak needs at least two nodes"));
        }
        let mut rng = rng_from_seed(seed);
        let spreader = rng.random_range(0..n);
        let mut believer = rng.random_range(0..n - 1);
        if believer >= spreader {
            believer += 1;
        }
        let mut s = OsnState::uniform(n, NodeState::Uncertain);
        s.0[spreader] = NodeState::Rumor;
        s.0[believer] = NodeState::Truth;
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub node: usize,
    pub to: NodeState,
    pub rate: f64,
}

fn legal(from: NodeState, to: NodeState) -> bool {
    use NodeState::*;
    matches!(
        (from, to),
        (Uncertain, Rumor)
            | (Truth, Rumor)
            | (Uncertain, Truth)
            | (Rumor, Truth)
            | (Rumor, Quarantined)
            | (Quarantined, Truth)
    )
}

/// Positive-rate single-node transitions out of `state`.
pub fn transition_rates(params: &ModelParams, state: &OsnState) -> Vec<Transition> {
    use NodeState::*;
    let x = &state.0;
    let pressure = |m: &Matrix, i: usize, src: NodeState| -> f64 {
        (0..x.len())
            .filter(|&k| x[k] == src)
            .map(|k| m[(i, k)])
            .sum()
    };
    let mut out = Vec::new();
    let mut push = |node, to, rate: f64| {
        if rate > 0.0 {
            out.push(Transition { node, to, rate });
        }
    };
    for (i, &s) in x.iter().enumerate() {
        match s {
            Uncertain => {
                push(i, Rumor, pressure(&params.beta_u, i, Rumor));
                push(i, Truth, pressure(&params.gamma_u, i, Truth));
            }
            Rumor => {
                push(i, Quarantined, params.theta[i]);
                push(i, Truth, pressure(&params.gamma_r, i, Truth));
            }
            Quarantined => push(i, Truth, params.delta[i]),
            Truth => push(i, Rumor, pressure(&params.beta_t, i, Rumor)),
        }
    }
    out
}

/// Infinitesimal generator in from-state -> to-state orientation: row `a`
/// holds the rates out of joint state `a`, and the forward equation is
/// `ds/dt = s G`.
#[derive(Debug, Clone)]
pub struct Generator {
    n: usize,
    off: Vec<Vec<(usize, f64)>>,
    diag: Vec<f64>,
}

impl Generator {
    pub fn nodes(&self) -> usize {
        self.n
    }

    pub fn states(&self) -> usize {
        self.diag.len()
    }

    /// Off-diagonal entries `(to, rate)` of one row.
    pub fn row(&self, from: usize) -> &[(usize, f64)] {
        &self.off[from]
    }

    pub fn diagonal(&self, i: usize) -> f64 {
        self.diag[i]
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.diag[i] + self.off[i].iter().map(|&(_, r)| r).sum::<f64>()
    }

    pub fn to_dense(&self) -> Result<Matrix> {
        if self.n > MAX_DENSE_NODES {
            return Err(Error::Capacity {
                n: self.n,
                limit: MAX_DENSE_NODES,
            });
        }
        let mut m = Matrix::zeros(self.states());
        for (i, row) in self.off.iter().enumerate() {
            for &(j, r) in row {
                m[(i, j)] += r;
            }
            m[(i, i)] = self.diag[i];
        }
        Ok(m)
    }

    /// `out = s G`
    pub fn left_mul(&self, s: &[f64], out: &mut [f64]) {
        for (o, (d, x)) in out.iter_mut().zip(self.diag.iter().zip(s)) {
            *o = d * x;
        }
        for (i, row) in self.off.iter().enumerate() {
            let si = s[i];
            if si == 0.0 {
                continue;
            }
            for &(j, r) in row {
                out[j] += si * r;
            }
        }
    }
}

pub fn build_full_generator(params: &ModelParams) -> Result<Generator> {
    let n = params.n();
    if n > MAX_GENERATOR_NODES {
        return Err(Error::Capacity {
            n,
            limit: MAX_GENERATOR_NODES,
        });
    }
    let states = 4usize.pow(n as u32);
    let mut off = Vec::with_capacity(states);
    let mut diag = Vec::with_capacity(states);
    for code in 0..states {
        let st = OsnState::decode(code, n);
        let row: Vec<(usize, f64)> = transition_rates(params, &st)
            .into_iter()
            .map(|tr| {
                let shift = 4usize.pow(tr.node as u32);
                let to = code - st.0[tr.node].index() * shift + tr.to.index() * shift;
                (to, tr.rate)
            })
            .collect();
        diag.push(-row.iter().map(|&(_, r)| r).sum::<f64>());
        off.push(row);
    }
    Ok(Generator { n, off, diag })
}

/// Point mass on a joint state, as a distribution over `4^n` states.
pub fn point_mass(state: &OsnState) -> Result<Vec<f64>> {
    if state.n() > MAX_GENERATOR_NODES {
        return Err(Error::Capacity {
            n: state.n(),
            limit: MAX_GENERATOR_NODES,
        });
    }
    let mut s = vec![0.0; 4usize.pow(state.n() as u32)];
    s[state.encode()] = 1.0;
    Ok(s)
}

/// Integrates the forward equation and returns the full distribution at
/// each grid time.
pub fn solve_exact_distribution(
    params: &ModelParams,
    init: &[f64],
    tgrid: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let n = params.n();
    if n > MAX_EXACT_NODES {
        return Err(Error::Capacity {
            n,
            limit: MAX_EXACT_NODES,
        });
    }
    let generator = build_full_generator(params)?;
    if init.len() != generator.states() {
        return Err(Error::param(format!(
            "initial distribution has {} entries, expected {}",
            init.len(),
            generator.states()
        )));
    }
    let total: f64 = init.iter().sum();
    if init.iter().any(|p| !(*p >= 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::param(
            "initial vector is not a probability distribution",
        ));
    }
    Dopri5::with_tolerances(1e-10, 1e-12).integrate(
        |s, ds| generator.left_mul(s, ds),
        init,
        tgrid,
        |_, _| Ok(()),
    )
}

/// Node marginals `[node][state]` of a joint distribution.
pub fn marginals(dist: &[f64], n: usize) -> Vec<[f64; 4]> {
    let mut out = vec![[0.0; 4]; n];
    for (code, &p) in dist.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let mut c = code;
        for m in out.iter_mut() {
            m[c % 4] += p;
            c /= 4;
        }
    }
    out
}

/// Pairwise joints `Pr{X_i = a, X_j = b}` indexed `[i][j][a][b]`.
pub fn pair_joints(dist: &[f64], n: usize) -> Vec<Vec<[[f64; 4]; 4]>> {
    let mut out = vec![vec![[[0.0; 4]; 4]; n]; n];
    let mut digits = vec![0usize; n];
    for (code, &p) in dist.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let mut c = code;
        for d in digits.iter_mut() {
            *d = c % 4;
            c /= 4;
        }
        for i in 0..n {
            for j in 0..n {
                out[i][j][digits[i]][digits[j]] += p;
            }
        }
    }
    out
}

/// Right-hand side of the closed-form marginal equations (in terms of
/// pairwise joints) for `(dU_i, dR_i, dT_i)`.
pub fn marginal_rhs(params: &ModelParams, dist: &[f64]) -> Vec<[f64; 3]> {
    let n = params.n();
    let marg = marginals(dist, n);
    let pj = pair_joints(dist, n);
    (0..n)
        .map(|i| {
            let (mut ur, mut ut, mut rt, mut tr) = (0.0, 0.0, 0.0, 0.0);
            for j in 0..n {
                ur += params.beta_u[(i, j)] * pj[i][j][0][1];
                ut += params.gamma_u[(i, j)] * pj[i][j][0][3];
                rt += params.gamma_r[(i, j)] * pj[i][j][1][3];
                tr += params.beta_t[(i, j)] * pj[i][j][3][1];
            }
            let [u, r, _, t] = marg[i];
            [
                -ur - ut,
                ur + tr - rt - params.theta[i] * r,
                ut + rt - tr + params.delta[i] * (1.0 - u - r - t),
            ]
        })
        .collect()
}

/// Node marginals of the exact model on `tgrid`.
pub fn solve_exact(params: &ModelParams, init: &[f64], tgrid: &[f64]) -> Result<Trajectory> {
    let n = params.n();
    let dists = solve_exact_distribution(params, init, tgrid)?;
    let mut cols: [Vec<Vec<f64>>; 4] = Default::default();
    for dist in &dists {
        let marg = marginals(dist, n);
        for (s, col) in cols.iter_mut().enumerate() {
            col.push(marg.iter().map(|m| m[s]).collect());
        }
    }
    let [u, r, q, t] = cols;
    Ok(Trajectory::new(tgrid.to_vec(), u, r, q, t))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub node: usize,
    pub to: NodeState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    pub initial: OsnState,
    pub events: Vec<Event>,
    pub t_max: f64,
}

impl SamplePath {
    /// State after every event with `time <= t`.
    pub fn state_at(&self, t: f64) -> OsnState {
        let mut s = self.initial.clone();
        for e in self.events.iter().take_while(|e| e.time <= t) {
            s.0[e.node] = e.to;
        }
        s
    }

    /// Checks event legality and strictly increasing times.
    pub fn is_consistent(&self) -> bool {
        let mut s = self.initial.clone();
        let mut last = 0.0;
        for e in &self.events {
            if e.time <= last || e.time > self.t_max {
                return false;
            }
            if !legal(s.0[e.node], e.to) {
                return false;
            }
            s.0[e.node] = e.to;
            last = e.time;
        }
        true
    }
}

/// Event-driven simulator keeping per-node influence sums up to date.
struct Simulator<'a> {
    params: &'a ModelParams,
    w: [SparseRows; 4],
    influences: Vec<Vec<usize>>,
    state: Vec<NodeState>,
    // per node: betaU*R, betaT*R, gammaU*T, gammaR*T
    pressure: Vec<[f64; 4]>,
    node_rate: Vec<f64>,
}

impl<'a> Simulator<'a> {
    fn new(params: &'a ModelParams, init: &OsnState) -> Self {
        let n = params.n();
        let w = [
            SparseRows::from_matrix(&params.beta_u),
            SparseRows::from_matrix(&params.beta_t),
            SparseRows::from_matrix(&params.gamma_u),
            SparseRows::from_matrix(&params.gamma_r),
        ];
        let mut influences = vec![Vec::new(); n];
        for rows in &w {
            for i in 0..n {
                for &(j, _) in rows.row(i) {
                    influences[j].push(i);
                }
            }
        }
        for list in &mut influences {
            list.sort_unstable();
            list.dedup();
        }
        let mut sim = Simulator {
            params,
            w,
            influences,
            state: init.0.clone(),
            pressure: vec![[0.0; 4]; n],
            node_rate: vec![0.0; n],
        };
        for i in 0..n {
            sim.refresh(i);
        }
        sim
    }

    fn refresh(&mut self, i: usize) {
        let count = |rows: &SparseRows, src: NodeState| -> f64 {
            rows.row(i)
                .iter()
                .filter(|&&(j, _)| self.state[j] == src)
                .map(|&(_, v)| v)
                .sum()
        };
        let p = [
            count(&self.w[0], NodeState::Rumor),
            count(&self.w[1], NodeState::Rumor),
            count(&self.w[2], NodeState::Truth),
            count(&self.w[3], NodeState::Truth),
        ];
        self.pressure[i] = p;
        self.node_rate[i] = self.options(i).iter().map(|o| o.1).sum();
    }

    fn options(&self, i: usize) -> [(NodeState, f64); 2] {
        use NodeState::*;
        let p = self.pressure[i];
        match self.state[i] {
            Uncertain => [(Rumor, p[0]), (Truth, p[2])],
            Rumor => [(Quarantined, self.params.theta[i]), (Truth, p[3])],
            Quarantined => [(Truth, self.params.delta[i]), (Truth, 0.0)],
            Truth => [(Rumor, p[1]), (Rumor, 0.0)],
        }
    }

    /// Samples the next event; `None` once the total rate is zero or the
    /// next event would fall after `t_max`.
    fn step(&mut self, now: f64, t_max: f64, rng: &mut impl Rng) -> Option<Event> {
        let total: f64 = self.node_rate.iter().sum();
        if total <= 0.0 {
            return None;
        }
        let u: f64 = rng.random();
        let time = now - (1.0 - u).ln() / total;
        if time > t_max {
            return None;
        }
        let mut target = rng.random::<f64>() * total;
        let mut node = self.node_rate.len() - 1;
        for (i, &r) in self.node_rate.iter().enumerate() {
            if r > 0.0 {
                node = i;
                if target < r {
                    break;
                }
                target -= r;
            }
        }
        let [(a, ra), (b, rb)] = self.options(node);
        let to = if target < ra || rb == 0.0 { a } else { b };
        self.apply(node, to);
        Some(Event { time, node, to })
    }

    fn apply(&mut self, node: usize, to: NodeState) {
        self.state[node] = to;
        self.refresh(node);
        for k in 0..self.influences[node].len() {
            let m = self.influences[node][k];
            self.refresh(m);
        }
    }
}

fn check_init(params: &ModelParams, init: &OsnState) -> Result<()> {
    if init.n() != params.n() {
        return Err(Error::param(format!(
            "initial state has {} nodes, parameters have {}",
            init.n(),
            params.n()
        )));
    }
    Ok(())
}

/// One exact stochastic realisation of the chain up to `t_max`.
pub fn gillespie_path(
    params: &ModelParams,
    init: &OsnState,
    t_max: f64,
    seed: u64,
) -> Result<SamplePath> {
    check_init(params, init)?;
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::param(format!("t_max = {t_max} must be positive")));
    }
    let mut rng = rng_from_seed(seed);
    let mut sim = Simulator::new(params, init);
    let mut events = Vec::new();
    let mut now = 0.0;
    while let Some(e) = sim.step(now, t_max, &mut rng) {
        now = e.time;
        events.push(e);
    }
    Ok(SamplePath {
        initial: init.clone(),
        events,
        t_max,
    })
}

/// Adds one path's occupancy (`[time][node][state]`, flattened) to `counts`.
fn record_path(
    params: &ModelParams,
    init: &OsnState,
    tgrid: &[f64],
    seed: u64,
    counts: &mut [u32],
) {
    let n = params.n();
    let t_max = *tgrid.last().unwrap();
    let mut rng = rng_from_seed(seed);
    let mut sim = Simulator::new(params, init);
    let mut now = 0.0;
    let mut k = 0;
    let tally = |state: &[NodeState], k: usize, counts: &mut [u32]| {
        for (node, s) in state.iter().enumerate() {
            counts[(k * n + node) * 4 + s.index()] += 1;
        }
    };
    loop {
        let before = sim.state.clone();
        match sim.step(now, t_max, &mut rng) {
            Some(e) => {
                while k < tgrid.len() && tgrid[k] < e.time {
                    tally(&before, k, counts);
                    k += 1;
                }
                now = e.time;
            }
            None => {
                while k < tgrid.len() {
                    tally(&sim.state, k, counts);
                    k += 1;
                }
                break;
            }
        }
    }
}

/// Per-node state frequencies over `paths` independent realisations. Path
/// `k` uses seed `derive_seed(seed, k)`; counts are integers, so the result
/// does not depend on how paths are spread across threads.
pub fn ensemble_average(
    params: &ModelParams,
    init: &OsnState,
    tgrid: &[f64],
    paths: usize,
    seed: u64,
) -> Result<Trajectory> {
    check_init(params, init)?;
    if paths == 0 {
        return Err(Error::param("ensemble needs at least one path"));
    }
    if tgrid.is_empty() || tgrid[0] < 0.0 || tgrid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param(
            "time grid must be nonnegative and strictly increasing",
        ));
    }
    let n = params.n();
    let len = tgrid.len() * n * 4;
    let counts = (0..paths as u64)
        .into_par_iter()
        .fold(
            || vec![0u32; len],
            |mut acc, k| {
                record_path(params, init, tgrid, derive_seed(seed, k), &mut acc);
                acc
            },
        )
        .reduce(
            || vec![0u32; len],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let m = paths as f64;
    let mut cols: [Vec<Vec<f64>>; 4] = Default::default();
    for k in 0..tgrid.len() {
        for (s, col) in cols.iter_mut().enumerate() {
            col.push(
                (0..n)
                    .map(|node| counts[(k * n + node) * 4 + s] as f64 / m)
                    .collect(),
            );
        }
    }
    let [u, r, q, t] = cols;
    Ok(Trajectory::new(tgrid.to_vec(), u, r, q, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DirectedNetwork;
    use NodeState::*;

    fn pair(beta_u: f64, theta: f64) -> ModelParams {
        let g = DirectedNetwork::complete(2);
        let mut p =
            ModelParams::uniform(g.clone(), g, [beta_u, 0.3, 0.2, 0.1], theta, 1.0).unwrap();
        p.beta_u[(1, 0)] = 0.7;
        p
    }

    fn single(theta: f64, delta: f64) -> ModelParams {
        let g = DirectedNetwork::new(1, []).unwrap();
        ModelParams::uniform(g.clone(), g, [0.0; 4], theta, delta).unwrap()
    }

    #[test]
    fn encoding_is_a_bijection() {
        for n in 1..=4 {
            for code in 0..4usize.pow(n as u32) {
                assert_eq!(OsnState::decode(code, n).encode(), code);
            }
        }
        assert_eq!(OsnState(vec![Rumor, Truth]).encode(), 1 + 3 * 4);
    }

    #[test]
    fn absorbing_states_have_no_transitions() {
        let p = pair(0.4, 0.2);
        assert!(transition_rates(&p, &OsnState::uniform(2, Uncertain)).is_empty());
        assert!(transition_rates(&p, &OsnState::uniform(2, Truth)).is_empty());
    }

    #[test]
    fn chain_rates_by_hand() {
        let p = pair(0.4, 0.2);
        let rates = transition_rates(&p, &OsnState(vec![Uncertain, Rumor]));
        assert_eq!(
            rates,
            vec![
                Transition {
                    node: 0,
                    to: Rumor,
                    rate: 0.4
                },
                Transition {
                    node: 1,
                    to: Quarantined,
                    rate: 0.2
                },
            ]
        );
        let g = build_full_generator(&p).unwrap();
        let code = OsnState(vec![Uncertain, Rumor]).encode();
        let mass: f64 = g.row(code).iter().map(|&(_, r)| r).sum();
        assert!((mass - 0.6).abs() < 1e-15);
        assert_eq!(g.row_sum(code), 0.0);
        assert!((g.diagonal(code) + 0.6).abs() < 1e-15);
    }

    #[test]
    fn single_node_generator() {
        let g = build_full_generator(&single(0.7, 0.3))
            .unwrap()
            .to_dense()
            .unwrap();
        let mut expected = Matrix::zeros(4);
        expected[(1, 2)] = 0.7;
        expected[(1, 1)] = -0.7;
        expected[(2, 3)] = 0.3;
        expected[(2, 2)] = -0.3;
        assert_eq!(g, expected);
    }

    #[test]
    fn capacity_guards() {
        let g = DirectedNetwork::complete(9);
        let p = ModelParams::uniform(g.clone(), g, [0.1; 4], 1.0, 1.0).unwrap();
        assert!(matches!(
            build_full_generator(&p),
            Err(Error::Capacity { .. })
        ));
        let g = DirectedNetwork::complete(7);
        let p = ModelParams::uniform(g.clone(), g, [0.1; 4], 1.0, 1.0).unwrap();
        let init = point_mass(&OsnState::uniform(7, Truth)).unwrap();
        assert!(matches!(
            solve_exact(&p, &init, &[0.0, 1.0]),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn rejects_non_distribution() {
        let p = pair(0.4, 0.2);
        let mut init = vec![0.0; 16];
        init[3] = 0.5;
        assert!(solve_exact(&p, &init, &[0.0, 1.0]).is_err());
        init[3] = -1.0;
        init[4] = 2.0;
        assert!(solve_exact(&p, &init, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn all_truth_is_absorbing() {
        let p = pair(0.4, 0.2);
        let init = point_mass(&OsnState::uniform(2, Truth)).unwrap();
        let traj = solve_exact(&p, &init, &[0.0, 1.0, 5.0]).unwrap();
        for row in &traj.t {
            assert!(row.iter().all(|&v| v == 1.0));
        }
        let path = gillespie_path(&p, &OsnState::uniform(2, Truth), 10.0, 3).unwrap();
        assert!(path.events.is_empty());
    }

    #[test]
    fn single_node_path_shape() {
        let p = single(1.0, 1.0);
        for seed in 0..50 {
            let path = gillespie_path(&p, &OsnState(vec![Rumor]), 3.0, seed).unwrap();
            let to: Vec<NodeState> = path.events.iter().map(|e| e.to).collect();
            assert!(
                to.is_empty() || to == [Quarantined] || to == [Quarantined, Truth],
                "{to:?}"
            );
            assert!(path.is_consistent());
        }
    }

    #[test]
    fn simulator_rates_match_direct_evaluation() {
        let p = pair(0.4, 0.2);
        for code in 0..16 {
            let st = OsnState::decode(code, 2);
            let sim = Simulator::new(&p, &st);
            let direct: f64 = transition_rates(&p, &st).iter().map(|t| t.rate).sum();
            let total: f64 = sim.node_rate.iter().sum();
            assert!((direct - total).abs() < 1e-15);
        }
    }

    #[test]
    fn ensemble_single_path_is_indicator() {
        let p = pair(0.4, 0.2);
        let init = OsnState(vec![Rumor, Uncertain]);
        let grid: Vec<f64> = (0..=20).map(|k| k as f64 * 0.5).collect();
        let tr = ensemble_average(&p, &init, &grid, 1, 11).unwrap();
        let path = gillespie_path(&p, &init, 10.0, derive_seed(11, 0)).unwrap();
        for (k, &t) in grid.iter().enumerate() {
            let st = path.state_at(t);
            for node in 0..2 {
                let vals = [tr.u[k][node], tr.r[k][node], tr.q[k][node], tr.t[k][node]];
                assert_eq!(vals.iter().sum::<f64>(), 1.0);
                assert_eq!(vals[st.0[node].index()], 1.0);
            }
        }
        assert!(matches!(
            ensemble_average(&p, &init, &grid, 0, 1),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn outbreak_seeding() {
        for seed in 0..20 {
            let s = OsnState::seeded_outbreak(5, seed).unwrap();
            assert_eq!(s.0.iter().filter(|&&x| x == Rumor).count(), 1);
            assert_eq!(s.0.iter().filter(|&&x| x == Truth).count(), 1);
        }
        assert!(OsnState::seeded_outbreak(1, 0).is_err());
    }
}
