//! Per-round HEED cluster-head election.
//!
//! The election is a simplified, deterministic HEED:
//!
//! 1. Every alive node starts with `CH_prob = C_prob * E_residual / E_max`,
//!    floored at `p_min`.
//! 2. In each iteration, every alive node that has not announced and has no
//!    announced candidate within the cluster radius draws `u` in `[0, 1)`
//!    (ascending id order) and announces if `u < CH_prob`. All probabilities
//!    then double, capped at 1. The loop stops after the first iteration run
//!    with every probability at 1.
//! 3. Each node picks the announced candidate in range with the lowest
//!    `(distance, id)`. Candidates that pick themselves become final heads;
//!    nodes whose pick did not become final, or that have no pick, self-elect.
//! 4. Non-heads join the nearest final head in range (ties by lower id).

use crate::error::{domain_err, Error, Result};
use crate::model::{distance, Neighborhood, NodeState, Role};
use crate::radio::{broadcast_energy, rx_energy, tx_energy, RadioParams};
use crate::rng::Rng;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElectionParams<S> {
    pub c_prob: S,
    pub p_min: S,
    pub cluster_radius: S,
    pub e_max: S,
}

impl<S: Scalar> ElectionParams<S> {
    pub const DEFAULT_P_MIN: f64 = 1e-4;

    pub fn new(c_prob: S, cluster_radius: S, e_max: S) -> Self {
        Self {
            c_prob,
            p_min: S::lit(Self::DEFAULT_P_MIN),
            cluster_radius,
            e_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_min > S::zero() && self.p_min <= self.c_prob && self.c_prob <= S::one()) {
            return Err(crate::error::config_err(
                "p_min",
                "require 0 < p_min <= c_prob <= 1",
            ));
        }
        if !(self.e_max.is_finite() && self.e_max > S::zero()) {
            return Err(crate::error::config_err("e_max", "must be finite and > 0"));
        }
        if !(self.cluster_radius.is_finite() && self.cluster_radius > S::zero()) {
            return Err(crate::error::config_err(
                "cluster_radius",
                "must be finite and > 0",
            ));
        }
        Ok(())
    }

    /// Upper bound on election iterations, `ceil(log2(1 / p_min)) + 1`.
    pub fn max_iterations(&self) -> u32 {
        let mut p = self.p_min;
        let mut doublings = 0;
        while p < S::one() {
            p = (p + p).min(S::one());
            doublings += 1;
        }
        doublings + 1
    }
}

/// `clamp(c_prob * residual / e_max, p_min, 1)`.
pub fn ch_probability<S: Scalar>(residual: S, params: &ElectionParams<S>) -> Result<S> {
    if !(residual >= S::zero() && residual <= params.e_max) {
        return Err(domain_err(
            "ch_probability",
            format!("residual {residual} outside [0, {}]", params.e_max),
        ));
    }
    let raw = params.c_prob * residual / params.e_max;
    Ok(raw.max(params.p_min).min(S::one()))
}

/// Result of one clustering phase.
///
/// `membership` is indexed by node id; dead nodes map to `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterAssignment {
    pub head_ids: Vec<usize>,
    pub membership: Vec<Option<usize>>,
    pub iterations_used: u32,
}

impl ClusterAssignment {
    pub fn head_of(&self, id: usize) -> Option<usize> {
        self.membership.get(id).copied().flatten()
    }

    pub fn is_head(&self, id: usize) -> bool {
        self.head_of(id) == Some(id)
    }

    /// Non-head members of `head`, ascending.
    pub fn members_of(&self, head: usize) -> impl Iterator<Item = usize> + '_ {
        self.membership
            .iter()
            .enumerate()
            .filter_map(move |(id, h)| (*h == Some(head) && id != head).then_some(id))
    }

    /// Alive non-head nodes, ascending.
    pub fn members(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.membership
            .iter()
            .enumerate()
            .filter_map(|(id, h)| h.filter(|&h| h != id).map(|h| (id, h)))
    }
}

/// Runs an election, computing the pairwise geometry on the fly.
pub fn run_election<S: Scalar>(
    nodes: &[NodeState<S>],
    params: &ElectionParams<S>,
    rng: &mut Rng,
) -> Result<ClusterAssignment> {
    let hood = Neighborhood::from_nodes(nodes, params.cluster_radius);
    run_election_in(nodes, &hood, params, rng)
}

/// Runs an election over a precomputed neighborhood.
///
/// `hood` must have been built from the same node positions with radius
/// `params.cluster_radius`.
pub fn run_election_in<S: Scalar>(
    nodes: &[NodeState<S>],
    hood: &Neighborhood<S>,
    params: &ElectionParams<S>,
    rng: &mut Rng,
) -> Result<ClusterAssignment> {
    debug_assert_eq!(hood.len(), nodes.len());
    let n = nodes.len();
    let alive_ids: Vec<usize> = nodes.iter().filter(|v| v.alive).map(|v| v.id).collect();
    if alive_ids.is_empty() {
        return Err(Error::EmptyNetwork);
    }
    let alive = |j: usize| nodes[j].alive;

    let mut prob = vec![S::zero(); n];
    for &i in &alive_ids {
        prob[i] = ch_probability(nodes[i].residual_energy, params)?;
    }

    let (announced_at, iterations) = announce(&alive_ids, prob, hood, rng);
    let announced: Vec<bool> = announced_at.iter().map(Option::is_some).collect();

    // Lowest (distance, id) announced candidate in range.
    let mut pick = vec![None; n];
    for &i in &alive_ids {
        pick[i] = hood
            .within(i)
            .iter()
            .copied()
            .find(|&j| alive(j) && announced[j]);
    }
    let mut head = vec![false; n];
    for &i in &alive_ids {
        head[i] = pick[i] == Some(i);
    }
    let mut orphans = Vec::new();
    for &i in &alive_ids {
        match pick[i] {
            Some(c) if head[c] => {}
            _ => orphans.push(i),
        }
    }
    for i in orphans {
        head[i] = true;
    }

    let mut membership = vec![None; n];
    for &i in &alive_ids {
        if head[i] {
            membership[i] = Some(i);
            continue;
        }
        match hood
            .within(i)
            .iter()
            .copied()
            .find(|&j| alive(j) && head[j])
        {
            Some(h) => membership[i] = Some(h),
            None => {
                head[i] = true;
                membership[i] = Some(i);
            }
        }
    }
    let head_ids = alive_ids.iter().copied().filter(|&i| head[i]).collect();

    Ok(ClusterAssignment {
        head_ids,
        membership,
        iterations_used: iterations,
    })
}

/// Candidacy phase. Returns, per node id, the iteration in which it
/// announced, and the number of iterations run.
fn announce<S: Scalar>(
    alive_ids: &[usize],
    mut prob: Vec<S>,
    hood: &Neighborhood<S>,
    rng: &mut Rng,
) -> (Vec<Option<u32>>, u32) {
    let n = prob.len();
    let mut announced_at = vec![None; n];
    let mut covered = vec![false; n];
    let mut newly = Vec::new();
    let mut iteration = 0u32;
    loop {
        let saturated = alive_ids.iter().all(|&i| prob[i] >= S::one());
        newly.clear();
        for &i in alive_ids {
            if announced_at[i].is_some() || covered[i] {
                continue;
            }
            // Compare in f64 so that p = 1 always fires, whatever S is.
            if rng.next_unit() < prob[i].as_f64() {
                newly.push(i);
            }
        }
        for &i in &newly {
            announced_at[i] = Some(iteration);
            for &j in hood.within(i) {
                covered[j] = true;
            }
        }
        iteration += 1;
        if saturated {
            return (announced_at, iteration);
        }
        for &i in alive_ids {
            prob[i] = (prob[i] + prob[i]).min(S::one());
        }
    }
}

/// Writes roles and head pointers from `assignment` onto `nodes`.
pub fn apply_assignment<S: Scalar>(nodes: &mut [NodeState<S>], assignment: &ClusterAssignment) {
    for node in nodes.iter_mut() {
        match assignment.head_of(node.id) {
            Some(h) if node.alive => {
                node.role = if h == node.id {
                    Role::ClusterHead
                } else {
                    Role::Member
                };
                node.cluster_head_id = Some(h);
            }
            _ => {
                node.role = Role::Member;
                node.cluster_head_id = None;
            }
        }
    }
}

/// Charges control traffic for one clustering phase and returns the energy
/// actually deducted from each node (indexed by id).
///
/// Each final head broadcasts one announcement to `cluster_radius`; every
/// alive node receives the announcements of other heads in range; every
/// member sends a join message to its head, which receives it. Deductions are
/// summed per node and clamped at the node's residual energy. Nodes drained
/// to zero stay flagged alive until the round's death check.
pub fn charge_clustering_overhead<S: Scalar>(
    nodes: &mut [NodeState<S>],
    assignment: &ClusterAssignment,
    radio: &RadioParams<S>,
    control_bits: u64,
    cluster_radius: S,
    enabled: bool,
) -> Result<Vec<S>> {
    let mut cost = vec![S::zero(); nodes.len()];
    if !enabled {
        return Ok(cost);
    }
    let announce = broadcast_energy(control_bits, cluster_radius, radio)?;
    let rx = rx_energy(control_bits, radio);

    for &h in &assignment.head_ids {
        cost[h] = cost[h] + announce;
    }
    for node in nodes.iter().filter(|v| v.alive) {
        let heard = assignment
            .head_ids
            .iter()
            .filter(|&&h| {
                h != node.id && distance(node.position, nodes[h].position) <= cluster_radius
            })
            .count();
        cost[node.id] = cost[node.id] + rx * S::count(heard as u64);
    }
    for (m, h) in assignment.members() {
        let join = tx_energy(
            control_bits,
            distance(nodes[m].position, nodes[h].position),
            radio,
        )?;
        cost[m] = cost[m] + join;
        cost[h] = cost[h] + rx;
    }

    let mut deducted = vec![S::zero(); nodes.len()];
    for node in nodes.iter_mut().filter(|v| v.alive) {
        let spent = cost[node.id].min(node.residual_energy);
        node.residual_energy = node.residual_energy - spent;
        deducted[node.id] = spent;
    }
    Ok(deducted)
}
