//! Round loop: clustering, BS relocation, data collection, death check.

use std::collections::BTreeMap;

use crate::error::{config_err, Result};
use crate::heed::{
    apply_assignment, charge_clustering_overhead, run_election_in, ClusterAssignment,
    ElectionParams,
};
use crate::model::{distance, spawn_topology, Neighborhood, NodeState, Point2, TopologyConfig};
use crate::positioning::{next_bs_position, BsState, LwbNormalization, StrategyKind, StrategySpec};
use crate::radio::{aggregation_energy, rx_energy, tx_energy, RadioParams};
use crate::rng::{Rng, Stream};
use crate::scalar::{CompensatedSum, Scalar};

/// Everything a single run depends on.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig<S> {
    pub topology: TopologyConfig<S>,
    pub radio: RadioParams<S>,
    pub strategy: StrategySpec<S>,
    /// Floor on the per-iteration head probability.
    pub p_min: S,
    pub data_bits: u64,
    pub control_bits: u64,
    pub overhead_enabled: bool,
    pub max_rounds: u64,
    /// Seeds the election stream. Placement uses `topology.placement_seed`.
    pub seed: u64,
}

impl<S: Scalar> RunConfig<S> {
    pub const DEFAULT_DATA_BITS: u64 = 500 * 8;
    pub const DEFAULT_CONTROL_BITS: u64 = 25 * 8;
    pub const DEFAULT_MAX_ROUNDS: u64 = 50_000;

    /// Reference parameters on a `width x height` area; one seed drives both
    /// placement and election.
    pub fn table1(width: S, height: S, kind: StrategyKind, seed: u64) -> Self {
        let topology = TopologyConfig {
            placement_seed: seed,
            ..TopologyConfig::table1(width, height)
        };
        Self {
            topology,
            radio: RadioParams::table1(),
            strategy: StrategySpec::for_area(kind, width, height, LwbNormalization::default()),
            p_min: S::lit(ElectionParams::<S>::DEFAULT_P_MIN),
            data_bits: Self::DEFAULT_DATA_BITS,
            control_bits: Self::DEFAULT_CONTROL_BITS,
            overhead_enabled: true,
            max_rounds: Self::DEFAULT_MAX_ROUNDS,
            seed,
        }
    }

    pub fn election_params(&self) -> ElectionParams<S> {
        ElectionParams {
            c_prob: self.topology.c_prob,
            p_min: self.p_min,
            cluster_radius: self.topology.cluster_radius,
            e_max: self.topology.initial_energy,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.topology.validate()?;
        self.radio.validate()?;
        if self.data_bits == 0 {
            return Err(config_err("data_bits", "must be > 0"));
        }
        if self.max_rounds == 0 {
            return Err(config_err("max_rounds", "must be >= 1"));
        }
        if !self.strategy.initial_position.is_finite() {
            return Err(config_err("strategy", "initial BS position must be finite"));
        }
        if !(self.p_min > S::zero() && self.p_min <= self.topology.c_prob) {
            return Err(config_err("p_min", "require 0 < p_min <= c_prob"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EnergyCategory {
    MemberTx,
    HeadRx,
    Aggregation,
    HeadTxBs,
    Overhead,
}

/// Energy consumed over a run, per category, in joules.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergyLedger<S> {
    pub member_tx: S,
    pub head_rx: S,
    pub aggregation: S,
    pub head_tx_bs: S,
    pub overhead: S,
}

impl<S: Scalar> EnergyLedger<S> {
    pub fn total(&self) -> S {
        [
            self.member_tx,
            self.head_rx,
            self.aggregation,
            self.head_tx_bs,
            self.overhead,
        ]
        .into_iter()
        .collect::<CompensatedSum<S>>()
        .total()
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct LedgerAcc<S> {
    member_tx: CompensatedSum<S>,
    head_rx: CompensatedSum<S>,
    aggregation: CompensatedSum<S>,
    head_tx_bs: CompensatedSum<S>,
    overhead: CompensatedSum<S>,
}

impl<S: Scalar> LedgerAcc<S> {
    fn new() -> Self {
        Self {
            member_tx: CompensatedSum::new(),
            head_rx: CompensatedSum::new(),
            aggregation: CompensatedSum::new(),
            head_tx_bs: CompensatedSum::new(),
            overhead: CompensatedSum::new(),
        }
    }

    fn add(&mut self, category: EnergyCategory, joules: S) {
        match category {
            EnergyCategory::MemberTx => self.member_tx.add(joules),
            EnergyCategory::HeadRx => self.head_rx.add(joules),
            EnergyCategory::Aggregation => self.aggregation.add(joules),
            EnergyCategory::HeadTxBs => self.head_tx_bs.add(joules),
            EnergyCategory::Overhead => self.overhead.add(joules),
        }
    }

    fn snapshot(&self) -> EnergyLedger<S> {
        EnergyLedger {
            member_tx: self.member_tx.total(),
            head_rx: self.head_rx.total(),
            aggregation: self.aggregation.total(),
            head_tx_bs: self.head_tx_bs.total(),
            overhead: self.overhead.total(),
        }
    }
}

/// What happened in one round.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundRecord<S> {
    pub round_index: u64,
    pub assignment: ClusterAssignment,
    pub bs_position: Point2<S>,
    /// Nodes that died this round, ascending.
    pub deaths: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationResult<S> {
    pub node_count: usize,
    pub initial_energy: S,
    pub initial_positions: Vec<Point2<S>>,
    /// Node id to the round in which it died. Only dead nodes appear.
    pub death_round: BTreeMap<usize, u64>,
    /// Rounds the network came through with at least one node alive.
    pub rounds_completed: u64,
    /// The round cap was hit with nodes still alive.
    pub truncated: bool,
    /// One BS position per completed round.
    pub bs_trace: Vec<Point2<S>>,
    pub energy_ledger: EnergyLedger<S>,
    pub final_residuals: Vec<S>,
}

impl<S: Scalar> SimulationResult<S> {
    /// Death rounds in ascending order.
    pub fn sorted_death_rounds(&self) -> Vec<u64> {
        let mut rounds: Vec<u64> = self.death_round.values().copied().collect();
        rounds.sort_unstable();
        rounds
    }

    /// `|initial - (consumed + residual)| / initial`; 0 when nothing was stored.
    pub fn conservation_error(&self) -> f64 {
        let initial = S::count(self.node_count as u64) * self.initial_energy;
        let residual: CompensatedSum<S> = self.final_residuals.iter().copied().collect();
        let mut accounted = CompensatedSum::new();
        accounted.add(self.energy_ledger.total());
        accounted.add(residual.total());
        let gap = (initial - accounted.total()).abs().as_f64();
        let scale = initial.as_f64();
        if scale > 0.0 {
            gap / scale
        } else {
            gap
        }
    }
}

/// A network instance stepping through rounds.
#[derive(Clone, Debug)]
pub struct Simulation<S> {
    config: RunConfig<S>,
    nodes: Vec<NodeState<S>>,
    initial_positions: Vec<Point2<S>>,
    hood: Neighborhood<S>,
    bs: BsState<S>,
    rng: Rng,
    ledger: LedgerAcc<S>,
    death_round: BTreeMap<usize, u64>,
    round: u64,
}

impl<S: Scalar> Simulation<S> {
    /// Spawns the topology from `config.topology.placement_seed`.
    pub fn new(config: RunConfig<S>) -> Result<Self> {
        config.validate()?;
        let mut placement = Rng::stream(config.topology.placement_seed, Stream::Placement);
        let nodes = spawn_topology(&config.topology, &mut placement)?;
        Self::from_nodes(config, nodes)
    }

    /// Runs over a caller-supplied deployment. Ids must be `0..len`, and
    /// `config.topology.node_count` is overridden by the slice length.
    pub fn from_nodes(mut config: RunConfig<S>, nodes: Vec<NodeState<S>>) -> Result<Self> {
        config.topology.node_count = nodes.len();
        config.validate()?;
        for (i, node) in nodes.iter().enumerate() {
            if node.id != i {
                return Err(config_err(
                    "nodes",
                    format!("node at index {i} has id {}", node.id),
                ));
            }
            if !node.position.is_finite() {
                return Err(config_err(
                    "nodes",
                    format!("node {i} has a non-finite position"),
                ));
            }
            if !(node.residual_energy >= S::zero()
                && node.residual_energy <= config.topology.initial_energy)
            {
                return Err(config_err(
                    "nodes",
                    format!("node {i} residual outside [0, E_0]"),
                ));
            }
        }
        let hood = Neighborhood::from_nodes(&nodes, config.topology.cluster_radius);
        let mut sim = Self {
            bs: BsState::new(config.strategy.initial_position),
            rng: Rng::stream(config.seed, Stream::Election),
            initial_positions: nodes.iter().map(|v| v.position).collect(),
            ledger: LedgerAcc::new(),
            death_round: BTreeMap::new(),
            round: 0,
            hood,
            nodes,
            config,
        };
        // A network deployed without energy is dead before round 0 runs.
        sim.death_check(Vec::new());
        Ok(sim)
    }

    pub fn nodes(&self) -> &[NodeState<S>] {
        &self.nodes
    }

    pub fn config(&self) -> &RunConfig<S> {
        &self.config
    }

    pub fn bs(&self) -> &BsState<S> {
        &self.bs
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn alive_count(&self) -> usize {
        self.nodes.iter().filter(|v| v.alive).count()
    }

    pub fn ledger(&self) -> EnergyLedger<S> {
        self.ledger.snapshot()
    }

    /// Deducts `cost` from `id`. When the node cannot afford it, the node
    /// spends what it has, dies on the spot, and the action fails.
    fn spend(
        &mut self,
        id: usize,
        cost: S,
        category: EnergyCategory,
        fallen: &mut Vec<usize>,
    ) -> bool {
        let node = &mut self.nodes[id];
        if cost <= node.residual_energy {
            node.residual_energy = node.residual_energy - cost;
            self.ledger.add(category, cost);
            true
        } else {
            self.ledger.add(category, node.residual_energy);
            node.mark_dead();
            fallen.push(id);
            false
        }
    }

    fn death_check(&mut self, mut fallen: Vec<usize>) -> Vec<usize> {
        for node in self.nodes.iter_mut() {
            if node.alive && node.residual_energy <= S::zero() {
                node.mark_dead();
                fallen.push(node.id);
            }
        }
        fallen.sort_unstable();
        for &id in &fallen {
            self.death_round.insert(id, self.round);
        }
        fallen
    }

    /// Executes one round and advances the round counter.
    pub fn run_round(&mut self) -> Result<RoundRecord<S>> {
        let params = self.config.election_params();
        let radio = self.config.radio;
        let data_bits = self.config.data_bits;
        let mut fallen = Vec::new();

        // Clustering.
        let assignment = run_election_in(&self.nodes, &self.hood, &params, &mut self.rng)?;
        apply_assignment(&mut self.nodes, &assignment);
        let overhead = charge_clustering_overhead(
            &mut self.nodes,
            &assignment,
            &radio,
            self.config.control_bits,
            params.cluster_radius,
            self.config.overhead_enabled,
        )?;
        for joules in overhead {
            self.ledger.add(EnergyCategory::Overhead, joules);
        }

        // BS relocation.
        let bs_position = next_bs_position(
            &self.config.strategy,
            &mut self.bs,
            &assignment,
            &self.nodes,
            self.config.topology.initial_energy,
        );

        // Members report to their heads.
        let mut received = vec![0u64; self.nodes.len()];
        for (m, h) in assignment.members() {
            if !self.nodes[m].alive {
                continue;
            }
            let cost = tx_energy(data_bits, self.hood.distance(m, h), &radio)?;
            if self.spend(m, cost, EnergyCategory::MemberTx, &mut fallen) {
                received[h] += 1;
            }
        }

        // Heads receive, fuse with their own reading, and uplink.
        let rx = rx_energy(data_bits, &radio);
        for &h in &assignment.head_ids {
            if !self.nodes[h].alive {
                continue;
            }
            let mut fused = 0u64;
            for _ in 0..received[h] {
                if !self.spend(h, rx, EnergyCategory::HeadRx, &mut fallen) {
                    break;
                }
                fused += 1;
            }
            if !self.nodes[h].alive {
                continue;
            }
            let fuse = aggregation_energy(data_bits, fused + 1, &radio);
            if !self.spend(h, fuse, EnergyCategory::Aggregation, &mut fallen) {
                continue;
            }
            let uplink = tx_energy(
                data_bits,
                distance(self.nodes[h].position, bs_position),
                &radio,
            )?;
            self.spend(h, uplink, EnergyCategory::HeadTxBs, &mut fallen);
        }

        let deaths = self.death_check(fallen);
        let record = RoundRecord {
            round_index: self.round,
            assignment,
            bs_position,
            deaths,
        };
        self.round += 1;
        Ok(record)
    }

    /// Runs until every node is dead or the round cap is reached.
    pub fn run(mut self) -> Result<SimulationResult<S>> {
        while self.alive_count() > 0 && self.round < self.config.max_rounds {
            self.run_round()?;
        }
        Ok(self.into_result())
    }

    fn into_result(self) -> SimulationResult<S> {
        let all_dead = self.alive_count() == 0;
        // The round that killed the last node is not completed.
        let rounds_completed = if all_dead {
            self.round.saturating_sub(1)
        } else {
            self.round
        };
        let mut bs_trace = self.bs.trace;
        bs_trace.truncate(rounds_completed as usize);
        SimulationResult {
            node_count: self.nodes.len(),
            initial_energy: self.config.topology.initial_energy,
            initial_positions: self.initial_positions,
            death_round: self.death_round,
            rounds_completed,
            truncated: !all_dead,
            bs_trace,
            energy_ledger: self.ledger.snapshot(),
            final_residuals: self.nodes.iter().map(|v| v.residual_energy).collect(),
        }
    }
}

/// Spawns the topology for `config` and runs it to completion.
pub fn run_simulation<S: Scalar>(config: RunConfig<S>) -> Result<SimulationResult<S>> {
    Simulation::new(config)?.run()
}
