//! Nodes, deployment geometry, and topology configuration.

use crate::error::{config_err, Result};
use crate::rng::Rng;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point2<S> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> Point2<S> {
    pub fn new(x: S, y: S) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance_to(&self, other: &Self) -> S {
        distance(*self, *other)
    }
}

/// Euclidean distance in meters.
pub fn distance<S: Scalar>(a: Point2<S>, b: Point2<S>) -> S {
    (a.x - b.x).hypot(a.y - b.y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Role {
    #[default]
    Member,
    ClusterHead,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeState<S> {
    pub id: usize,
    pub position: Point2<S>,
    pub residual_energy: S,
    pub alive: bool,
    pub role: Role,
    pub cluster_head_id: Option<usize>,
}

impl<S: Scalar> NodeState<S> {
    pub fn new(id: usize, position: Point2<S>, energy: S) -> Self {
        Self {
            id,
            position,
            residual_energy: energy,
            alive: true,
            role: Role::Member,
            cluster_head_id: None,
        }
    }

    pub fn is_head(&self) -> bool {
        self.role == Role::ClusterHead
    }

    pub(crate) fn mark_dead(&mut self) {
        self.residual_energy = S::zero();
        self.alive = false;
        self.role = Role::Member;
        self.cluster_head_id = None;
    }
}

/// Deployment area and per-node parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct TopologyConfig<S> {
    pub width: S,
    pub height: S,
    pub node_count: usize,
    /// E_0, the battery every node starts with.
    pub initial_energy: S,
    pub cluster_radius: S,
    pub c_prob: S,
    pub placement_seed: u64,
}

impl<S: Scalar> TopologyConfig<S> {
    /// 100 nodes, 0.25 J, 25 m cluster radius, 5 % initial head fraction.
    pub fn table1(width: S, height: S) -> Self {
        Self {
            width,
            height,
            node_count: 100,
            initial_energy: S::lit(0.25),
            cluster_radius: S::lit(25.0),
            c_prob: S::lit(0.05),
            placement_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive_finite("width", self.width)?;
        positive_finite("height", self.height)?;
        if self.node_count == 0 {
            return Err(config_err("node_count", "must be at least 1"));
        }
        // Zero is admitted: such a network is simply dead before round 0 runs.
        if !(self.initial_energy.is_finite() && self.initial_energy >= S::zero()) {
            return Err(config_err(
                "initial_energy",
                "must be finite and non-negative",
            ));
        }
        positive_finite("cluster_radius", self.cluster_radius)?;
        if !(self.c_prob > S::zero() && self.c_prob <= S::one()) {
            return Err(config_err("c_prob", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

fn positive_finite<S: Scalar>(field: &'static str, v: S) -> Result<()> {
    if v.is_finite() && v > S::zero() {
        Ok(())
    } else {
        Err(config_err(
            field,
            format!("must be finite and > 0 (got {v})"),
        ))
    }
}

/// Uniform random deployment over `[0, width] x [0, height]`.
///
/// Draws x then y for each node in id order, 2 * node_count draws in total.
pub fn spawn_topology<S: Scalar>(
    config: &TopologyConfig<S>,
    rng: &mut Rng,
) -> Result<Vec<NodeState<S>>> {
    config.validate()?;
    let nodes = (0..config.node_count)
        .map(|id| {
            let x = S::lit(rng.next_unit()) * config.width;
            let y = S::lit(rng.next_unit()) * config.height;
            NodeState::new(id, Point2::new(x, y), config.initial_energy)
        })
        .collect();
    Ok(nodes)
}

/// Static pairwise geometry of a deployment.
///
/// Nodes never move, so distances and the within-radius neighbor lists are
/// computed once per run. Each neighbor list includes the node itself and is
/// sorted by `(distance, id)`.
#[derive(Clone, Debug)]
pub struct Neighborhood<S> {
    n: usize,
    radius: S,
    dist: Vec<S>,
    within: Vec<Vec<usize>>,
}

impl<S: Scalar> Neighborhood<S> {
    pub fn new(positions: &[Point2<S>], radius: S) -> Self {
        let n = positions.len();
        let mut dist = vec![S::zero(); n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = distance(positions[i], positions[j]);
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        let within = (0..n)
            .map(|i| {
                let mut near: Vec<usize> = (0..n).filter(|&j| dist[i * n + j] <= radius).collect();
                near.sort_by(|&a, &b| {
                    dist[i * n + a]
                        .partial_cmp(&dist[i * n + b])
                        .expect("finite distances")
                        .then(a.cmp(&b))
                });
                near
            })
            .collect();
        Self {
            n,
            radius,
            dist,
            within,
        }
    }

    pub fn from_nodes(nodes: &[NodeState<S>], radius: S) -> Self {
        let positions: Vec<_> = nodes.iter().map(|n| n.position).collect();
        Self::new(&positions, radius)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn radius(&self) -> S {
        self.radius
    }

    pub fn distance(&self, a: usize, b: usize) -> S {
        self.dist[a * self.n + b]
    }

    /// Nodes within the radius of `i`, itself included, nearest first.
    pub fn within(&self, i: usize) -> &[usize] {
        &self.within[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    #[test]
    fn distance_examples() {
        let o = Point2::new(0.0, 0.0);
        assert_eq!(distance(o, o), 0.0);
        assert_eq!(distance(o, Point2::new(3.0, 4.0)), 5.0);
        // Central-to-external gap on the 100 m map.
        assert_eq!(
            distance(Point2::new(50.0, 50.0), Point2::new(50.0, 175.0)),
            125.0
        );
    }

    #[test]
    fn single_node_topology() {
        let cfg = TopologyConfig {
            node_count: 1,
            ..TopologyConfig::table1(100.0, 100.0)
        };
        let nodes = spawn_topology(&cfg, &mut Rng::seeded(3)).unwrap();
        assert_eq!(nodes.len(), 1);
        let n = &nodes[0];
        assert_eq!(n.residual_energy, 0.25);
        assert!(n.alive);
        assert_eq!(n.role, Role::Member);
        assert_eq!(n.cluster_head_id, None);
        assert!((0.0..=100.0).contains(&n.position.x) && (0.0..=100.0).contains(&n.position.y));
    }

    #[test]
    fn spawn_is_bit_exact_on_replay() {
        let cfg = TopologyConfig::table1(100.0f64, 100.0);
        let a = spawn_topology(&cfg, &mut Rng::stream(42, Stream::Placement)).unwrap();
        let b = spawn_topology(&cfg, &mut Rng::stream(42, Stream::Placement)).unwrap();
        assert_eq!(a, b);
        for (p, q) in a.iter().zip(&b) {
            assert_eq!(p.position.x.to_bits(), q.position.x.to_bits());
            assert_eq!(p.position.y.to_bits(), q.position.y.to_bits());
        }
    }

    #[test]
    fn spawn_consumes_two_draws_per_node() {
        let cfg = TopologyConfig {
            node_count: 5,
            ..TopologyConfig::table1(1.0f64, 1.0)
        };
        let mut rng = Rng::seeded(11);
        let nodes = spawn_topology(&cfg, &mut rng).unwrap();
        let mut oracle = Rng::seeded(11);
        for n in &nodes {
            assert_eq!(n.position.x, oracle.next_unit());
            assert_eq!(n.position.y, oracle.next_unit());
        }
        assert_eq!(rng.next_unit(), oracle.next_unit());
    }

    #[test]
    fn config_errors_name_the_field() {
        let base = TopologyConfig::table1(100.0f64, 100.0);
        let cases: Vec<(&str, TopologyConfig<f64>)> = vec![
            (
                "width",
                TopologyConfig {
                    width: 0.0,
                    ..base.clone()
                },
            ),
            (
                "height",
                TopologyConfig {
                    height: f64::NAN,
                    ..base.clone()
                },
            ),
            (
                "node_count",
                TopologyConfig {
                    node_count: 0,
                    ..base.clone()
                },
            ),
            (
                "initial_energy",
                TopologyConfig {
                    initial_energy: -1.0,
                    ..base.clone()
                },
            ),
            (
                "cluster_radius",
                TopologyConfig {
                    cluster_radius: 0.0,
                    ..base.clone()
                },
            ),
            (
                "c_prob",
                TopologyConfig {
                    c_prob: 1.5,
                    ..base.clone()
                },
            ),
        ];
        for (field, cfg) in cases {
            match spawn_topology(&cfg, &mut Rng::seeded(0)) {
                Err(crate::Error::Config { field: f, .. }) => assert_eq!(f, field),
                other => panic!("expected config error for {field}, got {other:?}"),
            }
        }
    }

    #[test]
    fn neighborhood_lists_are_sorted_and_include_self() {
        let pts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(20.0, 0.0),
            Point2::new(40.0, 0.0),
            Point2::new(10.0, 0.0),
        ];
        let hood = Neighborhood::new(&pts, 25.0);
        assert_eq!(hood.within(0), &[0, 3, 1]);
        assert_eq!(hood.within(1), &[1, 3, 0, 2]);
        assert_eq!(hood.within(2), &[2, 1]);
        assert_eq!(hood.distance(0, 2), 40.0);
    }
}
