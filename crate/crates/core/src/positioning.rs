//! Base-station placement: two static positions and the mobile LWB rule.
//!
//! LWB ("location weighted with battery") moves the BS once per round to the
//! cluster heads' coordinates weighted by their residual energy:
//!
//! ```text
//! x = sum(x_i * E_r,i) / E_T        y = sum(y_i * E_r,i) / E_T
//! ```
//!
//! With [`LwbNormalization::SumResidual`] the denominator is the heads' summed
//! residual energy, giving a true weighted centroid. With
//! [`LwbNormalization::TotalInitial`] it is the heads' summed initial energy,
//! which pulls the BS toward the origin as batteries drain.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::heed::ClusterAssignment;
use crate::model::{NodeState, Point2};
use crate::scalar::{CompensatedSum, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrategyKind {
    StaticCentral,
    StaticExternal,
    MobileLwb,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 3] = [Self::StaticCentral, Self::StaticExternal, Self::MobileLwb];

    pub fn name(self) -> &'static str {
        match self {
            Self::StaticCentral => "central",
            Self::StaticExternal => "external",
            Self::MobileLwb => "mobile-lwb",
        }
    }

    pub fn is_static(self) -> bool {
        !matches!(self, Self::MobileLwb)
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "central" => Ok(Self::StaticCentral),
            "external" => Ok(Self::StaticExternal),
            "mobile-lwb" | "mobile" => Ok(Self::MobileLwb),
            other => Err(format!(
                "unknown strategy `{other}` (expected central, external or mobile-lwb)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum LwbNormalization {
    #[default]
    SumResidual,
    TotalInitial,
}

impl LwbNormalization {
    pub fn name(self) -> &'static str {
        match self {
            Self::SumResidual => "sum-residual",
            Self::TotalInitial => "total-initial",
        }
    }
}

impl fmt::Display for LwbNormalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LwbNormalization {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sum-residual" => Ok(Self::SumResidual),
            "total-initial" => Ok(Self::TotalInitial),
            other => Err(format!(
                "unknown LWB mode `{other}` (expected sum-residual or total-initial)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrategySpec<S> {
    pub kind: StrategyKind,
    pub lwb_normalization: LwbNormalization,
    /// Fixed position for static kinds; starting position for the mobile one.
    pub initial_position: Point2<S>,
}

impl<S: Scalar> StrategySpec<S> {
    /// Standard placement for a `width x height` area: the static position
    /// for static kinds, the area center for the mobile BS.
    pub fn for_area(
        kind: StrategyKind,
        width: S,
        height: S,
        lwb_normalization: LwbNormalization,
    ) -> Self {
        let initial_position = match kind {
            StrategyKind::MobileLwb => Point2::new(width / S::lit(2.0), height / S::lit(2.0)),
            _ => static_position(width, height, kind).expect("static kind"),
        };
        Self {
            kind,
            lwb_normalization,
            initial_position,
        }
    }

    /// A static BS at an arbitrary point.
    pub fn fixed_at(position: Point2<S>) -> Self {
        Self {
            kind: StrategyKind::StaticCentral,
            lwb_normalization: LwbNormalization::default(),
            initial_position: position,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BsState<S> {
    pub position: Point2<S>,
    pub trace: Vec<Point2<S>>,
}

impl<S: Scalar> BsState<S> {
    pub fn new(position: Point2<S>) -> Self {
        Self {
            position,
            trace: Vec::new(),
        }
    }
}

/// Center of the area, or `1.75 * height` straight above its center line.
pub fn static_position<S: Scalar>(width: S, height: S, kind: StrategyKind) -> Result<Point2<S>> {
    let half = S::lit(0.5);
    match kind {
        StrategyKind::StaticCentral => Ok(Point2::new(width * half, height * half)),
        StrategyKind::StaticExternal => Ok(Point2::new(width * half, height * S::lit(1.75))),
        StrategyKind::MobileLwb => Err(Error::NotStatic(kind)),
    }
}

/// A cluster head as seen by the LWB rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeadSample<S> {
    pub position: Point2<S>,
    pub residual: S,
    pub initial: S,
}

const MIN_WEIGHT_J: f64 = 1e-12;

pub fn lwb_position<S: Scalar>(
    heads: &[HeadSample<S>],
    mode: LwbNormalization,
    previous: Point2<S>,
) -> Point2<S> {
    if heads.is_empty() {
        return previous;
    }
    let wx: CompensatedSum<S> = heads.iter().map(|h| h.position.x * h.residual).collect();
    let wy: CompensatedSum<S> = heads.iter().map(|h| h.position.y * h.residual).collect();
    let total = match mode {
        LwbNormalization::SumResidual => {
            let total = heads
                .iter()
                .map(|h| h.residual)
                .collect::<CompensatedSum<S>>()
                .total();
            if total <= S::lit(MIN_WEIGHT_J) {
                return previous;
            }
            total
        }
        LwbNormalization::TotalInitial => heads
            .iter()
            .map(|h| h.initial)
            .collect::<CompensatedSum<S>>()
            .total(),
    };
    Point2::new(wx.total() / total, wy.total() / total)
}

/// Where the BS sits for this round. Appends the position to the trace.
pub fn next_bs_position<S: Scalar>(
    spec: &StrategySpec<S>,
    bs: &mut BsState<S>,
    assignment: &ClusterAssignment,
    nodes: &[NodeState<S>],
    initial_energy: S,
) -> Point2<S> {
    let position = match spec.kind {
        StrategyKind::StaticCentral | StrategyKind::StaticExternal => spec.initial_position,
        StrategyKind::MobileLwb => {
            let heads: Vec<HeadSample<S>> = assignment
                .head_ids
                .iter()
                .map(|&h| &nodes[h])
                .filter(|v| v.alive)
                .map(|v| HeadSample {
                    position: v.position,
                    residual: v.residual_energy,
                    initial: initial_energy,
                })
                .collect();
            lwb_position(&heads, spec.lwb_normalization, bs.position)
        }
    };
    bs.position = position;
    bs.trace.push(position);
    position
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn head(x: f64, y: f64, e: f64) -> HeadSample<f64> {
        HeadSample {
            position: Point2::new(x, y),
            residual: e,
            initial: 0.25,
        }
    }

    #[test]
    fn static_positions_match_reference_coordinates() {
        let cases = [
            (100.0, StrategyKind::StaticCentral, (50.0, 50.0)),
            (200.0, StrategyKind::StaticCentral, (100.0, 100.0)),
            (300.0, StrategyKind::StaticCentral, (150.0, 150.0)),
            (100.0, StrategyKind::StaticExternal, (50.0, 175.0)),
            (200.0, StrategyKind::StaticExternal, (100.0, 350.0)),
            (300.0, StrategyKind::StaticExternal, (150.0, 525.0)),
        ];
        for (side, kind, (x, y)) in cases {
            assert_eq!(
                static_position(side, side, kind).unwrap(),
                Point2::new(x, y)
            );
        }
        assert_eq!(
            static_position(100.0, 100.0, StrategyKind::MobileLwb),
            Err(Error::NotStatic(StrategyKind::MobileLwb))
        );
    }

    #[test]
    fn lwb_examples() {
        let prev = Point2::new(-1.0, -1.0);
        let equal = [head(0.0, 0.0, 0.2), head(100.0, 100.0, 0.2)];
        assert_eq!(
            lwb_position(&equal, LwbNormalization::SumResidual, prev),
            Point2::new(50.0, 50.0)
        );

        let skewed = [head(0.0, 0.0, 0.1), head(100.0, 0.0, 0.3)];
        let p = lwb_position(&skewed, LwbNormalization::SumResidual, prev);
        assert!((p.x - 75.0).abs() < 1e-12 && p.y == 0.0);
        let p = lwb_position(&skewed, LwbNormalization::TotalInitial, prev);
        assert!((p.x - 60.0).abs() < 1e-12 && p.y == 0.0);
    }

    #[test]
    fn lwb_fallbacks_keep_previous_position() {
        let prev = Point2::new(12.0, 34.0);
        assert_eq!(
            lwb_position::<f64>(&[], LwbNormalization::SumResidual, prev),
            prev
        );
        assert_eq!(
            lwb_position::<f64>(&[], LwbNormalization::TotalInitial, prev),
            prev
        );
        let drained = [head(0.0, 0.0, 0.0), head(90.0, 90.0, 1e-13)];
        assert_eq!(
            lwb_position(&drained, LwbNormalization::SumResidual, prev),
            prev
        );
        // The literal denominator has no fallback: drained heads pull the BS to the origin.
        assert_eq!(
            lwb_position(&drained, LwbNormalization::TotalInitial, prev),
            Point2::new(90.0 * 1e-13 / 0.5, 90.0 * 1e-13 / 0.5)
        );
    }

    #[test]
    fn next_position_per_strategy() {
        let nodes = vec![
            NodeState::new(0, Point2::new(30.0, 70.0), 0.2),
            NodeState::new(1, Point2::new(35.0, 75.0), 0.25),
        ];
        let assignment = ClusterAssignment {
            head_ids: vec![0],
            membership: vec![Some(0), Some(0)],
            iterations_used: 1,
        };

        let central = StrategySpec::for_area(
            StrategyKind::StaticCentral,
            100.0,
            100.0,
            Default::default(),
        );
        let mut bs = BsState::new(central.initial_position);
        for _ in 0..3 {
            assert_eq!(
                next_bs_position(&central, &mut bs, &assignment, &nodes, 0.25),
                Point2::new(50.0, 50.0)
            );
        }
        assert_eq!(bs.trace, vec![Point2::new(50.0, 50.0); 3]);

        let mobile =
            StrategySpec::for_area(StrategyKind::MobileLwb, 100.0, 100.0, Default::default());
        assert_eq!(mobile.initial_position, Point2::new(50.0, 50.0));
        let mut bs = BsState::new(mobile.initial_position);
        assert_eq!(
            next_bs_position(&mobile, &mut bs, &assignment, &nodes, 0.25),
            Point2::new(30.0, 70.0)
        );

        let mut dead = nodes.clone();
        dead[0].mark_dead();
        let p = next_bs_position(&mobile, &mut bs, &assignment, &dead, 0.25);
        assert_eq!(p, Point2::new(30.0, 70.0));
        assert_eq!(bs.trace.len(), 2);
    }

    #[test]
    fn strategy_names_round_trip() {
        for kind in StrategyKind::ALL {
            assert_eq!(kind.name().parse::<StrategyKind>().unwrap(), kind);
        }
        assert!("nowhere".parse::<StrategyKind>().is_err());
        for mode in [
            LwbNormalization::SumResidual,
            LwbNormalization::TotalInitial,
        ] {
            assert_eq!(mode.name().parse::<LwbNormalization>().unwrap(), mode);
        }
    }

    /// Independent oracle: plain weighted average, no compensation.
    fn brute_force(heads: &[HeadSample<f64>]) -> (f64, f64) {
        let mut sx = 0.0;
        let mut sy = 0.0;
        let mut w = 0.0;
        for h in heads {
            sx += h.residual * h.position.x;
            sy += h.residual * h.position.y;
            w += h.residual;
        }
        (sx / w, sy / w)
    }

    fn head_sets() -> impl Strategy<Value = Vec<HeadSample<f64>>> {
        prop::collection::vec((0.0f64..300.0, 0.0f64..300.0, 1e-6f64..0.25), 1..=5)
            .prop_map(|v| v.into_iter().map(|(x, y, e)| head(x, y, e)).collect())
    }

    proptest! {
        #[test]
        fn lwb_matches_weighted_average_oracle(heads in head_sets()) {
            let p = lwb_position(&heads, LwbNormalization::SumResidual, Point2::new(0.0, 0.0));
            let (ox, oy) = brute_force(&heads);
            prop_assert!((p.x - ox).abs() <= 1e-9 && (p.y - oy).abs() <= 1e-9);
        }

        #[test]
        fn lwb_stays_in_bounding_box(heads in head_sets()) {
            let p = lwb_position(&heads, LwbNormalization::SumResidual, Point2::new(-5.0, -5.0));
            let min_x = heads.iter().map(|h| h.position.x).fold(f64::INFINITY, f64::min);
            let max_x = heads.iter().map(|h| h.position.x).fold(f64::NEG_INFINITY, f64::max);
            let min_y = heads.iter().map(|h| h.position.y).fold(f64::INFINITY, f64::min);
            let max_y = heads.iter().map(|h| h.position.y).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(p.x >= min_x - 1e-9 && p.x <= max_x + 1e-9);
            prop_assert!(p.y >= min_y - 1e-9 && p.y <= max_y + 1e-9);
        }

        #[test]
        fn lwb_is_scale_invariant(heads in head_sets(), factor in 0.01f64..100.0) {
            let scaled: Vec<_> = heads.iter().map(|h| HeadSample { residual: h.residual * factor, ..*h }).collect();
            let a = lwb_position(&heads, LwbNormalization::SumResidual, Point2::new(0.0, 0.0));
            let b = lwb_position(&scaled, LwbNormalization::SumResidual, Point2::new(0.0, 0.0));
            prop_assert!((a.x - b.x).abs() <= 1e-9 && (a.y - b.y).abs() <= 1e-9);
        }

        #[test]
        fn equal_weights_give_plain_centroid(heads in head_sets(), e in 1e-6f64..0.25) {
            let equal: Vec<_> = heads.iter().map(|h| HeadSample { residual: e, ..*h }).collect();
            let p = lwb_position(&equal, LwbNormalization::SumResidual, Point2::new(0.0, 0.0));
            let n = equal.len() as f64;
            let cx = equal.iter().map(|h| h.position.x).sum::<f64>() / n;
            let cy = equal.iter().map(|h| h.position.y).sum::<f64>() / n;
            prop_assert!((p.x - cx).abs() <= 1e-9 && (p.y - cy).abs() <= 1e-9);
        }
    }
}
