//! First-order radio energy model.
//!
//! Transmitting `k` bits over distance `d` costs `E_elec*k + E_fs*k*d^2` below
//! the threshold distance and `E_elec*k + E_mp*k*d^4` at or above it.
//! Receiving costs `E_elec*k`; fusing costs `E_DA` per bit per signal.

use crate::error::{config_err, domain_err, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadioParams<S> {
    /// Electronics energy per bit, J/bit.
    pub e_elec: S,
    /// Free-space amplifier, J/bit/m^2.
    pub e_fs: S,
    /// Multipath amplifier, J/bit/m^4.
    pub e_mp: S,
    /// Data aggregation, J/bit/signal.
    pub e_da: S,
    /// Regime crossover distance, meters.
    pub d_threshold: S,
}

impl<S: Scalar> RadioParams<S> {
    /// 50 nJ/bit, 10 pJ/bit/m^2, 0.0013 pJ/bit/m^4, 5 nJ/bit/signal, d_0 = 75 m.
    pub fn table1() -> Self {
        Self {
            e_elec: S::lit(50e-9),
            e_fs: S::lit(10e-12),
            e_mp: S::lit(0.0013e-12),
            e_da: S::lit(5e-9),
            d_threshold: S::lit(75.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("e_elec", self.e_elec),
            ("e_fs", self.e_fs),
            ("e_mp", self.e_mp),
            ("e_da", self.e_da),
            ("d_threshold", self.d_threshold),
        ] {
            if !(v.is_finite() && v > S::zero()) {
                return Err(config_err(
                    field,
                    format!("must be finite and > 0 (got {v})"),
                ));
            }
        }
        Ok(())
    }
}

impl<S: Scalar> Default for RadioParams<S> {
    fn default() -> Self {
        Self::table1()
    }
}

fn check_distance<S: Scalar>(op: &'static str, d: S) -> Result<()> {
    if d.is_finite() && d >= S::zero() {
        Ok(())
    } else {
        Err(domain_err(
            op,
            format!("distance must be finite and >= 0 (got {d})"),
        ))
    }
}

pub fn tx_energy<S: Scalar>(bits: u64, d: S, p: &RadioParams<S>) -> Result<S> {
    check_distance("tx_energy", d)?;
    let k = S::count(bits);
    let amp = if d < p.d_threshold {
        p.e_fs * k * d * d
    } else {
        p.e_mp * k * d.powi(4)
    };
    Ok(p.e_elec * k + amp)
}

pub fn rx_energy<S: Scalar>(bits: u64, p: &RadioParams<S>) -> S {
    p.e_elec * S::count(bits)
}

pub fn aggregation_energy<S: Scalar>(
    bits_per_signal: u64,
    signal_count: u64,
    p: &RadioParams<S>,
) -> S {
    p.e_da * S::count(bits_per_signal) * S::count(signal_count)
}

/// Local broadcast sized to reach `radius`.
pub fn broadcast_energy<S: Scalar>(bits: u64, radius: S, p: &RadioParams<S>) -> Result<S> {
    check_distance("broadcast_energy", radius).and_then(|_| tx_energy(bits, radius, p))
}
