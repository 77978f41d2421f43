use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Unit production cost. Every model in this crate prices against zero
/// marginal cost.
pub const UNIT_COST: f64 = 0.0;

/// Entanglement parameter of the quantized location stage.
///
/// `Infinite` is the maximal-entanglement limit. It is never pushed through
/// `cosh`/`sinh`; solvers switch to their limit formulas instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gamma {
    Finite(f64),
    Infinite,
}

impl Gamma {
    pub const ZERO: Gamma = Gamma::Finite(0.0);

    /// `asinh(3/4)`, where `cosh = 5/4` and `sinh = 3/4`.
    pub fn three_quarters() -> Gamma {
        Gamma::Finite(0.75f64.asinh())
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Gamma::Finite(g) => Some(g),
            Gamma::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Gamma::Infinite)
    }

    pub fn is_classical(self) -> bool {
        self == Gamma::ZERO
    }

    /// `e^{-2γ}`, which is 1 for the classical game and 0 in the limit.
    ///
    /// All entanglement-dependent closed forms are written in terms of this
    /// quantity so that they stay finite for arbitrarily large γ.
    pub fn decay(self) -> f64 {
        match self {
            Gamma::Finite(g) => (-2.0 * g).exp(),
            Gamma::Infinite => 0.0,
        }
    }

    pub fn tanh(self) -> f64 {
        match self {
            Gamma::Finite(g) => g.tanh(),
            Gamma::Infinite => 1.0,
        }
    }

    /// Image-space direction of a unit move in a firm's own pre-image
    /// coordinate, normalized by `e^γ`: `(cosh γ, sinh γ) / e^γ`.
    pub fn own_direction(self) -> (f64, f64) {
        let f = self.decay();
        (0.5 * (1.0 + f), 0.5 * (1.0 - f))
    }

    fn validate(self) -> Result<()> {
        match self {
            Gamma::Finite(g) if !(g.is_finite() && g >= 0.0) => Err(Error::InvalidParams(
                format!("gamma must be a finite non-negative number or inf, got {g}"),
            )),
            _ => Ok(()),
        }
    }
}

impl Default for Gamma {
    fn default() -> Self {
        Gamma::ZERO
    }
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gamma::Finite(g) => write!(f, "{g}"),
            Gamma::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Gamma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
            return Ok(Gamma::Infinite);
        }
        let g: f64 = s
            .parse()
            .map_err(|_| Error::InvalidParams(format!("cannot parse gamma from {s:?}")))?;
        if g == f64::INFINITY {
            return Ok(Gamma::Infinite);
        }
        let gamma = Gamma::Finite(g);
        gamma.validate()?;
        Ok(gamma)
    }
}

/// Market geometry and cost constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    /// Length `L` of the market segment.
    pub length: f64,
    /// Transport cost `t` per unit distance.
    pub transport: f64,
    /// Fixed retail price `p0` used by the fixed-price variants.
    pub price: f64,
    pub gamma: Gamma,
}

impl MarketParams {
    pub fn new(length: f64, transport: f64, price: f64, gamma: Gamma) -> Result<Self> {
        let params = MarketParams {
            length,
            transport,
            price,
            gamma,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn classical(length: f64, transport: f64, price: f64) -> Result<Self> {
        Self::new(length, transport, price, Gamma::ZERO)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::InvalidParams(format!(
                "market length must be positive, got {}",
                self.length
            )));
        }
        if !(self.transport.is_finite() && self.transport >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "transport cost must be non-negative, got {}",
                self.transport
            )));
        }
        if !(self.price.is_finite() && self.price > 0.0) {
            return Err(Error::InvalidParams(format!(
                "retail price must be positive, got {}",
                self.price
            )));
        }
        self.gamma.validate()
    }

    pub fn with_transport(self, transport: f64) -> Self {
        MarketParams { transport, ..self }
    }

    pub fn with_gamma(self, gamma: Gamma) -> Self {
        MarketParams { gamma, ..self }
    }

    pub fn with_price(self, price: f64) -> Self {
        MarketParams { price, ..self }
    }

    pub fn half_length(&self) -> f64 {
        0.5 * self.length
    }

    /// Upper end `2/L` of the transport costs for which fixed-price demand
    /// stays non-negative everywhere it is served.
    pub fn fixed_price_transport_limit(&self) -> f64 {
        2.0 / self.length
    }

    /// Upper end `1/L` of the transport costs admitted by the free-price game.
    pub fn full_transport_limit(&self) -> f64 {
        1.0 / self.length
    }
}

impl Default for MarketParams {
    fn default() -> Self {
        MarketParams {
            length: 1.0,
            transport: 1.0,
            price: 1.0,
            gamma: Gamma::ZERO,
        }
    }
}
