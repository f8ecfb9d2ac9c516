//! Physical parameters of the waveguide, the driven emitter, and the way the
//! two are coupled.
//!
//! Energies are in units of the characteristic hopping `J`. The on-site
//! resonator energy is pinned to zero so the chain keeps its chiral symmetry.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimerized coupled-resonator chain: intracell hopping `t1 = J(1 + delta)`,
/// intercell hopping `t2 = J(1 - delta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveguideParams {
    pub j: f64,
    pub delta: f64,
    pub omega0: f64,
}

impl WaveguideParams {
    /// Chain with `J = 1` and zero on-site energy.
    pub fn new(delta: f64) -> Self {
        Self {
            j: 1.0,
            delta,
            omega0: 0.0,
        }
    }

    pub fn t1(&self) -> f64 {
        self.j * (1.0 + self.delta)
    }

    pub fn t2(&self) -> f64 {
        self.j * (1.0 - self.delta)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j.is_finite() && self.j > 0.0) {
            return Err(Error::OutOfRange {
                field: "J",
                value: self.j,
            });
        }
        if !(self.delta.is_finite() && self.delta.abs() <= 1.0) {
            return Err(Error::OutOfRange {
                field: "delta",
                value: self.delta,
            });
        }
        if self.omega0 != 0.0 {
            return Err(Error::Unsupported(
                "nonzero on-site energy omega0 breaks chiral symmetry",
            ));
        }
        Ok(())
    }
}

/// Driven three-level emitter. The `|g> -> |e>` transition couples to the
/// waveguide with strength `g`; `|a> -> |e>` is driven with Rabi frequency
/// `omega_rabi` at detuning `delta_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitterParams {
    pub omega_e: f64,
    pub delta_c: f64,
    pub omega_rabi: f64,
    pub g: f64,
    /// Unit cell hosting the coupling site(s).
    pub x1: i64,
}

impl EmitterParams {
    /// Metastable-state energy `omega_e - delta_c`.
    pub fn omega_a(&self) -> f64 {
        self.omega_e - self.delta_c
    }

    pub fn validate(&self) -> Result<()> {
        for (field, value) in [
            ("omega_e", self.omega_e),
            ("delta_c", self.delta_c),
            ("omega_rabi", self.omega_rabi),
            ("g", self.g),
        ] {
            if !value.is_finite() {
                return Err(Error::OutOfRange { field, value });
            }
        }
        if self.omega_rabi < 0.0 {
            return Err(Error::OutOfRange {
                field: "omega_rabi",
                value: self.omega_rabi,
            });
        }
        if self.g < 0.0 {
            return Err(Error::OutOfRange {
                field: "g",
                value: self.g,
            });
        }
        Ok(())
    }
}

/// Which sublattice site(s) of cell `x1` the emitter couples to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coupling {
    A,
    B,
    AB,
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coupling::A => "A",
            Coupling::B => "B",
            Coupling::AB => "AB",
        })
    }
}

impl FromStr for Coupling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Coupling::A),
            "B" | "b" => Ok(Coupling::B),
            "AB" | "ab" => Ok(Coupling::AB),
            other => Err(Error::InvalidArgument(format!(
                "unknown coupling configuration {other:?} (expected A, B or AB)"
            ))),
        }
    }
}

/// Coupling configuration with mixing parameter `alpha`: `g1 = g alpha` on the
/// A site and `g2 = g (1 - alpha)` on the B site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConfig {
    variant: Coupling,
    alpha: f64,
}

impl CouplingConfig {
    pub const A: CouplingConfig = CouplingConfig {
        variant: Coupling::A,
        alpha: 1.0,
    };
    pub const B: CouplingConfig = CouplingConfig {
        variant: Coupling::B,
        alpha: 0.0,
    };

    /// Mixed coupling; `alpha` must lie strictly inside (0, 1).
    pub fn ab(alpha: f64) -> Result<Self> {
        Self::new(Coupling::AB, alpha)
    }

    pub fn new(variant: Coupling, alpha: f64) -> Result<Self> {
        let ok = match variant {
            Coupling::A => alpha == 1.0,
            Coupling::B => alpha == 0.0,
            Coupling::AB => alpha > 0.0 && alpha < 1.0,
        };
        if !ok {
            return Err(Error::OutOfRange {
                field: "alpha",
                value: alpha,
            });
        }
        Ok(Self { variant, alpha })
    }

    /// Picks the variant implied by `alpha` (1 -> A, 0 -> B, otherwise AB).
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        if alpha == 1.0 {
            Ok(Self::A)
        } else if alpha == 0.0 {
            Ok(Self::B)
        } else {
            Self::ab(alpha)
        }
    }

    pub fn variant(&self) -> Coupling {
        self.variant
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn g1(&self, g: f64) -> f64 {
        g * self.alpha
    }

    pub fn g2(&self, g: f64) -> f64 {
        g * (1.0 - self.alpha)
    }
}

/// Passband probed by the incoming photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    #[default]
    Upper,
    Lower,
}

impl Band {
    /// `+1` for the upper band, `-1` for the lower.
    pub fn sign(self) -> f64 {
        match self {
            Band::Upper => 1.0,
            Band::Lower => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Band::Upper => "upper",
            Band::Lower => "lower",
        }
    }
}

/// Validated, immutable parameter bundle shared by every computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct System {
    pub waveguide: WaveguideParams,
    pub emitter: EmitterParams,
    pub coupling: CouplingConfig,
    t1: f64,
    t2: f64,
}

impl System {
    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    pub fn omega_a(&self) -> f64 {
        self.emitter.omega_a()
    }

    pub fn g1(&self) -> f64 {
        self.coupling.g1(self.emitter.g)
    }

    pub fn g2(&self) -> f64 {
        self.coupling.g2(self.emitter.g)
    }

    /// True when `|omega_e|` lies inside a passband `[2|delta|J, 2J]`.
    /// Out-of-band emitters are accepted but flagged through this method.
    pub fn emitter_in_band(&self) -> bool {
        let wg = &self.waveguide;
        let w = self.emitter.omega_e.abs();
        w >= 2.0 * wg.delta.abs() * wg.j && w <= 2.0 * wg.j
    }

    pub fn with_omega_rabi(&self, omega_rabi: f64) -> Result<Self> {
        let mut emitter = self.emitter;
        emitter.omega_rabi = omega_rabi;
        validate(self.waveguide, emitter, self.coupling)
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        let mut waveguide = self.waveguide;
        waveguide.delta = delta;
        validate(waveguide, self.emitter, self.coupling)
    }

    pub fn with_coupling(&self, coupling: CouplingConfig) -> Self {
        Self { coupling, ..*self }
    }

    pub fn with_x1(&self, x1: i64) -> Self {
        let mut s = *self;
        s.emitter.x1 = x1;
        s
    }
}

/// Checks every invariant and returns the normalized bundle with the
/// hoppings precomputed.
pub fn validate(
    waveguide: WaveguideParams,
    emitter: EmitterParams,
    coupling: CouplingConfig,
) -> Result<System> {
    waveguide.validate()?;
    emitter.validate()?;
    // Re-check so a hand-built config cannot smuggle in a bad alpha.
    CouplingConfig::new(coupling.variant, coupling.alpha)?;
    Ok(System {
        waveguide,
        emitter,
        coupling,
        t1: waveguide.t1(),
        t2: waveguide.t2(),
    })
}

/// On-disk parameter file. Every field is optional so files can be partial
/// and merged over defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamFile {
    #[serde(rename = "J", skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_e: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_rabi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<Coupling>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x1: Option<i64>,
}

impl ParamFile {
    /// Fields set in `other` win.
    pub fn merge(mut self, other: &ParamFile) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(j, delta, omega_e, delta_c, omega_rabi, g, alpha, config, x1);
        self
    }

    /// Builds a validated system, filling unset fields with the defaults
    /// `J = 1, delta = 0.5, omega_e = 1.5, delta_c = 0, omega_rabi = 0,
    /// g = 0.2, config = A, x1 = 20`.
    ///
    /// For A and B the coupling fixes alpha; an explicit alpha that disagrees
    /// is rejected. When only `alpha` is given the variant follows from it.
    pub fn to_system(&self) -> Result<System> {
        let waveguide = WaveguideParams {
            j: self.j.unwrap_or(1.0),
            delta: self.delta.unwrap_or(0.5),
            omega0: 0.0,
        };
        let emitter = EmitterParams {
            omega_e: self.omega_e.unwrap_or(1.5),
            delta_c: self.delta_c.unwrap_or(0.0),
            omega_rabi: self.omega_rabi.unwrap_or(0.0),
            g: self.g.unwrap_or(0.2),
            x1: self.x1.unwrap_or(20),
        };
        let coupling = match (self.config, self.alpha) {
            (Some(Coupling::A), a) => CouplingConfig::new(Coupling::A, a.unwrap_or(1.0))?,
            (Some(Coupling::B), a) => CouplingConfig::new(Coupling::B, a.unwrap_or(0.0))?,
            (Some(Coupling::AB), Some(a)) => CouplingConfig::ab(a)?,
            (Some(Coupling::AB), None) => CouplingConfig::ab(0.5)?,
            (None, Some(a)) => CouplingConfig::from_alpha(a)?,
            (None, None) => CouplingConfig::A,
        };
        validate(waveguide, emitter, coupling)
    }
}
