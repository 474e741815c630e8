//! Run configuration: what to compute, on which map, at which radii, under
//! which budgets. Every report embeds the resolved configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::BigRational;
use rdet_core::bounds::epsilon_t;
use rdet_core::dynamics::{MapSpec, DEFAULT_EVAL_DEPTH};
use rdet_core::rational::{parse_fraction, to_f64};
use rdet_core::system::DEFAULT_DEPTH_CAP;
use rdet_core::IntervalSystem;
use serde::{Deserialize, Serialize};

use crate::experiments::Thresholds;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemConfig {
    Ternary,
    Theorem3 { stages: u32 },
}

impl SystemConfig {
    pub fn build(&self, depth_cap: u32) -> Result<IntervalSystem> {
        Ok(match self {
            SystemConfig::Ternary => IntervalSystem::ternary().with_depth_cap(depth_cap)?,
            SystemConfig::Theorem3 { stages } => IntervalSystem::theorem3_with_cap(*stages, depth_cap)?,
        })
    }
}

impl fmt::Display for SystemConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemConfig::Ternary => f.write_str("ternary"),
            SystemConfig::Theorem3 { stages } => write!(f, "theorem3:{stages}"),
        }
    }
}

impl FromStr for SystemConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        match (parts.next(), parts.next(), parts.next()) {
            (Some("ternary"), None, _) => Ok(SystemConfig::Ternary),
            (Some("theorem3"), stages, None) => {
                let stages = match stages {
                    Some(v) => v
                        .parse()
                        .map_err(|_| Error::Usage(format!("bad stage count {v:?}")))?,
                    None => 3,
                };
                Ok(SystemConfig::Theorem3 { stages })
            }
            _ => Err(Error::Usage(format!(
                "unknown system {s:?}; expected ternary or theorem3[:stages]"
            ))),
        }
    }
}

/// Map selection as written on the command line: `logistic:3.2`,
/// `tent:2.0`, `odometer:ternary`, `odometer:theorem3:3`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapConfig {
    Logistic { r: f64 },
    Tent { s: f64 },
    Odometer { system: SystemConfig },
}

impl MapConfig {
    pub fn system(&self, depth_cap: u32) -> Result<Option<Arc<IntervalSystem>>> {
        match self {
            MapConfig::Odometer { system } => Ok(Some(Arc::new(system.build(depth_cap)?))),
            _ => Ok(None),
        }
    }

    pub fn build(&self, depth_cap: u32) -> Result<MapSpec> {
        Ok(match self {
            MapConfig::Logistic { r } => MapSpec::logistic(*r)?,
            MapConfig::Tent { s } => MapSpec::tent(*s)?,
            MapConfig::Odometer { system } => {
                let sys = Arc::new(system.build(depth_cap)?);
                let depth = DEFAULT_EVAL_DEPTH.min(sys.depth_cap() - 1);
                MapSpec::odometer(sys, depth)?
            }
        })
    }
}

impl fmt::Display for MapConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapConfig::Logistic { r } => write!(f, "logistic:{r:?}"),
            MapConfig::Tent { s } => write!(f, "tent:{s:?}"),
            MapConfig::Odometer { system } => write!(f, "odometer:{system}"),
        }
    }
}

impl FromStr for MapConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let param = |name: &str| -> Result<f64> {
            rest.parse::<f64>()
                .map_err(|_| Error::Usage(format!("{name} needs a numeric parameter, got {rest:?}")))
        };
        match kind {
            "logistic" => Ok(MapConfig::Logistic { r: param("logistic")? }),
            "tent" => Ok(MapConfig::Tent { s: param("tent")? }),
            "odometer" => Ok(MapConfig::Odometer {
                system: if rest.is_empty() {
                    SystemConfig::Ternary
                } else {
                    rest.parse()?
                },
            }),
            _ => Err(Error::Usage(format!(
                "unknown map {s:?}; expected logistic:<r>, tent:<s> or odometer:<system>"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialCondition {
    Point(f64),
    /// Binary address, least significant digit first.
    Address(String),
}

/// Where the radii of a run come from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EpsSpec {
    /// Fractions (`7/2187`) or decimals (`1e-3`), kept verbatim.
    List { values: Vec<String> },
    /// The interleaved `eps_n, eps_n'` sequence of the staged construction.
    Ladder,
    /// Extreme-grandchild gaps `eps_t` for `t` in `from..=to`.
    EpsT { from: u32, to: u32 },
}

impl fmt::Display for EpsSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsSpec::List { values } => f.write_str(&values.join(",")),
            EpsSpec::Ladder => f.write_str("ladder"),
            EpsSpec::EpsT { from, to } => write!(f, "eps_t:{from}..{to}"),
        }
    }
}

/// Parses `a..b` (inclusive) or a single integer.
pub fn parse_range(s: &str) -> Result<(u32, u32)> {
    let bad = || Error::Usage(format!("bad range {s:?}; expected a..b"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (s, s),
    };
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

impl FromStr for EpsSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "ladder" {
            return Ok(EpsSpec::Ladder);
        }
        if let Some(r) = s.strip_prefix("eps_t:") {
            let (from, to) = parse_range(r)?;
            return Ok(EpsSpec::EpsT { from, to });
        }
        let values: Vec<String> = s.split(',').map(|v| v.trim().to_string()).collect();
        for v in &values {
            parse_fraction(v)?;
        }
        Ok(EpsSpec::List { values })
    }
}

/// Where a radius grid came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Generic,
    Ladder,
    EpsT,
}

/// One radius, kept exact alongside its float value.
#[derive(Clone, Debug, PartialEq)]
pub struct Radius {
    pub exact: BigRational,
    pub label: String,
}

impl Radius {
    pub fn new(exact: BigRational, label: impl Into<String>) -> Self {
        Radius {
            exact,
            label: label.into(),
        }
    }

    pub fn value(&self) -> f64 {
        to_f64(&self.exact)
    }
}

impl EpsSpec {
    pub fn provenance(&self) -> Provenance {
        match self {
            EpsSpec::List { .. } => Provenance::Generic,
            EpsSpec::Ladder => Provenance::Ladder,
            EpsSpec::EpsT { .. } => Provenance::EpsT,
        }
    }

    /// Radii sorted by decreasing value. `Ladder` needs a staged system and
    /// `EpsT` falls back to the ternary system for non-odometer maps.
    pub fn resolve(&self, sys: Option<&IntervalSystem>) -> Result<Vec<Radius>> {
        let mut out = match self {
            EpsSpec::List { values } => values
                .iter()
                .map(|v| Ok(Radius::new(parse_fraction(v)?, v.clone())))
                .collect::<Result<Vec<_>>>()?,
            EpsSpec::Ladder => {
                let ladder = sys
                    .and_then(|s| s.ladder())
                    .ok_or_else(|| Error::Usage("the ladder grid needs a theorem3 system".into()))?;
                ladder
                    .stages()
                    .iter()
                    .flat_map(|st| {
                        [
                            Radius::new(st.eps.clone(), format!("eps_{}", st.n)),
                            Radius::new(st.eps_prime.clone(), format!("eps_{}'", st.n)),
                        ]
                    })
                    .collect()
            }
            EpsSpec::EpsT { from, to } => {
                let ternary;
                let sys = match sys {
                    Some(s) => s,
                    None => {
                        ternary = IntervalSystem::ternary();
                        &ternary
                    }
                };
                (*from..=*to)
                    .map(|t| Ok(Radius::new(epsilon_t(sys, t)?.value, format!("eps_{t}"))))
                    .collect::<Result<Vec<_>>>()?
            }
        };
        for r in &out {
            if r.exact <= BigRational::from_integer(0.into()) {
                return Err(Error::Usage(format!("radius {} must be positive", r.label)));
            }
        }
        out.sort_by(|a, b| b.exact.cmp(&a.exact));
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    /// Longest trajectory window.
    pub n_max: usize,
    /// Largest `m`; also the proxy for `m = infinity`.
    pub m_cap: usize,
    /// Depth cap for interval systems.
    pub depth: u32,
    /// Upper limit on `n_max * m_cap` per radius.
    pub max_cells: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            n_max: 16384,
            m_cap: 256,
            depth: DEFAULT_DEPTH_CAP,
            max_cells: 1 << 23,
        }
    }
}

impl Budgets {
    /// Applies `RDET_N_MAX`, `RDET_M_CAP`, `RDET_DEPTH` and `RDET_MAX_CELLS`.
    pub fn with_env(mut self) -> Result<Self> {
        self.apply_env(|k| std::env::var(k).ok())?;
        Ok(self)
    }

    pub fn apply_env(&mut self, get: impl Fn(&str) -> Option<String>) -> Result<()> {
        fn read<T: FromStr>(key: &str, v: Option<String>, slot: &mut T) -> Result<()> {
            if let Some(v) = v {
                *slot = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Usage(format!("{key}={v:?} is not a valid number")))?;
            }
            Ok(())
        }
        read("RDET_N_MAX", get("RDET_N_MAX"), &mut self.n_max)?;
        read("RDET_M_CAP", get("RDET_M_CAP"), &mut self.m_cap)?;
        read("RDET_DEPTH", get("RDET_DEPTH"), &mut self.depth)?;
        read("RDET_MAX_CELLS", get("RDET_MAX_CELLS"), &mut self.max_cells)?;
        Ok(())
    }

    pub fn check(&self, n: usize, m: usize) -> Result<()> {
        let cells = n as u64 * m as u64;
        if n > self.n_max || cells > self.max_cells {
            return Err(Error::Budget(format!(
                "n={n}, m={m} exceeds n_max={} or max_cells={}",
                self.n_max, self.max_cells
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outputs {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    pub pgm: Option<PathBuf>,
    pub runs: Option<PathBuf>,
    pub trajectory: Option<PathBuf>,
    pub validation: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub map: Option<MapConfig>,
    /// Interval system for `construct` and the reproductions.
    pub system: Option<SystemConfig>,
    pub initial: Option<InitialCondition>,
    pub eps: Option<EpsSpec>,
    pub transient: usize,
    pub n: Option<usize>,
    pub m: Option<usize>,
    /// Level range for the four-fifths reproduction.
    pub t_range: Option<(u32, u32)>,
    pub thresholds: Option<Thresholds>,
    pub budgets: Budgets,
    pub outputs: Outputs,
    pub threads: Option<usize>,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(command: impl Into<String>) -> Self {
        RunConfig {
            command: command.into(),
            map: None,
            system: None,
            initial: None,
            eps: None,
            transient: 0,
            n: None,
            m: None,
            t_range: None,
            thresholds: None,
            budgets: Budgets::default(),
            outputs: Outputs::default(),
            threads: None,
            seed: 0,
        }
    }

    pub fn render(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rdet_core::rational::ratio;

    #[test]
    fn map_strings() {
        for s in ["logistic:3.2", "tent:2.0", "odometer:ternary", "odometer:theorem3:3"] {
            let m: MapConfig = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
        assert_eq!(
            "odometer".parse::<MapConfig>().unwrap(),
            MapConfig::Odometer {
                system: SystemConfig::Ternary
            }
        );
        assert!("henon:1.4".parse::<MapConfig>().is_err());
        assert!("tent:x".parse::<MapConfig>().is_err());
    }

    #[test]
    fn eps_specs() {
        assert_eq!("ladder".parse::<EpsSpec>().unwrap(), EpsSpec::Ladder);
        assert_eq!(
            "eps_t:2..8".parse::<EpsSpec>().unwrap(),
            EpsSpec::EpsT { from: 2, to: 8 }
        );
        let list: EpsSpec = "7/2187, 1e-3".parse().unwrap();
        let radii = list.resolve(None).unwrap();
        assert_eq!(radii[0].exact, ratio(7, 2187));
        assert_eq!(radii[1].exact, ratio(1, 1000));
        assert!("1/0".parse::<EpsSpec>().is_err());
        assert!("eps_t:5..2".parse::<EpsSpec>().is_err());
    }

    #[test]
    fn eps_t_grid_is_decreasing() {
        let radii = EpsSpec::EpsT { from: 0, to: 4 }.resolve(None).unwrap();
        assert_eq!(radii[0].exact, ratio(7, 9));
        assert_eq!(radii[4].exact, ratio(7, 729));
        assert!(EpsSpec::Ladder.resolve(None).is_err());
        let sys = IntervalSystem::theorem3(2).unwrap();
        let ladder = EpsSpec::Ladder.resolve(Some(&sys)).unwrap();
        assert_eq!(ladder.len(), 4);
        assert!(ladder.windows(2).all(|w| w[0].exact > w[1].exact));
    }

    #[test]
    fn env_overrides() {
        let mut b = Budgets::default();
        b.apply_env(|k| (k == "RDET_N_MAX").then(|| "512".to_string())).unwrap();
        assert_eq!(b.n_max, 512);
        assert!(b.check(1024, 1).is_err());
        assert!(b
            .apply_env(|k| (k == "RDET_M_CAP").then(|| "lots".to_string()))
            .is_err());
    }

    fn arb_map() -> impl Strategy<Value = MapConfig> {
        prop_oneof![
            (0.0..4.0f64).prop_map(|r| MapConfig::Logistic { r }),
            (0.0..2.0f64).prop_map(|s| MapConfig::Tent { s }),
            Just(MapConfig::Odometer {
                system: SystemConfig::Ternary
            }),
            (1u32..4).prop_map(|stages| MapConfig::Odometer {
                system: SystemConfig::Theorem3 { stages }
            }),
        ]
    }

    fn arb_eps() -> impl Strategy<Value = EpsSpec> {
        prop_oneof![
            Just(EpsSpec::Ladder),
            (0u32..5, 0u32..5).prop_map(|(a, b)| EpsSpec::EpsT { from: a, to: a + b }),
            proptest::collection::vec("[1-9]/[1-9][0-9]{0,3}", 1..4).prop_map(|values| EpsSpec::List { values }),
        ]
    }

    proptest! {
        #[test]
        fn config_round_trips(
            map in proptest::option::of(arb_map()),
            eps in proptest::option::of(arb_eps()),
            x0 in proptest::option::of(0.0..1.0f64),
            transient in 0usize..5000,
            n in proptest::option::of(1usize..100_000),
            threads in proptest::option::of(1usize..64),
            seed in any::<u64>(),
        ) {
            let mut cfg = RunConfig::new("rqa");
            cfg.map = map;
            cfg.eps = eps;
            cfg.initial = x0.map(InitialCondition::Point);
            cfg.transient = transient;
            cfg.n = n;
            cfg.threads = threads;
            cfg.seed = seed;
            cfg.t_range = Some((2, 2 + (seed % 7) as u32));
            cfg.thresholds = Some(Thresholds::default());
            cfg.outputs.csv = Some("out/profile.csv".into());
            let text = cfg.render().unwrap();
            prop_assert_eq!(RunConfig::parse(&text).unwrap(), cfg);
        }

        #[test]
        fn map_strings_round_trip(m in arb_map()) {
            prop_assert_eq!(m.to_string().parse::<MapConfig>().unwrap(), m);
        }
    }
}
