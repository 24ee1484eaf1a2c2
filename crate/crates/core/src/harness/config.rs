//! Flat `key = value` experiment configuration.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::construction::{experiment_lattice, Fault, InflationConfig};
use crate::error::{Error, Result};
use crate::solver::{DtPolicy, TimeGrid};
use crate::spectral::Lattice;

/// Every accepted key, in file order.
pub const KEYS: [&str; 18] = [
    "alpha",
    "nu",
    "r",
    "K_override",
    "beta",
    "gamma",
    "zeta",
    "s",
    "p",
    "N1",
    "N2",
    "N3",
    "dt",
    "t_final_override",
    "quad_nodes",
    "snapshots",
    "outdir",
    "seed",
];

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub inflation: InflationConfig,
    /// Explicit lattice; sized from the construction when absent.
    pub dims: Option<[usize; 3]>,
    /// Fixed step; CFL-limited stepping when absent.
    pub dt: Option<f64>,
    pub quad_nodes: usize,
    pub snapshots: usize,
    pub outdir: Option<PathBuf>,
    pub seed: u64,
    /// Run even when the constraint report fails; results are marked unsupported.
    pub override_constraints: bool,
    /// Deliberate construction fault (never read from files).
    pub fault: Fault,
    /// Adjustments made while filling defaults.
    pub notes: Vec<String>,
}

impl ExperimentConfig {
    /// Default experiment point for `r` pairs with `alpha = 1`, `beta = 0.45`, `p = inf`, `K = 4`.
    pub fn standard(r: u32) -> Self {
        let (inflation, notes) = InflationConfig::default_point(r, 1.0, 0.45, f64::INFINITY);
        Self {
            inflation: inflation.with_k(4),
            dims: None,
            dt: None,
            quad_nodes: 64,
            snapshots: 50,
            outdir: None,
            seed: 0,
            override_constraints: false,
            fault: Fault::None,
            notes,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Parse `key = value` lines; `#` starts a comment. Unknown or repeated
    /// keys are errors. Optional values accept `none`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values: HashMap<&str, (usize, String)> = HashMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Config {
                line: n + 1,
                msg: format!("expected key = value, got '{line}'"),
            })?;
            let key = k.trim();
            let Some(key) = KEYS.iter().find(|x| **x == key) else {
                return Err(Error::Config {
                    line: n + 1,
                    msg: format!("unknown key '{key}'"),
                });
            };
            if values.insert(key, (n + 1, v.trim().to_string())).is_some() {
                return Err(Error::Config {
                    line: n + 1,
                    msg: format!("duplicate key '{key}'"),
                });
            }
        }
        Self::from_pairs(&values)
    }

    fn from_pairs(values: &HashMap<&str, (usize, String)>) -> Result<Self> {
        let get = |k: &str| values.get(k).filter(|(_, v)| !v.eq_ignore_ascii_case("none"));
        fn num<T: std::str::FromStr>(k: &str, e: Option<&(usize, String)>) -> Result<Option<T>> {
            e.map(|(line, v)| {
                v.parse::<T>().map_err(|_| Error::Config {
                    line: *line,
                    msg: format!("cannot parse {k} = '{v}'"),
                })
            })
            .transpose()
        }
        let f = |k: &str| num::<f64>(k, get(k));
        let alpha = f("alpha")?.unwrap_or(1.0);
        let r = num::<u32>("r", get("r"))?.unwrap_or(4);
        let p = match get("p") {
            Some((_, v)) if v.eq_ignore_ascii_case("inf") => f64::INFINITY,
            other => num::<f64>("p", other)?.unwrap_or(f64::INFINITY),
        };
        let beta_given = f("beta")?;
        let (mut inflation, mut notes) = InflationConfig::default_point(r, alpha, beta_given.unwrap_or(0.45), p);
        if let Some(b) = beta_given {
            if b != inflation.beta {
                // an explicit beta is kept and left to the validator
                notes.clear();
                let (c, _) = InflationConfig::default_point(r, alpha, b, f64::INFINITY);
                inflation.beta = b;
                inflation.zeta = c.zeta;
                inflation.gamma = c.gamma;
            }
        }
        if let Some(v) = f("nu")? {
            inflation.nu = v;
        }
        if let Some(v) = f("zeta")? {
            inflation.zeta = v;
        }
        if let Some(v) = f("gamma")? {
            inflation.gamma = v;
        }
        if let Some(v) = f("s")? {
            inflation.s = v;
        }
        inflation.k_override = num::<u64>("K_override", get("K_override"))?;
        inflation.t_final_override = f("t_final_override")?;

        let n = ["N1", "N2", "N3"].map(|k| num::<usize>(k, get(k)));
        let dims = match (n[0].as_ref(), n[1].as_ref(), n[2].as_ref()) {
            (Ok(Some(a)), Ok(Some(b)), Ok(Some(c))) => Some([*a, *b, *c]),
            (Ok(None), Ok(None), Ok(None)) => None,
            _ => {
                for res in n {
                    res?;
                }
                let line = ["N1", "N2", "N3"].iter().filter_map(|k| values.get(k)).map(|e| e.0).min().unwrap_or(0);
                return Err(Error::Config {
                    line,
                    msg: "N1, N2, N3 must be given together".into(),
                });
            }
        };
        Ok(Self {
            inflation,
            dims,
            dt: f("dt")?,
            quad_nodes: num::<usize>("quad_nodes", get("quad_nodes"))?.unwrap_or(64),
            snapshots: num::<usize>("snapshots", get("snapshots"))?.unwrap_or(50),
            outdir: get("outdir").map(|(_, v)| PathBuf::from(v)),
            seed: num::<u64>("seed", get("seed"))?.unwrap_or(0),
            override_constraints: false,
            fault: Fault::None,
            notes,
        })
    }

    /// Canonical text form; parses back to the same configuration.
    pub fn to_text(&self) -> String {
        let c = &self.inflation;
        let opt = |v: Option<String>| v.unwrap_or_else(|| "none".into());
        let mut s = String::new();
        let dims = self.dims.map(|d| d.map(|x| x.to_string()));
        let lines: [(&str, String); 18] = [
            ("alpha", c.alpha.to_string()),
            ("nu", c.nu.to_string()),
            ("r", c.r.to_string()),
            ("K_override", opt(c.k_override.map(|k| k.to_string()))),
            ("beta", c.beta.to_string()),
            ("gamma", c.gamma.to_string()),
            ("zeta", c.zeta.to_string()),
            ("s", c.s.to_string()),
            ("p", if c.p.is_infinite() { "inf".into() } else { c.p.to_string() }),
            ("N1", opt(dims.as_ref().map(|d| d[0].clone()))),
            ("N2", opt(dims.as_ref().map(|d| d[1].clone()))),
            ("N3", opt(dims.as_ref().map(|d| d[2].clone()))),
            ("dt", opt(self.dt.map(|v| v.to_string()))),
            ("t_final_override", opt(c.t_final_override.map(|v| v.to_string()))),
            ("quad_nodes", self.quad_nodes.to_string()),
            ("snapshots", self.snapshots.to_string()),
            ("outdir", opt(self.outdir.as_ref().map(|p| p.display().to_string()))),
            ("seed", self.seed.to_string()),
        ];
        for (k, v) in lines {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    pub fn lattice(&self) -> Result<Lattice> {
        match self.dims {
            Some([a, b, c]) => Lattice::new(a, b, c),
            None => experiment_lattice(&self.inflation),
        }
    }

    pub fn dt_policy(&self) -> DtPolicy {
        match self.dt {
            Some(dt) => DtPolicy::Fixed(dt),
            None => DtPolicy::default(),
        }
    }

    /// Snapshot schedule clustered around the start of the inflation window.
    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::inflation(
            self.inflation.final_time(),
            self.inflation.window_start(),
            self.snapshots.max(4),
            self.dt_policy(),
        )
    }
}
