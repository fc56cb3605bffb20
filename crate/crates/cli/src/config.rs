use std::path::{Path, PathBuf};

use pressure_lab::classical::{DampingProfile, Shear, TorusMap, TorusPartition};
use pressure_lab::symbolic::{Alphabet, CylinderFamily, Symbol, SymbolWord, DEFAULT_ENUMERATION_CAP, DEFAULT_FLOOR_LOG};
use pressure_lab::thermo::Potential;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    /// Output directory. Not part of the config hash.
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub map: MapSpec,
    #[serde(default)]
    pub partition: PartitionSpec,
    #[serde(default)]
    pub damping: DampingSpec,
    #[serde(default)]
    pub quantum: QuantumSpec,
    #[serde(default)]
    pub symbolic: SymbolicSpec,
    #[serde(default)]
    pub thermo: ThermoSpec,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub matrix: [[i64; 2]; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shear: Option<ShearSpec>,
}

impl Default for MapSpec {
    fn default() -> Self {
        Self { matrix: [[2, 1], [1, 1]], shear: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShearSpec {
    pub kappa: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

/// Vertical strips only; the quantum side has no rectangle projectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartitionSpec {
    pub cells: usize,
    #[serde(default)]
    pub offset: f64,
}

impl Default for PartitionSpec {
    fn default() -> Self {
        Self { cells: 2, offset: 0.0 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DampingSpec {
    #[default]
    Zero,
    Constant {
        value: f64,
    },
    Trig {
        constant: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
    /// One value per partition cell.
    Cells {
        values: Vec<f64>,
    },
    /// Binary grid file, relative to the config file.
    Grid {
        file: PathBuf,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuantumSpec {
    pub dims: Vec<usize>,
    pub c_window: f64,
    /// Word length `⌊κ log N / log λ⌋` of the dispersive and functional scans.
    pub kappa: f64,
    /// Largest shift `p` of the subinvariance check.
    pub k: usize,
    pub c_eps: f64,
    /// Fixed word length, overriding `kappa`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word_length: Option<usize>,
    /// Length of the window family in the mass scan.
    pub sigma_length: usize,
    pub dense_cap: usize,
    pub dump_matrices: bool,
}

impl Default for QuantumSpec {
    fn default() -> Self {
        Self {
            dims: vec![64, 128, 256],
            c_window: 4.0,
            kappa: 0.5,
            k: 2,
            c_eps: 0.5,
            word_length: None,
            sigma_length: 4,
            dense_cap: 4096,
            dump_matrices: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphabetSpec {
    Named(String),
    Adjacency(Vec<Vec<u8>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymbolicSpec {
    /// `"full"` (on `cells` symbols), `"golden_mean"` or a 0/1 adjacency matrix.
    pub alphabet: AlphabetSpec,
    /// Alphabet size when `alphabet = "full"`.
    pub cells: usize,
    /// Row-major `φ(a, b)`; zero when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<Vec<f64>>,
    /// Words of `W`, written `0.1.1`.
    pub w: Vec<String>,
    pub tau: Vec<f64>,
    pub p: Vec<usize>,
    /// Pressure gap of `W`; the tightest value is used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p0: Option<f64>,
    pub floor_log: f64,
    pub cap: u64,
    /// Sampling resolution for weights read off the map.
    pub resolution: usize,
}

impl Default for SymbolicSpec {
    fn default() -> Self {
        Self {
            alphabet: AlphabetSpec::Named("full".into()),
            cells: 2,
            potential: None,
            w: vec!["0.0".into()],
            tau: vec![0.5, 0.75, 1.0],
            p: vec![4, 8, 12],
            p0: None,
            floor_log: DEFAULT_FLOOR_LOG,
            cap: DEFAULT_ENUMERATION_CAP,
            resolution: 256,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThermoSpec {
    pub brute_depth: usize,
    pub smb_length: usize,
    pub smb_samples: usize,
    pub eps: f64,
    pub times: Vec<usize>,
    pub samples: usize,
    pub horizon: usize,
    /// Depth of the undamped-set pressure estimate.
    pub undamped_depth: usize,
}

impl Default for ThermoSpec {
    fn default() -> Self {
        Self {
            brute_depth: 14,
            smb_length: 12,
            smb_samples: 20_000,
            eps: 0.125,
            times: vec![6, 8, 10, 12],
            samples: 20_000,
            horizon: 40,
            undamped_depth: 12,
        }
    }
}

fn field(name: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("field `{name}`: {msg}"))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<(Self, PathBuf), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let cfg = Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((cfg, base))
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Hex SHA-256 of the canonical serialization, with `out` cleared.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut c = self.clone();
        c.out = PathBuf::new();
        let digest = Sha256::digest(c.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let q = &self.quantum;
        if q.dims.is_empty() {
            return Err(field("quantum.dims", "must not be empty"));
        }
        if let Some(i) = q.dims.iter().position(|&n| n < 2) {
            return Err(field(&format!("quantum.dims[{i}]"), "dimensions must be at least 2"));
        }
        if !(q.c_window > 0.0) || !(q.kappa > 0.0) || !(q.c_eps >= 0.0) {
            return Err(field("quantum", "c_window and kappa must be positive, c_eps nonnegative"));
        }
        if q.sigma_length == 0 {
            return Err(field("quantum.sigma_length", "must be positive"));
        }
        if self.partition.cells == 0 {
            return Err(field("partition.cells", "must be positive"));
        }
        let s = &self.symbolic;
        if let Some(i) = s.tau.iter().position(|t| !(0.5..=1.0).contains(t)) {
            return Err(field(&format!("symbolic.tau[{i}]"), "must lie in [0.5, 1]"));
        }
        if s.resolution == 0 {
            return Err(field("symbolic.resolution", "must be positive"));
        }
        let t = &self.thermo;
        if t.brute_depth < 2 || t.smb_length < 2 || t.undamped_depth < 2 {
            return Err(field("thermo", "depths and lengths must be at least 2"));
        }
        if !(t.eps > 0.0 && t.eps < 1.0) {
            return Err(field("thermo.eps", "must lie in (0, 1)"));
        }
        if let DampingSpec::Cells { values } = &self.damping {
            if values.len() != self.partition.cells {
                return Err(field("damping.values", format!("expected {} values, one per cell", self.partition.cells)));
            }
        }
        self.torus_map()?;
        self.torus_partition()?;
        self.alphabet()?;
        self.potential()?;
        self.w_family()?;
        Ok(())
    }

    pub fn torus_map(&self) -> Result<TorusMap<f64>, CliError> {
        let shear = self.map.shear.as_ref().map(|s| Shear { kappa: s.kappa, cos: s.cos.clone(), sin: s.sin.clone() });
        TorusMap::new(self.map.matrix, shear).map_err(|e| field("map", e))
    }

    pub fn torus_partition(&self) -> Result<TorusPartition<f64>, CliError> {
        TorusPartition::strips_with_offset(self.partition.cells, self.partition.offset).map_err(|e| field("partition", e))
    }

    pub fn damping(&self, base: &Path) -> Result<DampingProfile<f64>, CliError> {
        let d = match &self.damping {
            DampingSpec::Zero => Ok(DampingProfile::zero()),
            DampingSpec::Constant { value } => DampingProfile::constant(*value),
            DampingSpec::Trig { constant, cos, sin } => DampingProfile::trig(*constant, cos.clone(), sin.clone()),
            DampingSpec::Cells { values } => DampingProfile::cells(self.torus_partition()?, values.clone()),
            DampingSpec::Grid { file } => {
                let path = base.join(file);
                let f = std::fs::File::open(&path).map_err(|e| field("damping.file", format!("{}: {e}", path.display())))?;
                DampingProfile::read_grid(std::io::BufReader::new(f))
            }
        };
        d.map_err(|e| field("damping", e))
    }

    pub fn alphabet(&self) -> Result<Alphabet, CliError> {
        let a = match &self.symbolic.alphabet {
            AlphabetSpec::Named(n) if n == "full" => Alphabet::full(self.symbolic.cells),
            AlphabetSpec::Named(n) if n == "golden_mean" => Ok(Alphabet::golden_mean()),
            AlphabetSpec::Named(n) => return Err(field("symbolic.alphabet", format!("unknown alphabet `{n}` (full, golden_mean or a matrix)"))),
            AlphabetSpec::Adjacency(rows) => {
                Alphabet::new(&rows.iter().map(|r| r.iter().map(|&x| x != 0).collect()).collect::<Vec<Vec<bool>>>())
            }
        };
        a.map_err(|e| field("symbolic.alphabet", e))
    }

    pub fn potential(&self) -> Result<Potential<f64>, CliError> {
        let k = self.alphabet()?.size();
        match &self.symbolic.potential {
            None => Ok(Potential::zero(k)),
            Some(v) => Potential::new(k, v.clone()).map_err(|e| field("symbolic.potential", e)),
        }
    }

    /// `W`, with symbols drawn from the partition.
    pub fn w_family(&self) -> Result<CylinderFamily, CliError> {
        let k = self.partition.cells;
        let words: Vec<Vec<Symbol>> = self
            .symbolic
            .w
            .iter()
            .enumerate()
            .map(|(i, w)| {
                w.split('.')
                    .map(|s| match s.trim().parse::<Symbol>() {
                        Ok(v) if (v as usize) < k => Ok(v),
                        _ => Err(field(&format!("symbolic.w[{i}]"), format!("`{s}` is not a symbol below {k}"))),
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        let len = words.first().map_or(1, Vec::len);
        CylinderFamily::from_words(len, words.into_iter().map(SymbolWord::from_letters)).map_err(|e| field("symbolic.w", e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::parse("").unwrap();
        let back = RunConfig::parse(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
    }

    #[test]
    fn shipped_configs_round_trip() {
        for name in ["fixed_point_damping.toml", "golden_mean.toml"] {
            let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
            let (c, _) = RunConfig::load(&path).unwrap();
            let text = c.to_toml();
            let back = RunConfig::parse(&text).unwrap();
            assert_eq!(back, c, "{name}");
            assert_eq!(back.to_toml(), text);
        }
    }

    #[test]
    fn hash_ignores_output_directory() {
        let a = RunConfig::parse("out = \"a\"").unwrap();
        let b = RunConfig::parse("out = \"b\"").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), RunConfig::parse("seed = 3").unwrap().hash());
    }

    #[test]
    fn diagnostics_name_the_field() {
        let e = RunConfig::parse("[quantum]\ndims = [64, 1]").unwrap_err().to_string();
        assert!(e.contains("quantum.dims[1]"), "{e}");
        let e = RunConfig::parse("[symbolic]\nbogus = 1").unwrap_err().to_string();
        assert!(e.contains("line"), "{e}");
        let e = RunConfig::parse("[symbolic]\nw = [\"0.5\"]").unwrap_err().to_string();
        assert!(e.contains("symbolic.w[0]"), "{e}");
    }
}
