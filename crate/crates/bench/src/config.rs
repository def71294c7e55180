//! Flat `key = value` battery configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Lists are comma
//! separated. Unknown keys are rejected so typos do not silently fall back to
//! defaults.
//!
//! | key | meaning | default |
//! |---|---|---|
//! | `name` | graph label in every output row | family name |
//! | `family` | `single-clique`, `multi-clique`, `power-law`, `path`, `star`, `file` | required |
//! | `p` | vertex count | required unless `family = file` |
//! | `clique` | clique size for `single-clique` | 12 |
//! | `cliques` | clique sizes for `multi-clique` | `5,8,10,11` |
//! | `seed_size`, `edges_per_step` | power-law growth | 5, 1 |
//! | `graph_file` | edge list for `family = file` | |
//! | `edge_weight` | off-diagonal precision entry | `0.3/sqrt(d_max)` |
//! | `clique_weight`, `chain_weight` | override for edges inside / outside the cliques | `edge_weight` |
//! | `diag_boost` | added to the unit diagonal | 0 |
//! | `algorithms` | any of `ampl`, `adpact`, `mb` | `ampl,mb` |
//! | `ampl.c`, `adpact.c` | constant grid | `10` |
//! | `mb.n_min`, `mb.n_max`, `mb.ratio` | geometric sample-size grid for `mb` | 50, 20000, 1.3 |
//! | `mb.paired` | also run `mb` at each `ampl` run's effective sample count | false |
//! | `xi` | partial-correlation threshold | 0.1 |
//! | `lambda0` | lasso scale, `λ = λ0 sqrt(ln p / n)` | 1.0 |
//! | `mb.lambda0` | lasso scale for `mb` | `lambda0` |
//! | `budget` | `none`, `sufficient`, `scaled:F` (`F·c·dbar_max·p·ln p`), or an integer | `none` |
//! | `trials` | trials per grid point | 10 |
//! | `seed` | root seed | 0 |
//! | `subset_cap` | subset enumeration cap per vertex and stage | 10000000 |

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use activegm::engine::DEFAULT_SUBSET_CAP;
use activegm::Algorithm;

use crate::error::{BenchError, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum GraphFamily {
    SingleClique { clique: usize },
    MultiClique { cliques: Vec<usize> },
    PowerLaw { seed_size: usize, edges_per_step: usize },
    Path,
    Star,
    File(PathBuf),
}

impl GraphFamily {
    pub fn label(&self) -> &'static str {
        match self {
            Self::SingleClique { .. } => "single-clique",
            Self::MultiClique { .. } => "multi-clique",
            Self::PowerLaw { .. } => "power-law",
            Self::Path => "path",
            Self::Star => "star",
            Self::File(_) => "file",
        }
    }

    /// Number of leading vertices that belong to cliques.
    pub fn clique_span(&self) -> usize {
        match self {
            Self::SingleClique { clique } => *clique,
            Self::MultiClique { cliques } => cliques.iter().sum(),
            _ => 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BudgetRule {
    Unlimited,
    Fixed(u64),
    /// `factor · c · dbar_max · p · ln p`.
    Scaled(f64),
    /// The double sum over local maximum degrees for the rule's `g` and `h`.
    Sufficient,
}

impl FromStr for BudgetRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "none" | "unlimited" => Ok(Self::Unlimited),
            "sufficient" => Ok(Self::Sufficient),
            _ => {
                if let Some(f) = s.strip_prefix("scaled:") {
                    f.parse().map(Self::Scaled).map_err(|e| format!("{e}"))
                } else {
                    s.parse().map(Self::Fixed).map_err(|e| format!("{e}"))
                }
            }
        }
    }
}

impl std::fmt::Display for BudgetRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Unlimited => f.write_str("none"),
            Self::Fixed(b) => write!(f, "{b}"),
            Self::Scaled(x) => write!(f, "scaled:{x}"),
            Self::Sufficient => f.write_str("sufficient"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModelSpec {
    pub edge_weight: Option<f64>,
    pub clique_weight: Option<f64>,
    pub chain_weight: Option<f64>,
    pub diag_boost: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub name: String,
    pub family: GraphFamily,
    pub p: usize,
    pub model: ModelSpec,
    pub algorithms: Vec<Algorithm>,
    pub ampl_c: Vec<f64>,
    pub adpact_c: Vec<f64>,
    pub mb_n_min: usize,
    pub mb_n_max: usize,
    pub mb_ratio: f64,
    pub mb_paired: bool,
    pub xi: f64,
    pub lambda0: f64,
    pub mb_lambda0: f64,
    pub budget: BudgetRule,
    pub trials: usize,
    pub seed: u64,
    pub subset_cap: u128,
}

impl BenchConfig {
    /// A configuration with every default filled in.
    pub fn new(family: GraphFamily, p: usize) -> Self {
        Self {
            name: family.label().to_string(),
            family,
            p,
            model: ModelSpec {
                edge_weight: None,
                clique_weight: None,
                chain_weight: None,
                diag_boost: 0.0,
            },
            algorithms: vec![Algorithm::Ampl, Algorithm::Mb],
            ampl_c: vec![10.0],
            adpact_c: vec![10.0],
            mb_n_min: 50,
            mb_n_max: 20_000,
            mb_ratio: 1.3,
            mb_paired: false,
            xi: 0.1,
            lambda0: 1.0,
            mb_lambda0: 1.0,
            budget: BudgetRule::Unlimited,
            trials: 10,
            seed: 0,
            subset_cap: DEFAULT_SUBSET_CAP,
        }
    }

    /// Geometric grid from `mb.n_min` up to `mb.n_max`, consecutive values
    /// differing by the factor `mb.ratio` (rounded, duplicates removed).
    pub fn mb_grid(&self) -> Vec<usize> {
        geometric_grid(self.mb_n_min, self.mb_n_max, self.mb_ratio)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| BenchError::Config {
                line: n + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            if kv.insert(k.trim().to_string(), (n + 1, v.trim().to_string())).is_some() {
                return Err(BenchError::Config {
                    line: n + 1,
                    message: format!("duplicate key `{}`", k.trim()),
                });
            }
        }
        let mut r = Reader { kv };
        let family_entry = r.take("family");
        let family = match family_entry.as_ref().map(|(l, v)| (*l, v.as_str())) {
            Some((_, "single-clique")) => GraphFamily::SingleClique {
                clique: r.parse_or("clique", 12)?,
            },
            Some((_, "multi-clique")) => GraphFamily::MultiClique {
                cliques: r.list_or("cliques", vec![5, 8, 10, 11])?,
            },
            Some((_, "power-law")) => GraphFamily::PowerLaw {
                seed_size: r.parse_or("seed_size", 5)?,
                edges_per_step: r.parse_or("edges_per_step", 1)?,
            },
            Some((_, "path")) => GraphFamily::Path,
            Some((_, "star")) => GraphFamily::Star,
            Some((line, "file")) => GraphFamily::File(
                r.take("graph_file")
                    .map(|(_, v)| PathBuf::from(v))
                    .ok_or(BenchError::Config {
                        line,
                        message: "family = file needs graph_file".into(),
                    })?,
            ),
            Some((line, other)) => {
                return Err(BenchError::Config {
                    line,
                    message: format!("unknown family `{other}`"),
                })
            }
            None => {
                return Err(BenchError::Config {
                    line: 0,
                    message: "missing `family`".into(),
                })
            }
        };
        let p = match family {
            GraphFamily::File(_) => r.parse_or("p", 0)?,
            _ => r.parse_required("p")?,
        };
        let mut cfg = Self::new(family, p);
        if let Some((_, name)) = r.take("name") {
            cfg.name = name;
        }
        cfg.model.edge_weight = r.parse_opt("edge_weight")?;
        cfg.model.clique_weight = r.parse_opt("clique_weight")?;
        cfg.model.chain_weight = r.parse_opt("chain_weight")?;
        cfg.model.diag_boost = r.parse_or("diag_boost", 0.0)?;
        cfg.algorithms = r.list_or("algorithms", cfg.algorithms.clone())?;
        cfg.ampl_c = r.list_or("ampl.c", cfg.ampl_c.clone())?;
        cfg.adpact_c = r.list_or("adpact.c", cfg.adpact_c.clone())?;
        cfg.mb_n_min = r.parse_or("mb.n_min", cfg.mb_n_min)?;
        cfg.mb_n_max = r.parse_or("mb.n_max", cfg.mb_n_max)?;
        cfg.mb_ratio = r.parse_or("mb.ratio", cfg.mb_ratio)?;
        cfg.mb_paired = r.parse_or("mb.paired", cfg.mb_paired)?;
        cfg.xi = r.parse_or("xi", cfg.xi)?;
        cfg.lambda0 = r.parse_or("lambda0", cfg.lambda0)?;
        cfg.mb_lambda0 = r.parse_or("mb.lambda0", cfg.lambda0)?;
        cfg.budget = r.parse_or("budget", cfg.budget)?;
        cfg.trials = r.parse_or("trials", cfg.trials)?;
        cfg.seed = r.parse_or("seed", cfg.seed)?;
        cfg.subset_cap = r.parse_or("subset_cap", cfg.subset_cap)?;
        if let Some((k, (line, _))) = r.kv.into_iter().next() {
            return Err(BenchError::Config {
                line,
                message: format!("unknown key `{k}`"),
            });
        }
        if cfg.mb_ratio <= 1.0 {
            return Err(BenchError::Config {
                line: 0,
                message: "mb.ratio must exceed 1".into(),
            });
        }
        Ok(cfg)
    }

    /// Every setting as `key = value` lines, suitable for [`BenchConfig::parse`].
    pub fn to_text(&self) -> String {
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let mut lines = vec![format!("name = {}", self.name), format!("family = {}", self.family.label())];
        match &self.family {
            GraphFamily::SingleClique { clique } => lines.push(format!("clique = {clique}")),
            GraphFamily::MultiClique { cliques } => lines.push(format!(
                "cliques = {}",
                cliques.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
            )),
            GraphFamily::PowerLaw {
                seed_size,
                edges_per_step,
            } => {
                lines.push(format!("seed_size = {seed_size}"));
                lines.push(format!("edges_per_step = {edges_per_step}"));
            }
            GraphFamily::File(path) => lines.push(format!("graph_file = {}", path.display())),
            GraphFamily::Path | GraphFamily::Star => {}
        }
        lines.push(format!("p = {}", self.p));
        for (k, v) in [
            ("edge_weight", self.model.edge_weight),
            ("clique_weight", self.model.clique_weight),
            ("chain_weight", self.model.chain_weight),
        ] {
            if let Some(v) = v {
                lines.push(format!("{k} = {v}"));
            }
        }
        lines.push(format!("diag_boost = {}", self.model.diag_boost));
        lines.push(format!(
            "algorithms = {}",
            self.algorithms.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",")
        ));
        lines.push(format!("ampl.c = {}", join(&self.ampl_c)));
        lines.push(format!("adpact.c = {}", join(&self.adpact_c)));
        lines.push(format!("mb.n_min = {}", self.mb_n_min));
        lines.push(format!("mb.n_max = {}", self.mb_n_max));
        lines.push(format!("mb.ratio = {}", self.mb_ratio));
        lines.push(format!("mb.paired = {}", self.mb_paired));
        lines.push(format!("xi = {}", self.xi));
        lines.push(format!("lambda0 = {}", self.lambda0));
        lines.push(format!("mb.lambda0 = {}", self.mb_lambda0));
        lines.push(format!("budget = {}", self.budget));
        lines.push(format!("trials = {}", self.trials));
        lines.push(format!("seed = {}", self.seed));
        lines.push(format!("subset_cap = {}", self.subset_cap));
        lines.join("\n") + "\n"
    }
}

pub fn geometric_grid(start: usize, stop: usize, ratio: f64) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    let mut x = start.max(1) as f64;
    while x.round() as usize <= stop {
        let n = x.round() as usize;
        if out.last() != Some(&n) {
            out.push(n);
        }
        x *= ratio;
    }
    out
}

struct Reader {
    kv: BTreeMap<String, (usize, String)>,
}

impl Reader {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.kv.remove(key)
    }

    fn parse_opt<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.take(key)
            .map(|(line, v)| {
                v.parse().map_err(|e: T::Err| BenchError::Config {
                    line,
                    message: format!("`{key}`: {e}"),
                })
            })
            .transpose()
    }

    fn parse_or<T: FromStr>(&mut self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.parse_opt(key)?.unwrap_or(default))
    }

    fn parse_required<T: FromStr>(&mut self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.parse_opt(key)?.ok_or(BenchError::Config {
            line: 0,
            message: format!("missing `{key}`"),
        })
    }

    fn list_or<T: FromStr>(&mut self, key: &str, default: Vec<T>) -> Result<Vec<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.take(key) {
            None => Ok(default),
            Some((line, v)) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse().map_err(|e: T::Err| BenchError::Config {
                        line,
                        message: format!("`{key}`: {e}"),
                    })
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_echoes() {
        let text = "\
# single clique battery
family = single-clique
p = 60
clique = 12
algorithms = ampl, mb
ampl.c = 5, 10
xi = 0.05
budget = scaled:2
trials = 3
";
        let cfg = BenchConfig::parse(text).unwrap();
        assert_eq!(cfg.family, GraphFamily::SingleClique { clique: 12 });
        assert_eq!(cfg.ampl_c, vec![5.0, 10.0]);
        assert_eq!(cfg.budget, BudgetRule::Scaled(2.0));
        assert_eq!(cfg.mb_lambda0, cfg.lambda0);
        let again = BenchConfig::parse(&cfg.to_text()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(BenchConfig::parse("p = 5").is_err());
        assert!(BenchConfig::parse("family = path\np = 5\nbogus = 1").is_err());
        assert!(BenchConfig::parse("family = path\np = x").is_err());
        assert!(BenchConfig::parse("family = path\np = 5\np = 6").is_err());
        assert!(BenchConfig::parse("family = path\np = 5\nalgorithms = pc").is_err());
    }

    #[test]
    fn grid_is_geometric() {
        let g = geometric_grid(100, 300, 1.3);
        assert_eq!(g, vec![100, 130, 169, 220, 286]);
        assert!(geometric_grid(10, 5, 1.3).is_empty());
    }
}
