//! Experiment descriptions and their plain-text form.
//!
//! A spec file holds one `key = value` pair per line; blank lines and lines
//! starting with `#` are ignored. Keys:
//!
//! | key          | value                                                   | default          |
//! |--------------|---------------------------------------------------------|------------------|
//! | `algorithm`  | an [`Algorithm`] name, e.g. `median_by_runs`            | required         |
//! | `generator`  | `random`, `controlled_inv(T)`, `controlled_runs(T)`,     | `random`         |
//! |              | `adversarial_run_plus_one`, `two_runs(S)`, `lower_bound(K)` |              |
//! | `n`          | input size                                              | required         |
//! | `trials`     | number of trials, at least 1                            | `1`              |
//! | `seed`       | experiment seed                                         | `0`              |
//! | `epsilon`    | small-k exponent for `select_kth`                       | `0.01`           |
//! | `backend`    | `network_sort` or `mom`                                 | `network_sort`   |
//! | `k`          | rank for `select_kth`, `reset`, `mom_select`            | `0`              |
//! | `queries`    | searches per trial                                      | `n`              |
//! | `workload`   | `uniform`, `skewed` or `sweep` query ranks              | `uniform`        |
//! | `duplicates` | `true` to halve values so that pairs tie                | `false`          |
//! | `profiles`   | `true` to keep per-element counts in report rows        | `false`          |

use std::fmt;
use std::str::FromStr;

use fragile_core::selection::{Backend, DEFAULT_EPSILON};
use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::generators::max_inversions;

macro_rules! named_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
        #[serde(rename_all = "snake_case")]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn name(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($text => Ok($name::$variant),)+
                    other => Err(format!("unknown {} {other:?}", stringify!($name).to_lowercase())),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }
    };
}

named_enum!(
    /// Algorithms the runner can measure.
    Algorithm {
        ExpSearch => "exp_search",
        OffsetSearch => "offset_search",
        RandomizedSearch => "randomized_search",
        Reset => "reset",
        SelectKth => "select_kth",
        MinByRuns => "min_by_runs",
        MedianByRuns => "median_by_runs",
        MedianTwoRuns => "median_two_runs",
        ExtractSortedRun => "extract_sorted_run",
        MinByInv => "min_by_inv",
        MedianByInv => "median_by_inv",
        SortByInv => "sort_by_inv",
        TournamentMin => "tournament_min",
        NetworkSort => "network_sort",
        ExponentialMerge => "exponential_merge",
        MomSelect => "mom_select",
        SmallMedian => "small_median",
    }
);

named_enum!(
    /// How query ranks are drawn for the search algorithms.
    Workload {
        Uniform => "uniform",
        Skewed => "skewed",
        Sweep => "sweep",
    }
);

impl Algorithm {
    pub fn is_search(self) -> bool {
        matches!(
            self,
            Algorithm::ExpSearch | Algorithm::OffsetSearch | Algorithm::RandomizedSearch
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "target")]
pub enum GeneratorKind {
    Random,
    ControlledInv(u64),
    ControlledRuns(usize),
    AdversarialRunPlusOne,
    TwoRuns(usize),
    LowerBound(u64),
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorKind::Random => f.write_str("random"),
            GeneratorKind::ControlledInv(t) => write!(f, "controlled_inv({t})"),
            GeneratorKind::ControlledRuns(t) => write!(f, "controlled_runs({t})"),
            GeneratorKind::AdversarialRunPlusOne => f.write_str("adversarial_run_plus_one"),
            GeneratorKind::TwoRuns(s) => write!(f, "two_runs({s})"),
            GeneratorKind::LowerBound(k) => write!(f, "lower_bound({k})"),
        }
    }
}

impl FromStr for GeneratorKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let (kind, arg) = match s.split_once('(') {
            Some((kind, rest)) => {
                let arg = rest
                    .strip_suffix(')')
                    .ok_or_else(|| format!("unclosed generator argument in {s:?}"))?;
                (kind.trim(), Some(arg.trim()))
            }
            None => (s, None),
        };
        let number = |what: &str| -> std::result::Result<u64, String> {
            let a = arg.ok_or_else(|| format!("{what} needs an argument, e.g. {what}(16)"))?;
            a.parse::<u64>()
                .map_err(|e| format!("bad {what} argument {a:?}: {e}"))
        };
        match (kind, arg) {
            ("random", None) => Ok(GeneratorKind::Random),
            ("adversarial_run_plus_one", None) => Ok(GeneratorKind::AdversarialRunPlusOne),
            ("controlled_inv", _) => Ok(GeneratorKind::ControlledInv(number(kind)?)),
            ("controlled_runs", _) => Ok(GeneratorKind::ControlledRuns(number(kind)? as usize)),
            ("two_runs", _) => Ok(GeneratorKind::TwoRuns(number(kind)? as usize)),
            ("lower_bound", _) => Ok(GeneratorKind::LowerBound(number(kind)?)),
            _ => Err(format!("unknown generator {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub algorithm: Algorithm,
    pub generator: GeneratorKind,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub backend: Backend,
    pub k: usize,
    /// Searches per trial; `None` means `n`.
    pub queries: Option<usize>,
    pub workload: Workload,
    pub duplicates: bool,
    pub profiles: bool,
}

impl ExperimentSpec {
    pub fn new(algorithm: Algorithm, n: usize) -> Self {
        ExperimentSpec {
            algorithm,
            generator: GeneratorKind::Random,
            n,
            trials: 1,
            seed: 0,
            epsilon: DEFAULT_EPSILON,
            backend: Backend::NetworkSort,
            k: 0,
            queries: None,
            workload: Workload::Uniform,
            duplicates: false,
            profiles: false,
        }
    }

    pub fn with_generator(mut self, generator: GeneratorKind) -> Self {
        self.generator = generator;
        self
    }

    pub fn with_trials(mut self, trials: usize, seed: u64) -> Self {
        self.trials = trials;
        self.seed = seed;
        self
    }

    pub fn query_count(&self) -> usize {
        match self.workload {
            Workload::Sweep => self.n,
            _ => self.queries.unwrap_or(self.n),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(config("trials must be at least 1"));
        }
        if self.n == 0 {
            return Err(config("n must be at least 1"));
        }
        match self.generator {
            GeneratorKind::ControlledInv(t) if t > max_inversions(self.n) => {
                return Err(config(format!(
                    "controlled_inv({t}) exceeds n(n-1)/2 for n = {}",
                    self.n
                )))
            }
            GeneratorKind::ControlledRuns(t) if t == 0 || t > self.n => {
                return Err(config(format!(
                    "controlled_runs({t}) needs 1 <= runs <= n = {}",
                    self.n
                )))
            }
            GeneratorKind::TwoRuns(s) if s > self.n => {
                return Err(config(format!("two_runs({s}) exceeds n = {}", self.n)))
            }
            GeneratorKind::LowerBound(k) if k > (self.n as u64).saturating_mul(self.n as u64) => {
                return Err(config(format!("lower_bound({k}) exceeds n^2")))
            }
            _ => {}
        }
        let ranked = matches!(
            self.algorithm,
            Algorithm::Reset | Algorithm::SelectKth | Algorithm::MomSelect
        );
        if ranked && self.k >= self.n {
            return Err(config(format!(
                "k = {} must be below n = {}",
                self.k, self.n
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(config(format!("epsilon {} outside (0, 1]", self.epsilon)));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "algorithm = {}\ngenerator = {}\nn = {}\ntrials = {}\nseed = {}\nepsilon = {}\nbackend = {}\nk = {}\n",
            self.algorithm,
            self.generator,
            self.n,
            self.trials,
            self.seed,
            self.epsilon,
            backend_name(self.backend),
            self.k,
        );
        if let Some(q) = self.queries {
            out.push_str(&format!("queries = {q}\n"));
        }
        out.push_str(&format!(
            "workload = {}\nduplicates = {}\nprofiles = {}\n",
            self.workload, self.duplicates, self.profiles
        ));
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut algorithm = None;
        let mut n = None;
        let mut rest = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "algorithm" => algorithm = Some(value.parse::<Algorithm>().map_err(config)?),
                "n" => n = Some(parse_num::<usize>(key, value)?),
                _ => rest.push((lineno + 1, key.to_owned(), value.to_owned())),
            }
        }
        let algorithm = algorithm.ok_or_else(|| config("missing key: algorithm"))?;
        let n = n.ok_or_else(|| config("missing key: n"))?;
        let mut spec = ExperimentSpec::new(algorithm, n);
        for (lineno, key, value) in rest {
            spec.set(&key, &value)
                .map_err(|e| config(format!("line {lineno}: {e}")))?;
        }
        spec.validate()?;
        Ok(spec)
    }

    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "algorithm" => self.algorithm = value.parse()?,
            "generator" => self.generator = value.parse()?,
            "n" => self.n = num(key, value)?,
            "trials" => self.trials = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "epsilon" => self.epsilon = num(key, value)?,
            "backend" => self.backend = value.parse()?,
            "k" => self.k = num(key, value)?,
            "queries" => self.queries = Some(num(key, value)?),
            "workload" => self.workload = value.parse()?,
            "duplicates" => self.duplicates = num(key, value)?,
            "profiles" => self.profiles = num(key, value)?,
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }
}

pub fn backend_name(b: Backend) -> &'static str {
    match b {
        Backend::NetworkSort => "network_sort",
        Backend::MedianOfMedians => "mom",
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> std::result::Result<T, String>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| format!("bad value {value:?} for {key}: {e}"))
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    num(key, value).map_err(config)
}
