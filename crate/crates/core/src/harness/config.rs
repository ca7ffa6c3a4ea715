//! Flat `key = value` study configuration.

use std::path::PathBuf;

use crate::assembly::{Method, DEFAULT_TAIL_TOLERANCE};
use crate::error::{Result, SpdoError};

/// How the node set for each ladder entry is obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum PointGenerator {
    Fibonacci,
    /// Uniform random points from the study seed.
    Random,
    /// A file path; `{N}` is replaced by the ladder entry.
    File(String),
}

impl PointGenerator {
    /// Parses `fibonacci`, `random` or `file:PATH`, with an optional `:N`
    /// suffix on the first two returning a fixed size.
    pub fn parse(text: &str) -> Result<(Self, Option<usize>)> {
        let text = text.trim();
        if let Some(path) = text.strip_prefix("file:") {
            return Ok((PointGenerator::File(path.to_string()), None));
        }
        let (kind, size) = match text.split_once(':') {
            Some((k, n)) => {
                let n = n
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| SpdoError::Config(format!("point count `{n}`: {e}")))?;
                (k, Some(n))
            }
            None => (text, None),
        };
        let gen = match kind {
            "fibonacci" => PointGenerator::Fibonacci,
            "random" => PointGenerator::Random,
            other => return Err(SpdoError::Config(format!("unknown point generator `{other}`"))),
        };
        Ok((gen, size))
    }

    pub fn describe(&self) -> String {
        match self {
            PointGenerator::Fibonacci => "fibonacci".into(),
            PointGenerator::Random => "random".into(),
            PointGenerator::File(p) => format!("file:{p}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
    /// `log h  log e` pairs.
    Plot,
}

impl ReportFormat {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "md" | "markdown" => Ok(ReportFormat::Markdown),
            "plot" | "dat" => Ok(ReportFormat::Plot),
            other => Err(SpdoError::Config(format!("unknown report format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub method: Method,
    /// Built-in name or `custom:<order>:<expression in l>`.
    pub operator: String,
    pub kernel: String,
    pub sobolev_s: f64,
    pub ladder: Vec<usize>,
    pub l_max: usize,
    pub points: PointGenerator,
    pub output: Option<PathBuf>,
    pub format: ReportFormat,
    pub seed: u64,
    pub tail_tolerance: f64,
    pub parallel_ladder: bool,
    pub closed_form_identity: bool,
}

pub const DEFAULT_LADDER: [usize; 7] = [20, 30, 40, 51, 101, 200, 500];

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            method: Method::Galerkin,
            operator: "weakly-singular".into(),
            kernel: "wendland".into(),
            sobolev_s: -0.5,
            ladder: DEFAULT_LADDER.to_vec(),
            l_max: 400,
            points: PointGenerator::Fibonacci,
            output: None,
            format: ReportFormat::Markdown,
            seed: 0,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
            parallel_ladder: false,
            closed_form_identity: false,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| SpdoError::Config(format!("`{key}`: cannot parse `{value}`: {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(SpdoError::Config(format!("`{key}`: expected a boolean, got `{other}`"))),
    }
}

impl StudyConfig {
    /// Applies one setting. Keys mirror the CLI flags.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "method" => self.method = Method::parse(value)?,
            "operator" => self.operator = value.to_string(),
            "kernel" => self.kernel = value.to_string(),
            "norm" | "sobolev_s" => self.sobolev_s = parse_num(key, value)?,
            "ladder" => {
                self.ladder = value
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_num(key, s))
                    .collect::<Result<_>>()?
            }
            "lmax" | "l_max" => self.l_max = parse_num(key, value)?,
            "points" => {
                let (gen, size) = PointGenerator::parse(value)?;
                self.points = gen;
                if let Some(n) = size {
                    self.ladder = vec![n];
                }
            }
            "output" | "out" => self.output = Some(PathBuf::from(value)),
            "format" => self.format = ReportFormat::parse(value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "tail_tolerance" => self.tail_tolerance = parse_num(key, value)?,
            "parallel" | "parallel_ladder" => self.parallel_ladder = parse_bool(key, value)?,
            "closed_form_identity" => self.closed_form_identity = parse_bool(key, value)?,
            other => return Err(SpdoError::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines over the defaults; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| SpdoError::Config(format!("line {}: expected key = value", k + 1)))?;
            cfg.set(key, value)
                .map_err(|e| SpdoError::Config(format!("line {}: {e}", k + 1)))?;
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Serializes every setting; [`StudyConfig::parse`] reads it back.
    pub fn to_text(&self) -> String {
        let ladder: Vec<String> = self.ladder.iter().map(|n| n.to_string()).collect();
        let mut out = format!(
            "method = {}\noperator = {}\nkernel = {}\nnorm = {}\nladder = {}\nlmax = {}\npoints = {}\nformat = {}\nseed = {}\ntail_tolerance = {:e}\nparallel = {}\nclosed_form_identity = {}\n",
            self.method,
            self.operator,
            self.kernel,
            self.sobolev_s,
            ladder.join(","),
            self.l_max,
            self.points.describe(),
            match self.format {
                ReportFormat::Csv => "csv",
                ReportFormat::Markdown => "markdown",
                ReportFormat::Plot => "plot",
            },
            self.seed,
            self.tail_tolerance,
            self.parallel_ladder,
            self.closed_form_identity,
        );
        if let Some(p) = &self.output {
            out.push_str(&format!("output = {}\n", p.display()));
        }
        out
    }

    /// Structural checks that do not need the operator or shape.
    pub fn validate_ladder(&self) -> Result<()> {
        if self.ladder.is_empty() {
            return Err(SpdoError::Config("ladder is empty".into()));
        }
        if let Some(k) = (1..self.ladder.len()).find(|&k| self.ladder[k] <= self.ladder[k - 1]) {
            return Err(SpdoError::Config(format!(
                "ladder must be strictly increasing (entry {k}: {} after {})",
                self.ladder[k],
                self.ladder[k - 1]
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_round_trip() {
        let cfg = StudyConfig::parse(
            "# collocation run\nmethod = collocation\nladder = 20, 40,80\nnorm=0\nlmax = 200 # short\npoints = random\nseed = 7\n",
        )
        .unwrap();
        assert_eq!(cfg.method, Method::Collocation);
        assert_eq!(cfg.ladder, vec![20, 40, 80]);
        assert_eq!(cfg.sobolev_s, 0.0);
        assert_eq!(cfg.l_max, 200);
        assert_eq!(cfg.points, PointGenerator::Random);
        assert_eq!(StudyConfig::parse(&cfg.to_text()).unwrap(), cfg);
        assert_eq!(StudyConfig::default().ladder, DEFAULT_LADDER);
    }

    #[test]
    fn errors_name_the_line() {
        let e = StudyConfig::parse("method = galerkin\nbogus = 1\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        assert!(StudyConfig::parse("lmax = many").is_err());
        assert!(StudyConfig::parse("no equals sign").is_err());
        let mut cfg = StudyConfig::default();
        cfg.set("ladder", "40,30").unwrap();
        assert!(cfg.validate_ladder().is_err());
    }

    #[test]
    fn point_specs() {
        assert_eq!(
            PointGenerator::parse("fibonacci:101").unwrap(),
            (PointGenerator::Fibonacci, Some(101))
        );
        assert_eq!(
            PointGenerator::parse("file:pts/{N}.txt").unwrap(),
            (PointGenerator::File("pts/{N}.txt".into()), None)
        );
        assert!(PointGenerator::parse("grid").is_err());
        let mut cfg = StudyConfig::default();
        cfg.set("points", "fibonacci:64").unwrap();
        assert_eq!(cfg.ladder, vec![64]);
    }
}
