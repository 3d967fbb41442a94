//! Run configuration: a flat key=value file plus command-line overrides.

use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OffsetsChoice {
    Auto,
    Explicit([i64; 3]),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexConfig {
    Auto,
    /// 1-based vertex index.
    Index(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Obj,
    Json,
    Svg,
}

impl Format {
    pub fn parse_list(s: &str) -> Result<Vec<Format>, ConfigError> {
        let mut out = Vec::new();
        for part in s.split(',') {
            let f = match part.trim() {
                "obj" => Format::Obj,
                "json" => Format::Json,
                "svg" => Format::Svg,
                other => return Err(ConfigError(format!("unknown format {other:?}"))),
            };
            if !out.contains(&f) {
                out.push(f);
            }
        }
        Ok(out)
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid configuration: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Everything one run needs; validated against the builder preconditions
/// before the pipeline starts.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub signature: [u32; 3],
    /// Target level when offsets are searched; checked against the computed
    /// level when offsets are explicit.
    pub level: u32,
    pub offsets: OffsetsChoice,
    pub vertex: VertexConfig,
    /// Initial orbit cutoff for the adaptive carve.
    pub epsilon: f64,
    /// Tiling verification sample count.
    pub samples: usize,
    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
    /// Sampling seed; the LFD_SEED environment variable overrides the
    /// default.
    pub seed: u64,
    /// Offset search bound for auto offsets.
    pub search_bound: i64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            signature: [2, 3, 7],
            level: 1,
            offsets: OffsetsChoice::Auto,
            vertex: VertexConfig::Auto,
            epsilon: 0.1,
            samples: 1000,
            out_dir: PathBuf::from("out"),
            formats: vec![Format::Obj, Format::Json, Format::Svg],
            seed: 1729,
            search_bound: 5,
        }
    }
}

fn parse_triple<T: std::str::FromStr>(s: &str, what: &str) -> Result<[T; 3], ConfigError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(ConfigError(format!("{what} wants three comma-separated values, got {s:?}")));
    }
    let mut out = Vec::with_capacity(3);
    for p in parts {
        out.push(
            p.parse::<T>()
                .map_err(|_| ConfigError(format!("cannot parse {p:?} in {what}")))?,
        );
    }
    Ok([
        out.remove(0),
        out.remove(0),
        out.remove(0),
    ])
}

impl RunConfig {
    /// Applies one `key = value` setting; the same keys work from the
    /// config file and from flags.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "signature" => self.signature = parse_triple(value, "signature")?,
            "level" => {
                self.level = value
                    .parse()
                    .map_err(|_| ConfigError(format!("bad level {value:?}")))?
            }
            "offsets" => {
                self.offsets = if value == "auto" {
                    OffsetsChoice::Auto
                } else {
                    OffsetsChoice::Explicit(parse_triple(value, "offsets")?)
                }
            }
            "vertex" => {
                self.vertex = if value == "auto" {
                    VertexConfig::Auto
                } else {
                    let i: usize = value
                        .parse()
                        .map_err(|_| ConfigError(format!("bad vertex {value:?}")))?;
                    if !(1..=3).contains(&i) {
                        return Err(ConfigError(format!("vertex must be auto or 1..3, got {i}")));
                    }
                    VertexConfig::Index(i)
                }
            }
            "epsilon" => {
                let e: f64 = value
                    .parse()
                    .map_err(|_| ConfigError(format!("bad epsilon {value:?}")))?;
                if !(e > 0.0) {
                    return Err(ConfigError(format!("epsilon must be positive, got {e}")));
                }
                self.epsilon = e;
            }
            "samples" => {
                self.samples = value
                    .parse()
                    .map_err(|_| ConfigError(format!("bad samples {value:?}")))?
            }
            "out" => self.out_dir = PathBuf::from(value),
            "format" => self.formats = Format::parse_list(value)?,
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| ConfigError(format!("bad seed {value:?}")))?
            }
            "search_bound" => {
                self.search_bound = value
                    .parse()
                    .map_err(|_| ConfigError(format!("bad search_bound {value:?}")))?
            }
            other => return Err(ConfigError(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Reads a flat `key = value` file; blank lines and `#` comments are
    /// skipped.
    pub fn apply_file(&mut self, path: &std::path::Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError(format!("line {}: expected key = value", lineno + 1)));
            };
            self.apply(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Basic validation before the pipeline runs.
    pub fn validate(&self) -> Result<(), ConfigError> {
        lfd::triangle::TriangleSignature::new(self.signature)
            .map_err(|e| ConfigError(e.to_string()))?;
        if self.level == 0 {
            return Err(ConfigError("level must be at least 1".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(ConfigError("epsilon must be positive".into()));
        }
        if self.formats.is_empty() {
            return Err(ConfigError("at least one export format is required".into()));
        }
        Ok(())
    }
}
