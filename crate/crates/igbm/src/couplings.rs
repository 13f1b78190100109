//! Quenched coupling disorder: Erdős–Rényi connectivity with
//! pairwise-correlated Gaussian strengths, optionally augmented by a Hebbian
//! pattern term on fully connected systems.

use crate::numerics::RngStream;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

#[derive(Debug, thiserror::Error)]
pub enum CouplingError {
    #[error("invalid coupling spec: {0}")]
    Parameter(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed coupling file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, CouplingError>;

/// Graph topology of the coupling ensemble.
///
/// Serializes as the string `"full"` or as a bare mean degree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Connectivity {
    /// Fully connected; strength scaling uses `c = N`.
    Full,
    /// Erdős–Rényi with the given mean degree; each unordered pair is linked
    /// with probability `c / (N - 1)`.
    MeanDegree(f64),
}

impl Serialize for Connectivity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Connectivity::Full => s.serialize_str("full"),
            Connectivity::MeanDegree(c) => s.serialize_f64(c),
        }
    }
}

impl<'de> Deserialize<'de> for Connectivity {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = Connectivity;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                write!(f, "\"full\" or a mean degree")
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<Connectivity, E> {
                if v == "full" {
                    Ok(Connectivity::Full)
                } else {
                    Err(E::custom(format!("expected \"full\", got {v:?}")))
                }
            }

            fn visit_f64<E>(self, v: f64) -> std::result::Result<Connectivity, E> {
                Ok(Connectivity::MeanDegree(v))
            }

            fn visit_i64<E>(self, v: i64) -> std::result::Result<Connectivity, E> {
                Ok(Connectivity::MeanDegree(v as f64))
            }

            fn visit_u64<E>(self, v: u64) -> std::result::Result<Connectivity, E> {
                Ok(Connectivity::MeanDegree(v as f64))
            }
        }
        d.deserialize_any(V)
    }
}

/// Parameters of the coupling ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    /// Number of assets.
    pub n: usize,
    pub connectivity: Connectivity,
    /// Ferromagnetic bias: linked strengths have mean `j0 / c`.
    pub j0: f64,
    /// Disorder scale: linked strengths have standard deviation `j / sqrt(c)`.
    pub j: f64,
    /// Correlation between the two directions of a linked pair, in [-1, 1].
    pub alpha: f64,
    /// Number of Hebbian patterns to embed (0 = none; requires `Full`).
    pub hebbian_p: usize,
}

impl CouplingSpec {
    /// Effective mean degree used in the strength scaling.
    pub fn scale_degree(&self) -> f64 {
        match self.connectivity {
            Connectivity::Full => self.n as f64,
            Connectivity::MeanDegree(c) => c,
        }
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.n < 1 {
            return Err("need at least one asset".into());
        }
        if let Connectivity::MeanDegree(c) = self.connectivity {
            if !(c > 0.0 && c <= self.n as f64) {
                return Err(format!("mean degree {c} outside (0, N={}]", self.n));
            }
        }
        if !(self.j >= 0.0) {
            return Err(format!("disorder scale j must be >= 0, got {}", self.j));
        }
        if !(-1.0..=1.0).contains(&self.alpha) {
            return Err(format!("alpha must lie in [-1, 1], got {}", self.alpha));
        }
        if self.hebbian_p > 0 && self.connectivity != Connectivity::Full {
            return Err("hebbian patterns require full connectivity".into());
        }
        Ok(())
    }
}

/// A set of `p` binary patterns over `n` sites, entries exactly +-1.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternSet {
    pub p: usize,
    pub n: usize,
    xi: Vec<i8>,
}

impl PatternSet {
    /// Entry `xi_i^mu` as a float (+1 or -1).
    #[inline]
    pub fn get(&self, mu: usize, i: usize) -> f64 {
        self.xi[mu * self.n + i] as f64
    }

    /// Row overlap `(1/N) sum_i xi_i^mu xi_i^nu`.
    pub fn overlap(&self, mu: usize, nu: usize) -> f64 {
        let mut acc = 0i64;
        for i in 0..self.n {
            acc += (self.xi[mu * self.n + i] * self.xi[nu * self.n + i]) as i64;
        }
        acc as f64 / self.n as f64
    }

    /// Pattern made of `+1` at every site (useful for recording the plain
    /// magnetization as an overlap).
    pub fn uniform(n: usize) -> Self {
        Self { p: 1, n, xi: vec![1; n] }
    }
}

/// Draw `p` patterns with i.i.d. fair +-1 entries.
pub fn generate_patterns(n: usize, p: usize, stream: RngStream) -> PatternSet {
    assert!(n >= 1 && p >= 1, "need n >= 1 and p >= 1");
    let mut rng = stream.rng();
    let xi = (0..n * p)
        .map(|_| if rng.random::<bool>() { 1i8 } else { -1i8 })
        .collect();
    PatternSet { p, n, xi }
}

/// Sparse signed interaction matrix without diagonal entries.
///
/// Entries are stored as a row-major sorted coordinate list; both directed
/// entries of a linked pair are present. Construction is deterministic in
/// `(spec, stream)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingMatrix {
    pub n: usize,
    entries: Vec<(u32, u32, f64)>,
    pub patterns: Option<PatternSet>,
    pub spec: CouplingSpec,
    pub seed: RngStream,
}

/// Compressed-row view used by the simulator's field evaluation.
pub struct CsrView {
    pub row_ptr: Vec<usize>,
    pub cols: Vec<u32>,
    pub vals: Vec<f64>,
}

impl CouplingMatrix {
    /// Matrix with no interactions at all (decoupled assets).
    pub fn empty(n: usize) -> Self {
        CouplingMatrix {
            n,
            entries: Vec::new(),
            patterns: None,
            spec: CouplingSpec {
                n,
                connectivity: Connectivity::Full,
                j0: 0.0,
                j: 0.0,
                alpha: 1.0,
                hebbian_p: 0,
            },
            seed: RngStream::new(0, 0),
        }
    }

    pub fn entries(&self) -> &[(u32, u32, f64)] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<f64> {
        let key = (i as u32, j as u32);
        self.entries
            .binary_search_by(|&(r, c, _)| (r, c).cmp(&key))
            .ok()
            .map(|idx| self.entries[idx].2)
    }

    /// Attach patterns for overlap recording without altering the couplings.
    pub fn with_patterns(mut self, patterns: PatternSet) -> Result<Self> {
        if patterns.n != self.n {
            return Err(CouplingError::Parameter(format!(
                "pattern size {} != matrix size {}",
                patterns.n, self.n
            )));
        }
        self.patterns = Some(patterns);
        Ok(self)
    }

    pub fn csr(&self) -> CsrView {
        let mut row_ptr = vec![0usize; self.n + 1];
        for &(i, _, _) in &self.entries {
            row_ptr[i as usize + 1] += 1;
        }
        for i in 0..self.n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let cols = self.entries.iter().map(|e| e.1).collect();
        let vals = self.entries.iter().map(|e| e.2).collect();
        CsrView { row_ptr, cols, vals }
    }

    /// Empirical mean degree (undirected links per node).
    pub fn mean_degree(&self) -> f64 {
        self.entries.len() as f64 / self.n as f64
    }
}

/// Generate the quenched disorder for `spec`.
///
/// Each unordered pair is sampled once: the link indicator and both directed
/// strengths together, so `c_ij = c_ji` by construction. Correlated strengths
/// use `x_ij = z1`, `x_ji = alpha z1 + sqrt(1 - alpha^2) z2`.
pub fn generate_couplings(spec: &CouplingSpec, stream: RngStream) -> Result<CouplingMatrix> {
    spec.validate().map_err(CouplingError::Parameter)?;
    if spec.n < 2 {
        return Err(CouplingError::Parameter(format!(
            "coupling generation needs N >= 2, got {}",
            spec.n
        )));
    }
    let n = spec.n;
    let c = spec.scale_degree();
    let mean = spec.j0 / c;
    let sd = spec.j / c.sqrt();
    let cross = (1.0 - spec.alpha * spec.alpha).max(0.0).sqrt();
    let p_link = match spec.connectivity {
        Connectivity::Full => 1.0,
        Connectivity::MeanDegree(c) => (c / (n as f64 - 1.0)).min(1.0),
    };
    let full = matches!(spec.connectivity, Connectivity::Full);

    let mut rng = stream.rng();
    let mut entries = Vec::new();
    for i in 0..n as u32 {
        for j in (i + 1)..n as u32 {
            let linked = full || rng.random::<f64>() < p_link;
            if !linked {
                continue;
            }
            let z1: f64 = StandardNormal.sample(&mut rng);
            let z2: f64 = StandardNormal.sample(&mut rng);
            let x_ij = z1;
            let x_ji = spec.alpha * z1 + cross * z2;
            entries.push((i, j, mean + sd * x_ij));
            entries.push((j, i, mean + sd * x_ji));
        }
    }
    entries.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    Ok(CouplingMatrix {
        n,
        entries,
        patterns: None,
        spec: *spec,
        seed: stream,
    })
}

/// Add the Hebbian term `(1/N) sum_mu xi_i^mu xi_j^mu` to every off-diagonal
/// entry of a fully connected matrix; the patterns are stored in the result.
pub fn add_hebbian(matrix: CouplingMatrix, patterns: PatternSet) -> Result<CouplingMatrix> {
    if matrix.spec.connectivity != Connectivity::Full
        || matrix.entries.len() != matrix.n * (matrix.n - 1)
    {
        return Err(CouplingError::Parameter(
            "hebbian term requires a fully connected matrix".into(),
        ));
    }
    if patterns.n != matrix.n {
        return Err(CouplingError::Parameter(format!(
            "pattern size {} != matrix size {}",
            patterns.n, matrix.n
        )));
    }
    let mut out = matrix;
    let n = out.n as f64;
    for e in &mut out.entries {
        let (i, j) = (e.0 as usize, e.1 as usize);
        let mut h = 0.0;
        for mu in 0..patterns.p {
            h += patterns.get(mu, i) * patterns.get(mu, j);
        }
        e.2 += h / n;
    }
    out.patterns = Some(patterns);
    Ok(out)
}

/// Serialized header accompanying a coupling CSV dump.
#[derive(Serialize, Deserialize)]
struct DumpHeader {
    n: usize,
    spec: CouplingSpec,
    seed: RngStream,
}

impl CouplingMatrix {
    /// Dump as `i,j,J_ij` rows (17 significant digits) plus a JSON header.
    pub fn write_csv<W: Write, H: Write>(&self, mut csv: W, mut header: H) -> Result<()> {
        let head = DumpHeader { n: self.n, spec: self.spec, seed: self.seed };
        serde_json::to_writer(&mut header, &head)
            .map_err(|e| CouplingError::Format(e.to_string()))?;
        writeln!(csv, "i,j,J_ij")?;
        for &(i, j, v) in &self.entries {
            writeln!(csv, "{i},{j},{}", crate::fmt_float(v))?;
        }
        Ok(())
    }

    /// Inverse of [`CouplingMatrix::write_csv`]; the decimal representation
    /// round-trips bit-exactly.
    pub fn read_csv<R: BufRead, H: BufRead>(csv: R, mut header: H) -> Result<Self> {
        let mut head_s = String::new();
        header.read_to_string(&mut head_s)?;
        let head: DumpHeader =
            serde_json::from_str(&head_s).map_err(|e| CouplingError::Format(e.to_string()))?;
        let mut entries = Vec::new();
        for (lineno, line) in csv.lines().enumerate() {
            let line = line?;
            if lineno == 0 {
                if line.trim() != "i,j,J_ij" {
                    return Err(CouplingError::Format(format!("bad header row: {line:?}")));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.splitn(3, ',');
            let mut field = || {
                fields
                    .next()
                    .ok_or_else(|| CouplingError::Format(format!("short row at line {lineno}")))
            };
            let i: u32 = field()?
                .parse()
                .map_err(|e| CouplingError::Format(format!("line {lineno}: {e}")))?;
            let j: u32 = field()?
                .parse()
                .map_err(|e| CouplingError::Format(format!("line {lineno}: {e}")))?;
            let v: f64 = field()?
                .parse()
                .map_err(|e| CouplingError::Format(format!("line {lineno}: {e}")))?;
            entries.push((i, j, v));
        }
        Ok(CouplingMatrix {
            n: head.n,
            entries,
            patterns: None,
            spec: head.spec,
            seed: head.seed,
        })
    }
}
