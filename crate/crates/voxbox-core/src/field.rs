//! The `(k,D)` voxelized vector field: a rational `D`-vector at every voxel of
//! a `k`-dimensional grid, stored in row-major flat order.
//!
//! Voxel coordinates are 1-based. The last coordinate varies fastest, so on a
//! `m x m` grid voxel `(j,k)` has flat index `m(j-1)+k`.

use crate::codec::rational_bit_len;
use crate::error::{Error, Result};
use crate::poly::PiecewisePolynomial;
use crate::rational::{fmt_rational, parse_rational, Q};
use num_traits::Zero;
use std::collections::HashMap;
use std::fmt;

/// Bits charged for the fixed header of a stored field.
pub const HEADER_BITS: usize = 64;

/// A 1-based grid coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VoxelCoord(pub Vec<usize>);

impl fmt::Display for VoxelCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Number of voxels of a grid.
pub fn grid_len(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Row-major 0-based flat index of a 1-based coordinate, unchecked.
pub fn flat0(dims: &[usize], c: &[usize]) -> usize {
    c.iter().zip(dims).fold(0, |acc, (&ci, &n)| acc * n + (ci - 1))
}

/// 1-based coordinate of a 0-based flat index, unchecked.
pub fn coord0(dims: &[usize], mut i: usize) -> Vec<usize> {
    let mut c = vec![0; dims.len()];
    for j in (0..dims.len()).rev() {
        c[j] = i % dims[j] + 1;
        i /= dims[j];
    }
    c
}

/// Converts a 1-based flat index to its coordinate.
pub fn flat_to_coord(dims: &[usize], i: usize) -> Result<VoxelCoord> {
    let n = grid_len(dims);
    if i < 1 || i > n {
        return Err(Error::IndexOutOfRange(format!("flat index {i} not in [1,{n}]")));
    }
    Ok(VoxelCoord(coord0(dims, i - 1)))
}

/// Converts a coordinate to its 1-based flat index.
pub fn coord_to_flat(dims: &[usize], c: &VoxelCoord) -> Result<usize> {
    if c.0.len() != dims.len() || c.0.iter().zip(dims).any(|(&x, &n)| x < 1 || x > n) {
        return Err(Error::IndexOutOfRange(format!("coordinate {c} outside grid {dims:?}")));
    }
    Ok(flat0(dims, &c.0) + 1)
}

/// A voxelized vector field with its declared hypercube bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoxelField {
    dims: Vec<usize>,
    d: usize,
    data: Vec<Vec<Q>>,
    lower: Vec<Q>,
    upper: Vec<Q>,
}

/// One problem found by [`VoxelField::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Two voxels hold the same vector.
    Injectivity { first: VoxelCoord, second: VoxelCoord },
    /// A vector entry lies outside the declared hypercube.
    Range { at: VoxelCoord, component: usize },
    /// The declared hypercube itself is empty on some component.
    EmptyBounds { component: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Injectivity { first, second } => write!(f, "voxels {first} and {second} hold equal vectors"),
            Violation::Range { at, component } => write!(f, "voxel {at} entry {} outside bounds", component + 1),
            Violation::EmptyBounds { component } => write!(f, "bounds of entry {} are empty", component + 1),
        }
    }
}

impl VoxelField {
    /// Builds a field, checking that every length matches `dims` and `d`.
    pub fn new(dims: Vec<usize>, d: usize, data: Vec<Vec<Q>>, lower: Vec<Q>, upper: Vec<Q>) -> Result<Self> {
        if data.len() != grid_len(&dims) {
            return Err(Error::DimensionMismatch(format!(
                "{} vectors for a grid of {} voxels",
                data.len(),
                grid_len(&dims)
            )));
        }
        if let Some(i) = data.iter().position(|v| v.len() != d) {
            return Err(Error::DimensionMismatch(format!("vector {} has {} entries, expected {d}", i + 1, data[i].len())));
        }
        if lower.len() != d || upper.len() != d {
            return Err(Error::DimensionMismatch(format!("bounds must have {d} entries")));
        }
        Ok(VoxelField { dims, d, data, lower, upper })
    }

    /// Builds a field whose bounds are the tightest hypercube around the data.
    pub fn with_hull(dims: Vec<usize>, d: usize, data: Vec<Vec<Q>>) -> Result<Self> {
        let mut lower = vec![Q::zero(); d];
        let mut upper = vec![Q::zero(); d];
        for j in 0..d {
            if let Some(lo) = data.iter().map(|v| &v[j]).min() {
                lower[j] = lo.clone();
            }
            if let Some(hi) = data.iter().map(|v| &v[j]).max() {
                upper[j] = hi.clone();
            }
        }
        if let Some(i) = data.iter().position(|v| v.len() != d) {
            return Err(Error::DimensionMismatch(format!("vector {} has {} entries, expected {d}", i + 1, data[i].len())));
        }
        Self::new(dims, d, data, lower, upper)
    }

    /// Grid extents `n_1..n_k`.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Grid dimension `k`.
    pub fn k(&self) -> usize {
        self.dims.len()
    }

    /// Vector length `D`.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of voxels `n`.
    pub fn n(&self) -> usize {
        self.data.len()
    }

    /// All vectors in flat order.
    pub fn data(&self) -> &[Vec<Q>] {
        &self.data
    }

    /// Vector at 0-based flat index `i`.
    pub fn vector(&self, i: usize) -> &[Q] {
        &self.data[i]
    }

    /// Declared lower hypercube corner.
    pub fn lower(&self) -> &[Q] {
        &self.lower
    }

    /// Declared upper hypercube corner.
    pub fn upper(&self) -> &[Q] {
        &self.upper
    }

    /// Converts a 1-based flat index to its coordinate.
    pub fn flat_to_coord(&self, i: usize) -> Result<VoxelCoord> {
        flat_to_coord(&self.dims, i)
    }

    /// Converts a coordinate to its 1-based flat index.
    pub fn coord_to_flat(&self, c: &VoxelCoord) -> Result<usize> {
        coord_to_flat(&self.dims, c)
    }

    /// Storage size in bits under flat indexing: the fixed header plus the
    /// self-delimiting codec length of every vector entry.
    pub fn size_bits(&self) -> usize {
        HEADER_BITS + self.data.iter().flatten().map(rational_bit_len).sum::<usize>()
    }

    /// Lists injectivity and range violations; empty when the field is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for j in 0..self.d {
            if self.lower[j] > self.upper[j] {
                out.push(Violation::EmptyBounds { component: j });
            }
        }
        let mut seen: HashMap<&[Q], usize> = HashMap::new();
        for (i, v) in self.data.iter().enumerate() {
            for (j, x) in v.iter().enumerate() {
                if *x < self.lower[j] || *x > self.upper[j] {
                    out.push(Violation::Range { at: VoxelCoord(coord0(&self.dims, i)), component: j });
                }
            }
            if let Some(&first) = seen.get(v.as_slice()) {
                out.push(Violation::Injectivity {
                    first: VoxelCoord(coord0(&self.dims, first)),
                    second: VoxelCoord(coord0(&self.dims, i)),
                });
            } else {
                seen.insert(v, i);
            }
        }
        out
    }

    /// Serializes to the `.vvf` text format.
    pub fn to_vvf(&self) -> String {
        let mut s = format!("VVF {} {}", self.k(), self.d);
        for n in &self.dims {
            s.push_str(&format!(" {n}"));
        }
        s.push('\n');
        let line = |v: &[Q]| v.iter().map(fmt_rational).collect::<Vec<_>>().join(" ");
        s.push_str(&line(&self.lower));
        s.push('\n');
        s.push_str(&line(&self.upper));
        s.push('\n');
        for v in &self.data {
            s.push_str(&line(v));
            s.push('\n');
        }
        s
    }

    /// Parses the `.vvf` text format. Lines starting with `#` are comments.
    pub fn from_vvf(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let syntax = |line: usize, msg: String| Error::Syntax { pos: line, msg: format!("line {line}: {msg}") };
        let (ln, header) = lines.next().ok_or_else(|| syntax(0, "missing VVF header".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.first() != Some(&"VVF") || h.len() < 3 {
            return Err(syntax(ln, "header must read 'VVF k D n_1 .. n_k'".into()));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| syntax(ln, format!("bad natural {s:?}")));
        let k = num(h[1])?;
        let d = num(h[2])?;
        if h.len() != 3 + k {
            return Err(syntax(ln, format!("expected {k} grid extents")));
        }
        let dims = h[3..].iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?;
        let mut row = |what: &str| -> Result<Vec<Q>> {
            let (ln, l) = lines.next().ok_or_else(|| syntax(0, format!("missing {what}")))?;
            let v = l
                .split_whitespace()
                .map(|t| parse_rational(t).map_err(|_| syntax(ln, format!("bad rational {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            if v.len() != d {
                return Err(syntax(ln, format!("{what} has {} entries, expected {d}", v.len())));
            }
            Ok(v)
        };
        let lower = row("lower bounds")?;
        let upper = row("upper bounds")?;
        let n = grid_len(&dims);
        let data = (0..n).map(|_| row("vector")).collect::<Result<Vec<_>>>()?;
        if let Some((ln, _)) = lines.next() {
            return Err(syntax(ln, "trailing data after the last vector".into()));
        }
        Self::new(dims, d, data, lower, upper)
    }
}

/// Embeds a `(k,D)` instance into `(k',D')` by padding grid extents with `1`
/// and vectors with zeros; `f` is extended by `0` off the embedded slab.
pub fn lift_dims(
    field: &VoxelField,
    f: &PiecewisePolynomial,
    k_new: usize,
    d_new: usize,
) -> Result<(VoxelField, PiecewisePolynomial)> {
    if k_new < field.k() || d_new < field.d() {
        return Err(Error::InvalidArgument(format!(
            "cannot lift ({},{}) to ({k_new},{d_new})",
            field.k(),
            field.d()
        )));
    }
    if f.dim() != field.d() {
        return Err(Error::DimensionMismatch(format!("f has dimension {}, field has {}", f.dim(), field.d())));
    }
    let pad = |v: &[Q]| -> Vec<Q> { v.iter().cloned().chain(std::iter::repeat_n(Q::zero(), d_new - field.d())).collect() };
    let mut dims = field.dims.clone();
    dims.resize(k_new, 1);
    let data = field.data.iter().map(|v| pad(v)).collect();
    let lifted = VoxelField::new(dims, d_new, data, pad(&field.lower), pad(&field.upper))?;
    Ok((lifted, f.lift(d_new)?))
}
