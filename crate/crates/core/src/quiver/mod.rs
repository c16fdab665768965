//! Finite-dimensional representations of the hypercube quiver.
//!
//! Vertices are subsets `I ⊆ {1..n}`. For every `i ∉ I` there is a forward
//! map `u_{I,i}: V_I → V_{I∪{i}}` and a backward map `y_{I,i}: V_{I∪{i}} → V_I`.
//! Maps act on column vectors, so `u_{I,i}` is stored as a
//! `dim(I∪{i}) × dim(I)` matrix.

mod generate;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::matrix::{inverse, CMat, MatrixError};

pub use generate::{
    conjugate, conjugate_with, generate, generate_with, random_well_conditioned, FactorShape,
    GenOptions,
};
pub use validate::{validate, validate_morphism, Category, DEFAULT_TOL};

/// Largest supported number of variables.
pub const MAX_N: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuiverError {
    #[error("n = {0} is outside the supported range 1..={MAX_N}")]
    BadN(usize),
    #[error("element {element} of a vertex is outside 1..={n}")]
    ElementOutOfRange { element: usize, n: usize },
    #[error("duplicate element {0} in a vertex")]
    DuplicateElement(usize),
    #[error("vertex {vertex} is missing")]
    MissingVertex { vertex: String },
    #[error("edge {edge} is missing")]
    MissingEdge { edge: String },
    #[error("edge {edge} is not part of the {n}-cube")]
    InvalidEdge { edge: String, n: usize },
    #[error("{map} at edge {edge} has shape {got:?}, expected {expected:?}")]
    Shape {
        edge: String,
        map: &'static str,
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("vertex {vertex}: morphism component has shape {got:?}, expected {expected:?}")]
    MorphismShape {
        vertex: String,
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("representations have different n ({0} vs {1})")]
    NMismatch(usize, usize),
    #[error("generation failed after {tries} attempts: {reason}")]
    GenerationFailed { tries: usize, reason: String },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// A subset of `{1..n}`, stored as a bit mask (bit `k-1` for element `k`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(u32);

impl VertexId {
    pub const EMPTY: VertexId = VertexId(0);

    pub fn from_mask(mask: u32) -> Self {
        Self(mask)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Builds a vertex from its elements, which must be distinct and lie in
    /// `1..=n`.
    pub fn from_elements(elements: &[usize], n: usize) -> Result<Self, QuiverError> {
        let mut mask = 0u32;
        for &e in elements {
            if e == 0 || e > n {
                return Err(QuiverError::ElementOutOfRange { element: e, n });
            }
            let bit = 1u32 << (e - 1);
            if mask & bit != 0 {
                return Err(QuiverError::DuplicateElement(e));
            }
            mask |= bit;
        }
        Ok(Self(mask))
    }

    pub fn full(n: usize) -> Self {
        Self(((1u64 << n) - 1) as u32)
    }

    /// Elements in ascending order.
    pub fn elements(self) -> Vec<usize> {
        (1..=32).filter(|&k| self.contains(k)).collect()
    }

    pub fn contains(self, i: usize) -> bool {
        (1..=32).contains(&i) && self.0 & (1 << (i - 1)) != 0
    }

    pub fn with(self, i: usize) -> Self {
        Self(self.0 | (1 << (i - 1)))
    }

    pub fn without(self, i: usize) -> Self {
        Self(self.0 & !(1 << (i - 1)))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// All `2^n` vertices in mask order.
    pub fn all(n: usize) -> impl Iterator<Item = VertexId> {
        (0..(1u32 << n)).map(VertexId)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elements().iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// The edge pair between `from` and `from ∪ {dir}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: VertexId,
    pub dir: usize,
}

impl Edge {
    pub fn new(from: VertexId, dir: usize) -> Self {
        Self { from, dir }
    }

    pub fn to(self) -> VertexId {
        self.from.with(self.dir)
    }

    /// All `n·2^{n-1}` edges, ordered by source mask then direction.
    pub fn all(n: usize) -> impl Iterator<Item = Edge> {
        VertexId::all(n).flat_map(move |v| {
            (1..=n).filter(move |&i| !v.contains(i)).map(move |i| Edge::new(v, i))
        })
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.from, self.dir)
    }
}

/// Forward map `u` and backward map `y` of one edge.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeMaps {
    pub u: CMat,
    pub y: CMat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuiverRep {
    n: usize,
    dims: Vec<usize>,
    maps: BTreeMap<Edge, EdgeMaps>,
}

impl QuiverRep {
    /// Checks completeness and shapes; the commutation relations are left to
    /// [`validate`].
    pub fn new(n: usize, dims: Vec<usize>, maps: BTreeMap<Edge, EdgeMaps>) -> Result<Self, QuiverError> {
        if n == 0 || n > MAX_N {
            return Err(QuiverError::BadN(n));
        }
        if dims.len() != 1 << n {
            return Err(QuiverError::MissingVertex {
                vertex: format!("(expected {} vertex dimensions, got {})", 1usize << n, dims.len()),
            });
        }
        for e in maps.keys() {
            if e.dir == 0 || e.dir > n || e.from.contains(e.dir) || e.from.index() >= dims.len() {
                return Err(QuiverError::InvalidEdge {
                    edge: e.to_string(),
                    n,
                });
            }
        }
        for e in Edge::all(n) {
            let m = maps.get(&e).ok_or(QuiverError::MissingEdge { edge: e.to_string() })?;
            let (a, b) = (dims[e.from.index()], dims[e.to().index()]);
            if m.u.shape() != (b, a) {
                return Err(QuiverError::Shape {
                    edge: e.to_string(),
                    map: "u",
                    expected: (b, a),
                    got: m.u.shape(),
                });
            }
            if m.y.shape() != (a, b) {
                return Err(QuiverError::Shape {
                    edge: e.to_string(),
                    map: "y",
                    expected: (a, b),
                    got: m.y.shape(),
                });
            }
        }
        Ok(Self { n, dims, maps })
    }

    pub fn from_fn(
        n: usize,
        dims: Vec<usize>,
        mut f: impl FnMut(Edge) -> Result<EdgeMaps, QuiverError>,
    ) -> Result<Self, QuiverError> {
        if n == 0 || n > MAX_N {
            return Err(QuiverError::BadN(n));
        }
        let mut maps = BTreeMap::new();
        for e in Edge::all(n) {
            maps.insert(e, f(e)?);
        }
        Self::new(n, dims, maps)
    }

    /// The representation with every vertex zero-dimensional.
    pub fn zero(n: usize) -> Result<Self, QuiverError> {
        Self::from_fn(n, vec![0; 1 << n], |_| {
            Ok(EdgeMaps {
                u: CMat::zeros(0, 0),
                y: CMat::zeros(0, 0),
            })
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self, v: VertexId) -> usize {
        self.dims[v.index()]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn edge(&self, e: Edge) -> &EdgeMaps {
        &self.maps[&e]
    }

    pub fn u(&self, from: VertexId, i: usize) -> &CMat {
        &self.maps[&Edge::new(from, i)].u
    }

    pub fn y(&self, from: VertexId, i: usize) -> &CMat {
        &self.maps[&Edge::new(from, i)].y
    }

    pub fn edges(&self) -> impl Iterator<Item = (&Edge, &EdgeMaps)> {
        self.maps.iter()
    }

    /// Replaces the maps of every edge.
    pub fn map_edges(
        &self,
        mut f: impl FnMut(Edge, &EdgeMaps) -> Result<EdgeMaps, QuiverError>,
    ) -> Result<QuiverRep, QuiverError> {
        let mut maps = BTreeMap::new();
        for (e, m) in &self.maps {
            maps.insert(*e, f(*e, m)?);
        }
        QuiverRep::new(self.n, self.dims.clone(), maps)
    }

    /// `B_{K,L}`: the map `V_L → V_K` between adjacent vertices, i.e.
    /// `u_{L,i}` if `K = L ∪ {i}` and `y_{K,i}` if `L = K ∪ {i}`.
    pub fn b(&self, k: VertexId, l: VertexId) -> Option<&CMat> {
        let diff = k.mask() ^ l.mask();
        if diff.count_ones() != 1 {
            return None;
        }
        let i = diff.trailing_zeros() as usize + 1;
        if k.contains(i) {
            Some(self.u(l, i))
        } else {
            Some(self.y(k, i))
        }
    }

    /// `𝓑_{K,L} = B_{K,L} B_{L,K}`, an endomorphism of `V_K`.
    pub fn calb(&self, k: VertexId, l: VertexId) -> Option<CMat> {
        Some(self.b(k, l)? * self.b(l, k)?)
    }
}

/// A family `h_I: V_I → V'_I`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuiverMorphism {
    n: usize,
    h: Vec<CMat>,
}

impl QuiverMorphism {
    pub fn new(n: usize, h: Vec<CMat>) -> Result<Self, QuiverError> {
        if n == 0 || n > MAX_N {
            return Err(QuiverError::BadN(n));
        }
        if h.len() != 1 << n {
            return Err(QuiverError::MissingVertex {
                vertex: format!("(expected {} components, got {})", 1usize << n, h.len()),
            });
        }
        Ok(Self { n, h })
    }

    pub fn identity(rep: &QuiverRep) -> Self {
        Self {
            n: rep.n,
            h: rep.dims.iter().map(|&d| CMat::identity(d)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn component(&self, v: VertexId) -> &CMat {
        &self.h[v.index()]
    }

    pub fn components(&self) -> &[CMat] {
        &self.h
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &QuiverMorphism) -> Result<QuiverMorphism, QuiverError> {
        if self.n != other.n {
            return Err(QuiverError::NMismatch(self.n, other.n));
        }
        let h = self
            .h
            .iter()
            .zip(&other.h)
            .enumerate()
            .map(|(v, (a, b))| {
                a.try_mul(b).map_err(|_| QuiverError::MorphismShape {
                    vertex: VertexId(v as u32).to_string(),
                    expected: (a.rows(), a.cols()),
                    got: b.shape(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(QuiverMorphism { n: self.n, h })
    }

    /// Componentwise inverse.
    pub fn inverse(&self) -> Result<QuiverMorphism, QuiverError> {
        let h = self.h.iter().map(inverse).collect::<Result<Vec<_>, _>>()?;
        Ok(QuiverMorphism { n: self.n, h })
    }
}

/// The dual representation: forward maps `yᵀ`, backward maps `uᵀ`.
pub fn dualize(rep: &QuiverRep) -> QuiverRep {
    let maps = rep
        .maps
        .iter()
        .map(|(e, m)| {
            (
                *e,
                EdgeMaps {
                    u: m.y.transpose(),
                    y: m.u.transpose(),
                },
            )
        })
        .collect();
    QuiverRep {
        n: rep.n,
        dims: rep.dims.clone(),
        maps,
    }
}

/// The dual morphism `(h_Iᵀ)`, running from the dual of the target to the
/// dual of the source.
pub fn dualize_morphism(m: &QuiverMorphism) -> QuiverMorphism {
    QuiverMorphism {
        n: m.n,
        h: m.h.iter().map(CMat::transpose).collect(),
    }
}

/// Vertex-wise direct sum with block-diagonal maps.
pub fn direct_sum(a: &QuiverRep, b: &QuiverRep) -> Result<QuiverRep, QuiverError> {
    if a.n != b.n {
        return Err(QuiverError::NMismatch(a.n, b.n));
    }
    let dims = a.dims.iter().zip(&b.dims).map(|(x, y)| x + y).collect();
    let maps = a
        .maps
        .iter()
        .map(|(e, ma)| {
            let mb = &b.maps[e];
            (
                *e,
                EdgeMaps {
                    u: ma.u.direct_sum(&mb.u),
                    y: ma.y.direct_sum(&mb.y),
                },
            )
        })
        .collect();
    QuiverRep::new(a.n, dims, maps)
}
