//! Random test instances: tensor products of 1-cube representations,
//! optionally conjugated by a random change of basis at every vertex.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{EdgeMaps, QuiverError, QuiverMorphism, QuiverRep, VertexId, MAX_N};
use crate::matrix::{from_nalgebra, inverse, pseudo_inverse, sigma_min, spectrum, CMat, ONE, ZERO};
use super::validate::Category;

/// Rejection sampling limit for `C` factors.
const MAX_TRIES: usize = 1000;

/// Singular values of the conjugating matrices lie in `[1, COND]`.
const COND: f64 = 10.0;

/// Dimensions of a 1-cube factor: `lower = dim V^∅`, `upper = dim V^{1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FactorShape {
    pub lower: usize,
    pub upper: usize,
}

impl FactorShape {
    pub fn square(d: usize) -> Self {
        Self { lower: d, upper: d }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenOptions {
    pub n: usize,
    /// One shape per tensor slot.
    pub factors: Vec<FactorShape>,
    pub category: Category,
    pub seed: u64,
    /// Conjugate the tensor product by random well-conditioned bases.
    pub conjugate: bool,
    /// Sigma1 only: make every `y∘u` nilpotent.
    pub nilpotent: bool,
}

impl GenOptions {
    /// Square factors; `dims` holds one entry per slot or a single entry
    /// used for every slot.
    pub fn new(n: usize, dims: &[usize], category: Category, seed: u64) -> Self {
        let factors = (0..n)
            .map(|k| FactorShape::square(if dims.len() == 1 { dims[0] } else { dims.get(k).copied().unwrap_or(0) }))
            .collect();
        Self {
            n,
            factors,
            category,
            seed,
            conjugate: true,
            nilpotent: false,
        }
    }
}

/// Generates a representation in `category`; see [`GenOptions::new`] for
/// the meaning of `dims_per_factor`.
pub fn generate(
    n: usize,
    dims_per_factor: &[usize],
    category: Category,
    seed: u64,
) -> Result<QuiverRep, QuiverError> {
    if !(dims_per_factor.len() == 1 || dims_per_factor.len() == n) {
        return Err(QuiverError::GenerationFailed {
            tries: 0,
            reason: format!("expected 1 or {n} factor dimensions, got {}", dims_per_factor.len()),
        });
    }
    generate_with(&GenOptions::new(n, dims_per_factor, category, seed))
}

pub fn generate_with(opts: &GenOptions) -> Result<QuiverRep, QuiverError> {
    let n = opts.n;
    if n == 0 || n > MAX_N {
        return Err(QuiverError::BadN(n));
    }
    if opts.factors.len() != n {
        return Err(QuiverError::GenerationFailed {
            tries: 0,
            reason: format!("expected {n} factor shapes, got {}", opts.factors.len()),
        });
    }
    if opts.factors.iter().any(|f| f.lower == 0 || f.upper == 0) {
        return Err(QuiverError::GenerationFailed {
            tries: 0,
            reason: "factor dimensions must be at least 1".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut factors = Vec::with_capacity(n);
    for shape in &opts.factors {
        factors.push(match opts.category {
            Category::Qui => EdgeMaps {
                u: random_matrix(shape.upper, shape.lower, &mut rng),
                y: random_matrix(shape.lower, shape.upper, &mut rng),
            },
            Category::Sigma1 => sigma1_factor(*shape, opts.nilpotent, &mut rng)?,
            Category::C => c_factor(*shape, &mut rng)?,
        });
    }
    let rep = tensor(&opts.factors, &factors)?;
    if opts.conjugate {
        let seed = rng.random::<u64>();
        Ok(conjugate(&rep, seed)?.0)
    } else {
        Ok(rep)
    }
}

fn tensor(shapes: &[FactorShape], factors: &[EdgeMaps]) -> Result<QuiverRep, QuiverError> {
    let n = shapes.len();
    let slot_dim = |v: VertexId, k: usize| {
        if v.contains(k + 1) { shapes[k].upper } else { shapes[k].lower }
    };
    let dims = VertexId::all(n)
        .map(|v| (0..n).map(|k| slot_dim(v, k)).product())
        .collect();
    QuiverRep::from_fn(n, dims, |e| {
        let build = |local: &CMat| {
            (0..n).fold(CMat::identity(1), |acc, k| {
                if k + 1 == e.dir {
                    acc.kron(local)
                } else {
                    acc.kron(&CMat::identity(slot_dim(e.from, k)))
                }
            })
        };
        let f = &factors[e.dir - 1];
        Ok(EdgeMaps {
            u: build(&f.u),
            y: build(&f.y),
        })
    })
}

fn uniform(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMat {
    let mut m = CMat::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = uniform(rng);
        }
    }
    m
}

fn random_unitary(d: usize, rng: &mut ChaCha8Rng) -> Result<CMat, QuiverError> {
    if d == 0 {
        return Ok(CMat::zeros(0, 0));
    }
    loop {
        let a = random_matrix(d, d, rng);
        if sigma_min(&a) > 1e-3 {
            return Ok(from_nalgebra(&a.to_nalgebra().qr().q())?);
        }
    }
}

/// `U Σ Vᴴ` with Haar-like unitaries and singular values uniform in
/// `[smin, smax]`.
pub fn random_well_conditioned(
    rows: usize,
    cols: usize,
    smin: f64,
    smax: f64,
    rng: &mut ChaCha8Rng,
) -> Result<CMat, QuiverError> {
    let u = random_unitary(rows, rng)?;
    let v = random_unitary(cols, rng)?;
    let mut s = CMat::zeros(rows, cols);
    for k in 0..rows.min(cols) {
        s[(k, k)] = Complex64::new(rng.random_range(smin..=smax), 0.0);
    }
    Ok(&(&u * &s) * &v.adjoint())
}

fn sigma1_eigenvalue(rng: &mut ChaCha8Rng) -> Complex64 {
    match rng.random_range(0..10) {
        0 => Complex64::new(0.0, rng.random_range(0.0..1.0)),
        1 => Complex64::new(1.0, rng.random_range(-1.0..-0.1)),
        _ => Complex64::new(rng.random_range(0.05..0.95), rng.random_range(-1.0..1.0)),
    }
}

/// A `d×d` matrix with spectrum in Σ1 (all zero when `nilpotent`), with
/// occasional repeated interior eigenvalues carrying Jordan structure.
fn sigma1_matrix(d: usize, nilpotent: bool, rng: &mut ChaCha8Rng) -> Result<CMat, QuiverError> {
    let mut t = CMat::zeros(d, d);
    for k in 0..d {
        t[(k, k)] = if nilpotent {
            ZERO
        } else {
            let prev = if k > 0 { Some(t[(k - 1, k - 1)]) } else { None };
            match prev {
                Some(p) if p.re > 0.0 && p.re < 1.0 && rng.random_bool(0.25) => p,
                _ => sigma1_eigenvalue(rng),
            }
        };
        for j in k + 1..d {
            t[(k, j)] = uniform(rng).scale(0.5);
        }
    }
    if nilpotent {
        for k in 0..d.saturating_sub(1) {
            t[(k, k + 1)] = Complex64::new(rng.random_range(0.5..1.5), 0.0);
        }
    }
    let r = random_well_conditioned(d, d, 1.0, 4.0, rng)?;
    Ok(&(&r * &t) * &inverse(&r)?)
}

/// `u` full rank; `c` chosen so that `c·u` (or its nonzero part) is a
/// random Σ1 matrix.
fn sigma1_factor(shape: FactorShape, nilpotent: bool, rng: &mut ChaCha8Rng) -> Result<EdgeMaps, QuiverError> {
    let (a, b) = (shape.lower, shape.upper);
    let u = random_well_conditioned(b, a, 0.5, 2.0, rng)?;
    let pinv = pseudo_inverse(&u)?;
    let y = if a <= b {
        &sigma1_matrix(a, nilpotent, rng)? * &pinv
    } else {
        &pinv * &sigma1_matrix(b, nilpotent, rng)?
    };
    Ok(EdgeMaps { u, y })
}

/// Rejection-samples `(u, w)` so that `w·u + Id` is safely invertible and
/// its eigenvalues are either exactly on or clearly off the positive real
/// axis, and either equal to 1 or clearly away from it.
fn c_factor(shape: FactorShape, rng: &mut ChaCha8Rng) -> Result<EdgeMaps, QuiverError> {
    let (a, b) = (shape.lower, shape.upper);
    for _ in 0..MAX_TRIES {
        let u = random_matrix(b, a, rng);
        let scale = rng.random_range(0.2..1.5);
        let w = random_matrix(a, b, rng).scale(Complex64::new(scale, 0.0));
        let m = (&w * &u).add_identity(ONE);
        if sigma_min(&m) <= 0.05 {
            continue;
        }
        let Ok(eigs) = spectrum(&m) else { continue };
        let good = eigs.iter().all(|mu| {
            let d1 = (mu - ONE).norm();
            let near_one_ok = !(1e-12..=0.1).contains(&d1);
            let axis_ok = mu.im.abs() <= 1e-12 * mu.norm() || mu.re <= 0.0 || mu.arg().abs() > 1e-3;
            near_one_ok && axis_ok
        });
        if good {
            return Ok(EdgeMaps { u, y: w });
        }
    }
    Err(QuiverError::GenerationFailed {
        tries: MAX_TRIES,
        reason: format!("no admissible {a}x{b} factor for category c"),
    })
}

/// Conjugates every vertex by a random `R_I` with singular values in
/// `[1, 10]`. Returns the new representation and the isomorphism `(R_I)`
/// from `rep` to it.
pub fn conjugate(rep: &QuiverRep, seed: u64) -> Result<(QuiverRep, QuiverMorphism), QuiverError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rs = rep
        .dims()
        .iter()
        .map(|&d| random_well_conditioned(d, d, 1.0, COND, &mut rng))
        .collect::<Result<Vec<_>, _>>()?;
    let m = QuiverMorphism::new(rep.n(), rs)?;
    Ok((conjugate_with(rep, &m)?, m))
}

/// `u' = R_{I∪i} u R_I⁻¹`, `y' = R_I y R_{I∪i}⁻¹`.
pub fn conjugate_with(rep: &QuiverRep, m: &QuiverMorphism) -> Result<QuiverRep, QuiverError> {
    let inv = m.inverse()?;
    rep.map_edges(|e, maps| {
        let (r0, r1) = (m.component(e.from), m.component(e.to()));
        let (i0, i1) = (inv.component(e.from), inv.component(e.to()));
        Ok(EdgeMaps {
            u: &(r1 * &maps.u) * i0,
            y: &(r0 * &maps.y) * i1,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{validate, validate_morphism, DEFAULT_TOL};

    #[test]
    fn generated_reps_validate() {
        for seed in 0..20 {
            for cat in [Category::Qui, Category::C, Category::Sigma1] {
                let n = 1 + (seed as usize % 3);
                let rep = generate(n, &[1 + seed as usize % 2], cat, seed).unwrap();
                let r = validate(&rep, cat, DEFAULT_TOL);
                assert!(r.passed(), "{cat} seed {seed}: {}", r.to_text());
            }
        }
    }

    #[test]
    fn rectangular_and_nilpotent_factors() {
        for seed in 0..10 {
            let mut o = GenOptions::new(2, &[1], Category::Sigma1, seed);
            o.factors = vec![FactorShape { lower: 1, upper: 3 }, FactorShape { lower: 2, upper: 1 }];
            o.nilpotent = seed % 2 == 0;
            let rep = generate_with(&o).unwrap();
            assert_eq!(rep.dims(), &[2, 6, 1, 3]);
            assert!(validate(&rep, Category::Sigma1, DEFAULT_TOL).passed());
            o.category = Category::C;
            let rep = generate_with(&o).unwrap();
            assert!(validate(&rep, Category::C, DEFAULT_TOL).passed());
        }
    }

    #[test]
    fn conjugation_is_an_isomorphism() {
        let rep = generate(2, &[2], Category::Sigma1, 7).unwrap();
        let (twin, m) = conjugate(&rep, 11).unwrap();
        assert!(validate_morphism(&rep, &twin, &m, DEFAULT_TOL).passed());
        let id = QuiverMorphism::identity(&rep);
        assert!(conjugate_with(&rep, &id).unwrap().edges().zip(rep.edges()).all(|(a, b)| a.1 == b.1));
    }

    #[test]
    fn same_seed_same_rep() {
        let a = generate(3, &[2], Category::C, 5).unwrap();
        let b = generate(3, &[2], Category::C, 5).unwrap();
        assert_eq!(a, b);
    }
}
