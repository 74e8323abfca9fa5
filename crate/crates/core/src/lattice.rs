//! Lattice vectors, exact coordinates over the extremal rays, and validated
//! construction of simplicial affine semigroups.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

use crate::error::{Error, Result, ValidationError, ValidationKind};
use crate::linalg;
use crate::membership::{self, DEFAULT_BOX_BUDGET};

type Coords = SmallVec<[i64; 4]>;

/// A point of ℤ^d. Arithmetic is checked; overflow is reported as an error.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LatticeVector(Coords);

impl LatticeVector {
    pub fn new(coords: impl IntoIterator<Item = i64>) -> Self {
        LatticeVector(coords.into_iter().collect())
    }

    pub fn zero(dim: usize) -> Self {
        LatticeVector(SmallVec::from_elem(0, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }

    /// Componentwise `self <= other`.
    pub fn le_componentwise(&self, other: &LatticeVector) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    fn zip_with(&self, other: &LatticeVector, f: fn(i64, i64) -> Option<i64>) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::WrongDimension {
                vector: other.clone(),
                expected: self.dim(),
                found: other.dim(),
            });
        }
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(&a, &b)| f(a, b))
            .collect::<Option<Coords>>()
            .map(LatticeVector)
            .ok_or_else(|| Error::overflow(format!("{self} and {other}")))
    }

    pub fn checked_add(&self, other: &LatticeVector) -> Result<Self> {
        self.zip_with(other, i64::checked_add)
    }

    pub fn checked_sub(&self, other: &LatticeVector) -> Result<Self> {
        self.zip_with(other, i64::checked_sub)
    }

    pub fn checked_scale(&self, k: i64) -> Result<Self> {
        self.0
            .iter()
            .map(|&a| a.checked_mul(k))
            .collect::<Option<Coords>>()
            .map(LatticeVector)
            .ok_or_else(|| Error::overflow(format!("{k} * {self}")))
    }

    /// `self + Σ k_i v_i`.
    pub fn checked_add_combination<'a, I>(&self, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, &'a LatticeVector)>,
    {
        let mut acc = self.clone();
        for (k, v) in terms {
            if k != 0 {
                acc = acc.checked_add(&v.checked_scale(k)?)?;
            }
        }
        Ok(acc)
    }

    /// The primitive vector on the same ray and the multiplier:
    /// `self = k * primitive` with `k = gcd(coords) > 0`.
    pub fn primitive(&self) -> (LatticeVector, i64) {
        let g = self.0.iter().fold(0i64, |g, &x| g.gcd(&x));
        if g == 0 {
            return (self.clone(), 0);
        }
        (LatticeVector(self.0.iter().map(|&x| x / g).collect()), g)
    }

    fn as_i128(&self) -> Vec<i128> {
        self.0.iter().map(|&x| x as i128).collect()
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<const N: usize> From<[i64; N]> for LatticeVector {
    fn from(a: [i64; N]) -> Self {
        LatticeVector::new(a)
    }
}

impl From<Vec<i64>> for LatticeVector {
    fn from(v: Vec<i64>) -> Self {
        LatticeVector::new(v)
    }
}

impl From<&[i64]> for LatticeVector {
    fn from(v: &[i64]) -> Self {
        LatticeVector::new(v.iter().copied())
    }
}

impl Serialize for LatticeVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter())
    }
}

impl<'de> Deserialize<'de> for LatticeVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Vec::<i64>::deserialize(deserializer).map(LatticeVector::from)
    }
}

/// A point of ℚ^d; every entry is kept in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalVector(pub Vec<Ratio<i64>>);

impl RationalVector {
    pub fn coords(&self) -> &[Ratio<i64>] {
        &self.0
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(Ratio::is_integer)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|x| *x.numer() >= 0)
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// `A^{-1} = adj / det` for the matrix whose columns are the extremal rays.
#[derive(Clone, Debug, PartialEq, Eq)]
struct ExtremalInverse {
    adj: Vec<Vec<i128>>,
    det: i128,
}

impl ExtremalInverse {
    fn new(extremal: &[LatticeVector]) -> Result<Option<Self>> {
        let d = extremal.len();
        let matrix: Vec<Vec<i128>> = (0..d)
            .map(|row| extremal.iter().map(|a| a.coords()[row] as i128).collect())
            .collect();
        let (adj, det) = linalg::adjugate(&matrix)?;
        if det == 0 {
            return Ok(None);
        }
        Ok(Some(ExtremalInverse { adj, det }))
    }

    /// Numerators `n` with `x = n / det`.
    fn numerators(&self, z: &LatticeVector) -> Result<SmallVec<[i128; 4]>> {
        self.adj
            .iter()
            .map(|row| {
                row.iter().zip(z.coords()).try_fold(0i128, |acc, (&a, &b)| {
                    let p = a
                        .checked_mul(b as i128)
                        .ok_or_else(|| Error::overflow("extremal coordinates"))?;
                    linalg::add(acc, p)
                })
            })
            .collect()
    }
}

/// Validated generator data of a simplicial affine semigroup S ⊆ ℕ^d.
///
/// `extremal` holds the d generators spanning the extreme rays of the cone,
/// `others` the remaining minimal generators. Both blocks are sorted
/// lexicographically; ray indices used elsewhere (1-based) refer to this
/// order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSemigroup {
    dim: usize,
    extremal: Vec<LatticeVector>,
    others: Vec<LatticeVector>,
    inverse: ExtremalInverse,
}

impl AffineSemigroup {
    /// Builds a semigroup from an unordered generator list, detecting the
    /// extremal rays.
    pub fn build(raw: &[LatticeVector]) -> Result<Self, ValidationError> {
        let dim = check_shape(raw)?;
        let rows: Vec<Vec<i128>> = raw.iter().map(LatticeVector::as_i128).collect();
        if linalg::rank(&rows).map_err(as_validation)? < dim {
            return Err(ValidationError::new(
                ValidationKind::ExtremalRaysNotIndependent,
                "generators do not span a full-dimensional cone",
            ));
        }

        // Group by primitive direction; remember the smallest generator on each.
        let mut rays: BTreeMap<LatticeVector, (i64, usize)> = BTreeMap::new();
        for (i, g) in raw.iter().enumerate() {
            let (dir, k) = g.primitive();
            rays.entry(dir)
                .and_modify(|best| {
                    if k < best.0 {
                        *best = (k, i);
                    }
                })
                .or_insert((k, i));
        }
        let directions: Vec<&LatticeVector> = rays.keys().collect();
        let mut extreme = Vec::new();
        for (i, dir) in directions.iter().enumerate() {
            let rest: Vec<&[i64]> = directions
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, v)| v.coords())
                .collect();
            if !linalg::cone_contains(&rest, dir.coords()).map_err(as_validation)? {
                extreme.push(rays[*dir].1);
            }
        }
        if extreme.len() != dim {
            return Err(ValidationError::new(
                ValidationKind::NotSimplicial,
                format!("cone has {} extreme rays, expected {dim}", extreme.len()),
            ));
        }
        let (extremal, others): (Vec<_>, Vec<_>) =
            (0..raw.len()).partition(|i| extreme.contains(i));
        Self::validate(raw, &extremal, &others)
    }

    /// Builds a semigroup with the extremal rays named explicitly.
    pub fn from_parts(
        extremal: &[LatticeVector],
        others: &[LatticeVector],
    ) -> Result<Self, ValidationError> {
        let all: Vec<LatticeVector> = extremal.iter().chain(others).cloned().collect();
        check_shape(&all)?;
        if extremal.len() != all[0].dim() {
            return Err(ValidationError::new(
                ValidationKind::DimensionMismatch,
                format!("{} extremal rays given in dimension {}", extremal.len(), all[0].dim()),
            ));
        }
        let ext_idx: Vec<usize> = (0..extremal.len()).collect();
        let other_idx: Vec<usize> = (extremal.len()..all.len()).collect();
        Self::validate(&all, &ext_idx, &other_idx)
    }

    fn validate(
        all: &[LatticeVector],
        ext_idx: &[usize],
        other_idx: &[usize],
    ) -> Result<Self, ValidationError> {
        let dim = all[0].dim();
        let extremal: Vec<LatticeVector> = ext_idx.iter().map(|&i| all[i].clone()).collect();
        let inverse = ExtremalInverse::new(&extremal)
            .map_err(as_validation)?
            .ok_or_else(|| {
                ValidationError::new(
                    ValidationKind::ExtremalRaysNotIndependent,
                    "extremal rays are linearly dependent",
                )
            })?;

        for &i in other_idx {
            let num = inverse.numerators(&all[i]).map_err(as_validation)?;
            if num.iter().any(|&x| x < 0) {
                return Err(ValidationError::new(
                    ValidationKind::NotSimplicial,
                    "generator outside the cone of the extremal rays",
                )
                .at(i, &all[i]));
            }
            // On an extremal ray exactly one coordinate is nonzero; it must exceed 1.
            let support: Vec<usize> = (0..dim).filter(|&k| num[k] != 0).collect();
            if let [k] = support[..] {
                if num[k] < inverse.det {
                    return Err(ValidationError::new(
                        ValidationKind::NotSmallestOnRay,
                        format!("smaller than the extremal generator {}", extremal[k]),
                    )
                    .at(i, &all[i]));
                }
            }
        }

        for i in ext_idx.iter().chain(other_idx) {
            let rest: Vec<LatticeVector> = ext_idx
                .iter()
                .chain(other_idx)
                .filter(|&j| j != i)
                .map(|&j| all[j].clone())
                .collect();
            let redundant = membership::member_dp_generators(&rest, &all[*i], DEFAULT_BOX_BUDGET)
                .map_err(as_validation)?;
            if redundant {
                return Err(ValidationError::new(
                    ValidationKind::NotMinimal,
                    "generator is a sum of the other generators",
                )
                .at(*i, &all[*i]));
            }
        }

        let mut ordered: Vec<(LatticeVector, usize)> =
            extremal.into_iter().zip(ext_idx.iter().copied()).collect();
        ordered.sort();
        let extremal: Vec<LatticeVector> = ordered.iter().map(|(v, _)| v.clone()).collect();
        let inverse = ExtremalInverse::new(&extremal)
            .map_err(as_validation)?
            .expect("permuted columns stay independent");
        let mut others: Vec<LatticeVector> = other_idx.iter().map(|&i| all[i].clone()).collect();
        others.sort();

        Ok(AffineSemigroup {
            dim,
            extremal,
            others,
            inverse,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of non-extremal minimal generators.
    pub fn codim(&self) -> usize {
        self.others.len()
    }

    pub fn embedding_dim(&self) -> usize {
        self.dim + self.others.len()
    }

    pub fn extremal(&self) -> &[LatticeVector] {
        &self.extremal
    }

    /// Extremal ray by 1-based index.
    pub fn ray(&self, index: usize) -> Result<&LatticeVector> {
        if index == 0 || index > self.dim {
            return Err(Error::RayIndex { index, d: self.dim });
        }
        Ok(&self.extremal[index - 1])
    }

    pub fn others(&self) -> &[LatticeVector] {
        &self.others
    }

    /// All minimal generators, extremal rays first.
    pub fn generators(&self) -> impl Iterator<Item = &LatticeVector> {
        self.extremal.iter().chain(self.others.iter())
    }

    /// Sum of the extremal rays.
    pub fn extremal_sum(&self) -> Result<LatticeVector> {
        self.extremal
            .iter()
            .try_fold(LatticeVector::zero(self.dim), |acc, a| acc.checked_add(a))
    }

    /// |det| of the extremal matrix; coordinates over the rays have this
    /// common denominator.
    pub fn extremal_det(&self) -> i128 {
        self.inverse.det
    }

    pub(crate) fn check_dim(&self, z: &LatticeVector) -> Result<()> {
        if z.dim() != self.dim {
            return Err(Error::WrongDimension {
                vector: z.clone(),
                expected: self.dim,
                found: z.dim(),
            });
        }
        Ok(())
    }

    /// The unique rational x with `Σ x_i a_i = z`.
    pub fn solve_extremal_coordinates(&self, z: &LatticeVector) -> Result<RationalVector> {
        self.check_dim(z)?;
        let det = self.inverse.det;
        let coords = self
            .inverse
            .numerators(z)?
            .into_iter()
            .map(|n| {
                let g = n.gcd(&det);
                let (n, dd) = (n / g, det / g);
                match (i64::try_from(n), i64::try_from(dd)) {
                    (Ok(n), Ok(dd)) => Ok(Ratio::new(n, dd)),
                    _ => Err(Error::overflow("rational coordinate exceeds i64")),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RationalVector(coords))
    }

    /// Integral extremal coordinates of z, or `None` when some coordinate is
    /// fractional.
    pub fn integral_extremal_coordinates(
        &self,
        z: &LatticeVector,
    ) -> Result<Option<SmallVec<[i128; 4]>>> {
        self.check_dim(z)?;
        let det = self.inverse.det;
        let num = self.inverse.numerators(z)?;
        if num.iter().any(|x| x % det != 0) {
            return Ok(None);
        }
        Ok(Some(num.into_iter().map(|x| x / det).collect()))
    }

    /// z ∈ ℕa_1 + … + ℕa_d.
    pub fn in_free_extremal_span(&self, z: &LatticeVector) -> Result<bool> {
        Ok(self
            .integral_extremal_coordinates(z)?
            .is_some_and(|x| x.iter().all(|&c| c >= 0)))
    }

    /// z ∈ group(a_1, …, a_d).
    pub fn in_extremal_group(&self, z: &LatticeVector) -> Result<bool> {
        Ok(self.integral_extremal_coordinates(z)?.is_some())
    }

    /// Class of z in ℤ^d / group(a_1..a_d), as residues of the numerators.
    pub(crate) fn extremal_class(&self, z: &LatticeVector) -> Result<SmallVec<[i128; 4]>> {
        let det = self.inverse.det;
        Ok(self
            .inverse
            .numerators(z)?
            .into_iter()
            .map(|x| x.rem_euclid(det))
            .collect())
    }
}

impl fmt::Display for AffineSemigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, g) in self.generators().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ">")
    }
}

/// Free-function form of [`AffineSemigroup::build`].
pub fn build_semigroup(raw: &[LatticeVector]) -> Result<AffineSemigroup, ValidationError> {
    AffineSemigroup::build(raw)
}

fn check_shape(raw: &[LatticeVector]) -> Result<usize, ValidationError> {
    let Some(first) = raw.first() else {
        return Err(ValidationError::new(
            ValidationKind::DimensionMismatch,
            "empty generator list",
        ));
    };
    let dim = first.dim();
    if dim == 0 {
        return Err(ValidationError::new(
            ValidationKind::DimensionMismatch,
            "generators have dimension 0",
        ));
    }
    for (i, g) in raw.iter().enumerate() {
        if g.dim() != dim {
            return Err(ValidationError::new(
                ValidationKind::DimensionMismatch,
                format!("expected dimension {dim}, found {}", g.dim()),
            )
            .at(i, g));
        }
        if !g.is_nonnegative() {
            return Err(
                ValidationError::new(ValidationKind::NegativeCoordinate, "").at(i, g)
            );
        }
        if g.is_zero() {
            return Err(ValidationError::new(ValidationKind::ZeroGenerator, "").at(i, g));
        }
    }
    Ok(dim)
}

fn as_validation(e: Error) -> ValidationError {
    match e {
        Error::Validation(v) => v,
        other => ValidationError::overflow(other.to_string()),
    }
}
