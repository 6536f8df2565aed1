//! Truncated two-region Fock spaces over labeled modes.
//!
//! A [`FockSpace`] is the tensor product of two local occupation-number
//! spaces, one per region. Each local basis enumerates occupation vectors
//! over that region's modes with the per-species total capped, and the
//! global basis is the product, ordered lexicographically by occupation
//! vector with the A-region modes first (leftmost component most
//! significant). All serialization relies on this order.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default cap on the global dimension of a constructed space.
pub const DEFAULT_DIM_LIMIT: usize = 4096;

pub(crate) const HERM_TOL: f64 = 1e-12;
pub(crate) const PSD_TOL: f64 = 1e-10;
pub(crate) const TRACE_TOL: f64 = 1e-12;

pub(crate) fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// One of the two spatially separated laboratories.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Region {
    A,
    B,
}

impl Region {
    pub fn other(self) -> Region {
        match self {
            Region::A => Region::B,
            Region::B => Region::A,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::A => write!(f, "A"),
            Region::B => write!(f, "B"),
        }
    }
}

/// A single-particle field mode: (region, input port, particle species).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Mode {
    pub region: Region,
    pub port: u32,
    pub species: u32,
}

impl Mode {
    pub fn new(region: Region, port: u32, species: u32) -> Self {
        Mode { region, port, species }
    }
}

/// Occupation numbers, one per mode, in the space's canonical mode order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct OccupationState {
    occupations: Vec<u32>,
}

impl OccupationState {
    pub fn new(occupations: Vec<u32>) -> Self {
        OccupationState { occupations }
    }

    pub fn occupations(&self) -> &[u32] {
        &self.occupations
    }

    pub fn len(&self) -> usize {
        self.occupations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupations.is_empty()
    }
}

impl fmt::Display for OccupationState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, n) in self.occupations.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ")")
    }
}

/// Per-(region, species) particle totals; the SSR sector key.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SectorLabel {
    counts: BTreeMap<(Region, u32), u32>,
}

impl SectorLabel {
    pub fn counts(&self) -> &BTreeMap<(Region, u32), u32> {
        &self.counts
    }

    pub fn count(&self, region: Region, species: u32) -> u32 {
        self.counts.get(&(region, species)).copied().unwrap_or(0)
    }

    /// Total particles of one species summed over both regions.
    pub fn total(&self, species: u32) -> u32 {
        self.count(Region::A, species) + self.count(Region::B, species)
    }
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (ri, region) in [Region::A, Region::B].iter().enumerate() {
            if ri > 0 {
                write!(f, "|")?;
            }
            write!(f, "{region}{{")?;
            let mut first = true;
            for ((r, s), n) in &self.counts {
                if r == region {
                    if !first {
                        write!(f, ",")?;
                    }
                    write!(f, "{s}:{n}")?;
                    first = false;
                }
            }
            write!(f, "}}")?;
        }
        Ok(())
    }
}

/// Truncated two-region Fock space with an enumerated occupation basis.
///
/// Immutable after construction; shared through `Arc`.
pub struct FockSpace {
    modes: Vec<Mode>,
    n_modes_a: usize,
    caps: BTreeMap<u32, u32>,
    local_a: Vec<Vec<u32>>,
    local_b: Vec<Vec<u32>>,
    basis: Vec<OccupationState>,
    index: HashMap<OccupationState, usize>,
    sectors: Vec<SectorLabel>,
    local_sectors_a: Vec<BTreeMap<u32, u32>>,
    local_sectors_b: Vec<BTreeMap<u32, u32>>,
}

impl fmt::Debug for FockSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FockSpace")
            .field("modes", &self.modes)
            .field("caps", &self.caps)
            .field("dim", &self.dim())
            .finish()
    }
}

impl PartialEq for FockSpace {
    fn eq(&self, other: &Self) -> bool {
        self.modes == other.modes && self.caps == other.caps
    }
}

/// Builds a space with the default dimension limit.
pub fn build_fock_space(
    modes: &[Mode],
    max_per_species: &BTreeMap<u32, u32>,
) -> Result<Arc<FockSpace>> {
    build_fock_space_with_limit(modes, max_per_species, DEFAULT_DIM_LIMIT)
}

/// Builds a space, rejecting global dimensions above `limit`.
pub fn build_fock_space_with_limit(
    modes: &[Mode],
    max_per_species: &BTreeMap<u32, u32>,
    limit: usize,
) -> Result<Arc<FockSpace>> {
    if modes.is_empty() {
        return Err(Error::EmptyModeList);
    }
    let mut seen = BTreeSet::new();
    for m in modes {
        if !seen.insert(*m) {
            return Err(Error::DuplicateMode(m.region.to_string(), m.port, m.species));
        }
    }
    let mut canonical: Vec<Mode> = modes.to_vec();
    canonical.sort();

    let species: BTreeSet<u32> = canonical.iter().map(|m| m.species).collect();
    let mut caps = BTreeMap::new();
    for s in &species {
        match max_per_species.get(s) {
            Some(c) => {
                caps.insert(*s, *c);
            }
            None => {
                return Err(Error::InvalidArgument(format!(
                    "no max_per_species entry for species {s}"
                )))
            }
        }
    }

    let n_modes_a = canonical.iter().filter(|m| m.region == Region::A).count();
    let (modes_a, modes_b) = canonical.split_at(n_modes_a);

    let dim_a = local_dimension(modes_a, &caps);
    let dim_b = local_dimension(modes_b, &caps);
    let dim = dim_a.saturating_mul(dim_b);
    if dim > limit as u128 {
        return Err(Error::DimensionOverflow {
            dim: dim.min(usize::MAX as u128) as usize,
            limit,
        });
    }

    let local_a = enumerate_local(modes_a, &caps);
    let local_b = enumerate_local(modes_b, &caps);
    debug_assert_eq!(local_a.len() as u128, dim_a);
    debug_assert_eq!(local_b.len() as u128, dim_b);

    let mut basis = Vec::with_capacity(local_a.len() * local_b.len());
    for occ_a in &local_a {
        for occ_b in &local_b {
            let mut v = occ_a.clone();
            v.extend_from_slice(occ_b);
            basis.push(OccupationState::new(v));
        }
    }
    let index: HashMap<OccupationState, usize> = basis
        .iter()
        .enumerate()
        .map(|(k, st)| (st.clone(), k))
        .collect();

    let local_sectors_a: Vec<_> = local_a
        .iter()
        .map(|occ| species_counts(modes_a, occ, &species))
        .collect();
    let local_sectors_b: Vec<_> = local_b
        .iter()
        .map(|occ| species_counts(modes_b, occ, &species))
        .collect();

    let mut sectors = Vec::with_capacity(basis.len());
    for ia in 0..local_a.len() {
        for ib in 0..local_b.len() {
            let mut counts = BTreeMap::new();
            for (s, n) in &local_sectors_a[ia] {
                counts.insert((Region::A, *s), *n);
            }
            for (s, n) in &local_sectors_b[ib] {
                counts.insert((Region::B, *s), *n);
            }
            sectors.push(SectorLabel { counts });
        }
    }

    Ok(Arc::new(FockSpace {
        modes: canonical,
        n_modes_a,
        caps,
        local_a,
        local_b,
        basis,
        index,
        sectors,
        local_sectors_a,
        local_sectors_b,
    }))
}

fn species_counts(
    modes: &[Mode],
    occ: &[u32],
    species: &BTreeSet<u32>,
) -> BTreeMap<u32, u32> {
    let mut counts: BTreeMap<u32, u32> = species.iter().map(|s| (*s, 0)).collect();
    for (m, n) in modes.iter().zip(occ) {
        *counts.get_mut(&m.species).unwrap() += n;
    }
    counts
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Vectors over `modes` with each species total capped factorize across
/// species, so the count is a product of stars-and-bars terms.
fn local_dimension(modes: &[Mode], caps: &BTreeMap<u32, u32>) -> u128 {
    let mut dim: u128 = 1;
    for (s, cap) in caps {
        let m = modes.iter().filter(|md| md.species == *s).count() as u128;
        // occupation vectors over m modes with total <= cap
        dim = dim.saturating_mul(binomial(m + *cap as u128, m));
    }
    dim
}

fn enumerate_local(modes: &[Mode], caps: &BTreeMap<u32, u32>) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut occ = vec![0u32; modes.len()];
    let mut used: BTreeMap<u32, u32> = caps.keys().map(|s| (*s, 0)).collect();
    fill(modes, caps, 0, &mut occ, &mut used, &mut out);
    out
}

fn fill(
    modes: &[Mode],
    caps: &BTreeMap<u32, u32>,
    pos: usize,
    occ: &mut Vec<u32>,
    used: &mut BTreeMap<u32, u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if pos == modes.len() {
        out.push(occ.clone());
        return;
    }
    let s = modes[pos].species;
    let room = caps[&s] - used[&s];
    for n in 0..=room {
        occ[pos] = n;
        *used.get_mut(&s).unwrap() += n;
        fill(modes, caps, pos + 1, occ, used, out);
        *used.get_mut(&s).unwrap() -= n;
    }
    occ[pos] = 0;
}

impl FockSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn local_dim(&self, region: Region) -> usize {
        match region {
            Region::A => self.local_a.len(),
            Region::B => self.local_b.len(),
        }
    }

    /// All modes in canonical order (A region first).
    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn modes_of(&self, region: Region) -> &[Mode] {
        match region {
            Region::A => &self.modes[..self.n_modes_a],
            Region::B => &self.modes[self.n_modes_a..],
        }
    }

    pub fn species(&self) -> impl Iterator<Item = u32> + '_ {
        self.caps.keys().copied()
    }

    pub fn max_per_species(&self) -> &BTreeMap<u32, u32> {
        &self.caps
    }

    pub fn basis(&self) -> &[OccupationState] {
        &self.basis
    }

    pub fn basis_state(&self, k: usize) -> &OccupationState {
        &self.basis[k]
    }

    pub fn index_of(&self, state: &OccupationState) -> Result<usize> {
        if state.len() != self.modes.len() {
            return Err(Error::OccupationLength {
                expected: self.modes.len(),
                got: state.len(),
            });
        }
        self.index.get(state).copied().ok_or(Error::NotInBasis)
    }

    /// Per-(region, species) totals of a basis state.
    pub fn sector_of(&self, state: &OccupationState) -> Result<SectorLabel> {
        let k = self.index_of(state)?;
        Ok(self.sectors[k].clone())
    }

    pub fn sector_of_index(&self, k: usize) -> &SectorLabel {
        &self.sectors[k]
    }

    /// Per-species totals of one local basis vector, within `region`.
    pub fn local_sector(&self, region: Region, local_index: usize) -> &BTreeMap<u32, u32> {
        match region {
            Region::A => &self.local_sectors_a[local_index],
            Region::B => &self.local_sectors_b[local_index],
        }
    }

    pub fn local_occupation(&self, region: Region, local_index: usize) -> &[u32] {
        match region {
            Region::A => &self.local_a[local_index],
            Region::B => &self.local_b[local_index],
        }
    }

    /// Global index of the product of two local basis vectors.
    pub fn join_index(&self, ia: usize, ib: usize) -> usize {
        ia * self.local_b.len() + ib
    }

    /// Inverse of [`join_index`](Self::join_index).
    pub fn split_index(&self, k: usize) -> (usize, usize) {
        (k / self.local_b.len(), k % self.local_b.len())
    }

    /// Index of the global basis state with the given occupations.
    pub fn index_of_occupations(&self, occupations: &[u32]) -> Result<usize> {
        self.index_of(&OccupationState::new(occupations.to_vec()))
    }

    /// Partition of local basis indices by per-species counts (SSR blocks).
    pub fn local_sector_blocks(&self, region: Region) -> Vec<Vec<usize>> {
        let sectors = match region {
            Region::A => &self.local_sectors_a,
            Region::B => &self.local_sectors_b,
        };
        let mut blocks: BTreeMap<&BTreeMap<u32, u32>, Vec<usize>> = BTreeMap::new();
        for (i, s) in sectors.iter().enumerate() {
            blocks.entry(s).or_default().push(i);
        }
        blocks.into_values().collect()
    }
}

/// A matrix over the global occupation basis of one space.
#[derive(Clone, Debug)]
pub struct Operator {
    space: Arc<FockSpace>,
    matrix: DMatrix<Complex64>,
}

impl Operator {
    pub fn new(space: Arc<FockSpace>, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != space.dim() || matrix.ncols() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: matrix.nrows(),
            });
        }
        Ok(Operator { space, matrix })
    }

    pub fn identity(space: Arc<FockSpace>) -> Self {
        let d = space.dim();
        Operator {
            space,
            matrix: DMatrix::identity(d, d),
        }
    }

    pub fn space(&self) -> &Arc<FockSpace> {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn hermitian_deviation(&self) -> f64 {
        hermitian_deviation(&self.matrix)
    }
}

pub(crate) fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Eigendecomposition of a Hermitian matrix: (ascending eigenvalues, columns).
pub(crate) fn eigh(m: &DMatrix<Complex64>) -> (DVector<f64>, DMatrix<Complex64>) {
    let se = nalgebra::SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let vals = DVector::from_iterator(order.len(), order.iter().map(|&i| se.eigenvalues[i]));
    let vecs = DMatrix::from_columns(
        &order
            .iter()
            .map(|&i| se.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (vals, vecs)
}

/// A validated quantum state: Hermitian, PSD, unit trace.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    pub fn new(space: Arc<FockSpace>, matrix: DMatrix<Complex64>) -> Result<Self> {
        let op = Operator::new(space, matrix)?;
        let dev = op.hermitian_deviation();
        if dev > HERM_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = op.matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::TraceNotOne(tr.re));
        }
        let (vals, _) = eigh(&op.matrix);
        let min = vals.min();
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(DensityMatrix { op })
    }

    /// Projector onto a normalized state vector.
    pub fn from_pure(space: Arc<FockSpace>, vector: &DVector<Complex64>) -> Result<Self> {
        if vector.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: vector.len(),
            });
        }
        let norm = vector.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm * norm));
        }
        let matrix = vector * vector.adjoint();
        Ok(DensityMatrix {
            op: Operator { space, matrix },
        })
    }

    pub fn space(&self) -> &Arc<FockSpace> {
        self.op.space()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        self.op.matrix()
    }

    pub fn as_operator(&self) -> &Operator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn trace(&self) -> f64 {
        self.op.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        let m = &self.op.matrix;
        let mut acc = Complex64::default();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                acc += m[(i, j)] * m[(j, i)];
            }
        }
        acc.re
    }

    /// tr(rho * op).
    pub fn expectation(&self, op: &Operator) -> Result<Complex64> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: op.dim(),
            });
        }
        let a = &self.op.matrix;
        let b = &op.matrix;
        let mut acc = Complex64::default();
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                acc += a[(i, j)] * b[(j, i)];
            }
        }
        Ok(acc)
    }

    /// Diagonal weight carried by each SSR sector, sorted by label.
    pub fn sector_weights(&self) -> Vec<(SectorLabel, f64)> {
        let mut acc: BTreeMap<SectorLabel, f64> = BTreeMap::new();
        for k in 0..self.dim() {
            *acc.entry(self.space().sector_of_index(k).clone()).or_insert(0.0) +=
                self.matrix()[(k, k)].re;
        }
        acc.into_iter().collect()
    }
}

/// A matrix over one region's local occupation basis.
#[derive(Clone, Debug)]
pub struct LocalOperator {
    region: Region,
    matrix: DMatrix<Complex64>,
}

impl LocalOperator {
    pub fn new(region: Region, matrix: DMatrix<Complex64>) -> Self {
        LocalOperator { region, matrix }
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn hermitian_deviation(&self) -> f64 {
        hermitian_deviation(&self.matrix)
    }
}

/// op ⊗ 1 (region A) or 1 ⊗ op (region B) in the global basis order.
pub fn embed_local(op: &LocalOperator, space: &Arc<FockSpace>) -> Result<Operator> {
    let d_local = space.local_dim(op.region());
    if op.dim() != d_local {
        return Err(Error::DimensionMismatch {
            expected: d_local,
            got: op.dim(),
        });
    }
    let matrix = match op.region() {
        Region::A => {
            let ib = DMatrix::<Complex64>::identity(
                space.local_dim(Region::B),
                space.local_dim(Region::B),
            );
            op.matrix().kronecker(&ib)
        }
        Region::B => {
            let ia = DMatrix::<Complex64>::identity(
                space.local_dim(Region::A),
                space.local_dim(Region::A),
            );
            ia.kronecker(op.matrix())
        }
    };
    Operator::new(Arc::clone(space), matrix)
}

/// Sum over the discarded region's local indices.
pub(crate) fn trace_out(
    matrix: &DMatrix<Complex64>,
    dim_a: usize,
    dim_b: usize,
    keep: Region,
) -> DMatrix<Complex64> {
    match keep {
        Region::A => {
            let mut out = DMatrix::<Complex64>::zeros(dim_a, dim_a);
            for ia in 0..dim_a {
                for ja in 0..dim_a {
                    let mut acc = Complex64::default();
                    for ib in 0..dim_b {
                        acc += matrix[(ia * dim_b + ib, ja * dim_b + ib)];
                    }
                    out[(ia, ja)] = acc;
                }
            }
            out
        }
        Region::B => {
            let mut out = DMatrix::<Complex64>::zeros(dim_b, dim_b);
            for ib in 0..dim_b {
                for jb in 0..dim_b {
                    let mut acc = Complex64::default();
                    for ia in 0..dim_a {
                        acc += matrix[(ia * dim_b + ib, ia * dim_b + jb)];
                    }
                    out[(ib, jb)] = acc;
                }
            }
            out
        }
    }
}

/// Reduced state on the kept region, returned over a space holding only that
/// region's modes (the other local factor degenerates to the vacuum).
pub fn partial_trace(rho: &DensityMatrix, keep: Region) -> Result<DensityMatrix> {
    let space = rho.space();
    let reduced_mat = trace_out(
        rho.matrix(),
        space.local_dim(Region::A),
        space.local_dim(Region::B),
        keep,
    );
    let kept_modes: Vec<Mode> = space.modes_of(keep).to_vec();
    let caps: BTreeMap<u32, u32> = kept_modes
        .iter()
        .map(|m| (m.species, space.max_per_species()[&m.species]))
        .collect();
    let reduced_space = build_fock_space_with_limit(&kept_modes, &caps, space.dim())?;
    DensityMatrix::new(reduced_space, reduced_mat)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn caps(pairs: &[(u32, u32)]) -> BTreeMap<u32, u32> {
        pairs.iter().copied().collect()
    }

    fn two_mode_space(cap: u32) -> Arc<FockSpace> {
        build_fock_space(
            &[Mode::new(Region::A, 0, 0), Mode::new(Region::B, 0, 0)],
            &caps(&[(0, cap)]),
        )
        .unwrap()
    }

    #[test]
    fn two_modes_cap_one_is_product_of_locals() {
        let space = two_mode_space(1);
        assert_eq!(space.local_dim(Region::A), 2);
        assert_eq!(space.local_dim(Region::B), 2);
        assert_eq!(space.dim(), 4);
        let listed: Vec<Vec<u32>> = space
            .basis()
            .iter()
            .map(|s| s.occupations().to_vec())
            .collect();
        assert_eq!(listed, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn basis_index_is_a_bijection() {
        let space = build_fock_space(
            &[
                Mode::new(Region::A, 0, 0),
                Mode::new(Region::A, 1, 0),
                Mode::new(Region::B, 0, 0),
                Mode::new(Region::B, 1, 0),
            ],
            &caps(&[(0, 2)]),
        )
        .unwrap();
        for k in 0..space.dim() {
            assert_eq!(space.index_of(space.basis_state(k)).unwrap(), k);
        }
    }

    #[test]
    fn four_modes_two_ports_cap_two_dims() {
        let space = build_fock_space(
            &[
                Mode::new(Region::A, 0, 0),
                Mode::new(Region::A, 1, 0),
                Mode::new(Region::B, 0, 0),
                Mode::new(Region::B, 1, 0),
            ],
            &caps(&[(0, 2)]),
        )
        .unwrap();
        assert_eq!(space.local_dim(Region::A), 6);
        assert_eq!(space.local_dim(Region::B), 6);
        assert_eq!(space.dim(), 36);

        // brute-force oracle: candidate vectors with per-region totals <= 2
        let mut count = 0;
        for n0 in 0..=2u32 {
            for n1 in 0..=2u32 {
                for n2 in 0..=2u32 {
                    for n3 in 0..=2u32 {
                        if n0 + n1 <= 2 && n2 + n3 <= 2 {
                            count += 1;
                            let occ = OccupationState::new(vec![n0, n1, n2, n3]);
                            assert!(space.index_of(&occ).is_ok());
                        }
                    }
                }
            }
        }
        assert_eq!(count, 36);
    }

    #[test]
    fn cap_zero_gives_single_vacuum_state() {
        let space = two_mode_space(0);
        assert_eq!(space.dim(), 1);
        assert_eq!(space.basis_state(0).occupations(), &[0, 0]);
    }

    #[test]
    fn duplicate_mode_rejected() {
        let err = build_fock_space(
            &[Mode::new(Region::A, 0, 0), Mode::new(Region::A, 0, 0)],
            &caps(&[(0, 1)]),
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateMode(..)));
    }

    #[test]
    fn dimension_overflow_rejected() {
        let modes: Vec<Mode> = (0..8)
            .map(|p| Mode::new(Region::A, p, 0))
            .chain((0..8).map(|p| Mode::new(Region::B, p, 0)))
            .collect();
        let err = build_fock_space(&modes, &caps(&[(0, 8)])).unwrap_err();
        assert!(matches!(err, Error::DimensionOverflow { .. }));
    }

    #[test]
    fn sector_of_two_species_yurke_branch() {
        // regions A,B x species i=0 (port 0), j=1 (port 1)
        let space = build_fock_space(
            &[
                Mode::new(Region::A, 0, 0),
                Mode::new(Region::A, 1, 1),
                Mode::new(Region::B, 0, 0),
                Mode::new(Region::B, 1, 1),
            ],
            &caps(&[(0, 1), (1, 1)]),
        )
        .unwrap();
        let st = OccupationState::new(vec![1, 0, 0, 1]);
        let sector = space.sector_of(&st).unwrap();
        assert_eq!(sector.count(Region::A, 0), 1);
        assert_eq!(sector.count(Region::A, 1), 0);
        assert_eq!(sector.count(Region::B, 0), 0);
        assert_eq!(sector.count(Region::B, 1), 1);
    }

    #[test]
    fn sector_of_vacuum_is_all_zeros() {
        let space = two_mode_space(1);
        let sector = space
            .sector_of(&OccupationState::new(vec![0, 0]))
            .unwrap();
        assert!(sector.counts().values().all(|&n| n == 0));
    }

    #[test]
    fn sector_sums_over_ports_of_same_species() {
        let space = build_fock_space(
            &[
                Mode::new(Region::A, 0, 0),
                Mode::new(Region::A, 1, 0),
                Mode::new(Region::B, 0, 0),
                Mode::new(Region::B, 1, 0),
            ],
            &caps(&[(0, 2)]),
        )
        .unwrap();
        let st = OccupationState::new(vec![1, 1, 0, 0]);
        let sector = space.sector_of(&st).unwrap();
        assert_eq!(sector.count(Region::A, 0), 2);
        assert_eq!(sector.count(Region::B, 0), 0);
    }

    #[test]
    fn sector_of_rejects_length_mismatch() {
        let space = two_mode_space(1);
        let err = space
            .sector_of(&OccupationState::new(vec![0, 0, 0]))
            .unwrap_err();
        assert!(matches!(err, Error::OccupationLength { .. }));
    }

    #[test]
    fn embed_identity_is_global_identity() {
        let space = two_mode_space(1);
        let id_a = LocalOperator::new(
            Region::A,
            DMatrix::identity(space.local_dim(Region::A), space.local_dim(Region::A)),
        );
        let embedded = embed_local(&id_a, &space).unwrap();
        assert_eq!(
            embedded.matrix(),
            &DMatrix::<Complex64>::identity(4, 4)
        );
    }

    #[test]
    fn embed_z_analog_is_diagonal_on_occupation() {
        let space = two_mode_space(1);
        // +1 on |0>_A, -1 on |1>_A
        let z = LocalOperator::new(
            Region::A,
            DMatrix::from_diagonal(&DVector::from_vec(vec![c64(1.0, 0.0), c64(-1.0, 0.0)])),
        );
        let embedded = embed_local(&z, &space).unwrap();
        for k in 0..4 {
            let (ia, _) = space.split_index(k);
            let expected = if space.local_occupation(Region::A, ia)[0] == 0 {
                1.0
            } else {
                -1.0
            };
            assert_eq!(embedded.matrix()[(k, k)].re, expected);
            assert_eq!(embedded.matrix()[(k, k)].im, 0.0);
        }
    }

    #[test]
    fn opposite_region_embeddings_commute() {
        let space = two_mode_space(1);
        let x = LocalOperator::new(
            Region::A,
            DMatrix::from_row_slice(2, 2, &[
                c64(0.0, 0.0), c64(1.0, 0.0),
                c64(1.0, 0.0), c64(0.0, 0.0),
            ]),
        );
        let y = LocalOperator::new(
            Region::B,
            DMatrix::from_row_slice(2, 2, &[
                c64(0.0, 0.0), c64(0.0, -1.0),
                c64(0.0, 1.0), c64(0.0, 0.0),
            ]),
        );
        let xg = embed_local(&x, &space).unwrap();
        let yg = embed_local(&y, &space).unwrap();
        let xy = xg.matrix() * yg.matrix();
        let yx = yg.matrix() * xg.matrix();
        assert_eq!(xy, yx);
    }

    #[test]
    fn embed_rejects_dimension_mismatch() {
        let space = two_mode_space(1);
        let bad = LocalOperator::new(Region::A, DMatrix::identity(3, 3));
        assert!(matches!(
            embed_local(&bad, &space),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn partial_trace_of_product_state_recovers_factor() {
        let space = two_mode_space(1);
        // rho_A = diag(0.25, 0.75), rho_B = diag(0.6, 0.4)
        let mut m = DMatrix::<Complex64>::zeros(4, 4);
        let pa = [0.25, 0.75];
        let pb = [0.6, 0.4];
        for ia in 0..2 {
            for ib in 0..2 {
                m[(ia * 2 + ib, ia * 2 + ib)] = c64(pa[ia] * pb[ib], 0.0);
            }
        }
        let rho = DensityMatrix::new(Arc::clone(&space), m).unwrap();
        let ra = partial_trace(&rho, Region::A).unwrap();
        assert!((ra.matrix()[(0, 0)].re - 0.25).abs() < 1e-14);
        assert!((ra.matrix()[(1, 1)].re - 0.75).abs() < 1e-14);
        assert!((ra.trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn partial_trace_of_bell_like_state_is_maximally_mixed() {
        let space = two_mode_space(1);
        let inv = 1.0 / 2.0_f64.sqrt();
        let mut v = DVector::<Complex64>::zeros(4);
        v[space.index_of_occupations(&[1, 0]).unwrap()] = c64(inv, 0.0);
        v[space.index_of_occupations(&[0, 1]).unwrap()] = c64(inv, 0.0);
        let rho = DensityMatrix::from_pure(Arc::clone(&space), &v).unwrap();
        let ra = partial_trace(&rho, Region::A).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { 0.5 } else { 0.0 };
                assert!((ra.matrix()[(i, j)].re - expected).abs() < 1e-14);
                assert!(ra.matrix()[(i, j)].im.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn partial_trace_commutes_with_local_observable() {
        // tr_B[(O_A x 1) rho] == O_A tr_B[rho]
        let space = two_mode_space(1);
        let inv = 1.0 / 2.0_f64.sqrt();
        let mut v = DVector::<Complex64>::zeros(4);
        v[1] = c64(inv, 0.0);
        v[2] = c64(0.0, inv);
        let rho = DensityMatrix::from_pure(Arc::clone(&space), &v).unwrap();
        let o_a = DMatrix::from_row_slice(2, 2, &[
            c64(0.3, 0.0), c64(0.1, 0.2),
            c64(0.1, -0.2), c64(-0.5, 0.0),
        ]);
        let embedded = embed_local(&LocalOperator::new(Region::A, o_a.clone()), &space).unwrap();
        let lhs = trace_out(&(embedded.matrix() * rho.matrix()), 2, 2, Region::A);
        let rhs = &o_a * trace_out(rho.matrix(), 2, 2, Region::A);
        assert!((lhs - rhs).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn density_matrix_rejects_bad_inputs() {
        let space = two_mode_space(1);
        let mut non_herm = DMatrix::<Complex64>::identity(4, 4);
        non_herm *= c64(0.25, 0.0);
        non_herm[(0, 1)] = c64(0.5, 0.0);
        assert!(matches!(
            DensityMatrix::new(Arc::clone(&space), non_herm),
            Err(Error::NotHermitian(_))
        ));

        let bad_trace = DMatrix::<Complex64>::identity(4, 4);
        assert!(matches!(
            DensityMatrix::new(Arc::clone(&space), bad_trace),
            Err(Error::TraceNotOne(_))
        ));

        let mut not_psd = DMatrix::<Complex64>::zeros(4, 4);
        not_psd[(0, 0)] = c64(1.5, 0.0);
        not_psd[(1, 1)] = c64(-0.5, 0.0);
        assert!(matches!(
            DensityMatrix::new(Arc::clone(&space), not_psd),
            Err(Error::NotPositive(_))
        ));
    }

    #[test]
    fn global_dim_is_product_of_local_dims() {
        for cap in 1..=3u32 {
            let space = build_fock_space(
                &[
                    Mode::new(Region::A, 0, 0),
                    Mode::new(Region::A, 1, 0),
                    Mode::new(Region::B, 0, 0),
                ],
                &caps(&[(0, cap)]),
            )
            .unwrap();
            assert_eq!(
                space.dim(),
                space.local_dim(Region::A) * space.local_dim(Region::B)
            );
        }
    }
}
