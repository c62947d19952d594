//! Dense symmetric eigenvalues and spectrum bookkeeping.
//!
//! Blocks are reduced to tridiagonal form with Householder reflections and
//! the tridiagonal eigenvalues are found with the implicit-shift QL method.
//! Only eigenvalues are computed.

use crate::basis::HalfInt;
use crate::error::{Error, Result};
use crate::hamiltonian::{check_couplings, GeneratorPair};
use crate::parallel::try_map_indexed;
use crate::sectors::SectorBlocks;

/// Tolerance on `|A - A^T|` accepted by [`eigvals_symmetric`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Default grouping tolerance for degeneracy counting on the normalized energy scale.
pub const DEFAULT_DEGENERACY_TOLERANCE: f64 = 1e-8;

const MAX_QL_SWEEPS: usize = 60;

/// Square row-major matrix; only symmetric contents are meaningful to the solver.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        Ok(DenseMatrix { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::InvalidArgument("matrix rows must be square".into()));
            }
            data.extend_from_slice(row);
        }
        Ok(DenseMatrix { n, data })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.n + col] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_asymmetry(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in r + 1..n {
                worst = worst.max((self.data[r * n + c] - self.data[c * n + r]).abs());
            }
        }
        worst
    }
}

/// All eigenvalues of a real symmetric matrix in ascending order.
pub fn eigvals_symmetric(matrix: &DenseMatrix) -> Result<Vec<f64>> {
    let asymmetry = matrix.max_asymmetry();
    if asymmetry.is_nan() || asymmetry > SYMMETRY_TOLERANCE {
        return Err(Error::NotSymmetric { asymmetry });
    }
    let n = matrix.size();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut work = matrix.data.clone();
    let (mut diag, mut off) = tridiagonalize(&mut work, n);
    tridiagonal_ql(&mut diag, &mut off)?;
    diag.sort_by(f64::total_cmp);
    Ok(diag)
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let tail: f64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(x, y)| x * y)
        .sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Scales `row` (the strict lower part of one matrix row) into a Householder
/// vector in place. Returns the subdiagonal element and `h = |u|^2 / 2`, or
/// `None` for `h` when no reflection is needed.
fn householder(row: &mut [f64]) -> (f64, Option<f64>) {
    let l = row.len() - 1;
    if l == 0 {
        return (row[0], None);
    }
    let scale: f64 = row.iter().map(|x| x.abs()).sum();
    if scale == 0.0 {
        return (row[l], None);
    }
    let mut h = 0.0;
    for x in row.iter_mut() {
        *x /= scale;
        h += *x * *x;
    }
    let f = row[l];
    let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
    h -= f * g;
    row[l] = f - g;
    (scale * g, Some(h))
}

/// Adds row `j` of the lower triangle (`row.len() == j + 1`) to `p += A u`.
#[inline]
fn accumulate_symv(p: &mut [f64], row: &[f64], u: &[f64]) {
    let j = row.len() - 1;
    let uj = u[j];
    p[j] += dot(&row[..j], &u[..j]) + row[j] * uj;
    for (pk, &rk) in p[..j].iter_mut().zip(&row[..j]) {
        *pk += rk * uj;
    }
}

/// `row -= u[j] q + q[j] u` over `0..=j`.
#[inline]
fn rank2_update(row: &mut [f64], u: &[f64], q: &[f64]) {
    let j = row.len() - 1;
    let (uj, qj) = (u[j], q[j]);
    for ((a, &qk), &uk) in row.iter_mut().zip(q).zip(u) {
        *a -= uj * qk + qj * uk;
    }
}

/// Householder reduction of the lower triangle of `a` (row-major, `n x n`).
/// Returns the diagonal and the subdiagonal, with `off[i]` coupling `i - 1` and `i`.
///
/// The rank-2 update of step `i` and the matrix-vector product of step `i - 1`
/// share one pass over the remaining triangle.
fn tridiagonalize(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut off = vec![0.0; n];
    if n < 2 {
        return (a.iter().take(n).copied().collect(), off);
    }
    let mut p = vec![0.0; n];
    let mut p_next = vec![0.0; n];

    let last = n - 1;
    let (o, mut h) = householder(&mut a[last * n..last * n + last]);
    off[last] = o;
    if h.is_some() {
        let (head, tail) = a.split_at_mut(last * n);
        let u = &tail[..last];
        p[..last].fill(0.0);
        for j in 0..last {
            accumulate_symv(&mut p[..last], &head[j * n..j * n + j + 1], u);
        }
    }

    for i in (1..n).rev() {
        let next = i - 1;
        let (head, tail) = a.split_at_mut(i * n);
        let u = &tail[..i];
        let (upper, rest) = head.split_at_mut(next * n);
        let row_next = &mut rest[..next + 1];

        let Some(h_i) = h else {
            if next >= 1 {
                let (o, h_next) = householder(&mut row_next[..next]);
                off[next] = o;
                h = h_next;
                if h.is_some() {
                    let u_next = &row_next[..next];
                    p[..next].fill(0.0);
                    for j in 0..next {
                        accumulate_symv(&mut p[..next], &upper[j * n..j * n + j + 1], u_next);
                    }
                }
            }
            continue;
        };

        // q = A u / h - (u . A u / 2h^2) u
        let q = &mut p[..i];
        let inv_h = 1.0 / h_i;
        let mut f = 0.0;
        for (qj, &uj) in q.iter_mut().zip(u) {
            *qj *= inv_h;
            f += *qj * uj;
        }
        let hh = f / (h_i + h_i);
        for (qj, &uj) in q.iter_mut().zip(u) {
            *qj -= hh * uj;
        }
        let q = &p[..i];

        rank2_update(row_next, u, q);
        if next == 0 {
            break;
        }
        let (o, h_next) = householder(&mut row_next[..next]);
        off[next] = o;
        let u_next = &row_next[..next];
        if h_next.is_some() {
            p_next[..next].fill(0.0);
            for j in 0..next {
                let row = &mut upper[j * n..j * n + j + 1];
                rank2_update(row, u, q);
                accumulate_symv(&mut p_next[..next], row, u_next);
            }
        } else {
            for j in 0..next {
                rank2_update(&mut upper[j * n..j * n + j + 1], u, q);
            }
        }
        h = h_next;
        std::mem::swap(&mut p, &mut p_next);
    }
    let diag = (0..n).map(|i| a[i * n + i]).collect();
    (diag, off)
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix; eigenvalues land in `d`.
fn tridiagonal_ql(d: &mut [f64], off: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    let e = off;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::NoConvergence {
                    size: n,
                    residual: e[l].abs(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = (f * f + g * g).sqrt();
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Sorted eigenvalues with the invariant sector each one came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub energies: Vec<f64>,
    /// Eigenvalue of `Inv` for each entry of `energies`.
    pub sector_labels: Vec<HalfInt>,
}

impl Spectrum {
    /// Merges `(energy, label)` pairs into canonical order: energy first, label to break ties.
    pub fn from_pairs(mut pairs: Vec<(f64, HalfInt)>) -> Self {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let (energies, sector_labels) = pairs.into_iter().unzip();
        Spectrum {
            energies,
            sector_labels,
        }
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn max(&self) -> Option<f64> {
        self.energies.last().copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, HalfInt)> + '_ {
        self.energies
            .iter()
            .copied()
            .zip(self.sector_labels.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    /// Mean of the grouped eigenvalues.
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracySummary {
    pub distinct_count: usize,
    pub levels: Vec<Level>,
}

/// Single-linkage grouping of the sorted energies: neighbours closer than `tol` share a level.
pub fn degeneracy_summary(energies: &[f64], tol: f64) -> Result<DegeneracySummary> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "degeneracy tolerance must be positive, got {tol}"
        )));
    }
    debug_assert!(energies.windows(2).all(|w| w[0] <= w[1]));
    let mut levels: Vec<Level> = Vec::new();
    let mut group_sum = 0.0;
    let mut group_len = 0usize;
    let mut previous = f64::NAN;
    for &e in energies {
        if group_len > 0 && e - previous > tol {
            levels.push(Level {
                value: group_sum / group_len as f64,
                multiplicity: group_len,
            });
            group_sum = 0.0;
            group_len = 0;
        }
        group_sum += e;
        group_len += 1;
        previous = e;
    }
    if group_len > 0 {
        levels.push(Level {
            value: group_sum / group_len as f64,
            multiplicity: group_len,
        });
    }
    Ok(DegeneracySummary {
        distinct_count: levels.len(),
        levels,
    })
}

/// Spectrum of `G * h_g + J * h_j` from per-sector solves.
pub fn full_spectrum(pair: &GeneratorPair, g: f64, j: f64) -> Result<Spectrum> {
    check_couplings(g, j)?;
    let blocks = SectorBlocks::new(pair)?;
    spectrum_of_sectors(&blocks, g, j, None)
}

/// Merged spectrum of the selected sectors (all of them for `None`).
pub fn spectrum_of_sectors(
    blocks: &SectorBlocks,
    g: f64,
    j: f64,
    selection: Option<&[usize]>,
) -> Result<Spectrum> {
    let all: Vec<usize>;
    let selection = match selection {
        Some(s) => s,
        None => {
            all = (0..blocks.sectors().len()).collect();
            &all
        }
    };
    let per_sector = try_map_indexed(selection.len(), |i| {
        blocks.sector_eigenvalues(selection[i], g, j)
    })?;
    let mut pairs = Vec::with_capacity(per_sector.iter().map(Vec::len).sum());
    for (&idx, values) in selection.iter().zip(per_sector) {
        let label = blocks.sectors()[idx].inv_value();
        pairs.extend(values.into_iter().map(|e| (e, label)));
    }
    Ok(Spectrum::from_pairs(pairs))
}

/// Whole-matrix eigenvalues without any sector splitting.
pub fn unsplit_eigenvalues(pair: &GeneratorPair, g: f64, j: f64) -> Result<Vec<f64>> {
    let h = pair.assemble(g, j)?;
    eigvals_symmetric(&DenseMatrix::from_row_major(h.dim(), h.to_dense())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn oracle(m: &DenseMatrix) -> Vec<f64> {
        let n = m.size();
        let mat = nalgebra::DMatrix::from_row_slice(n, n, m.as_slice());
        let mut ev: Vec<f64> = mat.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(n);
        for r in 0..n {
            for c in 0..=r {
                let v: f64 = rng.gen_range(-1.0..1.0);
                m.set(r, c, v);
                m.set(c, r, v);
            }
        }
        m
    }

    #[test]
    fn pauli_x() {
        let m = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let ev = eigvals_symmetric(&m).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn one_by_one_and_empty() {
        let m = DenseMatrix::from_rows(&[vec![0.0]]).unwrap();
        assert_eq!(eigvals_symmetric(&m).unwrap(), vec![0.0]);
        assert!(eigvals_symmetric(&DenseMatrix::zeros(0))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn open_three_chain_block() {
        let m = DenseMatrix::from_rows(&[
            vec![0.0, -1.0, 0.0],
            vec![-1.0, 0.0, -1.0],
            vec![0.0, -1.0, 0.0],
        ])
        .unwrap();
        let ev = eigvals_symmetric(&m).unwrap();
        let s = 2f64.sqrt();
        for (got, want) in ev.iter().zip([-s, 0.0, s]) {
            assert!((got - want).abs() < 1e-14, "{ev:?}");
        }
    }

    #[test]
    fn rejects_asymmetric_input() {
        let m = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![0.5, 0.0]]).unwrap();
        assert!(matches!(
            eigvals_symmetric(&m),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn handles_zero_and_diagonal_matrices() {
        assert_eq!(
            eigvals_symmetric(&DenseMatrix::zeros(5)).unwrap(),
            vec![0.0; 5]
        );
        let mut m = DenseMatrix::zeros(4);
        for (i, v) in [3.0, -1.0, 2.0, -1.0].into_iter().enumerate() {
            m.set(i, i, v);
        }
        assert_eq!(eigvals_symmetric(&m).unwrap(), vec![-1.0, -1.0, 2.0, 3.0]);
    }

    #[test]
    fn matches_nalgebra_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2usize, 3, 5, 17, 64, 130] {
            let m = random_symmetric(n, &mut rng);
            let ours = eigvals_symmetric(&m).unwrap();
            let theirs = oracle(&m);
            let scale = theirs.iter().fold(1.0f64, |a, x| a.max(x.abs()));
            for (a, b) in ours.iter().zip(&theirs) {
                assert!((a - b).abs() < 1e-10 * scale, "n = {n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn highly_degenerate_spectrum() {
        // block-diagonal copies of the same 2x2 flip-flop
        let n = 40;
        let mut m = DenseMatrix::zeros(n);
        for b in 0..n / 2 {
            m.set(2 * b, 2 * b + 1, 1.0);
            m.set(2 * b + 1, 2 * b, 1.0);
        }
        let ev = eigvals_symmetric(&m).unwrap();
        assert!(ev[..n / 2].iter().all(|x| (x + 1.0).abs() < 1e-14));
        assert!(ev[n / 2..].iter().all(|x| (x - 1.0).abs() < 1e-14));
    }

    #[test]
    fn degeneracy_examples() {
        let s = degeneracy_summary(&[0.0; 4], 1e-8).unwrap();
        assert_eq!(s.distinct_count, 1);
        assert_eq!(
            s.levels,
            vec![Level {
                value: 0.0,
                multiplicity: 4
            }]
        );
        let s = degeneracy_summary(&[-1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0], 1e-8).unwrap();
        assert_eq!(s.distinct_count, 3);
        assert_eq!(
            s.levels.iter().map(|l| l.multiplicity).collect::<Vec<_>>(),
            vec![2, 4, 2]
        );
        assert!(degeneracy_summary(&[0.0], 0.0).is_err());
        assert_eq!(degeneracy_summary(&[], 1e-8).unwrap().distinct_count, 0);
    }

    #[test]
    fn single_linkage_chains_close_values() {
        let s = degeneracy_summary(&[0.0, 0.6e-8, 1.2e-8, 1.0], 1e-8).unwrap();
        assert_eq!(s.distinct_count, 2);
    }

    proptest! {
        #[test]
        fn degeneracy_levels_partition_and_separate(
            mut values in proptest::collection::vec(-5.0f64..5.0, 0..60),
            tol in 1e-6f64..0.5,
        ) {
            values.sort_by(f64::total_cmp);
            let s = degeneracy_summary(&values, tol).unwrap();
            prop_assert_eq!(s.levels.iter().map(|l| l.multiplicity).sum::<usize>(), values.len());
            for w in s.levels.windows(2) {
                prop_assert!(w[1].value - w[0].value > tol);
            }
        }

        #[test]
        fn trace_and_count_preserved(seed in any::<u64>(), n in 1usize..40) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_symmetric(n, &mut rng);
            let ev = eigvals_symmetric(&m).unwrap();
            prop_assert_eq!(ev.len(), n);
            let trace: f64 = (0..n).map(|i| m.get(i, i)).sum();
            prop_assert!((ev.iter().sum::<f64>() - trace).abs() < 1e-10 * n as f64);
            prop_assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
