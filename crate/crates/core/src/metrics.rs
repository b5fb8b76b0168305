//! Evaluation metrics: equal-power MIMO capacity via a Hermitian
//! eigendecomposition, coupling loss with path loss and shadowing, and
//! empirical CDF aggregation.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::synthesis::ChannelMatrix;
use num_complex::Complex;
use rand::Rng;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone)]
pub struct CMatrix<F> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex<F>>,
}

impl<F: Scalar> CMatrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(F::zero(), F::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(F::one(), F::zero());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex<F>>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Narrowband channel matrix of a drop: per-link delay-integrated tap
    /// sum, RX on rows.
    pub fn from_channel(channel: &ChannelMatrix<F>) -> Self {
        let mut m = Self::zeros(channel.n_rx, channel.n_tx);
        for u in 0..channel.n_rx {
            for s in 0..channel.n_tx {
                m[(u, s)] = channel.link(u, s).narrowband_sum();
            }
        }
        m
    }

    /// Gram matrix of the smaller side: H·H† if rows <= cols, else H†·H.
    /// Its eigenvalues are the squared singular values of H.
    fn small_gram(&self) -> CMatrix<F> {
        let (n, transpose) = if self.rows <= self.cols {
            (self.rows, false)
        } else {
            (self.cols, true)
        };
        let mut g = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex::new(F::zero(), F::zero());
                if !transpose {
                    for k in 0..self.cols {
                        acc += self[(i, k)] * self[(j, k)].conj();
                    }
                } else {
                    for k in 0..self.rows {
                        acc += self[(k, i)].conj() * self[(k, j)];
                    }
                }
                g[(i, j)] = acc;
            }
        }
        g
    }
}

impl<F: Scalar> std::ops::Index<(usize, usize)> for CMatrix<F> {
    type Output = Complex<F>;
    fn index(&self, (r, c): (usize, usize)) -> &Complex<F> {
        &self.data[r * self.cols + c]
    }
}

impl<F: Scalar> std::ops::IndexMut<(usize, usize)> for CMatrix<F> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<F> {
        &mut self.data[r * self.cols + c]
    }
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
/// Adequate for the small Gram matrices capacity evaluation needs.
pub fn hermitian_eigenvalues<F: Scalar>(a: &CMatrix<F>) -> Vec<F> {
    let n = a.rows;
    let mut m = a.clone();
    let eps = F::epsilon() * F::lit(64.0);
    for _sweep in 0..100 {
        let mut off = F::zero();
        let mut scale = F::zero();
        for i in 0..n {
            scale += m[(i, i)].re.abs();
            for j in (i + 1)..n {
                off += m[(i, j)].norm();
            }
        }
        if off <= eps * scale.max(F::one()) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.norm() <= eps * scale.max(F::one()) / F::lit(1e6) {
                    continue;
                }
                // Unitary 2x2 rotation J = [[c, s·e^{jφ}], [-s·e^{-jφ}, c]]
                // zeroing A[p][q], with φ the phase of A[p][q].
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let abs = apq.norm();
                let phase = apq / Complex::new(abs, F::zero());
                let zeta = (aqq - app) / (F::lit(2.0) * abs);
                let t = {
                    let sign = if zeta >= F::zero() { F::one() } else { -F::one() };
                    sign / (zeta.abs() + (F::one() + zeta * zeta).sqrt())
                };
                let c = F::one() / (F::one() + t * t).sqrt();
                let s = t * c;
                // Apply J† M J in place.
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp.scale(c) - mkq * phase.conj().scale(s);
                    m[(k, q)] = mkq.scale(c) + mkp * phase.scale(s);
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = mpk.scale(c) - mqk * phase.scale(s);
                    m[(q, k)] = mqk.scale(c) + mpk * phase.conj().scale(s);
                }
            }
        }
    }
    (0..n).map(|i| m[(i, i)].re).collect()
}

/// Equal-power MIMO capacity log2 det(I + (snr/S)·H·H†) in bps/Hz, computed
/// from the eigenvalues of the smaller-side Gram matrix.
pub fn capacity<F: Scalar>(h: &CMatrix<F>, snr: F) -> Result<F> {
    if !h.is_finite() {
        return Err(Error::NonFiniteChannel);
    }
    let per_tx = snr / F::from_usize(h.cols).unwrap();
    let gram = h.small_gram();
    let ln2 = F::lit(2.0).ln();
    Ok(hermitian_eigenvalues(&gram)
        .into_iter()
        .map(|lam| (F::one() + per_tx * lam.max(F::zero())).ln() / ln2)
        .sum())
}

/// Coupling loss in dB: sublink-averaged channel power minus path loss and
/// shadow fading. An all-zero channel yields -inf.
pub fn coupling_loss<F: Scalar>(channel: &ChannelMatrix<F>, pl_db: F, sf_db: F) -> F {
    let n = F::from_usize(channel.links.len()).unwrap();
    let mean_power = channel
        .links
        .iter()
        .map(|l| l.total_power())
        .fold(F::zero(), |a, b| a + b)
        / n;
    mean_power.linear_to_db() - pl_db - sf_db
}

/// Empirical CDF: sorted values with probabilities (i - 0.5)/n.
pub fn aggregate_cdf<F: Scalar>(samples: &[F]) -> Result<Vec<(F, F)>> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-finite metric sample"));
    let n = F::from_usize(sorted.len()).unwrap();
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let p = (F::from_usize(i).unwrap() + F::lit(0.5)) / n;
            (v, p)
        })
        .collect())
}

/// Median of a sample set through the empirical CDF.
pub fn median<F: Scalar>(samples: &[F]) -> Result<F> {
    let cdf = aggregate_cdf(samples)?;
    Ok(cdf[cdf.len() / 2].0)
}

/// Path loss plus lognormal shadowing model.
#[derive(Debug, Clone)]
pub enum PathLossKind<F> {
    /// PL(d) = intercept + 10·exponent·log10(d).
    LogDistance { intercept_db: F, exponent: F },
    /// Piecewise-linear interpolation in log10(d) over (distance, PL) knots.
    Table { points: Vec<(F, F)> },
}

#[derive(Debug, Clone)]
pub struct PathLossModel<F> {
    pub kind: PathLossKind<F>,
    pub shadowing_std_db: F,
}

impl<F: Scalar> PathLossModel<F> {
    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            PathLossKind::LogDistance { exponent, .. } => {
                if !(*exponent > F::zero()) {
                    return Err(Error::InvalidConfig("path loss exponent must be > 0".into()));
                }
            }
            PathLossKind::Table { points } => {
                if points.len() < 2 {
                    return Err(Error::InvalidConfig(
                        "path loss table needs at least 2 points".into(),
                    ));
                }
                if points.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::InvalidConfig(
                        "path loss table distances must be strictly increasing".into(),
                    ));
                }
            }
        }
        if self.shadowing_std_db < F::zero() {
            return Err(Error::InvalidConfig("shadowing std must be >= 0".into()));
        }
        Ok(())
    }

    pub fn path_loss_db(&self, d: F) -> F {
        match &self.kind {
            PathLossKind::LogDistance {
                intercept_db,
                exponent,
            } => *intercept_db + F::lit(10.0) * *exponent * d.log10(),
            PathLossKind::Table { points } => {
                let lx = d.log10();
                let first = points.first().unwrap();
                let last = points.last().unwrap();
                if d <= first.0 {
                    return first.1;
                }
                if d >= last.0 {
                    return last.1;
                }
                for w in points.windows(2) {
                    let (d0, p0) = w[0];
                    let (d1, p1) = w[1];
                    if d <= d1 {
                        let f = (lx - d0.log10()) / (d1.log10() - d0.log10());
                        return p0 + f * (p1 - p0);
                    }
                }
                last.1
            }
        }
    }

    pub fn sample_shadowing<R: Rng + ?Sized>(&self, rng: &mut R) -> F {
        F::standard_normal(rng) * self.shadowing_std_db
    }
}

/// One UE's evaluated metrics.
#[derive(Debug, Clone)]
pub struct MetricSample<F> {
    pub ue: usize,
    pub capacity_bpshz: F,
    pub coupling_loss_db: F,
    pub mode: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::{ChannelRealization, ModeFlags, Tap};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cplx(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix<f64> {
        let mut m = CMatrix::zeros(rows, cols);
        for v in &mut m.data {
            *v = cplx(f64::standard_normal(rng), f64::standard_normal(rng));
        }
        m
    }

    /// Complex determinant via Gaussian elimination with partial pivoting;
    /// test-side oracle independent of the eigensolver.
    fn det(m: &CMatrix<f64>) -> Complex<f64> {
        let n = m.rows;
        let mut a = m.clone();
        let mut d = cplx(1.0, 0.0);
        for col in 0..n {
            let mut piv = col;
            for r in (col + 1)..n {
                if a[(r, col)].norm() > a[(piv, col)].norm() {
                    piv = r;
                }
            }
            if a[(piv, col)].norm() == 0.0 {
                return cplx(0.0, 0.0);
            }
            if piv != col {
                for c in 0..n {
                    let tmp = a[(col, c)];
                    a[(col, c)] = a[(piv, c)];
                    a[(piv, c)] = tmp;
                }
                d = -d;
            }
            d *= a[(col, col)];
            for r in (col + 1)..n {
                let f = a[(r, col)] / a[(col, col)];
                for c in col..n {
                    let sub = f * a[(col, c)];
                    a[(r, c)] -= sub;
                }
            }
        }
        d
    }

    #[test]
    fn capacity_identity_two() {
        let c = capacity(&CMatrix::<f64>::identity(2), 10.0).unwrap();
        assert!((c - 5.169925001442312).abs() < 1e-9, "capacity {c}");
    }

    #[test]
    fn capacity_zero_matrix() {
        let c = capacity(&CMatrix::zeros(3, 4), 10.0).unwrap();
        assert_eq!(c, 0.0);
    }

    #[test]
    fn capacity_rank_one() {
        // Rank-1 H with squared Frobenius norm S·U: capacity log2(1+snr·U).
        let (u, s) = (4usize, 4usize);
        let mut h = CMatrix::zeros(u, s);
        let scale = ((u * s) as f64 / s as f64).sqrt(); // row vector norm²=S·U
        for c in 0..s {
            h[(0, c)] = cplx(scale, 0.0);
        }
        let cap = capacity(&h, 10.0).unwrap();
        let expect = (1.0f64 + 10.0 * u as f64).log2();
        assert!((cap - expect).abs() < 1e-9, "cap {cap} vs {expect}");
    }

    #[test]
    fn capacity_matches_determinant_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        for _ in 0..50 {
            let h = random_matrix(&mut rng, 4, 4);
            let snr = 10.0;
            let cap = capacity(&h, snr).unwrap();
            // det(I + (snr/S)·H·H†) evaluated directly.
            let mut a = CMatrix::identity(4);
            for i in 0..4 {
                for j in 0..4 {
                    let mut g = cplx(0.0, 0.0);
                    for k in 0..4 {
                        g += h[(i, k)] * h[(j, k)].conj();
                    }
                    a[(i, j)] += g * cplx(snr / 4.0, 0.0);
                }
            }
            let oracle = det(&a).re.log2();
            assert!((cap - oracle).abs() < 1e-8, "cap {cap} vs det {oracle}");
        }
    }

    #[test]
    fn capacity_unitary_invariance() {
        // Random 8x8: multiplying by a unitary (QR of a random matrix) must
        // not change capacity.
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..100 {
            let h = random_matrix(&mut rng, 8, 8);
            let q = gram_schmidt_unitary(&random_matrix(&mut rng, 8, 8));
            let mut qh = CMatrix::zeros(8, 8);
            for i in 0..8 {
                for j in 0..8 {
                    let mut a = cplx(0.0, 0.0);
                    for k in 0..8 {
                        a += q[(i, k)] * h[(k, j)];
                    }
                    qh[(i, j)] = a;
                }
            }
            let c0 = capacity(&h, 10.0).unwrap();
            let c1 = capacity(&qh, 10.0).unwrap();
            assert!((c0 - c1).abs() < 1e-9, "{c0} vs {c1}");
        }
    }

    fn gram_schmidt_unitary(m: &CMatrix<f64>) -> CMatrix<f64> {
        let n = m.rows;
        let mut q = m.clone();
        for col in 0..n {
            for prev in 0..col {
                let mut proj = cplx(0.0, 0.0);
                for r in 0..n {
                    proj += q[(r, prev)].conj() * q[(r, col)];
                }
                for r in 0..n {
                    let sub = proj * q[(r, prev)];
                    q[(r, col)] -= sub;
                }
            }
            let norm: f64 = (0..n).map(|r| q[(r, col)].norm_sqr()).sum::<f64>().sqrt();
            for r in 0..n {
                q[(r, col)] /= cplx(norm, 0.0);
            }
        }
        q
    }

    #[test]
    fn capacity_monotone_in_snr() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let h = random_matrix(&mut rng, 4, 6);
        let mut last = 0.0;
        for snr in [0.1, 0.5, 1.0, 5.0, 10.0, 100.0] {
            let c = capacity(&h, snr).unwrap();
            assert!(c >= last);
            last = c;
        }
    }

    #[test]
    fn capacity_rejects_non_finite() {
        let mut h = CMatrix::<f64>::identity(2);
        h[(0, 1)] = cplx(f64::NAN, 0.0);
        assert!(matches!(capacity(&h, 10.0), Err(Error::NonFiniteChannel)));
    }

    #[test]
    fn wide_and_tall_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        let h = random_matrix(&mut rng, 3, 7);
        // Transposing swaps the Gram side; singular values are shared, so
        // capacities agree after adjusting the per-antenna power split.
        let c_wide = capacity(&h, 7.0).unwrap();
        let mut ht = CMatrix::zeros(7, 3);
        for i in 0..3 {
            for j in 0..7 {
                ht[(j, i)] = h[(i, j)];
            }
        }
        let c_tall = capacity(&ht, 3.0).unwrap();
        assert!((c_wide - c_tall).abs() < 1e-9);
    }

    fn channel_from_taps(links: Vec<Vec<Tap<f64>>>, n_rx: usize, n_tx: usize) -> ChannelMatrix<f64> {
        ChannelMatrix {
            n_rx,
            n_tx,
            links: links
                .into_iter()
                .map(|taps| ChannelRealization { taps })
                .collect(),
            drop_id: 0,
            time: 0.0,
            flags: ModeFlags::default(),
        }
    }

    #[test]
    fn coupling_loss_unit_taps() {
        let tap = Tap {
            delay: 1e-7,
            amplitude: cplx(1.0, 0.0),
        };
        let ch = channel_from_taps(vec![vec![tap]; 4], 2, 2);
        let cl = coupling_loss(&ch, 80.0, 0.0);
        assert!((cl - (-80.0)).abs() < 1e-12);
        // Doubling every amplitude adds 6.02 dB.
        let tap2 = Tap {
            delay: 1e-7,
            amplitude: cplx(2.0, 0.0),
        };
        let ch2 = channel_from_taps(vec![vec![tap2]; 4], 2, 2);
        let cl2 = coupling_loss(&ch2, 80.0, 0.0);
        assert!((cl2 - cl - 6.020599913279624).abs() < 1e-9);
    }

    #[test]
    fn coupling_loss_matches_brute_force_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        let links: Vec<Vec<Tap<f64>>> = (0..6)
            .map(|_| {
                (0..5)
                    .map(|k| Tap {
                        delay: k as f64 * 1e-8,
                        amplitude: cplx(
                            f64::standard_normal(&mut rng),
                            f64::standard_normal(&mut rng),
                        ),
                    })
                    .collect()
            })
            .collect();
        let brute: f64 = links
            .iter()
            .map(|taps| taps.iter().map(|t| t.amplitude.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            / 6.0;
        let ch = channel_from_taps(links, 2, 3);
        let cl = coupling_loss(&ch, 70.0, 2.5);
        assert!((cl - (10.0 * brute.log10() - 70.0 - 2.5)).abs() < 1e-10);
    }

    #[test]
    fn coupling_loss_zero_channel_is_neg_inf() {
        let ch = channel_from_taps(vec![vec![]; 4], 2, 2);
        assert!(coupling_loss(&ch, 80.0, 0.0).is_infinite());
    }

    #[test]
    fn cdf_basics() {
        let cdf = aggregate_cdf(&[2.0, 1.0, 3.0]).unwrap();
        assert_eq!(cdf[0], (1.0, 1.0 / 6.0));
        assert_eq!(cdf[1], (2.0, 3.0 / 6.0));
        assert_eq!(cdf[2], (3.0, 5.0 / 6.0));
        assert!(cdf.windows(2).all(|w| w[1].1 >= w[0].1 && w[1].0 >= w[0].0));
        assert!(aggregate_cdf::<f64>(&[]).is_err());
    }

    #[test]
    fn cdf_median_of_normal() {
        let mut rng = ChaCha8Rng::seed_from_u64(65);
        let samples: Vec<f64> = (0..100_000)
            .map(|_| f64::standard_normal(&mut rng))
            .collect();
        let med = median(&samples).unwrap();
        assert!(med.abs() < 0.02, "median {med}");
    }

    #[test]
    fn path_loss_models() {
        let m: PathLossModel<f64> = PathLossModel {
            kind: PathLossKind::LogDistance {
                intercept_db: 32.4,
                exponent: 2.1,
            },
            shadowing_std_db: 4.0,
        };
        m.validate().unwrap();
        assert!((m.path_loss_db(100.0) - (32.4 + 21.0 * 2.0)).abs() < 1e-10);
        let t: PathLossModel<f64> = PathLossModel {
            kind: PathLossKind::Table {
                points: vec![(1.0, 40.0), (100.0, 80.0)],
            },
            shadowing_std_db: 0.0,
        };
        t.validate().unwrap();
        assert!((t.path_loss_db(10.0) - 60.0).abs() < 1e-10);
        assert_eq!(t.path_loss_db(0.5), 40.0);
        assert_eq!(t.path_loss_db(1e4), 80.0);
        // Coupling loss shifts by exactly -dPL.
        let tap = Tap {
            delay: 0.0,
            amplitude: cplx(0.3, 0.4),
        };
        let ch = channel_from_taps(vec![vec![tap]; 1], 1, 1);
        let a = coupling_loss(&ch, 60.0, 0.0);
        let b = coupling_loss(&ch, 75.0, 0.0);
        assert!((a - b - 15.0).abs() < 1e-12);
    }
}
