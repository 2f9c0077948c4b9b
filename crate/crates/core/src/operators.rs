//! Finite sections of the multiplier operators `M_φ f = φ * f`.
//!
//! Matrices are indexed by coefficient indices and act on column vectors of
//! quaternions from the left, which makes them right-linear:
//! `M(vλ) = (Mv)λ`. Two coefficient models are available. The Toeplitz model
//! is a truncation of the true operator, and identities are only compared
//! on columns whose images stay inside the computed rows. The periodic model
//! works in the sampled window of [`crate::periodic`], where the algebra is
//! finite and exact.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::periodic::PeriodicWindow;
use crate::quaternion::Quaternion;
use crate::series::{SliceLaurentSeries, Support};

const POWER_ITERATIONS: usize = 50;
const POWER_SEED: u64 = 0x51_1ce;

#[derive(Clone, Debug, PartialEq)]
pub struct QuaternionMatrix {
    rows: Support,
    cols: Support,
    data: Vec<Quaternion>,
    truncated: bool,
}

impl QuaternionMatrix {
    pub fn zeros(rows: Support, cols: Support) -> Self {
        QuaternionMatrix { rows, cols, data: vec![Quaternion::ZERO; rows.len() * cols.len()], truncated: false }
    }

    pub fn identity(support: Support) -> Self {
        let mut m = QuaternionMatrix::zeros(support, support);
        for n in support.iter() {
            m.set(n, n, Quaternion::ONE);
        }
        m
    }

    pub fn from_fn(rows: Support, cols: Support, mut f: impl FnMut(i64, i64) -> Quaternion) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for i in rows.iter() {
            for j in cols.iter() {
                data.push(f(i, j));
            }
        }
        QuaternionMatrix { rows, cols, data, truncated: false }
    }

    pub fn rows(&self) -> Support {
        self.rows
    }

    pub fn cols(&self) -> Support {
        self.cols
    }

    /// Whether the row range cuts off part of the true image of some column.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    #[inline]
    fn idx(&self, i: i64, j: i64) -> usize {
        (i - self.rows.lo) as usize * self.cols.len() + (j - self.cols.lo) as usize
    }

    /// Entry at coefficient indices `(i, j)`; zero outside the ranges.
    pub fn get(&self, i: i64, j: i64) -> Quaternion {
        if self.rows.contains(i) && self.cols.contains(j) {
            self.data[self.idx(i, j)]
        } else {
            Quaternion::ZERO
        }
    }

    pub fn set(&mut self, i: i64, j: i64, v: Quaternion) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> QuaternionMatrix {
        let mut m = QuaternionMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj());
        m.truncated = self.truncated;
        m
    }

    /// `(Mv)ᵢ = Σⱼ Mᵢⱼ vⱼ` for `v` supported inside the column range.
    pub fn apply(&self, v: &SliceLaurentSeries) -> Result<SliceLaurentSeries> {
        let s = v.support();
        if !self.cols.contains_support(&s) && !v.is_zero() {
            return Err(Error::AmbientMismatch {
                lo: s.lo,
                hi: s.hi,
                ambient_lo: self.cols.lo,
                ambient_hi: self.cols.hi,
            });
        }
        Ok(SliceLaurentSeries::from_fn(self.rows, |i| self.cols.iter().map(|j| self.get(i, j) * v.coeff(j)).sum()))
    }

    pub fn mul(&self, other: &QuaternionMatrix) -> Result<QuaternionMatrix> {
        if self.cols != other.rows {
            return Err(Error::AmbientMismatch {
                lo: other.rows.lo,
                hi: other.rows.hi,
                ambient_lo: self.cols.lo,
                ambient_hi: self.cols.hi,
            });
        }
        let mut out = QuaternionMatrix::zeros(self.rows, other.cols);
        let (n, m) = (self.cols.len(), other.cols.len());
        for r in 0..self.rows.len() {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == Quaternion::ZERO {
                    continue;
                }
                for c in 0..m {
                    out.data[r * m + c] += a * other.data[k * m + c];
                }
            }
        }
        out.truncated = self.truncated || other.truncated;
        Ok(out)
    }

    pub fn sub(&self, other: &QuaternionMatrix) -> Result<QuaternionMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::AmbientMismatch {
                lo: other.rows.lo,
                hi: other.rows.hi,
                ambient_lo: self.rows.lo,
                ambient_hi: self.rows.hi,
            });
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect();
        Ok(QuaternionMatrix { rows: self.rows, cols: self.cols, data, truncated: self.truncated || other.truncated })
    }

    /// Block with the given row and column ranges; entries outside `self` read as zero.
    pub fn block(&self, rows: Support, cols: Support) -> QuaternionMatrix {
        QuaternionMatrix::from_fn(rows, cols, |i, j| self.get(i, j))
    }

    pub fn column(&self, j: i64) -> SliceLaurentSeries {
        SliceLaurentSeries::from_fn(self.rows, |i| self.get(i, j))
    }

    /// Largest column 2-norm; bounds the operator norm within a factor `√cols`.
    pub fn column_norm(&self) -> f64 {
        self.cols.iter().map(|j| self.column(j).l2_norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Power iteration on `M†M` from a seeded random start; a lower estimate of `‖M‖`.
    pub fn operator_norm_estimate(&self) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(POWER_SEED);
        let mut v = SliceLaurentSeries::from_fn(self.cols, |_| Quaternion::random(&mut rng));
        let adj = self.adjoint();
        let mut estimate = 0.0;
        for _ in 0..POWER_ITERATIONS {
            let norm = v.l2_norm();
            if norm == 0.0 {
                return 0.0;
            }
            v = v.scale(1.0 / norm);
            let mv = self.apply(&v).expect("vector on column range");
            estimate = mv.l2_norm();
            v = adj.apply(&mv).expect("vector on row range").restrict(self.cols);
        }
        estimate
    }
}

/// Toeplitz section `Mᵢⱼ = a_{i-j}` of `M_φ` from `domain` to `codomain`.
pub fn multiplier_matrix(phi: &SliceLaurentSeries, domain: Support, codomain: Support) -> QuaternionMatrix {
    let mut m = QuaternionMatrix::from_fn(codomain, domain, |i, j| phi.coeff(i - j));
    m.truncated = !codomain.contains_support(&domain.sum(&phi.support()));
    m
}

/// `M_φ` in the sampled model: column `j` is the folded coefficient vector of `qʲ * φ`.
pub fn periodic_multiplier(phi: &SliceLaurentSeries, window: PeriodicWindow) -> QuaternionMatrix {
    let s = window.support();
    let folded = window.fold(phi);
    let mut m = QuaternionMatrix::zeros(s, s);
    for j in s.iter() {
        let col = window.fold(&folded.shift(j));
        for i in s.iter() {
            m.set(i, j, col.coeff(i));
        }
    }
    m
}

/// Which finite model of `M_φ` a residual is evaluated in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoefficientModel {
    /// Truncated Toeplitz sections, compared on the columns of `domain`.
    Toeplitz { domain: Support },
    /// The exact finite algebra on a sampled window.
    Periodic { window: PeriodicWindow },
}

/// Square matrices of the model plus the columns on which identities are compared.
pub(crate) struct ModelFrame {
    pub ambient: Support,
    pub columns: Support,
    pub periodic: Option<PeriodicWindow>,
}

impl ModelFrame {
    /// `reach` bounds how far products used by the caller can move an index.
    pub fn new(model: CoefficientModel, reach: i64) -> Self {
        match model {
            CoefficientModel::Toeplitz { domain } => {
                ModelFrame { ambient: domain.widen(reach), columns: domain, periodic: None }
            }
            CoefficientModel::Periodic { window } => {
                ModelFrame { ambient: window.support(), columns: window.support(), periodic: Some(window) }
            }
        }
    }

    pub fn multiplier(&self, phi: &SliceLaurentSeries) -> QuaternionMatrix {
        match self.periodic {
            Some(w) => periodic_multiplier(phi, w),
            None => multiplier_matrix(phi, self.ambient, self.ambient),
        }
    }

    /// Column norm of `m` over the compared columns.
    pub fn residual(&self, m: &QuaternionMatrix) -> f64 {
        m.block(self.ambient, self.columns).column_norm()
    }
}

pub(crate) fn support_radius(phi: &SliceLaurentSeries) -> i64 {
    phi.n_min().abs().max(phi.n_max().abs())
}

/// `max | ‖M_φ eₙ‖ - 1 | + ‖M†M - Id‖` over `domain`, with the codomain sized to avoid truncation.
pub fn isometry_residual(phi: &SliceLaurentSeries, domain: Support) -> Result<f64> {
    let codomain = domain.sum(&phi.support()).union(&domain);
    let m = multiplier_matrix(phi, domain, codomain);
    let columns = domain.iter().map(|j| (m.column(j).l2_norm() - 1.0).abs()).fold(0.0, f64::max);
    let gram = m.adjoint().mul(&m)?;
    Ok(columns + gram.sub(&QuaternionMatrix::identity(domain))?.column_norm())
}

/// `‖M² - M‖ + ‖M† - M‖` in the given model.
pub fn projection_residual(phi: &SliceLaurentSeries, model: CoefficientModel) -> Result<f64> {
    let frame = ModelFrame::new(model, support_radius(phi));
    let m = frame.multiplier(phi);
    let idem = m.mul(&m)?.sub(&m)?;
    let adj = m.adjoint().sub(&m)?;
    Ok(frame.residual(&idem) + frame.residual(&adj))
}

/// Toeplitz matrix of `q^k` on a square range.
pub fn shift_matrix(support: Support, k: i64) -> QuaternionMatrix {
    multiplier_matrix(&SliceLaurentSeries::monomial(k, Quaternion::ONE), support, support)
}
