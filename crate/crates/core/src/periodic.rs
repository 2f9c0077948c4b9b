//! Sampled model of slice functions that are only known at finitely many
//! boundary spheres.
//!
//! A window `[-n, n-1]` of `M = 2n` coefficients is paired with the angles
//! `θₖ = π(2k+1)/M`. At those angles `e^{MθI} = -1`, so any series can be
//! folded into the window with a sign flip per wrap without changing its
//! values there. Star products, tilde and conjugation commute with folding,
//! which turns the window into an exact finite algebra of node values.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quaternion::{exp_unit, Quaternion, UnitImaginary};
use crate::series::{SliceLaurentSeries, Support};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PeriodicWindow {
    half: i64,
}

impl PeriodicWindow {
    pub fn new(half: i64) -> Result<Self> {
        if half < 1 {
            return Err(Error::InvalidGrid(format!("periodic window needs half-width >= 1, got {half}")));
        }
        Ok(PeriodicWindow { half })
    }

    /// Window whose upper-half-plane angles are the midpoint t-nodes of an `n_t` grid.
    pub fn for_grid(n_t: usize) -> Self {
        PeriodicWindow { half: n_t as i64 }
    }

    pub fn half(&self) -> i64 {
        self.half
    }

    pub fn period(&self) -> usize {
        2 * self.half as usize
    }

    pub fn support(&self) -> Support {
        Support::new(-self.half, self.half - 1)
    }

    /// Node angles in `(0, 2π)`.
    pub fn angles(&self) -> Vec<f64> {
        let m = self.period() as f64;
        (0..self.period()).map(|k| PI * (2 * k + 1) as f64 / m).collect()
    }

    /// Wraps every coefficient into the window, negating once per period crossed.
    pub fn fold(&self, f: &SliceLaurentSeries) -> SliceLaurentSeries {
        let m = 2 * self.half;
        let mut out = vec![Quaternion::ZERO; m as usize];
        for (n, a) in f.iter() {
            let shifted = n + self.half;
            let wraps = shifted.div_euclid(m);
            let slot = shifted.rem_euclid(m) as usize;
            if wraps % 2 == 0 {
                out[slot] += a;
            } else {
                out[slot] -= a;
            }
        }
        SliceLaurentSeries::new(-self.half, out)
    }

    pub fn star(&self, f: &SliceLaurentSeries, g: &SliceLaurentSeries) -> SliceLaurentSeries {
        self.fold(&self.fold(f).convolve(&self.fold(g)))
    }

    pub fn tilde(&self, f: &SliceLaurentSeries) -> SliceLaurentSeries {
        self.fold(&f.tilde())
    }

    pub fn symmetrize(&self, f: &SliceLaurentSeries) -> SliceLaurentSeries {
        self.star(&f.conjugate(), f)
    }

    /// Interpolates a slice function from its values on the slice through `unit`.
    ///
    /// `value(t, I)` is queried for `t ∈ (0, π)` at `I = ±unit`; angles past `π`
    /// are reached through `e^{θI} = e^{(2π-θ)(-I)}`.
    pub fn fit(
        &self,
        unit: &UnitImaginary,
        mut value: impl FnMut(f64, &UnitImaginary) -> Quaternion,
    ) -> SliceLaurentSeries {
        let angles = self.angles();
        let neg = -*unit;
        let samples: Vec<Quaternion> =
            angles.iter().map(|&th| if th < PI { value(th, unit) } else { value(2.0 * PI - th, &neg) }).collect();
        let m = self.period() as f64;
        SliceLaurentSeries::from_fn(self.support(), |n| {
            let mut acc = Quaternion::ZERO;
            for (&th, &v) in angles.iter().zip(&samples) {
                acc += exp_unit(-(n as f64) * th, unit) * v;
            }
            acc / m
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::eval_boundary;
    use crate::sampling::random_series;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fold_preserves_node_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = PeriodicWindow::new(4).unwrap();
        let f = random_series(&mut rng, Support::new(-13, 17));
        let folded = w.fold(&f);
        assert_eq!(folded.support(), w.support());
        let u = UnitImaginary::random(&mut rng);
        for th in w.angles() {
            let q = exp_unit(th, &u);
            assert!((eval_boundary(&f, q) - eval_boundary(&folded, q)).norm() < 1e-12);
        }
    }

    #[test]
    fn fold_signs() {
        let w = PeriodicWindow::new(2).unwrap();
        let f = SliceLaurentSeries::monomial(2, Quaternion::I);
        assert_eq!(w.fold(&f).coeff(-2), -Quaternion::I);
        let f = SliceLaurentSeries::monomial(-6, Quaternion::J);
        assert_eq!(w.fold(&f).coeff(-2), -Quaternion::J);
        let f = SliceLaurentSeries::monomial(-10, Quaternion::J);
        assert_eq!(w.fold(&f).coeff(-2), Quaternion::J);
    }

    #[test]
    fn fit_reproduces_window_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = PeriodicWindow::new(8).unwrap();
        let f = random_series(&mut rng, w.support());
        let fitted = w.fit(&UnitImaginary::I, |t, u| eval_boundary(&f, exp_unit(t, u)));
        assert!(fitted.max_coeff_distance(&f) < 1e-13);
    }

    #[test]
    fn periodic_operations_match_linear_ones_at_nodes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = PeriodicWindow::new(6).unwrap();
        let f = random_series(&mut rng, w.support());
        let g = random_series(&mut rng, w.support());
        let lin = f.convolve(&g);
        let per = w.star(&f, &g);
        let til = w.tilde(&f);
        let u = UnitImaginary::random(&mut rng);
        for th in w.angles() {
            let q = exp_unit(th, &u);
            assert!((eval_boundary(&lin, q) - eval_boundary(&per, q)).norm() < 1e-11);
            assert!((eval_boundary(&til, q) - eval_boundary(&f, q.conj())).norm() < 1e-11);
        }
        assert_eq!(w.tilde(&w.tilde(&f)), f);
    }
}
