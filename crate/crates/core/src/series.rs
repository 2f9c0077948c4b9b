//! Finitely supported quaternion Laurent series `f(q) = Σ qⁿ aₙ`.
//!
//! Coefficients are stored densely over a contiguous support `[n_min, n_max]`;
//! anything outside the support is an implicit zero. The series multiply by the
//! star product, i.e. plain coefficient convolution `(f*g)ₙ = Σₖ aₖ bₙ₋ₖ` with
//! quaternion products taken in that order.

use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;
use crate::{DEFAULT_MAX_DEGREE, EPS0};

/// Inclusive integer interval of coefficient indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Support {
    pub lo: i64,
    pub hi: i64,
}

impl Support {
    pub fn new(lo: i64, hi: i64) -> Self {
        assert!(lo <= hi, "empty support [{lo}, {hi}]");
        Support { lo, hi }
    }

    #[inline]
    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn contains(&self, n: i64) -> bool {
        self.lo <= n && n <= self.hi
    }

    pub fn contains_support(&self, other: &Support) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn union(&self, other: &Support) -> Support {
        Support::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    /// Minkowski sum `{a + b}`.
    pub fn sum(&self, other: &Support) -> Support {
        Support::new(self.lo + other.lo, self.hi + other.hi)
    }

    pub fn widen(&self, by: i64) -> Support {
        Support::new(self.lo - by, self.hi + by)
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    pub fn check_limit(&self, max_degree: i64) -> Result<()> {
        if self.lo < -max_degree || self.hi > max_degree {
            Err(Error::SupportOverflow { lo: self.lo, hi: self.hi, max_degree })
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SliceLaurentSeries {
    n_min: i64,
    coeffs: Vec<Quaternion>,
}

impl SliceLaurentSeries {
    /// `coeffs[i]` is the coefficient of `q^(n_min + i)`. An empty vector
    /// gives the zero series.
    pub fn new(n_min: i64, coeffs: Vec<Quaternion>) -> Self {
        if coeffs.is_empty() {
            return SliceLaurentSeries::zero();
        }
        SliceLaurentSeries { n_min, coeffs }
    }

    pub fn zero() -> Self {
        SliceLaurentSeries { n_min: 0, coeffs: vec![Quaternion::ZERO] }
    }

    pub fn one() -> Self {
        SliceLaurentSeries::constant(Quaternion::ONE)
    }

    pub fn constant(c: Quaternion) -> Self {
        SliceLaurentSeries { n_min: 0, coeffs: vec![c] }
    }

    /// `qⁿ a`.
    pub fn monomial(n: i64, a: Quaternion) -> Self {
        SliceLaurentSeries { n_min: n, coeffs: vec![a] }
    }

    pub fn from_fn(support: Support, mut f: impl FnMut(i64) -> Quaternion) -> Self {
        SliceLaurentSeries { n_min: support.lo, coeffs: support.iter().map(&mut f).collect() }
    }

    /// Builds a series from `(index, coefficient)` pairs; repeated indices add up.
    pub fn from_terms(terms: &[(i64, Quaternion)]) -> Self {
        if terms.is_empty() {
            return SliceLaurentSeries::zero();
        }
        let lo = terms.iter().map(|t| t.0).min().unwrap();
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut out = vec![Quaternion::ZERO; (hi - lo + 1) as usize];
        for &(n, a) in terms {
            out[(n - lo) as usize] += a;
        }
        SliceLaurentSeries::new(lo, out)
    }

    #[inline]
    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    #[inline]
    pub fn n_max(&self) -> i64 {
        self.n_min + self.coeffs.len() as i64 - 1
    }

    #[inline]
    pub fn support(&self) -> Support {
        Support { lo: self.n_min, hi: self.n_max() }
    }

    #[inline]
    pub fn coeffs(&self) -> &[Quaternion] {
        &self.coeffs
    }

    /// Coefficient of `qⁿ`, zero outside the support.
    #[inline]
    pub fn coeff(&self, n: i64) -> Quaternion {
        let i = n - self.n_min;
        if i < 0 || i >= self.coeffs.len() as i64 {
            Quaternion::ZERO
        } else {
            self.coeffs[i as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Quaternion)> + '_ {
        self.coeffs.iter().enumerate().map(move |(i, &a)| (self.n_min + i as i64, a))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|a| a.norm() <= EPS0)
    }

    /// Membership in H²: no coefficient of negative index above the zero tolerance.
    pub fn is_hardy(&self) -> bool {
        self.first_negative_index().is_none()
    }

    pub(crate) fn first_negative_index(&self) -> Option<i64> {
        self.iter().find(|&(n, a)| n < 0 && a.norm() > EPS0).map(|(n, _)| n)
    }

    pub fn l2_norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sqr().sqrt()
    }

    /// `Σ |aₙ|`, an upper bound for the sup norm on the boundary.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm()).sum()
    }

    /// `‖f - g‖` in L².
    pub fn distance(&self, other: &SliceLaurentSeries) -> f64 {
        (self - other).l2_norm()
    }

    /// Largest coefficientwise difference `maxₙ |aₙ - bₙ|`.
    pub fn max_coeff_distance(&self, other: &SliceLaurentSeries) -> f64 {
        let s = self.support().union(&other.support());
        s.iter().map(|n| (self.coeff(n) - other.coeff(n)).norm()).fold(0.0, f64::max)
    }

    pub fn check_limit(&self, max_degree: i64) -> Result<()> {
        self.support().check_limit(max_degree)
    }

    /// Evaluates `Σ qⁿ aₙ` with powers on the left and coefficients on the right.
    pub fn evaluate(&self, q: Quaternion) -> Result<Quaternion> {
        let mut total = Quaternion::ZERO;
        let hi = self.n_max();
        if hi >= 0 {
            let start = self.n_min.max(0);
            let mut acc = Quaternion::ZERO;
            for n in (start..=hi).rev() {
                acc = q * acc + self.coeff(n);
            }
            total += q.powi(start)? * acc;
        }
        if self.n_min < 0 {
            let p = q.inverse()?;
            let k_min = (-hi).max(1);
            let k_max = -self.n_min;
            let mut acc = Quaternion::ZERO;
            for k in (k_min..=k_max).rev() {
                acc = p * acc + self.coeff(-k);
            }
            total += p.powi(k_min)? * acc;
        }
        Ok(total)
    }

    /// Star product under the default degree limit.
    pub fn star(&self, other: &SliceLaurentSeries) -> Result<SliceLaurentSeries> {
        self.star_bounded(other, DEFAULT_MAX_DEGREE)
    }

    pub fn star_bounded(&self, other: &SliceLaurentSeries, max_degree: i64) -> Result<SliceLaurentSeries> {
        self.support().sum(&other.support()).check_limit(max_degree)?;
        Ok(self.convolve(other))
    }

    /// Convolution without a degree check.
    pub(crate) fn convolve(&self, other: &SliceLaurentSeries) -> SliceLaurentSeries {
        let (a, b) = (&self.coeffs, &other.coeffs);
        let mut out = vec![Quaternion::ZERO; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == Quaternion::ZERO {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                out[i + j] += ai * bj;
            }
        }
        SliceLaurentSeries { n_min: self.n_min + other.n_min, coeffs: out }
    }

    /// `f^c(q) = Σ qⁿ conj(aₙ)`.
    pub fn conjugate(&self) -> SliceLaurentSeries {
        SliceLaurentSeries { n_min: self.n_min, coeffs: self.coeffs.iter().map(|a| a.conj()).collect() }
    }

    /// `f̃(q) = f(conj q)` on the boundary, i.e. `aₙ ↦ a₋ₙ`.
    pub fn tilde(&self) -> SliceLaurentSeries {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        SliceLaurentSeries { n_min: -self.n_max(), coeffs }
    }

    /// `f^s = f^c * f`.
    pub fn symmetrize(&self) -> Result<SliceLaurentSeries> {
        self.symmetrize_bounded(DEFAULT_MAX_DEGREE)
    }

    pub fn symmetrize_bounded(&self, max_degree: i64) -> Result<SliceLaurentSeries> {
        let fc = self.conjugate();
        let left = fc.star_bounded(self, max_degree)?;
        debug_assert!({
            let right = self.convolve(&fc);
            left.max_coeff_distance(&right) <= 1e-12 * (1.0 + self.l2_norm_sqr())
        });
        Ok(left)
    }

    /// `T(q) = f(q)⁻¹ q f(q)`; fails with `ZeroValue` on the zero set of `f`.
    pub fn t_map(&self, q: Quaternion) -> Result<Quaternion> {
        let v = self.evaluate(q)?;
        let inv = v.inverse().map_err(|_| Error::ZeroValue)?;
        Ok(inv * q * v)
    }

    /// Truncated star inverse under the default degree limit.
    pub fn star_inverse(&self, out: Support) -> Result<SliceLaurentSeries> {
        self.star_inverse_bounded(out, DEFAULT_MAX_DEGREE)
    }

    /// Solves `f * r = 1` for a truncated `r` by forward substitution after
    /// factoring out the lowest monomial `qᵐ` of `f`.
    ///
    /// The coefficients of `f * r - 1` vanish at every index `<= out.hi`;
    /// `r` is supported on `[-m, out.hi - m]`.
    pub fn star_inverse_bounded(&self, out: Support, max_degree: i64) -> Result<SliceLaurentSeries> {
        if out.hi < 0 {
            return Err(Error::InvalidInput(format!(
                "inverse window must reach index 0, got [{}, {}]",
                out.lo, out.hi
            )));
        }
        let Some(first) = self.coeffs.iter().position(|a| a.norm() > EPS0) else {
            return Err(Error::NotInvertible(0.0));
        };
        let h = &self.coeffs[first..];
        // leading coefficient of f^s is |h₀|²
        let lead_sym = h[0].norm_sqr();
        if lead_sym <= EPS0 {
            return Err(Error::NotInvertible(lead_sym));
        }
        let m = self.n_min + first as i64;
        Support::new(-m, out.hi - m).check_limit(max_degree)?;

        let h0_inv = h[0].inverse()?;
        let len = out.hi as usize + 1;
        let mut s = vec![Quaternion::ZERO; len];
        s[0] = h0_inv;
        for n in 1..len {
            let mut acc = Quaternion::ZERO;
            for k in 1..=n.min(h.len() - 1) {
                acc += h[k] * s[n - k];
            }
            s[n] = -(h0_inv * acc);
        }
        Ok(SliceLaurentSeries { n_min: -m, coeffs: s })
    }

    /// Pointwise reciprocal `f^s(q)⁻¹ f^c(q)`, defined off the zero set of `f^s`.
    pub fn reciprocal_at(&self, q: Quaternion) -> Result<Quaternion> {
        let s = self.conjugate().convolve(self).evaluate(q)?;
        let c = self.conjugate().evaluate(q)?;
        Ok(s.inverse().map_err(|_| Error::ZeroValue)? * c)
    }

    /// `⟨f, g⟩ = Σ conj(bₙ) aₙ`: right-linear in `f`.
    pub fn l2_inner(&self, other: &SliceLaurentSeries) -> Quaternion {
        let lo = self.n_min.max(other.n_min);
        let hi = self.n_max().min(other.n_max());
        (lo..=hi).map(|n| other.coeff(n).conj() * self.coeff(n)).sum()
    }

    /// `f λ`: every coefficient multiplied on the right.
    pub fn scale_right(&self, c: Quaternion) -> SliceLaurentSeries {
        SliceLaurentSeries { n_min: self.n_min, coeffs: self.coeffs.iter().map(|&a| a * c).collect() }
    }

    /// `λ * f`: every coefficient multiplied on the left.
    pub fn scale_left(&self, c: Quaternion) -> SliceLaurentSeries {
        SliceLaurentSeries { n_min: self.n_min, coeffs: self.coeffs.iter().map(|&a| c * a).collect() }
    }

    pub fn scale(&self, s: f64) -> SliceLaurentSeries {
        SliceLaurentSeries { n_min: self.n_min, coeffs: self.coeffs.iter().map(|&a| a * s).collect() }
    }

    /// `qᵏ * f`.
    pub fn shift(&self, k: i64) -> SliceLaurentSeries {
        SliceLaurentSeries { n_min: self.n_min + k, coeffs: self.coeffs.clone() }
    }

    /// Restriction to `window` (coefficients outside are dropped, missing ones are zero).
    pub fn restrict(&self, window: Support) -> SliceLaurentSeries {
        SliceLaurentSeries::from_fn(window, |n| self.coeff(n))
    }

    /// Drops leading and trailing coefficients with norm `<= tol`.
    pub fn trim(&self, tol: f64) -> SliceLaurentSeries {
        let Some(first) = self.coeffs.iter().position(|a| a.norm() > tol) else {
            return SliceLaurentSeries::zero();
        };
        let last = self.coeffs.iter().rposition(|a| a.norm() > tol).unwrap();
        SliceLaurentSeries { n_min: self.n_min + first as i64, coeffs: self.coeffs[first..=last].to_vec() }
    }

    /// Drops the longest trailing block whose combined L² norm is at most `eps`.
    pub fn trim_tail(&self, eps: f64) -> SliceLaurentSeries {
        let mut acc = 0.0;
        let mut keep = self.coeffs.len();
        while keep > 1 {
            let next = acc + self.coeffs[keep - 1].norm_sqr();
            if next.sqrt() > eps {
                break;
            }
            acc = next;
            keep -= 1;
        }
        SliceLaurentSeries { n_min: self.n_min, coeffs: self.coeffs[..keep].to_vec() }
    }

    fn zip_with(
        &self,
        other: &SliceLaurentSeries,
        op: impl Fn(Quaternion, Quaternion) -> Quaternion,
    ) -> SliceLaurentSeries {
        let s = self.support().union(&other.support());
        SliceLaurentSeries::from_fn(s, |n| op(self.coeff(n), other.coeff(n)))
    }

    pub fn to_file(&self) -> SeriesFile {
        SeriesFile { n_min: self.n_min, coeffs: self.coeffs.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("series serialization")
    }

    pub fn from_json(s: &str) -> Result<SliceLaurentSeries> {
        let file: SeriesFile = serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("series JSON: {e}")))?;
        SliceLaurentSeries::try_from(file)
    }
}

impl Add<&SliceLaurentSeries> for &SliceLaurentSeries {
    type Output = SliceLaurentSeries;
    fn add(self, o: &SliceLaurentSeries) -> SliceLaurentSeries {
        self.zip_with(o, |a, b| a + b)
    }
}

impl Sub<&SliceLaurentSeries> for &SliceLaurentSeries {
    type Output = SliceLaurentSeries;
    fn sub(self, o: &SliceLaurentSeries) -> SliceLaurentSeries {
        self.zip_with(o, |a, b| a - b)
    }
}

impl Neg for &SliceLaurentSeries {
    type Output = SliceLaurentSeries;
    fn neg(self) -> SliceLaurentSeries {
        self.scale(-1.0)
    }
}

/// On-disk form: `{"n_min": int, "coeffs": [[w,x,y,z], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesFile {
    pub n_min: i64,
    pub coeffs: Vec<Quaternion>,
}

impl TryFrom<SeriesFile> for SliceLaurentSeries {
    type Error = Error;
    fn try_from(file: SeriesFile) -> Result<Self> {
        if file.coeffs.is_empty() {
            return Err(Error::InvalidInput("series has no coefficients".into()));
        }
        if let Some(i) = file.coeffs.iter().position(|a| !a.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite coefficient at position {i}")));
        }
        Ok(SliceLaurentSeries::new(file.n_min, file.coeffs))
    }
}

impl Serialize for SliceLaurentSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_file().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SliceLaurentSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = SeriesFile::deserialize(d)?;
        SliceLaurentSeries::try_from(file).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::{exp_unit, UnitImaginary};
    use crate::sampling::random_series;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    type Q = Quaternion;

    fn series(n_min: i64, c: &[Q]) -> SliceLaurentSeries {
        SliceLaurentSeries::new(n_min, c.to_vec())
    }

    #[test]
    fn evaluate_examples() {
        // 1 + q i at q = j is 1 + j i = 1 - k
        let f = series(0, &[Q::ONE, Q::I]);
        assert_eq!(f.evaluate(Q::J).unwrap(), Q::ONE - Q::K);
        // q⁻¹ at i is -i
        let g = SliceLaurentSeries::monomial(-1, Q::ONE);
        let v = g.evaluate(exp_unit(PI / 2.0, &UnitImaginary::I)).unwrap();
        assert!((v + Q::I).norm() < 1e-15);
        assert!(matches!(g.evaluate(Q::ZERO), Err(Error::ZeroDivision)));
    }

    #[test]
    fn evaluate_matches_naive_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let f = random_series(&mut rng, Support::new(-7, 9));
            let q = Q::random(&mut rng) * 0.9;
            let naive: Q = f.iter().map(|(n, a)| q.powi(n).unwrap() * a).sum();
            let v = f.evaluate(q).unwrap();
            assert!((v - naive).norm() < 1e-9 * (1.0 + naive.norm()));
        }
        // support away from zero on both sides
        let f = series(3, &[Q::I, Q::J]);
        let q = Q::new(0.3, 0.2, -0.1, 0.5);
        let expect = q.powi(3).unwrap() * Q::I + q.powi(4).unwrap() * Q::J;
        assert!((f.evaluate(q).unwrap() - expect).norm() < 1e-15);
        let f = series(-4, &[Q::I, Q::J]);
        let expect = q.powi(-4).unwrap() * Q::I + q.powi(-3).unwrap() * Q::J;
        assert!((f.evaluate(q).unwrap() - expect).norm() < 1e-12);
    }

    #[test]
    fn star_examples() {
        let f = SliceLaurentSeries::monomial(1, Q::I);
        let g = SliceLaurentSeries::monomial(1, Q::J);
        assert_eq!(f.star(&g).unwrap(), SliceLaurentSeries::monomial(2, Q::K));

        // (q - i) * (q + i): c0 = -i·i = 1, c1 = -i + i = 0, c2 = 1
        let f = series(0, &[-Q::I, Q::ONE]);
        let g = series(0, &[Q::I, Q::ONE]);
        let p = f.star(&g).unwrap();
        assert_eq!(p.support(), Support::new(0, 2));
        assert_eq!(p.coeffs(), &[Q::ONE, Q::ZERO, Q::ONE]);
    }

    #[test]
    fn real_coefficients_are_central() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = SliceLaurentSeries::from_fn(Support::new(-3, 4), |n| Q::real(n as f64 * 0.5 - 1.0));
        let g = random_series(&mut rng, Support::new(-5, 2));
        assert!(f.star(&g).unwrap().max_coeff_distance(&g.star(&f).unwrap()) < 1e-14);
    }

    #[test]
    fn star_overflow_is_an_error() {
        let f = SliceLaurentSeries::monomial(200, Q::ONE);
        let err = f.star(&f).unwrap_err();
        assert!(matches!(err, Error::SupportOverflow { hi: 400, max_degree: 256, .. }));
        assert!(err.to_string().contains("max_degree"));
    }

    #[test]
    fn conjugate_and_tilde_examples() {
        let f = SliceLaurentSeries::monomial(1, Q::I);
        assert_eq!(f.conjugate(), SliceLaurentSeries::monomial(1, -Q::I));
        let g = series(0, &[Q::ONE, Q::real(0.5)]);
        assert_eq!(g.conjugate(), g);

        let a = Q::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(SliceLaurentSeries::monomial(1, a).tilde(), SliceLaurentSeries::monomial(-1, a));
        assert_eq!(SliceLaurentSeries::constant(a).tilde(), SliceLaurentSeries::constant(a));
    }

    #[test]
    fn tilde_evaluates_at_the_conjugate_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let f = random_series(&mut rng, Support::new(-6, 6));
            let u = UnitImaginary::random(&mut rng);
            let t = rand::Rng::gen_range(&mut rng, 0.0..PI);
            let lhs = f.tilde().evaluate(exp_unit(t, &u)).unwrap();
            let rhs = f.evaluate(exp_unit(-t, &u)).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn symmetrize_examples() {
        let f = series(0, &[-Q::I, Q::ONE]);
        assert_eq!(f.symmetrize().unwrap().coeffs(), &[Q::ONE, Q::ZERO, Q::ONE]);
        let c = Q::new(1.0, -2.0, 0.5, 3.0);
        let s = SliceLaurentSeries::constant(c).symmetrize().unwrap();
        assert!((s.coeff(0) - Q::real(c.norm_sqr())).norm() < 1e-14);
    }

    #[test]
    fn symmetrization_has_real_coefficients_and_is_two_sided() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = random_series(&mut rng, Support::new(-5, 7));
        let s = f.symmetrize().unwrap();
        let s2 = f.star(&f.conjugate()).unwrap();
        assert!(s.max_coeff_distance(&s2) < 1e-12);
        assert!(s.coeffs().iter().all(|a| a.vector().iter().all(|x| x.abs() < 1e-12)));
    }

    #[test]
    fn t_map_examples() {
        let c = Q::new(1.0, 2.0, -1.0, 0.5);
        let f = SliceLaurentSeries::constant(c);
        let got = f.t_map(Q::I).unwrap();
        let want = c.inverse().unwrap() * Q::I * c;
        assert!((got - want).norm() < 1e-14);

        let r = series(-1, &[Q::real(0.3), Q::real(2.0), Q::real(-1.0)]);
        let q = exp_unit(0.7, &UnitImaginary::new([1.0, 2.0, 2.0]).unwrap());
        assert!((r.t_map(q).unwrap() - q).norm() < 1e-14);

        // q - i vanishes at i
        let z = series(0, &[-Q::I, Q::ONE]);
        assert!(matches!(z.t_map(Q::I), Err(Error::ZeroValue)));
    }

    #[test]
    fn t_map_preserves_the_sphere() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let f = random_series(&mut rng, Support::new(-3, 3));
        for _ in 0..50 {
            let q = exp_unit(rand::Rng::gen_range(&mut rng, 0.0..PI), &UnitImaginary::random(&mut rng));
            let t = f.t_map(q).unwrap();
            assert!((t.w - q.w).abs() < 1e-12);
            assert!((t.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn star_inverse_examples() {
        let c = Q::new(2.0, 1.0, 0.0, -1.0);
        let r = SliceLaurentSeries::constant(c).star_inverse(Support::new(0, 0)).unwrap();
        assert!((r.coeff(0) - c.inverse().unwrap()).norm() < 1e-15);

        let u = Q::new(1.0, 1.0, 1.0, 1.0) * 0.5;
        let r = SliceLaurentSeries::monomial(3, u).star_inverse(Support::new(0, 4)).unwrap();
        assert!(r.trim(1e-15).max_coeff_distance(&SliceLaurentSeries::monomial(-3, u.conj())) < 1e-15);
    }

    #[test]
    fn star_inverse_of_geometric_factor() {
        // oracle: c0 = 1, cn = -c(n-1)/2
        let n = 40;
        let mut oracle = vec![1.0f64];
        for k in 1..=n {
            oracle.push(-oracle[k - 1] / 2.0);
        }
        let f = series(0, &[Q::ONE, Q::real(0.5)]);
        let r = f.star_inverse(Support::new(0, n as i64)).unwrap();
        for (k, want) in oracle.iter().enumerate() {
            assert!((r.coeff(k as i64) - Q::real(*want)).norm() < 1e-15);
        }
        let prod = f.star(&r).unwrap();
        let resid = &prod - &SliceLaurentSeries::one();
        for k in 0..=n as i64 {
            assert!(resid.coeff(k).norm() < 1e-14);
        }
        assert!(resid.l2_norm() < 2f64.powi(-(n as i32)));

        // pointwise cross-check against f^s(q)⁻¹ f^c(q)
        let q = exp_unit(1.1, &UnitImaginary::new([0.2, -1.0, 0.4]).unwrap());
        let direct = r.evaluate(q).unwrap();
        assert!((direct - f.reciprocal_at(q).unwrap()).norm() < 1e-11);
    }

    #[test]
    fn star_inverse_rejects_vanishing_series() {
        assert!(matches!(SliceLaurentSeries::zero().star_inverse(Support::new(0, 3)), Err(Error::NotInvertible(_))));
        let tiny = SliceLaurentSeries::constant(Q::real(1e-7));
        assert!(matches!(tiny.star_inverse(Support::new(0, 3)), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn inner_product_examples() {
        let a = SliceLaurentSeries::monomial(2, Q::ONE);
        let b = SliceLaurentSeries::monomial(3, Q::ONE);
        assert_eq!(a.l2_inner(&a), Q::ONE);
        assert_eq!(a.l2_inner(&b), Q::ZERO);
        let f = SliceLaurentSeries::monomial(1, Q::I);
        let g = SliceLaurentSeries::monomial(1, Q::J);
        assert_eq!(f.l2_inner(&g), Q::K);
    }

    #[test]
    fn inner_product_sesquilinearity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_series(&mut rng, Support::new(-4, 4));
        let g = random_series(&mut rng, Support::new(-2, 6));
        let lam = Q::random(&mut rng);
        let mu = Q::random(&mut rng);
        let ip = f.l2_inner(&g);
        assert!((f.scale_right(lam).l2_inner(&g) - ip * lam).norm() < 1e-12);
        assert!((f.l2_inner(&g.scale_right(mu)) - mu.conj() * ip).norm() < 1e-12);
        assert!(ip.norm() <= f.l2_norm() * g.l2_norm());
    }

    #[test]
    fn json_layout_and_roundtrip() {
        let f = series(-1, &[Q::new(0.1, 0.2, 0.3, 0.4), Q::ONE]);
        let s = f.to_json();
        assert_eq!(s, r#"{"n_min":-1,"coeffs":[[0.1,0.2,0.3,0.4],[1.0,0.0,0.0,0.0]]}"#);
        assert_eq!(SliceLaurentSeries::from_json(&s).unwrap(), f);
        assert!(SliceLaurentSeries::from_json(r#"{"n_min":0,"coeffs":[]}"#).is_err());
        assert!(SliceLaurentSeries::from_json(r#"{"n_min":0}"#).is_err());
    }

    #[test]
    fn trim_tail_keeps_the_head() {
        let f = series(0, &[Q::ONE, Q::real(1e-3), Q::real(1e-16), Q::real(1e-17)]);
        assert_eq!(f.trim_tail(1e-14).support(), Support::new(0, 1));
        assert_eq!(f.trim(1e-10).support(), Support::new(0, 1));
        assert_eq!(SliceLaurentSeries::zero().trim(0.0), SliceLaurentSeries::zero());
    }

    fn arb_series(max_abs: i64) -> impl Strategy<Value = SliceLaurentSeries> {
        (-max_abs..=max_abs, 1usize..=8, any::<u64>()).prop_map(move |(lo, len, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let hi = (lo + len as i64 - 1).min(max_abs);
            random_series(&mut rng, Support::new(lo, hi))
        })
    }

    proptest! {
        #[test]
        fn star_is_associative(f in arb_series(10), g in arb_series(10), h in arb_series(10)) {
            let l = f.star(&g).unwrap().star(&h).unwrap();
            let r = f.star(&g.star(&h).unwrap()).unwrap();
            prop_assert!(l.max_coeff_distance(&r) < 1e-11);
        }

        #[test]
        fn conjugation_reverses_products(f in arb_series(10), g in arb_series(10)) {
            let l = f.star(&g).unwrap().conjugate();
            let r = g.conjugate().star(&f.conjugate()).unwrap();
            prop_assert!(l.max_coeff_distance(&r) < 1e-12);
            prop_assert!((f.l2_norm() - f.conjugate().l2_norm()).abs() < 1e-12);
        }

        #[test]
        fn tilde_is_an_involutive_homomorphism(f in arb_series(10), g in arb_series(10)) {
            prop_assert_eq!(f.tilde().tilde(), f.clone());
            let l = f.star(&g).unwrap().tilde();
            let r = f.tilde().star(&g.tilde()).unwrap();
            prop_assert!(l.max_coeff_distance(&r) < 1e-12);
        }

        #[test]
        fn json_roundtrip_is_bit_exact(f in arb_series(20)) {
            let back = SliceLaurentSeries::from_json(&f.to_json()).unwrap();
            prop_assert_eq!(back, f);
        }
    }
}
