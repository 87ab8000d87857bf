//! Truncated multivariate Taylor arithmetic of order three.
//!
//! A [`Jet3`] stores the Taylor coefficients `c_α = ∂^α f / α!` of a function
//! of `n` variables for every multi-index with `|α| ≤ 3`. Multi-indices are
//! kept as sorted variable lists, so second and third derivatives live in
//! packed symmetric storage and can never be observed asymmetric.
//!
//! Each jet also records the highest order whose slots are exact. Fresh jets
//! are exact to order three; [`Jet3::partial`] lowers the order by one, and
//! binary operations keep the minimum of their operands. Slots above the
//! recorded order are held at zero.

use std::collections::HashMap;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

/// Largest supported number of variables.
pub const MAX_VARS: usize = 8;

/// Index tables for one variable count.
#[derive(Debug)]
pub struct Layout {
    n: usize,
    /// `starts[d]..starts[d + 1]` holds the monomials of degree `d`.
    starts: [usize; 5],
    hess_index: Vec<usize>,
    third_index: Vec<usize>,
    /// `(lhs, rhs, out)` sorted by the degree of `out`.
    products: Vec<(u16, u16, u16)>,
    /// Number of products whose output degree is at most `d`.
    product_ends: [usize; 4],
    /// Per variable `k`: `(src, dst, factor)` with `src = dst + e_k`.
    partials: Vec<Vec<(u16, u16, u16)>>,
    /// `α!` for each monomial.
    factorials: Vec<u16>,
}

impl Layout {
    fn build(n: usize) -> Self {
        let mut monomials: Vec<Vec<usize>> = vec![vec![]];
        let mut starts = [0usize; 5];
        for degree in 1..=3 {
            starts[degree] = monomials.len();
            let prev: Vec<Vec<usize>> = monomials
                .iter()
                .filter(|m| m.len() == degree - 1)
                .cloned()
                .collect();
            for m in prev {
                let lo = m.last().copied().unwrap_or(0);
                for v in lo..n {
                    let mut next = m.clone();
                    next.push(v);
                    monomials.push(next);
                }
            }
        }
        starts[4] = monomials.len();

        let lookup: HashMap<Vec<usize>, usize> = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let find = |mut key: Vec<usize>| {
            key.sort_unstable();
            lookup[&key]
        };

        let mut hess_index = vec![0; n * n];
        let mut third_index = vec![0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                hess_index[i * n + j] = find(vec![i, j]);
                for k in 0..n {
                    third_index[(i * n + j) * n + k] = find(vec![i, j, k]);
                }
            }
        }

        let mut products = Vec::new();
        for (a, ma) in monomials.iter().enumerate() {
            for (b, mb) in monomials.iter().enumerate() {
                if ma.len() + mb.len() <= 3 {
                    let mut merged = ma.clone();
                    merged.extend_from_slice(mb);
                    let out = find(merged);
                    products.push((a as u16, b as u16, out as u16));
                }
            }
        }
        let degree = |idx: u16| monomials[idx as usize].len();
        products.sort_by_key(|&(_, _, out)| (degree(out), out));
        let mut product_ends = [0usize; 4];
        for (d, end) in product_ends.iter_mut().enumerate() {
            *end = products.iter().filter(|p| degree(p.2) <= d).count();
        }

        let mut partials = vec![Vec::new(); n];
        for (dst, m) in monomials.iter().enumerate() {
            if m.len() > 2 {
                continue;
            }
            for (k, list) in partials.iter_mut().enumerate() {
                let mut src = m.clone();
                src.push(k);
                let factor = m.iter().filter(|&&v| v == k).count() + 1;
                list.push((find(src) as u16, dst as u16, factor as u16));
            }
        }

        let factorials = monomials
            .iter()
            .map(|m| {
                let mut f = 1u16;
                let mut run = 1u16;
                for w in m.windows(2) {
                    if w[0] == w[1] {
                        run += 1;
                        f *= run;
                    } else {
                        run = 1;
                    }
                }
                f
            })
            .collect();

        Layout {
            n,
            starts,
            hess_index,
            third_index,
            products,
            product_ends,
            partials,
            factorials,
        }
    }

    pub fn len(&self) -> usize {
        self.starts[4]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vars(&self) -> usize {
        self.n
    }
}

/// Shared layout for `n` variables, `1 ≤ n ≤ MAX_VARS`.
pub fn layout(n: usize) -> Result<&'static Layout> {
    static LAYOUTS: [OnceLock<Layout>; MAX_VARS + 1] = [const { OnceLock::new() }; MAX_VARS + 1];
    if n == 0 || n > MAX_VARS {
        return Err(Error::InvalidArgument(format!(
            "jets support 1..={MAX_VARS} variables, got {n}"
        )));
    }
    Ok(LAYOUTS[n].get_or_init(|| Layout::build(n)))
}

#[derive(Debug, Clone)]
pub struct Jet3<T> {
    layout: &'static Layout,
    order: u8,
    coeffs: Vec<T>,
}

impl<T: Real> Jet3<T> {
    pub fn constant(n: usize, value: T) -> Result<Self> {
        let layout = layout(n)?;
        let mut coeffs = vec![T::zero(); layout.len()];
        coeffs[0] = value;
        Ok(Jet3 {
            layout,
            order: 3,
            coeffs,
        })
    }

    /// The coordinate function `x_index` expanded at `base_value`.
    pub fn variable(index: usize, base_value: T, n: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::InvalidArgument(format!(
                "variable index {index} out of range for {n} variables"
            )));
        }
        let mut jet = Self::constant(n, base_value)?;
        jet.coeffs[1 + index] = T::one();
        Ok(jet)
    }

    fn zero_like(&self, order: u8) -> Self {
        Jet3 {
            layout: self.layout,
            order,
            coeffs: vec![T::zero(); self.coeffs.len()],
        }
    }

    pub fn vars(&self) -> usize {
        self.layout.n
    }

    /// Highest derivative order whose slots are exact.
    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn value(&self) -> T {
        self.coeffs[0]
    }

    pub fn grad(&self, i: usize) -> T {
        self.coeffs[1 + i]
    }

    pub fn hess(&self, i: usize, j: usize) -> T {
        let idx = self.layout.hess_index[i * self.layout.n + j];
        self.coeffs[idx] * T::lit(self.layout.factorials[idx] as f64)
    }

    pub fn third(&self, i: usize, j: usize, k: usize) -> T {
        let n = self.layout.n;
        let idx = self.layout.third_index[(i * n + j) * n + k];
        self.coeffs[idx] * T::lit(self.layout.factorials[idx] as f64)
    }

    /// Raw Taylor coefficients in layout order.
    pub fn coefficients(&self) -> &[T] {
        &self.coeffs
    }

    pub fn gradient(&self) -> Vec<T> {
        (0..self.vars()).map(|i| self.grad(i)).collect()
    }

    /// Packed Hessian: `n(n+1)/2` second derivatives for `i ≤ j`.
    pub fn hessian_packed(&self) -> Vec<T> {
        let (s, e) = (self.layout.starts[2], self.layout.starts[3]);
        (s..e)
            .map(|idx| self.coeffs[idx] * T::lit(self.layout.factorials[idx] as f64))
            .collect()
    }

    /// Packed third derivatives for `i ≤ j ≤ k`.
    pub fn third_packed(&self) -> Vec<T> {
        let (s, e) = (self.layout.starts[3], self.layout.starts[4]);
        (s..e)
            .map(|idx| self.coeffs[idx] * T::lit(self.layout.factorials[idx] as f64))
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Jet of `∂f/∂x_k`, exact to one order less than `self`.
    pub fn partial(&self, k: usize) -> Self {
        let order = self.order.saturating_sub(1);
        let mut out = self.zero_like(order);
        let limit = self.layout.starts[order as usize + 1];
        for &(src, dst, factor) in &self.layout.partials[k] {
            if (dst as usize) < limit {
                out.coeffs[dst as usize] = self.coeffs[src as usize] * T::lit(factor as f64);
            }
        }
        out
    }

    pub fn scale(&self, s: T) -> Self {
        Jet3 {
            layout: self.layout,
            order: self.order,
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    fn check(&self, other: &Self) {
        assert_eq!(
            self.layout.n, other.layout.n,
            "jets over different variable counts"
        );
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self.check(rhs);
        let order = self.order.min(rhs.order);
        let mut out = self.zero_like(order);
        let end = self.layout.product_ends[order as usize];
        for &(a, b, o) in &self.layout.products[..end] {
            out.coeffs[o as usize] =
                out.coeffs[o as usize] + self.coeffs[a as usize] * rhs.coeffs[b as usize];
        }
        out
    }

    fn zip(&self, rhs: &Self, f: impl Fn(T, T) -> T) -> Self {
        self.check(rhs);
        let order = self.order.min(rhs.order);
        let limit = self.layout.starts[order as usize + 1];
        let mut out = self.zero_like(order);
        for i in 0..limit {
            out.coeffs[i] = f(self.coeffs[i], rhs.coeffs[i]);
        }
        out
    }

    /// `f ∘ self` given `f` and its first three derivatives at `self.value()`.
    pub fn compose(&self, derivs: [T; 4]) -> Self {
        let mut d = self.clone();
        d.coeffs[0] = T::zero();
        let d2 = d.mul_ref(&d);
        let d3 = d2.mul_ref(&d);
        let half = T::lit(0.5);
        let sixth = T::lit(1.0 / 6.0);
        let mut out = d.scale(derivs[1]);
        out.coeffs[0] = derivs[0];
        for i in 1..out.coeffs.len() {
            out.coeffs[i] =
                out.coeffs[i] + derivs[2] * half * d2.coeffs[i] + derivs[3] * sixth * d3.coeffs[i];
        }
        out
    }

    pub fn recip(&self) -> Self {
        let x = self.value();
        let r = x.recip();
        let r2 = r * r;
        self.compose([r, -r2, T::lit(2.0) * r2 * r, T::lit(-6.0) * r2 * r2])
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose([e; 4])
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn tan(&self) -> Self {
        let t = self.value().tan();
        let sec2 = T::one() + t * t;
        let two = T::lit(2.0);
        self.compose([t, sec2, two * t * sec2, sec2 * (two + T::lit(6.0) * t * t)])
    }

    pub fn ln(&self) -> Self {
        let x = self.value();
        let r = x.recip();
        self.compose([x.ln(), r, -r * r, T::lit(2.0) * r * r * r])
    }

    pub fn sqrt(&self) -> Self {
        let x = self.value();
        let s = x.sqrt();
        let r = x.recip();
        let d1 = T::lit(0.5) / s;
        self.compose([s, d1, T::lit(-0.5) * d1 * r, T::lit(0.75) * d1 * r * r])
    }

    pub fn atan(&self) -> Self {
        let x = self.value();
        let q = (T::one() + x * x).recip();
        self.compose([
            x.atan(),
            q,
            T::lit(-2.0) * x * q * q,
            (T::lit(6.0) * x * x - T::lit(2.0)) * q * q * q,
        ])
    }

    /// Integer power; negative exponents go through [`Jet3::recip`].
    pub fn powi(&self, k: i32) -> Self {
        if k < 0 {
            return self.powi(-k).recip();
        }
        let x = self.value();
        let term = |c: i32, p: i32| {
            if c == 0 {
                T::zero()
            } else {
                T::lit(c as f64) * x.powi(p)
            }
        };
        self.compose([
            x.powi(k),
            term(k, k - 1),
            term(k * (k - 1), k - 2),
            term(k * (k - 1) * (k - 2), k - 3),
        ])
    }
}

impl<T: Real> Add for &Jet3<T> {
    type Output = Jet3<T>;
    fn add(self, rhs: Self) -> Jet3<T> {
        self.zip(rhs, |a, b| a + b)
    }
}

impl<T: Real> Sub for &Jet3<T> {
    type Output = Jet3<T>;
    fn sub(self, rhs: Self) -> Jet3<T> {
        self.zip(rhs, |a, b| a - b)
    }
}

impl<T: Real> Mul for &Jet3<T> {
    type Output = Jet3<T>;
    fn mul(self, rhs: Self) -> Jet3<T> {
        self.mul_ref(rhs)
    }
}

impl<T: Real> Div for &Jet3<T> {
    type Output = Jet3<T>;
    fn div(self, rhs: Self) -> Jet3<T> {
        self.mul_ref(&rhs.recip())
    }
}

impl<T: Real> Neg for &Jet3<T> {
    type Output = Jet3<T>;
    fn neg(self) -> Jet3<T> {
        self.scale(-T::one())
    }
}

macro_rules! by_value {
    ($($tr:ident $m:ident),*) => {$(
        impl<T: Real> $tr for Jet3<T> {
            type Output = Jet3<T>;
            fn $m(self, rhs: Self) -> Jet3<T> {
                (&self).$m(&rhs)
            }
        }
    )*};
}
by_value!(Add add, Sub sub, Mul mul, Div div);

impl<T: Real> Neg for Jet3<T> {
    type Output = Jet3<T>;
    fn neg(self) -> Jet3<T> {
        -&self
    }
}

impl<T: Real> Scalar for Jet3<T> {
    type Context = usize;

    fn constant(n: usize, v: f64) -> Self {
        Jet3::constant(n, T::lit(v)).expect("variable count validated by caller")
    }
    fn real(&self) -> f64 {
        self.value().as_f64()
    }
    fn sin(&self) -> Self {
        Jet3::sin(self)
    }
    fn cos(&self) -> Self {
        Jet3::cos(self)
    }
    fn tan(&self) -> Self {
        Jet3::tan(self)
    }
    fn exp(&self) -> Self {
        Jet3::exp(self)
    }
    fn ln(&self) -> Self {
        Jet3::ln(self)
    }
    fn sqrt(&self) -> Self {
        Jet3::sqrt(self)
    }
    fn atan(&self) -> Self {
        Jet3::atan(self)
    }
    fn powi(&self, k: i32) -> Self {
        Jet3::powi(self, k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(i: usize, x: f64, n: usize) -> Jet3<f64> {
        Jet3::variable(i, x, n).unwrap()
    }

    #[test]
    fn slot_counts() {
        let l = layout(8).unwrap();
        assert_eq!(l.len(), 1 + 8 + 36 + 120);
        assert_eq!(layout(3).unwrap().len(), 1 + 3 + 6 + 10);
        assert!(layout(0).is_err());
        assert!(layout(9).is_err());
    }

    #[test]
    fn variable_slots() {
        let x = var(0, 0.5, 2);
        assert_eq!(x.value(), 0.5);
        assert_eq!(x.gradient(), vec![1.0, 0.0]);
        assert!(x.hessian_packed().iter().all(|&h| h == 0.0));
        assert!(x.third_packed().iter().all(|&h| h == 0.0));

        let y = var(1, -2.0, 3);
        assert_eq!(y.value(), -2.0);
        assert_eq!(y.gradient(), vec![0.0, 1.0, 0.0]);
        assert!(Jet3::<f64>::variable(3, 0.0, 3).is_err());
    }

    #[test]
    fn sum_of_variables_is_linear() {
        let n = 4;
        let mut s = Jet3::constant(n, 0.0).unwrap();
        for i in 0..n {
            s = &s + &var(i, i as f64, n);
        }
        assert_eq!(s.gradient(), vec![1.0; n]);
        assert!(s.hessian_packed().iter().all(|&h| h == 0.0));
        assert!(s.third_packed().iter().all(|&h| h == 0.0));
    }

    #[test]
    fn square_of_variable() {
        let x = var(0, 3.0, 1);
        let sq = &x * &x;
        assert_eq!(sq.value(), 9.0);
        assert_eq!(sq.grad(0), 6.0);
        assert_eq!(sq.hess(0, 0), 2.0);
        assert_eq!(sq.third(0, 0, 0), 0.0);
    }

    #[test]
    fn bilinear_product() {
        let p = &var(0, 1.0, 2) * &var(1, 2.0, 2);
        assert_eq!(p.value(), 2.0);
        assert_eq!(p.gradient(), vec![2.0, 1.0]);
        assert_eq!(p.hess(0, 1), 1.0);
        assert_eq!(p.hess(1, 0), 1.0);
        assert_eq!(p.hess(0, 0), 0.0);
        assert!(p.third_packed().iter().all(|&h| h == 0.0));
    }

    #[test]
    fn cube_of_sum() {
        let s = &var(0, 1.0, 2) + &var(1, 1.0, 2);
        let c = s.powi(3);
        assert_eq!(c.value(), 8.0);
        assert_eq!(c.gradient(), vec![12.0, 12.0]);
        for (i, j) in [(0, 0), (0, 1), (1, 1)] {
            assert_eq!(c.hess(i, j), 12.0);
        }
        for (i, j, k) in [(0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 1, 1)] {
            assert_eq!(c.third(i, j, k), 6.0);
        }
        let m = &(&s * &s) * &s;
        for (a, b) in m.coefficients().iter().zip(c.coefficients()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn elementary_taylor_at_zero() {
        let x = var(0, 0.0, 1);
        let e = x.exp();
        assert_eq!([e.value(), e.grad(0), e.hess(0, 0), e.third(0, 0, 0)], [1.0; 4]);
        let s = x.sin();
        assert_eq!(
            [s.value(), s.grad(0), s.hess(0, 0), s.third(0, 0, 0)],
            [0.0, 1.0, 0.0, -1.0]
        );
    }

    #[test]
    fn partial_lowers_order() {
        let x = var(0, 2.0, 2);
        let y = var(1, 3.0, 2);
        let f = &(&x * &x) * &y; // x^2 y
        let fx = f.partial(0); // 2xy
        assert_eq!(fx.order(), 2);
        assert_eq!(fx.value(), 12.0);
        assert_eq!(fx.gradient(), vec![6.0, 4.0]);
        assert_eq!(fx.hess(0, 1), 2.0);
        assert_eq!(fx.third(0, 0, 1), 0.0);
        let fxx = fx.partial(0); // 2y
        assert_eq!(fxx.order(), 1);
        assert_eq!(fxx.value(), 6.0);
        assert_eq!(fxx.gradient(), vec![0.0, 2.0]);
    }

    #[test]
    fn division_and_recip() {
        let x = var(0, 2.0, 1);
        let q = &Jet3::constant(1, 1.0).unwrap() / &x;
        assert!((q.value() - 0.5).abs() < 1e-15);
        assert!((q.grad(0) + 0.25).abs() < 1e-15);
        assert!((q.hess(0, 0) - 0.25).abs() < 1e-15);
        assert!((q.third(0, 0, 0) + 0.375).abs() < 1e-15);
    }

    #[test]
    fn works_over_f32() {
        let x = Jet3::<f32>::variable(0, 3.0, 1).unwrap();
        let sq = &x * &x;
        assert_eq!(sq.grad(0), 6.0f32);
    }
}
