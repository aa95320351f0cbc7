//! Dense polynomials as ascending coefficient vectors.

use crate::scalar::Scalar;

pub fn mul<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

pub fn eval<T: Scalar>(p: &[T], x: &T) -> T {
    p.iter()
        .rev()
        .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
}

/// Value and first derivative by Horner's scheme.
pub fn eval_with_derivative<T: Scalar>(p: &[T], x: &T) -> (T, T) {
    let mut v = T::zero();
    let mut d = T::zero();
    for c in p.iter().rev() {
        d = d * x.clone() + v.clone();
        v = v * x.clone() + c.clone();
    }
    (v, d)
}

pub fn coeff<T: Scalar>(p: &[T], k: i64) -> T {
    if k < 0 || k as usize >= p.len() {
        T::zero()
    } else {
        p[k as usize].clone()
    }
}

/// ∏_{j=lo}^{hi} (1 + r_j z) for the given list of r_j.
pub fn linear_product<T: Scalar>(roots: impl IntoIterator<Item = T>) -> Vec<T> {
    roots
        .into_iter()
        .fold(vec![T::one()], |acc, r| mul(&acc, &[T::one(), r]))
}

/// p(λ z) as a coefficient list.
pub fn rescale<T: Scalar>(p: &[T], lambda: &T) -> Vec<T> {
    let mut f = T::one();
    p.iter()
        .map(|c| {
            let out = c.clone() * f.clone();
            f = f.clone() * lambda.clone();
            out
        })
        .collect()
}

pub fn trim<T: Scalar>(mut p: Vec<T>) -> Vec<T> {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}
