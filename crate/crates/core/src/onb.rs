//! Words over the symbol alphabet and the basis functions
//! `b_v = S_{v₀} S_{v₁} ⋯ S_{v_{L−1}} 𝟏`.

use num_complex::Complex64;
use rayon::prelude::*;
use std::fmt;

use crate::cuntz::{PointFunction, Representation};
use crate::{pairwise_sum, ComplexPoint, Error, Result};

/// Largest number of words [`enumerate_words`] will produce.
pub const WORD_BUDGET: usize = 1 << 20;

/// A finite word `v = (v₀, …, v_{L−1})`; the empty word stands for `𝟏`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(indices: Vec<usize>, alphabet: usize) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= alphabet) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                count: alphabet,
            });
        }
        Ok(Self(indices))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, ")")
    }
}

fn word_count(alphabet: usize, length: usize) -> Option<usize> {
    let mut total: usize = 1;
    for _ in 0..length {
        total = total.checked_mul(alphabet)?;
        if total > WORD_BUDGET {
            return None;
        }
    }
    Some(total)
}

/// All `N^L` words of length `L`, in lexicographic order.
pub fn enumerate_words(alphabet: usize, length: usize) -> Result<Vec<Word>> {
    if alphabet == 0 {
        return Err(Error::invalid("alphabet must have at least one symbol"));
    }
    let total = word_count(alphabet, length).ok_or(Error::Budget {
        what: "word enumeration",
        limit: WORD_BUDGET,
    })?;
    Ok((0..total)
        .map(|mut code| {
            let mut digits = vec![0; length];
            for slot in digits.iter_mut().rev() {
                *slot = code % alphabet;
                code /= alphabet;
            }
            Word(digits)
        })
        .collect())
}

/// `b_v(z) = ∏_{m} e_{v_m}(R_m(z))`.
pub fn eval_word(rep: &Representation, v: &Word, z: ComplexPoint) -> Result<Complex64> {
    let orbit = forward_orbit(rep, z, v.len());
    word_on_orbit(rep, v, &orbit)
}

fn forward_orbit(rep: &Representation, z: ComplexPoint, length: usize) -> Vec<ComplexPoint> {
    let map = rep.map();
    let mut orbit = Vec::with_capacity(length.max(1));
    let mut w = z;
    for _ in 0..length {
        orbit.push(w);
        w = map.evaluate(w);
    }
    orbit
}

fn word_on_orbit(rep: &Representation, v: &Word, orbit: &[ComplexPoint]) -> Result<Complex64> {
    let family = rep.family();
    v.0.iter()
        .zip(orbit)
        .try_fold(Complex64::new(1.0, 0.0), |acc, (&i, &p)| Ok(acc * family.eval(i, p)?))
}

/// `b_v` assembled as an operator word applied to `𝟏`.
pub fn word_function(rep: &Representation, v: &Word) -> Result<PointFunction> {
    v.0.iter()
        .rev()
        .try_fold(PointFunction::one(), |f, &i| rep.apply_s(i, &f))
}

/// `Σ_{|v| = depth} b_v(z)·conj(b_v(w))`, summed pairwise in word order.
pub fn partial_expansion(
    rep: &Representation,
    depth: usize,
    z: ComplexPoint,
    w: ComplexPoint,
) -> Result<Complex64> {
    let words = enumerate_words(rep.count(), depth)?;
    let oz = forward_orbit(rep, z, depth);
    let ow = forward_orbit(rep, w, depth);
    let terms: Vec<Complex64> = words
        .par_iter()
        .map(|v| Ok(word_on_orbit(rep, v, &oz)? * word_on_orbit(rep, v, &ow)?.conj()))
        .collect::<Result<_>>()?;
    Ok(pairwise_sum(&terms))
}

/// `∏_{n=0}^{depth−1} k(Rₙz, Rₙw)`, the closed form of [`partial_expansion`].
pub fn truncated_product(
    rep: &Representation,
    depth: usize,
    z: ComplexPoint,
    w: ComplexPoint,
) -> Complex64 {
    let factor = rep.model().factor();
    forward_orbit(rep, z, depth)
        .into_iter()
        .zip(forward_orbit(rep, w, depth))
        .map(|(a, b)| factor.k(a, b))
        .product()
}
