//! Packed recurrence matrices.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::dynamics::Enclosures;

/// Square bit matrix, rows packed 64 columns per word.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BitMatrix {
    n: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(n: usize) -> Self {
        let stride = n.div_ceil(64);
        BitMatrix {
            n,
            stride,
            bits: vec![0; stride * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                if f(i, j) {
                    m.set(i, j);
                }
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.bits[i * self.stride + j / 64] >> (j % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.stride + j / 64] |= 1 << (j % 64);
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.stride..(i + 1) * self.stride]
    }

    pub fn count_ones(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// The leading `n x n` block.
    pub fn top_left(&self, n: usize) -> BitMatrix {
        assert!(n <= self.n);
        let mut out = BitMatrix::zeros(n);
        for i in 0..n {
            let src = self.row(i);
            let dst = &mut out.bits[i * out.stride..(i + 1) * out.stride];
            dst.copy_from_slice(&src[..out.stride]);
            if !n.is_multiple_of(64) {
                dst[out.stride - 1] &= (1u64 << (n % 64)) - 1;
            }
        }
        out
    }

    /// Rows packed MSB-first, each padded to a whole byte (PBM P4 layout).
    pub fn to_msb_rows(&self) -> Vec<u8> {
        let row_bytes = self.n.div_ceil(8);
        let mut out = vec![0u8; row_bytes * self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                if self.get(i, j) {
                    out[i * row_bytes + j / 8] |= 0x80 >> (j % 8);
                }
            }
        }
        out
    }
}

/// `R(i, j) = [|x_i - x_j| <= eps]` over the whole slice.
///
/// Points are visited in sorted order so only recurrent pairs are touched.
pub fn recurrence_matrix(xs: &[f64], eps: f64) -> BitMatrix {
    let n = xs.len();
    let mut m = BitMatrix::zeros(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    for p in 0..n {
        let i = order[p];
        m.set(i, i);
        for &j in &order[p + 1..] {
            if !((xs[j] - xs[i]).abs() <= eps) {
                break;
            }
            m.set(i, j);
            m.set(j, i);
        }
    }
    m
}

/// Recurrence decisions from exact enclosures of the true orbit points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnclosureMatrices {
    /// Pairs recurrent for every choice of points in the enclosures.
    pub certain: BitMatrix,
    /// Pairs recurrent for some choice.
    pub possible: BitMatrix,
}

impl EnclosureMatrices {
    pub fn undecided(&self) -> u64 {
        self.possible.count_ones() - self.certain.count_ones()
    }
}

struct Scaled<T> {
    lo: Vec<T>,
    hi: Vec<T>,
    lo_plus: Vec<T>,
    hi_plus: Vec<T>,
}

fn fill<T: Ord>(s: &Scaled<T>, out: &mut EnclosureMatrices) {
    let n = s.lo.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| match s.lo[a].cmp(&s.lo[b]) {
        Ordering::Equal => s.hi[a].cmp(&s.hi[b]),
        o => o,
    });
    let sorted_hi = order.windows(2).all(|w| s.hi[w[0]] <= s.hi[w[1]]);
    for i in 0..n {
        out.certain.set(i, i);
        out.possible.set(i, i);
    }
    if !sorted_hi {
        // nested or overlapping enclosures: no monotone scan
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = if s.lo[i] <= s.lo[j] { (i, j) } else { (j, i) };
                let top = if s.hi[a] >= s.hi[b] { a } else { b };
                if s.hi[top] <= s.lo_plus[a] {
                    out.certain.set(i, j);
                    out.certain.set(j, i);
                }
                if s.lo[b] <= s.hi_plus[a] {
                    out.possible.set(i, j);
                    out.possible.set(j, i);
                }
            }
        }
        return;
    }
    for p in 0..n {
        let i = order[p];
        for &j in &order[p + 1..] {
            if s.lo[j] > s.hi_plus[i] {
                break;
            }
            out.possible.set(i, j);
            out.possible.set(j, i);
            if s.hi[j] <= s.lo_plus[i] {
                out.certain.set(i, j);
                out.certain.set(j, i);
            }
        }
    }
}

/// Certain and possible recurrence matrices at radius `eps`. The diagonal
/// is always set: a point recurs to itself.
pub fn enclosure_matrices(enc: &Enclosures, eps: &BigRational) -> EnclosureMatrices {
    let n = enc.len();
    let mut out = EnclosureMatrices {
        certain: BitMatrix::zeros(n),
        possible: BitMatrix::zeros(n),
    };
    let q = eps.denom();
    let e = eps.numer() * &enc.denom;
    let lo: Vec<BigInt> = enc.lo.iter().map(|x| x * q).collect();
    let hi: Vec<BigInt> = enc.hi.iter().map(|x| x * q).collect();
    let bits = hi.iter().chain([&e]).map(|x| x.bits()).max().unwrap_or(0);
    if bits < 120 {
        let conv = |v: &[BigInt]| -> Vec<i128> { v.iter().map(|x| x.to_i128().unwrap()).collect() };
        let e = e.to_i128().unwrap();
        let (lo, hi) = (conv(&lo), conv(&hi));
        let lo_plus = lo.iter().map(|x| x + e).collect();
        let hi_plus = hi.iter().map(|x| x + e).collect();
        fill(&Scaled { lo, hi, lo_plus, hi_plus }, &mut out);
    } else {
        let lo_plus = lo.iter().map(|x| x + &e).collect();
        let hi_plus = hi.iter().map(|x| x + &e).collect();
        fill(&Scaled { lo, hi, lo_plus, hi_plus }, &mut out);
    }
    out
}
