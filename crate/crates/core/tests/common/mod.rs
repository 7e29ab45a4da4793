//! Independent oracles shared by the integration suites. Nothing here calls
//! into the code paths it is used to check.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Double-double value `hi + lo` times `2^exp`.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    hi: f64,
    lo: f64,
    exp: i32,
}

impl Scaled {
    fn one() -> Self {
        Self { hi: 1.0, lo: 0.0, exp: 0 }
    }

    fn mul(self, bh: f64, bl: f64) -> Self {
        let (p, e) = two_prod(self.hi, bh);
        let e = e + (self.hi * bl + self.lo * bh);
        let (hi, lo) = two_sum(p, e);
        let mut out = Self { hi, lo, exp: self.exp };
        const BIG: f64 = 1.2676506002282294e30; // 2^100
        while out.hi.abs() > BIG {
            out.hi /= BIG;
            out.lo /= BIG;
            out.exp += 100;
        }
        while out.hi.abs() < 1.0 / BIG {
            out.hi *= BIG;
            out.lo *= BIG;
            out.exp -= 100;
        }
        out
    }

    fn ln(self) -> f64 {
        self.hi.ln() + (self.lo / self.hi).ln_1p() + self.exp as f64 * std::f64::consts::LN_2
    }
}

/// `log(Π (1 + L·X_i)(1 - r/252))` via an extended-precision running product.
pub fn product_then_log(changes: &[f64], leverage: f64, annual_fee: f64) -> f64 {
    let fee = two_sum(1.0, -(annual_fee / 252.0));
    let mut acc = Scaled::one();
    for &x in changes {
        let (p, e) = two_prod(leverage, x);
        let (s, e2) = two_sum(1.0, p);
        let (hi, lo) = two_sum(s, e2 + e);
        acc = acc.mul(hi, lo);
        if annual_fee != 0.0 {
            acc = acc.mul(fee.0, fee.1);
        }
    }
    acc.ln()
}

/// Daily changes whose log-returns are normal with the given drift and sd.
pub fn lognormal_changes(seed: u64, len: usize, drift: f64, sd: f64) -> Vec<f64> {
    let mut r = rng(seed);
    let normal = Normal::new(drift, sd).unwrap();
    (0..len).map(|_| normal.sample(&mut r).exp_m1()).collect()
}

/// Leverage on a uniform grid over `[lo, hi]` maximising `(L-1)(u - L·v/2)`.
pub fn grid_argmax(u: f64, v: f64, lo: f64, hi: f64, step: f64) -> f64 {
    let steps = ((hi - lo) / step).round() as i64;
    let mut best = (f64::NEG_INFINITY, lo);
    for k in 0..=steps {
        let l = lo + k as f64 * step;
        let g = (l - 1.0) * (u - l * v / 2.0);
        if g > best.0 {
            best = (g, l);
        }
    }
    best.1
}

pub fn uniform(r: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    r.gen_range(lo..=hi)
}
