//! Rounding lemmas and their consequences, one checker per statement. Each
//! returns the number of `(q, λ)` pairs it examined, or a description of the
//! first failure.

use apportion::model::{admissible_lambdas, scale_apportionment};
use apportion::quota_methods::upper_lower_sets;
use apportion::{Apportionment, Method, TiePolicy};
use num_rational::Ratio;
use num_traits::Zero;
use rand::Rng;

use super::instance;

pub type Q = Ratio<i128>;

/// `[x]`, halves rounded up.
pub fn nearest(x: Q) -> i128 {
    (x + Q::new(1, 2)).floor().to_integer()
}

fn floor(x: Q) -> i128 {
    x.floor().to_integer()
}

fn ceil(x: Q) -> i128 {
    x.ceil().to_integer()
}

/// A reduced `p/q < 1` and a positive `k` with `λk` integral.
pub fn sample_scaled<R: Rng>(rng: &mut R) -> (i128, Q) {
    let q = rng.gen_range(2..=12i128);
    let p = loop {
        let p = rng.gen_range(1..q);
        if num_integer::gcd(p, q) == 1 {
            break p;
        }
    };
    let k = q * rng.gen_range(1..=40);
    (k, Q::new(p, q))
}

/// A rational in `[lo, hi)` on a random grid.
pub fn sample_in<R: Rng>(rng: &mut R, lo: Q, hi: Q) -> Q {
    let d = rng.gen_range(1..=997i128);
    let span = ((hi - lo) * d).ceil().to_integer();
    let x = lo + Q::new(rng.gen_range(0..span), d);
    if x < hi {
        x
    } else {
        lo
    }
}

/// `⌊λq⌋ = λk` at `q = k + x` and `⌈λq⌉ = λk` at `q = k - x`, for `x ∈ [0, 1)`.
pub fn scaled_floor_ceil(k: i128, lambda: Q, x: Q) -> Result<usize, String> {
    let lk = lambda * k;
    assert!(lk.is_integer() && x >= Q::zero() && x < Q::from(1));
    let up = Q::from(k) + x;
    if floor(lambda * up) != lk.to_integer() {
        return Err(format!("⌊λq⌋ ≠ λk at q={up}, λ={lambda}"));
    }
    let down = Q::from(k) - x;
    if ceil(lambda * down) != lk.to_integer() {
        return Err(format!("⌈λq⌉ ≠ λk at q={down}, λ={lambda}"));
    }
    Ok(2)
}

/// `[λq]` stays between `λk` and `λk ± t` when `[q] = k ± t`, and equals `λk`
/// once `λ ≤ 1/(2t+1)`. Here `q = k ± t + x` with `x ∈ [-1/2, 1/2)`.
pub fn scaled_nearest(k: i128, t: i128, above: bool, lambda: Q, x: Q) -> Result<usize, String> {
    let lk = (lambda * k).to_integer();
    let r = if above { k + t } else { k - t };
    let q = Q::from(r) + x;
    assert_eq!(nearest(q), r);
    let got = nearest(lambda * q);
    let (lo, hi) = if above { (lk, lk + t) } else { (lk - t, lk) };
    if got < lo || got > hi {
        return Err(format!("[λq]={got} outside [{lo}, {hi}] at q={q}, λ={lambda}"));
    }
    if lambda <= Q::new(1, 2 * t + 1) && got != lk {
        return Err(format!("[λq]={got} ≠ λk={lk} at q={q}, λ={lambda} ≤ 1/(2t+1)"));
    }
    Ok(1)
}

fn quotas(pops: &[i128], house: u64) -> Vec<Q> {
    let total: i128 = pops.iter().sum();
    pops.iter().map(|&v| Q::new(house as i128 * v, total)).collect()
}

/// Bounds on `Σ[λq_i]` around `λH` for `h = F(v, H)` and every admissible
/// `λ`, with equality once `λ ≤ 1/(2k+1)`. The per-state
/// deviations `[q_i] - h_i` must share a sign, as they do for NIE and NIS.
pub fn nearest_sum(pops: &[i128], h: &[u64]) -> Result<usize, String> {
    let house: u64 = h.iter().sum();
    if house == 0 {
        return Ok(0);
    }
    let q = quotas(pops, house);
    let dev: Vec<i128> = q.iter().zip(h).map(|(&x, &k)| nearest(x) - k as i128).collect();
    assert!(dev.iter().all(|&d| d >= 0) || dev.iter().all(|&d| d <= 0), "mixed deviations {dev:?}");
    let c: i128 = dev.iter().sum();
    let k = dev.iter().map(|d| d.abs()).max().unwrap_or(0);
    let mut n = 0;
    for lambda in admissible_lambdas(&Apportionment::from_seats(h.to_vec())).unwrap() {
        let lambda = Q::new(lambda.numer() as i128, lambda.denom() as i128);
        let lh = (lambda * house as i128).to_integer();
        let s: i128 = q.iter().map(|&x| nearest(lambda * x)).sum();
        let ok = if c >= 0 {
            lh <= s && s <= lh + c
        } else {
            lh + c <= s && s <= lh
        };
        if !ok {
            return Err(format!("Σ[λq]={s} outside bounds, λH={lh}, c={c}, v={pops:?}, h={h:?}"));
        }
        if lambda <= Q::new(1, 2 * k + 1) && s != lh {
            return Err(format!("Σ[λq]={s} ≠ λH={lh} at λ={lambda}, k={k}, v={pops:?}, h={h:?}"));
        }
        n += 1;
    }
    Ok(n)
}

/// For a quota-satisfying method: at every admissible `λ` with tie-free
/// evaluations, `|U(v, λH)| = |U(v, H)|`, and `q_i` is an integer exactly
/// when `λq_i` is.
pub fn upper_count_preserved(method: &Method, pops: &[i128], house: u64) -> Result<usize, String> {
    let v = instance(pops);
    let policy = TiePolicy::default();
    let h = method.apportion(&v, house, policy).map_err(|e| e.to_string())?;
    if house == 0 || h.tie_flag() {
        return Ok(0);
    }
    let zero = num_rational::BigRational::zero();
    let u = upper_lower_sets(&v, house, &h, &zero).map_err(|e| e.to_string())?.upper.len();
    let q = quotas(pops, house);
    let mut n = 0;
    for lambda in admissible_lambdas(&h).unwrap() {
        let small = lambda.apply(house).unwrap();
        let h2 = method.apportion(&v, small, policy).map_err(|e| e.to_string())?;
        if h2.tie_flag() {
            continue;
        }
        let u2 = upper_lower_sets(&v, small, &h2, &zero).map_err(|e| e.to_string())?.upper.len();
        if u2 != u {
            return Err(format!("{method} v={pops:?} H={house} λ={lambda}: |U| {u} → {u2}"));
        }
        let l = Q::new(lambda.numer() as i128, lambda.denom() as i128);
        if let Some(i) = q.iter().position(|&x| x.is_integer() != (l * x).is_integer()) {
            return Err(format!("{method} v={pops:?} H={house} λ={lambda}: integrality of q_{i} changes"));
        }
        n += 1;
    }
    Ok(n)
}

/// NIS reproduces `λh` at every admissible `λ ≤ 1/3`. Tie-affected
/// evaluations are skipped.
pub fn nis_third(pops: &[i128], house: u64) -> Result<usize, String> {
    let v = instance(pops);
    let policy = TiePolicy::default();
    let h = Method::Nis.apportion(&v, house, policy).map_err(|e| e.to_string())?;
    if house == 0 || h.tie_flag() {
        return Ok(0);
    }
    let mut n = 0;
    for lambda in admissible_lambdas(&h).unwrap() {
        if lambda.numer() * 3 > lambda.denom() {
            break;
        }
        let expected = scale_apportionment(&h, lambda).unwrap();
        let got = Method::Nis
            .apportion(&v, expected.house(), policy)
            .map_err(|e| e.to_string())?;
        if got.tie_flag() {
            continue;
        }
        if got.seats() != expected.seats() {
            return Err(format!("NIS v={pops:?} H={house} λ={lambda}: {:?} ≠ {:?}", got.seats(), expected.seats()));
        }
        n += 1;
    }
    Ok(n)
}
