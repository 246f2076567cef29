//! Closed-form storage/bandwidth/secrecy trade-off analytics, in exact
//! integer and rational arithmetic.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_rational::Ratio;

use crate::secure_layout::{secret_capacity, Scheme};
use crate::subsets::binom;

pub type Q = Ratio<i128>;

fn b(n: usize, k: usize) -> i128 {
    binom(n as i64, k as i64) as i128
}

fn bi(n: i64, k: i64) -> i128 {
    binom(n, k) as i128
}

fn q(n: i128) -> Q {
    Q::from_integer(n)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradeoffPoint {
    pub scheme: Scheme,
    pub d: usize,
    pub ell: usize,
    pub m: usize,
    pub alpha: u64,
    pub beta: u64,
    pub fs: u64,
    /// `α / F_s`, absent when `F_s = 0`.
    pub alpha_norm: Option<Q>,
    pub beta_norm: Option<Q>,
    pub pareto: bool,
}

fn raw_point(d: usize, ell: usize, m: usize, scheme: Scheme) -> TradeoffPoint {
    let alpha = b(d, m) as u64;
    let beta = b(d - 1, m - 1) as u64;
    let fs = secret_capacity(scheme, d, ell, m) as u64;
    let norm = |x: u64| (fs > 0).then(|| Q::new(x as i128, fs as i128));
    TradeoffPoint {
        scheme,
        d,
        ell,
        m,
        alpha,
        beta,
        fs,
        alpha_norm: norm(alpha),
        beta_norm: norm(beta),
        pareto: false,
    }
}

/// The achievable tuple at mode `m`. `pareto` marks whether the mode is a
/// vertex of the lower-left boundary of the achievable region.
///
/// Panics unless `1 ≤ m ≤ d`.
pub fn point(d: usize, ell: usize, m: usize, scheme: Scheme) -> TradeoffPoint {
    assert!(1 <= m && m <= d, "need 1 <= m <= d");
    let mut p = raw_point(d, ell, m, scheme);
    p.pareto = pareto_points_bruteforce(d, ell, scheme).contains(&m);
    p
}

/// Number of Pareto points of the Type-II region: the largest `t` with
/// `(2ℓt + 1)² < 1 + 4ℓ(d + 1)`. For `ℓ = 0` this is `d`, the number of
/// corner points of the non-secure region.
pub fn pareto_count(d: usize, ell: usize) -> usize {
    if ell == 0 {
        return d;
    }
    let (d, ell) = (d as i128, ell as i128);
    let rhs = 1 + 4 * ell * (d + 1);
    let mut t = 0;
    while (2 * ell * (t + 1) + 1).pow(2) < rhs {
        t += 1;
    }
    t as usize
}

fn cross(o: (Q, Q), a: (Q, Q), b: (Q, Q)) -> Q {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Modes whose normalised pair is a vertex of the lower-left boundary of
/// `conv(points) + R²₊`. Modes with `F_s = 0` are left out; collinear
/// middle points are not vertices.
pub fn pareto_points_bruteforce(d: usize, ell: usize, scheme: Scheme) -> Vec<usize> {
    let mut pts: Vec<((Q, Q), usize)> = (1..=d)
        .map(|m| raw_point(d, ell, m, scheme))
        .filter_map(|p| Some(((p.alpha_norm?, p.beta_norm?), p.m)))
        .collect();
    if pts.is_empty() {
        return Vec::new();
    }
    pts.sort();
    pts.dedup_by(|a, b| a.0 == b.0);
    // Lower hull, left to right; pops on non-left turns drop collinear points.
    let mut hull: Vec<((Q, Q), usize)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2].0, hull[hull.len() - 1].0, p.0) <= q(0) {
            hull.pop();
        }
        hull.push(p);
    }
    // Keep the descending part: stop at the first vertex with minimal β̄.
    let min_beta = hull.iter().map(|h| h.0 .1).min().expect("nonempty");
    let end = hull.iter().position(|h| h.0 .1 == min_beta).expect("present");
    let mut modes: Vec<usize> = hull[..=end].iter().map(|h| h.1).collect();
    modes.sort_unstable();
    modes
}

/// The converse bound on the secret size of a mode-`m` determinant code,
/// evaluated from its entropy chain rather than the closed form.
pub fn converse_value(d: usize, ell: usize, m: usize, scheme: Scheme) -> u64 {
    let (di, li, mi) = (d as i64, ell as i64, m as i64);
    let alpha = bi(di, mi);
    let v: i128 = match scheme {
        Scheme::Plain => (mi as i128) * bi(di + 1, mi + 1),
        // Σ_{i=ℓ+2}^{d+1} [C(d,m) - C(d-(i-ℓ-1), m)]
        Scheme::TypeI => (li + 2..=di + 1).map(|i| alpha - bi(di - (i - li - 1), mi)).sum(),
        // m·C(d-ℓ,m) + Σ_{u=ℓ+m+2}^{d+1} [(C(d,m) - C(d+m+1-u,m)) - (C(d,m) - C(d-ℓ,m))]
        Scheme::TypeII => {
            let first = mi as i128 * bi(di - li, mi);
            let second: i128 = (li + mi + 2..=di + 1)
                .map(|u| (alpha - bi(di + mi + 1 - u, mi)) - (alpha - bi(di - li, mi)))
                .sum();
            first + second
        }
    };
    v.max(0) as u64
}

/// `Σ_{i=ℓ}^{d-1} min(α, (d-i)β)`.
pub fn cutset_bound(d: usize, ell: usize, alpha: u64, beta: u64) -> u64 {
    (ell..d).map(|i| alpha.min((d - i) as u64 * beta)).sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundCheck {
    pub name: &'static str,
    pub scheme: Scheme,
    pub bound: Q,
    pub achieved: Q,
    pub holds: bool,
    pub equality: bool,
}

impl BoundCheck {
    fn new(name: &'static str, scheme: Scheme, bound: Q, achieved: u64) -> Self {
        let achieved = q(achieved as i128);
        BoundCheck {
            name,
            scheme,
            holds: achieved <= bound,
            equality: achieved == bound,
            bound,
            achieved,
        }
    }
}

/// Every known outer bound that applies to `(d, ℓ, m)` with `k = d`, checked
/// against the achievable secret sizes. Bounds that depend on `n` use
/// `n`, defaulting to `d + 1`.
pub fn external_bound_check(d: usize, ell: usize, m: usize, n: Option<usize>) -> Vec<BoundCheck> {
    let n = n.unwrap_or(d + 1);
    let p1 = raw_point(d, ell, m, Scheme::TypeI);
    let p2 = raw_point(d, ell, m, Scheme::TypeII);
    let (alpha, beta) = (q(p1.alpha as i128), q(p1.beta as i128));
    let (di, li) = (d as i128, ell as i128);
    let mut out = Vec::new();

    let cut = q(cutset_bound(d, ell, p1.alpha, p1.beta) as i128);
    if ell < d {
        out.push(BoundCheck::new("cut-set", Scheme::TypeI, cut, p1.fs));
        out.push(BoundCheck::new(
            "ordering",
            Scheme::TypeII,
            q(p1.fs as i128),
            p2.fs,
        ));
    }
    out.push(BoundCheck::new("cut-set", Scheme::TypeII, cut, p2.fs));

    if m == 1 && ell < d {
        // α = dβ code at the bandwidth-optimal point.
        let v = (di * di - b(d, 2)) - (li * di - b(ell, 2));
        out.push(BoundCheck::new("mbr-type1", Scheme::TypeI, q(v) * beta, p1.fs));
    }
    if ell == 1 {
        let v = q(di - 1) * (alpha + q(di) * beta) / q(4);
        out.push(BoundCheck::new("type2-ell1-linear", Scheme::TypeII, v, p2.fs));
    }
    if d == 2 && ell == 1 {
        out.push(BoundCheck::new(
            "d2-capacity",
            Scheme::TypeI,
            alpha.min(beta),
            p1.fs,
        ));
        out.push(BoundCheck::new(
            "d2-capacity",
            Scheme::TypeII,
            (alpha / q(2)).min(beta),
            p2.fs,
        ));
    }
    if n == d + 1 && ell >= 1 && ell + 1 == d {
        out.push(BoundCheck::new(
            "ell-d-minus-1-capacity",
            Scheme::TypeI,
            alpha.min(beta),
            p1.fs,
        ));
        out.push(BoundCheck::new(
            "ell-d-minus-1-capacity",
            Scheme::TypeII,
            (alpha / q(di)).min(beta),
            p2.fs,
        ));
    }
    if ell >= 1 && ell <= d {
        // ℓ ≤ min(n - d, d/2), compared without division.
        let small = ell <= n.saturating_sub(d) && 2 * ell <= d;
        let v = if small {
            q((di - li) * (di - li)) * alpha / q(di)
        } else {
            q((di - li) * (di - 1)) * alpha / q(di)
        };
        out.push(BoundCheck::new("type2-alpha", Scheme::TypeII, v, p2.fs));
    }
    if d == 3 && ell == 1 {
        let v1 = (alpha.min(q(2) * beta) + alpha.min(beta)).min((alpha + q(6) * beta) / q(3));
        out.push(BoundCheck::new("d3-ell1-capacity", Scheme::TypeI, v1, p1.fs));
        out.push(BoundCheck::new(
            "d3-ell1-capacity",
            Scheme::TypeII,
            alpha.min(q(3) * beta),
            p2.fs,
        ));
    }
    out
}

/// For `n = d + 1`, the family `(C(n-1,t-1)/(t-1), C(n-1,t-1)/d, C(n-ℓ,t))`,
/// `t ∈ [2, n-ℓ]`, is the Type-II tuple of mode `t - 1` scaled by `1/(t-1)`.
pub fn scaled_family_matches(d: usize, ell: usize) -> bool {
    let n = d + 1;
    (2..=n.saturating_sub(ell)).all(|t| {
        let m = t - 1;
        let p = raw_point(d, ell, m, Scheme::TypeII);
        let s = q(m as i128);
        Q::new(b(n - 1, t - 1), (t - 1) as i128) == q(p.alpha as i128) / s
            && Q::new(b(n - 1, t - 1), d as i128) == q(p.beta as i128) / s
            && q(b(n - ell, t)) == q(p.fs as i128) / s
    })
}

/// `r` as a plain decimal with `digits` significant digits, rounded half
/// up, trailing zeros removed.
pub fn decimal(r: Q, digits: u32) -> String {
    let (mut p, qd) = (*r.numer(), *r.denom());
    if p == 0 {
        return "0".into();
    }
    let neg = p < 0;
    p = p.abs();
    let (p, qd) = (p as u128, qd as u128);
    // Find e with 10^(digits-1) ≤ p·10^e / q < 10^digits.
    let lo = 10u128.pow(digits - 1);
    let mut e: i32 = 0;
    let scaled = |e: i32| -> (u128, u128) {
        if e >= 0 {
            (p * 10u128.pow(e as u32), qd)
        } else {
            (p, qd * 10u128.pow((-e) as u32))
        }
    };
    loop {
        let (num, den) = scaled(e);
        let v = num / den;
        if v < lo {
            e += 1;
        } else if v >= lo * 10 {
            e -= 1;
        } else {
            break;
        }
    }
    let (num, den) = scaled(e);
    let mut v = num / den;
    if 2 * (num % den) >= den {
        v += 1;
    }
    let mut s = format!("{v}");
    // Value is v · 10^(-e).
    let point = s.len() as i32 - e;
    if point <= 0 {
        let zeros: String = core::iter::repeat_n('0', (-point) as usize).collect();
        s = format!("0.{zeros}{s}");
    } else if (point as usize) < s.len() {
        s.insert(point as usize, '.');
    } else {
        let zeros: String = core::iter::repeat_n('0', point as usize - s.len()).collect();
        s.push_str(&zeros);
    }
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if neg {
        s.insert(0, '-');
    }
    s
}

fn render(r: Option<Q>, exact: bool) -> String {
    match r {
        None => String::new(),
        Some(r) if exact => format!("{}/{}", r.numer(), r.denom()),
        Some(r) => decimal(r, 12),
    }
}

pub const CSV_HEADER: &str = "scheme,d,ell,m,alpha,beta,Fs,alpha_norm,beta_norm,pareto";

/// One CSV row per valid `(scheme, d, ℓ, m)`. The plain scheme ignores `ℓ`
/// and is listed once per `d` with `ℓ = 0`. With `exact`, normalised
/// values are written as `p/q`.
pub fn emit_tradeoff_csv(ds: &[usize], ells: &[usize], schemes: &[Scheme], exact: bool) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for &scheme in schemes {
        for &d in ds {
            if d == 0 {
                continue;
            }
            let ell_list: Vec<usize> = match scheme {
                Scheme::Plain if ells.is_empty() => Vec::new(),
                Scheme::Plain => alloc::vec![0],
                Scheme::TypeI => ells.iter().copied().filter(|&l| l < d).collect(),
                Scheme::TypeII => ells.iter().copied().filter(|&l| l <= d).collect(),
            };
            for ell in ell_list {
                let pareto = pareto_points_bruteforce(d, ell, scheme);
                for m in 1..=d {
                    let p = raw_point(d, ell, m, scheme);
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{},{}\n",
                        scheme.name(),
                        d,
                        ell,
                        m,
                        p.alpha,
                        p.beta,
                        p.fs,
                        render(p.alpha_norm, exact),
                        render(p.beta_norm, exact),
                        pareto.contains(&m)
                    ));
                }
            }
        }
    }
    out
}
