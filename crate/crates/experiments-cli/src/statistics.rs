use lattice_core::{Interface, ParticleConfig};
use macro_evolution::{MacroDensity, MacroInterface};
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// `sup_{a<=b} |ε Σ_{εx∈[a,b]} η(x) - ∫_a^b ρ|`.
///
/// With `S(r) = ε Σ_{εx<=r} η(x) - ∫^r ρ` the sup over intervals is
/// `sup S - inf S`. `S` jumps up at the atoms and decreases in between, so the
/// extremes are the values just before and just after each atom.
pub fn hydro_statistic_density(eta: &ParticleConfig, rho: &MacroDensity, eps: f64) -> f64 {
    let (l, r) = eta.boundaries();
    let (a, b) = rho.window();
    let x0 = l.min(r).min((a / eps).floor() as i64) - 2;
    let x1 = l.max(r).max((b / eps).ceil() as i64) + 2;
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    let mut s = 0.0;
    let mut prev_mass = rho.mass_right(eps * x0 as f64);
    for x in x0..=x1 {
        let mass = rho.mass_right(eps * x as f64);
        s -= prev_mass - mass;
        prev_mass = mass;
        lo = lo.min(s);
        hi = hi.max(s);
        if eta.get(x) {
            s += eps;
            hi = hi.max(s);
        }
    }
    hi - lo
}

/// `sup_x |ε ξ(x) - φ(εx)|`, over both windows and the two cone tails.
pub fn hydro_statistic_interface(xi: &Interface, phi: &MacroInterface, eps: f64) -> f64 {
    let (l, r) = xi.bounds();
    let (a, b) = phi.window();
    let x0 = l.min((a / eps).floor() as i64) - 1;
    let x1 = r.max((b / eps).ceil() as i64) + 1;
    let mut worst = (x0..=x1).map(|x| (eps * xi.get(x) as f64 - phi.eval(eps * x as f64)).abs()).fold(0.0, f64::max);
    let v = xi.vertex();
    let c = phi.offset();
    worst = worst.max((eps * (v.v2 - v.v1) as f64 - c).abs());
    worst.max((eps * (v.v2 + v.v1) as f64 - c).abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Two-sample chi-square test of homogeneity for integer-valued samples.
///
/// Adjacent values are pooled left to right until every bin expects at least
/// five observations from each sample; a short last bin joins its neighbour.
pub fn chi_square_homogeneity(a: &[i64], b: &[i64]) -> ChiSquareResult {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let n = na + nb;
    let mut values: Vec<i64> = a.iter().chain(b).copied().collect();
    values.sort_unstable();
    values.dedup();
    let count = |s: &[i64], v: i64| s.iter().filter(|&&x| x == v).count() as f64;
    let min_total = 5.0 * n / na.min(nb);

    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for v in values {
        acc.0 += count(a, v);
        acc.1 += count(b, v);
        if acc.0 + acc.1 >= min_total {
            bins.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.0 + acc.1 > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => bins.push(acc),
        }
    }
    let statistic: f64 = bins
        .iter()
        .map(|&(oa, ob)| {
            let tot = oa + ob;
            let (ea, eb) = (tot * na / n, tot * nb / n);
            (oa - ea).powi(2) / ea + (ob - eb).powi(2) / eb
        })
        .sum();
    let dof = bins.len().saturating_sub(1);
    let p_value = if dof == 0 { 1.0 } else { 1.0 - ChiSquared::new(dof as f64).expect("positive dof").cdf(statistic) };
    ChiSquareResult { statistic, dof, p_value }
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
