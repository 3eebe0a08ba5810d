//! Integer-order Bessel functions of the first kind and the radial Hankel
//! transform used to move sector states into momentum space.

/// `J_0(x) ..= J_{n_max}(x)` by Miller's backward recurrence, normalised with
/// `J_0 + 2 Σ J_{2k} = 1`.
pub fn bessel_j_orders(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    let ax = x.abs();
    if ax < 1e-300 {
        out[0] = 1.0;
        return out;
    }
    let reach = (n_max as f64).max(ax);
    let mut start = (reach + 20.0 + (60.0 * reach).sqrt()).ceil() as usize;
    start += start % 2;

    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-30; // J_k
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / ax * cur - next;
        next = cur;
        cur = prev;
        let order = k - 1;
        if order <= n_max {
            out[order] = cur;
        }
        if order % 2 == 0 && order > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            out.iter_mut().for_each(|v| *v *= 1e-250);
        }
    }
    norm += cur;
    out.iter_mut().for_each(|v| *v /= norm);
    if x < 0.0 {
        // J_n(-x) = (-1)^n J_n(x)
        out.iter_mut().skip(1).step_by(2).for_each(|v| *v = -*v);
    }
    out
}

/// `J_n(x)` for any integer order, using `J_{-n} = (-1)^n J_n`.
pub fn bessel_j(n: i64, x: f64) -> f64 {
    let m = n.unsigned_abs() as usize;
    let v = bessel_j_orders(m, x)[m];
    if n < 0 && m % 2 == 1 {
        -v
    } else {
        v
    }
}

/// Composite Simpson weights on a uniform grid of `n` points with spacing
/// `h`; an even point count closes with the 3/8 rule on the last interval set.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n];
    match n {
        0 => {}
        1 => {}
        2 => {
            w[0] = h / 2.0;
            w[1] = h / 2.0;
        }
        3 => {
            w[0] = h / 3.0;
            w[1] = 4.0 * h / 3.0;
            w[2] = h / 3.0;
        }
        _ => {
            let simpson_end = if n % 2 == 1 { n - 1 } else { n - 4 };
            for i in (0..simpson_end).step_by(2) {
                w[i] += h / 3.0;
                w[i + 1] += 4.0 * h / 3.0;
                w[i + 2] += h / 3.0;
            }
            if n.is_multiple_of(2) {
                let b = n - 4;
                let c = 3.0 * h / 8.0;
                w[b] += c;
                w[b + 1] += 3.0 * c;
                w[b + 2] += 3.0 * c;
                w[b + 3] += c;
            }
        }
    }
    w
}

/// Order-`order` transform of a radial amplitude `u(ρ)` sampled on `rho`
/// with quadrature weights `weights`:
/// `U(p) = ∫ u(ρ) √(pρ) J_order(pρ) dρ`.
///
/// With `u = √ρ R` this is `√p` times the ordinary Hankel transform of `R`,
/// so `∫|u|² dρ = ∫|U|² dp`.
pub fn hankel_sqrt(u: &[f64], rho: &[f64], weights: &[f64], orders: &[i64], momenta: &[f64]) -> Vec<Vec<f64>> {
    let n_max = orders.iter().map(|o| o.unsigned_abs() as usize).max().unwrap_or(0);
    let mut out = vec![vec![0.0; momenta.len()]; orders.len()];
    for (ip, &p) in momenta.iter().enumerate() {
        for ((&ui, &r), &w) in u.iter().zip(rho).zip(weights) {
            if ui == 0.0 {
                continue;
            }
            let x = p * r;
            let js = bessel_j_orders(n_max, x);
            let base = ui * x.sqrt() * w;
            for (io, &order) in orders.iter().enumerate() {
                let m = order.unsigned_abs() as usize;
                let j = if order < 0 && m % 2 == 1 { -js[m] } else { js[m] };
                out[io][ip] += base * j;
            }
        }
    }
    out
}
