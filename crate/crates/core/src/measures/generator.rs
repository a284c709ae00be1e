use super::{CylinderFunction, CylinderMeasure, MarkovMeasureSpec, MeasureError};
use crate::lattice::Pattern;

/// `∫ ℒf dμ` as a finite sum.
///
/// A jump across `(x, x+1)` changes `f` only if `x` or `x+1` lies in the
/// support `[a, b]`, and its rate reads `x-1 ..= x+1`, so the sum runs over
/// every word on `[a-2, b+1]`.
pub fn generator_expectation(measure: &dyn CylinderMeasure, f: &CylinderFunction) -> f64 {
    let n = f.len() + 3;
    let offset = f.start() - 2;
    let mut total = 0.0;
    for p in Pattern::all(n) {
        let w = p.as_slice();
        let mut lf = 0.0;
        let before = f.eval_at(w, offset);
        let mut swapped = w.to_vec();
        for i in 1..n - 1 {
            if w[i - 1] == 1 && w[i] == 1 && w[i + 1] == 0 {
                swapped.swap(i, i + 1);
                lf += f.eval_at(&swapped, offset) - before;
                swapped.swap(i, i + 1);
            }
        }
        if lf != 0.0 {
            total += measure.prob(w) * lf;
        }
    }
    total
}

/// `11 (01)^k 00`.
pub fn forbidden_pattern(k: usize) -> Pattern {
    let mut word = vec![1, 1];
    for _ in 0..k {
        word.extend([0, 1]);
    }
    word.extend([0, 0]);
    Pattern::new(word).expect("nonempty")
}

/// Masses of `11 (01)^k 00` for `k = 0 ..= k_max`.
pub fn forbidden_pattern_probs(measure: &dyn CylinderMeasure, k_max: usize) -> Vec<f64> {
    (0..=k_max)
        .map(|k| measure.prob(forbidden_pattern(k).as_slice()))
        .collect()
}

/// `∫ f (g ∘ τ_x) dμ - ∫ f dμ ∫ g dμ` under the renewal measure, from the
/// chain marginals and the `d`-step transition matrix across the gap.
pub fn correlation_decay(
    rho: f64,
    f: &CylinderFunction,
    g: &CylinderFunction,
    x: i64,
) -> Result<f64, MeasureError> {
    let spec = MarkovMeasureSpec::new(rho)?;
    let g_start = g.start() + x;
    if g_start < f.end() {
        return Err(MeasureError::OverlappingSupports(x));
    }
    let step = spec.transition_power((g_start - (f.end() - 1)) as usize);
    let mut cov = 0.0;
    for (u, &fu) in Pattern::all(f.len()).zip(f.weights()) {
        if fu == 0.0 {
            continue;
        }
        let pu = spec.prob(u.as_slice());
        let last = *u.as_slice().last().expect("nonempty") as usize;
        for (v, &gv) in Pattern::all(g.len()).zip(g.weights()) {
            if gv == 0.0 {
                continue;
            }
            let pv = spec.prob(v.as_slice());
            let first = v.as_slice()[0] as usize;
            let joint = pu * step[last][first] / spec.stationary[first] * pv;
            cov += fu * gv * (joint - pu * pv);
        }
    }
    Ok(cov)
}

#[cfg(test)]
mod tests {
    use super::super::ProductMeasure;
    use super::*;

    fn pat(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    #[test]
    fn renewal_measure_is_invariant_for_short_indicators() {
        for rho in [0.6, 0.75, 0.9] {
            let mu = MarkovMeasureSpec::new(rho).unwrap();
            for len in 1..=5 {
                for p in Pattern::all(len) {
                    let v = generator_expectation(&mu, &CylinderFunction::indicator(0, &p));
                    assert!(v.abs() <= 1e-12, "rho {rho} {p}: {v}");
                }
            }
        }
    }

    #[test]
    fn double_zero_indicator() {
        // ℒ 1{00 at (x, x+1)} = -1{1100 at x-2 ..= x+1}
        let f = CylinderFunction::indicator(5, &pat("00"));
        for rho in [0.1, 0.3, 0.5, 0.8] {
            let nu = ProductMeasure { rho };
            let v = generator_expectation(&nu, &f);
            let expected = -(rho * rho * (1.0 - rho) * (1.0 - rho));
            assert!((v - expected).abs() <= 1e-14);
            assert!((v + nu.prob(&[1, 1, 0, 0])).abs() <= 1e-16);
        }
        let mu = MarkovMeasureSpec::new(0.7).unwrap();
        assert_eq!(generator_expectation(&mu, &f), -mu.prob(&[1, 1, 0, 0]));
    }

    #[test]
    fn constants_are_annihilated() {
        let nu = ProductMeasure { rho: 0.4 };
        assert_eq!(
            generator_expectation(&nu, &CylinderFunction::constant(3.0)),
            0.0
        );
    }

    /// Generator applied by brute force on a ring large enough that no jump
    /// wraps into the support, averaged over the exact product law.
    #[test]
    fn matches_ring_brute_force_under_product_measure() {
        let len = 10;
        let f = CylinderFunction::from_fn(4, 3, |w| (w[0] + 2 * w[1]) as f64 - 0.5 * w[2] as f64);
        let rho = 0.35;
        let mut total = 0.0;
        for mask in 0u32..1 << len {
            let eta: Vec<u8> = (0..len).map(|i| ((mask >> i) & 1) as u8).collect();
            let weight: f64 = eta
                .iter()
                .map(|&b| if b == 1 { rho } else { 1.0 - rho })
                .product();
            let mut lf = 0.0;
            for x in 0..len {
                let (l, r) = ((x + len - 1) % len, (x + 1) % len);
                if eta[l] == 1 && eta[x] == 1 && eta[r] == 0 {
                    let mut e = eta.clone();
                    e.swap(x, r);
                    lf += f.eval_at(&e, 0) - f.eval_at(&eta, 0);
                }
            }
            total += weight * lf;
        }
        let exact = generator_expectation(&ProductMeasure { rho }, &f);
        assert!((total - exact).abs() < 1e-13, "{total} vs {exact}");
    }

    #[test]
    fn forbidden_patterns() {
        assert_eq!(forbidden_pattern(2).to_string(), "11010100");
        let mu = MarkovMeasureSpec::new(0.8).unwrap();
        assert!(forbidden_pattern_probs(&mu, 5).iter().all(|&p| p == 0.0));
        let nu = ProductMeasure { rho: 0.5 };
        assert_eq!(forbidden_pattern_probs(&nu, 0), vec![1.0 / 16.0]);
    }

    #[test]
    fn correlation_constants_vanish() {
        let c = CylinderFunction::constant(1.0);
        assert!(correlation_decay(0.7, &c, &c, 3).unwrap().abs() < 1e-15);
        assert!(correlation_decay(0.7, &c, &c, 0).is_err());
    }

    #[test]
    fn correlation_matches_brute_force() {
        let rho = 0.7;
        let mu = MarkovMeasureSpec::new(rho).unwrap();
        let f = CylinderFunction::from_fn(0, 3, |w| w[0] as f64 - w[2] as f64 * 0.5 + 0.25);
        let g = CylinderFunction::from_fn(0, 2, |w| (w[0] * 2 + w[1]) as f64);
        for x in 3..=15i64 {
            let span = (x + g.len() as i64) as usize;
            let mut joint = 0.0;
            for p in Pattern::all(span) {
                let w = p.as_slice();
                let gv = g.eval(&w[x as usize..x as usize + g.len()]);
                joint += mu.prob(w) * f.eval(&w[..3]) * gv;
            }
            let brute = joint - f.expectation(&mu) * g.expectation(&mu);
            let exact = correlation_decay(rho, &f, &g, x).unwrap();
            assert!((brute - exact).abs() < 1e-13, "x {x}: {brute} vs {exact}");
        }
    }

    #[test]
    fn correlation_decays_geometrically() {
        let rho = 0.75;
        let f = CylinderFunction::indicator(0, &pat("1"));
        let g = CylinderFunction::indicator(0, &pat("10"));
        let lambda = (1.0 - rho) / rho;
        let c1 = correlation_decay(rho, &f, &g, 1).unwrap().abs();
        for x in 1..40 {
            let c = correlation_decay(rho, &f, &g, x).unwrap().abs();
            // exact value is c1 λ^(x-1); the difference of products loses ~1e-16
            assert!(c <= c1 * lambda.powi(x as i32 - 1) * (1.0 + 1e-9) + 1e-15);
        }
        assert!(correlation_decay(rho, &f, &g, 30).unwrap().abs() <= 1e-9);
    }
}
