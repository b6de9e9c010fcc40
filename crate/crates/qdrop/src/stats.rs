use statrs::distribution::{ContinuousCDF, Normal};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub best: f64,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub count: usize,
}

pub fn summarize(xs: &[f64]) -> Summary {
    let count = xs.len();
    if count == 0 {
        return Summary { best: 0.0, mean: 0.0, std: 0.0, count };
    }
    let mean = xs.iter().sum::<f64>() / count as f64;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / count as f64;
    let best = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Summary { best, mean, std: var.sqrt(), count }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wilcoxon {
    /// Sum of ranks of positive differences.
    pub w_plus: f64,
    /// Nonzero differences.
    pub n: usize,
    /// One-sided p-value for the alternative that `x` exceeds `y`.
    pub p_value: f64,
    pub exact: bool,
}

/// Midranks of `v`, 1-based.
fn ranks(v: &[f64]) -> (Vec<f64>, bool) {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut ties = false;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        ties |= j > i;
        let mid = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = mid;
        }
        i = j + 1;
    }
    (r, ties)
}

/// Paired one-sided signed-rank test of `x > y`. Zero differences are
/// dropped. Exact null distribution for up to 30 untied pairs, otherwise the
/// tie-corrected normal approximation with continuity correction.
pub fn wilcoxon_greater(x: &[f64], y: &[f64]) -> Wilcoxon {
    assert_eq!(x.len(), y.len(), "paired samples must have equal length");
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
    let n = d.len();
    if n == 0 {
        return Wilcoxon { w_plus: 0.0, n, p_value: 1.0, exact: true };
    }
    let abs: Vec<f64> = d.iter().map(|v| v.abs()).collect();
    let (r, ties) = ranks(&abs);
    let w_plus: f64 = d.iter().zip(&r).filter(|(v, _)| **v > 0.0).map(|(_, r)| r).sum();

    if !ties && n <= 30 {
        // counts[s] = number of sign assignments with positive-rank sum s
        let max = n * (n + 1) / 2;
        let mut counts = vec![0f64; max + 1];
        counts[0] = 1.0;
        for k in 1..=n {
            for s in (k..=max).rev() {
                counts[s] += counts[s - k];
            }
        }
        let w = w_plus.round() as usize;
        let tail: f64 = counts[w..].iter().sum();
        let p_value = tail / f64::powi(2.0, n as i32);
        return Wilcoxon { w_plus, n, p_value, exact: true };
    }

    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let mut var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0;
    let mut sorted = abs.clone();
    sorted.sort_by(f64::total_cmp);
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        var -= (t * t * t - t) / 48.0;
        i = j + 1;
    }
    let z = (w_plus - mean - 0.5) / var.sqrt();
    let p_value = 1.0 - Normal::standard().cdf(z);
    Wilcoxon { w_plus, n, p_value, exact: false }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_of_known_sample() {
        let s = summarize(&[0.1, 0.3, 0.2]);
        assert!((s.mean - 0.2).abs() < 1e-15);
        assert_eq!(s.best, 0.3);
        assert!((s.std - (0.02f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(summarize(&[]).count, 0);
    }

    #[test]
    fn exact_tail_small_cases() {
        // all three differences positive: W+ = 6, P = 1/8
        let w = wilcoxon_greater(&[1.0, 2.0, 3.0], &[0.0, 0.0, 0.0]);
        assert_eq!(w.w_plus, 6.0);
        assert!((w.p_value - 0.125).abs() < 1e-15);
        let w = wilcoxon_greater(&[0.0, 0.0, 0.0], &[1.0, 2.0, 3.0]);
        assert_eq!(w.p_value, 1.0);
        // ranks 1..5, positive set {2,5} gives W+ = 7; sums >= 7 occur in 19 of 32 subsets
        let w = wilcoxon_greater(&[0.0, 2.0, 0.0, 0.0, 5.0], &[1.0, 0.0, 3.0, 4.0, 0.0]);
        assert_eq!(w.w_plus, 7.0);
        assert!((w.p_value - 19.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn exact_and_normal_agree_roughly() {
        let x: Vec<f64> = (0..30).map(|i| (i as f64 * 0.37).sin() + 0.4).collect();
        let y: Vec<f64> = (0..30).map(|i| (i as f64 * 0.91).cos() * 0.5).collect();
        let exact = wilcoxon_greater(&x, &y);
        assert!(exact.exact);
        let mut xt = x.clone();
        xt.push(10.0);
        xt.push(10.0);
        let mut yt = y.clone();
        yt.push(9.0);
        yt.push(9.0);
        let approx = wilcoxon_greater(&xt, &yt);
        assert!(!approx.exact);
        assert!(exact.p_value < 0.05 && approx.p_value < 0.05);
    }
}
