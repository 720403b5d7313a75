//! Small numeric helpers shared by the evaluators: compensated summation and
//! power functions with the `0^y = 0` convention.

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// Running compensated prefix sums: `out[i] = xs[0] + ... + xs[i]`.
pub fn prefix_sums(xs: &[f64]) -> Vec<f64> {
    let mut acc = CompensatedSum::new();
    xs.iter()
        .map(|&x| {
            acc.add(x);
            acc.value()
        })
        .collect()
}

/// Running compensated tail sums: `out[i] = xs[i] + ... + xs[n-1]`.
pub fn tail_sums(xs: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; xs.len()];
    let mut acc = CompensatedSum::new();
    for (i, &x) in xs.iter().enumerate().rev() {
        acc.add(x);
        out[i] = acc.value();
    }
    out
}

/// `x^y` for `x ≥ 0`, with `0^y = 0` for every `y` (callers only reach a zero
/// base with `y > 0`, or on skipped terms whose contribution is zero anyway).
#[inline]
pub fn pow0(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if y == 1.0 {
        x
    } else {
        x.powf(y)
    }
}

/// Relative difference `|a - b| / max(|a|, |b|)`; zero when `a == b`
/// (including two equal infinities).
pub fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_recovers_cancelled_mass() {
        let xs = [1e16, 1.0, -1e16];
        assert_eq!(compensated_sum(xs), 1.0);
        assert_eq!(xs.iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn prefix_and_tail() {
        assert_eq!(prefix_sums(&[2.0, 3.0, 5.0]), vec![2.0, 5.0, 10.0]);
        assert_eq!(tail_sums(&[2.0, 3.0, 5.0]), vec![10.0, 8.0, 5.0]);
        assert!(prefix_sums(&[]).is_empty());
    }

    #[test]
    fn zero_power_is_zero() {
        assert_eq!(pow0(0.0, 2.5), 0.0);
        assert_eq!(pow0(0.0, -1.0), 0.0);
        assert_eq!(pow0(4.0, 0.5), 2.0);
    }
}
