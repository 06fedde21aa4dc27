use serde::Serialize;

/// One row of the dilution diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DilutionRow {
    pub n: usize,
    pub kappa: f64,
    pub w: f64,
    /// `κ_N² w_N log N / N`
    pub ratio: f64,
    /// `κ_N / N`
    pub kappa_over_n: f64,
    /// `ε_N = 32 κ_N² w_N log N / N`
    pub eps: f64,
    /// `1/κ_N ≤ w_N ≤ 1`
    pub bounds_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DilutionReport {
    pub rows: Vec<DilutionRow>,
    pub bounds_ok: bool,
    /// False when a ratio never decreases over the tested range.
    pub asymptotics_ok: bool,
}

impl DilutionReport {
    pub fn passes(&self) -> bool {
        self.bounds_ok && self.asymptotics_ok
    }
}

/// Tabulate the dilution conditions `1/κ_N ≤ w_N ≤ 1`, `κ_N² w_N = o(N / log N)`
/// and `κ_N = o(N)` along `ns`.
pub fn check_dilution(ns: &[usize], kappa: impl Fn(usize) -> f64, w: impl Fn(usize) -> f64) -> DilutionReport {
    let rows: Vec<DilutionRow> = ns
        .iter()
        .map(|&n| {
            let (k, wn) = (kappa(n), w(n));
            let nf = n as f64;
            let ratio = k * k * wn * nf.ln() / nf;
            DilutionRow {
                n,
                kappa: k,
                w: wn,
                ratio,
                kappa_over_n: k / nf,
                eps: 32.0 * ratio,
                bounds_ok: k > 0.0 && 1.0 / k <= wn * (1.0 + 1e-12) && wn <= 1.0,
            }
        })
        .collect();
    let bounds_ok = rows.iter().all(|r| r.bounds_ok);
    let never_decreasing = |f: fn(&DilutionRow) -> f64| rows.len() >= 2 && rows.windows(2).all(|p| f(&p[1]) >= f(&p[0]));
    let asymptotics_ok = !never_decreasing(|r| r.ratio) && !never_decreasing(|r| r.kappa_over_n);
    DilutionReport {
        rows,
        bounds_ok,
        asymptotics_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const NS: [usize; 4] = [100, 1000, 10_000, 100_000];

    #[test]
    fn constant_er_passes() {
        let rho = 0.5;
        let r = check_dilution(&NS, |_| 1.0 / rho, |_| rho);
        assert!(r.passes());
        assert!(r.rows.windows(2).all(|p| p[1].ratio < p[0].ratio));
    }

    #[test]
    fn inverse_n_dilution_fails() {
        let r = check_dilution(&NS, |n| n as f64, |n| 1.0 / n as f64);
        assert!(!r.passes());
        for row in &r.rows {
            assert!((row.ratio - (row.n as f64).ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn dense_case_ratio() {
        let r = check_dilution(&NS, |_| 1.0, |_| 1.0);
        assert!(r.passes());
        for row in &r.rows {
            let n = row.n as f64;
            assert!((row.eps - 32.0 * n.ln() / n).abs() < 1e-15);
        }
    }

    #[test]
    fn bound_violation_is_exact() {
        // w_N < 1/κ_N.
        let r = check_dilution(&NS, |_| 2.0, |_| 0.4);
        assert!(!r.bounds_ok);
    }
}
