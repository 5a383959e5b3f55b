//! Monotone cubic (Fritsch–Carlson) interpolation on a fixed grid.

/// Piecewise-cubic Hermite interpolant whose slopes are limited so the
/// interpolant preserves monotonicity of the data on every sub-interval.
#[derive(Debug, Clone)]
pub struct Pchip {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl Pchip {
    /// Build from strictly increasing abscissae. Panics on fewer than two
    /// points or non-monotone xs.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        assert!(xs.len() >= 2, "pchip needs at least two points");
        assert_eq!(xs.len(), ys.len());
        assert!(
            xs.windows(2).all(|w| w[1] > w[0]),
            "pchip grid must be strictly increasing"
        );

        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();

        let mut m = vec![0.0; n];
        m[0] = edge_slope(h[0], h.get(1).copied().unwrap_or(h[0]), delta[0], delta.get(1).copied().unwrap_or(delta[0]));
        m[n - 1] = edge_slope(
            h[n - 2],
            if n >= 3 { h[n - 3] } else { h[n - 2] },
            delta[n - 2],
            if n >= 3 { delta[n - 3] } else { delta[n - 2] },
        );
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] <= 0.0 {
                m[i] = 0.0;
            } else {
                // weighted harmonic mean keeps the interpolant monotone
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }

        Pchip { xs, ys, slopes: m }
    }

    /// Evaluate at `x`; clamps outside the grid to the boundary values'
    /// cubic on the nearest interval.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let i = match self.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => return self.ys[i],
            Err(0) => 0,
            Err(i) if i >= n => n - 2,
            Err(i) => i - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }

    pub fn x_min(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.xs.last().expect("non-empty")
    }
}

fn edge_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    // one-sided three-point estimate, limited per Fritsch–Carlson
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reproduces_nodes_exactly() {
        let xs = vec![0.0, 1.0, 2.5, 4.0];
        let ys = vec![1.0, 3.0, -2.0, 0.5];
        let p = Pchip::new(xs.clone(), ys.clone());
        for (x, y) in xs.iter().zip(&ys) {
            assert_abs_diff_eq!(p.eval(*x), *y, epsilon = 1e-14);
        }
    }

    #[test]
    fn monotone_data_stays_monotone() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.37).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.tanh()).collect();
        let p = Pchip::new(xs.clone(), ys);
        let mut prev = f64::NEG_INFINITY;
        let mut x = xs[0];
        while x <= *xs.last().unwrap() {
            let y = p.eval(x);
            assert!(y >= prev - 1e-12, "interpolant lost monotonicity at {x}");
            prev = y;
            x += 0.01;
        }
    }

    #[test]
    fn accuracy_on_smooth_function() {
        let xs: Vec<f64> = (0..200).map(|i| 0.05 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (x * 0.7).sin()).collect();
        let p = Pchip::new(xs, ys);
        // slope limiting near extrema costs an order relative to a plain
        // cubic spline; 2e-4 reflects the h = 0.05 grid
        for i in 0..500 {
            let x = 0.01 + i as f64 * 0.019;
            assert_abs_diff_eq!(p.eval(x), (x * 0.7).sin(), epsilon = 2e-4);
        }
    }
}
