//! Principal branch of the Lambert W function on the nonnegative axis.

const MAX_ITER: usize = 64;

/// `w ≥ 0` with `w e^w = z`, by Halley iteration.
pub fn lambert_w(z: f64) -> f64 {
    assert!(z >= 0.0, "lambert_w is defined here for z >= 0, got {z}");
    if z == 0.0 {
        return 0.0;
    }
    if z.is_infinite() {
        return f64::INFINITY;
    }
    let mut w = if z <= std::f64::consts::E {
        z.ln_1p()
    } else {
        let l1 = z.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    w
}

/// `W(e^t)`, solved as `w + ln w = t` so large arguments never overflow.
pub fn lambert_w_exp(t: f64) -> f64 {
    if t < 20.0 {
        return lambert_w(t.exp());
    }
    let mut w = t - t.ln();
    for _ in 0..MAX_ITER {
        let f = w + w.ln() - t;
        // Halley on f(w) = w + ln w - t
        let d1 = 1.0 + 1.0 / w;
        let d2 = -1.0 / (w * w);
        let step = f / (d1 - 0.5 * f * d2 / d1);
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w {
            break;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn anchors() {
        assert_eq!(lambert_w(0.0), 0.0);
        assert_relative_eq!(lambert_w(std::f64::consts::E), 1.0, max_relative = 1e-15);
        let w = lambert_w(5.0);
        assert!((w * w.exp() - 5.0).abs() <= 1e-13 * 5.0);
    }

    #[test]
    fn back_substitution_on_log_grid() {
        for k in 0..=320 {
            let z = 10f64.powf(-8.0 + k as f64 * 0.05);
            let w = lambert_w(z);
            assert!(w >= 0.0);
            assert!((w * w.exp() - z).abs() <= 1e-12 * z.max(1.0), "z = {z}, w = {w}");
        }
    }

    #[test]
    fn log_form_agrees_and_extends() {
        for t in [-5.0, 0.0, 3.0, 19.9, 20.0, 25.0, 60.0] {
            let direct = lambert_w(f64::exp(t));
            assert_relative_eq!(lambert_w_exp(t), direct, max_relative = 1e-14);
        }
        // far beyond f64::MAX for e^t
        let w = lambert_w_exp(1000.0);
        assert!((w + w.ln() - 1000.0).abs() < 1e-12);
    }
}
