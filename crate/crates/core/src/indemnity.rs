use std::sync::Arc;

/// A contract `x ↦ I(x)` paying `I(x)` on a loss of `x`.
pub trait Indemnity: Send + Sync {
    fn eval(&self, x: f64) -> f64;

    /// Loss levels where `I` (or `g ∘ I`) is not smooth. Used as
    /// mandatory quadrature panel edges.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Wraps a closure as an [`Indemnity`].
#[derive(Clone)]
pub struct FnIndemnity {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    breakpoints: Vec<f64>,
}

impl FnIndemnity {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(f),
            breakpoints: Vec::new(),
        }
    }

    pub fn with_breakpoints(mut self, breakpoints: Vec<f64>) -> Self {
        self.breakpoints = breakpoints;
        self
    }

    /// `I ≡ 0`.
    pub fn none() -> Self {
        Self::new(|_| 0.0)
    }

    /// `I(x) = x`.
    pub fn full() -> Self {
        Self::new(|x| x)
    }

    /// `I(x) = (x - d)_+`.
    pub fn deductible(d: f64) -> Self {
        Self::new(move |x| (x - d).max(0.0)).with_breakpoints(vec![d])
    }
}

impl Indemnity for FnIndemnity {
    fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.breakpoints.clone()
    }
}

impl<T: Indemnity + ?Sized> Indemnity for &T {
    fn eval(&self, x: f64) -> f64 {
        (**self).eval(x)
    }

    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
}
