//! Monotonicity classification of degree-indexed sequences.

/// Shape of a sequence indexed by increasing degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Constant,
    NonDecreasing,
    NonIncreasing,
    NonMonotone,
}

impl Monotonicity {
    pub fn is_non_decreasing(self) -> bool {
        matches!(self, Monotonicity::Constant | Monotonicity::NonDecreasing)
    }

    pub fn is_non_increasing(self) -> bool {
        matches!(self, Monotonicity::Constant | Monotonicity::NonIncreasing)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Monotonicity::Constant => "constant",
            Monotonicity::NonDecreasing => "non-decreasing",
            Monotonicity::NonIncreasing => "non-increasing",
            Monotonicity::NonMonotone => "non-monotone",
        }
    }

    /// Combines per-step verdicts `(up_ok, down_ok)`.
    pub(crate) fn from_flags(non_decreasing: bool, non_increasing: bool) -> Self {
        match (non_decreasing, non_increasing) {
            (true, true) => Monotonicity::Constant,
            (true, false) => Monotonicity::NonDecreasing,
            (false, true) => Monotonicity::NonIncreasing,
            (false, false) => Monotonicity::NonMonotone,
        }
    }
}

/// Classifies `values` with absolute tolerance `tol` on each adjacent step.
pub fn classify(values: &[f64], tol: f64) -> Monotonicity {
    let mut up = true;
    let mut down = true;
    for w in values.windows(2) {
        if w[1] < w[0] - tol {
            up = false;
        }
        if w[1] > w[0] + tol {
            down = false;
        }
    }
    Monotonicity::from_flags(up, down)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        assert_eq!(classify(&[1.0, 1.0, 1.0], 1e-9), Monotonicity::Constant);
        assert_eq!(classify(&[1.0, 2.0, 2.0], 1e-9), Monotonicity::NonDecreasing);
        assert_eq!(classify(&[3.0, 2.0, 2.0], 1e-9), Monotonicity::NonIncreasing);
        assert_eq!(classify(&[1.0, 2.0, 1.0], 1e-9), Monotonicity::NonMonotone);
        assert_eq!(classify(&[1.0, 1.0 - 1e-12], 1e-9), Monotonicity::Constant);
        assert_eq!(classify(&[], 1e-9), Monotonicity::Constant);
    }
}
