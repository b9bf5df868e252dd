use alloc::vec;
use alloc::vec::Vec;

/// Odometer over `{0..base}^len`, last coordinate fastest.
pub(crate) struct Odometer {
    base: usize,
    digits: Vec<usize>,
    done: bool,
}

impl Odometer {
    pub(crate) fn new(base: usize, len: usize) -> Self {
        Odometer {
            base,
            digits: vec![0; len],
            done: base == 0 && len > 0,
        }
    }

    /// Current tuple, or `None` when exhausted.
    pub(crate) fn current(&self) -> Option<&[usize]> {
        if self.done {
            None
        } else {
            Some(&self.digits)
        }
    }

    pub(crate) fn advance(&mut self) {
        for pos in (0..self.digits.len()).rev() {
            self.digits[pos] += 1;
            if self.digits[pos] < self.base {
                return;
            }
            self.digits[pos] = 0;
        }
        self.done = true;
    }
}

/// Calls `visit` on every tuple in `{0..base}^len`.
pub(crate) fn for_each_tuple(base: usize, len: usize, mut visit: impl FnMut(&[usize])) {
    let mut odo = Odometer::new(base, len);
    while let Some(t) = odo.current() {
        visit(t);
        odo.advance();
    }
}

/// `base^len`, saturating.
pub(crate) fn tuple_count(base: usize, len: usize) -> u64 {
    let mut n: u64 = 1;
    for _ in 0..len {
        n = n.saturating_mul(base as u64);
    }
    n
}
