//! Iterative radix-2 Cooley-Tukey transform.

use std::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// In-place transform of a power-of-two length buffer.
///
/// The inverse is normalized by `1/len`, so `Forward` followed by `Inverse`
/// is the identity up to rounding.
///
/// # Panics
///
/// If `data.len()` is not a power of two.
pub fn fft_in_place(data: &mut [Complex64], direction: Direction) {
    let len = data.len();
    assert!(len.is_power_of_two(), "radix-2 transform needs a power-of-two length, got {len}");
    if len == 1 {
        return;
    }

    let bits = len.trailing_zeros();
    for i in 0..len {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            data.swap(i, j);
        }
    }

    let sign = match direction {
        Direction::Forward => -1.0,
        Direction::Inverse => 1.0,
    };
    // Twiddles are evaluated directly rather than by repeated multiplication
    // so their error does not grow with the transform length.
    let twiddles: Vec<Complex64> = (0..len / 2)
        .map(|k| Complex64::from_polar(1.0, sign * 2.0 * PI * k as f64 / len as f64))
        .collect();

    let mut half = 1;
    while half < len {
        let stride = len / (2 * half);
        for start in (0..len).step_by(2 * half) {
            for k in 0..half {
                let w = twiddles[k * stride];
                let a = data[start + k];
                let b = data[start + k + half] * w;
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        half *= 2;
    }

    if direction == Direction::Inverse {
        let scale = 1.0 / len as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}
