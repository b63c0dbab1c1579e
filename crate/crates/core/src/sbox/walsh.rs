use super::SBox;

/// In-place fast Walsh-Hadamard transform (unnormalized butterfly).
pub fn fwht(data: &mut [i32]) {
    let n = data.len();
    assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (data[j], data[j + h]);
                data[j] = a + b;
                data[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinearityReport {
    /// `2^(m-1) - max |W| / 2` over nonzero components.
    pub nonlinearity: u32,
    /// First output mask whose component is affine, if any.
    pub linear_component: Option<u16>,
    /// Input mask at which that component's spectrum reaches `±2^m`.
    pub input_mask: Option<u16>,
}

impl SBox {
    /// Walsh spectrum of the component `x -> <c, f(x)>`.
    pub fn component_spectrum(&self, c: u16) -> Vec<i32> {
        let mut w: Vec<i32> = self
            .normalized_table()
            .iter()
            .map(|&y| if (y & c).count_ones() & 1 == 1 { -1 } else { 1 })
            .collect();
        fwht(&mut w);
        w
    }

    pub fn linearity(&self) -> LinearityReport {
        let n = self.len() as i32;
        let mut max_abs = 0;
        let mut linear = None;
        for c in 1..self.len() as u16 {
            let w = self.component_spectrum(c);
            let (a, peak) = w
                .iter()
                .enumerate()
                .map(|(a, v)| (a, v.abs()))
                .max_by_key(|&(a, v)| (v, std::cmp::Reverse(a)))
                .unwrap();
            if peak == n && linear.is_none() {
                linear = Some((c, a as u16));
            }
            max_abs = max_abs.max(peak);
        }
        LinearityReport {
            nonlinearity: ((n - max_abs) / 2) as u32,
            linear_component: linear.map(|l| l.0),
            input_mask: linear.map(|l| l.1),
        }
    }

    pub fn has_linear_component(&self) -> bool {
        self.linearity().linear_component.is_some()
    }
}
