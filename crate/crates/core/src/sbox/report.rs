use serde::{Deserialize, Serialize};

use super::{AntiInvarianceBudget, SBox, SubspaceWitness};
use crate::error::Result;
use crate::gf2::Subspace;

/// Everything the audit needs to know about one brick.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SBoxReport {
    pub m: usize,
    pub shift: u16,
    pub delta: u32,
    pub min_derivative_image: usize,
    pub min_derivative_direction: usize,
    pub nonlinearity: u32,
    pub has_linear_component: bool,
    pub linear_component_mask: Option<u16>,
    pub anti_invariance_order: usize,
    pub anti_invariance_exact: bool,
    /// `(U, f(U))` showing that `anti_invariance_order + 1` fails.
    pub witness: Option<(Subspace, Subspace)>,
}

impl SBoxReport {
    pub fn compute(f: &SBox, budget: AntiInvarianceBudget) -> Result<Self> {
        let img = f.min_derivative_image();
        let lin = f.linearity();
        let ord = f.anti_invariance_order_with(budget)?;
        Ok(Self {
            m: f.m(),
            shift: f.shift(),
            delta: f.differential_uniformity(),
            min_derivative_image: img.size,
            min_derivative_direction: img.direction,
            nonlinearity: lin.nonlinearity,
            has_linear_component: lin.linear_component.is_some(),
            linear_component_mask: lin.linear_component,
            anti_invariance_order: ord.order,
            anti_invariance_exact: ord.exact,
            witness: ord
                .witness
                .map(|SubspaceWitness { domain, image }| (domain, image)),
        })
    }

    /// Smallest `r` with `δ <= 2^r`.
    pub fn uniformity_exponent(&self) -> usize {
        self.delta.next_power_of_two().trailing_zeros() as usize
    }
}

impl SBox {
    pub fn report(&self) -> Result<SBoxReport> {
        SBoxReport::compute(self, AntiInvarianceBudget::default())
    }
}
