use rayon::prelude::*;

use super::SBox;
use crate::error::{Error, Result};
use crate::gf2::subspace::Echelon;
use crate::gf2::{gaussian_binomial, total_subspaces, EnumerationCap, Subspace, SubspaceEnumerator};

/// Limits on the subspace scan behind strong anti-invariance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AntiInvarianceBudget {
    pub cap: EnumerationCap,
    /// Maximum number of candidate subspaces examined by one query.
    pub max_subspaces: u128,
}

impl AntiInvarianceBudget {
    /// Enough for `m = 10, r = 3` (about 6.5 million subspaces).
    pub const DEFAULT_MAX_SUBSPACES: u128 = 1 << 23;
}

impl Default for AntiInvarianceBudget {
    fn default() -> Self {
        Self {
            cap: EnumerationCap::default(),
            max_subspaces: Self::DEFAULT_MAX_SUBSPACES,
        }
    }
}

/// A subspace `domain` whose image under the S-box is the subspace `image`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceWitness {
    pub domain: Subspace,
    pub image: Subspace,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AntiInvarianceCheck {
    pub r: usize,
    pub holds: bool,
    pub witness: Option<SubspaceWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderResult {
    pub order: usize,
    /// False when the budget ran out before a violation was found; `order`
    /// is then a lower bound.
    pub exact: bool,
    /// Violation showing that `order + 1` fails.
    pub witness: Option<SubspaceWitness>,
}

impl SBox {
    /// `f(U)` as a subspace when it is one. Uses the normalized table.
    pub fn subspace_image(&self, u: &Subspace) -> Option<Subspace> {
        let t = self.normalized_table();
        let k = u.dim();
        let mut ech = Echelon::with_capacity(k + 1);
        for x in u.elements() {
            ech.insert(t[x as usize] as u128);
            if ech.rank() > k {
                return None;
            }
        }
        Some(Subspace::from_rref_unchecked(ech.into_rows(), self.m()))
    }

    /// First `k`-dimensional subspace (canonical order) mapped onto a subspace.
    fn first_violation(&self, k: usize, cap: EnumerationCap) -> Result<Option<SubspaceWitness>> {
        let e = SubspaceEnumerator::new(self.m(), k, cap)?;
        let parts = rayon::current_num_threads() * 8;
        Ok(e.chunks(parts).into_par_iter().find_map_first(|(s, t)| {
            e.range(s, t).find_map(|dom| {
                self.subspace_image(&dom).map(|image| SubspaceWitness { domain: dom, image })
            })
        }))
    }

    pub fn is_strongly_anti_invariant(&self, r: usize) -> Result<AntiInvarianceCheck> {
        self.is_strongly_anti_invariant_with(r, AntiInvarianceBudget::default())
    }

    /// True iff no subspace `U` with `m - r <= dim U < m` has `f(U)` a
    /// subspace. Scans from dimension `m - 1` down and stops at the first
    /// violation.
    pub fn is_strongly_anti_invariant_with(
        &self,
        r: usize,
        budget: AntiInvarianceBudget,
    ) -> Result<AntiInvarianceCheck> {
        let m = self.m();
        if r < 1 || r >= m {
            return Err(Error::OrderOutOfRange { r, m });
        }
        let estimate = total_subspaces(m, m - r..m);
        budget.cap.check("strong anti-invariance check", m, estimate)?;
        if estimate > budget.max_subspaces {
            return Err(Error::CapExceeded {
                what: "strong anti-invariance check",
                estimate,
                limit: budget.max_subspaces,
            });
        }
        for k in (m - r..m).rev() {
            if let Some(w) = self.first_violation(k, budget.cap)? {
                return Ok(AntiInvarianceCheck {
                    r,
                    holds: false,
                    witness: Some(w),
                });
            }
        }
        Ok(AntiInvarianceCheck {
            r,
            holds: true,
            witness: None,
        })
    }

    pub fn anti_invariance_order(&self) -> Result<OrderResult> {
        self.anti_invariance_order_with(AntiInvarianceBudget::default())
    }

    /// Largest `r` with strong `r`-anti-invariance, 0 if none.
    pub fn anti_invariance_order_with(&self, budget: AntiInvarianceBudget) -> Result<OrderResult> {
        let m = self.m();
        budget
            .cap
            .check("anti-invariance order", m, total_subspaces(m, 1..m))?;
        let mut spent = 0u128;
        for k in (1..m).rev() {
            spent = spent.saturating_add(gaussian_binomial(m, k));
            if spent > budget.max_subspaces {
                return Ok(OrderResult {
                    order: m - k - 1,
                    exact: false,
                    witness: None,
                });
            }
            if let Some(w) = self.first_violation(k, budget.cap)? {
                return Ok(OrderResult {
                    order: m - k - 1,
                    exact: true,
                    witness: Some(w),
                });
            }
        }
        Ok(OrderResult {
            order: m.saturating_sub(1),
            exact: true,
            witness: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field;
    use crate::gf2::BitMatrix;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use std::collections::BTreeSet;

    /// Subspace test by closure under addition, over every subspace of
    /// each dimension in `dims` (brute force, independent of the span test).
    fn brute_violations(t: &[u16], m: usize, dims: std::ops::Range<usize>) -> Vec<Subspace> {
        let mut out = Vec::new();
        for k in dims {
            for u in SubspaceEnumerator::new(m, k, EnumerationCap::default()).unwrap().iter() {
                let img: BTreeSet<u16> = u.elements().map(|x| t[x as usize]).collect();
                if img.iter().all(|a| img.iter().all(|b| img.contains(&(a ^ b)))) {
                    out.push(u);
                }
            }
        }
        out
    }

    fn f4_in_f16() -> Subspace {
        // elements of multiplicative order dividing 3, plus 0 and 1
        let p = field::modulus(4).unwrap();
        let elems: Vec<u128> = (1u32..16)
            .filter(|&x| field::gf_pow(x, 3, 4, p) == 1)
            .map(|x| x as u128)
            .collect();
        Subspace::span_words(elems, 4)
    }

    #[test]
    fn linear_bijection_fails_order_one() {
        let a = BitMatrix::from_rows(vec![0b0011, 0b0110, 0b1100, 0b1000], 4).unwrap();
        let s = SBox::linear(&a).unwrap();
        let c = s.is_strongly_anti_invariant(1).unwrap();
        assert!(!c.holds);
        let w = c.witness.unwrap();
        assert_eq!(w.domain.dim(), 3);
        assert_eq!(w.image, w.domain.image(&a).unwrap());
        assert_eq!(s.anti_invariance_order().unwrap().order, 0);
    }

    #[test]
    fn gf16_inversion_orders() {
        let s = SBox::inverse_gf2m(4).unwrap();
        assert!(s.is_strongly_anti_invariant(1).unwrap().holds);
        let c2 = s.is_strongly_anti_invariant(2).unwrap();
        assert!(!c2.holds);
        let f4 = f4_in_f16();
        assert_eq!(f4.dim(), 2);
        assert_eq!(s.subspace_image(&f4), Some(f4.clone()));
        // the multiplicative cosets a*F_4 all map onto subspaces a^-1*F_4
        let brute = brute_violations(s.table(), 4, 2..4);
        assert_eq!(brute.len(), 5);
        assert!(brute.iter().all(|u| u.dim() == 2));
        assert_eq!(brute[0], f4);
        let w = c2.witness.unwrap();
        assert_eq!(w.domain, f4);
        assert_eq!(w.image, f4);
        let ord = s.anti_invariance_order().unwrap();
        assert_eq!((ord.order, ord.exact), (1, true));
    }

    #[test]
    fn order_out_of_range() {
        let s = SBox::inverse_gf2m(4).unwrap();
        assert!(matches!(s.is_strongly_anti_invariant(0), Err(Error::OrderOutOfRange { .. })));
        assert!(matches!(s.is_strongly_anti_invariant(4), Err(Error::OrderOutOfRange { .. })));
    }

    #[test]
    fn monotone_and_witnesses_valid_on_random_boxes() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for m in [4usize, 5] {
            for _ in 0..10 {
                let mut t: Vec<u16> = (0..1u16 << m).collect();
                t.shuffle(&mut rng);
                let s = SBox::with_width(m, t).unwrap();
                let mut prev = true;
                for r in 1..m {
                    let c = s.is_strongly_anti_invariant(r).unwrap();
                    assert!(prev || !c.holds, "monotonicity");
                    prev = c.holds;
                    if let Some(w) = c.witness {
                        let img: BTreeSet<u128> = w
                            .domain
                            .elements()
                            .map(|x| s.normalized_table()[x as usize] as u128)
                            .collect();
                        let sp: BTreeSet<u128> = w.image.elements().collect();
                        assert_eq!(img, sp);
                        assert!(w.domain.dim() >= m - r && w.domain.dim() < m);
                    }
                }
                let ord = s.anti_invariance_order().unwrap();
                for r in 1..m {
                    assert_eq!(s.is_strongly_anti_invariant(r).unwrap().holds, r <= ord.order);
                }
            }
        }
    }

    #[test]
    fn m10_order4_refused_with_estimate() {
        let t: Vec<u16> = (0..1024).collect();
        let s = SBox::with_width(10, t).unwrap();
        match s.is_strongly_anti_invariant(4) {
            Err(Error::CapExceeded { estimate, .. }) => {
                assert_eq!(estimate, total_subspaces(10, 6..10));
                assert!(estimate > 60_000_000);
            }
            other => panic!("expected refusal, got {other:?}"),
        }
        // r = 3 fits the default budget; a linear box fails at once
        let c = s.is_strongly_anti_invariant(3).unwrap();
        assert!(!c.holds);
        assert_eq!(c.witness.unwrap().domain.dim(), 9);
    }
}
