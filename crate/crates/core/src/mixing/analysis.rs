use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{LayerFamily, MixingLayer};
use crate::gf2::{BrickLayout, Subspace, Wall};

/// All `2^b - 2` proper walls, smallest first: by brick count, then
/// lexicographically by 1-based brick numbers.
pub fn enumerate_proper_walls(layout: BrickLayout) -> Vec<Wall> {
    let all = layout.all_bricks();
    let mut walls: Vec<Wall> = (1..all)
        .map(|bricks| Wall::new(layout, bricks).expect("within layout"))
        .collect();
    walls.sort_by_cached_key(|w| (w.bricks().count_ones(), w.indices()));
    walls
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProperCheck {
    pub holds: bool,
    /// Smallest proper wall mapped onto itself.
    pub witness: Option<Wall>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongCheck {
    pub holds: bool,
    /// Smallest proper wall whose image is a wall, with that image.
    pub witness: Option<(Wall, Wall)>,
}

/// Range of prefix lengths `j` allowed to break a wall.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JRange {
    /// `1 <= j <= ℓ - 1`.
    #[default]
    Strict,
    /// `1 <= j <= ℓ`.
    Relaxed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyReport {
    pub holds: bool,
    pub j_range: JRange,
    /// Per proper wall, the smallest `j` whose prefix product sends it to
    /// a non-wall, or `None` when it survives every allowed prefix.
    pub per_wall: Vec<(Wall, Option<usize>)>,
}

impl FamilyReport {
    pub fn survivors(&self) -> impl Iterator<Item = &Wall> {
        self.per_wall
            .iter()
            .filter(|(_, j)| j.is_none())
            .map(|(w, _)| w)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub subspace: Subspace,
    pub wall: Option<Wall>,
}

impl MixingLayer {
    /// No proper wall is invariant.
    pub fn is_proper(&self) -> ProperCheck {
        let witness = enumerate_proper_walls(self.layout())
            .into_par_iter()
            .find_first(|w| self.map_wall(w) == Some(*w));
        ProperCheck {
            holds: witness.is_none(),
            witness,
        }
    }

    /// No proper wall is sent onto any wall, itself included.
    pub fn is_strongly_proper(&self) -> StrongCheck {
        let witness = enumerate_proper_walls(self.layout())
            .into_par_iter()
            .find_map_first(|w| self.map_wall(&w).map(|img| (w, img)));
        StrongCheck {
            holds: witness.is_none(),
            witness,
        }
    }
}

impl LayerFamily {
    /// Smallest `j` in the allowed range such that `w λ_1 ... λ_j` is not a
    /// wall.
    pub fn breaking_prefix(&self, w: &Wall, range: JRange) -> Option<usize> {
        let last = match range {
            JRange::Strict => self.len().saturating_sub(1),
            JRange::Relaxed => self.len(),
        };
        let mut cur = *w;
        for (j, layer) in self.layers()[..last].iter().enumerate() {
            match layer.map_wall(&cur) {
                Some(next) => cur = next,
                None => return Some(j + 1),
            }
        }
        None
    }

    /// Every proper wall leaves the set of walls under some allowed prefix
    /// product. With the strict range and `ℓ = 1` no prefix exists, so the
    /// family is never strongly proper.
    pub fn is_strongly_proper(&self, range: JRange) -> FamilyReport {
        let per_wall: Vec<(Wall, Option<usize>)> = enumerate_proper_walls(self.layout())
            .into_par_iter()
            .map(|w| (w, self.breaking_prefix(&w, range)))
            .collect();
        FamilyReport {
            holds: per_wall.iter().all(|(_, j)| j.is_some()),
            j_range: range,
            per_wall,
        }
    }

    /// `(w λ_1 ... λ_j, wall status)` for `j = 1..=ℓ`.
    pub fn wall_trace(&self, w: &Wall) -> Vec<TraceStep> {
        let layout = self.layout();
        let mut cur = w.subspace();
        self.layers()
            .iter()
            .map(|layer| {
                cur = layer.image(&cur);
                TraceStep {
                    subspace: cur.clone(),
                    wall: layout.as_wall(&cur),
                }
            })
            .collect()
    }
}
