//! Open parts of a chart: the complement of closed sets handed to sibling charts.

use crate::error::Result;
use crate::ideal::Ideal;
use crate::poly::Polynomial;

#[derive(Clone, Debug, Default)]
pub struct Region {
    /// Ideal of the excluded closed set; `None` for the whole chart.
    excluded: Option<Ideal>,
}

impl Region {
    pub fn whole() -> Self {
        Region { excluded: None }
    }

    pub fn from_excluded(excluded: Option<Ideal>) -> Self {
        Region { excluded }
    }

    pub fn excluded(&self) -> Option<&Ideal> {
        self.excluded.as_ref()
    }

    pub fn is_whole(&self) -> bool {
        self.excluded.is_none()
    }

    /// Removes V(z) as well.
    pub fn excluding(&self, z: &Ideal) -> Result<Region> {
        let e = match &self.excluded {
            None => z.canonical()?,
            Some(p) => p.product(z)?,
        };
        Ok(Region { excluded: Some(e) })
    }

    /// V(j) has a point in the region.
    pub fn meets(&self, j: &Ideal) -> Result<bool> {
        if j.is_unit()? {
            return Ok(false);
        }
        match &self.excluded {
            None => Ok(true),
            Some(p) => Ok(!j.radical_contains_ideal(p)?),
        }
    }

    /// Ideal of the closure of V(j) ∩ region.
    pub fn closure(&self, j: &Ideal) -> Result<Ideal> {
        match &self.excluded {
            None => Ok(j.clone()),
            Some(p) => j.saturate_ideal(p)?.canonical(),
        }
    }

    /// The region inside the coordinate subspace x_v = 0, v ∈ vars.
    pub fn restrict_zero(&self, vars: &[usize]) -> Region {
        Region {
            excluded: self.excluded.as_ref().map(|p| p.restrict_zero(vars)),
        }
    }

    /// Preimage under `x_i -> images[i]`.
    pub fn substitute(&self, images: &[Polynomial]) -> Region {
        Region {
            excluded: self.excluded.as_ref().map(|p| p.substitute(images)),
        }
    }
}
