use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, PositionGrid};

/// Pair of position-diagonal Kraus operators for the two qubit outcomes.
///
/// `upsilon_e` conditions on finding the qubit excited, `upsilon_g` on ground.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOperator")]
pub struct MeasurementOperator {
    upsilon_e: GridFunction,
    upsilon_g: GridFunction,
}

#[derive(Deserialize)]
struct RawOperator {
    upsilon_e: GridFunction,
    upsilon_g: GridFunction,
}

impl TryFrom<RawOperator> for MeasurementOperator {
    type Error = Error;

    fn try_from(r: RawOperator) -> Result<Self> {
        MeasurementOperator::new(r.upsilon_e, r.upsilon_g)
    }
}

pub const COMPLETENESS_TOL: f64 = 1e-9;

impl MeasurementOperator {
    pub fn new(upsilon_e: GridFunction, upsilon_g: GridFunction) -> Result<Self> {
        if upsilon_e.grid() != upsilon_g.grid() {
            return Err(Error::GridMismatch("excited and ground channels differ in grid".into()));
        }
        for (j, (e, g)) in upsilon_e.values().iter().zip(upsilon_g.values()).enumerate() {
            let total = e.norm_sqr() + g.norm_sqr();
            if (total - 1.0).abs() > COMPLETENESS_TOL {
                return Err(Error::InvalidParameter(format!(
                    "completeness violated at grid point {j}: |Ue|^2 + |Ug|^2 = {total}"
                )));
            }
        }
        Ok(Self { upsilon_e, upsilon_g })
    }

    pub fn grid(&self) -> &PositionGrid {
        self.upsilon_e.grid()
    }

    pub fn upsilon_e(&self) -> &GridFunction {
        &self.upsilon_e
    }

    pub fn upsilon_g(&self) -> &GridFunction {
        &self.upsilon_g
    }

    pub fn completeness_error(&self) -> f64 {
        self.upsilon_e
            .values()
            .iter()
            .zip(self.upsilon_g.values())
            .map(|(e, g)| (e.norm_sqr() + g.norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}
