//! Per-pixel maximum sustained winds for each storm.
//!
//! Two entry points produce the same [`StormFootprint`] representation:
//! [`simulate_windfield`] reconstructs winds from 6-hourly track fixes with a
//! parametric radial profile, and [`ingest_gridded_exposure`] consumes files
//! that already carry per-pixel winds and exposed population.

mod ingest;
mod profile;
mod simulate;

pub use ingest::{ingest_gridded_exposure, read_track_csv, IngestOutcome};
pub use profile::holland_wind;
pub use simulate::{simulate_storm_tracks, simulate_windfield};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::WIND_FLOOR_KMH;

/// One 6-hourly best-track observation of a storm centre.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackPoint {
    pub storm_id: String,
    pub timestamp: DateTime<Utc>,
    /// Centre latitude in degrees, [-90, 90].
    pub lat: f64,
    /// Centre longitude in degrees, (-180, 180].
    pub lon: f64,
    /// Maximum 1-minute sustained wind in km/h.
    pub vmax_kmh: f64,
    /// Minimum surface pressure in hPa, when reported.
    pub pmin_hpa: Option<f64>,
    /// Radius of maximum wind in km, when reported.
    pub rmax_km: Option<f64>,
}

impl TrackPoint {
    fn validate(&self) -> Result<()> {
        if !(-90.0..=90.0).contains(&self.lat) {
            return Err(Error::invalid(format!(
                "track point latitude {} out of range for storm {}",
                self.lat, self.storm_id
            )));
        }
        if !(self.lon > -180.0 && self.lon <= 180.0) {
            return Err(Error::invalid(format!(
                "track point longitude {} out of range for storm {}",
                self.lon, self.storm_id
            )));
        }
        if !(self.vmax_kmh >= 0.0) {
            return Err(Error::invalid(format!(
                "negative vmax for storm {}",
                self.storm_id
            )));
        }
        Ok(())
    }
}

/// A 0.1° x 0.1° grid cell with its region assignment and population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pixel {
    /// Cell-centre latitude, a multiple of 0.1°.
    pub cell_lat: f64,
    /// Cell-centre longitude, a multiple of 0.1°.
    pub cell_lon: f64,
    pub region_id: String,
    /// Persons living in the cell.
    pub population: f64,
}

/// Integer cell key in tenths of a degree; exact hashing for 0.1° centres.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PixelKey {
    pub lat_deci: i32,
    pub lon_deci: i32,
}

impl PixelKey {
    pub fn of(lat: f64, lon: f64) -> Self {
        PixelKey {
            lat_deci: (lat * 10.0).round() as i32,
            lon_deci: (lon * 10.0).round() as i32,
        }
    }
}

impl Pixel {
    pub fn key(&self) -> PixelKey {
        PixelKey::of(self.cell_lat, self.cell_lon)
    }
}

/// One exposed cell of a storm footprint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FootprintCell {
    pub pixel: Pixel,
    /// Maximum sustained wind over the storm's passage, km/h. Always at or
    /// above the 34-knot floor.
    pub wind_kmh: f64,
}

/// Per-storm, per-region set of exposed cells.
///
/// All cells belong to `region_id`; `year`/`month` date the storm's first
/// exceedance of the wind floor anywhere on the grid, so they are constant
/// across the storm's footprints even when it straddles a month boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StormFootprint {
    pub storm_id: String,
    pub region_id: String,
    pub year: i32,
    /// Landfall month, 1-12.
    pub month: u8,
    pub cells: Vec<FootprintCell>,
}

impl StormFootprint {
    pub(crate) fn validate(&self) -> Result<()> {
        if !(1..=12).contains(&self.month) {
            return Err(Error::invalid(format!(
                "footprint for storm {} has month {} outside 1..=12",
                self.storm_id, self.month
            )));
        }
        for cell in &self.cells {
            if cell.wind_kmh < WIND_FLOOR_KMH {
                return Err(Error::invalid(format!(
                    "footprint for storm {} carries wind {} below the {} km/h floor",
                    self.storm_id, cell.wind_kmh, WIND_FLOOR_KMH
                )));
            }
            if cell.pixel.region_id != self.region_id {
                return Err(Error::invalid(format!(
                    "footprint for storm {} mixes regions {} and {}",
                    self.storm_id, self.region_id, cell.pixel.region_id
                )));
            }
        }
        Ok(())
    }
}

/// Parameters of the parametric wind-field reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct WindModelParams {
    /// Radial profile shape parameter.
    pub holland_b: f64,
    /// Radius of maximum wind (km) used when a track fix does not report one.
    pub rmax_default_km: f64,
    /// Winds are treated as zero beyond this distance from the centre (km).
    pub cutoff_radius_km: f64,
    /// Seed grid spacing (minutes) for the per-segment maximization. The
    /// reported winds are the continuous-time segment maxima, so this only
    /// controls how finely local maxima are bracketed.
    pub interpolation_step_min: f64,
}

impl Default for WindModelParams {
    fn default() -> Self {
        WindModelParams {
            holland_b: 1.5,
            rmax_default_km: 50.0,
            cutoff_radius_km: 500.0,
            interpolation_step_min: 15.0,
        }
    }
}

impl WindModelParams {
    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.holland_b > 0.0) {
            return Err(Error::invalid("wind model parameter B must be positive"));
        }
        if !(self.rmax_default_km > 0.0) {
            return Err(Error::invalid("default radius of maximum wind must be positive"));
        }
        if !(self.cutoff_radius_km > 0.0) {
            return Err(Error::invalid("cutoff radius must be positive"));
        }
        if !(self.interpolation_step_min > 0.0) {
            return Err(Error::invalid("interpolation step must be positive"));
        }
        Ok(())
    }
}
