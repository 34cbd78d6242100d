//! File ingestion for pre-gridded exposure data and raw track tables.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::Deserialize;

use super::{FootprintCell, Pixel, PixelKey, StormFootprint, TrackPoint};
use crate::error::{Error, Result};
use crate::WIND_FLOOR_KMH;

/// Result of loading a gridded-exposure file.
#[derive(Debug)]
pub struct IngestOutcome {
    pub footprints: Vec<StormFootprint>,
    /// Rows dropped because their wind was below the 34-knot floor.
    pub sub_threshold_dropped: usize,
}

#[derive(Debug, Deserialize)]
struct ExposureRow {
    storm_id: String,
    year: i32,
    month: u8,
    cell_lat: f64,
    cell_lon: f64,
    region_id: String,
    wind_kmh: f64,
    exposed_pop: f64,
}

const EXPOSURE_COLUMNS: [&str; 8] = [
    "storm_id",
    "year",
    "month",
    "cell_lat",
    "cell_lon",
    "region_id",
    "wind_kmh",
    "exposed_pop",
];

fn check_header(path: &str, headers: &csv::StringRecord, required: &[&str]) -> Result<()> {
    let present: HashSet<&str> = headers.iter().collect();
    for col in required {
        if !present.contains(col) {
            return Err(Error::load(path, None, format!("missing column '{col}'")));
        }
    }
    Ok(())
}

/// Load per-pixel storm exposure from a CSV with columns
/// `storm_id, year, month, cell_lat, cell_lon, region_id, wind_kmh, exposed_pop`.
///
/// Rows are grouped into one footprint per (storm, region); winds below the
/// floor are dropped and counted. A duplicate (storm, pixel) pair, a missing
/// column, or an unparseable row is a load error carrying the row number.
pub fn ingest_gridded_exposure(path: impl AsRef<Path>) -> Result<IngestOutcome> {
    let path_str = path.as_ref().display().to_string();
    let mut reader = csv::Reader::from_path(path.as_ref())
        .map_err(|e| Error::load(&path_str, None, e.to_string()))?;
    check_header(&path_str, reader.headers()?, &EXPOSURE_COLUMNS)?;

    let mut seen: HashSet<(String, PixelKey)> = HashSet::new();
    // Key: (storm, region) -> (year, month, cells)
    let mut groups: BTreeMap<(String, String), (i32, u8, Vec<FootprintCell>)> = BTreeMap::new();
    let mut dropped = 0usize;

    for (i, rec) in reader.deserialize::<ExposureRow>().enumerate() {
        let rownum = i + 2; // 1-based, after the header
        let row = rec.map_err(|e| Error::load(&path_str, Some(rownum), e.to_string()))?;
        if !(1..=12).contains(&row.month) {
            return Err(Error::load(
                &path_str,
                Some(rownum),
                format!("month {} outside 1..=12", row.month),
            ));
        }
        if row.exposed_pop < 0.0 {
            return Err(Error::load(&path_str, Some(rownum), "negative exposed_pop"));
        }
        let key = PixelKey::of(row.cell_lat, row.cell_lon);
        if !seen.insert((row.storm_id.clone(), key)) {
            return Err(Error::load(
                &path_str,
                Some(rownum),
                format!(
                    "duplicate (storm, pixel) pair: storm {} at cell ({:.1}, {:.1})",
                    row.storm_id, row.cell_lat, row.cell_lon
                ),
            ));
        }
        if row.wind_kmh < WIND_FLOOR_KMH {
            dropped += 1;
            continue;
        }
        let entry = groups
            .entry((row.storm_id.clone(), row.region_id.clone()))
            .or_insert((row.year, row.month, Vec::new()));
        if (entry.0, entry.1) != (row.year, row.month) {
            return Err(Error::load(
                &path_str,
                Some(rownum),
                format!(
                    "storm {} in region {} reported with conflicting dates {}-{:02} and {}-{:02}",
                    row.storm_id, row.region_id, entry.0, entry.1, row.year, row.month
                ),
            ));
        }
        entry.2.push(FootprintCell {
            pixel: Pixel {
                cell_lat: row.cell_lat,
                cell_lon: row.cell_lon,
                region_id: row.region_id,
                population: row.exposed_pop,
            },
            wind_kmh: row.wind_kmh,
        });
    }

    let footprints: Vec<StormFootprint> = groups
        .into_iter()
        .map(|((storm_id, region_id), (year, month, cells))| StormFootprint {
            storm_id,
            region_id,
            year,
            month,
            cells,
        })
        .collect();
    for fp in &footprints {
        fp.validate()?;
    }
    Ok(IngestOutcome {
        footprints,
        sub_threshold_dropped: dropped,
    })
}

#[derive(Debug, Deserialize)]
struct TrackRow {
    storm_id: String,
    timestamp: String,
    lat: f64,
    lon: f64,
    vmax_kmh: f64,
    #[serde(default)]
    pmin_hpa: Option<f64>,
    #[serde(default)]
    rmax_km: Option<f64>,
}

const TRACK_COLUMNS: [&str; 5] = ["storm_id", "timestamp", "lat", "lon", "vmax_kmh"];

/// Load a 6-hourly track table with columns
/// `storm_id, timestamp, lat, lon, vmax_kmh, pmin_hpa, rmax_km`
/// (the last two may be blank). Timestamps are ISO-8601.
pub fn read_track_csv(path: impl AsRef<Path>) -> Result<Vec<TrackPoint>> {
    let path_str = path.as_ref().display().to_string();
    let mut reader = csv::Reader::from_path(path.as_ref())
        .map_err(|e| Error::load(&path_str, None, e.to_string()))?;
    check_header(&path_str, reader.headers()?, &TRACK_COLUMNS)?;

    let mut points = Vec::new();
    for (i, rec) in reader.deserialize::<TrackRow>().enumerate() {
        let rownum = i + 2;
        let row = rec.map_err(|e| Error::load(&path_str, Some(rownum), e.to_string()))?;
        let timestamp = row
            .timestamp
            .parse::<DateTime<Utc>>()
            .or_else(|_| {
                chrono::NaiveDateTime::parse_from_str(&row.timestamp, "%Y-%m-%dT%H:%M:%S")
                    .map(|n| n.and_utc())
            })
            .map_err(|_| {
                Error::load(
                    &path_str,
                    Some(rownum),
                    format!("unparseable timestamp '{}'", row.timestamp),
                )
            })?;
        points.push(TrackPoint {
            storm_id: row.storm_id,
            timestamp,
            lat: row.lat,
            lon: row.lon,
            vmax_kmh: row.vmax_kmh,
            pmin_hpa: row.pmin_hpa,
            rmax_km: row.rmax_km,
        });
    }
    Ok(points)
}
