//! Wind-field reconstruction from 6-hourly track fixes.

use std::collections::BTreeMap;

use chrono::{DateTime, Datelike, Duration, Utc};

use super::{FootprintCell, Pixel, StormFootprint, TrackPoint, WindModelParams};
use crate::error::{Error, Result};
use crate::geo::haversine_km;
use crate::gridwind::profile::holland_wind;
use crate::optim::brent_max;
use crate::par;
use crate::WIND_FLOOR_KMH;

/// Storm state along one inter-fix segment, linear in time.
struct Segment {
    /// Start offset from the first fix, minutes.
    t0: f64,
    /// End offset, minutes.
    t1: f64,
    lat0: f64,
    lat1: f64,
    lon0: f64,
    lon1: f64,
    vmax0: f64,
    vmax1: f64,
    rmax0: f64,
    rmax1: f64,
}

impl Segment {
    fn duration(&self) -> f64 {
        self.t1 - self.t0
    }

    /// Wind at the pixel at local segment time `s` in `[0, duration]`.
    fn wind_at(&self, s: f64, pixel_lat: f64, pixel_lon: f64, params: &WindModelParams) -> f64 {
        let w = s / self.duration();
        let lat = self.lat0 + w * (self.lat1 - self.lat0);
        let lon = self.lon0 + w * (self.lon1 - self.lon0);
        let vmax = self.vmax0 + w * (self.vmax1 - self.vmax0);
        let rmax = self.rmax0 + w * (self.rmax1 - self.rmax0);
        let r = haversine_km(lat, lon, pixel_lat, pixel_lon);
        if r > params.cutoff_radius_km {
            return 0.0;
        }
        holland_wind(vmax, rmax, params.holland_b, r)
    }
}

/// Maximum wind a pixel sees over one segment, with the attaining local time.
///
/// The segment is sampled on a seed grid at the configured step, then every
/// local maximum is refined by a continuous line search, so the result is the
/// continuous-time maximum rather than a grid maximum.
fn segment_max(
    seg: &Segment,
    pixel_lat: f64,
    pixel_lon: f64,
    params: &WindModelParams,
) -> (f64, f64) {
    let dur = seg.duration();
    // Far-field reject: the centre moves at most the segment length, so the
    // pixel's distance never drops below max(endpoint distances) - length.
    let d0 = haversine_km(seg.lat0, seg.lon0, pixel_lat, pixel_lon);
    let d1 = haversine_km(seg.lat1, seg.lon1, pixel_lat, pixel_lon);
    let seg_len = haversine_km(seg.lat0, seg.lon0, seg.lat1, seg.lon1);
    if d0.max(d1) - seg_len > params.cutoff_radius_km {
        return (0.0, 0.0);
    }

    let f = |s: f64| seg.wind_at(s, pixel_lat, pixel_lon, params);
    let n = ((dur / params.interpolation_step_min).ceil() as usize).max(8);
    let grid: Vec<f64> = (0..=n).map(|i| dur * i as f64 / n as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&s| f(s)).collect();

    let mut best = (vals[0], grid[0]);
    for i in 0..=n {
        let is_local_max = (i == 0 || vals[i] >= vals[i - 1]) && (i == n || vals[i] >= vals[i + 1]);
        if !is_local_max {
            continue;
        }
        let lo = if i == 0 { grid[0] } else { grid[i - 1] };
        let hi = if i == n { grid[n] } else { grid[i + 1] };
        let refined = if hi > lo {
            brent_max(f, lo, hi, 1e-9, 300).unwrap_or((grid[i], vals[i]))
        } else {
            (grid[i], vals[i])
        };
        if refined.1 > best.0 {
            best = (refined.1, refined.0);
        }
        if vals[i] > best.0 {
            best = (vals[i], grid[i]);
        }
    }
    best
}

/// Earliest local time in the segment at which the pixel's wind reaches the
/// floor, given that its segment maximum does. Resolution is well below a
/// minute, which is ample for dating the exceedance month.
fn first_crossing(seg: &Segment, pixel_lat: f64, pixel_lon: f64, params: &WindModelParams, argmax: f64) -> f64 {
    let f = |s: f64| seg.wind_at(s, pixel_lat, pixel_lon, params);
    if f(0.0) >= WIND_FLOOR_KMH {
        return 0.0;
    }
    let dur = seg.duration();
    let n = ((dur / params.interpolation_step_min.min(1.0)).ceil() as usize).max(8);
    let mut lo = 0.0;
    let mut hi = argmax.max(1e-9);
    for i in 1..=n {
        let s = dur * i as f64 / n as f64;
        if s >= argmax {
            break;
        }
        if f(s) >= WIND_FLOOR_KMH {
            hi = s;
            break;
        }
        lo = s;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= WIND_FLOOR_KMH {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn build_segments(track: &[TrackPoint], params: &WindModelParams) -> Result<Vec<Segment>> {
    let start = track[0].timestamp;
    let mut segments = Vec::with_capacity(track.len() - 1);
    for pair in track.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if b.timestamp <= a.timestamp {
            return Err(Error::invalid(format!(
                "non-monotone timestamps in track for storm {} at {}",
                a.storm_id, b.timestamp
            )));
        }
        let to_min = |ts: DateTime<Utc>| (ts - start).num_seconds() as f64 / 60.0;
        segments.push(Segment {
            t0: to_min(a.timestamp),
            t1: to_min(b.timestamp),
            lat0: a.lat,
            lat1: b.lat,
            lon0: a.lon,
            lon1: b.lon,
            vmax0: a.vmax_kmh,
            vmax1: b.vmax_kmh,
            rmax0: a.rmax_km.unwrap_or(params.rmax_default_km),
            rmax1: b.rmax_km.unwrap_or(params.rmax_default_km),
        });
    }
    Ok(segments)
}

/// Reconstruct a storm's footprints over a pixel grid.
///
/// Between consecutive fixes the centre position, `vmax`, and the radius of
/// maximum wind are interpolated linearly; each pixel records its
/// continuous-time maximum of the radial profile along the whole track.
/// Pixels that never reach the 34-knot floor are dropped, and the footprint
/// month is the calendar month of the first instant any pixel reaches it.
/// One footprint is returned per region hit; the list is empty when no pixel
/// qualifies.
pub fn simulate_windfield(
    track: &[TrackPoint],
    grid: &[Pixel],
    params: &WindModelParams,
) -> Result<Vec<StormFootprint>> {
    params.validate()?;
    if track.len() < 2 {
        return Err(Error::invalid("track must contain at least two fixes"));
    }
    if grid.is_empty() {
        return Err(Error::invalid("pixel grid is empty"));
    }
    let storm_id = &track[0].storm_id;
    for p in track {
        p.validate()?;
        if p.storm_id != *storm_id {
            return Err(Error::invalid(format!(
                "track mixes storms {} and {}",
                storm_id, p.storm_id
            )));
        }
    }
    for px in grid {
        if !(px.population >= 0.0) {
            return Err(Error::invalid(format!(
                "pixel ({}, {}) has negative population",
                px.cell_lat, px.cell_lon
            )));
        }
    }
    let segments = build_segments(track, params)?;

    // Per pixel: overall max wind plus per-segment maxima for dating.
    struct PixelResult {
        max_wind: f64,
        per_segment: Vec<(f64, f64)>, // (max, argmax local time)
    }
    let results: Vec<PixelResult> = par::map_slice(grid, |px| {
        let per_segment: Vec<(f64, f64)> = segments
            .iter()
            .map(|seg| segment_max(seg, px.cell_lat, px.cell_lon, params))
            .collect();
        let max_wind = per_segment.iter().map(|&(v, _)| v).fold(0.0, f64::max);
        PixelResult {
            max_wind,
            per_segment,
        }
    });

    if results.iter().all(|r| r.max_wind < WIND_FLOOR_KMH) {
        return Ok(Vec::new());
    }

    // Date the storm: first segment in which any pixel reaches the floor,
    // then the earliest crossing instant within it.
    let mut exceed_minute = f64::INFINITY;
    'seg: for (si, seg) in segments.iter().enumerate() {
        let mut earliest: Option<f64> = None;
        for (px, r) in grid.iter().zip(&results) {
            let (smax, argmax) = r.per_segment[si];
            if smax >= WIND_FLOOR_KMH {
                let cross = seg.t0 + first_crossing(seg, px.cell_lat, px.cell_lon, params, argmax);
                earliest = Some(earliest.map_or(cross, |e: f64| e.min(cross)));
            }
        }
        if let Some(t) = earliest {
            exceed_minute = t;
            break 'seg;
        }
    }
    let exceed_ts = track[0].timestamp + Duration::milliseconds((exceed_minute * 60_000.0).round() as i64);
    let (year, month) = (exceed_ts.year(), exceed_ts.month() as u8);

    let mut by_region: BTreeMap<String, Vec<FootprintCell>> = BTreeMap::new();
    for (px, r) in grid.iter().zip(&results) {
        if r.max_wind >= WIND_FLOOR_KMH {
            by_region
                .entry(px.region_id.clone())
                .or_default()
                .push(FootprintCell {
                    pixel: px.clone(),
                    wind_kmh: r.max_wind,
                });
        }
    }
    Ok(by_region
        .into_iter()
        .map(|(region_id, cells)| StormFootprint {
            storm_id: storm_id.clone(),
            region_id,
            year,
            month,
            cells,
        })
        .collect())
}

/// Run [`simulate_windfield`] for every storm in a mixed track table.
///
/// Points are grouped by storm id in the order given; each storm's fixes must
/// already be in temporal order.
pub fn simulate_storm_tracks(
    points: &[TrackPoint],
    grid: &[Pixel],
    params: &WindModelParams,
) -> Result<Vec<StormFootprint>> {
    let mut by_storm: BTreeMap<&str, Vec<TrackPoint>> = BTreeMap::new();
    for p in points {
        by_storm.entry(p.storm_id.as_str()).or_default().push(p.clone());
    }
    let mut out = Vec::new();
    for (_, track) in by_storm {
        out.extend(simulate_windfield(&track, grid, params)?);
    }
    Ok(out)
}
