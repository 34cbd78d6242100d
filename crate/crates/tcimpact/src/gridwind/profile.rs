//! Radial wind profile.

/// Holland-style radial profile of sustained wind speed.
///
/// ```text
/// V(r) = vmax * [ (Rmax/r)^B * exp(1 - (Rmax/r)^B) ]^(1/2)
/// ```
///
/// The profile attains `vmax` exactly at `r = rmax`, decays monotonically for
/// `r > rmax`, and falls to zero toward the calm centre. Inputs and output in
/// km and km/h.
pub fn holland_wind(vmax_kmh: f64, rmax_km: f64, b: f64, r_km: f64) -> f64 {
    if r_km <= 0.0 {
        return 0.0;
    }
    let x = (rmax_km / r_km).powf(b);
    if !x.is_finite() || x > 700.0 {
        // Deep inside the eye the profile underflows to calm.
        return 0.0;
    }
    vmax_kmh * (x * (1.0 - x).exp()).sqrt()
}
