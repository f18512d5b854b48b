//! Photonic link budgets: efficiencies from attenuation, entanglement rates
//! and the multiplexing needed to reach a target rate.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TcError};

pub const SPEED_OF_LIGHT: f64 = 3e8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Medium {
    pub name: String,
    /// dB per km.
    pub attenuation: f64,
    /// m/s.
    pub speed: f64,
}

impl Medium {
    pub fn new(name: &str, attenuation: f64, speed: f64) -> Result<Self> {
        if !(attenuation >= 0.0) || !attenuation.is_finite() {
            return Err(TcError::Range(format!("attenuation {attenuation} must be a finite nonnegative number")));
        }
        if !(speed > 0.0 && speed <= SPEED_OF_LIGHT) {
            return Err(TcError::Range(format!("speed {speed} outside (0, 3e8]")));
        }
        Ok(Self { name: name.to_string(), attenuation, speed })
    }

    pub fn fiber() -> Self {
        Self { name: "fiber".into(), attenuation: 0.17, speed: 2e8 }
    }

    pub fn vacuum_guide() -> Self {
        Self { name: "vacuum_guide".into(), attenuation: 5e-5, speed: SPEED_OF_LIGHT }
    }

    /// 0.2 dB/cm.
    pub fn waveguide() -> Self {
        Self { name: "waveguide".into(), attenuation: 2e4, speed: 2e8 }
    }

    pub fn free_space() -> Self {
        Self { name: "free_space".into(), attenuation: 0.0, speed: SPEED_OF_LIGHT }
    }
}

impl FromStr for Medium {
    type Err = TcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fiber" => Ok(Self::fiber()),
            "vacuum_guide" => Ok(Self::vacuum_guide()),
            "waveguide" => Ok(Self::waveguide()),
            "free_space" => Ok(Self::free_space()),
            other => Err(TcError::Parse(format!(
                "unknown medium `{other}` (expected fiber, vacuum_guide, waveguide or free_space)"
            ))),
        }
    }
}

/// `10^(-0.1 alpha l)` for an arm of `length_km`.
pub fn efficiency(medium: &Medium, length_km: f64) -> Result<f64> {
    if !(length_km >= 0.0) {
        return Err(TcError::Range(format!("length {length_km} km is negative")));
    }
    Ok(10f64.powf(-0.1 * medium.attenuation * length_km))
}

/// Longest arm keeping the efficiency at `target`; `f64::INFINITY` for a lossless medium.
pub fn max_arm_length(medium: &Medium, target: f64) -> Result<f64> {
    if !(target > 0.0 && target <= 1.0) {
        return Err(TcError::Range(format!("target efficiency {target} outside (0, 1]")));
    }
    if medium.attenuation == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((-10.0 * target.log10() / medium.attenuation).max(0.0))
}

/// Photons cross half the separation to each party, then the herald
/// signal travels the other half: `(d/2)/v_photon + (d/2)/v_herald` seconds.
pub fn attempt_time(distance_km: f64, photon_speed: f64, herald_speed: f64) -> Result<f64> {
    if !(distance_km > 0.0) {
        return Err(TcError::Range(format!("distance {distance_km} km must be positive")));
    }
    if !(photon_speed > 0.0 && herald_speed > 0.0) {
        return Err(TcError::Range("speeds must be positive".into()));
    }
    let half = 0.5 * distance_km * 1e3;
    Ok(half / photon_speed + half / herald_speed)
}

/// `projection * eta(d/2)^2`, i.e. one full-separation transmission.
pub fn success_probability(medium: &Medium, distance_km: f64, projection: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&projection) {
        return Err(TcError::Range(format!("projection probability {projection} outside [0, 1]")));
    }
    Ok(projection * efficiency(medium, 0.5 * distance_km)?.powi(2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkConfig {
    pub distance_km: f64,
    pub multiplicity: u64,
    pub projection: f64,
    /// Extra multiplicative efficiency for detectors and coupling.
    pub extra_efficiency: f64,
}

impl LinkConfig {
    pub fn new(distance_km: f64, multiplicity: u64) -> Result<Self> {
        if !(distance_km > 0.0) {
            return Err(TcError::Range(format!("distance {distance_km} km must be positive")));
        }
        if multiplicity == 0 {
            return Err(TcError::Range("multiplicity must be at least 1".into()));
        }
        Ok(Self { distance_km, multiplicity, projection: 0.5, extra_efficiency: 1.0 })
    }
}

/// `M p_s / t_a` in Hz.
pub fn effective_rate(link: &LinkConfig, medium: &Medium, herald: &Medium) -> Result<f64> {
    let ps = success_probability(medium, link.distance_km, link.projection)? * link.extra_efficiency;
    let ta = attempt_time(link.distance_km, medium.speed, herald.speed)?;
    Ok(link.multiplicity as f64 * ps / ta)
}

/// Smallest multiplicity whose effective rate reaches `target_hz`.
pub fn required_multiplicity(target_hz: f64, link: &LinkConfig, medium: &Medium, herald: &Medium) -> Result<u64> {
    if !(target_hz > 0.0) {
        return Err(TcError::Range(format!("target rate {target_hz} must be positive")));
    }
    let single = LinkConfig { multiplicity: 1, ..link.clone() };
    let per_copy = effective_rate(&single, medium, herald)?;
    if per_copy <= 0.0 {
        return Err(TcError::Numerical("link delivers no entanglement".into()));
    }
    // guard against 4251.000000001 style round-up
    let ratio = target_hz / per_copy;
    let m = if (ratio - ratio.round()).abs() < 1e-9 * ratio.max(1.0) { ratio.round() } else { ratio.ceil() };
    Ok((m as u64).max(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_by_name() {
        for name in ["fiber", "vacuum_guide", "waveguide", "free_space"] {
            assert_eq!(name.parse::<Medium>().unwrap().name, name);
        }
        assert!("copper".parse::<Medium>().is_err());
        assert!(Medium::new("x", -1.0, 2e8).is_err());
        assert!(Medium::new("x", 1.0, 4e8).is_err());
    }

    #[test]
    fn fiber_and_vacuum_lengths() {
        let l = max_arm_length(&Medium::fiber(), 2.0 / 3.0).unwrap();
        assert!((l - 10.358).abs() < 1e-3, "{l}");
        assert!((efficiency(&Medium::fiber(), 10.35).unwrap() - 2.0 / 3.0).abs() < 1e-3);
        let loss = 1.0 - efficiency(&Medium::vacuum_guide(), 28.15).unwrap();
        assert!((loss - 3.24e-4).abs() < 1e-6, "{loss}");
        let lv = max_arm_length(&Medium::vacuum_guide(), 2.0 / 3.0).unwrap();
        assert!((lv - 3.52e4).abs() < 50.0, "{lv}");
        assert_eq!(max_arm_length(&Medium::fiber(), 1.0).unwrap(), 0.0);
        assert!(max_arm_length(&Medium::free_space(), 0.5).unwrap().is_infinite());
        assert!(max_arm_length(&Medium::fiber(), 0.0).is_err());
    }

    #[test]
    fn waveguide_and_short_fiber() {
        assert!((efficiency(&Medium::waveguide(), 1e-5).unwrap() - 0.955).abs() < 1e-3);
        assert!((efficiency(&Medium::fiber(), 0.05).unwrap() - 0.998).abs() < 1e-3);
        assert_eq!(efficiency(&Medium::fiber(), 0.0).unwrap(), 1.0);
    }

    #[test]
    fn nyse_nasdaq_rates() {
        let (fiber, air) = (Medium::fiber(), Medium::free_space());
        let ta = attempt_time(56.3, fiber.speed, air.speed).unwrap();
        assert!((ta - 2.346e-4).abs() < 1e-7);
        let ps = success_probability(&fiber, 56.3, 0.5).unwrap();
        assert!((ps - 0.0552).abs() < 1e-4);
        let link = LinkConfig::new(56.3, 1).unwrap();
        let r = effective_rate(&link, &fiber, &air).unwrap();
        assert!((r - 235.2).abs() < 0.5, "{r}");
        let r10 = effective_rate(&LinkConfig { multiplicity: 10, ..link.clone() }, &fiber, &air).unwrap();
        assert!((r10 - 10.0 * r).abs() < 1e-9);
        let m = required_multiplicity(1e6, &link, &fiber, &air).unwrap();
        assert!((4200..=4300).contains(&m), "{m}");
        assert_eq!(required_multiplicity(r, &link, &fiber, &air).unwrap(), 1);
    }

    #[test]
    fn attempt_time_scaling() {
        let t = attempt_time(10.0, SPEED_OF_LIGHT, SPEED_OF_LIGHT).unwrap();
        assert!((t - 1e4 / SPEED_OF_LIGHT).abs() < 1e-18);
        let t2 = attempt_time(20.0, 2e8, 3e8).unwrap();
        assert!((t2 - 2.0 * attempt_time(10.0, 2e8, 3e8).unwrap()).abs() < 1e-18);
        assert_eq!(success_probability(&Medium::free_space(), 10.0, 0.5).unwrap(), 0.5);
        assert_eq!(success_probability(&Medium::fiber(), 0.0, 1.0).unwrap(), 1.0);
    }
}
