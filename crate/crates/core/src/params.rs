//! System parameters and the directional antenna pattern.

use crate::error::{Error, Result};
use crate::units::dbm_to_watts;

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Ratio of main lobe width to half-power beamwidth.
const MAIN_LOBE_FACTOR: f64 = 2.6;

/// Radio and superframe constants, stored in linear SI units.
///
/// Constructed from the usual dB/dBm configuration values via
/// [`SystemParams::new`]; after that everything downstream is linear.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// System bandwidth W in Hz.
    pub bandwidth_hz: f64,
    /// One-sided noise power spectral density N0 in W/Hz.
    pub noise_psd: f64,
    /// Path loss exponent n.
    pub pathloss_exp: f64,
    /// Maximum transmission power Pt in W (the fixed serial-TDMA power).
    pub max_power_w: f64,
    /// Multi-user interference factor rho in [0, 1].
    pub mui_factor: f64,
    /// CTA slot duration in seconds.
    pub cta_duration_s: f64,
    /// Number of CTAs per superframe, M.
    pub cta_count: u32,
    /// Half-power beamwidth in degrees, in (0, 180).
    pub beamwidth_deg: f64,
    /// Normalized interference threshold sigma (>= 0).
    pub sigma: f64,
    /// Transceiver efficiency eta in (0, 1).
    pub efficiency: f64,
    /// Carrier wavelength in meters.
    pub carrier_wavelength_m: f64,
}

impl SystemParams {
    /// Build a parameter set from configuration-style units
    /// (noise in dBm/MHz, power in dBm, carrier in Hz).
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        bandwidth_hz: f64,
        noise_dbm_per_mhz: f64,
        pathloss_exp: f64,
        max_power_dbm: f64,
        mui_factor: f64,
        cta_duration_s: f64,
        cta_count: u32,
        beamwidth_deg: f64,
        sigma: f64,
        efficiency: f64,
        carrier_hz: f64,
    ) -> Result<Self> {
        let params = Self {
            bandwidth_hz,
            noise_psd: dbm_to_watts(noise_dbm_per_mhz) / 1e6,
            pathloss_exp,
            max_power_w: dbm_to_watts(max_power_dbm),
            mui_factor,
            cta_duration_s,
            cta_count,
            beamwidth_deg,
            sigma,
            efficiency,
            carrier_wavelength_m: SPEED_OF_LIGHT / carrier_hz,
        };
        params.validate()?;
        Ok(params)
    }

    /// Default parameter set: W = 2160 MHz, N0 = -134 dBm/MHz, n = 2,
    /// Pt = 40 dBm, rho = 0.01, dT = 18 us, M = 5000, beamwidth 30 deg,
    /// sigma = 1e-10, eta = 0.6, 60 GHz carrier.
    pub fn defaults() -> Self {
        Self::new(
            2.16e9, -134.0, 2.0, 40.0, 0.01, 18e-6, 5000, 30.0, 1e-10, 0.6, 60e9,
        )
        .expect("default parameters are valid")
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("bandwidth_hz", self.bandwidth_hz),
            ("noise_psd", self.noise_psd),
            ("pathloss_exp", self.pathloss_exp),
            ("max_power_w", self.max_power_w),
            ("cta_duration_s", self.cta_duration_s),
            ("carrier_wavelength_m", self.carrier_wavelength_m),
        ];
        for (name, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.cta_count == 0 {
            return Err(Error::InvalidInput("cta_count must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.mui_factor) {
            return Err(Error::InvalidInput(format!(
                "mui_factor must lie in [0, 1], got {}",
                self.mui_factor
            )));
        }
        if !self.sigma.is_finite() || self.sigma < 0.0 {
            return Err(Error::InvalidInput(format!(
                "sigma must be >= 0, got {}",
                self.sigma
            )));
        }
        if !(self.efficiency > 0.0 && self.efficiency < 1.0) {
            return Err(Error::InvalidInput(format!(
                "efficiency must lie in (0, 1), got {}",
                self.efficiency
            )));
        }
        if !(self.beamwidth_deg > 0.0 && self.beamwidth_deg < 180.0) {
            return Err(Error::InvalidInput(format!(
                "beamwidth must lie in (0, 180) deg, got {}",
                self.beamwidth_deg
            )));
        }
        Ok(())
    }

    /// Path loss constant k0 = (lambda / 4 pi)^2.
    pub fn k0(&self) -> f64 {
        let r = self.carrier_wavelength_m / (4.0 * std::f64::consts::PI);
        r * r
    }

    /// Total noise power over the system bandwidth, N0 * W, in watts.
    pub fn noise_power_w(&self) -> f64 {
        self.noise_psd * self.bandwidth_hz
    }

    /// The antenna pattern implied by the configured beamwidth.
    pub fn antenna(&self) -> AntennaPattern {
        AntennaPattern::from_beamwidth(self.beamwidth_deg)
            .expect("beamwidth validated at construction")
    }
}

/// Directional antenna pattern: Gaussian main lobe plus a constant side lobe,
/// both expressed in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaPattern {
    /// Half-power beamwidth in degrees.
    pub beamwidth_deg: f64,
    /// Main lobe width in degrees (2.6 x beamwidth).
    pub main_lobe_deg: f64,
    /// Peak (boresight) gain G0 in dB.
    pub peak_gain_db: f64,
    /// Constant side lobe gain in dB.
    pub side_lobe_db: f64,
}

impl AntennaPattern {
    /// Derive the pattern from a half-power beamwidth in (0, 180) degrees.
    ///
    /// Peak gain: `G0 = 10 log10((1.6162 / sin(bw/2))^2)`.
    /// Side lobe: `Gsl = -0.4111 ln(bw) - 10.579`.
    pub fn from_beamwidth(beamwidth_deg: f64) -> Result<Self> {
        if !(beamwidth_deg > 0.0 && beamwidth_deg < 180.0) {
            return Err(Error::InvalidInput(format!(
                "beamwidth must lie in (0, 180) deg, got {beamwidth_deg}"
            )));
        }
        let half = (beamwidth_deg / 2.0).to_radians();
        let peak_gain_db = 10.0 * (1.6162 / half.sin()).powi(2).log10();
        let side_lobe_db = -0.4111 * beamwidth_deg.ln() - 10.579;
        if peak_gain_db <= side_lobe_db {
            return Err(Error::InvalidInput(format!(
                "degenerate pattern: peak gain {peak_gain_db} dB <= side lobe {side_lobe_db} dB"
            )));
        }
        Ok(Self {
            beamwidth_deg,
            main_lobe_deg: MAIN_LOBE_FACTOR * beamwidth_deg,
            peak_gain_db,
            side_lobe_db,
        })
    }
}
