use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 607.0 / 128.0;

// Godfrey's coefficients for g = 607/128, n = 15.
const LANCZOS_COEFFS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_923_517,
    -59.597_960_355_475_491_248,
    14.136_097_974_741_747_174,
    -0.491_913_816_097_620_199_78,
    0.339_946_499_848_118_886_99e-4,
    0.465_236_289_270_485_756_65e-4,
    -0.983_744_753_048_795_646_77e-4,
    0.158_088_703_224_912_488_84e-3,
    -0.210_264_441_724_104_883_19e-3,
    0.217_439_618_115_212_643_20e-3,
    -0.164_318_106_536_763_890_22e-3,
    0.844_182_239_838_527_432_93e-4,
    -0.261_908_384_015_814_086_70e-4,
    0.368_991_826_595_316_227_04e-5,
];

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

// (-1)^j zeta(j) / j for j = 2, 3, ...; Taylor coefficients of ln Gamma(1 + z).
const LN_GAMMA_1P_COEFFS: [f64; 29] = [
    0.822_467_033_424_113_218_24,
    -0.400_685_634_386_531_428_47,
    0.270_580_808_427_784_547_88,
    -0.207_385_551_028_673_985_27,
    0.169_557_176_997_408_189_95,
    -0.144_049_896_768_846_118_12,
    0.125_509_669_524_743_042_42,
    -0.111_334_265_869_564_690_49,
    0.100_099_457_512_781_808_53,
    -0.090_954_017_145_829_042_233,
    0.083_353_840_546_109_004_025,
    -0.076_932_516_411_352_191_473,
    0.071_432_946_295_361_336_059,
    -0.066_668_705_882_420_468_033,
    0.062_500_955_141_213_040_742,
    -0.058_823_978_658_684_582_339,
    0.055_555_767_627_403_611_102,
    -0.052_631_679_379_616_660_734,
    0.050_000_047_698_101_693_64,
    -0.047_619_070_330_142_227_991,
    0.045_454_556_293_204_669_442,
    -0.043_478_266_053_040_259_361,
    0.041_666_669_150_341_210_469,
    -0.040_000_001_192_140_140_586,
    0.038_461_539_034_675_185_706,
    -0.037_037_037_312_989_325_549,
    0.035_714_285_847_333_358_028,
    -0.034_482_758_684_919_300_811,
    0.033_333_333_364_377_581_081,
];

/// `ln Gamma(1 + z)` for small `|z|` by its Taylor series.
fn ln_gamma_1p_series(z: f64) -> f64 {
    let mut acc = 0.0;
    for &c in LN_GAMMA_1P_COEFFS.iter().rev() {
        acc = acc * z + c;
    }
    z * (acc * z - EULER_GAMMA)
}

fn ln_gamma_lanczos(x: f64) -> f64 {
    let mut a = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        a += c / (x + (i as f64) - 1.0);
    }
    let t = x + LANCZOS_G - 0.5;
    0.5 * (2.0 * PI).ln() + (x - 0.5) * t.ln() - t + a.ln()
}

/// Natural logarithm of the Gamma function for positive arguments.
///
/// Lanczos approximation away from the roots of `ln Gamma`; near `x = 1`
/// and `x = 2` a Taylor expansion keeps the relative error small.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if (x - 1.0).abs() <= 0.25 {
        ln_gamma_1p_series(x - 1.0)
    } else if (x - 2.0).abs() <= 0.25 {
        let z = x - 2.0;
        z.ln_1p() + ln_gamma_1p_series(z)
    } else {
        ln_gamma_lanczos(x)
    }
}

/// Checked `ln Gamma(x)`; rejects `x <= 0` and non-finite input.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("log_gamma", format!("x = {x} is not positive")));
    }
    Ok(ln_gamma(x))
}

/// `ln omega_j` where `omega_j = 2 pi^{j/2} / Gamma(j/2)`.
pub fn ln_omega(j: u32) -> f64 {
    let h = 0.5 * f64::from(j);
    std::f64::consts::LN_2 + h * PI.ln() - ln_gamma(h)
}

/// Surface measure of the unit sphere `S^{j-1}` in `R^j`.
pub fn omega(j: u32) -> Result<f64> {
    if j == 0 {
        return Err(Error::domain("omega", "j must be at least 1"));
    }
    Ok(ln_omega(j).exp())
}
