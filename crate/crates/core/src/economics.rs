use crate::error::ModelError;
use crate::model::TimeStructure;

/// Hours in the reference year.
pub const HOURS_PER_YEAR: f64 = 8760.0;

/// Capital recovery factor: the annuity turning a one-off investment into equal yearly
/// payments over `lifetime` years at `interest_rate`. At zero interest it is `1 / lifetime`.
pub fn crf(interest_rate: f64, lifetime: u32) -> Result<f64, ModelError> {
    if !(0.0..1.0).contains(&interest_rate) {
        return Err(ModelError::InvalidParameter(format!(
            "interest rate {interest_rate} outside [0, 1)"
        )));
    }
    if lifetime == 0 {
        return Err(ModelError::InvalidParameter("economic lifetime must be at least 1".into()));
    }
    let n = f64::from(lifetime);
    if interest_rate == 0.0 {
        return Ok(1.0 / n);
    }
    // (1+i)^n - 1 via expm1/ln_1p stays accurate for tiny rates.
    let growth_minus_one = (n * interest_rate.ln_1p()).exp_m1();
    Ok(interest_rate * (growth_minus_one + 1.0) / growth_minus_one)
}

/// Factor extrapolating the modeled horizon to a full year.
pub fn annual_scale(time: &TimeStructure) -> f64 {
    time.annual_scale()
}
