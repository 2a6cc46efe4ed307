//! Shared inputs for the criterion benches.

use densecert::exactnum::rat;
use densecert::muldensity::log_ratio_spec;
use densecert::{Limits, RealSpec};

pub fn e_minus_2() -> RealSpec {
    RealSpec::shifted(RealSpec::e(), rat(-2, 1))
}

pub fn sqrt2() -> RealSpec {
    RealSpec::nth_root(2u32, 2).expect("valid root")
}

pub fn sqrt2_minus_1() -> RealSpec {
    RealSpec::shifted(sqrt2(), rat(-1, 1))
}

/// `ln 2 / ln 3`
pub fn log_ratio() -> RealSpec {
    log_ratio_spec(2, 3, &Limits::default()).expect("2 and 3 are independent")
}
