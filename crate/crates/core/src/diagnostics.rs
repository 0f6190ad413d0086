//! Estimate measurements on trajectories (under construction).

pub struct SquashDownEstimate;
pub struct ForwardEstimate;
pub struct TranslatorFit;
pub enum TranslatorClass {}
pub struct AsymmetrySeries;
pub struct CheckResult;
pub struct DiagnosticsReport;
