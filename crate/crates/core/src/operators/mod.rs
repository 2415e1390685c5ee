//! Flux laws, source terms, growth bounds and the structural checks on them.

mod ag;
mod conditions;
mod flux;
mod growth;
mod source;

pub use ag::{classify_ag, AgControls, AgStatus, AgVerdict, PartialIntegral};
pub use conditions::{
    check_growth_condition, check_mon1, check_technass, GrowthCondition, GrowthControls, GrowthReport, TechnicalBound,
    ZeroReport,
};
pub use flux::{FluxKind, GOperator, PowerTerm};
pub use growth::GrowthFunction;
pub use source::{Nonlinearity, SourceKind};
