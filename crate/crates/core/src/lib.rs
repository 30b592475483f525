pub mod colorful;
pub mod dp;
pub mod error;
pub mod fair;
pub mod generators;
pub mod io;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod partition;
pub mod rational;
pub mod relaxation;
pub mod rounding;
