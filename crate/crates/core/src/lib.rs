//! Age-of-information scheduling for wireless networks under interference.
//!
//! * [`net`]: links, interference families and the frequency polytope.
//! * [`optimizer`]: peak-age optimal stationary schedules with certificates.
//! * [`queue`]: age of discrete-time FIFO queues with Bernoulli service.
//! * [`spp`]: schedule-then-rate-control policies for buffered sources.
//! * [`sim`]: slot-level network simulator.
//! * [`exp`]: experiment drivers and the verification suite.

pub mod error;
pub mod exp;
pub mod net;
mod numeric;
pub mod optimizer;
pub mod queue;
pub mod sim;
pub mod spp;

pub use error::{Error, Result};
