//! Uncoordinated sparse spanners built by local agents, the greedy
//! well-separated pair decomposition they induce, the discrete center
//! hierarchy used to bound it, and a message-counting simulator.

pub mod error;
pub mod export;
pub mod graph;
pub mod hierarchy;
pub mod instance;
pub mod kdtree;
pub mod metric;
pub mod order;
pub mod sim;
pub mod spanner;
pub mod wspd;

pub use error::{Error, Result};
pub use graph::{shortest_paths, Edge, SpannerGraph};
pub use metric::{IdSet, Metric};
pub use order::{OrderStrategy, PairOrder};
pub use spanner::build_spanner;
pub use wspd::{build_greedy_wspd, WspPair, Wspd};
pub use sim::{run_construction, SimState};
