//! Layout selection and SWAP routing onto a device coupling graph.

mod graph;
mod route;

pub use graph::{casablanca_topology, load_edge_list, parse_edge_list, CouplingGraph};
pub use route::{cost, route, CostReport, Layout, Routing, SWAP_CNOTS};
