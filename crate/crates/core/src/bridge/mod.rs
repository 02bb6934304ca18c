//! Line-oriented JSON bridge for the browser UI.
//!
//! Each TCP connection owns one session. The server greets with
//! `{"type":"hello","version":1}` and then answers every inbound line with
//! one or more outbound lines.

mod protocol;
mod server;

pub use protocol::{ClientMessage, ServerMessage, SessionDefaults, SessionSlot, PROTOCOL_VERSION};
pub use server::{bind, handle_connection, run_protocol, serve};
