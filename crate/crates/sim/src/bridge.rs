//! External policy over line-delimited JSON on TCP.
//!
//! Each request is one JSON object on one line and receives exactly one
//! response line echoing its `id`. See `docs/bridge_protocol.md`.

use std::io::{BufRead, BufReader, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::time::Duration;

use lbcp_core::binstate::BinSnapshot;
use lbcp_core::placement::{Candidate, PolicyProvider};
use lbcp_core::{BinState, Item};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageKind {
    ScoreRequest,
    ScoreResponse,
    ValueRequest,
    ValueResponse,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub id: u64,
    pub kind: MessageKind,
    pub payload: serde_json::Value,
}

/// Candidate as seen by an external policy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WireCandidate {
    pub x: u32,
    pub y: u32,
    pub z: u32,
    pub stable: bool,
    pub support_area: f64,
    pub ems_id: Option<usize>,
}

impl From<&Candidate> for WireCandidate {
    fn from(c: &Candidate) -> Self {
        let a = c.result.support_polygon.area();
        Self {
            x: c.placement.x,
            y: c.placement.y,
            z: c.placement.z,
            stable: c.stable,
            support_area: *a.numer() as f64 / *a.denom() as f64,
            ems_id: c.ems_id,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreRequest {
    pub state: BinSnapshot,
    pub item: Item,
    pub candidates: Vec<WireCandidate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreResponse {
    pub scores: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueRequest {
    pub state: BinSnapshot,
    pub item: Item,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueResponse {
    pub value: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum BridgeError {
    #[error("bridge i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("bridge message: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bridge closed the connection")]
    Closed,
    #[error("response id {got} does not match request {want}")]
    IdMismatch { want: u64, got: u64 },
    #[error("bridge error: {0}")]
    Remote(String),
    #[error("unexpected response kind {0:?}")]
    UnexpectedKind(MessageKind),
}

/// Client side of the bridge. Any failure falls back to the built-in
/// heuristics for that call; after a transport failure the connection is
/// dropped and every later call falls back immediately.
pub struct BridgeProvider {
    reader: Option<BufReader<TcpStream>>,
    next_id: u64,
    pub failures: usize,
}

impl BridgeProvider {
    pub fn connect(addr: impl ToSocketAddrs, timeout: Duration) -> std::io::Result<Self> {
        let addr = addr
            .to_socket_addrs()?
            .next()
            .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::InvalidInput, "no address"))?;
        let stream = TcpStream::connect_timeout(&addr, timeout)?;
        stream.set_read_timeout(Some(timeout))?;
        stream.set_write_timeout(Some(timeout))?;
        stream.set_nodelay(true)?;
        Ok(Self { reader: Some(BufReader::new(stream)), next_id: 0, failures: 0 })
    }

    pub fn is_connected(&self) -> bool {
        self.reader.is_some()
    }

    fn call(&mut self, kind: MessageKind, payload: serde_json::Value, want: MessageKind) -> Result<serde_json::Value, BridgeError> {
        let reader = self.reader.as_mut().ok_or(BridgeError::Closed)?;
        let id = self.next_id;
        self.next_id += 1;
        let mut line = serde_json::to_vec(&Message { id, kind, payload })?;
        line.push(b'\n');
        reader.get_mut().write_all(&line)?;

        let mut buf = String::new();
        if reader.read_line(&mut buf)? == 0 {
            return Err(BridgeError::Closed);
        }
        let msg: Message = serde_json::from_str(&buf)?;
        if msg.id != id {
            return Err(BridgeError::IdMismatch { want: id, got: msg.id });
        }
        match msg.kind {
            k if k == want => Ok(msg.payload),
            MessageKind::Error => Err(BridgeError::Remote(msg.payload.to_string())),
            k => Err(BridgeError::UnexpectedKind(k)),
        }
    }

    fn fail(&mut self, e: &BridgeError) {
        self.failures += 1;
        if matches!(e, BridgeError::Io(_) | BridgeError::Closed | BridgeError::IdMismatch { .. }) {
            self.reader = None;
        }
    }

    pub fn request_scores(&mut self, state: &BinState, item: &Item, candidates: &[Candidate]) -> Result<Vec<f64>, BridgeError> {
        let req = ScoreRequest {
            state: state.into(),
            item: *item,
            candidates: candidates.iter().map(WireCandidate::from).collect(),
        };
        let payload = self.call(MessageKind::ScoreRequest, serde_json::to_value(req)?, MessageKind::ScoreResponse)?;
        Ok(serde_json::from_value::<ScoreResponse>(payload)?.scores)
    }

    pub fn request_value(&mut self, state: &BinState, item: &Item) -> Result<f64, BridgeError> {
        let req = ValueRequest { state: state.into(), item: *item };
        let payload = self.call(MessageKind::ValueRequest, serde_json::to_value(req)?, MessageKind::ValueResponse)?;
        Ok(serde_json::from_value::<ValueResponse>(payload)?.value)
    }
}

impl PolicyProvider for BridgeProvider {
    fn scores(&mut self, state: &BinState, item: &Item, candidates: &[Candidate]) -> Option<Vec<f64>> {
        match self.request_scores(state, item, candidates) {
            Ok(s) if s.len() == candidates.len() => Some(s),
            Ok(_) => {
                self.failures += 1;
                None
            }
            Err(e) => {
                self.fail(&e);
                None
            }
        }
    }

    fn value(&mut self, state: &BinState, item: &Item) -> Option<f64> {
        match self.request_value(state, item) {
            Ok(v) if v.is_finite() => Some(v),
            Ok(_) => {
                self.failures += 1;
                None
            }
            Err(e) => {
                self.fail(&e);
                None
            }
        }
    }
}

/// Parses `bridge:HOST:PORT`.
pub fn parse_policy(s: &str) -> Result<Option<String>, String> {
    match s {
        "builtin" => Ok(None),
        _ => match s.strip_prefix("bridge:") {
            Some(addr) if !addr.is_empty() => Ok(Some(addr.to_string())),
            _ => Err(format!("unknown policy `{s}`; expected `builtin` or `bridge:ADDR`")),
        },
    }
}
