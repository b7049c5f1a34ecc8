use std::io::{BufRead, BufReader, Write};
use std::net::{SocketAddr, TcpListener};
use std::thread;
use std::time::Duration;

use lbcp_core::placement::{enumerate_candidates, mask, policy_select, CandidateOptions, Heuristic, PolicyProvider};
use lbcp_core::srp::layout;
use lbcp_core::{BinDims, BinState, Item};
use lbcp_sim::bridge::{parse_policy, BridgeError, BridgeProvider, Message, MessageKind, ScoreRequest, WireCandidate};
use lbcp_sim::episode::{run_episode, EpisodeConfig};
use lbcp_sim::stream::{gen_stream, StreamSpec};
use serde_json::json;

/// Serves one connection; `reply` maps each request line to the raw line to
/// send back, or `None` to stay silent.
fn serve(reply: impl Fn(&str) -> Option<String> + Send + 'static) -> SocketAddr {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    thread::spawn(move || {
        let Ok((stream, _)) = listener.accept() else { return };
        let mut writer = stream.try_clone().unwrap();
        for line in BufReader::new(stream).lines() {
            let Ok(line) = line else { return };
            if let Some(mut out) = reply(&line) {
                out.push('\n');
                if writer.write_all(out.as_bytes()).is_err() {
                    return;
                }
            }
        }
    });
    addr
}

fn respond(req: &Message, kind: MessageKind, payload: serde_json::Value) -> Option<String> {
    Some(serde_json::to_string(&Message { id: req.id, kind, payload }).unwrap())
}

/// Ranks candidates the way the built-in heuristic does, from wire fields only.
fn greedy_scores(c: &[WireCandidate]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..c.len()).collect();
    idx.sort_by(|&a, &b| {
        (c[a].z, -c[a].support_area, c[a].y, c[a].x, a)
            .partial_cmp(&(c[b].z, -c[b].support_area, c[b].y, c[b].x, b))
            .unwrap()
    });
    let mut s = vec![0.0; c.len()];
    for (rank, &i) in idx.iter().enumerate() {
        s[i] = (c.len() - rank) as f64;
    }
    s
}

fn greedy_server() -> SocketAddr {
    serve(|line| {
        let req: Message = serde_json::from_str(line).ok()?;
        match req.kind {
            MessageKind::ScoreRequest => {
                let r: ScoreRequest = serde_json::from_value(req.payload.clone()).ok()?;
                respond(&req, MessageKind::ScoreResponse, json!({ "scores": greedy_scores(&r.candidates) }))
            }
            MessageKind::ValueRequest => respond(&req, MessageKind::ValueResponse, json!({ "value": 0.25 })),
            _ => respond(&req, MessageKind::Error, json!("unexpected")),
        }
    })
}

fn connect(addr: SocketAddr, ms: u64) -> BridgeProvider {
    BridgeProvider::connect(addr, Duration::from_millis(ms)).unwrap()
}

fn sample() -> (BinState, Item, Vec<lbcp_core::Candidate>) {
    let mut s = BinState::new(BinDims::new(10, 10, 10), 0.1).unwrap();
    let base = Item::new(1, 4, 4, 3);
    let c = mask(enumerate_candidates(&s, &base, &CandidateOptions::default()));
    s.apply_pack(base, c[0].placement, c[0].result.support_polygon.clone()).unwrap();
    let item = Item::new(2, 3, 3, 3);
    let c = mask(enumerate_candidates(&s, &item, &CandidateOptions::default()));
    (s, item, c)
}

#[test]
fn policy_strings() {
    assert_eq!(parse_policy("builtin"), Ok(None));
    assert_eq!(parse_policy("bridge:127.0.0.1:9000"), Ok(Some("127.0.0.1:9000".into())));
    assert!(parse_policy("bridge:").is_err());
    assert!(parse_policy("learned").is_err());
}

#[test]
fn external_scores_drive_the_choice() {
    // prefer the last candidate
    let addr = serve(|line| {
        let req: Message = serde_json::from_str(line).ok()?;
        let n = req.payload["candidates"].as_array()?.len();
        let scores: Vec<f64> = (0..n).map(|i| i as f64).collect();
        respond(&req, MessageKind::ScoreResponse, json!({ "scores": scores }))
    });
    let (s, item, c) = sample();
    assert!(c.len() > 1);
    let mut p = connect(addr, 2000);
    let d = policy_select(&s, &item, &c, &mut p).unwrap();
    assert_eq!(d.chosen, c.len() - 1);
    assert_eq!(p.failures, 0);
}

#[test]
fn value_round_trip() {
    let addr = greedy_server();
    let (s, item, _) = sample();
    let mut p = connect(addr, 2000);
    assert_eq!(p.request_value(&s, &item).unwrap(), 0.25);
    assert_eq!(p.value(&s, &item), Some(0.25));
}

#[test]
fn greedy_bridge_reproduces_builtin_episode() {
    let spec = StreamSpec { seq_len: 60, seed: 11, ..Default::default() };
    let stream = gen_stream(&spec, 0);
    let cfg = EpisodeConfig::default();
    let builtin = run_episode(&stream, &cfg, 1, &mut Heuristic).unwrap();
    let mut bridge = connect(greedy_server(), 2000);
    let remote = run_episode(&stream, &cfg, 1, &mut bridge).unwrap();
    assert_eq!(bridge.failures, 0);
    assert_eq!(layout(&remote.final_state), layout(&builtin.final_state));
    assert_eq!(remote.utilization, builtin.utilization);
}

#[test]
fn wrong_length_falls_back_and_keeps_connection() {
    let addr = serve(|line| {
        let req: Message = serde_json::from_str(line).ok()?;
        respond(&req, MessageKind::ScoreResponse, json!({ "scores": [1.0] }))
    });
    let (s, item, c) = sample();
    let mut p = connect(addr, 2000);
    let d = policy_select(&s, &item, &c, &mut p).unwrap();
    let builtin = policy_select(&s, &item, &c, &mut Heuristic).unwrap();
    assert_eq!(d.chosen, builtin.chosen);
    assert_eq!(p.failures, 1);
    assert!(p.is_connected());
}

#[test]
fn malformed_and_error_replies_fall_back() {
    let addr = serve(|line| {
        let req: Message = serde_json::from_str(line).ok()?;
        if req.id == 0 {
            Some("{not json".into())
        } else {
            respond(&req, MessageKind::Error, json!("model not loaded"))
        }
    });
    let (s, item, c) = sample();
    let mut p = connect(addr, 2000);
    assert!(matches!(p.request_scores(&s, &item, &c), Err(BridgeError::Json(_))));
    assert!(matches!(p.request_scores(&s, &item, &c), Err(BridgeError::Remote(_))));
    assert_eq!(p.scores(&s, &item, &c), None);
    assert_eq!(p.value(&s, &item), None);
    assert_eq!(p.failures, 2);
    assert!(p.is_connected());
}

#[test]
fn id_mismatch_drops_the_connection() {
    let addr = serve(|line| {
        let req: Message = serde_json::from_str(line).ok()?;
        let wrong = Message { id: req.id + 7, ..req };
        respond(&wrong, MessageKind::ScoreResponse, json!({ "scores": [] }))
    });
    let (s, item, c) = sample();
    let mut p = connect(addr, 2000);
    assert_eq!(p.scores(&s, &item, &c), None);
    assert!(!p.is_connected());
    assert!(matches!(p.request_scores(&s, &item, &c), Err(BridgeError::Closed)));
}

#[test]
fn silent_server_times_out_and_episode_still_runs() {
    let addr = serve(|_| None);
    let mut p = connect(addr, 100);
    let stream = gen_stream(&StreamSpec { seq_len: 30, ..Default::default() }, 0);
    let cfg = EpisodeConfig::default();
    let remote = run_episode(&stream, &cfg, 2, &mut p).unwrap();
    let builtin = run_episode(&stream, &cfg, 2, &mut Heuristic).unwrap();
    assert!(!p.is_connected());
    // one fallback per policy call; only the first waited for the timeout
    assert_eq!(p.failures, remote.operations);
    assert_eq!(layout(&remote.final_state), layout(&builtin.final_state));
}

#[test]
fn connect_refused_is_an_error() {
    let addr = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap();
    assert!(BridgeProvider::connect(addr, Duration::from_millis(200)).is_err());
}
