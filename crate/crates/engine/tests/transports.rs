use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use fdaa_core::go::{Color, Coord};
use fdaa_engine::http::{AckReply, AnalyzeReply, HttpCommand};
use fdaa_engine::{EngineConfig, EngineError, EngineSession, StubEngine, StubSettings};

fn stub_gtp_command(seed: u64) -> Vec<String> {
    vec![
        env!("CARGO_BIN_EXE_fdaa-stub-gtp").to_string(),
        "--seed".into(),
        seed.to_string(),
    ]
}

#[test]
fn gtp_subprocess_matches_in_process_stub() {
    let mut gtp = EngineSession::open(EngineConfig::gtp(stub_gtp_command(42)), 7.5).unwrap();
    let mut local = EngineSession::open(EngineConfig::stub(42), 7.5).unwrap();
    for _ in 0..12 {
        let a = gtp.analyze().unwrap();
        assert_eq!(a, local.analyze().unwrap());
        gtp.play(a.color, a.top().coord).unwrap();
        local.play(a.color, a.top().coord).unwrap();
    }
    assert_eq!(gtp.board(), local.board());
}

#[test]
fn gtp_spawn_failure_is_a_connect_error() {
    let cfg = EngineConfig::gtp(vec!["/nonexistent/engine".into()]);
    assert!(matches!(
        EngineSession::open(cfg, 0.0),
        Err(EngineError::Connect(_))
    ));
}

/// Minimal HTTP/1.1 server in front of a stub engine; records request bodies.
fn serve_http(settings: StubSettings) -> (String, Arc<Mutex<Vec<String>>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/engine", listener.local_addr().unwrap());
    let bodies = Arc::new(Mutex::new(Vec::new()));
    let log = Arc::clone(&bodies);
    thread::spawn(move || {
        let mut engine = StubEngine::new(settings);
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { break };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut len = 0usize;
            loop {
                let mut line = String::new();
                if reader.read_line(&mut line).unwrap_or(0) == 0 {
                    break;
                }
                let line = line.trim_end();
                if line.is_empty() {
                    break;
                }
                if let Some((k, v)) = line.split_once(':') {
                    if k.eq_ignore_ascii_case("content-length") {
                        len = v.trim().parse().unwrap();
                    }
                }
            }
            let mut body = vec![0; len];
            reader.read_exact(&mut body).unwrap();
            let body = String::from_utf8(body).unwrap();
            log.lock().unwrap().push(body.clone());
            let reply = match serde_json::from_str::<HttpCommand>(&body).unwrap() {
                HttpCommand::Analyze { color } => serde_json::to_string(&AnalyzeReply {
                    suggestions: engine.analyze(color),
                }),
                HttpCommand::Play { color, vertex } => serde_json::to_string(&AckReply {
                    result: engine.play(color, vertex),
                }),
                HttpCommand::ClearBoard => {
                    engine.clear();
                    serde_json::to_string(&AckReply { result: true })
                }
                HttpCommand::Komi { komi } => {
                    engine.set_komi(komi);
                    serde_json::to_string(&AckReply { result: true })
                }
                HttpCommand::Setup { .. } => serde_json::to_string(&AckReply { result: false }),
            }
            .unwrap();
            let _ = write!(
                stream,
                "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                reply.len(),
                reply
            );
        }
    });
    (url, bodies)
}

#[test]
fn http_transport_round_trip() {
    let (url, bodies) = serve_http(StubSettings::new(9, 20000));
    let mut http = EngineSession::open(EngineConfig::http(url), 6.5).unwrap();
    let mut local = EngineSession::open(EngineConfig::stub(9), 6.5).unwrap();
    http.play(Color::Black, "Q16".parse().unwrap()).unwrap();
    local.play(Color::Black, "Q16".parse().unwrap()).unwrap();
    http.play(Color::White, "F7".parse().unwrap()).unwrap();
    local.play(Color::White, "F7".parse().unwrap()).unwrap();
    assert_eq!(http.analyze().unwrap(), local.analyze().unwrap());
    let bodies = bodies.lock().unwrap();
    assert_eq!(bodies[0], r#"{"command":"clear_board"}"#);
    assert_eq!(bodies[1], r#"{"command":"komi","komi":6.5}"#);
    assert_eq!(bodies[3], r#"{"command":"play","color":"white","vertex":"F7"}"#);
}

#[test]
fn http_rejection_keeps_board() {
    let (url, _) = serve_http(StubSettings::new(9, 20000));
    let mut http = EngineSession::open(EngineConfig::http(url), 6.5).unwrap();
    let before = http.board().clone();
    assert!(matches!(
        http.setup(&["D4".parse().unwrap()]),
        Err(EngineError::Rejected(_))
    ));
    assert_eq!(http.board(), &before);
    http.play(Color::Black, Coord::Pass).unwrap();
    assert_eq!(http.board().ply(), 1);
}

#[test]
fn unreachable_endpoint_fails_fast() {
    // Bind then drop to get a port nobody listens on.
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let mut cfg = EngineConfig::http(format!("http://127.0.0.1:{port}/engine"));
    cfg.timeout_ms = 500;
    let start = Instant::now();
    let err = EngineSession::open(cfg, 0.0).err().unwrap();
    assert!(
        matches!(err, EngineError::Connect(_) | EngineError::Transport(_) | EngineError::Timeout),
        "{err:?}"
    );
    assert!(start.elapsed() < Duration::from_secs(2));
}
