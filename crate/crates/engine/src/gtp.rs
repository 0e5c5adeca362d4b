//! GTP v2 over a line stream. `analyze <color>` is a local extension: the
//! reply carries one `VERTEX SN WR` triple per line.

use std::io::{BufRead, BufReader, Read, Write};
use std::process::{Child, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use fdaa_core::analysis::Suggestion;
use fdaa_core::go::{Color, Coord, Point};

use crate::stub::StubEngine;
use crate::EngineError;

/// Wire form of a `play` command, newline included.
pub fn play_command(color: Color, coord: Coord) -> String {
    format!("play {} {}\n", color.gtp_name(), coord)
}

/// Parses the body of an `analyze` reply.
pub fn parse_analysis(body: &str) -> Result<Vec<Suggestion>, EngineError> {
    body.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|line| {
            let bad = || EngineError::Malformed(format!("analysis line `{line}`"));
            let mut parts = line.split_whitespace();
            let coord: Coord = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let sn: u32 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let wr: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if parts.next().is_some() || !wr.is_finite() {
                return Err(bad());
            }
            Ok(Suggestion::new(coord, sn, wr))
        })
        .collect()
}

pub fn format_analysis(suggestions: &[Suggestion]) -> String {
    suggestions
        .iter()
        .map(|s| format!("{} {} {}", s.coord, s.sn, s.wr))
        .collect::<Vec<_>>()
        .join("\n")
}

/// A GTP controller. Replies are read on a helper thread so every command
/// can be bounded by a timeout.
pub struct GtpClient {
    writer: Box<dyn Write + Send>,
    lines: Receiver<std::io::Result<String>>,
    child: Option<Child>,
    timeout: Duration,
}

impl GtpClient {
    pub fn from_streams(
        reader: impl Read + Send + 'static,
        writer: impl Write + Send + 'static,
        timeout: Duration,
    ) -> Self {
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            let mut reader = BufReader::new(reader);
            loop {
                let mut line = String::new();
                match reader.read_line(&mut line) {
                    Ok(0) => break,
                    Ok(_) => {
                        if tx.send(Ok(line)).is_err() {
                            break;
                        }
                    }
                    Err(e) => {
                        let _ = tx.send(Err(e));
                        break;
                    }
                }
            }
        });
        Self {
            writer: Box::new(writer),
            lines: rx,
            child: None,
            timeout,
        }
    }

    /// Spawns `argv[0]` with the remaining arguments.
    pub fn spawn(argv: &[String], timeout: Duration) -> Result<Self, EngineError> {
        let (program, args) = argv
            .split_first()
            .ok_or_else(|| EngineError::Config("empty GTP command line".into()))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| EngineError::Connect(format!("{program}: {e}")))?;
        let stdin = child.stdin.take().expect("piped");
        let stdout = child.stdout.take().expect("piped");
        let mut client = Self::from_streams(stdout, stdin, timeout);
        client.child = Some(child);
        Ok(client)
    }

    /// Sends one command and returns the reply body, or the engine's
    /// failure message as [`EngineError::Rejected`].
    pub fn command(&mut self, line: &str) -> Result<String, EngineError> {
        let line = line.trim_end();
        self.writer
            .write_all(format!("{line}\n").as_bytes())
            .and_then(|_| self.writer.flush())
            .map_err(|e| EngineError::Transport(e.to_string()))?;
        let mut reply: Vec<String> = Vec::new();
        loop {
            let next = match self.lines.recv_timeout(self.timeout) {
                Ok(Ok(l)) => l,
                Ok(Err(e)) => return Err(EngineError::Transport(e.to_string())),
                Err(RecvTimeoutError::Timeout) => return Err(EngineError::Timeout),
                Err(RecvTimeoutError::Disconnected) => {
                    return Err(EngineError::Transport("engine closed its output".into()))
                }
            };
            let l = next.trim_end_matches(['\r', '\n']);
            if l.is_empty() {
                if reply.is_empty() {
                    continue;
                }
                break;
            }
            reply.push(l.to_string());
        }
        let first = reply[0].clone();
        let (status, head) = first.split_at(1);
        // Strip an optional numeric id after the status character.
        let head = head.trim_start_matches(|c: char| c.is_ascii_digit()).trim_start();
        let mut body = vec![head.to_string()];
        body.extend(reply.into_iter().skip(1));
        let body = body.join("\n").trim().to_string();
        match status {
            "=" => Ok(body),
            "?" => Err(EngineError::Rejected(body)),
            _ => Err(EngineError::Malformed(format!("reply `{first}`"))),
        }
    }
}

impl Drop for GtpClient {
    fn drop(&mut self) {
        if let Some(mut child) = self.child.take() {
            let _ = self.writer.write_all(b"quit\n");
            let _ = self.writer.flush();
            // Give the engine a moment to exit on its own.
            for _ in 0..20 {
                if matches!(child.try_wait(), Ok(Some(_))) {
                    return;
                }
                thread::sleep(Duration::from_millis(5));
            }
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}

const COMMANDS: &[&str] = &[
    "analyze",
    "boardsize",
    "clear_board",
    "genmove",
    "known_command",
    "komi",
    "list_commands",
    "name",
    "play",
    "protocol_version",
    "quit",
    "set_free_handicap",
    "showboard",
    "version",
];

/// Answers one command line. Returns the full reply text and whether the
/// session should end.
pub fn respond(engine: &mut StubEngine, line: &str) -> (String, bool) {
    let line = line.split('#').next().unwrap_or("").trim();
    if line.is_empty() {
        return (String::new(), false);
    }
    let mut words = line.split_whitespace().peekable();
    let id = words
        .next_if(|w| w.bytes().all(|b| b.is_ascii_digit()))
        .unwrap_or("");
    let cmd = words.next().unwrap_or("");
    let args: Vec<&str> = words.collect();
    let ok = |body: &str| format!("={id} {body}").trim_end().to_string() + "\n\n";
    let fail = |msg: &str| format!("?{id} {msg}\n\n");
    let color = |i: usize| args.get(i).and_then(|a| a.parse::<Color>().ok());

    let reply = match cmd {
        "protocol_version" => ok("2"),
        "name" => ok("fdaa-stub"),
        "version" => ok(env!("CARGO_PKG_VERSION")),
        "known_command" => ok(if args.first().is_some_and(|a| COMMANDS.contains(a)) {
            "true"
        } else {
            "false"
        }),
        "list_commands" => ok(&COMMANDS.join("\n")),
        "quit" => return (ok(""), true),
        "boardsize" => match args.first() {
            Some(&"19") => ok(""),
            _ => fail("unacceptable size"),
        },
        "clear_board" => {
            engine.clear();
            ok("")
        }
        "komi" => match args.first().and_then(|a| a.parse::<f64>().ok()) {
            Some(k) => {
                engine.set_komi(k);
                ok("")
            }
            None => fail("syntax error"),
        },
        "play" => match (color(0), args.get(1).and_then(|v| v.parse::<Coord>().ok())) {
            (Some(c), Some(v)) => {
                if engine.play(c, v) {
                    ok("")
                } else {
                    fail("illegal move")
                }
            }
            _ => fail("syntax error"),
        },
        "genmove" => match color(0) {
            Some(c) if c == engine.board().to_move() => ok(&engine.genmove(c).to_string()),
            Some(_) => fail("not this color's turn"),
            None => fail("syntax error"),
        },
        "analyze" => match color(0) {
            Some(c) => ok(&format_analysis(&engine.analyze(c))),
            None => fail("syntax error"),
        },
        "set_free_handicap" => {
            let points: Option<Vec<Point>> = args.iter().map(|a| a.parse().ok()).collect();
            match points {
                Some(p) if engine.setup(&p) => ok(""),
                _ => fail("bad handicap"),
            }
        }
        "showboard" => ok(&format!(
            "ply {} hash {:016x}",
            engine.board().ply(),
            engine.board().position_hash()
        )),
        _ => fail("unknown command"),
    };
    (reply, false)
}

/// Runs a GTP loop until `quit` or end of input.
pub fn serve(engine: &mut StubEngine, input: impl BufRead, mut output: impl Write) -> std::io::Result<()> {
    for line in input.lines() {
        let (reply, quit) = respond(engine, &line?);
        if !reply.is_empty() {
            output.write_all(reply.as_bytes())?;
            output.flush()?;
        }
        if quit {
            break;
        }
    }
    Ok(())
}
