//! JSON-over-HTTP engine transport. Every command is a POST to one
//! endpoint.

use std::time::Duration;

use fdaa_core::analysis::Suggestion;
use fdaa_core::go::{Color, Coord, Point};
use serde::{Deserialize, Serialize};

use crate::EngineError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum HttpCommand {
    Play { color: Color, vertex: Coord },
    Analyze { color: Color },
    ClearBoard,
    Komi { komi: f64 },
    /// Handicap stones for Black on an empty board.
    Setup { stones: Vec<String> },
}

impl HttpCommand {
    pub fn setup(points: &[Point]) -> Self {
        HttpCommand::Setup {
            stones: points.iter().map(|p| p.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AckReply {
    pub result: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeReply {
    pub suggestions: Vec<Suggestion>,
}

pub struct HttpClient {
    agent: ureq::Agent,
    endpoint: String,
}

impl HttpClient {
    pub fn new(endpoint: &str, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        Self {
            agent,
            endpoint: endpoint.to_string(),
        }
    }

    fn post<T: serde::de::DeserializeOwned>(&self, command: &HttpCommand) -> Result<T, EngineError> {
        let body = serde_json::to_vec(command).expect("commands serialize");
        let mut response = self
            .agent
            .post(&self.endpoint)
            .header("content-type", "application/json")
            .send(&body[..])
            .map_err(transport)?;
        response
            .body_mut()
            .read_json()
            .map_err(|e| EngineError::Malformed(e.to_string()))
    }

    pub fn ack(&self, command: &HttpCommand) -> Result<(), EngineError> {
        let reply: AckReply = self.post(command)?;
        if reply.result {
            Ok(())
        } else {
            Err(EngineError::Rejected(format!("{command:?}")))
        }
    }

    pub fn analyze(&self, color: Color) -> Result<Vec<Suggestion>, EngineError> {
        let reply: AnalyzeReply = self.post(&HttpCommand::Analyze { color })?;
        Ok(reply.suggestions)
    }
}

fn transport(e: ureq::Error) -> EngineError {
    match e {
        ureq::Error::Timeout(_) => EngineError::Timeout,
        ureq::Error::Io(io) if io.kind() == std::io::ErrorKind::ConnectionRefused => {
            EngineError::Connect(io.to_string())
        }
        ureq::Error::HostNotFound | ureq::Error::ConnectionFailed => {
            EngineError::Connect(e.to_string())
        }
        other => EngineError::Transport(other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_bodies() {
        let play = HttpCommand::Play {
            color: Color::White,
            vertex: "F7".parse().unwrap(),
        };
        assert_eq!(
            serde_json::to_string(&play).unwrap(),
            r#"{"command":"play","color":"white","vertex":"F7"}"#
        );
        assert_eq!(
            serde_json::to_string(&HttpCommand::Analyze { color: Color::Black }).unwrap(),
            r#"{"command":"analyze","color":"black"}"#
        );
        let reply: AnalyzeReply =
            serde_json::from_str(r#"{"suggestions":[{"vertex":"B1","sn":12983,"wr":0.46114}]}"#)
                .unwrap();
        assert_eq!(reply.suggestions[0].sn, 12983);
    }
}
