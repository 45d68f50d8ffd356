//! Newline-delimited JSON environment server.
//!
//! Requests, one JSON object per line:
//!
//! ```text
//! {"cmd":"hello"}
//! {"cmd":"reset","seed":7}
//! {"cmd":"step","action":3}
//! {"cmd":"close"}
//! ```
//!
//! Each request gets exactly one response line: `{"spec":{...}}` for hello,
//! `{"transition":{...}}` for reset and step, `{"ack":"close"}` for close and
//! `{"error":{"code":...,"message":...}}` otherwise. Error codes are
//! `bad_json`, `bad_action`, `not_reset` and `episode_over`; all of them leave
//! the session usable. Observations are `[v_1..v_n, p_1..p_m]`, actions use
//! `0` for do-nothing and `i` for emptying container `i`, and `pu_index` in
//! the step info is 1-based like the action codes.

use std::io::{self, BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::Arc;
use std::thread;

use serde::{Deserialize, Serialize};

use crate::config::EnvConfig;
use crate::env::{Env, EnvError, StepResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "cmd", rename_all = "snake_case", deny_unknown_fields)]
pub enum Request {
    Hello,
    Reset { seed: u64 },
    Step { action: i64 },
    Close,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Response {
    Spec(SpecMessage),
    Transition(TransitionMessage),
    Ack(String),
    Error(ErrorMessage),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecMessage {
    pub n: usize,
    pub m: usize,
    pub obs_len: usize,
    pub actions: usize,
    pub fingerprint: String,
    pub max_episode_steps: usize,
    pub timestep_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionMessage {
    pub observation: Vec<f64>,
    pub reward: f64,
    pub terminated: bool,
    pub truncated: bool,
    pub info: InfoMessage,
}

/// Step details. After a reset only `t` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoMessage {
    pub t: usize,
    pub pu_available: Option<bool>,
    pub emptied_volume: Option<f64>,
    pub pu_index: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    BadJson,
    BadAction,
    NotReset,
    EpisodeOver,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorMessage {
    pub code: ErrorCode,
    pub message: String,
}

impl Response {
    fn error(code: ErrorCode, message: impl Into<String>) -> Self {
        Response::Error(ErrorMessage {
            code,
            message: message.into(),
        })
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("response serializes")
    }
}

impl From<EnvError> for Response {
    fn from(err: EnvError) -> Self {
        let code = match err {
            EnvError::InvalidAction { .. } => ErrorCode::BadAction,
            EnvError::NotReset => ErrorCode::NotReset,
            EnvError::EpisodeOver => ErrorCode::EpisodeOver,
        };
        Response::error(code, err.to_string())
    }
}

/// Wire form of a step outcome.
pub fn transition_message(result: &StepResult, t: usize) -> TransitionMessage {
    TransitionMessage {
        observation: result.observation.clone(),
        reward: result.reward,
        terminated: result.terminated,
        truncated: result.truncated,
        info: InfoMessage {
            t,
            pu_available: Some(result.info.pu_available),
            emptied_volume: result.info.emptied_volume,
            pu_index: result.info.pu_index.map(|k| k + 1),
        },
    }
}

/// Wire form of a reset.
pub fn reset_message(observation: Vec<f64>) -> TransitionMessage {
    TransitionMessage {
        observation,
        reward: 0.0,
        terminated: false,
        truncated: false,
        info: InfoMessage {
            t: 0,
            pu_available: None,
            emptied_volume: None,
            pu_index: None,
        },
    }
}

/// Protocol state of one connection.
pub struct Session {
    env: Env,
    spec: SpecMessage,
    closed: bool,
}

impl Session {
    pub fn new(cfg: EnvConfig) -> Self {
        let spec = SpecMessage {
            n: cfg.container_count(),
            m: cfg.pu_count,
            obs_len: cfg.observation_len(),
            actions: cfg.action_count(),
            fingerprint: cfg.fingerprint(),
            max_episode_steps: cfg.max_episode_steps,
            timestep_seconds: cfg.timestep_seconds,
        };
        Self {
            env: Env::new(cfg),
            spec,
            closed: false,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn handle(&mut self, request: Request) -> Response {
        match request {
            Request::Hello => Response::Spec(self.spec.clone()),
            Request::Reset { seed } => Response::Transition(reset_message(self.env.reset(seed))),
            Request::Step { action } => match self.env.step_code(action) {
                Ok(result) => Response::Transition(transition_message(&result, self.env.state().t)),
                Err(err) => err.into(),
            },
            Request::Close => {
                self.closed = true;
                Response::Ack("close".into())
            }
        }
    }

    pub fn handle_line(&mut self, line: &str) -> Response {
        match serde_json::from_str::<Request>(line) {
            Ok(request) => self.handle(request),
            Err(err) => Response::error(ErrorCode::BadJson, err.to_string()),
        }
    }
}

/// Serves one session until `close` or end of input.
pub fn serve_stream<R: Read, W: Write>(cfg: EnvConfig, input: R, output: W) -> io::Result<()> {
    let mut session = Session::new(cfg);
    let mut reader = BufReader::new(input);
    let mut writer = io::BufWriter::new(output);
    let mut line = String::new();
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            break;
        }
        let request = line.trim_end_matches(['\n', '\r']);
        if request.trim().is_empty() {
            continue;
        }
        writer.write_all(session.handle_line(request).to_line().as_bytes())?;
        writer.write_all(b"\n")?;
        if session.is_closed() {
            break;
        }
        // Batch responses only while more complete requests are queued.
        if !reader.buffer().contains(&b'\n') {
            writer.flush()?;
        }
    }
    writer.flush()
}

pub fn serve_stdio(cfg: EnvConfig) -> io::Result<()> {
    serve_stream(cfg, io::stdin().lock(), io::stdout().lock())
}

/// Accepts connections forever, one thread and one environment per
/// connection.
pub fn serve_tcp(cfg: EnvConfig, listener: TcpListener) -> io::Result<()> {
    let cfg = Arc::new(cfg);
    for stream in listener.incoming() {
        let stream = stream?;
        let cfg = Arc::clone(&cfg);
        thread::spawn(move || {
            let _ = serve_connection(&cfg, stream);
        });
    }
    Ok(())
}

fn serve_connection(cfg: &EnvConfig, stream: TcpStream) -> io::Result<()> {
    stream.set_nodelay(true)?;
    let reader = stream.try_clone()?;
    serve_stream(cfg.clone(), reader, stream)
}

/// Minimal blocking client, handy for tests and examples.
pub struct Client<R: BufRead, W: Write> {
    reader: R,
    writer: W,
    line: String,
}

impl Client<BufReader<TcpStream>, TcpStream> {
    pub fn connect(addr: impl std::net::ToSocketAddrs) -> io::Result<Self> {
        let stream = TcpStream::connect(addr)?;
        stream.set_nodelay(true)?;
        Ok(Self::new(BufReader::new(stream.try_clone()?), stream))
    }
}

impl<R: BufRead, W: Write> Client<R, W> {
    pub fn new(reader: R, writer: W) -> Self {
        Self {
            reader,
            writer,
            line: String::new(),
        }
    }

    /// Sends one request and returns the raw response line without its
    /// terminator.
    pub fn request_raw(&mut self, request: &str) -> io::Result<String> {
        self.writer.write_all(request.as_bytes())?;
        self.writer.write_all(b"\n")?;
        self.writer.flush()?;
        self.line.clear();
        if self.reader.read_line(&mut self.line)? == 0 {
            return Err(io::Error::new(
                io::ErrorKind::UnexpectedEof,
                "server closed",
            ));
        }
        Ok(self.line.trim_end().to_string())
    }

    pub fn request(&mut self, request: &Request) -> io::Result<Response> {
        let raw = self.request_raw(&serde_json::to_string(request)?)?;
        serde_json::from_str(&raw).map_err(io::Error::other)
    }
}
