mod common;

use std::io::BufReader;
use std::net::TcpListener;
use std::process::{Command, Stdio};
use std::thread;

use container_sim::config::default_config;
use container_sim::protocol::{serve_tcp, Client, ErrorCode, Request, Response};
use container_sim::{Action, Env};

use common::{bin, configs_dir};

fn start_tcp_server() -> std::net::SocketAddr {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let cfg = default_config(5, 2, 120.0).unwrap();
    thread::spawn(move || serve_tcp(cfg, listener));
    addr
}

fn transition(resp: Response) -> container_sim::protocol::TransitionMessage {
    match resp {
        Response::Transition(t) => t,
        other => panic!("expected transition, got {other:?}"),
    }
}

fn error_code(resp: Response) -> ErrorCode {
    match resp {
        Response::Error(e) => e.code,
        other => panic!("expected error, got {other:?}"),
    }
}

#[test]
fn tcp_episode_matches_in_process_env() {
    let addr = start_tcp_server();
    let mut client = Client::connect(addr).unwrap();
    let mut env = Env::new(default_config(5, 2, 120.0).unwrap());

    let reset = transition(client.request(&Request::Reset { seed: 11 }).unwrap());
    assert_eq!(reset.observation, env.reset(11));
    for k in 0..300usize {
        let code = (k * 7 % 6) as i64;
        let got = transition(client.request(&Request::Step { action: code }).unwrap());
        let want = env.step_code(code).unwrap();
        assert_eq!(got.observation, want.observation, "step {k}");
        assert_eq!(got.reward.to_bits(), want.reward.to_bits());
        assert_eq!(got.terminated, want.terminated);
        assert_eq!(got.info.pu_index, want.info.pu_index.map(|j| j + 1));
        if want.done() {
            break;
        }
    }
    assert_eq!(
        client.request(&Request::Close).unwrap(),
        Response::Ack("close".into())
    );
}

#[test]
fn tcp_connections_are_independent() {
    let addr = start_tcp_server();
    let mut a = Client::connect(addr).unwrap();
    let mut b = Client::connect(addr).unwrap();
    a.request(&Request::Reset { seed: 1 }).unwrap();
    assert_eq!(
        error_code(b.request(&Request::Step { action: 0 }).unwrap()),
        ErrorCode::NotReset
    );
    b.request(&Request::Reset { seed: 1 }).unwrap();
    for _ in 0..5 {
        let x = transition(a.request(&Request::Step { action: 2 }).unwrap());
        let y = transition(b.request(&Request::Step { action: 2 }).unwrap());
        assert_eq!(x, y);
    }
}

#[test]
fn stdio_errors_keep_the_session_alive() {
    let mut child = Command::new(bin())
        .args(["serve", "--config"])
        .arg(configs_dir().join("synthetic-5-2-60.json"))
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let stdin = child.stdin.take().unwrap();
    let stdout = BufReader::new(child.stdout.take().unwrap());
    let mut client = Client::new(stdout, stdin);

    let raw = client
        .request_raw("{\"cmd\":\"step\",\"action\":0}")
        .unwrap();
    assert!(raw.starts_with(r#"{"error":{"code":"not_reset""#), "{raw}");
    let raw = client.request_raw("{oops").unwrap();
    assert!(raw.starts_with(r#"{"error":{"code":"bad_json""#), "{raw}");
    client.request_raw(r#"{"cmd":"reset","seed":2}"#).unwrap();
    let raw = client.request_raw(r#"{"cmd":"step","action":6}"#).unwrap();
    assert!(raw.starts_with(r#"{"error":{"code":"bad_action""#), "{raw}");
    let ok = transition(client.request(&Request::Step { action: 1 }).unwrap());
    assert_eq!(ok.info.t, 1);
    assert_eq!(ok.info.pu_index, Some(1));
    assert_eq!(
        client.request(&Request::Close).unwrap(),
        Response::Ack("close".into())
    );
    assert!(child.wait().unwrap().success());
}

#[test]
fn episode_over_is_reported_until_reset() {
    let addr = start_tcp_server();
    let mut client = Client::connect(addr).unwrap();
    client.request(&Request::Reset { seed: 4 }).unwrap();
    // do-nothing on the default 5-2 config overflows well within the horizon
    let mut last = None;
    for _ in 0..1500 {
        let t = transition(
            client
                .request(&Request::Step {
                    action: Action::DoNothing.code() as i64,
                })
                .unwrap(),
        );
        let done = t.terminated || t.truncated;
        last = Some(t);
        if done {
            break;
        }
    }
    let last = last.unwrap();
    assert!(last.terminated && !last.truncated);
    assert_eq!(last.reward, -1.0);
    assert_eq!(
        error_code(client.request(&Request::Step { action: 0 }).unwrap()),
        ErrorCode::EpisodeOver
    );
    let reset = transition(client.request(&Request::Reset { seed: 4 }).unwrap());
    assert_eq!(reset.info.t, 0);
}

#[test]
fn serve_rejects_bad_config() {
    let out = Command::new(bin())
        .args(["serve", "--config", "/nonexistent.json"])
        .stdin(Stdio::null())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
