//! Starts the JSON-lines server on an ephemeral TCP port and drives one
//! episode through it with the rule-based controller.
//!
//! cargo run --example protocol_client

use std::net::TcpListener;
use std::thread;

use container_sim::config::default_config;
use container_sim::env::State;
use container_sim::policies::rule_based_action;
use container_sim::protocol::{serve_tcp, Client, Request, Response};

fn main() -> std::io::Result<()> {
    let cfg = default_config(5, 5, 120.0)
        .unwrap()
        .with_max_episode_steps(600);
    let listener = TcpListener::bind("127.0.0.1:0")?;
    let addr = listener.local_addr()?;
    let server_cfg = cfg.clone();
    thread::spawn(move || serve_tcp(server_cfg, listener));

    let mut client = Client::connect(addr)?;
    println!("{}", client.request_raw(r#"{"cmd":"hello"}"#)?);

    let n = cfg.container_count();
    let Response::Transition(mut tr) = client.request(&Request::Reset { seed: 3 })? else {
        panic!("reset failed");
    };
    let mut total = 0.0;
    let mut t = 0;
    loop {
        let state = State {
            volumes: tr.observation[..n].to_vec(),
            timers: tr.observation[n..].to_vec(),
            t,
        };
        let action = rule_based_action(&state, &cfg, 1.0);
        match client.request(&Request::Step {
            action: action.code() as i64,
        })? {
            Response::Transition(next) => tr = next,
            other => panic!("unexpected response {other:?}"),
        }
        t += 1;
        total += tr.reward;
        if tr.terminated || tr.truncated {
            break;
        }
    }
    println!("episode finished after {t} steps with return {total:.3}");
    println!("{}", client.request_raw(r#"{"cmd":"close"}"#)?);
    Ok(())
}
