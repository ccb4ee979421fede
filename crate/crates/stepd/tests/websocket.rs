use std::net::TcpStream;
use std::thread;
use std::time::Duration;

use serde_json::Value as Json;
use tungstenite::stream::MaybeTlsStream;
use tungstenite::{connect, Message, WebSocket};
use xuml_core::trace::serialize_log;
use xuml_stepd::protocol::event_payload;
use xuml_stepd::WsServer;
use xuml_testkit::Fixture;

type Client = WebSocket<MaybeTlsStream<TcpStream>>;

fn spawn_server(fx: &Fixture) -> String {
    let server = WsServer::bind("127.0.0.1:0", fx.fused(), fx.options()).unwrap();
    let url = format!("ws://{}", server.local_addr().unwrap());
    thread::spawn(move || server.serve());
    url
}

fn send(ws: &mut Client, text: &str) {
    ws.send(Message::text(text)).unwrap();
}

/// Frames up to and including the reply with `id`.
fn until_reply(ws: &mut Client, id: u64) -> Vec<String> {
    let mut frames = Vec::new();
    loop {
        let Message::Text(text) = ws.read().unwrap() else { continue };
        let text = text.as_str().to_string();
        let done = event_payload(&text).is_none() && serde_json::from_str::<Json>(&text).unwrap()["id"] == id;
        frames.push(text);
        if done {
            return frames;
        }
    }
}

#[test]
fn websocket_run_matches_batch_and_second_client_is_busy() {
    let fx = Fixture::load("park_ranger");
    let url = spawn_server(&fx);
    let (mut ws, _) = connect(&url).unwrap();
    send(&mut ws, r#"{"id":1,"cmd":"model"}"#);
    let model = until_reply(&mut ws, 1);
    assert!(model[0].contains("\"Ranger\""));

    let (mut other, _) = connect(&url).unwrap();
    let Message::Text(busy) = other.read().unwrap() else { panic!("expected a text frame") };
    let busy: Json = serde_json::from_str(busy.as_str()).unwrap();
    assert_eq!(busy["ok"], false);
    assert_eq!(busy["error"]["kind"], "busy");

    send(
        &mut ws,
        r#"{"id":2,"cmd":"start","entry":"Park.CreateRanger","args":[{"t":"str","v":"Ann"},{"t":"int","v":34}]}"#,
    );
    send(&mut ws, r#"{"id":3,"cmd":"continue"}"#);
    let mut frames = until_reply(&mut ws, 2);
    frames.extend(until_reply(&mut ws, 3));
    let streamed: String = frames.iter().filter_map(|f| event_payload(f)).map(|e| format!("{e}\n")).collect();
    assert_eq!(streamed, serialize_log(&fx.execute().1));
    ws.close(None).unwrap();
    let _ = ws.read();

    // The slot frees up once the first client leaves.
    let mut reconnected = None;
    for _ in 0..100 {
        let (mut ws, _) = connect(&url).unwrap();
        send(&mut ws, r#"{"id":9,"cmd":"state"}"#);
        let Message::Text(reply) = ws.read().unwrap() else { continue };
        let reply: Json = serde_json::from_str(reply.as_str()).unwrap();
        if reply["error"]["kind"] != "busy" {
            reconnected = Some(reply);
            break;
        }
        thread::sleep(Duration::from_millis(20));
    }
    let reply = reconnected.expect("server accepts a new client");
    assert_eq!(reply["id"], 9);
    assert_eq!(reply["error"]["kind"], "no-session");
}
