use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::thread;

use serde_json::{json, Value};

use iftt_pin::bridge::{self, SessionDefaults};
use iftt_pin::cracker::crack_transcript;
use iftt_pin::engine::{ButtonMapping, Coloring, Digit};
use iftt_pin::session::Transcript;

struct Client {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
}

impl Client {
    fn connect(port: u16) -> Client {
        let stream = TcpStream::connect(("127.0.0.1", port)).unwrap();
        stream.set_nodelay(true).unwrap();
        let mut client = Client {
            reader: BufReader::new(stream.try_clone().unwrap()),
            writer: stream,
        };
        assert_eq!(client.recv(), json!({"type": "hello", "version": 1}));
        client
    }

    fn send(&mut self, msg: Value) {
        writeln!(self.writer, "{msg}").unwrap();
    }

    fn recv(&mut self) -> Value {
        let mut line = String::new();
        self.reader.read_line(&mut line).unwrap();
        serde_json::from_str(&line).unwrap()
    }
}

fn start_server() -> u16 {
    let listener = bridge::bind(0).unwrap();
    let port = listener.local_addr().unwrap().port();
    thread::spawn(move || bridge::serve(listener, SessionDefaults::default()));
    port
}

/// Enters `pin` with `mapping`, always pressing the first button of the
/// needed color. Returns the final `complete` message.
fn enter(client: &mut Client, pin: &[u8], mapping: &ButtonMapping) -> Value {
    let mut state = client.recv();
    let mut position = 0;
    loop {
        assert_eq!(state["type"], "state", "{state}");
        let coloring: Coloring = state["view"]["digits"].as_str().unwrap().parse().unwrap();
        let color = coloring.color_of(Digit::new(pin[position]).unwrap());
        let button = mapping.buttons_with(color)[0].index();
        client.send(json!({"type": "click", "button": button}));
        state = client.recv();
        if state["view"]["status"] == "in_progress" && state["view"]["pin"]["committed"] == position
        {
            continue;
        }
        let next = client.recv();
        assert_eq!(next, json!({"type": "committed", "index": position}));
        position += 1;
        if position == pin.len() {
            let done = client.recv();
            assert_eq!(done["type"], "complete");
            return done;
        }
    }
}

#[test]
fn full_session_over_tcp() {
    let port = start_server();
    let mut client = Client::connect(port);
    client.send(json!({"type": "configure", "n_buttons": 6, "pin_length": 3, "seed": 12}));
    let mapping: ButtonMapping = "GYGGYG".parse().unwrap();
    let done = enter(&mut client, &[7, 0, 7], &mapping);
    assert_eq!(done["pin"], "707");
    let learned: ButtonMapping = done["mapping"].as_str().unwrap().parse().unwrap();
    assert!(learned.is_restriction_of(&mapping));

    client.send(json!({"type": "click", "button": 0}));
    assert_eq!(client.recv()["code"], "finished");

    client.send(json!({"type": "export"}));
    let msg = client.recv();
    assert_eq!(msg["type"], "transcript");
    let transcript: Transcript = serde_json::from_value(msg["document"].clone()).unwrap();
    assert_eq!(crack_transcript(&transcript).unwrap().pin(), Some("707"));
}

#[test]
fn connections_are_independent() {
    let port = start_server();
    let mut a = Client::connect(port);
    let mut b = Client::connect(port);

    b.send(json!({"type": "click", "button": 0}));
    assert_eq!(b.recv()["code"], "not-configured");

    a.send(json!({"type": "configure", "mode": "classic", "pin_length": 1, "seed": 4}));
    b.send(json!({"type": "configure", "mode": "classic", "pin_length": 1, "seed": 4}));
    let classic = ButtonMapping::classic();
    let da = enter(&mut a, &[2], &classic);
    let db = enter(&mut b, &[8], &classic);
    assert_eq!(da["pin"], "2");
    assert_eq!(db["pin"], "8");
    assert_eq!(da["mapping"], "YG");
}

#[test]
fn errors_keep_the_connection_open() {
    let port = start_server();
    let mut client = Client::connect(port);
    client.send(json!({"type": "teleport"}));
    assert_eq!(client.recv()["code"], "bad-message");
    writeln!(client.writer, "not json at all").unwrap();
    assert_eq!(client.recv()["code"], "bad-message");
    client.send(json!({"type": "configure", "n_buttons": 70}));
    assert_eq!(client.recv()["code"], "bad-config");
    client.send(json!({"type": "configure"}));
    let state = client.recv();
    assert_eq!(state["view"]["buttons"], "?????????");
    client.send(json!({"type": "click", "button": 9}));
    assert_eq!(client.recv()["code"], "bad-button");
}
