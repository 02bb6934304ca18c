use std::io::{self, BufRead, BufReader, Write};
use std::net::{Ipv4Addr, TcpListener, TcpStream};
use std::thread;

use super::protocol::{ServerMessage, SessionDefaults, SessionSlot};

/// Binds the bridge on the loopback interface.
pub fn bind(port: u16) -> io::Result<TcpListener> {
    TcpListener::bind((Ipv4Addr::LOCALHOST, port))
}

/// Accepts connections forever, one thread and one session per connection.
pub fn serve(listener: TcpListener, defaults: SessionDefaults) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = match stream {
            Ok(s) => s,
            Err(e) => {
                eprintln!("accept failed: {e}");
                continue;
            }
        };
        let defaults = defaults.clone();
        thread::spawn(move || {
            if let Err(e) = handle_connection(stream, defaults) {
                eprintln!("connection closed: {e}");
            }
        });
    }
    Ok(())
}

/// Runs the protocol over one stream until the peer hangs up.
pub fn handle_connection(stream: TcpStream, defaults: SessionDefaults) -> io::Result<()> {
    stream.set_nodelay(true)?;
    let reader = BufReader::new(stream.try_clone()?);
    let mut writer = io::BufWriter::new(stream);
    run_protocol(reader, &mut writer, defaults)
}

/// Transport-independent loop: hello, then one batch of replies per line.
pub fn run_protocol<R: BufRead, W: Write>(
    reader: R,
    writer: &mut W,
    defaults: SessionDefaults,
) -> io::Result<()> {
    let mut slot = SessionSlot::new(defaults);
    write_message(writer, &ServerMessage::hello())?;
    writer.flush()?;
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        for msg in slot.handle_line(&line) {
            write_message(writer, &msg)?;
        }
        writer.flush()?;
    }
    Ok(())
}

fn write_message<W: Write>(writer: &mut W, msg: &ServerMessage) -> io::Result<()> {
    writer.write_all(msg.to_line().as_bytes())?;
    writer.write_all(b"\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn in_memory_protocol() {
        let input = b"{\"type\":\"configure\",\"seed\":7}\n\n{\"type\":\"click\",\"button\":0}\n";
        let mut out = Vec::new();
        run_protocol(&input[..], &mut out, SessionDefaults::default()).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], r#"{"type":"hello","version":1}"#);
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with(r#"{"type":"state""#));
        assert!(lines[2].starts_with(r#"{"type":"state""#));
    }
}
