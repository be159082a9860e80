//! WebSocket endpoint for the serve protocol. Each connection gets its own
//! session; its messages are handled strictly in arrival order.

use std::io::Write;
use std::net::{TcpListener, TcpStream};
use std::thread;

use tungstenite::{accept, Message};

use vizact_core::registry::Registry;

use crate::session::Session;

pub fn serve(registry: &'static Registry, port: u16) -> std::io::Result<()> {
    let listener = TcpListener::bind(("127.0.0.1", port))?;
    let addr = listener.local_addr()?;
    let mut out = std::io::stdout();
    writeln!(out, "listening on ws://{addr}")?;
    out.flush()?;
    for stream in listener.incoming() {
        let stream = stream?;
        thread::spawn(move || {
            if let Err(e) = connection(registry, stream) {
                eprintln!("connection closed: {e}");
            }
        });
    }
    Ok(())
}

fn connection(registry: &'static Registry, stream: TcpStream) -> tungstenite::Result<()> {
    let mut ws = accept(stream).map_err(|e| match e {
        tungstenite::HandshakeError::Failure(e) => e,
        tungstenite::HandshakeError::Interrupted(_) => tungstenite::Error::ConnectionClosed,
    })?;
    let mut session = Session::new(registry);
    loop {
        let text = match ws.read()? {
            Message::Text(t) => t.to_string(),
            Message::Binary(b) => String::from_utf8_lossy(&b).into_owned(),
            Message::Close(_) => return Ok(()),
            _ => continue,
        };
        for reply in session.handle(&text) {
            ws.send(Message::text(reply.to_string()))?;
        }
    }
}
