//! An in-process chat-completion server on a loopback port.

#![allow(dead_code)]

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;

pub struct FakeServer {
    pub url: String,
    pub requests: Arc<AtomicUsize>,
    pub auth: Arc<Mutex<Vec<String>>>,
}

/// Answers deduction-style: "True" when the request body has an even byte sum.
pub fn parity_answer(body: &[u8]) -> String {
    let sum: u64 = body.iter().map(|&b| u64::from(b)).sum();
    let word = if sum.is_multiple_of(2) { "True" } else { "False" };
    format!("Let me check the rules. Therefore, the answer is {word}.")
}

fn read_request(stream: &mut TcpStream) -> Option<(Vec<String>, Vec<u8>)> {
    let mut reader = BufReader::new(stream.try_clone().ok()?);
    let mut headers = Vec::new();
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line).ok()? == 0 {
            return None;
        }
        let line = line.trim_end().to_string();
        if line.is_empty() {
            break;
        }
        headers.push(line);
    }
    let len = headers
        .iter()
        .find_map(|h| h.to_ascii_lowercase().strip_prefix("content-length:").map(|v| v.trim().parse::<usize>().ok()))
        .flatten()
        .unwrap_or(0);
    let mut body = vec![0; len];
    reader.read_exact(&mut body).ok()?;
    Some((headers, body))
}

/// Serves until the process exits. The first `failures` requests get a 503.
pub fn spawn(failures: usize, answer: fn(&[u8]) -> String) -> FakeServer {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let requests = Arc::new(AtomicUsize::new(0));
    let auth = Arc::new(Mutex::new(Vec::new()));
    let (count, seen) = (requests.clone(), auth.clone());
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let (count, seen) = (count.clone(), seen.clone());
            thread::spawn(move || {
                let Some((headers, body)) = read_request(&mut stream) else { return };
                let n = count.fetch_add(1, Ordering::SeqCst);
                if let Some(h) = headers.iter().find(|h| h.to_ascii_lowercase().starts_with("authorization:")) {
                    seen.lock().unwrap().push(h.split_once(':').unwrap().1.trim().to_string());
                }
                let (status, payload) = if n < failures {
                    ("503 Service Unavailable", r#"{"error":"busy"}"#.to_string())
                } else {
                    let content = answer(&body);
                    let payload = serde_json::json!({
                        "id": "fake",
                        "object": "chat.completion",
                        "choices": [{"index": 0, "message": {"role": "assistant", "content": content}, "finish_reason": "stop"}],
                    });
                    ("200 OK", payload.to_string())
                };
                let resp = format!(
                    "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{payload}",
                    payload.len()
                );
                let _ = stream.write_all(resp.as_bytes());
            });
        }
    });
    FakeServer { url, requests, auth }
}
