#![allow(dead_code)]

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use indoor_planner::geometry::{FloorPlan, Point2D, Rect};
use indoor_planner::llm::LlmEndpointConfig;

/// What the mock endpoint does with one request.
#[derive(Debug, Clone)]
pub enum Reply {
    /// 200 with a chat-completions body carrying this assistant text.
    Content(String),
    /// Bare status code with a short text body.
    Status(u16),
    /// Holds the connection open without answering.
    Hang(Duration),
}

/// Local chat-completions endpoint that plays back a fixed reply list and
/// then repeats `fallback`.
pub struct MockServer {
    pub base_url: String,
    hits: Arc<AtomicUsize>,
    bodies: Arc<Mutex<Vec<String>>>,
}

impl MockServer {
    pub fn start(replies: Vec<Reply>, fallback: Reply) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind mock");
        let base_url = format!("http://{}/v1", listener.local_addr().unwrap());
        let hits = Arc::new(AtomicUsize::new(0));
        let bodies = Arc::new(Mutex::new(Vec::new()));
        let (h, b) = (hits.clone(), bodies.clone());
        thread::spawn(move || {
            for stream in listener.incoming() {
                let Ok(stream) = stream else { continue };
                let n = h.fetch_add(1, Ordering::SeqCst);
                let reply = replies.get(n).cloned().unwrap_or_else(|| fallback.clone());
                let b = b.clone();
                thread::spawn(move || serve(stream, reply, &b));
            }
        });
        Self { base_url, hits, bodies }
    }

    /// Serves `content` to every request.
    pub fn always(content: &str) -> Self {
        Self::start(Vec::new(), Reply::Content(content.into()))
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::SeqCst)
    }

    /// Request bodies received so far.
    pub fn bodies(&self) -> Vec<String> {
        self.bodies.lock().unwrap().clone()
    }

    pub fn config(&self) -> LlmEndpointConfig {
        LlmEndpointConfig {
            base_url: self.base_url.clone(),
            model: "mock".into(),
            api_key_env: "INDOOR_PLANNER_TEST_KEY".into(),
            timeout_secs: 2.0,
            max_retries: 2,
            backoff_base_secs: 0.0,
            ..Default::default()
        }
    }
}

fn serve(stream: TcpStream, reply: Reply, bodies: &Mutex<Vec<String>>) {
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut len = 0usize;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line).unwrap_or(0) == 0 || line == "\r\n" {
            break;
        }
        if let Some((k, v)) = line.split_once(':') {
            if k.eq_ignore_ascii_case("content-length") {
                len = v.trim().parse().unwrap_or(0);
            }
        }
    }
    let mut body = vec![0; len];
    let _ = reader.read_exact(&mut body);
    bodies.lock().unwrap().push(String::from_utf8_lossy(&body).into_owned());
    let (status, text) = match reply {
        Reply::Content(c) => (200, chat_body(&c)),
        Reply::Status(s) => (s, format!("mock status {s}")),
        Reply::Hang(d) => {
            thread::sleep(d);
            return;
        }
    };
    let mut stream = stream;
    let _ = write!(
        stream,
        "HTTP/1.1 {status} MOCK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{text}",
        text.len()
    );
    let _ = stream.flush();
}

pub fn chat_body(content: &str) -> String {
    serde_json::json!({
        "choices": [{"index": 0, "message": {"role": "assistant", "content": content}}]
    })
    .to_string()
}

/// Empty rectangle with the default materials and no walls.
pub fn empty_room(w: f64, h: f64) -> FloorPlan {
    let mut plan = FloorPlan::new(Rect::new(Point2D::new(0.0, 0.0), w, h));
    plan.add_material("concrete", 12.0);
    plan.add_material("drywall", 3.0);
    plan
}

/// 10 x 10 room split by a drywall partition at x = 5 with a 1 m gap at the
/// top.
pub fn split_room() -> FloorPlan {
    let mut plan = empty_room(10.0, 10.0);
    plan.add_wall(Point2D::new(5.0, 0.0), Point2D::new(5.0, 9.0), "drywall", 0.1);
    plan
}
