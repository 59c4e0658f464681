//! `POST /query` endpoint over a read-only repository.

use std::io::Write;
use std::sync::Arc;

use ontodomain_core::repository::QueryRow;
use ontodomain_core::Repository;
use tiny_http::{Header, Method, Request, Response, Server};

const WORKERS: usize = 4;

fn json_header() -> Header {
    Header::from_bytes("Content-Type", "application/json").expect("static header")
}

fn respond(request: Request, status: u16, body: String) {
    let response = Response::from_string(body).with_status_code(status).with_header(json_header());
    if let Err(e) = request.respond(response) {
        eprintln!("response failed: {e}");
    }
}

fn error_body(message: &str) -> String {
    serde_json::json!({ "error": message }).to_string()
}

fn handle(repo: &Repository, mut request: Request) {
    if request.url() != "/query" {
        return respond(request, 404, error_body("not found"));
    }
    if *request.method() != Method::Post {
        return respond(request, 405, error_body("use POST with the query as the body"));
    }
    let mut body = String::new();
    if let Err(e) = request.as_reader().read_to_string(&mut body) {
        return respond(request, 400, error_body(&format!("unreadable body: {e}")));
    }
    match repo.run_query(&body) {
        Ok(rows) => {
            let rows: Vec<QueryRow> = rows.iter().map(QueryRow::from).collect();
            respond(request, 200, serde_json::to_string(&rows).expect("rows serialize"));
        }
        Err(e) => respond(request, 400, error_body(&e.to_string())),
    }
}

/// Blocks serving requests. Prints the bound address first so callers
/// passing port 0 can find it.
pub fn serve(repo: &Repository, addr: &str) -> anyhow::Result<()> {
    let server = Server::http(addr).map_err(|e| anyhow::anyhow!("cannot listen on {addr}: {e}"))?;
    let bound = server.server_addr().to_ip().map(|a| a.to_string()).unwrap_or_else(|| addr.to_string());
    let mut stdout = std::io::stdout();
    writeln!(stdout, "listening on http://{bound}")?;
    stdout.flush()?;

    let server = Arc::new(server);
    std::thread::scope(|scope| {
        for _ in 0..WORKERS {
            let server = Arc::clone(&server);
            scope.spawn(move || {
                for request in server.incoming_requests() {
                    handle(repo, request);
                }
            });
        }
    });
    Ok(())
}
