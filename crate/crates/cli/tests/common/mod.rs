#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pensionlab_service::{AppState, ScenarioStore};
use serde_json::Value;

pub const BIN: &str = env!("CARGO_BIN_EXE_pensionlab");

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// A service on an ephemeral port; dropping it shuts the runtime down.
pub struct Server {
    pub root: String,
    rt: Option<tokio::runtime::Runtime>,
}

impl Server {
    pub fn start(data: &Path) -> Server {
        let store = ScenarioStore::open(data).expect("open store");
        let rt = tokio::runtime::Runtime::new().expect("runtime");
        let listener = rt
            .block_on(tokio::net::TcpListener::bind("127.0.0.1:0"))
            .expect("bind");
        let addr = listener.local_addr().expect("addr");
        rt.spawn(async move {
            let _ = pensionlab_service::serve(listener, AppState::new(store)).await;
        });
        Server {
            root: format!("http://{addr}"),
            rt: Some(rt),
        }
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}/api/v1/{}", self.root, path.trim_start_matches('/'))
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        if let Some(rt) = self.rt.take() {
            rt.shutdown_background();
        }
    }
}

pub fn run_cli(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .output()
        .expect("spawn pensionlab")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Drops the wall-clock stamp, the one field allowed to differ between
/// front ends.
pub fn canonical(mut v: Value) -> Value {
    if let Some(meta) = v.get_mut("metadata").and_then(Value::as_object_mut) {
        meta.remove("generated_at");
    }
    v
}
