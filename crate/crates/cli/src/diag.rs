//! JSON-lines diagnostics on stderr. Library `log` records are routed
//! through the same channel.

use std::io::Write;

use log::{Level, LevelFilter, Log, Metadata, Record};
use serde_json::{json, Map, Value};

struct JsonLogger;

impl Log for JsonLogger {
    fn enabled(&self, metadata: &Metadata) -> bool {
        metadata.level() <= log::max_level()
    }

    fn log(&self, record: &Record) {
        if self.enabled(record.metadata()) {
            emit(
                record.level(),
                "log",
                json!({ "target": record.target(), "message": record.args().to_string() }),
            );
        }
    }

    fn flush(&self) {
        let _ = std::io::stderr().flush();
    }
}

static LOGGER: JsonLogger = JsonLogger;

pub fn init(verbose: bool) {
    if log::set_logger(&LOGGER).is_ok() {
        log::set_max_level(if verbose { LevelFilter::Debug } else { LevelFilter::Info });
    }
}

/// Writes `{"level": .., "event": .., ..fields}` as one line.
pub fn emit(level: Level, event: &str, fields: Value) {
    let mut line = Map::new();
    line.insert("level".into(), json!(level.as_str().to_ascii_lowercase()));
    line.insert("event".into(), json!(event));
    if let Value::Object(extra) = fields {
        line.extend(extra);
    }
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{}", Value::Object(line));
}
