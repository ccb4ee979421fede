use std::io::{BufRead, Write};
use std::sync::mpsc;
use std::sync::Arc;
use std::thread;

use xuml_core::ingest::FusedModel;
use xuml_core::runtime::SessionOptions;

use crate::executor::Executor;
use crate::ServeError;

/// Newline-delimited mode: requests on `input`, frames on `output`.
/// Returns once `input` ends and every request has been answered.
pub fn serve_lines<R, W>(
    fused: Arc<FusedModel>,
    options: SessionOptions,
    input: R,
    mut output: W,
) -> Result<(), ServeError>
where
    R: BufRead + Send + 'static,
    W: Write,
{
    let (req_tx, req_rx) = mpsc::channel();
    let (out_tx, out_rx) = mpsc::channel();
    let executor = Executor::new(fused, options, req_rx, out_tx).spawn();
    let reader = thread::Builder::new().name("stepd-stdin".into()).spawn(move || {
        for line in input.lines() {
            match line {
                Ok(line) => {
                    if req_tx.send(line).is_err() {
                        break;
                    }
                }
                Err(e) => {
                    log::warn!("reading requests: {e}");
                    break;
                }
            }
        }
    })?;
    for frame in out_rx {
        output.write_all(frame.as_bytes())?;
        output.write_all(b"\n")?;
        output.flush()?;
    }
    executor.join().map_err(|_| ServeError::ExecutorPanicked)?;
    // The reader may still be blocked on an open input; it ends with the process.
    drop(reader);
    Ok(())
}

pub fn serve_stdio(fused: Arc<FusedModel>, options: SessionOptions) -> Result<(), ServeError> {
    let stdin = std::io::BufReader::new(std::io::stdin());
    serve_lines(fused, options, stdin, std::io::stdout().lock())
}
