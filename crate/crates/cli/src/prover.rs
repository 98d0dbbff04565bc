//! A prover running as a separate process, spoken to over stdio.
//!
//! The verifier writes `PASS <k> EVENT <i> REQUEST` and waits for one line,
//! `SELECT` or `SKIP`. Every quantum outcome is written as `OUTCOME <label>`
//! with no reply expected.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use qam_core::machine::{ProverRequest, ProverStrategy};
use qam_core::{Choice, Error, OutcomeLabel};

pub struct ExternalProver {
    child: Child,
    stdin: Option<BufWriter<ChildStdin>>,
    replies: Receiver<std::io::Result<String>>,
    timeout: Duration,
}

impl ExternalProver {
    /// Runs `command` through `sh -c`.
    pub fn spawn(command: &str, timeout: Duration) -> Result<Self, Error> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| Error::Protocol(format!("cannot start prover {command:?}: {e}")))?;
        let stdin = child.stdin.take().map(BufWriter::new);
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, replies) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(ExternalProver { child, stdin, replies, timeout })
    }

    fn send(&mut self, line: &str, flush: bool) -> std::io::Result<()> {
        let Some(w) = self.stdin.as_mut() else {
            return Err(std::io::ErrorKind::BrokenPipe.into());
        };
        writeln!(w, "{line}")?;
        if flush {
            w.flush()?;
        }
        Ok(())
    }
}

impl ProverStrategy for ExternalProver {
    fn respond(&mut self, request: &ProverRequest<'_>) -> Result<Choice, Error> {
        let line = format!("PASS {} EVENT {} REQUEST", request.pass, request.event);
        self.send(&line, true)
            .map_err(|e| Error::Protocol(format!("cannot write to prover: {e}")))?;
        match self.replies.recv_timeout(self.timeout) {
            Ok(Ok(reply)) => match reply.trim() {
                "SELECT" => Ok(Choice::Select),
                "SKIP" => Ok(Choice::Skip),
                other => Err(Error::Protocol(format!(
                    "prover answered {other:?} to {line:?}; expected SELECT or SKIP"
                ))),
            },
            Ok(Err(e)) => Err(Error::Protocol(format!("cannot read from prover: {e}"))),
            Err(RecvTimeoutError::Timeout) => Err(Error::Protocol(format!(
                "prover did not answer {line:?} within {} ms",
                self.timeout.as_millis()
            ))),
            Err(RecvTimeoutError::Disconnected) => {
                Err(Error::Protocol(format!("prover exited before answering {line:?}")))
            }
        }
    }

    fn observe(&mut self, _pass: u64, label: OutcomeLabel) -> Result<(), Error> {
        // A prover that stopped reading only fails once it is asked something.
        let _ = self.send(&format!("OUTCOME {}", label.wire_name()), false);
        Ok(())
    }
}

impl Drop for ExternalProver {
    fn drop(&mut self) {
        if let Some(mut w) = self.stdin.take() {
            let _ = w.flush();
        }
        if !matches!(self.child.try_wait(), Ok(Some(_))) {
            let _ = self.child.kill();
        }
        let _ = self.child.wait();
    }
}
