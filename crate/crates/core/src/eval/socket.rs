//! TCP worker transport.
//!
//! Every message is a 4-byte big-endian length followed by that many bytes
//! of JSON. The client sends `setup` once per training set and then any
//! number of `eval` requests; the server answers `setup` with `ready` and
//! each `eval` with `result` or `error`.
//!
//! ```text
//! -> {"type":"setup","scenarios":[{..}, ..]}
//! <- {"type":"ready"}
//! -> {"type":"eval","job":7,"genome":{..genome file..},"scenarios":[0,1,2]}
//! <- {"type":"result","job":7,"fitness":2871.5}
//! ```

use super::pool::{InProcessWorker, Worker, WorkerError};
use crate::neat::{Genome, GenomeFile};
use crate::scenario::{Scenario, TrainingSet};
use serde::{Deserialize, Serialize};
use std::io::{self, Read, Write};
use std::net::{TcpListener, TcpStream, ToSocketAddrs};

pub const MAX_FRAME_BYTES: u32 = 64 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Request {
    Setup {
        scenarios: Vec<Scenario>,
    },
    Eval {
        job: u64,
        genome: GenomeFile,
        scenarios: Vec<usize>,
    },
    Shutdown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Response {
    Ready,
    Result { job: u64, fitness: f64 },
    Error { job: Option<u64>, message: String },
}

pub fn write_frame<W: Write, T: Serialize>(w: &mut W, msg: &T) -> io::Result<()> {
    let body = serde_json::to_vec(msg).map_err(io::Error::other)?;
    let len = u32::try_from(body.len())
        .ok()
        .filter(|&n| n <= MAX_FRAME_BYTES)
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "frame too large"))?;
    w.write_all(&len.to_be_bytes())?;
    w.write_all(&body)?;
    w.flush()
}

pub fn read_frame<R: Read, T: for<'de> Deserialize<'de>>(r: &mut R) -> io::Result<T> {
    let mut len = [0u8; 4];
    r.read_exact(&mut len)?;
    let len = u32::from_be_bytes(len);
    if len > MAX_FRAME_BYTES {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            "frame too large",
        ));
    }
    let mut body = vec![0u8; len as usize];
    r.read_exact(&mut body)?;
    serde_json::from_slice(&body).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
}

/// Client side of one worker connection.
pub struct SocketWorker {
    stream: TcpStream,
    next_job: u64,
}

impl SocketWorker {
    pub fn connect<A: ToSocketAddrs>(addr: A) -> io::Result<Self> {
        let stream = TcpStream::connect(addr)?;
        stream.set_nodelay(true)?;
        Ok(SocketWorker {
            stream,
            next_job: 0,
        })
    }

    fn round_trip(&mut self, req: &Request) -> Result<Response, WorkerError> {
        write_frame(&mut self.stream, req).map_err(|e| WorkerError::Lost(e.to_string()))?;
        read_frame(&mut self.stream).map_err(|e| WorkerError::Lost(e.to_string()))
    }
}

impl Worker for SocketWorker {
    fn setup(&mut self, set: &TrainingSet) -> Result<(), WorkerError> {
        match self.round_trip(&Request::Setup {
            scenarios: set.scenarios().to_vec(),
        })? {
            Response::Ready => Ok(()),
            Response::Error { message, .. } => Err(WorkerError::Lost(message)),
            other => Err(WorkerError::Lost(format!("unexpected reply {other:?}"))),
        }
    }

    fn evaluate(&mut self, genome: &Genome, scenarios: &[usize]) -> Result<f64, WorkerError> {
        let job = self.next_job;
        self.next_job += 1;
        let reply = self.round_trip(&Request::Eval {
            job,
            genome: GenomeFile::new(genome, "", 0),
            scenarios: scenarios.to_vec(),
        })?;
        match reply {
            Response::Result { job: j, fitness } if j == job => Ok(fitness),
            Response::Error { message, .. } => Err(WorkerError::Job(message)),
            other => Err(WorkerError::Lost(format!("unexpected reply {other:?}"))),
        }
    }
}

impl Drop for SocketWorker {
    fn drop(&mut self) {
        let _ = write_frame(&mut self.stream, &Request::Shutdown);
    }
}

/// Answers requests on one connection until the peer hangs up or sends
/// `shutdown`.
pub fn serve_connection(mut stream: TcpStream) -> io::Result<()> {
    let mut worker = InProcessWorker::default();
    loop {
        let req: Request = match read_frame(&mut stream) {
            Ok(r) => r,
            Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Ok(()),
            Err(e) => return Err(e),
        };
        let reply = match req {
            Request::Shutdown => return Ok(()),
            Request::Setup { scenarios } => match TrainingSet::new(scenarios) {
                Ok(set) => {
                    worker.setup(&set).expect("in-process setup");
                    Response::Ready
                }
                Err(e) => Response::Error {
                    job: None,
                    message: e.to_string(),
                },
            },
            Request::Eval {
                job,
                genome,
                scenarios,
            } => {
                let outcome = genome
                    .into_genome()
                    .map_err(|e| e.to_string())
                    .and_then(|g| worker.evaluate(&g, &scenarios).map_err(|e| e.to_string()));
                match outcome {
                    Ok(fitness) => Response::Result { job, fitness },
                    Err(message) => Response::Error {
                        job: Some(job),
                        message,
                    },
                }
            }
        };
        write_frame(&mut stream, &reply)?;
    }
}

/// Accepts connections and serves each on its own thread. Stops after
/// `max_connections` connections have been accepted and served, if given.
pub fn serve(listener: TcpListener, max_connections: Option<usize>) -> io::Result<()> {
    let mut handles = Vec::new();
    for (n, stream) in listener.incoming().enumerate() {
        let stream = stream?;
        let peer = stream.peer_addr().ok();
        log::info!("worker connection from {peer:?}");
        handles.push(std::thread::spawn(move || {
            if let Err(e) = serve_connection(stream) {
                log::warn!("connection {peer:?} ended: {e}");
            }
        }));
        if max_connections.is_some_and(|m| n + 1 >= m) {
            break;
        }
    }
    for h in handles {
        let _ = h.join();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frames_round_trip() {
        let mut buf = Vec::new();
        let msg = Response::Result {
            job: 3,
            fitness: 0.1 + 0.2,
        };
        write_frame(&mut buf, &msg).unwrap();
        assert_eq!(&buf[..4], &((buf.len() - 4) as u32).to_be_bytes());
        let back: Response = read_frame(&mut &buf[..]).unwrap();
        assert_eq!(back, msg);
    }

    #[test]
    fn oversized_frame_rejected() {
        let buf = (MAX_FRAME_BYTES + 1).to_be_bytes();
        assert!(read_frame::<_, Response>(&mut &buf[..]).is_err());
    }
}
