//! Reliable in-order message transports. Both implementations move the
//! same framed bytes, so the session layer cannot tell them apart.

use std::io::{BufReader, BufWriter, Write};
use std::net::{Shutdown, TcpStream, ToSocketAddrs};
use std::sync::mpsc::{channel, Receiver, Sender};

use qfactory_core::protocol::Message;

use crate::wire::{decode, encode, read_frame, write_frame, WireError};

pub trait Transport {
    fn send(&mut self, msg: &Message) -> Result<(), WireError>;
    fn receive(&mut self) -> Result<Message, WireError>;
    fn close(&mut self);
}

/// One end of an in-process byte pipe.
pub struct ChannelTransport {
    tx: Option<Sender<Vec<u8>>>,
    rx: Receiver<Vec<u8>>,
    pending: Vec<u8>,
}

/// Two connected ends.
pub fn channel_pair() -> (ChannelTransport, ChannelTransport) {
    let (tx_a, rx_b) = channel();
    let (tx_b, rx_a) = channel();
    let end = |tx, rx| ChannelTransport {
        tx: Some(tx),
        rx,
        pending: Vec::new(),
    };
    (end(tx_a, rx_a), end(tx_b, rx_b))
}

impl ChannelTransport {
    /// Pushes raw bytes, framed or not.
    pub fn send_raw(&mut self, bytes: &[u8]) -> Result<(), WireError> {
        let tx = self.tx.as_ref().ok_or(WireError::Closed)?;
        tx.send(bytes.to_vec()).map_err(|_| WireError::Closed)
    }

    fn fill(&mut self) -> bool {
        match self.rx.recv() {
            Ok(chunk) => {
                self.pending.extend_from_slice(&chunk);
                true
            }
            Err(_) => false,
        }
    }
}

impl std::io::Read for ChannelTransport {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        if self.pending.is_empty() && !self.fill() {
            return Ok(0);
        }
        let n = buf.len().min(self.pending.len());
        buf[..n].copy_from_slice(&self.pending[..n]);
        self.pending.drain(..n);
        Ok(n)
    }
}

impl Transport for ChannelTransport {
    fn send(&mut self, msg: &Message) -> Result<(), WireError> {
        let mut frame = Vec::new();
        write_frame(&mut frame, &encode(msg))?;
        self.send_raw(&frame)
    }

    fn receive(&mut self) -> Result<Message, WireError> {
        let body = read_frame(self)?;
        decode(&body)
    }

    fn close(&mut self) {
        self.tx = None;
    }
}

pub struct TcpTransport {
    reader: BufReader<TcpStream>,
    writer: BufWriter<TcpStream>,
}

impl TcpTransport {
    pub fn connect<A: ToSocketAddrs>(addr: A) -> Result<Self, WireError> {
        Self::from_stream(TcpStream::connect(addr)?)
    }

    pub fn from_stream(stream: TcpStream) -> Result<Self, WireError> {
        stream.set_nodelay(true)?;
        Ok(Self {
            reader: BufReader::new(stream.try_clone()?),
            writer: BufWriter::new(stream),
        })
    }

    /// Pushes raw bytes, framed or not.
    pub fn send_raw(&mut self, bytes: &[u8]) -> Result<(), WireError> {
        self.writer.write_all(bytes)?;
        self.writer.flush()?;
        Ok(())
    }

    /// Closes the sending half only.
    pub fn shutdown_write(&mut self) -> Result<(), WireError> {
        self.writer.flush()?;
        self.writer.get_ref().shutdown(Shutdown::Write)?;
        Ok(())
    }
}

impl Transport for TcpTransport {
    fn send(&mut self, msg: &Message) -> Result<(), WireError> {
        write_frame(&mut self.writer, &encode(msg))
    }

    fn receive(&mut self) -> Result<Message, WireError> {
        let body = read_frame(&mut self.reader)?;
        decode(&body)
    }

    fn close(&mut self) {
        let _ = self.writer.flush();
        let _ = self.writer.get_ref().shutdown(Shutdown::Both);
    }
}

/// Wraps a transport and keeps a copy of every encoded message body.
pub struct Recording<T> {
    inner: T,
    pub sent: Vec<Vec<u8>>,
    pub received: Vec<Vec<u8>>,
}

impl<T> Recording<T> {
    pub fn new(inner: T) -> Self {
        Self {
            inner,
            sent: Vec::new(),
            received: Vec::new(),
        }
    }

    pub fn into_inner(self) -> T {
        self.inner
    }
}

impl<T: Transport> Transport for Recording<T> {
    fn send(&mut self, msg: &Message) -> Result<(), WireError> {
        self.sent.push(encode(msg));
        self.inner.send(msg)
    }

    fn receive(&mut self) -> Result<Message, WireError> {
        let msg = self.inner.receive()?;
        self.received.push(encode(&msg));
        Ok(msg)
    }

    fn close(&mut self) {
        self.inner.close();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qfactory_core::protocol::Outcome;
    use std::net::TcpListener;

    #[test]
    fn channel_delivers_in_order() {
        let (mut a, mut b) = channel_pair();
        a.send(&Message::Result(Outcome::Ok)).unwrap();
        a.send(&Message::MeasureInstruction { alphas: vec![1, 2] })
            .unwrap();
        assert_eq!(b.receive().unwrap(), Message::Result(Outcome::Ok));
        assert_eq!(
            b.receive().unwrap(),
            Message::MeasureInstruction { alphas: vec![1, 2] }
        );
        a.close();
        assert!(matches!(b.receive(), Err(WireError::Closed)));
    }

    #[test]
    fn channel_split_frame_reassembles() {
        let (mut a, mut b) = channel_pair();
        a.send_raw(&[0, 0]).unwrap();
        a.send_raw(&[0, 2, 6]).unwrap();
        a.send_raw(&[0]).unwrap();
        assert_eq!(b.receive().unwrap(), Message::Result(Outcome::Ok));
    }

    #[test]
    fn tcp_round_trip() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let handle = std::thread::spawn(move || {
            let (stream, _) = listener.accept().unwrap();
            let mut t = TcpTransport::from_stream(stream).unwrap();
            let msg = t.receive().unwrap();
            t.send(&msg).unwrap();
        });
        let mut t = TcpTransport::connect(addr).unwrap();
        let msg = Message::MeasureInstruction {
            alphas: vec![7; 1000],
        };
        t.send(&msg).unwrap();
        assert_eq!(t.receive().unwrap(), msg);
        handle.join().unwrap();
    }
}
