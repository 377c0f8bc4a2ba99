use std::collections::VecDeque;

use super::{ByteChannel, ChannelError, CTRL_Z};

/// Which client frame a scripted fault applies to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FaultTarget {
    /// A command frame, matched by exact text (`"AT"`) or by name before
    /// `=` (`"AT+CMGS"` matches `AT+CMGS="..."`).
    Command(&'static str),
    /// The message body terminated by Ctrl-Z.
    Body,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fault {
    /// Answer `ERROR`.
    Error,
    /// Answer nothing.
    Silent,
    /// Close the channel after receiving the frame.
    Close,
    /// Answer with these exact bytes.
    Reply(Vec<u8>),
}

#[derive(Debug, Clone)]
struct Rule {
    target: FaultTarget,
    fault: Fault,
    remaining: Option<u32>,
}

/// In-memory modem with a virtual clock.
///
/// By default it answers every command with `OK`, prompts for `AT+CMGS`,
/// and acknowledges bodies with message references counting up from 1.
/// Faults override that behaviour for matching frames. Every frame the
/// client writes is kept in [`FakeModem::transcript`].
#[derive(Debug, Clone)]
pub struct FakeModem {
    frames: Vec<Vec<u8>>,
    inbox: VecDeque<u8>,
    rules: Vec<Rule>,
    responsive: bool,
    awaiting_body: bool,
    closed: bool,
    next_ref: u32,
    clock_ms: u64,
}

impl FakeModem {
    pub fn compliant() -> Self {
        FakeModem {
            frames: Vec::new(),
            inbox: VecDeque::new(),
            rules: Vec::new(),
            responsive: true,
            awaiting_body: false,
            closed: false,
            next_ref: 1,
            clock_ms: 0,
        }
    }

    /// Never answers anything.
    pub fn silent() -> Self {
        FakeModem {
            responsive: false,
            ..Self::compliant()
        }
    }

    /// Apply `fault` to every matching frame.
    pub fn with_fault(mut self, target: FaultTarget, fault: Fault) -> Self {
        self.rules.push(Rule {
            target,
            fault,
            remaining: None,
        });
        self
    }

    /// Apply `fault` to the next `times` matching frames only.
    pub fn with_fault_times(mut self, target: FaultTarget, fault: Fault, times: u32) -> Self {
        self.rules.push(Rule {
            target,
            fault,
            remaining: Some(times),
        });
        self
    }

    pub fn clear_faults(&mut self) {
        self.rules.clear();
    }

    pub fn transcript(&self) -> &[Vec<u8>] {
        &self.frames
    }

    /// Virtual milliseconds spent waiting in reads that timed out.
    pub fn clock_ms(&self) -> u64 {
        self.clock_ms
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Number of message bodies acknowledged so far.
    pub fn messages_accepted(&self) -> u32 {
        self.next_ref - 1
    }

    fn take_fault(&mut self, is_body: bool, text: &str) -> Option<Fault> {
        let rule = self.rules.iter_mut().find(|r| {
            let matches = match r.target {
                FaultTarget::Body => is_body,
                FaultTarget::Command(name) => {
                    !is_body && (text == name || text.strip_prefix(name).is_some_and(|rest| rest.starts_with('=')))
                }
            };
            matches && r.remaining != Some(0)
        })?;
        if let Some(n) = rule.remaining.as_mut() {
            *n -= 1;
        }
        Some(rule.fault.clone())
    }

    fn respond(&mut self, frame: &[u8]) {
        let is_body = self.awaiting_body && frame.last() == Some(&CTRL_Z);
        self.awaiting_body = false;
        let text = String::from_utf8_lossy(frame);
        let text = text.trim_end_matches('\r');

        if let Some(fault) = self.take_fault(is_body, text) {
            match fault {
                Fault::Error => self.inbox.extend(b"\r\nERROR\r\n"),
                Fault::Silent => {}
                Fault::Close => {
                    self.closed = true;
                    self.inbox.clear();
                }
                Fault::Reply(bytes) => self.inbox.extend(bytes),
            }
            return;
        }
        if !self.responsive {
            return;
        }
        if is_body {
            let reply = format!("\r\n+CMGS: {}\r\n\r\nOK\r\n", self.next_ref);
            self.next_ref += 1;
            self.inbox.extend(reply.as_bytes());
        } else if text.starts_with("AT+CMGS=") {
            self.awaiting_body = true;
            self.inbox.extend(b"\r\n> ");
        } else {
            self.inbox.extend(b"\r\nOK\r\n");
        }
    }
}

impl ByteChannel for FakeModem {
    fn write(&mut self, bytes: &[u8]) -> Result<(), ChannelError> {
        if self.closed {
            return Err(ChannelError::Closed);
        }
        self.frames.push(bytes.to_vec());
        self.respond(bytes);
        Ok(())
    }

    fn read_until(&mut self, pattern: &[u8], timeout_ms: u64) -> Result<Vec<u8>, ChannelError> {
        if pattern.is_empty() {
            return Ok(Vec::new());
        }
        let buf = self.inbox.make_contiguous();
        if let Some(pos) = buf.windows(pattern.len()).position(|w| w == pattern) {
            return Ok(self.inbox.drain(..pos + pattern.len()).collect());
        }
        if self.closed {
            return Err(ChannelError::Closed);
        }
        self.clock_ms += timeout_ms;
        Err(ChannelError::Timeout)
    }
}
