//! Text-mode SMS over AT commands.
//!
//! The client talks to any [`ByteChannel`]. Commands are written one frame
//! at a time and each waits for its final response (or timeout) before the
//! next is written. [`FakeModem`] is a scriptable channel for tests.

mod fake;

pub use fake::{FakeModem, Fault, FaultTarget};

use std::fmt;

use thiserror::Error;

use crate::config::is_phone_number;
use crate::types::SMS_MAX_CHARS;

pub const DEFAULT_TIMEOUT_MS: u64 = 1000;
/// Retries after the first attempt, for init commands only.
pub const INIT_RETRIES: u32 = 2;
pub const INIT_SEQUENCE: [&str; 3] = ["AT", "ATE0", "AT+CMGF=1"];

/// Ctrl-Z, terminates an SMS body.
pub const CTRL_Z: u8 = 0x1a;

// Lines read while waiting for one final response before giving up.
const MAX_RESPONSE_LINES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ChannelError {
    #[error("read timed out")]
    Timeout,
    #[error("channel closed")]
    Closed,
}

/// Full-duplex byte link to a modem.
pub trait ByteChannel {
    fn write(&mut self, bytes: &[u8]) -> Result<(), ChannelError>;

    /// Bytes up to and including the first occurrence of `pattern`. On
    /// timeout nothing is consumed.
    fn read_until(&mut self, pattern: &[u8], timeout_ms: u64) -> Result<Vec<u8>, ChannelError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModemPhase {
    Uninitialized,
    Ready,
    Busy,
    Failed,
}

impl fmt::Display for ModemPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModemState {
    pub phase: ModemPhase,
    pub last_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModemError {
    #[error("no response to {command}")]
    Timeout { command: String },
    #[error("{command} answered ERROR")]
    ErrorResponse { command: String },
    #[error("channel closed")]
    ChannelClosed,
    #[error("no `>` prompt after AT+CMGS")]
    PromptTimeout,
    #[error("message rejected: {0}")]
    SendRejected(String),
    #[error("invalid phone number `{0}`")]
    InvalidNumber(String),
    #[error("invalid message body: {0}")]
    InvalidBody(&'static str),
    #[error("modem not ready ({0})")]
    NotReady(ModemPhase),
}

/// Reference number the network assigned to a sent message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MessageRef(pub u32);

enum Final {
    Ok,
    Error,
}

/// An AT-command SMS client bound to one channel.
pub struct SmsModem<C> {
    channel: C,
    state: ModemState,
    timeout_ms: u64,
}

impl<C: ByteChannel> SmsModem<C> {
    pub fn new(channel: C) -> Self {
        Self::with_timeout(channel, DEFAULT_TIMEOUT_MS)
    }

    pub fn with_timeout(channel: C, timeout_ms: u64) -> Self {
        SmsModem {
            channel,
            state: ModemState {
                phase: ModemPhase::Uninitialized,
                last_error: None,
            },
            timeout_ms,
        }
    }

    pub fn state(&self) -> &ModemState {
        &self.state
    }

    pub fn is_ready(&self) -> bool {
        self.state.phase == ModemPhase::Ready
    }

    pub fn channel(&self) -> &C {
        &self.channel
    }

    pub fn channel_mut(&mut self) -> &mut C {
        &mut self.channel
    }

    pub fn into_inner(self) -> C {
        self.channel
    }

    /// `AT`, `ATE0`, `AT+CMGF=1`, each retried on timeout. An `ERROR` reply
    /// is final.
    pub fn init(&mut self) -> Result<(), ModemError> {
        self.state.phase = ModemPhase::Busy;
        for command in INIT_SEQUENCE {
            if let Err(e) = self.init_command(command) {
                return Err(self.fail(e));
            }
        }
        self.state = ModemState {
            phase: ModemPhase::Ready,
            last_error: None,
        };
        Ok(())
    }

    fn init_command(&mut self, command: &str) -> Result<(), ModemError> {
        let frame = format!("{command}\r");
        for _ in 0..=INIT_RETRIES {
            self.channel.write(frame.as_bytes()).map_err(|_| ModemError::ChannelClosed)?;
            match self.await_final() {
                Ok(Final::Ok) => return Ok(()),
                Ok(Final::Error) => {
                    return Err(ModemError::ErrorResponse {
                        command: command.to_string(),
                    })
                }
                Err(ChannelError::Timeout) => continue,
                Err(ChannelError::Closed) => return Err(ModemError::ChannelClosed),
            }
        }
        Err(ModemError::Timeout {
            command: command.to_string(),
        })
    }

    /// Send one single-part text message. The body must already fit in
    /// 160 characters.
    pub fn send_sms(&mut self, to: &str, body: &str) -> Result<MessageRef, ModemError> {
        if self.state.phase != ModemPhase::Ready {
            return Err(ModemError::NotReady(self.state.phase));
        }
        if !is_phone_number(to) {
            return Err(self.fail(ModemError::InvalidNumber(to.to_string())));
        }
        if body.chars().count() > SMS_MAX_CHARS {
            return Err(self.fail(ModemError::InvalidBody("longer than 160 characters")));
        }
        if body.bytes().any(|b| b == CTRL_Z || b == 0x1b) {
            return Err(self.fail(ModemError::InvalidBody("contains Ctrl-Z or ESC")));
        }

        self.state.phase = ModemPhase::Busy;
        match self.send_inner(to, body) {
            Ok(r) => {
                self.state.phase = ModemPhase::Ready;
                Ok(r)
            }
            Err(e) => Err(self.fail(e)),
        }
    }

    fn send_inner(&mut self, to: &str, body: &str) -> Result<MessageRef, ModemError> {
        let command = format!("AT+CMGS=\"{to}\"\r");
        self.channel.write(command.as_bytes()).map_err(|_| ModemError::ChannelClosed)?;
        match self.channel.read_until(b">", self.timeout_ms) {
            Ok(_) => {}
            Err(ChannelError::Timeout) => return Err(ModemError::PromptTimeout),
            Err(ChannelError::Closed) => return Err(ModemError::ChannelClosed),
        }

        let mut frame = Vec::with_capacity(body.len() + 1);
        frame.extend_from_slice(body.as_bytes());
        frame.push(CTRL_Z);
        self.channel.write(&frame).map_err(|_| ModemError::ChannelClosed)?;

        let mut reference = None;
        for _ in 0..MAX_RESPONSE_LINES {
            let line = match self.read_line() {
                Ok(l) => l,
                Err(ChannelError::Timeout) => {
                    return Err(ModemError::Timeout {
                        command: "AT+CMGS".to_string(),
                    })
                }
                Err(ChannelError::Closed) => return Err(ModemError::ChannelClosed),
            };
            if let Some(rest) = line.strip_prefix("+CMGS:") {
                reference = rest.trim().parse::<u32>().ok().map(MessageRef);
                if reference.is_none() {
                    return Err(ModemError::SendRejected(format!("bad reference `{}`", rest.trim())));
                }
            } else if line == "OK" {
                return reference.ok_or_else(|| ModemError::SendRejected("OK without +CMGS reference".into()));
            } else if is_error_line(&line) {
                return Err(ModemError::SendRejected(line));
            }
        }
        Err(ModemError::Timeout {
            command: "AT+CMGS".to_string(),
        })
    }

    fn await_final(&mut self) -> Result<Final, ChannelError> {
        for _ in 0..MAX_RESPONSE_LINES {
            let line = self.read_line()?;
            if line == "OK" {
                return Ok(Final::Ok);
            }
            if is_error_line(&line) {
                return Ok(Final::Error);
            }
        }
        Err(ChannelError::Timeout)
    }

    fn read_line(&mut self) -> Result<String, ChannelError> {
        let raw = self.channel.read_until(b"\r\n", self.timeout_ms)?;
        Ok(String::from_utf8_lossy(&raw).trim().to_string())
    }

    /// Record the failure and drop any complete lines still buffered so the
    /// next command starts on a line boundary.
    fn fail(&mut self, e: ModemError) -> ModemError {
        for _ in 0..MAX_RESPONSE_LINES {
            if self.channel.read_until(b"\r\n", 0).is_err() {
                break;
            }
        }
        self.state = ModemState {
            phase: ModemPhase::Failed,
            last_error: Some(e.to_string()),
        };
        e
    }
}

fn is_error_line(line: &str) -> bool {
    line == "ERROR" || line.starts_with("+CMS ERROR") || line.starts_with("+CME ERROR")
}
