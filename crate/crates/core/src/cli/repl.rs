// Copyright 2026 The splitauth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Interactive register/login/logout client.

use std::io::{self, BufRead, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::time::Duration;

use rand::RngCore;
use thiserror::Error;

use crate::harness::{SimCluster, SimConnection, SimError, Transcript};
use crate::protocol::{
    decode_frame, encode_frame, read_message, write_message, ClientEvent, ClientSession, Direction,
    Message, ReadError,
};

pub const BANNER: &str = "Welcome to the system. Kindly register to login.";
pub const OPTIONS_LOGGED_OUT: &str = "Options: register/login/logout";
pub const OPTIONS_LOGGED_IN: &str = "Options: logout";

#[derive(Debug, Error)]
pub enum ExchangeError {
    #[error(transparent)]
    Transport(#[from] ReadError),
    #[error("gateway closed the connection")]
    Closed,
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("expected one reply, got {0}")]
    ReplyCount(usize),
}

/// One request, one reply.
pub trait Exchange {
    fn exchange(&mut self, message: &Message) -> Result<Message, ExchangeError>;
}

/// Gateway connection over TCP. Records every frame it moves.
pub struct TcpExchange {
    stream: TcpStream,
    transcript: Transcript,
}

impl TcpExchange {
    pub fn connect(addr: &str, timeout: Duration) -> io::Result<Self> {
        let mut last = io::Error::new(io::ErrorKind::NotFound, "address resolved to nothing");
        for candidate in addr.to_socket_addrs()? {
            match TcpStream::connect_timeout(&candidate, timeout) {
                Ok(stream) => {
                    stream.set_nodelay(true)?;
                    return Ok(Self {
                        stream,
                        transcript: Transcript::default(),
                    });
                }
                Err(e) => last = e,
            }
        }
        Err(last)
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }
}

impl Exchange for TcpExchange {
    fn exchange(&mut self, message: &Message) -> Result<Message, ExchangeError> {
        let sent = write_message(&mut self.stream, message)?;
        self.transcript.push(Direction::ToServer, sent);
        let reply = read_message(&mut self.stream)?.ok_or(ExchangeError::Closed)?;
        let frame = encode_frame(&reply).map_err(ReadError::from)?;
        self.transcript.push(Direction::ToClient, frame);
        Ok(reply)
    }
}

/// Talks to a simulated gateway over one connection. Records frames like
/// [`TcpExchange`].
pub struct SimExchange<'a> {
    cluster: &'a mut SimCluster,
    conn: SimConnection,
    transcript: Transcript,
}

impl<'a> SimExchange<'a> {
    pub fn new(cluster: &'a mut SimCluster) -> Self {
        let conn = cluster.connect();
        Self {
            cluster,
            conn,
            transcript: Transcript::default(),
        }
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }
}

impl Exchange for SimExchange<'_> {
    fn exchange(&mut self, message: &Message) -> Result<Message, ExchangeError> {
        let frame = encode_frame(message).map_err(SimError::from)?;
        let mut replies = self.cluster.send_frame(&mut self.conn, &frame)?;
        self.transcript.push(Direction::ToServer, frame);
        if replies.len() != 1 {
            return Err(ExchangeError::ReplyCount(replies.len()));
        }
        let reply = replies.remove(0);
        let message = decode_frame(&reply)
            .map_err(SimError::from)?
            .ok_or(ExchangeError::Closed)?
            .0;
        self.transcript.push(Direction::ToClient, reply);
        Ok(message)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ReplOptions {
    /// Write each input line back to the output, so a piped session reads
    /// like a terminal one.
    pub echo_input: bool,
}

enum State {
    LoggedOut,
    LoggedIn(ClientSession),
}

struct Io<'a, R, W> {
    input: R,
    output: &'a mut W,
    echo: bool,
}

impl<R: BufRead, W: Write> Io<'_, R, W> {
    fn say(&mut self, line: &str) -> io::Result<()> {
        writeln!(self.output, "{line}")?;
        self.output.flush()
    }

    /// Prints `prompt` and reads one line; `None` at end of input.
    fn ask(&mut self, prompt: &str) -> io::Result<Option<String>> {
        write!(self.output, "{prompt}")?;
        self.output.flush()?;
        let mut line = String::new();
        if self.input.read_line(&mut line)? == 0 {
            if self.echo {
                writeln!(self.output)?;
            }
            return Ok(None);
        }
        let line = line.trim_end_matches(['\n', '\r']).to_owned();
        if self.echo {
            writeln!(self.output, "{line}")?;
        }
        Ok(Some(line))
    }
}

/// Runs the session until end of input. Returns the process exit code: 0 on
/// a normal end, 1 when the gateway became unreachable.
pub fn repl<R, W, X, G>(
    input: R,
    output: &mut W,
    link: &mut X,
    rng: &mut G,
    options: ReplOptions,
) -> io::Result<i32>
where
    R: BufRead,
    W: Write,
    X: Exchange + ?Sized,
    G: RngCore + ?Sized,
{
    let mut io = Io {
        input,
        output,
        echo: options.echo_input,
    };
    io.say(BANNER)?;
    io.say(OPTIONS_LOGGED_OUT)?;
    let mut state = State::LoggedOut;

    loop {
        let prompt = match &state {
            State::LoggedOut => "> ".to_owned(),
            State::LoggedIn(session) => format!("{} > ", session.username()),
        };
        let Some(command) = io.ask(&prompt)? else {
            return Ok(0);
        };
        let outcome = match (&state, command.trim()) {
            (State::LoggedOut, "register") => register(&mut io, link),
            (State::LoggedOut, "login") => match login(&mut io, link, rng) {
                Ok(Some(session)) => {
                    state = State::LoggedIn(session);
                    Ok(())
                }
                other => other.map(|_| ()),
            },
            (State::LoggedIn(session), "logout") => {
                io.say("Logging out...")?;
                let result = session
                    .logout()
                    .map_err(|_| Failure::Unavailable)
                    .and_then(|msg| link.exchange(&msg).map_err(Failure::from));
                state = State::LoggedOut;
                result.map(|_| ())
            }
            (State::LoggedOut, _) => io.say(OPTIONS_LOGGED_OUT).map_err(Failure::Io),
            (State::LoggedIn(_), _) => io.say(OPTIONS_LOGGED_IN).map_err(Failure::Io),
        };
        match outcome {
            Ok(()) => {}
            Err(Failure::Io(e)) => return Err(e),
            Err(Failure::Unavailable) => {
                io.say("Service unavailable")?;
                return Ok(1);
            }
            Err(Failure::EndOfInput) => return Ok(0),
        }
    }
}

enum Failure {
    Io(io::Error),
    Unavailable,
    EndOfInput,
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<ExchangeError> for Failure {
    fn from(e: ExchangeError) -> Self {
        log::debug!("gateway exchange failed: {e}");
        Failure::Unavailable
    }
}

fn credentials<R: BufRead, W: Write>(
    io: &mut Io<'_, R, W>,
    user_prompt: &str,
    pass_prompt: &str,
) -> Result<(String, String), Failure> {
    let username = io.ask(user_prompt)?.ok_or(Failure::EndOfInput)?;
    let password = io.ask(pass_prompt)?.ok_or(Failure::EndOfInput)?;
    Ok((username, password))
}

fn register<R, W, X>(io: &mut Io<'_, R, W>, link: &mut X) -> Result<(), Failure>
where
    R: BufRead,
    W: Write,
    X: Exchange + ?Sized,
{
    let (username, password) = credentials(io, "New username: ", "New password: ")?;
    io.say("Creating account...")?;
    let Ok((mut session, request)) = ClientSession::start_register(&username, &password) else {
        io.say("Invalid username or password")?;
        return Ok(());
    };
    let reply = link.exchange(&request)?;
    let line = match session.on_message(reply) {
        Ok(step) => match step.event {
            Some(ClientEvent::Registered) => "Account has been created",
            Some(ClientEvent::Rejected { reason })
                if reason == crate::protocol::gateway::REASON_DUPLICATE =>
            {
                "Username already exists"
            }
            _ => "Registration failed",
        },
        Err(_) => "Registration failed",
    };
    io.say(line)?;
    Ok(())
}

fn login<R, W, X, G>(
    io: &mut Io<'_, R, W>,
    link: &mut X,
    rng: &mut G,
) -> Result<Option<ClientSession>, Failure>
where
    R: BufRead,
    W: Write,
    X: Exchange + ?Sized,
    G: RngCore + ?Sized,
{
    let (username, password) = credentials(io, "Username: ", "Password: ")?;
    let Ok((mut session, request)) = ClientSession::start_login(&username, &password, rng) else {
        io.say("Invalid username or password")?;
        return Ok(None);
    };
    let mut outgoing = Some(request);
    let mut event = None;
    while let Some(msg) = outgoing.take() {
        let reply = link.exchange(&msg)?;
        match session.on_message(reply) {
            Ok(step) => {
                outgoing = step.reply;
                event = step.event.or(event);
            }
            Err(e) => {
                log::warn!("login aborted: {e}");
                break;
            }
        }
    }
    match event {
        Some(ClientEvent::LoginSucceeded) => {
            io.say("Login successful")?;
            io.say(&format!("Welcome to your account {}", session.username()))?;
            io.say(OPTIONS_LOGGED_IN)?;
            Ok(Some(session))
        }
        Some(ClientEvent::Rejected { reason })
            if reason == crate::protocol::gateway::REASON_UNAVAILABLE =>
        {
            io.say("Service unavailable")?;
            Ok(None)
        }
        Some(ClientEvent::ServerAuthFailed) => {
            io.say("Server authentication failed")?;
            Ok(None)
        }
        _ => {
            io.say("Invalid username or password")?;
            Ok(None)
        }
    }
}
