// Copyright 2026 The adnoise Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;

/// Broad failure class. Determines the CLI exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Domain,
    Model,
    Grid,
    Numerical,
    Analysis,
    Packing,
    Io,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Config => 2,
            ErrorKind::Domain | ErrorKind::Model | ErrorKind::Grid | ErrorKind::Packing => 3,
            ErrorKind::Numerical | ErrorKind::Analysis => 4,
            ErrorKind::Io => 1,
        }
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ErrorKind::Config => "configuration",
            ErrorKind::Domain => "domain",
            ErrorKind::Model => "model",
            ErrorKind::Grid => "grid",
            ErrorKind::Numerical => "numerical",
            ErrorKind::Analysis => "analysis",
            ErrorKind::Packing => "packing",
            ErrorKind::Io => "I/O",
        };
        f.write_str(s)
    }
}

/// Error carrying the module that raised it.
#[derive(Debug, thiserror::Error)]
#[error("[{module}] {kind} error: {message}")]
pub struct Error {
    pub kind: ErrorKind,
    pub module: &'static str,
    pub message: String,
}

impl Error {
    pub fn new(kind: ErrorKind, module: &'static str, message: impl Into<String>) -> Self {
        Self {
            kind,
            module,
            message: message.into(),
        }
    }

    pub fn config(module: &'static str, message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Config, module, message)
    }

    pub fn domain(module: &'static str, message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Domain, module, message)
    }

    pub fn model(module: &'static str, message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Model, module, message)
    }

    pub fn numerical(module: &'static str, message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Numerical, module, message)
    }

    pub fn analysis(module: &'static str, message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Analysis, module, message)
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.exit_code()
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::new(ErrorKind::Io, "io", e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
