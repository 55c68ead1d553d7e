// Copyright 2026 The epivote Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use epivote_core::error::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("scenario line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("scenario field `{path}`: {message}")]
    Field { path: String, message: String },
    #[error("{0}")]
    Core(#[from] CoreError),
    #[error("command `{command}` needs a `{expected}` mechanism, scenario has `{found}`")]
    MechanismMismatch {
        command: &'static str,
        expected: &'static str,
        found: &'static str,
    },
    #[error("writing report: {0}")]
    Output(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// A follow-up suggestion for the diagnostic, if any.
    pub fn hint(&self) -> Option<&'static str> {
        match self {
            Self::Core(CoreError::CapExceeded { .. } | CoreError::SupportTooLarge { .. }) => {
                Some("too large for exact evaluation; try `mc` for a Monte Carlo estimate")
            }
            Self::Core(CoreError::Disconnected) => {
                Some("three-step coordination needs a connected star cluster graph")
            }
            _ => None,
        }
    }
}
