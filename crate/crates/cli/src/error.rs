use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}", config_message(.line, .key, .message))]
    Config {
        line: Option<usize>,
        key: String,
        message: String,
    },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Core(#[from] nbmimo::Error),
}

fn config_message(line: &Option<usize>, key: &str, message: &str) -> String {
    let mut s = String::new();
    if let Some(l) = line {
        s.push_str(&format!("line {l}: "));
    }
    if !key.is_empty() {
        s.push_str(&format!("key `{key}`: "));
    }
    s.push_str(message);
    s
}

impl CliError {
    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Config { .. } => "config",
            Self::Io { .. } => "io",
            Self::Core(_) => "run",
        }
    }

    /// `error[kind]: message` on a single line.
    pub fn one_line(&self) -> String {
        let msg = self.to_string().replace(['\n', '\r'], " ");
        format!("error[{}]: {msg}", self.kind())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } => 2,
            _ => 1,
        }
    }
}
