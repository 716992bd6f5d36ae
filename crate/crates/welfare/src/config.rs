use std::time::Duration;

pub const DEFAULT_BIND: &str = "127.0.0.1:8080";
pub const DEFAULT_SESSION_TTL_SECS: u64 = 3600;
pub const DEFAULT_GRID: usize = 64;

/// Immutable once the service starts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceConfig {
    pub bind_address: String,
    pub session_ttl: Duration,
    pub default_grid: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn split_port(addr: &str) -> Result<(&str, u16), ConfigError> {
    let (host, port) = addr
        .rsplit_once(':')
        .ok_or_else(|| ConfigError(format!("bind address {addr:?} is not host:port")))?;
    match port.parse::<u16>() {
        Ok(p) if p >= 1 => Ok((host, p)),
        _ => Err(ConfigError(format!("port {port:?} is not in [1, 65535]"))),
    }
}

impl ServiceConfig {
    pub fn new(
        bind_address: impl Into<String>,
        session_ttl_secs: u64,
        default_grid: usize,
    ) -> Result<Self, ConfigError> {
        let bind_address = bind_address.into();
        split_port(&bind_address)?;
        if session_ttl_secs == 0 {
            return Err(ConfigError("session_ttl must be positive".into()));
        }
        if default_grid < 2 {
            return Err(ConfigError("default_grid must be at least 2".into()));
        }
        Ok(ServiceConfig {
            bind_address,
            session_ttl: Duration::from_secs(session_ttl_secs),
            default_grid,
        })
    }

    /// Replaces the port with `port` when given, as the `PORT` variable does.
    pub fn with_port(mut self, port: Option<&str>) -> Result<Self, ConfigError> {
        if let Some(port) = port {
            let (host, _) = split_port(&self.bind_address)?;
            let candidate = format!("{host}:{port}");
            split_port(&candidate)?;
            self.bind_address = candidate;
        }
        Ok(self)
    }

    pub fn port(&self) -> u16 {
        split_port(&self.bind_address).map(|(_, p)| p).unwrap_or_default()
    }
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig::new(DEFAULT_BIND, DEFAULT_SESSION_TTL_SECS, DEFAULT_GRID).expect("defaults are valid")
    }
}
