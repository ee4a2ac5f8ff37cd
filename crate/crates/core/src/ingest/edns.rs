use std::io::ErrorKind;
use std::net::{IpAddr, SocketAddr, UdpSocket};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use hickory_proto::op::{Edns, Message, MessageType, Query, ResponseCode};
use hickory_proto::rr::rdata::opt::{ClientSubnet, EdnsOption};
use hickory_proto::rr::{Name, RData, RecordType};
use ipnet::IpNet;

use super::nsid::{map_nsid, NsidRules};
use crate::error::{Error, Result};
use crate::model::CatchmentLabel;

pub const MAX_V4_PREFIX: u8 = 24;
pub const MAX_V6_PREFIX: u8 = 56;
pub const DEFAULT_CONCURRENCY: usize = 16;

const MAX_PAYLOAD: u16 = 1232;

/// A client-subnet lookup of one hostname through one resolver.
#[derive(Clone, Debug)]
pub struct EdnsQuery {
    pub hostname: String,
    pub resolver: SocketAddr,
    pub timeout: Duration,
    /// Rules applied to CNAME targets before falling back to the answer set.
    pub rules: Option<NsidRules>,
}

impl EdnsQuery {
    pub fn new(hostname: impl Into<String>, resolver: SocketAddr, timeout: Duration) -> Self {
        EdnsQuery {
            hostname: hostname.into(),
            resolver,
            timeout,
            rules: None,
        }
    }

    pub fn with_rules(mut self, rules: NsidRules) -> Self {
        self.rules = Some(rules);
        self
    }

    /// Wire-format query for `client_prefix`. Fails on a bad hostname or a
    /// prefix longer than the privacy limit.
    pub fn encode(&self, client_prefix: IpNet, id: u16) -> Result<Vec<u8>> {
        check_prefix(client_prefix)?;
        let name = Name::from_ascii(&self.hostname)
            .map_err(|e| Error::config(format!("hostname `{}`: {e}", self.hostname)))?;
        let mut message = Message::new(id, MessageType::Query, hickory_proto::op::OpCode::Query);
        message.metadata.recursion_desired = true;
        message.add_query(Query::query(name, RecordType::A));
        let mut edns = Edns::new();
        edns.set_max_payload(MAX_PAYLOAD);
        edns.options_mut()
            .insert(EdnsOption::Subnet(ClientSubnet::new(
                client_prefix.trunc().addr(),
                client_prefix.prefix_len(),
                0,
            )));
        message.set_edns(edns);
        message
            .to_vec()
            .map_err(|e| Error::config(format!("encoding query: {e}")))
    }

    /// Runs the lookup. Transport failures never surface as errors: a
    /// timeout (or unusable socket) is UNKNOWN, an error answer is ERROR.
    pub fn lookup(&self, client_prefix: IpNet) -> Result<CatchmentLabel> {
        let id = query_id(client_prefix);
        let packet = self.encode(client_prefix, id)?;
        Ok(match self.exchange(&packet, id) {
            Ok(Some(response)) => answer_label(&response, self.rules.as_ref()),
            Ok(None) | Err(_) => CatchmentLabel::Unknown,
        })
    }

    fn exchange(&self, packet: &[u8], id: u16) -> std::io::Result<Option<Message>> {
        let bind: SocketAddr = match self.resolver {
            SocketAddr::V4(_) => ([0, 0, 0, 0], 0).into(),
            SocketAddr::V6(_) => ([0u16; 8], 0).into(),
        };
        let socket = UdpSocket::bind(bind)?;
        socket.connect(self.resolver)?;
        socket.send(packet)?;
        let deadline = Instant::now() + self.timeout;
        let mut buf = [0u8; 4096];
        loop {
            let remaining = deadline.saturating_duration_since(Instant::now());
            if remaining.is_zero() {
                return Ok(None);
            }
            socket.set_read_timeout(Some(remaining))?;
            let len = match socket.recv(&mut buf) {
                Ok(len) => len,
                Err(e) if matches!(e.kind(), ErrorKind::WouldBlock | ErrorKind::TimedOut) => {
                    return Ok(None)
                }
                Err(e) => return Err(e),
            };
            match Message::from_vec(&buf[..len]) {
                Ok(msg)
                    if msg.metadata.id == id
                        && msg.metadata.message_type == MessageType::Response =>
                {
                    return Ok(Some(msg))
                }
                Ok(_) => continue,
                // garbage from the resolver address still counts as an answer
                Err(_) => {
                    let mut broken =
                        Message::new(id, MessageType::Response, hickory_proto::op::OpCode::Query);
                    broken.metadata.response_code = ResponseCode::FormErr;
                    return Ok(Some(broken));
                }
            }
        }
    }
}

/// Catchment implied by a DNS response.
///
/// Non-NOERROR responses are ERROR. Otherwise the first CNAME target that
/// `rules` map to a site wins; failing that the sorted, deduplicated answer
/// addresses joined by `;` form the site key. An empty answer is OTHER.
pub fn answer_label(response: &Message, rules: Option<&NsidRules>) -> CatchmentLabel {
    if response.metadata.response_code != ResponseCode::NoError {
        return CatchmentLabel::Error;
    }
    if let Some(rules) = rules {
        for record in &response.answers {
            if let RData::CNAME(target) = &record.data {
                let target = target.0.to_ascii();
                let label = map_nsid(target.trim_end_matches('.'), rules);
                if label.is_site() {
                    return label;
                }
            }
        }
    }
    let mut addresses: Vec<IpAddr> = response
        .answers
        .iter()
        .filter_map(|record| match &record.data {
            RData::A(a) => Some(IpAddr::V4(a.0)),
            RData::AAAA(aaaa) => Some(IpAddr::V6(aaaa.0)),
            _ => None,
        })
        .collect();
    addresses.sort();
    addresses.dedup();
    if addresses.is_empty() {
        return CatchmentLabel::Other;
    }
    let key = addresses
        .iter()
        .map(IpAddr::to_string)
        .collect::<Vec<_>>()
        .join(";");
    CatchmentLabel::site(&key).unwrap_or(CatchmentLabel::Other)
}

/// One client-subnet lookup; see [`EdnsQuery::lookup`].
pub fn edns_cs_lookup(
    hostname: &str,
    client_prefix: IpNet,
    resolver: SocketAddr,
    timeout: Duration,
) -> Result<CatchmentLabel> {
    EdnsQuery::new(hostname, resolver, timeout).lookup(client_prefix)
}

/// Looks up every prefix with at most `concurrency` queries in flight.
/// Results keep the order of `prefixes`. All prefixes are validated before
/// any query is sent.
pub fn collect_edns(
    query: &EdnsQuery,
    prefixes: &[IpNet],
    concurrency: usize,
) -> Result<Vec<(IpNet, CatchmentLabel)>> {
    for &prefix in prefixes {
        query.encode(prefix, 0)?;
    }
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<CatchmentLabel>>> = Mutex::new(vec![None; prefixes.len()]);
    let workers = concurrency.max(1).min(prefixes.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&prefix) = prefixes.get(i) else {
                    break;
                };
                let label = query.lookup(prefix).unwrap_or(CatchmentLabel::Unknown);
                results.lock().expect("result slots poisoned")[i] = Some(label);
            });
        }
    });
    Ok(prefixes
        .iter()
        .zip(results.into_inner().expect("result slots poisoned"))
        .map(|(&p, label)| (p, label.unwrap_or(CatchmentLabel::Unknown)))
        .collect())
}

fn check_prefix(prefix: IpNet) -> Result<()> {
    let limit = match prefix {
        IpNet::V4(_) => MAX_V4_PREFIX,
        IpNet::V6(_) => MAX_V6_PREFIX,
    };
    if prefix.prefix_len() > limit {
        return Err(Error::config(format!(
            "client prefix {prefix} is longer than /{limit}"
        )));
    }
    Ok(())
}

fn query_id(prefix: IpNet) -> u16 {
    // distinct per prefix, stable across runs
    let bytes = match prefix.trunc().addr() {
        IpAddr::V4(a) => a.octets().to_vec(),
        IpAddr::V6(a) => a.octets().to_vec(),
    };
    bytes
        .iter()
        .fold(0x5bd1u16, |h, &b| h.rotate_left(5) ^ u16::from(b))
        ^ u16::from(prefix.prefix_len())
}
