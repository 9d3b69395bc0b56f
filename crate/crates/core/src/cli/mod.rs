//! The `esis` command line: `craft`, `decode` and `run`.
//!
//! Each command writes to caller-supplied streams and returns its exit
//! code (0 success, 1 discarded PDU, 2 usage or input error).

pub mod scenario;

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::address::{parse_hex, NetAddress, NsapAddress, SnpaAddress};
use crate::pdu::dissect::dissect;
use crate::pdu::{decode, encode, encode_with_checksum, options, OptionParam, Pdu};
use crate::sim::Simulator;
use crate::Seconds;

pub use scenario::{Scenario, ScenarioError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DISCARD: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "esis",
    version,
    about = "ES-IS PDU toolkit and subnetwork simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Encode a PDU and print it as hex.
    Craft(CraftArgs),
    /// Dissect and validate a hex PDU.
    Decode(DecodeArgs),
    /// Run a scenario file on the simulator.
    Run(RunArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TypeArg {
    Esh,
    Ish,
    Rd,
    Ra,
    Aa,
}

#[derive(clap::Args, Debug)]
pub struct CraftArgs {
    #[arg(long = "type", value_enum)]
    pub pdu_type: TypeArg,
    /// ESH: source NSAPs. ISH/AA: the NET. RD: destination, then optional NET.
    #[arg(long = "addr")]
    pub addrs: Vec<String>,
    /// RD: better SNPA.
    #[arg(long)]
    pub snpa: Option<String>,
    #[arg(long, default_value_t = 60)]
    pub holding: u16,
    /// Option as `<code or name>=<hex value>`, e.g. `esct=001e`.
    #[arg(long = "opt")]
    pub opts: Vec<String>,
    /// Leave the checksum octets at 00 00.
    #[arg(long)]
    pub no_checksum: bool,
}

#[derive(clap::Args, Debug)]
pub struct DecodeArgs {
    /// File with hex text; standard input when absent.
    pub input: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct RunArgs {
    pub scenario: PathBuf,
    /// Run horizon; overrides the scenario's `until`.
    #[arg(long)]
    pub until: Option<Seconds>,
    /// Print every node's RIB after the run.
    #[arg(long)]
    pub dump_ribs: bool,
    /// Write the event log here instead of standard output.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(
    args: I,
    stdin: &mut dyn Read,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Craft(args) => cmd_craft(&args, out, err),
        Command::Decode(args) => cmd_decode(&args, stdin, out, err),
        Command::Run(args) => cmd_run(&args, out, err),
    };
    result.unwrap_or_else(|e| {
        let _ = writeln!(err, "esis: {e}");
        EXIT_ERROR
    })
}

fn nsap(text: &str) -> Result<NsapAddress, String> {
    NsapAddress::from_hex(text).map_err(|e| format!("--addr {text}: {e}"))
}

fn net(text: &str) -> Result<NetAddress, String> {
    NetAddress::from_hex(text).map_err(|e| format!("--addr {text}: {e}"))
}

fn parse_option(text: &str) -> Result<OptionParam, String> {
    let (code, value) = text
        .split_once('=')
        .ok_or_else(|| format!("--opt {text}: expected <code>=<hex>"))?;
    let code = options::code_from_name(code)
        .ok_or_else(|| format!("--opt {text}: unknown option {code:?}"))?;
    let value = parse_hex(value).map_err(|e| format!("--opt {text}: {e}"))?;
    Ok(OptionParam::new(code, value))
}

/// Builds the PDU described by the craft flags.
pub fn craft_pdu(args: &CraftArgs) -> Result<Pdu, String> {
    let single_net = |what: &str| match &args.addrs[..] {
        [one] => net(one),
        _ => Err(format!("{what} takes exactly one --addr (the NET)")),
    };
    let mut pdu = match args.pdu_type {
        TypeArg::Esh => {
            let addrs = args
                .addrs
                .iter()
                .map(|a| nsap(a))
                .collect::<Result<_, _>>()?;
            Pdu::esh(addrs, args.holding)
        }
        TypeArg::Ish => Pdu::ish(single_net("ish")?, args.holding),
        TypeArg::Aa => Pdu::aa(single_net("aa")?, args.holding),
        TypeArg::Ra => {
            if !args.addrs.is_empty() {
                return Err("ra takes no --addr".into());
            }
            Pdu::ra()
        }
        TypeArg::Rd => {
            let snpa = args.snpa.as_deref().ok_or("rd needs --snpa")?;
            let snpa = SnpaAddress::from_hex(snpa).map_err(|e| format!("--snpa {snpa}: {e}"))?;
            let (dest, redirect_net) = match &args.addrs[..] {
                [d] => (nsap(d)?, None),
                [d, n] => (nsap(d)?, Some(net(n)?)),
                _ => return Err("rd takes a destination --addr and an optional NET --addr".into()),
            };
            Pdu::rd(dest, snpa, redirect_net, args.holding)
        }
    };
    for opt in &args.opts {
        pdu = pdu.with_option(parse_option(opt)?);
    }
    Ok(pdu)
}

pub fn cmd_craft(
    args: &CraftArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, String> {
    let pdu = craft_pdu(args)?;
    let encoded = if args.no_checksum {
        encode(&pdu)
    } else {
        encode_with_checksum(&pdu)
    };
    match encoded {
        Ok(raw) => {
            writeln!(out, "{}", hex::encode(raw)).map_err(|e| e.to_string())?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            writeln!(err, "esis: {e}").map_err(|e| e.to_string())?;
            Ok(EXIT_ERROR)
        }
    }
}

/// Field listing and verdict for raw PDU octets, plus the exit code.
pub fn describe(raw: &[u8]) -> (String, i32) {
    let mut text = String::new();
    for f in dissect(raw) {
        text.push_str(&format!(
            "{:>3}  {:<26} {:<12} {}\n",
            f.offset,
            f.name,
            hex::encode(&f.raw),
            f.value
        ));
    }
    match decode(raw) {
        Ok(pdu) => {
            text.push_str(&format!("OK {}\n", pdu.pdu_type()));
            (text, EXIT_OK)
        }
        Err(reason) => {
            text.push_str(&format!("DISCARD {reason}\n"));
            (text, EXIT_DISCARD)
        }
    }
}

pub fn cmd_decode(
    args: &DecodeArgs,
    stdin: &mut dyn Read,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, String> {
    let text = match &args.input {
        Some(path) => {
            std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => {
            let mut s = String::new();
            stdin
                .read_to_string(&mut s)
                .map_err(|e| format!("stdin: {e}"))?;
            s
        }
    };
    let raw = match parse_hex(&text) {
        Ok(raw) => raw,
        Err(e) => {
            writeln!(err, "esis: unreadable input: {e}").map_err(|e| e.to_string())?;
            return Ok(EXIT_ERROR);
        }
    };
    let (listing, code) = describe(&raw);
    out.write_all(listing.as_bytes())
        .map_err(|e| e.to_string())?;
    Ok(code)
}

/// RIB dumps of every node, in declaration order, at the current time.
pub fn dump_ribs(sim: &Simulator) -> String {
    let mut text = String::new();
    for name in sim.node_names() {
        text.push_str(&format!("== rib {name} t={} ==\n", sim.now()));
        text.push_str(&sim.rib_dump(name).unwrap_or_default());
    }
    text
}

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    let text = std::fs::read_to_string(&args.scenario)
        .map_err(|e| format!("{}: {e}", args.scenario.display()))?;
    let scenario = match Scenario::parse(&text) {
        Ok(s) => s,
        Err(e) => {
            writeln!(err, "esis: {}: {e}", args.scenario.display()).map_err(|e| e.to_string())?;
            return Ok(EXIT_ERROR);
        }
    };
    let until = args
        .until
        .or(scenario.until)
        .ok_or("no run horizon: set `until` in [sim] or pass --until")?;
    let mut sim = scenario.build().map_err(|e| e.to_string())?;
    let mut log = String::new();
    for record in sim.run_until(until) {
        log.push_str(&record.to_string());
        log.push('\n');
    }
    match &args.log {
        Some(path) => std::fs::write(path, &log).map_err(|e| format!("{}: {e}", path.display()))?,
        None => out.write_all(log.as_bytes()).map_err(|e| e.to_string())?,
    }
    if args.dump_ribs {
        out.write_all(dump_ribs(&sim).as_bytes())
            .map_err(|e| e.to_string())?;
    }
    Ok(EXIT_OK)
}
