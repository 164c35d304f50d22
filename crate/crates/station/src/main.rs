use std::net::SocketAddr;

use clap::Parser;
use explore_core::sim::builtin;
use explore_station::server::{router, run_clock, AppState};
use explore_station::{Headless, HeadlessConfig};

#[derive(Parser)]
#[command(name = "explore-station", version, about = "Base station bound to a simulated robot")]
struct Args {
    /// Builtin scenario the simulated robot runs.
    #[arg(long, default_value = "tunnel-open")]
    scenario: String,
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Simulated seconds per wall-clock second.
    #[arg(long, default_value_t = 1.0)]
    speed: f64,
    /// Link loss probability in both directions.
    #[arg(long, default_value_t = 0.0)]
    loss: f64,
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args = Args::parse();
    let scenario = builtin(&args.scenario).ok_or_else(|| format!("unknown scenario {}", args.scenario))?;
    if !(args.speed > 0.0) {
        return Err("speed must be > 0".into());
    }
    let mut cfg = HeadlessConfig::new(scenario);
    cfg.uplink.loss_probability = args.loss;
    cfg.downlink.loss_probability = args.loss;
    let state = AppState::new(Headless::new(cfg)?);
    let listener = tokio::net::TcpListener::bind(args.addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    let clock = tokio::spawn(run_clock(state.clone(), args.speed));
    tokio::select! {
        served = axum::serve(listener, router(state)) => served?,
        stopped = clock => stopped??,
    }
    Ok(())
}
