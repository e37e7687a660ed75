use std::sync::Arc;

use anyhow::Context;
use clap::{Parser, Subcommand};
use rand::Rng;
use tracing::{info, warn};

use cocteau_core::api::{self, ApiContext, SessionSigner};
use cocteau_core::config::Settings;
use cocteau_core::demo::seed_demo;
use cocteau_core::images::{HttpProvider, ImageProvider, ImageSearchClient, StubProvider};
use cocteau_core::storage::{Backend, Store};
use cocteau_core::Platform;

#[derive(Parser)]
#[command(name = "cocteau", version, about = "Scenario, vision and guessing-game backend")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply migrations and serve the JSON API.
    Serve {
        /// Load the demo scenario before serving.
        #[arg(long)]
        demo: bool,
    },
    /// Load the demo scenario into STORAGE_URL and exit.
    SeedDemo,
}

fn build_platform(settings: &Settings) -> anyhow::Result<Platform> {
    let store = Store::open(settings.storage.clone())
        .with_context(|| format!("opening storage {}", settings.storage))?;
    info!(backend = %settings.storage, schema = store.schema_version(), "storage ready");
    let provider: Arc<dyn ImageProvider> = match &settings.provider_base_url {
        Some(url) => Arc::new(
            HttpProvider::new(url.clone(), settings.provider_api_key.clone())
                .context("building image provider")?,
        ),
        None => {
            info!("PROVIDER_BASE_URL not set, using the stub image provider");
            Arc::new(StubProvider::new())
        }
    };
    Ok(
        Platform::new(Arc::new(store), ImageSearchClient::new(provider, settings.cache_ttl))
            .with_scoring(settings.scoring),
    )
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| "info".into()),
        )
        .init();

    let cli = Cli::parse();
    let settings = Settings::from_env()?;
    let platform = build_platform(&settings)?;

    match cli.command {
        Command::SeedDemo => {
            if settings.storage == Backend::in_memory() {
                warn!("STORAGE_URL is in-memory; the demo data will vanish on exit");
            }
            let scenario = seed_demo(&platform)?;
            println!("{}", scenario.scenario_id);
        }
        Command::Serve { demo } => {
            if demo {
                let scenario = seed_demo(&platform)?;
                info!(scenario = %scenario.scenario_id, "demo scenario loaded");
            }
            let secret = match &settings.session_secret {
                Some(s) => s.as_bytes().to_vec(),
                None => {
                    warn!("SESSION_SECRET not set; sessions will not survive a restart");
                    rand::rng().random::<[u8; 32]>().to_vec()
                }
            };
            if settings.admin_key.is_none() {
                warn!("ADMIN_KEY not set; policymaker sessions cannot be created");
            }
            let state = Arc::new(ApiContext {
                platform,
                signer: SessionSigner::new(
                    secret,
                    chrono::Duration::hours(api::session::DEFAULT_SESSION_TTL_HOURS),
                ),
                admin_key: settings.admin_key.clone(),
                challenge_seed: rand::rng().random(),
            });
            let app = api::router(state, &settings.cors_origins);
            let listener = tokio::net::TcpListener::bind(settings.bind_addr)
                .await
                .with_context(|| format!("binding {}", settings.bind_addr))?;
            info!("listening on {}", settings.bind_addr);
            axum::serve(listener, app)
                .with_graceful_shutdown(async {
                    let _ = tokio::signal::ctrl_c().await;
                })
                .await?;
        }
    }
    Ok(())
}
