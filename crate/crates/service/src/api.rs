use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use mcnn::nn::Network;
use mcnn::text::{encode_chars, synthesize_chars};
use mcnn::tictactoe::{network_move, reaction_distribution, winner, Board, GameOutcome, Player};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::{AppState, TEXT_MODEL, TICTACTOE_MODEL};

const MAX_TRIALS: usize = 100_000;
const MAX_LENGTH: usize = 5000;

type Shared = State<Arc<AppState>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    fn bad(code: &'static str, message: impl Into<String>) -> Self {
        Self { status: StatusCode::BAD_REQUEST, code, message: message.into() }
    }

    fn missing_model(name: &str) -> Self {
        Self { status: StatusCode::NOT_FOUND, code: "model_not_found", message: format!("no {name} model loaded") }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": { "code": self.code, "message": self.message } });
        (self.status, Json(body)).into_response()
    }
}

pub(crate) fn routes() -> Router<Arc<AppState>> {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/tictactoe/move", post(ttt_move))
        .route("/api/tictactoe/distribution", post(ttt_distribution))
        .route("/api/text/synthesize", post(text_synthesize))
}

fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad("invalid_request", e.to_string()))
}

fn model<'a>(state: &'a AppState, name: &str) -> Result<&'a Network, ApiError> {
    state.model(name).ok_or_else(|| ApiError::missing_model(name))
}

fn seed_or_entropy(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(rand::random)
}

async fn health(State(state): Shared) -> Json<serde_json::Value> {
    Json(json!({ "status": "ok", "models": state.model_names() }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MoveRequest {
    board: Vec<i64>,
    player: i64,
    seed: Option<u64>,
}

#[derive(Serialize)]
struct MoveResponse {
    cell: usize,
    board_after: Vec<i8>,
    outcome: &'static str,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DistributionRequest {
    board: Vec<i64>,
    player: i64,
    trials: usize,
    seed: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SynthesizeRequest {
    seed_text: String,
    length: usize,
    seed: Option<u64>,
}

/// Board and player of a position the player may move in.
fn playable(board: &[i64], player: i64) -> Result<(Board, Player), ApiError> {
    let board = Board::from_slice(board).map_err(|e| ApiError::bad("invalid_board", e.to_string()))?;
    let player = Player::from_sign(player).map_err(|e| ApiError::bad("invalid_player", e.to_string()))?;
    let outcome = winner(&board).map_err(|e| ApiError::bad("invalid_board", e.to_string()))?;
    if outcome.is_over() {
        return Err(ApiError::bad("game_over", format!("game already finished: {}", outcome.as_str())));
    }
    if !board.is_turn_of(player) {
        return Err(ApiError::bad("wrong_turn", format!("it is not {}'s turn", if player == Player::X { "X" } else { "O" })));
    }
    Ok((board, player))
}

fn internal(e: mcnn::Error) -> ApiError {
    ApiError { status: StatusCode::INTERNAL_SERVER_ERROR, code: "internal", message: e.to_string() }
}

async fn ttt_move(State(state): Shared, body: Bytes) -> Result<Json<MoveResponse>, ApiError> {
    let req: MoveRequest = parse(&body)?;
    let (board, player) = playable(&req.board, req.player)?;
    let net = model(&state, TICTACTOE_MODEL)?;
    let mut rng = mcnn::rng::seeded(seed_or_entropy(req.seed));
    let cell = network_move(net, &board, player, mcnn::rng::unit(&mut rng)).map_err(internal)?;
    let after = board.play(cell, player).map_err(internal)?;
    let outcome: GameOutcome = winner(&after).map_err(internal)?;
    Ok(Json(MoveResponse { cell, board_after: after.cells().to_vec(), outcome: outcome.as_str() }))
}

async fn ttt_distribution(State(state): Shared, body: Bytes) -> Result<Json<serde_json::Value>, ApiError> {
    let req: DistributionRequest = parse(&body)?;
    let (board, player) = playable(&req.board, req.player)?;
    if !(1..=MAX_TRIALS).contains(&req.trials) {
        return Err(ApiError::bad("invalid_trials", format!("trials must lie in 1..={MAX_TRIALS}")));
    }
    let net = model(&state, TICTACTOE_MODEL)?;
    let dist = reaction_distribution(net, &board, player, req.trials, seed_or_entropy(req.seed)).map_err(internal)?;
    Ok(Json(json!({ "probs": dist.probs() })))
}

async fn text_synthesize(State(state): Shared, body: Bytes) -> Result<Json<serde_json::Value>, ApiError> {
    let req: SynthesizeRequest = parse(&body)?;
    if !(1..=MAX_LENGTH).contains(&req.length) {
        return Err(ApiError::bad("invalid_length", format!("length must lie in 1..={MAX_LENGTH}")));
    }
    let net = model(&state, TEXT_MODEL)?;
    let context = net.input_dim().saturating_sub(1);
    if encode_chars(&req.seed_text).len() < context {
        return Err(ApiError::bad("seed_text_too_short", format!("seed_text needs at least {context} characters")));
    }
    let text = synthesize_chars(net, &req.seed_text, req.length, seed_or_entropy(req.seed)).map_err(internal)?;
    Ok(Json(json!({ "text": text })))
}
