#include "swir/backends.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include "json.hpp"

#include "swir/error.hpp"

namespace swir {

ScriptedBackend::ScriptedBackend(std::vector<std::vector<double>> script, EmbeddingTable table,
                                 SpecialIds special)
    : script_(std::move(script)), table_(std::move(table)), special_(std::move(special)) {
  for (std::size_t i = 0; i < script_.size(); ++i) {
    if (script_[i].size() != table_.rows()) {
      throw Error(Errc::DimensionMismatch, "script entry " + std::to_string(i) + " has " +
                                               std::to_string(script_[i].size()) + " logits, table has " +
                                               std::to_string(table_.rows()) + " rows");
    }
  }
}

ScriptedBackend ScriptedBackend::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidArgument, "cannot open script " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
    auto script = doc.at("script").get<std::vector<std::vector<double>>>();
    auto rows = doc.at("embeddings").get<std::vector<std::vector<double>>>();
    SpecialIds special;
    special.eos = doc.at("eos").get<TokenId>();
    special.think_begin = doc.at("think_begin").get<std::vector<TokenId>>();
    special.think_end = doc.at("think_end").get<std::vector<TokenId>>();
    return ScriptedBackend(std::move(script), EmbeddingTable::from_rows(rows), std::move(special));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, path.string() + ": " + e.what());
  }
}

std::vector<double> ScriptedBackend::step(const TokenInput& input) {
  if (const auto* e = std::get_if<Embedding>(&input); e && e->size() != table_.dim()) {
    throw Error(Errc::BackendFailure, "input embedding has wrong dimension");
  }
  if (cursor_ >= script_.size()) {
    throw Error(Errc::BackendFailure,
                "script exhausted after " + std::to_string(script_.size()) + " steps");
  }
  return script_[cursor_++];
}

namespace {

TokenId resolve_id(TokenId id, std::size_t vocab) {
  const auto v = static_cast<std::int64_t>(vocab);
  const std::int64_t resolved = id < 0 ? v + id : id;
  if (resolved < 0 || resolved >= v) {
    throw Error(Errc::InvalidArgument, "special id " + std::to_string(id) + " outside vocabulary");
  }
  return static_cast<TokenId>(resolved);
}

}  // namespace

TinyModel::TinyModel(const TinyModelConfig& config)
    : vocab_(config.vocab_size), dim_(config.dim), logit_scale_(config.logit_scale), memory_(config.memory) {
  if (vocab_ < 4) throw Error(Errc::InvalidArgument, "tiny model needs a vocabulary of at least 4");
  if (dim_ < 1) throw Error(Errc::InvalidArgument, "tiny model needs dim >= 1");
  if (!(memory_ >= 0.0 && memory_ < 1.0)) throw Error(Errc::InvalidArgument, "tiny model memory must lie in [0, 1)");

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> rows(vocab_ * dim_);
  for (auto& x : rows) x = normal(rng);
  table_ = EmbeddingTable(vocab_, dim_, std::move(rows));
  output_.resize(vocab_ * dim_);
  const double norm = 1.0 / std::sqrt(static_cast<double>(dim_));
  for (auto& x : output_) x = normal(rng) * norm;

  special_.eos = resolve_id(config.eos, vocab_);
  special_.think_begin = {resolve_id(config.think_begin, vocab_)};
  special_.think_end = {resolve_id(config.think_end, vocab_)};
  state_.assign(dim_, 0.0);
}

void TinyModel::reset() {
  state_.assign(dim_, 0.0);
  seen_ = 0;
}

std::vector<double> TinyModel::step(const TokenInput& input) {
  std::span<const double> x;
  if (const auto* id = std::get_if<TokenId>(&input)) {
    if (*id < 0 || static_cast<std::size_t>(*id) >= vocab_) {
      throw Error(Errc::BackendFailure, "token id " + std::to_string(*id) + " outside vocabulary");
    }
    x = table_.row(static_cast<std::size_t>(*id));
  } else {
    const auto& e = std::get<Embedding>(input);
    if (e.size() != dim_) throw Error(Errc::BackendFailure, "input embedding has wrong dimension");
    x = e;
  }

  ++seen_;
  const double n = static_cast<double>(seen_);
  if (memory_ > 0.0 && seen_ > 1) {
    for (std::size_t j = 0; j < dim_; ++j) state_[j] = memory_ * state_[j] + (1.0 - memory_) * x[j];
  } else {
    for (std::size_t j = 0; j < dim_; ++j) state_[j] += (x[j] - state_[j]) / n;
  }

  std::vector<double> logits(vocab_);
  const auto vocab = static_cast<std::int64_t>(vocab_);
#pragma omp parallel for if (vocab_ * dim_ >= 65536)
  for (std::int64_t v = 0; v < vocab; ++v) {
    const double* w = output_.data() + static_cast<std::size_t>(v) * dim_;
    double acc = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) acc += w[j] * state_[j];
    logits[static_cast<std::size_t>(v)] = logit_scale_ * acc;
  }
  return logits;
}

}  // namespace swir
