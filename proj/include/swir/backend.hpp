#pragma once

#include <variant>
#include <vector>

#include "swir/confidence.hpp"
#include "swir/mixer.hpp"

namespace swir {

struct SpecialIds {
  TokenId eos = 0;
  std::vector<TokenId> think_begin;
  std::vector<TokenId> think_end;

  bool operator==(const SpecialIds&) const = default;
};

// A discrete token id or a raw input embedding.
using TokenInput = std::variant<TokenId, Embedding>;

/// Next-token model driven one position at a time.
///
/// `step` appends one input position and returns logits for the following
/// position. Implementations must be deterministic given the input history
/// and must accept both token ids and raw embeddings. Errors surface as
/// Errc::BackendFailure.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual std::vector<double> step(const TokenInput& input) = 0;
  virtual void reset() = 0;
  virtual const EmbeddingTable& embedding_table() const = 0;
  virtual SpecialIds special_ids() const = 0;
};

}  // namespace swir
