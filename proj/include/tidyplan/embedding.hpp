#pragma once

#include <string>
#include <vector>

#include "tidyplan/core.hpp"

namespace tidyplan {
namespace embed {

constexpr int kDefaultDim = 64;

// Splits a label on '|' and word boundaries (any non-alphanumeric run),
// lowercased.
std::vector<std::string> tokenize(const std::string& label);

// Deterministic token-feature embedding: each token hashes into one of
// `dim` buckets with a +/-1 sign, counts accumulate, and the vector is
// L2-normalized. Stands in for a text encoder; swap point for a real one.
std::vector<double> embed_tokens(const std::vector<std::string>& tokens, int dim);

// Pairwise embedding of an object label with a room-receptacle label.
std::vector<double> embed_orr(const std::string& object_label, const std::string& rr_label,
                              int dim = kDefaultDim);

// Label-only features for graph nodes.
std::vector<double> embed_label(const std::string& label, int dim);

uint64_t fnv1a(const std::string& s);

}  // namespace embed
}  // namespace tidyplan
