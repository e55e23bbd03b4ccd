#include "tidyplan/core.hpp"
#include "tidyplan/embedding.hpp"

#include <cctype>
#include <cmath>

namespace tidyplan {
namespace embed {

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<std::string> tokenize(const std::string& label) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : label) {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<double> embed_tokens(const std::vector<std::string>& tokens, int dim) {
  if (dim <= 0) throw PlanError(Err::degenerate_input, "embedding dim must be positive");
  std::vector<double> v(static_cast<size_t>(dim), 0.0);
  // three probes per token spread each one over several buckets, which keeps
  // a single unlucky collision from drowning a token's signal
  constexpr int kProbes = 3;
  for (const auto& t : tokens) {
    for (int p = 0; p < kProbes; ++p) {
      // fnv1a alone mixes poorly on short strings; finalize before use
      uint64_t h = Rng::splitmix(fnv1a(t) + 0x9e3779b97f4a7c15ull * static_cast<uint64_t>(p));
      size_t bucket = static_cast<size_t>(h % static_cast<uint64_t>(dim));
      double sign = ((h >> 32) & 1ull) ? 1.0 : -1.0;
      v[bucket] += sign;
    }
  }
  double norm = 0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0)
    for (double& x : v) x /= norm;
  return v;
}

std::vector<double> embed_orr(const std::string& object_label, const std::string& rr_label, int dim) {
  if (object_label.empty() || rr_label.empty())
    throw PlanError(Err::empty_label, "embed_orr: empty label");
  auto tokens = tokenize(object_label);
  auto rr = tokenize(rr_label);
  tokens.insert(tokens.end(), rr.begin(), rr.end());
  if (tokens.empty()) throw PlanError(Err::empty_label, "embed_orr: no tokens");
  return embed_tokens(tokens, dim);
}

std::vector<double> embed_label(const std::string& label, int dim) {
  auto tokens = tokenize(label);
  return embed_tokens(tokens, dim);
}

}  // namespace embed
}  // namespace tidyplan
