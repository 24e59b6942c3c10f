#pragma once

// Synthetic overfitting set: eight small tables (mixing plain cells, header
// sections and spans) paired with seeded noise images. The images carry no
// table semantics; they are distinct keys the decoder learns to map to the
// right structure sequence.

#include <random>
#include <string>
#include <vector>

#include "tsrlab/grammar.hpp"
#include "tsrlab/nn.hpp"
#include "tsrlab/tensor.hpp"
#include "tsrlab/token.hpp"

namespace tsrlab::nn {

inline const std::vector<std::string>& toy_table_structures() {
  static const std::vector<std::string> tables = {
      "<tbody><tr><td></td></tr></tbody>",
      "<tbody><tr><td></td><td></td></tr></tbody>",
      "<tbody><tr><td></td></tr><tr><td></td></tr></tbody>",
      "<thead><tr><td></td></tr></thead><tbody><tr><td></td></tr></tbody>",
      "<tbody><tr><td colspan=\"2\"></td></tr><tr><td></td><td></td></tr></tbody>",
      "<tbody><tr><td rowspan=\"2\"></td><td></td></tr><tr><td></td></tr></tbody>",
      "<tbody><tr><td></td><td></td><td></td></tr></tbody>",
      "<tbody><tr><td rowspan=\"2\" colspan=\"2\"></td><td></td></tr><tr><td></td></tr></tbody>",
  };
  return tables;
}

/// `count` samples (cycling through the templates), images normalized as
/// (pixel - 0.5) / 0.5 from uniform [0,1] noise.
inline std::vector<ToySample> make_toy_dataset(int count, std::uint64_t seed, int input_size = 32,
                                               std::size_t max_len = 64) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pixel(0.0, 1.0);
  const auto& tables = toy_table_structures();
  std::vector<ToySample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    ToySample s;
    s.image = Tensor({3, input_size, input_size});
    for (double& v : s.image.data) v = (pixel(rng) - 0.5) / 0.5;
    const std::string& html = tables[static_cast<std::size_t>(i) % tables.size()];
    TokenSequence body = tokenize(lex_structure(html), max_len);
    s.target.bound = max_len;
    s.target.append(Token(TokenKind::Sos));
    for (const Token& t : body.tokens) s.target.append(t);
    s.target.append(Token(TokenKind::Eos));
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace tsrlab::nn
