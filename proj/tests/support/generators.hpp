#pragma once

// Randomized inputs shared by the unit and acceptance suites.

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tsrlab/grammar.hpp"
#include "tsrlab/teds.hpp"
#include "tsrlab/token.hpp"

namespace tsrlab::testutil {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline bool chance(Rng& rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

/// Random structurally valid table: optional thead/tbody wrappers, 1..4 rows,
/// 1..4 cells per row, spans sprinkled in.
inline TableTree random_table_tree(Rng& rng, double span_prob = 0.3) {
  auto random_cell = [&] {
    TableNode td{TagLabel::Td, 0, 0, {}};
    if (chance(rng, span_prob)) {
      if (chance(rng, 0.5)) td.rowspan = uniform_int(rng, 2, 10);
      if (td.rowspan == 0 || chance(rng, 0.4)) td.colspan = uniform_int(rng, 2, 10);
    }
    return td;
  };
  auto random_row = [&] {
    TableNode tr{TagLabel::Tr, 0, 0, {}};
    const int n = uniform_int(rng, 1, 4);
    for (int i = 0; i < n; ++i) tr.children.push_back(random_cell());
    return tr;
  };

  TableTree tree;
  const int shape = uniform_int(rng, 0, 3);
  auto section = [&](TagLabel label, int rows) {
    TableNode s{label, 0, 0, {}};
    for (int i = 0; i < rows; ++i) s.children.push_back(random_row());
    return s;
  };
  switch (shape) {
    case 0:
      tree.roots.push_back(section(TagLabel::Tbody, uniform_int(rng, 1, 4)));
      break;
    case 1:
      tree.roots.push_back(section(TagLabel::Thead, 1));
      tree.roots.push_back(section(TagLabel::Tbody, uniform_int(rng, 1, 3)));
      break;
    case 2: {
      const int rows = uniform_int(rng, 1, 4);
      for (int i = 0; i < rows; ++i) tree.roots.push_back(random_row());
      break;
    }
    default:
      tree.roots.push_back(section(TagLabel::Tbody, 0));  // empty section
      break;
  }
  return tree;
}

/// Random table derived from an actual occupancy grid, so every span is
/// consistent: rectangles tile the grid with no collisions and no ragged rows.
inline TableTree random_grid_table_tree(Rng& rng) {
  const int R = uniform_int(rng, 1, 4);
  const int C = uniform_int(rng, 1, 4);
  std::vector<std::vector<bool>> occupied(R, std::vector<bool>(C, false));
  std::vector<TableNode> rows(R);
  for (auto& row : rows) row.label = TagLabel::Tr;

  for (int r = 0; r < R; ++r) {
    for (int c = 0; c < C; ++c) {
      if (occupied[r][c]) continue;
      int max_w = 0;
      while (c + max_w < C && !occupied[r][c + max_w]) ++max_w;
      const int w = uniform_int(rng, 1, max_w);
      const int h = uniform_int(rng, 1, R - r);
      for (int dr = 0; dr < h; ++dr) {
        for (int dc = 0; dc < w; ++dc) occupied[r + dr][c + dc] = true;
      }
      TableNode td{TagLabel::Td, h >= 2 ? h : 0, w >= 2 ? w : 0, {}};
      rows[r].children.push_back(td);
    }
  }

  TableTree tree;
  if (chance(rng, 0.5)) {
    TableNode body{TagLabel::Tbody, 0, 0, {}};
    body.children = std::move(rows);
    tree.roots.push_back(std::move(body));
  } else {
    for (auto& row : rows) tree.roots.push_back(std::move(row));
  }
  return tree;
}

inline std::vector<std::string> surfaces_of(const TokenSequence& seq) {
  std::vector<std::string> out;
  out.reserve(seq.size());
  for (const Token& t : seq.tokens) out.push_back(t.surface());
  return out;
}

/// Single-token mutations that must break the grammar: deleting any
/// non-attribute token, or swapping an adjacent unequal pair that is not two
/// attributes (attribute order is normalized away by the parser).
inline std::vector<TokenSequence> breaking_mutations(const TokenSequence& seq) {
  std::vector<TokenSequence> out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i].is_span_attribute()) continue;
    TokenSequence m = seq;
    m.tokens.erase(m.tokens.begin() + static_cast<std::ptrdiff_t>(i));
    out.push_back(std::move(m));
  }
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    if (seq[i] == seq[i + 1]) continue;
    if (seq[i].is_span_attribute() && seq[i + 1].is_span_attribute()) continue;
    TokenSequence m = seq;
    std::swap(m.tokens[i], m.tokens[i + 1]);
    out.push_back(std::move(m));
  }
  return out;
}

/// Random ordered labeled tree with up to max_nodes nodes, generic labels,
/// occasional span attributes. For cross-checks against the exhaustive
/// edit-distance oracle.
inline LabeledTree random_labeled_tree(Rng& rng, int max_nodes) {
  const int n = uniform_int(rng, 1, max_nodes);
  static const char* labels[] = {"a", "b", "c"};
  LabeledTree t;
  auto random_node = [&] {
    TreeNode node;
    node.label = labels[uniform_int(rng, 0, 2)];
    if (chance(rng, 0.2)) node.rowspan = uniform_int(rng, 2, 3);
    if (chance(rng, 0.2)) node.colspan = uniform_int(rng, 2, 3);
    return node;
  };
  t.root = random_node();
  std::vector<TreeNode*> pool{&t.root};
  for (int i = 1; i < n; ++i) {
    TreeNode* parent = pool[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(pool.size()) - 1))];
    parent->children.push_back(random_node());
    // reseat pointers: children vector may have reallocated
    pool.clear();
    std::vector<TreeNode*> stack{&t.root};
    while (!stack.empty()) {
      TreeNode* cur = stack.back();
      stack.pop_back();
      pool.push_back(cur);
      for (auto& ch : cur->children) stack.push_back(&ch);
    }
  }
  return t;
}

}  // namespace tsrlab::testutil
